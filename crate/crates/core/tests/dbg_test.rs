#[test]
fn dbg_unit() {
    use opcalc::collection::*;
    use opcalc::Rat;
    use opcalc::carrier::Kind;
    let j = SymCollection::<Rat>::unit(Kind::Set, &["o".to_string()], 2);
    let mut x = SymCollection::<Rat>::new(Kind::Set, &["o".to_string()], 2);
    for p in all_canonical_profiles(&["o".to_string()], 2) {
        let carrier = opcalc::Carrier::set(vec!["*".into()]).unwrap();
        x.set_component(p.clone(), opcalc::action::ActionOf::trivial(p.young_group(), carrier), vec![0]).unwrap();
    }
    match circle_product(&x, &j) { Ok(_) => println!("xj ok"), Err(e) => println!("xj ERR: {e}") }
    match circle_product(&j, &x) { Ok(_) => println!("jx ok"), Err(e) => println!("jx ERR: {e}") }
}
