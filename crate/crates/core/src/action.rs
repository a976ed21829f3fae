//! Finite-group actions on carriers, their coinvariants, and exact
//! isomorphism tests for carriers-with-action.
//!
//! Set actions are compared through orbit/stabilizer signatures; vector
//! space actions through characters, which determine rational
//! representations up to isomorphism in characteristic zero.

use std::collections::BTreeMap;

use crate::carrier::{multi_coequalizer, Carrier, CarrierMapOf, Kind};
use crate::error::Error;
use crate::perm::{conjugate_subgroups, FiniteGroup, Perm};
use crate::scalar::Scalar;

/// A left action of a finite permutation group on a carrier: one
/// automorphism per group element, forming a homomorphism.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionOf<S: Scalar> {
    group: FiniteGroup,
    carrier: Carrier,
    maps: BTreeMap<Perm, CarrierMapOf<S>>,
}

impl<S: Scalar> ActionOf<S> {
    pub fn trivial(group: FiniteGroup, carrier: Carrier) -> Self {
        let maps = group
            .elements()
            .iter()
            .map(|g| (g.clone(), CarrierMapOf::identity(&carrier)))
            .collect();
        ActionOf { group, carrier, maps }
    }

    /// Extend generator images to the whole group, checking the
    /// homomorphism property along the way.
    pub fn from_generator_maps(
        group: FiniteGroup,
        carrier: Carrier,
        gen_maps: &[(Perm, CarrierMapOf<S>)],
    ) -> Result<Self, Error> {
        for (g, m) in gen_maps {
            if !group.contains(g) {
                return Err(Error::invalid("generator not in group"));
            }
            if m.source() != &carrier || m.target() != &carrier || !m.is_iso() {
                return Err(Error::CheckFailed("action generator image is not an automorphism".into()));
            }
        }
        let mut maps: BTreeMap<Perm, CarrierMapOf<S>> = BTreeMap::new();
        maps.insert(Perm::identity(group.degree()), CarrierMapOf::identity(&carrier));
        let mut frontier = vec![Perm::identity(group.degree())];
        while let Some(g) = frontier.pop() {
            let mg = maps[&g].clone();
            for (h, mh) in gen_maps {
                let hg = h.compose(&g);
                // ρ(hg) = ρ(h) ∘ ρ(g)
                let map_hg = mg.then(mh);
                match maps.get(&hg) {
                    None => {
                        maps.insert(hg.clone(), map_hg);
                        frontier.push(hg);
                    }
                    Some(prev) => {
                        if prev != &map_hg {
                            return Err(Error::CheckFailed(
                                "action maps are not a group homomorphism".into(),
                            ));
                        }
                    }
                }
            }
        }
        if maps.len() != group.order() {
            return Err(Error::invalid("generator maps given for non-generating set"));
        }
        Ok(ActionOf { group, carrier, maps })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn carrier(&self) -> &Carrier {
        &self.carrier
    }

    pub fn map(&self, g: &Perm) -> &CarrierMapOf<S> {
        &self.maps[g]
    }

    /// Full homomorphism re-check (used by validation commands).
    pub fn check(&self) -> Result<(), Error> {
        for g in self.group.elements() {
            let mg = &self.maps[g];
            if !mg.is_iso() {
                return Err(Error::CheckFailed("action map not invertible".into()));
            }
            for h in self.group.generators() {
                let hg = h.compose(g);
                if &mg.then(&self.maps[h]) != &self.maps[&hg] {
                    return Err(Error::CheckFailed("action not multiplicative".into()));
                }
            }
        }
        Ok(())
    }

    /// The quotient X_G with its projection.
    pub fn coinvariants(&self) -> (Carrier, CarrierMapOf<S>) {
        let pairs: Vec<_> = self
            .group
            .generators()
            .iter()
            .map(|g| (self.maps[g].clone(), CarrierMapOf::identity(&self.carrier)))
            .collect();
        multi_coequalizer(&self.carrier, &pairs).expect("coinvariants")
    }

    /// Restrict along an inclusion of groups with the same degree.
    pub fn restricted(&self, sub: &FiniteGroup) -> Result<ActionOf<S>, Error> {
        let mut maps = BTreeMap::new();
        for g in sub.elements() {
            let Some(m) = self.maps.get(g) else {
                return Err(Error::invalid("not a subgroup of the acting group"));
            };
            maps.insert(g.clone(), m.clone());
        }
        Ok(ActionOf { group: sub.clone(), carrier: self.carrier.clone(), maps })
    }
}

/// Is `f` equivariant for the two actions of the same group?
pub fn is_equivariant<S: Scalar>(
    f: &CarrierMapOf<S>,
    src: &ActionOf<S>,
    tgt: &ActionOf<S>,
) -> bool {
    if src.group() != tgt.group() {
        return false;
    }
    src.group()
        .generators()
        .iter()
        .all(|g| src.map(g).then(f) == f.then(tgt.map(g)))
}

/// Exact isomorphism test for two carriers with an action of the same group.
///
/// Sets: equivariant bijection exists iff the multisets of orbit types
/// (orbit size + stabilizer conjugacy class) coincide. Vector spaces over a
/// characteristic-zero field: isomorphism iff characters agree.
pub fn equivariant_iso<S: Scalar>(a: &ActionOf<S>, b: &ActionOf<S>) -> bool {
    if a.group() != b.group() {
        return false;
    }
    if a.carrier().kind() != b.carrier().kind() {
        return false;
    }
    if a.carrier().size() != b.carrier().size() {
        return false;
    }
    match a.carrier().kind() {
        Kind::Set => {
            let mut orbits_a = orbit_data(a);
            let orbits_b = orbit_data(b);
            if orbits_a.len() != orbits_b.len() {
                return false;
            }
            // match orbits one by one
            for ob in &orbits_b {
                let pos = orbits_a.iter().position(|oa| {
                    oa.0 == ob.0 && conjugate_subgroups(a.group(), &oa.1, &ob.1)
                });
                match pos {
                    Some(i) => {
                        orbits_a.remove(i);
                    }
                    None => return false,
                }
            }
            true
        }
        Kind::Vect => a
            .group()
            .elements()
            .iter()
            .all(|g| a.map(g).matrix().trace() == b.map(g).matrix().trace()),
    }
}

/// Orbit list of a set action: for each orbit, (size, pointwise stabilizer
/// of its least point).
fn orbit_data<S: Scalar>(a: &ActionOf<S>) -> Vec<(usize, Vec<Perm>)> {
    let n = a.carrier().size();
    let mut seen = vec![false; n];
    let mut out = vec![];
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let mut orbit = vec![];
        for g in a.group().elements() {
            let y = a.map(g).apply_index(x);
            if !seen[y] {
                seen[y] = true;
                orbit.push(y);
            }
        }
        let stab: Vec<Perm> = a
            .group()
            .elements()
            .iter()
            .filter(|g| a.map(g).apply_index(x) == x)
            .cloned()
            .collect();
        out.push((orbit.len(), stab));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::Rat;
    use num_traits::FromPrimitive;

    type Map = CarrierMapOf<Rat>;
    type Action = ActionOf<Rat>;

    fn q(n: i64) -> Rat {
        Rat::from_i64(n).unwrap()
    }

    fn swap_action_on(labels: &[&str]) -> Action {
        let c = Carrier::set(labels.iter().map(|s| s.to_string()).collect()).unwrap();
        let g = FiniteGroup::symmetric(2);
        let swap = Map::from_indices(&c, &c, vec![1, 0]).unwrap();
        Action::from_generator_maps(g, c, &[(Perm::transposition(2, 0, 1), swap)]).unwrap()
    }

    #[test]
    fn trivial_group_coinvariants_is_identity() {
        let c = Carrier::set(vec!["a".into(), "b".into()]).unwrap();
        let a = Action::trivial(FiniteGroup::trivial(1), c.clone());
        let (q, pi) = a.coinvariants();
        assert_eq!(q.size(), 2);
        assert!(pi.is_iso());
    }

    #[test]
    fn swap_coinvariants_singleton() {
        let a = swap_action_on(&["a", "b"]);
        let (q, _) = a.coinvariants();
        assert_eq!(q.size(), 1);
        assert_eq!(q.labels(), &["a"]);
    }

    #[test]
    fn vect_swap_coinvariants_dim_one() {
        let c = Carrier::vect(vec!["x".into(), "y".into()]).unwrap();
        let g = FiniteGroup::symmetric(2);
        let swap = Map::from_matrix(
            &c,
            &c,
            Matrix::from_rows(vec![vec![q(0), q(1)], vec![q(1), q(0)]]),
        )
        .unwrap();
        let a = Action::from_generator_maps(g, c, &[(Perm::transposition(2, 0, 1), swap)]).unwrap();
        let (q, _) = a.coinvariants();
        assert_eq!(q.size(), 1);
    }

    #[test]
    fn non_homomorphic_action_rejected() {
        let c = Carrier::set(vec!["a".into(), "b".into(), "c".into()]).unwrap();
        let g = FiniteGroup::symmetric(2);
        // order-3 automorphism assigned to an order-2 element
        let rot = Map::from_indices(&c, &c, vec![1, 2, 0]).unwrap();
        let r = Action::from_generator_maps(g, c, &[(Perm::transposition(2, 0, 1), rot)]);
        assert!(r.is_err());
    }

    #[test]
    fn equivariant_iso_distinguishes_orbit_types() {
        let free = swap_action_on(&["a", "b"]);
        let c = Carrier::set(vec!["u".into(), "v".into()]).unwrap();
        let fixed = Action::trivial(FiniteGroup::symmetric(2), c);
        assert!(!equivariant_iso(&free, &fixed));
        let free2 = swap_action_on(&["p", "q"]);
        assert!(equivariant_iso(&free, &free2));
    }
}
