//! Truncated tabulated operads: partial compositions on canonical profiles
//! with general composition derived through transports, axiom checking,
//! free operads on symmetric collections, Hadamard products, the
//! symmetrization adjunction with its counit and splittings, and the
//! built-in zoo used by the check suites.

use std::collections::BTreeMap;

use crate::action::{is_equivariant, ActionOf};
use crate::carrier::{tensor_maps, Carrier, CarrierMapOf, Kind};
use crate::collection::{
    all_canonical_profiles, collections_isomorphic, groupoid_colimit, colimit_young_action,
    relabel_snaky, restrict_map, sub_carrier, tag_transport, CollectionMap, GroupoidColimit,
    SymCollection, TagSpec,
};
use crate::error::Error;
use crate::perm::Perm;
use crate::profile::{splice, Color, Profile};
use crate::scalar::Scalar;
use crate::tree::{enumerate_trees, Tree, TreeConstraint};

/// A truncated operad: symmetric collection, identities, and partial
/// composition maps `∘_i` on canonical profile pairs.
#[derive(Clone, Debug)]
pub struct Operad<S: Scalar> {
    pub collection: SymCollection<S>,
    /// per color, the map 𝟙 → O[(c);c] picking the identity
    identities: BTreeMap<Color, CarrierMapOf<S>>,
    /// (outer canonical profile, 1-based slot, inner canonical profile) →
    /// map O[p] ⊗ O[q] → O[canonical(p ∘_i q)]
    compositions: BTreeMap<(Profile, usize, Profile), CarrierMapOf<S>>,
}

impl<S: Scalar> Operad<S> {
    pub fn kind(&self) -> Kind {
        self.collection.kind
    }

    pub fn colors(&self) -> &[Color] {
        &self.collection.colors
    }

    pub fn truncation(&self) -> usize {
        self.collection.truncation
    }

    pub fn identity_map(&self, color: &str) -> Option<&CarrierMapOf<S>> {
        self.identities.get(color)
    }

    /// Index (sets) or coefficient vector (vector spaces) of id_c in the
    /// stored unary component.
    pub fn identity_index(&self, color: &str) -> usize {
        let m = self.identities.get(color).expect("identity present");
        m.apply_index(0)
    }

    pub fn stored_composition(&self, p: &Profile, i: usize, q: &Profile) -> Option<&CarrierMapOf<S>> {
        self.compositions.get(&(p.clone(), i, q.clone()))
    }

    /// Partial composition on arbitrarily ordered profiles, including the
    /// transport correcting for re-sorting of the spliced profile.
    /// `None` when the result falls above the truncation or a component is
    /// missing.
    pub fn compose_general(
        &self,
        p: &Profile,
        i: usize,
        q: &Profile,
    ) -> Option<CarrierMapOf<S>> {
        if i == 0 || i > p.arity() || p.inputs[i - 1] != q.output {
            return None;
        }
        let spliced = Profile::new(splice(&p.inputs, i, &q.inputs).ok()?, p.output.clone());
        if spliced.arity() > self.truncation() {
            return None;
        }
        let (cp, sigma_p) = p.canonical();
        let (cq, sigma_q) = q.canonical();
        let i_star = sigma_p.apply(i - 1) + 1;
        let stored = self.compositions.get(&(cp.clone(), i_star, cq.clone()))?;
        // canonical splice the stored map lands in
        let csplice = Profile::new(
            splice(&cp.inputs, i_star, &cq.inputs).ok()?,
            cp.output.clone(),
        );
        // relabeling π: positions of csplice → positions of spliced
        let k = p.arity();
        let m = q.arity();
        let mut pi = vec![0usize; k + m - 1];
        let sp_inv = sigma_p.inverse();
        let sq_inv = sigma_q.inverse();
        for j in 0..k {
            if j == i_star - 1 {
                continue;
            }
            let src_pos = if j < i_star - 1 { j } else { j + m - 1 };
            let orig = sp_inv.apply(j); // position in p
            let dst_pos = if orig < i - 1 { orig } else { orig + m - 1 };
            pi[src_pos] = dst_pos;
        }
        for l in 0..m {
            let src_pos = i_star - 1 + l;
            let orig = sq_inv.apply(l);
            pi[src_pos] = i - 1 + orig;
        }
        let pi = Perm::from_vec(pi).ok()?;
        let fix = self.collection.transport(&csplice.inputs, &csplice.output, &pi)?;
        Some(stored.then(&fix))
    }

    /// Compose a fully decorated two-level structure: plug `inner[j]`
    /// (profile and stored element index, sets only) into slot `j+1` of the
    /// outer element for each j, left to right. Used by set-level oracles.
    pub fn compose_full_set(
        &self,
        outer: (&Profile, usize),
        inner: &[(Profile, usize)],
    ) -> Option<(Profile, usize)> {
        assert_eq!(self.kind(), Kind::Set);
        let (p0, x0) = outer;
        assert_eq!(p0.arity(), inner.len());
        // fold right-to-left so earlier positions stay valid
        let mut profile = p0.clone();
        let mut elem = x0;
        for j in (0..inner.len()).rev() {
            let (q, y) = &inner[j];
            let m = self.compose_general(&profile, j + 1, q)?;
            let (pc, _) = profile.canonical();
            let (qc, _) = q.canonical();
            let (pcar, _) = self.collection.carrier_at(&pc);
            let (qcar, _) = self.collection.carrier_at(&qc);
            let _ = pcar;
            let idx = elem * qcar.size() + *y;
            elem = m.apply_index(idx);
            profile = Profile::new(splice(&profile.inputs, j + 1, &q.inputs).ok()?, profile.output.clone());
        }
        Some((profile, elem))
    }

    /// Unit, associativity and equivariance within the truncation.
    pub fn check_axioms(&self) -> Result<CheckReport, Error> {
        let mut report = CheckReport::default();
        let n = self.truncation();
        // identities exist and are units
        for c in self.colors() {
            let Some(idm) = self.identities.get(c) else {
                report.fail(format!("missing identity at color {c}"));
                continue;
            };
            let up = Profile::unary(c.clone(), c.clone());
            let (unary, _) = self.collection.carrier_at(&up);
            if idm.target() != &unary {
                report.fail(format!("identity at {c} not in unary component"));
            }
        }
        for p in all_canonical_profiles(self.colors(), n) {
            let (pc, _) = self.collection.carrier_at(&p);
            if pc.is_empty() {
                continue;
            }
            // right unit: x ∘_i id = x
            for i in 1..=p.arity() {
                let color = p.inputs[i - 1].clone();
                let Some(idm) = self.identities.get(&color) else { continue };
                let q = Profile::unary(color.clone(), color.clone());
                let Some(comp) = self.compose_general(&p, i, &q) else {
                    report.fail(format!("missing composition {p:?} ∘_{i} id"));
                    continue;
                };
                let idx = tensor_maps(&[CarrierMapOf::identity(&pc), idm.clone()])?;
                // note: splice(p, i, unary) = p, already canonical
                let got = idx.then(&comp);
                // domain is pc ⊗ 𝟙 ≅ pc
                let expect = iso_tensor_unit(&pc)?.then(&CarrierMapOf::identity(&pc));
                if maps_agree(&got, &expect) {
                    report.pass();
                } else {
                    report.fail(format!("right unit fails at {p:?} slot {i}"));
                }
            }
            // left unit: id ∘_1 x = x
            let d = p.output.clone();
            if let Some(idm) = self.identities.get(&d) {
                let up = Profile::unary(d.clone(), d.clone());
                if let Some(comp) = self.compose_general(&up, 1, &p) {
                    let idx = tensor_maps(&[idm.clone(), CarrierMapOf::identity(&pc)])?;
                    let got = idx.then(&comp);
                    let expect = iso_unit_tensor(&pc)?;
                    if maps_agree(&got, &expect) {
                        report.pass();
                    } else {
                        report.fail(format!("left unit fails at {p:?}"));
                    }
                }
            }
            // equivariance of stored compositions on generators
            for q in all_canonical_profiles(self.colors(), n) {
                let (qc, _) = self.collection.carrier_at(&q);
                if qc.is_empty() {
                    continue;
                }
                for i in 1..=p.arity() {
                    if p.inputs[i - 1] != q.output || p.arity() + q.arity() - 1 > n {
                        continue;
                    }
                    if self.stored_composition(&p, i, &q).is_none() {
                        report.fail(format!("missing stored composition {p:?} ∘_{i} {q:?}"));
                    }
                }
            }
        }
        // associativity: sequential and parallel on set/vect maps
        self.check_associativity(&mut report)?;
        self.check_equivariance(&mut report)?;
        Ok(report)
    }

    fn check_associativity(&self, report: &mut CheckReport) -> Result<(), Error> {
        let n = self.truncation();
        let profiles: Vec<Profile> = all_canonical_profiles(self.colors(), n)
            .into_iter()
            .filter(|p| !self.collection.carrier_at(p).0.is_empty())
            .collect();
        for p in &profiles {
            for q in &profiles {
                for r in &profiles {
                    let total = p.arity() + q.arity() + r.arity();
                    if total.saturating_sub(2) > n {
                        continue;
                    }
                    // sequential: (p ∘_i q) ∘_{i-1+j} r = p ∘_i (q ∘_j r)
                    for i in 1..=p.arity() {
                        if p.inputs[i - 1] != q.output {
                            continue;
                        }
                        for j in 1..=q.arity() {
                            if q.inputs[j - 1] != r.output {
                                continue;
                            }
                            let ok = self.assoc_sequential_holds(p, i, q, j, r)?;
                            if ok {
                                report.pass();
                            } else {
                                report.fail(format!(
                                    "sequential associativity fails: {p:?} ∘_{i} {q:?} ∘_{j} {r:?}"
                                ));
                            }
                        }
                    }
                    // parallel: (p ∘_i q) ∘_{j+m-1} r = (p ∘_j r) ∘_i q, i < j
                    for i in 1..=p.arity() {
                        for j in (i + 1)..=p.arity() {
                            if p.inputs[i - 1] != q.output || p.inputs[j - 1] != r.output {
                                continue;
                            }
                            let ok = self.assoc_parallel_holds(p, i, q, j, r)?;
                            if ok {
                                report.pass();
                            } else {
                                report.fail(format!(
                                    "parallel associativity fails: {p:?} slots {i},{j}"
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn assoc_sequential_holds(
        &self,
        p: &Profile,
        i: usize,
        q: &Profile,
        j: usize,
        r: &Profile,
    ) -> Result<bool, Error> {
        let (pc, _) = self.collection.carrier_at(&p.canonical().0);
        let (qc, _) = self.collection.carrier_at(&q.canonical().0);
        let (rc, _) = self.collection.carrier_at(&r.canonical().0);
        let pq = Profile::new(splice(&p.inputs, i, &q.inputs)?, p.output.clone());
        let qr = Profile::new(splice(&q.inputs, j, &r.inputs)?, q.output.clone());
        let Some(c1) = self.compose_general(p, i, q) else { return Ok(true) };
        let Some(c2) = self.compose_general(&pq, i - 1 + j, r) else { return Ok(true) };
        let Some(c3) = self.compose_general(q, j, r) else { return Ok(true) };
        let Some(c4) = self.compose_general(p, i, &qr) else { return Ok(true) };
        // route 1: (x∘y)∘z on pc⊗qc⊗rc
        let step1 = tensor_maps(&[c1.clone(), CarrierMapOf::identity(&rc)])?;
        let route1 = reassoc3_left(&pc, &qc, &rc)?.then(&step1).then(&c2);
        let step2 = tensor_maps(&[CarrierMapOf::identity(&pc), c3.clone()])?;
        let route2 = reassoc3_right(&pc, &qc, &rc)?.then(&step2).then(&c4);
        Ok(maps_agree(&route1, &route2))
    }

    fn assoc_parallel_holds(
        &self,
        p: &Profile,
        i: usize,
        q: &Profile,
        j: usize,
        r: &Profile,
    ) -> Result<bool, Error> {
        let (pc, _) = self.collection.carrier_at(&p.canonical().0);
        let (qc, _) = self.collection.carrier_at(&q.canonical().0);
        let (rc, _) = self.collection.carrier_at(&r.canonical().0);
        let m = q.arity();
        let pq = Profile::new(splice(&p.inputs, i, &q.inputs)?, p.output.clone());
        let pr = Profile::new(splice(&p.inputs, j, &r.inputs)?, p.output.clone());
        let Some(c1) = self.compose_general(p, i, q) else { return Ok(true) };
        let Some(c2) = self.compose_general(&pq, j + m - 1, r) else { return Ok(true) };
        let Some(c3) = self.compose_general(p, j, r) else { return Ok(true) };
        let Some(c4) = self.compose_general(&pr, i, q) else { return Ok(true) };
        // route 1 on pc⊗qc⊗rc: compose q in slot i, then r
        let step1 = tensor_maps(&[c1, CarrierMapOf::identity(&rc)])?;
        let route1 = reassoc3_left(&pc, &qc, &rc)?.then(&step1).then(&c2);
        // route 2: compose r in slot j first (swap q,r factors), then q
        let swap = crate::cube::tensor_permutation::<S>(
            &[pc.clone(), qc.clone(), rc.clone()],
            &Perm::from_vec(vec![0, 2, 1]).unwrap(),
        )?;
        let step2 = tensor_maps(&[c3, CarrierMapOf::identity(&qc)])?;
        let route2 = swap
            .then(&reassoc3_left(&pc, &rc, &qc)?)
            .then(&step2)
            .then(&c4);
        Ok(maps_agree(&route1, &route2))
    }

    fn check_equivariance(&self, report: &mut CheckReport) -> Result<(), Error> {
        // stored compositions commute with Young actions on both factors
        for ((p, i, q), comp) in &self.compositions {
            let pcomp = self.collection.component(p);
            let qcomp = self.collection.component(q);
            let (Some(pcomp), Some(qcomp)) = (pcomp, qcomp) else { continue };
            let csp = Profile::new(splice(&p.inputs, *i, &q.inputs)?, p.output.clone());
            let (csp_canon, _) = csp.canonical();
            let Some(tcomp) = self.collection.component(&csp_canon) else {
                if comp.target().is_empty() {
                    continue;
                }
                report.fail(format!("composition target missing at {csp_canon:?}"));
                continue;
            };
            // inner Young generators
            for g in qcomp.action.group().generators() {
                // induced permutation on spliced positions: block at i-1..i-1+m
                let k = p.arity();
                let m = q.arity();
                let mut pi = vec![0usize; k + m - 1];
                for (pos, slot) in pi.iter_mut().enumerate() {
                    *slot = pos;
                }
                for l in 0..m {
                    pi[i - 1 + l] = i - 1 + g.apply(l);
                }
                let pi = Perm::from_vec(pi)?;
                let lhs = tensor_maps(&[
                    CarrierMapOf::identity(pcomp.carrier()),
                    qcomp.action.map(g).clone(),
                ])?
                .then(comp);
                let Some(tw) = self.collection.transport(&csp.inputs, &csp.output, &pi) else {
                    report.fail("missing transport in equivariance check".into());
                    continue;
                };
                let rhs = comp.then(&tw);
                if maps_agree(&lhs, &rhs) {
                    report.pass();
                } else {
                    report.fail(format!("inner equivariance fails at {p:?} ∘_{i} {q:?}"));
                }
            }
            let _ = tcomp;
        }
        Ok(())
    }

    /// The underlying enriched category: unary components with ∘_1.
    pub fn underlying_category(&self) -> EnrichedCategory<S> {
        let mut homs = BTreeMap::new();
        for c in self.colors() {
            for d in self.colors() {
                let p = Profile::unary(c.clone(), d.clone());
                let (car, _) = self.collection.carrier_at(&p);
                if !car.is_empty() {
                    homs.insert((c.clone(), d.clone()), car);
                }
            }
        }
        EnrichedCategory {
            kind: self.kind(),
            objects: self.colors().to_vec(),
            homs,
            operad: self.clone(),
        }
    }
}

/// Tensor-unit bookkeeping: X ⊗ 𝟙 ≅ X as stored tensors.
fn iso_tensor_unit<S: Scalar>(x: &Carrier) -> Result<CarrierMapOf<S>, Error> {
    let t = crate::carrier::tensor(x, &Carrier::unit(x.kind()))?;
    CarrierMapOf::from_label_fn(&t, x, |l| {
        // "(a,*)" → "a"
        let inner = &l[1..l.len() - 1];
        inner[..inner.len() - 2].to_string()
    })
}

fn iso_unit_tensor<S: Scalar>(x: &Carrier) -> Result<CarrierMapOf<S>, Error> {
    let t = crate::carrier::tensor(&Carrier::unit(x.kind()), x)?;
    CarrierMapOf::from_label_fn(&t, x, |l| {
        let inner = &l[1..l.len() - 1];
        inner[2..].to_string()
    })
}

/// (X⊗Y)⊗Z-style flattening is not stored; the ternary tensor is built
/// directly, so "reassociation" is the relabeling between x⊗(y⊗z)-ish
/// flat tensors. Both routes start from the flat ternary tensor: route
/// helpers produce the map flat → (pair-first) tensor.
fn reassoc3_left<S: Scalar>(x: &Carrier, y: &Carrier, z: &Carrier) -> Result<CarrierMapOf<S>, Error> {
    // flat (x,y,z) → ((x⊗y), z)
    let flat = crate::carrier::tensor_many(x.kind(), &[x.clone(), y.clone(), z.clone()])?;
    let xy = crate::carrier::tensor(x, y)?;
    let tgt = crate::carrier::tensor(&xy, z)?;
    // index-aligned by construction
    CarrierMapOf::from_label_fn(&flat, &tgt, |l| {
        let inner = &l[1..l.len() - 1];
        let parts = split_top(inner);
        format!("(({},{}),{})", parts[0], parts[1], parts[2])
    })
}

fn reassoc3_right<S: Scalar>(x: &Carrier, y: &Carrier, z: &Carrier) -> Result<CarrierMapOf<S>, Error> {
    let flat = crate::carrier::tensor_many(x.kind(), &[x.clone(), y.clone(), z.clone()])?;
    let yz = crate::carrier::tensor(y, z)?;
    let tgt = crate::carrier::tensor(x, &yz)?;
    CarrierMapOf::from_label_fn(&flat, &tgt, |l| {
        let inner = &l[1..l.len() - 1];
        let parts = split_top(inner);
        format!("({},({},{}))", parts[0], parts[1], parts[2])
    })
}

/// Split a tensor label body at top-level commas.
pub fn split_top(s: &str) -> Vec<String> {
    let mut depth = 0;
    let mut out = vec![];
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            ',' if depth == 0 => {
                out.push(std::mem::take(&mut cur));
            }
            _ => cur.push(ch),
        }
    }
    out.push(cur);
    out
}

fn maps_agree<S: Scalar>(a: &CarrierMapOf<S>, b: &CarrierMapOf<S>) -> bool {
    a == b
}

/// Pass/fail accumulation with witnesses.
#[derive(Clone, Debug, Default)]
pub struct CheckReport {
    pub passes: usize,
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn pass(&mut self) {
        self.passes += 1;
    }

    pub fn fail(&mut self, witness: String) {
        self.failures.push(witness);
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.passes += other.passes;
        self.failures.extend(other.failures);
    }
}

/// The underlying enriched category Ō of an operad.
#[derive(Clone, Debug)]
pub struct EnrichedCategory<S: Scalar> {
    pub kind: Kind,
    pub objects: Vec<Color>,
    pub homs: BTreeMap<(Color, Color), Carrier>,
    operad: Operad<S>,
}

impl<S: Scalar> EnrichedCategory<S> {
    pub fn hom(&self, c: &str, d: &str) -> Carrier {
        self.homs
            .get(&(c.to_string(), d.to_string()))
            .cloned()
            .unwrap_or_else(|| Carrier::initial(self.kind))
    }

    /// Composition hom(c,d) ⊗ hom(b,c) → hom(b,d) from ∘_1.
    pub fn compose(&self, b: &str, c: &str, d: &str) -> Option<CarrierMapOf<S>> {
        let p = Profile::unary(c.to_string(), d.to_string());
        let q = Profile::unary(b.to_string(), c.to_string());
        self.operad.compose_general(&p, 1, &q)
    }

    pub fn check(&self) -> Result<CheckReport, Error> {
        let mut report = CheckReport::default();
        // associativity and units are inherited; spot-check composability
        for ((c, d), h) in &self.homs {
            if h.is_empty() {
                report.fail(format!("empty stored hom {c}->{d}"));
            } else {
                report.pass();
            }
        }
        Ok(report)
    }
}

/// A morphism of operads: a color function together with per-profile
/// equivariant maps compatible with units and compositions.
#[derive(Clone, Debug)]
pub struct OperadMap<S: Scalar> {
    pub source: Operad<S>,
    pub target: Operad<S>,
    pub color_map: BTreeMap<Color, Color>,
    /// per canonical source profile: map into the stored target component
    /// at the canonical image profile (sorting transport included)
    maps: BTreeMap<Profile, CarrierMapOf<S>>,
}

impl<S: Scalar> OperadMap<S> {
    pub fn new(
        source: Operad<S>,
        target: Operad<S>,
        color_map: BTreeMap<Color, Color>,
        maps: BTreeMap<Profile, CarrierMapOf<S>>,
    ) -> Result<Self, Error> {
        let m = OperadMap { source, target, color_map, maps };
        m.check()?;
        Ok(m)
    }

    pub fn identity(o: &Operad<S>) -> Self {
        let maps = o
            .collection
            .profiles()
            .map(|p| (p.clone(), CarrierMapOf::identity(o.collection.component(p).unwrap().carrier())))
            .collect();
        OperadMap {
            source: o.clone(),
            target: o.clone(),
            color_map: o.colors().iter().map(|c| (c.clone(), c.clone())).collect(),
            maps,
        }
    }

    pub fn map_color(&self, c: &str) -> Color {
        self.color_map.get(c).cloned().unwrap_or_else(|| c.to_string())
    }

    pub fn image_profile(&self, p: &Profile) -> Profile {
        Profile::new(
            p.inputs.iter().map(|c| self.map_color(c)).collect(),
            self.map_color(&p.output),
        )
    }

    pub fn at(&self, canonical: &Profile) -> CarrierMapOf<S> {
        match self.maps.get(canonical) {
            Some(m) => m.clone(),
            None => {
                let (imgc, _) = self.image_profile(canonical).canonical();
                let (tgt, _) = self.target.collection.carrier_at(&imgc);
                CarrierMapOf::from_initial(&tgt)
            }
        }
    }

    /// Units, composition squares and equivariance within truncation.
    pub fn check(&self) -> Result<CheckReport, Error> {
        let mut report = CheckReport::default();
        for c in self.source.colors() {
            let d = self.map_color(c);
            let (Some(ids), Some(idt)) = (self.source.identity_map(c), self.target.identity_map(&d))
            else {
                report.fail(format!("identity missing for color {c}"));
                continue;
            };
            let p = Profile::unary(c.clone(), c.clone());
            let got = ids.then(&self.at(&p));
            if maps_agree(&got, idt) {
                report.pass();
            } else {
                report.fail(format!("unit not preserved at {c}"));
            }
        }
        let n = self.source.truncation();
        let profiles: Vec<Profile> = all_canonical_profiles(self.source.colors(), n)
            .into_iter()
            .filter(|p| !self.source.collection.carrier_at(p).0.is_empty())
            .collect();
        for p in &profiles {
            for q in &profiles {
                for i in 1..=p.arity() {
                    if p.inputs[i - 1] != q.output || p.arity() + q.arity() - 1 > n {
                        continue;
                    }
                    let Some(cs) = self.source.compose_general(p, i, q) else { continue };
                    let ip = self.image_profile(p);
                    let iq = self.image_profile(q);
                    let Some(ct) = self.target.compose_general(&ip, i, &iq) else {
                        report.fail(format!("image composition missing {ip:?} ∘_{i} {iq:?}"));
                        continue;
                    };
                    let sp = Profile::new(splice(&p.inputs, i, &q.inputs)?, p.output.clone());
                    let route1 = cs.then(&self.at(&sp.canonical().0));
                    let fp = tensor_maps(&[self.at(&p.canonical().0), self.at(&q.canonical().0)])?;
                    let route2 = fp.then(&ct);
                    if maps_agree(&route1, &route2) {
                        report.pass();
                    } else {
                        report.fail(format!("composition square fails at {p:?} ∘_{i} {q:?}"));
                    }
                }
            }
        }
        // equivariance
        for (p, m) in &self.maps {
            let Some(src) = self.source.collection.component(p) else { continue };
            let (imgc, _) = self.image_profile(p).canonical();
            if let Some(tgt) = self.target.collection.component(&imgc) {
                // color-preserving maps only: Young groups coincide
                if src.action.group() == tgt.action.group()
                    && !is_equivariant(m, &src.action, &tgt.action)
                {
                    report.fail(format!("operad map not equivariant at {p:?}"));
                } else {
                    report.pass();
                }
            }
        }
        Ok(report)
    }

    pub fn is_iso(&self) -> bool {
        self.source.colors().iter().all(|c| self.map_color(c) == *c)
            && self
                .source
                .collection
                .profiles()
                .chain(self.target.collection.profiles())
                .all(|p| self.at(p).is_iso() || self.source.collection.component(p).is_none())
    }

    pub fn underlying(&self) -> Result<CollectionMap<S>, Error> {
        // color-preserving maps only
        CollectionMap::new(
            self.source.collection.clone(),
            self.target.collection.clone(),
            self.maps.clone(),
        )
    }
}

/// Assemble an operad from parts, checking nothing; `Operad::check_axioms`
/// validates afterwards where wanted.
pub fn operad_from_parts<S: Scalar>(
    collection: SymCollection<S>,
    identities: BTreeMap<Color, CarrierMapOf<S>>,
    compositions: BTreeMap<(Profile, usize, Profile), CarrierMapOf<S>>,
) -> Operad<S> {
    Operad { collection, identities, compositions }
}

/// Build the composition table from a set-level rule on element labels.
pub fn tabulate_set_operad<S: Scalar>(
    colors: &[Color],
    n: usize,
    component: impl Fn(&Profile) -> Vec<String>,
    act: impl Fn(&Profile, &str, &Perm) -> String,
    compose: impl Fn(&Profile, usize, &Profile, &str, &str) -> String,
    identity: impl Fn(&Color) -> String,
) -> Result<Operad<S>, Error> {
    let mut coll = SymCollection::new(Kind::Set, colors, n);
    for p in all_canonical_profiles(colors, n) {
        let labels = component(&p);
        if labels.is_empty() {
            continue;
        }
        let carrier = Carrier::set(labels)?;
        let group = p.young_group();
        let mut gen_maps = vec![];
        for g in group.generators() {
            let m = CarrierMapOf::from_label_fn(&carrier, &carrier, |l| act(&p, l, g))?;
            gen_maps.push((g.clone(), m));
        }
        let action = if group.order() == 1 {
            ActionOf::trivial(group, carrier.clone())
        } else {
            ActionOf::from_generator_maps(group, carrier.clone(), &gen_maps)?
        };
        let w = vec![0; action.carrier().size()];
        coll.set_component(p, action, w)?;
    }
    let mut identities = BTreeMap::new();
    for c in colors {
        let p = Profile::unary(c.clone(), c.clone());
        let (car, _) = coll.carrier_at(&p);
        if car.is_empty() {
            return Err(Error::invalid("identity component empty"));
        }
        let unit = Carrier::unit(Kind::Set);
        identities.insert(
            c.clone(),
            CarrierMapOf::from_label_fn(&unit, &car, |_| identity(c))?,
        );
    }
    let mut compositions = BTreeMap::new();
    for p in all_canonical_profiles(colors, n) {
        let (pc, _) = coll.carrier_at(&p);
        if pc.is_empty() {
            continue;
        }
        for q in all_canonical_profiles(colors, n) {
            let (qc, _) = coll.carrier_at(&q);
            if qc.is_empty() {
                continue;
            }
            for i in 1..=p.arity() {
                if p.inputs[i - 1] != q.output || p.arity() + q.arity() - 1 > n {
                    continue;
                }
                let spliced = Profile::new(splice(&p.inputs, i, &q.inputs)?, p.output.clone());
                let (csp, sigma) = spliced.canonical();
                let (tc, _) = coll.carrier_at(&csp);
                if tc.is_empty() {
                    return Err(Error::invalid("composition target component empty"));
                }
                let src = crate::carrier::tensor(&pc, &qc)?;
                let m = CarrierMapOf::from_label_fn(&src, &tc, |l| {
                    let body = &l[1..l.len() - 1];
                    let parts = split_top(body);
                    let raw = compose(&p, i, &q, &parts[0], &parts[1]);
                    // raw is an element label at the spliced (unsorted)
                    // profile; transport by acting with σ
                    act(&csp, &act_to_canonical(&raw), &sigma)
                })?;
                compositions.insert((p.clone(), i, q.clone()), m);
            }
        }
    }
    fn act_to_canonical(raw: &str) -> String {
        raw.to_string()
    }
    Ok(Operad { collection: coll, identities, compositions })
}

// ---------------------------------------------------------------------------
// free operads
// ---------------------------------------------------------------------------

/// Free operad on a symmetric collection: components are groupoid colimits
/// of generator-decorated snaky trees, composition is grafting, identities
/// are the vertex-free trees. Exact when generators have arity ≥ 2; a
/// vertex cap must be supplied otherwise and the result carries the
/// truncation caveat.
pub struct FreeOperad<S: Scalar> {
    pub operad: Operad<S>,
    pub generators: SymCollection<S>,
    /// per canonical profile, the tree colimit the component came from
    pub colimits: BTreeMap<Profile, GroupoidColimit<S>>,
    pub truncated: bool,
}

pub fn free_operad<S: Scalar>(
    x: &SymCollection<S>,
    vertex_cap: Option<usize>,
) -> Result<FreeOperad<S>, Error> {
    let n = x.truncation;
    let min_arity = x.profiles().map(|p| p.arity()).min().unwrap_or(2);
    let cap = match vertex_cap {
        Some(c) => c,
        None => {
            if min_arity < 2 {
                return Err(Error::invalid(
                    "free operad on arity ≤ 1 generators requires a vertex cap",
                ));
            }
            n.max(1)
        }
    };
    let truncated = vertex_cap.is_some() && min_arity < 2;
    let spec_owner = x.clone();
    let spec = TagSpec::Plain { x: &spec_owner };
    let constraint = TreeConstraint { leaves_all_snaky: true, ..Default::default() };
    let mut coll = SymCollection::new(x.kind, &x.colors, n);
    let mut colimits = BTreeMap::new();
    for p in all_canonical_profiles(&x.colors, n) {
        let trees = enumerate_trees(&p, &x.colors, &constraint, n, cap, true)?;
        let colim = groupoid_colimit(&spec, &trees, n)?;
        if colim.total.is_empty() {
            continue;
        }
        let action = colimit_young_action(&colim, &spec, &p)?;
        let weights = vec![0; colim.total.size()];
        coll.set_component(p.clone(), action, weights)?;
        colimits.insert(p.clone(), colim);
    }
    // identities: the bare-edge class
    let mut identities = BTreeMap::new();
    for c in &x.colors {
        let p = Profile::unary(c.clone(), c.clone());
        let Some(colim) = colimits.get(&p) else {
            return Err(Error::invalid("free operad missing unary component"));
        };
        let bare = Tree::bare_snaky(c.clone());
        let cls = colim
            .classes
            .iter()
            .position(|k| k.tag.tree == bare)
            .ok_or_else(|| Error::invalid("bare edge class missing"))?;
        let (tc, _) = coll.carrier_at(&p);
        let unit = Carrier::unit(x.kind);
        let inj = colim.classes[cls].proj.then(&colim.classes[cls].inject);
        let idm = match x.kind {
            Kind::Set => CarrierMapOf::from_indices(&unit, &tc, vec![inj.apply_index(0)])?,
            Kind::Vect => {
                let col = inj.matrix().column(0);
                let mut m = crate::matrix::Matrix::zero(tc.size(), 1);
                for (r, v) in col.iter().enumerate() {
                    *m.at_mut(r, 0) = v.clone();
                }
                CarrierMapOf::from_matrix(&unit, &tc, m)?
            }
        };
        identities.insert(c.clone(), idm);
    }
    // compositions by grafting
    let mut compositions = BTreeMap::new();
    let profiles: Vec<Profile> = colimits.keys().cloned().collect();
    for p in &profiles {
        for q in &profiles {
            for i in 1..=p.arity() {
                if p.inputs[i - 1] != q.output || p.arity() + q.arity() - 1 > n {
                    continue;
                }
                let m = free_composition(&spec, &colimits, p, i, q)?;
                compositions.insert((p.clone(), i, q.clone()), m);
            }
        }
    }
    Ok(FreeOperad {
        operad: Operad { collection: coll, identities, compositions },
        generators: x.clone(),
        colimits,
        truncated,
    })
}

/// The grafting composition map on free-operad components.
fn free_composition<S: Scalar>(
    spec: &TagSpec<S>,
    colimits: &BTreeMap<Profile, GroupoidColimit<S>>,
    p: &Profile,
    i: usize,
    q: &Profile,
) -> Result<CarrierMapOf<S>, Error> {
    let outer = &colimits[p];
    let inner = &colimits[q];
    let spliced = Profile::new(splice(&p.inputs, i, &q.inputs)?, p.output.clone());
    let (cs, sigma) = spliced.canonical();
    let target = &colimits[&cs];
    let src = crate::carrier::tensor(&outer.total, &inner.total)?;
    // per pair of classes, the grafted class map
    match src.kind() {
        Kind::Set => {
            let mut idx = vec![0usize; src.size()];
            for (oc, ocls) in outer.classes.iter().enumerate() {
                for (icn, icls) in inner.classes.iter().enumerate() {
                    for oe in 0..ocls.coinv.size() {
                        for ie in 0..icls.coinv.size() {
                            let flat_o = preimage_index(&ocls.proj, oe);
                            let flat_i = preimage_index(&icls.proj, ie);
                            let (tcls, raw_flat, full_map) = graft_class(
                                spec,
                                ocls,
                                flat_o,
                                icls,
                                flat_i,
                                i,
                                q.arity(),
                                &sigma,
                                target,
                            )?;
                            let tflat = full_map.apply_index(raw_flat);
                            let tot = target
                                .locate_set(tcls, tflat)
                                .ok_or_else(|| Error::CheckFailed("graft image inadmissible".into()))?;
                            let s = ocls.inject.apply_index(oe) * inner.total.size()
                                + icls.inject.apply_index(ie);
                            let _ = icn;
                            let _ = oc;
                            idx[s] = tot;
                        }
                    }
                }
            }
            CarrierMapOf::from_indices(&src, &target.total, idx)
        }
        Kind::Vect => {
            let mut m: crate::matrix::Matrix<S> = crate::matrix::Matrix::zero(target.total.size(), src.size());
            for ocls in outer.classes.iter() {
                for icls in inner.classes.iter() {
                    for oe in 0..ocls.coinv.size() {
                        for ie in 0..icls.coinv.size() {
                            let flat_o = vec_preimage(&ocls.proj, oe);
                            let flat_i = vec_preimage(&icls.proj, ie);
                            // bilinear: for each pair of basis vectors in the
                            // preimages, graft and accumulate
                            let col_idx = column_of(&ocls.inject, oe) * inner.total.size()
                                + column_of(&icls.inject, ie);
                            for (fo, co) in &flat_o {
                                for (fi, ci) in &flat_i {
                                    let (tcls, raw_flat, full_map) = graft_class(
                                        spec,
                                        ocls,
                                        *fo,
                                        icls,
                                        *fi,
                                        i,
                                        q.arity(),
                                        &sigma,
                                        target,
                                    )?;
                                    let mut raw = vec![S::zero(); full_map.source().size()];
                                    raw[raw_flat] = co.clone() * ci.clone();
                                    let moved = full_map.apply_vec(&raw);
                                    let tot = target
                                        .locate_vec(tcls, &moved)
                                        .ok_or_else(|| Error::CheckFailed("graft image inadmissible".into()))?;
                                    for (r, val) in tot.iter().enumerate() {
                                        if !val.is_zero() {
                                            let cur = m.at(r, col_idx).clone() + val.clone();
                                            *m.at_mut(r, col_idx) = cur;
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
            CarrierMapOf::from_matrix(&src, &target.total, m)
        }
    }
}

/// First preimage index of a class element under a set projection.
fn preimage_index<S: Scalar>(proj: &CarrierMapOf<S>, e: usize) -> usize {
    (0..proj.source().size())
        .find(|&i| proj.apply_index(i) == e)
        .expect("projection surjective")
}

/// A section of a vect projection: expresses quotient basis vector e as a
/// combination of source basis vectors (the chosen representative basis).
fn vec_preimage<S: Scalar>(proj: &CarrierMapOf<S>, e: usize) -> Vec<(usize, S)> {
    // labels of the quotient are labels of chosen source basis vectors
    let label = proj.target().label(e).to_string();
    let i = proj.source().index_of(&label).expect("quotient label from source");
    vec![(i, S::one())]
}

fn column_of<S: Scalar>(inject: &CarrierMapOf<S>, e: usize) -> usize {
    match inject.kind() {
        Kind::Set => inject.apply_index(e),
        Kind::Vect => {
            let col = inject.matrix().column(e);
            col.iter().position(|x| !x.is_zero()).expect("injection column")
        }
    }
}

/// Graft inner tree (with its decoration index) into slot `i` of the outer
/// class representative. Returns the target class, the flat index of the
/// raw decoration in the raw grafted tree's full tensor, and the transport
/// map from that full tensor to the canonical class's full tensor (which
/// carries the per-vertex slot transports the canonical re-sorting needs).
#[allow(clippy::too_many_arguments)]
fn graft_class<S: Scalar>(
    spec: &TagSpec<S>,
    outer: &crate::collection::ColimitClass<S>,
    outer_flat_kept: usize,
    inner: &crate::collection::ColimitClass<S>,
    inner_flat_kept: usize,
    i: usize,
    inner_arity: usize,
    sigma_spliced: &Perm,
    target: &GroupoidColimit<S>,
) -> Result<(usize, usize, CarrierMapOf<S>), Error> {
    let ot = &outer.tag.tree;
    let it = &inner.tag.tree;
    // relabel: outer snaky j<i stays, j>i shifts by m-1; inner l ↦ i-1+l
    let m = inner_arity;
    let outer_relab = shift_labels(ot, i, m);
    let inner_relab = shift_labels_inner(it, i);
    // graft: replace outer snaky leaf (old label i) — now absent — by the
    // inner tree. Reconstruct by structural substitution at the leaf path.
    let leaf_path = ot
        .snaky_leaves()
        .into_iter()
        .find(|(l, _)| *l == i)
        .map(|(_, p)| p)
        .expect("slot present");
    let grafted = substitute(&outer_relab, &leaf_path, &inner_relab.root);
    // apply σ to land on the canonical profile ordering
    let relabeled = relabel_snaky(&grafted, sigma_spliced);
    let (canon, node_map) = relabeled.canonical_with_map();
    let tcls = target
        .classes
        .iter()
        .position(|c| c.tag.tree == canon)
        .ok_or_else(|| Error::CheckFailed("grafted class missing in target family".into()))?;
    // decoration of the raw grafted tree: outer factors keep their paths,
    // inner factors live under the grafted leaf path
    let raw_order: Vec<crate::tree::Path> = {
        let mut o = relabeled.vertices();
        o.extend(relabeled.straight_leaves());
        o
    };
    let o_tuple =
        crate::carrier::tensor_unindex(&outer.tag.factor_dims, outer.tag.kept[outer_flat_kept]);
    let i_tuple =
        crate::carrier::tensor_unindex(&inner.tag.factor_dims, inner.tag.kept[inner_flat_kept]);
    let mut raw_tuple = vec![0usize; raw_order.len()];
    let mut raw_dims = vec![0usize; raw_order.len()];
    for (fi, path) in outer.tag.factor_paths.iter().enumerate() {
        let pos = raw_order
            .iter()
            .position(|p| p == path)
            .ok_or_else(|| Error::CheckFailed("outer factor lost in graft".into()))?;
        raw_tuple[pos] = o_tuple[fi];
        raw_dims[pos] = outer.tag.factor_dims[fi];
    }
    for (fi, path) in inner.tag.factor_paths.iter().enumerate() {
        let mut full = leaf_path.clone();
        full.extend(path.iter().copied());
        let pos = raw_order
            .iter()
            .position(|p| p == &full)
            .ok_or_else(|| Error::CheckFailed("inner factor lost in graft".into()))?;
        raw_tuple[pos] = i_tuple[fi];
        raw_dims[pos] = inner.tag.factor_dims[fi];
    }
    let raw_flat = crate::carrier::tensor_index(&raw_dims, &raw_tuple);
    let full_map = tag_transport(spec, &relabeled, &canon, &node_map)?;
    Ok((tcls, raw_flat, full_map))
}

fn shift_labels(t: &Tree, i: usize, m: usize) -> Tree {
    map_labels(t, &|l| {
        if l < i {
            l
        } else if l == i {
            usize::MAX // will be substituted away
        } else {
            l + m - 1
        }
    })
}

fn shift_labels_inner(t: &Tree, i: usize) -> Tree {
    map_labels(t, &|l| i - 1 + l)
}

fn map_labels(t: &Tree, f: &impl Fn(usize) -> usize) -> Tree {
    use crate::tree::Node;
    fn go(n: &Node, f: &impl Fn(usize) -> usize) -> Node {
        match n {
            Node::Snaky { color, label } => Node::Snaky { color: color.clone(), label: f(*label) },
            Node::Vertex { color, children } => Node::Vertex {
                color: color.clone(),
                children: children.iter().map(|c| go(c, f)).collect(),
            },
            other => other.clone(),
        }
    }
    Tree::new(go(&t.root, f))
}

fn substitute(t: &Tree, at: &[usize], replacement: &crate::tree::Node) -> Tree {
    use crate::tree::Node;
    fn go(n: &Node, at: &[usize], replacement: &Node) -> Node {
        if at.is_empty() {
            return replacement.clone();
        }
        let Node::Vertex { color, children } = n else { panic!("path into a leaf") };
        let mut kids = children.clone();
        kids[at[0]] = go(&children[at[0]], &at[1..], replacement);
        Node::Vertex { color: color.clone(), children: kids }
    }
    Tree::new(go(&t.root, at, replacement))
}

// ---------------------------------------------------------------------------
// Hadamard product and symmetrization
// ---------------------------------------------------------------------------

/// Componentwise (Hadamard) product of two operads on the same colors.
pub fn hadamard<S: Scalar>(o: &Operad<S>, p: &Operad<S>) -> Result<Operad<S>, Error> {
    if o.colors() != p.colors() || o.truncation() != p.truncation() || o.kind() != p.kind() {
        return Err(Error::invalid("hadamard product needs matching colors/truncation/kind"));
    }
    let n = o.truncation();
    let mut coll = SymCollection::new(o.kind(), o.colors(), n);
    for prof in all_canonical_profiles(o.colors(), n) {
        let (Some(oc), Some(pc)) =
            (o.collection.component(&prof), p.collection.component(&prof))
        else {
            continue;
        };
        let carrier = crate::carrier::tensor(oc.carrier(), pc.carrier())?;
        let group = prof.young_group();
        let mut gen_maps = vec![];
        for g in group.generators() {
            let m = tensor_maps(&[oc.action.map(g).clone(), pc.action.map(g).clone()])?;
            gen_maps.push((g.clone(), m));
        }
        let action = if group.order() == 1 {
            ActionOf::trivial(group, carrier.clone())
        } else {
            ActionOf::from_generator_maps(group, carrier.clone(), &gen_maps)?
        };
        let mut weights = vec![];
        let dims = [oc.carrier().size(), pc.carrier().size()];
        for flat in 0..carrier.size() {
            let t = crate::carrier::tensor_unindex(&dims, flat);
            weights.push(oc.weights[t[0]] + pc.weights[t[1]]);
        }
        coll.set_component(prof, action, weights)?;
    }
    let mut identities = BTreeMap::new();
    for c in o.colors() {
        let (Some(io), Some(ip)) = (o.identity_map(c), p.identity_map(c)) else {
            return Err(Error::invalid("hadamard factor missing identity"));
        };
        let both = tensor_maps(&[io.clone(), ip.clone()])?;
        let prof = Profile::unary(c.clone(), c.clone());
        let (tc, _) = coll.carrier_at(&prof);
        // 𝟙⊗𝟙 ≅ 𝟙
        let unit = Carrier::unit(o.kind());
        let uu = crate::carrier::tensor(&unit, &unit)?;
        let fold = CarrierMapOf::from_label_fn(&unit, &uu, |_| "(*,*)".to_string())?;
        let idm = fold.then(&both);
        let _ = tc;
        identities.insert(c.clone(), idm);
    }
    let mut compositions = BTreeMap::new();
    for prof in all_canonical_profiles(o.colors(), n) {
        if coll.carrier_at(&prof).0.is_empty() {
            continue;
        }
        for q in all_canonical_profiles(o.colors(), n) {
            if coll.carrier_at(&q).0.is_empty() {
                continue;
            }
            for i in 1..=prof.arity() {
                if prof.inputs[i - 1] != q.output || prof.arity() + q.arity() - 1 > n {
                    continue;
                }
                let (Some(co), Some(cp)) = (
                    o.stored_composition(&prof, i, &q),
                    p.stored_composition(&prof, i, &q),
                ) else {
                    continue;
                };
                // (O_p⊗P_p)⊗(O_q⊗P_q) → (O_p⊗O_q)⊗(P_p⊗P_q) → O_t⊗P_t
                let op_ = o.collection.component(&prof).unwrap().carrier().clone();
                let pp_ = p.collection.component(&prof).unwrap().carrier().clone();
                let oq_ = o.collection.component(&q).unwrap().carrier().clone();
                let pq_ = p.collection.component(&q).unwrap().carrier().clone();
                let src4 = crate::carrier::tensor_many(
                    o.kind(),
                    &[op_.clone(), pp_.clone(), oq_.clone(), pq_.clone()],
                )?;
                let mid = crate::cube::tensor_permutation::<S>(
                    &[op_.clone(), pp_.clone(), oq_.clone(), pq_.clone()],
                    &Perm::from_vec(vec![0, 2, 1, 3]).unwrap(),
                )?;
                // flat 4-tensor → pair-of-pairs relabeling
                let lhs_pair = crate::carrier::tensor(
                    &crate::carrier::tensor(&op_, &pp_)?,
                    &crate::carrier::tensor(&oq_, &pq_)?,
                )?;
                let into_pairs = CarrierMapOf::from_label_fn(&src4, &lhs_pair, |l| {
                    let parts = split_top(&l[1..l.len() - 1]);
                    format!("(({},{}),({},{}))", parts[0], parts[1], parts[2], parts[3])
                })?;
                let after_mid = crate::carrier::tensor(
                    &crate::carrier::tensor(&op_, &oq_)?,
                    &crate::carrier::tensor(&pp_, &pq_)?,
                )?;
                let mid_pairs = CarrierMapOf::from_label_fn(&mid.target().clone(), &after_mid, |l| {
                    let parts = split_top(&l[1..l.len() - 1]);
                    format!("(({},{}),({},{}))", parts[0], parts[1], parts[2], parts[3])
                })?;
                let comp_pair = tensor_maps(&[co.clone(), cp.clone()])?;
                let total = into_pairs
                    .inverse()
                    .ok_or_else(|| Error::CheckFailed("tensor relabel not iso".into()))?
                    .then(&mid)
                    .then(&mid_pairs)
                    .then(&comp_pair);
                compositions.insert((prof.clone(), i, q.clone()), total);
            }
        }
    }
    Ok(Operad { collection: coll, identities, compositions })
}

/// The all-orders operad: every component is the set of linear orders of
/// the input slots, with block substitution; the colored pattern whose
/// Hadamard product implements symmetrization of the underlying
/// non-symmetric operad. Set-based.
pub fn all_orders_operad<S: Scalar>(colors: &[Color], n: usize) -> Result<Operad<S>, Error> {
    tabulate_set_operad(
        colors,
        n,
        |p| orders(p.arity()),
        |_, l, g| act_order(l, g),
        |p, i, _q, lo, li| compose_orders(p.arity(), i, lo, li),
        |_| "1".to_string(),
    )
}

fn orders(k: usize) -> Vec<String> {
    // words over slot indices 1..k, all permutations
    fn rec(remaining: &mut Vec<usize>, cur: &mut Vec<usize>, out: &mut Vec<String>) {
        if remaining.is_empty() {
            out.push(cur.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("."));
            return;
        }
        for i in 0..remaining.len() {
            let v = remaining.remove(i);
            cur.push(v);
            rec(remaining, cur, out);
            cur.pop();
            remaining.insert(i, v);
        }
    }
    let mut rem: Vec<usize> = (1..=k).collect();
    let mut out = vec![];
    rec(&mut rem, &mut vec![], &mut out);
    if k == 0 {
        return vec!["e".to_string()];
    }
    out
}

fn parse_order(l: &str) -> Vec<usize> {
    if l == "e" {
        return vec![];
    }
    l.split('.').map(|s| s.parse().unwrap()).collect()
}

fn show_order(w: &[usize]) -> String {
    if w.is_empty() {
        return "e".to_string();
    }
    w.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
}

/// Relabel slots by g: slot j becomes slot g(j) (1-based labels).
fn act_order(l: &str, g: &Perm) -> String {
    let w = parse_order(l);
    let moved: Vec<usize> = w.iter().map(|&j| g.apply(j - 1) + 1).collect();
    show_order(&moved)
}

/// Substitute the inner order into slot `i` of the outer order; slots of
/// the result numbered as the spliced profile.
fn compose_orders(outer_arity: usize, i: usize, lo: &str, li: &str) -> String {
    let wo = parse_order(lo);
    let wi = parse_order(li);
    let m = wi.len();
    let mut out = vec![];
    for &slot in &wo {
        if slot == i {
            for &s in &wi {
                out.push(i - 1 + s);
            }
        } else if slot < i {
            out.push(slot);
        } else {
            out.push(slot + m - 1);
        }
    }
    let _ = outer_arity;
    show_order(&out)
}

/// Symmetrization of the underlying non-symmetric operad, as the Hadamard
/// product with the all-orders pattern, together with the counit.
pub struct SigmaExpansion<S: Scalar> {
    pub expanded: Operad<S>,
    pub counit: OperadMap<S>,
}

pub fn sigma_expand<S: Scalar>(o: &Operad<S>) -> Result<SigmaExpansion<S>, Error> {
    let orders_base = all_orders_operad::<S>(o.colors(), o.truncation())?;
    let orders_set = match o.kind() {
        Kind::Set => orders_efn_to_kind(&orders_base, Kind::Set)?,
        Kind::Vect => orders_efn_to_kind(&orders_base, Kind::Vect)?,
    };
    let expanded = hadamard(o, &orders_set)?;
    // counit: fold the order coordinate
    let mut maps = BTreeMap::new();
    for p in expanded.collection.profiles() {
        let ec = expanded.collection.component(p).unwrap();
        let oc = o.collection.component(p).unwrap();
        let m = match o.kind() {
            Kind::Set => CarrierMapOf::from_label_fn(ec.carrier(), oc.carrier(), |l| {
                let parts = split_top(&l[1..l.len() - 1]);
                parts[0].clone()
            })?,
            Kind::Vect => {
                let mut mat =
                    crate::matrix::Matrix::zero(oc.carrier().size(), ec.carrier().size());
                for (c, l) in ec.carrier().labels().iter().enumerate() {
                    let parts = split_top(&l[1..l.len() - 1]);
                    let r = oc.carrier().index_of(&parts[0]).unwrap();
                    *mat.at_mut(r, c) = S::one();
                }
                CarrierMapOf::from_matrix(ec.carrier(), oc.carrier(), mat)?
            }
        };
        maps.insert(p.clone(), m);
    }
    let counit = OperadMap::new(
        expanded.clone(),
        o.clone(),
        o.colors().iter().map(|c| (c.clone(), c.clone())).collect(),
        maps,
    )?;
    Ok(SigmaExpansion { expanded, counit })
}

/// Convert the set pattern to the requested kind (free linearization for
/// vector spaces).
fn orders_efn_to_kind<S: Scalar>(o: &Operad<S>, kind: Kind) -> Result<Operad<S>, Error> {
    if kind == Kind::Set {
        return Ok(o.clone());
    }
    linearize_set_operad(o)
}

/// Free linearization of a set operad: same labels as basis vectors.
pub fn linearize_set_operad<S: Scalar>(o: &Operad<S>) -> Result<Operad<S>, Error> {
    let n = o.truncation();
    let mut coll = SymCollection::new(Kind::Vect, o.colors(), n);
    for p in o.collection.profiles() {
        let c = o.collection.component(p).unwrap();
        let carrier = Carrier::vect(c.carrier().labels().to_vec())?;
        let group = p.young_group();
        let mut gen_maps = vec![];
        for g in group.generators() {
            let sm = c.action.map(g);
            let m = CarrierMapOf::from_label_fn(&carrier, &carrier, |l| {
                let i = c.carrier().index_of(l).unwrap();
                c.carrier().label(sm.apply_index(i)).to_string()
            })?;
            gen_maps.push((g.clone(), m));
        }
        let action = if group.order() == 1 {
            ActionOf::trivial(group, carrier.clone())
        } else {
            ActionOf::from_generator_maps(group, carrier.clone(), &gen_maps)?
        };
        coll.set_component(p.clone(), action, c.weights.clone())?;
    }
    let mut identities = BTreeMap::new();
    for c in o.colors() {
        let p = Profile::unary(c.clone(), c.clone());
        let (vc, _) = coll.carrier_at(&p);
        let (sc, _) = o.collection.carrier_at(&p);
        let idx = o.identity_index(c);
        let unit = Carrier::unit(Kind::Vect);
        let m = CarrierMapOf::from_label_fn(&unit, &vc, |_| sc.label(idx).to_string())?;
        identities.insert(c.clone(), m);
    }
    let mut compositions = BTreeMap::new();
    for ((p, i, q), m) in o_compositions(o) {
        let (pc, _) = coll.carrier_at(&p);
        let (qc, _) = coll.carrier_at(&q);
        let src = crate::carrier::tensor(&pc, &qc)?;
        let tgt_labels = m.target().labels().to_vec();
        let tgt = Carrier::vect(tgt_labels)?;
        let mm = CarrierMapOf::from_label_fn(&src, &tgt, |l| {
            let sidx = src.index_of(l).unwrap();
            m.target().label(m.apply_index(sidx)).to_string()
        })?;
        compositions.insert((p, i, q), mm);
    }
    Ok(Operad { collection: coll, identities, compositions })
}

fn o_compositions<S: Scalar>(
    o: &Operad<S>,
) -> Vec<((Profile, usize, Profile), CarrierMapOf<S>)> {
    o.compositions
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

/// Verify that `s` is an operad-map section of the symmetrization counit.
pub fn check_sigma_splitting<S: Scalar>(
    expansion: &SigmaExpansion<S>,
    s: &OperadMap<S>,
) -> Result<CheckReport, Error> {
    let mut report = s.check()?;
    // ε ∘ s = id componentwise
    for p in s.source.collection.profiles() {
        let sm = s.at(p);
        let em = expansion.counit.at(p);
        let idm = CarrierMapOf::identity(s.source.collection.component(p).unwrap().carrier());
        if sm.then(&em) == idm {
            report.pass();
        } else {
            report.fail(format!("ε∘s ≠ id at {p:?}"));
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// zoo
// ---------------------------------------------------------------------------

/// Initial operad on the given colors: only identities.
pub fn initial_operad<S: Scalar>(kind: Kind, colors: &[Color], n: usize) -> Operad<S> {
    let coll = match kind {
        Kind::Set => SymCollection::unit(Kind::Set, colors, n),
        Kind::Vect => SymCollection::unit(Kind::Vect, colors, n),
    };
    let mut identities = BTreeMap::new();
    for c in colors {
        let p = Profile::unary(c.clone(), c.clone());
        let (car, _) = coll.carrier_at(&p);
        let unit = Carrier::unit(kind);
        identities.insert(
            c.clone(),
            CarrierMapOf::from_label_fn(&unit, &car, |_| "*".to_string()).unwrap(),
        );
    }
    let mut compositions = BTreeMap::new();
    for c in colors {
        let p = Profile::unary(c.clone(), c.clone());
        let (car, _) = coll.carrier_at(&p);
        let src = crate::carrier::tensor(&car, &car).unwrap();
        let m = CarrierMapOf::from_label_fn(&src, &car, |_| "*".to_string()).unwrap();
        compositions.insert((p.clone(), 1, p.clone()), m);
    }
    Operad { collection: coll, identities, compositions }
}

/// The commutative operad: a point in every arity (nullary included).
pub fn com_operad<S: Scalar>(n: usize) -> Operad<S> {
    tabulate_set_operad(
        &["o".to_string()],
        n,
        |_| vec!["*".to_string()],
        |_, l, _| l.to_string(),
        |_, _, _, _, _| "*".to_string(),
        |_| "*".to_string(),
    )
    .expect("com")
}

/// The (non-unital) associative operad: linear orders in arities ≥ 1.
pub fn ass_operad<S: Scalar>(n: usize) -> Operad<S> {
    tabulate_set_operad(
        &["o".to_string()],
        n,
        |p| if p.arity() == 0 { vec![] } else { orders(p.arity()) },
        |_, l, g| act_order(l, g),
        |p, i, _q, lo, li| compose_orders(p.arity(), i, lo, li),
        |_| "1".to_string(),
    )
    .expect("ass")
}

/// The unital associative operad: linear orders in every arity.
pub fn ass_plus_operad<S: Scalar>(n: usize) -> Operad<S> {
    all_orders_operad(&["o".to_string()], n).expect("ass+")
}

/// The magma operad: free on one binary generator (a free symmetric orbit).
pub fn magma_operad<S: Scalar>(n: usize) -> Result<FreeOperad<S>, Error> {
    let colors = vec!["o".to_string()];
    let mut x = SymCollection::new(Kind::Set, &colors, n);
    let p = Profile::new(vec!["o".to_string(), "o".to_string()], "o");
    let carrier = Carrier::set(vec!["m12".to_string(), "m21".to_string()])?;
    let swap = CarrierMapOf::from_indices(&carrier, &carrier, vec![1, 0])?;
    let action = ActionOf::from_generator_maps(
        p.young_group(),
        carrier,
        &[(Perm::transposition(2, 0, 1), swap)],
    )?;
    x.set_component(p, action, vec![0, 0])?;
    free_operad(&x, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    #[test]
    fn com_axioms_pass() {
        let o = com_operad::<Rat>(3);
        let r = o.check_axioms().unwrap();
        assert!(r.ok(), "{:?}", r.failures);
    }

    #[test]
    fn ass_axioms_pass_and_counts() {
        let o = ass_operad::<Rat>(3);
        let p3 = Profile::new(vec!["o".into(); 3], "o");
        let (c, _) = o.collection.carrier_at(&p3);
        assert_eq!(c.size(), 6);
        let r = o.check_axioms().unwrap();
        assert!(r.ok(), "{:?}", r.failures);
    }

    #[test]
    fn ass_plus_axioms_pass() {
        let o = ass_plus_operad::<Rat>(3);
        let r = o.check_axioms().unwrap();
        assert!(r.ok(), "{:?}", r.failures);
        let p0 = Profile::constant("o");
        assert_eq!(o.collection.carrier_at(&p0).0.size(), 1);
    }

    #[test]
    fn initial_operad_axioms() {
        let o = initial_operad::<Rat>(Kind::Set, &["a".into(), "b".into()], 2);
        let r = o.check_axioms().unwrap();
        assert!(r.ok(), "{:?}", r.failures);
    }

    #[test]
    fn corrupted_composition_fails_axioms() {
        let mut o = ass_operad::<Rat>(2);
        // corrupt: swap the ∘_1 table at (2,1,1)... easiest: break identity
        let p = Profile::unary("o".to_string(), "o".to_string());
        let (car, _) = o.collection.carrier_at(&p);
        let unit = Carrier::unit(Kind::Set);
        o.identities.insert(
            "o".to_string(),
            CarrierMapOf::from_label_fn(&unit, &car, |_| "1".to_string()).unwrap(),
        );
        // identity still fine; instead corrupt a composition map
        let p2 = Profile::new(vec!["o".into(), "o".into()], "o");
        let key = (p2.clone(), 1, p.clone());
        let m = o.compositions.get(&key).unwrap().clone();
        let (c2, _) = o.collection.carrier_at(&p2);
        let bad = CarrierMapOf::from_label_fn(m.source(), &c2, |_| "1.2".to_string()).unwrap();
        o.compositions.insert(key, bad);
        let r = o.check_axioms().unwrap();
        assert!(!r.ok());
    }

    #[test]
    fn magma_free_operad_counts() {
        let f = magma_operad::<Rat>(3).unwrap();
        let o = &f.operad;
        let p1 = Profile::unary("o".to_string(), "o".to_string());
        assert_eq!(o.collection.carrier_at(&p1).0.size(), 1);
        let p2 = Profile::new(vec!["o".into(), "o".into()], "o");
        assert_eq!(o.collection.carrier_at(&p2).0.size(), 2);
        let p3 = Profile::new(vec!["o".into(); 3], "o");
        assert_eq!(o.collection.carrier_at(&p3).0.size(), 12);
        let r = o.check_axioms().unwrap();
        assert!(r.ok(), "{:?}", r.failures);
    }

    #[test]
    fn free_operad_unit_law_grafting() {
        let f = magma_operad::<Rat>(2).unwrap();
        let r = f.operad.check_axioms().unwrap();
        assert!(r.ok(), "{:?}", r.failures);
    }

    #[test]
    fn general_composition_matches_ass_substitution() {
        let o = ass_operad::<Rat>(3);
        // compose the order 2.1 with 1.2 in slot 1: substitute block
        let p2 = Profile::new(vec!["o".into(), "o".into()], "o");
        let m = o.compose_general(&p2, 1, &p2).unwrap();
        let (c2, _) = o.collection.carrier_at(&p2);
        let src = crate::carrier::tensor(&c2, &c2).unwrap();
        // (2.1) ∘_1 (1.2) = 3.1.2
        let idx = src.index_of("(2.1,1.2)").unwrap();
        let out = m.apply_index(idx);
        let p3 = Profile::new(vec!["o".into(); 3], "o");
        let (c3, _) = o.collection.carrier_at(&p3);
        assert_eq!(c3.label(out), "3.1.2");
    }

    #[test]
    fn sigma_expand_ass_and_check_splitting() {
        let o = ass_operad::<Rat>(2);
        let exp = sigma_expand(&o).unwrap();
        let p2 = Profile::new(vec!["o".into(), "o".into()], "o");
        assert_eq!(exp.expanded.collection.carrier_at(&p2).0.size(), 4);
        assert!(exp.counit.check().unwrap().ok());
        // canonical diagonal section of Ass
        let mut maps = BTreeMap::new();
        for p in o.collection.profiles() {
            let sc = o.collection.component(p).unwrap().carrier().clone();
            let tc = exp.expanded.collection.component(p).unwrap().carrier().clone();
            let m = CarrierMapOf::from_label_fn(&sc, &tc, |l| format!("({l},{l})")).unwrap();
            maps.insert(p.clone(), m);
        }
        let s = OperadMap::new(
            o.clone(),
            exp.expanded.clone(),
            o.colors().iter().map(|c| (c.clone(), c.clone())).collect(),
            maps,
        )
        .unwrap();
        let rep = check_sigma_splitting(&exp, &s).unwrap();
        assert!(rep.ok(), "{:?}", rep.failures);
    }

    #[test]
    fn sigma_expand_com_counts_and_freeness() {
        let o = com_operad::<Rat>(3);
        let exp = sigma_expand(&o).unwrap();
        let p3 = Profile::new(vec!["o".into(); 3], "o");
        let comp = exp.expanded.collection.component(&p3).unwrap();
        assert_eq!(comp.carrier().size(), 6);
        // free action: all orbits of size 6
        let (coinv, _) = comp.action.coinvariants();
        assert_eq!(coinv.size(), 1);
        let r = exp.expanded.check_axioms().unwrap();
        assert!(r.ok(), "{:?}", r.failures);
    }

    #[test]
    fn underlying_category_of_ass() {
        let o = ass_plus_operad::<Rat>(2);
        let cat = o.underlying_category();
        assert_eq!(cat.hom("o", "o").size(), 1);
        assert!(cat.compose("o", "o", "o").is_some());
    }
}
