//! Colored symmetric collections, transports along profile permutations,
//! the tree-tagging functors, and groupoid colimits (coproducts of
//! automorphism coinvariants) — the computational form of every
//! tree-indexed colimit in this crate.

use std::collections::BTreeMap;

use crate::action::ActionOf;
use crate::carrier::{coproduct, tensor_many, tensor_maps, Carrier, CarrierMapOf, Kind};
use crate::cube::tensor_permutation;
use crate::error::Error;
use crate::family::ColoredFamily;
use crate::matrix::Matrix;
use crate::perm::{FiniteGroup, Perm};
use crate::profile::{Color, Profile};
use crate::scalar::Scalar;
use crate::tree::{Node, Path, Tree};

/// One stored component: the carrier at a canonical profile with the action
/// of its Young group and per-element truncation weights (how many arity
/// slots an element hides; plain operad elements hide none).
#[derive(Clone, Debug)]
pub struct Component<S: Scalar> {
    pub profile: Profile,
    pub action: ActionOf<S>,
    pub weights: Vec<usize>,
}

impl<S: Scalar> Component<S> {
    pub fn carrier(&self) -> &Carrier {
        self.action.carrier()
    }
}

/// A colored symmetric collection truncated at arity `truncation`:
/// components stored on sorted profiles only, values elsewhere obtained by
/// transport.
#[derive(Clone, Debug)]
pub struct SymCollection<S: Scalar> {
    pub kind: Kind,
    pub colors: Vec<Color>,
    pub truncation: usize,
    components: BTreeMap<Profile, Component<S>>,
}

impl<S: Scalar> SymCollection<S> {
    pub fn new(kind: Kind, colors: &[Color], truncation: usize) -> Self {
        SymCollection { kind, colors: colors.to_vec(), truncation, components: BTreeMap::new() }
    }

    /// The underlying collection of the initial operad: the monoidal unit
    /// at every profile `[(c); c]`, nothing elsewhere.
    pub fn unit(kind: Kind, colors: &[Color], truncation: usize) -> Self {
        let mut x = SymCollection::new(kind, colors, truncation);
        for c in colors {
            let p = Profile::unary(c.clone(), c.clone());
            let carrier = Carrier::unit(kind);
            x.set_component(
                p.clone(),
                ActionOf::trivial(p.young_group(), carrier),
                vec![0],
            )
            .unwrap();
        }
        x
    }

    pub fn set_component(
        &mut self,
        profile: Profile,
        action: ActionOf<S>,
        weights: Vec<usize>,
    ) -> Result<(), Error> {
        if !profile.is_canonical() {
            return Err(Error::invalid("components are stored on canonical profiles"));
        }
        if profile.arity() > self.truncation {
            return Err(Error::invalid("component above truncation"));
        }
        if action.carrier().kind() != self.kind {
            return Err(Error::KindMismatch("component kind".into()));
        }
        if action.group() != &profile.young_group() {
            return Err(Error::invalid("component action group must be the Young group"));
        }
        if weights.len() != action.carrier().size() {
            return Err(Error::ShapeMismatch("weights length".into()));
        }
        if action.carrier().is_empty() {
            self.components.remove(&profile);
        } else {
            self.components.insert(profile.clone(), Component { profile, action, weights });
        }
        Ok(())
    }

    pub fn component(&self, canonical: &Profile) -> Option<&Component<S>> {
        self.components.get(canonical)
    }

    pub fn profiles(&self) -> impl Iterator<Item = &Profile> {
        self.components.keys()
    }

    /// The carrier at a canonical profile (empty when unset or above
    /// truncation; the latter also reports the truncation flag).
    pub fn carrier_at(&self, canonical: &Profile) -> (Carrier, bool) {
        if canonical.arity() > self.truncation {
            return (Carrier::initial(self.kind), true);
        }
        match self.components.get(canonical) {
            Some(c) => (c.carrier().clone(), false),
            None => (Carrier::initial(self.kind), false),
        }
    }

    pub fn weights_at(&self, canonical: &Profile) -> Vec<usize> {
        self.components.get(canonical).map(|c| c.weights.clone()).unwrap_or_default()
    }

    /// Evaluate at an arbitrary profile: the stored canonical component and
    /// the sorting permutation σ with `sorted[σ(i)] = p.inputs[i]`.
    pub fn eval(&self, p: &Profile) -> (Option<&Component<S>>, Perm, bool) {
        let (canonical, sigma) = p.canonical();
        let truncated = p.arity() > self.truncation;
        (self.components.get(&canonical), sigma, truncated)
    }

    /// Transport along a slot relabeling: `slots`/`out` describe a profile
    /// p, `pi` a color-preserving permutation p → p^π, and the result is the
    /// induced automorphism of the stored component at sorted(p).
    pub fn transport(&self, slots: &[Color], out: &Color, pi: &Perm) -> Option<CarrierMapOf<S>> {
        let p = Profile::new(slots.to_vec(), out.clone());
        let q = p.permuted(pi);
        let (sp, sigma_p) = p.canonical();
        let (sq, sigma_q) = q.canonical();
        if sp != sq {
            return None; // not color-preserving
        }
        let comp = self.components.get(&sp)?;
        // stored-level permutation: σ_q ∘ π ∘ σ_p⁻¹
        let g = sigma_q.compose(pi).compose(&sigma_p.inverse());
        Some(comp.action.map(&g).clone())
    }

    /// Structural and action-law validation.
    pub fn check(&self) -> Result<(), Error> {
        for (p, comp) in &self.components {
            if p != &comp.profile {
                return Err(Error::CheckFailed("component profile key mismatch".into()));
            }
            comp.action.check()?;
        }
        Ok(())
    }

    pub fn total_size(&self) -> usize {
        self.components.values().map(|c| c.carrier().size()).sum()
    }
}

/// Every canonical profile over the colors with arity ≤ n.
pub fn all_canonical_profiles(colors: &[Color], n: usize) -> Vec<Profile> {
    let mut inputs_by_arity: Vec<Vec<Vec<Color>>> = vec![vec![vec![]]];
    for k in 1..=n {
        let mut level = vec![];
        for prev in &inputs_by_arity[k - 1] {
            for c in colors {
                // keep sorted: only append colors >= last
                if prev.last().map_or(true, |l| l <= c) {
                    let mut next = prev.clone();
                    next.push(c.clone());
                    level.push(next);
                }
            }
        }
        inputs_by_arity.push(level);
    }
    let mut out = vec![];
    for level in inputs_by_arity {
        for inputs in level {
            for d in colors {
                out.push(Profile::new(inputs.clone(), d.clone()));
            }
        }
    }
    out
}

/// Componentwise equivariant isomorphism test for two collections on the
/// same colors and truncation.
pub fn collections_isomorphic<S: Scalar>(x: &SymCollection<S>, y: &SymCollection<S>) -> bool {
    if x.kind != y.kind || x.truncation != y.truncation {
        return false;
    }
    let mut profiles: Vec<&Profile> = x.profiles().chain(y.profiles()).collect();
    profiles.sort();
    profiles.dedup();
    for p in profiles {
        match (x.component(p), y.component(p)) {
            (None, None) => {}
            (Some(a), Some(b)) => {
                if !crate::action::equivariant_iso(&a.action, &b.action) {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

/// A map of collections: one equivariant carrier map per canonical profile.
#[derive(Clone, Debug)]
pub struct CollectionMap<S: Scalar> {
    pub source: SymCollection<S>,
    pub target: SymCollection<S>,
    maps: BTreeMap<Profile, CarrierMapOf<S>>,
}

impl<S: Scalar> CollectionMap<S> {
    pub fn new(
        source: SymCollection<S>,
        target: SymCollection<S>,
        maps: BTreeMap<Profile, CarrierMapOf<S>>,
    ) -> Result<Self, Error> {
        let cm = CollectionMap { source, target, maps };
        cm.check()?;
        Ok(cm)
    }

    pub fn identity(x: &SymCollection<S>) -> Self {
        let maps = x
            .profiles()
            .map(|p| (p.clone(), CarrierMapOf::identity(x.component(p).unwrap().carrier())))
            .collect();
        CollectionMap { source: x.clone(), target: x.clone(), maps }
    }

    pub fn at(&self, canonical: &Profile) -> CarrierMapOf<S> {
        match self.maps.get(canonical) {
            Some(m) => m.clone(),
            None => {
                let (tgt, _) = self.target.carrier_at(canonical);
                CarrierMapOf::from_initial(&tgt)
            }
        }
    }

    pub fn check(&self) -> Result<(), Error> {
        for (p, m) in &self.maps {
            let Some(src) = self.source.component(p) else {
                if m.source().is_empty() {
                    continue;
                }
                return Err(Error::ShapeMismatch("map out of absent component".into()));
            };
            let (tgt, _) = self.target.carrier_at(p);
            if m.source() != src.carrier() || m.target() != &tgt {
                return Err(Error::ShapeMismatch(format!("collection map at {p:?}")));
            }
            if let Some(tc) = self.target.component(p) {
                if !crate::action::is_equivariant(m, &src.action, &tc.action) {
                    return Err(Error::CheckFailed(format!("collection map not equivariant at {p:?}")));
                }
            } else if !tgt.is_empty() {
                return Err(Error::ShapeMismatch("target component missing".into()));
            }
        }
        // absent maps require empty sources
        for p in self.source.profiles() {
            if !self.maps.contains_key(p) && !self.source.component(p).unwrap().carrier().is_empty() {
                return Err(Error::ShapeMismatch(format!("map missing at {p:?}")));
            }
        }
        Ok(())
    }

    pub fn is_iso(&self) -> bool {
        self.source.profiles().all(|p| self.at(p).is_iso())
            && self.target.profiles().all(|p| self.source.component(p).is_some())
    }
}

/// Which collections decorate a tree's vertices and straight leaves.
#[derive(Clone, Copy)]
pub enum TagSpec<'a, S: Scalar> {
    /// `(X)`: every vertex by X, straight leaves forbidden.
    Plain { x: &'a SymCollection<S> },
    /// `(X; C)`: vertices by X, straight leaves by the arity-0 family C.
    Corked { x: &'a SymCollection<S>, c: &'a ColoredFamily },
    /// `(E; O; C)`: even vertices by E, odd by O, straight leaves by C.
    Leveled { even: &'a SymCollection<S>, odd: &'a SymCollection<S>, c: &'a ColoredFamily },
}

impl<'a, S: Scalar> TagSpec<'a, S> {
    fn kind(&self) -> Kind {
        match self {
            TagSpec::Plain { x } | TagSpec::Corked { x, .. } => x.kind,
            TagSpec::Leveled { even, .. } => even.kind,
        }
    }

    fn truncation(&self) -> usize {
        match self {
            TagSpec::Plain { x } | TagSpec::Corked { x, .. } => x.truncation,
            TagSpec::Leveled { even, .. } => even.truncation,
        }
    }

    fn vertex_collection(&self, level: usize) -> &'a SymCollection<S> {
        match self {
            TagSpec::Plain { x } | TagSpec::Corked { x, .. } => x,
            TagSpec::Leveled { even, odd, .. } => {
                if level % 2 == 0 {
                    even
                } else {
                    odd
                }
            }
        }
    }

    fn cork(&self) -> Option<&'a ColoredFamily> {
        match self {
            TagSpec::Plain { .. } => None,
            TagSpec::Corked { c, .. } | TagSpec::Leveled { c, .. } => Some(c),
        }
    }
}

/// The evaluated tagging functor on one tree: the ordered tensor of the
/// vertex components and straight-leaf cork carriers, restricted to the
/// elements within the truncation budget, with the fixed-snaky
/// automorphism action on the tensor factors.
#[derive(Clone, Debug)]
pub struct TagValue<S: Scalar> {
    pub tree: Tree,
    /// full (unfiltered) tensor carrier
    pub full: Carrier,
    /// indices of admissible elements inside `full`
    pub kept: Vec<usize>,
    /// the admissible sub-carrier
    pub carrier: Carrier,
    pub action: ActionOf<S>,
    pub factor_paths: Vec<Path>,
    pub factor_dims: Vec<usize>,
    /// per element of `carrier`: hidden weight (sum of slot weights)
    pub weights: Vec<usize>,
}

fn vertex_slots(tree: &Tree, v: &Path) -> (Vec<Color>, Color) {
    let Some(Node::Vertex { color, children }) = tree.node_at(v) else {
        panic!("vertex_slots at non-vertex")
    };
    (children.iter().map(|c| c.color().clone()).collect(), color.clone())
}

/// Factor order of a tag value: vertices in pre-order, then straight leaves
/// in pre-order.
fn factor_order(tree: &Tree) -> Vec<Path> {
    let mut order = tree.vertices();
    order.extend(tree.straight_leaves());
    order
}

pub fn tag_value<S: Scalar>(spec: &TagSpec<S>, tree: &Tree, budget: usize) -> Result<TagValue<S>, Error> {
    let kind = spec.kind();
    let paths = factor_order(tree);
    let mut factors: Vec<Carrier> = vec![];
    let mut factor_weights: Vec<Vec<usize>> = vec![];
    for p in &paths {
        match tree.node_at(p).unwrap() {
            Node::Vertex { .. } => {
                let (slots, out) = vertex_slots(tree, p);
                let coll = spec.vertex_collection(tree.level_of(p));
                let prof = Profile::new(slots, out);
                let (comp, _, truncated) = coll.eval(&prof);
                if truncated || comp.is_none() {
                    factors.push(Carrier::initial(kind));
                    factor_weights.push(vec![]);
                } else {
                    let comp = comp.unwrap();
                    factors.push(comp.carrier().clone());
                    factor_weights.push(comp.weights.clone());
                }
            }
            Node::Straight { color } => {
                let Some(c) = spec.cork() else {
                    return Err(Error::invalid("straight leaf under a cork-free tagging"));
                };
                factors.push(c.carrier(color));
                factor_weights.push(c.weights(color));
            }
            Node::Snaky { .. } => unreachable!(),
        }
    }
    let full = tensor_many(kind, &factors)?;
    let dims: Vec<usize> = factors.iter().map(|c| c.size()).collect();
    let k = tree.snaky_leaves().len();
    let mut kept = vec![];
    let mut weights = vec![];
    for flat in 0..full.size() {
        let tuple = crate::carrier::tensor_unindex(&dims, flat);
        let w: usize = tuple.iter().zip(&factor_weights).map(|(&i, ws)| ws[i]).sum();
        if k + w <= budget {
            kept.push(flat);
            weights.push(w);
        }
    }
    let carrier = sub_carrier(&full, &kept)?;
    // automorphism action
    let canonical = tree.canonical();
    if &canonical != tree {
        return Err(Error::invalid("tag_value requires a canonical tree"));
    }
    let aut = tree.automorphisms(true);
    if carrier.is_empty() {
        return Ok(TagValue {
            tree: tree.clone(),
            full,
            kept,
            carrier: carrier.clone(),
            action: ActionOf::trivial(aut, carrier),
            factor_paths: paths,
            factor_dims: dims,
            weights,
        });
    }
    let nodes = tree.all_nodes();
    let mut gen_maps = vec![];
    for g in aut.generators() {
        let node_map: BTreeMap<Path, Path> = nodes
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), nodes[g.apply(i)].clone()))
            .collect();
        let full_map = tag_transport(spec, tree, tree, &node_map)?;
        let restricted = restrict_map(&full_map, &kept, &carrier, &kept, &carrier)?;
        gen_maps.push((g.clone(), restricted));
    }
    let action = if aut.order() == 1 {
        ActionOf::trivial(aut, carrier.clone())
    } else {
        ActionOf::from_generator_maps(aut, carrier.clone(), &gen_maps)?
    };
    Ok(TagValue {
        tree: tree.clone(),
        full,
        kept,
        carrier,
        action,
        factor_paths: paths,
        factor_dims: dims,
        weights,
    })
}

/// The sub-carrier spanned by the given element/basis indices.
pub fn sub_carrier(full: &Carrier, kept: &[usize]) -> Result<Carrier, Error> {
    Carrier::new(full.kind(), kept.iter().map(|&i| full.label(i).to_string()).collect())
}

/// Restrict a map between full carriers to admissible sub-carriers; errors
/// if the image leaves the admissible part.
pub fn restrict_map<S: Scalar>(
    full_map: &CarrierMapOf<S>,
    kept_src: &[usize],
    src: &Carrier,
    kept_tgt: &[usize],
    tgt: &Carrier,
) -> Result<CarrierMapOf<S>, Error> {
    match src.kind() {
        Kind::Set => {
            let mut idx = vec![];
            for &i in kept_src {
                let j = full_map.apply_index(i);
                let Some(pos) = kept_tgt.iter().position(|&t| t == j) else {
                    return Err(Error::CheckFailed("weight filtration not preserved by map".into()));
                };
                idx.push(pos);
            }
            CarrierMapOf::from_indices(src, tgt, idx)
        }
        Kind::Vect => {
            let m = full_map.matrix();
            let mut out = Matrix::zero(tgt.size(), src.size());
            for (c, &i) in kept_src.iter().enumerate() {
                let col = m.column(i);
                for (r, v) in col.iter().enumerate() {
                    if v.is_zero() {
                        continue;
                    }
                    let Some(pos) = kept_tgt.iter().position(|&t| t == r) else {
                        return Err(Error::CheckFailed("weight filtration not preserved by map".into()));
                    };
                    *out.at_mut(pos, c) = v.clone();
                }
            }
            CarrierMapOf::from_matrix(src, tgt, out)
        }
    }
}

/// The induced map of full tensor values along an isomorphism of decorated
/// trees given by a node correspondence (colors and kinds preserved; snaky
/// labels may move). Composite of per-vertex slot transports with the
/// global tensor-factor permutation.
pub fn tag_transport<S: Scalar>(
    spec: &TagSpec<S>,
    src_tree: &Tree,
    dst_tree: &Tree,
    node_map: &BTreeMap<Path, Path>,
) -> Result<CarrierMapOf<S>, Error> {
    let src_order = factor_order(src_tree);
    let dst_order = factor_order(dst_tree);
    // per-factor transports
    let mut pieces: Vec<CarrierMapOf<S>> = vec![];
    for p in &src_order {
        match src_tree.node_at(p).unwrap() {
            Node::Vertex { children, .. } => {
                let (slots, out) = vertex_slots(src_tree, p);
                let coll = spec.vertex_collection(src_tree.level_of(p));
                // slot permutation: child i of p maps to child pi(i) of node_map[p]
                let q = &node_map[p];
                let mut pi = vec![0usize; children.len()];
                for i in 0..children.len() {
                    let mut cp = p.clone();
                    cp.push(i);
                    let img = &node_map[&cp];
                    pi[i] = *img.last().expect("child image is a child");
                }
                let pi = Perm::from_vec(pi)?;
                let m = coll
                    .transport(&slots, &out, &pi)
                    .ok_or_else(|| Error::invalid("transport along non-color-preserving map"))?;
                let _ = q;
                pieces.push(m);
            }
            Node::Straight { color } => {
                let c = spec.cork().ok_or_else(|| Error::invalid("cork-free straight leaf"))?;
                pieces.push(CarrierMapOf::identity(&c.carrier(color)));
            }
            Node::Snaky { .. } => unreachable!(),
        }
    }
    let transported = tensor_maps(&pieces)?;
    // factor permutation: src factor i sits at dst position of its image
    let mut perm = vec![0usize; src_order.len()];
    for (i, p) in src_order.iter().enumerate() {
        let img = &node_map[p];
        let j = dst_order
            .iter()
            .position(|q| q == img)
            .ok_or_else(|| Error::invalid("node image missing in destination order"))?;
        perm[i] = j;
    }
    let perm = Perm::from_vec(perm)?;
    let factor_carriers: Vec<Carrier> =
        pieces.iter().map(|m| m.target().clone()).collect();
    let reorder = tensor_permutation::<S>(&factor_carriers, &perm)?;
    Ok(transported.then(&reorder))
}

/// One class of a groupoid colimit: the tag value, its coinvariants, and
/// the structure maps into the total.
#[derive(Clone, Debug)]
pub struct ColimitClass<S: Scalar> {
    pub tag: TagValue<S>,
    pub coinv: Carrier,
    pub proj: CarrierMapOf<S>,
    pub inject: CarrierMapOf<S>,
}

/// ⨿ over tree classes of Aut-coinvariants of the tag values.
#[derive(Clone, Debug)]
pub struct GroupoidColimit<S: Scalar> {
    pub classes: Vec<ColimitClass<S>>,
    pub total: Carrier,
    /// per element of `total`: the (orbit-constant) hidden weight
    pub weights: Vec<usize>,
}

pub fn groupoid_colimit<S: Scalar>(
    spec: &TagSpec<S>,
    trees: &[Tree],
    budget: usize,
) -> Result<GroupoidColimit<S>, Error> {
    let mut tags = vec![];
    for t in trees {
        let tag = tag_value(spec, t, budget)?;
        if !tag.carrier.is_empty() {
            tags.push(tag);
        }
    }
    let mut coinvs = vec![];
    let mut projs = vec![];
    for tag in &tags {
        let (c, p) = tag.action.coinvariants();
        coinvs.push(c);
        projs.push(p);
    }
    let (total, injections) = coproduct::<S>(&coinvs)?;
    let mut weights = vec![0usize; total.size()];
    let mut classes = vec![];
    for ((tag, coinv), (proj, inject)) in
        tags.into_iter().zip(coinvs).zip(projs.into_iter().zip(injections))
    {
        // weight of each total element: minimum over its class preimage
        match total.kind() {
            Kind::Set => {
                let mut per_class: Vec<Option<usize>> = vec![None; coinv.size()];
                for (i, w) in tag.weights.iter().enumerate() {
                    let c = proj.apply_index(i);
                    per_class[c] = Some(per_class[c].map_or(*w, |x: usize| x.min(*w)));
                }
                for (c, w) in per_class.iter().enumerate() {
                    weights[inject.apply_index(c)] = w.expect("projection surjective");
                }
            }
            Kind::Vect => {
                // quotient basis vectors inherit the weight of the original
                // basis vector with the same label
                for (ci, l) in coinv.labels().iter().enumerate() {
                    let orig = tag
                        .carrier
                        .index_of(l)
                        .expect("quotient basis labels come from the carrier");
                    let col = inject.matrix().column(ci);
                    let pos = col.iter().position(|x| !x.is_zero()).unwrap();
                    weights[pos] = tag.weights[orig];
                }
            }
        }
        classes.push(ColimitClass { tag, coinv, proj, inject });
    }
    Ok(GroupoidColimit { classes, total, weights })
}

impl<S: Scalar> GroupoidColimit<S> {
    /// Assemble a map out of the colimit from Aut-invariant per-class maps
    /// on the tag carriers.
    pub fn induce(&self, legs: &[CarrierMapOf<S>], target: &Carrier) -> Option<CarrierMapOf<S>> {
        assert_eq!(legs.len(), self.classes.len());
        let mut part_maps = vec![];
        for (cls, leg) in self.classes.iter().zip(legs) {
            assert_eq!(leg.source(), &cls.tag.carrier);
            let descended = crate::carrier::factor_through_epi(&cls.proj, leg)?;
            part_maps.push(descended);
        }
        copair(&self.total, &self.classes.iter().map(|c| c.inject.clone()).collect::<Vec<_>>(), &part_maps, target)
    }

    /// Index in `total` of a full-tensor element of class `cls`.
    pub fn locate_set(&self, cls: usize, full_index: usize) -> Option<usize> {
        let c = &self.classes[cls];
        let pos = c.tag.kept.iter().position(|&k| k == full_index)?;
        Some(c.inject.apply_index(c.proj.apply_index(pos)))
    }

    /// Vector in `total` of a full-tensor vector of class `cls` (vect kind).
    pub fn locate_vec(&self, cls: usize, full_vec: &[S]) -> Option<Vec<S>> {
        let c = &self.classes[cls];
        let mut restricted = vec![S::zero(); c.tag.carrier.size()];
        for (i, v) in full_vec.iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let pos = c.tag.kept.iter().position(|&k| k == i)?;
            restricted[pos] = v.clone();
        }
        Some(c.inject.apply_vec(&c.proj.apply_vec(&restricted)))
    }
}

/// Build a map out of a coproduct from per-part maps.
pub fn copair<S: Scalar>(
    total: &Carrier,
    injections: &[CarrierMapOf<S>],
    parts: &[CarrierMapOf<S>],
    target: &Carrier,
) -> Option<CarrierMapOf<S>> {
    match total.kind() {
        Kind::Set => {
            let mut idx = vec![0usize; total.size()];
            for (inj, part) in injections.iter().zip(parts) {
                if part.target() != target {
                    return None;
                }
                for i in 0..inj.source().size() {
                    idx[inj.apply_index(i)] = part.apply_index(i);
                }
            }
            CarrierMapOf::from_indices(total, target, idx).ok()
        }
        Kind::Vect => {
            let mut m = Matrix::zero(target.size(), total.size());
            for (inj, part) in injections.iter().zip(parts) {
                if part.target() != target {
                    return None;
                }
                for c in 0..inj.source().size() {
                    let col = inj.matrix().column(c);
                    let pos = col.iter().position(|x| !x.is_zero())?;
                    for r in 0..target.size() {
                        *m.at_mut(r, pos) = part.matrix().at(r, c).clone();
                    }
                }
            }
            CarrierMapOf::from_matrix(total, target, m).ok()
        }
    }
}

/// The action of the boundary profile's Young group on a groupoid colimit,
/// induced by relabeling snaky leaves and transporting decorations.
pub fn colimit_young_action<S: Scalar>(
    colim: &GroupoidColimit<S>,
    spec: &TagSpec<S>,
    boundary: &Profile,
) -> Result<ActionOf<S>, Error> {
    let group = boundary.young_group();
    if group.order() == 1 || colim.total.is_empty() {
        return Ok(ActionOf::trivial(group, colim.total.clone()));
    }
    let mut gen_maps = vec![];
    for g in group.generators() {
        let mut legs = vec![];
        for cls in &colim.classes {
            let relabeled = relabel_snaky(&cls.tag.tree, g);
            let (canon, node_map) = relabeled.canonical_with_map();
            let target_cls = colim
                .classes
                .iter()
                .position(|c| c.tag.tree == canon)
                .ok_or_else(|| Error::CheckFailed("family not closed under relabeling".into()))?;
            // relabeling does not change the underlying structure maps
            let full_map = tag_transport(spec, &cls.tag.tree, &canon, &node_map)?;
            let tgt = &colim.classes[target_cls];
            let restricted =
                restrict_map(&full_map, &cls.tag.kept, &cls.tag.carrier, &tgt.tag.kept, &tgt.tag.carrier)?;
            legs.push(restricted.then(&tgt.proj).then(&tgt.inject));
        }
        let m = colim
            .induce(&legs, &colim.total)
            .ok_or_else(|| Error::CheckFailed("young action does not descend".into()))?;
        gen_maps.push((g.clone(), m));
    }
    ActionOf::from_generator_maps(group, colim.total.clone(), &gen_maps)
}

/// Replace snaky label `l` by `g(l)` throughout (1-based labels).
pub fn relabel_snaky(tree: &Tree, g: &Perm) -> Tree {
    fn go(n: &Node, g: &Perm) -> Node {
        match n {
            Node::Snaky { color, label } => {
                Node::Snaky { color: color.clone(), label: g.apply(*label - 1) + 1 }
            }
            Node::Vertex { color, children } => Node::Vertex {
                color: color.clone(),
                children: children.iter().map(|c| go(c, g)).collect(),
            },
            other => other.clone(),
        }
    }
    Tree::new(go(&tree.root, g))
}

/// The circle product of symmetric collections: per profile, the groupoid
/// colimit of the two-level tagging over trees whose leaves are all snaky
/// and sit above the odd level.
pub fn circle_product<S: Scalar>(
    x: &SymCollection<S>,
    y: &SymCollection<S>,
) -> Result<SymCollection<S>, Error> {
    if x.kind != y.kind || x.colors != y.colors || x.truncation != y.truncation {
        return Err(Error::invalid("circle product needs matching colors/kind/truncation"));
    }
    let n = x.truncation;
    let empty_cork = ColoredFamily::empty(x.kind, &x.colors);
    let mut out = SymCollection::new(x.kind, &x.colors, n);
    for profile in all_canonical_profiles(&x.colors, n) {
        let trees = two_level_trees(&profile, &x.colors, n);
        let spec = TagSpec::Leveled { even: x, odd: y, c: &empty_cork };
        let colim = groupoid_colimit(&spec, &trees, n)?;
        if colim.total.is_empty() {
            continue;
        }
        let action = colimit_young_action(&colim, &spec, &profile)?;
        let weights = colim.weights.clone();
        out.set_component(profile, action, weights)?;
    }
    Ok(out)
}

/// Canonical trees of height ≤ 1 whose root children are all inner edges
/// and whose leaves are all snaky (sitting at level 2), with the given
/// boundary; vertex arities ≤ n.
pub fn two_level_trees(boundary: &Profile, colors: &[Color], n: usize) -> Vec<Tree> {
    let k = boundary.arity();
    let mut out = vec![];
    // distribute the k labels into r groups, each with an output color
    // group assignment: label i -> (group, ...), groups unordered: generate
    // ordered then canonicalize+dedup (desk scale)
    let mut seen = std::collections::BTreeSet::new();
    let max_groups = n;
    for r in 0..=max_groups {
        // all functions {1..k} -> {0..r-1} when r>0; k must be 0 when r=0
        if r == 0 && k > 0 {
            continue;
        }
        let assignments = all_functions(k, r.max(1), r == 0);
        for f in assignments {
            // color choice per group
            let color_choices = all_words(colors, r);
            for word in color_choices {
                let mut groups: Vec<Vec<usize>> = vec![vec![]; r];
                for (label0, &g) in f.iter().enumerate() {
                    groups[g].push(label0 + 1);
                }
                if groups.iter().any(|g| g.len() > n) {
                    continue;
                }
                let children: Vec<Node> = groups
                    .iter()
                    .zip(&word)
                    .map(|(labels, color)| Node::Vertex {
                        color: color.clone(),
                        children: labels
                            .iter()
                            .map(|&l| Node::Snaky {
                                color: boundary.inputs[l - 1].clone(),
                                label: l,
                            })
                            .collect(),
                    })
                    .collect();
                let t = Tree::new(Node::Vertex { color: boundary.output.clone(), children })
                    .canonical();
                if seen.insert(t.clone()) {
                    out.push(t);
                }
            }
        }
    }
    out.sort_by(|a, b| a.node_count().cmp(&b.node_count()).then(a.cmp(b)));
    out
}

fn all_functions(k: usize, r: usize, empty: bool) -> Vec<Vec<usize>> {
    if empty {
        return vec![vec![]];
    }
    let mut out = vec![vec![]];
    for _ in 0..k {
        let mut next = vec![];
        for f in &out {
            for v in 0..r {
                let mut f2 = f.clone();
                f2.push(v);
                next.push(f2);
            }
        }
        out = next;
    }
    out
}

fn all_words(colors: &[Color], len: usize) -> Vec<Vec<Color>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        let mut next = vec![];
        for w in &out {
            for c in colors {
                let mut w2 = w.clone();
                w2.push(c.clone());
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    fn c(s: &str) -> Color {
        s.to_string()
    }

    fn point_collection(n: usize) -> SymCollection<Rat> {
        // one color, a single point in every arity ≤ n (the Com pattern)
        let colors = vec![c("o")];
        let mut x = SymCollection::new(Kind::Set, &colors, n);
        for p in all_canonical_profiles(&colors, n) {
            let carrier = Carrier::set(vec!["*".into()]).unwrap();
            x.set_component(p.clone(), ActionOf::trivial(p.young_group(), carrier), vec![0])
                .unwrap();
        }
        x
    }

    #[test]
    fn eval_transport_of_swap() {
        // X[2] = {a, b} with the swap action
        let colors = vec![c("o")];
        let mut x = SymCollection::<Rat>::new(Kind::Set, &colors, 2);
        let p = Profile::new(vec![c("o"), c("o")], "o");
        let carrier = Carrier::set(vec!["a".into(), "b".into()]).unwrap();
        let swap = CarrierMapOf::from_indices(&carrier, &carrier, vec![1, 0]).unwrap();
        let action = ActionOf::from_generator_maps(
            p.young_group(),
            carrier,
            &[(Perm::transposition(2, 0, 1), swap.clone())],
        )
        .unwrap();
        x.set_component(p.clone(), action, vec![0, 0]).unwrap();
        let t = x.transport(&p.inputs, &p.output, &Perm::transposition(2, 0, 1)).unwrap();
        assert_eq!(t, swap);
        let id = x.transport(&p.inputs, &p.output, &Perm::identity(2)).unwrap();
        assert!(id.is_iso() && id.apply_index(0) == 0);
    }

    #[test]
    fn unit_is_two_sided_circle_unit() {
        let x = point_collection(2);
        let j = SymCollection::unit(Kind::Set, &[c("o")], 2);
        let xj = circle_product(&x, &j).unwrap();
        let jx = circle_product(&j, &x).unwrap();
        assert!(collections_isomorphic(&xj, &x));
        assert!(collections_isomorphic(&jx, &x));
    }

    #[test]
    fn circle_point_squared_counts() {
        // (X∘X)[2-ary] for the one-point collection at N=2:
        // classes: unary root over v(1,2); binary root over v(1),v(2);
        // binary root over v(1,2) and a 0-ary vertex.
        let x = point_collection(2);
        let xx = circle_product(&x, &x).unwrap();
        let p = Profile::new(vec![c("o"), c("o")], "o");
        let (carrier, _) = xx.carrier_at(&p);
        assert_eq!(carrier.size(), 3);
        // arity-0: root corolla alone; root with one 0-ary vertex (1 inner);
        // root with two 0-ary vertices, ...: bounded by root arity ≤ 2
        let p0 = Profile::constant("o");
        let (c0, _) = xx.carrier_at(&p0);
        assert_eq!(c0.size(), 3);
    }

    #[test]
    fn schur_formula_unit_collection() {
        // J ∘ J = J
        let j = SymCollection::<Rat>::unit(Kind::Set, &[c("o")], 3);
        let jj = circle_product(&j, &j).unwrap();
        assert!(collections_isomorphic(&jj, &j));
    }

    #[test]
    fn tag_value_on_corolla_with_cork() {
        // corolla [o,o;o] with one straight leaf over the point collection:
        // X[3] ⊗ A(o), A = 2 points of weight 1: admissible at budget 3
        let x = point_collection(3);
        let a = ColoredFamily::empty(Kind::Set, &[c("o")])
            .with_carrier("o", Carrier::set(vec!["p".into(), "q".into()]).unwrap());
        let boundary = Profile::new(vec![c("o"), c("o")], "o");
        let t = Tree::corolla(&boundary, &[c("o")]);
        let spec = TagSpec::Corked { x: &x, c: &a };
        let tag = tag_value(&spec, &t, 3).unwrap();
        assert_eq!(tag.carrier.size(), 2);
        assert_eq!(tag.weights, vec![1, 1]);
        // at budget 2 nothing is admissible
        let tag2 = tag_value(&spec, &t, 2).unwrap();
        assert_eq!(tag2.carrier.size(), 0);
    }

    #[test]
    fn groupoid_colimit_coinvariants() {
        // corolla [;o] with two straight leaves decorated by a 2-point
        // family: Σ2 coinvariants of a 2x2 square = 3 classes
        let x = point_collection(3);
        let a = ColoredFamily::empty(Kind::Set, &[c("o")])
            .with_carrier("o", Carrier::set(vec!["p".into(), "q".into()]).unwrap());
        let t = Tree::corolla(&Profile::constant("o"), &[c("o"), c("o")]);
        let spec = TagSpec::Corked { x: &x, c: &a };
        let colim = groupoid_colimit(&spec, &[t], 3).unwrap();
        assert_eq!(colim.total.size(), 3);
        assert_eq!(colim.weights, vec![2, 2, 2]);
    }

    #[test]
    fn young_action_on_colimit_is_valid() {
        let x = point_collection(3);
        let p = Profile::new(vec![c("o"), c("o")], "o");
        let trees = two_level_trees(&p, &[c("o")], 3);
        let empty = ColoredFamily::empty(Kind::Set, &[c("o")]);
        let spec = TagSpec::Leveled { even: &x, odd: &x, c: &empty };
        let colim = groupoid_colimit(&spec, &trees, 3).unwrap();
        let action = colimit_young_action(&colim, &spec, &p).unwrap();
        action.check().unwrap();
    }
}
