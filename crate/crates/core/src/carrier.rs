//! The two exact ground categories: finite labeled sets and
//! finite-dimensional vector spaces with chosen basis, together with the
//! finite colimits every tree-indexed construction reduces to.
//!
//! Carriers hold no scalars; maps do. `CarrierMapOf<S>` is generic over the
//! field scalar, with the concrete alias fixed at the crate root.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::matrix::{column_span_basis, Matrix};
use crate::scalar::Scalar;

pub type Label = String;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Kind {
    #[serde(rename = "set")]
    Set,
    #[serde(rename = "qvec")]
    Vect,
}

/// An object of one of the ground categories: a finite set of distinct
/// labels, or a vector space with the given basis labels.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Carrier {
    kind: Kind,
    labels: Vec<Label>,
}

impl Carrier {
    pub fn set(labels: Vec<Label>) -> Result<Self, Error> {
        let c = Carrier { kind: Kind::Set, labels };
        c.check_distinct()?;
        Ok(c)
    }

    pub fn vect(labels: Vec<Label>) -> Result<Self, Error> {
        let c = Carrier { kind: Kind::Vect, labels };
        c.check_distinct()?;
        Ok(c)
    }

    pub fn new(kind: Kind, labels: Vec<Label>) -> Result<Self, Error> {
        match kind {
            Kind::Set => Carrier::set(labels),
            Kind::Vect => Carrier::vect(labels),
        }
    }

    fn check_distinct(&self) -> Result<(), Error> {
        let mut sorted = self.labels.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.labels.len() {
            return Err(Error::invalid("carrier labels must be pairwise distinct"));
        }
        Ok(())
    }

    pub fn initial(kind: Kind) -> Self {
        Carrier { kind, labels: vec![] }
    }

    /// Monoidal unit: singleton set / one-dimensional space.
    pub fn unit(kind: Kind) -> Self {
        Carrier { kind, labels: vec!["*".to_string()] }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    /// Cardinality for sets, dimension for vector spaces.
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum MapData<S: Scalar> {
    Set(Vec<usize>),
    Vect(Matrix<S>),
}

/// A morphism of carriers of equal kind: a total function on labels, or a
/// matrix of shape `dim(target) x dim(source)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CarrierMapOf<S: Scalar> {
    source: Carrier,
    target: Carrier,
    data: MapData<S>,
}

impl<S: Scalar> CarrierMapOf<S> {
    pub fn identity(c: &Carrier) -> Self {
        match c.kind() {
            Kind::Set => CarrierMapOf {
                source: c.clone(),
                target: c.clone(),
                data: MapData::Set((0..c.size()).collect()),
            },
            Kind::Vect => CarrierMapOf {
                source: c.clone(),
                target: c.clone(),
                data: MapData::Vect(Matrix::identity(c.size())),
            },
        }
    }

    pub fn from_indices(source: &Carrier, target: &Carrier, map: Vec<usize>) -> Result<Self, Error> {
        if source.kind() != Kind::Set || target.kind() != Kind::Set {
            return Err(Error::KindMismatch("index map on non-set carriers".into()));
        }
        if map.len() != source.size() || map.iter().any(|&i| i >= target.size()) {
            return Err(Error::ShapeMismatch("index map out of range".into()));
        }
        Ok(CarrierMapOf { source: source.clone(), target: target.clone(), data: MapData::Set(map) })
    }

    pub fn from_matrix(source: &Carrier, target: &Carrier, m: Matrix<S>) -> Result<Self, Error> {
        if source.kind() != Kind::Vect || target.kind() != Kind::Vect {
            return Err(Error::KindMismatch("matrix map on non-vect carriers".into()));
        }
        if m.rows != target.size() || m.cols != source.size() {
            return Err(Error::ShapeMismatch(format!(
                "matrix {}x{} for map {} -> {}",
                m.rows,
                m.cols,
                source.size(),
                target.size()
            )));
        }
        Ok(CarrierMapOf { source: source.clone(), target: target.clone(), data: MapData::Vect(m) })
    }

    /// Build a map by sending each source label to a target label (sets),
    /// or each basis label to a basis label (vector spaces, permutation-like).
    pub fn from_label_fn(
        source: &Carrier,
        target: &Carrier,
        f: impl Fn(&str) -> Label,
    ) -> Result<Self, Error> {
        let mut idx = Vec::with_capacity(source.size());
        for l in source.labels() {
            let t = f(l);
            let Some(i) = target.index_of(&t) else {
                return Err(Error::invalid(format!("label {t} not in target")));
            };
            idx.push(i);
        }
        match source.kind() {
            Kind::Set => CarrierMapOf::from_indices(source, target, idx),
            Kind::Vect => {
                let mut m = Matrix::zero(target.size(), source.size());
                for (c, &r) in idx.iter().enumerate() {
                    *m.at_mut(r, c) = S::one();
                }
                CarrierMapOf::from_matrix(source, target, m)
            }
        }
    }

    /// The unique map out of the initial carrier.
    pub fn from_initial(target: &Carrier) -> Self {
        let src = Carrier::initial(target.kind());
        match target.kind() {
            Kind::Set => CarrierMapOf { source: src, target: target.clone(), data: MapData::Set(vec![]) },
            Kind::Vect => CarrierMapOf {
                source: src,
                target: target.clone(),
                data: MapData::Vect(Matrix::zero(target.size(), 0)),
            },
        }
    }

    pub fn source(&self) -> &Carrier {
        &self.source
    }

    pub fn target(&self) -> &Carrier {
        &self.target
    }

    pub fn kind(&self) -> Kind {
        self.source.kind()
    }

    pub fn indices(&self) -> &[usize] {
        match &self.data {
            MapData::Set(v) => v,
            MapData::Vect(_) => panic!("indices() on a vector-space map"),
        }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        match &self.data {
            MapData::Vect(m) => m,
            MapData::Set(_) => panic!("matrix() on a set map"),
        }
    }

    pub fn apply_index(&self, i: usize) -> usize {
        self.indices()[i]
    }

    pub fn apply_vec(&self, v: &[S]) -> Vec<S> {
        self.matrix().apply(v)
    }

    /// `f.then(&g)` is the composite `g ∘ f` (f first).
    pub fn then(&self, g: &CarrierMapOf<S>) -> CarrierMapOf<S> {
        assert_eq!(
            self.target, g.source,
            "composition mismatch: {:?} vs {:?}",
            self.target, g.source
        );
        let data = match (&self.data, &g.data) {
            (MapData::Set(a), MapData::Set(b)) => MapData::Set(a.iter().map(|&i| b[i]).collect()),
            (MapData::Vect(a), MapData::Vect(b)) => MapData::Vect(b.mul(a)),
            _ => unreachable!(),
        };
        CarrierMapOf { source: self.source.clone(), target: g.target.clone(), data }
    }

    pub fn is_surjective(&self) -> bool {
        match &self.data {
            MapData::Set(v) => {
                let mut hit = vec![false; self.target.size()];
                for &i in v {
                    hit[i] = true;
                }
                hit.into_iter().all(|b| b)
            }
            MapData::Vect(m) => m.rank() == self.target.size(),
        }
    }

    pub fn is_injective(&self) -> bool {
        match &self.data {
            MapData::Set(v) => {
                let mut seen = vec![false; self.target.size()];
                for &i in v {
                    if seen[i] {
                        return false;
                    }
                    seen[i] = true;
                }
                true
            }
            MapData::Vect(m) => m.rank() == self.source.size(),
        }
    }

    pub fn is_iso(&self) -> bool {
        self.source.size() == self.target.size() && self.is_injective() && self.is_surjective()
    }

    pub fn inverse(&self) -> Option<CarrierMapOf<S>> {
        if !self.is_iso() {
            return None;
        }
        let data = match &self.data {
            MapData::Set(v) => {
                let mut inv = vec![0; v.len()];
                for (i, &j) in v.iter().enumerate() {
                    inv[j] = i;
                }
                MapData::Set(inv)
            }
            MapData::Vect(m) => MapData::Vect(m.inverse()?),
        };
        Some(CarrierMapOf { source: self.target.clone(), target: self.source.clone(), data })
    }
}

/// Coproduct with injections. Set labels get a part prefix to stay distinct.
pub fn coproduct<S: Scalar>(parts: &[Carrier]) -> Result<(Carrier, Vec<CarrierMapOf<S>>), Error> {
    let kind = parts.first().map_or(Kind::Set, |c| c.kind());
    if parts.iter().any(|c| c.kind() != kind) {
        return Err(Error::KindMismatch("coproduct of mixed kinds".into()));
    }
    let mut labels = vec![];
    for (i, part) in parts.iter().enumerate() {
        for l in part.labels() {
            labels.push(format!("{i}.{l}"));
        }
    }
    let total = Carrier::new(kind, labels)?;
    let mut injections = vec![];
    let mut offset = 0;
    for part in parts {
        let idx: Vec<usize> = (0..part.size()).map(|i| offset + i).collect();
        let inj = match kind {
            Kind::Set => CarrierMapOf::from_indices(part, &total, idx)?,
            Kind::Vect => {
                let mut m = Matrix::zero(total.size(), part.size());
                for (c, &r) in idx.iter().enumerate() {
                    *m.at_mut(r, c) = S::one();
                }
                CarrierMapOf::from_matrix(part, &total, m)?
            }
        };
        injections.push(inj);
        offset += part.size();
    }
    Ok((total, injections))
}

/// Row-major index of a tuple in a tensor product.
pub fn tensor_index(dims: &[usize], idx: &[usize]) -> usize {
    assert_eq!(dims.len(), idx.len());
    let mut acc = 0;
    for (d, i) in dims.iter().zip(idx) {
        assert!(i < d);
        acc = acc * d + i;
    }
    acc
}

/// Inverse of `tensor_index`.
pub fn tensor_unindex(dims: &[usize], mut flat: usize) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = flat % dims[k];
        flat /= dims[k];
    }
    out
}

/// Tensor product of a list of carriers, empty list giving the unit.
/// Labels are tuples in lexicographic (row-major) order.
pub fn tensor_many(kind: Kind, parts: &[Carrier]) -> Result<Carrier, Error> {
    if parts.iter().any(|c| c.kind() != kind) {
        return Err(Error::KindMismatch("tensor of mixed kinds".into()));
    }
    if parts.is_empty() {
        return Ok(Carrier::unit(kind));
    }
    let dims: Vec<usize> = parts.iter().map(|c| c.size()).collect();
    let total: usize = dims.iter().product();
    let mut labels = Vec::with_capacity(total);
    for flat in 0..total {
        let idx = tensor_unindex(&dims, flat);
        let parts_l: Vec<&str> = idx.iter().zip(parts).map(|(&i, c)| c.label(i)).collect();
        labels.push(format!("({})", parts_l.join(",")));
    }
    Carrier::new(kind, labels)
}

pub fn tensor(x: &Carrier, y: &Carrier) -> Result<Carrier, Error> {
    if x.kind() != y.kind() {
        return Err(Error::KindMismatch("tensor of mixed kinds".into()));
    }
    tensor_many(x.kind(), &[x.clone(), y.clone()])
}

/// Tensor product of maps, `f_1 ⊗ ... ⊗ f_k`.
pub fn tensor_maps<S: Scalar>(fs: &[CarrierMapOf<S>]) -> Result<CarrierMapOf<S>, Error> {
    let kind = fs.first().map_or(Kind::Set, |f| f.kind());
    let src_parts: Vec<Carrier> = fs.iter().map(|f| f.source().clone()).collect();
    let tgt_parts: Vec<Carrier> = fs.iter().map(|f| f.target().clone()).collect();
    let src = tensor_many(kind, &src_parts)?;
    let tgt = tensor_many(kind, &tgt_parts)?;
    let src_dims: Vec<usize> = src_parts.iter().map(|c| c.size()).collect();
    let tgt_dims: Vec<usize> = tgt_parts.iter().map(|c| c.size()).collect();
    match kind {
        Kind::Set => {
            let mut idx = Vec::with_capacity(src.size());
            for flat in 0..src.size() {
                let tuple = tensor_unindex(&src_dims, flat);
                let image: Vec<usize> =
                    tuple.iter().zip(fs).map(|(&i, f)| f.apply_index(i)).collect();
                idx.push(tensor_index(&tgt_dims, &image));
            }
            CarrierMapOf::from_indices(&src, &tgt, idx)
        }
        Kind::Vect => {
            let mut m: Matrix<S> = Matrix::zero(tgt.size(), src.size());
            for src_flat in 0..src.size() {
                let tuple = tensor_unindex(&src_dims, src_flat);
                // column = ⊗ of the image columns
                let mut col: Vec<(usize, S)> = vec![(0, S::one())];
                for (k, f) in fs.iter().enumerate() {
                    let fcol = f.matrix().column(tuple[k]);
                    let mut next = vec![];
                    for (pos, coeff) in &col {
                        for (r, v) in fcol.iter().enumerate() {
                            if !v.is_zero() {
                                next.push((pos * tgt_dims[k] + r, coeff.clone() * v.clone()));
                            }
                        }
                    }
                    col = next;
                }
                for (r, v) in col {
                    let cur = m.at(r, src_flat).clone() + v;
                    *m.at_mut(r, src_flat) = cur;
                }
            }
            CarrierMapOf::from_matrix(&src, &tgt, m)
        }
    }
}

/// Quotient of a set carrier by the equivalence generated by `pairs`
/// (given as index pairs). Class labels are the lexicographically least
/// member; classes are ordered by their smallest member index.
fn quotient_set<S: Scalar>(
    target: &Carrier,
    pairs: &[(usize, usize)],
) -> (Carrier, CarrierMapOf<S>) {
    let n = target.size();
    let mut uf: Vec<usize> = (0..n).collect();
    fn find(uf: &mut Vec<usize>, mut i: usize) -> usize {
        while uf[i] != i {
            uf[i] = uf[uf[i]];
            i = uf[i];
        }
        i
    }
    for &(a, b) in pairs {
        let ra = find(&mut uf, a);
        let rb = find(&mut uf, b);
        if ra != rb {
            uf[ra.max(rb)] = ra.min(rb);
        }
    }
    let mut class_of_root: std::collections::BTreeMap<usize, usize> = Default::default();
    let mut reps: Vec<usize> = vec![];
    for i in 0..n {
        let r = find(&mut uf, i);
        class_of_root.entry(r).or_insert_with(|| {
            reps.push(r);
            reps.len() - 1
        });
    }
    // lexicographically least label per class
    let mut least: Vec<&str> = reps.iter().map(|&r| target.label(r)).collect();
    let mut proj = vec![0usize; n];
    for i in 0..n {
        let r = find(&mut uf, i);
        let cls = class_of_root[&r];
        proj[i] = cls;
        if target.label(i) < least[cls] {
            least[cls] = target.label(i);
        }
    }
    let q = Carrier::set(least.into_iter().map(|s| s.to_string()).collect())
        .expect("least labels distinct across classes");
    let pi = CarrierMapOf::from_indices(target, &q, proj).expect("projection");
    (q, pi)
}

/// Quotient of a vector-space carrier by the span of `vectors`.
/// Quotient basis: the non-pivot basis labels of the span's echelon form.
fn quotient_vect<S: Scalar>(target: &Carrier, vectors: &[Vec<S>]) -> (Carrier, CarrierMapOf<S>) {
    let n = target.size();
    let basis = column_span_basis(n, vectors);
    let pivots: Vec<usize> = basis
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).expect("nonzero echelon row"))
        .collect();
    let keep: Vec<usize> = (0..n).filter(|i| !pivots.contains(i)).collect();
    let q = Carrier::vect(keep.iter().map(|&i| target.label(i).to_string()).collect())
        .expect("subset of distinct labels");
    // projection: reduce modulo the echelon rows, then restrict to kept coords
    let mut m = Matrix::zero(keep.len(), n);
    for c in 0..n {
        let mut v = vec![S::zero(); n];
        v[c] = S::one();
        for (row, &p) in basis.iter().zip(&pivots) {
            if !v[p].is_zero() {
                let f = v[p].clone() / row[p].clone();
                for (vi, ri) in v.iter_mut().zip(row) {
                    *vi = vi.clone() - f.clone() * ri.clone();
                }
            }
        }
        for (r, &i) in keep.iter().enumerate() {
            *m.at_mut(r, c) = v[i].clone();
        }
    }
    let pi = CarrierMapOf::from_matrix(target, &q, m).expect("projection");
    (q, pi)
}

/// Coequalizer of a family of parallel pairs with common target; returns the
/// quotient and its projection. An empty family yields the identity quotient.
pub fn multi_coequalizer<S: Scalar>(
    target: &Carrier,
    pairs: &[(CarrierMapOf<S>, CarrierMapOf<S>)],
) -> Result<(Carrier, CarrierMapOf<S>), Error> {
    for (f, g) in pairs {
        if f.source() != g.source() || f.target() != target || g.target() != target {
            return Err(Error::ShapeMismatch("coequalizer pair not parallel into target".into()));
        }
    }
    match target.kind() {
        Kind::Set => {
            let mut idx_pairs = vec![];
            for (f, g) in pairs {
                for i in 0..f.source().size() {
                    idx_pairs.push((f.apply_index(i), g.apply_index(i)));
                }
            }
            Ok(quotient_set(target, &idx_pairs))
        }
        Kind::Vect => {
            let mut vectors = vec![];
            for (f, g) in pairs {
                let d = f.matrix().sub(g.matrix());
                for c in 0..d.cols {
                    vectors.push(d.column(c));
                }
            }
            Ok(quotient_vect(target, &vectors))
        }
    }
}

pub fn coequalizer<S: Scalar>(
    f: &CarrierMapOf<S>,
    g: &CarrierMapOf<S>,
) -> Result<(Carrier, CarrierMapOf<S>), Error> {
    multi_coequalizer(f.target(), &[(f.clone(), g.clone())])
}

/// Pushout of `f: X -> Y`, `g: X -> Z`, computed as a coequalizer over Y ⨿ Z.
/// Returns the pushout with its two legs `Y -> P`, `Z -> P`.
pub fn pushout<S: Scalar>(
    f: &CarrierMapOf<S>,
    g: &CarrierMapOf<S>,
) -> Result<(Carrier, CarrierMapOf<S>, CarrierMapOf<S>), Error> {
    if f.source() != g.source() {
        return Err(Error::ShapeMismatch("pushout legs must share a source".into()));
    }
    let (sum, inj) = coproduct(&[f.target().clone(), g.target().clone()])?;
    let into_y = f.then(&inj[0]);
    let into_z = g.then(&inj[1]);
    let (p, pi) = multi_coequalizer(&sum, &[(into_y, into_z)])?;
    Ok((p, inj[0].then(&pi), inj[1].then(&pi)))
}

/// Colimit of a finite composable chain `X_0 -> X_1 -> ... -> X_k`:
/// the final object, the cocone maps, and the first stage index from which
/// all remaining bonds are isomorphisms.
pub fn sequential_colimit<S: Scalar>(
    chain: &[CarrierMapOf<S>],
) -> Result<(Carrier, Vec<CarrierMapOf<S>>, usize), Error> {
    if chain.is_empty() {
        return Err(Error::invalid("empty chain"));
    }
    for w in chain.windows(2) {
        if w[0].target() != w[1].source() {
            return Err(Error::ShapeMismatch("chain not composable".into()));
        }
    }
    let last = chain.last().unwrap().target().clone();
    let mut cocone = vec![CarrierMapOf::identity(&last); chain.len() + 1];
    for i in (0..chain.len()).rev() {
        cocone[i] = chain[i].then(&cocone[i + 1]);
    }
    let mut stable_from = chain.len();
    while stable_from > 0 && chain[stable_from - 1].is_iso() {
        stable_from -= 1;
    }
    Ok((last, cocone, stable_from))
}

/// A computed colimit of a finite diagram, keeping the coproduct and the
/// quotient projection around so maps out of the colimit can be induced.
#[derive(Clone, Debug)]
pub struct DiagramColimit<S: Scalar> {
    pub coproduct: Carrier,
    pub coproduct_injections: Vec<CarrierMapOf<S>>,
    pub projection: CarrierMapOf<S>,
    pub colimit: Carrier,
    pub injections: Vec<CarrierMapOf<S>>,
}

impl<S: Scalar> DiagramColimit<S> {
    /// Induce the unique map out of the colimit from a cocone, given as one
    /// map per diagram object. Fails if the cocone is not compatible.
    pub fn induce(&self, cocone: &[CarrierMapOf<S>]) -> Option<CarrierMapOf<S>> {
        assert_eq!(cocone.len(), self.coproduct_injections.len());
        let target = cocone.first()?.target().clone();
        // assemble the cocone on the coproduct
        let on_sum = match self.coproduct.kind() {
            Kind::Set => {
                let mut idx = vec![0usize; self.coproduct.size()];
                for (inj, leg) in self.coproduct_injections.iter().zip(cocone) {
                    for i in 0..inj.source().size() {
                        idx[inj.apply_index(i)] = leg.apply_index(i);
                    }
                }
                CarrierMapOf::from_indices(&self.coproduct, &target, idx).ok()?
            }
            Kind::Vect => {
                let mut m: Matrix<S> = Matrix::zero(target.size(), self.coproduct.size());
                for (inj, leg) in self.coproduct_injections.iter().zip(cocone) {
                    for c in 0..inj.source().size() {
                        let col = inj.matrix().column(c);
                        let pos = col.iter().position(|x| !x.is_zero()).expect("injection column");
                        for r in 0..target.size() {
                            *m.at_mut(r, pos) = leg.matrix().at(r, c).clone();
                        }
                    }
                }
                CarrierMapOf::from_matrix(&self.coproduct, &target, m).ok()?
            }
        };
        factor_through_epi(&self.projection, &on_sum)
    }
}

/// Colimit of a finite diagram: objects and edges `(src, tgt, map)`.
pub fn diagram_colimit_full<S: Scalar>(
    objects: &[Carrier],
    edges: &[(usize, usize, CarrierMapOf<S>)],
) -> Result<DiagramColimit<S>, Error> {
    let (sum, inj) = coproduct::<S>(objects)?;
    let mut pairs = vec![];
    for (src, tgt, map) in edges {
        if map.source() != &objects[*src] || map.target() != &objects[*tgt] {
            return Err(Error::ShapeMismatch("diagram edge endpoints mismatch".into()));
        }
        pairs.push((inj[*src].clone(), map.then(&inj[*tgt])));
    }
    let (colim, pi) = multi_coequalizer(&sum, &pairs)?;
    let injections = inj.iter().map(|i| i.then(&pi)).collect();
    Ok(DiagramColimit {
        coproduct: sum,
        coproduct_injections: inj,
        projection: pi,
        colimit: colim,
        injections,
    })
}

/// Colimit of a finite diagram: the colimit carrier and per-object injections.
pub fn diagram_colimit<S: Scalar>(
    objects: &[Carrier],
    edges: &[(usize, usize, CarrierMapOf<S>)],
) -> Result<(Carrier, Vec<CarrierMapOf<S>>), Error> {
    let full = diagram_colimit_full(objects, edges)?;
    Ok((full.colimit, full.injections))
}

/// Factor `m: A -> T` through an epimorphism `e: A -> B` (same source),
/// producing the unique `B -> T` with `e.then(result) = m`, if it exists.
pub fn factor_through_epi<S: Scalar>(
    e: &CarrierMapOf<S>,
    m: &CarrierMapOf<S>,
) -> Option<CarrierMapOf<S>> {
    assert_eq!(e.source(), m.source(), "factor_through_epi: sources differ");
    assert!(e.is_surjective(), "factor_through_epi: not an epimorphism");
    match e.kind() {
        Kind::Set => {
            let mut img: Vec<Option<usize>> = vec![None; e.target().size()];
            for i in 0..e.source().size() {
                let b = e.apply_index(i);
                let t = m.apply_index(i);
                match img[b] {
                    None => img[b] = Some(t),
                    Some(prev) if prev == t => {}
                    Some(_) => return None,
                }
            }
            let idx: Vec<usize> = img.into_iter().map(|o| o.expect("epi hits everything")).collect();
            Some(CarrierMapOf::from_indices(e.target(), m.target(), idx).unwrap())
        }
        Kind::Vect => {
            // Solve X * E = M for X, column by column on E^T X^T = M^T.
            let emat = e.matrix();
            let mmat = m.matrix();
            let tb = e.target().size();
            let tt = m.target().size();
            let mut et = Matrix::zero(emat.cols, emat.rows);
            for r in 0..emat.rows {
                for c in 0..emat.cols {
                    *et.at_mut(c, r) = emat.at(r, c).clone();
                }
            }
            let mut x = Matrix::zero(tt, tb);
            for r in 0..tt {
                // row r of X: solve E^T y = (row r of M)^T
                let b: Vec<S> = (0..mmat.cols).map(|c| mmat.at(r, c).clone()).collect();
                let y = et.solve(&b)?;
                for c in 0..tb {
                    *x.at_mut(r, c) = y[c].clone();
                }
            }
            let cand = CarrierMapOf::from_matrix(e.target(), m.target(), x).unwrap();
            if e.then(&cand) == *m {
                Some(cand)
            } else {
                None
            }
        }
    }
}

/// All set maps from `src` to `tgt` (for exhaustive desk-scale checks).
pub fn all_set_maps<S: Scalar>(src: &Carrier, tgt: &Carrier) -> Vec<CarrierMapOf<S>> {
    assert_eq!(src.kind(), Kind::Set);
    assert_eq!(tgt.kind(), Kind::Set);
    let n = src.size();
    let t = tgt.size();
    if t == 0 {
        if n == 0 {
            return vec![CarrierMapOf::from_indices(src, tgt, vec![]).unwrap()];
        }
        return vec![];
    }
    let total = t.checked_pow(n as u32).expect("map count overflow");
    let mut out = Vec::with_capacity(total);
    for mut code in 0..total {
        let mut idx = vec![0; n];
        for slot in idx.iter_mut() {
            *slot = code % t;
            code /= t;
        }
        out.push(CarrierMapOf::from_indices(src, tgt, idx).unwrap());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;
    use num_traits::FromPrimitive;

    type Map = CarrierMapOf<Rat>;

    fn q(n: i64) -> Rat {
        Rat::from_i64(n).unwrap()
    }

    fn set(labels: &[&str]) -> Carrier {
        Carrier::set(labels.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn vect(n: usize) -> Carrier {
        Carrier::vect((0..n).map(|i| format!("e{i}")).collect()).unwrap()
    }

    #[test]
    fn empty_coproduct_is_initial() {
        let (c, inj) = coproduct::<Rat>(&[]).unwrap();
        assert!(c.is_empty());
        assert!(inj.is_empty());
    }

    #[test]
    fn set_coproduct_prefixes_labels() {
        let (c, inj) = coproduct::<Rat>(&[set(&["a", "b"]), set(&["c"])]).unwrap();
        assert_eq!(c.labels(), &["0.a", "0.b", "1.c"]);
        assert_eq!(inj[1].apply_index(0), 2);
    }

    #[test]
    fn vect_coproduct_adds_dims() {
        let (c, _) = coproduct::<Rat>(&[vect(2), vect(3)]).unwrap();
        assert_eq!(c.size(), 5);
    }

    #[test]
    fn tensor_with_unit_is_identity_sized() {
        let x = set(&["a", "b"]);
        let t = tensor(&x, &Carrier::unit(Kind::Set)).unwrap();
        assert_eq!(t.size(), x.size());
    }

    #[test]
    fn tensor_sizes() {
        assert_eq!(tensor(&set(&["a", "b"]), &set(&["c", "d"])).unwrap().size(), 4);
        assert_eq!(tensor(&vect(2), &vect(3)).unwrap().size(), 6);
    }

    #[test]
    fn coequalizer_of_equal_maps_is_iso() {
        let x = set(&["x"]);
        let y = set(&["a", "b"]);
        let f = Map::from_label_fn(&x, &y, |_| "a".into()).unwrap();
        let (qc, pi) = coequalizer(&f, &f).unwrap();
        assert_eq!(qc.size(), 2);
        assert!(pi.is_iso());
    }

    #[test]
    fn set_coequalizer_identifies() {
        let x = set(&["x"]);
        let y = set(&["a", "b"]);
        let f = Map::from_label_fn(&x, &y, |_| "a".into()).unwrap();
        let g = Map::from_label_fn(&x, &y, |_| "b".into()).unwrap();
        let (qc, pi) = coequalizer(&f, &g).unwrap();
        assert_eq!(qc.size(), 1);
        assert_eq!(qc.labels(), &["a"]);
        assert!(pi.is_surjective());
        assert_eq!(f.then(&pi), g.then(&pi));
    }

    #[test]
    fn vect_coequalizer_is_cokernel_of_difference() {
        // f - g : Q^2 -> Q^3 of rank 1 => cokernel dim 2
        let x = vect(2);
        let y = vect(3);
        let f = Map::from_matrix(
            &x,
            &y,
            Matrix::from_rows(vec![vec![q(1), q(1)], vec![q(0), q(0)], vec![q(0), q(0)]]),
        )
        .unwrap();
        let g = Map::from_matrix(&x, &y, Matrix::zero(3, 2)).unwrap();
        let (qc, pi) = coequalizer(&f, &g).unwrap();
        assert_eq!(qc.size(), 2);
        assert_eq!(pi.matrix().rank(), 2);
    }

    #[test]
    fn pushout_along_identity() {
        let x = set(&["x", "y"]);
        let y = set(&["a", "b", "c"]);
        let f = Map::from_label_fn(&x, &y, |l| if l == "x" { "a".into() } else { "b".into() }).unwrap();
        let g = Map::identity(&x);
        let (p, leg_y, leg_z) = pushout(&f, &g).unwrap();
        assert_eq!(p.size(), y.size());
        assert!(leg_y.is_iso());
        assert_eq!(g.then(&leg_z), f.then(&leg_y));
    }

    #[test]
    fn pushout_over_empty_is_coproduct() {
        let x = Carrier::initial(Kind::Set);
        let y = set(&["a"]);
        let z = set(&["b", "c"]);
        let f = Map::from_indices(&x, &y, vec![]).unwrap();
        let g = Map::from_indices(&x, &z, vec![]).unwrap();
        let (p, _, _) = pushout(&f, &g).unwrap();
        assert_eq!(p.size(), 3);
    }

    #[test]
    fn vect_pushout_dimension_count() {
        // f injective: dim P = dim Y + dim Z - dim X
        let x = vect(1);
        let y = vect(2);
        let z = vect(2);
        let f = Map::from_matrix(&x, &y, Matrix::from_rows(vec![vec![q(1)], vec![q(2)]])).unwrap();
        let g = Map::from_matrix(&x, &z, Matrix::from_rows(vec![vec![q(3)], vec![q(0)]])).unwrap();
        let (p, _, _) = pushout(&f, &g).unwrap();
        assert_eq!(p.size(), 3);
    }

    #[test]
    fn sequential_colimit_basics() {
        let a = set(&["a"]);
        let b = set(&["a", "b"]);
        let c = set(&["a", "b", "c"]);
        let f = Map::from_label_fn(&a, &b, |l| l.into()).unwrap();
        let g = Map::from_label_fn(&b, &c, |l| l.into()).unwrap();
        let (last, cocone, stable) = sequential_colimit(&[f, g]).unwrap();
        assert_eq!(last.size(), 3);
        assert_eq!(cocone.len(), 3);
        assert_eq!(cocone[0].apply_index(0), 0);
        assert_eq!(stable, 2);

        let ids = vec![Map::identity(&a), Map::identity(&a)];
        let (_, _, stable) = sequential_colimit(&ids).unwrap();
        assert_eq!(stable, 0);
    }

    #[test]
    fn diagram_colimit_punctured_square() {
        // span  {x} <- {} -> {y}: colimit = 2 points
        let e = Carrier::initial(Kind::Set);
        let x = set(&["x"]);
        let y = set(&["y"]);
        let fx = Map::from_indices(&e, &x, vec![]).unwrap();
        let fy = Map::from_indices(&e, &y, vec![]).unwrap();
        let (c, _) = diagram_colimit(
            &[e.clone(), x, y],
            &[(0, 1, fx), (0, 2, fy)],
        )
        .unwrap();
        assert_eq!(c.size(), 2);
    }

    #[test]
    fn factor_through_epi_set_and_vect() {
        let a = set(&["a", "b", "c"]);
        let b = set(&["p", "q"]);
        let t = set(&["t", "u"]);
        let e = Map::from_indices(&a, &b, vec![0, 0, 1]).unwrap();
        let m = Map::from_indices(&a, &t, vec![1, 1, 0]).unwrap();
        let h = factor_through_epi(&e, &m).unwrap();
        assert_eq!(e.then(&h), m);
        let m_bad = Map::from_indices(&a, &t, vec![1, 0, 0]).unwrap();
        assert!(factor_through_epi(&e, &m_bad).is_none());

        let va = vect(2);
        let vb = vect(1);
        let e = Map::from_matrix(&va, &vb, Matrix::from_rows(vec![vec![q(1), q(1)]])).unwrap();
        let m = Map::from_matrix(&va, &vb, Matrix::from_rows(vec![vec![q(2), q(2)]])).unwrap();
        let h = factor_through_epi(&e, &m).unwrap();
        assert_eq!(h.matrix().at(0, 0), &q(2));
    }
}
