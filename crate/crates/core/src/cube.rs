//! Pushout-products: the binary corner map f □ g and the iterated
//! j^{□t} whose source is the colimit of the punctured t-cube, together
//! with the symmetric-group action permuting the cube coordinates.

use crate::action::ActionOf;
use crate::carrier::{
    diagram_colimit_full, tensor_many, tensor_maps, Carrier, CarrierMapOf, DiagramColimit, Kind,
};
use crate::error::Error;
use crate::perm::{FiniteGroup, Perm};
use crate::scalar::Scalar;

/// The factor-permuting automorphism of a tensor power: sends the tuple
/// `x` to the tuple `y` with `y[p(k)] = x[k]`, factor carriers permuted
/// accordingly. This is a left action of the symmetric group.
pub fn tensor_permutation<S: Scalar>(
    factors: &[Carrier],
    p: &Perm,
) -> Result<CarrierMapOf<S>, Error> {
    assert_eq!(factors.len(), p.degree());
    let kind = factors.first().map_or(Kind::Set, |c| c.kind());
    let src = tensor_many(kind, factors)?;
    let permuted = p.permute(factors);
    let tgt = tensor_many(kind, &permuted)?;
    let src_dims: Vec<usize> = factors.iter().map(|c| c.size()).collect();
    let tgt_dims: Vec<usize> = permuted.iter().map(|c| c.size()).collect();
    let mut idx = Vec::with_capacity(src.size());
    for flat in 0..src.size() {
        let tuple = crate::carrier::tensor_unindex(&src_dims, flat);
        let moved = p.permute(&tuple);
        idx.push(crate::carrier::tensor_index(&tgt_dims, &moved));
    }
    match kind {
        Kind::Set => CarrierMapOf::from_indices(&src, &tgt, idx),
        Kind::Vect => {
            let mut m = crate::matrix::Matrix::zero(tgt.size(), src.size());
            for (c, &r) in idx.iter().enumerate() {
                *m.at_mut(r, c) = S::one();
            }
            CarrierMapOf::from_matrix(&src, &tgt, m)
        }
    }
}

/// Binary pushout-product `f □ g : (X⊗Y') ⨿_{X⊗X'} (Y⊗X') → Y⊗Y'`.
pub struct PushoutProduct<S: Scalar> {
    pub source: Carrier,
    pub map: CarrierMapOf<S>,
}

pub fn pushout_product<S: Scalar>(
    f: &CarrierMapOf<S>,
    g: &CarrierMapOf<S>,
) -> Result<PushoutProduct<S>, Error> {
    if f.kind() != g.kind() {
        return Err(Error::KindMismatch("pushout-product of mixed kinds".into()));
    }
    let cube = punctured_cube(&[f.clone(), g.clone()])?;
    Ok(PushoutProduct { source: cube.source.clone(), map: cube.map })
}

/// The punctured cube of a list of maps `f_k : X_k → Y_k`: vertices are the
/// words over {0,1} of that length except all-ones, the word picking source
/// or target in each coordinate; edges flip one 0 to 1 by applying `f_k`.
pub struct PuncturedCube<S: Scalar> {
    pub words: Vec<Vec<bool>>,
    pub diagram: DiagramColimit<S>,
    /// s(f_1 □ ... □ f_t), the colimit of the punctured cube.
    pub source: Carrier,
    /// the corner map into the full tensor of targets
    pub map: CarrierMapOf<S>,
    pub target: Carrier,
}

pub fn punctured_cube<S: Scalar>(maps: &[CarrierMapOf<S>]) -> Result<PuncturedCube<S>, Error> {
    let t = maps.len();
    let kind = maps.first().map(|m| m.kind()).unwrap_or(Kind::Set);
    let mut words: Vec<Vec<bool>> = vec![];
    for code in 0..(1usize << t) {
        let w: Vec<bool> = (0..t).map(|k| code >> k & 1 == 1).collect();
        if w.iter().all(|&b| b) {
            continue;
        }
        words.push(w);
    }
    let vertex_carrier = |w: &[bool]| -> Result<Carrier, Error> {
        let parts: Vec<Carrier> = w
            .iter()
            .zip(maps)
            .map(|(&b, f)| if b { f.target().clone() } else { f.source().clone() })
            .collect();
        tensor_many(kind, &parts)
    };
    let objects: Vec<Carrier> =
        words.iter().map(|w| vertex_carrier(w)).collect::<Result<_, _>>()?;
    let mut edges = vec![];
    for (i, w) in words.iter().enumerate() {
        for k in 0..t {
            if w[k] {
                continue;
            }
            let mut w2 = w.clone();
            w2[k] = true;
            let Some(j) = words.iter().position(|u| u == &w2) else {
                continue; // flipping into the all-ones corner
            };
            let legs: Vec<CarrierMapOf<S>> = w
                .iter()
                .zip(maps)
                .enumerate()
                .map(|(pos, (&b, f))| {
                    if pos == k {
                        f.clone()
                    } else if b {
                        CarrierMapOf::identity(f.target())
                    } else {
                        CarrierMapOf::identity(f.source())
                    }
                })
                .collect();
            edges.push((i, j, tensor_maps(&legs)?));
        }
    }
    let diagram = diagram_colimit_full(&objects, &edges)?;
    let targets: Vec<Carrier> = maps.iter().map(|f| f.target().clone()).collect();
    let target = tensor_many(kind, &targets)?;
    // corner map: each vertex maps into the full target by applying f where
    // the coordinate still sits at the source
    let cocone: Vec<CarrierMapOf<S>> = words
        .iter()
        .map(|w| {
            let legs: Vec<CarrierMapOf<S>> = w
                .iter()
                .zip(maps)
                .map(|(&b, f)| if b { CarrierMapOf::identity(f.target()) } else { f.clone() })
                .collect();
            tensor_maps(&legs)
        })
        .collect::<Result<_, _>>()?;
    let map = diagram
        .induce(&cocone)
        .ok_or_else(|| Error::CheckFailed("punctured cube cocone does not descend".into()))?;
    Ok(PuncturedCube { words, source: diagram.colimit.clone(), diagram, map, target })
}

/// The iterated pushout-product of a single map with itself, with the
/// symmetric group permuting the tensor coordinates on source and target.
pub struct IteratedPushoutProduct<S: Scalar> {
    pub t: usize,
    pub cube: PuncturedCube<S>,
    pub source_action: ActionOf<S>,
    pub target_action: ActionOf<S>,
}

pub fn iterated_pushout_product<S: Scalar>(
    j: &CarrierMapOf<S>,
    t: usize,
) -> Result<IteratedPushoutProduct<S>, Error> {
    let maps = vec![j.clone(); t];
    let cube = punctured_cube(&maps)?;
    let group = FiniteGroup::symmetric(t);
    let target_factors = vec![j.target().clone(); t];
    let mut tgt_gen_maps = vec![];
    let mut src_gen_maps = vec![];
    for g in group.generators() {
        tgt_gen_maps.push((g.clone(), tensor_permutation(&target_factors, g)?));
        // source: permute cube vertices and factors simultaneously
        let cocone: Vec<CarrierMapOf<S>> = cube
            .words
            .iter()
            .map(|w| {
                let factors: Vec<Carrier> = w
                    .iter()
                    .map(|&b| if b { j.target().clone() } else { j.source().clone() })
                    .collect();
                let moved_word = g.permute(w);
                let to_moved = tensor_permutation::<S>(&factors, g)?;
                let target_idx = cube
                    .words
                    .iter()
                    .position(|u| u == &moved_word)
                    .expect("permuted word stays punctured");
                Ok(to_moved.then(&cube.diagram.injections[target_idx]))
            })
            .collect::<Result<_, Error>>()?;
        let m = cube
            .diagram
            .induce(&cocone)
            .ok_or_else(|| Error::CheckFailed("cube action does not descend".into()))?;
        src_gen_maps.push((g.clone(), m));
    }
    let source_action = if t == 0 {
        ActionOf::trivial(group.clone(), cube.source.clone())
    } else {
        ActionOf::from_generator_maps(group.clone(), cube.source.clone(), &src_gen_maps)?
    };
    let target_action = if t == 0 {
        ActionOf::trivial(group, cube.target.clone())
    } else {
        ActionOf::from_generator_maps(group, cube.target.clone(), &tgt_gen_maps)?
    };
    Ok(IteratedPushoutProduct { t, cube, source_action, target_action })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;

    type Map = CarrierMapOf<Rat>;

    fn set(labels: &[&str]) -> Carrier {
        Carrier::set(labels.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    #[test]
    fn square_with_identity_is_iso_onto() {
        let x = set(&["x"]);
        let y = set(&["x", "y"]);
        let j = Map::from_label_fn(&x, &y, |l| l.into()).unwrap();
        let idm = Map::identity(&set(&["a"]));
        let pp = pushout_product(&idm, &j).unwrap();
        assert!(pp.map.is_iso());
        assert_eq!(pp.source.size(), 2);
    }

    #[test]
    fn empty_source_square() {
        // j : 0 -> {y}, t = 2: source of j^{□2} is empty, target has 1 element
        let e = Carrier::initial(Kind::Set);
        let y = set(&["y"]);
        let j = Map::from_indices(&e, &y, vec![]).unwrap();
        let it = iterated_pushout_product(&j, 2).unwrap();
        assert_eq!(it.cube.source.size(), 0);
        assert_eq!(it.cube.target.size(), 1);
    }

    #[test]
    fn inclusion_square_counts() {
        // j : {x} ↪ {x,y}: s(j^{□2}) = {xx, xy, yx}, target 4 elements
        let x = set(&["x"]);
        let y = set(&["x", "y"]);
        let j = Map::from_label_fn(&x, &y, |l| l.into()).unwrap();
        let it = iterated_pushout_product(&j, 2).unwrap();
        assert_eq!(it.cube.source.size(), 3);
        assert_eq!(it.cube.target.size(), 4);
        assert!(it.cube.map.is_injective());
        // the swap action fixes xx and swaps xy <-> yx
        let (coin, _) = it.source_action.coinvariants();
        assert_eq!(coin.size(), 2);
    }

    #[test]
    fn cube_of_identity_is_iso() {
        let y = set(&["a", "b"]);
        let j = Map::identity(&y);
        let it = iterated_pushout_product(&j, 2).unwrap();
        assert!(it.cube.map.is_iso());
    }
}
