//! Permutations and finite permutation groups.
//!
//! Groups are stored as a generating set together with the eagerly
//! enumerated element list (closure under composition). All automorphism
//! groups arising from truncated trees are tiny, so the closure is cheap;
//! a hard cap guards against runaway input.

use std::collections::BTreeSet;

use crate::error::Error;

/// Hard cap on eagerly enumerated group orders.
pub const MAX_GROUP_ORDER: usize = 1_000_000;

/// A permutation of `{0..n-1}` in one-line notation: `p.apply(i) = p.map[i]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Perm {
    map: Vec<usize>,
}

impl std::fmt::Debug for Perm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Perm{:?}", self.map)
    }
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm { map: (0..n).collect() }
    }

    /// Build from one-line notation; checks bijectivity.
    pub fn from_vec(map: Vec<usize>) -> Result<Self, Error> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &i in &map {
            if i >= n || seen[i] {
                return Err(Error::invalid(format!("not a permutation: {map:?}")));
            }
            seen[i] = true;
        }
        Ok(Perm { map })
    }

    /// Transposition (i j) on n points.
    pub fn transposition(n: usize, i: usize, j: usize) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        map.swap(i, j);
        Perm { map }
    }

    pub fn degree(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn slots(&self) -> &[usize] {
        &self.map
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `self.compose(&b)` is "b first, then self": `(self∘b)(i) = self(b(i))`.
    pub fn compose(&self, b: &Perm) -> Perm {
        assert_eq!(self.degree(), b.degree());
        Perm { map: b.map.iter().map(|&i| self.map[i]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut map = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            map[j] = i;
        }
        Perm { map }
    }

    /// Permute the entries of a slice: result[p(i)] = xs[i].
    pub fn permute<T: Clone>(&self, xs: &[T]) -> Vec<T> {
        assert_eq!(xs.len(), self.degree());
        let mut out: Vec<T> = xs.to_vec();
        for (i, x) in xs.iter().enumerate() {
            out[self.map[i]] = x.clone();
        }
        out
    }
}

/// A finite permutation group on `{0..degree-1}`, closed element list included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

impl FiniteGroup {
    pub fn trivial(degree: usize) -> Self {
        FiniteGroup {
            degree,
            generators: vec![],
            elements: vec![Perm::identity(degree)],
        }
    }

    /// Full symmetric group on the points `points` inside `{0..degree-1}`.
    pub fn symmetric_on(degree: usize, points: &[usize]) -> Self {
        let mut gens = vec![];
        for w in points.windows(2) {
            gens.push(Perm::transposition(degree, w[0], w[1]));
        }
        FiniteGroup::generated(degree, gens).expect("symmetric group closure")
    }

    pub fn symmetric(n: usize) -> Self {
        let pts: Vec<usize> = (0..n).collect();
        FiniteGroup::symmetric_on(n, &pts)
    }

    /// Close a generating set under composition and inverse.
    pub fn generated(degree: usize, generators: Vec<Perm>) -> Result<Self, Error> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::invalid("generator degree mismatch"));
            }
        }
        let mut elements: BTreeSet<Perm> = BTreeSet::new();
        elements.insert(Perm::identity(degree));
        let mut frontier: Vec<Perm> = vec![Perm::identity(degree)];
        while let Some(g) = frontier.pop() {
            for h in &generators {
                let gh = h.compose(&g);
                if elements.insert(gh.clone()) {
                    if elements.len() > MAX_GROUP_ORDER {
                        return Err(Error::invalid("group order exceeds hard cap"));
                    }
                    frontier.push(gh);
                }
            }
        }
        Ok(FiniteGroup {
            degree,
            generators,
            elements: elements.into_iter().collect(),
        })
    }

    /// Young subgroup of Σ_n stabilizing the blocks of equal entries in `word`:
    /// all permutations p with word[p(i)] = word[i].
    pub fn young<T: Eq>(word: &[T]) -> Self {
        let n = word.len();
        let mut gens = vec![];
        for i in 0..n {
            for j in (i + 1)..n {
                if word[i] == word[j] {
                    gens.push(Perm::transposition(n, i, j));
                }
            }
        }
        FiniteGroup::generated(n, gens).expect("young closure")
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// Orbit of a point under the group.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let mut seen = BTreeSet::new();
        for g in &self.elements {
            seen.insert(g.apply(x));
        }
        seen.into_iter().collect()
    }

    /// Elements fixing every point of `xs`.
    pub fn pointwise_stabilizer(&self, xs: &[usize]) -> Vec<Perm> {
        self.elements
            .iter()
            .filter(|g| xs.iter().all(|&x| g.apply(x) == x))
            .cloned()
            .collect()
    }
}

/// Are the subgroups `h1` and `h2` (given as sorted element lists inside the
/// same ambient group `g`) conjugate in `g`?
pub fn conjugate_subgroups(g: &FiniteGroup, h1: &[Perm], h2: &[Perm]) -> bool {
    if h1.len() != h2.len() {
        return false;
    }
    let set2: BTreeSet<&Perm> = h2.iter().collect();
    g.elements().iter().any(|c| {
        let cinv = c.inverse();
        h1.iter().all(|h| set2.contains(&c.compose(h).compose(&cinv)))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_inverse() {
        let p = Perm::from_vec(vec![1, 2, 0]).unwrap();
        assert_eq!(p.compose(&p.inverse()), Perm::identity(3));
        let q = Perm::transposition(3, 0, 1);
        // (p∘q)(0) = p(1) = 2
        assert_eq!(p.compose(&q).apply(0), 2);
    }

    #[test]
    fn symmetric_group_order() {
        assert_eq!(FiniteGroup::symmetric(4).order(), 24);
    }

    #[test]
    fn young_subgroup_of_word() {
        let g = FiniteGroup::young(&['a', 'b', 'a', 'a']);
        // stabilizer of the color word abaa is Σ_{0,2,3} x Σ_{1}
        assert_eq!(g.order(), 6);
        assert!(g.contains(&Perm::transposition(4, 0, 2)));
        assert!(!g.contains(&Perm::transposition(4, 0, 1)));
    }

    #[test]
    fn permute_slice_convention() {
        let p = Perm::from_vec(vec![2, 0, 1]).unwrap();
        // result[p(i)] = xs[i]
        assert_eq!(p.permute(&['x', 'y', 'z']), vec!['y', 'z', 'x']);
    }

    #[test]
    fn stabilizer_and_conjugacy() {
        let s3 = FiniteGroup::symmetric(3);
        let st0 = s3.pointwise_stabilizer(&[0]);
        let st2 = s3.pointwise_stabilizer(&[2]);
        assert_eq!(st0.len(), 2);
        assert!(conjugate_subgroups(&s3, &st0, &st2));
        let id_only = vec![Perm::identity(3)];
        assert!(!conjugate_subgroups(&s3, &st0, &id_only));
    }
}
