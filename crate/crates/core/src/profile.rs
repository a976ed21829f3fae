//! Colors and profiles: the index `[c̄; d]` of a multimorphism — an ordered
//! tuple of input colors plus one output color — with the splice operations
//! and the canonical (sorted) representative used for storage.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::perm::{FiniteGroup, Perm};

pub type Color = String;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize, Deserialize)]
pub struct Profile {
    pub inputs: Vec<Color>,
    pub output: Color,
}

impl Profile {
    pub fn new(inputs: Vec<Color>, output: impl Into<Color>) -> Self {
        Profile { inputs, output: output.into() }
    }

    pub fn constant(output: impl Into<Color>) -> Self {
        Profile { inputs: vec![], output: output.into() }
    }

    pub fn unary(input: impl Into<Color>, output: impl Into<Color>) -> Self {
        Profile { inputs: vec![input.into()], output: output.into() }
    }

    pub fn arity(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_canonical(&self) -> bool {
        self.inputs.windows(2).all(|w| w[0] <= w[1])
    }

    /// The sorted representative together with the sorting permutation σ:
    /// entry at position i moves to position σ(i), so `sorted[σ(i)] = inputs[i]`.
    pub fn canonical(&self) -> (Profile, Perm) {
        let mut order: Vec<usize> = (0..self.inputs.len()).collect();
        order.sort_by(|&a, &b| self.inputs[a].cmp(&self.inputs[b]).then(a.cmp(&b)));
        // order[j] = original position landing at slot j
        let mut sigma = vec![0usize; order.len()];
        for (j, &i) in order.iter().enumerate() {
            sigma[i] = j;
        }
        let sorted: Vec<Color> = order.iter().map(|&i| self.inputs[i].clone()).collect();
        (
            Profile { inputs: sorted, output: self.output.clone() },
            Perm::from_vec(sigma).expect("sorting permutation"),
        )
    }

    /// Young subgroup of the positions fixing the input word.
    pub fn young_group(&self) -> FiniteGroup {
        FiniteGroup::young(&self.inputs)
    }

    /// Apply a permutation to the slots: the result has
    /// `out.inputs[p(i)] = self.inputs[i]`.
    pub fn permuted(&self, p: &Perm) -> Profile {
        Profile { inputs: p.permute(&self.inputs), output: self.output.clone() }
    }
}

/// Concatenation of input tuples (Notation ⊞).
pub fn boxplus(a: &[Color], b: &[Color]) -> Vec<Color> {
    let mut out = a.to_vec();
    out.extend_from_slice(b);
    out
}

/// Splice `c` into position `t` (1-based) of `b`, replacing that slot.
pub fn splice(b: &[Color], t: usize, c: &[Color]) -> Result<Vec<Color>, Error> {
    if t == 0 || t > b.len() {
        return Err(Error::invalid(format!("splice position {t} out of 1..={}", b.len())));
    }
    let mut out = Vec::with_capacity(b.len() - 1 + c.len());
    out.extend_from_slice(&b[..t - 1]);
    out.extend_from_slice(c);
    out.extend_from_slice(&b[t..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> Color {
        s.to_string()
    }

    #[test]
    fn boxplus_unit_and_concat() {
        assert_eq!(boxplus(&[c("x"), c("y")], &[]), vec![c("x"), c("y")]);
        assert_eq!(boxplus(&[c("x"), c("y")], &[c("z")]), vec![c("x"), c("y"), c("z")]);
    }

    #[test]
    fn splice_replaces_slot() {
        assert_eq!(
            splice(&[c("x"), c("y")], 2, &[c("u"), c("v")]).unwrap(),
            vec![c("x"), c("u"), c("v")]
        );
        assert!(splice(&[c("x")], 0, &[]).is_err());
        assert!(splice(&[c("x")], 2, &[]).is_err());
    }

    #[test]
    fn canonical_sorting_is_stable() {
        let p = Profile::new(vec![c("b"), c("a"), c("b"), c("a")], "d");
        let (canon, sigma) = p.canonical();
        assert_eq!(canon.inputs, vec![c("a"), c("a"), c("b"), c("b")]);
        // stability: first a (position 1) goes to slot 0, second a (position 3) to slot 1
        assert_eq!(sigma.apply(1), 0);
        assert_eq!(sigma.apply(3), 1);
        assert_eq!(sigma.apply(0), 2);
        assert_eq!(p.permuted(&sigma), canon);
    }

    #[test]
    fn young_group_respects_colors() {
        let p = Profile::new(vec![c("a"), c("a"), c("b")], "d");
        assert_eq!(p.young_group().order(), 2);
    }
}
