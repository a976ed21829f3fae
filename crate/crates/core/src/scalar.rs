//! Scalar abstraction for the vector-space side of the calculus.
//!
//! Every linear computation in this crate is elimination over an exact
//! field, so the requirements are exactly the `num_traits` field
//! operations plus equality. The crate root fixes the concrete choice
//! (`Rat`, arbitrary-precision rationals); nothing here depends on it.

use std::fmt::{Debug, Display};

use num_traits::{Num, Signed};

/// An exact field scalar. Implemented for anything with exact ring
/// operations, exact division and decidable equality.
pub trait Scalar: Num + Signed + Clone + PartialEq + Debug + Display {}

impl<T> Scalar for T where T: Num + Signed + Clone + PartialEq + Debug + Display {}
