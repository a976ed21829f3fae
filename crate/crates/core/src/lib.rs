//! An exact, truncation-parameterized calculus for colored symmetric
//! operads, their algebras, and enveloping operads.
//!
//! Everything is computed in one of two exact ground categories (finite
//! sets, rational vector spaces) under a global arity truncation, and the
//! closed-form tree constructions are cross-checked against direct
//! coequalizer computations.

pub mod action;
pub mod carrier;
pub mod cube;
pub mod collection;
pub mod error;
pub mod family;
pub mod matrix;
pub mod operad;
pub mod perm;
pub mod profile;
pub mod scalar;
pub mod tree;

/// The concrete field scalar: arbitrary-precision rationals.
pub type Rat = num_rational::BigRational;

/// Carrier maps over the concrete scalar.
pub type CarrierMap = carrier::CarrierMapOf<Rat>;
/// Group actions over the concrete scalar.
pub type Action = action::ActionOf<Rat>;

pub use carrier::{Carrier, Kind, Label};
pub use error::Error;
pub use perm::{FiniteGroup, Perm};
