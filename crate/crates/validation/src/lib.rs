//! Reference computations and randomized invariants used to validate
//! `royal_road` against independent arithmetic.

pub mod properties;
pub mod reference;
