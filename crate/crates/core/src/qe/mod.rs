//! Quantifier-manipulation subroutines.

pub mod presburger;
pub mod semenov;
