//! Decision procedures for Presburger arithmetic extended with the base-2
//! power function `pow(x) = 2^|x|`, for the theory of the powers-of-two
//! predicate, and for the existential fragment.
//!
//! The heart of the crate is a block-by-block quantifier manipulation
//! engine ([`engine::master_procedure`]) built from four subroutines:
//! a Presburger-style elimination of linearly occurring variables
//! ([`qe::presburger::pres_qe`]), a cover construction that isolates the
//! largest power ([`qe::semenov::sem_cover`]), a log-taking rewrite of
//! power comparisons ([`qe::semenov::linearise`]), and a residue split that
//! restores simple divisibility constraints ([`qe::presburger::simplify`]).
//! An independent evaluation oracle ([`eval`]) backs the test suites.

pub mod engine;
pub mod eval;
pub mod formula;
pub mod fragment;
pub mod gen;
pub mod limits;
pub mod metrics;
pub mod normal;
pub mod numtheory;
pub mod params;
pub mod parse;
pub mod prenex;
pub mod qe;
pub mod render;
pub mod subst;
pub mod term;
pub mod translate;

pub use formula::{Atom, Formula};
pub use fragment::Fragment;
pub use limits::{Limits, SolveError};
pub use parse::{parse_str, Dialect, SourceFormula};
pub use prenex::{to_prenex, PrenexFormula, Quant};
pub use term::{Term, Var};
