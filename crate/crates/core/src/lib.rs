//! Exact computation of how pushforwards of line bundles split under finite
//! endomorphisms of projective space, and the cohomology, linear-completeness
//! and adjunction consequences for inverse images of model varieties.

pub mod adjunction;
pub mod cli;
pub mod endomorphism;
pub mod exactla;
pub mod polyring;
pub mod pullback;
pub mod splitting;
pub mod varieties;

pub use endomorphism::{Endomorphism, FinitenessVerdict};
pub use exactla::{binomial, ExactMatrix, ExactScalar, IntegerMatrix, RankMode};
pub use polyring::{graded_dim, parse_form, GradedBasis, HomogPoly, Monomial};
pub use splitting::{delta, splitting_from_endo, splitting_universal, SplittingType};
