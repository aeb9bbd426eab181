//! Exact-arithmetic laboratory for entropy functionals on the probability
//! simplex.
//!
//! The crate evaluates Tsallis and Shannon entropies with exact rational
//! arithmetic wherever possible, mechanically checks the Shannon-Khinchin
//! style axioms (including generalized and pairwise additivity) against
//! candidate functionals, exercises the two-point identities and the
//! interval-map defect recursion that drive the characterization arguments,
//! reconstructs entropy values from two-component data, and probes how
//! rigidly pairwise additivity pins down entropy on finite rational grids by
//! exact nullspace computation.
//!
//! Modules:
//! - [`simplex`]: stochastic vectors and the structural operations (merge,
//!   split, compose, permute) axiom instances are built from.
//! - [`value`]: exact-or-approximate scalar values, the entropy parameter
//!   alpha, and extended-precision powers and logarithms.
//! - [`functionals`]: Tsallis, Shannon, closed-form, tabulated and perturbed
//!   entropy functionals.
//! - [`axioms`]: axiom checks over exhaustive grids and seeded samples with
//!   residuals and counterexample witnesses.
//! - [`characterization`]: two-point identities, the f-map orbit dynamics,
//!   defect recursion, and reconstruction routes.
//! - [`kernel`]: pairwise-additivity constraint systems on rational grids
//!   and their exact solution spaces.

pub mod axioms;
pub mod characterization;
pub mod functionals;
pub mod kernel;
pub mod simplex;
pub mod value;

/// Version string embedded in CLI reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
