//! Numerical engine for basic hypergeometric series.
//!
//! The crate evaluates q-shifted factorials, unilateral `rφs` and bilateral
//! `rψs` series in double precision, and checks a catalog of summation and
//! transformation identities by computing both sides along independent code
//! paths.
//!
//! - [`qpochhammer`]: finite and infinite q-shifted factorials with truncation bounds
//! - [`series`]: term-ratio marching for `rφs` / `rψs` with convergence analysis
//! - [`identities`]: the identity catalog, specializations and cross-checks
//! - [`harness`]: seeded domain sampling, batch verification and JSON reports

pub mod error;
pub mod harness;
pub mod identities;
pub mod qpochhammer;
pub mod series;

pub use num_complex::Complex64;

/// Double precision complex number; every parameter and value in the crate.
pub type ComplexScalar = Complex64;

pub use error::{Error, Result, Side};
pub use qpochhammer::{
    lattice_distance, poch_finite, poch_infinite, poch_multi, poch_pair_sq, poch_ratio, Approx, Order,
    ProductConfig, QBase, POLE_GUARD,
};
pub use harness::{
    check_all, run_verification, sample_params, CheckLine, SampleRecord, SampleSpec,
    SampleStatus, VerificationReport,
};
pub use identities::{
    catalog, cross_check_equivalence, evaluate_detailed, evaluate_identity, find_identity,
    reduction_chain, reduction_coherence, specialize_at_integer, thm3_to_jouhet, Condition,
    DetailedCheck, EquivalenceCheck, IdentityCheck, IdentityDescriptor, ParamAssignment,
    ReductionChainCheck, ReductionCoherence, SideValue, SpecializationCheck,
};
pub use series::{
    convergence_margin, convergence_region, eval_phi, eval_psi, term_ratio, ConvergenceRegion, EvalConfig,
    EvalResult, EvalStatus, Param, SeriesKind, SeriesSpec,
};

/// Shorthand for a complex number from its parts.
#[inline]
pub fn c(re: f64, im: f64) -> ComplexScalar {
    Complex64::new(re, im)
}

/// Shorthand for a real number as a complex one.
#[inline]
pub fn r(re: f64) -> ComplexScalar {
    Complex64::new(re, 0.0)
}
