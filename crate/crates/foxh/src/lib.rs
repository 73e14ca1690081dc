//! Numerical evaluation of Fox's H-function by residue-series summation.
//!
//! The H-function is defined by a Mellin-Barnes integral of a ratio of Gamma
//! products. This crate classifies when that integral exists, analyzes the
//! pole structure of the integrand (simple vs. coincident poles), produces
//! the explicit power and power-logarithmic expansions near zero and
//! infinity, and evaluates them adaptively. Independent numerical oracles
//! (direct contour quadrature and small-circle residue integration) verify
//! every coefficient formula, and a fixed corpus of instances with known
//! closed forms provides end-to-end ground truth.
//!
//! Modules:
//! - [`params`]: parameter model, invariants, pole structure, existence.
//! - [`gamma`]: complex log-Gamma, polygamma, the integrand factor and its
//!   asymptotic modulus estimates.
//! - [`jet`]: truncated Taylor arithmetic used for high-order residues.
//! - [`series`]: residue-series coefficients, expansions, and evaluation.
//! - [`oracle`]: Mellin-Barnes quadrature and residue-circle checks.
//! - [`reductions`]: corpus of instances with independently known values.

pub mod error;
pub mod gamma;
pub mod jet;
pub mod oracle;
pub mod params;
pub mod reductions;
pub mod series;

pub use error::{Error, Result};
pub use gamma::{gamma_abs_estimate, log_gamma, polygamma, script_h, script_h_estimate, ContourSpec};
pub use jet::TaylorJet;
pub use oracle::{quadrature_eval, residue_check, QuadratureResult};
pub use params::{
    analyze_pole_structure, classify_existence, enumerate_poles, CaseTag, ContourChoice,
    ExistenceVerdict, GammaParam, HParams, Invariants, LoopSide, Pole, PoleFamily, PoleStructure,
    RawParams, DEFAULT_MAX_SHIFT,
};
pub use reductions::{corpus, known_case_value, KnownCase};
pub use series::{
    coeff_log_a, coeff_log_b, coeff_simple_a, coeff_simple_b, evaluate, evaluate_batch,
    expand_near_infinity, expand_near_zero, leading_term, AsymptoticTerm, EvalReport,
    ExpansionPoint, SeriesExpansion, SeriesTerm,
};
