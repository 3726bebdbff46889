//! Semibounded Toeplitz quadratic forms `t[g,g] = Σ t_{n-m} g_m ḡ_n` on
//! `ℓ²(ℤ₊)` with entries `t_n = ∫ z^{-n} dM(z)` from a measure on the unit
//! circle.
//!
//! The crate builds the entries from explicit measures, evaluates and
//! spectrally analyzes finite sections, decides closability, constructs
//! non-closability witnesses, evaluates the closed form for absolutely
//! continuous symbols and runs the companion Hankel computations on ℝ.

pub mod closability;
pub mod closure;
pub mod error;
pub mod hankel;
pub mod measures;
pub mod psd;
pub mod quadrature;
pub mod toeplitz;

pub use closability::{
    adjoint_coefficients, classify_measure, decay_diagnostics, nonclosability_witness, witness_vector,
    ClosabilityVerdict, Evidence, Status,
};
pub use closure::{
    analytic_extension_eval, closed_form_eval, laurent_form_eval, muckenhoupt_estimate, riesz_project, weighted_ratio,
    A2Verdict, BilateralVector,
};
pub use error::{Error, Result};
pub use hankel::{hankel_classify, hankel_form, power_moments, LineMeasure, MomentSequence};
pub use measures::{
    coefficient_table, fourier_coefficient, gamma_floor, Atom, Builtin, CircleMeasure, CoeffSequence, Symbol,
    SymbolTerm, DEFAULT_GRID,
};
pub use psd::PsdPolicy;
pub use toeplitz::{
    psd_check, quadratic_form_direct, section_min_eig, toeplitz_apply, FiniteSection, FiniteVector, PsdReport,
};
