//! Toeplitz quadratic forms, operator action and finite sections.
//!
//! For a Hermitian sequence `t_n` the form on finitely supported `g` is
//! `t[g,g] = Σ_{n,m≥0} t_{n-m} g_m conj(g_n)` and the operator acts as
//! `(Tg)_n = Σ_m t_{n-m} g_m`.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::CoeffSequence;
use crate::psd::{self, Factorization, PsdPolicy};
use crate::quadrature;

/// Relative bound on the imaginary residue of a form value, scaled by `‖g‖²·t_0`.
pub const FORM_IMAG_TOLERANCE: f64 = 1e-10;

/// A finitely supported sequence `g_0 … g_{L-1}`, implicitly zero beyond.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteVector(pub Vec<Complex64>);

impl FiniteVector {
    pub fn new(values: Vec<Complex64>) -> Self {
        FiniteVector(values)
    }

    pub fn from_real(values: &[f64]) -> Self {
        FiniteVector(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `e_k` padded to length `len`.
    pub fn basis(k: usize, len: usize) -> Self {
        let mut v = vec![Complex64::new(0.0, 0.0); len.max(k + 1)];
        v[k] = Complex64::new(1.0, 0.0);
        FiniteVector(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Componentwise difference, padding the shorter operand with zeros.
    pub fn sub(&self, other: &FiniteVector) -> FiniteVector {
        let len = self.len().max(other.len());
        let zero = Complex64::new(0.0, 0.0);
        FiniteVector(
            (0..len)
                .map(|i| *self.0.get(i).unwrap_or(&zero) - *other.0.get(i).unwrap_or(&zero))
                .collect(),
        )
    }

    /// `Σ_n a_n conj(b_n)`.
    pub fn inner(&self, other: &FiniteVector) -> Complex64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum()
    }
}

impl From<Vec<Complex64>> for FiniteVector {
    fn from(v: Vec<Complex64>) -> Self {
        FiniteVector(v)
    }
}

/// `t[g,g]` by the direct double sum.
pub fn quadratic_form_direct(coeffs: &CoeffSequence, g: &FiniteVector) -> Result<f64> {
    let len = g.len();
    if len == 0 {
        return Ok(0.0);
    }
    coeffs.require(len - 1)?;
    let gs = g.as_slice();
    let mut total = Complex64::new(0.0, 0.0);
    for (n, gn) in gs.iter().enumerate() {
        let row: Complex64 = gs
            .iter()
            .enumerate()
            .map(|(m, gm)| coeffs.get(n as i64 - m as i64) * gm)
            .sum();
        total += gn.conj() * row;
    }
    let scale = coeffs.one_sided()[..len]
        .iter()
        .map(|c| c.norm())
        .fold(coeffs.t0().abs(), f64::max);
    let tolerance = FORM_IMAG_TOLERANCE * g.norm_sqr() * scale;
    if total.im.abs() > tolerance {
        return Err(Error::NonRealForm {
            residue: total.im.abs(),
            tolerance,
        });
    }
    Ok(total.re)
}

/// `(Tg)_n` for `n < out_len`, by circulant embedding into an FFT of the
/// next power of two `≥ out_len + L - 1`.
pub fn toeplitz_apply(coeffs: &CoeffSequence, g: &FiniteVector, out_len: usize) -> Result<FiniteVector> {
    let len = g.len();
    let zero = Complex64::new(0.0, 0.0);
    if len == 0 || out_len == 0 {
        return Ok(FiniteVector(vec![zero; out_len]));
    }
    coeffs.require(out_len.max(len) - 1)?;
    let size = (out_len + len - 1).next_power_of_two();
    let mut column = vec![zero; size];
    for (d, c) in column.iter_mut().enumerate().take(out_len) {
        *c = coeffs.get(d as i64);
    }
    for d in 1..len {
        column[size - d] = coeffs.get(-(d as i64));
    }
    let mut x = vec![zero; size];
    x[..len].copy_from_slice(g.as_slice());
    quadrature::fft_forward(&mut column);
    quadrature::fft_forward(&mut x);
    for (a, b) in x.iter_mut().zip(&column) {
        *a *= b;
    }
    quadrature::fft_inverse(&mut x);
    let scale = 1.0 / size as f64;
    Ok(FiniteVector(x[..out_len].iter().map(|z| z * scale).collect()))
}

/// The `N×N` section `T_N` with entries `t_{i-j}`.
#[derive(Debug)]
pub struct FiniteSection {
    matrix: DMatrix<Complex64>,
    min_eig: OnceLock<f64>,
}

impl FiniteSection {
    pub fn new(coeffs: &CoeffSequence, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("section order must be positive".into()));
        }
        coeffs.require(order - 1)?;
        let matrix = DMatrix::from_fn(order, order, |i, j| coeffs.get(i as i64 - j as i64));
        Ok(FiniteSection {
            matrix,
            min_eig: OnceLock::new(),
        })
    }

    pub fn order(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Smallest eigenvalue, computed once.
    pub fn min_eigenvalue(&self) -> f64 {
        *self.min_eig.get_or_init(|| psd::min_eigenvalue(&self.matrix))
    }
}

/// `λ_min(T_N)`.
pub fn section_min_eig(coeffs: &CoeffSequence, order: usize) -> Result<f64> {
    Ok(FiniteSection::new(coeffs, order)?.min_eigenvalue())
}

/// Outcome of [`psd_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    pub order: usize,
    pub psd: bool,
    /// Threshold below which a Cholesky pivot counts as negative.
    pub tolerance: f64,
    /// Smallest pivot reached (the failing one, if any).
    pub min_pivot: f64,
    /// A vector with `t[g,g] < 0`, present exactly when `psd` is false.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<FiniteVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate_form: Option<f64>,
}

/// Cholesky-based PSD test of `T_N` with the default pivot policy.
pub fn psd_check(coeffs: &CoeffSequence, order: usize) -> Result<PsdReport> {
    psd_check_with(coeffs, order, PsdPolicy::default())
}

/// Cholesky-based PSD test of `T_N`. On failure the eigenvector of the
/// smallest eigenvalue is returned as a certificate and its form value is
/// re-evaluated by the direct double sum; a certificate that does not come
/// out negative means the pivot failure was rounding, and the section passes.
pub fn psd_check_with(coeffs: &CoeffSequence, order: usize, policy: PsdPolicy) -> Result<PsdReport> {
    let section = FiniteSection::new(coeffs, order)?;
    let tolerance = policy.tolerance(section.matrix());
    match psd::semidefinite_cholesky(section.matrix(), tolerance) {
        Factorization::Semidefinite { min_pivot } => Ok(PsdReport {
            order,
            psd: true,
            tolerance,
            min_pivot,
            certificate: None,
            certificate_form: None,
        }),
        Factorization::Indefinite { pivot, .. } => {
            let (_, v) = psd::min_eigenpair(section.matrix());
            let g = FiniteVector(v.iter().copied().collect());
            let form = quadratic_form_direct(coeffs, &g)?;
            let negative = form < 0.0;
            Ok(PsdReport {
                order,
                psd: !negative,
                tolerance,
                min_pivot: pivot,
                certificate: negative.then_some(g),
                certificate_form: negative.then_some(form),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{coefficient_table, CircleMeasure, SymbolTerm, DEFAULT_GRID};

    fn ones(n: usize) -> CoeffSequence {
        CoeffSequence::from_real(&vec![1.0; n + 1]).unwrap()
    }

    fn lebesgue(n: usize) -> CoeffSequence {
        coefficient_table(&CircleMeasure::lebesgue(), n, DEFAULT_GRID).unwrap()
    }

    #[test]
    fn identity_form_is_norm() {
        let g = FiniteVector::new(vec![Complex64::new(1.0, 2.0), Complex64::new(-0.5, 0.25), 3.0.into()]);
        let q = quadratic_form_direct(&lebesgue(4), &g).unwrap();
        assert!((q - g.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn averaging_vector_has_unit_form_for_all_ones() {
        let k = 37;
        let g = FiniteVector::from_real(&vec![1.0 / k as f64; k]);
        let q = quadratic_form_direct(&ones(k), &g).unwrap();
        assert!((q - 1.0).abs() < 1e-14);
    }

    #[test]
    fn small_hand_sum() {
        let c = CoeffSequence::from_real(&[2.0, 1.0]).unwrap();
        let q = quadratic_form_direct(&c, &FiniteVector::from_real(&[1.0, 1.0])).unwrap();
        assert_eq!(q, 6.0);
    }

    #[test]
    fn short_cutoff_is_an_error() {
        let c = CoeffSequence::from_real(&[2.0, 1.0]).unwrap();
        let g = FiniteVector::from_real(&[1.0, 1.0, 1.0]);
        assert!(matches!(
            quadratic_form_direct(&c, &g),
            Err(Error::InsufficientCutoff { .. })
        ));
        assert!(toeplitz_apply(&c, &g, 3).is_err());
        assert!(section_min_eig(&c, 3).is_err());
    }

    #[test]
    fn apply_examples() {
        let g = FiniteVector::from_real(&[0.5, -1.0, 2.0]);
        let out = toeplitz_apply(&lebesgue(4), &g, 3).unwrap();
        for (a, b) in out.as_slice().iter().zip(g.as_slice()) {
            assert!((a - b).norm() < 1e-15);
        }
        let col = toeplitz_apply(&ones(4), &FiniteVector::basis(0, 1), 4).unwrap();
        for z in col.as_slice() {
            assert!((z - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let c = CoeffSequence::from_real(&[2.0, 1.0, 0.0]).unwrap();
        let out = toeplitz_apply(&c, &FiniteVector::basis(0, 1), 3).unwrap();
        let want = [2.0, 1.0, 0.0];
        for (z, w) in out.as_slice().iter().zip(want) {
            assert!((z - Complex64::new(w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn min_eig_examples() {
        assert!((section_min_eig(&lebesgue(8), 9).unwrap() - 1.0).abs() < 1e-14);
        assert!(section_min_eig(&ones(8), 9).unwrap().abs() < 1e-13);
        let rc = coefficient_table(
            &CircleMeasure::absolutely_continuous(SymbolTerm::raised_cosine()),
            20,
            DEFAULT_GRID,
        )
        .unwrap();
        for n in [1usize, 2, 5, 21] {
            let want = 2.0 + 2.0 * (n as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos();
            assert!((section_min_eig(&rc, n).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn psd_examples() {
        assert!(psd_check(&ones(8), 8).unwrap().psd);
        assert!(psd_check(&lebesgue(8), 8).unwrap().psd);
        let c = CoeffSequence::from_real(&[1.0, 0.6]).unwrap();
        let mut padded = c.one_sided().to_vec();
        padded.resize(16, Complex64::new(0.0, 0.0));
        let c = CoeffSequence::new(padded).unwrap();
        let report = psd_check(&c, 16).unwrap();
        assert!(!report.psd);
        let g = report.certificate.unwrap();
        assert!(quadratic_form_direct(&c, &g).unwrap() < 0.0);
        assert!(report.certificate_form.unwrap() < -0.1);
    }

    #[test]
    fn section_is_hermitian_toeplitz() {
        let c = CoeffSequence::new(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(0.5, 0.7),
            Complex64::new(-0.1, 0.2),
        ])
        .unwrap();
        let s = FiniteSection::new(&c, 3).unwrap();
        let m = s.matrix();
        assert_eq!(m, &m.adjoint());
        assert_eq!(m[(1, 0)], m[(2, 1)]);
        assert_eq!(m[(1, 0)], c.get(1));
    }
}
