//! Closability of semibounded Toeplitz forms.
//!
//! A form `t[g,g] ≥ γ‖g‖²` with `t_n = ∫ z^{-n} dM` is closable in `ℓ²(ℤ₊)`
//! exactly when `dM` is absolutely continuous. This module applies that
//! criterion to explicit measures, runs the coefficient-level diagnostics
//! (decay is necessary, square summability sufficient, and nothing in
//! between is decidable from finitely many entries), builds explicit
//! witnesses of non-closability for atoms, and evaluates the sequence
//! `u_n = ∫ u z^{-n} dM` that defines the adjoint of `g ↦ Σ g_n z^n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{self, adequate_grid, coefficient_table, Atom, CircleMeasure, CoeffSequence};
use crate::quadrature;
use crate::toeplitz::{quadratic_form_direct, FiniteVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Closable,
    NotClosable,
    Indeterminate,
}

/// Why a verdict was reached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Evidence {
    /// The measure is `w dm`; `w ≥ gamma_floor` on the grid.
    Symbol { description: String, gamma_floor: f64 },
    /// Nonzero singular part: atoms and/or a Cantor component.
    SingularPart { atoms: Vec<Atom>, cantor_mass: f64 },
    /// Coefficient-level statistics.
    Decay(DecayStats),
    /// Hankel forms: support relative to `[-1, 1]` plus the moment diagnostic.
    Support(crate::hankel::SupportEvidence),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosabilityVerdict {
    pub status: Status,
    pub evidence: Evidence,
}

impl ClosabilityVerdict {
    pub fn is_closable(&self) -> bool {
        self.status == Status::Closable
    }
}

/// Closability of the form generated by an explicit measure.
///
/// Closable iff there are no atoms and no Cantor mass; never indeterminate.
pub fn classify_measure(measure: &CircleMeasure, grid: usize) -> Result<ClosabilityVerdict> {
    measure.validate()?;
    if measure.is_absolutely_continuous() {
        let (description, gamma_floor) = match measure.symbol() {
            Some(sym) => (format!("w = {}", sym.describe()), measures::gamma_floor(measure, grid)?),
            None => ("w = 0".to_string(), 0.0),
        };
        Ok(ClosabilityVerdict {
            status: Status::Closable,
            evidence: Evidence::Symbol {
                description,
                gamma_floor,
            },
        })
    } else {
        Ok(ClosabilityVerdict {
            status: Status::NotClosable,
            evidence: Evidence::SingularPart {
                atoms: measure.atoms().to_vec(),
                cantor_mass: measure.cantor_mass(),
            },
        })
    }
}

/// Thresholds for [`decay_diagnostics`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayPolicy {
    /// A tail sup at least this fraction of the early level counts as "not decreasing".
    pub nondecay_fraction: f64,
    /// Tail `ℓ²` share below which the sequence counts as square summable.
    pub l2_tail_share: f64,
    /// Early levels below `noise_floor·|t_0|` are treated as zero.
    pub noise_floor: f64,
}

impl Default for DecayPolicy {
    fn default() -> Self {
        DecayPolicy {
            nondecay_fraction: 0.5,
            l2_tail_share: 1e-6,
            noise_floor: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayStats {
    pub tail_start: usize,
    pub n_max: usize,
    /// `max_{1≤n<s} |t_n|` (or `|t_0|` when `s = 1`).
    pub early_level: f64,
    /// `max_{n ≥ s}|t_n|`, `max_{n ≥ 2s}|t_n|`, `max_{n ≥ 4s}|t_n|` over the computed range.
    pub tail_sups: [f64; 3],
    /// Index attaining the last tail sup.
    pub tail_argmax: usize,
    /// `Σ_{|n|≥s}|t_n|² / Σ_n |t_n|²`.
    pub tail_l2_share: f64,
    pub policy: DecayPolicy,
}

pub fn decay_diagnostics(coeffs: &CoeffSequence, tail_start: usize) -> Result<ClosabilityVerdict> {
    decay_diagnostics_with(coeffs, tail_start, DecayPolicy::default())
}

/// Coefficient-level closability evidence.
///
/// `NotClosable` when the tail sup stays within `nondecay_fraction` of the
/// early level over two doublings of the tail start (decay to zero is
/// necessary); `Closable` when the tail carries less than `l2_tail_share` of
/// the `ℓ²` mass (square summability is sufficient); `Indeterminate` otherwise.
pub fn decay_diagnostics_with(
    coeffs: &CoeffSequence,
    tail_start: usize,
    policy: DecayPolicy,
) -> Result<ClosabilityVerdict> {
    if tail_start == 0 {
        return Err(Error::InvalidArgument("tail start must be at least 1".into()));
    }
    let n_max = coeffs.n_max();
    if 4 * tail_start > n_max {
        return Err(Error::InsufficientCutoff {
            available: n_max,
            required: 4 * tail_start,
        });
    }
    let abs: Vec<f64> = coeffs.one_sided().iter().map(|c| c.norm()).collect();
    let t0 = abs[0];
    let early_level = if tail_start == 1 {
        t0
    } else {
        abs[1..tail_start].iter().copied().fold(0.0, f64::max)
    };
    let tail_sup = |from: usize| -> (f64, usize) {
        abs[from..].iter().enumerate().fold(
            (0.0, from),
            |(best, at), (i, &v)| if v > best { (v, from + i) } else { (best, at) },
        )
    };
    let (s0, _) = tail_sup(tail_start);
    let (s1, _) = tail_sup(2 * tail_start);
    let (s2, argmax) = tail_sup(4 * tail_start);

    let tail_mass: f64 = 2.0 * abs[tail_start..].iter().map(|v| v * v).sum::<f64>();
    let total = t0 * t0 + 2.0 * abs[1..].iter().map(|v| v * v).sum::<f64>();
    let tail_l2_share = if total > 0.0 { tail_mass / total } else { 0.0 };

    let significant = early_level > policy.noise_floor * t0 && early_level > 0.0;
    let nondecaying =
        significant && s1 >= policy.nondecay_fraction * early_level && s2 >= policy.nondecay_fraction * early_level;
    let status = if nondecaying {
        Status::NotClosable
    } else if tail_l2_share < policy.l2_tail_share {
        Status::Closable
    } else {
        Status::Indeterminate
    };
    Ok(ClosabilityVerdict {
        status,
        evidence: Evidence::Decay(DecayStats {
            tail_start,
            n_max,
            early_level,
            tail_sups: [s0, s1, s2],
            tail_argmax: argmax,
            tail_l2_share,
            policy,
        }),
    })
}

/// Numbers exhibiting non-closability along the canonical witness sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub k: usize,
    pub l: usize,
    /// The atom the witness concentrates on.
    pub atom: Atom,
    /// `‖g^(k)‖²`.
    pub norm_sq_k: f64,
    /// `t[g^(k), g^(k)]`.
    pub form_k: f64,
    /// `t[g^(k) - g^(l), g^(k) - g^(l)]`.
    pub form_diff: f64,
}

impl WitnessReport {
    /// `t[g^(k)] / ‖g^(k)‖²`, which grows like `k·μ`.
    pub fn rayleigh_k(&self) -> f64 {
        self.form_k / self.norm_sq_k
    }
}

/// `g_n = e^{-inθ₀}/k` for `n < k`: unit value of `Σ g_n z^n` at the atom, norm `k^{-1/2}`.
pub fn witness_vector(atom: &Atom, k: usize) -> FiniteVector {
    let inv = 1.0 / k as f64;
    FiniteVector(
        (0..k)
            .map(|n| {
                let (s, c) = (n as f64 * atom.angle).sin_cos();
                Complex64::new(c * inv, -s * inv)
            })
            .collect(),
    )
}

/// Evaluate the witness sequence at `k` and `l` for the heaviest atom of `measure`.
///
/// The coefficient grid is raised as needed to resolve `max(k, l)`.
pub fn nonclosability_witness(measure: &CircleMeasure, k: usize, l: usize, grid: usize) -> Result<WitnessReport> {
    measure.validate()?;
    if k == 0 || l == 0 || k == l {
        return Err(Error::InvalidArgument(format!(
            "witness needs distinct k, l >= 1 (got k={k}, l={l})"
        )));
    }
    let atom = *measure
        .atoms()
        .iter()
        .reduce(|a, b| if b.mass > a.mass { b } else { a })
        .ok_or_else(|| Error::NotApplicable("measure has no atom to build a witness on".into()))?;
    let cutoff = k.max(l) - 1;
    let coeffs = coefficient_table(measure, cutoff, adequate_grid(cutoff, grid))?;
    let gk = witness_vector(&atom, k);
    let gl = witness_vector(&atom, l);
    Ok(WitnessReport {
        k,
        l,
        atom,
        norm_sq_k: gk.norm_sqr(),
        form_k: quadratic_form_direct(&coeffs, &gk)?,
        form_diff: quadratic_form_direct(&coeffs, &gk.sub(&gl))?,
    })
}

/// Threshold for the `𝒟*` membership heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembershipPolicy {
    /// Maximum share of `Σ|u_n|²` allowed in the last quarter of the computed indices.
    pub tail_ratio: f64,
}

impl Default for MembershipPolicy {
    fn default() -> Self {
        MembershipPolicy { tail_ratio: 1e-4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjointReport {
    /// `u_0 … u_N`.
    pub coefficients: Vec<Complex64>,
    /// Share of `Σ|u_n|²` carried by the last quarter of indices.
    pub tail_ratio: f64,
    /// Heuristic: the prefix looks square summable.
    pub plausibly_in_domain: bool,
    pub policy: MembershipPolicy,
}

pub fn adjoint_coefficients(
    u: &[Complex64],
    measure: &CircleMeasure,
    n_max: usize,
    grid: usize,
) -> Result<AdjointReport> {
    adjoint_coefficients_with(u, measure, n_max, grid, MembershipPolicy::default())
}

/// `u_n = ∫ u(z) z^{-n} dM(z)` for `0 ≤ n ≤ n_max`.
///
/// `u` is given by samples on the uniform grid of size `G_u = u.len()` and is
/// read as its trigonometric interpolant `Σ_j û_j z^j`, `-G_u/2 ≤ j < G_u/2`.
/// Then `u_n = Σ_j û_j t_{n-j}`, which handles every component of the
/// measure (atoms and Cantor part included) through its coefficients.
pub fn adjoint_coefficients_with(
    u: &[Complex64],
    measure: &CircleMeasure,
    n_max: usize,
    grid: usize,
    policy: MembershipPolicy,
) -> Result<AdjointReport> {
    measure.validate()?;
    if u.is_empty() {
        return Err(Error::InvalidArgument("u needs at least one sample".into()));
    }
    let gu = u.len();
    let mut spectrum = u.to_vec();
    quadrature::fft_forward(&mut spectrum);
    let modes: Vec<(i64, Complex64)> = spectrum
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| {
            let j = if k < gu.div_ceil(2) {
                k as i64
            } else {
                k as i64 - gu as i64
            };
            (j, c / gu as f64)
        })
        .collect();
    let reach = n_max + gu / 2 + 1;
    let coeffs = coefficient_table(measure, reach, adequate_grid(reach, grid))?;
    let coefficients: Vec<Complex64> = (0..=n_max as i64)
        .map(|n| modes.iter().map(|&(j, c)| c * coeffs.get(n - j)).sum())
        .collect();

    let total: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
    let start = (3 * (n_max + 1)).div_ceil(4);
    let tail: f64 = coefficients[start.min(n_max)..].iter().map(|c| c.norm_sqr()).sum();
    let tail_ratio = if total > 0.0 { tail / total } else { 0.0 };
    Ok(AdjointReport {
        coefficients,
        tail_ratio,
        plausibly_in_domain: tail_ratio < policy.tail_ratio,
        policy,
    })
}
