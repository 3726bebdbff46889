//! Hankel forms `q[g,g] = Σ q_{n+m} g_m ḡ_n` built from power moments of a
//! measure on the real line.
//!
//! Such a form is closable exactly when `q_n → 0`, which for a nonnegative
//! measure means `supp M ⊂ [-1, 1]` with no mass at `±1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::closability::{ClosabilityVerdict, Evidence, Status};
use crate::error::{Error, Result};
use crate::measures::NEGATIVE_SAMPLE_TOLERANCE;
use crate::psd::{self, Factorization, PsdPolicy};
use crate::quadrature::gauss_legendre;
use crate::toeplitz::{FiniteVector, PsdReport, FORM_IMAG_TOLERANCE};

/// Atoms within this distance of `±1` sit on the endpoint.
pub const ENDPOINT_TOLERANCE: f64 = 1e-12;

/// Largest Gauss–Legendre rule used per density piece.
pub const MAX_RULE_POINTS: usize = 4096;

/// Moment count used by [`hankel_classify`] for its decay diagnostic.
pub const DIAGNOSTIC_ORDER: usize = 512;

/// Piecewise-linear density on `[a, b]` with samples at equally spaced nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineDensity {
    pub a: f64,
    pub b: f64,
    pub samples: Vec<f64>,
}

impl LineDensity {
    pub fn node(&self, i: usize) -> f64 {
        let n = self.samples.len() - 1;
        if i == n {
            self.b
        } else {
            self.a + (self.b - self.a) * i as f64 / n as f64
        }
    }

    fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        (0..self.samples.len() - 1).map(move |i| {
            (
                self.node(i),
                self.node(i + 1),
                self.samples[i].max(0.0),
                self.samples[i + 1].max(0.0),
            )
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineAtom {
    pub x: f64,
    pub mass: f64,
}

/// A measure on ℝ: an optional density on a bounded interval plus point masses.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LineMeasure {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ac: Option<LineDensity>,
    #[serde(default)]
    pub atoms: Vec<LineAtom>,
}

impl LineMeasure {
    /// Density `1/(b-a)` on `[a, b]`.
    pub fn uniform(a: f64, b: f64) -> Self {
        let h = 1.0 / (b - a);
        LineMeasure {
            ac: Some(LineDensity {
                a,
                b,
                samples: vec![h, h],
            }),
            atoms: Vec::new(),
        }
    }

    pub fn atom(x: f64, mass: f64) -> Self {
        LineMeasure {
            ac: None,
            atoms: vec![LineAtom { x, mass }],
        }
    }

    pub fn with_atom(mut self, x: f64, mass: f64) -> Self {
        self.atoms.push(LineAtom { x, mass });
        self
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: LineMeasure = serde_json::from_str(text).map_err(|e| Error::InvalidMeasure(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(d) = &self.ac {
            if !(d.a.is_finite() && d.b.is_finite() && d.a < d.b) {
                return Err(Error::InvalidMeasure(format!(
                    "density interval [{}, {}] is empty",
                    d.a, d.b
                )));
            }
            if d.samples.len() < 2 {
                return Err(Error::InvalidMeasure("density needs at least two samples".into()));
            }
            if let Some(v) = d
                .samples
                .iter()
                .find(|v| !v.is_finite() || **v < -NEGATIVE_SAMPLE_TOLERANCE)
            {
                return Err(Error::InvalidMeasure(format!("density sample {v} is negative")));
            }
        }
        for a in &self.atoms {
            if !a.x.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom position {} is not finite", a.x)));
            }
            if !(a.mass.is_finite() && a.mass > 0.0) {
                return Err(Error::InvalidMeasure(format!("atom mass must be > 0, got {}", a.mass)));
            }
        }
        for (i, a) in self.atoms.iter().enumerate() {
            if self.atoms[i + 1..].iter().any(|b| b.x == a.x) {
                return Err(Error::InvalidMeasure(format!("duplicate atom at {}", a.x)));
            }
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        power_moments(self, 0).map(|q| q.moments[0]).unwrap_or(f64::NAN)
    }
}

/// `q_0, …, q_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    pub moments: Vec<f64>,
}

impl MomentSequence {
    pub fn new(moments: Vec<f64>) -> Result<Self> {
        if moments.is_empty() {
            return Err(Error::InvalidArgument("moment sequence is empty".into()));
        }
        Ok(MomentSequence { moments })
    }

    pub fn n_max(&self) -> usize {
        self.moments.len() - 1
    }

    pub fn get(&self, n: usize) -> f64 {
        self.moments[n]
    }

    /// `H_{nm} = q_{n+m}` for `0 ≤ n, m < order`.
    pub fn hankel_matrix(&self, order: usize) -> Result<DMatrix<f64>> {
        let need = 2 * order.saturating_sub(1);
        if order == 0 || self.n_max() < need {
            return Err(Error::InsufficientCutoff {
                available: self.n_max(),
                required: need,
            });
        }
        Ok(DMatrix::from_fn(order, order, |i, j| self.moments[i + j]))
    }
}

/// `q_n = ∫ x^n dM(x)` for `0 ≤ n ≤ N`.
///
/// The density is integrated piece by piece with a Gauss–Legendre rule that
/// is exact for polynomials of degree `N + 1`; atoms are summed directly.
pub fn power_moments(measure: &LineMeasure, n_max: usize) -> Result<MomentSequence> {
    measure.validate()?;
    let mut q = vec![0.0; n_max + 1];
    if let Some(d) = &measure.ac {
        let points = n_max / 2 + 2;
        if points > MAX_RULE_POINTS {
            return Err(Error::Resolution {
                grid: 2 * MAX_RULE_POINTS - 1,
                frequency: n_max + 1,
                required: 2 * points - 1,
            });
        }
        let (nodes, weights) = gauss_legendre(points);
        for (x0, x1, s0, s1) in d.pieces() {
            if s0 == 0.0 && s1 == 0.0 {
                continue;
            }
            let half = 0.5 * (x1 - x0);
            let mid = 0.5 * (x1 + x0);
            for (t, w) in nodes.iter().zip(&weights) {
                let x = mid + half * t;
                let dens = s0 + (s1 - s0) * 0.5 * (t + 1.0);
                let mut p = w * half * dens;
                for qn in q.iter_mut() {
                    *qn += p;
                    p *= x;
                }
            }
        }
    }
    for a in &measure.atoms {
        for (n, qn) in q.iter_mut().enumerate() {
            *qn += a.mass * a.x.powi(n as i32);
        }
    }
    MomentSequence::new(q)
}

/// `Σ_{n,m} q_{n+m} g_m ḡ_n` by the direct double sum.
pub fn hankel_form(q: &MomentSequence, g: &FiniteVector) -> Result<f64> {
    let len = g.len();
    if len == 0 {
        return Ok(0.0);
    }
    let need = 2 * (len - 1);
    if q.n_max() < need {
        return Err(Error::InsufficientCutoff {
            available: q.n_max(),
            required: need,
        });
    }
    let g = g.as_slice();
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale = 0.0f64;
    for (n, gn) in g.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (m, gm) in g.iter().enumerate() {
            row += gm * q.moments[n + m];
            scale += (q.moments[n + m] * gm.norm() * gn.norm()).abs();
        }
        total += row * gn.conj();
    }
    if total.im.abs() > FORM_IMAG_TOLERANCE * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NonRealForm {
            residue: total.im,
            tolerance: FORM_IMAG_TOLERANCE * scale,
        });
    }
    Ok(total.re)
}

/// Cholesky-based PSD test of the Hankel section `H_N`, with the same pivot
/// policy and certificate rules as the Toeplitz check.
pub fn hankel_psd_check(q: &MomentSequence, order: usize) -> Result<PsdReport> {
    hankel_psd_check_with(q, order, PsdPolicy::default())
}

pub fn hankel_psd_check_with(q: &MomentSequence, order: usize, policy: PsdPolicy) -> Result<PsdReport> {
    let h = q.hankel_matrix(order)?.map(|v| Complex64::new(v, 0.0));
    let tolerance = policy.tolerance(&h);
    match psd::semidefinite_cholesky(&h, tolerance) {
        Factorization::Semidefinite { min_pivot } => Ok(PsdReport {
            order,
            psd: true,
            tolerance,
            min_pivot,
            certificate: None,
            certificate_form: None,
        }),
        Factorization::Indefinite { pivot, .. } => {
            let (_, v) = psd::min_eigenpair(&h);
            let g = FiniteVector(v.iter().copied().collect());
            let form = hankel_form(q, &g)?;
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

/// A reason for non-closability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportViolation {
    EndpointAtom {
        x: f64,
        mass: f64,
    },
    AtomOutside {
        x: f64,
        mass: f64,
    },
    /// The density is positive somewhere on `(lo, hi)`, outside `[-1, 1]`.
    DensityOutside {
        lo: f64,
        hi: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentTrend {
    Decaying,
    NotDecaying,
    Inconclusive,
}

/// `q_n → 0` test over `0 ≤ n ≤ N`: with `s = N/8`, compare the tail sups
/// over `n ≥ s, 2s, 4s` against `max_{n<s}|q_n|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentDiagnostic {
    pub n_max: usize,
    pub tail_start: usize,
    pub early_level: f64,
    /// `None` where the moments overflowed.
    pub tail_sups: [Option<f64>; 3],
    /// First index whose moment is not finite.
    pub overflow_at: Option<usize>,
    pub nondecay_fraction: f64,
    pub trend: MomentTrend,
}

/// Default for [`MomentDiagnostic::nondecay_fraction`].
pub const NONDECAY_FRACTION: f64 = 0.5;

pub fn moment_diagnostic(q: &MomentSequence) -> Result<MomentDiagnostic> {
    let n_max = q.n_max();
    if n_max < 8 {
        return Err(Error::InsufficientCutoff {
            available: n_max,
            required: 8,
        });
    }
    let s = n_max / 8;
    let abs: Vec<f64> = q.moments.iter().map(|v| v.abs()).collect();
    let overflow_at = abs.iter().position(|v| !v.is_finite());
    let early_level = abs[..s].iter().copied().fold(0.0, f64::max);
    let sup_from = |start: usize| -> Option<f64> {
        match overflow_at {
            Some(_) => None,
            None => Some(abs[start..].iter().copied().fold(0.0, f64::max)),
        }
    };
    let tail_sups = [sup_from(s), sup_from(2 * s), sup_from(4 * s)];
    let threshold = NONDECAY_FRACTION * early_level;
    let trend = if overflow_at.is_some() {
        MomentTrend::NotDecaying
    } else {
        let t: Vec<f64> = tail_sups.iter().map(|v| v.unwrap_or(f64::INFINITY)).collect();
        if early_level == 0.0 && t.iter().all(|&v| v == 0.0) {
            MomentTrend::Decaying
        } else if t.iter().all(|&v| v >= threshold) {
            MomentTrend::NotDecaying
        } else if t[2] < threshold && t[0] > t[1] && t[1] > t[2] {
            MomentTrend::Decaying
        } else {
            MomentTrend::Inconclusive
        }
    };
    Ok(MomentDiagnostic {
        n_max,
        tail_start: s,
        early_level,
        tail_sups,
        overflow_at,
        nondecay_fraction: NONDECAY_FRACTION,
        trend,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportEvidence {
    pub violations: Vec<SupportViolation>,
    pub moments: MomentDiagnostic,
    /// The moment diagnostic does not contradict the support verdict.
    pub agrees: bool,
}

fn support_violations(measure: &LineMeasure) -> Vec<SupportViolation> {
    let mut out = Vec::new();
    for a in &measure.atoms {
        if (a.x - 1.0).abs() < ENDPOINT_TOLERANCE || (a.x + 1.0).abs() < ENDPOINT_TOLERANCE {
            out.push(SupportViolation::EndpointAtom { x: a.x, mass: a.mass });
        } else if a.x.abs() > 1.0 {
            out.push(SupportViolation::AtomOutside { x: a.x, mass: a.mass });
        }
    }
    if let Some(d) = &measure.ac {
        for (x0, x1, s0, s1) in d.pieces() {
            if s0 == 0.0 && s1 == 0.0 {
                continue;
            }
            // A linear piece vanishes on at most one point, so it is positive
            // on all of the open piece unless both ends are zero.
            if x0 < -1.0 {
                out.push(SupportViolation::DensityOutside {
                    lo: x0,
                    hi: x1.min(-1.0),
                });
            }
            if x1 > 1.0 {
                out.push(SupportViolation::DensityOutside {
                    lo: x0.max(1.0),
                    hi: x1,
                });
            }
        }
    }
    out
}

/// Closable iff `supp M ⊂ [-1, 1]` and `M({±1}) = 0`, reported with the
/// `q_n → 0` diagnostic over `N = 512` moments.
pub fn hankel_classify(measure: &LineMeasure) -> Result<ClosabilityVerdict> {
    hankel_classify_with(measure, DIAGNOSTIC_ORDER)
}

pub fn hankel_classify_with(measure: &LineMeasure, n_max: usize) -> Result<ClosabilityVerdict> {
    measure.validate()?;
    let violations = support_violations(measure);
    let status = if violations.is_empty() {
        Status::Closable
    } else {
        Status::NotClosable
    };
    let moments = moment_diagnostic(&power_moments(measure, n_max)?)?;
    let agrees = !matches!(
        (status, moments.trend),
        (Status::Closable, MomentTrend::NotDecaying) | (Status::NotClosable, MomentTrend::Decaying)
    );
    Ok(ClosabilityVerdict {
        status,
        evidence: Evidence::Support(SupportEvidence {
            violations,
            moments,
            agrees,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_moments() {
        let q = power_moments(&LineMeasure::uniform(-1.0, 1.0), 200).unwrap();
        for (n, v) in q.moments.iter().enumerate() {
            let want = if n % 2 == 0 { 1.0 / (n as f64 + 1.0) } else { 0.0 };
            assert!((v - want).abs() < 1e-13, "n={n}: {v} vs {want}");
        }
    }

    #[test]
    fn atom_moments_are_exact() {
        let q = power_moments(&LineMeasure::atom(2.0, 1.0), 60).unwrap();
        for (n, v) in q.moments.iter().enumerate() {
            assert_eq!(*v, (1u64 << n) as f64);
        }
        let q = power_moments(&LineMeasure::atom(1.0, 1.0), 60).unwrap();
        assert!(q.moments.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn piecewise_linear_density_moments() {
        // density x on [0, 1]: q_n = 1/(n+2)
        let m = LineMeasure {
            ac: Some(LineDensity {
                a: 0.0,
                b: 1.0,
                samples: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            }),
            atoms: vec![],
        };
        let q = power_moments(&m, 40).unwrap();
        for (n, v) in q.moments.iter().enumerate() {
            assert!((v - 1.0 / (n as f64 + 2.0)).abs() < 1e-14);
        }
    }

    #[test]
    fn form_examples() {
        let g = FiniteVector::new(vec![Complex64::new(0.5, 1.0), 2.0.into(), Complex64::new(0.0, -1.0)]);
        let at0 = power_moments(&LineMeasure::atom(0.0, 1.0), 4).unwrap();
        assert!((hankel_form(&at0, &g).unwrap() - g.as_slice()[0].norm_sqr()).abs() < 1e-15);
        let at1 = power_moments(&LineMeasure::atom(1.0, 1.0), 4).unwrap();
        let s: Complex64 = g.as_slice().iter().sum();
        assert!((hankel_form(&at1, &g).unwrap() - s.norm_sqr()).abs() < 1e-14);
        let uni = power_moments(&LineMeasure::uniform(-1.0, 1.0), 2).unwrap();
        let v = hankel_form(&uni, &FiniteVector::from_real(&[1.0, 1.0])).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-15);
        assert!(hankel_form(&uni, &g).is_err());
    }

    #[test]
    fn classification_examples() {
        let v = hankel_classify(&LineMeasure::uniform(-1.0, 1.0)).unwrap();
        assert_eq!(v.status, Status::Closable);
        for x in [1.0, -1.0, 2.0, -3.5] {
            let v = hankel_classify(&LineMeasure::atom(x, 1.0)).unwrap();
            assert_eq!(v.status, Status::NotClosable, "x = {x}");
            let Evidence::Support(e) = v.evidence else { panic!() };
            assert!(e.agrees);
            assert_eq!(e.moments.trend, MomentTrend::NotDecaying);
        }
        let inner = LineMeasure::uniform(-1.0, 1.0)
            .with_atom(0.5, 2.0)
            .with_atom(-0.99, 0.1);
        let v = hankel_classify(&inner).unwrap();
        assert_eq!(v.status, Status::Closable);
        let Evidence::Support(e) = v.evidence else { panic!() };
        assert!(e.agrees);
    }

    #[test]
    fn density_outside_interval() {
        let wide = LineMeasure::uniform(-1.0, 1.5);
        let v = hankel_classify(&wide).unwrap();
        assert_eq!(v.status, Status::NotClosable);
        // zero density beyond 1 is not support
        let m = LineMeasure {
            ac: Some(LineDensity {
                a: -1.0,
                b: 3.0,
                samples: vec![1.0, 1.0, 0.0, 0.0, 0.0],
            }),
            atoms: vec![],
        };
        assert_eq!(hankel_classify(&m).unwrap().status, Status::Closable);
    }

    #[test]
    fn sections_are_psd() {
        for m in [
            LineMeasure::uniform(-1.0, 1.0),
            LineMeasure::atom(1.0, 1.0),
            LineMeasure::atom(2.0, 1.0),
            LineMeasure::uniform(-0.5, 2.0).with_atom(-1.0, 0.3),
        ] {
            let q = power_moments(&m, 30).unwrap();
            let rep = hankel_psd_check(&q, 16).unwrap();
            assert!(rep.psd);
        }
        let bad = MomentSequence::new(vec![1.0, 2.0, 1.0]).unwrap();
        let rep = hankel_psd_check(&bad, 2).unwrap();
        assert!(!rep.psd);
        assert!(rep.certificate_form.unwrap() < 0.0);
    }

    #[test]
    fn json_schema() {
        let text = r#"{"ac": {"a": -1.0, "b": 1.0, "samples": [0.5, 0.5]}, "atoms": [{"x": 1.0, "mass": 0.25}]}"#;
        let m = LineMeasure::from_json(text).unwrap();
        assert_eq!(m.atoms.len(), 1);
        let back: LineMeasure = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert!(LineMeasure::from_json(r#"{"atoms": [{"x": 1.0, "mass": -1.0}]}"#).is_err());
        assert!(LineMeasure::from_json(r#"{"ac": {"a": 1.0, "b": 1.0, "samples": [1.0, 1.0]}}"#).is_err());
    }
}
