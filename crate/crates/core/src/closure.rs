//! The closed form for absolutely continuous symbols.
//!
//! With `dM = w dm` the form is `t[g,g] = ∫ |(𝒜g)(z)|² w(z) dm(z)` where
//! `(𝒜g)(z) = Σ_{n≥0} g_n z^n`. Under the A₂ condition on `w` the closure is
//! the same integral on every `g ∈ ℓ²` for which it is finite. This module
//! evaluates `𝒜g` (also inside the disc), the closed form and its
//! bilateral (Laurent) counterpart, estimates the A₂ characteristic on
//! dyadic arcs, and applies the Riesz projection `P₊` in weighted norms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{adequate_grid, Symbol, NEGATIVE_SAMPLE_TOLERANCE};
use crate::quadrature;
use crate::toeplitz::FiniteVector;

fn check_radius(r: f64) -> Result<()> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::InvalidArgument(format!("radius must lie in (0, 1], got {r}")));
    }
    Ok(())
}

/// Samples of `(𝒜g)(r e^{iθ_k})` on the uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticExtension {
    pub coefficients: FiniteVector,
    pub radius: f64,
    pub samples: Vec<Complex64>,
}

/// `Σ g_n r^n e^{inθ_k}` for `θ_k = 2πk/G`, by one inverse FFT.
///
/// Coefficients past the grid size are folded modulo `G`, which samples the
/// polynomial exactly; only the spectrum is lost, not the values.
pub fn analytic_extension_eval(g: &FiniteVector, r: f64, grid: usize) -> Result<AnalyticExtension> {
    check_radius(r)?;
    if grid == 0 {
        return Err(Error::InvalidArgument("grid size must be positive".into()));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    let mut scale = 1.0;
    for (n, &c) in g.as_slice().iter().enumerate() {
        buf[n % grid] += c * scale;
        scale *= r;
    }
    quadrature::fft_inverse(&mut buf);
    Ok(AnalyticExtension {
        coefficients: g.clone(),
        radius: r,
        samples: buf,
    })
}

/// `Σ g_n z^n` by Horner's rule.
pub fn polynomial_at(g: &[Complex64], z: Complex64) -> Complex64 {
    g.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// `∫ |Σ_n g_n (r e^{iθ})^n|² w dm`.
fn weighted_energy(symbol: &Symbol, g: &[Complex64], r: f64, grid: usize) -> Result<f64> {
    if g.is_empty() {
        return Ok(0.0);
    }
    let degree = g.len() - 1;
    let floor = adequate_grid(degree, grid).max((2 * (g.len() + symbol.trig_degree() + 1)).next_power_of_two());
    let split = symbol.split_rule(degree, floor)?;
    if split.grid < floor && split.uniform.is_some() {
        // Grid-sampled symbols bring their own grid; it has to resolve |𝒜g|².
        let required = floor.min(adequate_grid(degree, 1));
        if split.grid < required {
            return Err(Error::Resolution {
                grid: split.grid,
                frequency: degree,
                required,
            });
        }
    }
    let mut total = 0.0;
    if let Some(w) = &split.uniform {
        let ext = analytic_extension_eval(&FiniteVector(g.to_vec()), r, split.grid)?;
        let s: f64 = w.iter().zip(&ext.samples).map(|(w, a)| w * a.norm_sqr()).sum();
        total += s / split.grid as f64;
    }
    for (&theta, &weight) in split.graded.nodes.iter().zip(&split.graded.weights) {
        total += weight * polynomial_at(g, Complex64::from_polar(r, theta)).norm_sqr();
    }
    Ok(total)
}

/// `∫ |(𝒜g)(r e^{iθ})|² w(e^{iθ}) dm(θ)`.
///
/// At `r = 1` with finite `g` this is the closed form `t[g,g]`. `w` must be
/// nonnegative and not identically zero.
pub fn closed_form_eval(symbol: &Symbol, g: &FiniteVector, r: f64, grid: usize) -> Result<f64> {
    check_radius(r)?;
    symbol.validate(NEGATIVE_SAMPLE_TOLERANCE)?;
    let g_eff = symbol.effective_grid(grid)?;
    let samples = symbol.node_samples(g_eff)?;
    if samples.iter().all(|&v| v == 0.0) {
        return Err(Error::InvalidMeasure("weight vanishes identically".into()));
    }
    weighted_energy(symbol, g.as_slice(), r, grid)
}

/// Stabilization threshold for [`closed_form_ladder`].
pub const LADDER_STABILIZATION: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialLadder {
    /// `r_j = 1 - 2^{-j}` for `j = 1..=rungs`, then `r = 1`.
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Relative change between the last two interior rungs.
    pub last_relative_increment: f64,
    /// Diagnostic only: a finite integral cannot be certified from samples.
    pub stabilized: bool,
    pub tolerance: f64,
}

/// Closed-form values along `r_j = 1 - 2^{-j}`. For a truncated `ℓ²` input
/// the values are nondecreasing in `j` whenever the integrand's expansion
/// has nonnegative terms, and their stabilization indicates membership in
/// the form domain.
pub fn closed_form_ladder(symbol: &Symbol, g: &FiniteVector, rungs: usize, grid: usize) -> Result<RadialLadder> {
    if rungs < 2 {
        return Err(Error::InvalidArgument("ladder needs at least two rungs".into()));
    }
    let mut radii: Vec<f64> = (1..=rungs).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect();
    radii.push(1.0);
    let values = radii
        .iter()
        .map(|&r| closed_form_eval(symbol, g, r, grid))
        .collect::<Result<Vec<_>>>()?;
    let a = values[rungs - 2];
    let b = values[rungs - 1];
    let last_relative_increment = if b != 0.0 { (b - a).abs() / b.abs() } else { 0.0 };
    Ok(RadialLadder {
        radii,
        values,
        last_relative_increment,
        stabilized: last_relative_increment < LADDER_STABILIZATION,
        tolerance: LADDER_STABILIZATION,
    })
}

/// A finitely supported two-sided sequence: `values[j]` sits at index `offset + j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilateralVector {
    pub offset: i64,
    pub values: Vec<Complex64>,
}

impl BilateralVector {
    pub fn new(offset: i64, values: Vec<Complex64>) -> Self {
        BilateralVector { offset, values }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// `‖𝖠g‖²` in `L²(w dm)` with `(𝖠g)(z) = Σ_{n∈ℤ} g_n z^n`.
///
/// `|z^{offset}| = 1` on the circle, so the offset drops out and the value
/// is that of the one-sided polynomial built from `values`.
pub fn laurent_form_eval(symbol: &Symbol, g: &BilateralVector, grid: usize) -> Result<f64> {
    symbol.validate(NEGATIVE_SAMPLE_TOLERANCE)?;
    weighted_energy(symbol, &g.values, 1.0, grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum A2Verdict {
    Bounded,
    Diverging,
    Inconclusive,
}

/// Verdict thresholds for [`muckenhoupt_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuckenhouptPolicy {
    /// "bounded" when the last two levels differ by less than this, relatively.
    pub bounded_rel_change: f64,
    /// "diverging" when each of the last `diverging_run` ratios exceeds this.
    pub diverging_ratio: f64,
    pub diverging_run: usize,
}

impl Default for MuckenhouptPolicy {
    fn default() -> Self {
        MuckenhouptPolicy {
            bounded_rel_change: 0.05,
            diverging_ratio: 1.2,
            diverging_run: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuckenhouptLevel {
    pub level: usize,
    /// Grid cells per arc, `4·2^level`.
    pub arc_cells: usize,
    /// Normalized arc length `m(X)`.
    pub arc_measure: f64,
    /// `max_X m(X)^{-2} ∫_X w dm ∫_X w^{-1} dm` over the arcs of this level.
    pub estimate: f64,
    /// Start cell of the maximizing arc.
    pub argmax_start: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuckenhouptReport {
    pub grid: usize,
    pub levels: Vec<MuckenhouptLevel>,
    /// `E_{j+1}/E_j`.
    pub ratios: Vec<f64>,
    pub verdict: A2Verdict,
    pub policy: MuckenhouptPolicy,
}

impl MuckenhouptReport {
    pub fn estimates(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.estimate).collect()
    }
}

pub fn muckenhoupt_estimate(symbol: &Symbol, levels: usize, grid: usize) -> Result<MuckenhouptReport> {
    muckenhoupt_estimate_with(symbol, levels, grid, MuckenhouptPolicy::default())
}

/// Dyadic-arc estimates of the A₂ characteristic of `w`.
///
/// `w` is sampled once per grid cell (cell midpoints for closed-form terms).
/// Level `j` uses arcs of `4·2^j` cells: the aligned dyadic arcs and their
/// translates by half an arc. Levels run from the finest arcs upward, so an
/// A₂ weight gives a sequence that settles while a weight whose `w^{-1}` is
/// not integrable gives a sequence that keeps growing with the arc's
/// resolution. Arc sums are built by pairwise block summation and are
/// independent of evaluation order.
pub fn muckenhoupt_estimate_with(
    symbol: &Symbol,
    levels: usize,
    grid: usize,
    policy: MuckenhouptPolicy,
) -> Result<MuckenhouptReport> {
    symbol.validate(NEGATIVE_SAMPLE_TOLERANCE)?;
    let grid = symbol.effective_grid(grid)?;
    if !grid.is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "grid size {grid} is not a power of two"
        )));
    }
    if grid < 4 || levels + 2 > grid.trailing_zeros() as usize {
        return Err(Error::InvalidArgument(format!(
            "levels must not exceed log2(grid) - 2 = {}",
            (grid.trailing_zeros() as usize).saturating_sub(2)
        )));
    }
    let w = symbol.cell_samples(grid)?;
    if let Some(k) = w.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidMeasure(format!(
            "weight must be positive and finite at every cell, cell {k} has {}",
            w[k]
        )));
    }
    let inv: Vec<f64> = w.iter().map(|v| 1.0 / v).collect();

    // blocks[s] holds sums over aligned blocks of 2^s cells.
    let top = levels + 2;
    let mut wb = vec![w];
    let mut ib = vec![inv];
    for s in 1..=top {
        let pair = |prev: &Vec<f64>| prev.chunks(2).map(|c| c[0] + c[1]).collect::<Vec<f64>>();
        let nw = pair(&wb[s - 1]);
        let ni = pair(&ib[s - 1]);
        wb.push(nw);
        ib.push(ni);
    }

    let mut out = Vec::with_capacity(levels + 1);
    for level in 0..=levels {
        let s = level + 2;
        let cells = 1usize << s;
        let m2 = (cells as f64) * (cells as f64);
        let mut best = (0.0f64, 0usize);
        let mut consider = |wsum: f64, isum: f64, start: usize| {
            let e = wsum * isum / m2;
            if e > best.0 {
                best = (e, start);
            }
        };
        for (i, (a, b)) in wb[s].iter().zip(&ib[s]).enumerate() {
            consider(*a, *b, i * cells);
        }
        let half = &wb[s - 1];
        let half_inv = &ib[s - 1];
        let nh = half.len();
        for i in 0..(nh / 2) {
            let a = 2 * i + 1;
            let b = (2 * i + 2) % nh;
            consider(half[a] + half[b], half_inv[a] + half_inv[b], a * cells / 2);
        }
        out.push(MuckenhouptLevel {
            level,
            arc_cells: cells,
            arc_measure: cells as f64 / grid as f64,
            estimate: best.0,
            argmax_start: best.1,
        });
    }

    let estimates: Vec<f64> = out.iter().map(|l| l.estimate).collect();
    let ratios: Vec<f64> = estimates.windows(2).map(|p| p[1] / p[0]).collect();
    let verdict = classify_a2(&estimates, &ratios, &policy);
    Ok(MuckenhouptReport {
        grid,
        levels: out,
        ratios,
        verdict,
        policy,
    })
}

fn classify_a2(estimates: &[f64], ratios: &[f64], policy: &MuckenhouptPolicy) -> A2Verdict {
    let run = policy.diverging_run;
    if run > 0 && ratios.len() >= run && ratios[ratios.len() - run..].iter().all(|&q| q > policy.diverging_ratio) {
        return A2Verdict::Diverging;
    }
    if let [.., a, b] = estimates {
        if (b - a).abs() < policy.bounded_rel_change * a.abs() {
            return A2Verdict::Bounded;
        }
    }
    A2Verdict::Inconclusive
}

/// `P₊f`: keep the Fourier modes `0 ≤ k < G/2` of grid samples, drop the rest
/// (the Nyquist mode counts as negative).
pub fn riesz_project(f: &[Complex64]) -> Result<Vec<Complex64>> {
    let g = f.len();
    if g == 0 || g % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "projection needs an even grid, got {g}"
        )));
    }
    let mut buf = f.to_vec();
    quadrature::fft_forward(&mut buf);
    for c in &mut buf[g / 2..] {
        *c = Complex64::new(0.0, 0.0);
    }
    quadrature::fft_inverse(&mut buf);
    let scale = 1.0 / g as f64;
    Ok(buf.into_iter().map(|z| z * scale).collect())
}

/// `‖f‖_{L²(w dm)}` by the trapezoid rule on the grid of the samples.
pub fn weighted_norm(f: &[Complex64], weights: &[f64]) -> Result<f64> {
    if f.len() != weights.len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples but {} weights",
            f.len(),
            weights.len()
        )));
    }
    let s: f64 = f.iter().zip(weights).map(|(z, w)| w * z.norm_sqr()).sum();
    Ok((s / f.len() as f64).sqrt())
}

/// `‖P₊f‖_w / ‖f‖_w`.
pub fn weighted_ratio(f: &[Complex64], weights: &[f64]) -> Result<f64> {
    let denom = weighted_norm(f, weights)?;
    if denom == 0.0 {
        return Err(Error::InvalidArgument("probe has zero weighted norm".into()));
    }
    Ok(weighted_norm(&riesz_project(f)?, weights)? / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionBound {
    /// Per-probe ratios, in probe order.
    pub ratios: Vec<f64>,
    /// `max` over the probes: a lower bound for `‖P₊‖` on `L²(w dm)`.
    pub lower_bound: f64,
}

/// Accumulate [`weighted_ratio`] over a probe family. Probes with zero
/// weighted norm are skipped.
pub fn projection_norm_lower_bound(probes: &[Vec<Complex64>], weights: &[f64]) -> Result<ProjectionBound> {
    let mut ratios = Vec::with_capacity(probes.len());
    for p in probes {
        match weighted_ratio(p, weights) {
            Ok(r) => ratios.push(r),
            Err(Error::InvalidArgument(_)) if weighted_norm(p, weights)? == 0.0 => continue,
            Err(e) => return Err(e),
        }
    }
    let lower_bound = ratios.iter().copied().fold(0.0, f64::max);
    Ok(ProjectionBound { ratios, lower_bound })
}

/// Deterministic probe functions on a grid of size `grid`: `random` trigonometric
/// polynomials of degree ≤ 16 with uniform coefficients, followed by Gaussian
/// bumps at `θ = 0` of widths `π/4, π/16, …` down to four grid cells.
pub fn probe_family(grid: usize, random: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(random + 8);
    for _ in 0..random {
        let mut buf = vec![Complex64::new(0.0, 0.0); grid];
        for j in -16i64..=16 {
            let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            buf[j.rem_euclid(grid as i64) as usize] += c;
        }
        quadrature::fft_inverse(&mut buf);
        out.push(buf);
    }
    let cell = 2.0 * std::f64::consts::PI / grid as f64;
    let mut width = std::f64::consts::PI / 4.0;
    while width >= 4.0 * cell {
        out.push(
            (0..grid)
                .map(|k| {
                    let x = quadrature::centered_angle(quadrature::grid_angle(k, grid)) / width;
                    Complex64::new((-x * x).exp(), 0.0)
                })
                .collect(),
        );
        width /= 4.0;
    }
    out
}
