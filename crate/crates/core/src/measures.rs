//! Finite nonnegative measures on the unit circle and their Fourier coefficients.
//!
//! A [`CircleMeasure`] is the sum of an absolutely continuous part `w dm`
//! (the [`Symbol`]), finitely many atoms and an optional multiple of the
//! middle-thirds Cantor measure carried to the circle by `θ = 2πx`.
//! `dm` is normalized Lebesgue measure, so Lebesgue measure itself has
//! `t_0 = 1` and `t_n = 0` otherwise.
//!
//! Coefficients follow `t_n = ∫ z^{-n} dM(z)`; the sequence is Hermitian,
//! `t_{-n} = conj(t_n)`, and is stored one-sided in [`CoeffSequence`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, Rule};

/// Default size of the uniform angular grid.
pub const DEFAULT_GRID: usize = 4096;

/// Density samples in `[-NEGATIVE_SAMPLE_TOLERANCE, 0)` are clamped to zero.
pub const NEGATIVE_SAMPLE_TOLERANCE: f64 = 1e-12;

/// Grid points required per resolved frequency.
pub const OVERSAMPLING: usize = 8;

/// Cantor product factors are taken while `2π|n|·3^{-k}` is at least this.
pub const CANTOR_TRUNCATION: f64 = 1e-8;

/// Smallest uniform grid that may be used for coefficients up to `n_max`.
pub fn required_grid(n_max: usize) -> usize {
    (OVERSAMPLING * n_max).max(1)
}

/// Smallest power of two that satisfies [`required_grid`] and is at least `floor`.
pub fn adequate_grid(n_max: usize, floor: usize) -> usize {
    required_grid(n_max).max(floor).next_power_of_two()
}

fn check_grid(grid: usize, n_max: usize) -> Result<()> {
    let required = required_grid(n_max);
    if grid < required {
        return Err(Error::Resolution {
            grid,
            frequency: n_max,
            required,
        });
    }
    Ok(())
}

/// Closed-form densities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum Builtin {
    /// `w ≡ value` (default 1, i.e. Lebesgue measure).
    Constant {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<f64>,
    },
    /// `w = scale·(2 + 2cos θ)`.
    RaisedCosine {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
    /// `w = scale·|θ/π|^α` for `θ ∈ (-π, π]`, `α > -1`.
    Power {
        alpha: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
}

impl Builtin {
    fn value_at(&self, theta: f64) -> f64 {
        match *self {
            Builtin::Constant { value } => value.unwrap_or(1.0),
            Builtin::RaisedCosine { scale } => scale.unwrap_or(1.0) * (2.0 + 2.0 * theta.cos()),
            Builtin::Power { alpha, scale } => {
                let x = quadrature::centered_angle(theta).abs() / PI;
                scale.unwrap_or(1.0) * x.powf(alpha)
            }
        }
    }
}

/// One term of a symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SymbolTerm {
    Builtin(Builtin),
    /// `w(e^{iθ}) = Σ_{|n|≤K} c_n e^{inθ}` with `c_{-n} = conj(c_n)`; `coeffs = [c_0, …, c_K]`.
    Fourier {
        coeffs: Vec<Complex64>,
    },
    /// Samples at `θ_k = 2πk/G`, `k = 0..G`.
    Grid {
        samples: Vec<f64>,
    },
}

impl SymbolTerm {
    pub fn constant(value: f64) -> Self {
        SymbolTerm::Builtin(Builtin::Constant { value: Some(value) })
    }

    pub fn raised_cosine() -> Self {
        SymbolTerm::Builtin(Builtin::RaisedCosine { scale: None })
    }

    pub fn power(alpha: f64) -> Self {
        SymbolTerm::Builtin(Builtin::Power { alpha, scale: None })
    }

    fn is_power(&self) -> bool {
        matches!(self, SymbolTerm::Builtin(Builtin::Power { .. }))
    }

    /// Pointwise value, where defined off the sample grid.
    pub fn value_at(&self, theta: f64) -> Option<f64> {
        match self {
            SymbolTerm::Builtin(b) => Some(b.value_at(theta)),
            SymbolTerm::Fourier { coeffs } => Some(fourier_value(coeffs, theta)),
            SymbolTerm::Grid { .. } => None,
        }
    }

    fn validate(&self, tol: f64) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMeasure(msg));
        match self {
            SymbolTerm::Builtin(Builtin::Constant { value }) => {
                let v = value.unwrap_or(1.0);
                if !v.is_finite() || v < 0.0 {
                    return bad(format!("constant density must be finite and >= 0, got {v}"));
                }
            }
            SymbolTerm::Builtin(Builtin::RaisedCosine { scale }) => {
                let s = scale.unwrap_or(1.0);
                if !s.is_finite() || s < 0.0 {
                    return bad(format!("raised-cosine scale must be finite and >= 0, got {s}"));
                }
            }
            SymbolTerm::Builtin(Builtin::Power { alpha, scale }) => {
                let s = scale.unwrap_or(1.0);
                if !alpha.is_finite() || *alpha <= -1.0 {
                    return bad(format!("power exponent must be > -1, got {alpha}"));
                }
                if !s.is_finite() || s < 0.0 {
                    return bad(format!("power scale must be finite and >= 0, got {s}"));
                }
            }
            SymbolTerm::Fourier { coeffs } => {
                if coeffs.is_empty() {
                    return bad("fourier density needs at least c_0".into());
                }
                if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                    return bad("fourier coefficients must be finite".into());
                }
                if coeffs[0].im.abs() > tol.max(1e-12 * coeffs[0].re.abs()) {
                    return bad(format!("c_0 must be real, got {}", coeffs[0]));
                }
                let grid = adequate_grid(coeffs.len(), 256);
                check_samples(&fold_fourier_samples(coeffs, grid), tol)?;
            }
            SymbolTerm::Grid { samples } => {
                if samples.is_empty() {
                    return bad("grid density needs at least one sample".into());
                }
                check_samples(samples, tol)?;
            }
        }
        Ok(())
    }

    /// Samples at the grid nodes `θ_k = 2πk/G`, clamped at zero.
    fn node_samples(&self, grid: usize) -> Result<Vec<f64>> {
        let raw = match self {
            SymbolTerm::Builtin(b) => (0..grid).map(|k| b.value_at(quadrature::grid_angle(k, grid))).collect(),
            SymbolTerm::Fourier { coeffs } => fold_fourier_samples(coeffs, grid),
            SymbolTerm::Grid { samples } => {
                if samples.len() != grid {
                    return Err(Error::InvalidArgument(format!(
                        "grid density has {} samples but grid size {grid} was requested",
                        samples.len()
                    )));
                }
                samples.clone()
            }
        };
        Ok(raw.into_iter().map(|v| v.max(0.0)).collect())
    }
}

fn check_samples(samples: &[f64], tol: f64) -> Result<()> {
    for (k, &v) in samples.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::InvalidMeasure(format!("density sample {k} is not finite")));
        }
        if v < -tol {
            return Err(Error::InvalidMeasure(format!("density sample {k} is negative ({v:e})")));
        }
    }
    Ok(())
}

fn fourier_value(coeffs: &[Complex64], theta: f64) -> f64 {
    let mut v = coeffs[0].re;
    for (n, c) in coeffs.iter().enumerate().skip(1) {
        let (s, co) = (n as f64 * theta).sin_cos();
        v += 2.0 * (c * Complex64::new(co, s)).re;
    }
    v
}

/// Node samples of a Hermitian trigonometric polynomial, folding frequencies modulo `grid`.
fn fold_fourier_samples(coeffs: &[Complex64], grid: usize) -> Vec<f64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); grid];
    buf[0] += Complex64::new(coeffs[0].re, 0.0);
    for (n, &c) in coeffs.iter().enumerate().skip(1) {
        buf[n % grid] += c;
        buf[(grid - n % grid) % grid] += c.conj();
    }
    quadrature::fft_inverse(&mut buf);
    buf.into_iter().map(|z| z.re).collect()
}

/// The absolutely continuous density `w`, a sum of one or more terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Symbol {
    One(SymbolTerm),
    Sum(Vec<SymbolTerm>),
}

impl From<SymbolTerm> for Symbol {
    fn from(term: SymbolTerm) -> Self {
        Symbol::One(term)
    }
}

impl Symbol {
    pub fn terms(&self) -> &[SymbolTerm] {
        match self {
            Symbol::One(t) => std::slice::from_ref(t),
            Symbol::Sum(ts) => ts,
        }
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        for t in self.terms() {
            t.validate(tol)?;
        }
        Ok(())
    }

    /// Size forced by grid-sampled terms, if any. All such terms must agree.
    pub fn native_grid(&self) -> Result<Option<usize>> {
        let mut found: Option<usize> = None;
        for t in self.terms() {
            if let SymbolTerm::Grid { samples } = t {
                match found {
                    Some(g) if g != samples.len() => {
                        return Err(Error::InvalidMeasure(format!(
                            "grid terms disagree on size ({g} vs {})",
                            samples.len()
                        )))
                    }
                    _ => found = Some(samples.len()),
                }
            }
        }
        Ok(found)
    }

    /// The grid actually used when `requested` is asked for.
    pub fn effective_grid(&self, requested: usize) -> Result<usize> {
        Ok(self.native_grid()?.unwrap_or(requested))
    }

    /// `w(θ)`, or `None` when a grid-sampled term is present.
    pub fn value_at(&self, theta: f64) -> Option<f64> {
        self.terms().iter().map(|t| t.value_at(theta)).sum()
    }

    /// Samples at `θ_k = 2πk/G`. Power weights with `α < 0` give `+∞` at `θ = 0`.
    pub fn node_samples(&self, grid: usize) -> Result<Vec<f64>> {
        let grid = self.effective_grid(grid)?;
        let mut out = vec![0.0; grid];
        for t in self.terms() {
            for (o, v) in out.iter_mut().zip(t.node_samples(grid)?) {
                *o += v;
            }
        }
        Ok(out)
    }

    /// One sample per grid cell: cell midpoints for closed-form terms, the
    /// node value for grid-sampled terms. Midpoints avoid the singular point
    /// of power weights.
    pub fn cell_samples(&self, grid: usize) -> Result<Vec<f64>> {
        let grid = self.effective_grid(grid)?;
        let mut out = vec![0.0; grid];
        for t in self.terms() {
            match t.value_at(0.0) {
                Some(_) => {
                    for (k, o) in out.iter_mut().enumerate() {
                        *o += t.value_at(quadrature::cell_midpoint(k, grid)).unwrap_or(0.0).max(0.0);
                    }
                }
                None => {
                    for (o, v) in out.iter_mut().zip(t.node_samples(grid)?) {
                        *o += v;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Discretization of `w dm` exact (up to rounding) for trigonometric
    /// polynomials of degree `≤ max_freq`, given a grid of at least
    /// [`required_grid`]`(max_freq)` for the uniform-grid terms.
    pub fn rule(&self, max_freq: usize, grid: usize) -> Result<Rule> {
        let split = self.split_rule(max_freq, grid)?;
        let mut rule = split.graded;
        if let Some(samples) = split.uniform {
            let g = split.grid as f64;
            for (k, v) in samples.into_iter().enumerate() {
                rule.push(quadrature::grid_angle(k, split.grid), v / g);
            }
        }
        Ok(rule)
    }

    /// The rule of [`Symbol::rule`] kept in two pieces: summed node samples
    /// of the uniform-grid terms (weight `1/G` each) and the graded
    /// Gauss–Legendre rule of the power-weight terms.
    pub fn split_rule(&self, max_freq: usize, grid: usize) -> Result<SplitRule> {
        let grid = self.effective_grid(grid)?;
        let mut graded = Rule::default();
        let mut uniform: Option<Vec<f64>> = None;
        for t in self.terms() {
            if let SymbolTerm::Builtin(Builtin::Power { alpha, scale }) = *t {
                let unit = quadrature::power_rule_unit(alpha, max_freq);
                let s = 0.5 * scale.unwrap_or(1.0);
                for (&x, &w) in unit.nodes.iter().zip(&unit.weights) {
                    graded.push(PI * x, s * w);
                    graded.push(-PI * x, s * w);
                }
            } else {
                let acc = uniform.get_or_insert_with(|| vec![0.0; grid]);
                for (a, v) in acc.iter_mut().zip(t.node_samples(grid)?) {
                    *a += v;
                }
            }
        }
        Ok(SplitRule { grid, uniform, graded })
    }

    /// Largest trigonometric degree among the terms (0 for closed-form and grid terms).
    pub fn trig_degree(&self) -> usize {
        self.terms()
            .iter()
            .map(|t| match t {
                SymbolTerm::Builtin(Builtin::RaisedCosine { .. }) => 1,
                SymbolTerm::Fourier { coeffs } => coeffs.len() - 1,
                _ => 0,
            })
            .max()
            .unwrap_or(0)
    }

    /// `t_n` for `0 ≤ n ≤ n_max` of `w dm`.
    ///
    /// Terms that are trigonometric on the uniform grid share one FFT; power
    /// weights use their graded Gauss–Legendre rule.
    pub fn coefficients(&self, n_max: usize, grid: usize) -> Result<Vec<Complex64>> {
        let grid = self.effective_grid(grid)?;
        let mut out = vec![Complex64::new(0.0, 0.0); n_max + 1];
        let mut uniform: Option<Vec<Complex64>> = None;
        for t in self.terms() {
            if t.is_power() {
                continue;
            }
            if let SymbolTerm::Fourier { coeffs } = t {
                if coeffs.len() > grid.saturating_sub(n_max) {
                    return Err(Error::Resolution {
                        grid,
                        frequency: coeffs.len() - 1 + n_max,
                        required: coeffs.len() + n_max,
                    });
                }
            }
            check_grid(grid, n_max)?;
            let acc = uniform.get_or_insert_with(|| vec![Complex64::new(0.0, 0.0); grid]);
            for (a, v) in acc.iter_mut().zip(t.node_samples(grid)?) {
                a.re += v;
            }
        }
        if let Some(mut buf) = uniform {
            quadrature::fft_forward(&mut buf);
            let g = grid as f64;
            for (o, b) in out.iter_mut().zip(&buf) {
                *o += b / g;
            }
        }
        let power: Vec<&SymbolTerm> = self.terms().iter().filter(|t| t.is_power()).collect();
        if !power.is_empty() {
            let sub = Symbol::Sum(power.into_iter().cloned().collect());
            let rule = sub.rule(n_max, grid)?;
            for (n, o) in out.iter_mut().enumerate() {
                // Power weights are even, so the rule is symmetric and t_n is real.
                o.re += rule.integrate(|theta| (n as f64 * theta).cos());
            }
        }
        out[0].im = 0.0;
        Ok(out)
    }

    /// Single coefficient `t_n`, `n` of either sign.
    pub fn coefficient(&self, n: i64, grid: usize) -> Result<Complex64> {
        let grid = self.effective_grid(grid)?;
        let m = n.unsigned_abs() as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut has_uniform = false;
        let mut uniform = vec![0.0; grid];
        for t in self.terms() {
            if t.is_power() {
                let rule = Symbol::One(t.clone()).rule(m, grid)?;
                acc.re += rule.integrate(|theta| (m as f64 * theta).cos());
            } else {
                check_grid(grid, m)?;
                has_uniform = true;
                for (u, v) in uniform.iter_mut().zip(t.node_samples(grid)?) {
                    *u += v;
                }
            }
        }
        if has_uniform {
            let s: Complex64 = uniform
                .iter()
                .enumerate()
                .map(|(k, &v)| v * quadrature::grid_character(m as i64, k, grid))
                .sum();
            acc += s / grid as f64;
        }
        if m == 0 {
            acc.im = 0.0;
        }
        Ok(if n < 0 { acc.conj() } else { acc })
    }

    /// Smallest node sample, the discrete version of `ess inf w`.
    pub fn min_on_grid(&self, grid: usize) -> Result<f64> {
        Ok(self.node_samples(grid)?.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .terms()
            .iter()
            .map(|t| match t {
                SymbolTerm::Builtin(Builtin::Constant { value }) => format!("{}", value.unwrap_or(1.0)),
                SymbolTerm::Builtin(Builtin::RaisedCosine { scale }) => {
                    format!("{}*(2+2cos θ)", scale.unwrap_or(1.0))
                }
                SymbolTerm::Builtin(Builtin::Power { alpha, scale }) => {
                    format!("{}*|θ/π|^{alpha}", scale.unwrap_or(1.0))
                }
                SymbolTerm::Fourier { coeffs } => format!("trig polynomial of degree {}", coeffs.len() - 1),
                SymbolTerm::Grid { samples } => format!("{}-point grid density", samples.len()),
            })
            .collect();
        parts.join(" + ")
    }
}

/// See [`Symbol::split_rule`].
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRule {
    pub grid: usize,
    pub uniform: Option<Vec<f64>>,
    pub graded: Rule,
}

/// A point mass at `e^{i·angle}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Atom {
    pub angle: f64,
    pub mass: f64,
}

impl Atom {
    /// `μ e^{-inθ₀}`.
    pub fn coefficient(&self, n: i64) -> Complex64 {
        let (s, c) = (n as f64 * self.angle).sin_cos();
        Complex64::new(self.mass * c, -self.mass * s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorPart {
    pub mass: f64,
}

/// Fourier coefficient of the unit-mass Cantor measure on the circle,
/// `(-1)^n ∏_{k≥1} cos(2πn·3^{-k})`.
///
/// The `(-1)^n` phase comes from the Cantor set sitting on `[0, 1]` (centre
/// `x = 1/2`, i.e. `θ = π`). Each factor's phase is reduced modulo `3^k` in
/// integer arithmetic, so factors with `3^k | n` are exactly 1.
pub fn cantor_coefficient(n: i64) -> f64 {
    let m = n.unsigned_abs() as u128;
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let mut product = 1.0;
    let mut pow: u128 = 3;
    loop {
        let arg = 2.0 * PI * (m as f64) / (pow as f64);
        if arg < CANTOR_TRUNCATION {
            break;
        }
        let frac = (m % pow) as f64 / pow as f64;
        product *= (2.0 * PI * frac).cos();
        pow *= 3;
    }
    sign * product
}

/// A finite nonnegative measure on the unit circle.
///
/// Serializes to `{"ac": …, "atoms": [{"angle", "mass"}], "cantor": {"mass"}}`,
/// every field optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleMeasure {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ac: Option<Symbol>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atoms: Option<Vec<Atom>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cantor: Option<CantorPart>,
}

impl CircleMeasure {
    /// The zero measure.
    pub fn zero() -> Self {
        Self::default()
    }

    /// Normalized Lebesgue measure `dm`.
    pub fn lebesgue() -> Self {
        Self::absolutely_continuous(SymbolTerm::constant(1.0))
    }

    pub fn absolutely_continuous(symbol: impl Into<Symbol>) -> Self {
        CircleMeasure {
            ac: Some(symbol.into()),
            ..Self::default()
        }
    }

    pub fn atom(angle: f64, mass: f64) -> Self {
        CircleMeasure {
            atoms: Some(vec![Atom { angle, mass }]),
            ..Self::default()
        }
    }

    pub fn cantor(mass: f64) -> Self {
        CircleMeasure {
            cantor: Some(CantorPart { mass }),
            ..Self::default()
        }
    }

    pub fn with_atom(mut self, angle: f64, mass: f64) -> Self {
        self.atoms.get_or_insert_with(Vec::new).push(Atom { angle, mass });
        self
    }

    pub fn with_cantor(mut self, mass: f64) -> Self {
        let c = self.cantor.get_or_insert(CantorPart { mass: 0.0 });
        c.mass += mass;
        self
    }

    /// Add a density term to the absolutely continuous part.
    pub fn with_term(mut self, term: SymbolTerm) -> Self {
        self.ac = Some(match self.ac.take() {
            None => Symbol::One(term),
            Some(Symbol::One(t)) => Symbol::Sum(vec![t, term]),
            Some(Symbol::Sum(mut ts)) => {
                ts.push(term);
                Symbol::Sum(ts)
            }
        });
        self
    }

    /// Measure sum. Atoms at coinciding angles are merged.
    pub fn plus(&self, other: &CircleMeasure) -> CircleMeasure {
        let mut out = self.clone();
        if let Some(sym) = &other.ac {
            for t in sym.terms() {
                out = out.with_term(t.clone());
            }
        }
        for a in other.atoms() {
            let atoms = out.atoms.get_or_insert_with(Vec::new);
            match atoms.iter_mut().find(|b| (b.angle - a.angle).abs() < 1e-12) {
                Some(b) => b.mass += a.mass,
                None => atoms.push(*a),
            }
        }
        if other.cantor_mass() > 0.0 {
            out = out.with_cantor(other.cantor_mass());
        }
        out
    }

    pub fn symbol(&self) -> Option<&Symbol> {
        self.ac.as_ref()
    }

    pub fn atoms(&self) -> &[Atom] {
        self.atoms.as_deref().unwrap_or(&[])
    }

    pub fn cantor_mass(&self) -> f64 {
        self.cantor.map_or(0.0, |c| c.mass)
    }

    /// True when the measure has no atoms and no Cantor component.
    pub fn is_absolutely_continuous(&self) -> bool {
        self.atoms().is_empty() && self.cantor_mass() == 0.0
    }

    /// Parse and validate a measure document.
    pub fn from_json(text: &str) -> Result<Self> {
        let m: CircleMeasure = serde_json::from_str(text).map_err(|e| Error::InvalidMeasure(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_with_tolerance(NEGATIVE_SAMPLE_TOLERANCE)
    }

    /// Check the measure invariants, accepting density samples down to `-tol`.
    pub fn validate_with_tolerance(&self, tol: f64) -> Result<()> {
        if let Some(sym) = &self.ac {
            sym.validate(tol)?;
            sym.native_grid()?;
        }
        let atoms = self.atoms();
        for a in atoms {
            if !a.angle.is_finite() || a.angle < 0.0 || a.angle >= 2.0 * PI {
                return Err(Error::InvalidMeasure(format!("atom angle {} outside [0, 2π)", a.angle)));
            }
            if !a.mass.is_finite() || a.mass <= 0.0 {
                return Err(Error::InvalidMeasure(format!("atom mass must be > 0, got {}", a.mass)));
            }
        }
        for (i, a) in atoms.iter().enumerate() {
            for b in &atoms[i + 1..] {
                if (a.angle - b.angle).abs() < 1e-12 {
                    return Err(Error::InvalidMeasure(format!("duplicate atom angle {}", a.angle)));
                }
            }
        }
        let c = self.cantor_mass();
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidMeasure(format!("cantor mass must be >= 0, got {c}")));
        }
        Ok(())
    }

    /// `M(𝕋) = t_0`.
    pub fn total_mass(&self, grid: usize) -> Result<f64> {
        Ok(fourier_coefficient(self, 0, grid)?.re)
    }
}

/// `t_n = ∫ z^{-n} dM(z)`.
///
/// The absolutely continuous part needs a grid of at least `8|n|` points
/// (power weights excepted); atoms are summed exactly and the Cantor part
/// uses the truncated product formula.
pub fn fourier_coefficient(measure: &CircleMeasure, n: i64, grid: usize) -> Result<Complex64> {
    let mut t = match measure.symbol() {
        Some(sym) => sym.coefficient(n, grid)?,
        None => Complex64::new(0.0, 0.0),
    };
    for a in measure.atoms() {
        t += a.coefficient(n);
    }
    let c = measure.cantor_mass();
    if c > 0.0 {
        t += c * cantor_coefficient(n);
    }
    if n == 0 {
        t.im = 0.0;
    }
    Ok(t)
}

/// `t_n` for `|n| ≤ n_max`, one FFT for the grid-based part of the density.
pub fn coefficient_table(measure: &CircleMeasure, n_max: usize, grid: usize) -> Result<CoeffSequence> {
    let mut entries = match measure.symbol() {
        Some(sym) => sym.coefficients(n_max, grid)?,
        None => vec![Complex64::new(0.0, 0.0); n_max + 1],
    };
    for a in measure.atoms() {
        for (n, e) in entries.iter_mut().enumerate() {
            *e += a.coefficient(n as i64);
        }
    }
    let c = measure.cantor_mass();
    if c > 0.0 {
        for (n, e) in entries.iter_mut().enumerate() {
            e.re += c * cantor_coefficient(n as i64);
        }
    }
    entries[0].im = 0.0;
    CoeffSequence::new(entries)
}

/// Largest `γ` with `M(X) ≥ γ·m(X)`: the grid minimum of the density, 0 without one.
pub fn gamma_floor(measure: &CircleMeasure, grid: usize) -> Result<f64> {
    match measure.symbol() {
        Some(sym) => {
            let min = sym.min_on_grid(grid)?;
            Ok(if min.is_finite() { min } else { 0.0 })
        }
        None => Ok(0.0),
    }
}

/// A Hermitian sequence `t_n`, `|n| ≤ n_max`, stored as `t_0 … t_{n_max}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoeffSequenceRepr", into = "CoeffSequenceRepr")]
pub struct CoeffSequence {
    entries: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct CoeffSequenceRepr {
    n_max: usize,
    entries: Vec<Complex64>,
}

impl TryFrom<CoeffSequenceRepr> for CoeffSequence {
    type Error = Error;

    fn try_from(r: CoeffSequenceRepr) -> Result<Self> {
        if r.entries.len() != r.n_max + 1 {
            return Err(Error::InvalidArgument(format!(
                "n_max = {} but {} entries given",
                r.n_max,
                r.entries.len()
            )));
        }
        CoeffSequence::new(r.entries)
    }
}

impl From<CoeffSequence> for CoeffSequenceRepr {
    fn from(c: CoeffSequence) -> Self {
        CoeffSequenceRepr {
            n_max: c.n_max(),
            entries: c.entries,
        }
    }
}

impl CoeffSequence {
    /// Build from `t_0 … t_N`. `t_0` must be real up to 1e-12 relative.
    pub fn new(mut entries: Vec<Complex64>) -> Result<Self> {
        let Some(t0) = entries.first_mut() else {
            return Err(Error::InvalidArgument("coefficient sequence needs t_0".into()));
        };
        if t0.im.abs() > 1e-12 * t0.re.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!("t_0 must be real, got {t0}")));
        }
        t0.im = 0.0;
        if entries.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(CoeffSequence { entries })
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn n_max(&self) -> usize {
        self.entries.len() - 1
    }

    /// `t_0 … t_{n_max}`.
    pub fn one_sided(&self) -> &[Complex64] {
        &self.entries
    }

    /// `t_n` for either sign of `n`; panics past the cutoff.
    #[inline]
    pub fn get(&self, n: i64) -> Complex64 {
        let c = self.entries[n.unsigned_abs() as usize];
        if n < 0 {
            c.conj()
        } else {
            c
        }
    }

    pub fn t0(&self) -> f64 {
        self.entries[0].re
    }

    /// True when every entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|c| c.im == 0.0)
    }

    /// Entrywise sum; the shorter sequence sets the cutoff.
    pub fn add(&self, other: &CoeffSequence) -> CoeffSequence {
        CoeffSequence {
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        }
    }

    /// Prefix `t_0 … t_{n_max}`.
    pub fn truncated(&self, n_max: usize) -> Result<CoeffSequence> {
        self.require(n_max)?;
        Ok(CoeffSequence {
            entries: self.entries[..=n_max].to_vec(),
        })
    }

    pub(crate) fn require(&self, n_max: usize) -> Result<()> {
        if self.n_max() < n_max {
            return Err(Error::InsufficientCutoff {
                available: self.n_max(),
                required: n_max,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn lebesgue_coefficients() {
        let m = CircleMeasure::lebesgue();
        assert!(close(
            fourier_coefficient(&m, 0, DEFAULT_GRID).unwrap(),
            1.0.into(),
            1e-15
        ));
        assert!(close(
            fourier_coefficient(&m, 3, DEFAULT_GRID).unwrap(),
            0.0.into(),
            1e-15
        ));
        let table = coefficient_table(&m, 4, DEFAULT_GRID).unwrap();
        assert_eq!(table.t0(), 1.0);
        for n in 1..=4 {
            assert!(table.get(n).norm() < 1e-15);
            assert!(table.get(-n).norm() < 1e-15);
        }
    }

    #[test]
    fn unit_atom_at_one_gives_all_ones() {
        let m = CircleMeasure::atom(0.0, 1.0);
        let table = coefficient_table(&m, 4, DEFAULT_GRID).unwrap();
        for n in -4..=4 {
            assert_eq!(table.get(n), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn atom_at_minus_one_alternates() {
        let m = CircleMeasure::atom(PI, 2.0);
        for n in -20i64..=20 {
            let want = if n % 2 == 0 { 2.0 } else { -2.0 };
            let got = fourier_coefficient(&m, n, DEFAULT_GRID).unwrap();
            assert!(close(got, want.into(), 1e-13), "n={n}: {got}");
        }
    }

    #[test]
    fn raised_cosine_matches_analytic_integral() {
        // ∫(2+2cosθ)e^{-inθ}dθ/2π = 2δ_{n0} + δ_{|n|,1}
        let m = CircleMeasure::absolutely_continuous(SymbolTerm::raised_cosine());
        let table = coefficient_table(&m, 4, DEFAULT_GRID).unwrap();
        let want = [2.0, 1.0, 0.0, 0.0, 0.0];
        for n in -4i64..=4 {
            assert!(close(table.get(n), want[n.unsigned_abs() as usize].into(), 1e-14));
        }
    }

    #[test]
    fn cantor_self_similarity() {
        let m = CircleMeasure::cantor(1.0);
        let t1 = fourier_coefficient(&m, 1, DEFAULT_GRID).unwrap();
        let mut p: i64 = 1;
        for _ in 0..=12 {
            let t = fourier_coefficient(&m, p, DEFAULT_GRID).unwrap();
            assert!(close(t, t1, 1e-14), "n={p}: {t} vs {t1}");
            p *= 3;
        }
    }

    #[test]
    fn cantor_truncation_bound() {
        // Past the truncation point the remaining factors are 1 to machine precision.
        let n = 12345i64;
        let full: f64 = (1..80).map(|k| (2.0 * PI * n as f64 / 3f64.powi(k)).cos()).product();
        let sign = -1.0;
        assert!((cantor_coefficient(n) - sign * full).abs() < 1e-12);
    }

    #[test]
    fn gamma_floor_values() {
        assert_eq!(gamma_floor(&CircleMeasure::lebesgue(), DEFAULT_GRID).unwrap(), 1.0);
        assert_eq!(gamma_floor(&CircleMeasure::atom(0.5, 1.0), DEFAULT_GRID).unwrap(), 0.0);
        let rc = CircleMeasure::absolutely_continuous(SymbolTerm::raised_cosine());
        assert!(gamma_floor(&rc, DEFAULT_GRID).unwrap().abs() < 1e-15);
        let p = CircleMeasure::absolutely_continuous(SymbolTerm::power(-0.5));
        assert!((gamma_floor(&p, DEFAULT_GRID).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_grid_is_a_resolution_error() {
        let m = CircleMeasure::lebesgue();
        let err = coefficient_table(&m, 600, DEFAULT_GRID).unwrap_err();
        assert!(matches!(err, Error::Resolution { .. }));
        assert!(err.is_numeric());
        // Atoms and Cantor parts have no grid constraint.
        assert!(coefficient_table(&CircleMeasure::cantor(1.0), 5000, 16).is_ok());
    }

    #[test]
    fn negative_density_is_rejected_and_noise_is_clamped() {
        let mut samples = vec![1.0; 64];
        samples[3] = -1e-13;
        let ok = CircleMeasure::absolutely_continuous(SymbolTerm::Grid {
            samples: samples.clone(),
        });
        ok.validate().unwrap();
        assert_eq!(ok.symbol().unwrap().node_samples(64).unwrap()[3], 0.0);
        samples[3] = -1e-6;
        let bad = CircleMeasure::absolutely_continuous(SymbolTerm::Grid { samples });
        assert!(matches!(bad.validate(), Err(Error::InvalidMeasure(_))));
        let neg_fourier = CircleMeasure::absolutely_continuous(SymbolTerm::Fourier {
            coeffs: vec![1.0.into(), 0.6.into()],
        });
        assert!(neg_fourier.validate().is_err());
    }

    #[test]
    fn invalid_atoms_rejected() {
        assert!(CircleMeasure::atom(7.0, 1.0).validate().is_err());
        assert!(CircleMeasure::atom(1.0, 0.0).validate().is_err());
        assert!(CircleMeasure::atom(1.0, 1.0).with_atom(1.0, 2.0).validate().is_err());
        assert!(CircleMeasure::absolutely_continuous(SymbolTerm::power(-1.0))
            .validate()
            .is_err());
    }

    #[test]
    fn fourier_term_reproduces_its_coefficients() {
        let coeffs = vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(0.5, 0.25),
            Complex64::new(-0.2, 0.1),
        ];
        let m = CircleMeasure::absolutely_continuous(SymbolTerm::Fourier { coeffs: coeffs.clone() });
        m.validate().unwrap();
        let table = coefficient_table(&m, 8, 256).unwrap();
        for (n, c) in coeffs.iter().enumerate() {
            assert!(close(table.get(n as i64), *c, 1e-14));
            assert!(close(table.get(-(n as i64)), c.conj(), 1e-14));
        }
        assert!(table.get(5).norm() < 1e-14);
        for n in [0i64, 1, 2, -2] {
            let single = fourier_coefficient(&m, n, 256).unwrap();
            assert!(close(single, table.get(n), 1e-14));
        }
    }

    #[test]
    fn power_weight_coefficients_match_closed_form() {
        // ∫_0^1 x² cos(nπx) dx = 2(-1)^n/(nπ)²
        let m = CircleMeasure::absolutely_continuous(SymbolTerm::power(2.0));
        let table = coefficient_table(&m, 64, 1024).unwrap();
        assert!((table.t0() - 1.0 / 3.0).abs() < 1e-14);
        for n in 1..=64i64 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let want = 2.0 * sign / (n as f64 * PI).powi(2);
            assert!((table.get(n).re - want).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn json_round_trip_preserves_document() {
        let text = r#"{"ac":[{"kind":"builtin","name":"constant"},{"kind":"builtin","name":"power","alpha":0.5}],"atoms":[{"angle":1.0,"mass":2.0}],"cantor":{"mass":0.5}}"#;
        let m = CircleMeasure::from_json(text).unwrap();
        let back = serde_json::to_value(&m).unwrap();
        let orig: serde_json::Value = serde_json::from_str(text).unwrap();
        assert_eq!(back, orig);
        assert!(CircleMeasure::from_json(r#"{"bogus":1}"#).is_err());
    }

    #[test]
    fn sequence_rejects_complex_t0() {
        assert!(CoeffSequence::new(vec![Complex64::new(1.0, 0.5)]).is_err());
        assert!(CoeffSequence::new(vec![]).is_err());
    }
}
