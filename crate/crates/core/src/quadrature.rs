//! Quadrature rules shared by the circle and line measures.
//!
//! Two families are used throughout the crate:
//!
//! * the periodic trapezoid rule on a uniform angular grid `θ_k = 2πk/G`,
//!   exact for trigonometric polynomials of degree `< G`;
//! * composite Gauss–Legendre panels, used where the integrand has a kink or
//!   an integrable algebraic singularity (power weights) and for polynomial
//!   moments on an interval.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Points per Gauss–Legendre panel in composite rules.
pub const PANEL_POINTS: usize = 16;

/// Geometric grading ratio for panels approaching an endpoint singularity.
///
/// A panel `[a, 4a]` keeps the singularity at 0 two-thirds of a half-length
/// away from its end, which puts 16-point Gauss–Legendre at roughly 1e-15.
const GRADING_RATIO: f64 = 0.25;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
///
/// Nodes come back in increasing order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A discrete rule: `∫ f dμ ≈ Σ weights[q] · f(nodes[q])`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn push(&mut self, node: f64, weight: f64) {
        self.nodes.push(node);
        self.weights.push(weight);
    }

    pub fn extend(&mut self, other: Rule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Append a `PANEL_POINTS`-point Gauss–Legendre panel on `[a, b]`,
    /// with the weight function `density` folded into the weights.
    fn push_panel(&mut self, a: f64, b: f64, gl: &(Vec<f64>, Vec<f64>), density: &dyn Fn(f64) -> f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (&t, &w) in gl.0.iter().zip(&gl.1) {
            let x = mid + half * t;
            self.push(x, half * w * density(x));
        }
    }
}

/// Composite rule for `∫_0^1 f(x) x^α dx`, accurate for `f` oscillating up to
/// `cos(max_freq · π x)`.
///
/// Non-integer exponents get geometric grading toward `x = 0`; the final sliver
/// `[0, ε]` is lumped into one node carrying its exact mass `ε^{1+α}/(1+α)`,
/// with `ε` chosen so that this mass is below 1e-18.
pub fn power_rule_unit(alpha: f64, max_freq: usize) -> Rule {
    assert!(alpha > -1.0, "power exponent must exceed -1");
    let gl = gauss_legendre(PANEL_POINTS);
    let panels = max_freq.max(16);
    let h = 1.0 / panels as f64;
    let density = move |x: f64| x.powf(alpha);
    let mut rule = Rule::default();

    let smooth = alpha >= 0.0 && alpha.fract() == 0.0;
    if smooth {
        rule.push_panel(0.0, h, &gl, &density);
    } else {
        let mut hi = h;
        loop {
            let lo = hi * GRADING_RATIO;
            rule.push_panel(lo, hi, &gl, &density);
            hi = lo;
            let sliver = hi.powf(1.0 + alpha) / (1.0 + alpha);
            if sliver < 1e-18 || hi < f64::MIN_POSITIVE * 1e4 {
                rule.push(hi * (1.0 + alpha) / (2.0 + alpha), sliver);
                break;
            }
        }
    }
    for p in 1..panels {
        rule.push_panel(p as f64 * h, (p + 1) as f64 * h, &gl, &density);
    }
    rule
}

/// Composite Gauss–Legendre rule on `[a, b]` with `panels` equal panels and
/// `points` nodes per panel (exact for polynomials of degree `< 2·points`).
pub fn gauss_legendre_composite(a: f64, b: f64, panels: usize, points: usize) -> Rule {
    let gl = gauss_legendre(points);
    let mut rule = Rule::default();
    let h = (b - a) / panels as f64;
    for p in 0..panels {
        let lo = a + p as f64 * h;
        let hi = if p + 1 == panels { b } else { lo + h };
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (&t, &w) in gl.0.iter().zip(&gl.1) {
            rule.push(mid + half * t, half * w);
        }
    }
    rule
}

/// Angle of node `k` on the uniform grid of size `grid`, in `[0, 2π)`.
#[inline]
pub fn grid_angle(k: usize, grid: usize) -> f64 {
    2.0 * PI * k as f64 / grid as f64
}

/// Angle of the midpoint of cell `k` on the uniform grid of size `grid`.
#[inline]
pub fn cell_midpoint(k: usize, grid: usize) -> f64 {
    2.0 * PI * (k as f64 + 0.5) / grid as f64
}

/// Map an angle into `(-π, π]`.
#[inline]
pub fn centered_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// `e^{-i n θ_k}` on the uniform grid, with the phase reduced exactly modulo `grid`.
#[inline]
pub fn grid_character(n: i64, k: usize, grid: usize) -> Complex64 {
    let idx = (n.rem_euclid(grid as i64) as u128 * k as u128 % grid as u128) as f64;
    let (s, c) = (2.0 * PI * idx / grid as f64).sin_cos();
    Complex64::new(c, -s)
}

/// In-place forward DFT, `X_n = Σ_k x_k e^{-2πi nk/G}` (unnormalized).
pub fn fft_forward(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_forward(buf.len()).process(buf);
}

/// In-place inverse DFT, `x_k = Σ_n X_n e^{+2πi nk/G}` (unnormalized).
pub fn fft_inverse(buf: &mut [Complex64]) {
    if buf.is_empty() {
        return;
    }
    let mut planner = FftPlanner::<f64>::new();
    planner.plan_fft_inverse(buf.len()).process(buf);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(PANEL_POINTS);
        for deg in 0..(2 * PANEL_POINTS) {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32)).sum();
            let want = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - want).abs() < 1e-14, "degree {deg}: {got} vs {want}");
        }
    }

    #[test]
    fn odd_rule_has_center_node() {
        let (x, w) = gauss_legendre(5);
        assert_eq!(x[2], 0.0);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn power_rule_mass_matches_beta_integral() {
        for &alpha in &[-0.9, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0] {
            let rule = power_rule_unit(alpha, 64);
            let mass: f64 = rule.weights.iter().sum();
            let want = 1.0 / (1.0 + alpha);
            assert!((mass - want).abs() < 1e-13, "alpha {alpha}: {mass} vs {want}");
        }
    }

    #[test]
    fn power_rule_resolves_oscillation() {
        // ∫_0^1 x cos(nπx) dx = ((-1)^n - 1)/(nπ)²
        let n = 301usize;
        let rule = power_rule_unit(1.0, n);
        let got = rule.integrate(|x| (n as f64 * PI * x).cos());
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let want = (sign - 1.0) / (n as f64 * PI).powi(2);
        assert!((got - want).abs() < 1e-14);
    }

    #[test]
    fn grid_character_reduces_phase() {
        let g = 4096;
        let c = grid_character(g as i64 * 7 + 1, 3, g);
        let d = grid_character(1, 3, g);
        assert_eq!(c, d);
    }

    #[test]
    fn centered_angle_range() {
        assert!((centered_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(centered_angle(PI), PI);
        assert_eq!(centered_angle(0.0), 0.0);
    }
}
