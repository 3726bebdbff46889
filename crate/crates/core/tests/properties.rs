use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use semitoeplitz::closure::{
    analytic_extension_eval, closed_form_eval, laurent_form_eval, muckenhoupt_estimate, polynomial_at, riesz_project,
    weighted_ratio, BilateralVector,
};
use semitoeplitz::hankel::{hankel_classify, hankel_form, power_moments, LineMeasure, MomentSequence};
use semitoeplitz::measures::{coefficient_table, CircleMeasure, Symbol, SymbolTerm};
use semitoeplitz::quadrature::grid_angle;
use semitoeplitz::toeplitz::{psd_check, quadratic_form_direct, toeplitz_apply, FiniteVector};
use semitoeplitz::{Evidence, Status};

const GRID: usize = 2048;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn vector(max_len: usize) -> impl Strategy<Value = FiniteVector> {
    prop::collection::vec(complex(), 1..=max_len).prop_map(FiniteVector::new)
}

fn term() -> impl Strategy<Value = SymbolTerm> {
    prop_oneof![
        (0.05..4.0f64).prop_map(SymbolTerm::constant),
        Just(SymbolTerm::raised_cosine()),
        (0.0..2.5f64).prop_map(SymbolTerm::power),
    ]
}

fn measure() -> impl Strategy<Value = CircleMeasure> {
    (
        prop::collection::vec(term(), 1..=2),
        prop::collection::vec((0.0..2.0 * PI, 0.01..2.0f64), 0..=3),
        prop::option::of(0.01..1.0f64),
    )
        .prop_map(|(terms, atoms, cantor)| {
            let mut m = CircleMeasure::zero();
            for t in terms {
                m = m.with_term(t);
            }
            for (i, (angle, mass)) in atoms.into_iter().enumerate() {
                // keep atoms distinct
                m = m.with_atom((angle + i as f64 * 0.1) % (2.0 * PI), mass);
            }
            if let Some(c) = cantor {
                m = m.with_cantor(c);
            }
            m
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn coefficients_are_hermitian_and_t0_is_mass(m in measure()) {
        let t = coefficient_table(&m, 64, GRID).unwrap();
        for n in 1..=64i64 {
            prop_assert_eq!(t.get(-n), t.get(n).conj());
        }
        prop_assert!(t.get(0).im == 0.0);
        let sup = t.one_sided().iter().map(|c| c.norm()).fold(0.0, f64::max);
        prop_assert!(sup <= t.t0() * (1.0 + 1e-12));
    }

    #[test]
    fn coefficient_table_is_additive(a in measure(), b in measure()) {
        let ta = coefficient_table(&a, 40, GRID).unwrap();
        let tb = coefficient_table(&b, 40, GRID).unwrap();
        let tab = coefficient_table(&a.plus(&b), 40, GRID).unwrap();
        for n in -40..=40i64 {
            prop_assert!((tab.get(n) - ta.get(n) - tb.get(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn sections_of_nonnegative_measures_are_psd(m in measure(), order in 1usize..48) {
        let t = coefficient_table(&m, order, GRID).unwrap();
        let rep = psd_check(&t, order).unwrap();
        prop_assert!(rep.psd);
        prop_assert!(rep.certificate.is_none());
    }

    #[test]
    fn forms_are_nonnegative_and_match_apply(m in measure(), g in vector(40)) {
        let t = coefficient_table(&m, g.len(), GRID).unwrap();
        let q = quadratic_form_direct(&t, &g).unwrap();
        prop_assert!(q >= -1e-10 * t.t0() * g.norm_sqr());
        let tg = toeplitz_apply(&t, &g, g.len()).unwrap();
        let via_apply = g.inner(&tg);
        prop_assert!((via_apply.re - q).abs() <= 1e-10 * (1.0 + q.abs()));
    }

    #[test]
    fn closed_form_matches_direct_sum(terms in prop::collection::vec(term(), 1..=2), g in vector(60)) {
        let sym = Symbol::Sum(terms);
        let m = CircleMeasure::absolutely_continuous(sym.clone());
        let t = coefficient_table(&m, g.len(), GRID).unwrap();
        let direct = quadratic_form_direct(&t, &g).unwrap();
        let closed = closed_form_eval(&sym, &g, 1.0, GRID).unwrap();
        prop_assert!((direct - closed).abs() <= 1e-9 * direct.abs().max(1e-300));
    }

    #[test]
    fn closed_form_ladder_is_dominated_by_boundary(g in vector(20), r in 0.05..1.0f64) {
        // With w ≡ 1 the value is Σ|g_n|² r^{2n}.
        let one = Symbol::One(SymbolTerm::constant(1.0));
        let v = closed_form_eval(&one, &g, r, GRID).unwrap();
        let want: f64 = g.as_slice().iter().enumerate().map(|(n, c)| c.norm_sqr() * r.powi(2 * n as i32)).sum();
        prop_assert!((v - want).abs() <= 1e-12 * want.max(1e-300));
        prop_assert!(v <= g.norm_sqr() * (1.0 + 1e-12));
    }

    #[test]
    fn laurent_form_ignores_offset(terms in prop::collection::vec(term(), 1..=2), values in prop::collection::vec(complex(), 1..30), offset in -50i64..50) {
        let sym = Symbol::Sum(terms);
        let a = laurent_form_eval(&sym, &BilateralVector::new(offset, values.clone()), GRID).unwrap();
        let b = laurent_form_eval(&sym, &BilateralVector::new(0, values), GRID).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn extension_samples_the_polynomial(g in vector(50), r in 0.1..1.0f64) {
        let ext = analytic_extension_eval(&g, r, 64).unwrap();
        for k in (0..64).step_by(7) {
            let z = Complex64::from_polar(r, grid_angle(k, 64));
            prop_assert!((ext.samples[k] - polynomial_at(g.as_slice(), z)).norm() < 1e-11);
        }
    }

    #[test]
    fn riesz_projection_contracts_unweighted(f in prop::collection::vec(complex(), 256)) {
        let p = riesz_project(&f).unwrap();
        let pp = riesz_project(&p).unwrap();
        for (a, b) in p.iter().zip(&pp) {
            prop_assert!((a - b).norm() < 1e-14);
        }
        let ratio = weighted_ratio(&f, &vec![1.0; 256]).unwrap();
        prop_assert!(ratio <= 1.0 + 1e-10);
    }

    #[test]
    fn muckenhoupt_estimates_are_at_least_one_and_scale_free(alpha in 0.0..0.9f64, scale in 0.1..10.0f64) {
        let base = muckenhoupt_estimate(&SymbolTerm::power(alpha).into(), 5, 1024).unwrap();
        let scaled = Symbol::One(SymbolTerm::Builtin(semitoeplitz::Builtin::Power { alpha, scale: Some(scale) }));
        let other = muckenhoupt_estimate(&scaled, 5, 1024).unwrap();
        for (a, b) in base.estimates().iter().zip(other.estimates()) {
            prop_assert!(*a >= 1.0 - 1e-12);
            prop_assert!((a - b).abs() <= 1e-12 * a);
        }
    }

    #[test]
    fn hankel_moments_inside_unit_interval(rho in 0.1..0.95f64, x in -0.95..0.95f64, mass in 0.1..2.0f64) {
        let m = LineMeasure::uniform(-rho, rho).with_atom(x * rho, mass);
        let q = power_moments(&m, 80).unwrap();
        let q0 = q.get(0);
        for n in 0..=80 {
            prop_assert!(q.get(n).abs() <= q0 * rho.powi(n as i32) * (1.0 + 1e-12) + 1e-15);
        }
        let v = hankel_classify(&m).unwrap();
        prop_assert_eq!(v.status, Status::Closable);
        let Evidence::Support(e) = v.evidence else { unreachable!() };
        prop_assert!(e.agrees);
    }

    #[test]
    fn hankel_form_is_nonnegative(x in prop::collection::vec(-3.0..3.0f64, 1..4), g in vector(8)) {
        let mut m = LineMeasure::uniform(-1.0, 1.0);
        for (i, xi) in x.iter().enumerate() {
            m = m.with_atom(xi + 1e-3 * i as f64, 0.5);
        }
        let q: MomentSequence = power_moments(&m, 2 * g.len()).unwrap();
        let v = hankel_form(&q, &g).unwrap();
        let scale: f64 = q.moments.iter().map(|v| v.abs()).fold(0.0, f64::max);
        prop_assert!(v >= -1e-12 * scale * g.norm_sqr());
    }
}
