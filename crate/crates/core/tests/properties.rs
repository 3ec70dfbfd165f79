use core::f64::consts::PI;

use proptest::prelude::*;
use zeno_core::decay::{
    classical_survival, gaussian_zeno_limit, quantum_short_time_survival, repeated_survival, ClassicalDecayParams,
    MeasurementSchedule, ZenoParams,
};
use zeno_core::pipeline::{landau_peierls_max_n, make_survival_curve, MeasurementCount, SurvivalLaw};
use zeno_core::quadrature::{flat_band_kernel_oracle, integrate, principal_value};
use zeno_core::response_first::regulated_first_response;
use zeno_core::response_first::{renormalized_value, QubitFieldParams};
use zeno_core::response_second::{
    flat_band_kernel, flat_band_kernel_integrated, shifted_vacuum_piece, sin_cos_overlap, small_time_coeff_p,
    DEGENERATE_REL,
};
use zeno_core::specfun::{cos_deficit_integral, cos_integral, sin_integral, EULER_GAMMA};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn si_is_odd(z in -1e3f64..1e3) {
        prop_assert_eq!(sin_integral(-z).unwrap().value, -sin_integral(z).unwrap().value);
    }

    #[test]
    fn landau_peierls_bracket(t in 1e-3f64..1e3, e in 1e-3f64..1e2, neg in any::<bool>()) {
        let e = if neg { -e } else { e };
        let n = landau_peierls_max_n(t, e).unwrap();
        let x = t * e.abs();
        if x <= 1.0 {
            prop_assert_eq!(n, 0);
        } else {
            prop_assert!((n as f64) < x);
            prop_assert!((n + 1) as f64 >= x);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn si_asymptote(z in 20f64..1e4) {
        let s = sin_integral(z).unwrap().value;
        prop_assert!((s - (PI / 2.0 - z.cos() / z)).abs() <= 2.0 / (z * z));
    }

    #[test]
    fn deficit_identity(x in 1e-3f64..50.0) {
        let d = cos_deficit_integral(x).unwrap().value;
        let ci = cos_integral(x).unwrap().value;
        prop_assert!((d - (ci - EULER_GAMMA - x.ln())).abs() < 1e-12 * (1.0 + ci.abs() + x.ln().abs()));
    }

    #[test]
    fn quadrature_linearity(alpha in -3f64..3.0, beta in -3f64..3.0, k in 0.1f64..10.0, b in 0.1f64..5.0) {
        let f = |x: f64| (k * x).sin() * x;
        let g = |x: f64| (-x * x).exp();
        let fi = integrate(f, 0.0, b, 1e-13).unwrap();
        let gi = integrate(g, 0.0, b, 1e-13).unwrap();
        let hi = integrate(|x| alpha * f(x) + beta * g(x), 0.0, b, 1e-13).unwrap();
        let bound = hi.est_abs_error + alpha.abs() * fi.est_abs_error + beta.abs() * gi.est_abs_error + 1e-13;
        prop_assert!((hi.value - (alpha * fi.value + beta * gi.value)).abs() <= 10.0 * bound);
    }

    #[test]
    fn quadrature_additivity(a in -5f64..0.0, m in 0f64..1.0, c in 0.1f64..5.0) {
        let f = |x: f64| (3.0 * x).cos() / (1.0 + x * x);
        let b = a + m * (c - a);
        let whole = integrate(f, a, c, 1e-13).unwrap();
        let left = integrate(f, a, b, 1e-13).unwrap();
        let right = integrate(f, b, c, 1e-13).unwrap();
        let bound = whole.est_abs_error + left.est_abs_error + right.est_abs_error + 1e-13;
        prop_assert!((whole.value - left.value - right.value).abs() <= 10.0 * bound);
    }

    #[test]
    fn pv_of_odd_integrand_vanishes(s in -5f64..5.0, h in 0.1f64..10.0, k in 0.1f64..5.0) {
        let r = principal_value(|x| (k * (x - s)).cos() / (x - s), s, s - h, s + h, 1e-12).unwrap();
        prop_assert!(r.value.abs() < 1e-12);
    }

    #[test]
    fn kernel_oracle_matches_antiderivative(xi in 0.01f64..30.0, a in 0.05f64..5.0) {
        let q = flat_band_kernel_oracle(xi, a, 1e-13).unwrap().value;
        let c = flat_band_kernel_integrated(xi, a).unwrap();
        prop_assert!((q - c).abs() < 1e-10);
    }

    #[test]
    fn kernel_homogeneity(xi in 0.05f64..20.0, a in 0.05f64..5.0, s in 0.1f64..10.0) {
        let lhs = flat_band_kernel(xi / s, a * s).unwrap();
        let rhs = s * s * flat_band_kernel(xi, a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()) * s * s);
    }

    #[test]
    fn overlap_identity(e in -5f64..5.0, a in 0.05f64..5.0, dt in 0.01f64..10.0) {
        prop_assume!((e.abs() - a).abs() > 1e-3);
        let q = integrate(|x| (a * x).sin() * (e * x).cos(), 0.0, dt, 1e-13).unwrap().value;
        prop_assert!((sin_cos_overlap(e, a, dt) - q).abs() < 1e-10);
    }

    #[test]
    fn overlap_degenerate_branch(a in 0.05f64..5.0, dt in 0.01f64..10.0, neg in any::<bool>()) {
        let e = if neg { -a } else { a };
        let expected = (1.0 - (2.0 * a * dt).cos()) / (4.0 * a);
        prop_assert!((sin_cos_overlap(e, a, dt) - expected).abs() < 1e-12);
        let near = e * (1.0 + 0.1 * DEGENERATE_REL);
        prop_assert!((sin_cos_overlap(near, a, dt) - expected).abs() < 1e-12);
    }

    #[test]
    fn delegation(e in -5f64..5.0, a in -5f64..5.0, dt in 0.1f64..5.0, s in 1e-4f64..1e-2) {
        let eps = s * dt;
        prop_assert_eq!(
            shifted_vacuum_piece(e, a, dt, eps).unwrap(),
            regulated_first_response(e + a, dt, eps).unwrap()
        );
    }

    #[test]
    fn p_is_positive(e in 1e-3f64..20.0, a in 1e-3f64..20.0, neg in any::<bool>()) {
        let e = if neg { -e } else { e };
        prop_assert!(small_time_coeff_p(e, a).unwrap() > 0.0);
        prop_assert!(small_time_coeff_p(a, a).unwrap() > 0.0);
    }

    #[test]
    fn renormalized_response_is_nonnegative_and_even(e in 1e-3f64..5.0, dt in 0f64..10.0) {
        let v = renormalized_value(e, dt).unwrap();
        prop_assert!(v >= 0.0);
        prop_assert_eq!(v, renormalized_value(-e, dt).unwrap());
    }

    #[test]
    fn classical_semigroup(t1 in 0f64..10.0, t2 in 0f64..10.0, tau in 0.1f64..10.0) {
        let p = ClassicalDecayParams::new(tau).unwrap();
        let lhs = classical_survival(t1 + t2, p).unwrap();
        let rhs = classical_survival(t1, p).unwrap() * classical_survival(t2, p).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn quadratic_law_favours_split_intervals(frac in 1e-3f64..0.499, tau in 0.1f64..10.0) {
        // 1 − 4r² < (1 − r²)²: one long interval loses more than two short ones.
        let z = ZenoParams::new(tau).unwrap();
        let t = frac * tau;
        let one = quantum_short_time_survival(t, z).unwrap();
        prop_assert!(quantum_short_time_survival(2.0 * t, z).unwrap() < one * one);
    }

    #[test]
    fn continuous_limit_curve_is_exponential(sigma in 1e-3f64..0.1, e in 0.1f64..5.0, a in 0.1f64..5.0, t in 0.1f64..50.0) {
        let qubit = QubitFieldParams::new(-e, sigma).unwrap();
        let law = SurvivalLaw::ContinuousLimit { qubit, a, count: MeasurementCount::Infinite };
        let curve = make_survival_curve(&law, t, 9).unwrap();
        let tau_c = 1.0 / (sigma * small_time_coeff_p(-e, a).unwrap());
        let classical = make_survival_curve(&SurvivalLaw::Classical(ClassicalDecayParams::new(tau_c).unwrap()), t, 9).unwrap();
        prop_assert_eq!(curve.points, classical.points);
    }
}

#[test]
fn gaussian_product_is_monotone_in_n() {
    let z = ZenoParams::new(1.0).unwrap();
    for &t in &[0.1, 0.5, 1.0, 2.0] {
        let mut prev = 0.0;
        for k in 0..=15 {
            let s = MeasurementSchedule::new(t, 1u64 << k).unwrap();
            let v = repeated_survival(s, |dt| quantum_short_time_survival(dt, z)).unwrap();
            assert!(v >= prev, "T={t} N=2^{k}");
            assert!(gaussian_zeno_limit(s, z) <= 1.0);
            prev = v;
        }
        assert!(prev > 1.0 - t * t / 32768.0 - 1e-12);
    }
}
