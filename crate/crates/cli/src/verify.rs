//! Registry of closed forms checked against the quadrature oracle.
//!
//! A failed oracle evaluation becomes a NaN difference and hence a FLAG; no
//! registry entry can abort the run.

use std::f64::consts::PI;

use zeno_core::quadrature::{
    flat_band_kernel_oracle, flat_band_response_oracle, integrate, regulated_limit, regulated_response,
    regulator_length, ResponseWeight, DEFAULT_REGULATOR_SCALES,
};
use zeno_core::response_first::{
    counterterm, f1_piece, f2_piece, renormalized_value, response_renormalized, small_time_coefficients,
    unnormalized_counterterm,
};
use zeno_core::response_second::{
    flat_band_kernel, flat_band_kernel_integrated, pv_piece, pv_piece_integrated, response_second_total,
    shifted_vacuum_piece, sin_cos_overlap, small_time_coeff_p, small_time_coeff_p_general, small_time_coeff_q,
    small_time_coeff_q_general, FieldState, KernelConvention,
};
use zeno_core::Result as CoreResult;

use crate::output::{Cell, Table};

const QUAD_TOL: f64 = 1e-11;

const TOL_PIECE: f64 = 1e-6;
const TOL_RENORMALIZED: f64 = 1e-4;
const TOL_SLOPE: f64 = 1e-3;
const TOL_COEFF: f64 = 1e-8;
const TOL_KERNEL: f64 = 1e-10;
const TOL_OVERLAP: f64 = 1e-10;
const TOL_EXACT: f64 = 1e-14;
const TOL_END_TO_END: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Flag,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Flag => "FLAG",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Entry {
    pub formula_id: String,
    pub anchor: &'static str,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn flag_count(&self) -> usize {
        self.entries.iter().filter(|e| e.verdict == Verdict::Flag).count()
    }

    pub fn get(&self, id: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.formula_id == id)
    }

    pub fn table(&self) -> Table {
        let mut t = Table::new(vec![
            "formula_id",
            "paper_anchor",
            "closed_form",
            "oracle",
            "abs_diff",
            "tolerance",
            "verdict",
        ]);
        for e in &self.entries {
            t.push(vec![
                Cell::Text(e.formula_id.clone()),
                e.anchor.into(),
                e.closed_form.into(),
                e.oracle.into(),
                e.abs_diff.into(),
                e.tolerance.into(),
                e.verdict.as_str().into(),
            ]);
        }
        t
    }
}

struct Builder {
    tol_override: Option<f64>,
    report: Report,
}

impl Builder {
    fn push(&mut self, id: String, anchor: &'static str, closed: CoreResult<f64>, oracle: CoreResult<f64>, tol: f64) {
        let closed_form = closed.unwrap_or(f64::NAN);
        let oracle = oracle.unwrap_or(f64::NAN);
        let abs_diff = (closed_form - oracle).abs();
        let tolerance = self.tol_override.unwrap_or(tol);
        // NaN compares false, so a failed evaluation is a FLAG.
        let verdict = if abs_diff <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Flag
        };
        debug_assert!(self.report.get(&id).is_none(), "duplicate formula_id {id}");
        self.report.entries.push(Entry {
            formula_id: id,
            anchor,
            closed_form,
            oracle,
            abs_diff,
            tolerance,
            verdict,
        });
    }
}

fn f(x: f64) -> String {
    crate::output::format_float(x)
}

fn limit(weight: ResponseWeight, e: f64, dt: f64, ct: impl Fn(f64) -> f64) -> CoreResult<f64> {
    regulated_limit(weight, e, dt, ct, QUAD_TOL).map(|s| s.extrapolated.unwrap_or(f64::NAN))
}

/// Coefficient of `ln ε` left in the regulated response after subtracting
/// `ct`, from the two smallest regulators of the default sweep.
fn residual_log_slope(e: f64, dt: f64, ct: impl Fn(f64) -> f64) -> CoreResult<f64> {
    let len = regulator_length(e, dt);
    let n = DEFAULT_REGULATOR_SCALES.len();
    let (e1, e2) = (
        DEFAULT_REGULATOR_SCALES[n - 2] * len,
        DEFAULT_REGULATOR_SCALES[n - 1] * len,
    );
    let y1 = regulated_response(ResponseWeight::Full, e, dt, e1, QUAD_TOL)?.value - ct(e1);
    let y2 = regulated_response(ResponseWeight::Full, e, dt, e2, QUAD_TOL)?.value - ct(e2);
    Ok((y1 - y2) / (e1.ln() - e2.ln()))
}

/// `F_ren(Δτ)/Δτ` extrapolated to `Δτ → 0` by one Richardson step.
fn richardson_linear(e: f64) -> CoreResult<f64> {
    let h = 1e-3 / e.abs();
    let g = |x: f64| renormalized_value(e, x).map(|v| v / x);
    Ok(2.0 * g(0.5 * h)? - g(h)?)
}

/// Slope of `F_ren(Δτ)/Δτ` at `Δτ → 0` from three samples, leading error removed.
fn richardson_quadratic(e: f64) -> CoreResult<f64> {
    let h = 1e-3 / e.abs();
    let g = |x: f64| renormalized_value(e, x).map(|v| v / x);
    let (g1, g2, g3) = (g(h)?, g(2.0 * h)?, g(3.0 * h)?);
    // With g(x) = c1 + c2 x + c4 x³ + …, s1 = c2 + 7c4h² and s2 = c2 + 13c4h².
    let s1 = (g2 - g1) / h;
    let s2 = (g3 - g1) / (2.0 * h);
    Ok((13.0 * s1 - 7.0 * s2) / 6.0)
}

/// Printed small-interval quadratic coefficient `αE²/(4π)`, `α = 1/2 − 3/(2π)`.
fn printed_alpha_coefficient(e: f64) -> f64 {
    let alpha = 0.5 - 3.0 / (2.0 * PI);
    alpha * e * e / (4.0 * PI)
}

/// `(2/4π²)∫₀^Δτ (Δτ − ξ) cos(Eξ) k(ξ) dξ` for the `sin(aξ)/ξ` part `k` of a kernel.
fn sin_term_oracle(e: f64, a: f64, dt: f64, coeff: f64) -> CoreResult<f64> {
    let pref = 2.0 / (4.0 * PI * PI);
    integrate(
        |x| {
            let sinc = if x == 0.0 { a } else { (a * x).sin() / x };
            pref * (dt - x) * (e * x).cos() * coeff * a * sinc
        },
        0.0,
        dt,
        1e-13,
    )
    .map(|r| r.value)
}

/// Build the full report. `tol_override` replaces every per-entry tolerance.
pub fn run_verification(tol_override: Option<f64>) -> Report {
    let mut b = Builder {
        tol_override,
        report: Report::default(),
    };

    // Single-interval response, piece by piece.
    for &(e, dt) in &[(-1.0, 1.0), (1.0, 1.0), (-2.0, 3.0)] {
        b.push(
            format!("f1(E={},dtau={})", f(e), f(dt)),
            "constant-weight response piece",
            f1_piece(e, dt),
            limit(ResponseWeight::Constant, e, dt, |_| 0.0),
            TOL_PIECE,
        );
        let eps = 1e-3 * dt;
        b.push(
            format!("f2_minus_counterterm(E={},dtau={})", f(e), f(dt)),
            "logarithmic response piece",
            f2_piece(e, dt, eps).map(|v| v - counterterm(dt, eps)),
            limit(ResponseWeight::Abs, e, dt, |x| counterterm(dt, x)),
            TOL_PIECE,
        );
    }

    for &e in &[-0.5, -1.0, -2.0] {
        for &dt in &[0.5, 1.0, 3.0] {
            b.push(
                format!("F_ren(E={},dtau={})", f(e), f(dt)),
                "renormalized response closed form",
                renormalized_value(e, dt),
                limit(ResponseWeight::Full, e, dt, |x| counterterm(dt, x)),
                TOL_RENORMALIZED,
            );
        }
    }

    let (e, dt) = (1.0, 1.0);
    let oracle = limit(ResponseWeight::Full, e, dt, |x| counterterm(dt, x));
    b.push(
        format!("F_ren(E={},dtau={})", f(e), f(dt)),
        "renormalized response closed form, excitation branch",
        renormalized_value(e, dt),
        oracle.clone(),
        TOL_RENORMALIZED,
    );
    b.push(
        format!("F_piecewise(E={},dtau={})", f(e), f(dt)),
        "sum of response pieces, excitation branch",
        response_renormalized(e, dt).map(|r| r.piecewise_total()),
        oracle,
        TOL_RENORMALIZED,
    );

    let (e, dt) = (-1.0, 1.0);
    b.push(
        format!("counterterm_log_slope(normalized,E={},dtau={})", f(e), f(dt)),
        "log counterterm ln(dtau/eps)/(2 pi^2)",
        Ok(0.0),
        residual_log_slope(e, dt, |x| counterterm(dt, x)),
        TOL_SLOPE,
    );
    b.push(
        format!("counterterm_log_slope(printed,E={},dtau={})", f(e), f(dt)),
        "log counterterm ln(dtau/eps) as printed",
        Ok(0.0),
        residual_log_slope(e, dt, |x| unnormalized_counterterm(dt, x)),
        TOL_SLOPE,
    );

    for &e in &[-1.0, -2.0] {
        let (lin, quad) = small_time_coefficients(e);
        b.push(
            format!("F_ren_linear_coeff(E={})", f(e)),
            "small-interval linear coefficient |E|/(4 pi)",
            Ok(lin),
            richardson_linear(e),
            TOL_COEFF,
        );
        b.push(
            format!("F_ren_quadratic_coeff(E={})", f(e)),
            "small-interval quadratic coefficient E^2/(8 pi^2)",
            Ok(quad),
            richardson_quadratic(e),
            TOL_COEFF,
        );
        b.push(
            format!("F_ren_quadratic_coeff_printed_alpha(E={})", f(e)),
            "small-interval quadratic coefficient alpha E^2/(4 pi) as printed",
            Ok(printed_alpha_coefficient(e)),
            richardson_quadratic(e),
            TOL_COEFF,
        );
    }

    // Flat-band kernel at 20 points, printed and integrated forms.
    for i in 0..20 {
        let xi = 0.25 + 0.5 * i as f64;
        let a = [0.5, 1.0, 2.0, 3.0][i % 4];
        let oracle = flat_band_kernel_oracle(xi, a, 1e-13).map(|r| r.value);
        b.push(
            format!("g_printed(xi={},a={})", f(xi), f(a)),
            "flat-band kernel as printed",
            flat_band_kernel(xi, a),
            oracle.clone(),
            TOL_KERNEL,
        );
        b.push(
            format!("g_antiderivative(xi={},a={})", f(xi), f(a)),
            "flat-band kernel from its spectral integral",
            flat_band_kernel_integrated(xi, a),
            oracle,
            TOL_KERNEL,
        );
    }

    // Shifted vacuum pieces, regulator-free after one counterterm.
    for &(e, a, dt) in &[(-1.0, 2.0, 1.0), (-3.0, 1.0, 1.0), (-1.0, 1.0, 0.5)] {
        let eps = 1e-3 * dt;
        b.push(
            format!("shifted_piece(E={},a={},dtau={})", f(e), f(a), f(dt)),
            "vacuum response at shifted energy E+a",
            shifted_vacuum_piece(e, a, dt, eps).map(|v| v - counterterm(dt, eps)),
            limit(ResponseWeight::Full, e + a, dt, |x| counterterm(dt, x)),
            TOL_PIECE,
        );
    }

    // sin(a xi) contribution.
    for &(e, a, dt) in &[(-1.0, 1.0, 0.5), (-1.0, 2.0, 1.0)] {
        b.push(
            format!("f4_printed(E={},a={},dtau={})", f(e), f(a), f(dt)),
            "sin-term piece via principal values as printed",
            pv_piece(e, a, dt),
            sin_term_oracle(e, a, dt, -2.0),
            TOL_END_TO_END,
        );
        b.push(
            format!("f4_integrated(E={},a={},dtau={})", f(e), f(a), f(dt)),
            "sin-term piece from the integrated kernel",
            pv_piece_integrated(e, a, dt),
            sin_term_oracle(e, a, dt, 2.0),
            TOL_END_TO_END,
        );
    }

    // Elementary overlap integral, including the degenerate |E| = a branch.
    for &(e, a, dt) in &[(1.0, 2.0, PI), (-1.5, 0.5, 2.0), (0.3, 2.0, 5.0), (2.0, 2.0, 1.3)] {
        b.push(
            format!("sin_cos_overlap(E={},a={},dtau={})", f(e), f(a), f(dt)),
            "closed form of int_0^dtau sin(a xi) cos(E xi)",
            Ok(sin_cos_overlap(e, a, dt)),
            integrate(|x| (a * x).sin() * (e * x).cos(), 0.0, dt, 1e-13).map(|r| r.value),
            TOL_OVERLAP,
        );
    }

    // Linear coefficient p: branch values against side limits and the unreduced form.
    let (e, a) = (-1.0, 1.0);
    let side = 1.0 + 1e-12;
    b.push(
        format!("p_boundary_vs_inner_limit(E={},a={})", f(e), f(a)),
        "linear coefficient p at |E| = a vs limit from |E| < a",
        small_time_coeff_p(e, a),
        small_time_coeff_p(e, a * side),
        TOL_EXACT,
    );
    b.push(
        format!("p_boundary_vs_outer_limit(E={},a={})", f(e), f(a)),
        "linear coefficient p at |E| = a vs limit from |E| > a",
        small_time_coeff_p(e, a),
        small_time_coeff_p(e, a / side),
        TOL_EXACT,
    );
    for &(e, a) in &[(-1.0, 1.0), (-1.0, 2.0), (-3.0, 1.0), (2.0, 1.0)] {
        b.push(
            format!("p_branch_vs_unreduced(E={},a={})", f(e), f(a)),
            "linear coefficient p, branch form vs step-function form",
            small_time_coeff_p(e, a),
            small_time_coeff_p_general(e, a),
            TOL_EXACT,
        );
    }
    let (e, a) = (-1.0, 1.0);
    b.push(
        format!("q_boundary_vs_general(E={},a={})", f(e), f(a)),
        "quadratic coefficient q at |E| = a vs general form",
        small_time_coeff_q(e, a),
        small_time_coeff_q_general(e, a),
        TOL_EXACT,
    );

    // Non-vacuum second-interval response against direct quadrature with the spectral kernel.
    let (e, a, dt) = (-1.0, 1.0, 0.5);
    let eps = 1e-4 * dt;
    let oracle = flat_band_response_oracle(e, a, dt, 1e-12).map(|r| r.value);
    let state = FieldState::FlatBand { a, density: 1.0 };
    b.push(
        format!("F2_nonvacuum_integrated(E={},a={},dtau={})", f(e), f(a), f(dt)),
        "second-interval response, integrated-kernel assembly",
        response_second_total(e, state, dt, eps, KernelConvention::Integrated).map(|r| r.total - r.base_vacuum),
        oracle.clone(),
        TOL_END_TO_END,
    );
    b.push(
        format!("F2_nonvacuum_printed(E={},a={},dtau={})", f(e), f(a), f(dt)),
        "second-interval response, printed assembly after subtraction",
        response_second_total(e, state, dt, eps, KernelConvention::Printed)
            .map(|r| r.total - r.base_vacuum - 4.0 * counterterm(dt, eps)),
        oracle,
        TOL_END_TO_END,
    );

    b.report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_recovers_coefficients() {
        let (lin, quad) = small_time_coefficients(-1.0);
        assert!((richardson_linear(-1.0).unwrap() - lin).abs() < 1e-10);
        assert!((richardson_quadratic(-1.0).unwrap() - quad).abs() < 1e-8);
    }

    #[test]
    fn ids_are_unique_and_verdicts_consistent() {
        let r = run_verification(None);
        let mut ids: Vec<&str> = r.entries.iter().map(|e| e.formula_id.as_str()).collect();
        let n = ids.len();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), n);
        for e in &r.entries {
            assert_eq!(
                e.verdict == Verdict::Pass,
                e.abs_diff <= e.tolerance,
                "{}",
                e.formula_id
            );
        }
    }

    #[test]
    fn tolerance_override_applies_everywhere() {
        let r = run_verification(Some(10.0));
        assert!(r.entries.iter().all(|e| e.tolerance == 10.0));
    }
}
