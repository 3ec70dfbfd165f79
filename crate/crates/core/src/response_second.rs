//! Response over the second measurement interval when the field is left in a
//! many-particle state with constant occupation on frequencies `[0, a]`.
//!
//! Two kernels are available. [`KernelConvention::Printed`] uses
//! `g(ξ, a) = −2/ξ² − 2cos(aξ)/ξ² − (2a/ξ) sin(aξ)` together with the reduction
//! of its last term to principal-value integrals.
//! [`KernelConvention::Integrated`] uses the kernel obtained by integrating
//! `2∫₀^a ω cos(ωξ) dω` directly, `2[a sin(aξ)/ξ + (cos(aξ) − 1)/ξ²]`. The two
//! differ in the sign of every `a`-dependent term and do not agree numerically;
//! [`crate::quadrature::flat_band_kernel_oracle`] evaluates the defining integral.

use core::f64::consts::PI;

use crate::error::{domain, Result};
use crate::quadrature::principal_value;
use crate::response_first::{counterterm, regulated_first_response};
use crate::specfun::{heaviside, si};

const PV_TOL: f64 = 1e-12;

/// Relative proximity below which `|E| = a` is treated as degenerate when
/// evaluating the sine–cosine overlap integral.
pub const DEGENERATE_REL: f64 = 1e-9;

/// State of the field at the start of the second interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldState {
    Vacuum,
    /// Constant occupation `density` on `[0, a]`.
    FlatBand {
        a: f64,
        density: f64,
    },
}

impl FieldState {
    pub fn flat_band(a: f64, density: f64) -> Result<Self> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(domain("band cutoff must be positive", a));
        }
        if !(density >= 0.0) || !density.is_finite() {
            return Err(domain("occupation density must be non-negative", density));
        }
        Ok(FieldState::FlatBand { a, density })
    }
}

/// Which flat-band kernel the assembly uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelConvention {
    #[default]
    Printed,
    Integrated,
}

/// Pieces of the second-interval response at finite regulator ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondResponseBreakdown {
    /// Vacuum contribution, identical to the first-interval regulated response.
    pub base_vacuum: f64,
    /// Term proportional to the vacuum response (twice it).
    pub vacuum_part: f64,
    /// Vacuum response evaluated at `E + a`.
    pub shifted_plus: f64,
    /// Vacuum response evaluated at `E − a`.
    pub shifted_minus: f64,
    /// Contribution of the `sin(aξ)/ξ` term.
    pub pv_part: f64,
    /// `base_vacuum + vacuum_part + shifted_plus + shifted_minus + pv_part`.
    pub total: f64,
    /// `total` minus one logarithmic counterterm per log-divergent vacuum-like term.
    pub renormalized: f64,
}

/// Flat-band kernel in the printed convention, `−2/ξ² − 2cos(aξ)/ξ² − (2a/ξ) sin(aξ)`.
pub fn flat_band_kernel(xi: f64, a: f64) -> Result<f64> {
    check_kernel_args(xi, a)?;
    let (s, c) = (libm::sin(a * xi), libm::cos(a * xi));
    Ok(-2.0 / (xi * xi) - 2.0 * c / (xi * xi) - 2.0 * a / xi * s)
}

/// Closed antiderivative of the defining integral,
/// `2[a sin(aξ)/ξ + (cos(aξ) − 1)/ξ²]`.
pub fn flat_band_kernel_integrated(xi: f64, a: f64) -> Result<f64> {
    check_kernel_args(xi, a)?;
    let (s, c) = (libm::sin(a * xi), libm::cos(a * xi));
    Ok(2.0 * (a * s / xi + (c - 1.0) / (xi * xi)))
}

fn check_kernel_args(xi: f64, a: f64) -> Result<()> {
    if xi == 0.0 || !xi.is_finite() {
        return Err(domain("kernel argument must be finite and non-zero", xi));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("band cutoff must be positive", a));
    }
    Ok(())
}

/// First-interval regulated response at the shifted energy `E + a_shift`.
pub fn shifted_vacuum_piece(energy: f64, a_shift: f64, delta_tau: f64, epsilon: f64) -> Result<f64> {
    regulated_first_response(energy + a_shift, delta_tau, epsilon)
}

/// `(cos(kΔτ) − 1)/(2k)`, written as `−sin²(kΔτ/2)/k` to stay accurate for small `k`.
fn half_cos_ratio(k: f64, delta_tau: f64) -> f64 {
    let s = libm::sin(0.5 * k * delta_tau);
    -s * s / k
}

/// `∫₀^Δτ sin(aξ) cos(Eξ) dξ`
/// `= (cos((E−a)Δτ) − 1)/(2(E−a)) − (cos((E+a)Δτ) − 1)/(2(E+a))`,
/// with the degenerate `|E| = a` case replaced by `(1 − cos 2aΔτ)/(4a)`.
pub fn sin_cos_overlap(energy: f64, a: f64, delta_tau: f64) -> f64 {
    let abs_e = energy.abs();
    if (abs_e - a).abs() < DEGENERATE_REL * abs_e.max(a) {
        let c = libm::cos(2.0 * a * delta_tau);
        return (1.0 - c) / (4.0 * a);
    }
    half_cos_ratio(energy - a, delta_tau) - half_cos_ratio(energy + a, delta_tau)
}

/// Principal-value form of the `sin(aξ)` contribution:
/// `−(aΔτ/8πi)[P∫ e^{−iξ(E−a)}/ξ − P∫ e^{−iξ(E+a)}/ξ] + (a/2π)∫₀^Δτ sin(aξ)cos(Eξ)dξ`,
/// both principal values over `[−Δτ, Δτ]` by quadrature. Real part.
pub fn pv_piece(energy: f64, a: f64, delta_tau: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("band cutoff must be positive", a));
    }
    if !(delta_tau > 0.0) || !delta_tau.is_finite() {
        return Err(domain("interval must be positive", delta_tau));
    }
    // P∫ e^{−iξk}/ξ dξ = P∫ cos(kξ)/ξ − i P∫ sin(kξ)/ξ
    let pv_exp = |k: f64| -> Result<(f64, f64)> {
        let re = principal_value(|x| libm::cos(k * x) / x, 0.0, -delta_tau, delta_tau, PV_TOL)?;
        let im = principal_value(|x| -libm::sin(k * x) / x, 0.0, -delta_tau, delta_tau, PV_TOL)?;
        Ok((re.value, im.value))
    };
    let (re_m, im_m) = pv_exp(energy - a)?;
    let (re_p, im_p) = pv_exp(energy + a)?;
    let (_b_re, b_im) = (re_m - re_p, im_m - im_p);
    // −(aΔτ/8πi)·B = (aΔτ/8π)·i·B, whose real part is −(aΔτ/8π)·Im B.
    let bracket = -(a * delta_tau / (8.0 * PI)) * b_im;
    Ok(bracket + a / (2.0 * PI) * sin_cos_overlap(energy, a, delta_tau))
}

/// `sin(aξ)` contribution for the integrated kernel,
/// `(a/2π²)[Δτ(Si((a+E)Δτ) + Si((a−E)Δτ)) − 2∫₀^Δτ sin(aξ)cos(Eξ)dξ]`.
pub fn pv_piece_integrated(energy: f64, a: f64, delta_tau: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("band cutoff must be positive", a));
    }
    if !(delta_tau >= 0.0) || !delta_tau.is_finite() {
        return Err(domain("interval must be non-negative", delta_tau));
    }
    let sis = si((a + energy) * delta_tau) + si((a - energy) * delta_tau);
    Ok(a / (2.0 * PI * PI) * (delta_tau * sis - 2.0 * sin_cos_overlap(energy, a, delta_tau)))
}

/// Assemble the second-interval response at finite ε.
pub fn response_second_total(
    energy: f64,
    state: FieldState,
    delta_tau: f64,
    epsilon: f64,
    convention: KernelConvention,
) -> Result<SecondResponseBreakdown> {
    let base_vacuum = regulated_first_response(energy, delta_tau, epsilon)?;
    let ct = counterterm(delta_tau, epsilon);
    let (a, density) = match state {
        FieldState::Vacuum => {
            return Ok(SecondResponseBreakdown {
                base_vacuum,
                vacuum_part: 0.0,
                shifted_plus: 0.0,
                shifted_minus: 0.0,
                pv_part: 0.0,
                total: base_vacuum,
                renormalized: base_vacuum - ct,
            })
        }
        FieldState::FlatBand { a, density } => (a, density),
    };
    let plus = shifted_vacuum_piece(energy, a, delta_tau, epsilon)?;
    let minus = shifted_vacuum_piece(energy, -a, delta_tau, epsilon)?;
    let (sign, pv, log_units) = match convention {
        KernelConvention::Printed => (1.0, pv_piece(energy, a, delta_tau)?, 4.0),
        KernelConvention::Integrated => (-1.0, pv_piece_integrated(energy, a, delta_tau)?, 0.0),
    };
    let vacuum_part = 2.0 * base_vacuum * density;
    let shifted_plus = sign * plus * density;
    let shifted_minus = sign * minus * density;
    let pv_part = pv * density;
    let total = base_vacuum + vacuum_part + shifted_plus + shifted_minus + pv_part;
    Ok(SecondResponseBreakdown {
        base_vacuum,
        vacuum_part,
        shifted_plus,
        shifted_minus,
        pv_part,
        total,
        renormalized: total - (1.0 + log_units * density) * ct,
    })
}

fn check_coeff_args(energy: f64, a: f64) -> Result<()> {
    if energy == 0.0 || !energy.is_finite() {
        return Err(domain("energy gap must be finite and non-zero", energy));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(domain("band cutoff must be positive", a));
    }
    Ok(())
}

/// Linear small-interval coefficient `p(E, a)`, branch by branch:
/// `(3|E| + 4a)/(4π)` for `|E| < a`, `5|E|/(4π)` for `|E| > a`, `|E|/π` at `|E| = a`.
pub fn small_time_coeff_p(energy: f64, a: f64) -> Result<f64> {
    check_coeff_args(energy, a)?;
    let abs_e = energy.abs();
    Ok(if abs_e < a {
        (3.0 * abs_e + 4.0 * a) / (4.0 * PI)
    } else if abs_e > a {
        5.0 * abs_e / (4.0 * PI)
    } else {
        abs_e / PI
    })
}

/// Unreduced form
/// `(1/4π)(3|E| + |E+a| + |E−a| + aΘ(a−E) − aΘ(−E−a) + aΘ(E+a))`.
pub fn small_time_coeff_p_general(energy: f64, a: f64) -> Result<f64> {
    check_coeff_args(energy, a)?;
    let e = energy;
    Ok(
        (3.0 * e.abs() + (e + a).abs() + (e - a).abs() + a * heaviside(a - e) - a * heaviside(-e - a)
            + a * heaviside(e + a))
            / (4.0 * PI),
    )
}

/// Quadratic small-interval coefficient `q(E, a) = (5E²(π − 3) − 2a²)/(8π²)`;
/// at `|E| = a` the equivalent form `(5π − 17)E²/(8π²)`.
pub fn small_time_coeff_q(energy: f64, a: f64) -> Result<f64> {
    check_coeff_args(energy, a)?;
    let e2 = energy * energy;
    Ok(if energy.abs() == a {
        (5.0 * PI - 17.0) * e2 / (8.0 * PI * PI)
    } else {
        q_general(energy, a)
    })
}

fn q_general(energy: f64, a: f64) -> f64 {
    (5.0 * energy * energy * (PI - 3.0) - 2.0 * a * a) / (8.0 * PI * PI)
}

/// `q` from the general formula regardless of branch.
pub fn small_time_coeff_q_general(energy: f64, a: f64) -> Result<f64> {
    check_coeff_args(energy, a)?;
    Ok(q_general(energy, a))
}

/// `p(E,a)Δτ + q(E,a)Δτ²`.
pub fn response_second_small_time(energy: f64, a: f64, delta_tau: f64) -> Result<f64> {
    if !(delta_tau >= 0.0) || !delta_tau.is_finite() {
        return Err(domain("interval must be finite and non-negative", delta_tau));
    }
    let p = small_time_coeff_p(energy, a)?;
    let q = small_time_coeff_q(energy, a)?;
    Ok(p * delta_tau + q * delta_tau * delta_tau)
}

/// True when `|E|Δτ` and `aΔτ` are both at most 0.1, where the two-term
/// expansion is meant to hold.
pub fn small_time_regime(energy: f64, a: f64, delta_tau: f64) -> bool {
    energy.abs() * delta_tau <= 0.1 && a * delta_tau <= 0.1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    #[test]
    fn printed_kernel_examples() {
        assert!(flat_band_kernel(PI, 1.0).unwrap().abs() < 1e-15);
        let v = flat_band_kernel(2.0 * PI, 1.0).unwrap();
        assert!((v + 1.0 / (PI * PI)).abs() < 1e-15);
        assert!(flat_band_kernel(0.0, 1.0).is_err());
        let o = flat_band_kernel_integrated(PI, 1.0).unwrap();
        assert!((o + 4.0 / (PI * PI)).abs() < 1e-15);
        assert!(flat_band_kernel_integrated(2.0 * PI, 1.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn overlap_worked_value() {
        let v = sin_cos_overlap(1.0, 2.0, PI);
        assert!((v - 4.0 / 3.0).abs() < 1e-14);
        let q = integrate(|x| libm::sin(2.0 * x) * libm::cos(x), 0.0, PI, 1e-13).unwrap();
        assert!((q.value - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_degenerate_branch() {
        for &(e, a, dt) in &[(1.0, 1.0, 0.7), (-2.0, 2.0, 3.1)] {
            let v = sin_cos_overlap(e, a, dt);
            let expected = (1.0 - libm::cos(2.0 * a * dt)) / (4.0 * a);
            assert!((v - expected).abs() < 1e-15);
        }
        // just outside the threshold the general form stays accurate
        let (a, dt) = (1.0, 0.9);
        let e = a * (1.0 + 1e-8);
        let limit = (1.0 - libm::cos(2.0 * a * dt)) / (4.0 * a);
        assert!((sin_cos_overlap(e, a, dt) - limit).abs() < 1e-7);
    }

    #[test]
    fn pv_piece_vanishes_with_band() {
        assert!(pv_piece(-1.0, 1e-8, 1.0).unwrap().abs() < 1e-7);
        assert!(pv_piece(-1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn pv_piece_matches_si_reduction() {
        let (e, a, dt) = (-1.0, 2.0, 1.5);
        let closed =
            a * dt / (4.0 * PI) * (si((e - a) * dt) - si((e + a) * dt)) + a / (2.0 * PI) * sin_cos_overlap(e, a, dt);
        assert!((pv_piece(e, a, dt).unwrap() - closed).abs() < 1e-11);
    }

    #[test]
    fn vacuum_and_zero_density() {
        let (e, dt, eps) = (-1.0, 0.5, 1e-3);
        let v = response_second_total(e, FieldState::Vacuum, dt, eps, KernelConvention::Printed).unwrap();
        assert_eq!(v.total, regulated_first_response(e, dt, eps).unwrap());
        let ren = crate::response_first::renormalized_value(e, dt).unwrap();
        assert!((v.renormalized - ren).abs() < 1e-13);
        for conv in [KernelConvention::Printed, KernelConvention::Integrated] {
            let z = response_second_total(e, FieldState::flat_band(1.0, 0.0).unwrap(), dt, eps, conv).unwrap();
            assert_eq!(z.total, v.total);
            assert!((z.renormalized - v.renormalized).abs() < 1e-15);
        }
    }

    #[test]
    fn bookkeeping_identity() {
        let st = FieldState::flat_band(1.3, 0.7).unwrap();
        for conv in [KernelConvention::Printed, KernelConvention::Integrated] {
            let b = response_second_total(-0.8, st, 0.9, 1e-4, conv).unwrap();
            let sum = b.base_vacuum + b.vacuum_part + b.shifted_plus + b.shifted_minus + b.pv_part;
            assert_eq!(b.total, sum);
        }
    }

    #[test]
    fn renormalized_is_regulator_free() {
        let st = FieldState::flat_band(1.0, 1.0).unwrap();
        for conv in [KernelConvention::Printed, KernelConvention::Integrated] {
            let a = response_second_total(-1.0, st, 0.5, 1e-3, conv).unwrap();
            let b = response_second_total(-1.0, st, 0.5, 1e-6, conv).unwrap();
            assert!((a.renormalized - b.renormalized).abs() < 1e-12);
        }
    }

    #[test]
    fn shifted_piece_delegation() {
        let (dt, eps) = (1.0, 1e-3);
        assert_eq!(
            shifted_vacuum_piece(-1.0, 0.0, dt, eps).unwrap(),
            regulated_first_response(-1.0, dt, eps).unwrap()
        );
        assert_eq!(
            shifted_vacuum_piece(-1.0, 1.0, dt, eps).unwrap(),
            regulated_first_response(0.0, dt, eps).unwrap()
        );
    }

    #[test]
    fn printed_coefficients() {
        assert!((small_time_coeff_p(-1.0, 2.0).unwrap() - 11.0 / (4.0 * PI)).abs() < 1e-14);
        assert!((small_time_coeff_p(-3.0, 1.0).unwrap() - 15.0 / (4.0 * PI)).abs() < 1e-14);
        assert!((small_time_coeff_p(-1.0, 1.0).unwrap() - 1.0 / PI).abs() < 1e-14);
        let q = small_time_coeff_q(-1.0, 1.0).unwrap();
        assert!((q - (5.0 * PI - 17.0) / (8.0 * PI * PI)).abs() < 1e-14);
        assert!((q - small_time_coeff_q_general(-1.0, 1.0).unwrap()).abs() < 1e-15);
        assert!((q + 0.016_364).abs() < 1e-6);
        assert!((small_time_coeff_q(-2.0, 1.0).unwrap() - 0.010_536).abs() < 1e-6);
        assert!(small_time_coeff_q(-1.0, 100.0).unwrap() < 0.0);
    }

    #[test]
    fn general_p_reduces_off_boundary_for_decay() {
        for &(e, a) in &[(-1.0, 2.0), (-3.0, 1.0), (-0.2, 5.0), (-7.0, 0.5)] {
            let g = small_time_coeff_p_general(e, a).unwrap();
            let b = small_time_coeff_p(e, a).unwrap();
            assert!((g - b).abs() < 1e-14, "E={e} a={a}: {g} vs {b}");
        }
        // at the boundary the unreduced form gives 6|E|/(4π), not |E|/π
        let g = small_time_coeff_p_general(-1.0, 1.0).unwrap();
        assert!((g - 6.0 / (4.0 * PI)).abs() < 1e-14);
    }

    #[test]
    fn small_time_value() {
        assert_eq!(response_second_small_time(-1.0, 2.0, 0.0).unwrap(), 0.0);
        let v = response_second_small_time(-1.0, 2.0, 0.01).unwrap();
        let q = (5.0 * (PI - 3.0) - 8.0) / (8.0 * PI * PI);
        assert!((v - (11.0 / (4.0 * PI) * 0.01 + q * 1e-4)).abs() < 1e-17);
        assert!((v - 8.7535e-3).abs() < 1e-5);
        assert!(small_time_regime(-1.0, 2.0, 0.01));
        assert!(!small_time_regime(-1.0, 2.0, 0.1));
    }
}
