//! Response of a two-level system coupled to the vacuum of a massless scalar
//! field over a single measurement interval `Δτ`.
//!
//! The regulated response splits into a constant-weight piece [`f1_piece`] and a
//! piece [`f2_piece`] that diverges as `ln ε`. Subtracting the counterterm
//! [`counterterm`] leaves the regulator-free response; for the decay branch
//! (`E < 0`) it equals the closed form returned by [`response_renormalized`].
//!
//! Sign convention: `E = −ω < 0` is decay from the excited state, `E = +ω > 0`
//! is excitation from the ground state.

use core::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quadrature::{Integrator, QuadratureResult};
use crate::specfun::{cin, cos_integral, heaviside, si, EULER_GAMMA};

/// First-order transition probabilities above this value are flagged as
/// marginal for perturbation theory.
pub const PERTURBATIVE_WARNING: f64 = 0.1;

const TWO_PI_SQ: f64 = 2.0 * PI * PI;

/// Energy gap and effective coupling `σ = λ²|⟨e|m|g⟩|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitFieldParams {
    energy: f64,
    sigma: f64,
}

impl QubitFieldParams {
    pub fn new(energy: f64, sigma: f64) -> Result<Self> {
        if energy == 0.0 || !energy.is_finite() {
            return Err(domain("energy gap must be finite and non-zero", energy));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(domain("coupling must be finite and non-negative", sigma));
        }
        Ok(Self { energy, sigma })
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Pieces of the single-interval response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponseBreakdown {
    /// Constant-weight piece (regulator independent).
    pub piece1: f64,
    /// `|ξ|`-weight piece with the logarithmic counterterm removed.
    pub piece2: f64,
    /// Renormalized closed form (even in `E`).
    pub renormalized: f64,
    /// Coefficient of `Δτ` in the small-interval expansion of `renormalized`.
    pub linear_coeff: f64,
    /// Coefficient of `Δτ²` in the same expansion.
    pub quadratic_coeff: f64,
}

impl ResponseBreakdown {
    /// `piece1 + piece2`: the regulator-free response for either sign of `E`.
    pub fn piecewise_total(&self) -> f64 {
        self.piece1 + self.piece2
    }
}

/// The logarithmic counterterm `ln(Δτ/ε)/(2π²)` that renders the regulated
/// response finite.
pub fn counterterm(delta_tau: f64, epsilon: f64) -> f64 {
    libm::log(delta_tau / epsilon) / TWO_PI_SQ
}

/// `ln(Δτ/ε)` without the `1/(2π²)` normalisation of the response.
pub fn unnormalized_counterterm(delta_tau: f64, epsilon: f64) -> f64 {
    libm::log(delta_tau / epsilon)
}

fn check_interval(delta_tau: f64) -> Result<()> {
    if !(delta_tau > 0.0) || !delta_tau.is_finite() {
        return Err(domain("interval must be positive and finite", delta_tau));
    }
    Ok(())
}

/// Constant-weight piece:
/// `(Δτ/2π)[−E Θ(−E) + cos(EΔτ)/(πΔτ) + (|E|/π)(Si(|E|Δτ) − π/2)]`.
pub fn f1_piece(energy: f64, delta_tau: f64) -> Result<f64> {
    check_interval(delta_tau)?;
    if !energy.is_finite() {
        return Err(domain("energy must be finite", energy));
    }
    let abs_e = energy.abs();
    let x = abs_e * delta_tau;
    Ok(delta_tau / (2.0 * PI)
        * (-energy * heaviside(-energy)
            + libm::cos(energy * delta_tau) / (PI * delta_tau)
            + abs_e / PI * (si(x) - PI / 2.0)))
}

/// Logarithmic piece at finite regulator:
/// `(1/2π²)[−γ + Ci(|E|Δτ) − ln(ε|E|) − 1]`, continued to `E = 0` by its limit
/// `(1/2π²)[ln(Δτ/ε) − 1]`.
pub fn f2_piece(energy: f64, delta_tau: f64, epsilon: f64) -> Result<f64> {
    check_interval(delta_tau)?;
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(domain("regulator must be positive", epsilon));
    }
    if !energy.is_finite() {
        return Err(domain("energy must be finite", energy));
    }
    if energy == 0.0 {
        return Ok((libm::log(delta_tau / epsilon) - 1.0) / TWO_PI_SQ);
    }
    let abs_e = energy.abs();
    let ci = cos_integral(abs_e * delta_tau)?.value;
    Ok((-EULER_GAMMA + ci - libm::log(epsilon * abs_e) - 1.0) / TWO_PI_SQ)
}

/// Closed form of the regulated single-interval response at finite ε,
/// `f1_piece + f2_piece`.
pub fn regulated_first_response(energy: f64, delta_tau: f64, epsilon: f64) -> Result<f64> {
    Ok(f1_piece(energy, delta_tau)? + f2_piece(energy, delta_tau, epsilon)?)
}

/// Renormalized response
/// `(1/2π²)[x(π/2 + Si x) + cos(EΔτ) − 1 + ∫₀^x (cos ξ − 1)/ξ dξ]`, `x = |E|Δτ`,
/// with its pieces and small-interval coefficients.
pub fn response_renormalized(energy: f64, delta_tau: f64) -> Result<ResponseBreakdown> {
    if !(delta_tau >= 0.0) || !delta_tau.is_finite() {
        return Err(domain("interval must be finite and non-negative", delta_tau));
    }
    if !energy.is_finite() {
        return Err(domain("energy must be finite", energy));
    }
    let abs_e = energy.abs();
    let x = abs_e * delta_tau;
    let deficit = -cin(x);
    let renormalized = (x * (PI / 2.0 + si(x)) + libm::cos(energy * delta_tau) - 1.0 + deficit) / TWO_PI_SQ;
    let piece1 = if delta_tau > 0.0 {
        f1_piece(energy, delta_tau)?
    } else {
        1.0 / TWO_PI_SQ
    };
    let piece2 = (deficit - 1.0) / TWO_PI_SQ;
    let (linear_coeff, quadratic_coeff) = small_time_coefficients(energy);
    Ok(ResponseBreakdown {
        piece1,
        piece2,
        renormalized,
        linear_coeff,
        quadratic_coeff,
    })
}

/// Renormalized response value only.
pub fn renormalized_value(energy: f64, delta_tau: f64) -> Result<f64> {
    response_renormalized(energy, delta_tau).map(|b| b.renormalized)
}

/// Taylor coefficients of the renormalized response in `Δτ`:
/// `F_ren = |E|Δτ/(4π) + E²Δτ²/(8π²) + O(Δτ⁴)`.
///
/// Term by term: `x(π/2 + Si x) = πx/2 + x² + O(x⁴)`, `cos x − 1 = −x²/2 + O(x⁴)`,
/// and the deficit integral is `−x²/4 + O(x⁴)`; odd orders above the first vanish.
pub fn small_time_coefficients(energy: f64) -> (f64, f64) {
    (energy.abs() / (4.0 * PI), energy * energy / (4.0 * TWO_PI_SQ))
}

/// A first-order transition probability with its perturbative-validity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayProbability {
    pub probability: f64,
    /// Set when the probability exceeds [`PERTURBATIVE_WARNING`].
    pub marginal: bool,
}

impl DecayProbability {
    fn checked(probability: f64) -> Result<Self> {
        if !(probability <= 1.0) {
            return Err(Error::PerturbationBreakdown { probability });
        }
        Ok(Self {
            probability,
            marginal: probability > PERTURBATIVE_WARNING,
        })
    }

    /// Probability that no transition happened.
    pub fn survival(&self) -> f64 {
        1.0 - self.probability
    }
}

/// `σ·F_ren(E, Δτ)`.
pub fn decay_probability_first(params: QubitFieldParams, delta_tau: f64) -> Result<DecayProbability> {
    let f = renormalized_value(params.energy, delta_tau)?;
    DecayProbability::checked(params.sigma * f)
}

/// Truncation of the continuum integral: upper frequency and a caller-supplied
/// bound on the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuumCutoff {
    pub omega_max: f64,
    pub tail_bound: f64,
}

/// Transition probability into a continuum of final levels with density
/// `rho(ω_a)` above threshold `omega_c`:
/// `∫ ρ(ω_a) σ(ω_a) F_ren(ω_a − ω_e, Δτ) dω_a` up to `cutoff.omega_max`, plus the
/// tail bound.
pub fn continuum_decay_probability(
    rho: impl Fn(f64) -> f64,
    omega_c: f64,
    omega_e: f64,
    sigma_of_a: impl Fn(f64) -> f64,
    delta_tau: f64,
    cutoff: ContinuumCutoff,
    tol: f64,
) -> Result<DecayProbability> {
    if !(delta_tau >= 0.0) || !delta_tau.is_finite() {
        return Err(domain("interval must be finite and non-negative", delta_tau));
    }
    if !(cutoff.omega_max > omega_c) || !omega_c.is_finite() || !cutoff.omega_max.is_finite() {
        return Err(domain("cutoff must exceed the threshold", cutoff.omega_max));
    }
    if !(cutoff.tail_bound >= 0.0) || !cutoff.tail_bound.is_finite() {
        return Err(Error::Convergence {
            value: f64::NAN,
            est_abs_error: cutoff.tail_bound,
            subdivisions: 0,
        });
    }
    let integrand = |w: f64| {
        let density = rho(w);
        if density < 0.0 {
            return f64::NAN;
        }
        let f = renormalized_value(w - omega_e, delta_tau).unwrap_or(f64::NAN);
        density * sigma_of_a(w) * f
    };
    let QuadratureResult { value, .. } = Integrator::default().integrate(integrand, omega_c, cutoff.omega_max, tol)?;
    DecayProbability::checked(value + cutoff.tail_bound)
}
