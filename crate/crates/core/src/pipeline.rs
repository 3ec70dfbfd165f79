//! Survival after `N` equally spaced measurements, its continuous-observation
//! limit, the Landau–Peierls cap on `N`, and sampled survival curves.

use alloc::vec::Vec;

use crate::decay::{
    classical_survival, quantum_short_time_survival, repeated_survival, ClassicalDecayParams, MeasurementSchedule,
    ZenoParams,
};
use crate::error::{domain, Error, Result};
use crate::response_first::{decay_probability_first, small_time_coefficients, QubitFieldParams};
use crate::response_second::{small_time_coeff_p, small_time_coeff_q, FieldState};

/// Number of measurements, with continuous observation as a first-class value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementCount {
    Finite(u64),
    Infinite,
}

impl MeasurementCount {
    fn reciprocal(self) -> f64 {
        match self {
            MeasurementCount::Finite(n) => 1.0 / n as f64,
            MeasurementCount::Infinite => 0.0,
        }
    }
}

/// Linear and quadratic coefficients of the per-interval transition probability
/// (before multiplying by `σ`) in intervals after the first.
fn later_interval_coefficients(energy: f64, state: FieldState) -> Result<(f64, f64)> {
    match state {
        FieldState::Vacuum => Ok(small_time_coefficients(energy)),
        FieldState::FlatBand { a, density } => {
            if density != 1.0 {
                return Err(Error::Unsupported(
                    "flat-band small-interval coefficients are defined for unit occupation",
                ));
            }
            Ok((small_time_coeff_p(energy, a)?, small_time_coeff_q(energy, a)?))
        }
    }
}

/// `[1 − σF_ren(E, T/N)]·[1 − σ(pT/N + qT²/N²)]^{N−1}`.
///
/// The first factor uses the full renormalized vacuum response; the later
/// factors use the two-term small-interval expansion for the field state left
/// behind by the first interval.
pub fn survival_after_n(
    params: QubitFieldParams,
    state_after_first: FieldState,
    schedule: MeasurementSchedule,
) -> Result<f64> {
    let dt = schedule.interval();
    let first = decay_probability_first(params, dt)?;
    if first.probability < 0.0 {
        return Err(Error::PerturbationBreakdown {
            probability: first.probability,
        });
    }
    let (p, q) = later_interval_coefficients(params.energy(), state_after_first)?;
    let later = params.sigma() * (p * dt + q * dt * dt);
    if !(0.0..=1.0).contains(&later) {
        return Err(Error::PerturbationBreakdown { probability: later });
    }
    let n_rest = (schedule.count() - 1) as f64;
    Ok(first.survival() * libm::exp(n_rest * libm::log1p(-later)))
}

/// Effective lifetime `τ_c = 1/(σ p(E, a))` of the continuous-observation limit.
pub fn effective_lifetime(params: QubitFieldParams, a: f64) -> Result<f64> {
    Ok(1.0 / (params.sigma() * small_time_coeff_p(params.energy(), a)?))
}

/// `exp(−σpT − σqT²/N)`; at `N = ∞` the pure exponential `exp(−T/τ_c)`.
pub fn survival_continuous_limit(
    params: QubitFieldParams,
    a: f64,
    total_time: f64,
    count: MeasurementCount,
) -> Result<f64> {
    if !(total_time >= 0.0) || !total_time.is_finite() {
        return Err(domain("total time must be finite and non-negative", total_time));
    }
    let tau_c = effective_lifetime(params, a)?;
    let q = small_time_coeff_q(params.energy(), a)?;
    let finite_n = params.sigma() * q * total_time * total_time * count.reciprocal();
    Ok(libm::exp(-total_time / tau_c - finite_n))
}

/// Largest `N` with `N < T·|E|`; zero when `T·|E| <= 1`.
pub fn landau_peierls_max_n(total_time: f64, energy: f64) -> Result<u64> {
    if !(total_time > 0.0) || !total_time.is_finite() {
        return Err(domain("total time must be positive", total_time));
    }
    if energy == 0.0 || !energy.is_finite() {
        return Err(domain("energy gap must be finite and non-zero", energy));
    }
    let x = total_time * energy.abs();
    if x <= 1.0 {
        return Ok(0);
    }
    let n = libm::ceil(x) - 1.0;
    if n >= u64::MAX as f64 {
        return Ok(u64::MAX);
    }
    Ok(n as u64)
}

/// Which law produced a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawTag {
    Classical,
    GaussianZeno,
    FirstOrderVacuum,
    FlatBandSequence,
    ContinuousLimit,
}

/// A survival law together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurvivalLaw {
    /// `exp(−t/τ_E)`.
    Classical(ClassicalDecayParams),
    /// `[P(t/N)]^N` with the quadratic short-time law `P`.
    GaussianZeno { zeno: ZenoParams, count: u64 },
    /// `1 − σF_ren(E, t)`: a single measurement at time `t`.
    FirstOrderVacuum(QubitFieldParams),
    /// [`survival_after_n`] with `N` measurements spread over `[0, t]`.
    FlatBandSequence {
        qubit: QubitFieldParams,
        state: FieldState,
        count: u64,
    },
    /// [`survival_continuous_limit`].
    ContinuousLimit {
        qubit: QubitFieldParams,
        a: f64,
        count: MeasurementCount,
    },
}

impl SurvivalLaw {
    pub fn tag(&self) -> LawTag {
        match self {
            SurvivalLaw::Classical(_) => LawTag::Classical,
            SurvivalLaw::GaussianZeno { .. } => LawTag::GaussianZeno,
            SurvivalLaw::FirstOrderVacuum(_) => LawTag::FirstOrderVacuum,
            SurvivalLaw::FlatBandSequence { .. } => LawTag::FlatBandSequence,
            SurvivalLaw::ContinuousLimit { .. } => LawTag::ContinuousLimit,
        }
    }

    fn measurements(&self) -> Option<MeasurementCount> {
        match *self {
            SurvivalLaw::GaussianZeno { count, .. } | SurvivalLaw::FlatBandSequence { count, .. } => {
                Some(MeasurementCount::Finite(count))
            }
            SurvivalLaw::ContinuousLimit { count, .. } => Some(count),
            _ => None,
        }
    }

    /// Survival probability at time `t >= 0`.
    pub fn survival_at(&self, t: f64) -> Result<f64> {
        match *self {
            SurvivalLaw::Classical(p) => classical_survival(t, p),
            SurvivalLaw::GaussianZeno { zeno, count } => {
                if t == 0.0 {
                    return Ok(1.0);
                }
                repeated_survival(MeasurementSchedule::new(t, count)?, |dt| {
                    quantum_short_time_survival(dt, zeno)
                })
            }
            SurvivalLaw::FirstOrderVacuum(q) => decay_probability_first(q, t).map(|d| d.survival()),
            SurvivalLaw::FlatBandSequence { qubit, state, count } => {
                if t == 0.0 {
                    return Ok(1.0);
                }
                survival_after_n(qubit, state, MeasurementSchedule::new(t, count)?)
            }
            SurvivalLaw::ContinuousLimit { qubit, a, count } => survival_continuous_limit(qubit, a, t, count),
        }
    }
}

/// Survival sampled on a uniform grid over `[0, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    pub total_time: f64,
    pub measurements: Option<MeasurementCount>,
    pub law: LawTag,
    /// `(time, survival)`, times strictly increasing from 0.
    pub points: Vec<(f64, f64)>,
}

impl SurvivalCurve {
    /// Largest pointwise absolute difference against a curve on the same grid.
    pub fn max_abs_diff(&self, other: &SurvivalCurve) -> Result<f64> {
        if self.points.len() != other.points.len() || self.points.iter().zip(&other.points).any(|(a, b)| a.0 != b.0) {
            return Err(Error::Unsupported("curves are sampled on different grids"));
        }
        Ok(self
            .points
            .iter()
            .zip(&other.points)
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0, f64::max))
    }
}

/// Sample `law` at `num_points` equally spaced times from 0 to `total_time`.
pub fn make_survival_curve(law: &SurvivalLaw, total_time: f64, num_points: usize) -> Result<SurvivalCurve> {
    if num_points < 2 {
        return Err(domain("a curve needs at least two points", num_points as f64));
    }
    if !(total_time > 0.0) || !total_time.is_finite() {
        return Err(domain("total time must be positive and finite", total_time));
    }
    let last = (num_points - 1) as f64;
    let points = (0..num_points)
        .map(|i| {
            let t = total_time * i as f64 / last;
            let s = law.survival_at(t)?;
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::NotAProbability { value: s });
            }
            Ok((t, s))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurvivalCurve {
        total_time,
        measurements: law.measurements(),
        law: law.tag(),
        points,
    })
}

/// A measurement sequence capped at the Landau–Peierls bound next to the
/// continuous-observation exponential.
#[derive(Debug, Clone, PartialEq)]
pub struct LandauPeierlsComparison {
    pub count: u64,
    pub capped: SurvivalCurve,
    pub limit: SurvivalCurve,
    pub max_abs_diff: f64,
}

/// Cap `N` at [`landau_peierls_max_n`]`(T, E)` and compare the resulting
/// sequence with the `N = ∞` exponential on the same grid.
pub fn landau_peierls_comparison(
    qubit: QubitFieldParams,
    a: f64,
    total_time: f64,
    num_points: usize,
) -> Result<LandauPeierlsComparison> {
    let count = landau_peierls_max_n(total_time, qubit.energy())?;
    if count == 0 {
        return Err(Error::Unsupported("the Landau–Peierls bound permits no measurement"));
    }
    let state = FieldState::flat_band(a, 1.0)?;
    let capped = make_survival_curve(
        &SurvivalLaw::FlatBandSequence { qubit, state, count },
        total_time,
        num_points,
    )?;
    let limit = make_survival_curve(
        &SurvivalLaw::ContinuousLimit {
            qubit,
            a,
            count: MeasurementCount::Infinite,
        },
        total_time,
        num_points,
    )?;
    let max_abs_diff = capped.max_abs_diff(&limit)?;
    Ok(LandauPeierlsComparison {
        count,
        capped,
        limit,
        max_abs_diff,
    })
}
