//! Classical exponential decay, the short-time quadratic survival law and the
//! product law for repeated projective measurements.

use crate::error::{domain, Error, Result};

/// Lifetime of a classical exponential decay, `Γ = 1/τ_E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalDecayParams {
    tau_e: f64,
}

impl ClassicalDecayParams {
    pub fn new(tau_e: f64) -> Result<Self> {
        if !(tau_e > 0.0) || !tau_e.is_finite() {
            return Err(domain("lifetime must be positive and finite", tau_e));
        }
        Ok(Self { tau_e })
    }

    pub fn tau_e(&self) -> f64 {
        self.tau_e
    }

    pub fn rate(&self) -> f64 {
        1.0 / self.tau_e
    }
}

/// Zeno time of the short-time quadratic law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZenoParams {
    tau_z: f64,
}

impl ZenoParams {
    pub fn new(tau_z: f64) -> Result<Self> {
        if !(tau_z > 0.0) || !tau_z.is_finite() {
            return Err(domain("Zeno time must be positive and finite", tau_z));
        }
        Ok(Self { tau_z })
    }

    /// `τ_z = (⟨H²⟩ − ⟨H⟩²)^{−1/2}` from the first two energy moments of the
    /// initial state.
    pub fn from_moments(mean_h: f64, mean_h2: f64) -> Result<Self> {
        let var = mean_h2 - mean_h * mean_h;
        if !(var > 0.0) || !var.is_finite() {
            return Err(domain("energy variance must be positive", var));
        }
        Self::new(1.0 / libm::sqrt(var))
    }

    pub fn tau_z(&self) -> f64 {
        self.tau_z
    }
}

/// `N` equally spaced measurements over a total time `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSchedule {
    total_time: f64,
    count: u64,
}

impl MeasurementSchedule {
    pub fn new(total_time: f64, count: u64) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(domain("total time must be positive and finite", total_time));
        }
        if count == 0 {
            return Err(domain("at least one measurement is required", 0.0));
        }
        Ok(Self { total_time, count })
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `Δτ = T/N`.
    pub fn interval(&self) -> f64 {
        self.total_time / self.count as f64
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(domain("time must be finite and non-negative", t));
    }
    Ok(())
}

/// `exp(−t/τ_E)`.
pub fn classical_survival(t: f64, params: ClassicalDecayParams) -> Result<f64> {
    check_time(t)?;
    Ok(libm::exp(-t / params.tau_e))
}

/// `N₀ exp(−t/τ_E)`.
pub fn classical_population(t: f64, n0: f64, params: ClassicalDecayParams) -> Result<f64> {
    if !(n0 > 0.0) || !n0.is_finite() {
        return Err(domain("initial population must be positive", n0));
    }
    Ok(n0 * classical_survival(t, params)?)
}

/// `max(0, 1 − t²/τ_z²)`: the quadratic short-time law, clamped at zero past
/// its range of validity.
pub fn quantum_short_time_survival(t: f64, params: ZenoParams) -> Result<f64> {
    check_time(t)?;
    let r = t / params.tau_z;
    Ok((1.0 - r * r).max(0.0))
}

/// `[P(T/N)]^N` for a single-interval survival law `P`.
pub fn repeated_survival(
    schedule: MeasurementSchedule,
    single_interval_survival: impl Fn(f64) -> Result<f64>,
) -> Result<f64> {
    let p = single_interval_survival(schedule.interval())?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::NotAProbability { value: p });
    }
    Ok(powu(p, schedule.count))
}

/// `exp(−T²/(τ_z² N))`, the large-`N` form of the Gaussian product law.
pub fn gaussian_zeno_limit(schedule: MeasurementSchedule, params: ZenoParams) -> f64 {
    let r = schedule.total_time / params.tau_z;
    libm::exp(-r * r / schedule.count as f64)
}

/// `exp(−T²/(τ_z² N))` at an arbitrary `T >= 0`, `T = 0` included.
pub fn gaussian_zeno_limit_at(t: f64, count: u64, params: ZenoParams) -> Result<f64> {
    check_time(t)?;
    if count == 0 {
        return Err(domain("at least one measurement is required", 0.0));
    }
    let r = t / params.tau_z;
    Ok(libm::exp(-r * r / count as f64))
}

/// `x^n` by binary exponentiation; exact for `x ∈ {0, 1}`.
pub(crate) fn powu(x: f64, mut n: u64) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while n > 0 {
        if n & 1 == 1 {
            acc *= base;
        }
        base *= base;
        n >>= 1;
    }
    acc
}
