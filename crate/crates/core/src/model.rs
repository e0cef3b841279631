//! Engine parameters, reduced variables and the analytic system–meter densities.
//!
//! After the coupling window `t̄`, the joint density of finding the system in
//! state `i` and the meter at reduced momentum `u` is
//!
//! ```text
//! q_0(u) = a √(2/π) exp(-2u²)
//! q_1(u) = b √(2/π) exp(-2(u + t̄)²)
//! ```
//!
//! i.e. the excited-state branch of the meter is kicked by `-t̄`.

use core::f64::consts::{FRAC_2_PI, PI};

use crate::error::{domain, Result};

/// Boltzmann constant in meV/K.
pub const K_B: f64 = 0.0861733;

/// `ln √(2/π)`, the log-normalization of a unit-weight branch density.
pub(crate) const LN_BRANCH_NORM: f64 = -0.22579135264472743;

#[inline]
pub(crate) fn branch_norm() -> f64 {
    libm::sqrt(FRAC_2_PI)
}

/// Which eigenstate of the working system a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Ground,
    Excited,
}

impl TryFrom<usize> for Branch {
    type Error = crate::Error;

    fn try_from(i: usize) -> Result<Self> {
        match i {
            0 => Ok(Branch::Ground),
            1 => Ok(Branch::Excited),
            _ => Err(domain("state index must be 0 or 1")),
        }
    }
}

impl Branch {
    pub fn index(self) -> usize {
        match self {
            Branch::Ground => 0,
            Branch::Excited => 1,
        }
    }
}

/// Physical inputs of the engine together with the thermal populations they
/// imply. Energies are in meV, temperatures in K.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineParams {
    pub delta_e: f64,
    pub t_sys: f64,
    /// The meter width combination `ħ²B`.
    pub hbar2b: f64,
    pub t_meter: f64,
    pub pop_a: f64,
    pub pop_b: f64,
}

/// Thermal populations `(a, b)` of a two-level system with gap `delta_e`
/// (meV) at `t_sys` (K). `b` is formed as `1 - a`, so `a + b == 1` exactly.
pub fn derive_populations(delta_e: f64, t_sys: f64) -> Result<(f64, f64)> {
    if !(delta_e.is_finite() && delta_e > 0.0) {
        return Err(domain("delta_e must be positive and finite"));
    }
    if !(t_sys.is_finite() && t_sys > 0.0) {
        return Err(domain("t_sys must be positive and finite"));
    }
    let a = 1.0 / (1.0 + libm::exp(-delta_e / (K_B * t_sys)));
    Ok((a, 1.0 - a))
}

impl EngineParams {
    /// Parameters with a zero-temperature meter.
    pub fn new(delta_e: f64, t_sys: f64, hbar2b: f64) -> Result<Self> {
        Self::with_meter_temperature(delta_e, t_sys, hbar2b, 0.0)
    }

    pub fn with_meter_temperature(
        delta_e: f64,
        t_sys: f64,
        hbar2b: f64,
        t_meter: f64,
    ) -> Result<Self> {
        let (pop_a, pop_b) = derive_populations(delta_e, t_sys)?;
        check_hbar2b(hbar2b)?;
        if !(t_meter.is_finite() && t_meter >= 0.0) {
            return Err(domain("t_meter must be finite and non-negative"));
        }
        Ok(Self {
            delta_e,
            t_sys,
            hbar2b,
            t_meter,
            pop_a,
            pop_b,
        })
    }

    /// Parameters at a given ratio `ΔE / (k_B T_S)`; `T_S` is solved for.
    pub fn from_gap_ratio(delta_e: f64, ratio: f64, hbar2b: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 0.0) {
            return Err(domain("gap ratio must be positive and finite"));
        }
        Self::new(delta_e, delta_e / (K_B * ratio), hbar2b)
    }

    /// Parameters from an explicit ground-state population `a ∈ [1/2, 1]`.
    ///
    /// This admits the two limits the temperature constructors cannot reach
    /// exactly: `a = 1/2` (`T_S = ∞`) and `a = 1` (`T_S = 0`).
    pub fn from_populations(delta_e: f64, pop_a: f64, hbar2b: f64) -> Result<Self> {
        if !(delta_e.is_finite() && delta_e > 0.0) {
            return Err(domain("delta_e must be positive and finite"));
        }
        if !(0.5..=1.0).contains(&pop_a) {
            return Err(domain("ground population must lie in [1/2, 1]"));
        }
        check_hbar2b(hbar2b)?;
        let pop_b = 1.0 - pop_a;
        let t_sys = if pop_b == 0.0 {
            0.0
        } else {
            delta_e / (K_B * libm::log(pop_a / pop_b))
        };
        Ok(Self {
            delta_e,
            t_sys,
            hbar2b,
            t_meter: 0.0,
            pop_a,
            pop_b,
        })
    }

    /// `ΔE / (k_B T_S)`.
    pub fn gap_ratio(&self) -> f64 {
        self.delta_e / (K_B * self.t_sys)
    }

    /// Copy with `ΔE` and `T_S` multiplied by `factor` (populations unchanged
    /// up to rounding).
    pub fn scaled_gap(&self, factor: f64) -> Result<Self> {
        Self::with_meter_temperature(
            self.delta_e * factor,
            self.t_sys * factor,
            self.hbar2b,
            self.t_meter,
        )
    }

    pub(crate) fn population(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Ground => self.pop_a,
            Branch::Excited => self.pop_b,
        }
    }
}

fn check_hbar2b(hbar2b: f64) -> Result<()> {
    if !(hbar2b.is_finite() && hbar2b > 0.0) {
        return Err(domain("hbar2b must be positive and finite"));
    }
    Ok(())
}

/// Reduced measurement time and reduced extraction threshold.
///
/// `u_prime` may be `±∞`: `+∞` attempts extraction on every cycle, `-∞` never.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub t_bar: f64,
    pub u_prime: f64,
}

impl OperatingPoint {
    pub fn new(t_bar: f64, u_prime: f64) -> Result<Self> {
        if !(t_bar.is_finite() && t_bar >= 0.0) {
            return Err(domain("t_bar must be finite and non-negative"));
        }
        if u_prime.is_nan() {
            return Err(domain("u_prime must not be NaN"));
        }
        Ok(Self { t_bar, u_prime })
    }

    /// Operating point whose threshold is irrelevant (information and
    /// measurement-cost quantities).
    pub fn at_time(t_bar: f64) -> Result<Self> {
        Self::new(t_bar, f64::INFINITY)
    }
}

/// Center of a branch's meter distribution in reduced momentum.
#[inline]
pub(crate) fn branch_center(branch: Branch, t_bar: f64) -> f64 {
    match branch {
        Branch::Ground => 0.0,
        Branch::Excited => -t_bar,
    }
}

/// `ln q_i(u)`; `-∞` for an empty branch.
#[inline]
pub fn log_joint_density(
    branch: Branch,
    u: f64,
    pt: &OperatingPoint,
    params: &EngineParams,
) -> f64 {
    let d = u - branch_center(branch, pt.t_bar);
    libm::log(params.population(branch)) + LN_BRANCH_NORM - 2.0 * d * d
}

/// Joint density `q_i(u, t̄)` per unit reduced momentum.
pub fn joint_density(i: usize, u: f64, pt: &OperatingPoint, params: &EngineParams) -> Result<f64> {
    let branch = Branch::try_from(i)?;
    Ok(joint_density_of(branch, u, pt, params))
}

#[inline]
pub(crate) fn joint_density_of(
    branch: Branch,
    u: f64,
    pt: &OperatingPoint,
    params: &EngineParams,
) -> f64 {
    let d = u - branch_center(branch, pt.t_bar);
    params.population(branch) * branch_norm() * libm::exp(-2.0 * d * d)
}

/// Meter marginal `q(u, t̄) = q_0 + q_1`.
pub fn meter_marginal(u: f64, pt: &OperatingPoint, params: &EngineParams) -> f64 {
    joint_density_of(Branch::Ground, u, pt, params)
        + joint_density_of(Branch::Excited, u, pt, params)
}

/// Posterior probability of system state `i` given meter outcome `u`.
///
/// Evaluated in the log domain so that outcomes far in the Gaussian tails
/// still give a finite posterior.
pub fn conditional_prob(
    i: usize,
    u: f64,
    pt: &OperatingPoint,
    params: &EngineParams,
) -> Result<f64> {
    let branch = Branch::try_from(i)?;
    if !u.is_finite() {
        return Err(domain("meter outcome must be finite"));
    }
    Ok(posterior(branch, u, pt, params))
}

#[inline]
pub(crate) fn posterior(branch: Branch, u: f64, pt: &OperatingPoint, params: &EngineParams) -> f64 {
    let d0 = u - branch_center(Branch::Ground, pt.t_bar);
    let d1 = u - branch_center(Branch::Excited, pt.t_bar);
    // Gaussian log-ratio of the competing branch against this one; the
    // posterior is pop / (pop + other_pop * e^x) and never forms 0/0.
    let (own, other, x) = match branch {
        Branch::Ground => (params.pop_a, params.pop_b, 2.0 * (d0 * d0 - d1 * d1)),
        Branch::Excited => (params.pop_b, params.pop_a, 2.0 * (d1 * d1 - d0 * d0)),
    };
    if own == 0.0 {
        return 0.0;
    }
    if other == 0.0 {
        return 1.0;
    }
    own / (own + other * libm::exp(x))
}

/// `√(2/π)`, exposed for tests and documentation of closed forms.
pub fn gaussian_peak() -> f64 {
    libm::sqrt(2.0 / PI)
}
