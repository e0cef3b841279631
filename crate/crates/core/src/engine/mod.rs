//! Thermodynamic functionals of one engine cycle.
//!
//! Energies are in meV. Power is work per unit of reduced time `t̄`; multiply
//! by `1/τ*` to get a physical rate.

use alloc::vec::Vec;

use crate::error::{domain, Result};
use crate::model::{
    branch_norm, joint_density_of, log_joint_density, posterior, Branch, EngineParams,
    OperatingPoint,
};
use crate::numerics::{integrate_with_breaks, log_sum_exp, phi, xlogx_unchecked, QuadratureSpec};
use crate::oracle::{self, GridSpec};

/// Per-cycle summary at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleReport {
    pub point: OperatingPoint,
    /// `I = S(0) - S(t̄)`, in units of `k_B`.
    pub info_gain: f64,
    /// Outcome-averaged conditional entropy `S(t̄)`, in units of `k_B`.
    pub s_cond: f64,
    pub w_meas: f64,
    pub w_prep: f64,
    pub w_in: f64,
    pub w_out: f64,
    /// Fraction of cycles that end in an extraction attempt.
    pub attempt_fraction: f64,
    /// `t_eff / t_m`; infinite when no cycle ever attempts extraction.
    pub t_eff_ratio: f64,
    pub efficiency: f64,
    pub power: f64,
    /// `efficiency * power`.
    pub product: f64,
}

impl CycleReport {
    pub fn evaluate(pt: &OperatingPoint, params: &EngineParams) -> Result<Self> {
        Self::evaluate_with_spec(pt, params, &QuadratureSpec::default())
    }

    pub fn evaluate_with_spec(
        pt: &OperatingPoint,
        params: &EngineParams,
        spec: &QuadratureSpec,
    ) -> Result<Self> {
        let s_cond = conditional_entropy_with(pt, params, spec)?;
        Ok(Self::assemble(pt, params, s_cond))
    }

    /// Builds a report from a precomputed conditional entropy. `S(t̄)` does
    /// not depend on the threshold, so sweeps reuse it along a column.
    pub fn assemble(pt: &OperatingPoint, params: &EngineParams, s_cond: f64) -> Self {
        let w_out = work_out(pt, params);
        let w_meas = work_meas(pt, params);
        let w_prep = work_prep(params);
        let w_in = w_meas + w_prep;
        let efficiency = efficiency_from(w_out, w_in);
        let power = power(pt, params);
        let attempt_fraction = attempt_fraction(pt, params);
        Self {
            point: *pt,
            info_gain: (initial_entropy(params) - s_cond).max(0.0),
            s_cond,
            w_meas,
            w_prep,
            w_in,
            w_out,
            attempt_fraction,
            t_eff_ratio: t_eff_ratio_from(attempt_fraction),
            efficiency,
            power,
            product: efficiency * power,
        }
    }

    /// Whether `W_out > W_in`, i.e. `η > 1/2`: the engine returns more work
    /// than the work it consumes.
    pub fn beats_heat_engine(&self) -> bool {
        self.efficiency > 0.5
    }
}

/// Initial system entropy `-(a ln a + b ln b)` in units of `k_B`.
pub fn initial_entropy(params: &EngineParams) -> f64 {
    -(xlogx_unchecked(params.pop_a) + xlogx_unchecked(params.pop_b))
}

/// Integration breaks covering both branch centers and their midpoint.
fn momentum_breaks(t_bar: f64, upper: f64, spec: &QuadratureSpec) -> Vec<f64> {
    let lo = -spec.domain_halfwidth - t_bar;
    let mut breaks = Vec::with_capacity(5);
    breaks.push(lo);
    for c in [-t_bar, -0.5 * t_bar, 0.0] {
        if c > lo && c < upper && breaks.last().is_some_and(|&last| c > last) {
            breaks.push(c);
        }
    }
    breaks.push(upper);
    breaks
}

/// Entropy density `Σ_i q_i ln(q / q_i)`, evaluated in the log domain.
fn entropy_density(u: f64, pt: &OperatingPoint, params: &EngineParams) -> f64 {
    let l0 = log_joint_density(Branch::Ground, u, pt, params);
    let l1 = log_joint_density(Branch::Excited, u, pt, params);
    let total = log_sum_exp(l0, l1);
    let term = |l: f64| {
        if l == f64::NEG_INFINITY {
            0.0
        } else {
            libm::exp(l) * (total - l)
        }
    };
    term(l0) + term(l1)
}

/// Outcome-averaged conditional entropy `S(t̄)`, in units of `k_B`.
pub fn conditional_entropy(pt: &OperatingPoint, params: &EngineParams) -> Result<f64> {
    conditional_entropy_with(pt, params, &QuadratureSpec::default())
}

pub fn conditional_entropy_with(
    pt: &OperatingPoint,
    params: &EngineParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    if params.pop_b == 0.0 {
        return Ok(0.0);
    }
    if pt.t_bar == 0.0 {
        return Ok(initial_entropy(params));
    }
    let breaks = momentum_breaks(pt.t_bar, spec.domain_halfwidth, spec);
    let s = integrate_with_breaks(|u| entropy_density(u, pt, params), &breaks, spec)?;
    Ok(s.max(0.0))
}

/// Information gain `I(t̄) = S(0) - S(t̄)`, in units of `k_B`.
pub fn info_gain(pt: &OperatingPoint, params: &EngineParams) -> Result<f64> {
    info_gain_with(pt, params, &QuadratureSpec::default())
}

pub fn info_gain_with(
    pt: &OperatingPoint,
    params: &EngineParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let s = conditional_entropy_with(pt, params, spec)?;
    Ok((initial_entropy(params) - s).max(0.0))
}

/// Excess extractable energy `ΔE (P_1(t̄|u) - b)` for a single outcome `u`.
pub fn event_gain(u: f64, pt: &OperatingPoint, params: &EngineParams) -> f64 {
    params.delta_e * (posterior(Branch::Excited, u, pt, params) - params.pop_b)
}

/// Average work extracted per cycle when extraction is attempted for
/// outcomes `u ≤ u'`: `ΔE a b [Φ(2(u' + t̄)) − Φ(2u')]`.
pub fn work_out(pt: &OperatingPoint, params: &EngineParams) -> f64 {
    let up = pt.u_prime;
    let diff = if up.is_infinite() {
        0.0
    } else {
        phi(2.0 * (up + pt.t_bar)) - phi(2.0 * up)
    };
    params.delta_e * params.pop_a * params.pop_b * diff
}

/// Quadrature route for [`work_out`]: integrates `q(u) G(u)` up to the
/// threshold directly.
pub fn work_out_quadrature(
    pt: &OperatingPoint,
    params: &EngineParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let lo = -spec.domain_halfwidth - pt.t_bar;
    let upper = pt.u_prime.min(spec.domain_halfwidth);
    if upper <= lo || params.pop_b == 0.0 {
        return Ok(0.0);
    }
    // q G / ΔE = q_1 - b q = a q_1 - b q_0
    let integrand = |u: f64| {
        params.pop_a * joint_density_of(Branch::Excited, u, pt, params)
            - params.pop_b * joint_density_of(Branch::Ground, u, pt, params)
    };
    let breaks = momentum_breaks(pt.t_bar, upper, spec);
    Ok(params.delta_e * integrate_with_breaks(integrand, &breaks, spec)?)
}

/// Probability that a cycle ends in an extraction attempt:
/// `a Φ(2u') + b Φ(2(u' + t̄))`.
pub fn attempt_fraction(pt: &OperatingPoint, params: &EngineParams) -> f64 {
    let up = pt.u_prime;
    if up == f64::INFINITY {
        return 1.0;
    }
    if up == f64::NEG_INFINITY {
        return 0.0;
    }
    params.pop_a * phi(2.0 * up) + params.pop_b * phi(2.0 * (up + pt.t_bar))
}

/// `t_eff / t_m`, the reciprocal of [`attempt_fraction`]. Infinite when
/// attempts never happen.
pub fn t_eff_ratio(pt: &OperatingPoint, params: &EngineParams) -> f64 {
    t_eff_ratio_from(attempt_fraction(pt, params))
}

fn t_eff_ratio_from(fraction: f64) -> f64 {
    if fraction > 0.0 {
        1.0 / fraction
    } else {
        f64::INFINITY
    }
}

/// Work to switch the coupling off after `t̄`: `(b/2) ħ²B t̄²`.
///
/// The excited branch feels a constant force, so its mean meter position
/// is `-t̄²/2` (reduced units) when the interaction is removed; switching on
/// costs nothing because the initial mean position is zero.
pub fn work_meas(pt: &OperatingPoint, params: &EngineParams) -> f64 {
    0.5 * params.pop_b * params.hbar2b * pt.t_bar * pt.t_bar
}

/// How [`work_meas_via`] evaluates the switching work.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementCostRoute {
    ClosedForm,
    /// Propagate the meter branches on a grid and read off `⟨x⟩`.
    Propagated(GridSpec),
}

pub fn work_meas_via(
    pt: &OperatingPoint,
    params: &EngineParams,
    route: MeasurementCostRoute,
) -> Result<f64> {
    match route {
        MeasurementCostRoute::ClosedForm => Ok(work_meas(pt, params)),
        MeasurementCostRoute::Propagated(grid) => oracle::oracle_work_meas(params, pt.t_bar, &grid),
    }
}

/// Meter preparation cost, the zero-point energy `ħ²B / 4`.
pub fn work_prep(params: &EngineParams) -> f64 {
    0.25 * params.hbar2b
}

pub fn work_in(pt: &OperatingPoint, params: &EngineParams) -> f64 {
    work_meas(pt, params) + work_prep(params)
}

fn efficiency_from(w_out: f64, w_in: f64) -> f64 {
    if w_out > 0.0 {
        // 1 / (1 + W_in / W_out)
        w_out / (w_out + w_in)
    } else {
        0.0
    }
}

/// `η = 1 / (1 + W_in / W_out)`, and 0 when nothing is extracted.
pub fn efficiency(pt: &OperatingPoint, params: &EngineParams) -> f64 {
    efficiency_from(work_out(pt, params), work_in(pt, params))
}

/// Work per reduced time. At `t̄ = 0` returns the limit
/// `ΔE a b √(2/π) e^{-2u'²}`.
pub fn power(pt: &OperatingPoint, params: &EngineParams) -> f64 {
    if pt.t_bar > 0.0 {
        return work_out(pt, params) / pt.t_bar;
    }
    let up = pt.u_prime;
    if !up.is_finite() {
        return 0.0;
    }
    params.delta_e * params.pop_a * params.pop_b * branch_norm() * libm::exp(-2.0 * up * up)
}

/// `η Π`, the balanced performance measure.
pub fn performance_product(pt: &OperatingPoint, params: &EngineParams) -> f64 {
    efficiency(pt, params) * power(pt, params)
}

/// Carnot bound `1 − T_M / T_S` between the meter and system baths.
pub fn carnot_efficiency(t_sys: f64, t_meter: f64) -> Result<f64> {
    if !(t_sys.is_finite() && t_sys > 0.0) {
        return Err(domain("t_sys must be positive and finite"));
    }
    if !(t_meter.is_finite() && t_meter >= 0.0) {
        return Err(domain("t_meter must be finite and non-negative"));
    }
    if t_meter > t_sys {
        return Err(domain("t_meter must not exceed t_sys"));
    }
    Ok(1.0 - t_meter / t_sys)
}
