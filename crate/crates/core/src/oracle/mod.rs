//! Independent checks of the analytic layer.
//!
//! [`propagate`] evolves the two meter branches on a momentum/position grid
//! with the split-operator method, so the closed-form momentum marginals and
//! the switching work can be compared against direct quantum dynamics.
//! [`mc_cycles`] replays engine cycles stochastically.
//!
//! Internal oracle units set `ħ = 1`, `ħ√B = 1` and `g = 1`, so `τ* = 1`, the
//! grid momentum equals the reduced momentum `u`, and energies convert to
//! meV by multiplying with `ħ²B`.

mod fft;
mod monte_carlo;

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

pub use monte_carlo::{
    block_count, mc_block, mc_cycles, mc_cycles_sharded, merge_blocks, BlockStats, McEstimate,
    McReport, MC_BLOCK_LEN,
};

use crate::error::{domain, Error, Result};
use crate::model::{Branch, EngineParams};
use fft::Fft;

/// Discretization of the propagation grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_points: usize,
    /// Momentum window half-width in reduced units.
    pub p_max: f64,
    /// Reduced time step.
    pub dt: f64,
}

impl GridSpec {
    /// Default grid able to follow the kicked branch up to `t_max`.
    pub fn for_horizon(t_max: f64) -> Self {
        Self {
            n_points: 4096,
            p_max: 8.0 * (1.0 + t_max.max(0.0)),
            dt: 1e-3,
        }
    }

    pub fn validate(&self, t_bar: f64) -> Result<()> {
        if self.n_points < 256 || !self.n_points.is_power_of_two() {
            return Err(domain("grid n_points must be a power of two >= 256"));
        }
        if !self.p_max.is_finite() || t_bar.is_nan() || self.p_max <= 4.0 * (1.0 + t_bar) {
            return Err(domain("grid p_max must exceed 4 (1 + t_bar)"));
        }
        if !(self.dt > 0.0 && self.dt <= 1e-2) {
            return Err(domain("grid dt must lie in (0, 1e-2]"));
        }
        Ok(())
    }

    pub fn dp(&self) -> f64 {
        2.0 * self.p_max / self.n_points as f64
    }

    pub fn dx(&self) -> f64 {
        2.0 * PI / (self.n_points as f64 * self.dp())
    }

    pub fn momentum(&self, k: usize) -> f64 {
        -self.p_max + k as f64 * self.dp()
    }

    pub fn position(&self, j: usize) -> f64 {
        -PI / self.dp() + j as f64 * self.dx()
    }
}

/// One system-conditioned meter wavefunction in the momentum representation.
#[derive(Debug, Clone)]
pub struct BranchState {
    pub branch: Branch,
    pub grid: GridSpec,
    /// Meter amplitudes `φ(u_k)`, normalized so that `Σ|φ|² du = 1`.
    pub amplitudes: Vec<Complex64>,
    /// Population of the system state carrying this branch (`a` or `b`).
    pub branch_weight: f64,
}

impl BranchState {
    fn initial(branch: Branch, grid: GridSpec, weight: f64) -> Self {
        // (2/π)^{1/4} e^{-u²}, the meter packet in reduced momentum.
        let c = libm::pow(2.0 / PI, 0.25);
        let amplitudes = (0..grid.n_points)
            .map(|k| {
                let u = grid.momentum(k);
                Complex64::new(c * libm::exp(-u * u), 0.0)
            })
            .collect();
        Self {
            branch,
            grid,
            amplitudes,
            branch_weight: weight,
        }
    }

    /// `|φ(u)|²` on the grid (per unit reduced momentum, unit total mass).
    pub fn momentum_density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.grid.n_points).map(|k| self.grid.momentum(k))
    }

    /// `Σ |φ|² du`.
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dp()
    }

    /// `|ψ(x)|²` on the conjugate position grid.
    pub fn position_density(&self) -> Vec<f64> {
        let fft = Fft::new(self.grid.n_points);
        let mut psi = self.amplitudes.clone();
        to_position(&fft, &mut psi, &self.grid);
        psi.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Mean meter position `⟨x⟩` in internal units.
    pub fn position_mean(&self) -> f64 {
        let dx = self.grid.dx();
        self.position_density()
            .iter()
            .enumerate()
            .map(|(j, d)| self.grid.position(j) * d)
            .sum::<f64>()
            * dx
    }

    /// Probability in the outer 5% of the momentum and position windows.
    fn edge_mass(&self) -> Result<()> {
        let n = self.grid.n_points;
        let band = n / 20;
        let edge = |d: &[f64], h: f64| {
            (d[..band].iter().sum::<f64>() + d[n - band..].iter().sum::<f64>()) * h
        };
        let m = edge(&self.momentum_density(), self.grid.dp());
        if m > EDGE_TOLERANCE {
            return Err(Error::Resolution {
                region: "momentum",
                mass: m,
            });
        }
        let x = edge(&self.position_density(), self.grid.dx());
        if x > EDGE_TOLERANCE {
            return Err(Error::Resolution {
                region: "position",
                mass: x,
            });
        }
        Ok(())
    }
}

const EDGE_TOLERANCE: f64 = 1e-8;

// With u_k = -p_max + k du and x_j = -π/du + j dx, the continuous transform
// reduces to a DFT sandwiched between alternating signs: (-1)^k on the
// momentum side and (-1)^j on the position side.
fn alternate(data: &mut [Complex64]) {
    for v in data.iter_mut().skip(1).step_by(2) {
        *v = -*v;
    }
}

fn to_position(fft: &Fft, data: &mut [Complex64], grid: &GridSpec) {
    alternate(data);
    fft.inverse(data);
    alternate(data);
    let scale = grid.dp() / libm::sqrt(2.0 * PI);
    data.iter_mut().for_each(|v| *v *= scale);
}

struct SplitOperator {
    fft: Fft,
    half_kinetic: Vec<Complex64>,
    full_kinetic: Vec<Complex64>,
    /// Potential phase on the position grid, already divided by `n` so an
    /// inverse/forward transform pair is the identity.
    potential: Option<Vec<Complex64>>,
}

fn phase(angle: f64) -> Complex64 {
    Complex64::new(libm::cos(angle), libm::sin(angle))
}

impl SplitOperator {
    fn new(grid: &GridSpec, dt: f64, branch: Branch, energy_offset: f64) -> Self {
        let n = grid.n_points;
        let kinetic = |frac: f64| {
            (0..n)
                .map(|k| {
                    let p = grid.momentum(k);
                    phase(-0.5 * p * p * dt * frac)
                })
                .collect::<Vec<_>>()
        };
        let potential = match branch {
            Branch::Ground => None,
            // V = x + ΔE on the excited branch.
            Branch::Excited => Some(
                (0..n)
                    .map(|j| phase(-(grid.position(j) + energy_offset) * dt) / n as f64)
                    .collect(),
            ),
        };
        Self {
            fft: Fft::new(n),
            half_kinetic: kinetic(0.5),
            full_kinetic: kinetic(1.0),
            potential,
        }
    }

    fn apply_potential(&self, data: &mut [Complex64], scratch_potential: &[Complex64]) {
        alternate(data);
        self.fft.inverse(data);
        for (v, w) in data.iter_mut().zip(scratch_potential) {
            *v *= w;
        }
        self.fft.forward(data);
        alternate(data);
    }

    /// Strang splitting, half kinetic / potential / half kinetic, with
    /// adjacent half kinetic steps fused.
    fn run(&self, data: &mut [Complex64], steps: usize) {
        let mul = |d: &mut [Complex64], f: &[Complex64]| {
            for (v, w) in d.iter_mut().zip(f) {
                *v *= w;
            }
        };
        if steps == 0 {
            return;
        }
        mul(data, &self.half_kinetic);
        for s in 0..steps {
            if let Some(pot) = &self.potential {
                self.apply_potential(data, pot);
            }
            if s + 1 < steps {
                mul(data, &self.full_kinetic);
            } else {
                mul(data, &self.half_kinetic);
            }
        }
    }
}

fn propagate_branch(
    params: &EngineParams,
    branch: Branch,
    t_bar: f64,
    grid: &GridSpec,
) -> Result<BranchState> {
    if !(t_bar.is_finite() && t_bar >= 0.0) {
        return Err(domain("t_bar must be finite and non-negative"));
    }
    grid.validate(t_bar)?;
    let weight = match branch {
        Branch::Ground => params.pop_a,
        Branch::Excited => params.pop_b,
    };
    let mut state = BranchState::initial(branch, *grid, weight);
    state.edge_mass()?;
    let steps = libm::ceil(t_bar / grid.dt) as usize;
    if steps > 0 {
        let dt = t_bar / steps as f64;
        let offset = params.delta_e / params.hbar2b;
        SplitOperator::new(grid, dt, branch, offset).run(&mut state.amplitudes, steps);
        state.edge_mass()?;
    }
    Ok(state)
}

/// Evolves both meter branches through a coupling window of length `t̄`.
///
/// Branch 0 is a free particle (`p²/2`); branch 1 additionally feels
/// `x + ΔE`. The Hamiltonian never mixes the branches, so the joint state is
/// fully described by the pair.
pub fn propagate(
    params: &EngineParams,
    t_bar: f64,
    grid: &GridSpec,
) -> Result<(BranchState, BranchState)> {
    Ok((
        propagate_branch(params, Branch::Ground, t_bar, grid)?,
        propagate_branch(params, Branch::Excited, t_bar, grid)?,
    ))
}

/// Switching work `tr[ρ(0)V] − tr[ρ(t̄)V]` from propagated dynamics, in meV.
///
/// Only the excited branch couples to `x`, so this is
/// `−b (⟨x⟩₁(t̄) − ⟨x⟩₁(0)) ħ²B`.
pub fn oracle_work_meas(params: &EngineParams, t_bar: f64, grid: &GridSpec) -> Result<f64> {
    let start = propagate_branch(params, Branch::Excited, 0.0, grid)?;
    let end = propagate_branch(params, Branch::Excited, t_bar, grid)?;
    let shift = end.position_mean() - start.position_mean();
    Ok(-params.pop_b * shift * params.hbar2b)
}

/// Branch momentum densities on the grid as `(u, density_0, density_1)` rows,
/// each density normalized to one.
pub fn branch_marginals(
    params: &EngineParams,
    t_bar: f64,
    grid: &GridSpec,
) -> Result<Vec<(f64, f64, f64)>> {
    let (g, e) = propagate(params, t_bar, grid)?;
    let d0 = g.momentum_density();
    let d1 = e.momentum_density();
    let mut rows = vec![(0.0, 0.0, 0.0); grid.n_points];
    for (k, row) in rows.iter_mut().enumerate() {
        *row = (grid.momentum(k), d0[k], d1[k]);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests;
