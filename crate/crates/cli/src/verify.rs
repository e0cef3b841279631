//! The `verify` suite: closed forms against the propagation oracle, the
//! quadrature route and Monte Carlo sampling.

use std::fmt;

use infoengine_core::engine::{self, work_out_quadrature};
use infoengine_core::model::joint_density;
use infoengine_core::optimize::Axis;
use infoengine_core::oracle::{oracle_work_meas, propagate, GridSpec};
use infoengine_core::{EngineParams, OperatingPoint, QuadratureSpec};
use rayon::prelude::*;

use crate::output::CsvTable;
use crate::parallel::par_mc_cycles;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub mc_samples: u64,
    /// Allowed |z| for each Monte Carlo estimate.
    pub mc_sigmas: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            mc_samples: 100_000,
            mc_sigmas: 4.0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn at_most(name: &'static str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name,
            measured,
            tolerance,
            // NaN never passes.
            passed: measured <= tolerance,
            detail,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} measured {:.3e} tolerance {:.3e}  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance,
            self.detail
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn all_passed(&self) -> bool {
        self.failures().next().is_none()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(f, "{c}")?;
        }
        let failed: Vec<&str> = self.failures().map(|c| c.name).collect();
        if failed.is_empty() {
            writeln!(f, "all {} checks passed", self.checks.len())
        } else {
            writeln!(
                f,
                "{} of {} checks failed: {}",
                failed.len(),
                self.checks.len(),
                failed.join(", ")
            )
        }
    }
}

const ORACLE_TIMES: [f64; 3] = [0.5, 1.0, 2.0];

fn failed(name: &'static str, tolerance: f64, err: impl fmt::Display) -> Check {
    Check {
        name,
        measured: f64::NAN,
        tolerance,
        passed: false,
        detail: format!("error: {err}"),
    }
}

fn marginal_checks(params: &EngineParams) -> Vec<Check> {
    const TOL: f64 = 1e-6;
    const NORM_TOL: f64 = 1e-10;
    let grid = GridSpec::for_horizon(2.0);
    let results: Vec<_> = ORACLE_TIMES
        .par_iter()
        .map(|&t| -> infoengine_core::Result<(f64, f64)> {
            let (g, e) = propagate(params, t, &grid)?;
            let pt = OperatingPoint::at_time(t)?;
            let mut worst = 0.0f64;
            for (u, d) in e.momenta().zip(e.momentum_density()) {
                let exact = joint_density(1, u, &pt, params)? / params.pop_b;
                worst = worst.max((d - exact).abs());
            }
            let drift = (g.norm() - 1.0).abs().max((e.norm() - 1.0).abs());
            Ok((worst, drift))
        })
        .collect();
    match results
        .into_iter()
        .collect::<infoengine_core::Result<Vec<_>>>()
    {
        Ok(r) => {
            let worst = r.iter().map(|x| x.0).fold(0.0, f64::max);
            let drift = r.iter().map(|x| x.1).fold(0.0, f64::max);
            vec![
                Check::at_most(
                    "oracle marginal",
                    worst,
                    TOL,
                    "max |density error|, t = 0.5, 1, 2".into(),
                ),
                Check::at_most("oracle norm", drift, NORM_TOL, "max |norm - 1|".into()),
            ]
        }
        Err(e) => vec![
            failed("oracle marginal", TOL, &e),
            failed("oracle norm", NORM_TOL, e),
        ],
    }
}

fn work_meas_checks(params: &EngineParams) -> Vec<Check> {
    const TOL: f64 = 1e-5;
    let grid = GridSpec::for_horizon(2.0);
    let oracle: infoengine_core::Result<Vec<f64>> = ORACLE_TIMES
        .par_iter()
        .map(|&t| oracle_work_meas(params, t, &grid))
        .collect();
    let oracle = match oracle {
        Ok(v) => v,
        Err(e) => {
            return vec![
                failed("measurement work", TOL, &e),
                failed("measurement work ratio", TOL, e),
            ]
        }
    };
    let mut worst = 0.0f64;
    for (&t, w) in ORACLE_TIMES.iter().zip(&oracle) {
        let closed = engine::work_meas(
            &OperatingPoint {
                t_bar: t,
                u_prime: f64::INFINITY,
            },
            params,
        );
        worst = worst.max((w / closed - 1.0).abs());
    }
    let ratio = oracle[1] / oracle[0];
    vec![
        Check::at_most(
            "measurement work",
            worst,
            TOL,
            "max relative oracle/closed-form gap".into(),
        ),
        Check::at_most(
            "measurement work ratio",
            (ratio - 4.0).abs(),
            TOL,
            format!("W(1)/W(0.5) = {ratio:.8}"),
        ),
    ]
}

fn null_check(params: &EngineParams) -> Check {
    const TOL: f64 = 1e-10;
    let worst = [0.5, 1.0, 2.0, 5.0]
        .iter()
        .map(|&t| {
            (engine::work_out(
                &OperatingPoint {
                    t_bar: t,
                    u_prime: f64::INFINITY,
                },
                params,
            ) / params.delta_e)
                .abs()
        })
        .fold(0.0, f64::max);
    Check::at_most(
        "null extraction",
        worst,
        TOL,
        "max |W_out(u' = inf)| / dE".into(),
    )
}

fn quadrature_check(params: &EngineParams) -> Check {
    const TOL: f64 = 1e-9;
    let ts = Axis::linspace(0.05, 5.0, 20).expect("static axis");
    let us = Axis::linspace(-3.0, 1.0, 20).expect("static axis");
    let spec = QuadratureSpec::default();
    let worst: infoengine_core::Result<f64> = ts
        .values()
        .par_iter()
        .map(|&t| {
            let mut w = 0.0f64;
            for &u in us.values() {
                let pt = OperatingPoint::new(t, u)?;
                let gap = work_out_quadrature(&pt, params, &spec)? - engine::work_out(&pt, params);
                w = w.max((gap / params.delta_e).abs());
            }
            Ok(w)
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)));
    match worst {
        Ok(w) => Check::at_most(
            "closed form vs quadrature",
            w,
            TOL,
            "max |gap| / dE on 20x20 grid".into(),
        ),
        Err(e) => failed("closed form vs quadrature", TOL, e),
    }
}

fn mc_check(params: &EngineParams, opts: &VerifyOptions) -> Check {
    let pt = OperatingPoint {
        t_bar: 1.0,
        u_prime: 0.0,
    };
    let report = par_mc_cycles(params, &pt, opts.mc_samples, opts.seed);
    let analytic = engine::CycleReport::evaluate(&pt, params);
    match (report, analytic) {
        (Ok(r), Ok(a)) => {
            let z = [
                r.w_out.z_score(a.w_out),
                r.info_gain.z_score(a.info_gain),
                r.attempt_fraction.z_score(a.attempt_fraction),
            ];
            let worst = z.iter().map(|v| v.abs()).fold(0.0, f64::max);
            Check::at_most(
                "monte carlo",
                worst,
                opts.mc_sigmas,
                format!(
                    "max |z| over W_out, I, attempt fraction; n = {}, seed = {}, |z| = ({:.2}, {:.2}, {:.2})",
                    opts.mc_samples, opts.seed, z[0], z[1], z[2]
                ),
            )
        }
        (Err(e), _) | (_, Err(e)) => failed("monte carlo", opts.mc_sigmas, e),
    }
}

pub fn run(params: &EngineParams, opts: &VerifyOptions) -> VerifyReport {
    let mut checks = marginal_checks(params);
    checks.extend(work_meas_checks(params));
    checks.push(null_check(params));
    checks.push(quadrature_check(params));
    checks.push(mc_check(params, opts));
    VerifyReport { checks }
}

/// Branch momentum densities at `t_bar` as CSV (`u, density_0, density_1`).
pub fn marginals_csv(
    params: &EngineParams,
    t_bar: f64,
    precision: usize,
) -> infoengine_core::Result<String> {
    let grid = GridSpec::for_horizon(t_bar.max(1.0));
    let rows = infoengine_core::oracle::branch_marginals(params, t_bar, &grid)?;
    let mut table = CsvTable::new(&["u", "density_0", "density_1"], precision);
    for (u, d0, d1) in rows {
        table.push_row(&[table.value(u), table.value(d0), table.value(d1)]);
    }
    Ok(table.into_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_pass_and_tampered_mc_fails() {
        let p = EngineParams::new(25.85, 300.0, 25.85).unwrap();
        let report = run(&p, &VerifyOptions::default());
        assert!(report.all_passed(), "{report}");
        assert_eq!(report.checks.len(), 7);

        let tampered = mc_check(
            &p,
            &VerifyOptions {
                mc_sigmas: 1e-15,
                ..VerifyOptions::default()
            },
        );
        assert!(!tampered.passed);
    }

    #[test]
    fn nan_measurement_fails() {
        assert!(!Check::at_most("x", f64::NAN, 1.0, String::new()).passed);
    }

    #[test]
    fn marginal_dump_shape() {
        let p = EngineParams::new(25.85, 300.0, 25.85).unwrap();
        let csv = marginals_csv(&p, 0.5, 6).unwrap();
        assert!(csv.starts_with("u,density_0,density_1\n"));
        assert_eq!(csv.lines().count(), 1 + 4096);
    }
}
