//! Subcommand bodies. Each returns its artifacts as strings; writing them
//! out is left to the caller.

use infoengine_core::engine::{self, CycleReport};
use infoengine_core::model::conditional_prob;
use infoengine_core::optimize::{maximize_with_resolution, Axis, Objective, Optimum, SearchBox};
use infoengine_core::oracle::McEstimate;
use infoengine_core::{EngineParams, OperatingPoint};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{format_axis, CsvTable};
use crate::parallel::{par_mc_cycles, par_sweep};
use crate::svg::{self, Chart, Series};

/// CSV plus an SVG rendering and human-readable summary lines.
#[derive(Debug, Clone)]
pub struct Figure {
    pub csv: String,
    pub svg: String,
    pub notes: Vec<String>,
}

fn require_finite_list(name: &str, values: &[f64]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Usage(format!("{name}: empty list")));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CliError::Usage(format!("{name}: values must be finite")));
    }
    Ok(())
}

/// Meter outcomes `u = (k - 400) / 100`, `k = 0..=800`.
pub fn cond_prob_axis() -> Vec<f64> {
    (0..=800).map(|k| (k as f64 - 400.0) / 100.0).collect()
}

pub fn cond_prob(cfg: &RunConfig, t_bars: &[f64]) -> Result<Figure, CliError> {
    require_finite_list("--t-bar", t_bars)?;
    let params = cfg.engine_params()?;
    let points = t_bars
        .iter()
        .map(|&t| {
            OperatingPoint::at_time(t)
                .map_err(|_| CliError::Usage(format!("--t-bar: {t} must be >= 0")))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut header = vec!["u".to_string()];
    for &t in t_bars {
        let t = format_axis(t);
        header.push(format!("p0_given_u_t{t}"));
        header.push(format!("p1_given_u_t{t}"));
    }
    let mut table = CsvTable::new(&header, cfg.precision);
    let us = cond_prob_axis();
    let mut curves: Vec<Vec<(f64, f64)>> = vec![Vec::with_capacity(us.len()); points.len()];
    for &u in &us {
        let mut row = vec![format_axis(u)];
        for (k, pt) in points.iter().enumerate() {
            let p0 = conditional_prob(0, u, pt, &params)?;
            let p1 = conditional_prob(1, u, pt, &params)?;
            row.push(table.value(p0));
            row.push(table.value(p1));
            curves[k].push((u, p1));
        }
        table.push_row(&row);
    }

    let chart = Chart {
        title: "Posterior P1(u) of the excited state".into(),
        x_label: "u".into(),
        y_label: "P1".into(),
        series: t_bars
            .iter()
            .zip(curves)
            .map(|(&t, points)| Series {
                label: format!("t = {}", format_axis(t)),
                points,
            })
            .collect(),
    };
    Ok(Figure {
        csv: table.into_string(),
        svg: svg::line_charts(&[chart]),
        notes: Vec::new(),
    })
}

pub fn info_cost(cfg: &RunConfig, ratios: &[f64], t_axis: &Axis) -> Result<Figure, CliError> {
    require_finite_list("--ratios", ratios)?;
    let params: Vec<EngineParams> = ratios
        .iter()
        .map(|&r| EngineParams::from_gap_ratio(cfg.delta_e_mev, r, cfg.hbar2b_mev))
        .collect::<Result<_, _>>()?;

    let ts = t_axis.values();
    // Rows of (info_gain, w_meas) per ratio, evaluated in parallel.
    let rows: Vec<Vec<(f64, f64)>> = ts
        .par_iter()
        .map(|&t| {
            let pt = OperatingPoint::at_time(t)?;
            params
                .iter()
                .map(|p| Ok((engine::info_gain(&pt, p)?, engine::work_meas(&pt, p))))
                .collect::<infoengine_core::Result<Vec<_>>>()
        })
        .collect::<infoengine_core::Result<_>>()?;

    let mut header = vec!["t_bar".to_string()];
    for &r in ratios {
        let r = format_axis(r);
        header.push(format!("info_gain_kB_r{r}"));
        header.push(format!("w_meas_mev_r{r}"));
    }
    let mut table = CsvTable::new(&header, cfg.precision);
    for (&t, row) in ts.iter().zip(&rows) {
        let mut cells = vec![format_axis(t)];
        for &(i, w) in row {
            cells.push(table.value(i));
            cells.push(table.value(w));
        }
        table.push_row(&cells);
    }

    let series = |pick: fn(&(f64, f64)) -> f64| -> Vec<Series> {
        ratios
            .iter()
            .enumerate()
            .map(|(k, &r)| Series {
                label: format!("dE/kT = {}", format_axis(r)),
                points: ts
                    .iter()
                    .zip(&rows)
                    .map(|(&t, row)| (t, pick(&row[k])))
                    .collect(),
            })
            .collect()
    };
    let charts = [
        Chart {
            title: "Information gain".into(),
            x_label: "t".into(),
            y_label: "I / kB".into(),
            series: series(|c| c.0),
        },
        Chart {
            title: "Measurement work".into(),
            x_label: "t".into(),
            y_label: "W_meas / meV".into(),
            series: series(|c| c.1),
        },
    ];
    Ok(Figure {
        csv: table.into_string(),
        svg: svg::line_charts(&charts),
        notes: Vec::new(),
    })
}

/// Energy-per-time unit label and divisor for power-like quantities.
fn power_unit(cfg: &RunConfig) -> (&'static str, f64) {
    match cfg.tau_star_seconds {
        Some(tau) => ("mev_per_s", tau),
        None => ("mev", 1.0),
    }
}

pub fn perf(cfg: &RunConfig, u_primes: &[f64], t_axis: &Axis) -> Result<Figure, CliError> {
    require_finite_list("--u-prime", u_primes)?;
    let params = cfg.engine_params()?;
    let (unit, tau) = power_unit(cfg);
    let ts = t_axis.values();

    let mut header = vec!["t_bar".to_string()];
    for &u in u_primes {
        let u = format_axis(u);
        header.push(format!("power_{unit}_u{u}"));
        header.push(format!("efficiency_u{u}"));
    }
    let mut table = CsvTable::new(&header, cfg.precision);
    let mut power_curves = vec![Vec::with_capacity(ts.len()); u_primes.len()];
    let mut eta_curves = vec![Vec::with_capacity(ts.len()); u_primes.len()];
    for &t in ts {
        let mut cells = vec![format_axis(t)];
        for (k, &u) in u_primes.iter().enumerate() {
            let pt = OperatingPoint::new(t, u)?;
            let pw = engine::power(&pt, &params) / tau;
            let eta = engine::efficiency(&pt, &params);
            cells.push(table.value(pw));
            cells.push(table.value(eta));
            power_curves[k].push((t, pw));
            eta_curves[k].push((t, eta));
        }
        table.push_row(&cells);
    }

    let label = |u: f64| format!("u' = {}", format_axis(u));
    let charts = [
        Chart {
            title: "Output power".into(),
            x_label: "t".into(),
            y_label: format!("power / {unit}"),
            series: u_primes
                .iter()
                .zip(power_curves)
                .map(|(&u, points)| Series {
                    label: label(u),
                    points,
                })
                .collect(),
        },
        Chart {
            title: "Efficiency".into(),
            x_label: "t".into(),
            y_label: "efficiency".into(),
            series: u_primes
                .iter()
                .zip(eta_curves)
                .map(|(&u, points)| Series {
                    label: label(u),
                    points,
                })
                .collect(),
        },
    ];
    Ok(Figure {
        csv: table.into_string(),
        svg: svg::line_charts(&charts),
        notes: Vec::new(),
    })
}

pub fn heatmap(cfg: &RunConfig, t_axis: &Axis, u_axis: &Axis) -> Result<Figure, CliError> {
    let params = cfg.engine_params()?;
    let (unit, tau) = power_unit(cfg);
    let table_data = par_sweep(&params, t_axis, u_axis)?;

    let mut table = CsvTable::new(
        &["t_bar", "u_prime", &format!("product_{unit}")],
        cfg.precision,
    );
    let mut raster = Vec::with_capacity(t_axis.len());
    let mut failed = 0usize;
    for (i, &t) in t_axis.values().iter().enumerate() {
        let mut column = Vec::with_capacity(u_axis.len());
        for (j, &u) in u_axis.values().iter().enumerate() {
            let v = match table_data.cell(i, j) {
                Ok(r) => r.product / tau,
                Err(_) => {
                    failed += 1;
                    f64::NAN
                }
            };
            table.push_row(&[format_axis(t), format_axis(u), table.value(v)]);
            column.push(v);
        }
        raster.push(column);
    }

    let mut notes = Vec::new();
    match table_data.argmax(Objective::Product) {
        Some((i, j, v)) => notes.push(format!(
            "argmax t_bar = {} u_prime = {} product_{unit} = {}",
            format_axis(t_axis.values()[i]),
            format_axis(u_axis.values()[j]),
            table.value(v / tau)
        )),
        None => notes.push("argmax: no cell evaluated successfully".into()),
    }
    if failed > 0 {
        notes.push(format!(
            "{failed} cell(s) failed to evaluate and are written as NaN"
        ));
    }
    let svg = svg::heat_map(
        &format!("Efficiency x power / {unit}"),
        "t",
        "u'",
        t_axis.values(),
        u_axis.values(),
        &raster,
    );
    Ok(Figure {
        csv: table.into_string(),
        svg,
        notes,
    })
}

/// Optimization result as text lines plus a one-row CSV.
pub struct OptimizeOutcome {
    pub optimum: Optimum,
    pub text: String,
    pub csv: String,
}

pub fn optimize(
    cfg: &RunConfig,
    objective: Objective,
    search: &SearchBox,
    resolution: usize,
) -> Result<OptimizeOutcome, CliError> {
    let params = cfg.engine_params()?;
    let opt = maximize_with_resolution(&params, objective, search, resolution)?;
    let unit = match objective {
        Objective::Efficiency => "",
        Objective::Power | Objective::Product => " meV",
    };
    let text = format!(
        "objective = {}\nt_bar_star = {}\nu_prime_star = {}\nvalue = {}{unit}\non_boundary = {}\nconverged = {}\n",
        objective.name(),
        opt.t_bar_star,
        opt.u_prime_star,
        opt.value,
        opt.on_boundary,
        opt.converged
    );
    let mut table = CsvTable::new(
        &[
            "objective",
            "t_bar_star",
            "u_prime_star",
            "value",
            "on_boundary",
            "converged",
        ],
        cfg.precision,
    );
    table.push_row(&[
        objective.name().to_string(),
        table.value(opt.t_bar_star),
        table.value(opt.u_prime_star),
        table.value(opt.value),
        opt.on_boundary.to_string(),
        opt.converged.to_string(),
    ]);
    Ok(OptimizeOutcome {
        optimum: opt,
        text,
        csv: table.into_string(),
    })
}

pub struct McOutcome {
    pub rows: Vec<(&'static str, McEstimate, f64)>,
    pub text: String,
    pub csv: String,
}

pub fn monte_carlo(
    cfg: &RunConfig,
    pt: &OperatingPoint,
    samples: u64,
) -> Result<McOutcome, CliError> {
    let params = cfg.engine_params()?;
    let report = par_mc_cycles(&params, pt, samples, cfg.seed)?;
    let analytic = CycleReport::evaluate(pt, &params)?;
    let rows = vec![
        ("w_out_mev", report.w_out, analytic.w_out),
        ("info_gain_kB", report.info_gain, analytic.info_gain),
        (
            "attempt_fraction",
            report.attempt_fraction,
            analytic.attempt_fraction,
        ),
    ];

    let mut text = format!(
        "t_bar = {} u_prime = {} samples = {} seed = {}\n",
        format_axis(pt.t_bar),
        format_axis(pt.u_prime),
        samples,
        cfg.seed
    );
    let mut table = CsvTable::new(
        &[
            "quantity",
            "mean",
            "std_error",
            "analytic",
            "abs_z",
            "n_samples",
            "seed",
        ],
        cfg.precision,
    );
    for (name, est, exact) in &rows {
        let z = est.z_score(*exact);
        text.push_str(&format!(
            "{name:<17} mean {:>14.8} +- {:<12.3e} analytic {:>14.8} |z| {:.3}\n",
            est.mean, est.std_error, exact, z
        ));
        table.push_row(&[
            name.to_string(),
            table.value(est.mean),
            table.value(est.std_error),
            table.value(*exact),
            table.value(z),
            est.n_samples.to_string(),
            est.seed.to_string(),
        ]);
    }
    Ok(McOutcome {
        rows,
        text,
        csv: table.into_string(),
    })
}
