//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use infoengine_core::optimize::{Axis, Objective, SearchBox};
use infoengine_core::OperatingPoint;

use crate::commands::{self, Figure};
use crate::config::{Format, Overrides, RunConfig};
use crate::error::CliError;
use crate::output::{write_file, write_stdout, Destinations};
use crate::verify::{self, VerifyOptions};

#[derive(Debug, Parser)]
#[command(
    name = "infoengine",
    version,
    about = "Quantum information engine: figure data, verification and optimization"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Level spacing ΔE in meV
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub delta_e: Option<f64>,
    /// System temperature in K
    #[arg(long, global = true)]
    pub t_sys: Option<f64>,
    /// Meter energy scale ħ²B in meV
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub hbar2b: Option<f64>,
    /// Meter temperature in K (reported Carnot bound only)
    #[arg(long, global = true)]
    pub t_meter: Option<f64>,
    /// Output file; CSV goes to stdout when omitted
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Fractional digits of computed CSV values
    #[arg(long, global = true)]
    pub precision: Option<usize>,
    /// Flat `key = value` config file; flags take precedence
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Print the effective configuration and exit
    #[arg(long, global = true)]
    pub print_config: bool,
    /// τ* in seconds; power-like columns are then reported per second
    #[arg(long, global = true)]
    pub tau_star_seconds: Option<f64>,
}

impl CommonArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            delta_e: self.delta_e,
            t_sys: self.t_sys,
            hbar2b: self.hbar2b,
            t_meter: self.t_meter,
            out: self.out.clone(),
            format: self.format,
            seed: self.seed,
            precision: self.precision,
            tau_star_seconds: self.tau_star_seconds,
        }
    }
}

fn parse_objective(s: &str) -> Result<Objective, String> {
    s.parse().map_err(|e: infoengine_core::Error| e.to_string())
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Posterior P_i(u) on u in [-4, 4] for each requested t̄
    CondProb {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, 0.5, 1.0, 2.0])]
        t_bar: Vec<f64>,
    },
    /// Information gain and measurement work against t̄ for several ΔE/k_BT_S
    /// (T_S is derived from each ratio; --t-sys is not used)
    InfoCost {
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        ratios: Vec<f64>,
        #[arg(long, default_value_t = 0.0)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 201)]
        t_count: usize,
    },
    /// Power and efficiency against t̄ for several thresholds u'
    Perf {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [0.0, -0.5, -1.0, -1.5])]
        u_prime: Vec<f64>,
        #[arg(long, default_value_t = 0.01)]
        t_min: f64,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        #[arg(long, default_value_t = 500)]
        t_count: usize,
    },
    /// Efficiency × power over a (t̄, u') grid, long format
    Heatmap {
        /// Points per axis
        #[arg(long, default_value_t = 100)]
        resolution: usize,
        #[arg(long, default_value_t = 0.05)]
        t_min: f64,
        #[arg(long, default_value_t = 5.0)]
        t_max: f64,
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        u_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        u_max: f64,
    },
    /// Check closed forms against the propagation oracle, quadrature and Monte Carlo
    Verify {
        #[arg(long, default_value_t = 100_000)]
        mc_samples: u64,
        /// Allowed |z| of each Monte Carlo estimate
        #[arg(long, default_value_t = 4.0)]
        mc_sigmas: f64,
        /// Also write propagated branch densities (u, density_0, density_1)
        #[arg(long)]
        dump_marginals: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        dump_t_bar: f64,
    },
    /// Maximize efficiency, power or their product over (t̄, u')
    Optimize {
        #[arg(long, default_value = "product", value_parser = parse_objective)]
        objective: Objective,
        /// Pin the threshold and search over t̄ only
        #[arg(long, allow_negative_numbers = true)]
        fix_u: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        t_min: f64,
        #[arg(long, default_value_t = 20.0)]
        t_max: f64,
        #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
        u_min: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        u_max: f64,
        /// Coarse scan points per axis
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Monte Carlo cycle sampling against the closed forms
    Mc {
        #[arg(long, default_value_t = 1.0)]
        t_bar: f64,
        /// Threshold; `inf` attempts extraction on every cycle
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        u_prime: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
}

fn axis(lo: f64, hi: f64, count: usize, name: &str) -> Result<Axis, CliError> {
    Axis::linspace(lo, hi, count).map_err(|e| CliError::Usage(format!("{name}: {e}")))
}

fn emit_figure(cfg: &RunConfig, fig: Figure) -> Result<(), CliError> {
    let dest = Destinations::resolve(cfg)?;
    dest.emit(&fig.csv, || fig.svg.clone())?;
    for note in &fig.notes {
        dest.note(note);
    }
    Ok(())
}

/// Text to stdout; the CSV row to `--out` when given, else stdout after
/// the text.
fn emit_text_and_csv(cfg: &RunConfig, text: &str, csv: &str) -> Result<(), CliError> {
    write_stdout(text)?;
    match &cfg.output_path {
        Some(path) => write_file(path, csv),
        None => write_stdout(csv),
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(cli.common.config.as_deref(), &cli.common.overrides())?;
    if cli.common.print_config {
        return write_stdout(&cfg.render());
    }
    let command = cli
        .command
        .ok_or_else(|| CliError::Usage("no subcommand given (see --help)".into()))?;

    match command {
        Command::CondProb { t_bar } => emit_figure(&cfg, commands::cond_prob(&cfg, &t_bar)?),
        Command::InfoCost {
            ratios,
            t_min,
            t_max,
            t_count,
        } => {
            let t_axis = axis(t_min, t_max, t_count, "t range")?;
            emit_figure(&cfg, commands::info_cost(&cfg, &ratios, &t_axis)?)
        }
        Command::Perf {
            u_prime,
            t_min,
            t_max,
            t_count,
        } => {
            let t_axis = axis(t_min, t_max, t_count, "t range")?;
            emit_figure(&cfg, commands::perf(&cfg, &u_prime, &t_axis)?)
        }
        Command::Heatmap {
            resolution,
            t_min,
            t_max,
            u_min,
            u_max,
        } => {
            let t_axis = axis(t_min, t_max, resolution, "t range")?;
            let u_axis = axis(u_min, u_max, resolution, "u' range")?;
            emit_figure(&cfg, commands::heatmap(&cfg, &t_axis, &u_axis)?)
        }
        Command::Verify {
            mc_samples,
            mc_sigmas,
            dump_marginals,
            dump_t_bar,
        } => {
            let params = cfg.engine_params()?;
            if let Some(path) = dump_marginals {
                write_file(
                    &path,
                    &verify::marginals_csv(&params, dump_t_bar, cfg.precision)?,
                )?;
            }
            let opts = VerifyOptions {
                mc_samples,
                mc_sigmas,
                seed: cfg.seed,
            };
            let report = verify::run(&params, &opts);
            write_stdout(&report.to_string())?;
            let failed = report.failures().count();
            if failed > 0 {
                return Err(CliError::Verification { failed });
            }
            Ok(())
        }
        Command::Optimize {
            objective,
            fix_u,
            t_min,
            t_max,
            u_min,
            u_max,
            resolution,
        } => {
            let mut search = SearchBox {
                t_min,
                t_max,
                u_min,
                u_max,
            };
            if let Some(u) = fix_u {
                search = search.with_fixed_threshold(u);
            }
            let out = commands::optimize(&cfg, objective, &search, resolution)?;
            emit_text_and_csv(&cfg, &out.text, &out.csv)
        }
        Command::Mc {
            t_bar,
            u_prime,
            samples,
        } => {
            let pt = OperatingPoint::new(t_bar, u_prime)?;
            let out = commands::monte_carlo(&cfg, &pt, samples)?;
            emit_text_and_csv(&cfg, &out.text, &out.csv)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn negative_lists_and_globals_parse() {
        let cli =
            Cli::try_parse_from(["infoengine", "perf", "--u-prime", "-1,-1.5", "--seed", "3"])
                .unwrap();
        assert_eq!(cli.common.seed, Some(3));
        match cli.command {
            Some(Command::Perf { u_prime, .. }) => assert_eq!(u_prime, vec![-1.0, -1.5]),
            other => panic!("{other:?}"),
        }
        let cli = Cli::try_parse_from([
            "infoengine",
            "optimize",
            "--objective",
            "eta",
            "--fix-u",
            "-0.5",
        ])
        .unwrap();
        assert!(matches!(
            cli.command,
            Some(Command::Optimize {
                objective: Objective::Efficiency,
                fix_u: Some(u),
                ..
            }) if u == -0.5
        ));
        assert!(Cli::try_parse_from(["infoengine", "optimize", "--objective", "speed"]).is_err());
    }
}
