//! Run configuration: built-in defaults, an optional flat `key = value`
//! file, then command-line flags, in increasing precedence.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use infoengine_core::EngineParams;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Both,
}

impl Format {
    pub fn wants_csv(self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn wants_svg(self) -> bool {
        matches!(self, Format::Svg | Format::Both)
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Svg => "svg",
            Format::Both => "both",
        })
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            "both" => Ok(Format::Both),
            other => Err(format!(
                "unknown format '{other}' (expected csv, svg or both)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub delta_e_mev: f64,
    pub t_sys_k: f64,
    pub hbar2b_mev: f64,
    pub t_meter_k: f64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub precision: usize,
    pub tau_star_seconds: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            delta_e_mev: 25.85,
            t_sys_k: 300.0,
            hbar2b_mev: 25.85,
            t_meter_k: 0.0,
            output_path: None,
            format: Format::Csv,
            seed: 42,
            precision: 12,
            tau_star_seconds: None,
        }
    }
}

/// Values given on the command line; `None` leaves the lower layer alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub delta_e: Option<f64>,
    pub t_sys: Option<f64>,
    pub hbar2b: Option<f64>,
    pub t_meter: Option<f64>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub precision: Option<usize>,
    pub tau_star_seconds: Option<f64>,
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("line {line}: invalid value '{value}' for '{key}'")))
}

impl RunConfig {
    /// Parses the flat config format. Blank lines and `#` comments are
    /// ignored; unknown keys are errors.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {line}: expected 'key = value'")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "delta_e" => self.delta_e_mev = parse_value(key, value, line)?,
                "t_sys" => self.t_sys_k = parse_value(key, value, line)?,
                "hbar2b" => self.hbar2b_mev = parse_value(key, value, line)?,
                "t_meter" => self.t_meter_k = parse_value(key, value, line)?,
                "out" => self.output_path = Some(PathBuf::from(value)),
                "format" => {
                    self.format = value
                        .parse()
                        .map_err(|e| CliError::Config(format!("line {line}: {e}")))?
                }
                "seed" => self.seed = parse_value(key, value, line)?,
                "precision" => self.precision = parse_value(key, value, line)?,
                "tau_star_seconds" => self.tau_star_seconds = Some(parse_value(key, value, line)?),
                other => {
                    return Err(CliError::Config(format!(
                        "line {line}: unknown key '{other}'"
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        self.apply_text(&text)
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(v) = o.delta_e {
            self.delta_e_mev = v;
        }
        if let Some(v) = o.t_sys {
            self.t_sys_k = v;
        }
        if let Some(v) = o.hbar2b {
            self.hbar2b_mev = v;
        }
        if let Some(v) = o.t_meter {
            self.t_meter_k = v;
        }
        if let Some(v) = &o.out {
            self.output_path = Some(v.clone());
        }
        if let Some(v) = o.format {
            self.format = v;
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.precision {
            self.precision = v;
        }
        if let Some(v) = o.tau_star_seconds {
            self.tau_star_seconds = Some(v);
        }
    }

    pub fn resolve(file: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = file {
            cfg.apply_file(path)?;
        }
        cfg.apply_overrides(overrides);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.precision == 0 || self.precision > 17 {
            return Err(CliError::Config(
                "precision must be between 1 and 17".into(),
            ));
        }
        if let Some(tau) = self.tau_star_seconds {
            if !(tau.is_finite() && tau > 0.0) {
                return Err(CliError::Config("tau_star_seconds must be positive".into()));
            }
        }
        if self.t_meter_k > self.t_sys_k {
            return Err(CliError::Config("t_meter must not exceed t_sys".into()));
        }
        self.engine_params()?;
        Ok(())
    }

    pub fn engine_params(&self) -> Result<EngineParams, CliError> {
        EngineParams::with_meter_temperature(
            self.delta_e_mev,
            self.t_sys_k,
            self.hbar2b_mev,
            self.t_meter_k,
        )
        .map_err(|e| CliError::Config(e.to_string()))
    }

    /// Every effective value, one `key = value` per line, in the config
    /// file syntax. Unset optional values are emitted commented out.
    pub fn render(&self) -> String {
        let mut s = format!(
            "delta_e = {}\nt_sys = {}\nhbar2b = {}\nt_meter = {}\n",
            self.delta_e_mev, self.t_sys_k, self.hbar2b_mev, self.t_meter_k
        );
        match &self.output_path {
            Some(p) => s.push_str(&format!("out = {}\n", p.display())),
            None => s.push_str("# out = (stdout)\n"),
        }
        s.push_str(&format!(
            "format = {}\nseed = {}\nprecision = {}\n",
            self.format, self.seed, self.precision
        ));
        match self.tau_star_seconds {
            Some(t) => s.push_str(&format!("tau_star_seconds = {t}\n")),
            None => s.push_str("# tau_star_seconds = (reduced time)\n"),
        }
        s
    }
}
