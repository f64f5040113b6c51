//! Flat `key = value` configuration files with command-line overrides.
//!
//! ```text
//! # Ising chain, order-8 CD, sudden limit
//! L = 1600
//! T = 1e-6
//! cd-order = 8
//! method = ode
//! ```
//!
//! Keys are the long flag names without the leading dashes (`_` and `-` are
//! interchangeable). Flags given on the command line override file values,
//! and `--dump-config` prints the resolved configuration in the same format.

use std::collections::BTreeMap;
use std::fmt::{Display, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cdkink::dynamics::{IntegratorOptions, Method};
use cdkink::experiments::{log_space, SweepParameter, ValidationLevel};
use cdkink::model::{CdConfig, CdForm, QuenchProtocol, SystemSpec};
use cdkink::statistics::MAX_ORDER;

use crate::error::CliError;
use crate::output::Format;

/// Every key accepted in a configuration file.
pub const KEYS: &[&str] = &[
    "L",
    "T",
    "g0",
    "cd-order",
    "cd-form",
    "model",
    "alpha",
    "beta",
    "method",
    "qmax",
    "out",
    "format",
    "threads",
    "sweep",
    "values",
    "range",
    "distribution",
    "level",
    "criteria",
];

fn canonical_key(key: &str) -> Option<&'static str> {
    let key = key.replace('_', "-");
    KEYS.iter().copied().find(|k| k.eq_ignore_ascii_case(&key))
}

/// Raw, unvalidated key/value pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    entries: BTreeMap<&'static str, String>,
}

impl Settings {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut settings = Settings::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!(
                    "line {}: expected 'key = value', got '{raw}'",
                    lineno + 1
                )));
            };
            let key = key.trim();
            let canonical = canonical_key(key).ok_or_else(|| {
                CliError::config(format!("line {}: unknown key '{key}'", lineno + 1))
            })?;
            if settings.entries.contains_key(canonical) {
                return Err(CliError::config(format!(
                    "line {}: duplicate key '{canonical}'",
                    lineno + 1
                )));
            }
            settings.entries.insert(canonical, value.trim().to_string());
        }
        Ok(settings)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Settings::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        let canonical = canonical_key(key).unwrap_or_else(|| panic!("unregistered key {key}"));
        self.entries.insert(canonical, value.to_string());
    }

    pub fn set_opt<T: Display>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.set(key, v);
        }
    }

    /// `self` with every entry of `other` taking precedence.
    pub fn overlay(mut self, other: Settings) -> Settings {
        self.entries.extend(other.entries);
        self
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        canonical_key(key).and_then(|k| self.entries.get(k)).map(String::as_str)
    }

    fn parsed<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| CliError::config(format!("invalid value '{v}' for {key}: {e}")))
            })
            .transpose()
    }

    fn get<T>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.parsed(key)?.unwrap_or(default))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModelChoice {
    #[default]
    Tfim,
    Lrkm,
}

impl Display for ModelChoice {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelChoice::Tfim => "tfim",
            ModelChoice::Lrkm => "lrkm",
        })
    }
}

impl FromStr for ModelChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.to_ascii_lowercase().as_str() {
            "tfim" | "ising" => Ok(ModelChoice::Tfim),
            "lrkm" | "kitaev" => Ok(ModelChoice::Lrkm),
            other => Err(CliError::config(format!("unknown model '{other}'"))),
        }
    }
}

fn method_key(m: Method) -> &'static str {
    match m {
        Method::Ode => "ode",
        Method::AnalyticFast => "fast",
        Method::AnalyticUniversal => "universal",
        Method::Lz => "lz",
    }
}

/// Fully resolved and validated run parameters shared by every command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub l: usize,
    pub anneal_time: f64,
    pub g0: f64,
    pub cd_order: usize,
    pub cd_form: CdForm,
    pub model: ModelChoice,
    pub alpha: f64,
    pub beta: f64,
    pub method: Method,
    pub q_max: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            l: 1600,
            anneal_time: 1.0,
            g0: QuenchProtocol::DEFAULT_G0,
            cd_order: 0,
            cd_form: CdForm::TermSum,
            model: ModelChoice::Tfim,
            alpha: 3.0,
            beta: 3.0,
            method: Method::Ode,
            q_max: 3,
            out: None,
            format: Format::Csv,
            threads: None,
        }
    }
}

impl RunConfig {
    pub fn resolve(settings: &Settings) -> Result<Self, CliError> {
        let d = RunConfig::default();
        let cfg = RunConfig {
            l: settings.get("L", d.l)?,
            anneal_time: settings.get("T", d.anneal_time)?,
            g0: settings.get("g0", d.g0)?,
            cd_order: settings.get("cd-order", d.cd_order)?,
            cd_form: settings.get("cd-form", d.cd_form)?,
            model: settings.get("model", d.model)?,
            alpha: settings.get("alpha", d.alpha)?,
            beta: settings.get("beta", d.beta)?,
            method: settings.get("method", d.method)?,
            q_max: settings.get("qmax", d.q_max)?,
            out: settings.parsed("out")?,
            format: settings.get("format", d.format)?,
            threads: settings.parsed("threads")?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let system = self.system()?;
        self.protocol()?;
        self.cd().validate(&system)?;
        if !(1..=MAX_ORDER).contains(&self.q_max) {
            return Err(CliError::config(format!(
                "qmax = {} outside 1..={MAX_ORDER}",
                self.q_max
            )));
        }
        if self.threads == Some(0) {
            return Err(CliError::config("threads must be at least 1"));
        }
        Ok(())
    }

    pub fn system(&self) -> Result<SystemSpec, CliError> {
        Ok(match self.model {
            ModelChoice::Tfim => SystemSpec::tfim(self.l)?,
            ModelChoice::Lrkm => SystemSpec::lrkm(self.l, self.alpha, self.beta)?,
        })
    }

    pub fn protocol(&self) -> Result<QuenchProtocol, CliError> {
        Ok(QuenchProtocol::new(self.g0, self.anneal_time)?)
    }

    pub fn cd(&self) -> CdConfig {
        CdConfig {
            order: self.cd_order,
            form: self.cd_form,
        }
    }

    pub fn integrator(&self) -> IntegratorOptions {
        IntegratorOptions::default()
    }

    pub fn dump(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: &dyn Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        line("L", &self.l);
        line("T", &self.anneal_time);
        line("g0", &self.g0);
        line("cd-order", &self.cd_order);
        line("cd-form", &self.cd_form);
        line("model", &self.model);
        line("alpha", &self.alpha);
        line("beta", &self.beta);
        line("method", &method_key(self.method));
        line("qmax", &self.q_max);
        line("format", &self.format);
        if let Some(out) = &self.out {
            line("out", &out.display());
        }
        if let Some(t) = self.threads {
            line("threads", &t);
        }
        s
    }
}

/// The varied parameter and its values for `sweep`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
    pub distribution: bool,
}

impl SweepConfig {
    pub fn resolve(settings: &Settings) -> Result<Self, CliError> {
        let parameter: SweepParameter = settings
            .parsed("sweep")?
            .ok_or_else(|| CliError::config("sweep needs a parameter (--param T|n|L|alpha|beta)"))?;
        let values = match (settings.raw("values"), settings.raw("range")) {
            (Some(_), Some(_)) => {
                return Err(CliError::config("give either values or range, not both"))
            }
            (Some(list), None) => list
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse::<f64>()
                        .map_err(|e| CliError::config(format!("invalid sweep value '{v}': {e}")))
                })
                .collect::<Result<Vec<_>, _>>()?,
            (None, Some(range)) => parse_range(range)?,
            (None, None) => return Err(CliError::config("sweep needs values or range")),
        };
        Ok(SweepConfig {
            parameter,
            values,
            distribution: settings.get("distribution", false)?,
        })
    }

    pub fn dump(&self) -> String {
        let values: Vec<String> = self.values.iter().map(f64::to_string).collect();
        format!(
            "sweep = {}\nvalues = {}\ndistribution = {}\n",
            self.parameter,
            values.join(","),
            self.distribution
        )
    }
}

/// `start:stop:count`, log-spaced and inclusive.
fn parse_range(range: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = range.split(':').map(str::trim).collect();
    let bad = || CliError::config(format!("range '{range}' must read start:stop:count"));
    let [a, b, c] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = a.parse().map_err(|_| bad())?;
    let stop: f64 = b.parse().map_err(|_| bad())?;
    let count: usize = c.parse().map_err(|_| bad())?;
    Ok(log_space(start, stop, count)?)
}

/// Tier or explicit criterion list for `validate`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidateConfig {
    pub level: ValidationLevel,
    pub criteria: Vec<String>,
}

impl ValidateConfig {
    pub fn resolve(settings: &Settings) -> Result<Self, CliError> {
        let criteria: Vec<String> = settings
            .raw("criteria")
            .map(|c| {
                c.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default();
        let known = cdkink::experiments::criterion_ids();
        if let Some(bad) = criteria.iter().find(|c| !known.contains(&c.as_str())) {
            return Err(CliError::config(format!(
                "unknown criterion '{bad}' (known: {})",
                known.join(", ")
            )));
        }
        Ok(ValidateConfig {
            level: settings.get("level", ValidationLevel::Quick)?,
            criteria,
        })
    }

    pub fn dump(&self) -> String {
        let level = match self.level {
            ValidationLevel::Quick => "quick",
            ValidationLevel::Full => "full",
        };
        let mut s = format!("level = {level}\n");
        if !self.criteria.is_empty() {
            let _ = writeln!(s, "criteria = {}", self.criteria.join(","));
        }
        s
    }
}
