//! Experiment configuration: flat key=value files, per-problem defaults,
//! and cross-field validation.
//!
//! Grammar: one `key = value` pair per line; blank lines and lines starting
//! with `#` are ignored; later assignments override earlier ones. The
//! `problem` key is required, every other key falls back to that problem's
//! default. Keys:
//!
//! ```text
//! problem     = poly_regression | cubic_supervised | gauss_supervised | heat_dkm
//! optimizer   = adam | sgd
//! averager    = none | partial:A | grouped:B:C | ema:DELTA | polyak:A
//! schedule    = constant:C | poly:C:P
//! batch_size  = positive integer
//! steps       = positive integer
//! seeds       = comma-separated integers
//! eval_every  = positive integer dividing steps
//! test_points = positive integer
//! out_dir     = path
//! ```

use crate::optim::{AveragerSpec, LrSchedule};
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProblemKind {
    PolyRegression,
    CubicSupervised,
    GaussSupervised,
    HeatDkm,
}

impl ProblemKind {
    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::PolyRegression => "poly_regression",
            ProblemKind::CubicSupervised => "cubic_supervised",
            ProblemKind::GaussSupervised => "gauss_supervised",
            ProblemKind::HeatDkm => "heat_dkm",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizerKind {
    Adam,
    Sgd,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::Adam => "adam",
            OptimizerKind::Sgd => "sgd",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemKind,
    pub optimizer: OptimizerKind,
    pub averager: AveragerSpec,
    pub schedule: LrSchedule,
    pub batch_size: usize,
    pub steps: u64,
    pub seeds: Vec<u64>,
    pub eval_every: u64,
    pub test_points: usize,
    pub out_dir: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("unknown key `{key}`")]
    UnknownKey { key: String },
    #[error("invalid value `{value}` for `{key}`: {reason}")]
    BadValue { key: String, value: String, reason: String },
    #[error("config must set `problem` (poly_regression | cubic_supervised | gauss_supervised | heat_dkm)")]
    MissingProblem,
    #[error("{0}")]
    Invalid(String),
}

impl ExperimentConfig {
    /// The problem's default experiment: its published batch size and
    /// learning rate, Adam without averaging, 5 seeds, evaluation every 100
    /// steps on 20000 test points.
    pub fn defaults_for(problem: ProblemKind) -> Self {
        let (batch_size, schedule, steps) = match problem {
            ProblemKind::PolyRegression => (64, LrSchedule::constant(1e-2), 20_000),
            ProblemKind::CubicSupervised => (256, LrSchedule::constant(1e-2), 10_000),
            ProblemKind::GaussSupervised => (256, LrSchedule::constant(1e-3), 10_000),
            ProblemKind::HeatDkm => (2048, LrSchedule::constant(5e-4), 30_000),
        };
        ExperimentConfig {
            problem,
            optimizer: OptimizerKind::Adam,
            averager: AveragerSpec::None,
            schedule,
            batch_size,
            steps,
            seeds: vec![0, 1, 2, 3, 4],
            eval_every: 100,
            test_points: 20_000,
            out_dir: PathBuf::from("out"),
        }
    }

    pub fn parse_str(text: &str) -> Result<Self, ConfigError> {
        let pairs = token_pairs(text)?;
        let problem = pairs
            .iter()
            .rev()
            .find(|(_, k, _)| k == "problem")
            .map(|(_, _, v)| parse_problem(v))
            .transpose()?
            .ok_or(ConfigError::MissingProblem)?;
        let mut cfg = Self::defaults_for(problem);
        for (_, key, value) in &pairs {
            cfg.apply(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::parse_str(&text)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        match key {
            "problem" => self.problem = parse_problem(value)?,
            "optimizer" => {
                self.optimizer = match value {
                    "adam" => OptimizerKind::Adam,
                    "sgd" => OptimizerKind::Sgd,
                    _ => return Err(bad(key, value, "expected adam or sgd")),
                }
            }
            "averager" => self.averager = parse_averager(value)?,
            "schedule" => self.schedule = parse_schedule(value)?,
            "batch_size" => self.batch_size = parse_num::<usize>(key, value)?,
            "steps" => self.steps = parse_num::<u64>(key, value)?,
            "seeds" => {
                self.seeds = value
                    .split(',')
                    .map(|s| parse_num::<u64>(key, s.trim()))
                    .collect::<Result<_, _>>()?
            }
            "eval_every" => self.eval_every = parse_num::<u64>(key, value)?,
            "test_points" => self.test_points = parse_num::<usize>(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            _ => return Err(ConfigError::UnknownKey { key: key.to_string() }),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.steps == 0 {
            return Err(ConfigError::Invalid("steps must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(ConfigError::Invalid("batch_size must be at least 1".into()));
        }
        if self.eval_every == 0 || self.steps % self.eval_every != 0 {
            return Err(ConfigError::Invalid(format!(
                "eval_every must divide steps ({} does not divide {})",
                self.eval_every, self.steps
            )));
        }
        if self.test_points == 0 {
            return Err(ConfigError::Invalid("test_points must be at least 1".into()));
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::Invalid("seeds must be non-empty".into()));
        }
        let mut sorted = self.seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.seeds.len() {
            return Err(ConfigError::Invalid("seeds must be distinct".into()));
        }
        match self.averager {
            AveragerSpec::None => {}
            AveragerSpec::Partial { window } => {
                if window == 0 {
                    return Err(ConfigError::Invalid("partial averaging window must be at least 1".into()));
                }
            }
            AveragerSpec::Grouped { groups, group_size } => {
                if groups == 0 || group_size == 0 {
                    return Err(ConfigError::Invalid("grouped averaging needs positive group count and size".into()));
                }
                let span = groups as u64 * group_size as u64;
                if span > self.steps {
                    return Err(ConfigError::Invalid(format!(
                        "grouped averaging spans {span} iterates but the run has only {} steps",
                        self.steps
                    )));
                }
            }
            AveragerSpec::Ema { decay } => {
                if !(0.0..1.0).contains(&decay) {
                    return Err(ConfigError::Invalid("ema decay must lie in [0, 1)".into()));
                }
            }
            AveragerSpec::Polyak { .. } => {}
        }
        match self.schedule {
            LrSchedule::Constant { c } => {
                if !(c > 0.0) || !c.is_finite() {
                    return Err(ConfigError::Invalid("schedule constant must be positive".into()));
                }
            }
            LrSchedule::PolyDecay { c, p } => {
                if !(c > 0.0) || !c.is_finite() {
                    return Err(ConfigError::Invalid("schedule constant must be positive".into()));
                }
                if !(p > 0.0 && p < 1.0) {
                    return Err(ConfigError::Invalid("schedule exponent must lie in (0, 1)".into()));
                }
            }
        }
        Ok(())
    }
}

fn token_pairs(text: &str) -> Result<Vec<(usize, String, String)>, ConfigError> {
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax { line: i + 1, text: line.to_string() });
        };
        pairs.push((i + 1, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn bad(key: &str, value: &str, reason: &str) -> ConfigError {
    ConfigError::BadValue { key: key.into(), value: value.into(), reason: reason.into() }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| bad(key, value, "not a valid number"))
}

fn parse_float(key: &str, value: &str) -> Result<f64, ConfigError> {
    let x: f64 = value.parse().map_err(|_| bad(key, value, "not a valid number"))?;
    if !x.is_finite() {
        return Err(bad(key, value, "must be finite"));
    }
    Ok(x)
}

fn parse_problem(value: &str) -> Result<ProblemKind, ConfigError> {
    match value {
        "poly_regression" => Ok(ProblemKind::PolyRegression),
        "cubic_supervised" => Ok(ProblemKind::CubicSupervised),
        "gauss_supervised" => Ok(ProblemKind::GaussSupervised),
        "heat_dkm" => Ok(ProblemKind::HeatDkm),
        _ => Err(bad("problem", value, "unknown problem name")),
    }
}

fn parse_averager(value: &str) -> Result<AveragerSpec, ConfigError> {
    let parts: Vec<&str> = value.split(':').collect();
    match parts.as_slice() {
        ["none"] => Ok(AveragerSpec::None),
        ["partial", a] => Ok(AveragerSpec::Partial { window: parse_num("averager", a)? }),
        ["grouped", b, c] => Ok(AveragerSpec::Grouped {
            groups: parse_num("averager", b)?,
            group_size: parse_num("averager", c)?,
        }),
        ["ema", d] => Ok(AveragerSpec::Ema { decay: parse_float("averager", d)? }),
        ["polyak", a] => Ok(AveragerSpec::Polyak { start: parse_num("averager", a)? }),
        _ => Err(bad(
            "averager",
            value,
            "expected none, partial:A, grouped:B:C, ema:DELTA, or polyak:A",
        )),
    }
}

fn parse_schedule(value: &str) -> Result<LrSchedule, ConfigError> {
    let parts: Vec<&str> = value.split(':').collect();
    match parts.as_slice() {
        ["constant", c] => Ok(LrSchedule::Constant { c: parse_float("schedule", c)? }),
        ["poly", c, p] => Ok(LrSchedule::PolyDecay {
            c: parse_float("schedule", c)?,
            p: parse_float("schedule", p)?,
        }),
        _ => Err(bad("schedule", value, "expected constant:C or poly:C:P")),
    }
}

/// Averager label used in filenames and plot legends.
pub fn averager_slug(spec: AveragerSpec) -> String {
    match spec {
        AveragerSpec::None => "none".into(),
        AveragerSpec::Partial { window } => format!("partial{window}"),
        AveragerSpec::Grouped { groups, group_size } => format!("grouped{groups}x{group_size}"),
        AveragerSpec::Ema { decay } => format!("ema{}", float_slug(decay)),
        AveragerSpec::Polyak { start } => format!("polyak{start}"),
    }
}

/// Schedule label used in the canonical config text.
pub fn schedule_text(schedule: &LrSchedule) -> String {
    match schedule {
        LrSchedule::Constant { c } => format!("constant:{c}"),
        LrSchedule::PolyDecay { c, p } => format!("poly:{c}:{p}"),
    }
}

pub fn averager_text(spec: AveragerSpec) -> String {
    match spec {
        AveragerSpec::None => "none".into(),
        AveragerSpec::Partial { window } => format!("partial:{window}"),
        AveragerSpec::Grouped { groups, group_size } => format!("grouped:{groups}:{group_size}"),
        AveragerSpec::Ema { decay } => format!("ema:{decay}"),
        AveragerSpec::Polyak { start } => format!("polyak:{start}"),
    }
}

fn float_slug(x: f64) -> String {
    format!("{x}").replace('.', "p").replace('-', "m")
}
