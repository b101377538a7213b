//! Run configuration, from flags or a TOML file with the same keys.
//!
//! ```toml
//! problem = "example1"          # example2, custom:<path>
//! mode = "adaptive"             # uniform
//! theta = 0.8
//! max_elements = 4000
//! max_level = 40
//! out = "levels.csv"
//! dump_mesh = "mesh.txt"
//! dump_indicators = "indicators.csv"
//! reference_elements = 200000
//! seed = 7
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use afem_core::adapt::{StopCriteria, DEFAULT_MAX_ELEMENTS, DEFAULT_MAX_LEVEL};
use serde::Deserialize;

use crate::error::{AfemError, Result};

pub const DEFAULT_THETA: f64 = 0.5;
pub const DEFAULT_REFERENCE_ELEMENTS: usize = 200_000;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemChoice {
    Example1,
    Example2,
    Custom(PathBuf),
}

impl FromStr for ProblemChoice {
    type Err = AfemError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "example1" => Ok(ProblemChoice::Example1),
            "example2" => Ok(ProblemChoice::Example2),
            _ => match s.strip_prefix("custom:") {
                Some(p) if !p.is_empty() => Ok(ProblemChoice::Custom(PathBuf::from(p))),
                _ => Err(AfemError::Usage(format!("unknown problem `{s}` (example1, example2, custom:<path>)"))),
            },
        }
    }
}

impl fmt::Display for ProblemChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemChoice::Example1 => f.write_str("example1"),
            ProblemChoice::Example2 => f.write_str("example2"),
            ProblemChoice::Custom(p) => write!(f, "custom:{}", p.display()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Adaptive,
    Uniform,
}

/// Every setting optional; flags and file entries are merged field by field.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problem: Option<String>,
    pub mode: Option<Mode>,
    pub theta: Option<f64>,
    pub max_elements: Option<usize>,
    pub max_level: Option<usize>,
    pub out: Option<PathBuf>,
    pub dump_mesh: Option<PathBuf>,
    pub dump_indicators: Option<PathBuf>,
    pub reference_elements: Option<usize>,
    pub seed: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AfemError::io(path, e))?;
        toml::from_str(&text).map_err(|source| AfemError::Config { path: path.to_owned(), source })
    }

    /// Fields set in `self` win over `base`.
    pub fn over(self, base: ConfigFile) -> ConfigFile {
        ConfigFile {
            problem: self.problem.or(base.problem),
            mode: self.mode.or(base.mode),
            theta: self.theta.or(base.theta),
            max_elements: self.max_elements.or(base.max_elements),
            max_level: self.max_level.or(base.max_level),
            out: self.out.or(base.out),
            dump_mesh: self.dump_mesh.or(base.dump_mesh),
            dump_indicators: self.dump_indicators.or(base.dump_indicators),
            reference_elements: self.reference_elements.or(base.reference_elements),
            seed: self.seed.or(base.seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemChoice,
    pub mode: Mode,
    pub theta: f64,
    pub stop: StopCriteria,
    /// Per-level CSV; standard output when absent.
    pub out: Option<PathBuf>,
    pub dump_mesh: Option<PathBuf>,
    pub dump_indicators: Option<PathBuf>,
    /// Element budget of the uniform reference solve for problems without a
    /// known energy; zero disables it.
    pub reference_elements: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn new(problem: ProblemChoice) -> Self {
        RunConfig {
            problem,
            mode: Mode::Adaptive,
            theta: DEFAULT_THETA,
            stop: StopCriteria::default(),
            out: None,
            dump_mesh: None,
            dump_indicators: None,
            reference_elements: DEFAULT_REFERENCE_ELEMENTS,
            seed: DEFAULT_SEED,
        }
    }

    pub fn from_file(c: ConfigFile) -> Result<Self> {
        let problem = c
            .problem
            .ok_or_else(|| AfemError::Usage("no problem given (--problem or `problem` in the config)".into()))?
            .parse()?;
        let cfg = RunConfig {
            problem,
            mode: c.mode.unwrap_or_default(),
            theta: c.theta.unwrap_or(DEFAULT_THETA),
            stop: StopCriteria {
                max_elements: c.max_elements.unwrap_or(DEFAULT_MAX_ELEMENTS),
                max_level: c.max_level.unwrap_or(DEFAULT_MAX_LEVEL),
            },
            out: c.out,
            dump_mesh: c.dump_mesh,
            dump_indicators: c.dump_indicators,
            reference_elements: c.reference_elements.unwrap_or(DEFAULT_REFERENCE_ELEMENTS),
            seed: c.seed.unwrap_or(DEFAULT_SEED),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode == Mode::Adaptive && !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(AfemError::Usage(format!("theta must lie in (0, 1), got {}", self.theta)));
        }
        if self.stop.max_elements == 0 {
            return Err(AfemError::Usage("max-elements must be positive".into()));
        }
        Ok(())
    }
}
