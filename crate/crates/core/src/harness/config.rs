use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::exact::SolverChoice;
use crate::model::ModelParams;
use crate::{Error, Result};

pub const DEFAULT_LEVELS: usize = 20;
pub const DEFAULT_QUANTUM_CAP: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidParams(format!("unknown format '{other}'"))),
        }
    }
}

/// Linear sweep of the interspecies coupling `W`, endpoints included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub parameter: SweptParameter,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweptParameter {
    W,
}

impl SweepSpec {
    pub fn w(start: f64, stop: f64, count: usize) -> Result<Self> {
        let s = Self {
            parameter: SweptParameter::W,
            start,
            stop,
            count,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::InvalidParams("sweep count must be >= 1".into()));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidParams("sweep bounds must be finite".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + i as f64 * step
                }
            })
            .collect()
    }
}

/// Parses `start:stop:count`.
impl std::str::FromStr for SweepSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParams(format!("sweep '{s}' is not start:stop:count"));
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = parts[0].trim().parse().map_err(|_| bad())?;
        let stop = parts[1].trim().parse().map_err(|_| bad())?;
        let count = parts[2].trim().parse().map_err(|_| bad())?;
        Self::w(start, stop, count)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    pub sweep: Option<SweepSpec>,
    pub levels: usize,
    pub n_max: usize,
    pub m_max: usize,
    pub solver: SolverChoice,
    pub out: PathBuf,
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            sweep: None,
            levels: DEFAULT_LEVELS,
            n_max: DEFAULT_QUANTUM_CAP,
            m_max: DEFAULT_QUANTUM_CAP,
            solver: SolverChoice::Auto,
            out: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.levels < 1 {
            return Err(Error::InvalidParams("levels must be >= 1".into()));
        }
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(s)?;
        raw.into_config()
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSweep {
    Text(String),
    Spec {
        #[serde(default = "default_parameter")]
        parameter: String,
        start: f64,
        stop: f64,
        count: usize,
    },
}

fn default_parameter() -> String {
    "W".into()
}

/// Config file layout; every key optional except the boson numbers.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "J_a")]
    j_a: Option<f64>,
    #[serde(rename = "J_b")]
    j_b: Option<f64>,
    #[serde(rename = "U_a")]
    u_a: Option<f64>,
    #[serde(rename = "U_b")]
    u_b: Option<f64>,
    #[serde(rename = "W")]
    w: Option<f64>,
    #[serde(rename = "N_a")]
    n_a: usize,
    #[serde(rename = "N_b")]
    n_b: Option<usize>,
    sweep: Option<RawSweep>,
    levels: Option<usize>,
    n_max: Option<usize>,
    m_max: Option<usize>,
    solver: Option<SolverChoice>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
}

impl RawConfig {
    fn into_config(self) -> Result<RunConfig> {
        let j_a = self.j_a.unwrap_or(1.0);
        let u_a = self.u_a.unwrap_or(0.0);
        let params = ModelParams {
            j_a,
            j_b: self.j_b.unwrap_or(j_a),
            u_a,
            u_b: self.u_b.unwrap_or(u_a),
            w: self.w.unwrap_or(0.0),
            n_a: self.n_a,
            n_b: self.n_b.unwrap_or(self.n_a),
        };
        let sweep = match self.sweep {
            None => None,
            Some(RawSweep::Text(t)) => Some(t.parse()?),
            Some(RawSweep::Spec {
                parameter,
                start,
                stop,
                count,
            }) => {
                if parameter != "W" {
                    return Err(Error::InvalidParams(format!(
                        "only W can be swept, got '{parameter}'"
                    )));
                }
                Some(SweepSpec::w(start, stop, count)?)
            }
        };
        let mut cfg = RunConfig::new(params);
        cfg.sweep = sweep;
        cfg.levels = self.levels.unwrap_or(DEFAULT_LEVELS);
        cfg.n_max = self.n_max.unwrap_or(DEFAULT_QUANTUM_CAP);
        cfg.m_max = self.m_max.unwrap_or(DEFAULT_QUANTUM_CAP);
        cfg.solver = self.solver.unwrap_or_default();
        if let Some(out) = self.out {
            cfg.out = out;
        }
        cfg.format = self.format.unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }
}
