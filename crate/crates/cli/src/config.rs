use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

/// A scalar or a list in the config file.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    One(f64),
    Many(Vec<f64>),
}

impl Grid {
    fn into_vec(self) -> Vec<f64> {
        match self {
            Grid::One(x) => vec![x],
            Grid::Many(v) => v,
        }
    }
}

/// Contents of a `--config` file. Every field is optional; flags take precedence.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub epsilon: Option<Grid>,
    #[serde(rename = "A")]
    pub a: Option<Grid>,
    pub order: Option<usize>,
    pub threshold: Option<f64>,
    #[serde(rename = "box")]
    pub half_width: Option<f64>,
    pub seeds: Option<usize>,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
    pub steps: Option<usize>,
    pub floor: Option<f64>,
    pub degree: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("bad config {}: {e}", path.display())))
    }

    /// Fields set on `over` replace those of `self`.
    pub fn overlay(self, over: ConfigFile) -> ConfigFile {
        ConfigFile {
            epsilon: over.epsilon.or(self.epsilon),
            a: over.a.or(self.a),
            order: over.order.or(self.order),
            threshold: over.threshold.or(self.threshold),
            half_width: over.half_width.or(self.half_width),
            seeds: over.seeds.or(self.seeds),
            out: over.out.or(self.out),
            workers: over.workers.or(self.workers),
            steps: over.steps.or(self.steps),
            floor: over.floor.or(self.floor),
            degree: over.degree.or(self.degree),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Eigen,
    Manifold,
    Homoclinic,
    Scan,
    Transversality,
    Soliton,
    Portrait,
}

/// Fully resolved settings for one run; embedded in every output file.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub epsilon: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
    pub order: usize,
    pub threshold: f64,
    #[serde(rename = "box")]
    pub half_width: f64,
    pub seeds: usize,
    pub out: PathBuf,
    pub workers: Option<usize>,
    pub steps: usize,
    pub floor: f64,
    pub degree: usize,
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

impl RunConfig {
    pub fn resolve(command: Command, f: ConfigFile) -> Result<Self, CliError> {
        use Command::*;
        let default_eps = match command {
            Scan => vec![0.0004, 0.01, 0.1, 1.0],
            Transversality => vec![0.0002],
            Portrait => vec![-0.1, 0.1, 1.0, 2.0],
            _ => vec![0.0004],
        };
        let default_a = match command {
            Scan => vec![-0.145, -0.13, -0.115],
            Transversality => linspace(-0.145, -0.115, 31),
            Portrait => vec![0.0],
            _ => vec![-0.125],
        };
        let cfg = RunConfig {
            command,
            epsilon: f.epsilon.map_or(default_eps, Grid::into_vec),
            a: f.a.map_or(default_a, Grid::into_vec),
            order: f.order.unwrap_or(dnls_core::manifold::DEFAULT_ORDER),
            threshold: f.threshold.unwrap_or(dnls_core::homoclinic::DEFAULT_THRESHOLD),
            half_width: f.half_width.unwrap_or(1.0),
            seeds: f.seeds.unwrap_or(dnls_core::homoclinic::DEFAULT_SEEDS),
            out: f.out.unwrap_or_else(|| PathBuf::from(".")),
            workers: f.workers,
            steps: f.steps.unwrap_or(1000),
            floor: f.floor.unwrap_or(dnls_core::soliton::DEFAULT_FLOOR),
            degree: f.degree.unwrap_or(4),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.epsilon.is_empty() || self.a.is_empty() {
            return bad("epsilon and A grids must be nonempty".into());
        }
        if let Some(x) = self.epsilon.iter().chain(&self.a).find(|x| !x.is_finite()) {
            return bad(format!("non-finite parameter {x}"));
        }
        if self.epsilon.contains(&0.0) {
            return bad("epsilon must be nonzero".into());
        }
        if self.command != Command::Portrait && self.a.contains(&0.0) {
            return bad("A must be nonzero for the 4-d map".into());
        }
        if self.command == Command::Transversality && self.epsilon.len() != 1 {
            return bad("transversality takes a single epsilon".into());
        }
        if self.order < 1 {
            return bad("order must be at least 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return bad(format!("threshold must be positive, got {}", self.threshold));
        }
        if !(self.half_width > 0.0 && self.half_width.is_finite()) {
            return bad(format!("box must be positive, got {}", self.half_width));
        }
        if self.seeds < 1 {
            return bad("seeds must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if !(self.floor > 0.0) {
            return bad("floor must be positive".into());
        }
        Ok(())
    }

    /// Every `(epsilon, A)` pair, epsilon outermost.
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.epsilon
            .iter()
            .flat_map(|&e| self.a.iter().map(move |&a| (e, a)))
            .collect()
    }
}
