use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inference::{CiVariant, Truth};
use crate::par::Execution;
use crate::wbedd::{alpha_for_moment, LambdaLaw, WbeddParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentKind {
    Coverage,
    Distribution,
    Power,
}

/// Generating model of one network family. Row and column heterogeneity
/// are given either as target moments (`f2`, `g2`) or as exponents
/// (`alpha_f`, `alpha_g`); the moment wins when both are set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_f: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_g: Option<f64>,
    /// Row fraction of the simulated matrices.
    pub c: f64,
    /// Switches to a Gamma-distributed intensity with this shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_shape: Option<f64>,
}

impl ModelConfig {
    /// `λ = 1`, `F₂ = 3`, `G₂ = 2`, `c = 1/2`.
    pub fn reference() -> Self {
        Self {
            lambda: 1.0,
            f2: Some(3.0),
            g2: Some(2.0),
            alpha_f: None,
            alpha_g: None,
            c: 0.5,
            gamma_shape: None,
        }
    }

    fn exponent(moment: Option<f64>, alpha: Option<f64>, name: &str) -> Result<f64> {
        match (moment, alpha) {
            (Some(m), _) => alpha_for_moment(m),
            (None, Some(a)) => Ok(a),
            (None, None) => Err(Error::Config(format!("model needs {name}2 or alpha_{name}"))),
        }
    }

    pub fn wbedd(&self) -> Result<WbeddParams> {
        let p = WbeddParams::new(
            self.lambda,
            Self::exponent(self.f2, self.alpha_f, "f")?,
            Self::exponent(self.g2, self.alpha_g, "g")?,
        )?;
        match self.gamma_shape {
            Some(shape) => p.with_random_lambda(LambdaLaw::Gamma { shape }),
            None => Ok(p),
        }
    }

    pub fn truth(&self) -> Result<Truth> {
        let p = self.wbedd()?;
        Ok(Truth { lambda: self.lambda, moments: p.moments(), c: self.c })
    }

    /// Same model with the row moment replaced.
    pub fn with_f2(&self, f2: f64) -> Self {
        Self { f2: Some(f2), alpha_f: None, ..self.clone() }
    }
}

fn default_alpha() -> f64 {
    0.05
}

fn default_variants() -> Vec<CiVariant> {
    CiVariant::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub params: ModelConfig,
    /// Second family for the power study; defaults to `params` with `F₂`
    /// taken from `f2_b_grid`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub params_b: Option<ModelConfig>,
    pub n_index_list: Vec<usize>,
    pub replicates: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub master_seed: u64,
    #[serde(default = "default_variants")]
    pub ci_variants: Vec<CiVariant>,
    #[serde(default)]
    pub f2_b_grid: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub execution: Execution,
}

impl ExperimentConfig {
    pub fn new(
        experiment: ExperimentKind,
        n_index_list: Vec<usize>,
        replicates: usize,
        master_seed: u64,
    ) -> Self {
        Self {
            experiment,
            params: ModelConfig::reference(),
            params_b: None,
            n_index_list,
            replicates,
            alpha: default_alpha(),
            master_seed,
            ci_variants: default_variants(),
            f2_b_grid: Vec::new(),
            output: None,
            execution: Execution::default(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_json_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be ≥ 1".into()));
        }
        if self.n_index_list.is_empty() {
            return Err(Error::Config("n_index_list is empty".into()));
        }
        if let Some(n) = self.n_index_list.iter().find(|&&n| n < 4) {
            return Err(Error::Config(format!("every N must be ≥ 4, got {n}")));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.params.c > 0.0 && self.params.c < 1.0) {
            return Err(Error::Config(format!("c must lie in (0, 1), got {}", self.params.c)));
        }
        self.params.wbedd()?;
        match self.experiment {
            ExperimentKind::Coverage => {
                if self.ci_variants.is_empty() {
                    return Err(Error::Config("ci_variants is empty".into()));
                }
            }
            ExperimentKind::Distribution => {}
            ExperimentKind::Power => {
                if self.f2_b_grid.is_empty() {
                    return Err(Error::Config("f2_b_grid is empty".into()));
                }
                if let Some(n) = self.n_index_list.iter().find(|&&n| n % 2 != 0) {
                    return Err(Error::Config(format!(
                        "power experiments split N evenly between two networks; N = {n} is odd"
                    )));
                }
                for &f2 in &self.f2_b_grid {
                    self.model_b(f2)?.wbedd()?;
                }
            }
        }
        Ok(())
    }

    pub(crate) fn model_b(&self, f2_b: f64) -> Result<ModelConfig> {
        let base = self.params_b.as_ref().unwrap_or(&self.params);
        let m = base.with_f2(f2_b);
        if !(m.c > 0.0 && m.c < 1.0) {
            return Err(Error::Config(format!("c must lie in (0, 1), got {}", m.c)));
        }
        Ok(m)
    }
}
