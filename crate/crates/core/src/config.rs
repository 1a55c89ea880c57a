//! Run configuration, loaded from a `key = value` file (TOML) and
//! overridden by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterParams;
use crate::embedding::{GloveParams, Weighting};
use crate::error::{Error, Result};
use crate::filter::FilterParams;
use crate::ranking::Separator;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub sigma_threshold: f64,
    pub min_vendor_labels: usize,
    pub window: usize,
    pub dim: usize,
    pub epochs: usize,
    pub x_max: f64,
    pub alpha: f64,
    pub lr: f64,
    pub bandwidth: f64,
    pub ms_max_iter: usize,
    pub delta_threshold: f64,
    pub top_n: usize,
    pub seed: u64,
    pub dictionary_path: Option<PathBuf>,
    /// Worker cap; 0 uses every core, 1 is the sequential reference mode.
    pub threads: usize,
    pub ascii_sep: bool,
    pub reports: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub state: Option<PathBuf>,
    pub gt: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            sigma_threshold: 0.3,
            min_vendor_labels: 5,
            window: 40,
            dim: 32,
            epochs: 100,
            x_max: 100.0,
            alpha: 0.75,
            lr: 0.05,
            bandwidth: 2.0,
            ms_max_iter: 100,
            delta_threshold: 0.3,
            top_n: 5,
            seed: 1,
            dictionary_path: None,
            threads: 0,
            ascii_sep: false,
            reports: None,
            out: None,
            state: None,
            gt: None,
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if v > 0.0 && v <= 1.0 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be in (0, 1], got {v}")))
            }
        };
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be positive, got {v}")))
            }
        };
        let at_least_one = |name: &str, v: usize| {
            if v >= 1 {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must be at least 1")))
            }
        };
        unit("sigma_threshold", self.sigma_threshold)?;
        unit("delta_threshold", self.delta_threshold)?;
        positive("x_max", self.x_max)?;
        positive("alpha", self.alpha)?;
        positive("lr", self.lr)?;
        positive("bandwidth", self.bandwidth)?;
        at_least_one("window", self.window)?;
        at_least_one("dim", self.dim)?;
        at_least_one("epochs", self.epochs)?;
        at_least_one("ms_max_iter", self.ms_max_iter)?;
        at_least_one("top_n", self.top_n)?;
        Ok(())
    }

    pub fn filter_params(&self) -> FilterParams {
        FilterParams {
            sigma_threshold: self.sigma_threshold,
            min_vendor_labels: self.min_vendor_labels,
        }
    }

    pub fn glove_params(&self) -> GloveParams {
        GloveParams {
            dim: self.dim,
            epochs: self.epochs,
            weighting: Weighting {
                x_max: self.x_max,
                alpha: self.alpha,
            },
            learning_rate: self.lr,
            seed: self.seed,
        }
    }

    pub fn cluster_params(&self) -> ClusterParams {
        ClusterParams {
            bandwidth: self.bandwidth,
            max_iter: self.ms_max_iter,
            delta_threshold: self.delta_threshold,
        }
    }

    pub fn separator(&self) -> Separator {
        if self.ascii_sep {
            Separator::Ascii
        } else {
            Separator::DoubleBar
        }
    }
}
