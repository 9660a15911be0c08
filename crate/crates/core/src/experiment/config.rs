use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::allocation::{RateConstants, RoundingScheme};
use crate::fem::{Functional, SolverKind};
use crate::sparse_grid::GridKind;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Slsc,
    Mlsc,
    Mc,
    Mlmc,
    Adaptive,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slsc" => Ok(Method::Slsc),
            "mlsc" => Ok(Method::Mlsc),
            "mc" => Ok(Method::Mc),
            "mlmc" => Ok(Method::Mlmc),
            "adaptive" => Ok(Method::Adaptive),
            _ => Err(Error::config(
                "method",
                format!("unknown method '{s}' (slsc, mlsc, mc, mlmc, adaptive)"),
            )),
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Slsc => "slsc",
            Method::Mlsc => "mlsc",
            Method::Mc => "mc",
            Method::Mlmc => "mlmc",
            Method::Adaptive => "adaptive",
        })
    }
}

fn default_coefficient() -> String {
    "kl-exponential".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub spatial_dim: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub h0: f64,
    pub eta: usize,
    #[serde(default = "default_coefficient")]
    pub coefficient: String,
    #[serde(default)]
    pub solver: SolverKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub kind: GridKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            kind: GridKind::Smolyak,
            weights: None,
        }
    }
}

/// Overkill reference: mesh width `h_star` and grid level `l_star`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferenceConfig {
    pub h_star: f64,
    pub l_star: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
}

fn default_method() -> Method {
    Method::Mlsc
}

fn default_sweep_methods() -> Vec<Method> {
    vec![Method::Slsc, Method::Mlsc]
}

/// One experiment: problem, functional, estimator and targets.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    #[serde(default = "default_method")]
    pub method: Method,
    /// Methods compared by `sweep`.
    #[serde(default = "default_sweep_methods")]
    pub sweep_methods: Vec<Method>,
    /// Relative accuracy targets.
    #[serde(default)]
    pub eps: Vec<f64>,
    #[serde(default)]
    pub scheme: RoundingScheme,
    #[serde(default)]
    pub seed: u64,
    /// Fixed grid level for single-level collocation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_level: Option<usize>,
    /// Fixed mesh level for single-level methods.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    /// Explicit multilevel plans, given as grid levels per mesh level.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub plans: Vec<Vec<usize>>,
    pub problem: ProblemConfig,
    pub functional: Functional,
    #[serde(default)]
    pub grid: GridConfig,
    /// Rate constants; estimated from a pilot when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<RateConstants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let key = e.span().map(|s| text[s].trim().to_string()).unwrap_or_default();
            Error::config(if key.is_empty() { "<input>".into() } else { key }, e.message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<output>", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.problem;
        if !(1..=2).contains(&p.spatial_dim) {
            return Err(Error::config("problem.spatial_dim", format!("must be 1 or 2, got {}", p.spatial_dim)));
        }
        if p.n < 1 {
            return Err(Error::config("problem.N", "needs at least one random variable"));
        }
        if p.eta < 2 {
            return Err(Error::config("problem.eta", format!("refinement ratio must be at least 2, got {}", p.eta)));
        }
        let cells = 1.0 / p.h0;
        if !(p.h0 > 0.0 && p.h0 <= 1.0) || (cells - cells.round()).abs() > 1e-9 {
            return Err(Error::config("problem.h0", format!("must be 1/n for a positive integer n, got {}", p.h0)));
        }
        if p.coefficient != "kl-exponential" {
            return Err(Error::config(
                "problem.coefficient",
                format!("unsupported coefficient '{}' (kl-exponential)", p.coefficient),
            ));
        }
        if let Some(&e) = self.eps.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
            return Err(Error::config("eps", format!("targets must be positive, got {e}")));
        }
        self.functional
            .validate(p.spatial_dim)
            .map_err(|e| Error::config("functional", e.to_string()))?;
        if self.grid.kind == GridKind::Custom {
            return Err(Error::config("grid.kind", "custom index sets are not level-indexed"));
        }
        if let Some(rc) = &self.constants {
            rc.validate().map_err(|e| match e {
                Error::Config { key, message } => Error::config(format!("constants.{key}"), message),
                other => other,
            })?;
        }
        if let Some(r) = &self.reference {
            let ratio = (p.h0 / r.h_star).ln() / (p.eta as f64).ln();
            if !(r.h_star > 0.0) || ratio < -1e-9 || (ratio - ratio.round()).abs() > 1e-9 {
                return Err(Error::config(
                    "reference.h_star",
                    format!("{} is not a mesh width h0 eta^-k of the hierarchy", r.h_star),
                ));
            }
        }
        for (i, plan) in self.plans.iter().enumerate() {
            if plan.is_empty() || plan.windows(2).any(|w| w[1] > w[0]) {
                return Err(Error::config(
                    format!("plans[{i}]"),
                    "grid levels must be nonempty and non-increasing",
                ));
            }
        }
        if self.sweep_methods.is_empty() {
            return Err(Error::config("sweep_methods", "needs at least one method"));
        }
        Ok(())
    }

    /// Mesh level of the reference width.
    pub fn reference_level(&self) -> Option<usize> {
        self.reference.as_ref().map(|r| {
            ((self.problem.h0 / r.h_star).ln() / (self.problem.eta as f64).ln()).round() as usize
        })
    }
}

pub const PRESETS: [&str; 2] = ["paper-1d-n20", "paper-2d-n10"];

/// Built-in setups: `paper-1d-n20` is the unit interval with 20 random
/// variables and the point value at `3/4`; `paper-2d-n10` is the unit square
/// with 10 random variables and the local average over the six triangles of
/// the `1/256` mesh around the centre.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let cfg = match name {
        "paper-1d-n20" => ExperimentConfig {
            name: name.into(),
            method: Method::Mlsc,
            sweep_methods: default_sweep_methods(),
            eps: vec![6.3e-4],
            scheme: RoundingScheme::BalancedUpDown,
            seed: 0,
            grid_level: None,
            level: None,
            plans: Vec::new(),
            problem: ProblemConfig {
                spatial_dim: 1,
                n: 20,
                h0: 0.25,
                eta: 2,
                coefficient: default_coefficient(),
                solver: SolverKind::Auto,
            },
            functional: Functional::PointValue { x: vec![0.75] },
            grid: GridConfig::default(),
            constants: Some(RateConstants {
                alpha: 2.1,
                c_s: 0.03,
                beta: 2.1,
                mu: 0.8,
                c: 0.01,
                gamma: 1.0,
                c_c: 1.0,
                eta: 2.0,
                h0: 0.25,
                qoi_scale: None,
            }),
            reference: Some(ReferenceConfig {
                h_star: 1.0 / 1024.0,
                l_star: 5,
                cache_dir: None,
            }),
            output: OutputConfig::default(),
        },
        "paper-2d-n10" => ExperimentConfig {
            name: name.into(),
            method: Method::Mlsc,
            sweep_methods: default_sweep_methods(),
            eps: vec![1e-3],
            scheme: RoundingScheme::UpToGrid,
            seed: 0,
            grid_level: None,
            level: None,
            plans: Vec::new(),
            problem: ProblemConfig {
                spatial_dim: 2,
                n: 10,
                h0: 0.25,
                eta: 2,
                coefficient: default_coefficient(),
                solver: SolverKind::Auto,
            },
            functional: Functional::LocalAverage {
                reference_width: 1.0 / 256.0,
                center: vec![0.5, 0.5],
            },
            grid: GridConfig::default(),
            constants: Some(RateConstants {
                alpha: 2.0,
                c_s: 0.7,
                beta: 2.0,
                mu: 1.4,
                c: 0.05,
                gamma: 2.0,
                c_c: 1.0,
                eta: 2.0,
                h0: 0.25,
                qoi_scale: None,
            }),
            reference: Some(ReferenceConfig {
                h_star: 1.0 / 256.0,
                l_star: 5,
                cache_dir: None,
            }),
            output: OutputConfig::default(),
        },
        _ => {
            return Err(Error::config(
                "preset",
                format!("unknown preset '{name}' ({})", PRESETS.join(", ")),
            ))
        }
    };
    cfg.validate()?;
    Ok(cfg)
}
