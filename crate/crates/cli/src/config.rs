//! Campaign configuration and instance files.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use nctori::bsp::SchrodingerInstance;
use nctori::cwikel::{symbol_serde, CwikelInstance, Symbol};
use nctori::FourierElement;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Bsp,
    Borderline,
    Clr,
    Lt,
    Sobolev,
    Cwikel,
    Majorization,
    Nu0,
    All,
}

impl Suite {
    /// Every suite that runs checks, in report order.
    pub const CONCRETE: [Suite; 8] = [
        Suite::Bsp,
        Suite::Borderline,
        Suite::Clr,
        Suite::Lt,
        Suite::Sobolev,
        Suite::Cwikel,
        Suite::Majorization,
        Suite::Nu0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bsp => "bsp",
            Suite::Borderline => "borderline",
            Suite::Clr => "clr",
            Suite::Lt => "lt",
            Suite::Sobolev => "sobolev",
            Suite::Cwikel => "cwikel",
            Suite::Majorization => "majorization",
            Suite::Nu0 => "nu0",
            Suite::All => "all",
        }
    }

    pub fn expand(self) -> Vec<Suite> {
        if self == Suite::All {
            Self::CONCRETE.to_vec()
        } else {
            vec![self]
        }
    }

    pub fn index(self) -> u64 {
        Self::CONCRETE
            .iter()
            .position(|&s| s == self)
            .unwrap_or(Self::CONCRETE.len()) as u64
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Seeded corpus parameters. Unset fields take per-suite defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub count: Option<usize>,
    /// Torus dimension.
    pub n: Option<usize>,
    /// Operator truncation radius.
    pub k_op: Option<usize>,
    /// Trace-estimator radius.
    pub k_tau: Option<usize>,
    /// Fourier support radius of generated elements.
    pub radius: Option<usize>,
    /// Support radius of generated symbols.
    pub symbol_radius: Option<usize>,
    pub lambda_max: Option<f64>,
    /// Riesz-mean exponents for the Lieb-Thirring suite.
    pub gammas: Option<Vec<f64>>,
}

/// An instance file, either bound to the selected suite or tagged with its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceSource {
    Path(PathBuf),
    Tagged { suite: Suite, path: PathBuf },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub suite: Option<Suite>,
    pub seed: Option<u64>,
    pub generator: Option<GeneratorSpec>,
    #[serde(default)]
    pub instances: Vec<InstanceSource>,
    pub tolerance: Option<f64>,
    pub out: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, &e))
    }
}

/// Element plus symbol, the input of the Hilbert-Schmidt and majorization checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairInstance {
    pub x: FourierElement,
    #[serde(with = "symbol_serde")]
    pub g: Symbol,
}

fn default_sobolev_k_tau() -> usize {
    3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevInstance {
    pub family: Vec<FourierElement>,
    #[serde(default = "default_sobolev_k_tau")]
    pub k_tau: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Nu0Instance {
    pub n: usize,
    pub lambda_max: f64,
}

/// Parsed contents of one instance file.
#[derive(Debug, Clone)]
pub enum InstanceBatch {
    Schrodinger(Vec<SchrodingerInstance>),
    Cwikel(Vec<CwikelInstance>),
    Pair(Vec<PairInstance>),
    Sobolev(Vec<SobolevInstance>),
    Nu0(Vec<Nu0Instance>),
}

/// A file holds one object or an array of them.
fn read_many<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parsed = if text.trim_start().starts_with('[') {
        serde_json::from_str::<Vec<T>>(&text)
    } else {
        serde_json::from_str::<T>(&text).map(|one| vec![one])
    };
    parsed.map_err(|e| CliError::parse(path, &e))
}

fn validated<T>(path: &Path, items: Vec<T>, check: impl Fn(&T) -> Result<(), String>) -> CliResult<Vec<T>> {
    for (index, item) in items.iter().enumerate() {
        check(item).map_err(|message| CliError::Instance {
            path: path.to_path_buf(),
            index,
            message,
        })?;
    }
    Ok(items)
}

pub fn load_instances(suite: Suite, path: &Path) -> CliResult<InstanceBatch> {
    Ok(match suite {
        Suite::Bsp | Suite::Borderline | Suite::Clr | Suite::Lt => {
            InstanceBatch::Schrodinger(validated(path, read_many(path)?, |i: &SchrodingerInstance| {
                i.validate().map_err(|e| e.to_string())
            })?)
        }
        Suite::Cwikel => InstanceBatch::Cwikel(validated(path, read_many(path)?, |i: &CwikelInstance| {
            i.validate().map_err(|e| e.to_string())
        })?),
        Suite::Majorization => InstanceBatch::Pair(validated(path, read_many(path)?, |i: &PairInstance| {
            match i.g.keys().find(|k| k.len() != i.x.dim()) {
                Some(k) => Err(format!("symbol point {k:?} has the wrong dimension")),
                None => Ok(()),
            }
        })?),
        Suite::Sobolev => InstanceBatch::Sobolev(validated(path, read_many(path)?, |i: &SobolevInstance| {
            if i.family.is_empty() {
                Err("empty family".into())
            } else {
                Ok(())
            }
        })?),
        Suite::Nu0 => InstanceBatch::Nu0(validated(path, read_many(path)?, |i: &Nu0Instance| {
            if i.n >= 1 && i.lambda_max >= 1.0 && i.lambda_max.is_finite() {
                Ok(())
            } else {
                Err("need n >= 1 and finite lambda_max >= 1".into())
            }
        })?),
        Suite::All => return Err(CliError::Usage("instance files need a concrete suite".into())),
    })
}
