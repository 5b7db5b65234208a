//! Run configuration read from JSON.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::noise::{DephasingPolicy, NoiseParams};
use crate::teleport::InputState;

/// The configuration shipped with the crate: calibrated widths, T2* times,
/// and the dephasing settings used for the reference fidelity table.
pub const DEFAULT_CONFIG: &str = include_str!("../configs/default.json");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Postselect {
    Ns,
    Es,
    Both,
}

impl Postselect {
    pub fn ns(self) -> bool {
        self != Postselect::Es
    }

    pub fn es(self) -> bool {
        self != Postselect::Ns
    }
}

impl FromStr for Postselect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ns" => Ok(Postselect::Ns),
            "es" => Ok(Postselect::Es),
            "both" => Ok(Postselect::Both),
            _ => Err(Error::Config(format!("postselect must be ns, es or both, got '{s}'"))),
        }
    }
}

fn default_inputs() -> Vec<String> {
    InputState::SIX.iter().map(|s| s.label()).collect()
}

fn default_postselect() -> Postselect {
    Postselect::Both
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("reports")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub sigma_g: Vec<f64>,
    pub sigma_cz: Vec<f64>,
    pub t2_star: Vec<f64>,
    pub c_d: f64,
    pub dephasing_policy: DephasingPolicy,
    pub draws: usize,
    pub seed: u64,
    #[serde(default = "default_inputs")]
    pub inputs: Vec<String>,
    #[serde(default = "default_postselect")]
    pub postselect: Postselect,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

/// A parsed config and the SHA-256 of the text it came from.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub sha256: String,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<LoadedConfig> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(LoadedConfig {
            config,
            sha256: sha256_hex(text.as_bytes()),
        })
    }

    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn shipped() -> LoadedConfig {
        Self::parse(DEFAULT_CONFIG).expect("shipped config is valid")
    }

    pub fn validate(&self) -> Result<()> {
        if self.draws == 0 {
            return Err(Error::Config("draws must be at least 1".into()));
        }
        if self.inputs.is_empty() {
            return Err(Error::Config("no input states".into()));
        }
        self.input_states()?;
        self.noise_params()?;
        Ok(())
    }

    pub fn input_states(&self) -> Result<Vec<InputState>> {
        self.inputs
            .iter()
            .map(|s| s.parse().map_err(|e: Error| Error::Config(e.to_string())))
            .collect()
    }

    pub fn noise_params(&self) -> Result<NoiseParams> {
        NoiseParams::from_t2_star(
            self.sigma_g.clone(),
            self.sigma_cz.clone(),
            &self.t2_star,
            self.c_d,
            self.dephasing_policy,
        )
        .map_err(|e| Error::Config(e.to_string()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}
