use serde::{Deserialize, Serialize};

use crate::algebra::Parity;
use crate::error::{Error, Result};
use crate::jet::{FiberCoord, Signature};

/// Environment variable naming the default session config file.
pub const CONFIG_ENV: &str = "JETCALC_CONFIG";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberDecl {
    pub name: String,
    #[serde(default)]
    pub odd: bool,
}

/// Numerical tolerances, in one place.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    pub gauss_bonnet_rel: f64,
    pub gauss_map_rel: f64,
    pub grassmann_abs: f64,
    pub reparam_abs: f64,
    pub transport_abs: f64,
    pub brioschi_abs: f64,
    pub variation_abs: f64,
    pub chain_rule_abs: f64,
    pub sphere_delta: f64,
    pub sphere_resolution: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            gauss_bonnet_rel: 1e-3,
            gauss_map_rel: 1e-3,
            grassmann_abs: 1e-9,
            reparam_abs: 1e-8,
            transport_abs: 1e-10,
            brioschi_abs: 1e-8,
            variation_abs: 1e-6,
            chain_rule_abs: 1e-10,
            sphere_delta: 1e-3,
            sphere_resolution: 400,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub r: u16,
    #[serde(default)]
    pub s: u16,
    pub fiber: Vec<FiberDecl>,
    #[serde(default = "default_order")]
    pub order: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

fn default_order() -> usize {
    4
}

impl SessionConfig {
    pub fn from_toml(text: &str) -> Result<SessionConfig> {
        let cfg: SessionConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.signature()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<SessionConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        SessionConfig::from_toml(&text)
    }

    pub fn signature(&self) -> Result<Signature> {
        let fiber = self
            .fiber
            .iter()
            .map(|f| FiberCoord {
                name: f.name.clone(),
                parity: if f.odd { Parity::Odd } else { Parity::Even },
            })
            .collect();
        Signature::new(self.r, self.s, fiber).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_signature(sig: &Signature) -> SessionConfig {
        SessionConfig {
            r: sig.r,
            s: sig.s,
            fiber: sig
                .fiber
                .iter()
                .map(|f| FiberDecl {
                    name: f.name.clone(),
                    odd: f.parity.is_odd(),
                })
                .collect(),
            order: default_order(),
            seed: 0,
            tolerances: Tolerances::default(),
        }
    }
}
