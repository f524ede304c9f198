//! Engine and service configuration.
//!
//! The file format is TOML. Every key is optional:
//!
//! ```toml
//! port = 8080                 # 1..=65535
//! data_dir = "data"
//! alpha = 0.7                 # importance decay, (0.5, 1]
//! eta = 0.1                   # preference step, (0, 1]
//! k_neighbors = 10            # cold-start pool size, >= 1
//! level_band = 25.0           # candidate level band, [0, 100]
//! level_step = 10.0           # level gain per fully satisfied rating, [0, 100]
//! batch_period_days = 30      # >= 1
//! window_months = 6           # vacancy window for importance, >= 1
//! top_k_skills = 20           # skills kept per job profile, >= 1; omit for all
//! snapshot_every = 200        # events between snapshots, >= 1
//! scheduler_secs = 0          # seconds between scheduled batches, 0 disables
//! connector = "fixture"       # only "fixture" is supported
//! fixture_dir = "fixtures/oer"
//!
//! [gd]
//! lr = 0.05                   # > 0
//! iters = 500                 # >= 1
//! tol = 1e-6                  # >= 0
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::importance::{validate_alpha, DEFAULT_ALPHA, DEFAULT_WINDOW_MONTHS};
use crate::learner::{UpdateParams, DEFAULT_ETA, DEFAULT_K_NEIGHBORS, DEFAULT_LEVEL_STEP};
use crate::oer::GdParams;
use crate::recommender::DEFAULT_LEVEL_BAND;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectorMode {
    Fixture,
    Live,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub port: u16,
    pub data_dir: PathBuf,
    pub alpha: f64,
    pub eta: f64,
    pub k_neighbors: usize,
    pub level_band: f64,
    pub level_step: f64,
    pub batch_period_days: u32,
    pub window_months: u32,
    pub top_k_skills: Option<usize>,
    pub snapshot_every: u64,
    pub scheduler_secs: u64,
    pub connector: ConnectorMode,
    pub fixture_dir: Option<PathBuf>,
    pub gd: GdParams,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            port: 8080,
            data_dir: PathBuf::from("data"),
            alpha: DEFAULT_ALPHA,
            eta: DEFAULT_ETA,
            k_neighbors: DEFAULT_K_NEIGHBORS,
            level_band: DEFAULT_LEVEL_BAND,
            level_step: DEFAULT_LEVEL_STEP,
            batch_period_days: 30,
            window_months: DEFAULT_WINDOW_MONTHS,
            top_k_skills: None,
            snapshot_every: 200,
            scheduler_secs: 0,
            connector: ConnectorMode::Fixture,
            fixture_dir: None,
            gd: GdParams::default(),
        }
    }
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn update_params(&self) -> UpdateParams {
        UpdateParams {
            eta: self.eta,
            level_step: self.level_step,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        validate_alpha(self.alpha)?;
        self.update_params().validate()?;
        self.gd.validate()?;
        if self.port == 0 {
            return bad("port must lie in 1..=65535".into());
        }
        if self.k_neighbors == 0 {
            return bad("k_neighbors must be at least 1".into());
        }
        if !(0.0..=100.0).contains(&self.level_band) {
            return bad(format!("level_band must lie in [0, 100], got {}", self.level_band));
        }
        if self.batch_period_days == 0 {
            return bad("batch_period_days must be at least 1".into());
        }
        if self.window_months == 0 {
            return bad("window_months must be at least 1".into());
        }
        if self.top_k_skills == Some(0) {
            return bad("top_k_skills must be at least 1".into());
        }
        if self.snapshot_every == 0 {
            return bad("snapshot_every must be at least 1".into());
        }
        if self.connector == ConnectorMode::Live {
            return bad(
                "live repository connectors are not available; use connector = \"fixture\"".into(),
            );
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn overrides_and_nested_gd() {
        let c = Config::from_toml("alpha = 0.9\nport = 9000\n[gd]\nlr = 0.1\niters = 10\ntol = 0.0\n").unwrap();
        assert_eq!(c.alpha, 0.9);
        assert_eq!(c.port, 9000);
        assert_eq!(c.gd.iters, 10);
    }

    #[test]
    fn out_of_range_rejected() {
        for text in [
            "alpha = 0.5",
            "alpha = 1.5",
            "eta = 0.0",
            "k_neighbors = 0",
            "level_band = 120.0",
            "batch_period_days = 0",
            "connector = \"live\"",
            "[gd]\nlr = -1.0\niters = 1\ntol = 0.0",
            "unknown_key = 1",
        ] {
            assert!(matches!(Config::from_toml(text), Err(Error::Config(_))), "{text}");
        }
    }
}
