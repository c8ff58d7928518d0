//! Run configuration: a single JSON document describing one experiment.
//!
//! All quantities are nondimensional.  A run directory always receives a
//! copy of the exact configuration used, so every artifact is reproducible
//! from the directory alone.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{BhError, Result};
use crate::evolve::{Mode, SnapshotSchedule, StepControl};
use crate::grid::SpectralGrid;
use crate::initial_data::{DataSpec, Perturbation};
use crate::selfsim::{CuspWindow, FrameOptions};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct GridConfig {
    pub n: usize,
    pub l_dom: f64,
}

impl GridConfig {
    pub fn build(&self) -> Result<SpectralGrid> {
        SpectralGrid::new(self.n, self.l_dom)
    }
}

/// Frame-selection policy: a snapshot yields a kept frame only while the
/// self-similar grid spacing dX = dx * m^{3/2} stays at or below `dx_max`
/// (i.e. at least 1/dx_max sample points per unit of X).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FrameConfig {
    pub window: f64,
    pub window_samples: usize,
    pub dx_max: f64,
}

impl Default for FrameConfig {
    fn default() -> Self {
        FrameConfig { window: 10.0, window_samples: 201, dx_max: 0.1 }
    }
}

impl FrameConfig {
    pub fn options(&self) -> FrameOptions {
        FrameOptions { window: self.window, window_samples: self.window_samples }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub data: DataSpec,
    pub perturbation: Perturbation,
    pub mode: Mode,
    pub step: StepControl,
    pub schedule: SnapshotSchedule,
    pub frame: FrameConfig,
    pub cusp: CuspWindow,
    /// Bootstrap-ledger constant M.
    pub m_big: f64,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        self.data.validate()?;
        let dx = 2.0 * self.grid.l_dom / self.grid.n as f64;
        if dx > self.data.epsilon.powf(1.5) / 8.0 {
            return Err(BhError::Config(format!(
                "grid spacing {dx:.3e} under-resolves the data scale epsilon^(3/2)/8 = {:.3e}",
                self.data.epsilon.powf(1.5) / 8.0
            )));
        }
        self.step.validate()?;
        if !(self.schedule.ratio > 1.0) || !(self.schedule.m_first > 0.0) {
            return Err(BhError::Config(format!(
                "snapshot schedule needs ratio > 1 and m_first > 0, got {:?}",
                self.schedule
            )));
        }
        if !(self.frame.window > 0.0) || self.frame.window_samples < 3 {
            return Err(BhError::Config("frame window must be positive with >= 3 samples".into()));
        }
        if !(self.frame.dx_max > 0.0) {
            return Err(BhError::Config("frame dx_max must be positive".into()));
        }
        if !(self.cusp.w_lo > 0.0 && self.cusp.w_lo < self.cusp.w_hi && self.cusp.w_hi <= 0.1) {
            return Err(BhError::Config(format!(
                "cusp window must satisfy 0 < w_lo < w_hi <= 0.1, got {:?}",
                self.cusp
            )));
        }
        if !(self.m_big > 1.0) {
            return Err(BhError::Config(format!("M must exceed 1, got {}", self.m_big)));
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| BhError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_file(&self, path: &Path) -> Result<()> {
        crate::io::write_json(path, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::preset;

    #[test]
    fn config_roundtrips_through_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        let cfg = preset("bh-main").unwrap();
        cfg.to_file(&path).unwrap();
        let back = RunConfig::from_file(&path).unwrap();
        let a = serde_json::to_string(&cfg).unwrap();
        let b = serde_json::to_string(&back).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let mut cfg = preset("burgers-oracle").unwrap();
        cfg.cusp = CuspWindow { w_lo: 0.2, w_hi: 0.1 };
        assert!(cfg.validate().is_err());
        let mut cfg = preset("burgers-oracle").unwrap();
        cfg.schedule.ratio = 0.9;
        assert!(cfg.validate().is_err());
        let mut cfg = preset("burgers-oracle").unwrap();
        cfg.grid.n = 100; // under-resolves the data spec
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn malformed_json_is_a_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");
        std::fs::write(&path, "{ not json").unwrap();
        let err = RunConfig::from_file(&path).unwrap_err();
        assert!(matches!(err, BhError::Config(_)));
        assert_eq!(err.exit_code(), 2);
    }
}
