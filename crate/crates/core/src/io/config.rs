//! TOML scene and extraction configuration.
//!
//! ```toml
//! [grid]
//! subcarriers = 30
//! bandwidth_hz = 20e6
//! carrier_hz = 5.18e9
//! symbol_interval_s = 1e-3
//! symbols = 256
//!
//! [[static_path]]
//! attenuation = [1.0, 0.0]   # re, im
//! delay_ns = 40.0
//!
//! [[dynamic_path]]
//! attenuation = [0.3, 0.0]
//! delay_ns = 50.0            # absolute delay; excess = delay - first static
//! doppler_hz = 40.0
//!
//! [impairment]
//! enabled = true
//! to_scale_s = 100e-9
//! seed = 1
//! snr_db = 20.0              # or: noise_power = 0.011
//!
//! [extraction]
//! sigma = 64.0
//! ifft_size = 128
//! delay_start_m = 0.0
//! delay_stop_m = 32.0
//! delay_step_m = 1.0
//! doppler_crop_hz = 150.0
//! dc_exclusion_bins = 2
//! cpi_symbols = 128
//! cpi_stride = 32
//! epsilon_scale = 1e-3
//! median_peak = false
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{DelayGrid, ExtractConfig};
use crate::sim::{
    random_impairment, ClockImpairment, DynamicPath, PathScene, StaticPath, SubcarrierGrid,
};
use crate::srcc::{PeakMode, WindowSpec};
use crate::SPEED_OF_LIGHT;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridConfig {
    pub subcarriers: usize,
    pub bandwidth_hz: f64,
    pub carrier_hz: f64,
    pub symbol_interval_s: f64,
    pub symbols: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathConfig {
    /// Complex attenuation as `[re, im]`.
    pub attenuation: [f64; 2],
    pub delay_ns: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicPathConfig {
    pub attenuation: [f64; 2],
    pub delay_ns: f64,
    pub doppler_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ImpairmentConfig {
    pub enabled: bool,
    pub to_scale_s: f64,
    pub seed: u64,
    /// Direct noise power; takes precedence over `snr_db`.
    pub noise_power: Option<f64>,
    /// Noise specified as SNR against the noiseless channel power.
    pub snr_db: Option<f64>,
}

impl Default for ImpairmentConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            to_scale_s: 100e-9,
            seed: 1,
            noise_power: None,
            snr_db: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ExtractionConfig {
    pub sigma: f64,
    pub ifft_size: usize,
    pub delay_start_m: f64,
    pub delay_stop_m: f64,
    pub delay_step_m: f64,
    pub doppler_crop_hz: f64,
    pub dc_exclusion_bins: usize,
    pub cpi_symbols: usize,
    pub cpi_stride: usize,
    pub epsilon_scale: f64,
    pub median_peak: bool,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            sigma: 64.0,
            ifft_size: 128,
            delay_start_m: 0.0,
            delay_stop_m: 32.0,
            delay_step_m: 1.0,
            doppler_crop_hz: 150.0,
            dc_exclusion_bins: 2,
            cpi_symbols: 128,
            cpi_stride: 32,
            epsilon_scale: 1e-3,
            median_peak: false,
        }
    }
}

impl ExtractionConfig {
    pub fn to_extract_config(&self) -> Result<ExtractConfig> {
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::InvalidConfig("sigma must be positive".into()));
        }
        if self.cpi_symbols < 2 || self.cpi_stride == 0 {
            return Err(Error::InvalidConfig("cpi_symbols >= 2 and cpi_stride >= 1 required".into()));
        }
        Ok(ExtractConfig {
            window: WindowSpec::new(self.sigma, self.ifft_size),
            peak_mode: if self.median_peak { PeakMode::CpiMedian } else { PeakMode::PerSymbol },
            epsilon_scale: self.epsilon_scale,
            doppler_crop: (-self.doppler_crop_hz, self.doppler_crop_hz),
            dc_exclusion_bins: self.dc_exclusion_bins,
            cpi_symbols: self.cpi_symbols,
            cpi_stride: self.cpi_stride,
        })
    }

    pub fn delay_grid(&self) -> Result<DelayGrid> {
        DelayGrid::from_range_meters(self.delay_start_m, self.delay_stop_m, self.delay_step_m)
    }
}

/// Top-level scene + extraction configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneConfig {
    pub grid: GridConfig,
    #[serde(rename = "static_path", default)]
    pub static_paths: Vec<PathConfig>,
    #[serde(rename = "dynamic_path", default)]
    pub dynamic_paths: Vec<DynamicPathConfig>,
    #[serde(default)]
    pub impairment: ImpairmentConfig,
    #[serde(default)]
    pub extraction: ExtractionConfig,
}

impl SceneConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Build the simulator scene (impairment drawn from the config seed).
    pub fn to_scene(&self) -> Result<PathScene> {
        let grid = SubcarrierGrid::uniform(
            self.grid.subcarriers,
            self.grid.carrier_hz,
            self.grid.bandwidth_hz,
            self.grid.symbol_interval_s,
            self.grid.symbols,
        );
        let mut scene = PathScene {
            grid,
            static_paths: self
                .static_paths
                .iter()
                .map(|p| StaticPath {
                    attenuation: Complex64::new(p.attenuation[0], p.attenuation[1]),
                    delay: p.delay_ns * 1e-9,
                })
                .collect(),
            dynamic_paths: self
                .dynamic_paths
                .iter()
                .map(|p| DynamicPath {
                    attenuation: Complex64::new(p.attenuation[0], p.attenuation[1]),
                    delay: p.delay_ns * 1e-9,
                    doppler: p.doppler_hz,
                })
                .collect(),
            impairment: ClockImpairment::none(self.grid.symbols),
        };
        if self.impairment.enabled {
            scene.impairment =
                random_impairment(self.grid.symbols, self.impairment.to_scale_s, self.impairment.seed);
        }
        scene.impairment.noise_power = match (self.impairment.noise_power, self.impairment.snr_db) {
            (Some(p), _) => p,
            (None, Some(snr)) => scene.noise_power_for_snr_db(snr),
            (None, None) => 0.0,
        };
        scene.validate()?;
        Ok(scene)
    }

    /// Ground truth of the first dynamic path: (excess range m, Doppler Hz).
    /// The first static path is the delay reference.
    pub fn truth(&self) -> Option<(f64, f64)> {
        let s = self.static_paths.first()?;
        let d = self.dynamic_paths.first()?;
        Some(((d.delay_ns - s.delay_ns) * 1e-9 * SPEED_OF_LIGHT, d.doppler_hz))
    }
}
