//! Experiment configuration file.
//!
//! TOML with one table per subsystem. Every key is required unless marked
//! optional below; unknown keys are rejected so typos do not silently fall
//! back to defaults. `configs/default.toml` documents each key.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Deserialize;
use v2i_radar::channel::DopplerConvention;
use v2i_radar::estimator::CfarConfig;
use v2i_radar::link::LinkParams;
use v2i_radar::mac::{MacConfig, Vehicle};
use v2i_radar::waveform::FrameKind;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: u64,
    pub trials: usize,
    pub radar: RadarSection,
    pub planner: PlannerSection,
    pub link: LinkSection,
    pub mac: MacConfig,
    pub scenario: ScenarioSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RadarSection {
    pub frame: FrameKind,
    pub pulses: usize,
    pub pri_s: f64,
    pub range_bins: usize,
    pub fft_len: usize,
    /// Per-sample complex noise power at the receiver.
    pub noise_power: f64,
    pub convention: DopplerConvention,
    pub cfar: CfarConfig,
    pub targets: Vec<TargetEntry>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetEntry {
    pub range_m: f64,
    pub velocity_mps: f64,
    pub amplitude: f64,
    pub phase_deg: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerSection {
    pub frame: FrameKind,
    pub d_m: f64,
    pub phi_bs_deg: f64,
    pub theta_start_deg: f64,
    pub phi_sradar_deg: f64,
    pub dv_mps: f64,
    pub v_max_mps: f64,
    pub w_car_m: f64,
    pub k1: f64,
    pub k2: f64,
    /// Doppler resolution of the whole-coverage sweep used as a
    /// counter-example.
    pub whole_area_dv_mps: f64,
    pub unambiguous_max_pri_s: f64,
    pub unambiguous_points: usize,
    pub resolution_pri_s: Vec<f64>,
    pub resolution_max_packets: usize,
    pub resolution_packet_step: usize,
    pub duty_theta_start_deg: Vec<f64>,
    pub duty_phi_sradar_deg: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkSection {
    pub speed_mps: f64,
    pub dt_s: f64,
    /// Beamwidth used for the distance sweep.
    pub theta_az_deg: f64,
    pub distances_m: Vec<f64>,
    /// Distance used for the beamwidth sweep.
    pub d_m: f64,
    pub beamwidths_deg: Vec<f64>,
    pub params: LinkParams,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub theta_az_deg: f64,
    pub overlap_ratio: f64,
    pub dv_mps: f64,
    pub sweep_dv_mps: Vec<f64>,
    pub sweep_overlap_ratio: Vec<f64>,
    pub overhead_phi_sradar_deg: Vec<f64>,
    pub vehicles: Vec<Vehicle>,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| anyhow::anyhow!("invalid configuration: {e}"))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in config {}", path.display()))
    }
}
