//! Beacon-header-interval accounting for legacy and radar-assisted beam
//! training, communication beam sectors, and the misalignment Monte Carlo.

mod misalignment;
mod sectors;

pub use misalignment::{
    misalignment_events, simulate_misalignment, trial_draw, MisalignmentCdf, TrialDraw, CDF_STEP_M,
};
pub use sectors::{build_sectors, BeamSectorSet, Sector};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::link::BeamConfig;
use crate::planner::{RadarTiming, SectorGeometry, SweepPlan};
use crate::waveform::FrameKind;

/// Frame timing of the beacon interval. The per-frame durations are
/// calibration constants: with 32 initiator sectors, 32 responder sectors and
/// four A-BFT slots they add up to a 10.72 ms header interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MacConfig {
    pub bi_duration_s: f64,
    pub beacon_frame_s: f64,
    pub ssw_frame_s: f64,
    pub feedback_s: f64,
    pub ack_s: f64,
    pub mbifs_s: f64,
    pub ati_s: f64,
    pub initiator_sectors: u32,
    pub responder_sectors: u32,
    pub abft_slots: u32,
}

impl Default for MacConfig {
    fn default() -> Self {
        Self {
            bi_duration_s: 30e-3,
            beacon_frame_s: 266.718_75e-6,
            ssw_frame_s: 16e-6,
            feedback_s: 16e-6,
            ack_s: 16e-6,
            mbifs_s: 9e-6,
            ati_s: 0.0,
            initiator_sectors: 32,
            responder_sectors: 32,
            abft_slots: 4,
        }
    }
}

impl MacConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("bi_duration_s", self.bi_duration_s),
            ("beacon_frame_s", self.beacon_frame_s),
            ("ssw_frame_s", self.ssw_frame_s),
            ("feedback_s", self.feedback_s),
            ("ack_s", self.ack_s),
            ("mbifs_s", self.mbifs_s),
        ] {
            ensure!(
                value > 0.0 && value.is_finite(),
                "{name} must be positive, got {value}"
            );
        }
        ensure!(
            self.ati_s >= 0.0,
            "ati_s must be non-negative, got {}",
            self.ati_s
        );
        Ok(())
    }

    fn abft_slot_s(&self, responder_sectors: u32) -> f64 {
        responder_sectors as f64 * self.ssw_frame_s + self.feedback_s + self.ack_s
    }
}

/// BTI beacons on every initiator sector, MBIFS, then the A-BFT slots.
pub fn legacy_bhi_duration(cfg: &MacConfig) -> f64 {
    cfg.initiator_sectors as f64 * cfg.beacon_frame_s
        + cfg.mbifs_s
        + cfg.abft_slots as f64 * cfg.abft_slot_s(cfg.responder_sectors)
}

/// Radar sweep (its beacons double as synchronisation), then one assignment
/// beacon and one single-sector A-BFT exchange per detected vehicle, plus the
/// ATI allowance.
pub fn radar_bhi_duration(cfg: &MacConfig, plan: &SweepPlan, detected: usize) -> f64 {
    let per_vehicle = if detected == 0 {
        0.0
    } else {
        detected as f64 * (cfg.beacon_frame_s + cfg.abft_slot_s(1)) + cfg.mbifs_s
    };
    plan.t_radar + per_vehicle + cfg.ati_s
}

/// Share of time (percent) a header of `bhi_s` takes when repeated every
/// `repeat_s`.
pub fn overhead_fraction(bhi_s: f64, repeat_s: f64) -> f64 {
    100.0 * bhi_s / repeat_s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vehicle {
    /// Road coordinate, positive on the side where traffic enters.
    pub y_m: f64,
    pub speed_mps: f64,
    pub w_car_m: f64,
}

/// A road segment served by one base station, the radar plan guarding its
/// entry, and the traffic driving through it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scenario {
    pub plan: SweepPlan,
    pub beam: BeamConfig,
    pub vehicles: Vec<Vehicle>,
    pub seed: u64,
}

impl Scenario {
    pub fn new(
        plan: SweepPlan,
        beam: BeamConfig,
        vehicles: Vec<Vehicle>,
        seed: u64,
    ) -> Result<Self> {
        let half = plan.geometry.half_coverage_m();
        for (i, v) in vehicles.iter().enumerate() {
            ensure!(
                v.speed_mps > 0.0 && v.speed_mps <= plan.v_max,
                "vehicle {i} speed {} must lie in (0, v_max = {}]",
                v.speed_mps,
                plan.v_max
            );
            ensure!(
                v.y_m.abs() <= half,
                "vehicle {i} at y = {} m is outside the covered road",
                v.y_m
            );
        }
        Ok(Self {
            plan,
            beam,
            vehicles,
            seed,
        })
    }

    /// 100 m from a straight road, 120° coverage, 3° beams, a 5° radar
    /// sector at the entry edge swept at minimum CPHY PRI with Doppler
    /// resolution `dv`, and five highway-speed vehicles inside the radar
    /// sector.
    pub fn reference(dv: f64, overlap_ratio: f64) -> Result<Self> {
        const D: f64 = 100.0;
        const PHI_BS: f64 = 120.0;
        let timing = RadarTiming::for_resolution(FrameKind::Cphy, dv)?;
        let geometry = SectorGeometry::new(D, PHI_BS, 0.0, 5.0)?;
        let plan = SweepPlan::new(timing, geometry, 30.0)?;
        let beam = BeamConfig::for_road(3.0, D, overlap_ratio)?;
        let half = geometry.half_coverage_m();
        let vehicles = [30.0, 28.0, 26.0, 29.0, 27.0]
            .iter()
            .enumerate()
            .map(|(i, &speed)| Vehicle {
                y_m: half - 1.0 - 7.0 * i as f64,
                speed_mps: speed,
                w_car_m: 5.0,
            })
            .collect();
        Self::new(plan, beam, vehicles, 2024)
    }

    /// Road interval `[lo, hi]` covered by the radar sector.
    pub fn radar_span(&self) -> (f64, f64) {
        let g = &self.plan.geometry;
        let top = g.phi_bs_deg / 2.0 - g.theta_start_deg;
        let y = |deg: f64| g.d_m * deg.to_radians().tan();
        (y(top - g.phi_sradar_deg), y(top))
    }

    /// Vehicles currently inside the radar sector.
    pub fn detected_vehicles(&self) -> usize {
        let (lo, hi) = self.radar_span();
        self.vehicles
            .iter()
            .filter(|v| (lo..=hi).contains(&v.y_m))
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub misalignment_cdf: MisalignmentCdf,
    pub bhi_time_legacy_s: f64,
    pub bhi_time_radar_s: Option<f64>,
    pub overhead_legacy_pct: f64,
    pub overhead_radar_pct: Option<f64>,
    pub reduction_pct: Option<f64>,
}

/// Legacy 802.11ad accounting only: a full sector sweep every beacon
/// interval.
pub fn run_legacy(cfg: &MacConfig) -> Result<SimResult> {
    cfg.validate()?;
    let bhi = legacy_bhi_duration(cfg);
    Ok(SimResult {
        misalignment_cdf: MisalignmentCdf::empty(),
        bhi_time_legacy_s: bhi,
        bhi_time_radar_s: None,
        overhead_legacy_pct: overhead_fraction(bhi, cfg.bi_duration_s),
        overhead_radar_pct: None,
        reduction_pct: None,
    })
}

/// Legacy against radar-assisted overhead, plus the misalignment CDF of the
/// radar-assisted scheme.
pub fn run_comparison(scenario: &Scenario, cfg: &MacConfig, trials: usize) -> Result<SimResult> {
    let legacy = run_legacy(cfg)?;
    let radar_bhi = radar_bhi_duration(cfg, &scenario.plan, scenario.detected_vehicles());
    let radar_pct = overhead_fraction(radar_bhi, scenario.plan.sweep_interval);
    Ok(SimResult {
        misalignment_cdf: simulate_misalignment(scenario, trials, scenario.seed)?,
        bhi_time_radar_s: Some(radar_bhi),
        overhead_radar_pct: Some(radar_pct),
        reduction_pct: Some(100.0 * (1.0 - radar_pct / legacy.overhead_legacy_pct)),
        ..legacy
    })
}
