//! Radar design arithmetic: PRI and CPI versus resolution, sector geometry,
//! sweep interval and the fraction of time spent sweeping.
//!
//! Angles are degrees at every public boundary.

use std::fmt;

use serde::Serialize;

use crate::consts::{CHIP_INTERVAL_S, SPEED_OF_LIGHT, WAVELENGTH_M};
use crate::error::{ensure, Result};
use crate::waveform::FrameKind;

/// Default angular scan advanced per CPI (degrees).
pub const DEFAULT_SCAN_RATE_DEG_PER_CPI: f64 = 0.5;

// Floors and ceilings on ratios that are integers in exact arithmetic.
const ROUNDING_SLACK: f64 = 1e-9;

/// Shortest PRI: one full preamble, `(STF + CEF)·T_c`.
pub fn min_pri(kind: FrameKind) -> f64 {
    kind.preamble_len() as f64 * CHIP_INTERVAL_S
}

/// `c·T_c/2` for the given chip interval.
pub fn range_resolution(chip_interval_s: f64) -> f64 {
    SPEED_OF_LIGHT * chip_interval_s / 2.0
}

/// `ν_u = λ / T_pr`.
pub fn max_unambiguous_velocity(pri_s: f64) -> f64 {
    WAVELENGTH_M / pri_s
}

/// `Δν = λ / (2·P·T_pr)`.
pub fn doppler_resolution(pulses: usize, pri_s: f64) -> f64 {
    WAVELENGTH_M / (2.0 * pulses as f64 * pri_s)
}

/// CPI length needed for a Doppler resolution `dv`, `λ / (2Δν)`.
pub fn cpi_for_resolution(dv: f64) -> f64 {
    WAVELENGTH_M / (2.0 * dv)
}

/// Smallest `P` with `λ / (2·P·T_pr) <= target_dv`.
pub fn packets_for_resolution(target_dv: f64, pri_s: f64) -> Result<usize> {
    ensure!(
        target_dv > 0.0 && target_dv.is_finite(),
        "target resolution must be positive, got {target_dv}"
    );
    ensure!(pri_s > 0.0, "PRI must be positive, got {pri_s}");
    let ratio = WAVELENGTH_M / (2.0 * target_dv * pri_s);
    Ok((ratio * (1.0 - ROUNDING_SLACK)).ceil().max(1.0) as usize)
}

fn floor_ratio(num: f64, den: f64) -> f64 {
    (num / den + ROUNDING_SLACK).floor()
}

/// `r = d [tan(φ_BS/2 - θ_start) - tan(φ_BS/2 - θ_start - φ_S)]`.
pub fn sector_length(d_m: f64, phi_bs_deg: f64, theta_start_deg: f64, phi_sradar_deg: f64) -> f64 {
    let half = phi_bs_deg / 2.0;
    d_m * ((half - theta_start_deg).to_radians().tan()
        - (half - theta_start_deg - phi_sradar_deg).to_radians().tan())
}

/// Longest interval between sweeps that still catches every vehicle:
/// `r / v_max`.
pub fn sweep_interval(r_m: f64, v_max: f64) -> f64 {
    r_m / v_max
}

/// `ρ = φ_S·λ·v_max / (Δν·r)` with `φ_S` in degrees. Only meaningful for a
/// scan rate of 0.5°/CPI, where it coincides with `t_radar / T_radar`.
pub fn closed_form_duty_ratio(phi_sradar_deg: f64, dv: f64, r_m: f64, v_max: f64) -> f64 {
    phi_sradar_deg * WAVELENGTH_M * v_max / (dv * r_m)
}

/// Pulse timing of one radar configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadarTiming {
    pub kind: FrameKind,
    pub chip_interval_s: f64,
    pub pri_s: f64,
    pub pulses: usize,
    pub wavelength_m: f64,
    pub scan_rate_deg_per_cpi: f64,
}

impl RadarTiming {
    pub fn new(kind: FrameKind, pri_s: f64, pulses: usize) -> Result<Self> {
        ensure!(pulses >= 1, "pulse count must be >= 1");
        ensure!(
            pri_s.is_finite() && pri_s >= min_pri(kind) * (1.0 - ROUNDING_SLACK),
            "PRI {pri_s} s is below the {kind} minimum {} s",
            min_pri(kind)
        );
        Ok(Self {
            kind,
            chip_interval_s: CHIP_INTERVAL_S,
            pri_s,
            pulses,
            wavelength_m: WAVELENGTH_M,
            scan_rate_deg_per_cpi: DEFAULT_SCAN_RATE_DEG_PER_CPI,
        })
    }

    /// Minimum-PRI timing with enough pulses for Doppler resolution `dv`.
    pub fn for_resolution(kind: FrameKind, dv: f64) -> Result<Self> {
        let pri = min_pri(kind);
        Self::new(kind, pri, packets_for_resolution(dv, pri)?)
    }

    pub fn with_scan_rate(mut self, deg_per_cpi: f64) -> Result<Self> {
        ensure!(
            deg_per_cpi > 0.0 && deg_per_cpi.is_finite(),
            "scan rate must be positive, got {deg_per_cpi}"
        );
        self.scan_rate_deg_per_cpi = deg_per_cpi;
        Ok(self)
    }

    /// `T_int = P·T_pr`.
    pub fn cpi_s(&self) -> f64 {
        self.pulses as f64 * self.pri_s
    }

    pub fn doppler_resolution(&self) -> f64 {
        self.wavelength_m / (2.0 * self.cpi_s())
    }

    pub fn max_unambiguous_velocity(&self) -> f64 {
        self.wavelength_m / self.pri_s
    }

    pub fn range_resolution(&self) -> f64 {
        range_resolution(self.chip_interval_s)
    }

    /// Number of CPIs needed to cover `phi_sradar_deg`.
    pub fn cpis_for_sector(&self, phi_sradar_deg: f64) -> usize {
        floor_ratio(phi_sradar_deg, self.scan_rate_deg_per_cpi) as usize
    }
}

/// `t_radar ≈ T_int ⌊φ_S / θ_radar⌋`.
pub fn scan_time(phi_sradar_deg: f64, timing: &RadarTiming) -> f64 {
    timing.cpi_s() * timing.cpis_for_sector(phi_sradar_deg) as f64
}

/// Placement of the single radar sector inside the base-station coverage.
/// `theta_start_deg` is measured from the coverage edge where vehicles enter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorGeometry {
    pub d_m: f64,
    pub phi_bs_deg: f64,
    pub theta_start_deg: f64,
    pub phi_sradar_deg: f64,
}

impl SectorGeometry {
    pub fn new(
        d_m: f64,
        phi_bs_deg: f64,
        theta_start_deg: f64,
        phi_sradar_deg: f64,
    ) -> Result<Self> {
        ensure!(
            d_m > 0.0 && d_m.is_finite(),
            "BS-road distance must be positive"
        );
        ensure!(
            phi_bs_deg > 0.0 && phi_bs_deg < 180.0,
            "coverage angle must lie in (0, 180) degrees, got {phi_bs_deg}"
        );
        ensure!(theta_start_deg >= 0.0, "sector start angle must be >= 0");
        ensure!(phi_sradar_deg > 0.0, "radar sector width must be positive");
        ensure!(
            theta_start_deg + phi_sradar_deg <= phi_bs_deg + ROUNDING_SLACK,
            "radar sector [{theta_start_deg}, {}] exceeds the {phi_bs_deg} degree coverage",
            theta_start_deg + phi_sradar_deg
        );
        Ok(Self {
            d_m,
            phi_bs_deg,
            theta_start_deg,
            phi_sradar_deg,
        })
    }

    /// Road length covered by the radar sector.
    pub fn length(&self) -> f64 {
        sector_length(
            self.d_m,
            self.phi_bs_deg,
            self.theta_start_deg,
            self.phi_sradar_deg,
        )
    }

    /// Half the coverage length, `d·tan(φ_BS/2)`.
    pub fn half_coverage_m(&self) -> f64 {
        self.d_m * (self.phi_bs_deg / 2.0).to_radians().tan()
    }
}

/// A radar sweep schedule: what one sweep costs and how often it repeats.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepPlan {
    pub timing: RadarTiming,
    pub geometry: SectorGeometry,
    pub v_max: f64,
    /// Duration of one sweep of the sector (s).
    pub t_radar: f64,
    /// Interval between sweeps (s).
    pub sweep_interval: f64,
    pub rho: f64,
}

impl SweepPlan {
    pub fn new(timing: RadarTiming, geometry: SectorGeometry, v_max: f64) -> Result<Self> {
        ensure!(v_max > 0.0 && v_max.is_finite(), "v_max must be positive");
        let t_radar = scan_time(geometry.phi_sradar_deg, &timing);
        let interval = sweep_interval(geometry.length(), v_max);
        Ok(Self {
            timing,
            geometry,
            v_max,
            t_radar,
            sweep_interval: interval,
            rho: t_radar / interval,
        })
    }

    pub fn sector_length(&self) -> f64 {
        self.geometry.length()
    }

    /// Distance a vehicle at `v_max` covers during one sweep.
    pub fn movement_during_sweep(&self) -> f64 {
        self.v_max * self.t_radar
    }

    pub fn validate(&self, constraints: &PlanConstraints) -> Vec<PlanViolation> {
        validate_plan(self, constraints)
    }
}

/// Compose `ρ = t_radar / T_radar` from the plan inputs.
pub fn duty_ratio(timing: &RadarTiming, geometry: &SectorGeometry, v_max: f64) -> Result<f64> {
    Ok(SweepPlan::new(*timing, *geometry, v_max)?.rho)
}

/// Sector-length and movement limits: `r > k1·w_car` and
/// `v_max·t_radar < k2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanConstraints {
    pub w_car: f64,
    pub k1: f64,
    pub k2: f64,
}

impl Default for PlanConstraints {
    fn default() -> Self {
        Self {
            w_car: 5.0,
            k1: 1.0,
            k2: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PlanViolation {
    /// The sector is narrower than one scan step, so no CPI fits.
    DegenerateScan {
        phi_sradar_deg: f64,
        scan_rate_deg_per_cpi: f64,
    },
    SectorTooShort {
        sector_m: f64,
        required_m: f64,
    },
    ExcessiveMovement {
        moved_m: f64,
        limit_m: f64,
    },
}

impl fmt::Display for PlanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanViolation::DegenerateScan {
                phi_sradar_deg,
                scan_rate_deg_per_cpi,
            } => write!(
                f,
                "radar sector {phi_sradar_deg} deg is narrower than one {scan_rate_deg_per_cpi} deg scan step"
            ),
            PlanViolation::SectorTooShort { sector_m, required_m } => write!(
                f,
                "sector length {sector_m:.2} m does not exceed k1*w_car = {required_m:.2} m"
            ),
            PlanViolation::ExcessiveMovement { moved_m, limit_m } => write!(
                f,
                "vehicles move {moved_m:.2} m during one sweep, limit k2 = {limit_m:.2} m"
            ),
        }
    }
}

pub fn validate_plan(plan: &SweepPlan, c: &PlanConstraints) -> Vec<PlanViolation> {
    let mut out = Vec::new();
    if plan.timing.cpis_for_sector(plan.geometry.phi_sradar_deg) == 0 {
        out.push(PlanViolation::DegenerateScan {
            phi_sradar_deg: plan.geometry.phi_sradar_deg,
            scan_rate_deg_per_cpi: plan.timing.scan_rate_deg_per_cpi,
        });
    }
    let r = plan.sector_length();
    let required = c.k1 * c.w_car;
    let long_enough = r > required;
    if !long_enough {
        out.push(PlanViolation::SectorTooShort {
            sector_m: r,
            required_m: required,
        });
    }
    let moved = plan.movement_during_sweep();
    let settled = moved < c.k2;
    if !settled {
        out.push(PlanViolation::ExcessiveMovement {
            moved_m: moved,
            limit_m: c.k2,
        });
    }
    out
}

/// One point of a plotted curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub x: f64,
    pub y: f64,
    pub series: String,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    (0..n).map(move |i| lo + step * i as f64)
}

/// `ν_u` against PRI from the CPHY minimum PRI up to `max_pri_s`.
pub fn unambiguous_velocity_curve(max_pri_s: f64, points: usize) -> Vec<CurvePoint> {
    linspace(min_pri(FrameKind::Cphy), max_pri_s, points)
        .map(|pri| CurvePoint {
            x: pri,
            y: max_unambiguous_velocity(pri),
            series: "nu_u".into(),
        })
        .collect()
}

/// `Δν` against packet count for each PRI in `pris`.
pub fn doppler_resolution_curve(pris: &[f64], max_packets: usize, step: usize) -> Vec<CurvePoint> {
    let step = step.max(1);
    pris.iter()
        .flat_map(|&pri| {
            (1..=max_packets).step_by(step).map(move |p| CurvePoint {
                x: p as f64,
                y: doppler_resolution(p, pri),
                series: format!("pri_{:.3}us", pri * 1e6),
            })
        })
        .collect()
}

/// `ρ` against radar sector width for several start angles, using
/// minimum-PRI CPHY timing sized for `dv`.
pub fn duty_ratio_curve(
    d_m: f64,
    phi_bs_deg: f64,
    v_max: f64,
    dv: f64,
    theta_starts_deg: &[f64],
    phi_values_deg: &[f64],
) -> Result<Vec<CurvePoint>> {
    let timing = RadarTiming::for_resolution(FrameKind::Cphy, dv)?;
    let mut out = Vec::new();
    for &start in theta_starts_deg {
        for &phi in phi_values_deg {
            if start + phi > phi_bs_deg {
                continue;
            }
            let geometry = SectorGeometry::new(d_m, phi_bs_deg, start, phi)?;
            out.push(CurvePoint {
                x: phi,
                y: duty_ratio(&timing, &geometry, v_max)?,
                series: format!("theta_start_{start}"),
            });
        }
    }
    Ok(out)
}
