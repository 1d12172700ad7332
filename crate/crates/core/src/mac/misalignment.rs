//! Monte Carlo estimate of beam misalignment after a radar fix.
//!
//! Each trial follows one vehicle from the moment the radar sweep catches it
//! in the radar sector. The base station predicts the vehicle position from
//! the (quantised) radar estimate and keeps the sector whose centre is
//! closest to the prediction active. The trial ends at the first instant the
//! true vehicle sits outside the active sector, or when it leaves coverage.
//!
//! Within one dwell interval the true bearing is monotone, so only the
//! interval end points have to be checked; no time stepping is involved.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sectors::{build_sectors, BeamSectorSet};
use super::Scenario;
use crate::error::{ensure, Result};

/// Spacing of the road-position grid the CDF is reported on.
pub const CDF_STEP_M: f64 = 1.0;

// Absorbs rounding when a zero-error prediction hands over exactly at a
// shared sector edge.
const EDGE_TOLERANCE_M: f64 = 1e-9;

/// Cumulative misalignment probability against distance travelled from the
/// coverage entry edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MisalignmentCdf {
    pub position_m: Vec<f64>,
    pub probability: Vec<f64>,
    pub trials: usize,
}

impl MisalignmentCdf {
    pub fn empty() -> Self {
        Self {
            position_m: Vec::new(),
            probability: Vec::new(),
            trials: 0,
        }
    }

    /// Probability at the far edge of coverage.
    pub fn at_end(&self) -> f64 {
        self.probability.last().copied().unwrap_or(0.0)
    }

    pub fn is_monotone(&self) -> bool {
        self.probability.windows(2).all(|w| w[1] >= w[0])
    }

    fn from_events(mut events: Vec<f64>, trials: usize, length_m: f64) -> Self {
        events.sort_by(f64::total_cmp);
        let steps = (length_m / CDF_STEP_M).floor() as usize;
        let mut position_m: Vec<f64> = (0..=steps).map(|j| j as f64 * CDF_STEP_M).collect();
        if length_m - position_m[steps] > 1e-9 {
            position_m.push(length_m);
        }
        let mut seen = 0;
        let probability = position_m
            .iter()
            .map(|&x| {
                while seen < events.len() && events[seen] <= x + EDGE_TOLERANCE_M {
                    seen += 1;
                }
                seen as f64 / trials as f64
            })
            .collect();
        Self {
            position_m,
            probability,
            trials,
        }
    }
}

/// One trial's draw, exposed so that tests can replay a trial exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialDraw {
    pub speed: f64,
    /// Fraction of one sweep interval between radar-sector entry and the fix.
    pub fix_phase: f64,
    pub position_error_m: f64,
    pub velocity_error_mps: f64,
}

/// Road-position bookkeeping shared by all trials of a scenario.
struct Track<'a> {
    sectors: &'a BeamSectorSet,
    d: f64,
    half_length: f64,
    /// Road coordinate where the radar sector begins (entry side).
    radar_entry_y: f64,
    sweep_interval: f64,
}

impl Track<'_> {
    fn y_of(&self, angle_deg: f64) -> f64 {
        self.d * angle_deg.to_radians().tan()
    }

    /// Travel position (from the entry edge) of the first misalignment, if
    /// any.
    fn run(&self, draw: &TrialDraw) -> Option<f64> {
        let v = draw.speed;
        let y_fix = self.radar_entry_y - draw.fix_phase * v * self.sweep_interval;
        let y_hat0 = y_fix + draw.position_error_m;
        let v_hat = v + draw.velocity_error_mps;
        let t_end = (y_fix + self.half_length) / v;
        let true_y = |t: f64| y_fix - v * t;

        let n = self.sectors.len();
        let mut k = self.sectors.closest(y_hat0.atan2(self.d).to_degrees());
        let mut t = 0.0;
        loop {
            let sector = self.sectors.sectors()[k];
            let (lo, hi) = (self.y_of(sector.lo_deg), self.y_of(sector.hi_deg));
            let t_switch = if k + 1 < n && v_hat > 0.0 {
                ((y_hat0 - self.y_of(self.sectors.handover_angle(k))) / v_hat).max(t)
            } else {
                f64::INFINITY
            };
            let t_next = t_switch.min(t_end);

            let y_start = true_y(t);
            if y_start > hi + EDGE_TOLERANCE_M {
                return Some(self.half_length - y_start);
            }
            if true_y(t_next) < lo - EDGE_TOLERANCE_M {
                return Some(self.half_length - lo);
            }
            if t_next >= t_end {
                return None;
            }
            t = t_next;
            k += 1;
        }
    }
}

/// Draw the per-trial randomness. Trial `i` uses its own ChaCha stream so
/// results do not depend on scheduling.
pub fn trial_draw(scenario: &Scenario, seed: u64, trial: u64) -> TrialDraw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let vehicle = &scenario.vehicles[(trial % scenario.vehicles.len() as u64) as usize];
    let dv = scenario.plan.timing.doppler_resolution();
    let dr = scenario.plan.timing.range_resolution();
    let u_fix: f64 = rng.random();
    let u_pos: f64 = rng.random();
    let u_vel: f64 = rng.random();
    TrialDraw {
        speed: vehicle.speed_mps,
        fix_phase: u_fix,
        position_error_m: (u_pos - 0.5) * dr,
        velocity_error_mps: (u_vel - 0.5) * dv,
    }
}

/// First misalignment position for each of `n_trials` trials, in trial
/// order. `None` means the vehicle stayed aligned until it left coverage.
pub fn misalignment_events(
    scenario: &Scenario,
    n_trials: usize,
    seed: u64,
) -> Result<Vec<Option<f64>>> {
    ensure!(n_trials >= 1, "at least one trial is required");
    ensure!(!scenario.vehicles.is_empty(), "scenario has no vehicles");
    let geometry = &scenario.plan.geometry;
    let sectors = build_sectors(
        geometry.phi_bs_deg,
        scenario.beam.theta_az_deg,
        scenario.beam.overlap_ratio,
    )?;
    let track = Track {
        sectors: &sectors,
        d: geometry.d_m,
        half_length: geometry.half_coverage_m(),
        radar_entry_y: geometry.d_m
            * (geometry.phi_bs_deg / 2.0 - geometry.theta_start_deg)
                .to_radians()
                .tan(),
        sweep_interval: scenario.plan.sweep_interval,
    };
    Ok((0..n_trials as u64)
        .into_par_iter()
        .map(|i| track.run(&trial_draw(scenario, seed, i)))
        .collect())
}

pub fn simulate_misalignment(
    scenario: &Scenario,
    n_trials: usize,
    seed: u64,
) -> Result<MisalignmentCdf> {
    let events = misalignment_events(scenario, n_trials, seed)?;
    let length = 2.0 * scenario.plan.geometry.half_coverage_m();
    Ok(MisalignmentCdf::from_events(
        events.into_iter().flatten().collect(),
        n_trials,
        length,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mac::Scenario;

    #[test]
    fn cdf_from_events() {
        let cdf = MisalignmentCdf::from_events(vec![2.5, 0.0, 2.0], 4, 3.5);
        assert_eq!(cdf.position_m, vec![0.0, 1.0, 2.0, 3.0, 3.5]);
        assert_eq!(cdf.probability, vec![0.25, 0.25, 0.5, 0.75, 0.75]);
        assert_eq!(cdf.at_end(), 0.75);
        assert!(cdf.is_monotone());
    }

    #[test]
    fn perfect_estimates_never_misalign() {
        let s = Scenario::reference(0.45, 0.0).unwrap();
        let sectors = build_sectors(120.0, 3.0, 0.0).unwrap();
        let g = s.plan.geometry;
        let track = Track {
            sectors: &sectors,
            d: g.d_m,
            half_length: g.half_coverage_m(),
            radar_entry_y: g.half_coverage_m(),
            sweep_interval: s.plan.sweep_interval,
        };
        for i in 0..200 {
            let draw = TrialDraw {
                speed: 20.0 + i as f64 * 0.05,
                fix_phase: i as f64 / 200.0,
                position_error_m: 0.0,
                velocity_error_mps: 0.0,
            };
            assert_eq!(track.run(&draw), None, "trial {i}");
        }
    }

    #[test]
    fn late_handover_misaligns_at_sector_edge() {
        let s = Scenario::reference(0.45, 0.0).unwrap();
        let sectors = build_sectors(120.0, 3.0, 0.0).unwrap();
        let g = s.plan.geometry;
        let track = Track {
            sectors: &sectors,
            d: g.d_m,
            half_length: g.half_coverage_m(),
            radar_entry_y: g.half_coverage_m(),
            sweep_interval: s.plan.sweep_interval,
        };
        // Prediction lags behind the vehicle: it leaves sector 0 through its
        // lower edge before the base station hands over.
        let draw = TrialDraw {
            speed: 30.0,
            fix_phase: 0.0,
            position_error_m: 0.0,
            velocity_error_mps: -1.0,
        };
        let x = track.run(&draw).unwrap();
        let edge = g.half_coverage_m() - 100.0 * 57f64.to_radians().tan();
        assert!((x - edge).abs() < 1e-9, "{x} vs {edge}");
    }

    #[test]
    fn zero_resolution_means_zero_misalignment() {
        let s = Scenario::reference(0.45, 0.0).unwrap();
        let events = misalignment_events(&s, 300, 1).unwrap();
        let sectors = build_sectors(120.0, 3.0, 0.0).unwrap();
        let g = s.plan.geometry;
        let track = Track {
            sectors: &sectors,
            d: g.d_m,
            half_length: g.half_coverage_m(),
            radar_entry_y: g.half_coverage_m(),
            sweep_interval: s.plan.sweep_interval,
        };
        for i in 0..300 {
            let mut draw = trial_draw(&s, 1, i);
            draw.position_error_m = 0.0;
            draw.velocity_error_mps = 0.0;
            assert_eq!(track.run(&draw), None);
        }
        // With real errors and no overlap, some trials do misalign.
        assert!(events.iter().any(Option::is_some));
    }

    #[test]
    fn deterministic_and_order_independent() {
        let s = Scenario::reference(1.5, 0.5).unwrap();
        let a = misalignment_events(&s, 500, 77).unwrap();
        let b = misalignment_events(&s, 500, 77).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let c = pool.install(|| misalignment_events(&s, 500, 77).unwrap());
        assert_eq!(a, c);
        assert_ne!(a, misalignment_events(&s, 500, 78).unwrap());
    }

    #[test]
    fn rejects_empty_inputs() {
        let mut s = Scenario::reference(0.45, 0.7).unwrap();
        assert!(simulate_misalignment(&s, 0, 1).is_err());
        s.vehicles.clear();
        assert!(simulate_misalignment(&s, 10, 1).is_err());
    }
}
