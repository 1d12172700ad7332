//! Link budget between the roadside base station and a passing vehicle, MCS
//! selection against per-MCS SNR thresholds, and the average rate over one
//! pass through the coverage area.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::consts::{linear_to_db, CARRIER_HZ};
use crate::error::{ensure, Result};

/// Road width used to size the elevation beamwidth.
pub const DEFAULT_ROAD_WIDTH_M: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkParams {
    /// Transmit power (dBm).
    pub p_tx_dbm: f64,
    pub path_loss_exponent: f64,
    /// Distance-independent channel attenuation (dB).
    pub c_att_db: f64,
    /// Atmospheric attenuation (dB/km).
    pub a_att_db_per_km: f64,
    /// Rain attenuation (dB/km).
    pub r_att_db_per_km: f64,
    /// Thermal noise floor (dBm/Hz).
    pub noise_floor_dbm_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_figure_db: f64,
    /// Log-normal shadowing standard deviation (dB).
    pub shadowing_sigma_db: f64,
    pub carrier_hz: f64,
}

impl Default for LinkParams {
    fn default() -> Self {
        Self {
            p_tx_dbm: 10.0,
            path_loss_exponent: 2.66,
            c_att_db: 70.0,
            a_att_db_per_km: 15.0,
            r_att_db_per_km: 25.0,
            noise_floor_dbm_hz: -174.0,
            bandwidth_hz: 2.16e9,
            noise_figure_db: 6.0,
            shadowing_sigma_db: 5.8,
            carrier_hz: CARRIER_HZ,
        }
    }
}

impl LinkParams {
    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.c_att_db >= 0.0 && self.a_att_db_per_km >= 0.0 && self.r_att_db_per_km >= 0.0,
            "attenuation terms must be non-negative"
        );
        ensure!(
            self.bandwidth_hz > 0.0,
            "bandwidth must be positive, got {}",
            self.bandwidth_hz
        );
        ensure!(
            self.shadowing_sigma_db >= 0.0,
            "shadowing sigma must be non-negative"
        );
        ensure!(
            self.path_loss_exponent > 0.0,
            "path-loss exponent must be positive"
        );
        Ok(())
    }
}

/// Communication beam shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamConfig {
    pub theta_az_deg: f64,
    pub theta_el_deg: f64,
    pub overlap_ratio: f64,
}

impl BeamConfig {
    pub fn new(theta_az_deg: f64, theta_el_deg: f64, overlap_ratio: f64) -> Result<Self> {
        ensure!(
            theta_az_deg > 0.0 && theta_az_deg < 180.0,
            "azimuth beamwidth must lie in (0, 180), got {theta_az_deg}"
        );
        ensure!(
            theta_el_deg > 0.0 && theta_el_deg < 180.0,
            "elevation beamwidth must lie in (0, 180), got {theta_el_deg}"
        );
        ensure!(
            (0.0..1.0).contains(&overlap_ratio),
            "overlap ratio must lie in [0, 1), got {overlap_ratio}"
        );
        Ok(Self {
            theta_az_deg,
            theta_el_deg,
            overlap_ratio,
        })
    }

    /// Beam whose elevation width just spans the road at distance `d_m`.
    pub fn for_road(theta_az_deg: f64, d_m: f64, overlap_ratio: f64) -> Result<Self> {
        ensure!(d_m > 0.0, "BS-road distance must be positive, got {d_m}");
        Self::new(
            theta_az_deg,
            theta_el_for_road(d_m, DEFAULT_ROAD_WIDTH_M),
            overlap_ratio,
        )
    }

    pub fn gain(&self) -> f64 {
        antenna_gain(self.theta_el_deg, self.theta_az_deg)
    }
}

/// Elevation beamwidth (degrees) subtending a road of width `road_width_m`
/// seen from distance `d_m`.
pub fn theta_el_for_road(d_m: f64, road_width_m: f64) -> f64 {
    (2.0 * (road_width_m / (2.0 * d_m)).atan()).to_degrees()
}

/// `PL = 10 n log10(d) + SF + C_att + (A_att + R_att)·d/1000` in dB.
pub fn path_loss(d_v: f64, params: &LinkParams, sf_db: f64) -> Result<f64> {
    ensure!(
        d_v > 0.0 && d_v.is_finite(),
        "link distance must be positive, got {d_v}"
    );
    Ok(10.0 * params.path_loss_exponent * d_v.log10()
        + sf_db
        + params.c_att_db
        + (params.a_att_db_per_km + params.r_att_db_per_km) * d_v / 1000.0)
}

/// Ideal sector-antenna gain (linear) with beamwidths in degrees.
pub fn antenna_gain(theta_el_deg: f64, theta_az_deg: f64) -> f64 {
    4.0 * 180.0 * 180.0 / (theta_el_deg * theta_az_deg * std::f64::consts::PI)
}

/// Receiver noise power (dBm).
pub fn noise_power(params: &LinkParams) -> f64 {
    params.noise_floor_dbm_hz + 10.0 * params.bandwidth_hz.log10() + params.noise_figure_db
}

/// SNR (dB) with identical transmit and receive beams.
pub fn snr(beam: &BeamConfig, d_v: f64, params: &LinkParams, sf_db: f64) -> Result<f64> {
    let g_db = linear_to_db(beam.gain());
    Ok(params.p_tx_dbm + 2.0 * g_db - path_loss(d_v, params, sf_db)? - noise_power(params))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Phy {
    Cphy,
    Sc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McsEntry {
    pub index: u8,
    pub phy: Phy,
    pub rate_bps: f64,
    pub min_snr_db: f64,
    pub psdu_octets: u32,
    /// PER the threshold stands for.
    pub gamma: f64,
}

impl McsEntry {
    fn standard(index: u8, phy: Phy, rate_mbps: f64, min_snr_db: f64) -> Self {
        let (psdu_octets, gamma) = if index == 0 {
            (256, 0.05)
        } else {
            (4096, 0.01)
        };
        Self {
            index,
            phy,
            rate_bps: rate_mbps * 1e6,
            min_snr_db,
            psdu_octets,
            gamma,
        }
    }
}

/// MCS ladder searched by [`select_mcs`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McsTable {
    entries: Vec<McsEntry>,
}

impl McsTable {
    pub fn new(entries: Vec<McsEntry>) -> Result<Self> {
        ensure!(!entries.is_empty(), "MCS table is empty");
        for e in &entries {
            ensure!(
                e.rate_bps > 0.0 && e.min_snr_db.is_finite(),
                "MCS {} has a non-positive rate or non-finite threshold",
                e.index
            );
        }
        for phy in [Phy::Cphy, Phy::Sc] {
            let mut rows: Vec<&McsEntry> = entries.iter().filter(|e| e.phy == phy).collect();
            rows.sort_by(|a, b| a.min_snr_db.total_cmp(&b.min_snr_db));
            for w in rows.windows(2) {
                ensure!(
                    w[1].min_snr_db > w[0].min_snr_db && w[1].rate_bps > w[0].rate_bps,
                    "MCS {} and {} break the rate/threshold ordering",
                    w[0].index,
                    w[1].index
                );
            }
        }
        Ok(Self { entries })
    }

    /// Control PHY MCS 0 plus single-carrier MCS 1–12 with sensitivity-style
    /// thresholds (dB of SNR).
    pub fn dmg_default() -> Self {
        const SC: [(f64, f64); 12] = [
            (385.0, 2.7),
            (770.0, 4.7),
            (962.5, 5.7),
            (1155.0, 6.7),
            (1251.25, 7.7),
            (1540.0, 8.7),
            (1925.0, 9.7),
            (2310.0, 10.7),
            (2502.5, 12.7),
            (3080.0, 16.7),
            (3850.0, 17.7),
            (4620.0, 18.7),
        ];
        let mut entries = vec![McsEntry::standard(0, Phy::Cphy, 27.5, -7.3)];
        entries.extend(
            SC.iter()
                .enumerate()
                .map(|(i, &(rate, snr))| McsEntry::standard(i as u8 + 1, Phy::Sc, rate, snr)),
        );
        Self::new(entries).expect("default MCS table is ordered")
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }
}

impl Default for McsTable {
    fn default() -> Self {
        Self::dmg_default()
    }
}

/// Fastest MCS whose threshold is at or below `snr_db`; `None` is outage.
pub fn select_mcs(snr_db: f64, table: &McsTable) -> Option<&McsEntry> {
    table
        .entries
        .iter()
        .filter(|e| e.min_snr_db <= snr_db)
        .max_by(|a, b| a.rate_bps.total_cmp(&b.rate_bps))
}

/// `t_c = 2 d tan(φ_BS/2) / v`.
pub fn contact_time(d_m: f64, phi_bs_deg: f64, v: f64) -> f64 {
    2.0 * d_m * (phi_bs_deg / 2.0).to_radians().tan() / v
}

/// Straight road at distance `d_m` from the base station, covered over
/// `phi_bs_deg`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadGeometry {
    pub d_m: f64,
    pub phi_bs_deg: f64,
}

impl RoadGeometry {
    pub fn new(d_m: f64, phi_bs_deg: f64) -> Result<Self> {
        ensure!(
            d_m > 0.0 && d_m.is_finite(),
            "BS-road distance must be positive, got {d_m}"
        );
        ensure!(
            phi_bs_deg > 0.0 && phi_bs_deg < 180.0,
            "coverage angle must lie in (0, 180), got {phi_bs_deg}"
        );
        Ok(Self { d_m, phi_bs_deg })
    }

    pub fn half_length(&self) -> f64 {
        self.d_m * (self.phi_bs_deg / 2.0).to_radians().tan()
    }

    /// BS-vehicle distance at lateral offset `y`.
    pub fn distance_at(&self, y: f64) -> f64 {
        self.d_m.hypot(y)
    }
}

/// Outcome of integrating the achievable rate over one pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateSummary {
    pub mean_rate_bps: f64,
    pub contact_time_s: f64,
    /// Fraction of the contact time spent with no eligible MCS.
    pub outage_fraction: f64,
}

/// Shadowing treatment during integration.
pub enum Shadowing<'a, R: Rng> {
    None,
    /// One log-normal draw per time step.
    LogNormal(&'a mut R),
}

/// Time-average of the selected rate over the pass, midpoint rule with step
/// `dt` (the last step is shortened to end exactly at `t_c`).
pub fn average_rate(
    road: &RoadGeometry,
    speed: f64,
    beam: &BeamConfig,
    params: &LinkParams,
    table: &McsTable,
    dt: f64,
) -> Result<RateSummary> {
    average_rate_with::<rand_chacha::ChaCha8Rng>(
        road,
        speed,
        beam,
        params,
        table,
        dt,
        Shadowing::None,
    )
}

pub fn average_rate_with<R: Rng>(
    road: &RoadGeometry,
    speed: f64,
    beam: &BeamConfig,
    params: &LinkParams,
    table: &McsTable,
    dt: f64,
    mut shadowing: Shadowing<'_, R>,
) -> Result<RateSummary> {
    ensure!(
        dt > 0.0 && dt.is_finite(),
        "integration step must be positive, got {dt}"
    );
    ensure!(
        speed > 0.0 && speed.is_finite(),
        "vehicle speed must be positive, got {speed}"
    );
    params.validate()?;
    let sf = Normal::new(0.0, params.shadowing_sigma_db)
        .map_err(|e| crate::Error::invalid(format!("shadowing distribution: {e}")))?;

    let tc = contact_time(road.d_m, road.phi_bs_deg, speed);
    let y0 = road.half_length();
    let steps = (tc / dt).ceil() as usize;
    let mut rate_time = 0.0;
    let mut outage_time = 0.0;
    for i in 0..steps {
        let t0 = i as f64 * dt;
        let h = dt.min(tc - t0);
        let y = y0 - speed * (t0 + h / 2.0);
        let sf_db = match &mut shadowing {
            Shadowing::None => 0.0,
            Shadowing::LogNormal(rng) => sf.sample(*rng),
        };
        let s = snr(beam, road.distance_at(y), params, sf_db)?;
        match select_mcs(s, table) {
            Some(m) => rate_time += m.rate_bps * h,
            None => outage_time += h,
        }
    }
    Ok(RateSummary {
        mean_rate_bps: rate_time / tc,
        contact_time_s: tc,
        outage_fraction: outage_time / tc,
    })
}
