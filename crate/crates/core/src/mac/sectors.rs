//! Communication beam sectors tiled across the coverage arc.
//!
//! Angles are measured from broadside, positive toward the edge where
//! vehicles enter. Sector 0 starts at that edge and the tiling advances
//! toward the opposite edge.

use serde::Serialize;

use crate::error::{ensure, Result};

const TILING_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sector {
    /// Lower edge after clamping to the coverage arc (degrees).
    pub lo_deg: f64,
    pub hi_deg: f64,
    /// Nominal beam centre, before any clamping.
    pub centre_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BeamSectorSet {
    sectors: Vec<Sector>,
    phi_bs_deg: f64,
    theta_az_deg: f64,
    overlap_ratio: f64,
}

impl BeamSectorSet {
    pub fn sectors(&self) -> &[Sector] {
        &self.sectors
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn stride_deg(&self) -> f64 {
        self.theta_az_deg * (1.0 - self.overlap_ratio)
    }

    pub fn theta_az_deg(&self) -> f64 {
        self.theta_az_deg
    }

    pub fn overlap_ratio(&self) -> f64 {
        self.overlap_ratio
    }

    /// Sector whose nominal centre is closest to `angle_deg`.
    pub fn closest(&self, angle_deg: f64) -> usize {
        let first = self.sectors[0].centre_deg;
        let k = ((first - angle_deg) / self.stride_deg()).round();
        k.clamp(0.0, (self.len() - 1) as f64) as usize
    }

    /// Angle at which the closest-centre choice switches from sector `k` to
    /// `k + 1`.
    pub fn handover_angle(&self, k: usize) -> f64 {
        self.sectors[k].centre_deg - self.stride_deg() / 2.0
    }

    /// Every sector containing `angle_deg`.
    pub fn containing(&self, angle_deg: f64) -> impl Iterator<Item = usize> + '_ {
        self.sectors
            .iter()
            .enumerate()
            .filter(move |(_, s)| s.lo_deg <= angle_deg && angle_deg <= s.hi_deg)
            .map(|(i, _)| i)
    }
}

/// Tile `[-φ_BS/2, φ_BS/2]` with beams of width `θ_az` sharing
/// `overlap_ratio·θ_az` with each neighbour. The last beam is truncated at
/// the far edge.
pub fn build_sectors(
    phi_bs_deg: f64,
    theta_az_deg: f64,
    overlap_ratio: f64,
) -> Result<BeamSectorSet> {
    ensure!(
        phi_bs_deg > 0.0 && phi_bs_deg < 180.0,
        "coverage angle must lie in (0, 180), got {phi_bs_deg}"
    );
    ensure!(
        theta_az_deg > 0.0 && theta_az_deg <= phi_bs_deg,
        "beamwidth must lie in (0, {phi_bs_deg}], got {theta_az_deg}"
    );
    ensure!(
        (0.0..1.0).contains(&overlap_ratio),
        "overlap ratio must lie in [0, 1), got {overlap_ratio}"
    );
    let stride = theta_az_deg * (1.0 - overlap_ratio);
    let count = ((phi_bs_deg - theta_az_deg) / stride - TILING_SLACK)
        .ceil()
        .max(0.0) as usize
        + 1;
    let top = phi_bs_deg / 2.0;
    let sectors = (0..count)
        .map(|j| {
            let hi = top - j as f64 * stride;
            Sector {
                lo_deg: (hi - theta_az_deg).max(-top),
                hi_deg: hi,
                centre_deg: hi - theta_az_deg / 2.0,
            }
        })
        .collect();
    Ok(BeamSectorSet {
        sectors,
        phi_bs_deg,
        theta_az_deg,
        overlap_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sector_counts() {
        assert_eq!(build_sectors(120.0, 3.0, 0.0).unwrap().len(), 40);
        let half = build_sectors(120.0, 3.0, 0.5).unwrap();
        assert_eq!(half.len(), 79);
        assert_eq!(half.stride_deg(), 1.5);
        assert_eq!(build_sectors(120.0, 3.0, 0.7).unwrap().len(), 131);
    }

    #[test]
    fn last_sector_clamped() {
        let s = build_sectors(120.0, 3.0, 0.7).unwrap();
        let last = s.sectors().last().unwrap();
        assert_eq!(last.lo_deg, -60.0);
        assert!(last.hi_deg - last.lo_deg <= 3.0);
        assert_eq!(s.sectors()[0].hi_deg, 60.0);
    }

    #[test]
    fn closest_centre_selection() {
        let s = build_sectors(120.0, 3.0, 0.0).unwrap();
        assert_eq!(s.closest(60.0), 0);
        assert_eq!(s.closest(58.6), 0);
        assert_eq!(s.closest(56.9), 1);
        assert_eq!(s.closest(-60.0), 39);
        assert_eq!(s.closest(-80.0), 39);
        assert_eq!(s.closest(80.0), 0);
        assert!((s.handover_angle(0) - 57.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(build_sectors(120.0, 3.0, 1.0).is_err());
        assert!(build_sectors(120.0, 0.0, 0.0).is_err());
        assert!(build_sectors(0.0, 3.0, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn covers_arc_with_exact_overlap(
            phi in 20.0f64..170.0,
            theta in 0.5f64..20.0,
            overlap in 0.0f64..0.9,
            probe in 0.0f64..1.0,
        ) {
            prop_assume!(theta <= phi);
            let s = build_sectors(phi, theta, overlap).unwrap();
            let angle = -phi / 2.0 + probe * phi;
            prop_assert!(s.containing(angle).next().is_some());
            for w in s.sectors().windows(2) {
                prop_assert!((w[1].hi_deg - w[0].lo_deg - overlap * theta).abs() < 1e-9);
            }
            // The closest-centre sector always contains the angle.
            let k = s.closest(angle);
            let sec = s.sectors()[k];
            prop_assert!(sec.lo_deg - 1e-9 <= angle && angle <= sec.hi_deg + 1e-9);
        }
    }
}
