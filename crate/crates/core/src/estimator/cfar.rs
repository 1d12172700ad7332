//! Two-dimensional cell-averaging CFAR on the delay-Doppler map.
//!
//! The detector works on power `|X|²`. For each cell under test the noise
//! level is the mean power over a `(2W+1)²` window (`W = guard + train`)
//! with the `(2·guard+1)²` centre removed. The Doppler axis is circular; the
//! range axis is clipped at the map edges, so cells near the edges average
//! fewer training cells and get a correspondingly larger scale factor. For
//! `N` exponentially distributed training cells the scale
//! `α = N (pfa^{-1/N} - 1)` gives a false-alarm probability of exactly
//! `pfa`. Detections are additionally required to be local maxima of their
//! 3×3 neighbourhood.

use serde::{Deserialize, Serialize};

use super::DelayDopplerMap;
use crate::consts::linear_to_db;
use crate::error::{ensure, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CfarConfig {
    pub pfa: f64,
    pub guard: usize,
    pub train: usize,
    pub max_targets: usize,
}

impl Default for CfarConfig {
    fn default() -> Self {
        Self {
            pfa: 1e-3,
            guard: 2,
            train: 8,
            max_targets: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Detection {
    pub delay_bin: usize,
    pub doppler_bin: usize,
    pub range_m: f64,
    pub velocity_mps: f64,
    pub magnitude: f64,
    /// Cell power over the local noise estimate.
    pub snr_db: f64,
}

/// Summed-area table over the power map with the Doppler axis padded by
/// `pad` columns on each side (wrapping).
struct Integral {
    cols: usize,
    table: Vec<f64>,
}

impl Integral {
    fn new(ddm: &DelayDopplerMap, pad: usize) -> Self {
        let rows = ddm.range_bins();
        let c = ddm.doppler_bins();
        let cols = c + 2 * pad;
        let mut table = vec![0.0; (rows + 1) * (cols + 1)];
        for r in 0..rows {
            let row = ddm.row(r);
            let mut acc = 0.0;
            for j in 0..cols {
                let src = (j + c * (pad / c + 1) - pad) % c;
                acc += row[src] * row[src];
                table[(r + 1) * (cols + 1) + j + 1] = table[r * (cols + 1) + j + 1] + acc;
            }
        }
        Self { cols, table }
    }

    /// Sum over rows `r0..=r1`, padded columns `c0..=c1`.
    fn sum(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> f64 {
        let w = self.cols + 1;
        self.table[(r1 + 1) * w + c1 + 1]
            - self.table[r0 * w + c1 + 1]
            - self.table[(r1 + 1) * w + c0]
            + self.table[r0 * w + c0]
    }
}

fn scale_factor(n_train: usize, pfa: f64) -> f64 {
    let n = n_train as f64;
    n * (pfa.powf(-1.0 / n) - 1.0)
}

pub fn cfar_detect(ddm: &DelayDopplerMap, cfg: &CfarConfig) -> Result<Vec<Detection>> {
    ensure!(
        cfg.pfa > 0.0 && cfg.pfa < 1.0,
        "pfa must lie in (0, 1), got {}",
        cfg.pfa
    );
    ensure!(cfg.train >= 1, "need at least one training cell per side");
    ensure!(cfg.max_targets >= 1, "max_targets must be >= 1");
    let w = cfg.guard + cfg.train;
    let rows = ddm.range_bins();
    let cols = ddm.doppler_bins();
    ensure!(
        rows > 2 * w && cols > 2 * w,
        "{rows}x{cols} map is too small for a {}-cell CFAR window",
        2 * w + 1
    );

    let integral = Integral::new(ddm, w);
    let g = cfg.guard;
    let power = |r: usize, c: usize| {
        let m = ddm.get(r, c);
        m * m
    };

    let mut detections = Vec::new();
    for r in 0..rows {
        let r0 = r.saturating_sub(w);
        let r1 = (r + w).min(rows - 1);
        let gr0 = r.saturating_sub(g);
        let gr1 = (r + g).min(rows - 1);
        for c in 0..cols {
            let p = power(r, c);
            if p <= 0.0 {
                continue;
            }
            // Padded column of this cell is c + w.
            let outer = integral.sum(r0, r1, c, c + 2 * w);
            let inner = integral.sum(gr0, gr1, c + w - g, c + w + g);
            let n_train = (r1 - r0 + 1) * (2 * w + 1) - (gr1 - gr0 + 1) * (2 * g + 1);
            let noise = (outer - inner).max(0.0) / n_train as f64;
            if p <= scale_factor(n_train, cfg.pfa) * noise {
                continue;
            }
            let is_peak = (r.saturating_sub(1)..=(r + 1).min(rows - 1)).all(|rr| {
                [cols - 1, 0, 1].iter().all(|&dc| {
                    let cc = (c + dc) % cols;
                    (rr == r && cc == c) || power(rr, cc) <= p
                })
            });
            if !is_peak {
                continue;
            }
            detections.push(Detection {
                delay_bin: r,
                doppler_bin: c,
                range_m: ddm.range_of_bin(r),
                velocity_mps: ddm.velocity_of_bin(c),
                magnitude: p.sqrt(),
                snr_db: if noise > 0.0 {
                    linear_to_db(p / noise)
                } else {
                    f64::INFINITY
                },
            });
        }
    }
    detections.sort_by(|a, b| {
        b.magnitude
            .total_cmp(&a.magnitude)
            .then(a.delay_bin.cmp(&b.delay_bin))
            .then(a.doppler_bin.cmp(&b.doppler_bin))
    });
    detections.truncate(cfg.max_targets);
    Ok(detections)
}
