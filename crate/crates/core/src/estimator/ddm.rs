use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use super::ChannelEstimate;
use crate::channel::DopplerConvention;
use crate::consts::RANGE_BIN_M;
use crate::error::{ensure, Result};

/// Magnitude of the slow-time DFT for every delay bin, stored row-major
/// (`delay_bin * doppler_bins + doppler_bin`).
///
/// The DFT is unitary, `X[k] = (1/√M) Σ_p h_p e^{+j2πkp/M}`. The positive
/// exponent matches the echo's `e^{-j2π f_D p T_pr}` phase so that Doppler bin
/// `k` corresponds to `f_D = k / (M T_pr)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayDopplerMap {
    magnitude: Vec<f64>,
    range_bins: usize,
    doppler_bins: usize,
    pri_s: f64,
    convention: DopplerConvention,
}

impl DelayDopplerMap {
    pub fn new(
        magnitude: Vec<f64>,
        range_bins: usize,
        doppler_bins: usize,
        pri_s: f64,
        convention: DopplerConvention,
    ) -> Result<Self> {
        ensure!(
            magnitude.len() == range_bins * doppler_bins,
            "map has {} cells, expected {range_bins}x{doppler_bins}",
            magnitude.len()
        );
        ensure!(
            magnitude.iter().all(|m| *m >= 0.0 && m.is_finite()),
            "map magnitudes must be finite and non-negative"
        );
        ensure!(pri_s > 0.0, "PRI must be positive");
        Ok(Self {
            magnitude,
            range_bins,
            doppler_bins,
            pri_s,
            convention,
        })
    }

    pub fn range_bins(&self) -> usize {
        self.range_bins
    }

    pub fn doppler_bins(&self) -> usize {
        self.doppler_bins
    }

    pub fn convention(&self) -> DopplerConvention {
        self.convention
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitude
    }

    pub fn get(&self, delay_bin: usize, doppler_bin: usize) -> f64 {
        self.magnitude[delay_bin * self.doppler_bins + doppler_bin]
    }

    pub fn row(&self, delay_bin: usize) -> &[f64] {
        let s = delay_bin * self.doppler_bins;
        &self.magnitude[s..s + self.doppler_bins]
    }

    pub fn range_bin_m(&self) -> f64 {
        RANGE_BIN_M
    }

    /// Velocity spacing between adjacent Doppler bins.
    pub fn velocity_bin_mps(&self) -> f64 {
        self.convention
            .velocity_mps(1.0 / (self.doppler_bins as f64 * self.pri_s))
    }

    pub fn range_of_bin(&self, delay_bin: usize) -> f64 {
        delay_bin as f64 * RANGE_BIN_M
    }

    /// Velocity at the centre of `doppler_bin`. The paper convention maps
    /// bins onto `[0, λ/T_pr)`; the two-way convention onto the signed
    /// interval `(-λ/(4T_pr), λ/(4T_pr)]`.
    pub fn velocity_of_bin(&self, doppler_bin: usize) -> f64 {
        let m = self.doppler_bins as i64;
        let k = doppler_bin as i64;
        let signed = match self.convention {
            DopplerConvention::Paper => k,
            DopplerConvention::TwoWay => {
                if 2 * k > m {
                    k - m
                } else {
                    k
                }
            }
        };
        signed as f64 * self.velocity_bin_mps()
    }

    /// Largest cell as `(delay_bin, doppler_bin, magnitude)`.
    pub fn peak(&self) -> (usize, usize, f64) {
        let (i, m) = self
            .magnitude
            .iter()
            .enumerate()
            .fold(
                (0, f64::MIN),
                |acc, (i, &m)| if m > acc.1 { (i, m) } else { acc },
            );
        (i / self.doppler_bins, i % self.doppler_bins, m)
    }
}

/// Form the delay-Doppler map from `P >= 2` channel estimates with an
/// `fft_len >= P` point DFT (zero padded).
pub fn build_ddm(
    estimates: &[ChannelEstimate],
    fft_len: usize,
    pri_s: f64,
    convention: DopplerConvention,
) -> Result<DelayDopplerMap> {
    let pulses = estimates.len();
    ensure!(pulses >= 2, "need at least two pulses, got {pulses}");
    ensure!(
        fft_len >= pulses,
        "DFT length {fft_len} shorter than pulse count {pulses}"
    );
    let bins = estimates[0].h.len();
    ensure!(bins >= 1, "channel estimates are empty");
    ensure!(
        estimates.iter().all(|e| e.h.len() == bins),
        "channel estimates have inconsistent lengths"
    );
    let ifft = FftPlanner::new().plan_fft_inverse(fft_len);
    let scale = 1.0 / (fft_len as f64).sqrt();
    let rows: Vec<Vec<f64>> = (0..bins)
        .into_par_iter()
        .map(|n| {
            let mut buf = vec![Complex64::new(0.0, 0.0); fft_len];
            for (b, e) in buf.iter_mut().zip(estimates) {
                *b = e.h[n];
            }
            ifft.process(&mut buf);
            buf.iter().map(|c| c.norm() * scale).collect()
        })
        .collect();
    DelayDopplerMap::new(rows.concat(), bins, fft_len, pri_s, convention)
}

/// Direct O(P·M) evaluation of one slow-time DFT bin, used to cross-check
/// the FFT path.
pub fn dft_bin(slow_time: &[Complex64], fft_len: usize, k: usize) -> Complex64 {
    let scale = 1.0 / (fft_len as f64).sqrt();
    slow_time
        .iter()
        .enumerate()
        .map(|(p, &h)| h * Complex64::from_polar(1.0, 2.0 * PI * (k * p) as f64 / fft_len as f64))
        .sum::<Complex64>()
        * scale
}
