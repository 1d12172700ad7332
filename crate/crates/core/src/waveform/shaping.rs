//! Root-raised-cosine transmit/receive filtering.
//!
//! A transmit RRC cascaded with the matched receive RRC is a raised cosine,
//! which is a Nyquist pulse: sampled at chip instants it is `1` at lag 0 and
//! `0` elsewhere. The radar chain therefore defaults to chip-rate processing
//! and only uses these filters to validate that shortcut.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::preamble::ChipSequence;
use crate::consts::CHIP_RATE_HZ;
use crate::error::{ensure, Result};

pub const DEFAULT_ROLLOFF: f64 = 0.25;
pub const DEFAULT_OVERSAMPLE: usize = 4;
pub const DEFAULT_SPAN: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct ShapingFilter {
    taps: Vec<f64>,
    rolloff: f64,
    oversample: usize,
    span: usize,
}

impl Default for ShapingFilter {
    fn default() -> Self {
        design_rrc(DEFAULT_ROLLOFF, DEFAULT_OVERSAMPLE, DEFAULT_SPAN).expect("valid defaults")
    }
}

/// Continuous-time RRC impulse response at `t` symbol periods.
fn rrc_sample(t: f64, beta: f64) -> f64 {
    if t.abs() < 1e-12 {
        return 1.0 - beta + 4.0 * beta / PI;
    }
    let quarter = 1.0 / (4.0 * beta);
    if (t.abs() - quarter).abs() < 1e-9 {
        let arg = PI / (4.0 * beta);
        return beta / 2f64.sqrt() * ((1.0 + 2.0 / PI) * arg.sin() + (1.0 - 2.0 / PI) * arg.cos());
    }
    let num = (PI * t * (1.0 - beta)).sin() + 4.0 * beta * t * (PI * t * (1.0 + beta)).cos();
    let den = PI * t * (1.0 - (4.0 * beta * t).powi(2));
    num / den
}

/// Design a unit-energy RRC filter spanning `span` symbols at `oversample`
/// samples per chip. `span >= 16` keeps the truncated RC cascade within
/// 1e-3 of an ideal Nyquist pulse for rolloff 0.25.
pub fn design_rrc(rolloff: f64, oversample: usize, span: usize) -> Result<ShapingFilter> {
    ensure!(
        rolloff > 0.0 && rolloff <= 1.0,
        "rolloff must lie in (0, 1], got {rolloff}"
    );
    ensure!(oversample >= 2, "oversample must be >= 2, got {oversample}");
    ensure!(span >= 8, "span must be >= 8 symbols, got {span}");
    let half = (span * oversample / 2) as isize;
    let mut taps: Vec<f64> = (-half..=half)
        .map(|i| rrc_sample(i as f64 / oversample as f64, rolloff))
        .collect();
    let norm = taps.iter().map(|t| t * t).sum::<f64>().sqrt();
    taps.iter_mut().for_each(|t| *t /= norm);
    Ok(ShapingFilter {
        taps,
        rolloff,
        oversample,
        span,
    })
}

impl ShapingFilter {
    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn rolloff(&self) -> f64 {
        self.rolloff
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }

    pub fn span(&self) -> usize {
        self.span
    }

    /// Transmit RRC convolved with the matched receive RRC.
    pub fn rc_response(&self) -> Vec<f64> {
        let l = self.taps.len();
        let mut out = vec![0.0; 2 * l - 1];
        for (i, a) in self.taps.iter().enumerate() {
            for (j, b) in self.taps.iter().rev().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    }

    /// Worst chip-spaced deviation of the RC cascade from an ideal Nyquist
    /// pulse: `max(|h[0] - 1|, max_{n != 0} |h[n]|)`.
    pub fn nyquist_error(&self) -> f64 {
        let rc = self.rc_response();
        let center = self.taps.len() - 1;
        let mut err = (rc[center] - 1.0).abs();
        let mut k = self.oversample;
        while k <= center {
            err = err.max(rc[center + k].abs()).max(rc[center - k].abs());
            k += self.oversample;
        }
        err
    }

    /// Receive path: matched filter then decimation back to `n_chips` chip
    /// samples, compensating the two-filter group delay.
    pub fn receive(&self, shaped: &[Complex64], n_chips: usize) -> Result<ChipSequence> {
        ensure!(!shaped.is_empty(), "nothing to receive");
        let delay = self.taps.len() - 1;
        let reversed: Vec<f64> = self.taps.iter().rev().copied().collect();
        let chips: Vec<Complex64> = (0..n_chips)
            .map(|k| {
                let n = delay + k * self.oversample;
                // y[n] = Σ_j shaped[n - j] * reversed[j]
                reversed
                    .iter()
                    .enumerate()
                    .filter_map(|(j, &h)| {
                        n.checked_sub(j).and_then(|m| shaped.get(m)).map(|&x| x * h)
                    })
                    .sum()
            })
            .collect();
        ChipSequence::new(chips, CHIP_RATE_HZ)
    }
}

/// Upsample `seq` by the filter's oversampling factor (zero stuffing) and
/// convolve with the transmit taps. The output has
/// `(len - 1) * oversample + taps.len()` samples.
pub fn shape(seq: &ChipSequence, filt: &ShapingFilter) -> Result<ChipSequence> {
    ensure!(!seq.is_empty(), "cannot shape an empty sequence");
    let os = filt.oversample;
    let taps = &filt.taps;
    let out_len = (seq.len() - 1) * os + taps.len();
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for (k, &chip) in seq.samples().iter().enumerate() {
        let base = k * os;
        for (j, &h) in taps.iter().enumerate() {
            out[base + j] += chip * h;
        }
    }
    ChipSequence::new(out, seq.sample_rate() * os as f64)
}
