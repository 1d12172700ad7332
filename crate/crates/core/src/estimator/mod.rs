//! Radar receiver: Golay matched filtering per pulse, slow-time DFT into a
//! delay-Doppler map, and CFAR detection.

mod cfar;
mod ddm;

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

pub use cfar::{cfar_detect, CfarConfig, Detection};
pub use ddm::{build_ddm, dft_bin, DelayDopplerMap};

use crate::channel::{DopplerConvention, PulseTrain};
use crate::error::{ensure, Result};
use crate::waveform::{FrameKind, GolayPair};

/// Radar channel estimate for one pulse; bin `n` is range `n·c·T_c/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub h: Vec<Complex64>,
    pub pulse_index: usize,
}

/// `out[n] = Σ_k x[n + k] · h[k]` for every `n` where `h` fits inside `x`.
pub fn correlate_valid(x: &[Complex64], h: &[f64]) -> Vec<Complex64> {
    if h.is_empty() || x.len() < h.len() {
        return Vec::new();
    }
    (0..=x.len() - h.len())
        .map(|n| x[n..n + h.len()].iter().zip(h).map(|(&a, &b)| a * b).sum())
        .collect()
}

/// Complementary Golay correlator over the CEF of each received pulse.
///
/// With `Gu512 = Gau ∥ Gbu`, the `u` estimate is
/// `ĥ1[n] = (x ⊛ Gau[-n])[n] + (x ⊛ Gbu[-n])[n + 256]`, scaled by `1/512`,
/// which is a single correlation against `Gu512`. The `v` estimate is formed
/// the same way 512 chips later and the two are averaged. Correlations run in
/// the frequency domain over the `range_bins + 511` samples each one needs.
#[derive(Clone)]
pub struct ChannelEstimator {
    pair_len: usize,
    cef_offset: usize,
    range_bins: usize,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    spectrum_u: Vec<Complex64>,
    spectrum_v: Vec<Complex64>,
}

impl std::fmt::Debug for ChannelEstimator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChannelEstimator")
            .field("pair_len", &self.pair_len)
            .field("cef_offset", &self.cef_offset)
            .field("range_bins", &self.range_bins)
            .field("fft_len", &self.fft.len())
            .finish()
    }
}

impl ChannelEstimator {
    /// `cef_offset` is the chip index of the CEF within the transmitted pulse
    /// (the STF length when pulses carry a full preamble).
    pub fn new(
        pair_u: &GolayPair,
        pair_v: &GolayPair,
        cef_offset: usize,
        range_bins: usize,
    ) -> Result<Self> {
        ensure!(
            pair_u.len() == pair_v.len(),
            "u and v pairs must have equal length"
        );
        ensure!(range_bins >= 1, "range bin count must be >= 1");
        let pair_len = pair_u.len();
        let block = 2 * pair_len;
        let n_fft = (range_bins + block - 1).next_power_of_two();
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(n_fft);
        let ifft = planner.plan_fft_inverse(n_fft);
        let spectrum = |seq: Vec<i8>| {
            let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
            for (b, c) in buf.iter_mut().zip(seq) {
                *b = Complex64::new(c as f64, 0.0);
            }
            fft.process(&mut buf);
            buf.iter_mut().for_each(|c| *c = c.conj());
            buf
        };
        let spectrum_u = spectrum(pair_u.concatenated());
        let spectrum_v = spectrum(pair_v.concatenated());
        Ok(Self {
            pair_len,
            cef_offset,
            range_bins,
            fft,
            ifft,
            spectrum_u,
            spectrum_v,
        })
    }

    /// Estimator for pulses carrying the default DMG preamble of `kind`.
    pub fn for_preamble(kind: FrameKind, range_bins: usize) -> Result<Self> {
        let (u, v) = GolayPair::dmg_cef_pairs();
        Self::new(&u, &v, kind.stf_len(), range_bins)
    }

    pub fn range_bins(&self) -> usize {
        self.range_bins
    }

    /// Minimum pulse length needed to fill every range bin.
    pub fn required_pulse_len(&self) -> usize {
        self.cef_offset + 4 * self.pair_len + self.range_bins - 1
    }

    /// Variance of an estimate bin per unit input noise variance, `1/(4N)`.
    pub fn noise_variance_gain(&self) -> f64 {
        1.0 / (4 * self.pair_len) as f64
    }

    fn correlate_block(&self, segment: &[Complex64], spectrum: &[Complex64]) -> Vec<Complex64> {
        let n_fft = self.fft.len();
        let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
        buf[..segment.len()].copy_from_slice(segment);
        self.fft.process(&mut buf);
        buf.iter_mut().zip(spectrum).for_each(|(b, s)| *b *= s);
        self.ifft.process(&mut buf);
        let scale = 1.0 / (n_fft as f64 * (2 * self.pair_len) as f64);
        buf[..self.range_bins].iter().map(|c| c * scale).collect()
    }

    pub fn estimate(&self, pulse: &[Complex64], pulse_index: usize) -> Result<ChannelEstimate> {
        ensure!(
            pulse.len() >= self.required_pulse_len(),
            "pulse has {} samples, estimator needs {}",
            pulse.len(),
            self.required_pulse_len()
        );
        let block = 2 * self.pair_len;
        let seg_len = self.range_bins + block - 1;
        let u_start = self.cef_offset;
        let v_start = self.cef_offset + block;
        let h1 = self.correlate_block(&pulse[u_start..u_start + seg_len], &self.spectrum_u);
        let h2 = self.correlate_block(&pulse[v_start..v_start + seg_len], &self.spectrum_v);
        let h = h1.iter().zip(&h2).map(|(a, b)| (a + b) * 0.5).collect();
        Ok(ChannelEstimate { h, pulse_index })
    }

    pub fn estimate_train(&self, train: &PulseTrain) -> Result<Vec<ChannelEstimate>> {
        train
            .pulses()
            .par_iter()
            .enumerate()
            .map(|(p, pulse)| self.estimate(pulse, p))
            .collect()
    }
}

/// End-to-end processing configuration.
#[derive(Debug, Clone)]
pub struct RadarProcessor {
    pub estimator: ChannelEstimator,
    pub fft_len: usize,
    pub convention: DopplerConvention,
    pub cfar: CfarConfig,
}

impl RadarProcessor {
    pub fn new(
        estimator: ChannelEstimator,
        fft_len: usize,
        convention: DopplerConvention,
        cfar: CfarConfig,
    ) -> Self {
        Self {
            estimator,
            fft_len,
            convention,
            cfar,
        }
    }

    /// Channel estimates → delay-Doppler map.
    pub fn delay_doppler_map(&self, train: &PulseTrain) -> Result<DelayDopplerMap> {
        let estimates = self.estimator.estimate_train(train)?;
        build_ddm(&estimates, self.fft_len, train.pri_s(), self.convention)
    }

    /// Channel estimates → delay-Doppler map → CFAR.
    pub fn estimate_targets(&self, train: &PulseTrain) -> Result<Vec<Detection>> {
        let ddm = self.delay_doppler_map(train)?;
        cfar_detect(&ddm, &self.cfar)
    }
}

/// Coherent SNR gain of the chain for `pulses` pulses: the Golay correlator
/// leaves the echo amplitude unchanged while dividing noise variance by `4N`,
/// and the unitary slow-time DFT adds a factor `P`.
pub fn processing_gain(pair_len: usize, pulses: usize) -> f64 {
    (4 * pair_len * pulses) as f64
}
