//! Multi-target echo model for a train of `P` preamble pulses.
//!
//! Pulse `p` is `Σ_l α_l · tx[n - d_l] · exp(-j2π f_D,l · p · T_pr) + z[n]`
//! with delays quantised to the chip grid and a per-pulse constant Doppler
//! phase. Noise is circular white Gaussian drawn from a ChaCha stream keyed by
//! `(seed, pulse index)`, so the output is bit-identical regardless of how
//! pulses are scheduled across threads.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::{CHIP_INTERVAL_S, SPEED_OF_LIGHT, WAVELENGTH_M};
use crate::error::{ensure, Result};
use crate::waveform::ChipSequence;

/// Maximum unambiguous range of the radar (m).
pub const MAX_RANGE_M: f64 = 200.0;

/// How radial velocity maps to Doppler frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DopplerConvention {
    /// `f_D = ν / λ`, consistent with `ν_u = λ / T_pr`.
    #[default]
    Paper,
    /// Monostatic round trip, `f_D = 2ν / λ`.
    TwoWay,
}

impl DopplerConvention {
    pub fn doppler_hz(self, velocity_mps: f64) -> f64 {
        match self {
            DopplerConvention::Paper => velocity_mps / WAVELENGTH_M,
            DopplerConvention::TwoWay => 2.0 * velocity_mps / WAVELENGTH_M,
        }
    }

    pub fn velocity_mps(self, doppler_hz: f64) -> f64 {
        match self {
            DopplerConvention::Paper => doppler_hz * WAVELENGTH_M,
            DopplerConvention::TwoWay => doppler_hz * WAVELENGTH_M / 2.0,
        }
    }
}

impl std::str::FromStr for DopplerConvention {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "paper" => Ok(DopplerConvention::Paper),
            "two_way" => Ok(DopplerConvention::TwoWay),
            other => Err(crate::Error::invalid(format!(
                "unknown Doppler convention {other:?}"
            ))),
        }
    }
}

/// A point reflector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Target {
    pub range_m: f64,
    pub radial_velocity_mps: f64,
    pub reflectivity: Complex64,
}

impl Target {
    pub fn new(range_m: f64, radial_velocity_mps: f64, reflectivity: Complex64) -> Self {
        Self {
            range_m,
            radial_velocity_mps,
            reflectivity,
        }
    }

    /// Round-trip delay in whole chips.
    pub fn delay_chips(&self) -> usize {
        delay_chips(self.range_m)
    }
}

/// Round-trip delay `2R/c` rounded to the chip grid.
pub fn delay_chips(range_m: f64) -> usize {
    (2.0 * range_m / SPEED_OF_LIGHT / CHIP_INTERVAL_S).round() as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoConfig {
    pub pulses: usize,
    pub pri_s: f64,
    /// Number of delay bins in the receive window.
    pub range_bins: usize,
    pub noise_power: f64,
    pub seed: u64,
    #[serde(default)]
    pub convention: DopplerConvention,
}

impl EchoConfig {
    fn validate(&self, tx: &ChipSequence) -> Result<()> {
        ensure!(self.pulses >= 1, "pulse count must be >= 1");
        ensure!(self.range_bins >= 1, "range bin count must be >= 1");
        ensure!(
            self.pri_s.is_finite() && self.pri_s >= tx.duration() * (1.0 - 1e-12),
            "PRI {} s is shorter than the {} s pulse",
            self.pri_s,
            tx.duration()
        );
        ensure!(
            self.noise_power.is_finite() && self.noise_power >= 0.0,
            "noise power must be non-negative, got {}",
            self.noise_power
        );
        Ok(())
    }
}

/// Received chip-rate samples, one vector per pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    pulses: Vec<Vec<Complex64>>,
    range_bins: usize,
    pri_s: f64,
}

impl PulseTrain {
    pub fn new(pulses: Vec<Vec<Complex64>>, range_bins: usize, pri_s: f64) -> Result<Self> {
        ensure!(
            !pulses.is_empty(),
            "pulse train must contain at least one pulse"
        );
        let len = pulses[0].len();
        ensure!(
            pulses.iter().all(|p| p.len() == len),
            "all pulses must have the same length"
        );
        Ok(Self {
            pulses,
            range_bins,
            pri_s,
        })
    }

    pub fn pulses(&self) -> &[Vec<Complex64>] {
        &self.pulses
    }

    pub fn pulse_count(&self) -> usize {
        self.pulses.len()
    }

    pub fn pulse_len(&self) -> usize {
        self.pulses[0].len()
    }

    pub fn range_bins(&self) -> usize {
        self.range_bins
    }

    pub fn pri_s(&self) -> f64 {
        self.pri_s
    }

    /// Absolute time of chip `n` in pulse `p`.
    pub fn sample_time(&self, p: usize, n: usize) -> f64 {
        p as f64 * self.pri_s + n as f64 * CHIP_INTERVAL_S
    }
}

fn pulse_rng(seed: u64, pulse: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(pulse as u64);
    rng
}

/// Simulate the received pulse train for `targets` illuminated by `tx`.
pub fn simulate_echo(
    tx: &ChipSequence,
    targets: &[Target],
    cfg: &EchoConfig,
) -> Result<PulseTrain> {
    cfg.validate(tx)?;
    let v_max = WAVELENGTH_M / cfg.pri_s;
    for t in targets {
        ensure!(
            t.range_m > 0.0 && t.range_m <= MAX_RANGE_M,
            "target range {} m outside (0, {MAX_RANGE_M}]",
            t.range_m
        );
        ensure!(
            t.delay_chips() < cfg.range_bins,
            "target at {} m ({} chips) exceeds the {}-bin window",
            t.range_m,
            t.delay_chips(),
            cfg.range_bins
        );
        ensure!(
            t.radial_velocity_mps.abs() <= v_max,
            "target velocity {} m/s exceeds the unambiguous {} m/s",
            t.radial_velocity_mps,
            v_max
        );
    }

    let pulse_len = cfg.range_bins + tx.len();
    let sigma = (cfg.noise_power / 2.0).sqrt();
    let pulses = (0..cfg.pulses)
        .into_par_iter()
        .map(|p| {
            let mut samples = vec![Complex64::new(0.0, 0.0); pulse_len];
            if cfg.noise_power > 0.0 {
                let normal = Normal::new(0.0, sigma).expect("finite sigma");
                let mut rng = pulse_rng(cfg.seed, p);
                for s in samples.iter_mut() {
                    *s = Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
                }
            }
            for t in targets {
                let f_d = cfg.convention.doppler_hz(t.radial_velocity_mps);
                let phase = -2.0 * std::f64::consts::PI * f_d * p as f64 * cfg.pri_s;
                let gain = t.reflectivity * Complex64::from_polar(1.0, phase);
                let delay = t.delay_chips();
                for (s, &x) in samples[delay..delay + tx.len()]
                    .iter_mut()
                    .zip(tx.samples())
                {
                    *s += gain * x;
                }
            }
            samples
        })
        .collect();
    PulseTrain::new(pulses, cfg.range_bins, cfg.pri_s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::waveform::{default_preamble, FrameKind};

    fn cfg(pulses: usize, noise: f64) -> EchoConfig {
        EchoConfig {
            pulses,
            pri_s: 4.29e-6,
            range_bins: 1024,
            noise_power: noise,
            seed: 7,
            convention: DopplerConvention::Paper,
        }
    }

    #[test]
    fn static_target_is_shifted_copy() {
        let tx = default_preamble(FrameKind::Scphy);
        let t = Target::new(42.6, 0.0, Complex64::new(1.0, 0.0));
        assert_eq!(t.delay_chips(), 500);
        let train = simulate_echo(&tx, &[t], &cfg(4, 0.0)).unwrap();
        assert_eq!(train.pulse_len(), 1024 + 3328);
        for pulse in train.pulses() {
            assert!(pulse[..500].iter().all(|s| s.norm() == 0.0));
            assert_eq!(&pulse[500..500 + tx.len()], tx.samples());
            assert!(pulse[500 + tx.len()..].iter().all(|s| s.norm() == 0.0));
        }
    }

    #[test]
    fn empty_scene_without_noise_is_silent() {
        let tx = default_preamble(FrameKind::Scphy);
        let train = simulate_echo(&tx, &[], &cfg(3, 0.0)).unwrap();
        assert!(train.pulses().iter().flatten().all(|s| s.norm() == 0.0));
    }

    #[test]
    fn constant_phase_step_per_pulse() {
        let tx = default_preamble(FrameKind::Scphy);
        let v = 12.5;
        let t = Target::new(30.0, v, Complex64::new(0.3, 0.4));
        let c = cfg(16, 0.0);
        let train = simulate_echo(&tx, &[t], &c).unwrap();
        let d = t.delay_chips();
        let step = -2.0 * std::f64::consts::PI * (v / WAVELENGTH_M) * c.pri_s;
        let expected = Complex64::from_polar(1.0, step);
        for p in 1..16 {
            let ratio = train.pulses()[p][d] / train.pulses()[p - 1][d];
            assert!((ratio - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn two_way_doubles_doppler() {
        assert_eq!(
            DopplerConvention::TwoWay.doppler_hz(3.0),
            2.0 * DopplerConvention::Paper.doppler_hz(3.0)
        );
        let f = DopplerConvention::TwoWay.doppler_hz(7.0);
        assert!((DopplerConvention::TwoWay.velocity_mps(f) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn linearity_with_shared_noise() {
        let tx = default_preamble(FrameKind::Scphy);
        let t1 = Target::new(20.0, 5.0, Complex64::new(1.0, 0.0));
        let t2 = Target::new(60.0, -8.0, Complex64::new(0.0, 0.5));
        let noisy = cfg(8, 0.1);
        let quiet = cfg(8, 0.0);
        let a = simulate_echo(&tx, &[t1], &noisy).unwrap();
        let b = simulate_echo(&tx, &[t2], &quiet).unwrap();
        let both = simulate_echo(&tx, &[t1, t2], &noisy).unwrap();
        for p in 0..8 {
            for n in 0..a.pulse_len() {
                let sum = a.pulses()[p][n] + b.pulses()[p][n];
                assert!((sum - both.pulses()[p][n]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn noise_power_converges() {
        let tx = ChipSequence::from_bipolar(&[1; 16]).unwrap();
        let c = EchoConfig {
            pulses: 50,
            pri_s: 1e-6,
            range_bins: 2048,
            noise_power: 0.7,
            seed: 99,
            convention: DopplerConvention::Paper,
        };
        let train = simulate_echo(&tx, &[], &c).unwrap();
        let samples: Vec<_> = train.pulses().iter().flatten().collect();
        assert!(samples.len() >= 100_000);
        let power = samples.iter().map(|s| s.norm_sqr()).sum::<f64>() / samples.len() as f64;
        assert!((power - 0.7).abs() / 0.7 < 0.05, "power {power}");
    }

    #[test]
    fn deterministic_for_seed() {
        let tx = default_preamble(FrameKind::Scphy);
        let t = Target::new(50.0, 3.0, Complex64::new(1.0, 0.0));
        let a = simulate_echo(&tx, &[t], &cfg(6, 1.0)).unwrap();
        let b = simulate_echo(&tx, &[t], &cfg(6, 1.0)).unwrap();
        assert_eq!(a, b);
        let mut other = cfg(6, 1.0);
        other.seed = 8;
        assert_ne!(a, simulate_echo(&tx, &[t], &other).unwrap());
    }

    #[test]
    fn rejects_invalid_inputs() {
        let tx = default_preamble(FrameKind::Scphy);
        let far = Target::new(150.0, 0.0, Complex64::new(1.0, 0.0));
        assert!(simulate_echo(&tx, &[far], &cfg(2, 0.0)).is_err());
        assert!(simulate_echo(&tx, &[], &cfg(2, -1.0)).is_err());
        let mut short_pri = cfg(2, 0.0);
        short_pri.pri_s = 1e-7;
        assert!(simulate_echo(&tx, &[], &short_pri).is_err());
        let fast = Target::new(10.0, 5000.0, Complex64::new(1.0, 0.0));
        assert!(simulate_echo(&tx, &[fast], &cfg(2, 0.0)).is_err());
    }
}
