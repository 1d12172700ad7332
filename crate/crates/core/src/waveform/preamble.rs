use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::golay::{GolayPair, GolayParams};
use crate::consts::CHIP_RATE_HZ;
use crate::error::{ensure, Result};

/// Length of the channel estimation field in chips.
pub const CEF_LEN: usize = 1152;
/// Length of each Golay pair carried in the CEF.
pub const CEF_PAIR_LEN: usize = 256;
const GUARD_LEN: usize = 128;

/// Complex baseband samples at a fixed rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ChipSequence {
    samples: Vec<Complex64>,
    sample_rate: f64,
}

impl ChipSequence {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64) -> Result<Self> {
        ensure!(!samples.is_empty(), "chip sequence must not be empty");
        ensure!(
            sample_rate.is_finite() && sample_rate > 0.0,
            "sample rate must be positive, got {sample_rate}"
        );
        Ok(Self {
            samples,
            sample_rate,
        })
    }

    /// Real bipolar chips at the DMG chip rate.
    pub fn from_bipolar(chips: &[i8]) -> Result<Self> {
        Self::new(
            chips
                .iter()
                .map(|&c| Complex64::new(c as f64, 0.0))
                .collect(),
            CHIP_RATE_HZ,
        )
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Duration in seconds.
    pub fn duration(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate
    }
}

/// DMG frame format used as the radar pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum FrameKind {
    Cphy,
    Scphy,
}

impl FrameKind {
    pub fn stf_len(self) -> usize {
        match self {
            FrameKind::Cphy => 6400,
            FrameKind::Scphy => 2176,
        }
    }

    pub fn cef_len(self) -> usize {
        CEF_LEN
    }

    pub fn preamble_len(self) -> usize {
        self.stf_len() + self.cef_len()
    }
}

impl std::fmt::Display for FrameKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FrameKind::Cphy => f.write_str("CPHY"),
            FrameKind::Scphy => f.write_str("SCPHY"),
        }
    }
}

impl std::str::FromStr for FrameKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "CPHY" => Ok(FrameKind::Cphy),
            "SCPHY" => Ok(FrameKind::Scphy),
            other => Err(crate::Error::invalid(format!(
                "unknown frame kind {other:?}"
            ))),
        }
    }
}

/// Assemble the 1152-chip CEF as `Gu512 ∥ Gv512 ∥ guard`, with
/// `Gu512 = Gau ∥ Gbu`, `Gv512 = Gav ∥ Gbv` and the guard a copy of the last
/// 128 chips of `Gv512`.
pub fn build_cef(pair_u: &GolayPair, pair_v: &GolayPair) -> Result<ChipSequence> {
    ensure!(
        pair_u.len() == CEF_PAIR_LEN && pair_v.len() == CEF_PAIR_LEN,
        "CEF pairs must have length {CEF_PAIR_LEN}, got {} and {}",
        pair_u.len(),
        pair_v.len()
    );
    let gu = pair_u.concatenated();
    let gv = pair_v.concatenated();
    let mut chips = Vec::with_capacity(CEF_LEN);
    chips.extend_from_slice(&gu);
    chips.extend_from_slice(&gv);
    chips.extend_from_slice(&gv[gv.len() - GUARD_LEN..]);
    ChipSequence::from_bipolar(&chips)
}

/// Prefix `cef` with the STF of `kind`: repeated `Ga128` blocks whose last
/// block is negated.
pub fn build_preamble(kind: FrameKind, cef: &ChipSequence) -> Result<ChipSequence> {
    ensure!(
        cef.len() == CEF_LEN,
        "CEF must have {CEF_LEN} chips, got {}",
        cef.len()
    );
    let ga = GolayPair::generate(128, &GolayParams::dmg_128())?;
    let blocks = kind.stf_len() / ga.len();
    let mut samples = Vec::with_capacity(kind.preamble_len());
    for i in 0..blocks {
        let sign = if i + 1 == blocks { -1.0 } else { 1.0 };
        samples.extend(ga.a().iter().map(|&c| Complex64::new(sign * c as f64, 0.0)));
    }
    samples.extend_from_slice(cef.samples());
    ChipSequence::new(samples, cef.sample_rate())
}
