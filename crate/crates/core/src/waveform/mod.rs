//! Transmit waveform: Golay pairs, DMG preambles and pulse shaping.

pub mod golay;
pub mod preamble;
pub mod shaping;

pub use golay::{aperiodic_autocorrelation, GolayPair, GolayParams};
pub use preamble::{build_cef, build_preamble, ChipSequence, FrameKind, CEF_LEN, CEF_PAIR_LEN};
pub use shaping::{design_rrc, shape, ShapingFilter};

/// Default radar pulse: the DMG pairs assembled into a CEF and prefixed with
/// the STF of `kind`.
pub fn default_preamble(kind: FrameKind) -> ChipSequence {
    let (u, v) = GolayPair::dmg_cef_pairs();
    let cef = build_cef(&u, &v).expect("default pairs have CEF length");
    build_preamble(kind, &cef).expect("default CEF has the right length")
}
