//! Golay complementary pairs.
//!
//! Pairs are built with the recursive delay/weight construction
//!
//! ```text
//! a_0 = b_0 = δ
//! a_k[n] = w_k a_{k-1}[n] + b_{k-1}[n - D_k]
//! b_k[n] = w_k a_{k-1}[n] - b_{k-1}[n - D_k]
//! ```
//!
//! where `D` is a permutation of `{1, 2, ..., 2^(K-1)}` and `w_k = ±1`.
//! Every such choice yields a pair whose aperiodic autocorrelations sum to
//! `2N δ[lag]`.

use crate::error::{ensure, Result};

/// Delay and weight vectors driving the recursive construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GolayParams {
    pub delays: Vec<usize>,
    pub weights: Vec<i8>,
}

impl GolayParams {
    pub fn new(delays: Vec<usize>, weights: Vec<i8>) -> Self {
        Self { delays, weights }
    }

    /// Ascending delays with unit weights, for a length `2^k` pair.
    pub fn ascending(k: u32) -> Self {
        Self {
            delays: (0..k).map(|i| 1usize << i).collect(),
            weights: vec![1; k as usize],
        }
    }

    /// Parameters of the DMG length-128 pair used for the default preamble.
    pub fn dmg_128() -> Self {
        Self {
            delays: vec![1, 8, 2, 4, 16, 32, 64],
            weights: vec![-1, -1, -1, -1, 1, -1, -1],
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        ensure!(
            n >= 2 && n.is_power_of_two(),
            "Golay length must be a power of two >= 2, got {n}"
        );
        let k = n.trailing_zeros() as usize;
        ensure!(
            self.delays.len() == k,
            "expected {k} delays for length {n}, got {}",
            self.delays.len()
        );
        ensure!(
            self.weights.len() == k,
            "expected {k} weights for length {n}, got {}",
            self.weights.len()
        );
        let mut sorted = self.delays.clone();
        sorted.sort_unstable();
        let expected: Vec<usize> = (0..k).map(|i| 1usize << i).collect();
        ensure!(
            sorted == expected,
            "delays {:?} are not a permutation of {:?}",
            self.delays,
            expected
        );
        ensure!(
            self.weights.iter().all(|&w| w == 1 || w == -1),
            "weights must be +1 or -1, got {:?}",
            self.weights
        );
        Ok(())
    }
}

/// A bipolar Golay complementary pair `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GolayPair {
    a: Vec<i8>,
    b: Vec<i8>,
}

impl GolayPair {
    /// Generate a pair of length `n` from delay/weight parameters.
    pub fn generate(n: usize, params: &GolayParams) -> Result<Self> {
        params.validate(n)?;
        let mut a = vec![0i8; n];
        let mut b = vec![0i8; n];
        a[0] = 1;
        b[0] = 1;
        let mut len = 1usize;
        for (&delay, &w) in params.delays.iter().zip(&params.weights) {
            let span = len.max(delay + len);
            let mut next_a = vec![0i8; span];
            let mut next_b = vec![0i8; span];
            for i in 0..len {
                next_a[i] += w * a[i];
                next_b[i] += w * a[i];
                next_a[i + delay] += b[i];
                next_b[i + delay] -= b[i];
            }
            a[..span].copy_from_slice(&next_a);
            b[..span].copy_from_slice(&next_b);
            len = span;
        }
        debug_assert_eq!(len, n);
        Ok(Self { a, b })
    }

    /// Wrap two existing sequences, checking they form a complementary pair.
    pub fn from_sequences(a: Vec<i8>, b: Vec<i8>) -> Result<Self> {
        ensure!(
            a.len() == b.len(),
            "pair lengths differ: {} vs {}",
            a.len(),
            b.len()
        );
        ensure!(
            a.len() >= 2 && a.len().is_power_of_two(),
            "pair length must be a power of two >= 2, got {}",
            a.len()
        );
        ensure!(
            a.iter().chain(&b).all(|&x| x == 1 || x == -1),
            "sequences must be bipolar"
        );
        let pair = Self { a, b };
        ensure!(pair.max_sidelobe() == 0, "sequences are not complementary");
        Ok(pair)
    }

    /// The default DMG channel-estimation pairs `(u, v)` of length 256,
    /// assembled from the length-128 pair as
    /// `Gau = [-Gb, -Ga]`, `Gbu = [Gb, -Ga]`, `Gav = [-Gb, Ga]`, `Gbv = [-Gb, -Ga]`.
    pub fn dmg_cef_pairs() -> (Self, Self) {
        let base = Self::generate(128, &GolayParams::dmg_128()).expect("valid default parameters");
        let ga = base.a();
        let gb = base.b();
        let neg = |s: &[i8]| s.iter().map(|&x| -x).collect::<Vec<_>>();
        let cat = |x: &[i8], y: &[i8]| [x, y].concat();
        let u = Self {
            a: cat(&neg(gb), &neg(ga)),
            b: cat(gb, &neg(ga)),
        };
        let v = Self {
            a: cat(&neg(gb), ga),
            b: cat(&neg(gb), &neg(ga)),
        };
        (u, v)
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn a(&self) -> &[i8] {
        &self.a
    }

    pub fn b(&self) -> &[i8] {
        &self.b
    }

    /// `a ∥ b`, the 2N-chip block carrying this pair on air.
    pub fn concatenated(&self) -> Vec<i8> {
        [self.a.as_slice(), self.b.as_slice()].concat()
    }

    /// Sum of the two aperiodic autocorrelations, lags `-(N-1)..=(N-1)`.
    pub fn complementary_autocorrelation(&self) -> Vec<i64> {
        aperiodic_autocorrelation(&self.a)
            .into_iter()
            .zip(aperiodic_autocorrelation(&self.b))
            .map(|(x, y)| x + y)
            .collect()
    }

    /// Largest absolute off-peak value of the complementary autocorrelation.
    pub fn max_sidelobe(&self) -> i64 {
        let n = self.len();
        self.complementary_autocorrelation()
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != n - 1)
            .map(|(_, v)| v.abs())
            .max()
            .unwrap_or(0)
    }
}

/// Aperiodic autocorrelation `R[lag] = Σ s[n] s[n+lag]` for lags
/// `-(N-1)..=(N-1)`, returned with lag 0 at index `N-1`.
pub fn aperiodic_autocorrelation(seq: &[i8]) -> Vec<i64> {
    let n = seq.len();
    if n == 0 {
        return Vec::new();
    }
    let mut out = vec![0i64; 2 * n - 1];
    for lag in 0..n {
        let r: i64 = (0..n - lag)
            .map(|i| seq[i] as i64 * seq[i + lag] as i64)
            .sum();
        out[n - 1 + lag] = r;
        out[n - 1 - lag] = r;
    }
    out
}
