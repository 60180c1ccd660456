//! Counter-keyed noise streams.
//!
//! Every `(seed, path, asset)` triple owns an independent SplitMix64
//! stream; step `k` of that asset is the `k`-th draw. Any path or asset can
//! be regenerated in isolation, so results do not depend on how paths are
//! scheduled across threads, and an asset's noise does not change when the
//! universe grows.

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream tag for the independent residual of a numeraire process.
pub(crate) const RESIDUAL_STREAM: u64 = u64::MAX;

fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64 generator positioned at the start of one keyed stream.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    state: u64,
}

impl NoiseStream {
    pub fn new(seed: u64, path: u64, asset: u64) -> Self {
        let mut key = mix(seed.wrapping_add(GOLDEN));
        key = mix(key ^ path.wrapping_mul(0xD1B5_4A32_D192_ED03));
        key = mix(key ^ asset.wrapping_mul(0x8CB9_2BA7_2F3D_8DD7));
        Self { state: key }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }
}

impl RngCore for NoiseStream {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

/// Zero-mean, unit-variance noise law for `dZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    #[default]
    Normal,
    /// Uniform on `[−√3, √3]`.
    UniformRescaled,
    /// `±1` with equal probability.
    TwoPoint,
}

impl NoiseKind {
    pub fn sample(self, rng: &mut NoiseStream) -> f64 {
        match self {
            NoiseKind::Normal => StandardNormal.sample(rng),
            NoiseKind::UniformRescaled => (2.0 * rng.uniform() - 1.0) * 3f64.sqrt(),
            NoiseKind::TwoPoint => {
                if rng.next_u64() >> 63 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }

    /// Empirical moment check: sample mean within 5 standard errors of 0
    /// and sample variance within 5 standard errors of 1.
    pub fn verify_moments(self) -> Result<()> {
        const N: usize = 20_000;
        let mut rng = NoiseStream::new(0x5EED, 0, 0);
        let xs: Vec<f64> = (0..N).map(|_| self.sample(&mut rng)).collect();
        let n = N as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        let var_se = ((m4 - var * var).max(0.0) / n).sqrt().max(1e-12);
        if mean.abs() > 5.0 / n.sqrt() || (var - 1.0).abs() > 5.0 * var_se {
            return Err(Error::InvalidInput(format!(
                "noise {self:?} fails the unit-variance moment check (mean {mean}, var {var})"
            )));
        }
        Ok(())
    }
}
