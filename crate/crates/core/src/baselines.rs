//! Comparison schemes: random phases (RPS), discrete quantized phases
//! (DPS), the RIS-free link, and the 0/π pairing constructor that pins
//! the no-RIS performance floor when fading is disabled.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use rand_core::RngCore;

use crate::channel::ChannelSet;
use crate::isi::{decomposition, IsiWindow};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BaselineError {
    /// The 0/π pairing needs an even element count.
    OddElementCount(usize),
    /// Quantizer codebooks need at least one bit.
    ZeroBits,
}

impl fmt::Display for BaselineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaselineError::OddElementCount(n) => {
                write!(f, "0/π pairing requires an even element count, got {n}")
            }
            BaselineError::ZeroBits => write!(f, "quantizer needs at least 1 bit"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for BaselineError {}

/// Uniform codebook `{2π·i / 2^bits}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizerSpec {
    pub bits: u32,
}

impl QuantizerSpec {
    pub fn new(bits: u32) -> Result<Self, BaselineError> {
        if bits == 0 {
            return Err(BaselineError::ZeroBits);
        }
        Ok(Self { bits })
    }

    pub fn levels(&self) -> u64 {
        1u64 << self.bits
    }
}

/// I.i.d. uniform phases on `[0, 2π)`.
pub fn random_phases<R: RngCore + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| rng::uniform_in(rng, 0.0, 2.0 * PI)).collect()
}

/// Map each phase to the nearest codebook point under circular (mod 2π)
/// distance; ties break toward the smaller codebook index.
pub fn quantize_phases(theta: &[f64], q: &QuantizerSpec) -> Vec<f64> {
    let levels = q.levels() as f64;
    let step = 2.0 * PI / levels;
    theta
        .iter()
        .map(|&t| {
            let t = t - 2.0 * PI * libm::floor(t / (2.0 * PI));
            let mut best_idx = 0u64;
            let mut best_dist = f64::INFINITY;
            for i in 0..q.levels() {
                let point = i as f64 * step;
                let raw = libm::fabs(t - point);
                let dist = raw.min(2.0 * PI - raw);
                if dist < best_dist {
                    best_dist = dist;
                    best_idx = i;
                }
            }
            best_idx as f64 * step
        })
        .collect()
}

/// Maximum ISI power with the spatial equalizer removed.
pub fn non_ris_isi(ch: &ChannelSet, w: IsiWindow) -> f64 {
    let dec = decomposition(&ch.without_ris(), w);
    (0..dec.num_users())
        .map(|k| (dec.c[k] - dec.y0[k]).norm_sqr())
        .fold(0.0, f64::max)
}

/// Alternating `[0, π, 0, π, …]` phases; adjacent elements cancel
/// pairwise when their reflection coefficients coincide.
pub fn remark1_phases(n: usize) -> Result<Vec<f64>, BaselineError> {
    if !n.is_multiple_of(2) {
        return Err(BaselineError::OddElementCount(n));
    }
    Ok((0..n).map(|i| if i % 2 == 0 { 0.0 } else { PI }).collect())
}
