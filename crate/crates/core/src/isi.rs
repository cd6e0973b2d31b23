//! Peak-distortion ISI extraction.
//!
//! The composite received pulse is sampled on the symbol grid; the peak
//! sample is the max-magnitude bin of the direct response, re-indexed to
//! bin 0 so reflected taps (delay ≥ 1) can never touch it. ISI is the sum
//! of off-peak samples inside a finite window, available through two
//! routes that coincide exactly on this grid: direct time-domain summation
//! and the zero-frequency identity `I_k = Y_k(0)/T - y_k(0)`.
//!
//! The transmit pulse is a unit rectangle of duration `T`, so `S_k(0) = T`
//! is absorbed and `Y_k(0)/T` equals the plain sum of composite taps.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::ChannelSet;

/// Number of symbols after the peak included in the ISI sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsiWindow(pub usize);

impl IsiWindow {
    pub const DEFAULT: IsiWindow = IsiWindow(16);

    /// Window length in symbols; never zero for a valid window.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.0
    }

    pub fn is_valid(&self) -> bool {
        self.0 >= 1
    }
}

/// The composite received pulse sampled on delay bins `0..=W`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositeResponse {
    pub samples: Vec<Complex64>,
    /// Max-magnitude bin of the direct response (0 after re-indexing).
    pub peak_bin: usize,
    pub peak_value: Complex64,
    /// Set when reflected taps fell outside the window: part of the ISI
    /// mass is beyond the boundary and is ignored.
    pub truncated: bool,
}

/// Per-user ingredients of the zero-frequency ISI identity: the peak
/// sample `y_k(0)`, the direct DC term `C_k` and the per-element
/// coefficients `B_{k,n}` (all in units of `Y_k(0)/T`).
#[derive(Debug, Clone, PartialEq)]
pub struct IsiDecomposition {
    pub y0: Vec<Complex64>,
    pub c: Vec<Complex64>,
    /// `b[k][n]` multiplies `e^{-jθ_n}` in `Y_k(0)/T`.
    pub b: Vec<Vec<Complex64>>,
    pub symbol_interval: f64,
    pub truncated: bool,
}

impl IsiDecomposition {
    pub fn num_users(&self) -> usize {
        self.y0.len()
    }

    pub fn num_elements(&self) -> usize {
        self.b.first().map_or(0, Vec::len)
    }
}

/// Direct taps re-indexed so the max-magnitude tap sits at bin 0.
/// Pre-peak taps get negative bins and are dropped by the window.
fn reindexed_direct(ch: &ChannelSet, k: usize) -> (i64, Complex64) {
    let line = &ch.direct[k];
    let peak = line
        .taps
        .iter()
        .max_by(|a, b| a.gain.norm_sqr().partial_cmp(&b.gain.norm_sqr()).unwrap())
        .expect("tap delay line is never empty");
    (peak.delay as i64, peak.gain)
}

/// Assemble the composite response for user `k` under phase vector `theta`.
pub fn composite_response(
    ch: &ChannelSet,
    theta: &[f64],
    k: usize,
    w: IsiWindow,
) -> CompositeResponse {
    assert!(w.is_valid(), "ISI window must be at least 1 symbol");
    assert_eq!(theta.len(), ch.num_elements(), "phase vector length");

    let (peak_delay, peak_gain) = reindexed_direct(ch, k);
    let mut samples = alloc::vec![Complex64::new(0.0, 0.0); w.len() + 1];
    for tap in &ch.direct[k].taps {
        let bin = tap.delay as i64 - peak_delay;
        if (0..=w.len() as i64).contains(&bin) {
            samples[bin as usize] += tap.gain;
        }
    }
    let mut truncated = false;
    for (n, tap) in ch.reflected[k].iter().enumerate() {
        if tap.delay <= w.len() {
            let rot = Complex64::new(libm::cos(theta[n]), -libm::sin(theta[n]));
            samples[tap.delay] += tap.gain * rot;
        } else {
            truncated = true;
        }
    }
    CompositeResponse {
        samples,
        peak_bin: 0,
        peak_value: peak_gain,
        truncated,
    }
}

/// Time-domain ISI: sum of off-peak samples within the window.
pub fn isi_time_domain(resp: &CompositeResponse) -> Complex64 {
    resp.samples
        .iter()
        .enumerate()
        .filter(|(b, _)| *b != resp.peak_bin)
        .map(|(_, s)| s)
        .sum()
}

/// Build the A/B decomposition for the whole channel set.
pub fn decomposition(ch: &ChannelSet, w: IsiWindow) -> IsiDecomposition {
    assert!(w.is_valid(), "ISI window must be at least 1 symbol");
    let k_users = ch.num_users();
    let mut y0 = Vec::with_capacity(k_users);
    let mut c = Vec::with_capacity(k_users);
    let mut b = Vec::with_capacity(k_users);
    let mut truncated = false;
    for k in 0..k_users {
        let (peak_delay, peak_gain) = reindexed_direct(ch, k);
        y0.push(peak_gain);
        let mut dc = Complex64::new(0.0, 0.0);
        for tap in &ch.direct[k].taps {
            let bin = tap.delay as i64 - peak_delay;
            if (0..=w.len() as i64).contains(&bin) {
                dc += tap.gain;
            }
        }
        c.push(dc);
        let row: Vec<Complex64> = ch.reflected[k]
            .iter()
            .map(|tap| {
                if tap.delay <= w.len() {
                    tap.gain
                } else {
                    truncated = true;
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        b.push(row);
    }
    IsiDecomposition {
        y0,
        c,
        b,
        symbol_interval: ch.symbol_interval,
        truncated,
    }
}

/// `Y_k(0)/T = C_k + Σ_n B_{k,n} e^{-jθ_n}`.
pub fn dc_response(dec: &IsiDecomposition, theta: &[f64], k: usize) -> Complex64 {
    let mut acc = dec.c[k];
    for (n, b) in dec.b[k].iter().enumerate() {
        acc += b * Complex64::new(libm::cos(theta[n]), -libm::sin(theta[n]));
    }
    acc
}

/// Frequency-domain ISI: `I_k = Y_k(0)/T - y_k(0)`.
pub fn isi_frequency(dec: &IsiDecomposition, theta: &[f64], k: usize) -> Complex64 {
    dc_response(dec, theta, k) - dec.y0[k]
}

/// Split `Y_k(0)/T = A_{k,n} + B_{k,n} e^{-jθ_n}`, isolating element `n`.
pub fn decompose(
    dec: &IsiDecomposition,
    theta: &[f64],
    k: usize,
    n: usize,
) -> (Complex64, Complex64) {
    let b_n = dec.b[k][n];
    let a = dc_response(dec, theta, k)
        - b_n * Complex64::new(libm::cos(theta[n]), -libm::sin(theta[n]));
    (a, b_n)
}

/// `η = max_k |I_k(θ)|²` together with the per-user powers.
pub fn max_isi_power(dec: &IsiDecomposition, theta: &[f64]) -> (f64, Vec<f64>) {
    let per_user: Vec<f64> = (0..dec.num_users())
        .map(|k| isi_frequency(dec, theta, k).norm_sqr())
        .collect();
    let eta = per_user.iter().cloned().fold(0.0, f64::max);
    (eta, per_user)
}

/// Rescale every user's channel so the received peak power is one,
/// `|y_k(0)|² = 1`, matching how results are reported.
pub fn normalize_received_peak(ch: &ChannelSet) -> ChannelSet {
    let mut out = ch.clone();
    for k in 0..ch.num_users() {
        let (_, peak_gain) = reindexed_direct(ch, k);
        let scale = 1.0 / peak_gain.norm();
        out.direct[k].scale(scale);
        for tap in &mut out.reflected[k] {
            tap.gain *= scale;
        }
    }
    out
}
