//! Shared helpers for unit tests: small synthetic channel sets with
//! arbitrary tap layouts, independent of the channel generator.

use alloc::vec::Vec;

use rand_core::RngCore;

use crate::channel::{ChannelSet, ReflectedTap, Tap, TapDelayLine};
use crate::isi::IsiWindow;
use crate::rng;

pub(crate) fn random_channel_set(
    rng: &mut impl RngCore,
    k_users: usize,
    n_elems: usize,
    n_taps: usize,
    w: IsiWindow,
) -> ChannelSet {
    let mut direct = Vec::new();
    let mut reflected = Vec::new();
    for _ in 0..k_users {
        let mut taps: Vec<Tap> = Vec::new();
        for _ in 0..n_taps {
            let delay = (rng.next_u64() % (w.len() as u64 + 4)) as usize;
            if taps.iter().any(|t| t.delay == delay) {
                continue;
            }
            taps.push(Tap {
                delay,
                gain: rng::complex_normal(rng),
            });
        }
        if taps.is_empty() {
            taps.push(Tap {
                delay: 0,
                gain: rng::complex_normal(rng),
            });
        }
        taps.sort_by_key(|t| t.delay);
        direct.push(TapDelayLine { taps });
        let row: Vec<ReflectedTap> = (0..n_elems)
            .map(|_| ReflectedTap {
                delay: 1 + (rng.next_u64() % (w.len() as u64 - 1)) as usize,
                gain: rng::complex_normal(rng) * 0.3,
            })
            .collect();
        reflected.push(row);
    }
    ChannelSet {
        direct,
        reflected,
        symbol_interval: 1e-3,
    }
}

pub(crate) fn random_theta(rng: &mut impl RngCore, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng::uniform_in(rng, 0.0, 2.0 * core::f64::consts::PI))
        .collect()
}
