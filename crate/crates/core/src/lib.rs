//! RIS spatial-equalizer core: multipath channel modeling, peak-distortion
//! ISI extraction, and min-max phase-shift optimization.
//!
//! A downlink multi-user MISO link is assisted by a reconfigurable
//! intelligent surface (RIS) whose per-element phase shifts inject
//! controllable reflection paths. The library builds symbol-spaced
//! tapped-delay-line channels for the direct and reflected links, extracts
//! inter-symbol interference by peak distortion analysis, and minimizes the
//! maximum ISI power across users with a primal-dual gradient method.
//!
//! The crate is `no_std`-compatible (`alloc` required); disable the default
//! `std` feature for embedded targets. IO, configuration and the Monte
//! Carlo harness live in the companion `ris-eq-sim` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod channel;
pub mod isi;
pub mod pso;
pub mod rng;
#[cfg(test)]
pub(crate) mod testutil;

pub use num_complex::Complex64;
