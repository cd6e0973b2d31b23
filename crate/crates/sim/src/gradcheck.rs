//! Finite-difference verification of the analytic phase gradient.
//!
//! For each trial a random channel/state draw is checked per `(k, n)`
//! against a central difference of the penalized ISI term
//! `μ_k |I_k(θ)|²`; the report carries the worst index of every trial.

use serde::Serialize;

use ris_eq_core::channel::{ChannelSet, ReflectedTap, Tap, TapDelayLine};
use ris_eq_core::isi::{decomposition, isi_frequency, IsiWindow};
use ris_eq_core::pso::{grad_theta, OptimizerState};
use ris_eq_core::rng::{self, stream, RngCore};
use ris_eq_core::Complex64;

const FD_STEP: f64 = 1e-6;
/// Failure threshold on the relative error.
pub const REL_ERROR_LIMIT: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub trial: usize,
    pub num_users: usize,
    pub num_elements: usize,
    /// Index of the worst-matching gradient component.
    pub worst_user: usize,
    pub worst_element: usize,
    pub analytic: f64,
    pub finite_difference: f64,
    pub rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GradcheckReport {
    pub trials: Vec<TrialReport>,
    pub max_rel_error: f64,
    pub pass: bool,
}

fn random_channel(rng: &mut impl RngCore, k_users: usize, n_elems: usize) -> ChannelSet {
    let w = IsiWindow::DEFAULT;
    let mut direct = Vec::new();
    let mut reflected = Vec::new();
    for _ in 0..k_users {
        let mut taps: Vec<Tap> = Vec::new();
        for _ in 0..8 {
            let delay = (rng.next_u64() % (w.len() as u64 + 1)) as usize;
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
                gain: Complex64::new(1.0, 0.0),
            });
        }
        taps.sort_by_key(|t| t.delay);
        direct.push(TapDelayLine { taps });
        reflected.push(
            (0..n_elems)
                .map(|_| ReflectedTap {
                    delay: 1 + (rng.next_u64() % (w.len() as u64 - 1)) as usize,
                    gain: rng::complex_normal(rng) * 0.4,
                })
                .collect(),
        );
    }
    ChannelSet {
        direct,
        reflected,
        symbol_interval: 1e-3,
    }
}

/// Run `trials` random gradient checks.
pub fn gradcheck(trials: usize, seed: u64) -> GradcheckReport {
    let w = IsiWindow::DEFAULT;
    let mut rng = stream(seed);
    let mut reports = Vec::with_capacity(trials);
    let mut max_rel_error: f64 = 0.0;

    for trial in 0..trials {
        let k_users = 1 + trial % 4;
        let n_elems = 2 + trial % 7;
        let ch = random_channel(&mut rng, k_users, n_elems);
        let dec = decomposition(&ch, w);
        let theta: Vec<f64> = (0..n_elems)
            .map(|_| rng::uniform_in(&mut rng, 0.0, 2.0 * std::f64::consts::PI))
            .collect();
        let mu: Vec<f64> = (0..k_users)
            .map(|_| rng::uniform_in(&mut rng, 0.0, 1.0))
            .collect();

        let mut worst = TrialReport {
            trial,
            num_users: k_users,
            num_elements: n_elems,
            worst_user: 0,
            worst_element: 0,
            analytic: 0.0,
            finite_difference: 0.0,
            rel_error: 0.0,
        };

        for k in 0..k_users {
            // Isolate user k by zeroing all other multipliers.
            let mut mu_k = vec![0.0; k_users];
            mu_k[k] = mu[k];
            let mut state = OptimizerState::new(&dec, theta.clone());
            state.mu = mu_k.clone();

            for n in 0..n_elems {
                let analytic = grad_theta(&dec, &state, n);
                let evaluate = |t: &[f64]| mu[k] * isi_frequency(&dec, t, k).norm_sqr();
                let mut plus = theta.clone();
                plus[n] += FD_STEP;
                let mut minus = theta.clone();
                minus[n] -= FD_STEP;
                let fd = (evaluate(&plus) - evaluate(&minus)) / (2.0 * FD_STEP);
                let denom = analytic.abs().max(fd.abs()).max(1e-12);
                let rel_error = (analytic - fd).abs() / denom;
                if rel_error >= worst.rel_error {
                    worst = TrialReport {
                        worst_user: k,
                        worst_element: n,
                        analytic,
                        finite_difference: fd,
                        rel_error,
                        ..worst
                    };
                }
            }
        }
        max_rel_error = max_rel_error.max(worst.rel_error);
        reports.push(worst);
    }

    GradcheckReport {
        trials: reports,
        max_rel_error,
        pass: max_rel_error <= REL_ERROR_LIMIT,
    }
}
