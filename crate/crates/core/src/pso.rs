//! Phase shift optimization: primal-dual gradient descent on the min-max
//! ISI Lagrangian.
//!
//! The problem is `min_{θ,η} η  s.t. |I_k(θ)|² ≤ η, η ≥ 0` with Lagrangian
//! `L = η + Σ_k μ_k (|I_k|² - η)`. One outer iteration takes a Jacobi
//! primal step in `(η, θ)` from the pre-step state, then a projected dual
//! ascent step in `μ` evaluated at the new phases. The tracked objective is
//! the true `max_k |I_k(θ)|²`, not the Lagrangian, which oscillates in
//! primal-dual schemes; the returned solution is the best iterate seen
//! across all restarts.
//!
//! The θ-gradient follows the A/B split `Y_k(0)/T = A_{k,n} + B_{k,n}
//! e^{-jθ_n}` and reduces to `-2 Σ_k μ_k Im((I_k - B_{k,n} e^{-jθ_n})
//! B*_{k,n} e^{jθ_n})`; its four-term complex form is evaluated directly
//! and checked for a vanishing imaginary residue. The sign convention is
//! pinned by central finite differences (see the gradcheck tests and the
//! `gradcheck` CLI subcommand in the companion crate).

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::baselines::remark1_phases;
use crate::channel::ChannelSet;
use crate::isi::{decomposition, max_isi_power, IsiDecomposition, IsiWindow};

#[derive(Debug, Clone, PartialEq)]
pub enum PsoError {
    /// A gradient evaluated to NaN or infinity; the iterate is unusable.
    NonFiniteGradient { iteration: usize },
    /// The 0/π pairing initialization requires an even element count.
    OddElementCount(usize),
    /// Step sizes and thresholds must be positive.
    InvalidConfig(&'static str),
}

impl fmt::Display for PsoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsoError::NonFiniteGradient { iteration } => {
                write!(f, "non-finite gradient at iteration {iteration}")
            }
            PsoError::OddElementCount(n) => {
                write!(f, "pairing initialization needs an even element count, got {n}")
            }
            PsoError::InvalidConfig(what) => write!(f, "invalid optimizer config: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for PsoError {}

/// Initial phase vector choice for the first start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMode {
    Zeros,
    UniformRandom,
    Remark1Pairs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    pub step_eta: f64,
    /// `None` picks `0.1 / max_k Σ_n |B_{k,n}|²`, which makes the phase
    /// step scale-free across path-loss regimes.
    pub step_theta: Option<f64>,
    pub step_mu: f64,
    /// Termination threshold on the successive objective difference.
    pub sigma: f64,
    pub max_outer_iters: usize,
    /// Extra uniform-random restarts beyond the deterministic starts.
    pub num_restarts: usize,
    pub init_mode: InitMode,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            step_eta: 1e-2,
            step_theta: None,
            step_mu: 1e-2,
            sigma: 0.01,
            max_outer_iters: 5000,
            num_restarts: 0,
            init_mode: InitMode::UniformRandom,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<(), PsoError> {
        if self.step_eta <= 0.0 || self.step_mu <= 0.0 {
            return Err(PsoError::InvalidConfig("step size"));
        }
        if let Some(s) = self.step_theta {
            if s <= 0.0 {
                return Err(PsoError::InvalidConfig("step_theta"));
            }
        }
        if self.sigma <= 0.0 {
            return Err(PsoError::InvalidConfig("sigma"));
        }
        if self.max_outer_iters == 0 {
            return Err(PsoError::InvalidConfig("max_outer_iters"));
        }
        Ok(())
    }
}

/// Primal-dual iterates.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub theta: Vec<f64>,
    pub eta: f64,
    pub mu: Vec<f64>,
    pub iter: usize,
    pub objective_history: Vec<f64>,
}

impl OptimizerState {
    /// Feasible warm start: `μ_k = 1/K` (so the η-gradient vanishes) and
    /// `η⁰ = max_k |I_k(θ⁰)|²`.
    pub fn new(dec: &IsiDecomposition, theta: Vec<f64>) -> Self {
        let k = dec.num_users();
        let (eta, _) = max_isi_power(dec, &theta);
        OptimizerState {
            theta,
            eta,
            mu: alloc::vec![1.0 / k as f64; k],
            iter: 0,
            objective_history: Vec::new(),
        }
    }
}

/// Result of [`optimize`]. `eta` is the true maximum ISI power at
/// `theta`, recomputed from the phases rather than taken from the η
/// iterate (which can lag).
#[derive(Debug, Clone, PartialEq)]
pub struct PsoSolution {
    pub theta: Vec<f64>,
    pub eta: f64,
    pub per_user: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// `L(θ, η, μ) = η + Σ_k μ_k (|I_k(θ)|² - η)`.
pub fn lagrangian(dec: &IsiDecomposition, state: &OptimizerState) -> f64 {
    let (_, per_user) = max_isi_power(dec, &state.theta);
    let mut l = state.eta;
    for (mu, p) in state.mu.iter().zip(per_user.iter()) {
        l += mu * (p - state.eta);
    }
    l
}

/// `∇_η L = 1 - Σ_k μ_k`.
pub fn grad_eta(state: &OptimizerState) -> f64 {
    1.0 - state.mu.iter().sum::<f64>()
}

fn rotor(theta: f64) -> Complex64 {
    Complex64::new(libm::cos(theta), libm::sin(theta))
}

/// The θ_n-gradient of the penalized ISI term, via the A/B split.
///
/// The complex four-term expression is conjugate-symmetric; a non-vanishing
/// imaginary residue indicates a broken decomposition and is asserted away.
pub fn grad_theta(dec: &IsiDecomposition, state: &OptimizerState, n: usize) -> f64 {
    let dc: Vec<Complex64> = (0..dec.num_users())
        .map(|k| crate::isi::dc_response(dec, &state.theta, k))
        .collect();
    grad_theta_with_dc(dec, &state.theta, &state.mu, &dc, n)
}

fn grad_theta_with_dc(
    dec: &IsiDecomposition,
    theta: &[f64],
    mu: &[f64],
    dc: &[Complex64],
    n: usize,
) -> f64 {
    let e_pos = rotor(theta[n]);
    let e_neg = e_pos.conj();
    let j = Complex64::new(0.0, 1.0);
    let mut g = Complex64::new(0.0, 0.0);
    for k in 0..dec.num_users() {
        let b = dec.b[k][n];
        let a = dc[k] - b * e_neg;
        let y0 = dec.y0[k];
        let term = a * b.conj() * j * e_pos - b * a.conj() * j * e_neg
            + y0.conj() * b * j * e_neg
            - y0 * b.conj() * j * e_pos;
        g += term * mu[k];
    }
    debug_assert!(
        g.im.abs() < 1e-10 * g.re.abs().max(1.0),
        "imaginary residue {} in θ-gradient",
        g.im
    );
    g.re
}

/// All N phase gradients at once; shares the per-user DC response.
pub fn grad_theta_all(dec: &IsiDecomposition, state: &OptimizerState) -> Vec<f64> {
    let dc: Vec<Complex64> = (0..dec.num_users())
        .map(|k| crate::isi::dc_response(dec, &state.theta, k))
        .collect();
    (0..dec.num_elements())
        .map(|n| grad_theta_with_dc(dec, &state.theta, &state.mu, &dc, n))
        .collect()
}

/// Scale-free default phase step: `0.1 / max_k Σ_n |B_{k,n}|²`.
pub fn resolve_step_theta(dec: &IsiDecomposition, cfg: &PsoConfig) -> f64 {
    if let Some(s) = cfg.step_theta {
        return s;
    }
    let max_b: f64 = dec
        .b
        .iter()
        .map(|row| row.iter().map(|b| b.norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max);
    if max_b > 0.0 {
        0.1 / max_b
    } else {
        0.1
    }
}

fn wrap_phase(theta: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let wrapped = theta - two_pi * libm::floor(theta / two_pi);
    if wrapped >= two_pi {
        0.0
    } else {
        wrapped
    }
}

/// One Jacobi primal step: project η onto `[0, ∞)`, step every θ_n from
/// the pre-step decomposition, wrap phases to `[0, 2π)`.
pub fn primal_step(
    dec: &IsiDecomposition,
    state: &mut OptimizerState,
    cfg: &PsoConfig,
) -> Result<(), PsoError> {
    let g_eta = grad_eta(state);
    let g_theta = grad_theta_all(dec, state);
    if !g_eta.is_finite() || g_theta.iter().any(|g| !g.is_finite()) {
        return Err(PsoError::NonFiniteGradient {
            iteration: state.iter,
        });
    }
    let step_theta = resolve_step_theta(dec, cfg);
    state.eta = (state.eta - cfg.step_eta * g_eta).max(0.0);
    for (t, g) in state.theta.iter_mut().zip(g_theta.iter()) {
        *t = wrap_phase(*t - step_theta * g);
    }
    Ok(())
}

/// Projected dual ascent at the new phases:
/// `μ_k ← [μ_k + δ_μ (|I_k(θ)|² - η)]⁺`.
pub fn dual_step(dec: &IsiDecomposition, state: &mut OptimizerState, cfg: &PsoConfig) {
    let (_, per_user) = max_isi_power(dec, &state.theta);
    for (mu, p) in state.mu.iter_mut().zip(per_user.iter()) {
        *mu = (*mu + cfg.step_mu * (p - state.eta)).max(0.0);
    }
}

fn run_from(
    dec: &IsiDecomposition,
    start: Vec<f64>,
    cfg: &PsoConfig,
    best: &mut (f64, Vec<f64>),
) -> Result<(bool, usize), PsoError> {
    let mut state = OptimizerState::new(dec, start);
    let mut obj = state.eta;
    state.objective_history.push(obj);
    if obj < best.0 {
        *best = (obj, state.theta.clone());
    }
    let mut converged = false;
    while state.iter < cfg.max_outer_iters {
        primal_step(dec, &mut state, cfg)?;
        dual_step(dec, &mut state, cfg);
        state.iter += 1;
        let (next_obj, _) = max_isi_power(dec, &state.theta);
        state.objective_history.push(next_obj);
        if next_obj < best.0 {
            *best = (next_obj, state.theta.clone());
        }
        let diff = (next_obj - obj).abs();
        obj = next_obj;
        if diff < cfg.sigma {
            converged = true;
            break;
        }
    }
    Ok((converged, state.iter))
}

/// Minimize the maximum ISI power over the RIS phase configuration.
///
/// Runs the primal-dual iteration from the configured start, from the
/// 0/π pairing when the element count is even, and from
/// `num_restarts` further random starts; returns the best iterate seen.
/// Deterministic given the RNG state.
pub fn optimize<R: RngCore + ?Sized>(
    ch: &ChannelSet,
    w: IsiWindow,
    cfg: &PsoConfig,
    rng: &mut R,
) -> Result<PsoSolution, PsoError> {
    cfg.validate()?;
    let dec = decomposition(ch, w);
    let n = dec.num_elements();

    let mut starts: Vec<Vec<f64>> = Vec::new();
    match cfg.init_mode {
        InitMode::Zeros => starts.push(alloc::vec![0.0; n]),
        InitMode::UniformRandom => starts.push(crate::baselines::random_phases(n, rng)),
        InitMode::Remark1Pairs => {
            starts.push(remark1_phases(n).map_err(|_| PsoError::OddElementCount(n))?)
        }
    }
    if n.is_multiple_of(2) && cfg.init_mode != InitMode::Remark1Pairs {
        // The pairing start embeds the no-RIS performance floor.
        starts.push(remark1_phases(n).expect("even N"));
    }
    for _ in 0..cfg.num_restarts {
        starts.push(crate::baselines::random_phases(n, rng));
    }

    let mut best = (f64::INFINITY, alloc::vec![0.0; n]);
    let mut all_converged = true;
    let mut total_iters = 0;
    for start in starts {
        let (converged, iters) = run_from(&dec, start, cfg, &mut best)?;
        all_converged &= converged;
        total_iters += iters;
    }

    let (eta, per_user) = max_isi_power(&dec, &best.1);
    Ok(PsoSolution {
        theta: best.1,
        eta,
        per_user,
        converged: all_converged,
        iterations: total_iters,
    })
}
