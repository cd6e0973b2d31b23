//! Scenario geometry, path loss, Saleh-Valenzuela fading and assembly of
//! symbol-spaced tapped-delay-line channels.
//!
//! The direct BS→user link is an L-path clustered multipath channel; each
//! RIS element contributes one additional reflection path with reflection
//! factor `Γ e^{-jθ_n}`. Reflected tap gains stored here deliberately
//! exclude the `e^{-jθ_n}` phase factor: the phase enters only downstream,
//! which keeps the peak sample independent of the phase configuration.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use rand_core::RngCore;

use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelError {
    /// Grid auto-generation needs a perfect-square element count.
    NonSquareGrid(usize),
    /// A path-loss distance was zero or negative.
    NonPositiveDistance(f64),
    /// Reflection amplitude outside `[0, 1]`.
    InvalidReflection(f64),
    /// A named parameter failed validation.
    InvalidParam(&'static str),
}

impl fmt::Display for ChannelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelError::NonSquareGrid(n) => {
                write!(f, "element count {n} is not a perfect square")
            }
            ChannelError::NonPositiveDistance(d) => {
                write!(f, "path-loss distance must be positive, got {d}")
            }
            ChannelError::InvalidReflection(g) => {
                write!(f, "reflection amplitude must lie in [0, 1], got {g}")
            }
            ChannelError::InvalidParam(name) => write!(f, "invalid parameter: {name}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ChannelError {}

/// A point in the scenario, meters. `z` is height above ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Position3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        libm::sqrt(dx * dx + dy * dy + dz * dz)
    }
}

/// Layout parameters for [`build_geometry`].
///
/// Coordinate convention: the BS sits above the origin, the user square is
/// centered on the x-axis at `bs_to_square_center`, and the RIS plane is
/// vertical and parallel to the x-axis at lateral offset
/// `sqrt(bs_ris_horizontal² - ris_offset²)`, so that the RIS center is
/// `ris_offset` from the projection of the BS onto the RIS plane while the
/// horizontal BS–RIS-center distance equals `bs_ris_horizontal`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub num_users: usize,
    pub num_bs_antennas: usize,
    pub num_elements: usize,
    /// RIS element side length `a`, meters.
    pub element_size: f64,
    pub bs_height: f64,
    pub ris_height: f64,
    /// Distance `D` from the RIS center to the BS projection on the RIS plane.
    pub ris_offset: f64,
    /// Horizontal BS to RIS-center distance.
    pub bs_ris_horizontal: f64,
    /// Side length of the square user area.
    pub square_side: f64,
    /// Horizontal distance from the BS to the center of the user area.
    pub bs_to_square_center: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            num_users: 4,
            num_bs_antennas: 10,
            num_elements: 100,
            element_size: 0.02,
            bs_height: 25.0,
            ris_height: 25.0,
            ris_offset: 50.0,
            bs_ris_horizontal: 100.0,
            square_side: 100.0,
            bs_to_square_center: 100.0,
        }
    }
}

/// Generated positions of every scenario entity.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioGeometry {
    pub bs: Position3,
    pub ris_center: Position3,
    pub ris_elements: Vec<Position3>,
    pub users: Vec<Position3>,
    /// Recorded for provenance; the math core never consumes it.
    pub num_bs_antennas: usize,
    /// Element side length, kept for the far-field check.
    pub element_size: f64,
}

impl ScenarioGeometry {
    pub fn num_elements(&self) -> usize {
        self.ris_elements.len()
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    /// BS to element-n distance `l_n`.
    pub fn bs_element_distance(&self, n: usize) -> f64 {
        self.bs.distance(&self.ris_elements[n])
    }

    /// Element-n to user-k distance `l_{n,k}`.
    pub fn element_user_distance(&self, n: usize, k: usize) -> f64 {
        self.ris_elements[n].distance(&self.users[k])
    }

    /// BS to user-k distance `d_k`.
    pub fn bs_user_distance(&self, k: usize) -> f64 {
        self.bs.distance(&self.users[k])
    }

    /// Far-field condition: every link distance dominates the array size,
    /// `min(l_n, l_{n,k}) ≥ 10·a·√N`.
    pub fn far_field_satisfied(&self) -> bool {
        let n = self.num_elements();
        let aperture = 10.0 * self.element_size * libm::sqrt(n as f64);
        for i in 0..n {
            if self.bs_element_distance(i) < aperture {
                return false;
            }
            for k in 0..self.num_users() {
                if self.element_user_distance(i, k) < aperture {
                    return false;
                }
            }
        }
        true
    }
}

fn integer_sqrt(n: usize) -> Option<usize> {
    let s = libm::sqrt(n as f64) as usize;
    (s.saturating_sub(1)..=s + 1).find(|&c| c * c == n)
}

/// Place the BS, the RIS element grid and uniformly-drawn user positions.
///
/// Deterministic given the RNG state. Fails if the element count cannot
/// form a square grid or the RIS placement is inconsistent
/// (`bs_ris_horizontal < ris_offset`).
pub fn build_geometry<R: RngCore + ?Sized>(
    config: &GeometryConfig,
    rng: &mut R,
) -> Result<ScenarioGeometry, ChannelError> {
    if config.num_users == 0 {
        return Err(ChannelError::InvalidParam("num_users"));
    }
    if config.bs_height < 0.0 || config.ris_height < 0.0 {
        return Err(ChannelError::InvalidParam("height"));
    }
    if config.square_side < 0.0
        || config.bs_to_square_center <= 0.0
        || config.element_size <= 0.0
    {
        return Err(ChannelError::InvalidParam("geometry distances"));
    }
    if config.bs_ris_horizontal < config.ris_offset {
        return Err(ChannelError::InvalidParam("bs_ris_horizontal < ris_offset"));
    }
    let side = integer_sqrt(config.num_elements)
        .ok_or(ChannelError::NonSquareGrid(config.num_elements))?;

    let bs = Position3::new(0.0, 0.0, config.bs_height);

    let lateral = libm::sqrt(
        config.bs_ris_horizontal * config.bs_ris_horizontal
            - config.ris_offset * config.ris_offset,
    );
    let ris_center = Position3::new(config.ris_offset, lateral, config.ris_height);

    // Vertical square grid in the x-z plane of the RIS, pitch = element size.
    let mut ris_elements = Vec::with_capacity(config.num_elements);
    let half = (side as f64 - 1.0) / 2.0;
    for row in 0..side {
        for col in 0..side {
            ris_elements.push(Position3::new(
                ris_center.x + (col as f64 - half) * config.element_size,
                ris_center.y,
                ris_center.z + (row as f64 - half) * config.element_size,
            ));
        }
    }

    let cx = config.bs_to_square_center;
    let mut users = Vec::with_capacity(config.num_users);
    for _ in 0..config.num_users {
        let x = cx + config.square_side * (rng::uniform(rng) - 0.5);
        let y = config.square_side * (rng::uniform(rng) - 0.5);
        users.push(Position3::new(x, y, 0.0));
    }

    Ok(ScenarioGeometry {
        bs,
        ris_center,
        ris_elements,
        users,
        num_bs_antennas: config.num_bs_antennas,
        element_size: config.element_size,
    })
}

/// Linear-scale path-loss law parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    /// Normalized factor for the direct link, linear.
    pub g: f64,
    /// Normalized factor for the reflection link, linear.
    pub g_prime: f64,
    /// Path-loss exponent.
    pub alpha: f64,
}

impl PathLossParams {
    pub fn from_db(g_db: f64, g_prime_db: f64, alpha: f64) -> Self {
        Self {
            g: libm::pow(10.0, g_db / 10.0),
            g_prime: libm::pow(10.0, g_prime_db / 10.0),
            alpha,
        }
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.g <= 0.0 || self.g_prime <= 0.0 {
            return Err(ChannelError::InvalidParam("path-loss gain"));
        }
        if self.alpha < 0.0 {
            return Err(ChannelError::InvalidParam("alpha"));
        }
        Ok(())
    }
}

/// Direct-link path loss `G·d^{-α}`.
pub fn path_loss_direct(d: f64, p: &PathLossParams) -> Result<f64, ChannelError> {
    if d <= 0.0 {
        return Err(ChannelError::NonPositiveDistance(d));
    }
    Ok(p.g * libm::pow(d, -p.alpha))
}

/// Reflection-link path loss `G'·(l_n·l_{n,k})^{-α}` (product-distance law).
pub fn path_loss_reflected(l_n: f64, l_nk: f64, p: &PathLossParams) -> Result<f64, ChannelError> {
    if l_n <= 0.0 {
        return Err(ChannelError::NonPositiveDistance(l_n));
    }
    if l_nk <= 0.0 {
        return Err(ChannelError::NonPositiveDistance(l_nk));
    }
    Ok(p.g_prime * libm::pow(l_n * l_nk, -p.alpha))
}

/// Saleh-Valenzuela arrival/decay parameters, in symbol-interval units.
///
/// Delays are modeled directly on the symbol grid: the physical propagation
/// spread is negligible against a millisecond symbol, so rates and decays
/// are expressed per symbol rather than converted from meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvFadingParams {
    /// Cluster arrival rate Λ, 1/symbol.
    pub cluster_rate: f64,
    /// Ray arrival rate λ within a cluster, 1/symbol.
    pub ray_rate: f64,
    /// Cluster power decay constant, symbols.
    pub cluster_decay: f64,
    /// Ray power decay constant, symbols.
    pub ray_decay: f64,
    /// Number of paths L for the direct link.
    pub num_paths: usize,
}

impl Default for SvFadingParams {
    fn default() -> Self {
        Self {
            cluster_rate: 0.5,
            ray_rate: 2.0,
            cluster_decay: 50.0,
            ray_decay: 50.0,
            num_paths: 100,
        }
    }
}

impl SvFadingParams {
    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.cluster_rate <= 0.0 || self.ray_rate <= 0.0 {
            return Err(ChannelError::InvalidParam("arrival rate"));
        }
        if self.cluster_decay <= 0.0 || self.ray_decay <= 0.0 {
            return Err(ChannelError::InvalidParam("decay constant"));
        }
        if self.num_paths == 0 {
            return Err(ChannelError::InvalidParam("num_paths"));
        }
        Ok(())
    }
}

/// One tap of a symbol-spaced delay line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tap {
    pub delay: usize,
    pub gain: Complex64,
}

/// A user's channel as complex gains on an integer symbol-spaced delay grid.
/// Delay bins are strictly increasing and the line holds at least one tap.
#[derive(Debug, Clone, PartialEq)]
pub struct TapDelayLine {
    pub taps: Vec<Tap>,
}

impl TapDelayLine {
    pub fn total_power(&self) -> f64 {
        self.taps.iter().map(|t| t.gain.norm_sqr()).sum()
    }

    pub fn scale(&mut self, factor: f64) {
        for t in &mut self.taps {
            t.gain *= factor;
        }
    }
}

/// Power-delay profile: `(delay_bin, variance)` pairs, variances summing
/// to one, bins strictly increasing with the earliest at zero.
pub fn sample_sv_profile<R: RngCore + ?Sized>(
    params: &SvFadingParams,
    rng: &mut R,
) -> Result<Vec<(usize, f64)>, ChannelError> {
    params.validate()?;
    let l = params.num_paths;

    // Merged event walk over the cluster and ray renewal processes: rays
    // are drawn in global time order so the first L arrivals are exact.
    struct Cluster {
        start: f64,
        next_ray: f64,
    }
    let mut clusters: Vec<Cluster> = alloc::vec![Cluster { start: 0.0, next_ray: 0.0 }];
    let mut next_cluster = rng::exponential(rng, params.cluster_rate);
    let mut arrivals: Vec<(f64, f64)> = Vec::with_capacity(l); // (time, variance)

    while arrivals.len() < l {
        let (idx, t) = clusters
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.next_ray))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if next_cluster < t {
            clusters.push(Cluster {
                start: next_cluster,
                next_ray: next_cluster,
            });
            next_cluster += rng::exponential(rng, params.cluster_rate);
            continue;
        }
        let c = &mut clusters[idx];
        let variance = libm::exp(-c.start / params.cluster_decay)
            * libm::exp(-(t - c.start) / params.ray_decay);
        arrivals.push((t, variance));
        c.next_ray = t + rng::exponential(rng, params.ray_rate);
    }

    // Quantize to integer symbol bins, merge collisions, shift to bin 0.
    let first_bin = libm::round(arrivals[0].0) as i64;
    let mut profile: Vec<(usize, f64)> = Vec::new();
    for (t, v) in arrivals {
        let bin = (libm::round(t) as i64 - first_bin).max(0) as usize;
        match profile.iter_mut().find(|(b, _)| *b == bin) {
            Some((_, var)) => *var += v,
            None => profile.push((bin, v)),
        }
    }
    profile.sort_by_key(|(b, _)| *b);

    let total: f64 = profile.iter().map(|(_, v)| v).sum();
    for (_, v) in &mut profile {
        *v /= total;
    }
    Ok(profile)
}

/// Draw one multipath realization, normalized to unit total power.
///
/// Tap gains are circularly symmetric Gaussian shaped by the
/// double-exponential decay profile, then the realization is rescaled so
/// the delivered power is exactly one; path loss alone sets the scale.
/// With `no_fading` the gains are the real positive profile amplitudes.
pub fn sample_sv_taps<R: RngCore + ?Sized>(
    params: &SvFadingParams,
    no_fading: bool,
    rng: &mut R,
) -> Result<TapDelayLine, ChannelError> {
    let profile = sample_sv_profile(params, rng)?;
    let mut taps: Vec<Tap> = profile
        .iter()
        .map(|&(delay, var)| {
            let gain = if no_fading {
                Complex64::new(libm::sqrt(var), 0.0)
            } else {
                rng::complex_normal(rng) * libm::sqrt(var)
            };
            Tap { delay, gain }
        })
        .collect();
    let power: f64 = taps.iter().map(|t| t.gain.norm_sqr()).sum();
    let norm = 1.0 / libm::sqrt(power);
    for t in &mut taps {
        t.gain *= norm;
    }
    Ok(TapDelayLine { taps })
}

/// A single reflected path contributed by one RIS element. The gain
/// excludes the `e^{-jθ_n}` phase factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectedTap {
    /// Delay in symbols after the direct-response peak; always ≥ 1, so
    /// the reflection never lands on the peak bin.
    pub delay: usize,
    pub gain: Complex64,
}

/// Assembled channels for all users: K direct delay lines plus K×N
/// single-tap reflection entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    pub direct: Vec<TapDelayLine>,
    pub reflected: Vec<Vec<ReflectedTap>>,
    /// Sampling interval for one symbol, seconds.
    pub symbol_interval: f64,
}

impl ChannelSet {
    pub fn num_users(&self) -> usize {
        self.direct.len()
    }

    pub fn num_elements(&self) -> usize {
        self.reflected.first().map_or(0, Vec::len)
    }

    /// Copy with every reflection path removed (the non-RIS scenario).
    pub fn without_ris(&self) -> ChannelSet {
        ChannelSet {
            direct: self.direct.clone(),
            reflected: self.direct.iter().map(|_| Vec::new()).collect(),
            symbol_interval: self.symbol_interval,
        }
    }
}

/// Knobs for [`assemble_channels`] beyond the geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModelConfig {
    pub path_loss: PathLossParams,
    pub sv: SvFadingParams,
    /// Reflection amplitude Γ ∈ [0, 1].
    pub reflection: f64,
    /// Substitute RIS-center distances for every element's path loss.
    pub far_field: bool,
    /// Replace all fast fading with its deterministic amplitude profile.
    pub no_fading: bool,
    /// Meters of excess path length per delay bin for reflected taps;
    /// `None` puts every reflected tap at bin 1.
    pub excess_delay_scale: Option<f64>,
    /// Symbol interval T, seconds.
    pub symbol_interval: f64,
}

impl Default for ChannelModelConfig {
    fn default() -> Self {
        Self {
            path_loss: PathLossParams::from_db(-43.0, -43.0, 2.0),
            sv: SvFadingParams::default(),
            reflection: 1.0,
            far_field: true,
            no_fading: false,
            excess_delay_scale: None,
            symbol_interval: 1e-3,
        }
    }
}

/// Build the full channel set for one realization.
///
/// Direct channels draw from `fading_rng`, reflection-path fading from
/// `reflection_rng`; keeping the streams separate pairs the direct
/// realization across runs that differ only in the RIS configuration.
pub fn assemble_channels<R1, R2>(
    geom: &ScenarioGeometry,
    cfg: &ChannelModelConfig,
    fading_rng: &mut R1,
    reflection_rng: &mut R2,
) -> Result<ChannelSet, ChannelError>
where
    R1: RngCore + ?Sized,
    R2: RngCore + ?Sized,
{
    if !(0.0..=1.0).contains(&cfg.reflection) {
        return Err(ChannelError::InvalidReflection(cfg.reflection));
    }
    cfg.path_loss.validate()?;
    if cfg.symbol_interval <= 0.0 {
        return Err(ChannelError::InvalidParam("symbol_interval"));
    }

    let k_users = geom.num_users();
    let n_elems = geom.num_elements();

    let mut direct = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let beta = path_loss_direct(geom.bs_user_distance(k), &cfg.path_loss)?;
        let mut line = sample_sv_taps(&cfg.sv, cfg.no_fading, fading_rng)?;
        line.scale(libm::sqrt(beta));
        direct.push(line);
    }

    let l_center = geom.bs.distance(&geom.ris_center);
    let mut reflected = Vec::with_capacity(k_users);
    for k in 0..k_users {
        let d_k = geom.bs_user_distance(k);
        let l_center_k = geom.ris_center.distance(&geom.users[k]);
        let mut row = Vec::with_capacity(n_elems);
        for n in 0..n_elems {
            let (l_n, l_nk) = if cfg.far_field {
                (l_center, l_center_k)
            } else {
                (
                    geom.bs_element_distance(n),
                    geom.element_user_distance(n, k),
                )
            };
            let beta = path_loss_reflected(l_n, l_nk, &cfg.path_loss)?;
            let h = if cfg.no_fading {
                Complex64::new(1.0, 0.0)
            } else {
                rng::unit_phase(reflection_rng)
            };
            let delay = match cfg.excess_delay_scale {
                None => 1,
                Some(scale) => {
                    let excess = geom.bs_element_distance(n) + geom.element_user_distance(n, k)
                        - d_k;
                    (libm::round(excess / scale) as i64).max(1) as usize
                }
            };
            row.push(ReflectedTap {
                delay,
                gain: h * (libm::sqrt(beta) * cfg.reflection),
            });
        }
        reflected.push(row);
    }

    Ok(ChannelSet {
        direct,
        reflected,
        symbol_interval: cfg.symbol_interval,
    })
}
