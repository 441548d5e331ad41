//! The delay-free limit system and its statistics.
//!
//! For each dominant root `λ` (taken with `Im λ ≥ 0`; conjugate roots are
//! pointwise conjugates and never simulated separately) the limit experiment
//! on `[0, 1]` is the integrator chain
//!
//! ```text
//! dX₀ = α·c·X_{m*} dt + dW_φ,    dX_ℓ = X_{ℓ-1} dt  (ℓ = 1..m*),
//! ```
//!
//! driven by the complex Wiener process `W_φ`, `φ = Im λ`: a real Wiener
//! process for `φ = 0` and `(Wᴿᵉ + i·Wᴵᵐ)/√2` with independent real
//! components for `φ > 0`. The coefficient `c = c_{θ,λ,m*}` comes from the
//! spectral analysis.
//!
//! The local statistics aggregate over dominant roots, counting a real root
//! once and a conjugate pair through the `2·Re(·)` doubling:
//!
//! ```text
//! Δ = Σ_λ  [2·]Re( c ∫ X_{m*} d conj(W_φ) ),
//! J = Σ_λ  [2·]|c|² ∫ |X_{m*}|² dt,
//! ```
//!
//! and the limit MLE replaces `d conj(W)` by `d conj(X₀)` in the numerator.
//! Realness of `Δ` holds by construction; the imaginary residual of the
//! real-root contributions is exposed rather than silently dropped.

use num_complex::Complex64;
use thiserror::Error;

use crate::rng::{normal_increments, SeedRecord};
use crate::spectral::RootRecord;

/// Upper bound on the Euler step for the limit system.
pub const MAX_LIMIT_DT: f64 = 0.01;

#[derive(Debug, Error)]
pub enum LimitError {
    #[error("limit-system step dt = {0} invalid; need 0 < dt ≤ {MAX_LIMIT_DT} with 1/dt integer")]
    InvalidStep(f64),
    #[error("root has no residue polynomial degree (zero polynomial)")]
    DegenerateRoot,
    #[error("root poly_degree {got:?} does not match requested m* = {want}")]
    DegreeMismatch { got: Option<usize>, want: usize },
    #[error("root must have Im λ ≥ 0; conjugates are implied")]
    NegativeFrequency,
    #[error("denominator {0:.3e} is numerically degenerate")]
    DegenerateDenominator(f64),
}

/// Discretised complex Wiener path on a uniform grid.
///
/// `frequency = 0` gives a real path; positive frequencies carry the
/// `1/√2`-normalised complex combination, so `E|ΔW|² = dt` either way. The
/// path for `−φ` is the pointwise conjugate, see [`ComplexWienerPath::conjugate`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexWienerPath {
    pub frequency: f64,
    pub dt: f64,
    pub increments: Vec<Complex64>,
    /// Cumulative values, `values[0] = 0`, length `increments.len() + 1`.
    pub values: Vec<Complex64>,
}

impl ComplexWienerPath {
    fn from_increments(frequency: f64, dt: f64, increments: Vec<Complex64>) -> Self {
        let mut values = Vec::with_capacity(increments.len() + 1);
        let mut acc = Complex64::new(0.0, 0.0);
        values.push(acc);
        for dw in &increments {
            acc += dw;
            values.push(acc);
        }
        Self { frequency, dt, increments, values }
    }

    /// The path of `W_{−φ} = conj(W_φ)`, constructed, not resimulated.
    pub fn conjugate(&self) -> Self {
        Self {
            frequency: -self.frequency,
            dt: self.dt,
            increments: self.increments.iter().map(|z| z.conj()).collect(),
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }
}

/// Simulates `W_φ` on `n_steps` cells of width `dt`. Frequencies must be
/// canonical (`φ ≥ 0`); use [`ComplexWienerPath::conjugate`] for `−φ`.
pub fn simulate_complex_wiener(
    frequency: f64,
    n_steps: usize,
    dt: f64,
    seed: SeedRecord,
) -> ComplexWienerPath {
    assert!(frequency >= 0.0, "canonical input requires φ ≥ 0");
    let mut rng = seed.rng();
    let increments: Vec<Complex64> = if frequency == 0.0 {
        normal_increments(&mut rng, n_steps, dt)
            .into_iter()
            .map(|x| Complex64::new(x, 0.0))
            .collect()
    } else {
        let re = normal_increments(&mut rng, n_steps, dt);
        let im = normal_increments(&mut rng, n_steps, dt);
        let norm = std::f64::consts::FRAC_1_SQRT_2;
        re.into_iter()
            .zip(im)
            .map(|(a, b)| Complex64::new(a * norm, b * norm))
            .collect()
    };
    ComplexWienerPath::from_increments(frequency, dt, increments)
}

/// The iterated integral `W_{φ,ℓ}(s) = (1/ℓ!) ∫₀ˢ (s−u)^ℓ dW_φ(u)` as a left
/// sum on the path's grid.
pub fn iterated_wiener(w: &ComplexWienerPath, ell: usize) -> Vec<Complex64> {
    let n = w.increments.len();
    let inv_fact = 1.0 / factorial(ell);
    let mut out = Vec::with_capacity(n + 1);
    out.push(Complex64::new(0.0, 0.0));
    for k in 1..=n {
        let s = k as f64 * w.dt;
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, dw) in w.increments[..k].iter().enumerate() {
            let u = j as f64 * w.dt;
            acc += (s - u).powi(ell as i32) * dw;
        }
        out.push(acc * inv_fact);
    }
    out
}

/// Trajectories of one dominant root's chain, with the driving noise.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSystemPath {
    pub root: RootRecord,
    pub alpha: f64,
    pub dt: f64,
    /// `trajectories[ℓ][k] = X_ℓ(t_k)` for `ℓ = 0..=m*`.
    pub trajectories: Vec<Vec<Complex64>>,
    pub wiener: ComplexWienerPath,
}

impl LimitSystemPath {
    pub fn m_star(&self) -> usize {
        self.trajectories.len() - 1
    }

    fn top_coeff(&self) -> Complex64 {
        self.root.coeffs[self.m_star()]
    }
}

/// Euler simulation of the limit chain on `[0, 1]`.
///
/// The root must carry `poly_degree = m_star` and the coefficient
/// `coeffs[m_star]`; the driving frequency is `Im λ ≥ 0`.
pub fn simulate_limit_system(
    root: &RootRecord,
    m_star: usize,
    alpha: f64,
    dt: f64,
    seed: SeedRecord,
) -> Result<LimitSystemPath, LimitError> {
    let n_steps = check_grid(dt)?;
    check_root(root, m_star)?;
    let wiener = simulate_complex_wiener(root.lambda.im, n_steps, dt, seed);
    Ok(drive_chain(root, m_star, alpha, &wiener, None))
}

/// Test-mode variant driven by a prepared noise path, optionally starting
/// from a nonzero state (deterministic "kick" experiments).
pub fn simulate_limit_system_driven(
    root: &RootRecord,
    m_star: usize,
    alpha: f64,
    wiener: &ComplexWienerPath,
    initial: Option<&[Complex64]>,
) -> Result<LimitSystemPath, LimitError> {
    check_root(root, m_star)?;
    if let Some(init) = initial {
        if init.len() != m_star + 1 {
            return Err(LimitError::DegreeMismatch {
                got: Some(init.len().saturating_sub(1)),
                want: m_star,
            });
        }
    }
    Ok(drive_chain(root, m_star, alpha, wiener, initial))
}

fn check_grid(dt: f64) -> Result<usize, LimitError> {
    if !(dt > 0.0 && dt <= MAX_LIMIT_DT) {
        return Err(LimitError::InvalidStep(dt));
    }
    let steps_f = 1.0 / dt;
    let steps = steps_f.round();
    if (steps_f - steps).abs() > 1e-9 {
        return Err(LimitError::InvalidStep(dt));
    }
    Ok(steps as usize)
}

fn check_root(root: &RootRecord, m_star: usize) -> Result<(), LimitError> {
    if root.lambda.im < 0.0 {
        return Err(LimitError::NegativeFrequency);
    }
    match root.poly_degree {
        None => Err(LimitError::DegenerateRoot),
        Some(d) if d != m_star || root.coeffs.len() <= m_star => {
            Err(LimitError::DegreeMismatch { got: root.poly_degree, want: m_star })
        }
        Some(_) => Ok(()),
    }
}

fn drive_chain(
    root: &RootRecord,
    m_star: usize,
    alpha: f64,
    wiener: &ComplexWienerPath,
    initial: Option<&[Complex64]>,
) -> LimitSystemPath {
    let c = root.coeffs[m_star];
    let dt = wiener.dt;
    let n = wiener.increments.len();
    let zero = Complex64::new(0.0, 0.0);
    let mut state: Vec<Complex64> = match initial {
        Some(init) => init.to_vec(),
        None => vec![zero; m_star + 1],
    };
    let mut trajectories: Vec<Vec<Complex64>> = (0..=m_star)
        .map(|ell| {
            let mut v = Vec::with_capacity(n + 1);
            v.push(state[ell]);
            v
        })
        .collect();
    for k in 0..n {
        // Read the time-t state before any update touches it.
        let drift = alpha * c * state[m_star] * dt + wiener.increments[k];
        for ell in (1..=m_star).rev() {
            let prev = state[ell - 1];
            state[ell] += prev * dt;
        }
        state[0] += drift;
        for (ell, traj) in trajectories.iter_mut().enumerate() {
            traj.push(state[ell]);
        }
    }
    LimitSystemPath {
        root: root.clone(),
        alpha,
        dt,
        trajectories,
        wiener: wiener.clone(),
    }
}

/// The aggregated limit statistics `(Δ, J)` with the imaginary residual of
/// the real-root contributions exposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitStats {
    pub delta: f64,
    pub j: f64,
    pub delta_imag: f64,
}

/// `(Δ^{(α)}, J^{(α)})` over a family of dominant-root paths (`Im λ ≥ 0`,
/// independently seeded). Real roots contribute once, conjugate pairs through
/// the `2·Re(·)` doubling.
pub fn limit_delta_j(paths: &[LimitSystemPath]) -> LimitStats {
    let mut delta = 0.0;
    let mut j = 0.0;
    let mut delta_imag = 0.0;
    for path in paths {
        let (num, den) = score_terms(path, &path.wiener.increments);
        if path.root.lambda.im == 0.0 {
            delta += num.re;
            delta_imag += num.im;
        } else {
            delta += 2.0 * num.re;
        }
        j += pair_weight(path) * den;
    }
    LimitStats { delta, j, delta_imag }
}

/// Log-likelihood ratio of the limit experiment,
/// `(α' − α)·Δ − ½(α' − α)²·J` with `(Δ, J)` from [`limit_delta_j`].
pub fn limit_loglik_ratio(paths: &[LimitSystemPath], alpha: f64, alpha_prime: f64) -> f64 {
    let stats = limit_delta_j(paths);
    let h = alpha_prime - alpha;
    h * stats.delta - 0.5 * h * h * stats.j
}

/// The limit MLE together with the imaginary residual of its numerator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitMle {
    pub alpha_hat: f64,
    pub imag_residual: f64,
}

/// MLE of `α` from observed limit trajectories:
/// `α̂ = Σ [2·]Re(c ∫ X_{m*} d conj(X₀)) / Σ [2·]|c|² ∫ |X_{m*}|² dt`.
///
/// Satisfies `α̂ − α = Δ/J` exactly (up to float reordering) against
/// [`limit_delta_j`] evaluated on the same paths.
pub fn limit_mle_alpha(paths: &[LimitSystemPath]) -> Result<LimitMle, LimitError> {
    let mut num = 0.0;
    let mut num_imag = 0.0;
    let mut den = 0.0;
    for path in paths {
        let x0 = &path.trajectories[0];
        let dx0: Vec<Complex64> = x0.windows(2).map(|w| w[1] - w[0]).collect();
        let (n, d) = score_terms(path, &dx0);
        if path.root.lambda.im == 0.0 {
            num += n.re;
            num_imag += n.im;
        } else {
            num += 2.0 * n.re;
        }
        den += pair_weight(path) * d;
    }
    if den <= 1e-12 {
        return Err(LimitError::DegenerateDenominator(den));
    }
    Ok(LimitMle { alpha_hat: num / den, imag_residual: num_imag })
}

fn pair_weight(path: &LimitSystemPath) -> f64 {
    if path.root.lambda.im == 0.0 {
        1.0
    } else {
        2.0
    }
}

/// Left-sum pair `(c·Σ X_{m*} conj(ΔG), |c|²·Σ |X_{m*}|² dt)` for a path.
fn score_terms(path: &LimitSystemPath, dg: &[Complex64]) -> (Complex64, f64) {
    let x = &path.trajectories[path.m_star()];
    let c = path.top_coeff();
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = 0.0;
    for (k, d) in dg.iter().enumerate() {
        num += x[k] * d.conj();
        den += x[k].norm_sqr() * path.dt;
    }
    (c * num, c.norm_sqr() * den)
}

/// Real 2-vector embedding `Φ(z) = (Re z, Im z)ᵀ` of a complex number.
pub fn phi_embed(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Real 2×2 embedding `Ψ(z)` of complex multiplication:
/// `Ψ(z)·Φ(w) = Φ(z·w)`.
pub fn psi_embed(z: Complex64) -> [[f64; 2]; 2] {
    [[z.re, -z.im], [z.im, z.re]]
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}
