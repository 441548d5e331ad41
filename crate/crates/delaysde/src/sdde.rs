//! Euler–Maruyama simulation of the delay equation and the discrete
//! stochastic integrals built from its paths.
//!
//! The noise is additive, so the Euler scheme is also the Milstein scheme.
//! All stochastic integrals use left-endpoint (Itô) sums; trapezoid rules are
//! reserved for the `du`-integration inside the delayed functional, where the
//! integrand is a deterministic function of the frozen path.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::SignedMeasure;
use crate::rng::{normal_increments, SeedRecord};
use crate::spectral::CharacteristicModel;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("horizon T = {0} must be positive")]
    InvalidHorizon(f64),
    #[error("step hint dt = {dt} invalid; need 0 < dt ≤ r = {delay_r}")]
    InvalidStep { dt: f64, delay_r: f64 },
    #[error("T = {horizon} is not an integer multiple of the adjusted dt = {dt}")]
    GridAlignment { horizon: f64, dt: f64 },
    #[error("tabulated initial segment has {got} values, the grid needs {want}")]
    SegmentLength { got: usize, want: usize },
    #[error("integrand and increment lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Deterministic initial segment `X₀` on `[-r, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum InitialSegment {
    /// `X₀ ≡ value`.
    Constant { value: f64 },
    /// `X₀(t) = Σ_j coeffs[j] tʲ` for `t ∈ [-r, 0]`.
    Polynomial { coeffs: Vec<f64> },
    /// Tabulated grid values on `[-r, 0]`, length `r/dt + 1`.
    Grid { values: Vec<f64> },
}

impl Default for InitialSegment {
    fn default() -> Self {
        InitialSegment::Constant { value: 0.0 }
    }
}

impl InitialSegment {
    fn sample(&self, delay_steps: usize, dt: f64, delay_r: f64) -> Result<Vec<f64>, SimError> {
        match self {
            InitialSegment::Constant { value } => Ok(vec![*value; delay_steps + 1]),
            InitialSegment::Polynomial { coeffs } => Ok((0..=delay_steps)
                .map(|i| {
                    let t = i as f64 * dt - delay_r;
                    coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
                })
                .collect()),
            InitialSegment::Grid { values } => {
                if values.len() != delay_steps + 1 {
                    return Err(SimError::SegmentLength {
                        got: values.len(),
                        want: delay_steps + 1,
                    });
                }
                Ok(values.clone())
            }
        }
    }
}

/// A simulated trajectory on the uniform grid covering `[-r, T]`.
///
/// `history` holds the `r/dt + 1` values on `[-r, 0]`, `values` the
/// `T/dt + 1` values on `[0, T]`; the two share the value at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePath {
    pub dt: f64,
    pub horizon: f64,
    pub history: Vec<f64>,
    pub values: Vec<f64>,
    /// Wiener increments per step, when retained.
    pub noise: Option<Vec<f64>>,
    /// Seed used for generation; `None` for externally driven paths.
    pub seed: Option<SeedRecord>,
}

impl SamplePath {
    /// Number of Euler steps on `[0, T]`.
    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    /// Number of grid cells covering the delay interval.
    pub fn delay_steps(&self) -> usize {
        self.history.len() - 1
    }

    /// Path value at a signed grid index in `[-delay_steps, steps]`;
    /// negative indices read the history segment.
    pub fn x_at(&self, idx: i64) -> f64 {
        if idx < 0 {
            self.history[(idx + self.delay_steps() as i64) as usize]
        } else {
            self.values[idx as usize]
        }
    }
}

/// Rounds the step hint down onto a grid commensurate with `r`, then checks
/// that `T` lands on the same grid.
fn align_grid(delay_r: f64, horizon: f64, dt_hint: f64) -> Result<(f64, usize, usize), SimError> {
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(SimError::InvalidHorizon(horizon));
    }
    if !(dt_hint.is_finite() && dt_hint > 0.0 && dt_hint <= delay_r * (1.0 + 1e-12)) {
        return Err(SimError::InvalidStep { dt: dt_hint, delay_r });
    }
    let delay_steps = (delay_r / dt_hint - 1e-9).ceil().max(1.0) as usize;
    let dt = delay_r / delay_steps as f64;
    let steps_f = horizon / dt;
    let steps = steps_f.round();
    if (steps_f - steps).abs() > 1e-9 || steps < 1.0 {
        return Err(SimError::GridAlignment { horizon, dt });
    }
    Ok((dt, delay_steps, steps as usize))
}

/// Simulates the delay equation by Euler–Maruyama:
/// `X(t+dt) = X(t) + θ·Y(t)·dt + ΔW`, `ΔW ~ N(0, dt)`, with
/// `Y(t) = ∫ X(t+u) a(du)`. Deterministic given the seed record.
pub fn simulate_sdde(
    model: &CharacteristicModel,
    x0: &InitialSegment,
    horizon: f64,
    dt_hint: f64,
    seed: SeedRecord,
) -> Result<SamplePath, SimError> {
    let (dt, delay_steps, steps) = align_grid(model.measure.delay_r(), horizon, dt_hint)?;
    let mut rng = seed.rng();
    let increments = normal_increments(&mut rng, steps, dt);
    let mut path = drive(model, x0, horizon, dt, delay_steps, steps, &increments)?;
    path.seed = Some(seed);
    Ok(path)
}

/// Test-mode variant of [`simulate_sdde`] that consumes an externally
/// supplied increment sequence instead of drawing from the generator.
pub fn simulate_sdde_driven(
    model: &CharacteristicModel,
    x0: &InitialSegment,
    horizon: f64,
    dt_hint: f64,
    increments: &[f64],
) -> Result<SamplePath, SimError> {
    let (dt, delay_steps, steps) = align_grid(model.measure.delay_r(), horizon, dt_hint)?;
    if increments.len() != steps {
        return Err(SimError::LengthMismatch(increments.len(), steps));
    }
    drive(model, x0, horizon, dt, delay_steps, steps, increments)
}

fn drive(
    model: &CharacteristicModel,
    x0: &InitialSegment,
    horizon: f64,
    dt: f64,
    delay_steps: usize,
    steps: usize,
    increments: &[f64],
) -> Result<SamplePath, SimError> {
    let history = x0.sample(delay_steps, dt, model.measure.delay_r())?;
    let mut values = Vec::with_capacity(steps + 1);
    values.push(history[delay_steps]);
    for (k, &dw) in increments.iter().enumerate() {
        let y = delayed_value(&history, &values, delay_steps, dt, &model.measure, k);
        let x = values[k];
        values.push(x + model.theta * y * dt + dw);
    }
    Ok(SamplePath {
        dt,
        horizon,
        history,
        values,
        noise: Some(increments.to_vec()),
        seed: None,
    })
}

/// The delayed functional `Y(t_k) = ∫_[-r,0] X(t_k + u) a(du)` on the grid.
///
/// Atoms read the path at `t_k + u`, linearly interpolated when off-grid;
/// density pieces are integrated by the trapezoid rule on the grid restricted
/// to the piece.
pub fn delayed_functional(path: &SamplePath, a: &SignedMeasure, k: usize) -> f64 {
    delayed_value(&path.history, &path.values, path.delay_steps(), path.dt, a, k)
}

fn delayed_value(
    history: &[f64],
    values: &[f64],
    delay_steps: usize,
    dt: f64,
    a: &SignedMeasure,
    k: usize,
) -> f64 {
    let x_at = |idx: i64| -> f64 {
        if idx < 0 {
            history[(idx + delay_steps as i64) as usize]
        } else {
            values[idx as usize]
        }
    };
    // Position p counts grid cells relative to t = 0; valid range [k - n_r, k].
    let x_interp = |p: f64| -> f64 {
        let i0 = p.floor();
        let frac = p - i0;
        let i0 = i0 as i64;
        if frac <= 1e-9 {
            x_at(i0)
        } else if frac >= 1.0 - 1e-9 {
            x_at(i0 + 1)
        } else {
            (1.0 - frac) * x_at(i0) + frac * x_at(i0 + 1)
        }
    };
    let mut y = 0.0;
    for atom in a.atoms() {
        y += atom.weight * x_interp(k as f64 + atom.location / dt);
    }
    for piece in a.density_pieces() {
        if piece.hi <= piece.lo {
            continue;
        }
        let p_lo = k as f64 + piece.lo / dt;
        let p_hi = k as f64 + piece.hi / dt;
        // Panel nodes: the piece endpoints plus every interior grid point.
        let mut prev_p = p_lo;
        let mut prev_f = piece.eval(piece.lo) * x_interp(p_lo);
        let mut idx = (p_lo + 1e-9).floor() as i64 + 1;
        loop {
            let p = idx as f64;
            let (p, last) = if p >= p_hi - 1e-9 { (p_hi, true) } else { (p, false) };
            let u = (p - k as f64) * dt;
            let f = piece.eval(u) * x_interp(p);
            y += 0.5 * (p - prev_p) * dt * (prev_f + f);
            if last {
                break;
            }
            prev_p = p;
            prev_f = f;
            idx += 1;
        }
    }
    y
}

/// Left-endpoint (Itô) sum `Σ f(t_k) ΔG_k`.
pub fn ito_integral(f: &[f64], increments: &[f64]) -> Result<f64, SimError> {
    if f.len() != increments.len() {
        return Err(SimError::LengthMismatch(f.len(), increments.len()));
    }
    Ok(f.iter().zip(increments).map(|(a, b)| a * b).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::DensityPiece;
    use crate::SignedMeasure;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn dirac0_model(theta: f64) -> CharacteristicModel {
        CharacteristicModel::new(SignedMeasure::from_atoms(1.0, &[(0.0, 1.0)]).unwrap(), theta)
    }

    #[test]
    fn zero_drift_is_cumulative_noise() {
        let model = dirac0_model(0.0);
        let seed = SeedRecord::root(11);
        let path = simulate_sdde(&model, &InitialSegment::default(), 2.0, 0.01, seed).unwrap();
        let noise = path.noise.as_ref().unwrap();
        let mut acc = 0.0;
        for (k, dw) in noise.iter().enumerate() {
            acc += dw;
            assert_eq!(path.values[k + 1], acc, "cumulative sum must be exact");
        }
    }

    #[test]
    fn dirac0_equals_ou_recursion() {
        let model = dirac0_model(-0.7);
        let seed = SeedRecord::root(5);
        let path = simulate_sdde(&model, &InitialSegment::Constant { value: 1.0 }, 3.0, 0.01, seed)
            .unwrap();
        let noise = path.noise.clone().unwrap();
        let mut x = 1.0;
        for (k, dw) in noise.iter().enumerate() {
            x = x + model.theta * x * path.dt + dw;
            assert!((path.values[k + 1] - x).abs() <= 1e-12);
        }
    }

    #[test]
    fn hand_euler_step_with_delay() {
        // a = δ₋₁, θ = -π/2, X₀ ≡ 1, forced zero noise, dt = 0.5:
        // X(0.5) = 1 + (-π/2)(1)(0.5) = 1 - π/4.
        let model = CharacteristicModel::new(
            SignedMeasure::from_atoms(1.0, &[(-1.0, 1.0)]).unwrap(),
            -FRAC_PI_2,
        );
        let zeros = vec![0.0; 2];
        let path =
            simulate_sdde_driven(&model, &InitialSegment::Constant { value: 1.0 }, 1.0, 0.5, &zeros)
                .unwrap();
        assert_relative_eq!(path.values[1], 1.0 - FRAC_PI_4, epsilon = 1e-15);
    }

    #[test]
    fn grid_alignment() {
        let model = dirac0_model(0.0);
        // dt hint 0.3 rounds down to 0.25 so that r = 1 stays on-grid.
        let path = simulate_sdde(
            &model,
            &InitialSegment::default(),
            1.0,
            0.3,
            SeedRecord::root(0),
        )
        .unwrap();
        assert_relative_eq!(path.dt, 0.25);
        // T = 0.9 cannot land on that grid.
        let err = simulate_sdde(
            &model,
            &InitialSegment::default(),
            0.9,
            0.3,
            SeedRecord::root(0),
        );
        assert!(matches!(err, Err(SimError::GridAlignment { .. })));
        // dt hints above r are rejected.
        let err = simulate_sdde(
            &model,
            &InitialSegment::default(),
            4.0,
            2.0,
            SeedRecord::root(0),
        );
        assert!(matches!(err, Err(SimError::InvalidStep { .. })));
    }

    #[test]
    fn delayed_functional_examples() {
        let seed = SeedRecord::root(3);
        let measure = SignedMeasure::from_atoms(1.0, &[(0.0, 1.0)]).unwrap();
        let model = CharacteristicModel::new(measure.clone(), 0.4);
        let path = simulate_sdde(&model, &InitialSegment::default(), 1.0, 0.1, seed).unwrap();
        // δ₀ reads the current state
        for k in 0..=path.steps() {
            assert_eq!(delayed_functional(&path, &measure, k), path.values[k]);
        }
        // atom sum with delay
        let two_atoms = SignedMeasure::from_atoms(1.0, &[(0.0, 1.0), (-1.0, 2.0)]).unwrap();
        let k = path.steps();
        let expect = path.values[k] + 2.0 * path.x_at(k as i64 - path.delay_steps() as i64);
        assert_relative_eq!(delayed_functional(&path, &two_atoms, k), expect, epsilon = 1e-14);
        // constant path against the uniform density: Y = c·r
        let density = SignedMeasure::uniform(1.0, 1.0).unwrap();
        let const_path = simulate_sdde_driven(
            &CharacteristicModel::new(density.clone(), 0.0),
            &InitialSegment::Constant { value: 3.0 },
            1.0,
            0.1,
            &vec![0.0; 10],
        )
        .unwrap();
        for k in 0..=const_path.steps() {
            assert_relative_eq!(
                delayed_functional(&const_path, &density, k),
                3.0,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn delayed_functional_interpolates_off_grid_atoms() {
        // atom at u = -0.05 with dt = 0.1: halfway between grid points
        let measure = SignedMeasure::from_atoms(1.0, &[(-0.05, 1.0)]).unwrap();
        let model = CharacteristicModel::new(measure.clone(), 0.0);
        let path = simulate_sdde(&model, &InitialSegment::default(), 1.0, 0.1, SeedRecord::root(9))
            .unwrap();
        let k = 5;
        let expect = 0.5 * (path.values[k] + path.values[k - 1]);
        assert_relative_eq!(delayed_functional(&path, &measure, k), expect, epsilon = 1e-12);
    }

    #[test]
    fn delayed_functional_linear_in_measure_and_path() {
        let m1 = SignedMeasure::from_atoms(1.0, &[(-0.4, 1.5)]).unwrap();
        let m2 = SignedMeasure::new(
            1.0,
            vec![],
            vec![DensityPiece { lo: -0.8, hi: -0.1, coeffs: vec![1.0, -0.5] }],
        )
        .unwrap();
        let merged = SignedMeasure::new(
            1.0,
            m1.atoms().to_vec(),
            m2.density_pieces().to_vec(),
        )
        .unwrap();
        let model = CharacteristicModel::new(merged.clone(), 0.3);
        let path =
            simulate_sdde(&model, &InitialSegment::default(), 2.0, 0.05, SeedRecord::root(17))
                .unwrap();
        for k in [0, 7, path.steps()] {
            let lhs = delayed_functional(&path, &merged, k);
            let rhs = delayed_functional(&path, &m1, k) + delayed_functional(&path, &m2, k);
            assert_relative_eq!(lhs, rhs, epsilon = 1e-13);
        }
    }

    #[test]
    fn ito_integral_examples() {
        // constant integrand telescopes
        let dg = [0.5, -0.25, 1.0];
        let f = [1.0, 1.0, 1.0];
        assert_relative_eq!(ito_integral(&f, &dg).unwrap(), 1.25);
        // Riemann limit of ∫ t dt over [0, 1]
        for n in [100usize, 1000] {
            let dt = 1.0 / n as f64;
            let t: Vec<f64> = (0..n).map(|k| k as f64 * dt).collect();
            let dg = vec![dt; n];
            let sum = ito_integral(&t, &dg).unwrap();
            assert!((sum - 0.5).abs() < dt, "n = {n}");
        }
        assert!(matches!(
            ito_integral(&[1.0], &[1.0, 2.0]),
            Err(SimError::LengthMismatch(..))
        ));
    }

    #[test]
    fn ito_isometry_first_order_decay() {
        // E|Σ W ΔW − (W(T)² − T)/2|² = T·dt/2, so halving dt by 10 divides
        // the mean square error by 10.
        let mse = |dt: f64, seeds: u64| -> f64 {
            let n = (1.0 / dt) as usize;
            let mut total = 0.0;
            for s in 0..seeds {
                let mut rng = SeedRecord::new(100 + s, 0, 0).rng();
                let dw = normal_increments(&mut rng, n, dt);
                let mut w = vec![0.0; n];
                for k in 1..n {
                    w[k] = w[k - 1] + dw[k - 1];
                }
                let wt = w[n - 1] + dw[n - 1];
                let err = ito_integral(&w, &dw).unwrap() - (wt * wt - 1.0) / 2.0;
                total += err * err;
            }
            total / seeds as f64
        };
        let e3 = mse(1e-3, 200);
        let e4 = mse(1e-4, 200);
        let ratio = e3 / e4;
        assert!((5.0..20.0).contains(&ratio), "MSE ratio {ratio} outside [5, 20]");
    }

    #[test]
    fn refinement_halves_error_linearly() {
        // Couple a path at dt with a path at dt/2 by aggregating the fine
        // noise; the gap at T decays like O(dt) for the stable model.
        let model = dirac0_model(-1.0);
        let mean_gap = |dt: f64| -> f64 {
            let reps = 200;
            let mut total = 0.0;
            for rep in 0..reps {
                let seed = SeedRecord::new(2024, SeedRecord::stream_id(9, 0), rep);
                let mut rng = seed.rng();
                let fine_n = (1.0 / (dt / 2.0)) as usize;
                let fine = normal_increments(&mut rng, fine_n, dt / 2.0);
                let coarse: Vec<f64> = fine.chunks(2).map(|c| c[0] + c[1]).collect();
                let pc = simulate_sdde_driven(
                    &model,
                    &InitialSegment::Constant { value: 1.0 },
                    1.0,
                    dt,
                    &coarse,
                )
                .unwrap();
                let pf = simulate_sdde_driven(
                    &model,
                    &InitialSegment::Constant { value: 1.0 },
                    1.0,
                    dt / 2.0,
                    &fine,
                )
                .unwrap();
                total += (pc.values[pc.steps()] - pf.values[pf.steps()]).abs();
            }
            total / reps as f64
        };
        let gaps: Vec<f64> = [0.02, 0.01, 0.005].iter().map(|&dt| mean_gap(dt)).collect();
        // log-log slope over the three refinements
        let slope = (gaps[0] / gaps[2]).ln() / 4.0f64.ln();
        assert!(
            (0.7..=1.3).contains(&slope),
            "refinement slope {slope} outside [0.7, 1.3]; gaps {gaps:?}"
        );
    }

    #[test]
    fn polynomial_and_grid_segments() {
        let model = dirac0_model(0.0);
        let seg = InitialSegment::Polynomial { coeffs: vec![1.0, 2.0] }; // 1 + 2t
        let path = simulate_sdde(&model, &seg, 1.0, 0.5, SeedRecord::root(1)).unwrap();
        assert_relative_eq!(path.history[0], -1.0); // t = -1
        assert_relative_eq!(path.history[1], 0.0); // t = -0.5
        assert_relative_eq!(path.history[2], 1.0); // t = 0
        assert_eq!(path.values[0], 1.0);

        let bad = InitialSegment::Grid { values: vec![0.0; 4] };
        assert!(matches!(
            simulate_sdde(&model, &bad, 1.0, 0.5, SeedRecord::root(1)),
            Err(SimError::SegmentLength { .. })
        ));
    }
}
