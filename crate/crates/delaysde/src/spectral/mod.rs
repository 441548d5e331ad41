//! Characteristic function of the delay equation and its spectral data.
//!
//! For a model `(a, θ)` the characteristic function is
//!
//! ```text
//! h_θ(λ) = λ − θ ∫_[-r,0] e^{λu} a(du),
//! ```
//!
//! whose zeros drive the asymptotics of the solution. Each root `λ` of
//! multiplicity `m` carries residue coefficients
//!
//! ```text
//! c_{θ,λ,ℓ} = ∫_[-r,0] Res_{z=λ} [ (z−λ)^ℓ e^{zu} / h_θ(z) ] a(du),   ℓ < m,
//! ```
//!
//! the coefficients of a polynomial whose degree `m̃(λ)` (−∞ for the zero
//! polynomial) decides whether the root participates in the classification
//!
//! ```text
//! v* = sup { Re λ : m̃(λ) ≥ 0 },    m* = max { m̃(λ) : Re λ = v* }.
//! ```
//!
//! `v* = 0` is the unstable case: likelihood statistics scaled by
//! `r_{θ,T} = T^{−m*−1}` converge, and the dominant roots (those on the
//! critical line with `m̃ = m*`) parametrise the limit system.
//!
//! All operations are pure functions of immutable inputs.

mod search;

pub use search::{CertifiedRoot, Region, RootSearch, RootSearchConfig};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::measure::{MeasureError, SignedMeasure};

/// Roots whose real parts differ by at most this are treated as lying on a
/// common vertical line when computing `v*` and `m*`.
pub const REAL_PART_GROUP_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("root search exceeded its evaluation budget after {0} evaluations")]
    RegionTooLarge(usize),
    #[error("root search failed to converge: {0}")]
    NonConvergence(String),
    #[error("boundary winding {expected} does not match certified multiplicities {found}")]
    WindingMismatch { expected: i64, found: i64 },
    #[error("|h^({multiplicity})(λ)|/{multiplicity}! = {value:.3e} is below tolerance; multiplicity inconsistent")]
    InconsistentMultiplicity { multiplicity: usize, value: f64 },
    #[error("coefficient index {ell} out of range for a root of multiplicity {multiplicity}")]
    CoeffOrderOutOfRange { ell: usize, multiplicity: usize },
}

/// The pair `(a, θ)` defining one delay equation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacteristicModel {
    pub measure: SignedMeasure,
    pub theta: f64,
}

impl CharacteristicModel {
    pub fn new(measure: SignedMeasure, theta: f64) -> Self {
        Self { measure, theta }
    }

    /// `h_θ(λ) = λ − θ ∫ e^{λu} a(du)`.
    pub fn char_eval(&self, lambda: Complex64) -> Complex64 {
        let moment = self
            .measure
            .exp_moment(lambda, 0)
            .expect("order 0 is always within the cap");
        lambda - self.theta * moment
    }

    /// Exact `k`-th derivative of `h_θ`, via differentiation under the
    /// integral: `h' = 1 − θ ∫ u e^{λu} a(du)` and
    /// `h^{(k)} = −θ ∫ uᵏ e^{λu} a(du)` for `k ≥ 2`.
    pub fn char_derivative(&self, lambda: Complex64, k: usize) -> Result<Complex64, SpectralError> {
        assert!(k >= 1, "derivative order must be at least 1");
        let moment = self.measure.exp_moment(lambda, k)?;
        if k == 1 {
            Ok(Complex64::new(1.0, 0.0) - self.theta * moment)
        } else {
            Ok(-self.theta * moment)
        }
    }
}

/// One characteristic root with its residue data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub lambda: Complex64,
    /// Order of `λ` as a zero of `h_θ`.
    pub multiplicity: usize,
    /// `c_{θ,λ,ℓ}` for `ℓ = 0, …, multiplicity − 1`.
    pub coeffs: Vec<Complex64>,
    /// Degree of the residue polynomial; `None` encodes −∞ (zero polynomial).
    pub poly_degree: Option<usize>,
}

/// Stability classification of a model over a search region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Stable,
    Unstable,
    Explosive,
    Degenerate,
}

/// Output of [`classify`]: the classification `(v*, m*)`, the dominant roots
/// (reported for `Im λ ≥ 0` only, conjugates implied), and every root found
/// in the region. `v_star = None` encodes −∞.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub v_star: Option<f64>,
    pub m_star: Option<usize>,
    pub dominant_roots: Vec<RootRecord>,
    pub regime: Regime,
    pub search_region: Region,
    /// Every root in the region (both half planes), sorted by `(Re, Im)`.
    pub roots: Vec<RootRecord>,
    /// Boundary winding count of the searched region; callers compare it with
    /// the number of returned roots to detect truncation.
    pub winding_count: i64,
}

/// All zeros of `h_θ` in `region` with multiplicities, certified by the
/// argument principle. See [`RootSearchConfig`] for tuning.
pub fn find_roots(
    model: &CharacteristicModel,
    region: Region,
    config: &RootSearchConfig,
) -> Result<RootSearch, SpectralError> {
    search::find_roots(model, region, config)
}

/// The residue coefficient `c_{θ,λ,ℓ}` of a certified root `(λ, m)`.
///
/// Expands `h_θ(z) = Σ_{k≥m} h_k (z−λ)ᵏ` with `h_k = h^{(k)}(λ)/k!`, inverts
/// the unit part as a truncated power series and reads the residue off the
/// coefficient of `(z−λ)^{m−ℓ−1}`; the `u`-dependence integrates against `a`
/// through exact exponential moments. For a simple root this reduces to
/// `∫ e^{λu} a(du) / h'(λ)`.
pub fn residue_coeff(
    model: &CharacteristicModel,
    lambda: Complex64,
    multiplicity: usize,
    ell: usize,
) -> Result<Complex64, SpectralError> {
    if ell >= multiplicity {
        return Err(SpectralError::CoeffOrderOutOfRange { ell, multiplicity });
    }
    let order = multiplicity - 1 - ell;
    // Taylor coefficients h_{m+j}, j = 0..=order.
    let mut unit = Vec::with_capacity(order + 1);
    for j in 0..=order {
        let k = multiplicity + j;
        unit.push(model.char_derivative(lambda, k)? / factorial(k));
    }
    let lead = unit[0].norm();
    if lead <= 1e-8 * (1.0 + model.theta.abs()) {
        return Err(SpectralError::InconsistentMultiplicity {
            multiplicity,
            value: lead,
        });
    }
    // Reciprocal series of the unit part to the required order.
    let mut recip = vec![Complex64::new(0.0, 0.0); order + 1];
    recip[0] = 1.0 / unit[0];
    for n in 1..=order {
        let mut s = Complex64::new(0.0, 0.0);
        for j in 1..=n {
            s += unit[j] * recip[n - j];
        }
        recip[n] = -s / unit[0];
    }
    // c = Σ_j recip[order−j]/j! · ∫ uʲ e^{λu} a(du).
    let mut c = Complex64::new(0.0, 0.0);
    for j in 0..=order {
        let moment = model.measure.exp_moment(lambda, j)?;
        c += recip[order - j] * moment / factorial(j);
    }
    Ok(c)
}

/// Builds the full [`RootRecord`] (coefficients and residue-polynomial
/// degree) for a certified root.
pub fn root_record(
    model: &CharacteristicModel,
    root: &CertifiedRoot,
) -> Result<RootRecord, SpectralError> {
    let mut coeffs = Vec::with_capacity(root.multiplicity);
    for ell in 0..root.multiplicity {
        coeffs.push(residue_coeff(model, root.lambda, root.multiplicity, ell)?);
    }
    let tol = 1e-10 * (1.0 + model.theta.abs());
    let poly_degree = coeffs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > tol)
        .map(|(ell, _)| ell)
        .max();
    Ok(RootRecord {
        lambda: root.lambda,
        multiplicity: root.multiplicity,
        coeffs,
        poly_degree,
    })
}

/// Full spectral classification over `region`: locates roots, computes their
/// residue data and derives `(v*, m*)`, the regime label and the dominant
/// roots.
pub fn classify(
    model: &CharacteristicModel,
    region: Region,
    config: &RootSearchConfig,
) -> Result<SpectralSummary, SpectralError> {
    let search = find_roots(model, region, config)?;
    let mut records: Vec<RootRecord> = Vec::with_capacity(search.roots.len());
    for root in &search.roots {
        if root.lambda.im < 0.0 {
            continue;
        }
        records.push(root_record(model, root)?);
    }
    // Conjugate roots carry conjugate data; fill the lower half plane from
    // the computed upper-half records.
    let mut all: Vec<RootRecord> = Vec::new();
    for rec in &records {
        all.push(rec.clone());
        if rec.lambda.im > 0.0 {
            all.push(RootRecord {
                lambda: rec.lambda.conj(),
                multiplicity: rec.multiplicity,
                coeffs: rec.coeffs.iter().map(|c| c.conj()).collect(),
                poly_degree: rec.poly_degree,
            });
        }
    }
    all.sort_by(|a, b| {
        (a.lambda.re, a.lambda.im)
            .partial_cmp(&(b.lambda.re, b.lambda.im))
            .expect("finite roots")
    });

    let v_star_raw = records
        .iter()
        .filter(|r| r.poly_degree.is_some())
        .map(|r| r.lambda.re)
        .fold(f64::NEG_INFINITY, f64::max);
    if v_star_raw == f64::NEG_INFINITY {
        return Ok(SpectralSummary {
            v_star: None,
            m_star: None,
            dominant_roots: Vec::new(),
            regime: Regime::Degenerate,
            search_region: search.region,
            roots: all,
            winding_count: search.winding_count,
        });
    }
    // Roots within the grouping tolerance of the sup count as on the
    // critical line; a sup within tolerance of zero is the unstable case.
    let v_star = if v_star_raw.abs() <= REAL_PART_GROUP_TOL {
        0.0
    } else {
        v_star_raw
    };
    let on_line: Vec<&RootRecord> = records
        .iter()
        .filter(|r| {
            r.poly_degree.is_some() && (r.lambda.re - v_star_raw).abs() <= REAL_PART_GROUP_TOL
        })
        .collect();
    let m_star = on_line
        .iter()
        .filter_map(|r| r.poly_degree)
        .max()
        .expect("critical line holds at least one root with a nonzero polynomial");
    let dominant_roots: Vec<RootRecord> = on_line
        .iter()
        .filter(|r| r.poly_degree == Some(m_star))
        .map(|r| (*r).clone())
        .collect();
    let regime = if v_star == 0.0 {
        Regime::Unstable
    } else if v_star < 0.0 {
        Regime::Stable
    } else {
        Regime::Explosive
    };
    Ok(SpectralSummary {
        v_star: Some(v_star),
        m_star: Some(m_star),
        dominant_roots,
        regime,
        search_region: search.region,
        roots: all,
        winding_count: search.winding_count,
    })
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::DensityPiece;
    use approx::assert_relative_eq;
    use std::f64::consts::{E, FRAC_PI_2, PI};

    fn dirac_model(u: f64, theta: f64) -> CharacteristicModel {
        CharacteristicModel::new(
            SignedMeasure::from_atoms(u.abs().max(1.0), &[(u, 1.0)]).unwrap(),
            theta,
        )
    }

    /// The oscillatory critical model: a = δ₋₁, θ = −π/2, simple roots at
    /// ±iπ/2 on the imaginary axis.
    fn oscillatory() -> CharacteristicModel {
        dirac_model(-1.0, -FRAC_PI_2)
    }

    /// Tuned double root: a = δ₋₁, θ = −1/e puts a multiplicity-2 zero at
    /// λ = −1 (where h = h' = 0 and h'' = 1).
    fn double_root_model() -> CharacteristicModel {
        dirac_model(-1.0, -1.0 / E)
    }

    // ---- char_eval / char_derivative -----------------------------------

    #[test]
    fn char_eval_examples() {
        let z = Complex64::new(2.0, 3.0);
        let m0 = dirac_model(-1.0, 0.0);
        assert_eq!(m0.char_eval(z), z);

        let m1 = dirac_model(0.0, 1.0);
        assert!(m1.char_eval(Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let h = oscillatory().char_eval(Complex64::new(0.0, FRAC_PI_2));
        assert!(h.norm() < 1e-15, "h(iπ/2) = {h}");
    }

    #[test]
    fn char_derivative_examples() {
        let m0 = dirac_model(-1.0, 0.0);
        let d = m0.char_derivative(Complex64::new(0.3, -0.4), 1).unwrap();
        assert_relative_eq!(d.re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.im, 0.0, epsilon = 1e-15);

        // Hand value 1 + iπ/2 at the oscillatory root.
        let d = oscillatory()
            .char_derivative(Complex64::new(0.0, FRAC_PI_2), 1)
            .unwrap();
        assert_relative_eq!(d.re, 1.0, epsilon = 1e-13);
        assert_relative_eq!(d.im, FRAC_PI_2, epsilon = 1e-13);

        // δ₀ kills every integrand with a factor u.
        let m = dirac_model(0.0, 2.5);
        let d = m.char_derivative(Complex64::new(1.0, 1.0), 2).unwrap();
        assert_eq!(d, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn char_derivative_matches_finite_difference() {
        let model = oscillatory();
        let z = Complex64::new(0.0, FRAC_PI_2);
        let step = 1e-6;
        let fd = (model.char_eval(z + step) - model.char_eval(z - step)) / (2.0 * step);
        let exact = model.char_derivative(z, 1).unwrap();
        assert!((fd - exact).norm() < 1e-6, "fd {fd} vs exact {exact}");
    }

    // ---- find_roots -----------------------------------------------------

    #[test]
    fn affine_model_has_single_root() {
        let model = dirac_model(0.0, -1.0);
        let found = find_roots(
            &model,
            Region::new(-2.0, 1.0, 5.0),
            &RootSearchConfig::default(),
        )
        .unwrap();
        assert_eq!(found.winding_count, 1);
        assert_eq!(found.roots.len(), 1);
        assert_eq!(found.roots[0].multiplicity, 1);
        assert!((found.roots[0].lambda - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn oscillatory_pair_found() {
        let found = find_roots(
            &oscillatory(),
            Region::new(-1.0, 1.0, 2.0),
            &RootSearchConfig::default(),
        )
        .unwrap();
        assert_eq!(found.winding_count, 2);
        assert_eq!(found.roots.len(), 2);
        let target = Complex64::new(0.0, FRAC_PI_2);
        assert!((found.roots[1].lambda - target).norm() < 1e-9);
        assert_eq!(found.roots[0].lambda, found.roots[1].lambda.conj());
        assert_eq!(found.roots[0].multiplicity, 1);
    }

    #[test]
    fn zero_theta_leaves_the_origin() {
        let model = CharacteristicModel::new(
            SignedMeasure::from_atoms(1.0, &[(-0.5, 2.0)]).unwrap(),
            0.0,
        );
        let found = find_roots(
            &model,
            Region::new(-1.0, 1.0, 1.0),
            &RootSearchConfig::default(),
        )
        .unwrap();
        assert_eq!(found.roots.len(), 1);
        assert_eq!(found.roots[0].multiplicity, 1);
        assert!(found.roots[0].lambda.norm() < 1e-12);
    }

    #[test]
    fn double_root_certified() {
        let found = find_roots(
            &double_root_model(),
            Region::new(-3.0, 1.0, 3.0),
            &RootSearchConfig::default(),
        )
        .unwrap();
        assert_eq!(found.roots.len(), 1);
        assert_eq!(found.roots[0].multiplicity, 2);
        assert!((found.roots[0].lambda - Complex64::new(-1.0, 0.0)).norm() < 1e-7);
        assert_eq!(found.winding_count, 2);
    }

    #[test]
    fn winding_count_matches_multiplicity_sum() {
        // Region wide enough to hold several conjugate branches.
        let found = find_roots(
            &oscillatory(),
            Region::new(-3.0, 1.0, 14.0),
            &RootSearchConfig::default(),
        )
        .unwrap();
        let total: i64 = found.roots.iter().map(|r| r.multiplicity as i64).sum();
        assert_eq!(total, found.winding_count);
        assert!(found.roots.len() > 2, "expected higher branches in the strip");
        // conjugate closure, exactly
        for r in &found.roots {
            if r.lambda.im != 0.0 {
                assert!(found
                    .roots
                    .iter()
                    .any(|s| s.lambda == r.lambda.conj() && s.multiplicity == r.multiplicity));
            }
        }
    }

    // ---- residue_coeff ----------------------------------------------------

    #[test]
    fn residue_at_origin_is_total_mass() {
        for mass in [1.0, -0.5, 2.3] {
            let measure = SignedMeasure::from_atoms(1.0, &[(0.0, 0.6 * mass), (-1.0, 0.4 * mass)])
                .unwrap();
            let model = CharacteristicModel::new(measure, 0.0);
            let c = residue_coeff(&model, Complex64::new(0.0, 0.0), 1, 0).unwrap();
            assert_relative_eq!(c.re, mass, epsilon = 1e-12);
            assert!(c.im.abs() < 1e-14);
        }
    }

    #[test]
    fn residue_simple_pole_closed_form() {
        // c = e^{-iπ/2} / (1 + iπ/2) = (-π/2 - i)/(1 + π²/4)
        let c = residue_coeff(&oscillatory(), Complex64::new(0.0, FRAC_PI_2), 1, 0).unwrap();
        let denom = 1.0 + PI * PI / 4.0;
        assert_relative_eq!(c.re, -FRAC_PI_2 / denom, epsilon = 1e-12);
        assert_relative_eq!(c.im, -1.0 / denom, epsilon = 1e-12);
    }

    #[test]
    fn residue_rejects_out_of_range_order() {
        assert!(matches!(
            residue_coeff(&oscillatory(), Complex64::new(0.0, FRAC_PI_2), 1, 1),
            Err(SpectralError::CoeffOrderOutOfRange { .. })
        ));
    }

    #[test]
    fn double_root_coefficients_hand_values() {
        // At λ = -1, m = 2: h₂ = 1/2, h₃ = -1/6, A(λ) = e, ∫u e^{λu}a = -e,
        // so c₁ = 2e and c₀ = (2/3)e - 2e = -(4/3)e.
        let model = double_root_model();
        let lambda = Complex64::new(-1.0, 0.0);
        let c1 = residue_coeff(&model, lambda, 2, 1).unwrap();
        assert_relative_eq!(c1.re, 2.0 * E, epsilon = 1e-10);
        assert!(c1.im.abs() < 1e-12);
        let c0 = residue_coeff(&model, lambda, 2, 0).unwrap();
        assert_relative_eq!(c0.re, -4.0 * E / 3.0, epsilon = 1e-10);
        assert!(c0.im.abs() < 1e-12);
    }

    /// Contour-integral oracle: `(1/2πi) ∮ (z−λ)^ℓ A(z)/h(z) dz` on a circle
    /// of radius 0.1 with the trapezoid rule, where `A(z) = ∫ e^{zu} a(du)`
    /// is evaluated by atom sums plus Simpson quadrature (independent of the
    /// series path under test).
    fn contour_oracle(model: &CharacteristicModel, lambda: Complex64, ell: usize) -> Complex64 {
        fn measure_transform(model: &CharacteristicModel, z: Complex64) -> Complex64 {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in model.measure.atoms() {
                acc += a.weight * (z * a.location).exp();
            }
            for p in model.measure.density_pieces() {
                // composite Simpson over u, h⁴ accurate
                let n = 2048usize;
                if p.hi <= p.lo {
                    continue;
                }
                let h = (p.hi - p.lo) / n as f64;
                let mut s = p.eval(p.lo) * (z * p.lo).exp() + p.eval(p.hi) * (z * p.hi).exp();
                for i in 1..n {
                    let u = p.lo + i as f64 * h;
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    s += w * p.eval(u) * (z * u).exp();
                }
                acc += s * h / 3.0;
            }
            acc
        }
        let n = 2048usize;
        let radius = 0.1;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let t = 2.0 * PI * k as f64 / n as f64;
            let e = Complex64::new(t.cos(), t.sin());
            let z = lambda + radius * e;
            let num = (z - lambda).powu(ell as u32) * measure_transform(model, z);
            acc += num / model.char_eval(z) * e;
        }
        acc * radius / n as f64
    }

    #[test]
    fn residues_match_contour_oracle() {
        let uniform = CharacteristicModel::new(SignedMeasure::uniform(1.0, 1.0).unwrap(), -1.0);
        let found = find_roots(
            &uniform,
            Region::new(-2.0, 1.0, 4.0),
            &RootSearchConfig::default(),
        )
        .unwrap();
        assert!(!found.roots.is_empty());
        for root in &found.roots {
            for ell in 0..root.multiplicity {
                let series = residue_coeff(&uniform, root.lambda, root.multiplicity, ell).unwrap();
                let oracle = contour_oracle(&uniform, root.lambda, ell);
                assert!(
                    (series - oracle).norm() < 1e-8,
                    "root {} ℓ={ell}: {series} vs {oracle}",
                    root.lambda
                );
            }
        }

        let dbl = double_root_model();
        let lambda = Complex64::new(-1.0, 0.0);
        for ell in 0..2 {
            let series = residue_coeff(&dbl, lambda, 2, ell).unwrap();
            let oracle = contour_oracle(&dbl, lambda, ell);
            assert!(
                (series - oracle).norm() < 1e-8,
                "double root ℓ={ell}: {series} vs {oracle}"
            );
        }
    }

    #[test]
    fn conjugate_roots_have_conjugate_coefficients() {
        let model = oscillatory();
        let lambda = Complex64::new(0.0, FRAC_PI_2);
        let up = residue_coeff(&model, lambda, 1, 0).unwrap();
        let down = residue_coeff(&model, lambda.conj(), 1, 0).unwrap();
        assert!((down - up.conj()).norm() < 1e-10);
    }

    // ---- classify ---------------------------------------------------------

    #[test]
    fn classify_zero_theta_unstable() {
        let measure = SignedMeasure::from_atoms(1.0, &[(0.0, 0.6), (-1.0, 0.4)]).unwrap();
        let model = CharacteristicModel::new(measure, 0.0);
        let summary = classify(
            &model,
            Region::default_for(&model),
            &RootSearchConfig::default(),
        )
        .unwrap();
        assert_eq!(summary.v_star, Some(0.0));
        assert_eq!(summary.m_star, Some(0));
        assert_eq!(summary.regime, Regime::Unstable);
        assert_eq!(summary.dominant_roots.len(), 1);
        assert!(summary.dominant_roots[0].lambda.norm() < 1e-12);
        assert_relative_eq!(summary.dominant_roots[0].coeffs[0].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn classify_stable_ou() {
        let model = dirac_model(0.0, -1.0);
        let summary = classify(
            &model,
            Region::default_for(&model),
            &RootSearchConfig::default(),
        )
        .unwrap();
        assert_eq!(summary.regime, Regime::Stable);
        assert_relative_eq!(summary.v_star.unwrap(), -1.0, epsilon = 1e-10);
        assert_eq!(summary.m_star, Some(0));
    }

    #[test]
    fn classify_oscillatory_unstable() {
        let model = oscillatory();
        let summary = classify(
            &model,
            Region::default_for(&model),
            &RootSearchConfig::default(),
        )
        .unwrap();
        assert_eq!(summary.v_star, Some(0.0));
        assert_eq!(summary.m_star, Some(0));
        assert_eq!(summary.regime, Regime::Unstable);
        assert_eq!(summary.dominant_roots.len(), 1);
        assert!(
            (summary.dominant_roots[0].lambda - Complex64::new(0.0, FRAC_PI_2)).norm() < 1e-9
        );
    }

    #[test]
    fn classify_ignores_zero_density_piece() {
        let base = SignedMeasure::from_atoms(1.0, &[(0.0, 0.6), (-1.0, 0.4)]).unwrap();
        let padded = SignedMeasure::new(
            1.0,
            base.atoms().to_vec(),
            vec![DensityPiece { lo: -0.75, hi: -0.25, coeffs: vec![0.0] }],
        )
        .unwrap();
        let region = Region::new(-2.0, 1.0, 4.0);
        let cfg = RootSearchConfig::default();
        let a = classify(&CharacteristicModel::new(base, 0.0), region, &cfg).unwrap();
        let b = classify(&CharacteristicModel::new(padded, 0.0), region, &cfg).unwrap();
        assert_eq!(a.v_star, b.v_star);
        assert_eq!(a.m_star, b.m_star);
        assert_eq!(a.regime, b.regime);
        assert_eq!(a.roots, b.roots);
    }
}
