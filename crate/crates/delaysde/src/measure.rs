//! Finite signed measures on `[-r, 0]`.
//!
//! The delay drift integrates the path segment against a finite signed
//! measure `a`. The canonical representation is a finite list of atoms plus a
//! piecewise-polynomial density. That choice keeps every exponential moment
//!
//! ```text
//! ∫_[-r,0] uᵏ e^{λu} a(du)
//! ```
//!
//! available in closed form, which the characteristic-root finder and the
//! residue calculus rely on: no quadrature error enters the spectral
//! analysis.
//!
//! Values are immutable after construction and can be shared freely across
//! threads.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Maximum exponent `k` accepted by [`SignedMeasure::exp_moment`].
pub const MAX_EXP_MOMENT_ORDER: usize = 32;

/// The antiderivative ladder switches to its series branch when the scaled
/// frequency `|λ|·max|u|` over a density piece falls below this. The direct
/// recurrences cancel catastrophically as `λ → 0`, the series does not.
const SERIES_BRANCH_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("delay horizon r must be positive and finite, got {0}")]
    InvalidDelay(f64),
    #[error("atom at u = {location} lies outside [-{delay_r}, 0]")]
    AtomOutOfRange { location: f64, delay_r: f64 },
    #[error("atom weight at u = {0} is not finite")]
    NonFiniteWeight(f64),
    #[error("density piece [{lo}, {hi}] is invalid or outside [-{delay_r}, 0]")]
    PieceOutOfRange { lo: f64, hi: f64, delay_r: f64 },
    #[error("density pieces [{0}, {1}] and [{2}, {3}] overlap")]
    OverlappingPieces(f64, f64, f64, f64),
    #[error("density coefficients on [{lo}, {hi}] are not finite")]
    NonFiniteCoefficient { lo: f64, hi: f64 },
    #[error("the measure is identically zero")]
    ZeroMeasure,
    #[error("moment order {order} exceeds the supported maximum {max}")]
    OrderExceeded { order: usize, max: usize },
}

/// A point mass `w · δ_u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassAtom {
    #[serde(rename = "u")]
    pub location: f64,
    #[serde(rename = "w")]
    pub weight: f64,
}

/// Polynomial density `p(u) = Σ_j coeffs[j] uʲ` supported on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPiece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<f64>,
}

impl DensityPiece {
    /// Evaluates the density polynomial at `u`.
    pub fn eval(&self, u: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    fn is_trivial(&self) -> bool {
        self.hi <= self.lo || self.coeffs.iter().all(|&c| c == 0.0)
    }
}

/// A finite signed measure on `[-r, 0]`: atoms plus a piecewise-polynomial
/// density. Invariants are enforced at construction:
///
/// - every atom location and density interval lies within `[-r, 0]`
///   (endpoints allowed);
/// - density intervals do not overlap (shared endpoints allowed);
/// - the measure is not identically zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasureRepr")]
pub struct SignedMeasure {
    #[serde(rename = "r")]
    delay_r: f64,
    atoms: Vec<MassAtom>,
    #[serde(rename = "density")]
    density_pieces: Vec<DensityPiece>,
}

/// Raw mirror of the JSON measure schema, validated on conversion.
#[derive(Deserialize)]
struct MeasureRepr {
    r: f64,
    #[serde(default)]
    atoms: Vec<MassAtom>,
    #[serde(default)]
    density: Vec<DensityPiece>,
}

impl TryFrom<MeasureRepr> for SignedMeasure {
    type Error = MeasureError;

    fn try_from(raw: MeasureRepr) -> Result<Self, Self::Error> {
        SignedMeasure::new(raw.r, raw.atoms, raw.density)
    }
}

impl SignedMeasure {
    pub fn new(
        delay_r: f64,
        atoms: Vec<MassAtom>,
        density_pieces: Vec<DensityPiece>,
    ) -> Result<Self, MeasureError> {
        if !(delay_r.is_finite() && delay_r > 0.0) {
            return Err(MeasureError::InvalidDelay(delay_r));
        }
        for a in &atoms {
            if !(a.location >= -delay_r && a.location <= 0.0) {
                return Err(MeasureError::AtomOutOfRange {
                    location: a.location,
                    delay_r,
                });
            }
            if !a.weight.is_finite() {
                return Err(MeasureError::NonFiniteWeight(a.location));
            }
        }
        for p in &density_pieces {
            if !(p.lo >= -delay_r && p.hi <= 0.0 && p.lo <= p.hi) {
                return Err(MeasureError::PieceOutOfRange {
                    lo: p.lo,
                    hi: p.hi,
                    delay_r,
                });
            }
            if p.coeffs.iter().any(|c| !c.is_finite()) {
                return Err(MeasureError::NonFiniteCoefficient { lo: p.lo, hi: p.hi });
            }
        }
        let mut sorted: Vec<&DensityPiece> =
            density_pieces.iter().filter(|p| p.hi > p.lo).collect();
        sorted.sort_by(|a, b| a.lo.partial_cmp(&b.lo).expect("finite bounds"));
        for w in sorted.windows(2) {
            if w[1].lo < w[0].hi {
                return Err(MeasureError::OverlappingPieces(
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi,
                ));
            }
        }
        let nonzero = atoms.iter().any(|a| a.weight != 0.0)
            || density_pieces.iter().any(|p| !p.is_trivial());
        if !nonzero {
            return Err(MeasureError::ZeroMeasure);
        }
        Ok(Self {
            delay_r,
            atoms,
            density_pieces,
        })
    }

    /// Atom-only measure from `(location, weight)` pairs.
    pub fn from_atoms(delay_r: f64, atoms: &[(f64, f64)]) -> Result<Self, MeasureError> {
        Self::new(
            delay_r,
            atoms
                .iter()
                .map(|&(location, weight)| MassAtom { location, weight })
                .collect(),
            Vec::new(),
        )
    }

    /// Constant density `level` on the full interval `[-r, 0]`.
    pub fn uniform(delay_r: f64, level: f64) -> Result<Self, MeasureError> {
        Self::new(
            delay_r,
            Vec::new(),
            vec![DensityPiece {
                lo: -delay_r,
                hi: 0.0,
                coeffs: vec![level],
            }],
        )
    }

    pub fn delay_r(&self) -> f64 {
        self.delay_r
    }

    pub fn atoms(&self) -> &[MassAtom] {
        &self.atoms
    }

    pub fn density_pieces(&self) -> &[DensityPiece] {
        &self.density_pieces
    }

    /// Total mass `a([-r, 0])`: atom weights plus exact polynomial integrals.
    pub fn total_mass(&self) -> f64 {
        let atom_sum: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let density_sum: f64 = self
            .density_pieces
            .iter()
            .map(|p| {
                p.coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, &c)| {
                        let e = (j + 1) as i32;
                        c * (p.hi.powi(e) - p.lo.powi(e)) / e as f64
                    })
                    .sum::<f64>()
            })
            .sum();
        atom_sum + density_sum
    }

    /// Total variation `|a|([-r, 0])`, with `∫|p|` approximated by composite
    /// Simpson quadrature. Only used for scale heuristics (e.g. default root
    /// search regions), never inside exact computations.
    pub fn total_variation(&self) -> f64 {
        let atom_sum: f64 = self.atoms.iter().map(|a| a.weight.abs()).sum();
        let density_sum: f64 = self
            .density_pieces
            .iter()
            .map(|p| {
                if p.hi <= p.lo {
                    return 0.0;
                }
                let n = 512usize;
                let h = (p.hi - p.lo) / n as f64;
                let mut s = p.eval(p.lo).abs() + p.eval(p.hi).abs();
                for i in 1..n {
                    let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                    s += w * p.eval(p.lo + i as f64 * h).abs();
                }
                s * h / 3.0
            })
            .sum();
        atom_sum + density_sum
    }

    /// The exponential moment `∫_[-r,0] uᵏ e^{λu} a(du)`.
    ///
    /// Atoms are summed exactly; density pieces use closed-form
    /// antiderivatives of `uᵐ e^{λu}` evaluated by numerically stable
    /// recurrences (series branch near `λ = 0`, upward recurrence while the
    /// order stays below `|λ|`, downward recurrence above it).
    pub fn exp_moment(&self, lambda: Complex64, k: usize) -> Result<Complex64, MeasureError> {
        if k > MAX_EXP_MOMENT_ORDER {
            return Err(MeasureError::OrderExceeded {
                order: k,
                max: MAX_EXP_MOMENT_ORDER,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for a in &self.atoms {
            acc += a.weight * a.location.powi(k as i32) * (lambda * a.location).exp();
        }
        for p in &self.density_pieces {
            if p.coeffs.is_empty() || p.hi <= p.lo {
                continue;
            }
            let top = k + p.coeffs.len() - 1;
            let ladder = power_exp_integrals(lambda, p.lo, p.hi, top);
            for (j, &c) in p.coeffs.iter().enumerate() {
                acc += c * ladder[k + j];
            }
        }
        Ok(acc)
    }
}

/// Computes `∫_lo^hi uᵐ e^{λu} du` for all `m = 0..=max_order`.
///
/// The interval is rescaled to `[-1, 0]` so stability depends only on the
/// scaled frequency `µ = λ·ρ`, `ρ = max(|lo|, |hi|)`:
///
/// - `|µ|` small: termwise series in `µ`, all ingredients O(1);
/// - order `m ≤ |µ|`: upward recurrence `Jₘ = (Bₘ − m·Jₘ₋₁)/µ` (error damped
///   by `m/|µ| ≤ 1` per step);
/// - order `m > |µ|`: downward recurrence seeded with `J_N = 0` at an `N`
///   chosen so the seed error is damped below 1e-18 on arrival.
fn power_exp_integrals(lambda: Complex64, lo: f64, hi: f64, max_order: usize) -> Vec<Complex64> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![zero; max_order + 1];
    if hi <= lo {
        return out;
    }
    let rho = lo.abs().max(hi.abs());
    if rho == 0.0 {
        return out;
    }
    let ls = lo / rho;
    let hs = hi / rho;
    let mu = lambda * rho;

    if mu.norm() < SERIES_BRANCH_THRESHOLD {
        for (m, slot) in out.iter_mut().enumerate() {
            *slot = series_integral(mu, ls, hs, m);
        }
    } else {
        let boundary = |m: usize| -> Complex64 {
            hs.powi(m as i32) * (mu * hs).exp() - ls.powi(m as i32) * (mu * ls).exp()
        };
        let m_up = (mu.norm().floor() as usize).min(max_order);
        out[0] = boundary(0) / mu;
        for m in 1..=m_up {
            out[m] = (boundary(m) - m as f64 * out[m - 1]) / mu;
        }
        if m_up < max_order {
            // Start index for the downward sweep: damp the zero-seed error
            // (bounded by e^{|Re µ|}) below 1e-18 by the time it reaches
            // max_order.
            let mut start = max_order;
            let mut damp = if mu.re < 0.0 { (-mu.re).exp() } else { 1.0 };
            while damp > 1e-18 && start < max_order + 600 {
                start += 1;
                damp *= mu.norm() / start as f64;
            }
            let mut jm = zero; // J_start seeded with 0
            let mut m = start;
            while m > m_up {
                let jm1 = (boundary(m) - mu * jm) / m as f64;
                if m - 1 <= max_order && m - 1 > m_up {
                    out[m - 1] = jm1;
                }
                jm = jm1;
                m -= 1;
            }
        }
    }

    // Undo the rescaling: ∫ uᵐ e^{λu} du = ρ^{m+1} ∫ sᵐ e^{µs} ds.
    let mut scale = rho;
    for slot in out.iter_mut() {
        *slot *= scale;
        scale *= rho;
    }
    out
}

/// Series branch: `∫ sᵐ e^{µs} ds = Σ_n µⁿ/n! · (h^{m+n+1} − l^{m+n+1})/(m+n+1)`.
fn series_integral(mu: Complex64, ls: f64, hs: f64, m: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut coef = Complex64::new(1.0, 0.0); // µⁿ/n!
    let mut hp = hs.powi(m as i32 + 1);
    let mut lp = ls.powi(m as i32 + 1);
    for n in 0..=64usize {
        let p = (m + n + 1) as f64;
        acc += coef * ((hp - lp) / p);
        if coef.norm() * 2.0 / p < 1e-18 * acc.norm().max(1.0) && n >= 2 {
            break;
        }
        coef *= mu / (n + 1) as f64;
        hp *= hs;
        lp *= ls;
    }
    acc
}
