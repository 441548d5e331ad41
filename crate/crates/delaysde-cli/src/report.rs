//! On-disk report schemas and their conversions to library types.

use delaysde::spectral::{Regime, RootRecord, SpectralSummary};
use delaysde::Region;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Output of `analyze`: every root with residue data, the classification,
/// and the boundary winding count of the scanned region.
#[derive(Debug, Serialize, Deserialize)]
pub struct SpectralReport {
    pub roots: Vec<RootReport>,
    pub v_star: Option<f64>,
    pub m_star: Option<usize>,
    pub regime: Regime,
    pub winding_count: i64,
    pub search_region: RegionReport,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct RootReport {
    pub re: f64,
    pub im: f64,
    pub mult: usize,
    /// Residue coefficients `c_ℓ` as `[re, im]` pairs, `ℓ = 0..mult`.
    pub coeffs: Vec<[f64; 2]>,
    /// `null` encodes the zero polynomial (degree −∞).
    pub poly_degree: Option<usize>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RegionReport {
    pub re_min: f64,
    pub re_max: f64,
    pub im_max: f64,
}

impl From<Region> for RegionReport {
    fn from(r: Region) -> Self {
        Self { re_min: r.re_min, re_max: r.re_max, im_max: r.im_max }
    }
}

impl From<&RootRecord> for RootReport {
    fn from(r: &RootRecord) -> Self {
        Self {
            re: r.lambda.re,
            im: r.lambda.im,
            mult: r.multiplicity,
            coeffs: r.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            poly_degree: r.poly_degree,
        }
    }
}

impl RootReport {
    pub fn to_record(&self) -> RootRecord {
        RootRecord {
            lambda: Complex64::new(self.re, self.im),
            multiplicity: self.mult,
            coeffs: self.coeffs.iter().map(|c| Complex64::new(c[0], c[1])).collect(),
            poly_degree: self.poly_degree,
        }
    }
}

impl SpectralReport {
    pub fn from_summary(summary: &SpectralSummary) -> Self {
        Self {
            roots: summary.roots.iter().map(RootReport::from).collect(),
            v_star: summary.v_star,
            m_star: summary.m_star,
            regime: summary.regime,
            winding_count: summary.winding_count,
            search_region: summary.search_region.into(),
        }
    }

    /// The dominant roots with `Im λ ≥ 0`: on the critical line with the
    /// maximal residue-polynomial degree.
    pub fn dominant_roots(&self) -> Vec<RootRecord> {
        let (Some(v_star), Some(m_star)) = (self.v_star, self.m_star) else {
            return Vec::new();
        };
        self.roots
            .iter()
            .filter(|r| {
                r.im >= 0.0 && (r.re - v_star).abs() <= 1e-8 && r.poly_degree == Some(m_star)
            })
            .map(RootReport::to_record)
            .collect()
    }
}

/// Output of `infer`.
#[derive(Debug, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct InferReport {
    pub I1: f64,
    pub I2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub I3: Option<f64>,
    pub theta_hat: f64,
    pub r_scale: f64,
    pub alpha_hat: f64,
    /// Score statistic at `theta_base`, so `alpha_hat = delta / J` exactly.
    pub delta: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub theta_base: f64,
    pub horizon: f64,
}

/// Per-cell summary entry of an `mc` run.
#[derive(Debug, Serialize, Deserialize)]
pub struct McCellSummary {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub ks: f64,
    pub failures: usize,
    pub runtime_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct McLimitSummary {
    #[serde(rename = "N")]
    pub n: usize,
    pub failures: usize,
    pub runtime_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct McSummary {
    pub cells: Vec<McCellSummary>,
    pub limit: McLimitSummary,
    pub master_seed: u64,
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_max: Option<f64>,
    pub threshold_violated: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub h: f64,
    pub n: usize,
    #[serde(rename = "N")]
    pub replications: usize,
    pub ks: f64,
    pub failures_ar1: usize,
    pub failures_ou: usize,
    pub runtime_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ks_max: Option<f64>,
    pub threshold_violated: bool,
}
