//! Spectral analysis, path simulation and likelihood inference for linear
//! stochastic delay differential equations (SDDEs) of the form
//!
//! ```text
//! dX(t) = θ ∫_[-r,0] X(t+u) a(du) dt + dW(t),      X(t) = X₀(t) on [-r, 0],
//! ```
//!
//! where `a` is a finite signed measure on `[-r, 0]` and `W` a standard
//! Wiener process.
//!
//! The crate is organised around the inference pipeline for the drift
//! parameter `θ` near an unstable point:
//!
//! - [`measure`]: signed measures with exact exponential moments
//!   `∫ uᵏ e^{λu} a(du)`.
//! - [`spectral`]: the characteristic function `h_θ(λ) = λ − θ ∫ e^{λu} a(du)`,
//!   its complex roots with multiplicities, residue coefficients and the
//!   `(v*, m*)` classification that fixes the scaling `r_{θ,T} = T^{−m*−1}`.
//! - [`sdde`]: Euler–Maruyama path simulation, the delayed functional
//!   `Y(t) = ∫ X(t+u) a(du)` and Itô-convention discrete integrals.
//! - [`inference`]: sufficient statistics, log-likelihood ratios, the
//!   statistics `(Δ, J)` and the maximum likelihood estimators of `θ` and of
//!   the local parameter `α`.
//! - [`limit`]: the delay-free limit system driven by complex Wiener
//!   processes, its statistics and its MLE.
//! - [`mc`]: reproducible Monte Carlo experiments comparing finite-horizon
//!   estimators against the limit law.

pub mod inference;
pub mod limit;
pub mod mc;
pub mod measure;
pub mod rng;
pub mod sdde;
pub mod spectral;

pub use inference::SufficientStats;
pub use measure::{DensityPiece, MassAtom, SignedMeasure};
pub use rng::SeedRecord;
pub use sdde::{InitialSegment, SamplePath};
pub use spectral::{CharacteristicModel, Regime, Region, RootRecord, SpectralSummary};
