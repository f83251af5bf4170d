//! Sharp frame bounds of Gabor systems `G(g, Λ)` for `d = 1`.
//!
//! * [`janssen_bounds`]: extrema of the Janssen symbol, integer density.
//! * [`zak_bounds`]: eigenvalues of the matrix-valued Zak symbol, rational
//!   density.
//! * [`finite_section_bounds`]: extreme eigenvalues of the frame operator
//!   compressed to a Hermite subspace. An oracle, not a sharp bound.
//! * [`bounds_symplectic`]: `G(g, δ^{-1/2} S ℤ²)` through `G(Ŝ⁻¹g, δ^{-1/2} ℤ²)`.

mod finite;
mod janssen;
mod zak;

use serde::Serialize;

pub use finite::{finite_section_bounds, frame_operator_section};
pub use janssen::{
    certify_even_critical, certify_odd_critical, certify_odd_density2, janssen_bounds, janssen_symbol, JanssenSeries,
};
pub use zak::{zak_bounds, zak_oracle_check, ZakSymbol};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::metaplectic::apply_symplectic;
use crate::symplectic::SymplecticMatrix;
use crate::windows::SampledWindow;

/// `A < NOT_FRAME_RATIO·B` is reported as "not a frame".
pub const NOT_FRAME_RATIO: f64 = 1e-3;
/// Largest tolerated imaginary part of the Janssen symbol.
pub const IMAG_TOL: f64 = 1e-8;
/// Boundary ring share of the Janssen coefficient mass.
pub const TRUNCATION_TOL: f64 = 1e-10;
/// Denominator cap for rational recognition of `αβ`.
pub const MAX_DENOMINATOR: u64 = 64;
/// Tolerance for rational recognition of `αβ` and integer recognition of `δ`.
pub const RATIONAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct Diagnostics {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncation_k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_imag_residual: Option<f64>,
    /// Boundary-ring share of the Janssen coefficients.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_ratio: Option<f64>,
    /// Mass of the window lost off the grid or outside the lattice sum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discarded_mass: Option<f64>,
    /// Unclamped lower bound.
    pub raw_a: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_test: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameBounds {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    pub method: String,
    pub diagnostics: Diagnostics,
}

impl FrameBounds {
    fn new(raw_a: f64, b: f64, method: &str, mut diagnostics: Diagnostics) -> Self {
        diagnostics.raw_a = raw_a;
        Self { a: raw_a.max(0.0).min(b), b, method: method.to_string(), diagnostics }
    }

    pub fn not_frame(&self) -> bool {
        self.a < NOT_FRAME_RATIO * self.b
    }

    /// `B / A`, infinite when `A = 0`.
    pub fn condition(&self) -> f64 {
        self.b / self.a
    }
}

/// Tunables shared by the bound computations.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsConfig {
    /// Janssen truncation `K`.
    pub k: usize,
    /// Symbol grid resolution per axis.
    pub grid_n: usize,
    /// Extrema refined by local zoom.
    pub refine: usize,
    /// Run the oracle self-test when building a Zak symbol.
    pub zak_self_test: bool,
    pub fs_radius: f64,
    pub fs_n_test: usize,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        Self { k: 20, grid_n: 256, refine: 4, zak_self_test: false, fs_radius: 12.0, fs_n_test: 24 }
    }
}

/// `(p, q)` with `x ≈ q/p`, `gcd(p, q) = 1`, `p ≤ MAX_DENOMINATOR`, found by
/// continued fractions.
pub fn recognize_rational(x: f64) -> Option<(u64, u64)> {
    if !(x > 0.0) || !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0u64, 1u64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e12 {
            return None;
        }
        let a = a as u64;
        let h = a.checked_mul(h1)?.checked_add(h0)?;
        let k = a.checked_mul(k1)?.checked_add(k0)?;
        if k > MAX_DENOMINATOR {
            return None;
        }
        if (h as f64 / k as f64 - x).abs() <= RATIONAL_TOL {
            return Some((k, h));
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        let frac = r - r.floor();
        if frac < 1e-15 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// `Some(n)` when `δ` is a positive integer within [`RATIONAL_TOL`].
pub fn integer_density(delta: f64) -> Option<u64> {
    let n = delta.round();
    (n >= 1.0 && (delta - n).abs() <= RATIONAL_TOL).then_some(n as u64)
}

/// Sharp bounds on `αℤ × βℤ`: Janssen when `1/(αβ)` is an integer and the
/// truncation certificate holds, otherwise Zak.
pub fn separable_bounds(g: &SampledWindow, alpha: f64, beta: f64, cfg: &BoundsConfig) -> Result<FrameBounds> {
    if integer_density(1.0 / (alpha * beta)).is_some() {
        match janssen_bounds(g, alpha, beta, cfg.k, cfg.grid_n) {
            Err(Error::Truncation { .. }) => {}
            other => return other,
        }
    }
    zak::zak_bounds_cfg(g, alpha, beta, cfg)
}

/// Bounds for an arbitrary lattice: sharp methods where they apply
/// (separable basis or rational density), finite section otherwise.
pub fn lattice_bounds(g: &SampledWindow, lat: &Lattice, cfg: &BoundsConfig) -> Result<FrameBounds> {
    if let Some((alpha, beta)) = lat.as_separable() {
        match separable_bounds(g, alpha, beta, cfg) {
            Err(Error::Hypothesis(_)) => {}
            other => return other,
        }
    } else if lat.d == 1 && (integer_density(lat.delta).is_some() || recognize_rational(1.0 / lat.delta).is_some()) {
        return bounds_symplectic(g, &lat.generator, lat.delta, cfg);
    }
    finite_section_bounds(g, lat, cfg.fs_radius, cfg.fs_n_test)
}

/// Bounds of `G(g, δ^{-1/2} S ℤ²)`, computed as those of
/// `G(Ŝ⁻¹g, δ^{-1/2} ℤ²)`.
pub fn bounds_symplectic(
    g: &SampledWindow,
    s: &SymplecticMatrix,
    delta: f64,
    cfg: &BoundsConfig,
) -> Result<FrameBounds> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!("density must be positive, got {delta}")));
    }
    if s.half_dim() != 1 {
        return Err(Error::Unsupported("frame bounds are implemented for d = 1".into()));
    }
    let deformed = apply_symplectic(g, &s.inverse())?;
    let side = delta.powf(-0.5);
    let mut out = separable_bounds(&deformed, side, side, cfg)?;
    out.method = format!("symplectic_reduction+{}", out.method);
    Ok(out)
}
