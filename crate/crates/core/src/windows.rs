//! Window functions sampled on a centered time grid.
//!
//! The grid has `N` samples `t_j = (j − N/2)·h`. Sample `j = 0` (at
//! `t = −N·h/2`) has no mirror partner on the grid and is held at zero by
//! every constructor and operator, so reflection `t ↦ −t` is the exact index
//! map `j ↦ N − j` on the remaining samples.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interp::CubicSpline;
use crate::tfa::{self, TFPoint};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Uniform centered sampling grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    n: usize,
    h: f64,
}

impl Default for TimeGrid {
    /// `N = 2048`, `h = 1/64`, extent `T = 16`.
    fn default() -> Self {
        Self { n: 2048, h: 1.0 / 64.0 }
    }
}

impl TimeGrid {
    pub fn new(n: usize, h: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("grid size {n} must be a power of two ≥ 16")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing {h} must be positive")));
        }
        Ok(Self { n, h })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    /// `T = N·h/2`.
    pub fn extent(&self) -> f64 {
        self.n as f64 * self.h / 2.0
    }

    pub fn t(&self, j: usize) -> f64 {
        (j as f64 - (self.n / 2) as f64) * self.h
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|j| self.t(j))
    }

    /// `Some(k)` when `x = k·h` within `1e−9` grid units.
    pub fn on_grid_shift(&self, x: f64) -> Option<i64> {
        let r = x / self.h;
        let k = r.round();
        ((r - k).abs() <= 1e-9).then_some(k as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    None,
}

/// Analytic window families.
#[derive(Debug, Clone, PartialEq)]
pub enum WindowSpec {
    /// `2^{1/4} √γ e^{−π γ² t²}`.
    Gaussian { gamma: f64 },
    /// Hermite function of order `n` adapted to `e^{−π γ² t²}`.
    Hermite { n: usize, gamma: f64 },
    /// `t · max(0, 1 − t²)³`, normalized.
    OddCompactBump,
    /// Explicit samples; resampled when the grid differs.
    Samples { grid: TimeGrid, values: Vec<Complex64> },
}

/// Complex samples of a window.
#[derive(Debug, Clone)]
pub struct SampledWindow {
    grid: TimeGrid,
    values: Vec<Complex64>,
    parity: Parity,
    spline: OnceLock<CubicSpline>,
}

impl PartialEq for SampledWindow {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.values == other.values && self.parity == other.parity
    }
}

impl SampledWindow {
    /// Wraps raw samples. Sample 0 is zeroed.
    pub fn from_values(grid: TimeGrid, mut values: Vec<Complex64>, parity: Parity) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Dimension(format!("{} samples for a grid of {}", values.len(), grid.len())));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("window samples must be finite".into()));
        }
        values[0] = ZERO;
        Ok(Self { grid, values, parity, spline: OnceLock::new() })
    }

    pub(crate) fn with_values(&self, mut values: Vec<Complex64>) -> Self {
        values[0] = ZERO;
        Self { grid: self.grid, values, parity: self.parity, spline: OnceLock::new() }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn parity_hint(&self) -> Parity {
        self.parity
    }

    pub fn with_parity_hint(mut self, parity: Parity) -> Self {
        self.parity = parity;
        self
    }

    /// `⟨self, other⟩ = h Σ self·conj(other)`.
    pub fn inner(&self, other: &SampledWindow) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: Complex64 = self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum();
        Ok(s * self.grid.h)
    }

    /// `√(h Σ |g_j|²)`.
    pub fn norm(&self) -> f64 {
        (self.grid.h * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) {
            return Err(Error::ZeroWindow);
        }
        Ok(self.with_values(self.values.iter().map(|v| v / n).collect()))
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        self.with_values(self.values.iter().map(|v| v * c).collect())
    }

    /// Pointwise sum; the parity hint survives only if both agree.
    pub fn add(&self, other: &SampledWindow) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let parity = if self.parity == other.parity { self.parity } else { Parity::None };
        let v = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(self.with_values(v).with_parity_hint(parity))
    }

    /// `‖self − other‖₂`.
    pub fn distance(&self, other: &SampledWindow) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let s: f64 = self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok((s * self.grid.h).sqrt())
    }

    /// `min_θ ‖self − θ·other‖₂` over unimodular `θ`, with `θ` aligned via
    /// the inner product.
    pub fn phase_aligned_distance(&self, other: &SampledWindow) -> Result<f64> {
        let ip = self.inner(other)?;
        let theta = if ip.norm() > 0.0 { ip / ip.norm() } else { Complex64::new(1.0, 0.0) };
        self.distance(&other.scaled(theta))
    }

    /// Natural cubic spline through the samples `j = 1..N`, zero outside.
    pub fn interpolant(&self) -> &CubicSpline {
        self.spline.get_or_init(|| {
            CubicSpline::uniform(self.grid.t(1), self.grid.h, self.values[1..].to_vec())
                .expect("grid has at least 16 samples")
        })
    }

    /// Value at an arbitrary time via the interpolant.
    pub fn eval(&self, t: f64) -> Complex64 {
        self.interpolant().eval(t)
    }

    /// Samples of `g(t_j − x)`. On-grid shifts use exact index moves,
    /// other shifts the cubic interpolant.
    pub fn shifted(&self, x: f64) -> Vec<Complex64> {
        let n = self.grid.n;
        match self.grid.on_grid_shift(x) {
            Some(s) => (0..n)
                .map(|j| {
                    let src = j as i64 - s;
                    if src >= 1 && (src as usize) < n {
                        self.values[src as usize]
                    } else {
                        ZERO
                    }
                })
                .collect(),
            None => {
                let spline = self.interpolant();
                let mut out: Vec<Complex64> = self.grid.times().map(|t| spline.eval(t - x)).collect();
                out[0] = ZERO;
                out
            }
        }
    }
}

/// Samples `spec` on `grid` and normalizes to unit L²-norm on the grid.
pub fn sample(spec: &WindowSpec, grid: TimeGrid) -> Result<SampledWindow> {
    let (values, parity): (Vec<Complex64>, Parity) = match spec {
        WindowSpec::Gaussian { gamma } => {
            check_gamma(*gamma)?;
            let c = 2f64.powf(0.25) * gamma.sqrt();
            let v = grid.times().map(|t| Complex64::new(c * (-PI * gamma * gamma * t * t).exp(), 0.0)).collect();
            (v, Parity::Even)
        }
        WindowSpec::Hermite { n, gamma } => {
            check_gamma(*gamma)?;
            let c = (2.0 * PI).powf(0.25) * gamma.sqrt();
            let scale = (2.0 * PI).sqrt() * gamma;
            let v = grid.times().map(|t| Complex64::new(c * hermite_function(*n, scale * t), 0.0)).collect();
            (v, if n % 2 == 0 { Parity::Even } else { Parity::Odd })
        }
        WindowSpec::OddCompactBump => {
            let v = grid
                .times()
                .map(|t| {
                    let r = (1.0 - t * t).max(0.0);
                    Complex64::new(t * r * r * r, 0.0)
                })
                .collect();
            (v, Parity::Odd)
        }
        WindowSpec::Samples { grid: g0, values } => {
            if values.len() != g0.len() {
                return Err(Error::Dimension("sample count does not match its grid".into()));
            }
            if *g0 == grid {
                (values.clone(), Parity::None)
            } else {
                let spline = CubicSpline::uniform(g0.t(0), g0.spacing(), values.clone())?;
                (grid.times().map(|t| spline.eval(t)).collect(), Parity::None)
            }
        }
    };
    SampledWindow::from_values(grid, values, parity)?.normalized()
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("gamma = {gamma} must be positive")))
    }
}

/// Orthonormal Hermite function `ψ_n(x)` (weight `e^{−x²/2}`), by the
/// normalized three-term recurrence.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    let mut prev = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if n == 0 {
        return prev;
    }
    let mut cur = 2f64.sqrt() * x * prev;
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Parses two- or three-column CSV (`t, re[, im]`). Lines starting with `#`
/// and a non-numeric header row are skipped.
pub fn parse_window_csv(text: &str) -> Result<Vec<(f64, Complex64)>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let nums: std::result::Result<Vec<f64>, _> = rec.iter().map(|f| f.parse::<f64>()).collect();
        let nums = match nums {
            Ok(v) => v,
            Err(_) if row == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("row {}: {e}", row + 1))),
        };
        let (t, v) = match nums.as_slice() {
            [t, re] => (*t, Complex64::new(*re, 0.0)),
            [t, re, im] => (*t, Complex64::new(*re, *im)),
            _ => return Err(Error::Parse(format!("row {}: expected 2 or 3 columns", row + 1))),
        };
        if !(t.is_finite() && v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Parse(format!("row {}: non-finite value", row + 1)));
        }
        out.push((t, v));
    }
    if out.len() < 2 {
        return Err(Error::Parse("need at least two samples".into()));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    if out.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::Parse("duplicate time values".into()));
    }
    Ok(out)
}

/// Resamples scattered `(t, value)` pairs onto `grid` and normalizes.
pub fn from_points(points: &[(f64, Complex64)], grid: TimeGrid) -> Result<SampledWindow> {
    let (t, v): (Vec<f64>, Vec<Complex64>) = points.iter().copied().unzip();
    let spline = CubicSpline::irregular(t, v)?;
    let values = grid.times().map(|t| spline.eval(t)).collect();
    SampledWindow::from_values(grid, values, Parity::None)?.normalized()
}

/// Reflection `g∨(t) = g(−t)`.
pub fn reflect(w: &SampledWindow) -> SampledWindow {
    let n = w.grid.n;
    let mut v = vec![ZERO; n];
    for (j, slot) in v.iter_mut().enumerate().skip(1) {
        *slot = w.values[n - j];
    }
    w.with_values(v)
}

/// `(‖g − g∨‖, ‖g + g∨‖) / (2‖g‖)`: the relative norms of the odd and even
/// components of `g`. The first vanishes for even windows, the second for
/// odd ones; both lie in `[0, 1]`.
pub fn parity_defect(w: &SampledWindow) -> Result<(f64, f64)> {
    let norm = w.norm();
    if !(norm > 0.0) {
        return Err(Error::ZeroWindow);
    }
    let n = w.grid.n;
    let (mut even, mut odd) = (0.0, 0.0);
    for j in 1..n {
        let (a, b) = (w.values[j], w.values[n - j]);
        even += (a - b).norm_sqr();
        odd += (a + b).norm_sqr();
    }
    let h = w.grid.h;
    Ok(((even * h).sqrt() / (2.0 * norm), (odd * h).sqrt() / (2.0 * norm)))
}

/// Riemann sum of `∬ |V_g g|` over `[−K, K]²` with spacing `step`. A decay
/// sanity check, not a certified norm.
pub fn s0_diagnostic(w: &SampledWindow, k: usize, step: f64) -> Result<f64> {
    if k == 0 || !(step > 0.0) {
        return Err(Error::InvalidParameter("s0 diagnostic needs K ≥ 1 and step > 0".into()));
    }
    let m = (2.0 * k as f64 / step).round() as usize;
    let coords: Vec<f64> = (0..=m).map(|i| -(k as f64) + i as f64 * step).collect();
    let rows = tfa::stft_rows(w, w, &coords, &coords)?;
    let total: f64 = rows.iter().flatten().map(|v| v.norm()).sum();
    Ok(total * step * step)
}

/// Convenience: `V_g g` at the origin, i.e. `‖g‖²`.
pub fn energy(w: &SampledWindow) -> Result<f64> {
    Ok(tfa::stft(w, w, TFPoint::new(0.0, 0.0))?.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> TimeGrid {
        TimeGrid::default()
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn grid_validation() {
        assert!(TimeGrid::new(1000, 0.1).is_err());
        assert!(TimeGrid::new(8, 0.1).is_err());
        assert!(TimeGrid::new(16, 0.0).is_err());
        let g = grid();
        assert_eq!(g.extent(), 16.0);
        assert_eq!(g.t(0), -16.0);
        assert_eq!(g.t(1024), 0.0);
        assert_eq!(g.on_grid_shift(0.5), Some(32));
        assert_eq!(g.on_grid_shift(0.7071), None);
    }

    #[test]
    fn gaussian_unit_norm_and_even() {
        let w = sample(&WindowSpec::Gaussian { gamma: 1.0 }, grid()).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-10);
        assert_eq!(w.parity_hint(), Parity::Even);
        let (e, _) = parity_defect(&w).unwrap();
        assert!(e < 1e-12);
        // analytic normalization already holds on the grid
        assert!((w.values()[1024].re - 2f64.powf(0.25)).abs() < 1e-12);
    }

    #[test]
    fn hermite_one_is_odd() {
        let w = sample(&WindowSpec::Hermite { n: 1, gamma: 1.0 }, grid()).unwrap();
        assert_eq!(w.parity_hint(), Parity::Odd);
        assert_eq!(w.values()[1024], ZERO);
        let (_, o) = parity_defect(&w).unwrap();
        assert!(o < 1e-12);
    }

    #[test]
    fn hermite_three_sign_changes() {
        let w = sample(&WindowSpec::Hermite { n: 3, gamma: 2.0 }, grid()).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-10);
        // count sign changes among samples that are not numerically zero
        let v: Vec<f64> = w.values().iter().map(|c| c.re).filter(|x| x.abs() > 1e-12).collect();
        let changes = v.windows(2).filter(|p| p[0].signum() != p[1].signum()).count();
        assert_eq!(changes, 3);
    }

    #[test]
    fn hermite_recurrence_matches_closed_forms() {
        // ψ_2(x) = π^{-1/4} (2x² − 1)/√2 e^{−x²/2}
        for &x in &[-2.0, -0.3, 0.0, 1.1, 3.0] {
            let closed = PI.powf(-0.25) * (2.0 * x * x - 1.0) / 2f64.sqrt() * (-0.5 * x * x).exp();
            assert!((hermite_function(2, x) - closed).abs() < 1e-14);
            let closed3 = PI.powf(-0.25) * (2.0 * x * x * x - 3.0 * x) / 3f64.sqrt() * (-0.5 * x * x).exp();
            assert!((hermite_function(3, x) - closed3).abs() < 1e-14);
        }
    }

    #[test]
    fn hermite_orthogonality() {
        let ws: Vec<SampledWindow> =
            (0..=6).map(|n| sample(&WindowSpec::Hermite { n, gamma: 1.0 }, grid()).unwrap()).collect();
        for m in 0..=6 {
            for n in 0..m {
                assert!(ws[m].inner(&ws[n]).unwrap().norm() < 1e-8);
            }
        }
    }

    #[test]
    fn equal_energy_mix_defects() {
        let g = sample(&WindowSpec::Gaussian { gamma: 1.0 }, grid()).unwrap();
        let h1 = sample(&WindowSpec::Hermite { n: 1, gamma: 1.0 }, grid()).unwrap();
        let mix = g.add(&h1).unwrap();
        assert_eq!(mix.parity_hint(), Parity::None);
        let (e, o) = parity_defect(&mix).unwrap();
        // mix − mix∨ = 2h₁ and ‖mix‖ = √2, so each defect is 1/√2
        let half = 0.5 * 2f64.sqrt();
        assert!((e - half).abs() < 1e-10 && (o - half).abs() < 1e-10, "{e} {o}");
    }

    #[test]
    fn reflect_properties() {
        let g = sample(&WindowSpec::Gaussian { gamma: 1.3 }, grid()).unwrap();
        let h1 = sample(&WindowSpec::Hermite { n: 1, gamma: 1.0 }, grid()).unwrap();
        let mix = g.add(&h1).unwrap();
        assert_eq!(reflect(&reflect(&mix)), mix);
        assert!(reflect(&g).distance(&g).unwrap() < 1e-12);
        assert!(reflect(&h1).distance(&h1.scaled(Complex64::new(-1.0, 0.0))).unwrap() < 1e-12);
    }

    #[test]
    fn parity_defect_rejects_zero() {
        let z = SampledWindow::from_values(grid(), vec![ZERO; 2048], Parity::None).unwrap();
        assert_eq!(parity_defect(&z), Err(Error::ZeroWindow));
        assert!(z.normalized().is_err());
    }

    #[test]
    fn bump_is_odd_and_compact() {
        let w = sample(&WindowSpec::OddCompactBump, grid()).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-12);
        assert!(parity_defect(&w).unwrap().1 < 1e-12);
        assert!(w.values().iter().zip(grid().times()).all(|(v, t)| t.abs() < 1.0 || *v == ZERO));
    }

    #[test]
    fn s0_gaussian_and_tail() {
        let g = sample(&WindowSpec::Gaussian { gamma: 1.0 }, grid()).unwrap();
        let v8 = s0_diagnostic(&g, 8, 0.125).unwrap();
        assert!((v8 - 2.0).abs() < 1e-6, "{v8}");
        let v4 = s0_diagnostic(&g, 4, 0.125).unwrap();
        assert!((v8 - v4).abs() < 1e-6);
        let h1 = sample(&WindowSpec::Hermite { n: 1, gamma: 1.0 }, grid()).unwrap();
        let (a, b) = (s0_diagnostic(&h1, 4, 0.125).unwrap(), s0_diagnostic(&h1, 8, 0.125).unwrap());
        assert!(a.is_finite() && (a - b).abs() < 1e-6 * b);
    }

    #[test]
    fn shifted_paths_agree() {
        let g = sample(&WindowSpec::Gaussian { gamma: 1.0 }, grid()).unwrap();
        let exact = g.shifted(0.5);
        let via_spline: Vec<Complex64> = grid().times().map(|t| g.eval(t - 0.5)).collect();
        let err = exact.iter().zip(&via_spline).skip(1).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-12);
        let off = g.shifted(0.3 + 1e-4);
        let truth = |t: f64| 2f64.powf(0.25) * (-PI * t * t).exp();
        let err =
            off.iter().zip(grid().times()).skip(1).map(|(v, t)| (v.re - truth(t - 0.3001)).abs()).fold(0.0, f64::max);
        assert!(err < 5e-7, "{err}");
    }

    #[test]
    fn csv_parsing() {
        let pts = parse_window_csv("t,value\n# c\n0.5,1\n-0.5,1\n0,2,0.5\n").unwrap();
        assert_eq!(pts.len(), 3);
        assert_eq!(pts[0].0, -0.5);
        assert_eq!(pts[1].1, Complex64::new(2.0, 0.5));
        assert!(parse_window_csv("1,2\n1,3\n").is_err());
        assert!(parse_window_csv("1,2\nx,3\n").is_err());
        assert!(parse_window_csv("1,2,3,4\n2,3\n").is_err());
        assert!(parse_window_csv("").is_err());
    }

    #[test]
    fn from_points_resamples_gaussian() {
        let pts: Vec<(f64, Complex64)> =
            (0..=400).map(|i| -5.0 + 0.025 * i as f64).map(|t| (t, Complex64::new((-PI * t * t).exp(), 0.0))).collect();
        let w = from_points(&pts, grid()).unwrap();
        let g = sample(&WindowSpec::Gaussian { gamma: 1.0 }, grid()).unwrap();
        assert!(w.distance(&g).unwrap() < 1e-5);
    }

    #[test]
    fn samples_spec_round_trip() {
        let g = sample(&WindowSpec::Gaussian { gamma: 1.0 }, grid()).unwrap();
        let spec = WindowSpec::Samples { grid: grid(), values: g.values().to_vec() };
        let w = sample(&spec, grid()).unwrap();
        assert!(w.distance(&g).unwrap() < 1e-14);
        assert!(sample(&WindowSpec::Gaussian { gamma: -1.0 }, grid()).is_err());
    }
}
