use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{integer_density, Diagnostics, FrameBounds, IMAG_TOL, TRUNCATION_TOL};
use crate::error::{Error, Result};
use crate::tfa::{stft_rows, TFPoint};
use crate::windows::{parity_defect, SampledWindow};

/// Parity tolerance for the certificates.
const PARITY_TOL: f64 = 1e-6;

/// Coefficients `V_g g(k/β, l/α)`, `|k|, |l| ≤ K`, of the Janssen symbol
/// `(αβ)^{-1} Σ V_g g(k/β, l/α) e^{2πi(kω + lx)}`.
#[derive(Debug, Clone)]
pub struct JanssenSeries {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
    /// Row `k + K` holds the coefficients for time index `k`.
    pub coefficients: Vec<Vec<Complex64>>,
}

impl JanssenSeries {
    pub fn new(g: &SampledWindow, alpha: f64, beta: f64, k: usize) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("α, β must be positive, got {alpha}, {beta}")));
        }
        let ki = k as i64;
        let xs: Vec<f64> = (-ki..=ki).map(|j| j as f64 / beta).collect();
        let omegas: Vec<f64> = (-ki..=ki).map(|l| l as f64 / alpha).collect();
        let coefficients = stft_rows(g, g, &xs, &omegas)?;
        Ok(Self { alpha, beta, k, coefficients })
    }

    /// Share of `Σ|c|` carried by the boundary ring `max(|k|, |l|) = K`.
    pub fn tail_ratio(&self) -> f64 {
        let last = 2 * self.k;
        let mut total = 0.0;
        let mut ring = 0.0;
        for (i, row) in self.coefficients.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                total += c.norm();
                if i == 0 || j == 0 || i == last || j == last {
                    ring += c.norm();
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            ring / total
        }
    }

    pub fn symbol(&self, p: TFPoint) -> Complex64 {
        let ki = self.k as i64;
        let ex: Vec<Complex64> = (-ki..=ki).map(|l| Complex64::from_polar(1.0, 2.0 * PI * l as f64 * p.x)).collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, row) in self.coefficients.iter().enumerate() {
            let inner: Complex64 = row.iter().zip(&ex).map(|(c, e)| c * e).sum();
            acc += inner * Complex64::from_polar(1.0, 2.0 * PI * (i as i64 - ki) as f64 * p.omega);
        }
        acc / (self.alpha * self.beta)
    }

    /// Symbol on the `n × n` grid `(i/n, j/n)`; entry `[i][j]` is at
    /// `x = i/n`, `ω = j/n`.
    pub fn symbol_grid(&self, n: usize) -> Vec<Vec<Complex64>> {
        let ki = self.k as i64;
        let m = self.coefficients.len();
        let scale = 1.0 / (self.alpha * self.beta);
        let phase = |a: i64, b: usize| {
            Complex64::from_polar(1.0, 2.0 * PI * ((a * b as i64).rem_euclid(n as i64)) as f64 / n as f64)
        };
        let omega_tab: Vec<Vec<Complex64>> = (0..n).map(|j| (-ki..=ki).map(|k| phase(k, j)).collect()).collect();
        (0..n)
            .into_par_iter()
            .map(|i| {
                let ex: Vec<Complex64> = (-ki..=ki).map(|l| phase(l, i)).collect();
                let u: Vec<Complex64> =
                    (0..m).map(|r| self.coefficients[r].iter().zip(&ex).map(|(c, e)| c * e).sum()).collect();
                omega_tab.iter().map(|tab| u.iter().zip(tab).map(|(a, b)| a * b).sum::<Complex64>() * scale).collect()
            })
            .collect()
    }
}

/// The Janssen symbol at `p`.
pub fn janssen_symbol(g: &SampledWindow, alpha: f64, beta: f64, k: usize, p: TFPoint) -> Result<Complex64> {
    Ok(JanssenSeries::new(g, alpha, beta, k)?.symbol(p))
}

/// Minimizes `f` over `[0,1)²` near `start` by successive 8× zooms of a
/// 17 × 17 stencil.
pub(crate) fn zoom_minimize(f: impl Fn(f64, f64) -> f64, start: (f64, f64), cell: (f64, f64)) -> ((f64, f64), f64) {
    let mut best = start;
    let mut best_v = f(start.0, start.1);
    let (mut hx, mut hy) = cell;
    for _ in 0..4 {
        let center = best;
        for a in -8..=8 {
            for b in -8..=8 {
                let x = center.0 + a as f64 * hx / 8.0;
                let y = center.1 + b as f64 * hy / 8.0;
                let v = f(x, y);
                if v < best_v {
                    best_v = v;
                    best = (x, y);
                }
            }
        }
        hx /= 8.0;
        hy /= 8.0;
    }
    (best, best_v)
}

/// Indices of the `count` smallest values of `key`, ties broken by index.
pub(crate) fn smallest_indices(values: &[f64], count: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx.truncate(count);
    idx
}

/// Sharp bounds for `G(g, αℤ × βℤ)` with `1/(αβ) ∈ ℕ`: extrema of the real
/// part of the symbol over a `grid_n²` grid on `[0,1)²`, refined by local
/// zoom around the best grid points.
pub fn janssen_bounds(g: &SampledWindow, alpha: f64, beta: f64, k: usize, grid_n: usize) -> Result<FrameBounds> {
    janssen_bounds_refined(g, alpha, beta, k, grid_n, super::BoundsConfig::default().refine)
}

pub(crate) fn janssen_bounds_refined(
    g: &SampledWindow,
    alpha: f64,
    beta: f64,
    k: usize,
    grid_n: usize,
    refine: usize,
) -> Result<FrameBounds> {
    if integer_density(1.0 / (alpha * beta)).is_none() {
        return Err(Error::Hypothesis(format!("Janssen bounds need 1/(αβ) ∈ ℕ, got {}", 1.0 / (alpha * beta))));
    }
    if grid_n == 0 {
        return Err(Error::InvalidParameter("grid_n must be positive".into()));
    }
    let series = JanssenSeries::new(g, alpha, beta, k)?;
    let tail = series.tail_ratio();
    if !(tail < TRUNCATION_TOL) {
        return Err(Error::Truncation { ratio: tail });
    }
    let grid = series.symbol_grid(grid_n);
    let flat: Vec<Complex64> = grid.into_iter().flatten().collect();
    let imag = flat.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    let re: Vec<f64> = flat.iter().map(|v| v.re).collect();
    let neg: Vec<f64> = re.iter().map(|v| -v).collect();
    let n = grid_n as f64;
    let cell = (1.0 / n, 1.0 / n);
    let at = |i: usize| ((i / grid_n) as f64 / n, (i % grid_n) as f64 / n);
    let refine_extreme = |vals: &[f64], sign: f64| {
        let starts = smallest_indices(vals, refine.max(1));
        let results: Vec<f64> = starts
            .par_iter()
            .map(|&i| zoom_minimize(|x, w| sign * series.symbol(TFPoint::new(x, w)).re, at(i), cell).1)
            .collect();
        results.into_iter().fold(f64::INFINITY, f64::min) * sign
    };
    let a = refine_extreme(&re, 1.0);
    let b = refine_extreme(&neg, -1.0);
    let mut diag = Diagnostics {
        truncation_k: Some(k),
        grid_n: Some(grid_n),
        max_imag_residual: Some(imag),
        tail_ratio: Some(tail),
        ..Default::default()
    };
    if imag >= IMAG_TOL {
        diag.warnings.push(format!("imaginary residual {imag:.3e} exceeds {IMAG_TOL:e}"));
    }
    Ok(FrameBounds::new(a, b, "janssen", diag))
}

fn require_parity(g: &SampledWindow, even: bool) -> Result<()> {
    let (even_defect, odd_defect) = parity_defect(g)?;
    let defect = if even { even_defect } else { odd_defect };
    if defect < PARITY_TOL {
        Ok(())
    } else {
        let which = if even { "even" } else { "odd" };
        Err(Error::Parity(format!("window is not {which} (defect {defect:.3e})")))
    }
}

/// `|Σ V_g g(k, l) (−1)^{k+l}|` over `|k|, |l| ≤ K`: the critical-density
/// Janssen symbol of an even window at `(1/2, 1/2)`.
pub fn certify_even_critical(g: &SampledWindow, k: usize) -> Result<f64> {
    require_parity(g, true)?;
    Ok(janssen_symbol(g, 1.0, 1.0, k, TFPoint::new(0.5, 0.5))?.norm())
}

/// `|Σ V_g g(k, l)|`: the critical-density symbol of an odd window at the
/// origin.
pub fn certify_odd_critical(g: &SampledWindow, k: usize) -> Result<f64> {
    require_parity(g, false)?;
    Ok(janssen_symbol(g, 1.0, 1.0, k, TFPoint::new(0.0, 0.0))?.norm())
}

/// `|Σ 2·A_g g(2k, l)|`: the symbol of `ℤ × (1/2)ℤ` at the origin, for an
/// odd window.
pub fn certify_odd_density2(g: &SampledWindow, k: usize) -> Result<f64> {
    require_parity(g, false)?;
    let series = JanssenSeries::new(g, 1.0, 0.5, k)?;
    let ki = k as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, row) in series.coefficients.iter().enumerate() {
        let x = 2.0 * (i as i64 - ki) as f64;
        for (j, v) in row.iter().enumerate() {
            let omega = (j as i64 - ki) as f64;
            acc += 2.0 * Complex64::from_polar(1.0, PI * x * omega) * v;
        }
    }
    Ok(acc.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::windows::{sample, TimeGrid, WindowSpec};

    fn win(spec: WindowSpec) -> SampledWindow {
        sample(&spec, TimeGrid::default()).unwrap()
    }

    fn gauss(gamma: f64) -> SampledWindow {
        win(WindowSpec::Gaussian { gamma })
    }

    fn herm(n: usize) -> SampledWindow {
        win(WindowSpec::Hermite { n, gamma: 1.0 })
    }

    /// `Σ_l e^{−πl²} e^{2πilx}`.
    fn theta(x: f64) -> f64 {
        (-30i32..=30).map(|l| (-PI * (l * l) as f64).exp() * (2.0 * PI * l as f64 * x).cos()).sum()
    }

    #[test]
    fn symbol_examples() {
        let g = gauss(1.0);
        assert!(janssen_symbol(&g, 1.0, 1.0, 20, TFPoint::new(0.5, 0.5)).unwrap().norm() < 1e-8);
        assert!(janssen_symbol(&herm(1), 1.0, 1.0, 20, TFPoint::new(0.0, 0.0)).unwrap().norm() < 1e-8);
        for (a, b) in [(1.0, 1.0), (0.5, 1.0), (1.0, 0.25)] {
            let s = janssen_symbol(&herm(2), a, b, 0, TFPoint::new(0.0, 0.0)).unwrap();
            assert!((s - Complex64::new(1.0 / (a * b), 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn grid_matches_direct_evaluation() {
        let s = JanssenSeries::new(&herm(2), 1.0, 0.5, 6).unwrap();
        let grid = s.symbol_grid(8);
        for (i, j) in [(0, 0), (3, 5), (7, 1)] {
            let direct = s.symbol(TFPoint::new(i as f64 / 8.0, j as f64 / 8.0));
            assert!((grid[i][j] - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_closed_form_bounds() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let fb = janssen_bounds(&gauss(1.0), r, r, 20, 256).unwrap();
        let (a, b) = (2.0 * theta(0.5).powi(2), 2.0 * theta(0.0).powi(2));
        assert!((fb.a - a).abs() < 1e-6 && (fb.b - b).abs() < 1e-6, "{fb:?}");
        assert!(0.0 < fb.a && fb.a < 2.0 && 2.0 < fb.b);
        assert!(fb.diagnostics.max_imag_residual.unwrap() < 1e-8);
        assert!(fb.diagnostics.warnings.is_empty());
        assert_eq!(fb.method, "janssen");
    }

    #[test]
    fn vanishing_lower_bounds() {
        let fb = janssen_bounds(&herm(1), 1.0, 0.5, 20, 256).unwrap();
        assert!(fb.a < 1e-8 * fb.b, "{fb:?}");
        let fb = janssen_bounds(&gauss(1.0), 1.0, 1.0, 20, 256).unwrap();
        assert!(fb.a < 1e-8 * fb.b, "{fb:?}");
    }

    #[test]
    fn hypotheses() {
        assert!(matches!(janssen_bounds(&gauss(1.0), 0.8, 0.9, 20, 64), Err(Error::Hypothesis(_))));
        let bump = win(WindowSpec::OddCompactBump);
        assert!(matches!(janssen_bounds(&bump, 1.0, 1.0, 20, 64), Err(Error::Truncation { .. })));
    }

    #[test]
    fn certificate_examples() {
        for g in [gauss(1.0), gauss(2.0), herm(2)] {
            assert!(certify_even_critical(&g, 20).unwrap() < 1e-8);
        }
        for g in [herm(1), herm(3)] {
            assert!(certify_odd_critical(&g, 20).unwrap() < 1e-8);
            assert!(certify_odd_density2(&g, 20).unwrap() < 1e-8);
        }
        assert!(certify_odd_critical(&win(WindowSpec::OddCompactBump), 20).unwrap() < 1e-6);
        assert!(matches!(certify_odd_density2(&gauss(1.0), 20), Err(Error::Parity(_))));
        assert!(matches!(certify_even_critical(&herm(1), 20), Err(Error::Parity(_))));
    }

    #[test]
    fn zoom_finds_offgrid_minimum() {
        let f = |x: f64, y: f64| (x - 0.3217).powi(2) + (y - 0.6001).powi(2);
        let (p, v) = zoom_minimize(f, (0.3125, 0.59375), (1.0 / 32.0, 1.0 / 32.0));
        assert!(v < 1e-10 && (p.0 - 0.3217).abs() < 1e-5 && (p.1 - 0.6001).abs() < 1e-5);
    }
}
