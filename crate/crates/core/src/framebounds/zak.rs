use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::janssen::{smallest_indices, zoom_minimize};
use super::{recognize_rational, BoundsConfig, Diagnostics, FrameBounds};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::sampling::{random_test_function, rng};
use crate::tfa::{stft, TFPoint};
use crate::windows::SampledWindow;

/// Relative tolerance of the oracle self-test.
const ORACLE_TOL: f64 = 1e-5;
/// Lattice radius of the oracle self-test.
const ORACLE_RADIUS: f64 = 10.0;

/// Matrix-valued Zak symbol of `G(g, αℤ × βℤ)` with `αβ = q/p`.
///
/// With `Zg(x, ν) = Σ_k g(x − k/β) e^{2πikν}` and the `p × q` matrix
/// `G_{r,c}(x, ν) = Zg(x − rα, ν + c/q)`,
///
/// ```text
/// Σ_λ |⟨f, π(λ)g⟩|² = (βq)^{-1} ∫_0^{1/β} ∫_0^{1/q} ‖conj(G) F‖² dν dx,
/// ‖f‖²              =           ∫_0^{1/β} ∫_0^{1/q} ‖F‖² dν dx,
/// ```
///
/// where `F_c = Zf(x, ν + c/q)`. The frame bounds are the extreme
/// eigenvalues of `G*G/(βq)` over `[0, α) × [0, 1/q)`.
pub struct ZakSymbol<'a> {
    pub alpha: f64,
    pub beta: f64,
    pub p: u64,
    pub q: u64,
    g: &'a SampledWindow,
}

/// `(k₀, [g(y − k/β)]_{k ≥ k₀})` over the `k` with `y − k/β` on the grid.
fn zak_samples(g: &SampledWindow, beta: f64, y: f64) -> (i64, Vec<Complex64>) {
    let t = g.grid().extent();
    let k0 = ((y - t) * beta).ceil() as i64;
    let k1 = ((y + t) * beta).floor() as i64;
    let vals = (k0..=k1).map(|k| g.eval(y - k as f64 / beta)).collect();
    (k0, vals)
}

/// `Σ_i v_i e^{2πi(k₀+i)ν}`.
fn zak_sum(k0: i64, vals: &[Complex64], nu: f64) -> Complex64 {
    let z = Complex64::from_polar(1.0, 2.0 * PI * nu);
    let mut acc = Complex64::new(0.0, 0.0);
    for v in vals.iter().rev() {
        acc = acc * z + v;
    }
    acc * Complex64::from_polar(1.0, 2.0 * PI * (k0 as f64 * nu).fract())
}

impl<'a> ZakSymbol<'a> {
    pub fn new(g: &'a SampledWindow, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("α, β must be positive, got {alpha}, {beta}")));
        }
        let (p, q) = recognize_rational(alpha * beta).ok_or_else(|| {
            Error::Hypothesis(format!(
                "αβ = {} is not a rational with denominator ≤ {}",
                alpha * beta,
                super::MAX_DENOMINATOR
            ))
        })?;
        if p < q {
            return Err(Error::Hypothesis(format!("density {} is below 1", 1.0 / (alpha * beta))));
        }
        Ok(Self { alpha, beta, p, q, g })
    }

    /// Builds the symbol and checks it against the lattice sum on a seeded
    /// random test function.
    pub fn checked(g: &'a SampledWindow, alpha: f64, beta: f64) -> Result<Self> {
        let sym = Self::new(g, alpha, beta)?;
        let f = random_test_function(&mut rng(0x5a4b), *g.grid());
        let (form, sum) = sym.oracle(&f, ORACLE_RADIUS)?;
        let rel = (form - sum).abs() / sum.abs().max(f64::MIN_POSITIVE);
        if !(rel < ORACLE_TOL) {
            return Err(Error::Numerical(format!("Zak symbol self-test failed: relative mismatch {rel:.3e}")));
        }
        Ok(sym)
    }

    pub fn zak(&self, y: f64, nu: f64) -> Complex64 {
        let (k0, vals) = zak_samples(self.g, self.beta, y);
        zak_sum(k0, &vals, nu)
    }

    fn rows(&self, w: &SampledWindow, x: f64, shifts: u64) -> Vec<(i64, Vec<Complex64>)> {
        (0..shifts).map(|r| zak_samples(w, self.beta, x - r as f64 * self.alpha)).collect()
    }

    fn matrix_from_rows(&self, rows: &[(i64, Vec<Complex64>)], nu: f64) -> DMatrix<Complex64> {
        let (p, q) = (self.p as usize, self.q as usize);
        DMatrix::from_fn(p, q, |r, c| zak_sum(rows[r].0, &rows[r].1, nu + c as f64 / q as f64))
    }

    /// The `p × q` matrix `G(x, ν)`.
    pub fn matrix(&self, x: f64, nu: f64) -> DMatrix<Complex64> {
        self.matrix_from_rows(&self.rows(self.g, x, self.p), nu)
    }

    fn extremes_from_rows(&self, rows: &[(i64, Vec<Complex64>)], nu: f64) -> (f64, f64) {
        let g = self.matrix_from_rows(rows, nu);
        let scale = 1.0 / (self.beta * self.q as f64);
        let gram = g.adjoint() * &g;
        if gram.nrows() == 1 {
            let v = gram[(0, 0)].re * scale;
            return (v, v);
        }
        let ev = gram.symmetric_eigenvalues();
        (ev.min() * scale, ev.max() * scale)
    }

    /// Extreme eigenvalues of `G*G/(βq)` at `(x, ν)`.
    pub fn extremes(&self, x: f64, nu: f64) -> (f64, f64) {
        self.extremes_from_rows(&self.rows(self.g, x, self.p), nu)
    }

    /// `(symbol quadratic form, ‖f‖²)` by the trapezoid rule with `n_x × n_nu`
    /// nodes on `[0, 1/β) × [0, 1/q)`.
    pub fn quadratic_form(&self, f: &SampledWindow, n_x: usize, n_nu: usize) -> Result<(f64, f64)> {
        if f.grid() != self.g.grid() {
            return Err(Error::GridMismatch);
        }
        let q = self.q as usize;
        let parts: Vec<(f64, f64)> = (0..n_x)
            .into_par_iter()
            .map(|i| {
                let x = i as f64 / (self.beta * n_x as f64);
                let grows = self.rows(self.g, x, self.p);
                let (fk0, fvals) = zak_samples(f, self.beta, x);
                let mut form = 0.0;
                let mut norm = 0.0;
                for j in 0..n_nu {
                    let nu = j as f64 / (q * n_nu) as f64;
                    let gm = self.matrix_from_rows(&grows, nu);
                    let fv: Vec<Complex64> = (0..q).map(|c| zak_sum(fk0, &fvals, nu + c as f64 / q as f64)).collect();
                    for r in 0..self.p as usize {
                        let h: Complex64 = (0..q).map(|c| gm[(r, c)].conj() * fv[c]).sum();
                        form += h.norm_sqr();
                    }
                    norm += fv.iter().map(|v| v.norm_sqr()).sum::<f64>();
                }
                (form, norm)
            })
            .collect();
        let cell = 1.0 / (self.beta * n_x as f64) / (q * n_nu) as f64;
        let (form, norm) = parts.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
        Ok((form * cell / (self.beta * q as f64), norm * cell))
    }

    /// `(symbol quadratic form, Σ_{λ ∈ Λ, ‖λ‖ ≤ radius} |⟨f, π(λ)g⟩|²)`.
    pub fn oracle(&self, f: &SampledWindow, radius: f64) -> Result<(f64, f64)> {
        let h = f.grid().spacing();
        let period = 1.0 / (self.beta * h);
        // On-grid nodes when the x-period is a whole number of samples.
        let n_x = if (period - period.round()).abs() < 1e-9 {
            period.round() as usize
        } else {
            (period.ceil() as usize).max(64)
        };
        let (form, _) = self.quadratic_form(f, n_x, 128)?;
        let lat = Lattice::separable(self.alpha, self.beta)?;
        let pts = lat.enumerate(radius);
        let terms: Vec<f64> = pts
            .par_iter()
            .map(|p| stft(f, self.g, TFPoint::new(p[0], p[1])).map(|v| v.norm_sqr()))
            .collect::<Result<_>>()?;
        Ok((form, terms.iter().sum()))
    }
}

/// `(symbol quadratic form, truncated lattice sum)` for `f`, the binding
/// check of the Zak construction.
pub fn zak_oracle_check(
    g: &SampledWindow,
    alpha: f64,
    beta: f64,
    f: &SampledWindow,
    radius: f64,
) -> Result<(f64, f64)> {
    ZakSymbol::new(g, alpha, beta)?.oracle(f, radius)
}

/// Sharp bounds for `G(g, αℤ × βℤ)` with rational `αβ ≤ 1`.
pub fn zak_bounds(g: &SampledWindow, alpha: f64, beta: f64, grid_n: usize) -> Result<FrameBounds> {
    zak_bounds_cfg(g, alpha, beta, &BoundsConfig { grid_n, ..Default::default() })
}

pub(crate) fn zak_bounds_cfg(g: &SampledWindow, alpha: f64, beta: f64, cfg: &BoundsConfig) -> Result<FrameBounds> {
    let n = cfg.grid_n;
    if n == 0 {
        return Err(Error::InvalidParameter("grid_n must be positive".into()));
    }
    let sym = if cfg.zak_self_test { ZakSymbol::checked(g, alpha, beta)? } else { ZakSymbol::new(g, alpha, beta)? };
    let sym = &sym;
    let nu_span = 1.0 / sym.q as f64;
    // Eigenvalues are 1/q-periodic in ν; keep the absolute ν resolution of a
    // q = 1 grid instead of refining a shrinking cell.
    let m = (n / sym.q as usize).clamp(n.min(16), n);
    let at = |i: usize| ((i / m) as f64 * alpha / n as f64, (i % m) as f64 * nu_span / m as f64);
    let grid: Vec<(f64, f64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let rows = sym.rows(g, i as f64 * alpha / n as f64, sym.p);
            (0..m).map(move |j| sym.extremes_from_rows(&rows, j as f64 * nu_span / m as f64)).collect::<Vec<_>>()
        })
        .collect();
    let lo: Vec<f64> = grid.iter().map(|e| e.0).collect();
    let hi: Vec<f64> = grid.iter().map(|e| -e.1).collect();
    let cell = (alpha / n as f64, nu_span / m as f64);
    let refine = |vals: &[f64], pick: fn((f64, f64)) -> f64, sign: f64| {
        smallest_indices(vals, cfg.refine.max(1))
            .par_iter()
            .map(|&i| zoom_minimize(|x, nu| sign * pick(sym.extremes(x, nu)), at(i), cell).1)
            .collect::<Vec<f64>>()
            .into_iter()
            .fold(f64::INFINITY, f64::min)
            * sign
    };
    let a = refine(&lo, |e| e.0, 1.0);
    let b = refine(&hi, |e| e.1, -1.0);
    let diag = Diagnostics { grid_n: Some(n), p: Some(sym.p), q: Some(sym.q), ..Default::default() };
    Ok(FrameBounds::new(a, b, "zak", diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framebounds::janssen_bounds;
    use crate::windows::{sample, TimeGrid, WindowSpec};

    fn win(spec: WindowSpec) -> SampledWindow {
        sample(&spec, TimeGrid::default()).unwrap()
    }

    #[test]
    fn agrees_with_janssen_at_integer_density() {
        let g = win(WindowSpec::Gaussian { gamma: 1.0 });
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let j = janssen_bounds(&g, r, r, 20, 128).unwrap();
        let z = zak_bounds(&g, r, r, 128).unwrap();
        assert!((j.a - z.a).abs() < 1e-3 * j.b && (j.b - z.b).abs() < 1e-3 * j.b, "{j:?} {z:?}");
        let h = win(WindowSpec::Hermite { n: 2, gamma: 1.0 });
        let j = janssen_bounds(&h, 1.0, 0.5, 20, 128).unwrap();
        let z = zak_bounds(&h, 1.0, 0.5, 128).unwrap();
        assert!((j.a - z.a).abs() < 1e-3 * j.b && (j.b - z.b).abs() < 1e-3 * j.b, "{j:?} {z:?}");
    }

    #[test]
    fn rational_density_examples() {
        let g = win(WindowSpec::Gaussian { gamma: 1.0 });
        let s = (2.0f64 / 3.0).sqrt();
        let fb = zak_bounds(&g, s, s, 64).unwrap();
        assert!(fb.a > 1e-2 * fb.b, "{fb:?}");
        assert_eq!((fb.diagnostics.p, fb.diagnostics.q), (Some(3), Some(2)));
        let h1 = win(WindowSpec::Hermite { n: 1, gamma: 1.0 });
        let fb = zak_bounds(&h1, s, s, 64).unwrap();
        assert!(fb.a < 1e-3 * fb.b, "{fb:?}");
    }

    #[test]
    fn hypotheses() {
        let g = win(WindowSpec::Gaussian { gamma: 1.0 });
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(matches!(zak_bounds(&g, r, 1.0, 32), Err(Error::Hypothesis(_))));
        assert!(matches!(zak_bounds(&g, 1.0, 2.0, 32), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn oracle_equivalence_on_grid() {
        let g = win(WindowSpec::Hermite { n: 2, gamma: 1.0 });
        for (alpha, beta) in [(0.5, 1.0), (0.5, 4.0 / 3.0), (0.75, 1.0)] {
            let f = random_test_function(&mut rng(3), TimeGrid::default());
            let (form, sum) = zak_oracle_check(&g, alpha, beta, &f, 10.0).unwrap();
            assert!((form - sum).abs() < 1e-5 * sum, "{alpha} {beta}: {form} {sum}");
        }
        assert!(ZakSymbol::checked(&g, 0.5, 1.0).is_ok());
    }

    #[test]
    fn zak_norm_identity() {
        let g = win(WindowSpec::Gaussian { gamma: 1.0 });
        let sym = ZakSymbol::new(&g, 0.5, 1.0).unwrap();
        let f = random_test_function(&mut rng(9), TimeGrid::default());
        let (_, norm) = sym.quadratic_form(&f, 64, 128).unwrap();
        assert!((norm - 1.0).abs() < 1e-10, "{norm}");
    }
}
