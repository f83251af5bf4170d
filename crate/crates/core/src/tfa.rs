//! Time-frequency transforms of sampled windows (d = 1).
//!
//! All integrals are plain Riemann sums with the grid spacing `h`. For the
//! smooth, rapidly decaying windows used here this is spectrally accurate.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::windows::{reflect, SampledWindow};

/// A point `λ = (x, ω)` of the time-frequency plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TFPoint {
    pub x: f64,
    pub omega: f64,
}

impl TFPoint {
    pub const fn new(x: f64, omega: f64) -> Self {
        Self { x, omega }
    }
}

fn check_grids(f: &SampledWindow, g: &SampledWindow) -> Result<()> {
    if f.grid() != g.grid() {
        Err(Error::GridMismatch)
    } else {
        Ok(())
    }
}

/// `f(t_j)·conj(g(t_j − x))`, trimmed to its non-zero index range.
struct Product {
    start: usize,
    values: Vec<Complex64>,
}

impl Product {
    fn new(f: &SampledWindow, g: &SampledWindow, x: f64) -> Self {
        let shifted = g.shifted(x);
        let full: Vec<Complex64> = f.values().iter().zip(&shifted).map(|(a, b)| a * b.conj()).collect();
        let start = full.iter().position(|v| *v != Complex64::new(0.0, 0.0)).unwrap_or(full.len());
        let end = full.iter().rposition(|v| *v != Complex64::new(0.0, 0.0)).map_or(start, |e| e + 1);
        Self { start, values: full[start..end].to_vec() }
    }

    /// `h Σ_j p_j e^{−2πiωt_j}`.
    fn transform(&self, f: &SampledWindow, omega: f64) -> Complex64 {
        let grid = f.grid();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, p) in self.values.iter().enumerate() {
            let t = grid.t(self.start + k);
            let (s, c) = (-2.0 * PI * omega * t).sin_cos();
            acc += p * Complex64::new(c, s);
        }
        acc * grid.spacing()
    }
}

/// `V_g f(x, ω) = ∫ f(t) conj(g(t − x)) e^{−2πiωt} dt = ⟨f, π(λ)g⟩`.
pub fn stft(f: &SampledWindow, g: &SampledWindow, p: TFPoint) -> Result<Complex64> {
    check_grids(f, g)?;
    Ok(Product::new(f, g, p.x).transform(f, p.omega))
}

/// `V_g f` on the tensor grid `xs × omegas`; row `i` holds `x = xs[i]`.
pub fn stft_rows(f: &SampledWindow, g: &SampledWindow, xs: &[f64], omegas: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    check_grids(f, g)?;
    Ok(xs
        .par_iter()
        .map(|&x| {
            let prod = Product::new(f, g, x);
            omegas.iter().map(|&w| prod.transform(f, w)).collect()
        })
        .collect())
}

/// `A_g f(x, ω) = e^{πixω} V_g f(x, ω)`.
pub fn ambiguity(f: &SampledWindow, g: &SampledWindow, p: TFPoint) -> Result<Complex64> {
    Ok(Complex64::from_polar(1.0, PI * p.x * p.omega) * stft(f, g, p)?)
}

/// `W_g f(x, ω) = 2·A_{g∨} f(2x, 2ω)`.
pub fn wigner(f: &SampledWindow, g: &SampledWindow, p: TFPoint) -> Result<Complex64> {
    check_grids(f, g)?;
    Ok(2.0 * ambiguity(f, &reflect(g), TFPoint::new(2.0 * p.x, 2.0 * p.omega))?)
}

/// Samples of a function on a rectangular time-frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TFGrid {
    pub x0: f64,
    pub dx: f64,
    pub nx: usize,
    pub omega0: f64,
    pub domega: f64,
    pub nomega: usize,
    /// Row-major: `values[i * nomega + k]` at `(x0 + i·dx, omega0 + k·domega)`.
    pub values: Vec<Complex64>,
}

impl TFGrid {
    /// Symmetric grid `[−extent, extent]²` with spacing `step` on both axes.
    pub fn symmetric(extent: f64, step: f64, f: impl Fn(TFPoint) -> Complex64 + Sync) -> Result<Self> {
        if !(extent > 0.0 && step > 0.0) {
            return Err(Error::InvalidParameter("TF grid needs positive extent and step".into()));
        }
        let m = (extent / step).round() as usize;
        let n = 2 * m + 1;
        let start = -(m as f64) * step;
        let values = (0..n * n)
            .into_par_iter()
            .map(|idx| f(TFPoint::new(start + (idx / n) as f64 * step, start + (idx % n) as f64 * step)))
            .collect();
        Ok(Self { x0: start, dx: step, nx: n, omega0: start, domega: step, nomega: n, values })
    }

    pub fn point(&self, i: usize, k: usize) -> TFPoint {
        TFPoint::new(self.x0 + i as f64 * self.dx, self.omega0 + k as f64 * self.domega)
    }

    /// CSV rows `x,omega,re,im`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,omega,re,im\n");
        for i in 0..self.nx {
            for k in 0..self.nomega {
                let p = self.point(i, k);
                let v = self.values[i * self.nomega + k];
                let _ = writeln!(out, "{:.11e},{:.11e},{:.11e},{:.11e}", p.x, p.omega, v.re, v.im);
            }
        }
        out
    }
}

/// `A_g f` sampled on `[−extent, extent]²`.
pub fn ambiguity_grid(f: &SampledWindow, g: &SampledWindow, extent: f64, step: f64) -> Result<TFGrid> {
    check_grids(f, g)?;
    let m = (extent / step).round() as usize;
    let coords: Vec<f64> = (0..=2 * m).map(|i| (i as f64 - m as f64) * step).collect();
    let rows = stft_rows(f, g, &coords, &coords)?;
    let values = rows
        .iter()
        .enumerate()
        .flat_map(|(i, row)| {
            let x = coords[i];
            row.iter().zip(&coords).map(move |(v, w)| Complex64::from_polar(1.0, PI * x * w) * v)
        })
        .collect();
    Ok(TFGrid {
        x0: coords[0],
        dx: step,
        nx: coords.len(),
        omega0: coords[0],
        domega: step,
        nomega: coords.len(),
        values,
    })
}

/// `W_g f` sampled on `[−extent, extent]²`.
pub fn wigner_grid(f: &SampledWindow, g: &SampledWindow, extent: f64, step: f64) -> Result<TFGrid> {
    let mut grid = ambiguity_grid(f, &reflect(g), 2.0 * extent, 2.0 * step)?;
    grid.x0 /= 2.0;
    grid.dx /= 2.0;
    grid.omega0 /= 2.0;
    grid.domega /= 2.0;
    grid.values.iter_mut().for_each(|v| *v *= 2.0);
    Ok(grid)
}

/// `F_σ F(x, ω) = ∬ F(x′, ω′) e^{2πi(xω′ − ωx′)} dx′ dω′` by direct quadrature.
pub fn symplectic_ft(f: &TFGrid, p: TFPoint) -> Complex64 {
    let row_phase: Vec<Complex64> =
        (0..f.nx).map(|i| Complex64::from_polar(1.0, -2.0 * PI * p.omega * (f.x0 + i as f64 * f.dx))).collect();
    let col_phase: Vec<Complex64> =
        (0..f.nomega).map(|k| Complex64::from_polar(1.0, 2.0 * PI * p.x * (f.omega0 + k as f64 * f.domega))).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, rp) in row_phase.iter().enumerate() {
        let row = &f.values[i * f.nomega..(i + 1) * f.nomega];
        let s: Complex64 = row.iter().zip(&col_phase).map(|(v, c)| v * c).sum();
        acc += s * rp;
    }
    acc * f.dx * f.domega
}

/// `(Σ W_g g(k,l), Σ A_g g(k,l))` over `|k|, |l| ≤ K`.
pub fn poisson_check(g: &SampledWindow, k: usize) -> Result<(Complex64, Complex64)> {
    let ints: Vec<f64> = (-(k as i64)..=k as i64).map(|v| v as f64).collect();
    let doubled: Vec<f64> = ints.iter().map(|v| 2.0 * v).collect();
    let a_rows = stft_rows(g, g, &ints, &ints)?;
    let w_rows = stft_rows(g, &reflect(g), &doubled, &doubled)?;
    let mut sum_a = Complex64::new(0.0, 0.0);
    let mut sum_w = Complex64::new(0.0, 0.0);
    for (i, x) in ints.iter().enumerate() {
        for (j, w) in ints.iter().enumerate() {
            sum_a += Complex64::from_polar(1.0, PI * x * w) * a_rows[i][j];
            sum_w += 2.0 * Complex64::from_polar(1.0, PI * 4.0 * x * w) * w_rows[i][j];
        }
    }
    Ok((sum_w, sum_a))
}
