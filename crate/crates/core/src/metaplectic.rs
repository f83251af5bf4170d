//! Metaplectic generator operators acting on sampled windows (d = 1).
//!
//! * `Ĵg = i^{-1/2} F g` (principal branch of the square root)
//! * `M̂_{L,m} g(t) = i^m √|L| g(Lt)`
//! * `V̂_P g(t) = e^{πiPt²} g(t)`
//!
//! They project onto `J`, `M_L` and `V_P` of [`crate::symplectic`], so a
//! [`GeneratorChain`] applied right to left realizes a metaplectic operator
//! over `chain_product(chain)`. Global phases are not tracked.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::symplectic::{decompose_conditioned, GeneratorChain, GeneratorStep, QuadraticForm, SymplecticMatrix};
use crate::windows::{parity_defect, Parity, SampledWindow};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `i^m`.
fn i_pow(m: u8) -> Complex64 {
    match m % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// `i^{-1/2} = e^{−iπ/4}`.
pub fn fourier_phase() -> Complex64 {
    Complex64::from_polar(1.0, -FRAC_PI_4)
}

fn nonzero_range(v: &[Complex64]) -> (usize, usize) {
    let start = v.iter().position(|x| *x != ZERO).unwrap_or(v.len());
    let end = v.iter().rposition(|x| *x != ZERO).map_or(start, |e| e + 1);
    (start, end)
}

/// Modified Fourier transform `Ĵg(t_k) = i^{-1/2} h Σ_j g(t_j) e^{−2πi t_k t_j}`,
/// evaluated on the input grid. The sum is periodic in `t` with period
/// `1/h`, so grids with `N·h² > 1` alias the outer samples.
pub fn apply_fourier(w: &SampledWindow) -> SampledWindow {
    let grid = *w.grid();
    let n = grid.len();
    let h = grid.spacing();
    let half = (n / 2) as i64;
    let values = w.values();
    let (start, end) = nonzero_range(values);
    // t_k t_j = a_k a_j h²; when 1/h² is an integer M the phase only depends
    // on a_k a_j mod M and is read from a table of M-th roots of unity.
    let inv_h2 = 1.0 / (h * h);
    let modulus = inv_h2.round();
    let table: Option<Vec<Complex64>> = ((inv_h2 - modulus).abs() < 1e-9 * inv_h2 && modulus <= (1u64 << 24) as f64)
        .then(|| {
            let m = modulus as usize;
            (0..m).map(|r| Complex64::from_polar(1.0, -2.0 * PI * r as f64 / m as f64)).collect()
        });
    let scale = fourier_phase() * h;
    let out: Vec<Complex64> = (0..n)
        .into_par_iter()
        .map(|k| {
            if k == 0 {
                return ZERO;
            }
            let ak = k as i64 - half;
            let mut acc = ZERO;
            match &table {
                Some(tab) => {
                    let m = tab.len() as i64;
                    for (j, g) in values.iter().enumerate().take(end).skip(start) {
                        let r = (ak * (j as i64 - half)).rem_euclid(m) as usize;
                        acc += g * tab[r];
                    }
                }
                None => {
                    for (j, g) in values.iter().enumerate().take(end).skip(start) {
                        let phase = -2.0 * PI * (ak * (j as i64 - half)) as f64 * h * h;
                        acc += g * Complex64::from_polar(1.0, phase);
                    }
                }
            }
            acc * scale
        })
        .collect();
    w.with_values(out)
}

/// `M̂_{L,m} g(t) = i^m √|L| g(Lt)`. Sample positions that land on the grid
/// are copied exactly, others come from the cubic interpolant; positions
/// beyond the grid read as zero (see [`dilation_discarded_mass`]).
pub fn apply_dilation(w: &SampledWindow, l: f64, maslov: u8) -> Result<SampledWindow> {
    if !(l.abs() >= 1e-12) || !l.is_finite() {
        return Err(Error::InvalidParameter(format!("dilation factor {l} too small")));
    }
    let grid = *w.grid();
    let n = grid.len();
    let half = (n / 2) as f64;
    let factor = i_pow(maslov) * l.abs().sqrt();
    let values = w.values();
    let out: Vec<Complex64> = (0..n)
        .map(|j| {
            let s = l * (j as f64 - half);
            let r = s.round();
            let v = if (s - r).abs() < 1e-9 {
                let idx = r + half;
                if idx >= 1.0 && idx < n as f64 {
                    values[idx as usize]
                } else {
                    ZERO
                }
            } else {
                w.eval(s * grid.spacing())
            };
            v * factor
        })
        .collect();
    Ok(w.with_values(out))
}

/// Fraction of `‖g‖²` that [`apply_dilation`] drops because `L·t` leaves
/// the grid.
pub fn dilation_discarded_mass(w: &SampledWindow, l: f64) -> f64 {
    let grid = w.grid();
    let reach = l.abs() * grid.t(grid.len() - 1);
    let total: f64 = w.values().iter().map(|v| v.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let lost: f64 =
        w.values().iter().zip(grid.times()).filter(|(_, t)| t.abs() > reach).map(|(v, _)| v.norm_sqr()).sum();
    lost / total
}

/// `V̂_P g(t) = e^{πiPt²} g(t)`.
pub fn apply_chirp(w: &SampledWindow, p: f64) -> SampledWindow {
    if p == 0.0 {
        return w.clone();
    }
    let grid = *w.grid();
    let out =
        w.values().iter().zip(grid.times()).map(|(v, t)| v * Complex64::from_polar(1.0, PI * p * t * t)).collect();
    w.with_values(out)
}

fn scalar(m: &nalgebra::DMatrix<f64>) -> f64 {
    m[(0, 0)]
}

/// Applies the steps right to left, so the result projects onto
/// `chain_product(chain)`.
pub fn apply_chain(w: &SampledWindow, chain: &GeneratorChain) -> Result<SampledWindow> {
    if chain.d != 1 {
        return Err(Error::Unsupported("metaplectic operators are implemented for d = 1".into()));
    }
    let mut cur = w.clone();
    for step in chain.steps.iter().rev() {
        cur = match step {
            GeneratorStep::Fourier => apply_fourier(&cur),
            GeneratorStep::Dilation { l, maslov } => apply_dilation(&cur, scalar(l), *maslov)?,
            GeneratorStep::Chirp { p } => apply_chirp(&cur, scalar(p)),
        };
    }
    Ok(cur)
}

/// A metaplectic operator over `S`, via [`decompose_conditioned`].
pub fn apply_symplectic(w: &SampledWindow, s: &SymplecticMatrix) -> Result<SampledWindow> {
    if s.half_dim() != 1 {
        return Err(Error::Unsupported("metaplectic operators are implemented for d = 1".into()));
    }
    apply_chain(w, &decompose_conditioned(s)?)
}

/// `Ŝ_{W,m} = V̂_P M̂_{L,m} Ĵ V̂_Q`.
pub fn quadratic_fourier(w: &SampledWindow, form: &QuadraticForm, maslov: u8) -> Result<SampledWindow> {
    if form.half_dim() != 1 {
        return Err(Error::Unsupported("quadratic Fourier transforms are implemented for d = 1".into()));
    }
    apply_chain(w, &form.chain(maslov)?)
}

/// Direct quadrature of `i^{m−1/2} √|L| ∫ g(t′) e^{2πiW(t,t′)} dt′`.
pub fn quadratic_fourier_kernel(w: &SampledWindow, form: &QuadraticForm, maslov: u8, t: f64) -> Result<Complex64> {
    if form.half_dim() != 1 {
        return Err(Error::Unsupported("quadratic Fourier transforms are implemented for d = 1".into()));
    }
    let grid = w.grid();
    let acc: Complex64 = w
        .values()
        .iter()
        .zip(grid.times())
        .filter(|(v, _)| **v != ZERO)
        .map(|(v, tp)| v * Complex64::from_polar(1.0, 2.0 * PI * form.eval_1d(t, tp)))
        .sum();
    Ok(acc * grid.spacing() * i_pow(maslov) * fourier_phase() * scalar(&form.l).abs().sqrt())
}

/// Parity defect of `apply_chain(w, chain)` matching `w`'s parity hint.
pub fn parity_preserved(w: &SampledWindow, chain: &GeneratorChain) -> Result<f64> {
    let which = w.parity_hint();
    if which == Parity::None {
        return Err(Error::Parity("window carries no parity hint".into()));
    }
    let out = apply_chain(w, chain)?;
    let (even, odd) = parity_defect(&out)?;
    Ok(if which == Parity::Even { even } else { odd })
}
