//! Seeded random generator chains and symplectic matrices in `Sp(1)`.
//!
//! Each slot is a Fourier step with probability 1/2, otherwise a chirp
//! `P ~ U[−2, 2]` or a dilation `L ~ ±U[0.5, 2]` with equal odds.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::symplectic::{chain_product, GeneratorChain, GeneratorStep, SymplecticMatrix};
use crate::windows::{Parity, SampledWindow, TimeGrid};

/// Support half-width of [`random_test_function`].
pub const TEST_SUPPORT: f64 = 6.0;

/// Slots in a random symplectic matrix.
pub const SLOTS: usize = 4;

/// Rejection cap on `‖S‖₂` for [`random_symplectic`].
pub const NORM_CAP: f64 = 2.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_step<R: Rng>(rng: &mut R) -> GeneratorStep {
    if rng.random_bool(0.5) {
        return GeneratorStep::Fourier;
    }
    if rng.random_bool(0.5) {
        GeneratorStep::chirp_1d(rng.random_range(-2.0..=2.0))
    } else {
        let l: f64 = rng.random_range(0.5..=2.0);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        GeneratorStep::dilation_1d(sign * l, 0).expect("dilation factor is nonzero")
    }
}

/// A chain of `1..=max_len` random steps.
pub fn random_chain<R: Rng>(rng: &mut R, max_len: usize) -> GeneratorChain {
    let len = rng.random_range(1..=max_len.max(1));
    let steps = (0..len).map(|_| random_step(rng)).collect();
    GeneratorChain::new(1, steps).expect("1-d steps")
}

/// Product of [`SLOTS`] random steps, redrawn until `‖S‖₂ ≤ cap`.
pub fn random_symplectic_capped<R: Rng>(rng: &mut R, cap: f64) -> (SymplecticMatrix, GeneratorChain) {
    loop {
        let steps = (0..SLOTS).map(|_| random_step(rng)).collect();
        let chain = GeneratorChain::new(1, steps).expect("1-d steps");
        let s = chain_product(&chain);
        if s.norm2() <= cap {
            return (s, chain);
        }
    }
}

pub fn random_symplectic<R: Rng>(rng: &mut R) -> SymplecticMatrix {
    random_symplectic_capped(rng, NORM_CAP).0
}

/// A random free matrix: `[[a, b], [c, (1 + bc)/a]]` with `|b| ≥ 0.2`.
pub fn random_free<R: Rng>(rng: &mut R) -> SymplecticMatrix {
    let a = sign(rng) * rng.random_range(0.3..=2.0);
    let b = sign(rng) * rng.random_range(0.2..=2.0);
    let c = rng.random_range(-2.0..=2.0);
    SymplecticMatrix::from_2x2([a, b, c, (1.0 + b * c) / a]).expect("determinant one by construction")
}

/// Unit-norm sum of three random Gabor atoms (centers and frequencies in
/// `[−2, 2]`, widths in `[0.5, 1.5]`), cut to `|t| ≤ TEST_SUPPORT`.
pub fn random_test_function<R: Rng>(rng: &mut R, grid: TimeGrid) -> SampledWindow {
    let atoms: Vec<(Complex64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let c = Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
            (c, rng.random_range(-2.0..=2.0), rng.random_range(-2.0..=2.0), rng.random_range(0.5..=1.5))
        })
        .collect();
    let values = grid
        .times()
        .map(|t| {
            if t.abs() > TEST_SUPPORT {
                return Complex64::new(0.0, 0.0);
            }
            atoms
                .iter()
                .map(|(c, center, freq, width)| {
                    let u = (t - center) / width;
                    c * (-PI * u * u).exp() * Complex64::from_polar(1.0, 2.0 * PI * freq * t)
                })
                .sum()
        })
        .collect();
    SampledWindow::from_values(grid, values, Parity::None)
        .and_then(|w| w.normalized())
        .expect("random atoms do not cancel")
}

fn sign<R: Rng>(rng: &mut R) -> f64 {
    if rng.random_bool(0.5) {
        1.0
    } else {
        -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_symplectic() {
        let a: Vec<Vec<f64>> = (0..20).map(|_| ()).scan(rng(7), |r, _| Some(random_symplectic(r).entries())).collect();
        let b: Vec<Vec<f64>> = (0..20).map(|_| ()).scan(rng(7), |r, _| Some(random_symplectic(r).entries())).collect();
        assert_eq!(a, b);
        let mut r = rng(1);
        for _ in 0..100 {
            let s = random_symplectic(&mut r);
            assert!(s.defect() < 1e-12 && s.norm2() <= NORM_CAP);
            assert!(random_free(&mut r).is_free());
            let c = random_chain(&mut r, 6);
            assert!((1..=6).contains(&c.len()));
        }
    }
}
