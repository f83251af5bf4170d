use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use super::{Diagnostics, FrameBounds};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::windows::{sample, SampledWindow, WindowSpec};

/// `M_ab = Σ_{‖λ‖ ≤ radius} conj(⟨h_a, π(λ)g⟩) ⟨h_b, π(λ)g⟩` over the first
/// `n_test` Hermite functions, expressed in an orthonormalized basis.
pub fn frame_operator_section(
    g: &SampledWindow,
    lat: &Lattice,
    radius: f64,
    n_test: usize,
) -> Result<(DMatrix<Complex64>, usize)> {
    if lat.d != 1 {
        return Err(Error::Unsupported("finite sections are implemented for d = 1".into()));
    }
    if n_test == 0 {
        return Err(Error::InvalidParameter("n_test must be positive".into()));
    }
    let grid = *g.grid();
    let h = grid.spacing();
    let basis: Vec<SampledWindow> =
        (0..n_test).map(|n| sample(&WindowSpec::Hermite { n, gamma: 1.0 }, grid)).collect::<Result<_>>()?;
    let points = lat.enumerate(radius.max(0.0));
    // One column of coefficients ⟨h_a, π(λ)g⟩ per lattice point.
    let columns: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|p| {
            let (x, omega) = (p[0], p[1]);
            let shifted = g.shifted(x);
            let kernel: Vec<(usize, Complex64)> = shifted
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != Complex64::new(0.0, 0.0))
                .map(|(j, v)| (j, v.conj() * Complex64::from_polar(h, -2.0 * PI * omega * grid.t(j))))
                .collect();
            basis.iter().map(|b| kernel.iter().map(|(j, k)| b.values()[*j] * k).sum()).collect()
        })
        .collect();
    let mut m = DMatrix::<Complex64>::zeros(n_test, n_test);
    for col in &columns {
        for a in 0..n_test {
            let ca = col[a].conj();
            for b in 0..n_test {
                m[(a, b)] += ca * col[b];
            }
        }
    }
    // Gram matrix of the sampled basis, for the generalized eigenproblem.
    let gram = DMatrix::from_fn(n_test, n_test, |a, b| basis[b].inner(&basis[a]).expect("same grid"));
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Numerical("Hermite basis is not linearly independent on the grid".into()))?;
    let l_inv = chol.l().try_inverse().ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let reduced = &l_inv * m * l_inv.adjoint();
    Ok(((&reduced + reduced.adjoint()) * Complex64::new(0.5, 0.0), points.len()))
}

/// Extreme eigenvalues of [`frame_operator_section`]. The lower value only
/// approaches `A` from above as the subspace grows, and truncating the
/// lattice sum biases both values down.
pub fn finite_section_bounds(g: &SampledWindow, lat: &Lattice, radius: f64, n_test: usize) -> Result<FrameBounds> {
    let (m, count) = frame_operator_section(g, lat, radius, n_test)?;
    let ev = m.symmetric_eigenvalues();
    let diag = Diagnostics { radius: Some(radius), n_test: Some(n_test), points: Some(count), ..Default::default() };
    Ok(FrameBounds::new(ev.min(), ev.max(), "finite_section", diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::framebounds::janssen_bounds;
    use crate::windows::TimeGrid;

    fn win(spec: WindowSpec) -> SampledWindow {
        sample(&spec, TimeGrid::default()).unwrap()
    }

    #[test]
    fn brackets_janssen_for_gaussian() {
        let g = win(WindowSpec::Gaussian { gamma: 1.0 });
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let sharp = janssen_bounds(&g, r, r, 20, 128).unwrap();
        let fs = finite_section_bounds(&g, &Lattice::square(1, 2.0).unwrap(), 12.0, 24).unwrap();
        assert!((fs.a / sharp.a - 1.0).abs() < 0.1, "{fs:?} {sharp:?}");
        assert!((fs.b / sharp.b - 1.0).abs() < 0.1, "{fs:?} {sharp:?}");
    }

    #[test]
    fn single_point_is_rank_one() {
        let g = win(WindowSpec::Gaussian { gamma: 1.0 });
        let fs = finite_section_bounds(&g, &Lattice::square(1, 1.0).unwrap(), 0.0, 4).unwrap();
        assert!(fs.a.abs() < 1e-12 && (fs.b - 1.0).abs() < 1e-8, "{fs:?}");
        assert_eq!(fs.diagnostics.points, Some(1));
    }

    #[test]
    fn odd_window_at_critical_density_decays_with_subspace() {
        // The section only approaches the vanishing lower bound from above,
        // roughly like 1/n_test.
        let h1 = win(WindowSpec::Hermite { n: 1, gamma: 1.0 });
        let lat = Lattice::square(1, 1.0).unwrap();
        let small = finite_section_bounds(&h1, &lat, 12.0, 24).unwrap();
        let large = finite_section_bounds(&h1, &lat, 12.0, 96).unwrap();
        assert!(small.a < 3e-2 * small.b, "{small:?}");
        assert!(large.a < 1e-2 * large.b && large.a < small.a / 3.0, "{large:?}");
    }
}
