//! Lattices `Λ = δ^{-1/2d} S ℤ^{2d}`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::symplectic::{dilation_matrix, SymplecticMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub d: usize,
    pub delta: f64,
    /// `δ^{-1/2d}·S`; columns are the lattice generators.
    pub basis: DMatrix<f64>,
    pub generator: SymplecticMatrix,
}

impl Lattice {
    pub fn from_symplectic(s: SymplecticMatrix, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidParameter(format!("density must be positive, got {delta}")));
        }
        let d = s.half_dim();
        let basis = s.matrix() * delta.powf(-0.5 / d as f64);
        Ok(Self { d, delta, basis, generator: s })
    }

    /// `αℤ × βℤ`, generated by `M_L` with `L = √(β/α)` at density `1/(αβ)`.
    pub fn separable(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && beta > 0.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("separable lattice needs α, β > 0, got {alpha}, {beta}")));
        }
        let s = dilation_matrix(&DMatrix::from_element(1, 1, (beta / alpha).sqrt()))?;
        let mut lat = Self::from_symplectic(s, 1.0 / (alpha * beta))?;
        // Exact diagonal, free of the sqrt round trip.
        lat.basis = DMatrix::from_diagonal(&DVector::from_vec(vec![alpha, beta]));
        Ok(lat)
    }

    /// Square lattice `δ^{-1/2d} ℤ^{2d}`.
    pub fn square(d: usize, delta: f64) -> Result<Self> {
        Self::from_symplectic(SymplecticMatrix::identity(d), delta)
    }

    /// The same lattice mapped by `T`: basis `T·basis`, generator `T·S`.
    pub fn deformed(&self, t: &SymplecticMatrix) -> Result<Self> {
        if t.half_dim() != self.d {
            return Err(Error::Dimension("deformation has the wrong half-dimension".into()));
        }
        Ok(Self { d: self.d, delta: self.delta, basis: t.matrix() * &self.basis, generator: t.mul(&self.generator) })
    }

    pub fn point(&self, k: &[i64]) -> Vec<f64> {
        let kv = DVector::from_iterator(k.len(), k.iter().map(|&v| v as f64));
        (&self.basis * kv).iter().copied().collect()
    }

    /// Separable parameters `(α, β)` when the basis is diagonal (d = 1).
    pub fn as_separable(&self) -> Option<(f64, f64)> {
        let b = &self.basis;
        (self.d == 1 && b[(0, 1)] == 0.0 && b[(1, 0)] == 0.0).then(|| (b[(0, 0)].abs(), b[(1, 1)].abs()))
    }

    /// All points with `‖λ‖₂ ≤ radius`, in lexicographic order of their
    /// integer coordinates.
    pub fn enumerate(&self, radius: f64) -> Vec<Vec<f64>> {
        self.enumerate_indexed(radius).into_iter().map(|(_, p)| p).collect()
    }

    pub fn enumerate_indexed(&self, radius: f64) -> Vec<(Vec<i64>, Vec<f64>)> {
        let dim = 2 * self.d;
        let inv = self.basis.clone().try_inverse().expect("lattice basis is invertible");
        let inv_norm = inv.singular_values().max();
        let bound = (radius.max(0.0) * inv_norm * (1.0 + 1e-12)).floor() as i64;
        let r2 = radius * radius * (1.0 + 1e-12);
        let mut out = Vec::new();
        let mut k = vec![-bound; dim];
        loop {
            let p = self.point(&k);
            if p.iter().map(|v| v * v).sum::<f64>() <= r2 {
                out.push((k.clone(), p));
            }
            // Odometer over the box [−bound, bound]^{2d}, last coordinate fastest.
            let mut i = dim;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if k[i] < bound {
                    k[i] += 1;
                    break;
                }
                k[i] = -bound;
            }
        }
    }
}
