//! The symplectic group `Sp(d)` and its generators.
//!
//! Matrices act on column vectors `z = (x, ω)` with `x, ω ∈ ℝ^d`. Block
//! conventions:
//!
//! * `J   = [[0, I], [-I, 0]]`
//! * `M_L = [[L⁻¹, 0], [0, Lᵀ]]`
//! * `V_P = [[I, 0], [P, I]]` (lower-triangular shear)
//!
//! With these conventions a free symplectic matrix `S = [[A, B], [C, D]]`
//! (`det B ≠ 0`) factors as `S = V_{DB⁻¹} M_{B⁻¹} J V_{B⁻¹A}`.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default tolerance for the symplectic condition and the determinant.
pub const SYMPLECTIC_TOL: f64 = 1e-10;
/// Threshold on `|det B|` above which a matrix is treated as free.
pub const FREE_TOL: f64 = 1e-10;
/// Dilations with `|det L|` below this are rejected.
pub const DILATION_TOL: f64 = 1e-12;
/// Allowed asymmetry of chirp / quadratic-form matrices.
pub const SYMMETRY_TOL: f64 = 1e-12;

const MAX_DECOMPOSE_ATTEMPTS: usize = 32;

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

fn j_matrix(d: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * d, 2 * d);
    for i in 0..d {
        j[(i, d + i)] = 1.0;
        j[(d + i, i)] = -1.0;
    }
    j
}

fn block_diag_lower(d: usize, tl: &DMatrix<f64>, bl: &DMatrix<f64>, br: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * d, 2 * d);
    m.view_mut((0, 0), (d, d)).copy_from(tl);
    m.view_mut((d, 0), (d, d)).copy_from(bl);
    m.view_mut((d, d), (d, d)).copy_from(br);
    m
}

fn asymmetry(p: &DMatrix<f64>) -> f64 {
    max_abs(&(p - p.transpose()))
}

fn symmetrize(p: &DMatrix<f64>) -> DMatrix<f64> {
    (p + p.transpose()) * 0.5
}

/// `‖Mᵀ J M − J‖_max`.
pub fn symplectic_defect(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() || !m.nrows().is_multiple_of(2) || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "expected a square matrix with even side, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let j = j_matrix(m.nrows() / 2);
    Ok(max_abs(&(m.transpose() * &j * m - &j)))
}

/// True iff `‖Mᵀ J M − J‖_max ≤ tol`.
pub fn is_symplectic(m: &DMatrix<f64>, tol: f64) -> Result<bool> {
    Ok(symplectic_defect(m)? <= tol)
}

/// A real `2d × 2d` matrix satisfying `Sᵀ J S = J`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    d: usize,
    m: DMatrix<f64>,
}

impl SymplecticMatrix {
    /// Validates `m` against the symplectic condition and `det = 1`, both at
    /// [`SYMPLECTIC_TOL`].
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(m, SYMPLECTIC_TOL)
    }

    pub fn with_tolerance(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        let defect = symplectic_defect(&m)?;
        if defect > tol {
            return Err(Error::NotSymplectic { defect });
        }
        let det = m.determinant();
        if (det - 1.0).abs() > tol {
            return Err(Error::NotSymplectic { defect: (det - 1.0).abs() });
        }
        Ok(Self { d: m.nrows() / 2, m })
    }

    /// Row-major 2×2 entries `[a, b, c, d]`.
    pub fn from_2x2(entries: [f64; 4]) -> Result<Self> {
        Self::new(DMatrix::from_row_slice(2, 2, &entries))
    }

    /// Closed operations (products, inverses, generators) skip re-validation.
    fn trusted(m: DMatrix<f64>) -> Self {
        debug_assert!(m.nrows() == m.ncols() && m.nrows().is_multiple_of(2));
        Self { d: m.nrows() / 2, m }
    }

    pub fn identity(d: usize) -> Self {
        Self::trusted(DMatrix::identity(2 * d, 2 * d))
    }

    pub fn half_dim(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.m
    }

    /// Row-major entries.
    pub fn entries(&self) -> Vec<f64> {
        let n = 2 * self.d;
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.m[(i, j)]).collect()
    }

    fn block(&self, r: usize, c: usize) -> DMatrix<f64> {
        self.m.view((r * self.d, c * self.d), (self.d, self.d)).into_owned()
    }

    pub fn a(&self) -> DMatrix<f64> {
        self.block(0, 0)
    }
    pub fn b(&self) -> DMatrix<f64> {
        self.block(0, 1)
    }
    pub fn c(&self) -> DMatrix<f64> {
        self.block(1, 0)
    }
    pub fn d(&self) -> DMatrix<f64> {
        self.block(1, 1)
    }

    pub fn mul(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.d, other.d, "half-dimension mismatch");
        Self::trusted(&self.m * &other.m)
    }

    /// `S⁻¹ = −J Sᵀ J`.
    pub fn inverse(&self) -> SymplecticMatrix {
        let j = j_matrix(self.d);
        Self::trusted(-(&j * self.m.transpose() * &j))
    }

    pub fn apply(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != 2 * self.d {
            return Err(Error::Dimension(format!("point of length {} for d = {}", z.len(), self.d)));
        }
        Ok((0..2 * self.d).map(|i| (0..2 * self.d).map(|j| self.m[(i, j)] * z[j]).sum()).collect())
    }

    pub fn defect(&self) -> f64 {
        symplectic_defect(&self.m).expect("validated shape")
    }

    /// Largest singular value.
    pub fn norm2(&self) -> f64 {
        self.m.clone().svd(false, false).singular_values.max()
    }

    pub fn is_free(&self) -> bool {
        self.b().determinant().abs() > FREE_TOL
    }
}

/// `J = [[0, I], [−I, 0]]`.
pub fn standard_j(d: usize) -> Result<SymplecticMatrix> {
    if d == 0 {
        return Err(Error::Dimension("d must be positive".into()));
    }
    Ok(SymplecticMatrix::trusted(j_matrix(d)))
}

/// `M_L = [[L⁻¹, 0], [0, Lᵀ]]`.
pub fn dilation_matrix(l: &DMatrix<f64>) -> Result<SymplecticMatrix> {
    if l.nrows() != l.ncols() || l.nrows() == 0 {
        return Err(Error::Dimension("dilation must be square".into()));
    }
    let det = l.determinant();
    if det.abs() < DILATION_TOL {
        return Err(Error::Singular { det });
    }
    let inv = l.clone().try_inverse().ok_or(Error::Singular { det })?;
    let d = l.nrows();
    Ok(SymplecticMatrix::trusted(block_diag_lower(d, &inv, &DMatrix::zeros(d, d), &l.transpose())))
}

/// `V_P = [[I, 0], [P, I]]`.
pub fn shear_matrix(p: &DMatrix<f64>) -> Result<SymplecticMatrix> {
    if p.nrows() != p.ncols() || p.nrows() == 0 {
        return Err(Error::Dimension("shear must be square".into()));
    }
    let asym = asymmetry(p);
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { asym });
    }
    let d = p.nrows();
    let id = DMatrix::identity(d, d);
    Ok(SymplecticMatrix::trusted(block_diag_lower(d, &id, p, &id)))
}

/// `σ(z, z′) = x·ω′ − x′·ω`.
pub fn symplectic_form(z: &[f64], zp: &[f64]) -> Result<f64> {
    if z.len() != zp.len() || !z.len().is_multiple_of(2) || z.is_empty() {
        return Err(Error::Dimension(format!("points of length {} and {}", z.len(), zp.len())));
    }
    let d = z.len() / 2;
    Ok((0..d).map(|i| z[i] * zp[d + i] - zp[i] * z[d + i]).sum())
}

/// One generator of `Sp(d)`.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorStep {
    Fourier,
    /// `M_L` with Maslov index `maslov ∈ {0,1,2,3}` carried for the operator.
    Dilation {
        l: DMatrix<f64>,
        maslov: u8,
    },
    Chirp {
        p: DMatrix<f64>,
    },
}

impl GeneratorStep {
    pub fn dilation(l: DMatrix<f64>, maslov: u8) -> Result<Self> {
        if l.nrows() != l.ncols() || l.nrows() == 0 {
            return Err(Error::Dimension("dilation must be square".into()));
        }
        if maslov > 3 {
            return Err(Error::InvalidParameter(format!("Maslov index {maslov} not in 0..=3")));
        }
        let det = l.determinant();
        if det.abs() < DILATION_TOL {
            return Err(Error::Singular { det });
        }
        Ok(GeneratorStep::Dilation { l, maslov })
    }

    pub fn chirp(p: DMatrix<f64>) -> Result<Self> {
        if p.nrows() != p.ncols() || p.nrows() == 0 {
            return Err(Error::Dimension("chirp must be square".into()));
        }
        let asym = asymmetry(&p);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric { asym });
        }
        Ok(GeneratorStep::Chirp { p })
    }

    /// Scalar (d = 1) shorthands.
    pub fn dilation_1d(l: f64, maslov: u8) -> Result<Self> {
        Self::dilation(DMatrix::from_element(1, 1, l), maslov)
    }

    pub fn chirp_1d(p: f64) -> Self {
        GeneratorStep::Chirp { p: DMatrix::from_element(1, 1, p) }
    }

    /// Half-dimension implied by the payload, if any.
    pub fn half_dim(&self) -> Option<usize> {
        match self {
            GeneratorStep::Fourier => None,
            GeneratorStep::Dilation { l, .. } => Some(l.nrows()),
            GeneratorStep::Chirp { p } => Some(p.nrows()),
        }
    }

    pub fn matrix(&self, d: usize) -> Result<SymplecticMatrix> {
        if let Some(k) = self.half_dim() {
            if k != d {
                return Err(Error::Dimension(format!("step of size {k} in a chain with d = {d}")));
            }
        }
        match self {
            GeneratorStep::Fourier => standard_j(d),
            GeneratorStep::Dilation { l, .. } => dilation_matrix(l),
            GeneratorStep::Chirp { p } => shear_matrix(p),
        }
    }
}

impl std::fmt::Display for GeneratorStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fn mat(m: &DMatrix<f64>) -> String {
            if m.len() == 1 {
                format!("{}", m[(0, 0)])
            } else {
                let rows: Vec<String> = (0..m.nrows())
                    .map(|i| {
                        let r: Vec<String> = (0..m.ncols()).map(|j| m[(i, j)].to_string()).collect();
                        r.join(", ")
                    })
                    .collect();
                format!("[{}]", rows.join("; "))
            }
        }
        match self {
            GeneratorStep::Fourier => write!(f, "Fourier"),
            GeneratorStep::Dilation { l, maslov } => write!(f, "Dilation(L={}, m={})", mat(l), maslov),
            GeneratorStep::Chirp { p } => write!(f, "Chirp(P={})", mat(p)),
        }
    }
}

/// Generator steps whose ordered product (left to right) is a symplectic
/// matrix. As operators they act right to left: the last step is applied
/// to a window first.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorChain {
    pub d: usize,
    pub steps: Vec<GeneratorStep>,
}

impl GeneratorChain {
    pub fn new(d: usize, steps: Vec<GeneratorStep>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Dimension("d must be positive".into()));
        }
        for s in &steps {
            if let Some(k) = s.half_dim() {
                if k != d {
                    return Err(Error::Dimension(format!("step of size {k} in a chain with d = {d}")));
                }
            }
        }
        Ok(Self { d, steps })
    }

    pub fn empty(d: usize) -> Self {
        Self { d, steps: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `self · other`.
    pub fn then(mut self, other: GeneratorChain) -> Self {
        assert_eq!(self.d, other.d);
        self.steps.extend(other.steps);
        self
    }
}

impl std::fmt::Display for GeneratorChain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.steps.iter().map(|s| s.to_string()).collect();
        write!(f, "{}", parts.join(" · "))
    }
}

/// Ordered product of the steps' matrices; the empty chain is the identity.
pub fn chain_product(chain: &GeneratorChain) -> SymplecticMatrix {
    let mut acc = DMatrix::identity(2 * chain.d, 2 * chain.d);
    for step in &chain.steps {
        let m = step.matrix(chain.d).expect("chain steps are validated at construction");
        acc *= m.matrix();
    }
    SymplecticMatrix::trusted(acc)
}

/// `S = V_{DB⁻¹} · M_{B⁻¹} · J · V_{B⁻¹A}` for free `S`.
pub fn free_factor(s: &SymplecticMatrix) -> Result<GeneratorChain> {
    let b = s.b();
    let det_b = b.determinant();
    if det_b.abs() <= FREE_TOL {
        return Err(Error::NotFree { det_b: det_b.abs() });
    }
    let b_inv = b.try_inverse().ok_or(Error::NotFree { det_b: det_b.abs() })?;
    let p = symmetrize(&(s.d() * &b_inv));
    let q = symmetrize(&(&b_inv * s.a()));
    Ok(GeneratorChain {
        d: s.half_dim(),
        steps: vec![
            GeneratorStep::Chirp { p },
            GeneratorStep::dilation(b_inv, 0)?,
            GeneratorStep::Fourier,
            GeneratorStep::Chirp { p: q },
        ],
    })
}

/// Decomposes any symplectic matrix into a generator chain.
///
/// Free matrices return [`free_factor`]. Otherwise `S = (S·X⁻¹)·X` with
/// `X = J`, and for `d > 1` `X = J·V_Q` with seeded random symmetric `Q`
/// until `S·X⁻¹` is free.
pub fn decompose(s: &SymplecticMatrix) -> Result<GeneratorChain> {
    let defect = s.defect();
    if defect > SYMPLECTIC_TOL {
        return Err(Error::NotSymplectic { defect });
    }
    if s.is_free() {
        return free_factor(s);
    }
    let d = s.half_dim();
    let j = standard_j(d)?;
    let t = s.mul(&j.inverse());
    if t.is_free() {
        return Ok(free_factor(&t)?.then(GeneratorChain { d, steps: vec![GeneratorStep::Fourier] }));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f5b);
    for _ in 0..MAX_DECOMPOSE_ATTEMPTS {
        let mut q = DMatrix::zeros(d, d);
        for i in 0..d {
            for k in i..d {
                let v: f64 = rng.random_range(-1.0..1.0);
                q[(i, k)] = v;
                q[(k, i)] = v;
            }
        }
        let x = j.mul(&shear_matrix(&q)?);
        let t = s.mul(&x.inverse());
        if t.is_free() {
            let tail = GeneratorChain { d, steps: vec![GeneratorStep::Fourier, GeneratorStep::Chirp { p: q }] };
            return Ok(free_factor(&t)?.then(tail));
        }
    }
    Err(Error::DecompositionFailed { attempts: MAX_DECOMPOSE_ATTEMPTS })
}

fn smallest_singular(m: &DMatrix<f64>) -> f64 {
    m.clone().svd(false, false).singular_values.min()
}

/// Like [`decompose`], but picks between `S` and `(S·J⁻¹)·J` the route
/// whose `B`-block is better conditioned. The chirp and dilation parameters
/// of the free factor scale with `B⁻¹`, so this keeps the sampled operators
/// well resolved on a finite grid.
pub fn decompose_conditioned(s: &SymplecticMatrix) -> Result<GeneratorChain> {
    let defect = s.defect();
    if defect > SYMPLECTIC_TOL {
        return Err(Error::NotSymplectic { defect });
    }
    let d = s.half_dim();
    let direct = smallest_singular(&s.b());
    let rotated = smallest_singular(&s.a());
    if rotated > direct && s.a().determinant().abs() > FREE_TOL {
        let t = s.mul(&standard_j(d)?.inverse());
        return Ok(free_factor(&t)?.then(GeneratorChain { d, steps: vec![GeneratorStep::Fourier] }));
    }
    decompose(s)
}

/// Generating-function data `W(t,t′) = ½Pt² − L t·t′ + ½Qt′²` of a free
/// symplectic matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticForm {
    #[serde(skip)]
    pub p: DMatrix<f64>,
    #[serde(skip)]
    pub l: DMatrix<f64>,
    #[serde(skip)]
    pub q: DMatrix<f64>,
}

impl QuadraticForm {
    pub fn new(p: DMatrix<f64>, l: DMatrix<f64>, q: DMatrix<f64>) -> Result<Self> {
        let d = p.nrows();
        for m in [&p, &l, &q] {
            if m.nrows() != d || m.ncols() != d || d == 0 {
                return Err(Error::Dimension("quadratic form blocks must be d×d".into()));
            }
        }
        for m in [&p, &q] {
            let asym = asymmetry(m);
            if asym > SYMMETRY_TOL {
                return Err(Error::NotSymmetric { asym });
            }
        }
        let det = l.determinant();
        if det.abs() < DILATION_TOL {
            return Err(Error::Singular { det });
        }
        Ok(Self { p, l, q })
    }

    pub fn scalar(p: f64, l: f64, q: f64) -> Result<Self> {
        let e = |v| DMatrix::from_element(1, 1, v);
        Self::new(e(p), e(l), e(q))
    }

    /// Reads `P = DB⁻¹, L = B⁻¹, Q = B⁻¹A` off a free matrix.
    pub fn from_free(s: &SymplecticMatrix) -> Result<Self> {
        let chain = free_factor(s)?;
        match chain.steps.as_slice() {
            [GeneratorStep::Chirp { p }, GeneratorStep::Dilation { l, .. }, GeneratorStep::Fourier, GeneratorStep::Chirp { p: q }] => {
                Self::new(p.clone(), l.clone(), q.clone())
            }
            _ => unreachable!("free_factor returns four steps"),
        }
    }

    pub fn half_dim(&self) -> usize {
        self.p.nrows()
    }

    /// `[V_P, M_L, J, V_Q]`.
    pub fn chain(&self, maslov: u8) -> Result<GeneratorChain> {
        GeneratorChain::new(
            self.half_dim(),
            vec![
                GeneratorStep::Chirp { p: self.p.clone() },
                GeneratorStep::dilation(self.l.clone(), maslov)?,
                GeneratorStep::Fourier,
                GeneratorStep::Chirp { p: self.q.clone() },
            ],
        )
    }

    /// The free matrix `S_W = V_P M_L J V_Q`.
    pub fn matrix(&self) -> SymplecticMatrix {
        chain_product(&self.chain(0).expect("validated form"))
    }

    /// `W(t, t′)` for d = 1.
    pub fn eval_1d(&self, t: f64, tp: f64) -> f64 {
        let (p, l, q) = (self.p[(0, 0)], self.l[(0, 0)], self.q[(0, 0)]);
        0.5 * p * t * t - l * t * tp + 0.5 * q * tp * tp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: f64, b: f64, c: f64, d: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a, b, c, d])
    }

    fn sym(a: f64, b: f64, c: f64, d: f64) -> SymplecticMatrix {
        SymplecticMatrix::new(m2(a, b, c, d)).unwrap()
    }

    #[test]
    fn is_symplectic_examples() {
        assert!(is_symplectic(&j_matrix(1), 1e-12).unwrap());
        assert!(is_symplectic(&DMatrix::identity(2, 2), 1e-12).unwrap());
        assert!(!is_symplectic(&m2(2.0, 0.0, 0.0, 1.0), 1e-10).unwrap());
        assert!(matches!(is_symplectic(&DMatrix::identity(3, 3), 1e-10), Err(Error::Dimension(_))));
    }

    #[test]
    fn standard_j_properties() {
        let j = standard_j(1).unwrap();
        assert_eq!(j.entries(), vec![0.0, 1.0, -1.0, 0.0]);
        assert_eq!(j.mul(&j).entries(), vec![-1.0, 0.0, 0.0, -1.0]);
        let j2 = standard_j(2).unwrap();
        assert_eq!(j2.matrix()[(0, 2)], 1.0);
        assert_eq!(j2.matrix()[(3, 1)], -1.0);
        assert!(j2.defect() < 1e-15);
        assert!(standard_j(0).is_err());
    }

    #[test]
    fn dilation_examples() {
        let m = dilation_matrix(&DMatrix::from_element(1, 1, 2.0)).unwrap();
        assert_eq!(m.entries(), vec![0.5, 0.0, 0.0, 2.0]);
        let id = dilation_matrix(&DMatrix::identity(2, 2)).unwrap();
        assert_eq!(id, SymplecticMatrix::identity(2));
        let l = DMatrix::from_row_slice(2, 2, &[1.3, -0.4, 0.7, 2.1]);
        assert!(dilation_matrix(&l).unwrap().defect() < 1e-12);
        assert!(matches!(dilation_matrix(&DMatrix::zeros(1, 1)), Err(Error::Singular { .. })));
    }

    #[test]
    fn shear_examples() {
        assert_eq!(shear_matrix(&DMatrix::zeros(1, 1)).unwrap(), SymplecticMatrix::identity(1));
        assert_eq!(shear_matrix(&DMatrix::from_element(1, 1, 1.0)).unwrap().entries(), vec![1.0, 0.0, 1.0, 1.0]);
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, -2.0]);
        let q = DMatrix::from_row_slice(2, 2, &[0.3, -1.0, -1.0, 0.25]);
        let lhs = shear_matrix(&p).unwrap().mul(&shear_matrix(&q).unwrap());
        assert_eq!(lhs, shear_matrix(&(&p + &q)).unwrap());
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(shear_matrix(&bad), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn symplectic_form_examples() {
        assert_eq!(symplectic_form(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(symplectic_form(&[0.3, -2.0], &[0.3, -2.0]).unwrap(), 0.0);
        assert!(symplectic_form(&[1.0, 0.0], &[1.0, 0.0, 0.0, 0.0]).is_err());
        let s = sym(2.0, 1.0, 3.0, 2.0);
        let (z, zp) = ([0.7, -1.1], [2.0, 0.4]);
        let lhs = symplectic_form(&s.apply(&z).unwrap(), &s.apply(&zp).unwrap()).unwrap();
        assert!((lhs - symplectic_form(&z, &zp).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn free_factor_of_j() {
        let chain = free_factor(&standard_j(1).unwrap()).unwrap();
        let expected = vec![
            GeneratorStep::chirp_1d(0.0),
            GeneratorStep::dilation_1d(1.0, 0).unwrap(),
            GeneratorStep::Fourier,
            GeneratorStep::chirp_1d(-0.0),
        ];
        assert_eq!(chain.steps.len(), 4);
        for (a, b) in chain.steps.iter().zip(&expected) {
            assert_eq!(a.matrix(1).unwrap(), b.matrix(1).unwrap());
        }
        assert_eq!(chain_product(&chain), standard_j(1).unwrap());
    }

    #[test]
    fn free_factor_upper_shear() {
        let s = sym(1.0, 1.0, 0.0, 1.0);
        let chain = free_factor(&s).unwrap();
        assert_eq!(chain.len(), 4);
        let err = max_abs(&(chain_product(&chain).into_matrix() - s.matrix()));
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn free_factor_rejects_lower_shear() {
        let s = sym(1.0, 0.0, 1.0, 1.0);
        assert!(matches!(free_factor(&s), Err(Error::NotFree { .. })));
    }

    #[test]
    fn decompose_lower_shear_goes_through_j() {
        let s = sym(1.0, 0.0, 1.0, 1.0);
        let chain = decompose(&s).unwrap();
        assert_eq!(chain.len(), 5);
        assert_eq!(chain.steps[4], GeneratorStep::Fourier);
        // oracle: S·J⁻¹ multiplied out by hand is [[0,-1],[1,-1]]
        let t = s.mul(&standard_j(1).unwrap().inverse());
        assert_eq!(t.entries(), vec![0.0, -1.0, 1.0, -1.0]);
        let err = max_abs(&(chain_product(&chain).into_matrix() - s.matrix()));
        assert!(err < 1e-12);
    }

    #[test]
    fn decompose_free_delegates() {
        let s = sym(2.0, 1.0, 3.0, 2.0);
        assert_eq!(decompose(&s).unwrap(), free_factor(&s).unwrap());
    }

    #[test]
    fn decompose_non_free_d2() {
        // diag blocks: B = 0, A = I – S·J⁻¹ is free here; also try a mixed one
        let mut m = DMatrix::identity(4, 4);
        m[(2, 0)] = 1.0;
        let s = SymplecticMatrix::new(m).unwrap();
        let chain = decompose(&s).unwrap();
        assert!(max_abs(&(chain_product(&chain).into_matrix() - s.matrix())) < 1e-10);

        // A and B both singular: S = J_1 ⊕ I_1 embedded in Sp(2)
        let mut m = DMatrix::zeros(4, 4);
        m[(0, 2)] = 1.0;
        m[(2, 0)] = -1.0;
        m[(1, 1)] = 1.0;
        m[(3, 3)] = 1.0;
        let s = SymplecticMatrix::new(m).unwrap();
        assert!(!s.is_free());
        assert!(s.a().determinant().abs() < 1e-12);
        let chain = decompose(&s).unwrap();
        assert_eq!(chain.len(), 6);
        assert!(max_abs(&(chain_product(&chain).into_matrix() - s.matrix())) < 1e-10);
    }

    #[test]
    fn chain_product_examples() {
        assert_eq!(chain_product(&GeneratorChain::empty(1)), SymplecticMatrix::identity(1));
        let ff = GeneratorChain::new(1, vec![GeneratorStep::Fourier, GeneratorStep::Fourier]).unwrap();
        assert_eq!(chain_product(&ff).entries(), vec![-1.0, 0.0, 0.0, -1.0]);
    }

    #[test]
    fn inverse_and_blocks() {
        let s = sym(2.0, 1.0, 3.0, 2.0);
        assert_eq!(s.mul(&s.inverse()), SymplecticMatrix::identity(1));
        assert_eq!((s.a()[(0, 0)], s.b()[(0, 0)], s.c()[(0, 0)], s.d()[(0, 0)]), (2.0, 1.0, 3.0, 2.0));
    }

    #[test]
    fn new_rejects_bad_matrices() {
        assert!(matches!(SymplecticMatrix::from_2x2([2.0, 0.0, 0.0, 1.0]), Err(Error::NotSymplectic { .. })));
        assert!(SymplecticMatrix::new(DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn step_validation() {
        assert!(GeneratorStep::dilation_1d(1e-13, 0).is_err());
        assert!(GeneratorStep::dilation_1d(2.0, 4).is_err());
        assert!(GeneratorStep::chirp(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])).is_err());
        assert!(GeneratorChain::new(2, vec![GeneratorStep::chirp_1d(1.0)]).is_err());
    }

    #[test]
    fn quadratic_form_round_trip() {
        let s = sym(2.0, 1.0, 3.0, 2.0);
        let w = QuadraticForm::from_free(&s).unwrap();
        assert_eq!((w.p[(0, 0)], w.l[(0, 0)], w.q[(0, 0)]), (2.0, 1.0, 2.0));
        assert!(max_abs(&(w.matrix().into_matrix() - s.matrix())) < 1e-12);
        assert_eq!(w.eval_1d(1.0, 2.0), 0.5 * 2.0 - 2.0 + 0.5 * 2.0 * 4.0);
    }

    #[test]
    fn conditioned_picks_better_block() {
        let s = sym(10.0, 1e-6, 0.0, 0.1);
        let plain = decompose(&s).unwrap();
        let cond = decompose_conditioned(&s).unwrap();
        assert_eq!(plain.len(), 4);
        assert_eq!(cond.len(), 5);
        assert!(max_abs(&(chain_product(&cond).into_matrix() - s.matrix())) < 1e-10);
    }
}
