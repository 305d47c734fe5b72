//! Linear symplectic algebra on `(R^2n, ω)` and on the doubled space
//! `(R^2n x R^2n, -ω ⊕ ω)`.
//!
//! Coordinates are `z = (p, q)`: the first block is the Dirichlet direction and
//! the second the position direction, so `L_D = R^n x {0}`, `L_N = {0} x R^n`,
//! and `J = [[0, -I], [I, 0]]` with `ω(v, w) = <Jv, w>`.  With `B = diag(I, K)`
//! the generator `JB = [[0, -K], [I, 0]]` is the usual linearised mechanical
//! flow, and crossings of `ψ(t) W` with `L_D` carry the form `<B w, w>`, which
//! is positive on `L_D`.
//!
//! Frames are stored QR-orthonormalised.  Two frames describe the same
//! Lagrangian exactly when their intersection has full dimension; matrix
//! equality is never used.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

/// Default relative rank tolerance.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Isotropy and symplecticity checks allow this multiple of the rank tolerance.
const DEFECT_FACTOR: f64 = 1e3;

fn standard_j(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = -1.0;
        j[(n + i, i)] = 1.0;
    }
    j
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Standard,
    /// `(R^2m x R^2m, -ω ⊕ ω)`; Lagrangians there have dimension `2m`.
    Double,
}

/// A finite-dimensional symplectic vector space given by an orthogonal complex
/// structure `J` (so `ω(v, w) = <Jv, w>`).
#[derive(Clone, Debug)]
pub struct SymplecticSpace {
    kind: SpaceKind,
    /// Half the dimension, i.e. the dimension of a Lagrangian subspace.
    n: usize,
    j: DMatrix<f64>,
}

impl PartialEq for SymplecticSpace {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.n == other.n
    }
}

impl SymplecticSpace {
    pub fn standard(n: usize) -> Self {
        Self {
            kind: SpaceKind::Standard,
            n,
            j: standard_j(n),
        }
    }

    /// Doubled space over `R^2m`; its Lagrangians have dimension `2m`.
    pub fn double(m: usize) -> Self {
        let jm = standard_j(m);
        Self {
            kind: SpaceKind::Double,
            n: 2 * m,
            j: linalg::block_diag(&(-&jm), &jm),
        }
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Dimension of Lagrangian subspaces.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Half-dimension of the factor space for a doubled space.
    pub fn base_n(&self) -> usize {
        match self.kind {
            SpaceKind::Standard => self.n,
            SpaceKind::Double => self.n / 2,
        }
    }

    pub fn j(&self) -> &DMatrix<f64> {
        &self.j
    }

    pub fn omega(&self, v: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
        (&self.j * v).transpose() * w
    }

    /// `max |M^T J M - J|` for a matrix acting on this space.
    pub fn symplectic_defect(&self, m: &DMatrix<f64>) -> f64 {
        linalg::max_abs(&(m.transpose() * &self.j * m - &self.j))
    }

    fn check_dim(&self, rows: usize, what: &str) -> Result<()> {
        if rows != self.dim() {
            return Err(Error::Dimension(format!(
                "{what} has {rows} rows, space dimension is {}",
                self.dim()
            )));
        }
        Ok(())
    }
}

/// An `n`-dimensional Lagrangian subspace represented by an orthonormal
/// `2n x n` frame.
#[derive(Clone, Debug)]
pub struct LagrangianFrame {
    space: SymplecticSpace,
    basis: DMatrix<f64>,
    tol: f64,
}

impl LagrangianFrame {
    /// Validates rank and isotropy of `z`, then orthonormalises it.
    pub fn new(space: SymplecticSpace, z: DMatrix<f64>, tol: f64) -> Result<Self> {
        space.check_dim(z.nrows(), "frame")?;
        if z.ncols() != space.n() {
            return Err(Error::Dimension(format!(
                "frame has {} columns, expected {}",
                z.ncols(),
                space.n()
            )));
        }
        if z.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("frame has non-finite entries".into()));
        }
        let r = linalg::rank(&z, tol);
        if r != space.n() {
            return Err(Error::RankDeficient {
                rank: r,
                expected: space.n(),
            });
        }
        let basis = linalg::qr_orthonormal(&z);
        let defect = linalg::max_abs(&space.omega(&basis, &basis));
        if defect > DEFECT_FACTOR * tol {
            return Err(Error::NotIsotropic { defect });
        }
        Ok(Self { space, basis, tol })
    }

    pub fn from_matrix(space: SymplecticSpace, z: DMatrix<f64>) -> Result<Self> {
        Self::new(space, z, DEFAULT_RANK_TOL)
    }

    /// `L_D = R^n x {0}`.
    pub fn dirichlet(n: usize) -> Self {
        let mut z = DMatrix::zeros(2 * n, n);
        z.view_mut((0, 0), (n, n)).fill_with_identity();
        Self {
            space: SymplecticSpace::standard(n),
            basis: z,
            tol: DEFAULT_RANK_TOL,
        }
    }

    /// `L_N = {0} x R^n`.
    pub fn neumann(n: usize) -> Self {
        let mut z = DMatrix::zeros(2 * n, n);
        z.view_mut((n, 0), (n, n)).fill_with_identity();
        Self {
            space: SymplecticSpace::standard(n),
            basis: z,
            tol: DEFAULT_RANK_TOL,
        }
    }

    /// The diagonal of the doubled space over `R^2n`.
    pub fn diagonal(n: usize) -> Self {
        let id = DMatrix::<f64>::identity(2 * n, 2 * n);
        let z = linalg::vstack(&id, &id) * std::f64::consts::FRAC_1_SQRT_2;
        Self {
            space: SymplecticSpace::double(n),
            basis: z,
            tol: DEFAULT_RANK_TOL,
        }
    }

    /// `{(p, A p)}` for symmetric `A`.
    pub fn graph_of_symmetric(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(Error::Dimension("symmetric matrix must be square".into()));
        }
        if linalg::max_abs(&(a - a.transpose())) > DEFECT_FACTOR * DEFAULT_RANK_TOL * (1.0 + linalg::max_abs(a)) {
            return Err(Error::InvalidInput("matrix is not symmetric".into()));
        }
        let z = linalg::vstack(&DMatrix::identity(n, n), a);
        Self::from_matrix(SymplecticSpace::standard(n), z)
    }

    /// `L1 x L2` inside the doubled space.
    pub fn product(l1: &Self, l2: &Self) -> Result<Self> {
        if l1.space != l2.space || l1.space.kind != SpaceKind::Standard {
            return Err(Error::Dimension(
                "product needs two frames of one standard space".into(),
            ));
        }
        let z = linalg::block_diag(&l1.basis, &l2.basis);
        Ok(Self {
            space: SymplecticSpace::double(l1.space.n()),
            basis: z,
            tol: l1.tol.max(l2.tol),
        })
    }

    pub fn space(&self) -> &SymplecticSpace {
        &self.space
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Orthonormal basis, `2n x n`.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn isotropy_defect(&self) -> f64 {
        linalg::max_abs(&self.space.omega(&self.basis, &self.basis))
    }

    /// Image `M L` under a symplectic matrix.
    pub fn transformed(&self, m: &DMatrix<f64>) -> Result<Self> {
        self.space.check_dim(m.nrows(), "matrix")?;
        Self::new(self.space.clone(), m * &self.basis, self.tol)
    }

    pub fn same_subspace(&self, other: &Self) -> bool {
        intersection_dim(self, other, self.tol.max(other.tol))
            .map(|d| d == self.n())
            .unwrap_or(false)
    }
}

fn check_same_space(a: &LagrangianFrame, b: &LagrangianFrame) -> Result<()> {
    if a.space != b.space {
        return Err(Error::Dimension(format!(
            "frames live in different spaces ({:?} {} vs {:?} {})",
            a.space.kind,
            a.space.dim(),
            b.space.kind,
            b.space.dim()
        )));
    }
    Ok(())
}

/// `dim(L1 ∩ L2)` from the rank of the stacked frame `[L1, L2]`.
pub fn intersection_dim(l1: &LagrangianFrame, l2: &LagrangianFrame, tol: f64) -> Result<usize> {
    check_same_space(l1, l2)?;
    let n = l1.n();
    let stacked = linalg::hstack(&l1.basis, &l2.basis);
    Ok(2 * n - linalg::rank(&stacked, tol))
}

/// Orthonormal basis of `L1 ∩ L2`.
pub fn intersection_basis(l1: &LagrangianFrame, l2: &LagrangianFrame, tol: f64) -> Result<DMatrix<f64>> {
    check_same_space(l1, l2)?;
    Ok(linalg::intersection(&l1.basis, &l2.basis, tol))
}

/// Spectral summary of a real quadratic form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadraticFormReport {
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    /// Number of negative eigenvalues.
    pub index: usize,
    /// Number of positive eigenvalues.
    pub coindex: usize,
    pub nullity: usize,
    pub signature: i64,
}

impl QuadraticFormReport {
    /// Eigenvalues with `|λ| <= zero_tol` count toward the nullity.
    pub fn from_symmetric(m: &DMatrix<f64>, zero_tol: f64) -> Self {
        let (vals, _) = linalg::sym_eigen_sorted(m);
        let index = vals.iter().filter(|v| **v < -zero_tol).count();
        let coindex = vals.iter().filter(|v| **v > zero_tol).count();
        Self::assemble(vals, index, coindex)
    }

    /// The `nullity` eigenvalues of smallest modulus are declared zero; used
    /// when the kernel dimension is known from an independent rank count.
    pub fn with_nullity(m: &DMatrix<f64>, nullity: usize) -> Self {
        let (vals, _) = linalg::sym_eigen_sorted(m);
        let mut by_modulus: Vec<usize> = (0..vals.len()).collect();
        by_modulus.sort_by(|&a, &b| vals[a].abs().total_cmp(&vals[b].abs()));
        let zero: Vec<usize> = by_modulus.into_iter().take(nullity).collect();
        let index = (0..vals.len())
            .filter(|i| !zero.contains(i) && vals[*i] < 0.0)
            .count();
        let coindex = (0..vals.len())
            .filter(|i| !zero.contains(i) && vals[*i] >= 0.0)
            .count();
        Self::assemble(vals, index, coindex)
    }

    fn assemble(eigenvalues: Vec<f64>, index: usize, coindex: usize) -> Self {
        let dim = eigenvalues.len();
        Self {
            dim,
            eigenvalues,
            index,
            coindex,
            nullity: dim - index - coindex,
            signature: coindex as i64 - index as i64,
        }
    }

    pub fn extended_coindex(&self) -> usize {
        self.coindex + self.nullity
    }

    pub fn is_regular(&self) -> bool {
        self.nullity == 0
    }
}

/// The form `Q(L0, L1; L)(u, v) = ω(u, T v)` on `L0`, where `T: L0 -> L1` has
/// graph `L`.  Requires `(L0, L1)` transverse and `L ∩ L1 = 0`.
pub fn chart_matrix(l0: &LagrangianFrame, l1: &LagrangianFrame, l: &LagrangianFrame) -> Result<DMatrix<f64>> {
    check_same_space(l0, l1)?;
    check_same_space(l0, l)?;
    let tol = l0.tol.max(l1.tol).max(l.tol);
    if intersection_dim(l0, l1, tol)? != 0 {
        return Err(Error::NotTransverse("(L0, L1) is not a Lagrangian decomposition".into()));
    }
    if intersection_dim(l, l1, tol)? != 0 {
        return Err(Error::NotTransverse("L meets L1".into()));
    }
    let n = l0.n();
    let f0 = &l0.basis;
    let f1 = &l1.basis;
    let basis = linalg::hstack(f0, f1);
    let coef = basis
        .lu()
        .solve(&l.basis)
        .ok_or_else(|| Error::NotTransverse("(L0, L1) is singular".into()))?;
    let a = coef.rows(0, n).into_owned();
    let c = coef.rows(n, n).into_owned();
    let a_inv = a
        .try_inverse()
        .ok_or_else(|| Error::NotTransverse("L meets L1".into()))?;
    let jt = l0.space.j().transpose();
    Ok(linalg::sym(&(f0.transpose() * jt * f1 * c * a_inv)))
}

pub fn chart_form(l0: &LagrangianFrame, l1: &LagrangianFrame, l: &LagrangianFrame) -> Result<QuadraticFormReport> {
    let q = chart_matrix(l0, l1, l)?;
    let tol = l0.tol.max(l1.tol).max(l.tol);
    let scale = 1.0_f64.max(linalg::sym_spectral_radius(&q));
    Ok(QuadraticFormReport::from_symmetric(&q, tol * scale))
}

/// Reduction of a symplectic space modulo an isotropic subspace `I`.
///
/// The reduced space `V_I = (J I)^⊥ ∩ I^⊥` is `J`-invariant; it is given a
/// basis `(e_1..e_m, J e_1..J e_m)` so the reduced structure is the standard
/// one on `R^2m`.
#[derive(Clone, Debug)]
pub struct Reduction {
    ambient: SymplecticSpace,
    reduced: SymplecticSpace,
    /// Columns: adapted basis of `V_I` in ambient coordinates.
    basis: DMatrix<f64>,
    /// Orthonormal basis of `(J I)^⊥ = I^ω`.
    coisotropic: DMatrix<f64>,
    tol: f64,
}

impl Reduction {
    pub fn new(ambient: &SymplecticSpace, isotropic: &DMatrix<f64>, tol: f64) -> Result<Self> {
        ambient.check_dim(isotropic.nrows(), "isotropic basis")?;
        let dim = ambient.dim();
        let i = linalg::column_space(isotropic, tol);
        let k = i.ncols();
        let defect = linalg::max_abs(&ambient.omega(&i, &i));
        if defect > DEFECT_FACTOR * tol {
            return Err(Error::NotIsotropic { defect });
        }
        if k == 0 {
            return Ok(Self {
                ambient: ambient.clone(),
                reduced: ambient.clone(),
                basis: DMatrix::identity(dim, dim),
                coisotropic: DMatrix::identity(dim, dim),
                tol,
            });
        }
        let ji = ambient.j() * &i;
        let coisotropic = linalg::orthogonal_complement(&ji, tol);
        let complement = linalg::orthogonal_complement(&linalg::hstack(&i, &ji), tol);
        let m = ambient.n() - k;
        // Gram–Schmidt over pairs (e, J e); the complement is J-invariant, so
        // every candidate column is eventually exhausted.
        let mut es: Vec<DVector<f64>> = Vec::with_capacity(m);
        let mut fs: Vec<DVector<f64>> = Vec::with_capacity(m);
        for c in 0..complement.ncols() {
            if es.len() == m {
                break;
            }
            let mut v = complement.column(c).into_owned();
            for _ in 0..2 {
                for (e, f) in es.iter().zip(&fs) {
                    v -= e * e.dot(&v) + f * f.dot(&v);
                }
            }
            let norm = v.norm();
            if norm < 1e-3 {
                continue;
            }
            let e = v / norm;
            let f = ambient.j() * &e;
            es.push(e);
            fs.push(f);
        }
        if es.len() != m || complement.ncols() != 2 * m {
            return Err(Error::InvalidInput("reduced space has wrong dimension".into()));
        }
        let mut basis = DMatrix::zeros(dim, 2 * m);
        for (c, e) in es.iter().enumerate() {
            basis.set_column(c, e);
        }
        for (c, f) in fs.iter().enumerate() {
            basis.set_column(m + c, f);
        }
        Ok(Self {
            ambient: ambient.clone(),
            reduced: SymplecticSpace::standard(m),
            basis,
            coisotropic,
            tol,
        })
    }

    pub fn reduced_space(&self) -> &SymplecticSpace {
        &self.reduced
    }

    /// Adapted basis of the reduced space in ambient coordinates.
    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// `π_I L`: the image of `L ∩ I^ω` in `V_I`.
    pub fn project(&self, l: &LagrangianFrame) -> Result<LagrangianFrame> {
        if l.space != self.ambient {
            return Err(Error::Dimension("frame is not in the ambient space".into()));
        }
        if self.reduced.dim() == self.ambient.dim() {
            return Ok(l.clone());
        }
        let m = self.reduced.n();
        if m == 0 {
            return Ok(LagrangianFrame {
                space: self.reduced.clone(),
                basis: DMatrix::zeros(0, 0),
                tol: self.tol,
            });
        }
        let meet = linalg::intersection(l.basis(), &self.coisotropic, self.tol);
        let coords = linalg::column_space(&(self.basis.transpose() * meet), self.tol);
        LagrangianFrame::new(self.reduced.clone(), coords, self.tol)
    }
}

/// `π_I L` for an isotropic `I` given by any spanning matrix.
pub fn symplectic_reduction(isotropic: &DMatrix<f64>, l: &LagrangianFrame) -> Result<LagrangianFrame> {
    Reduction::new(l.space(), isotropic, l.tol())?.project(l)
}

/// Graph `{(v, M v)}` of a symplectic matrix as a Lagrangian of the doubled
/// space; the graph of the identity is the diagonal.
pub fn graph_frame(m: &DMatrix<f64>, tol: f64) -> Result<LagrangianFrame> {
    let dim = m.nrows();
    if !dim.is_multiple_of(2) || m.ncols() != dim {
        return Err(Error::Dimension("graph needs a square matrix of even size".into()));
    }
    let base = SymplecticSpace::standard(dim / 2);
    let scale = 1.0_f64.max(linalg::max_abs(m)).powi(2);
    let defect = base.symplectic_defect(m);
    if defect > DEFECT_FACTOR * tol * scale {
        return Err(Error::NotSymplectic { defect });
    }
    let z = linalg::vstack(&DMatrix::identity(dim, dim), m);
    LagrangianFrame::new(SymplecticSpace::double(dim / 2), z, tol)
}
