//! Small dense linear-algebra helpers shared by the symplectic and index code.
//!
//! Every rank decision goes through a relative singular-value cutoff
//! `tol * sigma_max`, so results do not depend on the scale of the input.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Symmetric part `(m + m^T) / 2`.
pub fn sym(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues ascending.
pub fn sym_eigen_sorted(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let k = m.nrows();
    if k == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(sym(m));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(k, k, |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Singular value decomposition `A = U diag(s) V^T` with `s` descending and
/// `V` square.  Columns of `U` belonging to zero singular values are zero.
pub struct Svd {
    pub u: DMatrix<f64>,
    pub s: Vec<f64>,
    pub v: DMatrix<f64>,
}

/// One-sided Jacobi SVD.
///
/// nalgebra's bidiagonalisation SVD occasionally returns inaccurate singular
/// vectors for exactly rank-deficient inputs, which is the common case for
/// intersections and reductions.  The matrices here are tiny, so the slower
/// but uniformly accurate Jacobi iteration is used instead.  Wide inputs are
/// padded with zero rows so that `V` is always complete.
pub fn svd(a: &DMatrix<f64>) -> Svd {
    let (m, n) = a.shape();
    let rows = m.max(n);
    let mut w = DMatrix::zeros(rows, n);
    w.view_mut((0, 0), (m, n)).copy_from(a);
    let mut v = DMatrix::<f64>::identity(n, n);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = w.column(p).norm_squared();
                let beta = w.column(q).norm_squared();
                let gamma = w.column(p).dot(&w.column(q));
                if gamma == 0.0 || gamma.abs() <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let sign = if zeta >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, p, q, c, s);
                rotate_columns(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let smax = s.first().copied().unwrap_or(0.0);
    let mut u = DMatrix::zeros(m, n);
    for (c, &j) in order.iter().enumerate() {
        if norms[j] > f64::EPSILON * smax && norms[j] > 0.0 {
            let col = w.view((0, j), (m, 1)) / norms[j];
            u.set_column(c, &col.column(0));
        }
    }
    let v = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Svd { u, s, v }
}

fn rotate_columns(m: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for i in 0..m.nrows() {
        let (xp, xq) = (m[(i, p)], m[(i, q)]);
        m[(i, p)] = c * xp - s * xq;
        m[(i, q)] = s * xp + c * xq;
    }
}

/// Minimum-norm least-squares solution of `A X = B`, singular values below
/// `tol * s_max` treated as zero.
pub fn lstsq(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let d = svd(a);
    let smax = d.s.first().copied().unwrap_or(0.0);
    let utb = d.u.transpose() * b;
    let mut y = DMatrix::zeros(a.ncols(), b.ncols());
    for (i, &s) in d.s.iter().enumerate() {
        if s > tol * smax && s > 0.0 {
            y.set_row(i, &(utb.row(i) / s));
        }
    }
    d.v * y
}

/// Singular values (descending) and a full set of right singular vectors,
/// returned as the columns of an `ncols x ncols` orthogonal matrix.
pub fn svd_full_right(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let d = svd(a);
    (d.s, d.v)
}

/// Numerical rank with relative cutoff.
pub fn rank(a: &DMatrix<f64>, tol: f64) -> usize {
    if a.is_empty() {
        return 0;
    }
    let s = svd(a).s;
    let smax = s[0];
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|x| **x > tol * smax).count()
}

/// Orthonormal basis of the column space (rank revealing).
pub fn column_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let m = a.nrows();
    if a.ncols() == 0 || m == 0 {
        return DMatrix::zeros(m, 0);
    }
    let d = svd(a);
    let smax = d.s[0];
    if smax == 0.0 {
        return DMatrix::zeros(m, 0);
    }
    let keep = d.s.iter().take_while(|x| **x > tol * smax).count().min(m);
    d.u.columns(0, keep).into_owned()
}

/// Orthonormal basis of the kernel.
pub fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = a.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let (sv, v) = svd_full_right(a);
    let smax = sv.first().copied().unwrap_or(0.0);
    let kernel: Vec<usize> = (0..n).filter(|&i| smax == 0.0 || sv[i] <= tol * smax).collect();
    DMatrix::from_fn(n, kernel.len(), |r, c| v[(r, kernel[c])])
}

/// Orthonormal basis of the orthogonal complement of the column space.
pub fn orthogonal_complement(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let basis = column_space(a, tol);
    null_space(&basis.transpose(), tol)
}

/// Orthonormal basis of `span(a) ∩ span(b)`.
pub fn intersection(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let qa = column_space(a, tol);
    let qb = column_space(b, tol);
    let dim = qa.nrows();
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return DMatrix::zeros(dim, 0);
    }
    let mut stacked = DMatrix::zeros(dim, qa.ncols() + qb.ncols());
    stacked.view_mut((0, 0), (dim, qa.ncols())).copy_from(&qa);
    stacked
        .view_mut((0, qa.ncols()), (dim, qb.ncols()))
        .copy_from(&(-&qb));
    let ker = null_space(&stacked, tol);
    if ker.ncols() == 0 {
        return DMatrix::zeros(dim, 0);
    }
    let coeffs = ker.rows(0, qa.ncols()).into_owned();
    column_space(&(qa * coeffs), tol)
}

/// Thin QR orthonormalization with the sign of each column fixed so that the
/// triangular factor has a nonnegative diagonal; continuous in the input.
pub fn qr_orthonormal(a: &DMatrix<f64>) -> DMatrix<f64> {
    if a.ncols() == 0 {
        return a.clone();
    }
    let qr = a.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..q.ncols() {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Horizontal concatenation `[a, b]`.
pub fn hstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), b.nrows(), "hstack row mismatch");
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    out
}

/// Vertical concatenation `[a; b]`.
pub fn vstack(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.ncols(), b.ncols(), "vstack column mismatch");
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    out
}

/// Block diagonal `diag(a, b)`.
pub fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Least-squares coefficients `x` with `z x ≈ w` for a full-column-rank `z`.
pub fn solve_frame(z: &DMatrix<f64>, w: &DMatrix<f64>) -> DMatrix<f64> {
    let gram = z.transpose() * z;
    let rhs = z.transpose() * w;
    match gram.clone().cholesky() {
        Some(ch) => ch.solve(&rhs),
        None => gram
            .lu()
            .solve(&rhs)
            .unwrap_or_else(|| DMatrix::zeros(z.ncols(), w.ncols())),
    }
}

/// Spectral norm of a symmetric matrix.
pub fn sym_spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let (vals, _) = sym_eigen_sorted(m);
    vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect()
}

pub fn from_rows(rows: &[Vec<f64>], ncols: usize) -> Option<DMatrix<f64>> {
    if rows.iter().any(|r| r.len() != ncols) {
        return None;
    }
    Some(DMatrix::from_fn(rows.len(), ncols, |r, c| rows[r][c]))
}

pub fn unit(dim: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(dim);
    v[i] = 1.0;
    v
}
