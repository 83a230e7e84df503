//! Dense complex helpers shared by every module.
//!
//! All rank and null-space decisions go through [`Svd`] so that the same
//! relative tolerance governs degeneracy everywhere.

use faer::{Mat, Side};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Shorthand constructor for a complex scalar.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Builds a complex matrix from real row-major data.
pub fn real_matrix(rows: usize, cols: usize, data: &[f64]) -> CMatrix {
    assert_eq!(data.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| c64(data[i * cols + j], 0.0))
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

fn to_faer(m: &CMatrix) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD with singular values sorted in descending order.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    pub fn new(m: &CMatrix) -> Self {
        let (r, c) = m.shape();
        let k = r.min(c);
        if k == 0 {
            return Svd {
                u: zeros(r, 0),
                s: Vec::new(),
                v: zeros(c, 0),
            };
        }
        let svd = to_faer(m).thin_svd().expect("svd converges");
        let s = (0..k).map(|i| svd.S()[i].re).collect();
        Svd {
            u: from_faer(svd.U()),
            s,
            v: from_faer(svd.V()),
        }
    }

    pub fn largest(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    pub fn smallest(&self) -> f64 {
        self.s.last().copied().unwrap_or(0.0)
    }

    /// Number of singular values above `tol * largest`.
    pub fn rank(&self, tol: f64) -> usize {
        let top = self.largest();
        if top == 0.0 {
            return 0;
        }
        self.s.iter().filter(|&&x| x > tol * top).count()
    }
}

pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        0.0
    } else {
        Svd::new(m).largest()
    }
}

/// Minimum-norm least-squares solution of `m x = b`, singular values below
/// `tol * largest` dropped.
pub fn pseudo_solve(m: &CMatrix, b: &CMatrix, tol: f64) -> CMatrix {
    let svd = Svd::new(m);
    let keep = svd.rank(tol);
    let mut x = zeros(m.ncols(), b.ncols());
    for i in 0..keep {
        let coef = svd.u.columns(i, 1).adjoint() * b / c64(svd.s[i], 0.0);
        x += svd.v.columns(i, 1) * coef;
    }
    x
}

pub fn rank(m: &CMatrix, tol: f64) -> usize {
    Svd::new(m).rank(tol)
}

/// Orthonormal basis of the column space, rank decided relative to the
/// largest singular value.
pub fn column_space(m: &CMatrix, tol: f64) -> CMatrix {
    let svd = Svd::new(m);
    let r = svd.rank(tol);
    svd.u.columns(0, r).into_owned()
}

/// Orthonormal basis of the column space with at most `r` columns (the
/// leading left singular vectors).
pub fn leading_columns(m: &CMatrix, r: usize) -> CMatrix {
    let svd = Svd::new(m);
    let r = r.min(svd.s.len());
    svd.u.columns(0, r).into_owned()
}

/// Euclidean orthonormal complement of an orthonormal column set in C^n.
pub fn orthonormal_complement(q: &CMatrix) -> CMatrix {
    let n = q.nrows();
    if q.ncols() == 0 {
        return identity(n);
    }
    let p = identity(n) - q * q.adjoint();
    // singular values of p are 0 or 1 up to rounding
    let svd = Svd::new(&p);
    let keep = svd.s.iter().filter(|&&x| x > 0.5).count();
    svd.u.columns(0, keep).into_owned()
}

/// Orthonormal basis of the null space of `m`.
pub fn null_space(m: &CMatrix, tol: f64) -> CMatrix {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return identity(cols);
    }
    let row_space = column_space(&m.adjoint(), tol);
    orthonormal_complement(&row_space)
}

/// Orthonormal basis of the null space of `m`, treating singular values
/// at or below the absolute threshold `thr` as zero.
pub fn null_space_abs(m: &CMatrix, thr: f64) -> CMatrix {
    let cols = m.ncols();
    if m.nrows() == 0 {
        return identity(cols);
    }
    let svd = Svd::new(&m.adjoint());
    let keep = svd.s.iter().filter(|&&x| x > thr).count();
    orthonormal_complement(&svd.u.columns(0, keep).into_owned())
}

/// Inverse of a square matrix, or `None` if its condition exceeds `1/tol`.
pub fn inverse_checked(m: &CMatrix, tol: f64) -> Option<CMatrix> {
    assert!(m.is_square(), "inverse of a non-square matrix");
    let n = m.nrows();
    if n == 0 {
        return Some(zeros(0, 0));
    }
    let svd = Svd::new(m);
    if svd.largest() == 0.0 || svd.smallest() <= tol * svd.largest() {
        return None;
    }
    let sinv = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c64(1.0 / svd.s[i], 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    Some(&svd.v * sinv * svd.u.adjoint())
}

/// Euclidean orthogonal projector onto the span of orthonormal columns.
pub fn orthoprojector(q: &CMatrix) -> CMatrix {
    q * q.adjoint()
}

/// Spectral-norm distance between the Euclidean projectors onto the column
/// spaces of `a` and `b`.
pub fn subspace_distance(a: &CMatrix, b: &CMatrix, tol: f64) -> f64 {
    assert_eq!(a.nrows(), b.nrows());
    let pa = orthoprojector(&column_space(a, tol));
    let pb = orthoprojector(&column_space(b, tol));
    spectral_norm(&(pa - pb))
}

/// Relative Hermitian defect `|M - M*| / |M|` in the Frobenius norm.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let scale = m.norm();
    if scale == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / scale
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let h = (m + m.adjoint()).scale(0.5);
    let eig = to_faer(&h)
        .self_adjoint_eigen(Side::Lower)
        .expect("eigensolver converges");
    let values = (0..n).map(|i| eig.S()[i].re).collect();
    (values, from_faer(eig.U()))
}

pub fn block_diag(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

pub fn hstack(blocks: &[&CMatrix]) -> CMatrix {
    let rows = blocks.first().map_or(0, |b| b.nrows());
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.view_mut((0, at), (rows, b.ncols())).copy_from(*b);
        at += b.ncols();
    }
    out
}

pub fn vstack(blocks: &[&CMatrix]) -> CMatrix {
    let cols = blocks.first().map_or(0, |b| b.ncols());
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.ncols(), cols, "vstack column mismatch");
        out.view_mut((at, 0), (b.nrows(), cols)).copy_from(*b);
        at += b.nrows();
    }
    out
}

/// `A - z I` for square `A`.
pub fn shifted(a: &CMatrix, z: C64) -> CMatrix {
    let mut out = a.clone();
    for i in 0..a.nrows() {
        out[(i, i)] -= z;
    }
    out
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|x| x.re.is_finite() && x.im.is_finite())
}

/// Extends an orthonormal basis by the part of `w` outside its span.
///
/// The rank threshold is relative to the norm of `w` before projection.
pub fn extend_basis(basis: &CMatrix, w: &CMatrix, tol: f64) -> CMatrix {
    let scale = spectral_norm(w);
    if scale == 0.0 {
        return basis.clone();
    }
    let mut r = w.clone();
    if basis.ncols() > 0 {
        // two passes of classical Gram-Schmidt
        for _ in 0..2 {
            r -= basis * (basis.adjoint() * &r);
        }
    }
    let svd = Svd::new(&r);
    let keep = svd.s.iter().filter(|&&s| s > tol * scale).count();
    let fresh = svd.u.columns(0, keep).into_owned();
    hstack(&[basis, &fresh])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svd_sorted_and_rank() {
        let m = real_matrix(3, 3, &[1.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0]);
        let svd = Svd::new(&m);
        assert!((svd.s[0] - 5.0).abs() < 1e-14);
        assert!((svd.s[1] - 1.0).abs() < 1e-14);
        assert_eq!(svd.rank(1e-9), 2);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let m = real_matrix(1, 3, &[1.0, 1.0, 0.0]);
        let ns = null_space(&m, 1e-9);
        assert_eq!(ns.ncols(), 2);
        assert!((&m * &ns).norm() < 1e-14);
    }

    #[test]
    fn empty_shapes() {
        assert_eq!(Svd::new(&zeros(0, 3)).s.len(), 0);
        assert_eq!(null_space(&zeros(0, 2), 1e-9).ncols(), 2);
        assert_eq!(column_space(&zeros(3, 0), 1e-9).shape(), (3, 0));
        assert_eq!(inverse_checked(&zeros(0, 0), 1e-9).unwrap().shape(), (0, 0));
        assert_eq!(orthonormal_complement(&zeros(2, 0)).ncols(), 2);
    }

    #[test]
    fn null_space_of_invertible_is_empty() {
        let m = CMatrix::from_fn(2, 2, |i, j| c64(1.0 + i as f64, j as f64 - 0.3 * i as f64));
        assert_eq!(null_space(&m, 1e-9).ncols(), 0);
        assert_eq!(orthonormal_complement(&identity(3)).ncols(), 0);
    }

    #[test]
    fn inverse_rejects_singular() {
        let m = real_matrix(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(inverse_checked(&m, 1e-9).is_none());
        let m = real_matrix(2, 2, &[2.0, 1.0, 1.0, 1.0]);
        let inv = inverse_checked(&m, 1e-9).unwrap();
        assert!((&m * inv - identity(2)).norm() < 1e-14);
    }

    #[test]
    fn extend_basis_skips_dependent_columns() {
        let b = column_space(&real_matrix(3, 1, &[1.0, 0.0, 0.0]), 1e-9);
        let w = real_matrix(3, 2, &[2.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
        let e = extend_basis(&b, &w, 1e-9);
        assert_eq!(e.ncols(), 2);
        assert!((e.adjoint() * &e - identity(2)).norm() < 1e-13);
    }
}
