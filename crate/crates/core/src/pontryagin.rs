//! Finite-dimensional Pontryagin spaces: a Hermitian invertible Gram matrix
//! `J` defines the indefinite inner product `[x, y] = y* J x`.

use crate::error::{Error, Result};
use crate::linalg::{
    self, block_diag, c64, hermitian_defect, hermitian_eigen, identity, inverse_checked,
    spectral_norm, CMatrix, Svd, C64,
};

/// Default relative tolerance for rank, inertia and degeneracy decisions.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Signature counts of a Hermitian matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Inertia {
    pub positive: usize,
    pub zero: usize,
    pub negative: usize,
}

impl Inertia {
    pub fn dim(&self) -> usize {
        self.positive + self.zero + self.negative
    }
}

/// Counts eigenvalues of `m` below `-tol·|m|₂`, above `+tol·|m|₂`, and in between.
pub fn hermitian_inertia(m: &CMatrix, tol: f64) -> Result<Inertia> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            context: "hermitian_inertia",
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if !linalg::is_finite(m) {
        return Err(Error::NonFinite("hermitian_inertia"));
    }
    let defect = hermitian_defect(m);
    if defect > tol.max(1e-12) {
        return Err(Error::NotHermitian { residual: defect });
    }
    let (values, _) = hermitian_eigen(m);
    let scale = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let thr = tol * scale;
    let mut out = Inertia {
        positive: 0,
        zero: 0,
        negative: 0,
    };
    for v in values {
        if v > thr {
            out.positive += 1;
        } else if v < -thr {
            out.negative += 1;
        } else {
            out.zero += 1;
        }
    }
    Ok(out)
}

/// A Pontryagin space `(C^n, J)`.
#[derive(Clone, Debug)]
pub struct PontryaginSpace {
    gram: CMatrix,
    gram_inv: CMatrix,
    inertia: Inertia,
    tol: f64,
}

impl PontryaginSpace {
    pub fn new(gram: CMatrix) -> Result<Self> {
        Self::with_tol(gram, DEFAULT_TOL)
    }

    pub fn with_tol(gram: CMatrix, tol: f64) -> Result<Self> {
        let inertia = hermitian_inertia(&gram, tol)?;
        let gram_inv = inverse_checked(&gram, tol).ok_or_else(|| Error::SingularGram {
            smallest: Svd::new(&gram).smallest(),
        })?;
        if inertia.zero != 0 {
            return Err(Error::SingularGram { smallest: 0.0 });
        }
        // symmetrize so that downstream products stay Hermitian to rounding
        let gram = (&gram + gram.adjoint()).scale(0.5);
        let gram_inv = (&gram_inv + gram_inv.adjoint()).scale(0.5);
        Ok(PontryaginSpace {
            gram,
            gram_inv,
            inertia,
            tol,
        })
    }

    /// Hilbert space `C^n` with the identity metric.
    pub fn euclidean(n: usize) -> Self {
        Self::new(identity(n)).expect("identity is a valid Gram matrix")
    }

    /// Diagonal metric with the given signs (`true` for +1).
    pub fn from_signs(signs: &[bool]) -> Self {
        let n = signs.len();
        let g = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                c64(if signs[i] { 1.0 } else { -1.0 }, 0.0)
            } else {
                c64(0.0, 0.0)
            }
        });
        Self::new(g).expect("diagonal signature is a valid Gram matrix")
    }

    pub fn zero() -> Self {
        Self::euclidean(0)
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &CMatrix {
        &self.gram
    }

    pub fn gram_inv(&self) -> &CMatrix {
        &self.gram_inv
    }

    pub fn neg_index(&self) -> usize {
        self.inertia.negative
    }

    pub fn inertia(&self) -> Inertia {
        self.inertia
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Same metric with a different decision tolerance.
    pub fn retol(&self, tol: f64) -> Self {
        PontryaginSpace {
            tol,
            ..self.clone()
        }
    }

    /// `[x, y] = y* J x`.
    pub fn inner(&self, x: &CMatrix, y: &CMatrix) -> C64 {
        (y.adjoint() * &self.gram * x)[(0, 0)]
    }

    /// Cross Gram `Y* J X`.
    pub fn cross_gram(&self, x: &CMatrix, y: &CMatrix) -> CMatrix {
        y.adjoint() * &self.gram * x
    }

    /// Basis `S` with `S* J S = diag(±1)`; also returns the signs
    /// (`true` for +1), positives first.
    pub fn canonical_basis(&self) -> (CMatrix, Vec<bool>) {
        let (values, vectors) = hermitian_eigen(&self.gram);
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let s = CMatrix::from_fn(n, n, |i, j| {
            let k = order[j];
            vectors[(i, k)] / values[k].abs().sqrt()
        });
        let signs = order.iter().map(|&k| values[k] > 0.0).collect();
        (s, signs)
    }

    fn check_dim(&self, context: &'static str, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                context,
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// Adjoint of an endomorphism with respect to `J`: `T^[*] = J⁻¹ T* J`.
pub fn j_adjoint(t: &CMatrix, sp: &PontryaginSpace) -> Result<CMatrix> {
    sp.check_dim("j_adjoint (rows)", t.nrows())?;
    sp.check_dim("j_adjoint (cols)", t.ncols())?;
    Ok(sp.gram_inv() * t.adjoint() * sp.gram())
}

/// Adjoint of a map `Γ: H → K`, where `H` carries the identity metric:
/// `Γ⁺ = Γ* J`.
pub fn map_adjoint(gamma: &CMatrix, sp: &PontryaginSpace) -> Result<CMatrix> {
    sp.check_dim("map_adjoint", gamma.nrows())?;
    Ok(gamma.adjoint() * sp.gram())
}

/// Whether `J T` is Hermitian to the space tolerance.
pub fn is_selfadjoint(t: &CMatrix, sp: &PontryaginSpace) -> Result<bool> {
    Ok(selfadjoint_defect(t, sp)? <= sp.tol())
}

/// `|JT - (JT)*|₂ / |JT|₂`, zero for `T = 0`.
pub fn selfadjoint_defect(t: &CMatrix, sp: &PontryaginSpace) -> Result<f64> {
    sp.check_dim("is_selfadjoint (rows)", t.nrows())?;
    sp.check_dim("is_selfadjoint (cols)", t.ncols())?;
    let jt = sp.gram() * t;
    let scale = spectral_norm(&jt);
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(spectral_norm(&(&jt - jt.adjoint())) / scale)
}

/// Orthogonal sum `K₁ [+] K₂` with block-diagonal metric.
pub fn direct_sum(sp1: &PontryaginSpace, sp2: &PontryaginSpace) -> PontryaginSpace {
    let gram = block_diag(sp1.gram(), sp2.gram());
    let gram_inv = block_diag(sp1.gram_inv(), sp2.gram_inv());
    let a = sp1.inertia();
    let b = sp2.inertia();
    PontryaginSpace {
        gram,
        gram_inv,
        inertia: Inertia {
            positive: a.positive + b.positive,
            zero: 0,
            negative: a.negative + b.negative,
        },
        tol: sp1.tol().max(sp2.tol()),
    }
}

/// A subspace of a Pontryagin space, spanned by linearly independent columns.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: PontryaginSpace,
    basis: CMatrix,
}

impl Subspace {
    /// Wraps a basis; fails if the columns are dependent to tolerance.
    pub fn new(ambient: &PontryaginSpace, basis: CMatrix) -> Result<Self> {
        ambient.check_dim("Subspace::new", basis.nrows())?;
        let r = linalg::rank(&basis, ambient.tol());
        if r != basis.ncols() {
            return Err(Error::RankDeficientBasis {
                rank: r,
                cols: basis.ncols(),
            });
        }
        Ok(Subspace {
            ambient: ambient.clone(),
            basis,
        })
    }

    /// Span of arbitrary columns; the stored basis is Euclidean-orthonormal.
    pub fn span(ambient: &PontryaginSpace, vectors: &CMatrix) -> Self {
        assert_eq!(vectors.nrows(), ambient.dim(), "span: row mismatch");
        Subspace {
            ambient: ambient.clone(),
            basis: linalg::column_space(vectors, ambient.tol()),
        }
    }

    pub fn zero(ambient: &PontryaginSpace) -> Self {
        Subspace {
            ambient: ambient.clone(),
            basis: linalg::zeros(ambient.dim(), 0),
        }
    }

    pub fn full(ambient: &PontryaginSpace) -> Self {
        Subspace {
            ambient: ambient.clone(),
            basis: identity(ambient.dim()),
        }
    }

    pub fn ambient(&self) -> &PontryaginSpace {
        &self.ambient
    }

    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn gram(&self) -> CMatrix {
        subspace_gram(self)
    }

    /// Smallest singular value of the restricted Gram relative to `|B|²|J|`.
    pub fn degeneracy(&self) -> f64 {
        if self.dim() == 0 {
            return f64::INFINITY;
        }
        let scale = spectral_norm(&self.basis).powi(2) * spectral_norm(self.ambient.gram());
        Svd::new(&self.gram()).smallest() / scale
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.degeneracy() > self.ambient.tol()
    }

    /// Inertia of the restricted Gram.
    pub fn inertia(&self) -> Result<Inertia> {
        hermitian_inertia(&self.gram(), self.ambient.tol())
    }

    /// `{x : [x, b] = 0 for all b in the subspace}`.
    pub fn j_orthogonal_complement(&self) -> Subspace {
        let constraint = self.basis.adjoint() * self.ambient.gram();
        Subspace {
            ambient: self.ambient.clone(),
            basis: linalg::null_space(&constraint, self.ambient.tol()),
        }
    }

    /// Projector distance to another subspace of the same ambient space.
    pub fn distance(&self, other: &Subspace) -> f64 {
        linalg::subspace_distance(&self.basis, &other.basis, self.ambient.tol())
    }

    /// Whether every column of `v` lies in the subspace (relative residual).
    pub fn contains(&self, v: &CMatrix) -> bool {
        let scale = spectral_norm(v);
        if scale == 0.0 {
            return true;
        }
        let q = linalg::column_space(&self.basis, self.ambient.tol());
        let resid = v - &q * (q.adjoint() * v);
        spectral_norm(&resid) <= 1e3 * self.ambient.tol() * scale
    }
}

/// `B* J B` for the subspace basis `B`.
pub fn subspace_gram(s: &Subspace) -> CMatrix {
    s.ambient.cross_gram(&s.basis, &s.basis)
}

/// J-orthogonal projection `E = B (B* J B)⁻¹ B* J` onto a non-degenerate subspace.
pub fn orthogonal_projection(s: &Subspace) -> Result<CMatrix> {
    let n = s.ambient.dim();
    if s.dim() == 0 {
        return Ok(linalg::zeros(n, n));
    }
    if !s.is_nondegenerate() {
        return Err(Error::DegenerateSubspace {
            smallest: s.degeneracy(),
        });
    }
    let g = s.gram();
    let ginv = inverse_checked(&g, 0.0).ok_or(Error::DegenerateSubspace { smallest: 0.0 })?;
    Ok(&s.basis * ginv * s.basis.adjoint() * s.ambient.gram())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_matrix;

    fn swap2() -> CMatrix {
        real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    #[test]
    fn inertia_examples() {
        let d = real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let want = Inertia {
            positive: 1,
            zero: 0,
            negative: 1,
        };
        assert_eq!(hermitian_inertia(&d, DEFAULT_TOL).unwrap(), want);
        assert_eq!(hermitian_inertia(&swap2(), DEFAULT_TOL).unwrap(), want);
        let j = block_diag(&identity(2), &swap2());
        assert_eq!(
            hermitian_inertia(&j, DEFAULT_TOL).unwrap(),
            Inertia {
                positive: 3,
                zero: 0,
                negative: 1
            }
        );
    }

    #[test]
    fn inertia_rejects_non_hermitian() {
        let m = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            hermitian_inertia(&m, DEFAULT_TOL),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn singular_gram_rejected() {
        let g = real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            PontryaginSpace::new(g),
            Err(Error::SingularGram { .. })
        ));
    }

    #[test]
    fn adjoint_hilbert_case_is_conjugate_transpose() {
        let sp = PontryaginSpace::euclidean(2);
        let t = CMatrix::from_fn(2, 2, |i, j| c64(i as f64 + 1.0, j as f64 - 0.5));
        let adj = j_adjoint(&t, &sp).unwrap();
        assert!((adj - t.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn adjoint_of_identity() {
        let sp = PontryaginSpace::new(swap2()).unwrap();
        assert!((j_adjoint(&identity(2), &sp).unwrap() - identity(2)).norm() < 1e-14);
        assert!((map_adjoint(&identity(2), &sp).unwrap() - swap2()).norm() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let sp = PontryaginSpace::euclidean(3);
        assert!(matches!(
            j_adjoint(&identity(2), &sp),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn selfadjoint_examples() {
        let a = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let krein = PontryaginSpace::new(swap2()).unwrap();
        assert!(is_selfadjoint(&a, &krein).unwrap());
        assert!(!is_selfadjoint(&a, &PontryaginSpace::euclidean(2)).unwrap());
    }

    #[test]
    fn subspace_gram_examples() {
        let krein = PontryaginSpace::new(swap2()).unwrap();
        let e1 = Subspace::new(&krein, real_matrix(2, 1, &[1.0, 0.0])).unwrap();
        assert!(subspace_gram(&e1).norm() < 1e-15);
        assert!((subspace_gram(&Subspace::full(&krein)) - swap2()).norm() < 1e-15);
        let sig = PontryaginSpace::from_signs(&[true, false]);
        let diag = Subspace::new(&sig, real_matrix(2, 1, &[1.0, 1.0])).unwrap();
        assert!(subspace_gram(&diag).norm() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let sig = PontryaginSpace::from_signs(&[true, false]);
        let full = orthogonal_projection(&Subspace::full(&sig)).unwrap();
        assert!((full - identity(2)).norm() < 1e-14);
        let e1 = Subspace::new(&sig, real_matrix(2, 1, &[1.0, 0.0])).unwrap();
        let p = orthogonal_projection(&e1).unwrap();
        assert!((p - real_matrix(2, 2, &[1.0, 0.0, 0.0, 0.0])).norm() < 1e-14);

        let krein = PontryaginSpace::new(swap2()).unwrap();
        let e1 = Subspace::new(&krein, real_matrix(2, 1, &[1.0, 0.0])).unwrap();
        assert!(matches!(
            orthogonal_projection(&e1),
            Err(Error::DegenerateSubspace { .. })
        ));
    }

    #[test]
    fn direct_sum_examples() {
        let k = direct_sum(
            &PontryaginSpace::euclidean(2),
            &PontryaginSpace::new(swap2()).unwrap(),
        );
        assert_eq!(k.dim(), 4);
        assert_eq!(k.neg_index(), 1);
        assert!((k.gram() - block_diag(&identity(2), &swap2())).norm() < 1e-15);

        let x = PontryaginSpace::from_signs(&[true, false, true]);
        let y = direct_sum(&x, &PontryaginSpace::zero());
        assert_eq!(y.dim(), 3);
        assert!((y.gram() - x.gram()).norm() == 0.0);

        let s = PontryaginSpace::from_signs(&[true, false]);
        assert_eq!(direct_sum(&s, &s).neg_index(), 2);
    }

    #[test]
    fn canonical_basis_diagonalizes() {
        let g = real_matrix(3, 3, &[2.0, 1.0, 0.0, 1.0, -1.0, 0.5, 0.0, 0.5, 3.0]);
        let sp = PontryaginSpace::new(g).unwrap();
        let (s, signs) = sp.canonical_basis();
        let d = s.adjoint() * sp.gram() * &s;
        for i in 0..3 {
            let want = if signs[i] { 1.0 } else { -1.0 };
            assert!((d[(i, i)].re - want).abs() < 1e-12);
        }
        assert_eq!(signs.iter().filter(|s| !**s).count(), sp.neg_index());
    }
}
