//! Linear relations (multivalued operators) in a Pontryagin space.
//!
//! A relation is stored by generator pairs `(M, N)`: it is the subspace
//! `{(Mc, Nc)}` of `K ⊕ K`. The stacked generators `[M; N]` are kept
//! orthonormal, so rank decisions on `M` or `N` alone can use absolute
//! thresholds. Two relations are equal when the Euclidean projectors onto
//! their stacked generators coincide.

use crate::error::{Error, Result};
use crate::linalg::{self, block_diag, identity, spectral_norm, vstack, CMatrix, Svd, C64};
use crate::pontryagin::{direct_sum, PontryaginSpace, Subspace};

#[derive(Clone, Debug)]
pub struct LinearRelation {
    space: PontryaginSpace,
    dom: CMatrix,
    ran: CMatrix,
}

impl LinearRelation {
    /// Relation spanned by the column pairs of `m` and `n`. Redundant
    /// generators are dropped.
    pub fn new(space: &PontryaginSpace, m: CMatrix, n: CMatrix) -> Result<Self> {
        let dim = space.dim();
        for (ctx, mat) in [
            ("LinearRelation (M rows)", &m),
            ("LinearRelation (N rows)", &n),
        ] {
            if mat.nrows() != dim {
                return Err(Error::DimensionMismatch {
                    context: ctx,
                    expected: dim,
                    found: mat.nrows(),
                });
            }
        }
        if m.ncols() != n.ncols() {
            return Err(Error::DimensionMismatch {
                context: "LinearRelation (generator count)",
                expected: m.ncols(),
                found: n.ncols(),
            });
        }
        if !linalg::is_finite(&m) || !linalg::is_finite(&n) {
            return Err(Error::NonFinite("LinearRelation"));
        }
        let stacked = vstack(&[&m, &n]);
        Ok(Self::from_stacked(
            space,
            &linalg::column_space(&stacked, space.tol()),
        ))
    }

    fn from_stacked(space: &PontryaginSpace, stacked: &CMatrix) -> Self {
        let d = space.dim();
        LinearRelation {
            space: space.clone(),
            dom: stacked.rows(0, d).into_owned(),
            ran: stacked.rows(d, d).into_owned(),
        }
    }

    /// Graph `{(c, Tc)}` of an operator.
    pub fn from_operator(t: &CMatrix, sp: &PontryaginSpace) -> Result<Self> {
        if t.nrows() != sp.dim() || t.ncols() != sp.dim() {
            return Err(Error::DimensionMismatch {
                context: "from_operator",
                expected: sp.dim(),
                found: if t.nrows() != sp.dim() {
                    t.nrows()
                } else {
                    t.ncols()
                },
            });
        }
        Self::new(sp, identity(sp.dim()), t.clone())
    }

    pub fn space(&self) -> &PontryaginSpace {
        &self.space
    }

    /// Domain-side generators `M`.
    pub fn dom_generators(&self) -> &CMatrix {
        &self.dom
    }

    /// Range-side generators `N`.
    pub fn ran_generators(&self) -> &CMatrix {
        &self.ran
    }

    /// Dimension of the relation as a subspace of `K ⊕ K`.
    pub fn dim(&self) -> usize {
        self.dom.ncols()
    }

    fn stacked(&self) -> CMatrix {
        vstack(&[&self.dom, &self.ran])
    }

    /// Euclidean projector onto the relation inside `K ⊕ K`.
    pub fn projector(&self) -> CMatrix {
        linalg::orthoprojector(&linalg::column_space(&self.stacked(), self.space.tol()))
    }

    /// Projector distance between two relations on the same space.
    pub fn distance(&self, other: &LinearRelation) -> f64 {
        spectral_norm(&(self.projector() - other.projector()))
    }

    /// Equality as subspaces, to `1e3·tol` in projector distance.
    pub fn same_as(&self, other: &LinearRelation) -> bool {
        self.distance(other) <= 1e3 * self.space.tol()
    }

    /// `{(x, y) : [y, u] = [x, v] for all (u, v) in R}`.
    pub fn adjoint(&self) -> LinearRelation {
        let j = self.space.gram();
        // [x; y] in the null space of [N*J, -M*J]
        let constraint = linalg::hstack(&[&(self.ran.adjoint() * j), &(-(self.dom.adjoint() * j))]);
        let ns = linalg::null_space(&constraint, self.space.tol());
        Self::from_stacked(&self.space, &ns)
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.same_as(&self.adjoint())
    }

    /// `{h : (0, h) ∈ R}`.
    pub fn multivalued_part(&self) -> Subspace {
        let kernel = linalg::null_space_abs(&self.dom, self.space.tol());
        let vectors = &self.ran * kernel;
        Subspace::span(&self.space, &vectors)
    }

    /// `{x : (x, 0) ∈ R}`.
    pub fn kernel(&self) -> Subspace {
        let coeffs = linalg::null_space_abs(&self.ran, self.space.tol());
        Subspace::span(&self.space, &(&self.dom * coeffs))
    }

    /// Whether the relation is the graph of an everywhere defined operator.
    pub fn is_operator(&self) -> bool {
        let svd = Svd::new(&self.dom);
        self.dim() == self.space.dim() && (self.dim() == 0 || svd.smallest() > self.space.tol())
    }

    /// The operator matrix if the relation is an operator graph.
    pub fn as_operator(&self) -> Option<CMatrix> {
        if !self.is_operator() || self.dim() != self.space.dim() {
            return None;
        }
        let minv = linalg::inverse_checked(&self.dom, self.space.tol())?;
        Some(&self.ran * minv)
    }

    /// `(R - z)⁻¹`, mapping `Nc - zMc ↦ Mc`.
    pub fn resolvent(&self, z: C64) -> Result<CMatrix> {
        let n = self.space.dim();
        let d = &self.ran - self.dom.map(|x| x * z);
        let svd = Svd::new(&d);
        let r = svd.rank(self.space.tol());
        // surjective onto K and single valued
        if r != n || r != self.dim() {
            return Err(Error::NotInResolventSet { z });
        }
        let dinv =
            linalg::inverse_checked(&d, self.space.tol()).ok_or(Error::NotInResolventSet { z })?;
        Ok(&self.dom * dinv)
    }

    /// `A ∩ (S × S)` for a subspace `S` given by a basis.
    pub fn restrict_to(&self, basis: &CMatrix) -> LinearRelation {
        let target = block_diag(basis, basis);
        let joint = linalg::hstack(&[&self.stacked(), &(-target)]);
        let coeffs = linalg::null_space(&joint, self.space.tol());
        let k = self.dim();
        let pairs = self.stacked() * coeffs.rows(0, k);
        Self::from_stacked(&self.space, &linalg::column_space(&pairs, self.space.tol()))
    }

    /// Same relation expressed in coordinates of an orthonormal basis `Q`
    /// of an invariant subspace: `(Q* M, Q* N)` on the space with Gram `Q* J Q`.
    pub fn compress(&self, q: &CMatrix, sub_space: &PontryaginSpace) -> Result<LinearRelation> {
        LinearRelation::new(sub_space, q.adjoint() * &self.dom, q.adjoint() * &self.ran)
    }
}

/// `{(k₁ [+] k₂, h₁ [+] h₂)}` in `K₁ [+] K₂`.
pub fn relation_direct_sum(r1: &LinearRelation, r2: &LinearRelation) -> LinearRelation {
    let space = direct_sum(&r1.space, &r2.space);
    LinearRelation {
        space,
        dom: block_diag(&r1.dom, &r2.dom),
        ran: block_diag(&r1.ran, &r2.ran),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, real_matrix, zeros};

    fn swap2() -> PontryaginSpace {
        PontryaginSpace::new(real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0])).unwrap()
    }

    #[test]
    fn zero_operator_graph() {
        let sp = PontryaginSpace::euclidean(1);
        let r = LinearRelation::from_operator(&zeros(1, 1), &sp).unwrap();
        assert_eq!(r.dim(), 1);
        assert_eq!(r.kernel().dim(), 1);
        assert_eq!(r.multivalued_part().dim(), 0);
    }

    #[test]
    fn full_multivalued_and_full_kernel_are_selfadjoint() {
        let sp = swap2();
        let mv = LinearRelation::new(&sp, zeros(2, 2), identity(2)).unwrap();
        assert!(mv.adjoint().same_as(&mv));
        let ker = LinearRelation::new(&sp, identity(2), zeros(2, 2)).unwrap();
        assert!(ker.adjoint().same_as(&ker));
        assert!(!mv.same_as(&ker));
    }

    #[test]
    fn hilbert_adjoint_is_conjugate_transpose() {
        let sp = PontryaginSpace::euclidean(2);
        let a = CMatrix::from_fn(2, 2, |i, j| c64(1.0 + i as f64, 2.0 * j as f64 - 1.0));
        let r = LinearRelation::from_operator(&a, &sp).unwrap();
        let want = LinearRelation::from_operator(&a.adjoint(), &sp).unwrap();
        assert!(r.adjoint().same_as(&want));
    }

    #[test]
    fn selfadjoint_relation_checks() {
        let a = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let r = LinearRelation::from_operator(&a, &swap2()).unwrap();
        assert!(r.is_selfadjoint());
        let r = LinearRelation::from_operator(&a, &PontryaginSpace::euclidean(2)).unwrap();
        assert!(!r.is_selfadjoint());
    }

    #[test]
    fn multivalued_part_examples() {
        let sp = PontryaginSpace::euclidean(2);
        let r = LinearRelation::new(&sp, zeros(2, 1), real_matrix(2, 1, &[1.0, 0.0])).unwrap();
        let mv = r.multivalued_part();
        assert_eq!(mv.dim(), 1);
        assert!(mv.contains(&real_matrix(2, 1, &[1.0, 0.0])));
        assert!(!r.is_operator());
    }

    #[test]
    fn resolvent_of_operator_graph() {
        let sp = PontryaginSpace::from_signs(&[true, false]);
        let a = real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let r = LinearRelation::from_operator(&a, &sp).unwrap();
        let res = r.resolvent(c64(0.0, 0.0)).unwrap();
        assert!((res - &a).norm() < 1e-14);
        assert!(matches!(
            r.resolvent(c64(1.0, 0.0)),
            Err(Error::NotInResolventSet { .. })
        ));
    }

    #[test]
    fn direct_sum_with_empty_relation() {
        let sp = PontryaginSpace::from_signs(&[true, false]);
        let a = real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let r = LinearRelation::from_operator(&a, &sp).unwrap();
        let empty = LinearRelation::from_operator(&zeros(0, 0), &PontryaginSpace::zero()).unwrap();
        let s = relation_direct_sum(&r, &empty);
        assert!(s.same_as(&r));
    }

    #[test]
    fn direct_sum_of_multivalued_parts() {
        let sp = PontryaginSpace::euclidean(1);
        let mv = LinearRelation::new(&sp, zeros(1, 1), identity(1)).unwrap();
        let s = relation_direct_sum(&mv, &mv);
        assert_eq!(s.multivalued_part().dim(), 2);
    }

    #[test]
    fn redundant_generators_dropped() {
        let sp = PontryaginSpace::euclidean(2);
        let m = real_matrix(2, 3, &[1.0, 2.0, 0.0, 0.0, 0.0, 1.0]);
        let n = real_matrix(2, 3, &[0.0, 0.0, 1.0, 1.0, 2.0, 0.0]);
        let r = LinearRelation::new(&sp, m, n).unwrap();
        assert_eq!(r.dim(), 2);
    }
}
