//! Small hand-checkable realizations used by tests, the CLI and the docs.

use crate::linalg::{block_diag, c64, identity, real_matrix, zeros, CMatrix};
use crate::nevanlinna::{PoleTerm, RationalFunction, Realization};
use crate::pontryagin::PontryaginSpace;

fn swap2() -> CMatrix {
    real_matrix(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// `J = I₂ ⊕ [[0,1],[1,0]]`, `A` with a single 1 at row 3, column 4.
pub fn example1() -> Realization {
    let j = block_diag(&identity(2), &swap2());
    let mut a = zeros(4, 4);
    a[(2, 3)] = c64(1.0, 0.0);
    let gamma0 = real_matrix(4, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0]);
    let sp = PontryaginSpace::new(j).expect("valid metric");
    Realization::bounded(&sp, a, gamma0).expect("valid realization")
}

/// The two summands of [`example1`]: `-I/z` on a Hilbert space and the
/// nilpotent block on `[[0,1],[1,0]]`.
pub fn example1_components() -> (Realization, Realization) {
    let r1 = Realization::bounded(&PontryaginSpace::euclidean(2), zeros(2, 2), identity(2))
        .expect("valid realization");
    let sp2 = PontryaginSpace::new(swap2()).expect("valid metric");
    let a2 = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    let r2 = Realization::bounded(&sp2, a2, swap2()).expect("valid realization");
    (r1, r2)
}

/// `-[[1/z + 1/z², 1/z], [1/z, 1/z]]`.
pub fn example1_closed_form() -> RationalFunction {
    let r0 = real_matrix(2, 2, &[-1.0, -1.0, -1.0, -1.0]);
    let r1 = real_matrix(2, 2, &[-1.0, 0.0, 0.0, 0.0]);
    RationalFunction::new(
        2,
        Vec::new(),
        vec![PoleTerm {
            at: c64(0.0, 0.0),
            coeffs: vec![r0, r1],
        }],
    )
    .expect("consistent shapes")
}

/// `J = A = diag(1, -1)`, `Γ₀ = I`: `Q(z) = diag(1/(1-z), 1/(1+z))`.
pub fn diag_model() -> Realization {
    let sp = PontryaginSpace::from_signs(&[true, false]);
    let a = real_matrix(2, 2, &[1.0, 0.0, 0.0, -1.0]);
    Realization::bounded(&sp, a, identity(2)).expect("valid realization")
}

/// `J = [[0,1],[1,0]]`, `A = [[0,1],[0,0]]`, `Γ₀ = I`.
pub fn jordan_model() -> Realization {
    let sp = PontryaginSpace::new(swap2()).expect("valid metric");
    let a = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
    Realization::bounded(&sp, a, identity(2)).expect("valid realization")
}

/// `J = diag(1,1,-1)`, `A = diag(0,2,3)`, `Γ₀ = [e₁ e₂]`.
pub fn three_dim_model() -> Realization {
    let sp = PontryaginSpace::from_signs(&[true, true, false]);
    let a = real_matrix(3, 3, &[0.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
    let gamma0 = real_matrix(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    Realization::bounded(&sp, a, gamma0).expect("valid realization")
}

/// `J = diag(1,-1)`, `A = diag(2,3)`, `Γ₀ = e₁`.
pub fn rank_one_model() -> Realization {
    let sp = PontryaginSpace::from_signs(&[true, false]);
    let a = real_matrix(2, 2, &[2.0, 0.0, 0.0, 3.0]);
    let gamma0 = real_matrix(2, 1, &[1.0, 0.0]);
    Realization::bounded(&sp, a, gamma0).expect("valid realization")
}

/// `J = [[0,1,0],[1,0,0],[0,0,1]]`, `A = diag(i, -i, 0)`, `Γ₀ = I`.
///
/// `e₁` is a neutral eigenvector at `i` that admits no chain extension.
pub fn neutral_eigenvector_model() -> Realization {
    let j = block_diag(&swap2(), &identity(1));
    let sp = PontryaginSpace::new(j).expect("valid metric");
    let mut a = zeros(3, 3);
    a[(0, 0)] = c64(0.0, 1.0);
    a[(1, 1)] = c64(0.0, -1.0);
    Realization::bounded(&sp, a, identity(3)).expect("valid realization")
}

/// Zero-dimensional state space with `m` coefficient dimensions.
pub fn zero_realization(m: usize) -> Realization {
    Realization::bounded(&PontryaginSpace::zero(), zeros(0, 0), zeros(0, m))
        .expect("valid realization")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nevanlinna::GnFunction;

    #[test]
    fn example1_matches_closed_form() {
        let r = example1();
        let q = example1_closed_form();
        for z in [c64(1.0, 0.0), c64(0.3, 1.2), c64(-2.0, 3.0)] {
            let d = r.evaluate(z).unwrap() - q.evaluate(z).unwrap();
            assert!(d.norm() < 1e-13);
        }
        let at1 = r.evaluate(c64(1.0, 0.0)).unwrap();
        assert!((at1 + real_matrix(2, 2, &[2.0, 1.0, 1.0, 1.0])).norm() < 1e-14);
    }

    #[test]
    fn example1_gamma_plus_as_printed() {
        let want = real_matrix(2, 4, &[1.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 1.0]);
        assert!((example1().gamma_plus() - want).norm() == 0.0);
    }

    #[test]
    fn components_sum_to_example1() {
        let (r1, r2) = example1_components();
        let f = GnFunction::sum(vec![r1.into(), r2.into()]).unwrap();
        let z = c64(0.7, -0.4);
        let d = f.evaluate(z).unwrap() - example1().evaluate(z).unwrap();
        assert!(d.norm() < 1e-13);
    }

    #[test]
    fn diag_model_at_i() {
        let v = diag_model().evaluate(c64(0.0, 1.0)).unwrap();
        assert!((v[(0, 0)] - c64(0.5, 0.5)).norm() < 1e-15);
        assert!((v[(1, 1)] - c64(0.5, -0.5)).norm() < 1e-15);
        assert!(v[(0, 1)].norm() == 0.0);
    }

    #[test]
    fn zero_realization_evaluates_to_zero() {
        let r = zero_realization(2);
        assert_eq!(r.evaluate(c64(0.0, 1.0)).unwrap().shape(), (2, 2));
    }
}
