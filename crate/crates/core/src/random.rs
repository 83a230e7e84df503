//! Random instance generators with exact structure by construction.
//!
//! Metrics are drawn as `S* diag(±1) S` with a well-conditioned `S`, and
//! self-adjoint operators as `J⁻¹H` with Hermitian `H`.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{block_diag, c64, identity, inverse_checked, zeros, CMatrix, C64};
use crate::nevanlinna::Realization;
use crate::pontryagin::{PontryaginSpace, Subspace};

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    if n == 0 {
        return zeros(0, 0);
    }
    gaussian_matrix(rng, n, n).qr().q()
}

/// `U diag(s) V` with singular values in `[0.5, 2]`.
pub fn well_conditioned<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let u = random_unitary(rng, n);
    let v = random_unitary(rng, n);
    let s = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            c64(0.5 * 4f64.powf(rng.random::<f64>()), 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    u * s * v
}

/// `diag(±1)` with `neg` negative entries in random positions.
pub fn random_signs<R: Rng + ?Sized>(rng: &mut R, n: usize, neg: usize) -> Vec<bool> {
    let mut signs: Vec<bool> = (0..n).map(|i| i >= neg.min(n)).collect();
    signs.shuffle(rng);
    signs
}

fn sign_matrix(signs: &[bool]) -> CMatrix {
    let n = signs.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i != j {
            c64(0.0, 0.0)
        } else if signs[i] {
            c64(1.0, 0.0)
        } else {
            c64(-1.0, 0.0)
        }
    })
}

/// `S* diag(±1) S` with index `neg`.
pub fn random_space<R: Rng + ?Sized>(rng: &mut R, n: usize, neg: usize) -> PontryaginSpace {
    let s = well_conditioned(rng, n);
    let d = sign_matrix(&random_signs(rng, n, neg));
    PontryaginSpace::new(s.adjoint() * d * s).expect("congruent to a signature matrix")
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let g = gaussian_matrix(rng, n, n);
    (&g + g.adjoint()).scale(0.5 / (n.max(1) as f64).sqrt())
}

/// `J⁻¹H` for a random Hermitian `H`.
pub fn random_selfadjoint<R: Rng + ?Sized>(rng: &mut R, sp: &PontryaginSpace) -> CMatrix {
    sp.gram_inv() * random_hermitian(rng, sp.dim())
}

/// Bounded-form realization on a random space of index `neg`.
pub fn random_realization<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    neg: usize,
) -> Realization {
    let sp = random_space(rng, n, neg);
    let a = random_selfadjoint(rng, &sp);
    let gamma0 = gaussian_matrix(rng, n, m);
    Realization::bounded(&sp, a, gamma0).expect("self-adjoint by construction")
}

/// Same as [`random_realization`] but `Γ₀` repeats a column, so `Γ₀⁺Γ₀`
/// is singular. Requires `m ≥ 2`.
pub fn singular_gamma_realization<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    m: usize,
    neg: usize,
) -> Realization {
    assert!(m >= 2, "need two columns to repeat one");
    let sp = random_space(rng, n, neg);
    let a = random_selfadjoint(rng, &sp);
    let mut gamma0 = gaussian_matrix(rng, n, m);
    let first = gamma0.column(0).into_owned();
    gamma0.set_column(m - 1, &first);
    Realization::bounded(&sp, a, gamma0).expect("self-adjoint by construction")
}

/// A real Jordan block `αI + N` of size `k` with its sip metric `±flip`.
pub fn sip_block(alpha: f64, k: usize, positive: bool) -> (CMatrix, CMatrix) {
    let eps = if positive { 1.0 } else { -1.0 };
    let a = CMatrix::from_fn(k, k, |i, j| {
        if i == j {
            c64(alpha, 0.0)
        } else if j == i + 1 {
            c64(1.0, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    let j = CMatrix::from_fn(k, k, |i, jj| {
        if i + jj + 1 == k {
            c64(eps, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    });
    (a, j)
}

/// A realization with known Jordan structure at a real point.
#[derive(Clone, Debug)]
pub struct PlantedJordan {
    pub realization: Realization,
    pub alpha: f64,
    /// `(length, sign)` of each planted block at `alpha`.
    pub blocks: Vec<(usize, bool)>,
    /// Negative index of the whole space.
    pub kappa: usize,
}

/// Plants Jordan blocks at `alpha` plus a few other eigenvalues (real ones
/// and a non-real pair), then hides the canonical form behind a random
/// congruence. `m` is at least the number of blocks at `alpha`.
pub fn planted_jordan<R: Rng + ?Sized>(rng: &mut R, max_dim: usize) -> PlantedJordan {
    let max_dim = max_dim.max(2);
    let alpha = rng.random_range(-1.0..1.0);
    let mut a_blocks = Vec::new();
    let mut j_blocks = Vec::new();
    let mut blocks = Vec::new();
    let mut used = 0;
    let count = rng.random_range(1..=3usize);
    for _ in 0..count {
        let room = max_dim - used;
        if room == 0 {
            break;
        }
        let k = rng.random_range(1..=room.min(3));
        let positive = rng.random_bool(0.5);
        let (a, j) = sip_block(alpha, k, positive);
        a_blocks.push(a);
        j_blocks.push(j);
        blocks.push((k, positive));
        used += k;
    }
    // other spectrum, kept away from alpha
    while used < max_dim && rng.random_bool(0.6) {
        if used + 2 <= max_dim && rng.random_bool(0.3) {
            let lam = c64(rng.random_range(-2.0..2.0), rng.random_range(0.3..1.5));
            let mut a = zeros(2, 2);
            a[(0, 0)] = lam;
            a[(1, 1)] = lam.conj();
            a_blocks.push(a);
            j_blocks.push(CMatrix::from_fn(2, 2, |i, j| {
                c64((i != j) as u8 as f64, 0.0)
            }));
            used += 2;
        } else {
            let offset = rng.random_range(0.4..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let (a, j) = sip_block(alpha + offset, 1, rng.random_bool(0.5));
            a_blocks.push(a);
            j_blocks.push(j);
            used += 1;
        }
    }
    let mut a_c = zeros(0, 0);
    let mut j_c = zeros(0, 0);
    for (a, j) in a_blocks.iter().zip(&j_blocks) {
        a_c = block_diag(&a_c, a);
        j_c = block_diag(&j_c, j);
    }
    let n = a_c.nrows();
    let t = well_conditioned(rng, n);
    let t_inv = inverse_checked(&t, 1e-12).expect("well conditioned");
    let a = &t_inv * a_c * &t;
    let gram = t.adjoint() * j_c * &t;
    let sp = PontryaginSpace::new(gram).expect("congruent to a sip metric");
    let kappa = sp.neg_index();
    let m = blocks.len() + rng.random_range(0..=1usize);
    let gamma0 = gaussian_matrix(rng, n, m);
    let realization = Realization::bounded(&sp, a, gamma0).expect("self-adjoint by construction");
    PlantedJordan {
        realization,
        alpha,
        blocks,
        kappa,
    }
}

/// A realization with a known invariant non-degenerate subspace.
#[derive(Clone, Debug)]
pub struct InvariantSplit {
    pub realization: Realization,
    pub subspace: Subspace,
    pub kappa1: usize,
    pub kappa2: usize,
}

/// Builds `A = T⁻¹ diag(A₁, A₂) T` on `J = T* diag(J₁, J₂) T`; the
/// subspace is `T⁻¹ (C^{n₁} ⊕ 0)`.
pub fn invariant_split<R: Rng + ?Sized>(
    rng: &mut R,
    n1: usize,
    n2: usize,
    m: usize,
) -> InvariantSplit {
    let neg1 = rng.random_range(0..=n1);
    let neg2 = rng.random_range(0..=n2);
    let s1 = random_signs(rng, n1, neg1);
    let s2 = random_signs(rng, n2, neg2);
    let j1 = sign_matrix(&s1);
    let j2 = sign_matrix(&s2);
    let a1 = &j1 * random_hermitian(rng, n1);
    let a2 = &j2 * random_hermitian(rng, n2);
    let n = n1 + n2;
    let t = well_conditioned(rng, n);
    let t_inv = inverse_checked(&t, 1e-12).expect("well conditioned");
    let a = &t_inv * block_diag(&a1, &a2) * &t;
    let gram = t.adjoint() * block_diag(&j1, &j2) * &t;
    let sp = PontryaginSpace::new(gram).expect("congruent to a signature matrix");
    let embed = block_diag(&identity(n1), &zeros(n2, 0));
    let basis = &t_inv * embed;
    let subspace = Subspace::new(&sp, basis).expect("full column rank");
    let gamma0 = gaussian_matrix(rng, n, m);
    let realization = Realization::bounded(&sp, a, gamma0).expect("self-adjoint by construction");
    InvariantSplit {
        realization,
        subspace,
        kappa1: neg1,
        kappa2: neg2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pontryagin::is_selfadjoint;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_space_has_requested_index() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..7 {
            for neg in 0..=n {
                assert_eq!(random_space(&mut rng, n, neg).neg_index(), neg);
            }
        }
    }

    #[test]
    fn generated_operators_are_selfadjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let p = planted_jordan(&mut rng, 7);
            let r = &p.realization;
            assert!(is_selfadjoint(r.operator().unwrap(), r.space()).unwrap());
            let s = invariant_split(&mut rng, 2, 3, 2);
            let r = &s.realization;
            assert!(is_selfadjoint(r.operator().unwrap(), r.space()).unwrap());
            assert_eq!(r.space().neg_index(), s.kappa1 + s.kappa2);
        }
    }
}
