//! Root manifolds and Jordan chains of J-self-adjoint operators, the
//! chain-wise splitting of the state space at an eigenvalue, and the
//! pole-cancellation function of a chain.

use crate::decomposition::{compress_bounded, grid_residual};
use crate::error::{Error, Result};
use crate::inversion::{build_context, InversionContext};
use crate::linalg::{
    self, c64, hermitian_eigen, identity, null_space_abs, pseudo_solve, shifted, spectral_norm,
    zeros, CMatrix, Svd, C64,
};
use crate::nevanlinna::{is_minimal, minimal_subspace, GnFunction, Realization};
use crate::pontryagin::{orthogonal_projection, PontryaginSpace, Subspace};

/// Relative threshold for kernel decisions on `A - α`; eigenvalues closer
/// than this to `α` are treated as `α`.
pub const CLUSTER_TOL: f64 = 1e-7;

/// Orthonormal bases of `ker N ⊂ ker N² ⊂ …` up to the root manifold,
/// each strictly larger than the previous one.
pub fn staircase(shift: &CMatrix, tol: f64) -> Vec<CMatrix> {
    let n = shift.nrows();
    let thr = tol * spectral_norm(shift).max(1.0);
    let mut out = Vec::new();
    let mut cur = zeros(n, 0);
    while cur.ncols() < n {
        let reduced = (identity(n) - &cur * cur.adjoint()) * shift;
        let next = null_space_abs(&reduced, thr);
        if next.ncols() <= cur.ncols() {
            break;
        }
        out.push(next.clone());
        cur = next;
    }
    out
}

fn operator(r: &Realization) -> Result<&CMatrix> {
    r.operator()
        .filter(|_| r.is_bounded())
        .ok_or(Error::RequiresBoundedForm)
}

/// Generalized eigenspace `ker (A - α)^n`; zero if `alpha` is not an eigenvalue.
pub fn root_manifold(r: &Realization, alpha: impl Into<C64>) -> Result<Subspace> {
    let a = operator(r)?;
    let kernels = staircase(&shifted(a, alpha.into()), CLUSTER_TOL);
    Ok(match kernels.last() {
        Some(k) => Subspace::span(r.space(), k),
        None => Subspace::zero(r.space()),
    })
}

/// `x₀, …, x_{l-1}` with `(A - α)x₀ = 0` and `(A - α)x_k = x_{k-1}`.
#[derive(Clone, Debug)]
pub struct JordanChain {
    pub alpha: C64,
    /// Column `k` is `x_k`.
    pub vectors: CMatrix,
}

impl JordanChain {
    pub fn new(alpha: impl Into<C64>, vectors: CMatrix) -> Self {
        JordanChain {
            alpha: alpha.into(),
            vectors,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.ncols() == 0
    }

    pub fn top(&self) -> CMatrix {
        self.vectors.columns(self.len() - 1, 1).into_owned()
    }

    /// Largest chain residual relative to `‖A‖·‖X‖`.
    pub fn residual(&self, a: &CMatrix) -> f64 {
        let shift = shifted(a, self.alpha);
        let scale = spectral_norm(a).max(1.0) * spectral_norm(&self.vectors).max(f64::MIN_POSITIVE);
        let mut worst = (&shift * self.vectors.column(0)).norm() / scale;
        for k in 1..self.len() {
            let d = &shift * self.vectors.column(k) - self.vectors.column(k - 1);
            worst = worst.max(d.norm() / scale);
        }
        worst
    }

    pub fn span(&self, sp: &PontryaginSpace) -> Subspace {
        Subspace::span(sp, &self.vectors)
    }

    /// Gram matrix `[x_j, x_i]` of the chain vectors.
    pub fn gram(&self, sp: &PontryaginSpace) -> CMatrix {
        sp.cross_gram(&self.vectors, &self.vectors)
    }
}

fn chain_from_top(shift: &CMatrix, top: &CMatrix, l: usize) -> CMatrix {
    let n = top.nrows();
    let mut cols = vec![top.clone()];
    for _ in 1..l {
        let next = shift * cols.last().expect("non-empty");
        cols.push(next);
    }
    cols.reverse();
    let mut out = zeros(n, l);
    for (k, c) in cols.iter().enumerate() {
        out.set_column(k, &c.column(0));
    }
    out
}

/// Smallest singular value of the chain Gram relative to `‖X‖²‖J‖`.
fn chain_degeneracy(gram: &CMatrix, vectors: &CMatrix, j_norm: f64) -> f64 {
    let scale = spectral_norm(vectors).powi(2) * j_norm;
    if scale == 0.0 {
        return 0.0;
    }
    Svd::new(gram).smallest() / scale
}

/// Longest non-degenerate chain inside the invariant subspace with
/// orthonormal basis `w`. Candidate tops are eigenvectors of the Hermitian
/// part of `[(A-α)^{l-1}x, y]` on `ker (A-α)^l`; among chains of the
/// longest length the one with the largest `|det Gram|` wins.
fn best_chain(a: &CMatrix, sp: &PontryaginSpace, alpha: C64, w: &CMatrix) -> Option<CMatrix> {
    if w.ncols() == 0 {
        return None;
    }
    let x = w.adjoint() * shifted(a, alpha) * w;
    let g = sp.cross_gram(w, w);
    let j_norm = spectral_norm(&g);
    let kernels = staircase(&x, CLUSTER_TOL);
    for l in (1..=kernels.len()).rev() {
        let b = &kernels[l - 1];
        let mut xp = identity(x.nrows());
        for _ in 1..l {
            xp = &x * xp;
        }
        let h = b.adjoint() * &g * &xp * b;
        let (_, vecs) = hermitian_eigen(&h);
        let mut best: Option<(f64, CMatrix)> = None;
        for c in vecs.column_iter() {
            let top = b * c;
            let top = CMatrix::from_column_slice(top.nrows(), 1, top.as_slice());
            let chain = chain_from_top(&x, &top, l);
            let gram = chain.adjoint() * &g * &chain;
            if chain_degeneracy(&gram, &chain, j_norm) <= 1e-8 {
                continue;
            }
            let det = gram.determinant().norm();
            if best.as_ref().is_none_or(|(d, _)| det > *d) {
                best = Some((det, chain));
            }
        }
        if let Some((_, chain)) = best {
            return Some(w * chain);
        }
    }
    None
}

/// A chain of maximal length at `alpha` whose span is non-degenerate, or
/// `None` if every chain of every length is degenerate.
pub fn maximal_nondegenerate_chain(
    r: &Realization,
    alpha: impl Into<C64>,
) -> Result<Option<JordanChain>> {
    let alpha = alpha.into();
    let a = operator(r)?;
    let root = root_manifold(r, alpha)?;
    if root.dim() == 0 {
        return Err(Error::NotEigenvalue { alpha });
    }
    Ok(best_chain(a, r.space(), alpha, root.basis()).map(|v| JordanChain::new(alpha, v)))
}

fn chain_projection(r: &Realization, chain: &JordanChain) -> Result<CMatrix> {
    let span = chain.span(r.space());
    if !span.is_nondegenerate() {
        return Err(Error::DegenerateSubspace {
            smallest: span.degeneracy(),
        });
    }
    orthogonal_projection(&span)
}

/// `h` such that the chain regenerated from the top `EΓ₀h` (with `E` the
/// projection onto the chain span) ends in the same eigenvector `x₀`.
pub fn chain_generator_in_range(r: &Realization, chain: &JordanChain) -> Result<CMatrix> {
    let a = operator(r)?;
    if chain.is_empty() {
        return Err(Error::NoGenerator);
    }
    let e = chain_projection(r, chain)?;
    let shift = shifted(a, chain.alpha);
    let mut m = &e * r.gamma();
    for _ in 1..chain.len() {
        m = &shift * m;
    }
    let x0 = chain.vectors.columns(0, 1).into_owned();
    if spectral_norm(&m) <= 1e-9 * x0.norm() {
        return Err(Error::NoGenerator);
    }
    let h = pseudo_solve(&m, &x0, 1e-9);
    let resid = (&m * &h - &x0).norm();
    if resid > 1e-6 * x0.norm() {
        return Err(Error::NoGenerator);
    }
    Ok(h)
}

/// `h` with `Γ₀h` equal to the chain top, if the top lies in `range(Γ₀)`.
pub fn top_generator(r: &Realization, chain: &JordanChain) -> Option<CMatrix> {
    let top = chain.top();
    let h = pseudo_solve(r.gamma(), &top, r.tol());
    ((r.gamma() * &h - &top).norm() <= 1e-8 * top.norm()).then_some(h)
}

/// The chain `(A - α)^{l-1-k} EΓ₀h`.
pub fn regenerate_chain(r: &Realization, chain: &JordanChain, h: &CMatrix) -> Result<JordanChain> {
    let a = operator(r)?;
    let e = chain_projection(r, chain)?;
    let top = e * r.gamma() * h;
    let v = chain_from_top(&shifted(a, chain.alpha), &top, chain.len());
    Ok(JordanChain::new(chain.alpha, v))
}

#[derive(Clone, Debug)]
pub enum BlockKind {
    /// Positive eigenvectors at `alpha`.
    Positive,
    Chain(JordanChain),
    /// Everything else; contains no non-degenerate chain at `alpha`.
    Degenerate,
}

#[derive(Clone, Debug)]
pub struct AlphaBlock {
    pub subspace: Subspace,
    pub kappa: usize,
    pub kind: BlockKind,
    /// J-orthogonal projection onto the block.
    pub projection: CMatrix,
    /// `Qᵢ(z) = Γᵢ⁺(Aᵢ - z)⁻¹Γᵢ` on the block.
    pub component: Realization,
}

/// `K = K₀ [+] K₁ [+] … [+] K_r [+] K_{r+1}`: the first block holds the
/// positive eigenvectors, the middle ones one non-degenerate chain each,
/// the last one the rest.
#[derive(Clone, Debug)]
pub struct AlphaDecomposition {
    pub alpha: C64,
    pub blocks: Vec<AlphaBlock>,
}

impl AlphaDecomposition {
    pub fn chains(&self) -> impl Iterator<Item = &JordanChain> {
        self.blocks.iter().filter_map(|b| match &b.kind {
            BlockKind::Chain(c) => Some(c),
            _ => None,
        })
    }

    pub fn chain_count(&self) -> usize {
        self.chains().count()
    }

    pub fn kappa_total(&self) -> usize {
        self.blocks.iter().map(|b| b.kappa).sum()
    }

    /// Largest cross-Gram norm between distinct blocks, relative to `‖J‖`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, bi) in self.blocks.iter().enumerate() {
            let sp = bi.subspace.ambient();
            let scale = spectral_norm(sp.gram()).max(f64::MIN_POSITIVE);
            for bj in &self.blocks[i + 1..] {
                if bi.subspace.dim() == 0 || bj.subspace.dim() == 0 {
                    continue;
                }
                let c = sp.cross_gram(bi.subspace.basis(), bj.subspace.basis());
                worst = worst.max(spectral_norm(&c) / scale);
            }
        }
        worst
    }

    /// Grid residual of `Q - ΣQᵢ`.
    pub fn residual(&self, r: &Realization) -> f64 {
        let parts: Vec<GnFunction> = self
            .blocks
            .iter()
            .map(|b| b.component.clone().into())
            .collect();
        grid_residual(|z| r.evaluate(z), parts.iter())
    }
}

fn block(r: &Realization, basis: &CMatrix, kind: BlockKind) -> Result<AlphaBlock> {
    let subspace = Subspace::span(r.space(), basis);
    let kappa = if subspace.dim() == 0 {
        0
    } else {
        subspace.inertia()?.negative
    };
    let projection = orthogonal_projection(&subspace)?;
    let component = compress_bounded(r, subspace.basis(), &projection)?;
    Ok(AlphaBlock {
        subspace,
        kappa,
        kind,
        projection,
        component,
    })
}

/// Greedy chain-wise splitting of a minimal realization at `alpha`.
pub fn alpha_decomposition(r: &Realization, alpha: impl Into<C64>) -> Result<AlphaDecomposition> {
    let alpha = alpha.into();
    let a = operator(r)?;
    let min_dim = minimal_subspace(r).dim();
    if !is_minimal(r) {
        return Err(Error::NotMinimal {
            minimal_dim: min_dim,
            dim: r.state_dim(),
        });
    }
    let sp = r.space();
    let n = sp.dim();
    let root = root_manifold(r, alpha)?;
    if root.dim() == 0 {
        return Err(Error::NotEigenvalue { alpha });
    }
    let tol = sp.tol();
    let mut w = root.basis().clone();
    let mut chains = Vec::new();
    while let Some(v) = best_chain(a, sp, alpha, &w) {
        let constraint = sp.cross_gram(&w, &v);
        let coeffs = linalg::null_space(&constraint, tol);
        w = linalg::column_space(&(&w * coeffs), tol);
        chains.push(v);
    }
    let mut positive = zeros(n, 0);
    let mut blocks = Vec::new();
    let mut used = zeros(n, 0);
    for v in &chains {
        used = linalg::hstack(&[&used, v]);
        if v.ncols() == 1 && sp.inner(v, v).re > 0.0 {
            positive = linalg::hstack(&[&positive, v]);
        }
    }
    blocks.push(block(r, &positive, BlockKind::Positive)?);
    for v in chains {
        if v.ncols() == 1 && sp.inner(&v, &v).re > 0.0 {
            continue;
        }
        let chain = JordanChain::new(alpha, v.clone());
        blocks.push(block(r, &v, BlockKind::Chain(chain))?);
    }
    let rest = Subspace::span(sp, &used).j_orthogonal_complement();
    blocks.push(block(r, rest.basis(), BlockKind::Degenerate)?);
    Ok(AlphaDecomposition { alpha, blocks })
}

/// `η(z) = Q(z)⁻¹Γ₀⁺(x₀ + (z-α)x₁ + … + (z-α)^{l-1}x_{l-1})`.
#[derive(Clone, Debug)]
pub struct PoleCancellation {
    realization: Realization,
    chain: JordanChain,
    ctx: Option<InversionContext>,
}

impl PoleCancellation {
    pub fn new(r: &Realization, chain: &JordanChain) -> Result<Self> {
        operator(r)?;
        Ok(PoleCancellation {
            realization: r.clone(),
            chain: chain.clone(),
            ctx: build_context(r).ok(),
        })
    }

    pub fn chain(&self) -> &JordanChain {
        &self.chain
    }

    fn chain_poly(&self, z: C64) -> CMatrix {
        let d = z - self.chain.alpha;
        let mut out = zeros(self.chain.vectors.nrows(), 1);
        let mut p = c64(1.0, 0.0);
        for k in 0..self.chain.len() {
            out += self.chain.vectors.column(k) * p;
            p *= d;
        }
        out
    }

    /// `η(z)` together with the map `M(z)` with `η(z) = M(z)x(z)`.
    fn evaluate_parts(&self, z: C64) -> Result<(CMatrix, CMatrix)> {
        let x = self.chain_poly(z);
        if let Some(ctx) = &self.ctx {
            if let Ok(m) = ctx.qhat_gamma_plus(z) {
                return Ok((-(&m * x), m));
            }
        }
        self.evaluate_dense(z)
    }

    fn evaluate_dense(&self, z: C64) -> Result<(CMatrix, CMatrix)> {
        let r = &self.realization;
        let q = r.evaluate(z)?;
        let q_inv = linalg::inverse_checked(&q, r.tol()).ok_or(Error::SingularValue { z })?;
        let m = q_inv * r.gamma_plus();
        Ok((&m * self.chain_poly(z), m))
    }

    /// `η(z)`, through `-Q̂(z)Γ₀⁺` when `Γ₀⁺Γ₀` is invertible (no inverse of
    /// `Q` near its pole), otherwise through a dense inverse of `Q(z)`.
    pub fn evaluate(&self, z: C64) -> Result<CMatrix> {
        self.evaluate_parts(z).map(|(v, _)| v)
    }

    /// `-(z - α)^l h`, the value of `η` when `x_{l-1} = Γ₀h`.
    pub fn predicted(&self, z: C64, h: &CMatrix) -> CMatrix {
        let l = self.chain.len() as i32;
        -(h * (z - self.chain.alpha).powi(l))
    }

    /// Least-squares slope of `log ‖η(α + t)‖` against `log t` for
    /// `t = 10⁻¹, …, 10⁻⁵`. Samples at rounding level are left out. The level
    /// is the larger of `100ε · max ‖M(z)‖‖x(z)‖` and ten times the largest
    /// disagreement between the `Q̂Γ₀⁺` route and the dense route, where both
    /// apply (`M` can itself be a cancellation of O(1) terms, so its norm
    /// alone underestimates the noise). At least two samples must remain.
    pub fn decay_rate(&self) -> Result<f64> {
        let mut samples = Vec::new();
        let mut scale = 0.0f64;
        let mut noise = 0.0f64;
        for k in 1..=5 {
            let t = 10f64.powi(-k);
            let z = self.chain.alpha + c64(t, 0.0);
            let (v, m) = self.evaluate_parts(z)?;
            scale = scale.max(spectral_norm(&m) * self.chain_poly(z).norm());
            if self.ctx.is_some() {
                if let Ok((w, _)) = self.evaluate_dense(z) {
                    noise = noise.max((&v - &w).norm());
                }
            }
            samples.push((t, v.norm()));
        }
        let floor = (100.0 * f64::EPSILON * scale).max(10.0 * noise);
        let (xs, ys): (Vec<f64>, Vec<f64>) = samples
            .into_iter()
            .filter(|&(_, v)| v > floor)
            .map(|(t, v)| (t.ln(), v.ln()))
            .unzip();
        if xs.len() < 2 {
            return Err(Error::NonFinite("decay rate: eta below rounding level"));
        }
        let nx = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / nx;
        let my = ys.iter().sum::<f64>() / nx;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        Ok(sxy / sxx)
    }
}

pub fn pole_cancellation(r: &Realization, chain: &JordanChain) -> Result<PoleCancellation> {
    PoleCancellation::new(r, chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real_matrix;

    #[test]
    fn staircase_of_nilpotent_block() {
        let n = real_matrix(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        let ks = staircase(&n, CLUSTER_TOL);
        let dims: Vec<usize> = ks.iter().map(|k| k.ncols()).collect();
        assert_eq!(dims, vec![1, 2, 3]);
    }

    #[test]
    fn staircase_of_invertible_is_empty() {
        assert!(staircase(&identity(2), CLUSTER_TOL).is_empty());
    }

    #[test]
    fn chain_from_top_runs_downwards() {
        let n = real_matrix(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let top = real_matrix(2, 1, &[0.0, 1.0]);
        let c = chain_from_top(&n, &top, 2);
        assert!((c - identity(2)).norm() < 1e-15);
    }
}
