use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, c64, extend_basis, zeros, CMatrix, CVector, Svd, C64};
use crate::pontryagin::{hermitian_inertia, Subspace};

use super::{Form, GnFunction, Realization};

/// Sampling parameters for the negative-squares estimate.
#[derive(Clone, Debug)]
pub struct SamplerConfig {
    pub points: usize,
    /// `(re_min, re_max, im_min, im_max)` of the sampling rectangle.
    pub rect: (f64, f64, f64, f64),
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            points: 32,
            rect: (-3.0, 3.0, 0.1, 3.0),
            trials: 8,
            seed: 0x9E37_79B9,
            tol: crate::pontryagin::DEFAULT_TOL,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KappaMethod {
    Exact,
    Sampled,
}

#[derive(Clone, Debug)]
pub struct KappaEstimate {
    pub value: usize,
    pub method: KappaMethod,
    pub samples: usize,
    pub witness_points: Vec<C64>,
}

fn gaussian_unit(rng: &mut ChaCha8Rng, m: usize) -> CVector {
    loop {
        let v = CVector::from_fn(m, |_, _| {
            c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let n = v.norm();
        if n > 1e-8 {
            return v / c64(n, 0.0);
        }
    }
}

fn one_trial(f: &GnFunction, cfg: &SamplerConfig, trial: usize) -> (usize, Vec<C64>) {
    let m = f.out_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(trial as u64));
    let (x0, x1, y0, y1) = cfg.rect;
    let mut points = Vec::with_capacity(cfg.points);
    let mut values = Vec::with_capacity(cfg.points);
    let mut attempts = 0;
    while points.len() < cfg.points && attempts < 20 * cfg.points.max(1) {
        attempts += 1;
        let z = c64(rng.random_range(x0..x1), rng.random_range(y0..y1));
        if let Ok(q) = f.evaluate(z) {
            if linalg::is_finite(&q) {
                points.push(z);
                values.push(q);
            }
        }
    }
    let dirs: Vec<CVector> = (0..points.len())
        .map(|_| gaussian_unit(&mut rng, m))
        .collect();
    let k = points.len();
    // entry (i, j) = h_j* N(z_i, z_j) h_i
    let mut mat = zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            let n = (&values[i] - values[j].adjoint()) / (points[i] - points[j].conj());
            mat[(i, j)] = (dirs[j].adjoint() * n * &dirs[i])[(0, 0)];
        }
    }
    let mat = (&mat + mat.adjoint()).scale(0.5);
    // positive diagonal congruence keeps the inertia and evens out row scales
    let d: Vec<f64> = (0..k)
        .map(|i| {
            let r = (0..k).fold(0.0f64, |acc, j| acc.max(mat[(i, j)].norm()));
            if r > 0.0 {
                1.0 / r.sqrt()
            } else {
                1.0
            }
        })
        .collect();
    let scaled = CMatrix::from_fn(k, k, |i, j| mat[(i, j)] * (d[i] * d[j]));
    let neg = hermitian_inertia(&scaled, cfg.tol).map_or(0, |i| i.negative);
    (neg, points)
}

/// Lower estimate of the number of negative squares of the Nevanlinna
/// kernel: the largest negative inertia over independent random samples.
pub fn negative_squares_sampled(f: &GnFunction, cfg: &SamplerConfig) -> KappaEstimate {
    if f.out_dim() == 0 || cfg.points == 0 {
        return KappaEstimate {
            value: 0,
            method: KappaMethod::Sampled,
            samples: 0,
            witness_points: Vec::new(),
        };
    }
    let results: Vec<(usize, Vec<C64>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| one_trial(f, cfg, t))
        .collect();
    let mut best = 0;
    let mut witness = Vec::new();
    let mut samples = 0;
    for (neg, pts) in results {
        samples += pts.len();
        if neg > best || witness.is_empty() {
            if neg > best {
                best = neg;
            }
            witness = pts;
        }
    }
    KappaEstimate {
        value: best,
        method: KappaMethod::Sampled,
        samples,
        witness_points: witness,
    }
}

/// Sample points for spanning `Γ_z` orbits of a general-form realization.
fn orbit_points(count: usize) -> impl Iterator<Item = C64> {
    (0..count).map(|k| {
        let t = k as f64;
        c64(-2.3 + 0.61 * t, 0.35 + 0.17 * t)
    })
}

/// The closed span of the resolvent orbits of `Γ`.
pub fn minimal_subspace(r: &Realization) -> Subspace {
    let n = r.state_dim();
    let tol = r.tol();
    let gamma = r.gamma();
    let basis = match r.form() {
        Form::Bounded => {
            let a = r.operator().expect("bounded form has an operator");
            let mut basis = extend_basis(&zeros(n, 0), gamma, tol);
            let mut fresh = basis.clone();
            while fresh.ncols() > 0 && basis.ncols() < n {
                let before = basis.ncols();
                basis = extend_basis(&basis, &(a * &fresh), tol);
                fresh = basis.columns(before, basis.ncols() - before).into_owned();
            }
            basis
        }
        Form::General { .. } => {
            let mut blocks = Vec::new();
            for z in orbit_points(8 * n + 8) {
                if blocks.len() >= 2 * n + 2 {
                    break;
                }
                if let Ok(g) = r.gamma_at(z) {
                    let s = linalg::spectral_norm(&g);
                    if s > 0.0 && s.is_finite() {
                        blocks.push(g / c64(s, 0.0));
                    }
                }
            }
            let refs: Vec<&CMatrix> = blocks.iter().collect();
            if refs.is_empty() {
                zeros(n, 0)
            } else {
                linalg::column_space(&linalg::hstack(&refs), tol)
            }
        }
    };
    Subspace::span(r.space(), &basis)
}

pub fn is_minimal(r: &Realization) -> bool {
    minimal_subspace(r).dim() == r.state_dim()
}

/// Negative index of the Gram matrix restricted to the minimal subspace.
pub fn exact_negative_index(r: &Realization) -> Result<KappaEstimate> {
    let sub = minimal_subspace(r);
    if sub.dim() > 0 && !sub.is_nondegenerate() {
        return Err(Error::DegenerateMinimalSubspace {
            smallest: sub.degeneracy(),
        });
    }
    let value = if sub.dim() == 0 {
        0
    } else {
        sub.inertia()?.negative
    };
    Ok(KappaEstimate {
        value,
        method: KappaMethod::Exact,
        samples: 0,
        witness_points: Vec::new(),
    })
}

/// Exact index when the minimal subspace is non-degenerate, otherwise the
/// sampled estimate.
pub fn negative_index(r: &Realization, cfg: &SamplerConfig) -> KappaEstimate {
    exact_negative_index(r)
        .unwrap_or_else(|_| negative_squares_sampled(&GnFunction::from(r.clone()), cfg))
}

/// Smallest singular value of the minimal-subspace Gram relative to its
/// largest; zero for a degenerate minimal subspace.
pub fn minimal_gram_condition(r: &Realization) -> f64 {
    let sub = minimal_subspace(r);
    let svd = Svd::new(&sub.gram());
    if svd.largest() == 0.0 {
        return 0.0;
    }
    svd.smallest() / svd.largest()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nevanlinna::RationalFunction;

    #[test]
    fn scalar_witnesses() {
        let cfg = SamplerConfig::default();
        let q: GnFunction = RationalFunction::scalar_pole(-1.0, 0.0).into();
        assert_eq!(negative_squares_sampled(&q, &cfg).value, 0);
        let q: GnFunction = RationalFunction::scalar_pole(1.0, -1.0).into();
        let est = negative_squares_sampled(&q, &cfg);
        assert_eq!(est.value, 1);
        assert_eq!(est.method, KappaMethod::Sampled);
        assert_eq!(est.witness_points.len(), cfg.points);
    }

    #[test]
    fn block_diag_of_witnesses() {
        let cfg = SamplerConfig::default();
        let a: GnFunction = RationalFunction::scalar_pole(-1.0, 0.0).into();
        let b: GnFunction = RationalFunction::scalar_pole(1.0, -1.0).into();
        let f = GnFunction::block_diag(vec![a.clone(), a.clone()]);
        assert_eq!(negative_squares_sampled(&f, &cfg).value, 0);
        let f = GnFunction::block_diag(vec![a, b]);
        assert_eq!(negative_squares_sampled(&f, &cfg).value, 1);
    }

    #[test]
    fn sampling_is_deterministic() {
        let cfg = SamplerConfig::default();
        let q: GnFunction = RationalFunction::scalar_pole(1.0, -1.0).into();
        let a = negative_squares_sampled(&q, &cfg);
        let b = negative_squares_sampled(&q, &cfg);
        assert_eq!(a.witness_points, b.witness_points);
    }
}
