//! Multistart Levenberg-Marquardt search for Weyl-Einstein Lee forms.
//!
//! Everything is done in the g-orthonormal frame, where the residual reads
//! `E(t) = Ric - c(t) I + (n-2)(sum_a t_a S_a + t t^T)` with
//! `c(t) = (scal + (n-2)(tr . t + |t|^2)) / n`, `S_a` the symmetric part of
//! `ad_{f_a}` and `tr_a = tr ad_{f_a}`. `E` is quadratic in `t`, so the Jacobian
//! is affine and assembled exactly.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use super::require_dim3;
use crate::error::Result;
use crate::linalg;
use crate::riemann::{self, MetricLieAlgebra};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub starts: usize,
    pub seed: u64,
    /// A point is a root when `|E| <= tol_root * (1 + |Ric|)`.
    pub tol_root: f64,
    /// Roots closer than this (orthonormal frame) are merged.
    pub tol_dedup: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            starts: 64,
            seed: 0,
            tol_root: tol::ROOT_TOL,
            tol_dedup: tol::DEDUP_TOL,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeRoot {
    /// Lee form in the dual of the input basis.
    pub theta: DVector<f64>,
    /// `|E(theta)|` in the orthonormal frame.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    /// Deduplicated roots, sorted lexicographically by coefficients.
    pub roots: Vec<WeRoot>,
    /// Smallest residual reached by any start.
    pub infimum_residual: f64,
    /// Root acceptance threshold actually used.
    pub threshold: f64,
}

pub(crate) struct Problem {
    n: usize,
    ric: DMatrix<f64>,
    scal: f64,
    tr: DVector<f64>,
    ssym: Vec<DMatrix<f64>>,
}

impl Problem {
    pub(crate) fn new(m: &MetricLieAlgebra) -> Result<Self> {
        let on = m.orthonormalized();
        let n = on.dim();
        let cd = riemann::ricci(&on)?;
        let alg = on.algebra();
        let ssym = (0..n).map(|a| linalg::sym_part(&alg.ad_basis(a))).collect();
        Ok(Problem {
            n,
            ric: cd.ricci,
            scal: cd.scalar,
            tr: alg.ad_traces(),
            ssym,
        })
    }

    fn k(&self) -> f64 {
        self.n as f64 - 2.0
    }

    pub(crate) fn residual_matrix(&self, t: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n as f64;
        let k = self.k();
        let c = (self.scal + k * (self.tr.dot(t) + t.norm_squared())) / n;
        let mut e = self.ric.clone();
        for i in 0..self.n {
            e[(i, i)] -= c;
        }
        for (a, s) in self.ssym.iter().enumerate() {
            if t[a] != 0.0 {
                e += s * (k * t[a]);
            }
        }
        e + (t * t.transpose()) * k
    }

    fn pack(&self, e: &DMatrix<f64>, out: &mut DVector<f64>) {
        let mut idx = 0;
        for i in 0..self.n {
            out[idx] = e[(i, i)];
            idx += 1;
            for j in (i + 1)..self.n {
                out[idx] = std::f64::consts::SQRT_2 * e[(i, j)];
                idx += 1;
            }
        }
    }

    fn packed_len(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    fn residual(&self, t: &DVector<f64>) -> DVector<f64> {
        let mut r = DVector::zeros(self.packed_len());
        self.pack(&self.residual_matrix(t), &mut r);
        r
    }

    fn jacobian(&self, t: &DVector<f64>) -> DMatrix<f64> {
        let n = self.n;
        let k = self.k();
        let mut jac = DMatrix::zeros(self.packed_len(), n);
        let mut col = DVector::zeros(self.packed_len());
        for a in 0..n {
            let dc = k * (self.tr[a] + 2.0 * t[a]) / n as f64;
            let mut d = &self.ssym[a] * k;
            for i in 0..n {
                d[(i, i)] -= dc;
                d[(a, i)] += k * t[i];
                d[(i, a)] += k * t[i];
            }
            self.pack(&d, &mut col);
            jac.set_column(a, &col);
        }
        jac
    }

    /// Damped Gauss-Newton descent from `t0`; returns the final point and `|E|`.
    fn minimize(&self, t0: DVector<f64>, max_iter: usize) -> (DVector<f64>, f64) {
        let n = self.n;
        let mut t = t0;
        let mut r = self.residual(&t);
        let mut cost = r.norm_squared();
        let mut lambda = -1.0;
        for _ in 0..max_iter {
            if cost == 0.0 {
                break;
            }
            let jac = self.jacobian(&t);
            let jtj = jac.tr_mul(&jac);
            let grad = jac.tr_mul(&r);
            if lambda < 0.0 {
                lambda = 1e-3 * jtj.diagonal().amax().max(1e-12);
            }
            let mut accepted = None;
            while lambda < 1e20 {
                let mut a = jtj.clone();
                for i in 0..n {
                    a[(i, i)] += lambda;
                }
                let step = match a.cholesky() {
                    Some(ch) => -ch.solve(&grad),
                    None => {
                        lambda *= 4.0;
                        continue;
                    }
                };
                let cand = &t + &step;
                let r_new = self.residual(&cand);
                let cost_new = r_new.norm_squared();
                if cost_new < cost {
                    lambda = (lambda / 3.0).max(1e-300);
                    accepted = Some((cand, r_new, cost_new, step.norm()));
                    break;
                }
                lambda *= 4.0;
            }
            let Some((cand, r_new, cost_new, step)) = accepted else {
                break;
            };
            let decrease = cost - cost_new;
            let scale = 1.0 + cand.norm();
            t = cand;
            r = r_new;
            cost = cost_new;
            if step <= 1e-15 * scale || decrease <= 1e-15 * cost {
                break;
            }
        }
        (t, cost.sqrt())
    }
}

fn start_points(n: usize, opts: &SolveOptions, radius: f64) -> Vec<DVector<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let radii = [0.5 * radius, radius, 2.0 * radius];
    let mut out = Vec::with_capacity(opts.starts);
    for i in 0..opts.starts {
        if i == 0 {
            out.push(DVector::zeros(n));
            continue;
        }
        let dir = loop {
            let v = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
            let norm: f64 = v.norm();
            if norm > 1e-12 {
                break v / norm;
            }
        };
        out.push(dir * radii[(i - 1) % 3]);
    }
    out
}

fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>, tol: f64) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        if (x - y).abs() > tol {
            return x.total_cmp(y);
        }
    }
    std::cmp::Ordering::Equal
}

/// All Lee forms found by the multistart search, without a completeness guarantee.
pub fn we_solve(m: &MetricLieAlgebra, opts: &SolveOptions) -> Result<SolveResult> {
    require_dim3(m)?;
    let problem = Problem::new(m)?;
    let n = problem.n;
    let threshold = opts.tol_root * (1.0 + problem.ric.norm());
    let radius = (problem.scal.abs() / problem.k()).sqrt() + 1.0;
    let starts = start_points(n, opts, radius);

    let finals: Vec<(DVector<f64>, f64)> = starts
        .into_par_iter()
        .map(|t0| problem.minimize(t0, opts.max_iter))
        .collect();

    let infimum_residual = finals.iter().map(|(_, r)| *r).fold(f64::INFINITY, f64::min);
    let mut candidates: Vec<&(DVector<f64>, f64)> = finals.iter().filter(|(_, r)| *r <= threshold).collect();
    candidates.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut kept: Vec<&(DVector<f64>, f64)> = Vec::new();
    for c in candidates {
        if kept.iter().all(|k| (&k.0 - &c.0).norm() > opts.tol_dedup) {
            kept.push(c);
        }
    }
    let back = m.frame_inv().transpose();
    let mut roots: Vec<WeRoot> = kept
        .into_iter()
        .map(|(t, r)| WeRoot {
            theta: &back * t,
            residual: *r,
        })
        .collect();
    roots.sort_by(|a, b| lex_cmp(&a.theta, &b.theta, opts.tol_dedup));
    Ok(SolveResult {
        roots,
        infimum_residual,
        threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::LieAlgebra;
    use crate::weyl::we_residual;

    fn sol() -> MetricLieAlgebra {
        MetricLieAlgebra::standard(
            LieAlgebra::from_brackets(3, &[(2, 0, vec![1.0, 0.0, 0.0]), (2, 1, vec![0.0, -1.0, 0.0])])
                .unwrap(),
        )
    }

    #[test]
    fn frame_residual_matches_direct_residual() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.0, 0.3, 1.0, -0.2, 0.0, -0.2, 1.5]);
        let alg = LieAlgebra::from_brackets(3, &[(2, 0, vec![1.0, 0.5, 0.0]), (2, 1, vec![0.0, -2.0, 0.0])])
            .unwrap();
        let m = MetricLieAlgebra::new(alg, g).unwrap();
        let p = Problem::new(&m).unwrap();
        let theta = DVector::from_vec(vec![0.4, -1.1, 0.7]);
        let t = m.frame().transpose() * &theta;
        let e_frame = p.residual_matrix(&t);
        let direct = we_residual(&m, &theta).unwrap();
        assert!((m.form_to_frame(&direct.e) - e_frame).norm() < 1e-12);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let alg = LieAlgebra::from_brackets(3, &[(2, 0, vec![1.0, 0.5, 0.0]), (2, 1, vec![0.3, -2.0, 0.0])])
            .unwrap();
        let p = Problem::new(&MetricLieAlgebra::standard(alg)).unwrap();
        let t = DVector::from_vec(vec![0.2, -0.4, 0.9]);
        let jac = p.jacobian(&t);
        let h = 1e-6;
        for a in 0..3 {
            let mut tp = t.clone();
            tp[a] += h;
            let mut tm = t.clone();
            tm[a] -= h;
            let fd = (p.residual(&tp) - p.residual(&tm)) / (2.0 * h);
            assert!((fd - jac.column(a)).norm() < 1e-8);
        }
    }

    #[test]
    fn sol_has_no_roots() {
        let res = we_solve(&sol(), &SolveOptions::default()).unwrap();
        assert!(res.roots.is_empty());
        assert!(res.infimum_residual > 0.1);
    }

    #[test]
    fn deterministic_across_runs() {
        let a = we_solve(&sol(), &SolveOptions::default()).unwrap();
        let b = we_solve(&sol(), &SolveOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
