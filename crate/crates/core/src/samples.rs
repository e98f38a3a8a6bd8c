//! Named example algebras and random generators for testing.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::almostabelian::build_semidirect;
use crate::catalog3d::{make_3d, Family, Family3D, MetricFamily};
use crate::liealg::LieAlgebra;
use crate::riemann::MetricLieAlgebra;

/// `[e1, e2] = e3`.
pub fn heisenberg() -> LieAlgebra {
    LieAlgebra::from_brackets(3, &[(0, 1, vec![0.0, 0.0, 1.0])]).expect("valid")
}

/// `[e1, e2] = e3`, `[e1, e3] = e4`.
pub fn filiform4() -> LieAlgebra {
    LieAlgebra::from_brackets(4, &[(0, 1, vec![0.0, 0.0, 1.0, 0.0]), (0, 2, vec![0.0, 0.0, 0.0, 1.0])])
        .expect("valid")
}

/// Free 2-step nilpotent algebra on `e1, e2, e3`: `[e1,e2] = e4`, `[e1,e3] = e5`, `[e2,e3] = e6`.
pub fn free_two_step3() -> LieAlgebra {
    let e = |k: usize| {
        let mut v = vec![0.0; 6];
        v[k] = 1.0;
        v
    };
    LieAlgebra::from_brackets(6, &[(0, 1, e(3)), (0, 2, e(4)), (1, 2, e(5))]).expect("valid")
}

/// Real hyperbolic space: `[b, u] = k u` for every `u` in `span(e2..en)`, `b = e1`.
pub fn hyperbolic(n: usize, k: f64) -> MetricLieAlgebra {
    let m = n - 1;
    build_semidirect(&DMatrix::zeros(m, m), &(DMatrix::identity(m, m) * k), &DMatrix::identity(m, m))
        .expect("valid")
}

/// Sol with the identity metric in the basis `(x, y, z)`.
pub fn sol() -> MetricLieAlgebra {
    make_3d(&Family3D::new(Family::Sol, MetricFamily::Std)).expect("valid")
}

pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    gaussian_matrix(rng, n, n).qr().q()
}

/// Random symmetric positive definite matrix with eigenvalues in roughly `[0.3, 4]`.
pub fn random_spd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let q = random_orthogonal(rng, n);
    let d = DVector::from_fn(n, |_, _| rng.random_range(0.3..4.0));
    let m = &q * DMatrix::from_diagonal(&d) * q.transpose();
    (&m + m.transpose()) * 0.5
}

/// Well-conditioned random invertible matrix.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let q1 = random_orthogonal(rng, n);
    let q2 = random_orthogonal(rng, n);
    let d = DVector::from_fn(n, |_, _| rng.random_range(0.5..2.0));
    q1 * DMatrix::from_diagonal(&d) * q2
}

pub fn random_skew<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let m = gaussian_matrix(rng, n, n);
    (&m - m.transpose()) * 0.5
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let m = gaussian_matrix(rng, n, n);
    (&m + m.transpose()) * 0.5
}

fn direct_sum(a: &LieAlgebra, b: &LieAlgebra) -> LieAlgebra {
    let (na, nb) = (a.dim(), b.dim());
    let n = na + nb;
    let mut brackets = Vec::new();
    for (alg, off) in [(a, 0), (b, na)] {
        for i in 0..alg.dim() {
            for j in (i + 1)..alg.dim() {
                let br = alg.bracket_basis(i, j);
                if br.iter().any(|x| *x != 0.0) {
                    let mut v = vec![0.0; n];
                    for k in 0..alg.dim() {
                        v[off + k] = br[k];
                    }
                    brackets.push((off + i, off + j, v));
                }
            }
        }
    }
    LieAlgebra::from_brackets(n, &brackets).expect("direct sum of valid algebras")
}

fn random_catalog_algebra<R: Rng + ?Sized>(rng: &mut R) -> LieAlgebra {
    let f = match rng.random_range(0..5) {
        0 => Family3D::new(Family::Sol, MetricFamily::Std),
        1 => Family3D::new(Family::SO2R2, MetricFamily::Std),
        2 => Family3D::new(Family::RIdR2, MetricFamily::Std),
        3 => Family3D::new(Family::Gt, MetricFamily::Std),
        _ => Family3D::new(Family::Gt, MetricFamily::Std).with_t(rng.random_range(1.1..5.0)),
    };
    f.algebra()
}

/// Random valid Lie algebra of dimension `n >= 3`: almost abelian with a
/// random derivation, a catalog family plus an abelian or catalog summand,
/// random 2-step nilpotent, or `so(3)` plus an abelian summand.
pub fn random_lie_algebra<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LieAlgebra {
    assert!(n >= 3);
    match rng.random_range(0..4) {
        0 => {
            let d = gaussian_matrix(rng, n - 1, n - 1);
            let brackets: Vec<_> = (0..n - 1)
                .map(|j| {
                    let mut v = vec![0.0; n];
                    for i in 0..n - 1 {
                        v[i + 1] = d[(i, j)];
                    }
                    (0, j + 1, v)
                })
                .collect();
            LieAlgebra::from_brackets(n, &brackets).expect("valid")
        }
        1 => {
            let c = random_catalog_algebra(rng);
            if n == 3 {
                c
            } else if n == 6 && rng.random_bool(0.5) {
                direct_sum(&c, &random_catalog_algebra(rng))
            } else {
                direct_sum(&c, &LieAlgebra::abelian(n - 3))
            }
        }
        2 => {
            let p = n.div_ceil(2);
            let mut brackets = Vec::new();
            for i in 0..p {
                for j in (i + 1)..p {
                    let mut v = vec![0.0; n];
                    for slot in v.iter_mut().skip(p) {
                        *slot = StandardNormal.sample(rng);
                    }
                    brackets.push((i, j, v));
                }
            }
            LieAlgebra::from_brackets(n, &brackets).expect("valid")
        }
        _ => {
            let so3 = LieAlgebra::from_brackets(
                3,
                &[(0, 1, vec![0.0, 0.0, 1.0]), (1, 2, vec![1.0, 0.0, 0.0]), (2, 0, vec![0.0, 1.0, 0.0])],
            )
            .expect("valid");
            if n == 3 {
                so3
            } else {
                direct_sum(&so3, &LieAlgebra::abelian(n - 3))
            }
        }
    }
}

/// Random metric Lie algebra: a random algebra written in a random basis with a random metric.
pub fn random_metric_lie_algebra<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MetricLieAlgebra {
    let alg = random_lie_algebra(rng, n);
    let p = random_invertible(rng, n);
    let alg = alg.change_basis(&p).expect("invertible");
    MetricLieAlgebra::new(alg, random_spd(rng, n)).expect("spd")
}

/// Which Weyl-Einstein case a random almost abelian sample is built to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AaKind {
    Einstein,
    Trace,
    Generic,
}

/// `(A, S)` on an `m`-dimensional `h` of the requested kind.
pub fn random_a_s<R: Rng + ?Sized>(rng: &mut R, m: usize, kind: AaKind) -> (DMatrix<f64>, DMatrix<f64>) {
    match kind {
        AaKind::Einstein => {
            let k = rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let k = if rng.random_bool(0.1) { 0.0 } else { k };
            (random_skew(rng, m), DMatrix::identity(m, m) * k)
        }
        AaKind::Trace => {
            // eigenvalues of S0 repeated in pairs so block rotations commute with S
            let pairs = if m == 2 { 0 } else { m / 2 };
            let mut diag = Vec::with_capacity(m);
            let mut a = DMatrix::zeros(m, m);
            for p in 0..pairs {
                let v: f64 = StandardNormal.sample(rng);
                diag.push(v);
                diag.push(v);
                let w: f64 = StandardNormal.sample(rng);
                a[(2 * p, 2 * p + 1)] = w;
                a[(2 * p + 1, 2 * p)] = -w;
            }
            while diag.len() < m {
                diag.push(StandardNormal.sample(rng));
            }
            let mean = diag.iter().sum::<f64>() / m as f64;
            let s0: Vec<f64> = diag.iter().map(|x| x - mean).collect();
            let amp = s0.iter().map(|x| x * x).sum::<f64>().sqrt();
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let n = (m + 1) as f64;
            let shift = sign * amp * ((n - 2.0) / (n - 1.0)).sqrt();
            let s = DMatrix::from_diagonal(&DVector::from_iterator(m, s0.iter().map(|x| x + shift)));
            let q = random_orthogonal(rng, m);
            (&q * a * q.transpose(), &q * s * q.transpose())
        }
        AaKind::Generic => (random_skew(rng, m), random_symmetric(rng, m)),
    }
}

/// Random almost abelian metric Lie algebra of dimension `n`, in a random
/// basis, with `(A, S)` of the requested kind.
pub fn random_almost_abelian<R: Rng + ?Sized>(rng: &mut R, n: usize, kind: AaKind) -> MetricLieAlgebra {
    let (a, s) = random_a_s(rng, n - 1, kind);
    let m = build_semidirect(&a, &s, &DMatrix::identity(n - 1, n - 1)).expect("valid");
    m.change_basis(&random_invertible(rng, n)).expect("invertible")
}

/// Almost abelian algebra whose `ad_b` is nilpotent (strictly triangular up to conjugation).
pub fn random_nilpotent_ad_b<R: Rng + ?Sized>(rng: &mut R, n: usize) -> MetricLieAlgebra {
    let m = n - 1;
    let mut d = gaussian_matrix(rng, m, m);
    for i in 0..m {
        for j in i..m {
            d[(i, j)] = 0.0;
        }
    }
    let brackets: Vec<_> = (0..m)
        .map(|j| {
            let mut v = vec![0.0; n];
            for i in 0..m {
                v[i + 1] = d[(i, j)];
            }
            (0, j + 1, v)
        })
        .collect();
    let alg = LieAlgebra::from_brackets(n, &brackets).expect("valid");
    MetricLieAlgebra::new(alg, random_spd(rng, n)).expect("spd")
}
