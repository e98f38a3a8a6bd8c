//! Left-invariant Riemannian geometry of a metric Lie algebra.
//!
//! Curvature follows `R(X,Y)Z = nabla_[X,Y] Z - [nabla_X, nabla_Y] Z` and
//! `Ric(X,Y) = tr(Z -> R(X,Z)Y)`. With this convention the round sphere has
//! positive Ricci curvature and real hyperbolic space has `Ric = -(n-1) g`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::liealg::LieAlgebra;
use crate::linalg;
use crate::tensor::Tensor4;
use crate::tol;

/// A Lie algebra with a left-invariant inner product `g_ij = g(e_i, e_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricLieAlgebra {
    algebra: LieAlgebra,
    metric: DMatrix<f64>,
    metric_inv: DMatrix<f64>,
    /// Columns form a g-orthonormal basis, obtained from the Cholesky factor
    /// `g = L L^T` as `Q = L^{-T}` (Gram-Schmidt in natural basis order).
    frame: DMatrix<f64>,
    frame_inv: DMatrix<f64>,
}

impl MetricLieAlgebra {
    pub fn new(algebra: LieAlgebra, metric: DMatrix<f64>) -> Result<Self> {
        let n = algebra.dim();
        if metric.nrows() != n || metric.ncols() != n {
            return Err(GeomError::Shape(format!(
                "metric is {}x{}, algebra has dimension {n}",
                metric.nrows(),
                metric.ncols()
            )));
        }
        if metric.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::NonFinite("metric entry".into()));
        }
        let scale = linalg::max_abs(&metric);
        let asym = linalg::max_abs(&(&metric - metric.transpose()));
        if asym > tol::ALG_REL * scale {
            return Err(GeomError::Metric(format!("metric is not symmetric (defect {asym:.3e})")));
        }
        let metric = linalg::sym_part(&metric);
        let chol = metric
            .clone()
            .cholesky()
            .ok_or_else(|| GeomError::Metric("metric is not positive definite".into()))?;
        let l = chol.l();
        let l_inv = l
            .clone()
            .try_inverse()
            .ok_or_else(|| GeomError::Metric("metric is numerically singular".into()))?;
        let frame = l_inv.transpose();
        let frame_inv = l.transpose();
        let metric_inv = chol.inverse();
        Ok(MetricLieAlgebra {
            algebra,
            metric,
            metric_inv,
            frame,
            frame_inv,
        })
    }

    /// Identity metric on the given algebra.
    pub fn standard(algebra: LieAlgebra) -> Self {
        let n = algebra.dim();
        Self::new(algebra, DMatrix::identity(n, n)).expect("identity metric is valid")
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn metric_inv(&self) -> &DMatrix<f64> {
        &self.metric_inv
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Columns are the g-orthonormal frame in original coordinates.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn frame_inv(&self) -> &DMatrix<f64> {
        &self.frame_inv
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.metric * y)[(0, 0)]
    }

    /// Vector dual to a covector: `g(raise(theta), x) = theta(x)`.
    pub fn raise(&self, covector: &DVector<f64>) -> DVector<f64> {
        &self.metric_inv * covector
    }

    pub fn lower(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.metric * v
    }

    /// g-adjoint of an endomorphism given by its matrix.
    pub fn adjoint(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.metric_inv * m.transpose() * &self.metric
    }

    /// Matrix of a bilinear form in the orthonormal frame.
    pub fn form_to_frame(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.frame.transpose() * b * &self.frame
    }

    pub fn form_from_frame(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        self.frame_inv.transpose() * b * &self.frame_inv
    }

    /// Frobenius norm of a bilinear form measured in the orthonormal frame.
    pub fn form_norm(&self, b: &DMatrix<f64>) -> f64 {
        self.form_to_frame(b).norm()
    }

    /// g-trace of a bilinear form.
    pub fn form_trace(&self, b: &DMatrix<f64>) -> f64 {
        (&self.metric_inv * b).trace()
    }

    /// Norm of a (0,4) tensor measured in the orthonormal frame.
    pub fn tensor_norm(&self, t: &Tensor4) -> f64 {
        let q = &self.frame;
        t.transform([q, q, q, q]).norm()
    }

    /// The same metric Lie algebra written in the orthonormal frame.
    pub fn orthonormalized(&self) -> MetricLieAlgebra {
        let alg = self
            .algebra
            .change_basis(&self.frame)
            .expect("frame is invertible");
        MetricLieAlgebra::standard(alg)
    }

    /// Rewrites the metric Lie algebra in the basis `f_a = sum_i p[(i,a)] e_i`.
    pub fn change_basis(&self, p: &DMatrix<f64>) -> Result<MetricLieAlgebra> {
        let alg = self.algebra.change_basis(p)?;
        let g = p.transpose() * &self.metric * p;
        MetricLieAlgebra::new(alg, linalg::sym_part(&g))
    }

    /// Constant rescaling `g -> factor * g`.
    pub fn rescaled(&self, factor: f64) -> Result<MetricLieAlgebra> {
        MetricLieAlgebra::new(self.algebra.clone(), &self.metric * factor)
    }

    /// Largest absolute input coefficient (structure constants and metric).
    pub fn scale(&self) -> f64 {
        self.algebra.max_abs().max(linalg::max_abs(&self.metric))
    }

    /// `tau_num` for this input.
    pub fn tau_num(&self) -> f64 {
        tol::num_tol(self.scale())
    }

    /// `ad_x` for every basis vector.
    pub(crate) fn ad_all(&self) -> Vec<DMatrix<f64>> {
        (0..self.dim()).map(|i| self.algebra.ad_basis(i)).collect()
    }
}

/// Coefficients of a left-invariant connection: `nabla_{e_i} e_j = sum_k gamma[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConnectionTable {
    dim: usize,
    gamma: Vec<f64>,
}

impl ConnectionTable {
    pub fn zeros(dim: usize) -> Self {
        ConnectionTable {
            dim,
            gamma: vec![0.0; dim.pow(3)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.gamma[(i * n + j) * n + k]
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.dim;
        self.gamma[(i * n + j) * n + k] += v;
    }

    /// `nabla_{e_i} e_j` as a coefficient vector.
    pub fn covariant(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_fn(self.dim, |k, _| self.get(i, j, k))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.gamma
    }

    /// `nabla_x y` for arbitrary coefficient vectors.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let w = x[i] * y[j];
                if w != 0.0 {
                    for k in 0..n {
                        out[k] += w * self.get(i, j, k);
                    }
                }
            }
        }
        out
    }
}

/// Curvature endomorphisms, Ricci form and scalar curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureData {
    /// `R(e_i, e_j) e_k = sum_l riem[i,j,k,l] e_l`.
    pub riem: Tensor4,
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

/// Levi-Civita connection from the Koszul formula
/// `nabla_x y = 1/2 ([x,y] - ad*_y x - ad*_x y)`.
pub fn levi_civita(m: &MetricLieAlgebra) -> ConnectionTable {
    let n = m.dim();
    let alg = m.algebra();
    let ad_star: Vec<DMatrix<f64>> = m.ad_all().iter().map(|a| m.adjoint(a)).collect();
    let mut table = ConnectionTable::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let v = alg.c(i, j, k) - ad_star[j][(k, i)] - ad_star[i][(k, j)];
                table.add_at(i, j, k, 0.5 * v);
            }
        }
    }
    table
}

/// Curvature of any left-invariant connection on `m`.
pub fn curvature(m: &MetricLieAlgebra, conn: &ConnectionTable) -> Result<Tensor4> {
    let n = m.dim();
    if conn.dim() != n {
        return Err(GeomError::Shape(format!(
            "connection of dimension {} on algebra of dimension {n}",
            conn.dim()
        )));
    }
    let alg = m.algebra();
    let mut r = Tensor4::zeros(n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for p in 0..n {
                    let mut v = 0.0;
                    for q in 0..n {
                        v += alg.c(i, j, q) * conn.get(q, k, p);
                        v -= conn.get(j, k, q) * conn.get(i, q, p);
                        v += conn.get(i, k, q) * conn.get(j, q, p);
                    }
                    r.set(i, j, k, p, v);
                }
            }
        }
    }
    Ok(r)
}

/// `Ric(e_i, e_j) = tr(Z -> R(e_i, Z) e_j)`.
pub fn ricci_from_curvature(riem: &Tensor4) -> DMatrix<f64> {
    let n = riem.dim();
    DMatrix::from_fn(n, n, |i, j| (0..n).map(|q| riem.get(i, q, j, q)).sum())
}

/// Ricci form from `P - B/2 - (ad_z + ad_z^*)/2`, evaluated in the orthonormal
/// frame and mapped back to the original basis. Independent of any connection.
pub fn ricci_besse(m: &MetricLieAlgebra) -> DMatrix<f64> {
    let on = m.orthonormalized();
    let a = on.algebra();
    let n = on.dim();
    let mut p = DMatrix::zeros(n, n);
    let mut killing = DMatrix::zeros(n, n);
    for x in 0..n {
        for y in 0..n {
            let mut pv = 0.0;
            let mut kv = 0.0;
            for i in 0..n {
                for k in 0..n {
                    pv += -0.5 * a.c(x, k, i) * a.c(y, k, i) + 0.25 * a.c(i, k, x) * a.c(i, k, y);
                    kv += a.c(x, k, i) * a.c(y, i, k);
                }
            }
            p[(x, y)] = pv;
            killing[(x, y)] = kv;
        }
    }
    let z = a.ad_traces();
    let ad_z = a.ad_unchecked(&z);
    // bilinear form of ad_z + ad_z^*: (x, y) -> <[z,x], y> + <x, [z,y]>
    let sym = &ad_z + ad_z.transpose();
    let ric = p - killing * 0.5 - sym * 0.5;
    m.form_from_frame(&ric)
}

/// Levi-Civita curvature, Ricci and scalar curvature. The Ricci form is taken
/// from the curvature trace and cross-checked against [`ricci_besse`].
pub fn ricci(m: &MetricLieAlgebra) -> Result<CurvatureData> {
    let lc = levi_civita(m);
    let riem = curvature(m, &lc)?;
    let ric = ricci_from_curvature(&riem);
    let besse = ricci_besse(m);
    let gap = m.form_norm(&(&ric - &besse));
    let tol = consistency_tol(m);
    if gap > tol {
        return Err(GeomError::consistency("Ricci (trace vs Besse)", gap, tol));
    }
    let scalar = m.form_trace(&ric);
    Ok(CurvatureData {
        riem,
        ricci: ric,
        scalar,
    })
}

/// Tolerance for internal cross-checks of quantities quadratic in the input.
pub(crate) fn consistency_tol(m: &MetricLieAlgebra) -> f64 {
    let s = 1.0 + m.algebra().max_abs() * m.frame().norm();
    tol::num_tol(m.scale()) * s * s
}

/// Frobenius norm, in the orthonormal frame, of `Ric - (scal/n) g`.
pub fn einstein_defect(m: &MetricLieAlgebra) -> Result<f64> {
    let n = m.dim();
    if n < 3 {
        return Err(GeomError::Dimension {
            found: n,
            required: 3,
        });
    }
    let cd = ricci(m)?;
    let trace_free = &cd.ricci - m.metric() * (cd.scalar / n as f64);
    Ok(m.form_norm(&trace_free))
}

/// `delta^g theta = tr ad_T` for a covector `theta` with g-dual `T`.
pub fn codifferential_oneform(m: &MetricLieAlgebra, theta: &DVector<f64>) -> Result<f64> {
    if theta.len() != m.dim() {
        return Err(GeomError::Shape(format!(
            "covector of length {} for dimension {}",
            theta.len(),
            m.dim()
        )));
    }
    let t = m.raise(theta);
    Ok(t.dot(&m.algebra().ad_traces()))
}

/// `(nabla_{e_i} beta)(e_j, e_k)` for a bilinear form `beta` and connection `conn`.
pub fn covariant_derivative_form(conn: &ConnectionTable, beta: &DMatrix<f64>, i: usize) -> DMatrix<f64> {
    let n = conn.dim();
    DMatrix::from_fn(n, n, |j, k| {
        let mut v = 0.0;
        for q in 0..n {
            v -= conn.get(i, j, q) * beta[(q, k)];
            v -= conn.get(i, k, q) * beta[(j, q)];
        }
        v
    })
}

/// Codifferential of a symmetric 2-form: `(delta beta)(Y) = -sum g^{ij} (nabla_{e_i} beta)(e_j, Y)`.
pub fn codifferential_form(m: &MetricLieAlgebra, conn: &ConnectionTable, beta: &DMatrix<f64>) -> DVector<f64> {
    let n = m.dim();
    let ginv = m.metric_inv();
    let derivs: Vec<DMatrix<f64>> = (0..n).map(|i| covariant_derivative_form(conn, beta, i)).collect();
    DVector::from_fn(n, |y, _| {
        let mut v = 0.0;
        for i in 0..n {
            for j in 0..n {
                v -= ginv[(i, j)] * derivs[i][(j, y)];
            }
        }
        v
    })
}

/// Largest `|Gamma^k_ij - Gamma^k_ji - c^k_ij|`.
pub fn torsion_residual(m: &MetricLieAlgebra, conn: &ConnectionTable) -> f64 {
    let n = m.dim();
    let alg = m.algebra();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let t = conn.get(i, j, k) - conn.get(j, i, k) - alg.c(i, j, k);
                worst = worst.max(t.abs());
            }
        }
    }
    worst
}

/// `(nabla g)(e_i; e_j, e_k)` as `out[i]` (an n x n matrix in `j, k`).
pub fn nabla_metric(m: &MetricLieAlgebra, conn: &ConnectionTable) -> Vec<DMatrix<f64>> {
    (0..m.dim())
        .map(|i| covariant_derivative_form(conn, m.metric(), i))
        .collect()
}

/// Largest coefficient of `nabla g` (zero for a metric connection).
pub fn metric_compatibility_residual(m: &MetricLieAlgebra, conn: &ConnectionTable) -> f64 {
    nabla_metric(m, conn)
        .iter()
        .fold(0.0_f64, |acc, d| acc.max(linalg::max_abs(d)))
}

/// Largest coefficient of `R(x,y)z + R(y,z)x + R(z,x)y`.
pub fn first_bianchi_residual(riem: &Tensor4) -> f64 {
    let n = riem.dim();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let s = riem.get(i, j, k, l) + riem.get(j, k, i, l) + riem.get(k, i, j, l);
                    worst = worst.max(s.abs());
                }
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hyperbolic(n: usize, k: f64) -> MetricLieAlgebra {
        let brackets: Vec<_> = (1..n)
            .map(|j| {
                let mut v = vec![0.0; n];
                v[j] = k;
                (0, j, v)
            })
            .collect();
        MetricLieAlgebra::standard(LieAlgebra::from_brackets(n, &brackets).unwrap())
    }

    fn sol() -> MetricLieAlgebra {
        MetricLieAlgebra::standard(
            LieAlgebra::from_brackets(3, &[(2, 0, vec![1.0, 0.0, 0.0]), (2, 1, vec![0.0, -1.0, 0.0])])
                .unwrap(),
        )
    }

    fn heisenberg() -> MetricLieAlgebra {
        MetricLieAlgebra::standard(LieAlgebra::from_brackets(3, &[(0, 1, vec![0.0, 0.0, 1.0])]).unwrap())
    }

    #[test]
    fn metric_errors() {
        let alg = LieAlgebra::abelian(2);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(MetricLieAlgebra::new(alg.clone(), bad), Err(GeomError::Metric(_))));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(matches!(MetricLieAlgebra::new(alg.clone(), asym), Err(GeomError::Metric(_))));
        assert!(matches!(
            MetricLieAlgebra::new(alg, DMatrix::identity(3, 3)),
            Err(GeomError::Shape(_))
        ));
    }

    #[test]
    fn frame_is_orthonormal() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 3.0]);
        let m = MetricLieAlgebra::new(LieAlgebra::abelian(3), g).unwrap();
        let q = m.frame();
        assert!((q.transpose() * m.metric() * q - DMatrix::identity(3, 3)).norm() < 1e-14);
        // natural-order Gram-Schmidt: Q is upper triangular
        assert_eq!(q[(1, 0)], 0.0);
        assert_eq!(q[(2, 0)], 0.0);
        assert_eq!(q[(2, 1)], 0.0);
    }

    #[test]
    fn abelian_connection_vanishes() {
        let g = DMatrix::from_row_slice(3, 3, &[2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 3.0]);
        let m = MetricLieAlgebra::new(LieAlgebra::abelian(3), g).unwrap();
        let lc = levi_civita(&m);
        assert!(lc.as_slice().iter().all(|x| *x == 0.0));
        let cd = ricci(&m).unwrap();
        assert_eq!(cd.riem.max_abs(), 0.0);
        assert_eq!(cd.scalar, 0.0);
        assert_eq!(einstein_defect(&m).unwrap(), 0.0);
    }

    #[test]
    fn sol_levi_civita() {
        // basis (x, y, z) = (0, 1, 2)
        let lc = levi_civita(&sol());
        let e = |i| linalg::basis_vector(3, i);
        assert_eq!(lc.covariant(0, 2), -e(0));
        assert_eq!(lc.covariant(0, 0), e(2));
        assert_eq!(lc.covariant(1, 1), -e(2));
        assert_eq!(lc.covariant(2, 0), DVector::zeros(3));
    }

    #[test]
    fn heisenberg_levi_civita() {
        let lc = levi_civita(&heisenberg());
        assert_eq!(lc.covariant(0, 1), linalg::basis_vector(3, 2) * 0.5);
    }

    #[test]
    fn hyperbolic_sectional_curvature() {
        let m = hyperbolic(3, 1.0);
        let r = curvature(&m, &levi_civita(&m)).unwrap().lower_last(m.metric());
        // g(R(u,v)u, v) with u = e1, v = e2
        assert_abs_diff_eq!(r.get(1, 2, 1, 2), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn sol_curvature_b_x() {
        let m = sol();
        let r = curvature(&m, &levi_civita(&m)).unwrap().lower_last(m.metric());
        // g(R(b,x)b, x) with b = z
        assert_abs_diff_eq!(r.get(2, 0, 2, 0), -1.0, epsilon = 1e-14);
    }

    #[test]
    fn ricci_examples() {
        let cd = ricci(&hyperbolic(3, 1.0)).unwrap();
        assert!((&cd.ricci + DMatrix::identity(3, 3) * 2.0).norm() < 1e-13);
        assert_abs_diff_eq!(cd.scalar, -6.0, epsilon = 1e-13);

        let cd = ricci(&sol()).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, 0.0, -2.0]));
        assert!((&cd.ricci - expected).norm() < 1e-13);
        assert_abs_diff_eq!(cd.scalar, -2.0, epsilon = 1e-13);

        let cd = ricci(&heisenberg()).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![-0.5, -0.5, 0.5]));
        assert!((&cd.ricci - expected).norm() < 1e-13);
        assert_abs_diff_eq!(cd.scalar, -0.5, epsilon = 1e-13);
    }

    #[test]
    fn einstein_defects() {
        assert_abs_diff_eq!(einstein_defect(&hyperbolic(4, 1.5)).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            einstein_defect(&sol()).unwrap(),
            2.0 * 6f64.sqrt() / 3.0,
            epsilon = 1e-12
        );
        let two = MetricLieAlgebra::standard(LieAlgebra::abelian(2));
        assert!(matches!(einstein_defect(&two), Err(GeomError::Dimension { .. })));
    }

    #[test]
    fn codifferentials() {
        let theta = DVector::from_vec(vec![0.3, -1.0, 2.0]);
        assert_eq!(codifferential_oneform(&sol(), &theta).unwrap(), 0.0);
        assert_eq!(codifferential_oneform(&heisenberg(), &theta).unwrap(), 0.0);
        let b = linalg::basis_vector(3, 0);
        assert_abs_diff_eq!(codifferential_oneform(&hyperbolic(3, 1.0), &b).unwrap(), 2.0);

        // R x_Id R^2 with g_nu, theta = z^*
        let nu = 2.5;
        let alg =
            LieAlgebra::from_brackets(3, &[(2, 0, vec![1.0, 0.0, 0.0]), (2, 1, vec![0.0, 1.0, 0.0])]).unwrap();
        let g = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, nu]));
        let m = MetricLieAlgebra::new(alg, g).unwrap();
        let zstar = linalg::basis_vector(3, 2);
        // T = z / nu, tr ad_T = 2 / nu; as the covector z^* pairs with z, tr ad_z = 2
        assert_abs_diff_eq!(codifferential_oneform(&m, &zstar).unwrap(), 2.0 / nu, epsilon = 1e-14);
    }

    #[test]
    fn contracted_bianchi_on_heisenberg() {
        let m = heisenberg();
        let lc = levi_civita(&m);
        let cd = ricci(&m).unwrap();
        assert!(codifferential_form(&m, &lc, &cd.ricci).norm() < 1e-14);
    }
}
