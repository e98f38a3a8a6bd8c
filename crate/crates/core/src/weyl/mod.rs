//! Left-invariant Weyl structures.
//!
//! A Weyl structure is encoded by a metric `g` and a Lee form `theta` with
//! `nabla g = -2 theta (x) g`. Its connection is
//! `nabla_x y = nabla^g_x y + theta(x) y + theta(y) x - g(x, y) T`
//! where `T` is the g-dual of `theta`.

mod kn;
mod solve;

pub use kn::{conformal_flatness_check, kulkarni_nomizu, ConformalFlatness};
pub use solve::{we_solve, SolveOptions, SolveResult, WeRoot};

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::linalg;
use crate::riemann::{self, ConnectionTable, MetricLieAlgebra};

/// A covector together with its g-dual vector.
#[derive(Debug, Clone, PartialEq)]
pub struct LeeForm {
    theta: DVector<f64>,
    dual: DVector<f64>,
    norm_sq: f64,
}

impl LeeForm {
    pub fn new(m: &MetricLieAlgebra, theta: DVector<f64>) -> Result<Self> {
        if theta.len() != m.dim() {
            return Err(GeomError::Shape(format!(
                "Lee form of length {} for dimension {}",
                theta.len(),
                m.dim()
            )));
        }
        if theta.iter().any(|x| !x.is_finite()) {
            return Err(GeomError::NonFinite("Lee form".into()));
        }
        let dual = m.raise(&theta);
        let norm_sq = theta.dot(&dual);
        Ok(LeeForm { theta, dual, norm_sq })
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    /// The vector `T` with `g(T, x) = theta(x)`.
    pub fn dual(&self) -> &DVector<f64> {
        &self.dual
    }

    pub fn norm_sq(&self) -> f64 {
        self.norm_sq
    }

    pub fn is_zero(&self) -> bool {
        self.theta.iter().all(|x| *x == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylStructure {
    pub base: MetricLieAlgebra,
    pub lee: LeeForm,
    pub table: ConnectionTable,
    /// Levi-Civita table of `base`, kept for the formula paths.
    pub levi_civita: ConnectionTable,
}

fn require_dim3(m: &MetricLieAlgebra) -> Result<()> {
    if m.dim() < 3 {
        return Err(GeomError::Dimension {
            found: m.dim(),
            required: 3,
        });
    }
    Ok(())
}

pub fn weyl_connection(m: &MetricLieAlgebra, theta: &DVector<f64>) -> Result<WeylStructure> {
    require_dim3(m)?;
    let lee = LeeForm::new(m, theta.clone())?;
    let lc = riemann::levi_civita(m);
    let n = m.dim();
    let g = m.metric();
    let t = lee.dual();
    let mut table = lc.clone();
    for i in 0..n {
        for j in 0..n {
            table.add_at(i, j, j, theta[i]);
            table.add_at(i, j, i, theta[j]);
            for k in 0..n {
                table.add_at(i, j, k, -g[(i, j)] * t[k]);
            }
        }
    }
    Ok(WeylStructure {
        base: m.clone(),
        lee,
        table,
        levi_civita: lc,
    })
}

/// `F(x, y) = -theta([x, y])` with closedness flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Faraday {
    pub form: DMatrix<f64>,
    pub closed: bool,
    /// `theta` vanishes on the derived algebra.
    pub exact_in_algebra: bool,
}

pub fn faraday(m: &MetricLieAlgebra, theta: &DVector<f64>) -> Result<Faraday> {
    let n = m.dim();
    if theta.len() != n {
        return Err(GeomError::Shape(format!("Lee form of length {} for dimension {n}", theta.len())));
    }
    let alg = m.algebra();
    let form = DMatrix::from_fn(n, n, |i, j| -theta.dot(&alg.bracket_basis(i, j)));
    let scale = (1.0 + alg.max_abs()) * (1.0 + theta.amax());
    let tol = m.tau_num() * scale;
    let closed = linalg::max_abs(&form) <= tol;
    let derived = alg.derived_algebra();
    let exact_in_algebra = (theta.transpose() * &derived).amax() <= tol;
    Ok(Faraday {
        form,
        closed,
        exact_in_algebra,
    })
}

/// `(x, y) -> g(nabla^g_x T, y)`.
///
/// Its symmetric part equals minus the symmetric part of `ad_T`; this is
/// checked and a consistency error is returned otherwise.
pub fn nabla_theta(m: &MetricLieAlgebra, lc: &ConnectionTable, theta: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = m.dim();
    let t = m.raise(theta);
    let g = m.metric();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let v = (0..n).fold(DVector::zeros(n), |acc: DVector<f64>, j| acc + lc.covariant(i, j) * t[j]);
        let row = v.transpose() * g;
        out.set_row(i, &row);
    }
    let ad_sym = ad_sym_form(m, &t);
    let gap = m.form_norm(&(linalg::sym_part(&out) + &ad_sym));
    let tol = riemann::consistency_tol(m) * (1.0 + t.amax());
    if gap > tol {
        return Err(GeomError::consistency("symmetric part of nabla theta", gap, tol));
    }
    Ok(out)
}

/// Bilinear form `(x, y) -> (g(ad_T x, y) + g(x, ad_T y)) / 2`.
pub fn ad_sym_form(m: &MetricLieAlgebra, t: &DVector<f64>) -> DMatrix<f64> {
    let ad = m.algebra().ad_unchecked(t);
    let gad = m.metric() * ad;
    linalg::sym_part(&gad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeylRicci {
    pub ricci: DMatrix<f64>,
    pub scalar: f64,
}

/// Ricci form of the Weyl connection as the trace of its curvature.
pub fn weyl_ricci_direct(w: &WeylStructure) -> Result<DMatrix<f64>> {
    let r = riemann::curvature(&w.base, &w.table)?;
    Ok(riemann::ricci_from_curvature(&r))
}

/// Ricci form of the Weyl connection from the Riemannian data:
/// `Ric^g - (n-2)(nabla theta - theta (x) theta) + (delta theta - (n-2)|theta|^2) g - F`.
///
/// The last term only affects the skew part. Since `R(X,Y)` acts on `g` by
/// `2 F(X,Y) g`, `tr R(X,Y) = -n F(X,Y)` and hence `Ric - Ric^T = -n F`.
pub fn weyl_ricci_formula(w: &WeylStructure) -> Result<DMatrix<f64>> {
    Ok(weyl_ricci_symmetric_formula(w)? - faraday(&w.base, w.lee.theta())?.form)
}

/// The same expression without the `-F` term. Its symmetric part is the
/// symmetric part of the Weyl Ricci form; its skew part is `-(n-2) F / 2`.
pub fn weyl_ricci_symmetric_formula(w: &WeylStructure) -> Result<DMatrix<f64>> {
    let m = &w.base;
    let n = m.dim() as f64;
    let theta = w.lee.theta();
    let ric = riemann::ricci(m)?.ricci;
    let nt = nabla_theta(m, &w.levi_civita, theta)?;
    let tt = theta * theta.transpose();
    let delta = riemann::codifferential_oneform(m, theta)?;
    Ok(ric - (nt - tt) * (n - 2.0) + m.metric() * (delta - (n - 2.0) * w.lee.norm_sq()))
}

/// Weyl Ricci form and scalar curvature, computed both ways and cross-checked.
pub fn weyl_ricci(w: &WeylStructure) -> Result<WeylRicci> {
    let direct = weyl_ricci_direct(w)?;
    let formula = weyl_ricci_formula(w)?;
    let m = &w.base;
    let gap = m.form_norm(&(&direct - &formula));
    let s = 1.0 + w.lee.norm_sq().sqrt();
    let tol = riemann::consistency_tol(m) * s * s;
    if gap > tol {
        return Err(GeomError::consistency("Weyl Ricci (trace vs formula)", gap, tol));
    }
    let scalar = m.form_trace(&direct);
    Ok(WeylRicci { ricci: direct, scalar })
}

/// Deviation of `(g, theta)` from the Weyl-Einstein equation written in terms
/// of the Riemannian Ricci form.
#[derive(Debug, Clone, PartialEq)]
pub struct WeResidual {
    pub e: DMatrix<f64>,
    /// Frobenius norm in the orthonormal frame.
    pub norm: f64,
    /// g-trace of `e`; vanishes identically.
    pub trace: f64,
}

/// `E = Ric^g - [(scal + (n-2)(tr ad_T + |theta|^2)) g / n - (n-2)(ad_T^sym + theta (x) theta)]`.
pub fn we_residual(m: &MetricLieAlgebra, theta: &DVector<f64>) -> Result<WeResidual> {
    require_dim3(m)?;
    let lee = LeeForm::new(m, theta.clone())?;
    let n = m.dim() as f64;
    let cd = riemann::ricci(m)?;
    let t = lee.dual();
    let tr = riemann::codifferential_oneform(m, theta)?;
    let rhs = m.metric() * ((cd.scalar + (n - 2.0) * (tr + lee.norm_sq())) / n)
        - (ad_sym_form(m, t) + theta * theta.transpose()) * (n - 2.0);
    let e = cd.ricci - rhs;
    let e = linalg::sym_part(&e);
    let norm = m.form_norm(&e);
    let trace = m.form_trace(&e);
    Ok(WeResidual { e, norm, trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg::LieAlgebra;
    use approx::assert_abs_diff_eq;

    fn hyperbolic() -> MetricLieAlgebra {
        MetricLieAlgebra::standard(
            LieAlgebra::from_brackets(3, &[(0, 1, vec![0.0, 1.0, 0.0]), (0, 2, vec![0.0, 0.0, 1.0])]).unwrap(),
        )
    }

    fn heisenberg() -> MetricLieAlgebra {
        MetricLieAlgebra::standard(LieAlgebra::from_brackets(3, &[(0, 1, vec![0.0, 0.0, 1.0])]).unwrap())
    }

    fn sol() -> MetricLieAlgebra {
        MetricLieAlgebra::standard(
            LieAlgebra::from_brackets(3, &[(2, 0, vec![1.0, 0.0, 0.0]), (2, 1, vec![0.0, -1.0, 0.0])])
                .unwrap(),
        )
    }

    fn e(i: usize) -> DVector<f64> {
        linalg::basis_vector(3, i)
    }

    #[test]
    fn zero_lee_form_gives_levi_civita() {
        let m = sol();
        let w = weyl_connection(&m, &DVector::zeros(3)).unwrap();
        assert_eq!(w.table, riemann::levi_civita(&m));
        let wr = weyl_ricci(&w).unwrap();
        let cd = riemann::ricci(&m).unwrap();
        assert!((wr.ricci - cd.ricci).norm() < 1e-14);
    }

    #[test]
    fn weyl_table_examples() {
        let ab = MetricLieAlgebra::standard(LieAlgebra::abelian(3));
        let w = weyl_connection(&ab, &e(0)).unwrap();
        assert_eq!(w.table.covariant(0, 0), e(0));

        let w = weyl_connection(&hyperbolic(), &e(0)).unwrap();
        assert_eq!(w.table.covariant(0, 0), e(0));
    }

    #[test]
    fn faraday_examples() {
        let f = faraday(&heisenberg(), &e(2)).unwrap();
        assert_eq!(f.form[(0, 1)], -1.0);
        assert!(!f.closed && !f.exact_in_algebra);
        let f = faraday(&heisenberg(), &e(0)).unwrap();
        assert!(f.closed && f.exact_in_algebra);
        let f = faraday(&sol(), &e(2)).unwrap();
        assert!(f.closed && f.exact_in_algebra);
    }

    #[test]
    fn weyl_ricci_examples() {
        let w = weyl_connection(&hyperbolic(), &e(0)).unwrap();
        let wr = weyl_ricci(&w).unwrap();
        assert!(wr.ricci.norm() < 1e-13);
        assert_abs_diff_eq!(wr.scalar, 0.0, epsilon = 1e-13);

        // F(e1, e2) = -1: the trace gives -n F, the F-free formula -(n-2) F
        let w = weyl_connection(&heisenberg(), &e(2)).unwrap();
        let wr = weyl_ricci(&w).unwrap();
        assert_abs_diff_eq!(wr.ricci[(0, 1)] - wr.ricci[(1, 0)], 3.0, epsilon = 1e-13);
        let partial = weyl_ricci_symmetric_formula(&w).unwrap();
        assert_abs_diff_eq!(partial[(0, 1)] - partial[(1, 0)], 1.0, epsilon = 1e-13);
        assert!((linalg::sym_part(&partial) - linalg::sym_part(&wr.ricci)).norm() < 1e-13);
    }

    #[test]
    fn trace_of_weyl_curvature_is_minus_n_faraday() {
        let alg = LieAlgebra::from_brackets(
            4,
            &[
                (3, 0, vec![1.0, 0.5, 0.0, 0.0]),
                (3, 1, vec![0.0, -0.3, 0.2, 0.0]),
                (3, 2, vec![0.7, 0.0, 2.0, 0.0]),
            ],
        )
        .unwrap();
        let g = DMatrix::from_row_slice(4, 4, &[2.0, 0.1, 0.0, 0.3, 0.1, 1.0, 0.0, 0.0, 0.0, 0.0, 1.5, 0.2, 0.3, 0.0, 0.2, 1.0]);
        let m = MetricLieAlgebra::new(alg, g).unwrap();
        let theta = DVector::from_vec(vec![0.3, -0.8, 0.5, 1.1]);
        let w = weyl_connection(&m, &theta).unwrap();
        let f = faraday(&m, &theta).unwrap();
        assert!(!f.closed);
        let r = riemann::curvature(&m, &w.table).unwrap();
        for x in 0..4 {
            for y in 0..4 {
                let tr: f64 = (0..4).map(|z| r.get(x, y, z, z)).sum();
                assert_abs_diff_eq!(tr, -4.0 * f.form[(x, y)], epsilon = 1e-12);
            }
        }
        let wr = weyl_ricci(&w).unwrap();
        assert!((&wr.ricci - wr.ricci.transpose() + &f.form * 4.0).norm() < 1e-12);
    }

    #[test]
    fn residual_examples() {
        let ab = MetricLieAlgebra::standard(LieAlgebra::abelian(3));
        assert_eq!(we_residual(&ab, &DVector::zeros(3)).unwrap().norm, 0.0);
        assert!(we_residual(&hyperbolic(), &e(0)).unwrap().norm < 1e-13);

        let r = we_residual(&sol(), &e(2)).unwrap();
        let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0 / 3.0, -2.0 / 3.0, -2.0 / 3.0]));
        assert!((&r.e - expected).norm() < 1e-13);
        assert_abs_diff_eq!(r.norm, 2.0 * 6f64.sqrt() / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r.trace, 0.0, epsilon = 1e-13);

        let two = MetricLieAlgebra::standard(LieAlgebra::abelian(2));
        assert!(matches!(
            we_residual(&two, &DVector::zeros(2)),
            Err(GeomError::Dimension { .. })
        ));
    }
}
