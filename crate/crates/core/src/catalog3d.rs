//! Three-dimensional solvable metric Lie algebras in the normal forms of Ha and Lee.
//!
//! Basis order is `(x, y, z)`. Bracket families:
//!
//! | family  | brackets                               |
//! |---------|----------------------------------------|
//! | Abelian | none                                   |
//! | Sol     | `[z,x] = x`, `[z,y] = -y`              |
//! | SO2R2   | `[z,x] = -y`, `[z,y] = x`              |
//! | RIdR2   | `[z,x] = x`, `[z,y] = y`               |
//! | Gt      | `[z,x] = y`, `[z,y] = -t x + 2y`       |
//!
//! Metric families, as matrices in `(x, y, z)`:
//!
//! ```text
//! Std   = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
//! Gnu   = [[1, 0, 0], [0, 1, 0], [0, 0, nu]]
//! Gmunu = [[1, 0, 0], [0, mu, 0], [0, 0, nu]]
//! Hmunu = [[1, 1, 0], [1, mu, 0], [0, 0, nu]]
//! Mnu   = [[1, 1/2, 0], [1/2, 1, 0], [0, 0, nu]]
//! ```

use nalgebra::{DMatrix, DVector};

use crate::almostabelian::{aa_decompose, classify_we_aa, AACase};
use crate::error::{GeomError, Result};
use crate::liealg::LieAlgebra;
use crate::linalg;
use crate::riemann::MetricLieAlgebra;
use crate::weyl::{we_solve, SolveOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Abelian,
    Sol,
    SO2R2,
    RIdR2,
    Gt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricFamily {
    Std,
    Gnu,
    Gmunu,
    Hmunu,
    Mnu,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Abelian => "abelian",
            Family::Sol => "sol",
            Family::SO2R2 => "so2r2",
            Family::RIdR2 => "ridr2",
            Family::Gt => "gt",
        }
    }
}

impl MetricFamily {
    pub fn name(&self) -> &'static str {
        match self {
            MetricFamily::Std => "std",
            MetricFamily::Gnu => "g",
            MetricFamily::Gmunu => "gmunu",
            MetricFamily::Hmunu => "h",
            MetricFamily::Mnu => "m",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Family3D {
    pub family: Family,
    /// Only used by [`Family::Gt`].
    pub t: f64,
    pub metric: MetricFamily,
    pub mu: f64,
    pub nu: f64,
}

impl Family3D {
    pub fn new(family: Family, metric: MetricFamily) -> Self {
        Family3D {
            family,
            t: 0.0,
            metric,
            mu: 1.0,
            nu: 1.0,
        }
    }

    pub fn with_t(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    pub fn with_mu(mut self, mu: f64) -> Self {
        self.mu = mu;
        self
    }

    pub fn with_nu(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }

    fn check(&self) -> Result<()> {
        use Family::*;
        use MetricFamily::*;
        let bad = |msg: String| Err(GeomError::Input(msg));
        for (name, v) in [("t", self.t), ("mu", self.mu), ("nu", self.nu)] {
            if !v.is_finite() {
                return Err(GeomError::NonFinite(name.into()));
            }
        }
        if self.nu <= 0.0 {
            return bad(format!("nu must be positive, got {}", self.nu));
        }
        if self.mu <= 0.0 {
            return bad(format!("mu must be positive, got {}", self.mu));
        }
        if self.metric == Hmunu && self.mu <= 1.0 {
            return bad(format!("h metric needs mu > 1 to be positive definite, got {}", self.mu));
        }
        match (self.family, self.metric) {
            (Abelian, Std | Gnu | Gmunu) | (Sol, _) => Ok(()),
            (RIdR2, Std | Gnu) | (SO2R2, Std | Gnu) => Ok(()),
            (SO2R2, Gmunu) if self.mu <= 1.0 => Ok(()),
            (SO2R2, Gmunu) => bad(format!("so2r2 with gmunu needs 0 < mu <= 1, got {}", self.mu)),
            (Gt, Hmunu) if self.t > 1.0 && self.mu <= self.t => Ok(()),
            (Gt, Hmunu) => bad(format!(
                "gt with h needs t > 1 and 1 < mu <= t, got t = {}, mu = {}",
                self.t, self.mu
            )),
            (Gt, Std | Gnu | Gmunu | Mnu) if self.t == 0.0 => Ok(()),
            (f, m) => bad(format!(
                "{} with metric {} (t = {}) is not a catalog normal form",
                f.name(),
                m.name(),
                self.t
            )),
        }
    }

    /// Metric matrix in the basis `(x, y, z)`.
    pub fn metric_matrix(&self) -> DMatrix<f64> {
        let (mu, nu) = (self.mu, self.nu);
        let rows: [f64; 9] = match self.metric {
            MetricFamily::Std => [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0],
            MetricFamily::Gnu => [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, nu],
            MetricFamily::Gmunu => [1.0, 0.0, 0.0, 0.0, mu, 0.0, 0.0, 0.0, nu],
            MetricFamily::Hmunu => [1.0, 1.0, 0.0, 1.0, mu, 0.0, 0.0, 0.0, nu],
            MetricFamily::Mnu => [1.0, 0.5, 0.0, 0.5, 1.0, 0.0, 0.0, 0.0, nu],
        };
        DMatrix::from_row_slice(3, 3, &rows)
    }

    pub fn algebra(&self) -> LieAlgebra {
        let v = |a: f64, b: f64| vec![a, b, 0.0];
        let brackets = match self.family {
            Family::Abelian => vec![],
            Family::Sol => vec![(2, 0, v(1.0, 0.0)), (2, 1, v(0.0, -1.0))],
            Family::SO2R2 => vec![(2, 0, v(0.0, -1.0)), (2, 1, v(1.0, 0.0))],
            Family::RIdR2 => vec![(2, 0, v(1.0, 0.0)), (2, 1, v(0.0, 1.0))],
            Family::Gt => vec![(2, 0, v(0.0, 1.0)), (2, 1, v(-self.t, 2.0))],
        };
        LieAlgebra::from_brackets(3, &brackets).expect("catalog brackets are well formed")
    }

    /// Membership in the list of metric Lie algebras admitting a Weyl-Einstein structure.
    pub fn in_we_table(&self) -> bool {
        let eq = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + b.abs());
        match self.family {
            Family::Abelian | Family::RIdR2 => true,
            Family::SO2R2 => self.metric != MetricFamily::Gmunu || eq(self.mu, 1.0),
            Family::Gt if self.t > 1.0 => eq(self.mu, self.t),
            Family::Gt => self.metric == MetricFamily::Mnu,
            Family::Sol => false,
        }
    }
}

pub fn make_3d(f: &Family3D) -> Result<MetricLieAlgebra> {
    f.check()?;
    MetricLieAlgebra::new(f.algebra(), f.metric_matrix())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BuvCase {
    /// `[b,u] = k u - l v`, `[b,v] = l u + k v`.
    AdbForm { k: f64, l: f64 },
    /// `[b,u] = alpha u`, `[b,v] = 0`.
    DirForm { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuvNormalForm {
    pub case: BuvCase,
    /// Columns `(b, u, v)` in the input basis; orthonormal for the input metric.
    pub basis_change: DMatrix<f64>,
}

impl BuvNormalForm {
    /// Structure constants of the normal form in the basis `(b, u, v)`.
    pub fn algebra(&self) -> LieAlgebra {
        let brackets = match self.case {
            BuvCase::AdbForm { k, l } => vec![(0, 1, vec![0.0, k, -l]), (0, 2, vec![0.0, l, k])],
            BuvCase::DirForm { alpha } => vec![(0, 1, vec![0.0, alpha, 0.0])],
        };
        LieAlgebra::from_brackets(3, &brackets).expect("normal form brackets are well formed")
    }

    /// The normal form with its orthonormal metric.
    pub fn rebuild(&self) -> MetricLieAlgebra {
        MetricLieAlgebra::standard(self.algebra())
    }
}

/// Orthonormal basis `(b, u, v)` in which the brackets take one of the two
/// normal forms, normalised to `k >= 0, l >= 0` or `alpha > 0`.
pub fn buv_normal_form(m: &MetricLieAlgebra) -> Result<BuvNormalForm> {
    if m.dim() != 3 {
        return Err(GeomError::Dimension {
            found: m.dim(),
            required: 3,
        });
    }
    let flags = m.algebra().structure_flags();
    if !flags.solvable {
        return Err(GeomError::Classification("algebra is not solvable".into()));
    }
    let d = aa_decompose(m, None)?;
    let class = classify_we_aa(&d, m);
    let h = &d.h_basis;
    let (case, b, u, v) = match class.case {
        AACase::NoWE => {
            return Err(GeomError::Classification(
                "no Weyl-Einstein structure, so no normal form".into(),
            ))
        }
        AACase::EinsteinFamily => {
            let ad = d.ad_b();
            let (mut k, mut l) = (ad[(0, 0)], ad[(0, 1)]);
            let mut b = d.b.clone();
            let u = h.column(0).into_owned();
            let mut v = h.column(1).into_owned();
            if k < 0.0 {
                b = -b;
                k = -k;
                l = -l;
            }
            if l < 0.0 {
                v = -v;
                l = -l;
            }
            (BuvCase::AdbForm { k, l }, b, u, v)
        }
        AACase::TraceCase => {
            let eig = d.s.clone().symmetric_eigen();
            let (iu, iv) = if eig.eigenvalues[0].abs() >= eig.eigenvalues[1].abs() {
                (0, 1)
            } else {
                (1, 0)
            };
            let mut alpha = eig.eigenvalues[iu];
            let mut b = d.b.clone();
            if alpha < 0.0 {
                alpha = -alpha;
                b = -b;
            }
            let u = h * eig.eigenvectors.column(iu);
            let v = h * eig.eigenvectors.column(iv);
            (BuvCase::DirForm { alpha }, b, u, v)
        }
    };
    let basis_change = DMatrix::from_columns(&[b, u, v]);
    let nf = BuvNormalForm { case, basis_change };

    let actual = m.algebra().change_basis(&nf.basis_change)?;
    let expected = nf.algebra();
    let gap = actual
        .coeffs()
        .iter()
        .zip(expected.coeffs())
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()));
    let tol = 1e-8 * (1.0 + m.algebra().max_abs() * m.frame().amax());
    if gap > tol {
        return Err(GeomError::consistency("normal form brackets", gap, tol));
    }
    Ok(nf)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cl3Verdict {
    pub admits: bool,
    pub lee_forms: Vec<DVector<f64>>,
    pub by_table: bool,
    pub by_solver: bool,
}

/// Decides whether the catalog entry carries a Weyl-Einstein structure, once by
/// table lookup and once numerically; disagreement is a consistency error.
pub fn cl3_admits_we(f: &Family3D) -> Result<Cl3Verdict> {
    cl3_admits_we_with(f, &SolveOptions::default())
}

pub fn cl3_admits_we_with(f: &Family3D, opts: &SolveOptions) -> Result<Cl3Verdict> {
    let m = make_3d(f)?;
    let by_table = f.in_we_table();
    let sol = we_solve(&m, opts)?;
    let by_solver = !sol.roots.is_empty();
    let classified = classify_we_aa(&aa_decompose(&m, None)?, &m);
    let by_classifier = classified.case != AACase::NoWE;
    if by_table != by_solver || by_table != by_classifier {
        return Err(GeomError::consistency(
            format!("cl3 verdict (table {by_table}, solver {by_solver}, classifier {by_classifier})"),
            1.0,
            0.0,
        ));
    }
    Ok(Cl3Verdict {
        admits: by_table,
        lee_forms: sol.roots.into_iter().map(|r| r.theta).collect(),
        by_table,
        by_solver,
    })
}

/// Ricci eigenvalues (with respect to g) and scalar curvature; isometry invariants.
pub fn ricci_spectrum(m: &MetricLieAlgebra) -> Result<(Vec<f64>, f64)> {
    let cd = crate::riemann::ricci(m)?;
    Ok((linalg::sorted_sym_eigenvalues(&m.form_to_frame(&cd.ricci)), cd.scalar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn make_examples() {
        let m = make_3d(&Family3D::new(Family::RIdR2, MetricFamily::Gnu)).unwrap();
        assert_eq!(m.metric(), &DMatrix::identity(3, 3));
        assert_eq!(m.algebra().bracket_basis(2, 0), linalg::basis_vector(3, 0));
        assert_eq!(m.algebra().bracket_basis(2, 1), linalg::basis_vector(3, 1));

        let m = make_3d(&Family3D::new(Family::Gt, MetricFamily::Hmunu).with_t(2.0).with_mu(2.0)).unwrap();
        assert_eq!(m.metric()[(0, 1)], 1.0);
        assert_eq!(m.metric()[(1, 1)], 2.0);

        let m = make_3d(&Family3D::new(Family::Abelian, MetricFamily::Std)).unwrap();
        assert!(m.algebra().is_abelian_exactly());
    }

    #[test]
    fn out_of_range_is_rejected() {
        let cases = [
            Family3D::new(Family::RIdR2, MetricFamily::Gnu).with_nu(0.0),
            Family3D::new(Family::SO2R2, MetricFamily::Gmunu).with_mu(1.5),
            Family3D::new(Family::Gt, MetricFamily::Hmunu).with_t(2.0).with_mu(3.0),
            Family3D::new(Family::Gt, MetricFamily::Hmunu).with_t(2.0).with_mu(0.5),
            Family3D::new(Family::Gt, MetricFamily::Mnu).with_t(2.0),
            Family3D::new(Family::RIdR2, MetricFamily::Mnu),
        ];
        for f in cases {
            assert!(matches!(make_3d(&f), Err(GeomError::Input(_))), "{f:?}");
        }
    }

    #[test]
    fn normal_form_examples() {
        let nf = buv_normal_form(&make_3d(&Family3D::new(Family::RIdR2, MetricFamily::Gnu)).unwrap()).unwrap();
        assert_eq!(nf.case, BuvCase::AdbForm { k: 1.0, l: 0.0 });

        let f = Family3D::new(Family::Gt, MetricFamily::Hmunu).with_t(2.0).with_mu(2.0);
        let nf = buv_normal_form(&make_3d(&f).unwrap()).unwrap();
        let BuvCase::AdbForm { k, l } = nf.case else { panic!("{:?}", nf.case) };
        assert_abs_diff_eq!(k, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(l, 1.0, epsilon = 1e-12);

        let f = Family3D::new(Family::Gt, MetricFamily::Mnu);
        let nf = buv_normal_form(&make_3d(&f).unwrap()).unwrap();
        let BuvCase::DirForm { alpha } = nf.case else { panic!("{:?}", nf.case) };
        assert_abs_diff_eq!(alpha, 2.0, epsilon = 1e-12);

        let sol = make_3d(&Family3D::new(Family::Sol, MetricFamily::Std)).unwrap();
        assert!(matches!(buv_normal_form(&sol), Err(GeomError::Classification(_))));
    }

    #[test]
    fn verdict_examples() {
        let v = cl3_admits_we(&Family3D::new(Family::SO2R2, MetricFamily::Gmunu).with_nu(2.0)).unwrap();
        assert!(v.admits);
        assert_eq!(v.lee_forms.len(), 1);
        assert!(v.lee_forms[0].norm() < 1e-8);

        let v = cl3_admits_we(&Family3D::new(Family::SO2R2, MetricFamily::Gmunu).with_mu(0.5)).unwrap();
        assert!(!v.admits);

        let f = Family3D::new(Family::Gt, MetricFamily::Hmunu).with_t(2.0).with_mu(2.0);
        let v = cl3_admits_we(&f).unwrap();
        assert!(v.admits && v.by_table && v.by_solver);
        // S = k Id with b = z (nu = 1, k = 1): theta in {0, z^*}
        assert_eq!(v.lee_forms.len(), 2);
        assert!(v.lee_forms[0].norm() < 1e-7);
        assert!((&v.lee_forms[1] - linalg::basis_vector(3, 2)).norm() < 1e-7);
    }
}
