//! Almost abelian metric Lie algebras `g = R b (+) h` with `h` an abelian ideal.
//!
//! With `b` a unit normal to `h` and an orthonormal basis of `h`, `ad_b|h`
//! splits as `A + S` (skew plus symmetric). Everything below is expressed
//! through `A` and `S`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::liealg::LieAlgebra;
use crate::linalg;
use crate::riemann::{CurvatureData, MetricLieAlgebra};
use crate::tensor::Tensor4;
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct AADecomposition {
    /// Unit normal to `h`, first nonzero coefficient positive.
    pub b: DVector<f64>,
    /// Columns form a g-orthonormal basis of `h`.
    pub h_basis: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub unique_ideal: bool,
}

impl AADecomposition {
    /// Columns `(b, h_1, .., h_{n-1})`: an orthonormal basis adapted to the splitting.
    pub fn basis_change(&self) -> DMatrix<f64> {
        let n = self.b.len();
        let mut p = DMatrix::zeros(n, n);
        p.set_column(0, &self.b);
        p.view_mut((0, 1), (n, n - 1)).copy_from(&self.h_basis);
        p
    }

    /// `ad_b` restricted to `h`, i.e. `A + S`.
    pub fn ad_b(&self) -> DMatrix<f64> {
        &self.a + &self.s
    }
}

/// Covectors whose kernel is a codimension-one abelian ideal (together with 0).
///
/// The kernel of `phi` is an ideal with abelian quotient iff it contains the
/// derived algebra, and it is abelian iff `phi ^ beta^k = 0` for every
/// component 2-form `beta^k(e_i, e_j) = c^k_ij`. Both conditions are linear.
fn admissible_normals(alg: &LieAlgebra) -> DMatrix<f64> {
    let n = alg.dim();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = alg.bracket_basis(i, j);
            if v.iter().any(|x| *x != 0.0) {
                rows.push(v.iter().copied().collect());
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in (i + 1)..n {
                for l in (j + 1)..n {
                    let mut row = vec![0.0; n];
                    row[i] += alg.c(j, l, k);
                    row[j] -= alg.c(i, l, k);
                    row[l] += alg.c(i, j, k);
                    if row.iter().any(|x| *x != 0.0) {
                        rows.push(row);
                    }
                }
            }
        }
    }
    if rows.is_empty() {
        return DMatrix::identity(n, n);
    }
    let sys = DMatrix::from_fn(rows.len(), n, |r, c| rows[r][c]);
    let cutoff = tol::ALG_REL * alg.max_abs() * n as f64;
    linalg::null_space(&sys, cutoff)
}

fn normalize_sign(v: DVector<f64>, tol: f64) -> DVector<f64> {
    match v.iter().find(|x| x.abs() > tol) {
        Some(x) if *x < 0.0 => -v,
        _ => v,
    }
}

/// Finds a codimension-one abelian ideal and the induced `(b, A, S)`.
///
/// `hint`, when given, holds `n - 1` column vectors spanning the ideal.
pub fn aa_decompose(m: &MetricLieAlgebra, hint: Option<&DMatrix<f64>>) -> Result<AADecomposition> {
    let n = m.dim();
    if n < 3 {
        return Err(GeomError::Dimension { found: n, required: 3 });
    }
    let alg = m.algebra();
    let atol = tol::ALG_REL * (1.0 + alg.max_abs());
    let normals = admissible_normals(alg);
    let (phi, unique_ideal) = match hint {
        Some(h) => (phi_from_hint(alg, h, &normals)?, normals.ncols() == 1),
        None => {
            if alg.max_abs() == 0.0 {
                (linalg::basis_vector(n, 0), false)
            } else {
                match normals.ncols() {
                    0 => {
                        return Err(GeomError::NotAlmostAbelian(
                            "no codimension-one abelian ideal".into(),
                        ))
                    }
                    1 => (normals.column(0).into_owned(), true),
                    _ => {
                        let r = linalg::rref(&normals.transpose(), 1e-10);
                        (r.row(r.nrows() - 1).transpose(), false)
                    }
                }
            }
        }
    };

    let big = phi.amax();
    let phi = phi.map(|x| if x.abs() <= 1e-13 * big { 0.0 } else { x });
    let b = normalize_sign(m.raise(&phi), 1e-12 * big);
    let b = &b / m.inner(&b, &b).sqrt();

    let drop = phi.iamax();
    let mut h: Vec<DVector<f64>> = Vec::with_capacity(n - 1);
    for j in (0..n).filter(|j| *j != drop) {
        let mut v = linalg::basis_vector(n, j);
        v -= &b * m.inner(&v, &b);
        for u in &h {
            v -= u * m.inner(&v, u);
        }
        let norm = m.inner(&v, &v).sqrt();
        h.push(v / norm);
    }
    let h_basis = DMatrix::from_columns(&h);

    let ad_b = alg.ad_unchecked(&b);
    let mat = DMatrix::from_fn(n - 1, n - 1, |r, c| m.inner(&h[r], &(&ad_b * &h[c])));

    let ideal_defect = h
        .iter()
        .map(|u| (&ad_b * u - &h_basis * (h_basis.transpose() * m.metric() * (&ad_b * u))).amax())
        .fold(0.0_f64, f64::max);
    let mut abelian_defect = 0.0_f64;
    for i in 0..h.len() {
        for j in (i + 1)..h.len() {
            abelian_defect = abelian_defect.max(alg.bracket(&h[i], &h[j]).amax());
        }
    }
    let scale = 1.0 + alg.max_abs() * m.frame().amax().max(1.0).powi(2);
    if ideal_defect > atol * scale || abelian_defect > atol * scale {
        return Err(GeomError::NotAlmostAbelian(format!(
            "candidate ideal fails (ideal defect {ideal_defect:.3e}, abelian defect {abelian_defect:.3e})"
        )));
    }

    Ok(AADecomposition {
        b,
        h_basis,
        a: linalg::skew_part(&mat),
        s: linalg::sym_part(&mat),
        unique_ideal,
    })
}

fn phi_from_hint(alg: &LieAlgebra, hint: &DMatrix<f64>, normals: &DMatrix<f64>) -> Result<DVector<f64>> {
    let n = alg.dim();
    if hint.nrows() != n || hint.ncols() != n - 1 {
        return Err(GeomError::Hint(format!(
            "expected {} vectors of length {n}, got {} of length {}",
            n - 1,
            hint.ncols(),
            hint.nrows()
        )));
    }
    if hint.iter().any(|x| !x.is_finite()) {
        return Err(GeomError::Hint("non-finite entry".into()));
    }
    let ns = linalg::null_space(&hint.transpose(), 1e-10 * (1.0 + hint.amax()));
    if ns.ncols() != 1 {
        return Err(GeomError::Hint("vectors do not span a hyperplane".into()));
    }
    let phi = ns.column(0).into_owned();
    // phi must lie in the span of the admissible normals
    let residual = if normals.ncols() == 0 {
        phi.norm()
    } else {
        (&phi - normals * (normals.transpose() * &phi)).norm()
    };
    if residual > 1e-8 {
        return Err(GeomError::Hint("span is not an abelian ideal".into()));
    }
    Ok(phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AACase {
    /// `S = k Id`.
    EinsteinFamily,
    /// `S != 0`, `(tr S)^2 = (n-2) tr S^2`, `[A, S] = 0`.
    TraceCase,
    NoWE,
}

impl AACase {
    pub fn name(&self) -> &'static str {
        match self {
            AACase::EinsteinFamily => "EinsteinFamily",
            AACase::TraceCase => "TraceCase",
            AACase::NoWE => "NoWE",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AAClassification {
    pub case: AACase,
    /// `k` in the Einstein family, `mu = tr S / (n-2)` in the trace case, 0 otherwise.
    pub k_or_mu: f64,
    /// Weyl-Einstein Lee forms in the dual of the input basis.
    pub lee_forms: Vec<DVector<f64>>,
}

/// Closed-form list of all left-invariant Weyl-Einstein Lee forms.
pub fn classify_we_aa(d: &AADecomposition, m: &MetricLieAlgebra) -> AAClassification {
    let n = m.dim();
    let s = &d.s;
    let tr = s.trace();
    let tr2 = (s * s).trace();
    let snorm = s.norm();
    let tau = m.tau_num();
    let scale = 1.0 + snorm * snorm;
    let b_flat = m.lower(&d.b);

    let k = tr / (n - 1) as f64;
    let trace_free = s - DMatrix::identity(n - 1, n - 1) * k;
    if trace_free.norm() <= tau * (1.0 + snorm) {
        let lee_forms = if k.abs() <= tau * (1.0 + snorm) {
            vec![DVector::zeros(n)]
        } else {
            let mut v = vec![DVector::zeros(n), &b_flat * k];
            v.sort_by(lex_cmp);
            v
        };
        return AAClassification {
            case: AACase::EinsteinFamily,
            k_or_mu: k,
            lee_forms,
        };
    }

    let comm = &d.a * s - s * &d.a;
    let trace_ok = (tr * tr - (n - 2) as f64 * tr2).abs() <= tau * scale;
    if snorm > tau && trace_ok && comm.norm() <= tau * scale {
        let mu = tr / (n - 2) as f64;
        return AAClassification {
            case: AACase::TraceCase,
            k_or_mu: mu,
            lee_forms: vec![&b_flat * mu],
        };
    }
    AAClassification {
        case: AACase::NoWE,
        k_or_mu: 0.0,
        lee_forms: Vec::new(),
    }
}

fn lex_cmp(a: &DVector<f64>, b: &DVector<f64>) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        if (x - y).abs() > tol::DEDUP_TOL {
            return x.total_cmp(y);
        }
    }
    std::cmp::Ordering::Equal
}

/// `R b |x h` with `ad_b|h = A + S` in the basis `(b, e_1, .., e_{n-1})`, `g(b, b) = 1`,
/// `g(b, h) = 0` and `g|h = g0`.
pub fn build_semidirect(a: &DMatrix<f64>, s: &DMatrix<f64>, g0: &DMatrix<f64>) -> Result<MetricLieAlgebra> {
    let m = g0.nrows();
    for (name, x) in [("A", a), ("S", s), ("g0", g0)] {
        if x.nrows() != m || x.ncols() != m {
            return Err(GeomError::Shape(format!("{name} must be {m}x{m}")));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite(name.into()));
        }
    }
    let scale = 1.0 + linalg::max_abs(a).max(linalg::max_abs(s)) * (1.0 + linalg::max_abs(g0));
    let atol = tol::ALG_REL * scale;
    if linalg::max_abs(&(g0 * a + a.transpose() * g0)) > atol {
        return Err(GeomError::Input("A is not skew with respect to g0".into()));
    }
    if linalg::max_abs(&(g0 * s - s.transpose() * g0)) > atol {
        return Err(GeomError::Input("S is not symmetric with respect to g0".into()));
    }
    let n = m + 1;
    let d = a + s;
    let brackets: Vec<(usize, usize, Vec<f64>)> = (0..m)
        .map(|j| {
            let mut v = vec![0.0; n];
            for i in 0..m {
                v[i + 1] = d[(i, j)];
            }
            (0, j + 1, v)
        })
        .collect();
    let alg = LieAlgebra::from_brackets(n, &brackets)?;
    let mut g = DMatrix::zeros(n, n);
    g[(0, 0)] = 1.0;
    g.view_mut((1, 1), (m, m)).copy_from(g0);
    MetricLieAlgebra::new(alg, g)
}

/// The algebra with `S = a sqrt((n-2)/(n-1)) Id + S0`, `A = 0`, identity metric,
/// together with its predicted Lee form `a sqrt((n-1)/(n-2)) b`.
pub fn example_s0(n: usize, s0: &DMatrix<f64>, a: f64) -> Result<(MetricLieAlgebra, DVector<f64>)> {
    if n < 3 {
        return Err(GeomError::Dimension { found: n, required: 3 });
    }
    let m = n - 1;
    if s0.nrows() != m || s0.ncols() != m {
        return Err(GeomError::Shape(format!("S0 must be {m}x{m}")));
    }
    if !a.is_finite() || s0.iter().any(|x| !x.is_finite()) {
        return Err(GeomError::NonFinite("S0 or a".into()));
    }
    let scale = linalg::max_abs(s0);
    if scale == 0.0 {
        return Err(GeomError::Input("S0 must be non-zero".into()));
    }
    if linalg::max_abs(&(s0 - s0.transpose())) > tol::ALG_REL * scale {
        return Err(GeomError::Input("S0 must be symmetric".into()));
    }
    if s0.trace().abs() > tol::ALG_REL * scale * m as f64 {
        return Err(GeomError::Input("S0 must be trace free".into()));
    }
    let tr2 = (s0 * s0).trace();
    if a == 0.0 || (a * a - tr2).abs() > tol::num_tol(scale) * (1.0 + tr2) {
        return Err(GeomError::Input(format!("a^2 = {} must equal tr S0^2 = {tr2}", a * a)));
    }
    let nf = n as f64;
    let s = DMatrix::identity(m, m) * (a * ((nf - 2.0) / (nf - 1.0)).sqrt()) + s0;
    let ml = build_semidirect(&DMatrix::zeros(m, m), &s, &DMatrix::identity(m, m))?;
    let theta = linalg::basis_vector(n, 0) * (a * ((nf - 1.0) / (nf - 2.0)).sqrt());
    Ok((ml, theta))
}

/// Curvature, Ricci and scalar curvature from the closed formulas in `A`, `S`:
///
/// * `R(u,v)w = g(Sv,w) Su - g(Su,w) Sv`, `R(u,v)b = 0`,
/// * `R(b,v)w = g((S^2 - [A,S]) v, w) b`, `R(b,v)b = ([A,S] - S^2) v`,
/// * `Ric = -tr(S^2) b (x) b + [A,S] - tr(S) S`, `scal = -tr(S^2) - tr(S)^2`.
pub fn closed_form_curvature(d: &AADecomposition, m: &MetricLieAlgebra) -> Result<CurvatureData> {
    let n = m.dim();
    let k = n - 1;
    let s = &d.s;
    let comm = &d.a * s - s * &d.a;
    let s2 = s * s;
    let bv = &s2 - &comm;

    let mut r = Tensor4::zeros(n);
    for a in 0..k {
        for c in 0..k {
            for e in 0..k {
                for l in 0..k {
                    let v = s[(c, e)] * s[(l, a)] - s[(a, e)] * s[(l, c)];
                    r.set(a + 1, c + 1, e + 1, l + 1, v);
                }
            }
            // R(b, v_c) w_a and R(v_c, b) w_a
            r.set(0, c + 1, a + 1, 0, bv[(a, c)]);
            r.set(c + 1, 0, a + 1, 0, -bv[(a, c)]);
            // R(b, v_c) b
            r.set(0, c + 1, 0, a + 1, -bv[(a, c)]);
            r.set(c + 1, 0, 0, a + 1, bv[(a, c)]);
        }
    }

    let mut ric = DMatrix::zeros(n, n);
    ric[(0, 0)] = -s2.trace();
    ric.view_mut((1, 1), (k, k)).copy_from(&(&comm - s * s.trace()));
    let scalar = -s2.trace() - s.trace() * s.trace();

    let p = d.basis_change();
    let pinv = p
        .clone()
        .try_inverse()
        .ok_or_else(|| GeomError::consistency("adapted frame inverse", f64::INFINITY, 0.0))?;
    let pt = p.transpose();
    let riem = r.transform([&pinv, &pinv, &pinv, &pt]);
    let ricci = pinv.transpose() * ric * &pinv;
    Ok(CurvatureData { riem, ricci, scalar })
}

/// Flatness of `e^{2f} g` for a non-zero Weyl-Einstein Lee form, read off from
/// the eigenvalues of `S`: flat iff `S = k Id`, or `S` has a single non-zero
/// eigenvalue of multiplicity `n - 2` and a simple zero eigenvalue. Ricci
/// flatness always holds.
pub fn rff_classify(d: &AADecomposition, m: &MetricLieAlgebra, theta: &DVector<f64>) -> Result<(bool, bool)> {
    if theta.len() != m.dim() {
        return Err(GeomError::Shape("Lee form length".into()));
    }
    if theta.amax() <= m.tau_num() {
        return Err(GeomError::Precondition("Lee form must be non-zero".into()));
    }
    let ev = linalg::sorted_sym_eigenvalues(&d.s);
    let clusters = eigen_clusters(&ev);
    let n = m.dim();
    let flat = match clusters.as_slice() {
        [_] => true,
        [x, y] => {
            let big = ev.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            let ztol = tol::EIGEN_CLUSTER_REL * big;
            let (zero, other) = if x.0.abs() <= ztol { (x, y) } else { (y, x) };
            zero.0.abs() <= ztol && zero.1 == 1 && other.1 == n - 2 && other.0.abs() > ztol
        }
        _ => false,
    };
    Ok((true, flat))
}

/// Groups sorted eigenvalues into `(mean, multiplicity)` clusters.
pub fn eigen_clusters(sorted: &[f64]) -> Vec<(f64, usize)> {
    let big = sorted.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
    let tol = tol::EIGEN_CLUSTER_REL * big;
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((sum, count, last)) if v - *last <= tol => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => out.push((v, 1, v)),
        }
    }
    out.into_iter().map(|(s, c, _)| (s / c as f64, c)).collect()
}
