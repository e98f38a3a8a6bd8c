//! Real Lie algebras given by structure constants.
//!
//! A basis `e_0, .., e_{n-1}` is fixed and the bracket is stored as
//! `[e_i, e_j] = sum_k c[i][j][k] e_k`. Indices are zero-based throughout the
//! library; file formats and reports translate to one-based indices.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::linalg;
use crate::tol;

#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    coeffs: Vec<f64>,
}

/// Which identity a [`Violation`] breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Antisymmetry,
    Jacobi,
}

/// One failed identity, located at a basis index triple.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: ViolationKind,
    pub indices: (usize, usize, usize),
    /// Residual vector: `c_ij + c_ji` for antisymmetry, the cyclic Jacobi sum otherwise.
    pub residual: DVector<f64>,
    pub magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidityReport {
    pub violations: Vec<Violation>,
}

impl ValidityReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureFlags {
    pub solvable: bool,
    pub nilpotent: bool,
    pub abelian: bool,
    pub unimodular: bool,
    pub derived_dim: usize,
    pub center_dim: usize,
}

impl LieAlgebra {
    /// Wraps a flat coefficient array of length `dim^3`, indexed `(i*n + j)*n + k`.
    ///
    /// Only shape and finiteness are checked here; use [`LieAlgebra::validate`]
    /// for antisymmetry and Jacobi.
    pub fn new(dim: usize, coeffs: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::Shape("dimension must be at least 1".into()));
        }
        if coeffs.len() != dim.pow(3) {
            return Err(GeomError::Shape(format!(
                "expected {} structure constants for dimension {dim}, got {}",
                dim.pow(3),
                coeffs.len()
            )));
        }
        if let Some(pos) = coeffs.iter().position(|x| !x.is_finite()) {
            let n = dim;
            return Err(GeomError::NonFinite(format!(
                "structure constant c[{}][{}][{}] is {}",
                pos / (n * n),
                (pos / n) % n,
                pos % n,
                coeffs[pos]
            )));
        }
        Ok(LieAlgebra { dim, coeffs })
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebra {
            dim,
            coeffs: vec![0.0; dim.pow(3)],
        }
    }

    /// Builds an algebra from brackets `[e_i, e_j] = v` with `i < j`; the
    /// antisymmetric completion is filled in.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, Vec<f64>)]) -> Result<Self> {
        let mut alg = LieAlgebra::new(dim, vec![0.0; dim.pow(3)])?;
        for (i, j, v) in brackets {
            let (i, j) = (*i, *j);
            if i >= dim || j >= dim {
                return Err(GeomError::Shape(format!(
                    "bracket index ({i}, {j}) out of range for dimension {dim}"
                )));
            }
            if i == j {
                return Err(GeomError::InvalidAlgebra("self-bracket not allowed".into()));
            }
            if v.len() != dim {
                return Err(GeomError::Shape(format!(
                    "bracket [{i}, {j}] has {} coefficients, expected {dim}",
                    v.len()
                )));
            }
            for (k, &a) in v.iter().enumerate() {
                if !a.is_finite() {
                    return Err(GeomError::NonFinite(format!("bracket [{i}, {j}] coefficient {k}")));
                }
                alg.set(i, j, k, a);
                alg.set(j, i, k, -a);
            }
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `c^k_{ij}`, the `e_k` coefficient of `[e_i, e_j]`.
    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        let n = self.dim;
        self.coeffs[(i * n + j) * n + k]
    }

    fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let n = self.dim;
        self.coeffs[(i * n + j) * n + k] = v;
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> DVector<f64> {
        DVector::from_fn(self.dim, |k, _| self.c(i, j, k))
    }

    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let n = self.dim;
        let mut out = DVector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += w * self.c(i, j, k);
                }
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_abelian_exactly(&self) -> bool {
        self.coeffs.iter().all(|&x| x == 0.0)
    }

    /// `tau_alg`, relative to the largest structure constant.
    pub fn tol(&self) -> f64 {
        tol::ALG_REL * self.max_abs()
    }

    /// Matrix of `ad_x`; column `j` holds the coefficients of `[x, e_j]`.
    pub fn ad_matrix(&self, x: &DVector<f64>) -> Result<DMatrix<f64>> {
        if x.len() != self.dim {
            return Err(GeomError::Shape(format!(
                "vector of length {} for algebra of dimension {}",
                x.len(),
                self.dim
            )));
        }
        Ok(self.ad_unchecked(x))
    }

    pub(crate) fn ad_unchecked(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += x[i] * self.c(i, j, k);
                }
            }
        }
        m
    }

    /// `ad_{e_i}`.
    pub fn ad_basis(&self, i: usize) -> DMatrix<f64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, j| self.c(i, j, k))
    }

    /// Trace of `ad_{e_i}` for every basis vector.
    pub fn ad_traces(&self) -> DVector<f64> {
        let n = self.dim;
        DVector::from_fn(n, |i, _| (0..n).map(|k| self.c(i, k, k)).sum())
    }

    /// Structure constants in the basis `f_a = sum_i p[(i, a)] e_i`.
    pub fn change_basis(&self, p: &DMatrix<f64>) -> Result<LieAlgebra> {
        let n = self.dim;
        if p.nrows() != n || p.ncols() != n {
            return Err(GeomError::Shape(format!(
                "basis change must be {n}x{n}, got {}x{}",
                p.nrows(),
                p.ncols()
            )));
        }
        let pinv = p
            .clone()
            .try_inverse()
            .ok_or_else(|| GeomError::Input("basis change is singular".into()))?;
        let cols: Vec<DVector<f64>> = (0..n).map(|a| p.column(a).into_owned()).collect();
        let mut out = LieAlgebra::abelian(n);
        for a in 0..n {
            for b in 0..n {
                let br = &pinv * self.bracket(&cols[a], &cols[b]);
                for c in 0..n {
                    out.set(a, b, c, br[c]);
                }
            }
        }
        Ok(out)
    }

    /// Antisymmetry and Jacobi check within `tau_alg`.
    ///
    /// Jacobi sums are quadratic in the structure constants, so their
    /// residuals are compared against `tau_alg * max|c|`.
    pub fn validate(&self) -> ValidityReport {
        let n = self.dim;
        let scale = self.max_abs();
        let anti_tol = tol::ALG_REL * scale;
        let jac_tol = tol::ALG_REL * scale * scale;
        let mut violations = Vec::new();
        for i in 0..n {
            for j in i..n {
                let r = DVector::from_fn(n, |k, _| self.c(i, j, k) + self.c(j, i, k));
                let r = if i == j { r * 0.5 } else { r };
                let mag = r.norm();
                if mag > anti_tol {
                    violations.push(Violation {
                        kind: ViolationKind::Antisymmetry,
                        indices: (i, j, j),
                        residual: r,
                        magnitude: mag,
                    });
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let r = self.jacobi_sum(i, j, k);
                    let mag = r.norm();
                    if mag > jac_tol {
                        violations.push(Violation {
                            kind: ViolationKind::Jacobi,
                            indices: (i, j, k),
                            residual: r,
                            magnitude: mag,
                        });
                    }
                }
            }
        }
        ValidityReport { violations }
    }

    /// `[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]`.
    pub fn jacobi_sum(&self, i: usize, j: usize, k: usize) -> DVector<f64> {
        let n = self.dim;
        let e = |a: usize| linalg::basis_vector(n, a);
        self.bracket(&self.bracket_basis(i, j), &e(k))
            + self.bracket(&self.bracket_basis(j, k), &e(i))
            + self.bracket(&self.bracket_basis(k, i), &e(j))
    }

    /// Rank cutoff for spans of brackets: `tau_alg` times the larger of the
    /// leading singular value and the structure-constant scale, so roundoff
    /// noise in an otherwise vanishing bracket never counts as a direction.
    fn span_cutoff(&self, vectors: &DMatrix<f64>) -> f64 {
        let smax = if vectors.ncols() == 0 {
            0.0
        } else {
            vectors.clone().singular_values().max()
        };
        tol::ALG_REL * smax.max(self.max_abs())
    }

    fn span(&self, vectors: &DMatrix<f64>) -> DMatrix<f64> {
        let cutoff = self.span_cutoff(vectors);
        if cutoff == 0.0 {
            return DMatrix::zeros(self.dim, 0);
        }
        linalg::column_space(vectors, cutoff)
    }

    /// Orthonormal (Euclidean) basis of `[U, V]` for subspaces given by columns.
    pub fn bracket_span(&self, u: &DMatrix<f64>, v: &DMatrix<f64>) -> DMatrix<f64> {
        let mut cols = Vec::with_capacity(u.ncols() * v.ncols());
        for a in 0..u.ncols() {
            let x = u.column(a).into_owned();
            for b in 0..v.ncols() {
                cols.push(self.bracket(&x, &v.column(b).into_owned()));
            }
        }
        if cols.is_empty() {
            return DMatrix::zeros(self.dim, 0);
        }
        self.span(&DMatrix::from_columns(&cols))
    }

    /// Basis of the derived algebra `[g, g]`.
    pub fn derived_algebra(&self) -> DMatrix<f64> {
        let id = DMatrix::identity(self.dim, self.dim);
        self.bracket_span(&id, &id)
    }

    /// Dimensions along the derived series `g, g', g'', ..` until it stabilises.
    pub fn derived_series_dims(&self) -> Vec<usize> {
        let mut current = DMatrix::identity(self.dim, self.dim);
        let mut dims = vec![self.dim];
        loop {
            let next = self.bracket_span(&current, &current);
            let d = next.ncols();
            if d == *dims.last().unwrap() {
                break;
            }
            dims.push(d);
            if d == 0 {
                break;
            }
            current = next;
        }
        dims
    }

    /// Dimensions along the lower central series `g, [g,g], [g,[g,g]], ..`.
    pub fn lower_central_series_dims(&self) -> Vec<usize> {
        let id = DMatrix::identity(self.dim, self.dim);
        let mut current = id.clone();
        let mut dims = vec![self.dim];
        loop {
            let next = self.bracket_span(&id, &current);
            let d = next.ncols();
            if d == *dims.last().unwrap() {
                break;
            }
            dims.push(d);
            if d == 0 {
                break;
            }
            current = next;
        }
        dims
    }

    /// Dimension of the center: kernel of `x -> ([x, e_j])_j`.
    pub fn center_dim(&self) -> usize {
        let n = self.dim;
        let mut stacked = DMatrix::zeros(n * n, n);
        for j in 0..n {
            for i in 0..n {
                for k in 0..n {
                    stacked[(j * n + k, i)] = self.c(i, j, k);
                }
            }
        }
        let cutoff = tol::ALG_REL * self.max_abs();
        if cutoff == 0.0 {
            return n;
        }
        let rank = stacked
            .singular_values()
            .iter()
            .filter(|s| **s > cutoff)
            .count();
        n - rank
    }

    pub fn structure_flags(&self) -> StructureFlags {
        let derived = self.derived_series_dims();
        let lower = self.lower_central_series_dims();
        let derived_dim = derived.get(1).copied().unwrap_or(self.dim);
        let tol = self.tol();
        let unimodular = self.ad_traces().iter().all(|t| t.abs() <= tol);
        StructureFlags {
            solvable: *derived.last().unwrap() == 0,
            nilpotent: *lower.last().unwrap() == 0,
            abelian: derived_dim == 0,
            unimodular,
            derived_dim,
            center_dim: self.center_dim(),
        }
    }
}

/// Checks raw structure constants: shape and finiteness errors are returned as
/// `Err`, identity failures are listed in the report.
pub fn validate_algebra(dim: usize, coeffs: &[f64]) -> Result<ValidityReport> {
    Ok(LieAlgebra::new(dim, coeffs.to_vec())?.validate())
}
