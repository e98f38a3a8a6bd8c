//! Dense rank-4 arrays over a fixed dimension.

use nalgebra::DMatrix;

/// A dense `n x n x n x n` array stored in row-major order.
///
/// The meaning of each slot (covariant or contravariant) is fixed by the
/// producer; curvature endomorphisms use `R(e_i, e_j) e_k = sum_l t[i,j,k,l] e_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    dim: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(dim: usize) -> Self {
        Tensor4 {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        let n = self.dim;
        ((i * n + j) * n + k) * n + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.offset(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let o = self.offset(i, j, k, l);
        self.data[o] = value;
    }

    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let o = self.offset(i, j, k, l);
        self.data[o] += value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Euclidean norm of the coefficient array.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &Tensor4) -> Tensor4 {
        assert_eq!(self.dim, other.dim, "tensor dimension mismatch");
        Tensor4 {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Contract slot `mode` with `m`: `out[.., i, ..] = sum_a m[(a, i)] t[.., a, ..]`.
    fn apply_mode(&self, mode: usize, m: &DMatrix<f64>) -> Tensor4 {
        let n = self.dim;
        let mut out = Tensor4::zeros(n);
        let mut idx = [0usize; 4];
        for o in 0..n.pow(4) {
            let mut rem = o;
            for slot in (0..4).rev() {
                idx[slot] = rem % n;
                rem /= n;
            }
            let target = idx[mode];
            let mut acc = 0.0;
            for a in 0..n {
                let coef = m[(a, target)];
                if coef == 0.0 {
                    continue;
                }
                let mut src = idx;
                src[mode] = a;
                acc += coef * self.get(src[0], src[1], src[2], src[3]);
            }
            out.data[o] = acc;
        }
        out
    }

    /// Applies one matrix per slot, each mapping old index (row) to new index
    /// (column). Covariant slots take `P` for a new basis `f_a = sum_i P[i,a] e_i`;
    /// contravariant slots take `P^{-T}`.
    pub fn transform(&self, mats: [&DMatrix<f64>; 4]) -> Tensor4 {
        let mut t = self.clone();
        for (mode, m) in mats.iter().enumerate() {
            assert_eq!(m.nrows(), self.dim);
            assert_eq!(m.ncols(), self.dim);
            t = t.apply_mode(mode, m);
        }
        t
    }

    /// Lowers the last slot with the metric: `out[i,j,k,m] = sum_l t[i,j,k,l] g[l,m]`.
    pub fn lower_last(&self, metric: &DMatrix<f64>) -> Tensor4 {
        self.apply_mode(3, metric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_transform_is_noop() {
        let mut t = Tensor4::zeros(3);
        t.set(0, 1, 2, 0, 2.5);
        t.set(2, 2, 1, 0, -1.0);
        let id = DMatrix::<f64>::identity(3, 3);
        assert_eq!(t.transform([&id, &id, &id, &id]), t);
    }

    #[test]
    fn scaling_one_slot() {
        let mut t = Tensor4::zeros(2);
        t.set(1, 0, 0, 1, 3.0);
        let mut m = DMatrix::<f64>::identity(2, 2);
        m[(1, 1)] = 2.0;
        let id = DMatrix::<f64>::identity(2, 2);
        let out = t.transform([&m, &id, &id, &id]);
        assert_eq!(out.get(1, 0, 0, 1), 6.0);
        assert_eq!(out.norm(), 6.0);
    }
}
