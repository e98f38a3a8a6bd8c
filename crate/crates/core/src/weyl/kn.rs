use nalgebra::{DMatrix, DVector};

use super::{faraday, nabla_theta, require_dim3, weyl_connection, weyl_ricci_formula};
use crate::error::{GeomError, Result};
use crate::linalg;
use crate::riemann::{self, MetricLieAlgebra};
use crate::tensor::Tensor4;
use crate::tol;

/// `(h . k)(x,y,z,w) = h(x,z)k(y,w) + h(y,w)k(x,z) - h(x,w)k(y,z) - h(y,z)k(x,w)`.
///
/// With `R(x,y,z,w) = g(R(x,y)z, w)` and the curvature sign used in this
/// crate, real hyperbolic space satisfies `R = -(1/2) g . g`.
pub fn kulkarni_nomizu(h: &DMatrix<f64>, k: &DMatrix<f64>) -> Tensor4 {
    let n = h.nrows();
    let mut t = Tensor4::zeros(n);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let v = h[(x, z)] * k[(y, w)] + h[(y, w)] * k[(x, z)]
                        - h[(x, w)] * k[(y, z)]
                        - h[(y, z)] * k[(x, w)];
                    t.set(x, y, z, w, v);
                }
            }
        }
    }
    t
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFlatness {
    pub ricci_flat: bool,
    pub flat: bool,
    /// Norm of the Ricci form of the Weyl connection (orthonormal frame).
    pub ricci_norm: f64,
    /// Norm of `R^g - g . (nabla theta - theta (x) theta + |theta|^2 g / 2)`.
    pub kn_residual: f64,
}

/// Ricci-flatness and flatness of the local metric `e^{2f} g` with `df = theta`.
pub fn conformal_flatness_check(m: &MetricLieAlgebra, theta: &DVector<f64>) -> Result<ConformalFlatness> {
    require_dim3(m)?;
    if !faraday(m, theta)?.closed {
        return Err(GeomError::Precondition("Lee form is not closed".into()));
    }
    let w = weyl_connection(m, theta)?;
    let cd = riemann::ricci(m)?;
    let ric = weyl_ricci_formula(&w)?;
    let ricci_norm = m.form_norm(&ric);
    let ricci_flat = ricci_norm <= tol::ROOT_TOL * (1.0 + m.form_norm(&cd.ricci));

    let g = m.metric();
    let riem = cd.riem.lower_last(g);
    let nt = linalg::sym_part(&nabla_theta(m, &w.levi_civita, theta)?);
    let h = nt - theta * theta.transpose() + g * (0.5 * w.lee.norm_sq());
    let diff = riem.sub(&kulkarni_nomizu(g, &h));
    let kn_residual = m.tensor_norm(&diff);
    let flat = kn_residual <= tol::ROOT_TOL * (1.0 + m.tensor_norm(&riem));
    Ok(ConformalFlatness {
        ricci_flat,
        flat,
        ricci_norm,
        kn_residual,
    })
}
