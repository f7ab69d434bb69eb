//! Levi-Civita connection and curvature in a moving frame.
//!
//! Christoffel symbols are taken with respect to the frame: `∇_{E_i} E_j =
//! Γ^l_ij E_l`. The Koszul formula in a non-holonomic frame reads
//!
//! ```text
//! 2 Γ_ijk = E_i g_jk + E_j g_ik - E_k g_ij + g([E_i,E_j],E_k) - g([E_i,E_k],E_j) - g([E_j,E_k],E_i)
//! ```
//!
//! and the curvature components `R(E_i,E_j)E_k = R^l_kij E_l` are
//!
//! ```text
//! R^l_kij = E_i Γ^l_jk - E_j Γ^l_ik + Γ^m_jk Γ^l_im - Γ^m_ik Γ^l_jm - c^m_ij Γ^l_mk
//! ```

use nalgebra::{DMatrix, DVector};

use super::field::VectorField;
use super::frame::{FrameModel, StructureConstants};
use crate::error::{Error, Result};

/// Frame Christoffel symbols at a point, `get(l, i, j) = Γ^l_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel {
    dim: usize,
    data: Vec<f64>,
}

impl Christoffel {
    fn zeros(dim: usize) -> Self {
        Christoffel {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    fn idx(&self, l: usize, i: usize, j: usize) -> usize {
        (l * self.dim + i) * self.dim + j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, l: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(l, i, j)]
    }

    /// Components of `∇_X E_j` for every `j`, as columns.
    pub fn along(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let d = self.dim;
        DMatrix::from_fn(d, d, |l, j| (0..d).map(|i| x[i] * self.get(l, i, j)).sum())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.data)
    }
}

fn christoffel_from(
    g: &DMatrix<f64>,
    dg: &[DMatrix<f64>],
    c: &StructureConstants,
    point: &[f64],
) -> Result<Christoffel> {
    let d = g.nrows();
    let g_inv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::SingularMetric {
            point: point.to_vec(),
        })?;
    // lowered structure constants c_ijk = g([E_i,E_j],E_k)
    let mut low = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                low[(i * d + j) * d + k] = (0..d).map(|m| c.get(m, i, j) * g[(m, k)]).sum();
            }
        }
    }
    let cl = |i: usize, j: usize, k: usize| low[(i * d + j) * d + k];
    let mut out = Christoffel::zeros(d);
    for i in 0..d {
        for j in 0..d {
            let lowered = DVector::from_fn(d, |k, _| {
                0.5 * (dg[i][(j, k)] + dg[j][(i, k)] - dg[k][(i, j)] + cl(i, j, k) - cl(i, k, j) - cl(j, k, i))
            });
            let raised = &g_inv * lowered;
            for l in 0..d {
                let id = out.idx(l, i, j);
                out.data[id] = raised[l];
            }
        }
    }
    Ok(out)
}

/// Levi-Civita connection of the model's metric at `p`.
pub fn levi_civita(model: &FrameModel, p: &[f64]) -> Result<Christoffel> {
    let g = model.metric_at(p)?;
    let dg = model.frame_derivatives(model.metric_field(), p)?;
    let c = model.structure_at(p)?;
    christoffel_from(&g, &dg, &c, p)
}

/// `∇_X Y` at `p` in frame components.
pub fn covariant_derivative(
    model: &FrameModel,
    x: &VectorField,
    y: &VectorField,
    p: &[f64],
) -> Result<DVector<f64>> {
    let gamma = levi_civita(model, p)?;
    let xv = x.at(p);
    Ok(model.derivative(y, &xv, p)? + gamma.along(&xv) * y.at(p))
}

/// Maximum of `|∇_i E_j - ∇_j E_i - [E_i,E_j]|` over frame pairs.
pub fn torsion_residual(model: &FrameModel, gamma: &Christoffel, p: &[f64]) -> Result<f64> {
    let c = model.structure_at(p)?;
    let d = gamma.dim();
    let mut worst: f64 = 0.0;
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((gamma.get(l, i, j) - gamma.get(l, j, i) - c.get(l, i, j)).abs());
            }
        }
    }
    Ok(worst)
}

/// Maximum of `|E_i g_jk - g(∇_i E_j, E_k) - g(E_j, ∇_i E_k)|`.
pub fn metric_compatibility_residual(model: &FrameModel, gamma: &Christoffel, p: &[f64]) -> Result<f64> {
    let g = model.metric_at(p)?;
    let dg = model.frame_derivatives(model.metric_field(), p)?;
    let d = gamma.dim();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut s = dg[i][(j, k)];
                for l in 0..d {
                    s -= gamma.get(l, i, j) * g[(l, k)] + gamma.get(l, i, k) * g[(j, l)];
                }
                worst = worst.max(s.abs());
            }
        }
    }
    Ok(worst)
}

/// Curvature components at a point, `get(l, k, i, j) = R^l_kij`, so that
/// `R(E_i, E_j) E_k = R^l_kij E_l`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureTensor {
    dim: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    fn idx(&self, l: usize, k: usize, i: usize, j: usize) -> usize {
        ((l * self.dim + k) * self.dim + i) * self.dim + j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.idx(l, k, i, j)]
    }

    /// `R(X, Y) Z`.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        let mut out = DVector::zeros(d);
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                let xy = x[i] * y[j];
                if xy == 0.0 {
                    continue;
                }
                for k in 0..d {
                    let w = xy * z[k];
                    if w == 0.0 {
                        continue;
                    }
                    for l in 0..d {
                        out[l] += w * self.get(l, k, i, j);
                    }
                }
            }
        }
        out
    }

    /// Largest `|R^l_kij + R^l_kji|`.
    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for l in 0..d {
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        worst = worst.max((self.get(l, k, i, j) + self.get(l, k, j, i)).abs());
                    }
                }
            }
        }
        worst
    }

    /// Largest first Bianchi defect `|R^l_kij + R^l_ijk + R^l_jki|`.
    pub fn bianchi_residual(&self) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for l in 0..d {
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let s = self.get(l, k, i, j) + self.get(l, i, j, k) + self.get(l, j, k, i);
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }
}

/// Full curvature tensor at `p`. Homogeneous models with a constant metric
/// are exact; on a chart the Christoffel symbols are differentiated again by
/// central differences with a step ten times the model step.
pub fn curvature_tensor(model: &FrameModel, p: &[f64]) -> Result<CurvatureTensor> {
    let d = model.dim();
    let gamma = levi_civita(model, p)?;
    let c = model.structure_at(p)?;
    let dgamma: Vec<DVector<f64>> = if model.is_homogeneous() {
        vec![DVector::zeros(d * d * d); d]
    } else {
        let outer = 10.0 * model.fd_step();
        let nan = DVector::from_element(d * d * d, f64::NAN);
        let eval = |q: &[f64]| -> DVector<f64> {
            let g = model.metric_field().at(q);
            let inner = || -> Result<Christoffel> {
                let dg = model.frame_derivatives_of_fn(&|r: &[f64]| model.metric_field().at(r), q, model.fd_step())?;
                christoffel_from(&g, &dg, &model.structure_at(q)?, q)
            };
            inner().map(|c| c.as_vector()).unwrap_or_else(|_| nan.clone())
        };
        let out = model.frame_derivatives_of_fn(&eval, p, outer)?;
        if out.iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::SingularMetric { point: p.to_vec() });
        }
        out
    };
    let mut r = CurvatureTensor {
        dim: d,
        data: vec![0.0; d * d * d * d],
    };
    for l in 0..d {
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut s = dgamma[i][gamma.idx(l, j, k)] - dgamma[j][gamma.idx(l, i, k)];
                    for m in 0..d {
                        s += gamma.get(m, j, k) * gamma.get(l, i, m) - gamma.get(m, i, k) * gamma.get(l, j, m)
                            - c.get(m, i, j) * gamma.get(l, m, k);
                    }
                    let id = r.idx(l, k, i, j);
                    r.data[id] = s;
                }
            }
        }
    }
    Ok(r)
}

/// `R(X, Y) Z` at `p` for tangent vectors given in frame components.
pub fn riemann_curvature(
    model: &FrameModel,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    p: &[f64],
) -> Result<DVector<f64>> {
    Ok(curvature_tensor(model, p)?.apply(x, y, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::field::Field;

    fn flat(d: usize) -> FrameModel {
        FrameModel::coordinate_chart(d, Field::Constant(DMatrix::identity(d, d)))
    }

    #[test]
    fn flat_chart_has_no_connection_or_curvature() {
        let m = flat(3);
        let p = [0.2, -0.1, 0.7];
        assert_eq!(levi_civita(&m, &p).unwrap().max_abs(), 0.0);
        let r = curvature_tensor(&m, &p).unwrap();
        assert_eq!(r.data.iter().map(|v| v.abs()).fold(0.0, f64::max), 0.0);
    }

    #[test]
    fn singular_metric_is_rejected() {
        let m = FrameModel::coordinate_chart(2, Field::Constant(DMatrix::zeros(2, 2)));
        assert!(matches!(
            levi_civita(&m, &[0.0, 0.0]),
            Err(Error::SingularMetric { .. })
        ));
    }

    #[test]
    fn curvature_vanishes_on_equal_arguments() {
        let c = StructureConstants::from_brackets(3, &[(1, 2, 0, 2.0), (2, 0, 1, 1.0), (0, 1, 2, 3.0)]).unwrap();
        let m = FrameModel::homogeneous(c, DMatrix::identity(3, 3)).unwrap();
        let r = curvature_tensor(&m, &[]).unwrap();
        let x = DVector::from_vec(vec![0.3, -1.0, 0.5]);
        let z = DVector::from_vec(vec![1.0, 2.0, -0.2]);
        assert!(r.apply(&x, &x, &z).amax() < 1e-14);
        assert!(r.antisymmetry_residual() < 1e-14);
        assert!(r.bianchi_residual() < 1e-12);
    }
}
