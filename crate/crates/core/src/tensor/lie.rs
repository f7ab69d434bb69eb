//! Lie brackets and Lie derivatives.
//!
//! All Lie derivatives reduce to the matrix `B` whose column `j` is
//! `[X, E_j]`; then for a function `u`, a vector `Y`, a covector `α`, a (1,1)
//! tensor `A` and a (0,2) tensor `S`:
//!
//! ```text
//! L_X u = X(u)
//! L_X Y = X(Y) + B Y
//! L_X α = X(α) - Bᵀ α
//! L_X A = X(A) + B A - A B
//! L_X S = X(S) - Bᵀ S - S B
//! ```
//!
//! where `X(·)` differentiates components. In homogeneous mode with constant
//! inputs only the bracket terms survive.

use nalgebra::{DMatrix, DVector};

use super::field::{BilinearField, CovectorField, Field, OperatorField, ScalarField, VectorField};
use super::frame::{Frame, FrameModel};
use super::point_tensor::PointTensor;
use crate::error::{Error, Result};

/// A tensor field of one of the valences the workbench differentiates.
#[derive(Clone, Debug)]
pub enum TensorField {
    Scalar(ScalarField),
    Vector(VectorField),
    Covector(CovectorField),
    Operator(OperatorField),
    Bilinear(BilinearField),
}

/// `[X, Y](p)` in frame components.
pub fn lie_bracket(model: &FrameModel, x: &VectorField, y: &VectorField, p: &[f64]) -> Result<DVector<f64>> {
    let xv = x.at(p);
    let yv = y.at(p);
    let c = model.structure_at(p)?;
    let xy = model.derivative(y, &xv, p)?;
    let yx = model.derivative(x, &yv, p)?;
    Ok(xy - yx + c.bracket(&xv, &yv))
}

/// Matrix with columns `[X, E_j]` at `p`.
pub fn frame_bracket_matrix(model: &FrameModel, x: &VectorField, p: &[f64]) -> Result<DMatrix<f64>> {
    let d = model.dim();
    let xv = x.at(p);
    let c = model.structure_at(p)?;
    let dx = model.frame_derivatives(x, p)?;
    Ok(DMatrix::from_fn(d, d, |m, j| {
        let mut s = -dx[j][m];
        for a in 0..d {
            s += xv[a] * c.get(m, a, j);
        }
        s
    }))
}

pub fn lie_derivative(
    model: &FrameModel,
    direction: &VectorField,
    tensor: &TensorField,
    p: &[f64],
) -> Result<PointTensor> {
    let d = model.dim();
    let xv = direction.at(p);
    if xv.len() != d {
        return Err(Error::Dimension {
            expected: d,
            got: xv.len(),
        });
    }
    let b = frame_bracket_matrix(model, direction, p)?;
    Ok(match tensor {
        TensorField::Scalar(f) => PointTensor::scalar(d, model.derivative(f, &xv, p)?),
        TensorField::Vector(y) => PointTensor::vector(&(model.derivative(y, &xv, p)? + &b * y.at(p))),
        TensorField::Covector(a) => {
            PointTensor::covector(&(model.derivative(a, &xv, p)? - b.transpose() * a.at(p)))
        }
        TensorField::Operator(a) => {
            let av = a.at(p);
            PointTensor::operator(&(model.derivative(a, &xv, p)? + &b * &av - &av * &b))
        }
        TensorField::Bilinear(s) => {
            let sv = s.at(p);
            PointTensor::bilinear(&(model.derivative(s, &xv, p)? - b.transpose() * &sv - &sv * &b))
        }
    })
}

/// Lie derivative of a (1,1) field as a matrix.
pub fn lie_derivative_operator(
    model: &FrameModel,
    direction: &VectorField,
    a: &OperatorField,
    p: &[f64],
) -> Result<DMatrix<f64>> {
    let t = lie_derivative(model, direction, &TensorField::Operator(a.clone()), p)?;
    Ok(t.as_matrix().expect("operator"))
}

/// Lie derivative of a (0,2) field as a matrix.
pub fn lie_derivative_bilinear(
    model: &FrameModel,
    direction: &VectorField,
    s: &BilinearField,
    p: &[f64],
) -> Result<DMatrix<f64>> {
    let t = lie_derivative(model, direction, &TensorField::Bilinear(s.clone()), p)?;
    Ok(t.as_matrix().expect("bilinear"))
}

/// Lie derivative of a covector field.
pub fn lie_derivative_covector(
    model: &FrameModel,
    direction: &VectorField,
    a: &CovectorField,
    p: &[f64],
) -> Result<DVector<f64>> {
    let t = lie_derivative(model, direction, &TensorField::Covector(a.clone()), p)?;
    Ok(t.as_vector().expect("covector"))
}

/// Coordinate velocity and its coordinate Jacobian for the flow of `x`.
struct FlowRhs<'a> {
    model: &'a FrameModel,
    field: &'a VectorField,
}

impl FlowRhs<'_> {
    fn velocity(&self, q: &[f64]) -> DVector<f64> {
        let e = match self.model.frame() {
            Frame::Chart { frame, .. } => frame(q),
            Frame::Homogeneous(_) => unreachable!("flows are integrated on charts only"),
        };
        e * self.field.at(q)
    }

    fn jacobian(&self, q: &[f64]) -> DMatrix<f64> {
        let d = q.len();
        let h = self.model.fd_step();
        let mut jac = DMatrix::zeros(d, d);
        let mut r = q.to_vec();
        for mu in 0..d {
            r[mu] = q[mu] + h;
            let plus = self.velocity(&r);
            r[mu] = q[mu] - h;
            let minus = self.velocity(&r);
            r[mu] = q[mu];
            jac.set_column(mu, &((plus - minus) / (2.0 * h)));
        }
        jac
    }

    fn eval(&self, x: &DVector<f64>, j: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let q = x.as_slice();
        (self.velocity(q), self.jacobian(q) * j)
    }
}

/// Flow of `x` for time `t` from `p`, with the coordinate Jacobian of the flow map.
pub fn integrate_flow(
    model: &FrameModel,
    x: &VectorField,
    p: &[f64],
    t: f64,
) -> Result<(DVector<f64>, DMatrix<f64>)> {
    if model.is_homogeneous() {
        return Err(Error::UnsupportedField(
            "flow transport needs a chart model".into(),
        ));
    }
    if matches!(x, Field::Jet { .. }) {
        return Err(Error::UnsupportedField("jet fields have no flow".into()));
    }
    model.check_point(p)?;
    let d = model.dim();
    let rhs = FlowRhs { model, field: x };
    let steps = ((t.abs() / 2.5e-3).ceil() as usize).max(16);
    let h = t / steps as f64;
    let mut xs = DVector::from_column_slice(p);
    let mut js = DMatrix::identity(d, d);
    for _ in 0..steps {
        let (k1x, k1j) = rhs.eval(&xs, &js);
        let (k2x, k2j) = rhs.eval(&(&xs + &k1x * (h / 2.0)), &(&js + &k1j * (h / 2.0)));
        let (k3x, k3j) = rhs.eval(&(&xs + &k2x * (h / 2.0)), &(&js + &k2j * (h / 2.0)));
        let (k4x, k4j) = rhs.eval(&(&xs + &k3x * h), &(&js + &k3j * h));
        xs += (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
        js += (k1j + k2j * 2.0 + k3j * 2.0 + k4j) * (h / 6.0);
    }
    Ok((xs, js))
}

/// Frame components at `p` of the pullback `Φ_t^* T` along the flow of `x`.
pub fn pullback_along_flow(
    model: &FrameModel,
    x: &VectorField,
    tensor: &TensorField,
    p: &[f64],
    t: f64,
) -> Result<PointTensor> {
    let (q, jac) = integrate_flow(model, x, p, t)?;
    let q = q.as_slice();
    let e_p = model.frame_matrix(p)?;
    let e_q = model.frame_matrix(q)?;
    let singular = || Error::InvalidModel("degenerate frame or flow Jacobian".into());
    let e_p_inv = e_p.clone().try_inverse().ok_or_else(singular)?;
    let e_q_inv = e_q.clone().try_inverse().ok_or_else(singular)?;
    let jac_inv = jac.clone().try_inverse().ok_or_else(singular)?;
    let d = model.dim();
    Ok(match tensor {
        TensorField::Scalar(f) => PointTensor::scalar(d, f.at(q)),
        TensorField::Vector(y) => PointTensor::vector(&(&e_p_inv * &jac_inv * (&e_q * y.at(q)))),
        TensorField::Covector(a) => {
            let coord = e_q_inv.transpose() * a.at(q);
            PointTensor::covector(&(e_p.transpose() * jac.transpose() * coord))
        }
        TensorField::Operator(a) => {
            let coord = &e_q * a.at(q) * &e_q_inv;
            PointTensor::operator(&(&e_p_inv * &jac_inv * coord * &jac * &e_p))
        }
        TensorField::Bilinear(s) => {
            let coord = e_q_inv.transpose() * s.at(q) * &e_q_inv;
            PointTensor::bilinear(&(e_p.transpose() * jac.transpose() * coord * &jac * &e_p))
        }
    })
}

/// Central flow difference `(Φ_t^* T - Φ_{-t}^* T) / 2t` at `p`; an
/// independent route to `L_X T` with error `O(t²)`.
pub fn lie_derivative_by_flow(
    model: &FrameModel,
    x: &VectorField,
    tensor: &TensorField,
    p: &[f64],
    t: f64,
) -> Result<PointTensor> {
    let plus = pullback_along_flow(model, x, tensor, p, t)?;
    let minus = pullback_along_flow(model, x, tensor, p, -t)?;
    let comps = plus
        .components()
        .iter()
        .zip(minus.components())
        .map(|(a, b)| (a - b) / (2.0 * t))
        .collect();
    PointTensor::new(plus.valence(), plus.dim(), comps)
}
