//! Contact metric structures `(η, ξ, φ, g̃)` and the tensor `h = ½ L_ξ φ`.

mod basis;
mod checks;

pub use basis::{adapted_phi_basis, eigendistributions, phi_basis, AdaptedBasis};
pub use checks::{
    compute_h, contact_identity_report, k_contact_defect, validate_contact_metric, volume_form_value, HTensor,
    VOLUME_FLOOR,
};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::lie::{lie_derivative_bilinear, lie_derivative_operator};
use crate::tensor::{CovectorField, Field, FrameModel, OperatorField, VectorField};

/// Below this value of λ the structure is treated as Sasakian.
pub const SASAKIAN_THRESHOLD: f64 = 1e-6;

/// Every tensor of a contact metric structure at one point, in frame components.
#[derive(Clone, Debug, PartialEq)]
pub struct ContactPoint {
    pub eta: DVector<f64>,
    pub xi: DVector<f64>,
    /// Column `j` is `φ E_j`.
    pub phi: DMatrix<f64>,
    pub metric: DMatrix<f64>,
    /// `dη(E_i, E_j)`.
    pub d_eta: DMatrix<f64>,
    pub h: DMatrix<f64>,
    /// `L_ξ g̃`, absent for pointwise structures that carry no derivatives.
    pub lie_xi_metric: Option<DMatrix<f64>>,
}

impl ContactPoint {
    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    /// `n` with `dim = 2n + 1`.
    pub fn half_rank(&self) -> usize {
        (self.dim() - 1) / 2
    }

    pub fn inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.metric * y))
    }

    pub fn norm(&self, x: &DVector<f64>) -> f64 {
        self.inner(x, x).max(0.0).sqrt()
    }

    /// Projection `X - η(X) ξ` onto `Ker η`.
    pub fn horizontal_projector(&self) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim()) - &self.xi * self.eta.transpose()
    }
}

/// Anything that yields contact metric data at points: a frame model with
/// fields, or a single-tangent-space realization.
pub trait ContactGeometry {
    fn dim(&self) -> usize;

    fn point(&self, p: &[f64]) -> Result<ContactPoint>;

    /// The metric alone, cheaper than [`ContactGeometry::point`].
    fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>>;

    /// A point drawn from the sampling region. Homogeneous and pointwise
    /// structures return the same point every time.
    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64>;

    /// `true` when every point carries the same frame components.
    fn is_uniform(&self) -> bool;

    /// The structure as a curvature-capable model.
    fn as_model(&self) -> Result<&ContactMetricStructure>;

    /// `L_ξ h` at `p`, when the structure can differentiate.
    fn lie_xi_h(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.as_model()?.lie_xi_h(p)
    }
}

/// A contact metric structure on a frame model; the model's metric is `g̃`.
#[derive(Clone, Debug)]
pub struct ContactMetricStructure {
    model: FrameModel,
    eta: CovectorField,
    xi: VectorField,
    phi: OperatorField,
    sample_radius: f64,
}

impl ContactMetricStructure {
    pub fn new(model: FrameModel, eta: CovectorField, xi: VectorField, phi: OperatorField) -> Result<Self> {
        let d = model.dim();
        if d.is_multiple_of(2) || d < 3 {
            return Err(Error::InvalidModel(format!("contact manifolds have odd dimension >= 3, got {d}")));
        }
        if model.is_homogeneous() && !(eta.is_constant() && xi.is_constant() && phi.is_constant()) {
            return Err(Error::UnsupportedField(
                "homogeneous structures need constant eta, xi and phi".into(),
            ));
        }
        let p = model.origin();
        if model.check_point(&p).is_ok() {
            let (e, x, f) = (eta.at(&p), xi.at(&p), phi.at(&p));
            if e.len() != d || x.len() != d {
                return Err(Error::Dimension { expected: d, got: e.len().min(x.len()) });
            }
            if f.nrows() != d || f.ncols() != d {
                return Err(Error::Dimension { expected: d, got: f.nrows() });
            }
        }
        Ok(ContactMetricStructure {
            model,
            eta,
            xi,
            phi,
            sample_radius: 0.5,
        })
    }

    /// Half-width of the coordinate box around the origin that chart samples are drawn from.
    pub fn with_sample_radius(mut self, radius: f64) -> Self {
        self.sample_radius = radius;
        self
    }

    pub fn model(&self) -> &FrameModel {
        &self.model
    }

    pub fn eta(&self) -> &CovectorField {
        &self.eta
    }

    pub fn xi(&self) -> &VectorField {
        &self.xi
    }

    pub fn phi(&self) -> &OperatorField {
        &self.phi
    }

    pub fn metric(&self) -> &Field<DMatrix<f64>> {
        self.model.metric_field()
    }

    /// Same `(η, ξ, φ)` with different metric components.
    pub fn with_metric(&self, metric: Field<DMatrix<f64>>) -> Result<Self> {
        Ok(ContactMetricStructure {
            model: self.model.with_metric(metric)?,
            ..self.clone()
        })
    }

    /// Replaces every structure tensor.
    pub fn with_tensors(
        &self,
        eta: CovectorField,
        xi: VectorField,
        phi: OperatorField,
        metric: Field<DMatrix<f64>>,
    ) -> Result<Self> {
        let s = ContactMetricStructure::new(self.model.with_metric(metric)?, eta, xi, phi)?;
        Ok(s.with_sample_radius(self.sample_radius))
    }

    /// `dη` at `p`, with the convention `dη(X,Y) = ½(X η(Y) - Y η(X) - η([X,Y]))`.
    pub fn d_eta(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        let d = self.model.dim();
        let eta = self.eta.at(p);
        let deriv = self.model.frame_derivatives(&self.eta, p)?;
        let c = self.model.structure_at(p)?;
        Ok(DMatrix::from_fn(d, d, |i, j| {
            let bracket: f64 = (0..d).map(|k| eta[k] * c.get(k, i, j)).sum();
            0.5 * (deriv[i][j] - deriv[j][i] - bracket)
        }))
    }

    /// `h = ½ L_ξ φ` at `p`.
    pub fn h_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(lie_derivative_operator(&self.model, &self.xi, &self.phi, p)? * 0.5)
    }

    /// `h` as a field: constant in homogeneous mode, otherwise recomputed
    /// pointwise (points where it fails evaluate to NaN).
    pub fn h_field(&self) -> Result<OperatorField> {
        if self.model.is_homogeneous() {
            return Ok(Field::Constant(self.h_at(&self.model.origin())?));
        }
        let s = self.clone();
        let d = self.model.dim();
        Ok(Field::chart(move |q| {
            s.h_at(q).unwrap_or_else(|_| DMatrix::from_element(d, d, f64::NAN))
        }))
    }

    pub fn lie_xi_metric(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        lie_derivative_bilinear(&self.model, &self.xi, self.model.metric_field(), p)
    }

    /// `L_ξ h` at `p`. On a chart this differentiates twice, so the inner
    /// derivative uses the model step and the outer one ten times that.
    pub fn lie_xi_h(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        if self.model.is_homogeneous() {
            return lie_derivative_operator(&self.model, &self.xi, &self.h_field()?, p);
        }
        let outer = self.model.clone().with_fd_step(10.0 * self.model.fd_step());
        let s = self.clone();
        let d = self.model.dim();
        let h = Field::chart(move |q: &[f64]| {
            s.h_at(q).unwrap_or_else(|_| DMatrix::from_element(d, d, f64::NAN))
        });
        let out = lie_derivative_operator(&outer, &self.xi, &h, p)?;
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::OutsideChart { point: p.to_vec() });
        }
        Ok(out)
    }
}

impl ContactGeometry for ContactMetricStructure {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn point(&self, p: &[f64]) -> Result<ContactPoint> {
        let metric = self.model.metric_at(p)?;
        Ok(ContactPoint {
            eta: self.eta.at(p),
            xi: self.xi.at(p),
            phi: self.phi.at(p),
            metric,
            d_eta: self.d_eta(p)?,
            h: self.h_at(p)?,
            lie_xi_metric: Some(self.lie_xi_metric(p)?),
        })
    }

    fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.model.metric_at(p)
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let d = self.model.dim();
        if self.model.is_homogeneous() {
            return self.model.origin();
        }
        let r = self.sample_radius;
        (0..d).map(|_| rng.random_range(-r..=r)).collect()
    }

    fn is_uniform(&self) -> bool {
        self.model.is_homogeneous()
    }

    fn as_model(&self) -> Result<&ContactMetricStructure> {
        Ok(self)
    }
}
