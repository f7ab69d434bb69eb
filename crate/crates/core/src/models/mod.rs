//! Concrete structures: the left-invariant Milnor family, Heisenberg charts,
//! pointwise normal forms, and homothetic deformations.

mod config;
mod homothety;
mod synthetic;

pub use config::{load_model_config, parse_model_config, ConfigFormat, ModelConfig, ModelKind};
pub use homothety::{apply_d_homothety, Structure};
pub use synthetic::SyntheticPointStructure;

use nalgebra::{DMatrix, DVector};

use crate::contact::ContactMetricStructure;
use crate::error::Result;
use crate::tensor::{Field, FrameModel, StructureConstants};

fn reeb_covector() -> DVector<f64> {
    DVector::from_vec(vec![1.0, 0.0, 0.0])
}

/// `φ E_1 = 0, φ E_2 = E_3, φ E_3 = -E_2`.
fn planar_phi() -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0])
}

/// Left-invariant structure on the 3-dimensional group with orthonormal frame
/// `E_1 = ξ, E_2, E_3` and brackets
/// `[E_2,E_3] = 2E_1`, `[E_3,E_1] = λ₂E_2`, `[E_1,E_2] = λ₃E_3`.
pub fn milnor(lambda2: f64, lambda3: f64) -> Result<ContactMetricStructure> {
    let c = StructureConstants::from_brackets(3, &[(1, 2, 0, 2.0), (2, 0, 1, lambda2), (0, 1, 2, lambda3)])?;
    let model = FrameModel::homogeneous(c, DMatrix::identity(3, 3))?;
    ContactMetricStructure::new(
        model,
        Field::Constant(reeb_covector()),
        Field::Constant(reeb_covector()),
        Field::Constant(planar_phi()),
    )
}

/// The Sasakian control: the Heisenberg group, `milnor(0, 0)`.
pub fn heisenberg() -> Result<ContactMetricStructure> {
    milnor(0.0, 0.0)
}

/// Coordinate frame of the Heisenberg group on `(x, y, z)`:
/// `E_1 = ∂_z`, `E_2 = ∂_x - y∂_z`, `E_3 = ∂_y + x∂_z`.
fn heisenberg_frame(p: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, -p[1], p[0]])
}

/// The Heisenberg structure on a chart, differentiated by finite differences.
pub fn heisenberg_chart() -> Result<ContactMetricStructure> {
    let model = FrameModel::chart(3, heisenberg_frame, Field::Constant(DMatrix::identity(3, 3)));
    ContactMetricStructure::new(
        model,
        Field::Constant(reeb_covector()),
        Field::Constant(reeb_covector()),
        Field::Constant(planar_phi()),
    )
}

/// Heisenberg frame with the contact plane metric sheared along `z`:
/// `g̃ = 1 ⊕ diag(e^{sz}, e^{-sz})`, and `φ` adjusted so that the structure
/// stays contact metric. It is not K-contact for `s ≠ 0`.
pub fn sheared_heisenberg_chart(shear: f64) -> Result<ContactMetricStructure> {
    let metric = Field::chart(move |p: &[f64]| {
        let t = shear * p[2];
        DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, t.exp(), (-t).exp()]))
    });
    let phi = Field::chart(move |p: &[f64]| {
        let t = shear * p[2];
        DMatrix::from_row_slice(3, 3, &[0.0, 0.0, 0.0, 0.0, 0.0, -(-t).exp(), 0.0, t.exp(), 0.0])
    });
    let model = FrameModel::chart(3, heisenberg_frame, metric);
    ContactMetricStructure::new(
        model,
        Field::Constant(reeb_covector()),
        Field::Constant(reeb_covector()),
        phi,
    )
}

/// Round unit 2-sphere in stereographic coordinates, `g = 4/(1+x²+y²)² δ`.
pub fn stereographic_sphere() -> FrameModel {
    FrameModel::coordinate_chart(
        2,
        Field::chart(|p: &[f64]| {
            let s = 1.0 + p[0] * p[0] + p[1] * p[1];
            DMatrix::identity(2, 2) * (4.0 / (s * s))
        }),
    )
}
