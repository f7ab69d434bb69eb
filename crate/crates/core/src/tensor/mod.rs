//! Pointwise tensor algebra and differential operators over frame models.

pub mod connection;
pub mod eigen;
pub mod field;
pub mod frame;
pub mod lie;
pub mod point_tensor;

pub use connection::{
    covariant_derivative, curvature_tensor, levi_civita, metric_compatibility_residual, riemann_curvature,
    torsion_residual, Christoffel, CurvatureTensor,
};
pub use eigen::{sym_eigen, symmetry_residual, EigenPairs};
pub use field::{BilinearField, CovectorField, Field, FieldValue, OperatorField, ScalarField, VectorField};
pub use frame::{Frame, FrameModel, StructureConstants, DEFAULT_FD_STEP};
pub use lie::{lie_bracket, lie_derivative, lie_derivative_by_flow, TensorField};
pub use point_tensor::PointTensor;
