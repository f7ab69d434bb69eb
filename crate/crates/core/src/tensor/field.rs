//! Tensor fields expressed by their components in the active frame.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Values a field can take at a point: scalars, component vectors, component matrices.
pub trait FieldValue: Clone + Send + Sync + 'static {
    fn zeros_like(&self) -> Self;
    /// `self += s * other`
    fn add_scaled(&mut self, other: &Self, s: f64);
}

impl FieldValue for f64 {
    fn zeros_like(&self) -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        *self += s * other;
    }
}

impl FieldValue for DVector<f64> {
    fn zeros_like(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        self.axpy(s, other, 1.0);
    }
}

impl FieldValue for DMatrix<f64> {
    fn zeros_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn add_scaled(&mut self, other: &Self, s: f64) {
        *self += other * s;
    }
}

pub type ChartFn<T> = Arc<dyn Fn(&[f64]) -> T + Send + Sync>;

/// A field known through its frame components.
///
/// `Constant` fields are invariant under the frame (left-invariant tensors in
/// homogeneous mode, constant-coefficient fields on a chart). `Jet` carries the
/// value and the derivatives along each frame vector at the evaluation point
/// only; it is how a non-invariant germ is fed to the exact homogeneous
/// formulas. `Chart` fields are arbitrary functions of chart coordinates and
/// are differentiated by central differences.
#[derive(Clone)]
pub enum Field<T: FieldValue> {
    Constant(T),
    Jet { value: T, frame_derivatives: Vec<T> },
    Chart(ChartFn<T>),
}

pub type ScalarField = Field<f64>;
pub type VectorField = Field<DVector<f64>>;
pub type CovectorField = Field<DVector<f64>>;
/// (1,1) tensor: column `j` holds the components of `A E_j`.
pub type OperatorField = Field<DMatrix<f64>>;
/// (0,2) tensor: entry `(i, j)` is `B(E_i, E_j)`.
pub type BilinearField = Field<DMatrix<f64>>;

impl<T: FieldValue> Field<T> {
    pub fn chart(f: impl Fn(&[f64]) -> T + Send + Sync + 'static) -> Self {
        Field::Chart(Arc::new(f))
    }

    pub fn at(&self, p: &[f64]) -> T {
        match self {
            Field::Constant(v) => v.clone(),
            Field::Jet { value, .. } => value.clone(),
            Field::Chart(f) => f(p),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Field::Constant(_))
    }

    pub fn is_chart(&self) -> bool {
        matches!(self, Field::Chart(_))
    }

    /// Pointwise combination of two fields. Constant inputs give a constant
    /// output; any chart input gives a chart output.
    pub fn combine<U, V>(
        &self,
        other: &Field<U>,
        f: impl Fn(&T, &U) -> V + Send + Sync + 'static,
    ) -> Result<Field<V>>
    where
        U: FieldValue,
        V: FieldValue,
    {
        match (self, other) {
            (Field::Jet { .. }, _) | (_, Field::Jet { .. }) => Err(Error::UnsupportedField(
                "jet fields cannot be combined into new fields".into(),
            )),
            (Field::Constant(a), Field::Constant(b)) => Ok(Field::Constant(f(a, b))),
            _ => {
                let a = self.clone();
                let b = other.clone();
                Ok(Field::chart(move |p| f(&a.at(p), &b.at(p))))
            }
        }
    }

    pub fn map<V: FieldValue>(&self, f: impl Fn(&T) -> V + Send + Sync + 'static) -> Result<Field<V>> {
        match self {
            Field::Constant(a) => Ok(Field::Constant(f(a))),
            Field::Jet { .. } => Err(Error::UnsupportedField(
                "jet fields cannot be mapped into new fields".into(),
            )),
            Field::Chart(g) => {
                let g = g.clone();
                Ok(Field::chart(move |p| f(&g(p))))
            }
        }
    }
}

impl<T: FieldValue + fmt::Debug> fmt::Debug for Field<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Field::Jet { value, .. } => f.debug_struct("Jet").field("value", value).finish_non_exhaustive(),
            Field::Chart(_) => f.write_str("Chart(<fn>)"),
        }
    }
}
