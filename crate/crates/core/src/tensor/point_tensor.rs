use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Components of an `(r, s)` tensor at one point, in the active frame.
///
/// Upper (contravariant) indices come first in the flattened layout; a (1,1)
/// tensor `A` stores `A^k_j` at `k * dim + j`, a (0,2) tensor `B` stores
/// `B_ij` at `i * dim + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTensor {
    valence: (usize, usize),
    dim: usize,
    components: Vec<f64>,
}

impl PointTensor {
    pub fn new(valence: (usize, usize), dim: usize, components: Vec<f64>) -> Result<Self> {
        let expected = dim.pow((valence.0 + valence.1) as u32);
        if components.len() != expected {
            return Err(Error::Dimension {
                expected,
                got: components.len(),
            });
        }
        Ok(PointTensor {
            valence,
            dim,
            components,
        })
    }

    pub fn scalar(dim: usize, value: f64) -> Self {
        PointTensor {
            valence: (0, 0),
            dim,
            components: vec![value],
        }
    }

    pub fn vector(v: &DVector<f64>) -> Self {
        PointTensor {
            valence: (1, 0),
            dim: v.len(),
            components: v.iter().copied().collect(),
        }
    }

    pub fn covector(v: &DVector<f64>) -> Self {
        PointTensor {
            valence: (0, 1),
            dim: v.len(),
            components: v.iter().copied().collect(),
        }
    }

    pub fn operator(m: &DMatrix<f64>) -> Self {
        Self::from_matrix((1, 1), m)
    }

    pub fn bilinear(m: &DMatrix<f64>) -> Self {
        Self::from_matrix((0, 2), m)
    }

    fn from_matrix(valence: (usize, usize), m: &DMatrix<f64>) -> Self {
        let dim = m.nrows();
        let components = (0..dim)
            .flat_map(|i| (0..dim).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)])
            .collect();
        PointTensor {
            valence,
            dim,
            components,
        }
    }

    pub fn valence(&self) -> (usize, usize) {
        self.valence
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn as_scalar(&self) -> Option<f64> {
        (self.valence == (0, 0)).then(|| self.components[0])
    }

    pub fn as_vector(&self) -> Option<DVector<f64>> {
        (self.valence.0 + self.valence.1 == 1).then(|| DVector::from_column_slice(&self.components))
    }

    pub fn as_matrix(&self) -> Option<DMatrix<f64>> {
        (self.valence.0 + self.valence.1 == 2)
            .then(|| DMatrix::from_row_slice(self.dim, self.dim, &self.components))
    }

    /// Largest absolute component difference; `None` when valences differ.
    pub fn max_abs_diff(&self, other: &PointTensor) -> Option<f64> {
        if self.valence != other.valence || self.dim != other.dim {
            return None;
        }
        Some(
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.components.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }
}
