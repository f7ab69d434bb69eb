//! Frame-represented manifold models.
//!
//! A [`FrameModel`] is either homogeneous (a constant frame with a constant
//! bracket table, e.g. a left-invariant frame on a Lie group) or a chart model
//! (frame vectors given by coordinate components on an open set of R^d). Every
//! tensor is carried by its components in that frame.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::field::{ChartFn, Field, FieldValue};
use crate::error::{Error, Result};

/// Default central-difference step for chart models.
pub const DEFAULT_FD_STEP: f64 = 1e-5;
/// Bracket-table antisymmetry and Jacobi tolerance for homogeneous models.
pub const BRACKET_TOLERANCE: f64 = 1e-10;

/// Bracket table `c^k_ij` with `[E_i, E_j] = c^k_ij E_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants {
    dim: usize,
    data: Vec<f64>,
}

impl StructureConstants {
    pub fn zeros(dim: usize) -> Self {
        StructureConstants {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    /// Builds a table from `[E_i, E_j] = value * E_k` entries; the `(j, i)`
    /// entry is filled in antisymmetrically.
    pub fn from_brackets(dim: usize, entries: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut c = Self::zeros(dim);
        for &(i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidModel(format!(
                    "bracket index ({i}, {j}, {k}) out of range for dimension {dim}"
                )));
            }
            if i == j {
                return Err(Error::InvalidModel(format!("[E_{i}, E_{i}] must vanish")));
            }
            *c.get_mut(k, i, j) += v;
            *c.get_mut(k, j, i) -= v;
        }
        Ok(c)
    }

    fn index(&self, k: usize, i: usize, j: usize) -> usize {
        (k * self.dim + i) * self.dim + j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `c^k_ij`
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[self.index(k, i, j)]
    }

    pub fn get_mut(&mut self, k: usize, i: usize, j: usize) -> &mut f64 {
        let idx = self.index(k, i, j);
        &mut self.data[idx]
    }

    /// Components of `[X, Y]` for constant-coefficient `X`, `Y`.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        DVector::from_fn(d, |k, _| {
            let mut s = 0.0;
            for i in 0..d {
                if x[i] == 0.0 {
                    continue;
                }
                for j in 0..d {
                    s += x[i] * y[j] * self.get(k, i, j);
                }
            }
            s
        })
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let d = self.dim;
        let mut r: f64 = 0.0;
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    r = r.max((self.get(k, i, j) + self.get(k, j, i)).abs());
                }
            }
        }
        r
    }

    /// Max over frame triples of `|[[E_i,E_j],E_k] + [[E_j,E_k],E_i] + [[E_k,E_i],E_j]|`.
    pub fn jacobi_residual(&self) -> f64 {
        let d = self.dim;
        let e = |i: usize| DVector::from_fn(d, |r, _| if r == i { 1.0 } else { 0.0 });
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let a = self.bracket(&self.bracket(&e(i), &e(j)), &e(k));
                    let b = self.bracket(&self.bracket(&e(j), &e(k)), &e(i));
                    let c = self.bracket(&self.bracket(&e(k), &e(i)), &e(j));
                    worst = worst.max((a + b + c).amax());
                }
            }
        }
        worst
    }
}

#[derive(Clone)]
pub enum Frame {
    Homogeneous(StructureConstants),
    /// Column `a` of the matrix is the coordinate expression of `E_a`.
    Chart {
        frame: ChartFn<DMatrix<f64>>,
        domain: Option<Arc<dyn Fn(&[f64]) -> bool + Send + Sync>>,
    },
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Homogeneous(c) => f.debug_tuple("Homogeneous").field(c).finish(),
            Frame::Chart { domain, .. } => f
                .debug_struct("Chart")
                .field("bounded_domain", &domain.is_some())
                .finish_non_exhaustive(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FrameModel {
    dim: usize,
    frame: Frame,
    metric: Field<DMatrix<f64>>,
    fd_step: f64,
}

impl FrameModel {
    /// Homogeneous model: constant bracket table and a constant metric in the frame.
    pub fn homogeneous(constants: StructureConstants, metric: DMatrix<f64>) -> Result<Self> {
        let dim = constants.dim();
        let model = FrameModel {
            dim,
            frame: Frame::Homogeneous(constants),
            metric: Field::Constant(metric),
            fd_step: DEFAULT_FD_STEP,
        };
        model.check_invariants()?;
        Ok(model)
    }

    /// Chart model on an open subset of R^dim.
    pub fn chart(
        dim: usize,
        frame: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
        metric: Field<DMatrix<f64>>,
    ) -> Self {
        FrameModel {
            dim,
            frame: Frame::Chart {
                frame: Arc::new(frame),
                domain: None,
            },
            metric,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    /// Chart model whose frame is the coordinate frame.
    pub fn coordinate_chart(dim: usize, metric: Field<DMatrix<f64>>) -> Self {
        Self::chart(dim, move |_| DMatrix::identity(dim, dim), metric)
    }

    pub fn with_domain(mut self, domain: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> Self {
        if let Frame::Chart { domain: d, .. } = &mut self.frame {
            *d = Some(Arc::new(domain));
        }
        self
    }

    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step = step;
        self
    }

    /// Same frame, new metric components.
    pub fn with_metric(&self, metric: Field<DMatrix<f64>>) -> Result<Self> {
        if self.is_homogeneous() && !metric.is_constant() {
            return Err(Error::UnsupportedField(
                "homogeneous models need a constant metric".into(),
            ));
        }
        Ok(FrameModel {
            metric,
            ..self.clone()
        })
    }

    fn check_invariants(&self) -> Result<()> {
        if let Frame::Homogeneous(c) = &self.frame {
            if c.antisymmetry_residual() > BRACKET_TOLERANCE {
                return Err(Error::InvalidModel("bracket table is not antisymmetric".into()));
            }
            let jac = c.jacobi_residual();
            if jac > BRACKET_TOLERANCE {
                return Err(Error::InvalidModel(format!(
                    "bracket table violates the Jacobi identity (residual {jac:.3e})"
                )));
            }
            let g = self.metric.at(&[]);
            if g.nrows() != self.dim || g.ncols() != self.dim {
                return Err(Error::Dimension {
                    expected: self.dim,
                    got: g.nrows(),
                });
            }
            if (&g - g.transpose()).amax() > BRACKET_TOLERANCE {
                return Err(Error::InvalidModel("metric components are not symmetric".into()));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.frame, Frame::Homogeneous(_))
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn metric_field(&self) -> &Field<DMatrix<f64>> {
        &self.metric
    }

    /// A canonical evaluation point: the origin of the chart (or the identity
    /// of the group in homogeneous mode, where points carry no data).
    pub fn origin(&self) -> Vec<f64> {
        vec![0.0; self.dim]
    }

    pub fn check_point(&self, p: &[f64]) -> Result<()> {
        match &self.frame {
            Frame::Homogeneous(_) => Ok(()),
            Frame::Chart { domain, .. } => {
                if p.len() != self.dim {
                    return Err(Error::Dimension {
                        expected: self.dim,
                        got: p.len(),
                    });
                }
                match domain {
                    Some(inside) if !inside(p) => Err(Error::OutsideChart { point: p.to_vec() }),
                    _ => Ok(()),
                }
            }
        }
    }

    pub fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        Ok(self.metric.at(p))
    }

    /// Coordinate matrix of the frame at `p` (identity in homogeneous mode).
    pub fn frame_matrix(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.check_point(p)?;
        Ok(match &self.frame {
            Frame::Homogeneous(_) => DMatrix::identity(self.dim, self.dim),
            Frame::Chart { frame, .. } => frame(p),
        })
    }

    /// Coordinate partial derivatives `∂_μ F` at `p` by central differences.
    fn coordinate_partials<T: FieldValue>(&self, f: &dyn Fn(&[f64]) -> T, p: &[f64], step: f64) -> Vec<T> {
        let mut out = Vec::with_capacity(self.dim);
        let mut q = p.to_vec();
        for mu in 0..self.dim {
            q[mu] = p[mu] + step;
            let plus = f(&q);
            q[mu] = p[mu] - step;
            let minus = f(&q);
            q[mu] = p[mu];
            let mut d = plus;
            d.add_scaled(&minus, -1.0);
            let mut scaled = d.zeros_like();
            scaled.add_scaled(&d, 0.5 / step);
            out.push(scaled);
        }
        out
    }

    /// Derivatives `E_a(F)` of a field along every frame vector at `p`.
    pub fn frame_derivatives<T: FieldValue>(&self, field: &Field<T>, p: &[f64]) -> Result<Vec<T>> {
        self.frame_derivatives_with_step(field, p, self.fd_step)
    }

    pub(crate) fn frame_derivatives_with_step<T: FieldValue>(
        &self,
        field: &Field<T>,
        p: &[f64],
        step: f64,
    ) -> Result<Vec<T>> {
        self.check_point(p)?;
        match field {
            Field::Constant(v) => Ok(vec![v.zeros_like(); self.dim]),
            Field::Jet {
                frame_derivatives, ..
            } => {
                if frame_derivatives.len() != self.dim {
                    return Err(Error::Dimension {
                        expected: self.dim,
                        got: frame_derivatives.len(),
                    });
                }
                Ok(frame_derivatives.clone())
            }
            Field::Chart(f) => {
                if self.is_homogeneous() {
                    return Err(Error::UnsupportedField(
                        "chart fields cannot be differentiated on a homogeneous model".into(),
                    ));
                }
                let partials = self.coordinate_partials(f.as_ref(), p, step);
                Ok(self.partials_to_frame(&partials, p))
            }
        }
    }

    pub(crate) fn frame_derivatives_of_fn<T: FieldValue>(
        &self,
        f: &dyn Fn(&[f64]) -> T,
        p: &[f64],
        step: f64,
    ) -> Result<Vec<T>> {
        if self.is_homogeneous() {
            return Err(Error::UnsupportedField(
                "chart functions cannot be differentiated on a homogeneous model".into(),
            ));
        }
        let partials = self.coordinate_partials(f, p, step);
        Ok(self.partials_to_frame(&partials, p))
    }

    fn partials_to_frame<T: FieldValue>(&self, partials: &[T], p: &[f64]) -> Vec<T> {
        let e = match &self.frame {
            Frame::Chart { frame, .. } => frame(p),
            Frame::Homogeneous(_) => DMatrix::identity(self.dim, self.dim),
        };
        (0..self.dim)
            .map(|a| {
                let mut acc = partials[0].zeros_like();
                for (mu, d) in partials.iter().enumerate() {
                    let w = e[(mu, a)];
                    if w != 0.0 {
                        acc.add_scaled(d, w);
                    }
                }
                acc
            })
            .collect()
    }

    /// Derivative of a field along the tangent vector with frame components `dir`.
    pub fn derivative<T: FieldValue>(&self, field: &Field<T>, dir: &DVector<f64>, p: &[f64]) -> Result<T> {
        let derivs = self.frame_derivatives(field, p)?;
        let mut acc = derivs[0].zeros_like();
        for (a, d) in derivs.iter().enumerate() {
            if dir[a] != 0.0 {
                acc.add_scaled(d, dir[a]);
            }
        }
        Ok(acc)
    }

    /// Structure functions at `p`: the constant table in homogeneous mode,
    /// `e^{-1}(E_a(e_b) - E_b(e_a))` on a chart.
    pub fn structure_at(&self, p: &[f64]) -> Result<StructureConstants> {
        self.check_point(p)?;
        match &self.frame {
            Frame::Homogeneous(c) => Ok(c.clone()),
            Frame::Chart { frame, .. } => {
                let d = self.dim;
                let e = frame(p);
                let de = self.frame_derivatives_of_fn(frame.as_ref(), p, self.fd_step)?;
                let e_inv = e
                    .clone()
                    .try_inverse()
                    .ok_or_else(|| Error::InvalidModel(format!("frame is degenerate at {p:?}")))?;
                let mut c = StructureConstants::zeros(d);
                for a in 0..d {
                    for b in 0..d {
                        // coordinate components of [E_a, E_b]
                        let v = DVector::from_fn(d, |mu, _| de[a][(mu, b)] - de[b][(mu, a)]);
                        let w = &e_inv * v;
                        for k in 0..d {
                            *c.get_mut(k, a, b) = w[k];
                        }
                    }
                }
                Ok(c)
            }
        }
    }

    /// Coordinate vector of the tangent vector with frame components `v`.
    pub fn to_coordinates(&self, v: &DVector<f64>, p: &[f64]) -> Result<DVector<f64>> {
        Ok(self.frame_matrix(p)? * v)
    }

    /// Checks symmetry and positive definiteness of the metric at `p`.
    pub fn check_riemannian_at(&self, p: &[f64]) -> Result<()> {
        let g = self.metric_at(p)?;
        if (&g - g.transpose()).amax() > BRACKET_TOLERANCE {
            return Err(Error::InvalidModel("metric components are not symmetric".into()));
        }
        if g.cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(())
    }
}
