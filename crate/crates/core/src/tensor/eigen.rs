//! Eigendecomposition of operators that are symmetric with respect to a metric.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub const SYMMETRY_TOLERANCE: f64 = 1e-8;

/// Relative gap under which two eigenvalues are treated as one eigenspace.
const TIE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct EigenPairs {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `k` is the metric-unit eigenvector for `values[k]`.
    pub vectors: DMatrix<f64>,
}

impl EigenPairs {
    pub fn vector(&self, k: usize) -> DVector<f64> {
        self.vectors.column(k).into_owned()
    }
}

/// Largest entry of `GA - (GA)ᵀ`.
pub fn symmetry_residual(op: &DMatrix<f64>, metric: &DMatrix<f64>) -> f64 {
    let ga = metric * op;
    (&ga - ga.transpose()).amax()
}

/// Real eigenpairs of `op`, orthonormal for `metric`, eigenvalues descending.
///
/// Inside a repeated eigenvalue the basis is fixed by projecting the frame
/// vectors onto the eigenspace in frame order and orthonormalizing them, then
/// making the first nonnegligible component of each vector positive.
pub fn sym_eigen(op: &DMatrix<f64>, metric: &DMatrix<f64>) -> Result<EigenPairs> {
    let d = op.nrows();
    if op.ncols() != d || metric.nrows() != d || metric.ncols() != d {
        return Err(Error::Dimension {
            expected: d,
            got: metric.nrows(),
        });
    }
    if (metric - metric.transpose()).amax() > SYMMETRY_TOLERANCE {
        return Err(Error::NotPositiveDefinite);
    }
    let residual = symmetry_residual(op, metric);
    if residual > SYMMETRY_TOLERANCE {
        return Err(Error::NotSymmetric { residual });
    }
    let chol = metric.clone().cholesky().ok_or(Error::NotPositiveDefinite)?;
    let l = chol.l();
    let l_inv_t = l
        .clone()
        .try_inverse()
        .ok_or(Error::NotPositiveDefinite)?
        .transpose();
    // G A = Lᵀ-congruent symmetric form: M = Lᵀ A L⁻ᵀ
    let m = l.transpose() * op * &l_inv_t;
    let m = (&m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(m);

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let raw: Vec<DVector<f64>> = order
        .iter()
        .map(|&k| &l_inv_t * eig.eigenvectors.column(k))
        .collect();

    let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
    let mut vectors = DMatrix::zeros(d, d);
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && (values[end - 1] - values[end]).abs() <= TIE_TOLERANCE * scale {
            end += 1;
        }
        let oriented = orient_cluster(&raw[start..end], metric);
        for (k, v) in oriented.into_iter().enumerate() {
            vectors.set_column(start + k, &v);
        }
        start = end;
    }
    Ok(EigenPairs { values, vectors })
}

fn inner(metric: &DMatrix<f64>, a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    a.dot(&(metric * b))
}

fn orient_cluster(basis: &[DVector<f64>], metric: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let d = metric.nrows();
    let k = basis.len();
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(k);
    for a in 0..d {
        if out.len() == k {
            break;
        }
        let e = DVector::from_fn(d, |r, _| if r == a { 1.0 } else { 0.0 });
        // orthogonal projection of E_a onto the eigenspace
        let mut v = DVector::zeros(d);
        for b in basis {
            v += b * inner(metric, b, &e);
        }
        for u in &out {
            let c = inner(metric, u, &v);
            v -= u * c;
        }
        let n = inner(metric, &v, &v).max(0.0).sqrt();
        if n > 1e-6 {
            out.push(v / n);
        }
    }
    for v in &mut out {
        if let Some(first) = v.iter().copied().find(|c| c.abs() > 1e-12) {
            if first < 0.0 {
                *v = -v.clone();
            }
        }
    }
    out
}
