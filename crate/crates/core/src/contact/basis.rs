use nalgebra::{DMatrix, DVector};

use super::{ContactPoint, SASAKIAN_THRESHOLD};
use crate::error::{Error, Result};
use crate::tensor::sym_eigen;

const SEED_TOLERANCE: f64 = 1e-8;

/// Orthonormal basis `{e_1..e_n, φe_1..φe_n}` of `Ker η`.
///
/// Without a seed, `e_1` is the first frame vector whose projection to
/// `Ker η` is nonzero, normalized. Later `e_k` come from the next frame
/// vectors, projected off everything chosen so far.
pub fn phi_basis(cp: &ContactPoint, seed: Option<&DVector<f64>>) -> Result<Vec<DVector<f64>>> {
    let d = cp.dim();
    if d.is_multiple_of(2) {
        return Err(Error::InvalidModel(format!("dimension {d} is even")));
    }
    let n = cp.half_rank();
    let proj = cp.horizontal_projector();
    let mut es: Vec<DVector<f64>> = Vec::with_capacity(n);
    let mut phis: Vec<DVector<f64>> = Vec::with_capacity(n);

    if let Some(s) = seed {
        if s.len() != d {
            return Err(Error::Dimension { expected: d, got: s.len() });
        }
        let eta = cp.eta.dot(s);
        if eta.abs() > SEED_TOLERANCE {
            return Err(Error::InvalidSeed(format!("eta(seed) = {eta}, expected 0")));
        }
        let norm = cp.norm(s);
        if (norm - 1.0).abs() > SEED_TOLERANCE {
            return Err(Error::InvalidSeed(format!("|seed| = {norm}, expected 1")));
        }
        phis.push(&cp.phi * s);
        es.push(s.clone());
    }

    let mut a = 0;
    while es.len() < n {
        if a == d {
            return Err(Error::InvalidModel("frame does not span Ker(eta)".into()));
        }
        let mut v = proj.column(a).into_owned();
        a += 1;
        for u in es.iter().chain(phis.iter()) {
            let c = cp.inner(u, &v);
            v -= u * c;
        }
        let norm = cp.norm(&v);
        if norm > 1e-6 {
            let e = v / norm;
            phis.push(&cp.phi * &e);
            es.push(e);
        }
    }
    es.extend(phis);
    Ok(es)
}

/// Bases of the `±λ` eigenspaces of `h` in `Ker η`, as `(D(λ), D(-λ))`.
pub fn eigendistributions(cp: &ContactPoint) -> Result<(Vec<DVector<f64>>, Vec<DVector<f64>>)> {
    let d = cp.dim();
    let n = cp.half_rank();
    let eig = sym_eigen(&cp.h, &cp.metric)?;
    let lambda = eig.values[0];
    if lambda < SASAKIAN_THRESHOLD {
        return Err(Error::SasakianDegenerate { lambda: lambda.max(0.0) });
    }
    let pos = (0..n).map(|k| eig.vector(k)).collect();
    let neg = (d - n..d).map(|k| eig.vector(k)).collect();
    Ok((pos, neg))
}

/// A φ-basis adapted to `h`: `e_i` spans `D(λ)` and `φe_i` spans `D(-λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedBasis {
    pub lambda: f64,
    pub e: Vec<DVector<f64>>,
    pub phi_e: Vec<DVector<f64>>,
}

impl AdaptedBasis {
    pub fn n(&self) -> usize {
        self.e.len()
    }

    /// Columns `e_1..e_n, φe_1..φe_n`.
    pub fn horizontal_matrix(&self) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.e.iter().chain(&self.phi_e).cloned().collect();
        DMatrix::from_columns(&cols)
    }

    /// Columns `e_1..e_n, φe_1..φe_n, ξ`.
    pub fn full_matrix(&self, xi: &DVector<f64>) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self.e.iter().chain(&self.phi_e).chain(std::iter::once(xi)).cloned().collect();
        DMatrix::from_columns(&cols)
    }
}

pub fn adapted_phi_basis(cp: &ContactPoint) -> Result<AdaptedBasis> {
    let (pos, _) = eigendistributions(cp)?;
    let eig = sym_eigen(&cp.h, &cp.metric)?;
    let phi_e = pos.iter().map(|e| &cp.phi * e).collect();
    Ok(AdaptedBasis {
        lambda: eig.values[0],
        e: pos,
        phi_e,
    })
}
