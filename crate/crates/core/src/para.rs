//! The semi-Riemannian regime `|I| < 1`: error tensors with eigenvalue pairs
//! on the line and the hyperbola `(1-λ)(1-λ') = -1`, and the `2^n` almost
//! para-Kähler structures `(F_S, g_S)`.
//!
//! Everything is built pointwise in an adapted φ-basis `f_1..f_n, f_{n+1}..f_{2n}`
//! with `f_i ∈ D(λ)` and `f_{n+i} = φf_i`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::base::{line_residual, HORIZONTAL_TOLERANCE};
use crate::contact::{adapted_phi_basis, AdaptedBasis, ContactGeometry, ContactPoint, SASAKIAN_THRESHOLD};
use crate::error::{Error, Result};
use crate::nullity::NullityFit;
use crate::report::ResidualReport;

/// Gram eigenvalues below this in magnitude count as zero.
pub const SIGNATURE_THRESHOLD: f64 = 1e-10;

/// Eigenvalues this close to 1 are refused.
const UNIT_EIGENVALUE_GUARD: f64 = 1e-12;

fn para_index(index: f64) -> Result<f64> {
    if !index.is_finite() || index.abs() >= 1.0 {
        return Err(Error::Infeasible(format!(
            "para descent needs |I| < 1, got I = {index}"
        )));
    }
    Ok(index)
}

/// `√((1+I)/(1-I))`.
pub fn para_ratio(index: f64) -> Result<f64> {
    let index = para_index(index)?;
    Ok(((1.0 + index) / (1.0 - index)).sqrt())
}

/// `(1-λ)(1-λ') + 1`.
pub fn para_hyperbola_residual(lam: f64, lam_dual: f64) -> f64 {
    (1.0 - lam) * (1.0 - lam_dual) + 1.0
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntersectionPoints {
    pub p1: (f64, f64),
    pub p2: (f64, f64),
}

/// The two points where the line meets the hyperbola.
pub fn para_intersection_points(index: f64) -> Result<IntersectionPoints> {
    let a0 = para_ratio(index)?;
    let inv = ((1.0 - index) / (1.0 + index)).sqrt();
    Ok(IntersectionPoints {
        p1: (1.0 + a0, 1.0 - inv),
        p2: (1.0 - a0, 1.0 + inv),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointChoice {
    P1,
    P2,
}

/// The choice per index encoded by a subset bitmask: `p₁` on the subset.
pub fn choices_from_mask(n: usize, mask: u64) -> Vec<PointChoice> {
    (0..n)
        .map(|i| if mask >> i & 1 == 1 { PointChoice::P1 } else { PointChoice::P2 })
        .collect()
}

/// An error tensor of the semi-Riemannian regime at one point.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiErrorTensor {
    pub index: f64,
    /// `λ_1..λ_{2n}` in the adapted basis.
    pub eigenvalues: Vec<f64>,
    /// Frame matrix, extended by `Tξ = 0`.
    pub t: DMatrix<f64>,
    basis: DMatrix<f64>,
}

impl SemiErrorTensor {
    pub fn n(&self) -> usize {
        self.eigenvalues.len() / 2
    }

    /// Gram matrix of `g(X,Y) = g̃(X - TX, Y)` in the adapted basis.
    pub fn recovered_metric(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.eigenvalues.len(),
            self.eigenvalues.iter().map(|l| 1.0 - l),
        ))
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Line and hyperbola residuals per pair, and the distance of the
    /// spectrum from 1.
    pub fn eigenvalue_report(&self, tolerance: f64) -> ResidualReport {
        let n = self.n();
        let mut r = ResidualReport::new();
        for i in 0..n {
            let (l, m) = (self.eigenvalues[i], self.eigenvalues[n + i]);
            r.upper("line", line_residual(self.index, l, m).abs(), tolerance);
            r.upper("hyperbola", para_hyperbola_residual(l, m).abs(), tolerance);
        }
        let gap = self.eigenvalues.iter().map(|l| (l - 1.0).abs()).fold(f64::INFINITY, f64::min);
        r.lower("unit_eigenvalue_gap", gap, UNIT_EIGENVALUE_GUARD);
        r
    }
}

/// Frame matrix of the operator with basis matrix `m`, for a `g̃`-orthonormal
/// horizontal basis `q`: `q m qᵀ G`.
fn operator_in_frame(cp: &ContactPoint, q: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    q * m * q.transpose() * &cp.metric
}

/// Frame matrix of the bilinear form with Gram matrix `m` in the basis `q`.
fn bilinear_in_frame(cp: &ContactPoint, q: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    let dual = q.transpose() * &cp.metric;
    dual.transpose() * m * dual
}

/// `T` with the given eigenvalue pairs `(λ_i, λ_{n+i})`.
///
/// Any horizontal vector has positive length for `g̃`, so a base metric with
/// a vector of negative length cannot come from a semi-Riemannian submersion
/// whose total space carries `g̃`:
///
/// ```
/// use kappa_mu::contact::{adapted_phi_basis, ContactGeometry};
/// use kappa_mu::models::SyntheticPointStructure;
/// use kappa_mu::para::{para_intersection_points, semi_error_tensor_from_pairs};
///
/// let s = SyntheticPointStructure::new(2, 0.0, 2.0).unwrap();
/// let cp = s.point(&[]).unwrap();
/// let basis = adapted_phi_basis(&cp).unwrap();
/// let pts = para_intersection_points(0.0).unwrap();
/// let t = semi_error_tensor_from_pairs(&cp, &basis, 0.0, &[pts.p1, pts.p1]).unwrap();
/// let q = t.basis();
/// let tilde = q.transpose() * &cp.metric * q;
/// assert!(tilde.symmetric_eigen().eigenvalues.min() > 0.0);
/// assert!(t.recovered_metric().symmetric_eigen().eigenvalues.min() < 0.0);
/// ```
pub fn semi_error_tensor_from_pairs(
    cp: &ContactPoint,
    basis: &AdaptedBasis,
    index: f64,
    pairs: &[(f64, f64)],
) -> Result<SemiErrorTensor> {
    let index = para_index(index)?;
    let n = basis.n();
    if pairs.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: pairs.len(),
        });
    }
    let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).chain(pairs.iter().map(|p| p.1)).collect();
    if let Some(l) = eigenvalues.iter().find(|l| (*l - 1.0).abs() < UNIT_EIGENVALUE_GUARD) {
        return Err(Error::Infeasible(format!(
            "error tensor cannot have eigenvalue 1 (got {l}): the base metric would degenerate"
        )));
    }
    let q = basis.horizontal_matrix();
    let diag = DMatrix::from_diagonal(&DVector::from_vec(eigenvalues.clone()));
    Ok(SemiErrorTensor {
        index,
        t: operator_in_frame(cp, &q, &diag),
        eigenvalues,
        basis: q,
    })
}

/// `T` for a choice of `p₁` or `p₂` per index.
pub fn semi_error_tensor(
    cp: &ContactPoint,
    basis: &AdaptedBasis,
    index: f64,
    choice: &[PointChoice],
) -> Result<SemiErrorTensor> {
    let pts = para_intersection_points(index)?;
    let pairs: Vec<(f64, f64)> = choice
        .iter()
        .map(|c| match c {
            PointChoice::P1 => pts.p1,
            PointChoice::P2 => pts.p2,
        })
        .collect();
    semi_error_tensor_from_pairs(cp, basis, index, &pairs)
}

/// One almost para-Kähler structure `(F_S, g_S)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParaSolution {
    /// Bit `i` set when `i+1 ∈ S`.
    pub subset: u64,
    pub n: usize,
    pub a0: f64,
    /// `F_S` in the adapted basis.
    pub f_basis: DMatrix<f64>,
    /// `g_S` in the adapted basis.
    pub g_basis: DMatrix<f64>,
    /// `F_S` as a frame matrix, zero on `ξ`.
    pub f: DMatrix<f64>,
    /// `g_S` as a frame matrix, zero on `ξ`.
    pub g: DMatrix<f64>,
    eta: DVector<f64>,
}

impl ParaSolution {
    pub fn contains(&self, i: usize) -> bool {
        self.subset >> i & 1 == 1
    }

    /// Members of `S`, numbered from 1.
    pub fn members(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.contains(i)).map(|i| i + 1).collect()
    }

    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let e = self.eta.dot(x);
        if e.abs() > HORIZONTAL_TOLERANCE * x.amax().max(1.0) {
            return Err(Error::NotHorizontal { eta: e });
        }
        Ok(&self.f * x)
    }

    /// `(positive, negative, zero)` eigenvalue counts of `g_S`.
    pub fn signature(&self) -> (usize, usize, usize) {
        signature(&self.g_basis)
    }
}

/// Sign counts of a symmetric matrix's eigenvalues.
pub fn signature(m: &DMatrix<f64>) -> (usize, usize, usize) {
    let eig = SymmetricEigen::new((m + m.transpose()) * 0.5).eigenvalues;
    eig.iter().fold((0, 0, 0), |(p, n, z), &v| {
        if v > SIGNATURE_THRESHOLD {
            (p + 1, n, z)
        } else if v < -SIGNATURE_THRESHOLD {
            (p, n + 1, z)
        } else {
            (p, n, z + 1)
        }
    })
}

fn para_solution(cp: &ContactPoint, q: &DMatrix<f64>, n: usize, a0: f64, mask: u64) -> ParaSolution {
    let mut f = DMatrix::zeros(2 * n, 2 * n);
    let mut g = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let sign = if mask >> i & 1 == 1 { 1.0 } else { -1.0 };
        f[(n + i, i)] = sign * a0;
        f[(i, n + i)] = sign / a0;
        g[(i, i)] = -sign * a0;
        g[(n + i, n + i)] = sign / a0;
    }
    ParaSolution {
        subset: mask,
        n,
        a0,
        f: operator_in_frame(cp, q, &f),
        g: bilinear_in_frame(cp, q, &g),
        f_basis: f,
        g_basis: g,
        eta: cp.eta.clone(),
    }
}

/// All `2^n` structures, in increasing bitmask order.
pub fn enumerate_para_solutions(cp: &ContactPoint, basis: &AdaptedBasis, index: f64) -> Result<Vec<ParaSolution>> {
    let a0 = para_ratio(index)?;
    let n = basis.n();
    if n >= 64 {
        return Err(Error::param("n", "too large to enumerate"));
    }
    let q = basis.horizontal_matrix();
    Ok((0..1u64 << n).map(|mask| para_solution(cp, &q, n, a0, mask)).collect())
}

fn para_fit_index(fit: &NullityFit) -> Result<f64> {
    if fit.lambda < SASAKIAN_THRESHOLD {
        return Err(Error::SasakianDegenerate { lambda: fit.lambda });
    }
    para_index(fit.index.ok_or(Error::SasakianDegenerate { lambda: fit.lambda })?)
}

/// Enumerates the structures at `p` using the adapted basis there.
pub fn para_solutions_at<G: ContactGeometry + ?Sized>(geom: &G, p: &[f64], fit: &NullityFit) -> Result<Vec<ParaSolution>> {
    let index = para_fit_index(fit)?;
    let cp = geom.point(p)?;
    let basis = adapted_phi_basis(&cp)?;
    enumerate_para_solutions(&cp, &basis, index)
}

/// `ω = dη` restricted to the adapted basis.
pub fn omega_in_basis(cp: &ContactPoint, basis: &AdaptedBasis) -> DMatrix<f64> {
    let q = basis.horizontal_matrix();
    q.transpose() * &cp.d_eta * q
}

/// `F² - I`, `ω - g(·, F·)`, signature `(n, n)` and nondegeneracy.
pub fn para_compatibility_report(sol: &ParaSolution, omega: &DMatrix<f64>, tolerance: f64) -> ResidualReport {
    let dim = 2 * sol.n;
    let mut r = ResidualReport::new();
    let f = &sol.f_basis;
    r.upper("f_squared", (f * f - DMatrix::identity(dim, dim)).amax(), tolerance);
    r.upper("omega_compatible", (omega - &sol.g_basis * f).amax(), tolerance);
    let (pos, neg, zero) = sol.signature();
    let off = pos.abs_diff(sol.n) + neg.abs_diff(sol.n) + zero;
    r.upper("signature", off as f64, 0.0);
    let smallest = SymmetricEigen::new(sol.g_basis.clone())
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .fold(f64::INFINITY, f64::min);
    r.lower("nondegenerate", smallest, SIGNATURE_THRESHOLD);
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn intersection_examples() {
        let p = para_intersection_points(0.0).unwrap();
        assert_eq!(p.p1, (2.0, 0.0));
        assert_eq!(p.p2, (0.0, 2.0));
        let p = para_intersection_points(0.6).unwrap();
        assert_abs_diff_eq!(p.p1.0, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.p1.1, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.p2.0, -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.p2.1, 1.5, epsilon = 1e-12);
        for i in [-0.9, -0.2, 0.0, 0.6, 0.9] {
            let p = para_intersection_points(i).unwrap();
            for (l, m) in [p.p1, p.p2] {
                assert!(line_residual(i, l, m).abs() < 1e-12);
                assert!(para_hyperbola_residual(l, m).abs() < 1e-12);
                assert!(l != 1.0 && m != 1.0);
            }
        }
        for i in [1.0, -1.0, 1.5] {
            assert!(matches!(para_intersection_points(i), Err(Error::Infeasible(_))));
        }
    }

    #[test]
    fn signature_counts() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, -1.0, 1e-12, 3.0]));
        assert_eq!(signature(&m), (2, 1, 1));
    }

    #[test]
    fn masks() {
        assert_eq!(choices_from_mask(3, 0b101), vec![PointChoice::P1, PointChoice::P2, PointChoice::P1]);
    }
}
