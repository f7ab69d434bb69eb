//! The Riemannian regime `|I| > 1`: error tensors, the canonical base metric
//! and complex structure, conformal rigidity, and the Sasakian lift.
//!
//! Base objects live upstairs as horizontal tensors that are invariant along
//! `ξ`; no quotient is constructed.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::contact::{k_contact_defect, ContactGeometry, ContactMetricStructure, ContactPoint, SASAKIAN_THRESHOLD};
use crate::error::{Error, Result};
use crate::nullity::{nullity_residual, NullityFit, INDEX_GUARD};
use crate::report::{ResidualReport, Tolerances};
use crate::sampling::{distinct_points, Sample};
use crate::tensor::lie::lie_derivative_operator;
use crate::tensor::lie::lie_derivative_bilinear;
use crate::tensor::{BilinearField, Field, OperatorField, ScalarField};

/// Vectors with `|η(X)|` above this are not horizontal.
pub const HORIZONTAL_TOLERANCE: f64 = 1e-10;

fn riemannian_index(index: f64) -> Result<f64> {
    if !index.is_finite() || index.abs() <= 1.0 + INDEX_GUARD {
        return Err(Error::Infeasible(format!(
            "Riemannian descent needs |I| > 1, got I = {index}"
        )));
    }
    Ok(index)
}

fn index_of(fit: &NullityFit) -> Result<f64> {
    if fit.lambda < SASAKIAN_THRESHOLD {
        return Err(Error::SasakianDegenerate { lambda: fit.lambda });
    }
    let index = fit.index.ok_or(Error::SasakianDegenerate { lambda: fit.lambda })?;
    riemannian_index(index)
}

/// `√((I+1)/(I-1))`, the ratio between the two eigenvalue gaps.
fn gap_ratio(index: f64) -> f64 {
    ((index + 1.0) / (index - 1.0)).sqrt()
}

/// Eigenvalues of the error tensor on `D(λ)` and `D(-λ)` for the pointwise
/// scale `e^{2f}`.
pub fn riemannian_eigenvalues(index: f64, scale: f64) -> Result<(f64, f64)> {
    let index = riemannian_index(index)?;
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::param("scale", "must be positive"));
    }
    let a = gap_ratio(index);
    Ok((1.0 - a * scale, 1.0 - scale / a))
}

/// `(I-1)λ₊ - (1+I)λ₋ + 2`.
pub fn line_residual(index: f64, lam_pos: f64, lam_neg: f64) -> f64 {
    (index - 1.0) * lam_pos - (1.0 + index) * lam_neg + 2.0
}

/// `(1-λ₊)(1-λ₋) - (e^{2f})²`.
pub fn hyperbola_residual(lam_pos: f64, lam_neg: f64, scale: f64) -> f64 {
    (1.0 - lam_pos) * (1.0 - lam_neg) - scale * scale
}

/// The spectral projectors of `h` on `Ker η`, `Π± = (P ± h/λ)/2`.
fn projectors(cp: &ContactPoint, lambda: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let p = cp.horizontal_projector();
    let hl = &cp.h / lambda;
    ((&p + &hl) * 0.5, (&p - &hl) * 0.5)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorTensorSolution {
    pub index: f64,
    pub scale: f64,
    pub lam_pos: f64,
    pub lam_neg: f64,
    /// Frame matrix of `T`, extended by `Tξ = 0`.
    pub t: DMatrix<f64>,
    eta: DVector<f64>,
}

impl ErrorTensorSolution {
    /// `T X` for horizontal `X`.
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_horizontal(&self.eta, x)?;
        Ok(&self.t * x)
    }

    pub fn line_residual(&self) -> f64 {
        line_residual(self.index, self.lam_pos, self.lam_neg)
    }

    pub fn hyperbola_residual(&self) -> f64 {
        hyperbola_residual(self.lam_pos, self.lam_neg, self.scale)
    }

    /// Algebraic checks on the eigenvalue pair.
    pub fn eigenvalue_report(&self, tolerance: f64) -> ResidualReport {
        let mut r = ResidualReport::new();
        r.upper("line", self.line_residual().abs(), tolerance);
        r.upper("hyperbola", self.hyperbola_residual().abs(), tolerance);
        r.lower("eigenvalue_gap", 1.0 - self.lam_pos.max(self.lam_neg), f64::EPSILON);
        r
    }
}

fn check_horizontal(eta: &DVector<f64>, x: &DVector<f64>) -> Result<()> {
    if x.len() != eta.len() {
        return Err(Error::Dimension {
            expected: eta.len(),
            got: x.len(),
        });
    }
    let e = eta.dot(x);
    if e.abs() > HORIZONTAL_TOLERANCE * x.amax().max(1.0) {
        return Err(Error::NotHorizontal { eta: e });
    }
    Ok(())
}

fn error_tensor_at(cp: &ContactPoint, lambda: f64, index: f64, scale: f64) -> Result<ErrorTensorSolution> {
    let (lam_pos, lam_neg) = riemannian_eigenvalues(index, scale)?;
    let (pp, pm) = projectors(cp, lambda);
    Ok(ErrorTensorSolution {
        index,
        scale,
        lam_pos,
        lam_neg,
        t: pp * lam_pos + pm * lam_neg,
        eta: cp.eta.clone(),
    })
}

/// The error tensor at `p` for the pointwise scale `e^{2f(p)} = scale`.
pub fn build_error_tensor<G: ContactGeometry + ?Sized>(
    geom: &G,
    p: &[f64],
    fit: &NullityFit,
    scale: f64,
) -> Result<ErrorTensorSolution> {
    let index = index_of(fit)?;
    let cp = geom.point(p)?;
    error_tensor_at(&cp, fit.lambda, index, scale)
}

/// `T` as a field when `e^{2f}` varies with the point.
///
/// For a jet `f`, the derivatives follow from `T = P - e^{2f} M` with `M`
/// fixed by `h`: `E_a(T) = -2 E_a(f) (P - T)`. This assumes `P` and `h` are
/// frame-constant, which holds on homogeneous models.
fn error_tensor_field(s: &ContactMetricStructure, fit: &NullityFit, f: &ScalarField) -> Result<OperatorField> {
    let index = index_of(fit)?;
    let lambda = fit.lambda;
    match f {
        Field::Constant(v) => {
            let cp = s.point(&s.model().origin())?;
            Ok(Field::Constant(error_tensor_at(&cp, lambda, index, (2.0 * v).exp())?.t))
        }
        Field::Jet {
            value,
            frame_derivatives,
        } => {
            if !s.model().is_homogeneous() {
                return Err(Error::UnsupportedField("jet scale functions need a homogeneous model".into()));
            }
            let cp = s.point(&[])?;
            let t = error_tensor_at(&cp, lambda, index, (2.0 * value).exp())?.t;
            let gap = cp.horizontal_projector() - &t;
            Ok(Field::Jet {
                frame_derivatives: frame_derivatives.iter().map(|df| &gap * (-2.0 * df)).collect(),
                value: t,
            })
        }
        Field::Chart(func) => {
            let s = s.clone();
            let func = func.clone();
            let d = s.model().dim();
            Ok(Field::chart(move |q: &[f64]| {
                s.point(q)
                    .and_then(|cp| error_tensor_at(&cp, lambda, index, (2.0 * func(q)).exp()))
                    .map(|sol| sol.t)
                    .unwrap_or_else(|_| DMatrix::from_element(d, d, f64::NAN))
            }))
        }
    }
}

/// Checks of the error tensor built pointwise from `e^{2f}`:
/// `L_ξT = 2φhT - 2φh - 2(ξf)(P - T)`, `hT = Th`, eigenvalues below 1 and
/// both curve equations. The Lie derivative check needs a model and is
/// omitted for pointwise structures.
pub fn error_tensor_report<G: ContactGeometry + ?Sized>(
    geom: &G,
    fit: &NullityFit,
    f: &ScalarField,
    samples: &[Sample],
    tolerances: &Tolerances,
) -> Result<ResidualReport> {
    let index = index_of(fit)?;
    let model = geom.as_model().ok();
    let t_field = model.map(|s| error_tensor_field(s, fit, f)).transpose()?;
    let lie_tolerance = match model {
        Some(s) if s.model().is_homogeneous() => tolerances.algebraic.max(1e-9),
        _ => tolerances.finite_difference,
    };
    let mut report = ResidualReport::new();
    for p in distinct_points(samples) {
        let cp = geom.point(&p)?;
        let scale = (2.0 * f.at(&p)).exp();
        let sol = error_tensor_at(&cp, fit.lambda, index, scale)?;
        report = report.merge(sol.eigenvalue_report(tolerances.algebraic));
        let commutator = &cp.h * &sol.t - &sol.t * &cp.h;
        let here: Vec<&Sample> = samples.iter().filter(|s| s.point == p).collect();
        let worst = |m: &DMatrix<f64>| {
            here.iter()
                .map(|s| cp.norm(&(m * &s.x)).max(cp.norm(&(m * &s.y))))
                .fold(0.0, f64::max)
        };
        report.upper("h_commutes_t", worst(&commutator), tolerances.algebraic);

        if let (Some(s), Some(t)) = (model, &t_field) {
            let lie = lie_derivative_operator(s.model(), s.xi(), t, &p)?;
            let xi_f = s.model().derivative(f, &cp.xi, &p)?;
            let phih = &cp.phi * &cp.h;
            let rhs = &phih * &sol.t * 2.0 - &phih * 2.0 - (cp.horizontal_projector() - &sol.t) * (2.0 * xi_f);
            report.upper("lie_xi_t", worst(&(lie - rhs)), lie_tolerance);
        }
    }
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizontalKind {
    Bilinear,
    Operator,
}

/// A horizontal tensor at one point standing for an object on the base.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectableHorizontalTensor {
    pub kind: HorizontalKind,
    pub value: DMatrix<f64>,
    /// `|L_ξ|` of the underlying field; `None` when it cannot be differentiated.
    pub projectability: Option<f64>,
    eta: DVector<f64>,
}

impl ProjectableHorizontalTensor {
    pub fn apply(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        check_horizontal(&self.eta, x)?;
        Ok(&self.value * x)
    }

    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        check_horizontal(&self.eta, x)?;
        check_horizontal(&self.eta, y)?;
        Ok(x.dot(&(&self.value * y)))
    }
}

/// `(c(1 + 1/I), c(1 - 1/I))` with `c = |I|/√(I² - 1)`: the factors by
/// which the canonical metric rescales `g̃` on `D(λ)` and `D(-λ)`.
pub fn metric_factors(index: f64) -> Result<(f64, f64)> {
    let index = riemannian_index(index)?;
    let c = index.abs() / (index * index - 1.0).sqrt();
    Ok((c * (1.0 + 1.0 / index), c * (1.0 - 1.0 / index)))
}

fn canonical_metric_at(cp: &ContactPoint, fit: &NullityFit) -> Result<DMatrix<f64>> {
    let index = index_of(fit)?;
    let mu = fit.mu_or_zero();
    let denom = 1.0 - mu / 2.0;
    if denom.abs() < f64::EPSILON {
        return Err(Error::Infeasible("1 - μ/2 vanishes".into()));
    }
    let c = index.abs() / (index * index - 1.0).sqrt();
    let p = cp.horizontal_projector();
    let pt = p.transpose();
    let g = &pt * &cp.metric * &p + &pt * &cp.metric * (&cp.h / denom) * &p;
    Ok(g * c)
}

fn complex_structure_at(cp: &ContactPoint, fit: &NullityFit) -> Result<DMatrix<f64>> {
    let index = index_of(fit)?;
    let a = gap_ratio(index);
    let (pp, pm) = projectors(cp, fit.lambda);
    Ok(&cp.phi * (pp * a + pm / a))
}

fn horizontal_field<G, F>(geom: &G, build: F) -> Result<Option<Field<DMatrix<f64>>>>
where
    G: ContactGeometry + ?Sized,
    F: Fn(&ContactPoint) -> Result<DMatrix<f64>> + Send + Sync + 'static,
{
    let Ok(s) = geom.as_model() else {
        return Ok(None);
    };
    if s.model().is_homogeneous() {
        return Ok(Some(Field::Constant(build(&s.point(&[])?)?)));
    }
    let s = s.clone();
    let d = s.model().dim();
    Ok(Some(Field::chart(move |q: &[f64]| {
        s.point(q)
            .and_then(|cp| build(&cp))
            .unwrap_or_else(|_| DMatrix::from_element(d, d, f64::NAN))
    })))
}

/// The canonical base metric as a field upstairs; `None` for pointwise structures.
pub fn canonical_base_metric_field<G: ContactGeometry + ?Sized>(geom: &G, fit: &NullityFit) -> Result<Option<BilinearField>> {
    index_of(fit)?;
    let fit = fit.clone();
    horizontal_field(geom, move |cp| canonical_metric_at(cp, &fit))
}

/// The base complex structure as a field upstairs; `None` for pointwise structures.
pub fn base_complex_structure_field<G: ContactGeometry + ?Sized>(geom: &G, fit: &NullityFit) -> Result<Option<OperatorField>> {
    index_of(fit)?;
    let fit = fit.clone();
    horizontal_field(geom, move |cp| complex_structure_at(cp, &fit))
}

/// `g = c (g̃ + g̃(·, h/(1 - μ/2) ·))` on `Ker η`, `c = |I|/√(I² - 1)`.
pub fn canonical_base_metric<G: ContactGeometry + ?Sized>(
    geom: &G,
    p: &[f64],
    fit: &NullityFit,
) -> Result<ProjectableHorizontalTensor> {
    let cp = geom.point(p)?;
    let value = canonical_metric_at(&cp, fit)?;
    let projectability = match (geom.as_model(), canonical_base_metric_field(geom, fit)?) {
        (Ok(s), Some(field)) => Some(lie_derivative_bilinear(s.model(), s.xi(), &field, p)?.amax()),
        _ => None,
    };
    Ok(ProjectableHorizontalTensor {
        kind: HorizontalKind::Bilinear,
        value,
        projectability,
        eta: cp.eta,
    })
}

/// The base metric recovered from an error tensor: `g(X,Y) = g̃(X - TX, Y)/e^{2f}`.
pub fn base_metric_via_error_tensor<G: ContactGeometry + ?Sized>(
    geom: &G,
    p: &[f64],
    sol: &ErrorTensorSolution,
) -> Result<DMatrix<f64>> {
    let cp = geom.point(p)?;
    let proj = cp.horizontal_projector();
    let gap = &proj - &sol.t;
    Ok(proj.transpose() * gap.transpose() * &cp.metric * &proj / sol.scale)
}

/// `J = φ(aΠ₊ + a⁻¹Π₋)` with `a = √((I+1)/(I-1))`, so that `J e = aφe` on
/// `D(λ)` and `J φe = -a⁻¹ e`.
pub fn base_complex_structure<G: ContactGeometry + ?Sized>(
    geom: &G,
    p: &[f64],
    fit: &NullityFit,
) -> Result<ProjectableHorizontalTensor> {
    let cp = geom.point(p)?;
    let value = complex_structure_at(&cp, fit)?;
    let projectability = match (geom.as_model(), base_complex_structure_field(geom, fit)?) {
        (Ok(s), Some(field)) => Some(lie_derivative_operator(s.model(), s.xi(), &field, p)?.amax()),
        _ => None,
    };
    Ok(ProjectableHorizontalTensor {
        kind: HorizontalKind::Operator,
        value,
        projectability,
        eta: cp.eta,
    })
}

/// Checks of the canonical Kähler data at the sampled points: `J² = -I`,
/// `ω = g(·, J·)`, `g(J·, J·) = g`, orthogonality of the pushed eigenspaces,
/// positivity, and projectability.
pub fn base_structure_report<G: ContactGeometry + ?Sized>(
    geom: &G,
    fit: &NullityFit,
    samples: &[Sample],
    tolerances: &Tolerances,
) -> Result<ResidualReport> {
    let mut report = ResidualReport::new();
    let proj_tol = match geom.as_model() {
        Ok(s) if !s.model().is_homogeneous() => tolerances.finite_difference,
        _ => tolerances.algebraic,
    };
    for p in distinct_points(samples) {
        let cp = geom.point(&p)?;
        let g = canonical_base_metric(geom, &p, fit)?;
        let j = base_complex_structure(geom, &p, fit)?;
        let proj = cp.horizontal_projector();
        let (gm, jm) = (&g.value, &j.value);
        report.upper("j_squared", (jm * jm + &proj).amax(), tolerances.algebraic);
        report.upper("omega_compatible", (gm * jm - &cp.d_eta * &proj).amax(), tolerances.algebraic);
        report.upper("j_isometry", (jm.transpose() * gm * jm - gm).amax(), tolerances.algebraic);
        let (pp, pm) = projectors(&cp, fit.lambda);
        report.upper("eigenspaces_orthogonal", (pp.transpose() * gm * &pm).amax(), tolerances.algebraic);
        let basis = crate::contact::phi_basis(&cp, None)?;
        let q = DMatrix::from_columns(&basis);
        let restricted = q.transpose() * gm * &q;
        let min_eig = nalgebra::SymmetricEigen::new((&restricted + restricted.transpose()) * 0.5)
            .eigenvalues
            .min();
        report.lower("metric_positive", min_eig, crate::contact::VOLUME_FLOOR);
        if let Some(r) = g.projectability {
            report.upper("metric_projectable", r, proj_tol);
        }
        if let Some(r) = j.projectability {
            report.upper("j_projectable", r, proj_tol);
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConformalVerdict {
    /// The conformal factor the error equation forces, `e^{4f} = 1`.
    pub forced_scale: f64,
    pub forced_f: f64,
    pub k_contact_defect: f64,
    pub feasible: bool,
}

/// A conformal Riemannian submersion must have `f = 0`, and it exists
/// exactly when the structure is K-contact.
pub fn conformal_feasibility<G: ContactGeometry + ?Sized>(
    geom: &G,
    samples: &[Sample],
    tolerance: f64,
) -> Result<ConformalVerdict> {
    let defect = k_contact_defect(geom, samples)?;
    Ok(ConformalVerdict {
        forced_scale: 1.0,
        forced_f: 0.0,
        k_contact_defect: defect,
        feasible: defect <= tolerance,
    })
}

/// `(η, ξ, J, g + η⊗η)` without any projectability check.
pub fn assemble_lift(s: &ContactMetricStructure, g: &BilinearField, j: &OperatorField) -> Result<ContactMetricStructure> {
    let metric = g.combine(s.eta(), |g, e| {
        // keep only the horizontal part of g, then add η⊗η
        g + e * e.transpose()
    })?;
    s.with_tensors(s.eta().clone(), s.xi().clone(), j.clone(), metric)
}

/// Lifts a base metric and complex structure, given upstairs as horizontal
/// fields, to the contact metric structure `(η, ξ, J, g + η⊗η)`.
pub fn build_lifted_structure(
    s: &ContactMetricStructure,
    g: &BilinearField,
    j: &OperatorField,
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<ContactMetricStructure> {
    let origin = [s.model().origin()];
    let points = if points.is_empty() { &origin[..] } else { points };
    for p in points {
        let rg = lie_derivative_bilinear(s.model(), s.xi(), g, p)?.amax();
        let rj = lie_derivative_operator(s.model(), s.xi(), j, p)?.amax();
        let residual = rg.max(rj);
        if !(residual <= tolerance) {
            return Err(Error::NotProjectable { residual });
        }
    }
    assemble_lift(s, g, j)
}

/// The canonical lift of a `|I| > 1` structure.
pub fn canonical_lift(
    s: &ContactMetricStructure,
    fit: &NullityFit,
    points: &[Vec<f64>],
    tolerance: f64,
) -> Result<ContactMetricStructure> {
    let g = canonical_base_metric_field(s, fit)?.ok_or(Error::NoCurvature)?;
    let j = base_complex_structure_field(s, fit)?.ok_or(Error::NoCurvature)?;
    build_lifted_structure(s, &g, &j, points, tolerance)
}

/// Largest `|R(X,Y)ξ - (η(Y)X - η(X)Y)|`; zero exactly for Sasakian structures.
pub fn sasakian_nullity_residual<G: ContactGeometry + ?Sized>(geom: &G, samples: &[Sample]) -> Result<f64> {
    nullity_residual(geom, 1.0, 0.0, samples)
}
