use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::basis::phi_basis;
use super::{ContactGeometry, ContactPoint};
use crate::error::Result;
use crate::report::{Check, ResidualReport};
use crate::sampling::{for_each_sample, Sample};
use crate::tensor::sym_eigen;

/// Lower bound for the nondegeneracy values (volume form, smallest metric eigenvalue).
pub const VOLUME_FLOOR: f64 = 1e-6;

/// `|η ∧ (dη)^n|` up to a dimensional constant, normalized by the metric
/// volume: `sqrt(|det K| / det g̃)` with `K = [[dη, η], [-ηᵀ, 0]]`.
pub fn volume_form_value(cp: &ContactPoint) -> f64 {
    let d = cp.dim();
    let mut k = DMatrix::zeros(d + 1, d + 1);
    k.view_mut((0, 0), (d, d)).copy_from(&cp.d_eta);
    for i in 0..d {
        k[(i, d)] = cp.eta[i];
        k[(d, i)] = -cp.eta[i];
    }
    let det_g = cp.metric.determinant();
    if det_g <= 0.0 {
        return 0.0;
    }
    (k.determinant().abs() / det_g).sqrt()
}

fn vec_norm(cp: &ContactPoint, v: &DVector<f64>) -> f64 {
    cp.inner(v, v).abs().sqrt()
}

/// Per-axiom residuals of a contact metric structure over a sample set.
///
/// Each residual is the larger of the worst frame-component entry and the
/// worst value on the sampled orthonormal pairs. Evaluation failures become
/// a failed `evaluation` check rather than an error.
pub fn validate_contact_metric<G: ContactGeometry + ?Sized>(
    geom: &G,
    samples: &[Sample],
    tolerance: f64,
) -> ResidualReport {
    let mut report = ResidualReport::new();
    let result = for_each_sample(geom, samples, |cp, s| {
        let d = cp.dim();
        let id = DMatrix::<f64>::identity(d, d);
        let phi_sq = &cp.phi * &cp.phi + &id - &cp.xi * cp.eta.transpose();
        let compat = &cp.metric * &cp.phi - &cp.d_eta;
        let dual = &cp.eta - &cp.metric * &cp.xi;
        let kernel = cp.d_eta.transpose() * &cp.xi;

        report.upper("reeb_normalization", (cp.eta.dot(&cp.xi) - 1.0).abs(), tolerance);
        report.upper(
            "reeb_kernel",
            kernel.amax().max(kernel.dot(&s.x).abs()).max(kernel.dot(&s.y).abs()),
            tolerance,
        );
        report.upper(
            "phi_squared",
            phi_sq.amax().max(vec_norm(cp, &(&phi_sq * &s.x))).max(vec_norm(cp, &(&phi_sq * &s.y))),
            tolerance,
        );
        report.upper(
            "compatibility",
            compat.amax().max(s.x.dot(&(&compat * &s.y)).abs()),
            tolerance,
        );
        report.upper("metric_dual", dual.amax().max(dual.dot(&s.x).abs()), tolerance);
        report.upper(
            "metric_symmetric",
            (&cp.metric - cp.metric.transpose()).amax(),
            tolerance,
        );
        let min_eig = SymmetricEigen::new(cp.metric.clone()).eigenvalues.min();
        report.lower("metric_positive", min_eig, VOLUME_FLOOR);
        report.lower("volume_form", volume_form_value(cp), VOLUME_FLOOR);
        Ok(())
    });
    if let Err(e) = result {
        report.record(Check::upper(format!("evaluation: {e}"), f64::INFINITY, 0.0));
    }
    report
}

/// `h` at a point with its largest eigenvalue on `Ker η`.
#[derive(Clone, Debug, PartialEq)]
pub struct HTensor {
    pub h: DMatrix<f64>,
    pub lambda: f64,
    /// `|h ξ|`
    pub xi_residual: f64,
}

pub fn compute_h<G: ContactGeometry + ?Sized>(geom: &G, p: &[f64]) -> Result<HTensor> {
    let cp = geom.point(p)?;
    let eig = sym_eigen(&cp.h, &cp.metric)?;
    Ok(HTensor {
        xi_residual: vec_norm(&cp, &(&cp.h * &cp.xi)),
        lambda: eig.values[0].max(0.0),
        h: cp.h,
    })
}

/// Residuals of the identities every contact metric structure satisfies,
/// plus `h² = -(1-κ)φ²` when `kappa` is given.
///
/// `L_ξ g̃ = 2 g̃(h·, φ·)` is skipped for structures without derivative data.
pub fn contact_identity_report<G: ContactGeometry + ?Sized>(
    geom: &G,
    kappa: Option<f64>,
    samples: &[Sample],
    tolerance: f64,
) -> Result<ResidualReport> {
    let mut report = ResidualReport::new();
    for_each_sample(geom, samples, |cp, s| {
        let anti = &cp.h * &cp.phi + &cp.phi * &cp.h;
        report.upper(
            "h_anticommutes_phi",
            vec_norm(cp, &(&anti * &s.x)).max(vec_norm(cp, &(&anti * &s.y))),
            tolerance,
        );
        report.upper("h_kills_xi", vec_norm(cp, &(&cp.h * &cp.xi)), tolerance);
        let gh = &cp.metric * &cp.h;
        let asym = &gh - gh.transpose();
        report.upper("h_symmetric", s.x.dot(&(&asym * &s.y)).abs(), tolerance);
        if let Some(lie) = &cp.lie_xi_metric {
            let rhs = cp.h.transpose() * &cp.metric * &cp.phi * 2.0;
            let diff = lie - rhs;
            report.upper(
                "lie_xi_metric",
                s.x.dot(&(&diff * &s.y)).abs().max(s.x.dot(&(&diff * &s.x)).abs()),
                tolerance,
            );
        }
        if let Some(k) = kappa {
            let r = &cp.h * &cp.h + &cp.phi * &cp.phi * (1.0 - k);
            report.upper(
                "h_squared",
                vec_norm(cp, &(&r * &s.x)).max(vec_norm(cp, &(&r * &s.y))),
                tolerance,
            );
        }
        Ok(())
    })?;
    Ok(report)
}

/// Largest operator norm of `L_ξ g̃` restricted to `Ker η` over the sampled points.
///
/// Pointwise structures have no derivative data; there the identity
/// `L_ξ g̃ = 2 g̃(h·, φ·)` supplies the tensor.
pub fn k_contact_defect<G: ContactGeometry + ?Sized>(geom: &G, samples: &[Sample]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in crate::sampling::distinct_points(samples) {
        let cp = geom.point(&p)?;
        let lie = match &cp.lie_xi_metric {
            Some(l) => l.clone(),
            None => cp.h.transpose() * &cp.metric * &cp.phi * 2.0,
        };
        let q = DMatrix::from_columns(&phi_basis(&cp, None)?);
        let restricted = q.transpose() * lie * &q;
        let norm = restricted.singular_values().max();
        worst = worst.max(norm);
    }
    Ok(worst)
}
