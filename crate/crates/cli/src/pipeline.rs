use kappa_mu::base::{
    base_metric_via_error_tensor, base_structure_report, build_error_tensor, canonical_base_metric, canonical_lift,
    conformal_feasibility, error_tensor_report, metric_factors, riemannian_eigenvalues, sasakian_nullity_residual,
};
use kappa_mu::contact::{
    adapted_phi_basis, contact_identity_report, k_contact_defect, validate_contact_metric, ContactGeometry,
};
use kappa_mu::models::{milnor, ModelConfig, ModelKind, Structure};
use kappa_mu::nullity::{fit_nullity, lie_xi_h_report, NullityFit, Regime, INDEX_GUARD};
use kappa_mu::para::{enumerate_para_solutions, omega_in_basis, para_compatibility_report};
use kappa_mu::report::{Check, ResidualReport};
use kappa_mu::sampling::{tangent_pairs, Sample};
use kappa_mu::tensor::Field;
use kappa_mu::Error;
use serde::Serialize;

use crate::report::{num, RunReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Fit,
    Descend,
    Para,
    Lift,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Fit => "fit",
            Command::Descend => "descend",
            Command::Para => "para",
            Command::Lift => "lift",
            Command::Sweep => "sweep",
        }
    }
}

/// Tolerance for checks whose accuracy depends on the model: algebraic on
/// homogeneous and pointwise models, finite-difference on charts.
fn model_tolerance(config: &ModelConfig, exact: f64) -> f64 {
    if config.is_exact() {
        exact
    } else {
        config.tolerances.finite_difference
    }
}

pub fn execute(command: Command, config: &ModelConfig) -> Result<RunReport, Error> {
    let mut report = RunReport::new(command.name(), config.clone());
    if command == Command::Sweep {
        sweep(config, &mut report)?;
        return Ok(report);
    }
    let structure = config.build()?;
    let samples = tangent_pairs(&structure, config.samples, config.seed)?;
    let outcome = match command {
        Command::Validate => validate(config, &structure, &samples, &mut report),
        Command::Fit => fit(config, &structure, &samples, &mut report).map(|_| ()),
        Command::Descend => descend(config, &structure, &samples, &mut report),
        Command::Para => para(config, &structure, &samples, &mut report),
        Command::Lift => lift(config, &structure, &samples, &mut report),
        Command::Sweep => unreachable!("handled above"),
    };
    if let Err(e) = outcome {
        report.add_failure("error", e.to_string());
    }
    Ok(report)
}

fn validate(config: &ModelConfig, s: &Structure, samples: &[Sample], report: &mut RunReport) -> Result<(), Error> {
    report.add_checks(validate_contact_metric(s, samples, model_tolerance(config, config.tolerances.algebraic)));
    let tol = model_tolerance(config, config.tolerances.identity);
    report.add_checks(contact_identity_report(s, None, samples, tol)?);
    Ok(())
}

/// Fits the constants (or takes them from a pointwise normal form) and
/// records the nullity checks.
fn fit(config: &ModelConfig, s: &Structure, samples: &[Sample], report: &mut RunReport) -> Result<NullityFit, Error> {
    let identity_tol = model_tolerance(config, config.tolerances.identity);
    let fit = match s {
        Structure::Synthetic(p) => NullityFit::declared(p.kappa(), p.mu()),
        Structure::Model(_) => fit_nullity(s, samples)?,
    };
    report.set_fit(fit.clone());
    if s.is_synthetic() {
        report.add_checks(contact_identity_report(s, Some(fit.kappa), samples, identity_tol)?);
        return Ok(fit);
    }
    let threshold = config.tolerances.nullity;
    report.add_check(Check::upper("nullity_fit", fit.residual, threshold));
    if fit.accepted(threshold) {
        report.add_checks(contact_identity_report(s, Some(fit.kappa), samples, identity_tol)?);
        report.add_checks(lie_xi_h_report(s, &fit, samples, threshold, identity_tol)?);
    }
    Ok(fit)
}

fn index_row(report: &mut RunReport, fit: &NullityFit, riemannian: bool) {
    let index = fit.index.unwrap_or(f64::NAN);
    let (name, check, reason) = if riemannian {
        (
            "index_above_one",
            Check::lower("index_above_one", index.abs(), 1.0 + INDEX_GUARD),
            "Riemannian descent needs |I| > 1",
        )
    } else {
        (
            "index_below_one",
            Check::upper("index_below_one", index.abs(), 1.0 - f64::EPSILON),
            "para descent needs |I| < 1",
        )
    };
    let passed = check.passed;
    report.add_check(check);
    if !passed {
        let detail = match fit.index {
            Some(i) => format!("{reason}, got I = {}", num(i)),
            None => format!("{reason}, but the index is undefined (Sasakian)"),
        };
        report.artifact("infeasible", format!("{name}: {detail}"));
    }
}

fn descend(config: &ModelConfig, s: &Structure, samples: &[Sample], report: &mut RunReport) -> Result<(), Error> {
    let fit = fit(config, s, samples, report)?;
    index_row(report, &fit, true);
    if fit.regime() != Regime::Riemannian || !report.passed {
        return Ok(());
    }
    let tol = &config.tolerances;
    let index = fit.index.expect("riemannian fit has an index");
    let f = Field::Constant(config.scale.ln() / 2.0);
    report.add_checks(error_tensor_report(s, &fit, &f, samples, tol)?);
    report.add_checks(base_structure_report(s, &fit, samples, tol)?);

    let p = samples[0].point.clone();
    let canonical = canonical_base_metric(s, &p, &fit)?.value;
    let mut spread: f64 = 0.0;
    for scale in [0.25, 0.5, 1.0, 2.0, 4.0] {
        let sol = build_error_tensor(s, &p, &fit, scale)?;
        spread = spread.max((base_metric_via_error_tensor(s, &p, &sol)? - &canonical).amax());
    }
    report.add_check(Check::upper("base_metric_unique", spread, model_tolerance(config, 1e-9)));

    let (lam_pos, lam_neg) = riemannian_eigenvalues(index, config.scale)?;
    report.artifact("eigenvalues", [lam_pos, lam_neg]);
    report.artifact("metric_factors", metric_factors(index)?);
    let verdict = conformal_feasibility(s, samples, tol.algebraic.max(1e-8))?;
    report.artifact(
        "conformal_submersion",
        if verdict.feasible {
            "feasible with f = 0 (K-contact)".to_string()
        } else {
            format!("impossible: f = 0 is forced and the K-contact defect is {}", num(verdict.k_contact_defect))
        },
    );
    Ok(())
}

#[derive(Serialize)]
struct SolutionRow {
    subset: Vec<usize>,
    f_squared: f64,
    omega_compatible: f64,
    signature: (usize, usize),
    g_diagonal: Vec<f64>,
}

fn para(config: &ModelConfig, s: &Structure, samples: &[Sample], report: &mut RunReport) -> Result<(), Error> {
    let fit = fit(config, s, samples, report)?;
    index_row(report, &fit, false);
    if fit.regime() != Regime::Para || !report.passed {
        return Ok(());
    }
    let index = fit.index.expect("para fit has an index");
    let cp = s.point(&samples[0].point)?;
    let basis = adapted_phi_basis(&cp)?;
    let omega = omega_in_basis(&cp, &basis);
    let sols = enumerate_para_solutions(&cp, &basis, index)?;
    let expected = 1usize << basis.n();
    report.add_check(Check::upper("solution_count", sols.len().abs_diff(expected) as f64, 0.0));

    let tol = model_tolerance(config, config.tolerances.algebraic);
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut checks = ResidualReport::new();
    for sol in &sols {
        let r = para_compatibility_report(sol, &omega, tol);
        let (pos, neg, _) = sol.signature();
        let row = SolutionRow {
            subset: sol.members(),
            f_squared: r.residual("f_squared"),
            omega_compatible: r.residual("omega_compatible"),
            signature: (pos, neg),
            g_diagonal: sol.g_basis.diagonal().iter().copied().collect(),
        };
        lines.push(format!(
            "S = {:?}  signature ({pos}, {neg})  g_S diagonal [{}]",
            row.subset,
            row.g_diagonal.iter().map(|v| num(*v)).collect::<Vec<_>>().join(", ")
        ));
        rows.push(row);
        checks = checks.merge(r);
    }
    report.add_checks(checks);
    report.artifact("solution_count", sols.len());
    report.artifact("a0", sols[0].a0);
    report.artifact("solutions", lines);
    report.artifact("solution_details", rows);
    Ok(())
}

fn lift(config: &ModelConfig, s: &Structure, samples: &[Sample], report: &mut RunReport) -> Result<(), Error> {
    let Structure::Model(model) = s else {
        return Err(Error::NoCurvature);
    };
    let fit = fit(config, s, samples, report)?;
    index_row(report, &fit, true);
    if fit.regime() != Regime::Riemannian || !report.passed {
        return Ok(());
    }
    let points: Vec<Vec<f64>> = kappa_mu::sampling::distinct_points(samples);
    let tol = model_tolerance(config, 1e-9);
    let lifted = canonical_lift(model, &fit, &points, tol)?;
    let lifted_samples = tangent_pairs(&lifted, config.samples, config.seed)?;
    report.add_checks(validate_contact_metric(&lifted, &lifted_samples, model_tolerance(config, config.tolerances.algebraic)));
    let mut extra = ResidualReport::new();
    extra.upper("lift_k_contact_defect", k_contact_defect(&lifted, &lifted_samples)?, model_tolerance(config, 1e-8));
    extra.upper(
        "lift_sasakian_nullity",
        sasakian_nullity_residual(&lifted, &lifted_samples)?,
        config.tolerances.nullity,
    );
    report.add_checks(extra);
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    lambda2: f64,
    lambda3: f64,
    kappa: f64,
    mu: Option<f64>,
    index: Option<f64>,
    regime: Regime,
}

fn sweep(config: &ModelConfig, report: &mut RunReport) -> Result<(), Error> {
    if config.model != ModelKind::Milnor {
        return Err(Error::Config {
            field: "model".into(),
            message: "sweep runs over the milnor family".into(),
        });
    }
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut fits = ResidualReport::new();
    for &l2 in &config.sweep {
        for &l3 in &config.sweep {
            let s = milnor(l2, l3)?;
            let samples = tangent_pairs(&s, config.samples, config.seed)?;
            let fit = fit_nullity(&s, &samples)?;
            fits.upper("nullity_fit", fit.residual, config.tolerances.nullity);
            lines.push(format!(
                "({}, {})  kappa {}  mu {}  index {}  {}",
                num(l2),
                num(l3),
                num(fit.kappa),
                fit.mu.map_or("-".into(), num),
                fit.index.map_or("-".into(), num),
                fit.regime().as_str()
            ));
            rows.push(SweepRow {
                lambda2: l2,
                lambda3: l3,
                kappa: fit.kappa,
                mu: fit.mu,
                index: fit.index,
                regime: fit.regime(),
            });
        }
    }
    report.add_checks(fits);
    report.artifact("classification", lines);
    report.artifact("sweep", rows);
    Ok(())
}
