//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use kappa_mu::base::{
    base_metric_via_error_tensor, base_structure_report, build_error_tensor, canonical_base_metric, canonical_lift,
    conformal_feasibility, hyperbola_residual, line_residual, riemannian_eigenvalues, sasakian_nullity_residual,
};
use kappa_mu::contact::{
    adapted_phi_basis, compute_h, contact_identity_report, k_contact_defect, validate_contact_metric,
    ContactGeometry, ContactMetricStructure,
};
use kappa_mu::models::{
    apply_d_homothety, heisenberg, heisenberg_chart, milnor, sheared_heisenberg_chart, Structure,
    SyntheticPointStructure,
};
use kappa_mu::nullity::{boeckx_index, d_homothety_constants, fit_nullity, lie_xi_h_report, NullityFit};
use kappa_mu::para::{enumerate_para_solutions, omega_in_basis, para_compatibility_report, semi_error_tensor, choices_from_mask};
use kappa_mu::report::Tolerances;
use kappa_mu::sampling::{rng, tangent_pairs};
use kappa_mu::tensor::{lie_derivative, lie_derivative_by_flow, Field, TensorField};
use nalgebra::DVector;
use rand::Rng;

type Outcome = Result<String, String>;

const SEED: u64 = 2024;

/// (λ₂, λ₃, κ, μ, I) from the symbolic oracle; `None` marks the Sasakian rows.
const ORACLE: [(f64, f64, f64, f64, Option<f64>); 10] = [
    (1.0, 3.0, 0.0, -2.0, Some(2.0)),
    (3.0, 1.0, 0.0, -2.0, Some(2.0)),
    (-1.0, 1.0, 0.0, 2.0, Some(0.0)),
    (0.0, 2.0, 0.0, 0.0, Some(1.0)),
    (2.0, 0.5, 0.4375, -0.5, Some(1.6666666666666667)),
    (-2.0, -0.5, 0.4375, 4.5, Some(-1.6666666666666667)),
    (0.5, -1.5, 0.0, 3.0, Some(-0.5)),
    (-3.0, -1.0, 0.0, 6.0, Some(-2.0)),
    (1.5, 1.5, 1.0, -1.0, None),
    (0.0, 0.0, 1.0, 2.0, None),
];

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn fitted(l2: f64, l3: f64, samples: usize) -> Result<(ContactMetricStructure, NullityFit), String> {
    let s = milnor(l2, l3).map_err(err)?;
    let fit = fit_nullity(&s, &tangent_pairs(&s, samples, SEED).map_err(err)?).map_err(err)?;
    Ok((s, fit))
}

fn within(elapsed: Duration, limit: Duration) -> Outcome {
    ensure!(elapsed < limit, "took {elapsed:.2?}, limit {limit:?}");
    Ok(format!("{elapsed:.2?}"))
}

fn contact_axioms() -> Outcome {
    let start = Instant::now();
    let mut models: Vec<(String, Structure)> = Vec::new();
    for &(l2, l3, ..) in &ORACLE {
        models.push((format!("milnor({l2},{l3})"), milnor(l2, l3).map_err(err)?.into()));
    }
    models.push(("heisenberg".into(), heisenberg().map_err(err)?.into()));
    for n in 1..=3 {
        for (k, m) in [(0.0, 0.0), (0.75, -1.0), (-3.0, 2.5)] {
            let s = SyntheticPointStructure::new(n, k, m).map_err(err)?;
            models.push((format!("synthetic(n={n},κ={k},μ={m})"), s.into()));
        }
    }
    let mut worst: f64 = 0.0;
    for (name, s) in &models {
        let samples = tangent_pairs(s, 100, SEED).map_err(err)?;
        let r = validate_contact_metric(s, &samples, 1e-9);
        ensure!(r.passed(), "{name}: {r:?}");
        worst = worst.max(r.worst_upper());
    }
    let time = within(start.elapsed(), Duration::from_secs(10))?;
    Ok(format!("{} models, worst residual {worst:.1e}, {time}", models.len()))
}

fn identity_suite() -> Outcome {
    let tol = 1e-6;
    let mut models = vec![("heisenberg".to_string(), heisenberg().map_err(err)?)];
    models.push(("heisenberg_chart".into(), heisenberg_chart().map_err(err)?));
    for &(l2, l3, ..) in &ORACLE {
        models.push((format!("milnor({l2},{l3})"), milnor(l2, l3).map_err(err)?));
    }
    let mut worst: f64 = 0.0;
    for (name, s) in &models {
        let samples = tangent_pairs(s, 60, SEED).map_err(err)?;
        let fit = fit_nullity(s, &samples).map_err(err)?;
        ensure!(fit.accepted(tol), "{name}: nullity residual {:.1e}", fit.residual);
        let id = contact_identity_report(s, Some(fit.kappa), &samples, tol).map_err(err)?;
        let lie = lie_xi_h_report(s, &fit, &samples, tol, tol).map_err(err)?;
        for name_of in ["h_anticommutes_phi", "lie_xi_metric", "h_squared"] {
            ensure!(id.get(name_of).is_some(), "{name}: {name_of} missing");
        }
        let r = id.merge(lie);
        ensure!(r.passed(), "{name}: {r:?}");
        worst = worst.max(r.worst_upper());
    }
    Ok(format!("{} accepted models, worst residual {worst:.1e}", models.len()))
}

fn nullity_fit() -> Outcome {
    let (mut worst_res, mut worst_dev): (f64, f64) = (0.0, 0.0);
    for &(l2, l3, kappa, mu, index) in &ORACLE {
        let (_, fit) = fitted(l2, l3, 100)?;
        ensure!(fit.residual < 1e-6, "({l2},{l3}) residual {:.1e}", fit.residual);
        let mut dev = (fit.kappa - kappa).abs();
        if let Some(i) = index {
            let m = fit.mu.ok_or_else(|| format!("({l2},{l3}) μ indeterminate"))?;
            dev = dev.max((m - mu).abs()).max((fit.index.unwrap_or(f64::NAN) - i).abs());
        } else {
            ensure!(fit.mu.is_none(), "({l2},{l3}) expected indeterminate μ");
        }
        ensure!(dev < 1e-8, "({l2},{l3}) deviation from oracle {dev:.1e}");
        worst_res = worst_res.max(fit.residual);
        worst_dev = worst_dev.max(dev);
    }
    Ok(format!("{} pairs, residual {worst_res:.1e}, oracle deviation {worst_dev:.1e}", ORACLE.len()))
}

fn homothety_invariance() -> Outcome {
    let mut r = rng(SEED);
    let mut drift: f64 = 0.0;
    for _ in 0..100 {
        let kappa = r.random_range(-5.0..0.999);
        let mu = r.random_range(-5.0..5.0);
        let a = r.random_range(1e-3..=10.0);
        let (k, m) = d_homothety_constants(kappa, mu, a).map_err(err)?;
        let before = boeckx_index(kappa, mu).map_err(err)?;
        let after = boeckx_index(k, m).map_err(err)?;
        drift = drift.max((before - after).abs() / before.abs().max(1.0));
    }
    ensure!(drift < 1e-10, "index drift {drift:.1e}");
    let mut refit: f64 = 0.0;
    for (l2, l3) in [(1.0, 3.0), (2.0, 0.5), (0.5, -1.5)] {
        let (s, fit) = fitted(l2, l3, 40)?;
        for a in [0.5, 2.0, 7.5] {
            let t = apply_d_homothety(&Structure::Model(s.clone()), a).map_err(err)?;
            let tf = fit_nullity(&t, &tangent_pairs(&t, 40, SEED).map_err(err)?).map_err(err)?;
            let (k, m) = d_homothety_constants(fit.kappa, fit.mu.unwrap_or(0.0), a).map_err(err)?;
            let dev = (tf.kappa - k).abs().max((tf.mu.unwrap_or(f64::NAN) - m).abs());
            ensure!(dev < 1e-6, "milnor({l2},{l3}) a={a}: refit deviation {dev:.1e}");
            refit = refit.max(dev);
        }
    }
    Ok(format!("index drift {drift:.1e}, refit deviation {refit:.1e}"))
}

fn riemannian_regime() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in [1.5, 2.0, 3.0, 10.0] {
        for index in [i, -i] {
            for scale in [0.25, 1.0, 4.0] {
                let (p, n) = riemannian_eigenvalues(index, scale).map_err(err)?;
                let res = line_residual(index, p, n).abs().max(hyperbola_residual(p, n, scale).abs());
                ensure!(res < 1e-12, "I={index} scale={scale}: residual {res:.1e}");
                ensure!(p < 1.0 && n < 1.0, "I={index} scale={scale}: eigenvalues ({p}, {n})");
                worst = worst.max(res);
            }
        }
    }
    for index in [1.0, -1.0, 0.5, 0.0, -0.99] {
        ensure!(riemannian_eigenvalues(index, 1.0).is_err(), "I={index} accepted");
    }
    let mut models = vec![("heisenberg".to_string(), heisenberg().map_err(err)?)];
    models.push(("heisenberg_chart".into(), heisenberg_chart().map_err(err)?));
    models.push(("sheared_chart".into(), sheared_heisenberg_chart(0.8).map_err(err)?));
    for &(l2, l3, ..) in &ORACLE {
        models.push((format!("milnor({l2},{l3})"), milnor(l2, l3).map_err(err)?));
    }
    let mut feasible = Vec::new();
    for (name, s) in &models {
        let samples = tangent_pairs(s, 10, SEED).map_err(err)?;
        let v = conformal_feasibility(s, &samples, 1e-8).map_err(err)?;
        ensure!(v.forced_f == 0.0 && v.forced_scale == 1.0, "{name}: forced f {}", v.forced_f);
        let k_contact = compute_h(s, &samples[0].point).map_err(err)?.lambda < 1e-6;
        ensure!(v.feasible == k_contact, "{name}: feasible={} but K-contact={k_contact}", v.feasible);
        if v.feasible {
            feasible.push(name.clone());
        }
    }
    ensure!(feasible.contains(&"heisenberg".to_string()), "Heisenberg control infeasible");
    Ok(format!("curve residual {worst:.1e}, feasible only on K-contact models: {}", feasible.join(", ")))
}

fn uniqueness() -> Outcome {
    let (mut spread, mut ortho): (f64, f64) = (0.0, 0.0);
    for &(l2, l3, _, _, index) in &ORACLE {
        if !index.is_some_and(|i| i.abs() > 1.0 + 1e-6) {
            continue;
        }
        let (s, fit) = fitted(l2, l3, 60)?;
        let canonical = canonical_base_metric(&s, &[], &fit).map_err(err)?.value;
        for scale in [0.25, 0.5, 1.0, 2.0, 4.0] {
            let sol = build_error_tensor(&s, &[], &fit, scale).map_err(err)?;
            let g = base_metric_via_error_tensor(&s, &[], &sol).map_err(err)?;
            spread = spread.max((g - &canonical).amax());
        }
        let samples = tangent_pairs(&s, 10, SEED).map_err(err)?;
        let r = base_structure_report(&s, &fit, &samples, &Tolerances::default()).map_err(err)?;
        ensure!(r.passed(), "milnor({l2},{l3}): {r:?}");
        ortho = ortho.max(r.residual("eigenspaces_orthogonal"));
    }
    ensure!(spread < 1e-9, "metrics differ across scales by {spread:.1e}");
    ensure!(ortho < 1e-10, "eigendistribution orthogonality {ortho:.1e}");
    Ok(format!("scale spread {spread:.1e}, orthogonality {ortho:.1e}"))
}

fn sasakian_lift() -> Outcome {
    let mut details = Vec::new();
    for (l2, l3) in [(1.0, 3.0), (2.0, 0.5), (-3.0, -1.0)] {
        let (s, fit) = fitted(l2, l3, 60)?;
        let lifted = canonical_lift(&s, &fit, &[], 1e-9).map_err(err)?;
        let samples = tangent_pairs(&lifted, 100, SEED).map_err(err)?;
        let v = validate_contact_metric(&lifted, &samples, 1e-9);
        ensure!(v.passed(), "milnor({l2},{l3}) lift fails axioms: {v:?}");
        let defect = k_contact_defect(&lifted, &samples).map_err(err)?;
        ensure!(defect < 1e-8, "milnor({l2},{l3}) K-contact defect {defect:.1e}");
        let sas = sasakian_nullity_residual(&lifted, &samples).map_err(err)?;
        ensure!(sas < 1e-5, "milnor({l2},{l3}) Sasakian residual {sas:.1e}");
        details.push(format!("milnor({l2},{l3}) defect {defect:.1e} residual {sas:.1e}"));
    }
    Ok(details.join("; "))
}

fn para_regime() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    let mut f_sq: f64 = 0.0;
    let mut compat: f64 = 0.0;
    for n in 1..=3usize {
        for i in [0.0, 0.2, 0.6, 0.9] {
            for index in [i, -i] {
                let s = SyntheticPointStructure::new(n, 0.0, 2.0 * (1.0 - index)).map_err(err)?;
                let cp = s.point(&[]).map_err(err)?;
                let basis = adapted_phi_basis(&cp).map_err(err)?;
                let omega = omega_in_basis(&cp, &basis);
                let sols = enumerate_para_solutions(&cp, &basis, index).map_err(err)?;
                ensure!(sols.len() == 1 << n, "n={n} I={index}: {} solutions", sols.len());
                for sol in &sols {
                    let r = para_compatibility_report(sol, &omega, 1e-12);
                    ensure!(r.passed(), "n={n} I={index} S={:?}: {r:?}", sol.members());
                    ensure!(sol.signature() == (n, n, 0), "signature {:?}", sol.signature());
                    f_sq = f_sq.max(r.residual("f_squared"));
                    compat = compat.max(r.residual("omega_compatible"));
                    let t = semi_error_tensor(&cp, &basis, index, &choices_from_mask(n, sol.subset)).map_err(err)?;
                    let e = t.eigenvalue_report(1e-12);
                    ensure!(e.passed(), "n={n} I={index}: {e:?}");
                    count += 1;
                }
            }
            let s = SyntheticPointStructure::new(n, 0.0, 0.0).map_err(err)?;
            let cp = s.point(&[]).map_err(err)?;
            let basis = adapted_phi_basis(&cp).map_err(err)?;
            for index in [1.0, -1.0, 1.5] {
                ensure!(enumerate_para_solutions(&cp, &basis, index).is_err(), "I={index} accepted");
            }
        }
    }
    ensure!(f_sq <= f64::EPSILON, "F² - I reaches {f_sq:.1e}");
    let time = within(start.elapsed(), Duration::from_secs(5))?;
    Ok(format!("{count} solutions, F² - I {f_sq:.1e}, ω-compatibility {compat:.1e}, {time}"))
}

fn finite_difference_order() -> Outcome {
    let s = sheared_heisenberg_chart(1.0).map_err(err)?;
    let m = s.model();
    let p = [0.2, 0.1, -0.3];
    let cases = [
        (
            "φ along (1+xy, z/2, 0.3)",
            Field::chart(|q: &[f64]| DVector::from_vec(vec![1.0 + q[0] * q[1], 0.5 * q[2], 0.3])),
            TensorField::Operator(s.phi().clone()),
        ),
        (
            "g̃ along (sin y, cos x, xz/5)",
            Field::chart(|q: &[f64]| DVector::from_vec(vec![q[1].sin(), q[0].cos(), 0.2 * q[0] * q[2]])),
            TensorField::Bilinear(s.metric().clone()),
        ),
        (
            "η along (0.4z², 1+0.3x, y)",
            Field::chart(|q: &[f64]| DVector::from_vec(vec![0.4 * q[2] * q[2], 1.0 + 0.3 * q[0], q[1]])),
            TensorField::Covector(s.eta().clone()),
        ),
    ];
    let mut ratios = Vec::new();
    for (name, x, t) in &cases {
        let exact = lie_derivative(m, x, t, &p).map_err(err)?;
        let e = |step: f64| -> Result<f64, String> {
            lie_derivative_by_flow(m, x, t, &p, step)
                .map_err(err)?
                .max_abs_diff(&exact)
                .ok_or_else(|| "tensor shapes differ".to_string())
        };
        let ratio = e(0.1)? / e(0.05)?;
        ensure!((ratio - 4.0).abs() < 0.5, "{name}: ratio {ratio:.3}");
        ratios.push(format!("{ratio:.3}"));
    }
    Ok(format!("halving ratios {}", ratios.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("contact axioms", contact_axioms),
        ("identity suite", identity_suite),
        ("nullity fit", nullity_fit),
        ("D_a invariance", homothety_invariance),
        ("Riemannian regime", riemannian_regime),
        ("base metric uniqueness", uniqueness),
        ("Sasakian lift", sasakian_lift),
        ("para regime", para_regime),
        ("finite-difference order", finite_difference_order),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS  {}. {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {}. {name}: {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
