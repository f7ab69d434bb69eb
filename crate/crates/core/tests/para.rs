use approx::assert_abs_diff_eq;
use kappa_mu::contact::{adapted_phi_basis, ContactGeometry};
use kappa_mu::models::{milnor, SyntheticPointStructure};
use kappa_mu::nullity::{fit_nullity, NullityFit};
use kappa_mu::para::{
    choices_from_mask, enumerate_para_solutions, omega_in_basis, para_compatibility_report, para_solutions_at,
    semi_error_tensor, semi_error_tensor_from_pairs, PointChoice,
};
use kappa_mu::sampling::tangent_pairs;
use kappa_mu::Error;
use nalgebra::DMatrix;

/// A pointwise structure with `κ = 0` and index `I`.
fn with_index(n: usize, index: f64) -> SyntheticPointStructure {
    SyntheticPointStructure::new(n, 0.0, 2.0 * (1.0 - index)).unwrap()
}

#[test]
fn n_one_index_zero_example() {
    let s = with_index(1, 0.0);
    let cp = s.point(&[]).unwrap();
    let basis = adapted_phi_basis(&cp).unwrap();
    let sols = enumerate_para_solutions(&cp, &basis, 0.0).unwrap();
    assert_eq!(sols.len(), 2);
    let full = &sols[1];
    assert_eq!(full.members(), vec![1]);
    assert_eq!(full.f_basis, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    assert_eq!(full.g_basis, DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]));
    let omega = omega_in_basis(&cp, &basis);
    for sol in &sols {
        let r = para_compatibility_report(sol, &omega, 1e-12);
        assert!(r.passed(), "{r:?}");
        assert_eq!(sol.signature(), (1, 1, 0));
    }
}

#[test]
fn counts_signatures_and_complements() {
    for n in 1..=3 {
        for index in [0.0, 0.2, -0.6, 0.9] {
            let s = with_index(n, index);
            let cp = s.point(&[]).unwrap();
            let basis = adapted_phi_basis(&cp).unwrap();
            let omega = omega_in_basis(&cp, &basis);
            let sols = enumerate_para_solutions(&cp, &basis, index).unwrap();
            assert_eq!(sols.len(), 1 << n);
            let full = (1u64 << n) - 1;
            for (k, sol) in sols.iter().enumerate() {
                assert_eq!(sol.subset, k as u64);
                let r = para_compatibility_report(sol, &omega, 1e-12);
                assert!(r.passed(), "n={n} I={index}: {r:?}");
                assert_eq!(sol.signature(), (n, n, 0));
                let comp = &sols[(full ^ sol.subset) as usize];
                assert_eq!(comp.f_basis, -&sol.f_basis);
                assert_eq!(comp.g_basis, -&sol.g_basis);
                for other in &sols[..k] {
                    assert_ne!(other.g_basis, sol.g_basis);
                }
            }
        }
    }
}

#[test]
fn omega_products_equal_minus_one() {
    let s = with_index(2, 0.3);
    let cp = s.point(&[]).unwrap();
    let basis = adapted_phi_basis(&cp).unwrap();
    let omega = omega_in_basis(&cp, &basis);
    for sol in enumerate_para_solutions(&cp, &basis, 0.3).unwrap() {
        for i in 0..2 {
            assert_abs_diff_eq!(omega[(i, 2 + i)], -1.0, epsilon = 1e-15);
            let gf = &sol.g_basis * &sol.f_basis;
            assert_abs_diff_eq!(gf[(i, 2 + i)], -1.0, epsilon = 1e-15);
        }
    }
}

#[test]
fn doubled_metric_fails_compatibility() {
    let s = with_index(1, 0.0);
    let cp = s.point(&[]).unwrap();
    let basis = adapted_phi_basis(&cp).unwrap();
    let omega = omega_in_basis(&cp, &basis);
    let mut sol = enumerate_para_solutions(&cp, &basis, 0.0).unwrap().remove(1);
    sol.g_basis *= 2.0;
    let r = para_compatibility_report(&sol, &omega, 1e-12);
    assert!(!r.passed());
    assert_abs_diff_eq!(r.residual("omega_compatible"), 1.0, epsilon = 1e-15);
}

#[test]
fn error_tensor_recovers_each_metric() {
    for index in [0.0, 0.6, -0.4] {
        let s = with_index(2, index);
        let cp = s.point(&[]).unwrap();
        let basis = adapted_phi_basis(&cp).unwrap();
        for sol in enumerate_para_solutions(&cp, &basis, index).unwrap() {
            let t = semi_error_tensor(&cp, &basis, index, &choices_from_mask(2, sol.subset)).unwrap();
            assert!(t.eigenvalue_report(1e-12).passed());
            assert!((t.recovered_metric() - &sol.g_basis).amax() < 1e-12);
            assert!((&t.t - t.t.transpose()).amax() < 1e-14);
            assert!((&cp.h * &t.t - &t.t * &cp.h).amax() < 1e-12);
            // frame form of g_S equals g̃(X - TX, Y)
            let p = cp.horizontal_projector();
            let recovered = p.transpose() * (&p - &t.t).transpose() * &cp.metric * &p;
            assert!((recovered - &sol.g).amax() < 1e-12);
        }
    }
}

#[test]
fn all_p1_choice_at_index_zero() {
    let s = with_index(2, 0.0);
    let cp = s.point(&[]).unwrap();
    let basis = adapted_phi_basis(&cp).unwrap();
    let t = semi_error_tensor(&cp, &basis, 0.0, &[PointChoice::P1, PointChoice::P1]).unwrap();
    assert_eq!(t.eigenvalues, vec![2.0, 2.0, 0.0, 0.0]);
    let sols = enumerate_para_solutions(&cp, &basis, 0.0).unwrap();
    assert_eq!(t.recovered_metric(), sols[3].g_basis);
}

#[test]
fn unit_eigenvalue_and_bad_index_are_rejected() {
    let s = with_index(1, 0.0);
    let cp = s.point(&[]).unwrap();
    let basis = adapted_phi_basis(&cp).unwrap();
    assert!(matches!(
        semi_error_tensor_from_pairs(&cp, &basis, 0.0, &[(1.0, 0.5)]),
        Err(Error::Infeasible(_))
    ));
    for index in [1.0, -1.0, 2.0] {
        assert!(matches!(enumerate_para_solutions(&cp, &basis, index), Err(Error::Infeasible(_))));
    }
    let fit = NullityFit::declared(0.0, -2.0);
    assert!(matches!(para_solutions_at(&s, &[], &fit), Err(Error::Infeasible(_))));
}

#[test]
fn milnor_para_model() {
    let s = milnor(-1.0, 1.0).unwrap();
    let samples = tangent_pairs(&s, 40, 3).unwrap();
    let fit = fit_nullity(&s, &samples).unwrap();
    let sols = para_solutions_at(&s, &[], &fit).unwrap();
    assert_eq!(sols.len(), 2);
    let cp = s.point(&[]).unwrap();
    let omega = omega_in_basis(&cp, &adapted_phi_basis(&cp).unwrap());
    for sol in &sols {
        assert!(para_compatibility_report(sol, &omega, 1e-10).passed());
        assert!(matches!(sol.apply(&cp.xi), Err(Error::NotHorizontal { .. })));
        let x = &cp.phi * &cp.phi * nalgebra::DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let ffx = sol.apply(&sol.apply(&x).unwrap()).unwrap();
        assert!((ffx - &x).amax() < 1e-12);
    }
}
