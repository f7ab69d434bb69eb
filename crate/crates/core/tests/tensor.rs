use approx::assert_abs_diff_eq;
use kappa_mu::models::{milnor, sheared_heisenberg_chart, stereographic_sphere};
use kappa_mu::sampling::rng;
use kappa_mu::tensor::lie::{lie_derivative_bilinear, lie_derivative_by_flow};
use kappa_mu::tensor::{
    curvature_tensor, levi_civita, lie_derivative, metric_compatibility_residual, riemann_curvature, sym_eigen,
    torsion_residual, Field, FrameModel, StructureConstants, TensorField,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

/// Closed form for an orthonormal constant frame:
/// `2Γ_ijk = c_ijk - c_jki + c_kij` with `c_ijk = g([E_i,E_j],E_k)`.
fn koszul_closed_form(c: &StructureConstants, i: usize, j: usize, k: usize) -> f64 {
    0.5 * (c.get(k, i, j) - c.get(i, j, k) + c.get(j, k, i))
}

#[test]
fn christoffels_match_the_constant_frame_closed_form() {
    for &(l2, l3) in &[(1.0, 3.0), (0.0, 0.0), (2.0, 0.5), (-3.0, -1.0), (0.5, -1.5)] {
        let s = milnor(l2, l3).unwrap();
        let m = s.model();
        let gamma = levi_civita(m, &[]).unwrap();
        let c = m.structure_at(&[]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_abs_diff_eq!(gamma.get(k, i, j), koszul_closed_form(&c, i, j, k), epsilon = 1e-15);
                }
            }
        }
    }
}

#[test]
fn christoffels_match_the_symbolic_oracle() {
    let s = milnor(1.0, 3.0).unwrap();
    let gamma = levi_civita(s.model(), &[]).unwrap();
    let nonzero = [((0, 1, 2), 2.0), ((1, 0, 2), -1.0), ((2, 0, 1), 1.0), ((2, 1, 0), -2.0)];
    for l in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                let expected = nonzero
                    .iter()
                    .find(|(idx, _)| *idx == (l, i, j))
                    .map_or(0.0, |(_, v)| *v);
                assert_abs_diff_eq!(gamma.get(l, i, j), expected, epsilon = 1e-15);
            }
        }
    }
}

#[test]
fn sphere_has_curvature_one() {
    let m = stereographic_sphere();
    let mut r = rng(3);
    for _ in 0..10 {
        let p = [r.random_range(-0.8..0.8), r.random_range(-0.8..0.8)];
        let g = m.metric_at(&p).unwrap();
        let x = DVector::from_vec(vec![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]);
        let y = DVector::from_vec(vec![r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)]);
        let ryy = riemann_curvature(&m, &x, &y, &y, &p).unwrap();
        let lhs = x.dot(&(&g * ryy));
        let gxx = x.dot(&(&g * &x));
        let gyy = y.dot(&(&g * &y));
        let gxy = x.dot(&(&g * &y));
        let area = gxx * gyy - gxy * gxy;
        assert!((lhs - area).abs() < 1e-5 * area.max(1.0), "{lhs} vs {area}");
    }
}

#[test]
fn connection_residuals_at_random_points() {
    let mut r = rng(11);
    let sheared = sheared_heisenberg_chart(0.9).unwrap();
    for _ in 0..100 {
        let p: Vec<f64> = (0..3).map(|_| r.random_range(-1.0..1.0)).collect();
        let gamma = levi_civita(sheared.model(), &p).unwrap();
        assert!(torsion_residual(sheared.model(), &gamma, &p).unwrap() < 1e-8);
        assert!(metric_compatibility_residual(sheared.model(), &gamma, &p).unwrap() < 1e-8);
    }
    for &(l2, l3) in &[(1.0, 3.0), (2.0, 0.5)] {
        let s = milnor(l2, l3).unwrap();
        let gamma = levi_civita(s.model(), &[]).unwrap();
        assert!(torsion_residual(s.model(), &gamma, &[]).unwrap() < 1e-14);
        assert!(metric_compatibility_residual(s.model(), &gamma, &[]).unwrap() < 1e-14);
    }
}

#[test]
fn homogeneous_curvature_symmetries() {
    for &(l2, l3) in &[(1.0, 3.0), (-2.0, -0.5), (0.0, 0.0), (4.0, -1.0)] {
        let r = curvature_tensor(milnor(l2, l3).unwrap().model(), &[]).unwrap();
        assert!(r.antisymmetry_residual() < 1e-8);
        assert!(r.bianchi_residual() < 1e-8);
    }
}

#[test]
fn flow_and_algebraic_lie_derivative_of_left_invariant_metric() {
    // Heisenberg group on a chart: ∂_z = ξ is a Killing field.
    let chart = kappa_mu::models::heisenberg_chart().unwrap();
    let m = chart.model();
    let p = [0.3, -0.2, 0.1];
    let alg = lie_derivative_bilinear(m, chart.xi(), m.metric_field(), &p).unwrap();
    assert!(alg.amax() < 1e-9);
    let flow = lie_derivative_by_flow(m, chart.xi(), &TensorField::Bilinear(m.metric_field().clone()), &p, 0.05).unwrap();
    assert!(flow.max_abs() < 1e-8);
}

#[test]
fn flow_halving_is_second_order() {
    let chart = sheared_heisenberg_chart(1.0).unwrap();
    let m = chart.model();
    let x = Field::chart(|p: &[f64]| DVector::from_vec(vec![1.0 + p[0] * p[1], 0.5 * p[2], 0.3]));
    let t = TensorField::Operator(chart.phi().clone());
    let p = [0.2, 0.1, -0.3];
    let exact = lie_derivative(m, &x, &t, &p).unwrap();
    let err = |step: f64| lie_derivative_by_flow(m, &x, &t, &p, step).unwrap().max_abs_diff(&exact).unwrap();
    let (e1, e2) = (err(0.1), err(0.05));
    let ratio = e1 / e2;
    assert!((ratio - 4.0).abs() < 0.5, "ratio {ratio}");
}

#[test]
fn eigenvalues_of_h_for_unit_lambda() {
    let s = kappa_mu::models::SyntheticPointStructure::new(1, 0.0, 0.0).unwrap();
    let cp = s.contact_point();
    let e = sym_eigen(&cp.h, &cp.metric).unwrap();
    assert_eq!(e.values, vec![1.0, 0.0, -1.0]);
}

#[test]
fn jacobi_violation_is_rejected() {
    // [E1,E2] = E2, [E2,E3] = E1: the cyclic sum is [E3,E2] = -E1
    let c = StructureConstants::from_brackets(3, &[(0, 1, 1, 1.0), (1, 2, 0, 1.0)]).unwrap();
    assert!((c.jacobi_residual() - 1.0).abs() < 1e-15);
    assert!(FrameModel::homogeneous(c, DMatrix::identity(3, 3)).is_err());
}

proptest! {
    #[test]
    fn curvature_is_antisymmetric_in_its_arguments(
        l2 in -4.0f64..4.0, l3 in -4.0f64..4.0,
        x in proptest::collection::vec(-1.0f64..1.0, 3),
        y in proptest::collection::vec(-1.0f64..1.0, 3),
        z in proptest::collection::vec(-1.0f64..1.0, 3),
    ) {
        let r = curvature_tensor(milnor(l2, l3).unwrap().model(), &[]).unwrap();
        let (x, y, z) = (DVector::from_vec(x), DVector::from_vec(y), DVector::from_vec(z));
        let sum = r.apply(&x, &y, &z) + r.apply(&y, &x, &z);
        prop_assert!(sum.amax() < 1e-12);
        prop_assert!(r.apply(&x, &x, &z).amax() < 1e-12);
    }
}
