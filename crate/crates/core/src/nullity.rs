//! Fitting `R(X,Y)ξ = κ(η(Y)X - η(X)Y) + μ(η(Y)hX - η(X)hY)`, the Boeckx
//! index, and the homothety laws of the constants.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::contact::{ContactGeometry, ContactPoint, SASAKIAN_THRESHOLD};
use crate::error::{Error, Result};
use crate::report::ResidualReport;
use crate::sampling::Sample;
use crate::tensor::{curvature_tensor, sym_eigen, CurvatureTensor};

/// Indices this close to `±1` are treated as the boundary.
pub const INDEX_GUARD: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullityFit {
    pub kappa: f64,
    /// `None` when `h` vanishes and `μ` cannot be determined.
    pub mu: Option<f64>,
    pub residual: f64,
    pub lambda: f64,
    /// `None` when `κ = 1` or `μ` is indeterminate.
    pub index: Option<f64>,
}

impl NullityFit {
    fn from_constants(kappa: f64, mu: Option<f64>, residual: f64) -> Self {
        let lambda = (1.0 - kappa).max(0.0).sqrt();
        let index = match mu {
            Some(m) if lambda >= SASAKIAN_THRESHOLD => boeckx_index(kappa, m).ok(),
            _ => None,
        };
        NullityFit {
            kappa,
            mu,
            residual,
            lambda,
            index,
        }
    }

    /// Constants known by construction (pointwise normal forms).
    pub fn declared(kappa: f64, mu: f64) -> Self {
        let lambda = (1.0 - kappa).max(0.0).sqrt();
        let mu = (lambda >= SASAKIAN_THRESHOLD).then_some(mu);
        Self::from_constants(kappa, mu, 0.0)
    }

    pub fn accepted(&self, threshold: f64) -> bool {
        self.residual.is_finite() && self.residual <= threshold
    }

    /// `μ` for formulas where an indeterminate value drops out.
    pub fn mu_or_zero(&self) -> f64 {
        self.mu.unwrap_or(0.0)
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.lambda, self.index)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `|I| > 1`: Kähler base.
    Riemannian,
    /// `|I| < 1`: para-Kähler bases.
    Para,
    /// `|I| = 1` within the guard band.
    Boundary,
    /// `κ = 1`, `h = 0`.
    Sasakian,
}

impl Regime {
    pub fn classify(lambda: f64, index: Option<f64>) -> Self {
        match index {
            _ if lambda < SASAKIAN_THRESHOLD => Regime::Sasakian,
            None => Regime::Sasakian,
            Some(i) if i.abs() > 1.0 + INDEX_GUARD => Regime::Riemannian,
            Some(i) if i.abs() < 1.0 => Regime::Para,
            Some(_) => Regime::Boundary,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Riemannian => "riemannian",
            Regime::Para => "para",
            Regime::Boundary => "boundary",
            Regime::Sasakian => "sasakian",
        }
    }
}

/// `(1 - μ/2) / √(1 - κ)`.
pub fn boeckx_index(kappa: f64, mu: f64) -> Result<f64> {
    if !(kappa < 1.0) {
        return Err(Error::IndexUndefined { kappa });
    }
    Ok((1.0 - mu / 2.0) / (1.0 - kappa).sqrt())
}

/// Constants after a `D_a`-homothety.
pub fn d_homothety_constants(kappa: f64, mu: f64, a: f64) -> Result<(f64, f64)> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::param("a", "must be nonzero"));
    }
    Ok(((kappa + a * a - 1.0) / (a * a), (mu + 2.0 * a - 2.0) / a))
}

/// The three vectors entering the nullity condition for one sample.
struct NullityTerms {
    curvature: DVector<f64>,
    kappa_term: DVector<f64>,
    mu_term: DVector<f64>,
}

fn nullity_terms<G: ContactGeometry + ?Sized>(geom: &G, samples: &[Sample]) -> Result<Vec<(ContactPoint, NullityTerms)>> {
    let model = geom.as_model()?;
    let mut out = Vec::with_capacity(samples.len());
    let mut cached: Option<(Vec<f64>, ContactPoint, CurvatureTensor)> = None;
    for s in samples {
        if !matches!(&cached, Some((p, _, _)) if *p == s.point) {
            let cp = geom.point(&s.point)?;
            let r = curvature_tensor(model.model(), &s.point)?;
            cached = Some((s.point.clone(), cp, r));
        }
        let (_, cp, r) = cached.as_ref().expect("cached");
        let (ex, ey) = (cp.eta.dot(&s.x), cp.eta.dot(&s.y));
        let terms = NullityTerms {
            curvature: r.apply(&s.x, &s.y, &cp.xi),
            kappa_term: &s.x * ey - &s.y * ex,
            mu_term: &cp.h * (&s.x * ey - &s.y * ex),
        };
        out.push((cp.clone(), terms));
    }
    Ok(out)
}

fn defect(cp: &ContactPoint, t: &NullityTerms, kappa: f64, mu: f64) -> f64 {
    let v = &t.curvature - &t.kappa_term * kappa - &t.mu_term * mu;
    cp.norm(&v)
}

/// Least-squares `(κ, μ)` over the samples, measured in the metric norm.
pub fn fit_nullity<G: ContactGeometry + ?Sized>(geom: &G, samples: &[Sample]) -> Result<NullityFit> {
    geom.as_model()?;
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples);
    }
    let terms = nullity_terms(geom, samples)?;
    let mut h_size: f64 = 0.0;
    for p in crate::sampling::distinct_points(samples) {
        let cp = geom.point(&p)?;
        let eig = sym_eigen(&cp.h, &cp.metric).map(|e| e.values[0].abs().max(e.values[e.values.len() - 1].abs()));
        h_size = h_size.max(eig.unwrap_or_else(|_| cp.h.amax()));
    }

    let mut normal = Matrix2::<f64>::zeros();
    let mut rhs = Vector2::<f64>::zeros();
    for (cp, t) in &terms {
        let (aa, ab, bb) = (
            cp.inner(&t.kappa_term, &t.kappa_term),
            cp.inner(&t.kappa_term, &t.mu_term),
            cp.inner(&t.mu_term, &t.mu_term),
        );
        normal += Matrix2::new(aa, ab, ab, bb);
        rhs += Vector2::new(cp.inner(&t.kappa_term, &t.curvature), cp.inner(&t.mu_term, &t.curvature));
    }
    if normal[(0, 0)] < 1e-12 {
        return Err(Error::InsufficientSamples);
    }
    let (kappa, mu) = if h_size < SASAKIAN_THRESHOLD {
        (rhs[0] / normal[(0, 0)], None)
    } else {
        let det = normal.determinant();
        if det.abs() < 1e-12 * normal.norm_squared() {
            return Err(Error::InsufficientSamples);
        }
        let sol = normal.try_inverse().ok_or(Error::InsufficientSamples)? * rhs;
        (sol[0], Some(sol[1]))
    };
    let mu_value = mu.unwrap_or(0.0);
    let residual = terms
        .iter()
        .map(|(cp, t)| defect(cp, t, kappa, mu_value))
        .fold(0.0, f64::max);
    Ok(NullityFit::from_constants(kappa, mu, residual))
}

/// Largest defect of the nullity condition with the given constants.
pub fn nullity_residual<G: ContactGeometry + ?Sized>(geom: &G, kappa: f64, mu: f64, samples: &[Sample]) -> Result<f64> {
    let terms = nullity_terms(geom, samples)?;
    if terms.is_empty() {
        return Err(Error::InsufficientSamples);
    }
    Ok(terms
        .iter()
        .map(|(cp, t)| defect(cp, t, kappa, mu))
        .fold(0.0, f64::max))
}

/// Residual of `L_ξ h = (2 - μ)φh + 2(1 - κ)φ` with the fitted constants.
pub fn lie_xi_h_report<G: ContactGeometry + ?Sized>(
    geom: &G,
    fit: &NullityFit,
    samples: &[Sample],
    threshold: f64,
    tolerance: f64,
) -> Result<ResidualReport> {
    if !fit.accepted(threshold) {
        return Err(Error::NotKappaMu {
            residual: fit.residual,
            threshold,
        });
    }
    let mu = fit.mu_or_zero();
    let mut report = ResidualReport::new();
    let mut cached: Option<(Vec<f64>, ContactPoint, DMatrix<f64>)> = None;
    for s in samples {
        if !matches!(&cached, Some((p, _, _)) if *p == s.point) {
            let cp = geom.point(&s.point)?;
            let lie = geom.lie_xi_h(&s.point)?;
            let diff = lie - (&cp.phi * &cp.h) * (2.0 - mu) - &cp.phi * (2.0 * (1.0 - fit.kappa));
            cached = Some((s.point.clone(), cp, diff));
        }
        let (_, cp, diff) = cached.as_ref().expect("cached");
        let r = cp.norm(&(diff * &s.x)).max(cp.norm(&(diff * &s.y)));
        report.upper("lie_xi_h", r, tolerance);
    }
    Ok(report)
}
