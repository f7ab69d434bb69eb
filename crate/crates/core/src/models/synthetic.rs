use nalgebra::{DMatrix, DVector};
use rand_chacha::ChaCha8Rng;

use crate::contact::{ContactGeometry, ContactMetricStructure, ContactPoint, SASAKIAN_THRESHOLD};
use crate::error::{Error, Result};

/// One tangent space carrying the normal form of a `(κ,μ)` structure.
///
/// Frame order is `e_1..e_n, φe_1..φe_n, ξ`, orthonormal, with
/// `h = diag(λ,…,λ, -λ,…,-λ, 0)` and `λ = √(1-κ)`. There is no
/// neighborhood, so nothing here can be differentiated.
#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticPointStructure {
    n: usize,
    kappa: f64,
    mu: f64,
    point: ContactPoint,
}

impl SyntheticPointStructure {
    pub fn new(n: usize, kappa: f64, mu: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "n >= 1 required"));
        }
        if !kappa.is_finite() || !mu.is_finite() {
            return Err(Error::param("kappa", "kappa and mu must be finite"));
        }
        if kappa > 1.0 {
            return Err(Error::param("kappa", "κ ≤ 1 required"));
        }
        let lambda = (1.0 - kappa).sqrt();
        if kappa < 1.0 && lambda < SASAKIAN_THRESHOLD {
            return Err(Error::param(
                "kappa",
                "κ lies in the degenerate band just below 1; use κ = 1 for the Sasakian case",
            ));
        }
        let d = 2 * n + 1;
        let xi = DVector::from_fn(d, |i, _| if i == 2 * n { 1.0 } else { 0.0 });
        let mut phi = DMatrix::zeros(d, d);
        let mut h = DMatrix::zeros(d, d);
        for i in 0..n {
            phi[(n + i, i)] = 1.0;
            phi[(i, n + i)] = -1.0;
            h[(i, i)] = lambda;
            h[(n + i, n + i)] = -lambda;
        }
        let metric = DMatrix::identity(d, d);
        let d_eta = &metric * &phi;
        Ok(SyntheticPointStructure {
            n,
            kappa,
            mu,
            point: ContactPoint {
                eta: xi.clone(),
                xi,
                phi,
                metric,
                d_eta,
                h,
                lie_xi_metric: None,
            },
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The `κ` this structure realizes.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn lambda(&self) -> f64 {
        self.point.h[(0, 0)].abs()
    }

    pub fn contact_point(&self) -> &ContactPoint {
        &self.point
    }

    /// `D_a`-homothety of the pointwise tensors; the declared constants
    /// transform as `κ ↦ (κ + a² - 1)/a²`, `μ ↦ (μ + 2a - 2)/a`.
    pub(crate) fn d_homothety(&self, a: f64) -> Self {
        let p = &self.point;
        let eta = &p.eta * a;
        let metric = &p.metric * a + &p.eta * p.eta.transpose() * (a * (a - 1.0));
        SyntheticPointStructure {
            n: self.n,
            kappa: (self.kappa + a * a - 1.0) / (a * a),
            mu: (self.mu + 2.0 * a - 2.0) / a,
            point: ContactPoint {
                eta,
                xi: &p.xi / a,
                phi: p.phi.clone(),
                metric,
                d_eta: &p.d_eta * a,
                h: &p.h / a,
                lie_xi_metric: None,
            },
        }
    }
}

impl ContactGeometry for SyntheticPointStructure {
    fn dim(&self) -> usize {
        2 * self.n + 1
    }

    fn point(&self, _p: &[f64]) -> Result<ContactPoint> {
        Ok(self.point.clone())
    }

    fn metric_at(&self, _p: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.point.metric.clone())
    }

    fn random_point(&self, _rng: &mut ChaCha8Rng) -> Vec<f64> {
        Vec::new()
    }

    fn is_uniform(&self) -> bool {
        true
    }

    fn as_model(&self) -> Result<&ContactMetricStructure> {
        Err(Error::NoCurvature)
    }
}
