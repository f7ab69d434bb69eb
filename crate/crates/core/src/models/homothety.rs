use nalgebra::DMatrix;
use rand_chacha::ChaCha8Rng;

use super::SyntheticPointStructure;
use crate::contact::{ContactGeometry, ContactMetricStructure, ContactPoint};
use crate::error::{Error, Result};

/// Either kind of structure the pipelines accept.
#[derive(Clone, Debug)]
pub enum Structure {
    Model(ContactMetricStructure),
    Synthetic(SyntheticPointStructure),
}

impl From<ContactMetricStructure> for Structure {
    fn from(s: ContactMetricStructure) -> Self {
        Structure::Model(s)
    }
}

impl From<SyntheticPointStructure> for Structure {
    fn from(s: SyntheticPointStructure) -> Self {
        Structure::Synthetic(s)
    }
}

impl Structure {
    fn geometry(&self) -> &dyn ContactGeometry {
        match self {
            Structure::Model(m) => m,
            Structure::Synthetic(s) => s,
        }
    }

    pub fn is_synthetic(&self) -> bool {
        matches!(self, Structure::Synthetic(_))
    }
}

impl ContactGeometry for Structure {
    fn dim(&self) -> usize {
        self.geometry().dim()
    }

    fn point(&self, p: &[f64]) -> Result<ContactPoint> {
        self.geometry().point(p)
    }

    fn metric_at(&self, p: &[f64]) -> Result<DMatrix<f64>> {
        self.geometry().metric_at(p)
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.geometry().random_point(rng)
    }

    fn is_uniform(&self) -> bool {
        self.geometry().is_uniform()
    }

    fn as_model(&self) -> Result<&ContactMetricStructure> {
        match self {
            Structure::Model(m) => Ok(m),
            Structure::Synthetic(_) => Err(Error::NoCurvature),
        }
    }
}

fn check_constant(a: f64) -> Result<()> {
    if !a.is_finite() {
        return Err(Error::param("a", "must be finite"));
    }
    if a == 0.0 {
        return Err(Error::param("a", "must be nonzero"));
    }
    if a < 0.0 {
        return Err(Error::param("a", "must be positive for a Riemannian metric"));
    }
    Ok(())
}

/// `D_a`-homothety: `η' = aη`, `ξ' = ξ/a`, `φ' = φ`, `g' = a g̃ + a(a-1) η⊗η`.
pub fn apply_d_homothety(s: &Structure, a: f64) -> Result<Structure> {
    check_constant(a)?;
    Ok(match s {
        Structure::Synthetic(p) => Structure::Synthetic(p.d_homothety(a)),
        Structure::Model(m) => {
            let eta = m.eta().map(move |e| e * a)?;
            let xi = m.xi().map(move |x| x / a)?;
            let metric = m
                .metric()
                .combine(m.eta(), move |g, e| g * a + e * e.transpose() * (a * (a - 1.0)))?;
            Structure::Model(m.with_tensors(eta, xi, m.phi().clone(), metric)?)
        }
    })
}
