//! Seeded sampling of points and metric-orthonormal tangent pairs.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::contact::{ContactGeometry, ContactPoint};
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 0x6b6d;

/// A point together with a `g̃`-orthonormal pair `(X, Y)` at that point.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub point: Vec<f64>,
    pub x: DVector<f64>,
    pub y: DVector<f64>,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `count` samples drawn deterministically from `seed`. Pairs are generic
/// vectors of the full tangent space, so both the `Ker η` and the `ξ`
/// components are exercised.
pub fn tangent_pairs<G: ContactGeometry + ?Sized>(geom: &G, count: usize, seed: u64) -> Result<Vec<Sample>> {
    if count == 0 {
        return Err(Error::InsufficientSamples);
    }
    let mut rng = rng(seed);
    let d = geom.dim();
    let mut out = Vec::with_capacity(count);
    let mut cached: Option<(Vec<f64>, DMatrix<f64>)> = None;
    while out.len() < count {
        let point = geom.random_point(&mut rng);
        let g = match &cached {
            Some((p, g)) if *p == point => g.clone(),
            _ => {
                let g = geom.metric_at(&point)?;
                cached = Some((point.clone(), g.clone()));
                g
            }
        };
        let a = random_vector(&mut rng, d);
        let b = random_vector(&mut rng, d);
        if let Some((x, y)) = orthonormal_pair(&g, a, b) {
            out.push(Sample { point, x, y });
        }
    }
    Ok(out)
}

fn random_vector(rng: &mut ChaCha8Rng, d: usize) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.random_range(-1.0..=1.0))
}

fn orthonormal_pair(g: &DMatrix<f64>, a: DVector<f64>, b: DVector<f64>) -> Option<(DVector<f64>, DVector<f64>)> {
    let na = a.dot(&(g * &a)).sqrt();
    if !(na > 1e-3) {
        return None;
    }
    let x = a / na;
    let b = &b - &x * x.dot(&(g * &b));
    let nb = b.dot(&(g * &b)).sqrt();
    if !(nb > 1e-3) {
        return None;
    }
    Some((x, b / nb))
}

/// Evaluates the contact data once per distinct consecutive point and calls
/// `f` for every sample.
pub fn for_each_sample<G, F>(geom: &G, samples: &[Sample], mut f: F) -> Result<()>
where
    G: ContactGeometry + ?Sized,
    F: FnMut(&ContactPoint, &Sample) -> Result<()>,
{
    let mut cached: Option<(Vec<f64>, ContactPoint)> = None;
    for s in samples {
        let fresh = !matches!(&cached, Some((p, _)) if *p == s.point);
        if fresh {
            cached = Some((s.point.clone(), geom.point(&s.point)?));
        }
        let (_, cp) = cached.as_ref().expect("cached point");
        f(cp, s)?;
    }
    Ok(())
}

/// The distinct points of a sample set, in first-seen order.
pub fn distinct_points(samples: &[Sample]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for s in samples {
        if !out.contains(&s.point) {
            out.push(s.point.clone());
        }
    }
    out
}
