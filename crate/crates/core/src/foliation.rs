//! Equidistant foliation by parallel surfaces `Σ(t)` at signed normal distance
//! `t` from the minimal surface.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::DEFAULT_BOUNDARY_TOLERANCE;
use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::triple::MinimalTriple;

pub const SLAB_REL_TOL: f64 = 1e-6;
const CONVEX_SLACK: f64 = 1e-9;

/// Principal stretch factors `(cosh t + λ sinh t, cosh t − λ sinh t)`,
/// evaluated as `½((1 ± λ)e^t + (1 ∓ λ)e^{−t})` to avoid cancellation.
pub fn distortion_factors(lambda: f64, t: f64) -> (f64, f64) {
    let (ep, em) = (t.exp(), (-t).exp());
    (
        0.5 * ((1.0 + lambda) * ep + (1.0 - lambda) * em),
        0.5 * ((1.0 - lambda) * ep + (1.0 + lambda) * em),
    )
}

/// Principal curvatures of the leaf at distance `t` over a point with
/// minimal-surface curvatures `±λ`.
pub fn leaf_curvatures(lambda: f64, t: f64) -> (f64, f64) {
    let th = t.tanh();
    ((lambda + th) / (1.0 + lambda * th), (-lambda + th) / (1.0 - lambda * th))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeafReport {
    pub t: f64,
    pub area: f64,
    pub min_distortion: f64,
    pub principal_curvature_range: (f64, f64),
    pub convex: bool,
}

/// Per-vertex data of the foliation: induced vertex areas and λ clipped to 1.
#[derive(Clone, Debug)]
pub struct FoliationModel {
    weights: Vec<f64>,
    lambda: Vec<f64>,
    lambda0: f64,
    pub t_range: (f64, f64),
}

impl FoliationModel {
    /// λ values within the boundary tolerance above 1 are treated as 1.
    pub fn new(triple: &MinimalTriple, t_range: (f64, f64)) -> Result<Self> {
        if !(t_range.0.is_finite() && t_range.1.is_finite() && t_range.0 <= t_range.1) {
            return Err(Error::validation("t_range", format!("invalid range {t_range:?}")));
        }
        let raw = triple.lambda_values();
        let lambda0 = raw.iter().copied().fold(0.0, f64::max);
        if lambda0 > 1.0 + DEFAULT_BOUNDARY_TOLERANCE {
            return Err(Error::FoliationUndefinedBeyondWaf(lambda0));
        }
        let lambda: Vec<f64> = raw.into_iter().map(|l| l.min(1.0)).collect();
        Ok(FoliationModel {
            weights: triple.induced_areas(),
            lambda0: lambda0.min(1.0),
            lambda,
            t_range,
        })
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// `Σ_v e^{2u} m_v (cosh²t − λ_v² sinh²t)`.
    pub fn area(&self, t: f64) -> f64 {
        let (c2, s2) = (t.cosh().powi(2), t.sinh().powi(2));
        self.weights
            .iter()
            .zip(&self.lambda)
            .map(|(w, l)| w * (c2 - l * l * s2))
            .sum()
    }

    pub fn leaf(&self, t: f64) -> LeafReport {
        let mut min_distortion = f64::INFINITY;
        let mut range = (f64::INFINITY, f64::NEG_INFINITY);
        for &l in &self.lambda {
            let (a, b) = distortion_factors(l, t);
            let (k1, k2) = leaf_curvatures(l, t);
            min_distortion = min_distortion.min(a.min(b));
            range.0 = range.0.min(k1.min(k2));
            range.1 = range.1.max(k1.max(k2));
        }
        LeafReport {
            t,
            area: self.area(t),
            min_distortion,
            principal_curvature_range: range,
            convex: t.abs().tanh() + CONVEX_SLACK >= self.lambda0,
        }
    }

    pub fn slab_volume(&self, t1: f64, t2: f64) -> Result<f64> {
        if !(t1.is_finite() && t2.is_finite()) || t1 > t2 {
            return Err(Error::validation("slab", format!("need finite t1 <= t2, got [{t1}, {t2}]")));
        }
        adaptive_simpson(|t| self.area(t), t1, t2, SLAB_REL_TOL)
    }

    /// Leaf reports at `n` evenly spaced parameters across `t_range`.
    pub fn samples(&self, n: usize) -> Result<Vec<LeafReport>> {
        if n == 0 {
            return Err(Error::validation("samples", "need at least one sample"));
        }
        let (a, b) = self.t_range;
        let ts: Vec<f64> = if n == 1 {
            vec![a]
        } else {
            (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
        };
        Ok(ts.into_par_iter().map(|t| self.leaf(t)).collect())
    }
}

pub fn leaf_report(triple: &MinimalTriple, t: f64) -> Result<LeafReport> {
    if !t.is_finite() {
        return Err(Error::validation("t", "leaf parameter must be finite"));
    }
    Ok(FoliationModel::new(triple, (t, t))?.leaf(t))
}

pub fn slab_volume(triple: &MinimalTriple, t1: f64, t2: f64) -> Result<f64> {
    FoliationModel::new(triple, (t1.min(t2), t1.max(t2)))?.slab_volume(t1, t2)
}
