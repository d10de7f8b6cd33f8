//! Principal-curvature classification and the closed-form geometric bounds.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::gauss::ConformalSolution;
use crate::mesh::SurfaceMesh;
use crate::qdiff::QuadDiffNormField;

pub const DEFAULT_BOUNDARY_TOLERANCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Fuchsian,
    AlmostFuchsian,
    WeaklyAFBoundary,
    #[serde(rename = "BeyondWAF")]
    BeyondWaf,
}

impl Classification {
    pub fn of(lambda0: f64, tolerance: f64) -> Self {
        if lambda0 <= tolerance {
            Classification::Fuchsian
        } else if lambda0 > 1.0 + tolerance {
            Classification::BeyondWaf
        } else if (lambda0 - 1.0).abs() <= tolerance {
            Classification::WeaklyAFBoundary
        } else {
            Classification::AlmostFuchsian
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Fuchsian => "Fuchsian",
            Classification::AlmostFuchsian => "AlmostFuchsian",
            Classification::WeaklyAFBoundary => "WeaklyAFBoundary",
            Classification::BeyondWaf => "BeyondWAF",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CurvatureReport {
    pub lambda_field: ScalarField,
    pub lambda0: f64,
    pub argmax_vertex: usize,
    pub classification: Classification,
    pub tolerance: f64,
}

/// λ field, its maximum (ties to the smallest vertex id) and the class.
pub fn curvature_report(
    mesh: &SurfaceMesh,
    q: &QuadDiffNormField,
    solution: &ConformalSolution,
    tolerance: f64,
) -> Result<CurvatureReport> {
    if !solution.converged {
        return Err(Error::validation("solution", "curvature report needs a converged solution"));
    }
    if !(tolerance >= 0.0 && tolerance < 0.5) {
        return Err(Error::validation("tolerance", format!("tolerance must lie in [0, 0.5), got {tolerance}")));
    }
    q.field().check_mesh(mesh)?;
    solution.u.check_mesh(mesh)?;
    let lambda: Vec<f64> = q
        .values()
        .iter()
        .zip(solution.u.values())
        .map(|(&q, &u)| q.sqrt() * (-2.0 * u).exp())
        .collect();
    let mut argmax = 0;
    for (v, &l) in lambda.iter().enumerate() {
        if l > lambda[argmax] {
            argmax = v;
        }
    }
    let lambda0 = lambda[argmax];
    Ok(CurvatureReport {
        lambda_field: ScalarField::new(mesh, lambda)?,
        lambda0,
        argmax_vertex: argmax,
        classification: Classification::of(lambda0, tolerance),
        tolerance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeometricBounds {
    pub hausdorff_upper: f64,
    pub core_volume_upper: f64,
    pub qi_constant_upper: f64,
    pub genus: usize,
}

/// Hausdorff-dimension, convex-core volume and quasi-isometry bounds of an
/// almost Fuchsian manifold; all `+∞` once `lambda0 ≥ 1`.
pub fn geometric_bounds(lambda0: f64, genus: usize) -> Result<GeometricBounds> {
    if !(lambda0 >= 0.0) {
        return Err(Error::validation("lambda0", format!("lambda0 must be >= 0, got {lambda0}")));
    }
    if genus < 2 {
        return Err(Error::validation("genus", format!("genus must be >= 2, got {genus}")));
    }
    if lambda0 >= 1.0 {
        return Ok(GeometricBounds {
            hausdorff_upper: f64::INFINITY,
            core_volume_upper: f64::INFINITY,
            qi_constant_upper: f64::INFINITY,
            genus,
        });
    }
    let l = lambda0;
    Ok(GeometricBounds {
        hausdorff_upper: 1.0 + l * l,
        core_volume_upper: 4.0 * PI * (genus as f64 - 1.0) * (l / (1.0 - l * l) + l.atanh()),
        qi_constant_upper: (1.0 + l) / (1.0 - l),
        genus,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DilatationReport {
    pub kappa1: f64,
    pub kappa2: f64,
    pub epsilon: f64,
    pub dilatation_upper: f64,
}

/// ε = min over i, j of |1 + (−1)^j κ_i| and the dilatation bound 2/ε.
pub fn dilatation_bound(kappa1: f64, kappa2: f64) -> Result<DilatationReport> {
    if !(kappa1.is_finite() && kappa2.is_finite()) {
        return Err(Error::validation("kappa", "principal curvatures must be finite"));
    }
    let epsilon = [kappa1, kappa2]
        .iter()
        .flat_map(|&k| [(1.0 - k).abs(), (1.0 + k).abs()])
        .fold(f64::INFINITY, f64::min);
    if kappa1.abs() >= 1.0 || kappa2.abs() >= 1.0 || epsilon <= 0.0 {
        return Err(Error::BoundInapplicable(format!(
            "needs |kappa| < 1, got ({kappa1}, {kappa2})"
        )));
    }
    Ok(DilatationReport {
        kappa1,
        kappa2,
        epsilon,
        dilatation_upper: 2.0 / epsilon,
    })
}
