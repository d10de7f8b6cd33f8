//! A fixed smooth manufactured solution on the polygon surface, used to
//! measure how the discrete solution converges under refinement.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::gauss::{solve_gauss, SolveOptions};
use crate::mesh::{build_polygon_mesh, PolygonGeometry, SurfaceMesh};
use crate::qdiff::{Provenance, QuadDiffNormField};

/// Radial bump `u(ρ) = u₀ + A (1 − (ρ/R)²)⁴` about the polygon center, with
/// `ρ` the hyperbolic distance and `R` a fraction of the inradius, so the
/// bump never touches the glued sides.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothProblem {
    pub u0: f64,
    pub amplitude: f64,
    pub radius: f64,
}

impl SmoothProblem {
    pub fn for_genus(genus: usize) -> Self {
        SmoothProblem {
            u0: 0.5 * 0.8f64.ln(),
            amplitude: 0.01,
            radius: 0.9 * PolygonGeometry::regular(genus).inradius,
        }
    }

    pub fn u(&self, rho: f64) -> f64 {
        let s = rho / self.radius;
        if s >= 1.0 {
            self.u0
        } else {
            self.u0 + self.amplitude * (1.0 - s * s).powi(4)
        }
    }

    /// Hyperbolic Laplacian `u'' + coth ρ · u'` of the radial profile.
    pub fn laplacian(&self, rho: f64) -> f64 {
        let (r, a) = (self.radius, self.amplitude);
        let s = rho / r;
        if s >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - s * s;
        let du = -8.0 * a * rho / (r * r) * w.powi(3);
        let d2u = -8.0 * a / (r * r) * w.powi(3) + 48.0 * a * rho * rho / r.powi(4) * w * w;
        // coth ρ · u' stays bounded at ρ = 0 where u' / ρ is finite.
        let radial = if rho < 1e-12 {
            -8.0 * a / (r * r)
        } else {
            du / rho.tanh()
        };
        d2u + radial
    }

    /// `q = e^{2u}(Δu − e^{2u} + 1)` from the smooth profile.
    pub fn q(&self, rho: f64) -> f64 {
        let e = (2.0 * self.u(rho)).exp();
        e * (self.laplacian(rho) - e + 1.0)
    }
}

fn center_distances(mesh: &SurfaceMesh) -> Result<Vec<f64>> {
    let chart = mesh
        .chart()
        .ok_or_else(|| Error::validation("mesh", "smooth problem needs a mesh with a polygon chart"))?;
    Ok(chart.iter().map(|&[x, y]| 2.0 * x.hypot(y).atanh()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct MmsLevel {
    pub refinement: usize,
    pub vertices: usize,
    pub error_inf: f64,
    pub iterations: usize,
}

/// Solve the smooth problem at one refinement level and return the L∞ error
/// against the exact profile sampled at the vertices.
pub fn mms_level(genus: usize, refinement: usize, opts: &SolveOptions) -> Result<MmsLevel> {
    let problem = SmoothProblem::for_genus(genus);
    let mesh = build_polygon_mesh(genus, refinement)?;
    let rho = center_distances(&mesh)?;
    let q: Vec<f64> = rho.iter().map(|&r| problem.q(r).max(0.0)).collect();
    let q = QuadDiffNormField::checked(ScalarField::new(&mesh, q)?, Vec::new(), Provenance::Manufactured)?;
    let sol = solve_gauss(&mesh, &q, opts)?;
    let exact = ScalarField::new(&mesh, rho.iter().map(|&r| problem.u(r)).collect())?;
    let error_inf = sol
        .u
        .values()
        .iter()
        .zip(exact.values())
        .fold(0.0, |m, (a, b)| f64::max(m, (a - b).abs()));
    Ok(MmsLevel {
        refinement,
        vertices: mesh.num_vertices(),
        error_inf,
        iterations: sol.iterations,
    })
}

pub fn mms_study(genus: usize, levels: &[usize], opts: &SolveOptions) -> Result<Vec<MmsLevel>> {
    levels.iter().map(|&r| mms_level(genus, r, opts)).collect()
}
