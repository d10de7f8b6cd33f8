use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::gauss::{residual, solve_gauss, Branch, ConformalSolution, SolveOptions};
use crate::mesh::{MeshFile, SurfaceMesh};
use crate::qdiff::{QFieldFile, QuadDiffNormField};

/// Residual accepted when a stored solution is re-checked on load.
pub const RELOAD_RESIDUAL_LIMIT: f64 = 1e-8;

/// Base metric, conformal factor and differential norm of one minimal surface.
#[derive(Clone, Debug)]
pub struct MinimalTriple {
    mesh: SurfaceMesh,
    solution: ConformalSolution,
    q: QuadDiffNormField,
}

impl MinimalTriple {
    pub fn new(mesh: SurfaceMesh, q: QuadDiffNormField, solution: ConformalSolution) -> Result<Self> {
        if !solution.converged {
            return Err(Error::validation("solution", "triple requires a converged solution"));
        }
        if !q.belongs_to(&mesh) || !solution.u.belongs_to(&mesh) {
            return Err(Error::MeshMismatch);
        }
        Ok(MinimalTriple { mesh, solution, q })
    }

    /// Solve the Gauss equation for `q` and bundle the result.
    pub fn solve(mesh: SurfaceMesh, q: QuadDiffNormField, opts: &SolveOptions) -> Result<Self> {
        let solution = solve_gauss(&mesh, &q, opts)?;
        Self::new(mesh, q, solution)
    }

    pub fn mesh(&self) -> &SurfaceMesh {
        &self.mesh
    }

    pub fn solution(&self) -> &ConformalSolution {
        &self.solution
    }

    pub fn u(&self) -> &ScalarField {
        &self.solution.u
    }

    pub fn q(&self) -> &QuadDiffNormField {
        &self.q
    }

    /// `λ = √q e^{−2u}` per vertex.
    pub fn lambda_values(&self) -> Vec<f64> {
        self.q
            .values()
            .iter()
            .zip(self.solution.u.values())
            .map(|(&q, &u)| q.sqrt() * (-2.0 * u).exp())
            .collect()
    }

    pub fn lambda0(&self) -> f64 {
        self.lambda_values().into_iter().fold(0.0, f64::max)
    }

    /// Induced-metric vertex areas `e^{2u}·area_σ`.
    pub fn induced_areas(&self) -> Vec<f64> {
        self.mesh
            .vertex_areas()
            .iter()
            .zip(self.solution.u.values())
            .map(|(a, &u)| a * (2.0 * u).exp())
            .collect()
    }

    pub fn to_file(&self) -> TripleFile {
        TripleFile {
            mesh: MeshFile::from(&self.mesh),
            q: self.q.to_file(),
            solution: SolutionFile {
                u: self.solution.u.values().to_vec(),
                residual_norm: self.solution.residual_norm,
                iterations: self.solution.iterations,
                branch: self.solution.branch,
                converged: self.solution.converged,
            },
        }
    }

    /// Rebuild from a file, re-validating the mesh and re-checking the residual.
    pub fn from_file(file: TripleFile) -> Result<Self> {
        let mesh = SurfaceMesh::try_from(file.mesh)?;
        let q = QuadDiffNormField::from_file(&mesh, file.q)?;
        let u = ScalarField::new(&mesh, file.solution.u)?;
        let r = residual(&mesh, &q, &u)?.max_abs();
        if !file.solution.converged || r > RELOAD_RESIDUAL_LIMIT {
            return Err(Error::validation(
                "solution",
                format!("stored solution is not converged (residual {r:.3e})"),
            ));
        }
        let solution = ConformalSolution {
            u,
            residual_norm: file.solution.residual_norm,
            iterations: file.solution.iterations,
            branch: file.solution.branch,
            converged: true,
        };
        Self::new(mesh, q, solution)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_file()).expect("triple serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionFile {
    pub u: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub branch: Branch,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TripleFile {
    pub mesh: MeshFile,
    pub q: QFieldFile,
    pub solution: SolutionFile,
}
