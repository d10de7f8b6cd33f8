use super::{MeshId, SurfaceMesh};
use crate::error::{Error, Result};
use crate::field::ScalarField;
pub use crate::linalg::SymmetricMatrix;

/// Smallest admissible triangle angle (radians) when assembling cotangent weights.
pub const ANGLE_FLOOR: f64 = 1e-3;

/// The operator `f ↦ M⁻¹ S f + V f` over the vertices of one mesh, with `S`
/// symmetric with zero row sums, `M` a positive lumped mass and `V` a
/// pointwise potential.
#[derive(Clone, Debug)]
pub struct LinearOperatorHandle {
    mesh_id: MeshId,
    stiffness: SymmetricMatrix,
    mass: Vec<f64>,
    potential: Vec<f64>,
}

impl LinearOperatorHandle {
    pub(crate) fn new(mesh_id: MeshId, stiffness: SymmetricMatrix, mass: Vec<f64>, potential: Vec<f64>) -> Self {
        LinearOperatorHandle {
            mesh_id,
            stiffness,
            mass,
            potential,
        }
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn stiffness(&self) -> &SymmetricMatrix {
        &self.stiffness
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn apply_values(&self, f: &[f64]) -> Vec<f64> {
        let sf = self.stiffness.mul_vec_zero_row_sum(f);
        sf.iter()
            .zip(&self.mass)
            .zip(self.potential.iter().zip(f))
            .map(|((s, m), (v, x))| s / m + v * x)
            .collect()
    }

    pub fn apply(&self, f: &ScalarField) -> Result<ScalarField> {
        if f.mesh_id() != self.mesh_id || f.len() != self.dim() {
            return Err(Error::MeshMismatch);
        }
        ScalarField::with_id(self.mesh_id, self.dim(), self.apply_values(f.values()))
    }

    /// `⟨f, (S + M V) f⟩`, the quadratic form in the mass inner product.
    pub fn quadratic_form(&self, f: &[f64]) -> f64 {
        let sf = self.stiffness.mul_vec_zero_row_sum(f);
        f.iter()
            .zip(&sf)
            .zip(self.mass.iter().zip(&self.potential))
            .map(|((x, s), (m, v))| x * s + m * v * x * x)
            .sum()
    }

    /// Same stiffness and mass with a different potential.
    pub fn with_potential(&self, potential: Vec<f64>) -> Result<Self> {
        if potential.len() != self.dim() || potential.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("potential", "need one finite value per vertex"));
        }
        Ok(LinearOperatorHandle {
            potential,
            ..self.clone()
        })
    }

    /// `f ↦ −(M⁻¹ S f + V f)`.
    pub fn negated(&self) -> Self {
        LinearOperatorHandle {
            mesh_id: self.mesh_id,
            stiffness: self.stiffness.scaled(-1.0),
            mass: self.mass.clone(),
            potential: self.potential.iter().map(|v| -v).collect(),
        }
    }

    /// `S + M (V − shift)`: the symmetric matrix of `op − shift` in the mass inner product.
    pub fn shifted_matrix(&self, shift: f64) -> SymmetricMatrix {
        let d: Vec<f64> = self
            .mass
            .iter()
            .zip(&self.potential)
            .map(|(m, v)| m * (v - shift))
            .collect();
        self.stiffness.plus_diagonal(&d)
    }
}

/// Positive semidefinite cotangent stiffness `K` (constants in its kernel).
pub(crate) fn cotangent_stiffness(mesh: &SurfaceMesh) -> Result<SymmetricMatrix> {
    let mut weights = vec![0.0; mesh.num_edges()];
    for f in 0..mesh.num_faces() {
        let angles = mesh.face_angles(f);
        if let Some(k) = angles.iter().position(|&a| a < ANGLE_FLOOR) {
            return Err(Error::validation(
                format!("face {f}"),
                format!(
                    "angle {:.3e} at vertex {} is below the floor {ANGLE_FLOOR}",
                    angles[k],
                    mesh.faces()[f][k]
                ),
            ));
        }
        let [a, b, c] = mesh.face_lengths(f);
        let area = mesh.face_area(f);
        let cots = [
            (b * b + c * c - a * a) / (4.0 * area),
            (c * c + a * a - b * b) / (4.0 * area),
            (a * a + b * b - c * c) / (4.0 * area),
        ];
        for (k, &e) in mesh.face_edges()[f].iter().enumerate() {
            weights[e] += 0.5 * cots[k];
        }
    }
    let mut entries = Vec::with_capacity(4 * mesh.num_edges());
    for (e, &[i, j]) in mesh.edges().iter().enumerate() {
        let w = weights[e];
        entries.extend([(i, j, -w), (j, i, -w), (i, i, w), (j, j, w)]);
    }
    Ok(SymmetricMatrix::from_triplets(mesh.num_vertices(), entries))
}

/// Cotangent Laplace–Beltrami operator with barycentric lumped mass. Applying
/// it gives `Δf = −M⁻¹ K f`, the nonpositive analyst's Laplacian.
pub fn laplacian(mesh: &SurfaceMesh) -> Result<LinearOperatorHandle> {
    let k = cotangent_stiffness(mesh)?;
    Ok(LinearOperatorHandle::new(
        mesh.id(),
        k.scaled(-1.0),
        mesh.vertex_areas(),
        vec![0.0; mesh.num_vertices()],
    ))
}

/// `Σ_v f(v)·weight(v)·area(v)` with barycentric vertex areas.
pub fn integrate(mesh: &SurfaceMesh, f: &ScalarField, weight: Option<&ScalarField>) -> Result<f64> {
    f.check_mesh(mesh)?;
    if let Some(w) = weight {
        w.check_mesh(mesh)?;
    }
    let areas = mesh.vertex_areas();
    Ok(match weight {
        Some(w) => f
            .values()
            .iter()
            .zip(w.values())
            .zip(&areas)
            .map(|((x, w), a)| x * w * a)
            .sum(),
        None => f.values().iter().zip(&areas).map(|(x, a)| x * a).sum(),
    })
}
