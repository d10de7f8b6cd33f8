use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{MeshId, SurfaceMesh};

/// One finite real per vertex of a specific mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    mesh_id: MeshId,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: &SurfaceMesh, values: Vec<f64>) -> Result<Self> {
        Self::with_id(mesh.id(), mesh.num_vertices(), values)
    }

    pub(crate) fn with_id(mesh_id: MeshId, expected_len: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != expected_len {
            return Err(Error::validation(
                "field",
                format!("field has {} values for {expected_len} vertices", values.len()),
            ));
        }
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::validation(format!("field[{v}]"), "value is not finite"));
        }
        Ok(ScalarField { mesh_id, values })
    }

    pub fn constant(mesh: &SurfaceMesh, c: f64) -> Result<Self> {
        Self::new(mesh, vec![c; mesh.num_vertices()])
    }

    pub fn from_fn(mesh: &SurfaceMesh, f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new(mesh, (0..mesh.num_vertices()).map(f).collect())
    }

    pub fn mesh_id(&self) -> MeshId {
        self.mesh_id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn belongs_to(&self, mesh: &SurfaceMesh) -> bool {
        self.mesh_id == mesh.id() && self.values.len() == mesh.num_vertices()
    }

    pub(crate) fn check_mesh(&self, mesh: &SurfaceMesh) -> Result<()> {
        if self.belongs_to(mesh) {
            Ok(())
        } else {
            Err(Error::MeshMismatch)
        }
    }

    /// Pointwise map, keeping the mesh association.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::with_id(self.mesh_id, self.values.len(), self.values.iter().map(|&x| f(x)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Flat JSON array ordered by vertex id.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.values).expect("field serializes")
    }

    pub fn from_json(mesh: &SurfaceMesh, text: &str) -> Result<Self> {
        let values: Vec<f64> = serde_json::from_str(text)?;
        Self::new(mesh, values)
    }
}
