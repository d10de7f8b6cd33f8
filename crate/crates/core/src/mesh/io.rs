use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{MeshParts, SurfaceMesh};
use crate::error::{Error, Result};

/// On-disk mesh layout. Edge lengths are keyed `"i-j"`; either vertex order is
/// accepted on load, `i < j` is written.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeshFile {
    pub genus: usize,
    pub vertices: Vec<usize>,
    pub faces: Vec<[usize; 3]>,
    pub edge_lengths: BTreeMap<String, f64>,
    #[serde(default)]
    pub marked_curves: BTreeMap<String, Vec<usize>>,
    #[serde(default)]
    pub refinement_level: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chart: Option<Vec<[f64; 2]>>,
}

impl From<&SurfaceMesh> for MeshFile {
    fn from(mesh: &SurfaceMesh) -> Self {
        MeshFile {
            genus: mesh.genus(),
            vertices: (0..mesh.num_vertices()).collect(),
            faces: mesh.faces().to_vec(),
            edge_lengths: mesh
                .edges()
                .iter()
                .zip(mesh.edge_lengths())
                .map(|(&[a, b], &l)| (format!("{a}-{b}"), l))
                .collect(),
            marked_curves: mesh.marked_curves().clone(),
            refinement_level: mesh.refinement_level(),
            chart: mesh.chart().map(|c| c.to_vec()),
        }
    }
}

impl TryFrom<MeshFile> for SurfaceMesh {
    type Error = Error;

    fn try_from(file: MeshFile) -> Result<SurfaceMesh> {
        for (pos, &v) in file.vertices.iter().enumerate() {
            if v != pos {
                return Err(Error::validation(
                    format!("vertices[{pos}]"),
                    format!("vertex ids must be 0..V-1 in order, found {v}"),
                ));
            }
        }
        let mut lengths = HashMap::with_capacity(file.edge_lengths.len());
        for (key, &l) in &file.edge_lengths {
            let (a, b) = parse_edge_key(key)?;
            if a == b {
                return Err(Error::validation(format!("edge_lengths[\"{key}\"]"), "self-loop edge"));
            }
            let k = super::edge_key(a, b);
            if lengths.insert(k, l).is_some() {
                return Err(Error::validation(
                    format!("edge_lengths[\"{key}\"]"),
                    "edge listed twice",
                ));
            }
        }
        SurfaceMesh::from_parts(MeshParts {
            genus: file.genus,
            num_vertices: file.vertices.len(),
            faces: file.faces,
            lengths,
            marked_curves: file.marked_curves,
            refinement_level: file.refinement_level,
            chart: file.chart,
        })
    }
}

fn parse_edge_key(key: &str) -> Result<(usize, usize)> {
    let bad = || Error::validation(format!("edge_lengths[\"{key}\"]"), "edge key must look like \"i-j\"");
    let (a, b) = key.split_once('-').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

impl SurfaceMesh {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MeshFile::from(self)).expect("mesh serializes")
    }

    pub fn from_json(text: &str) -> Result<SurfaceMesh> {
        let file: MeshFile = serde_json::from_str(text)?;
        SurfaceMesh::try_from(file)
    }
}
