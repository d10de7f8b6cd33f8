use std::collections::{BTreeMap, HashMap};

use super::{edge_key, MeshParts, SurfaceMesh};
use crate::error::Result;

/// 1→4 midpoint subdivision of the flat metric: every edge is halved and the
/// three new interior edges get half the length of the side they parallel, so
/// each triangle splits into four congruent copies and total area is unchanged.
/// New vertices are numbered after the old ones in edge order.
pub fn refine(mesh: &SurfaceMesh) -> Result<SurfaceMesh> {
    let nv = mesh.num_vertices();
    let midpoint = |e: usize| nv + e;
    let lengths = mesh.edge_lengths();

    let mut faces = Vec::with_capacity(4 * mesh.num_faces());
    let mut new_lengths: HashMap<(usize, usize), f64> = HashMap::with_capacity(2 * mesh.num_edges() + 3 * mesh.num_faces());
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let half = 0.5 * lengths[e];
        new_lengths.insert(edge_key(a, midpoint(e)), half);
        new_lengths.insert(edge_key(b, midpoint(e)), half);
    }
    for (f, &[v0, v1, v2]) in mesh.faces().iter().enumerate() {
        let [e0, e1, e2] = mesh.face_edges()[f];
        let (m0, m1, m2) = (midpoint(e0), midpoint(e1), midpoint(e2));
        faces.push([v0, m2, m1]);
        faces.push([v1, m0, m2]);
        faces.push([v2, m1, m0]);
        faces.push([m0, m1, m2]);
        // m_k sits on the edge opposite v_k; segment m_i–m_j parallels edge e_k
        new_lengths.insert(edge_key(m1, m2), 0.5 * lengths[e0]);
        new_lengths.insert(edge_key(m2, m0), 0.5 * lengths[e1]);
        new_lengths.insert(edge_key(m0, m1), 0.5 * lengths[e2]);
    }

    let marked_curves: BTreeMap<String, Vec<usize>> = mesh
        .marked_curves()
        .iter()
        .map(|(name, cycle)| {
            let mut refined = Vec::with_capacity(2 * cycle.len());
            for k in 0..cycle.len() {
                let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                refined.push(a);
                refined.push(midpoint(mesh.edge_between(a, b).expect("validated cycle")));
            }
            (name.clone(), refined)
        })
        .collect();

    SurfaceMesh::from_parts(MeshParts {
        genus: mesh.genus(),
        num_vertices: nv + mesh.num_edges(),
        faces,
        lengths: new_lengths,
        marked_curves,
        refinement_level: mesh.refinement_level() + 1,
        chart: None,
    })
}
