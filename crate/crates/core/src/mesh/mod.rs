//! Triangulated closed surfaces carrying a piecewise-flat edge-length metric.
//!
//! Triangles are flat with the stored edge lengths, so curvature lives at the
//! vertices as angle defects. Meshes are immutable once constructed; every
//! constructor runs the full invariant check.

mod delaunay;
mod io;
pub(crate) mod laplace;
mod polygon;
mod refine;
mod thick;

pub use delaunay::intrinsic_delaunay;
pub use io::MeshFile;
pub use laplace::{integrate, laplacian, LinearOperatorHandle, SymmetricMatrix, ANGLE_FLOOR};
pub use polygon::{build_polygon_mesh, PolygonGeometry, SEGMENTS_PER_SIDE_AT_LEVEL_0};
pub use refine::refine;
pub use thick::{homology_cocycle, shortest_essential_loop, systole_field, thick_part};

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::f64::consts::PI;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Content fingerprint tying fields to the mesh they were built on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MeshId(pub u64);

#[derive(Clone, Debug)]
pub struct SurfaceMesh {
    id: MeshId,
    genus: usize,
    num_vertices: usize,
    faces: Vec<[usize; 3]>,
    edges: Vec<[usize; 2]>,
    edge_lengths: Vec<f64>,
    /// `face_edges[f][k]` is the edge opposite `faces[f][k]`.
    face_edges: Vec<[usize; 3]>,
    edge_index: HashMap<(usize, usize), usize>,
    /// (neighbour, edge) pairs, sorted by neighbour.
    adjacency: Vec<Vec<(usize, usize)>>,
    marked_curves: BTreeMap<String, Vec<usize>>,
    refinement_level: usize,
    /// Poincare-disk position of one representative of each vertex, when the
    /// mesh came from the polygon model.
    chart: Option<Vec<[f64; 2]>>,
}

/// Everything needed to assemble a [`SurfaceMesh`]; lengths are keyed by the
/// sorted vertex pair.
#[derive(Clone, Debug, Default)]
pub struct MeshParts {
    pub genus: usize,
    pub num_vertices: usize,
    pub faces: Vec<[usize; 3]>,
    pub lengths: HashMap<(usize, usize), f64>,
    pub marked_curves: BTreeMap<String, Vec<usize>>,
    pub refinement_level: usize,
    pub chart: Option<Vec<[f64; 2]>>,
}

pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl SurfaceMesh {
    pub fn from_parts(parts: MeshParts) -> Result<Self> {
        let MeshParts {
            genus,
            num_vertices,
            faces,
            lengths,
            marked_curves,
            refinement_level,
            chart,
        } = parts;

        if genus < 2 {
            return Err(Error::validation("genus", format!("genus must be >= 2, got {genus}")));
        }
        if faces.is_empty() {
            return Err(Error::validation("faces", "mesh has no faces"));
        }

        let mut used = vec![false; num_vertices];
        for (f, face) in faces.iter().enumerate() {
            for &v in face {
                if v >= num_vertices {
                    return Err(Error::validation(
                        format!("face {f}"),
                        format!("vertex {v} out of range (mesh has {num_vertices} vertices)"),
                    ));
                }
                used[v] = true;
            }
            if face[0] == face[1] || face[1] == face[2] || face[0] == face[2] {
                return Err(Error::validation(format!("face {f}"), "repeated vertex in face"));
            }
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::validation(format!("vertex {v}"), "vertex not referenced by any face"));
        }

        // Directed half-edges must each appear exactly once, and every undirected
        // edge must be used in both directions: closed, oriented, manifold along edges.
        let mut half_edges: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * faces.len());
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                if let Some(other) = half_edges.insert((a, b), f) {
                    return Err(Error::validation(
                        format!("edge {a}-{b}"),
                        format!(
                            "directed edge used by faces {other} and {f}: mesh is not consistently oriented or not manifold"
                        ),
                    ));
                }
            }
        }
        for &(a, b) in half_edges.keys() {
            if !half_edges.contains_key(&(b, a)) {
                return Err(Error::validation(
                    format!("edge {a}-{b}"),
                    "edge bounds only one face: mesh is not closed",
                ));
            }
        }

        let mut edges: Vec<[usize; 2]> = half_edges
            .keys()
            .filter(|(a, b)| a < b)
            .map(|&(a, b)| [a, b])
            .collect();
        edges.sort_unstable();
        let edge_index: HashMap<(usize, usize), usize> =
            edges.iter().enumerate().map(|(e, &[a, b])| ((a, b), e)).collect();

        let mut edge_lengths = Vec::with_capacity(edges.len());
        for &[a, b] in &edges {
            let l = lengths.get(&(a, b)).copied().ok_or_else(|| {
                Error::validation(format!("edge {a}-{b}"), "missing edge length")
            })?;
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::validation(
                    format!("edge {a}-{b}"),
                    format!("edge length must be positive and finite, got {l}"),
                ));
            }
            edge_lengths.push(l);
        }
        if lengths.len() != edges.len() {
            if let Some(&(a, b)) = lengths.keys().find(|k| !edge_index.contains_key(*k)) {
                return Err(Error::validation(
                    format!("edge {a}-{b}"),
                    "length given for a pair that is not an edge of any face",
                ));
            }
        }

        let face_edges: Vec<[usize; 3]> = faces
            .iter()
            .map(|f| {
                [
                    edge_index[&edge_key(f[1], f[2])],
                    edge_index[&edge_key(f[2], f[0])],
                    edge_index[&edge_key(f[0], f[1])],
                ]
            })
            .collect();

        for (f, fe) in face_edges.iter().enumerate() {
            let [a, b, c] = fe.map(|e| edge_lengths[e]);
            if !(a < b + c && b < a + c && c < a + b) {
                return Err(Error::validation(
                    format!("face {f}"),
                    format!("edge lengths ({a}, {b}, {c}) violate the strict triangle inequality"),
                ));
            }
        }

        // Vertex links must be single cycles.
        let mut link: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_vertices];
        for face in &faces {
            for k in 0..3 {
                link[face[k]].push((face[(k + 1) % 3], face[(k + 2) % 3]));
            }
        }
        for (v, arcs) in link.iter().enumerate() {
            let next: HashMap<usize, usize> = arcs.iter().copied().collect();
            let start = arcs[0].0;
            let mut cur = start;
            let mut steps = 0;
            loop {
                cur = next[&cur];
                steps += 1;
                if cur == start || steps > arcs.len() {
                    break;
                }
            }
            if steps != arcs.len() {
                return Err(Error::validation(
                    format!("vertex {v}"),
                    "vertex link is not a single cycle (non-manifold vertex)",
                ));
            }
        }

        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); num_vertices];
        for (e, &[a, b]) in edges.iter().enumerate() {
            adjacency[a].push((b, e));
            adjacency[b].push((a, e));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }

        // connectivity
        let mut seen = vec![false; num_vertices];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        if reached != num_vertices {
            let v = seen.iter().position(|s| !s).unwrap_or(0);
            return Err(Error::validation(format!("vertex {v}"), "mesh is not connected"));
        }

        let chi = num_vertices as i64 - edges.len() as i64 + faces.len() as i64;
        let expected = 2 - 2 * genus as i64;
        if chi != expected {
            return Err(Error::validation(
                "topology",
                format!("Euler characteristic {chi} does not match genus {genus} (expected {expected})"),
            ));
        }

        for (name, cycle) in &marked_curves {
            if cycle.len() < 3 {
                return Err(Error::validation(
                    format!("marked curve {name}"),
                    "a marked cycle needs at least three vertices",
                ));
            }
            for k in 0..cycle.len() {
                let (a, b) = (cycle[k], cycle[(k + 1) % cycle.len()]);
                if a >= num_vertices || b >= num_vertices || !edge_index.contains_key(&edge_key(a, b)) {
                    return Err(Error::validation(
                        format!("marked curve {name}, step {k}"),
                        format!("{a}-{b} is not an edge"),
                    ));
                }
            }
        }

        if let Some(chart) = &chart {
            if chart.len() != num_vertices {
                return Err(Error::validation(
                    "chart",
                    format!("chart has {} entries for {num_vertices} vertices", chart.len()),
                ));
            }
        }

        let mut hasher = DefaultHasher::new();
        genus.hash(&mut hasher);
        num_vertices.hash(&mut hasher);
        faces.hash(&mut hasher);
        for l in &edge_lengths {
            l.to_bits().hash(&mut hasher);
        }
        marked_curves.hash(&mut hasher);
        refinement_level.hash(&mut hasher);

        Ok(SurfaceMesh {
            id: MeshId(hasher.finish()),
            genus,
            num_vertices,
            faces,
            edges,
            edge_lengths,
            face_edges,
            edge_index,
            adjacency,
            marked_curves,
            refinement_level,
            chart,
        })
    }

    pub fn id(&self) -> MeshId {
        self.id
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    pub fn face_edges(&self) -> &[[usize; 3]] {
        &self.face_edges
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.edge_index.get(&edge_key(a, b)).copied()
    }

    /// Neighbours of `v` with the connecting edge index.
    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn marked_curves(&self) -> &BTreeMap<String, Vec<usize>> {
        &self.marked_curves
    }

    pub fn refinement_level(&self) -> usize {
        self.refinement_level
    }

    pub fn chart(&self) -> Option<&[[f64; 2]]> {
        self.chart.as_deref()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Side lengths (a, b, c) of face `f`, `a` opposite its first vertex.
    pub fn face_lengths(&self, f: usize) -> [f64; 3] {
        self.face_edges[f].map(|e| self.edge_lengths[e])
    }

    /// Interior angles of face `f` at its three corners.
    pub fn face_angles(&self, f: usize) -> [f64; 3] {
        let [a, b, c] = self.face_lengths(f);
        [corner_angle(a, b, c), corner_angle(b, c, a), corner_angle(c, a, b)]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.face_lengths(f);
        triangle_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }

    /// Barycentric vertex areas (one third of each incident face).
    pub fn vertex_areas(&self) -> Vec<f64> {
        let mut areas = vec![0.0; self.num_vertices];
        for (f, face) in self.faces.iter().enumerate() {
            let third = self.face_area(f) / 3.0;
            for &v in face {
                areas[v] += third;
            }
        }
        areas
    }

    /// `2π − Σ angles` at every vertex.
    pub fn angle_defects(&self) -> Vec<f64> {
        let mut defects = vec![2.0 * PI; self.num_vertices];
        for (f, face) in self.faces.iter().enumerate() {
            let angles = self.face_angles(f);
            for k in 0..3 {
                defects[face[k]] -= angles[k];
            }
        }
        defects
    }

    /// Graph length of a marked cycle.
    pub fn marked_curve_length(&self, name: &str) -> Option<f64> {
        let cycle = self.marked_curves.get(name)?;
        Some(
            (0..cycle.len())
                .map(|k| {
                    let e = self.edge_index[&edge_key(cycle[k], cycle[(k + 1) % cycle.len()])];
                    self.edge_lengths[e]
                })
                .sum(),
        )
    }

    /// Same combinatorics, new edge lengths (indexed like [`Self::edges`]).
    pub fn with_edge_lengths(&self, lengths: Vec<f64>) -> Result<SurfaceMesh> {
        if lengths.len() != self.edges.len() {
            return Err(Error::validation("edge_lengths", "length count does not match edge count"));
        }
        let lengths = self
            .edges
            .iter()
            .zip(lengths)
            .map(|(&[a, b], l)| ((a, b), l))
            .collect();
        SurfaceMesh::from_parts(MeshParts {
            genus: self.genus,
            num_vertices: self.num_vertices,
            faces: self.faces.clone(),
            lengths,
            marked_curves: self.marked_curves.clone(),
            refinement_level: self.refinement_level,
            chart: None,
        })
    }

    pub fn with_marked_curve(&self, name: &str, cycle: Vec<usize>) -> Result<SurfaceMesh> {
        let mut marked_curves = self.marked_curves.clone();
        marked_curves.insert(name.to_string(), cycle);
        SurfaceMesh::from_parts(MeshParts {
            genus: self.genus,
            num_vertices: self.num_vertices,
            faces: self.faces.clone(),
            lengths: self.lengths_map(),
            marked_curves,
            refinement_level: self.refinement_level,
            chart: self.chart.clone(),
        })
    }

    pub(crate) fn lengths_map(&self) -> HashMap<(usize, usize), f64> {
        self.edges
            .iter()
            .zip(&self.edge_lengths)
            .map(|(&[a, b], &l)| ((a, b), l))
            .collect()
    }
}

/// Angle opposite side `a` in a flat triangle with sides a, b, c.
pub fn corner_angle(a: f64, b: f64, c: f64) -> f64 {
    let cos = ((b * b + c * c - a * a) / (2.0 * b * c)).clamp(-1.0, 1.0);
    cos.acos()
}

/// Heron's formula in Kahan's cancellation-free arrangement.
pub fn triangle_area(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * p.max(0.0).sqrt()
}
