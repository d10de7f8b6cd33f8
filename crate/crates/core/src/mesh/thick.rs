//! Thick parts via a shortest-essential-loop proxy for the injectivity radius.
//!
//! A loop counts as essential when its Z/2 homology class is nonzero. Classes
//! are read off a fixed tree–cotree cocycle: for a spanning tree T, a dual
//! spanning tree C avoiding T, and the 2g leftover edges X, every edge carries
//! a bit vector `h(e)` such that the class of any closed edge path is the XOR
//! of `h` along it. The shortest essential loop through a vertex is two
//! shortest paths joined by one edge, so a single Dijkstra per vertex finds it.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;

use super::SurfaceMesh;
use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Homology bits per edge (bit k ↔ k-th leftover edge). Supports genus ≤ 64.
pub fn homology_cocycle(mesh: &SurfaceMesh) -> Result<Vec<u128>> {
    let ne = mesh.num_edges();
    let nf = mesh.num_faces();
    if 2 * mesh.genus() > 128 {
        return Err(Error::validation("genus", "homology bit vectors support genus <= 64"));
    }

    let mut in_tree = vec![false; ne];
    let mut seen = vec![false; mesh.num_vertices()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, e) in mesh.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                in_tree[e] = true;
                queue.push_back(w);
            }
        }
    }

    let mut edge_faces = vec![[usize::MAX; 2]; ne];
    for (f, fe) in mesh.face_edges().iter().enumerate() {
        for &e in fe {
            let slot = if edge_faces[e][0] == usize::MAX { 0 } else { 1 };
            edge_faces[e][slot] = f;
        }
    }

    let mut in_cotree = vec![false; ne];
    let mut parent_edge = vec![usize::MAX; nf];
    let mut face_seen = vec![false; nf];
    let mut order = Vec::with_capacity(nf);
    let mut queue = VecDeque::from([0usize]);
    face_seen[0] = true;
    while let Some(f) = queue.pop_front() {
        order.push(f);
        for &e in &mesh.face_edges()[f] {
            if in_tree[e] {
                continue;
            }
            let [f0, f1] = edge_faces[e];
            let g = if f0 == f { f1 } else { f0 };
            if !face_seen[g] {
                face_seen[g] = true;
                in_cotree[e] = true;
                parent_edge[g] = e;
                queue.push_back(g);
            }
        }
    }

    let mut h = vec![0u128; ne];
    let mut generators = 0usize;
    for e in 0..ne {
        if !in_tree[e] && !in_cotree[e] {
            h[e] = 1u128 << generators;
            generators += 1;
        }
    }
    if generators != 2 * mesh.genus() {
        return Err(Error::Numerical(format!(
            "tree-cotree left {generators} edges, expected {}",
            2 * mesh.genus()
        )));
    }
    for &f in order.iter().skip(1).rev() {
        let pe = parent_edge[f];
        h[pe] = mesh.face_edges()[f]
            .iter()
            .filter(|&&e| e != pe)
            .fold(0u128, |acc, &e| acc ^ h[e]);
    }
    Ok(h)
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    vertex: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Length of the shortest homologically essential edge loop through `root`
/// under per-edge `lengths`. The search explores only vertices closer than
/// `cutoff`; `None` means no essential loop shorter than `2·cutoff` exists.
pub fn shortest_essential_loop(
    mesh: &SurfaceMesh,
    lengths: &[f64],
    cocycle: &[u128],
    root: usize,
    cutoff: f64,
) -> Option<f64> {
    let mut dist: Vec<f64> = vec![f64::INFINITY; mesh.num_vertices()];
    let mut class = vec![0u128; mesh.num_vertices()];
    let mut settled = vec![false; mesh.num_vertices()];
    let mut reached = Vec::new();
    let mut heap = BinaryHeap::new();
    dist[root] = 0.0;
    heap.push(Entry { dist: 0.0, vertex: root });
    while let Some(Entry { dist: d, vertex: v }) = heap.pop() {
        if settled[v] || d > dist[v] {
            continue;
        }
        if d >= cutoff {
            break;
        }
        settled[v] = true;
        reached.push(v);
        for &(w, e) in mesh.neighbors(v) {
            let nd = d + lengths[e];
            if nd < dist[w] {
                dist[w] = nd;
                class[w] = class[v] ^ cocycle[e];
                heap.push(Entry { dist: nd, vertex: w });
            }
        }
    }

    let mut best: Option<f64> = None;
    for &x in &reached {
        for &(y, e) in mesh.neighbors(x) {
            if y < x && settled[y] && class[x] ^ class[y] ^ cocycle[e] != 0 {
                let len = dist[x] + dist[y] + lengths[e];
                if best.is_none_or(|b| len < b) {
                    best = Some(len);
                }
            }
        }
    }
    best.filter(|&len| len < 2.0 * cutoff)
}

/// Edge lengths of the metric `e^{2u}` times the mesh metric (midpoint rule per edge).
pub(crate) fn scaled_lengths(mesh: &SurfaceMesh, conformal: &ScalarField) -> Vec<f64> {
    let u = conformal.values();
    mesh.edges()
        .iter()
        .zip(mesh.edge_lengths())
        .map(|(&[a, b], &l)| l * (0.5 * (u[a] + u[b])).exp())
        .collect()
}

/// Shortest essential loop length through every vertex, no truncation.
pub fn systole_field(mesh: &SurfaceMesh, conformal: &ScalarField) -> Result<Vec<f64>> {
    conformal.check_mesh(mesh)?;
    let cocycle = homology_cocycle(mesh)?;
    let lengths = scaled_lengths(mesh, conformal);
    Ok((0..mesh.num_vertices())
        .into_par_iter()
        .map(|v| shortest_essential_loop(mesh, &lengths, &cocycle, v, f64::INFINITY).unwrap_or(f64::INFINITY))
        .collect())
}

/// Vertices whose shortest essential loop in the metric `e^{2u}·g` is at
/// least `2·eps`, in increasing order.
pub fn thick_part(mesh: &SurfaceMesh, conformal: &ScalarField, eps: f64) -> Result<Vec<usize>> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::validation("eps", format!("eps must be positive, got {eps}")));
    }
    conformal.check_mesh(mesh)?;
    let cocycle = homology_cocycle(mesh)?;
    let lengths = scaled_lengths(mesh, conformal);
    let keep: Vec<bool> = (0..mesh.num_vertices())
        .into_par_iter()
        .map(|v| shortest_essential_loop(mesh, &lengths, &cocycle, v, eps).is_none())
        .collect();
    Ok(keep
        .iter()
        .enumerate()
        .filter_map(|(v, &k)| k.then_some(v))
        .collect())
}
