use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::mesh::{build_polygon_mesh, SurfaceMesh};

/// Marked curve shrunk by [`pinch_family`].
pub const PINCHED_CURVE: &str = "a1";

/// Largest ratio of scale factors between neighbouring rings.
const RING_RATIO: f64 = 1.25;

/// Base polygon mesh with the collar of the non-separating curve `a1`
/// shrunk: edges at ring distance `d` from the curve are scaled by
/// `p^{max(0, 1 − d/w)}`, with `w` rings chosen so neighbouring factors differ
/// by at most [`RING_RATIO`]. The curve itself scales by exactly `p`.
pub fn pinch_family(genus: usize, collar_param: f64, refinement: usize) -> Result<SurfaceMesh> {
    if !(collar_param > 0.0 && collar_param <= 1.0) {
        return Err(Error::validation("collar_param", format!("must lie in (0, 1], got {collar_param}")));
    }
    let base = build_polygon_mesh(genus, refinement)?;
    if collar_param == 1.0 {
        return Ok(base);
    }
    let ring = rings(&base, &base.marked_curves()[PINCHED_CURVE]);
    let w = ((1.0 / collar_param).ln() / RING_RATIO.ln()).ceil().max(1.0);
    let lengths = base
        .edges()
        .iter()
        .zip(base.edge_lengths())
        .map(|(&[a, b], &l)| {
            let d = ring[a].min(ring[b]) as f64;
            l * collar_param.powf((1.0 - d / w).max(0.0))
        })
        .collect();
    base.with_edge_lengths(lengths)
}

/// Breadth-first ring index of every vertex from the cycle.
fn rings(mesh: &SurfaceMesh, cycle: &[usize]) -> Vec<usize> {
    let mut ring = vec![usize::MAX; mesh.num_vertices()];
    let mut queue = VecDeque::new();
    for &v in cycle {
        ring[v] = 0;
        queue.push_back(v);
    }
    while let Some(v) = queue.pop_front() {
        for &(w, _) in mesh.neighbors(v) {
            if ring[w] == usize::MAX {
                ring[w] = ring[v] + 1;
                queue.push_back(w);
            }
        }
    }
    ring
}
