use std::collections::{HashMap, HashSet, VecDeque};

use super::{corner_angle, edge_key, MeshParts, SurfaceMesh};
use crate::error::Result;

/// Lawson flips toward an intrinsic Delaunay triangulation of the same flat
/// metric: every edge whose opposite angles sum past π is replaced by the
/// other diagonal of its (necessarily convex) quad, with the length measured
/// in the unfolded quad. A flipped edge on a marked cycle is rerouted through
/// the shorter apex of its quad (same homotopy class); flips that would make a
/// cycle revisit a vertex, create a loop, or duplicate an edge are skipped.
pub fn intrinsic_delaunay(mesh: &SurfaceMesh) -> Result<SurfaceMesh> {
    let mut faces: Vec<[usize; 3]> = mesh.faces().to_vec();
    let mut lengths: HashMap<(usize, usize), f64> = mesh.lengths_map();
    let mut curves = mesh.marked_curves().clone();

    // directed half-edge (a, b) -> face containing a→b
    let mut owner: HashMap<(usize, usize), usize> = HashMap::with_capacity(3 * faces.len());
    for (f, t) in faces.iter().enumerate() {
        for k in 0..3 {
            owner.insert((t[k], t[(k + 1) % 3]), f);
        }
    }

    let len = |lengths: &HashMap<(usize, usize), f64>, a: usize, b: usize| lengths[&edge_key(a, b)];
    let mut queue: VecDeque<(usize, usize)> = lengths.keys().copied().collect();
    let mut queued: HashSet<(usize, usize)> = queue.iter().copied().collect();
    let mut budget = 50 * lengths.len();

    while let Some((i, j)) = queue.pop_front() {
        queued.remove(&(i, j));
        if budget == 0 {
            break;
        }
        if !lengths.contains_key(&(i, j)) {
            continue;
        }
        let (f1, f2) = (owner[&(i, j)], owner[&(j, i)]);
        let k = third(&faces[f1], i, j);
        let l = third(&faces[f2], j, i);
        let (lij, lik, ljk, lil, ljl) = (
            len(&lengths, i, j),
            len(&lengths, i, k),
            len(&lengths, j, k),
            len(&lengths, i, l),
            len(&lengths, j, l),
        );
        let angle_k = corner_angle(lij, lik, ljk);
        let angle_l = corner_angle(lij, lil, ljl);
        if angle_k + angle_l <= std::f64::consts::PI + 1e-12 {
            continue;
        }
        if k == l || lengths.contains_key(&edge_key(k, l)) {
            continue;
        }
        let detour = if lik + ljk <= lil + ljl { k } else { l };
        let mut reroute = Vec::new();
        let mut blocked = false;
        for (name, cycle) in &curves {
            if let Some(pos) = step_position(cycle, i, j) {
                if cycle.contains(&detour) {
                    blocked = true;
                    break;
                }
                reroute.push((name.clone(), pos));
            }
        }
        if blocked {
            continue;
        }
        for (name, pos) in reroute {
            curves.get_mut(&name).unwrap().insert(pos + 1, detour);
        }

        let angle_i = corner_angle(ljk, lij, lik) + corner_angle(ljl, lij, lil);
        let lkl = (lik * lik + lil * lil - 2.0 * lik * lil * angle_i.cos()).max(0.0).sqrt();

        // (i, j, k) and (j, i, l) become (k, i, l) and (l, j, k)
        for t in [faces[f1], faces[f2]] {
            for m in 0..3 {
                owner.remove(&(t[m], t[(m + 1) % 3]));
            }
        }
        faces[f1] = [k, i, l];
        faces[f2] = [l, j, k];
        for f in [f1, f2] {
            let t = faces[f];
            for m in 0..3 {
                owner.insert((t[m], t[(m + 1) % 3]), f);
            }
        }
        lengths.remove(&(i, j));
        lengths.insert(edge_key(k, l), lkl);
        budget -= 1;
        for e in [edge_key(i, k), edge_key(j, k), edge_key(i, l), edge_key(j, l)] {
            if queued.insert(e) {
                queue.push_back(e);
            }
        }
    }

    SurfaceMesh::from_parts(MeshParts {
        genus: mesh.genus(),
        num_vertices: mesh.num_vertices(),
        faces,
        lengths,
        marked_curves: curves,
        refinement_level: mesh.refinement_level(),
        chart: mesh.chart().map(|c| c.to_vec()),
    })
}

/// Index `p` with {cycle[p], cycle[p+1]} = {a, b} (cyclically).
fn step_position(cycle: &[usize], a: usize, b: usize) -> Option<usize> {
    let n = cycle.len();
    (0..n).find(|&p| {
        let (x, y) = (cycle[p], cycle[(p + 1) % n]);
        (x == a && y == b) || (x == b && y == a)
    })
}

fn third(face: &[usize; 3], a: usize, b: usize) -> usize {
    *face.iter().find(|&&v| v != a && v != b).expect("triangle has three distinct vertices")
}
