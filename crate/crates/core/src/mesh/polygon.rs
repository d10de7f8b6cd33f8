use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use super::{edge_key, intrinsic_delaunay, MeshParts, SurfaceMesh};
use crate::error::{Error, Result};
use crate::hyperbolic::HypPoint;

/// Segments on each polygon side at refinement level 0. Two segments would
/// join the corner vertex to a side midpoint twice, so three is the minimum
/// that yields a simplicial complex.
pub const SEGMENTS_PER_SIDE_AT_LEVEL_0: usize = 3;

const MAX_REFINEMENT: usize = 8;

/// The regular hyperbolic 4g-gon whose corners all close up around one point.
#[derive(Clone, Copy, Debug)]
pub struct PolygonGeometry {
    pub genus: usize,
    pub sides: usize,
    /// Interior angle at each corner, 2π/(4g).
    pub corner_angle: f64,
    pub circumradius: f64,
    pub inradius: f64,
    pub side_length: f64,
}

impl PolygonGeometry {
    pub fn regular(genus: usize) -> Self {
        let n = 4 * genus;
        let half = PI / n as f64;
        let cot = 1.0 / half.tan();
        // Right triangle (center, side midpoint, corner) with angles π/n, π/n.
        let circumradius = (cot * cot).acosh();
        let inradius = (half.cos() / half.sin()).acosh();
        let side_length = 2.0 * (half.cos() / half.sin()).acosh();
        PolygonGeometry {
            genus,
            sides: n,
            corner_angle: 2.0 * half,
            circumradius,
            inradius,
            side_length,
        }
    }

    pub fn corner(&self, k: usize) -> HypPoint {
        HypPoint::polar(self.circumradius, 2.0 * PI * (k % self.sides) as f64 / self.sides as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum GridKey {
    Center,
    Corner,
    Radial { sector: usize, ring: usize },
    Side { side: usize, step: usize },
    Interior { sector: usize, ring: usize, step: usize },
}

/// Genus-`genus` surface glued from the regular 4g-gon with side word
/// a₁b₁a₁⁻¹b₁⁻¹⋯, cut into 4g center sectors, each carrying a triangular grid
/// with `3·2^refinement` segments per side. Grid points sit at hyperbolic
/// positions (uniform arclength along sides and spokes), and every edge gets
/// its hyperbolic geodesic length, so the flat-triangle metric approaches the
/// hyperbolic one as the refinement grows. The grid is finally flipped to an
/// intrinsic Delaunay triangulation so all cotangent weights are nonnegative.
pub fn build_polygon_mesh(genus: usize, refinement: usize) -> Result<SurfaceMesh> {
    if genus < 2 {
        return Err(Error::validation("genus", format!("genus must be >= 2, got {genus}")));
    }
    if refinement > MAX_REFINEMENT {
        return Err(Error::validation(
            "refinement",
            format!("refinement {refinement} exceeds the supported maximum {MAX_REFINEMENT}"),
        ));
    }
    let geo = PolygonGeometry::regular(genus);
    let n = geo.sides;
    let m = SEGMENTS_PER_SIDE_AT_LEVEL_0 << refinement;

    // spokes[k][r]: point at fraction r/m from the center toward corner k
    let spokes: Vec<Vec<HypPoint>> = (0..n)
        .map(|k| {
            let c = geo.corner(k);
            (0..=m)
                .map(|r| HypPoint::ORIGIN.geodesic_lerp(c, r as f64 / m as f64))
                .collect()
        })
        .collect();
    let position = |sector: usize, ring: usize, step: usize| -> HypPoint {
        if ring == 0 {
            return HypPoint::ORIGIN;
        }
        let a = spokes[sector][ring];
        let b = spokes[(sector + 1) % n][ring];
        a.geodesic_lerp(b, step as f64 / ring as f64)
    };
    let key = |sector: usize, ring: usize, step: usize| -> GridKey {
        if ring == 0 {
            GridKey::Center
        } else if ring == m {
            if step == 0 || step == m {
                GridKey::Corner
            } else if sector % 4 >= 2 {
                // side s is glued to side s-2 with reversed parameter
                GridKey::Side { side: sector - 2, step: m - step }
            } else {
                GridKey::Side { side: sector, step }
            }
        } else if step == 0 {
            GridKey::Radial { sector, ring }
        } else if step == ring {
            GridKey::Radial { sector: (sector + 1) % n, ring }
        } else {
            GridKey::Interior { sector, ring, step }
        }
    };

    let mut ids: HashMap<GridKey, usize> = HashMap::new();
    let mut chart: Vec<[f64; 2]> = Vec::new();
    let mut faces: Vec<[usize; 3]> = Vec::with_capacity(n * m * m);
    let mut lengths: HashMap<(usize, usize), f64> = HashMap::new();

    let mut local_faces: Vec<[(usize, usize); 3]> = Vec::with_capacity(m * m);
    for r in 0..m {
        for b in 0..=r {
            local_faces.push([(r, b), (r + 1, b), (r + 1, b + 1)]);
        }
        for b in 0..r {
            local_faces.push([(r, b), (r + 1, b + 1), (r, b + 1)]);
        }
    }

    for sector in 0..n {
        for lf in &local_faces {
            let pts = lf.map(|(r, b)| position(sector, r, b));
            let mut tri = [0usize; 3];
            for (slot, &(r, b)) in lf.iter().enumerate() {
                let k = key(sector, r, b);
                let next = ids.len();
                let id = *ids.entry(k).or_insert_with(|| {
                    chart.push(pts[slot].to_poincare());
                    next
                });
                tri[slot] = id;
            }
            if signed_area(&pts) < 0.0 {
                tri.swap(1, 2);
            }
            for i in 0..3 {
                let j = (i + 1) % 3;
                let l = pts[i].distance(pts[j]);
                let ek = edge_key(tri[i], tri[j]);
                if let Some(&prev) = lengths.get(&ek) {
                    if (prev - l).abs() > 1e-9 * l.max(1.0) {
                        return Err(Error::Numerical(format!(
                            "glued edge {}-{} has inconsistent lengths {prev} and {l}",
                            ek.0, ek.1
                        )));
                    }
                } else {
                    lengths.insert(ek, l);
                }
            }
            faces.push(tri);
        }
    }

    let mut marked_curves = BTreeMap::new();
    for handle in 0..genus {
        for (label, side) in [("a", 4 * handle), ("b", 4 * handle + 1)] {
            let mut cycle = vec![ids[&GridKey::Corner]];
            cycle.extend((1..m).map(|step| ids[&GridKey::Side { side, step }]));
            marked_curves.insert(format!("{label}{}", handle + 1), cycle);
        }
    }

    let grid = SurfaceMesh::from_parts(MeshParts {
        genus,
        num_vertices: ids.len(),
        faces,
        lengths,
        marked_curves,
        refinement_level: refinement,
        chart: Some(chart),
    })?;
    intrinsic_delaunay(&grid)
}

fn signed_area(pts: &[HypPoint; 3]) -> f64 {
    let [a, b, c] = pts.map(|p| p.to_poincare());
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}
