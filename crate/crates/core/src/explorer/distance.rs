use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::thick_part;
use crate::triple::MinimalTriple;

pub const DEFAULT_TERMS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactificationDistance {
    /// Marked-curve length differences plus the sup edge-length difference on
    /// the shared thick edges; a stand-in for a metric on moduli space.
    pub d_dm_proxy: f64,
    /// Conformal-factor distance on the largest sampled thick part.
    pub d_phi: f64,
    /// `(ε, d_ε)` for `ε = 2^{−n}`, `n = 0..=N`.
    pub d_eps_samples: Vec<(f64, f64)>,
    pub d_total: f64,
    /// Upper bound on the omitted terms `n > N`.
    pub tail_bound: f64,
}

pub fn identity_correspondence(n: usize) -> Vec<Option<usize>> {
    (0..n).map(Some).collect()
}

/// `d = Σ_{n ≤ N} 2^{−n} d_{2^{−n}}(p, p2)` with the map `correspondence`
/// from vertices of `p` to vertices of `p2` standing in for `Φ_ε`.
pub fn compact_distance(
    p: &MinimalTriple,
    p2: &MinimalTriple,
    correspondence: &[Option<usize>],
    terms: usize,
) -> Result<CompactificationDistance> {
    let (m1, m2) = (p.mesh(), p2.mesh());
    if correspondence.len() != m1.num_vertices() {
        return Err(Error::validation(
            "correspondence",
            format!("has {} entries, mesh has {} vertices", correspondence.len(), m1.num_vertices()),
        ));
    }
    if let Some(v) = correspondence.iter().position(|c| c.is_some_and(|w| w >= m2.num_vertices())) {
        return Err(Error::validation(format!("correspondence[{v}]"), "target vertex out of range"));
    }
    if terms > 60 {
        return Err(Error::validation("N", "at most 60 terms"));
    }
    let f1: Vec<f64> = p.u().values().iter().map(|u| (2.0 * u).exp()).collect();
    let f2: Vec<f64> = p2.u().values().iter().map(|u| (2.0 * u).exp()).collect();

    let mut thick = Vec::with_capacity(terms + 1);
    for n in 0..=terms {
        let eps = 0.5f64.powi(n as i32);
        let part = thick_part(m1, p.u(), eps)?;
        if let Some(&v) = part.iter().find(|&&v| correspondence[v].is_none()) {
            return Err(Error::validation(
                "correspondence",
                format!("vertex {v} of the {eps}-thick part has no image"),
            ));
        }
        thick.push((eps, part));
    }

    // Thick parts grow as ε shrinks; the last one is the largest.
    let largest = &thick.last().expect("at least one term").1;
    let mut in_largest = vec![false; m1.num_vertices()];
    for &v in largest {
        in_largest[v] = true;
    }
    let mut edge_diff: f64 = 0.0;
    for (e, &[a, b]) in m1.edges().iter().enumerate() {
        if !(in_largest[a] && in_largest[b]) {
            continue;
        }
        let (Some(x), Some(y)) = (correspondence[a], correspondence[b]) else {
            continue;
        };
        if let Some(e2) = m2.edge_between(x, y) {
            edge_diff = edge_diff.max((m1.edge_lengths()[e] - m2.edge_lengths()[e2]).abs());
        }
    }
    let curve_diff: f64 = m1
        .marked_curves()
        .keys()
        .filter_map(|name| Some((m1.marked_curve_length(name)? - m2.marked_curve_length(name)?).abs()))
        .sum();
    let d_dm_proxy = curve_diff + edge_diff;

    let mut samples = Vec::with_capacity(thick.len());
    let mut d_phi = 0.0;
    for (eps, part) in &thick {
        d_phi = part
            .iter()
            .map(|&v| (f2[correspondence[v].expect("checked above")] - f1[v]).abs())
            .fold(0.0, f64::max);
        samples.push((*eps, d_dm_proxy + d_phi));
    }
    let d_total = samples.iter().map(|(eps, d)| eps * d).sum();
    let d_max = samples.iter().map(|s| s.1).fold(0.0, f64::max);
    Ok(CompactificationDistance {
        d_dm_proxy,
        d_phi,
        d_eps_samples: samples,
        d_total,
        tail_bound: 0.5f64.powi(terms as i32) * 2.0 * d_max,
    })
}
