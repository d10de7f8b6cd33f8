//! Norm-squared data `q = |α|²_σ` of a quadratic differential on the base surface.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::mesh::{laplacian, SurfaceMesh};

/// Width (hyperbolic length) of the bumps that shape zeros in [`synth_with_zeros`].
pub const ZERO_BUMP_WIDTH: f64 = 0.75;

/// Negative values down to this size are treated as round-off and clamped to 0.
const NEGATIVE_ROUNDOFF: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Synthetic constant norm; an algebraic oracle, not a holomorphic differential.
    Constant,
    Manufactured,
    PrescribedZeros,
    External,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Zero {
    pub vertex: usize,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadDiffNormField {
    values: ScalarField,
    zero_set: Vec<Zero>,
    provenance: Provenance,
}

impl QuadDiffNormField {
    pub(crate) fn checked(values: ScalarField, zero_set: Vec<Zero>, provenance: Provenance) -> Result<Self> {
        if let Some(v) = values.values().iter().position(|&x| x < 0.0) {
            return Err(Error::validation(
                format!("q[{v}]"),
                format!("quadratic differential norm must be nonnegative, got {}", values.values()[v]),
            ));
        }
        Ok(QuadDiffNormField {
            values,
            zero_set,
            provenance,
        })
    }

    /// Wrap externally supplied values.
    pub fn external(mesh: &SurfaceMesh, values: Vec<f64>) -> Result<Self> {
        Self::checked(ScalarField::new(mesh, values)?, Vec::new(), Provenance::External)
    }

    pub fn field(&self) -> &ScalarField {
        &self.values
    }

    pub fn values(&self) -> &[f64] {
        self.values.values()
    }

    pub fn zero_set(&self) -> &[Zero] {
        &self.zero_set
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn belongs_to(&self, mesh: &SurfaceMesh) -> bool {
        self.values.belongs_to(mesh)
    }

    /// `q ↦ s·q`, as used along rays `t²·q̂`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::validation("scale", format!("scale must be nonnegative, got {s}")));
        }
        let zero_set = if s == 0.0 { Vec::new() } else { self.zero_set.clone() };
        Self::checked(self.values.map(|x| s * x)?, zero_set, self.provenance)
    }

    pub fn max(&self) -> f64 {
        self.values.max()
    }

    pub fn to_file(&self) -> QFieldFile {
        QFieldFile {
            values: self.values().to_vec(),
            metadata: QFieldMetadata {
                provenance: self.provenance,
                zero_set: self.zero_set.clone(),
            },
        }
    }

    pub fn from_file(mesh: &SurfaceMesh, file: QFieldFile) -> Result<Self> {
        let values = ScalarField::new(mesh, file.values)?;
        let zero_set = file.metadata.zero_set;
        for z in &zero_set {
            if z.vertex >= mesh.num_vertices() {
                return Err(Error::validation("metadata.zero_set", format!("vertex {} out of range", z.vertex)));
            }
        }
        if file.metadata.provenance == Provenance::PrescribedZeros {
            check_zero_count(mesh, &zero_set)?;
        }
        Self::checked(values, zero_set, file.metadata.provenance)
    }
}

/// Field file: flat value array by vertex id plus a metadata block.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QFieldFile {
    pub values: Vec<f64>,
    pub metadata: QFieldMetadata,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QFieldMetadata {
    pub provenance: Provenance,
    #[serde(default)]
    pub zero_set: Vec<Zero>,
}

pub fn constant_field(mesh: &SurfaceMesh, c: f64) -> Result<QuadDiffNormField> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::validation("c", format!("constant must be nonnegative, got {c}")));
    }
    QuadDiffNormField::checked(ScalarField::constant(mesh, c)?, Vec::new(), Provenance::Constant)
}

/// `q = e^{2u}(Δu − e^{2u} + 1)` with the discrete Laplacian, so that `u_exact`
/// solves the discrete Gauss equation exactly.
pub fn manufactured_pair(mesh: &SurfaceMesh, u_exact: &ScalarField) -> Result<QuadDiffNormField> {
    u_exact.check_mesh(mesh)?;
    let lap = laplacian(mesh)?;
    let du = lap.apply_values(u_exact.values());
    let mut q: Vec<f64> = u_exact
        .values()
        .iter()
        .zip(&du)
        .map(|(&u, &d)| {
            let x = (2.0 * u).exp();
            x * (d - x + 1.0)
        })
        .collect();
    let negative: Vec<usize> = q
        .iter()
        .enumerate()
        .filter(|(_, &v)| v < -NEGATIVE_ROUNDOFF)
        .map(|(i, _)| i)
        .collect();
    if !negative.is_empty() {
        let shown: Vec<String> = negative.iter().take(20).map(|v| v.to_string()).collect();
        return Err(Error::validation(
            format!("vertices [{}]{}", shown.join(", "), if negative.len() > 20 { ", ..." } else { "" }),
            format!(
                "manufactured q is negative at {} vertices; shrink the amplitude of u_exact",
                negative.len()
            ),
        ));
    }
    q.iter_mut().for_each(|v| *v = v.max(0.0));
    QuadDiffNormField::checked(ScalarField::new(mesh, q)?, Vec::new(), Provenance::Manufactured)
}

fn check_zero_count(mesh: &SurfaceMesh, zeros: &[Zero]) -> Result<()> {
    let total: usize = zeros.iter().map(|z| z.multiplicity).sum();
    let expected = 4 * mesh.genus() - 4;
    if total != expected {
        return Err(Error::validation(
            "zeros",
            format!("total multiplicity {total} must equal 4g-4 = {expected}"),
        ));
    }
    Ok(())
}

/// Bump-shaped `q` vanishing like `dist^{2k}` at each prescribed zero of
/// order `k` (graph distance on the mesh), positive elsewhere, scaled so
/// that `max q = amplitude²`.
pub fn synth_with_zeros(mesh: &SurfaceMesh, zeros: &[Zero], amplitude: f64) -> Result<QuadDiffNormField> {
    if !(amplitude > 0.0 && amplitude.is_finite()) {
        return Err(Error::validation("amplitude", format!("amplitude must be positive, got {amplitude}")));
    }
    for z in zeros {
        if z.vertex >= mesh.num_vertices() {
            return Err(Error::validation("zeros", format!("vertex {} out of range", z.vertex)));
        }
        if z.multiplicity == 0 {
            return Err(Error::validation("zeros", format!("zero at vertex {} has multiplicity 0", z.vertex)));
        }
    }
    check_zero_count(mesh, zeros)?;

    let mut merged: BTreeMap<usize, usize> = BTreeMap::new();
    for z in zeros {
        *merged.entry(z.vertex).or_default() += z.multiplicity;
    }
    let zero_set: Vec<Zero> = merged
        .into_iter()
        .map(|(vertex, multiplicity)| Zero { vertex, multiplicity })
        .collect();

    let mut shape = vec![1.0; mesh.num_vertices()];
    for z in &zero_set {
        let dist = graph_distances(mesh, z.vertex);
        for (s, d) in shape.iter_mut().zip(&dist) {
            let r = d / ZERO_BUMP_WIDTH;
            *s *= (-(-r * r).exp_m1()).powi(z.multiplicity as i32);
        }
    }
    let peak = shape.iter().copied().fold(0.0, f64::max);
    let scale = amplitude * amplitude / peak;
    let values = shape.iter().map(|s| s * scale).collect();
    QuadDiffNormField::checked(ScalarField::new(mesh, values)?, zero_set, Provenance::PrescribedZeros)
}

/// Shortest edge-path distances from `source`.
pub fn graph_distances(mesh: &SurfaceMesh, source: usize) -> Vec<f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct D(f64);
    impl Eq for D {}
    impl PartialOrd for D {
        fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for D {
        fn cmp(&self, o: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&o.0)
        }
    }

    let lengths = mesh.edge_lengths();
    let mut dist = vec![f64::INFINITY; mesh.num_vertices()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Reverse((D(0.0), source)));
    while let Some(Reverse((D(d), v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &(w, e) in mesh.neighbors(v) {
            let nd = d + lengths[e];
            if nd < dist[w] {
                dist[w] = nd;
                heap.push(Reverse((D(nd), w)));
            }
        }
    }
    dist
}
