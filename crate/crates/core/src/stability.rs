//! Second variation operator `L = −Δ_g − |A|² + 2` of the minimal surface,
//! with `|A|² = 2λ²` and `Δ_g` taken in the induced metric `e^{2u} g_σ`.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::mesh::laplace::cotangent_stiffness;
use crate::mesh::LinearOperatorHandle;
use crate::triple::MinimalTriple;

pub const STRICT_STABILITY_TOLERANCE: f64 = 1e-6;
/// Relative residual `‖Lφ − μφ‖∞ / ‖φ‖∞` accepted by the eigensolver.
pub const EIGEN_RESIDUAL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenOptions {
    pub max_iterations: usize,
    pub restarts: usize,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            max_iterations: 500,
            restarts: 3,
        }
    }
}

/// Stiffness is the cotangent matrix (invariant under conformal change in
/// dimension two); the mass is scaled by `e^{2u}`.
pub fn assemble_stability(triple: &MinimalTriple) -> Result<LinearOperatorHandle> {
    if !triple.solution().converged {
        return Err(Error::validation("triple", "stability needs a converged solution"));
    }
    let mesh = triple.mesh();
    let mass = triple.induced_areas();
    let potential = triple.lambda_values().iter().map(|l| 2.0 - 2.0 * l * l).collect();
    Ok(LinearOperatorHandle::new(mesh.id(), cotangent_stiffness(mesh)?, mass, potential))
}

/// Lower bound on the spectrum from Gershgorin discs of `M^{-1/2}(S + MV)M^{-1/2}`.
fn spectrum_lower_bound(op: &LinearOperatorHandle) -> f64 {
    let m = op.mass();
    let v = op.potential();
    (0..op.dim())
        .map(|i| {
            let mut diag = 0.0;
            let mut off = 0.0;
            for (j, s) in op.stiffness().row(i) {
                if j == i {
                    diag += s;
                } else {
                    off += s.abs() / (m[i] * m[j]).sqrt();
                }
            }
            v[i] + diag / m[i] - off
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn bottom_eigenpair(op: &LinearOperatorHandle) -> Result<(f64, ScalarField)> {
    bottom_eigenpair_with(op, &EigenOptions::default())
}

/// Smallest eigenvalue of `op` by shift-invert iteration started from the
/// all-ones vector; the eigenvector is normalised to sup 1 with positive sign.
pub fn bottom_eigenpair_with(op: &LinearOperatorHandle, opts: &EigenOptions) -> Result<(f64, ScalarField)> {
    let n = op.dim();
    if n == 0 {
        return Err(Error::validation("operator", "empty operator"));
    }
    if op.stiffness().max_asymmetry() > 1e-12 * (1.0 + op.stiffness().row(0).map(|(_, s)| s.abs()).sum::<f64>()) {
        return Err(Error::validation("operator", "stiffness is not symmetric"));
    }
    let min_potential = op.potential().iter().copied().fold(f64::INFINITY, f64::min);
    let mut shift = (min_potential - 1.0).min(spectrum_lower_bound(op) - 1.0);
    let mut last = String::new();
    for attempt in 0..=opts.restarts {
        let start: Vec<f64> = (0..n)
            .map(|i| if attempt == 0 { 1.0 } else { 1.0 + 0.1 * ((i * 7919 + attempt) % 13) as f64 / 13.0 })
            .collect();
        match inverse_iteration(op, shift, start, opts.max_iterations) {
            Ok((mu, phi)) => {
                let field = ScalarField::with_id(op.mesh_id(), n, phi)?;
                return Ok((mu, field));
            }
            Err(e) => last = e.to_string(),
        }
        shift -= 1.0 + shift.abs();
    }
    Err(Error::Eigensolver(format!("no convergence after {} restarts: {last}", opts.restarts)))
}

fn inverse_iteration(op: &LinearOperatorHandle, shift: f64, mut x: Vec<f64>, max_iterations: usize) -> Result<(f64, Vec<f64>)> {
    let factor = op.shifted_matrix(shift).factorize_spd()?;
    let m = op.mass();
    normalize(&mut x);
    let mut residual = f64::INFINITY;
    for _ in 0..max_iterations {
        let rhs: Vec<f64> = x.iter().zip(m).map(|(a, b)| a * b).collect();
        x = factor.solve(&rhs)?;
        normalize(&mut x);
        let mu = rayleigh(op, &x);
        let lx = op.apply_values(&x);
        residual = lx.iter().zip(&x).fold(0.0, |r, (l, v)| r.max((l - mu * v).abs()));
        if residual <= EIGEN_RESIDUAL {
            return Ok((mu, x));
        }
    }
    Err(Error::Eigensolver(format!("residual {residual:.3e} after {max_iterations} iterations")))
}

/// Scale to sup norm 1 with a positive entry of largest magnitude.
fn normalize(x: &mut [f64]) {
    let (mut big, mut arg) = (0.0, 0);
    for (i, v) in x.iter().enumerate() {
        if v.abs() > big {
            big = v.abs();
            arg = i;
        }
    }
    let s = if x[arg] < 0.0 { -1.0 / big } else { 1.0 / big };
    for v in x.iter_mut() {
        *v *= s;
    }
}

fn rayleigh(op: &LinearOperatorHandle, x: &[f64]) -> f64 {
    let norm: f64 = x.iter().zip(op.mass()).map(|(v, m)| m * v * v).sum();
    op.quadratic_form(x) / norm
}

#[derive(Clone, Debug)]
pub struct StabilityReport {
    pub bottom_eigenvalue: f64,
    pub eigenfunction: ScalarField,
    pub a_norm_sq_field: ScalarField,
    pub strictly_stable: bool,
}

pub fn stability_report(triple: &MinimalTriple) -> Result<StabilityReport> {
    let op = assemble_stability(triple)?;
    let (mu, phi) = bottom_eigenpair(&op)?;
    let a2 = triple.lambda_values().iter().map(|l| 2.0 * l * l).collect();
    Ok(StabilityReport {
        bottom_eigenvalue: mu,
        eigenfunction: phi,
        a_norm_sq_field: ScalarField::new(triple.mesh(), a2)?,
        strictly_stable: mu > STRICT_STABILITY_TOLERANCE,
    })
}

/// `Lφ`, the first variation of mean curvature along the normal flow `φν`.
pub fn mean_convexity_rate(triple: &MinimalTriple, phi: &ScalarField) -> Result<ScalarField> {
    phi.check_mesh(triple.mesh())?;
    if let Some(v) = phi.values().iter().position(|&x| !(x > 0.0)) {
        return Err(Error::validation(format!("vertex {v}"), "phi must be strictly positive"));
    }
    assemble_stability(triple)?.apply(phi)
}
