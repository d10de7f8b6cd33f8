//! Newton solver for the Gauss equation `Δ_σ u = e^{2u} + q e^{−2u} − 1` of a
//! minimal surface with induced metric `e^{2u} g_σ` and principal curvatures
//! `±λ`, `λ = √q e^{−2u}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::mesh::laplace::cotangent_stiffness;
use crate::mesh::SurfaceMesh;
use crate::qdiff::QuadDiffNormField;

/// λ₀ slack under which a converged solution is labelled on the upper branch.
pub const UPPER_BRANCH_SLACK: f64 = 1e-3;

/// Cap on the full Newton steps taken after the tolerance is met.
const POLISH_STEPS: usize = 12;

/// Largest |u| a trial step may reach before it is rejected outright.
const MAX_ABS_U: f64 = 50.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConformalSolution {
    pub u: ScalarField,
    /// L∞ norm of [`residual`] at `u`.
    pub residual_norm: f64,
    pub iterations: usize,
    pub branch: Branch,
    pub converged: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineSearch {
    /// Sufficient-decrease constant for the L∞ residual.
    pub armijo: f64,
    pub max_halvings: u32,
    /// An iteration counts as stalled unless the residual drops below this
    /// fraction of its previous value.
    pub stall_factor: f64,
    /// Consecutive stalled iterations that trigger the no-solution diagnosis.
    pub stall_window: usize,
}

impl Default for LineSearch {
    fn default() -> Self {
        LineSearch {
            armijo: 1e-4,
            max_halvings: 40,
            stall_factor: 0.99,
            stall_window: 10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub damping: LineSearch,
    pub initial_guess: Option<ScalarField>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1e-10,
            max_iterations: 50,
            damping: LineSearch::default(),
            initial_guess: None,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(Error::validation("tolerance", "tolerance must be positive"));
        }
        if self.max_iterations < 1 {
            return Err(Error::validation("max_iterations", "max_iterations must be at least 1"));
        }
        let d = &self.damping;
        if !(d.armijo >= 0.0 && d.armijo < 1.0 && d.stall_factor > 0.0 && d.stall_factor <= 1.0 && d.stall_window >= 1) {
            return Err(Error::validation("damping", "line-search parameters out of range"));
        }
        Ok(())
    }
}

struct GaussSystem<'a> {
    stiffness: crate::linalg::SymmetricMatrix,
    mass: Vec<f64>,
    q: &'a [f64],
}

impl GaussSystem<'_> {
    /// Solve `(K + M D) δ = M G` at `u`.
    fn newton_step(&self, u: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        let diag: Vec<f64> = u
            .iter()
            .zip(self.q)
            .zip(&self.mass)
            .map(|((&u, &q), &m)| m * (2.0 * (2.0 * u).exp() - 2.0 * q * (-2.0 * u).exp()))
            .collect();
        let rhs: Vec<f64> = g.iter().zip(&self.mass).map(|(g, m)| g * m).collect();
        self.stiffness.plus_diagonal(&diag).factorize()?.solve(&rhs)
    }

    fn residual(&self, u: &[f64]) -> Vec<f64> {
        let ku = self.stiffness.mul_vec_zero_row_sum(u);
        ku.iter()
            .zip(&self.mass)
            .zip(u.iter().zip(self.q))
            .map(|((k, m), (&u, &q))| -k / m - (2.0 * u).exp() - q * (-2.0 * u).exp() + 1.0)
            .collect()
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Pointwise `Δ_σ u − e^{2u} − q e^{−2u} + 1`.
pub fn residual(mesh: &SurfaceMesh, q: &QuadDiffNormField, u: &ScalarField) -> Result<ScalarField> {
    u.check_mesh(mesh)?;
    q.field().check_mesh(mesh)?;
    let system = GaussSystem {
        stiffness: cotangent_stiffness(mesh)?,
        mass: mesh.vertex_areas(),
        q: q.values(),
    };
    ScalarField::new(mesh, system.residual(u.values()))
}

/// Max of `λ = √q e^{−2u}`.
pub(crate) fn max_lambda(q: &[f64], u: &[f64]) -> f64 {
    q.iter()
        .zip(u)
        .map(|(&q, &u)| q.sqrt() * (-2.0 * u).exp())
        .fold(0.0, f64::max)
}

/// Damped Newton iteration on the discrete Gauss equation.
///
/// Each step solves `(K + M D) δ = M G` with `D = 2e^{2u} − 2q e^{−2u}`, which
/// is the Newton system for `G(u) = 0` scaled by the mass matrix, then halves
/// the step until the L∞ residual decreases. Ten consecutive iterations
/// without a 1% decrease, or a step that cannot decrease the residual at all,
/// end the solve with [`Error::NoSolutionDetected`].
pub fn solve_gauss(mesh: &SurfaceMesh, q: &QuadDiffNormField, opts: &SolveOptions) -> Result<ConformalSolution> {
    opts.validate()?;
    q.field().check_mesh(mesh)?;
    let system = GaussSystem {
        stiffness: cotangent_stiffness(mesh)?,
        mass: mesh.vertex_areas(),
        q: q.values(),
    };
    let mut u: Vec<f64> = match &opts.initial_guess {
        Some(guess) => {
            guess.check_mesh(mesh)?;
            guess.values().to_vec()
        }
        None => vec![0.0; mesh.num_vertices()],
    };

    let mut g = system.residual(&u);
    let mut res = sup_norm(&g);
    let mut stalls = 0usize;
    let ls = opts.damping;

    let finish = |mut u: Vec<f64>, mut res: f64, mut iterations: usize| -> Result<ConformalSolution> {
        // Near a double root Newton converges only linearly, so a solution at
        // tolerance can still be far from the root in u; take extra full steps
        // while each one at least halves the residual.
        for _ in 0..POLISH_STEPS {
            if res == 0.0 || iterations >= opts.max_iterations {
                break;
            }
            let Ok(step) = system.newton_step(&u, &system.residual(&u)) else {
                break;
            };
            let trial: Vec<f64> = u.iter().zip(&step).map(|(u, s)| u + s).collect();
            let r_trial = sup_norm(&system.residual(&trial));
            if !(r_trial < 0.5 * res) {
                break;
            }
            u = trial;
            res = r_trial;
            iterations += 1;
        }
        let lambda0 = max_lambda(q.values(), &u);
        Ok(ConformalSolution {
            u: ScalarField::new(mesh, u)?,
            residual_norm: res,
            iterations,
            branch: if lambda0 <= 1.0 + UPPER_BRANCH_SLACK {
                Branch::Upper
            } else {
                Branch::Unknown
            },
            converged: true,
        })
    };

    for iteration in 0..opts.max_iterations {
        if res <= opts.tolerance {
            return finish(u, res, iteration);
        }
        let step = system.newton_step(&u, &g);
        let step = match step {
            Ok(s) => s,
            // singular Jacobian: the iteration cannot move
            Err(_) => return Err(Error::NoSolutionDetected { iterations: iteration, residual: res }),
        };

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=ls.max_halvings {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(u, s)| u + alpha * s).collect();
            if trial.iter().all(|x| x.abs() <= MAX_ABS_U) {
                let g_trial = system.residual(&trial);
                let r_trial = sup_norm(&g_trial);
                if r_trial.is_finite() && r_trial < (1.0 - ls.armijo * alpha) * res {
                    accepted = Some((trial, g_trial, r_trial));
                    break;
                }
            }
            alpha *= 0.5;
        }
        let Some((trial, g_trial, r_trial)) = accepted else {
            return Err(Error::NoSolutionDetected { iterations: iteration + 1, residual: res });
        };

        if r_trial > ls.stall_factor * res {
            stalls += 1;
        } else {
            stalls = 0;
        }
        u = trial;
        g = g_trial;
        res = r_trial;
        if res <= opts.tolerance {
            return finish(u, res, iteration + 1);
        }
        if stalls >= ls.stall_window {
            return Err(Error::NoSolutionDetected { iterations: iteration + 1, residual: res });
        }
    }
    Err(Error::MaxIterations {
        iterations: opts.max_iterations,
        residual: res,
    })
}

#[derive(Clone, Debug)]
pub struct ContinuationResult {
    /// `(t, solution)` for every ray point solved, in order.
    pub solutions: Vec<(f64, ConformalSolution)>,
    /// First `t` at which no solution was detected, if any.
    pub stopped_at: Option<f64>,
}

impl ContinuationResult {
    pub fn last_good_t(&self) -> Option<f64> {
        self.solutions.last().map(|(t, _)| *t)
    }
}

/// Solve along the ray `q(t) = t² q̂`, warm-starting each point from the
/// previous solution. Stops at the first no-solution diagnosis.
pub fn continuation_solve(
    mesh: &SurfaceMesh,
    q_hat: &QuadDiffNormField,
    t_values: &[f64],
    opts: &SolveOptions,
) -> Result<ContinuationResult> {
    for (i, &t) in t_values.iter().enumerate() {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::validation(format!("t_values[{i}]"), format!("ray parameter must be >= 0, got {t}")));
        }
        if i > 0 && t < t_values[i - 1] {
            return Err(Error::validation(format!("t_values[{i}]"), "ray parameters must be ascending"));
        }
    }
    let mut solutions: Vec<(f64, ConformalSolution)> = Vec::with_capacity(t_values.len());
    for (index, &t) in t_values.iter().enumerate() {
        let q = q_hat.scaled(t * t)?;
        let mut step_opts = opts.clone();
        if let Some((_, prev)) = solutions.last() {
            step_opts.initial_guess = Some(prev.u.clone());
        }
        match solve_gauss(mesh, &q, &step_opts) {
            Ok(sol) => solutions.push((t, sol)),
            Err(e) if e.is_no_solution() => {
                return Ok(ContinuationResult {
                    solutions,
                    stopped_at: Some(t),
                })
            }
            Err(e) => {
                return Err(Error::Ray {
                    index,
                    t,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(ContinuationResult {
        solutions,
        stopped_at: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_polygon_mesh;
    use crate::qdiff::constant_field;
    use approx::assert_relative_eq;

    #[test]
    fn fuchsian_data_needs_no_iterations() {
        let mesh = build_polygon_mesh(2, 1).unwrap();
        let q = constant_field(&mesh, 0.0).unwrap();
        let sol = solve_gauss(&mesh, &q, &SolveOptions::default()).unwrap();
        assert_eq!(sol.iterations, 0);
        assert_eq!(sol.u.max_abs(), 0.0);
        assert_eq!(sol.residual_norm, 0.0);
        assert_eq!(sol.branch, Branch::Upper);
    }

    #[test]
    fn residual_of_shifted_constant() {
        let mesh = build_polygon_mesh(2, 1).unwrap();
        let q = constant_field(&mesh, 0.0).unwrap();
        let u = ScalarField::constant(&mesh, -0.1).unwrap();
        let r = residual(&mesh, &q, &u).unwrap();
        let expected = 1.0 - (-0.2f64).exp(); // ≈ 0.18127
        for &v in r.values() {
            assert_relative_eq!(v, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn residual_norm_matches_reported() {
        let mesh = build_polygon_mesh(2, 1).unwrap();
        let q = constant_field(&mesh, 0.1).unwrap();
        let sol = solve_gauss(&mesh, &q, &SolveOptions::default()).unwrap();
        let r = residual(&mesh, &q, &sol.u).unwrap();
        assert_eq!(r.max_abs(), sol.residual_norm);
        assert!(sol.residual_norm <= 1e-10);
    }

    #[test]
    fn beyond_threshold_reports_no_solution() {
        let mesh = build_polygon_mesh(2, 0).unwrap();
        for c in [0.36, 0.5, 1.0] {
            let q = constant_field(&mesh, c).unwrap();
            let err = solve_gauss(&mesh, &q, &SolveOptions::default()).unwrap_err();
            assert!(err.is_no_solution(), "c = {c}: {err}");
        }
    }

    #[test]
    fn invalid_options_are_rejected() {
        let mesh = build_polygon_mesh(2, 0).unwrap();
        let q = constant_field(&mesh, 0.0).unwrap();
        let opts = SolveOptions { tolerance: 0.0, ..Default::default() };
        assert!(solve_gauss(&mesh, &q, &opts).unwrap_err().is_validation());
        let opts = SolveOptions { max_iterations: 0, ..Default::default() };
        assert!(solve_gauss(&mesh, &q, &opts).unwrap_err().is_validation());
    }

    #[test]
    fn continuation_rejects_descending_rays() {
        let mesh = build_polygon_mesh(2, 0).unwrap();
        let q = constant_field(&mesh, 1.0).unwrap();
        let err = continuation_solve(&mesh, &q, &[0.3, 0.1], &SolveOptions::default()).unwrap_err();
        assert!(err.is_validation());
    }

    #[test]
    fn max_iterations_surfaces() {
        let mesh = build_polygon_mesh(2, 0).unwrap();
        let q = constant_field(&mesh, 0.2).unwrap();
        let opts = SolveOptions { max_iterations: 1, ..Default::default() };
        assert!(matches!(solve_gauss(&mesh, &q, &opts), Err(Error::MaxIterations { .. })));
    }
}
