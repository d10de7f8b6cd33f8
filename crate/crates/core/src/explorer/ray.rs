use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gauss::{continuation_solve, max_lambda, ConformalSolution, SolveOptions};
use crate::mesh::SurfaceMesh;
use crate::qdiff::QuadDiffNormField;

#[derive(Clone, Debug)]
pub struct ThresholdOptions {
    pub tol_t: f64,
    /// First probe; later probes double until one fails.
    pub t_init: f64,
    pub t_max: f64,
    pub solve: SolveOptions,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            tol_t: 1e-3,
            t_init: 0.01,
            t_max: 1e3,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RayResult {
    pub t_star: f64,
    /// Every probe in evaluation order; `None` where no solution was found.
    pub lambda0_curve: Vec<(f64, Option<f64>)>,
    pub bracket: (f64, f64),
}

pub fn find_threshold(mesh: &SurfaceMesh, q_hat: &QuadDiffNormField, tol_t: f64) -> Result<RayResult> {
    find_threshold_with(mesh, q_hat, &ThresholdOptions { tol_t, ..Default::default() })
}

enum Probe {
    Ok(ConformalSolution),
    Fail,
}

/// Bracket the first `t` on the ray `t² q̂` where the solution is lost or
/// `λ₀` exceeds 1, then bisect to width `tol_t`.
pub fn find_threshold_with(mesh: &SurfaceMesh, q_hat: &QuadDiffNormField, opts: &ThresholdOptions) -> Result<RayResult> {
    if !(opts.tol_t > 0.0) {
        return Err(Error::validation("tol_t", format!("tolerance must be positive, got {}", opts.tol_t)));
    }
    if !(opts.t_init > 0.0 && opts.t_max > opts.t_init) {
        return Err(Error::validation("t_init", "need 0 < t_init < t_max"));
    }
    if q_hat.max() <= 0.0 {
        return Err(Error::validation("q_hat", "ray direction is identically zero"));
    }
    opts.solve.validate()?;

    let mut curve = Vec::new();
    let mut probe = |t: f64, warm: Option<&ConformalSolution>| -> Result<Probe> {
        let mut solve = opts.solve.clone();
        solve.initial_guess = warm.map(|s| s.u.clone());
        let run = continuation_solve(mesh, q_hat, &[t], &solve)?;
        match run.solutions.into_iter().next() {
            Some((_, sol)) => {
                let q = q_hat.scaled(t * t)?;
                let l0 = max_lambda(q.values(), sol.u.values());
                curve.push((t, Some(l0)));
                Ok(if l0 <= 1.0 { Probe::Ok(sol) } else { Probe::Fail })
            }
            None => {
                curve.push((t, None));
                Ok(Probe::Fail)
            }
        }
    };

    let mut t = opts.t_init;
    let mut good = match probe(t, None)? {
        Probe::Ok(sol) => sol,
        Probe::Fail => {
            return Err(Error::ThresholdOutOfRange(format!("threshold lies below the first probe t = {t}")));
        }
    };
    let mut t_ok = t;
    let mut t_fail = loop {
        t *= 2.0;
        if t > opts.t_max {
            return Err(Error::ThresholdOutOfRange(format!("no failure up to t_max = {}", opts.t_max)));
        }
        match probe(t, Some(&good))? {
            Probe::Ok(sol) => {
                good = sol;
                t_ok = t;
            }
            Probe::Fail => break t,
        }
    };
    while t_fail - t_ok > opts.tol_t {
        let mid = 0.5 * (t_ok + t_fail);
        match probe(mid, Some(&good))? {
            Probe::Ok(sol) => {
                good = sol;
                t_ok = mid;
            }
            Probe::Fail => t_fail = mid,
        }
    }
    Ok(RayResult {
        t_star: 0.5 * (t_ok + t_fail),
        lambda0_curve: curve,
        bracket: (t_ok, t_fail),
    })
}
