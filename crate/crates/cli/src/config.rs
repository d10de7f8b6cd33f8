use std::path::Path;

use serde::Deserialize;
use waf_core::gauss::SolveOptions;
use waf_core::Error;

/// Layered defaults read from a TOML file; command-line flags override them.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub solve: SolveSection,
    pub classify: ClassifySection,
    pub ray: RaySection,
    pub foliation: FoliationSection,
    pub distance: DistanceSection,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveSection {
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub armijo: Option<f64>,
    pub max_halvings: Option<u32>,
    pub stall_factor: Option<f64>,
    pub stall_window: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifySection {
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RaySection {
    pub tol_t: Option<f64>,
    pub t_init: Option<f64>,
    pub t_max: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FoliationSection {
    pub samples: Option<usize>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistanceSection {
    pub terms: Option<usize>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Config, Error> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation(path.display().to_string(), e.to_string()))?;
        toml::from_str(&text).map_err(|e| Error::validation(path.display().to_string(), e.to_string()))
    }

    /// Solver options with `tolerance`/`max_iterations` flags taking precedence.
    pub fn solve_options(&self, tolerance: Option<f64>, max_iterations: Option<usize>) -> SolveOptions {
        let mut opts = SolveOptions::default();
        let s = &self.solve;
        opts.tolerance = tolerance.or(s.tolerance).unwrap_or(opts.tolerance);
        opts.max_iterations = max_iterations.or(s.max_iterations).unwrap_or(opts.max_iterations);
        if let Some(v) = s.armijo {
            opts.damping.armijo = v;
        }
        if let Some(v) = s.max_halvings {
            opts.damping.max_halvings = v;
        }
        if let Some(v) = s.stall_factor {
            opts.damping.stall_factor = v;
        }
        if let Some(v) = s.stall_window {
            opts.damping.stall_window = v;
        }
        opts
    }
}
