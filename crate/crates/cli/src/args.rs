use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "waf", version, about = "Minimal-surface data of weakly almost Fuchsian manifolds")]
pub struct Cli {
    /// Directory receiving report artifacts.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// TOML file with default tolerances and solver options.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Journal file (overrides $WAF_JOURNAL).
    #[arg(long, global = true)]
    pub journal: Option<PathBuf>,
    #[arg(long, global = true)]
    pub no_journal: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct SolverFlags {
    /// L∞ residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Triangulate the regular 4g-gon surface.
    GenMesh {
        #[arg(short, long)]
        genus: usize,
        #[arg(short, long, default_value_t = 0)]
        refinement: usize,
    },
    /// Solve the Gauss equation and emit the triple.
    Solve {
        /// Mesh file, `-` for stdin.
        #[arg(long, default_value = "-")]
        mesh: String,
        /// `const:C`, `zeros:V[*M],...@AMP`, or a field file.
        #[arg(short, long)]
        q: String,
        /// Initial guess: flat JSON array of u values.
        #[arg(long)]
        guess: Option<String>,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Principal-curvature report of a triple.
    Classify {
        #[arg(long, default_value = "-")]
        triple: String,
        #[arg(long)]
        tolerance: Option<f64>,
        /// Include the per-vertex λ field.
        #[arg(long)]
        field: bool,
    },
    /// Hausdorff, core-volume and quasi-isometry bounds, and optionally the dilatation bound.
    Bounds {
        #[arg(long, conflicts_with = "triple")]
        lambda0: Option<f64>,
        #[arg(short, long)]
        genus: Option<usize>,
        #[arg(long)]
        triple: Option<String>,
        #[arg(long, requires = "kappa2", allow_hyphen_values = true)]
        kappa1: Option<f64>,
        #[arg(long, requires = "kappa1", allow_hyphen_values = true)]
        kappa2: Option<f64>,
    },
    /// Leaf table of the equidistant foliation as CSV.
    Foliation {
        #[arg(long, default_value = "-")]
        triple: String,
        #[arg(long, default_value_t = -3.0, allow_hyphen_values = true)]
        t_min: f64,
        #[arg(long, default_value_t = 3.0, allow_hyphen_values = true)]
        t_max: f64,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Slab volume next to the closed-form core-volume bound.
    Slab {
        #[arg(long, default_value = "-")]
        triple: String,
        /// Defaults to −artanh λ₀.
        #[arg(long, allow_hyphen_values = true)]
        t1: Option<f64>,
        /// Defaults to artanh λ₀.
        #[arg(long, allow_hyphen_values = true)]
        t2: Option<f64>,
    },
    /// Bottom eigenvalue of the stability operator.
    Spectrum {
        #[arg(long, default_value = "-")]
        triple: String,
        /// Also write the eigenfunction as a field file.
        #[arg(long)]
        eigenfunction: Option<PathBuf>,
    },
    /// Locate the existence threshold along the ray t²·q̂.
    Ray {
        #[arg(long)]
        mesh: String,
        #[arg(long)]
        qhat: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        t_init: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
    },
    /// Base mesh with the collar of a1 pinched.
    Pinch {
        #[arg(short, long)]
        genus: usize,
        #[arg(long)]
        collar: f64,
        #[arg(short, long, default_value_t = 0)]
        refinement: usize,
    },
    /// Compactification distance between two triples.
    Distance {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// JSON array mapping vertices of a to vertices of b (null = unmapped).
        #[arg(long)]
        map: Option<String>,
        #[arg(long = "N")]
        terms: Option<usize>,
    },
    /// Manufactured-solution convergence study.
    Mms {
        #[arg(short, long, default_value_t = 2)]
        genus: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 3, 4])]
        levels: Vec<usize>,
        #[command(flatten)]
        solver: SolverFlags,
    },
    /// Re-run a journaled command and compare its outputs block.
    Replay {
        /// 1-based record number; defaults to the last record.
        #[arg(long)]
        record: Option<usize>,
    },
}
