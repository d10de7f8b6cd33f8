use serde_json::{json, Map, Value};
use waf_core::classify::{
    curvature_report, dilatation_bound, geometric_bounds, Classification, DEFAULT_BOUNDARY_TOLERANCE,
};
use waf_core::explorer::{compact_distance, find_threshold_with, identity_correspondence, pinch_family, ThresholdOptions, DEFAULT_TERMS, PINCHED_CURVE};
use waf_core::foliation::FoliationModel;
use waf_core::gauss::solve_gauss;
use waf_core::mesh::build_polygon_mesh;
use waf_core::mms::mms_study;
use waf_core::stability::{stability_report, STRICT_STABILITY_TOLERANCE};
use waf_core::{Error, MinimalTriple, Result, ScalarField, SurfaceMesh};

use crate::args::{Command, SolverFlags};
use crate::config::Config;
use crate::io::{sha256_hex, Inputs};
use crate::qspec;

/// What a command produced: the primary artifact (printed to stdout and
/// written to `--out`), extra files, and the deterministic summary that goes
/// into the journal.
pub struct Outcome {
    pub artifact: String,
    pub artifact_name: &'static str,
    pub extras: Vec<(String, String)>,
    /// Files requested at explicit paths.
    pub writes: Vec<(std::path::PathBuf, String)>,
    pub summary: Value,
}

/// Inputs read and effective parameters, kept even when the command fails.
#[derive(Default)]
pub struct Context {
    pub inputs: Inputs,
    pub parameters: Map<String, Value>,
}

impl Context {
    fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }
}

/// JSON number, with non-finite values spelled out as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn to_json_line(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("value serializes");
    s.push('\n');
    s
}

fn mesh_summary(mesh: &SurfaceMesh) -> Value {
    json!({
        "genus": mesh.genus(),
        "vertices": mesh.num_vertices(),
        "edges": mesh.num_edges(),
        "faces": mesh.num_faces(),
        "euler_characteristic": mesh.euler_characteristic(),
        "total_area": num(mesh.total_area()),
        "refinement_level": mesh.refinement_level(),
    })
}

fn mesh_outcome(mesh: &SurfaceMesh, mut summary: Value) -> Outcome {
    let mut artifact = mesh.to_json();
    artifact.push('\n');
    if let (Value::Object(s), Value::Object(m)) = (&mut summary, mesh_summary(mesh)) {
        s.extend(m);
    }
    summary["artifact_sha256"] = json!(sha256_hex(artifact.as_bytes()));
    Outcome {
        artifact,
        artifact_name: "mesh.json",
        extras: Vec::new(),
        writes: Vec::new(),
        summary,
    }
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Numerical(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Numerical(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn solver_params(ctx: &mut Context, config: &Config, flags: &SolverFlags) -> waf_core::gauss::SolveOptions {
    let opts = config.solve_options(flags.tol, flags.max_iter);
    ctx.param("tolerance", opts.tolerance);
    ctx.param("max_iterations", opts.max_iterations);
    ctx.param("line_search", serde_json::to_value(opts.damping).expect("line search serializes"));
    opts
}

pub fn execute(command: &Command, config: &Config, ctx: &mut Context) -> Result<Outcome> {
    match command {
        Command::GenMesh { genus, refinement } => {
            ctx.param("genus", *genus);
            ctx.param("refinement", *refinement);
            let mesh = build_polygon_mesh(*genus, *refinement)?;
            Ok(mesh_outcome(&mesh, json!({})))
        }

        Command::Solve { mesh, q, guess, solver } => {
            let mut opts = solver_params(ctx, config, solver);
            ctx.param("q", q.as_str());
            let mesh = ctx.inputs.mesh(mesh)?;
            let q = qspec::parse(q, &mesh, &mut ctx.inputs)?;
            if let Some(path) = guess {
                let text = ctx.inputs.read("guess", path)?;
                opts.initial_guess = Some(ScalarField::from_json(&mesh, &text)?);
            }
            let solution = solve_gauss(&mesh, &q, &opts)?;
            let triple = MinimalTriple::new(mesh, q, solution)?;
            let sol = triple.solution();
            let solution_file = json!({
                "u": sol.u.values(),
                "residual_norm": num(sol.residual_norm),
                "iterations": sol.iterations,
                "branch": sol.branch,
                "converged": sol.converged,
            });
            let mut artifact = triple.to_json();
            artifact.push('\n');
            let summary = json!({
                "iterations": sol.iterations,
                "residual_norm": num(sol.residual_norm),
                "branch": sol.branch,
                "lambda0": num(triple.lambda0()),
                "u_min": num(sol.u.min()),
                "u_max": num(sol.u.max()),
                "artifact_sha256": sha256_hex(artifact.as_bytes()),
            });
            Ok(Outcome {
                artifact,
                artifact_name: "triple.json",
                extras: vec![("solution.json".into(), format!("{solution_file}\n"))],
                writes: Vec::new(),
                summary,
            })
        }

        Command::Classify { triple, tolerance, field } => {
            let tol = tolerance.or(config.classify.tolerance).unwrap_or(DEFAULT_BOUNDARY_TOLERANCE);
            ctx.param("tolerance", tol);
            ctx.param("field", *field);
            let t = ctx.inputs.triple("triple", triple)?;
            let r = curvature_report(t.mesh(), t.q(), t.solution(), tol)?;
            let summary = json!({
                "lambda0": num(r.lambda0),
                "argmax_vertex": r.argmax_vertex,
                "classification": r.classification.as_str(),
                "tolerance": num(r.tolerance),
            });
            let mut report = summary.clone();
            if *field {
                report["lambda_field"] = json!(r.lambda_field.values());
            }
            Ok(json_outcome(report, summary, "classify.json"))
        }

        Command::Bounds { lambda0, genus, triple, kappa1, kappa2 } => {
            let (l0, g) = match (lambda0, triple) {
                (Some(l), None) => {
                    let g = genus.ok_or_else(|| Error::validation("--genus", "required with --lambda0"))?;
                    (*l, g)
                }
                (None, Some(path)) => {
                    let t = ctx.inputs.triple("triple", path)?;
                    (t.lambda0(), genus.unwrap_or(t.mesh().genus()))
                }
                _ => return Err(Error::validation("bounds", "give exactly one of --lambda0 or --triple")),
            };
            ctx.param("lambda0", num(l0));
            ctx.param("genus", g);
            let b = geometric_bounds(l0, g)?;
            let mut report = json!({
                "lambda0": num(l0),
                "genus": g,
                "hausdorff_upper": num(b.hausdorff_upper),
                "core_volume_upper": num(b.core_volume_upper),
                "qi_constant_upper": num(b.qi_constant_upper),
            });
            if let (Some(k1), Some(k2)) = (kappa1, kappa2) {
                ctx.param("kappa1", *k1);
                ctx.param("kappa2", *k2);
                let d = dilatation_bound(*k1, *k2)?;
                report["dilatation"] = json!({
                    "kappa1": num(d.kappa1),
                    "kappa2": num(d.kappa2),
                    "epsilon": num(d.epsilon),
                    "dilatation_upper": num(d.dilatation_upper),
                });
            }
            Ok(json_outcome(report.clone(), report, "bounds.json"))
        }

        Command::Foliation { triple, t_min, t_max, samples } => {
            let n = samples.or(config.foliation.samples).unwrap_or(101);
            ctx.param("t_min", *t_min);
            ctx.param("t_max", *t_max);
            ctx.param("samples", n);
            let t = ctx.inputs.triple("triple", triple)?;
            let model = FoliationModel::new(&t, (*t_min, *t_max))?;
            let leaves = model.samples(n)?;
            let rows = leaves
                .iter()
                .map(|l| vec![l.t.to_string(), l.area.to_string(), l.min_distortion.to_string(), l.convex.to_string()])
                .collect();
            let artifact = csv_text(&["t", "area", "min_distortion", "convex"], rows)?;
            let summary = json!({
                "rows": leaves.len(),
                "lambda0": num(model.lambda0()),
                "min_distortion": num(leaves.iter().map(|l| l.min_distortion).fold(f64::INFINITY, f64::min)),
                "artifact_sha256": sha256_hex(artifact.as_bytes()),
            });
            Ok(Outcome {
                artifact,
                artifact_name: "foliation.csv",
                extras: Vec::new(),
        writes: Vec::new(),
                summary,
            })
        }

        Command::Slab { triple, t1, t2 } => {
            let t = ctx.inputs.triple("triple", triple)?;
            let model = FoliationModel::new(&t, (0.0, 0.0))?;
            let onset = model.lambda0().atanh();
            let (a, b) = (t1.unwrap_or(-onset), t2.unwrap_or(onset));
            ctx.param("t1", num(a));
            ctx.param("t2", num(b));
            let volume = model.slab_volume(a, b)?;
            let bound = geometric_bounds(model.lambda0(), t.mesh().genus())?.core_volume_upper;
            let report = json!({
                "t1": num(a),
                "t2": num(b),
                "lambda0": num(model.lambda0()),
                "volume": num(volume),
                "closed_form_bound": num(bound),
                "within_bound": volume <= bound,
            });
            Ok(json_outcome(report.clone(), report, "slab.json"))
        }

        Command::Spectrum { triple, eigenfunction } => {
            let t = ctx.inputs.triple("triple", triple)?;
            let r = stability_report(&t)?;
            let phi = r.eigenfunction.to_json();
            let report = json!({
                "bottom_eigenvalue": num(r.bottom_eigenvalue),
                "strictly_stable": r.strictly_stable,
                "stability_tolerance": STRICT_STABILITY_TOLERANCE,
                "eigenfunction_min": num(r.eigenfunction.min()),
                "eigenfunction_sha256": sha256_hex(phi.as_bytes()),
                "a_norm_sq_max": num(r.a_norm_sq_field.max()),
            });
            let mut out = json_outcome(report.clone(), report, "spectrum.json");
            if let Some(path) = eigenfunction {
                out.writes.push((path.clone(), format!("{phi}\n")));
            }
            out.extras.push(("eigenfunction.json".into(), format!("{phi}\n")));
            Ok(out)
        }

        Command::Ray { mesh, qhat, tol, t_init, t_max } => {
            let mut opts = ThresholdOptions {
                solve: config.solve_options(None, None),
                ..Default::default()
            };
            opts.tol_t = tol.or(config.ray.tol_t).unwrap_or(opts.tol_t);
            opts.t_init = t_init.or(config.ray.t_init).unwrap_or(opts.t_init);
            opts.t_max = t_max.or(config.ray.t_max).unwrap_or(opts.t_max);
            ctx.param("qhat", qhat.as_str());
            ctx.param("tol_t", opts.tol_t);
            ctx.param("t_init", opts.t_init);
            ctx.param("t_max", opts.t_max);
            let mesh = ctx.inputs.mesh(mesh)?;
            let q_hat = qspec::parse(qhat, &mesh, &mut ctx.inputs)?;
            let r = find_threshold_with(&mesh, &q_hat, &opts)?;
            let mut rows = Vec::new();
            for &(t, l0) in &r.lambda0_curve {
                rows.push(match l0 {
                    Some(l) => {
                        let b = geometric_bounds(l, mesh.genus())?;
                        vec![
                            t.to_string(),
                            l.to_string(),
                            Classification::of(l, DEFAULT_BOUNDARY_TOLERANCE).as_str().to_string(),
                            b.hausdorff_upper.to_string(),
                            b.core_volume_upper.to_string(),
                            b.qi_constant_upper.to_string(),
                        ]
                    }
                    None => vec![t.to_string(), String::new(), "NoSolution".into(), String::new(), String::new(), String::new()],
                });
            }
            let sweep = csv_text(&["t", "lambda0", "class", "hausdorff_upper", "core_volume_upper", "qi_constant_upper"], rows)?;
            let report = json!({
                "t_star": num(r.t_star),
                "bracket": [num(r.bracket.0), num(r.bracket.1)],
                "lambda0_curve": r.lambda0_curve.iter().map(|&(t, l)| json!([num(t), l.map(num)])).collect::<Vec<_>>(),
            });
            let mut out = json_outcome(report.clone(), report, "ray.json");
            out.summary["sweep_sha256"] = json!(sha256_hex(sweep.as_bytes()));
            out.extras.push(("ray.csv".into(), sweep));
            Ok(out)
        }

        Command::Pinch { genus, collar, refinement } => {
            ctx.param("genus", *genus);
            ctx.param("collar", *collar);
            ctx.param("refinement", *refinement);
            let mesh = pinch_family(*genus, *collar, *refinement)?;
            let base = build_polygon_mesh(*genus, *refinement)?;
            let summary = json!({
                "curve": PINCHED_CURVE,
                "curve_length": num(mesh.marked_curve_length(PINCHED_CURVE).unwrap_or(f64::NAN)),
                "base_curve_length": num(base.marked_curve_length(PINCHED_CURVE).unwrap_or(f64::NAN)),
            });
            Ok(mesh_outcome(&mesh, summary))
        }

        Command::Distance { a, b, map, terms } => {
            let n = terms.or(config.distance.terms).unwrap_or(DEFAULT_TERMS);
            ctx.param("N", n);
            let pa = ctx.inputs.triple("a", a)?;
            let pb = ctx.inputs.triple("b", b)?;
            let corr: Vec<Option<usize>> = match map {
                Some(path) => {
                    let text = ctx.inputs.read("map", path)?;
                    serde_json::from_str(&text).map_err(|e| Error::validation(path.as_str(), e.to_string()))?
                }
                None => identity_correspondence(pa.mesh().num_vertices()),
            };
            let d = compact_distance(&pa, &pb, &corr, n)?;
            let report = json!({
                "d_dm_proxy": num(d.d_dm_proxy),
                "d_phi": num(d.d_phi),
                "d_eps_samples": d.d_eps_samples.iter().map(|&(e, v)| json!([num(e), num(v)])).collect::<Vec<_>>(),
                "d_total": num(d.d_total),
                "tail_bound": num(d.tail_bound),
            });
            Ok(json_outcome(report.clone(), report, "distance.json"))
        }

        Command::Mms { genus, levels, solver } => {
            let opts = solver_params(ctx, config, solver);
            ctx.param("genus", *genus);
            ctx.param("levels", levels.clone());
            let study = mms_study(*genus, levels, &opts)?;
            let rows: Vec<Value> = study
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let ratio = (i > 0).then(|| study[i - 1].error_inf / l.error_inf);
                    json!({
                        "refinement": l.refinement,
                        "vertices": l.vertices,
                        "error_inf": num(l.error_inf),
                        "ratio": ratio.map(num),
                        "observed_order": ratio.map(|r| num(r.log2())),
                    })
                })
                .collect();
            let min_ratio = study.windows(2).map(|w| w[0].error_inf / w[1].error_inf).fold(f64::INFINITY, f64::min);
            let report = json!({ "genus": genus, "levels": rows, "min_ratio": num(min_ratio) });
            Ok(json_outcome(report.clone(), report, "mms.json"))
        }

        Command::Replay { .. } => Err(Error::validation("replay", "replay cannot be nested")),
    }
}

fn json_outcome(report: Value, summary: Value, name: &'static str) -> Outcome {
    Outcome {
        artifact: to_json_line(&report),
        artifact_name: name,
        extras: Vec::new(),
        writes: Vec::new(),
        summary,
    }
}

pub fn command_name(command: &Command) -> &'static str {
    match command {
        Command::GenMesh { .. } => "gen-mesh",
        Command::Solve { .. } => "solve",
        Command::Classify { .. } => "classify",
        Command::Bounds { .. } => "bounds",
        Command::Foliation { .. } => "foliation",
        Command::Slab { .. } => "slab",
        Command::Spectrum { .. } => "spectrum",
        Command::Ray { .. } => "ray",
        Command::Pinch { .. } => "pinch",
        Command::Distance { .. } => "distance",
        Command::Mms { .. } => "mms",
        Command::Replay { .. } => "replay",
    }
}
