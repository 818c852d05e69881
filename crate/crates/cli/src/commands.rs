use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ptgraph_core::format::{csv_row, format_value};
use ptgraph_core::graph::{Couplings, GraphKind, GraphSpec};
use ptgraph_core::metric::{metric_from_left_eigenvectors, MetricValidity};
use ptgraph_core::stability::{
    bisect_reality_change, boundary_curve, linear_grid, linspace, loop_hamiltonian, perturbation_scenarios,
    scan_z, verify_boundary, BoundaryBranch, BoundarySample, BoundaryVerdict, DEFAULT_EPSILON, DEFAULT_MARGIN,
    EP_WIDTH,
};
use ptgraph_core::{build_coupled_chain, eigen::count_real, SquareRealMatrix};
use serde_json::json;

use crate::config::{parse_grid, parse_weights, RunConfig};
use crate::{BranchChoice, Cli, CliError, Command, Model, ModelArgs};

const DEFAULT_SAMPLES: usize = 101;
const DEFAULT_METRIC_TOL: f64 = 1e-10;

/// Names accepted by `figure`.
pub const FIGURES: [&str; 7] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

struct Context {
    config: RunConfig,
    out: Option<PathBuf>,
    tol: Option<f64>,
    quiet: bool,
}

impl Context {
    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => write_file(path, text),
            None => {
                let mut stdout = std::io::stdout().lock();
                match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                    Ok(()) => Ok(()),
                    // a closed pipe (e.g. `| head`) is not an error for a filter-style tool
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                    Err(e) => Err(CliError { code: 1, message: format!("cannot write stdout: {e}") }),
                }
            }
        }
    }

    fn report(&self, text: &str) {
        if !self.quiet {
            eprintln!("{text}");
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError { code: 1, message: format!("cannot write {}: {e}", path.display()) })
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::config(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Rounds to the 12 significant digits used for every printed number.
fn rounded(v: f64) -> f64 {
    format_value(v).parse().unwrap_or(v)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig::load(cli.global.config.as_deref())?;
    let out = cli.global.out.or_else(|| config.out.clone().map(PathBuf::from));
    let tol = cli.global.tol.or(config.tol).map(|t| positive("--tol", t)).transpose()?;
    let quiet = cli.global.quiet || config.quiet.unwrap_or(false);
    let ctx = Context { config, out, tol, quiet };
    match cli.command {
        Command::Build(model) => cmd_build(&ctx, &model),
        Command::Scan { gamma, delta, z } => cmd_scan(&ctx, gamma, delta, z),
        Command::Ep { model, k, gamma, delta, bracket } => cmd_ep(&ctx, model, k, gamma, delta, bracket),
        Command::Boundary { samples, verify, margin, branch } => cmd_boundary(&ctx, samples, verify, margin, branch),
        Command::Metric { model, weights, report } => cmd_metric(&ctx, &model, weights, report),
        Command::Figure { name, epsilon } => cmd_figure(&ctx, &name, epsilon),
    }
}

fn parse_model(text: &str) -> Result<Model, CliError> {
    match text {
        "chain" => Ok(Model::Chain),
        "loop" => Ok(Model::Loop),
        other => Err(CliError::config(format!("unknown model `{other}` (expected chain or loop)"))),
    }
}

fn resolve_spec(ctx: &Context, args: &ModelArgs) -> Result<GraphSpec, CliError> {
    let c = &ctx.config;
    let model = match args.model {
        Some(m) => m,
        None => parse_model(c.model.as_deref().ok_or_else(|| CliError::config("--model is required"))?)?,
    };
    let pick = |flag: Option<f64>, file: Option<f64>| flag.or(file);
    let couplings = Couplings {
        nu: pick(args.nu, c.nu),
        g: pick(args.g, c.g),
        h: pick(args.h, c.h),
        z: pick(args.z, c.z),
    };
    let (kind, default_k) = match model {
        Model::Chain => (GraphKind::Chain, 1),
        Model::Loop => (GraphKind::Loop, 3),
    };
    let spec = GraphSpec { kind, k: args.k.or(c.k).unwrap_or(default_k), couplings };
    spec.validate()?;
    Ok(spec)
}

fn cmd_build(ctx: &Context, args: &ModelArgs) -> Result<(), CliError> {
    let m = resolve_spec(ctx, args)?.build()?;
    ctx.emit(&m.to_csv())
}

fn cmd_scan(ctx: &Context, gamma: Option<f64>, delta: Option<f64>, z: Option<String>) -> Result<(), CliError> {
    let c = &ctx.config;
    let grid_text = z.or_else(|| c.z_grid.clone()).ok_or_else(|| CliError::config("--z start:stop:step is required"))?;
    let grid = parse_grid(&grid_text)?;
    let scan = scan_z(gamma.or(c.gamma).unwrap_or(0.0), delta.or(c.delta).unwrap_or(0.0), &grid)?;
    ctx.emit(&scan.to_csv())
}

fn cmd_ep(
    ctx: &Context,
    model: Option<Model>,
    k: Option<usize>,
    gamma: Option<f64>,
    delta: Option<f64>,
    bracket: Option<Vec<f64>>,
) -> Result<(), CliError> {
    let c = &ctx.config;
    let model = match model {
        Some(m) => m,
        None => c.model.as_deref().map(parse_model).transpose()?.unwrap_or(Model::Loop),
    };
    let [lo, hi] = match bracket {
        Some(b) => [b[0], b[1]],
        None => c.bracket.ok_or_else(|| CliError::config("--bracket LO HI is required"))?,
    };
    let width = ctx.tol.unwrap_or(EP_WIDTH);
    let value = match model {
        Model::Loop => {
            let gamma = gamma.or(c.gamma).unwrap_or(0.0);
            let delta = delta.or(c.delta).unwrap_or(0.0);
            let z = bisect_reality_change(lo, hi, width, |z| count_real(&loop_hamiltonian(gamma, delta, z)?))?;
            json!({
                "model": "loop",
                "gamma": rounded(gamma),
                "delta": rounded(delta),
                "bracket": [rounded(lo), rounded(hi)],
                "z_ep": rounded(z),
            })
        }
        Model::Chain => {
            let k = k.or(c.k).unwrap_or(1);
            let nu = bisect_reality_change(lo, hi, width, |nu| count_real(&build_coupled_chain(k, nu)?))?;
            json!({
                "model": "chain",
                "K": k,
                "bracket": [rounded(lo), rounded(hi)],
                "nu_ep": rounded(nu),
            })
        }
    };
    ctx.emit(&format!("{}\n", serde_json::to_string_pretty(&value).expect("json")))
}

fn parse_branch(text: &str) -> Result<BranchChoice, CliError> {
    match text {
        "plus" => Ok(BranchChoice::Plus),
        "minus" => Ok(BranchChoice::Minus),
        "both" => Ok(BranchChoice::Both),
        other => Err(CliError::config(format!("unknown branch `{other}` (expected plus, minus or both)"))),
    }
}

fn boundary_samples(n: usize, branch: BranchChoice) -> Result<Vec<BoundarySample>, CliError> {
    let keep = |s: &BoundarySample| match branch {
        BranchChoice::Both => true,
        BranchChoice::Plus => s.branch == BoundaryBranch::Plus,
        BranchChoice::Minus => s.branch == BoundaryBranch::Minus,
    };
    Ok(boundary_curve(n)?.into_iter().filter(keep).collect())
}

fn cmd_boundary(
    ctx: &Context,
    samples: Option<usize>,
    verify: bool,
    margin: Option<f64>,
    branch: Option<BranchChoice>,
) -> Result<(), CliError> {
    let c = &ctx.config;
    let n = samples.or(c.samples).unwrap_or(DEFAULT_SAMPLES);
    if n < 2 {
        return Err(CliError::config(format!("--samples must be at least 2, got {n}")));
    }
    let branch = match branch {
        Some(b) => b,
        None => c.branch.as_deref().map(parse_branch).transpose()?.unwrap_or(BranchChoice::Both),
    };
    let verify = verify || c.verify.unwrap_or(false);
    let margin = positive("--margin", margin.or(c.margin).unwrap_or(DEFAULT_MARGIN))?;
    if margin >= 1.0 {
        return Err(CliError::config(format!("--margin must be below 1, got {margin}")));
    }
    let curve = boundary_samples(n, branch)?;

    let mut header = vec!["y", "branch", "mu_hat", "lambda_hat_max", "g", "z_max"];
    if verify {
        header.extend(["z_edge", "verdict"]);
    }
    let mut text = header.join(",");
    text.push('\n');
    let mut counts = [0usize; 3];
    for s in &curve {
        let mut cells = vec![
            format_value(s.y),
            s.branch.as_str().to_string(),
            format_value(s.mu_hat),
            format_value(s.lambda_hat_max),
            format_value(s.g),
            format_value(s.z_max),
        ];
        if verify {
            let verdict = verify_boundary(s, margin)?;
            counts[match verdict {
                BoundaryVerdict::Confirmed => 0,
                BoundaryVerdict::Refuted => 1,
                BoundaryVerdict::DegenerateWindow => 2,
            }] += 1;
            cells.push(format_value(ptgraph_core::stability::effective_z_max(s)));
            cells.push(verdict.as_str().to_string());
        }
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    ctx.emit(&text)?;
    if verify {
        let summary = json!({
            "samples": curve.len(),
            "margin": margin,
            "confirmed": counts[0],
            "refuted": counts[1],
            "degenerate_window": counts[2],
        });
        ctx.report(&serde_json::to_string(&summary).expect("json"));
    }
    Ok(())
}

fn cmd_metric(ctx: &Context, args: &ModelArgs, weights: Option<String>, report: Option<PathBuf>) -> Result<(), CliError> {
    let c = &ctx.config;
    let h: SquareRealMatrix = resolve_spec(ctx, args)?.build()?;
    let weights = match weights {
        Some(text) => Some(parse_weights(&text)?),
        None => c.weights.clone(),
    };
    let candidate = metric_from_left_eigenvectors(&h, weights.as_deref())?;
    let validity = candidate.validity(&h)?;
    let tol = ctx.tol.unwrap_or(DEFAULT_METRIC_TOL);
    let report_json = format!("{}\n", serde_json::to_string_pretty(&validity).expect("json"));
    match report.or_else(|| c.report.clone().map(PathBuf::from)) {
        Some(path) => write_file(&path, &report_json)?,
        None => ctx.report(report_json.trim_end()),
    }
    match validity.verdict(tol) {
        MetricValidity::Valid => ctx.emit(&candidate.theta.to_csv()),
        other => Err(CliError::refusal(format!("metric rejected: {other:?}"))),
    }
}

fn figure_scan(gamma: f64, start: f64, stop: f64, step: f64) -> Result<String, CliError> {
    Ok(scan_z(gamma, 0.0, &linear_grid(start, stop, step)?)?.to_csv())
}

fn figure_boundary() -> Result<String, CliError> {
    let mut text = String::from("y,mu_hat_minus,mu_hat_plus,lambda_hat_minus,lambda_hat_plus\n");
    let curve = boundary_curve(201)?;
    for pair in curve.chunks(2) {
        let (plus, minus) = (&pair[0], &pair[1]);
        let row = [plus.y, minus.mu_hat, plus.mu_hat, minus.lambda_hat_max, plus.lambda_hat_max];
        text.push_str(&csv_row(row.iter().copied()));
        text.push('\n');
    }
    Ok(text)
}

fn figure_perturbation(epsilon: f64) -> Result<String, CliError> {
    let grid = linspace(0.9, 1.1, 401);
    let report = perturbation_scenarios(1.035, &grid, epsilon)?;
    Ok(report.to_csv())
}

fn cmd_figure(ctx: &Context, name: &str, epsilon: Option<f64>) -> Result<(), CliError> {
    let epsilon = positive("--epsilon", epsilon.or(ctx.config.epsilon).unwrap_or(DEFAULT_EPSILON))?;
    let text = match name {
        "fig2" => figure_scan(0.0, -3.0, 3.0, 0.01)?,
        "fig3" => figure_scan(0.98, -3.0, 3.0, 0.01)?,
        "fig4" => figure_scan(1.035, -4.0, 4.0, 0.01)?,
        "fig5" => figure_scan(1.035, 0.9, 1.1, 0.0005)?,
        "fig6" => figure_boundary()?,
        // the negative shift closes the island through the central pair
        "fig7" => figure_perturbation(-epsilon)?,
        "fig8" => figure_perturbation(epsilon)?,
        other => {
            return Err(CliError::config(format!("unknown figure `{other}`; valid names: {}", FIGURES.join(", "))))
        }
    };
    ctx.emit(&text)
}
