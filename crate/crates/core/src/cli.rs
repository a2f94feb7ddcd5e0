//! The `dsn` command line, runnable in-process.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::classify::{best_caterpillar_parameters, in_c_lambda_delta, in_c_star, Orientation, SearchLimits};
use crate::dp::{brute_force_solve, default_omega, solve_dp};
use crate::error::{DsnError, Result};
use crate::graph::{feasible, is_minimal, minimalize, LocalDigraph, Pattern, SolutionNetwork, WeightedDigraph};
use crate::io::{parse_instance, parse_solution, to_json, CertificateDocument, InstanceDocument, SolutionDocument};
use crate::reduction::{
    cycle_pattern_instance, expander_like_instance, mcc_to_flawed_diamond, mcc_to_pure_diamond, random_digraph,
    MccInstance,
};
use crate::structure::{core_decomposition, cutwidth_exact, scc_reports, treewidth_exact};

#[derive(Parser, Debug)]
#[command(
    name = "dsn",
    version,
    about = "Directed Steiner Network solver and analysis toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Test membership of the pattern in C_{λ,δ}, or in C*_{λ,δ} with --star.
    Classify {
        file: PathBuf,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        star: bool,
    },
    /// Optimum by the tree-decomposition dynamic program.
    Solve {
        file: PathBuf,
        #[arg(long)]
        treewidth: Option<usize>,
    },
    /// Optimum by exhaustive branch and bound.
    Oracle { file: PathBuf },
    /// Cutwidth, treewidth and core structure of a minimal solution.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        solution: Option<PathBuf>,
    },
    /// Emit a generated instance.
    Generate(GenerateArgs),
    /// Check a solution against an instance.
    Verify { instance: PathBuf, solution: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    PureDiamond,
    FlawedDiamond,
    Cycle,
    Expander,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CliOrientation {
    Out,
    In,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    kind: Kind,
    /// Number of parts, cycle terminals, or expander vertices.
    #[arg(long)]
    k: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    part_size: usize,
    #[arg(long, default_value_t = 0.7)]
    edge_prob: f64,
    #[arg(long, value_enum, default_value_t = CliOrientation::Out)]
    orientation: CliOrientation,
    /// Host vertices for `cycle` (default `2k`).
    #[arg(long)]
    vertices: Option<usize>,
}

/// Exit code and captured output streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: 0,
            stdout,
            stderr: String::new(),
        }
    }
}

#[derive(Serialize)]
struct ClassifyOutput {
    member: bool,
    lambda: usize,
    delta: usize,
    star: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<CertificateDocument>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reason: Option<String>,
}

#[derive(Serialize)]
struct SolveOutput {
    cost: u64,
    edges: Vec<(String, String)>,
    omega_used: usize,
}

#[derive(Serialize)]
struct Bounds {
    cw_7d: &'static str,
    tw_bound: &'static str,
}

#[derive(Serialize)]
struct CoreSummary {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    core_edges: usize,
    core_demands: usize,
    arborescences: usize,
}

#[derive(Serialize)]
struct SccSummary {
    vertices: Vec<String>,
    demands: usize,
    minimal: bool,
    layout_cutwidth: Option<usize>,
}

#[derive(Serialize)]
struct AnalyzeOutput {
    cost: u64,
    vertices: usize,
    edges: usize,
    demands: usize,
    lambda: usize,
    delta: usize,
    cutwidth: usize,
    treewidth: usize,
    bounds: Bounds,
    core: CoreSummary,
    sccs: Vec<SccSummary>,
}

#[derive(Serialize)]
struct VerifyOutput {
    feasible: bool,
    minimal: bool,
    cost: u64,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| DsnError::InvalidArgument(format!("cannot read {}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(WeightedDigraph, Pattern)> {
    parse_instance(&read(path)?)
        .map_err(|e| match e {
            DsnError::Parse(msg) => DsnError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })?
        .to_instance()
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Runs one command line (including the program name) and captures its output.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    match dispatch(cli.command) {
        Ok(out) => out,
        Err(e) => Outcome {
            code: e.exit_code(),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn line(json: String) -> String {
    json + "\n"
}

fn dispatch(cmd: Command) -> Result<Outcome> {
    match cmd {
        Command::Classify {
            file,
            lambda,
            delta,
            star,
        } => {
            let (_, h) = load(&file)?;
            let cert = if star {
                in_c_star(&h, lambda, delta)?
            } else {
                in_c_lambda_delta(&h, lambda, delta)?
            };
            let class = if star { "C*" } else { "C" };
            let out = ClassifyOutput {
                member: cert.is_some(),
                lambda,
                delta,
                star,
                reason: cert
                    .is_none()
                    .then(|| format!("no pattern in {class}_{{{lambda},{delta}}} has the same transitive closure")),
                certificate: cert.as_ref().map(CertificateDocument::from_certificate),
            };
            let code = if out.member { 0 } else { 1 };
            Ok(Outcome {
                code,
                stdout: line(to_json(&out)),
                stderr: String::new(),
            })
        }
        Command::Solve { file, treewidth } => {
            let (g, h) = load(&file)?;
            let omega = match treewidth {
                Some(w) => w,
                None => default_omega(&g, &h)?,
            };
            let sol = solve_dp(&g, &h, omega)?
                .ok_or_else(|| DsnError::Infeasible(format!("no solution of treewidth at most {omega}")))?;
            let out = SolveOutput {
                cost: sol.cost,
                edges: SolutionDocument::from_network(&sol.network).edges,
                omega_used: sol.omega,
            };
            Ok(Outcome::ok(line(to_json(&out))))
        }
        Command::Oracle { file } => {
            let (g, h) = load(&file)?;
            let (n, _) =
                brute_force_solve(&g, &h)?.ok_or_else(|| DsnError::Infeasible("some demand is unreachable".into()))?;
            Ok(Outcome::ok(line(to_json(&SolutionDocument::from_network(&n)))))
        }
        Command::Analyze { file, solution } => {
            let (g, h) = load(&file)?;
            let n = match solution {
                Some(p) => parse_solution(&read(&p)?)?.to_network(&g)?,
                None => {
                    brute_force_solve(&g, &h)?
                        .ok_or_else(|| DsnError::Infeasible("some demand is unreachable".into()))?
                        .0
                }
            };
            if !feasible(&n, &h)? {
                return Err(DsnError::Infeasible("the solution misses a demand".into()));
            }
            Ok(Outcome::ok(line(to_json(&analyze(&minimalize(&n, &h)?, &h)?))))
        }
        Command::Generate(args) => generate(&args).map(|doc| Outcome::ok(line(to_json(&doc)))),
        Command::Verify { instance, solution } => {
            let (g, h) = load(&instance)?;
            let n = parse_solution(&read(&solution)?)?.to_network(&g)?;
            let feasible = feasible(&n, &h)?;
            let out = VerifyOutput {
                feasible,
                minimal: feasible && is_minimal(&n, &h)?,
                cost: n.cost(),
            };
            Ok(Outcome {
                code: if feasible { 0 } else { 1 },
                stdout: line(to_json(&out)),
                stderr: String::new(),
            })
        }
    }
}

fn analyze(m: &SolutionNetwork<'_>, h: &Pattern) -> Result<AnalyzeOutput> {
    let local = LocalDigraph::from_network(m);
    let cutwidth = cutwidth_exact(&local)?.value;
    let (treewidth, _) = treewidth_exact(&local)?;
    let (lambda, delta, cert) = best_caterpillar_parameters(h, h.terminal_count(), &SearchLimits::default())?;
    let core = match core_decomposition(m, h, &cert).and_then(|c| c.validate(m, lambda, delta).map(|_| c)) {
        Ok(c) => CoreSummary {
            valid: true,
            error: None,
            core_edges: c.core.edge_count(),
            core_demands: c.core_pattern.demand_count(),
            arborescences: c.forest.len(),
        },
        Err(e) => CoreSummary {
            valid: false,
            error: Some(e.to_string()),
            core_edges: 0,
            core_demands: 0,
            arborescences: 0,
        },
    };
    let host = m.host();
    let sccs = scc_reports(m, h)?
        .into_iter()
        .map(|r| SccSummary {
            vertices: r.vertices.iter().map(|&v| host.name(v).to_string()).collect(),
            demands: r.pattern.demand_count(),
            minimal: r.is_minimal,
            layout_cutwidth: r.layout_cutwidth,
        })
        .collect();
    Ok(AnalyzeOutput {
        cost: m.cost(),
        vertices: m.vertex_count(),
        edges: m.edge_count(),
        demands: h.demand_count(),
        lambda,
        delta,
        cutwidth,
        treewidth,
        bounds: Bounds {
            cw_7d: pass(cutwidth <= 7 * h.demand_count()),
            tw_bound: pass(treewidth <= 7 * (1 + lambda) * (lambda + delta)),
        },
        core,
        sccs,
    })
}

fn generate(a: &GenerateArgs) -> Result<InstanceDocument> {
    let orientation = match a.orientation {
        CliOrientation::Out => Orientation::Out,
        CliOrientation::In => Orientation::In,
    };
    let (g, h) = match a.kind {
        Kind::PureDiamond | Kind::FlawedDiamond => {
            let mcc = MccInstance::random(a.k, a.part_size, a.edge_prob, a.seed)?;
            let r = if matches!(a.kind, Kind::PureDiamond) {
                mcc_to_pure_diamond(&mcc, orientation)?
            } else {
                mcc_to_flawed_diamond(&mcc, orientation)?
            };
            (r.graph, r.pattern)
        }
        Kind::Cycle => {
            let n = a.vertices.unwrap_or(2 * a.k);
            if a.k > n {
                return Err(DsnError::InvalidArgument(format!(
                    "{} terminals do not fit in {n} vertices",
                    a.k
                )));
            }
            let g = random_digraph(n, a.edge_prob, 10, a.seed)?;
            let r: Vec<String> = (0..a.k).map(|i| format!("v{i}")).collect();
            cycle_pattern_instance(&g, &r)?
        }
        Kind::Expander => expander_like_instance(a.k, a.seed)?,
    };
    Ok(InstanceDocument::from_instance(&g, &h))
}
