use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use risnet::candidates::{enumerate, to_csv, EnumerateOptions, SelectionConstraints};
use risnet::config::load_config_file;
use risnet::graph::{algebraic_connectivity, build_graph, criticality_report, criticality_weighted, laplacian};
use risnet::harness::{render, run_sweep, ExperimentPlan, Format};
use risnet::optimize::{greedy_perturbation, GreedyOptions};
use risnet::scenario::{generate_random, NodeKind};
use risnet::{verify, Error};

#[derive(Parser)]
#[command(name = "risnet", version, about = "Connectivity maximization for RIS-assisted UAV networks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the Monte Carlo sweep described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "csv")]
        format: Format,
    },
    /// Print graph, criticality and candidate details for one scenario.
    Inspect {
        #[arg(long)]
        config: PathBuf,
        /// Scenario seed; defaults to the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the direct-link graph as an edge list.
        #[arg(long)]
        graph: Option<PathBuf>,
        /// Write the candidate links as CSV.
        #[arg(long)]
        candidates: Option<PathBuf>,
        /// Write the greedy solver trace as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the built-in oracle checks.
    Verify,
}

enum Failure {
    Config(Error),
    Run(Error),
}

fn load(path: &Path) -> Result<ExperimentPlan, Failure> {
    load_config_file(path).map_err(Failure::Config)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|source| {
        Failure::Run(Error::Io {
            path: path.display().to_string(),
            source,
        })
    })
}

fn run(config: &Path, out: Option<&Path>, format: Format) -> Result<(), Failure> {
    let plan = load(config)?;
    let rows = run_sweep(&plan).map_err(Failure::Run)?;
    let text = render(&rows, format).map_err(Failure::Run)?;
    match out {
        Some(path) => write(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn inspect(
    config: &Path,
    seed: Option<u64>,
    graph_out: Option<&Path>,
    cands_out: Option<&Path>,
    trace_out: Option<&Path>,
) -> Result<(), Failure> {
    let plan = load(config)?;
    let (layout, params) = plan.point(plan.values[0]);
    let seed = seed.unwrap_or(plan.base_seed);
    let s = generate_random(seed, &layout, params).map_err(Failure::Config)?;
    let eps = s.params.epsilon;
    let g0 = build_graph(&s);
    let crits = criticality_report(&g0, eps).map_err(Failure::Run)?;
    let g = if plan.options.weighted_base {
        criticality_weighted(&g0, eps).map_err(Failure::Run)?
    } else {
        g0.clone()
    };
    let l2 = algebraic_connectivity(&laplacian(&g)).map_err(Failure::Run)?;
    let opts = EnumerateOptions {
        allow_redundant: plan.options.allow_redundant,
    };
    let cands = enumerate(&s, &g0, &crits, opts).map_err(Failure::Run)?;

    println!("seed {seed}");
    println!(
        "nodes {} (UE {}, UAV {}), RIS {}",
        s.n_nodes(),
        s.ue_count(),
        s.uav_count(),
        s.ris_count()
    );
    println!("edges {}, components {}, lambda2 {l2}", g.edges().len(), g.component_count());
    println!("node kind degree criticality clamped");
    for n in 0..g.n_nodes() {
        let kind = match g.node_kinds()[n] {
            NodeKind::Ue => "ue",
            NodeKind::Uav => "uav",
        };
        println!(
            "{n} {kind} {} {} {}",
            g.neighbors(n).count(),
            crits.values[n],
            crits.clamped[n]
        );
    }
    println!("candidates {}", cands.len());
    if cands.is_empty() {
        println!("candidate-free instance");
    }

    if let Some(path) = graph_out {
        write(path, &g.to_edge_list())?;
    }
    if let Some(path) = cands_out {
        write(path, &to_csv(&cands))?;
    }
    if let Some(path) = trace_out {
        let cons = SelectionConstraints::for_scenario(&s, plan.options.strict_coverage);
        let sel = greedy_perturbation(&g, &cands, &cons, GreedyOptions::default()).map_err(Failure::Run)?;
        let mut text = sel.trace_lines().join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        write(path, &text)?;
    }
    Ok(())
}

fn verify_all() -> Result<bool, Failure> {
    let checks = verify::run_all().map_err(Failure::Run)?;
    let mut ok = true;
    for c in &checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        ok &= c.passed;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run { config, out, format } => run(&config, out.as_deref(), format),
        Cmd::Inspect {
            config,
            seed,
            graph,
            candidates,
            trace,
        } => inspect(&config, seed, graph.as_deref(), candidates.as_deref(), trace.as_deref()),
        Cmd::Verify => match verify_all() {
            Ok(true) => Ok(()),
            Ok(false) => return ExitCode::from(1),
            Err(e) => Err(e),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
