//! `csd`: command-line front end for the source-detection library.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error. The optional
//! `THREADS` environment variable caps the worker pool; results are
//! byte-identical at any worker count.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use csd_core::asymptotics::{
    detection_prob_exact_with_ties, detection_prob_limit, urn_joint_pmf, urn_sample,
    BranchComposition, TieWeight, UrnSpec,
};
use csd_core::estimators::{estimate, top_k_baseline, EstimatorKind};
use csd_core::experiment::{method_aggregates, run_experiment, write_reports, ExperimentConfig};
use csd_core::graph::{from_edge_list_path, generate, GeneratorSpec, Graph};
use csd_core::likelihood::{
    broom_likelihood, cycle_position_probability, exact_source_likelihood,
    irregular_position_probability, line_likelihood, pseudo_tree_likelihood, LikelihoodTable,
};
use csd_core::numeric::rational_to_f64;
use csd_core::spread::{simulate_si, Snapshot, StopRule};
use csd_core::vaccine::{
    brute_force_protection, degree_heuristic_protection, protection_report_json,
    select_protection_set, select_protection_set_general,
};

#[derive(Parser)]
#[command(name = "csd", version, about = "Source detection for spreading processes on graphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a generated graph as an edge list.
    Generate(GenerateArgs),
    /// Simulate one spread and write the snapshot JSON.
    Spread(SpreadArgs),
    /// Run one estimator on a snapshot; prints the suspect set as JSON.
    Estimate(EstimateArgs),
    /// Exact per-source likelihood tables.
    #[command(subcommand)]
    Likelihood(LikelihoodCmd),
    /// Detection probabilities: exact finite-size values and their limits.
    #[command(subcommand)]
    Asymptotics(AsymptoticsCmd),
    /// Branch-size urn: exact pmf and seeded sampling.
    #[command(subcommand)]
    Urn(UrnCmd),
    /// Choose a protection set and report its cascade objective.
    Vaccine(VaccineArgs),
    /// Run a seeded batch experiment from a JSON config.
    Experiment(ExperimentArgs),
}

/// Graph input shared by several subcommands: an edge-list file or an inline
/// generator spec.
#[derive(Args)]
#[group(required = true, multiple = false)]
struct GraphInput {
    /// Edge-list file: one "u v" pair per line, '#' comments allowed.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Generator spec as JSON, e.g. '{"family":"line","n":7}'.
    #[arg(long)]
    spec: Option<String>,
}

impl GraphInput {
    /// Returns the dense graph plus, for edge lists, the original node ids.
    fn load(&self) -> Result<(Graph, Option<Vec<u64>>)> {
        match (&self.graph, &self.spec) {
            (Some(path), None) => {
                let loaded = from_edge_list_path(path)
                    .with_context(|| format!("loading {}", path.display()))?;
                Ok((loaded.graph, Some(loaded.external_ids)))
            }
            (None, Some(text)) => {
                let spec: GeneratorSpec =
                    serde_json::from_str(text).context("parsing generator spec")?;
                Ok((generate(&spec)?, None))
            }
            _ => unreachable!("clap enforces exactly one input"),
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Generator spec as JSON.
    #[arg(long)]
    spec: String,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpreadArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Source node id (uniform seeded draw when absent).
    #[arg(long)]
    source: Option<u64>,
    /// Stop once this many nodes are infected.
    #[arg(long)]
    size: usize,
    /// Also stop once infected end vertices reach ceil(size * A/B); "A/B".
    #[arg(long)]
    end_fraction: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Snapshot JSON file.
    #[arg(long)]
    snapshot: PathBuf,
    /// One of: rumor_center, bfs_rc, bfs_rc_shared, multi_end_vertex, sdc,
    /// jordan, exact_ml, top_k.
    #[arg(long)]
    method: String,
    /// Suspect-list size (top_k only).
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum LikelihoodCmd {
    /// Sum exact spreading-order probabilities per candidate source.
    Exact {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Same table for a snapshot containing exactly one cycle.
    PseudoTree {
        #[arg(long)]
        snapshot: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Per-order probability of one degree-delta vertex landing at each
    /// position k among n infections on a d-regular tree.
    Position {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        delta: usize,
    },
    /// Likelihood table of an n-node path inside a d-regular underlying graph.
    Line {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Likelihood table of a 2t-path with k_ends pendant leaves at one end.
    Broom {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k_ends: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: TableFormat,
    },
    /// Per-order probability of the cycle closing at each position k among n
    /// infections on a d-regular underlying graph.
    Cycle {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Full,
    Half,
}

impl From<TieArg> for TieWeight {
    fn from(t: TieArg) -> TieWeight {
        match t {
            TieArg::Full => TieWeight::Full,
            TieArg::Half => TieWeight::Half,
        }
    }
}

#[derive(Subcommand)]
enum AsymptoticsCmd {
    /// P(the top-ranked node is the true source) on the d-regular tree with n
    /// infected nodes.
    Exact {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "full")]
        tie: TieArg,
    },
    /// Large-n limit of that probability.
    Limit {
        #[arg(long)]
        d: usize,
    },
    /// CSV table over lists of degrees and sizes.
    Table {
        #[arg(long, value_delimiter = ',', required = true)]
        d: Vec<usize>,
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
    },
}

#[derive(Subcommand)]
enum UrnCmd {
    /// Exact probability that the source's branch sizes end at the given
    /// counts (comma-separated, d parts summing to n-1).
    Pmf {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        counts: Vec<usize>,
    },
    /// Seeded draws of the final branch-size profile, one line per run.
    Sample {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
    },
}

#[derive(Args)]
struct VaccineArgs {
    #[command(flatten)]
    input: GraphInput,
    /// Number of nodes to protect.
    #[arg(long)]
    k: usize,
    /// centroid | brute | degree
    #[arg(long, default_value = "centroid")]
    method: String,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Experiment config JSON file.
    #[arg(long)]
    config: PathBuf,
    /// Override the config's trial count.
    #[arg(long)]
    trials: Option<usize>,
    /// Override the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Report directory (overrides the config's output_dir; default ".").
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also write wall-clock timings to timings.csv.
    #[arg(long)]
    emit_timings: bool,
}

fn main() {
    // Die quietly when a downstream pipe closes (e.g. `csd ... | head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    configure_threads();
    if let Err(err) = run(cli.cmd) {
        eprintln!("error: {err:#}");
        std::process::exit(2);
    }
}

fn configure_threads() {
    if let Ok(val) = std::env::var("THREADS") {
        if let Ok(n) = val.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, contents)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{contents}"),
    }
    Ok(())
}

fn print_table(table: &LikelihoodTable, format: TableFormat) {
    match format {
        TableFormat::Csv => print!("{}", table.to_csv()),
        TableFormat::Json => println!("{}", table.to_json()),
    }
}

fn load_snapshot(path: &PathBuf) -> Result<Snapshot> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(Snapshot::from_json(&text)?)
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::Generate(args) => {
            let spec: GeneratorSpec =
                serde_json::from_str(&args.spec).context("parsing generator spec")?;
            let g = generate(&spec)?;
            let mut text = String::new();
            for (u, v) in g.edges() {
                text.push_str(&format!("{u} {v}\n"));
            }
            emit(&args.out, &text)
        }
        Cmd::Spread(args) => {
            let (g, ext) = args.input.load()?;
            let source = match args.source {
                Some(id) => match &ext {
                    Some(ids) => ids
                        .iter()
                        .position(|&e| e == id)
                        .with_context(|| format!("source {id} not in the graph"))?,
                    None => id as usize,
                },
                None => rand::Rng::gen_range(
                    &mut csd_core::rng::rng_for(args.seed, 0, csd_core::rng::stage::SOURCE),
                    0..g.node_count(),
                ),
            };
            let mut rule = StopRule::size(args.size);
            if let Some(frac) = &args.end_fraction {
                let (a, b) = frac
                    .split_once('/')
                    .context("end fraction must look like A/B")?;
                rule.end_fraction = (a.trim().parse()?, b.trim().parse()?);
            }
            let mut snap = simulate_si(&g, source, rule, args.seed)?;
            if let Some(ids) = ext {
                for id in &mut snap.node_ids {
                    *id = ids[*id as usize];
                }
            }
            emit(&args.out, &(snap.to_json() + "\n"))
        }
        Cmd::Estimate(args) => {
            let snap = load_snapshot(&args.snapshot)?;
            let est = match args.method.as_str() {
                "top_k" => {
                    let k = args.k.context("top_k needs --k")?;
                    top_k_baseline(&snap, k)?
                }
                other => {
                    let kind = match other {
                        "rumor_center" => EstimatorKind::RumorCenter,
                        "bfs_rc" => EstimatorKind::BfsRc { shared_tree: false },
                        "bfs_rc_shared" => EstimatorKind::BfsRc { shared_tree: true },
                        "multi_end_vertex" => EstimatorKind::MultiEndVertex,
                        "sdc" => EstimatorKind::Sdc,
                        "jordan" => EstimatorKind::Jordan,
                        "exact_ml" => EstimatorKind::ExactMl,
                        _ => bail!("unknown method {other}"),
                    };
                    estimate(&snap, kind)?
                }
            };
            let doc = serde_json::json!({
                "method": est.method,
                "representative": snap.node_ids[est.representative],
                "suspects": est.suspects.iter().map(|&v| snap.node_ids[v]).collect::<Vec<u64>>(),
                "scores": est.scores,
            });
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(())
        }
        Cmd::Likelihood(cmd) => run_likelihood(cmd),
        Cmd::Asymptotics(cmd) => run_asymptotics(cmd),
        Cmd::Urn(cmd) => run_urn(cmd),
        Cmd::Vaccine(args) => {
            let (g, ext) = args.input.load()?;
            let ps = match args.method.as_str() {
                "centroid" => match select_protection_set(&g, args.k) {
                    Err(csd_core::Error::NotATree) => {
                        select_protection_set_general(&g, args.k, None)?
                    }
                    other => other?,
                },
                "brute" => brute_force_protection(&g, args.k)?,
                "degree" => degree_heuristic_protection(&g, args.k)?,
                other => bail!("unknown method {other}"),
            };
            let mut doc: serde_json::Value = serde_json::from_str(&protection_report_json(&g, &ps))?;
            if let Some(ids) = ext {
                doc["protection_set"] = serde_json::json!(ps
                    .nodes
                    .iter()
                    .map(|&v| ids[v])
                    .collect::<Vec<u64>>());
            }
            println!("{}", serde_json::to_string_pretty(&doc)?);
            Ok(())
        }
        Cmd::Experiment(args) => {
            let text = std::fs::read_to_string(&args.config)
                .with_context(|| format!("reading {}", args.config.display()))?;
            let mut cfg: ExperimentConfig =
                serde_json::from_str(&text).context("parsing experiment config")?;
            if let Some(trials) = args.trials {
                cfg.trials = trials;
            }
            if let Some(seed) = args.seed {
                cfg.master_seed = seed;
            }
            if args.emit_timings {
                cfg.emit_timings = true;
            }
            let dir = args
                .out_dir
                .or_else(|| cfg.output_dir.clone().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            let result = run_experiment(&cfg)?;
            let files = write_reports(&cfg, &result, &dir)?;
            for (method, agg) in method_aggregates(&result.rows) {
                println!(
                    "{method}: trials={} mean_error={:.6} exact_rate={:.6} within_one_rate={:.6}",
                    agg.trials, agg.mean_error, agg.exact_rate, agg.within_one_rate
                );
            }
            for path in files {
                println!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn run_likelihood(cmd: LikelihoodCmd) -> Result<()> {
    match cmd {
        LikelihoodCmd::Exact { snapshot, format } => {
            let snap = load_snapshot(&snapshot)?;
            print_table(&exact_source_likelihood(&snap)?, format);
        }
        LikelihoodCmd::PseudoTree { snapshot, format } => {
            let snap = load_snapshot(&snapshot)?;
            print_table(&pseudo_tree_likelihood(&snap)?, format);
        }
        LikelihoodCmd::Position { d, n, delta } => {
            println!("k,numerator,denominator,probability");
            for k in 1..=n {
                let p = irregular_position_probability(d, delta, n, k)?;
                println!("{k},{},{},{:.6}", p.numer(), p.denom(), rational_to_f64(&p));
            }
        }
        LikelihoodCmd::Line { d, n, format } => {
            print_table(&line_likelihood(d, n)?, format);
        }
        LikelihoodCmd::Broom { d, t, k_ends, format } => {
            print_table(&broom_likelihood(d, t, k_ends)?, format);
        }
        LikelihoodCmd::Cycle { d, n } => {
            println!("k,numerator,denominator,probability");
            for k in 3..=n {
                let p = cycle_position_probability(d, n, k)?;
                println!("{k},{},{},{:.6}", p.numer(), p.denom(), rational_to_f64(&p));
            }
        }
    }
    Ok(())
}

fn run_asymptotics(cmd: AsymptoticsCmd) -> Result<()> {
    match cmd {
        AsymptoticsCmd::Exact { d, n, tie } => {
            println!("{:.6}", detection_prob_exact_with_ties(d, n, tie.into())?);
        }
        AsymptoticsCmd::Limit { d } => {
            println!("{:.6}", detection_prob_limit(d)?);
        }
        AsymptoticsCmd::Table { d, n } => {
            println!("d,n,exact_prob,limit");
            for &deg in &d {
                let lim = detection_prob_limit(deg)?;
                for &size in &n {
                    let exact = detection_prob_exact_with_ties(deg, size, TieWeight::Full)?;
                    println!("{deg},{size},{exact:.6},{lim:.6}");
                }
            }
        }
    }
    Ok(())
}

fn run_urn(cmd: UrnCmd) -> Result<()> {
    match cmd {
        UrnCmd::Pmf { d, n, counts } => {
            let spec = UrnSpec::spreading(d, n)?;
            let outcome = BranchComposition::new(counts);
            let p = urn_joint_pmf(&spec, &outcome)?;
            println!("{}/{} ({:.6})", p.numer(), p.denom(), rational_to_f64(&p));
        }
        UrnCmd::Sample { d, n, seed, runs } => {
            let spec = UrnSpec::spreading(d, n)?;
            for i in 0..runs {
                let comp = urn_sample(&spec, seed.wrapping_add(i as u64));
                let parts: Vec<String> = comp.parts.iter().map(|x| x.to_string()).collect();
                println!("{}", parts.join(" "));
            }
        }
    }
    Ok(())
}
