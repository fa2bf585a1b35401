//! Seeded batch experiments: spread many times, run a panel of estimators
//! on each snapshot, and emit deterministic report files.
//!
//! Reproducibility contract: per-trial randomness is derived from
//! (master seed, trial, stage), trials run in parallel, and results are
//! ordered by trial id afterward, so the emitted reports are byte-identical
//! for a fixed config regardless of worker count. Wall-clock timings are
//! inherently non-reproducible and therefore live in a separate opt-in file
//! that the deterministic reports never reference.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::estimators::{
    estimate, estimation_error, multi_end_vertex_estimate, top_k_baseline, EstimatorKind,
};
use crate::graph::{from_edge_list_path, generate, GeneratorSpec, Graph};
use crate::rng::{derive_seed, rng_for, stage};
use crate::spread::{simulate_si, StopRule};
use crate::{Error, Result};

/// Where the underlying graph comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "source")]
pub enum GraphSource {
    Generator { spec: GeneratorSpec },
    EdgeList { path: String },
}

/// One column of the estimator panel. `TopKMatched` is the top-k rumor
/// centrality baseline with k matched per trial to the end-vertex
/// algorithm's suspect-set size, the protocol used for fair comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MethodSpec {
    RumorCenter,
    BfsRc { shared_tree: bool },
    MultiEndVertex,
    Sdc,
    Jordan,
    ExactMl,
    TopKMatched,
}

impl MethodSpec {
    pub fn label(&self) -> &'static str {
        match self.to_kind() {
            Some(kind) => kind.label(),
            None => "top_k",
        }
    }

    fn to_kind(self) -> Option<EstimatorKind> {
        match self {
            MethodSpec::RumorCenter => Some(EstimatorKind::RumorCenter),
            MethodSpec::BfsRc { shared_tree } => Some(EstimatorKind::BfsRc { shared_tree }),
            MethodSpec::MultiEndVertex => Some(EstimatorKind::MultiEndVertex),
            MethodSpec::Sdc => Some(EstimatorKind::Sdc),
            MethodSpec::Jordan => Some(EstimatorKind::Jordan),
            MethodSpec::ExactMl => Some(EstimatorKind::ExactMl),
            MethodSpec::TopKMatched => None,
        }
    }
}

/// Full description of one experiment run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSource,
    pub stop: StopRule,
    pub methods: Vec<MethodSpec>,
    pub trials: usize,
    pub master_seed: u64,
    /// Regrow a fresh random graph per trial (seeded generators only).
    #[serde(default)]
    pub regenerate_graph_each_trial: bool,
    /// Also write wall-clock timings (non-reproducible, separate file).
    #[serde(default)]
    pub emit_timings: bool,
    /// Default directory for report files; CLI flags shadow it.
    #[serde(default)]
    pub output_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParam("experiment: trials must be >= 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidParam("experiment: no methods named".into()));
        }
        let mut labels: Vec<&str> = self.methods.iter().map(|m| m.label()).collect();
        labels.sort_unstable();
        labels.dedup();
        if labels.len() != self.methods.len() {
            return Err(Error::InvalidParam(
                "experiment: duplicate method in panel".into(),
            ));
        }
        if self.stop.target_size == 0 {
            return Err(Error::InvalidParam(
                "experiment: stop target must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// One estimator outcome on one trial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportRow {
    pub trial: usize,
    pub method: &'static str,
    pub kappa_size: usize,
    pub error: usize,
}

/// Wall-clock measurement, kept apart from the deterministic rows.
#[derive(Clone, Debug, PartialEq)]
pub struct TimingRow {
    pub trial: usize,
    pub method: &'static str,
    pub runtime_ms: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub rows: Vec<ReportRow>,
    pub timings: Vec<TimingRow>,
}

fn reseeded(spec: &GeneratorSpec, seed: u64) -> GeneratorSpec {
    match spec.clone() {
        GeneratorSpec::RandomRegular { n, d, .. } => GeneratorSpec::RandomRegular { n, d, seed },
        GeneratorSpec::BarabasiAlbert { n, m, .. } => GeneratorSpec::BarabasiAlbert { n, m, seed },
        GeneratorSpec::RandomBoundedDegreeTree { n, d_max, .. } => {
            GeneratorSpec::RandomBoundedDegreeTree { n, d_max, seed }
        }
        fixed => fixed,
    }
}

fn trial_rows(
    cfg: &ExperimentConfig,
    g: &Graph,
    trial: usize,
) -> Result<(Vec<ReportRow>, Vec<TimingRow>)> {
    let source = rand::Rng::gen_range(
        &mut rng_for(cfg.master_seed, trial as u64, stage::SOURCE),
        0..g.node_count(),
    );
    let snap = simulate_si(
        g,
        source,
        cfg.stop,
        derive_seed(cfg.master_seed, trial as u64, stage::SPREAD),
    )?;
    let truth = snap.true_source.expect("simulation records its source");
    let matched_k = if cfg.methods.contains(&MethodSpec::TopKMatched) {
        Some(multi_end_vertex_estimate(&snap)?.suspects.len())
    } else {
        None
    };
    let mut rows = Vec::with_capacity(cfg.methods.len());
    let mut timings = Vec::new();
    for m in &cfg.methods {
        let started = cfg.emit_timings.then(Instant::now);
        let est = match m.to_kind() {
            Some(kind) => estimate(&snap, kind)?,
            None => top_k_baseline(&snap, matched_k.expect("matched above"))?,
        };
        if let Some(t0) = started {
            timings.push(TimingRow {
                trial,
                method: m.label(),
                runtime_ms: t0.elapsed().as_secs_f64() * 1e3,
            });
        }
        let error = estimation_error(&est, truth, &snap)?;
        rows.push(ReportRow {
            trial,
            method: m.label(),
            kappa_size: est.suspects.len(),
            error,
        });
    }
    Ok((rows, timings))
}

/// Run all trials concurrently; rows come back ordered by trial id, then by
/// the config's method order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let shared: Option<Graph> = match &cfg.graph {
        GraphSource::EdgeList { path } => Some(from_edge_list_path(Path::new(path))?.graph),
        GraphSource::Generator { spec } => {
            if cfg.regenerate_graph_each_trial {
                None
            } else {
                Some(generate(spec)?)
            }
        }
    };
    let per_trial: Vec<(Vec<ReportRow>, Vec<TimingRow>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| match &shared {
            Some(g) => trial_rows(cfg, g, trial),
            None => {
                let GraphSource::Generator { spec } = &cfg.graph else {
                    unreachable!("edge lists are always shared")
                };
                let seed = derive_seed(cfg.master_seed, trial as u64, stage::GRAPH);
                let g = generate(&reseeded(spec, seed))?;
                trial_rows(cfg, &g, trial)
            }
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(cfg.trials * cfg.methods.len());
    let mut timings = Vec::new();
    for (r, t) in per_trial {
        rows.extend(r);
        timings.extend(t);
    }
    Ok(ExperimentResult { rows, timings })
}

/// Per-method aggregate statistics, recomputable from the rows.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MethodAggregate {
    pub trials: usize,
    pub mean_error: f64,
    pub mean_kappa: f64,
    /// Fraction of trials with the true source inside the suspect set.
    pub exact_rate: f64,
    /// Fraction of trials with error at most one hop.
    pub within_one_rate: f64,
}

pub fn method_aggregates(rows: &[ReportRow]) -> BTreeMap<&'static str, MethodAggregate> {
    let mut acc: BTreeMap<&'static str, (usize, usize, usize, usize, usize)> = BTreeMap::new();
    for r in rows {
        let e = acc.entry(r.method).or_default();
        e.0 += 1;
        e.1 += r.error;
        e.2 += r.kappa_size;
        e.3 += (r.error == 0) as usize;
        e.4 += (r.error <= 1) as usize;
    }
    acc.into_iter()
        .map(|(m, (n, err, kap, hit, near))| {
            let nf = n as f64;
            (
                m,
                MethodAggregate {
                    trials: n,
                    mean_error: err as f64 / nf,
                    mean_kappa: kap as f64 / nf,
                    exact_rate: hit as f64 / nf,
                    within_one_rate: near as f64 / nf,
                },
            )
        })
        .collect()
}

/// Per-trial rows as CSV. Header always present.
pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from("trial,method,kappa_size,error\n");
    for r in rows {
        writeln!(out, "{},{},{},{}", r.trial, r.method, r.kappa_size, r.error).expect("string io");
    }
    out
}

/// Wall-clock file, clearly separated from the deterministic outputs.
pub fn timings_csv(timings: &[TimingRow]) -> String {
    let mut out = String::from("trial,method,runtime_ms\n");
    for t in timings {
        writeln!(out, "{},{},{:.3}", t.trial, t.method, t.runtime_ms).expect("string io");
    }
    out
}

/// Aggregate summary as JSON with sorted keys and fixed six-decimal floats,
/// echoing the config for provenance.
pub fn summary_json(cfg: &ExperimentConfig, rows: &[ReportRow]) -> String {
    let mut out = String::from("{\n");
    let cfg_json = serde_json::to_string(cfg).expect("config serializes");
    writeln!(out, "  \"config\": {cfg_json},").expect("string io");
    out.push_str("  \"methods\": {\n");
    let aggs = method_aggregates(rows);
    let last = aggs.len();
    for (i, (method, a)) in aggs.iter().enumerate() {
        writeln!(
            out,
            "    \"{method}\": {{\"exact_rate\": {:.6}, \"mean_error\": {:.6}, \"mean_kappa\": {:.6}, \"trials\": {}, \"within_one_rate\": {:.6}}}{}",
            a.exact_rate,
            a.mean_error,
            a.mean_kappa,
            a.trials,
            a.within_one_rate,
            if i + 1 == last { "" } else { "," }
        )
        .expect("string io");
    }
    out.push_str("  },\n");
    writeln!(out, "  \"trials\": {}\n}}", rows.iter().map(|r| r.trial + 1).max().unwrap_or(0))
        .expect("string io");
    out
}

/// Error histogram as two-column text, one block per method, ready for any
/// plotter.
pub fn histogram_dat(rows: &[ReportRow]) -> String {
    let mut by_method: BTreeMap<&'static str, Vec<usize>> = BTreeMap::new();
    for r in rows {
        let hist = by_method.entry(r.method).or_default();
        if hist.len() <= r.error {
            hist.resize(r.error + 1, 0);
        }
        hist[r.error] += 1;
    }
    let mut out = String::new();
    for (method, hist) in by_method {
        writeln!(out, "# method: {method}").expect("string io");
        for (err, count) in hist.iter().enumerate() {
            writeln!(out, "{err} {count}").expect("string io");
        }
        out.push('\n');
    }
    out
}

/// Write report.csv, summary.json, hist.dat (and timings.csv when enabled)
/// into `dir`, returning the paths written.
pub fn write_reports(
    cfg: &ExperimentConfig,
    result: &ExperimentResult,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let mut emit = |name: &str, contents: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents)?;
        written.push(path);
        Ok(())
    };
    emit("report.csv", report_csv(&result.rows))?;
    emit("summary.json", summary_json(cfg, &result.rows))?;
    emit("hist.dat", histogram_dat(&result.rows))?;
    if cfg.emit_timings {
        emit("timings.csv", timings_csv(&result.timings))?;
    }
    Ok(written)
}
