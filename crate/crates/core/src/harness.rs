//! Monte Carlo sweeps over random scenarios and result emission.

use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candidates::{enumerate, CandidateLink, EnumerateOptions, SelectionConstraints};
use crate::error::{Error, Result};
use crate::graph::{
    algebraic_connectivity, build_graph, criticality_report, criticality_weighted, laplacian, spectrum, Graph,
};
use crate::optimize::{
    binomial, exhaustive, greedy_perturbation, prop2_bounds, random_baseline, relax_and_round, GreedyOptions, RelaxOptions,
    Selection,
};
use crate::scenario::{generate_random, Layout, RadioParams, Scenario};

/// Env var capping the number of worker threads; 0 or unset means one per core.
pub const THREADS_ENV: &str = "RIS_THREADS";

/// Quantity varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVar {
    UeCount,
    UavCount,
    RisCount,
    ThrRisDb,
}

impl SweepVar {
    pub fn key(self) -> &'static str {
        match self {
            SweepVar::UeCount => "ue_count",
            SweepVar::UavCount => "uav_count",
            SweepVar::RisCount => "ris_count",
            SweepVar::ThrRisDb => "thr_ris_db",
        }
    }

    pub fn is_count(self) -> bool {
        !matches!(self, SweepVar::ThrRisDb)
    }
}

impl FromStr for SweepVar {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ue_count" | "U" => Ok(SweepVar::UeCount),
            "uav_count" | "A" => Ok(SweepVar::UavCount),
            "ris_count" | "R" => Ok(SweepVar::RisCount),
            "thr_ris_db" => Ok(SweepVar::ThrRisDb),
            other => Err(format!("unknown sweep variable {other:?}")),
        }
    }
}

/// One column group of the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// The direct-link graph with no RIS links.
    Original,
    Random,
    Relax,
    Greedy,
    Exhaustive,
    /// Cumulative first- and second-order bounds along the greedy path.
    Bounds,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Original,
        Method::Random,
        Method::Relax,
        Method::Greedy,
        Method::Exhaustive,
        Method::Bounds,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Original => "original",
            Method::Random => "random",
            Method::Relax => "relax",
            Method::Greedy => "greedy",
            Method::Exhaustive => "exhaustive",
            Method::Bounds => "bounds",
        })
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

/// Switches that do not change the scenario itself.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanOptions {
    pub weighted_base: bool,
    pub strict_coverage: bool,
    pub allow_redundant: bool,
    pub plain_rounding: bool,
    pub recompute_criticality: bool,
    pub relax_iters: usize,
    pub relax_tol: f64,
    /// Exhaustive search is skipped for an iteration above this many subsets.
    pub exhaustive_guard: u128,
    /// Record wall-clock runtimes. Off by default so output is byte-stable.
    pub timing: bool,
}

impl Default for PlanOptions {
    fn default() -> Self {
        Self {
            weighted_base: false,
            strict_coverage: false,
            allow_redundant: false,
            plain_rounding: false,
            recompute_criticality: false,
            relax_iters: 300,
            relax_tol: 1e-7,
            exhaustive_guard: 200_000,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    pub sweep: SweepVar,
    /// Strictly increasing.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    pub layout: Layout<f64>,
    pub params: RadioParams<f64>,
    pub options: PlanOptions,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::ConfigValidation(m));
        if self.iterations < 1 {
            return bad("iterations must be at least 1".into());
        }
        if self.values.is_empty() {
            return bad("sweep needs at least one value".into());
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return bad(format!("sweep values must be strictly increasing: {:?}", self.values));
        }
        if self.sweep.is_count() && self.values.iter().any(|v| *v < 0.0 || v.fract() != 0.0) {
            return bad(format!("{} values must be non-negative integers", self.sweep.key()));
        }
        if matches!(self.sweep, SweepVar::UeCount | SweepVar::UavCount) && self.values.iter().any(|v| *v < 1.0) {
            return bad(format!("{} values must be at least 1", self.sweep.key()));
        }
        if let Some(xy) = &self.layout.ris_xy {
            if self.sweep == SweepVar::RisCount && self.values.iter().any(|&v| v as usize != xy.len()) {
                return bad("ris_xy fixes the RIS count, so it cannot be swept".into());
            }
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        Ok(())
    }

    /// Layout and radio parameters at one sweep value.
    pub fn point(&self, value: f64) -> (Layout<f64>, RadioParams<f64>) {
        let mut layout = self.layout.clone();
        let mut params = self.params.clone();
        match self.sweep {
            SweepVar::UeCount => layout.ue_count = value as usize,
            SweepVar::UavCount => layout.uav_count = value as usize,
            SweepVar::RisCount => layout.ris_count = value as usize,
            SweepVar::ThrRisDb => params.thr_ris_db = value,
        }
        (layout, params)
    }
}

/// Aggregate of one method at one sweep value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub sweep: f64,
    pub method: String,
    pub mean_l2: f64,
    pub std_l2: f64,
    pub mean_links: f64,
    pub mean_ms: f64,
    pub iters: usize,
}

/// Per-iteration values, in the order rows are emitted.
#[derive(Debug, Clone, PartialEq)]
struct Sample {
    label: &'static str,
    /// None when the method was skipped for this iteration.
    value: Option<(f64, usize, f64)>,
}

/// Everything the methods produced on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub seed: u64,
    pub candidates: usize,
    /// (label, lambda_2, links, ms); skipped methods are absent.
    pub values: Vec<(&'static str, f64, usize, f64)>,
}

impl IterationOutcome {
    pub fn get(&self, label: &str) -> Option<f64> {
        self.values.iter().find(|v| v.0 == label).map(|v| v.1)
    }
}

/// Seed used by the random baseline for a scenario seed.
pub fn random_stream_seed(seed: u64) -> u64 {
    seed ^ 0x9e37_79b9_7f4a_7c15
}

fn timed<R>(timing: bool, f: impl FnOnce() -> R) -> (R, f64) {
    if timing {
        let t = Instant::now();
        let r = f();
        (r, t.elapsed().as_secs_f64() * 1e3)
    } else {
        (f(), 0.0)
    }
}

/// Cumulative second-order bounds along a selection, applied step by step
/// to the graph as it grows. Steps without a defined bound fall back to the
/// first-order increment (upper) and to zero (lower).
fn prop2_path(
    g: &Graph<f64>,
    cands: &[CandidateLink<f64>],
    sel: &Selection<f64>,
) -> Result<(f64, f64)> {
    let mut l = laplacian(g);
    let mut upper = sel.lambda2_before;
    let mut lower = sel.lambda2_before;
    for step in &sel.per_step {
        let c = cands.iter().find(|c| c.id == step.id).expect("chosen ids come from cands");
        let sp = spectrum(&l)?;
        let now = sp.fiedler_value;
        let (du, dl) = match prop2_bounds(&l, &sp, c.weight, c.ue_node, c.uav_node) {
            Ok(b) => (
                b.upper_prop2.unwrap_or(b.upper_prop1) - now,
                b.lower.map_or(0.0, |lo| (lo - now).max(0.0)),
            ),
            Err(_) => (step.predicted, 0.0),
        };
        upper += du;
        lower += dl;
        l.add_edge_in_place(c.ue_node, c.uav_node, c.weight);
    }
    Ok((lower, upper))
}

struct Instance {
    s: Scenario<f64>,
    g: Graph<f64>,
    cands: Vec<CandidateLink<f64>>,
    cons: SelectionConstraints,
}

fn instance(plan: &ExperimentPlan, layout: &Layout<f64>, params: &RadioParams<f64>, seed: u64) -> Result<Instance> {
    let opts = &plan.options;
    let s = generate_random(seed, layout, params.clone())?;
    let eps = s.params.epsilon;
    let g0 = build_graph(&s);
    let crits = criticality_report(&g0, eps)?;
    let g = if opts.weighted_base {
        criticality_weighted(&g0, eps)?
    } else {
        g0.clone()
    };
    let cands = enumerate(
        &s,
        &g0,
        &crits,
        EnumerateOptions {
            allow_redundant: opts.allow_redundant,
        },
    )?;
    let cons = SelectionConstraints::for_scenario(&s, opts.strict_coverage);
    Ok(Instance { s, g, cands, cons })
}

fn exhaustive_fits(inst: &Instance, guard: u128) -> bool {
    binomial(inst.cands.len(), inst.cons.max_links.min(inst.cands.len())) <= guard
}

fn run_iteration(plan: &ExperimentPlan, inst: &Instance, seed: u64, with_exhaustive: bool) -> Result<Vec<Sample>> {
    let opts = &plan.options;
    let Instance { s, g, cands, cons, .. } = inst;
    let (g, cands, cons) = (g, cands.as_slice(), cons);
    let eps = s.params.epsilon;
    let greedy_opts = GreedyOptions {
        recompute_criticality: opts.recompute_criticality.then_some(eps),
    };

    let mut greedy_cache: Option<Selection<f64>> = None;
    let mut out = Vec::new();
    for &m in &plan.methods {
        match m {
            Method::Original => {
                let (l2, ms) = timed(opts.timing, || algebraic_connectivity(&laplacian(&g)));
                out.push(Sample {
                    label: "original",
                    value: Some((l2?, 0, ms)),
                });
            }
            Method::Random => {
                let (sel, ms) = timed(opts.timing, || random_baseline(&g, &cands, &cons, random_stream_seed(seed)));
                let sel = sel?;
                out.push(Sample {
                    label: "random",
                    value: Some((sel.lambda2_after, sel.links(), ms)),
                });
            }
            Method::Relax => {
                let ro = RelaxOptions {
                    iters: opts.relax_iters,
                    tol: opts.relax_tol,
                    plain_rounding: opts.plain_rounding,
                };
                let (res, ms) = timed(opts.timing, || relax_and_round(&g, &cands, &cons, ro));
                let (_, sel) = res?;
                out.push(Sample {
                    label: "relax",
                    value: Some((sel.lambda2_after, sel.links(), ms)),
                });
            }
            Method::Greedy => {
                let (sel, ms) = timed(opts.timing, || greedy_perturbation(&g, &cands, &cons, greedy_opts));
                let sel = sel?;
                out.push(Sample {
                    label: "greedy",
                    value: Some((sel.lambda2_after, sel.links(), ms)),
                });
                greedy_cache = Some(sel);
            }
            Method::Exhaustive => {
                let value = if with_exhaustive {
                    let (sel, ms) = timed(opts.timing, || exhaustive(g, cands, cons, opts.exhaustive_guard));
                    let sel = sel?;
                    Some((sel.lambda2_after, sel.links(), ms))
                } else {
                    None
                };
                out.push(Sample {
                    label: "exhaustive",
                    value,
                });
            }
            Method::Bounds => {
                let sel = match greedy_cache.take() {
                    Some(sel) => sel,
                    None => greedy_perturbation(&g, &cands, &cons, greedy_opts)?,
                };
                let links = sel.links();
                let (lower, upper) = prop2_path(&g, &cands, &sel)?;
                out.push(Sample {
                    label: "prop1_upper",
                    value: Some((sel.cumulative_prop1(), links, 0.0)),
                });
                out.push(Sample {
                    label: "prop2_upper",
                    value: Some((upper, links, 0.0)),
                });
                out.push(Sample {
                    label: "prop2_lower",
                    value: Some((lower, links, 0.0)),
                });
                greedy_cache = Some(sel);
            }
        }
    }
    Ok(out)
}

/// Runs every method on one scenario: the building block of [`run_sweep`],
/// exposed for per-iteration checks. Exhaustive search runs when this one
/// scenario fits under the guard.
pub fn run_single(plan: &ExperimentPlan, value: f64, iteration: usize) -> Result<IterationOutcome> {
    let (layout, params) = plan.point(value);
    let seed = plan.base_seed.wrapping_add(iteration as u64);
    let inst = instance(plan, &layout, &params, seed)?;
    let fits = exhaustive_fits(&inst, plan.options.exhaustive_guard);
    let samples = run_iteration(plan, &inst, seed, fits)?;
    Ok(IterationOutcome {
        seed,
        candidates: inst.cands.len(),
        values: samples
            .into_iter()
            .filter_map(|s| s.value.map(|(l2, links, ms)| (s.label, l2, links, ms)))
            .collect(),
    })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))
}

/// Runs the plan. Iterations at one sweep value use seeds
/// `base_seed .. base_seed + iterations`, so every sweep value sees the same
/// UE/UAV draws. Rows come out per sweep value in method order. Exhaustive
/// search is skipped for a whole sweep value, and gets no row there, when
/// any of its iterations exceeds the subset guard.
pub fn run_sweep(plan: &ExperimentPlan) -> Result<Vec<ResultRow>> {
    plan.validate()?;
    let pool = thread_pool()?;
    let mut rows = Vec::new();
    for &value in &plan.values {
        let (layout, params) = plan.point(value);
        let per_iter: Vec<Vec<Sample>> = pool.install(|| {
            let seeds: Vec<u64> = (0..plan.iterations).map(|i| plan.base_seed.wrapping_add(i as u64)).collect();
            let insts = seeds
                .par_iter()
                .map(|&seed| instance(plan, &layout, &params, seed))
                .collect::<Result<Vec<_>>>()?;
            let with_exhaustive = plan.methods.contains(&Method::Exhaustive)
                && insts.iter().all(|i| exhaustive_fits(i, plan.options.exhaustive_guard));
            insts
                .par_iter()
                .zip(&seeds)
                .map(|(inst, &seed)| run_iteration(plan, inst, seed, with_exhaustive))
                .collect::<Result<Vec<_>>>()
        })?;
        let Some(first) = per_iter.first() else {
            continue;
        };
        for (k, sample) in first.iter().enumerate() {
            let vals: Vec<(f64, usize, f64)> = per_iter.iter().filter_map(|it| it[k].value).collect();
            if vals.is_empty() {
                continue;
            }
            let l2: Vec<f64> = vals.iter().map(|v| v.0).collect();
            let (mean_l2, std_l2) = mean_std(&l2);
            let n = vals.len() as f64;
            rows.push(ResultRow {
                sweep: value,
                method: sample.label.to_string(),
                mean_l2,
                std_l2,
                mean_links: vals.iter().map(|v| v.1 as f64).sum::<f64>() / n,
                mean_ms: vals.iter().map(|v| v.2).sum::<f64>() / n,
                iters: vals.len(),
            });
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "sweep,method,mean_l2,std_l2,mean_links,mean_ms,iters";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

pub fn to_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.sweep, r.method, r.mean_l2, r.std_l2, r.mean_links, r.mean_ms, r.iters
        );
    }
    out
}

pub fn from_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == CSV_HEADER => {}
        _ => {
            return Err(Error::ConfigParse {
                line: 1,
                message: "missing CSV header".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let err = |message: String| Error::ConfigParse { line: i + 1, message };
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(err(format!("expected 7 fields, got {}", f.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| err(format!("{s:?}: {e}")));
            Ok(ResultRow {
                sweep: num(f[0])?,
                method: f[1].to_string(),
                mean_l2: num(f[2])?,
                std_l2: num(f[3])?,
                mean_links: num(f[4])?,
                mean_ms: num(f[5])?,
                iters: f[6].parse().map_err(|e| err(format!("{:?}: {e}", f[6])))?,
            })
        })
        .collect()
}

pub fn to_json(rows: &[ResultRow]) -> Result<String> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Vec<ResultRow>> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(rows: &[ResultRow], format: Format) -> Result<String> {
    match format {
        Format::Csv => Ok(to_csv(rows)),
        Format::Json => to_json(rows),
    }
}

/// Writes rows to `path`.
pub fn emit(rows: &[ResultRow], format: Format, path: &Path) -> Result<()> {
    let text = render(rows, format)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_plan() -> ExperimentPlan {
        let mut params = RadioParams::default();
        params.thr_ris_db = 5.0;
        ExperimentPlan {
            sweep: SweepVar::RisCount,
            values: vec![0.0, 2.0],
            iterations: 3,
            methods: Method::ALL.to_vec(),
            base_seed: 11,
            layout: Layout::new((6, 4, 2), (150.0, 150.0), (50.0, 20.0)),
            params,
            options: PlanOptions::default(),
        }
    }

    fn row(method: &str) -> ResultRow {
        ResultRow {
            sweep: 3.0,
            method: method.into(),
            mean_l2: 0.25,
            std_l2: 0.1,
            mean_links: 2.5,
            mean_ms: 0.0,
            iters: 50,
        }
    }

    #[test]
    fn csv_shapes() {
        assert_eq!(to_csv(&[]), format!("{CSV_HEADER}\n"));
        let one = to_csv(&[row("greedy")]);
        assert_eq!(one.lines().count(), 2);
        assert_eq!(one.lines().nth(1).unwrap(), "3,greedy,0.25,0.1,2.5,0,50");
        assert_eq!(from_csv(&one).unwrap(), vec![row("greedy")]);
    }

    #[test]
    fn json_round_trip() {
        let rows = vec![row("greedy"), row("random")];
        assert_eq!(from_json(&to_json(&rows).unwrap()).unwrap(), rows);
    }

    #[test]
    fn emit_reports_path() {
        let err = emit(&[], Format::Csv, Path::new("/nonexistent-dir/x.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/x.csv"));
    }

    #[test]
    fn names_parse() {
        for m in Method::ALL {
            assert_eq!(m.to_string().parse::<Method>().unwrap(), m);
        }
        assert_eq!("R".parse::<SweepVar>().unwrap(), SweepVar::RisCount);
        assert!("bogus".parse::<Method>().is_err());
    }

    #[test]
    fn validation() {
        let mut p = small_plan();
        p.values = vec![2.0, 1.0];
        assert!(p.validate().is_err());
        let mut p = small_plan();
        p.iterations = 0;
        assert!(p.validate().is_err());
        let mut p = small_plan();
        p.values = vec![0.5];
        assert!(p.validate().is_err());
    }

    #[test]
    fn original_is_independent_of_ris_count() {
        let rows = run_sweep(&small_plan()).unwrap();
        let orig: Vec<&ResultRow> = rows.iter().filter(|r| r.method == "original").collect();
        assert_eq!(orig.len(), 2);
        assert_eq!(orig[0].mean_l2, orig[1].mean_l2);
        assert_eq!(orig[0].std_l2, orig[1].std_l2);
    }

    #[test]
    fn deterministic_bytes() {
        let mut p = small_plan();
        p.iterations = 1;
        let a = to_csv(&run_sweep(&p).unwrap());
        let b = to_csv(&run_sweep(&p).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn per_iteration_ordering() {
        let p = small_plan();
        for i in 0..p.iterations {
            let o = run_single(&p, 2.0, i).unwrap();
            let get = |k| o.get(k).unwrap();
            assert!(get("original") <= get("random") + 1e-9);
            assert!(get("original") <= get("greedy") + 1e-9);
            assert!(get("relax") <= get("exhaustive") + 1e-9);
            assert!(get("greedy") <= get("exhaustive") + 1e-9);
            assert!(get("greedy") <= get("prop1_upper") + 1e-9);
            assert!(get("greedy") <= get("prop2_upper") + 1e-9);
        }
    }
}
