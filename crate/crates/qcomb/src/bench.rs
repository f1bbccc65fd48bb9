//! Random-circuit routing benchmark: comb resynthesis against slice-and-route.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;
use std::time::Instant;

use qcomb_core::circuit::Circuit;
use qcomb_core::combsynth::{route_circuit_with, ExtractionPolicy};
use qcomb_core::random::{overhead_percent, random_circuit};
use qcomb_core::sim::{equivalent_up_to_phase, random_bindings, EQUIVALENCE_TOL};
use qcomb_core::slicer::slice_route;
use qcomb_core::topology::Topology;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::topo::{resolve_architecture, TopoIoError};

/// Instances at or below both limits are also checked for unitary equivalence.
pub const SPOT_CHECK_QUBITS: usize = 8;
pub const SPOT_CHECK_CNOTS: usize = 64;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Architecture(#[from] TopoIoError),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyName {
    #[default]
    LatestCut,
    MinCost,
}

impl PolicyName {
    pub fn policy(self) -> ExtractionPolicy {
        match self {
            PolicyName::LatestCut => ExtractionPolicy::LatestCut,
            PolicyName::MinCost => ExtractionPolicy::MinCost,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub architectures: Vec<String>,
    pub cnot_counts: Vec<usize>,
    pub proportions: Vec<f64>,
    pub circuits_per_point: usize,
    pub seed: u64,
    /// Worker threads; `None` lets rayon decide.
    pub threads: Option<usize>,
    /// Extraction order used by the comb method.
    pub policy: PolicyName,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            architectures: crate::topo::builtin_names().map(String::from).collect(),
            cnot_counts: (2..=10).map(|k| 1 << k).collect(),
            proportions: vec![0.05, 0.15, 0.25, 0.5],
            circuits_per_point: 20,
            seed: 2020,
            threads: None,
            policy: PolicyName::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: &str| Err(BenchError::Config(m.to_string()));
        if self.cnot_counts.contains(&0) {
            return bad("CNOT counts must be positive");
        }
        if self.proportions.iter().any(|p| !(*p > 0.0 && *p <= 1.0)) {
            return bad("proportions must lie in (0, 1]");
        }
        if self.threads == Some(0) {
            return bad("threads must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Comb,
    Slice,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Comb => "comb",
            Method::Slice => "slice",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub architecture: String,
    pub n_cnots_in: usize,
    pub proportion: f64,
    /// Seed of the input circuit.
    pub seed: u64,
    pub method: Method,
    /// `Err` carries the failure message; such records have no counts.
    pub outcome: Result<usize, String>,
    pub wall_millis: f64,
}

impl ExperimentRecord {
    pub fn n_cnots_out(&self) -> Option<usize> {
        self.outcome.as_ref().ok().copied()
    }

    pub fn overhead_percent(&self) -> Option<f64> {
        self.n_cnots_out()
            .map(|out| overhead_percent(self.n_cnots_in, out))
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed for one input circuit, derived from the grid coordinates.
pub fn circuit_seed(base: u64, arch: &str, n_cnots: usize, proportion: f64, index: usize) -> u64 {
    let mut h = splitmix(base);
    for b in arch.bytes() {
        h = splitmix(h ^ u64::from(b));
    }
    for v in [n_cnots as u64, proportion.to_bits(), index as u64] {
        h = splitmix(h ^ v);
    }
    h
}

fn check_routed(input: &Circuit, out: &Circuit, g: &Topology, seed: u64) -> Result<(), String> {
    if let Some((a, b)) = out.cnots().find(|&(a, b)| !g.has_edge(a, b)) {
        return Err(format!("CNOT ({a},{b}) is not an edge"));
    }
    if out.single_count() != input.single_count() {
        return Err("single-qubit gates were lost".into());
    }
    if input.n_qubits() <= SPOT_CHECK_QUBITS && input.cnot_count() <= SPOT_CHECK_CNOTS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bindings = random_bindings(input, true, &mut rng);
        match equivalent_up_to_phase(input, out, &bindings, EQUIVALENCE_TOL) {
            Ok(true) => {}
            Ok(false) => return Err("routed circuit is not equivalent".into()),
            Err(e) => return Err(e.to_string()),
        }
    }
    Ok(())
}

/// Routes one circuit with one method and checks the result.
pub fn route_one(
    input: &Circuit,
    g: &Topology,
    method: Method,
    policy: &ExtractionPolicy,
    seed: u64,
) -> Result<Circuit, String> {
    let out = match method {
        Method::Comb => route_circuit_with(input, g, policy).map_err(|e| e.to_string())?,
        Method::Slice => slice_route(input, g).map_err(|e| e.to_string())?,
    };
    check_routed(input, &out, g, seed)?;
    Ok(out)
}

struct Job<'a> {
    arch: usize,
    count: usize,
    proportion: f64,
    index: usize,
    topo: &'a Topology,
}

fn run_job(cfg: &ExperimentConfig, job: &Job<'_>) -> Vec<ExperimentRecord> {
    let name = job.topo.name();
    let seed = circuit_seed(cfg.seed, name, job.count, job.proportion, job.index);
    let policy = cfg.policy.policy();
    let input = random_circuit(job.topo.n_vertices(), job.count, job.proportion, seed);
    [Method::Comb, Method::Slice]
        .into_iter()
        .map(|method| {
            let start = Instant::now();
            let outcome = match &input {
                Ok(c) => route_one(c, job.topo, method, &policy, seed).map(|o| o.cnot_count()),
                Err(e) => Err(e.to_string()),
            };
            ExperimentRecord {
                architecture: name.to_string(),
                n_cnots_in: job.count,
                proportion: job.proportion,
                seed,
                method,
                outcome,
                wall_millis: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect()
}

/// Runs the whole grid. Records come back sorted by architecture (config
/// order), CNOT count, proportion, circuit index and method.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<ExperimentRecord>, BenchError> {
    cfg.validate()?;
    let topos = cfg
        .architectures
        .iter()
        .map(|a| resolve_architecture(a))
        .collect::<Result<Vec<_>, _>>()?;
    let mut jobs = Vec::new();
    for (arch, topo) in topos.iter().enumerate() {
        for &count in &cfg.cnot_counts {
            for &proportion in &cfg.proportions {
                for index in 0..cfg.circuits_per_point {
                    jobs.push(Job {
                        arch,
                        count,
                        proportion,
                        index,
                        topo,
                    });
                }
            }
        }
    }
    // largest first, so one slow job does not trail the rest
    jobs.sort_by_key(|j| std::cmp::Reverse(j.count));
    let run = || {
        jobs.par_iter()
            .map(|j| {
                (
                    (j.arch, j.count, j.proportion.to_bits(), j.index),
                    run_job(cfg, j),
                )
            })
            .collect::<Vec<_>>()
    };
    let mut done = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()?
            .install(run),
        None => run(),
    };
    done.sort_by(|a, b| {
        let (x, y) = (a.0, b.0);
        (x.0, x.1)
            .cmp(&(y.0, y.1))
            .then(f64::from_bits(x.2).total_cmp(&f64::from_bits(y.2)))
            .then(x.3.cmp(&y.3))
    });
    Ok(done.into_iter().flat_map(|(_, r)| r).collect())
}

pub const CSV_HEADER: [&str; 8] = [
    "architecture",
    "n_cnots_in",
    "proportion",
    "seed",
    "method",
    "n_cnots_out",
    "overhead_percent",
    "wall_millis",
];

/// Writes records as CSV. Failed records leave `n_cnots_out` empty and put
/// `error: <message>` in the overhead column.
pub fn write_csv<W: io::Write>(w: W, records: &[ExperimentRecord]) -> Result<(), BenchError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for r in records {
        let (n_out, overhead) = match &r.outcome {
            Ok(n) => (
                n.to_string(),
                format!("{:.4}", overhead_percent(r.n_cnots_in, *n)),
            ),
            Err(e) => (String::new(), format!("error: {e}")),
        };
        out.write_record([
            r.architecture.clone(),
            r.n_cnots_in.to_string(),
            r.proportion.to_string(),
            r.seed.to_string(),
            r.method.as_str().to_string(),
            n_out,
            overhead,
            format!("{:.3}", r.wall_millis),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Mean overhead over the successful circuits of one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSummary {
    pub architecture: String,
    pub proportion: f64,
    pub n_cnots_in: usize,
    pub method: Method,
    pub mean_overhead: f64,
    pub n_ok: usize,
    pub n_failed: usize,
}

pub fn summarize(records: &[ExperimentRecord]) -> Vec<PointSummary> {
    let mut order = Vec::new();
    // (architecture, count, proportion bits, method) -> (sum, ok, failed)
    type Key = (usize, usize, u64, Method);
    let mut acc: BTreeMap<Key, (f64, usize, usize)> = BTreeMap::new();
    for r in records {
        let arch = match order.iter().position(|a| a == &r.architecture) {
            Some(i) => i,
            None => {
                order.push(r.architecture.clone());
                order.len() - 1
            }
        };
        let e = acc
            .entry((arch, r.n_cnots_in, r.proportion.to_bits(), r.method))
            .or_default();
        match r.overhead_percent() {
            Some(o) => {
                e.0 += o;
                e.1 += 1;
            }
            None => e.2 += 1,
        }
    }
    let mut out: Vec<PointSummary> = acc
        .into_iter()
        .map(|((arch, n, p, method), (sum, ok, failed))| PointSummary {
            architecture: order[arch].clone(),
            proportion: f64::from_bits(p),
            n_cnots_in: n,
            method,
            mean_overhead: if ok == 0 { f64::NAN } else { sum / ok as f64 },
            n_ok: ok,
            n_failed: failed,
        })
        .collect();
    out.sort_by(|a, b| {
        let ia = order.iter().position(|x| x == &a.architecture);
        let ib = order.iter().position(|x| x == &b.architecture);
        ia.cmp(&ib)
            .then(a.proportion.total_cmp(&b.proportion))
            .then(a.n_cnots_in.cmp(&b.n_cnots_in))
            .then(a.method.cmp(&b.method))
    });
    out
}

/// Looks up the mean overhead for one grid point.
pub fn mean_at(
    summary: &[PointSummary],
    architecture: &str,
    proportion: f64,
    n_cnots_in: usize,
    method: Method,
) -> Option<f64> {
    summary
        .iter()
        .find(|s| {
            s.architecture == architecture
                && s.proportion == proportion
                && s.n_cnots_in == n_cnots_in
                && s.method == method
        })
        .map(|s| s.mean_overhead)
}

pub fn plot_file_name(architecture: &str, proportion: f64) -> String {
    format!("{architecture}-{proportion}.svg")
}

const W: f64 = 640.0;
const H: f64 = 400.0;
const PAD_L: f64 = 64.0;
const PAD_R: f64 = 96.0;
const PAD_T: f64 = 32.0;
const PAD_B: f64 = 48.0;

fn nice_range(lo: f64, hi: f64) -> (f64, f64, f64) {
    let (lo, hi) = if lo == hi {
        (lo - 1.0, hi + 1.0)
    } else {
        (lo, hi)
    };
    let raw = (hi - lo) / 6.0;
    let mag = 10f64.powf(raw.log10().floor());
    let step = [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag);
    ((lo / step).floor() * step, (hi / step).ceil() * step, step)
}

/// Overhead against CNOT count (log x axis), one line per method.
pub fn render_svg(points: &[PointSummary], title: &str) -> String {
    let pts: Vec<_> = points
        .iter()
        .filter(|p| p.mean_overhead.is_finite() && p.n_cnots_in > 0)
        .collect();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        xml_escape(title)
    );
    if pts.is_empty() {
        s.push_str("</svg>\n");
        return s;
    }
    let lx = |n: usize| (n as f64).log2();
    let (x0, x1) = pts.iter().fold((f64::MAX, f64::MIN), |(a, b), p| {
        (a.min(lx(p.n_cnots_in)), b.max(lx(p.n_cnots_in)))
    });
    let (x0, x1) = if x0 == x1 {
        (x0 - 1.0, x1 + 1.0)
    } else {
        (x0, x1)
    };
    let (ylo, yhi) = pts.iter().fold((0.0f64, 0.0f64), |(a, b), p| {
        (a.min(p.mean_overhead), b.max(p.mean_overhead))
    });
    let (y0, y1, ystep) = nice_range(ylo, yhi);
    let px = |x: f64| PAD_L + (x - x0) / (x1 - x0) * (W - PAD_L - PAD_R);
    let py = |y: f64| H - PAD_B - (y - y0) / (y1 - y0) * (H - PAD_T - PAD_B);

    let _ = writeln!(
        s,
        r#"<g stroke="black" fill="none"><line x1="{l}" y1="{b}" x2="{r}" y2="{b}"/><line x1="{l}" y1="{t}" x2="{l}" y2="{b}"/></g>"#,
        l = PAD_L,
        r = W - PAD_R,
        t = PAD_T,
        b = H - PAD_B
    );
    let mut k = x0.ceil() as i64;
    while k as f64 <= x1 {
        let x = px(k as f64);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.1}" y1="{b}" x2="{x:.1}" y2="{b2}" stroke="black"/><text x="{x:.1}" y="{ty}" text-anchor="middle">{}</text>"#,
            1u64 << k,
            b = H - PAD_B,
            b2 = H - PAD_B + 4.0,
            ty = H - PAD_B + 18.0
        );
        k += 1;
    }
    let mut y = y0;
    while y <= y1 + ystep * 1e-9 {
        let yy = py(y);
        let _ = writeln!(
            s,
            r##"<line x1="{l}" y1="{yy:.1}" x2="{r}" y2="{yy:.1}" stroke="#ddd"/><text x="{tx}" y="{ty:.1}" text-anchor="end">{}</text>"##,
            y,
            l = PAD_L,
            r = W - PAD_R,
            tx = PAD_L - 6.0,
            ty = yy + 4.0
        );
        y += ystep;
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">CNOT count</text>"#,
        (PAD_L + W - PAD_R) / 2.0,
        H - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{}" text-anchor="middle" transform="rotate(-90 16 {})">CNOT overhead (%)</text>"#,
        H / 2.0,
        H / 2.0
    );
    for (i, (method, colour)) in [(Method::Comb, "#1f77b4"), (Method::Slice, "#d62728")]
        .into_iter()
        .enumerate()
    {
        let mut line: Vec<_> = pts.iter().filter(|p| p.method == method).collect();
        line.sort_by_key(|p| p.n_cnots_in);
        if line.is_empty() {
            continue;
        }
        let coords: Vec<String> = line
            .iter()
            .map(|p| format!("{:.1},{:.1}", px(lx(p.n_cnots_in)), py(p.mean_overhead)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="2" points="{}"/>"#,
            coords.join(" ")
        );
        for c in &coords {
            let (cx, cy) = c.split_once(',').expect("formatted as x,y");
            let _ = writeln!(s, r#"<circle cx="{cx}" cy="{cy}" r="3" fill="{colour}"/>"#);
        }
        let ly = PAD_T + 16.0 + 18.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<line x1="{a}" y1="{ly}" x2="{b}" y2="{ly}" stroke="{colour}" stroke-width="2"/><text x="{c}" y="{t}">{}</text>"#,
            method.as_str(),
            a = W - PAD_R + 10.0,
            b = W - PAD_R + 30.0,
            c = W - PAD_R + 36.0,
            t = ly + 4.0
        );
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// One SVG per (architecture, proportion), as `(file name, contents)`.
pub fn render_plots(summary: &[PointSummary]) -> Vec<(String, String)> {
    let mut keys: Vec<(String, f64)> = Vec::new();
    for s in summary {
        if !keys
            .iter()
            .any(|(a, p)| a == &s.architecture && *p == s.proportion)
        {
            keys.push((s.architecture.clone(), s.proportion));
        }
    }
    keys.into_iter()
        .map(|(arch, p)| {
            let pts: Vec<_> = summary
                .iter()
                .filter(|s| s.architecture == arch && s.proportion == p)
                .cloned()
                .collect();
            let title = format!("{arch}, {}% single-qubit gates", p * 100.0);
            (plot_file_name(&arch, p), render_svg(&pts, &title))
        })
        .collect()
}
