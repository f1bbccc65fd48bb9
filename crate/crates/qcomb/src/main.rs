use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qcomb::bench::{self, ExperimentConfig, Method, PolicyName};
use qcomb::qasm::{parse_circuit, write_circuit};
use qcomb::topo::{builtin, builtin_names, resolve_architecture, topology_to_json};
use qcomb_core::circuit::Circuit;
use qcomb_core::combsynth::route_circuit_with;
use qcomb_core::sim::{equivalent_up_to_phase, random_bindings, EQUIVALENCE_TOL, MAX_SIM_QUBITS};
use qcomb_core::slicer::slice_route;
use qcomb_core::topology::Topology;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Route circuits onto constrained hardware with comb-aware CNOT resynthesis.
#[derive(Parser)]
#[command(name = "qcomb", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Resynthesise a circuit for an architecture.
    Route {
        #[arg(long = "in")]
        input: PathBuf,
        /// Builtin name, `complete`, `complete-N`, `line-N`, `grid-RxC` or a JSON file.
        #[arg(long)]
        arch: String,
        #[arg(long, value_enum, default_value_t = RouteMethod::Comb)]
        method: RouteMethod,
        #[arg(long, value_enum, default_value_t = Policy::LatestCut)]
        policy: Policy,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check two circuits for equality up to global phase.
    Verify {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, default_value_t = MAX_SIM_QUBITS)]
        max_qubits: usize,
        /// Seed for the random unitaries bound to opaque gate labels.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the random-circuit benchmark grid.
    Bench {
        /// JSON experiment config; omitted fields take their defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// List or print architectures.
    Topo {
        #[arg(long, conflicts_with = "show")]
        list: bool,
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum RouteMethod {
    Comb,
    Slice,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    LatestCut,
    MinCost,
}

/// Exit code 1 is reserved for a verification mismatch.
const MISMATCH: u8 = 1;
const FAILURE: u8 = 2;

fn fail(msg: impl std::fmt::Display) -> u8 {
    eprintln!("qcomb: {msg}");
    FAILURE
}

fn read_circuit(path: &Path) -> Result<Circuit, u8> {
    let text = fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    parse_circuit(&text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn widen(c: &Circuit, n: usize) -> Circuit {
    if c.n_qubits() >= n {
        return c.clone();
    }
    Circuit::from_gates(n, c.gates().to_vec()).expect("widening keeps indices valid")
}

fn route(
    input: &Path,
    arch: &str,
    method: RouteMethod,
    policy: Policy,
    out: &Path,
) -> Result<(), u8> {
    let c = read_circuit(input)?;
    let g: Topology = if arch == "complete" {
        Topology::complete(c.n_qubits().max(1))
    } else {
        resolve_architecture(arch).map_err(fail)?
    };
    if c.n_qubits() > g.n_vertices() {
        return Err(fail(format!(
            "circuit has {} qubits but {} has {} vertices",
            c.n_qubits(),
            g.name(),
            g.n_vertices()
        )));
    }
    let c = widen(&c, g.n_vertices());
    let routed = match method {
        RouteMethod::Comb => {
            let policy = match policy {
                Policy::LatestCut => PolicyName::LatestCut,
                Policy::MinCost => PolicyName::MinCost,
            };
            route_circuit_with(&c, &g, &policy.policy()).map_err(fail)?
        }
        RouteMethod::Slice => slice_route(&c, &g).map_err(fail)?,
    };
    fs::write(out, write_circuit(&routed)).map_err(|e| fail(format!("{}: {e}", out.display())))?;
    eprintln!(
        "{} CNOTs in, {} CNOTs out, {} gates in, {} gates out",
        c.cnot_count(),
        routed.cnot_count(),
        c.len(),
        routed.len()
    );
    Ok(())
}

fn verify(a: &Path, b: &Path, max_qubits: usize, seed: u64) -> Result<(), u8> {
    let (ca, cb) = (read_circuit(a)?, read_circuit(b)?);
    let n = ca.n_qubits().max(cb.n_qubits());
    if n > max_qubits.min(MAX_SIM_QUBITS) {
        return Err(fail(format!(
            "{n} qubits exceeds the simulation limit of {}",
            max_qubits.min(MAX_SIM_QUBITS)
        )));
    }
    let (ca, cb) = (widen(&ca, n), widen(&cb, n));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bindings = random_bindings(&ca, false, &mut rng);
    for (k, v) in random_bindings(&cb, false, &mut rng) {
        bindings.entry(k).or_insert(v);
    }
    match equivalent_up_to_phase(&ca, &cb, &bindings, EQUIVALENCE_TOL) {
        Ok(true) => {
            println!("equivalent");
            Ok(())
        }
        Ok(false) => {
            println!("not equivalent");
            Err(MISMATCH)
        }
        Err(e) => Err(fail(e)),
    }
}

fn run_bench(config: Option<&Path>, out_dir: &Path) -> Result<(), u8> {
    let cfg: ExperimentConfig = match config {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| fail(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| fail(format!("{}: {e}", p.display())))?
        }
        None => ExperimentConfig::default(),
    };
    let records = bench::run_experiment(&cfg).map_err(fail)?;
    fs::create_dir_all(out_dir).map_err(|e| fail(format!("{}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join("results.csv");
    let file =
        fs::File::create(&csv_path).map_err(|e| fail(format!("{}: {e}", csv_path.display())))?;
    bench::write_csv(file, &records).map_err(fail)?;
    let summary = bench::summarize(&records);
    for (name, svg) in bench::render_plots(&summary) {
        let path = out_dir.join(name);
        fs::write(&path, svg).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    }
    let largest = cfg.cnot_counts.iter().copied().max().unwrap_or(0);
    println!("mean CNOT overhead at {largest} CNOTs (comb / slice):");
    for arch in &cfg.architectures {
        let name = resolve_architecture(arch).map_err(fail)?.name().to_string();
        let cells: Vec<String> = cfg
            .proportions
            .iter()
            .map(|&p| {
                let m = |method| bench::mean_at(&summary, &name, p, largest, method);
                format!(
                    "{}%: {:.1} / {:.1}",
                    p * 100.0,
                    m(Method::Comb).unwrap_or(f64::NAN),
                    m(Method::Slice).unwrap_or(f64::NAN)
                )
            })
            .collect();
        println!("  {name}: {}", cells.join(", "));
    }
    let failed = records.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        eprintln!(
            "qcomb: {failed} of {} runs failed, see results.csv",
            records.len()
        );
        return Err(FAILURE);
    }
    Ok(())
}

fn topo(list: bool, show: Option<&str>) -> Result<(), u8> {
    match show {
        Some(name) => {
            let t = builtin(name)
                .map(Ok)
                .unwrap_or_else(|| resolve_architecture(name))
                .map_err(fail)?;
            println!("{}", topology_to_json(&t));
        }
        None if list => {
            for name in builtin_names() {
                let t = builtin(name).expect("listed builtin exists");
                println!(
                    "{name}\t{} qubits\t{} edges",
                    t.n_vertices(),
                    t.edges().len()
                );
            }
        }
        None => return Err(fail("topo needs --list or --show <NAME>")),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Route {
            input,
            arch,
            method,
            policy,
            out,
        } => route(input, arch, *method, *policy, out),
        Cmd::Verify {
            a,
            b,
            max_qubits,
            seed,
        } => verify(a, b, *max_qubits, *seed),
        Cmd::Bench { config, out_dir } => run_bench(config.as_deref(), out_dir),
        Cmd::Topo { list, show } => topo(*list, show.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
