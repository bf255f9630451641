//! Command-line front end: decomposition, planning, simulated runs and noise fitting.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bayes::{covariance_mcmc, write_chain_csv, McmcConfig};
use crate::engine::{fit_noise_model, run_estimation, write_history_csv, FitConfig, RunSettings};
use crate::error::{Error, Result};
use crate::graph::build_graph;
use crate::pauli::{
    decompose_matrix, decompose_spin, CommutationMode, Observable, QuditRegister, SpinPolynomial, DEFAULT_DIMENSION_CAP,
};
use crate::rng::derive_seed;
use crate::simulator::{NoiseModel, ProbeRecord, StateSpec};

#[derive(Debug, Parser)]
#[command(name = "qudit-observe", version, about = "Adaptive, error-aware estimation of qudit observables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decompose a spin polynomial or dense matrix into Pauli strings.
    Decompose {
        input: PathBuf,
        /// Observable JSON destination (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the commutation graph, clique cover and diagonalizing circuits.
    Plan {
        #[arg(long)]
        observable: PathBuf,
        #[arg(long, value_enum, default_value = "gc")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate an estimation run and write history and report files.
    Run(RunArgs),
    /// Fit the gate-count noise model to a probe log.
    FitNoise {
        probes: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Gc,
    Bc,
}

impl From<Mode> for CommutationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Gc => CommutationMode::General,
            Mode::Bc => CommutationMode::Bitwise,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Default, Args)]
pub struct RunArgs {
    /// Manifest JSON naming the input files, seed and output directory.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Observable file: dense matrix, spin polynomial or Pauli terms.
    #[arg(long)]
    pub observable: Option<PathBuf>,
    /// State file: product factors or full amplitudes.
    #[arg(long)]
    pub state: Option<PathBuf>,
    #[arg(long)]
    pub settings: Option<PathBuf>,
    /// Gate error rates; noiseless when omitted.
    #[arg(long)]
    pub noise: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long, value_enum)]
    pub adaptive: Option<Switch>,
    /// Total shots, probes included.
    #[arg(long)]
    pub budget: Option<u64>,
    /// Share of each batch spent on probes.
    #[arg(long)]
    pub probe_split: Option<f64>,
    /// Spend part of the budget on stabilizer probes and report the noise-aware variance.
    #[arg(long)]
    pub noise_aware: bool,
    /// Write per-pair MCMC traces for the final tallies.
    #[arg(long)]
    pub dump_chains: bool,
}

/// Input files, seed and output directory of a run. Relative paths resolve
/// against the manifest's directory.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub observable: PathBuf,
    pub state: PathBuf,
    #[serde(default)]
    pub settings: Option<PathBuf>,
    #[serde(default)]
    pub noise: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl RunManifest {
    pub fn from_file(path: &Path) -> Result<Self> {
        let mut m: Self = serde_json::from_str(&fs::read_to_string(path)?).map_err(|source| Error::Parse {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut m.observable);
        fix(&mut m.state);
        m.settings.as_mut().map(fix);
        m.noise.as_mut().map(fix);
        m.out.as_mut().map(fix);
        Ok(m)
    }
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|source| Error::Parse {
        path: path.display().to_string(),
        source,
    })
}

fn parse_as<T: serde::de::DeserializeOwned>(path: &Path, v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|source| Error::Parse {
        path: path.display().to_string(),
        source,
    })
}

/// Dense operator file: `{"dims": [...], "matrix": [[[re, im], ...], ...]}` (rows).
#[derive(Deserialize)]
struct DenseFile {
    dims: Vec<u32>,
    matrix: Vec<Vec<[f64; 2]>>,
}

/// Reads an observable, a spin polynomial or a dense matrix.
pub fn load_observable(path: &Path) -> Result<Observable> {
    let v = read_json(path)?;
    if v.get("matrix").is_some() {
        let f: DenseFile = parse_as(path, v)?;
        let reg = QuditRegister::new(f.dims)?;
        let n = reg.total_dim();
        if f.matrix.len() != n || f.matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Format(format!("{}: matrix must be {n}×{n}", path.display())));
        }
        let m = DMatrix::from_fn(n, n, |i, j| C64::new(f.matrix[i][j][0], f.matrix[i][j][1]));
        return decompose_matrix(&reg, &m, DEFAULT_DIMENSION_CAP);
    }
    let is_spin = v["terms"]
        .as_array()
        .and_then(|t| t.first())
        .is_some_and(|t| t.get("coeff").is_some() || t.get("factors").is_some());
    if is_spin {
        let poly: SpinPolynomial = parse_as(path, v)?;
        return decompose_spin(&poly);
    }
    Observable::from_json(&v).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn write_output(out: Option<&Path>, value: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("json value serializes") + "\n";
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

pub fn cmd_decompose(input: &Path, out: Option<&Path>) -> Result<Observable> {
    let obs = load_observable(input)?;
    eprintln!("p = {}", obs.len());
    for t in obs.terms() {
        eprintln!("  {:>12.6e}  {}", t.coeff.norm(), t.string);
    }
    write_output(out, &obs.to_json())?;
    Ok(obs)
}

pub fn cmd_plan(observable: &Path, mode: CommutationMode, out: Option<&Path>) -> Result<Value> {
    let obs = load_observable(observable)?;
    let mut graph = build_graph(&obs, mode)?;
    graph.clique_cover();
    graph.synthesize_circuits()?;
    let mut bundle = graph.to_json();
    let hash = sha256_hex(&serde_json::to_vec(&json!({"observable": obs.to_json(), "mode": mode})).expect("json"));
    bundle["manifest_sha256"] = json!(hash);
    bundle["seed"] = Value::Null;
    write_output(out, &bundle)?;
    Ok(bundle)
}

/// Resolved inputs of a run.
struct Resolved {
    observable: Observable,
    state: StateSpec,
    settings: RunSettings,
    noise: Option<NoiseModel>,
    out: PathBuf,
}

fn resolve(args: &RunArgs) -> Result<Resolved> {
    let mut m = match &args.manifest {
        Some(p) => RunManifest::from_file(p)?,
        None => RunManifest::default(),
    };
    if let Some(p) = &args.observable {
        m.observable = p.clone();
    }
    if let Some(p) = &args.state {
        m.state = p.clone();
    }
    m.settings = args.settings.clone().or(m.settings);
    m.noise = args.noise.clone().or(m.noise);
    m.seed = args.seed.or(m.seed);
    m.out = args.out.clone().or(m.out);
    if m.observable.as_os_str().is_empty() || m.state.as_os_str().is_empty() {
        return Err(Error::InvalidSetting("a run needs an observable and a state".into()));
    }
    let mut settings = match &m.settings {
        Some(p) => RunSettings::from_file(p)?,
        None => RunSettings::default(),
    };
    if let Some(s) = m.seed {
        settings.seed = s;
    }
    if let Some(mode) = args.mode {
        settings.mode = mode.into();
    }
    if let Some(a) = args.adaptive {
        settings.adaptive = a == Switch::On;
    }
    if let Some(b) = args.budget {
        settings.budget = b;
    }
    if let Some(f) = args.probe_split {
        settings.probe_split = f;
    }
    settings.noise_aware |= args.noise_aware;
    settings.validate()?;
    let noise = m.noise.as_deref().map(NoiseModel::from_file).transpose()?;
    Ok(Resolved {
        observable: load_observable(&m.observable)?,
        state: StateSpec::from_file(&m.state)?,
        settings,
        noise,
        out: m.out.unwrap_or_else(|| PathBuf::from("out")),
    })
}

/// Hash over the resolved inputs (not paths), so identical inputs agree wherever they live.
fn manifest_hash(r: &Resolved) -> String {
    let doc = json!({
        "observable": r.observable.to_json(),
        "state": r.state,
        "settings": r.settings,
        "noise": r.noise,
    });
    sha256_hex(&serde_json::to_vec(&doc).expect("json"))
}

pub fn cmd_run(args: &RunArgs) -> Result<Value> {
    let r = resolve(args)?;
    let hash = manifest_hash(&r);
    let seed = r.settings.seed;
    let state = r.state.build()?;
    let report = run_estimation(&r.observable, &state, &r.settings, r.noise.as_ref())?;
    fs::create_dir_all(&r.out)?;
    let header = format!("# manifest_sha256={hash} seed={seed}\n");

    let mut hist = header.clone().into_bytes();
    write_history_csv(&mut hist, &report.history)?;
    fs::write(r.out.join("history.csv"), hist)?;

    if r.settings.noise_aware {
        let mut buf = header.into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            for rec in &report.probe_records {
                w.serialize(rec)?;
            }
            w.flush()?;
        }
        fs::write(r.out.join("probes.csv"), buf)?;
    }

    if args.dump_chains {
        let dir = r.out.join("chains");
        fs::create_dir_all(&dir)?;
        let t = report.tallies.as_ref().ok_or(Error::Empty("final tallies"))?;
        let cfg = McmcConfig {
            seed: derive_seed(seed, &[u64::MAX]),
            keep_trace: true,
            ..r.settings.mcmc.clone()
        };
        for p in &report.pairs {
            let est = covariance_mcmc(t.counts(p.i), t.counts(p.j), &t.pair_counts(p.i, p.j), t.prior(), &cfg, 0)?;
            write_chain_csv(&dir.join(format!("pair_{}_{}.csv", p.i, p.j)), &est)?;
        }
    }

    let doc = json!({
        "manifest_sha256": hash,
        "seed": seed,
        "settings": r.settings,
        "noise": r.noise,
        "report": report,
    });
    write_output(Some(&r.out.join("report.json")), &doc)?;
    eprintln!(
        "O = {:.6} {:+.6}i, (ΔO)² = {:.3e}, noise-aware (ΔO)² = {:.3e}",
        report.estimate_re, report.estimate_im, report.variance, report.noise_aware_variance
    );
    Ok(doc)
}

/// Reads a probe log CSV (`n_loc,n_ent,outcomes,error`, `#` comments allowed).
pub fn read_probe_log(path: &Path) -> Result<Vec<ProbeRecord>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let mut out = Vec::new();
    for rec in rd.deserialize() {
        out.push(rec?);
    }
    Ok(out)
}

pub fn cmd_fit_noise(probes: &Path, out: Option<&Path>) -> Result<Value> {
    let records = read_probe_log(probes)?;
    let fit = fit_noise_model(&records, &FitConfig::default())?;
    let doc = json!({
        "manifest_sha256": sha256_hex(&fs::read(probes)?),
        "seed": Value::Null,
        "fit": fit,
    });
    write_output(out, &doc)?;
    Ok(doc)
}

/// Runs a parsed command; errors are reported as JSON on stderr by [`main_with`].
pub fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Decompose { input, out } => cmd_decompose(input, out.as_deref()).map(|_| ()),
        Command::Plan { observable, mode, out } => cmd_plan(observable, (*mode).into(), out.as_deref()).map(|_| ()),
        Command::Run(args) => cmd_run(args).map(|_| ()),
        Command::FitNoise { probes, out } => cmd_fit_noise(probes, out.as_deref()).map(|_| ()),
    }
}

/// Entry point for the binary: returns the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            let doc = json!({"error": {"kind": e.kind(), "message": e.to_string()}});
            eprintln!("{doc}");
            1
        }
    }
}
