mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use eigensample::average::{luae_estimate, luae_unguided};
use eigensample::circuit::{parse_circuit, serialize_circuit, BasisLabel, Circuit};
use eigensample::hamiltonian::{
    parse_hamiltonian, scale_hamiltonian, serialize_hamiltonian, trotter_deviation, LhesSampler, LocalHamiltonian,
};
use eigensample::linalg::SpectrumKind;
use eigensample::oracle::{empirical_approx_check, exact_distribution};
use eigensample::phase::{PesSampler, SamplingRequest};
use eigensample::reductions::{
    build_unary_clock, decide_via_luae, history_start, mark_circuit, ExactLhesOracle, ExactLuaeOracle,
    ExactPhaseOracle, LhesDecider, LhesOracle, LuaeOracle, MarkKind, PesDecider, PhaseOracle, QuantumLhesOracle,
    QuantumLuaeOracle, QuantumPhaseOracle,
};
use eigensample::{rng, Complex64};
use serde_json::{json, Map, Value};

const DEFAULT_EPSILON: f64 = 0.05;
const DEFAULT_DELTA: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(
    name = "eigensample",
    version,
    about = "Eigenvalue sampling and reductions on small quantum instances"
)]
struct Cli {
    /// Master seed; sample i uses its own substream of this seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    #[arg(long, global = true)]
    delta: Option<f64>,
    /// Basis state as a bitstring, qubit 0 first. Defaults to all zeros.
    #[arg(long, global = true)]
    b: Option<String>,
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    #[arg(long, global = true, value_enum, default_value_t = OracleKind::Exact)]
    oracle: OracleKind,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OracleKind {
    Exact,
    Quantum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Lhes,
    Pes,
    Luae,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mark {
    LhesCopy,
    PeReflect,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and validate a circuit or Hamiltonian file.
    Check { input: PathBuf },
    /// Exact spectral law of the input for basis state `--b`.
    Spectrum { input: PathBuf },
    /// Phase-estimation samples of a circuit.
    Pes { circuit: PathBuf },
    /// Eigenvalue samples of a local Hamiltonian.
    Lhes { hamiltonian: PathBuf },
    /// Hadamard-test estimate of `⟨b|U|b⟩`.
    Luae { circuit: PathBuf },
    /// Estimate of `tr(U)/2^n` with a fresh uniform basis state per draw.
    #[command(name = "luae-u")]
    LuaeU { circuit: PathBuf },
    /// Build the marked circuit and, for the copy construction, the one-hot
    /// clock Hamiltonian. Writes the text artifact to `--out` and a JSON
    /// sidecar next to it.
    Reduce {
        circuit: PathBuf,
        #[arg(long, value_enum, default_value_t = Mark::LhesCopy)]
        mark: Mark,
    },
    /// Decide acceptance of `U` on input `--b` through a sampling oracle.
    Decide {
        circuit: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Pes)]
        method: Method,
    },
    /// Check a `pes` or `lhes` sample report against the exact law.
    Verify { report: PathBuf, input: PathBuf },
    /// Trotter deviation against the number of slices, as CSV.
    TrotterBench {
        hamiltonian: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "16,32,64,128,256")]
        m: Vec<u64>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] eigensample::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use eigensample::Error as E;
        match self {
            CliError::Core(E::DimensionMismatch { .. } | E::TooLarge { .. }) => 2,
            CliError::Core(E::OracleFailure(_)) => 3,
            _ => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(_) => "core",
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
        }
    }
}

type CliResult<T> = Result<T, CliError>;

enum Input {
    Circuit(Circuit),
    Hamiltonian(LocalHamiltonian),
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// A file with any `term` line is a Hamiltonian, otherwise a circuit.
fn load(path: &Path) -> CliResult<Input> {
    let text = read(path)?;
    let is_hamiltonian = text
        .lines()
        .any(|l| l.split('#').next().unwrap_or("").split_whitespace().next() == Some("term"));
    Ok(if is_hamiltonian {
        Input::Hamiltonian(parse_hamiltonian(&text)?)
    } else {
        Input::Circuit(parse_circuit(&text)?)
    })
}

fn load_circuit(path: &Path) -> CliResult<Circuit> {
    match load(path)? {
        Input::Circuit(c) => Ok(c),
        Input::Hamiltonian(_) => Err(CliError::Usage(format!(
            "{} is a Hamiltonian, expected a circuit",
            path.display()
        ))),
    }
}

fn load_hamiltonian(path: &Path) -> CliResult<LocalHamiltonian> {
    match load(path)? {
        Input::Hamiltonian(h) => Ok(h),
        Input::Circuit(_) => Err(CliError::Usage(format!(
            "{} is a circuit, expected a Hamiltonian",
            path.display()
        ))),
    }
}

fn complex(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

impl Cli {
    fn epsilon(&self) -> f64 {
        self.epsilon.unwrap_or(DEFAULT_EPSILON)
    }

    fn delta(&self) -> f64 {
        self.delta.unwrap_or(DEFAULT_DELTA)
    }

    fn label(&self, n: usize) -> CliResult<BasisLabel> {
        let label = match &self.b {
            Some(b) => b.parse::<BasisLabel>()?,
            None => BasisLabel::zeros(n),
        };
        if label.len() != n {
            return Err(eigensample::Error::DimensionMismatch {
                expected: n,
                found: label.len(),
            }
            .into());
        }
        Ok(label)
    }

    fn request(&self, n: usize) -> CliResult<SamplingRequest> {
        Ok(SamplingRequest::new(self.epsilon(), self.delta(), self.label(n)?)?)
    }

    /// Adds the reproducibility fields to a command's report.
    fn report(&self, command: &str, body: Value) -> Value {
        let mut map = match body {
            Value::Object(map) => map,
            other => Map::from_iter([("result".to_string(), other)]),
        };
        map.insert("command".into(), json!(command));
        map.insert("seed".into(), json!(self.seed));
        map.insert("epsilon".into(), json!(self.epsilon()));
        map.insert("delta".into(), json!(self.delta()));
        map.insert("tool_version".into(), json!(env!("CARGO_PKG_VERSION")));
        Value::Object(map)
    }

    /// Writes the report to `--out` when given, otherwise returns it for stdout.
    fn emit(&self, report: Value) -> CliResult<Option<String>> {
        let text = report::to_string(&report) + "\n";
        match &self.out {
            Some(path) => write(path, &text).map(|_| None),
            None => Ok(Some(text)),
        }
    }
}

fn check(cli: &Cli, input: &Path) -> CliResult<Value> {
    Ok(match load(input)? {
        Input::Circuit(c) => json!({"kind": "circuit", "qubits": c.qubit_count(), "gates": c.len()}),
        Input::Hamiltonian(h) => json!({
            "kind": "hamiltonian",
            "qubits": h.qubit_count(),
            "terms": h.terms().len(),
            "norm_bound": h.norm_bound(),
        }),
    })
    .map(|body| cli.report("check", body))
}

fn spectrum(cli: &Cli, input: &Path) -> CliResult<Value> {
    let (matrix, kind, n) = match load(input)? {
        Input::Circuit(c) => (c.unitary()?, SpectrumKind::Unitary, c.qubit_count()),
        Input::Hamiltonian(h) => (h.to_dense()?, SpectrumKind::Hermitian, h.qubit_count()),
    };
    let b = cli.label(n)?;
    let d = exact_distribution(&matrix, &b, kind)?;
    let points: Vec<Value> = d.points().iter().map(|&(v, w)| json!([v, w])).collect();
    let metric = match kind {
        SpectrumKind::Unitary => "circular",
        SpectrumKind::Hermitian => "absolute",
    };
    Ok(cli.report(
        "spectrum",
        json!({"b": b.to_string(), "metric": metric, "points": points}),
    ))
}

fn pes(cli: &Cli, path: &Path) -> CliResult<Value> {
    let c = load_circuit(path)?;
    let req = cli.request(c.qubit_count())?;
    let sampler = PesSampler::new(&c, &req)?;
    let samples = rng::collect(cli.seed, cli.samples, |g| sampler.sample(g).phi);
    Ok(cli.report(
        "pes",
        json!({
            "b": req.b.to_string(),
            "t": sampler.distribution().config().t,
            "applications": sampler.distribution().applications(),
            "samples": samples,
        }),
    ))
}

fn lhes(cli: &Cli, path: &Path) -> CliResult<Value> {
    let h = load_hamiltonian(path)?;
    let req = cli.request(h.qubit_count())?;
    let sampler = LhesSampler::new(&h, &req)?;
    let samples = rng::collect(cli.seed, cli.samples, |g| sampler.sample(g).lambda_est);
    Ok(cli.report(
        "lhes",
        json!({
            "b": req.b.to_string(),
            "lambda_cap": sampler.scale().lambda_cap,
            "trotter_steps": sampler.steps(),
            "t": sampler.distribution().config().t,
            "samples": samples,
        }),
    ))
}

fn luae(cli: &Cli, path: &Path) -> CliResult<Value> {
    let c = load_circuit(path)?;
    let req = cli.request(c.qubit_count())?;
    let est = luae_estimate(&c, &req, &mut rng::substream(cli.seed, 0))?;
    Ok(cli.report(
        "luae",
        json!({"b": req.b.to_string(), "lambda_hat": complex(est.lambda_hat), "m_samples": est.m_samples}),
    ))
}

fn luae_u(cli: &Cli, path: &Path) -> CliResult<Value> {
    let c = load_circuit(path)?;
    let est = luae_unguided(&c, cli.epsilon(), cli.delta(), &mut rng::substream(cli.seed, 0))?;
    Ok(cli.report(
        "luae-u",
        json!({"lambda_hat": complex(est.lambda_hat), "m_samples": est.m_samples}),
    ))
}

fn reduce(cli: &Cli, path: &Path, mark: Mark) -> CliResult<Value> {
    let out = cli
        .out
        .as_deref()
        .ok_or_else(|| CliError::Usage("reduce needs --out for the text artifact".into()))?;
    let u = load_circuit(path)?;
    let x = cli.label(u.qubit_count())?;
    let body = match mark {
        Mark::PeReflect => {
            let mc = mark_circuit(&u, MarkKind::PeReflect)?;
            write(out, &serialize_circuit(&mc.full)?)?;
            json!({
                "mark": "pe-reflect",
                "artifact": "circuit",
                "qubits": mc.full.qubit_count(),
                "gates": mc.full.len(),
                "b": x.to_string(),
            })
        }
        Mark::LhesCopy => {
            let mc = mark_circuit(&u, MarkKind::LhesCopy)?;
            let unary = build_unary_clock(&mc)?;
            write(out, &serialize_hamiltonian(&unary.terms))?;
            let start = history_start(&mc, &x)?;
            json!({
                "mark": "lhes-copy",
                "artifact": "hamiltonian",
                "m": mc.m(),
                "clock_length": mc.n(),
                "system_qubits": unary.system_qubits,
                "clock_qubits": unary.clock_qubits,
                "qubits": unary.terms.qubit_count(),
                "terms": unary.terms.terms().len(),
                "b": unary.legal_label(&start, 0).to_string(),
                "sample_epsilon": 1.0 / (4.0 * mc.n() as f64),
            })
        }
    };
    let report = cli.report("reduce", body);
    let mut sidecar = out.as_os_str().to_owned();
    sidecar.push(".json");
    write(Path::new(&sidecar), &(report::to_string(&report) + "\n"))?;
    Ok(report)
}

fn decide(cli: &Cli, path: &Path, method: Method) -> CliResult<Value> {
    let u = load_circuit(path)?;
    let x = cli.label(u.qubit_count())?;
    let mut g = rng::substream(cli.seed, 0);
    let quantum = cli.oracle == OracleKind::Quantum;
    let mut body = match method {
        Method::Lhes => {
            let oracle: &dyn LhesOracle = if quantum { &QuantumLhesOracle } else { &ExactLhesOracle };
            let d = LhesDecider::new(&u, &x, oracle)?.decide(&mut g)?;
            json!({
                "accept": d.accept,
                "votes_in": d.votes_in,
                "survivors": d.survivors,
                "draws": d.draws,
                "vote_fraction": d.vote_fraction(),
            })
        }
        Method::Pes => {
            let oracle: &dyn PhaseOracle = if quantum {
                &QuantumPhaseOracle
            } else {
                &ExactPhaseOracle
            };
            json!({"accept": PesDecider::new(&u, &x, oracle)?.decide(&mut g)?})
        }
        Method::Luae => {
            let oracle: &dyn LuaeOracle = if quantum { &QuantumLuaeOracle } else { &ExactLuaeOracle };
            json!({"accept": decide_via_luae(&u, &x, oracle, &mut g)?})
        }
    };
    let name = match method {
        Method::Lhes => "lhes",
        Method::Pes => "pes",
        Method::Luae => "luae",
    };
    body["method"] = json!(name);
    body["oracle"] = json!(if quantum { "quantum" } else { "exact" });
    body["b"] = json!(x.to_string());
    Ok(cli.report("decide", body))
}

fn verify(cli: &Cli, samples_path: &Path, input: &Path) -> CliResult<Value> {
    let text = read(samples_path)?;
    let run: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: not a sample report: {e}", samples_path.display())))?;
    let field = |key: &str| {
        run.get(key)
            .ok_or_else(|| CliError::Usage(format!("sample report lacks `{key}`")))
    };
    let samples: Vec<f64> = field("samples")?
        .as_array()
        .ok_or_else(|| CliError::Usage("`samples` is not an array".into()))?
        .iter()
        .map(|v| v.as_f64().ok_or_else(|| CliError::Usage("non-numeric sample".into())))
        .collect::<CliResult<_>>()?;
    let recorded = |key: &str| field(key).ok().and_then(Value::as_f64);
    let epsilon = cli.epsilon.or(recorded("epsilon")).unwrap_or(DEFAULT_EPSILON);
    let delta = cli.delta.or(recorded("delta")).unwrap_or(DEFAULT_DELTA);
    let b = match (cli.b.as_deref(), field("b").ok().and_then(Value::as_str)) {
        (Some(b), _) | (None, Some(b)) => b.parse::<BasisLabel>()?,
        (None, None) => return Err(CliError::Usage("no basis state given or recorded".into())),
    };
    let (matrix, kind) = match load(input)? {
        Input::Circuit(c) => (c.unitary()?, SpectrumKind::Unitary),
        Input::Hamiltonian(h) => (h.to_dense()?, SpectrumKind::Hermitian),
    };
    let target = exact_distribution(&matrix, &b, kind)?;
    let check = empirical_approx_check(&samples, &target, epsilon, delta, None)?;
    let mut report = cli.report(
        "verify",
        json!({
            "feasible": check.feasible,
            "flow": check.flow,
            "slack": check.slack,
            "samples": samples.len(),
            "b": b.to_string(),
        }),
    );
    report["epsilon"] = json!(epsilon);
    report["delta"] = json!(delta);
    Ok(report)
}

fn trotter_bench(cli: &Cli, path: &Path, ms: &[u64]) -> CliResult<(String, Value)> {
    let h = load_hamiltonian(path)?;
    let s = scale_hamiltonian(&h)?;
    let mut csv = String::from("m,deviation,ratio\n");
    let mut previous: Option<f64> = None;
    for &m in ms {
        if m == 0 {
            return Err(CliError::Usage("slice counts must be positive".into()));
        }
        let dev = trotter_deviation(&s, m)?;
        let ratio = previous.map(|p| format!("{:.16e}", p / dev)).unwrap_or_default();
        csv += &format!("{m},{dev:.16e},{ratio}\n");
        previous = Some(dev);
    }
    let report = cli.report("trotter-bench", json!({"rows": ms.len(), "lambda_cap": s.lambda_cap}));
    Ok((csv, report))
}

fn run(cli: &Cli) -> CliResult<Option<String>> {
    let report = match &cli.command {
        Command::Check { input } => check(cli, input)?,
        Command::Spectrum { input } => spectrum(cli, input)?,
        Command::Pes { circuit } => pes(cli, circuit)?,
        Command::Lhes { hamiltonian } => lhes(cli, hamiltonian)?,
        Command::Luae { circuit } => luae(cli, circuit)?,
        Command::LuaeU { circuit } => luae_u(cli, circuit)?,
        Command::Reduce { circuit, mark } => {
            // the artifact already occupies --out
            let report = reduce(cli, circuit, *mark)?;
            return Ok(Some(report::to_string(&report) + "\n"));
        }
        Command::Decide { circuit, method } => decide(cli, circuit, *method)?,
        Command::Verify { report, input } => verify(cli, report, input)?,
        Command::TrotterBench { hamiltonian, m } => {
            let (csv, report) = trotter_bench(cli, hamiltonian, m)?;
            return match &cli.out {
                Some(path) => {
                    write(path, &csv)?;
                    Ok(Some(report::to_string(&report) + "\n"))
                }
                None => Ok(Some(csv)),
            };
        }
    };
    cli.emit(report)
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("EIGENSAMPLE_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("EIGENSAMPLE_THREADS must be a positive integer, got {value:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn fail(err: &CliError) -> ExitCode {
    let code = err.exit_code();
    let body = json!({"error": err.kind(), "message": err.to_string(), "exit_code": code});
    eprintln!("{}", report::to_string(&body));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => return fail(&CliError::Usage(e.to_string().trim_end().to_string())),
    };
    let result = configure_threads().and_then(|_| run(&cli));
    match result {
        Ok(Some(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}
