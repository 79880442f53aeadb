//! Command-line front end: JSON state and circuit files in, class reports,
//! verified circuits and oracle evidence out.

use clap::{Args, Parser, Subcommand, ValueEnum};
use cnotm_core::canonical::{
    acin_form, purity, purity_invariants, schmidt_two_qubit, tangle, DEFAULT_TOLERANCE,
};
use cnotm_core::classifier::{classify, classify_two_qubit, Reference, StateClass, Witness};
use cnotm_core::interchange::{
    circuit_from_value, circuit_to_value, format_number, oracle_report_value, probe_report_value,
    state_from_value, state_to_value, to_json, DocumentError,
};
use cnotm_core::oracle::{min_cnot_search, probe_max_distance, DEFAULT_THRESHOLD, PROBE_KMAX};
use cnotm_core::state::haar_sample_with;
use cnotm_core::synth::{
    prepare_from_ghz, prepare_from_zero, transform_any, two_qubit_transform, SynthOptions, SynthesisResult,
    FIDELITY_FLOOR,
};
use cnotm_core::{Circuit, Error, PureState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
/// `verify` ran but the fidelity is below the threshold.
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DIMENSION: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;
pub const EXIT_NO_CONVERGENCE: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "cnotm", version, about = "CNOT distances and minimal-CNOT circuits for 2- and 3-qubit states")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Tolerance for class decisions.
    #[arg(long, global = true, env = "CNOTM_TOLERANCE", default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// CNOT-distance class of a state relative to |000⟩ or GHZ.
    Classify {
        state: PathBuf,
        #[arg(long = "ref", value_enum, default_value_t = RefArg::Zero)]
        reference: RefArg,
    },
    /// Circuit preparing TARGET from a reference state or another state file.
    Synth {
        target: PathBuf,
        /// `zero`, `ghz` or a state file.
        #[arg(long, default_value = "zero")]
        from: String,
        /// Only CNOTs between neighbors on the line 1-2-3.
        #[arg(long)]
        nearest_neighbor: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Also write the circuit document to this file.
        #[arg(long)]
        circuit_out: Option<PathBuf>,
    },
    /// Fidelity of CIRCUIT applied to STATE against TARGET.
    Verify {
        state: PathBuf,
        circuit: PathBuf,
        target: PathBuf,
        #[arg(long, default_value_t = FIDELITY_FLOOR)]
        threshold: f64,
    },
    /// Single-qubit purities, tangle and canonical parameters.
    Invariants { state: PathBuf },
    /// Haar-random states.
    Sample(SampleArgs),
    /// Multi-start search for the smallest CNOT count between two states.
    Oracle {
        source: PathBuf,
        target: PathBuf,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
        threshold: f64,
    },
    /// Oracle survey of random pairs for the largest any-to-any distance.
    ProbeMaxDistance {
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[arg(long, default_value_t = 3)]
    pub qubits: usize,
    #[arg(long, default_value_t = 1)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefArg {
    Zero,
    Ghz,
}

/// Exit code plus the text for stdout and stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }
}

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        let code = match e {
            DocumentError::Parse(_) => EXIT_PARSE,
            DocumentError::Dimension(_) => EXIT_DIMENSION,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::DimensionMismatch { .. } | Error::WrongQubitCount { .. } | Error::QubitOutOfRange { .. } => {
                EXIT_DIMENSION
            }
            Error::Domain(_) => EXIT_PARSE,
            _ => EXIT_INTERNAL,
        };
        Failure::new(code, e.to_string())
    }
}

/// Command output: the JSON data, its text rendering and an exit code.
struct Report {
    value: Value,
    text: String,
    code: i32,
}

fn read_value(path: &Path) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn read_state(path: &Path) -> Result<PureState, Failure> {
    state_from_value(&read_value(path)?).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

/// A circuit document, or any object holding one under `circuit`.
fn read_circuit(path: &Path) -> Result<Circuit, Failure> {
    let v = read_value(path)?;
    let doc = if v.get("gates").is_none() { v.get("circuit").unwrap_or(&v) } else { &v };
    circuit_from_value(doc).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn witness_value(w: &Witness) -> Value {
    let mut v = match w {
        Witness::Product { factors } => json!({
            "factors": factors.iter().map(|f| json!([[num(f[0].re), num(f[0].im)], [num(f[1].re), num(f[1].im)]])).collect::<Vec<_>>(),
        }),
        Witness::Biseparable { separable, pair, .. } => {
            json!({ "separable": separable, "schmidt_angle": num(pair.angle) })
        }
        Witness::TwoTerm { orthogonal, form } => json!({
            "orthogonal": orthogonal,
            "a": num(form.a), "b": num(form.b), "xi": num(form.xi), "phis": nums(&form.phis),
        }),
        Witness::GhzType(form) => json!({
            "a": num(form.a), "b": num(form.b), "xi": num(form.xi), "phis": nums(&form.phis),
        }),
        Witness::WType(form) => json!({ "phi": num(form.phi), "xi": num(form.xi), "phi_prime": num(form.phi_prime) }),
        Witness::GhzEquivalent(map) => json!({ "global_phase": num(map.global_phase) }),
        Witness::HalfPurity(form) => json!({
            "qubit": form.qubit,
            "lambda2": num(form.lambda2), "lambda3": num(form.lambda3), "lambda4": num(form.lambda4),
        }),
        Witness::Generic(inv) => json!({ "purities": nums(&inv.0) }),
    };
    v["kind"] = Value::from(w.kind());
    v
}

fn class_value(c: &StateClass) -> Value {
    json!({
        "qubits": 3,
        "reference": match c.reference { Reference::Zero => "zero", Reference::Ghz => "ghz" },
        "class_index": c.class_index,
        "witness": witness_value(&c.witness),
        "margin": num(c.margin),
        "purities": nums(&c.invariants.0),
        "tangle": num(c.tangle),
    })
}

fn cmd_classify(path: &Path, reference: RefArg, tol: f64) -> Result<Report, Failure> {
    let state = read_state(path)?;
    let value = if state.qubits() == 2 {
        if reference == RefArg::Ghz {
            return Err(Failure::new(EXIT_DIMENSION, "GHZ reference needs a 3-qubit state"));
        }
        let form = schmidt_two_qubit(&state)?;
        let class_index = classify_two_qubit(&PureState::zero(2), &state, tol)?;
        json!({
            "qubits": 2,
            "reference": "zero",
            "class_index": class_index,
            "witness": { "kind": if class_index == 0 { "product" } else { "entangled" }, "schmidt_angle": num(form.angle) },
            "margin": num(form.angle),
        })
    } else {
        let r = match reference {
            RefArg::Zero => Reference::Zero,
            RefArg::Ghz => Reference::Ghz,
        };
        class_value(&classify(&state, r, tol)?)
    };
    let mut text = String::new();
    writeln!(text, "class {} from {}", value["class_index"], value["reference"].as_str().unwrap_or("?")).ok();
    writeln!(text, "witness: {}", value["witness"]["kind"].as_str().unwrap_or("?")).ok();
    writeln!(text, "margin: {}", fmt_field(&value["margin"])).ok();
    Ok(Report { value, text, code: EXIT_OK })
}

fn fmt_field(v: &Value) -> String {
    match v.as_f64() {
        Some(x) if !v.is_u64() => format!("{x:.12}"),
        _ => v.to_string(),
    }
}

fn synth_value(r: &SynthesisResult, from: &str, opts: &SynthOptions) -> Value {
    json!({
        "circuit": circuit_to_value(&r.circuit),
        "cnot_count": r.cnot_count,
        "fidelity": num(r.achieved_fidelity),
        "from": from,
        "nearest_neighbor": opts.nearest_neighbor,
        "route": serde_json::to_value(r.route).unwrap_or(Value::Null),
        "seed": opts.seed,
    })
}

fn cmd_synth(
    target: &Path,
    from: &str,
    opts: &SynthOptions,
    circuit_out: Option<&Path>,
) -> Result<Report, Failure> {
    let target = read_state(target)?;
    let n = target.qubits();
    let result = match from {
        "zero" if n == 2 => two_qubit_transform(&PureState::zero(2), &target, opts)?,
        "zero" => prepare_from_zero(&target, opts)?,
        "ghz" if n == 2 => return Err(Failure::new(EXIT_DIMENSION, "GHZ reference needs a 3-qubit state")),
        "ghz" => prepare_from_ghz(&target, opts)?,
        file => {
            let source = read_state(Path::new(file))?;
            if source.qubits() != n {
                return Err(Failure::new(EXIT_DIMENSION, "source and target differ in qubit count"));
            }
            transform_any(&source, &target, opts)?
        }
    };
    // independent re-simulation before anything is emitted
    let reached = result.source.apply_circuit(&result.circuit)?.fidelity(&target)?;
    if reached < FIDELITY_FLOOR {
        return Err(Failure::new(EXIT_INTERNAL, format!("circuit reaches fidelity {reached} only")));
    }
    if let Some(path) = circuit_out {
        std::fs::write(path, to_json(&circuit_to_value(&result.circuit)))
            .map_err(|e| Failure::new(EXIT_INTERNAL, format!("cannot write {}: {e}", path.display())))?;
    }
    let value = synth_value(&result, from, opts);
    let mut text = String::new();
    writeln!(text, "{} CNOTs, fidelity {:.12}", result.cnot_count, result.achieved_fidelity).ok();
    for g in &result.circuit.gates {
        writeln!(text, "  {}", gate_text(g)).ok();
    }
    Ok(Report { value, text, code: EXIT_OK })
}

fn gate_text(g: &cnotm_core::Gate) -> String {
    use cnotm_core::Gate::*;
    match *g {
        Rx { qubit, angle } => format!("rx({angle:.12}) q{qubit}"),
        Ry { qubit, angle } => format!("ry({angle:.12}) q{qubit}"),
        Rz { qubit, angle } => format!("rz({angle:.12}) q{qubit}"),
        Phase { qubit, angle } => format!("ph({angle:.12}) q{qubit}"),
        Cnot { control, target } => format!("cnot q{control} -> q{target}"),
    }
}

fn cmd_verify(state: &Path, circuit: &Path, target: &Path, threshold: f64) -> Result<Report, Failure> {
    let source = read_state(state)?;
    let circuit = read_circuit(circuit)?;
    let target = read_state(target)?;
    if source.qubits() != target.qubits() {
        return Err(Failure::new(EXIT_DIMENSION, "state and target differ in qubit count"));
    }
    let fidelity = source.apply_circuit(&circuit)?.fidelity(&target)?;
    let pass = fidelity >= threshold;
    let value = json!({
        "fidelity": num(fidelity),
        "threshold": num(threshold),
        "pass": pass,
        "cnot_count": circuit.cnot_count(),
    });
    let text = format!("fidelity {fidelity:.12} {} (threshold {threshold:.12})\n", if pass { "pass" } else { "fail" });
    Ok(Report { value, text, code: if pass { EXIT_OK } else { EXIT_VERIFY_FAILED } })
}

fn cmd_invariants(path: &Path) -> Result<Report, Failure> {
    let state = read_state(path)?;
    let purities: Vec<f64> = (1..=state.qubits()).map(|q| purity(&state.single_qubit_density(q))).collect();
    let value = if state.qubits() == 2 {
        json!({ "qubits": 2, "purities": nums(&purities), "schmidt_angle": num(schmidt_two_qubit(&state)?.angle) })
    } else {
        let inv = purity_invariants(&state)?;
        let acin = acin_form(&state)?;
        json!({
            "qubits": 3,
            "purities": nums(&inv.0),
            "tangle": num(tangle(&state)?),
            "acin": { "lambdas": nums(&acin.lambdas), "phi": num(acin.phi) },
        })
    };
    let mut text = String::new();
    let list: Vec<String> = value["purities"]
        .as_array()
        .into_iter()
        .flatten()
        .map(|v| format!("{:.12}", v.as_f64().unwrap_or(f64::NAN)))
        .collect();
    writeln!(text, "purities: {}", list.join(" ")).ok();
    if let Some(t) = value["tangle"].as_f64() {
        writeln!(text, "tangle: {t:.12}").ok();
    }
    if let Some(a) = value["schmidt_angle"].as_f64() {
        writeln!(text, "schmidt angle: {a:.12}").ok();
    }
    Ok(Report { value, text, code: EXIT_OK })
}

fn cmd_sample(args: &SampleArgs) -> Result<Report, Failure> {
    if !(2..=3).contains(&args.qubits) {
        return Err(Failure::new(EXIT_DIMENSION, "only 2 or 3 qubits are supported"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let states: Vec<Value> = (0..args.count)
        .map(|_| haar_sample_with(args.qubits, &mut rng).map(|s| state_to_value(&s)))
        .collect::<Result<_, _>>()?;
    let text: String = states.iter().map(to_json).collect();
    let value = json!({ "qubits": args.qubits, "seed": args.seed, "states": states });
    Ok(Report { value, text, code: EXIT_OK })
}

fn level_text(minima: &Value) -> String {
    let mut text = String::new();
    for level in minima.as_array().into_iter().flatten() {
        let best = level[1].as_f64().unwrap_or(f64::NAN);
        writeln!(text, "  k = {}: best infidelity {}", level[0], format_number(best)).ok();
    }
    text
}

fn cmd_oracle(source: &Path, target: &Path, kmax: usize, seed: u64, threshold: f64) -> Result<Report, Failure> {
    let source = read_state(source)?;
    let target = read_state(target)?;
    if source.qubits() != target.qubits() {
        return Err(Failure::new(EXIT_DIMENSION, "source and target differ in qubit count"));
    }
    let report = min_cnot_search(&source, &target, kmax, threshold, seed)?;
    let value = oracle_report_value(&report);
    let mut text = match report.verdict {
        Some(k) => format!("verdict: {k} CNOTs\n"),
        None => format!("verdict: none up to {kmax} CNOTs\n"),
    };
    text.push_str(&level_text(&value["level_minima"]));
    text.push_str("numerical evidence only\n");
    let code = if report.verdict.is_some() { EXIT_OK } else { EXIT_NO_CONVERGENCE };
    Ok(Report { value, text, code })
}

fn cmd_probe(samples: usize, seed: u64) -> Result<Report, Failure> {
    let report = probe_max_distance(samples, seed)?;
    let value = probe_report_value(&report);
    let mut text = String::new();
    for (i, e) in report.entries.iter().enumerate() {
        match e.verdict {
            Some(k) => writeln!(text, "pair {i}: {k} CNOTs"),
            None => writeln!(text, "pair {i}: none up to {PROBE_KMAX} CNOTs (flagged)"),
        }
        .ok();
    }
    match report.max_verdict {
        Some(k) => writeln!(text, "largest verdict: {k}"),
        None => writeln!(text, "largest verdict: undetermined"),
    }
    .ok();
    text.push_str("non-certifying: local optimization evidence only\n");
    Ok(Report { value, text, code: EXIT_OK })
}

fn dispatch(cli: &Cli) -> Result<Report, Failure> {
    if !(cli.tolerance > 0.0 && cli.tolerance < 1.0) {
        return Err(Failure::new(EXIT_PARSE, "tolerance must lie in (0, 1)"));
    }
    match &cli.command {
        Command::Classify { state, reference } => cmd_classify(state, *reference, cli.tolerance),
        Command::Synth { target, from, nearest_neighbor, seed, circuit_out } => {
            let opts = SynthOptions {
                tolerance: cli.tolerance,
                nearest_neighbor: *nearest_neighbor,
                seed: *seed,
                ..Default::default()
            };
            cmd_synth(target, from, &opts, circuit_out.as_deref())
        }
        Command::Verify { state, circuit, target, threshold } => cmd_verify(state, circuit, target, *threshold),
        Command::Invariants { state } => cmd_invariants(state),
        Command::Sample(args) => cmd_sample(args),
        Command::Oracle { source, target, kmax, seed, threshold } => {
            cmd_oracle(source, target, *kmax, *seed, *threshold)
        }
        Command::ProbeMaxDistance { samples, seed } => cmd_probe(*samples, *seed),
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: rendered, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: rendered }
            };
        }
    };
    match dispatch(&cli) {
        Ok(report) => {
            let stdout = if cli.json { to_json(&report.value) } else { report.text };
            Outcome { code: report.code, stdout, stderr: String::new() }
        }
        Err(f) => {
            let stdout = if cli.json { to_json(&json!({ "error": f.message, "exit_code": f.code })) } else { String::new() };
            Outcome { code: f.code, stdout, stderr: format!("error: {}\n", f.message) }
        }
    }
}
