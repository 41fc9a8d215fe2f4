//! `passmat` command-line frontend.
//!
//! Every subcommand reads JSON inputs, runs one analysis from the library
//! and writes JSON or CSV to `--out` (stdout by default). Outputs start with
//! a fixed-format metadata line so identical runs give identical bytes.
//! Exit codes: 0 ok, 2 input error, 3 infeasible or failed precondition,
//! 4 numerical failure.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use passmat::interconnect::{self, InterconnectionVerdict};
use passmat::lti::{self, Family};
use passmat::par::Exec;
use passmat::passivity::{self, Principle, Weights};
use passmat::report::{self, fmt_num};
use passmat::smib::{self, SmibParams, SweepWindow};
use passmat::{dissipop, CertificateKind, Error, FrequencyGrid, Matrix, PassivityCertificate, StateSpace, SymmetricMatrix};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

#[derive(Parser)]
#[command(name = "passmat", version, about = "Matrix-valued passivity indices: analysis and experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a passivity certificate for a state-space system.
    Analyze(AnalyzeArgs),
    /// Static-gain passivation sweep over θ with true and certified verdicts.
    PassivationSweep(SweepArgs),
    /// SMIB stability-region sweep over (K11, K22).
    SmibRegion(RegionArgs),
    /// SMIB time-domain simulation for one gain.
    SmibSim(SimArgs),
    /// Leading eigenpairs of the discretized dissipativity operator.
    Spectral(SpectralArgs),
    /// Check an interconnection of two certificates.
    Interconnect(InterconnectArgs),
}

#[derive(Args)]
struct Output {
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ifp,
    Ofp,
    Ifofp,
}

#[derive(Clone, Copy, ValueEnum)]
enum PrincipleArg {
    Trace,
    Mineig,
}

impl From<PrincipleArg> for Principle {
    fn from(p: PrincipleArg) -> Self {
        match p {
            PrincipleArg::Trace => Principle::TraceMax,
            PrincipleArg::Mineig => Principle::MinEigMax,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    /// System JSON `{ "A", "B", "C", "D" }`.
    system: PathBuf,
    #[arg(long, value_enum, default_value = "ofp")]
    mode: Mode,
    #[arg(long, value_enum, default_value = "mineig")]
    principle: PrincipleArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    system: PathBuf,
    /// Gain JSON: a row-major matrix, or `{ "K": [[..]] }`.
    gain: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    theta_max: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ParamsArg {
    /// SMIB parameter JSON; the benchmark values when omitted.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Args)]
struct RegionArgs {
    #[command(flatten)]
    params: ParamsArg,
    /// K11 range `lo,hi`.
    #[arg(long, value_parser = parse_range, default_value = "-0.4,0.4")]
    k11: (f64, f64),
    /// K22 range `lo,hi`.
    #[arg(long, value_parser = parse_range, default_value = "-1.2,0.6")]
    k22: (f64, f64),
    /// Grid size `n11xn22`.
    #[arg(long, value_parser = parse_grid, default_value = "81x81")]
    grid: (usize, usize),
    #[arg(long, default_value_t = 0.1)]
    offdiag: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SimArgs {
    #[command(flatten)]
    params: ParamsArg,
    #[arg(long, allow_hyphen_values = true)]
    k11: f64,
    #[arg(long, allow_hyphen_values = true)]
    k22: f64,
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    offdiag: f64,
    /// Perturbation radius along (1,1,1)/√3.
    #[arg(long, default_value_t = 0.03)]
    r: f64,
    #[arg(long, default_value_t = 2e-4)]
    dt: f64,
    #[arg(long = "T", default_value_t = 10.0)]
    t_end: f64,
    /// Record every n-th step.
    #[arg(long, default_value_t = 50)]
    stride: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SpectralArgs {
    system: PathBuf,
    #[arg(long = "T", default_value_t = 40.0)]
    horizon: f64,
    #[arg(long = "N", default_value_t = 512)]
    points: usize,
    #[arg(long, default_value_t = 20)]
    count: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Topology {
    Parallel,
    Feedback,
    Passivation,
    L2,
    Lyapunov,
}

#[derive(Args)]
struct InterconnectArgs {
    cert1: PathBuf,
    cert2: PathBuf,
    #[arg(long, value_enum)]
    topology: Topology,
    /// Subsystem 1 is zero-state observable (Lyapunov topology).
    #[arg(long)]
    zso1: bool,
    /// Subsystem 2 is zero-state observable (Lyapunov topology).
    #[arg(long)]
    zso2: bool,
    #[command(flatten)]
    output: Output,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected lo,hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if !(lo < hi) {
        return Err("need lo < hi".into());
    }
    Ok((lo, hi))
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('x').ok_or("expected n11xn22")?;
    let n11: usize = a.parse().map_err(|e| format!("{e}"))?;
    let n22: usize = b.parse().map_err(|e| format!("{e}"))?;
    if n11 < 2 || n22 < 2 || n11 * n22 > 1_000_000 {
        return Err("each grid side must be ≥ 2 with at most 1e6 cells".into());
    }
    Ok((n11, n22))
}

/// CLI-level failure mapped onto the exit-code contract.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotHurwitz | Error::Infeasible(_) | Error::Precondition(_) => 3,
            Error::Solver(_) | Error::NoConvergence(_) | Error::Singular(_) => 4,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn input_error(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

/// Inputs read so far, hashed into the metadata line.
#[derive(Default)]
struct Inputs {
    hasher: Sha256,
}

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
        self.hasher.update(text.as_bytes());
        self.hasher.update([0u8]);
        Ok(text)
    }

    fn flags(&mut self, flags: &str) {
        self.hasher.update(flags.as_bytes());
    }

    fn digest(self) -> String {
        self.hasher.finalize().iter().fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }
}

fn metadata(command: &str, inputs: Inputs) -> String {
    format!(
        "passmat {} command={command} inputs_sha256={} lmi_eps_rel={} verify_tol={} significant_digits={}",
        env!("CARGO_PKG_VERSION"),
        inputs.digest(),
        fmt_num(passivity::LMI_EPS_REL),
        fmt_num(passivity::VERIFY_TOL),
        report::SIGNIFICANT_DIGITS
    )
}

fn write_output(output: &Output, body: &str) -> Result<(), Failure> {
    match &output.out {
        Some(p) => std::fs::write(p, body).map_err(|e| input_error(format!("{}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn write_csv(output: &Output, meta: String, body: &str) -> Result<(), Failure> {
    write_output(output, &format!("# {meta}\n{body}"))
}

/// Rounds every number in a JSON tree to the fixed significant digits.
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => fmt_num(x).parse::<f64>().map(Value::from).unwrap_or(Value::Null),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn write_json(output: &Output, value: Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(&round_json(value)).expect("JSON values serialize");
    text.push('\n');
    write_output(output, &text)
}

fn load_system(inputs: &mut Inputs, path: &Path) -> Result<StateSpace, Failure> {
    Ok(StateSpace::from_json_str(&inputs.read(path)?)?)
}

fn load_params(inputs: &mut Inputs, arg: &ParamsArg) -> Result<SmibParams, Failure> {
    match &arg.params {
        Some(p) => Ok(SmibParams::from_json_str(&inputs.read(p)?)?),
        None => Ok(SmibParams::default()),
    }
}

fn load_gain(inputs: &mut Inputs, path: &Path) -> Result<Matrix, Failure> {
    let v: Value = serde_json::from_str(&inputs.read(path)?).map_err(|e| input_error(e.to_string()))?;
    let rows = match v {
        Value::Object(mut o) => o.remove("K").ok_or_else(|| input_error("gain JSON object needs a \"K\" key"))?,
        other => other,
    };
    let rows: Vec<Vec<f64>> = serde_json::from_value(rows).map_err(|e| input_error(e.to_string()))?;
    Ok(passmat::symmat::matrix_from_rows(&rows)?)
}

fn load_cert(inputs: &mut Inputs, path: &Path) -> Result<PassivityCertificate, Failure> {
    Ok(PassivityCertificate::from_json_str(&inputs.read(path)?)?)
}

fn analyze(a: AnalyzeArgs) -> Result<(), Failure> {
    let mut inputs = Inputs::default();
    let sys = load_system(&mut inputs, &a.system)?;
    let principle = Principle::from(a.principle);
    let (label, cert) = match a.mode {
        Mode::Ifp if sys.order() == 0 => ("ifp", passivity::static_ifpm(sys.d())?),
        Mode::Ofp if sys.order() == 0 => ("ofp", static_ofpm(sys.d())?),
        Mode::Ifofp if sys.order() == 0 => return Err(Error::Precondition("joint certificate of a static map has no storage LMI".into()).into()),
        Mode::Ifp => ("ifp", passivity::compute_ifpm(&sys, principle)?),
        Mode::Ofp => ("ofp", passivity::compute_ofpm(&sys, principle)?),
        Mode::Ifofp => ("ifofp", passivity::compute_ifofp(&sys, Weights { phi: 1.0, xi: 1.0 })?),
    };
    inputs.flags(&format!("mode={label} principle={principle:?}"));
    let v = passivity::verify_certificate(&sys, &cert, &FrequencyGrid::default())?;
    let (phi, xi) = passivity::scalar_indices(&cert);

    let mut summary = format!("{} certificate, {} ports, {principle:?}\n", label.to_uppercase(), cert.dim());
    match cert.kind() {
        CertificateKind::Ifp => {
            let _ = writeln!(summary, "phi = {}  (lambda_min of Phi)", fmt_num(phi));
        }
        CertificateKind::Ofp => {
            let _ = writeln!(summary, "xi = {}  (lambda_min of Xi)", fmt_num(xi));
        }
        CertificateKind::Ifofp => {
            let _ = writeln!(summary, "phi = {}, xi = {}", fmt_num(phi), fmt_num(xi));
        }
    }
    let _ = writeln!(summary, "verification margin = {}", fmt_num(v.primary_margin(cert.kind())));
    eprint!("{summary}");

    let mut doc = serde_json::to_value(cert.to_json()).expect("certificate serializes");
    let obj = doc.as_object_mut().expect("certificate is an object");
    obj.insert("scalar_indices".into(), json!({ "phi": phi, "xi": xi }));
    obj.insert(
        "verification".into(),
        json!({
            "ifp_margin": v.ifp_margin,
            "ofp_margin": v.ofp_margin,
            "ofp_route": format!("{:?}", v.ofp_route),
            "primary_margin": v.primary_margin(cert.kind()),
        }),
    );
    obj.insert("meta".into(), Value::String(metadata("analyze", inputs)));
    write_json(&a.output, doc)
}

/// `y = Du` with `D` invertible gives `uᵀy = yᵀ D⁻ᵀ y`, so `Ξ = sym(D⁻¹)` is exact.
fn static_ofpm(d: &Matrix) -> Result<PassivityCertificate, Failure> {
    let inv = d.clone().try_inverse().ok_or_else(|| Error::Singular("static feedthrough D is singular".into()))?;
    Ok(PassivityCertificate::ofp(SymmetricMatrix::sym_part(&inv)?, passmat::Provenance::Declared))
}

fn passivation_sweep(a: SweepArgs) -> Result<(), Failure> {
    if !(a.theta_max > 0.0 && a.theta_max.is_finite()) || a.steps == 0 {
        return Err(input_error("need theta-max > 0 and steps ≥ 1"));
    }
    let mut inputs = Inputs::default();
    let sys = load_system(&mut inputs, &a.system)?;
    let k = load_gain(&mut inputs, &a.gain)?;
    inputs.flags(&format!("theta_max={} steps={}", fmt_num(a.theta_max), a.steps));
    let grid = FrequencyGrid::default();
    let m = sys.ports();
    let scalar = lti::scalar_index_freq(&sys, &grid, Family::OutputFeedback)?.value;
    let shortages = vec![
        ("scalar".to_string(), SymmetricMatrix::scaled_identity(m, scalar)),
        ("trace".to_string(), passivity::compute_ofpm(&sys, Principle::TraceMax)?.xi().clone()),
        ("mineig".to_string(), passivity::compute_ofpm(&sys, Principle::MinEigMax)?.xi().clone()),
    ];
    let sweep = interconnect::passivation_sweep(&sys, &k, &shortages, a.theta_max, a.steps, &grid, Exec::default())?;
    write_csv(&a.output, metadata("passivation-sweep", inputs), &report::passivation_sweep_csv(&sweep))
}

fn smib_region(a: RegionArgs) -> Result<(), Failure> {
    let mut inputs = Inputs::default();
    let p = load_params(&mut inputs, &a.params)?;
    let window = SweepWindow {
        k11: a.k11,
        k22: a.k22,
        n11: a.grid.0,
        n22: a.grid.1,
        offdiag: a.offdiag,
    };
    inputs.flags(&format!("window={window:?}"));
    let sweep = smib::region_sweep(&p, &window, Exec::default())?;
    let c = sweep.counts();
    eprintln!(
        "cells {}, scalar {}, matrix {}, stable {}, scalar-not-matrix {}, matrix-not-stable {}",
        c.cells, c.scalar_cert, c.matrix_cert, c.eig_stable, c.scalar_not_matrix, c.matrix_not_stable
    );
    write_csv(&a.output, metadata("smib-region", inputs), &report::region_csv(&sweep))
}

fn smib_sim(a: SimArgs) -> Result<(), Failure> {
    let mut inputs = Inputs::default();
    let p = load_params(&mut inputs, &a.params)?;
    inputs.flags(&format!(
        "k11={} k22={} offdiag={} r={} dt={} T={} stride={}",
        fmt_num(a.k11),
        fmt_num(a.k22),
        fmt_num(a.offdiag),
        fmt_num(a.r),
        fmt_num(a.dt),
        fmt_num(a.t_end),
        a.stride
    ));
    let k = smib::feedback_gain(a.k11, a.k22, a.offdiag);
    let eq = smib::equilibrium(&p)?;
    let traj = smib::simulate_strided(&p, &k, &smib::perturbed_state(&eq, a.r), a.dt, a.t_end, a.stride)?;
    let meta = format!("{} status={:?}", metadata("smib-sim", inputs), traj.status);
    eprintln!("status {:?}, {} samples", traj.status, traj.len());
    write_csv(&a.output, meta, &report::trajectory_csv(&traj))
}

fn spectral(a: SpectralArgs) -> Result<(), Failure> {
    let mut inputs = Inputs::default();
    let sys = load_system(&mut inputs, &a.system)?;
    inputs.flags(&format!("T={} N={} count={}", fmt_num(a.horizon), a.points, a.count));
    let rep = dissipop::fourier_limit_check_with(&sys, a.horizon, a.points, a.count, Exec::default())?;
    eprintln!("max relative deviation {}", fmt_num(rep.max_relative_deviation));
    write_csv(&a.output, metadata("spectral", inputs), &report::spectral_csv(&rep))
}

fn interconnect_cmd(a: InterconnectArgs) -> Result<(), Failure> {
    let mut inputs = Inputs::default();
    let c1 = load_cert(&mut inputs, &a.cert1)?;
    let c2 = load_cert(&mut inputs, &a.cert2)?;
    let topology = a.topology.to_possible_value().expect("no skipped variants").get_name().to_string();
    inputs.flags(&format!("topology={topology} zso1={} zso2={}", a.zso1, a.zso2));
    let verdict: Value = match a.topology {
        Topology::Parallel => composed_only(interconnect::parallel_cert(&c1, &c2)?),
        Topology::Feedback => composed_only(interconnect::feedback_cert_default(&c1, &c2)?),
        Topology::Passivation => verdict_json(interconnect::passivation_check(&c1, &c2)?),
        Topology::L2 => verdict_json(interconnect::l2_stability_check(&c1, &c2)?),
        Topology::Lyapunov => verdict_json(interconnect::lyapunov_stability_check(&c1, &c2, a.zso1, a.zso2)?),
    };
    let mut doc = verdict;
    let obj = doc.as_object_mut().expect("verdict is an object");
    obj.insert("topology".into(), Value::String(topology));
    obj.insert("meta".into(), Value::String(metadata("interconnect", inputs)));
    write_json(&a.output, doc)
}

fn composed_only(cert: PassivityCertificate) -> Value {
    json!({ "satisfied": true, "composed": cert.to_json() })
}

fn verdict_json(v: InterconnectionVerdict) -> Value {
    serde_json::to_value(v.to_json()).expect("verdict serializes")
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(s) = std::env::var("PASSMAT_THREADS") else {
        return Ok(());
    };
    let n: usize = s.trim().parse().ok().filter(|&n| n >= 1).ok_or_else(|| input_error(format!("PASSMAT_THREADS must be a positive integer, got {s:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| input_error(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::PassivationSweep(a) => passivation_sweep(a),
        Command::SmibRegion(a) => smib_region(a),
        Command::SmibSim(a) => smib_sim(a),
        Command::Spectral(a) => spectral(a),
        Command::Interconnect(a) => interconnect_cmd(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
