//! Argument parsing and the subcommands. [`run`] works on in-memory buffers so that it can be
//! driven from tests as well as from `main`.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use bbmpc::circuit::random_inputs;
use bbmpc::codes::{gen_code, gen_rs_code, stat_distance_bruteforce, CodeScheme, EvalPoints};
use bbmpc::homenc::blinding_distance_worst;
use bbmpc::linalg::Matrix;
use bbmpc::outer::{Challenges, Corruption, ReshareCheat};
use bbmpc::packed::ReplicationMode;
use bbmpc::runner::{
    bench, build_backend, run_trial_session, show_label, trial_seed, ProtocolParams, ProtocolSpec,
};
use bbmpc::{
    eval_plain, eval_shared, run_outer_protocol, Circuit, Error, Inputs, Label, Outcome, OuterOptions,
    PackedParams, Ring, Session,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

pub const EXIT_PARAM: i32 = 2;
pub const EXIT_INCORRECT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "bbmpc", version, about = "Secure computation over black-box rings")]
struct Cli {
    /// Master seed; every random choice derives from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for independent trials.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add wall-clock times to reports (makes them nondeterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// One product-sharing run on random inputs, as JSON.
    Run(RunArgs),
    /// Aggregate statistics over many trials, as CSV.
    Bench(BenchArgs),
    /// Exact statistical distances by enumeration.
    Distance {
        #[command(subcommand)]
        which: DistanceCmd,
    },
    /// Code generators.
    Codes {
        #[command(subcommand)]
        which: CodesCmd,
    },
    /// The server-aided protocol on packed shares.
    Outer(OuterArgs),
    /// Two-party evaluation of a circuit on additive shares.
    Eval(EvalArgs),
    /// Product sharing of given values.
    Pdtshr(PdtshrArgs),
}

fn parse_protocol(s: &str) -> Result<ProtocolSpec, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug, Clone)]
struct ProtocolArgs {
    /// Statistical parameter or code dimension.
    #[arg(long, default_value_t = 8)]
    k: usize,
    /// Reed-Solomon expansion factor.
    #[arg(long, default_value_t = 8)]
    c: usize,
    /// Products per packed call (default k/2).
    #[arg(long)]
    t: Option<usize>,
    /// Oblivious transfers per call (default log2|R| + k).
    #[arg(long)]
    n: Option<usize>,
    /// Extra noiseless positions checked by the receiver in packed calls.
    #[arg(long, default_value_t = 0)]
    check_points: usize,
    /// Security parameter for the encryption-based protocols.
    #[arg(long, default_value_t = 40)]
    security: u32,
}

impl ProtocolArgs {
    fn params(&self) -> ProtocolParams {
        ProtocolParams {
            k: self.k,
            c: self.c,
            t: self.t,
            n: self.n,
            check_points: self.check_points,
            security: self.security,
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[arg(long, value_parser = parse_protocol)]
    protocol: ProtocolSpec,
    #[arg(long, default_value = "gf:97")]
    ring: String,
    #[command(flatten)]
    p: ProtocolArgs,
    /// Also write the message transcript as JSON lines.
    #[arg(long)]
    transcript: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// One or more protocols (repeat the flag or separate with commas).
    #[arg(long, value_parser = parse_protocol, value_delimiter = ',', required = true)]
    protocol: Vec<ProtocolSpec>,
    #[arg(long, value_delimiter = ',', default_value = "gf:97")]
    ring: Vec<String>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[command(flatten)]
    p: ProtocolArgs,
}

#[derive(Subcommand, Debug)]
enum DistanceCmd {
    /// Distance of the public part of the statistical encoding from uniform.
    Stat {
        #[arg(long, default_value = "zm:2")]
        ring: String,
        #[arg(long)]
        n: usize,
        /// Encoded element, as comma-separated entries.
        #[arg(long, default_value = "0")]
        x: String,
    },
    /// Worst-case distance of the Paillier blinding over all inputs.
    Psi {
        #[arg(long = "M")]
        m: u64,
        #[arg(long)]
        k: u32,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PointsArg {
    Random,
    Structured,
}

#[derive(Subcommand, Debug)]
enum CodesCmd {
    /// Generates a code and checks its decoding identity.
    Gen {
        #[arg(long)]
        scheme: String,
        #[arg(long, default_value = "gf:97")]
        ring: String,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value_t = 8)]
        c: usize,
        #[arg(long, value_enum, default_value_t = PointsArg::Random)]
        points: PointsArg,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReplicationArg {
    Typewise,
    InnerProduct,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ChallengeArg {
    Public,
    OtherClient,
}

#[derive(Args, Debug)]
struct OuterArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// Ring spec; defaults to the circuit's RING header.
    #[arg(long)]
    ring: Option<String>,
    #[arg(long, default_value_t = 16)]
    servers: usize,
    /// Block length (default servers/4).
    #[arg(long)]
    block: Option<usize>,
    /// Sharing degree (default servers/3).
    #[arg(long)]
    degree: Option<usize>,
    /// Injected share error, `stage:layer:server:block:offset`; repeatable.
    #[arg(long = "corrupt")]
    corrupt: Vec<String>,
    /// Alice reshares a wrong value, `layer:block:entry:offset`.
    #[arg(long)]
    cheat: Option<String>,
    /// JSON object of input values; random when absent.
    #[arg(long)]
    inputs: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReplicationArg::InnerProduct)]
    replication: ReplicationArg,
    #[arg(long, value_enum, default_value_t = ChallengeArg::Public)]
    challenges: ChallengeArg,
    /// Check that every input is 0 or 1.
    #[arg(long)]
    boolean_inputs: bool,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long)]
    circuit: PathBuf,
    #[arg(long)]
    ring: Option<String>,
    #[arg(long, value_parser = parse_protocol, default_value = "rho")]
    backend: ProtocolSpec,
    #[arg(long)]
    inputs: Option<PathBuf>,
    #[command(flatten)]
    p: ProtocolArgs,
}

#[derive(Args, Debug)]
struct PdtshrArgs {
    #[arg(long, value_parser = parse_protocol)]
    protocol: ProtocolSpec,
    #[arg(long, default_value = "gf:97")]
    ring: String,
    /// Left input; comma-separated entries for matrices. Repeat for packed protocols.
    #[arg(long, required = true)]
    a: Vec<String>,
    #[arg(long, required = true)]
    b: Vec<String>,
    #[command(flatten)]
    p: ProtocolArgs,
}

/// Exit status and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: Vec<u8>,
    pub stderr: Vec<u8>,
}

enum Failure {
    Param(String),
    Incorrect(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Abort(a) => Failure::Incorrect(format!("unexpected abort: {a}")),
            e if e.is_bottom() => Failure::Incorrect(e.to_string()),
            e => Failure::Param(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type CmdResult = Result<Report, Failure>;

/// Report body plus whether every correctness check passed.
struct Report {
    body: Body,
    correct: bool,
}

enum Body {
    Json(Value),
    Text(String),
}

impl Body {
    fn render(self) -> String {
        match self {
            Body::Json(v) => serde_json::to_string_pretty(&v).expect("json serializes") + "\n",
            Body::Text(t) => t,
        }
    }
}

pub fn run<I, T>(args: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string().into_bytes();
            return if e.use_stderr() {
                CliOutput { code: EXIT_PARAM, stdout: Vec::new(), stderr: text }
            } else {
                CliOutput { code: 0, stdout: text, stderr: Vec::new() }
            };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.jobs.max(1)).build() {
        Ok(p) => p,
        Err(e) => return fail(1, e.to_string()),
    };
    let res = pool.install(|| dispatch(&cli));
    match res {
        Ok(rep) => {
            let mut out = CliOutput {
                code: if rep.correct { 0 } else { EXIT_INCORRECT },
                stdout: Vec::new(),
                stderr: Vec::new(),
            };
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, rep.body.render()) {
                        return fail(1, format!("cannot write {}: {e}", path.display()));
                    }
                }
                None => out.stdout = rep.body.render().into_bytes(),
            }
            if !rep.correct {
                out.stderr = b"error: correctness check failed\n".to_vec();
            }
            out
        }
        Err(Failure::Param(m)) => fail(EXIT_PARAM, m),
        Err(Failure::Incorrect(m)) => fail(EXIT_INCORRECT, m),
        Err(Failure::Io(m)) => fail(1, m),
    }
}

fn fail(code: i32, msg: String) -> CliOutput {
    CliOutput { code, stdout: Vec::new(), stderr: format!("error: {msg}\n").into_bytes() }
}

fn dispatch(cli: &Cli) -> CmdResult {
    let start = Instant::now();
    let mut rep = match &cli.cmd {
        Cmd::Run(a) => cmd_run(cli, a)?,
        Cmd::Bench(a) => return cmd_bench(cli, a),
        Cmd::Distance { which } => cmd_distance(which)?,
        Cmd::Codes { which } => cmd_codes(cli, which)?,
        Cmd::Outer(a) => cmd_outer(cli, a)?,
        Cmd::Eval(a) => cmd_eval(cli, a)?,
        Cmd::Pdtshr(a) => cmd_pdtshr(cli, a)?,
    };
    if let (true, Body::Json(Value::Object(m))) = (cli.timing, &mut rep.body) {
        m.insert("wall_time_ms".into(), json!(start.elapsed().as_secs_f64() * 1000.0));
    }
    Ok(rep)
}

fn json_report(v: Value, correct: bool) -> Report {
    Report { body: Body::Json(v), correct }
}

fn parse_ring(spec: &str) -> Result<Ring, Failure> {
    Ring::parse(spec).map_err(|e| Failure::Param(format!("ring {spec:?}: {e}")))
}

fn parse_element(ring: &Ring, s: &str) -> Result<Label, Failure> {
    let entries: Vec<u64> = s
        .split(',')
        .map(|x| x.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Param(format!("bad element {s:?}")))?;
    let entries = if entries.len() == 1 && ring.family().entries() > 1 {
        // a scalar for a matrix ring means that multiple of the identity
        let dim = (ring.family().entries() as f64).sqrt() as usize;
        (0..dim * dim).map(|i| if i % (dim + 1) == 0 { entries[0] } else { 0 }).collect()
    } else {
        entries
    };
    Ok(ring.encode(&entries)?)
}

fn cmd_run(cli: &Cli, a: &RunArgs) -> CmdResult {
    let ring = parse_ring(&a.ring)?;
    let params = a.p.params();
    if !a.protocol.supports(&ring, &params) {
        return Err(Failure::Param(format!("{} is not defined over {}", a.protocol, a.ring)));
    }
    let (res, s) = run_trial_session(&a.protocol, &ring, &params, cli.seed)?;
    if let Some(path) = &a.transcript {
        fs::write(path, s.transcript().to_jsonl())?;
    }
    Ok(json_report(
        json!({
            "protocol": a.protocol.to_string(),
            "ring": a.ring,
            "backend": res.backend,
            "seed": cli.seed,
            "products": res.products,
            "correct": res.correct,
            "stats": res.stats,
        }),
        res.correct,
    ))
}

fn cmd_bench(cli: &Cli, a: &BenchArgs) -> CmdResult {
    let start = Instant::now();
    let params = a.p.params();
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut correct = true;
    let single = a.protocol.len() * a.ring.len() == 1;
    let mut rows = 0;
    for proto in &a.protocol {
        for ring in &a.ring {
            // in a cross product, pairs where the protocol is undefined are skipped
            if !single && !proto.supports(&parse_ring(ring)?, &params) {
                continue;
            }
            rows += 1;
            let mut row = bench(proto, ring, &params, a.trials, cli.seed, cli.timing)?;
            if cli.timing {
                row.wall_time_ms = Some(start.elapsed().as_secs_f64() * 1000.0);
            }
            correct &= row.correctness_pass_rate == 1.0;
            w.serialize(&row).map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    if rows == 0 {
        return Err(Failure::Param("no protocol is defined over the given rings".into()));
    }
    let bytes = w.into_inner().map_err(|e| Failure::Io(e.to_string()))?;
    Ok(Report { body: Body::Text(String::from_utf8(bytes).expect("csv is utf-8")), correct })
}

fn rational(r: &BigRational) -> Value {
    json!({
        "exact": r.to_string(),
        "decimal": r.to_f64().unwrap_or(f64::NAN),
    })
}

fn cmd_distance(which: &DistanceCmd) -> CmdResult {
    match which {
        DistanceCmd::Stat { ring, n, x } => {
            if *n == 0 {
                return Err(Failure::Param("n must be at least 1".into()));
            }
            let r = parse_ring(ring)?;
            let xl = parse_element(&r, x)?;
            let d = stat_distance_bruteforce(&mut r.oracle(0), *n, &xl)?;
            let bound = 2f64.powf(-((*n as f64) - 1.0) / 2.0);
            Ok(json_report(
                json!({ "ring": ring, "n": n, "x": x, "distance": rational(&d), "bound": bound }),
                true,
            ))
        }
        DistanceCmd::Psi { m, k } => {
            let (d, (a, b, r)) = blinding_distance_worst(*m, *k)?;
            let bound = BigRational::new(1.into(), num_bigint::BigInt::from(1u64) << *k);
            Ok(json_report(
                json!({
                    "M": m,
                    "k": k,
                    "worst_distance": rational(&d),
                    "maximizer": { "a": a, "b": b, "r": r },
                    "bound": rational(&bound),
                    "within_bound": d <= bound,
                }),
                d <= bound,
            ))
        }
    }
}

fn labels(ring: &Ring, v: &[Label]) -> Vec<String> {
    v.iter().map(|l| show_label(ring, l)).collect()
}

fn matrix_json(ring: &Ring, m: &Matrix) -> Value {
    let rows: Vec<Vec<String>> = (0..m.rows()).map(|i| labels(ring, m.row(i))).collect();
    json!(rows)
}

fn cmd_codes(cli: &Cli, which: &CodesCmd) -> CmdResult {
    let CodesCmd::Gen { scheme, ring, k, c, points } = which;
    let r = parse_ring(ring)?;
    let scheme: CodeScheme = scheme.parse()?;
    let mut o = r.oracle(cli.seed);
    let code = match scheme {
        CodeScheme::Rs => {
            let pts = match points {
                PointsArg::Random => EvalPoints::Random,
                PointsArg::Structured => EvalPoints::Structured,
            };
            gen_rs_code(&mut o, *k, *c, pts)?
        }
        _ => gen_code(&mut o, scheme, *k, *c)?,
    };
    let inverts = o.counter().calls_of(bbmpc::Command::Invert);
    // H · G|_L is the identity for the linear generators
    let identity = if scheme == CodeScheme::Rs {
        None
    } else {
        let gl = code.g.select_rows(&code.l);
        Some(code.h.mul(&mut o, &gl)?.is_identity(&mut o))
    };
    Ok(json_report(
        json!({
            "scheme": format!("{scheme:?}").to_lowercase(),
            "ring": ring,
            "n": code.n(),
            "k": code.k(),
            "l": code.l,
            "g": matrix_json(&r, &code.g),
            "h": matrix_json(&r, &code.h),
            "invert_calls": inverts,
            "h_times_g_l_is_identity": identity,
        }),
        identity.unwrap_or(true),
    ))
}

fn load_circuit(path: &PathBuf, ring: &Option<String>) -> Result<(Circuit, Ring, String), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Param(format!("cannot read {}: {e}", path.display())))?;
    let c = Circuit::parse(&text)?;
    let spec = ring
        .clone()
        .or_else(|| c.ring.clone())
        .ok_or_else(|| Failure::Param("no ring given and the circuit has no RING header".into()))?;
    let r = parse_ring(&spec)?;
    Ok((c, r, spec))
}

fn load_inputs(path: &Option<PathBuf>, c: &Circuit, ring: &Ring, seed: u64) -> Result<Inputs, Failure> {
    let Some(path) = path else {
        return Ok(random_inputs(c, &mut ring.oracle(trial_seed(seed, 0))));
    };
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Param(format!("cannot read {}: {e}", path.display())))?;
    let v: serde_json::Map<String, Value> =
        serde_json::from_str(&text).map_err(|e| Failure::Param(format!("bad inputs file: {e}")))?;
    let mut out = Inputs::new();
    for (k, val) in v {
        let entries: Vec<u64> = match &val {
            Value::Number(n) => {
                vec![n.as_u64().ok_or_else(|| Failure::Param(format!("bad value for {k}")))?]
            }
            Value::Array(a) => a
                .iter()
                .map(|x| x.as_u64().ok_or_else(|| Failure::Param(format!("bad value for {k}"))))
                .collect::<Result<_, _>>()?,
            _ => return Err(Failure::Param(format!("bad value for {k}"))),
        };
        out.insert(k, ring.encode(&entries)?);
    }
    Ok(out)
}

fn outputs_json(c: &Circuit, ring: &Ring, values: &[Label]) -> Value {
    let rows: Vec<Value> = c
        .outputs()
        .iter()
        .zip(values)
        .map(
            |(&(p, w), v)| json!({ "party": p.to_string(), "wire": c.name(w), "value": show_label(ring, v) }),
        )
        .collect();
    json!(rows)
}

fn cmd_outer(cli: &Cli, a: &OuterArgs) -> CmdResult {
    let (c, ring, spec) = load_circuit(&a.circuit, &a.ring)?;
    let block = a.block.unwrap_or((a.servers / 4).max(1));
    let degree = a.degree.unwrap_or(a.servers / 3);
    let params = PackedParams::new(&mut ring.oracle(0), a.servers, block, degree)?;
    let corruptions: Vec<Corruption> = a.corrupt.iter().map(|s| s.parse()).collect::<Result<_, Error>>()?;
    let cheat = match &a.cheat {
        None => None,
        Some(s) => {
            let p: Vec<usize> = s
                .split(':')
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| Failure::Param(format!("bad cheat {s:?}")))?;
            if p.len() != 4 {
                return Err(Failure::Param(format!("cheat {s:?} is not layer:block:entry:offset")));
            }
            Some(ReshareCheat { layer: p[0], block: p[1], entry: p[2], offset: p[3] as u64 })
        }
    };
    let adversarial = !corruptions.is_empty() || cheat.is_some();
    let opts = OuterOptions {
        challenges: match a.challenges {
            ChallengeArg::Public => Challenges::Public,
            ChallengeArg::OtherClient => Challenges::OtherClient,
        },
        replication: match a.replication {
            ReplicationArg::Typewise => ReplicationMode::Typewise,
            ReplicationArg::InnerProduct => ReplicationMode::InnerProduct,
        },
        boolean_inputs: a.boolean_inputs,
        corruptions,
        cheat,
    };
    let inputs = load_inputs(&a.inputs, &c, &ring, cli.seed)?;
    let expected = eval_plain(&c, &inputs, &mut ring.oracle(0));
    let rep = run_outer_protocol(&ring, &c, &inputs, &params, &opts, cli.seed)?;
    let (outcome, outputs, abort, correct) = match &rep.outcome {
        Outcome::Done(v) => {
            let ok = expected.as_ref().is_ok_and(|e| e == v);
            ("done", outputs_json(&c, &ring, v), Value::Null, ok)
        }
        Outcome::Aborted(ab) => {
            // an abort is the right answer to tampering or to a ⊥ input, never to an honest run
            let ok = adversarial || a.boolean_inputs || expected.is_err();
            ("aborted", Value::Null, json!(ab), ok)
        }
    };
    Ok(json_report(
        json!({
            "ring": spec,
            "servers": params.n,
            "block": params.ell,
            "degree": params.delta,
            "privacy_threshold": params.privacy_threshold(),
            "layers": rep.layers,
            "blocks": rep.blocks,
            "outcome": outcome,
            "outputs": outputs,
            "expected": expected.as_ref().map(|e| outputs_json(&c, &ring, e)).unwrap_or(Value::Null),
            "abort": abort,
            "stats": rep.stats,
        }),
        correct,
    ))
}

fn cmd_eval(cli: &Cli, a: &EvalArgs) -> CmdResult {
    let (c, ring, spec) = load_circuit(&a.circuit, &a.ring)?;
    let params = a.p.params();
    if matches!(a.backend, ProtocolSpec::Multiparty(..)) || !a.backend.supports(&ring, &params) {
        return Err(Failure::Param(format!("{} cannot serve as a backend over {spec}", a.backend)));
    }
    let inputs = load_inputs(&a.inputs, &c, &ring, cli.seed)?;
    let expected = eval_plain(&c, &inputs, &mut ring.oracle(0))?;
    let mut backend = build_backend(&a.backend, &ring, &params)?;
    let mut s = Session::two_party(&ring, cli.seed);
    let got = eval_shared(&mut s, &c, &inputs, backend.as_mut())?;
    let correct = got == expected;
    Ok(json_report(
        json!({
            "ring": spec,
            "backend": backend.name(),
            "gates": c.gate_count(),
            "multiplications": c.mul_count(),
            "mult_depth": c.mult_depth(),
            "outputs": outputs_json(&c, &ring, &got),
            "expected": outputs_json(&c, &ring, &expected),
            "correct": correct,
            "stats": s.stats(),
        }),
        correct,
    ))
}

fn cmd_pdtshr(cli: &Cli, a: &PdtshrArgs) -> CmdResult {
    let ring = parse_ring(&a.ring)?;
    let params = a.p.params();
    if matches!(a.protocol, ProtocolSpec::Multiparty(..)) || !a.protocol.supports(&ring, &params) {
        return Err(Failure::Param(format!("{} is not a two-party protocol over {}", a.protocol, a.ring)));
    }
    let xs: Vec<Label> = a.a.iter().map(|s| parse_element(&ring, s)).collect::<Result<_, _>>()?;
    let ys: Vec<Label> = a.b.iter().map(|s| parse_element(&ring, s)).collect::<Result<_, _>>()?;
    if xs.len() != ys.len() {
        return Err(Failure::Param("give as many --a values as --b values".into()));
    }
    let mut backend = build_backend(&a.protocol, &ring, &params)?;
    if xs.len() > backend.width() {
        return Err(Failure::Param(format!(
            "{} shares at most {} products per call",
            backend.name(),
            backend.width()
        )));
    }
    let mut s = Session::two_party(&ring, cli.seed);
    let (za, zb) = backend.share(&mut s, 0, 1, &xs, &ys)?;
    let mut o = ring.oracle(0);
    let mut correct = true;
    for i in 0..xs.len() {
        correct &= o.add(&za[i], &zb[i])? == o.mul(&xs[i], &ys[i])?;
    }
    Ok(json_report(
        json!({
            "protocol": a.protocol.to_string(),
            "backend": backend.name(),
            "ring": a.ring,
            "a": labels(&ring, &xs),
            "b": labels(&ring, &ys),
            "share_a": labels(&ring, &za),
            "share_b": labels(&ring, &zb),
            "correct": correct,
            "stats": s.stats(),
        }),
        correct,
    ))
}
