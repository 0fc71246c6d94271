//! End-to-end acceptance checks. Each check returns a [`Verdict`] with a one-line detail; the
//! `acceptance` test target runs them all and prints one line per check.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::Command as Proc;
use std::time::Instant;

use bbmpc::circuit::{random_circuit, random_inputs, random_layered_circuit, RandomCircuitSpec};
use bbmpc::codes::{gen_rand_code, gen_ring_code, gen_rs_code, stat_distance_bruteforce, EvalPoints};
use bbmpc::homenc::blinding_distance_worst;
use bbmpc::linalg::eval_poly;
use bbmpc::packed::{
    prove_membership, share_distribution, verify_replication, CoinSource, Committee, LinearSpace,
    ReplicationMode, ReplicationPattern,
};
use bbmpc::runner::{
    affine_fit, bench, build_backend, outer_scaling, run_trial, trial_seed, ProtocolParams, ProtocolSpec,
};
use bbmpc::{
    eval_plain, eval_shared, run_outer_protocol, Command, Error, Label, Outcome, OuterOptions, PackedParams,
    Ring, Session,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {:>2} {}: {}", self.id, self.title, self.detail)
    }
}

fn verdict(id: u32, title: &'static str, pass: bool, detail: String) -> Verdict {
    Verdict { id, title, pass, detail }
}

fn failed(id: u32, title: &'static str, e: Error) -> Verdict {
    verdict(id, title, false, format!("error: {e}"))
}

const PROTOCOLS: &[&str] = &[
    "rho",
    "sigma-rand",
    "sigma-ring",
    "tau",
    "theta",
    "psi",
    "wrapped-rho",
    "wrapped-sigma-ring",
    "wrapped-tau",
    "wrapped-theta",
    "multiparty-3-rho",
    "multiparty-4-rho",
];
const RINGS: &[&str] = &["zm:6", "zm:97", "gf:2305843009213693951", "mat:5:2"];

/// Product sharing is exact for every supported (protocol, ring) pair.
pub fn criterion_1() -> Verdict {
    const TITLE: &str = "product-sharing correctness";
    let start = Instant::now();
    let params = ProtocolParams::default();
    let mut pairs = 0;
    let mut bad = Vec::new();
    for name in PROTOCOLS {
        let spec: ProtocolSpec = name.parse().expect("known protocol");
        for ring_spec in RINGS {
            let ring = Ring::parse(ring_spec).expect("known ring");
            if !spec.supports(&ring, &params) {
                continue;
            }
            pairs += 1;
            match bench(&spec, ring_spec, &params, 200, 1, false) {
                Ok(row) if row.correctness_pass_rate == 1.0 => {}
                Ok(row) => bad.push(format!("{name}@{ring_spec}: {}", row.correctness_pass_rate)),
                Err(e) => bad.push(format!("{name}@{ring_spec}: {e}")),
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = bad.is_empty() && secs < 60.0;
    verdict(1, TITLE, pass, format!("{pairs} pairs x 200 trials in {secs:.1}s; failures {bad:?}"))
}

/// Exact distance of the public encoding from uniform over Z_2.
pub fn criterion_2() -> Verdict {
    const TITLE: &str = "statistical hiding";
    let ring = Ring::zm(2).expect("ring");
    let mut o = ring.oracle(0);
    let (zero, one) = (o.zero(), o.one());
    let mut ds = Vec::new();
    let mut pass = true;
    for n in 2..=5 {
        let d0 = match stat_distance_bruteforce(&mut o, n, &zero) {
            Ok(d) => d,
            Err(e) => return failed(2, TITLE, e),
        };
        let d1 = match stat_distance_bruteforce(&mut o, n, &one) {
            Ok(d) => d,
            Err(e) => return failed(2, TITLE, e),
        };
        // d <= 2^{-(n-1)/2}  <=>  d^2 * 2^{n-1} <= 1
        let scaled = &d0 * &d0 * BigRational::from_integer(BigInt::from(1u64 << (n - 1)));
        pass &= d0 == d1 && scaled <= BigRational::one();
        if let Some(prev) = ds.last() {
            pass &= d0 < *prev;
        }
        ds.push(d0);
    }
    let shown: Vec<String> = ds.iter().map(ToString::to_string).collect();
    verdict(2, TITLE, pass, format!("n=2..5 distances {}", shown.join(", ")))
}

/// `H·G|_L = I` for the linear codes and the Reed–Solomon decoding contract.
pub fn criterion_3() -> Verdict {
    const TITLE: &str = "decoding identities";
    let gf97 = Ring::prime_field(97).expect("ring");
    let z6 = Ring::zm(6).expect("ring");
    let (mut rand_ok, mut ring_ok, mut rs_ok, mut inverts) = (0, 0, 0, 0);
    for seed in 0..100 {
        let mut o = gf97.oracle(seed);
        if let Ok(code) = gen_rand_code(&mut o, 8) {
            let gl = code.g.select_rows(&code.l);
            rand_ok += code.h.mul(&mut o, &gl).map(|m| m.is_identity(&mut o)).unwrap_or(false) as usize;
        }

        let mut o = z6.oracle(seed);
        if let Ok(code) = gen_ring_code(&mut o, 8) {
            inverts += o.counter().calls_of(Command::Invert);
            let gl = code.g.select_rows(&code.l);
            ring_ok += code.h.mul(&mut o, &gl).map(|m| m.is_identity(&mut o)).unwrap_or(false) as usize;
        }

        let mut o = gf97.oracle(seed);
        rs_ok += rs_contract(&mut o).unwrap_or(false) as usize;
    }
    let pass = rand_ok == 100 && ring_ok == 100 && rs_ok == 100 && inverts == 0;
    verdict(
        3,
        TITLE,
        pass,
        format!("G_Rand {rand_ok}/100, G_Ring {ring_ok}/100 ({inverts} invert calls), RS {rs_ok}/100"),
    )
}

fn rs_contract(o: &mut bbmpc::RingOracle) -> Result<bool, Error> {
    let (k, c) = (8, 8);
    let code = gen_rs_code(o, k, c, EvalPoints::Random)?;
    let (xs, ys) = code.eval_points.clone().ok_or_else(|| Error::param("no evaluation points"))?;
    let q = o.sample_vec(2 * (k - 1) + 1);
    let v: Vec<Label> = ys.iter().map(|y| eval_poly(o, &q, y)).collect::<Result<_, _>>()?;
    let got = code.decode_at(o, &code.restrict(&v))?;
    let want: Vec<Label> = xs.iter().map(|x| eval_poly(o, &q, x)).collect::<Result<_, _>>()?;
    Ok(got == want)
}

/// Elements per product of the packed protocol at k=8, c=8, t=4.
pub fn criterion_4() -> Verdict {
    const TITLE: &str = "amortized communication of tau";
    let ring = Ring::prime_field(97).expect("ring");
    let params = ProtocolParams { t: Some(4), ..ProtocolParams::default() };
    let mut per: Vec<u64> = Vec::new();
    let mut all_correct = true;
    for i in 0..20 {
        match run_trial(&ProtocolSpec::Tau, &ring, &params, trial_seed(4, i)) {
            Ok(r) => {
                all_correct &= r.correct;
                let total = r.stats.total_elements();
                per.push(if total % r.products as u64 == 0 { total / r.products as u64 } else { u64::MAX });
            }
            Err(e) => return failed(4, TITLE, e),
        }
    }
    let pass = all_correct && per.iter().all(|&p| p == 32);
    verdict(4, TITLE, pass, format!("elements per product over 20 trials: {:?}", dedup(&per)))
}

fn dedup(v: &[u64]) -> Vec<u64> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Worst-case blinding distance of the Paillier-based protocol.
pub fn criterion_5() -> Verdict {
    const TITLE: &str = "blinding bound";
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for k in 2..=4 {
        match blinding_distance_worst(3, k) {
            Ok((d, arg)) => {
                let bound = BigRational::new(BigInt::one(), BigInt::one() << k);
                pass &= d <= bound;
                parts.push(format!("k={k}: {d} <= {bound} at {arg:?}"));
            }
            Err(e) => return failed(5, TITLE, e),
        }
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 10.0;
    verdict(5, TITLE, pass, format!("{} ({secs:.2}s)", parts.join("; ")))
}

/// Outcome of the packed-sharing enumeration at one field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrivacyReport {
    pub pairs: usize,
    pub dependent_pairs: Vec<(usize, usize)>,
    pub subsets: usize,
    pub failed_subsets: usize,
}

impl PrivacyReport {
    pub fn holds(&self) -> bool {
        self.dependent_pairs.is_empty() && self.failed_subsets == 0
    }
}

/// Enumerates every pair of servers and every `δ+1` subset for `n=8, ℓ=2, δ=3`. `params`
/// comes from [`PackedParams::literal`] so that the points are used as given, even when they
/// collide mod a small field.
pub fn packed_privacy(ring: &Ring) -> Result<PrivacyReport, Error> {
    let (n, ell, delta) = (8, 2, 3);
    let mut o = ring.oracle(6);
    let p = PackedParams::literal(&mut o, n, ell, delta)?;
    let elems = ring.elements().ok_or_else(|| Error::param("ring too large to enumerate"))?;
    let blocks: Vec<Vec<Label>> = vec![
        vec![elems[0].clone(), elems[0].clone()],
        vec![elems[1].clone(), elems[2].clone()],
        vec![elems[elems.len() - 1].clone(), elems[1].clone()],
    ];
    let mut report = PrivacyReport { pairs: 0, dependent_pairs: Vec::new(), subsets: 0, failed_subsets: 0 };
    for i in 0..n {
        for j in i + 1..n {
            report.pairs += 1;
            let dists: Vec<_> = blocks
                .iter()
                .map(|b| share_distribution(&mut o, &p, b, delta, &[i, j]))
                .collect::<Result<_, _>>()?;
            if dists.iter().any(|d| *d != dists[0]) {
                report.dependent_pairs.push((i + 1, j + 1));
            }
        }
    }
    for mask in 0u32..1 << n {
        if mask.count_ones() as usize != delta + 1 {
            continue;
        }
        report.subsets += 1;
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let ok = blocks.iter().all(|b| {
            let shares = p.share(&mut o, b, delta);
            shares
                .and_then(|s| {
                    let vals: Vec<Label> = idx.iter().map(|&i| s[i].clone()).collect();
                    p.reconstruct_subset(&mut o, &idx, &vals)
                })
                .is_ok_and(|got| got == *b)
        });
        report.failed_subsets += !ok as usize;
    }
    Ok(report)
}

/// Trials in which a single corrupted share is caught by the degree check at GF(97).
pub fn corruption_detection(trials: u64) -> Result<u64, Error> {
    let ring = Ring::prime_field(97)?;
    let mut o = ring.oracle(66);
    let p = PackedParams::new(&mut o, 8, 2, 3)?;
    let mut caught = 0;
    for _ in 0..trials {
        let block = o.sample_vec(2);
        let mut shares = p.share(&mut o, &block, 3)?;
        let j = rand::Rng::gen_range(o.rng(), 0..8);
        let mut off = o.sample();
        while off == o.zero() {
            off = o.sample();
        }
        shares[j] = o.add(&shares[j], &off)?;
        if let Err(Error::Abort(a)) = p.reconstruct(&mut o, &shares, 3) {
            caught += (a.stage == "degree-check") as u64;
        }
    }
    Ok(caught)
}

/// Packed sharing at GF(5), n=8, ℓ=2, δ=3. Only five points exist, so shares land on secret
/// points and privacy fails; GF(11) is reported alongside and the corruption part runs at GF(97).
pub fn criterion_6() -> Verdict {
    const TITLE: &str = "packed privacy and reconstruction";
    let run = || -> Result<(PrivacyReport, PrivacyReport, u64), Error> {
        Ok((
            packed_privacy(&Ring::prime_field(5)?)?,
            packed_privacy(&Ring::prime_field(11)?)?,
            corruption_detection(10_000)?,
        ))
    };
    match run() {
        Ok((gf5, gf11, caught)) => verdict(
            6,
            TITLE,
            gf5.holds() && caught == 10_000,
            format!(
                "GF(5): {} of {} pairs depend on the block {:?}, {} of {} subsets fail to reconstruct; \
                 GF(11): {} dependent pairs, {} failed subsets; GF(97) corruption caught {caught}/10000",
                gf5.dependent_pairs.len(),
                gf5.pairs,
                gf5.dependent_pairs,
                gf5.failed_subsets,
                gf5.subsets,
                gf11.dependent_pairs.len(),
                gf11.failed_subsets,
            ),
        ),
        Err(e) => failed(6, TITLE, e),
    }
}

fn committee_session(ring: &Ring, n: usize, seed: u64) -> (Session, Vec<usize>) {
    let mut names = vec!["Alice".to_string(), "Bob".to_string()];
    names.extend((1..=n).map(|j| format!("S{j}")));
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let mut s = Session::new(ring, &refs, seed);
    s.set_track_views(false);
    (s, (2..2 + n).collect())
}

/// Rejection counts `(membership, typewise, inner-product)` for a single violated constraint,
/// and honest acceptance counts, over `trials` challenges each.
pub fn soundness_counts(trials: u64) -> Result<([u64; 3], [u64; 3]), Error> {
    let ring = Ring::prime_field(97)?;
    let mut o = ring.oracle(7);
    let p = PackedParams::new(&mut o, 16, 4, 5)?;
    let degrees = [5, 5, 10, 10];
    let pattern = ReplicationPattern {
        equal: vec![((0, 0), (1, 2)), ((0, 3), (2, 3)), ((2, 1), (3, 1))],
        zero: vec![(1, 3)],
    };
    let per_trial = |seed: u64| -> Result<([bool; 3], [bool; 3]), Error> {
        let mut o = ring.oracle(trial_seed(70, seed as usize));
        let zero = o.zero();
        let mut plain: Vec<Vec<Label>> = (0..4).map(|_| o.sample_vec(4)).collect();
        plain[1][2] = plain[0][0].clone();
        plain[2][3] = plain[0][3].clone();
        plain[3][1] = plain[2][1].clone();
        plain[1][3] = zero.clone();
        let share = |o: &mut bbmpc::RingOracle, blocks: &[Vec<Label>]| -> Result<Vec<Vec<Label>>, Error> {
            blocks.iter().zip(&degrees).map(|(b, &d)| p.share(o, b, d)).collect()
        };
        let honest = share(&mut o, &plain)?;
        let mut bent = plain.clone();
        let one = o.one();
        bent[3][1] = o.add(&bent[3][1], &one)?;
        let violated = share(&mut o, &bent)?;

        // a degree-5 vector with one share off by one, claimed consistently by the dealer
        let v = p.share(&mut o, &plain[0], 5)?;
        let mut w = v.clone();
        w[9] = o.add(&w[9], &one)?;
        let space = LinearSpace::degree(5);

        let mut rejected = [false; 3];
        let mut accepted = [false; 3];
        for (good, out) in [(true, &mut accepted), (false, &mut rejected)] {
            let (mut s, servers) = committee_session(&ring, 16, seed);
            let c = Committee { params: &p, servers: &servers, coins: CoinSource::Public };
            let held = if good { vec![vec![v.clone()]] } else { vec![vec![w.clone()]] };
            let r = prove_membership(&mut s, &c, 0, &space, &held, &held, "membership");
            out[0] = r.is_ok() == good;
            for (m, mode) in
                [ReplicationMode::Typewise, ReplicationMode::InnerProduct].into_iter().enumerate()
            {
                let (mut s, servers) = committee_session(&ring, 16, seed);
                let c = Committee { params: &p, servers: &servers, coins: CoinSource::Public };
                let blocks = if good { &honest } else { &violated };
                let r = verify_replication(
                    &mut s,
                    &c,
                    0,
                    &degrees,
                    blocks,
                    blocks,
                    &pattern,
                    mode,
                    "replication",
                );
                out[m + 1] = r.is_ok() == good;
            }
        }
        Ok((rejected, accepted))
    };
    let results: Vec<([bool; 3], [bool; 3])> =
        (0..trials).into_par_iter().map(per_trial).collect::<Result<_, _>>()?;
    let mut rej = [0u64; 3];
    let mut acc = [0u64; 3];
    for (r, a) in results {
        for i in 0..3 {
            rej[i] += r[i] as u64;
            acc[i] += a[i] as u64;
        }
    }
    Ok((rej, acc))
}

/// Membership and replication proofs reject a single violation at rate >= 1 - 2/97.
pub fn criterion_7() -> Verdict {
    const TITLE: &str = "membership and replication soundness";
    let trials = 10_000u64;
    match soundness_counts(trials) {
        Ok((rej, acc)) => {
            let floor = trials as f64 * (1.0 - 2.0 / 97.0);
            let pass = rej.iter().all(|&r| r as f64 >= floor) && acc.iter().all(|&a| a == trials);
            verdict(
                7,
                TITLE,
                pass,
                format!(
                    "rejected membership/typewise/inner-product {rej:?} of {trials} (floor {floor:.0}); honest accepted {acc:?}"
                ),
            )
        }
        Err(e) => failed(7, TITLE, e),
    }
}

const BACKENDS: &[&str] = &["rho", "sigma-rand", "sigma-ring", "tau", "theta", "psi", "wrapped-rho"];

/// Shared and outer-protocol evaluation agree with plain evaluation.
pub fn criterion_8() -> Verdict {
    const TITLE: &str = "oracle equivalence";
    let start = Instant::now();
    let ring = Ring::zm(97).expect("ring");
    let params = ProtocolParams::default();
    let mut bad = Vec::new();
    for name in BACKENDS {
        let spec: ProtocolSpec = name.parse().expect("known backend");
        let ok = (0..100u64)
            .into_par_iter()
            .map(|i| -> Result<bool, Error> {
                let mut rng = ChaCha20Rng::seed_from_u64(trial_seed(8, i as usize));
                let cs = RandomCircuitSpec {
                    inputs_per_party: 4,
                    gates: rand::Rng::gen_range(&mut rng, 1..=64),
                    max_mult_depth: 6,
                    outputs: 4,
                    allow_one: true,
                };
                let c = random_circuit(&mut rng, cs);
                let inputs = random_inputs(&c, &mut ring.oracle(i));
                let want = eval_plain(&c, &inputs, &mut ring.oracle(0))?;
                let mut backend = build_backend(&spec, &ring, &params)?;
                let mut s = Session::two_party(&ring, i);
                let got = eval_shared(&mut s, &c, &inputs, backend.as_mut())?;
                Ok(got == want && c.gate_count() <= 64 && c.mult_depth() <= 6)
            })
            .filter(|r| matches!(r, Ok(true)))
            .count();
        if ok != 100 {
            bad.push(format!("{name}: {ok}/100"));
        }
    }
    let gf = Ring::prime_field(97).expect("ring");
    let params = PackedParams::new(&mut gf.oracle(0), 16, 4, 5).expect("params");
    let outer_ok = (0..50u64)
        .into_par_iter()
        .filter(|&i| {
            let mut rng = ChaCha20Rng::seed_from_u64(trial_seed(88, i as usize));
            let c = random_layered_circuit(&mut rng, 8, 3, 0.5);
            let inputs = random_inputs(&c, &mut gf.oracle(i));
            let want = eval_plain(&c, &inputs, &mut gf.oracle(0));
            let rep = run_outer_protocol(&gf, &c, &inputs, &params, &OuterOptions::default(), i);
            matches!((want, rep), (Ok(w), Ok(r)) if r.outcome == Outcome::Done(w.clone()))
        })
        .count();
    let secs = start.elapsed().as_secs_f64();
    let pass = bad.is_empty() && outer_ok == 50 && secs < 300.0;
    verdict(
        8,
        TITLE,
        pass,
        format!(
            "{} backends x 100 circuits, mismatches {bad:?}; outer protocol {outer_ok}/50; {secs:.1}s",
            BACKENDS.len()
        ),
    )
}

/// Outer-protocol communication is affine in the circuit size at fixed depth.
pub fn criterion_9() -> Verdict {
    const TITLE: &str = "communication scaling";
    let ring = Ring::prime_field(97).expect("ring");
    let params = PackedParams::new(&mut ring.oracle(0), 16, 4, 5).expect("params");
    match outer_scaling(&ring, &params, &[64, 128, 256], 4, 9) {
        Ok(points) => {
            let xs: Vec<f64> = points.iter().map(|p| p.gates as f64).collect();
            let ys: Vec<f64> = points.iter().map(|p| p.elements as f64).collect();
            let (c1, c0, worst) = affine_fit(&xs, &ys);
            let pass = worst < 0.1 && points.iter().all(|p| p.correct);
            let shown: Vec<String> = points.iter().map(|p| format!("{}->{}", p.gates, p.elements)).collect();
            verdict(
                9,
                TITLE,
                pass,
                format!(
                    "{}; fit {c1:.2}*s + {c0:.1}, worst residual {:.2}%",
                    shown.join(", "),
                    worst * 100.0
                ),
            )
        }
        Err(e) => failed(9, TITLE, e),
    }
}

/// Example inputs for the determinism check, written under `dir`.
pub fn write_fixtures(dir: &Path) -> std::io::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let circuit = dir.join("dot.circ");
    std::fs::write(
        &circuit,
        "RING gf:97\nINPUT A a1\nINPUT A a2\nINPUT B b1\nINPUT B b2\n\
         MUL p1 a1 b1\nMUL p2 a2 b2\nADD s p1 p2\nMUL t s s\nOUTPUT A s\nOUTPUT B t\n",
    )?;
    let inputs = dir.join("dot.json");
    std::fs::write(&inputs, r#"{"a1": 3, "a2": 5, "b1": 7, "b2": 11}"#)?;
    Ok((circuit, inputs))
}

/// Argument lists exercising every subcommand.
pub fn sample_invocations(circuit: &Path, inputs: &Path) -> Vec<Vec<String>> {
    let c = circuit.display().to_string();
    let i = inputs.display().to_string();
    let lines = [
        "run --protocol tau --ring gf:97",
        "run --protocol multiparty-3-rho --ring zm:6 --seed 5",
        "bench --protocol rho,sigma-ring,theta --ring zm:6,mat:5:2 --trials 10 --jobs 4",
        "distance stat --ring zm:2 --n 4 --x 1",
        "distance psi --M 3 --k 2",
        "codes gen --scheme ring --ring zm:6 --k 4",
        "codes gen --scheme rs --ring gf:97 --k 4 --c 5",
        "pdtshr --protocol psi --ring zm:97 --a 12 --b 40",
    ];
    let mut out: Vec<Vec<String>> = lines
        .iter()
        .map(|l| std::iter::once("bbmpc").chain(l.split(' ')).map(String::from).collect())
        .collect();
    let with_files = [
        vec!["eval", "--circuit", &c, "--inputs", &i, "--backend", "tau"],
        vec!["outer", "--circuit", &c, "--inputs", &i, "--seed", "3"],
        vec!["outer", "--circuit", &c, "--corrupt", "product-to-alice:1:4:0:1"],
    ];
    out.extend(with_files.into_iter().map(|v| std::iter::once("bbmpc").chain(v).map(String::from).collect()));
    out
}

/// Repeated invocations give byte-identical output, in process and, when `bin` is given, as
/// separate processes.
pub fn criterion_10(bin: Option<&Path>, scratch: &Path) -> Verdict {
    const TITLE: &str = "determinism";
    let (circuit, inputs) = match write_fixtures(scratch) {
        Ok(f) => f,
        Err(e) => return verdict(10, TITLE, false, format!("cannot write fixtures: {e}")),
    };
    let invocations = sample_invocations(&circuit, &inputs);
    let mut differing = Vec::new();
    let mut nonzero = Vec::new();
    for args in &invocations {
        let a = crate::run(args.clone());
        let b = crate::run(args.clone());
        if a != b {
            differing.push(args[1..].join(" "));
        }
        if a.code != 0 {
            nonzero.push(format!("{} -> {}", args[1..].join(" "), a.code));
        }
        if let Some(bin) = bin {
            let outs: Vec<_> = (0..2).map(|_| Proc::new(bin).args(&args[1..]).output()).collect();
            match (&outs[0], &outs[1]) {
                (Ok(x), Ok(y)) if x.stdout == y.stdout && x.stdout == a.stdout => {}
                _ => differing.push(format!("process: {}", args[1..].join(" "))),
            }
        }
    }
    let pass = differing.is_empty() && nonzero.is_empty();
    verdict(
        10,
        TITLE,
        pass,
        format!(
            "{} invocations{}; differing {differing:?}; nonzero exits {nonzero:?}",
            invocations.len(),
            if bin.is_some() { " (in process and spawned)" } else { "" }
        ),
    )
}
