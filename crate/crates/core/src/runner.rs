//! Seeded trials of the product-sharing protocols and the aggregate report rows the command
//! line prints.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{random_inputs, random_layered_circuit};
use crate::codes::CodeScheme;
use crate::error::{Error, Result};
use crate::homenc::MockHe;
use crate::homenc::{Psi, Theta};
use crate::ot::{CommStats, Outcome, Session};
use crate::outer::{run_outer_protocol, OuterOptions};
use crate::packed::PackedParams;
use crate::pdtshr::{multiparty_product_share, rho_default_n, ProductSharing, Rho, Sigma, Tau, Wrapped};
use crate::ring::{Family, Label, Ring};

/// A product-sharing protocol by name: `rho`, `sigma-rand`, `sigma-ring`, `sigma-slwalk`,
/// `tau`, `theta`, `psi`, `wrapped-<inner>`, `multiparty-<m>-<inner>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProtocolSpec {
    Rho,
    Sigma(CodeScheme),
    Tau,
    Theta,
    Psi,
    Wrapped(Box<ProtocolSpec>),
    Multiparty(usize, Box<ProtocolSpec>),
}

impl FromStr for ProtocolSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<ProtocolSpec> {
        if let Some(inner) = s.strip_prefix("wrapped-") {
            return Ok(ProtocolSpec::Wrapped(Box::new(inner.parse()?)));
        }
        if s == "multiparty" {
            return Ok(ProtocolSpec::Multiparty(3, Box::new(ProtocolSpec::Rho)));
        }
        if let Some(rest) = s.strip_prefix("multiparty-") {
            let (m, inner) = rest
                .split_once('-')
                .ok_or_else(|| Error::param(format!("expected multiparty-<m>-<inner>, got {s:?}")))?;
            let m: usize = m.parse().map_err(|_| Error::param(format!("bad party count in {s:?}")))?;
            if m < 2 {
                return Err(Error::param("multiparty needs at least 2 parties"));
            }
            return Ok(ProtocolSpec::Multiparty(m, Box::new(inner.parse()?)));
        }
        Ok(match s {
            "rho" => ProtocolSpec::Rho,
            "sigma-rand" => ProtocolSpec::Sigma(CodeScheme::Rand),
            "sigma-ring" => ProtocolSpec::Sigma(CodeScheme::Ring),
            "sigma-slwalk" => ProtocolSpec::Sigma(CodeScheme::Slwalk),
            "tau" => ProtocolSpec::Tau,
            "theta" => ProtocolSpec::Theta,
            "psi" => ProtocolSpec::Psi,
            _ => return Err(Error::param(format!("unknown protocol {s:?}"))),
        })
    }
}

impl fmt::Display for ProtocolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolSpec::Rho => f.write_str("rho"),
            ProtocolSpec::Sigma(CodeScheme::Rand) => f.write_str("sigma-rand"),
            ProtocolSpec::Sigma(CodeScheme::Ring) => f.write_str("sigma-ring"),
            ProtocolSpec::Sigma(CodeScheme::Slwalk) => f.write_str("sigma-slwalk"),
            ProtocolSpec::Sigma(CodeScheme::Rs) => f.write_str("sigma-rs"),
            ProtocolSpec::Tau => f.write_str("tau"),
            ProtocolSpec::Theta => f.write_str("theta"),
            ProtocolSpec::Psi => f.write_str("psi"),
            ProtocolSpec::Wrapped(inner) => write!(f, "wrapped-{inner}"),
            ProtocolSpec::Multiparty(m, inner) => write!(f, "multiparty-{m}-{inner}"),
        }
    }
}

impl ProtocolSpec {
    /// Whether the protocol is defined over `ring` with `params`.
    pub fn supports(&self, ring: &Ring, params: &ProtocolParams) -> bool {
        match self {
            ProtocolSpec::Rho | ProtocolSpec::Theta => true,
            ProtocolSpec::Sigma(CodeScheme::Rand) => {
                ring.is_commutative() && (ring.is_field() || ring.is_pseudo_field())
            }
            ProtocolSpec::Sigma(CodeScheme::Rs) => false,
            ProtocolSpec::Sigma(_) => ring.is_commutative(),
            ProtocolSpec::Tau => {
                let need = (params.c * params.k + params.k + params.check_points) as u128;
                ring.is_commutative()
                    && (ring.is_field() || ring.is_pseudo_field())
                    && ring.order().is_none_or(|q| q >= need)
            }
            ProtocolSpec::Psi => ring.uses_standard_labels(),
            ProtocolSpec::Wrapped(inner) | ProtocolSpec::Multiparty(_, inner) => inner.supports(ring, params),
        }
    }
}

/// Knobs shared by all protocols; each protocol reads the ones it uses.
#[derive(Debug, Clone, Serialize)]
pub struct ProtocolParams {
    /// Statistical parameter (`rho`, `psi`) or code dimension (`sigma`, `tau`).
    pub k: usize,
    /// Reed–Solomon expansion for `tau`.
    pub c: usize,
    /// Products per `tau` call; `k/2` when unset.
    pub t: Option<usize>,
    /// Transfers per `rho` call; `⌈log2 |R|⌉ + k` when unset.
    pub n: Option<usize>,
    /// Extra positions `B` checks in `tau`.
    pub check_points: usize,
    /// Security parameter passed to the homomorphic schemes.
    pub security: u32,
}

impl Default for ProtocolParams {
    fn default() -> Self {
        ProtocolParams { k: 8, c: 8, t: None, n: None, check_points: 0, security: 40 }
    }
}

/// Builds a two-party backend. Multiparty specs are not backends.
pub fn build_backend(
    spec: &ProtocolSpec,
    ring: &Ring,
    p: &ProtocolParams,
) -> Result<Box<dyn ProductSharing>> {
    Ok(match spec {
        ProtocolSpec::Rho => Box::new(Rho::new(p.n.unwrap_or_else(|| rho_default_n(ring, p.k)))),
        ProtocolSpec::Sigma(scheme) => Box::new(Sigma::new(*scheme, p.k)),
        ProtocolSpec::Tau => Box::new(Tau::with_t(p.k, p.c, p.t.unwrap_or(p.k / 2)).strict(p.check_points)),
        ProtocolSpec::Theta => Box::new(Theta::new(MockHe, p.security)),
        ProtocolSpec::Psi => Box::new(Psi::new(p.k as u32)),
        ProtocolSpec::Wrapped(inner) => Box::new(Wrapped::new(build_backend(inner, ring, p)?)),
        ProtocolSpec::Multiparty(..) => {
            return Err(Error::param("a multiparty protocol is not a two-party backend"))
        }
    })
}

/// One honest run on random inputs.
#[derive(Debug, Clone, Serialize)]
pub struct TrialResult {
    pub correct: bool,
    pub products: usize,
    pub stats: CommStats,
    pub backend: String,
}

/// A full-width call of the protocol (or one multiparty product) on inputs drawn from `seed`,
/// checked against the oracle. An abort counts as incorrect.
pub fn run_trial(
    spec: &ProtocolSpec,
    ring: &Ring,
    params: &ProtocolParams,
    seed: u64,
) -> Result<TrialResult> {
    run_trial_session(spec, ring, params, seed).map(|(r, _)| r)
}

/// [`run_trial`], also returning the session for its transcript.
pub fn run_trial_session(
    spec: &ProtocolSpec,
    ring: &Ring,
    params: &ProtocolParams,
    seed: u64,
) -> Result<(TrialResult, Session)> {
    let mut check = ring.oracle(seed ^ 0x5eed_c0de);
    if let ProtocolSpec::Multiparty(m, inner) = spec {
        let mut backend = build_backend(inner, ring, params)?;
        let names: Vec<String> = (1..=*m).map(|i| format!("P{i}")).collect();
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut s = Session::new(ring, &refs, seed);
        let x = check.sample_vec(*m);
        let y = check.sample_vec(*m);
        let res = multiparty_product_share(&mut s, backend.as_mut(), &x, &y);
        let correct = match Outcome::from_result(res, "multiparty")? {
            Outcome::Done(c) => {
                let (sx, sy) = (check.sum(&x)?, check.sum(&y)?);
                check.sum(&c)? == check.mul(&sx, &sy)?
            }
            Outcome::Aborted(_) => false,
        };
        let r = TrialResult {
            correct,
            products: 1,
            stats: s.stats(),
            backend: format!("multiparty(m={m},{})", backend.name()),
        };
        return Ok((r, s));
    }
    let mut backend = build_backend(spec, ring, params)?;
    let w = backend.width();
    let a = check.sample_vec(w);
    let b = check.sample_vec(w);
    let mut s = Session::two_party(ring, seed);
    let res = backend.share(&mut s, 0, 1, &a, &b);
    let correct = match Outcome::from_result(res, "pdtshr")? {
        Outcome::Done((za, zb)) => (0..w).all(|i| {
            let sum = check.add(&za[i], &zb[i]);
            let prod = check.mul(&a[i], &b[i]);
            matches!((sum, prod), (Ok(x), Ok(y)) if x == y)
        }),
        Outcome::Aborted(_) => false,
    };
    let r = TrialResult { correct, products: w, stats: s.stats(), backend: backend.name() };
    Ok((r, s))
}

/// Seed of trial `i` in a run seeded with `seed`.
pub fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64)
}

/// Aggregate of `trials` runs, per-trial means. Column order is the CSV layout.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BenchRow {
    pub protocol: String,
    pub ring: String,
    pub params: String,
    pub trials: usize,
    /// Ring elements in messages plus ring elements fed into OT, per trial.
    pub elements_transmitted: f64,
    pub elements_per_product: f64,
    pub oracle_calls: f64,
    pub ot_invocations: f64,
    pub rounds: f64,
    /// Only filled when timing is requested; it is the one nondeterministic column.
    pub wall_time_ms: Option<f64>,
    pub correctness_pass_rate: f64,
}

/// Runs `trials` independent trials on the rayon pool and aggregates them.
pub fn bench(
    spec: &ProtocolSpec,
    ring_spec: &str,
    params: &ProtocolParams,
    trials: usize,
    seed: u64,
    timing: bool,
) -> Result<BenchRow> {
    let ring = Ring::parse(ring_spec)?;
    if trials == 0 {
        return Err(Error::param("need at least one trial"));
    }
    if !spec.supports(&ring, params) {
        return Err(Error::param(format!("{spec} is not defined over {ring_spec}")));
    }
    let start = Instant::now();
    let results: Vec<TrialResult> = (0..trials)
        .into_par_iter()
        .map(|i| run_trial(spec, &ring, params, trial_seed(seed, i)))
        .collect::<Result<_>>()?;
    let elapsed = start.elapsed().as_secs_f64() * 1000.0;
    let n = trials as f64;
    let mean = |f: &dyn Fn(&TrialResult) -> u64| results.iter().map(f).sum::<u64>() as f64 / n;
    let elements = mean(&|r| r.stats.total_elements());
    let products = mean(&|r| r.products as u64);
    Ok(BenchRow {
        protocol: spec.to_string(),
        ring: ring_spec.to_string(),
        params: results[0].backend.clone(),
        trials,
        elements_transmitted: elements,
        elements_per_product: elements / products,
        oracle_calls: mean(&|r| r.stats.oracle_calls),
        ot_invocations: mean(&|r| r.stats.ot_invocations),
        rounds: mean(&|r| r.stats.rounds),
        wall_time_ms: timing.then_some(elapsed),
        correctness_pass_rate: results.iter().filter(|r| r.correct).count() as f64 / n,
    })
}

/// Least-squares line `y ≈ c1·x + c0` and the largest residual relative to `y`.
pub fn affine_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let c1 = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let c0 = my - c1 * mx;
    let worst = xs.iter().zip(ys).map(|(x, y)| ((c1 * x + c0 - y) / y).abs()).fold(0.0, f64::max);
    (c1, c0, worst)
}

/// One point of the outer-protocol scaling experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingPoint {
    pub gates: usize,
    pub depth: usize,
    pub elements: u64,
    pub correct: bool,
}

/// Outer-protocol element counts for strictly layered random circuits with `size` gates spread
/// over `depth` layers.
pub fn outer_scaling(
    ring: &Ring,
    params: &PackedParams,
    sizes: &[usize],
    depth: usize,
    seed: u64,
) -> Result<Vec<ScalingPoint>> {
    use rand::SeedableRng;
    sizes
        .iter()
        .map(|&size| {
            let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(trial_seed(seed, size));
            let c = random_layered_circuit(&mut rng, size / depth.max(1), depth, 0.5);
            let inputs = random_inputs(&c, &mut ring.oracle(seed));
            let want = crate::circuit::eval_plain(&c, &inputs, &mut ring.oracle(0))?;
            let rep = run_outer_protocol(ring, &c, &inputs, params, &OuterOptions::default(), seed)?;
            Ok(ScalingPoint {
                gates: c.gate_count(),
                depth,
                elements: rep.stats.total_elements(),
                correct: rep.outcome == Outcome::Done(want),
            })
        })
        .collect()
}

/// Labels as decimal entries, for reports: `7` for scalars, `[1,2,3,4]` for matrices.
pub fn show_label(ring: &Ring, l: &Label) -> String {
    match ring.decode(l) {
        Ok(v) if matches!(ring.family(), Family::Zm { .. }) => v[0].to_string(),
        Ok(v) => format!("{v:?}").replace(' ', ""),
        Err(_) => format!("invalid:{}", l.to_hex()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn protocol_names_round_trip() {
        for name in [
            "rho",
            "sigma-rand",
            "sigma-ring",
            "tau",
            "theta",
            "psi",
            "wrapped-tau",
            "wrapped-wrapped-rho",
            "multiparty-4-theta",
        ] {
            let p: ProtocolSpec = name.parse().unwrap();
            assert_eq!(p.to_string(), name);
        }
        assert!("nope".parse::<ProtocolSpec>().is_err());
        assert!("multiparty-1-rho".parse::<ProtocolSpec>().is_err());
    }

    #[test]
    fn tau_bench_row() {
        let params = ProtocolParams { t: Some(4), ..Default::default() };
        let row = bench(&ProtocolSpec::Tau, "gf:97", &params, 5, 1, false).unwrap();
        assert_eq!(row.elements_per_product, 32.0);
        assert_eq!(row.correctness_pass_rate, 1.0);
        assert_eq!(row.wall_time_ms, None);
        let again = bench(&ProtocolSpec::Tau, "gf:97", &params, 5, 1, false).unwrap();
        assert_eq!(row, again);
    }

    #[test]
    fn every_protocol_on_z97() {
        let ring = Ring::parse("zm:97").unwrap();
        let params = ProtocolParams::default();
        for name in
            ["rho", "sigma-rand", "sigma-ring", "tau", "theta", "psi", "wrapped-rho", "multiparty-3-rho"]
        {
            let spec: ProtocolSpec = name.parse().unwrap();
            assert!(spec.supports(&ring, &params), "{name}");
            for seed in 0..3 {
                assert!(run_trial(&spec, &ring, &params, seed).unwrap().correct, "{name}");
            }
        }
    }

    #[test]
    fn fit_of_exact_line() {
        let (c1, c0, r) = affine_fit(&[1.0, 2.0, 4.0], &[5.0, 7.0, 11.0]);
        assert!((c1 - 2.0).abs() < 1e-12 && (c0 - 3.0).abs() < 1e-12 && r < 1e-12);
    }
}
