//! Noisy encodings.
//!
//! Two families live here:
//!
//! * the statistically hiding encoding, which splits `x` into `n` additive shares and hides each
//!   share in one of two slots ([`stat_encode`]);
//! * linear-code encodings, where a codeword `Gu` is published with every coordinate outside a
//!   secret set `L` replaced by a uniform element ([`noisy_encode`]). The code generators are
//!   [`gen_rand_code`], [`gen_ring_code`], [`gen_rs_code`] and [`gen_slwalk_code`].

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{all_distinct, int_points, lagrange_matrix, Matrix};
use crate::ring::{Label, RingOracle};

/// Output of the statistical encoding: `Σ_i v^{σ_i}_i = x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatEncoding {
    pub v0: Vec<Label>,
    pub v1: Vec<Label>,
    pub sigma: Vec<bool>,
}

impl StatEncoding {
    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigma.is_empty()
    }

    pub fn selected(&self, i: usize) -> &Label {
        if self.sigma[i] {
            &self.v1[i]
        } else {
            &self.v0[i]
        }
    }
}

pub fn stat_encode(o: &mut RingOracle, x: &Label, n: usize) -> Result<StatEncoding> {
    if n == 0 {
        return Err(Error::param("encoding length n must be at least 1"));
    }
    let sigma: Vec<bool> = (0..n).map(|_| o.random_bit()).collect();
    let mut u = o.sample_vec(n - 1);
    let partial = o.sum(&u)?;
    u.push(o.sub(x, &partial)?);
    let mut v0 = Vec::with_capacity(n);
    let mut v1 = Vec::with_capacity(n);
    for (ui, &s) in u.into_iter().zip(&sigma) {
        let other = o.sample();
        if s {
            v0.push(other);
            v1.push(ui);
        } else {
            v0.push(ui);
            v1.push(other);
        }
    }
    Ok(StatEncoding { v0, v1, sigma })
}

pub fn stat_reconstruct(enc: &StatEncoding, o: &mut RingOracle) -> Result<Label> {
    if enc.v0.len() != enc.sigma.len() || enc.v1.len() != enc.sigma.len() {
        return Err(Error::param("encoding vectors have different lengths"));
    }
    let mut acc = o.zero();
    for i in 0..enc.len() {
        acc = o.add(&acc, enc.selected(i))?;
    }
    Ok(acc)
}

/// Exact probability of each public part `(v0, v1)` under the encoding of `x`, keyed by the
/// element indices of `v0` followed by those of `v1`.
///
/// `Pr[(v0, v1)] = 2^{-n} |R|^{-(2n-1)} · #{σ : Σ_i v^{σ_i}_i = x}`.
pub fn stat_distribution(o: &mut RingOracle, n: usize, x: &Label) -> Result<HashMap<Vec<u16>, BigRational>> {
    let (elems, add, xi) = enumerable(o, n, x)?;
    let r = elems.len();
    let denom = BigRational::from_integer(
        num_bigint::BigInt::from(2u32).pow(n as u32) * num_bigint::BigInt::from(r).pow(2 * n as u32 - 1),
    );
    let mut out = HashMap::new();
    for_each_pair(r, n, |digits| {
        let c = count_patterns(digits, n, &add, r, xi);
        if c > 0 {
            out.insert(
                digits.iter().map(|&d| d as u16).collect(),
                BigRational::from_integer(c.into()) / &denom,
            );
        }
    });
    Ok(out)
}

/// Exact statistical distance between the public part of the encoding of `x` and the uniform
/// distribution on `R^n × R^n`, by enumeration. Only for `|R| <= 4` and `n <= 5`.
pub fn stat_distance_bruteforce(o: &mut RingOracle, n: usize, x: &Label) -> Result<BigRational> {
    let (elems, add, xi) = enumerable(o, n, x)?;
    let r = elems.len();
    let total = num_bigint::BigInt::from(r).pow(2 * n as u32);
    let uniform = BigRational::new(One::one(), total.clone());
    let per_pattern = BigRational::new(
        One::one(),
        num_bigint::BigInt::from(2u32).pow(n as u32) * num_bigint::BigInt::from(r).pow(2 * n as u32 - 1),
    );
    // Group outcomes by their pattern count: the distance only depends on how many pairs have
    // each count.
    let mut by_count: HashMap<u64, u64> = HashMap::new();
    for_each_pair(r, n, |digits| {
        *by_count.entry(count_patterns(digits, n, &add, r, xi)).or_default() += 1;
    });
    let mut sum = BigRational::zero();
    for (c, mult) in by_count {
        let p = &per_pattern * BigRational::from_integer(c.into());
        sum += (p - &uniform).abs() * BigRational::from_integer(mult.into());
    }
    Ok(sum / BigRational::from_integer(2.into()))
}

type AddTable = Vec<usize>;

fn enumerable(o: &mut RingOracle, n: usize, x: &Label) -> Result<(Vec<Label>, AddTable, usize)> {
    if n == 0 {
        return Err(Error::param("encoding length n must be at least 1"));
    }
    let elems = o
        .ring()
        .elements()
        .filter(|e| e.len() <= 4)
        .ok_or_else(|| Error::param("brute-force distance needs a ring with at most 4 elements"))?;
    if n > 5 {
        return Err(Error::param("brute-force distance supports n <= 5"));
    }
    let index: HashMap<&Label, usize> = elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let r = elems.len();
    let mut add = vec![0usize; r * r];
    for i in 0..r {
        for j in 0..r {
            let s = o.add(&elems[i], &elems[j])?;
            add[i * r + j] = index[&s];
        }
    }
    let xi = *index.get(x).ok_or(Error::InvalidLabel)?;
    let zero = o.zero();
    debug_assert_eq!(index[&zero], 0);
    Ok((elems, add, xi))
}

fn for_each_pair(r: usize, n: usize, mut f: impl FnMut(&[usize])) {
    let mut digits = vec![0usize; 2 * n];
    loop {
        f(&digits);
        let mut i = 0;
        loop {
            if i == digits.len() {
                return;
            }
            digits[i] += 1;
            if digits[i] < r {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

fn count_patterns(digits: &[usize], n: usize, add: &[usize], r: usize, x: usize) -> u64 {
    // number of σ ∈ {0,1}^n with Σ_i v^{σ_i}_i = x, by dynamic programming over partial sums
    let mut ways = vec![0u64; r];
    ways[0] = 1;
    for i in 0..n {
        let mut next = vec![0u64; r];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            next[add[s * r + digits[i]]] += w;
            next[add[s * r + digits[n + i]]] += w;
        }
        ways = next;
    }
    ways[x]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeScheme {
    Rand,
    Ring,
    Rs,
    Slwalk,
}

impl std::str::FromStr for CodeScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rand" => Ok(CodeScheme::Rand),
            "ring" => Ok(CodeScheme::Ring),
            "rs" => Ok(CodeScheme::Rs),
            "slwalk" => Ok(CodeScheme::Slwalk),
            _ => Err(Error::param(format!("unknown code scheme {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalPoints {
    Random,
    /// `x_i = i`, `y_j = k + j`: an arithmetic progression.
    Structured,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeParams {
    pub scheme: CodeScheme,
    pub n: usize,
    pub k: usize,
    /// `|L|`.
    pub ell: usize,
    /// Number of message coordinates the code is meant to carry.
    pub t: usize,
    pub c: Option<usize>,
}

/// `(G, H, L)` plus the evaluation points for Reed–Solomon codes.
///
/// `l` is ordered: row `i` of `G|_L` is row `l[i]` of `G`, and `H` acts on `w_L` in that order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeGenOutput {
    pub params: CodeParams,
    pub g: Matrix,
    pub h: Matrix,
    pub l: Vec<usize>,
    /// `(x_1..x_k, y_1..y_n)` for Reed–Solomon codes.
    pub eval_points: Option<(Vec<Label>, Vec<Label>)>,
}

impl CodeGenOutput {
    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn restrict(&self, w: &[Label]) -> Vec<Label> {
        self.l.iter().map(|&i| w[i].clone()).collect()
    }

    /// `H · w_L`.
    pub fn decode_at(&self, o: &mut RingOracle, w_l: &[Label]) -> Result<Vec<Label>> {
        self.h.mul_vec(o, w_l)
    }

    /// Number of ring elements needed to describe the public part of the code: the points for
    /// Reed–Solomon codes, the full matrix otherwise.
    pub fn description_elements(&self) -> u64 {
        match &self.eval_points {
            Some((x, y)) => (x.len() + y.len()) as u64,
            None => (self.g.rows() * self.g.cols()) as u64,
        }
    }
}

fn require_field(o: &RingOracle, what: &str) -> Result<()> {
    let ring = o.ring();
    if ring.is_field() || ring.is_pseudo_field() {
        Ok(())
    } else {
        Err(Error::param(format!("{what} needs a field or pseudo-field, {} is neither", ring.id().id)))
    }
}

fn random_subset(o: &mut RingOracle, n: usize, size: usize) -> Vec<usize> {
    let mut v = index::sample(o.rng(), n, size).into_vec();
    v.sort_unstable();
    v
}

/// Random linear code over a field: `n = 2k`, `|L| = k`, `H = (G|_L)^{-1}`.
///
/// Tries `k` random subsets `L`; if none gives an invertible `G|_L`, the first `k` rows of `G`
/// are overwritten with the identity and `L = {0..k-1}`.
pub fn gen_rand_code(o: &mut RingOracle, k: usize) -> Result<CodeGenOutput> {
    require_field(o, "the random code generator")?;
    if k == 0 {
        return Err(Error::param("code dimension k must be at least 1"));
    }
    let n = 2 * k;
    let mut g = Matrix::random(o, n, k);
    let mut found = None;
    for _ in 0..k {
        let l = random_subset(o, n, k);
        match g.select_rows(&l).invert(o) {
            Ok(h) => {
                found = Some((l, h));
                break;
            }
            Err(e) if e.is_bottom() => continue,
            Err(e) => return Err(e),
        }
    }
    let (l, h) = match found {
        Some(x) => x,
        None => {
            let id = Matrix::identity(o, k);
            for i in 0..k {
                for j in 0..k {
                    g.set(i, j, id.get(i, j).clone());
                }
            }
            ((0..k).collect(), id)
        }
    };
    Ok(CodeGenOutput {
        params: CodeParams { scheme: CodeScheme::Rand, n, k, ell: k, t: 1, c: None },
        g,
        h,
        l,
        eval_points: None,
    })
}

/// Code for arbitrary rings with identity: `G = [A; B]` with `A`, `B` unit upper triangular,
/// `L = {a_1..a_k}` with `a_i ∈ {i, k+i}`. `H` is obtained by back-substitution and no inverse
/// is ever requested from the oracle.
pub fn gen_ring_code(o: &mut RingOracle, k: usize) -> Result<CodeGenOutput> {
    if k == 0 {
        return Err(Error::param("code dimension k must be at least 1"));
    }
    let zero = o.zero();
    let one = o.one();
    let unit_upper = |o: &mut RingOracle| {
        Matrix::from_fn(k, k, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Less => o.sample(),
            std::cmp::Ordering::Equal => one.clone(),
            std::cmp::Ordering::Greater => zero.clone(),
        })
    };
    let a = unit_upper(o);
    let b = unit_upper(o);
    let mut rows = Vec::with_capacity(2 * k);
    for i in 0..k {
        rows.push(a.row(i).to_vec());
    }
    for i in 0..k {
        rows.push(b.row(i).to_vec());
    }
    let g = Matrix::from_rows(rows)?;
    let l: Vec<usize> = (0..k).map(|i| if o.random_bit() { k + i } else { i }).collect();
    let u = g.select_rows(&l);
    let h = unit_upper_inverse(o, &u)?;
    Ok(CodeGenOutput {
        params: CodeParams { scheme: CodeScheme::Ring, n: 2 * k, k, ell: k, t: 1, c: None },
        g,
        h,
        l,
        eval_points: None,
    })
}

/// `H` with `H·U = I` for unit upper-triangular `U`: `H_ij = -Σ_{i<=m<j} H_im U_mj`.
fn unit_upper_inverse(o: &mut RingOracle, u: &Matrix) -> Result<Matrix> {
    let k = u.rows();
    let mut h = Matrix::identity(o, k);
    for i in 0..k {
        for j in i + 1..k {
            let mut acc = o.zero();
            for m in i..j {
                let p = o.mul(h.get(i, m), u.get(m, j))?;
                acc = o.add(&acc, &p)?;
            }
            let neg = o.neg(&acc)?;
            h.set(i, j, neg);
        }
    }
    Ok(h)
}

/// Reed–Solomon code over a field: `n = c·k`, `|L| = 2k-1`.
///
/// `G` extrapolates the degree `k-1` polynomial through `(x_i, u_i)` to the points `y_j`;
/// `H` maps `v_L` to `Q(x_1..x_k)` for the degree `2(k-1)` polynomial `Q` through
/// `(y_j, v_j)_{j ∈ L}`.
pub fn gen_rs_code(o: &mut RingOracle, k: usize, c: usize, points: EvalPoints) -> Result<CodeGenOutput> {
    gen_rs_code_with_l(o, k, c, points, 2 * k - 1)
}

/// [`gen_rs_code`] with a larger noiseless set: `H` still interpolates on the first `2k-1`
/// points of `L`, the remaining ones are available for consistency checks.
pub fn gen_rs_code_with_l(
    o: &mut RingOracle,
    k: usize,
    c: usize,
    points: EvalPoints,
    ell: usize,
) -> Result<CodeGenOutput> {
    require_field(o, "the Reed-Solomon code generator")?;
    if k == 0 {
        return Err(Error::param("code dimension k must be at least 1"));
    }
    if c <= 4 {
        return Err(Error::param(format!("rate constant c must exceed 4, got {c}")));
    }
    let n = c * k;
    if ell < 2 * k - 1 || ell > n {
        return Err(Error::param(format!("|L| = {ell} outside [2k-1, n]")));
    }
    let needed = (n + k) as u128;
    if o.ring().order().is_some_and(|q| q < needed) {
        return Err(Error::param(format!(
            "field {} has fewer than n + k = {needed} distinct points",
            o.ring().id().id
        )));
    }
    let (xs, ys) = match points {
        EvalPoints::Structured => {
            let all = int_points(o, 1, (n + k) as i64);
            (all[..k].to_vec(), all[k..].to_vec())
        }
        EvalPoints::Random => {
            let mut seen = std::collections::HashSet::new();
            let mut all = Vec::with_capacity(n + k);
            let mut attempts = 0usize;
            while all.len() < n + k {
                attempts += 1;
                if attempts > 64 * (n + k) {
                    return Err(Error::param("could not sample enough distinct points"));
                }
                let p = o.sample();
                if seen.insert(p.clone()) {
                    all.push(p);
                }
            }
            let ys = all.split_off(k);
            (all, ys)
        }
    };
    debug_assert!(all_distinct(&[xs.clone(), ys.clone()].concat()));
    let g = lagrange_matrix(o, &xs, &ys)?;
    let l = random_subset(o, n, ell);
    let interp_points: Vec<Label> = l[..2 * k - 1].iter().map(|&j| ys[j].clone()).collect();
    let h_core = lagrange_matrix(o, &interp_points, &xs)?;
    // pad H with zero columns for the extra check points so that H·w_L keeps its meaning
    let zero = o.zero();
    let h =
        Matrix::from_fn(k, ell, |i, j| if j < 2 * k - 1 { h_core.get(i, j).clone() } else { zero.clone() });
    Ok(CodeGenOutput {
        params: CodeParams { scheme: CodeScheme::Rs, n, k, ell, t: k / 2, c: Some(c) },
        g,
        h,
        l,
        eval_points: Some((xs, ys)),
    })
}

/// Default walk length for [`gen_slwalk_code`]: `16·k²` elementary steps.
pub fn default_walk_length(k: usize) -> usize {
    16 * k * k
}

/// Code from two opposite random walks in `SL(k, R)`.
///
/// Starting from `M = H = I`, each step either adds/subtracts a row of `M` to another row or a
/// column to another column; `H` receives the opposite step from the other side so that
/// `H·M = I` throughout. `M` becomes `G|_L` for a random `L`, the other rows of `G` are uniform.
pub fn gen_slwalk_code(o: &mut RingOracle, k: usize, steps: usize) -> Result<CodeGenOutput> {
    if k == 0 {
        return Err(Error::param("code dimension k must be at least 1"));
    }
    let n = 2 * k;
    let mut m = Matrix::identity(o, k);
    let mut h = Matrix::identity(o, k);
    if k > 1 {
        for _ in 0..steps {
            let a = o.rng().gen_range(0..k);
            let mut b = o.rng().gen_range(0..k - 1);
            if b >= a {
                b += 1;
            }
            let plus = o.random_bit();
            let rows = o.random_bit();
            // E = I ± e_ab.
            if rows {
                // M ← E·M: row_a(M) ±= row_b(M);  H ← H·E^{-1}: col_b(H) ∓= col_a(H)
                for j in 0..k {
                    let x = combine(o, m.get(a, j), m.get(b, j), plus)?;
                    m.set(a, j, x);
                }
                for i in 0..k {
                    let x = combine(o, h.get(i, b), h.get(i, a), !plus)?;
                    h.set(i, b, x);
                }
            } else {
                // M ← M·E: col_b(M) ±= col_a(M);  H ← E^{-1}·H: row_a(H) ∓= row_b(H)
                for i in 0..k {
                    let x = combine(o, m.get(i, b), m.get(i, a), plus)?;
                    m.set(i, b, x);
                }
                for j in 0..k {
                    let x = combine(o, h.get(a, j), h.get(b, j), !plus)?;
                    h.set(a, j, x);
                }
            }
        }
    }
    let l = random_subset(o, n, k);
    let mut rows: Vec<Vec<Label>> = Vec::with_capacity(n);
    let mut next = 0;
    for i in 0..n {
        if next < k && l[next] == i {
            rows.push(m.row(next).to_vec());
            next += 1;
        } else {
            rows.push(o.sample_vec(k));
        }
    }
    Ok(CodeGenOutput {
        params: CodeParams { scheme: CodeScheme::Slwalk, n, k, ell: k, t: 1, c: None },
        g: Matrix::from_rows(rows)?,
        h,
        l,
        eval_points: None,
    })
}

fn combine(o: &mut RingOracle, x: &Label, y: &Label, plus: bool) -> Result<Label> {
    if plus {
        o.add(x, y)
    } else {
        o.sub(x, y)
    }
}

/// Dispatches on `scheme` with default parameters (`c = 8`, random points, `16k²` steps).
pub fn gen_code(o: &mut RingOracle, scheme: CodeScheme, k: usize, c: usize) -> Result<CodeGenOutput> {
    match scheme {
        CodeScheme::Rand => gen_rand_code(o, k),
        CodeScheme::Ring => gen_ring_code(o, k),
        CodeScheme::Rs => gen_rs_code(o, k, c, EvalPoints::Random),
        CodeScheme::Slwalk => gen_slwalk_code(o, k, default_walk_length(k)),
    }
}

/// Public part `(G, v)` and private part `(G, H, L, v)` plus the padded message `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoisyEncoding {
    pub g: Matrix,
    pub v: Vec<Label>,
    pub h: Matrix,
    pub l: Vec<usize>,
    pub u: Vec<Label>,
}

/// Encodes `x` (length `t <= k`): `u` is `x` padded with random elements, `v_i = (Gu)_i` on `L`
/// and uniform elsewhere.
pub fn noisy_encode(code: &CodeGenOutput, o: &mut RingOracle, x: &[Label]) -> Result<NoisyEncoding> {
    let k = code.k();
    if x.len() > k {
        return Err(Error::param(format!("cannot encode {} elements with a dimension-{k} code", x.len())));
    }
    let mut u = x.to_vec();
    u.extend(o.sample_vec(k - x.len()));
    let mut v = o.sample_vec(code.n());
    for &i in &code.l {
        v[i] = crate::linalg::dot(o, code.g.row(i), &u)?;
    }
    Ok(NoisyEncoding { g: code.g.clone(), v, h: code.h.clone(), l: code.l.clone(), u })
}

/// Binary container for a code: little-endian `u32` header (rows, cols) per matrix followed by
/// `u32`-length-prefixed labels, then `|L|` and the indices of `L`.
pub fn code_to_bytes(code: &CodeGenOutput) -> Vec<u8> {
    let mut out = Vec::new();
    for m in [&code.g, &code.h] {
        out.extend_from_slice(&(m.rows() as u32).to_le_bytes());
        out.extend_from_slice(&(m.cols() as u32).to_le_bytes());
        for e in m.entries() {
            out.extend_from_slice(&(e.len() as u32).to_le_bytes());
            out.extend_from_slice(e.as_bytes());
        }
    }
    out.extend_from_slice(&(code.l.len() as u32).to_le_bytes());
    for &i in &code.l {
        out.extend_from_slice(&(i as u32).to_le_bytes());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Ring;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn stat_round_trip_z5() {
        let r = Ring::zm(5).unwrap();
        for seed in 0..100 {
            let mut o = r.oracle(seed);
            for x in 0..5 {
                let e = stat_encode(&mut o, &r.from_u64(x), 4).unwrap();
                assert_eq!(stat_reconstruct(&e, &mut o).unwrap(), r.from_u64(x));
            }
        }
    }

    #[test]
    fn stat_n1_z2_selected_is_x() {
        let r = Ring::zm(2).unwrap();
        let mut o = r.oracle(3);
        let zero = r.from_u64(0);
        for _ in 0..20 {
            let e = stat_encode(&mut o, &zero, 1).unwrap();
            assert_eq!(e.selected(0), &zero);
        }
    }

    #[test]
    fn stat_reconstruct_hand_built() {
        let r = Ring::zm(7).unwrap();
        let mut o = r.oracle(0);
        let enc = StatEncoding {
            v0: vec![r.from_u64(1), r.from_u64(5), r.from_u64(4)],
            v1: vec![r.from_u64(6), r.from_u64(2), r.from_u64(3)],
            sigma: vec![false, true, false],
        };
        assert_eq!(stat_reconstruct(&enc, &mut o).unwrap(), r.from_u64(0));
        let zeros = StatEncoding {
            v0: vec![r.from_u64(0); 3],
            v1: vec![r.from_u64(0); 3],
            sigma: vec![true, false, true],
        };
        assert_eq!(stat_reconstruct(&zeros, &mut o).unwrap(), r.from_u64(0));
    }

    #[test]
    fn stat_encode_rejects_n0() {
        let r = Ring::zm(5).unwrap();
        let mut o = r.oracle(0);
        assert!(stat_encode(&mut o, &r.from_u64(1), 0).is_err());
    }

    #[test]
    fn z3_distance_n2() {
        let r = Ring::zm(3).unwrap();
        let mut o = r.oracle(0);
        for x in 0..3 {
            assert_eq!(stat_distance_bruteforce(&mut o, 2, &r.from_u64(x)).unwrap(), rat(8, 27));
        }
    }

    #[test]
    fn distance_rejects_large_rings() {
        let r = Ring::zm(5).unwrap();
        let mut o = r.oracle(0);
        assert!(stat_distance_bruteforce(&mut o, 2, &r.from_u64(0)).is_err());
        let r = Ring::zm(2).unwrap();
        let mut o = r.oracle(0);
        assert!(stat_distance_bruteforce(&mut o, 6, &r.from_u64(0)).is_err());
    }

    #[test]
    fn distribution_sums_to_one() {
        let r = Ring::zm(2).unwrap();
        let mut o = r.oracle(0);
        let d = stat_distribution(&mut o, 3, &r.from_u64(1)).unwrap();
        let total: BigRational = d.values().cloned().sum();
        assert_eq!(total, rat(1, 1));
    }

    #[test]
    fn rand_code_k1_gf2() {
        let r = Ring::prime_field(2).unwrap();
        for seed in 0..20 {
            let mut o = r.oracle(seed);
            let code = gen_rand_code(&mut o, 1).unwrap();
            assert_eq!((code.g.rows(), code.g.cols()), (2, 1));
            assert_eq!(code.g.get(code.l[0], 0), &r.from_u64(1));
            assert_eq!(code.h.get(0, 0), &r.from_u64(1));
        }
    }

    #[test]
    fn rand_code_requires_field() {
        let mut o = Ring::zm(6).unwrap().oracle(0);
        assert!(gen_rand_code(&mut o, 4).is_err());
    }

    #[test]
    fn ring_code_k1_is_trivial() {
        let r = Ring::zm(6).unwrap();
        let mut o = r.oracle(0);
        let code = gen_ring_code(&mut o, 1).unwrap();
        assert_eq!(code.g.entries(), &[r.from_u64(1), r.from_u64(1)]);
        assert_eq!(code.h.entries(), &[r.from_u64(1)]);
    }

    #[test]
    fn ring_code_inverts_over_matrices() {
        // noncommutative entries: H·G|_L = I still holds with this multiplication order
        let r = Ring::matrix(3, 2).unwrap();
        let mut o = r.oracle(7);
        let code = gen_ring_code(&mut o, 5).unwrap();
        let gl = code.g.select_rows(&code.l);
        assert!(code.h.mul(&mut o, &gl).unwrap().is_identity(&mut o));
    }

    #[test]
    fn rs_constant_message_gives_constant_codeword() {
        let r = Ring::prime_field(1_000_003).unwrap();
        let mut o = r.oracle(2);
        let code = gen_rs_code(&mut o, 4, 8, EvalPoints::Random).unwrap();
        let s = o.sample();
        let gu = code.g.mul_vec(&mut o, &vec![s.clone(); 4]).unwrap();
        assert!(gu.iter().all(|x| x == &s));
    }

    #[test]
    fn rs_rejects_small_field_and_rate() {
        let mut o = Ring::prime_field(31).unwrap().oracle(0);
        assert!(gen_rs_code(&mut o, 4, 8, EvalPoints::Random).is_err());
        let mut o = Ring::prime_field(1009).unwrap().oracle(0);
        assert!(gen_rs_code(&mut o, 4, 4, EvalPoints::Random).is_err());
    }

    #[test]
    fn slwalk_satisfies_decoding_identity() {
        for ring in [Ring::zm(6).unwrap(), Ring::matrix(2, 2).unwrap()] {
            let mut o = ring.oracle(11);
            let code = gen_slwalk_code(&mut o, 4, default_walk_length(4)).unwrap();
            let gl = code.g.select_rows(&code.l);
            assert!(code.h.mul(&mut o, &gl).unwrap().is_identity(&mut o));
            assert!(!gl.is_identity(&mut o));
        }
    }

    #[test]
    fn noisy_encode_full_message_is_u() {
        let r = Ring::prime_field(101).unwrap();
        let mut o = r.oracle(1);
        let code = gen_rand_code(&mut o, 4).unwrap();
        let x = o.sample_vec(4);
        let enc = noisy_encode(&code, &mut o, &x).unwrap();
        assert_eq!(enc.u, x);
        let too_long = o.sample_vec(5);
        assert!(noisy_encode(&code, &mut o, &too_long).is_err());
    }

    #[test]
    fn binary_container_has_expected_length() {
        let r = Ring::prime_field(101).unwrap();
        let mut o = r.oracle(1);
        let code = gen_rand_code(&mut o, 3).unwrap();
        let bytes = code_to_bytes(&code);
        // 2 headers, 6*3 + 3*3 labels of 1 byte with 4-byte prefix, L header + 3 indices
        assert_eq!(bytes.len(), 16 + 27 * 5 + 4 + 12);
    }
}
