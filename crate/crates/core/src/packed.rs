//! Packed (Franklin–Yung) secret sharing among `n` servers, and the proofs a client uses to
//! convince the servers that what it dealt is well formed.
//!
//! A block of `ℓ` secrets sits at the points `0, -1, ..., 1-ℓ` of a random polynomial; server
//! `j` holds its value at `j`. Vectors of shares are indexed `[block][server]`.
//!
//! [`prove_membership`] checks that dealt vectors lie in a [`LinearSpace`] by opening a blinded
//! random linear combination. [`verify_replication`] checks that entries of shared blocks repeat
//! according to a [`ReplicationPattern`], either type by type through [`prove_membership`] or
//! with a single randomized inner product.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use crate::error::{Abort, Error, Result};
use crate::linalg::{all_distinct, int_points, lagrange_matrix, Matrix};
use crate::ot::Session;
use crate::ring::{Label, RingOracle};

struct DegreeTables {
    /// `n × (d+1)`: shares from (secrets, values at the first `d+1-ℓ` share points).
    gen: Matrix,
    /// `(n-d-1) × (d+1)`: remaining shares predicted from the first `d+1`.
    check: Matrix,
    /// `ℓ × (d+1)`: secrets from the first `d+1` shares.
    recon: Matrix,
}

/// Server count, block length and sharing degree, with the interpolation points.
#[derive(Clone)]
pub struct PackedParams {
    pub n: usize,
    pub ell: usize,
    pub delta: usize,
    share_points: Vec<Label>,
    secret_points: Vec<Label>,
    tables: Arc<Mutex<HashMap<usize, Arc<DegreeTables>>>>,
}

impl std::fmt::Debug for PackedParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PackedParams")
            .field("n", &self.n)
            .field("ell", &self.ell)
            .field("delta", &self.delta)
            .finish()
    }
}

impl PackedParams {
    /// Checked parameters: the ring is a field (or pseudo-field), the `n + ℓ` points
    /// `1-ℓ, ..., n` are distinct, `ℓ - 1 <= δ` and `2δ < n`.
    pub fn new(o: &mut RingOracle, n: usize, ell: usize, delta: usize) -> Result<PackedParams> {
        let ring = o.ring().clone();
        if !(ring.is_field() || ring.is_pseudo_field()) {
            return Err(Error::param("packed sharing needs a field or pseudo-field"));
        }
        if let Some(q) = ring.order() {
            if q < (n + ell) as u128 {
                return Err(Error::param(format!(
                    "field of size {q} has fewer than n + ell = {} distinct points",
                    n + ell
                )));
            }
        }
        if 2 * delta >= n {
            return Err(Error::param(format!("need 2·delta < n, got delta={delta}, n={n}")));
        }
        let p = PackedParams::literal(o, n, ell, delta)?;
        let mut all = p.secret_points.clone();
        all.extend(p.share_points.iter().cloned());
        if !all_distinct(&all) {
            return Err(Error::param("interpolation points are not distinct"));
        }
        Ok(p)
    }

    /// `δ = n/3`, `ℓ = n/4` (at least 1).
    pub fn defaults(o: &mut RingOracle, n: usize) -> Result<PackedParams> {
        PackedParams::new(o, n, (n / 4).max(1), n / 3)
    }

    /// Parameters taken literally: points are the ring elements `1-ℓ, ..., n` even if some of
    /// them coincide in a small field. Only `1 <= ℓ <= δ + 1 <= n` is enforced.
    pub fn literal(o: &mut RingOracle, n: usize, ell: usize, delta: usize) -> Result<PackedParams> {
        if ell == 0 || delta + 1 < ell || delta >= n {
            return Err(Error::param(format!(
                "need 1 <= ell <= delta + 1 <= n, got n={n}, ell={ell}, delta={delta}"
            )));
        }
        let share_points = int_points(o, 1, n as i64);
        let mut secret_points = int_points(o, 1 - ell as i64, 0);
        secret_points.reverse();
        Ok(PackedParams { n, ell, delta, share_points, secret_points, tables: Arc::default() })
    }

    /// `t = δ - ℓ + 1`: any `t` shares reveal nothing about the block.
    pub fn privacy_threshold(&self) -> usize {
        self.delta + 1 - self.ell
    }

    pub fn share_points(&self) -> &[Label] {
        &self.share_points
    }

    /// `0, -1, ..., 1-ℓ`.
    pub fn secret_points(&self) -> &[Label] {
        &self.secret_points
    }

    fn tables(&self, o: &mut RingOracle, degree: usize) -> Result<Arc<DegreeTables>> {
        if degree + 1 < self.ell || degree >= self.n {
            return Err(Error::param(format!(
                "degree {degree} outside [ell-1, n-1] = [{}, {}]",
                self.ell - 1,
                self.n - 1
            )));
        }
        if let Some(t) = self.tables.lock().expect("tables lock").get(&degree) {
            return Ok(t.clone());
        }
        let base = &self.share_points[..degree + 1];
        let mut gen_from = self.secret_points.clone();
        gen_from.extend_from_slice(&self.share_points[..degree + 1 - self.ell]);
        let t = Arc::new(DegreeTables {
            gen: lagrange_matrix(o, &gen_from, &self.share_points)?,
            check: lagrange_matrix(o, base, &self.share_points[degree + 1..])?,
            recon: lagrange_matrix(o, base, &self.secret_points)?,
        });
        self.tables.lock().expect("tables lock").insert(degree, t.clone());
        Ok(t)
    }

    /// Shares of `block` on a random polynomial of the given degree.
    pub fn share(&self, o: &mut RingOracle, block: &[Label], degree: usize) -> Result<Vec<Label>> {
        let rand = o.sample_vec((degree + 1).saturating_sub(self.ell));
        self.share_with(o, block, degree, &rand)
    }

    /// Shares of `block` on the polynomial of the given degree that takes the values `rand` at
    /// the first `degree + 1 - ℓ` share points.
    pub fn share_with(
        &self,
        o: &mut RingOracle,
        block: &[Label],
        degree: usize,
        rand: &[Label],
    ) -> Result<Vec<Label>> {
        if block.len() != self.ell {
            return Err(Error::param(format!("block has {} entries, expected {}", block.len(), self.ell)));
        }
        let t = self.tables(o, degree)?;
        if rand.len() != degree + 1 - self.ell {
            return Err(Error::param("wrong amount of sharing randomness"));
        }
        let mut v = block.to_vec();
        v.extend_from_slice(rand);
        t.gen.mul_vec(o, &v)
    }

    /// Whether `shares` lie on a polynomial of degree at most `degree`.
    pub fn is_consistent(&self, o: &mut RingOracle, shares: &[Label], degree: usize) -> Result<bool> {
        if shares.len() != self.n {
            return Err(Error::param("share vector has the wrong length"));
        }
        let t = self.tables(o, degree)?;
        if degree + 1 == self.n {
            return Ok(true);
        }
        let predicted = t.check.mul_vec(o, &shares[..degree + 1])?;
        Ok(predicted == shares[degree + 1..])
    }

    /// Checks the degree, then interpolates the block. Inconsistent shares abort.
    pub fn reconstruct(&self, o: &mut RingOracle, shares: &[Label], degree: usize) -> Result<Vec<Label>> {
        if !self.is_consistent(o, shares, degree)? {
            return Err(Abort::new(
                "degree-check",
                format!("shares do not lie on a polynomial of degree {degree}"),
            )
            .into());
        }
        let t = self.tables(o, degree)?;
        t.recon.mul_vec(o, &shares[..degree + 1])
    }

    /// Block from the shares of the servers in `idx` (0-based), assuming degree `idx.len() - 1`.
    pub fn reconstruct_subset(
        &self,
        o: &mut RingOracle,
        idx: &[usize],
        values: &[Label],
    ) -> Result<Vec<Label>> {
        if idx.len() != values.len() || idx.iter().any(|&i| i >= self.n) {
            return Err(Error::param("subset indices and values do not match"));
        }
        let pts: Vec<Label> = idx.iter().map(|&i| self.share_points[i].clone()).collect();
        lagrange_matrix(o, &pts, &self.secret_points)?.mul_vec(o, values)
    }
}

/// Pointwise product of two share vectors; degree adds up.
pub fn block_mul_local(o: &mut RingOracle, a: &[Label], b: &[Label]) -> Result<Vec<Label>> {
    a.iter().zip(b).map(|(x, y)| o.mul(x, y)).collect()
}

/// Joint distribution of the shares held by `servers` (0-based) when `block` is shared at
/// `degree`, by enumerating every sharing polynomial. Needs an enumerable field.
pub fn share_distribution(
    o: &mut RingOracle,
    params: &PackedParams,
    block: &[Label],
    degree: usize,
    servers: &[usize],
) -> Result<BTreeMap<Vec<Label>, u64>> {
    let elems = o.ring().elements().ok_or_else(|| Error::param("field too large to enumerate"))?;
    let free = (degree + 1).saturating_sub(params.ell);
    let mut counts = BTreeMap::new();
    let mut digits = vec![0usize; free];
    loop {
        let rand: Vec<Label> = digits.iter().map(|&d| elems[d].clone()).collect();
        let shares = params.share_with(o, block, degree, &rand)?;
        let key: Vec<Label> = servers.iter().map(|&j| shares[j].clone()).collect();
        *counts.entry(key).or_insert(0) += 1;
        // next digit vector
        let mut i = 0;
        loop {
            if i == free {
                return Ok(counts);
            }
            digits[i] += 1;
            if digits[i] < elems.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
    }
}

/// A linear condition on the secrets of a tuple of shared polynomials; positions are
/// `(component, entry)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    Equal((usize, usize), (usize, usize)),
    Zero((usize, usize)),
}

/// Tuples of polynomials with `deg p_i <= degrees[i]` whose secrets satisfy `constraints`,
/// seen through their evaluations at the share points. A vector is indexed
/// `[component][server]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearSpace {
    pub degrees: Vec<usize>,
    pub constraints: Vec<Constraint>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl LinearSpace {
    /// Share vectors of degree at most `d`.
    pub fn degree(d: usize) -> LinearSpace {
        LinearSpace { degrees: vec![d], constraints: Vec::new() }
    }

    pub fn new(degrees: Vec<usize>, constraints: Vec<Constraint>) -> LinearSpace {
        LinearSpace { degrees, constraints }
    }

    fn check_positions(&self, ell: usize) -> Result<()> {
        let ok = |(c, e): (usize, usize)| c < self.degrees.len() && e < ell;
        for c in &self.constraints {
            let fine = match *c {
                Constraint::Equal(a, b) => ok(a) && ok(b),
                Constraint::Zero(a) => ok(a),
            };
            if !fine {
                return Err(Error::param(format!("constraint {c:?} out of range")));
            }
        }
        Ok(())
    }

    pub fn contains(&self, o: &mut RingOracle, p: &PackedParams, v: &[Vec<Label>]) -> Result<bool> {
        self.check_positions(p.ell)?;
        if v.len() != self.degrees.len() {
            return Ok(false);
        }
        let mut secrets = Vec::with_capacity(v.len());
        for (shares, &d) in v.iter().zip(&self.degrees) {
            if shares.len() != p.n || !p.is_consistent(o, shares, d)? {
                return Ok(false);
            }
            let t = p.tables(o, d)?;
            secrets.push(t.recon.mul_vec(o, &shares[..d + 1])?);
        }
        let zero = o.zero();
        Ok(self.constraints.iter().all(|c| match *c {
            Constraint::Equal((c1, e1), (c2, e2)) => secrets[c1][e1] == secrets[c2][e2],
            Constraint::Zero((c1, e1)) => secrets[c1][e1] == zero,
        }))
    }

    /// A uniformly random element of the space.
    pub fn random_member(&self, o: &mut RingOracle, p: &PackedParams) -> Result<Vec<Vec<Label>>> {
        self.check_positions(p.ell)?;
        let ell = p.ell;
        let mut uf = UnionFind::new(self.degrees.len() * ell);
        let mut zero_roots = Vec::new();
        for c in &self.constraints {
            match *c {
                Constraint::Equal((c1, e1), (c2, e2)) => uf.union(c1 * ell + e1, c2 * ell + e2),
                Constraint::Zero((c1, e1)) => zero_roots.push(c1 * ell + e1),
            }
        }
        let zero_roots: Vec<usize> = zero_roots.into_iter().map(|x| uf.find(x)).collect();
        let zero = o.zero();
        let mut value: HashMap<usize, Label> = HashMap::new();
        let mut out = Vec::with_capacity(self.degrees.len());
        for (c, &d) in self.degrees.iter().enumerate() {
            let mut block = Vec::with_capacity(ell);
            for e in 0..ell {
                let root = uf.find(c * ell + e);
                let v = if zero_roots.contains(&root) {
                    zero.clone()
                } else {
                    value.entry(root).or_insert_with(|| o.sample()).clone()
                };
                block.push(v);
            }
            out.push(p.share(o, &block, d)?);
        }
        Ok(out)
    }
}

/// Where challenge coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CoinSource {
    /// The session's public-coin oracle.
    #[default]
    Public,
    /// The given party (the client that is not dealing) picks them and broadcasts them.
    OtherClient(usize),
}

/// The servers and parameters a proof runs against.
#[derive(Debug, Clone, Copy)]
pub struct Committee<'a> {
    pub params: &'a PackedParams,
    /// Session indices of servers `1..=n`, in order.
    pub servers: &'a [usize],
    pub coins: CoinSource,
}

impl Committee<'_> {
    fn verifier(&self) -> usize {
        self.servers[0]
    }
}

/// Sends server `j` its share of every block in one message; returns what the servers hold.
pub fn deal(
    s: &mut Session,
    c: &Committee,
    dealer: usize,
    blocks: &[Vec<Label>],
    name: &str,
) -> Vec<Vec<Label>> {
    let mut held = vec![Vec::with_capacity(c.servers.len()); blocks.len()];
    if blocks.is_empty() {
        return held;
    }
    for (j, &srv) in c.servers.iter().enumerate() {
        let msg: Vec<Label> = blocks.iter().map(|b| b[j].clone()).collect();
        let got = s.send_named(dealer, srv, name, &msg);
        for (b, x) in got.into_iter().enumerate() {
            held[b].push(x);
        }
    }
    held
}

/// Draws `count` challenge coefficients.
pub fn draw_coins(s: &mut Session, source: CoinSource, count: usize) -> Vec<Label> {
    match source {
        CoinSource::Public => s.public_coins(count),
        CoinSource::OtherClient(p) => {
            let v = s.oracle(p).sample_vec(count);
            s.broadcast(p, "challenge", &v)
        }
    }
}

/// Proves that every vector in `held` (what the servers hold, `[vector][component][server]`)
/// lies in `space`. The dealer computes its combination from `claimed`, which an honest dealer
/// sets equal to `held`.
///
/// Steps: the dealer deals a random blinding vector of the space; challenge coefficients are
/// drawn; the dealer broadcasts `Σ c_i v^i + r`; each server checks its part and complains on
/// mismatch; everyone checks that the broadcast vector is in the space.
pub fn prove_membership(
    s: &mut Session,
    c: &Committee,
    dealer: usize,
    space: &LinearSpace,
    held: &[Vec<Vec<Label>>],
    claimed: &[Vec<Vec<Label>>],
    stage: &str,
) -> Result<()> {
    let p = c.params;
    let comps = space.degrees.len();
    if held.len() != claimed.len()
        || held.iter().chain(claimed).any(|v| v.len() != comps || v.iter().any(|x| x.len() != p.n))
    {
        return Err(Error::param("membership proof vectors do not match the space"));
    }
    if held.is_empty() {
        return Ok(());
    }
    let r = space.random_member(s.oracle(dealer), p)?;
    let r_held = deal(s, c, dealer, &r, "blinding");
    let coef = draw_coins(s, c.coins, held.len());

    let o = s.oracle(dealer);
    let mut w = Vec::with_capacity(comps * p.n);
    for comp in 0..comps {
        for j in 0..p.n {
            let mut acc = r[comp][j].clone();
            for (ci, v) in coef.iter().zip(claimed) {
                let t = o.mul(ci, &v[comp][j])?;
                acc = o.add(&acc, &t)?;
            }
            w.push(acc);
        }
    }
    let w = s.broadcast(dealer, "combination", &w);

    let mut complainers = Vec::new();
    for (j, &srv) in c.servers.iter().enumerate() {
        let o = s.oracle(srv);
        let mut ok = true;
        for comp in 0..comps {
            let mut acc = r_held[comp][j].clone();
            for (ci, v) in coef.iter().zip(held) {
                let t = o.mul(ci, &v[comp][j])?;
                acc = o.add(&acc, &t)?;
            }
            if acc != w[comp * p.n + j] {
                ok = false;
            }
        }
        if !ok {
            complainers.push(srv);
        }
    }
    if !complainers.is_empty() {
        return Err(Abort::new(stage, "share inconsistent with the broadcast combination")
            .with_complainers(complainers)
            .into());
    }
    let wv: Vec<Vec<Label>> = w.chunks(p.n).map(<[Label]>::to_vec).collect();
    if !space.contains(s.oracle(c.verifier()), p, &wv)? {
        return Err(Abort::new(stage, "broadcast combination is not in the space").into());
    }
    Ok(())
}

/// Which entries of which shared blocks must be equal or zero; positions are
/// `(block, entry)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReplicationPattern {
    pub equal: Vec<((usize, usize), (usize, usize))>,
    pub zero: Vec<(usize, usize)>,
}

impl ReplicationPattern {
    pub fn is_empty(&self) -> bool {
        self.equal.is_empty() && self.zero.is_empty()
    }

    /// Whether plain blocks satisfy the pattern.
    pub fn holds(&self, blocks: &[Vec<Label>], zero: &Label) -> bool {
        self.equal.iter().all(|&((b1, e1), (b2, e2))| blocks[b1][e1] == blocks[b2][e2])
            && self.zero.iter().all(|&(b, e)| blocks[b][e] == *zero)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReplicationMode {
    /// Atomic constraints grouped by entry indices and degrees, one membership proof per group.
    Typewise,
    /// One randomized inner product over all blocks, opened under a zero-sum mask.
    #[default]
    InnerProduct,
}

/// Checks that the secrets of shared blocks (`held`, `[block][server]`, of the given degrees)
/// satisfy `pattern`. `claimed` is the dealer's knowledge of the same shares.
#[allow(clippy::too_many_arguments)]
pub fn verify_replication(
    s: &mut Session,
    c: &Committee,
    dealer: usize,
    degrees: &[usize],
    held: &[Vec<Label>],
    claimed: &[Vec<Label>],
    pattern: &ReplicationPattern,
    mode: ReplicationMode,
    stage: &str,
) -> Result<()> {
    let ell = c.params.ell;
    let nb = held.len();
    let bad = |&(b, e): &(usize, usize)| b >= nb || e >= ell;
    if degrees.len() != nb
        || claimed.len() != nb
        || pattern.equal.iter().any(|(x, y)| bad(x) || bad(y))
        || pattern.zero.iter().any(bad)
    {
        return Err(Error::param("replication pattern does not match the blocks"));
    }
    if pattern.is_empty() {
        return Ok(());
    }
    match mode {
        ReplicationMode::Typewise => typewise(s, c, dealer, degrees, held, claimed, pattern, stage),
        ReplicationMode::InnerProduct => inner_product(s, c, dealer, degrees, held, pattern, stage),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum TypeKey {
    Equal { e1: usize, e2: usize, d1: usize, d2: usize },
    Zero { e: usize, d: usize },
}

#[allow(clippy::too_many_arguments)]
fn typewise(
    s: &mut Session,
    c: &Committee,
    dealer: usize,
    degrees: &[usize],
    held: &[Vec<Label>],
    claimed: &[Vec<Label>],
    pattern: &ReplicationPattern,
    stage: &str,
) -> Result<()> {
    let mut groups: BTreeMap<TypeKey, Vec<Vec<usize>>> = BTreeMap::new();
    for &((b1, e1), (b2, e2)) in &pattern.equal {
        let key = TypeKey::Equal { e1, e2, d1: degrees[b1], d2: degrees[b2] };
        groups.entry(key).or_default().push(vec![b1, b2]);
    }
    for &(b, e) in &pattern.zero {
        groups.entry(TypeKey::Zero { e, d: degrees[b] }).or_default().push(vec![b]);
    }
    let groups: Vec<(TypeKey, Vec<Vec<usize>>)> = groups.into_iter().collect();
    s.parallel(groups.len(), |s, g| {
        let (key, members) = &groups[g];
        let space = match *key {
            TypeKey::Equal { e1, e2, d1, d2 } => {
                LinearSpace::new(vec![d1, d2], vec![Constraint::Equal((0, e1), (1, e2))])
            }
            TypeKey::Zero { e, d } => LinearSpace::new(vec![d], vec![Constraint::Zero((0, e))]),
        };
        let pick = |src: &[Vec<Label>]| -> Vec<Vec<Vec<Label>>> {
            members.iter().map(|bs| bs.iter().map(|&b| src[b].clone()).collect()).collect()
        };
        prove_membership(s, c, dealer, &space, &pick(held), &pick(claimed), stage)
    })?;
    Ok(())
}

fn inner_product(
    s: &mut Session,
    c: &Committee,
    dealer: usize,
    degrees: &[usize],
    held: &[Vec<Label>],
    pattern: &ReplicationPattern,
    stage: &str,
) -> Result<()> {
    let p = c.params;
    let ell = p.ell;
    // blocks that take part, renumbered
    let mut involved: Vec<usize> = pattern
        .equal
        .iter()
        .flat_map(|&((b1, _), (b2, _))| [b1, b2])
        .chain(pattern.zero.iter().map(|&(b, _)| b))
        .collect();
    involved.sort_unstable();
    involved.dedup();
    let local: HashMap<usize, usize> = involved.iter().enumerate().map(|(i, &b)| (b, i)).collect();
    let max_d = involved.iter().map(|&b| degrees[b]).max().unwrap_or(0);
    let open_degree = max_d + ell - 1;
    if open_degree + 2 > p.n {
        return Err(Error::param(format!(
            "inner-product check needs degree {open_degree} <= n - 2 = {}",
            p.n - 2
        )));
    }

    // zero-sum mask, dealt before the challenge
    let o = s.oracle(dealer);
    let mut mask = o.sample_vec(ell - 1);
    let sum = o.sum(&mask)?;
    mask.push(o.neg(&sum)?);
    let mask_shares = p.share(o, &mask, open_degree)?;
    let mask_held = deal(s, c, dealer, &[mask_shares], "zero-sum mask").remove(0);

    let m = involved.len();
    let r = draw_coins(s, c.coins, m * ell);

    // r' is r shifted one step along each equality class; zero for classes that must vanish
    let mut uf = UnionFind::new(m * ell);
    for &((b1, e1), (b2, e2)) in &pattern.equal {
        uf.union(local[&b1] * ell + e1, local[&b2] * ell + e2);
    }
    let zero_roots: Vec<usize> = pattern.zero.iter().map(|&(b, e)| uf.find(local[&b] * ell + e)).collect();
    let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for pos in 0..m * ell {
        classes.entry(uf.find(pos)).or_default().push(pos);
    }
    let verifier = c.verifier();
    let o = s.oracle(verifier);
    let zero = o.zero();
    let mut r_shift = vec![zero.clone(); m * ell];
    for (root, members) in &classes {
        if zero_roots.contains(root) {
            continue;
        }
        for (k, &pos) in members.iter().enumerate() {
            r_shift[pos] = r[members[(k + 1) % members.len()]].clone();
        }
    }
    let mut u_shares = Vec::with_capacity(m);
    for i in 0..m {
        let u: Vec<Label> =
            (0..ell).map(|e| o.sub(&r[i * ell + e], &r_shift[i * ell + e])).collect::<Result<_>>()?;
        u_shares.push(p.share_with(o, &u, ell - 1, &[])?);
    }

    let opened = s.parallel(p.n, |s, j| {
        let srv = c.servers[j];
        let o = s.oracle(srv);
        let mut acc = mask_held[j].clone();
        for (i, &b) in involved.iter().enumerate() {
            let t = o.mul(&held[b][j], &u_shares[i][j])?;
            acc = o.add(&acc, &t)?;
        }
        Ok(s.broadcast(srv, "opening", &[acc]).remove(0))
    })?;
    let o = s.oracle(verifier);
    if !p.is_consistent(o, &opened, open_degree)? {
        return Err(Abort::new(stage, "opened inner product has too high a degree").into());
    }
    let secrets = p.reconstruct(o, &opened, open_degree)?;
    if o.sum(&secrets)? != zero {
        return Err(Abort::new(stage, "replication pattern violated").into());
    }
    Ok(())
}
