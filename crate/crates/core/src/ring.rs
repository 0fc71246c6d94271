//! Black-box ring families.
//!
//! A [`Ring`] describes a concrete ring (`Z_m` or `dim × dim` matrices over `Z_m`) together with
//! a labelling map from elements to fixed-length byte strings. Protocol code never looks inside a
//! [`Label`]; it only hands labels to a [`RingOracle`], which answers the commands
//! `add`, `subtract`, `multiply`, `sample`, `one` and `invert` and counts every call.
//!
//! Each logical party owns its own oracle (its own randomness stream and counter). Oracles for the
//! same ring share the immutable [`Ring`] description.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Threshold used for the concrete pseudo-field flag: unit fraction at least `1 - 2^-16`.
pub const PSEUDO_FIELD_DEFICIENCY: f64 = 1.0 / 65536.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Command {
    Add,
    Subtract,
    Multiply,
    Sample,
    One,
    Invert,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::Add, Command::Subtract, Command::Multiply, Command::Sample, Command::One, Command::Invert];

    pub fn arity(self) -> usize {
        match self {
            Command::Add | Command::Subtract | Command::Multiply => 2,
            Command::Invert => 1,
            Command::Sample | Command::One => 0,
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// Opaque element identifier. Its length is fixed per ring.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label(Box<[u8]>);

impl Label {
    pub fn from_bytes(bytes: impl Into<Box<[u8]>>) -> Self {
        Label(bytes.into())
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        if !s.len().is_multiple_of(2) {
            return None;
        }
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16).ok())
            .collect::<Option<Vec<u8>>>()
            .map(|v| Label(v.into_boxed_slice()))
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Label({})", self.to_hex())
    }
}

impl Serialize for Label {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Label {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Label::from_hex(&s).ok_or_else(|| serde::de::Error::custom("label is not valid hex"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingId {
    pub id: String,
    /// Length of every label in bits. `|R| <= 2^bit_length`.
    pub bit_length: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Zm { modulus: u64 },
    Matrix { modulus: u64, dim: usize },
}

impl Family {
    pub fn modulus(&self) -> u64 {
        match *self {
            Family::Zm { modulus } | Family::Matrix { modulus, .. } => modulus,
        }
    }

    pub fn entries(&self) -> usize {
        match *self {
            Family::Zm { .. } => 1,
            Family::Matrix { dim, .. } => dim * dim,
        }
    }
}

/// How element values map to label bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelScheme {
    /// Little-endian fixed-width integers, entries concatenated row-major.
    Standard,
    /// Each entry goes through the bijection `x -> mul*x + add (mod 2^w)` of the entry width.
    Keyed { mul: u64, mul_inv: u64, add: u64 },
}

impl LabelScheme {
    pub fn keyed(key: u64) -> Self {
        let mul = splitmix64(key) | 1;
        let add = splitmix64(key ^ 0x9e37_79b9_7f4a_7c15);
        LabelScheme::Keyed { mul, mul_inv: inverse_mod_2_64(mul), add }
    }
}

struct RingInner {
    id: RingId,
    family: Family,
    scheme: LabelScheme,
    entry_bytes: usize,
    field: bool,
    pseudo_field: bool,
}

/// Immutable description of a concrete ring and its labelling. Cheap to clone.
#[derive(Clone)]
pub struct Ring(Arc<RingInner>);

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Ring")
            .field("id", &self.0.id.id)
            .field("family", &self.0.family)
            .field("field", &self.0.field)
            .field("pseudo_field", &self.0.pseudo_field)
            .finish()
    }
}

impl Ring {
    /// `Z_m` in the standard representation.
    pub fn zm(m: u64) -> Result<Ring> {
        if m < 2 {
            return Err(Error::param(format!("modulus must be at least 2, got {m}")));
        }
        let field = is_prime_u64(m);
        let deficiency = zm_unit_deficiency(m);
        Ok(Ring::build(
            format!("zm:{m}"),
            Family::Zm { modulus: m },
            field,
            field || deficiency <= PSEUDO_FIELD_DEFICIENCY,
        ))
    }

    /// `GF(p)`; rejects composite `p`.
    pub fn prime_field(p: u64) -> Result<Ring> {
        if !is_prime_u64(p) {
            return Err(Error::param(format!("{p} is not prime")));
        }
        let mut ring = Ring::zm(p)?;
        Arc::get_mut(&mut ring.0).expect("fresh ring").id.id = format!("gf:{p}");
        Ok(ring)
    }

    /// Ring of `dim × dim` matrices over `Z_m`.
    pub fn matrix(m: u64, dim: usize) -> Result<Ring> {
        if m < 2 {
            return Err(Error::param(format!("modulus must be at least 2, got {m}")));
        }
        if dim == 0 {
            return Err(Error::param("matrix dimension must be at least 1"));
        }
        let field = dim == 1 && is_prime_u64(m);
        let deficiency = matrix_unit_deficiency(m, dim);
        Ok(Ring::build(
            format!("mat:{m}:{dim}"),
            Family::Matrix { modulus: m, dim },
            field,
            field || deficiency <= PSEUDO_FIELD_DEFICIENCY,
        ))
    }

    /// Parses `zm:<m>`, `gf:<p>` or `mat:<m>:<dim>`.
    pub fn parse(spec: &str) -> Result<Ring> {
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let num = |s: &str| -> Result<u64> {
            s.parse::<u64>().map_err(|_| Error::param(format!("bad number {s:?} in ring spec {spec:?}")))
        };
        match parts.as_slice() {
            ["zm", m] => Ring::zm(num(m)?),
            ["gf", p] => Ring::prime_field(num(p)?),
            ["mat", m, d] => Ring::matrix(num(m)?, num(d)? as usize),
            _ => Err(Error::param(format!(
                "ring spec {spec:?} does not match zm:<m>, gf:<p> or mat:<m>:<dim>"
            ))),
        }
    }

    fn build(id: String, family: Family, field: bool, pseudo_field: bool) -> Ring {
        let m = family.modulus();
        let entry_bits = 64 - (m - 1).leading_zeros();
        let entry_bytes = entry_bits.div_ceil(8).max(1) as usize;
        let bit_length = (entry_bytes * 8 * family.entries()) as u32;
        Ring(Arc::new(RingInner {
            id: RingId { id, bit_length },
            family,
            scheme: LabelScheme::Standard,
            entry_bytes,
            field,
            pseudo_field,
        }))
    }

    /// Same ring, same arithmetic, different labelling: a keyed permutation of each entry's
    /// label space.
    pub fn with_keyed_labels(&self, key: u64) -> Ring {
        let inner = &self.0;
        Ring(Arc::new(RingInner {
            id: RingId { id: format!("{}#perm{key:x}", inner.id.id), bit_length: inner.id.bit_length },
            family: inner.family,
            scheme: LabelScheme::keyed(key),
            entry_bytes: inner.entry_bytes,
            field: inner.field,
            pseudo_field: inner.pseudo_field,
        }))
    }

    pub fn id(&self) -> &RingId {
        &self.0.id
    }

    pub fn family(&self) -> Family {
        self.0.family
    }

    pub fn modulus(&self) -> u64 {
        self.0.family.modulus()
    }

    pub fn scheme(&self) -> LabelScheme {
        self.0.scheme
    }

    pub fn uses_standard_labels(&self) -> bool {
        self.0.scheme == LabelScheme::Standard
    }

    pub fn label_bytes(&self) -> usize {
        self.0.entry_bytes * self.0.family.entries()
    }

    /// Number of elements, when it fits in a `u128`.
    pub fn order(&self) -> Option<u128> {
        let m = self.modulus() as u128;
        let mut acc: u128 = 1;
        for _ in 0..self.0.family.entries() {
            acc = acc.checked_mul(m)?;
        }
        Some(acc)
    }

    pub fn is_field(&self) -> bool {
        self.0.field
    }

    pub fn is_pseudo_field(&self) -> bool {
        self.0.pseudo_field
    }

    pub fn is_commutative(&self) -> bool {
        match self.0.family {
            Family::Zm { .. } => true,
            Family::Matrix { dim, .. } => dim == 1,
        }
    }

    /// Every family built here has a unit and an inverse command.
    pub fn supports_invert(&self) -> bool {
        true
    }

    /// Encodes raw entries (`0 <= e < m`, row-major for matrices). Entries are reduced mod `m`.
    pub fn encode(&self, entries: &[u64]) -> Result<Label> {
        let n = self.0.family.entries();
        if entries.len() != n {
            return Err(Error::param(format!(
                "expected {n} entries for {}, got {}",
                self.0.id.id,
                entries.len()
            )));
        }
        let m = self.modulus();
        let reduced: Vec<u64> = entries.iter().map(|&e| e % m).collect();
        Ok(self.label_of(&reduced))
    }

    /// Scalar embedding: `v mod m`, or `v·I` for matrices.
    pub fn from_u64(&self, v: u64) -> Label {
        let m = self.modulus();
        match self.0.family {
            Family::Zm { .. } => self.label_of(&[v % m]),
            Family::Matrix { dim, .. } => {
                let mut e = vec![0u64; dim * dim];
                for i in 0..dim {
                    e[i * dim + i] = v % m;
                }
                self.label_of(&e)
            }
        }
    }

    /// Inverse of [`Ring::encode`]. Fails with ⊥ on labels outside the range of the labelling.
    pub fn decode(&self, label: &Label) -> Result<Vec<u64>> {
        let eb = self.0.entry_bytes;
        let n = self.0.family.entries();
        let bytes = label.as_bytes();
        if bytes.len() != eb * n {
            return Err(Error::InvalidLabel);
        }
        let m = self.modulus();
        let mut out = Vec::with_capacity(n);
        for chunk in bytes.chunks_exact(eb) {
            let mut raw = 0u64;
            for (i, &b) in chunk.iter().enumerate() {
                raw |= (b as u64) << (8 * i);
            }
            let x = match self.0.scheme {
                LabelScheme::Standard => raw,
                LabelScheme::Keyed { mul_inv, add, .. } => {
                    raw.wrapping_sub(add).wrapping_mul(mul_inv) & self.entry_mask()
                }
            };
            if x >= m {
                return Err(Error::InvalidLabel);
            }
            out.push(x);
        }
        Ok(out)
    }

    /// Decodes a scalar ring element (`Z_m` only).
    pub fn decode_scalar(&self, label: &Label) -> Result<u64> {
        match self.0.family {
            Family::Zm { .. } => Ok(self.decode(label)?[0]),
            Family::Matrix { .. } => Err(Error::param("decode_scalar on a matrix ring")),
        }
    }

    fn entry_mask(&self) -> u64 {
        let bits = self.0.entry_bytes * 8;
        if bits >= 64 {
            u64::MAX
        } else {
            (1u64 << bits) - 1
        }
    }

    fn label_of(&self, entries: &[u64]) -> Label {
        let eb = self.0.entry_bytes;
        let mut bytes = Vec::with_capacity(eb * entries.len());
        for &x in entries {
            let raw = match self.0.scheme {
                LabelScheme::Standard => x,
                LabelScheme::Keyed { mul, add, .. } => {
                    x.wrapping_mul(mul).wrapping_add(add) & self.entry_mask()
                }
            };
            bytes.extend_from_slice(&raw.to_le_bytes()[..eb]);
        }
        Label(bytes.into_boxed_slice())
    }

    /// Labels of every element, for rings with at most 2^16 elements.
    pub fn elements(&self) -> Option<Vec<Label>> {
        let order = self.order()?;
        if order > 1 << 16 {
            return None;
        }
        let m = self.modulus();
        let n = self.0.family.entries();
        let mut out = Vec::with_capacity(order as usize);
        let mut digits = vec![0u64; n];
        for _ in 0..order {
            out.push(self.label_of(&digits));
            for d in digits.iter_mut() {
                *d += 1;
                if *d < m {
                    break;
                }
                *d = 0;
            }
        }
        Some(out)
    }

    pub fn oracle(&self, seed: u64) -> RingOracle {
        self.oracle_stream(seed, 0)
    }

    /// Oracle whose randomness is stream `stream` of the generator seeded with `seed`.
    pub fn oracle_stream(&self, seed: u64, stream: u64) -> RingOracle {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RingOracle { ring: self.clone(), rng, counter: CommCounter::default() }
    }

    fn apply(&self, cmd: Command, args: &[&Label], rng: &mut ChaCha20Rng) -> Result<Label> {
        if args.len() != cmd.arity() {
            return Err(Error::Arity { cmd, expected: cmd.arity(), got: args.len() });
        }
        let m = self.modulus();
        let out = match cmd {
            Command::Add => {
                let (a, b) = (self.decode(args[0])?, self.decode(args[1])?);
                a.iter().zip(&b).map(|(&x, &y)| add_mod(x, y, m)).collect()
            }
            Command::Subtract => {
                let (a, b) = (self.decode(args[0])?, self.decode(args[1])?);
                a.iter().zip(&b).map(|(&x, &y)| sub_mod(x, y, m)).collect()
            }
            Command::Multiply => {
                let (a, b) = (self.decode(args[0])?, self.decode(args[1])?);
                match self.0.family {
                    Family::Zm { .. } => vec![mul_mod(a[0], b[0], m)],
                    Family::Matrix { dim, .. } => mat_mul(&a, &b, dim, m),
                }
            }
            Command::Sample => (0..self.0.family.entries()).map(|_| rng.gen_range(0..m)).collect(),
            Command::One => return Ok(self.from_u64(1)),
            Command::Invert => {
                let a = self.decode(args[0])?;
                match self.0.family {
                    Family::Zm { .. } => vec![inv_mod(a[0], m).ok_or(Error::NotInvertible)?],
                    Family::Matrix { dim, .. } => mat_inverse(&a, dim, m).ok_or(Error::NotInvertible)?,
                }
            }
        };
        Ok(self.label_of(&out))
    }
}

/// Per-party accounting. Counters only ever increase until [`CommCounter::reset`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommCounter {
    pub oracle_calls: u64,
    pub per_command: [u64; 6],
    pub elements_transmitted: u64,
    pub ot_invocations: u64,
}

impl CommCounter {
    pub fn calls_of(&self, cmd: Command) -> u64 {
        self.per_command[cmd.index()]
    }

    pub fn reset(&mut self) {
        *self = CommCounter::default();
    }
}

/// A party's handle on a ring: the ring description, a private randomness stream and a call
/// counter.
pub struct RingOracle {
    ring: Ring,
    rng: ChaCha20Rng,
    counter: CommCounter,
}

impl fmt::Debug for RingOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingOracle")
            .field("ring", &self.ring.0.id.id)
            .field("counter", &self.counter)
            .finish()
    }
}

impl RingOracle {
    /// The single entry point for ring arithmetic. Returns `Err` (⊥) on invalid labels and on
    /// inverting non-units.
    pub fn call(&mut self, cmd: Command, args: &[&Label]) -> Result<Label> {
        self.counter.oracle_calls += 1;
        self.counter.per_command[cmd.index()] += 1;
        self.ring.apply(cmd, args, &mut self.rng)
    }

    pub fn add(&mut self, a: &Label, b: &Label) -> Result<Label> {
        self.call(Command::Add, &[a, b])
    }

    pub fn sub(&mut self, a: &Label, b: &Label) -> Result<Label> {
        self.call(Command::Subtract, &[a, b])
    }

    pub fn mul(&mut self, a: &Label, b: &Label) -> Result<Label> {
        self.call(Command::Multiply, &[a, b])
    }

    pub fn sample(&mut self) -> Label {
        self.call(Command::Sample, &[]).expect("sample takes no arguments")
    }

    pub fn one(&mut self) -> Label {
        self.call(Command::One, &[]).expect("one takes no arguments")
    }

    pub fn invert(&mut self, a: &Label) -> Result<Label> {
        self.call(Command::Invert, &[a])
    }

    /// `x - x` for `x = one`; two oracle calls.
    pub fn zero(&mut self) -> Label {
        let one = self.one();
        self.sub(&one, &one).expect("one is a valid label")
    }

    pub fn neg(&mut self, a: &Label) -> Result<Label> {
        let z = self.zero();
        self.sub(&z, a)
    }

    pub fn sample_vec(&mut self, n: usize) -> Vec<Label> {
        (0..n).map(|_| self.sample()).collect()
    }

    pub fn sum(&mut self, xs: &[Label]) -> Result<Label> {
        let mut acc = self.zero();
        for x in xs {
            acc = self.add(&acc, x)?;
        }
        Ok(acc)
    }

    /// A fair coin from this party's random tape. Not an oracle call.
    pub fn random_bit(&mut self) -> bool {
        self.rng.gen()
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn counter(&self) -> &CommCounter {
        &self.counter
    }

    pub fn counter_mut(&mut self) -> &mut CommCounter {
        &mut self.counter
    }

    /// Fresh oracle on the same ring with an independent stream derived from this one.
    pub fn fork(&mut self) -> RingOracle {
        let seed: u64 = self.rng.gen();
        self.ring.oracle_stream(seed, 0)
    }
}

/// Fraction of sampled elements that are units, from `trials` fresh samples.
pub fn is_unit_fraction_estimate(oracle: &mut RingOracle, trials: u64) -> num_rational::Ratio<u64> {
    let mut units = 0u64;
    for _ in 0..trials {
        let x = oracle.sample();
        if oracle.invert(&x).is_ok() {
            units += 1;
        }
    }
    num_rational::Ratio::new(units, trials.max(1))
}

/// Exact unit fraction by inverting every element (small rings only).
pub fn unit_fraction_exhaustive(oracle: &mut RingOracle) -> Option<num_rational::Ratio<u64>> {
    let elems = oracle.ring().elements()?;
    let total = elems.len() as u64;
    let units = elems.iter().filter(|x| oracle.invert(x).is_ok()).count() as u64;
    Some(num_rational::Ratio::new(units, total))
}

// ---------------------------------------------------------------------------------------------
// Integer arithmetic behind the oracle.

pub(crate) fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

pub(crate) fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + m as u128 - b as u128) % m as u128) as u64
}

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

fn mat_mul(a: &[u64], b: &[u64], dim: usize, m: u64) -> Vec<u64> {
    let mut out = vec![0u64; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            let mut acc: u128 = 0;
            for l in 0..dim {
                acc = (acc + a[i * dim + l] as u128 * b[l * dim + j] as u128) % m as u128;
            }
            out[i * dim + j] = acc as u64;
        }
    }
    out
}

/// Characteristic polynomial `det(λI - A)` by the division-free Berkowitz recurrence.
/// Returns coefficients highest degree first: `[1, c_1, ..., c_n]`.
fn char_poly(a: &[u64], dim: usize, m: u64) -> Vec<u64> {
    let at = |i: usize, j: usize| a[i * dim + j];
    let neg = |x: u64| sub_mod(0, x, m);
    let mut poly = vec![1u64];
    for r in 0..dim {
        // A_{r+1} = [[A_r, C], [R, a_rr]] with C = A[0..r, r], R = A[r, 0..r].
        // First column of the Toeplitz matrix: 1, -a_rr, -R C, -R A_r C, ..., -R A_r^{r-1} C.
        let mut col = vec![1u64, neg(at(r, r))];
        let mut vec_c: Vec<u64> = (0..r).map(|i| at(i, r)).collect();
        for _ in 0..r {
            let rc = (0..r).fold(0u64, |acc, l| add_mod(acc, mul_mod(at(r, l), vec_c[l], m), m));
            col.push(neg(rc));
            vec_c = (0..r)
                .map(|i| (0..r).fold(0u64, |acc, l| add_mod(acc, mul_mod(at(i, l), vec_c[l], m), m)))
                .collect();
        }
        // new_poly = T · poly, T lower-triangular Toeplitz of size (r+2)×(r+1)
        let mut next = vec![0u64; r + 2];
        for (i, slot) in next.iter_mut().enumerate() {
            let mut acc = 0u64;
            for (j, &p) in poly.iter().enumerate() {
                if i >= j {
                    acc = add_mod(acc, mul_mod(col[i - j], p, m), m);
                }
            }
            *slot = acc;
        }
        poly = next;
    }
    poly
}

/// Inverse over `Z_m` for any `m` via Cayley–Hamilton:
/// `A^{-1} = -c_n^{-1} (A^{n-1} + c_1 A^{n-2} + ... + c_{n-1} I)`.
fn mat_inverse(a: &[u64], dim: usize, m: u64) -> Option<Vec<u64>> {
    let cp = char_poly(a, dim, m);
    let cn_inv = inv_mod(cp[dim], m)?;
    // Horner: B = (((I)A + c_1 I)A + c_2 I)... up to c_{n-1}
    let mut b = identity(dim);
    for &c in cp.iter().take(dim).skip(1) {
        b = mat_mul(&b, a, dim, m);
        for i in 0..dim {
            b[i * dim + i] = add_mod(b[i * dim + i], c, m);
        }
    }
    let scale = sub_mod(0, cn_inv, m);
    Some(b.into_iter().map(|x| mul_mod(x, scale, m)).collect())
}

fn identity(dim: usize) -> Vec<u64> {
    let mut e = vec![0u64; dim * dim];
    for i in 0..dim {
        e[i * dim + i] = 1;
    }
    e
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    num_prime::nt_funcs::is_prime64(n)
}

fn prime_factors(m: u64) -> Vec<u64> {
    num_prime::nt_funcs::factorize64(m).into_keys().collect()
}

/// `1 - φ(m)/m`.
fn zm_unit_deficiency(m: u64) -> f64 {
    let fs = prime_factors(m);
    let log_frac: f64 = fs.iter().map(|&p| (-1.0 / p as f64).ln_1p()).sum();
    -log_frac.exp_m1()
}

/// `1 - |GL_dim(Z_m)| / m^{dim²}` = `1 - Π_p Π_{i=1..dim} (1 - p^{-i})`.
fn matrix_unit_deficiency(m: u64, dim: usize) -> f64 {
    let fs = prime_factors(m);
    let mut log_frac = 0.0;
    for &p in &fs {
        for i in 1..=dim as i32 {
            log_frac += (-(p as f64).powi(-i)).ln_1p();
        }
    }
    -f64::exp_m1(log_frac)
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn inverse_mod_2_64(a: u64) -> u64 {
    // Newton iteration; each step doubles the number of correct low bits.
    let mut x = a;
    for _ in 0..6 {
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn lab(r: &Ring, v: u64) -> Label {
        r.from_u64(v)
    }

    #[test]
    fn zm_add_wraps() {
        let r = Ring::zm(6).unwrap();
        let mut o = r.oracle(1);
        assert_eq!(o.add(&lab(&r, 4), &lab(&r, 5)).unwrap(), lab(&r, 3));
    }

    #[test]
    fn z7_inverse_of_three_is_five() {
        let r = Ring::zm(7).unwrap();
        let mut o = r.oracle(1);
        assert_eq!(o.invert(&lab(&r, 3)).unwrap(), lab(&r, 5));
    }

    #[test]
    fn invalid_label_is_bottom() {
        let r = Ring::zm(6).unwrap();
        let mut o = r.oracle(1);
        let bad = Label::from_bytes(vec![6u8]);
        let e = o.mul(&lab(&r, 4), &bad).unwrap_err();
        assert!(e.is_bottom());
        let short = Label::from_bytes(Vec::<u8>::new());
        assert!(o.add(&short, &lab(&r, 1)).unwrap_err().is_bottom());
    }

    #[test]
    fn z2_add_is_xor() {
        let r = Ring::zm(2).unwrap();
        let mut o = r.oracle(0);
        for a in 0..2 {
            for b in 0..2 {
                let s = o.add(&lab(&r, a), &lab(&r, b)).unwrap();
                assert_eq!(r.decode_scalar(&s).unwrap(), a ^ b);
            }
        }
    }

    #[test]
    fn z97_is_field_and_z15_is_not() {
        let f = Ring::zm(97).unwrap();
        assert!(f.is_field());
        let mut o = f.oracle(3);
        for v in 1..97 {
            assert!(o.invert(&lab(&f, v)).is_ok());
        }
        let r = Ring::zm(15).unwrap();
        assert!(!r.is_field());
        let mut o = r.oracle(3);
        assert_eq!(o.invert(&lab(&r, 3)).unwrap_err(), Error::NotInvertible);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Ring::zm(1).is_err());
        assert!(Ring::matrix(5, 0).is_err());
        assert!(Ring::prime_field(15).is_err());
        assert!(Ring::parse("foo:3").is_err());
        assert!(Ring::parse("zm:x").is_err());
    }

    #[test]
    fn parse_grammar() {
        assert_eq!(Ring::parse("zm:6").unwrap().family(), Family::Zm { modulus: 6 });
        assert!(Ring::parse("gf:97").unwrap().is_field());
        assert_eq!(Ring::parse("mat:5:2").unwrap().family(), Family::Matrix { modulus: 5, dim: 2 });
    }

    #[test]
    fn matrix_dim_one_matches_zm() {
        let m = Ring::matrix(11, 1).unwrap();
        let z = Ring::zm(11).unwrap();
        let mut om = m.oracle(0);
        let mut oz = z.oracle(0);
        for a in 0..11 {
            for b in 0..11 {
                let pm = om.mul(&m.from_u64(a), &m.from_u64(b)).unwrap();
                let pz = oz.mul(&z.from_u64(a), &z.from_u64(b)).unwrap();
                assert_eq!(m.decode(&pm).unwrap(), z.decode(&pz).unwrap());
            }
        }
        assert_eq!(m.label_bytes(), z.label_bytes());
    }

    #[test]
    fn matrix_identity_is_neutral() {
        let r = Ring::matrix(5, 2).unwrap();
        let mut o = r.oracle(9);
        let id = o.one();
        for _ in 0..50 {
            let x = o.sample();
            assert_eq!(o.mul(&id, &x).unwrap(), x);
            assert_eq!(o.mul(&x, &id).unwrap(), x);
        }
    }

    #[test]
    fn matrix_inverse_over_composite_modulus() {
        // [[2,3],[3,2]] over Z_6: no unit entry in the first column, det = -5 = 1.
        let r = Ring::matrix(6, 2).unwrap();
        let mut o = r.oracle(0);
        let a = r.encode(&[2, 3, 3, 2]).unwrap();
        let inv = o.invert(&a).unwrap();
        let one = o.one();
        assert_eq!(o.mul(&a, &inv).unwrap(), one);
        assert_eq!(o.mul(&inv, &a).unwrap(), one);
        let singular = r.encode(&[2, 4, 1, 2]).unwrap();
        assert!(o.invert(&singular).is_err());
    }

    #[test]
    fn exhaustive_unit_fractions() {
        let mut o = Ring::zm(4).unwrap().oracle(0);
        assert_eq!(unit_fraction_exhaustive(&mut o), Some(Ratio::new(1, 2)));
        // |GL(2,2)| = 6
        let mut o = Ring::matrix(2, 2).unwrap().oracle(0);
        assert_eq!(unit_fraction_exhaustive(&mut o), Some(Ratio::new(6, 16)));
        let mut o = Ring::matrix(3, 3).unwrap().oracle(0);
        assert_eq!(
            unit_fraction_exhaustive(&mut o),
            Some(Ratio::new(11232, 19683)) // |GL(3,3)| = (27-1)(27-3)(27-9)
        );
    }

    #[test]
    fn prime_field_unit_estimate_near_one() {
        let mut o = Ring::prime_field(2305843009213693951).unwrap().oracle(5);
        assert_eq!(is_unit_fraction_estimate(&mut o, 500), Ratio::new(1, 1));
    }

    #[test]
    fn pseudo_field_flags() {
        assert!(Ring::zm(97).unwrap().is_pseudo_field());
        assert!(!Ring::zm(6).unwrap().is_pseudo_field());
        assert!(!Ring::zm(1 << 16).unwrap().is_pseudo_field());
        // product of two primes near 2^31: deficiency ~ 2^-30
        assert!(Ring::zm(2147483647 * 2147483629).unwrap().is_pseudo_field());
        assert!(!Ring::matrix(5, 2).unwrap().is_pseudo_field());
        assert!(Ring::matrix(2305843009213693951, 2).unwrap().is_pseudo_field());
    }

    #[test]
    fn keyed_labels_permute_but_preserve_arithmetic() {
        let std = Ring::zm(97).unwrap();
        let keyed = std.with_keyed_labels(42);
        let mut a = std.oracle(0);
        let mut b = keyed.oracle(0);
        let mut differs = 0;
        for x in 0..97 {
            for y in [0u64, 1, 50, 96] {
                let s1 = a.mul(&std.from_u64(x), &std.from_u64(y)).unwrap();
                let s2 = b.mul(&keyed.from_u64(x), &keyed.from_u64(y)).unwrap();
                assert_eq!(std.decode(&s1).unwrap(), keyed.decode(&s2).unwrap());
            }
            if std.from_u64(x) != keyed.from_u64(x) {
                differs += 1;
            }
        }
        assert!(differs > 90);
    }

    #[test]
    fn ring_axioms_exhaustive_small() {
        for ring in [
            Ring::zm(6).unwrap(),
            Ring::zm(7).unwrap(),
            Ring::matrix(2, 2).unwrap(),
            Ring::zm(5).unwrap().with_keyed_labels(7),
        ] {
            let elems = ring.elements().unwrap();
            let mut o = ring.oracle(0);
            for a in &elems {
                for b in &elems {
                    let ab = o.add(a, b).unwrap();
                    assert_eq!(ab, o.add(b, a).unwrap());
                    let d = o.sub(a, b).unwrap();
                    assert_eq!(&o.add(&d, b).unwrap(), a);
                    for c in elems.iter().step_by(3) {
                        let l = o.add(&ab, c).unwrap();
                        let bc = o.add(b, c).unwrap();
                        assert_eq!(l, o.add(a, &bc).unwrap());
                        let lhs = o.mul(a, &bc).unwrap();
                        let t1 = o.mul(a, b).unwrap();
                        let t2 = o.mul(a, c).unwrap();
                        assert_eq!(lhs, o.add(&t1, &t2).unwrap());
                        let m1 = o.mul(&t1, c).unwrap();
                        let m2 = o.mul(b, c).unwrap();
                        assert_eq!(m1, o.mul(a, &m2).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn counter_counts_every_call() {
        let r = Ring::zm(11).unwrap();
        let mut o = r.oracle(0);
        let x = o.sample();
        let y = o.one();
        let _ = o.add(&x, &y);
        let _ = o.invert(&Label::from_bytes(vec![200u8]));
        assert_eq!(o.counter().oracle_calls, 4);
        assert_eq!(o.counter().calls_of(Command::Invert), 1);
        assert_eq!(o.counter().calls_of(Command::Sample), 1);
    }
}
