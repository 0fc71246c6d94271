//! Product sharing from additively homomorphic encryption.
//!
//! [`ControlledHe`] schemes let the caller pick the plaintext ring; [`Theta`] runs over them.
//! [`UncontrolledHe`] schemes fix the plaintext ring `Z_N` at key generation; [`Psi`] uses one
//! to share products over `Z_M` (standard representation) by computing over the integers and
//! blinding with a multiple of `M`. Protocols reach the scheme only through the trait methods.

mod mock;
mod paillier;

use std::collections::HashMap;

use num_bigint::{BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

pub use mock::{MockCiphertext, MockHe, MockPublicKey, MockSecretKey};
pub use paillier::{
    miller_rabin, random_prime, Paillier, PaillierCiphertext, PaillierPublicKey, PaillierSecretKey,
    MILLER_RABIN_ROUNDS,
};

use crate::error::{Abort, Error, Result};
use crate::ot::{CellKind, PayloadKind, Session};
use crate::pdtshr::{check_inputs, record_io, record_out, ProductSharing};
use crate::ring::{Family, Label, Ring};

/// Additively homomorphic encryption whose plaintext ring is chosen by the caller.
pub trait ControlledHe {
    type PublicKey: Clone;
    type SecretKey;
    type Ciphertext: Clone;

    fn name(&self) -> &'static str;
    fn keygen(
        &self,
        rng: &mut ChaCha20Rng,
        security: u32,
        ring: &Ring,
    ) -> Result<(Self::PublicKey, Self::SecretKey)>;
    fn encrypt(&self, pk: &Self::PublicKey, x: &Label, rng: &mut ChaCha20Rng) -> Result<Self::Ciphertext>;
    fn decrypt(&self, sk: &Self::SecretKey, c: &Self::Ciphertext) -> Result<Label>;
    /// Encryption of the sum of the two plaintexts.
    fn combine(
        &self,
        pk: &Self::PublicKey,
        c1: &Self::Ciphertext,
        c2: &Self::Ciphertext,
        rng: &mut ChaCha20Rng,
    ) -> Result<Self::Ciphertext>;
    /// Encryption of `x·alpha`, where `c` encrypts `x`.
    fn combine_scalar(
        &self,
        pk: &Self::PublicKey,
        c: &Self::Ciphertext,
        alpha: &Label,
        rng: &mut ChaCha20Rng,
    ) -> Result<Self::Ciphertext>;
}

/// Additively homomorphic encryption over `Z_N`, with `N` chosen by key generation and
/// `N > 2^security`.
pub trait UncontrolledHe {
    type PublicKey: Clone;
    type SecretKey;
    type Ciphertext: Clone;

    fn keygen(&self, security: u32, rng: &mut ChaCha20Rng) -> Result<(Self::PublicKey, Self::SecretKey)>;
    fn plaintext_modulus<'a>(&self, pk: &'a Self::PublicKey) -> &'a BigUint;
    fn encrypt(&self, pk: &Self::PublicKey, m: &BigUint, rng: &mut ChaCha20Rng) -> Result<Self::Ciphertext>;
    fn decrypt(&self, sk: &Self::SecretKey, c: &Self::Ciphertext) -> Result<BigUint>;
    fn combine(
        &self,
        pk: &Self::PublicKey,
        c1: &Self::Ciphertext,
        c2: &Self::Ciphertext,
        rng: &mut ChaCha20Rng,
    ) -> Self::Ciphertext;
    fn combine_scalar(
        &self,
        pk: &Self::PublicKey,
        c: &Self::Ciphertext,
        alpha: &BigUint,
        rng: &mut ChaCha20Rng,
    ) -> Self::Ciphertext;
}

/// Product sharing over any ring with a controlled-ring scheme. The left party owns the key;
/// one key per left party is generated on first use and reused.
pub struct Theta<H: ControlledHe> {
    pub he: H,
    pub security: u32,
    keys: HashMap<usize, (H::PublicKey, H::SecretKey)>,
}

impl<H: ControlledHe> Theta<H> {
    pub fn new(he: H, security: u32) -> Self {
        Theta { he, security, keys: HashMap::new() }
    }
}

impl<H: ControlledHe> ProductSharing for Theta<H> {
    fn name(&self) -> String {
        format!("theta({})", self.he.name())
    }

    fn share(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        a: &[Label],
        b: &[Label],
    ) -> Result<(Vec<Label>, Vec<Label>)> {
        check_inputs(self, a, b)?;
        record_io(s, left, right, a, b);
        if !self.keys.contains_key(&left) {
            let ring = s.ring().clone();
            let kp = self.he.keygen(s.oracle(left).rng(), self.security, &ring)?;
            s.note(left, right, PayloadKind::Setup, 1);
            self.keys.insert(left, kp);
        }
        let (pk, sk) = &self.keys[&left];

        let c = self.he.encrypt(pk, &a[0], s.oracle(left).rng())?;
        s.note(left, right, PayloadKind::Ciphertexts, 1);

        let o = s.oracle(right);
        let r = o.sample();
        let zb = o.neg(&r)?;
        let c1 = self.he.encrypt(pk, &r, o.rng())?;
        let cb = self.he.combine_scalar(pk, &c, &b[0], o.rng())?;
        let c2 = self.he.combine(pk, &cb, &c1, o.rng())?;
        s.remember(right, "r", CellKind::Random, std::slice::from_ref(&r));
        s.note(right, left, PayloadKind::Ciphertexts, 1);

        let v = self.he.decrypt(sk, &c2).map_err(|e| match e {
            Error::Abort(a) => Error::Abort(a),
            other => Abort::new("theta-decrypt", other.to_string()).into(),
        })?;
        let (za, zb) = (vec![v], vec![zb]);
        record_out(s, left, right, &za, &zb);
        Ok((za, zb))
    }
}

/// `⌈log2 x⌉` for `x >= 1`.
fn ceil_log2(x: u128) -> u32 {
    if x <= 1 {
        0
    } else {
        128 - (x - 1).leading_zeros()
    }
}

/// Security parameter for the key: `⌈2 log2 M⌉ + 2 + k`, plus `⌈log2 dim⌉` for `dim × dim`
/// matrices.
pub fn psi_key_security(m: u64, stat_k: u32, dim: usize) -> u32 {
    ceil_log2(m as u128 * m as u128) + ceil_log2(dim as u128) + 2 + stat_k
}

/// Size of the range the blinding multiplier `s` is drawn from: `2·2^k·dim·M`.
pub fn psi_blinding_range(m: u64, stat_k: u32, dim: usize) -> BigUint {
    BigUint::from(2u32) * (BigUint::from(1u32) << stat_k) * BigUint::from(dim) * BigUint::from(m)
}

/// Product sharing over `Z_M` or `dim × dim` matrices over `Z_M` with Paillier. Requires the
/// standard representation.
pub struct Psi {
    pub stat_k: u32,
    keys: HashMap<(usize, u32), (PaillierPublicKey, PaillierSecretKey)>,
}

impl Psi {
    pub fn new(stat_k: u32) -> Psi {
        Psi { stat_k, keys: HashMap::new() }
    }

    fn key(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        m: u64,
        dim: usize,
    ) -> Result<(PaillierPublicKey, PaillierSecretKey)> {
        let security = psi_key_security(m, self.stat_k, dim);
        if !self.keys.contains_key(&(left, security)) {
            let kp = Paillier.keygen(security, s.oracle(left).rng())?;
            // N > 4·2^k·dim·M^2 is what keeps ab + r + sM from wrapping
            let need = BigUint::from(4u32)
                * (BigUint::from(1u32) << self.stat_k)
                * BigUint::from(dim)
                * BigUint::from(m)
                * BigUint::from(m);
            if kp.0.n <= need {
                return Err(Error::param("Paillier modulus too small for the blinding range"));
            }
            s.note(left, right, PayloadKind::Setup, 1);
            self.keys.insert((left, security), kp);
        }
        Ok(self.keys[&(left, security)].clone())
    }

    /// `dim × dim` matrices over `Z_M` as row-major entries. The left party encrypts its
    /// `dim²` entries; the right party returns `dim²` blinded ciphertexts of the product
    /// entries. Returns the two share matrices.
    #[allow(clippy::too_many_arguments)]
    pub fn share_matrix(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        a: &[u64],
        b: &[u64],
        m: u64,
        dim: usize,
    ) -> Result<(Vec<u64>, Vec<u64>)> {
        if a.len() != dim * dim || b.len() != dim * dim || dim == 0 {
            return Err(Error::param("psi expects two dim×dim matrices"));
        }
        if m < 2 || a.iter().chain(b).any(|&x| x >= m) {
            return Err(Error::param("psi entries must lie in [0, M)"));
        }
        let (pk, sk) = self.key(s, left, right, m, dim)?;
        let he = Paillier;

        let rng = s.oracle(left).rng();
        let cts: Vec<PaillierCiphertext> =
            a.iter().map(|&x| he.encrypt(&pk, &BigUint::from(x), rng)).collect::<Result<_>>()?;
        s.note(left, right, PayloadKind::Ciphertexts, cts.len() as u64);

        let range = psi_blinding_range(m, self.stat_k, dim);
        let big_m = BigUint::from(m);
        let rng = s.oracle(right).rng();
        let mut back = Vec::with_capacity(dim * dim);
        let mut zb = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                let r: u64 = rng.gen_range(0..m);
                let sm = rng.gen_biguint_below(&range) * &big_m;
                let mut acc = he.encrypt(&pk, &BigUint::from(r), rng)?;
                let blind = he.encrypt(&pk, &sm, rng)?;
                acc = he.combine(&pk, &acc, &blind, rng);
                for l in 0..dim {
                    let t = he.combine_scalar(&pk, &cts[i * dim + l], &BigUint::from(b[l * dim + j]), rng);
                    acc = he.combine(&pk, &acc, &t, rng);
                }
                back.push(acc);
                zb.push((m - r) % m);
            }
        }
        s.note(right, left, PayloadKind::Ciphertexts, back.len() as u64);

        let mut za = Vec::with_capacity(dim * dim);
        for c in &back {
            let v = he.decrypt(&sk, c)? % &big_m;
            za.push(v.to_u64().expect("reduced mod M"));
        }
        Ok((za, zb))
    }
}

impl ProductSharing for Psi {
    fn name(&self) -> String {
        format!("psi(k={})", self.stat_k)
    }

    fn share(
        &mut self,
        s: &mut Session,
        left: usize,
        right: usize,
        a: &[Label],
        b: &[Label],
    ) -> Result<(Vec<Label>, Vec<Label>)> {
        check_inputs(self, a, b)?;
        let ring = s.ring().clone();
        if !ring.uses_standard_labels() {
            return Err(Error::param("psi needs the standard representation of Z_M"));
        }
        record_io(s, left, right, a, b);
        let dim = match ring.family() {
            Family::Zm { .. } => 1,
            Family::Matrix { dim, .. } => dim,
        };
        let ea = ring.decode(&a[0])?;
        let eb = ring.decode(&b[0])?;
        let (za, zb) = self.share_matrix(s, left, right, &ea, &eb, ring.modulus(), dim)?;
        let (za, zb) = (vec![ring.encode(&za)?], vec![ring.encode(&zb)?]);
        record_out(s, left, right, &za, &zb);
        Ok((za, zb))
    }
}

/// Matrix product sharing over `Z_M` with Paillier; `a`, `b` row-major `dim × dim`.
pub fn psi_matrix(
    s: &mut Session,
    psi: &mut Psi,
    a: &[u64],
    b: &[u64],
    m: u64,
    dim: usize,
) -> Result<(Vec<u64>, Vec<u64>)> {
    psi.share_matrix(s, 0, 1, a, b, m, dim)
}

/// Exact statistical distance between `ab + r + sM` and `w + sM`, `w = (ab + r) mod M`, for
/// `s` uniform on `Z_{2·2^k·M}`.
pub fn blinding_distance_bruteforce(m: u64, k: u32, a: u64, b: u64, r: u64) -> Result<BigRational> {
    if !(2..=8).contains(&m) || k > 6 {
        return Err(Error::param("enumeration limited to M <= 8 and k <= 6"));
    }
    if a >= m || b >= m || r >= m {
        return Err(Error::param("a, b, r must lie in [0, M)"));
    }
    let range = 2 * (1u64 << k) * m;
    let x = a * b + r;
    let w = x % m;
    let d1: std::collections::HashSet<u64> = (0..range).map(|s| x + s * m).collect();
    let only_in_d1 = (0..range).filter(|s| !d1.contains(&(w + s * m))).count();
    // both uniform on `range` distinct points: distance = |D2 \ D1| / range
    Ok(BigRational::new((only_in_d1 as u64).into(), range.into()))
}

/// Maximum of [`blinding_distance_bruteforce`] over all `(a, b, r)`, with a maximizer.
pub fn blinding_distance_worst(m: u64, k: u32) -> Result<(BigRational, (u64, u64, u64))> {
    let mut best = (BigRational::zero(), (0, 0, 0));
    for a in 0..m {
        for b in 0..m {
            for r in 0..m {
                let d = blinding_distance_bruteforce(m, k, a, b, r)?;
                if d > best.0 {
                    best = (d, (a, b, r));
                }
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn frac(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn theta_mock_z7() {
        let r = Ring::zm(7).unwrap();
        let mut th = Theta::new(MockHe, 40);
        let mut s = Session::two_party(&r, 0);
        let (za, zb) = th.share(&mut s, 0, 1, &[r.from_u64(3)], &[r.from_u64(4)]).unwrap();
        let mut o = r.oracle(0);
        assert_eq!(o.add(&za[0], &zb[0]).unwrap(), r.from_u64(5));
        assert_eq!(s.stats().ciphertexts, 2);
        let (za, zb) = th.share(&mut s, 0, 1, &[r.from_u64(3)], &[r.from_u64(0)]).unwrap();
        assert_eq!(za[0], o.neg(&zb[0]).unwrap());
        // key reused: still one setup message, two more ciphertexts
        let st = s.stats();
        assert_eq!(st.ciphertexts, 4);
        assert_eq!(st.setup_elements, 1);
    }

    #[test]
    fn theta_matrix_ring_keeps_order() {
        let r = Ring::matrix(5, 2).unwrap();
        let mut th = Theta::new(MockHe, 40);
        let mut o = r.oracle(3);
        for seed in 0..20 {
            let (a, b) = (o.sample(), o.sample());
            let mut s = Session::two_party(&r, seed);
            let (za, zb) =
                th.share(&mut s, 0, 1, std::slice::from_ref(&a), std::slice::from_ref(&b)).unwrap();
            assert_eq!(o.add(&za[0], &zb[0]).unwrap(), o.mul(&a, &b).unwrap());
        }
    }

    #[test]
    fn psi_key_size_formula() {
        assert_eq!(psi_key_security(3, 2, 1), 8);
        assert_eq!(psi_key_security(5, 40, 1), 47);
        assert_eq!(psi_key_security(5, 40, 2), 48);
    }

    #[test]
    fn psi_z5_and_zero() {
        let r = Ring::zm(5).unwrap();
        let mut psi = Psi::new(40);
        for seed in 0..200u64 {
            let (a, b) = (seed % 5, (seed / 5) % 5);
            let mut s = Session::two_party(&r, seed);
            let (za, zb) = psi.share(&mut s, 0, 1, &[r.from_u64(a)], &[r.from_u64(b)]).unwrap();
            let sum = r.decode_scalar(&za[0]).unwrap() + r.decode_scalar(&zb[0]).unwrap();
            assert_eq!(sum % 5, a * b % 5);
        }
    }

    #[test]
    fn psi_rejects_keyed_labels() {
        let r = Ring::zm(5).unwrap().with_keyed_labels(9);
        let mut s = Session::two_party(&r, 0);
        let x = r.from_u64(1);
        assert!(Psi::new(8).share(&mut s, 0, 1, std::slice::from_ref(&x), std::slice::from_ref(&x)).is_err());
    }

    #[test]
    fn psi_matrix_schoolbook() {
        let mut psi = Psi::new(20);
        let r = Ring::zm(5).unwrap();
        let mut rng = r.oracle(7);
        for seed in 0..100 {
            let a: Vec<u64> = (0..4).map(|_| rng.rng().gen_range(0..5)).collect();
            let b: Vec<u64> = (0..4).map(|_| rng.rng().gen_range(0..5)).collect();
            let mut s = Session::two_party(&r, seed);
            let (za, zb) = psi_matrix(&mut s, &mut psi, &a, &b, 5, 2).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let want: u64 = (0..2).map(|l| a[i * 2 + l] * b[l * 2 + j]).sum::<u64>() % 5;
                    assert_eq!((za[i * 2 + j] + zb[i * 2 + j]) % 5, want);
                }
            }
            assert_eq!(s.stats().ciphertexts, 8);
        }
        let mut s = Session::two_party(&r, 1);
        psi_matrix(&mut s, &mut psi, &[2], &[3], 5, 1).unwrap();
        assert_eq!(s.stats().ciphertexts, 2);
    }

    #[test]
    fn blinding_distance_values() {
        // derived: the worst case shifts the support by M-1 multiples of M
        for (k, d) in [(2u32, 12i64), (3, 24), (4, 48)] {
            let (worst, _) = blinding_distance_worst(3, k).unwrap();
            assert_eq!(worst, frac(1, d));
            assert!(worst <= frac(1, 1 << k));
        }
        assert_eq!(blinding_distance_bruteforce(3, 4, 1, 1, 1).unwrap(), BigRational::zero());
        assert!(blinding_distance_bruteforce(9, 4, 1, 1, 1).is_err());
    }
}
