//! Toy Paillier cryptosystem with `g = N + 1`. Deterministic given the RNG; not for real use.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use super::UncontrolledHe;
use crate::error::{Abort, Error, Result};

/// Miller–Rabin rounds used when generating primes.
pub const MILLER_RABIN_ROUNDS: usize = 64;

const SMALL_PRIMES: [u32; 24] =
    [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierPublicKey {
    pub n: BigUint,
    n2: BigUint,
}

impl PaillierPublicKey {
    pub fn new(n: BigUint) -> Self {
        let n2 = &n * &n;
        PaillierPublicKey { n, n2 }
    }

    pub fn bits(&self) -> u64 {
        self.n.bits()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierSecretKey {
    pub p: BigUint,
    pub q: BigUint,
    lambda: BigUint,
    mu: BigUint,
    pk: PaillierPublicKey,
}

/// JSON envelope for key material; decimal strings.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct KeyEnvelope {
    insecure_test_fixture: bool,
    n: String,
    p: String,
    q: String,
}

impl PaillierSecretKey {
    pub fn from_primes(p: BigUint, q: BigUint) -> Result<Self> {
        if p == q {
            return Err(Error::param("Paillier primes must differ"));
        }
        let n = &p * &q;
        let phi = (&p - 1u32) * (&q - 1u32);
        if !n.gcd(&phi).is_one() {
            return Err(Error::param("gcd(N, phi(N)) must be 1"));
        }
        let lambda = (&p - 1u32).lcm(&(&q - 1u32));
        let mu = lambda.modinv(&n).ok_or_else(|| Error::param("lambda is not invertible mod N"))?;
        Ok(PaillierSecretKey { p, q, lambda, mu, pk: PaillierPublicKey::new(n) })
    }

    pub fn public(&self) -> &PaillierPublicKey {
        &self.pk
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&KeyEnvelope {
            insecure_test_fixture: true,
            n: self.pk.n.to_str_radix(10),
            p: self.p.to_str_radix(10),
            q: self.q.to_str_radix(10),
        })
        .expect("envelope serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let env: KeyEnvelope =
            serde_json::from_str(s).map_err(|e| Error::param(format!("bad key envelope: {e}")))?;
        let num = |x: &str| {
            BigUint::parse_bytes(x.as_bytes(), 10)
                .ok_or_else(|| Error::param(format!("bad decimal integer {x:?}")))
        };
        let sk = PaillierSecretKey::from_primes(num(&env.p)?, num(&env.q)?)?;
        if sk.pk.n != num(&env.n)? {
            return Err(Error::param("N does not match p·q"));
        }
        Ok(sk)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaillierCiphertext(pub BigUint);

/// Probabilistic primality test with `rounds` random bases from `rng`.
pub fn miller_rabin(n: &BigUint, rounds: usize, rng: &mut ChaCha20Rng) -> bool {
    let two = BigUint::from(2u32);
    if *n <= two {
        return *n == two;
    }
    for &p in &SMALL_PRIMES {
        let p = BigUint::from(p);
        if *n == p {
            return true;
        }
    }
    if n.is_even() || SMALL_PRIMES.iter().any(|&p| (n % p).is_zero()) {
        return false;
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().expect("n - 1 > 0");
    let d = &n1 >> s;
    'witness: for _ in 0..rounds {
        let a = rng.gen_biguint_range(&two, &n1);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Random prime of exactly `bits` bits with the top two bits set, so that a product of two such
/// primes has exactly `2·bits` bits.
pub fn random_prime(bits: u64, rng: &mut ChaCha20Rng) -> BigUint {
    assert!(bits >= 8, "prime too small");
    let top = (BigUint::one() << (bits - 1)) | (BigUint::one() << (bits - 2));
    loop {
        let c = rng.gen_biguint(bits) | &top | BigUint::one();
        if miller_rabin(&c, MILLER_RABIN_ROUNDS, rng) {
            return c;
        }
    }
}

/// Paillier as an uncontrolled-ring scheme: the plaintext ring `Z_N` comes out of key
/// generation.
#[derive(Debug, Clone, Copy, Default)]
pub struct Paillier;

impl Paillier {
    /// Bits per prime for security parameter `k'`: `max(64, ⌈(k'+2)/2⌉)`, giving
    /// `N > 2^{k'+1}`.
    pub fn prime_bits(security: u32) -> u64 {
        64u64.max((security as u64 + 3) / 2)
    }

    pub fn keygen_with_prime_bits(
        bits: u64,
        rng: &mut ChaCha20Rng,
    ) -> Result<(PaillierPublicKey, PaillierSecretKey)> {
        loop {
            let p = random_prime(bits, rng);
            let q = random_prime(bits, rng);
            if p == q {
                continue;
            }
            let sk = PaillierSecretKey::from_primes(p, q)?;
            return Ok((sk.pk.clone(), sk));
        }
    }

    fn fresh_unit(pk: &PaillierPublicKey, rng: &mut ChaCha20Rng) -> BigUint {
        loop {
            let r = rng.gen_biguint_range(&BigUint::one(), &pk.n);
            if r.gcd(&pk.n).is_one() {
                return r;
            }
        }
    }

    fn rerandomize(pk: &PaillierPublicKey, c: BigUint, rng: &mut ChaCha20Rng) -> PaillierCiphertext {
        let r = Paillier::fresh_unit(pk, rng);
        PaillierCiphertext(c * r.modpow(&pk.n, &pk.n2) % &pk.n2)
    }
}

impl UncontrolledHe for Paillier {
    type PublicKey = PaillierPublicKey;
    type SecretKey = PaillierSecretKey;
    type Ciphertext = PaillierCiphertext;

    fn keygen(&self, security: u32, rng: &mut ChaCha20Rng) -> Result<(PaillierPublicKey, PaillierSecretKey)> {
        Paillier::keygen_with_prime_bits(Paillier::prime_bits(security), rng)
    }

    fn plaintext_modulus<'a>(&self, pk: &'a PaillierPublicKey) -> &'a BigUint {
        &pk.n
    }

    fn encrypt(
        &self,
        pk: &PaillierPublicKey,
        m: &BigUint,
        rng: &mut ChaCha20Rng,
    ) -> Result<PaillierCiphertext> {
        if *m >= pk.n {
            return Err(Error::param("plaintext is not below N"));
        }
        // (N+1)^m = 1 + mN mod N^2
        let gm = (BigUint::one() + m * &pk.n) % &pk.n2;
        Ok(Paillier::rerandomize(pk, gm, rng))
    }

    fn decrypt(&self, sk: &PaillierSecretKey, c: &PaillierCiphertext) -> Result<BigUint> {
        let pk = &sk.pk;
        if c.0 >= pk.n2 || !c.0.gcd(&pk.n).is_one() {
            return Err(Abort::new("he-decrypt", "ciphertext is not a unit mod N^2").into());
        }
        let x = c.0.modpow(&sk.lambda, &pk.n2);
        let l = (x - 1u32) / &pk.n;
        Ok(l * &sk.mu % &pk.n)
    }

    fn combine(
        &self,
        pk: &PaillierPublicKey,
        c1: &PaillierCiphertext,
        c2: &PaillierCiphertext,
        rng: &mut ChaCha20Rng,
    ) -> PaillierCiphertext {
        Paillier::rerandomize(pk, &c1.0 * &c2.0 % &pk.n2, rng)
    }

    fn combine_scalar(
        &self,
        pk: &PaillierPublicKey,
        c: &PaillierCiphertext,
        alpha: &BigUint,
        rng: &mut ChaCha20Rng,
    ) -> PaillierCiphertext {
        Paillier::rerandomize(pk, c.0.modpow(alpha, &pk.n2), rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn miller_rabin_agrees_with_u64_test() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        for n in 0u64..2000 {
            assert_eq!(miller_rabin(&BigUint::from(n), 16, &mut rng), crate::ring::is_prime_u64(n), "{n}");
        }
        // Carmichael numbers
        for n in [561u64, 41041, 825265, 321197185] {
            assert!(!miller_rabin(&BigUint::from(n), 16, &mut rng));
        }
    }

    #[test]
    fn generated_primes_have_requested_size() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let p = random_prime(64, &mut rng);
        assert_eq!(p.bits(), 64);
        assert!(p.bit(62));
        assert_eq!(Paillier::prime_bits(8), 64);
        assert_eq!(Paillier::prime_bits(200), 101);
    }

    #[test]
    fn homomorphic_laws_randomized() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (pk, sk) = Paillier.keygen(40, &mut rng).unwrap();
        assert!(pk.bits() > 41);
        for _ in 0..50 {
            let x = rng.gen_biguint_below(&pk.n);
            let y = rng.gen_biguint_below(&pk.n);
            let cx = Paillier.encrypt(&pk, &x, &mut rng).unwrap();
            let cy = Paillier.encrypt(&pk, &y, &mut rng).unwrap();
            assert_eq!(Paillier.decrypt(&sk, &cx).unwrap(), x);
            let sum = Paillier.combine(&pk, &cx, &cy, &mut rng);
            assert_eq!(Paillier.decrypt(&sk, &sum).unwrap(), (&x + &y) % &pk.n);
            let prod = Paillier.combine_scalar(&pk, &cx, &y, &mut rng);
            assert_eq!(Paillier.decrypt(&sk, &prod).unwrap(), (&x * &y) % &pk.n);
        }
        let m = BigUint::from(rng.gen::<u32>());
        let c1 = Paillier.encrypt(&pk, &m, &mut rng).unwrap();
        let c2 = Paillier.encrypt(&pk, &m, &mut rng).unwrap();
        assert_ne!(c1, c2);
    }

    #[test]
    fn key_envelope_round_trip() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (_, sk) = Paillier.keygen(40, &mut rng).unwrap();
        let json = sk.to_json();
        assert!(json.contains("\"insecure_test_fixture\":true"));
        assert_eq!(PaillierSecretKey::from_json(&json).unwrap(), sk);
    }

    #[test]
    fn garbage_ciphertext_aborts() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let (pk, sk) = Paillier.keygen(40, &mut rng).unwrap();
        let bad = PaillierCiphertext(pk.n.clone());
        assert!(Paillier.decrypt(&sk, &bad).unwrap_err().is_abort());
    }
}
