//! Insecure plaintext-carrying backend for exercising protocol logic over any ring.
//!
//! A ciphertext is the plaintext label, a random nonce and the id of the key it belongs to.
//! Nothing is hidden.

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use super::ControlledHe;
use crate::error::{Abort, Result};
use crate::ring::{Label, Ring};

#[derive(Debug, Clone)]
pub struct MockPublicKey {
    pub ring: Ring,
    pub key_id: u64,
}

#[derive(Debug, Clone)]
pub struct MockSecretKey {
    pub ring: Ring,
    pub key_id: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MockCiphertext {
    pub body: Label,
    pub nonce: u64,
    pub key_id: u64,
}

/// Controlled-ring mock: the plaintext ring is whatever ring the key is generated for.
#[derive(Debug, Clone, Copy, Default)]
pub struct MockHe;

fn foreign_key() -> crate::error::Error {
    Abort::new("he-decrypt", "ciphertext was produced under a different key").into()
}

impl ControlledHe for MockHe {
    type PublicKey = MockPublicKey;
    type SecretKey = MockSecretKey;
    type Ciphertext = MockCiphertext;

    fn name(&self) -> &'static str {
        "mock"
    }

    fn keygen(
        &self,
        rng: &mut ChaCha20Rng,
        _security: u32,
        ring: &Ring,
    ) -> Result<(MockPublicKey, MockSecretKey)> {
        let key_id = rng.gen();
        Ok((MockPublicKey { ring: ring.clone(), key_id }, MockSecretKey { ring: ring.clone(), key_id }))
    }

    fn encrypt(&self, pk: &MockPublicKey, x: &Label, rng: &mut ChaCha20Rng) -> Result<MockCiphertext> {
        pk.ring.decode(x)?;
        Ok(MockCiphertext { body: x.clone(), nonce: rng.gen(), key_id: pk.key_id })
    }

    fn decrypt(&self, sk: &MockSecretKey, c: &MockCiphertext) -> Result<Label> {
        if c.key_id != sk.key_id {
            return Err(foreign_key());
        }
        sk.ring.decode(&c.body)?;
        Ok(c.body.clone())
    }

    fn combine(
        &self,
        pk: &MockPublicKey,
        c1: &MockCiphertext,
        c2: &MockCiphertext,
        rng: &mut ChaCha20Rng,
    ) -> Result<MockCiphertext> {
        if c1.key_id != pk.key_id || c2.key_id != pk.key_id {
            return Err(foreign_key());
        }
        let body = pk.ring.oracle(0).add(&c1.body, &c2.body)?;
        Ok(MockCiphertext { body, nonce: rng.gen(), key_id: pk.key_id })
    }

    fn combine_scalar(
        &self,
        pk: &MockPublicKey,
        c: &MockCiphertext,
        alpha: &Label,
        rng: &mut ChaCha20Rng,
    ) -> Result<MockCiphertext> {
        if c.key_id != pk.key_id {
            return Err(foreign_key());
        }
        let body = pk.ring.oracle(0).mul(&c.body, alpha)?;
        Ok(MockCiphertext { body, nonce: rng.gen(), key_id: pk.key_id })
    }
}
