//! Shared fixtures for the criterion benchmarks.

use bbmpc::circuit::{random_inputs, random_layered_circuit};
use bbmpc::{Circuit, Inputs, Ring};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// A strictly layered circuit of `width` gates per layer with inputs drawn from `seed`.
pub fn layered_instance(ring: &Ring, width: usize, layers: usize, seed: u64) -> (Circuit, Inputs) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let c = random_layered_circuit(&mut rng, width, layers, 0.5);
    let inputs = random_inputs(&c, &mut ring.oracle(seed));
    (c, inputs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_are_reproducible() {
        let r = Ring::prime_field(97).unwrap();
        assert_eq!(layered_instance(&r, 4, 2, 1), layered_instance(&r, 4, 2, 1));
    }
}
