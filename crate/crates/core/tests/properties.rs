use bbmpc::circuit::{random_circuit, random_inputs, RandomCircuitSpec};
use bbmpc::packed::{block_mul_local, PackedParams};
use bbmpc::pdtshr::{Rho, Tau};
use bbmpc::{eval_plain, eval_shared, Circuit, Inputs, Label, ProductSharing, Ring, Session};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

fn ring_strategy() -> impl Strategy<Value = Ring> {
    prop_oneof![
        Just(Ring::zm(6).unwrap()),
        Just(Ring::zm(97).unwrap()),
        Just(Ring::prime_field((1 << 61) - 1).unwrap()),
        Just(Ring::matrix(5, 2).unwrap()),
        Just(Ring::zm(97).unwrap().with_keyed_labels(0xfeed)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_laws(ring in ring_strategy(), seed in any::<u64>()) {
        let mut o = ring.oracle(seed);
        let (a, b, c) = (o.sample(), o.sample(), o.sample());
        prop_assert_eq!(o.add(&a, &b).unwrap(), o.add(&b, &a).unwrap());
        let ab = o.mul(&a, &b).unwrap();
        let bc = o.mul(&b, &c).unwrap();
        prop_assert_eq!(o.mul(&ab, &c).unwrap(), o.mul(&a, &bc).unwrap());
        let sum = o.add(&b, &c).unwrap();
        let lhs = o.mul(&a, &sum).unwrap();
        let ac = o.mul(&a, &c).unwrap();
        prop_assert_eq!(lhs, o.add(&ab, &ac).unwrap());
        let one = o.one();
        prop_assert_eq!(o.mul(&one, &a).unwrap(), a.clone());
        let d = o.sub(&a, &b).unwrap();
        prop_assert_eq!(o.add(&d, &b).unwrap(), a);
    }

    #[test]
    fn two_party_products(ring in ring_strategy(), seed in any::<u64>()) {
        let mut o = ring.oracle(seed);
        let mut backend: Box<dyn ProductSharing> = Box::new(Rho::for_ring(&ring, 8));
        let (a, b) = (o.sample(), o.sample());
        let mut s = Session::two_party(&ring, seed);
        let (za, zb) = backend.share(&mut s, 0, 1, std::slice::from_ref(&a), std::slice::from_ref(&b)).unwrap();
        prop_assert_eq!(o.add(&za[0], &zb[0]).unwrap(), o.mul(&a, &b).unwrap());
    }

    #[test]
    fn packed_sharing_is_linear_and_multiplicative(seed in any::<u64>()) {
        let r = Ring::prime_field(97).unwrap();
        let mut o = r.oracle(seed);
        let p = PackedParams::new(&mut o, 16, 4, 5).unwrap();
        let (x, y) = (o.sample_vec(4), o.sample_vec(4));
        let sx = p.share(&mut o, &x, 5).unwrap();
        let sy = p.share(&mut o, &y, 5).unwrap();
        let sum: Vec<Label> = sx.iter().zip(&sy).map(|(a, b)| o.add(a, b).unwrap()).collect();
        prop_assert!(p.is_consistent(&mut o, &sum, 5).unwrap());
        let want: Vec<Label> = x.iter().zip(&y).map(|(a, b)| o.add(a, b).unwrap()).collect();
        prop_assert_eq!(p.reconstruct(&mut o, &sum, 5).unwrap(), want);
        let prod = block_mul_local(&mut o, &sx, &sy).unwrap();
        let want: Vec<Label> = x.iter().zip(&y).map(|(a, b)| o.mul(a, b).unwrap()).collect();
        prop_assert_eq!(p.reconstruct(&mut o, &prod, 10).unwrap(), want);
    }

    #[test]
    fn circuit_text_round_trips(seed in any::<u64>()) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let spec = RandomCircuitSpec { inputs_per_party: 3, gates: 20, max_mult_depth: 3, outputs: 2, allow_one: true };
        let c = random_circuit(&mut rng, spec);
        prop_assert_eq!(Circuit::parse(&c.to_string()).unwrap(), c);
    }
}

/// The same circuit over the standard and a keyed labelling gives the same decoded outputs,
/// in plain and in shared evaluation.
#[test]
fn results_do_not_depend_on_labels() {
    let std_ring = Ring::prime_field(1_000_003).unwrap();
    let keyed = std_ring.with_keyed_labels(0x1234_5678);
    let mut rng = ChaCha20Rng::seed_from_u64(11);
    for seed in 0..20 {
        let spec = RandomCircuitSpec {
            inputs_per_party: 2,
            gates: 24,
            max_mult_depth: 3,
            outputs: 3,
            allow_one: true,
        };
        let c = random_circuit(&mut rng, spec);
        let raw = random_inputs(&c, &mut std_ring.oracle(seed));
        let relabel = |ring: &Ring| -> Inputs {
            raw.iter().map(|(k, v)| (k.clone(), ring.encode(&std_ring.decode(v).unwrap()).unwrap())).collect()
        };
        let decode = |ring: &Ring, out: Vec<Label>| -> Vec<Vec<u64>> {
            out.iter().map(|l| ring.decode(l).unwrap()).collect()
        };
        let mut results = Vec::new();
        for ring in [&std_ring, &keyed] {
            let inputs = relabel(ring);
            let plain = eval_plain(&c, &inputs, &mut ring.oracle(0)).unwrap();
            let mut s = Session::two_party(ring, seed);
            let mut tau = Tau::new(8, 8);
            let shared = eval_shared(&mut s, &c, &inputs, &mut tau).unwrap();
            assert_eq!(plain, shared);
            results.push(decode(ring, plain));
        }
        assert_eq!(results[0], results[1]);
    }
}
