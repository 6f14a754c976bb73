use proptest::prelude::*;

use dumbo_setfa::attack::{extract_candidate_nibble, key_nibbles, NibbleCandidates};
use dumbo_setfa::dumbo::{self, phi1, phi2, AeadInputs};
use dumbo_setfa::hotspot::stabilizer;
use dumbo_setfa::spongent::{p_layer, p_layer_inv, sbox_layer, spongent, spongent_inv};
use dumbo_setfa::state::{State160, NIBBLES};
use dumbo_setfa::{canonical_netlist, FaultMap, NibbleSet, SboxTable};

fn state() -> impl Strategy<Value = State160> {
    any::<[u8; 20]>().prop_map(State160)
}

fn fault_map() -> impl Strategy<Value = FaultMap> {
    proptest::collection::btree_map(0usize..53, any::<bool>(), 1..=3).prop_map(|m| {
        let spec: Vec<String> = m.iter().map(|(w, p)| format!("w{w}={}", *p as u8)).collect();
        FaultMap::parse(&spec.join(",")).unwrap()
    })
}

proptest! {
    #[test]
    fn nibble_extract_insert_identity(s in state(), i in 0usize..40) {
        let mut t = s;
        t.set_nibble(i, s.nibble(i));
        prop_assert_eq!(t, s);
    }

    #[test]
    fn phi_maps_are_linear(x in state(), y in state()) {
        prop_assert_eq!(phi1(x ^ y), phi1(x) ^ phi1(y));
        prop_assert_eq!(phi2(x ^ y), phi2(x) ^ phi2(y));
    }

    #[test]
    fn layers_invert(x in state()) {
        prop_assert_eq!(p_layer_inv(p_layer(x)), x);
        prop_assert_eq!(p_layer(p_layer_inv(x)), x);
        prop_assert_eq!(spongent_inv(spongent(x)), x);
    }

    #[test]
    fn sbox_layer_output_in_image(x in state(), entries in any::<[u8; 16]>()) {
        let t = SboxTable::new(entries.map(|e| e & 0xf)).unwrap();
        let y = sbox_layer(x, &t);
        let image = t.image();
        prop_assert!((0..NIBBLES).all(|i| image.contains(y.nibble(i))));
        prop_assert_eq!(t.image().len() + t.missing_values().len(), 16);
    }

    #[test]
    fn aead_round_trip(key in any::<[u8; 16]>(), nonce in any::<[u8; 12]>(),
                       ad in proptest::collection::vec(any::<u8>(), 0..45),
                       msg in proptest::collection::vec(any::<u8>(), 0..65)) {
        let input = AeadInputs { key, nonce, ad, msg };
        let (ct, tag) = dumbo::encrypt(&input);
        prop_assert_eq!(dumbo::decrypt(&key, &nonce, &input.ad, &ct, &tag), Some(input.msg.clone()));
    }

    #[test]
    fn bitsliced_table_matches_scalar_eval(f in fault_map()) {
        let n = canonical_netlist();
        let t = n.faulty_truth_table(&f).unwrap();
        for x in 0..16u8 {
            prop_assert_eq!(t.apply(x), n.eval(x, &f).unwrap());
        }
    }

    // Observations drawn from the faulty image never eliminate the true key,
    // and the survivors always contain the stabilizer coset of the truth.
    #[test]
    fn elimination_is_sound(f in fault_map(), kp in state(),
                            outs in proptest::collection::vec(any::<[u8; 40]>(), 1..40)) {
        let n = canonical_netlist();
        let t = n.faulty_truth_table(&f).unwrap();
        let missing = t.missing_values();
        prop_assume!(!missing.is_empty());
        let truth = key_nibbles(&kp);
        let mut cands = NibbleCandidates::full();
        for o in outs {
            let mut y = State160::ZERO;
            for (s, v) in o.iter().enumerate() {
                y.set_nibble(s, t.apply(*v & 0xf));
            }
            let i1 = p_layer(y) ^ kp;
            for s in 0..NIBBLES {
                prop_assert!(t.image().contains(extract_candidate_nibble(&i1, s, truth[s])));
            }
            cands.eliminate(&i1, missing).unwrap();
        }
        let stab = stabilizer(missing);
        for s in 0..NIBBLES {
            let coset: NibbleSet = stab.iter().map(|d| truth[s] ^ d).collect();
            prop_assert_eq!(cands.get(s).mask() & coset.mask(), coset.mask());
        }
    }
}
