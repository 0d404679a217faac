use mgl_core::lef::{check_lef_witness, is_homomorphism_on, lef_witness_from_limit, LefWitness, Provenance};
use mgl_core::marked::catalog;
use mgl_core::topology::GroupSequence;
use mgl_core::{make_marked, Caps, Error, FiniteGroup, FreeWord};
use proptest::prelude::*;

fn z_subset() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::btree_set(-5i64..=5, 1..6).prop_map(|s| s.into_iter().collect())
}

fn powers(ks: &[i64]) -> Vec<FreeWord> {
    let x = FreeWord::generator(1, 1).unwrap();
    ks.iter().map(|&k| x.pow(k)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn constructed_witnesses_pass(ks in z_subset()) {
        let caps = Caps::default();
        let seq = GroupSequence::from_catalog("cyclic($r)", Some("z")).unwrap();
        let wit = lef_witness_from_limit(&seq, &powers(&ks), 50, &caps).unwrap();
        let z = catalog::integers().unwrap();
        prop_assert!(check_lef_witness(&z, &wit, &caps).unwrap().pass);
        // reduction mod r is a homomorphism, so the map is multiplicative
        // on the whole ball it was read from
        let q = FiniteGroup::enumerate(&make_marked(&wit.q).unwrap(), 1000).unwrap();
        let Provenance::Constructed { radius, .. } = wit.provenance else { unreachable!() };
        let half: Vec<i64> = (-(radius as i64) / 2..=radius as i64 / 2).collect();
        prop_assert!(is_homomorphism_on(&z, &q, &wit.phi, &powers(&half)).unwrap().holds);
    }

    #[test]
    fn corruptions_match_a_residue_oracle(ks in z_subset(), entry in any::<prop::sample::Index>(), shift in 1u32..1000) {
        let caps = Caps::default();
        let seq = GroupSequence::from_catalog("cyclic($r)", Some("z")).unwrap();
        let f = powers(&ks);
        let mut wit = lef_witness_from_limit(&seq, &f, 50, &caps).unwrap();
        let z = catalog::integers().unwrap();
        let q = FiniteGroup::enumerate(&make_marked(&wit.q).unwrap(), 1000).unwrap();
        let n = q.order() as i64;
        prop_assume!(n > 1);
        let i = entry.index(wit.phi.len());
        wit.phi[i].1 = (wit.phi[i].1 + shift % (n as u32 - 1) + 1) % n as u32;
        let residue = |idx: u32| q.word(idx).signed().iter().map(|&l| l.signum() as i64).sum::<i64>().rem_euclid(n);
        let image = |k: i64| {
            let w = FreeWord::generator(1, 1).unwrap().pow(k);
            wit.phi.iter().find(|(u, _)| *u == w).map(|&(_, idx)| residue(idx)).unwrap()
        };
        let mut expected = true;
        for (a, &x) in ks.iter().enumerate() {
            for &y in &ks[..a] {
                expected &= image(x) != image(y);
            }
            for &y in &ks {
                expected &= image(x + y) == (image(x) + image(y)).rem_euclid(n);
            }
        }
        prop_assert_eq!(check_lef_witness(&z, &wit, &caps).unwrap().pass, expected);
    }

    #[test]
    fn corrupting_an_f_image_onto_another_is_caught(ks in z_subset(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>()) {
        prop_assume!(ks.len() > 1);
        let caps = Caps::default();
        let seq = GroupSequence::from_catalog("cyclic($r)", Some("z")).unwrap();
        let f = powers(&ks);
        let mut wit = lef_witness_from_limit(&seq, &f, 50, &caps).unwrap();
        let (a, b) = (a.index(f.len()), b.index(f.len()));
        prop_assume!(a != b);
        let pos = |w: &FreeWord| wit.phi.iter().position(|(u, _)| u == w).unwrap();
        let (pa, pb) = (pos(&f[a]), pos(&f[b]));
        wit.phi[pa].1 = wit.phi[pb].1;
        let verdict = check_lef_witness(&catalog::integers().unwrap(), &wit, &caps).unwrap();
        prop_assert!(!verdict.pass);
        prop_assert!(verdict.injectivity.iter().any(|v| (v.i, v.j) == (a.min(b), a.max(b))));
    }
}

#[test]
fn quaternion_subsets() {
    let caps = Caps::default();
    let seq = GroupSequence::from_catalog("q8 * cyclic($r)", Some("q8 * z")).unwrap();
    let limit = seq.limit().unwrap();
    let q8 = FiniteGroup::enumerate(&catalog::q8().unwrap(), 100).unwrap();
    let t = FreeWord::generator(3, 3).unwrap();
    let f: Vec<FreeWord> = (0..8u32).map(|a| q8.word(a).widen(3).unwrap().mul(&t).unwrap()).collect();
    let wit = lef_witness_from_limit(&seq, &f, 40, &caps).unwrap();
    assert!(check_lef_witness(&limit, &wit, &caps).unwrap().pass);
}

#[test]
fn witness_json_round_trip_and_errors() {
    let caps = Caps::default();
    let seq = GroupSequence::from_catalog("cyclic($r)", Some("z")).unwrap();
    let wit = lef_witness_from_limit(&seq, &powers(&[-1, 0, 1]), 50, &caps).unwrap();
    let json = wit.to_json();
    assert_eq!(json["schema"], "mgl/1");
    assert_eq!(json["provenance"], serde_json::json!({"kind": "constructed", "r": 6, "R": 2}));
    assert_eq!(LefWitness::from_json(&json).unwrap(), wit);

    let mut broken = json.clone();
    broken["phi"][0][1] = serde_json::json!(99);
    let bad = LefWitness::from_json(&broken).unwrap();
    let z = catalog::integers().unwrap();
    assert!(matches!(check_lef_witness(&z, &bad, &caps), Err(Error::MalformedWitness(_))));

    let mut short = json.clone();
    short["phi"].as_array_mut().unwrap().truncate(2);
    let bad = LefWitness::from_json(&short).unwrap();
    assert!(matches!(check_lef_witness(&z, &bad, &caps), Err(Error::IncompleteWitness(_))));

    let mut garbage = json;
    garbage["F"][0] = serde_json::json!("x1^");
    assert!(matches!(LefWitness::from_json(&garbage), Err(Error::MalformedWitness(_))));

    assert!(matches!(lef_witness_from_limit(&seq, &powers(&[2, 2]), 50, &caps), Err(Error::InvalidArgument(_))));
}
