use std::sync::OnceLock;

use mgl_core::marked::{catalog, GroupSpec};
use mgl_core::{make_marked, Error, FiniteGroup, FreeWord, MarkedGroup};
use proptest::prelude::*;

fn groups() -> &'static Vec<(String, MarkedGroup)> {
    static G: OnceLock<Vec<(String, MarkedGroup)>> = OnceLock::new();
    G.get_or_init(|| {
        let mut v: Vec<(String, MarkedGroup)> = catalog::finite_catalog()
            .into_iter()
            .map(|(e, s)| (e, make_marked(&s).unwrap()))
            .filter(|(_, g)| g.order().unwrap() <= 120)
            .collect();
        v.push(("z".into(), catalog::integers().unwrap()));
        v.push(("q8 * z".into(), catalog::group("q8 * z").unwrap()));
        v.push(("free(2)".into(), catalog::free(2).unwrap()));
        v
    })
}

fn group_and_words(count: usize) -> impl Strategy<Value = (usize, Vec<FreeWord>)> {
    (0..groups().len()).prop_flat_map(move |i| {
        let rank = groups()[i].1.rank() as i32;
        let letter = (1..=rank, any::<bool>()).prop_map(|(g, inv)| if inv { -g } else { g });
        let w = prop::collection::vec(letter, 0..12).prop_map(move |raw| FreeWord::from_signed(rank as usize, &raw).unwrap());
        (Just(i), prop::collection::vec(w, count))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kernel_is_a_normal_subgroup((i, ws) in group_and_words(3)) {
        let g = &groups()[i].1;
        let (u, v, x) = (&ws[0], &ws[1], &ws[2]);
        let in_n = |w: &FreeWord| g.contains(w).unwrap();
        prop_assert!(in_n(&FreeWord::identity(g.rank())));
        if in_n(u) && in_n(v) {
            prop_assert!(in_n(&u.mul(v).unwrap()));
        }
        prop_assert_eq!(in_n(u), in_n(&u.inverse()));
        prop_assert_eq!(in_n(u), in_n(&u.conjugate_by(x).unwrap()));
    }

    #[test]
    fn equality_is_a_congruence((i, ws) in group_and_words(3)) {
        let g = &groups()[i].1;
        let (u, v, x) = (&ws[0], &ws[1], &ws[2]);
        let eq = g.equal_elements(u, v).unwrap();
        prop_assert_eq!(eq, g.contains(&u.mul(&v.inverse()).unwrap()).unwrap());
        prop_assert_eq!(eq, g.membership_only().equal_elements(u, v).unwrap());
        if eq {
            prop_assert!(g.equal_elements(&u.mul(x).unwrap(), &v.mul(x).unwrap()).unwrap());
            prop_assert!(g.equal_elements(&x.mul(u).unwrap(), &x.mul(v).unwrap()).unwrap());
        }
    }

    #[test]
    fn padding_erases_the_new_generator((i, ws) in group_and_words(1)) {
        let g = &groups()[i].1;
        let n = g.rank();
        let p = g.pad();
        let mut raw = ws[0].signed();
        raw.insert(raw.len() / 2, n as i32 + 1);
        let w = FreeWord::from_signed(n + 1, &raw).unwrap();
        prop_assert_eq!(p.contains(&w).unwrap(), g.contains(&ws[0]).unwrap());
        prop_assert!(p.generator_is_trivial(n + 1));
    }
}

#[test]
fn enumeration_sizes_match_orders() {
    for (name, g) in groups().iter().filter(|(_, g)| g.is_finite()) {
        let fg = FiniteGroup::enumerate(g, 1000).unwrap();
        assert_eq!(fg.order() as u64, g.order().unwrap(), "{name}");
        let mut keys: Vec<_> = (0..fg.order() as u32).map(|a| fg.key(a)).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), fg.order(), "{name}");
        for a in 0..fg.order() as u32 {
            assert_eq!(fg.element_of(fg.word(a)).unwrap(), a);
            assert_eq!(fg.norm(a), fg.word(a).len());
        }
    }
}

#[test]
fn specs_round_trip_through_json() {
    for (name, spec) in catalog::finite_catalog() {
        let back = GroupSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(back, spec, "{name}");
    }
    let template = serde_json::json!({"kind": "cyclic", "modulus": "$r"});
    assert_eq!(GroupSpec::instantiate(&template, 7).unwrap(), catalog::cyclic_spec(7));
}

#[test]
fn malformed_specs_are_rejected() {
    assert!(GroupSpec::from_json(r#"{"kind":"cyclic","modulus":3,"extra":1}"#).is_err());
    assert!(GroupSpec::from_json(r#"{"kind":"nope"}"#).is_err());
    let bad_perm = GroupSpec::Perm { degree: 3, gens: vec!["(1,2".into()], marking: None };
    assert!(matches!(make_marked(&bad_perm), Err(Error::InvalidSpec(_))));
    let subgroup = GroupSpec::Perm { degree: 3, gens: vec!["(1,2)".into()], marking: None };
    assert!(make_marked(&subgroup).unwrap().order() == Some(2));
    assert!(catalog::spec("symmetric(9)").is_err());
}

#[test]
fn table_from_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z3.csv");
    std::fs::write(&path, "0,1,2\n1,2,0\n2,0,1\n").unwrap();
    let spec = GroupSpec::Table { order: 3, table: None, csv: Some(path), marking: vec![1] };
    let g = make_marked(&spec).unwrap();
    assert_eq!(g.order(), Some(3));
    assert!(g.contains(&FreeWord::generator(1, 1).unwrap().pow(3)).unwrap());
}
