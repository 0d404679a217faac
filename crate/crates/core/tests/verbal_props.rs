use std::collections::BTreeSet;
use std::sync::OnceLock;

use mgl_core::marked::catalog;
use mgl_core::verbal::{conciseness_record, delta_profile, w_values, w_values_sampled, word_values, DeltaProfile, WordMap};
use mgl_core::{make_marked, Caps, FiniteGroup, FreeWord, MarkedGroup};
use proptest::prelude::*;

fn groups() -> &'static Vec<(MarkedGroup, FiniteGroup)> {
    static G: OnceLock<Vec<(MarkedGroup, FiniteGroup)>> = OnceLock::new();
    G.get_or_init(|| {
        catalog::finite_catalog()
            .into_iter()
            .map(|(_, s)| make_marked(&s).unwrap())
            .filter(|g| g.order().unwrap() <= 60)
            .map(|g| {
                let fg = FiniteGroup::enumerate(&g, 1000).unwrap();
                (g, fg)
            })
            .collect()
    })
}

fn word_map() -> impl Strategy<Value = WordMap> {
    let letter = (1..=2i32, any::<bool>()).prop_map(|(g, inv)| if inv { -g } else { g });
    prop::collection::vec(letter, 0..8).prop_map(|raw| WordMap::new(FreeWord::from_signed(2, &raw).unwrap()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn value_sets_and_verbal_subgroups(i in 0..groups().len(), w in word_map(), g in any::<u32>()) {
        let (_, fg) = &groups()[i];
        let values = word_values(fg, &w, u64::MAX).unwrap();
        let set: BTreeSet<u32> = values.iter().copied().collect();
        prop_assert!(set.contains(&fg.identity()));
        let g = g % fg.order() as u32;
        for &v in &values {
            prop_assert!(set.contains(&fg.mul(fg.mul(g, v), fg.inv(g))));
        }
        let verbal = fg.subgroup_closure(&values);
        prop_assert_eq!(fg.order() % verbal.len(), 0);
        prop_assert!(values.len() <= verbal.len());
        let vset: BTreeSet<u32> = verbal.iter().copied().collect();
        for &c in &verbal {
            prop_assert!(vset.contains(&fg.conjugate(c, g)));
        }
    }

    #[test]
    fn sampled_values_are_a_subset(i in 0..groups().len(), w in word_map(), seed in any::<u64>()) {
        let caps = Caps::default();
        let (g, _) = &groups()[i];
        let exact = w_values(g, &w, &caps).unwrap();
        let some = w_values_sampled(g, &w, 40, 2, seed, &caps).unwrap();
        prop_assert!(!some.exhaustive);
        prop_assert!(some.values.iter().all(|k| exact.values.contains(k)));
    }

    #[test]
    fn profiles_only_grow(split in 1..8usize, w in word_map()) {
        let caps = Caps::default();
        let members: Vec<MarkedGroup> = groups().iter().take(8).map(|(g, _)| g.clone()).collect();
        let whole = delta_profile("all", &members, &w, &caps);
        let mut left = delta_profile("all", &members[..split], &w, &caps);
        let right = delta_profile("all", &members[split..], &w, &caps);
        for (m, b) in &left.delta {
            prop_assert!(whole.bound(*m).unwrap() >= *b);
        }
        left.merge(right);
        prop_assert_eq!(left.delta, whole.delta);
    }
}

#[test]
fn identity_word_map_gives_the_whole_group() {
    let caps = Caps::default();
    for (g, fg) in groups() {
        let v = w_values(g, &WordMap::parse("x1").unwrap(), &caps).unwrap();
        assert_eq!(v.len(), fg.order());
    }
}

#[test]
fn quaternion_products_have_delta_two() {
    let caps = Caps::default();
    let family: Vec<MarkedGroup> = (1..=20).map(|n| catalog::group(&format!("q8 * cyclic({n})")).unwrap()).collect();
    let p = delta_profile("q8 x Z/n", &family, &WordMap::parse("[x1,x2]").unwrap(), &caps);
    assert!(p.errors.is_empty());
    assert!(p.records.iter().all(|r| r.m == 2 && r.verbal_order == 2));
    assert_eq!(p.delta.into_iter().collect::<Vec<_>>(), vec![(2, 2)]);
}

#[test]
fn profile_outputs() {
    let caps = Caps::default();
    let family = vec![catalog::symmetric(3).unwrap(), catalog::integers().unwrap()];
    let p = delta_profile("mixed", &family, &WordMap::parse("[x1,x2]").unwrap(), &caps);
    assert_eq!(p.records.len(), 1);
    assert_eq!(p.errors.len(), 1);
    let json = p.to_json();
    assert_eq!(json["schema"], "mgl/1");
    assert_eq!(json["delta"], serde_json::json!([[3, 3]]));
    assert_eq!(json["records"][0]["verbal_order"], 3);
    let table = p.to_table();
    assert!(table.lines().next().unwrap().starts_with("group"));
    assert!(table.contains("delta(3) >= 3"));
    assert!(DeltaProfile::new("x1", "none").to_json()["records"].as_array().unwrap().is_empty());
}

#[test]
fn records_obey_lagrange() {
    let caps = Caps::default();
    for (g, fg) in groups() {
        let r = conciseness_record(g, &WordMap::parse("x1^2*x2^2").unwrap(), &caps).unwrap();
        assert_eq!(fg.order() % r.verbal_order, 0);
    }
}
