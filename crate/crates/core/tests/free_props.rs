use mgl_core::free::{ball_size, enumerate_ball};
use mgl_core::word::{parse_in_rank, parse_word};
use mgl_core::{FreeWord, Letter};
use proptest::prelude::*;

fn raw_letters(rank: usize, max_len: usize) -> impl Strategy<Value = Vec<i32>> {
    let r = rank as i32;
    prop::collection::vec((1..=r, any::<bool>()).prop_map(|(g, inv)| if inv { -g } else { g }), 0..max_len)
}

fn word(rank: usize) -> impl Strategy<Value = FreeWord> {
    raw_letters(rank, 14).prop_map(move |raw| FreeWord::from_signed(rank, &raw).unwrap())
}

fn reduced_len(raw: &[i32]) -> usize {
    let mut stack: Vec<i32> = Vec::new();
    for &x in raw {
        if stack.last() == Some(&-x) {
            stack.pop();
        } else {
            stack.push(x);
        }
    }
    stack.len()
}

proptest! {
    #[test]
    fn reduction_is_idempotent_and_shrinks(raw in raw_letters(3, 30)) {
        let w = FreeWord::from_signed(3, &raw).unwrap();
        prop_assert!(w.len() <= raw.len());
        prop_assert_eq!(w.len(), reduced_len(&raw));
        prop_assert!(w.letters().windows(2).all(|p| p[0] != p[1].inverse()));
        let again = FreeWord::reduce(3, w.letters().iter().copied()).unwrap();
        prop_assert_eq!(again, w);
    }

    #[test]
    fn group_axioms(a in word(2), b in word(2), c in word(2)) {
        let e = FreeWord::identity(2);
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&a.inverse()).unwrap(), e.clone());
        prop_assert_eq!(e.mul(&a).unwrap(), a.clone());
        prop_assert_eq!(a.mul(&b).unwrap().inverse(), b.inverse().mul(&a.inverse()).unwrap());
    }

    #[test]
    fn length_is_subadditive(a in word(3), b in word(3)) {
        prop_assert!(a.mul(&b).unwrap().len() <= a.len() + b.len());
    }

    #[test]
    fn powers_and_commutators(a in word(2), b in word(2), k in -6i64..6) {
        let p = a.pow(k);
        let step = if k > 0 { a.clone() } else { a.inverse() };
        let mut slow = FreeWord::identity(2);
        for _ in 0..k.unsigned_abs() {
            slow = slow.mul(&step).unwrap();
        }
        prop_assert_eq!(p, slow);
        let c = FreeWord::commutator(&a, &b).unwrap();
        let expected = a.inverse().mul(&b.inverse()).unwrap().mul(&a).unwrap().mul(&b).unwrap();
        prop_assert_eq!(c, expected);
    }

    #[test]
    fn display_round_trips(a in word(3)) {
        prop_assert_eq!(parse_in_rank(&a.to_string(), 3).unwrap(), a);
    }

    #[test]
    fn substitution_is_a_homomorphism(u in word(2), v in word(2), x in word(3), y in word(3)) {
        let args = [x, y];
        let lhs = u.mul(&v).unwrap().substitute(&args).unwrap();
        let rhs = u.substitute(&args).unwrap().mul(&v.substitute(&args).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

#[test]
fn ball_sizes_match_closed_form() {
    for n in 1..=3usize {
        for r in 0..=6usize {
            let expected: u128 = if n == 1 {
                2 * r as u128 + 1
            } else {
                let q = 2 * n as u128 - 1;
                1 + 2 * n as u128 * (q.pow(r as u32) - 1) / (q - 1)
            };
            let ball = enumerate_ball(n, r, 1 << 20).unwrap();
            assert_eq!(ball.len() as u128, expected, "n={n} r={r}");
            assert_eq!(ball_size(n, r), expected);
            let mut keys: Vec<Vec<i32>> = ball.iter().map(FreeWord::signed).collect();
            keys.sort();
            keys.dedup();
            assert_eq!(keys.len(), ball.len());
            assert!(ball.iter().all(|w| w.len() <= r));
        }
    }
}

#[test]
fn grammar_errors_carry_positions() {
    let err = parse_word("x1*[x2,").unwrap_err();
    assert!(err.to_string().contains('7'), "{err}");
    assert!(parse_word("x0").is_err());
    assert!(parse_in_rank("x3", 2).is_err());
    assert_eq!(parse_in_rank("e", 2).unwrap(), FreeWord::identity(2));
    assert_eq!(parse_in_rank("x2^-2", 2).unwrap().signed(), vec![-2, -2]);
    assert_eq!(Letter::alphabet(2).map(Letter::signed).collect::<Vec<_>>(), vec![1, -1, 2, -2]);
}
