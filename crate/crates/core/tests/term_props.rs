//! Structural properties of terms, canonical forms and the sum conventions.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dlam::gen::{random_simple_term, random_sum, TermGenParams};
use dlam::term::{
    alpha_eq_sum, canonicalize, free_vars_sum, is_valid_sum, mk_abs, mk_app, mk_dapp_multi, mk_var,
    DiffSum, SimpleTerm, SumMode, Var,
};

fn sums() -> impl Strategy<Value = DiffSum> {
    any::<u64>().prop_map(|seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        random_sum(&mut rng, &TermGenParams::default())
    })
}

/// Rename every binder consistently, producing an alpha-variant.
fn alpha_variant(sum: &DiffSum, salt: &str) -> DiffSum {
    fn go(s: &SimpleTerm, salt: &str, depth: usize) -> DiffSum {
        match s {
            SimpleTerm::Var(v) => mk_var(v.clone()),
            SimpleTerm::Abs(x, b) => {
                let fresh = Var::new(format!("{}{}{}", salt, x.name(), depth));
                let renamed = dlam::subst::subst(
                    &DiffSum::from_term((**b).clone()),
                    x,
                    &mk_var(fresh.clone()),
                );
                let body: DiffSum = renamed
                    .summands()
                    .iter()
                    .map(|(u, m)| go(u, salt, depth + 1).scale(*m))
                    .collect();
                mk_abs(fresh, body)
            }
            SimpleTerm::App(f, t) => {
                let fs = go(f, salt, depth);
                let ts: DiffSum = t
                    .summands()
                    .iter()
                    .map(|(u, m)| go(u, salt, depth + 1).scale(*m))
                    .collect();
                mk_app(fs, ts)
            }
            SimpleTerm::LinApp(h, args) => {
                let hs = go(h, salt, depth);
                let arg_sums: Vec<DiffSum> = args.iter().map(|a| go(a, salt, depth + 1)).collect();
                mk_dapp_multi(hs, &arg_sums)
            }
        }
    }
    sum.summands()
        .iter()
        .map(|(s, m)| go(s, "q", depth_salt(salt)).scale(*m))
        .collect()
}

fn depth_salt(_: &str) -> usize {
    0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonicalize_is_idempotent(s in sums()) {
        for mode in [SumMode::Counted, SumMode::Idempotent] {
            let once = canonicalize(&s, mode);
            prop_assert_eq!(canonicalize(&once, mode), once);
        }
    }

    #[test]
    fn alpha_eq_is_reflexive_and_stable_under_renaming(s in sums()) {
        prop_assert!(alpha_eq_sum(&s, &s));
        let variant = alpha_variant(&s, "q");
        prop_assert!(alpha_eq_sum(&s, &variant), "{} vs {}", s, variant);
    }

    #[test]
    fn constructors_yield_valid_grammar(s in sums()) {
        prop_assert!(is_valid_sum(&s), "{}", s);
    }

    #[test]
    fn canonicalize_preserves_free_vars(s in sums()) {
        for mode in [SumMode::Counted, SumMode::Idempotent] {
            prop_assert_eq!(free_vars_sum(&canonicalize(&s, mode)), free_vars_sum(&s));
        }
    }

    #[test]
    fn zero_is_neutral(s in sums()) {
        prop_assert_eq!(s.add(&DiffSum::zero()), s.clone());
        prop_assert_eq!(DiffSum::zero().add(&s), s);
    }

    #[test]
    fn sum_is_commutative_and_associative(a in sums(), b in sums(), c in sums()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
    }
}

#[test]
fn linear_argument_lists_are_permutation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = TermGenParams::default();
    for round in 0..300 {
        let head = random_simple_term(&mut rng, &p);
        let n = 2 + (round % 3);
        let args: Vec<DiffSum> = (0..n).map(|_| random_simple_term(&mut rng, &p)).collect();
        let forward = mk_dapp_multi(head.clone(), &args);
        let mut shuffled = args.clone();
        shuffled.reverse();
        if round % 2 == 1 {
            shuffled.rotate_left(1);
        }
        let backward = mk_dapp_multi(head, &shuffled);
        assert_eq!(forward, backward, "round {round}");
    }
}

#[test]
fn constructed_terms_are_already_canonical() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = TermGenParams::default();
    for _ in 0..300 {
        let s = random_sum(&mut rng, &p);
        assert_eq!(canonicalize(&s, SumMode::Counted), s, "{s}");
    }
}

#[test]
fn term_order_is_total_and_transitive() {
    use std::cmp::Ordering;
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let p = TermGenParams::default();
    for _ in 0..300 {
        let a = random_sum(&mut rng, &p);
        let b = random_sum(&mut rng, &p);
        let c = random_sum(&mut rng, &p);
        // antisymmetry
        assert_eq!(a.cmp(&b), b.cmp(&a).reverse());
        // transitivity on the sorted triple
        let mut v = [a, b, c];
        v.sort();
        assert!(v[0] <= v[1] && v[1] <= v[2] && v[0] <= v[2]);
        // consistency of equality with the order
        assert_eq!(v[0] == v[1], v[0].cmp(&v[1]) == Ordering::Equal);
    }
}

#[test]
fn transitivity_of_alpha_equality_on_variants() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let p = TermGenParams::default();
    for _ in 0..100 {
        let s = random_sum(&mut rng, &p);
        let a = alpha_variant(&s, "a");
        let b = alpha_variant(&a, "b");
        assert!(alpha_eq_sum(&s, &a) && alpha_eq_sum(&a, &b) && alpha_eq_sum(&s, &b));
    }
}
