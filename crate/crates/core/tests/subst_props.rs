//! Properties of the substitution operators: the Schwarz lemma, permutation
//! invariance of iterated differential substitution, and the linear
//! substitution audit for bags.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dlam::gen::{random_res_term, random_sum, TermGenParams};
use dlam::res::{free_vars_res, Bag, ResSum, ResTerm, Resource};
use dlam::subst::{dsubst, dsubst_multi, lsubst, subst};
use dlam::term::{free_vars_sum, mk_var, DiffSum, Var};

fn params_without(vars: &[&str]) -> TermGenParams {
    let mut p = TermGenParams::default();
    p.free_vars.retain(|v| !vars.contains(&v.name()));
    p
}

#[test]
fn schwarz_lemma_holds_on_random_triples() {
    let x = Var::new("x");
    let y = Var::new("y");
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let p = TermGenParams {
        max_size: 8,
        ..TermGenParams::default()
    };
    let p_no_x = TermGenParams {
        max_size: 8,
        ..params_without(&["x"])
    };
    for round in 0..300 {
        let s = random_sum(&mut rng, &p);
        let t = random_sum(&mut rng, &p);
        // x must not occur free in u
        let u = random_sum(&mut rng, &p_no_x);
        let lhs = dsubst(&dsubst(&s, &x, &t), &y, &u);
        let rhs = dsubst(&dsubst(&s, &y, &u), &x, &t).add(&dsubst(&s, &x, &dsubst(&t, &y, &u)));
        assert_eq!(lhs, rhs, "round {round}: s={s} t={t} u={u}");
    }
}

#[test]
fn differential_substitutions_commute_when_disjoint() {
    let x = Var::new("x");
    let y = Var::new("y");
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let base = params_without(&["x", "y"]);
    let p = TermGenParams {
        max_size: 8,
        ..TermGenParams::default()
    };
    let p_args = TermGenParams {
        max_size: 8,
        ..base
    };
    for _ in 0..200 {
        let s = random_sum(&mut rng, &p);
        let t = random_sum(&mut rng, &p_args);
        let u = random_sum(&mut rng, &p_args);
        let lhs = dsubst(&dsubst(&s, &x, &t), &y, &u);
        let rhs = dsubst(&dsubst(&s, &y, &u), &x, &t);
        assert_eq!(lhs, rhs, "s={s} t={t} u={u}");
    }
}

#[test]
fn absent_variable_differentiates_to_zero() {
    let x = Var::new("x");
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let p = params_without(&["x"]);
    for _ in 0..200 {
        let s = random_sum(&mut rng, &p);
        assert!(!free_vars_sum(&s).contains(&x));
        assert_eq!(dsubst(&s, &x, &mk_var("w")), DiffSum::zero(), "s={s}");
    }
}

#[test]
fn substituting_a_variable_for_itself_is_identity() {
    let x = Var::new("x");
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let p = TermGenParams::default();
    for _ in 0..200 {
        let s = random_sum(&mut rng, &p);
        assert_eq!(subst(&s, &x, &mk_var("x")), s, "s={s}");
    }
}

#[test]
fn multi_differential_substitution_is_permutation_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let p = TermGenParams {
        max_size: 10,
        ..TermGenParams::default()
    };
    let args_p = TermGenParams {
        max_size: 6,
        ..params_without(&["x", "y", "z"])
    };
    let vars = [Var::new("x"), Var::new("y"), Var::new("z")];
    for round in 0..300 {
        let s = random_sum(&mut rng, &p);
        let args: Vec<DiffSum> = (0..3).map(|_| random_sum(&mut rng, &args_p)).collect();
        let forward = dsubst_multi(&s, &vars, &args).unwrap();
        // simultaneous permutation of (vars, args)
        let perm = [2usize, 0, 1];
        let pv: Vec<Var> = perm.iter().map(|&i| vars[i].clone()).collect();
        let pa: Vec<DiffSum> = perm.iter().map(|&i| args[i].clone()).collect();
        let permuted = dsubst_multi(&s, &pv, &pa).unwrap();
        assert_eq!(forward, permuted, "round {round}: s={s}");
    }
}

#[test]
fn differential_substitution_is_additive_in_the_argument() {
    // dS/dx·(T+U) = dS/dx·T + dS/dx·U, the sum extension of the clauses.
    let x = Var::new("x");
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let p = TermGenParams {
        max_size: 10,
        ..TermGenParams::default()
    };
    for _ in 0..200 {
        let s = random_sum(&mut rng, &p);
        let t = random_sum(&mut rng, &p);
        let u = random_sum(&mut rng, &p);
        let joint = dsubst(&s, &x, &t.add(&u));
        let split = dsubst(&s, &x, &t).add(&dsubst(&s, &x, &u));
        assert_eq!(joint, split, "s={s} t={t} u={u}");
        assert_eq!(dsubst(&s, &x, &DiffSum::zero()), DiffSum::zero(), "s={s}");
    }
}

fn count_bangs(t: &ResTerm) -> u64 {
    match t {
        ResTerm::Var(_) => 0,
        ResTerm::Abs(_, b) => count_bangs(b),
        ResTerm::App(f, bag) => {
            count_bangs(f)
                + bag
                    .items()
                    .iter()
                    .map(|(r, m)| m * (count_bangs(r.term()) + if r.is_banged() { 1 } else { 0 }))
                    .sum::<u64>()
        }
    }
}

fn count_bangs_sum(s: &ResSum) -> Vec<u64> {
    s.summands().iter().map(|(t, _)| count_bangs(t)).collect()
}

fn x_under_bang(t: &ResTerm, x: &Var) -> bool {
    match t {
        ResTerm::Var(_) => false,
        ResTerm::Abs(y, b) => y != x && x_under_bang(b, x),
        ResTerm::App(f, bag) => {
            x_under_bang(f, x)
                || bag.items().iter().any(|(r, _)| match r {
                    Resource::Linear(u) => x_under_bang(u, x),
                    Resource::Banged(u) => free_vars_res(u).contains(x) || x_under_bang(u, x),
                })
        }
    }
}

#[test]
fn linear_substitution_preserves_bang_count_outside_banged_positions() {
    // When x never occurs under a bang, the duplicating clause
    // [M^!]<N/x> = [M<N/x>, M^!] contributes nothing, so every surviving
    // summand carries exactly bangs(A) + bangs(N) banged occurrences.
    let x = Var::new("x");
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let p = TermGenParams::default();
    let mut checked = 0;
    while checked < 200 {
        let a = random_res_term(&mut rng, &p);
        if x_under_bang(&a, &x) {
            continue;
        }
        let n = random_res_term(&mut rng, &p);
        let out = lsubst(
            &ResSum::from_term(a.clone()),
            &x,
            &ResSum::from_term(n.clone()),
        );
        let expected = count_bangs(&a) + count_bangs(&n);
        for bangs in count_bangs_sum(&out) {
            assert_eq!(bangs, expected, "a={a} n={n} out={out}");
        }
        checked += 1;
    }
}

#[test]
fn linear_substitution_extends_bilinearly() {
    let x = Var::new("x");
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let p = TermGenParams::default();
    for _ in 0..100 {
        let a = random_res_term(&mut rng, &p);
        let n1 = random_res_term(&mut rng, &p);
        let n2 = random_res_term(&mut rng, &p);
        let asum = ResSum::from_term(a.clone());
        let joint = lsubst(
            &asum,
            &x,
            &ResSum::from_term(n1.clone()).add(&ResSum::from_term(n2.clone())),
        );
        let split = lsubst(&asum, &x, &ResSum::from_term(n1)).add(&lsubst(
            &asum,
            &x,
            &ResSum::from_term(n2),
        ));
        assert_eq!(joint, split, "a={a}");
    }
}

#[test]
fn empty_bag_has_no_linear_occurrences() {
    let x = Var::new("x");
    let term = dlam::res::mk_rapp(
        dlam::res::mk_rvar("y"),
        dlam::res::BagSum::from_bag(Bag::empty()),
    );
    assert_eq!(lsubst(&term, &x, &dlam::res::mk_rvar("m")), ResSum::zero());
}
