//! Reduction properties: subject preservation, strategy-independence smoke
//! tests, the eta postcondition, conservativity over the plain lambda
//! calculus, and Taylor monotonicity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use dlam::combinators::{i, omega, y};
use dlam::gen::{random_pure_lambda, random_res_sum, random_sum, TermGenParams};
use dlam::rewrite::{
    normalize_diff, normalize_diff_with, normalize_res_with, step_diff, step_diff_roots, step_res,
    taylor, taylor_nf, theory_eq_diff, Fuel, Strategy, TaylorBudget, Verdict,
};
use dlam::term::{
    canonicalize, free_vars, is_valid_sum, mk_abs, mk_app, mk_var, DiffSum, SimpleTerm, SumMode,
};

#[test]
fn stepping_preserves_the_grammar() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let p = TermGenParams::default();
    for _ in 0..200 {
        let mut cur = random_sum(&mut rng, &p);
        for _ in 0..5 {
            match step_diff(&cur) {
                Some(next) => {
                    assert!(is_valid_sum(&next), "from {cur} to {next}");
                    cur = next;
                }
                None => break,
            }
        }
    }
    for _ in 0..150 {
        let mut cur = random_res_sum(&mut rng, &p);
        for _ in 0..5 {
            match step_res(&cur) {
                Some(next) => {
                    assert!(dlam::res::is_valid_res_sum(&next), "from {cur} to {next}");
                    cur = next;
                }
                None => break,
            }
        }
    }
}

#[test]
fn strategies_agree_on_normalizing_terms() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let p = TermGenParams::default();
    let fuel = Fuel(300);
    let mut compared = 0;
    for _ in 0..400 {
        let s = random_sum(&mut rng, &p);
        let (lo, lo_ex) = normalize_diff_with(&s, fuel, false, Strategy::LeftmostOutermost);
        let (ri, ri_ex) = normalize_diff_with(&s, fuel, false, Strategy::RightmostInnermost);
        if !lo_ex && !ri_ex {
            assert_eq!(lo, ri, "term {s}");
            compared += 1;
        }
    }
    assert!(compared > 100, "too few normalizing samples: {compared}");
    let mut compared = 0;
    for _ in 0..200 {
        let s = random_res_sum(&mut rng, &p);
        let (lo, lo_ex) = normalize_res_with(&s, fuel, false, Strategy::LeftmostOutermost);
        let (ri, ri_ex) = normalize_res_with(&s, fuel, false, Strategy::RightmostInnermost);
        if !lo_ex && !ri_ex {
            assert_eq!(lo, ri, "term {s}");
            compared += 1;
        }
    }
    assert!(compared > 50, "too few normalizing samples: {compared}");
}

fn has_eta_redex(s: &SimpleTerm) -> bool {
    match s {
        SimpleTerm::Var(_) => false,
        SimpleTerm::Abs(x, b) => {
            if let SimpleTerm::App(f, t) = &**b {
                let is_x = matches!(t.as_single(), Some(SimpleTerm::Var(v)) if v == x);
                if is_x && !free_vars(f).contains(x) {
                    return true;
                }
            }
            has_eta_redex(b)
        }
        SimpleTerm::App(f, t) => {
            has_eta_redex(f) || t.summands().iter().any(|(u, _)| has_eta_redex(u))
        }
        SimpleTerm::LinApp(h, args) => has_eta_redex(h) || args.iter().any(has_eta_redex),
    }
}

#[test]
fn eta_postcondition_no_surviving_eta_redex() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let p = TermGenParams::default();
    for _ in 0..300 {
        let s = random_sum(&mut rng, &p);
        let (nf, exhausted) = normalize_diff(&s, Fuel(200), true);
        if !exhausted {
            for (u, _) in nf.summands() {
                assert!(!has_eta_redex(u), "term {s} normalized to {nf}");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Conservativity: an independent normalizer for plain lambda terms
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, Debug)]
enum PureTerm {
    Var(String),
    Abs(String, Box<PureTerm>),
    App(Box<PureTerm>, Box<PureTerm>),
}

fn to_pure(s: &SimpleTerm) -> PureTerm {
    match s {
        SimpleTerm::Var(v) => PureTerm::Var(v.name().to_string()),
        SimpleTerm::Abs(x, b) => PureTerm::Abs(x.name().to_string(), Box::new(to_pure(b))),
        SimpleTerm::App(f, t) => PureTerm::App(
            Box::new(to_pure(f)),
            Box::new(to_pure(t.as_single().expect("pure term"))),
        ),
        SimpleTerm::LinApp(..) => panic!("not a pure lambda term"),
    }
}

fn pure_fv(t: &PureTerm, out: &mut Vec<String>) {
    match t {
        PureTerm::Var(v) => out.push(v.clone()),
        PureTerm::Abs(x, b) => {
            let mut inner = Vec::new();
            pure_fv(b, &mut inner);
            out.extend(inner.into_iter().filter(|v| v != x));
        }
        PureTerm::App(f, a) => {
            pure_fv(f, out);
            pure_fv(a, out);
        }
    }
}

fn pure_subst(t: &PureTerm, x: &str, arg: &PureTerm, fresh: &mut u64) -> PureTerm {
    match t {
        PureTerm::Var(v) => {
            if v == x {
                arg.clone()
            } else {
                t.clone()
            }
        }
        PureTerm::Abs(yv, b) => {
            if yv == x {
                return t.clone();
            }
            let mut avfv = Vec::new();
            pure_fv(arg, &mut avfv);
            if avfv.contains(yv) {
                let fresh_name = format!("fv{fresh}");
                *fresh += 1;
                let renamed = pure_subst(b, yv, &PureTerm::Var(fresh_name.clone()), fresh);
                PureTerm::Abs(fresh_name, Box::new(pure_subst(&renamed, x, arg, fresh)))
            } else {
                PureTerm::Abs(yv.clone(), Box::new(pure_subst(b, x, arg, fresh)))
            }
        }
        PureTerm::App(f, a) => PureTerm::App(
            Box::new(pure_subst(f, x, arg, fresh)),
            Box::new(pure_subst(a, x, arg, fresh)),
        ),
    }
}

fn pure_step(t: &PureTerm, fresh: &mut u64) -> Option<PureTerm> {
    match t {
        PureTerm::Var(_) => None,
        PureTerm::Abs(x, b) => pure_step(b, fresh).map(|b2| PureTerm::Abs(x.clone(), Box::new(b2))),
        PureTerm::App(f, a) => {
            if let PureTerm::Abs(x, b) = &**f {
                return Some(pure_subst(b, x, a, fresh));
            }
            if let Some(f2) = pure_step(f, fresh) {
                return Some(PureTerm::App(Box::new(f2), a.clone()));
            }
            pure_step(a, fresh).map(|a2| PureTerm::App(f.clone(), Box::new(a2)))
        }
    }
}

fn pure_normalize(t: &PureTerm, mut fuel: u64) -> Option<PureTerm> {
    let mut cur = t.clone();
    let mut fresh = 0;
    while let Some(next) = pure_step(&cur, &mut fresh) {
        if fuel == 0 {
            return None;
        }
        fuel -= 1;
        cur = next;
    }
    Some(cur)
}

fn pure_alpha_eq(a: &PureTerm, b: &PureTerm, ea: &mut Vec<String>, eb: &mut Vec<String>) -> bool {
    match (a, b) {
        (PureTerm::Var(x), PureTerm::Var(y)) => {
            let ia = ea.iter().rev().position(|n| n == x);
            let ib = eb.iter().rev().position(|n| n == y);
            match (ia, ib) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (PureTerm::Abs(x, s), PureTerm::Abs(y, t)) => {
            ea.push(x.clone());
            eb.push(y.clone());
            let r = pure_alpha_eq(s, t, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (PureTerm::App(f, s), PureTerm::App(g, t)) => {
            pure_alpha_eq(f, g, ea, eb) && pure_alpha_eq(s, t, ea, eb)
        }
        _ => false,
    }
}

#[test]
fn conservative_over_plain_beta_equality() {
    // On pure lambda terms the bounded theory equality agrees with ordinary
    // beta-equality decided by an independent normalizer.
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let p = TermGenParams {
        depth: 3,
        max_size: 14,
        ..TermGenParams::default()
    };
    let fuel = Fuel(200);
    let mut agreements = 0;
    for _ in 0..400 {
        let a = random_pure_lambda(&mut rng, &p);
        let b = random_pure_lambda(&mut rng, &p);
        let pa = to_pure(a.as_single().unwrap());
        let pb = to_pure(b.as_single().unwrap());
        let (na, nb) = match (pure_normalize(&pa, 200), pure_normalize(&pb, 200)) {
            (Some(na), Some(nb)) => (na, nb),
            _ => continue,
        };
        let oracle = pure_alpha_eq(&na, &nb, &mut Vec::new(), &mut Vec::new());
        let ours = theory_eq_diff(&a, &b, fuel, false, SumMode::Counted);
        match ours {
            Verdict::Equal => assert!(oracle, "{a} vs {b}"),
            Verdict::NotEqual => assert!(!oracle, "{a} vs {b}"),
            Verdict::Unknown => panic!("oracle normalized but theory_eq did not: {a} vs {b}"),
        }
        agreements += 1;
        // Also compare a term against its own oracle normal form.
        let oracle_nf = from_pure(&na);
        assert_eq!(
            theory_eq_diff(&a, &oracle_nf, fuel, false, SumMode::Counted),
            Verdict::Equal,
            "{a} vs oracle nf {oracle_nf}"
        );
    }
    assert!(agreements > 200, "too few decided samples: {agreements}");
}

fn from_pure(t: &PureTerm) -> DiffSum {
    match t {
        PureTerm::Var(v) => mk_var(v.as_str()),
        PureTerm::Abs(x, b) => mk_abs(x.as_str(), from_pure(b)),
        PureTerm::App(f, a) => mk_app(from_pure(f), from_pure(a)),
    }
}

#[test]
fn fixpoint_unfolds_in_one_root_pass() {
    // Y(x+y) develops to x(W) + y(W) where W is the first development.
    let t = mk_app(y(), mk_var("x").add(&mk_var("y")));
    let w1 = step_diff_roots(&t).expect("root redex");
    let w2 = step_diff_roots(&w1).expect("root redexes");
    let expect = mk_app(mk_var("x"), w1.clone()).add(&mk_app(mk_var("y"), w1));
    assert_eq!(w2, expect);
}

#[test]
fn fixpoint_over_numerals_produces_zero_and_successor() {
    // Y((\z.0') + succ) develops to (\z.0')(W) + succ(W), one more local
    // step away from 0' + succ(W).
    use dlam::combinators::{church, successor};
    let konst = mk_abs("z", church(0));
    let t = mk_app(y(), konst.clone().add(&successor()));
    let w1 = step_diff_roots(&t).expect("root redex");
    let w2 = step_diff_roots(&w1).expect("root redexes");
    let expect = mk_app(konst, w1.clone()).add(&mk_app(successor(), w1.clone()));
    assert_eq!(w2, expect);
    // contracting the constant head alone yields the numeral summand
    let first = dlam::subst::subst(&church(0), &dlam::term::Var::new("z"), &w1);
    assert_eq!(first, church(0));
}

#[test]
fn taylor_is_monotone_in_the_budget() {
    let mut rng = ChaCha8Rng::seed_from_u64(25);
    let p = TermGenParams {
        depth: 3,
        max_size: 10,
        ..TermGenParams::default()
    };
    for _ in 0..60 {
        let s = random_sum(&mut rng, &p);
        let small = TaylorBudget {
            degree: 2,
            size_cap: 40,
        };
        let big = TaylorBudget {
            degree: 3,
            size_cap: 80,
        };
        let (e1, _) = taylor(&s, &small);
        let (e2, _) = taylor(&s, &big);
        let e2 = canonicalize(&e2, SumMode::Idempotent);
        for (summand, _) in e1.summands() {
            assert!(
                e2.summands().iter().any(|(t, _)| t == summand),
                "summand {summand} of {e1} missing at larger budget"
            );
        }
    }
}

#[test]
fn taylor_nf_output_shape() {
    let mut rng = ChaCha8Rng::seed_from_u64(26);
    let p = TermGenParams {
        depth: 3,
        max_size: 8,
        ..TermGenParams::default()
    };
    let budget = TaylorBudget {
        degree: 2,
        size_cap: 60,
    };
    fn shape_ok(s: &SimpleTerm) -> bool {
        match s {
            SimpleTerm::Var(_) => true,
            SimpleTerm::Abs(_, b) => shape_ok(b),
            SimpleTerm::App(f, t) => {
                t.is_zero() && !matches!(**f, SimpleTerm::Abs(..)) && shape_ok(f)
            }
            SimpleTerm::LinApp(h, args) => {
                !matches!(**h, SimpleTerm::Abs(..)) && shape_ok(h) && args.iter().all(shape_ok)
            }
        }
    }
    for _ in 0..100 {
        let s = random_sum(&mut rng, &p);
        let (e, _) = taylor(&s, &budget);
        if let Ok(nf) = taylor_nf(&e, Fuel(2000)) {
            for (u, _) in nf.summands() {
                assert!(shape_ok(u), "taylor nf of {s} contains {u}");
            }
        }
    }
}

#[test]
fn eta_r_erases_a_unary_banged_wrapper() {
    // (\x z.y[y][z^!])[] = \z.y[y][z^!] = y[y] in the extensional theory.
    use dlam::res::{bag_cons_banged, bag_cons_linear, mk_rabs, mk_rapp, mk_rvar, Bag, BagSum};
    use dlam::rewrite::theory_eq_res;
    let yy = mk_rapp(mk_rvar("y"), bag_cons_linear(mk_rvar("y"), &Bag::empty()));
    let body = mk_rapp(
        yy.clone(),
        BagSum::from_bag(bag_cons_banged(mk_rvar("z"), &Bag::empty())),
    );
    let term = mk_rapp(
        mk_rabs("x", mk_rabs("z", body)),
        BagSum::from_bag(Bag::empty()),
    );
    assert_eq!(
        theory_eq_res(&term, &yy, Fuel(100), true, SumMode::Counted),
        Verdict::Equal
    );
    // without eta the wrapper survives
    assert_eq!(
        theory_eq_res(&term, &yy, Fuel(100), false, SumMode::Counted),
        Verdict::NotEqual
    );
}

#[test]
fn successor_acts_on_church_numerals() {
    use dlam::combinators::{church, successor};
    let fuel = Fuel(200);
    for n in 0..4 {
        assert_eq!(
            theory_eq_diff(
                &mk_app(successor(), church(n)),
                &church(n + 1),
                fuel,
                false,
                SumMode::Counted
            ),
            Verdict::Equal,
            "successor of {n}"
        );
    }
}

#[test]
fn term_values_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<DiffSum>();
    assert_send_sync::<SimpleTerm>();
    assert_send_sync::<dlam::res::ResSum>();
    assert_send_sync::<dlam::res::Bag>();
    assert_send_sync::<dlam::mrel::FinRel>();
    assert_send_sync::<dlam::dmodel::InterpEntry>();
}

#[test]
fn omega_never_normalizes_but_identity_does() {
    let (_, exhausted) = normalize_diff(&omega(), Fuel(100), false);
    assert!(exhausted);
    let (nf, exhausted) = normalize_diff(&mk_app(i(), i()), Fuel(100), false);
    assert!(!exhausted);
    assert_eq!(nf, i());
}
