//! Faithful translations between the resource calculus and the differential
//! lambda calculus, in both directions, plus round-trip checks.

use crate::res::{
    bag_cons_banged, canonicalize_res, mk_rabs, mk_rapp, mk_rvar, Bag, BagSum, ResSum, ResTerm,
    Resource,
};
use crate::rewrite::{theory_eq_diff, theory_eq_res, Fuel, Verdict};
use crate::subst::FreshSupply;
use crate::term::{
    canonicalize, collect_names_simple, mk_abs, mk_app, mk_dapp_multi, mk_var, DiffSum, SimpleTerm,
    SumMode,
};

/// Supplies the fresh `y$k` binder for translating linear applications. The
/// `y$` namespace is rejected by the concrete grammar, so emitted names can
/// never collide with parsed variables; names of the translated term are
/// reserved as well.
pub struct TranslationContext {
    supply: FreshSupply,
}

impl TranslationContext {
    pub fn for_diff(sum: &DiffSum) -> TranslationContext {
        let mut names = std::collections::BTreeSet::new();
        for (s, _) in sum.summands() {
            collect_names_simple(s, &mut names);
        }
        let mut supply = FreshSupply::new();
        for n in names {
            supply.reserve_name(&n);
        }
        TranslationContext { supply }
    }

    fn fresh(&mut self) -> crate::term::Var {
        self.supply.fresh("y$")
    }
}

// ---------------------------------------------------------------------------
// Resource -> differential
// ---------------------------------------------------------------------------

fn rterm_to_diff(t: &ResTerm) -> DiffSum {
    match t {
        ResTerm::Var(v) => mk_var(v.clone()),
        ResTerm::Abs(x, body) => mk_abs(x.clone(), rterm_to_diff(body)),
        ResTerm::App(f, bag) => {
            // (M[L_1..L_k, N_1^!..N_n^!])^d = (D^k M^d·(L^d))(Sum N_i^d)
            let head = rterm_to_diff(f);
            let mut linear: Vec<DiffSum> = Vec::new();
            let mut banged = DiffSum::zero();
            for (r, m) in bag.items() {
                match r {
                    Resource::Linear(l) => {
                        for _ in 0..*m {
                            linear.push(rterm_to_diff(l));
                        }
                    }
                    Resource::Banged(n) => {
                        banged = banged.add(&rterm_to_diff(n).scale(*m));
                    }
                }
            }
            mk_app(mk_dapp_multi(head, &linear), banged)
        }
    }
}

/// Translation (·)^d from resource sums to differential sums.
pub fn to_diff(sum: &ResSum) -> DiffSum {
    let out: DiffSum = sum
        .summands()
        .iter()
        .map(|(t, m)| rterm_to_diff(t).scale(*m))
        .collect();
    canonicalize(&out, SumMode::Counted)
}

// ---------------------------------------------------------------------------
// Differential -> resource
// ---------------------------------------------------------------------------

fn simple_to_res(s: &SimpleTerm, ctx: &mut TranslationContext) -> ResSum {
    match s {
        SimpleTerm::Var(v) => mk_rvar(v.clone()),
        SimpleTerm::Abs(x, body) => mk_rabs(x.clone(), simple_to_res(body, ctx)),
        SimpleTerm::App(f, t) => {
            // (sT)^r = s^r[(T^r)^!]
            let fun = simple_to_res(f, ctx);
            let arg = sum_to_res(t, ctx);
            mk_rapp(fun, BagSum::from_bag(bag_cons_banged(arg, &Bag::empty())))
        }
        SimpleTerm::LinApp(h, args) => {
            // (D^k s·(t_1..t_k))^r = \y.s^r[t_1^r,..,t_k^r, y^!], y fresh
            let y = ctx.fresh();
            let fun = simple_to_res(h, ctx);
            let mut bags = BagSum::from_bag(Bag::empty());
            for a in args {
                let ar = simple_to_res(a, ctx);
                let mut next = BagSum::zero();
                for (partial, k) in bags.summands() {
                    next = next.add(&crate::res::bag_cons_linear(ar.clone(), partial).scale(*k));
                }
                bags = next;
            }
            // Attach the banged fresh variable to every bag in the sum.
            let mut with_bang = BagSum::zero();
            for (partial, k) in bags.summands() {
                let b = bag_cons_banged(mk_rvar(y.clone()), partial);
                with_bang = with_bang.add(&BagSum::from_bag(b).scale(*k));
            }
            mk_rabs(y, mk_rapp(fun, with_bang))
        }
    }
}

fn sum_to_res(sum: &DiffSum, ctx: &mut TranslationContext) -> ResSum {
    sum.summands()
        .iter()
        .map(|(s, m)| simple_to_res(s, ctx).scale(*m))
        .collect()
}

/// Translation (·)^r from differential sums to resource sums.
pub fn to_res(sum: &DiffSum) -> ResSum {
    let mut ctx = TranslationContext::for_diff(sum);
    canonicalize_res(&sum_to_res(sum, &mut ctx), SumMode::Counted)
}

// ---------------------------------------------------------------------------
// Round trips
// ---------------------------------------------------------------------------

/// True when the sum is a plain lambda term: no linear applications, no
/// sums, no 0 (a single summand everywhere).
pub fn is_pure_lambda(sum: &DiffSum) -> bool {
    fn pure_simple(s: &SimpleTerm) -> bool {
        match s {
            SimpleTerm::Var(_) => true,
            SimpleTerm::Abs(_, b) => pure_simple(b),
            SimpleTerm::App(f, t) => {
                pure_simple(f) && matches!(t.as_single(), Some(u) if pure_simple(u))
            }
            SimpleTerm::LinApp(..) => false,
        }
    }
    matches!(sum.as_single(), Some(s) if pure_simple(s))
}

/// Check lambda-beta-eta^d |- (S^r)^d = S. For pure lambda terms the round
/// trip is the syntactic identity.
pub fn roundtrip_dr(sum: &DiffSum, fuel: Fuel) -> Verdict {
    let back = to_diff(&to_res(sum));
    if is_pure_lambda(sum) {
        return if back == *sum {
            Verdict::Equal
        } else {
            Verdict::NotEqual
        };
    }
    theory_eq_diff(&back, sum, fuel, true, SumMode::Counted)
}

/// Check lambda-beta^r |- (M^d)^r = M.
pub fn roundtrip_rd(sum: &ResSum, fuel: Fuel) -> Verdict {
    let back = to_res(&to_diff(sum));
    theory_eq_res(&back, sum, fuel, false, SumMode::Counted)
}
