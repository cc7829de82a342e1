//! Reduction and equational reasoning: single steps and fuel-bounded
//! normalization for both calculi, theory equality as a sound semi-decision,
//! truncated Taylor expansion and its normal-form procedure.

use crate::res::{canonicalize_res, free_vars_res, Bag, BagSum, ResSum, ResTerm, Resource};
use crate::subst::{dsubst, dsubst_multi, lsubst, rsubst, subst, FreshSupply};
use crate::term::{
    canonicalize, collect_names_simple, free_vars, in_taylor_fragment, mk_abs, mk_app,
    mk_dapp_multi, mk_var, DiffSum, SimpleTerm, SumMode, Var,
};

/// Root-redex contraction budget. Exhaustion is an outcome, not an error.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Fuel(pub u64);

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel(10_000)
    }
}

/// Truncation bounds for the Taylor expansion: maximal expansion index per
/// application node, and maximal simple-term size retained.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TaylorBudget {
    pub degree: u64,
    pub size_cap: u64,
}

impl Default for TaylorBudget {
    fn default() -> TaylorBudget {
        TaylorBudget {
            degree: 4,
            size_cap: 200,
        }
    }
}

/// Outcome of a bounded equality check.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Verdict {
    Equal,
    NotEqual,
    Unknown,
}

/// Redex selection strategy. The default is leftmost-outermost on the least
/// summand; the alternative exists for confluence smoke tests.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Strategy {
    LeftmostOutermost,
    RightmostInnermost,
}

// ---------------------------------------------------------------------------
// Differential reduction
// ---------------------------------------------------------------------------

fn contract_root(s: &SimpleTerm) -> Option<DiffSum> {
    match s {
        SimpleTerm::App(f, t) => {
            if let SimpleTerm::Abs(x, body) = &**f {
                // (beta): (\x.s)T = s{T/x}
                return Some(subst(&DiffSum::from_term((**body).clone()), x, t));
            }
            None
        }
        SimpleTerm::LinApp(h, args) => {
            if let SimpleTerm::Abs(x, body) = &**h {
                // (beta_D): D(\x.s)·t = \x.(ds/dx·t), contracting the least
                // argument of the flattened list. The binder stays, so it
                // must not capture free variables of the argument.
                let first = DiffSum::from_term(args[0].clone());
                let (x, body) = crate::subst::freshen_binder(
                    x,
                    &DiffSum::from_term((**body).clone()),
                    crate::term::free_vars_sum(&first),
                );
                let inner = mk_abs(x.clone(), dsubst(&body, &x, &first));
                let rest: Vec<DiffSum> = args[1..]
                    .iter()
                    .map(|a| DiffSum::from_term(a.clone()))
                    .collect();
                return Some(mk_dapp_multi(inner, &rest));
            }
            None
        }
        _ => None,
    }
}

fn contract_simple(s: &SimpleTerm, strat: Strategy) -> Option<DiffSum> {
    if strat == Strategy::LeftmostOutermost {
        if let Some(r) = contract_root(s) {
            return Some(r);
        }
    }
    let descended = match s {
        SimpleTerm::Var(_) => None,
        SimpleTerm::Abs(x, body) => contract_simple(body, strat).map(|b| mk_abs(x.clone(), b)),
        SimpleTerm::App(f, t) => {
            let try_fun = |s: Strategy| contract_simple(f, s).map(|fs| mk_app(fs, t.clone()));
            let try_arg = |s: Strategy| {
                contract_in_sum(t, s).map(|ts| mk_app(DiffSum::from_term((**f).clone()), ts))
            };
            match strat {
                Strategy::LeftmostOutermost => try_fun(strat).or_else(|| try_arg(strat)),
                Strategy::RightmostInnermost => try_arg(strat).or_else(|| try_fun(strat)),
            }
        }
        SimpleTerm::LinApp(h, args) => {
            let try_head = |strat| {
                contract_simple(h, strat).map(|hs| {
                    let arg_sums: Vec<DiffSum> =
                        args.iter().map(|a| DiffSum::from_term(a.clone())).collect();
                    mk_dapp_multi(hs, &arg_sums)
                })
            };
            let try_args = |strat: Strategy| {
                let order: Vec<usize> = match strat {
                    Strategy::LeftmostOutermost => (0..args.len()).collect(),
                    Strategy::RightmostInnermost => (0..args.len()).rev().collect(),
                };
                for i in order {
                    if let Some(ai) = contract_simple(&args[i], strat) {
                        let arg_sums: Vec<DiffSum> = args
                            .iter()
                            .enumerate()
                            .map(|(j, a)| {
                                if j == i {
                                    ai.clone()
                                } else {
                                    DiffSum::from_term(a.clone())
                                }
                            })
                            .collect();
                        return Some(mk_dapp_multi(DiffSum::from_term((**h).clone()), &arg_sums));
                    }
                }
                None
            };
            match strat {
                Strategy::LeftmostOutermost => try_head(strat).or_else(|| try_args(strat)),
                Strategy::RightmostInnermost => try_args(strat).or_else(|| try_head(strat)),
            }
        }
    };
    if descended.is_some() {
        return descended;
    }
    if strat == Strategy::RightmostInnermost {
        return contract_root(s);
    }
    None
}

fn contract_in_sum(sum: &DiffSum, strat: Strategy) -> Option<DiffSum> {
    let order: Vec<usize> = match strat {
        Strategy::LeftmostOutermost => (0..sum.summands().len()).collect(),
        Strategy::RightmostInnermost => (0..sum.summands().len()).rev().collect(),
    };
    for i in order {
        let (s, m) = &sum.summands()[i];
        if let Some(c) = contract_simple(s, strat) {
            let mut rest = DiffSum::zero();
            for (j, (t, k)) in sum.summands().iter().enumerate() {
                if j != i {
                    rest = rest.add(&DiffSum::from_term(t.clone()).scale(*k));
                }
            }
            return Some(canonicalize(&rest.add(&c.scale(*m)), SumMode::Counted));
        }
    }
    None
}

/// Contract one root redex in the least summand carrying one; `None` means
/// the sum is in (beta, beta_D)-normal form.
pub fn step_diff(sum: &DiffSum) -> Option<DiffSum> {
    step_diff_with(sum, Strategy::LeftmostOutermost)
}

/// Develop the sum by one bounded pass: contract the root redex of every
/// summand that is itself a redex, leaving other summands untouched.
/// `None` when no summand is a root redex.
pub fn step_diff_roots(sum: &DiffSum) -> Option<DiffSum> {
    let mut hit = false;
    let mut out = DiffSum::zero();
    for (s, m) in sum.summands() {
        match contract_root(s) {
            Some(c) => {
                hit = true;
                out = out.add(&c.scale(*m));
            }
            None => out = out.add(&DiffSum::from_term(s.clone()).scale(*m)),
        }
    }
    if hit {
        Some(canonicalize(&out, SumMode::Counted))
    } else {
        None
    }
}

pub fn step_diff_with(sum: &DiffSum, strat: Strategy) -> Option<DiffSum> {
    contract_in_sum(sum, strat)
}

fn eta_simple(s: &SimpleTerm) -> SimpleTerm {
    match s {
        SimpleTerm::Var(_) => s.clone(),
        SimpleTerm::Abs(x, body) => {
            let body = eta_simple(body);
            if let SimpleTerm::App(f, t) = &body {
                let is_x = matches!(t.as_single(), Some(SimpleTerm::Var(v)) if v == x);
                if is_x && !free_vars(f).contains(x) {
                    return (**f).clone();
                }
            }
            SimpleTerm::Abs(x.clone(), Box::new(body))
        }
        SimpleTerm::App(f, t) => {
            let t = DiffSum::from_iter(
                t.summands()
                    .iter()
                    .map(|(u, m)| DiffSum::from_term(eta_simple(u)).scale(*m)),
            );
            SimpleTerm::App(Box::new(eta_simple(f)), t)
        }
        SimpleTerm::LinApp(h, args) => SimpleTerm::LinApp(
            Box::new(eta_simple(h)),
            args.iter().map(eta_simple).collect(),
        ),
    }
}

fn eta_contract_sum(sum: &DiffSum) -> DiffSum {
    let mut cur = sum.clone();
    loop {
        let next = canonicalize(
            &DiffSum::from_iter(
                cur.summands()
                    .iter()
                    .map(|(s, m)| DiffSum::from_term(eta_simple(s)).scale(*m)),
            ),
            SumMode::Counted,
        );
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

/// Fuel-bounded normalization; with `eta` set, eta-contraction runs as a
/// post-pass at every normal form (contraction only, never expansion).
pub fn normalize_diff(sum: &DiffSum, fuel: Fuel, eta: bool) -> (DiffSum, bool) {
    normalize_diff_with(sum, fuel, eta, Strategy::LeftmostOutermost)
}

pub fn normalize_diff_with(
    sum: &DiffSum,
    fuel: Fuel,
    eta: bool,
    strat: Strategy,
) -> (DiffSum, bool) {
    let mut cur = canonicalize(sum, SumMode::Counted);
    let mut left = fuel.0;
    loop {
        match step_diff_with(&cur, strat) {
            Some(next) => {
                if left == 0 {
                    return (cur, true);
                }
                left -= 1;
                cur = next;
            }
            None => {
                if eta {
                    let contracted = eta_contract_sum(&cur);
                    if contracted != cur {
                        cur = contracted;
                        continue;
                    }
                }
                return (cur, false);
            }
        }
    }
}

/// Sound semi-decision for the least differential lambda-theory on
/// normalizing terms: Equal/NotEqual only when both sides reach normal form
/// within fuel.
pub fn theory_eq_diff(a: &DiffSum, b: &DiffSum, fuel: Fuel, eta: bool, mode: SumMode) -> Verdict {
    let (na, ea) = normalize_diff(a, fuel, eta);
    let (nb, eb) = normalize_diff(b, fuel, eta);
    if ea || eb {
        return Verdict::Unknown;
    }
    if canonicalize(&na, mode) == canonicalize(&nb, mode) {
        Verdict::Equal
    } else {
        Verdict::NotEqual
    }
}

// ---------------------------------------------------------------------------
// Resource reduction (giant-step)
// ---------------------------------------------------------------------------

fn contract_res_root(t: &ResTerm) -> Option<ResSum> {
    if let ResTerm::App(f, bag) = t {
        if let ResTerm::Abs(x, body) = &**f {
            // (beta^r): (\x.M)[Lbar, Nbar^!] = (M<Lbar/x>){Sum N_i/x},
            // with the binder renamed away from the bag's free variables.
            let (x, mut acc) =
                crate::subst::freshen_res_binder(x, body, crate::res::free_vars_bag(bag));
            let mut linear: Vec<ResTerm> = Vec::new();
            let mut banged = ResSum::zero();
            for (r, m) in bag.items() {
                match r {
                    Resource::Linear(l) => {
                        for _ in 0..*m {
                            linear.push(l.clone());
                        }
                    }
                    Resource::Banged(n) => {
                        banged = banged.add(&ResSum::from_term(n.clone()).scale(*m));
                    }
                }
            }
            for l in &linear {
                acc = lsubst(&acc, &x, &ResSum::from_term(l.clone()));
            }
            return Some(rsubst(&acc, &x, &banged));
        }
    }
    None
}

fn contract_res(t: &ResTerm, strat: Strategy) -> Option<ResSum> {
    if strat == Strategy::LeftmostOutermost {
        if let Some(r) = contract_res_root(t) {
            return Some(r);
        }
    }
    let descended = match t {
        ResTerm::Var(_) => None,
        ResTerm::Abs(x, body) => {
            contract_res(body, strat).map(|b| crate::res::mk_rabs(x.clone(), b))
        }
        ResTerm::App(f, bag) => {
            let try_fun = |strat| {
                contract_res(f, strat)
                    .map(|fs| crate::res::mk_rapp(fs, BagSum::from_bag(bag.clone())))
            };
            let try_bag = |strat| {
                contract_in_bag(bag, strat)
                    .map(|bs| crate::res::mk_rapp(ResSum::from_term((**f).clone()), bs))
            };
            match strat {
                Strategy::LeftmostOutermost => try_fun(strat).or_else(|| try_bag(strat)),
                Strategy::RightmostInnermost => try_bag(strat).or_else(|| try_fun(strat)),
            }
        }
    };
    if descended.is_some() {
        return descended;
    }
    if strat == Strategy::RightmostInnermost {
        return contract_res_root(t);
    }
    None
}

fn contract_in_bag(bag: &Bag, strat: Strategy) -> Option<BagSum> {
    let items = bag.items();
    let order: Vec<usize> = match strat {
        Strategy::LeftmostOutermost => (0..items.len()).collect(),
        Strategy::RightmostInnermost => (0..items.len()).rev().collect(),
    };
    for i in order {
        let (r, _) = &items[i];
        if let Some(c) = contract_res(r.term(), strat) {
            // Rewrite one occurrence; the remaining mult-1 copies stay.
            let mut rest = Bag::empty();
            for (j, (r2, m2)) in items.iter().enumerate() {
                let k = if i == j { m2 - 1 } else { *m2 };
                for _ in 0..k {
                    rest = rest.union(&crate::res::mk_bag(vec![r2.clone()]));
                }
            }
            let replaced = match r {
                Resource::Linear(_) => crate::res::bag_cons_linear(c, &rest),
                Resource::Banged(_) => BagSum::from_bag(crate::res::bag_cons_banged(c, &rest)),
            };
            return Some(replaced);
        }
    }
    None
}

fn contract_in_rsum(sum: &ResSum, strat: Strategy) -> Option<ResSum> {
    let order: Vec<usize> = match strat {
        Strategy::LeftmostOutermost => (0..sum.summands().len()).collect(),
        Strategy::RightmostInnermost => (0..sum.summands().len()).rev().collect(),
    };
    for i in order {
        let (t, m) = &sum.summands()[i];
        if let Some(c) = contract_res(t, strat) {
            let mut rest = ResSum::zero();
            for (j, (u, k)) in sum.summands().iter().enumerate() {
                if j != i {
                    rest = rest.add(&ResSum::from_term(u.clone()).scale(*k));
                }
            }
            return Some(canonicalize_res(&rest.add(&c.scale(*m)), SumMode::Counted));
        }
    }
    None
}

/// One giant-step contraction in the least summand; `None` at normal form.
pub fn step_res(sum: &ResSum) -> Option<ResSum> {
    step_res_with(sum, Strategy::LeftmostOutermost)
}

pub fn step_res_with(sum: &ResSum, strat: Strategy) -> Option<ResSum> {
    contract_in_rsum(sum, strat)
}

fn eta_res(t: &ResTerm) -> ResTerm {
    match t {
        ResTerm::Var(_) => t.clone(),
        ResTerm::Abs(x, body) => {
            let body = eta_res(body);
            if let ResTerm::App(f, bag) = &body {
                // (eta^r): \x.M[x^!] = M with x not free in M.
                let single = match bag.items() {
                    [(Resource::Banged(ResTerm::Var(v)), 1)] => v == x,
                    _ => false,
                };
                if single && !free_vars_res(f).contains(x) {
                    return (**f).clone();
                }
            }
            ResTerm::Abs(x.clone(), Box::new(body))
        }
        ResTerm::App(f, bag) => {
            let mut items = Vec::new();
            for (r, m) in bag.items() {
                let r2 = match r {
                    Resource::Linear(u) => Resource::Linear(eta_res(u)),
                    Resource::Banged(u) => Resource::Banged(eta_res(u)),
                };
                for _ in 0..*m {
                    items.push(r2.clone());
                }
            }
            ResTerm::App(Box::new(eta_res(f)), crate::res::mk_bag(items))
        }
    }
}

fn eta_contract_rsum(sum: &ResSum) -> ResSum {
    let mut cur = sum.clone();
    loop {
        let next = canonicalize_res(&sum_map(&cur, eta_res), SumMode::Counted);
        if next == cur {
            return cur;
        }
        cur = next;
    }
}

fn sum_map(sum: &ResSum, f: impl Fn(&ResTerm) -> ResTerm) -> ResSum {
    sum.summands()
        .iter()
        .map(|(t, m)| ResSum::from_term(f(t)).scale(*m))
        .collect()
}

pub fn normalize_res(sum: &ResSum, fuel: Fuel, eta: bool) -> (ResSum, bool) {
    normalize_res_with(sum, fuel, eta, Strategy::LeftmostOutermost)
}

pub fn normalize_res_with(sum: &ResSum, fuel: Fuel, eta: bool, strat: Strategy) -> (ResSum, bool) {
    let mut cur = canonicalize_res(sum, SumMode::Counted);
    let mut left = fuel.0;
    loop {
        match step_res_with(&cur, strat) {
            Some(next) => {
                if left == 0 {
                    return (cur, true);
                }
                left -= 1;
                cur = next;
            }
            None => {
                if eta {
                    let contracted = eta_contract_rsum(&cur);
                    if contracted != cur {
                        cur = contracted;
                        continue;
                    }
                }
                return (cur, false);
            }
        }
    }
}

pub fn theory_eq_res(a: &ResSum, b: &ResSum, fuel: Fuel, eta: bool, mode: SumMode) -> Verdict {
    let (na, ea) = normalize_res(a, fuel, eta);
    let (nb, eb) = normalize_res(b, fuel, eta);
    if ea || eb {
        return Verdict::Unknown;
    }
    if canonicalize_res(&na, mode) == canonicalize_res(&nb, mode) {
        Verdict::Equal
    } else {
        Verdict::NotEqual
    }
}

// ---------------------------------------------------------------------------
// Taylor expansion
// ---------------------------------------------------------------------------

fn cap_sum(sum: DiffSum, budget: &TaylorBudget, clipped: &mut bool) -> DiffSum {
    let keep: DiffSum = sum
        .summands()
        .iter()
        .filter(|(s, _)| {
            let fits = s.size() <= budget.size_cap;
            if !fits {
                *clipped = true;
            }
            fits
        })
        .map(|(s, _)| DiffSum::from_term(s.clone()))
        .collect();
    canonicalize(&keep, SumMode::Idempotent)
}

fn tay_simple(s: &SimpleTerm, budget: &TaylorBudget, clipped: &mut bool) -> DiffSum {
    let out = match s {
        SimpleTerm::Var(v) => mk_var(v.clone()),
        SimpleTerm::Abs(x, body) => mk_abs(x.clone(), tay_simple(body, budget, clipped)),
        SimpleTerm::LinApp(h, args) => {
            let head = tay_simple(h, budget, clipped);
            let args: Vec<DiffSum> = args
                .iter()
                .map(|a| tay_simple(a, budget, clipped))
                .collect();
            mk_dapp_multi(head, &args)
        }
        SimpleTerm::App(f, t) => {
            // (sT)* = sum_k (D^k s*·(T*,...,T*))0, truncated at the degree.
            let fs = tay_simple(f, budget, clipped);
            let ts = tay_sum(t, budget, clipped);
            let mut out = DiffSum::zero();
            for k in 0..=budget.degree {
                let args = vec![ts.clone(); k as usize];
                let dk = mk_dapp_multi(fs.clone(), &args);
                let dk = cap_sum(dk, budget, clipped);
                out = out.add(&mk_app(dk, DiffSum::zero()));
            }
            out
        }
    };
    cap_sum(out, budget, clipped)
}

fn tay_sum(sum: &DiffSum, budget: &TaylorBudget, clipped: &mut bool) -> DiffSum {
    let out: DiffSum = sum
        .summands()
        .iter()
        .map(|(s, _)| tay_simple(s, budget, clipped))
        .collect();
    canonicalize(&out, SumMode::Idempotent)
}

/// Truncated Taylor expansion: homomorphic clauses with every ordinary
/// application expanded for k = 0..=degree; sums are idempotent. The flag
/// reports whether the size cap dropped any summand.
pub fn taylor(sum: &DiffSum, budget: &TaylorBudget) -> (DiffSum, bool) {
    let mut clipped = false;
    let out = tay_sum(sum, budget, &mut clipped);
    (out, clipped)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TaylorNfError {
    #[error("term is outside the Taylor target fragment")]
    NotInFragment,
    #[error("fuel exhausted while computing the Taylor normal form")]
    FuelExhausted,
}

enum SpineOp {
    AppZero,
    Lin(Vec<SimpleTerm>),
}

/// Normal form of a term in the Taylor target fragment (iterated linear
/// applications and applications to 0 only).
pub fn taylor_nf(sum: &DiffSum, fuel: Fuel) -> Result<DiffSum, TaylorNfError> {
    if !in_taylor_fragment(sum) {
        return Err(TaylorNfError::NotInFragment);
    }
    let mut left = fuel.0;
    nf_sum(sum, &mut left)
}

fn nf_sum(sum: &DiffSum, fuel: &mut u64) -> Result<DiffSum, TaylorNfError> {
    let mut out = DiffSum::zero();
    for (s, _) in sum.summands() {
        out = out.add(&nf_simple(s, fuel)?);
    }
    Ok(canonicalize(&out, SumMode::Idempotent))
}

fn nf_simple(s: &SimpleTerm, fuel: &mut u64) -> Result<DiffSum, TaylorNfError> {
    // Strip leading binders.
    let mut binders: Vec<Var> = Vec::new();
    let mut cur = s;
    while let SimpleTerm::Abs(x, b) = cur {
        binders.push(x.clone());
        cur = b;
    }
    // Collect the application spine, outermost first.
    let mut ops: Vec<SpineOp> = Vec::new();
    loop {
        match cur {
            SimpleTerm::App(f, t) => {
                debug_assert!(t.is_zero());
                ops.push(SpineOp::AppZero);
                cur = f;
            }
            SimpleTerm::LinApp(h, args) => {
                ops.push(SpineOp::Lin(args.clone()));
                cur = h;
            }
            _ => break,
        }
    }
    match cur {
        SimpleTerm::Var(v) => {
            // Head variable: normalize all linear arguments and rebuild.
            let mut acc = mk_var(v.clone());
            for op in ops.iter().rev() {
                match op {
                    SpineOp::AppZero => acc = mk_app(acc, DiffSum::zero()),
                    SpineOp::Lin(args) => {
                        let mut arg_sums = Vec::with_capacity(args.len());
                        for a in args {
                            arg_sums.push(nf_sum(&DiffSum::from_term(a.clone()), fuel)?);
                        }
                        acc = mk_dapp_multi(acc, &arg_sums);
                    }
                }
            }
            for x in binders.iter().rev() {
                acc = mk_abs(x.clone(), acc);
            }
            Ok(canonicalize(&acc, SumMode::Idempotent))
        }
        SimpleTerm::Abs(..) => {
            // Head abstraction: contract against the innermost spine entry.
            if *fuel == 0 {
                return Err(TaylorNfError::FuelExhausted);
            }
            *fuel -= 1;
            let (x, body) = match cur {
                SimpleTerm::Abs(x, b) => (x.clone(), DiffSum::from_term((**b).clone())),
                _ => unreachable!(),
            };
            let innermost = ops.pop().expect("head abstraction implies a spine entry");
            let contracted = match innermost {
                SpineOp::AppZero => subst(&body, &x, &DiffSum::zero()),
                SpineOp::Lin(args) => {
                    // Rename the binder away from the arguments, then apply
                    // the multi-differential substitution.
                    let mut names = std::collections::BTreeSet::new();
                    for a in &args {
                        collect_names_simple(a, &mut names);
                    }
                    for (t, _) in body.summands() {
                        collect_names_simple(t, &mut names);
                    }
                    let mut supply = FreshSupply::new();
                    for n in &names {
                        supply.reserve_name(n);
                    }
                    supply.reserve_name(x.name());
                    let arg_sums: Vec<DiffSum> =
                        args.iter().map(|a| DiffSum::from_term(a.clone())).collect();
                    let (x, body) = if args.iter().any(|a| free_vars(a).contains(&x)) {
                        let x2 = supply.fresh(x.name());
                        let renamed = subst(&body, &x, &mk_var(x2.clone()));
                        (x2, renamed)
                    } else {
                        (x, body)
                    };
                    let vars = vec![x.clone(); arg_sums.len()];
                    let inner = dsubst_multi(&body, &vars, &arg_sums)
                        .expect("binder was renamed away from the arguments");
                    mk_abs(x, inner)
                }
            };
            // Plug the contractum back under the remaining spine and binders.
            let mut acc = contracted;
            for op in ops.iter().rev() {
                match op {
                    SpineOp::AppZero => acc = mk_app(acc, DiffSum::zero()),
                    SpineOp::Lin(args) => {
                        let arg_sums: Vec<DiffSum> =
                            args.iter().map(|a| DiffSum::from_term(a.clone())).collect();
                        acc = mk_dapp_multi(acc, &arg_sums);
                    }
                }
            }
            for x in binders.iter().rev() {
                acc = mk_abs(x.clone(), acc);
            }
            nf_sum(&acc, fuel)
        }
        _ => unreachable!(),
    }
}

/// Budget-relative Taylor equality: both sides are expanded, normalized and
/// compared as idempotent summand sets. `NotEqual` is only reported when the
/// size cap clipped neither side.
pub fn taylor_eq(a: &DiffSum, b: &DiffSum, budget: &TaylorBudget, fuel: Fuel) -> Verdict {
    let (ea, ca) = taylor(a, budget);
    let (eb, cb) = taylor(b, budget);
    let na = taylor_nf(&ea, fuel);
    let nb = taylor_nf(&eb, fuel);
    match (na, nb) {
        (Ok(na), Ok(nb)) => {
            if na == nb {
                Verdict::Equal
            } else if !ca && !cb {
                Verdict::NotEqual
            } else {
                Verdict::Unknown
            }
        }
        _ => Verdict::Unknown,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{delta, i, omega};
    use crate::res::{bag_cons_linear, mk_bag, mk_rabs, mk_rapp, mk_rvar, Resource};
    use crate::term::mk_dapp;

    fn v(s: &str) -> DiffSum {
        mk_var(s)
    }

    #[test]
    fn beta_identity() {
        let t = mk_app(i(), v("z"));
        assert_eq!(step_diff(&t).unwrap(), v("z"));
    }

    #[test]
    fn omega_loops() {
        let s = step_diff(&omega()).unwrap();
        assert_eq!(s, omega());
        let (_, exhausted) = normalize_diff(&omega(), Fuel(100), false);
        assert!(exhausted);
    }

    #[test]
    fn beta_d_example() {
        // (D Delta·y) z ->* y z + (D z·y) z
        let t = mk_app(mk_dapp(delta(), v("y")), v("z"));
        let (nf, ex) = normalize_diff(&t, Fuel(100), false);
        assert!(!ex);
        let expect = mk_app(v("y"), v("z")).add(&mk_app(mk_dapp(v("z"), v("y")), v("z")));
        assert_eq!(nf, expect);
    }

    #[test]
    fn second_derivative_of_delta_at_zero() {
        // (D^2 Delta·(x,y)) 0 ->* (D x·y) 0 + (D y·x) 0
        let t = mk_app(mk_dapp(mk_dapp(delta(), v("x")), v("y")), DiffSum::zero());
        let (nf, _) = normalize_diff(&t, Fuel(100), false);
        let expect = mk_app(mk_dapp(v("x"), v("y")), DiffSum::zero())
            .add(&mk_app(mk_dapp(v("y"), v("x")), DiffSum::zero()));
        assert_eq!(nf, expect);
    }

    #[test]
    fn eta_contraction_applies() {
        // \x.s x = s via the eta post-pass
        let t = mk_abs("x", mk_app(v("s"), v("x")));
        let (nf, _) = normalize_diff(&t, Fuel(10), true);
        assert_eq!(nf, v("s"));
        // but \x.x x is untouched (x free in the function part)
        let (nf2, _) = normalize_diff(&delta(), Fuel(10), true);
        assert_eq!(nf2, delta());
    }

    #[test]
    fn theory_eq_examples() {
        assert_eq!(
            theory_eq_diff(&v("x"), &v("y"), Fuel(10), false, SumMode::Counted),
            Verdict::NotEqual
        );
        assert_eq!(
            theory_eq_diff(
                &omega(),
                &DiffSum::zero(),
                Fuel(50),
                false,
                SumMode::Counted
            ),
            Verdict::Unknown
        );
    }

    #[test]
    fn resource_giant_step_examples() {
        // (\x.x[x])[I] ->* 0, [I,I] ->* I, [I,I,I] ->* 0
        let ri = mk_rabs("z", mk_rvar("z"));
        let body = mk_rapp(mk_rvar("x"), bag_cons_linear(mk_rvar("x"), &Bag::empty()));
        let f = mk_rabs("x", body);
        for (n, expect_zero) in [(1, true), (2, false), (3, true)] {
            let bag = mk_bag(vec![Resource::Linear(ri.as_single().unwrap().clone()); n]);
            let t = mk_rapp(f.clone(), BagSum::from_bag(bag));
            let (nf, ex) = normalize_res(&t, Fuel(100), false);
            assert!(!ex);
            assert_eq!(nf.is_zero(), expect_zero, "n = {n}");
            if !expect_zero {
                // Two ways to route the two copies: multiplicity 2, which
                // collapses to the identity under the idempotent sum.
                assert_eq!(nf, ri.scale(2));
                assert_eq!(canonicalize_res(&nf, SumMode::Idempotent), ri);
            }
        }
    }

    #[test]
    fn resource_two_distinct_arguments() {
        // (\x.x[x])[M,N] ->* M[N] + N[M]
        let body = mk_rapp(mk_rvar("x"), bag_cons_linear(mk_rvar("x"), &Bag::empty()));
        let f = mk_rabs("x", body);
        let bag = mk_bag(vec![
            Resource::Linear(ResTerm::Var(Var::new("M"))),
            Resource::Linear(ResTerm::Var(Var::new("N"))),
        ]);
        let t = mk_rapp(f, BagSum::from_bag(bag));
        let (nf, _) = normalize_res(&t, Fuel(100), false);
        let expect = mk_rapp(mk_rvar("M"), bag_cons_linear(mk_rvar("N"), &Bag::empty())).add(
            &mk_rapp(mk_rvar("N"), bag_cons_linear(mk_rvar("M"), &Bag::empty())),
        );
        assert_eq!(nf, expect);
    }

    #[test]
    fn taylor_of_variable_and_identity() {
        let b = TaylorBudget::default();
        assert_eq!(taylor(&v("x"), &b).0, v("x"));
        assert_eq!(taylor(&i(), &b).0, i());
    }

    #[test]
    fn taylor_of_application_at_degree_one() {
        // (x y)* at K=1 is x 0 + (D x·y) 0
        let b = TaylorBudget {
            degree: 1,
            size_cap: 100,
        };
        let (e, clipped) = taylor(&mk_app(v("x"), v("y")), &b);
        assert!(!clipped);
        let expect =
            mk_app(v("x"), DiffSum::zero()).add(&mk_app(mk_dapp(v("x"), v("y")), DiffSum::zero()));
        assert_eq!(e, canonicalize(&expect, SumMode::Idempotent));
    }

    #[test]
    fn taylor_nf_examples() {
        // NF(x) = x
        assert_eq!(taylor_nf(&v("x"), Fuel(10)).unwrap(), v("x"));
        // NF((D(\x.x)·y) 0) = y
        let t = mk_app(mk_dapp(i(), v("y")), DiffSum::zero());
        assert_eq!(taylor_nf(&t, Fuel(10)).unwrap(), v("y"));
        // NF((\x.x) 0) = 0
        let t2 = mk_app(i(), DiffSum::zero());
        assert_eq!(taylor_nf(&t2, Fuel(10)).unwrap(), DiffSum::zero());
        // Ordinary applications are rejected.
        assert_eq!(
            taylor_nf(&mk_app(v("x"), v("y")), Fuel(10)),
            Err(TaylorNfError::NotInFragment)
        );
    }

    #[test]
    fn taylor_eq_beta_pair() {
        // \x.(\y.y) x = \x.x at K >= 1
        let lhs = mk_abs("x", mk_app(mk_abs("y", v("y")), v("x")));
        let rhs = i();
        let b = TaylorBudget {
            degree: 1,
            size_cap: 100,
        };
        assert_eq!(taylor_eq(&lhs, &rhs, &b, Fuel(100)), Verdict::Equal);
        assert_eq!(
            taylor_eq(&v("x"), &v("y"), &b, Fuel(100)),
            Verdict::NotEqual
        );
        assert_eq!(taylor_eq(&lhs, &lhs, &b, Fuel(100)), Verdict::Equal);
    }
}
