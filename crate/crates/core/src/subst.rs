//! Substitution operators for both calculi: capture-free and differential
//! substitution on differential lambda terms, linear and classic
//! substitution on resource terms.
//!
//! Every operator returns canonical sums, so equalities between results are
//! plain equality checks. Bound variables are renamed lazily, only when a
//! capture would otherwise occur.

use std::collections::BTreeSet;

use crate::res::{
    bag_cons_banged, bag_cons_linear, canonicalize_res, free_vars_res, mk_rabs, mk_rapp, Bag,
    BagSum, ResSum, ResTerm, Resource,
};
use crate::term::{
    canonicalize, collect_names_simple, free_vars, mk_abs, mk_app, mk_dapp, mk_dapp_multi, mk_var,
    DiffSum, SimpleTerm, SumMode, Var,
};

/// Deterministic source of fresh variable names, avoiding a reserved set and
/// everything it has already produced.
#[derive(Clone, Debug)]
pub struct FreshSupply {
    reserved: BTreeSet<String>,
    counter: u64,
}

impl FreshSupply {
    pub fn new() -> FreshSupply {
        FreshSupply {
            reserved: BTreeSet::new(),
            counter: 0,
        }
    }

    pub fn reserve_name(&mut self, name: &str) {
        self.reserved.insert(name.to_string());
    }

    pub fn reserve_all<'a>(&mut self, names: impl IntoIterator<Item = &'a Var>) {
        for v in names {
            self.reserved.insert(v.name().to_string());
        }
    }

    /// Next fresh variable, derived from a hint.
    pub fn fresh(&mut self, hint: &str) -> Var {
        let base: String = hint.chars().take_while(|c| !c.is_ascii_digit()).collect();
        let base = if base.is_empty() {
            "v".to_string()
        } else {
            base
        };
        loop {
            let cand = format!("{}{}", base, self.counter);
            self.counter += 1;
            if !self.reserved.contains(&cand) {
                self.reserved.insert(cand.clone());
                return Var::new(cand);
            }
        }
    }
}

impl Default for FreshSupply {
    fn default() -> Self {
        FreshSupply::new()
    }
}

/// Rename a binder away from the free variables of `avoid`, returning the
/// (possibly fresh) binder and the adjusted body.
pub(crate) fn freshen_binder(
    x: &Var,
    body: &DiffSum,
    avoid: impl IntoIterator<Item = Var>,
) -> (Var, DiffSum) {
    let avoid: BTreeSet<Var> = avoid.into_iter().collect();
    if !avoid.contains(x) {
        return (x.clone(), body.clone());
    }
    let mut supply = supply_for_sums(&[body]);
    for v in &avoid {
        supply.reserve_name(v.name());
    }
    supply.reserve_name(x.name());
    let x2 = supply.fresh(x.name());
    let renamed = subst(body, x, &mk_var(x2.clone()));
    (x2, renamed)
}

/// Resource-term variant of [`freshen_binder`].
pub(crate) fn freshen_res_binder(
    x: &Var,
    body: &ResTerm,
    avoid: impl IntoIterator<Item = Var>,
) -> (Var, ResSum) {
    let avoid: BTreeSet<Var> = avoid.into_iter().collect();
    if !avoid.contains(x) {
        return (x.clone(), ResSum::from_term(body.clone()));
    }
    let mut supply = FreshSupply::new();
    collect_res_names(body, &mut supply);
    for v in &avoid {
        supply.reserve_name(v.name());
    }
    supply.reserve_name(x.name());
    let x2 = supply.fresh(x.name());
    let renamed = rsubst_term(body, x, &crate::res::mk_rvar(x2.clone()), &mut supply);
    (x2, renamed)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubstError {
    #[error("differential substitution precondition violated: {var} occurs free in an argument")]
    PreconditionViolation { var: Var },
    #[error("variable/argument lists differ in length: {vars} vs {args}")]
    LengthMismatch { vars: usize, args: usize },
}

fn supply_for_sums(sums: &[&DiffSum]) -> FreshSupply {
    let mut names = BTreeSet::new();
    for sum in sums {
        for (s, _) in sum.summands() {
            collect_names_simple(s, &mut names);
        }
    }
    let mut supply = FreshSupply::new();
    for n in names {
        supply.reserve_name(&n);
    }
    supply
}

// ---------------------------------------------------------------------------
// Capture-free substitution
// ---------------------------------------------------------------------------

fn subst_simple(s: &SimpleTerm, x: &Var, t: &DiffSum, supply: &mut FreshSupply) -> DiffSum {
    match s {
        SimpleTerm::Var(y) => {
            if y == x {
                t.clone()
            } else {
                mk_var(y.clone())
            }
        }
        SimpleTerm::Abs(y, body) => {
            if y == x {
                // x is shadowed; nothing to substitute below.
                return DiffSum::from_term(s.clone());
            }
            if crate::term::free_vars_sum(t).contains(y) && free_vars(body).contains(x) {
                let y2 = supply.fresh(y.name());
                let renamed = subst_simple(body, y, &mk_var(y2.clone()), supply);
                mk_abs(y2, subst_sum(&renamed, x, t, supply))
            } else {
                mk_abs(y.clone(), subst_simple(body, x, t, supply))
            }
        }
        SimpleTerm::App(f, arg) => {
            mk_app(subst_simple(f, x, t, supply), subst_sum(arg, x, t, supply))
        }
        SimpleTerm::LinApp(h, args) => {
            let head = subst_simple(h, x, t, supply);
            let args: Vec<DiffSum> = args.iter().map(|a| subst_simple(a, x, t, supply)).collect();
            mk_dapp_multi(head, &args)
        }
    }
}

fn subst_sum(sum: &DiffSum, x: &Var, t: &DiffSum, supply: &mut FreshSupply) -> DiffSum {
    sum.summands()
        .iter()
        .map(|(s, m)| subst_simple(s, x, t, supply).scale(*m))
        .collect()
}

/// Capture-free substitution S{T/x}.
pub fn subst(sum: &DiffSum, x: &Var, t: &DiffSum) -> DiffSum {
    let mut supply = supply_for_sums(&[sum, t]);
    supply.reserve_name(x.name());
    canonicalize(&subst_sum(sum, x, t, &mut supply), SumMode::Counted)
}

// ---------------------------------------------------------------------------
// Differential substitution
// ---------------------------------------------------------------------------

fn dsubst_simple(s: &SimpleTerm, x: &Var, t: &DiffSum, supply: &mut FreshSupply) -> DiffSum {
    match s {
        SimpleTerm::Var(y) => {
            if y == x {
                t.clone()
            } else {
                DiffSum::zero()
            }
        }
        SimpleTerm::Abs(y, body) => {
            if y == x {
                return DiffSum::zero();
            }
            if crate::term::free_vars_sum(t).contains(y) && free_vars(body).contains(x) {
                let y2 = supply.fresh(y.name());
                let renamed = subst_simple(body, y, &mk_var(y2.clone()), supply);
                mk_abs(y2, dsubst_sum(&renamed, x, t, supply))
            } else {
                mk_abs(y.clone(), dsubst_simple(body, x, t, supply))
            }
        }
        SimpleTerm::App(f, arg) => {
            // d(sU)/dx·T = (ds/dx·T)U + (D s·(dU/dx·T))U
            let left = mk_app(dsubst_simple(f, x, t, supply), arg.clone());
            let darg = dsubst_sum(arg, x, t, supply);
            let right = mk_app(
                mk_dapp(DiffSum::from_term((**f).clone()), darg),
                arg.clone(),
            );
            left.add(&right)
        }
        SimpleTerm::LinApp(h, args) => {
            let arg_sums: Vec<DiffSum> =
                args.iter().map(|a| DiffSum::from_term(a.clone())).collect();
            let mut out = mk_dapp_multi(dsubst_simple(h, x, t, supply), &arg_sums);
            for i in 0..args.len() {
                let mut with_i = arg_sums.clone();
                with_i[i] = dsubst_simple(&args[i], x, t, supply);
                out = out.add(&mk_dapp_multi(DiffSum::from_term((**h).clone()), &with_i));
            }
            out
        }
    }
}

fn dsubst_sum(sum: &DiffSum, x: &Var, t: &DiffSum, supply: &mut FreshSupply) -> DiffSum {
    sum.summands()
        .iter()
        .map(|(s, m)| dsubst_simple(s, x, t, supply).scale(*m))
        .collect()
}

/// Differential substitution dS/dx·T: replaces exactly one free occurrence
/// of x by T; 0 when x does not occur.
pub fn dsubst(sum: &DiffSum, x: &Var, t: &DiffSum) -> DiffSum {
    let mut supply = supply_for_sums(&[sum, t]);
    supply.reserve_name(x.name());
    canonicalize(&dsubst_sum(sum, x, t, &mut supply), SumMode::Counted)
}

/// Iterated differential substitution d^n S/dx_1...dx_n·(t_1,...,t_n),
/// applied left to right. Requires that no x_i occurs free in any t_j.
pub fn dsubst_multi(sum: &DiffSum, vars: &[Var], args: &[DiffSum]) -> Result<DiffSum, SubstError> {
    if vars.len() != args.len() {
        return Err(SubstError::LengthMismatch {
            vars: vars.len(),
            args: args.len(),
        });
    }
    for x in vars {
        for t in args {
            if crate::term::free_vars_sum(t).contains(x) {
                return Err(SubstError::PreconditionViolation { var: x.clone() });
            }
        }
    }
    let mut acc = sum.clone();
    for (x, t) in vars.iter().zip(args.iter()) {
        acc = dsubst(&acc, x, t);
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Resource calculus: linear substitution
// ---------------------------------------------------------------------------

fn supply_for_res(parts: &[&ResSum]) -> FreshSupply {
    let mut supply = FreshSupply::new();
    for sum in parts {
        for (t, _) in sum.summands() {
            collect_res_names(t, &mut supply);
        }
    }
    supply
}

fn collect_res_names(t: &ResTerm, supply: &mut FreshSupply) {
    match t {
        ResTerm::Var(v) => supply.reserve_name(v.name()),
        ResTerm::Abs(x, b) => {
            supply.reserve_name(x.name());
            collect_res_names(b, supply);
        }
        ResTerm::App(f, p) => {
            collect_res_names(f, supply);
            for (r, _) in p.items() {
                collect_res_names(r.term(), supply);
            }
        }
    }
}

fn lsubst_term(m: &ResTerm, x: &Var, n: &ResTerm, supply: &mut FreshSupply) -> ResSum {
    match m {
        ResTerm::Var(y) => {
            if y == x {
                ResSum::from_term(n.clone())
            } else {
                ResSum::zero()
            }
        }
        ResTerm::Abs(y, body) => {
            if y == x {
                return ResSum::zero();
            }
            if free_vars_res(n).contains(y) && free_vars_res(body).contains(x) {
                let y2 = supply.fresh(y.name());
                let renamed = rsubst_term(body, y, &crate::res::mk_rvar(y2.clone()), supply);
                let inner: ResSum = renamed
                    .summands()
                    .iter()
                    .map(|(t, k)| lsubst_term(t, x, n, supply).scale(*k))
                    .collect();
                mk_rabs(y2, inner)
            } else {
                mk_rabs(y.clone(), lsubst_term(body, x, n, supply))
            }
        }
        ResTerm::App(f, bag) => {
            let left = mk_rapp(lsubst_term(f, x, n, supply), BagSum::from_bag(bag.clone()));
            let right = mk_rapp(
                ResSum::from_term((**f).clone()),
                lsubst_bag(bag, x, n, supply),
            );
            left.add(&right)
        }
    }
}

/// One-occurrence substitution into a bag, returning a sum of bags.
fn lsubst_bag(bag: &Bag, x: &Var, n: &ResTerm, supply: &mut FreshSupply) -> BagSum {
    let mut out = BagSum::zero();
    let items = bag.items();
    for (i, (r, mult)) in items.iter().enumerate() {
        match r {
            Resource::Linear(m) => {
                // Replace one of the `mult` occurrences; the rest stay.
                let mut rest = Bag::empty();
                for (j, (r2, m2)) in items.iter().enumerate() {
                    let k = if i == j { m2 - 1 } else { *m2 };
                    if k > 0 {
                        rest = rest.union(&single_bag(r2.clone(), k));
                    }
                }
                let inner = lsubst_term(m, x, n, supply);
                out = out.add(&bag_cons_linear(inner, &rest).scale(*mult));
            }
            Resource::Banged(m) => {
                // [M^!] <N/x> = [M<N/x>, M^!]: the banged copy stays put.
                let inner = lsubst_term(m, x, n, supply);
                out = out.add(&bag_cons_linear(inner, bag).scale(*mult));
            }
        }
    }
    out
}

fn single_bag(r: Resource, mult: crate::term::Mult) -> Bag {
    let mut b = Bag::empty();
    for _ in 0..mult {
        b = b.union(&crate::res::mk_bag(vec![r.clone()]));
    }
    b
}

/// Linear substitution A<N/x>, bilinear in A and N.
pub fn lsubst(a: &ResSum, x: &Var, n: &ResSum) -> ResSum {
    let mut supply = supply_for_res(&[a, n]);
    supply.reserve_name(x.name());
    let mut out = ResSum::zero();
    for (m, k1) in a.summands() {
        for (nt, k2) in n.summands() {
            out = out.add(&lsubst_term(m, x, nt, &mut supply).scale(k1 * k2));
        }
    }
    canonicalize_res(&out, SumMode::Counted)
}

/// Linear substitution into a sum of bags, bilinear.
pub fn lsubst_bags(p: &BagSum, x: &Var, n: &ResSum) -> BagSum {
    let mut supply = FreshSupply::new();
    for (nt, _) in n.summands() {
        collect_res_names(nt, &mut supply);
    }
    for (bag, _) in p.summands() {
        for (r, _) in bag.items() {
            collect_res_names(r.term(), &mut supply);
        }
    }
    supply.reserve_name(x.name());
    let mut out = BagSum::zero();
    for (bag, k1) in p.summands() {
        for (nt, k2) in n.summands() {
            out = out.add(&lsubst_bag(bag, x, nt, &mut supply).scale(k1 * k2));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Resource calculus: classic substitution
// ---------------------------------------------------------------------------

fn rsubst_term(m: &ResTerm, x: &Var, n: &ResSum, supply: &mut FreshSupply) -> ResSum {
    match m {
        ResTerm::Var(y) => {
            if y == x {
                n.clone()
            } else {
                ResSum::from_term(m.clone())
            }
        }
        ResTerm::Abs(y, body) => {
            if y == x {
                return ResSum::from_term(m.clone());
            }
            if crate::res::free_vars_res_sum(n).contains(y) && free_vars_res(body).contains(x) {
                let y2 = supply.fresh(y.name());
                let renamed = rsubst_term(body, y, &crate::res::mk_rvar(y2.clone()), supply);
                let renamed_sum = canonicalize_res(&renamed, SumMode::Counted);
                mk_rabs(y2, rsubst_sum(&renamed_sum, x, n, supply))
            } else {
                mk_rabs(y.clone(), rsubst_term(body, x, n, supply))
            }
        }
        ResTerm::App(f, bag) => {
            mk_rapp(rsubst_term(f, x, n, supply), rsubst_bag(bag, x, n, supply))
        }
    }
}

fn rsubst_bag(bag: &Bag, x: &Var, n: &ResSum, supply: &mut FreshSupply) -> BagSum {
    // Substitute each occurrence; banged occurrences split the whole sum
    // into one bag, linear occurrences distribute.
    let mut acc = BagSum::from_bag(Bag::empty());
    for (r, mult) in bag.items() {
        for _ in 0..*mult {
            let sub = rsubst_term(r.term(), x, n, supply);
            let mut next = BagSum::zero();
            for (partial, k) in acc.summands() {
                match r {
                    Resource::Linear(_) => {
                        next = next.add(&bag_cons_linear(sub.clone(), partial).scale(*k));
                    }
                    Resource::Banged(_) => {
                        next = next.add(
                            &BagSum::from_bag(bag_cons_banged(sub.clone(), partial)).scale(*k),
                        );
                    }
                }
            }
            acc = next;
        }
    }
    acc
}

fn rsubst_sum(sum: &ResSum, x: &Var, n: &ResSum, supply: &mut FreshSupply) -> ResSum {
    sum.summands()
        .iter()
        .map(|(m, k)| rsubst_term(m, x, n, supply).scale(*k))
        .collect()
}

/// Classic capture-free substitution A{N/x}; the whole sum N replaces each
/// free occurrence, with banged resources splitting it across a single bag.
pub fn rsubst(a: &ResSum, x: &Var, n: &ResSum) -> ResSum {
    let mut supply = supply_for_res(&[a, n]);
    supply.reserve_name(x.name());
    canonicalize_res(&rsubst_sum(a, x, n, &mut supply), SumMode::Counted)
}
