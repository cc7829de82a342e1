//! Seeded random generators for terms of both calculi, used by the property
//! suites and the acceptance tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::res::{
    bag_cons_banged, bag_cons_linear, mk_rabs, mk_rapp, mk_rvar, Bag, BagSum, ResSum, ResTerm,
};
use crate::term::{mk_abs, mk_app, mk_dapp, mk_var, DiffSum, Var};

/// Bounds for random term generation.
#[derive(Clone, Debug)]
pub struct TermGenParams {
    /// Maximal construction depth.
    pub depth: u32,
    /// Free variable pool.
    pub free_vars: Vec<Var>,
    /// Allow linear applications.
    pub linear_apps: bool,
    /// Allow sums wider than one summand (argument positions).
    pub sums: bool,
    /// Retry bound on generated term size (counting multiplicities).
    pub max_size: u64,
}

impl Default for TermGenParams {
    fn default() -> TermGenParams {
        TermGenParams {
            depth: 4,
            free_vars: ["x", "y", "z", "u", "v"]
                .iter()
                .map(|s| Var::new(*s))
                .collect(),
            linear_apps: true,
            sums: true,
            max_size: 30,
        }
    }
}

fn pick_var(rng: &mut ChaCha8Rng, scope: &[Var], p: &TermGenParams) -> Var {
    let total = scope.len() + p.free_vars.len();
    if total == 0 {
        return Var::new("x");
    }
    let i = rng.gen_range(0..total);
    if i < scope.len() {
        scope[i].clone()
    } else {
        p.free_vars[i - scope.len()].clone()
    }
}

fn gen_simple(
    rng: &mut ChaCha8Rng,
    depth: u32,
    scope: &mut Vec<Var>,
    p: &TermGenParams,
) -> DiffSum {
    if depth == 0 {
        return mk_var(pick_var(rng, scope, p));
    }
    match rng.gen_range(0..10) {
        0..=2 => mk_var(pick_var(rng, scope, p)),
        3..=4 => {
            let x = Var::new(format!("b{}", rng.gen_range(0..4)));
            scope.push(x.clone());
            let body = gen_simple(rng, depth - 1, scope, p);
            scope.pop();
            mk_abs(x, body)
        }
        5..=7 => {
            let f = gen_simple(rng, depth - 1, scope, p);
            let t = gen_sum(rng, depth - 1, scope, p);
            mk_app(f, t)
        }
        _ => {
            if p.linear_apps {
                let f = gen_simple(rng, depth - 1, scope, p);
                let t = gen_simple(rng, depth - 1, scope, p);
                mk_dapp(f, t)
            } else {
                let f = gen_simple(rng, depth - 1, scope, p);
                let t = gen_sum(rng, depth - 1, scope, p);
                mk_app(f, t)
            }
        }
    }
}

fn gen_sum(rng: &mut ChaCha8Rng, depth: u32, scope: &mut Vec<Var>, p: &TermGenParams) -> DiffSum {
    let width = if p.sums { rng.gen_range(0..=2) } else { 1 };
    let mut out = DiffSum::zero();
    for _ in 0..width.max(1) {
        out = out.add(&gen_simple(rng, depth, scope, p));
    }
    if p.sums && width == 0 && rng.gen_bool(0.2) {
        DiffSum::zero()
    } else {
        out
    }
}

/// A random differential sum within the size bound.
pub fn random_sum(rng: &mut ChaCha8Rng, p: &TermGenParams) -> DiffSum {
    loop {
        let s = gen_sum(rng, p.depth, &mut Vec::new(), p);
        if s.size() <= p.max_size {
            return s;
        }
    }
}

/// A random single simple term (multiplicity-1 singleton sum).
pub fn random_simple_term(rng: &mut ChaCha8Rng, p: &TermGenParams) -> DiffSum {
    loop {
        let s = gen_simple(rng, p.depth, &mut Vec::new(), p);
        if s.size() <= p.max_size && s.as_single().is_some() {
            return s;
        }
    }
}

/// A random pure lambda term: no sums, no linear applications.
pub fn random_pure_lambda(rng: &mut ChaCha8Rng, p: &TermGenParams) -> DiffSum {
    fn go(rng: &mut ChaCha8Rng, depth: u32, scope: &mut Vec<Var>, p: &TermGenParams) -> DiffSum {
        if depth == 0 {
            return mk_var(pick_var(rng, scope, p));
        }
        match rng.gen_range(0..8) {
            0..=2 => mk_var(pick_var(rng, scope, p)),
            3..=5 => {
                let x = Var::new(format!("b{}", rng.gen_range(0..4)));
                scope.push(x.clone());
                let body = go(rng, depth - 1, scope, p);
                scope.pop();
                mk_abs(x, body)
            }
            _ => {
                let f = go(rng, depth - 1, scope, p);
                let t = go(rng, depth - 1, scope, p);
                mk_app(f, t)
            }
        }
    }
    loop {
        let s = go(rng, p.depth, &mut Vec::new(), p);
        if s.size() <= p.max_size {
            return s;
        }
    }
}

/// A random differential root redex together with its contractum.
pub fn random_diff_redex_pair(rng: &mut ChaCha8Rng, p: &TermGenParams) -> (DiffSum, DiffSum) {
    loop {
        let x = Var::new("r");
        let mut scope = vec![x.clone()];
        let body = gen_simple(rng, p.depth.saturating_sub(1), &mut scope, p);
        let abs = mk_abs(x, body);
        let redex = if rng.gen_bool(0.5) {
            let arg = gen_sum(rng, p.depth.saturating_sub(1), &mut Vec::new(), p);
            mk_app(abs, arg)
        } else {
            let arg = gen_simple(rng, p.depth.saturating_sub(1), &mut Vec::new(), p);
            mk_dapp(abs, arg)
        };
        if redex.size() > p.max_size {
            continue;
        }
        if let Some(contractum) = crate::rewrite::step_diff(&redex) {
            return (redex, contractum);
        }
    }
}

// ---------------------------------------------------------------------------
// Resource terms
// ---------------------------------------------------------------------------

fn gen_res(rng: &mut ChaCha8Rng, depth: u32, scope: &mut Vec<Var>, p: &TermGenParams) -> ResSum {
    if depth == 0 {
        return mk_rvar(pick_var(rng, scope, p));
    }
    match rng.gen_range(0..10) {
        0..=3 => mk_rvar(pick_var(rng, scope, p)),
        4..=5 => {
            let x = Var::new(format!("b{}", rng.gen_range(0..4)));
            scope.push(x.clone());
            let body = gen_res(rng, depth - 1, scope, p);
            scope.pop();
            mk_rabs(x, body)
        }
        _ => {
            let f = gen_res(rng, depth - 1, scope, p);
            let bag = gen_bag(rng, depth - 1, scope, p);
            mk_rapp(f, bag)
        }
    }
}

fn gen_bag(rng: &mut ChaCha8Rng, depth: u32, scope: &mut Vec<Var>, p: &TermGenParams) -> BagSum {
    let n = rng.gen_range(0..=2);
    let mut bags = BagSum::from_bag(Bag::empty());
    for _ in 0..n {
        let item = gen_res(rng, depth, scope, p);
        if rng.gen_bool(0.5) {
            // banged resources attach to every bag of the sum
            let mut next = BagSum::zero();
            for (partial, k) in bags.summands() {
                next =
                    next.add(&BagSum::from_bag(bag_cons_banged(item.clone(), partial)).scale(*k));
            }
            bags = next;
        } else {
            let mut next = BagSum::zero();
            for (partial, k) in bags.summands() {
                next = next.add(&bag_cons_linear(item.clone(), partial).scale(*k));
            }
            bags = next;
        }
    }
    bags
}

/// A random resource sum within the size bound.
pub fn random_res_sum(rng: &mut ChaCha8Rng, p: &TermGenParams) -> ResSum {
    loop {
        let s = gen_res(rng, p.depth, &mut Vec::new(), p);
        if s.size() <= p.max_size {
            return s;
        }
    }
}

/// A random single resource term.
pub fn random_res_term(rng: &mut ChaCha8Rng, p: &TermGenParams) -> ResTerm {
    loop {
        let s = random_res_sum(rng, p);
        if let Some(t) = s.as_single() {
            return t.clone();
        }
    }
}

/// A random giant-step root redex together with its contractum.
pub fn random_res_redex_pair(rng: &mut ChaCha8Rng, p: &TermGenParams) -> (ResSum, ResSum) {
    loop {
        let x = Var::new("r");
        let mut scope = vec![x.clone()];
        let body = gen_res(rng, p.depth.saturating_sub(1), &mut scope, p);
        let abs = mk_rabs(x, body);
        let bag = gen_bag(rng, p.depth.saturating_sub(1), &mut Vec::new(), p);
        let redex = mk_rapp(abs, bag);
        if redex.size() > p.max_size {
            continue;
        }
        if let Some(contractum) = crate::rewrite::step_res(&redex) {
            return (redex, contractum);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generated_terms_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = TermGenParams::default();
        for _ in 0..200 {
            let s = random_sum(&mut rng, &p);
            assert!(crate::term::is_valid_sum(&s), "{s}");
        }
        for _ in 0..100 {
            let m = random_res_sum(&mut rng, &p);
            assert!(crate::res::is_valid_res_sum(&m), "{m}");
        }
    }

    #[test]
    fn pure_lambda_is_pure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p = TermGenParams::default();
        for _ in 0..100 {
            let s = random_pure_lambda(&mut rng, &p);
            assert!(crate::translate::is_pure_lambda(&s), "{s}");
        }
    }

    #[test]
    fn redex_pairs_step() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = TermGenParams::default();
        for _ in 0..50 {
            let (redex, _) = random_diff_redex_pair(&mut rng, &p);
            assert!(crate::rewrite::step_diff(&redex).is_some());
        }
    }
}
