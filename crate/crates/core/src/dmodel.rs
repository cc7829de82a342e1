//! The extensional relational model: the object D of quasi-finite sequences
//! of finite multisets, its retraction morphisms, and the budgeted-exact
//! interpretation of differential lambda terms.
//!
//! Elements of D are represented as `Elem::Seq` values from the relational
//! layer: a finite sequence of finite multisets of smaller elements with no
//! trailing empty multisets; the empty sequence is the element `*`.

use std::collections::BTreeSet;

use crate::mrel::{Elem, FinRel, MSet, Universe};
use crate::rewrite::{normalize_diff, Fuel};
use crate::subst::{subst, FreshSupply};
use crate::term::{collect_names_simple, free_vars_sum, mk_var, DiffSum, SimpleTerm, Var};

/// The element `*`: the empty sequence.
pub fn star_elem() -> Elem {
    Elem::Seq(Vec::new())
}

/// m::sigma: prepend a multiset, normalizing trailing empties.
pub fn cons(m: &MSet, sigma: &Elem) -> Elem {
    let rest = match sigma {
        Elem::Seq(ms) => ms.clone(),
        _ => panic!("cons expects an element of D"),
    };
    let mut seq = Vec::with_capacity(rest.len() + 1);
    seq.push(m.clone());
    seq.extend(rest);
    while matches!(seq.last(), Some(m) if m.is_empty()) {
        seq.pop();
    }
    Elem::Seq(seq)
}

/// The inverse of `cons`: split off the first multiset.
pub fn uncons(sigma: &Elem) -> (MSet, Elem) {
    match sigma {
        Elem::Seq(ms) => {
            if ms.is_empty() {
                (MSet::empty(), star_elem())
            } else {
                (ms[0].clone(), Elem::Seq(ms[1..].to_vec()))
            }
        }
        _ => panic!("uncons expects an element of D"),
    }
}

/// Tree size of an element: 1 + number of positions + sizes of all members.
pub fn delem_size(e: &Elem) -> u64 {
    match e {
        Elem::Seq(ms) => 1 + ms.len() as u64 + ms.iter().map(mset_size).sum::<u64>(),
        _ => panic!("delem_size expects an element of D"),
    }
}

pub fn mset_size(m: &MSet) -> u64 {
    m.items().iter().map(|(e, n)| n * delem_size(e)).sum()
}

static DELEM_CACHE: std::sync::OnceLock<std::sync::Mutex<Vec<Vec<Elem>>>> =
    std::sync::OnceLock::new();

/// All canonical elements of D of size <= max_size, each exactly once, in
/// the element order. Results are cached per exact size across calls.
pub fn enumerate_delems(max_size: u64) -> Vec<Elem> {
    let cache =
        DELEM_CACHE.get_or_init(|| std::sync::Mutex::new(vec![Vec::new(), vec![star_elem()]]));
    let mut by_size = cache.lock().expect("delem cache poisoned");
    while (by_size.len() as u64) <= max_size {
        let k = by_size.len() as u64;
        let mut out: Vec<Elem> = Vec::new();
        // A sequence with p >= 1 positions costs 1 + p + sum of member sizes;
        // the last multiset is nonempty.
        for p in 1..=(k - 1) {
            let members_total = k - 1 - p;
            let mut parts: Vec<Vec<MSet>> = Vec::new();
            compose_positions(
                members_total,
                p as usize,
                &by_size,
                &mut Vec::new(),
                &mut parts,
            );
            for seq in parts {
                out.push(Elem::Seq(seq));
            }
        }
        out.sort();
        out.dedup();
        by_size.push(out);
    }
    let mut all: Vec<Elem> = Vec::new();
    for sizes in by_size.iter().take(max_size as usize + 1).skip(1) {
        all.extend(sizes.iter().cloned());
    }
    all.sort();
    all
}

/// Distribute `total` member size over `positions` multisets, last nonempty.
fn compose_positions(
    total: u64,
    positions: usize,
    by_size: &[Vec<Elem>],
    acc: &mut Vec<MSet>,
    out: &mut Vec<Vec<MSet>>,
) {
    if positions == 0 {
        if total == 0 && acc.last().is_none_or(|m| !m.is_empty()) {
            out.push(acc.clone());
        }
        return;
    }
    let remaining_positions = positions - 1;
    for here in 0..=total {
        // The last position must be nonempty.
        if remaining_positions == 0 && here == 0 {
            continue;
        }
        for m in msets_of_size(here, by_size) {
            acc.push(m);
            compose_positions(total - here, remaining_positions, by_size, acc, out);
            acc.pop();
        }
    }
}

/// All multisets of already-enumerated elements with total size exactly `q`.
fn msets_of_size(q: u64, by_size: &[Vec<Elem>]) -> Vec<MSet> {
    let mut pool: Vec<&Elem> = Vec::new();
    for sizes in by_size.iter().take(q as usize + 1).skip(1) {
        pool.extend(sizes.iter());
    }
    let mut out = Vec::new();
    let mut acc: Vec<Elem> = Vec::new();
    fn go(pool: &[&Elem], from: usize, left: u64, acc: &mut Vec<Elem>, out: &mut Vec<MSet>) {
        if left == 0 {
            out.push(MSet::from_elems(acc.iter().cloned()));
            return;
        }
        for i in from..pool.len() {
            let sz = delem_size(pool[i]);
            if sz <= left {
                acc.push(pool[i].clone());
                go(pool, i, left - sz, acc, out);
                acc.pop();
            }
        }
    }
    go(&pool, 0, q, &mut acc, &mut out);
    out
}

// ---------------------------------------------------------------------------
// The retraction morphisms
// ---------------------------------------------------------------------------

/// Sample-level relations for the retraction: the lambda action
/// {([(m,sigma)], m::sigma)} and the application action {([m::sigma], (m,sigma))},
/// over an explicit sample of (m, sigma) pairs.
pub fn model_morphisms(sample: &[(MSet, Elem)]) -> (FinRel, FinRel) {
    let arrow = Universe::arrow(Universe::DObj, Universe::DObj);
    let mut lam = FinRel::empty(arrow.clone(), Universe::DObj);
    let mut app = FinRel::empty(Universe::DObj, arrow.clone());
    let mut lam_pairs = Vec::new();
    let mut app_pairs = Vec::new();
    for (m, sigma) in sample {
        let fun = Elem::fun(m.clone(), sigma.clone());
        let whole = cons(m, sigma);
        lam_pairs.push((MSet::singleton(fun.clone()), whole.clone()));
        app_pairs.push((MSet::singleton(whole), fun));
    }
    lam = FinRel::from_pairs(lam.src.clone(), lam.dst.clone(), lam_pairs).expect("well-typed");
    app = FinRel::from_pairs(app.src.clone(), app.dst.clone(), app_pairs).expect("well-typed");
    (lam, app)
}

// ---------------------------------------------------------------------------
// Interpretation
// ---------------------------------------------------------------------------

/// Enumeration bounds: `output` caps the total size of returned entries,
/// `witness` caps the size of every consumed witness value (the elements
/// transferred through application clauses). Intermediate entries may grow
/// to the sum of the two bounds, which covers the head-variable entries of
/// normal spines; raising either bound only adds entries.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Budgets {
    pub output: u64,
    pub witness: u64,
}

impl Budgets {
    pub fn new(output: u64, witness: u64) -> Budgets {
        Budgets { output, witness }
    }
}

/// One element of an interpretation: a context multiset per variable and a
/// value in D.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct InterpEntry {
    pub ctx: Vec<MSet>,
    pub val: Elem,
}

impl InterpEntry {
    pub fn size(&self) -> u64 {
        self.ctx.iter().map(mset_size).sum::<u64>() + delem_size(&self.val)
    }
}

/// A budgeted interpretation: every entry of size <= output derivable with
/// witnesses <= witness, plus a flag recording whether the witness search
/// touched its bound.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Interpretation {
    pub entries: BTreeSet<InterpEntry>,
    pub clipped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InterpError {
    #[error("variable list is not adequate: {0} occurs free but is not listed")]
    InadequateVariables(Var),
    #[error("variable list contains a repetition: {0}")]
    DuplicateVariable(Var),
}

struct Enumerator {
    /// Cap on the size of every consumed witness value.
    witness: u64,
    /// Cap on intermediate entry sizes: output + witness, which covers the
    /// head-variable entries of normal spines (their value embeds twice).
    internal: u64,
    clipped: bool,
    /// Elements sigma sourced by the variable clause.
    var_pool: Vec<Elem>,
}

type Entries = BTreeSet<InterpEntry>;

impl Enumerator {
    fn new(budgets: &Budgets) -> Enumerator {
        Enumerator {
            witness: budgets.witness,
            internal: budgets.output + budgets.witness,
            clipped: false,
            var_pool: enumerate_delems(budgets.output.max(budgets.witness / 2)),
        }
    }

    fn keep(&self, entries: Entries) -> Entries {
        entries
            .into_iter()
            .filter(|e| e.size() <= self.internal)
            .collect()
    }

    fn sum(&mut self, sum: &DiffSum, vars: &[Var]) -> Entries {
        let mut out = Entries::new();
        for (s, _) in sum.summands() {
            out.extend(self.simple(s, vars));
        }
        out
    }

    fn simple(&mut self, s: &SimpleTerm, vars: &[Var]) -> Entries {
        match s {
            SimpleTerm::Var(v) => {
                let idx = vars
                    .iter()
                    .position(|x| x == v)
                    .expect("adequacy was checked up front");
                let mut out = Entries::new();
                for sigma in &self.var_pool {
                    let mut ctx = vec![MSet::empty(); vars.len()];
                    ctx[idx] = MSet::singleton(sigma.clone());
                    out.insert(InterpEntry {
                        ctx,
                        val: sigma.clone(),
                    });
                }
                self.keep(out)
            }
            SimpleTerm::Abs(z, body) => {
                // Ensure the binder does not collide with the ambient list.
                let (z, body) = if vars.contains(z) {
                    let mut supply = FreshSupply::new();
                    let mut names = BTreeSet::new();
                    collect_names_simple(body, &mut names);
                    for n in names {
                        supply.reserve_name(&n);
                    }
                    for v in vars {
                        supply.reserve_name(v.name());
                    }
                    let z2 = supply.fresh(z.name());
                    let body2 = subst(
                        &DiffSum::from_term((**body).clone()),
                        z,
                        &mk_var(z2.clone()),
                    );
                    (z2, body2)
                } else {
                    (z.clone(), DiffSum::from_term((**body).clone()))
                };
                let mut inner_vars = vars.to_vec();
                inner_vars.push(z);
                let inner = self.sum(&body, &inner_vars);
                let mut out = Entries::new();
                for e in inner {
                    let m = e.ctx.last().expect("inner context is nonempty").clone();
                    let ctx = e.ctx[..e.ctx.len() - 1].to_vec();
                    out.insert(InterpEntry {
                        ctx,
                        val: cons(&m, &e.val),
                    });
                }
                self.keep(out)
            }
            SimpleTerm::App(f, t) => {
                let fun = self.simple(f, vars);
                let arg = self.sum(t, vars);
                self.apply(&fun, &arg, vars.len())
            }
            SimpleTerm::LinApp(h, args) => {
                let mut cur = self.simple(h, vars);
                for a in args {
                    let arg = self.simple(a, vars);
                    cur = self.dapp(&cur, &arg, vars.len());
                }
                cur
            }
        }
    }

    /// The application clause: split every context component across the
    /// function entry and one argument entry per element of the head
    /// multiset. Witness values larger than the witness bound are never
    /// consumed; consuming one at the bound marks the result as clipped.
    fn apply(&mut self, fun: &Entries, arg: &Entries, n: usize) -> Entries {
        let by_value = index_by_value(arg);
        let mut out = Entries::new();
        for fe in fun {
            let (head, sigma) = uncons(&fe.val);
            let mut covers: Vec<(Vec<MSet>, bool)> = vec![(fe.ctx.clone(), false)];
            let mut dead = false;
            for alpha in head.occurrences() {
                let options = by_value.get(alpha).map(Vec::as_slice).unwrap_or(&[]);
                if delem_size(alpha) > self.witness {
                    if !options.is_empty() {
                        self.clipped = true;
                    }
                    dead = true;
                    break;
                }
                if options.is_empty() {
                    dead = true;
                    break;
                }
                let alpha_hot = delem_size(alpha) == self.witness;
                let mut next = Vec::with_capacity(covers.len() * options.len());
                for (ctx, hot) in &covers {
                    for opt in options {
                        let mut merged = ctx.clone();
                        for (i, m) in opt.ctx.iter().enumerate() {
                            merged[i] = merged[i].union(m);
                        }
                        next.push((merged, *hot || alpha_hot));
                    }
                }
                covers = next;
            }
            if dead {
                continue;
            }
            for (ctx, hot) in covers {
                let entry = InterpEntry {
                    ctx,
                    val: sigma.clone(),
                };
                if entry.size() <= self.internal {
                    if hot {
                        self.clipped = true;
                    }
                    out.insert(entry);
                }
            }
        }
        debug_assert!(out.iter().all(|e| e.ctx.len() == n));
        out
    }

    /// The linear application clause: move one element of the head multiset
    /// into an argument entry.
    fn dapp(&mut self, fun: &Entries, arg: &Entries, n: usize) -> Entries {
        let by_value = index_by_value(arg);
        let mut out = Entries::new();
        for fe in fun {
            let (head, beta) = uncons(&fe.val);
            for (alpha, _) in head.items() {
                let options = by_value.get(alpha).map(Vec::as_slice).unwrap_or(&[]);
                if delem_size(alpha) > self.witness {
                    if !options.is_empty() {
                        self.clipped = true;
                    }
                    continue;
                }
                let rest = head.remove_one(alpha).expect("element is present");
                let alpha_hot = delem_size(alpha) == self.witness;
                for ae in options {
                    let mut ctx = fe.ctx.clone();
                    for (i, m) in ae.ctx.iter().enumerate() {
                        ctx[i] = ctx[i].union(m);
                    }
                    let entry = InterpEntry {
                        ctx,
                        val: cons(&rest, &beta),
                    };
                    if entry.size() <= self.internal {
                        if alpha_hot {
                            self.clipped = true;
                        }
                        out.insert(entry);
                    }
                }
            }
        }
        debug_assert!(out.iter().all(|e| e.ctx.len() == n));
        out
    }
}

fn index_by_value(entries: &Entries) -> std::collections::BTreeMap<&Elem, Vec<&InterpEntry>> {
    let mut map: std::collections::BTreeMap<&Elem, Vec<&InterpEntry>> =
        std::collections::BTreeMap::new();
    for e in entries {
        map.entry(&e.val).or_default().push(e);
    }
    map
}

/// Budgeted interpretation of a sum with respect to an adequate variable
/// list. With `normalize_first`, the term is normalized (fuel-bounded)
/// before interpretation; fuel exhaustion surfaces through the clipped flag.
pub fn interpret(
    sum: &DiffSum,
    vars: &[Var],
    budgets: &Budgets,
    normalize_first: bool,
    fuel: Fuel,
) -> Result<Interpretation, InterpError> {
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].contains(v) {
            return Err(InterpError::DuplicateVariable(v.clone()));
        }
    }
    for v in free_vars_sum(sum) {
        if !vars.contains(&v) {
            return Err(InterpError::InadequateVariables(v));
        }
    }
    let mut clipped = false;
    let sum = if normalize_first {
        let (nf, exhausted) = normalize_diff(sum, fuel, false);
        if exhausted {
            clipped = true;
        }
        nf
    } else {
        sum.clone()
    };
    let mut en = Enumerator::new(budgets);
    let entries = en.sum(&sum, vars);
    let entries = entries
        .into_iter()
        .filter(|e| e.size() <= budgets.output)
        .collect();
    Ok(Interpretation {
        entries,
        clipped: clipped || en.clipped,
    })
}

/// The object interpreting an n-variable context: left-nested products over
/// the terminal object, so that the (n+1)-context is always a product with
/// the model object on the right.
pub fn ctx_universe(n: usize) -> Universe {
    let mut u = Universe::Terminal;
    for _ in 0..n {
        u = Universe::prod(u, Universe::DObj);
    }
    u
}

fn tag_ctx(ctx: &[MSet]) -> MSet {
    match ctx.split_last() {
        None => MSet::empty(),
        Some((last, init)) => tag_ctx(init).tag1().union(&last.tag2()),
    }
}

/// View a set of interpretation entries as a finite relation from the
/// context object to the model object, for cross-checks against the
/// categorical operators.
pub fn as_finrel(entries: &BTreeSet<InterpEntry>, n: usize) -> FinRel {
    FinRel::from_pairs(
        ctx_universe(n),
        Universe::DObj,
        entries.iter().map(|e| {
            debug_assert_eq!(e.ctx.len(), n);
            (tag_ctx(&e.ctx), e.val.clone())
        }),
    )
    .expect("interpretation entries are well-typed")
}

/// Budget-relative equality of interpretations. `NotEqual` is reported only
/// when a separating entry is found with both searches unclipped.
pub fn interp_eq(
    a: &DiffSum,
    b: &DiffSum,
    vars: &[Var],
    budgets: &Budgets,
    normalize_a: bool,
    normalize_b: bool,
    fuel: Fuel,
) -> Result<crate::rewrite::Verdict, InterpError> {
    let ia = interpret(a, vars, budgets, normalize_a, fuel)?;
    let ib = interpret(b, vars, budgets, normalize_b, fuel)?;
    // Every produced entry is a sound derivation, so an entry missing from
    // an unclipped side separates definitively.
    let a_extra = ia.entries.difference(&ib.entries).next().is_some();
    let b_extra = ib.entries.difference(&ia.entries).next().is_some();
    Ok(if !a_extra && !b_extra {
        crate::rewrite::Verdict::Equal
    } else if (a_extra && !ib.clipped) || (b_extra && !ia.clipped) {
        crate::rewrite::Verdict::NotEqual
    } else {
        crate::rewrite::Verdict::Unknown
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::{i, omega};
    use crate::mrel::is_linear;
    use crate::term::{mk_abs, mk_app};

    #[test]
    fn cons_normalizes_trailing_empties() {
        assert_eq!(cons(&MSet::empty(), &star_elem()), star_elem());
        let one = cons(&MSet::singleton(star_elem()), &star_elem());
        assert_eq!(delem_size(&one), 3);
        let (m, rest) = uncons(&one);
        assert_eq!(m, MSet::singleton(star_elem()));
        assert_eq!(rest, star_elem());
    }

    #[test]
    fn uncons_of_star() {
        let (m, rest) = uncons(&star_elem());
        assert!(m.is_empty());
        assert_eq!(rest, star_elem());
    }

    #[test]
    fn enumeration_matches_hand_counts() {
        // size 1: just *; size 3: ([*]); size 4: ([*,*]) and ([],[*]).
        assert_eq!(enumerate_delems(1), vec![star_elem()]);
        assert_eq!(enumerate_delems(2).len(), 1);
        assert_eq!(enumerate_delems(3).len(), 2);
        assert_eq!(enumerate_delems(4).len(), 4);
        // Duplicate-free at a larger bound.
        let all = enumerate_delems(8);
        let set: BTreeSet<&Elem> = all.iter().collect();
        assert_eq!(all.len(), set.len());
        // Every enumerated element is canonical and within bounds.
        for e in &all {
            assert!(Universe::DObj.contains(e));
            assert!(delem_size(e) <= 8);
        }
    }

    #[test]
    fn retraction_round_trip() {
        let sample: Vec<(MSet, Elem)> = enumerate_delems(5)
            .into_iter()
            .map(|e| (MSet::singleton(star_elem()), e))
            .collect();
        for (m, sigma) in &sample {
            let (m2, s2) = uncons(&cons(m, sigma));
            assert_eq!((&m2, &s2), (m, sigma));
        }
        let (lam, app) = model_morphisms(&sample);
        assert!(is_linear(&lam));
        assert!(is_linear(&app));
        // app o lam is the identity on the sampled function elements.
        let composite = crate::mrel::compose(&app, &lam).unwrap();
        for (m, e) in composite.pairs() {
            assert_eq!(m.as_singleton(), Some(e));
        }
        assert_eq!(composite.len(), sample.len());
    }

    #[test]
    fn variable_entry_shape() {
        let x = Var::new("x");
        let out = interpret(
            &mk_var("x"),
            std::slice::from_ref(&x),
            &Budgets::new(4, 8),
            false,
            Fuel(10),
        )
        .unwrap();
        assert!(!out.entries.is_empty());
        for e in &out.entries {
            assert_eq!(e.ctx.len(), 1);
            assert_eq!(e.ctx[0].as_singleton(), Some(&e.val));
        }
        // The smallest entry is (([*]), *).
        let first = out.entries.iter().next().unwrap();
        assert_eq!(first.val, star_elem());
    }

    #[test]
    fn omega_is_empty() {
        let out = interpret(&omega(), &[], &Budgets::new(8, 16), false, Fuel(10)).unwrap();
        assert!(out.entries.is_empty());
    }

    #[test]
    fn identity_contains_expected_entries() {
        let budget = 7;
        let out = interpret(&i(), &[], &Budgets::new(budget, 14), false, Fuel(10)).unwrap();
        assert!(!out.entries.is_empty());
        // every entry is [sigma]::sigma ...
        for e in &out.entries {
            assert!(e.ctx.is_empty());
            let (m, rest) = uncons(&e.val);
            assert_eq!(m.as_singleton(), Some(&rest));
        }
        // ... and conversely every small enough sigma yields one, the
        // smallest being [*]::*.
        for sigma in enumerate_delems((budget - 1) / 2) {
            let entry = InterpEntry {
                ctx: Vec::new(),
                val: cons(&MSet::singleton(sigma.clone()), &sigma),
            };
            assert!(out.entries.contains(&entry), "missing {sigma:?}");
        }
    }

    #[test]
    fn beta_pair_equal_at_budgets() {
        // (\x.x) y = y over (y)
        let y = Var::new("y");
        let lhs = mk_app(i(), mk_var("y"));
        let rhs = mk_var("y");
        let verdict = interp_eq(
            &lhs,
            &rhs,
            &[y],
            &Budgets::new(6, 12),
            false,
            false,
            Fuel(100),
        )
        .unwrap();
        assert_eq!(verdict, crate::rewrite::Verdict::Equal);
    }

    #[test]
    fn distinct_variables_not_equal() {
        let x = Var::new("x");
        let y = Var::new("y");
        let verdict = interp_eq(
            &mk_var("x"),
            &mk_var("y"),
            &[x, y],
            &Budgets::new(4, 8),
            false,
            false,
            Fuel(10),
        )
        .unwrap();
        assert_eq!(verdict, crate::rewrite::Verdict::NotEqual);
    }

    #[test]
    fn eta_extensionality_for_variable() {
        // \x.s x = s for s a fresh variable.
        let s = Var::new("s");
        let lhs = mk_abs("x", mk_app(mk_var("s"), mk_var("x")));
        let verdict = interp_eq(
            &lhs,
            &mk_var("s"),
            &[s],
            &Budgets::new(6, 12),
            false,
            false,
            Fuel(10),
        )
        .unwrap();
        assert_eq!(verdict, crate::rewrite::Verdict::Equal);
    }

    #[test]
    fn adequacy_is_checked() {
        let err = interpret(&mk_var("x"), &[], &Budgets::new(4, 8), false, Fuel(10));
        assert!(matches!(err, Err(InterpError::InadequateVariables(_))));
    }
}
