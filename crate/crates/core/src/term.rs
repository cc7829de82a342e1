//! Differential lambda terms: simple terms, finite formal sums with
//! natural-number multiplicities, alpha-invariant ordering and canonical
//! forms.
//!
//! Terms are identified up to alpha-conversion, associativity/commutativity
//! of the sum and permutation of linear-application arguments. The canonical
//! representation keeps every collection (sums, linear argument lists)
//! sorted under an alpha-invariant total order, so structural comparison of
//! canonical terms decides all three equivalences at once.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

/// Multiplicity of a summand in a formal sum.
pub type Mult = u64;

/// A term variable. Equality is plain name equality; alpha-equivalence is
/// handled at the term level.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(String);

impl Var {
    pub fn new(name: impl Into<String>) -> Var {
        let name = name.into();
        assert!(!name.is_empty(), "variable names must be nonempty");
        Var(name)
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Var {
        Var::new(s)
    }
}

/// How sums are normalized: `Counted` keeps natural-number multiplicities,
/// `Idempotent` collapses every multiplicity to 1.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SumMode {
    Counted,
    Idempotent,
}

/// A simple differential lambda term. Sums never occur in function position
/// or among linear-application arguments; ordinary application carries a sum
/// on the right.
#[derive(Clone, Debug)]
pub enum SimpleTerm {
    Var(Var),
    Abs(Var, Box<SimpleTerm>),
    App(Box<SimpleTerm>, DiffSum),
    /// Iterated linear application, flattened: the head is never itself a
    /// `LinApp`, the argument list is nonempty and sorted (permutative
    /// equality).
    LinApp(Box<SimpleTerm>, Vec<SimpleTerm>),
}

/// A finite formal sum of simple terms with multiplicities >= 1, kept sorted
/// under the term order. The empty sum is the term 0.
#[derive(Clone, Debug, Default)]
pub struct DiffSum {
    summands: Vec<(SimpleTerm, Mult)>,
}

// ---------------------------------------------------------------------------
// Alpha-invariant ordering
// ---------------------------------------------------------------------------

/// Binder stack used to compute de Bruijn indices on demand.
pub(crate) type BinderEnv<'a> = Vec<&'a str>;

/// Resolution of a variable occurrence against a binder stack.
#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum VarKey<'a> {
    /// Distance to the binder (0 = innermost). Bound variables sort before
    /// free ones.
    Bound(usize),
    Free(&'a str),
}

fn var_key<'a>(env: &BinderEnv<'_>, v: &'a Var) -> VarKey<'a> {
    match env.iter().rev().position(|n| *n == v.name()) {
        Some(i) => VarKey::Bound(i),
        None => VarKey::Free(v.name()),
    }
}

fn tag(s: &SimpleTerm) -> u8 {
    match s {
        SimpleTerm::Var(_) => 0,
        SimpleTerm::Abs(..) => 1,
        SimpleTerm::App(..) => 2,
        SimpleTerm::LinApp(..) => 3,
    }
}

pub(crate) fn cmp_simple_at<'a>(
    a: &'a SimpleTerm,
    b: &'a SimpleTerm,
    ea: &mut BinderEnv<'a>,
    eb: &mut BinderEnv<'a>,
) -> Ordering {
    match (a, b) {
        (SimpleTerm::Var(x), SimpleTerm::Var(y)) => var_key(ea, x).cmp(&var_key(eb, y)),
        (SimpleTerm::Abs(x, s), SimpleTerm::Abs(y, t)) => {
            ea.push(x.name());
            eb.push(y.name());
            let o = cmp_simple_at(s, t, ea, eb);
            ea.pop();
            eb.pop();
            o
        }
        (SimpleTerm::App(f, s), SimpleTerm::App(g, t)) => {
            cmp_simple_at(f, g, ea, eb).then_with(|| cmp_sum_at(s, t, ea, eb))
        }
        (SimpleTerm::LinApp(f, us), SimpleTerm::LinApp(g, vs)) => {
            cmp_simple_at(f, g, ea, eb).then_with(|| cmp_slices(us, vs, ea, eb))
        }
        _ => tag(a).cmp(&tag(b)),
    }
}

fn cmp_slices<'a>(
    xs: &'a [SimpleTerm],
    ys: &'a [SimpleTerm],
    ea: &mut BinderEnv<'a>,
    eb: &mut BinderEnv<'a>,
) -> Ordering {
    for (x, y) in xs.iter().zip(ys.iter()) {
        match cmp_simple_at(x, y, ea, eb) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    xs.len().cmp(&ys.len())
}

pub(crate) fn cmp_sum_at<'a>(
    a: &'a DiffSum,
    b: &'a DiffSum,
    ea: &mut BinderEnv<'a>,
    eb: &mut BinderEnv<'a>,
) -> Ordering {
    for ((x, m), (y, n)) in a.summands.iter().zip(b.summands.iter()) {
        match cmp_simple_at(x, y, ea, eb).then(m.cmp(n)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.summands.len().cmp(&b.summands.len())
}

impl PartialEq for SimpleTerm {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for SimpleTerm {}
impl PartialOrd for SimpleTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for SimpleTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_simple_at(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

impl PartialEq for DiffSum {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for DiffSum {}
impl PartialOrd for DiffSum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for DiffSum {
    fn cmp(&self, other: &Self) -> Ordering {
        cmp_sum_at(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

/// Alpha-equivalence of canonical simple terms.
pub fn alpha_eq(a: &SimpleTerm, b: &SimpleTerm) -> bool {
    a == b
}

/// Alpha-equivalence of canonical sums.
pub fn alpha_eq_sum(a: &DiffSum, b: &DiffSum) -> bool {
    a == b
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

fn canon_simple_at<'a>(s: &'a SimpleTerm, env: &mut BinderEnv<'a>, mode: SumMode) -> SimpleTerm {
    match s {
        SimpleTerm::Var(v) => SimpleTerm::Var(v.clone()),
        SimpleTerm::Abs(x, body) => {
            env.push(x.name());
            let body = canon_simple_at(body, env, mode);
            env.pop();
            SimpleTerm::Abs(x.clone(), Box::new(body))
        }
        SimpleTerm::App(f, arg) => SimpleTerm::App(
            Box::new(canon_simple_at(f, env, mode)),
            canon_sum_at(arg, env, mode),
        ),
        SimpleTerm::LinApp(head, args) => {
            let head = canon_simple_at(head, env, mode);
            let mut new_args: Vec<SimpleTerm> =
                args.iter().map(|t| canon_simple_at(t, env, mode)).collect();
            // Flatten a linear application head into the argument list.
            let (head, mut all_args) = match head {
                SimpleTerm::LinApp(h, mut inner) => {
                    inner.append(&mut new_args);
                    (*h, inner)
                }
                h => (h, new_args),
            };
            all_args.sort_by(|a, b| cmp_simple_at(a, b, &mut env.clone(), &mut env.clone()));
            SimpleTerm::LinApp(Box::new(head), all_args)
        }
    }
}

fn canon_sum_at<'a>(sum: &'a DiffSum, env: &mut BinderEnv<'a>, mode: SumMode) -> DiffSum {
    let mut parts: Vec<(SimpleTerm, Mult)> = sum
        .summands
        .iter()
        .filter(|(_, m)| *m > 0)
        .map(|(s, m)| (canon_simple_at(s, env, mode), *m))
        .collect();
    parts.sort_by(|(a, _), (b, _)| cmp_simple_at(a, b, &mut env.clone(), &mut env.clone()));
    let mut merged: Vec<(SimpleTerm, Mult)> = Vec::with_capacity(parts.len());
    for (s, m) in parts {
        match merged.last_mut() {
            Some((last, n))
                if cmp_simple_at(last, &s, &mut env.clone(), &mut env.clone())
                    == Ordering::Equal =>
            {
                *n += m;
            }
            _ => merged.push((s, m)),
        }
    }
    if mode == SumMode::Idempotent {
        for (_, m) in merged.iter_mut() {
            *m = 1;
        }
    }
    DiffSum { summands: merged }
}

/// Re-normalize a sum: sort every nested collection, merge equal summands,
/// drop zero multiplicities. Under `Idempotent` all multiplicities collapse
/// to 1.
pub fn canonicalize(sum: &DiffSum, mode: SumMode) -> DiffSum {
    canon_sum_at(sum, &mut Vec::new(), mode)
}

/// Canonicalize a single simple term (its nested sums and argument lists).
pub fn canonicalize_simple(s: &SimpleTerm, mode: SumMode) -> SimpleTerm {
    canon_simple_at(s, &mut Vec::new(), mode)
}

// ---------------------------------------------------------------------------
// Sums
// ---------------------------------------------------------------------------

impl DiffSum {
    /// The term 0.
    pub fn zero() -> DiffSum {
        DiffSum::default()
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    /// Singleton sum. The term must already be canonical (all public
    /// constructors produce canonical terms).
    pub fn from_term(s: SimpleTerm) -> DiffSum {
        DiffSum {
            summands: vec![(s, 1)],
        }
    }

    pub fn summands(&self) -> &[(SimpleTerm, Mult)] {
        &self.summands
    }

    /// If the sum is a single summand with multiplicity 1, return it.
    pub fn as_single(&self) -> Option<&SimpleTerm> {
        match self.summands.as_slice() {
            [(s, 1)] => Some(s),
            _ => None,
        }
    }

    /// Sum of two canonical sums (merge of sorted lists).
    pub fn add(&self, other: &DiffSum) -> DiffSum {
        let mut out: Vec<(SimpleTerm, Mult)> =
            Vec::with_capacity(self.summands.len() + other.summands.len());
        let (mut i, mut j) = (0, 0);
        while i < self.summands.len() && j < other.summands.len() {
            let (a, m) = &self.summands[i];
            let (b, n) = &other.summands[j];
            match a.cmp(b) {
                Ordering::Less => {
                    out.push((a.clone(), *m));
                    i += 1;
                }
                Ordering::Greater => {
                    out.push((b.clone(), *n));
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.clone(), m + n));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.summands[i..].iter().cloned());
        out.extend(other.summands[j..].iter().cloned());
        DiffSum { summands: out }
    }

    /// Multiply every multiplicity by `k` (0 yields the empty sum).
    pub fn scale(&self, k: Mult) -> DiffSum {
        if k == 0 {
            return DiffSum::zero();
        }
        DiffSum {
            summands: self
                .summands
                .iter()
                .map(|(s, m)| (s.clone(), m * k))
                .collect(),
        }
    }

    /// Total size of the sum, counting multiplicities.
    pub fn size(&self) -> u64 {
        self.summands.iter().map(|(s, m)| m * s.size()).sum()
    }
}

impl FromIterator<DiffSum> for DiffSum {
    fn from_iter<I: IntoIterator<Item = DiffSum>>(iter: I) -> DiffSum {
        iter.into_iter().fold(DiffSum::zero(), |acc, s| acc.add(&s))
    }
}

impl SimpleTerm {
    pub fn size(&self) -> u64 {
        match self {
            SimpleTerm::Var(_) => 1,
            SimpleTerm::Abs(_, b) => 1 + b.size(),
            SimpleTerm::App(f, t) => 1 + f.size() + t.size(),
            SimpleTerm::LinApp(h, args) => {
                1 + h.size() + args.iter().map(|a| a.size()).sum::<u64>()
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

fn fv_simple(s: &SimpleTerm, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match s {
        SimpleTerm::Var(v) => {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        }
        SimpleTerm::Abs(x, b) => {
            bound.push(x.clone());
            fv_simple(b, bound, out);
            bound.pop();
        }
        SimpleTerm::App(f, t) => {
            fv_simple(f, bound, out);
            for (u, _) in t.summands() {
                fv_simple(u, bound, out);
            }
        }
        SimpleTerm::LinApp(h, args) => {
            fv_simple(h, bound, out);
            for a in args {
                fv_simple(a, bound, out);
            }
        }
    }
}

/// Free variables of a simple term.
pub fn free_vars(s: &SimpleTerm) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    fv_simple(s, &mut Vec::new(), &mut out);
    out
}

/// Free variables of a sum; FV(0) is empty.
pub fn free_vars_sum(sum: &DiffSum) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for (s, _) in sum.summands() {
        fv_simple(s, &mut Vec::new(), &mut out);
    }
    out
}

// ---------------------------------------------------------------------------
// Smart constructors (the sum abbreviations)
// ---------------------------------------------------------------------------

/// Variable as a sum.
pub fn mk_var(v: impl Into<Var>) -> DiffSum {
    DiffSum::from_term(SimpleTerm::Var(v.into()))
}

/// Abstraction distributes over the sum: lambda x.(sum s_i) = sum lambda x.s_i.
pub fn mk_abs(x: impl Into<Var>, body: DiffSum) -> DiffSum {
    let x = x.into();
    let wrapped = DiffSum {
        summands: body
            .summands
            .into_iter()
            .map(|(s, m)| (SimpleTerm::Abs(x.clone(), Box::new(s)), m))
            .collect(),
    };
    // Binding x may change the relative order of subterms, so re-normalize.
    canonicalize(&wrapped, SumMode::Counted)
}

/// Ordinary application: linear on the left only. The right argument stays a
/// single sum node.
pub fn mk_app(fun: DiffSum, arg: DiffSum) -> DiffSum {
    let sum = DiffSum {
        summands: fun
            .summands
            .into_iter()
            .map(|(s, m)| (SimpleTerm::App(Box::new(s), arg.clone()), m))
            .collect(),
    };
    canonicalize(&sum, SumMode::Counted)
}

/// Linear application: bilinear, with the flattened iterated form
/// D^{n+1} s·(tbar,t) = D^n (D s·t)·(tbar).
pub fn mk_dapp(fun: DiffSum, arg: DiffSum) -> DiffSum {
    let mut out = DiffSum::zero();
    for (s, m) in fun.summands() {
        for (t, n) in arg.summands() {
            let term = match s.clone() {
                SimpleTerm::LinApp(h, mut args) => {
                    args.push(t.clone());
                    SimpleTerm::LinApp(h, args)
                }
                other => SimpleTerm::LinApp(Box::new(other), vec![t.clone()]),
            };
            out = out.add(&DiffSum::from_term(term).scale(m * n));
        }
    }
    canonicalize(&out, SumMode::Counted)
}

/// D^n s·(t_1,...,t_n) for a list of argument sums.
pub fn mk_dapp_multi(fun: DiffSum, args: &[DiffSum]) -> DiffSum {
    args.iter().fold(fun, |acc, t| mk_dapp(acc, t.clone()))
}

// ---------------------------------------------------------------------------
// Grammar validation
// ---------------------------------------------------------------------------

fn valid_simple_at<'a>(s: &'a SimpleTerm, env: &mut BinderEnv<'a>) -> bool {
    match s {
        SimpleTerm::Var(_) => true,
        SimpleTerm::Abs(x, b) => {
            env.push(x.name());
            let ok = valid_simple_at(b, env);
            env.pop();
            ok
        }
        SimpleTerm::App(f, t) => valid_simple_at(f, env) && valid_sum_at(t, env),
        SimpleTerm::LinApp(h, args) => {
            !args.is_empty()
                && !matches!(**h, SimpleTerm::LinApp(..))
                && valid_simple_at(h, env)
                && args.iter().all(|a| valid_simple_at(a, env))
                && args.windows(2).all(|w| {
                    cmp_simple_at(&w[0], &w[1], &mut env.clone(), &mut env.clone())
                        != Ordering::Greater
                })
        }
    }
}

fn valid_sum_at<'a>(sum: &'a DiffSum, env: &mut BinderEnv<'a>) -> bool {
    sum.summands.iter().all(|(_, m)| *m > 0)
        && sum.summands.windows(2).all(|w| {
            cmp_simple_at(&w[0].0, &w[1].0, &mut env.clone(), &mut env.clone()) == Ordering::Less
        })
        && sum.summands.iter().all(|(s, _)| valid_simple_at(s, env))
}

/// Structural validator: sorted canonical collections, positive
/// multiplicities, flattened nonempty linear applications.
pub fn is_valid_sum(sum: &DiffSum) -> bool {
    valid_sum_at(sum, &mut Vec::new())
}

/// Validator for the Taylor target fragment: ordinary application only to 0.
pub fn in_taylor_fragment(sum: &DiffSum) -> bool {
    fn go(s: &SimpleTerm) -> bool {
        match s {
            SimpleTerm::Var(_) => true,
            SimpleTerm::Abs(_, b) => go(b),
            SimpleTerm::App(f, t) => t.is_zero() && go(f),
            SimpleTerm::LinApp(h, args) => go(h) && args.iter().all(go),
        }
    }
    sum.summands.iter().all(|(s, _)| go(s))
}

// ---------------------------------------------------------------------------
// Printing (canonical concrete syntax)
// ---------------------------------------------------------------------------

fn lexical_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

pub(crate) struct NamePicker {
    taken: BTreeSet<String>,
    counter: usize,
}

impl NamePicker {
    pub(crate) fn new(taken: BTreeSet<String>) -> NamePicker {
        NamePicker { taken, counter: 0 }
    }

    pub(crate) fn rename(&mut self, name: &str) -> Option<String> {
        if lexical_name(name) {
            return None;
        }
        loop {
            let cand = format!("y{}", self.counter);
            self.counter += 1;
            if !self.taken.contains(&cand) {
                self.taken.insert(cand.clone());
                return Some(cand);
            }
        }
    }
}

pub(crate) fn collect_names_simple(s: &SimpleTerm, out: &mut BTreeSet<String>) {
    match s {
        SimpleTerm::Var(v) => {
            out.insert(v.name().to_string());
        }
        SimpleTerm::Abs(x, b) => {
            out.insert(x.name().to_string());
            collect_names_simple(b, out);
        }
        SimpleTerm::App(f, t) => {
            collect_names_simple(f, out);
            for (u, _) in t.summands() {
                collect_names_simple(u, out);
            }
        }
        SimpleTerm::LinApp(h, args) => {
            collect_names_simple(h, out);
            for a in args {
                collect_names_simple(a, out);
            }
        }
    }
}

struct Printer<'a> {
    picker: NamePicker,
    renames: Vec<(&'a str, String)>,
}

impl<'a> Printer<'a> {
    fn var_name(&self, v: &'a Var) -> &str {
        for (orig, new) in self.renames.iter().rev() {
            if *orig == v.name() {
                return new;
            }
        }
        v.name()
    }

    /// `atom`: positions that require an atom in the grammar (application
    /// arguments and all application components).
    fn simple(&mut self, f: &mut fmt::Formatter<'_>, s: &'a SimpleTerm, atom: bool) -> fmt::Result {
        match s {
            SimpleTerm::Var(v) => f.write_str(self.var_name(v)),
            SimpleTerm::Abs(..) => {
                if atom {
                    f.write_str("(")?;
                    self.simple(f, s, false)?;
                    f.write_str(")")
                } else {
                    f.write_str("\\")?;
                    let mut cur = s;
                    let mut pushed = 0;
                    while let SimpleTerm::Abs(x, b) = cur {
                        if pushed > 0 {
                            f.write_str(" ")?;
                        }
                        match self.picker.rename(x.name()) {
                            Some(new) => {
                                f.write_str(&new)?;
                                self.renames.push((x.name(), new));
                            }
                            None => {
                                f.write_str(x.name())?;
                                self.renames.push((x.name(), x.name().to_string()));
                            }
                        }
                        pushed += 1;
                        cur = b;
                    }
                    f.write_str(".")?;
                    self.simple(f, cur, false)?;
                    for _ in 0..pushed {
                        self.renames.pop();
                    }
                    Ok(())
                }
            }
            SimpleTerm::App(fun, arg) => {
                if atom {
                    f.write_str("(")?;
                    self.simple(f, s, false)?;
                    f.write_str(")")
                } else {
                    self.simple(f, fun, !matches!(**fun, SimpleTerm::App(..)))?;
                    f.write_str(" ")?;
                    self.arg(f, arg)
                }
            }
            SimpleTerm::LinApp(h, args) => {
                f.write_str("D(")?;
                self.simple(f, h, false)?;
                f.write_str("; ")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    self.simple(f, a, false)?;
                }
                f.write_str(")")
            }
        }
    }

    fn arg(&mut self, f: &mut fmt::Formatter<'_>, sum: &'a DiffSum) -> fmt::Result {
        match sum.as_single() {
            Some(s) if matches!(s, SimpleTerm::Var(_) | SimpleTerm::LinApp(..)) => {
                self.simple(f, s, true)
            }
            _ => {
                f.write_str("(")?;
                self.sum(f, sum)?;
                f.write_str(")")
            }
        }
    }

    fn sum(&mut self, f: &mut fmt::Formatter<'_>, sum: &'a DiffSum) -> fmt::Result {
        if sum.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (s, m) in sum.summands() {
            for _ in 0..*m {
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                self.simple(f, s, false)?;
            }
        }
        Ok(())
    }
}

fn make_printer(roots: &[&SimpleTerm]) -> NamePicker {
    let mut names = BTreeSet::new();
    for r in roots {
        collect_names_simple(r, &mut names);
    }
    NamePicker::new(names)
}

impl fmt::Display for SimpleTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer {
            picker: make_printer(&[self]),
            renames: Vec::new(),
        };
        p.simple(f, self, false)
    }
}

impl fmt::Display for DiffSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let roots: Vec<&SimpleTerm> = self.summands().iter().map(|(s, _)| s).collect();
        let mut p = Printer {
            picker: make_printer(&roots),
            renames: Vec::new(),
        };
        p.sum(f, self)
    }
}
