//! Resource lambda terms: terms, bags of linear/banged resources, and
//! finite formal sums over each sort.
//!
//! Bags are unordered (canonical sorted multisets). Sums arise only on the
//! surface; the constructors below implement the usual abbreviations that
//! push sums out of linear positions. Note that a multiplicity inside a bag
//! is part of the bag's content and is never collapsed, while sum
//! multiplicities follow the requested [`SumMode`].

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::term::{BinderEnv, Mult, SumMode, Var};

/// A resource lambda term. Application carries a whole bag.
#[derive(Clone, Debug)]
pub enum ResTerm {
    Var(Var),
    Abs(Var, Box<ResTerm>),
    App(Box<ResTerm>, Bag),
}

/// A resource in a bag: linear (used exactly once) or banged (usable ad
/// libitum).
#[derive(Clone, Debug)]
pub enum Resource {
    Linear(ResTerm),
    Banged(ResTerm),
}

impl Resource {
    pub fn term(&self) -> &ResTerm {
        match self {
            Resource::Linear(t) | Resource::Banged(t) => t,
        }
    }

    pub fn is_banged(&self) -> bool {
        matches!(self, Resource::Banged(_))
    }
}

/// A finite multiset of resources, sorted with positive multiplicities.
#[derive(Clone, Debug, Default)]
pub struct Bag {
    items: Vec<(Resource, Mult)>,
}

/// A finite formal sum of resource terms.
#[derive(Clone, Debug, Default)]
pub struct ResSum {
    summands: Vec<(ResTerm, Mult)>,
}

/// A finite formal sum of bags (arises inside linear substitution).
#[derive(Clone, Debug, Default)]
pub struct BagSum {
    summands: Vec<(Bag, Mult)>,
}

// ---------------------------------------------------------------------------
// Ordering
// ---------------------------------------------------------------------------

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum VarKey<'a> {
    Bound(usize),
    Free(&'a str),
}

fn var_key<'a>(env: &BinderEnv<'_>, v: &'a Var) -> VarKey<'a> {
    match env.iter().rev().position(|n| *n == v.name()) {
        Some(i) => VarKey::Bound(i),
        None => VarKey::Free(v.name()),
    }
}

fn tag(t: &ResTerm) -> u8 {
    match t {
        ResTerm::Var(_) => 0,
        ResTerm::Abs(..) => 1,
        ResTerm::App(..) => 2,
    }
}

pub(crate) fn cmp_rterm_at<'a>(
    a: &'a ResTerm,
    b: &'a ResTerm,
    ea: &mut BinderEnv<'a>,
    eb: &mut BinderEnv<'a>,
) -> Ordering {
    match (a, b) {
        (ResTerm::Var(x), ResTerm::Var(y)) => var_key(ea, x).cmp(&var_key(eb, y)),
        (ResTerm::Abs(x, s), ResTerm::Abs(y, t)) => {
            ea.push(x.name());
            eb.push(y.name());
            let o = cmp_rterm_at(s, t, ea, eb);
            ea.pop();
            eb.pop();
            o
        }
        (ResTerm::App(f, p), ResTerm::App(g, q)) => {
            cmp_rterm_at(f, g, ea, eb).then_with(|| cmp_bag_at(p, q, ea, eb))
        }
        _ => tag(a).cmp(&tag(b)),
    }
}

fn cmp_resource_at<'a>(
    a: &'a Resource,
    b: &'a Resource,
    ea: &mut BinderEnv<'a>,
    eb: &mut BinderEnv<'a>,
) -> Ordering {
    match (a, b) {
        (Resource::Linear(s), Resource::Linear(t)) => cmp_rterm_at(s, t, ea, eb),
        (Resource::Banged(s), Resource::Banged(t)) => cmp_rterm_at(s, t, ea, eb),
        (Resource::Linear(_), Resource::Banged(_)) => Ordering::Less,
        (Resource::Banged(_), Resource::Linear(_)) => Ordering::Greater,
    }
}

pub(crate) fn cmp_bag_at<'a>(
    a: &'a Bag,
    b: &'a Bag,
    ea: &mut BinderEnv<'a>,
    eb: &mut BinderEnv<'a>,
) -> Ordering {
    for ((x, m), (y, n)) in a.items.iter().zip(b.items.iter()) {
        match cmp_resource_at(x, y, ea, eb).then(m.cmp(n)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.items.len().cmp(&b.items.len())
}

fn cmp_rsum_at<'a>(
    a: &'a ResSum,
    b: &'a ResSum,
    ea: &mut BinderEnv<'a>,
    eb: &mut BinderEnv<'a>,
) -> Ordering {
    for ((x, m), (y, n)) in a.summands.iter().zip(b.summands.iter()) {
        match cmp_rterm_at(x, y, ea, eb).then(m.cmp(n)) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.summands.len().cmp(&b.summands.len())
}

macro_rules! order_via {
    ($ty:ty, $cmp:path) => {
        impl PartialEq for $ty {
            fn eq(&self, other: &Self) -> bool {
                self.cmp(other) == Ordering::Equal
            }
        }
        impl Eq for $ty {}
        impl PartialOrd for $ty {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }
        impl Ord for $ty {
            fn cmp(&self, other: &Self) -> Ordering {
                $cmp(self, other, &mut Vec::new(), &mut Vec::new())
            }
        }
    };
}

order_via!(ResTerm, cmp_rterm_at);
order_via!(Resource, cmp_resource_at);
order_via!(Bag, cmp_bag_at);
order_via!(ResSum, cmp_rsum_at);

impl PartialEq for BagSum {
    fn eq(&self, other: &Self) -> bool {
        self.summands.len() == other.summands.len()
            && self
                .summands
                .iter()
                .zip(other.summands.iter())
                .all(|((p, m), (q, n))| m == n && p == q)
    }
}
impl Eq for BagSum {}

/// Alpha-equivalence of canonical resource terms.
pub fn alpha_eq_res(a: &ResTerm, b: &ResTerm) -> bool {
    a == b
}

// ---------------------------------------------------------------------------
// Canonicalization
// ---------------------------------------------------------------------------

fn canon_rterm_at<'a>(t: &'a ResTerm, env: &mut BinderEnv<'a>, mode: SumMode) -> ResTerm {
    match t {
        ResTerm::Var(v) => ResTerm::Var(v.clone()),
        ResTerm::Abs(x, b) => {
            env.push(x.name());
            let b = canon_rterm_at(b, env, mode);
            env.pop();
            ResTerm::Abs(x.clone(), Box::new(b))
        }
        ResTerm::App(f, p) => ResTerm::App(
            Box::new(canon_rterm_at(f, env, mode)),
            canon_bag_at(p, env, mode),
        ),
    }
}

fn canon_bag_at<'a>(bag: &'a Bag, env: &mut BinderEnv<'a>, mode: SumMode) -> Bag {
    let mut items: Vec<(Resource, Mult)> = bag
        .items
        .iter()
        .filter(|(_, m)| *m > 0)
        .map(|(r, m)| {
            let r = match r {
                Resource::Linear(t) => Resource::Linear(canon_rterm_at(t, env, mode)),
                Resource::Banged(t) => Resource::Banged(canon_rterm_at(t, env, mode)),
            };
            (r, *m)
        })
        .collect();
    items.sort_by(|(a, _), (b, _)| cmp_resource_at(a, b, &mut env.clone(), &mut env.clone()));
    let mut merged: Vec<(Resource, Mult)> = Vec::with_capacity(items.len());
    for (r, m) in items {
        match merged.last_mut() {
            Some((last, n))
                if cmp_resource_at(last, &r, &mut env.clone(), &mut env.clone())
                    == Ordering::Equal =>
            {
                // Bag multiplicities are content, never collapsed.
                *n += m;
            }
            _ => merged.push((r, m)),
        }
    }
    Bag { items: merged }
}

fn canon_rsum_at<'a>(sum: &'a ResSum, env: &mut BinderEnv<'a>, mode: SumMode) -> ResSum {
    let mut parts: Vec<(ResTerm, Mult)> = sum
        .summands
        .iter()
        .filter(|(_, m)| *m > 0)
        .map(|(t, m)| (canon_rterm_at(t, env, mode), *m))
        .collect();
    parts.sort_by(|(a, _), (b, _)| cmp_rterm_at(a, b, &mut env.clone(), &mut env.clone()));
    let mut merged: Vec<(ResTerm, Mult)> = Vec::with_capacity(parts.len());
    for (t, m) in parts {
        match merged.last_mut() {
            Some((last, n))
                if cmp_rterm_at(last, &t, &mut env.clone(), &mut env.clone())
                    == Ordering::Equal =>
            {
                *n += m;
            }
            _ => merged.push((t, m)),
        }
    }
    if mode == SumMode::Idempotent {
        for (_, m) in merged.iter_mut() {
            *m = 1;
        }
    }
    ResSum { summands: merged }
}

/// Re-normalize a sum of resource terms.
pub fn canonicalize_res(sum: &ResSum, mode: SumMode) -> ResSum {
    canon_rsum_at(sum, &mut Vec::new(), mode)
}

/// Re-normalize a sum of bags.
pub fn canonicalize_bags(sum: &BagSum, mode: SumMode) -> BagSum {
    let mut parts: Vec<(Bag, Mult)> = sum
        .summands
        .iter()
        .filter(|(_, m)| *m > 0)
        .map(|(p, m)| (canon_bag_at(p, &mut Vec::new(), mode), *m))
        .collect();
    parts.sort_by(|(a, _), (b, _)| a.cmp(b));
    let mut merged: Vec<(Bag, Mult)> = Vec::with_capacity(parts.len());
    for (p, m) in parts {
        match merged.last_mut() {
            Some((last, n)) if *last == p => *n += m,
            _ => merged.push((p, m)),
        }
    }
    if mode == SumMode::Idempotent {
        for (_, m) in merged.iter_mut() {
            *m = 1;
        }
    }
    BagSum { summands: merged }
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

impl ResSum {
    pub fn zero() -> ResSum {
        ResSum::default()
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn from_term(t: ResTerm) -> ResSum {
        ResSum {
            summands: vec![(t, 1)],
        }
    }

    pub fn summands(&self) -> &[(ResTerm, Mult)] {
        &self.summands
    }

    pub fn as_single(&self) -> Option<&ResTerm> {
        match self.summands.as_slice() {
            [(t, 1)] => Some(t),
            _ => None,
        }
    }

    pub fn add(&self, other: &ResSum) -> ResSum {
        let mut out = Vec::with_capacity(self.summands.len() + other.summands.len());
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
        ResSum { summands: out }
    }

    pub fn scale(&self, k: Mult) -> ResSum {
        if k == 0 {
            return ResSum::zero();
        }
        ResSum {
            summands: self
                .summands
                .iter()
                .map(|(t, m)| (t.clone(), m * k))
                .collect(),
        }
    }

    pub fn size(&self) -> u64 {
        self.summands.iter().map(|(t, m)| m * t.size()).sum()
    }
}

impl FromIterator<ResSum> for ResSum {
    fn from_iter<I: IntoIterator<Item = ResSum>>(iter: I) -> ResSum {
        iter.into_iter().fold(ResSum::zero(), |acc, s| acc.add(&s))
    }
}

impl BagSum {
    pub fn zero() -> BagSum {
        BagSum::default()
    }

    pub fn is_zero(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn from_bag(p: Bag) -> BagSum {
        BagSum {
            summands: vec![(p, 1)],
        }
    }

    pub fn summands(&self) -> &[(Bag, Mult)] {
        &self.summands
    }

    pub fn add(&self, other: &BagSum) -> BagSum {
        let mut all = self.summands.clone();
        all.extend(other.summands.iter().cloned());
        canonicalize_bags(&BagSum { summands: all }, SumMode::Counted)
    }

    pub fn scale(&self, k: Mult) -> BagSum {
        if k == 0 {
            return BagSum::zero();
        }
        BagSum {
            summands: self
                .summands
                .iter()
                .map(|(p, m)| (p.clone(), m * k))
                .collect(),
        }
    }
}

impl FromIterator<BagSum> for BagSum {
    fn from_iter<I: IntoIterator<Item = BagSum>>(iter: I) -> BagSum {
        iter.into_iter().fold(BagSum::zero(), |acc, s| acc.add(&s))
    }
}

impl Bag {
    pub fn empty() -> Bag {
        Bag::default()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[(Resource, Mult)] {
        &self.items
    }

    /// Multi-union of two canonical bags.
    pub fn union(&self, other: &Bag) -> Bag {
        let mut out = Vec::with_capacity(self.items.len() + other.items.len());
        let (mut i, mut j) = (0, 0);
        while i < self.items.len() && j < other.items.len() {
            let (a, m) = &self.items[i];
            let (b, n) = &other.items[j];
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
        out.extend(self.items[i..].iter().cloned());
        out.extend(other.items[j..].iter().cloned());
        Bag { items: out }
    }

    /// Number of resource occurrences (counting multiplicities).
    pub fn len(&self) -> u64 {
        self.items.iter().map(|(_, m)| m).sum()
    }

    /// Count of banged occurrences.
    pub fn banged_count(&self) -> u64 {
        self.items
            .iter()
            .filter(|(r, _)| r.is_banged())
            .map(|(_, m)| m)
            .sum()
    }
}

impl ResTerm {
    pub fn size(&self) -> u64 {
        match self {
            ResTerm::Var(_) => 1,
            ResTerm::Abs(_, b) => 1 + b.size(),
            ResTerm::App(f, p) => {
                1 + f.size()
                    + p.items
                        .iter()
                        .map(|(r, m)| m * (1 + r.term().size()))
                        .sum::<u64>()
            }
        }
    }
}

/// Variable as a sum.
pub fn mk_rvar(v: impl Into<Var>) -> ResSum {
    ResSum::from_term(ResTerm::Var(v.into()))
}

/// Abstraction distributes over the sum.
pub fn mk_rabs(x: impl Into<Var>, body: ResSum) -> ResSum {
    let x = x.into();
    let sum = ResSum {
        summands: body
            .summands
            .into_iter()
            .map(|(t, m)| (ResTerm::Abs(x.clone(), Box::new(t)), m))
            .collect(),
    };
    canonicalize_res(&sum, SumMode::Counted)
}

/// Application is bilinear: (sum M_i)(sum P_j) = sum_{i,j} M_i P_j.
pub fn mk_rapp(fun: ResSum, args: BagSum) -> ResSum {
    let mut out = ResSum::zero();
    for (f, m) in fun.summands() {
        for (p, n) in args.summands() {
            out = out
                .add(&ResSum::from_term(ResTerm::App(Box::new(f.clone()), p.clone())).scale(m * n));
        }
    }
    canonicalize_res(&out, SumMode::Counted)
}

/// Linear cons: [sum M_i] ⊎ P = sum [M_i] ⊎ P.
pub fn bag_cons_linear(m: ResSum, rest: &Bag) -> BagSum {
    let mut out = BagSum::zero();
    for (t, k) in m.summands() {
        let one = Bag {
            items: vec![(Resource::Linear(t.clone()), 1)],
        };
        out = out.add(&BagSum::from_bag(one.union(rest)).scale(*k));
    }
    out
}

/// Banged cons: [(sum M_i)^!] ⊎ P = [M_1^!, ..., M_k^!] ⊎ P (a single bag).
pub fn bag_cons_banged(m: ResSum, rest: &Bag) -> Bag {
    let mut banged = Bag::empty();
    for (t, k) in m.summands() {
        let one = Bag {
            items: vec![(Resource::Banged(t.clone()), *k)],
        };
        banged = banged.union(&one);
    }
    banged.union(rest)
}

/// Bag of explicit resources (canonicalized).
pub fn mk_bag(resources: Vec<Resource>) -> Bag {
    let bag = Bag {
        items: resources.into_iter().map(|r| (r, 1)).collect(),
    };
    canon_bag_at(&bag, &mut Vec::new(), SumMode::Counted)
}

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

fn fv_rterm(t: &ResTerm, bound: &mut Vec<Var>, out: &mut BTreeSet<Var>) {
    match t {
        ResTerm::Var(v) => {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        }
        ResTerm::Abs(x, b) => {
            bound.push(x.clone());
            fv_rterm(b, bound, out);
            bound.pop();
        }
        ResTerm::App(f, p) => {
            fv_rterm(f, bound, out);
            for (r, _) in p.items() {
                fv_rterm(r.term(), bound, out);
            }
        }
    }
}

pub fn free_vars_res(t: &ResTerm) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    fv_rterm(t, &mut Vec::new(), &mut out);
    out
}

pub fn free_vars_res_sum(sum: &ResSum) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for (t, _) in sum.summands() {
        fv_rterm(t, &mut Vec::new(), &mut out);
    }
    out
}

pub fn free_vars_bag(bag: &Bag) -> BTreeSet<Var> {
    let mut out = BTreeSet::new();
    for (r, _) in bag.items() {
        fv_rterm(r.term(), &mut Vec::new(), &mut out);
    }
    out
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

fn valid_rterm_at<'a>(t: &'a ResTerm, env: &mut BinderEnv<'a>) -> bool {
    match t {
        ResTerm::Var(_) => true,
        ResTerm::Abs(x, b) => {
            env.push(x.name());
            let ok = valid_rterm_at(b, env);
            env.pop();
            ok
        }
        ResTerm::App(f, p) => {
            valid_rterm_at(f, env)
                && p.items
                    .iter()
                    .all(|(r, m)| *m > 0 && valid_rterm_at(r.term(), env))
                && p.items.windows(2).all(|w| {
                    cmp_resource_at(&w[0].0, &w[1].0, &mut env.clone(), &mut env.clone())
                        == Ordering::Less
                })
        }
    }
}

/// Structural validator for canonical resource sums.
pub fn is_valid_res_sum(sum: &ResSum) -> bool {
    sum.summands.iter().all(|(_, m)| *m > 0)
        && sum
            .summands
            .windows(2)
            .all(|w| w[0].0.cmp(&w[1].0) == Ordering::Less)
        && sum
            .summands
            .iter()
            .all(|(t, _)| valid_rterm_at(t, &mut Vec::new()))
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

fn collect_names_rterm(t: &ResTerm, out: &mut BTreeSet<String>) {
    match t {
        ResTerm::Var(v) => {
            out.insert(v.name().to_string());
        }
        ResTerm::Abs(x, b) => {
            out.insert(x.name().to_string());
            collect_names_rterm(b, out);
        }
        ResTerm::App(f, p) => {
            collect_names_rterm(f, out);
            for (r, _) in p.items() {
                collect_names_rterm(r.term(), out);
            }
        }
    }
}

struct RPrinter<'a> {
    picker: crate::term::NamePicker,
    renames: Vec<(&'a str, String)>,
}

impl<'a> RPrinter<'a> {
    fn var_name(&self, v: &'a Var) -> &str {
        for (orig, new) in self.renames.iter().rev() {
            if *orig == v.name() {
                return new;
            }
        }
        v.name()
    }

    fn rterm(&mut self, f: &mut fmt::Formatter<'_>, t: &'a ResTerm, atom: bool) -> fmt::Result {
        match t {
            ResTerm::Var(v) => f.write_str(self.var_name(v)),
            ResTerm::Abs(..) => {
                if atom {
                    f.write_str("(")?;
                    self.rterm(f, t, false)?;
                    f.write_str(")")
                } else {
                    f.write_str("\\")?;
                    let mut cur = t;
                    let mut pushed = 0;
                    while let ResTerm::Abs(x, b) = cur {
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
                    self.rterm(f, cur, false)?;
                    for _ in 0..pushed {
                        self.renames.pop();
                    }
                    Ok(())
                }
            }
            ResTerm::App(fun, bag) => {
                self.rterm(f, fun, !matches!(**fun, ResTerm::App(..)))?;
                self.bag(f, bag)
            }
        }
    }

    fn bag(&mut self, f: &mut fmt::Formatter<'_>, bag: &'a Bag) -> fmt::Result {
        f.write_str("[")?;
        let mut first = true;
        for (r, m) in bag.items() {
            for _ in 0..*m {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                self.rterm(f, r.term(), false)?;
                if r.is_banged() {
                    f.write_str("!")?;
                }
            }
        }
        f.write_str("]")
    }
}

impl fmt::Display for ResTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = BTreeSet::new();
        collect_names_rterm(self, &mut names);
        let mut p = RPrinter {
            picker: crate::term::NamePicker::new(names),
            renames: Vec::new(),
        };
        p.rterm(f, self, false)
    }
}

impl fmt::Display for ResSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut names = BTreeSet::new();
        for (t, _) in self.summands() {
            collect_names_rterm(t, &mut names);
        }
        let mut p = RPrinter {
            picker: crate::term::NamePicker::new(names),
            renames: Vec::new(),
        };
        let mut first = true;
        for (t, m) in self.summands() {
            for _ in 0..*m {
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                p.rterm(f, t, false)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for BagSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut names = BTreeSet::new();
        for (p, _) in self.summands() {
            for (r, _) in p.items() {
                collect_names_rterm(r.term(), &mut names);
            }
        }
        let mut pr = RPrinter {
            picker: crate::term::NamePicker::new(names),
            renames: Vec::new(),
        };
        let mut first = true;
        for (p, m) in self.summands() {
            for _ in 0..*m {
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                pr.bag(f, p)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bags_are_unordered() {
        let a = mk_bag(vec![
            Resource::Linear(ResTerm::Var(Var::new("x"))),
            Resource::Banged(ResTerm::Var(Var::new("y"))),
        ]);
        let b = mk_bag(vec![
            Resource::Banged(ResTerm::Var(Var::new("y"))),
            Resource::Linear(ResTerm::Var(Var::new("x"))),
        ]);
        assert_eq!(a, b);
    }

    #[test]
    fn banged_cons_splits_sum_into_one_bag() {
        let m = mk_rvar("a").add(&mk_rvar("b"));
        let bag = bag_cons_banged(m, &Bag::empty());
        assert_eq!(bag.len(), 2);
        assert_eq!(bag.banged_count(), 2);
    }

    #[test]
    fn linear_cons_distributes() {
        let m = mk_rvar("a").add(&mk_rvar("b"));
        let sum = bag_cons_linear(m, &Bag::empty());
        assert_eq!(sum.summands().len(), 2);
    }

    #[test]
    fn free_vars_mixed_bag() {
        let t = ResTerm::App(
            Box::new(ResTerm::Var(Var::new("x"))),
            mk_bag(vec![
                Resource::Banged(ResTerm::Var(Var::new("y"))),
                Resource::Linear(ResTerm::Var(Var::new("z"))),
            ]),
        );
        let fv = free_vars_res(&t);
        assert_eq!(fv.len(), 3);
    }

    #[test]
    fn display_shapes() {
        let t = ResTerm::App(
            Box::new(ResTerm::Var(Var::new("x"))),
            mk_bag(vec![
                Resource::Linear(ResTerm::Var(Var::new("z"))),
                Resource::Banged(ResTerm::Var(Var::new("y"))),
            ]),
        );
        assert_eq!(t.to_string(), "x[z, y!]");
        assert_eq!(ResSum::zero().to_string(), "0");
    }
}
