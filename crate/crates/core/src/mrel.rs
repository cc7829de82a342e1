//! Finite-scale implementation of the relational category with finite
//! multisets: objects, finite relations, Cartesian closed structure, the
//! differential operator and the star operator, plus randomized checkers
//! for the categorical axioms.
//!
//! Infinite morphisms (identities, projections, evaluation) are never
//! materialized over infinite objects: composites with finite relations are
//! computed by their explicit closed formulas, or through `VRel`, a small
//! language of "virtual" right-hand factors that can enumerate exactly the
//! pairs a composition needs.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// An element of some object: atoms, tagged elements of a product
/// (disjoint union), elements of an exponential (a finite multiset paired
/// with a target element), or an element of the model object D (a
/// quasi-finite sequence of multisets).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum Elem {
    Atom(u32),
    T1(Box<Elem>),
    T2(Box<Elem>),
    Fun(MSet, Box<Elem>),
    Seq(Vec<MSet>),
}

impl Elem {
    pub fn t1(e: Elem) -> Elem {
        Elem::T1(Box::new(e))
    }
    pub fn t2(e: Elem) -> Elem {
        Elem::T2(Box::new(e))
    }
    pub fn fun(m: MSet, e: Elem) -> Elem {
        Elem::Fun(m, Box::new(e))
    }
}

/// A finite multiset of elements, sorted with positive counts.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default)]
pub struct MSet {
    items: Vec<(Elem, u64)>,
}

impl MSet {
    pub fn empty() -> MSet {
        MSet::default()
    }

    pub fn singleton(e: Elem) -> MSet {
        MSet {
            items: vec![(e, 1)],
        }
    }

    pub fn from_elems(elems: impl IntoIterator<Item = Elem>) -> MSet {
        let mut m = MSet::empty();
        for e in elems {
            m = m.union(&MSet::singleton(e));
        }
        m
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn len(&self) -> u64 {
        self.items.iter().map(|(_, n)| n).sum()
    }

    pub fn items(&self) -> &[(Elem, u64)] {
        &self.items
    }

    pub fn union(&self, other: &MSet) -> MSet {
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
        MSet { items: out }
    }

    /// Remove one occurrence; `None` if absent.
    pub fn remove_one(&self, e: &Elem) -> Option<MSet> {
        let idx = self.items.iter().position(|(x, _)| x == e)?;
        let mut items = self.items.clone();
        if items[idx].1 == 1 {
            items.remove(idx);
        } else {
            items[idx].1 -= 1;
        }
        Some(MSet { items })
    }

    /// The element, when the multiset is a singleton.
    pub fn as_singleton(&self) -> Option<&Elem> {
        match self.items.as_slice() {
            [(e, 1)] => Some(e),
            _ => None,
        }
    }

    /// Occurrences expanded into a list.
    pub fn occurrences(&self) -> Vec<&Elem> {
        let mut out = Vec::new();
        for (e, n) in &self.items {
            for _ in 0..*n {
                out.push(e);
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Elem) -> Elem) -> MSet {
        MSet::from_elems(self.occurrences().into_iter().map(f))
    }

    /// Split a multiset over a product object into its two components.
    pub fn split_tags(&self) -> Option<(MSet, MSet)> {
        let mut left = MSet::empty();
        let mut right = MSet::empty();
        for (e, n) in &self.items {
            match e {
                Elem::T1(inner) => {
                    for _ in 0..*n {
                        left = left.union(&MSet::singleton((**inner).clone()));
                    }
                }
                Elem::T2(inner) => {
                    for _ in 0..*n {
                        right = right.union(&MSet::singleton((**inner).clone()));
                    }
                }
                _ => return None,
            }
        }
        Some((left, right))
    }

    pub fn tag1(&self) -> MSet {
        self.map(|e| Elem::t1(e.clone()))
    }

    pub fn tag2(&self) -> MSet {
        self.map(|e| Elem::t2(e.clone()))
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elem::Atom(n) => write!(f, "a{n}"),
            Elem::T1(e) => write!(f, "(1,{e})"),
            Elem::T2(e) => write!(f, "(2,{e})"),
            Elem::Fun(m, e) => write!(f, "({m},{e})"),
            Elem::Seq(ms) => {
                f.write_str("<")?;
                for (i, m) in ms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{m}")?;
                }
                f.write_str(">")
            }
        }
    }
}

impl fmt::Display for MSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        let mut first = true;
        for e in self.occurrences() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{e}")?;
        }
        f.write_str("]")
    }
}

// ---------------------------------------------------------------------------
// Universes
// ---------------------------------------------------------------------------

/// An object: a (possibly infinite) element domain with decidable
/// membership.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Universe {
    /// Atoms 0..n-1.
    Atoms(u32),
    /// The terminal object: the empty set.
    Terminal,
    /// Product A & B (disjoint union of the element domains).
    Prod(Box<Universe>, Box<Universe>),
    /// Exponential [A => B]: finite multisets over A paired with B.
    Arrow(Box<Universe>, Box<Universe>),
    /// The model object D of quasi-finite sequences.
    DObj,
}

impl Universe {
    pub fn prod(a: Universe, b: Universe) -> Universe {
        Universe::Prod(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Universe, b: Universe) -> Universe {
        Universe::Arrow(Box::new(a), Box::new(b))
    }

    pub fn contains(&self, e: &Elem) -> bool {
        match (self, e) {
            (Universe::Atoms(n), Elem::Atom(k)) => k < n,
            (Universe::Prod(a, _), Elem::T1(inner)) => a.contains(inner),
            (Universe::Prod(_, b), Elem::T2(inner)) => b.contains(inner),
            (Universe::Arrow(a, b), Elem::Fun(m, target)) => {
                b.contains(target) && m.items().iter().all(|(x, _)| a.contains(x))
            }
            (Universe::DObj, Elem::Seq(ms)) => {
                (ms.is_empty() || !ms.last().unwrap().is_empty())
                    && ms
                        .iter()
                        .all(|m| m.items().iter().all(|(x, _)| Universe::DObj.contains(x)))
            }
            _ => false,
        }
    }

    pub fn contains_mset(&self, m: &MSet) -> bool {
        m.items().iter().all(|(e, _)| self.contains(e))
    }
}

// ---------------------------------------------------------------------------
// Finite relations
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MrelError {
    #[error("universe mismatch: {0}")]
    Mismatch(String),
    #[error("ill-typed pair in relation: ({0}, {1})")]
    IllTyped(MSet, Elem),
}

/// A morphism at desk scale: a finite set of (input multiset, output
/// element) pairs between explicit universes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FinRel {
    pub src: Universe,
    pub dst: Universe,
    pairs: BTreeSet<(MSet, Elem)>,
}

impl FinRel {
    pub fn empty(src: Universe, dst: Universe) -> FinRel {
        FinRel {
            src,
            dst,
            pairs: BTreeSet::new(),
        }
    }

    pub fn from_pairs(
        src: Universe,
        dst: Universe,
        pairs: impl IntoIterator<Item = (MSet, Elem)>,
    ) -> Result<FinRel, MrelError> {
        let mut rel = FinRel::empty(src, dst);
        for (m, e) in pairs {
            if !rel.src.contains_mset(&m) || !rel.dst.contains(&e) {
                return Err(MrelError::IllTyped(m, e));
            }
            rel.pairs.insert((m, e));
        }
        Ok(rel)
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(MSet, Elem)> {
        self.pairs.iter()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn insert(&mut self, m: MSet, e: Elem) {
        self.pairs.insert((m, e));
    }

    /// Morphism sum: union of the pair sets.
    pub fn union(&self, other: &FinRel) -> Result<FinRel, MrelError> {
        if self.src != other.src || self.dst != other.dst {
            return Err(MrelError::Mismatch(
                "union of relations over different universes".into(),
            ));
        }
        let mut out = self.clone();
        for (m, e) in other.pairs() {
            out.insert(m.clone(), e.clone());
        }
        Ok(out)
    }
}

impl fmt::Display for FinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (m, e)) in self.pairs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "({m},{e})")?;
        }
        f.write_str("}")
    }
}

// ---------------------------------------------------------------------------
// Virtual relations
// ---------------------------------------------------------------------------

/// Right-hand factors for composition that may denote infinite relations.
/// A `VRel` can enumerate, for a required output element, the finitely many
/// pairs producing it.
pub enum VRel<'a> {
    Fin(&'a FinRel),
    /// Identity {([a],a)}.
    Id,
    /// First projection {([(1,a)],a)}.
    P1,
    /// Second projection {([(2,b)],b)}.
    P2,
    /// The zero morphism (empty relation).
    Zero,
    Pair(Box<VRel<'a>>, Box<VRel<'a>>),
    Comp(Box<VRel<'a>>, Box<VRel<'a>>),
}

impl<'a> VRel<'a> {
    pub fn pair(l: VRel<'a>, r: VRel<'a>) -> VRel<'a> {
        VRel::Pair(Box::new(l), Box::new(r))
    }

    pub fn comp(l: VRel<'a>, r: VRel<'a>) -> VRel<'a> {
        VRel::Comp(Box::new(l), Box::new(r))
    }

    /// The swap morphism sw = <<p1 o p1, p2>, p2 o p1>.
    pub fn sw() -> VRel<'a> {
        VRel::pair(
            VRel::pair(VRel::comp(VRel::P1, VRel::P1), VRel::P2),
            VRel::comp(VRel::P2, VRel::P1),
        )
    }

    /// The rewiring <p1 x 0, p2 x Id> used by (D-curry).
    pub fn dcurry_link() -> VRel<'a> {
        VRel::pair(
            VRel::pair(VRel::comp(VRel::P1, VRel::P1), VRel::Zero),
            VRel::pair(VRel::comp(VRel::P2, VRel::P1), VRel::P2),
        )
    }

    /// g x Id = <g o p1, p2>.
    pub fn product_with_id(g: &'a FinRel) -> VRel<'a> {
        VRel::pair(VRel::comp(VRel::Fin(g), VRel::P1), VRel::P2)
    }

    /// All pairs (m, target) of this relation with the given target.
    fn pairs_for(&self, target: &Elem) -> Vec<(MSet, Elem)> {
        match self {
            VRel::Fin(f) => f.pairs().filter(|(_, e)| e == target).cloned().collect(),
            VRel::Id => vec![(MSet::singleton(target.clone()), target.clone())],
            VRel::P1 => vec![(MSet::singleton(Elem::t1(target.clone())), target.clone())],
            VRel::P2 => vec![(MSet::singleton(Elem::t2(target.clone())), target.clone())],
            VRel::Zero => Vec::new(),
            VRel::Pair(l, r) => match target {
                Elem::T1(a) => l
                    .pairs_for(a)
                    .into_iter()
                    .map(|(m, _)| (m, target.clone()))
                    .collect(),
                Elem::T2(b) => r
                    .pairs_for(b)
                    .into_iter()
                    .map(|(m, _)| (m, target.clone()))
                    .collect(),
                _ => Vec::new(),
            },
            VRel::Comp(l, r) => {
                let mut out = Vec::new();
                for (mid, _) in l.pairs_for(target) {
                    for m in expand_via(r, &mid) {
                        out.push((m, target.clone()));
                    }
                }
                out
            }
        }
    }
}

/// All ways to produce every occurrence of `required` through `v`,
/// multi-unioning the inputs of the chosen pairs.
fn expand_via(v: &VRel<'_>, required: &MSet) -> Vec<MSet> {
    let mut acc: Vec<MSet> = vec![MSet::empty()];
    for occ in required.occurrences() {
        let options = v.pairs_for(occ);
        if options.is_empty() {
            return Vec::new();
        }
        let mut next = Vec::with_capacity(acc.len() * options.len());
        for base in &acc {
            for (m, _) in &options {
                next.push(base.union(m));
            }
        }
        acc = next;
        acc.sort();
        acc.dedup();
    }
    acc
}

/// t o s where s may be virtual; `src` is the source universe of the
/// composite.
pub fn compose_virtual(t: &FinRel, s: &VRel<'_>, src: Universe) -> FinRel {
    let mut out = FinRel::empty(src, t.dst.clone());
    for (m, gamma) in t.pairs() {
        for combined in expand_via(s, m) {
            out.insert(combined, gamma.clone());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// The categorical operations
// ---------------------------------------------------------------------------

/// Identity restricted to an explicit element sample.
pub fn id_on(u: Universe, sample: impl IntoIterator<Item = Elem>) -> FinRel {
    let mut rel = FinRel::empty(u.clone(), u);
    for e in sample {
        rel.insert(MSet::singleton(e.clone()), e);
    }
    rel
}

/// Composition t o s by the multiset-splitting formula.
pub fn compose(t: &FinRel, s: &FinRel) -> Result<FinRel, MrelError> {
    if t.src != s.dst {
        return Err(MrelError::Mismatch(format!(
            "compose: middle universes differ ({:?} vs {:?})",
            t.src, s.dst
        )));
    }
    Ok(compose_virtual(t, &VRel::Fin(s), s.src.clone()))
}

/// First projection restricted to a sample of A.
pub fn proj1(a: Universe, b: Universe, sample: impl IntoIterator<Item = Elem>) -> FinRel {
    let mut rel = FinRel::empty(Universe::prod(a.clone(), b), a);
    for e in sample {
        rel.insert(MSet::singleton(Elem::t1(e.clone())), e);
    }
    rel
}

/// Second projection restricted to a sample of B.
pub fn proj2(a: Universe, b: Universe, sample: impl IntoIterator<Item = Elem>) -> FinRel {
    let mut rel = FinRel::empty(Universe::prod(a, b.clone()), b);
    for e in sample {
        rel.insert(MSet::singleton(Elem::t2(e.clone())), e);
    }
    rel
}

/// Pairing <f,g>: tags the targets.
pub fn pairing(f: &FinRel, g: &FinRel) -> Result<FinRel, MrelError> {
    if f.src != g.src {
        return Err(MrelError::Mismatch(
            "pairing of relations with different sources".into(),
        ));
    }
    let mut rel = FinRel::empty(f.src.clone(), Universe::prod(f.dst.clone(), g.dst.clone()));
    for (m, a) in f.pairs() {
        rel.insert(m.clone(), Elem::t1(a.clone()));
    }
    for (m, b) in g.pairs() {
        rel.insert(m.clone(), Elem::t2(b.clone()));
    }
    Ok(rel)
}

/// Product map f x g = <f o p1, g o p2> (closed formula).
pub fn product_map(f: &FinRel, g: &FinRel) -> FinRel {
    let src = Universe::prod(f.src.clone(), g.src.clone());
    let dst = Universe::prod(f.dst.clone(), g.dst.clone());
    let mut rel = FinRel::empty(src, dst);
    for (m, a) in f.pairs() {
        rel.insert(m.tag1(), Elem::t1(a.clone()));
    }
    for (m, b) in g.pairs() {
        rel.insert(m.tag2(), Elem::t2(b.clone()));
    }
    rel
}

/// The unique morphism into the terminal object.
pub fn terminal(src: Universe) -> FinRel {
    FinRel::empty(src, Universe::Terminal)
}

/// f o p1 (retag the inputs into the left component).
pub fn after_proj1(f: &FinRel, other: Universe) -> FinRel {
    let mut rel = FinRel::empty(Universe::prod(f.src.clone(), other), f.dst.clone());
    for (m, b) in f.pairs() {
        rel.insert(m.tag1(), b.clone());
    }
    rel
}

/// f o p2 (retag the inputs into the right component).
pub fn after_proj2(f: &FinRel, other: Universe) -> FinRel {
    let mut rel = FinRel::empty(Universe::prod(other, f.src.clone()), f.dst.clone());
    for (m, b) in f.pairs() {
        rel.insert(m.tag2(), b.clone());
    }
    rel
}

/// p_i o h: keep the pairs whose target lies in the requested component.
pub fn select_component(h: &FinRel, first: bool) -> Result<FinRel, MrelError> {
    let (da, db) = match &h.dst {
        Universe::Prod(a, b) => ((**a).clone(), (**b).clone()),
        u => {
            return Err(MrelError::Mismatch(format!(
                "select_component: target is not a product: {u:?}"
            )))
        }
    };
    let dst = if first { da } else { db };
    let mut rel = FinRel::empty(h.src.clone(), dst);
    for (m, e) in h.pairs() {
        match (first, e) {
            (true, Elem::T1(inner)) => rel.insert(m.clone(), (**inner).clone()),
            (false, Elem::T2(inner)) => rel.insert(m.clone(), (**inner).clone()),
            _ => {}
        }
    }
    Ok(rel)
}

/// Curry: rebracket ((p,m),b) into (p,(m,b)).
pub fn curry(f: &FinRel) -> Result<FinRel, MrelError> {
    let (c, a) = match &f.src {
        Universe::Prod(c, a) => ((**c).clone(), (**a).clone()),
        u => {
            return Err(MrelError::Mismatch(format!(
                "curry: source is not a product: {u:?}"
            )))
        }
    };
    let mut rel = FinRel::empty(c, Universe::arrow(a, f.dst.clone()));
    for (m, b) in f.pairs() {
        let (p, marg) = m.split_tags().ok_or_else(|| {
            MrelError::Mismatch("curry: input multiset is not over a product".into())
        })?;
        rel.insert(p, Elem::fun(marg, b.clone()));
    }
    Ok(rel)
}

/// Uncurry: the inverse rebracketing.
pub fn uncurry(f: &FinRel) -> Result<FinRel, MrelError> {
    let (a, b) = match &f.dst {
        Universe::Arrow(a, b) => ((**a).clone(), (**b).clone()),
        u => {
            return Err(MrelError::Mismatch(format!(
                "uncurry: target is not an exponential: {u:?}"
            )))
        }
    };
    let mut rel = FinRel::empty(Universe::prod(f.src.clone(), a), b);
    for (p, e) in f.pairs() {
        match e {
            Elem::Fun(m, b) => rel.insert(p.tag1().union(&m.tag2()), (**b).clone()),
            _ => {
                return Err(MrelError::Mismatch(
                    "uncurry: target element is not a function pair".into(),
                ))
            }
        }
    }
    Ok(rel)
}

/// ev o <f, h> by the explicit formula; ev itself is never materialized.
pub fn eval_with(f: &FinRel, h: &FinRel) -> Result<FinRel, MrelError> {
    let b = match &f.dst {
        Universe::Arrow(a, b) => {
            if **a != h.dst {
                return Err(MrelError::Mismatch(
                    "eval_with: argument universe differs from the exponential".into(),
                ));
            }
            (**b).clone()
        }
        u => {
            return Err(MrelError::Mismatch(format!(
                "eval_with: left side is not exponential-valued: {u:?}"
            )))
        }
    };
    if f.src != h.src {
        return Err(MrelError::Mismatch("eval_with: sources differ".into()));
    }
    let mut rel = FinRel::empty(f.src.clone(), b);
    for (m0, e) in f.pairs() {
        let (args, gamma) = match e {
            Elem::Fun(m, g) => (m, (**g).clone()),
            _ => continue,
        };
        for cover in expand_via(&VRel::Fin(h), args) {
            rel.insert(m0.union(&cover), gamma.clone());
        }
    }
    Ok(rel)
}

/// The differential: D(f) = {(([a],m),b) | (m u [a],b) in f}.
pub fn differential(f: &FinRel) -> FinRel {
    let src = Universe::prod(f.src.clone(), f.src.clone());
    let mut rel = FinRel::empty(src, f.dst.clone());
    for (m, b) in f.pairs() {
        for (alpha, _) in m.items() {
            let rest = m.remove_one(alpha).expect("element is present");
            rel.insert(
                MSet::singleton(Elem::t1(alpha.clone())).union(&rest.tag2()),
                b.clone(),
            );
        }
    }
    rel
}

/// The star operator by its direct formula:
/// f*g = {((m1 u m2, m), b) | (m1,a) in g, ((m2, m u [a]), b) in f}.
pub fn star(f: &FinRel, g: &FinRel) -> Result<FinRel, MrelError> {
    let (c, a) = match &f.src {
        Universe::Prod(c, a) => ((**c).clone(), (**a).clone()),
        u => {
            return Err(MrelError::Mismatch(format!(
                "star: source is not a product: {u:?}"
            )))
        }
    };
    if g.src != c || g.dst != a {
        return Err(MrelError::Mismatch(
            "star: second argument has the wrong universes".into(),
        ));
    }
    let mut rel = FinRel::empty(f.src.clone(), f.dst.clone());
    for (m, b) in f.pairs() {
        let (m2, ma) = m.split_tags().ok_or_else(|| {
            MrelError::Mismatch("star: input multiset is not over a product".into())
        })?;
        for (alpha, _) in ma.items() {
            let rest = ma.remove_one(alpha).expect("element is present");
            for (m1, a_elem) in g.pairs() {
                if a_elem == alpha {
                    rel.insert(m1.union(&m2).tag1().union(&rest.tag2()), b.clone());
                }
            }
        }
    }
    Ok(rel)
}

/// Star through its definition D(f) o <<0, g o p1>, Id> (cross-check route).
pub fn star_via_differential(f: &FinRel, g: &FinRel) -> FinRel {
    let df = differential(f);
    let inner = VRel::pair(
        VRel::pair(VRel::Zero, VRel::comp(VRel::Fin(g), VRel::P1)),
        VRel::Id,
    );
    compose_virtual(&df, &inner, f.src.clone())
}

/// A morphism is linear iff every input multiset is a singleton.
pub fn is_linear(f: &FinRel) -> bool {
    f.pairs().all(|(m, _)| m.len() == 1)
}

/// The element relabeling of sw on (A x B) x C.
pub fn sw_map(e: &Elem) -> Option<Elem> {
    match e {
        Elem::T1(inner) => match &**inner {
            Elem::T1(a) => Some(Elem::t1(Elem::t1((**a).clone()))),
            Elem::T2(b) => Some(Elem::t2((**b).clone())),
            _ => None,
        },
        Elem::T2(c) => Some(Elem::t1(Elem::t2((**c).clone()))),
        _ => None,
    }
}

/// Materialize a singleton relabeling relation over a sample.
pub fn materialize_relabel(
    src: Universe,
    dst: Universe,
    sample: impl IntoIterator<Item = Elem>,
    map: impl Fn(&Elem) -> Option<Elem>,
) -> FinRel {
    let mut rel = FinRel::empty(src, dst);
    for e in sample {
        if let Some(out) = map(&e) {
            rel.insert(MSet::singleton(e), out);
        }
    }
    rel
}

/// sw o h computed by retargeting (sw is a bijective relabeling).
pub fn sw_after(h: &FinRel) -> Result<FinRel, MrelError> {
    let (ab, c) = match &h.dst {
        Universe::Prod(ab, c) => ((**ab).clone(), (**c).clone()),
        u => {
            return Err(MrelError::Mismatch(format!(
                "sw_after: target is not a double product: {u:?}"
            )))
        }
    };
    let (a, b) = match ab {
        Universe::Prod(a, b) => (*a, *b),
        u => {
            return Err(MrelError::Mismatch(format!(
                "sw_after: target is not a double product: {u:?}"
            )))
        }
    };
    let dst = Universe::prod(Universe::prod(a, c), b);
    let mut rel = FinRel::empty(h.src.clone(), dst);
    for (m, e) in h.pairs() {
        let out = sw_map(e)
            .ok_or_else(|| MrelError::Mismatch("sw_after: ill-shaped target element".into()))?;
        rel.insert(m.clone(), out);
    }
    Ok(rel)
}

// ---------------------------------------------------------------------------
// Random generation
// ---------------------------------------------------------------------------

/// Generator bounds for the axiom laboratory.
#[derive(Clone, Copy, Debug)]
pub struct GenParams {
    /// Atom universes have 1..=atom_max elements.
    pub atom_max: u32,
    /// Multisets carry 0..=mset_max occurrences.
    pub mset_max: u64,
    /// Relations carry 0..=rel_max pairs.
    pub rel_max: usize,
}

impl Default for GenParams {
    fn default() -> GenParams {
        GenParams {
            atom_max: 4,
            mset_max: 3,
            rel_max: 6,
        }
    }
}

pub fn random_universe(rng: &mut ChaCha8Rng, p: &GenParams) -> Universe {
    Universe::Atoms(rng.gen_range(1..=p.atom_max))
}

pub fn random_elem(u: &Universe, rng: &mut ChaCha8Rng, p: &GenParams) -> Elem {
    match u {
        Universe::Atoms(n) => Elem::Atom(rng.gen_range(0..*n)),
        Universe::Terminal => panic!("the terminal object has no elements"),
        Universe::Prod(a, b) => {
            if rng.gen_bool(0.5) {
                Elem::t1(random_elem(a, rng, p))
            } else {
                Elem::t2(random_elem(b, rng, p))
            }
        }
        Universe::Arrow(a, b) => Elem::fun(random_mset(a, rng, p), random_elem(b, rng, p)),
        Universe::DObj => {
            // Small sequences over {*}; enough for sample-level checks.
            let positions = rng.gen_range(0..=2);
            let mut seq = Vec::new();
            for _ in 0..positions {
                let n = rng.gen_range(0..=p.mset_max);
                seq.push(MSet::from_elems(std::iter::repeat_n(
                    Elem::Seq(Vec::new()),
                    n as usize,
                )));
            }
            while matches!(seq.last(), Some(m) if m.is_empty()) {
                seq.pop();
            }
            Elem::Seq(seq)
        }
    }
}

pub fn random_mset(u: &Universe, rng: &mut ChaCha8Rng, p: &GenParams) -> MSet {
    let n = rng.gen_range(0..=p.mset_max);
    MSet::from_elems((0..n).map(|_| random_elem(u, rng, p)))
}

pub fn random_rel(src: &Universe, dst: &Universe, rng: &mut ChaCha8Rng, p: &GenParams) -> FinRel {
    let n = rng.gen_range(0..=p.rel_max);
    let mut rel = FinRel::empty(src.clone(), dst.clone());
    for _ in 0..n {
        rel.insert(random_mset(src, rng, p), random_elem(dst, rng, p));
    }
    rel
}

/// A random linear relation (singleton inputs only).
pub fn random_linear_rel(
    src: &Universe,
    dst: &Universe,
    rng: &mut ChaCha8Rng,
    p: &GenParams,
) -> FinRel {
    let n = rng.gen_range(0..=p.rel_max);
    let mut rel = FinRel::empty(src.clone(), dst.clone());
    for _ in 0..n {
        rel.insert(
            MSet::singleton(random_elem(src, rng, p)),
            random_elem(dst, rng, p),
        );
    }
    rel
}

pub fn atoms_sample(u: &Universe) -> Vec<Elem> {
    match u {
        Universe::Atoms(n) => (0..*n).map(Elem::Atom).collect(),
        _ => panic!("atoms_sample expects an atom universe"),
    }
}

// ---------------------------------------------------------------------------
// Axiom laboratory
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct AxiomOutcome {
    pub name: &'static str,
    pub pass: bool,
    pub trials: u64,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.pass)
    }

    pub fn outcome(&self, name: &str) -> Option<&AxiomOutcome> {
        self.outcomes.iter().find(|o| o.name == name)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            writeln!(
                f,
                "AXIOM {} {} trials={}",
                o.name,
                if o.pass { "PASS" } else { "FAIL" },
                o.trials
            )?;
            if let Some(ce) = &o.counterexample {
                writeln!(f, "  counterexample: {ce}")?;
            }
        }
        Ok(())
    }
}

struct Lab<'p> {
    rng: ChaCha8Rng,
    params: &'p GenParams,
    trials: u64,
    report: AxiomReport,
}

impl<'p> Lab<'p> {
    fn check(
        &mut self,
        name: &'static str,
        mut trial: impl FnMut(&mut ChaCha8Rng, &GenParams) -> Result<(), String>,
    ) {
        let mut outcome = AxiomOutcome {
            name,
            pass: true,
            trials: self.trials,
            counterexample: None,
        };
        for _ in 0..self.trials {
            if let Err(ce) = trial(&mut self.rng, self.params) {
                outcome.pass = false;
                outcome.counterexample = Some(ce);
                break;
            }
        }
        self.report.outcomes.push(outcome);
    }
}

fn expect_eq(name: &str, lhs: &FinRel, rhs: &FinRel, inputs: &[&FinRel]) -> Result<(), String> {
    if lhs.pairs.iter().eq(rhs.pairs.iter()) {
        Ok(())
    } else {
        let ins = inputs
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join("; ");
        Err(format!("{name}: lhs = {lhs}, rhs = {rhs}, inputs: {ins}"))
    }
}

/// Run every categorical identity on random finite relations and report
/// pass/fail per axiom. Failures carry a counterexample; they are data, not
/// errors.
pub fn check_axioms(seed: u64, trials: u64, params: &GenParams) -> AxiomReport {
    let mut lab = Lab {
        rng: ChaCha8Rng::seed_from_u64(seed),
        params,
        trials,
        report: AxiomReport::default(),
    };

    // Category laws.
    lab.check("category-id", |rng, p| {
        let (a, b) = (random_universe(rng, p), random_universe(rng, p));
        let f = random_rel(&a, &b, rng, p);
        let in_support: BTreeSet<Elem> = f
            .pairs()
            .flat_map(|(m, _)| m.occurrences().into_iter().cloned().collect::<Vec<_>>())
            .collect();
        let out_support: BTreeSet<Elem> = f.pairs().map(|(_, e)| e.clone()).collect();
        let idl = id_on(b.clone(), out_support);
        let idr = id_on(a.clone(), in_support);
        let left = compose(&idl, &f).unwrap();
        let right = compose(&f, &idr).unwrap();
        expect_eq("id-left", &left, &f, &[&f])?;
        expect_eq("id-right", &right, &f, &[&f])
    });

    lab.check("category-assoc", |rng, p| {
        let (a, b, c, d) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let f = random_rel(&a, &b, rng, p);
        let g = random_rel(&b, &c, rng, p);
        let h = random_rel(&c, &d, rng, p);
        let lhs = compose(&h, &compose(&g, &f).unwrap()).unwrap();
        let rhs = compose(&compose(&h, &g).unwrap(), &f).unwrap();
        expect_eq("assoc", &lhs, &rhs, &[&f, &g, &h])
    });

    // Product laws.
    lab.check("product-proj-pairing", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let f = random_rel(&c, &a, rng, p);
        let g = random_rel(&c, &b, rng, p);
        let pair = pairing(&f, &g).unwrap();
        let left = select_component(&pair, true).unwrap();
        let right = select_component(&pair, false).unwrap();
        expect_eq("proj1", &left, &f, &[&f, &g])?;
        expect_eq("proj2", &right, &g, &[&f, &g])
    });

    lab.check("pair-law", |rng, p| {
        let (a, b, c, d) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let f = random_rel(&c, &a, rng, p);
        let g = random_rel(&c, &b, rng, p);
        let h = random_rel(&d, &c, rng, p);
        let lhs = compose(&pairing(&f, &g).unwrap(), &h).unwrap();
        let rhs = pairing(&compose(&f, &h).unwrap(), &compose(&g, &h).unwrap()).unwrap();
        expect_eq("pair", &lhs, &rhs, &[&f, &g, &h])
    });

    lab.check("curry-law", |rng, p| {
        let (a, b, c, d) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let f = random_rel(&ca, &b, rng, p);
        let g = random_rel(&d, &c, rng, p);
        let lhs = compose(&curry(&f).unwrap(), &g).unwrap();
        let da = Universe::prod(d.clone(), a.clone());
        let fg = compose_virtual(&f, &VRel::product_with_id(&g), da);
        let rhs = curry(&fg).unwrap();
        expect_eq("curry", &lhs, &rhs, &[&f, &g])
    });

    lab.check("beta-cat", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let f = random_rel(&ca, &b, rng, p);
        let g = random_rel(&c, &a, rng, p);
        let lhs = eval_with(&curry(&f).unwrap(), &g).unwrap();
        let rhs = compose_virtual(&f, &VRel::pair(VRel::Id, VRel::Fin(&g)), c.clone());
        expect_eq("beta-cat", &lhs, &rhs, &[&f, &g])
    });

    lab.check("id-curry-repr", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let f = random_rel(&ca, &b, rng, p);
        let back = uncurry(&curry(&f).unwrap()).unwrap();
        expect_eq("uncurry-curry", &back, &f, &[&f])?;
        let h = random_rel(&c, &Universe::arrow(a.clone(), b.clone()), rng, p);
        let back2 = curry(&uncurry(&h).unwrap()).unwrap();
        expect_eq("curry-uncurry", &back2, &h, &[&h])
    });

    // Additive structure of curry and eval.
    lab.check("plus-curry", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let f = random_rel(&ca, &b, rng, p);
        let g = random_rel(&ca, &b, rng, p);
        let lhs = curry(&f.union(&g).unwrap()).unwrap();
        let rhs = curry(&f).unwrap().union(&curry(&g).unwrap()).unwrap();
        expect_eq("+-curry", &lhs, &rhs, &[&f, &g])?;
        let zero = FinRel::empty(ca.clone(), b.clone());
        expect_eq(
            "0-curry",
            &curry(&zero).unwrap(),
            &FinRel::empty(c.clone(), Universe::arrow(a.clone(), b.clone())),
            &[],
        )
    });

    lab.check("plus-eval", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ab = Universe::arrow(a.clone(), b.clone());
        let f = random_rel(&c, &ab, rng, p);
        let g = random_rel(&c, &ab, rng, p);
        let h = random_rel(&c, &a, rng, p);
        let lhs = eval_with(&f.union(&g).unwrap(), &h).unwrap();
        let rhs = eval_with(&f, &h)
            .unwrap()
            .union(&eval_with(&g, &h).unwrap())
            .unwrap();
        expect_eq("+-eval", &lhs, &rhs, &[&f, &g, &h])?;
        let zero = FinRel::empty(c.clone(), ab.clone());
        expect_eq(
            "0-eval",
            &eval_with(&zero, &h).unwrap(),
            &FinRel::empty(c.clone(), b.clone()),
            &[&h],
        )
    });

    // The seven differential axioms.
    lab.check("D1", |rng, p| {
        let (a, b) = (random_universe(rng, p), random_universe(rng, p));
        let f = random_rel(&a, &b, rng, p);
        let g = random_rel(&a, &b, rng, p);
        let lhs = differential(&f.union(&g).unwrap());
        let rhs = differential(&f).union(&differential(&g)).unwrap();
        expect_eq("D1-sum", &lhs, &rhs, &[&f, &g])?;
        let zero = FinRel::empty(a.clone(), b.clone());
        expect_eq(
            "D1-zero",
            &differential(&zero),
            &FinRel::empty(Universe::prod(a.clone(), a.clone()), b.clone()),
            &[],
        )
    });

    lab.check("D2", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let f = random_rel(&a, &b, rng, p);
        let df = differential(&f);
        let h = random_rel(&c, &a, rng, p);
        let k = random_rel(&c, &a, rng, p);
        let v = random_rel(&c, &a, rng, p);
        let hk = h.union(&k).unwrap();
        let lhs = compose_virtual(&df, &VRel::pair(VRel::Fin(&hk), VRel::Fin(&v)), c.clone());
        let rhs = compose_virtual(&df, &VRel::pair(VRel::Fin(&h), VRel::Fin(&v)), c.clone())
            .union(&compose_virtual(
                &df,
                &VRel::pair(VRel::Fin(&k), VRel::Fin(&v)),
                c.clone(),
            ))
            .unwrap();
        expect_eq("D2-sum", &lhs, &rhs, &[&f, &h, &k, &v])?;
        let zero_first = compose_virtual(&df, &VRel::pair(VRel::Zero, VRel::Fin(&v)), c.clone());
        expect_eq(
            "D2-zero",
            &zero_first,
            &FinRel::empty(c.clone(), b.clone()),
            &[&f, &v],
        )
    });

    lab.check("D3", |rng, p| {
        let a = random_universe(rng, p);
        let b = random_universe(rng, p);
        let sample_a = atoms_sample(&a);
        let sample_b = atoms_sample(&b);
        // D(Id) = p1 on the sample.
        let ident = id_on(a.clone(), sample_a.clone());
        let d_id = differential(&ident);
        let p1 = proj1(a.clone(), a.clone(), sample_a.clone());
        expect_eq("D3-id", &d_id, &p1, &[])?;
        // D(p1) = p1 o p1, D(p2) = p2 o p1 on samples.
        let pr1 = proj1(a.clone(), b.clone(), sample_a.clone());
        let d_p1 = differential(&pr1);
        let ab = Universe::prod(a.clone(), b.clone());
        let mut expect1 = FinRel::empty(Universe::prod(ab.clone(), ab.clone()), a.clone());
        for e in &sample_a {
            expect1.insert(MSet::singleton(Elem::t1(Elem::t1(e.clone()))), e.clone());
        }
        expect_eq("D3-p1", &d_p1, &expect1, &[])?;
        let pr2 = proj2(a.clone(), b.clone(), sample_b.clone());
        let d_p2 = differential(&pr2);
        let mut expect2 = FinRel::empty(Universe::prod(ab.clone(), ab), b.clone());
        for e in &sample_b {
            expect2.insert(MSet::singleton(Elem::t1(Elem::t2(e.clone()))), e.clone());
        }
        expect_eq("D3-p2", &d_p2, &expect2, &[])
    });

    lab.check("D4", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let f = random_rel(&c, &a, rng, p);
        let g = random_rel(&c, &b, rng, p);
        let lhs = differential(&pairing(&f, &g).unwrap());
        let rhs = pairing(&differential(&f), &differential(&g)).unwrap();
        expect_eq("D4", &lhs, &rhs, &[&f, &g])
    });

    lab.check("D5", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let g = random_rel(&a, &b, rng, p);
        let f = random_rel(&b, &c, rng, p);
        let lhs = differential(&compose(&f, &g).unwrap());
        let df = differential(&f);
        let dg = differential(&g);
        let g_p2 = after_proj2(&g, a.clone());
        let rhs = compose_virtual(
            &df,
            &VRel::pair(VRel::Fin(&dg), VRel::Fin(&g_p2)),
            Universe::prod(a.clone(), a.clone()),
        );
        expect_eq("D5", &lhs, &rhs, &[&f, &g])
    });

    lab.check("D6", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let f = random_rel(&a, &b, rng, p);
        let ddf = differential(&differential(&f));
        let g = random_rel(&c, &a, rng, p);
        let h = random_rel(&c, &a, rng, p);
        let k = random_rel(&c, &a, rng, p);
        let lhs = compose_virtual(
            &ddf,
            &VRel::pair(
                VRel::pair(VRel::Fin(&g), VRel::Zero),
                VRel::pair(VRel::Fin(&h), VRel::Fin(&k)),
            ),
            c.clone(),
        );
        let rhs = compose_virtual(
            &differential(&f),
            &VRel::pair(VRel::Fin(&g), VRel::Fin(&k)),
            c.clone(),
        );
        expect_eq("D6", &lhs, &rhs, &[&f, &g, &h, &k])
    });

    lab.check("D7", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let f = random_rel(&a, &b, rng, p);
        let ddf = differential(&differential(&f));
        let g = random_rel(&c, &a, rng, p);
        let h = random_rel(&c, &a, rng, p);
        let k = random_rel(&c, &a, rng, p);
        let lhs = compose_virtual(
            &ddf,
            &VRel::pair(
                VRel::pair(VRel::Zero, VRel::Fin(&h)),
                VRel::pair(VRel::Fin(&g), VRel::Fin(&k)),
            ),
            c.clone(),
        );
        let rhs = compose_virtual(
            &ddf,
            &VRel::pair(
                VRel::pair(VRel::Zero, VRel::Fin(&g)),
                VRel::pair(VRel::Fin(&h), VRel::Fin(&k)),
            ),
            c.clone(),
        );
        expect_eq("D7", &lhs, &rhs, &[&f, &g, &h, &k])
    });

    lab.check("D-curry", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let f = random_rel(&ca, &b, rng, p);
        let lhs = differential(&curry(&f).unwrap());
        let df = differential(&f);
        let cc_a = Universe::prod(Universe::prod(c.clone(), c.clone()), a.clone());
        let rewired = compose_virtual(&df, &VRel::dcurry_link(), cc_a);
        let rhs = curry(&rewired).unwrap();
        expect_eq("D-curry", &lhs, &rhs, &[&f])
    });

    lab.check("D-eval", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ab = Universe::arrow(a.clone(), b.clone());
        let h = random_rel(&c, &ab, rng, p);
        let g = random_rel(&c, &a, rng, p);
        let lhs = differential(&eval_with(&h, &g).unwrap());
        let dh = differential(&h);
        let g_p2 = after_proj2(&g, c.clone());
        let first = eval_with(&dh, &g_p2).unwrap();
        let dh_un = differential(&uncurry(&h).unwrap());
        let dg = differential(&g);
        let cc = Universe::prod(c.clone(), c.clone());
        let second = compose_virtual(
            &dh_un,
            &VRel::pair(
                VRel::pair(VRel::Zero, VRel::Fin(&dg)),
                VRel::pair(VRel::P2, VRel::Fin(&g_p2)),
            ),
            cc,
        );
        let rhs = first.union(&second).unwrap();
        expect_eq("D-eval", &lhs, &rhs, &[&h, &g])
    });

    // Star laws.
    lab.check("star-commute", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let f = random_rel(&ca, &b, rng, p);
        let g = random_rel(&c, &a, rng, p);
        let h = random_rel(&c, &a, rng, p);
        let lhs = star(&star(&f, &g).unwrap(), &h).unwrap();
        let rhs = star(&star(&f, &h).unwrap(), &g).unwrap();
        expect_eq("star-commute", &lhs, &rhs, &[&f, &g, &h])
    });

    lab.check("star-vs-differential", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let f = random_rel(&ca, &b, rng, p);
        let g = random_rel(&c, &a, rng, p);
        let lhs = star(&f, &g).unwrap();
        let rhs = star_via_differential(&f, &g);
        expect_eq("star-vs-D", &lhs, &rhs, &[&f, &g])
    });

    lab.check("D-from-star", |rng, p| {
        // D(f) = (f o p2) * Id on samples: with f: A -> B,
        // f o p2 : A & A -> B and the identity is materialized over the
        // support of f.
        let (a, b) = (random_universe(rng, p), random_universe(rng, p));
        let f = random_rel(&a, &b, rng, p);
        let f_p2 = after_proj2(&f, a.clone());
        let support: BTreeSet<Elem> = f
            .pairs()
            .flat_map(|(m, _)| m.occurrences().into_iter().cloned().collect::<Vec<_>>())
            .collect();
        let ident = id_on(a.clone(), support);
        let lhs = star(&f_p2, &ident).unwrap();
        let rhs = differential(&f);
        expect_eq("D-from-star", &lhs, &rhs, &[&f])
    });

    // Appendix lemmas.
    lab.check("main1-i", |rng, p| {
        // p2 * g = g o p1, with p2 materialized over the targets of g.
        let (a, c) = (random_universe(rng, p), random_universe(rng, p));
        let g = random_rel(&c, &a, rng, p);
        let targets: BTreeSet<Elem> = g.pairs().map(|(_, e)| e.clone()).collect();
        let p2 = proj2(c.clone(), a.clone(), targets);
        let lhs = star(&p2, &g).unwrap();
        let rhs = after_proj1(&g, a.clone());
        expect_eq("main1-i", &lhs, &rhs, &[&g])
    });

    lab.check("main1-ii", |rng, p| {
        let (a, b2, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let h = random_rel(&c, &b2, rng, p);
        let g = random_rel(&c, &a, rng, p);
        let h_p1 = after_proj1(&h, a.clone());
        let lhs = star(&h_p1, &g).unwrap();
        let zero = FinRel::empty(h_p1.src.clone(), h_p1.dst.clone());
        expect_eq("main1-ii", &lhs, &zero, &[&h, &g])
    });

    lab.check("main1-iii", |rng, p| {
        let (a, b, c, d) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let cad = Universe::prod(ca.clone(), d.clone());
        let f = random_rel(&cad, &b, rng, p);
        let g = random_rel(&c, &a, rng, p);
        let lhs = star(&curry(&f).unwrap(), &g).unwrap();
        // (((f o sw) * (g o p1)) o sw) curried.
        let cd = Universe::prod(c.clone(), d.clone());
        let cda = Universe::prod(cd.clone(), a.clone());
        let f_sw = compose_virtual(&f, &VRel::sw(), cda.clone());
        let g_p1 = after_proj1(&g, d.clone());
        let starred = star(&f_sw, &g_p1).unwrap();
        let back = compose_virtual(&starred, &VRel::sw(), cad.clone());
        let rhs = curry(&back).unwrap();
        expect_eq("main1-iii", &lhs, &rhs, &[&f, &g])
    });

    lab.check("main2-i", |rng, p| {
        let (a, b, c, d) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let db = Universe::arrow(d.clone(), b.clone());
        let f = random_rel(&ca, &db, rng, p);
        let g = random_rel(&c, &a, rng, p);
        let h = random_rel(&ca, &d, rng, p);
        let lhs = star(&eval_with(&f, &h).unwrap(), &g).unwrap();
        let fg = star(&f, &g).unwrap();
        let inner = curry(&star(&uncurry(&f).unwrap(), &star(&h, &g).unwrap()).unwrap()).unwrap();
        let rhs = eval_with(&fg.union(&inner).unwrap(), &h).unwrap();
        expect_eq("main2-i", &lhs, &rhs, &[&f, &g, &h])
    });

    lab.check("main2-ii", |rng, p| {
        let (a, b, c, d) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let db = Universe::arrow(d.clone(), b.clone());
        let f = random_rel(&ca, &db, rng, p);
        let g = random_rel(&c, &a, rng, p);
        let h = random_rel(&ca, &d, rng, p);
        let lhs = star(
            &curry(&star(&uncurry(&f).unwrap(), &h).unwrap()).unwrap(),
            &g,
        )
        .unwrap();
        let t1 = curry(&star(&uncurry(&star(&f, &g).unwrap()).unwrap(), &h).unwrap()).unwrap();
        let t2 = curry(&star(&uncurry(&f).unwrap(), &star(&h, &g).unwrap()).unwrap()).unwrap();
        let rhs = t1.union(&t2).unwrap();
        expect_eq("main2-ii", &lhs, &rhs, &[&f, &g, &h])
    });

    lab.check("main2-iii", |rng, p| {
        let (a, b, c, d) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ca = Universe::prod(c.clone(), a.clone());
        let db = Universe::arrow(d.clone(), b.clone());
        let f = random_rel(&ca, &db, rng, p);
        let g = random_rel(&c, &a, rng, p);
        let h = random_rel(&ca, &d, rng, p);
        let lhs = compose_virtual(
            &curry(&star(&uncurry(&f).unwrap(), &h).unwrap()).unwrap(),
            &VRel::pair(VRel::Id, VRel::Fin(&g)),
            c.clone(),
        );
        let f_ig = compose_virtual(&f, &VRel::pair(VRel::Id, VRel::Fin(&g)), c.clone());
        let h_ig = compose_virtual(&h, &VRel::pair(VRel::Id, VRel::Fin(&g)), c.clone());
        let rhs = curry(&star(&uncurry(&f_ig).unwrap(), &h_ig).unwrap()).unwrap();
        expect_eq("main2-iii", &lhs, &rhs, &[&f, &g, &h])
    });

    // (Taylor): ev o <f,g> as the sum of iterated stars applied at 0.
    lab.check("Taylor", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let ab = Universe::arrow(a.clone(), b.clone());
        let f = random_rel(&c, &ab, rng, p);
        let g = random_rel(&c, &a, rng, p);
        let lhs = eval_with(&f, &g).unwrap();
        // The sum stops once k exceeds the largest argument multiset in f.
        let max_k = f
            .pairs()
            .filter_map(|(_, e)| match e {
                Elem::Fun(m, _) => Some(m.len()),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut cur = uncurry(&f).unwrap();
        let mut rhs = FinRel::empty(c.clone(), b.clone());
        for _ in 0..=max_k {
            let at_zero = compose_virtual(&cur, &VRel::pair(VRel::Id, VRel::Zero), c.clone());
            rhs = rhs.union(&at_zero).unwrap();
            cur = star(&cur, &g).unwrap();
        }
        expect_eq("Taylor", &lhs, &rhs, &[&f, &g])
    });

    // Swap facts.
    lab.check("sw-involution", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let abc = Universe::prod(Universe::prod(a.clone(), b.clone()), c.clone());
        let acb = Universe::prod(Universe::prod(a.clone(), c.clone()), b.clone());
        let sample: Vec<Elem> = atoms_sample(&a)
            .into_iter()
            .map(|e| Elem::t1(Elem::t1(e)))
            .chain(atoms_sample(&b).into_iter().map(|e| Elem::t1(Elem::t2(e))))
            .chain(atoms_sample(&c).into_iter().map(Elem::t2))
            .collect();
        let sw1 = materialize_relabel(abc.clone(), acb.clone(), sample.clone(), sw_map);
        let sw2_sample: Vec<Elem> = sample.iter().filter_map(sw_map).collect();
        let sw2 = materialize_relabel(acb, abc.clone(), sw2_sample, sw_map);
        let lhs = compose(&sw2, &sw1).unwrap();
        let ident = id_on(abc, sample);
        expect_eq("sw-involution", &lhs, &ident, &[])
    });

    lab.check("sw-pairing", |rng, p| {
        let (a, b, c, d) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let f = random_rel(&d, &a, rng, p);
        let g = random_rel(&d, &b, rng, p);
        let h = random_rel(&d, &c, rng, p);
        let lhs = sw_after(&pairing(&pairing(&f, &g).unwrap(), &h).unwrap()).unwrap();
        let rhs = pairing(&pairing(&f, &h).unwrap(), &g).unwrap();
        expect_eq("sw-pairing", &lhs, &rhs, &[&f, &g, &h])
    });

    lab.check("D-sw", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let abc = Universe::prod(Universe::prod(a.clone(), b.clone()), c.clone());
        let acb = Universe::prod(Universe::prod(a.clone(), c.clone()), b.clone());
        let sample: Vec<Elem> = atoms_sample(&a)
            .into_iter()
            .map(|e| Elem::t1(Elem::t1(e)))
            .chain(atoms_sample(&b).into_iter().map(|e| Elem::t1(Elem::t2(e))))
            .chain(atoms_sample(&c).into_iter().map(Elem::t2))
            .collect();
        let sw1 = materialize_relabel(abc.clone(), acb.clone(), sample.clone(), sw_map);
        let lhs = differential(&sw1);
        let mut rhs = FinRel::empty(Universe::prod(abc.clone(), abc), acb);
        for e in &sample {
            if let Some(out) = sw_map(e) {
                rhs.insert(MSet::singleton(Elem::t1(e.clone())), out);
            }
        }
        expect_eq("D-sw", &lhs, &rhs, &[])
    });

    // Linearity facts.
    lab.check("linear-compose", |rng, p| {
        let (a, b, c) = (
            random_universe(rng, p),
            random_universe(rng, p),
            random_universe(rng, p),
        );
        let f = random_linear_rel(&b, &c, rng, p);
        let g = random_linear_rel(&a, &b, rng, p);
        let fg = compose(&f, &g).unwrap();
        if is_linear(&fg) {
            Ok(())
        } else {
            Err(format!("linear-compose: f = {f}, g = {g}, fg = {fg}"))
        }
    });

    lab.check("linear-differential", |rng, p| {
        let (a, b) = (random_universe(rng, p), random_universe(rng, p));
        let f = random_linear_rel(&a, &b, rng, p);
        let lhs = differential(&f);
        let rhs = after_proj1(&f, a.clone());
        expect_eq("linear-differential", &lhs, &rhs, &[&f])
    });

    lab.check("iso-singleton", |rng, p| {
        // Mutually inverse relations built from a random permutation are
        // singleton-shaped and hence linear.
        let n = rng.gen_range(1..=p.atom_max);
        let a = Universe::Atoms(n);
        let mut perm: Vec<u32> = (0..n).collect();
        for i in (1..perm.len()).rev() {
            let j = rng.gen_range(0..=i);
            perm.swap(i, j);
        }
        let mut fwd = FinRel::empty(a.clone(), a.clone());
        let mut bwd = FinRel::empty(a.clone(), a.clone());
        for (i, j) in perm.iter().enumerate() {
            fwd.insert(MSet::singleton(Elem::Atom(i as u32)), Elem::Atom(*j));
            bwd.insert(MSet::singleton(Elem::Atom(*j)), Elem::Atom(i as u32));
        }
        let ident = id_on(a.clone(), atoms_sample(&a));
        let left = compose(&bwd, &fwd).unwrap();
        let right = compose(&fwd, &bwd).unwrap();
        expect_eq("iso-left", &left, &ident, &[&fwd, &bwd])?;
        expect_eq("iso-right", &right, &ident, &[&fwd, &bwd])?;
        if is_linear(&fwd) && is_linear(&bwd) {
            Ok(())
        } else {
            Err(format!("iso-singleton: fwd = {fwd}, bwd = {bwd}"))
        }
    });

    lab.report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(n: u32) -> Elem {
        Elem::Atom(n)
    }

    #[test]
    fn identity_on_two_atoms() {
        let u = Universe::Atoms(2);
        let rel = id_on(u.clone(), atoms_sample(&u));
        assert_eq!(rel.len(), 2);
        for (m, e) in rel.pairs() {
            assert_eq!(m.as_singleton(), Some(e));
        }
        assert!(id_on(Universe::Atoms(0), vec![]).is_empty());
    }

    #[test]
    fn compose_concrete() {
        // s = {([a],b)}, t = {([b,b],c)} gives {([a,a],c)}.
        let (ua, ub, uc) = (Universe::Atoms(1), Universe::Atoms(2), Universe::Atoms(3));
        let s = FinRel::from_pairs(
            ua.clone(),
            ub.clone(),
            vec![(MSet::singleton(atom(0)), atom(1))],
        )
        .unwrap();
        let t = FinRel::from_pairs(
            ub.clone(),
            uc.clone(),
            vec![(MSet::from_elems(vec![atom(1), atom(1)]), atom(2))],
        )
        .unwrap();
        let ts = compose(&t, &s).unwrap();
        let expect = FinRel::from_pairs(
            ua,
            uc,
            vec![(MSet::from_elems(vec![atom(0), atom(0)]), atom(2))],
        )
        .unwrap();
        assert_eq!(ts, expect);
    }

    #[test]
    fn compose_with_empty_keeps_nullary_pairs_only() {
        let (ua, ub, uc) = (Universe::Atoms(1), Universe::Atoms(1), Universe::Atoms(2));
        let s = FinRel::empty(ua.clone(), ub.clone());
        let t = FinRel::from_pairs(
            ub.clone(),
            uc.clone(),
            vec![
                (MSet::empty(), atom(0)),
                (MSet::singleton(atom(0)), atom(1)),
            ],
        )
        .unwrap();
        let ts = compose(&t, &s).unwrap();
        let expect = FinRel::from_pairs(ua, uc, vec![(MSet::empty(), atom(0))]).unwrap();
        assert_eq!(ts, expect);
    }

    #[test]
    fn differential_concrete() {
        // f = {([a,a],b)} gives D(f) = {(([a],[a]),b)}.
        let (ua, ub) = (Universe::Atoms(1), Universe::Atoms(2));
        let f = FinRel::from_pairs(
            ua.clone(),
            ub.clone(),
            vec![(MSet::from_elems(vec![atom(0), atom(0)]), atom(1))],
        )
        .unwrap();
        let df = differential(&f);
        let expect_input = MSet::from_elems(vec![Elem::t1(atom(0)), Elem::t2(atom(0))]);
        let expect = FinRel::from_pairs(
            Universe::prod(ua.clone(), ua),
            ub,
            vec![(expect_input, atom(1))],
        )
        .unwrap();
        assert_eq!(df, expect);
        assert!(differential(&FinRel::empty(Universe::Atoms(1), Universe::Atoms(1))).is_empty());
    }

    #[test]
    fn curry_rebrackets() {
        let (uc, ua, ub) = (Universe::Atoms(1), Universe::Atoms(2), Universe::Atoms(3));
        let src = Universe::prod(uc.clone(), ua.clone());
        let f = FinRel::from_pairs(
            src,
            ub.clone(),
            vec![(
                MSet::from_elems(vec![Elem::t1(atom(0)), Elem::t2(atom(1))]),
                atom(2),
            )],
        )
        .unwrap();
        let c = curry(&f).unwrap();
        let expect = FinRel::from_pairs(
            uc,
            Universe::arrow(ua, ub),
            vec![(
                MSet::singleton(atom(0)),
                Elem::fun(MSet::singleton(atom(1)), atom(2)),
            )],
        )
        .unwrap();
        assert_eq!(c, expect);
        assert_eq!(uncurry(&c).unwrap(), f);
    }

    #[test]
    fn eval_with_empty_argument() {
        let (uc, ua, ub) = (Universe::Atoms(1), Universe::Atoms(1), Universe::Atoms(2));
        let ab = Universe::arrow(ua.clone(), ub.clone());
        let f = FinRel::from_pairs(
            uc.clone(),
            ab,
            vec![
                (MSet::empty(), Elem::fun(MSet::empty(), atom(0))),
                (MSet::empty(), Elem::fun(MSet::singleton(atom(0)), atom(1))),
            ],
        )
        .unwrap();
        let h = FinRel::empty(uc.clone(), ua);
        let out = eval_with(&f, &h).unwrap();
        // only the k = 0 pair survives
        let expect = FinRel::from_pairs(uc, ub, vec![(MSet::empty(), atom(0))]).unwrap();
        assert_eq!(out, expect);
    }

    #[test]
    fn star_simple_instance() {
        // f = {(([c],[a]), b)}, g = {([c'],a)} gives
        // f*g = {(([c,c'],[]), b)}.
        let (uc, ua, ub) = (Universe::Atoms(2), Universe::Atoms(1), Universe::Atoms(1));
        let src = Universe::prod(uc.clone(), ua.clone());
        let f = FinRel::from_pairs(
            src.clone(),
            ub.clone(),
            vec![(
                MSet::from_elems(vec![Elem::t1(atom(0)), Elem::t2(atom(0))]),
                atom(0),
            )],
        )
        .unwrap();
        let g =
            FinRel::from_pairs(uc.clone(), ua, vec![(MSet::singleton(atom(1)), atom(0))]).unwrap();
        let fg = star(&f, &g).unwrap();
        let expect = FinRel::from_pairs(
            src,
            ub,
            vec![(
                MSet::from_elems(vec![Elem::t1(atom(0)), Elem::t1(atom(1))]),
                atom(0),
            )],
        )
        .unwrap();
        assert_eq!(fg, expect);
        assert_eq!(star_via_differential(&f, &g), expect);
        // f * 0 = 0
        let zero = FinRel::empty(uc, Universe::Atoms(1));
        assert!(star(&f, &zero).unwrap().is_empty());
    }

    #[test]
    fn linearity_checks() {
        let u = Universe::Atoms(2);
        assert!(is_linear(&id_on(u.clone(), atoms_sample(&u))));
        let f = FinRel::from_pairs(
            u.clone(),
            u.clone(),
            vec![(MSet::from_elems(vec![atom(0), atom(0)]), atom(1))],
        )
        .unwrap();
        assert!(!is_linear(&f));
        let g = FinRel::from_pairs(u.clone(), u, vec![(MSet::empty(), atom(1))]).unwrap();
        assert!(!is_linear(&g));
    }

    #[test]
    fn universe_mismatches_are_reported() {
        let f = id_on(Universe::Atoms(2), atoms_sample(&Universe::Atoms(2)));
        let g = id_on(Universe::Atoms(3), atoms_sample(&Universe::Atoms(3)));
        assert!(matches!(compose(&f, &g), Err(MrelError::Mismatch(_))));
        assert!(matches!(star(&f, &g), Err(MrelError::Mismatch(_))));
        assert!(matches!(curry(&f), Err(MrelError::Mismatch(_))));
        assert!(matches!(uncurry(&f), Err(MrelError::Mismatch(_))));
        assert!(matches!(eval_with(&f, &g), Err(MrelError::Mismatch(_))));
        assert!(matches!(f.union(&g), Err(MrelError::Mismatch(_))));
        let bad = FinRel::from_pairs(
            Universe::Atoms(1),
            Universe::Atoms(1),
            vec![(MSet::singleton(atom(5)), atom(0))],
        );
        assert!(matches!(bad, Err(MrelError::IllTyped(..))));
    }

    #[test]
    fn axiom_lab_small_run_passes() {
        let report = check_axioms(7, 25, &GenParams::default());
        assert!(report.all_pass(), "{report}");
    }
}
