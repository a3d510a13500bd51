//! Restrictions `Ĉ^δ⟨E⟩(A)` of a substitution closure, restriction terms and
//! equations, with the set algebra used to build and disambiguate systems.

use std::fmt;

use crate::error::{Error, Result};
use crate::perm::{contains, Perm, Root};

/// Which part of the closure a restriction lives in: all of it, its
/// ⊕-indecomposable part (`Plus`) or its ⊖-indecomposable part (`Minus`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Delta {
    Plain,
    Plus,
    Minus,
}

impl Delta {
    pub fn suffix(self) -> &'static str {
        match self {
            Delta::Plain => "",
            Delta::Plus => "+",
            Delta::Minus => "-",
        }
    }

    pub fn from_suffix(s: &str) -> Result<Delta> {
        match s {
            "" => Ok(Delta::Plain),
            "+" => Ok(Delta::Plus),
            "-" => Ok(Delta::Minus),
            _ => Err(Error::Parse(format!("unknown delta {s:?}"))),
        }
    }
}

/// Permutations of `Ĉ^δ` avoiding every pattern of `avoid` and containing
/// every pattern of `contain`. Values built through [`Restriction::new`]
/// are canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Restriction {
    pub delta: Delta,
    pub avoid: Vec<Perm>,
    pub contain: Vec<Perm>,
}

fn minimal(mut v: Vec<Perm>) -> Vec<Perm> {
    v.sort();
    v.dedup();
    let keep: Vec<bool> = v
        .iter()
        .enumerate()
        .map(|(i, x)| !v.iter().enumerate().any(|(j, y)| j != i && contains(x, y)))
        .collect();
    v.into_iter().zip(keep).filter(|(_, k)| *k).map(|(x, _)| x).collect()
}

fn maximal(mut v: Vec<Perm>) -> Vec<Perm> {
    v.sort();
    v.dedup();
    let keep: Vec<bool> = v
        .iter()
        .enumerate()
        .map(|(i, x)| !v.iter().enumerate().any(|(j, y)| j != i && contains(y, x)))
        .collect();
    v.into_iter().zip(keep).filter(|(_, k)| *k).map(|(x, _)| x).collect()
}

impl Restriction {
    pub fn new(delta: Delta, avoid: Vec<Perm>, contain: Vec<Perm>) -> Restriction {
        canonicalize(&Restriction { delta, avoid, contain })
    }

    /// The whole of `Ĉ^δ`.
    pub fn full(delta: Delta) -> Restriction {
        Restriction { delta, avoid: Vec::new(), contain: Vec::new() }
    }

    pub fn is_full(&self) -> bool {
        self.avoid.is_empty() && self.contain.is_empty()
    }

    /// Key string used in serialized specifications, e.g.
    /// `C-<avoid:123,132><contain:>`.
    pub fn key(&self) -> String {
        let list = |v: &[Perm]| v.iter().map(Perm::compact).collect::<Vec<_>>().join(",");
        format!(
            "C{}<avoid:{}><contain:{}>",
            self.delta.suffix(),
            list(&self.avoid),
            list(&self.contain)
        )
    }

    pub fn from_key(key: &str) -> Result<Restriction> {
        let bad = || Error::Parse(format!("malformed restriction key {key:?}"));
        let rest = key.strip_prefix('C').ok_or_else(bad)?;
        let lt = rest.find('<').ok_or_else(bad)?;
        let delta = Delta::from_suffix(&rest[..lt])?;
        let rest = rest[lt..].strip_prefix("<avoid:").ok_or_else(bad)?;
        let close = rest.find('>').ok_or_else(bad)?;
        let avoid = parse_list(&rest[..close])?;
        let rest = rest[close + 1..].strip_prefix("<contain:").ok_or_else(bad)?;
        let rest = rest.strip_suffix('>').ok_or_else(bad)?;
        let contain = parse_list(rest)?;
        Ok(Restriction::new(delta, avoid, contain))
    }

    pub fn is_member(&self, sigma: &Perm) -> bool {
        self.avoid.iter().all(|e| !contains(sigma, e)) && self.contain.iter().all(|a| contains(sigma, a))
    }
}

fn parse_list(s: &str) -> Result<Vec<Perm>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(|t| t.trim().parse()).collect()
}

/// Text form used in fixtures and diagnostics: `C+<1243,2341>(12)`.
impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.delta.suffix())?;
        let list = |v: &[Perm]| v.iter().map(Perm::compact).collect::<Vec<_>>().join(",");
        if !self.avoid.is_empty() {
            write!(f, "<{}>", list(&self.avoid))?;
        }
        if !self.contain.is_empty() {
            write!(f, "({})", list(&self.contain))?;
        }
        Ok(())
    }
}

/// Drops ε from both sets and 1 from the contain set, then keeps the
/// minimal avoided and maximal contained patterns.
pub fn canonicalize(r: &Restriction) -> Restriction {
    let avoid = minimal(r.avoid.iter().filter(|x| !x.is_empty()).cloned().collect());
    let contain = maximal(r.contain.iter().filter(|x| x.len() >= 2).cloned().collect());
    Restriction { delta: r.delta, avoid, contain }
}

/// Sufficient emptiness test: some avoided pattern is a pattern of some
/// contained one (this covers `1 ∈ E` since the empty contain set is read
/// as containing 1).
pub fn is_empty_sufficient(r: &Restriction) -> bool {
    r.avoid.iter().any(|e| e.len() == 1)
        || r.avoid.iter().any(|e| r.contain.iter().any(|a| contains(a, e)))
}

/// Sufficient inclusion test `r1 ⊆ r2`.
pub fn subset_sufficient(r1: &Restriction, r2: &Restriction) -> Result<bool> {
    if r1.delta != r2.delta {
        return Err(Error::InvalidInput(format!("cannot compare {r1} with {r2}")));
    }
    Ok(subset_same_delta(r1, r2))
}

pub(crate) fn subset_same_delta(r1: &Restriction, r2: &Restriction) -> bool {
    r2.avoid.iter().all(|pi| r1.avoid.iter().any(|tau| contains(pi, tau)))
        && r2.contain.iter().all(|pi| r1.contain.iter().any(|tau| contains(tau, pi)))
}

pub fn intersect_restrictions(r1: &Restriction, r2: &Restriction) -> Result<Restriction> {
    if r1.delta != r2.delta {
        return Err(Error::InvalidInput(format!("cannot intersect {r1} with {r2}")));
    }
    Ok(intersect_same_delta(r1, r2))
}

pub(crate) fn intersect_same_delta(r1: &Restriction, r2: &Restriction) -> Restriction {
    let mut avoid = r1.avoid.clone();
    avoid.extend(r2.avoid.iter().cloned());
    let mut contain = r1.contain.clone();
    contain.extend(r2.contain.iter().cloned());
    Restriction::new(r1.delta, avoid, contain)
}

/// The `2^(k+l) - 1` pieces partitioning `Ĉ^δ \ r`, where `k = |E|` and
/// `l = |A|`. Each piece flips a non-empty selection of the constraints.
pub fn complement_restriction(r: &Restriction) -> Vec<Restriction> {
    let cons: Vec<(bool, &Perm)> = r
        .avoid
        .iter()
        .map(|e| (true, e))
        .chain(r.contain.iter().map(|a| (false, a)))
        .collect();
    let k = cons.len();
    let mut out = Vec::with_capacity((1usize << k).saturating_sub(1));
    for mask in 1u64..(1u64 << k) {
        let mut avoid = Vec::new();
        let mut contain = Vec::new();
        for (i, &(is_avoid, q)) in cons.iter().enumerate() {
            let flipped = mask >> i & 1 == 1;
            if is_avoid != flipped {
                avoid.push(q.clone());
            } else {
                contain.push(q.clone());
            }
        }
        out.push(Restriction::new(r.delta, avoid, contain));
    }
    out
}

/// `π[D1, ..., Dn]`, or `⊕[D1⁺, D2]` and `⊖[D1⁻, D2]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    pub root: Root,
    pub children: Vec<Restriction>,
}

impl Term {
    pub fn new(root: Root, children: Vec<Restriction>) -> Term {
        debug_assert_eq!(children.len(), root.arity());
        debug_assert!(children.iter().zip(Term::child_deltas(&root)).all(|(c, d)| c.delta == d));
        Term { root, children }
    }

    pub fn child_deltas(root: &Root) -> Vec<Delta> {
        match root {
            Root::Plus => vec![Delta::Plus, Delta::Plain],
            Root::Minus => vec![Delta::Minus, Delta::Plain],
            Root::Simple(p) => vec![Delta::Plain; p.len()],
        }
    }

    /// `π[Ĉ, ..., Ĉ]` with the indecomposability marks of the root.
    pub fn full(root: Root) -> Term {
        let children = Term::child_deltas(&root).into_iter().map(Restriction::full).collect();
        Term { root, children }
    }

    pub fn canonical(mut self) -> Term {
        for c in &mut self.children {
            *c = canonicalize(c);
        }
        self
    }

    pub fn is_empty_sufficient(&self) -> bool {
        self.children.iter().any(is_empty_sufficient)
    }

    pub fn subset_sufficient(&self, other: &Term) -> bool {
        self.root == other.root
            && self.children.iter().zip(&other.children).all(|(a, b)| subset_same_delta(a, b))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kids: Vec<String> = self.children.iter().map(|c| c.to_string()).collect();
        write!(f, "{}[{}]", self.root, kids.join(", "))
    }
}

/// Componentwise intersection; `None` when the roots differ or a child is
/// empty by the sufficient test.
pub fn intersect_terms(t1: &Term, t2: &Term) -> Option<Term> {
    if t1.root != t2.root {
        return None;
    }
    let children: Vec<Restriction> =
        t1.children.iter().zip(&t2.children).map(|(a, b)| intersect_same_delta(a, b)).collect();
    if children.iter().any(is_empty_sufficient) {
        return None;
    }
    Some(Term { root: t1.root.clone(), children })
}

/// Pieces partitioning `π[Ĉ, ..., Ĉ] \ t`, with pieces empty by the
/// sufficient test left out.
pub fn complement_term(t: &Term) -> Vec<Term> {
    let options: Vec<Vec<Restriction>> = t
        .children
        .iter()
        .map(|c| {
            let mut o = vec![c.clone()];
            o.extend(complement_restriction(c).into_iter().filter(|r| !is_empty_sufficient(r)));
            o
        })
        .collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(options.len());
    product(&options, &mut cur, false, &mut |kids| {
        out.push(Term { root: t.root.clone(), children: kids.to_vec() });
    });
    out
}

// Every choice of one option per child except all-first.
fn product(
    options: &[Vec<Restriction>],
    cur: &mut Vec<Restriction>,
    flipped: bool,
    emit: &mut dyn FnMut(&[Restriction]),
) {
    let i = cur.len();
    if i == options.len() {
        if flipped {
            emit(cur);
        }
        return;
    }
    for (k, o) in options[i].iter().enumerate() {
        cur.push(o.clone());
        product(options, cur, flipped || k > 0, emit);
        cur.pop();
    }
}

/// `lhs = 1_{has_one} ∪ terms`. After disambiguation `disjoint` is set and
/// the union is a disjoint one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub lhs: Restriction,
    pub has_one: bool,
    pub terms: Vec<Term>,
    pub disjoint: bool,
}

impl Equation {
    /// Same equation with terms in a canonical order, for comparisons.
    pub fn sorted(&self) -> Equation {
        let mut e = self.clone();
        e.terms.sort();
        e
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.has_one {
            parts.push("1".to_string());
        }
        parts.extend(self.terms.iter().map(|t| t.to_string()));
        if parts.is_empty() {
            parts.push("0".to_string());
        }
        write!(f, "{} = {}", self.lhs, parts.join(" + "))
    }
}

/// Removes exact duplicates and every term included in another one by the
/// sufficient test. Only valid for unions that may overlap.
pub fn prune_dominated(terms: Vec<Term>) -> Vec<Term> {
    let mut terms: Vec<Term> = terms.into_iter().filter(|t| !t.is_empty_sufficient()).collect();
    let mut seen = std::collections::HashSet::new();
    terms.retain(|t| seen.insert(t.clone()));
    let n = terms.len();
    let mut keep = vec![true; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && keep[j] && terms[i].subset_sufficient(&terms[j]) {
                // among mutual inclusions keep the earliest
                if !(terms[j].subset_sufficient(&terms[i]) && j > i) {
                    keep[i] = false;
                    break;
                }
            }
        }
    }
    terms.into_iter().zip(keep).filter(|(_, k)| *k).map(|(t, _)| t).collect()
}
