//! Brute force ground truth for small sizes: class enumeration, simple
//! permutations of a class, restriction membership and specification
//! audits.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::embeddings::all_embeddings;
use crate::error::Result;
use crate::perm::{
    contains, decompose, factorial, DecompositionTree, in_closure_unchecked, is_minus_decomposable, is_plus_decomposable, is_simple,
    unrank, Perm,
};
use crate::restriction::{Delta, Equation, Restriction, Term};
use crate::system::EquationSystem;

fn avoids_all(sigma: &Perm, basis: &[Perm]) -> bool {
    basis.iter().all(|b| !contains(sigma, b))
}

/// Whether `sigma` avoids every element of `basis`, computed bottom up on
/// its decomposition tree: a pattern occurs in `π[α1, ..., αk]` when it
/// occurs in some `αi` or some embedding into `π` puts each nonempty block
/// inside its child. Unlike the direct search this stays fast for large
/// `sigma` and small patterns.
pub fn avoids_basis(sigma: &Perm, basis: &[Perm]) -> bool {
    if sigma.is_empty() {
        return basis.iter().all(|b| !b.is_empty());
    }
    let mut pats: BTreeSet<Perm> = BTreeSet::new();
    let mut todo: Vec<Perm> = basis.iter().filter(|b| !b.is_empty()).cloned().collect();
    while let Some(q) = todo.pop() {
        if q.is_empty() || !pats.insert(q.clone()) {
            continue;
        }
        for i in 0..q.len() {
            let rest: Vec<u32> = q.values().iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect();
            todo.push(crate::perm::normalize(&rest).expect("distinct values"));
        }
    }
    let pats: Vec<Perm> = pats.into_iter().collect();
    let index: HashMap<&Perm, usize> = pats.iter().enumerate().map(|(i, q)| (q, i)).collect();
    let tree = DecompositionTree::build(sigma).expect("nonempty");
    let mut cache = HashMap::new();
    let found = contained_patterns(&tree, &pats, &index, &mut cache);
    basis.iter().all(|b| !b.is_empty() && !found[index[b]])
}

type EmbeddingCache = HashMap<(usize, Perm), Vec<Vec<Option<usize>>>>;

// Entry i is whether pats[i] occurs in the permutation of `node`.
fn contained_patterns(
    node: &DecompositionTree,
    pats: &[Perm],
    index: &HashMap<&Perm, usize>,
    cache: &mut EmbeddingCache,
) -> Vec<bool> {
    let (root, kids) = match node {
        DecompositionTree::Leaf => return pats.iter().map(|q| q.len() == 1).collect(),
        DecompositionTree::Node(root, kids) => (root.skeleton(), kids),
    };
    let kid_sets: Vec<Vec<bool>> = kids.iter().map(|k| contained_patterns(k, pats, index, cache)).collect();
    (0..pats.len())
        .map(|g| {
            kid_sets.iter().any(|s| s[g])
                || cache
                    .entry((g, root.clone()))
                    .or_insert_with(|| {
                        all_embeddings(&pats[g], &root)
                            .expect("nonempty pattern")
                            .into_iter()
                            .map(|e| e.blocks.iter().map(|b| (!b.is_empty()).then(|| index[b])).collect())
                            .collect()
                    })
                    .iter()
                    .any(|e| e.iter().zip(&kid_sets).all(|(b, s)| b.is_none_or(|b| s[b])))
        })
        .collect()
}

/// Permutations of size `n` avoiding every element of `basis`, in
/// lexicographic order.
pub fn enumerate_class(basis: &[Perm], n: usize) -> Vec<Perm> {
    crate::par::filter_map_range(factorial(n), |r| {
        let s = unrank(n, r);
        avoids_all(&s, basis).then_some(s)
    })
}

pub fn enumerate_class_seq(basis: &[Perm], n: usize) -> Vec<Perm> {
    crate::par::filter_map_range_seq(factorial(n), |r| {
        let s = unrank(n, r);
        avoids_all(&s, basis).then_some(s)
    })
}

/// Simple permutations of size at most `maxlen` avoiding `basis`. Whether
/// the bound is large enough is up to the caller; see [`bound_looks_tight`].
pub fn simples_in_class(basis: &[Perm], maxlen: usize) -> Vec<Perm> {
    let mut out = Vec::new();
    for n in 4..=maxlen {
        out.extend(crate::par::filter_map_range(factorial(n), |r| {
            let s = unrank(n, r);
            (is_simple(&s) && avoids_all(&s, basis)).then_some(s)
        }));
    }
    out
}

/// True when a simple permutation of the maximal searched size was found,
/// so larger ones may exist too.
pub fn bound_looks_tight(simples: &[Perm], maxlen: usize) -> bool {
    simples.iter().any(|s| s.len() == maxlen)
}

fn delta_ok(sigma: &Perm, delta: Delta) -> bool {
    match delta {
        Delta::Plain => true,
        Delta::Plus => !is_plus_decomposable(sigma),
        Delta::Minus => !is_minus_decomposable(sigma),
    }
}

/// Direct test of `sigma ∈ Ĉ^δ⟨E⟩(A)` for the closure of `simples`.
pub fn member_of_restriction(sigma: &Perm, r: &Restriction, simples: &[Perm]) -> bool {
    !sigma.is_empty() && in_closure_unchecked(sigma, simples) && delta_ok(sigma, r.delta) && r.is_member(sigma)
}

pub fn member_of_term(sigma: &Perm, t: &Term, simples: &[Perm]) -> bool {
    if sigma.len() < 2 {
        return false;
    }
    let (root, children) = decompose(sigma).expect("size >= 2");
    root == t.root && children.iter().zip(&t.children).all(|(c, r)| member_of_restriction(c, r, simples))
}

/// Number of parts of the right-hand side (atom included) containing
/// `sigma`.
pub fn rhs_multiplicity(sigma: &Perm, eq: &Equation, simples: &[Perm]) -> usize {
    let atom = usize::from(eq.has_one && sigma.len() == 1);
    atom + eq.terms.iter().filter(|t| member_of_term(sigma, t, simples)).count()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// `perm` lies in several parts of a right-hand side.
    Overlap { equation: String, perm: Perm, parts: Vec<String> },
    /// `perm` is in the left-hand side but in no part of the right-hand side.
    Missing { equation: String, perm: Perm },
    /// `perm` is produced by the right-hand side but not in the left-hand side.
    Extra { equation: String, perm: Perm },
    /// The equation for the class disagrees with direct enumeration of `Av(B)`.
    ClassMismatch { perm: Perm, in_class: bool },
    /// A right-hand side uses a restriction without equation.
    Undefined { restriction: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Overlap { equation, perm, parts } => {
                write!(f, "overlap in {equation}: {} belongs to {}", perm.compact(), parts.join(" and "))
            }
            Violation::Missing { equation, perm } => {
                write!(f, "incomplete {equation}: {} is not produced", perm.compact())
            }
            Violation::Extra { equation, perm } => {
                write!(f, "unsound {equation}: {} is produced but not a member", perm.compact())
            }
            Violation::ClassMismatch { perm, in_class } => write!(
                f,
                "class mismatch: {} {} the basis but the specification says otherwise",
                perm.compact(),
                if *in_class { "avoids" } else { "contains an element of" }
            ),
            Violation::Undefined { restriction } => write!(f, "{restriction} has no equation"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditReport {
    pub nmax: usize,
    /// Membership checks performed.
    pub checked: usize,
    pub total_violations: usize,
    /// The first violations found, at most [`AuditReport::KEEP`].
    pub violations: Vec<Violation>,
}

impl AuditReport {
    pub const KEEP: usize = 200;

    pub fn is_clean(&self) -> bool {
        self.total_violations == 0
    }

    fn push_all(&mut self, vs: Vec<Violation>) {
        self.total_violations += vs.len();
        let room = Self::KEEP.saturating_sub(self.violations.len());
        self.violations.extend(vs.into_iter().take(room));
    }
}

// Pattern bits and decomposability flags of a permutation.
#[derive(Clone, Debug)]
struct Info {
    closure: bool,
    plus_dec: bool,
    minus_dec: bool,
    sig: Vec<u64>,
}

struct Index<'a> {
    patterns: HashMap<&'a Perm, usize>,
    info: HashMap<Perm, Info>,
}

impl Index<'_> {
    fn bit(&self, q: &Perm, info: &Info) -> bool {
        let b = self.patterns[q];
        info.sig[b / 64] >> (b % 64) & 1 == 1
    }

    fn in_restriction(&self, sigma: &Perm, r: &Restriction) -> bool {
        let Some(info) = self.info.get(sigma) else { return false };
        info.closure
            && match r.delta {
                Delta::Plain => true,
                Delta::Plus => !info.plus_dec,
                Delta::Minus => !info.minus_dec,
            }
            && r.avoid.iter().all(|q| !self.bit(q, info))
            && r.contain.iter().all(|q| self.bit(q, info))
    }

    fn in_term(&self, root_children: &(crate::perm::Root, Vec<Perm>), t: &Term) -> bool {
        root_children.0 == t.root
            && root_children.1.iter().zip(&t.children).all(|(c, r)| self.in_restriction(c, r))
    }
}

fn build_index<'a>(spec: &'a EquationSystem, nmax: usize, parallel: bool) -> Index<'a> {
    let mut pats: BTreeSet<&Perm> = BTreeSet::new();
    for e in &spec.equations {
        for r in std::iter::once(&e.lhs).chain(e.terms.iter().flat_map(|t| &t.children)) {
            pats.extend(r.avoid.iter().chain(&r.contain));
        }
    }
    let pats: Vec<&Perm> = pats.into_iter().collect();
    let words = pats.len().div_ceil(64).max(1);
    let simples = &spec.simples;
    let mut info = HashMap::new();
    for n in 1..=nmax {
        let make = |r: u64| {
            let s = unrank(n, r);
            let mut sig = vec![0u64; words];
            for (b, q) in pats.iter().enumerate() {
                if contains(&s, q) {
                    sig[b / 64] |= 1 << (b % 64);
                }
            }
            let i = Info {
                closure: in_closure_unchecked(&s, simples),
                plus_dec: is_plus_decomposable(&s),
                minus_dec: is_minus_decomposable(&s),
                sig,
            };
            Some((s, i))
        };
        let items = if parallel {
            crate::par::filter_map_range(factorial(n), make)
        } else {
            crate::par::filter_map_range_seq(factorial(n), make)
        };
        info.extend(items);
    }
    Index { patterns: pats.into_iter().enumerate().map(|(i, q)| (q, i)).collect(), info }
}

fn check_perm(spec: &EquationSystem, idx: &Index, sigma: &Perm) -> (usize, Vec<Violation>) {
    let mut out = Vec::new();
    let mut checked = 0;
    let dec = (sigma.len() >= 2).then(|| decompose(sigma).expect("size >= 2"));
    for e in &spec.equations {
        checked += 1;
        let lhs = idx.in_restriction(sigma, &e.lhs);
        let mut parts = Vec::new();
        if e.has_one && sigma.len() == 1 {
            parts.push("1".to_string());
        }
        if let Some(d) = &dec {
            for t in &e.terms {
                if idx.in_term(d, t) {
                    parts.push(t.to_string());
                }
            }
        }
        let name = e.lhs.to_string();
        if parts.len() > 1 {
            out.push(Violation::Overlap { equation: name.clone(), perm: sigma.clone(), parts: parts.clone() });
        }
        if lhs && parts.is_empty() {
            out.push(Violation::Missing { equation: name, perm: sigma.clone() });
        } else if !lhs && !parts.is_empty() {
            out.push(Violation::Extra { equation: name, perm: sigma.clone() });
        }
    }
    // The class is what the equation for `top` produces.
    let produced = spec.equations.iter().find(|e| e.lhs == spec.top).is_some_and(|e| {
        (e.has_one && sigma.len() == 1) || dec.as_ref().is_some_and(|d| e.terms.iter().any(|t| idx.in_term(d, t)))
    });
    let in_class = avoids_all(sigma, &spec.basis);
    if produced != in_class {
        out.push(Violation::ClassMismatch { perm: sigma.clone(), in_class });
    }
    (checked, out)
}

fn audit_impl(spec: &EquationSystem, nmax: usize, parallel: bool) -> AuditReport {
    let mut report = AuditReport { nmax, ..Default::default() };
    let mut undefined = spec.undefined();
    if spec.get(&spec.top).is_none() {
        undefined.insert(0, spec.top.clone());
    }
    report.push_all(undefined.into_iter().map(|r| Violation::Undefined { restriction: r.to_string() }).collect());
    let idx = build_index(spec, nmax, parallel);
    for n in 1..=nmax {
        let perms: Vec<Perm> = (0..factorial(n)).map(|r| unrank(n, r)).collect();
        let results = if parallel {
            crate::par::map_slice(&perms, |s| check_perm(spec, &idx, s))
        } else {
            perms.iter().map(|s| check_perm(spec, &idx, s)).collect()
        };
        for (c, vs) in results {
            report.checked += c;
            report.push_all(vs);
        }
    }
    report
}

/// Checks every equation of `spec` at every size up to `nmax`: parts of
/// each right-hand side are pairwise disjoint, their union is the
/// left-hand side, and the equation for `spec.top` produces exactly
/// `Av(spec.basis)`.
pub fn audit_specification(spec: &EquationSystem, nmax: usize) -> AuditReport {
    audit_impl(spec, nmax, true)
}

pub fn audit_specification_seq(spec: &EquationSystem, nmax: usize) -> AuditReport {
    audit_impl(spec, nmax, false)
}

/// Per-size counts of `Av(basis)` for sizes `1..=nmax`.
pub fn class_counts(basis: &[Perm], nmax: usize) -> Vec<usize> {
    (1..=nmax).map(|n| enumerate_class(basis, n).len()).collect()
}

/// Fails when some simple permutation given for the class contains a
/// basis element.
pub fn check_simples_avoid_basis(basis: &[Perm], simples: &[Perm]) -> Result<()> {
    if let Some(s) = simples.iter().find(|s| !avoids_all(s, basis)) {
        return Err(crate::error::Error::InvalidInput(format!(
            "simple permutation {} is not in the class",
            s.compact()
        )));
    }
    Ok(())
}
