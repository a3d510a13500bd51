//! Bases, closure equations, constraint propagation and the possibly
//! ambiguous system of a class.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::embeddings::{all_embeddings, Embedding};
use crate::error::{Error, Result};
use crate::perm::{contains, intervals_from, is_simple, Perm, Root};
use crate::restriction::{canonicalize, is_empty_sufficient, prune_dominated, Delta, Equation, Restriction, Term};

/// A finite antichain basis `B`, together with `B⋆`, its non-simple
/// elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    patterns: Vec<Perm>,
    b_star: Vec<Perm>,
}

impl Basis {
    /// Rejects bases containing a pattern of size at most 2.
    pub fn new(patterns: Vec<Perm>) -> Result<Basis> {
        Basis::build(patterns, 2)
    }

    /// Like [`Basis::new`] but accepts `12` and `21`, for classes such as
    /// `Av(21)` whose closure has no `⊖` (or `⊕`) node at all. Only `ε`
    /// and `1` are refused.
    pub fn with_small_patterns(patterns: Vec<Perm>) -> Result<Basis> {
        Basis::build(patterns, 1)
    }

    fn build(patterns: Vec<Perm>, min_ok: usize) -> Result<Basis> {
        let mut patterns = patterns;
        patterns.sort();
        patterns.dedup();
        if let Some(t) = patterns.iter().find(|b| b.len() <= min_ok) {
            return Err(Error::TrivialClass(t.compact()));
        }
        for a in &patterns {
            for b in &patterns {
                if a != b && contains(b, a) {
                    return Err(Error::NotAntichain { small: a.compact(), large: b.compact() });
                }
            }
        }
        let b_star = patterns.iter().filter(|b| !is_simple(b)).cloned().collect();
        Ok(Basis { patterns, b_star })
    }

    pub fn patterns(&self) -> &[Perm] {
        &self.patterns
    }

    pub fn b_star(&self) -> &[Perm] {
        &self.b_star
    }

    /// `P⋆`: normalized blocks of the elements of `B⋆`, 1 included.
    pub fn blocks(&self) -> BTreeSet<Perm> {
        let mut out = BTreeSet::new();
        for b in &self.b_star {
            for i in 1..=b.len() {
                for iv in intervals_from(b, i).expect("index in range") {
                    out.insert(b.block(iv.start, iv.end));
                }
            }
        }
        out
    }

    pub fn contains_perm(&self, sigma: &Perm) -> bool {
        self.patterns.iter().any(|b| contains(sigma, b))
    }
}

/// The simple permutations of the class.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SimpleSet(Vec<Perm>);

impl SimpleSet {
    pub fn new(simples: Vec<Perm>) -> Result<SimpleSet> {
        let mut simples = simples;
        simples.sort();
        simples.dedup();
        if let Some(bad) = simples.iter().find(|s| !is_simple(s)) {
            return Err(Error::InvalidInput(format!("{} is not a simple permutation", bad.compact())));
        }
        Ok(SimpleSet(simples))
    }

    pub fn empty() -> SimpleSet {
        SimpleSet(Vec::new())
    }

    pub fn as_slice(&self) -> &[Perm] {
        &self.0
    }
}

/// Equations keyed by their left-hand restriction, in the order the
/// worklist produced them. The first equation defines `top`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquationSystem {
    pub basis: Vec<Perm>,
    pub simples: Vec<Perm>,
    pub top: Restriction,
    pub equations: Vec<Equation>,
}

impl EquationSystem {
    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn index(&self) -> HashMap<&Restriction, usize> {
        self.equations.iter().enumerate().map(|(i, e)| (&e.lhs, i)).collect()
    }

    pub fn get(&self, r: &Restriction) -> Option<&Equation> {
        self.equations.iter().find(|e| &e.lhs == r)
    }

    pub fn is_disjoint(&self) -> bool {
        self.equations.iter().all(|e| e.disjoint)
    }

    /// Restrictions used on a right-hand side without an equation.
    pub fn undefined(&self) -> Vec<Restriction> {
        let idx = self.index();
        let mut out: BTreeSet<Restriction> = BTreeSet::new();
        for e in &self.equations {
            for t in &e.terms {
                for c in &t.children {
                    if !idx.contains_key(c) {
                        out.insert(c.clone());
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// Patterns outside `allowed` used in some avoid or contain set.
    pub fn patterns_outside(&self, allowed: &BTreeSet<Perm>) -> Vec<Perm> {
        let mut out = BTreeSet::new();
        for e in &self.equations {
            let rs = std::iter::once(&e.lhs).chain(e.terms.iter().flat_map(|t| t.children.iter()));
            for r in rs {
                for q in r.avoid.iter().chain(&r.contain) {
                    if !allowed.contains(q) {
                        out.insert(q.clone());
                    }
                }
            }
        }
        out.into_iter().collect()
    }
}

impl std::fmt::Display for EquationSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for e in &self.equations {
            writeln!(f, "{e}")?;
        }
        Ok(())
    }
}

/// `Ĉ^δ = 1 ∪ ...` for the substitution closure of `simples`.
pub fn closure_equation(delta: Delta, simples: &[Perm]) -> Equation {
    let mut terms = Vec::new();
    if delta != Delta::Plus {
        terms.push(Term::full(Root::Plus));
    }
    if delta != Delta::Minus {
        terms.push(Term::full(Root::Minus));
    }
    terms.extend(simples.iter().map(|s| Term::full(Root::Simple(s.clone()))));
    Equation { lhs: Restriction::full(delta), has_one: true, terms, disjoint: true }
}

fn check_pattern(gamma: &Perm) -> Result<()> {
    if gamma.len() <= 1 {
        return Err(Error::InvalidInput(format!(
            "constraint pattern {} must have size at least 2",
            gamma.compact()
        )));
    }
    Ok(())
}

fn sorted_embeddings(gamma: &Perm, root: &Root) -> Result<Vec<Embedding>> {
    let mut embs = all_embeddings(gamma, &root.skeleton())?;
    embs.sort_by_key(|e| e.nontrivial_positions().count());
    Ok(embs)
}

/// Rewrites `t⟨γ⟩` as a union of terms whose children carry extra avoided
/// patterns. For every embedding of `γ` into the root, one child with a
/// block of size at least 2 must avoid that block. Dominated terms are
/// pruned after each embedding.
pub fn add_constraints(t: &Term, gamma: &Perm) -> Result<Vec<Term>> {
    check_pattern(gamma)?;
    let mut state = vec![t.clone()];
    for e in sorted_embeddings(gamma, &t.root)? {
        let positions: Vec<usize> = e.nontrivial_positions().collect();
        let mut next = Vec::new();
        for s in state {
            let blocked = positions
                .iter()
                .any(|&m| s.children[m].avoid.iter().any(|x| contains(&e.blocks[m], x)));
            if blocked {
                next.push(s);
                continue;
            }
            for &m in &positions {
                let mut kids = s.children.clone();
                let mut avoid = kids[m].avoid.clone();
                avoid.push(e.blocks[m].clone());
                kids[m] = Restriction::new(kids[m].delta, avoid, kids[m].contain.clone());
                if is_empty_sufficient(&kids[m]) {
                    continue;
                }
                next.push(Term { root: s.root.clone(), children: kids });
            }
        }
        state = prune_dominated(next);
        if state.is_empty() {
            break;
        }
    }
    Ok(state)
}

/// The unsimplified rewriting: one term per tuple choosing a blocking
/// position in every embedding, child avoid sets extended but not
/// canonicalized.
pub fn add_constraints_raw(t: &Term, gamma: &Perm) -> Result<Vec<Term>> {
    check_pattern(gamma)?;
    let embs = all_embeddings(gamma, &t.root.skeleton())?;
    let choices: Vec<Vec<usize>> = embs.iter().map(|e| e.nontrivial_positions().collect()).collect();
    if choices.iter().any(Vec::is_empty) {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut pick = vec![0usize; embs.len()];
    loop {
        let mut kids = t.children.clone();
        for (i, e) in embs.iter().enumerate() {
            let m = choices[i][pick[i]];
            kids[m].avoid.push(e.blocks[m].clone());
        }
        out.push(Term { root: t.root.clone(), children: kids });
        let mut i = 0;
        loop {
            if i == pick.len() {
                return Ok(out);
            }
            pick[i] += 1;
            if pick[i] < choices[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}

/// Folds `add_constraints` for `gamma` over a union of terms.
pub fn propagate_avoid(terms: Vec<Term>, gamma: &Perm) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    for t in &terms {
        out.extend(add_constraints(t, gamma)?);
    }
    Ok(prune_dominated(out))
}

/// Equation for `Ĉ^δ⟨E⟩`, possibly ambiguous.
pub fn eqn_for_class(delta: Delta, avoid: &[Perm], simples: &[Perm]) -> Result<Equation> {
    let lhs = Restriction::new(delta, avoid.to_vec(), Vec::new());
    let mut terms = closure_equation(delta, simples).terms;
    for gamma in &lhs.avoid {
        terms = propagate_avoid(terms, gamma)?;
    }
    let has_one = !is_empty_sufficient(&lhs);
    Ok(Equation { lhs, has_one, terms, disjoint: false })
}

/// `3^|P⋆|`, at least 3, overridable through `PERMSPEC_MAX_EQUATIONS`.
pub fn equation_cap(basis: &Basis) -> usize {
    if let Some(cap) = std::env::var("PERMSPEC_MAX_EQUATIONS").ok().and_then(|v| v.trim().parse().ok()) {
        return cap;
    }
    let k = basis.blocks().len() as u32;
    3usize.checked_pow(k).unwrap_or(usize::MAX).max(3)
}

/// Builds equations for `top` and every restriction reachable from it.
pub(crate) fn close_worklist(
    top: Restriction,
    cap: usize,
    mut build: impl FnMut(&Restriction) -> Result<Equation>,
) -> Result<Vec<Equation>> {
    let mut seen: BTreeSet<Restriction> = BTreeSet::new();
    let mut queue = VecDeque::from([top.clone()]);
    seen.insert(top);
    let mut out = Vec::new();
    while let Some(r) = queue.pop_front() {
        let eq = build(&r)?;
        for t in &eq.terms {
            for c in &t.children {
                if seen.insert(c.clone()) {
                    queue.push_back(c.clone());
                }
            }
        }
        out.push(eq);
        if out.len() > cap {
            return Err(Error::TooManyEquations { cap });
        }
        log::debug!("{} equations, {} pending", out.len(), queue.len());
    }
    Ok(out)
}

/// The possibly ambiguous system describing `Av(B)`.
pub fn ambiguous_system(basis: &Basis, simples: &SimpleSet) -> Result<EquationSystem> {
    let top = canonicalize(&Restriction::new(Delta::Plain, basis.b_star().to_vec(), Vec::new()));
    let s = simples.as_slice();
    let equations = close_worklist(top.clone(), equation_cap(basis), |r| eqn_for_class(r.delta, &r.avoid, s))?;
    Ok(EquationSystem {
        basis: basis.patterns().to_vec(),
        simples: s.to_vec(),
        top,
        equations,
    })
}
