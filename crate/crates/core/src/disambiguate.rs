//! Propagation of mandatory patterns, disambiguation of unions of terms and
//! the specification worklist.

use crate::embeddings::all_embeddings;
use crate::error::{Error, Result};
use crate::perm::{Perm, Root};
use crate::restriction::{
    complement_restriction, intersect_same_delta, intersect_terms, is_empty_sufficient, prune_dominated, Delta,
    Equation, Restriction, Term,
};
use crate::system::{close_worklist, closure_equation, equation_cap, propagate_avoid, Basis, EquationSystem, SimpleSet};

/// Rewrites `t(γ)` as a union with one term per embedding of `γ` into the
/// root; child `j` must contain the block sent to it when that block has
/// size at least 2.
pub fn add_mandatory(t: &Term, gamma: &Perm) -> Result<Vec<Term>> {
    if gamma.len() <= 1 {
        return Err(Error::InvalidInput(format!(
            "mandatory pattern {} must have size at least 2",
            gamma.compact()
        )));
    }
    let mut out = Vec::new();
    for e in all_embeddings(gamma, &t.root.skeleton())? {
        let mut kids = t.children.clone();
        for m in e.nontrivial_positions() {
            let mut contain = kids[m].contain.clone();
            contain.push(e.blocks[m].clone());
            kids[m] = Restriction::new(kids[m].delta, kids[m].avoid.clone(), contain);
        }
        out.push(Term { root: t.root.clone(), children: kids });
    }
    Ok(prune_dominated(out))
}

pub fn propagate_contain(terms: Vec<Term>, gamma: &Perm) -> Result<Vec<Term>> {
    let mut out = Vec::new();
    for t in &terms {
        out.extend(add_mandatory(t, gamma)?);
    }
    Ok(prune_dominated(out))
}

/// Equation for `Ĉ^δ⟨E⟩(A)`: closure skeleton, then avoided patterns, then
/// contained patterns. The result may be ambiguous.
pub fn eqn_for_restriction(delta: Delta, avoid: &[Perm], contain: &[Perm], simples: &[Perm]) -> Result<Equation> {
    let lhs = Restriction::new(delta, avoid.to_vec(), contain.to_vec());
    if is_empty_sufficient(&lhs) {
        return Ok(Equation { lhs, has_one: false, terms: Vec::new(), disjoint: true });
    }
    let mut terms = closure_equation(delta, simples).terms;
    for gamma in &lhs.avoid {
        terms = propagate_avoid(terms, gamma)?;
    }
    for gamma in &lhs.contain {
        terms = propagate_contain(terms, gamma)?;
    }
    let has_one = lhs.contain.is_empty();
    Ok(Equation { lhs, has_one, terms, disjoint: false })
}

/// Rewrites the union of `t_1..t_k` (same root) as the disjoint union over
/// non-empty `X ⊆ [k]` of `∩_{i∈X} t_i ∩ ∩_{j∉X} complement(t_j)`.
pub fn disambiguate_group(group: &[Term]) -> Vec<Term> {
    let k = group.len();
    if k <= 1 {
        return group.iter().filter(|t| !t.is_empty_sufficient()).cloned().collect();
    }
    let mut out = Vec::new();
    for x in subsets_by_size(k) {
        let mut base = Some(group[x[0]].clone());
        for &i in &x[1..] {
            base = base.and_then(|b| intersect_terms(&b, &group[i]));
        }
        let Some(base) = base else { continue };
        if base.is_empty_sufficient() {
            continue;
        }
        let mut cur = vec![base];
        for j in (0..k).filter(|j| !x.contains(j)) {
            let mut next = Vec::new();
            for s in &cur {
                intersect_with_complement(s, &group[j], &mut next);
            }
            cur = next;
            if cur.is_empty() {
                break;
            }
        }
        out.extend(cur);
    }
    out
}

// Non-empty subsets of 0..k by increasing size, then lexicographically.
fn subsets_by_size(k: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1u64..(1u64 << k))
        .map(|mask| (0..k).filter(|i| mask >> i & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

// Pushes the pieces of `s ∩ complement(t)`, skipping empty ones.
fn intersect_with_complement(s: &Term, t: &Term, out: &mut Vec<Term>) {
    let options: Vec<(Option<Restriction>, Vec<Restriction>)> = s
        .children
        .iter()
        .zip(&t.children)
        .map(|(a, d)| {
            let keep = intersect_same_delta(a, d);
            let keep = (!is_empty_sufficient(&keep)).then_some(keep);
            let flips = complement_restriction(d)
                .iter()
                .map(|piece| intersect_same_delta(a, piece))
                .filter(|r| !is_empty_sufficient(r))
                .collect();
            (keep, flips)
        })
        .collect();
    let mut cur = Vec::with_capacity(options.len());
    choose(&options, &mut cur, false, &mut |kids| {
        out.push(Term { root: s.root.clone(), children: kids.to_vec() });
    });
}

fn choose(
    options: &[(Option<Restriction>, Vec<Restriction>)],
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
    let (keep, flips) = &options[i];
    if let Some(kp) = keep {
        cur.push(kp.clone());
        choose(options, cur, flipped, emit);
        cur.pop();
    }
    for f in flips {
        cur.push(f.clone());
        choose(options, cur, true, emit);
        cur.pop();
    }
}

/// Disjoint version of `eq`. Terms are grouped by root; groups of one
/// term are left alone. Exact duplicates are removed, other inclusions
/// between output terms are only reported by [`subset_pairs`].
pub fn disambiguate(eq: &Equation) -> Equation {
    let mut roots: Vec<Root> = Vec::new();
    for t in &eq.terms {
        if !roots.contains(&t.root) {
            roots.push(t.root.clone());
        }
    }
    let mut terms = Vec::new();
    for root in roots {
        let group: Vec<Term> = eq.terms.iter().filter(|t| t.root == root).cloned().collect();
        terms.extend(disambiguate_group(&group));
    }
    let mut seen = std::collections::HashSet::new();
    terms.retain(|t| seen.insert(t.clone()));
    let out = Equation { lhs: eq.lhs.clone(), has_one: eq.has_one, terms, disjoint: true };
    for (i, j) in subset_pairs(&out) {
        log::warn!(
            "in {}: term {} is included in {} though the union is disjoint, so it should be empty",
            out.lhs,
            out.terms[i],
            out.terms[j]
        );
    }
    out
}

/// Pairs `(i, j)` with term `i` included in term `j` by the sufficient
/// test. In a disjoint union such a term `i` must be empty.
pub fn subset_pairs(eq: &Equation) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (i, a) in eq.terms.iter().enumerate() {
        for (j, b) in eq.terms.iter().enumerate() {
            if i != j && a.subset_sufficient(b) {
                out.push((i, j));
            }
        }
    }
    out
}

/// Combinatorial specification of `Av(B)`: every equation is disjoint and
/// every restriction used on a right-hand side has its own equation.
pub fn specification(basis: &Basis, simples: &SimpleSet) -> Result<EquationSystem> {
    let top = Restriction::new(Delta::Plain, basis.b_star().to_vec(), Vec::new());
    let s = simples.as_slice();
    let equations = close_worklist(top.clone(), equation_cap(basis), |r| {
        let eq = eqn_for_restriction(r.delta, &r.avoid, &r.contain, s)?;
        Ok(disambiguate(&eq))
    })?;
    Ok(EquationSystem {
        basis: basis.patterns().to_vec(),
        simples: s.to_vec(),
        top,
        equations,
    })
}
