//! Exhaustive property checks at the size bounds they are stated for.
//! Each returns the first counterexample found, if any.

use std::collections::{BTreeMap, BTreeSet};

use permspec::disambiguate::{disambiguate_group, eqn_for_restriction};
use permspec::embeddings::{all_embeddings, block_decompositions, embeddings_for};
use permspec::perm::{
    all_perms, contains, decompose, in_closure, intervals_from, is_minus_decomposable, is_plus_decomposable,
    is_simple, substitute,
};
use permspec::restriction::{
    canonicalize, complement_restriction, complement_term, intersect_restrictions, subset_sufficient, Delta,
    Restriction, Term,
};
use permspec::system::{add_constraints, add_constraints_raw};
use permspec::{p, EquationSystem, Perm, Root};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{class_members, ensure, expand, fixtures, patterns_of, perms, Check, Universe};

fn upto(n: usize) -> Vec<Perm> {
    (1..=n).flat_map(all_perms).collect()
}

// ---- permutations ----

pub fn pattern_order() -> Check {
    let all = upto(6);
    for s in &all {
        ensure(contains(s, s), || format!("{} does not contain itself", s.compact()))?;
    }
    for a in &all {
        for b in all.iter().filter(|b| b.len() == a.len() && *b != a) {
            ensure(!(contains(a, b) && contains(b, a)), || format!("{} and {} contain each other", a.compact(), b.compact()))?;
        }
    }
    Ok(())
}

pub fn decomposition_round_trip() -> Check {
    for n in 2..=8 {
        for s in all_perms(n) {
            let (root, kids) = decompose(&s).map_err(|e| e.to_string())?;
            ensure(substitute(&root.skeleton(), &kids).ok().as_ref() == Some(&s), || {
                format!("{} does not rebuild from its decomposition", s.compact())
            })?;
            let ok = match &root {
                Root::Plus => !is_plus_decomposable(&kids[0]),
                Root::Minus => !is_minus_decomposable(&kids[0]),
                Root::Simple(a) => is_simple(a) && a.len() >= 4,
            };
            ensure(ok, || format!("side condition fails for {} with root {root}", s.compact()))?;
        }
    }
    Ok(())
}

/// Exactly one of: ⊕-decomposable, ⊖-decomposable, inflation of a simple.
pub fn decomposition_shapes_unique() -> Check {
    for n in 2..=8 {
        for s in all_perms(n) {
            let plus = is_plus_decomposable(&s);
            let minus = is_minus_decomposable(&s);
            let prime = block_decompositions(&s)
                .map_err(|e| e.to_string())?
                .iter()
                .any(|d| d.parts.len() >= 4 && is_simple(&d.skeleton(&s)));
            let shapes = [plus, minus, prime].iter().filter(|&&b| b).count();
            ensure(shapes == 1, || format!("{} matches {shapes} shapes", s.compact()))?;
        }
    }
    Ok(())
}

pub fn interval_soundness() -> Check {
    for g in upto(8) {
        for i in 1..=g.len() {
            let got: BTreeSet<usize> = intervals_from(&g, i).map_err(|e| e.to_string())?.iter().map(|iv| iv.end).collect();
            let want: BTreeSet<usize> = (i..=g.len())
                .filter(|&j| {
                    let vals = &g.values()[i - 1..j];
                    let (lo, hi) = (vals.iter().min().unwrap(), vals.iter().max().unwrap());
                    (hi - lo) as usize == j - i
                })
                .collect();
            ensure(got == want, || format!("intervals of {} from {i}: {got:?} vs {want:?}", g.compact()))?;
        }
    }
    Ok(())
}

pub fn closure_is_downward_closed_on_intervals() -> Check {
    for simples in [vec![], perms(&["2413"]), perms(&["3142", "24153"])] {
        for s in upto(7) {
            if !in_closure(&s, &simples).unwrap() {
                continue;
            }
            for i in 1..=s.len() {
                for iv in intervals_from(&s, i).unwrap() {
                    let b = s.block(iv.start, iv.end);
                    ensure(in_closure(&b, &simples).unwrap(), || {
                        format!("{} is in the closure but its block {} is not", s.compact(), b.compact())
                    })?;
                }
            }
        }
    }
    Ok(())
}

// ---- embeddings ----

fn tuples(pools: &[Vec<Perm>], arity: usize) -> Vec<Vec<Perm>> {
    let mut out: Vec<Vec<Perm>> = vec![vec![]];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                pools[0].iter().map(move |c| {
                    let mut t = t.clone();
                    t.push(c.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// `π[σ¹..σⁿ]` contains `γ` iff some embedding has `γ_α(i) ≼ σⁱ` for all i.
pub fn embedding_completeness() -> Check {
    let gammas = upto(4);
    let kids = upto(3);
    for pi in upto(4) {
        let embs: Vec<(Perm, Vec<_>)> =
            gammas.iter().map(|g| (g.clone(), all_embeddings(g, &pi).unwrap())).collect();
        for tuple in tuples(std::slice::from_ref(&kids), pi.len()) {
            let sigma = substitute(&pi, &tuple).unwrap();
            for (g, es) in &embs {
                let direct = contains(&sigma, g);
                let via = es.iter().any(|e| e.blocks.iter().zip(&tuple).all(|(b, k)| contains(k, b)));
                ensure(direct == via, || {
                    format!("{}[{:?}] vs {}: direct {direct}, embeddings {via}", pi.compact(), tuple, g.compact())
                })?;
            }
        }
    }
    Ok(())
}

pub fn embeddings_well_formed() -> Check {
    for g in upto(5) {
        for pi in upto(5) {
            let es = all_embeddings(&g, &pi).map_err(|e| e.to_string())?;
            ensure(es.len() >= pi.len(), || format!("only {} embeddings of {} into {}", es.len(), g.compact(), pi.compact()))?;
            ensure(es.windows(2).all(|w| w[0] < w[1]), || format!("embeddings of {} into {} not canonical", g.compact(), pi.compact()))?;
            for e in &es {
                ensure(e.check(&g, &pi), || format!("bad embedding {e:?} of {} into {}", g.compact(), pi.compact()))?;
            }
        }
    }
    // no two decompositions yield the same embedding on the reference pair
    let (g, pi) = (p("546312"), p("3142"));
    let raw: usize = block_decompositions(&g).unwrap().iter().map(|d| embeddings_for(d, &g, &pi).len()).sum();
    ensure(raw == 12 && all_embeddings(&g, &pi).unwrap().len() == 12, || format!("{raw} raw embeddings"))
}

// ---- restrictions ----

fn small_restrictions(pool: &[Perm], max_constraints: usize) -> Vec<Restriction> {
    let mut out = Vec::new();
    let k = pool.len();
    for mask in 0u32..3u32.pow(k as u32) {
        let (mut e, mut a) = (Vec::new(), Vec::new());
        let mut m = mask;
        for q in pool {
            match m % 3 {
                1 => e.push(q.clone()),
                2 => a.push(q.clone()),
                _ => {}
            }
            m /= 3;
        }
        if e.len() + a.len() <= max_constraints {
            for d in [Delta::Plain, Delta::Plus, Delta::Minus] {
                out.push(Restriction::new(d, e.clone(), a.clone()));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

fn restriction_pool() -> Vec<Perm> {
    perms(&["12", "21", "123", "132", "231", "321", "2143", "2413"])
}

pub fn complement_restriction_covers() -> Check {
    let simples = perms(&["2413"]);
    let u = Universe::new(7, &simples, restriction_pool());
    for r in small_restrictions(&restriction_pool(), 3) {
        let pieces = complement_restriction(&r);
        let kl = r.avoid.len() + r.contain.len();
        ensure(pieces.len() == (1 << kl) - 1, || format!("{} has {} complement pieces", r, pieces.len()))?;
        for i in 0..u.perms.len() {
            if !u.in_delta(i, r.delta) {
                continue;
            }
            let hits = usize::from(u.member(i, &r)) + pieces.iter().filter(|q| u.member(i, q)).count();
            ensure(hits == 1, || format!("{} lies in {hits} parts of {r} and its complement", u.perms[i].compact()))?;
        }
    }
    Ok(())
}

fn random_terms(rng: &mut ChaCha8Rng, roots: &[Root], children: &[Restriction], count: usize) -> Vec<Term> {
    (0..count)
        .map(|_| {
            let root = roots[rng.gen_range(0..roots.len())].clone();
            let kids = Term::child_deltas(&root)
                .into_iter()
                .map(|d| {
                    let c = &children[rng.gen_range(0..children.len())];
                    Restriction::new(d, c.avoid.clone(), c.contain.clone())
                })
                .collect();
            Term::new(root, kids)
        })
        .collect()
}

pub fn complement_term_covers() -> Check {
    let simples = perms(&["2413"]);
    let u = Universe::new(7, &simples, restriction_pool());
    let children = small_restrictions(&restriction_pool(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let roots = [Root::Plus, Root::Minus, Root::Simple(p("2413"))];
    for t in random_terms(&mut rng, &roots, &children, 150) {
        let pieces = complement_term(&t);
        for i in 0..u.perms.len() {
            if !u.has_root(i, &t.root) {
                continue;
            }
            let hits = usize::from(u.member_term(i, &t)) + pieces.iter().filter(|q| u.member_term(i, q)).count();
            ensure(hits == 1, || format!("{} lies in {hits} parts of {t} and its complement", u.perms[i].compact()))?;
        }
    }
    // complement of a full term is empty
    ensure(complement_term(&Term::full(Root::Simple(p("2413")))).is_empty(), || "full term has a complement".into())
}

pub fn canonicalize_laws() -> Check {
    let mut pool = restriction_pool();
    pool.push(p("1"));
    let u = Universe::new(7, &[p("2413")], pool.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..400 {
        let mut pick = || (0..rng.gen_range(0..4)).map(|_| pool[rng.gen_range(0..pool.len())].clone()).collect::<Vec<_>>();
        let raw = Restriction { delta: Delta::Plain, avoid: pick(), contain: pick() };
        let c = canonicalize(&raw);
        ensure(canonicalize(&c) == c, || format!("canonicalize not idempotent on {raw:?}"))?;
        for i in 0..u.perms.len() {
            ensure(u.member(i, &raw) == u.member(i, &c), || {
                format!("canonicalize changed membership of {} in {raw:?}", u.perms[i].compact())
            })?;
        }
    }
    Ok(())
}

pub fn intersection_is_set_intersection() -> Check {
    let u = Universe::new(7, &[p("2413")], restriction_pool());
    let rs = small_restrictions(&restriction_pool(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..600 {
        let a = &rs[rng.gen_range(0..rs.len())];
        let b0 = &rs[rng.gen_range(0..rs.len())];
        let b = Restriction::new(a.delta, b0.avoid.clone(), b0.contain.clone());
        let c = intersect_restrictions(a, &b).map_err(|e| e.to_string())?;
        for i in 0..u.perms.len() {
            ensure(u.member(i, &c) == (u.member(i, a) && u.member(i, &b)), || {
                format!("{} in {a} ∩ {b} = {c} disagrees", u.perms[i].compact())
            })?;
        }
    }
    Ok(())
}

pub fn subset_test_is_sound() -> Check {
    let u = Universe::new(8, &[p("2413")], restriction_pool());
    let rs: Vec<Restriction> = small_restrictions(&restriction_pool(), 2).into_iter().filter(|r| r.delta == Delta::Plain).collect();
    let counts: BTreeMap<&Restriction, Vec<usize>> = rs.iter().map(|r| (r, (1..=8).map(|n| u.count(r, n)).collect())).collect();
    for a in &rs {
        for b in &rs {
            if subset_sufficient(a, b).map_err(|e| e.to_string())? {
                ensure(counts[a].iter().zip(&counts[b]).all(|(x, y)| x <= y), || format!("{a} ⊆ {b} claimed but counts disagree"))?;
            }
        }
    }
    Ok(())
}

// ---- system construction ----

/// `t⟨γ⟩` equals the union returned by add_constraints, and the raw
/// product too.
pub fn add_constraints_sound() -> Check {
    let simples = perms(&["2413", "3142"]);
    let u = Universe::new(8, &simples, upto(4));
    let roots = [Root::Plus, Root::Minus, Root::Simple(p("2413")), Root::Simple(p("3142"))];
    for root in &roots {
        let full = Term::full(root.clone());
        for g in upto(4).into_iter().filter(|g| g.len() >= 2) {
            let terms = add_constraints(&full, &g).map_err(|e| e.to_string())?;
            let raw: Vec<Term> = add_constraints_raw(&full, &g)
                .map_err(|e| e.to_string())?
                .into_iter()
                .map(Term::canonical)
                .collect();
            for i in 0..u.perms.len() {
                let want = u.member_term(i, &full) && !u.contains(i, &g);
                let got = terms.iter().any(|t| u.member_term(i, t));
                let got_raw = raw.iter().any(|t| u.member_term(i, t));
                ensure(want == got && want == got_raw, || {
                    format!("{}⟨{}⟩ at {}: want {want}, got {got}, raw {got_raw}", full, g.compact(), u.perms[i].compact())
                })?;
            }
        }
    }
    Ok(())
}

fn universe_for(f: &super::Fixture, spec: &EquationSystem, nmax: usize) -> Universe {
    let mut pool = patterns_of(spec);
    pool.extend(f.basis.iter().cloned());
    pool.extend(f.basis().blocks());
    Universe::new(nmax, &f.simples, pool)
}

/// Expanding the possibly ambiguous system as a grammar yields exactly
/// `Av(B)` for sizes up to 8.
pub fn ambiguous_system_covers() -> Check {
    for f in fixtures() {
        let sys = f.ambiguous();
        let u = universe_for(&f, &sys, 8);
        let ex = expand(&sys, 8);
        let top = sys.index()[&sys.top];
        for n in 1..=8 {
            ensure(ex.sets[top][n] == class_members(&u, &f.basis, n), || format!("{}: expansion differs at size {n}", f.name))?;
        }
    }
    Ok(())
}

pub fn systems_are_structurally_sound() -> Check {
    for f in fixtures() {
        let blocks = f.basis().blocks();
        for (kind, sys) in [("ambiguous", f.ambiguous()), ("specification", f.spec())] {
            ensure(sys.undefined().is_empty(), || format!("{} {kind}: undefined {:?}", f.name, sys.undefined()))?;
            ensure(sys.patterns_outside(&blocks).is_empty(), || format!("{} {kind}: patterns outside the blocks", f.name))?;
            // the three closure equations are needed even when P⋆ is empty
            let cap = 3usize.pow(blocks.len() as u32).max(3);
            ensure(sys.len() <= cap, || format!("{} {kind}: {} equations above the cap {cap}", f.name, sys.len()))?;
            ensure(sys.get(&sys.top).is_some(), || format!("{} {kind}: no equation for the class", f.name))?;
        }
    }
    Ok(())
}

// ---- specifications ----

/// Every equation is a disjoint cover of its left-hand side for sizes up
/// to 8, and the class equation gives `Av(B)`.
pub fn specifications_disjoint_and_complete() -> Check {
    for f in fixtures() {
        let spec = f.spec();
        let u = universe_for(&f, &spec, 8);
        for e in &spec.equations {
            ensure(e.disjoint, || format!("{}: {} not flagged disjoint", f.name, e.lhs))?;
            ensure(e.has_one == e.lhs.contain.is_empty() || e.lhs.avoid.iter().any(|a| a.len() == 1), || {
                format!("{}: atom law fails for {}", f.name, e.lhs)
            })?;
            for i in 0..u.perms.len() {
                let atom = usize::from(e.has_one && u.perms[i].len() == 1);
                let hits = atom + e.terms.iter().filter(|t| u.member_term(i, t)).count();
                let want = usize::from(u.member(i, &e.lhs));
                ensure(hits == want, || format!("{}: {} is in {hits} parts of {} (member: {want})", f.name, u.perms[i].compact(), e.lhs))?;
            }
        }
        let ex = expand(&spec, 8);
        let top = spec.index()[&spec.top];
        for n in 1..=8 {
            let members = class_members(&u, &f.basis, n);
            ensure(ex.sets[top][n] == members && ex.derivations[top][n] == members.len(), || {
                format!("{}: size {n} gives {} objects, {} derivations, {} members", f.name, ex.sets[top][n].len(), ex.derivations[top][n], members.len())
            })?;
        }
    }
    Ok(())
}

/// For each root group of each possibly ambiguous equation, the
/// disambiguated terms cover the same set, each element exactly once.
pub fn root_groups_disjoint_cover() -> Check {
    for f in fixtures() {
        let spec = f.spec();
        let u = universe_for(&f, &spec, 7);
        for e in &spec.equations {
            let amb = eqn_for_restriction(e.lhs.delta, &e.lhs.avoid, &e.lhs.contain, &f.simples).map_err(|e| e.to_string())?;
            let mut roots: Vec<Root> = Vec::new();
            for t in &amb.terms {
                if !roots.contains(&t.root) {
                    roots.push(t.root.clone());
                }
            }
            for root in roots {
                let group: Vec<Term> = amb.terms.iter().filter(|t| t.root == root).cloned().collect();
                let out = disambiguate_group(&group);
                for i in 0..u.perms.len() {
                    let before = group.iter().any(|t| u.member_term(i, t));
                    let after = out.iter().filter(|t| u.member_term(i, t)).count();
                    ensure(after == usize::from(before), || {
                        format!("{}: {} in {} group of {}: before {before}, after {after}", f.name, u.perms[i].compact(), root, e.lhs)
                    })?;
                }
            }
        }
    }
    Ok(())
}

/// All checks by name, in a fixed order.
pub type Suite = (&'static str, fn() -> Check);

pub fn all() -> Vec<Suite> {
    vec![
        ("pattern order", pattern_order),
        ("decomposition round trip", decomposition_round_trip),
        ("decomposition shapes unique", decomposition_shapes_unique),
        ("interval soundness", interval_soundness),
        ("closure downward closed", closure_is_downward_closed_on_intervals),
        ("embedding completeness", embedding_completeness),
        ("embeddings well formed", embeddings_well_formed),
        ("complement restriction cover", complement_restriction_covers),
        ("complement term cover", complement_term_covers),
        ("canonicalize laws", canonicalize_laws),
        ("intersection", intersection_is_set_intersection),
        ("subset test", subset_test_is_sound),
        ("add_constraints soundness", add_constraints_sound),
        ("ambiguous system coverage", ambiguous_system_covers),
        ("structure of systems", systems_are_structurally_sound),
        ("specification disjoint and complete", specifications_disjoint_and_complete),
        ("root groups disjoint cover", root_groups_disjoint_cover),
    ]
}
