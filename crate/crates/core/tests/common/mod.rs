//! Helpers shared by the integration tests: fixture loading, an
//! independent membership universe and grammar expansion.
#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeSet, HashMap};

use permspec::disambiguate::specification;
use permspec::perm::{all_perms, decompose, in_closure, is_minus_decomposable, is_plus_decomposable, substitute};
use permspec::restriction::{Delta, Equation, Restriction, Term};
use permspec::system::{Basis, SimpleSet};
use permspec::{p, EquationSystem, Perm, Root};

pub fn data(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"))
}

pub fn perms(v: &[&str]) -> Vec<Perm> {
    v.iter().map(|s| p(s)).collect()
}

/// A fixture class: basis and the simple permutations of its closure.
pub struct Fixture {
    pub name: &'static str,
    pub basis: Vec<Perm>,
    pub simples: Vec<Perm>,
}

impl Fixture {
    pub fn basis(&self) -> Basis {
        Basis::with_small_patterns(self.basis.clone()).unwrap()
    }

    pub fn spec(&self) -> EquationSystem {
        specification(&self.basis(), &SimpleSet::new(self.simples.clone()).unwrap()).unwrap()
    }

    pub fn ambiguous(&self) -> EquationSystem {
        permspec::system::ambiguous_system(&self.basis(), &SimpleSet::new(self.simples.clone()).unwrap()).unwrap()
    }
}

pub fn fixtures() -> Vec<Fixture> {
    let f = |name, b: &[&str], s: &[&str]| Fixture { name, basis: perms(b), simples: perms(s) };
    vec![
        f("Av(21)", &["21"], &[]),
        f("Av(132)", &["132"], &[]),
        f("Av(2413,3142)", &["2413", "3142"], &[]),
        f("Av(2143,2413,3142)", &["2143", "2413", "3142"], &[]),
        f("Av(1243,2413,41352,531642)", &["1243", "2413", "41352", "531642"], &["3142"]),
        f("Av(1243,2341,2413,41352,531642)", &["1243", "2341", "2413", "41352", "531642"], &["3142"]),
    ]
}

pub fn big_fixture() -> Fixture {
    fixtures().pop().unwrap()
}

/// Equations as a set of strings with terms sorted, to compare systems up
/// to equation and term order.
pub fn normalized(eqs: &[Equation]) -> BTreeSet<String> {
    eqs.iter().map(|e| e.sorted().to_string()).collect()
}

pub fn fixture_equations(name: &str) -> Vec<Equation> {
    permspec::io::parse_system_text(&data(name)).unwrap()
}

/// Every permutation of size `1..=nmax` with precomputed closure
/// membership, decomposition and containment of a fixed pool of patterns.
/// Containment is computed by one-point deletions, independently of the
/// backtracking search of the library.
pub struct Universe {
    pub nmax: usize,
    pub perms: Vec<Perm>,
    pub index: HashMap<Perm, usize>,
    pub closure: Vec<bool>,
    plus_dec: Vec<bool>,
    minus_dec: Vec<bool>,
    decomp: Vec<Option<(Root, Vec<usize>)>>,
    masks: Vec<u64>,
    bit: HashMap<Perm, u64>,
}

impl Universe {
    pub fn new(nmax: usize, simples: &[Perm], pool: impl IntoIterator<Item = Perm>) -> Universe {
        let pool: BTreeSet<Perm> = pool.into_iter().filter(|q| !q.is_empty()).collect();
        assert!(pool.len() <= 64, "pattern pool too large");
        let bit: HashMap<Perm, u64> = pool.into_iter().enumerate().map(|(i, q)| (q, 1u64 << i)).collect();
        let mut perms = Vec::new();
        for n in 1..=nmax {
            perms.extend(all_perms(n));
        }
        let index: HashMap<Perm, usize> = perms.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let mut masks = vec![0u64; perms.len()];
        for (i, s) in perms.iter().enumerate() {
            let mut m = bit.get(s).copied().unwrap_or(0);
            if s.len() >= 2 {
                for k in 0..s.len() {
                    let mut v = s.values().to_vec();
                    let gone = v.remove(k);
                    let v: Vec<u32> = v.into_iter().map(|x| if x > gone { x - 1 } else { x }).collect();
                    m |= masks[index[&Perm::new(v).unwrap()]];
                }
            }
            masks[i] = m;
        }
        let closure = perms.iter().map(|s| in_closure(s, simples).unwrap()).collect();
        let decomp = perms
            .iter()
            .map(|s| {
                (s.len() >= 2).then(|| {
                    let (root, kids) = decompose(s).unwrap();
                    (root, kids.iter().map(|k| index[k]).collect())
                })
            })
            .collect();
        Universe {
            nmax,
            plus_dec: perms.iter().map(is_plus_decomposable).collect(),
            minus_dec: perms.iter().map(is_minus_decomposable).collect(),
            perms,
            index,
            closure,
            decomp,
            masks,
            bit,
        }
    }

    fn mask_of(&self, qs: &[Perm]) -> u64 {
        qs.iter()
            .map(|q| *self.bit.get(q).unwrap_or_else(|| panic!("pattern {} not in the pool", q.compact())))
            .fold(0, |a, b| a | b)
    }

    /// Indices of the permutations of size `n`.
    pub fn of_size(&self, n: usize) -> std::ops::Range<usize> {
        let start: usize = (1..n).map(|k| (1..=k).product::<usize>()).sum();
        start..start + (1..=n).product::<usize>()
    }

    pub fn contains(&self, i: usize, q: &Perm) -> bool {
        self.masks[i] & self.mask_of(std::slice::from_ref(q)) != 0
    }

    /// Closure membership and root condition only.
    pub fn in_delta(&self, i: usize, delta: Delta) -> bool {
        self.closure[i]
            && match delta {
                Delta::Plain => true,
                Delta::Plus => !self.plus_dec[i],
                Delta::Minus => !self.minus_dec[i],
            }
    }

    pub fn member(&self, i: usize, r: &Restriction) -> bool {
        let m = self.masks[i];
        self.in_delta(i, r.delta) && m & self.mask_of(&r.avoid) == 0 && {
            let a = self.mask_of(&r.contain);
            m & a == a
        }
    }

    /// Membership in the set `root[Ĉ^δ, ...]` of all closure elements with
    /// that root.
    pub fn has_root(&self, i: usize, root: &Root) -> bool {
        self.closure[i] && matches!(&self.decomp[i], Some((r, _)) if r == root)
    }

    pub fn member_term(&self, i: usize, t: &Term) -> bool {
        match &self.decomp[i] {
            Some((root, kids)) if root == &t.root && self.closure[i] => {
                kids.iter().zip(&t.children).all(|(&k, r)| self.member(k, r))
            }
            _ => false,
        }
    }

    pub fn count(&self, r: &Restriction, n: usize) -> usize {
        self.of_size(n).filter(|&i| self.member(i, r)).count()
    }
}

/// Every pattern mentioned in a system.
pub fn patterns_of(spec: &EquationSystem) -> BTreeSet<Perm> {
    let mut out = BTreeSet::new();
    let mut add = |r: &Restriction| {
        out.extend(r.avoid.iter().cloned());
        out.extend(r.contain.iter().cloned());
    };
    add(&spec.top);
    for e in &spec.equations {
        add(&e.lhs);
        for t in &e.terms {
            t.children.iter().for_each(&mut add);
        }
    }
    out
}

/// Expands a system as a grammar: `gen[i][n]` is the set of size `n`
/// objects produced by equation `i`, and `mult[i][n]` the number of
/// derivations.
pub struct Expansion {
    pub sets: Vec<Vec<BTreeSet<Perm>>>,
    pub derivations: Vec<Vec<usize>>,
}

pub fn expand(spec: &EquationSystem, nmax: usize) -> Expansion {
    let idx = spec.index();
    let k = spec.len();
    let mut sets = vec![vec![BTreeSet::new(); nmax + 1]; k];
    let mut derivations = vec![vec![0usize; nmax + 1]; k];
    for n in 1..=nmax {
        for (i, e) in spec.equations.iter().enumerate() {
            let mut set = BTreeSet::new();
            let mut count = 0;
            if e.has_one && n == 1 {
                set.insert(Perm::one());
                count += 1;
            }
            for t in &e.terms {
                let kids: Vec<usize> = t.children.iter().map(|c| idx[c]).collect();
                let skeleton = t.root.skeleton();
                let mut chosen = Vec::new();
                fill(&sets, &kids, n, &skeleton, &mut chosen, &mut |sigma| {
                    count += 1;
                    set.insert(sigma);
                });
            }
            sets[i][n] = set;
            derivations[i][n] = count;
        }
    }
    Expansion { sets, derivations }
}

fn fill(
    sets: &[Vec<BTreeSet<Perm>>],
    kids: &[usize],
    rest: usize,
    skeleton: &Perm,
    chosen: &mut Vec<Perm>,
    emit: &mut dyn FnMut(Perm),
) {
    let j = chosen.len();
    if j == kids.len() {
        if rest == 0 {
            emit(substitute(skeleton, chosen).unwrap());
        }
        return;
    }
    let left = kids.len() - j - 1;
    for m in 1..=rest.saturating_sub(left) {
        for c in &sets[kids[j]][m] {
            chosen.push(c.clone());
            fill(sets, kids, rest - m, skeleton, chosen, emit);
            chosen.pop();
        }
    }
}

/// `Av(B)` of size `n`, by filtering the universe.
pub fn class_members(u: &Universe, basis: &[Perm], n: usize) -> BTreeSet<Perm> {
    u.of_size(n)
        .filter(|&i| basis.iter().all(|b| !u.contains(i, b)))
        .map(|i| u.perms[i].clone())
        .collect()
}

/// Outcome of one named check, for reuse by the acceptance summary.
pub type Check = Result<(), String>;

pub fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The rational probability of drawing each class member of size `n` is
/// exactly `1/c_n`, and nothing outside the class can be drawn.
pub fn exact_probabilities(f: &Fixture, sizes: std::ops::RangeInclusive<usize>) -> Check {
    use num_rational::BigRational;
    use num_traits::{One, Zero};
    let spec = f.spec();
    let tables = permspec::sampler::build_tables(&spec, *sizes.end()).map_err(|e| e.to_string())?;
    for n in sizes {
        let members = permspec::oracle::enumerate_class(&f.basis, n);
        let c = BigRational::from_integer(members.len().into());
        let mut total = BigRational::zero();
        for s in all_perms(n) {
            let q = permspec::sampler::derivation_probability(&tables, 0, &s);
            let want = if members.binary_search(&s).is_ok() { BigRational::one() / &c } else { BigRational::zero() };
            ensure(q == want, || format!("{}: {} drawn with probability {q}, want {want}", f.name, s.compact()))?;
            total += q;
        }
        ensure(total.is_one(), || format!("{}: probabilities at size {n} sum to {total}", f.name))?;
    }
    Ok(())
}

/// Chi-square p-value of `samples` draws at size `n` against the uniform
/// law on `Av(B)_n`, and whether every sample avoided the basis.
pub fn chi_square(f: &Fixture, n: usize, samples: usize, seed: u64) -> Result<(f64, bool), String> {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let tables = permspec::sampler::build_tables(&f.spec(), n).map_err(|e| e.to_string())?;
    let members = permspec::oracle::enumerate_class(&f.basis, n);
    let draws = permspec::sampler::sample_batch(&tables, n, samples, seed, rand_chacha::ChaCha8Rng::seed_from_u64)
        .map_err(|e| e.to_string())?;
    let mut hist = vec![0u64; members.len()];
    let mut valid = true;
    for s in &draws {
        match members.binary_search(s) {
            Ok(k) => hist[k] += 1,
            Err(_) => valid = false,
        }
        valid &= s.len() == n && f.basis.iter().all(|b| s.avoids(b));
    }
    let expected = samples as f64 / members.len() as f64;
    let stat: f64 = hist.iter().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    let dist = ChiSquared::new((members.len() - 1) as f64).map_err(|e| e.to_string())?;
    Ok((1.0 - dist.cdf(stat), valid))
}

use rand::SeedableRng;
