//! Counting: the generating function system of a specification and its
//! coefficients by fixed point iteration on truncated series.

use std::collections::HashMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::perm::Perm;
use crate::restriction::{Delta, Equation, Restriction};
use crate::system::{closure_equation, EquationSystem};

/// `F_i(z) = [has_one] z + Σ_terms Π_children F_child(z)`, one line per
/// equation of the specification, in the same order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GfSystem {
    pub names: Vec<String>,
    pub has_one: Vec<bool>,
    pub products: Vec<Vec<Vec<usize>>>,
}

impl GfSystem {
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

impl fmt::Display for GfSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            let mut parts = Vec::new();
            if self.has_one[i] {
                parts.push("z".to_string());
            }
            for prod in &self.products[i] {
                let fs: Vec<String> = prod.iter().map(|c| format!("F{c}")).collect();
                parts.push(fs.join("*"));
            }
            if parts.is_empty() {
                parts.push("0".into());
            }
            writeln!(f, "F{i} = {}    # {}", parts.join(" + "), self.names[i])?;
        }
        Ok(())
    }
}

pub fn to_gf_system(spec: &EquationSystem) -> Result<GfSystem> {
    let idx: HashMap<&Restriction, usize> = spec.index();
    let mut products = Vec::with_capacity(spec.len());
    for e in &spec.equations {
        let mut prods = Vec::with_capacity(e.terms.len());
        for t in &e.terms {
            let kids = t
                .children
                .iter()
                .map(|c| {
                    idx.get(c)
                        .copied()
                        .ok_or_else(|| Error::InvalidInput(format!("{c} is used in {} but has no equation", e.lhs)))
                })
                .collect::<Result<Vec<_>>>()?;
            prods.push(kids);
        }
        products.push(prods);
    }
    Ok(GfSystem {
        names: spec.equations.iter().map(|e| e.lhs.to_string()).collect(),
        has_one: spec.equations.iter().map(|e| e.has_one).collect(),
        products,
    })
}

/// Coefficients `c[0..=order]` for every equation of a specification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub order: usize,
    pub names: Vec<String>,
    pub counts: Vec<Vec<BigUint>>,
}

impl CountTable {
    /// Counts of the first equation, the class itself.
    pub fn top(&self) -> &[BigUint] {
        &self.counts[0]
    }
}

fn require_disjoint(spec: &EquationSystem) -> Result<()> {
    match spec.equations.iter().find(|e| !e.disjoint) {
        Some(e) => Err(Error::NotDisjoint(e.lhs.to_string())),
        None => Ok(()),
    }
}

/// Truncated product of series with zero constant term.
fn mul_trunc(a: &[BigUint], b: &[BigUint], order: usize) -> Vec<BigUint> {
    let mut out = vec![BigUint::zero(); order + 1];
    for (i, x) in a.iter().enumerate().skip(1) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().skip(1) {
            if i + j > order {
                break;
            }
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    out
}

fn pass(gf: &GfSystem, cur: &[Vec<BigUint>], order: usize) -> Vec<Vec<BigUint>> {
    (0..gf.len())
        .map(|i| {
            let mut s = vec![BigUint::zero(); order + 1];
            if gf.has_one[i] && order >= 1 {
                s[1] = BigUint::one();
            }
            for prod in &gf.products[i] {
                let mut acc = cur[prod[0]].clone();
                for &c in &prod[1..] {
                    acc = mul_trunc(&acc, &cur[c], order);
                }
                for (x, y) in s.iter_mut().zip(acc) {
                    *x += y;
                }
            }
            s
        })
        .collect()
}

/// Fixed point iteration from the zero series. After pass `t` the
/// coefficients of order at most `t` are final, since every production is
/// either the atom or a product of at least two non-empty objects.
pub fn coefficients(spec: &EquationSystem, order: usize) -> Result<CountTable> {
    require_disjoint(spec)?;
    let gf = to_gf_system(spec)?;
    Ok(CountTable {
        order,
        names: gf.names.clone(),
        counts: fixed_point(&gf, order),
    })
}

pub(crate) fn fixed_point(gf: &GfSystem, order: usize) -> Vec<Vec<BigUint>> {
    let mut cur = vec![vec![BigUint::zero(); order + 1]; gf.len()];
    for t in 1..=order {
        let next = pass(gf, &cur, order);
        for (a, b) in cur.iter().zip(&next) {
            assert!(a[..t] == b[..t], "fixed point iteration is not monotone at pass {t}");
        }
        cur = next;
    }
    cur
}

/// The three equations for `Ĉ`, `Ĉ⁺` and `Ĉ⁻` of a substitution closed
/// class.
pub fn substitution_closed_spec(simples: &[Perm]) -> EquationSystem {
    let equations: Vec<Equation> = [Delta::Plain, Delta::Plus, Delta::Minus]
        .into_iter()
        .map(|d| closure_equation(d, simples))
        .collect();
    EquationSystem {
        basis: Vec::new(),
        simples: simples.to_vec(),
        top: Restriction::full(Delta::Plain),
        equations,
    }
}

/// `C² + (S(C) − 1 + z)C + S(C) + z` through order `order`, where `C` is
/// computed from the closure specification and `S(x) = Σ_{π∈S} x^|π|`.
pub fn quadratic_residual(simples: &[Perm], order: usize) -> Result<Vec<BigInt>> {
    let spec = substitution_closed_spec(simples);
    let table = coefficients(&spec, order)?;
    let c: Vec<BigInt> = table.top().iter().map(|x| BigInt::from(x.clone())).collect();
    let mul = |a: &[BigInt], b: &[BigInt]| {
        let mut out = vec![BigInt::zero(); order + 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                if i + j <= order {
                    out[i + j] += x * y;
                }
            }
        }
        out
    };
    let mut s = vec![BigInt::zero(); order + 1];
    for pi in simples {
        let mut pw = c.clone();
        for _ in 1..pi.len() {
            pw = mul(&pw, &c);
        }
        for (x, y) in s.iter_mut().zip(pw) {
            *x += y;
        }
    }
    // (S − 1 + z)
    let mut lin = s.clone();
    lin[0] -= 1;
    if order >= 1 {
        lin[1] += 1;
    }
    let mut r = mul(&c, &c);
    for (x, y) in r.iter_mut().zip(mul(&lin, &c)) {
        *x += y;
    }
    for (x, y) in r.iter_mut().zip(&s) {
        *x += y;
    }
    if order >= 1 {
        r[1] += 1;
    }
    Ok(r)
}

/// Same system read as possibly ambiguous: counts derivations rather than
/// objects. Useful to measure how much an ambiguous system overcounts.
pub fn derivation_counts(spec: &EquationSystem, order: usize) -> Result<CountTable> {
    let gf = to_gf_system(spec)?;
    Ok(CountTable { order, names: gf.names.clone(), counts: fixed_point(&gf, order) })
}
