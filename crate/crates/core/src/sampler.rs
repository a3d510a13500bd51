//! Uniform random sampling by the recursive method.
//!
//! Every choice is made with exact integer weights: the term at size `n` is
//! drawn proportionally to its number of objects of size `n`, then child
//! sizes are drawn left to right, child `j` getting size `m` with weight
//! `F_j[m] · S_{j+1}[rest − m]`, where `S_{j+1}` counts tuples of the
//! remaining children by total size.

use num_bigint::{BigUint, RandBigInt};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::RngCore;

use crate::enumeration::{to_gf_system, GfSystem};
use crate::error::{Error, Result};
use crate::perm::{decompose, Perm};
use crate::system::EquationSystem;

/// Source of uniform integers below a bound.
pub trait UniformSource {
    fn below(&mut self, bound: &BigUint) -> BigUint;
}

impl<R: RngCore> UniformSource for R {
    fn below(&mut self, bound: &BigUint) -> BigUint {
        self.gen_biguint_below(bound)
    }
}

#[derive(Clone, Debug)]
pub struct Tables {
    pub gf: GfSystem,
    pub order: usize,
    /// `f[i][n]`: objects of size `n` in equation `i`.
    pub f: Vec<Vec<BigUint>>,
    /// `suffix[i][t][j][n]`: tuples for children `j..` of term `t` of
    /// equation `i` with total size `n`. The last row is the empty tuple.
    pub suffix: Vec<Vec<Vec<Vec<BigUint>>>>,
    roots: Vec<Vec<crate::perm::Root>>,
}

impl Tables {
    pub fn count(&self, eq: usize, n: usize) -> &BigUint {
        &self.f[eq][n]
    }

    pub fn term_count(&self, eq: usize, term: usize, n: usize) -> &BigUint {
        &self.suffix[eq][term][0][n]
    }

    pub fn top(&self) -> &[BigUint] {
        &self.f[0]
    }
}

/// Builds counts and suffix tables order by order up to `order`.
pub fn build_tables(spec: &EquationSystem, order: usize) -> Result<Tables> {
    if let Some(e) = spec.equations.iter().find(|e| !e.disjoint) {
        return Err(Error::NotDisjoint(e.lhs.to_string()));
    }
    let gf = to_gf_system(spec)?;
    let zero_row = || vec![BigUint::zero(); order + 1];
    let mut f = vec![zero_row(); gf.len()];
    let mut suffix: Vec<Vec<Vec<Vec<BigUint>>>> = gf
        .products
        .iter()
        .map(|prods| {
            prods
                .iter()
                .map(|kids| {
                    let mut rows = vec![zero_row(); kids.len() + 1];
                    rows[kids.len()][0] = BigUint::one();
                    rows
                })
                .collect()
        })
        .collect();
    for n in 1..=order {
        // Row 0 at size n only reads rows >= 1 below n.
        for (i, prods) in gf.products.iter().enumerate() {
            for (t, kids) in prods.iter().enumerate() {
                let rows = &mut suffix[i][t];
                rows[0][n] = conv_at(&f[kids[0]], &rows[1], n);
            }
        }
        for i in 0..gf.len() {
            let mut total = if gf.has_one[i] && n == 1 { BigUint::one() } else { BigUint::zero() };
            for rows in &suffix[i] {
                total += &rows[0][n];
            }
            f[i][n] = total;
        }
        for (i, prods) in gf.products.iter().enumerate() {
            for (t, kids) in prods.iter().enumerate() {
                let rows = &mut suffix[i][t];
                for j in (1..kids.len()).rev() {
                    let v = conv_at(&f[kids[j]], &rows[j + 1], n);
                    rows[j][n] = v;
                }
            }
        }
    }
    let roots = spec.equations.iter().map(|e| e.terms.iter().map(|t| t.root.clone()).collect()).collect();
    Ok(Tables { gf, order, f, suffix, roots })
}

// Σ_{m>=1} a[m] b[n−m]
fn conv_at(a: &[BigUint], b: &[BigUint], n: usize) -> BigUint {
    let mut s = BigUint::zero();
    for m in 1..=n {
        if !a[m].is_zero() && !b[n - m].is_zero() {
            s += &a[m] * &b[n - m];
        }
    }
    s
}

fn check_size(tables: &Tables, eq: usize, n: usize) -> Result<()> {
    if n > tables.order {
        return Err(Error::BeyondTables { n, bound: tables.order });
    }
    if tables.f[eq][n].is_zero() {
        return Err(Error::NoObject { n, what: tables.gf.names[eq].clone() });
    }
    Ok(())
}

/// Uniform permutation of size `n` from equation `eq` (0 is the class).
pub fn sample_from(tables: &Tables, eq: usize, n: usize, rng: &mut dyn UniformSource) -> Result<Perm> {
    check_size(tables, eq, n)?;
    let mut out = Vec::with_capacity(n);
    draw(tables, eq, n, 0, rng, &mut out);
    Ok(Perm::from_vec_unchecked(out))
}

pub fn sample(tables: &Tables, n: usize, rng: &mut dyn UniformSource) -> Result<Perm> {
    sample_from(tables, 0, n, rng)
}

// Appends an object of size n of equation i, shifted by `base`, to `out`.
fn draw(tables: &Tables, i: usize, n: usize, base: u32, rng: &mut dyn UniformSource, out: &mut Vec<u32>) {
    let mut r = rng.below(&tables.f[i][n]);
    if tables.gf.has_one[i] && n == 1 {
        if r.is_zero() {
            out.push(base + 1);
            return;
        }
        r -= 1u32;
    }
    let mut term = 0;
    loop {
        let w = &tables.suffix[i][term][0][n];
        if &r < w {
            break;
        }
        r -= w;
        term += 1;
    }
    let kids = &tables.gf.products[i][term];
    let rows = &tables.suffix[i][term];
    let mut sizes = Vec::with_capacity(kids.len());
    let mut rest = n;
    for j in 0..kids.len() - 1 {
        let total = &rows[j][rest];
        let mut r = rng.below(total);
        let mut m = 1;
        loop {
            let w = &tables.f[kids[j]][m] * &rows[j + 1][rest - m];
            if r < w {
                break;
            }
            r -= w;
            m += 1;
        }
        sizes.push(m);
        rest -= m;
    }
    sizes.push(rest);
    let skeleton = tables.roots[i][term].skeleton();
    // value offset of each child: sizes of children with smaller skeleton value
    let mut by_value = vec![0u32; kids.len() + 1];
    for (pos, &v) in skeleton.values().iter().enumerate() {
        by_value[v as usize] = sizes[pos] as u32;
    }
    let mut offset = vec![0u32; kids.len() + 1];
    let mut acc = 0;
    for v in 1..=kids.len() {
        offset[v] = acc;
        acc += by_value[v];
    }
    for (pos, &v) in skeleton.values().iter().enumerate() {
        draw(tables, kids[pos], sizes[pos], base + offset[v as usize], rng, out);
    }
}

/// Exact probability that [`sample_from`] returns `sigma`, summed over all
/// derivations of `sigma`.
pub fn derivation_probability(tables: &Tables, eq: usize, sigma: &Perm) -> BigRational {
    let n = sigma.len();
    if n == 0 || n > tables.order || tables.f[eq][n].is_zero() {
        return BigRational::zero();
    }
    let total = BigRational::from_integer(tables.f[eq][n].clone().into());
    let mut p = BigRational::zero();
    if n == 1 {
        if tables.gf.has_one[eq] {
            p += BigRational::one() / &total;
        }
        return p;
    }
    let (root, children) = decompose(sigma).expect("size >= 2");
    for (t, kids) in tables.gf.products[eq].iter().enumerate() {
        if tables.roots[eq][t] != root {
            continue;
        }
        let rows = &tables.suffix[eq][t];
        let int = |x: &BigUint| BigRational::from_integer(x.clone().into());
        let mut q = int(&rows[0][n]) / &total;
        let mut rest = n;
        for j in 0..kids.len() - 1 {
            if q.is_zero() {
                break;
            }
            let m = children[j].len();
            q *= int(&(&tables.f[kids[j]][m] * &rows[j + 1][rest - m])) / int(&rows[j][rest]);
            rest -= m;
        }
        for (j, c) in children.iter().enumerate() {
            if q.is_zero() {
                break;
            }
            q *= derivation_probability(tables, kids[j], c);
        }
        p += q;
    }
    p
}

/// `samples` permutations of size `n`; sample `k` uses the generator
/// `make_rng(seed + k)`, so results do not depend on scheduling.
pub fn sample_batch<R, F>(tables: &Tables, n: usize, samples: usize, seed: u64, make_rng: F) -> Result<Vec<Perm>>
where
    R: RngCore,
    F: Fn(u64) -> R + Sync + Send,
{
    check_size(tables, 0, n)?;
    let idx: Vec<u64> = (0..samples as u64).collect();
    crate::par::map_slice(&idx, |&k| sample(tables, n, &mut make_rng(seed.wrapping_add(k)))).into_iter().collect()
}

pub fn sample_batch_seq<R, F>(tables: &Tables, n: usize, samples: usize, seed: u64, make_rng: F) -> Result<Vec<Perm>>
where
    R: RngCore,
    F: Fn(u64) -> R,
{
    check_size(tables, 0, n)?;
    (0..samples as u64).map(|k| sample(tables, n, &mut make_rng(seed.wrapping_add(k)))).collect()
}

/// `h[x][y]` counts the samples with `σ(x+1) = y+1`.
pub fn heatmap(perms: &[Perm], n: usize) -> Vec<Vec<u64>> {
    let mut h = vec![vec![0u64; n]; n];
    for s in perms {
        assert_eq!(s.len(), n, "sample of the wrong size");
        for (x, &y) in s.values().iter().enumerate() {
            h[x][y as usize - 1] += 1;
        }
    }
    h
}
