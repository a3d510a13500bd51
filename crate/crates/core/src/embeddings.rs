//! Block decompositions of a pattern and its embeddings into a root.

use crate::error::{Error, Result};
use crate::perm::{intervals_from, normalize_unchecked, occurrences, Interval, Perm};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockDecomposition {
    pub parts: Vec<Interval>,
}

impl BlockDecomposition {
    /// Pattern formed by one representative value per part.
    pub fn skeleton(&self, gamma: &Perm) -> Perm {
        let reps: Vec<u32> = self.parts.iter().map(|iv| gamma.at(iv.start)).collect();
        normalize_unchecked(&reps)
    }
}

/// All ways to cut `gamma` into consecutive intervals, in lexicographic
/// order of the cut points.
pub fn block_decompositions(gamma: &Perm) -> Result<Vec<BlockDecomposition>> {
    if gamma.is_empty() {
        return Err(Error::InvalidInput("ε has no block decomposition".into()));
    }
    let n = gamma.len();
    let from: Vec<Vec<Interval>> = (1..=n).map(|i| intervals_from(gamma, i)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut cur = Vec::new();
    chain(&from, 1, n, &mut cur, &mut out);
    Ok(out)
}

fn chain(
    from: &[Vec<Interval>],
    i: usize,
    n: usize,
    cur: &mut Vec<Interval>,
    out: &mut Vec<BlockDecomposition>,
) {
    if i > n {
        out.push(BlockDecomposition { parts: cur.clone() });
        return;
    }
    for iv in &from[i - 1] {
        cur.push(*iv);
        chain(from, iv.end + 1, n, cur, out);
        cur.pop();
    }
}

/// An embedding of `gamma` into a root `pi`: each position of `pi` gets an
/// interval of `gamma` or nothing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Embedding {
    pub cells: Vec<Option<Interval>>,
    /// Normalized block per position, ε where the cell is empty.
    pub blocks: Vec<Perm>,
}

impl Embedding {
    fn new(gamma: &Perm, cells: Vec<Option<Interval>>) -> Embedding {
        let blocks = cells
            .iter()
            .map(|c| c.map_or_else(Perm::empty, |iv| gamma.block(iv.start, iv.end)))
            .collect();
        Embedding { cells, blocks }
    }

    /// Positions whose block has size at least 2.
    pub fn nontrivial_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks
            .iter()
            .enumerate()
            .filter(|(_, b)| b.len() >= 2)
            .map(|(m, _)| m)
    }

    pub fn check(&self, gamma: &Perm, pi: &Perm) -> bool {
        if self.cells.len() != pi.len() {
            return false;
        }
        let mut next = 1;
        for iv in self.cells.iter().flatten() {
            if iv.start != next {
                return false;
            }
            next = iv.end + 1;
        }
        next == gamma.len() + 1
            && crate::perm::generalized_substitute(pi, &self.blocks).ok().as_ref() == Some(gamma)
    }
}

/// Embeddings of `gamma` into `pi` that cut `gamma` along `d`.
pub fn embeddings_for(d: &BlockDecomposition, gamma: &Perm, pi: &Perm) -> Vec<Embedding> {
    let m = d.parts.len();
    if m > pi.len() {
        return Vec::new();
    }
    let skeleton = d.skeleton(gamma);
    occurrences(pi, &skeleton)
        .into_iter()
        .map(|occ| {
            let mut cells = vec![None; pi.len()];
            for (k, &pos) in occ.iter().enumerate() {
                cells[pos - 1] = Some(d.parts[k]);
            }
            let e = Embedding::new(gamma, cells);
            debug_assert!(e.check(gamma, pi));
            e
        })
        .collect()
}

/// Every embedding of `gamma` into `pi`, sorted and without duplicates.
pub fn all_embeddings(gamma: &Perm, pi: &Perm) -> Result<Vec<Embedding>> {
    if gamma.is_empty() || pi.is_empty() {
        return Err(Error::InvalidInput("embeddings need non-empty permutations".into()));
    }
    let mut out: Vec<Embedding> = block_decompositions(gamma)?
        .iter()
        .flat_map(|d| embeddings_for(d, gamma, pi))
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}
