//! Permutations in one-line notation, the pattern order, intervals and
//! substitution decomposition.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A permutation of `1..=n` stored in one-line notation. The empty
/// permutation is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Perm(Vec<u32>);

impl Perm {
    pub fn new(values: Vec<u32>) -> Result<Perm> {
        let n = values.len();
        let mut seen = vec![false; n + 1];
        for &v in &values {
            let v = v as usize;
            if v == 0 || v > n || seen[v] {
                return Err(Error::InvalidInput(format!(
                    "{values:?} is not a permutation of 1..{n}"
                )));
            }
            seen[v] = true;
        }
        Ok(Perm(values))
    }

    /// Caller guarantees `values` is a permutation.
    pub(crate) fn from_vec_unchecked(values: Vec<u32>) -> Perm {
        debug_assert!(Perm::new(values.clone()).is_ok());
        Perm(values)
    }

    pub fn empty() -> Perm {
        Perm(Vec::new())
    }

    pub fn identity(n: usize) -> Perm {
        Perm((1..=n as u32).collect())
    }

    pub fn one() -> Perm {
        Perm(vec![1])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn into_values(self) -> Vec<u32> {
        self.0
    }

    /// Value at 1-based position `i`.
    pub fn at(&self, i: usize) -> u32 {
        self.0[i - 1]
    }

    /// Normalized pattern on the 1-based inclusive index range `(i, j)`.
    pub fn block(&self, i: usize, j: usize) -> Perm {
        normalize_unchecked(&self.0[i - 1..j])
    }

    /// Compact text form: digits run together when every value is below
    /// ten, otherwise values joined by dots. ε is written `e`.
    pub fn compact(&self) -> String {
        if self.0.is_empty() {
            return "e".to_string();
        }
        if self.0.len() <= 9 {
            self.0.iter().map(|v| v.to_string()).collect()
        } else {
            let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
            parts.join(".")
        }
    }

    pub fn contains(&self, pattern: &Perm) -> bool {
        contains(self, pattern)
    }

    pub fn avoids(&self, pattern: &Perm) -> bool {
        !contains(self, pattern)
    }
}

/// Size first, then lexicographic on the one-line form.
impl Ord for Perm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Perm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "ε");
        }
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm({})", self.compact())
    }
}

/// Accepts space separated values ("3 1 4 2"), dot separated values
/// ("10.1.2..."), the compact digit form ("3142") when n <= 9, and
/// "e" or "ε" for the empty permutation.
impl FromStr for Perm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Perm> {
        let s = s.trim();
        if s.is_empty() || s == "e" || s == "ε" {
            return Ok(Perm::empty());
        }
        let parse = |tok: &str| {
            tok.parse::<u32>()
                .map_err(|_| Error::Parse(format!("bad permutation entry {tok:?} in {s:?}")))
        };
        let values: Vec<u32> = if s.contains(char::is_whitespace) || s.contains(',') {
            s.split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(parse)
                .collect::<Result<_>>()?
        } else if s.contains('.') {
            s.split('.').map(parse).collect::<Result<_>>()?
        } else {
            if s.len() > 9 {
                return Err(Error::Parse(format!(
                    "compact form {s:?} is ambiguous above size 9; separate values with spaces"
                )));
            }
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?} in {s:?}")))
                })
                .collect::<Result<_>>()?
        };
        Perm::new(values)
    }
}

/// Shorthand for tests and fixtures. Panics on malformed input.
pub fn p(s: &str) -> Perm {
    s.parse().unwrap_or_else(|e| panic!("{e}"))
}

pub fn normalize(s: &[u32]) -> Result<Perm> {
    let mut sorted = s.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidInput(format!("duplicate entries in {s:?}")));
    }
    Ok(normalize_unchecked(s))
}

pub(crate) fn normalize_unchecked(s: &[u32]) -> Perm {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_unstable_by_key(|&i| s[i]);
    let mut out = vec![0u32; s.len()];
    for (rank, &i) in idx.iter().enumerate() {
        out[i] = rank as u32 + 1;
    }
    Perm(out)
}

// For each pattern position t, the earlier position holding the largest
// smaller value and the one holding the smallest larger value.
fn neighbours(pattern: &[u32]) -> Vec<(Option<usize>, Option<usize>)> {
    (0..pattern.len())
        .map(|t| {
            let mut below: Option<usize> = None;
            let mut above: Option<usize> = None;
            for s in 0..t {
                if pattern[s] < pattern[t] {
                    if below.is_none_or(|b| pattern[s] > pattern[b]) {
                        below = Some(s);
                    }
                } else if above.is_none_or(|a| pattern[s] < pattern[a]) {
                    above = Some(s);
                }
            }
            (below, above)
        })
        .collect()
}

struct Matcher<'a> {
    text: &'a [u32],
    pattern: &'a [u32],
    nb: Vec<(Option<usize>, Option<usize>)>,
    chosen: Vec<usize>,
}

impl Matcher<'_> {
    // Visits every occurrence; the callback returns false to stop.
    fn run(&mut self, t: usize, start: usize, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        let k = self.pattern.len();
        if t == k {
            return visit(&self.chosen);
        }
        let (below, above) = self.nb[t];
        let lo = below.map(|b| self.text[self.chosen[b]]);
        let hi = above.map(|a| self.text[self.chosen[a]]);
        let remaining = k - t - 1;
        for i in start..self.text.len() - remaining {
            let v = self.text[i];
            if lo.is_some_and(|lo| v <= lo) || hi.is_some_and(|hi| v >= hi) {
                continue;
            }
            self.chosen.push(i);
            let go_on = self.run(t + 1, i + 1, visit);
            self.chosen.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
}

fn for_each_occurrence(sigma: &Perm, pi: &Perm, visit: &mut dyn FnMut(&[usize]) -> bool) {
    if pi.len() > sigma.len() {
        return;
    }
    let mut m = Matcher {
        text: &sigma.0,
        pattern: &pi.0,
        nb: neighbours(&pi.0),
        chosen: Vec::with_capacity(pi.len()),
    };
    m.run(0, 0, visit);
}

/// All increasing 1-based index tuples `I` with `sigma_I` order isomorphic
/// to `pi`, in lexicographic order.
pub fn occurrences(sigma: &Perm, pi: &Perm) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_occurrence(sigma, pi, &mut |idx| {
        out.push(idx.iter().map(|i| i + 1).collect());
        true
    });
    out
}

/// Whether `pattern ≼ sigma`.
pub fn contains(sigma: &Perm, pattern: &Perm) -> bool {
    if pattern.len() > sigma.len() {
        return false;
    }
    if pattern.len() <= 1 {
        return true;
    }
    if pattern.len() == sigma.len() {
        return sigma == pattern;
    }
    let mut found = false;
    for_each_occurrence(sigma, pattern, &mut |_| {
        found = true;
        false
    });
    found
}

/// A 1-based inclusive index range whose values are consecutive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub start: usize,
    pub end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Interval {
        Interval { start, end }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Intervals of `gamma` starting at 1-based index `i`, by a single sweep.
pub fn intervals_from(gamma: &Perm, i: usize) -> Result<Vec<Interval>> {
    let n = gamma.len();
    if i == 0 || i > n {
        return Err(Error::InvalidInput(format!(
            "index {i} out of range for a permutation of size {n}"
        )));
    }
    let mut out = Vec::new();
    let (mut lo, mut hi) = (u32::MAX, 0u32);
    for j in i..=n {
        let v = gamma.at(j);
        lo = lo.min(v);
        hi = hi.max(v);
        if (hi - lo) as usize == j - i {
            out.push(Interval::new(i, j));
        }
    }
    Ok(out)
}

pub fn is_interval(pi: &Perm, iv: Interval) -> bool {
    let w = &pi.0[iv.start - 1..iv.end];
    let lo = *w.iter().min().unwrap();
    let hi = *w.iter().max().unwrap();
    (hi - lo) as usize == w.len() - 1
}

/// Simple means size at least 4 with only trivial intervals, so 1, 12 and
/// 21 are not simple.
pub fn is_simple(pi: &Perm) -> bool {
    let n = pi.len();
    if n < 4 {
        return false;
    }
    for i in 1..=n {
        let (mut lo, mut hi) = (u32::MAX, 0u32);
        for j in i..=n {
            let v = pi.at(j);
            lo = lo.min(v);
            hi = hi.max(v);
            let len = j - i + 1;
            if len >= 2 && len < n && (hi - lo) as usize == j - i {
                return false;
            }
        }
    }
    true
}

/// The inflation `sigma[blocks...]`. Blocks must be non-empty.
pub fn substitute(sigma: &Perm, blocks: &[Perm]) -> Result<Perm> {
    if blocks.len() != sigma.len() {
        return Err(Error::InvalidInput(format!(
            "{} blocks given for a skeleton of size {}",
            blocks.len(),
            sigma.len()
        )));
    }
    if blocks.iter().any(Perm::is_empty) {
        return Err(Error::InvalidInput(
            "empty block in substitution; use generalized_substitute".into(),
        ));
    }
    Ok(inflate(sigma, blocks))
}

/// Substitution where blocks may be ε; those points of `sigma` disappear.
pub fn generalized_substitute(sigma: &Perm, blocks: &[Perm]) -> Result<Perm> {
    if blocks.len() != sigma.len() {
        return Err(Error::InvalidInput(format!(
            "{} blocks given for a skeleton of size {}",
            blocks.len(),
            sigma.len()
        )));
    }
    Ok(inflate(sigma, blocks))
}

fn inflate(sigma: &Perm, blocks: &[Perm]) -> Perm {
    let n = sigma.len();
    // offset[v] = total size of blocks placed at skeleton values below v
    let mut size_by_value = vec![0u32; n + 1];
    for (pos, &v) in sigma.0.iter().enumerate() {
        size_by_value[v as usize] = blocks[pos].len() as u32;
    }
    let mut offset = vec![0u32; n + 1];
    let mut acc = 0;
    for v in 1..=n {
        offset[v] = acc;
        acc += size_by_value[v];
    }
    let mut out = Vec::with_capacity(acc as usize);
    for (pos, &v) in sigma.0.iter().enumerate() {
        let base = offset[v as usize];
        out.extend(blocks[pos].0.iter().map(|x| x + base));
    }
    Perm(out)
}

/// Root of a substitution decomposition. `Plus` and `Minus` stand for the
/// skeletons 12 and 21.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Root {
    Plus,
    Minus,
    Simple(Perm),
}

impl Root {
    pub fn skeleton(&self) -> Perm {
        match self {
            Root::Plus => Perm(vec![1, 2]),
            Root::Minus => Perm(vec![2, 1]),
            Root::Simple(p) => p.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Root::Plus | Root::Minus => 2,
            Root::Simple(p) => p.len(),
        }
    }
}

impl fmt::Display for Root {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Root::Plus => write!(f, "plus"),
            Root::Minus => write!(f, "minus"),
            Root::Simple(p) => write!(f, "{}", p.compact()),
        }
    }
}

/// The unique top level decomposition of a permutation of size >= 2:
/// `⊕[a, b]` with `a` ⊕-indecomposable, `⊖[a, b]` with `a`
/// ⊖-indecomposable, or a simple root inflated by its maximal proper
/// intervals.
pub fn decompose(pi: &Perm) -> Result<(Root, Vec<Perm>)> {
    let n = pi.len();
    if n < 2 {
        return Err(Error::InvalidInput(format!(
            "{} has no substitution decomposition",
            pi.compact()
        )));
    }
    let (mut lo, mut hi) = (u32::MAX, 0u32);
    for k in 1..n {
        let v = pi.at(k);
        lo = lo.min(v);
        hi = hi.max(v);
        if hi as usize == k {
            return Ok((Root::Plus, vec![pi.block(1, k), pi.block(k + 1, n)]));
        }
        if lo as usize == n - k + 1 {
            return Ok((Root::Minus, vec![pi.block(1, k), pi.block(k + 1, n)]));
        }
    }
    let mut starts = Vec::new();
    let mut children = Vec::new();
    let mut i = 1;
    while i <= n {
        let ivs = intervals_from(pi, i)?;
        let j = ivs
            .iter()
            .rev()
            .find(|iv| !(iv.start == 1 && iv.end == n))
            .map(|iv| iv.end)
            .unwrap_or(i);
        starts.push(pi.at(i));
        children.push(pi.block(i, j));
        i = j + 1;
    }
    let skeleton = normalize_unchecked(&starts);
    debug_assert!(is_simple(&skeleton), "skeleton {skeleton:?} of {pi:?} not simple");
    Ok((Root::Simple(skeleton), children))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecompositionTree {
    Leaf,
    Node(Root, Vec<DecompositionTree>),
}

impl DecompositionTree {
    pub fn build(pi: &Perm) -> Result<DecompositionTree> {
        match pi.len() {
            0 => Err(Error::InvalidInput("ε has no decomposition tree".into())),
            1 => Ok(DecompositionTree::Leaf),
            _ => {
                let (root, children) = decompose(pi)?;
                let kids = children
                    .iter()
                    .map(DecompositionTree::build)
                    .collect::<Result<_>>()?;
                Ok(DecompositionTree::Node(root, kids))
            }
        }
    }

    pub fn permutation(&self) -> Perm {
        match self {
            DecompositionTree::Leaf => Perm::one(),
            DecompositionTree::Node(root, kids) => {
                let blocks: Vec<Perm> = kids.iter().map(|k| k.permutation()).collect();
                inflate(&root.skeleton(), &blocks)
            }
        }
    }

    pub fn prime_nodes(&self) -> Vec<Perm> {
        let mut out = Vec::new();
        self.collect_primes(&mut out);
        out
    }

    fn collect_primes(&self, out: &mut Vec<Perm>) {
        if let DecompositionTree::Node(root, kids) = self {
            if let Root::Simple(s) = root {
                out.push(s.clone());
            }
            for k in kids {
                k.collect_primes(out);
            }
        }
    }
}

pub fn decomposition_tree(pi: &Perm) -> Result<DecompositionTree> {
    DecompositionTree::build(pi)
}

/// Whether every prime node of the decomposition tree of `sigma` is in
/// `simples`. ε is in every closure.
pub fn in_closure(sigma: &Perm, simples: &[Perm]) -> Result<bool> {
    if let Some(bad) = simples.iter().find(|s| !is_simple(s)) {
        return Err(Error::InvalidInput(format!("{} is not simple", bad.compact())));
    }
    Ok(in_closure_unchecked(sigma, simples))
}

pub(crate) fn in_closure_unchecked(sigma: &Perm, simples: &[Perm]) -> bool {
    if sigma.len() < 4 {
        return true;
    }
    let (root, children) = decompose(sigma).expect("size >= 2");
    if let Root::Simple(s) = &root {
        if !simples.contains(s) {
            return false;
        }
    }
    children.iter().all(|c| in_closure_unchecked(c, simples))
}

/// ⊕-decomposable means the decomposition root is ⊕.
pub fn is_plus_decomposable(pi: &Perm) -> bool {
    let mut hi = 0u32;
    for k in 1..pi.len() {
        hi = hi.max(pi.at(k));
        if hi as usize == k {
            return true;
        }
    }
    false
}

pub fn is_minus_decomposable(pi: &Perm) -> bool {
    let n = pi.len();
    let mut lo = u32::MAX;
    for k in 1..n {
        lo = lo.min(pi.at(k));
        if lo as usize == n - k + 1 {
            return true;
        }
    }
    false
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// The permutation of size `n` with lexicographic rank `rank`.
pub fn unrank(n: usize, mut rank: u64) -> Perm {
    let mut pool: Vec<u32> = (1..=n as u32).collect();
    let mut out = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let f = factorial(k);
        let idx = (rank / f) as usize;
        rank %= f;
        out.push(pool.remove(idx));
    }
    Perm(out)
}

/// Lexicographic iterator over all permutations of size `n`.
pub struct AllPerms {
    cur: Option<Vec<u32>>,
}

pub fn all_perms(n: usize) -> AllPerms {
    AllPerms {
        cur: Some((1..=n as u32).collect()),
    }
}

impl Iterator for AllPerms {
    type Item = Perm;

    fn next(&mut self) -> Option<Perm> {
        let cur = self.cur.take()?;
        let out = Perm(cur.clone());
        let mut a = cur;
        let n = a.len();
        if n >= 2 {
            let mut i = n - 1;
            while i > 0 && a[i - 1] >= a[i] {
                i -= 1;
            }
            if i > 0 {
                let mut j = n - 1;
                while a[j] <= a[i - 1] {
                    j -= 1;
                }
                a.swap(i - 1, j);
                a[i..].reverse();
                self.cur = Some(a);
            }
        }
        Some(out)
    }
}
