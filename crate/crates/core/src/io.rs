//! File formats: permutation lists, the JSON specification schema and a
//! compact text notation for equations.
//!
//! The JSON form of a system looks like
//!
//! ```json
//! { "basis": [[1,3,2]], "closure_simples": [], "top": "C<avoid:132><contain:>",
//!   "equations": [ { "lhs": {"delta": "", "avoid": [[1,3,2]], "contain": []},
//!                    "key": "C<avoid:132><contain:>", "has_one": true, "disjoint": true,
//!                    "terms": [ {"root": "plus", "children": ["C+<avoid:132><contain:>", "..."]} ] } ] }
//! ```
//!
//! Object keys are emitted sorted so output is byte stable.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{Perm, Root};
use crate::restriction::{Delta, Equation, Restriction, Term};
use crate::system::EquationSystem;

/// One permutation per line; blank lines and `#` comments are skipped.
pub fn parse_perm_list(text: &str) -> Result<Vec<Perm>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::parse)
        .collect()
}

pub fn read_perm_file(path: &std::path::Path) -> Result<Vec<Perm>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_perm_list(&text)
}

#[derive(Serialize, Deserialize)]
struct JsonRestriction {
    delta: String,
    avoid: Vec<Vec<u32>>,
    contain: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum JsonRoot {
    Linear(String),
    Simple(Vec<u32>),
}

#[derive(Serialize, Deserialize)]
struct JsonTerm {
    root: JsonRoot,
    children: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct JsonEquation {
    lhs: JsonRestriction,
    #[serde(default)]
    key: Option<String>,
    has_one: bool,
    #[serde(default = "yes")]
    disjoint: bool,
    terms: Vec<JsonTerm>,
}

fn yes() -> bool {
    true
}

#[derive(Serialize, Deserialize)]
struct JsonSystem {
    #[serde(default)]
    basis: Vec<Vec<u32>>,
    closure_simples: Vec<Vec<u32>>,
    #[serde(default)]
    top: Option<String>,
    equations: Vec<JsonEquation>,
}

fn to_json_r(r: &Restriction) -> JsonRestriction {
    let vals = |v: &[Perm]| v.iter().map(|p| p.values().to_vec()).collect();
    JsonRestriction { delta: r.delta.suffix().to_string(), avoid: vals(&r.avoid), contain: vals(&r.contain) }
}

fn perms(v: Vec<Vec<u32>>) -> Result<Vec<Perm>> {
    v.into_iter().map(Perm::new).collect()
}

fn from_json_r(j: JsonRestriction) -> Result<Restriction> {
    Ok(Restriction::new(Delta::from_suffix(&j.delta)?, perms(j.avoid)?, perms(j.contain)?))
}

pub fn to_json_value(sys: &EquationSystem) -> serde_json::Value {
    let js = JsonSystem {
        basis: sys.basis.iter().map(|p| p.values().to_vec()).collect(),
        closure_simples: sys.simples.iter().map(|p| p.values().to_vec()).collect(),
        top: Some(sys.top.key()),
        equations: sys
            .equations
            .iter()
            .map(|e| JsonEquation {
                lhs: to_json_r(&e.lhs),
                key: Some(e.lhs.key()),
                has_one: e.has_one,
                disjoint: e.disjoint,
                terms: e
                    .terms
                    .iter()
                    .map(|t| JsonTerm {
                        root: match &t.root {
                            Root::Plus => JsonRoot::Linear("plus".into()),
                            Root::Minus => JsonRoot::Linear("minus".into()),
                            Root::Simple(p) => JsonRoot::Simple(p.values().to_vec()),
                        },
                        children: t.children.iter().map(Restriction::key).collect(),
                    })
                    .collect(),
            })
            .collect(),
    };
    // Value maps are ordered, which sorts the keys.
    serde_json::to_value(js).expect("serializable")
}

pub fn to_json_string(sys: &EquationSystem) -> String {
    let mut s = serde_json::to_string_pretty(&to_json_value(sys)).expect("serializable");
    s.push('\n');
    s
}

pub fn from_json_str(text: &str) -> Result<EquationSystem> {
    let js: JsonSystem = serde_json::from_str(text).map_err(|e| Error::Parse(format!("specification JSON: {e}")))?;
    let mut equations = Vec::with_capacity(js.equations.len());
    for je in js.equations {
        let lhs = from_json_r(je.lhs)?;
        let terms = je
            .terms
            .into_iter()
            .map(|jt| {
                let root = match jt.root {
                    JsonRoot::Linear(s) if s == "plus" => Root::Plus,
                    JsonRoot::Linear(s) if s == "minus" => Root::Minus,
                    JsonRoot::Linear(s) => return Err(Error::Parse(format!("unknown root {s:?}"))),
                    JsonRoot::Simple(v) => Root::Simple(Perm::new(v)?),
                };
                let children =
                    jt.children.iter().map(|k| Restriction::from_key(k)).collect::<Result<Vec<_>>>()?;
                check_term(&root, &children)?;
                Ok(Term { root, children })
            })
            .collect::<Result<Vec<_>>>()?;
        equations.push(Equation { lhs, has_one: je.has_one, terms, disjoint: je.disjoint });
    }
    let top = match js.top {
        Some(k) => Restriction::from_key(&k)?,
        None => equations
            .first()
            .map(|e| e.lhs.clone())
            .ok_or_else(|| Error::Parse("specification has no equations".into()))?,
    };
    Ok(EquationSystem { basis: perms(js.basis)?, simples: perms(js.closure_simples)?, top, equations })
}

fn check_term(root: &Root, children: &[Restriction]) -> Result<()> {
    let deltas = Term::child_deltas(root);
    if deltas.len() != children.len() || deltas.iter().zip(children).any(|(d, c)| *d != c.delta) {
        return Err(Error::Parse(format!("children of a {root} term do not match its root")));
    }
    Ok(())
}

/// Parses the notation printed by `Display`, e.g.
/// `C<1243,2341>(12) = plus[C+<12>, C<21>] + 3142[C<12>, C<12>, C<12>, C<132,2341>]`.
/// The right-hand side may start with the atom `1`, or be `0`.
pub fn parse_equation(line: &str) -> Result<Equation> {
    let (lhs, rhs) = line.split_once('=').ok_or_else(|| Error::Parse(format!("no '=' in {line:?}")))?;
    let lhs = parse_restriction(lhs.trim())?;
    let mut has_one = false;
    let mut terms = Vec::new();
    for part in split_top(rhs.trim(), '+') {
        let part = part.trim();
        match part {
            "1" => has_one = true,
            "0" => {}
            _ => terms.push(parse_term(part)?),
        }
    }
    Ok(Equation { lhs, has_one, terms, disjoint: true })
}

/// Parses `C`, `C+<12,21>`, `C<132>(21)` and the like.
pub fn parse_restriction(s: &str) -> Result<Restriction> {
    let bad = || Error::Parse(format!("malformed restriction {s:?}"));
    let rest = s.strip_prefix('C').ok_or_else(bad)?;
    let (delta, mut rest) = match rest.chars().next() {
        Some('+') => (Delta::Plus, &rest[1..]),
        Some('-') => (Delta::Minus, &rest[1..]),
        _ => (Delta::Plain, rest),
    };
    let mut avoid = Vec::new();
    let mut contain = Vec::new();
    if let Some(r) = rest.strip_prefix('<') {
        let end = r.find('>').ok_or_else(bad)?;
        avoid = list(&r[..end])?;
        rest = &r[end + 1..];
    }
    if let Some(r) = rest.strip_prefix('(') {
        let end = r.find(')').ok_or_else(bad)?;
        contain = list(&r[..end])?;
        rest = &r[end + 1..];
    }
    if !rest.trim().is_empty() {
        return Err(bad());
    }
    Ok(Restriction::new(delta, avoid, contain))
}

fn list(s: &str) -> Result<Vec<Perm>> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::parse).collect()
}

fn parse_term(s: &str) -> Result<Term> {
    let bad = || Error::Parse(format!("malformed term {s:?}"));
    let open = s.find('[').ok_or_else(bad)?;
    let inner = s[open + 1..].strip_suffix(']').ok_or_else(bad)?;
    let root = match s[..open].trim() {
        "plus" | "⊕" => Root::Plus,
        "minus" | "⊖" => Root::Minus,
        other => Root::Simple(other.parse()?),
    };
    let children = split_top(inner, ',').into_iter().map(|c| parse_restriction(c.trim())).collect::<Result<Vec<_>>>()?;
    check_term(&root, &children)?;
    Ok(Term { root, children })
}

// Splits on `sep` outside brackets.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '[' | '<' | '(' => depth += 1,
            ']' | '>' | ')' => depth -= 1,
            _ if c == sep && depth == 0 => {
                // a '+' right after 'C' is a delta mark, not a separator
                if sep == '+' && s[..i].ends_with('C') {
                    continue;
                }
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Parses one equation per non-empty, non-comment line.
pub fn parse_system_text(text: &str) -> Result<Vec<Equation>> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(parse_equation)
        .collect()
}
