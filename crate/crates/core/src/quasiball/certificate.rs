//! Line-oriented certificate files:
//!
//! ```text
//! quasiball-cover v1
//! q=4 k=1 mode=covering x=4,0
//! ball 1 radius 1
//! - : NNNN
//! 1 : YNNN
//! ...
//! ```
//!
//! Entries are listed stem first, then by lie-set size and lexicographic
//! positions. The parser accepts only this canonical form, so parsing and
//! writing again reproduces the file byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{LieSet, Quasiball, QuasiballCollection, Vertex, MAX_DIMENSION};
use crate::error::{Error, Result};
use crate::game::StateVector;

const HEADER: &str = "quasiball-cover v1";

pub fn write_certificate(coll: &QuasiballCollection) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "q={} k={} mode={} x={}", coll.q, coll.lies(), coll.mode, coll.x);
    for (i, b) in coll.balls.iter().enumerate() {
        let _ = writeln!(out, "ball {} radius {}", i + 1, b.radius());
        for (s, v) in b.map() {
            let _ = writeln!(out, "{s} : {v}");
        }
    }
    out
}

fn fail(line: usize, what: impl std::fmt::Display) -> Error {
    Error::Format(format!("line {line}: {what}"))
}

/// A decimal with no sign, no leading zeros and no surrounding space.
fn number(line: usize, s: &str) -> Result<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return Err(fail(line, format!("bad number {s:?}")));
    }
    s.parse().map_err(|e| fail(line, format!("{s:?}: {e}")))
}

fn field<'a>(line: usize, token: Option<&'a str>, key: &str) -> Result<&'a str> {
    token
        .and_then(|t| t.strip_prefix(key))
        .and_then(|t| t.strip_prefix('='))
        .ok_or_else(|| fail(line, format!("expected {key}=...")))
}

pub fn parse_certificate(text: &str) -> Result<QuasiballCollection> {
    if !text.ends_with('\n') {
        return Err(Error::Format("certificate must end with a newline".into()));
    }
    let mut lines = text[..text.len() - 1].split('\n').enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, HEADER)) => {}
        _ => return Err(fail(1, format!("expected {HEADER:?}"))),
    }
    let (ln, params) = lines.next().ok_or_else(|| fail(2, "missing parameter line"))?;
    let mut tokens = params.split(' ');
    let q = number(ln, field(ln, tokens.next(), "q")?)?;
    let k = number(ln, field(ln, tokens.next(), "k")?)?;
    let mode = field(ln, tokens.next(), "mode")?.parse().map_err(|e| fail(ln, e))?;
    let x: StateVector = field(ln, tokens.next(), "x")?.parse().map_err(|e| fail(ln, e))?;
    if tokens.next().is_some() {
        return Err(fail(ln, "trailing fields"));
    }
    if q > MAX_DIMENSION {
        return Err(fail(ln, format!("q = {q} exceeds {MAX_DIMENSION}")));
    }
    if x.lies() != k as usize {
        return Err(fail(ln, format!("x = {x} does not have k + 1 = {} entries", k + 1)));
    }

    let mut balls = Vec::new();
    let mut current: Option<(u32, BTreeMap<LieSet, Vertex>, Option<LieSet>)> = None;
    let finish = |current: Option<(u32, BTreeMap<LieSet, Vertex>, Option<LieSet>)>, balls: &mut Vec<Quasiball>| -> Result<()> {
        if let Some((radius, map, _)) = current {
            balls.push(Quasiball::new(q, radius, map)?);
        }
        Ok(())
    };
    for (ln, line) in lines {
        if let Some(rest) = line.strip_prefix("ball ") {
            let mut parts = rest.split(' ');
            let ordinal = number(ln, parts.next().unwrap_or(""))?;
            if parts.next() != Some("radius") {
                return Err(fail(ln, "expected 'ball <n> radius <i>'"));
            }
            let radius = number(ln, parts.next().unwrap_or(""))?;
            if parts.next().is_some() {
                return Err(fail(ln, "trailing fields"));
            }
            finish(current.take(), &mut balls)?;
            if ordinal as usize != balls.len() + 1 {
                return Err(fail(ln, format!("ball {ordinal} out of sequence")));
            }
            current = Some((radius, BTreeMap::new(), None));
            continue;
        }
        let Some((radius, map, last)) = current.as_mut() else {
            return Err(fail(ln, "entry before the first ball"));
        };
        let (set, vertex) = line
            .split_once(" : ")
            .ok_or_else(|| fail(ln, "expected '<positions> : <vertex>'"))?;
        let set: LieSet = set.parse().map_err(|e| fail(ln, e))?;
        let vertex: Vertex = vertex.parse().map_err(|e| fail(ln, e))?;
        if vertex.dim() != q {
            return Err(fail(ln, format!("vertex {vertex} is not in Q_{q}")));
        }
        if set.len() > *radius {
            return Err(fail(ln, format!("lie set {set} exceeds radius {radius}")));
        }
        if last.is_some_and(|l| l >= set) {
            return Err(fail(ln, format!("entry {set} out of canonical order")));
        }
        if last.is_none() && !set.is_empty() {
            return Err(fail(ln, "the stem must come first"));
        }
        *last = Some(set);
        map.insert(set, vertex);
    }
    finish(current, &mut balls)?;
    Ok(QuasiballCollection { q, x, mode, balls })
}
