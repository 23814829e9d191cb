//! Text grammar for command-line inputs: angles as `p/q`, end data as
//! `a1,a2,..[;ap1,..] | b1,..[;bp1,..]`, partitions as bare comma lists.
//! Whitespace is insignificant everywhere. Parse errors carry the byte
//! offset of the offending character in the original argument.

use std::fmt;

use anyhow::Result;
use gluecoeff_core::coefficients::OrbitEnds;
use gluecoeff_core::partitions::OrbitKind;
use gluecoeff_core::theta_core::{EndData, Theta};

#[derive(Debug)]
pub struct ParseError {
    position: usize,
    message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at position {})", self.message, self.position)
    }
}

impl std::error::Error for ParseError {}

fn err<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(ParseError {
        position,
        message: message.into(),
    }
    .into())
}

// One comma list of positive integers; `base` is the offset of `piece`
// inside the full argument.
fn parse_list(piece: &str, base: usize) -> Result<Vec<u64>> {
    if piece.trim().is_empty() {
        return Ok(vec![]);
    }
    let mut out = Vec::new();
    let mut offset = 0usize;
    for chunk in piece.split(',') {
        let lead = chunk.len() - chunk.trim_start().len();
        let pos = base + offset + lead;
        let item = chunk.trim();
        if item.is_empty() {
            return err(pos, "expected a multiplicity");
        }
        match item.parse::<u64>() {
            Ok(0) => return err(pos, "multiplicities are positive"),
            Ok(v) => out.push(v),
            Err(_) => {
                return err(pos, format!("expected a positive integer, found `{item}`"))
            }
        }
        offset += chunk.len() + 1;
    }
    Ok(out)
}

// One side `list[;list]`, unprimed then primed.
fn parse_side(piece: &str, base: usize) -> Result<(Vec<u64>, Vec<u64>)> {
    match piece.find(';') {
        None => Ok((parse_list(piece, base)?, vec![])),
        Some(i) => {
            let rest = &piece[i + 1..];
            if let Some(j) = rest.find(';') {
                return err(base + i + 1 + j, "a side has at most one `;`");
            }
            Ok((
                parse_list(&piece[..i], base)?,
                parse_list(rest, base + i + 1)?,
            ))
        }
    }
}

/// `a1,a2,..[;ap1,..] | b1,..[;bp1,..]`; any of the four lists may be empty.
pub fn parse_end_data(text: &str) -> Result<EndData> {
    let bar = match text.find('|') {
        Some(i) => i,
        None => return err(text.len(), "expected `|` between the two sides"),
    };
    let minus = &text[bar + 1..];
    if let Some(j) = minus.find('|') {
        return err(bar + 1 + j, "expected exactly one `|`");
    }
    let (a, a_prime) = parse_side(&text[..bar], 0)?;
    let (b, b_prime) = parse_side(minus, bar + 1)?;
    Ok(EndData::new(a, a_prime, b, b_prime)?)
}

/// A bare comma list of positive integers.
pub fn parse_parts(text: &str) -> Result<Vec<u64>> {
    parse_list(text, 0)
}

/// `p/q` with `0 < p < q`, certified for multiplicities up to `guard`.
pub fn parse_theta(text: &str, guard: u64) -> Result<Theta> {
    let slash = match text.find('/') {
        Some(i) => i,
        None => return err(text.len(), "expected an angle of the form p/q"),
    };
    let p: i64 = match text[..slash].trim().parse() {
        Ok(v) => v,
        Err(_) => {
            return err(
                0,
                format!("expected an integer numerator, found `{}`", text[..slash].trim()),
            )
        }
    };
    let q: i64 = match text[slash + 1..].trim().parse() {
        Ok(v) => v,
        Err(_) => {
            return err(
                slash + 1,
                format!(
                    "expected an integer denominator, found `{}`",
                    text[slash + 1..].trim()
                ),
            )
        }
    };
    if q <= 0 || p <= 0 || p >= q {
        return err(0, format!("the angle must satisfy 0 < p/q < 1, got {p}/{q}"));
    }
    Ok(Theta::new(p, q, guard.max(1))?)
}

/// An orbit descriptor `elliptic:p/q:ENDS`, `pos:r:ENDS`, or `neg:r:ENDS`,
/// where `r` is the rotation of the return map and `ENDS` follows the end
/// data grammar.
pub fn parse_orbit(text: &str) -> Result<OrbitEnds> {
    let c1 = match text.find(':') {
        Some(i) => i,
        None => return err(text.len(), "expected kind:parameter:ends"),
    };
    let c2 = match text[c1 + 1..].find(':') {
        Some(i) => c1 + 1 + i,
        None => return err(text.len(), "expected kind:parameter:ends"),
    };
    let ends = parse_end_data(&text[c2 + 1..])?;
    let param = text[c1 + 1..c2].trim();
    let rotation = || -> Result<i64> {
        match param.parse() {
            Ok(v) => Ok(v),
            Err(_) => err(c1 + 1, format!("expected an integer rotation, found `{param}`")),
        }
    };
    let kind = match text[..c1].trim() {
        "elliptic" => OrbitKind::Elliptic(parse_theta(param, ends.total())?),
        "pos" => OrbitKind::positive_hyperbolic(rotation()?)?,
        "neg" => OrbitKind::negative_hyperbolic(rotation()?)?,
        other => {
            return err(
                0,
                format!("unknown orbit kind `{other}`; use elliptic, pos, or neg"),
            )
        }
    };
    Ok(OrbitEnds {
        kind,
        a: ends.a().to_vec(),
        a_prime: ends.a_prime().to_vec(),
        b: ends.b().to_vec(),
        b_prime: ends.b_prime().to_vec(),
    })
}

fn join(list: &[u64]) -> String {
    list.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Canonical text form of end data, inverse to [`parse_end_data`].
pub fn end_data_text(s: &EndData) -> String {
    let side = |unprimed: &[u64], primed: &[u64]| {
        if primed.is_empty() {
            join(unprimed)
        } else {
            format!("{};{}", join(unprimed), join(primed))
        }
    };
    format!(
        "{}|{}",
        side(s.a(), s.a_prime()),
        side(s.b(), s.b_prime())
    )
}
