//! Text format for weighted clusters.
//!
//! ```text
//! # comments and blank lines are ignored
//! points = 4
//! proximities = [[2, 1], [3, 1], [3, 2], [4, 3]]
//! multiplicities = [2, 2, 2, 2]
//! ```
//!
//! Each field appears exactly once, on one line. Integers have arbitrary
//! size. [`print_cluster`] writes the canonical form (pairs sorted by
//! `(j, i)`), which [`parse_cluster`] reads back unchanged.

use num_bigint::BigInt;

use super::{ClusterError, ProximityStructure, WeightedCluster};

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Int(BigInt),
    List(Vec<Value>),
}

fn parse_error(
    line: Option<usize>,
    field: Option<&str>,
    message: impl Into<String>,
) -> ClusterError {
    ClusterError::Parse {
        line,
        field: field.map(str::to_string),
        message: message.into(),
    }
}

struct ValueParser<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
}

impl<'a> ValueParser<'a> {
    fn new(src: &'a str) -> Self {
        ValueParser {
            chars: src.char_indices().peekable(),
            src,
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.chars.peek(), Some((_, c)) if c.is_whitespace()) {
            self.chars.next();
        }
    }

    fn value(&mut self) -> Result<Value, String> {
        self.skip_ws();
        match self.chars.peek().copied() {
            Some((_, '[')) => {
                self.chars.next();
                let mut items = Vec::new();
                self.skip_ws();
                if let Some((_, ']')) = self.chars.peek() {
                    self.chars.next();
                    return Ok(Value::List(items));
                }
                loop {
                    items.push(self.value()?);
                    self.skip_ws();
                    match self.chars.next() {
                        Some((_, ',')) => continue,
                        Some((_, ']')) => return Ok(Value::List(items)),
                        Some((_, c)) => return Err(format!("expected ',' or ']', found {c:?}")),
                        None => return Err("unterminated list".into()),
                    }
                }
            }
            Some((start, c)) if c == '-' || c == '+' || c.is_ascii_digit() => {
                self.chars.next();
                let mut end = start + c.len_utf8();
                while let Some(&(k, d)) = self.chars.peek() {
                    if d.is_ascii_digit() {
                        end = k + 1;
                        self.chars.next();
                    } else {
                        break;
                    }
                }
                let text = &self.src[start..end];
                text.parse::<BigInt>()
                    .map(Value::Int)
                    .map_err(|_| format!("invalid integer {text:?}"))
            }
            Some((_, c)) => Err(format!("unexpected character {c:?}")),
            None => Err("missing value".into()),
        }
    }

    fn finish(mut self) -> Result<(), String> {
        self.skip_ws();
        match self.chars.next() {
            None => Ok(()),
            Some((_, c)) => Err(format!("trailing input starting at {c:?}")),
        }
    }
}

fn as_usize(v: &Value) -> Option<usize> {
    match v {
        Value::Int(n) => usize::try_from(n).ok(),
        Value::List(_) => None,
    }
}

/// Reads a weighted cluster; the structure is validated and errors cite line and field.
pub fn parse_cluster(text: &str) -> Result<WeightedCluster, ClusterError> {
    let mut points: Option<(usize, usize)> = None;
    let mut pairs: Option<(usize, Vec<(usize, usize)>)> = None;
    let mut mults: Option<(usize, Vec<BigInt>)> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line
            .split_once('=')
            .ok_or_else(|| parse_error(Some(line_no), None, "expected `field = value`"))?;
        let key = key.trim();
        let mut parser = ValueParser::new(rest);
        let value = parser
            .value()
            .map_err(|m| parse_error(Some(line_no), Some(key), m))?;
        parser
            .finish()
            .map_err(|m| parse_error(Some(line_no), Some(key), m))?;
        let duplicate = || parse_error(Some(line_no), Some(key), "field given twice");
        match key {
            "points" => {
                if points.is_some() {
                    return Err(duplicate());
                }
                let n = as_usize(&value).ok_or_else(|| {
                    parse_error(Some(line_no), Some(key), "expected a non-negative integer")
                })?;
                points = Some((line_no, n));
            }
            "proximities" => {
                if pairs.is_some() {
                    return Err(duplicate());
                }
                let bad =
                    || parse_error(Some(line_no), Some(key), "expected a list of [j, i] pairs");
                let Value::List(items) = value else {
                    return Err(bad());
                };
                let mut out = Vec::with_capacity(items.len());
                for item in &items {
                    match item {
                        Value::List(p) if p.len() == 2 => {
                            let j = as_usize(&p[0]).ok_or_else(bad)?;
                            let i = as_usize(&p[1]).ok_or_else(bad)?;
                            out.push((j, i));
                        }
                        _ => return Err(bad()),
                    }
                }
                pairs = Some((line_no, out));
            }
            "multiplicities" => {
                if mults.is_some() {
                    return Err(duplicate());
                }
                let bad = || parse_error(Some(line_no), Some(key), "expected a list of integers");
                let Value::List(items) = value else {
                    return Err(bad());
                };
                let m = items
                    .into_iter()
                    .map(|v| match v {
                        Value::Int(n) => Ok(n),
                        Value::List(_) => Err(bad()),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                mults = Some((line_no, m));
            }
            other => {
                return Err(parse_error(Some(line_no), Some(other), "unknown field"));
            }
        }
    }

    let (_, r) = points.ok_or_else(|| parse_error(None, Some("points"), "missing field"))?;
    let (pairs_line, pairs) =
        pairs.ok_or_else(|| parse_error(None, Some("proximities"), "missing field"))?;
    let (mults_line, m) =
        mults.ok_or_else(|| parse_error(None, Some("multiplicities"), "missing field"))?;

    let structure = ProximityStructure::from_pairs(r, pairs);
    structure
        .validate()
        .map_err(|e| parse_error(Some(pairs_line), Some("proximities"), e.to_string()))?;
    WeightedCluster::new(structure, m).map_err(|e| match e {
        ClusterError::LengthMismatch { .. } => {
            parse_error(Some(mults_line), Some("multiplicities"), e.to_string())
        }
        other => other,
    })
}

/// Canonical text form of a weighted cluster.
pub fn print_cluster(cluster: &WeightedCluster) -> String {
    let s = cluster.structure();
    let pairs: Vec<String> = s.pairs().map(|(j, i)| format!("[{j}, {i}]")).collect();
    let mults: Vec<String> = cluster
        .multiplicities()
        .iter()
        .map(ToString::to_string)
        .collect();
    format!(
        "points = {}\nproximities = [{}]\nmultiplicities = [{}]\n",
        s.points(),
        pairs.join(", "),
        mults.join(", ")
    )
}
