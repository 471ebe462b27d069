//! Sequence files: one integer per line with `#` comments, or a JSON object
//! `{"offset": n, "terms": ["1", "2", ...]}`.

use num_bigint::BigInt;
use ppp::{Error, IntSequence, Result};
use serde_json::{json, Value};

pub fn parse_sequence(text: &str) -> Result<IntSequence> {
    if text.trim_start().starts_with('{') {
        return parse_json(text);
    }
    let mut terms = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        // accept the typographic minus as well as '-'
        let normalized = line.replacen('\u{2212}', "-", 1);
        let v: BigInt = normalized
            .parse()
            .map_err(|_| Error::Parse(format!("line {}: not an integer: {line:?}", lineno + 1)))?;
        terms.push(v);
    }
    Ok(IntSequence::new(terms))
}

fn parse_json(text: &str) -> Result<IntSequence> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("sequence JSON: {e}")))?;
    let offset = match v.get("offset") {
        None => 0,
        Some(o) => o
            .as_u64()
            .ok_or_else(|| Error::Parse("\"offset\" must be a natural number".into()))?,
    };
    let terms = v
        .get("terms")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"terms\" array".into()))?;
    let terms = terms
        .iter()
        .map(|t| {
            let s = match t {
                Value::String(s) => s.clone(),
                Value::Number(n) => n.to_string(),
                _ => return Err(Error::Parse(format!("bad term {t}"))),
            };
            s.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad term {t}")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IntSequence::with_offset(offset, terms))
}

/// Canonical text form: one term per line. The offset only survives in the
/// JSON form.
pub fn emit_lines(s: &IntSequence) -> String {
    let mut out = String::new();
    for t in s.terms() {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

pub fn to_json(s: &IntSequence) -> Value {
    json!({
        "offset": s.offset(),
        "terms": s.terms().iter().map(|t| t.to_string()).collect::<Vec<_>>(),
    })
}
