//! Plain-text operation traces.
//!
//! One op per line: `a <key>`, `c <key>` or `r <key>`. Lines starting with
//! `#` are comments; those of the form `# name=value` with a known name
//! (`capacity`, `step`, `seed`, `rng`) form the header. Blank lines are
//! ignored.

use std::fmt;

use thiserror::Error;

use super::{OpKind, OpRecord};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceHeader {
    pub capacity: Option<usize>,
    pub step: Option<usize>,
    pub seed: Option<u64>,
    pub rng: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Trace {
    pub header: TraceHeader,
    pub ops: Vec<OpRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TraceError {
    /// 1-based.
    pub line: usize,
    pub message: String,
}

pub fn parse_trace(text: &str) -> Result<Trace, TraceError> {
    let mut trace = Trace::default();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |message: String| TraceError {
            line: n + 1,
            message,
        };
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let Some((name, value)) = comment.split_once('=') else {
                continue;
            };
            let value = value.trim();
            let bad =
                |e: std::num::ParseIntError| err(format!("bad {} `{value}`: {e}", name.trim()));
            match name.trim() {
                "capacity" => trace.header.capacity = Some(value.parse().map_err(bad)?),
                "step" => trace.header.step = Some(value.parse().map_err(bad)?),
                "seed" => trace.header.seed = Some(value.parse().map_err(bad)?),
                "rng" => trace.header.rng = Some(value.to_string()),
                _ => {}
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(code), Some(key), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(err(format!("expected `<a|c|r> <key>`, got `{line}`")));
        };
        let kind = OpKind::from_code(code)
            .ok_or_else(|| err(format!("unknown operation `{code}` (expected a, c or r)")))?;
        let key = key
            .parse::<i64>()
            .map_err(|e| err(format!("bad key `{key}`: {e}")))?;
        trace.ops.push(OpRecord { kind, key });
    }
    Ok(trace)
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let h = &self.header;
        if let Some(rng) = &h.rng {
            writeln!(f, "# rng={rng}")?;
        }
        if let Some(seed) = h.seed {
            writeln!(f, "# seed={seed}")?;
        }
        if let Some(capacity) = h.capacity {
            writeln!(f, "# capacity={capacity}")?;
        }
        if let Some(step) = h.step {
            writeln!(f, "# step={step}")?;
        }
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}
