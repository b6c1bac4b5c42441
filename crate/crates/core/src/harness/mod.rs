//! Differential execution of both tables against a reference set.

mod oracle;
mod trace;
mod workload;

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

pub use oracle::Model;
pub use trace::{parse_trace, Trace, TraceError, TraceHeader};
pub use workload::{generate_workload, KeyUniverse, OpMix, WorkloadSpec, RNG_ALGORITHM};

use crate::compact::CompactTable;
use crate::error::{Error, Result};
use crate::introspection::{Inspect, ViolationReport};
use crate::probing::TableParams;
use crate::table::{ProbeTable, TableKind};
use crate::tombstone::TombstoneTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OpKind {
    Add,
    Contains,
    Remove,
}

impl OpKind {
    /// Single-letter code used in trace files.
    pub fn code(self) -> char {
        match self {
            OpKind::Add => 'a',
            OpKind::Contains => 'c',
            OpKind::Remove => 'r',
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        match code {
            "a" => Some(OpKind::Add),
            "c" => Some(OpKind::Contains),
            "r" => Some(OpKind::Remove),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OpRecord {
    pub kind: OpKind,
    pub key: i64,
}

impl OpRecord {
    pub fn add(key: i64) -> Self {
        Self {
            kind: OpKind::Add,
            key,
        }
    }

    pub fn contains(key: i64) -> Self {
        Self {
            kind: OpKind::Contains,
            key,
        }
    }

    pub fn remove(key: i64) -> Self {
        Self {
            kind: OpKind::Remove,
            key,
        }
    }
}

impl fmt::Display for OpRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.kind.code(), self.key)
    }
}

/// Result of one operation on a table under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Value(bool),
    TableFull,
}

impl Serialize for Outcome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Outcome::Value(b) => serializer.serialize_bool(*b),
            Outcome::TableFull => serializer.serialize_str("table_full"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Divergence {
    pub op_index: usize,
    pub op: OpRecord,
    pub compact_result: Outcome,
    pub tombstone_result: Outcome,
    pub oracle_result: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvariantFailure {
    pub op_index: usize,
    pub table: TableKind,
    pub report: ViolationReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub passed: bool,
    pub ops_applied: usize,
    pub first_divergence: Option<Divergence>,
    pub invariant_failures: Vec<InvariantFailure>,
}

/// Invariant failures kept per run; later ones are dropped.
pub const MAX_RECORDED_FAILURES: usize = 32;

/// Configuration of a differential run.
#[derive(Debug, Clone, Copy)]
pub struct Differential {
    params: TableParams,
    check_every: usize,
    compress_enabled: bool,
}

impl Differential {
    pub fn new(params: TableParams) -> Result<Self> {
        Ok(Self {
            params: params.validate()?,
            check_every: 1,
            compress_enabled: true,
        })
    }

    /// Run the invariant checker after every `n`-th op (0 disables it).
    pub fn check_every(mut self, n: usize) -> Self {
        self.check_every = n;
        self
    }

    /// Runs the compact table without compaction, a deliberately broken
    /// configuration the harness must catch.
    pub fn without_compression(mut self) -> Self {
        self.compress_enabled = false;
        self
    }

    /// Applies `ops` to both tables and the oracle, stopping at the first
    /// disagreement.
    pub fn run(&self, ops: &[OpRecord]) -> Verdict {
        let mut compact = CompactTable::new(self.params).expect("params validated");
        compact.set_compression(self.compress_enabled);
        let mut tombstone = TombstoneTable::new(self.params).expect("params validated");
        let mut model = Model::new();

        let mut invariant_failures = Vec::new();
        let mut first_divergence = None;
        let mut ops_applied = 0;
        let mut last_checked = None;

        for (op_index, &op) in ops.iter().enumerate() {
            let compact_result = apply(&mut compact, op);
            let tombstone_result = apply(&mut tombstone, op);
            let oracle_result = model.apply(op);
            ops_applied += 1;

            if self.check_every != 0 && (op_index + 1) % self.check_every == 0 {
                check_both(&compact, &tombstone, op_index, &mut invariant_failures);
                last_checked = Some(op_index);
            }

            let expected = Outcome::Value(oracle_result);
            if compact_result != expected || tombstone_result != expected {
                first_divergence = Some(Divergence {
                    op_index,
                    op,
                    compact_result,
                    tombstone_result,
                    oracle_result,
                });
                break;
            }
        }

        if self.check_every != 0 && ops_applied > 0 && last_checked != Some(ops_applied - 1) {
            check_both(
                &compact,
                &tombstone,
                ops_applied - 1,
                &mut invariant_failures,
            );
        }

        Verdict {
            passed: first_divergence.is_none() && invariant_failures.is_empty(),
            ops_applied,
            first_divergence,
            invariant_failures,
        }
    }
}

fn apply<T: ProbeTable>(table: &mut T, op: OpRecord) -> Outcome {
    let result = match op.kind {
        OpKind::Add => table.insert_measured(op.key).map(|r| r.0),
        OpKind::Contains => Ok(table.contains_measured(op.key).0),
        OpKind::Remove => Ok(table.remove_measured(op.key).0),
    };
    match result {
        Ok(b) => Outcome::Value(b),
        Err(Error::TableFull { .. }) => Outcome::TableFull,
        Err(e) => unreachable!("table operation failed: {e}"),
    }
}

fn check_both(
    compact: &CompactTable,
    tombstone: &TombstoneTable,
    op_index: usize,
    failures: &mut Vec<InvariantFailure>,
) {
    for (table, report) in [
        (TableKind::Compact, compact.check_invariants()),
        (TableKind::Tombstone, tombstone.check_invariants()),
    ] {
        if !report.is_clean() && failures.len() < MAX_RECORDED_FAILURES {
            failures.push(InvariantFailure {
                op_index,
                table,
                report,
            });
        }
    }
}

/// Applies `ops` to a compact table, a tombstone table and a reference set,
/// checking both tables' invariants every `check_every` ops.
pub fn run_differential(
    ops: &[OpRecord],
    params: TableParams,
    check_every: usize,
) -> Result<Verdict> {
    Ok(Differential::new(params)?.check_every(check_every).run(ops))
}

/// Applies `op` to the reference set; see [`Model::apply`].
pub fn model_apply(model: &mut Model, op: OpRecord) -> bool {
    model.apply(op)
}
