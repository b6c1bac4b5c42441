use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::probing::TableParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableKind {
    Compact,
    Tombstone,
}

impl TableKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TableKind::Compact => "compact",
            TableKind::Tombstone => "tombstone",
        }
    }
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TableKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "compact" => Ok(TableKind::Compact),
            "tombstone" => Ok(TableKind::Tombstone),
            other => Err(format!(
                "unknown table kind `{other}` (expected compact or tombstone)"
            )),
        }
    }
}

/// Slots touched by one operation.
///
/// `find_examined` counts the probe walk from the home slot up to and
/// including the slot that ended it (the hit, or the empty terminator).
/// `scan_examined` is only non-zero for a compact-table removal: the
/// compression scan from the slot after the freed one up to and including
/// the empty slot that stops it.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct OpCost {
    pub find_examined: usize,
    pub scan_examined: usize,
    pub relocations: usize,
}

impl OpCost {
    pub fn slots_examined(&self) -> usize {
        self.find_examined + self.scan_examined
    }
}

/// Set operations common to both open-addressing variants, with cost
/// accounting.
pub trait ProbeTable {
    fn kind(&self) -> TableKind;
    fn params(&self) -> &TableParams;
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert_measured(&mut self, key: i64) -> Result<(bool, OpCost)>;
    fn contains_measured(&self, key: i64) -> (bool, OpCost);
    fn remove_measured(&mut self, key: i64) -> (bool, OpCost);
}
