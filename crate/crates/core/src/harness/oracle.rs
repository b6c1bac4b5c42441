use std::collections::BTreeSet;

use super::{OpKind, OpRecord};

/// Reference dynamic set the tables are compared against.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    keys: BTreeSet<i64>,
}

impl Model {
    pub fn new() -> Self {
        Self::default()
    }

    /// `Add` is true iff the key was new, `Contains` reports membership and
    /// `Remove` is true iff the key was present.
    pub fn apply(&mut self, op: OpRecord) -> bool {
        match op.kind {
            OpKind::Add => self.keys.insert(op.key),
            OpKind::Contains => self.keys.contains(&op.key),
            OpKind::Remove => self.keys.remove(&op.key),
        }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = i64> + '_ {
        self.keys.iter().copied()
    }
}
