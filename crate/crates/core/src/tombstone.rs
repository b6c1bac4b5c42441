//! Classical three-state open addressing: removal marks a slot `Deleted`.
//!
//! Lookups walk past `Deleted` slots; insertions reuse the first one they
//! pass, but only after scanning on to a `Free` slot to rule out a duplicate
//! further along. Nothing ever turns a slot back into `Free`, so probe paths
//! only grow under churn. That degradation is the point of this baseline.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::probing::{Prober, TableParams};
use crate::table::{OpCost, ProbeTable, TableKind};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SlotState {
    #[default]
    Free,
    Busy,
    Deleted,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct TombstoneSlot {
    key: i64,
    state: SlotState,
}

impl TombstoneSlot {
    /// The stored key when the slot is `Busy`.
    pub fn key(&self) -> Option<i64> {
        (self.state == SlotState::Busy).then_some(self.key)
    }

    pub fn state(&self) -> SlotState {
        self.state
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TombstoneTable {
    params: TableParams,
    prober: Prober,
    slots: Vec<TombstoneSlot>,
    live: usize,
    non_free: usize,
}

struct Probe {
    found: Option<usize>,
    first_deleted: Option<usize>,
    /// The `Free` slot ending an unsuccessful walk.
    terminator: usize,
    examined: usize,
}

impl TombstoneTable {
    pub fn new(params: TableParams) -> Result<Self> {
        let params = params.validate()?;
        Ok(Self {
            prober: Prober::new(&params),
            slots: vec![TombstoneSlot::default(); params.capacity],
            live: 0,
            non_free: 0,
            params,
        })
    }

    pub fn params(&self) -> &TableParams {
        &self.params
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    pub fn len(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.live == 0
    }

    /// `Busy` plus `Deleted` slots.
    pub fn non_free_count(&self) -> usize {
        self.non_free
    }

    pub fn tombstone_count(&self) -> usize {
        self.non_free - self.live
    }

    pub fn load_factor<S: Scalar>(&self) -> S {
        S::ratio(self.live as u64, self.capacity() as u64)
    }

    pub fn slots(&self) -> &[TombstoneSlot] {
        &self.slots
    }

    pub fn keys(&self) -> impl Iterator<Item = i64> + '_ {
        self.slots.iter().filter_map(TombstoneSlot::key)
    }

    fn probe(&self, key: i64) -> Probe {
        let mut slot = self.prober.home(key);
        let mut first_deleted = None;
        let mut examined = 1;
        loop {
            let s = self.slots[slot];
            match s.state {
                SlotState::Free => {
                    return Probe {
                        found: None,
                        first_deleted,
                        terminator: slot,
                        examined,
                    };
                }
                SlotState::Busy if s.key == key => {
                    return Probe {
                        found: Some(slot),
                        first_deleted,
                        terminator: slot,
                        examined,
                    };
                }
                SlotState::Deleted if first_deleted.is_none() => first_deleted = Some(slot),
                _ => {}
            }
            slot = self.prober.next(slot);
            examined += 1;
        }
    }

    pub fn insert(&mut self, key: i64) -> Result<bool> {
        self.insert_measured(key).map(|(inserted, _)| inserted)
    }

    pub fn contains(&self, key: i64) -> bool {
        self.probe(key).found.is_some()
    }

    pub fn remove(&mut self, key: i64) -> bool {
        self.remove_measured(key).0
    }

    /// Slots a lookup of `key` examines, counting the hit or the `Free`
    /// terminator.
    pub fn probe_cost(&self, key: i64) -> usize {
        self.probe(key).examined
    }

    pub(crate) fn prober(&self) -> &Prober {
        &self.prober
    }

    #[cfg(test)]
    pub(crate) fn slots_mut(&mut self) -> &mut [TombstoneSlot] {
        &mut self.slots
    }
}

impl ProbeTable for TombstoneTable {
    fn kind(&self) -> TableKind {
        TableKind::Tombstone
    }

    fn params(&self) -> &TableParams {
        &self.params
    }

    fn len(&self) -> usize {
        self.live
    }

    fn insert_measured(&mut self, key: i64) -> Result<(bool, OpCost)> {
        let probe = self.probe(key);
        let cost = OpCost {
            find_examined: probe.examined,
            ..OpCost::default()
        };
        if probe.found.is_some() {
            return Ok((false, cost));
        }
        let target = match probe.first_deleted {
            Some(slot) => slot,
            None => {
                if self.non_free + 1 > self.capacity() - 1 {
                    return Err(Error::TableFull {
                        live: self.live,
                        capacity: self.capacity(),
                    });
                }
                self.non_free += 1;
                probe.terminator
            }
        };
        self.slots[target] = TombstoneSlot {
            key,
            state: SlotState::Busy,
        };
        self.live += 1;
        Ok((true, cost))
    }

    fn contains_measured(&self, key: i64) -> (bool, OpCost) {
        let probe = self.probe(key);
        let cost = OpCost {
            find_examined: probe.examined,
            ..OpCost::default()
        };
        (probe.found.is_some(), cost)
    }

    fn remove_measured(&mut self, key: i64) -> (bool, OpCost) {
        let probe = self.probe(key);
        let cost = OpCost {
            find_examined: probe.examined,
            ..OpCost::default()
        };
        match probe.found {
            Some(slot) => {
                self.slots[slot].state = SlotState::Deleted;
                self.live -= 1;
                (true, cost)
            }
            None => (false, cost),
        }
    }
}
