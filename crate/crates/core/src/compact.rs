//! Open-addressing set with deletion by backward compaction.
//!
//! Every occupied slot records the probe number on which its key was placed
//! (1 for the home slot, `j` for the `j`-th probe). Removing a key empties its
//! slot and then scans forward along the probe order: an entry sitting `off`
//! steps past the current hole may legally move into the hole iff its probe
//! count exceeds `off`, since the hole then lies on its own probe path. The
//! moved entry's count drops by `off` and its old slot becomes the new hole.
//! The scan stops at the first empty slot. No tombstones are ever left
//! behind, so an emptied table is indistinguishable from a fresh one.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::probing::{Prober, TableParams};
use crate::table::{OpCost, ProbeTable, TableKind};

/// One table cell. `probe_count == 0` marks the slot empty.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Slot {
    key: i64,
    probe_count: usize,
}

impl Slot {
    pub const EMPTY: Slot = Slot {
        key: 0,
        probe_count: 0,
    };

    pub(crate) fn new(key: i64, probe_count: usize) -> Self {
        Self { key, probe_count }
    }

    /// The stored key, or `None` for an empty slot.
    pub fn key(&self) -> Option<i64> {
        (self.probe_count != 0).then_some(self.key)
    }

    pub fn probe_count(&self) -> usize {
        self.probe_count
    }

    pub fn is_empty(&self) -> bool {
        self.probe_count == 0
    }
}

/// Result of walking a probe sequence.
struct Probe {
    found: bool,
    /// Slot holding the key, or the empty slot that ended the walk.
    slot: usize,
    /// Slots examined, including `slot`. For a miss this is also the probe
    /// count the key would be stored with.
    examined: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompactTable {
    params: TableParams,
    prober: Prober,
    slots: Vec<Slot>,
    live: usize,
    compress_enabled: bool,
}

impl CompactTable {
    pub fn new(params: TableParams) -> Result<Self> {
        let params = params.validate()?;
        Ok(Self {
            prober: Prober::new(&params),
            slots: vec![Slot::EMPTY; params.capacity],
            live: 0,
            params,
            compress_enabled: true,
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

    pub fn load_factor<S: Scalar>(&self) -> S {
        S::ratio(self.live as u64, self.capacity() as u64)
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    /// Stored keys in ascending slot order.
    pub fn keys(&self) -> impl Iterator<Item = i64> + '_ {
        self.slots.iter().filter_map(Slot::key)
    }

    /// Little-endian dump of every slot as `(key: i64, probe_count: u64)`.
    pub fn snapshot_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.slots.len() * 16);
        for slot in &self.slots {
            out.extend_from_slice(&slot.key.to_le_bytes());
            out.extend_from_slice(&(slot.probe_count as u64).to_le_bytes());
        }
        out
    }

    fn probe(&self, key: i64) -> Probe {
        let mut slot = self.prober.home(key);
        let mut examined = 1;
        loop {
            let s = self.slots[slot];
            if s.probe_count == 0 {
                return Probe {
                    found: false,
                    slot,
                    examined,
                };
            }
            if s.key == key {
                return Probe {
                    found: true,
                    slot,
                    examined,
                };
            }
            slot = self.prober.next(slot);
            examined += 1;
        }
    }

    /// Adds `key`. Returns `Ok(false)` without touching the table when the key
    /// is already present.
    pub fn insert(&mut self, key: i64) -> Result<bool> {
        self.insert_measured(key).map(|(inserted, _)| inserted)
    }

    pub fn contains(&self, key: i64) -> bool {
        self.probe(key).found
    }

    pub fn remove(&mut self, key: i64) -> bool {
        self.remove_measured(key).0
    }

    fn needs_growth(&self) -> bool {
        if !self.params.growth_enabled {
            return false;
        }
        let after = self.live + 1;
        after > self.capacity() - 1
            || after as f64 / self.capacity() as f64 > self.params.growth_load_factor
    }

    /// Repairs the probe paths running through the empty slot `free`.
    ///
    /// Returns the number of entries relocated.
    ///
    /// # Panics
    ///
    /// If `free` is out of range or not empty.
    pub fn compress(&mut self, free: usize) -> usize {
        self.compress_counted(free).1
    }

    /// Returns `(slots examined, relocations)`.
    fn compress_counted(&mut self, mut free: usize) -> (usize, usize) {
        assert!(
            self.slots[free].is_empty(),
            "compress must start from an empty slot (slot {free} is occupied)"
        );
        let mut i = self.prober.next(free);
        let mut off = 1;
        let mut examined = 1;
        let mut relocations = 0;
        while self.slots[i].probe_count != 0 {
            let current = self.slots[i];
            if current.probe_count > off {
                self.slots[free] = Slot::new(current.key, current.probe_count - off);
                self.slots[i] = Slot::EMPTY;
                free = i;
                off = 0;
                relocations += 1;
            }
            i = self.prober.next(i);
            off += 1;
            examined += 1;
        }
        (examined, relocations)
    }

    /// Rebuilds the key set over `new_params`, reinserting in ascending slot
    /// order of this table.
    pub fn rehash(&self, new_params: TableParams) -> Result<CompactTable> {
        let new_params = new_params.validate()?;
        if new_params.capacity - 1 < self.live {
            return Err(Error::CapacityTooSmall {
                live: self.live,
                capacity: new_params.capacity,
                needed: self.live + 1,
            });
        }
        let mut table = CompactTable::new(new_params)?;
        table.compress_enabled = self.compress_enabled;
        for key in self.keys() {
            let probe = table.probe(key);
            debug_assert!(!probe.found);
            table.slots[probe.slot] = Slot::new(key, probe.examined);
            table.live += 1;
        }
        Ok(table)
    }

    /// Disables (or re-enables) compaction after removal. Only useful for
    /// demonstrating what breaks without it.
    #[doc(hidden)]
    pub fn set_compression(&mut self, enabled: bool) {
        self.compress_enabled = enabled;
    }

    pub(crate) fn prober(&self) -> &Prober {
        &self.prober
    }

    #[cfg(test)]
    pub(crate) fn slots_mut(&mut self) -> &mut [Slot] {
        &mut self.slots
    }

    #[cfg(test)]
    pub(crate) fn set_len(&mut self, live: usize) {
        self.live = live;
    }
}

impl ProbeTable for CompactTable {
    fn kind(&self) -> TableKind {
        TableKind::Compact
    }

    fn params(&self) -> &TableParams {
        &self.params
    }

    fn len(&self) -> usize {
        self.live
    }

    fn insert_measured(&mut self, key: i64) -> Result<(bool, OpCost)> {
        let mut probe = self.probe(key);
        if !probe.found {
            while self.needs_growth() {
                *self = self.rehash(self.params.grown())?;
                probe = self.probe(key);
            }
        }
        let cost = OpCost {
            find_examined: probe.examined,
            ..OpCost::default()
        };
        if probe.found {
            return Ok((false, cost));
        }
        if self.live + 1 > self.capacity() - 1 {
            return Err(Error::TableFull {
                live: self.live,
                capacity: self.capacity(),
            });
        }
        self.slots[probe.slot] = Slot::new(key, probe.examined);
        self.live += 1;
        Ok((true, cost))
    }

    fn contains_measured(&self, key: i64) -> (bool, OpCost) {
        let probe = self.probe(key);
        let cost = OpCost {
            find_examined: probe.examined,
            ..OpCost::default()
        };
        (probe.found, cost)
    }

    fn remove_measured(&mut self, key: i64) -> (bool, OpCost) {
        let probe = self.probe(key);
        let mut cost = OpCost {
            find_examined: probe.examined,
            ..OpCost::default()
        };
        if !probe.found {
            return (false, cost);
        }
        self.slots[probe.slot] = Slot::EMPTY;
        self.live -= 1;
        if self.compress_enabled {
            let (scan, relocations) = self.compress_counted(probe.slot);
            cost.scan_examined = scan;
            cost.relocations = relocations;
        }
        (true, cost)
    }
}
