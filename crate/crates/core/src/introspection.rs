//! Structural checks and probe statistics for both table kinds.
//!
//! Every cost here is a count of slots examined, never wall-clock time.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::compact::CompactTable;
use crate::error::Result;
use crate::harness::{OpKind, OpRecord};
use crate::num::Scalar;
use crate::probing::{probe_slot, Prober};
use crate::table::{OpCost, ProbeTable};
use crate::tombstone::{SlotState, TombstoneTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    SlotInconsistent,
    ReachabilityGap,
    CountMismatch,
    DuplicateKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// `None` for table-wide problems such as a miscounted length.
    pub slot_index: Option<usize>,
    pub kind: ViolationKind,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ViolationReport {
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }

    fn push(&mut self, slot_index: Option<usize>, kind: ViolationKind, detail: String) {
        self.violations.push(Violation {
            slot_index,
            kind,
            detail,
        });
    }
}

impl fmt::Display for ViolationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            return f.write_str("no violations");
        }
        for v in &self.violations {
            match v.slot_index {
                Some(i) => writeln!(f, "{:?} at slot {i}: {}", v.kind, v.detail)?,
                None => writeln!(f, "{:?}: {}", v.kind, v.detail)?,
            }
        }
        Ok(())
    }
}

/// Probe-length profile of a table.
///
/// `histogram` maps a successful lookup's cost (slots examined) to the number
/// of live keys with that cost. For a compact table this is the stored probe
/// count. `mean_miss` averages, over every possible home slot, the slots an
/// unsuccessful lookup starting there examines including the empty
/// terminator. `cluster_lengths` lists the maximal runs of non-empty slots
/// along the probe order, wrapping around the end of the array.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeStats<S> {
    pub histogram: BTreeMap<usize, usize>,
    pub mean_success: S,
    pub mean_miss: S,
    pub max_probe: usize,
    pub cluster_lengths: Vec<usize>,
    pub load_factor: S,
    pub tombstone_count: usize,
    pub live_count: usize,
    pub capacity: usize,
}

/// Mean distance to the next empty slot from two different starting
/// populations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmptyDistance<S> {
    /// Averaged over all slots; equals `mean_miss`, the expected cost of
    /// inserting a fresh key with a uniformly random home.
    pub from_any_slot: S,
    /// Averaged over occupied slots, measured from the slot after each one;
    /// the expected compression scan when a random live key is removed.
    pub after_occupied_slot: S,
}

/// Integer totals behind [`EmptyDistance`], so samples from several table
/// states can be pooled exactly.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DistanceTotals {
    pub from_any_slot: u64,
    pub slots: u64,
    pub after_occupied_slot: u64,
    pub occupied: u64,
}

impl DistanceTotals {
    pub fn ratios<S: Scalar>(&self) -> EmptyDistance<S> {
        EmptyDistance {
            from_any_slot: S::ratio(self.from_any_slot, self.slots),
            after_occupied_slot: S::ratio(self.after_occupied_slot, self.occupied),
        }
    }
}

impl std::ops::AddAssign for DistanceTotals {
    fn add_assign(&mut self, rhs: Self) {
        self.from_any_slot += rhs.from_any_slot;
        self.slots += rhs.slots;
        self.after_occupied_slot += rhs.after_occupied_slot;
        self.occupied += rhs.occupied;
    }
}

pub trait Inspect {
    fn check_invariants(&self) -> ViolationReport;
    fn probe_stats<S: Scalar>(&self) -> ProbeStats<S>;
    fn distance_totals(&self) -> DistanceTotals;

    fn empty_distance<S: Scalar>(&self) -> EmptyDistance<S> {
        self.distance_totals().ratios()
    }
}

pub fn check_invariants<T: Inspect + ?Sized>(table: &T) -> ViolationReport {
    table.check_invariants()
}

pub fn probe_stats<S: Scalar, T: Inspect + ?Sized>(table: &T) -> ProbeStats<S> {
    table.probe_stats()
}

/// Applies `op` to `table`, returning its result and cost.
pub fn measure_op_cost<T: ProbeTable + ?Sized>(
    table: &mut T,
    op: OpRecord,
) -> Result<(bool, OpCost)> {
    match op.kind {
        OpKind::Add => table.insert_measured(op.key),
        OpKind::Contains => Ok(table.contains_measured(op.key)),
        OpKind::Remove => Ok(table.remove_measured(op.key)),
    }
}

/// Per-slot distances (slots examined up to and including the next empty
/// slot along the probe order) plus the cyclic runs of occupied slots.
struct RunProfile {
    distances: Vec<usize>,
    clusters: Vec<usize>,
}

fn run_profile(prober: &Prober, occupied: &[bool]) -> RunProfile {
    let m = occupied.len();
    let Some(empty) = occupied.iter().position(|&o| !o) else {
        // No terminator anywhere: a lookup would never stop. Report the
        // longest possible walk rather than looping.
        return RunProfile {
            distances: vec![m + 1; m],
            clusters: vec![m],
        };
    };

    let mut distances = vec![0; m];
    distances[empty] = 1;
    let mut slot = prober.prev(empty);
    let mut ahead = 1;
    for _ in 1..m {
        ahead = if occupied[slot] { ahead + 1 } else { 1 };
        distances[slot] = ahead;
        slot = prober.prev(slot);
    }

    let mut clusters = Vec::new();
    let mut run = 0;
    let mut slot = prober.next(empty);
    for _ in 0..m {
        if occupied[slot] {
            run += 1;
        } else if run > 0 {
            clusters.push(run);
            run = 0;
        }
        slot = prober.next(slot);
    }
    debug_assert_eq!(run, 0, "walk ends on the starting empty slot");
    RunProfile {
        distances,
        clusters,
    }
}

fn stats_from<S: Scalar>(
    histogram: BTreeMap<usize, usize>,
    profile: &RunProfile,
    live_count: usize,
    capacity: usize,
    tombstone_count: usize,
) -> ProbeStats<S> {
    let success_total: u64 = histogram.iter().map(|(&c, &n)| (c * n) as u64).sum();
    let miss_total: u64 = profile.distances.iter().map(|&d| d as u64).sum();
    ProbeStats {
        mean_success: S::ratio(success_total, live_count as u64),
        mean_miss: S::ratio(miss_total, capacity as u64),
        max_probe: histogram.keys().next_back().copied().unwrap_or(0),
        cluster_lengths: profile.clusters.clone(),
        load_factor: S::ratio(live_count as u64, capacity as u64),
        histogram,
        tombstone_count,
        live_count,
        capacity,
    }
}

fn distance_totals_of(prober: &Prober, occupied: &[bool]) -> DistanceTotals {
    let profile = run_profile(prober, occupied);
    let mut totals = DistanceTotals {
        from_any_slot: profile.distances.iter().map(|&d| d as u64).sum(),
        slots: occupied.len() as u64,
        ..Default::default()
    };
    for (slot, &o) in occupied.iter().enumerate() {
        if o {
            totals.after_occupied_slot += profile.distances[prober.next(slot)] as u64;
            totals.occupied += 1;
        }
    }
    totals
}

impl Inspect for CompactTable {
    fn check_invariants(&self) -> ViolationReport {
        let mut report = ViolationReport::default();
        let params = self.params();
        let prober = self.prober();
        let slots = self.slots();
        let m = slots.len();

        let busy = slots.iter().filter(|s| !s.is_empty()).count();
        if busy != self.len() {
            report.push(
                None,
                ViolationKind::CountMismatch,
                format!("live count {} but {busy} occupied slots", self.len()),
            );
        }
        if busy > m.saturating_sub(1) {
            report.push(
                None,
                ViolationKind::CountMismatch,
                format!("{busy} occupied slots leave no empty slot in {m}"),
            );
        }

        let mut seen: HashMap<i64, usize> = HashMap::with_capacity(busy);
        for (i, slot) in slots.iter().enumerate() {
            let Some(key) = slot.key() else { continue };
            if let Some(first) = seen.insert(key, i) {
                report.push(
                    Some(i),
                    ViolationKind::DuplicateKey,
                    format!("key {key} also stored at slot {first}"),
                );
            }

            let count = slot.probe_count();
            if count > m || probe_slot(key, count - 1, params) != i {
                report.push(
                    Some(i),
                    ViolationKind::SlotInconsistent,
                    format!("key {key} with probe count {count} does not belong at slot {i}"),
                );
                continue;
            }
            let mut s = prober.home(key);
            for t in 0..count - 1 {
                if slots[s].is_empty() {
                    report.push(
                        Some(i),
                        ViolationKind::ReachabilityGap,
                        format!("key {key}: probe {t} (slot {s}) is empty"),
                    );
                    break;
                }
                s = prober.next(s);
            }
        }
        report
    }

    fn probe_stats<S: Scalar>(&self) -> ProbeStats<S> {
        let mut histogram = BTreeMap::new();
        for slot in self.slots().iter().filter(|s| !s.is_empty()) {
            *histogram.entry(slot.probe_count()).or_insert(0) += 1;
        }
        let occupied: Vec<bool> = self.slots().iter().map(|s| !s.is_empty()).collect();
        let profile = run_profile(self.prober(), &occupied);
        stats_from(histogram, &profile, self.len(), self.capacity(), 0)
    }

    fn distance_totals(&self) -> DistanceTotals {
        let occupied: Vec<bool> = self.slots().iter().map(|s| !s.is_empty()).collect();
        distance_totals_of(self.prober(), &occupied)
    }
}

impl Inspect for TombstoneTable {
    fn check_invariants(&self) -> ViolationReport {
        let mut report = ViolationReport::default();
        let prober = self.prober();
        let slots = self.slots();
        let m = slots.len();

        let busy = slots
            .iter()
            .filter(|s| s.state() == SlotState::Busy)
            .count();
        let deleted = slots
            .iter()
            .filter(|s| s.state() == SlotState::Deleted)
            .count();
        if busy != self.len() {
            report.push(
                None,
                ViolationKind::CountMismatch,
                format!("live count {} but {busy} busy slots", self.len()),
            );
        }
        if busy + deleted != self.non_free_count() {
            report.push(
                None,
                ViolationKind::CountMismatch,
                format!(
                    "non-free count {} but {busy} busy + {deleted} deleted slots",
                    self.non_free_count()
                ),
            );
        }
        if busy + deleted > m.saturating_sub(1) {
            report.push(
                None,
                ViolationKind::CountMismatch,
                format!(
                    "{} non-free slots leave no free slot in {m}",
                    busy + deleted
                ),
            );
        }

        let mut seen: HashMap<i64, usize> = HashMap::with_capacity(busy);
        for (i, slot) in slots.iter().enumerate() {
            let Some(key) = slot.key() else { continue };
            if let Some(first) = seen.insert(key, i) {
                report.push(
                    Some(i),
                    ViolationKind::DuplicateKey,
                    format!("key {key} also stored at slot {first}"),
                );
            }
            let home = prober.home(key);
            let offset = prober.offset_of(home, i);
            let mut s = home;
            for t in 0..offset {
                if slots[s].state() == SlotState::Free {
                    report.push(
                        Some(i),
                        ViolationKind::ReachabilityGap,
                        format!("key {key}: probe {t} (slot {s}) is free"),
                    );
                    break;
                }
                s = prober.next(s);
            }
        }
        report
    }

    fn probe_stats<S: Scalar>(&self) -> ProbeStats<S> {
        let mut histogram = BTreeMap::new();
        for key in self.keys() {
            *histogram.entry(self.probe_cost(key)).or_insert(0) += 1;
        }
        let occupied: Vec<bool> = self
            .slots()
            .iter()
            .map(|s| s.state() != SlotState::Free)
            .collect();
        let profile = run_profile(self.prober(), &occupied);
        stats_from(
            histogram,
            &profile,
            self.len(),
            self.capacity(),
            self.tombstone_count(),
        )
    }

    fn distance_totals(&self) -> DistanceTotals {
        let occupied: Vec<bool> = self
            .slots()
            .iter()
            .map(|s| s.state() != SlotState::Free)
            .collect();
        distance_totals_of(self.prober(), &occupied)
    }
}
