//! Insert/delete churn benchmark over both table kinds.
//!
//! Both tables receive the same key stream. After an initial build to
//! `live_target` keys, each round removes `churn_batch` random live keys and
//! adds `churn_batch` fresh ones; one [`BenchRow`] per table is taken after the
//! build (round 0) and after every round. All costs are slot counts, so a
//! run is a pure function of its configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::compact::CompactTable;
use crate::error::{Error, Result};
use crate::harness::{OpKind, OpRecord};
use crate::introspection::{measure_op_cost, DistanceTotals, Inspect, ProbeStats};
use crate::num::Scalar;
use crate::probing::TableParams;
use crate::table::{OpCost, ProbeTable, TableKind};
use crate::tombstone::TombstoneTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BenchConfig {
    pub capacity: usize,
    pub step: usize,
    pub live_target: usize,
    pub churn_rounds: usize,
    pub churn_batch: usize,
    pub seed: u64,
}

impl BenchConfig {
    pub fn params(&self) -> TableParams {
        TableParams::new(self.capacity, self.step)
    }

    pub fn validate(&self) -> Result<()> {
        self.params().validate()?;
        if self.live_target + 1 >= self.capacity {
            return Err(Error::CapacityTooSmall {
                live: self.live_target,
                capacity: self.capacity,
                needed: self.live_target + 2,
            });
        }
        Ok(())
    }
}

/// CSV column order of [`BenchRow`].
pub const BENCH_COLUMNS: [&str; 8] = [
    "round",
    "table_kind",
    "mean_success",
    "mean_miss",
    "max_probe",
    "load_factor",
    "tombstone_count",
    "relocations_this_round",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow<S> {
    pub round: usize,
    pub table_kind: TableKind,
    pub mean_success: S,
    pub mean_miss: S,
    pub max_probe: usize,
    pub load_factor: S,
    pub tombstone_count: usize,
    pub relocations_this_round: usize,
}

impl<S: Scalar> BenchRow<S> {
    fn from_stats(
        round: usize,
        table_kind: TableKind,
        stats: ProbeStats<S>,
        relocations: usize,
    ) -> Self {
        Self {
            round,
            table_kind,
            mean_success: stats.mean_success,
            mean_miss: stats.mean_miss,
            max_probe: stats.max_probe,
            load_factor: stats.load_factor,
            tombstone_count: stats.tombstone_count,
            relocations_this_round: relocations,
        }
    }
}

/// Compact-table insertion cost next to removal cost, split into the find
/// walk and the compression scan, with the empty-slot distance statistics
/// sampled on the same table states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParitySummary<S> {
    pub inserts: u64,
    pub removes: u64,
    pub mean_insert_examined: S,
    pub mean_find_examined: S,
    pub mean_compress_scan_examined: S,
    pub mean_remove_examined: S,
    pub mean_relocations: S,
    /// Mean distance to the next empty slot from a uniformly random slot.
    pub mean_distance_from_home: S,
    /// Mean distance to the next empty slot from the slot after an occupied
    /// one.
    pub mean_distance_after_occupied: S,
    pub samples: u64,
}

impl<S: Scalar> ParitySummary<S> {
    /// `mean_compress_scan_examined / mean_insert_examined`.
    pub fn scan_to_insert_ratio(&self) -> f64 {
        self.mean_compress_scan_examined.to_f64() / self.mean_insert_examined.to_f64()
    }
}

/// Running totals behind a [`ParitySummary`].
#[derive(Debug, Clone, Default)]
pub struct ParityAccumulator {
    inserts: u64,
    insert_examined: u64,
    removes: u64,
    find_examined: u64,
    scan_examined: u64,
    relocations: u64,
    distances: DistanceTotals,
    samples: u64,
}

impl ParityAccumulator {
    /// Records one operation; only additions that inserted and removals that
    /// removed count.
    pub fn record(&mut self, kind: OpKind, applied: bool, cost: &OpCost) {
        if !applied {
            return;
        }
        match kind {
            OpKind::Add => {
                self.inserts += 1;
                self.insert_examined += cost.find_examined as u64;
            }
            OpKind::Remove => {
                self.removes += 1;
                self.find_examined += cost.find_examined as u64;
                self.scan_examined += cost.scan_examined as u64;
                self.relocations += cost.relocations as u64;
            }
            OpKind::Contains => {}
        }
    }

    pub fn sample(&mut self, table: &CompactTable) {
        self.distances += table.distance_totals();
        self.samples += 1;
    }

    pub fn summary<S: Scalar>(&self) -> ParitySummary<S> {
        let d = self.distances.ratios::<S>();
        ParitySummary {
            inserts: self.inserts,
            removes: self.removes,
            mean_insert_examined: S::ratio(self.insert_examined, self.inserts),
            mean_find_examined: S::ratio(self.find_examined, self.removes),
            mean_compress_scan_examined: S::ratio(self.scan_examined, self.removes),
            mean_remove_examined: S::ratio(self.find_examined + self.scan_examined, self.removes),
            mean_relocations: S::ratio(self.relocations, self.removes),
            mean_distance_from_home: d.from_any_slot,
            mean_distance_after_occupied: d.after_occupied_slot,
            samples: self.samples,
        }
    }
}

/// Replays `ops` on a compact table, sampling the empty-slot distances every
/// `sample_every` ops (never when 0).
pub fn measure_parity<S: Scalar>(
    ops: &[OpRecord],
    params: TableParams,
    sample_every: usize,
) -> Result<ParitySummary<S>> {
    let mut table = CompactTable::new(params)?;
    let mut acc = ParityAccumulator::default();
    for (i, &op) in ops.iter().enumerate() {
        let (applied, cost) = measure_op_cost(&mut table, op)?;
        acc.record(op.kind, applied, &cost);
        if sample_every != 0 && (i + 1) % sample_every == 0 {
            acc.sample(&table);
        }
    }
    Ok(acc.summary())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport<S> {
    pub config: BenchConfig,
    pub rows: Vec<BenchRow<S>>,
    pub parity: ParitySummary<S>,
    /// Fresh keys the tombstone table could not place (it would have used
    /// its last free slot); each was discarded for both tables and redrawn.
    pub tombstone_rejected_keys: u64,
}

impl<S: Scalar> BenchReport<S> {
    pub fn rows_for(&self, kind: TableKind) -> impl Iterator<Item = &BenchRow<S>> {
        self.rows.iter().filter(move |r| r.table_kind == kind)
    }

    /// Directional claims a healthy run must satisfy: the tombstone table's
    /// unsuccessful-lookup cost never decreases, and after the last round it
    /// is at least the compact table's. Returns a description of each
    /// violated claim.
    pub fn directional_failures(&self) -> Vec<String> {
        let mut failures = Vec::new();
        let tomb: Vec<_> = self.rows_for(TableKind::Tombstone).collect();
        for pair in tomb.windows(2) {
            if pair[1].mean_miss < pair[0].mean_miss {
                failures.push(format!(
                    "tombstone mean_miss fell from {:?} to {:?} at round {}",
                    pair[0].mean_miss, pair[1].mean_miss, pair[1].round
                ));
            }
        }
        let last_compact = self.rows_for(TableKind::Compact).last();
        if let (Some(t), Some(c)) = (tomb.last(), last_compact) {
            if t.mean_miss < c.mean_miss {
                failures.push(format!(
                    "tombstone mean_miss {:?} below compact {:?} after round {}",
                    t.mean_miss, c.mean_miss, t.round
                ));
            }
        }
        failures
    }
}

struct LiveSet {
    keys: Vec<i64>,
    members: std::collections::HashSet<i64>,
}

impl LiveSet {
    fn new() -> Self {
        Self {
            keys: Vec::new(),
            members: Default::default(),
        }
    }

    fn len(&self) -> usize {
        self.keys.len()
    }

    fn contains(&self, key: i64) -> bool {
        self.members.contains(&key)
    }

    fn insert(&mut self, key: i64) {
        if self.members.insert(key) {
            self.keys.push(key);
        }
    }

    fn take_random<R: Rng>(&mut self, rng: &mut R) -> i64 {
        let key = self.keys.swap_remove(rng.gen_range(0..self.keys.len()));
        self.members.remove(&key);
        key
    }
}

fn stats_rows<S: Scalar>(
    round: usize,
    compact: &CompactTable,
    tombstone: &TombstoneTable,
    compact_relocations: usize,
) -> [BenchRow<S>; 2] {
    [
        BenchRow::from_stats(
            round,
            TableKind::Compact,
            compact.probe_stats(),
            compact_relocations,
        ),
        BenchRow::from_stats(round, TableKind::Tombstone, tombstone.probe_stats(), 0),
    ]
}

/// Runs the churn benchmark described by `config`.
pub fn run_churn<S: Scalar>(config: &BenchConfig) -> Result<BenchReport<S>> {
    config.validate()?;
    let params = config.params();
    let mut compact = CompactTable::new(params)?;
    let mut tombstone = TombstoneTable::new(params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut live = LiveSet::new();
    let mut acc = ParityAccumulator::default();
    let mut rejected = 0u64;

    while live.len() < config.live_target {
        let key: i64 = rng.gen();
        if live.contains(key) {
            continue;
        }
        compact.insert(key)?;
        tombstone.insert(key)?;
        live.insert(key);
    }
    let mut rows: Vec<BenchRow<S>> = stats_rows(0, &compact, &tombstone, 0).into();

    // Bound on redraws for a single fresh key before giving up on the
    // tombstone table entirely.
    let max_redraws = 64 * config.capacity as u64;

    for round in 1..=config.churn_rounds {
        let mut relocations = 0;
        for _ in 0..config.churn_batch.min(live.len()) {
            let key = live.take_random(&mut rng);
            let (removed, cost) = compact.remove_measured(key);
            debug_assert!(removed);
            acc.record(OpKind::Remove, removed, &cost);
            relocations += cost.relocations;
            tombstone.remove(key);
        }
        for _ in 0..config.churn_batch {
            if live.len() + 1 > config.capacity - 1 {
                return Err(Error::TableFull {
                    live: live.len(),
                    capacity: config.capacity,
                });
            }
            let mut redraws = 0u64;
            let key = loop {
                let key: i64 = rng.gen();
                if live.contains(key) {
                    continue;
                }
                match tombstone.insert(key) {
                    Ok(_) => break key,
                    Err(e @ Error::TableFull { .. }) => {
                        rejected += 1;
                        redraws += 1;
                        if redraws > max_redraws {
                            return Err(e);
                        }
                    }
                    Err(e) => return Err(e),
                }
            };
            let (inserted, cost) = compact.insert_measured(key)?;
            acc.record(OpKind::Add, inserted, &cost);
            live.insert(key);
        }
        acc.sample(&compact);
        rows.extend(stats_rows(round, &compact, &tombstone, relocations));
    }

    Ok(BenchReport {
        config: *config,
        rows,
        parity: acc.summary(),
        tombstone_rejected_keys: rejected,
    })
}

/// Worst case for tombstones: `keys` keys sharing home slot 0 are inserted
/// and then all removed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SameHashReport<S> {
    pub capacity: usize,
    pub step: usize,
    pub same_hash_keys: usize,
    /// Rows for round 0 (all keys present) and round 1 (all removed).
    pub rows: Vec<BenchRow<S>>,
    /// Slots an unsuccessful lookup from home 0 examines afterwards.
    pub tombstone_home_miss: usize,
    pub compact_home_miss: usize,
}

/// Keys `0, m, 2m, …` (all with home slot 0) are inserted into both tables
/// and then removed in insertion order.
pub fn run_same_hash<S: Scalar>(
    capacity: usize,
    step: usize,
    keys: usize,
) -> Result<SameHashReport<S>> {
    let params = TableParams::new(capacity, step).validate()?;
    if keys + 2 > capacity {
        return Err(Error::CapacityTooSmall {
            live: keys,
            capacity,
            needed: keys + 2,
        });
    }
    let key_at = |i: usize| -> i64 { (i as i64).wrapping_mul(capacity as i64) };
    let mut compact = CompactTable::new(params)?;
    let mut tombstone = TombstoneTable::new(params)?;
    for i in 0..keys {
        compact.insert(key_at(i))?;
        tombstone.insert(key_at(i))?;
    }
    let mut rows: Vec<BenchRow<S>> = stats_rows(0, &compact, &tombstone, 0).into();
    let mut relocations = 0;
    for i in 0..keys {
        relocations += compact.remove_measured(key_at(i)).1.relocations;
        tombstone.remove(key_at(i));
    }
    rows.extend(stats_rows(1, &compact, &tombstone, relocations));

    let probe = key_at(keys);
    Ok(SameHashReport {
        capacity,
        step,
        same_hash_keys: keys,
        rows,
        tombstone_home_miss: tombstone.probe_cost(probe),
        compact_home_miss: compact.contains_measured(probe).1.find_examined,
    })
}
