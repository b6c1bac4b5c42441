//! Linear-probing hash sets of `i64` keys with tombstone-free deletion.
//!
//! [`CompactTable`] removes a key by emptying its slot and then pulling
//! later entries of the same probe run backwards, guided by the probe count
//! stored in each slot. [`TombstoneTable`] is the classical baseline that
//! marks removed slots as deleted instead. The [`introspection`] module
//! checks structural invariants and measures probe lengths for both, the
//! [`harness`] module drives them against a reference set, and [`bench`]
//! runs insert/delete churn comparisons.
//!
//! Statistics are generic over [`Scalar`]: read them as `f64` for reporting
//! or as [`Rational64`] when exact values matter.

pub mod bench;
pub mod compact;
pub mod error;
pub mod harness;
pub mod introspection;
pub mod num;
pub mod probing;
pub mod table;
pub mod tombstone;

pub use compact::{CompactTable, Slot};
pub use error::{Error, Result};
pub use harness::{OpKind, OpRecord, Verdict};
pub use introspection::{Inspect, ProbeStats, ViolationKind, ViolationReport};
pub use num::Scalar;
pub use num_rational::Rational64;
pub use probing::{hash_index, probe_slot, validate_params, TableParams};
pub use table::{OpCost, ProbeTable, TableKind};
pub use tombstone::{SlotState, TombstoneSlot, TombstoneTable};

/// Probe statistics as floating point.
pub type ProbeStatsF64 = ProbeStats<f64>;
/// Probe statistics as exact fractions.
pub type ExactProbeStats = ProbeStats<Rational64>;
/// Benchmark row as floating point.
pub type BenchRowF64 = bench::BenchRow<f64>;
/// Benchmark row as exact fractions.
pub type ExactBenchRow = bench::BenchRow<Rational64>;
pub type BenchReportF64 = bench::BenchReport<f64>;
pub type ParitySummaryF64 = bench::ParitySummary<f64>;
