//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion not listed in `EXPECTED_FAILURES` fails.
//!
//! Run with `cargo test -p probe-compact --test acceptance`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{layout, ReferenceTable};
use probe_compact::bench::{run_churn, run_same_hash, BenchConfig, ParityAccumulator};
use probe_compact::harness::{
    generate_workload, run_differential, KeyUniverse, OpMix, WorkloadSpec,
};
use probe_compact::introspection::measure_op_cost;
use probe_compact::{
    CompactTable, Inspect, OpKind, OpRecord, Rational64, TableKind, TableParams, TombstoneTable,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Criterion 5 cannot hold at a non-trivial load factor; see README.
const EXPECTED_FAILURES: &[&str] = &["5"];

const BIG: usize = 65_536;

struct Outcome {
    id: &'static str,
    name: String,
    passed: bool,
    detail: String,
}

fn outcome(
    id: &'static str,
    name: impl Into<String>,
    failures: Vec<String>,
    summary: String,
) -> Outcome {
    let passed = failures.is_empty();
    let detail = if passed {
        summary
    } else {
        format!("{summary}; {}", failures.join("; "))
    };
    Outcome {
        id,
        name: name.into(),
        passed,
        detail,
    }
}

type Layout = Vec<Option<(i64, usize)>>;

fn sparse(m: usize, filled: &[(usize, i64, usize)]) -> Layout {
    let mut out = vec![None; m];
    for &(slot, key, count) in filled {
        out[slot] = Some((key, count));
    }
    out
}

// ---------------------------------------------------------------------------
// Workloads

/// Six keys with two shared homes at m = 7, used for the desk-scale runs.
const DESK_POOL: [i64; 6] = [0, 7, 14, 3, 10, -4];

fn desk_ops(seed: u64, op_count: usize) -> Vec<OpRecord> {
    let spec = WorkloadSpec::mixed(
        seed,
        op_count,
        KeyUniverse::new(0, DESK_POOL.len() as i64 - 1),
    );
    generate_workload(&spec)
        .unwrap()
        .into_iter()
        .map(|op| OpRecord {
            kind: op.kind,
            key: DESK_POOL[op.key as usize],
        })
        .collect()
}

fn big_ops(seed: u64, op_count: usize) -> Vec<OpRecord> {
    // Twice the capacity: after 100k ops roughly 35k keys are live.
    let universe = KeyUniverse::new(-(BIG as i64), BIG as i64 - 1);
    generate_workload(&WorkloadSpec::mixed(seed, op_count, universe)).unwrap()
}

// ---------------------------------------------------------------------------
// Criterion 1: differential correctness

struct DiffScale {
    seeds: u64,
    ops: usize,
    checked_seeds: u64,
    checked_ops: usize,
}

fn differential(
    id: &'static str,
    params: TableParams,
    scale: DiffScale,
    ops_for: impl Fn(u64, usize) -> Vec<OpRecord> + Sync,
) -> Outcome {
    let started = Instant::now();
    let mut failures: Vec<String> = (0..scale.seeds)
        .into_par_iter()
        .filter_map(|seed| {
            let ops = ops_for(seed, scale.ops);
            let v = run_differential(&ops, params, 0).unwrap();
            (!v.passed).then(|| format!("seed {seed} diverged: {:?}", v.first_divergence))
        })
        .collect();
    let returns_secs = started.elapsed().as_secs_f64();

    let started = Instant::now();
    failures.extend(
        (0..scale.checked_seeds)
            .into_par_iter()
            .filter_map(|seed| {
                let ops = ops_for(seed, scale.checked_ops);
                let v = run_differential(&ops, params, 1).unwrap();
                (!v.passed).then(|| {
                    format!(
                        "seed {seed} per-op check: divergence {:?}, {} invariant failures",
                        v.first_divergence,
                        v.invariant_failures.len()
                    )
                })
            })
            .collect::<Vec<_>>(),
    );
    let checked_secs = started.elapsed().as_secs_f64();

    outcome(
        id,
        format!("differential correctness (m={}, C={})", params.capacity, params.step),
        failures,
        format!(
            "{} seeds x {} ops agree ({returns_secs:.1}s); per-op invariants on {} seeds x {} ops ({checked_secs:.1}s)",
            scale.seeds, scale.ops, scale.checked_seeds, scale.checked_ops
        ),
    )
}

fn full_scale() -> DiffScale {
    DiffScale {
        seeds: 100,
        ops: 100_000,
        checked_seeds: 10,
        checked_ops: 10_000,
    }
}

// ---------------------------------------------------------------------------
// Criterion 2: compression fixtures

struct Fixture {
    name: &'static str,
    adds: Vec<i64>,
    removes: Vec<i64>,
    /// Slot to compress from after the adds, instead of removing.
    compress_at: Option<usize>,
    expected: Layout,
}

fn check_fixtures(m: usize, c: usize, fixtures: &[Fixture]) -> Vec<String> {
    let mut failures = Vec::new();
    for f in fixtures {
        let mut reference = ReferenceTable::new(m, c);
        let mut table = CompactTable::new(TableParams::new(m, c)).unwrap();
        for &k in &f.adds {
            reference.add(k);
            table.insert(k).unwrap();
        }
        for &k in &f.removes {
            reference.remove(k);
            table.remove(k);
        }
        if let Some(slot) = f.compress_at {
            reference.compress(slot);
            table.compress(slot);
        }
        if reference.layout() != f.expected {
            failures.push(format!(
                "{}: reference trace disagrees with the frozen layout",
                f.name
            ));
        }
        if layout(&table) != f.expected {
            failures.push(format!(
                "{}: table layout differs from the frozen layout",
                f.name
            ));
        }
        if !table.check_invariants().is_clean() {
            failures.push(format!("{}: invariant violations", f.name));
        }
    }
    failures
}

fn fixtures_outcome(id: &'static str, m: usize, c: usize, fixtures: Vec<Fixture>) -> Outcome {
    let failures = check_fixtures(m, c, &fixtures);
    outcome(
        id,
        format!("compression fixtures (m={m}, C={c})"),
        failures,
        format!("{} scenarios slot-for-slot", fixtures.len()),
    )
}

fn fixtures_m7_c1() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "insert 7, 14, 21",
            adds: vec![7, 14, 21],
            removes: vec![],
            compress_at: None,
            expected: sparse(7, &[(0, 7, 1), (1, 14, 2), (2, 21, 3)]),
        },
        Fixture {
            name: "remove 7 pulls 14 and 21 back",
            adds: vec![7, 14, 21],
            removes: vec![7],
            compress_at: None,
            expected: sparse(7, &[(0, 14, 1), (1, 21, 2)]),
        },
        Fixture {
            name: "remove 0 moves neither 1 nor 8",
            adds: vec![0, 1, 8],
            removes: vec![0],
            compress_at: None,
            expected: sparse(7, &[(1, 1, 1), (2, 8, 2)]),
        },
        Fixture {
            name: "compress(0) with 1 at its home",
            adds: vec![1],
            removes: vec![],
            compress_at: Some(0),
            expected: sparse(7, &[(1, 1, 1)]),
        },
        Fixture {
            name: "compress before an empty slot",
            adds: vec![7, 14],
            removes: vec![],
            compress_at: Some(3),
            expected: sparse(7, &[(0, 7, 1), (1, 14, 2)]),
        },
    ]
}

fn fixtures_m7_c5() -> Vec<Fixture> {
    // Stride 5 from home 0 visits 0, 5, 3, 1, 6, 4, 2.
    vec![
        Fixture {
            name: "insert 7, 14, 21",
            adds: vec![7, 14, 21],
            removes: vec![],
            compress_at: None,
            expected: sparse(7, &[(0, 7, 1), (5, 14, 2), (3, 21, 3)]),
        },
        Fixture {
            name: "remove 7 pulls 14 and 21 back",
            adds: vec![7, 14, 21],
            removes: vec![7],
            compress_at: None,
            expected: sparse(7, &[(0, 14, 1), (5, 21, 2)]),
        },
        Fixture {
            name: "remove 0 moves neither 5 nor 12",
            adds: vec![0, 5, 12],
            removes: vec![0],
            compress_at: None,
            expected: sparse(7, &[(5, 5, 1), (3, 12, 2)]),
        },
        Fixture {
            name: "compress(0) with 5 at its home",
            adds: vec![5],
            removes: vec![],
            compress_at: Some(0),
            expected: sparse(7, &[(5, 5, 1)]),
        },
        Fixture {
            name: "compress before an empty slot",
            adds: vec![7, 14],
            removes: vec![],
            compress_at: Some(1),
            expected: sparse(7, &[(0, 7, 1), (5, 14, 2)]),
        },
    ]
}

fn fixtures_big_c3() -> Vec<Fixture> {
    let m = BIG as i64;
    vec![
        Fixture {
            name: "insert 0, m, 2m",
            adds: vec![0, m, 2 * m],
            removes: vec![],
            compress_at: None,
            expected: sparse(BIG, &[(0, 0, 1), (3, m, 2), (6, 2 * m, 3)]),
        },
        Fixture {
            name: "remove 0 pulls m and 2m back",
            adds: vec![0, m, 2 * m],
            removes: vec![0],
            compress_at: None,
            expected: sparse(BIG, &[(0, m, 1), (3, 2 * m, 2)]),
        },
        Fixture {
            name: "remove 0 moves neither 3 nor m+3",
            adds: vec![0, 3, m + 3],
            removes: vec![0],
            compress_at: None,
            expected: sparse(BIG, &[(3, 3, 1), (6, m + 3, 2)]),
        },
        Fixture {
            name: "compress(0) with 3 at its home",
            adds: vec![3],
            removes: vec![],
            compress_at: Some(0),
            expected: sparse(BIG, &[(3, 3, 1)]),
        },
        Fixture {
            name: "compress before an empty slot",
            adds: vec![0, m],
            removes: vec![],
            compress_at: Some(1),
            expected: sparse(BIG, &[(0, 0, 1), (3, m, 2)]),
        },
    ]
}

// ---------------------------------------------------------------------------
// Criterion 3: tombstone degradation

fn criterion_3() -> Outcome {
    let report = run_same_hash::<Rational64>(BIG, 1, 1000).unwrap();
    let mut failures = Vec::new();
    if report.tombstone_home_miss != 1001 {
        failures.push(format!(
            "tombstone miss {} != 1001",
            report.tombstone_home_miss
        ));
    }
    if report.compact_home_miss != 1 {
        failures.push(format!("compact miss {} != 1", report.compact_home_miss));
    }
    outcome(
        "3",
        "tombstone degradation (1000 same-hash keys)",
        failures,
        format!(
            "miss from home: tombstone {} slots, compact {} slot",
            report.tombstone_home_miss, report.compact_home_miss
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 4: churn stability

fn criterion_4() -> Outcome {
    let config = BenchConfig {
        capacity: BIG,
        step: 1,
        live_target: 32_768,
        churn_rounds: 50,
        churn_batch: 16_384,
        seed: 4,
    };
    let started = Instant::now();
    let report = run_churn::<Rational64>(&config).unwrap();
    let compact: Vec<_> = report.rows_for(TableKind::Compact).collect();
    let tomb: Vec<_> = report.rows_for(TableKind::Tombstone).collect();
    let miss = |rows: &[&probe_compact::ExactBenchRow], round: usize| {
        rows.iter().find(|r| r.round == round).unwrap().mean_miss
    };
    let mut failures = Vec::new();

    let (first, last) = (miss(&compact, 1), miss(&compact, 50));
    let ratio = last / first;
    let bound = Rational64::new(5, 4);
    if ratio > bound || ratio < bound.recip() {
        failures.push(format!("compact round 50 / round 1 = {:.4}", to_f64(ratio)));
    }
    for pair in tomb.windows(2) {
        if pair[1].mean_miss < pair[0].mean_miss {
            failures.push(format!(
                "tombstone mean_miss fell at round {}",
                pair[1].round
            ));
        }
    }
    for round in 10..=50 {
        if miss(&tomb, round) <= miss(&compact, round) {
            failures.push(format!("tombstone not above compact at round {round}"));
        }
    }
    outcome(
        "4",
        "churn stability (m=65536, 50 rounds)",
        failures,
        format!(
            "compact mean_miss {:.3} -> {:.3} (x{:.3}); tombstone {:.3} -> {:.3}; {} redrawn keys ({:.1}s)",
            to_f64(first),
            to_f64(last),
            to_f64(ratio),
            to_f64(miss(&tomb, 1)),
            to_f64(miss(&tomb, 50)),
            report.tombstone_rejected_keys,
            started.elapsed().as_secs_f64()
        ),
    )
}

fn to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

// ---------------------------------------------------------------------------
// Criterion 5: deletion/insertion parity

fn criterion_5() -> Outcome {
    // 32,768 adds to reach load 1/2, then 16 rounds of 2,101 removals and
    // 2,101 fresh adds: 100,000 ops in total.
    let build = 32_768;
    let spec = WorkloadSpec {
        seed: 5,
        op_count: build,
        key_universe: KeyUniverse::FULL,
        mix: OpMix::new(1, 0, 0),
        churn_rounds: 16,
        churn_batch: 2_101,
    };
    let ops = generate_workload(&spec).unwrap();
    assert_eq!(ops.len(), 100_000);

    let mut table = CompactTable::new(TableParams::new(BIG, 1)).unwrap();
    let mut acc = ParityAccumulator::default();
    for (i, &op) in ops.iter().enumerate() {
        let (applied, cost) = measure_op_cost(&mut table, op).unwrap();
        if i >= build {
            acc.record(op.kind, applied, &cost);
            if (i - build) % 1000 == 0 {
                acc.sample(&table);
            }
        }
    }
    let s = acc.summary::<f64>();
    let ratio = s.scan_to_insert_ratio();
    let failures = if (ratio - 1.0).abs() <= 0.05 {
        vec![]
    } else {
        vec![format!("scan/insert = {ratio:.4}, outside 1 +/- 0.05")]
    };
    outcome(
        "5",
        "deletion/insertion parity (100k-op churn, load 0.5)",
        failures,
        format!(
            "insert {:.3}, compress scan {:.3}, find {:.3}; empty distance from any slot {:.3}, after an occupied slot {:.3}",
            s.mean_insert_examined,
            s.mean_compress_scan_examined,
            s.mean_find_examined,
            s.mean_distance_from_home,
            s.mean_distance_after_occupied
        ),
    )
}

// ---------------------------------------------------------------------------
// Criterion 6: clean empty

fn drain_check(params: TableParams, seed: u64, ops: &[OpRecord]) -> Vec<String> {
    let mut compact = CompactTable::new(params).unwrap();
    let mut tomb = TombstoneTable::new(params).unwrap();
    let mut collided = false;
    let mut collision_then_delete = false;
    let mut apply = |op: OpRecord, compact: &mut CompactTable, tomb: &mut TombstoneTable| {
        let (c, _) = measure_op_cost(compact, op).unwrap();
        let (t, cost) = measure_op_cost(tomb, op).unwrap();
        assert_eq!(c, t, "seed {seed}: tables disagree on {op}");
        match op.kind {
            OpKind::Add if t && cost.find_examined > 1 => collided = true,
            OpKind::Remove if t && collided => collision_then_delete = true,
            _ => {}
        }
    };
    for &op in ops {
        apply(op, &mut compact, &mut tomb);
    }
    let mut live: Vec<i64> = compact.keys().collect();
    live.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    for key in live {
        apply(OpRecord::remove(key), &mut compact, &mut tomb);
    }

    let mut failures = Vec::new();
    if !compact.slots().iter().all(|s| s.probe_count() == 0) {
        failures.push(format!("seed {seed}: nonzero probe count after draining"));
    }
    if compact.snapshot_bytes() != CompactTable::new(params).unwrap().snapshot_bytes() {
        failures.push(format!(
            "seed {seed}: drained table differs from a fresh one"
        ));
    }
    if !tomb.is_empty() {
        failures.push(format!("seed {seed}: tombstone table not empty"));
    }
    if collision_then_delete && tomb.non_free_count() == 0 {
        failures.push(format!("seed {seed}: tombstone table lost its tombstones"));
    }
    if !collision_then_delete {
        failures.push(format!(
            "seed {seed}: workload never deleted after a collision"
        ));
    }
    failures
}

fn clean_empty(
    id: &'static str,
    params: TableParams,
    op_count: usize,
    ops_for: impl Fn(u64, usize) -> Vec<OpRecord> + Sync,
) -> Outcome {
    let failures: Vec<String> = (0..20u64)
        .into_par_iter()
        .flat_map_iter(|seed| drain_check(params, seed, &ops_for(seed, op_count)))
        .collect();
    outcome(
        id,
        format!(
            "clean empty after draining (m={}, C={})",
            params.capacity, params.step
        ),
        failures,
        format!("20 seeds x {op_count} ops, then every live key removed"),
    )
}

// ---------------------------------------------------------------------------

/// Criterion 7 reruns 1, 2 and 6 with other coprime steps, one line each.
fn criterion_7() -> Vec<Outcome> {
    let c3 = TableParams::new(BIG, 3);
    let c5 = TableParams::new(7, 5);
    let desk = DiffScale {
        seeds: 100,
        ops: 10_000,
        checked_seeds: 100,
        checked_ops: 10_000,
    };
    vec![
        differential("7", c3, full_scale(), big_ops),
        differential("7", c5, desk, desk_ops),
        fixtures_outcome("7", BIG, 3, fixtures_big_c3()),
        fixtures_outcome("7", 7, 5, fixtures_m7_c5()),
        clean_empty("7", c3, 50_000, big_ops),
        clean_empty("7", c5, 2_000, desk_ops),
    ]
}

type Criterion = (&'static str, fn() -> Vec<Outcome>);

const CRITERIA: [Criterion; 7] = [
    ("1", || {
        vec![differential(
            "1",
            TableParams::new(BIG, 1),
            full_scale(),
            big_ops,
        )]
    }),
    ("2", || vec![fixtures_outcome("2", 7, 1, fixtures_m7_c1())]),
    ("3", || vec![criterion_3()]),
    ("4", || vec![criterion_4()]),
    ("5", || vec![criterion_5()]),
    ("6", || {
        vec![clean_empty("6", TableParams::new(BIG, 1), 50_000, big_ops)]
    }),
    ("7", criterion_7),
];

/// Optional positional arguments select criteria by number.
fn main() -> ExitCode {
    let started = Instant::now();
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut unexpected = 0;
    for (id, run) in CRITERIA {
        if !filter.is_empty() && !filter.iter().any(|f| f == id) {
            continue;
        }
        for o in run() {
            let expected_failure = EXPECTED_FAILURES.contains(&o.id);
            let verdict = match (o.passed, expected_failure) {
                (true, _) => "PASS",
                (false, true) => "FAIL (expected)",
                (false, false) => "FAIL",
            };
            if !o.passed && !expected_failure {
                unexpected += 1;
            }
            println!("criterion {}: {verdict}: {}: {}", o.id, o.name, o.detail);
        }
    }
    println!(
        "acceptance finished in {:.1}s",
        started.elapsed().as_secs_f64()
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
