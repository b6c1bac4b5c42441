use std::fs;

use probe_compact::harness::{
    generate_workload, Differential, KeyUniverse, Outcome, Trace, TraceHeader, WorkloadSpec,
    RNG_ALGORITHM,
};
use probe_compact::{TableParams, Verdict};
use rayon::prelude::*;

use crate::{Failure, FuzzArgs};

pub fn run(args: &FuzzArgs) -> Result<(), Failure> {
    let params = TableParams::new(args.capacity, args.step).validate()?;
    let mut harness = Differential::new(params)?.check_every(args.check_every);
    if args.no_compress {
        harness = harness.without_compression();
    }
    let universe = KeyUniverse::centered(
        args.universe
            .unwrap_or((args.capacity as u64).saturating_mul(2)),
    );
    let spec_for = |seed| WorkloadSpec {
        mix: args.mix,
        ..WorkloadSpec::mixed(seed, args.ops, universe)
    };
    // Surface generator errors (empty universe, zero mix) before fanning out.
    generate_workload(&WorkloadSpec {
        op_count: 0,
        ..spec_for(args.seed)
    })?;

    let seeds = args.seed..args.seed.saturating_add(args.seeds);
    let mut failures: Vec<(u64, Verdict)> = seeds
        .into_par_iter()
        .filter_map(|seed| {
            let ops = generate_workload(&spec_for(seed)).expect("spec checked above");
            let verdict = harness.run(&ops);
            (!verdict.passed).then_some((seed, verdict))
        })
        .collect();

    if failures.is_empty() {
        println!(
            "{} seeds passed ({} ops each, capacity {}, step {})",
            args.seeds, args.ops, params.capacity, params.step
        );
        return Ok(());
    }

    failures.sort_by_key(|(seed, _)| *seed);
    let (seed, verdict) = &failures[0];
    let ops = generate_workload(&spec_for(*seed)).expect("spec checked above");
    let trace = Trace {
        header: TraceHeader {
            capacity: Some(params.capacity),
            step: Some(params.step),
            seed: Some(*seed),
            rng: Some(RNG_ALGORITHM.to_string()),
        },
        ops: ops[..verdict.ops_applied].to_vec(),
    };
    fs::create_dir_all(&args.out_dir)?;
    let trace_path = args.out_dir.join(format!("seed-{seed}.trace"));
    let verdict_path = args.out_dir.join(format!("seed-{seed}.verdict.json"));
    fs::write(&trace_path, trace.to_string())?;
    fs::write(&verdict_path, serde_json::to_string_pretty(verdict)? + "\n")?;

    let what = match &verdict.first_divergence {
        Some(d)
            if d.compact_result == Outcome::TableFull
                || d.tombstone_result == Outcome::TableFull =>
        {
            format!(
                "filled the table at op {} ({}); use a smaller --universe or fewer --ops",
                d.op_index, d.op
            )
        }
        Some(d) => format!("diverged at op {} ({})", d.op_index, d.op),
        None => format!(
            "{} invariant check(s) failed",
            verdict.invariant_failures.len()
        ),
    };
    Err(Failure::Check(format!(
        "{} of {} seeds failed; seed {seed} {what}\nwrote {} and {}",
        failures.len(),
        args.seeds,
        trace_path.display(),
        verdict_path.display()
    )))
}
