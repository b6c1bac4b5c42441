use std::fs;
use std::io::{self, Write};

use probe_compact::harness::parse_trace;
use probe_compact::introspection::measure_op_cost;
use probe_compact::{
    CompactTable, Error, Inspect, ProbeStatsF64, ProbeTable, TableKind, TableParams, TombstoneTable,
};

use crate::{Failure, TraceArgs};

pub fn run(args: &TraceArgs) -> Result<(), Failure> {
    let text =
        fs::read_to_string(&args.file).map_err(|e| format!("{}: {e}", args.file.display()))?;
    let trace = parse_trace(&text).map_err(|e| format!("{}: {e}", args.file.display()))?;

    let capacity = args
        .capacity
        .or(trace.header.capacity)
        .ok_or("no capacity in the trace header; pass --capacity")?;
    let step = args.step.or(trace.header.step).unwrap_or(1);
    let mut params = TableParams::new(capacity, step);
    let kind = TableKind::from(args.table);
    if args.grow {
        if kind == TableKind::Tombstone {
            return Err(Failure::Usage(
                "--grow applies to the compact table only".into(),
            ));
        }
        params = params.with_growth(
            probe_compact::probing::DEFAULT_GROWTH_LOAD_FACTOR,
            probe_compact::probing::DEFAULT_GROWTH_MULTIPLIER,
        );
    }

    match kind {
        TableKind::Compact => replay(CompactTable::new(params)?, &trace.ops),
        TableKind::Tombstone => replay(TombstoneTable::new(params)?, &trace.ops),
    }
}

fn replay<T: ProbeTable + Inspect>(
    mut table: T,
    ops: &[probe_compact::OpRecord],
) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    for (i, &op) in ops.iter().enumerate() {
        match measure_op_cost(&mut table, op) {
            Ok((result, _)) => writeln!(out, "{}", if result { '+' } else { '-' })?,
            Err(e @ Error::TableFull { .. }) => {
                out.flush()?;
                return Err(Failure::Usage(format!("op {} ({op}): {e}", i + 1)));
            }
            Err(e) => return Err(e.into()),
        }
    }
    let stats: ProbeStatsF64 = table.probe_stats();
    writeln!(out, "{}", serde_json::to_string(&stats)?)?;
    out.flush()?;
    Ok(())
}
