use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};

use probe_compact::bench::{run_churn, run_same_hash, BenchConfig, BENCH_COLUMNS};
use probe_compact::BenchRowF64;
use serde_json::{json, Map, Value};

use crate::{BenchArgs, Failure, Format};

pub const SCHEMA: u32 = 1;

pub fn run(args: &BenchArgs) -> Result<(), Failure> {
    let (rows, summary, failures) = if args.adversarial {
        adversarial(args)?
    } else {
        churn(args)?
    };
    let text = match args.format {
        Format::Csv => csv(&rows, &summary),
        Format::Json => {
            let doc = json!({ "schema": SCHEMA, "rows": rows, "summary": summary });
            serde_json::to_string_pretty(&doc)? + "\n"
        }
    };
    match &args.output {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("\n")))
    }
}

type Outcome = (Vec<BenchRowF64>, Map<String, Value>, Vec<String>);

fn churn(args: &BenchArgs) -> Result<Outcome, Failure> {
    let config = BenchConfig {
        capacity: args.capacity,
        step: args.step,
        live_target: args.live_target,
        churn_rounds: args.rounds,
        churn_batch: args.batch,
        seed: args.seed,
    };
    config.validate()?;
    let report = run_churn::<f64>(&config)?;
    let failures = report.directional_failures();
    let Value::Object(mut summary) = serde_json::to_value(&report.parity)? else {
        unreachable!("a struct serializes to an object")
    };
    summary.insert(
        "scan_to_insert_ratio".into(),
        json!(report.parity.scan_to_insert_ratio()),
    );
    summary.insert(
        "tombstone_rejected_keys".into(),
        json!(report.tombstone_rejected_keys),
    );
    Ok((report.rows, summary, failures))
}

fn adversarial(args: &BenchArgs) -> Result<Outcome, Failure> {
    let report = run_same_hash::<f64>(args.capacity, args.step, args.batch)?;
    let mut failures = Vec::new();
    if report.tombstone_home_miss < report.compact_home_miss {
        failures.push(format!(
            "tombstone miss from home {} below compact {}",
            report.tombstone_home_miss, report.compact_home_miss
        ));
    }
    let mut summary = Map::new();
    summary.insert("same_hash_keys".into(), json!(report.same_hash_keys));
    summary.insert(
        "tombstone_home_miss".into(),
        json!(report.tombstone_home_miss),
    );
    summary.insert("compact_home_miss".into(), json!(report.compact_home_miss));
    Ok((report.rows, summary, failures))
}

fn csv(rows: &[BenchRowF64], summary: &Map<String, Value>) -> String {
    let mut out = format!("# schema={SCHEMA}\n{}\n", BENCH_COLUMNS.join(","));
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.round,
            r.table_kind,
            r.mean_success,
            r.mean_miss,
            r.max_probe,
            r.load_factor,
            r.tombstone_count,
            r.relocations_this_round
        );
    }
    for (k, v) in summary {
        let _ = writeln!(out, "# summary {k}={v}");
    }
    out
}
