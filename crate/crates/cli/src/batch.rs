//! Batch tables: a JSON array of entries, expanded into rows that are
//! evaluated concurrently and written in spec order as soon as each
//! prefix is complete.
//!
//! Entries are objects tagged by `kind`:
//! - `{"kind": "row", "command": "classify", "args": {"group": "Z/2", "ram": "1;1"}}`
//! - `{"kind": "bielliptic", "genus_min": 2, "genus_max": 8}`
//! - `{"kind": "etale", "max_order": 8, "oracle": true}`
//! - `{"kind": "random_totally_ramified", "count": 10, "max_order": 24, "min_n": 2, "max_n": 8}`

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;

use abcov_core::classify::minimal_k;
use abcov_core::covers::is_totally_ramified;
use abcov_core::oracle::abelian_groups_of_order;
use abcov_core::{FinAbGroup, RamificationData};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Map, Value};

use crate::report::{canonical, echo_flags, failure, to_json_line};
use crate::{evaluate_argv, GlobalOpts, Outcome, EXIT_IO, EXIT_OK, EXIT_USAGE};

const RANDOM_ATTEMPTS: usize = 10_000;

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum Entry {
    Row {
        command: String,
        #[serde(default)]
        args: Map<String, Value>,
    },
    Bielliptic {
        genus_min: u64,
        genus_max: u64,
        #[serde(default)]
        strata: bool,
    },
    Etale {
        max_order: u64,
        #[serde(default)]
        oracle: bool,
    },
    RandomTotallyRamified {
        count: usize,
        max_order: u64,
        min_n: usize,
        max_n: usize,
        #[serde(default = "default_random_command")]
        command: String,
    },
}

fn default_random_command() -> String {
    "picard".into()
}

struct RowSpec {
    command: String,
    args: Map<String, Value>,
    /// set when the entry itself could not be expanded
    invalid: Option<String>,
}

impl RowSpec {
    fn new(command: &str, args: Map<String, Value>) -> Self {
        RowSpec {
            command: command.into(),
            args,
            invalid: None,
        }
    }
}

fn datum_args(d: &RamificationData) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("group".into(), Value::String(d.group().to_string()));
    m.insert("ram".into(), Value::String(d.ram_literal()));
    m
}

fn random_datum(rng: &mut ChaCha8Rng, groups: &[FinAbGroup], min_n: usize, max_n: usize) -> Option<RamificationData> {
    for _ in 0..RANDOM_ATTEMPTS {
        let g = groups.choose(rng)?.clone();
        let n = rng.gen_range(min_n..=max_n);
        let mut pts: Vec<_> = (1..n).map(|_| g.element_at(rng.gen_range(0..g.order()))).collect();
        let total = pts.iter().fold(g.zero(), |acc, h| g.add(&acc, h));
        pts.push(g.neg(&total));
        let d = RamificationData::new(g, pts, 1).ok()?;
        if is_totally_ramified(&d) && minimal_k(&d).0 < d.n() {
            return Some(d);
        }
    }
    None
}

fn expand(entries: Vec<Entry>, seed: u64) -> Vec<RowSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for entry in entries {
        match entry {
            Entry::Row { command, args } => rows.push(RowSpec::new(&command, args)),
            Entry::Bielliptic {
                genus_min,
                genus_max,
                strata,
            } => {
                for g in genus_min..=genus_max {
                    let mut args = Map::new();
                    args.insert("genus".into(), json!(g));
                    args.insert("picard".into(), Value::Bool(true));
                    args.insert("strata".into(), Value::Bool(strata));
                    rows.push(RowSpec::new("bielliptic", args));
                }
            }
            Entry::Etale { max_order, oracle } => {
                for g in (1..=max_order).flat_map(abelian_groups_of_order) {
                    let zero = g.zero();
                    let d = RamificationData::new(g, vec![zero], 1).expect("one marked point");
                    let mut args = datum_args(&d);
                    args.insert("oracle".into(), Value::Bool(oracle));
                    rows.push(RowSpec::new("classify", args));
                }
            }
            Entry::RandomTotallyRamified {
                count,
                max_order,
                min_n,
                max_n,
                command,
            } => {
                let groups: Vec<FinAbGroup> = (2..=max_order).flat_map(abelian_groups_of_order).collect();
                for _ in 0..count {
                    let datum = (min_n >= 1 && min_n <= max_n)
                        .then(|| random_datum(&mut rng, &groups, min_n, max_n))
                        .flatten();
                    rows.push(match datum {
                        Some(d) => RowSpec::new(&command, datum_args(&d)),
                        None => RowSpec {
                            command: command.clone(),
                            args: Map::new(),
                            invalid: Some("no totally ramified datum in the requested range".into()),
                        },
                    });
                }
            }
        }
    }
    rows
}

fn evaluate_row(index: usize, row: &RowSpec, global: &GlobalOpts) -> Value {
    let report = match &row.invalid {
        Some(msg) => failure(&row.command, row.args.clone(), "InvalidSpec", msg.clone()),
        None => {
            let mut argv = vec![row.command.clone(), format!("--max-states={}", global.max_states)];
            argv.extend(echo_flags(&row.args));
            match evaluate_argv(&argv, global) {
                Outcome::Done { report, .. } => report,
                Outcome::Usage(msg) => failure(&row.command, row.args.clone(), "Usage", msg),
            }
        }
    };
    let mut report = report;
    report["row"] = json!(index);
    canonical(report)
}

fn summary(report: &Value) -> (String, String) {
    if let Some(e) = report.get("error") {
        let kind = e["kind"].as_str().unwrap_or("error").to_string();
        return (kind, e["message"].as_str().unwrap_or("").to_string());
    }
    let mut parts = Vec::new();
    if let Some(p) = report.get("payload").and_then(Value::as_object) {
        for (k, v) in p {
            if !(v.is_object() || v.is_array() || v.is_null()) {
                parts.push(format!("{k}={}", v.as_str().map_or_else(|| v.to_string(), String::from)));
            }
        }
    }
    ("ok".into(), parts.join(" "))
}

fn text_line(report: &Value) -> String {
    let row = report["row"].as_u64().unwrap_or(0);
    let command = report["command"].as_str().unwrap_or("");
    let (status, detail) = summary(report);
    format!("{row:>5}  {command:<10}  {status:<18}  {detail}")
}

pub(crate) fn run(
    spec: &Path,
    output: Option<&Path>,
    global: &GlobalOpts,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let text = match std::fs::read_to_string(spec) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", spec.display());
            return EXIT_USAGE;
        }
    };
    let entries: Vec<Entry> = if text.trim().is_empty() {
        Vec::new()
    } else {
        match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => {
                let _ = writeln!(err, "error: invalid batch spec {}: {e}", spec.display());
                return EXIT_USAGE;
            }
        }
    };
    let rows = expand(entries, global.seed);

    let mut file_sink;
    let sink: &mut dyn Write = match output {
        Some(path) => match File::create(path) {
            Ok(f) => {
                file_sink = BufWriter::new(f);
                &mut file_sink
            }
            Err(e) => {
                let _ = writeln!(err, "error: cannot write {}: {e}", path.display());
                return EXIT_IO;
            }
        },
        None => out,
    };
    let as_text = global.text_output();
    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(rows.len().max(1));
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, Value)>();
    let mut status = EXIT_OK;
    std::thread::scope(|scope| {
        for _ in 0..workers {
            let tx = tx.clone();
            let (rows, next) = (&rows, &next);
            scope.spawn(move || loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(row) = rows.get(i) else { break };
                if tx.send((i, evaluate_row(i, row, global))).is_err() {
                    break;
                }
            });
        }
        drop(tx);
        let mut pending = BTreeMap::new();
        let mut written = 0;
        for (i, report) in rx {
            pending.insert(i, report);
            while let Some(report) = pending.remove(&written) {
                let line = if as_text { text_line(&report) } else { to_json_line(&report) };
                if writeln!(sink, "{line}").and_then(|_| sink.flush()).is_err() {
                    status = EXIT_IO;
                }
                written += 1;
            }
        }
    });
    status
}
