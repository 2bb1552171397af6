use std::fmt::Write as _;

use abcov_core::Error;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: &str = "1";

/// JSON Schema (draft 2020-12) every report validates against.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

fn versions() -> Value {
    json!({
        "tool": env!("CARGO_PKG_VERSION"),
        "core": abcov_core::VERSION,
        "schema": SCHEMA_VERSION,
    })
}

pub(crate) fn success(command: &str, echo: Map<String, Value>, payload: Value) -> Value {
    canonical(json!({
        "command": command,
        "input_echo": echo,
        "payload": payload,
        "versions": versions(),
    }))
}

pub(crate) fn failure(command: &str, echo: Map<String, Value>, kind: &str, message: String) -> Value {
    canonical(json!({
        "command": command,
        "input_echo": echo,
        "error": { "kind": kind, "message": message },
        "versions": versions(),
    }))
}

pub(crate) fn domain_failure(command: &str, echo: Map<String, Value>, e: &Error) -> Value {
    failure(command, echo, &error_kind(e), e.to_string())
}

/// Variant name of a library error, e.g. `EmptyModuli`.
pub(crate) fn error_kind(e: &Error) -> String {
    format!("{e:?}").chars().take_while(|c| c.is_alphanumeric()).collect()
}

/// Copy of `v` with every object's keys in sorted order, whatever map
/// type serde_json was built with.
pub fn canonical(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let mut entries: Vec<(String, Value)> = m.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, x)| (k, canonical(x))).collect())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(canonical).collect()),
        other => other,
    }
}

pub(crate) fn to_json_pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values always serialize")
}

pub(crate) fn to_json_line(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values always serialize")
}

/// Argument vector that reproduces a report from its `command` and
/// `input_echo`: `true` becomes a bare flag, `false` is omitted.
pub fn argv_from_report(report: &Value) -> Vec<String> {
    let mut argv = vec!["abcov".to_string()];
    if let Some(cmd) = report.get("command").and_then(Value::as_str) {
        argv.push(cmd.to_string());
    }
    if let Some(echo) = report.get("input_echo").and_then(Value::as_object) {
        argv.extend(echo_flags(echo));
    }
    argv
}

pub(crate) fn echo_flags(echo: &Map<String, Value>) -> Vec<String> {
    let mut flags = Vec::new();
    for (k, v) in echo {
        let flag = format!("--{}", k.replace('_', "-"));
        match v {
            Value::Bool(true) => flags.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => flags.push(format!("{flag}={s}")),
            other => flags.push(format!("{flag}={other}")),
        }
    }
    flags
}

fn is_flat(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(|x| !x.is_object() && (!x.is_array() || is_flat(x))),
        Value::Object(m) => m.is_empty(),
        _ => true,
    }
}

fn inline(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Indented `key: value` rendering of a report.
pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    walk(v, 0, &mut out);
    out.truncate(out.trim_end().len());
    out
}

fn walk(v: &Value, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if is_flat(x) {
                    let _ = writeln!(out, "{pad}{k}: {}", inline(x));
                } else {
                    let _ = writeln!(out, "{pad}{k}:");
                    walk(x, depth + 1, out);
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                if is_flat(x) {
                    let _ = writeln!(out, "{pad}- {}", inline(x));
                } else {
                    let _ = writeln!(out, "{pad}-");
                    walk(x, depth + 1, out);
                }
            }
        }
        scalar => {
            let _ = writeln!(out, "{pad}{}", inline(scalar));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted() {
        let v = canonical(json!({"b": 1, "a": {"d": 2, "c": 3}}));
        assert_eq!(to_json_line(&v), r#"{"a":{"c":3,"d":2},"b":1}"#);
    }

    #[test]
    fn echo_to_flags() {
        let r = json!({"command": "classify", "input_echo": {"group": "Z/2", "ram": "1;1", "oracle": true, "skip": false, "max_states": 10}});
        let mut argv = argv_from_report(&r);
        assert_eq!(argv[..2], ["abcov", "classify"]);
        argv[2..].sort();
        assert_eq!(argv[2..], ["--group=Z/2", "--max-states=10", "--oracle", "--ram=1;1"]);
    }

    #[test]
    fn error_kinds() {
        assert_eq!(error_kind(&Error::EmptyModuli(3)), "EmptyModuli");
        assert_eq!(error_kind(&Error::StateSpaceTooLarge { size: 9, bound: 1 }), "StateSpaceTooLarge");
        assert_eq!(error_kind(&Error::Unbalanced), "Unbalanced");
    }

    #[test]
    fn text_rendering() {
        let v = json!({"a": 1, "m": [[1, 2], [3, 4]], "o": {"x": "y"}});
        assert_eq!(render_text(&v), "a: 1\nm: [[1,2],[3,4]]\no:\n  x: y");
    }
}
