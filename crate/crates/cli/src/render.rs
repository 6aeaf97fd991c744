//! Plain-text rendering of JSON reports.

use std::fmt::Write;

use serde_json::Value;

fn number(x: &Value) -> String {
    match (x.as_i64(), x.as_u64(), x.as_f64()) {
        (Some(i), _, _) => i.to_string(),
        (_, Some(u), _) => u.to_string(),
        (_, _, Some(f)) if f == f.trunc() && f.abs() < 1e15 => format!("{f:.1}"),
        (_, _, Some(f)) => format!("{f:.4}"),
        _ => x.to_string(),
    }
}

fn scalar(x: &Value) -> Option<String> {
    match x {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(_) => Some(number(x)),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) if items.iter().all(|i| !i.is_array() && !i.is_object()) => {
            Some(items.iter().map(|i| scalar(i).unwrap_or_default()).collect::<Vec<_>>().join(" "))
        }
        _ => None,
    }
}

fn walk(out: &mut String, key: &str, x: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    if let Some(s) = scalar(x) {
        let _ = writeln!(out, "{pad}{key}: {s}");
        return;
    }
    let _ = writeln!(out, "{pad}{key}:");
    match x {
        Value::Object(map) => {
            for (k, v) in map {
                walk(out, k, v, depth + 1);
            }
        }
        Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                walk(out, &format!("[{}]", i + 1), v, depth + 1);
            }
        }
        _ => unreachable!("scalars handled above"),
    }
}

/// Indented `key: value` lines; numbers with four decimals.
pub fn text(report: &Value) -> String {
    let mut out = String::new();
    match report {
        Value::Object(map) => {
            for (k, v) in map {
                walk(&mut out, k, v, 0);
            }
        }
        other => walk(&mut out, "result", other, 0),
    }
    out
}
