use std::fmt::Write;

use serde_json::Value;

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "-".to_string(),
        Value::Bool(b) => if *b { "yes" } else { "no" }.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.3e}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn checks_table(out: &mut String, report: &Value) {
    let inst = &report["instance"];
    let _ = writeln!(
        out,
        "instance seed={} n={} m={} rankK={} kind={}",
        cell(&inst["seed"]),
        cell(&inst["n"]),
        cell(&inst["m"]),
        cell(&inst["rankK"]),
        cell(&inst["kind"])
    );
    let _ = writeln!(out, "prng: {}", cell(&inst["prng"]));
    let _ = writeln!(
        out,
        "{:<36} {:>5} {:>5} {:>11} {:>11}  result",
        "check", "hyp", "holds", "residual", "tolerance"
    );
    for c in report["checks"].as_array().into_iter().flatten() {
        let hyp = c["hypothesisMet"].as_bool().unwrap_or(false);
        let holds = c["conclusionHolds"].as_bool().unwrap_or(false);
        let result = match (hyp, holds) {
            (false, _) => "vacuous",
            (true, true) => "pass",
            (true, false) => "FAIL",
        };
        let _ = writeln!(
            out,
            "{:<36} {:>5} {:>5} {:>11} {:>11}  {}",
            cell(&c["name"]),
            cell(&c["hypothesisMet"]),
            cell(&c["conclusionHolds"]),
            cell(&c["residual"]),
            cell(&c["tolerance"]),
            result
        );
    }
    let _ = writeln!(
        out,
        "overall: {}",
        if report["pass"].as_bool() == Some(true) {
            "PASS"
        } else {
            "FAIL"
        }
    );
}

fn key_values(out: &mut String, prefix: &str, v: &Value) {
    if let Value::Object(map) = v {
        for (k, val) in map {
            let key = if prefix.is_empty() {
                k.clone()
            } else {
                format!("{prefix}.{k}")
            };
            key_values(out, &key, val);
        }
    } else {
        let _ = writeln!(out, "{prefix:<28} {}", cell(v));
    }
}

/// Plain-text rendering: suite reports as tables, anything else as
/// `key value` lines.
pub fn render(v: &Value) -> String {
    let mut out = String::new();
    if v.get("checks").is_some() {
        checks_table(&mut out, v);
    } else if let Some(reports) = v.get("reports").and_then(Value::as_array) {
        let _ = writeln!(
            out,
            "batch baseSeed={} count={} kind={} passed={} failed={}",
            cell(&v["baseSeed"]),
            cell(&v["count"]),
            cell(&v["kind"]),
            cell(&v["passed"]),
            cell(&v["failed"])
        );
        for r in reports.iter().filter(|r| r["pass"].as_bool() != Some(true)) {
            out.push('\n');
            checks_table(&mut out, r);
        }
        let _ = writeln!(
            out,
            "\noverall: {}",
            if v["pass"].as_bool() == Some(true) {
                "PASS"
            } else {
                "FAIL"
            }
        );
    } else {
        key_values(&mut out, "", v);
    }
    out
}
