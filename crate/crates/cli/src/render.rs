//! Text output. Every record is built as JSON first; csv and pretty are
//! views of the same values.

use serde_json::Value;

use crate::args::Format;

pub fn render(records: &[Value], format: Format) -> String {
    match format {
        Format::Json => records.iter().map(|r| format!("{r}\n")).collect(),
        Format::Csv => csv(records),
        Format::Pretty => records.iter().map(pretty).collect(),
    }
}

fn rational_text(v: &Value) -> Option<String> {
    let num = v.get("num")?.as_str()?;
    let den = v.get("den")?.as_str()?;
    Some(if den == "1" {
        num.to_string()
    } else {
        format!("{num}/{den}")
    })
}

/// Real and imaginary parts as text, keeping exact rationals exact.
fn parts(v: &Value) -> (String, String) {
    if let Some(r) = rational_text(v) {
        return (r, "0".into());
    }
    let part = |p: Option<&Value>| match p {
        Some(Value::String(s)) => s.clone(),
        Some(other) => rational_text(other).unwrap_or_default(),
        None => "0".into(),
    };
    (part(v.get("re")), part(v.get("im")))
}

fn sig6(text: &str) -> String {
    if text.contains('/') || !text.contains(['.', 'e']) {
        return text.to_string();
    }
    match text.parse::<f64>() {
        Ok(0.0) => "0".into(),
        Ok(x) if (1e-4..1e6).contains(&x.abs()) => {
            let s = format!("{:.*}", (5 - x.abs().log10().floor() as i32).max(0) as usize, x);
            if s.contains('.') {
                s.trim_end_matches('0').trim_end_matches('.').to_string()
            } else {
                s
            }
        }
        Ok(x) => format!("{x:.5e}"),
        Err(_) => text.to_string(),
    }
}

fn is_zero(s: &str) -> bool {
    s == "0" || s.parse::<f64>().is_ok_and(|x| x == 0.0)
}

fn scalar_pretty(v: &Value) -> String {
    let (re, im) = parts(v);
    let (re, im) = (sig6(&re), sig6(&im));
    match (is_zero(&re), is_zero(&im)) {
        (_, true) => re,
        (true, false) => format!("{im}i"),
        (false, false) => {
            let (sign, mag) = match im.strip_prefix('-') {
                Some(m) => ('-', m.to_string()),
                None => ('+', im),
            };
            format!("({re} {sign} {mag}i)")
        }
    }
}

fn poly_pretty(coeffs: &[Value]) -> String {
    let mut terms = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        let (re, im) = parts(c);
        if is_zero(&re) && is_zero(&im) {
            continue;
        }
        let c = scalar_pretty(c);
        terms.push(match k {
            0 => c,
            1 => format!("{c} x"),
            _ => format!("{c} x^{k}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ").replace("+ -", "- ")
    }
}

fn str_field<'a>(r: &'a Value, key: &str) -> &'a str {
    r.get(key).and_then(Value::as_str).unwrap_or("")
}

fn verdict(v: &Value) -> String {
    let pass = v["pass"].as_bool().unwrap_or(false);
    let word = if pass { "pass" } else { "FAIL" };
    match v.get("max_residual").or_else(|| v.get("max_deviation")) {
        Some(m) => format!("{word} (max residual {})", sig6(m.as_str().unwrap_or(""))),
        None => word.to_string(),
    }
}

fn pretty(r: &Value) -> String {
    let mut out = String::new();
    match str_field(r, "kind") {
        "moments" => {
            out += &format!("moments of {} ({})\n", str_field(r, "weight"), str_field(r, "source"));
            for (k, v) in r["values"].as_array().into_iter().flatten().enumerate() {
                out += &format!("  m_{k} = {}\n", scalar_pretty(v));
            }
        }
        "polynomial" | "pattern" => {
            let n = &r["degree"];
            let label = match r.get("pattern") {
                Some(p) => format!("P_{n} pattern {p}"),
                None => format!("P_{n}"),
            };
            match r.get("coeffs").and_then(Value::as_array) {
                Some(c) => out += &format!("{label}(x) = {}\n", poly_pretty(c)),
                None => out += &format!("{label}: {}\n", str_field(r, "status")),
            }
            if let Some(g) = r.get("normalization") {
                out += &format!("  G_{n} = {}\n", scalar_pretty(g));
            }
            if let Some(v) = r.get("verification") {
                out += &format!("  verification: {}\n", verdict(v));
            }
        }
        "enumeration" => {
            out += &format!(
                "degree {}: {} patterns, {} solutions, {} distinct\n",
                r["degree"], r["patterns"], r["solutions"], r["distinct"]
            );
        }
        "verification" => {
            out += &format!("record {} (degree {}): {}\n", r["record"], r["degree"], verdict(r));
        }
        _ => out += &format!("{r}\n"),
    }
    out
}

fn csv(records: &[Value]) -> String {
    let kind = records.first().map(|r| str_field(r, "kind")).unwrap_or("");
    let mut out = String::new();
    match kind {
        "moments" => {
            out += "n,re,im\n";
            for r in records {
                for (k, v) in r["values"].as_array().into_iter().flatten().enumerate() {
                    let (re, im) = parts(v);
                    out += &format!("{k},{re},{im}\n");
                }
            }
        }
        "verification" => {
            out += "record,degree,sample,residual,pass\n";
            for r in records {
                let pass = r["pass"].as_bool().unwrap_or(false);
                let residuals = r
                    .get("residuals")
                    .or_else(|| r.get("linear_conditions"))
                    .and_then(Value::as_array);
                for (i, res) in residuals.into_iter().flatten().enumerate() {
                    out += &format!(
                        "{},{},{i},{},{pass}\n",
                        r["record"],
                        r["degree"],
                        res.as_str().unwrap_or("")
                    );
                }
            }
        }
        _ => {
            out += "degree,pattern,status,power,re,im\n";
            for r in records {
                let Some(coeffs) = r.get("coeffs").and_then(Value::as_array) else {
                    continue;
                };
                let pattern = r
                    .get("pattern")
                    .and_then(Value::as_array)
                    .map(|p| p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" "))
                    .unwrap_or_default();
                let status = r.get("status").and_then(Value::as_str).unwrap_or("ok");
                for (k, c) in coeffs.iter().enumerate() {
                    let (re, im) = parts(c);
                    out += &format!("{},{pattern},{status},{k},{re},{im}\n", r["degree"]);
                }
            }
        }
    }
    out
}
