use std::io::Read;

use orthoieq_core::hankel::{hankel_condition, normalization, solve_polynomial};
use orthoieq_core::moments::{moments, MomentSequence};
use orthoieq_core::numeric::{GaussRational, PrecisionContext, Scalar};
use orthoieq_core::poly::{inner_moment, shifted_inner, Polynomial};
use orthoieq_core::serial::{
    arbitrary_f_to_json, float_to_string, moments_to_json, polynomial_from_json, polynomial_to_json, report_to_json,
    scalar_to_json,
};
use orthoieq_core::variant::{
    check_arbitrary_f, default_samples, enumerate_multiplicative, full_pattern, parity_pattern, solve_functional,
    solve_linear_shift, solve_multiplicative, verify, EquationForm,
};
use orthoieq_core::weight::{normalize, parse_rational, parse_weight, Bound, Interval, Preset, Weight};
use orthoieq_core::{Error, Expr, Result};
use rug::{Float, Rational};
use serde_json::{json, Map, Value};

use crate::args::{DegreeArgs, PresetName, VariantArgs, VariantName, WeightArgs};

/// Largest degree for pattern enumeration.
const MAX_ENUMERATE: usize = 12;

/// Records to print plus whether any verification failed.
pub struct Outcome {
    pub records: Vec<Value>,
    pub verification_failed: bool,
}

fn rational_arg(name: &str, text: Option<&String>) -> Result<Rational> {
    let text = text.ok_or_else(|| Error::Config(format!("--{name} is required for this weight")))?;
    parse_rational(text).ok_or_else(|| Error::Config(format!("--{name}: `{text}` is not a rational number")))
}

/// `a`, `a+bi`, `a-bi`, `bi` or `i` with rational parts.
pub fn parse_gauss(text: &str) -> Result<GaussRational> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("`{text}` is not a (complex) rational number"));
    let Some(body) = t.strip_suffix('i') else {
        return Ok(GaussRational::real(parse_rational(&t).ok_or_else(bad)?));
    };
    // split at the last sign that is not the leading one or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        s => s.strip_prefix('+').unwrap_or(s),
    };
    Ok(GaussRational::new(
        parse_rational(re).ok_or_else(bad)?,
        parse_rational(im).ok_or_else(bad)?,
    ))
}

pub fn build_weight(args: &WeightArgs, ctx: &PrecisionContext) -> Result<Weight> {
    if args.contour {
        return Ok(Weight::contour(args.winding, ctx));
    }
    if let Some(expr) = &args.expr {
        let alpha = Bound::parse(&args.interval[0])?;
        let beta = Bound::parse(&args.interval[1])?;
        let w = parse_weight(expr, Interval::new(alpha, beta)?)?;
        return normalize(&w, ctx);
    }
    let Some(name) = args.preset else {
        return Err(Error::Config(
            "choose a weight with --preset, --expr or --contour".into(),
        ));
    };
    let preset = match name {
        PresetName::Laguerre => Preset::Laguerre {
            gamma: rational_arg("gamma", args.gamma.as_ref())?,
        },
        PresetName::JacobiAdd => Preset::JacobiAdd {
            p: rational_arg("p", args.p.as_ref())?,
            q: rational_arg("q", args.q.as_ref())?,
        },
        PresetName::JacobiMult => Preset::JacobiMult {
            p: rational_arg("p", args.p.as_ref())?,
            q: rational_arg("q", args.q.as_ref())?,
        },
        PresetName::ChebyshevU2Add => Preset::ChebyshevU2Add,
        PresetName::ChebyshevU2Mult => Preset::ChebyshevU2Mult,
        PresetName::Uniform => Preset::UniformSymmetric,
    };
    normalize(&Weight::preset(preset)?, ctx)
}

fn parse_pattern(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<usize>()
                .map_err(|_| Error::Config(format!("pattern entry `{s}` is not an index")))
        })
        .collect()
}

fn function_arg(v: &VariantArgs) -> Result<Expr> {
    let text =
        v.f.as_ref()
            .ok_or_else(|| Error::Config("--f is required for this variant".into()))?;
    Expr::parse(text)
}

/// The equation form for degree `n`.
pub fn build_form(v: &VariantArgs, n: usize, ctx: &PrecisionContext) -> Result<EquationForm> {
    if v.variant != VariantName::Multiplicative && (v.enumerate || v.parity || v.pattern.is_some()) {
        return Err(Error::Config(
            "--pattern, --parity and --enumerate apply to the multiplicative variant".into(),
        ));
    }
    Ok(match v.variant {
        VariantName::Additive => EquationForm::Additive,
        VariantName::Multiplicative => {
            let pattern = if v.parity {
                parity_pattern(n)
            } else if let Some(p) = &v.pattern {
                parse_pattern(p)?
            } else {
                full_pattern(n)
            };
            EquationForm::Multiplicative { pattern }
        }
        VariantName::Shift => {
            let a = v.a.as_deref().map(parse_gauss).transpose()?.unwrap_or_default();
            let b =
                v.b.as_deref()
                    .map(parse_gauss)
                    .transpose()?
                    .ok_or_else(|| Error::Config("--b is required for the shift variant".into()))?;
            EquationForm::LinearShift {
                a: ctx.from_gauss(a),
                b: ctx.from_gauss(b),
            }
        }
        VariantName::Functional => EquationForm::Functional { f: function_arg(v)? },
        VariantName::ArbitraryF => EquationForm::ArbitraryF { f: function_arg(v)? },
    })
}

fn header(kind: &str, ctx: &PrecisionContext, w: &Weight) -> Map<String, Value> {
    let mut o = Map::new();
    o.insert("kind".into(), json!(kind));
    o.insert("weight".into(), json!(w.describe()));
    o.insert("mode".into(), json!(ctx.mode()));
    o.insert("precision".into(), json!(ctx.digits()));
    o
}

pub fn cmd_moments(args: &WeightArgs, count: usize, ctx: &PrecisionContext) -> Result<Outcome> {
    let w = build_weight(args, ctx)?;
    let m = moments(&w, count, ctx)?;
    let mut rec = header("moments", ctx, &w);
    if let Value::Object(body) = moments_to_json(&m, ctx) {
        rec.extend(body);
    }
    Ok(Outcome {
        records: vec![Value::Object(rec)],
        verification_failed: false,
    })
}

fn solve(form: &EquationForm, w: &Weight, m: &MomentSequence, n: usize, ctx: &PrecisionContext) -> Result<Polynomial> {
    match form {
        EquationForm::Additive => solve_polynomial(m, n, ctx),
        EquationForm::Multiplicative { pattern } => solve_multiplicative(m, n, pattern, ctx),
        EquationForm::LinearShift { a, b } => solve_linear_shift(m, n, a, b, ctx),
        EquationForm::Functional { f } => solve_functional(w, f, n, ctx),
        EquationForm::ArbitraryF { f } => {
            if f.as_polynomial().as_deref() == Some(&[Rational::new(), Rational::from(1)][..]) {
                solve_polynomial(m, n, ctx)
            } else {
                Err(Error::Config(
                    "the arbitrary-f variant is verification-only unless f is the identity".into(),
                ))
            }
        }
    }
}

/// Deviations of the linear conditions that define the solution, used for
/// contour weights where substitution is not available.
fn linear_conditions(p: &Polynomial, form: &EquationForm, m: &MomentSequence, ctx: &PrecisionContext) -> Result<Value> {
    let n = p.degree();
    let one = ctx.one();
    let delta = |k: usize| if k == 0 { ctx.one() } else { ctx.zero() };
    let devs: Vec<Scalar> = match form {
        EquationForm::Additive => (0..=n)
            .map(|k| Ok(&inner_moment(p, k, m)? - &delta(k)))
            .collect::<Result<_>>()?,
        EquationForm::Multiplicative { pattern } => pattern
            .iter()
            .chain(std::iter::once(&n))
            .map(|&k| Ok(&inner_moment(p, k, m)? - &one))
            .collect::<Result<_>>()?,
        EquationForm::LinearShift { a, b } => (0..=n)
            .map(|k| Ok(&shifted_inner(p, k, a, b, m)? - &delta(k)))
            .collect::<Result<_>>()?,
        _ => {
            return Err(Error::Config(
                "contour weights support the additive, multiplicative and shift variants".into(),
            ))
        }
    };
    let bits = ctx.bits();
    let max = devs.iter().fold(Float::new(bits), |a, d| a.max(&d.abs(bits)));
    let pass = if ctx.is_exact() {
        devs.iter().all(Scalar::is_zero)
    } else {
        max <= ctx.tol(15)
    };
    Ok(json!({
        "linear_conditions": devs.iter().map(|d| float_to_string(&d.abs(bits), 6)).collect::<Vec<_>>(),
        "max_deviation": float_to_string(&max, 6),
        "pass": pass,
    }))
}

/// Verification block for one polynomial: substitution for real weights,
/// linear conditions for contour weights.
fn check(
    p: &Polynomial,
    w: &Weight,
    form: &EquationForm,
    samples: &[Scalar],
    ctx: &PrecisionContext,
) -> Result<(Value, bool)> {
    let value = if w.is_contour() {
        let m = moments(w, 2 * p.degree() + 2, ctx)?;
        linear_conditions(p, form, &m, ctx)?
    } else {
        let r = verify(p, w, form, samples, ctx)?;
        let mut v = report_to_json(&r, ctx);
        if let EquationForm::ArbitraryF { f } = form {
            let a = check_arbitrary_f(p, f, w, p.degree(), ctx)?;
            let pass = r.pass && a.pass;
            v["conditions"] = arbitrary_f_to_json(&a, ctx);
            v["pass"] = json!(pass);
        }
        v
    };
    let pass = value["pass"].as_bool().unwrap_or(false);
    Ok((value, pass))
}

fn degree_list(d: &DegreeArgs) -> Result<Vec<usize>> {
    let last = d.to.unwrap_or(d.n);
    if last < d.n {
        return Err(Error::Config(format!("--to {last} is below the first degree {}", d.n)));
    }
    if last > d.max_degree {
        return Err(Error::Config(format!(
            "degree {last} exceeds --max-degree {}; raise it (and usually --precision) explicitly",
            d.max_degree
        )));
    }
    Ok((d.n..=last).collect())
}

fn samples_for(w: &Weight, seed: u64, ctx: &PrecisionContext) -> Vec<Scalar> {
    if w.is_contour() {
        Vec::new()
    } else {
        default_samples(w, seed, ctx)
    }
}

pub fn cmd_poly(
    wargs: &WeightArgs,
    degrees: &DegreeArgs,
    vargs: &VariantArgs,
    no_verify: bool,
    seed: u64,
    ctx: &PrecisionContext,
) -> Result<Outcome> {
    let w = build_weight(wargs, ctx)?;
    let degrees = degree_list(degrees)?;
    let samples = samples_for(&w, seed, ctx);
    let mut out = Outcome {
        records: Vec::new(),
        verification_failed: false,
    };
    if vargs.enumerate {
        for &n in &degrees {
            enumerate_degree(&w, n, vargs, no_verify, &samples, ctx, &mut out)?;
        }
        return Ok(out);
    }
    let top = *degrees.last().expect("nonempty range");
    let m = moments(&w, 2 * top + 2, ctx)?;
    for n in degrees {
        let form = build_form(vargs, n, ctx)?;
        let p = solve(&form, &w, &m, n, ctx)?;
        let mut rec = header("polynomial", ctx, &w);
        rec.insert("degree".into(), json!(n));
        rec.insert("variant".into(), json!(form.to_string()));
        rec.insert("coeffs".into(), polynomial_to_json(&p, ctx.digits()));
        if let EquationForm::Multiplicative { pattern } = &form {
            rec.insert("pattern".into(), json!(pattern));
        }
        if matches!(form, EquationForm::Additive) {
            let cond = hankel_condition(&m, n, ctx)?;
            rec.insert("det_b".into(), scalar_to_json(&cond.det, ctx.digits()));
            rec.insert("hankel_valid".into(), json!(cond.valid));
            rec.insert(
                "normalization".into(),
                scalar_to_json(&normalization(&m, n, ctx)?, ctx.digits()),
            );
        }
        rec.insert("notes".into(), json!(form.notes()));
        if !no_verify {
            let (v, pass) = check(&p, &w, &form, &samples, ctx)?;
            out.verification_failed |= !pass;
            rec.insert("verification".into(), v);
        }
        out.records.push(Value::Object(rec));
    }
    Ok(out)
}

fn enumerate_degree(
    w: &Weight,
    n: usize,
    vargs: &VariantArgs,
    no_verify: bool,
    samples: &[Scalar],
    ctx: &PrecisionContext,
    out: &mut Outcome,
) -> Result<()> {
    if vargs.variant != VariantName::Multiplicative {
        return Err(Error::Config(
            "--enumerate applies to the multiplicative variant".into(),
        ));
    }
    if n == 0 || n > MAX_ENUMERATE {
        return Err(Error::Config(format!(
            "--enumerate needs 1 <= n <= {MAX_ENUMERATE}, got {n}"
        )));
    }
    let m = moments(w, 2 * n + 1, ctx)?;
    let e = enumerate_multiplicative(&m, n, ctx)?;
    let mut solutions = 0;
    for o in &e.outcomes {
        let mut rec = header("pattern", ctx, w);
        rec.insert("degree".into(), json!(n));
        rec.insert("pattern".into(), json!(o.pattern));
        match &o.result {
            Ok(p) => {
                solutions += 1;
                rec.insert("status".into(), json!("ok"));
                rec.insert("coeffs".into(), polynomial_to_json(p, ctx.digits()));
                if !no_verify {
                    let form = EquationForm::Multiplicative {
                        pattern: o.pattern.clone(),
                    };
                    let (v, pass) = check(p, w, &form, samples, ctx)?;
                    out.verification_failed |= !pass;
                    rec.insert("verification".into(), v);
                }
            }
            Err(err) => {
                let status = match err {
                    Error::InconsistentPattern { .. } => "inconsistent",
                    _ => "singular",
                };
                rec.insert("status".into(), json!(status));
                rec.insert("error".into(), json!(err.to_string()));
            }
        }
        out.records.push(Value::Object(rec));
    }
    let mut summary = header("enumeration", ctx, w);
    summary.insert("degree".into(), json!(n));
    summary.insert("patterns".into(), json!(e.outcomes.len()));
    summary.insert("solutions".into(), json!(solutions));
    summary.insert("distinct".into(), json!(e.distinct));
    out.records.push(Value::Object(summary));
    Ok(())
}

fn read_records(path: &std::path::Path) -> Result<Vec<Value>> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::Config(format!("reading stdin: {e}")))?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?
    };
    let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
    let per_line: std::result::Result<Vec<Value>, _> = lines.iter().map(|l| serde_json::from_str(l)).collect();
    match per_line {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => {
            let v: Value = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{} is not JSON: {e}", path.display())))?;
            Ok(match v {
                Value::Array(items) if items.iter().all(Value::is_object) => items,
                other => vec![other],
            })
        }
    }
}

pub fn cmd_verify(
    wargs: &WeightArgs,
    vargs: &VariantArgs,
    file: &std::path::Path,
    sample_args: &[String],
    seed: u64,
    ctx: &PrecisionContext,
) -> Result<Outcome> {
    if vargs.enumerate {
        return Err(Error::Config("--enumerate cannot be combined with --poly".into()));
    }
    let w = build_weight(wargs, ctx)?;
    let samples = if sample_args.is_empty() {
        samples_for(&w, seed, ctx)
    } else {
        sample_args
            .iter()
            .map(|s| parse_gauss(s).map(|g| ctx.from_gauss(g)))
            .collect::<Result<_>>()?
    };
    let mut out = Outcome {
        records: Vec::new(),
        verification_failed: false,
    };
    let records = read_records(file)?;
    for (i, rec) in records.iter().enumerate() {
        // enumeration summaries and failed patterns carry no polynomial
        if rec.get("coeffs").is_none() && !rec.is_array() {
            continue;
        }
        let p = polynomial_from_json(rec, ctx)?;
        let n = p.degree();
        let mut form = build_form(vargs, n, ctx)?;
        if let (EquationForm::Multiplicative { pattern }, Some(given)) = (&mut form, rec.get("pattern")) {
            if vargs.pattern.is_none() && !vargs.parity {
                *pattern = serde_json::from_value(given.clone())
                    .map_err(|_| Error::Config(format!("record {i}: bad pattern")))?;
            }
        }
        let (v, pass) = check(&p, &w, &form, &samples, ctx)?;
        out.verification_failed |= !pass;
        let mut o = header("verification", ctx, &w);
        o.insert("record".into(), json!(i));
        o.insert("degree".into(), json!(n));
        o.insert("variant".into(), json!(form.to_string()));
        if let Value::Object(body) = v {
            o.extend(body);
        }
        out.records.push(Value::Object(o));
    }
    if out.records.is_empty() {
        return Err(Error::Config(format!("{} holds no polynomial records", file.display())));
    }
    Ok(out)
}
