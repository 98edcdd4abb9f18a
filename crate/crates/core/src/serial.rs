//! JSON encoding. Exact values are `{"num", "den"}` (Gaussian ones nest
//! them under `re`/`im`); float values are `{"re", "im"}` decimal strings.

use rug::{Float, Integer, Rational};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::moments::{MomentSequence, MomentSource};
use crate::numeric::{GaussRational, PrecisionContext, Scalar};
use crate::poly::Polynomial;
use crate::variant::{ArbitraryFReport, VerificationReport};

pub fn float_to_string(v: &Float, digits: u32) -> String {
    if v.is_zero() {
        return "0".into();
    }
    v.to_string_radix(10, Some(digits as usize))
}

pub fn rational_to_json(r: &Rational) -> Value {
    json!({ "num": r.numer().to_string(), "den": r.denom().to_string() })
}

pub fn scalar_to_json(s: &Scalar, digits: u32) -> Value {
    match s {
        Scalar::Exact(g) if g.im == 0 => rational_to_json(&g.re),
        Scalar::Exact(g) => json!({ "re": rational_to_json(&g.re), "im": rational_to_json(&g.im) }),
        Scalar::Float(c) => json!({
            "re": float_to_string(&c.re, digits),
            "im": float_to_string(&c.im, digits),
        }),
    }
}

fn bad(what: &str, v: &Value) -> Error {
    Error::Config(format!("cannot read {what} from `{v}`"))
}

fn rational_from_json(v: &Value) -> Result<Rational> {
    let field = |k: &str| -> Result<Integer> {
        v.get(k)
            .and_then(Value::as_str)
            .and_then(|s| s.parse::<Integer>().ok())
            .ok_or_else(|| bad("a rational", v))
    };
    let den = field("den")?;
    if den == 0 {
        return Err(bad("a rational", v));
    }
    Ok(Rational::from((field("num")?, den)))
}

fn float_from_str(s: &str, bits: u32) -> Option<Float> {
    Float::parse(s).ok().map(|p| Float::with_val(bits, p))
}

/// Reads a scalar into the regime of `ctx`. Plain JSON numbers are accepted
/// as exact decimals.
pub fn scalar_from_json(v: &Value, ctx: &PrecisionContext) -> Result<Scalar> {
    if v.get("num").is_some() {
        return Ok(ctx.from_rational(rational_from_json(v)?));
    }
    if let Some(n) = v.as_number() {
        let r = crate::expr::decimal_to_rational(&n.to_string()).ok_or_else(|| bad("a number", v))?;
        return Ok(ctx.from_rational(r));
    }
    match (v.get("re"), v.get("im")) {
        (Some(re @ Value::Object(_)), Some(im @ Value::Object(_))) => {
            Ok(ctx.from_gauss(GaussRational::new(rational_from_json(re)?, rational_from_json(im)?)))
        }
        (Some(Value::String(re)), Some(Value::String(im))) => {
            if ctx.is_exact() {
                return Err(Error::ExactUnavailable(
                    "decimal float values cannot be read in exact mode".into(),
                ));
            }
            let bits = ctx.bits();
            let re = float_from_str(re, bits).ok_or_else(|| bad("a decimal", v))?;
            let im = float_from_str(im, bits).ok_or_else(|| bad("a decimal", v))?;
            Ok(ctx.from_float(re, im))
        }
        _ => Err(bad("a scalar", v)),
    }
}

pub fn polynomial_to_json(p: &Polynomial, digits: u32) -> Value {
    Value::Array(p.coeffs().iter().map(|c| scalar_to_json(c, digits)).collect())
}

/// Accepts either a bare coefficient array or an object with `coeffs`.
pub fn polynomial_from_json(v: &Value, ctx: &PrecisionContext) -> Result<Polynomial> {
    let arr = match v {
        Value::Array(a) => a,
        Value::Object(o) => o
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("polynomial coefficients", v))?,
        _ => return Err(bad("a polynomial", v)),
    };
    let coeffs = arr
        .iter()
        .map(|c| scalar_from_json(c, ctx))
        .collect::<Result<Vec<_>>>()?;
    Polynomial::new(coeffs)
}

pub fn moments_to_json(m: &MomentSequence, ctx: &PrecisionContext) -> Value {
    let digits = ctx.digits();
    let mut o = Map::new();
    o.insert("weight".into(), Value::String(m.weight_id.clone()));
    o.insert("source".into(), Value::String(m.source.label().into()));
    o.insert("mode".into(), json!(ctx.mode()));
    o.insert("precision".into(), json!(digits));
    o.insert(
        "values".into(),
        Value::Array(m.values.iter().map(|v| scalar_to_json(v, digits)).collect()),
    );
    match &m.source {
        MomentSource::Quadrature { errors } => {
            o.insert(
                "errors".into(),
                Value::Array(errors.iter().map(|e| Value::String(float_to_string(e, 6))).collect()),
            );
        }
        MomentSource::Contour { winding } => {
            o.insert("winding".into(), json!(winding));
        }
        MomentSource::Analytic => {}
    }
    Value::Object(o)
}

pub fn report_to_json(r: &VerificationReport, ctx: &PrecisionContext) -> Value {
    let digits = ctx.digits();
    let f = |v: &Float| Value::String(float_to_string(v, 6));
    json!({
        "form": r.form.to_string(),
        "samples": r.sample_points.iter().map(|s| scalar_to_json(s, digits)).collect::<Vec<_>>(),
        "residuals": r.residuals.iter().map(f).collect::<Vec<_>>(),
        "max_residual": f(&r.max_residual),
        "quadrature_error_bound": f(&r.quadrature_error_bound),
        "threshold": f(&r.threshold),
        "exact": r.exact,
        "pass": r.pass,
        "notes": r.notes,
    })
}

pub fn arbitrary_f_to_json(r: &ArbitraryFReport, ctx: &PrecisionContext) -> Value {
    let digits = ctx.digits();
    let f = |v: &Float| Value::String(float_to_string(v, 6));
    json!({
        "values": r.values.iter().map(|s| scalar_to_json(s, digits)).collect::<Vec<_>>(),
        "deviations": r.deviations.iter().map(f).collect::<Vec<_>>(),
        "errors": r.errors.iter().map(f).collect::<Vec<_>>(),
        "tolerance": f(&r.tolerance),
        "pass": r.pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{scalar_eq, with_precision};

    #[test]
    fn exact_round_trip() {
        let ctx = with_precision(30).unwrap().exact();
        let p = Polynomial::new(vec![
            ctx.from_rational(Rational::from((-3, 7))),
            ctx.from_gauss(GaussRational::new(Rational::from(2), Rational::from((1, 3)))),
        ])
        .unwrap();
        let v = polynomial_to_json(&p, 30);
        assert_eq!(v[0], json!({"num": "-3", "den": "7"}));
        assert_eq!(polynomial_from_json(&v, &ctx).unwrap(), p);
    }

    #[test]
    fn float_round_trip() {
        let ctx = with_precision(40).unwrap();
        let x = ctx.from_float(ctx.pi(), -ctx.pi() / 3u32);
        let v = scalar_to_json(&x, 40);
        assert!(v["re"].as_str().unwrap().starts_with("3.14159265358979323846"));
        let back = scalar_from_json(&v, &ctx).unwrap();
        assert!(scalar_eq(&back, &x, 1e-39));
        assert!(matches!(
            scalar_from_json(&v, &ctx.exact()),
            Err(Error::ExactUnavailable(_))
        ));
        assert_eq!(
            scalar_from_json(&json!(2.5), &ctx.exact()).unwrap(),
            ctx.exact().from_rational(Rational::from((5, 2)))
        );
        assert!(scalar_from_json(&json!({"num": "1", "den": "0"}), &ctx).is_err());
    }
}
