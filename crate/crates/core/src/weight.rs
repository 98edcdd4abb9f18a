//! Weight functions `w(x)` on an interval and their normalization to unit
//! integral.

use std::cmp::Ordering;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::expr::{decimal_to_rational, BinOp, Expr, Func};
use crate::numeric::{GaussRational, PrecisionContext, Scalar};
use crate::quadrature::Integrator;

/// Interval endpoint on the extended real line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Bound {
    NegInf,
    Finite(Rational),
    PosInf,
}

impl Bound {
    /// Accepts `inf`, `+inf`, `-inf`, decimals and `a/b` fractions.
    pub fn parse(text: &str) -> Result<Bound> {
        let t = text.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" => return Ok(Bound::PosInf),
            "-inf" | "-infinity" => return Ok(Bound::NegInf),
            _ => {}
        }
        parse_rational(t)
            .map(Bound::Finite)
            .ok_or_else(|| Error::Config(format!("invalid interval endpoint `{text}`")))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bound::Finite(r) => Some(r),
            _ => None,
        }
    }

    fn rank(&self) -> (i8, Option<&Rational>) {
        match self {
            Bound::NegInf => (-1, None),
            Bound::Finite(r) => (0, Some(r)),
            Bound::PosInf => (1, None),
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let (ra, va) = self.rank();
        let (rb, vb) = other.rank();
        match ra.cmp(&rb) {
            Ordering::Equal => match (va, vb) {
                (Some(a), Some(b)) => a.partial_cmp(b),
                _ => Some(Ordering::Equal),
            },
            o => Some(o),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => write!(f, "-inf"),
            Bound::PosInf => write!(f, "inf"),
            Bound::Finite(r) => write!(f, "{r}"),
        }
    }
}

/// Parses a decimal (`2.5`) or a fraction (`5/2`) exactly.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = decimal_to_rational(n.trim())?;
        let d = decimal_to_rational(d.trim())?;
        return (d != 0).then(|| n / d);
    }
    decimal_to_rational(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub alpha: Bound,
    pub beta: Bound,
}

impl Interval {
    pub fn new(alpha: Bound, beta: Bound) -> Result<Interval> {
        if alpha == Bound::PosInf || beta == Bound::NegInf || alpha >= beta {
            return Err(Error::Config(format!(
                "interval requires alpha < beta, got ({alpha}, {beta})"
            )));
        }
        Ok(Interval { alpha, beta })
    }

    pub fn finite(a: i64, b: i64) -> Interval {
        Interval::new(Bound::Finite(a.into()), Bound::Finite(b.into())).expect("a < b")
    }

    pub fn is_finite(&self) -> bool {
        matches!((&self.alpha, &self.beta), (Bound::Finite(_), Bound::Finite(_)))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

/// Classical weights with closed-form normalizations and moments.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `x^{γ-1} e^{-x}` on `(0, ∞)`, `γ ≥ 1`.
    Laguerre { gamma: Rational },
    /// `x^{q-2} (1-x)^{p-q}` on `(0, 1)`, `q > 1`, `p - q > -1`.
    JacobiAdd { p: Rational, q: Rational },
    /// `(1-x)^{1/2} x^{-1/2}` on `(0, 1)`.
    ChebyshevU2Add,
    /// `(1-x)^{p-q-1} x^{q-1}` on `(0, 1)`, `p - q > 0`, `q > 0`.
    JacobiMult { p: Rational, q: Rational },
    /// `x^{1/2} (1-x)^{-1/2}` on `(0, 1)`.
    ChebyshevU2Mult,
    /// `1` on `(-1, 1)`.
    UniformSymmetric,
}

impl Preset {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            Preset::Laguerre { gamma } if *gamma < 1 => bad(format!("laguerre needs gamma >= 1, got {gamma}")),
            Preset::JacobiAdd { p, q } if *q <= 1 || Rational::from(p - q) <= -1 => {
                bad(format!("additive jacobi needs q > 1 and p - q > -1, got p={p}, q={q}"))
            }
            Preset::JacobiMult { p, q } if *q <= 0 || Rational::from(p - q) <= 0 => bad(format!(
                "multiplicative jacobi needs p - q > 0 and q > 0, got p={p}, q={q}"
            )),
            _ => Ok(()),
        }
    }

    pub fn interval(&self) -> Interval {
        match self {
            Preset::Laguerre { .. } => Interval::new(Bound::Finite(Rational::new()), Bound::PosInf).unwrap(),
            Preset::UniformSymmetric => Interval::finite(-1, 1),
            _ => Interval::finite(0, 1),
        }
    }

    /// `(a, b)` when the raw body is `x^{a-1} (1-x)^{b-1}` on `(0, 1)`.
    fn beta_params(&self) -> Option<(Rational, Rational)> {
        let half = || Rational::from((1, 2));
        let three_halves = || Rational::from((3, 2));
        match self {
            Preset::JacobiAdd { p, q } => Some((Rational::from(q - 1u32), Rational::from(p - q) + 1u32)),
            Preset::ChebyshevU2Add => Some((half(), three_halves())),
            Preset::JacobiMult { p, q } => Some((q.clone(), Rational::from(p - q))),
            Preset::ChebyshevU2Mult => Some((three_halves(), half())),
            _ => None,
        }
    }

    /// Power-law exponents of the raw body at `(α, β)`.
    pub fn endpoint_exponents(&self) -> (f64, f64) {
        match self {
            Preset::Laguerre { gamma } => (Rational::from(gamma - 1u32).to_f64(), 0.0),
            Preset::UniformSymmetric => (0.0, 0.0),
            _ => {
                let (a, b) = self.beta_params().unwrap();
                ((a - 1u32).to_f64(), (b - 1u32).to_f64())
            }
        }
    }

    /// `∫ raw body`, exact when it is rational.
    pub fn divisor(&self, ctx: &PrecisionContext) -> Scalar {
        match self {
            Preset::Laguerre { gamma } => gamma_of(ctx, gamma),
            Preset::UniformSymmetric => ctx.int(2),
            _ => {
                let (a, b) = self.beta_params().unwrap();
                let ab = Rational::from(&a + &b);
                if is_integer(&a) && is_integer(&b) {
                    let g = |r: &Rational| factorial(r.numer().to_u32().unwrap() - 1);
                    let v = Rational::from(g(&a) * g(&b)) / g(&ab);
                    ctx.from_rational(v)
                } else {
                    let bits = ctx.bits();
                    let ga = Float::with_val(bits, &a).gamma();
                    let gb = Float::with_val(bits, &b).gamma();
                    let gab = Float::with_val(bits, &ab).gamma();
                    ctx.real_float(ga * gb / gab)
                }
            }
        }
    }

    /// Moment `n` of the normalized preset, always rational.
    pub fn normalized_moment(&self, n: usize) -> Rational {
        match self {
            Preset::Laguerre { gamma } => rising(gamma, n),
            Preset::UniformSymmetric => {
                if n % 2 == 1 {
                    Rational::new()
                } else {
                    Rational::from((1, n as i64 + 1))
                }
            }
            _ => {
                let (a, b) = self.beta_params().unwrap();
                rising(&a, n) / rising(&(a.clone() + b), n)
            }
        }
    }

    /// Raw (unnormalized) body at `x`.
    pub fn eval_raw(&self, x: &Float) -> Float {
        let p = x.prec();
        match self {
            Preset::Laguerre { gamma } => {
                let e = Float::with_val(p, -x).exp();
                rpow(x, &Rational::from(gamma - 1u32)) * e
            }
            Preset::UniformSymmetric => Float::with_val(p, 1),
            _ => {
                let (a, b) = self.beta_params().unwrap();
                let one_minus = Float::with_val(p, 1 - x.clone());
                rpow(x, &(a - 1u32)) * rpow(&one_minus, &(b - 1u32))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Preset::Laguerre { gamma } => format!("laguerre(gamma={gamma})"),
            Preset::JacobiAdd { p, q } => format!("jacobi-add(p={p}, q={q})"),
            Preset::ChebyshevU2Add => "chebyshev-u2-add".into(),
            Preset::JacobiMult { p, q } => format!("jacobi-mult(p={p}, q={q})"),
            Preset::ChebyshevU2Mult => "chebyshev-u2-mult".into(),
            Preset::UniformSymmetric => "uniform-symmetric".into(),
        }
    }
}

fn is_integer(r: &Rational) -> bool {
    *r.denom() == 1
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

/// Rising factorial `(a)_n`.
pub(crate) fn rising(a: &Rational, n: usize) -> Rational {
    let mut acc = Rational::from(1);
    for k in 0..n {
        acc *= Rational::from(a + k as u32);
    }
    acc
}

fn gamma_of(ctx: &PrecisionContext, r: &Rational) -> Scalar {
    if is_integer(r) && *r > 0 {
        ctx.from_rational(Rational::from(factorial(r.numer().to_u32().unwrap() - 1)))
    } else {
        ctx.real_float(Float::with_val(ctx.bits(), r).gamma())
    }
}

/// `base^e` for a rational exponent, with integer powers done exactly.
fn rpow(base: &Float, e: &Rational) -> Float {
    let p = base.prec();
    if is_integer(e) {
        if let Some(k) = e.numer().to_i32() {
            return Float::with_val(p, base).pow(k);
        }
    }
    Float::with_val(p, base).pow(Float::with_val(p, e))
}

/// Weight `1/(c·x)` on a path from -1 to 1 with `c = iπ(2k+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContourWeight {
    pub winding: u32,
}

impl ContourWeight {
    /// `c / (iπ) = 2k + 1`.
    pub fn c_over_i_pi(&self) -> u64 {
        2 * u64::from(self.winding) + 1
    }

    /// `c = iπ(2k+1)` as a float scalar.
    pub fn c(&self, ctx: &PrecisionContext) -> Scalar {
        let im = ctx.pi() * Float::with_val(ctx.bits(), self.c_over_i_pi());
        ctx.from_float(Float::new(ctx.bits()), im)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum WeightBody {
    Preset(Preset),
    Expression(Expr),
    Contour(ContourWeight),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    pub interval: Interval,
    pub body: WeightBody,
    /// Constant the raw body is divided by; `None` until normalized.
    pub normalization: Option<Scalar>,
    /// Power-law exponents of the body at `α` and `β` (0 when regular).
    pub endpoint_exponents: (f64, f64),
}

impl Weight {
    /// Unnormalized preset weight.
    pub fn preset(preset: Preset) -> Result<Weight> {
        preset.validate()?;
        Ok(Weight {
            interval: preset.interval(),
            endpoint_exponents: preset.endpoint_exponents(),
            body: WeightBody::Preset(preset),
            normalization: None,
        })
    }

    /// Contour weight; normalized by construction.
    pub fn contour(winding: u32, ctx: &PrecisionContext) -> Weight {
        let cw = ContourWeight { winding };
        Weight {
            interval: Interval::finite(-1, 1),
            normalization: Some(cw.c(ctx)),
            body: WeightBody::Contour(cw),
            endpoint_exponents: (0.0, 0.0),
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.normalization.is_some()
    }

    pub fn is_contour(&self) -> bool {
        matches!(self.body, WeightBody::Contour(_))
    }

    pub fn describe(&self) -> String {
        match &self.body {
            WeightBody::Preset(p) => p.name(),
            WeightBody::Expression(e) => format!("expr({e}) on {}", self.interval),
            WeightBody::Contour(c) => format!("contour(winding={})", c.winding),
        }
    }

    /// Raw body at a real point. Contour weights are never evaluated.
    pub fn eval_raw(&self, x: &Float) -> Result<Float> {
        match &self.body {
            WeightBody::Preset(p) => Ok(p.eval_raw(x)),
            WeightBody::Expression(e) => e.eval(x),
            WeightBody::Contour(_) => Err(Error::Config("contour weights are not evaluated pointwise".into())),
        }
    }

    /// Normalized weight at a real point.
    pub fn eval(&self, x: &Float) -> Result<Float> {
        let raw = self.eval_raw(x)?;
        match &self.normalization {
            None => Ok(raw),
            Some(d) => {
                let d = d.to_complex(x.prec());
                if !d.im.is_zero() {
                    return Err(Error::ComplexArgument("complex normalization".into()));
                }
                Ok(raw / d.re)
            }
        }
    }
}

/// Parses `text` as an unnormalized weight on `interval`.
pub fn parse_weight(text: &str, interval: Interval) -> Result<Weight> {
    let expr = Expr::parse(text)?;
    let exps = detect_endpoint_exponents(&expr, &interval);
    for (exp, end, bound) in [(exps.0, "alpha", &interval.alpha), (exps.1, "beta", &interval.beta)] {
        if bound.finite().is_some() && exp <= -1.0 {
            return Err(Error::Integrability(format!(
                "power-law exponent {exp} at {end} = {bound} is not integrable"
            )));
        }
    }
    Ok(Weight {
        interval,
        body: WeightBody::Expression(expr),
        normalization: None,
        endpoint_exponents: exps,
    })
}

/// Sums the exponents of top-level factors `(x - α)^s` and `(β - x)^s`.
fn detect_endpoint_exponents(expr: &Expr, interval: &Interval) -> (f64, f64) {
    let mut at_alpha = 0.0;
    let mut at_beta = 0.0;
    for (factor, sign) in expr.product_factors() {
        let (base, exponent) = match factor {
            Expr::Binary {
                op: BinOp::Pow,
                lhs,
                rhs,
            } => {
                let s = match rhs.const_rational() {
                    Some(r) => r.to_f64(),
                    None => match rhs.const_float(64) {
                        Some(v) => v.to_f64(),
                        None => continue,
                    },
                };
                (lhs.as_ref(), s)
            }
            Expr::Call { func: Func::Sqrt, arg } => (arg.as_ref(), 0.5),
            other => (other, 1.0),
        };
        let Some(lin) = base.as_polynomial() else {
            continue;
        };
        if lin.len() != 2 || lin[1] == 0 {
            continue;
        }
        let root = Rational::from(-&lin[0]) / &lin[1];
        let s = f64::from(sign) * exponent;
        if interval.alpha.finite() == Some(&root) {
            at_alpha += s;
        } else if interval.beta.finite() == Some(&root) {
            at_beta += s;
        }
    }
    (at_alpha, at_beta)
}

/// Divides the raw body by its integral.
pub fn normalize(w: &Weight, ctx: &PrecisionContext) -> Result<Weight> {
    let divisor = match &w.body {
        WeightBody::Contour(_) => return Ok(w.clone()),
        WeightBody::Preset(p) => p.divisor(ctx),
        WeightBody::Expression(e) => expression_integral(e, w, ctx)?,
    };
    if divisor.is_zero() {
        return Err(Error::Normalization);
    }
    Ok(Weight {
        normalization: Some(divisor),
        ..w.clone()
    })
}

fn expression_integral(e: &Expr, w: &Weight, ctx: &PrecisionContext) -> Result<Scalar> {
    if let (Some(coeffs), true) = (e.as_polynomial(), w.interval.is_finite()) {
        let a = w.interval.alpha.finite().unwrap();
        let b = w.interval.beta.finite().unwrap();
        let v = integrate_rational_poly(&coeffs, a, b, 0);
        return Ok(ctx.from_gauss(GaussRational::real(v)));
    }
    check_tails(e, &w.interval, ctx)?;
    let integ = Integrator::new(ctx);
    let q = integ
        .integrate(&w.interval, 1, |x| Ok(vec![e.eval(x)?]))
        .map_err(|err| match err {
            Error::Quadrature { estimate, .. } => Error::Integrability(format!(
                "integral of `{e}` over {} does not converge (estimate {estimate:e})",
                w.interval
            )),
            other => other,
        })?;
    let (value, total) = (&q.values[0], &q.magnitudes[0]);
    let threshold = Float::with_val(ctx.bits(), &ctx.tol(10) * total);
    if Float::with_val(ctx.bits(), value.abs_ref()) <= threshold || total.is_zero() {
        return Err(Error::Normalization);
    }
    Ok(ctx.real_float(value.clone()))
}

/// Rejects bodies that do not decay faster than `1/|x|` at an infinite end.
fn check_tails(e: &Expr, interval: &Interval, ctx: &PrecisionContext) -> Result<()> {
    let bits = ctx.bits();
    let mut probes = Vec::new();
    if interval.beta == Bound::PosInf {
        probes.push(1i32);
    }
    if interval.alpha == Bound::NegInf {
        probes.push(-1);
    }
    for sgn in probes {
        let mut last: Option<Float> = None;
        for exp10 in [8, 16, 32] {
            let x = Float::with_val(bits, 10).pow(exp10) * sgn;
            let v = match e.eval(&x) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let xv = Float::with_val(bits, &x * &v).abs();
            last = Some(xv);
        }
        if let Some(xv) = last {
            if xv > 1e-6 {
                return Err(Error::Integrability(format!(
                    "`{e}` does not decay at {}",
                    if sgn > 0 { "+inf" } else { "-inf" }
                )));
            }
        }
    }
    Ok(())
}

/// `∫_a^b x^shift · Σ c_j x^j dx` exactly.
pub(crate) fn integrate_rational_poly(coeffs: &[Rational], a: &Rational, b: &Rational, shift: usize) -> Rational {
    let mut acc = Rational::new();
    for (j, c) in coeffs.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let k = (j + shift + 1) as u32;
        let hi = Rational::from(b.pow(k as i32));
        let lo = Rational::from(a.pow(k as i32));
        acc += c * (hi - lo) / k;
    }
    acc
}
