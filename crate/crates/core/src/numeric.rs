//! Scalar regimes: exact Gaussian rationals and fixed-precision complex
//! floats (MPFR), plus the precision context that creates them.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Smallest accepted working precision, in decimal digits.
pub const MIN_DIGITS: u32 = 16;
/// Default working precision, in decimal digits.
pub const DEFAULT_DIGITS: u32 = 50;
/// Extra decimal digits carried by every float on top of the requested
/// precision. Tolerances are always stated against the requested digits.
pub const GUARD_DIGITS: u32 = 20;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Number of bits needed to carry `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> u32 {
    (f64::from(digits) * LOG2_10).ceil() as u32
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

/// Read-only description of how scalars are created for one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
    mode: Mode,
}

impl PrecisionContext {
    /// Float-mode context carrying `digits` significant decimal digits.
    pub fn with_precision(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Config(format!(
                "precision must be at least {MIN_DIGITS} digits, got {digits}"
            )));
        }
        Ok(Self {
            digits,
            mode: Mode::Float,
        })
    }

    /// Same precision, exact rational arithmetic wherever the inputs allow it.
    pub fn exact(self) -> Self {
        Self {
            mode: Mode::Exact,
            ..self
        }
    }

    pub fn with_mode(self, mode: Mode) -> Self {
        Self { mode, ..self }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_exact(&self) -> bool {
        self.mode == Mode::Exact
    }

    /// Binary precision of every float created under this context.
    pub fn bits(&self) -> u32 {
        digits_to_bits(self.digits + GUARD_DIGITS)
    }

    /// `10^(offset - p)`, the precision-coupled tolerance family.
    pub fn tol(&self, offset: i32) -> Float {
        pow10(self.bits(), offset - self.digits as i32)
    }

    pub fn float(&self, v: f64) -> Float {
        Float::with_val(self.bits(), v)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits(), Constant::Pi)
    }

    pub fn zero(&self) -> Scalar {
        self.from_rational(Rational::new())
    }

    pub fn one(&self) -> Scalar {
        self.from_rational(Rational::from(1))
    }

    pub fn int(&self, v: i64) -> Scalar {
        self.from_rational(Rational::from(v))
    }

    /// Exact in Exact mode, correctly rounded otherwise.
    pub fn from_rational(&self, r: Rational) -> Scalar {
        match self.mode {
            Mode::Exact => Scalar::Exact(GaussRational::real(r)),
            Mode::Float => Scalar::Float(BigComplex::from_rational(&r, &Rational::new(), self.bits())),
        }
    }

    pub fn from_gauss(&self, g: GaussRational) -> Scalar {
        match self.mode {
            Mode::Exact => Scalar::Exact(g),
            Mode::Float => Scalar::Float(BigComplex::from_rational(&g.re, &g.im, self.bits())),
        }
    }

    /// A float scalar regardless of mode; used for values with no exact form.
    pub fn from_float(&self, re: Float, im: Float) -> Scalar {
        Scalar::Float(BigComplex::new(
            Float::with_val(self.bits(), re),
            Float::with_val(self.bits(), im),
        ))
    }

    pub fn real_float(&self, re: Float) -> Scalar {
        self.from_float(re, Float::new(self.bits()))
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self {
            digits: DEFAULT_DIGITS,
            mode: Mode::Float,
        }
    }
}

pub fn with_precision(digits: u32) -> Result<PrecisionContext> {
    PrecisionContext::with_precision(digits)
}

pub(crate) fn pow10(bits: u32, exp: i32) -> Float {
    Float::with_val(bits, 10).pow(exp)
}

/// Complex rational `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct GaussRational {
    pub re: Rational,
    pub im: Rational,
}

impl GaussRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        Self { re, im }
    }

    pub fn real(re: Rational) -> Self {
        Self {
            re,
            im: Rational::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.cmp0() == Ordering::Equal && self.im.cmp0() == Ordering::Equal
    }

    pub fn is_real(&self) -> bool {
        self.im.cmp0() == Ordering::Equal
    }

    pub fn norm_sqr(&self) -> Rational {
        Rational::from(self.re.square_ref()) + Rational::from(self.im.square_ref())
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), Rational::from(-&self.im))
    }

    /// Panics on zero, like rational division.
    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        assert!(n.cmp0() != Ordering::Equal, "division by zero");
        Self::new(Rational::from(&self.re / &n), Rational::from(-&self.im) / &n)
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_real() {
            write!(f, "{}", self.re)
        } else if self.re.cmp0() == Ordering::Equal {
            write!(f, "{}i", self.im)
        } else if self.im.cmp0() == Ordering::Less {
            write!(f, "{}-{}i", self.re, Rational::from(-&self.im))
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl Add for &GaussRational {
    type Output = GaussRational;
    fn add(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(Rational::from(&self.re + &o.re), Rational::from(&self.im + &o.im))
    }
}

impl Sub for &GaussRational {
    type Output = GaussRational;
    fn sub(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(Rational::from(&self.re - &o.re), Rational::from(&self.im - &o.im))
    }
}

impl Mul for &GaussRational {
    type Output = GaussRational;
    fn mul(self, o: &GaussRational) -> GaussRational {
        if self.is_real() && o.is_real() {
            return GaussRational::real(Rational::from(&self.re * &o.re));
        }
        let re = Rational::from(&self.re * &o.re) - Rational::from(&self.im * &o.im);
        let im = Rational::from(&self.re * &o.im) + Rational::from(&self.im * &o.re);
        GaussRational::new(re, im)
    }
}

impl Div for &GaussRational {
    type Output = GaussRational;
    fn div(self, o: &GaussRational) -> GaussRational {
        if o.is_real() {
            assert!(o.re.cmp0() != Ordering::Equal, "division by zero");
            return GaussRational::new(Rational::from(&self.re / &o.re), Rational::from(&self.im / &o.re));
        }
        self * &o.recip()
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(Rational::from(-&self.re), Rational::from(-&self.im))
    }
}

/// Complex number as a pair of MPFR floats sharing one precision.
#[derive(Clone, Debug, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        debug_assert_eq!(re.prec(), im.prec());
        Self { re, im }
    }

    pub fn zero(bits: u32) -> Self {
        Self::new(Float::new(bits), Float::new(bits))
    }

    pub fn from_rational(re: &Rational, im: &Rational, bits: u32) -> Self {
        Self::new(Float::with_val(bits, re), Float::with_val(bits, im))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), Float::with_val(self.prec(), -&self.im))
    }

    fn check_prec(&self, o: &Self) {
        assert_eq!(self.prec(), o.prec(), "mixing float scalars of different precision");
    }
}

impl Add for &BigComplex {
    type Output = BigComplex;
    fn add(self, o: &BigComplex) -> BigComplex {
        self.check_prec(o);
        let p = self.prec();
        BigComplex::new(
            Float::with_val(p, &self.re + &o.re),
            Float::with_val(p, &self.im + &o.im),
        )
    }
}

impl Sub for &BigComplex {
    type Output = BigComplex;
    fn sub(self, o: &BigComplex) -> BigComplex {
        self.check_prec(o);
        let p = self.prec();
        BigComplex::new(
            Float::with_val(p, &self.re - &o.re),
            Float::with_val(p, &self.im - &o.im),
        )
    }
}

impl Mul for &BigComplex {
    type Output = BigComplex;
    fn mul(self, o: &BigComplex) -> BigComplex {
        self.check_prec(o);
        let p = self.prec();
        if self.im.is_zero() && o.im.is_zero() {
            return BigComplex::new(Float::with_val(p, &self.re * &o.re), Float::new(p));
        }
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        BigComplex::new(re, im)
    }
}

impl Div for &BigComplex {
    type Output = BigComplex;
    fn div(self, o: &BigComplex) -> BigComplex {
        self.check_prec(o);
        let p = self.prec();
        if o.im.is_zero() {
            return BigComplex::new(
                Float::with_val(p, &self.re / &o.re),
                Float::with_val(p, &self.im / &o.re),
            );
        }
        // Smith's algorithm keeps intermediate magnitudes bounded.
        if Float::with_val(p, o.re.abs_ref()) >= Float::with_val(p, o.im.abs_ref()) {
            let r = Float::with_val(p, &o.im / &o.re);
            let d = Float::with_val(p, &o.re + Float::with_val(p, &r * &o.im));
            let re = Float::with_val(p, &self.re + Float::with_val(p, &self.im * &r)) / &d;
            let im = Float::with_val(p, &self.im - Float::with_val(p, &self.re * &r)) / &d;
            BigComplex::new(re, im)
        } else {
            let r = Float::with_val(p, &o.re / &o.im);
            let d = Float::with_val(p, &o.im + Float::with_val(p, &r * &o.re));
            let re = Float::with_val(p, Float::with_val(p, &self.re * &r) + &self.im) / &d;
            let im = Float::with_val(p, Float::with_val(p, &self.im * &r) - &self.re) / &d;
            BigComplex::new(re, im)
        }
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        let p = self.prec();
        BigComplex::new(Float::with_val(p, -&self.re), Float::with_val(p, -&self.im))
    }
}

/// A value in one of the two scalar regimes.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(GaussRational),
    Float(BigComplex),
}

impl Scalar {
    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(c) => c.is_zero(),
        }
    }

    /// Zero in the same regime (and precision) as `self`.
    pub fn zero_like(&self) -> Scalar {
        match self {
            Scalar::Exact(_) => Scalar::Exact(GaussRational::default()),
            Scalar::Float(c) => Scalar::Float(BigComplex::zero(c.prec())),
        }
    }

    pub fn one_like(&self) -> Scalar {
        self.rational_like(Rational::from(1))
    }

    pub fn rational_like(&self, r: Rational) -> Scalar {
        match self {
            Scalar::Exact(_) => Scalar::Exact(GaussRational::real(r)),
            Scalar::Float(c) => Scalar::Float(BigComplex::from_rational(&r, &Rational::new(), c.prec())),
        }
    }

    pub fn as_exact(&self) -> Option<&GaussRational> {
        match self {
            Scalar::Exact(g) => Some(g),
            Scalar::Float(_) => None,
        }
    }

    /// Float values never convert back to exact ones.
    pub fn to_exact(&self) -> Result<GaussRational> {
        match self {
            Scalar::Exact(g) => Ok(g.clone()),
            Scalar::Float(_) => Err(Error::ExactUnavailable(
                "a float value cannot be converted to an exact rational".into(),
            )),
        }
    }

    pub fn to_complex(&self, bits: u32) -> BigComplex {
        match self {
            Scalar::Exact(g) => BigComplex::from_rational(&g.re, &g.im, bits),
            Scalar::Float(c) => BigComplex::new(Float::with_val(bits, &c.re), Float::with_val(bits, &c.im)),
        }
    }

    /// Converts into the given context's regime. Exact to Float is allowed,
    /// Float to Exact is not.
    pub fn to_mode(&self, ctx: &PrecisionContext) -> Result<Scalar> {
        match (self, ctx.mode()) {
            (Scalar::Exact(_), Mode::Exact) => Ok(self.clone()),
            (_, Mode::Float) => Ok(Scalar::Float(self.to_complex(ctx.bits()))),
            (Scalar::Float(_), Mode::Exact) => self.to_exact().map(Scalar::Exact),
        }
    }

    /// Magnitude as a float. Exact values are rounded at `bits`.
    pub fn abs(&self, bits: u32) -> Float {
        match self {
            Scalar::Exact(g) => {
                if g.is_real() {
                    Float::with_val(bits, &g.re).abs()
                } else {
                    Float::with_val(bits, g.norm_sqr()).sqrt()
                }
            }
            Scalar::Float(c) => Float::with_val(bits, c.abs()),
        }
    }

    pub fn re_f64(&self) -> f64 {
        match self {
            Scalar::Exact(g) => g.re.to_f64(),
            Scalar::Float(c) => c.re.to_f64(),
        }
    }

    pub fn im_f64(&self) -> f64 {
        match self {
            Scalar::Exact(g) => g.im.to_f64(),
            Scalar::Float(c) => c.im.to_f64(),
        }
    }

    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(g.conj()),
            Scalar::Float(c) => Scalar::Float(c.conj()),
        }
    }

    /// Bits used when this value has to be compared as a float.
    pub fn float_bits(&self) -> Option<u32> {
        match self {
            Scalar::Exact(_) => None,
            Scalar::Float(c) => Some(c.prec()),
        }
    }

    pub fn pow_u(&self, k: u32) -> Scalar {
        let mut acc = self.one_like();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale_int(&self, k: &Integer) -> Scalar {
        self * &self.rational_like(Rational::from(k))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => write!(f, "{g}"),
            Scalar::Float(c) => {
                let digits = f.precision().unwrap_or(17);
                let re = c.re.to_string_radix(10, Some(digits));
                if c.im.is_zero() {
                    write!(f, "{re}")
                } else {
                    let im = c.im.to_string_radix(10, Some(digits));
                    write!(f, "({re}, {im}i)")
                }
            }
        }
    }
}

/// Lifts a pair of scalars into a common regime: exact only when both are.
fn unify<'a>(a: &'a Scalar, b: &'a Scalar) -> Unified<'a> {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => Unified::Exact(x, y),
        (Scalar::Float(x), Scalar::Float(y)) => {
            Unified::Float(std::borrow::Cow::Borrowed(x), std::borrow::Cow::Borrowed(y))
        }
        (Scalar::Exact(x), Scalar::Float(y)) => Unified::Float(
            std::borrow::Cow::Owned(BigComplex::from_rational(&x.re, &x.im, y.prec())),
            std::borrow::Cow::Borrowed(y),
        ),
        (Scalar::Float(x), Scalar::Exact(y)) => Unified::Float(
            std::borrow::Cow::Borrowed(x),
            std::borrow::Cow::Owned(BigComplex::from_rational(&y.re, &y.im, x.prec())),
        ),
    }
}

enum Unified<'a> {
    Exact(&'a GaussRational, &'a GaussRational),
    Float(std::borrow::Cow<'a, BigComplex>, std::borrow::Cow<'a, BigComplex>),
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Scalar {
            type Output = Scalar;
            fn $method(self, o: &Scalar) -> Scalar {
                match unify(self, o) {
                    Unified::Exact(x, y) => Scalar::Exact(x.$method(y)),
                    Unified::Float(x, y) => Scalar::Float((&*x).$method(&*y)),
                }
            }
        }

        impl $trait for Scalar {
            type Output = Scalar;
            fn $method(self, o: Scalar) -> Scalar {
                (&self).$method(&o)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);
scalar_binop!(Div, div);

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Exact(g) => Scalar::Exact(-g),
            Scalar::Float(c) => Scalar::Float(-c),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

/// Exact comparison when both values are exact; otherwise the mixed test
/// `|a-b| <= tol * max(1, |a|, |b|)`.
pub fn scalar_eq(a: &Scalar, b: &Scalar, tol: f64) -> bool {
    let bits = a.float_bits().or(b.float_bits()).unwrap_or(64);
    scalar_close(a, b, &Float::with_val(bits, tol))
}

/// [`scalar_eq`] with a multiprecision tolerance.
pub fn scalar_close(a: &Scalar, b: &Scalar, tol: &Float) -> bool {
    if let (Scalar::Exact(x), Scalar::Exact(y)) = (a, b) {
        return x == y;
    }
    let bits = a.float_bits().or(b.float_bits()).unwrap_or(64).max(tol.prec());
    let diff = (a - b).abs(bits);
    let mut scale = Float::with_val(bits, 1);
    let (aa, bb) = (a.abs(bits), b.abs(bits));
    if aa > scale {
        scale = aa;
    }
    if bb > scale {
        scale = bb;
    }
    diff <= Float::with_val(bits, tol * scale)
}

/// `max(1, |a|, |b|)`-relative distance between two scalars.
pub fn relative_gap(a: &Scalar, b: &Scalar, bits: u32) -> Float {
    let diff = (a - b).abs(bits);
    let mut scale = Float::with_val(bits, 1);
    let (aa, bb) = (a.abs(bits), b.abs(bits));
    if aa > scale {
        scale = aa;
    }
    if bb > scale {
        scale = bb;
    }
    diff / scale
}
