//! Polynomials with scalar coefficients and their moment contractions.

use std::fmt;

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::numeric::{PrecisionContext, Scalar};

/// `a_0 + a_1 x + ... + a_n x^n`, coefficients in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Scalar>,
}

impl Polynomial {
    /// Checked constructor: at least one coefficient and a nonzero leading one.
    pub fn new(coeffs: Vec<Scalar>) -> Result<Polynomial> {
        match coeffs.last() {
            None => Err(Error::Config("a polynomial needs at least one coefficient".into())),
            Some(c) if c.is_zero() => Err(Error::DegenerateDegree {
                degree: coeffs.len() - 1,
            }),
            Some(_) => Ok(Polynomial { coeffs }),
        }
    }

    /// Unchecked constructor for intermediate products and sums.
    pub(crate) fn raw(coeffs: Vec<Scalar>) -> Polynomial {
        debug_assert!(!coeffs.is_empty());
        Polynomial { coeffs }
    }

    pub fn from_rationals(ctx: &PrecisionContext, coeffs: &[Rational]) -> Result<Polynomial> {
        Polynomial::new(coeffs.iter().map(|r| ctx.from_rational(r.clone())).collect())
    }

    pub fn from_ints(ctx: &PrecisionContext, coeffs: &[i64]) -> Result<Polynomial> {
        Polynomial::new(coeffs.iter().map(|&v| ctx.int(v)).collect())
    }

    pub fn one(ctx: &PrecisionContext) -> Polynomial {
        Polynomial::raw(vec![ctx.one()])
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Scalar> {
        self.coeffs
    }

    pub fn leading(&self) -> &Scalar {
        self.coeffs.last().expect("nonempty")
    }

    pub fn is_exact(&self) -> bool {
        self.coeffs.iter().all(Scalar::is_exact)
    }

    pub fn to_mode(&self, ctx: &PrecisionContext) -> Result<Polynomial> {
        Ok(Polynomial::raw(
            self.coeffs.iter().map(|c| c.to_mode(ctx)).collect::<Result<_>>()?,
        ))
    }

    pub fn scale(&self, c: &Scalar) -> Polynomial {
        Polynomial::raw(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Coefficient convolution.
    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        Polynomial::raw(out)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = self.coeffs[0].zero_like();
        let out = (0..len)
            .map(|i| {
                let a = self.coeffs.get(i).unwrap_or(&zero);
                let b = other.coeffs.get(i).unwrap_or(&zero);
                a + b
            })
            .collect();
        Polynomial::raw(out)
    }

    /// `a + b x`.
    pub fn linear(a: Scalar, b: Scalar) -> Polynomial {
        Polynomial::raw(vec![a, b])
    }

    /// Parity of the coefficient support: `Some(0)` even, `Some(1)` odd.
    pub fn parity(&self) -> Option<usize> {
        let mut seen = None;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match seen {
                None => seen = Some(i % 2),
                Some(p) if p != i % 2 => return None,
                _ => {}
            }
        }
        seen
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() && self.coeffs.len() > 1 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match (i, f.precision()) {
                (0, Some(d)) => write!(f, "{c:.d$}")?,
                (0, None) => write!(f, "{c}")?,
                (1, Some(d)) => write!(f, "({c:.d$})x")?,
                (1, None) => write!(f, "({c})x")?,
                (_, Some(d)) => write!(f, "({c:.d$})x^{i}")?,
                (_, None) => write!(f, "({c})x^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Horner evaluation.
pub fn eval(p: &Polynomial, x: &Scalar) -> Scalar {
    let mut acc = p.coeffs.last().expect("nonempty").clone();
    for c in p.coeffs.iter().rev().skip(1) {
        acc = &(&acc * x) + c;
    }
    acc
}

/// `⟨x^k P⟩`.
pub fn inner_moment(p: &Polynomial, k: usize, m: &MomentSequence) -> Result<Scalar> {
    m.contract(&p.coeffs, k)
}

/// `⟨x Pn Pm⟩`.
pub fn orthogonality(pn: &Polynomial, pm: &Polynomial, m: &MomentSequence) -> Result<Scalar> {
    inner_moment(&pn.mul(pm), 1, m)
}

/// `⟨g P Q⟩` for a polynomial factor `g` of the measure.
pub fn weighted_inner(g: &Polynomial, p: &Polynomial, q: &Polynomial, m: &MomentSequence) -> Result<Scalar> {
    inner_moment(&g.mul(p).mul(q), 0, m)
}

pub(crate) fn binomial(n: usize, k: usize) -> Integer {
    Integer::from(n).binomial(k as u32)
}

/// Coefficients of `(a + b x)^k` in ascending order.
pub fn linear_power(a: &Scalar, b: &Scalar, k: usize) -> Vec<Scalar> {
    (0..=k)
        .map(|i| {
            let term = &a.pow_u((k - i) as u32) * &b.pow_u(i as u32);
            term.scale_int(&binomial(k, i))
        })
        .collect()
}

/// `⟨(a + b x)^k P⟩`.
pub fn shifted_inner(p: &Polynomial, k: usize, a: &Scalar, b: &Scalar, m: &MomentSequence) -> Result<Scalar> {
    if b.is_zero() {
        return Err(Error::InvalidParameter("the shift slope b must be nonzero".into()));
    }
    m.require(p.degree() + k + 1)?;
    let shifted = Polynomial::raw(linear_power(a, b, k)).mul(p);
    inner_moment(&shifted, 0, m)
}

/// The right side `∫ w(y) P(y) P(x + a + b y) dy` as a polynomial in `x`,
/// obtained by expanding `P(x + a + b y)` and contracting with moments.
pub fn linear_shift_image(p: &Polynomial, a: &Scalar, b: &Scalar, m: &MomentSequence) -> Result<Polynomial> {
    let n = p.degree();
    m.require(2 * n + 1)?;
    // ⟨(a+by)^r P⟩ for r = 0..n
    let inner: Vec<Scalar> = (0..=n).map(|r| shifted_inner(p, r, a, b, m)).collect::<Result<_>>()?;
    let zero = p.coeffs[0].zero_like();
    let mut out = vec![zero; n + 1];
    for (j, aj) in p.coeffs.iter().enumerate() {
        if aj.is_zero() {
            continue;
        }
        for i in 0..=j {
            let term = (aj * &inner[j - i]).scale_int(&binomial(j, i));
            out[i] = &out[i] + &term;
        }
    }
    Ok(Polynomial::raw(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{scalar_eq, with_precision};
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn factorials(ctx: &PrecisionContext, count: usize) -> MomentSequence {
        let mut v = Vec::new();
        let mut f = Integer::from(1);
        for n in 0..count {
            if n > 0 {
                f *= n as u32;
            }
            v.push(ctx.from_rational(Rational::from(f.clone())));
        }
        MomentSequence::from_values(v, "laguerre(1)")
    }

    fn unit_interval(ctx: &PrecisionContext, count: usize) -> MomentSequence {
        let v = (0..count).map(|n| ctx.from_rational(q(1, n as i64 + 1))).collect();
        MomentSequence::from_values(v, "uniform(0,1)")
    }

    #[test]
    fn eval_examples() {
        let ctx = with_precision(30).unwrap().exact();
        assert_eq!(eval(&Polynomial::one(&ctx), &ctx.int(7)), ctx.int(1));
        let p = Polynomial::from_ints(&ctx, &[2, -1]).unwrap();
        assert!(eval(&p, &ctx.int(2)).is_zero());
        let f = with_precision(30).unwrap();
        let half_i_pi = f.from_float(f.float(0.0), f.pi() / 2u32);
        let p1 = Polynomial::new(vec![f.zero(), half_i_pi.clone()]).unwrap();
        assert!(scalar_eq(&eval(&p1, &f.one()), &half_i_pi, 1e-40));
    }

    #[test]
    fn inner_moment_examples() {
        let ctx = with_precision(30).unwrap().exact();
        let m = factorials(&ctx, 8);
        let p1 = Polynomial::from_ints(&ctx, &[2, -1]).unwrap();
        assert_eq!(inner_moment(&p1, 0, &m).unwrap(), ctx.int(1));
        assert_eq!(inner_moment(&p1, 1, &m).unwrap(), ctx.int(0));
        assert_eq!(inner_moment(&Polynomial::one(&ctx), 0, &m).unwrap(), ctx.int(1));
        assert!(matches!(
            inner_moment(&p1, 7, &m),
            Err(Error::InsufficientMoments {
                needed: 9,
                available: 8
            })
        ));
    }

    #[test]
    fn orthogonality_examples() {
        let ctx = with_precision(30).unwrap().exact();
        let m = factorials(&ctx, 8);
        let p0 = Polynomial::one(&ctx);
        let p1 = Polynomial::from_ints(&ctx, &[2, -1]).unwrap();
        assert_eq!(orthogonality(&p1, &p0, &m).unwrap(), ctx.int(0));
        assert_eq!(orthogonality(&p1, &p1, &m).unwrap(), ctx.int(2));
        assert_eq!(orthogonality(&p0, &p0, &m).unwrap(), m.values[1]);
    }

    #[test]
    fn shifted_inner_examples() {
        let ctx = with_precision(30).unwrap().exact();
        let m = unit_interval(&ctx, 8);
        let p = Polynomial::from_ints(&ctx, &[-2, 6]).unwrap();
        assert!(shifted_inner(&p, 1, &ctx.int(1), &ctx.int(-1), &m).unwrap().is_zero());
        for k in 0..4 {
            assert_eq!(
                shifted_inner(&p, k, &ctx.int(0), &ctx.int(1), &m).unwrap(),
                inner_moment(&p, k, &m).unwrap()
            );
        }
        assert_eq!(
            shifted_inner(&p, 0, &ctx.int(5), &ctx.int(-3), &m).unwrap(),
            inner_moment(&p, 0, &m).unwrap()
        );
        assert!(shifted_inner(&p, 1, &ctx.int(1), &ctx.int(0), &m).is_err());
    }

    #[test]
    fn constructor_rejects_zero_leading() {
        let ctx = with_precision(30).unwrap().exact();
        assert!(matches!(
            Polynomial::from_ints(&ctx, &[1, 0]),
            Err(Error::DegenerateDegree { degree: 1 })
        ));
    }

    fn small_poly() -> impl Strategy<Value = Vec<(i64, i64)>> {
        prop::collection::vec((-20i64..20, 1i64..9), 1..6).prop_filter("nonzero leading", |v| v.last().unwrap().0 != 0)
    }

    proptest! {
        #[test]
        fn integral_map_preserves_degree(c in small_poly()) {
            let ctx = with_precision(30).unwrap().exact();
            let m = factorials(&ctx, 2 * c.len() + 2);
            let p = Polynomial::from_rationals(&ctx, &c.iter().map(|&(n, d)| q(n, d)).collect::<Vec<_>>()).unwrap();
            let img = linear_shift_image(&p, &ctx.int(0), &ctx.int(1), &m).unwrap();
            prop_assert_eq!(img.degree(), p.degree());
            let want = p.leading() * &inner_moment(&p, 0, &m).unwrap();
            prop_assert_eq!(img.leading(), &want);
        }

        #[test]
        fn bilinear_and_symmetric(a in small_poly(), b in small_poly(), s in -5i64..5) {
            let ctx = with_precision(30).unwrap().exact();
            let m = unit_interval(&ctx, 16);
            let to = |c: &Vec<(i64, i64)>| Polynomial::from_rationals(&ctx, &c.iter().map(|&(n, d)| q(n, d)).collect::<Vec<_>>()).unwrap();
            let (pa, pb) = (to(&a), to(&b));
            prop_assert_eq!(orthogonality(&pa, &pb, &m).unwrap(), orthogonality(&pb, &pa, &m).unwrap());
            let combo = pa.add(&pb.scale(&ctx.int(s)));
            let lhs = inner_moment(&combo, 1, &m).unwrap();
            let rhs = &inner_moment(&pa, 1, &m).unwrap() + &(&ctx.int(s) * &inner_moment(&pb, 1, &m).unwrap());
            prop_assert_eq!(lhs, rhs);
        }
    }
}
