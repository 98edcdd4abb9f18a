//! Classical families built from their three-term recurrences, and a
//! proportionality matcher.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::numeric::{PrecisionContext, Scalar};
use crate::poly::Polynomial;

type RPoly = Vec<Rational>;

fn x_times(p: &RPoly) -> RPoly {
    let mut out = vec![Rational::new()];
    out.extend(p.iter().cloned());
    out
}

fn scaled(p: &RPoly, c: &Rational) -> RPoly {
    p.iter().map(|a| Rational::from(a * c)).collect()
}

fn sum(a: &RPoly, b: &RPoly) -> RPoly {
    let len = a.len().max(b.len());
    (0..len)
        .map(|i| {
            let mut v = Rational::new();
            if let Some(x) = a.get(i) {
                v += x;
            }
            if let Some(y) = b.get(i) {
                v += y;
            }
            v
        })
        .collect()
}

/// Runs `p_{k+1} = (c0 + c1 x) p_k + c2 p_{k-1}` from `p_0 = 1`, `p_1`.
fn recurrence(n: usize, p1: RPoly, step: impl Fn(usize) -> (Rational, Rational, Rational)) -> RPoly {
    let mut prev = vec![Rational::from(1)];
    if n == 0 {
        return prev;
    }
    let mut cur = p1;
    for k in 1..n {
        let (c0, c1, c2) = step(k);
        let next = sum(
            &sum(&scaled(&cur, &c0), &scaled(&x_times(&cur), &c1)),
            &scaled(&prev, &c2),
        );
        prev = cur;
        cur = next;
    }
    cur
}

fn finish(ctx: &PrecisionContext, p: RPoly) -> Polynomial {
    Polynomial::from_rationals(ctx, &p).expect("recurrences keep a nonzero leading coefficient")
}

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

/// Generalized Laguerre `L_n^{(γ)}` with `L_n^{(γ)}(0) = binom(n+γ, n)`.
pub fn laguerre(n: usize, gamma: &Rational, ctx: &PrecisionContext) -> Result<Polynomial> {
    if *gamma < 1 {
        return Err(Error::InvalidParameter(format!(
            "laguerre needs gamma >= 1, got {gamma}"
        )));
    }
    let p1 = vec![Rational::from(gamma + 1u32), q(-1, 1)];
    let p = recurrence(n, p1, |k| {
        let k1 = Rational::from(k as i64 + 1);
        let c0 = (Rational::from(2 * k as i64 + 1) + gamma) / &k1;
        let c1 = Rational::from(-1) / &k1;
        let c2 = -(Rational::from(k as i64) + gamma) / &k1;
        (c0, c1, c2)
    });
    Ok(finish(ctx, p))
}

/// Monic Jacobi polynomial on `[0, 1]` orthogonal for `(1-x)^{p-q} x^{q-1}`.
pub fn jacobi_g(n: usize, p: &Rational, q_: &Rational, ctx: &PrecisionContext) -> Result<Polynomial> {
    let alpha = Rational::from(p - q_);
    let beta = Rational::from(q_ - 1u32);
    if alpha <= -1 || beta <= -1 {
        return Err(Error::InvalidParameter(format!(
            "jacobi G needs p - q > -1 and q > 0, got p={p}, q={q_}"
        )));
    }
    let ab = Rational::from(&alpha + &beta);
    // monic Jacobi recurrence on [-1, 1], mapped to x = (1 + t) / 2
    let a_coef = |k: usize| -> Rational {
        if k == 0 {
            return Rational::from(&beta - &alpha) / (Rational::from(&ab + 2u32));
        }
        let s = Rational::from(2 * k as i64) + &ab;
        (Rational::from(beta.square_ref()) - Rational::from(alpha.square_ref())) / (s.clone() * (s + 2u32))
    };
    let b_coef = |k: usize| -> Rational {
        if k == 1 {
            let s = Rational::from(&ab + 2u32);
            return Rational::from(4) * (Rational::from(&alpha + 1u32)) * (Rational::from(&beta + 1u32))
                / (s.clone() * &s * (s + 1u32));
        }
        let kk = Rational::from(k as i64);
        let s = Rational::from(2 * k as i64) + &ab;
        Rational::from(4)
            * &kk
            * (Rational::from(&kk + &alpha))
            * (Rational::from(&kk + &beta))
            * (Rational::from(&kk + &ab))
            / (s.clone() * &s * (s.clone() + 1u32) * (s - 1u32))
    };
    let c = |k: usize| -(a_coef(k) + 1u32) / 2u32;
    let p1 = vec![c(0), q(1, 1)];
    let poly = recurrence(n, p1, |k| (c(k), q(1, 1), -b_coef(k) / 4u32));
    Ok(finish(ctx, poly))
}

/// `U_n(2x - 1)`.
pub fn chebyshev_u_star(n: usize, ctx: &PrecisionContext) -> Polynomial {
    let p = recurrence(n, vec![q(-2, 1), q(4, 1)], |_| (q(-2, 1), q(4, 1), q(-1, 1)));
    finish(ctx, p)
}

/// Legendre polynomial with `P_n(1) = 1`.
pub fn legendre(n: usize, ctx: &PrecisionContext) -> Polynomial {
    let p = recurrence(n, vec![Rational::new(), q(1, 1)], |k| {
        let k1 = k as i64 + 1;
        (Rational::new(), q(2 * k as i64 + 1, k1), q(-(k as i64), k1))
    });
    finish(ctx, p)
}

/// `c` with `P = c Q`, using the default tolerance `10^{10-p}` relative to
/// the largest coefficient of `P` (exact comparison when both are exact).
pub fn match_up_to_scale(p: &Polynomial, q: &Polynomial, ctx: &PrecisionContext) -> Result<Scalar> {
    match_up_to_scale_tol(p, q, &ctx.tol(10))
}

pub fn match_up_to_scale_tol(p: &Polynomial, q: &Polynomial, tol: &Float) -> Result<Scalar> {
    if p.degree() != q.degree() {
        return Err(Error::DegreeMismatch {
            left: p.degree(),
            right: q.degree(),
        });
    }
    let c = p.leading() / q.leading();
    let exact = p.is_exact() && q.is_exact();
    let bits = tol
        .prec()
        .max(p.leading().float_bits().or(q.leading().float_bits()).unwrap_or(64));
    let scale = p
        .coeffs()
        .iter()
        .map(|a| a.abs(bits))
        .fold(Float::with_val(bits, 0), |a, b| a.max(&b));
    let bound = Float::with_val(bits, tol * &scale);
    for (i, (a, b)) in p.coeffs().iter().zip(q.coeffs()).enumerate() {
        let diff = a - &(&c * b);
        let ok = if exact { diff.is_zero() } else { diff.abs(bits) <= bound };
        if !ok {
            return Err(Error::NotProportional { index: i });
        }
    }
    Ok(c)
}
