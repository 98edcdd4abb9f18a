//! Moment sequences `m_n = <x^n>` and generalized moments `<f(x)^k x^j>`.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::expr::{rational_convolve, Expr};
use crate::numeric::{GaussRational, PrecisionContext, Scalar};
use crate::quadrature::Integrator;
use crate::weight::{integrate_rational_poly, Bound, Weight, WeightBody};

#[derive(Clone, Debug, PartialEq)]
pub enum MomentSource {
    /// Closed form (presets, polynomial bodies, or user-supplied values).
    Analytic,
    /// Adaptive quadrature with an error estimate per entry.
    Quadrature { errors: Vec<Float> },
    /// Closed form for a contour weight of the given winding number.
    Contour { winding: u32 },
}

impl MomentSource {
    pub fn label(&self) -> &'static str {
        match self {
            MomentSource::Analytic => "analytic",
            MomentSource::Quadrature { .. } => "quadrature",
            MomentSource::Contour { .. } => "contour",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    pub values: Vec<Scalar>,
    pub source: MomentSource,
    /// Description of the weight that produced the sequence.
    pub weight_id: String,
}

impl MomentSequence {
    /// Wraps user-supplied moments; `values[0]` is expected to be 1.
    pub fn from_values(values: Vec<Scalar>, label: impl Into<String>) -> Self {
        Self {
            values,
            source: MomentSource::Analytic,
            weight_id: label.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn require(&self, needed: usize) -> Result<()> {
        if self.values.len() < needed {
            return Err(Error::InsufficientMoments {
                needed,
                available: self.values.len(),
            });
        }
        Ok(())
    }

    pub fn get(&self, n: usize) -> Result<&Scalar> {
        self.values.get(n).ok_or(Error::InsufficientMoments {
            needed: n + 1,
            available: self.values.len(),
        })
    }

    pub fn is_exact(&self) -> bool {
        self.values.iter().all(Scalar::is_exact)
    }

    /// Same sequence converted to the regime of `ctx`.
    pub fn to_mode(&self, ctx: &PrecisionContext) -> Result<MomentSequence> {
        Ok(MomentSequence {
            values: self.values.iter().map(|v| v.to_mode(ctx)).collect::<Result<_>>()?,
            source: self.source.clone(),
            weight_id: self.weight_id.clone(),
        })
    }

    /// `Σ_j c_j m_{shift+j}`.
    pub fn contract(&self, coeffs: &[Scalar], shift: usize) -> Result<Scalar> {
        self.require(shift + coeffs.len())?;
        let mut acc = self.values[0].zero_like();
        for (j, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            acc = &acc + &(c * &self.values[shift + j]);
        }
        Ok(acc)
    }
}

/// `m_0 .. m_{count-1}` of a normalized weight.
pub fn moments(w: &Weight, count: usize, ctx: &PrecisionContext) -> Result<MomentSequence> {
    moments_with(w, count, ctx, &Integrator::new(ctx))
}

/// [`moments`] with an explicit quadrature configuration.
pub fn moments_with(w: &Weight, count: usize, ctx: &PrecisionContext, integ: &Integrator) -> Result<MomentSequence> {
    let divisor = w
        .normalization
        .as_ref()
        .ok_or_else(|| Error::Config("weight must be normalized before taking moments".into()))?;
    let weight_id = w.describe();
    match &w.body {
        WeightBody::Contour(c) => contour_moments(c.winding, count, ctx),
        WeightBody::Preset(p) => Ok(MomentSequence {
            values: (0..count).map(|n| ctx.from_rational(p.normalized_moment(n))).collect(),
            source: MomentSource::Analytic,
            weight_id,
        }),
        WeightBody::Expression(e) => {
            if let Some(values) = polynomial_body_moments(e, w, count) {
                return Ok(MomentSequence {
                    values: values.into_iter().map(|r| ctx.from_rational(r)).collect(),
                    source: MomentSource::Analytic,
                    weight_id,
                });
            }
            if ctx.is_exact() {
                return Err(Error::ExactUnavailable(format!(
                    "moments of `{e}` need quadrature; use float mode"
                )));
            }
            let div = divisor.to_complex(integ.eval_bits()).re;
            let q = integ.integrate(&w.interval, count, |x| {
                let v = e.eval(x)? / &div;
                let mut out = Vec::with_capacity(count);
                let mut acc = v;
                for _ in 0..count {
                    out.push(acc.clone());
                    acc *= x;
                }
                Ok(out)
            })?;
            Ok(MomentSequence {
                values: q.values.into_iter().map(|v| ctx.real_float(v)).collect(),
                source: MomentSource::Quadrature { errors: q.errors },
                weight_id,
            })
        }
    }
}

/// Exact moments of a polynomial body on a finite interval.
fn polynomial_body_moments(e: &Expr, w: &Weight, count: usize) -> Option<Vec<Rational>> {
    let coeffs = e.as_polynomial()?;
    let (Bound::Finite(a), Bound::Finite(b)) = (&w.interval.alpha, &w.interval.beta) else {
        return None;
    };
    let total = integrate_rational_poly(&coeffs, a, b, 0);
    if total == 0 {
        return None;
    }
    Some(
        (0..count)
            .map(|n| integrate_rational_poly(&coeffs, a, b, n) / &total)
            .collect(),
    )
}

/// A closed-form contour moment `coeff · π^pi_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiRational {
    pub coeff: GaussRational,
    pub pi_power: i32,
}

/// Contour moments in symbolic form: `m_0 = 1` and, for `n ≥ 1`,
/// `m_n = (1 - (-1)^n) / (n c)` with `c = iπ(2k+1)`.
pub fn contour_moments_symbolic(winding: u32, count: usize) -> Vec<PiRational> {
    let odd = 2 * i64::from(winding) + 1;
    (0..count)
        .map(|n| {
            if n == 0 {
                PiRational {
                    coeff: GaussRational::real(Rational::from(1)),
                    pi_power: 0,
                }
            } else if n % 2 == 0 {
                PiRational {
                    coeff: GaussRational::default(),
                    pi_power: 0,
                }
            } else {
                // 2 / (n · i · (2k+1)) = -2i / (n (2k+1))
                PiRational {
                    coeff: GaussRational::new(Rational::new(), Rational::from((-2, n as i64 * odd))),
                    pi_power: -1,
                }
            }
        })
        .collect()
}

/// Numeric contour moments at working precision.
pub fn contour_moments(winding: u32, count: usize, ctx: &PrecisionContext) -> Result<MomentSequence> {
    if ctx.is_exact() {
        return Err(Error::ExactUnavailable(
            "contour moments carry a factor 1/π; use float mode or the symbolic form".into(),
        ));
    }
    let inv_pi = ctx.pi().recip();
    let values = contour_moments_symbolic(winding, count)
        .into_iter()
        .map(|m| {
            let c = ctx.from_gauss(m.coeff);
            match m.pi_power {
                0 => c,
                _ => &c * &ctx.real_float(inv_pi.clone()),
            }
        })
        .collect();
    Ok(MomentSequence {
        values,
        source: MomentSource::Contour { winding },
        weight_id: format!("contour(winding={winding})"),
    })
}

/// `M[k][j] = <f(x)^k x^j>` for `k ≤ kmax`, `j ≤ jmax`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneralizedMoments {
    pub values: Vec<Vec<Scalar>>,
    /// Per-entry quadrature error estimates; `None` for closed forms.
    pub errors: Option<Vec<Vec<Float>>>,
}

impl GeneralizedMoments {
    pub fn get(&self, k: usize, j: usize) -> &Scalar {
        &self.values[k][j]
    }
}

pub fn generalized_moments(
    w: &Weight,
    f: &Expr,
    kmax: usize,
    jmax: usize,
    ctx: &PrecisionContext,
) -> Result<GeneralizedMoments> {
    ensure_nonconstant(f, w, ctx)?;
    if let Some(fc) = f.as_polynomial() {
        let deg = fc.len() - 1;
        let needed = kmax * deg + jmax + 1;
        // closed-form moments when the weight has them
        let base = match &w.body {
            WeightBody::Expression(e) if polynomial_body_moments(e, w, 1).is_none() => None,
            _ => Some(moments(w, needed, ctx)?),
        };
        if let Some(m) = base {
            let mut values = Vec::with_capacity(kmax + 1);
            let mut fk = vec![Rational::from(1)];
            for _ in 0..=kmax {
                let coeffs: Vec<Scalar> = fk.iter().map(|r| ctx.from_rational(r.clone())).collect();
                let row = (0..=jmax).map(|j| m.contract(&coeffs, j)).collect::<Result<Vec<_>>>()?;
                values.push(row);
                fk = rational_convolve(&fk, &fc);
            }
            return Ok(GeneralizedMoments { values, errors: None });
        }
    }
    if w.is_contour() {
        return Err(Error::Config(
            "generalized moments of a contour weight need a polynomial f".into(),
        ));
    }
    if ctx.is_exact() {
        return Err(Error::ExactUnavailable(format!(
            "generalized moments with f = `{f}` need quadrature; use float mode"
        )));
    }
    let cols = jmax + 1;
    let integ = Integrator::new(ctx);
    let q = integ.integrate(&w.interval, (kmax + 1) * cols, |x| {
        let wx = w.eval(x)?;
        let fx = f.eval(x)?;
        let mut out = Vec::with_capacity((kmax + 1) * cols);
        let mut fk = wx;
        for _ in 0..=kmax {
            let mut acc = fk.clone();
            for _ in 0..cols {
                out.push(acc.clone());
                acc *= x;
            }
            fk *= &fx;
        }
        Ok(out)
    })?;
    let mut values = Vec::with_capacity(kmax + 1);
    let mut errors = Vec::with_capacity(kmax + 1);
    for k in 0..=kmax {
        values.push(
            (0..cols)
                .map(|j| ctx.real_float(q.values[k * cols + j].clone()))
                .collect(),
        );
        errors.push(q.errors[k * cols..(k + 1) * cols].to_vec());
    }
    Ok(GeneralizedMoments {
        values,
        errors: Some(errors),
    })
}

/// Interior sample points used for shape checks on `f`.
pub(crate) fn interior_samples(w: &Weight, count: usize, bits: u32) -> Vec<Float> {
    let iv = &w.interval;
    (0..count)
        .map(|i| {
            let s = Float::with_val(bits, (i as f64 + 0.5) / count as f64);
            match (&iv.alpha, &iv.beta) {
                (Bound::Finite(a), Bound::Finite(b)) => {
                    let a = Float::with_val(bits, a);
                    let b = Float::with_val(bits, b);
                    Float::with_val(bits, &b - &a) * s + a
                }
                (Bound::Finite(a), Bound::PosInf) => {
                    Float::with_val(bits, a) + Float::with_val(bits, &s / Float::with_val(bits, 1 - s.clone()))
                }
                (Bound::NegInf, Bound::Finite(b)) => {
                    Float::with_val(bits, b) - Float::with_val(bits, &s / Float::with_val(bits, 1 - s.clone()))
                }
                _ => {
                    let t = Float::with_val(bits, 2 * s - 1u32);
                    Float::with_val(bits, &t / Float::with_val(bits, 1 - Float::with_val(bits, t.abs_ref())))
                }
            }
        })
        .collect()
}

/// Rejects an `f` that does not vary over the interval.
pub(crate) fn ensure_nonconstant(f: &Expr, w: &Weight, ctx: &PrecisionContext) -> Result<()> {
    if let Some(c) = f.as_polynomial() {
        return if c.len() <= 1 {
            Err(Error::ConstantFunction)
        } else {
            Ok(())
        };
    }
    if !f.contains_x() {
        return Err(Error::ConstantFunction);
    }
    let bits = ctx.bits();
    let xs = if w.is_contour() {
        // real segment inside (-1, 1)
        (0..16)
            .map(|i| Float::with_val(bits, -0.9 + 1.8 * (i as f64) / 15.0))
            .collect()
    } else {
        interior_samples(w, 16, bits)
    };
    let vals: Vec<Float> = xs.iter().filter_map(|x| f.eval(x).ok()).collect();
    if vals.len() < 2 {
        return Err(Error::Evaluation(format!("`{f}` cannot be evaluated on the interval")));
    }
    let n = vals.len() as u32;
    let mean = vals.iter().fold(Float::new(bits), |a, v| a + v) / n;
    let var = vals
        .iter()
        .fold(Float::new(bits), |a, v| a + Float::with_val(bits, v - &mean).square())
        / n;
    let scale = Float::with_val(bits, mean.square_ref()).max(&Float::with_val(bits, 1));
    if var <= Float::with_val(bits, ctx.tol(10).square() * scale) {
        return Err(Error::ConstantFunction);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{scalar_eq, with_precision};
    use crate::weight::{normalize, parse_weight, Interval, Preset};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn preset(p: Preset, ctx: &PrecisionContext) -> Weight {
        normalize(&Weight::preset(p).unwrap(), ctx).unwrap()
    }

    #[test]
    fn laguerre_moments_are_factorials() {
        let ctx = with_precision(50).unwrap().exact();
        let w = preset(Preset::Laguerre { gamma: q(1, 1) }, &ctx);
        let m = moments(&w, 5, &ctx).unwrap();
        let want: Vec<Scalar> = [1, 1, 2, 6, 24].iter().map(|&v| ctx.int(v)).collect();
        assert_eq!(m.values, want);
        assert_eq!(m.source, MomentSource::Analytic);
    }

    #[test]
    fn chebyshev_and_uniform_moments() {
        let ctx = with_precision(50).unwrap().exact();
        let w = preset(Preset::ChebyshevU2Add, &ctx);
        let m = moments(&w, 3, &ctx).unwrap();
        assert_eq!(
            m.values,
            vec![ctx.int(1), ctx.from_rational(q(1, 4)), ctx.from_rational(q(1, 8))]
        );
        let u = preset(Preset::UniformSymmetric, &ctx);
        let m = moments(&u, 4, &ctx).unwrap();
        assert_eq!(
            m.values,
            vec![ctx.int(1), ctx.int(0), ctx.from_rational(q(1, 3)), ctx.int(0)]
        );
    }

    #[test]
    fn contour_examples() {
        let ctx = with_precision(50).unwrap();
        let m = contour_moments(0, 4, &ctx).unwrap();
        let pi = ctx.pi();
        // 2/(iπ) = -2i/π
        let m1 = ctx.from_float(Float::new(ctx.bits()), Float::with_val(ctx.bits(), -2) / &pi);
        let m3 = ctx.from_float(
            Float::new(ctx.bits()),
            Float::with_val(ctx.bits(), -2) / (pi.clone() * 3u32),
        );
        assert!(scalar_eq(&m.values[0], &ctx.int(1), 1e-60));
        assert!(scalar_eq(&m.values[1], &m1, 1e-60));
        assert!(m.values[2].is_zero());
        assert!(scalar_eq(&m.values[3], &m3, 1e-60));
        let k1 = contour_moments(1, 2, &ctx).unwrap();
        let want = ctx.from_float(Float::new(ctx.bits()), Float::with_val(ctx.bits(), -2) / (pi * 3u32));
        assert!(scalar_eq(&k1.values[1], &want, 1e-60));
        assert!(contour_moments(0, 3, &ctx.exact()).is_err());
    }

    #[test]
    fn contour_path_independence() {
        // c·m_n does not depend on the winding number for n ≥ 1
        for n in 1..12 {
            let base = &contour_moments_symbolic(0, n + 1)[n];
            for k in 1..6u32 {
                let mk = &contour_moments_symbolic(k, n + 1)[n];
                let c = Rational::from(2 * k + 1);
                assert_eq!(mk.coeff.im.clone() * c, base.coeff.im);
                assert_eq!(mk.pi_power, base.pi_power);
            }
        }
        for k in 0..4 {
            for (n, m) in contour_moments_symbolic(k, 10).iter().enumerate().skip(2).step_by(2) {
                assert!(m.coeff.is_zero(), "even moment {n} nonzero");
            }
        }
    }

    #[test]
    fn quadrature_matches_analytic() {
        let ctx = with_precision(30).unwrap();
        let half_line = Interval::new(Bound::Finite(Rational::new()), Bound::PosInf).unwrap();
        let w = normalize(&parse_weight("x*exp(-x)", half_line).unwrap(), &ctx).unwrap();
        let m = moments(&w, 8, &ctx).unwrap();
        let exact = preset(Preset::Laguerre { gamma: q(2, 1) }, &ctx);
        let a = moments(&exact, 8, &ctx).unwrap();
        for (x, y) in m.values.iter().zip(&a.values) {
            assert!(scalar_eq(x, y, 1e-20), "{x} vs {y}");
        }
        let MomentSource::Quadrature { errors } = &m.source else {
            panic!("expected quadrature source")
        };
        assert!(errors.iter().all(|e| *e <= ctx.tol(10)));
    }

    #[test]
    fn polynomial_bodies_are_exact() {
        let ctx = with_precision(30).unwrap().exact();
        let w = normalize(&parse_weight("1", Interval::finite(0, 1)).unwrap(), &ctx).unwrap();
        let m = moments(&w, 4, &ctx).unwrap();
        assert_eq!(m.values[3], ctx.from_rational(q(1, 4)));
    }

    #[test]
    fn exact_mode_refuses_quadrature() {
        let ctx = with_precision(30).unwrap();
        let half_line = Interval::new(Bound::Finite(Rational::new()), Bound::PosInf).unwrap();
        let w = normalize(&parse_weight("exp(-x)", half_line).unwrap(), &ctx).unwrap();
        assert!(matches!(moments(&w, 3, &ctx.exact()), Err(Error::ExactUnavailable(_))));
    }

    #[test]
    fn generalized_examples() {
        let ctx = with_precision(40).unwrap();
        let w = preset(Preset::Laguerre { gamma: q(1, 1) }, &ctx);
        let id = Expr::parse("x").unwrap();
        let g = generalized_moments(&w, &id, 2, 2, &ctx).unwrap();
        let m = moments(&w, 5, &ctx).unwrap();
        for k in 0..=2 {
            for j in 0..=2 {
                assert!(scalar_eq(g.get(k, j), &m.values[k + j], 1e-40));
            }
        }
        let sq = Expr::parse("x^2").unwrap();
        let g = generalized_moments(&w, &sq, 1, 1, &ctx).unwrap();
        assert!(scalar_eq(g.get(1, 0), &ctx.int(2), 1e-40));
        assert!(scalar_eq(g.get(1, 1), &ctx.int(6), 1e-40));
        assert!(scalar_eq(g.get(0, 1), &ctx.int(1), 1e-40));
        // non-polynomial f goes through quadrature
        let f = Expr::parse("exp(-x)").unwrap();
        let g = generalized_moments(&w, &f, 1, 1, &ctx).unwrap();
        assert!(g.errors.is_some());
        // <e^{-2x}> = 1/2, <x e^{-2x}> = 1/4
        assert!(scalar_eq(g.get(1, 0), &ctx.from_rational(q(1, 2)), 1e-40));
        assert!(scalar_eq(g.get(1, 1), &ctx.from_rational(q(1, 4)), 1e-40));
        assert!(matches!(
            generalized_moments(&w, &Expr::parse("3").unwrap(), 1, 1, &ctx),
            Err(Error::ConstantFunction)
        ));
        assert!(matches!(
            generalized_moments(&w, &Expr::parse("cos(0)*2").unwrap(), 1, 1, &ctx),
            Err(Error::ConstantFunction)
        ));
    }

    #[test]
    fn tighter_target_stays_within_previous_estimate() {
        let ctx = with_precision(30).unwrap();
        let w = normalize(
            &parse_weight("(1-x)^(1/2)*x^(-1/2)", Interval::finite(0, 1)).unwrap(),
            &ctx,
        )
        .unwrap();
        let loose = moments(&w, 6, &ctx).unwrap();
        let tight_integ = Integrator::new(&ctx).with_target(ctx.tol(5));
        let tight = moments_with(&w, 6, &ctx, &tight_integ).unwrap();
        let MomentSource::Quadrature { errors } = &loose.source else {
            panic!()
        };
        for ((a, b), e) in loose.values.iter().zip(&tight.values).zip(errors) {
            assert!((a - b).abs(ctx.bits()) <= *e);
        }
    }
}
