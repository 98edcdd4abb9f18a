//! Double-exponential (tanh-sinh) quadrature at multiprecision.
//!
//! Finite intervals use `x = c + h·tanh(π/2·sinh t)`; nodes are generated
//! as distances to the nearest endpoint so algebraic endpoint singularities
//! are sampled without cancellation. A half-infinite interval is first
//! mapped onto `(0, 1)` by `x = α + s/(1-s)` (or the mirror image), and a
//! doubly infinite one is split at the origin.

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};
use crate::numeric::{digits_to_bits, pow10, PrecisionContext, GUARD_DIGITS};
use crate::weight::{Bound, Interval};

const MIN_LEVEL: u32 = 3;
const MAX_LEVEL: u32 = 12;

/// Result of integrating a vector-valued integrand.
#[derive(Clone, Debug)]
pub struct Quadrature {
    pub values: Vec<Float>,
    /// Difference between the last two refinement levels, per component.
    pub errors: Vec<Float>,
    /// Quadrature sum of `|f|` at the final level, per component.
    pub magnitudes: Vec<Float>,
    pub levels: u32,
    pub evaluations: usize,
}

impl Quadrature {
    pub fn max_error(&self) -> (usize, Float) {
        self.errors
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, e)| (i, e.clone()))
            .unwrap_or((0, Float::new(2)))
    }
}

/// Integration settings derived from a precision context.
#[derive(Clone, Debug)]
pub struct Integrator {
    digits: u32,
    /// Working precision of the returned values.
    bits: u32,
    /// Precision at which abscissae and the integrand are evaluated.
    eval_bits: u32,
    /// Relative convergence target.
    target: Float,
    /// Nodes closer than this to an endpoint are dropped.
    cutoff_digits: u32,
}

impl Integrator {
    pub fn new(ctx: &PrecisionContext) -> Self {
        let digits = ctx.digits();
        let work = digits + GUARD_DIGITS;
        let cutoff_digits = 2 * work;
        Self {
            digits,
            bits: ctx.bits(),
            // enough to resolve `β - d` for the smallest retained distance d
            eval_bits: digits_to_bits(cutoff_digits + work + 10),
            target: ctx.tol(10),
            cutoff_digits,
        }
    }

    /// Overrides the relative convergence target.
    pub fn with_target(mut self, target: Float) -> Self {
        self.target = target;
        self
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn eval_bits(&self) -> u32 {
        self.eval_bits
    }

    /// Integrates `f` over `interval`; `f` receives `x` at evaluation
    /// precision and returns `dims` real components.
    pub fn integrate<F>(&self, interval: &Interval, dims: usize, mut f: F) -> Result<Quadrature>
    where
        F: FnMut(&Float) -> Result<Vec<Float>>,
    {
        let pieces = self.pieces(interval);
        let mut total: Option<Quadrature> = None;
        for piece in pieces {
            let q = self.integrate_piece(&piece, dims, &mut f)?;
            total = Some(match total {
                None => q,
                Some(mut acc) => {
                    for i in 0..dims {
                        acc.values[i] += &q.values[i];
                        acc.errors[i] += &q.errors[i];
                        acc.magnitudes[i] += &q.magnitudes[i];
                    }
                    acc.levels = acc.levels.max(q.levels);
                    acc.evaluations += q.evaluations;
                    acc
                }
            });
        }
        let q = total.expect("at least one piece");
        for (i, (v, e)) in q.values.iter().zip(&q.errors).enumerate() {
            let scale = Float::with_val(self.bits, v.abs_ref()).max(&Float::with_val(self.bits, 1));
            if !v.is_finite() || *e > Float::with_val(self.bits, &self.target * &scale) {
                return Err(Error::Quadrature {
                    index: i,
                    estimate: e.to_f64(),
                });
            }
        }
        Ok(q)
    }

    fn pieces(&self, iv: &Interval) -> Vec<Piece> {
        let p = self.eval_bits;
        match (&iv.alpha, &iv.beta) {
            (Bound::Finite(a), Bound::Finite(b)) => vec![Piece::Finite {
                a: Float::with_val(p, a),
                b: Float::with_val(p, b),
            }],
            (Bound::Finite(a), Bound::PosInf) => vec![Piece::Right {
                origin: Float::with_val(p, a),
            }],
            (Bound::NegInf, Bound::Finite(b)) => vec![Piece::Left {
                origin: Float::with_val(p, b),
            }],
            _ => vec![
                Piece::Left { origin: Float::new(p) },
                Piece::Right { origin: Float::new(p) },
            ],
        }
    }

    fn integrate_piece<F>(&self, piece: &Piece, dims: usize, f: &mut F) -> Result<Quadrature>
    where
        F: FnMut(&Float) -> Result<Vec<Float>>,
    {
        let p = self.eval_bits;
        let half_pi = Float::with_val(p, Constant::Pi) / 2u32;
        // (b - a) for the finite t-range of this piece
        let width = match piece {
            Piece::Finite { a, b } => Float::with_val(p, b - a),
            _ => Float::with_val(p, 1),
        };
        let half_width = Float::with_val(p, &width / 2u32);
        // Largest t with endpoint distance above 10^-cutoff (relative to width).
        let cutoff_ln = f64::from(self.cutoff_digits) * std::f64::consts::LN_10;
        let u_max = cutoff_ln / 2.0;
        let t_max = (u_max / std::f64::consts::FRAC_PI_2).asinh();

        let mut sums = vec![Float::new(p); dims];
        let mut abs_sums = vec![Float::new(p); dims];
        let mut prev: Option<Vec<Float>> = None;
        let mut evaluations = 0usize;
        let mut last_errors = vec![Float::with_val(p, f64::INFINITY); dims];
        let mut last_magnitudes = vec![Float::new(p); dims];

        let mut eval_node =
            |t: f64, sums: &mut Vec<Float>, abs_sums: &mut Vec<Float>, evals: &mut usize| -> Result<()> {
                let tt = Float::with_val(p, t);
                let sinh_t = Float::with_val(p, tt.sinh_ref());
                let cosh_t = Float::with_val(p, tt.cosh_ref());
                let u = Float::with_val(p, &half_pi * &sinh_t);
                let u_abs = Float::with_val(p, u.abs_ref());
                let cosh_u = Float::with_val(p, u_abs.cosh_ref());
                // dx/dt on (-1,1), scaled to the piece width
                let weight =
                    Float::with_val(p, &half_pi * &cosh_t) / Float::with_val(p, cosh_u.square_ref()) * &half_width;
                // distance to the nearer endpoint: width / (1 + e^{2|u|})
                let e2u = Float::with_val(p, Float::with_val(p, &u_abs * 2u32).exp_ref());
                let dist = Float::with_val(p, &width / Float::with_val(p, e2u + 1u32));
                let near_right = t > 0.0;
                let (x, jac) = piece.map(&dist, near_right);
                if jac.is_zero() || weight.is_zero() {
                    return Ok(());
                }
                let vals = f(&x)?;
                *evals += 1;
                let w = Float::with_val(p, &weight * &jac);
                for ((s, a), v) in sums.iter_mut().zip(abs_sums.iter_mut()).zip(vals) {
                    if v.is_zero() {
                        continue;
                    }
                    let term = Float::with_val(p, &w * &v);
                    *a += Float::with_val(p, term.abs_ref());
                    *s += term;
                }
                Ok(())
            };

        for level in 0..=MAX_LEVEL {
            let h = 0.5f64.powi(level as i32);
            if level == 0 {
                let k_max = t_max.floor() as i64;
                for k in -k_max..=k_max {
                    eval_node(k as f64, &mut sums, &mut abs_sums, &mut evaluations)?;
                }
            } else {
                // odd multiples of h only
                let k_max = (t_max / h).floor() as i64;
                let mut k = -k_max;
                if k % 2 == 0 {
                    k += 1;
                }
                while k <= k_max {
                    eval_node(k as f64 * h, &mut sums, &mut abs_sums, &mut evaluations)?;
                    k += 2;
                }
            }
            let current: Vec<Float> = sums
                .iter()
                .map(|s| Float::with_val(p, s * Float::with_val(p, h)))
                .collect();
            let magnitudes: Vec<Float> = abs_sums
                .iter()
                .map(|s| Float::with_val(p, s * Float::with_val(p, h)))
                .collect();
            if let Some(prev) = &prev {
                last_errors = current
                    .iter()
                    .zip(prev)
                    .map(|(c, q)| Float::with_val(p, c - q).abs())
                    .collect();
                if level >= MIN_LEVEL && self.converged(&current, &last_errors) {
                    return Ok(self.finish(current, last_errors, magnitudes, level, evaluations));
                }
            }
            prev = Some(current);
            last_magnitudes = magnitudes;
        }
        let values = prev.expect("at least one level");
        Ok(self.finish(values, last_errors, last_magnitudes, MAX_LEVEL, evaluations))
    }

    fn converged(&self, values: &[Float], errors: &[Float]) -> bool {
        // The level difference overstates the error of the finer level by a
        // wide margin once convergence is quadratic, so the stopping rule
        // asks for a margin below the target.
        let margin = pow10(self.eval_bits, -((GUARD_DIGITS / 2) as i32));
        values.iter().zip(errors).all(|(v, e)| {
            let scale = Float::with_val(self.eval_bits, v.abs_ref()).max(&Float::with_val(self.eval_bits, 1));
            *e <= Float::with_val(self.eval_bits, &self.target * &margin) * scale
        })
    }

    fn finish(
        &self,
        values: Vec<Float>,
        errors: Vec<Float>,
        magnitudes: Vec<Float>,
        levels: u32,
        evaluations: usize,
    ) -> Quadrature {
        let floor = pow10(self.bits, -((self.digits + GUARD_DIGITS) as i32));
        Quadrature {
            values: values.into_iter().map(|v| Float::with_val(self.bits, v)).collect(),
            errors: errors
                .into_iter()
                .map(|e| {
                    let e = Float::with_val(self.bits, e);
                    if e < floor {
                        floor.clone()
                    } else {
                        e
                    }
                })
                .collect(),
            magnitudes: magnitudes.into_iter().map(|v| Float::with_val(self.bits, v)).collect(),
            levels,
            evaluations,
        }
    }
}

enum Piece {
    Finite {
        a: Float,
        b: Float,
    },
    /// `(origin, +∞)` through `x = origin + s/(1-s)`, `s ∈ (0,1)`.
    Right {
        origin: Float,
    },
    /// `(-∞, origin)` through `x = origin - s/(1-s)`.
    Left {
        origin: Float,
    },
}

impl Piece {
    /// Maps a node given by its distance to the nearer end of the t-range
    /// onto `(x, dx/ds)`.
    fn map(&self, dist: &Float, near_right: bool) -> (Float, Float) {
        let p = dist.prec();
        match self {
            Piece::Finite { a, b } => {
                let x = if near_right {
                    Float::with_val(p, b - dist)
                } else {
                    Float::with_val(p, a + dist)
                };
                (x, Float::with_val(p, 1))
            }
            Piece::Right { origin } | Piece::Left { origin } => {
                // s = dist (near 0) or s = 1 - dist (near 1)
                let (s, one_minus_s) = if near_right {
                    (Float::with_val(p, 1 - dist.clone()), dist.clone())
                } else {
                    (dist.clone(), Float::with_val(p, 1 - dist.clone()))
                };
                let r = Float::with_val(p, &s / &one_minus_s);
                let jac = Float::with_val(p, one_minus_s.square_ref()).recip();
                let x = match self {
                    Piece::Right { .. } => Float::with_val(p, origin + &r),
                    _ => Float::with_val(p, origin - &r),
                };
                (x, jac)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::with_precision;
    use rug::Rational;

    fn iv(a: Bound, b: Bound) -> Interval {
        Interval::new(a, b).unwrap()
    }

    fn fin(v: i64) -> Bound {
        Bound::Finite(Rational::from(v))
    }

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        let d = Float::with_val(a.prec(), a - b).abs();
        d <= tol * Float::with_val(a.prec(), b.abs_ref()).max(&Float::with_val(a.prec(), 1))
    }

    #[test]
    fn polynomial_on_unit_interval() {
        let ctx = with_precision(30).unwrap();
        let q = Integrator::new(&ctx)
            .integrate(&iv(fin(0), fin(1)), 1, |x| {
                Ok(vec![Float::with_val(x.prec(), x.square_ref())])
            })
            .unwrap();
        assert!(close(&q.values[0], &(Float::with_val(ctx.bits(), 1) / 3u32), 1e-30));
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} (1-x)^{1/2} dx = π/2
        let ctx = with_precision(40).unwrap();
        let q = Integrator::new(&ctx)
            .integrate(&iv(fin(0), fin(1)), 1, |x| {
                let p = x.prec();
                let a = Float::with_val(p, x.sqrt_ref()).recip();
                let b = Float::with_val(p, 1 - x.clone()).sqrt();
                Ok(vec![a * b])
            })
            .unwrap();
        let want = ctx.pi() / 2u32;
        assert!(close(&q.values[0], &want, 1e-40), "{}", q.values[0]);
    }

    #[test]
    fn half_line_and_full_line() {
        let ctx = with_precision(40).unwrap();
        let integ = Integrator::new(&ctx);
        let q = integ
            .integrate(&iv(fin(0), Bound::PosInf), 2, |x| {
                let e = Float::with_val(x.prec(), -x.clone()).exp();
                let xe = Float::with_val(x.prec(), x * &e);
                Ok(vec![e, Float::with_val(x.prec(), x * xe)])
            })
            .unwrap();
        assert!(close(&q.values[0], &Float::with_val(ctx.bits(), 1), 1e-40));
        assert!(close(&q.values[1], &Float::with_val(ctx.bits(), 2), 1e-40));
        // ∫ e^{-x²} over the line = √π
        let g = integ
            .integrate(&iv(Bound::NegInf, Bound::PosInf), 1, |x| {
                Ok(vec![Float::with_val(
                    x.prec(),
                    -Float::with_val(x.prec(), x.square_ref()),
                )
                .exp()])
            })
            .unwrap();
        assert!(close(&g.values[0], &ctx.pi().sqrt(), 1e-40));
        // mirror half-line (-∞, 0]
        let m = integ
            .integrate(&iv(Bound::NegInf, fin(0)), 1, |x| {
                Ok(vec![Float::with_val(x.prec(), x.exp_ref())])
            })
            .unwrap();
        assert!(close(&m.values[0], &Float::with_val(ctx.bits(), 1), 1e-40));
    }

    #[test]
    fn divergent_integrand_reports_nonconvergence() {
        let ctx = with_precision(20).unwrap();
        let r = Integrator::new(&ctx).integrate(&iv(fin(0), fin(1)), 1, |x| {
            Ok(vec![Float::with_val(x.prec(), x.recip_ref())])
        });
        assert!(matches!(r, Err(Error::Quadrature { index: 0, .. })));
    }
}
