//! Generalized equations (multiplicative, shifted, functional and
//! arbitrary-f forms) and a verifier that substitutes a candidate
//! polynomial into the right side.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::linalg::{full_pivot_solve, Matrix};
use crate::moments::{generalized_moments, moments, GeneralizedMoments, MomentSequence, MomentSource};
use crate::numeric::{PrecisionContext, Scalar};
use crate::poly::{binomial, eval, inner_moment, linear_power, linear_shift_image, Polynomial};
use crate::quadrature::Integrator;
use crate::weight::{Bound, Weight};

#[derive(Clone, Debug, PartialEq)]
pub enum EquationForm {
    /// `P(x) = ∫ w(y) P(y) P(x+y) dy`.
    Additive,
    /// `P(x) = ∫ w(y) P(y) P(xy) dy`; `pattern` lists the lower-order
    /// coefficients assumed nonzero.
    Multiplicative { pattern: Vec<usize> },
    /// `P(x) = ∫ w(y) P(y) P(x+a+by) dy`.
    LinearShift { a: Scalar, b: Scalar },
    /// `P(x) = ∫ w(y) P(y) P(x+f(y)) dy`.
    Functional { f: Expr },
    /// `P(x) = ∫ w(y) f(P(y)) P(x+y) dy`.
    ArbitraryF { f: Expr },
}

impl EquationForm {
    pub fn name(&self) -> &'static str {
        match self {
            EquationForm::Additive => "additive",
            EquationForm::Multiplicative { .. } => "multiplicative",
            EquationForm::LinearShift { .. } => "shift",
            EquationForm::Functional { .. } => "functional",
            EquationForm::ArbitraryF { .. } => "arbitrary-f",
        }
    }

    /// Remarks worth surfacing next to results for this form.
    pub fn notes(&self) -> Vec<String> {
        match self {
            EquationForm::LinearShift { a, .. } if a.im_f64() != 0.0 || !imag_is_zero(a) => {
                vec!["complex shift a".into()]
            }
            _ => Vec::new(),
        }
    }
}

fn imag_is_zero(s: &Scalar) -> bool {
    match s {
        Scalar::Exact(g) => g.im == 0,
        Scalar::Float(c) => c.im.is_zero(),
    }
}

impl fmt::Display for EquationForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquationForm::Additive => f.write_str("additive"),
            EquationForm::Multiplicative { pattern } => write!(f, "multiplicative{pattern:?}"),
            EquationForm::LinearShift { a, b } => write!(f, "shift(a={a}, b={b})"),
            EquationForm::Functional { f: e } => write!(f, "functional(f={e})"),
            EquationForm::ArbitraryF { f: e } => write!(f, "arbitrary-f(f={e})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub form: EquationForm,
    pub sample_points: Vec<Scalar>,
    /// `|P(x) - RHS(x)|` per sample.
    pub residuals: Vec<Float>,
    pub max_residual: Float,
    /// Propagated quadrature error of the right side, 0 for closed-form moments.
    pub quadrature_error_bound: Float,
    /// `max(10 · bound, 10^{10-p} · max(1, |P| on samples))`; exact mode
    /// requires every residual to vanish.
    pub threshold: Float,
    pub exact: bool,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Three clipped endpoints plus four seeded points, all rational.
pub fn default_samples(w: &Weight, seed: u64, ctx: &PrecisionContext) -> Vec<Scalar> {
    let clip = |b: &Bound| match b {
        Bound::NegInf => Rational::from(-10),
        Bound::PosInf => Rational::from(10),
        Bound::Finite(r) => r.clone(),
    };
    let lo = clip(&w.interval.alpha);
    let hi = clip(&w.interval.beta);
    let width = Rational::from(&hi - &lo);
    let mut pts = vec![lo.clone(), Rational::from(&lo + &hi) / 2u32, hi];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4 {
        let k: u32 = rng.gen_range(0..=1000);
        pts.push(&lo + &width * Rational::from((k, 1000u32)));
    }
    pts.into_iter().map(|r| ctx.from_rational(r)).collect()
}

fn abs_poly(p: &Polynomial, bits: u32, ctx: &PrecisionContext) -> Polynomial {
    Polynomial::raw(p.coeffs().iter().map(|c| ctx.real_float(c.abs(bits))).collect())
}

fn abs_scalar(s: &Scalar, bits: u32, ctx: &PrecisionContext) -> Scalar {
    ctx.real_float(s.abs(bits))
}

fn error_sequence(m: &MomentSequence, ctx: &PrecisionContext) -> Option<MomentSequence> {
    match &m.source {
        MomentSource::Quadrature { errors } => Some(MomentSequence::from_values(
            errors.iter().map(|e| ctx.real_float(e.clone())).collect(),
            "errors",
        )),
        _ => None,
    }
}

/// Right side of the multiplicative form: `Σ_i a_i ⟨y^i P⟩ x^i`.
fn multiplicative_image(p: &Polynomial, m: &MomentSequence) -> Result<Polynomial> {
    let coeffs = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, a)| Ok(a * &inner_moment(p, i, m)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Polynomial::raw(coeffs))
}

/// Expands `P(x + s(y))` given `inner[r] = ⟨s(y)^r P-weighted⟩`.
fn binomial_image(p: &Polynomial, inner: &[Scalar]) -> Polynomial {
    let n = p.degree();
    let mut out = vec![p.coeffs()[0].zero_like(); n + 1];
    for (j, aj) in p.coeffs().iter().enumerate() {
        if aj.is_zero() {
            continue;
        }
        for i in 0..=j {
            let term = (aj * &inner[j - i]).scale_int(&binomial(j, i));
            out[i] = &out[i] + &term;
        }
    }
    Polynomial::raw(out)
}

/// `⟨f^r P⟩` for `r = 0..=n` from a generalized moment table.
fn functional_inner(p: &Polynomial, table: &[Vec<Scalar>]) -> Vec<Scalar> {
    table
        .iter()
        .map(|row| {
            p.coeffs()
                .iter()
                .zip(row)
                .fold(p.coeffs()[0].zero_like(), |acc, (a, v)| &acc + &(a * v))
        })
        .collect()
}

/// `⟨x^k f(P(x))⟩` for `k = 0..=n` with per-entry error estimates.
#[derive(Clone, Debug)]
pub struct ArbitraryFReport {
    pub values: Vec<Scalar>,
    /// `|value_k - δ_{k,0}|`.
    pub deviations: Vec<Float>,
    pub errors: Vec<Float>,
    pub tolerance: Float,
    pub pass: bool,
}

fn arbitrary_f_integrals(
    p: &Polynomial,
    f: &Expr,
    w: &Weight,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<(Vec<Scalar>, Vec<Float>)> {
    let bits = ctx.bits();
    let p = p.to_mode(ctx)?;
    if let Some(fc) = f.as_polynomial() {
        // f(P) by Horner over polynomials, then contraction
        let mut comp = Polynomial::raw(vec![ctx.from_rational(fc.last().unwrap().clone())]);
        for c in fc.iter().rev().skip(1) {
            comp = comp.mul(&p).add(&Polynomial::raw(vec![ctx.from_rational(c.clone())]));
        }
        let m = moments(w, n + comp.degree() + 1, ctx)?;
        let values = (0..=n)
            .map(|k| inner_moment(&comp, k, &m))
            .collect::<Result<Vec<_>>>()?;
        let errors = match error_sequence(&m, ctx) {
            Some(em) => {
                let ac = abs_poly(&comp, bits, ctx);
                (0..=n)
                    .map(|k| Ok(inner_moment(&ac, k, &em)?.abs(bits)))
                    .collect::<Result<Vec<_>>>()?
            }
            None => vec![Float::new(bits); n + 1],
        };
        return Ok((values, errors));
    }
    if ctx.is_exact() {
        return Err(Error::ExactUnavailable(format!(
            "integrals of f(P) with f = `{f}` need quadrature; use float mode"
        )));
    }
    if w.is_contour() {
        return Err(Error::Config("a contour weight needs a polynomial f".into()));
    }
    let integ = Integrator::new(ctx);
    let eb = integ.eval_bits();
    let coeffs: Vec<Float> = p
        .coeffs()
        .iter()
        .map(|c| {
            let z = c.to_complex(eb);
            if z.im.is_zero() {
                Ok(z.re)
            } else {
                Err(Error::ComplexArgument(format!(
                    "f = `{f}` applied to a complex polynomial"
                )))
            }
        })
        .collect::<Result<_>>()?;
    let q = integ.integrate(&w.interval, n + 1, |y| {
        let mut py = coeffs.last().unwrap().clone();
        for c in coeffs.iter().rev().skip(1) {
            py = py * y + c;
        }
        let mut acc = w.eval(y)? * f.eval(&py)?;
        let mut out = Vec::with_capacity(n + 1);
        for _ in 0..=n {
            out.push(acc.clone());
            acc *= y;
        }
        Ok(out)
    })?;
    Ok((
        q.values.into_iter().map(|v| ctx.real_float(v)).collect(),
        q.errors.into_iter().map(|e| Float::with_val(bits, e)).collect(),
    ))
}

/// Reports `⟨x^k f(P)⟩` against `δ_{k,0}` for `k = 0..=n`.
pub fn check_arbitrary_f(
    p: &Polynomial,
    f: &Expr,
    w: &Weight,
    n: usize,
    ctx: &PrecisionContext,
) -> Result<ArbitraryFReport> {
    let (values, errors) = arbitrary_f_integrals(p, f, w, n, ctx)?;
    let bits = ctx.bits();
    let deviations: Vec<Float> = values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let target = if k == 0 { ctx.one() } else { ctx.zero() };
            (v - &target).abs(bits)
        })
        .collect();
    let worst_err = errors.iter().fold(Float::new(bits), |a, e| a.max(e));
    let tolerance = Float::with_val(bits, &worst_err * 10u32).max(&ctx.tol(10));
    let pass = if ctx.is_exact() {
        deviations.iter().all(Float::is_zero)
    } else {
        deviations.iter().all(|d| *d <= tolerance)
    };
    Ok(ArbitraryFReport {
        values,
        deviations,
        errors,
        tolerance,
        pass,
    })
}

/// Substitutes `p` into the equation of `form` at each sample point.
pub fn verify(
    p: &Polynomial,
    w: &Weight,
    form: &EquationForm,
    samples: &[Scalar],
    ctx: &PrecisionContext,
) -> Result<VerificationReport> {
    if samples.is_empty() {
        return Err(Error::Config("verification needs at least one sample point".into()));
    }
    if w.is_contour() {
        return Err(Error::Config(
            "contour weights are checked through the linear moment conditions, not by substitution".into(),
        ));
    }
    let p = p.to_mode(ctx)?;
    let n = p.degree();
    let bits = ctx.bits();
    let ap = abs_poly(&p, bits, ctx);
    let mut notes = form.notes();

    let (image, bound_image): (Polynomial, Option<Polynomial>) = match form {
        EquationForm::Additive | EquationForm::LinearShift { .. } => {
            let (a, b) = match form {
                EquationForm::LinearShift { a, b } => (a.to_mode(ctx)?, b.to_mode(ctx)?),
                _ => (ctx.zero(), ctx.one()),
            };
            let m = moments(w, 2 * n + 1, ctx)?;
            let image = linear_shift_image(&p, &a, &b, &m)?;
            let bound = match error_sequence(&m, ctx) {
                Some(em) => Some(linear_shift_image(
                    &ap,
                    &abs_scalar(&a, bits, ctx),
                    &abs_scalar(&b, bits, ctx),
                    &em,
                )?),
                None => None,
            };
            (image, bound)
        }
        EquationForm::Multiplicative { pattern } => {
            let support: Vec<usize> = (0..n).filter(|&k| !p.coeffs()[k].is_zero()).collect();
            if support != *pattern {
                notes.push(format!(
                    "coefficient support {support:?} differs from pattern {pattern:?}"
                ));
            }
            let m = moments(w, 2 * n + 1, ctx)?;
            let image = multiplicative_image(&p, &m)?;
            let bound = match error_sequence(&m, ctx) {
                Some(em) => Some(multiplicative_image(&ap, &em)?),
                None => None,
            };
            (image, bound)
        }
        EquationForm::Functional { f } => {
            let gm = generalized_moments(w, f, n, n, ctx)?;
            let image = binomial_image(&p, &functional_inner(&p, &gm.values));
            let bound = gm.errors.as_ref().map(|errs| {
                let table: Vec<Vec<Scalar>> = errs
                    .iter()
                    .map(|row| row.iter().map(|e| ctx.real_float(e.clone())).collect())
                    .collect();
                binomial_image(&ap, &functional_inner(&ap, &table))
            });
            (image, bound)
        }
        EquationForm::ArbitraryF { f } => {
            let (values, errors) = arbitrary_f_integrals(&p, f, w, n, ctx)?;
            let image = binomial_image(&p, &values);
            let bound = if errors.iter().all(Float::is_zero) {
                None
            } else {
                let errs: Vec<Scalar> = errors.into_iter().map(|e| ctx.real_float(e)).collect();
                Some(binomial_image(&ap, &errs))
            };
            (image, bound)
        }
    };

    let mut residuals = Vec::with_capacity(samples.len());
    let mut max_residual = Float::new(bits);
    let mut bound = Float::new(bits);
    let mut p_scale = Float::with_val(bits, 1);
    let mut all_zero = true;
    for x in samples {
        let x = x.to_mode(ctx)?;
        let px = eval(&p, &x);
        let diff = &px - &eval(&image, &x);
        all_zero &= diff.is_zero();
        let r = diff.abs(bits);
        if r > max_residual {
            max_residual = r.clone();
        }
        residuals.push(r);
        p_scale = p_scale.max(&px.abs(bits));
        if let Some(bi) = &bound_image {
            let b = eval(bi, &abs_scalar(&x, bits, ctx)).abs(bits);
            bound = bound.max(&b);
        }
    }
    let threshold = Float::with_val(bits, &bound * 10u32).max(&(ctx.tol(10) * p_scale));
    let exact = ctx.is_exact();
    let pass = if exact { all_zero } else { max_residual <= threshold };
    Ok(VerificationReport {
        form: form.clone(),
        sample_points: samples.to_vec(),
        residuals,
        max_residual,
        quadrature_error_bound: bound,
        threshold,
        exact,
        pass,
        notes,
    })
}

fn solve_square(
    rows: usize,
    entry: impl FnMut(usize, usize) -> Scalar,
    rhs: Vec<Scalar>,
    ctx: &PrecisionContext,
    what: &str,
) -> Result<Vec<Scalar>> {
    let a = Matrix::from_fn(rows, rows, entry);
    let singular = || Error::SingularSystem(format!("{what} system of size {rows} is singular"));
    if !ctx.is_exact() {
        let zeros = vec![ctx.zero(); rows];
        let (elim, _) = full_pivot_solve(&a.row_equilibrated(), &zeros);
        if elim.rank < rows || elim.min_pivot().is_some_and(|p| *p <= ctx.tol(15)) {
            return Err(singular());
        }
    }
    full_pivot_solve(&a, &rhs).1.ok_or_else(singular)
}

fn negligible(c: &Scalar, all: &[Scalar], ctx: &PrecisionContext) -> bool {
    if ctx.is_exact() {
        return c.is_zero();
    }
    let bits = ctx.bits();
    let scale = all.iter().fold(Float::new(bits), |a, v| a.max(&v.abs(bits)));
    c.abs(bits) <= ctx.tol(15) * scale
}

fn unit_rhs(rows: usize, ctx: &PrecisionContext) -> Vec<Scalar> {
    let mut rhs = vec![ctx.zero(); rows];
    rhs[0] = ctx.one();
    rhs
}

/// Multiplicative solution with nonzero coefficients on `pattern ∪ {n}`:
/// `⟨x^k P⟩ = 1` for each such `k`.
pub fn solve_multiplicative(
    m: &MomentSequence,
    n: usize,
    pattern: &[usize],
    ctx: &PrecisionContext,
) -> Result<Polynomial> {
    if let Some(&bad) = pattern.iter().find(|&&k| k >= n) {
        return Err(Error::InvalidParameter(format!(
            "pattern index {bad} must be below the degree {n}"
        )));
    }
    let m = m.to_mode(ctx)?;
    m.require(2 * n + 1)?;
    let mut idx: Vec<usize> = pattern.to_vec();
    idx.sort_unstable();
    idx.dedup();
    idx.push(n);
    let size = idx.len();
    let sol = solve_square(
        size,
        |r, c| m.values[idx[r] + idx[c]].clone(),
        vec![ctx.one(); size],
        ctx,
        "multiplicative",
    )?;
    for (pos, c) in sol.iter().enumerate() {
        if negligible(c, &sol, ctx) {
            return Err(Error::InconsistentPattern {
                pattern: idx[..size - 1].to_vec(),
                index: idx[pos],
            });
        }
    }
    let mut coeffs = vec![ctx.zero(); n + 1];
    for (pos, &i) in idx.iter().enumerate() {
        coeffs[i] = sol[pos].clone();
    }
    Polynomial::new(coeffs)
}

/// Indices below `n` with the parity of `n`.
pub fn parity_pattern(n: usize) -> Vec<usize> {
    (0..n).filter(|k| k % 2 == n % 2).collect()
}

pub fn full_pattern(n: usize) -> Vec<usize> {
    (0..n).collect()
}

#[derive(Clone, Debug)]
pub struct PatternOutcome {
    pub pattern: Vec<usize>,
    pub result: std::result::Result<Polynomial, Error>,
}

#[derive(Clone, Debug)]
pub struct Enumeration {
    pub degree: usize,
    pub outcomes: Vec<PatternOutcome>,
    /// Number of pairwise distinct successful polynomials.
    pub distinct: usize,
}

/// Tries every subset of `{0..n-1}` in bitmask order.
pub fn enumerate_multiplicative(m: &MomentSequence, n: usize, ctx: &PrecisionContext) -> Result<Enumeration> {
    if n == 0 {
        return Err(Error::InvalidParameter("pattern enumeration needs degree >= 1".into()));
    }
    if n >= usize::BITS as usize {
        return Err(Error::InvalidParameter(format!("degree {n} is too large to enumerate")));
    }
    let mut outcomes = Vec::with_capacity(1 << n);
    let mut found: Vec<Polynomial> = Vec::new();
    for mask in 0usize..(1 << n) {
        let pattern: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
        let result = match solve_multiplicative(m, n, &pattern, ctx) {
            Ok(p) => Ok(p),
            Err(e @ (Error::InconsistentPattern { .. } | Error::SingularSystem(_))) => Err(e),
            Err(e) => return Err(e),
        };
        if let Ok(p) = &result {
            if !found.iter().any(|q| same_polynomial(p, q, ctx)) {
                found.push(p.clone());
            }
        }
        outcomes.push(PatternOutcome { pattern, result });
    }
    Ok(Enumeration {
        degree: n,
        outcomes,
        distinct: found.len(),
    })
}

fn same_polynomial(p: &Polynomial, q: &Polynomial, ctx: &PrecisionContext) -> bool {
    p.degree() == q.degree()
        && p.coeffs()
            .iter()
            .zip(q.coeffs())
            .all(|(a, b)| crate::numeric::scalar_close(a, b, &ctx.tol(10)))
}

/// `μ_n = ½ (m_n - m_{n+2}) (1 + (-1)^n)` for `n = 0..=big_n`.
pub fn parity_measure_moments(m: &MomentSequence, big_n: usize) -> Result<Vec<Scalar>> {
    m.require(big_n + 3)?;
    Ok((0..=big_n)
        .map(|n| {
            if n % 2 == 1 {
                m.values[0].zero_like()
            } else {
                &m.values[n] - &m.values[n + 2]
            }
        })
        .collect())
}

/// Solution of `⟨(a + b x)^k P⟩ = δ_{k,0}` for `k = 0..=n`.
pub fn solve_linear_shift(
    m: &MomentSequence,
    n: usize,
    a: &Scalar,
    b: &Scalar,
    ctx: &PrecisionContext,
) -> Result<Polynomial> {
    if b.is_zero() {
        return Err(Error::InvalidParameter("the shift slope b must be nonzero".into()));
    }
    let m = m.to_mode(ctx)?;
    m.require(2 * n + 1)?;
    let (a, b) = (a.to_mode(ctx)?, b.to_mode(ctx)?);
    let powers: Vec<Vec<Scalar>> = (0..=n).map(|k| linear_power(&a, &b, k)).collect();
    let sol = solve_square(
        n + 1,
        |k, j| m.contract(&powers[k], j).expect("length checked"),
        unit_rhs(n + 1, ctx),
        ctx,
        "shifted moment",
    )?;
    if negligible(sol.last().unwrap(), &sol, ctx) {
        return Err(Error::DegenerateDegree { degree: n });
    }
    Polynomial::new(sol)
}

/// Solution of `⟨f^k P⟩ = δ_{k,0}` for `k = 0..=n`.
pub fn solve_functional(w: &Weight, f: &Expr, n: usize, ctx: &PrecisionContext) -> Result<Polynomial> {
    let gm = generalized_moments(w, f, n, n, ctx)?;
    solve_functional_table(&gm, n, ctx)
}

/// [`solve_functional`] from a precomputed table `M[k][j] = ⟨f^k x^j⟩`.
pub fn solve_functional_table(gm: &GeneralizedMoments, n: usize, ctx: &PrecisionContext) -> Result<Polynomial> {
    if gm.values.len() <= n || gm.values[0].len() <= n {
        return Err(Error::InsufficientMoments {
            needed: n + 1,
            available: gm.values.len().min(gm.values[0].len()),
        });
    }
    let table: Vec<Vec<Scalar>> = gm
        .values
        .iter()
        .map(|row| row.iter().map(|v| v.to_mode(ctx)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let sol = solve_square(
        n + 1,
        |k, j| table[k][j].clone(),
        unit_rhs(n + 1, ctx),
        ctx,
        "functional",
    )?;
    if negligible(sol.last().unwrap(), &sol, ctx) {
        return Err(Error::DegenerateDegree { degree: n });
    }
    Polynomial::new(sol)
}

#[derive(Clone, Debug)]
pub struct OrthogonalityCheck {
    pub value: Scalar,
    pub error_bound: Float,
    pub tolerance: Float,
    pub pass: bool,
}

/// `⟨f(x) Pn(x) Pm(f(x))⟩` for `deg Pm < deg Pn`.
pub fn check_functional_orthogonality(
    pn: &Polynomial,
    pm: &Polynomial,
    w: &Weight,
    f: &Expr,
    ctx: &PrecisionContext,
) -> Result<OrthogonalityCheck> {
    if pm.degree() >= pn.degree() {
        return Err(Error::InvalidParameter(format!(
            "expected deg Pm < deg Pn, got {} and {}",
            pm.degree(),
            pn.degree()
        )));
    }
    let (pn, pm) = (pn.to_mode(ctx)?, pm.to_mode(ctx)?);
    let gm = generalized_moments(w, f, pm.degree() + 1, pn.degree(), ctx)?;
    let bits = ctx.bits();
    let mut value = ctx.zero();
    let mut magnitude = Float::new(bits);
    let mut error_bound = Float::new(bits);
    for (i, bi) in pm.coeffs().iter().enumerate() {
        for (j, aj) in pn.coeffs().iter().enumerate() {
            let term = &(bi * aj) * gm.get(i + 1, j);
            magnitude += term.abs(bits);
            value = &value + &term;
            if let Some(errs) = &gm.errors {
                error_bound += Float::with_val(bits, (bi * aj).abs(bits) * &errs[i + 1][j]);
            }
        }
    }
    let tolerance =
        Float::with_val(bits, &error_bound * 10u32).max(&(ctx.tol(10) * magnitude.max(&Float::with_val(bits, 1))));
    let pass = if ctx.is_exact() {
        value.is_zero()
    } else {
        value.abs(bits) <= tolerance
    };
    Ok(OrthogonalityCheck {
        value,
        error_bound,
        tolerance,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::solve_polynomial;
    use crate::numeric::{scalar_eq, with_precision};
    use crate::weight::{normalize, parse_weight, Interval, Preset};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    fn preset(p: Preset, ctx: &PrecisionContext) -> Weight {
        normalize(&Weight::preset(p).unwrap(), ctx).unwrap()
    }

    fn unit(ctx: &PrecisionContext) -> Weight {
        normalize(&parse_weight("1", Interval::finite(0, 1)).unwrap(), ctx).unwrap()
    }

    fn ints(ctx: &PrecisionContext, v: &[i64]) -> Vec<Scalar> {
        v.iter().map(|&x| ctx.int(x)).collect()
    }

    #[test]
    fn verify_examples() {
        let ctx = with_precision(30).unwrap().exact();
        let lag = preset(Preset::Laguerre { gamma: q(1, 1) }, &ctx);
        let p1 = Polynomial::from_ints(&ctx, &[2, -1]).unwrap();
        let r = verify(&p1, &lag, &EquationForm::Additive, &ints(&ctx, &[0, 1, 5]), &ctx).unwrap();
        assert!(r.pass && r.max_residual.is_zero());

        let uni = preset(Preset::UniformSymmetric, &ctx);
        let p = Polynomial::from_ints(&ctx, &[0, 3]).unwrap();
        let form = EquationForm::Multiplicative { pattern: vec![] };
        let r = verify(&p, &uni, &form, &ints(&ctx, &[-1, 0, 2]), &ctx).unwrap();
        assert!(r.pass && r.max_residual.is_zero());

        let one = Polynomial::one(&ctx);
        let forms = [
            EquationForm::Additive,
            EquationForm::Multiplicative { pattern: vec![] },
            EquationForm::LinearShift {
                a: ctx.int(1),
                b: ctx.int(-1),
            },
            EquationForm::Functional {
                f: Expr::parse("x^2").unwrap(),
            },
            EquationForm::ArbitraryF {
                f: Expr::parse("x^3").unwrap(),
            },
        ];
        for form in &forms {
            let r = verify(&one, &lag, form, &ints(&ctx, &[0, 3]), &ctx).unwrap();
            assert!(r.pass, "{form}");
        }
        let bad = Polynomial::from_ints(&ctx, &[2, -2]).unwrap();
        let r = verify(&bad, &lag, &EquationForm::Additive, &ints(&ctx, &[0, 1]), &ctx).unwrap();
        assert!(!r.pass);
        assert!(verify(&p1, &lag, &EquationForm::Additive, &[], &ctx).is_err());
    }

    #[test]
    fn float_verify_with_quadrature_moments() {
        let ctx = with_precision(30).unwrap();
        let half = Interval::new(Bound::Finite(Rational::new()), Bound::PosInf).unwrap();
        let w = normalize(&parse_weight("exp(-x)", half).unwrap(), &ctx).unwrap();
        let m = moments(&w, 9, &ctx).unwrap();
        let p = solve_polynomial(&m, 4, &ctx).unwrap();
        let samples = default_samples(&w, 7, &ctx);
        assert_eq!(samples.len(), 7);
        let r = verify(&p, &w, &EquationForm::Additive, &samples, &ctx).unwrap();
        assert!(r.pass, "max residual {}", r.max_residual);
        assert!(r.quadrature_error_bound > 0);
        // non-polynomial f through quadrature
        let f = Expr::parse("exp(-x)").unwrap();
        let pf = solve_functional(&w, &f, 2, &ctx).unwrap();
        let r = verify(&pf, &w, &EquationForm::Functional { f }, &samples, &ctx).unwrap();
        assert!(r.pass, "max residual {}", r.max_residual);
    }

    #[test]
    fn samples_are_reproducible() {
        let ctx = with_precision(30).unwrap().exact();
        let w = preset(Preset::UniformSymmetric, &ctx);
        assert_eq!(default_samples(&w, 3, &ctx), default_samples(&w, 3, &ctx));
        let s = default_samples(&w, 3, &ctx);
        assert_eq!(&s[..3], &ints(&ctx, &[-1, 0, 1])[..]);
    }

    #[test]
    fn multiplicative_examples() {
        let ctx = with_precision(30).unwrap().exact();
        let m = moments(&unit(&ctx), 8, &ctx).unwrap();
        assert_eq!(
            solve_multiplicative(&m, 1, &[0], &ctx).unwrap(),
            Polynomial::from_ints(&ctx, &[-2, 6]).unwrap()
        );
        let uni = moments(&preset(Preset::UniformSymmetric, &ctx), 8, &ctx).unwrap();
        assert_eq!(
            solve_multiplicative(&uni, 1, &parity_pattern(1), &ctx).unwrap(),
            Polynomial::from_ints(&ctx, &[0, 3]).unwrap()
        );
        assert_eq!(solve_multiplicative(&m, 0, &[], &ctx).unwrap(), Polynomial::one(&ctx));
        assert!(solve_multiplicative(&m, 1, &[1], &ctx).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let ctx = with_precision(30).unwrap().exact();
        let m = moments(&unit(&ctx), 12, &ctx).unwrap();
        let e = enumerate_multiplicative(&m, 1, &ctx).unwrap();
        assert_eq!(e.outcomes.len(), 2);
        assert_eq!(e.outcomes[0].pattern, Vec::<usize>::new());
        // b x with b^2 m_2 = b, so b = 3
        let sparse = e.outcomes[0].result.as_ref().unwrap();
        assert_eq!(sparse, &Polynomial::from_ints(&ctx, &[0, 3]).unwrap());
        let w = unit(&ctx);
        let form = EquationForm::Multiplicative { pattern: vec![] };
        assert!(verify(sparse, &w, &form, &ints(&ctx, &[0, 1, 2]), &ctx).unwrap().pass);
        let two_x = Polynomial::from_ints(&ctx, &[0, 2]).unwrap();
        assert!(!verify(&two_x, &w, &form, &ints(&ctx, &[1]), &ctx).unwrap().pass);
        assert_eq!(
            e.outcomes[1].result.as_ref().unwrap(),
            &Polynomial::from_ints(&ctx, &[-2, 6]).unwrap()
        );
        assert_eq!(e.distinct, 2);
        assert_eq!(enumerate_multiplicative(&m, 3, &ctx).unwrap().outcomes.len(), 8);
        let uni = moments(&preset(Preset::UniformSymmetric, &ctx), 12, &ctx).unwrap();
        let e = enumerate_multiplicative(&uni, 2, &ctx).unwrap();
        assert_eq!(e.distinct, 4);
    }

    #[test]
    fn parity_moments() {
        let ctx = with_precision(30).unwrap().exact();
        let uni = moments(&preset(Preset::UniformSymmetric, &ctx), 8, &ctx).unwrap();
        let mu = parity_measure_moments(&uni, 4).unwrap();
        assert_eq!(mu[0], ctx.from_rational(q(2, 3)));
        assert_eq!(mu[2], ctx.from_rational(q(2, 15)));
        assert!(mu[1].is_zero() && mu[3].is_zero());
        assert!(matches!(
            parity_measure_moments(&uni, 6),
            Err(Error::InsufficientMoments { .. })
        ));
    }

    #[test]
    fn linear_shift_examples() {
        let ctx = with_precision(30).unwrap().exact();
        let lag = moments(&preset(Preset::Laguerre { gamma: q(1, 1) }, &ctx), 12, &ctx).unwrap();
        for n in 0..5 {
            let base = solve_polynomial(&lag, n, &ctx).unwrap();
            assert_eq!(
                solve_linear_shift(&lag, n, &ctx.int(0), &ctx.int(1), &ctx).unwrap(),
                base
            );
            assert_eq!(
                solve_linear_shift(&lag, n, &ctx.int(0), &ctx.int(2), &ctx).unwrap(),
                base
            );
        }
        let m = moments(&unit(&ctx), 8, &ctx).unwrap();
        assert_eq!(
            solve_linear_shift(&m, 1, &ctx.int(1), &ctx.int(-1), &ctx).unwrap(),
            Polynomial::from_ints(&ctx, &[-2, 6]).unwrap()
        );
        assert!(matches!(
            solve_linear_shift(&m, 1, &ctx.int(1), &ctx.int(0), &ctx),
            Err(Error::InvalidParameter(_))
        ));
        let form = EquationForm::LinearShift {
            a: ctx.from_gauss(crate::numeric::GaussRational::new(q(1, 1), q(1, 1))),
            b: ctx.one(),
        };
        assert_eq!(form.notes(), vec!["complex shift a".to_string()]);
    }

    #[test]
    fn functional_examples() {
        let ctx = with_precision(40).unwrap();
        let half = Interval::new(Bound::Finite(Rational::new()), Bound::PosInf).unwrap();
        let w = normalize(&parse_weight("exp(-x)", half).unwrap(), &ctx).unwrap();
        let sq = Expr::parse("x^2").unwrap();
        let p1 = solve_functional(&w, &sq, 1, &ctx).unwrap();
        let want = [ctx.from_rational(q(3, 2)), ctx.from_rational(q(-1, 2))];
        for (a, b) in p1.coeffs().iter().zip(&want) {
            assert!(scalar_eq(a, b, 1e-30));
        }
        assert_eq!(solve_functional(&w, &sq, 0, &ctx).unwrap().degree(), 0);
        let p0 = Polynomial::one(&ctx);
        let c = check_functional_orthogonality(&p1, &p0, &w, &sq, &ctx).unwrap();
        assert!(c.pass && c.value.abs(ctx.bits()) < 1e-30);
        let id = Expr::parse("x").unwrap();
        let m = moments(&w, 8, &ctx).unwrap();
        for n in 0..4 {
            let a = solve_functional(&w, &id, n, &ctx).unwrap();
            let b = solve_polynomial(&m, n, &ctx).unwrap();
            for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
                assert!(scalar_eq(x, y, 1e-30));
            }
        }
        assert!(matches!(
            solve_functional(&w, &Expr::parse("2").unwrap(), 1, &ctx),
            Err(Error::ConstantFunction)
        ));
    }

    #[test]
    fn arbitrary_f_examples() {
        let ctx = with_precision(30).unwrap().exact();
        let lag = preset(Preset::Laguerre { gamma: q(1, 1) }, &ctx);
        let id = Expr::parse("x").unwrap();
        let p1 = Polynomial::from_ints(&ctx, &[2, -1]).unwrap();
        assert!(check_arbitrary_f(&p1, &id, &lag, 1, &ctx).unwrap().pass);
        let x = Polynomial::from_ints(&ctx, &[0, 1]).unwrap();
        let r = check_arbitrary_f(&x, &id, &lag, 1, &ctx).unwrap();
        assert_eq!(r.values, vec![ctx.int(1), ctx.int(2)]);
        assert!(!r.pass);
        let one = Polynomial::one(&ctx);
        let r = check_arbitrary_f(&one, &Expr::parse("x^2").unwrap(), &lag, 0, &ctx).unwrap();
        assert_eq!(r.values[0], ctx.one());
        // non-polynomial f via quadrature
        let fctx = with_precision(30).unwrap();
        let lagf = preset(Preset::Laguerre { gamma: q(1, 1) }, &fctx);
        let r = check_arbitrary_f(
            &Polynomial::one(&fctx),
            &Expr::parse("exp(x-1)").unwrap(),
            &lagf,
            1,
            &fctx,
        )
        .unwrap();
        assert!(scalar_eq(&r.values[0], &fctx.one(), 1e-25));
    }
}
