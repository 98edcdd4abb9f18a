//! Degree-n solutions from the Hankel moment system
//! `Σ_j a_{n,j} m_{k+j} = δ_{k,0}` and their normalization factors.

use rug::Float;

use crate::error::{Error, Result};
use crate::linalg::{det, full_pivot_solve, Matrix};
use crate::moments::MomentSequence;
use crate::numeric::{PrecisionContext, Scalar};
use crate::poly::Polynomial;

/// `B[k][j] = m_{k+j}` of size n+1, `C[k][j] = m_{k+j+1}` of size n.
#[derive(Clone, Debug)]
pub struct HankelSystem {
    pub n: usize,
    pub b: Matrix,
    pub c: Matrix,
    pub rhs: Vec<Scalar>,
}

impl HankelSystem {
    pub fn new(m: &MomentSequence, n: usize) -> Result<HankelSystem> {
        m.require(2 * n + 1)?;
        let v = &m.values;
        let b = Matrix::from_fn(n + 1, n + 1, |k, j| v[k + j].clone());
        let c = c_matrix(m, n);
        let mut rhs = vec![v[0].zero_like(); n + 1];
        rhs[0] = v[0].one_like();
        Ok(HankelSystem { n, b, c, rhs })
    }
}

fn c_matrix(m: &MomentSequence, n: usize) -> Matrix {
    Matrix::from_fn(n, n, |k, j| m.values[k + j + 1].clone())
}

fn b_matrix(m: &MomentSequence, n: usize) -> Matrix {
    Matrix::from_fn(n + 1, n + 1, |k, j| m.values[k + j].clone())
}

/// `det B_n` and whether the system is solvable at working precision.
#[derive(Clone, Debug)]
pub struct HankelCondition {
    pub det: Scalar,
    pub valid: bool,
    /// Smallest full-pivot pivot of the row-equilibrated `B_n`.
    pub min_pivot: Float,
}

/// In exact mode the flag is `det B_n != 0`. In float mode it requires
/// every full-pivot pivot of the row-equilibrated `B_n` to exceed
/// `10^{15-p}`.
pub fn hankel_condition(m: &MomentSequence, n: usize, ctx: &PrecisionContext) -> Result<HankelCondition> {
    let m = m.to_mode(ctx)?;
    m.require(2 * n + 1)?;
    let b = b_matrix(&m, n);
    let d = det(&b, &ctx.one());
    let rhs = vec![ctx.zero(); n + 1];
    let (elim, _) = full_pivot_solve(&b.row_equilibrated(), &rhs);
    let min_pivot = if elim.rank < n + 1 {
        Float::new(ctx.bits())
    } else {
        elim.min_pivot()
            .cloned()
            .unwrap_or_else(|| Float::with_val(ctx.bits(), 1))
    };
    let valid = if ctx.is_exact() {
        !d.is_zero()
    } else {
        elim.rank == n + 1 && min_pivot > ctx.tol(15)
    };
    Ok(HankelCondition {
        det: d,
        valid,
        min_pivot,
    })
}

fn ensure_valid(m: &MomentSequence, n: usize, ctx: &PrecisionContext) -> Result<()> {
    let cond = hankel_condition(m, n, ctx)?;
    if !cond.valid {
        return Err(Error::SingularHankel {
            degree: n,
            det: cond.det.abs(64).to_f64(),
        });
    }
    Ok(())
}

fn check_leading(coeffs: &[Scalar], n: usize, ctx: &PrecisionContext) -> Result<()> {
    let lead = coeffs.last().expect("nonempty");
    let degenerate = if ctx.is_exact() {
        lead.is_zero()
    } else {
        let bits = ctx.bits();
        let scale = coeffs
            .iter()
            .map(|c| c.abs(bits))
            .fold(Float::with_val(bits, 0), |a, b| a.max(&b));
        lead.abs(bits) <= ctx.tol(15) * scale
    };
    if degenerate {
        return Err(Error::DegenerateDegree { degree: n });
    }
    Ok(())
}

/// Solves the moment system by full-pivot elimination.
pub fn solve_polynomial(m: &MomentSequence, n: usize, ctx: &PrecisionContext) -> Result<Polynomial> {
    let m = m.to_mode(ctx)?;
    let sys = HankelSystem::new(&m, n)?;
    ensure_valid(&m, n, ctx)?;
    let (_, x) = full_pivot_solve(&sys.b, &sys.rhs);
    let coeffs = x.ok_or(Error::SingularHankel { degree: n, det: 0.0 })?;
    check_leading(&coeffs, n, ctx)?;
    Polynomial::new(coeffs)
}

/// `P_n = det A_n / det B_n`, with `det A_n` expanded along its first row
/// `(1, x, ..., x^n)`.
pub fn polynomial_via_determinants(m: &MomentSequence, n: usize, ctx: &PrecisionContext) -> Result<Polynomial> {
    let m = m.to_mode(ctx)?;
    m.require(2 * n + 1)?;
    ensure_valid(&m, n, ctx)?;
    let one = ctx.one();
    let db = det(&b_matrix(&m, n), &one);
    let coeffs: Vec<Scalar> = (0..=n)
        .map(|j| {
            // rows 1..=n of A_n, column j removed
            let minor = Matrix::from_fn(n, n, |r, c| {
                let col = if c < j { c } else { c + 1 };
                m.values[r + 1 + col].clone()
            });
            let d = &det(&minor, &one) / &db;
            if j % 2 == 1 {
                -d
            } else {
                d
            }
        })
        .collect();
    check_leading(&coeffs, n, ctx)?;
    Polynomial::new(coeffs)
}

/// `G_n = det C_n det C_{n+1} / (det B_n)^2`, equal to `⟨x P_n^2⟩`.
pub fn normalization(m: &MomentSequence, n: usize, ctx: &PrecisionContext) -> Result<Scalar> {
    let m = m.to_mode(ctx)?;
    m.require(2 * n + 2)?;
    ensure_valid(&m, n, ctx)?;
    let one = ctx.one();
    let db = det(&b_matrix(&m, n), &one);
    let cn = det(&c_matrix(&m, n), &one);
    let cn1 = det(&c_matrix(&m, n + 1), &one);
    Ok(&(&cn * &cn1) / &(&db * &db))
}
