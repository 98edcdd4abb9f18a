//! Dense linear algebra over [`Scalar`]: full-pivot solves, Bareiss and LU
//! determinants.

#![allow(clippy::needless_range_loop)]

use rug::Float;

use crate::numeric::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Matrix {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(Scalar::is_exact)
    }

    fn bits(&self) -> u32 {
        self.data.iter().find_map(Scalar::float_bits).unwrap_or(64)
    }

    /// Copy with every row divided by its largest entry magnitude.
    pub fn row_equilibrated(&self) -> Matrix {
        let bits = self.bits();
        let mut out = self.clone();
        for i in 0..self.rows {
            let mut best: Option<&Scalar> = None;
            let mut best_abs = Float::new(bits);
            for j in 0..self.cols {
                let a = self.get(i, j).abs(bits);
                if a > best_abs {
                    best_abs = a;
                    best = Some(self.get(i, j));
                }
            }
            if let Some(b) = best {
                // dividing by the entry itself keeps exact rows exact
                let b = b.clone();
                for j in 0..self.cols {
                    out.set(i, j, self.get(i, j) / &b);
                }
            }
        }
        out
    }
}

/// Result of a full-pivot elimination.
#[derive(Clone, Debug)]
pub struct Elimination {
    /// Magnitudes of the pivots in elimination order.
    pub pivots: Vec<Float>,
    /// Number of nonzero pivots found.
    pub rank: usize,
}

impl Elimination {
    pub fn min_pivot(&self) -> Option<&Float> {
        self.pivots
            .iter()
            .min_by(|a, b| a.partial_cmp(b).expect("finite pivots"))
    }
}

/// Gaussian elimination with complete pivoting on a square matrix. Returns
/// the elimination summary and, for a nonsingular matrix, the solution of
/// `A x = rhs`.
pub fn full_pivot_solve(a: &Matrix, rhs: &[Scalar]) -> (Elimination, Option<Vec<Scalar>>) {
    assert_eq!(a.rows, a.cols, "square matrix expected");
    assert_eq!(a.rows, rhs.len());
    let n = a.rows;
    let bits = a.bits();
    let mut m = a.clone();
    let mut b = rhs.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);
    for step in 0..n {
        let (mut pi, mut pj) = (step, step);
        let mut best = Float::new(bits);
        for i in step..n {
            for j in step..n {
                let v = m.get(i, j).abs(bits);
                if v > best {
                    best = v;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best.is_zero() {
            let rank = pivots.len();
            return (Elimination { pivots, rank }, None);
        }
        pivots.push(best);
        m.swap_rows(step, pi);
        b.swap(step, pi);
        m.swap_cols(step, pj);
        perm.swap(step, pj);
        let piv = m.get(step, step).clone();
        for i in step + 1..n {
            let factor = m.get(i, step) / &piv;
            if factor.is_zero() {
                continue;
            }
            for j in step..n {
                let v = m.get(i, j) - &(&factor * m.get(step, j));
                m.set(i, j, v);
            }
            b[i] = &b[i] - &(&factor * &b[step]);
        }
    }
    let mut y = vec![rhs[0].zero_like(); n];
    for i in (0..n).rev() {
        let mut acc = b[i].clone();
        for j in i + 1..n {
            acc = &acc - &(m.get(i, j) * &y[j]);
        }
        y[i] = &acc / m.get(i, i);
    }
    let mut x = vec![rhs[0].zero_like(); n];
    for (k, &col) in perm.iter().enumerate() {
        x[col] = y[k].clone();
    }
    (Elimination { rank: n, pivots }, Some(x))
}

/// Determinant; fraction-free Bareiss elimination for exact matrices,
/// partially pivoted LU otherwise. The empty matrix has determinant 1.
pub fn det(a: &Matrix, one: &Scalar) -> Scalar {
    assert_eq!(a.rows, a.cols, "square matrix expected");
    if a.rows == 0 {
        return one.clone();
    }
    if a.is_exact() {
        bareiss(a)
    } else {
        lu_det(a)
    }
}

fn bareiss(a: &Matrix) -> Scalar {
    let n = a.rows;
    let mut m = a.clone();
    let mut sign = false;
    let mut prev = a.get(0, 0).one_like();
    for k in 0..n - 1 {
        if m.get(k, k).is_zero() {
            match (k + 1..n).find(|&i| !m.get(i, k).is_zero()) {
                Some(i) => {
                    m.swap_rows(k, i);
                    sign = !sign;
                }
                None => return a.get(0, 0).zero_like(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &(&(m.get(i, j) * m.get(k, k)) - &(m.get(i, k) * m.get(k, j))) / &prev;
                m.set(i, j, v);
            }
        }
        prev = m.get(k, k).clone();
    }
    let d = m.get(n - 1, n - 1).clone();
    if sign {
        -d
    } else {
        d
    }
}

fn lu_det(a: &Matrix) -> Scalar {
    let n = a.rows;
    let bits = a.bits();
    let mut m = a.clone();
    let mut acc = a.get(0, 0).one_like();
    for k in 0..n {
        let mut pi = k;
        let mut best = Float::new(bits);
        for i in k..n {
            let v = m.get(i, k).abs(bits);
            if v > best {
                best = v;
                pi = i;
            }
        }
        if best.is_zero() {
            return a.get(0, 0).zero_like();
        }
        if pi != k {
            m.swap_rows(k, pi);
            acc = -acc;
        }
        let piv = m.get(k, k).clone();
        acc = &acc * &piv;
        for i in k + 1..n {
            let factor = m.get(i, k) / &piv;
            for j in k + 1..n {
                let v = m.get(i, j) - &(&factor * m.get(k, j));
                m.set(i, j, v);
            }
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{scalar_eq, with_precision, PrecisionContext};
    use rug::Rational;

    fn mat(ctx: &PrecisionContext, rows: &[&[i64]]) -> Matrix {
        Matrix::from_fn(rows.len(), rows[0].len(), |i, j| ctx.int(rows[i][j]))
    }

    #[test]
    fn determinants_agree_across_modes() {
        let e = with_precision(30).unwrap().exact();
        let f = with_precision(30).unwrap();
        let rows: &[&[i64]] = &[&[0, 2, 1], &[3, -1, 4], &[5, 9, -2]];
        let de = det(&mat(&e, rows), &e.one());
        assert_eq!(de, e.int(84));
        let df = det(&mat(&f, rows), &f.one());
        assert!(scalar_eq(&df, &f.int(84), 1e-40));
        assert_eq!(det(&mat(&e, &[&[1, 2], &[2, 4]]), &e.one()), e.int(0));
        let empty = Matrix::from_fn(0, 0, |_, _| unreachable!());
        assert_eq!(det(&empty, &e.one()), e.one());
    }

    #[test]
    fn full_pivot_solves_hilbert() {
        let e = with_precision(30).unwrap().exact();
        let n = 6;
        let h = Matrix::from_fn(n, n, |i, j| e.from_rational(Rational::from((1, (i + j + 1) as i64))));
        let rhs: Vec<Scalar> = (0..n).map(|i| e.int(i as i64 + 1)).collect();
        let (elim, x) = full_pivot_solve(&h, &rhs);
        assert_eq!(elim.rank, n);
        let x = x.unwrap();
        for i in 0..n {
            let mut acc = e.zero();
            for j in 0..n {
                acc = &acc + &(h.get(i, j) * &x[j]);
            }
            assert_eq!(acc, rhs[i]);
        }
        let f = with_precision(40).unwrap();
        let hf = Matrix::from_fn(n, n, |i, j| f.from_rational(Rational::from((1, (i + j + 1) as i64))));
        let xf = full_pivot_solve(&hf, &(0..n).map(|i| f.int(i as i64 + 1)).collect::<Vec<_>>())
            .1
            .unwrap();
        for (a, b) in xf.iter().zip(&x) {
            assert!(scalar_eq(a, b, 1e-40));
        }
    }

    #[test]
    fn singular_matrix_reports_rank() {
        let e = with_precision(30).unwrap().exact();
        let (elim, x) = full_pivot_solve(&mat(&e, &[&[1, 2], &[2, 4]]), &[e.one(), e.zero()]);
        assert!(x.is_none());
        assert_eq!(elim.rank, 1);
    }
}
