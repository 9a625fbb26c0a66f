//! Dense linear algebra on multiprecision floats: LU with full pivoting
//! (determinant, solve, null direction) and modified Gram-Schmidt least
//! squares for over-determined fits.

use rug::Float;

use crate::error::{Error, Result};

/// Row-major dense matrix of floats sharing one precision.
#[derive(Debug, Clone)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Float>,
    prec: u32,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize, prec: u32) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![Float::new(prec); rows * cols],
            prec,
        }
    }

    pub fn from_rows(rows_vec: Vec<Vec<Float>>) -> Self {
        let rows = rows_vec.len();
        let cols = rows_vec.first().map_or(0, Vec::len);
        let prec = rows_vec
            .first()
            .and_then(|r| r.first())
            .map_or(64, Float::prec);
        let mut data = Vec::with_capacity(rows * cols);
        for r in rows_vec {
            assert_eq!(r.len(), cols, "ragged matrix");
            data.extend(r);
        }
        Matrix {
            rows,
            cols,
            data,
            prec,
        }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn at(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Float {
        &mut self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Float) {
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

    /// Scales every row to unit maximum magnitude. Leaves the null
    /// space untouched.
    pub fn scale_rows_unit(&mut self) {
        let prec = self.prec;
        for i in 0..self.rows {
            let mut mx = Float::new(prec);
            for j in 0..self.cols {
                let a = Float::with_val(prec, self.at(i, j).abs_ref());
                if a > mx {
                    mx = a;
                }
            }
            if !mx.is_zero() {
                for j in 0..self.cols {
                    *self.at_mut(i, j) /= &mx;
                }
            }
        }
    }

    /// Scales every row, then every column, to unit maximum magnitude.
    /// The scale factors are positive, so determinant sign structure in
    /// any parameter is preserved.
    pub fn equilibrate(&mut self) {
        let prec = self.prec;
        self.scale_rows_unit();
        for j in 0..self.cols {
            let mut mx = Float::new(prec);
            for i in 0..self.rows {
                let a = Float::with_val(prec, self.at(i, j).abs_ref());
                if a > mx {
                    mx = a;
                }
            }
            if !mx.is_zero() {
                for i in 0..self.rows {
                    *self.at_mut(i, j) /= &mx;
                }
            }
        }
    }
}

/// Outcome of an in-place full-pivot LU elimination.
struct FullPivotLu {
    a: Matrix,
    col_perm: Vec<usize>,
    sign_flips: u32,
    singular_at: Option<usize>,
}

fn lu_full_pivot(mut a: Matrix) -> FullPivotLu {
    let n = a.rows.min(a.cols);
    let prec = a.prec;
    let mut col_perm: Vec<usize> = (0..a.cols).collect();
    let mut sign_flips = 0u32;
    let mut singular_at = None;
    for k in 0..n {
        // locate the largest remaining entry
        let (mut pi, mut pj) = (k, k);
        let mut best = Float::new(prec);
        for i in k..a.rows {
            for j in k..a.cols {
                let mag = Float::with_val(prec, a.at(i, j).abs_ref());
                if mag > best {
                    best = mag;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best.is_zero() {
            singular_at = Some(k);
            break;
        }
        if pi != k {
            a.swap_rows(k, pi);
            sign_flips += 1;
        }
        if pj != k {
            a.swap_cols(k, pj);
            col_perm.swap(k, pj);
            sign_flips += 1;
        }
        let pivot = a.at(k, k).clone();
        for i in (k + 1)..a.rows {
            let factor = Float::with_val(prec, a.at(i, k) / &pivot);
            for j in (k + 1)..a.cols {
                let sub = Float::with_val(prec, &factor * a.at(k, j));
                *a.at_mut(i, j) -= &sub;
            }
            a.set(i, k, factor);
        }
    }
    FullPivotLu {
        a,
        col_perm,
        sign_flips,
        singular_at,
    }
}

/// Determinant of a square matrix by full-pivot LU.
pub fn determinant(a: Matrix) -> Float {
    assert_eq!(a.rows, a.cols);
    let prec = a.prec;
    let n = a.rows;
    let lu = lu_full_pivot(a);
    if lu.singular_at.is_some() {
        return Float::new(prec);
    }
    let mut det = Float::with_val(prec, 1);
    for k in 0..n {
        det *= lu.a.at(k, k);
    }
    if lu.sign_flips % 2 == 1 {
        det = -det;
    }
    det
}

/// Solves a square system by carrying the right-hand side through a
/// full-pivot elimination as an augmented column.
pub fn solve_square_aug(a: Matrix, b: Vec<Float>) -> Result<Vec<Float>> {
    assert_eq!(a.rows, a.cols);
    assert_eq!(a.rows, b.len());
    let n = a.rows;
    let prec = a.prec;
    // augment
    let mut aug = Matrix::zero(n, n + 1, prec);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, a.at(i, j).clone());
        }
    }
    for (i, v) in b.into_iter().enumerate() {
        aug.set(i, n, v);
    }
    let mut col_perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let (mut pi, mut pj) = (k, k);
        let mut best = Float::new(prec);
        for i in k..n {
            for j in k..n {
                let mag = Float::with_val(prec, aug.at(i, j).abs_ref());
                if mag > best {
                    best = mag;
                    pi = i;
                    pj = j;
                }
            }
        }
        if best.is_zero() {
            return Err(Error::SingularSystem(
                "zero pivot in full-pivot elimination".into(),
            ));
        }
        aug.swap_rows(k, pi);
        if pj != k {
            aug.swap_cols(k, pj);
            col_perm.swap(k, pj);
        }
        let pivot = aug.at(k, k).clone();
        for i in (k + 1)..n {
            let factor = Float::with_val(prec, aug.at(i, k) / &pivot);
            if factor.is_zero() {
                continue;
            }
            for j in (k + 1)..=n {
                let sub = Float::with_val(prec, &factor * aug.at(k, j));
                *aug.at_mut(i, j) -= &sub;
            }
            aug.set(i, k, Float::new(prec));
        }
    }
    // back substitution
    let mut y = vec![Float::new(prec); n];
    for k in (0..n).rev() {
        let mut acc = aug.at(k, n).clone();
        for j in (k + 1)..n {
            let sub = Float::with_val(prec, aug.at(k, j) * &y[j]);
            acc -= &sub;
        }
        y[k] = Float::with_val(prec, &acc / aug.at(k, k));
    }
    // undo column permutation
    let mut x = vec![Float::new(prec); n];
    for (slot, &orig) in col_perm.iter().enumerate() {
        x[orig] = y[slot].clone();
    }
    Ok(x)
}

/// Approximate null direction of a numerically singular square matrix:
/// full-pivot LU, unit weight on the last pivot column, back
/// substitution over the leading block. The result is unnormalized.
pub fn null_direction(a: Matrix) -> Vec<Float> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let prec = a.prec;
    let lu = lu_full_pivot(a);
    let rank = lu.singular_at.unwrap_or(n.saturating_sub(1));
    let mut y = vec![Float::new(prec); n];
    y[rank] = Float::with_val(prec, 1);
    for k in (0..rank).rev() {
        let mut acc = Float::new(prec);
        for j in (k + 1)..n {
            let term = Float::with_val(prec, lu.a.at(k, j) * &y[j]);
            acc += &term;
        }
        y[k] = -Float::with_val(prec, &acc / lu.a.at(k, k));
    }
    let mut x = vec![Float::new(prec); n];
    for (slot, &orig) in lu.col_perm.iter().enumerate() {
        x[orig] = y[slot].clone();
    }
    x
}

/// Least squares by modified Gram-Schmidt QR; requires rows >= cols and
/// full column rank.
pub fn solve_least_squares(a: Matrix, b: Vec<Float>) -> Result<Vec<Float>> {
    assert!(a.rows >= a.cols);
    assert_eq!(a.rows, b.len());
    let (m, n) = (a.rows, a.cols);
    let prec = a.prec;
    // columns of q, built in place
    let mut q: Vec<Vec<Float>> = (0..n)
        .map(|j| (0..m).map(|i| a.at(i, j).clone()).collect())
        .collect();
    let mut r = Matrix::zero(n, n, prec);
    let mut rhs = b;
    for j in 0..n {
        for i in 0..j {
            // r[i][j] = q_i . q_j
            let mut dot = Float::new(prec);
            for k in 0..m {
                dot += Float::with_val(prec, &q[i][k] * &q[j][k]);
            }
            for k in 0..m {
                let sub = Float::with_val(prec, &dot * &q[i][k]);
                q[j][k] -= &sub;
            }
            r.set(i, j, dot);
        }
        let mut norm2 = Float::new(prec);
        for k in 0..m {
            norm2 += Float::with_val(prec, q[j][k].square_ref());
        }
        if norm2.is_zero() {
            return Err(Error::SingularSystem("rank-deficient least squares".into()));
        }
        let norm = norm2.sqrt();
        for k in 0..m {
            q[j][k] /= &norm;
        }
        r.set(j, j, norm);
    }
    // qt * b
    let mut qtb = vec![Float::new(prec); n];
    for (j, qj) in q.iter().enumerate() {
        let mut dot = Float::new(prec);
        for k in 0..m {
            dot += Float::with_val(prec, &qj[k] * &rhs[k]);
        }
        qtb[j] = dot;
    }
    let _ = &mut rhs;
    // back substitution on r
    let mut x = vec![Float::new(prec); n];
    for k in (0..n).rev() {
        let mut acc = qtb[k].clone();
        for j in (k + 1)..n {
            let sub = Float::with_val(prec, r.at(k, j) * &x[j]);
            acc -= &sub;
        }
        x[k] = Float::with_val(prec, &acc / r.at(k, k));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::{matched_digits, PrecisionContext};

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn mat(ctx: &PrecisionContext, rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| ctx.from_i64(v)).collect())
                .collect(),
        )
    }

    #[test]
    fn determinant_small() {
        let ctx = ctx();
        let a = mat(&ctx, &[&[2, 1], &[7, 4]]);
        assert_eq!(determinant(a).to_f64(), 1.0);
        let a = mat(&ctx, &[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]);
        assert_eq!(determinant(a).to_f64(), -3.0);
        let singular = mat(&ctx, &[&[1, 2], &[2, 4]]);
        assert!(determinant(singular).is_zero());
    }

    #[test]
    fn solve_square_known() {
        let ctx = ctx();
        let a = mat(&ctx, &[&[2, 1], &[1, 3]]);
        let b = vec![ctx.from_i64(5), ctx.from_i64(10)];
        let x = solve_square_aug(a, b).unwrap();
        assert!(matched_digits(&x[0], &ctx.from_u32(1), 45) >= 38);
        assert!(matched_digits(&x[1], &ctx.from_u32(3), 45) >= 38);
    }

    #[test]
    fn null_direction_of_singular() {
        let ctx = ctx();
        // rank 1: rows (1,2), (3,6); null direction proportional to (2,-1)
        let a = mat(&ctx, &[&[1, 2], &[3, 6]]);
        let v = null_direction(a.clone());
        // residual a*v should vanish
        for i in 0..2 {
            let mut acc = Float::new(ctx.prec());
            for j in 0..2 {
                acc += Float::with_val(ctx.prec(), a.at(i, j) * &v[j]);
            }
            assert!(acc.abs() < ctx.pow10(-35), "row {i}");
        }
    }

    #[test]
    fn least_squares_recovers_exact() {
        let ctx = ctx();
        // overdetermined consistent system: y = 2 + 3t at t = 0,1,2,3
        let rows: Vec<Vec<Float>> = (0..4)
            .map(|t| vec![ctx.from_u32(1), ctx.from_i64(t)])
            .collect();
        let b: Vec<Float> = (0..4).map(|t| ctx.from_i64(2 + 3 * t)).collect();
        let x = solve_least_squares(Matrix::from_rows(rows), b).unwrap();
        assert!(matched_digits(&x[0], &ctx.from_u32(2), 45) >= 38);
        assert!(matched_digits(&x[1], &ctx.from_u32(3), 45) >= 38);
    }

    #[test]
    fn equilibrate_preserves_sign() {
        let ctx = ctx();
        let mut a = mat(&ctx, &[&[1000000, 1], &[-3, 2]]);
        let sign_before = determinant(a.clone()).is_sign_negative();
        a.equilibrate();
        let sign_after = determinant(a).is_sign_negative();
        assert_eq!(sign_before, sign_after);
    }
}
