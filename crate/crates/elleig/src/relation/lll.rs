//! Lattice basis reduction with exact integer rows and exact rational
//! Gram-Schmidt bookkeeping. No floating-point shortcuts: at the small
//! dimensions used here (a dozen rows at most) correctness is worth far
//! more than speed, and exactness makes every run reproducible.

use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// LLL-reduces the rows of an integer matrix: output spans the same
/// lattice, is size-reduced (|mu| <= 1/2), and satisfies the Lovasz
/// condition at `delta`.
pub fn lll_reduce(rows: &[Vec<Integer>], delta: &Rational) -> Result<Vec<Vec<Integer>>> {
    if *delta <= Rational::from((1, 4)) || *delta > 1 {
        return Err(Error::Domain("delta must lie in (1/4, 1]".into()));
    }
    let n = rows.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(Error::Domain("ragged lattice rows".into()));
    }
    let mut state = Gso::new(rows.to_vec())?;
    let mut k = 1usize;
    while k < n {
        state.size_reduce(k, k - 1);
        // Lovasz: B[k] >= (delta - mu[k][k-1]^2) B[k-1]
        let mu = state.mu[k][k - 1].clone();
        let threshold = Rational::from(delta - Rational::from(mu.square_ref()));
        let rhs = Rational::from(&threshold * &state.b_norm[k - 1]);
        if state.b_norm[k] < rhs {
            state.swap_rows(k);
            k = k.max(2) - 1;
        } else {
            for l in (0..k.saturating_sub(1)).rev() {
                state.size_reduce(k, l);
            }
            k += 1;
        }
    }
    Ok(state.basis)
}

/// Basis rows plus their exact Gram-Schmidt data.
struct Gso {
    basis: Vec<Vec<Integer>>,
    /// mu[i][j] for j < i
    mu: Vec<Vec<Rational>>,
    /// squared norms of the orthogonalized rows
    b_norm: Vec<Rational>,
}

impl Gso {
    fn new(basis: Vec<Vec<Integer>>) -> Result<Self> {
        let n = basis.len();
        let mut state = Gso {
            basis,
            mu: vec![vec![Rational::new(); n]; n],
            b_norm: vec![Rational::new(); n],
        };
        state.recompute()?;
        Ok(state)
    }

    fn recompute(&mut self) -> Result<()> {
        let n = self.basis.len();
        // b*_i = b_i - sum_{j<i} mu_ij b*_j, tracked through inner
        // products only: store b* as rational vectors
        let width = self.basis[0].len();
        let mut star: Vec<Vec<Rational>> = Vec::with_capacity(n);
        for i in 0..n {
            let mut v: Vec<Rational> = self.basis[i]
                .iter()
                .map(|x| Rational::from(x))
                .collect();
            for j in 0..i {
                let mut dot = Rational::new();
                for t in 0..width {
                    dot += Rational::from(&star[j][t] * &Rational::from(&self.basis[i][t]));
                }
                let mu_ij = if self.b_norm[j] == 0 {
                    return Err(Error::DependentRows);
                } else {
                    Rational::from(&dot / &self.b_norm[j])
                };
                for t in 0..width {
                    let sub = Rational::from(&mu_ij * &star[j][t]);
                    v[t] -= sub;
                }
                self.mu[i][j] = mu_ij;
            }
            let mut norm = Rational::new();
            for t in 0..width {
                norm += Rational::from(v[t].square_ref());
            }
            if norm == 0 {
                return Err(Error::DependentRows);
            }
            self.b_norm[i] = norm;
            star.push(v);
        }
        Ok(())
    }

    /// Makes |mu[k][l]| <= 1/2 by subtracting an integer multiple of row l.
    fn size_reduce(&mut self, k: usize, l: usize) {
        let half = Rational::from((1u32, 2u32));
        if Rational::from(self.mu[k][l].abs_ref()) <= half {
            return;
        }
        let q = round_rational(&self.mu[k][l]);
        if q == 0 {
            return;
        }
        let width = self.basis[0].len();
        for t in 0..width {
            let sub = Integer::from(&q * &self.basis[l][t]);
            self.basis[k][t] -= sub;
        }
        let qr = Rational::from(&q);
        for j in 0..l {
            let sub = Rational::from(&qr * &self.mu[l][j]);
            self.mu[k][j] -= sub;
        }
        self.mu[k][l] -= qr;
    }

    /// Swaps rows k-1 and k and patches the Gram-Schmidt data in place.
    fn swap_rows(&mut self, k: usize) {
        let n = self.basis.len();
        self.basis.swap(k - 1, k);
        for j in 0..k.saturating_sub(1) {
            let tmp = self.mu[k - 1][j].clone();
            self.mu[k - 1][j] = self.mu[k][j].clone();
            self.mu[k][j] = tmp;
        }
        let mu = self.mu[k][k - 1].clone();
        let b_new = Rational::from(&self.b_norm[k]
            + &Rational::from(&Rational::from(mu.square_ref()) * &self.b_norm[k - 1]));
        self.mu[k][k - 1] = Rational::from(&mu * &self.b_norm[k - 1]) / b_new.clone();
        self.b_norm[k] =
            Rational::from(&self.b_norm[k - 1] * &self.b_norm[k]) / b_new.clone();
        self.b_norm[k - 1] = b_new;
        for i in (k + 1)..n {
            let t = self.mu[i][k].clone();
            self.mu[i][k] = Rational::from(&self.mu[i][k - 1] - &Rational::from(&mu * &t));
            self.mu[i][k - 1] =
                Rational::from(&t + &Rational::from(&self.mu[k][k - 1] * &self.mu[i][k]));
        }
    }
}

/// Nearest integer to a rational (ties toward +infinity).
fn round_rational(q: &Rational) -> Integer {
    let twice = Rational::from(q * Rational::from(2));
    let shifted = Rational::from(&twice + &Rational::from(1));
    // floor(shifted / 2)
    let num = shifted.numer().clone();
    let den = shifted.denom().clone();
    let two_den = Integer::from(&den * Integer::from(2));
    num.div_rem_floor(two_den).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(v: &[&[i64]]) -> Vec<Vec<Integer>> {
        v.iter()
            .map(|r| r.iter().map(|&x| Integer::from(x)).collect())
            .collect()
    }

    fn delta34() -> Rational {
        Rational::from((3, 4))
    }

    fn norm2(v: &[Integer]) -> Integer {
        let mut acc = Integer::new();
        for x in v {
            acc += Integer::from(x.square_ref());
        }
        acc
    }

    /// Exact check of size reduction and the Lovasz condition.
    pub(super) fn assert_reduced(basis: &[Vec<Integer>], delta: &Rational) {
        let state = Gso::new(basis.to_vec()).unwrap();
        for i in 0..basis.len() {
            for j in 0..i {
                assert!(
                    Rational::from(state.mu[i][j].abs_ref()) <= Rational::from((1, 2)),
                    "size reduction violated at ({i},{j})"
                );
            }
        }
        for k in 1..basis.len() {
            let mu = state.mu[k][k - 1].clone();
            let lhs = state.b_norm[k].clone();
            let rhs = Rational::from(
                &Rational::from(delta - Rational::from(mu.square_ref())) * &state.b_norm[k - 1],
            );
            assert!(lhs >= rhs, "lovasz violated at {k}");
        }
    }

    #[test]
    fn identity_stays_identity() {
        let b = rows(&[&[1, 0], &[0, 1]]);
        let out = lll_reduce(&b, &delta34()).unwrap();
        assert_eq!(out, b);
    }

    #[test]
    fn two_dim_hand_case() {
        // ((1,1),(2,0)) reduces to ((1,1),(1,-1)) up to sign
        let out = lll_reduce(&rows(&[&[1, 1], &[2, 0]]), &delta34()).unwrap();
        assert_reduced(&out, &delta34());
        let mut sorted: Vec<Vec<Integer>> = out
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if r[0] < 0 || (r[0] == 0 && r[1] < 0) {
                    for x in r.iter_mut() {
                        *x = Integer::from(-&*x);
                    }
                }
                r
            })
            .collect();
        sorted.sort();
        assert_eq!(sorted, rows(&[&[1, -1], &[1, 1]]));
    }

    #[test]
    fn first_vector_bound_two_dims() {
        // |b1| <= sqrt(2) * sqrt(det) for a reduced 2d basis at delta 3/4
        let b = rows(&[&[201, 37], &[1648, 297]]);
        let out = lll_reduce(&b, &delta34()).unwrap();
        assert_reduced(&out, &delta34());
        let det = (Integer::from(201) * Integer::from(297)
            - Integer::from(37) * Integer::from(1648))
        .abs();
        // brute force the shortest vector over small coefficients
        let mut best: Option<Integer> = None;
        for p in -50i64..=50 {
            for q in -50i64..=50 {
                if p == 0 && q == 0 {
                    continue;
                }
                let v0 = Integer::from(201 * p + 1648 * q);
                let v1 = Integer::from(37 * p + 297 * q);
                let n = Integer::from(v0.square_ref()) + Integer::from(v1.square_ref());
                if best.as_ref().is_none_or(|b| n < *b) {
                    best = Some(n);
                }
            }
        }
        let shortest2 = best.unwrap();
        let first2 = norm2(&out[0]);
        // ||b1||^2 <= 2 * det  (dimension-2 LLL bound)
        assert!(first2 <= Integer::from(2) * det);
        // and within the 2^{(n-1)/2} approximation of the true shortest
        assert!(first2 <= Integer::from(2) * shortest2);
    }

    #[test]
    fn dependent_rows_rejected() {
        let b = rows(&[&[1, 2], &[2, 4]]);
        assert!(matches!(
            lll_reduce(&b, &delta34()),
            Err(Error::DependentRows)
        ));
    }

    #[test]
    fn gram_determinant_preserved() {
        let b = rows(&[&[4, 1, 0], &[2, 3, 5], &[0, 7, 2]]);
        let out = lll_reduce(&b, &delta34()).unwrap();
        assert_reduced(&out, &delta34());
        let det = |m: &[Vec<Integer>]| -> Integer {
            let a = &m[0];
            let b = &m[1];
            let c = &m[2];
            Integer::from(&a[0] * &Integer::from(&b[1] * &c[2]))
                - Integer::from(&a[0] * &Integer::from(&b[2] * &c[1]))
                - Integer::from(&a[1] * &Integer::from(&b[0] * &c[2]))
                + Integer::from(&a[1] * &Integer::from(&b[2] * &c[0]))
                + Integer::from(&a[2] * &Integer::from(&b[0] * &c[1]))
                - Integer::from(&a[2] * &Integer::from(&b[1] * &c[0]))
        };
        assert_eq!(det(&b).abs(), det(&out).abs());
    }

    #[test]
    fn rational_rounding() {
        assert_eq!(round_rational(&Rational::from((7, 2))), 4);
        assert_eq!(round_rational(&Rational::from((-7, 2))), -3);
        assert_eq!(round_rational(&Rational::from((1, 3))), 0);
        assert_eq!(round_rational(&Rational::from((-5, 3))), -2);
        assert_eq!(round_rational(&Rational::from(9)), 9);
    }
}
