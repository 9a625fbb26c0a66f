//! Bracketed root refinement: bisection to safety, then a superlinear
//! polish (secant, or Newton when an analytic derivative is supplied)
//! that never leaves the bracket.

use rug::Float;

use super::PrecisionContext;
use crate::error::{Error, Result};

/// Refines a root of `f` inside `[lo, hi]` to relative width
/// `10^-ctx.digits()`. Requires a sign change across the bracket.
pub fn find_root<F>(f: F, lo: &Float, hi: &Float, ctx: &PrecisionContext) -> Result<Float>
where
    F: FnMut(&Float) -> Result<Float>,
{
    refine(f, None::<fn(&Float) -> Result<Float>>, lo, hi, ctx)
}

/// Like [`find_root`] but polishes with Newton steps using `df`.
pub fn find_root_with_derivative<F, D>(
    f: F,
    df: D,
    lo: &Float,
    hi: &Float,
    ctx: &PrecisionContext,
) -> Result<Float>
where
    F: FnMut(&Float) -> Result<Float>,
    D: FnMut(&Float) -> Result<Float>,
{
    refine(f, Some(df), lo, hi, ctx)
}

fn refine<F, D>(
    mut f: F,
    mut df: Option<D>,
    lo: &Float,
    hi: &Float,
    ctx: &PrecisionContext,
) -> Result<Float>
where
    F: FnMut(&Float) -> Result<Float>,
    D: FnMut(&Float) -> Result<Float>,
{
    let prec = ctx.prec();
    let mut lo = Float::with_val(prec, lo);
    let mut hi = Float::with_val(prec, hi);
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut flo = f(&lo)?;
    let mut fhi = f(&hi)?;
    if flo.is_zero() {
        return Ok(lo);
    }
    if fhi.is_zero() {
        return Ok(hi);
    }
    if flo.is_sign_negative() == fhi.is_sign_negative() {
        return Err(Error::InvalidBracket {
            lo: format!("{:e}", lo.to_f64()),
            hi: format!("{:e}", hi.to_f64()),
        });
    }

    let max_evals = 20 * ctx.digits() as usize;
    let mut evals = 0usize;
    let coarse_tol = ctx.pow10(-10);
    let final_tol = ctx.pow10(-(ctx.digits() as i64 + 1));
    let width_ok = |lo: &Float, hi: &Float, tol: &Float| {
        let mid_mag = Float::with_val(prec, (Float::with_val(prec, lo + hi) / 2u32).abs());
        let width = Float::with_val(prec, hi - lo);
        if mid_mag.is_zero() {
            width <= *tol
        } else {
            width <= Float::with_val(prec, &mid_mag * tol)
        }
    };

    // phase 1: bisection until ten digits are locked in
    while !width_ok(&lo, &hi, &coarse_tol) {
        if evals >= max_evals {
            return Err(Error::NonConvergence(format!(
                "bisection cap after {evals} evaluations"
            )));
        }
        let mid = Float::with_val(prec, Float::with_val(prec, &lo + &hi) / 2u32);
        if mid == lo || mid == hi {
            break; // bracket exhausted at working precision
        }
        let fm = f(&mid)?;
        evals += 1;
        if fm.is_zero() {
            return Ok(mid);
        }
        if fm.is_sign_negative() == flo.is_sign_negative() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }

    // phase 2: superlinear polish inside the bracket
    let mut x_prev = lo.clone();
    let mut f_prev = flo.clone();
    let mut x_cur = hi.clone();
    let mut f_cur = fhi.clone();
    while !width_ok(&lo, &hi, &final_tol) {
        if evals >= max_evals {
            return Err(Error::NonConvergence(format!(
                "refinement cap after {evals} evaluations"
            )));
        }
        let mut proposal: Option<Float> = None;
        if let Some(df) = df.as_mut() {
            let d = df(&x_cur)?;
            if !d.is_zero() {
                let step = Float::with_val(prec, &f_cur / &d);
                proposal = Some(Float::with_val(prec, &x_cur - &step));
            }
        } else if f_cur != f_prev {
            // secant through the last two iterates
            let denom = Float::with_val(prec, &f_cur - &f_prev);
            let num = Float::with_val(prec, &x_cur - &x_prev);
            let step = Float::with_val(prec, Float::with_val(prec, &f_cur * &num) / denom);
            proposal = Some(Float::with_val(prec, &x_cur - &step));
        }
        let mid = match proposal {
            Some(p) if p > lo && p < hi => p,
            _ => Float::with_val(prec, Float::with_val(prec, &lo + &hi) / 2u32),
        };
        if mid == lo || mid == hi {
            break;
        }
        let fm = f(&mid)?;
        evals += 1;
        if fm.is_zero() {
            return Ok(mid);
        }
        if fm.is_sign_negative() == flo.is_sign_negative() {
            lo = mid.clone();
            flo = fm.clone();
        } else {
            hi = mid.clone();
            fhi = fm.clone();
        }
        let _ = &fhi;
        x_prev = std::mem::replace(&mut x_cur, mid);
        f_prev = std::mem::replace(&mut f_cur, fm);
    }

    Ok(Float::with_val(prec, Float::with_val(prec, &lo + &hi) / 2u32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::bessel::bessel_j;
    use crate::mp::{format_decimal, matched_digits};

    #[test]
    fn sqrt_two() {
        let ctx = PrecisionContext::new(50).unwrap();
        let root = find_root(
            |x| {
                let mut v = Float::with_val(ctx.prec(), x.square_ref());
                v -= 2u32;
                Ok(v)
            },
            &ctx.from_u32(1),
            &ctx.from_u32(2),
            &ctx,
        )
        .unwrap();
        let want = ctx.from_u32(2).sqrt();
        assert!(matched_digits(&root, &want, 55) >= 50);
    }

    #[test]
    fn linear_root() {
        let ctx = PrecisionContext::new(30).unwrap();
        let root = find_root(
            |x| Ok(Float::with_val(ctx.prec(), x - 5u32)),
            &ctx.from_u32(4),
            &ctx.from_u32(7),
            &ctx,
        )
        .unwrap();
        let diff = Float::with_val(ctx.prec(), &root - 5u32).abs();
        assert!(diff < ctx.pow10(-29));
    }

    /// Pure-bisection oracle for the first J0 zero, sharing nothing with
    /// the refinement path under test.
    fn j01_bisection_oracle(digits: u32) -> Float {
        let ctx = PrecisionContext::new(digits + 10).unwrap();
        let prec = ctx.prec();
        let mut lo = ctx.from_u32(2);
        let mut hi = ctx.from_u32(3);
        for _ in 0..(4 * digits + 20) {
            let mid = Float::with_val(prec, Float::with_val(prec, &lo + &hi) / 2u32);
            let fm = bessel_j(0, &mid, &ctx).unwrap();
            if fm.is_sign_negative() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Float::with_val(prec, Float::with_val(prec, &lo + &hi) / 2u32)
    }

    #[test]
    fn first_bessel_zero() {
        let ctx = PrecisionContext::new(40).unwrap();
        let j01 = ctx.j01().unwrap();
        assert!(format_decimal(&j01, 21).starts_with("2.40482555769577276862"));
        let oracle = j01_bisection_oracle(40);
        assert!(matched_digits(&j01, &oracle, 45) >= 40);
    }

    #[test]
    fn same_sign_bracket_rejected() {
        let ctx = PrecisionContext::new(20).unwrap();
        let err = find_root(
            |x| Ok(Float::with_val(ctx.prec(), x * x)),
            &ctx.from_u32(1),
            &ctx.from_u32(2),
            &ctx,
        );
        assert!(matches!(err, Err(Error::InvalidBracket { .. })));
    }

    #[test]
    fn constants_are_consistent() {
        let ctx = PrecisionContext::new(30).unwrap();
        let (pi, j01, rho) = ctx.fundamental_constants().unwrap();
        assert!(format_decimal(&pi, 10).starts_with("3.14159265"));
        assert_eq!(format_decimal(&j01, 5), "2.4048");
        assert_eq!(format_decimal(&rho, 5), "5.7832");
        assert!(format_decimal(&rho, 12).starts_with("5.7831859629"));
        // rho - j01*j01 == 0 exactly under the context
        let prod = Float::with_val(ctx.prec(), &j01 * &j01);
        assert_eq!(rho, prod);
    }

    #[test]
    fn constants_precision_monotone() {
        let lo = PrecisionContext::new(30).unwrap();
        let hi = PrecisionContext::new(80).unwrap();
        let a = lo.j01().unwrap();
        let b = hi.j01().unwrap();
        assert!(matched_digits(&a, &b, 30) >= 30);
        let a = lo.rho().unwrap();
        let b = hi.rho().unwrap();
        assert!(matched_digits(&a, &b, 30) >= 30);
    }
}
