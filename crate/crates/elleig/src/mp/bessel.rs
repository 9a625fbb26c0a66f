//! Bessel functions of the first kind for nonnegative integer order.
//!
//! Two evaluation routes, chosen by argument size:
//! ascending power series while the hump cancellation stays affordable
//! (`x <= max(30, digits/2)`), and a backward Miller recurrence
//! normalized against the series-evaluated J0 (or J1 near a J0 zero)
//! otherwise. The recurrence route certifies its output through the
//! normalization identity `J0 + 2*sum J_{2k} = 1`; on failure the guard
//! allowance is doubled once before giving up.

use rug::ops::Pow;
use rug::Float;

use super::PrecisionContext;
use crate::error::{Error, Result};

const LOG10_E: f64 = 0.4342944819032518;

/// J_n(x) trusted to `ctx.digits()` digits (relative, or absolute once
/// the value is below one).
pub fn bessel_j(n: u32, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    check_arg(x)?;
    if x.is_zero() {
        return Ok(if n == 0 {
            ctx.from_u32(1)
        } else {
            ctx.zero()
        });
    }
    let xf = x.to_f64();
    let series_cutoff = 30.0_f64.max(ctx.digits() as f64 / 2.0);
    if xf <= series_cutoff {
        let v = series_j(n, x, ctx.digits() + ctx.guard_digits(), ctx.guard_digits())?;
        return Ok(round_to(v, ctx));
    }
    let all = bessel_j_upto(n, x, ctx)?;
    Ok(all.into_iter().next_back().unwrap())
}

/// J_0(x), J_1(x), ..., J_nmax(x) in one backward-recurrence sweep.
pub fn bessel_j_upto(nmax: u32, x: &Float, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    check_arg(x)?;
    if x.is_zero() {
        let mut out = vec![ctx.zero(); nmax as usize + 1];
        out[0] = ctx.from_u32(1);
        return Ok(out);
    }
    let mut extra = ctx.guard_digits();
    for attempt in 0..2 {
        match miller_sweep(nmax, x, ctx, extra) {
            Ok(vals) => return Ok(vals),
            Err(e) if attempt == 0 => {
                let _ = e;
                extra *= 2;
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

fn check_arg(x: &Float) -> Result<()> {
    if x.is_sign_negative() && !x.is_zero() {
        return Err(Error::Domain(format!("bessel_j needs x >= 0, got {x}")));
    }
    if !x.is_finite() {
        return Err(Error::Domain("bessel_j needs finite x".into()));
    }
    Ok(())
}

fn round_to(v: Float, ctx: &PrecisionContext) -> Float {
    Float::with_val(ctx.prec(), v)
}

/// Ascending series sum of J_n(x), carried with enough extra precision
/// to absorb the alternating-hump cancellation (~0.435*x digits).
fn series_j(n: u32, x: &Float, want_digits: u32, guard: u32) -> Result<Float> {
    let xf = x.to_f64();
    let cancel = (LOG10_E * xf).ceil() as u32 + 10;
    let work_digits = want_digits + guard + cancel;
    let prec = super::bits_for_digits(work_digits);
    let x_hi = Float::with_val(prec, x);
    let half_x = Float::with_val(prec, &x_hi / 2u32);
    let neg_q = -Float::with_val(prec, half_x.square_ref());

    // leading term (x/2)^n / n!
    let mut term = Float::with_val(prec, (&half_x).pow(n));
    let mut fact = Float::with_val(prec, 1);
    for k in 1..=n {
        fact *= k;
    }
    term /= &fact;

    let mut sum = term.clone();
    let mut max_mag = Float::with_val(prec, term.abs_ref());
    let stop = crate::mp::pow10(prec, -(work_digits as i64) + 2);
    let mut m: u32 = 0;
    loop {
        m += 1;
        // term *= -(x/2)^2 / (m (n+m))
        term *= &neg_q;
        term /= m;
        term /= n + m;
        sum += &term;
        let mag = Float::with_val(prec, term.abs_ref());
        if mag > max_mag {
            max_mag = mag.clone();
        }
        if (m as f64) > xf / 2.0 && mag < Float::with_val(prec, &stop * &max_mag) {
            break;
        }
        if m > 10_000_000 {
            return Err(Error::PrecisionUnachievable(format!(
                "bessel series for n={n} did not terminate"
            )));
        }
    }
    // certify absolutely: roundoff rides on the largest term, so the sum
    // is good to ~10^-(work - log10 max_mag); values near a Bessel zero
    // keep full absolute accuracy even as relative digits vanish
    let lost_abs = max_mag.to_f64().log10().max(0.0);
    if (work_digits as f64) - lost_abs < want_digits as f64 + 2.0 {
        return Err(Error::PrecisionUnachievable(format!(
            "bessel series cancellation at x={xf} exceeded the guard allowance"
        )));
    }
    Ok(sum)
}

/// Backward recurrence from a start order far enough above both nmax and
/// x that the seeded tail is below the target accuracy.
fn miller_sweep(
    nmax: u32,
    x: &Float,
    ctx: &PrecisionContext,
    extra: u32,
) -> Result<Vec<Float>> {
    let want = ctx.digits() + extra + 10;
    let xf = x.to_f64();
    let start = miller_start_order(nmax, xf, want);
    let prec = super::bits_for_digits(want + 10);
    let x_hi = Float::with_val(prec, x);

    let mut above = Float::new(prec); // y_{m+1}
    let mut here = Float::with_val(prec, 1e-10); // y_m at m = start
    let mut kept: Vec<Float> = vec![Float::new(prec); nmax as usize + 1];
    let mut even_sum = Float::new(prec); // sum of y_{2k}, k >= 1, 2k <= start
    let mut m = start;
    while m > 0 {
        if m <= nmax {
            kept[m as usize] = here.clone();
        }
        if m % 2 == 0 {
            even_sum += &here;
        }
        // y_{m-1} = (2m/x) y_m - y_{m+1}
        let mut next = Float::with_val(prec, 2 * m);
        next /= &x_hi;
        next *= &here;
        next -= &above;
        above = std::mem::replace(&mut here, next);
        m -= 1;
    }
    kept[0] = here.clone();

    // normalization: scale = y_0 / J0(x), via the series route; switch to
    // J1 when x sits near a zero of J0
    let j0 = series_j(0, x, want, 5)?;
    let use_j1 = j0.clone().abs().to_f64() < 0.05;
    let scale = if use_j1 {
        let j1 = series_j(1, x, want, 5)?;
        if nmax < 1 {
            // y_1 was not kept; recover it from the recurrence identity
            // y_1 = (2/x) y_0 - y_...: not available, so rerun with nmax=1
            let vals = miller_sweep(1, x, ctx, extra)?;
            return Ok(vec![vals.into_iter().next().unwrap()]);
        }
        Float::with_val(prec, &kept[1] / &j1)
    } else {
        Float::with_val(prec, &here / &j0)
    };
    if scale.is_zero() || !scale.is_finite() {
        return Err(Error::PrecisionUnachievable(
            "miller normalization degenerated".into(),
        ));
    }

    // certificate: (y_0 + 2 sum y_{2k}) / scale must reproduce 1
    let mut ident = Float::with_val(prec, &even_sum * 2u32);
    ident += &here;
    ident /= &scale;
    ident -= 1u32;
    let tol = crate::mp::pow10(prec, -((ctx.digits() + 3) as i64));
    if Float::with_val(prec, ident.abs_ref()) > tol {
        return Err(Error::PrecisionUnachievable(format!(
            "miller normalization identity residual {:e} at x={xf}",
            ident.to_f64()
        )));
    }

    Ok(kept
        .into_iter()
        .map(|y| round_to(Float::with_val(prec, &y / &scale), ctx))
        .collect())
}

/// Smallest start order whose Bessel value has decayed `want` digits
/// below O(1), estimated with the Debye exponent in plain f64.
fn miller_start_order(nmax: u32, xf: f64, want: u32) -> u32 {
    let target = want as f64 + 8.0;
    let mut lo = (nmax as f64).max(xf).max(4.0) as u32 + 2;
    let mut step = 8u32;
    loop {
        if debye_decay_digits(lo as f64, xf) >= target {
            return lo + 4;
        }
        lo += step;
        step = (step * 2).min(1 << 20);
    }
}

/// Decimal digits by which |J_m(x)| lies below O(1) for m > x, from the
/// Debye exponent m (alpha - tanh alpha) with cosh alpha = m/x.
fn debye_decay_digits(m: f64, x: f64) -> f64 {
    if m <= x {
        return 0.0;
    }
    let c = m / x;
    let root = (c * c - 1.0).sqrt();
    let alpha = (c + root).ln();
    m * (alpha - root / c) * LOG10_E
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::{format_decimal, matched_digits};
    use rug::ops::Pow;

    /// Plain series summation at twice the precision; the independent
    /// check the main path is compared against.
    fn oracle_series(n: u32, x: &Float, digits: u32) -> Float {
        let prec = crate::mp::bits_for_digits(2 * digits + 40);
        let x = Float::with_val(prec, x);
        let half = Float::with_val(prec, &x / 2u32);
        let mq = -Float::with_val(prec, half.square_ref());
        let mut term = Float::with_val(prec, (&half).pow(n));
        for k in 1..=n {
            term /= k;
        }
        let mut sum = term.clone();
        for m in 1..(4 * digits + 200) {
            term *= &mq;
            term /= m;
            term /= n + m;
            sum += &term;
        }
        sum
    }

    #[test]
    fn origin_values() {
        let ctx = PrecisionContext::new(30).unwrap();
        let zero = ctx.zero();
        assert_eq!(bessel_j(0, &zero, &ctx).unwrap(), 1);
        assert!(bessel_j(3, &zero, &ctx).unwrap().is_zero());
    }

    #[test]
    fn j1_at_one_against_series_oracle() {
        let ctx = PrecisionContext::new(60).unwrap();
        let x = ctx.from_u32(1);
        let got = bessel_j(1, &x, &ctx).unwrap();
        let want = oracle_series(1, &x, 60);
        assert!(matched_digits(&got, &want, 60) >= 60);
        assert!(format_decimal(&got, 20).starts_with("0.4400505857449335159"));
    }

    #[test]
    fn vanishes_at_first_j0_zero() {
        let ctx = PrecisionContext::new(40).unwrap();
        let j01 = ctx.j01().unwrap();
        let v = bessel_j(0, &j01, &ctx).unwrap();
        let tol = ctx.rel_eps();
        assert!(v.abs() < tol);
    }

    #[test]
    fn miller_agrees_with_series_and_mpfr() {
        let ctx = PrecisionContext::new(50).unwrap();
        for (n, xs) in [(0u32, "47.25"), (7, "83.0"), (24, "61.5"), (3, "122.0")] {
            let x = ctx.from_decimal(xs).unwrap();
            let got = bessel_j(n, &x, &ctx).unwrap();
            // independent route 1: raw series at doubled precision
            let want = oracle_series(n, &x, 55);
            let diff = Float::with_val(ctx.prec(), &got - &want).abs();
            assert!(
                diff < ctx.pow10(-(ctx.digits() as i64 - 2)),
                "n={n} x={xs}: {:e}",
                diff.to_f64()
            );
            // independent route 2: mpfr's own jn
            let mpfr = Float::with_val(ctx.prec(), &x).jn(n as i32);
            let diff = Float::with_val(ctx.prec(), &got - &mpfr).abs();
            assert!(diff < ctx.pow10(-(ctx.digits() as i64 - 2)));
        }
    }

    #[test]
    fn batch_matches_single_orders() {
        let ctx = PrecisionContext::new(40).unwrap();
        let x = ctx.from_decimal("17.125").unwrap();
        let all = bessel_j_upto(30, &x, &ctx).unwrap();
        for n in [0u32, 1, 13, 30] {
            let single = bessel_j(n, &x, &ctx).unwrap();
            let diff = Float::with_val(ctx.prec(), &all[n as usize] - &single).abs();
            assert!(diff < ctx.pow10(-(ctx.digits() as i64 - 2)));
        }
    }

    #[test]
    fn three_term_recurrence_residual() {
        let ctx = PrecisionContext::new(35).unwrap();
        let x = ctx.from_decimal("29.75").unwrap();
        let j = bessel_j_upto(12, &x, &ctx).unwrap();
        for n in 1..12u32 {
            let mut lhs = Float::with_val(ctx.prec(), &j[(n - 1) as usize] + &j[(n + 1) as usize]);
            let mut rhs = Float::with_val(ctx.prec(), 2 * n);
            rhs /= &x;
            rhs *= &j[n as usize];
            lhs -= &rhs;
            let bound = Float::with_val(
                ctx.prec(),
                ctx.pow10(-(ctx.digits() as i64 - 5))
                    * Float::with_val(ctx.prec(), j[n as usize].clone().abs().max(&ctx.from_u32(1))),
            );
            assert!(lhs.abs() < bound, "n={n}");
        }
    }

    #[test]
    fn rejects_negative_argument() {
        let ctx = PrecisionContext::new(20).unwrap();
        let x = ctx.from_i64(-2);
        assert!(matches!(bessel_j(0, &x, &ctx), Err(Error::Domain(_))));
    }
}
