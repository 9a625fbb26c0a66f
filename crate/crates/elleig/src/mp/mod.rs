//! Arbitrary-precision real arithmetic services: working-precision
//! contexts with cached fundamental constants, Bessel functions of the
//! first kind, and bracketed root refinement.
//!
//! Everything downstream (geometry, eigensolver, series fits, relation
//! hunting) runs on top of this module. A [`PrecisionContext`] fixes the
//! number of decimal digits a caller wants to trust; operations carry
//! `digits + guard_digits` internally and report results trusted to
//! `digits`.

pub mod bessel;
pub mod roots;

use std::sync::OnceLock;

use rug::float::Constant;
use rug::{Float, Rational};

use crate::error::{Error, Result};

const LOG2_10: f64 = 3.321928094887362;

/// Binary precision that comfortably carries `decimal_digits` digits.
pub fn bits_for_digits(decimal_digits: u32) -> u32 {
    (decimal_digits as f64 * LOG2_10).ceil() as u32 + 32
}

/// Working precision: trusted decimal digits plus internal guard digits.
///
/// Immutable after construction; the constant caches are write-once, so a
/// context can be shared freely across threads.
#[derive(Debug)]
pub struct PrecisionContext {
    digits: u32,
    guard_digits: u32,
    prec: u32,
    pi_cache: OnceLock<Float>,
    j01_cache: OnceLock<Float>,
}

impl PrecisionContext {
    /// Context with the default 20 guard digits.
    pub fn new(digits: u32) -> Result<Self> {
        Self::with_guard(digits, 20)
    }

    pub fn with_guard(digits: u32, guard_digits: u32) -> Result<Self> {
        if digits < 10 {
            return Err(Error::InvalidPrecision(format!(
                "digits must be >= 10, got {digits}"
            )));
        }
        if guard_digits < 5 {
            return Err(Error::InvalidPrecision(format!(
                "guard_digits must be >= 5, got {guard_digits}"
            )));
        }
        Ok(PrecisionContext {
            digits,
            guard_digits,
            prec: bits_for_digits(digits + guard_digits),
            pi_cache: OnceLock::new(),
            j01_cache: OnceLock::new(),
        })
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn guard_digits(&self) -> u32 {
        self.guard_digits
    }

    /// Binary working precision (covers digits + guard).
    pub fn prec(&self) -> u32 {
        self.prec
    }

    /// Fresh zero at working precision.
    pub fn zero(&self) -> Float {
        Float::new(self.prec)
    }

    pub fn from_u32(&self, v: u32) -> Float {
        Float::with_val(self.prec, v)
    }

    pub fn from_i64(&self, v: i64) -> Float {
        Float::with_val(self.prec, v)
    }

    pub fn from_f64(&self, v: f64) -> Float {
        Float::with_val(self.prec, v)
    }

    pub fn from_rational(&self, v: &Rational) -> Float {
        Float::with_val(self.prec, v)
    }

    /// Parses a decimal string at working precision.
    pub fn from_decimal(&self, s: &str) -> Result<Float> {
        let incomplete = Float::parse(s)
            .map_err(|e| Error::Parse(format!("bad decimal {s:?}: {e}")))?;
        Ok(Float::with_val(self.prec, incomplete))
    }

    /// 10^-digits as a float; the relative width everything is trusted to.
    pub fn rel_eps(&self) -> Float {
        self.pow10(-(self.digits as i64))
    }

    /// 10^exp at working precision.
    pub fn pow10(&self, exp: i64) -> Float {
        pow10(self.prec, exp)
    }

    /// Pi at working precision (cached).
    pub fn pi(&self) -> Float {
        self.pi_cache
            .get_or_init(|| Float::with_val(self.prec, Constant::Pi))
            .clone()
    }

    /// First positive zero of J0 (cached), located by bracketed
    /// bisection-then-Newton on (2, 3) with J0' = -J1.
    pub fn j01(&self) -> Result<Float> {
        if let Some(v) = self.j01_cache.get() {
            return Ok(v.clone());
        }
        let lo = self.from_u32(2);
        let hi = self.from_u32(3);
        let root = roots::find_root_with_derivative(
            |x| bessel::bessel_j(0, x, self),
            |x| {
                let j1 = bessel::bessel_j(1, x, self)?;
                Ok(-j1)
            },
            &lo,
            &hi,
            self,
        )?;
        let _ = self.j01_cache.set(root.clone());
        Ok(root)
    }

    /// Fundamental eigenvalue of the unit-radius disk: j01 squared.
    pub fn rho(&self) -> Result<Float> {
        let j = self.j01()?;
        Ok(Float::with_val(self.prec, &j * &j))
    }

    /// All three cached constants at once.
    pub fn fundamental_constants(&self) -> Result<(Float, Float, Float)> {
        let pi = self.pi();
        let j01 = self.j01()?;
        let rho = self.rho()?;
        Ok((pi, j01, rho))
    }
}

/// 10^exp at the given binary precision.
pub fn pow10(prec: u32, exp: i64) -> Float {
    let mag = Float::with_val(prec, Float::u_pow_u(10, exp.unsigned_abs() as u32));
    if exp < 0 {
        Float::with_val(prec, mag.recip())
    } else {
        mag
    }
}

/// Integer power of a float at the float's own precision.
pub fn pow_i64(x: &Float, exp: i64) -> Float {
    use rug::ops::Pow;
    let prec = x.prec();
    let p = Float::with_val(prec, x.pow(exp.unsigned_abs() as u32));
    if exp < 0 {
        Float::with_val(prec, p.recip())
    } else {
        p
    }
}

/// Number of leading significant decimal digits on which `a` and `b`
/// agree, judged by comparing both rounded to the same length, for every
/// length up to `cap`. Returns `cap` when they are indistinguishable.
pub fn matched_digits(a: &Float, b: &Float, cap: u32) -> u32 {
    if a.is_zero() && b.is_zero() {
        return cap;
    }
    if a.is_zero() || b.is_zero() || (a.is_sign_negative() != b.is_sign_negative()) {
        return 0;
    }
    let mut best = 0u32;
    for d in 1..=cap {
        let (sa, ea) = significant_digits(a, d as usize);
        let (sb, eb) = significant_digits(b, d as usize);
        if sa == sb && ea == eb {
            best = d;
        }
    }
    best
}

/// Digit string (no sign, no point) and decimal exponent with the value
/// equal to 0.DIGITS x 10^exp, rounded to `len` digits.
fn significant_digits(x: &Float, len: usize) -> (String, i32) {
    let (_, digits, exp) = x.to_sign_string_exp(10, Some(len));
    (digits, exp.unwrap_or(0))
}

/// Renders `x` as a plain positional decimal with `sig` significant
/// digits: no exponent notation, no digit grouping.
pub fn format_decimal(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let (neg, digits, exp) = x.to_sign_string_exp(10, Some(sig));
    let exp = exp.unwrap_or(0);
    let sign = if neg { "-" } else { "" };
    let n = digits.len() as i32;
    let body = if exp <= 0 {
        format!("0.{}{}", "0".repeat((-exp) as usize), digits)
    } else if exp >= n {
        format!("{}{}", digits, "0".repeat((exp - n) as usize))
    } else {
        format!("{}.{}", &digits[..exp as usize], &digits[exp as usize..])
    };
    format!("{sign}{body}")
}

/// Parses a plain decimal string into an exact rational.
pub fn decimal_to_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let (sign, t) = match t.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match t.split_once('.') {
        Some((i, f)) => (i, f),
        None => (t, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("empty decimal {s:?}")));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(Error::Parse(format!("not a plain decimal: {s:?}")));
    }
    let joined = format!("{int_part}{frac_part}");
    let num = rug::Integer::from_str_radix(if joined.is_empty() { "0" } else { &joined }, 10)
        .map_err(|e| Error::Parse(format!("bad decimal {s:?}: {e}")))?;
    let den = pow10_int(frac_part.len() as u32);
    let mut r = Rational::from((num, den));
    if sign < 0 {
        r = -r;
    }
    Ok(r)
}

/// 10^e as an exact integer.
pub fn pow10_int(e: u32) -> rug::Integer {
    use rug::ops::Pow;
    rug::Integer::from(rug::Integer::from(10).pow(e))
}

/// Exact finite decimal representation of a rational whose denominator
/// divides a power of ten. Trailing fractional zeros are trimmed.
pub fn rational_to_decimal(r: &Rational) -> Option<String> {
    let mut den = r.denom().clone();
    let mut twos = 0u32;
    while den.is_even() {
        den >>= 1;
        twos += 1;
    }
    let mut fives = 0u32;
    loop {
        let (q, rem) = den.clone().div_rem(rug::Integer::from(5));
        if rem != 0 {
            break;
        }
        den = q;
        fives += 1;
    }
    if den != 1 {
        return None;
    }
    let places = twos.max(fives);
    let scaled = Rational::from(r * Rational::from(pow10_int(places)));
    debug_assert_eq!(*scaled.denom(), 1);
    let digits = scaled.numer().to_string();
    let (sign, digits) = match digits.strip_prefix('-') {
        Some(rest) => ("-", rest.to_string()),
        None => ("", digits),
    };
    let digits = format!("{:0>width$}", digits, width = places as usize + 1);
    let split = digits.len() - places as usize;
    let (int_part, frac_part) = digits.split_at(split);
    let frac_part = frac_part.trim_end_matches('0');
    Some(if frac_part.is_empty() {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part}")
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_bounds() {
        assert!(PrecisionContext::new(9).is_err());
        assert!(PrecisionContext::with_guard(10, 4).is_err());
        let ctx = PrecisionContext::new(30).unwrap();
        assert_eq!(ctx.digits(), 30);
        assert_eq!(ctx.guard_digits(), 20);
    }

    #[test]
    fn pi_prefix() {
        let ctx = PrecisionContext::new(50).unwrap();
        let s = format_decimal(&ctx.pi(), 41);
        assert_eq!(s, "3.1415926535897932384626433832795028841972");
    }

    #[test]
    fn decimal_round_trips() {
        for s in ["0.1", "0.999995", "5", "123.456", "-0.0025", "0.000001"] {
            let r = decimal_to_rational(s).unwrap();
            assert_eq!(rational_to_decimal(&r).unwrap(), s);
        }
        assert_eq!(rational_to_decimal(&Rational::from((1, 3))), None);
    }

    #[test]
    fn positional_format() {
        let ctx = PrecisionContext::new(20).unwrap();
        let x = ctx.from_decimal("246739.25").unwrap();
        assert_eq!(format_decimal(&x, 10), "246739.2500");
        let y = ctx.from_decimal("0.0019998").unwrap();
        assert_eq!(format_decimal(&y, 5), "0.0019998");
        let z = ctx.from_decimal("-2.5").unwrap();
        assert_eq!(format_decimal(&z, 2), "-2.5");
    }

    #[test]
    fn matched_digit_counting() {
        let ctx = PrecisionContext::new(60).unwrap();
        // a 36-digit truncation against the full value: 36 digits agree
        let t = ctx
            .from_decimal("0.435383650779955252940603845025457624")
            .unwrap();
        let r = ctx
            .from_decimal("0.43538365077995525294060384502545762443837546")
            .unwrap();
        assert_eq!(matched_digits(&t, &r, 60), 36);
        // rounding at the boundary: table value is the closed form rounded
        // to 20 digits, so 20 digits agree
        let t = ctx.from_decimal("0.11822456134208701629").unwrap();
        let r = ctx
            .from_decimal("0.11822456134208701628737486416945")
            .unwrap();
        assert_eq!(matched_digits(&t, &r, 40), 20);
        // carry across a digit boundary still counts shared rounded digits
        let a = ctx.from_decimal("0.14999999").unwrap();
        let b = ctx.from_decimal("0.15000001").unwrap();
        assert!(matched_digits(&a, &b, 20) >= 6);
        // sign mismatch
        let a = ctx.from_decimal("1.5").unwrap();
        let b = ctx.from_decimal("-1.5").unwrap();
        assert_eq!(matched_digits(&a, &b, 20), 0);
    }
}
