//! Exact symbolic values: rational combinations of integer powers of pi
//! and rho (the squared first zero of J0). Everything the pipeline
//! treats as "known in closed form" is one of these, so it can be
//! re-evaluated at any precision without loss.

use std::fmt;

use rug::{Float, Integer, Rational};

use crate::error::Result;
use crate::mp::PrecisionContext;

/// A single symbolic constant: pi^k, rho^k, or the literal one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstantAtom {
    One,
    Pi(i32),
    Rho(i32),
}

impl ConstantAtom {
    pub fn eval(&self, ctx: &PrecisionContext) -> Result<Float> {
        Ok(match self {
            ConstantAtom::One => ctx.from_u32(1),
            ConstantAtom::Pi(k) => crate::mp::pow_i64(&ctx.pi(), *k as i64),
            ConstantAtom::Rho(k) => crate::mp::pow_i64(&ctx.rho()?, *k as i64),
        })
    }

    fn normalized(self) -> Self {
        match self {
            ConstantAtom::Pi(0) | ConstantAtom::Rho(0) => ConstantAtom::One,
            other => other,
        }
    }
}

impl fmt::Display for ConstantAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.normalized() {
            ConstantAtom::One => write!(f, "1"),
            ConstantAtom::Pi(1) => write!(f, "π"),
            ConstantAtom::Pi(k) => write!(f, "π^{k}"),
            ConstantAtom::Rho(1) => write!(f, "ρ"),
            ConstantAtom::Rho(k) => write!(f, "ρ^{k}"),
        }
    }
}

/// A finite sum of rational multiples of atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedForm {
    terms: Vec<(Rational, ConstantAtom)>,
}

impl ClosedForm {
    pub fn new(terms: Vec<(Rational, ConstantAtom)>) -> Self {
        let terms = terms
            .into_iter()
            .filter(|(q, _)| *q != 0)
            .map(|(q, a)| (q, a.normalized()))
            .collect();
        ClosedForm { terms }
    }

    pub fn zero() -> Self {
        ClosedForm { terms: Vec::new() }
    }

    pub fn rational(q: Rational) -> Self {
        Self::new(vec![(q, ConstantAtom::One)])
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(Rational::from(n))
    }

    /// q * pi^k as a single term.
    pub fn pi_term(q: Rational, k: i32) -> Self {
        Self::new(vec![(q, ConstantAtom::Pi(k))])
    }

    /// Polynomial in rho with integer coefficients (ascending powers)
    /// over a common integer denominator.
    pub fn rho_polynomial(ascending: &[i64], denominator: i64) -> Self {
        let den = Rational::from(denominator);
        let terms = ascending
            .iter()
            .enumerate()
            .map(|(k, c)| {
                (
                    Rational::from(*c) / den.clone(),
                    ConstantAtom::Rho(k as i32),
                )
            })
            .collect();
        Self::new(terms)
    }

    /// Like [`Self::rho_polynomial`] but with arbitrarily large integers
    /// given as decimal strings.
    pub fn rho_polynomial_str(ascending: &[&str], denominator: &str) -> Self {
        let den: Integer = denominator.parse().expect("bad denominator literal");
        let terms = ascending
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let num: Integer = c.parse().expect("bad coefficient literal");
                (
                    Rational::from((num, den.clone())),
                    ConstantAtom::Rho(k as i32),
                )
            })
            .collect();
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(Rational, ConstantAtom)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, ctx: &PrecisionContext) -> Result<Float> {
        let mut sum = ctx.zero();
        for (q, atom) in &self.terms {
            let v = atom.eval(ctx)?;
            sum += Float::with_val(ctx.prec(), &v * &ctx.from_rational(q));
        }
        Ok(sum)
    }
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        if let Some(s) = self.polynomial_display() {
            return write!(f, "{s}");
        }
        for (i, (q, atom)) in self.terms.iter().enumerate() {
            let neg = *q < 0;
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}", term_display(&q.clone().abs(), atom))?;
        }
        Ok(())
    }
}

impl ClosedForm {
    /// Common-denominator polynomial rendering, e.g. "(ρ - 2)/32", used
    /// when every atom is a nonnegative power of the same constant.
    fn polynomial_display(&self) -> Option<String> {
        if self.terms.len() < 2 {
            return None;
        }
        let mut den = Integer::from(1);
        for (q, atom) in &self.terms {
            match atom {
                ConstantAtom::One => {}
                ConstantAtom::Rho(k) if *k > 0 => {}
                _ => return None,
            }
            den = den.lcm(q.denom());
        }
        let mut parts: Vec<(i32, Integer)> = self
            .terms
            .iter()
            .map(|(q, atom)| {
                let k = match atom {
                    ConstantAtom::Rho(k) => *k,
                    _ => 0,
                };
                let scaled = Rational::from(q * Rational::from(den.clone()));
                debug_assert_eq!(*scaled.denom(), 1);
                (k, scaled.numer().clone())
            })
            .collect();
        parts.sort_by_key(|(k, _)| -*k);
        let mut body = String::new();
        for (i, (k, c)) in parts.iter().enumerate() {
            let neg = *c < 0;
            if i == 0 {
                if neg {
                    body.push('-');
                }
            } else {
                body.push_str(if neg { " - " } else { " + " });
            }
            let mag = c.clone().abs();
            let var = match k {
                0 => String::new(),
                1 => "ρ".to_string(),
                k => format!("ρ^{k}"),
            };
            if var.is_empty() {
                body.push_str(&mag.to_string());
            } else if mag == 1 {
                body.push_str(&var);
            } else {
                body.push_str(&format!("{mag}{var}"));
            }
        }
        Some(if den == 1 {
            body
        } else {
            format!("({body})/{den}")
        })
    }
}

fn term_display(q: &Rational, atom: &ConstantAtom) -> String {
    let num = q.numer();
    let den = q.denom();
    match atom.normalized() {
        ConstantAtom::One => {
            if *den == 1 {
                format!("{num}")
            } else {
                format!("{num}/{den}")
            }
        }
        ConstantAtom::Pi(k) | ConstantAtom::Rho(k) => {
            let glyph = if matches!(atom.normalized(), ConstantAtom::Pi(_)) {
                "π"
            } else {
                "ρ"
            };
            let up = |k: i32| {
                if k == 1 {
                    glyph.to_string()
                } else {
                    format!("{glyph}^{k}")
                }
            };
            if k > 0 {
                let head = if *num == 1 {
                    up(k)
                } else {
                    format!("{num}{}", up(k))
                };
                if *den == 1 {
                    head
                } else {
                    format!("{head}/{den}")
                }
            } else {
                let tail = if *den == 1 {
                    up(-k)
                } else {
                    format!("{den}{}", up(-k))
                };
                format!("{num}/({tail})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::matched_digits;

    #[test]
    fn eval_pi_combination() {
        let ctx = PrecisionContext::new(40).unwrap();
        // 1971/(128 pi^3) - 9/(16 pi) + 3 pi / 80
        let form = ClosedForm::new(vec![
            (Rational::from((1971, 128)), ConstantAtom::Pi(-3)),
            (Rational::from((-9, 16)), ConstantAtom::Pi(-1)),
            (Rational::from((3, 80)), ConstantAtom::Pi(1)),
        ]);
        let v = form.eval(&ctx).unwrap();
        let want = ctx
            .from_decimal("0.43538365077995525294060384502545762443837546")
            .unwrap();
        assert!(matched_digits(&v, &want, 45) >= 40);
        assert_eq!(form.to_string(), "1971/(128π^3) - 9/(16π) + 3π/80");
    }

    #[test]
    fn rho_polynomial_display_and_eval() {
        let ctx = PrecisionContext::new(40).unwrap();
        let c2 = ClosedForm::rho_polynomial(&[-2, 1], 32);
        assert_eq!(c2.to_string(), "(ρ - 2)/32");
        let v = c2.eval(&ctx).unwrap();
        let want = ctx.from_decimal("0.11822456134208701629").unwrap();
        assert_eq!(matched_digits(&v, &want, 40), 20);
    }

    #[test]
    fn trivial_forms() {
        assert_eq!(ClosedForm::integer(1).to_string(), "1");
        assert_eq!(
            ClosedForm::rational(Rational::from((3, 4))).to_string(),
            "3/4"
        );
        assert_eq!(ClosedForm::pi_term(Rational::from((1, 4)), 2).to_string(), "π^2/4");
        assert_eq!(ClosedForm::zero().to_string(), "0");
    }
}
