//! Integer-relation recovery: given a numeric coefficient trusted to D
//! digits and an ansatz basis of symbolic constants, search for small
//! integers a_1..a_m with a_1*target + sum a_i*v_i = 0 using exact LLL
//! on the standard scaled lattice, then verify the reconstruction
//! digit-by-digit against the target.
//!
//! Ambiguity handling follows the working rule that only unambiguous,
//! unique solutions count: a second reduced vector passing the residual
//!! test, or a different winner at a coarser scaling, demotes the result.

pub mod lll;

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::form::{ClosedForm, ConstantAtom};
use crate::mp::{matched_digits, PrecisionContext};

/// Ansatz basis: the target is implicitly the first element; these
/// atoms fill the remaining slots.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstantBasis {
    pub atoms: Vec<ConstantAtom>,
}

impl ConstantBasis {
    pub fn new(atoms: Vec<ConstantAtom>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for a in &atoms {
            if !seen.insert(*a) {
                return Err(Error::Domain(format!("duplicate basis atom {a}")));
            }
        }
        Ok(ConstantBasis { atoms })
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationStatus {
    Unambiguous,
    Ambiguous,
    NotFound,
}

/// An integer vector over (target, atoms...) with the digit evidence
/// backing it. Normalized: gcd one, leading coefficient positive.
#[derive(Debug, Clone)]
pub struct IntegerRelation {
    pub coefficients: Vec<Integer>,
    pub basis: ConstantBasis,
    pub target_digits_matched: u32,
    pub status: RelationStatus,
}

impl IntegerRelation {
    /// Solves the relation for the target as an exact closed form:
    /// target = -(sum_{i>=2} a_i v_i) / a_1.
    pub fn closed_form(&self) -> Result<ClosedForm> {
        if self.coefficients.is_empty() || self.coefficients[0] == 0 {
            return Err(Error::DegenerateRelation);
        }
        let a1 = Rational::from(self.coefficients[0].clone());
        let terms = self
            .coefficients
            .iter()
            .skip(1)
            .zip(&self.basis.atoms)
            .map(|(a, atom)| {
                let q = -Rational::from((a.clone(), Integer::from(1))) / a1.clone();
                (q, *atom)
            })
            .collect();
        Ok(ClosedForm::new(terms))
    }
}

/// Tunables of the search; defaults follow the worked calibration that
/// makes a 36-digit coefficient resolve exactly.
#[derive(Debug, Clone)]
pub struct RelationOptions {
    pub delta: Rational,
    /// guard digits g peeled off the scaling exponent 10^(D-g)
    pub guard: u32,
    /// residual must fall below 10^-(D-g-margin)
    pub margin: u32,
    /// matched digits needed before a relation counts as unambiguous
    pub accept_threshold: u32,
    /// largest coefficient magnitude considered a "small" integer
    pub max_coeff: Integer,
}

impl Default for RelationOptions {
    fn default() -> Self {
        RelationOptions {
            delta: Rational::from((3, 4)),
            guard: 5,
            margin: 3,
            accept_threshold: 25,
            max_coeff: Integer::from(1_000_000),
        }
    }
}

/// Searches for an integer relation among (target, basis atoms).
pub fn find_relation(
    target: &Float,
    trusted_digits: u32,
    basis: &ConstantBasis,
    ctx: &PrecisionContext,
    opts: &RelationOptions,
) -> Result<IntegerRelation> {
    if trusted_digits < 10 {
        return Err(Error::PrecisionTooLow {
            digits: trusted_digits,
            needed: 10,
        });
    }
    if basis.is_empty() {
        return Err(Error::Domain("empty constant basis".into()));
    }
    let d = trusted_digits;
    // evaluate the basis well past D so residual checks at 2D digits hold
    let hi_ctx = PrecisionContext::new((2 * d + 20).max(ctx.digits()))?;
    let mut values = Vec::with_capacity(basis.len() + 1);
    values.push(Float::with_val(hi_ctx.prec(), target));
    for atom in &basis.atoms {
        values.push(atom.eval(&hi_ctx)?);
    }

    let primary = best_candidate(&values, d, opts.guard, opts, &hi_ctx)?;
    let (vector, second_passes) = match primary {
        Some(v) => v,
        None => {
            return Ok(IntegerRelation {
                coefficients: Vec::new(),
                basis: basis.clone(),
                target_digits_matched: 0,
                status: RelationStatus::NotFound,
            })
        }
    };

    // scale-robustness: a coarser lattice must elect the same relation
    let coarser = best_candidate(&values, d, opts.guard + 5, opts, &hi_ctx)?;
    let scale_stable = matches!(&coarser, Some((v, _)) if *v == vector);

    let mut relation = IntegerRelation {
        coefficients: vector,
        basis: basis.clone(),
        target_digits_matched: 0,
        status: RelationStatus::Ambiguous,
    };
    relation.target_digits_matched = reconstruct_and_verify(&relation, target, &hi_ctx)?;
    if !second_passes
        && scale_stable
        && relation.target_digits_matched >= opts.accept_threshold
    {
        relation.status = RelationStatus::Unambiguous;
    }
    Ok(relation)
}

/// Builds the scaled lattice, reduces it, and returns the shortest
/// normalized row passing the residual and coefficient-size tests,
/// plus whether a second distinct row also passed.
fn best_candidate(
    values: &[Float],
    d: u32,
    guard: u32,
    opts: &RelationOptions,
    hi_ctx: &PrecisionContext,
) -> Result<Option<(Vec<Integer>, bool)>> {
    let m = values.len();
    if d <= guard + opts.margin + 2 {
        return Ok(None);
    }
    let scale_exp = (d - guard) as i64;
    let scale = hi_ctx.pow10(scale_exp);
    let mut rows = Vec::with_capacity(m);
    for (i, v) in values.iter().enumerate() {
        let mut row = vec![Integer::new(); m + 1];
        row[i] = Integer::from(1);
        let scaled = Float::with_val(hi_ctx.prec(), v * &scale);
        row[m] = scaled
            .to_integer()
            .ok_or_else(|| Error::Domain("non-finite basis value".into()))?;
        rows.push(row);
    }
    let reduced = lll::lll_reduce(&rows, &opts.delta)?;

    // exact residual bound 10^-(D - guard - margin)
    let bound = hi_ctx.pow10(-((d - guard - opts.margin) as i64));
    let mut passing: Vec<(Integer, Vec<Integer>)> = Vec::new();
    for row in &reduced {
        let coeffs = &row[..m];
        if coeffs.iter().all(|c| *c == 0) {
            continue;
        }
        if coeffs[0] == 0 {
            continue;
        }
        if coeffs.iter().any(|c| c.clone().abs() > opts.max_coeff) {
            continue;
        }
        let mut residual = Float::new(hi_ctx.prec());
        for (c, v) in coeffs.iter().zip(values) {
            residual += Float::with_val(hi_ctx.prec(), v * Float::with_val(hi_ctx.prec(), c));
        }
        if residual.abs() >= bound {
            continue;
        }
        let mut norm = Integer::new();
        for c in coeffs {
            norm += Integer::from(c.square_ref());
        }
        passing.push((norm, normalize(coeffs)));
    }
    passing.sort_by(|a, b| a.0.cmp(&b.0));
    passing.dedup_by(|a, b| a.1 == b.1);
    match passing.len() {
        0 => Ok(None),
        1 => Ok(Some((passing.remove(0).1, false))),
        _ => Ok(Some((passing.remove(0).1, true))),
    }
}

/// gcd-one, positive leading coefficient.
fn normalize(coeffs: &[Integer]) -> Vec<Integer> {
    let mut g = Integer::new();
    for c in coeffs {
        g = g.gcd(c);
    }
    if g == 0 {
        return coeffs.to_vec();
    }
    let flip = coeffs[0] < 0;
    coeffs
        .iter()
        .map(|c| {
            let v = Integer::from(c / &g);
            if flip {
                -v
            } else {
                v
            }
        })
        .collect()
}

/// Evaluates the closed form the relation implies for the target and
/// counts the leading significant digits on which it agrees with the
/// supplied value.
pub fn reconstruct_and_verify(
    relation: &IntegerRelation,
    target: &Float,
    ctx: &PrecisionContext,
) -> Result<u32> {
    let form = relation.closed_form()?;
    let recon = form.eval(ctx)?;
    let t = Float::with_val(ctx.prec(), target);
    Ok(matched_digits(&t, &recon, ctx.digits()))
}
