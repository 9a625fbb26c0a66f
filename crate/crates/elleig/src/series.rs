//! Power-series fitting of eigenvalue data: interpolating fits in even
//! powers of eccentricity or in the stretch factor, per-coefficient
//! trusted-digit estimation by dependent-variable perturbation, and
//! deflation of known leading terms so the next unknown becomes the
//! constant term of the reduced model.

use rug::Float;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::form::ClosedForm;
use crate::geometry::{Convention, EigenvalueRecord};
use crate::linalg::{solve_least_squares, solve_square_aug, Matrix};
use crate::mp::{format_decimal, pow_i64, PrecisionContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesVariable {
    /// Powers of eccentricity, even exponents only (about the circle).
    EvenEccentricity,
    /// Powers of the stretch factor, exponents from -2 up (about the
    /// infinite strip).
    Stretch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dependent {
    /// lambda / rho under the constant-area convention.
    LambdaOverRho,
    /// lambda' under the constant semi-major axis convention.
    LambdaPrime,
}

impl Dependent {
    pub fn convention(self) -> Convention {
        match self {
            Dependent::LambdaOverRho => Convention::ConstantArea,
            Dependent::LambdaPrime => Convention::ConstantSemiMajor,
        }
    }
}

/// A truncated power-series model: which variable, which dependent
/// quantity, the full exponent schedule, and the leading coefficients
/// already pinned to exact closed forms.
#[derive(Debug, Clone)]
pub struct SeriesModel {
    pub variable: SeriesVariable,
    pub dependent: Dependent,
    pub exponents: Vec<i64>,
    pub known_prefix: Vec<(i64, ClosedForm)>,
}

impl SeriesModel {
    /// Even-eccentricity model with `num_terms` exponents 0, 2, 4, ...
    /// and the trivial constant/zero leading terms pinned.
    pub fn maclaurin(num_terms: usize) -> Self {
        SeriesModel {
            variable: SeriesVariable::EvenEccentricity,
            dependent: Dependent::LambdaOverRho,
            exponents: (0..num_terms as i64).map(|k| 2 * k).collect(),
            known_prefix: vec![
                (0, ClosedForm::integer(1)),
                (2, ClosedForm::zero()),
            ],
        }
    }

    /// Stretch model with `num_terms` exponents -2, -1, 0, ... and no
    /// pinned coefficients.
    pub fn asymptotic(num_terms: usize) -> Self {
        SeriesModel {
            variable: SeriesVariable::Stretch,
            dependent: Dependent::LambdaPrime,
            exponents: (0..num_terms as i64).map(|k| k - 2).collect(),
            known_prefix: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("exponents must be strictly increasing".into()));
        }
        match self.variable {
            SeriesVariable::EvenEccentricity => {
                if self.exponents.iter().any(|e| *e < 0 || e % 2 != 0) {
                    return Err(Error::Domain(
                        "even-eccentricity exponents must be even and nonnegative".into(),
                    ));
                }
            }
            SeriesVariable::Stretch => {
                if self.exponents.iter().any(|e| *e < -2) {
                    return Err(Error::Domain("stretch exponents start at -2".into()));
                }
            }
        }
        for (i, (e, _)) in self.known_prefix.iter().enumerate() {
            if self.exponents.get(i) != Some(e) {
                return Err(Error::Domain(
                    "known prefix must match the leading exponents".into(),
                ));
            }
        }
        Ok(())
    }

    /// Exponents whose coefficients are still unknown.
    pub fn unknown_exponents(&self) -> &[i64] {
        &self.exponents[self.known_prefix.len()..]
    }

    /// The model with one more leading coefficient pinned.
    pub fn with_known(&self, exponent: i64, form: ClosedForm) -> Result<Self> {
        if self.unknown_exponents().first() != Some(&exponent) {
            return Err(Error::Domain(format!(
                "exponent {exponent} is not the leading unknown"
            )));
        }
        let mut next = self.clone();
        next.known_prefix.push((exponent, form));
        Ok(next)
    }
}

/// One fitted data point: abscissa in the model variable and the
/// dependent value.
#[derive(Debug, Clone)]
pub struct DataPoint {
    pub x: Float,
    pub y: Float,
}

/// A finished fit: numeric coefficients for the unknown exponents and
/// the digits each one survived perturbation with.
#[derive(Debug, Clone)]
pub struct SeriesFit {
    pub model: SeriesModel,
    pub coefficients: Vec<Float>,
    pub trusted_digits: Vec<u32>,
    pub data_fingerprint: String,
}

/// Converts records to (x, y) pairs in the model's variable, checking
/// conventions and abscissa distinctness.
pub fn points_from_records(
    records: &[EigenvalueRecord],
    model: &SeriesModel,
    ctx: &PrecisionContext,
) -> Result<Vec<DataPoint>> {
    let want = model.dependent.convention();
    for r in records {
        if r.shape.convention() != want {
            return Err(Error::ConventionMismatch(format!(
                "model wants {} records, found {}",
                want.tag(),
                r.shape.convention().tag()
            )));
        }
    }
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            if a.shape.eccentricity() == b.shape.eccentricity() {
                return Err(Error::SingularSystem(format!(
                    "duplicate abscissa e = {}",
                    a.shape.eccentricity()
                )));
            }
        }
    }
    let prec = ctx.prec();
    records
        .iter()
        .map(|r| {
            let x = match model.variable {
                SeriesVariable::EvenEccentricity => r.shape.ecc_float(ctx),
                SeriesVariable::Stretch => r.shape.stretch(ctx),
            };
            let y = match model.dependent {
                Dependent::LambdaOverRho => {
                    Float::with_val(prec, &r.eigenvalue / &ctx.rho()?)
                }
                Dependent::LambdaPrime => Float::with_val(prec, &r.eigenvalue),
            };
            Ok(DataPoint { x, y })
        })
        .collect()
}

/// Solves for coefficients of `sum_j c_j x^(e_j)` through the given
/// points: square interpolation when counts match, least squares when
/// over-determined. Abscissae are rescaled to O(1) before powers are
/// formed and the coefficients unscaled afterward.
pub fn fit_points(
    points: &[DataPoint],
    exponents: &[i64],
    ctx: &PrecisionContext,
) -> Result<Vec<Float>> {
    let n_unknown = exponents.len();
    if points.len() < n_unknown {
        return Err(Error::InsufficientData {
            needed: n_unknown,
            got: points.len(),
        });
    }
    let prec = ctx.prec();
    let mut scale = Float::new(prec);
    for p in points {
        let m = Float::with_val(prec, p.x.abs_ref());
        if m > scale {
            scale = m;
        }
    }
    if scale.is_zero() {
        return Err(Error::SingularSystem("all abscissae are zero".into()));
    }
    let mut rows = Vec::with_capacity(points.len());
    let mut rhs = Vec::with_capacity(points.len());
    for p in points {
        let xhat = Float::with_val(prec, &p.x / &scale);
        let row: Vec<Float> = exponents.iter().map(|e| pow_i64(&xhat, *e)).collect();
        rows.push(row);
        rhs.push(p.y.clone());
    }
    let a = Matrix::from_rows(rows);
    let scaled = if points.len() == n_unknown {
        solve_square_aug(a, rhs)?
    } else {
        solve_least_squares(a, rhs)?
    };
    Ok(scaled
        .into_iter()
        .zip(exponents)
        .map(|(c, e)| {
            let s_pow = pow_i64(&scale, *e);
            Float::with_val(prec, &c / &s_pow)
        })
        .collect())
}

/// Subtracts the known-prefix contribution from each dependent value.
fn subtract_known(
    points: &[DataPoint],
    model: &SeriesModel,
    ctx: &PrecisionContext,
) -> Result<Vec<DataPoint>> {
    let prec = ctx.prec();
    points
        .iter()
        .map(|p| {
            let mut y = p.y.clone();
            for (e, form) in &model.known_prefix {
                if form.is_zero() {
                    continue;
                }
                let c = form.eval(ctx)?;
                let term = Float::with_val(prec, &c * &pow_i64(&p.x, *e));
                y -= &term;
            }
            Ok(DataPoint { x: p.x.clone(), y })
        })
        .collect()
}

/// Fits the model's unknown coefficients through the records.
pub fn fit_interpolating(
    records: &[EigenvalueRecord],
    model: &SeriesModel,
    ctx: &PrecisionContext,
) -> Result<SeriesFit> {
    model.validate()?;
    let points = points_from_records(records, model, ctx)?;
    let reduced = subtract_known(&points, model, ctx)?;
    let coefficients = fit_points(&reduced, model.unknown_exponents(), ctx)?;
    Ok(SeriesFit {
        model: model.clone(),
        coefficients,
        trusted_digits: Vec::new(),
        data_fingerprint: fingerprint(records),
    })
}

/// Refits with every dependent value nudged by (1 +/- rel_perturbation)
/// and reports how many digits of each coefficient survive, clamped by
/// the worst claimed digits in the input.
pub fn estimate_trusted_digits(
    records: &[EigenvalueRecord],
    model: &SeriesModel,
    ctx: &PrecisionContext,
    rel_perturbation: &Float,
) -> Result<Vec<u32>> {
    model.validate()?;
    let prec = ctx.prec();
    let points = points_from_records(records, model, ctx)?;
    let reduced = subtract_known(&points, model, ctx)?;
    // perturbation applies to the raw dependent values, so shift the
    // reduced ones by the same absolute amount
    let perturbed = |sign: i32| -> Vec<DataPoint> {
        points
            .iter()
            .zip(&reduced)
            .map(|(orig, red)| {
                let delta = Float::with_val(prec, &orig.y * rel_perturbation);
                let y = if sign > 0 {
                    Float::with_val(prec, &red.y + &delta)
                } else {
                    Float::with_val(prec, &red.y - &delta)
                };
                DataPoint {
                    x: red.x.clone(),
                    y,
                }
            })
            .collect()
    };
    let center = fit_points(&reduced, model.unknown_exponents(), ctx)?;
    let plus = fit_points(&perturbed(1), model.unknown_exponents(), ctx)?;
    let minus = fit_points(&perturbed(-1), model.unknown_exponents(), ctx)?;
    let worst_claim = records
        .iter()
        .map(|r| r.digits_claimed)
        .min()
        .unwrap_or(0)
        .saturating_sub(2);
    Ok(center
        .iter()
        .zip(plus.iter().zip(minus.iter()))
        .map(|(c, (p, m))| {
            if p.is_sign_negative() != m.is_sign_negative() {
                return 0;
            }
            let spread = Float::with_val(prec, p - m).abs();
            if spread.is_zero() {
                return worst_claim;
            }
            if c.is_zero() {
                return 0;
            }
            let rel = Float::with_val(prec, &spread / &Float::with_val(prec, c.abs_ref()));
            let digits = -rel.to_f64().log10();
            if digits <= 0.0 {
                0
            } else {
                (digits.floor() as u32).min(worst_claim)
            }
        })
        .collect())
}

/// Removes the known prefix and divides by the next unknown power, so
/// the leading unknown coefficient becomes the constant term.
pub fn deflate_known(
    records: &[EigenvalueRecord],
    model: &SeriesModel,
    ctx: &PrecisionContext,
) -> Result<Vec<DataPoint>> {
    model.validate()?;
    if model.known_prefix.is_empty() {
        return Err(Error::Domain("deflation needs a nonempty known prefix".into()));
    }
    let next = *model
        .unknown_exponents()
        .first()
        .ok_or_else(|| Error::Domain("no unknown exponent left to expose".into()))?;
    let points = points_from_records(records, model, ctx)?;
    let reduced = subtract_known(&points, model, ctx)?;
    let prec = ctx.prec();
    reduced
        .into_iter()
        .map(|p| {
            let denom = pow_i64(&p.x, next);
            if denom.is_zero() || !denom.is_finite() {
                return Err(Error::DivisionUnderflow(format!(
                    "x^{next} degenerates at x = {}",
                    format_decimal(&p.x, 6)
                )));
            }
            Ok(DataPoint {
                x: p.x.clone(),
                y: Float::with_val(prec, &p.y / &denom),
            })
        })
        .collect()
}

/// Partial sum of the model at `x`: known prefix plus the supplied
/// numeric coefficients for the remaining exponents.
pub fn evaluate_series(
    model: &SeriesModel,
    coefficients: &[Float],
    x: &Float,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let prec = ctx.prec();
    let mut sum = ctx.zero();
    for (e, form) in &model.known_prefix {
        if form.is_zero() {
            continue;
        }
        let c = form.eval(ctx)?;
        sum += Float::with_val(prec, &c * &pow_i64(x, *e));
    }
    for (c, e) in coefficients.iter().zip(model.unknown_exponents()) {
        sum += Float::with_val(prec, c * &pow_i64(x, *e));
    }
    Ok(sum)
}

/// Content hash of the records a fit consumed.
pub fn fingerprint(records: &[EigenvalueRecord]) -> String {
    let mut h = Sha256::new();
    for r in records {
        h.update(r.shape.eccentricity().to_string().as_bytes());
        h.update(r.shape.convention().tag().as_bytes());
        h.update(r.digits_claimed.to_le_bytes());
        h.update(format_decimal(&r.eigenvalue, r.digits_claimed as usize).as_bytes());
        h.update(b"\n");
    }
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{EllipseShape, PointDistribution, SolverMeta};
    use crate::mp::matched_digits;
    use rug::Rational;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(50).unwrap()
    }

    fn meta() -> SolverMeta {
        SolverMeta {
            basis_size: 4,
            collocation_count: 4,
            distribution: PointDistribution::ChebyshevParameter,
        }
    }

    /// Records whose lambda/rho values follow y = 1 + 3 e^2 + 5 e^4
    /// exactly (synthetic data for the fit machinery).
    fn poly_records(ctx: &PrecisionContext, eccs: &[&str]) -> Vec<EigenvalueRecord> {
        let rho = ctx.rho().unwrap();
        eccs.iter()
            .map(|e| {
                let shape = EllipseShape::from_decimal(e, Convention::ConstantArea).unwrap();
                let x = shape.ecc_float(ctx);
                let x2 = Float::with_val(ctx.prec(), x.square_ref());
                let x4 = Float::with_val(ctx.prec(), x2.square_ref());
                let mut y = ctx.from_u32(1);
                y += Float::with_val(ctx.prec(), &x2 * 3u32);
                y += Float::with_val(ctx.prec(), &x4 * 5u32);
                EigenvalueRecord {
                    shape,
                    eigenvalue: Float::with_val(ctx.prec(), &y * &rho),
                    digits_claimed: 45,
                    meta: meta(),
                }
            })
            .collect()
    }

    fn bare_model(exponents: Vec<i64>) -> SeriesModel {
        SeriesModel {
            variable: SeriesVariable::EvenEccentricity,
            dependent: Dependent::LambdaOverRho,
            exponents,
            known_prefix: Vec::new(),
        }
    }

    #[test]
    fn exact_polynomial_recovery() {
        let ctx = ctx();
        let records = poly_records(&ctx, &["0.1", "0.2", "0.3"]);
        let fit = fit_interpolating(&records, &bare_model(vec![0, 2, 4]), &ctx).unwrap();
        let want = [1u32, 3, 5];
        for (c, w) in fit.coefficients.iter().zip(want) {
            assert!(matched_digits(c, &ctx.from_u32(w), 55) >= 44);
        }
    }

    #[test]
    fn fit_reproduces_inputs_at_abscissae() {
        let ctx = ctx();
        let records = poly_records(&ctx, &["0.05", "0.15", "0.25"]);
        let model = bare_model(vec![0, 2, 4]);
        let fit = fit_interpolating(&records, &model, &ctx).unwrap();
        let points = points_from_records(&records, &model, &ctx).unwrap();
        for p in &points {
            let v = evaluate_series(&model, &fit.coefficients, &p.x, &ctx).unwrap();
            let diff = Float::with_val(ctx.prec(), &v - &p.y).abs();
            assert!(diff < ctx.pow10(-(ctx.digits() as i64 - 8)));
        }
    }

    #[test]
    fn permutation_insensitive() {
        let ctx = ctx();
        let mut records = poly_records(&ctx, &["0.1", "0.2", "0.3", "0.12", "0.27"]);
        let model = bare_model(vec![0, 2, 4, 6, 8]);
        let fit_a = fit_interpolating(&records, &model, &ctx).unwrap();
        records.reverse();
        records.swap(1, 3);
        let fit_b = fit_interpolating(&records, &model, &ctx).unwrap();
        for (a, b) in fit_a.coefficients.iter().zip(&fit_b.coefficients) {
            // the quadratic tail coefficients are zero, so compare on the
            // absolute scale of the coefficient vector
            let diff = Float::with_val(ctx.prec(), a - b).abs();
            let scale = Float::with_val(ctx.prec(), a.clone().abs().max(&ctx.from_u32(1)));
            let bound = Float::with_val(ctx.prec(), &scale * &ctx.pow10(-(ctx.digits() as i64 - 10)));
            assert!(diff < bound);
        }
    }

    #[test]
    fn known_prefix_subtraction_and_deflation() {
        let ctx = ctx();
        let records = poly_records(&ctx, &["0.1", "0.2"]);
        // pin the exact 1 and 3 coefficients, fit only the quartic one
        let model = SeriesModel {
            variable: SeriesVariable::EvenEccentricity,
            dependent: Dependent::LambdaOverRho,
            exponents: vec![0, 2, 4],
            known_prefix: vec![
                (0, ClosedForm::integer(1)),
                (2, ClosedForm::integer(3)),
            ],
        };
        let fit = fit_interpolating(&records[..1], &model, &ctx).unwrap();
        assert!(matched_digits(&fit.coefficients[0], &ctx.from_u32(5), 55) >= 44);
        // deflation exposes the 5 as the constant term
        let deflated = deflate_known(&records, &model, &ctx).unwrap();
        for p in &deflated {
            assert!(matched_digits(&p.y, &ctx.from_u32(5), 55) >= 40);
        }
        // deflate-then-fit agrees with the direct fit
        let refit = fit_points(&deflated, &[0, 2], &ctx).unwrap();
        assert!(matched_digits(&refit[0], &fit.coefficients[0], 55) >= 40);
    }

    #[test]
    fn deflation_rejects_zero_abscissa() {
        let ctx = ctx();
        let records = poly_records(&ctx, &["0", "0.2"]);
        let model = SeriesModel {
            variable: SeriesVariable::EvenEccentricity,
            dependent: Dependent::LambdaOverRho,
            exponents: vec![0, 2, 4],
            known_prefix: vec![(0, ClosedForm::integer(1))],
        };
        assert!(matches!(
            deflate_known(&records, &model, &ctx),
            Err(Error::DivisionUnderflow(_))
        ));
    }

    #[test]
    fn trusted_digits_follow_perturbation() {
        let ctx = ctx();
        let records = poly_records(&ctx, &["0.1", "0.2", "0.3"]);
        let model = bare_model(vec![0, 2, 4]);
        let p = ctx.pow10(-40);
        let d = estimate_trusted_digits(&records, &model, &ctx, &p).unwrap();
        // perturbation dominates: every coefficient reports roughly 40
        // digits minus conditioning, clamped by the records' claim - 2
        for (i, digits) in d.iter().enumerate() {
            assert!(*digits >= 30, "coefficient {i}: {digits}");
            assert!(*digits <= 43, "coefficient {i}: {digits}");
        }
    }

    #[test]
    fn convention_mismatch_detected() {
        let ctx = ctx();
        let records = poly_records(&ctx, &["0.1"]);
        let model = SeriesModel {
            variable: SeriesVariable::Stretch,
            dependent: Dependent::LambdaPrime,
            exponents: vec![-2, -1],
            known_prefix: Vec::new(),
        };
        assert!(matches!(
            fit_interpolating(&records, &model, &ctx),
            Err(Error::ConventionMismatch(_))
        ));
    }

    #[test]
    fn duplicate_abscissae_detected() {
        let ctx = ctx();
        let records = poly_records(&ctx, &["0.1", "0.1"]);
        assert!(matches!(
            fit_interpolating(&records, &bare_model(vec![0, 2]), &ctx),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn insufficient_data_detected() {
        let ctx = ctx();
        let records = poly_records(&ctx, &["0.1"]);
        assert!(matches!(
            fit_interpolating(&records, &bare_model(vec![0, 2]), &ctx),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn model_validation() {
        assert!(bare_model(vec![0, 2, 2]).validate().is_err());
        assert!(bare_model(vec![0, 3]).validate().is_err());
        let mut m = SeriesModel::asymptotic(4);
        assert!(m.validate().is_ok());
        m.exponents[0] = -3;
        assert!(m.validate().is_err());
        // known prefix must be a prefix
        let m = SeriesModel {
            variable: SeriesVariable::EvenEccentricity,
            dependent: Dependent::LambdaOverRho,
            exponents: vec![0, 2, 4],
            known_prefix: vec![(2, ClosedForm::zero())],
        };
        assert!(m.validate().is_err());
    }

    #[test]
    fn with_known_extends_prefix() {
        let model = SeriesModel::asymptotic(4);
        let next = model
            .with_known(-2, ClosedForm::pi_term(Rational::from((1, 4)), 2))
            .unwrap();
        assert_eq!(next.known_prefix.len(), 1);
        assert_eq!(next.unknown_exponents(), &[-1, 0, 1]);
        assert!(next.with_known(0, ClosedForm::zero()).is_err());
    }

    #[test]
    fn fingerprint_stable_and_sensitive() {
        let ctx = ctx();
        let a = poly_records(&ctx, &["0.1", "0.2"]);
        let b = poly_records(&ctx, &["0.1", "0.2"]);
        assert_eq!(fingerprint(&a), fingerprint(&b));
        let c = poly_records(&ctx, &["0.1", "0.21"]);
        assert_ne!(fingerprint(&a), fingerprint(&c));
    }
}
