//! Fundamental-eigenvalue solver: boundary point matching with a
//! symmetry-reduced Fourier-Bessel basis.
//!
//! The fundamental mode is even in both axes, so trial functions
//! J_{2k}(sqrt(lambda) r) cos(2k theta) collocated on the first-quadrant
//! quarter boundary capture it with a quarter of the matrix size. The
//! eigenvalue is the root of the collocation determinant, located by
//! bracketed bisection-plus-secant, and certified by a ladder of
//! increasing basis sizes: solve at M, M+4, ..., claim the digits on
//! which the last two solves agree minus two, and stop once the claim
//! covers the target.
//!
//! Working precision is the real constraint at large basis sizes: the
//! determinant of the equilibrated matrix loses digits roughly in
//! proportion to M, so the solver carries a guard allowance that grows
//! with M and escalates it once more if a rung loses the determinant
//! sign change.

use rug::Float;

use crate::error::{Error, Result};
use crate::expansions;
use crate::geometry::{Convention, EigenvalueRecord, EllipseShape, PointDistribution, SolverMeta};
use crate::linalg::{determinant, null_direction, Matrix};
use crate::mp::{bessel, matched_digits, roots, PrecisionContext};

/// Eccentricity ceiling; beyond this the centered basis is hopelessly
/// ill-conditioned and callers should use the stretch expansion instead.
pub const MAX_ECCENTRICITY: f64 = 0.9999995;

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Starting basis size of the certification ladder; 0 picks a start
    /// automatically from the seed eigenvalue.
    pub basis_size: u32,
    /// Matching points per solve; must equal the basis size (square
    /// collocation is what the determinant localization needs).
    pub collocation_count: u32,
    pub target_digits: u32,
    pub distribution: PointDistribution,
    /// Relative half-width of the initial eigenvalue bracket around the
    /// series seed; `None` scales it from the series truncation error.
    pub bracket_pad: Option<f64>,
}

impl SolverConfig {
    pub fn new(target_digits: u32) -> Self {
        SolverConfig {
            basis_size: 0,
            collocation_count: 0,
            target_digits,
            distribution: PointDistribution::ChebyshevParameter,
            bracket_pad: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.collocation_count != self.basis_size {
            return Err(Error::Domain(
                "square collocation required: collocation_count must equal basis_size".into(),
            ));
        }
        if self.basis_size != 0 && self.basis_size < 2 {
            return Err(Error::Domain("basis_size must be at least 2".into()));
        }
        if self.target_digits < 10 {
            return Err(Error::Domain("target_digits must be at least 10".into()));
        }
        Ok(())
    }
}

/// Collocation parameters on the open quarter-arc parameter interval
/// (0, pi/2), strictly interior under both spacings.
pub fn boundary_params(
    n: usize,
    distribution: PointDistribution,
    ctx: &PrecisionContext,
) -> Vec<Float> {
    let prec = ctx.prec();
    let half_pi = Float::with_val(prec, ctx.pi() / 2u32);
    (1..=n)
        .map(|i| match distribution {
            PointDistribution::UniformParameter => {
                let frac = Float::with_val(prec, 2 * i as u32 - 1) / (2 * n as u32);
                Float::with_val(prec, &half_pi * &frac)
            }
            PointDistribution::ChebyshevParameter => {
                // (pi/2) * (1 - cos((2i-1) pi / (2n))) / 2
                let angle = Float::with_val(
                    prec,
                    &ctx.pi() * &Float::with_val(prec, 2 * i as u32 - 1),
                ) / (2 * n as u32);
                let c = Float::with_val(prec, angle).cos();
                let w = Float::with_val(prec, 1 - c) / 2u32;
                Float::with_val(prec, &half_pi * &w)
            }
        })
        .collect()
}

/// Points (r, theta) on the first-quadrant quarter boundary at the
/// given parameter spacing; each satisfies the boundary equation to
/// working precision.
pub fn boundary_points(
    shape: &EllipseShape,
    n: usize,
    distribution: PointDistribution,
    ctx: &PrecisionContext,
) -> Vec<(Float, Float)> {
    let params = boundary_params(n, distribution, ctx);
    points_at_params(shape, &params, ctx)
}

fn points_at_params(
    shape: &EllipseShape,
    params: &[Float],
    ctx: &PrecisionContext,
) -> Vec<(Float, Float)> {
    let prec = ctx.prec();
    let (a, b) = shape.semi_axes(ctx);
    params
        .iter()
        .map(|t| {
            let x = Float::with_val(prec, &a * &Float::with_val(prec, t.cos_ref()));
            let y = Float::with_val(prec, &b * &Float::with_val(prec, t.sin_ref()));
            let r = Float::with_val(
                prec,
                Float::with_val(prec, x.square_ref()) + Float::with_val(prec, y.square_ref()),
            )
            .sqrt();
            let theta = y.atan2(&x);
            (r, theta)
        })
        .collect()
}

/// Collocation matrix entry (i, k) = J_{2k}(sqrt(lambda) r_i) cos(2k theta_i).
pub fn collocation_matrix(
    lambda_trial: &Float,
    points: &[(Float, Float)],
    m: usize,
    ctx: &PrecisionContext,
) -> Result<Matrix> {
    if lambda_trial.is_sign_negative() || lambda_trial.is_zero() {
        return Err(Error::Domain("lambda_trial must be positive".into()));
    }
    let prec = ctx.prec();
    let s = Float::with_val(prec, lambda_trial.sqrt_ref());
    let max_order = 2 * (m - 1) as u32;
    let mut out = Matrix::zero(points.len(), m, prec);
    for (i, (r, theta)) in points.iter().enumerate() {
        let x = Float::with_val(prec, &s * r);
        let j = bessel::bessel_j_upto(max_order, &x, ctx)?;
        // cos(2k theta) by the Chebyshev recurrence, refreshed directly
        // every 64 orders to stop drift
        let two_theta = Float::with_val(prec, theta * 2u32);
        let c1 = Float::with_val(prec, two_theta.cos_ref());
        let double_c1 = Float::with_val(prec, &c1 * 2u32);
        let mut c_prev = Float::with_val(prec, 1);
        let mut c_cur = c1.clone();
        for k in 0..m {
            let ck = if k == 0 {
                Float::with_val(prec, 1)
            } else if k == 1 {
                c_cur.clone()
            } else {
                let mut next = Float::with_val(prec, &double_c1 * &c_cur);
                next -= &c_prev;
                c_prev = std::mem::replace(&mut c_cur, next.clone());
                if k % 64 == 0 {
                    let fresh = Float::with_val(prec, &two_theta * Float::with_val(prec, k as u32))
                        .cos();
                    c_cur = fresh.clone();
                    next = fresh;
                }
                next
            };
            out.set(i, k, Float::with_val(prec, &j[2 * k] * &ck));
        }
    }
    Ok(out)
}

/// Scaled collocation determinant as a function of lambda; the sign
/// structure in lambda is what the root finder consumes.
fn det_at(
    lambda: &Float,
    points: &[(Float, Float)],
    m: usize,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let mut a = collocation_matrix(lambda, points, m, ctx)?;
    a.equilibrate();
    Ok(determinant(a))
}

/// Series seed for the eigenvalue under the shape's own convention,
/// with a conservative relative truncation bound.
fn seed_eigenvalue(shape: &EllipseShape, ctx: &PrecisionContext) -> Result<(Float, f64)> {
    let prec = ctx.prec();
    let e_f = shape.ecc_float(ctx).to_f64();
    let eps = shape.stretch(ctx);
    if e_f <= 0.5 {
        let over_rho = expansions::maclaurin_lambda_over_rho(&shape.ecc_float(ctx), ctx)?;
        let lam = Float::with_val(prec, &over_rho * &ctx.rho()?);
        let value = match shape.convention() {
            Convention::ConstantArea => lam,
            Convention::ConstantSemiMajor => Float::with_val(prec, &lam / &eps),
        };
        Ok((value, expansions::maclaurin_truncation_rel(e_f)))
    } else {
        let lam_prime = expansions::asymptotic_lambda_prime(&eps, ctx)?;
        let value = match shape.convention() {
            Convention::ConstantSemiMajor => lam_prime,
            Convention::ConstantArea => Float::with_val(prec, &lam_prime * &eps),
        };
        let eps_f = eps.to_f64();
        let bound = expansions::asymptotic_truncation_rel(eps_f) / (1.0 - 0.8 * eps_f).max(0.05);
        Ok((value, bound))
    }
}

/// Ladder start: half the largest Bessel argument plus a digit-dependent
/// allowance (the expansion needs orders past the oscillatory band).
fn auto_start_basis(x_max: f64, target_digits: u32) -> u32 {
    let base = (x_max / 2.0).ceil() as u32;
    base + 4 + target_digits / 4
}

/// Guard digits carried while solving at basis size m.
fn working_guard(m: u32, escalation: u32) -> u32 {
    let g = 20 + (2 * m) / 5;
    g * (1 << escalation)
}

/// Computes the fundamental eigenvalue of the shape to the requested
/// digits with an automatically certified convergence ladder.
pub fn solve_fundamental(
    shape: &EllipseShape,
    config: &SolverConfig,
    ctx: &PrecisionContext,
) -> Result<EigenvalueRecord> {
    config.validate()?;
    let e_f = ctx.from_rational(shape.eccentricity()).to_f64();
    if e_f > MAX_ECCENTRICITY {
        return Err(Error::DegenerateShape(format!(
            "eccentricity {e_f} beyond solver ceiling {MAX_ECCENTRICITY}; \
             use the stretch expansion instead"
        )));
    }
    let target = config.target_digits;

    // seed and bracket, computed once at a generous fixed precision
    let seed_ctx = PrecisionContext::new(target + 30)?;
    let (seed, trunc_rel) = seed_eigenvalue(shape, &seed_ctx)?;
    let pad = config
        .bracket_pad
        .unwrap_or_else(|| (50.0 * trunc_rel).clamp(1e-14, 0.15));
    let (a, _) = shape.semi_axes(&seed_ctx);
    let x_max = Float::with_val(seed_ctx.prec(), seed.sqrt_ref()).to_f64() * a.to_f64();

    let m0 = if config.basis_size > 0 {
        config.basis_size
    } else {
        auto_start_basis(x_max, target)
    };

    let mut escalation = 0u32;
    let mut m = m0;
    let mut prev: Option<Float> = None;
    let mut prev_gap_rel: Option<Float> = None;
    let mut bracket: Option<(Float, Float)> = None;
    let max_rungs = 40;
    for _ in 0..max_rungs {
        let guard = working_guard(m, escalation);
        let work_ctx = PrecisionContext::with_guard(target + 8, guard)?;
        let prec = work_ctx.prec();
        let params = boundary_params(m as usize, config.distribution, &work_ctx);
        let points = points_at_params(shape, &params, &work_ctx);

        let (lo, hi) = match &bracket {
            Some((lo, hi)) => (
                Float::with_val(prec, lo),
                Float::with_val(prec, hi),
            ),
            None => {
                let seed_w = Float::with_val(prec, &seed);
                let pad_w = Float::with_val(prec, &seed_w * Float::with_val(prec, pad));
                (
                    Float::with_val(prec, &seed_w - &pad_w),
                    Float::with_val(prec, &seed_w + &pad_w),
                )
            }
        };

        let root = roots::find_root(
            |lam| det_at(lam, &points, m as usize, &work_ctx),
            &lo,
            &hi,
            &work_ctx,
        );
        let lam = match root {
            Ok(v) => v,
            Err(Error::InvalidBracket { .. }) if bracket.is_some() => {
                // the tightened bracket lost the root; retry this rung wide
                bracket = None;
                continue;
            }
            Err(Error::InvalidBracket { .. }) if escalation < 2 => {
                // sign change drowned in determinant noise; raise guards
                escalation += 1;
                continue;
            }
            Err(Error::InvalidBracket { lo, hi }) => {
                return Err(Error::NoSignChange {
                    m: m as usize,
                    detail: format!("bracket [{lo}, {hi}] after escalation"),
                });
            }
            Err(e) => return Err(e),
        };

        if let Some(p) = &prev {
            let agree = matched_digits(&lam, p, target + guard);
            let claim = agree.saturating_sub(2);
            if claim >= target {
                return Ok(EigenvalueRecord {
                    shape: shape.clone(),
                    eigenvalue: lam,
                    digits_claimed: target,
                    meta: SolverMeta {
                        basis_size: m,
                        collocation_count: m,
                        distribution: config.distribution,
                    },
                });
            }
            // stall detection: two successive rungs with no improvement
            let gap = Float::with_val(prec, &lam - p)
                .abs()
                / Float::with_val(prec, lam.abs_ref());
            let gap = Float::with_val(prec, gap);
            if let Some(pg) = &prev_gap_rel {
                if gap >= *pg && escalation < 2 {
                    escalation += 1;
                } else if gap >= *pg {
                    return Err(Error::CertificationFailure(format!(
                        "ladder stalled at M={m} with {agree} agreed digits of {target}"
                    )));
                }
            }
            prev_gap_rel = Some(gap.clone());
            // tighten the next bracket around the current root
            let width = Float::with_val(
                prec,
                Float::with_val(prec, &gap * &Float::with_val(prec, lam.abs_ref())) * 32u32,
            );
            let floor = Float::with_val(
                prec,
                Float::with_val(prec, lam.abs_ref()) * work_ctx.pow10(-(target as i64 + 4)),
            );
            let width = if width < floor { floor } else { width };
            bracket = Some((
                Float::with_val(prec, &lam - &width),
                Float::with_val(prec, &lam + &width),
            ));
        }
        prev = Some(lam);
        m += 4;
    }
    Err(Error::CertificationFailure(format!(
        "no convergence after {max_rungs} ladder rungs from M0={m0}"
    )))
}

/// Residual diagnostic: the solved mode evaluated at boundary midpoints
/// (points not used for collocation), relative to its center amplitude.
pub fn boundary_residual(
    shape: &EllipseShape,
    lambda: &Float,
    m: usize,
    distribution: PointDistribution,
    ctx: &PrecisionContext,
) -> Result<Float> {
    let prec = ctx.prec();
    let params = boundary_params(m, distribution, ctx);
    let points = points_at_params(shape, &params, ctx);
    let mut a = collocation_matrix(lambda, &points, m, ctx)?;
    // row scaling only: column scaling would distort the null direction
    a.scale_rows_unit();
    let coeffs = null_direction(a);
    let center_amp = Float::with_val(prec, coeffs[0].abs_ref());
    if center_amp.is_zero() {
        return Err(Error::Domain("mode amplitude vanished at the center".into()));
    }
    // midpoints of consecutive collocation parameters
    let mids: Vec<Float> = params
        .windows(2)
        .map(|w| Float::with_val(prec, &w[0] + &w[1]) / 2u32)
        .collect();
    let mid_points = points_at_params(shape, &mids, ctx);
    let s = Float::with_val(prec, lambda.sqrt_ref());
    let mut worst = Float::new(prec);
    for (r, theta) in &mid_points {
        let x = Float::with_val(prec, &s * r);
        let j = bessel::bessel_j_upto(2 * (m - 1) as u32, &x, ctx)?;
        let mut acc = Float::new(prec);
        for (k, c) in coeffs.iter().enumerate() {
            let angle = Float::with_val(prec, theta * Float::with_val(prec, 2 * k as u32));
            let ck = angle.cos();
            let term = Float::with_val(prec, &j[2 * k] * &ck);
            acc += Float::with_val(prec, &term * c);
        }
        let mag = acc.abs();
        if mag > worst {
            worst = mag;
        }
    }
    Ok(Float::with_val(prec, &worst / &center_amp))
}
