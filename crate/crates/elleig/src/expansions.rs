//! Reference closed-form expansions of the fundamental eigenvalue: the
//! even-eccentricity series about the circle (constant-area convention,
//! coefficients are rational polynomials in rho) and the stretch-factor
//! expansion about the infinite strip (constant semi-major axis,
//! coefficients are rational combinations of powers of pi).
//!
//! These serve as solver seeds and as oracles in tests; the discovery
//! pipeline re-derives them from scratch rather than reading them here.
//!
//! Note: the published table rows for the e^24 and e^26 coefficients
//! carry an overall sign opposite to the tabulated numerical values
//! (which are positive, like every other coefficient); the positive
//! versions are stored.

use rug::{Float, Rational};

use crate::error::Result;
use crate::form::{ClosedForm, ConstantAtom};
use crate::mp::PrecisionContext;

/// Exact coefficients of lambda/rho in even powers of eccentricity,
/// through e^26: entry k multiplies e^(2k).
pub fn maclaurin_coefficients() -> Vec<ClosedForm> {
    vec![
        ClosedForm::integer(1),
        ClosedForm::zero(),
        ClosedForm::rho_polynomial(&[-2, 1], 32),
        ClosedForm::rho_polynomial(&[-2, 1], 32),
        ClosedForm::rho_polynomial(&[-1792, 832, 58, -7], 32768),
        ClosedForm::rho_polynomial(&[-768, 320, 58, -7], 16384),
        ClosedForm::rho_polynomial(&[-1140480, 418176, 134676, -12778, -1066, 87], 28311552),
        ClosedForm::rho_polynomial(&[-329472, 104832, 51156, -2698, -1066, 87], 9437184),
        ClosedForm::rho_polynomial(
            &[
                -113359454208,
                30916214784,
                21039022080,
                -4882432,
                -742073664,
                44817952,
                3371550,
                -206061,
            ],
            3710851743744,
        ),
        ClosedForm::rho_polynomial(
            &[
                -25027411968,
                5775556608,
                5234098176,
                307986432,
                -253044032,
                4906528,
                3371550,
                -206061,
            ],
            927712935936,
        ),
        ClosedForm::rho_polynomial(
            &[
                -356640620544000,
                68584734720000,
                80801390592000,
                9860534272000,
                -4688313904000,
                -200183585216,
                118301328148,
                -5150192834,
                -342482130,
                16700445,
            ],
            14843406974976000,
        ),
        ClosedForm::rho_polynomial(
            &[
                -64012419072000,
                10059094425600,
                15282796953600,
                2869625651200,
                -962599369600,
                -126365422016,
                37384128148,
                -204728834,
                -342482130,
                16700445,
            ],
            2968681394995200,
        ),
        ClosedForm::rho_polynomial_str(
            &[
                "-95949275724251136000",
                "11993659465531392000",
                "23656611409035264000",
                "6033467570651136000",
                "-1477542066905088000",
                "-383914479592341504",
                "77508820026886656",
                "4817972151021312",
                "-1484737085079984",
                "50217731403560",
                "2968187062070",
                "-120332513685",
            ],
            "4924686192529637376000",
        ),
        ClosedForm::rho_polynomial_str(
            &[
                "-14537769049128960000",
                "1389639688519680000",
                "3645518590771200000",
                "1178391769251840000",
                "-204288219832320000",
                "-94442136581505024",
                "13031591176137216",
                "2432501708504832",
                "-443153032753584",
                "-572997966040",
                "2968187062070",
                "-120332513685",
            ],
            "820781032088272896000",
        ),
    ]
}

/// Exact coefficients of lambda' in powers of the stretch factor,
/// from the eps^-2 strip term through eps^5: entry k multiplies
/// eps^(k - 2).
pub fn asymptotic_coefficients() -> Vec<ClosedForm> {
    let q = |n: i64, d: i64| Rational::from((n, d));
    vec![
        ClosedForm::pi_term(q(1, 4), 2),
        ClosedForm::pi_term(q(1, 2), 1),
        ClosedForm::rational(q(3, 4)),
        ClosedForm::new(vec![
            (q(11, 8), ConstantAtom::Pi(-1)),
            (q(1, 12), ConstantAtom::Pi(1)),
        ]),
        ClosedForm::new(vec![
            (q(61, 16), ConstantAtom::Pi(-2)),
            (q(1, 12), ConstantAtom::One),
        ]),
        ClosedForm::new(vec![
            (q(1971, 128), ConstantAtom::Pi(-3)),
            (q(-9, 16), ConstantAtom::Pi(-1)),
            (q(3, 80), ConstantAtom::Pi(1)),
        ]),
        ClosedForm::new(vec![
            (q(20851, 256), ConstantAtom::Pi(-4)),
            (q(-271, 48), ConstantAtom::Pi(-2)),
            (q(2, 45), ConstantAtom::One),
        ]),
        ClosedForm::new(vec![
            (q(537219, 1024), ConstantAtom::Pi(-5)),
            (q(-11667, 256), ConstantAtom::Pi(-3)),
            (q(-7, 64), ConstantAtom::Pi(-1)),
            (q(5, 224), ConstantAtom::Pi(1)),
        ]),
    ]
}

/// Partial sum of lambda/rho through e^26.
pub fn maclaurin_lambda_over_rho(e: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let coeffs = maclaurin_coefficients();
    let e2 = Float::with_val(ctx.prec(), e.square_ref());
    let mut power = ctx.from_u32(1);
    let mut sum = ctx.zero();
    for c in &coeffs {
        if !c.is_zero() {
            let cv = c.eval(ctx)?;
            sum += Float::with_val(ctx.prec(), &cv * &power);
        }
        power = Float::with_val(ctx.prec(), &power * &e2);
    }
    Ok(sum)
}

/// Partial sum of lambda' through eps^5.
pub fn asymptotic_lambda_prime(eps: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let coeffs = asymptotic_coefficients();
    let mut sum = ctx.zero();
    for (k, c) in coeffs.iter().enumerate() {
        let cv = c.eval(ctx)?;
        let p = crate::mp::pow_i64(eps, k as i64 - 2);
        sum += Float::with_val(ctx.prec(), &cv * &p);
    }
    Ok(sum)
}

/// Conservative relative truncation bound of the e^26 partial sum.
pub fn maclaurin_truncation_rel(e: f64) -> f64 {
    0.1 * e.powi(28)
}

/// Conservative relative truncation bound of the eps^5 partial sum.
pub fn asymptotic_truncation_rel(eps: f64) -> f64 {
    0.1 * eps.powi(8)
}
