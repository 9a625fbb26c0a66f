//! Ellipse parameterization, the two area conventions, and eigenvalue
//! records.
//!
//! Eccentricity is the canonical stored parameter (kept exact as a
//! rational); the stretch factor is recomputed from it at the precision
//! of use so the two can never drift apart. A record always carries its
//! convention explicitly: under `ConstantArea` the area is pinned to pi
//! (`a*b = 1`), under `ConstantSemiMajor` the major semi-axis is pinned
//! to one (`b = stretch`). The product eigenvalue x area is invariant
//! between the two.

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::mp::PrecisionContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    /// A = pi, a*b = 1; eigenvalue written lambda.
    ConstantArea,
    /// a = 1, b = stretch, A = pi*stretch; eigenvalue written lambda'.
    ConstantSemiMajor,
}

impl Convention {
    /// Tag used in data files.
    pub fn tag(self) -> &'static str {
        match self {
            Convention::ConstantArea => "A",
            Convention::ConstantSemiMajor => "Aprime",
        }
    }

    pub fn from_tag(s: &str) -> Result<Self> {
        match s {
            "A" => Ok(Convention::ConstantArea),
            "Aprime" => Ok(Convention::ConstantSemiMajor),
            _ => Err(Error::Parse(format!("unknown convention tag {s:?}"))),
        }
    }
}

/// Collocation parameter spacing used by the eigensolver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointDistribution {
    UniformParameter,
    ChebyshevParameter,
}

impl PointDistribution {
    pub fn tag(self) -> &'static str {
        match self {
            PointDistribution::UniformParameter => "uniform",
            PointDistribution::ChebyshevParameter => "cheb",
        }
    }

    pub fn from_tag(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(PointDistribution::UniformParameter),
            "cheb" => Ok(PointDistribution::ChebyshevParameter),
            _ => Err(Error::Parse(format!("unknown distribution tag {s:?}"))),
        }
    }
}

/// An ellipse identified by its eccentricity and the convention fixing
/// its overall scale.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipseShape {
    ecc: Rational,
    convention: Convention,
}

impl EllipseShape {
    pub fn new(ecc: Rational, convention: Convention) -> Result<Self> {
        if ecc < 0 || ecc >= 1 {
            return Err(Error::Domain(format!(
                "eccentricity must lie in [0, 1), got {ecc}"
            )));
        }
        Ok(EllipseShape { ecc, convention })
    }

    /// Parses a plain decimal eccentricity, e.g. "0.999800".
    pub fn from_decimal(ecc: &str, convention: Convention) -> Result<Self> {
        Self::new(crate::mp::decimal_to_rational(ecc)?, convention)
    }

    pub fn eccentricity(&self) -> &Rational {
        &self.ecc
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn with_convention(&self, convention: Convention) -> Self {
        EllipseShape {
            ecc: self.ecc.clone(),
            convention,
        }
    }

    pub fn ecc_float(&self, ctx: &PrecisionContext) -> Float {
        ctx.from_rational(&self.ecc)
    }

    /// Stretch factor sqrt(1 - e^2), recomputed at the context precision.
    pub fn stretch(&self, ctx: &PrecisionContext) -> Float {
        let one_minus = Rational::from(1 - Rational::from(self.ecc.square_ref()));
        ctx.from_rational(&one_minus).sqrt()
    }

    /// Semi-axes (a, b) with a >= b under this shape's convention.
    pub fn semi_axes(&self, ctx: &PrecisionContext) -> (Float, Float) {
        let eps = self.stretch(ctx);
        match self.convention {
            Convention::ConstantArea => {
                let root = eps.clone().sqrt();
                let a = Float::with_val(ctx.prec(), root.recip_ref());
                (a, root)
            }
            Convention::ConstantSemiMajor => (ctx.from_u32(1), eps),
        }
    }

    pub fn area(&self, ctx: &PrecisionContext) -> Float {
        match self.convention {
            Convention::ConstantArea => ctx.pi(),
            Convention::ConstantSemiMajor => {
                Float::with_val(ctx.prec(), ctx.pi() * self.stretch(ctx))
            }
        }
    }
}

/// Stretch factor for a floating-point eccentricity in [0, 1).
pub fn stretch_from_ecc(e: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if e.is_sign_negative() && !e.is_zero() {
        return Err(Error::Domain(format!("eccentricity {e} < 0")));
    }
    if *e >= 1u32 {
        return Err(Error::Domain(format!("eccentricity {e} >= 1")));
    }
    let mut v = Float::with_val(ctx.prec(), e.square_ref());
    v = -(v - 1u32);
    Ok(v.sqrt())
}

/// Solver provenance stored with every eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverMeta {
    pub basis_size: u32,
    pub collocation_count: u32,
    pub distribution: PointDistribution,
}

/// A computed fundamental eigenvalue with its shape, claimed digits, and
/// solver provenance.
#[derive(Debug, Clone)]
pub struct EigenvalueRecord {
    pub shape: EllipseShape,
    pub eigenvalue: Float,
    pub digits_claimed: u32,
    pub meta: SolverMeta,
}

impl EigenvalueRecord {
    pub fn validate(&self) -> Result<()> {
        if self.eigenvalue.is_sign_negative() || self.eigenvalue.is_zero() {
            return Err(Error::Domain("eigenvalue must be positive".into()));
        }
        Ok(())
    }
}

/// Moves a record between the two conventions via the invariant
/// eigenvalue x area: lambda' = lambda / stretch. One guard digit is
/// spent on the conversion arithmetic.
pub fn convert_eigenvalue(
    record: &EigenvalueRecord,
    target: Convention,
    ctx: &PrecisionContext,
) -> Result<EigenvalueRecord> {
    record.validate()?;
    if record.shape.convention() == target {
        return Ok(record.clone());
    }
    let eps = record.shape.stretch(ctx);
    if eps.is_zero() {
        return Err(Error::DegenerateShape(
            "stretch factor underflowed at this precision".into(),
        ));
    }
    let value = match target {
        Convention::ConstantSemiMajor => Float::with_val(ctx.prec(), &record.eigenvalue / &eps),
        Convention::ConstantArea => Float::with_val(ctx.prec(), &record.eigenvalue * &eps),
    };
    Ok(EigenvalueRecord {
        shape: record.shape.with_convention(target),
        eigenvalue: value,
        digits_claimed: record.digits_claimed.saturating_sub(1),
        meta: record.meta,
    })
}
