//! Case split by the largest block size `d₁ = max dᵢ`.

use std::fmt;

use super::profile::{assumptions, Options};
use super::{validate, ArthurError, ArthurParameter, CentralValue, CuspidalLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// `d₁ < m/2 − 1`: every factor is nonvanishing from `m/4` on.
    SmallMaxD { d_max: u32 },
    /// `d₁ ≥ m/2 − 1` on the trivial label: `ζ`-block pole at `(d₁+1)/2`.
    TrivialBigD { d1: u32, pole_at: u32 },
    /// `ψ = π_f[m/2]` for a single eigenform.
    EigenformFull { weight: u32 },
}

impl fmt::Display for CaseTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SmallMaxD { d_max } => write!(f, "SmallMaxD (d_max = {d_max})"),
            Self::TrivialBigD { d1, pole_at } => write!(f, "TrivialBigD (d1 = {d1}, pole at {pole_at})"),
            Self::EigenformFull { weight } => write!(f, "EigenformFull (weight {weight})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost(u32),
    Exactly(u32),
    /// One of two values, depending on an unresolved central value.
    OneOf(u32, u32),
}

impl Bound {
    pub fn admits(&self, g: u32) -> bool {
        match *self {
            Self::AtMost(b) => g <= b,
            Self::Exactly(b) => g == b,
            Self::OneOf(a, b) => g == a || g == b,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AtMost(b) => write!(f, "g <= {b}"),
            Self::Exactly(b) => write!(f, "g = {b}"),
            Self::OneOf(a, b) => write!(f, "g in {{{a}, {b}}}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub case: CaseTag,
    pub bound: Bound,
    pub assumptions: Vec<String>,
}

/// Classifies a valid parameter and derives its bound on `g` without
/// computing the full profile.
///
/// In the small case the nonvanishing argument only excludes `t ≥ m/4`, so
/// a zero may still sit below `m/4`; the bound is therefore `3m/4 − 1`.
/// Parameters that reach it in practice fail the multiplicity condition.
pub fn classify(psi: &ArthurParameter, opts: &Options) -> Result<Classification, ArthurError> {
    validate(psi).map_err(ArthurError::InvalidParameter)?;
    let m = psi.m();
    let half = m / 2;
    // ties go to the trivial label, which sorts first among equal n·d
    let top = psi
        .summands()
        .iter()
        .max_by_key(|s| (s.d, s.label == CuspidalLabel::Trivial))
        .expect("valid parameters are nonempty");
    let d1 = top.d;
    let (case, bound) = match top.label {
        CuspidalLabel::Eigenform { weight, .. } if psi.summands().len() == 1 && d1 == half => {
            let bound = match top.label.central_value(opts.assume_central_nonvanishing) {
                Some(CentralValue::NonZero) => Bound::Exactly(half),
                Some(CentralValue::Zero) => Bound::Exactly(3 * m / 4),
                _ => Bound::OneOf(half, 3 * m / 4),
            };
            (CaseTag::EigenformFull { weight }, bound)
        }
        CuspidalLabel::Trivial if d1 + 1 >= half => {
            let pole_at = d1.div_ceil(2);
            (CaseTag::TrivialBigD { d1, pole_at }, Bound::Exactly(half - pole_at))
        }
        _ => (CaseTag::SmallMaxD { d_max: d1 }, Bound::AtMost(3 * m / 4 - 1)),
    };
    Ok(Classification {
        case,
        bound,
        assumptions: assumptions(psi, opts),
    })
}
