//! Orders of `L(s, π) = ∏ᵢ ∏ⱼ L(s + j − (dᵢ−1)/2, πᵢ)` at the integers
//! `t = 1, …, m/2`, and the degree `g(π)` they determine.

use std::fmt;

use num_rational::Rational64;

use super::{ArthurError, ArthurParameter, CentralValue, CuspidalLabel};

/// Resolution switches shared by the profile, `g` and classification.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    /// Treat unresolved central values as nonvanishing (recorded as an assumption).
    pub assume_central_nonvanishing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FactorOrder {
    Known(i64),
    /// The order depends on an unresolved central value.
    Unknown(String),
}

/// Order of `L(s, label)` at `s = a` (negative for poles).
///
/// `ζ` has its pole at 1 and real zeros at the negative even integers. An
/// eigenform of weight `k` has zeros at `−(k−1)/2 − n` from its gamma factor
/// and possibly at the centre `1/2`; it is nonzero at every other integer or
/// half-integer.
pub fn factor_order_at(label: &CuspidalLabel, a: Rational64, opts: &Options) -> Result<FactorOrder, ArthurError> {
    let twice = a * 2;
    if !twice.is_integer() {
        return Err(ArthurError::UnsupportedArgument(a.to_string()));
    }
    Ok(order_doubled(label, twice.to_integer(), opts))
}

/// Same as `factor_order_at` with the argument given as `2a`.
fn order_doubled(label: &CuspidalLabel, a2: i64, opts: &Options) -> FactorOrder {
    match *label {
        CuspidalLabel::Trivial => FactorOrder::Known(match a2 {
            2 => -1,
            x if x < 0 && x % 4 == 0 => 1,
            _ => 0,
        }),
        CuspidalLabel::Eigenform { weight, .. } => {
            let top = -(i64::from(weight) - 1);
            if a2 <= top && (top - a2) % 2 == 0 {
                return FactorOrder::Known(1);
            }
            if a2 != 1 {
                return FactorOrder::Known(0);
            }
            match label
                .central_value(opts.assume_central_nonvanishing)
                .expect("eigenform")
            {
                CentralValue::Zero => FactorOrder::Known(1),
                CentralValue::NonZero => FactorOrder::Known(0),
                CentralValue::Unresolved => FactorOrder::Unknown(format!("L(1/2, {}) is unresolved", label.form())),
            }
        }
    }
}

/// Net order at each `t = 1, …, m/2` plus the assumptions it rests on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LOrderProfile {
    pub orders: Vec<FactorOrder>,
    pub assumptions: Vec<String>,
}

impl LOrderProfile {
    /// Order at `t` (1-based).
    pub fn at(&self, t: usize) -> &FactorOrder {
        &self.orders[t - 1]
    }

    pub fn is_resolved(&self) -> bool {
        self.orders.iter().all(|o| matches!(o, FactorOrder::Known(_)))
    }

    /// `T(π)`: the points with nonzero order, if every order is known.
    pub fn support(&self) -> Option<Vec<usize>> {
        let mut out = Vec::new();
        for (i, o) in self.orders.iter().enumerate() {
            match o {
                FactorOrder::Known(0) => {}
                FactorOrder::Known(_) => out.push(i + 1),
                FactorOrder::Unknown(_) => return None,
            }
        }
        Some(out)
    }
}

/// Assumptions a parameter's labels impose under `opts`.
pub fn assumptions(psi: &ArthurParameter, opts: &Options) -> Vec<String> {
    let mut out = Vec::new();
    for s in psi.summands() {
        if let CuspidalLabel::Eigenform { central, .. } = s.label {
            let note = match central {
                super::Central::Zero => Some(format!("L(1/2, {}) = 0 forced by flag", s.label.form())),
                super::Central::NonZero => Some(format!("L(1/2, {}) != 0 forced by flag", s.label.form())),
                super::Central::Auto => {
                    let resolved = s.label.central_value(false) != Some(CentralValue::Unresolved);
                    (!resolved && opts.assume_central_nonvanishing)
                        .then(|| format!("central nonvanishing assumed for {}", s.label.form()))
                }
            };
            if let Some(n) = note {
                if !out.contains(&n) {
                    out.push(n);
                }
            }
        }
    }
    out
}

/// Orders of `L(t, π)` for `t = 1, …, m/2`. An unknown factor makes the
/// whole point unknown; the reason names the factor.
pub fn l_profile(psi: &ArthurParameter, opts: &Options) -> LOrderProfile {
    let half = i64::from(psi.m() / 2);
    let mut orders = Vec::with_capacity(half as usize);
    for t in 1..=half {
        let mut net = 0i64;
        let mut unknown = None;
        for (i, s) in psi.summands().iter().enumerate() {
            let d = i64::from(s.d);
            for j in 0..d {
                match order_doubled(&s.label, 2 * t + 2 * j - (d - 1), opts) {
                    FactorOrder::Known(o) => net += o,
                    FactorOrder::Unknown(why) => {
                        unknown.get_or_insert(format!("{why} (summand {}, j = {j})", i + 1));
                    }
                }
            }
        }
        orders.push(match unknown {
            Some(why) => FactorOrder::Unknown(why),
            None => FactorOrder::Known(net),
        });
    }
    LOrderProfile {
        orders,
        assumptions: assumptions(psi, opts),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleOrZero {
    Pole,
    Zero,
}

impl fmt::Display for PoleOrZero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pole => "pole",
            Self::Zero => "zero",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GValue {
    Known {
        g: u32,
        /// `t(π) = max T(π)` and its type, or `None` when `T(π)` is empty.
        t_star: Option<(u32, PoleOrZero)>,
    },
    Unknown(String),
}

impl GValue {
    pub fn value(&self) -> Option<u32> {
        match self {
            Self::Known { g, .. } => Some(*g),
            Self::Unknown(_) => None,
        }
    }
}

/// `g(π)` from the profile: `m/2` when `T` is empty, `m/2 − t*` when `t*`
/// is a pole and `m/2 + t*` when it is a zero.
pub fn g_of(psi: &ArthurParameter, opts: &Options) -> GValue {
    let profile = l_profile(psi, opts);
    g_from_profile(psi.m(), &profile)
}

pub(crate) fn g_from_profile(m: u32, profile: &LOrderProfile) -> GValue {
    let half = m / 2;
    let mut t_star = None;
    for (i, o) in profile.orders.iter().enumerate() {
        match o {
            FactorOrder::Unknown(why) => return GValue::Unknown(why.clone()),
            FactorOrder::Known(0) => {}
            FactorOrder::Known(x) => {
                let kind = if *x < 0 { PoleOrZero::Pole } else { PoleOrZero::Zero };
                t_star = Some((i as u32 + 1, kind));
            }
        }
    }
    let g = match t_star {
        None => half,
        Some((t, PoleOrZero::Pole)) => half.saturating_sub(t),
        Some((t, PoleOrZero::Zero)) => half + t,
    };
    GValue::Known { g, t_star }
}
