//! Standard parameters `ψ = ⊕ πᵢ[dᵢ]` and the bookkeeping around them:
//! validation, the sign character χ on `I₀`, the multiplicity condition,
//! the integer zero/pole profile of `L(s, π)` and the resulting `g(π)`.
//!
//! Cuspidal labels are limited to the trivial representation of GL₁ and
//! level-one holomorphic eigenforms. Infinitesimal-character eigenvalues are
//! stored doubled so half-integers stay exact.

mod classify;
mod profile;
mod scan;

use std::collections::HashMap;
use std::fmt;
use std::ops::Mul;

use thiserror::Error;

pub use classify::{classify, Bound, CaseTag, Classification};
pub use profile::{factor_order_at, g_of, l_profile, FactorOrder, GValue, LOrderProfile, Options, PoleOrZero};
pub use scan::enumerate_parameters;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArthurError {
    #[error("summand {0} is not in I0")]
    IndexNotInI0(usize),
    #[error("L-function orders are only tabulated at integers and half-integers, got {0}")]
    UnsupportedArgument(String),
    #[error("invalid parameter: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidParameter(Vec<Violation>),
    #[error("parameter scans need m a positive multiple of 8 and max weight at most 30 (got m={m}, max weight {max_weight})")]
    UnsupportedScan { m: u32, max_weight: u32 },
    #[error("epsilon table line {line}: {message}")]
    EpsilonTable { line: usize, message: String },
}

/// Level-one cusp form dimensions for even weights up to 30.
const CUSP_DIMENSIONS: [(u32, u32); 10] = [
    (12, 1),
    (14, 0),
    (16, 1),
    (18, 1),
    (20, 1),
    (22, 1),
    (24, 2),
    (26, 1),
    (28, 2),
    (30, 2),
];

/// Largest weight covered by the dimension table.
pub const TABULATED_WEIGHT: u32 = 30;

/// `dim S_k(SL₂(ℤ))` where tabulated; `None` above the table.
pub fn cusp_form_dimension(k: u32) -> Option<u32> {
    if k > TABULATED_WEIGHT {
        return None;
    }
    Some(CUSP_DIMENSIONS.iter().find(|&&(w, _)| w == k).map_or(0, |&(_, d)| d))
}

/// Largest weight for which central nonvanishing is taken as known when the
/// weight is divisible by 4.
pub const CENTRAL_VERIFIED_WEIGHT: u32 = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Central {
    #[default]
    Auto,
    Zero,
    NonZero,
}

/// What is known about `L(1/2, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CentralValue {
    Zero,
    NonZero,
    Unresolved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CuspidalLabel {
    /// The trivial representation of GL₁; `L(s, 1) = ζ(s)`.
    Trivial,
    /// A level-one Hecke eigenform of weight `weight`, the `index`-th one
    /// when `dim S_k > 1`.
    Eigenform { weight: u32, index: u32, central: Central },
}

impl CuspidalLabel {
    pub fn eigenform(weight: u32) -> Self {
        Self::Eigenform {
            weight,
            index: 1,
            central: Central::Auto,
        }
    }

    /// Dimension `n` of the general linear group the label lives on.
    pub fn n(&self) -> u32 {
        match self {
            Self::Trivial => 1,
            Self::Eigenform { .. } => 2,
        }
    }

    /// Doubled eigenvalues of the infinitesimal character.
    pub fn doubled_eigenvalues(&self) -> Vec<i64> {
        match *self {
            Self::Trivial => vec![0],
            Self::Eigenform { weight, .. } => {
                let w = i64::from(weight) - 1;
                vec![w, -w]
            }
        }
    }

    /// The same label with the central flag reset, identifying the form itself.
    pub fn form(&self) -> Self {
        match *self {
            Self::Eigenform { weight, index, .. } => Self::Eigenform {
                weight,
                index,
                central: Central::Auto,
            },
            other => other,
        }
    }

    /// Central value after applying flags: a forced flag wins; otherwise
    /// weights ≡ 2 (mod 4) vanish by the sign of the functional equation and
    /// weights ≡ 0 (mod 4) up to the verified range do not.
    pub fn central_value(&self, assume_nonvanishing: bool) -> Option<CentralValue> {
        let Self::Eigenform { weight, central, .. } = *self else {
            return None;
        };
        Some(match central {
            Central::Zero => CentralValue::Zero,
            Central::NonZero => CentralValue::NonZero,
            Central::Auto if weight % 4 == 2 => CentralValue::Zero,
            Central::Auto if weight <= CENTRAL_VERIFIED_WEIGHT => CentralValue::NonZero,
            Central::Auto if assume_nonvanishing => CentralValue::NonZero,
            Central::Auto => CentralValue::Unresolved,
        })
    }
}

impl fmt::Display for CuspidalLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::param_syntax::format_label(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Summand {
    pub label: CuspidalLabel,
    pub d: u32,
}

impl Summand {
    pub fn new(label: CuspidalLabel, d: u32) -> Self {
        Self { label, d }
    }

    pub fn nd(&self) -> u32 {
        self.label.n() * self.d
    }

    /// Doubled eigenvalues of `c_∞(π) ⊗ [d]_∞`.
    pub fn doubled_eigenvalues(&self) -> Vec<i64> {
        let d = i64::from(self.d);
        let mut out = Vec::with_capacity((self.label.n() * self.d) as usize);
        for e in self.label.doubled_eigenvalues() {
            for j in 0..d {
                out.push(e - (d - 1) + 2 * j);
            }
        }
        out
    }

    fn order_key(&self) -> impl Ord {
        let label = match self.label {
            CuspidalLabel::Trivial => (0, 0, 0, Central::Auto),
            CuspidalLabel::Eigenform { weight, index, central } => (1, weight, index, central),
        };
        (std::cmp::Reverse(self.nd()), label, std::cmp::Reverse(self.d))
    }
}

impl fmt::Display for Summand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)?;
        if self.d != 1 {
            write!(f, "[{}]", self.d)?;
        }
        Ok(())
    }
}

/// A formal parameter for `O_m`. Summands are kept in canonical order
/// (descending `n·d`, then trivial before eigenforms by weight and index),
/// so indices reported by the analysis refer to that order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArthurParameter {
    m: u32,
    summands: Vec<Summand>,
}

impl ArthurParameter {
    pub fn new(m: u32, mut summands: Vec<Summand>) -> Self {
        summands.sort_by_key(Summand::order_key);
        Self { m, summands }
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    /// Multiset union of the summands' doubled eigenvalues, sorted descending.
    pub fn psi_infinity(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.summands.iter().flat_map(Summand::doubled_eigenvalues).collect();
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }

    /// Doubled eigenvalues every valid parameter must have:
    /// `±(m/2 − 1), …, ±1` and `0` twice.
    pub fn target_eigenvalues(m: u32) -> Vec<i64> {
        let h = i64::from(m / 2);
        let mut out: Vec<i64> = (1..h).flat_map(|w| [2 * w, -2 * w]).collect();
        out.extend([0, 0]);
        out.sort_unstable_by(|a, b| b.cmp(a));
        out
    }
}

impl fmt::Display for ArthurParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::param_syntax::format(self))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// `m` must be a positive multiple of 8.
    Rank(u32),
    DimensionSum {
        expected: u32,
        got: u32,
    },
    /// Doubled eigenvalues missing from, or in excess of, the required multiset.
    Eigenvalues {
        missing: Vec<i64>,
        extra: Vec<i64>,
    },
    /// The `n·d` values not divisible by 4, when they break the mod-4 rule.
    Mod4 {
        exceptions: Vec<u32>,
    },
    DuplicateSummand(String),
}

fn halves(v: &[i64]) -> String {
    v.iter()
        .map(|&x| {
            if x % 2 == 0 {
                (x / 2).to_string()
            } else {
                format!("{x}/2")
            }
        })
        .collect::<Vec<_>>()
        .join(",")
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rank(m) => write!(f, "m = {m} is not a positive multiple of 8"),
            Self::DimensionSum { expected, got } => write!(f, "sum of n*d is {got}, expected {expected}"),
            Self::Eigenvalues { missing, extra } => write!(
                f,
                "infinitesimal character mismatch: missing {{{}}}, unexpected {{{}}}",
                halves(missing),
                halves(extra)
            ),
            Self::Mod4 { exceptions } => write!(
                f,
                "mod-4 rule fails: n*d values {:?} are not 0 mod 4 (need none, or two with product 3 mod 4)",
                exceptions
            ),
            Self::DuplicateSummand(s) => write!(f, "summand {s} appears more than once"),
        }
    }
}

/// All violations of the structural rules, in check order.
pub fn validate(psi: &ArthurParameter) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    let m = psi.m;
    if m == 0 || !m.is_multiple_of(8) {
        out.push(Violation::Rank(m));
    }
    let got: u32 = psi.summands.iter().map(Summand::nd).sum();
    if got != m {
        out.push(Violation::DimensionSum { expected: m, got });
    }
    let mut balance: HashMap<i64, i64> = HashMap::new();
    for e in ArthurParameter::target_eigenvalues(m) {
        *balance.entry(e).or_default() += 1;
    }
    for e in psi.psi_infinity() {
        *balance.entry(e).or_default() -= 1;
    }
    let mut missing = Vec::new();
    let mut extra = Vec::new();
    for (&e, &c) in &balance {
        for _ in 0..c.max(0) {
            missing.push(e);
        }
        for _ in 0..(-c).max(0) {
            extra.push(e);
        }
    }
    if !missing.is_empty() || !extra.is_empty() {
        missing.sort_unstable_by(|a, b| b.cmp(a));
        extra.sort_unstable_by(|a, b| b.cmp(a));
        out.push(Violation::Eigenvalues { missing, extra });
    }
    let exceptions: Vec<u32> = psi.summands.iter().map(Summand::nd).filter(|x| x % 4 != 0).collect();
    let mod4_ok = exceptions.is_empty() || (exceptions.len() == 2 && (exceptions[0] * exceptions[1]) % 4 == 3);
    if !mod4_ok {
        out.push(Violation::Mod4 { exceptions });
    }
    for (i, s) in psi.summands.iter().enumerate() {
        if psi.summands[..i].contains(s) && !psi.summands[i + 1..].contains(s) {
            out.push(Violation::DuplicateSummand(s.to_string()));
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

pub fn is_valid(psi: &ArthurParameter) -> bool {
    validate(psi).is_ok()
}

/// Indices (0-based, canonical order) of summands with `n·d ≡ 0 (mod 4)`.
pub fn i_zero_set(psi: &ArthurParameter) -> Vec<usize> {
    psi.summands
        .iter()
        .enumerate()
        .filter(|(_, s)| s.nd() % 4 == 0)
        .map(|(i, _)| i)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Self {
        if odd {
            Self::Minus
        } else {
            Self::Plus
        }
    }

    pub fn value(self) -> i32 {
        match self {
            Self::Plus => 1,
            Self::Minus => -1,
        }
    }

    pub fn pow(self, e: u32) -> Self {
        if e.is_multiple_of(2) {
            Self::Plus
        } else {
            self
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self != rhs)
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Plus => "+1",
            Self::Minus => "-1",
        })
    }
}

/// `χ(sᵢ)` for a summand in `I₀`.
pub fn chi(psi: &ArthurParameter, i: usize) -> Result<Sign, ArthurError> {
    let s = psi
        .summands
        .get(i)
        .filter(|s| s.nd() % 4 == 0)
        .ok_or(ArthurError::IndexNotInI0(i))?;
    if s.d % 2 == 0 {
        Ok(Sign::from_parity((s.nd() / 4) % 2 == 1))
    } else {
        Ok(chi_odd(psi.m, &s.label.doubled_eigenvalues()))
    }
}

/// The odd-`d` rule: `(−1)^{|K|}` where `K` collects the odd `j ≤ m/2` whose
/// weight `w_j = m/2 − j` is an eigenvalue of the cuspidal label (given doubled).
pub fn chi_odd(m: u32, label_eigenvalues: &[i64]) -> Sign {
    let h = i64::from(m / 2);
    let k = (1..=h)
        .step_by(2)
        .filter(|&j| label_eigenvalues.contains(&(2 * (h - j))))
        .count();
    Sign::from_parity(k % 2 == 1)
}

/// Where an ε value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EpsilonValue {
    Builtin(Sign),
    Fixture(Sign),
    Unknown,
}

impl EpsilonValue {
    pub fn sign(self) -> Option<Sign> {
        match self {
            Self::Builtin(s) | Self::Fixture(s) => Some(s),
            Self::Unknown => None,
        }
    }
}

/// User-supplied `ε(π × π')` values for pairs the built-in rules do not cover.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EpsilonTable {
    entries: HashMap<(CuspidalLabel, CuspidalLabel), Sign>,
}

impl EpsilonTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn key(a: &CuspidalLabel, b: &CuspidalLabel) -> (CuspidalLabel, CuspidalLabel) {
        let (a, b) = (a.form(), b.form());
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    /// Adds an entry; entries contradicting the built-in rules are rejected.
    pub fn insert(&mut self, a: CuspidalLabel, b: CuspidalLabel, sign: Sign) -> Result<(), String> {
        if let Some(builtin) = builtin_epsilon(&a, &b) {
            if builtin != sign {
                return Err(format!("eps({a} x {b}) is {builtin} by the built-in rules"));
            }
        }
        self.entries.insert(Self::key(&a, &b), sign);
        Ok(())
    }

    pub fn get(&self, a: &CuspidalLabel, b: &CuspidalLabel) -> Option<Sign> {
        self.entries.get(&Self::key(a, b)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Lines `labelA labelB ±1`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ArthurError> {
        let mut table = Self::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let err = |message: String| ArthurError::EpsilonTable { line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let parts: Vec<&str> = content.split_whitespace().collect();
            let [a, b, s] = parts[..] else {
                return Err(err(format!("expected `labelA labelB ±1`, got {content:?}")));
            };
            let a = crate::param_syntax::parse_label(a).map_err(|e| err(e.to_string()))?;
            let b = crate::param_syntax::parse_label(b).map_err(|e| err(e.to_string()))?;
            let sign = match s {
                "+1" | "1" => Sign::Plus,
                "-1" => Sign::Minus,
                other => return Err(err(format!("sign must be +1 or -1, got {other:?}"))),
            };
            table.insert(a, b, sign).map_err(err)?;
        }
        Ok(table)
    }
}

fn builtin_epsilon(a: &CuspidalLabel, b: &CuspidalLabel) -> Option<Sign> {
    use CuspidalLabel::*;
    if a.form() == b.form() {
        return Some(Sign::Plus);
    }
    match (a, b) {
        (Eigenform { weight, .. }, Trivial) | (Trivial, Eigenform { weight, .. }) => {
            Some(Sign::from_parity((weight / 2) % 2 == 1))
        }
        _ => None,
    }
}

/// `ε(a × b)`: `+1` for identical labels, `(−1)^{k/2}` for an eigenform of
/// weight `k` against the trivial label, otherwise whatever the table says.
pub fn epsilon_pair(a: &CuspidalLabel, b: &CuspidalLabel, table: &EpsilonTable) -> EpsilonValue {
    if let Some(s) = builtin_epsilon(a, b) {
        return EpsilonValue::Builtin(s);
    }
    table.get(a, b).map_or(EpsilonValue::Unknown, EpsilonValue::Fixture)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Condition {
    Satisfied,
    /// χ(sᵢ) differs from the ε product for summand `i`.
    Violated {
        i: usize,
    },
    /// An odd-exponent ε factor is unknown.
    Unknown {
        i: usize,
        pair: (CuspidalLabel, CuspidalLabel),
    },
}

/// Checks `χ(sᵢ) = ∏_{j≠i} ε(πᵢ × πⱼ)^{min(dᵢ, dⱼ)}` for every `i ∈ I₀`.
/// A violation anywhere is definitive; otherwise the first unknown factor
/// is reported.
pub fn arthur_condition(psi: &ArthurParameter, table: &EpsilonTable) -> Condition {
    let mut unknown = None;
    for i in i_zero_set(psi) {
        let si = psi.summands[i];
        let chi_i = chi(psi, i).expect("i is in I0");
        let mut product = Some(Sign::Plus);
        for (j, sj) in psi.summands.iter().enumerate() {
            let e = si.d.min(sj.d);
            if j == i || e % 2 == 0 {
                continue;
            }
            match epsilon_pair(&si.label, &sj.label, table).sign() {
                Some(s) => product = product.map(|p| p * s.pow(e)),
                None => {
                    product = None;
                    unknown.get_or_insert(Condition::Unknown {
                        i,
                        pair: (si.label, sj.label),
                    });
                    break;
                }
            }
        }
        if product.is_some_and(|p| p != chi_i) {
            return Condition::Violated { i };
        }
    }
    unknown.unwrap_or(Condition::Satisfied)
}

/// ε values from the fixture table that the condition check relied on.
pub fn fixtures_used(psi: &ArthurParameter, table: &EpsilonTable) -> Vec<(CuspidalLabel, CuspidalLabel, Sign)> {
    let mut out = Vec::new();
    for i in i_zero_set(psi) {
        let si = psi.summands[i];
        for (j, sj) in psi.summands.iter().enumerate() {
            if j == i || si.d.min(sj.d) % 2 == 0 {
                continue;
            }
            if let EpsilonValue::Fixture(s) = epsilon_pair(&si.label, &sj.label, table) {
                let entry = (si.label.form(), sj.label.form(), s);
                if !out.contains(&entry) {
                    out.push(entry);
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Multiplicity {
    One,
    Two,
    NotDiscrete,
    Unknown {
        i: usize,
        pair: (CuspidalLabel, CuspidalLabel),
    },
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::One => f.write_str("1"),
            Self::Two => f.write_str("2"),
            Self::NotDiscrete => f.write_str("not discrete"),
            Self::Unknown { pair, .. } => write!(f, "unknown (needs eps({} x {}))", pair.0, pair.1),
        }
    }
}

/// Sum of multiplicities over the packet: 2 when every summand is in `I₀`,
/// 1 otherwise, provided the condition holds.
pub fn multiplicity_sum(psi: &ArthurParameter, table: &EpsilonTable) -> Multiplicity {
    match arthur_condition(psi, table) {
        Condition::Violated { .. } => Multiplicity::NotDiscrete,
        Condition::Unknown { i, pair } => Multiplicity::Unknown { i, pair },
        Condition::Satisfied if i_zero_set(psi).len() == psi.summands.len() => Multiplicity::Two,
        Condition::Satisfied => Multiplicity::One,
    }
}
