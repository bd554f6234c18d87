//! Text form of parameters, e.g. `D12[4]+1[7]+1`.
//!
//! ```text
//! param    := summand ("+" summand)*
//! summand  := label brackets?
//! brackets := "[" INT "]"          absent means d = 1
//! label    := "1" | "D" INT ("." INT)? flag?
//! flag     := "!0" | "!nz"         forced zero / nonzero central value
//! ```
//!
//! `Dk` is a level-one eigenform of modular weight `k` (motivic weight
//! `k − 1`). When `dim S_k > 1` the eigenform index is required, as in
//! `D24.2`. Whitespace between tokens is ignored.

use thiserror::Error;

use crate::arthur::{cusp_form_dimension, ArthurParameter, Central, CuspidalLabel, Summand};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },
    #[error("D{k} is ambiguous: dim S_{k} = {dim}, write D{k}.1 .. D{k}.{dim}")]
    AmbiguousLabel { k: u32, dim: u32 },
    #[error("no eigenform D{k}.{index} (dim S_{k} = {})", .dim.map_or("?".to_string(), |d| d.to_string()))]
    BadIndex { k: u32, index: u32, dim: Option<u32> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Int(u32),
    D,
    Dot,
    Plus,
    Open,
    Close,
    FlagZero,
    FlagNonZero,
}

fn syntax(position: usize, message: impl Into<String>) -> ParseError {
    ParseError::SyntaxError {
        position,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let tok = match bytes[i] {
            b if b.is_ascii_whitespace() => {
                i += 1;
                continue;
            }
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = text[start..i].parse().map_err(|_| syntax(start, "number too large"))?;
                out.push((start, Tok::Int(n)));
                continue;
            }
            b'D' => Tok::D,
            b'.' => Tok::Dot,
            b'+' => Tok::Plus,
            b'[' => Tok::Open,
            b']' => Tok::Close,
            b'!' if bytes[i + 1..].starts_with(b"0") => {
                i += 1;
                Tok::FlagZero
            }
            b'!' if bytes[i + 1..].starts_with(b"nz") => {
                i += 2;
                Tok::FlagNonZero
            }
            b'!' => return Err(syntax(start, "expected `!0` or `!nz`")),
            _ => {
                let c = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(start, format!("unexpected character {c:?}")));
            }
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|&(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |&(o, _)| o)
    }

    fn eat(&mut self, t: Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self, what: &str) -> Result<u32, ParseError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(n)
            }
            _ => Err(syntax(self.offset(), format!("expected {what}"))),
        }
    }

    fn label(&mut self) -> Result<CuspidalLabel, ParseError> {
        let at = self.offset();
        match self.peek() {
            Some(Tok::Int(1)) => {
                self.pos += 1;
                Ok(CuspidalLabel::Trivial)
            }
            Some(Tok::Int(n)) => Err(syntax(at, format!("the only numeric label is 1, got {n}"))),
            Some(Tok::D) => {
                self.pos += 1;
                let k = self.int("a weight after `D`")?;
                let index = if self.eat(Tok::Dot) {
                    Some(self.int("an eigenform index after `.`")?)
                } else {
                    None
                };
                let central = if self.eat(Tok::FlagZero) {
                    Central::Zero
                } else if self.eat(Tok::FlagNonZero) {
                    Central::NonZero
                } else {
                    Central::Auto
                };
                let index = check_index(k, index)?;
                Ok(CuspidalLabel::Eigenform {
                    weight: k,
                    index,
                    central,
                })
            }
            _ => Err(syntax(at, "expected a label (`1` or `D<k>`)")),
        }
    }

    fn summand(&mut self) -> Result<Summand, ParseError> {
        let label = self.label()?;
        let mut d = 1;
        if self.eat(Tok::Open) {
            let at = self.offset();
            d = self.int("a block size")?;
            if d == 0 {
                return Err(syntax(at, "block size must be at least 1"));
            }
            if !self.eat(Tok::Close) {
                return Err(syntax(self.offset(), "expected `]`"));
            }
        }
        Ok(Summand::new(label, d))
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(syntax(self.offset(), "unexpected trailing input")),
        }
    }
}

fn check_index(k: u32, index: Option<u32>) -> Result<u32, ParseError> {
    match cusp_form_dimension(k) {
        Some(0) => Err(ParseError::BadIndex {
            k,
            index: index.unwrap_or(1),
            dim: Some(0),
        }),
        Some(dim) => match index {
            None if dim > 1 => Err(ParseError::AmbiguousLabel { k, dim }),
            None => Ok(1),
            Some(i) if i == 0 || i > dim => Err(ParseError::BadIndex {
                k,
                index: i,
                dim: Some(dim),
            }),
            Some(i) => Ok(i),
        },
        // beyond the table only the weight's parity can be checked
        None if k % 2 == 1 || index == Some(0) => Err(ParseError::BadIndex {
            k,
            index: index.unwrap_or(1),
            dim: None,
        }),
        None => Ok(index.unwrap_or(1)),
    }
}

fn parser(text: &str) -> Result<Parser, ParseError> {
    Ok(Parser {
        toks: tokenize(text)?,
        pos: 0,
        end: text.len(),
    })
}

/// Parses a parameter for rank `m`. The result is not validated.
pub fn parse(text: &str, m: u32) -> Result<ArthurParameter, ParseError> {
    let mut p = parser(text)?;
    let mut summands = vec![p.summand()?];
    while p.eat(Tok::Plus) {
        summands.push(p.summand()?);
    }
    p.finish()?;
    Ok(ArthurParameter::new(m, summands))
}

/// Parses a single label such as `1`, `D16` or `D24.2!nz`.
pub fn parse_label(text: &str) -> Result<CuspidalLabel, ParseError> {
    let mut p = parser(text)?;
    let label = p.label()?;
    p.finish()?;
    Ok(label)
}

pub fn format_label(label: &CuspidalLabel) -> String {
    match *label {
        CuspidalLabel::Trivial => "1".to_string(),
        CuspidalLabel::Eigenform { weight, index, central } => {
            let mut s = format!("D{weight}");
            if index > 1 || cusp_form_dimension(weight).is_some_and(|d| d > 1) {
                s.push_str(&format!(".{index}"));
            }
            s.push_str(match central {
                Central::Auto => "",
                Central::Zero => "!0",
                Central::NonZero => "!nz",
            });
            s
        }
    }
}

/// Canonical text: summands in canonical order joined by `+`.
pub fn format(psi: &ArthurParameter) -> String {
    psi.summands()
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("+")
}

/// Eigenform weights above the dimension table, whose indices were accepted
/// without a check.
pub fn untabulated_weights(psi: &ArthurParameter) -> Vec<u32> {
    let mut out: Vec<u32> = psi
        .summands()
        .iter()
        .filter_map(|s| match s.label {
            CuspidalLabel::Eigenform { weight, .. } if cusp_form_dimension(weight).is_none() => Some(weight),
            _ => None,
        })
        .collect();
    out.dedup();
    out
}
