//! Windows of the degree-g theta map: tables of `r_L(S)` over a set of
//! lattices and index matrices `S`, their exact rank, and the first index
//! where two lattices disagree.
//!
//! Counts are stored unnormalized. Dividing a row by `|Aut(L)|` is a positive
//! rescaling and cannot change the rank. A rank deficit inside a finite
//! window is evidence of a kernel element, never a proof.

use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use thiserror::Error;

use crate::catalog::Lattice;
use crate::enumerate::{short_vectors, EnumConfig, EnumError};
use crate::quadform::{exact_rank, is_positive_semidefinite, GramMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThetaError {
    #[error("lattices have different ranks: {first} has {a}, {other} has {b}")]
    RankMismatch {
        first: String,
        a: usize,
        other: String,
        b: usize,
    },
    #[error("the index bound must be even, got {0}")]
    OddBound(u64),
    #[error(transparent)]
    Enumeration(#[from] EnumError),
}

/// All even symmetric PSD `g×g` matrices with diagonal in `{0, 2, …, bound}`.
///
/// Order: lexicographic on the diagonal, then on the strict upper triangle
/// read row by row, each entry ascending. Off-diagonal entries obey
/// Cauchy–Schwarz, singular matrices included.
pub fn enumerate_index_matrices(g: usize, bound: u64) -> Vec<GramMatrix> {
    let levels: Vec<i64> = (0..=bound / 2).map(|k| 2 * k as i64).collect();
    let mut out = Vec::new();
    let mut diag = vec![0i64; g];
    let positions: Vec<(usize, usize)> = (0..g).flat_map(|i| ((i + 1)..g).map(move |j| (i, j))).collect();
    fill_diagonal(&levels, &mut diag, 0, &mut |diag| {
        let mut m = vec![0i64; g * g];
        for (i, &d) in diag.iter().enumerate() {
            m[i * g + i] = d;
        }
        fill_off_diagonal(&mut m, g, &positions, 0, &mut out);
    });
    out
}

fn fill_diagonal(levels: &[i64], diag: &mut [i64], i: usize, f: &mut dyn FnMut(&[i64])) {
    if i == diag.len() {
        f(diag);
        return;
    }
    for &v in levels {
        diag[i] = v;
        fill_diagonal(levels, diag, i + 1, f);
    }
}

fn fill_off_diagonal(m: &mut [i64], g: usize, positions: &[(usize, usize)], k: usize, out: &mut Vec<GramMatrix>) {
    if k == positions.len() {
        let s = GramMatrix::from_row_major_unchecked(g, m.iter().map(|&x| BigInt::from(x)).collect());
        if is_positive_semidefinite(&s) {
            out.push(s);
        }
        return;
    }
    let (i, j) = positions[k];
    let limit = crate::enumerate::isqrt((m[i * g + i] * m[j * g + j]) as u64) as i64;
    for c in -limit..=limit {
        m[i * g + j] = c;
        m[j * g + i] = c;
        fill_off_diagonal(m, g, positions, k + 1, out);
    }
    m[i * g + j] = 0;
    m[j * g + i] = 0;
}

/// Representation counts `counts[i][j] = r_{Lᵢ}(Sⱼ)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaTable {
    pub lattices: Vec<String>,
    pub columns: Vec<GramMatrix>,
    pub counts: Vec<Vec<BigUint>>,
}

impl ThetaTable {
    pub fn rank(&self) -> usize {
        let rows: Vec<Vec<BigInt>> = self
            .counts
            .iter()
            .map(|r| r.iter().map(|x| BigInt::from(x.clone())).collect())
            .collect();
        exact_rank(&rows)
    }

    /// Tab-separated table: a header of serialized index matrices, then one
    /// row of counts per lattice.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("lattice");
        for s in &self.columns {
            write!(out, "\t{s}").unwrap();
        }
        out.push('\n');
        for (name, row) in self.lattices.iter().zip(&self.counts) {
            out.push_str(name);
            for c in row {
                write!(out, "\t{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

fn check_ranks(lattices: &[&Lattice]) -> Result<(), ThetaError> {
    if let Some(first) = lattices.first() {
        for l in &lattices[1..] {
            if l.rank() != first.rank() {
                return Err(ThetaError::RankMismatch {
                    first: first.name().to_string(),
                    a: first.rank(),
                    other: l.name().to_string(),
                    b: l.rank(),
                });
            }
        }
    }
    Ok(())
}

/// Counts for the given columns; one short-vector index per lattice.
pub fn theta_table_for(
    lattices: &[&Lattice],
    columns: Vec<GramMatrix>,
    bound: u64,
    cfg: &EnumConfig,
) -> Result<ThetaTable, ThetaError> {
    if bound % 2 == 1 {
        return Err(ThetaError::OddBound(bound));
    }
    check_ranks(lattices)?;
    let mut counts = Vec::with_capacity(lattices.len());
    for lat in lattices {
        let idx = short_vectors(lat.gram(), bound, cfg)?;
        counts.push(idx.count_many(&columns)?);
    }
    Ok(ThetaTable {
        lattices: lattices.iter().map(|l| l.name().to_string()).collect(),
        columns,
        counts,
    })
}

pub fn theta_table(lattices: &[&Lattice], g: usize, bound: u64, cfg: &EnumConfig) -> Result<ThetaTable, ThetaError> {
    theta_table_for(lattices, enumerate_index_matrices(g, bound), bound, cfg)
}

/// Exact rank of the table window; a lower bound for the rank of the theta map.
pub fn theta_rank(lattices: &[&Lattice], g: usize, bound: u64, cfg: &EnumConfig) -> Result<usize, ThetaError> {
    Ok(theta_table(lattices, g, bound, cfg)?.rank())
}

/// A column where two lattices' coefficients differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Difference {
    pub index: GramMatrix,
    pub first: BigUint,
    pub second: BigUint,
}

/// The first index matrix (in enumeration order) with `r_{L1}(S) ≠ r_{L2}(S)`.
pub fn first_difference(
    l1: &Lattice,
    l2: &Lattice,
    g: usize,
    bound: u64,
    cfg: &EnumConfig,
) -> Result<Option<Difference>, ThetaError> {
    let table = theta_table(&[l1, l2], g, bound, cfg)?;
    Ok(table
        .columns
        .iter()
        .zip(table.counts[0].iter().zip(&table.counts[1]))
        .find(|(_, (a, b))| a != b)
        .map(|(s, (a, b))| Difference {
            index: s.clone(),
            first: a.clone(),
            second: b.clone(),
        }))
}
