//! Exact integer and rational linear algebra on Gram matrices.
//!
//! Everything here is exact. Determinants and ranks use fraction-free
//! (Bareiss) elimination over arbitrary-precision integers; factorizations
//! use arbitrary-precision rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuadformError {
    #[error("matrix is not square: row {row} has {len} entries, expected {dim}")]
    NotSquare { row: usize, len: usize, dim: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("matrix is not positive definite (pivot {pivot} is not positive)")]
    NotPositiveDefinite { pivot: usize },
    #[error("cannot parse Gram matrix: {0}")]
    Parse(String),
}

/// A symmetric square matrix of arbitrary-precision integers.
///
/// Used both for lattice Gram forms and for the index `S = ((λi, λj))` of a
/// theta coefficient. Symmetry is checked on construction; the `0 × 0`
/// matrix is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GramMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl GramMatrix {
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self, QuadformError> {
        let dim = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(QuadformError::NotSquare { row, len: r.len(), dim });
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if rows[i][j] != rows[j][i] {
                    return Err(QuadformError::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, QuadformError> {
        Self::new(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// Builds from a row-major slice without a symmetry check. Callers
    /// guarantee symmetry (used for matrices produced by `U G Uᵀ`).
    pub(crate) fn from_row_major_unchecked(dim: usize, entries: Vec<BigInt>) -> Self {
        debug_assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    pub fn empty() -> Self {
        Self {
            dim: 0,
            entries: Vec::new(),
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![BigInt::zero(); dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn row_major(&self) -> &[BigInt] {
        &self.entries
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.dim).map(|i| self.entry(i, i).clone()).collect()
    }

    /// All diagonal entries even.
    pub fn is_even(&self) -> bool {
        (0..self.dim).all(|i| (self.entry(i, i) % 2u32).is_zero())
    }

    /// Row-major entries as `i64`, or `None` if any entry does not fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(|x| x.to_i64()).collect()
    }

    /// The Gram matrix of the basis whose rows (in current coordinates) are
    /// the rows of `u`, i.e. `u · G · uᵀ`.
    pub fn transformed(&self, u: &[Vec<i64>]) -> GramMatrix {
        let n = self.dim;
        assert!(u.iter().all(|r| r.len() == n), "transform width must equal dim");
        let k = u.len();
        let mut ug = vec![BigInt::zero(); k * n];
        for a in 0..k {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for i in 0..n {
                    if u[a][i] != 0 {
                        acc += self.entry(i, j) * u[a][i];
                    }
                }
                ug[a * n + j] = acc;
            }
        }
        let mut out = vec![BigInt::zero(); k * k];
        for a in 0..k {
            for b in a..k {
                let mut acc = BigInt::zero();
                for j in 0..n {
                    if u[b][j] != 0 {
                        acc += &ug[a * n + j] * u[b][j];
                    }
                }
                out[b * k + a] = acc.clone();
                out[a * k + b] = acc;
            }
        }
        GramMatrix::from_row_major_unchecked(k, out)
    }

    pub fn direct_sum(&self, other: &GramMatrix) -> GramMatrix {
        let n = self.dim + other.dim;
        let mut e = vec![BigInt::zero(); n * n];
        for i in 0..self.dim {
            for j in 0..self.dim {
                e[i * n + j] = self.entry(i, j).clone();
            }
        }
        for i in 0..other.dim {
            for j in 0..other.dim {
                e[(i + self.dim) * n + j + self.dim] = other.entry(i, j).clone();
            }
        }
        GramMatrix::from_row_major_unchecked(n, e)
    }

    /// Principal submatrix on the given index list (in that order).
    pub fn principal(&self, idx: &[usize]) -> GramMatrix {
        let k = idx.len();
        let mut e = Vec::with_capacity(k * k);
        for &i in idx {
            for &j in idx {
                e.push(self.entry(i, j).clone());
            }
        }
        GramMatrix::from_row_major_unchecked(k, e)
    }

    pub fn determinant(&self) -> BigInt {
        bareiss_determinant(self.rows())
    }
}

/// `[a,b;c,d]` with `[]` for the empty matrix. Row-major, no whitespace,
/// so the text is usable as a TSV column header.
impl fmt::Display for GramMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.dim {
            if i > 0 {
                f.write_str(";")?;
            }
            for j in 0..self.dim {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
        }
        f.write_str("]")
    }
}

impl FromStr for GramMatrix {
    type Err = QuadformError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let inner = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| QuadformError::Parse(format!("expected [..], got {s:?}")))?;
        if inner.trim().is_empty() {
            return Ok(GramMatrix::empty());
        }
        let rows = inner
            .split(';')
            .map(|r| {
                r.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<BigInt>()
                            .map_err(|e| QuadformError::Parse(format!("{x:?}: {e}")))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        GramMatrix::new(rows)
    }
}

/// Exact `L · D · Lᵀ` factorization of a positive-definite matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalCholesky {
    pub diag: Vec<BigRational>,
    /// Lower unitriangular, row-major as nested rows.
    pub lower: Vec<Vec<BigRational>>,
}

impl RationalCholesky {
    pub fn reconstruct(&self) -> Vec<Vec<BigRational>> {
        let n = self.diag.len();
        let mut out = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for k in 0..=i.min(j) {
                    acc += &self.lower[i][k] * &self.diag[k] * &self.lower[j][k];
                }
                out[i][j] = acc;
            }
        }
        out
    }
}

fn rational(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}

pub fn rational_cholesky(g: &GramMatrix) -> Result<RationalCholesky, QuadformError> {
    let n = g.dim();
    let mut lower = vec![vec![BigRational::zero(); n]; n];
    let mut diag: Vec<BigRational> = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = rational(g.entry(j, j));
        for k in 0..j {
            d -= &lower[j][k] * &lower[j][k] * &diag[k];
        }
        if !d.is_positive() {
            return Err(QuadformError::NotPositiveDefinite { pivot: j });
        }
        lower[j][j] = BigRational::one();
        for i in (j + 1)..n {
            let mut acc = rational(g.entry(i, j));
            for k in 0..j {
                acc -= &lower[i][k] * &lower[j][k] * &diag[k];
            }
            lower[i][j] = acc / &d;
        }
        diag.push(d);
    }
    Ok(RationalCholesky { diag, lower })
}

pub fn is_positive_definite(g: &GramMatrix) -> bool {
    rational_cholesky(g).is_ok()
}

/// PSD test by symmetric-pivoting `LDLᵀ`: a zero pivot is allowed only when
/// its whole remaining row is zero.
pub fn is_positive_semidefinite(g: &GramMatrix) -> bool {
    let mut a: Vec<Vec<BigRational>> = g.rows().iter().map(|r| r.iter().map(rational).collect()).collect();
    let mut active: Vec<usize> = (0..g.dim()).collect();
    loop {
        if active.iter().any(|&i| a[i][i].is_negative()) {
            return false;
        }
        let Some(pos) = active.iter().position(|&i| a[i][i].is_positive()) else {
            return active.iter().all(|&i| active.iter().all(|&j| a[i][j].is_zero()));
        };
        let p = active.remove(pos);
        let pivot = a[p][p].clone();
        for &i in &active {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &pivot;
            for &j in &active {
                let delta = &f * &a[p][j];
                a[i][j] -= delta;
            }
        }
    }
}

/// Positive definite, determinant exactly 1, even diagonal.
pub fn is_even_unimodular(g: &GramMatrix) -> bool {
    g.is_even() && is_positive_definite(g) && g.determinant().is_one()
}

/// Fraction-free determinant of a square matrix.
pub(crate) fn bareiss_determinant(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Rank over ℚ of a rectangular integer matrix, by fraction-free
/// elimination. Rows may have any common length; an empty matrix has rank 0.
pub fn exact_rank(rows: &[Vec<BigInt>]) -> usize {
    let nrows = rows.len();
    let Some(ncols) = rows.first().map(Vec::len) else {
        return 0;
    };
    assert!(rows.iter().all(|r| r.len() == ncols), "ragged matrix");
    let mut a = rows.to_vec();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for col in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in (rank + 1)..nrows {
            for j in (col + 1)..ncols {
                let v = (&a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

pub fn exact_rank_i64<R: AsRef<[i64]>>(rows: &[R]) -> usize {
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    exact_rank(&big)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cartan_matrix, RootFamily};
    use proptest::prelude::*;

    fn gm(rows: &[&[i64]]) -> GramMatrix {
        GramMatrix::from_i64_rows(rows).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Naive Gaussian elimination over ℚ, kept independent of the Bareiss path.
    fn naive_rank(rows: &[Vec<i64>]) -> usize {
        let mut a: Vec<Vec<BigRational>> = rows.iter().map(|r| r.iter().map(|&x| q(x, 1)).collect()).collect();
        let mut rank = 0;
        let ncols = a.first().map_or(0, Vec::len);
        for c in 0..ncols {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            let pivot_row = a[rank].clone();
            for r in 0..a.len() {
                if r != rank && !a[r][c].is_zero() {
                    let f = &a[r][c] / &pivot_row[c];
                    for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                        *x -= &f * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn rejects_non_symmetric() {
        assert_eq!(
            GramMatrix::from_i64_rows(&[[2, 1], [0, 2]]),
            Err(QuadformError::NotSymmetric { i: 0, j: 1 })
        );
        assert!(matches!(
            GramMatrix::from_i64_rows(&[vec![2, 1], vec![1]]),
            Err(QuadformError::NotSquare { .. })
        ));
    }

    #[test]
    fn e8_is_even_unimodular() {
        let e8 = cartan_matrix(RootFamily::E, 8).unwrap();
        assert_eq!(e8.determinant(), BigInt::one());
        assert!(is_even_unimodular(&e8));
        let chol = rational_cholesky(&e8).unwrap();
        assert!(chol.diag.iter().all(|d| d.is_positive()));
    }

    #[test]
    fn small_determinants() {
        assert!(!is_even_unimodular(&gm(&[&[2]])));
        assert_eq!(gm(&[&[2]]).determinant(), BigInt::from(2));
        assert_eq!(gm(&[&[2, 1], &[1, 2]]).determinant(), BigInt::from(3));
        assert!(is_even_unimodular(&GramMatrix::empty()));
    }

    #[test]
    fn cholesky_hand_values() {
        let c = rational_cholesky(&gm(&[&[2]])).unwrap();
        assert_eq!(c.diag, vec![q(2, 1)]);
        assert_eq!(c.lower, vec![vec![q(1, 1)]]);
        let c = rational_cholesky(&gm(&[&[2, 1], &[1, 2]])).unwrap();
        assert_eq!(c.diag, vec![q(2, 1), q(3, 2)]);
        assert_eq!(c.lower[1][0], q(1, 2));
        assert_eq!(
            rational_cholesky(&gm(&[&[2, 3], &[3, 2]])),
            Err(QuadformError::NotPositiveDefinite { pivot: 1 })
        );
        assert_eq!(
            rational_cholesky(&gm(&[&[0]])),
            Err(QuadformError::NotPositiveDefinite { pivot: 0 })
        );
    }

    #[test]
    fn psd_examples() {
        assert!(is_positive_semidefinite(&gm(&[&[2, 2], &[2, 2]])));
        assert!(!is_positive_semidefinite(&gm(&[&[2, 3], &[3, 2]])));
        assert!(is_positive_semidefinite(&gm(&[&[0, 0], &[0, 0]])));
        assert!(!is_positive_semidefinite(&gm(&[&[0, 1], &[1, 0]])));
        assert!(!is_positive_semidefinite(&gm(&[&[0, 0], &[0, -2]])));
        assert!(is_positive_semidefinite(&GramMatrix::empty()));
        // rank-2 PSD 3x3: Gram of (1,0),(0,1),(1,1) scaled by 2
        assert!(is_positive_semidefinite(&gm(&[&[2, 0, 2], &[0, 2, 2], &[2, 2, 4]])));
        assert!(!is_positive_semidefinite(&gm(&[&[2, 0, 2], &[0, 2, 2], &[2, 2, 3]])));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(exact_rank_i64(&[[1, 0, 0], [0, 1, 0], [0, 0, 1]]), 3);
        assert_eq!(exact_rank_i64(&[[1, 2, 3, 4, 5], [1, 2, 3, 4, 5]]), 1);
        assert_eq!(exact_rank(&[]), 0);
        assert_eq!(exact_rank_i64(&[[0, 0], [0, 0]]), 0);
        assert_eq!(exact_rank_i64(&[[0, 1, 2], [0, 2, 4], [1, 0, 0]]), 2);
    }

    #[test]
    fn display_round_trip() {
        let g = gm(&[&[2, -1], &[-1, 2]]);
        assert_eq!(g.to_string(), "[2,-1;-1,2]");
        assert_eq!(g.to_string().parse::<GramMatrix>().unwrap(), g);
        assert_eq!(GramMatrix::empty().to_string(), "[]");
        assert_eq!("[]".parse::<GramMatrix>().unwrap(), GramMatrix::empty());
    }

    fn small_matrix() -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec(proptest::collection::vec(-9i64..=9, 6), 6)
    }

    /// Random unimodular matrix as a product of elementary operations.
    fn unimodular(n: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
        proptest::collection::vec((0..n, 0..n, -2i64..=2, any::<bool>()), 0..24).prop_map(move |ops| {
            let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
            for (i, j, c, swap) in ops {
                if swap {
                    u.swap(i, j);
                } else if i != j {
                    for k in 0..n {
                        u[i][k] += c * u[j][k];
                    }
                }
            }
            u
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn rank_matches_naive(m in small_matrix()) {
            prop_assert_eq!(exact_rank_i64(&m), naive_rank(&m));
        }

        #[test]
        fn bareiss_det_matches_cholesky(m in small_matrix()) {
            // AᵀA is PSD; when positive definite the pivot product is the determinant.
            let n = m.len();
            let rows: Vec<Vec<i64>> = (0..n)
                .map(|i| (0..n).map(|j| (0..n).map(|k| m[k][i] * m[k][j]).sum()).collect())
                .collect();
            let g = GramMatrix::from_i64_rows(&rows).unwrap();
            prop_assert!(is_positive_semidefinite(&g));
            if let Ok(c) = rational_cholesky(&g) {
                let prod = c.diag.iter().fold(BigRational::one(), |a, d| a * d);
                prop_assert_eq!(prod, BigRational::from_integer(g.determinant()));
                let rec = c.reconstruct();
                for i in 0..n {
                    for j in 0..n {
                        prop_assert_eq!(&rec[i][j], &rational(g.entry(i, j)));
                    }
                }
            } else {
                prop_assert!(g.determinant().is_zero());
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn even_unimodular_is_basis_invariant(u in unimodular(8)) {
            let e8 = cartan_matrix(RootFamily::E, 8).unwrap();
            let g = e8.transformed(&u);
            prop_assert!(is_even_unimodular(&g));
            let d4 = cartan_matrix(RootFamily::D, 4).unwrap();
            let u4: Vec<Vec<i64>> = u.iter().take(4).map(|r| r[..4].to_vec()).collect();
            if exact_rank_i64(&u4) == 4 && bareiss_determinant(
                u4.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
            ).abs().is_one() {
                prop_assert!(!is_even_unimodular(&d4.transformed(&u4)));
            }
        }
    }
}
