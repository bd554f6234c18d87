//! Short-vector enumeration and Gram-representation counting.
//!
//! `r_L(S) = #{(λ1, …, λg) ∈ L^g : ((λi, λj)) = S}` is computed by
//! backtracking over tuple slots. Slot `i` ranges over the vectors of norm
//! `S[i][i]` whose inner products with the already fixed vectors match `S`.
//! Floating point is only used to propose coordinate ranges during
//! enumeration; every stored vector and every inner product is exact.

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::quadform::{is_positive_definite, GramMatrix};
use crate::reduce::lll_gram;

pub const DEFAULT_MAX_VECTORS: usize = 100_000_000;
pub const MAX_VECTORS_ENV: &str = "THETA_MAX_VECTORS";

/// First-slot vectors per shard. The shard partition depends only on the
/// input, so parallel and sequential runs add up the same partial sums.
const SHARD: usize = 8;
/// Budget (in 64-bit words) for the pairwise inner-product bitsets.
const PAIR_INDEX_WORDS: usize = 1 << 24;
/// Signed-permutation canonicalization is skipped above this degree.
const CANONICAL_MAX_DEGREE: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("more than {limit} short vectors; lower the bound or raise --max-vectors")]
    CapacityExceeded { limit: usize },
    #[error("index matrix diagonal entry {entry} exceeds the enumeration bound {bound}")]
    BoundTooSmall { entry: BigInt, bound: u64 },
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("Gram matrix entries do not fit in 64 bits")]
    EntryTooLarge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumConfig {
    pub max_vectors: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        Self {
            max_vectors: DEFAULT_MAX_VECTORS,
        }
    }
}

impl EnumConfig {
    /// Default limit, overridden by `THETA_MAX_VECTORS` when set and valid.
    pub fn from_env() -> Self {
        let max_vectors = std::env::var(MAX_VECTORS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_VECTORS);
        Self { max_vectors }
    }
}

/// All vectors of one norm, sorted lexicographically by coordinates.
#[derive(Debug, Clone)]
pub struct Bucket {
    norm: u64,
    len: usize,
    coords: Vec<i64>,
    dual: Vec<i64>,
    packed: Vec<i16>,
    dual_packed: Vec<i16>,
    /// `packed` restricted to the `half` positions.
    half_packed: Vec<i16>,
    /// Positions whose first nonzero coordinate is positive: one per ± pair.
    half: Vec<u32>,
}

impl Bucket {
    pub fn norm(&self) -> u64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn vector(&self, i: usize, dim: usize) -> &[i64] {
        &self.coords[i * dim..(i + 1) * dim]
    }
}

/// Bitsets `{w ∈ bucket b : (u, w) = c}` for every indexed vector `u`.
#[derive(Debug, Clone)]
struct PairIndex {
    words: Vec<usize>,
    /// Per `(u, b)`: (start in `bits`, radius `r`); values `c ∈ [-r, r]`.
    slots: Vec<(usize, i64)>,
    nbuckets: usize,
    bits: Vec<u64>,
}

impl PairIndex {
    fn get(&self, u: usize, b: usize, c: i64) -> Option<&[u64]> {
        let (start, r) = self.slots[u * self.nbuckets + b];
        if c.abs() > r {
            return None;
        }
        let w = self.words[b];
        let off = start + (c + r) as usize * w;
        Some(&self.bits[off..off + w])
    }
}

/// The finite slice `{v ∈ L : 0 < (v, v) ≤ bound}` of a lattice, bucketed by
/// norm, plus an optional pairwise inner-product index.
#[derive(Debug, Clone)]
pub struct ShortVectorIndex {
    dim: usize,
    bound: u64,
    gram: Vec<i64>,
    buckets: Vec<Bucket>,
    offsets: Vec<usize>,
    fast_dot: bool,
    pairs: Option<PairIndex>,
}

/// Enumerates every `v` with `0 < vᵀGv ≤ bound`.
///
/// The Gram matrix is LLL-reduced internally to keep the search tree small;
/// vectors are reported in the coordinates of the given basis.
pub fn short_vectors(gram: &GramMatrix, bound: u64, cfg: &EnumConfig) -> Result<ShortVectorIndex, EnumError> {
    let n = gram.dim();
    let g = gram.to_i64().ok_or(EnumError::EntryTooLarge)?;
    if !is_positive_definite(gram) {
        return Err(EnumError::NotPositiveDefinite);
    }
    let mut found: Vec<Vec<i64>> = Vec::new();
    if n > 0 && bound > 0 {
        let red = lll_gram(&g, n);
        let mut limit_hit = false;
        fincke_pohst(&red.gram, n, bound, |x, _| {
            if found.len() >= cfg.max_vectors {
                limit_hit = true;
                return false;
            }
            let mut v = vec![0i64; n];
            for (i, &xi) in x.iter().enumerate() {
                if xi != 0 {
                    for (vj, &t) in v.iter_mut().zip(&red.transform[i]) {
                        *vj += xi * t;
                    }
                }
            }
            found.push(v);
            true
        });
        if limit_hit {
            return Err(EnumError::CapacityExceeded { limit: cfg.max_vectors });
        }
    }
    let mut by_norm: BTreeMap<u64, Vec<Vec<i64>>> = BTreeMap::new();
    for v in found {
        let norm = exact_norm(&g, n, &v);
        assert!(norm > 0 && norm as u64 <= bound, "enumeration produced norm {norm}");
        by_norm.entry(norm as u64).or_default().push(v);
    }
    Ok(ShortVectorIndex::from_buckets(n, bound, g, by_norm))
}

fn exact_norm(g: &[i64], n: usize, v: &[i64]) -> i128 {
    let mut acc = 0i128;
    for i in 0..n {
        if v[i] == 0 {
            continue;
        }
        let mut row = 0i128;
        for j in 0..n {
            row += i128::from(g[i * n + j]) * i128::from(v[j]);
        }
        acc += i128::from(v[i]) * row;
    }
    acc
}

/// Fincke–Pohst enumeration of `xᵀGx ≤ bound` on an (ideally reduced) Gram
/// matrix. `visit` receives each candidate with exact norm in `(0, bound]`
/// and returns `false` to stop.
fn fincke_pohst(g: &[i64], n: usize, bound: u64, mut visit: impl FnMut(&[i64], u64) -> bool) {
    // Q(x) = Σ q_ii (x_i + Σ_{j>i} q_ij x_j)²
    let mut q: Vec<f64> = g.iter().map(|&x| x as f64).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            q[j * n + i] = q[i * n + j];
            q[i * n + j] /= q[i * n + i];
        }
        for k in (i + 1)..n {
            for l in k..n {
                q[k * n + l] -= q[k * n + i] * q[i * n + l];
            }
        }
    }
    let cap = bound as f64 * (1.0 + 1e-9) + 1e-6;
    let mut x = vec![0i64; n];
    let mut t = vec![0f64; n];
    let mut u = vec![0f64; n];
    let mut ub = vec![0i64; n];
    let mut i = n - 1;
    t[i] = cap;
    u[i] = 0.0;
    let bounds = |i: usize, t: &[f64], u: &[f64], x: &mut [i64], ub: &mut [i64]| {
        let z = (t[i].max(0.0) / q[i * n + i]).sqrt();
        ub[i] = (z - u[i] + 1e-9).floor() as i64;
        x[i] = (-z - u[i] - 1e-9).ceil() as i64 - 1;
    };
    bounds(i, &t, &u, &mut x, &mut ub);
    loop {
        x[i] += 1;
        if x[i] > ub[i] {
            i += 1;
            if i == n {
                return;
            }
            continue;
        }
        if i > 0 {
            let d = x[i] as f64 + u[i];
            t[i - 1] = t[i] - q[i * n + i] * d * d;
            let mut s = 0.0;
            for j in i..n {
                s += q[(i - 1) * n + j] * x[j] as f64;
            }
            u[i - 1] = s;
            i -= 1;
            bounds(i, &t, &u, &mut x, &mut ub);
            continue;
        }
        let norm = exact_norm(g, n, &x);
        if norm > 0 && norm as u64 <= bound && !visit(&x, norm as u64) {
            return;
        }
    }
}

#[inline]
fn dot16(a: &[i16], b: &[i16]) -> i64 {
    let s: i32 = a.iter().zip(b).map(|(&x, &y)| i32::from(x) * i32::from(y)).sum();
    i64::from(s)
}

#[inline]
fn dot64(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

impl ShortVectorIndex {
    fn from_buckets(dim: usize, bound: u64, gram: Vec<i64>, by_norm: BTreeMap<u64, Vec<Vec<i64>>>) -> Self {
        let mut buckets = Vec::with_capacity(by_norm.len());
        let mut max_c = 0i64;
        let mut max_d = 0i64;
        for (norm, mut vs) in by_norm {
            vs.sort();
            let len = vs.len();
            let mut coords = Vec::with_capacity(len * dim);
            let mut dual = Vec::with_capacity(len * dim);
            let mut half = Vec::new();
            for (pos, v) in vs.iter().enumerate() {
                for i in 0..dim {
                    let d: i64 = (0..dim).map(|j| gram[i * dim + j] * v[j]).sum();
                    max_d = max_d.max(d.abs());
                    dual.push(d);
                }
                max_c = max_c.max(v.iter().map(|x| x.abs()).max().unwrap_or(0));
                if v.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
                    half.push(pos as u32);
                }
                coords.extend_from_slice(v);
            }
            buckets.push(Bucket {
                norm,
                len,
                coords,
                dual,
                packed: Vec::new(),
                dual_packed: Vec::new(),
                half_packed: Vec::new(),
                half,
            });
        }
        let fast_dot = max_c <= i64::from(i16::MAX)
            && max_d <= i64::from(i16::MAX)
            && (dim as i64) * max_c * max_d < i64::from(i32::MAX);
        if fast_dot {
            for b in &mut buckets {
                b.packed = b.coords.iter().map(|&x| x as i16).collect();
                b.dual_packed = b.dual.iter().map(|&x| x as i16).collect();
                b.half_packed = b
                    .half
                    .iter()
                    .flat_map(|&p| &b.packed[p as usize * dim..(p as usize + 1) * dim])
                    .copied()
                    .collect();
            }
        }
        let mut offsets = Vec::with_capacity(buckets.len());
        let mut total = 0;
        for b in &buckets {
            offsets.push(total);
            total += b.len;
        }
        let mut idx = Self {
            dim,
            bound,
            gram,
            buckets,
            offsets,
            fast_dot,
            pairs: None,
        };
        idx.pairs = idx.build_pair_index();
        idx
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn gram(&self) -> &[i64] {
        &self.gram
    }

    pub fn buckets(&self) -> &[Bucket] {
        &self.buckets
    }

    pub fn bucket(&self, norm: u64) -> Option<&Bucket> {
        self.bucket_index(norm).map(|b| &self.buckets[b])
    }

    fn bucket_index(&self, norm: u64) -> Option<usize> {
        self.buckets.binary_search_by_key(&norm, |b| b.norm).ok()
    }

    pub fn total_vectors(&self) -> usize {
        self.buckets.iter().map(|b| b.len).sum()
    }

    pub fn has_pair_index(&self) -> bool {
        self.pairs.is_some()
    }

    /// Every vector, grouped by ascending norm and lexicographic within a norm.
    pub fn vectors(&self) -> impl Iterator<Item = (u64, &[i64])> + '_ {
        self.buckets
            .iter()
            .flat_map(move |b| (0..b.len).map(move |i| (b.norm, b.vector(i, self.dim))))
    }

    /// Number of vectors of each norm (the zero vector is not counted).
    pub fn count_by_norm(&self) -> BTreeMap<u64, usize> {
        self.buckets.iter().map(|b| (b.norm, b.len)).collect()
    }

    /// `(u, w)` for `u` at position `i` of bucket `a`, `w` at `j` of bucket `b`.
    #[inline]
    fn ip(&self, a: usize, i: usize, b: usize, j: usize) -> i64 {
        let n = self.dim;
        if self.fast_dot {
            dot16(
                &self.buckets[a].dual_packed[i * n..(i + 1) * n],
                &self.buckets[b].packed[j * n..(j + 1) * n],
            )
        } else {
            dot64(&self.buckets[a].dual[i * n..(i + 1) * n], self.buckets[b].vector(j, n))
        }
    }

    fn build_pair_index(&self) -> Option<PairIndex> {
        let nb = self.buckets.len();
        if nb == 0 {
            return None;
        }
        let words: Vec<usize> = self.buckets.iter().map(|b| b.len.div_ceil(64)).collect();
        let mut slots = Vec::new();
        let mut total = 0usize;
        for a in &self.buckets {
            for _ in 0..a.len {
                for (b, bb) in self.buckets.iter().enumerate() {
                    let r = isqrt(a.norm * bb.norm) as i64;
                    slots.push((total, r));
                    total += (2 * r as usize + 1) * words[b];
                    if total > PAIR_INDEX_WORDS {
                        return None;
                    }
                }
            }
        }
        let mut bits = vec![0u64; total];
        for a in 0..nb {
            for i in 0..self.buckets[a].len {
                let u = self.offsets[a] + i;
                for b in 0..nb {
                    let (start, r) = slots[u * nb + b];
                    for j in 0..self.buckets[b].len {
                        let c = self.ip(a, i, b, j);
                        debug_assert!(c.abs() <= r);
                        let off = start + (c + r) as usize * words[b];
                        bits[off + j / 64] |= 1u64 << (j % 64);
                    }
                }
            }
        }
        Some(PairIndex {
            words,
            slots,
            nbuckets: nb,
            bits,
        })
    }

    /// `r_L(S)` for a single index matrix.
    pub fn count_representations(&self, s: &GramMatrix) -> Result<BigUint, EnumError> {
        Ok(self.count_many(std::slice::from_ref(s))?.pop().expect("one result"))
    }

    /// `r_L(S)` for every matrix in `list`, sharing work between matrices
    /// that agree up to simultaneous permutation and sign changes of slots.
    pub fn count_many(&self, list: &[GramMatrix]) -> Result<Vec<BigUint>, EnumError> {
        let mut classes: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut class_keys: Vec<Vec<i64>> = Vec::new();
        let mut assignment: Vec<Option<usize>> = Vec::with_capacity(list.len());
        for s in list {
            match self.reduce(s)? {
                None => assignment.push(None),
                Some(key) => {
                    let next = class_keys.len();
                    let id = *classes.entry(key.clone()).or_insert(next);
                    if id == next {
                        class_keys.push(key);
                    }
                    assignment.push(Some(id));
                }
            }
        }
        let counts = self.count_classes(&class_keys);
        Ok(assignment
            .into_iter()
            .map(|a| a.map_or_else(BigUint::zero, |id| counts[id].clone()))
            .collect())
    }

    /// Drops zero-norm slots and canonicalizes. `None` means the count is 0.
    fn reduce(&self, s: &GramMatrix) -> Result<Option<Vec<i64>>, EnumError> {
        let g = s.dim();
        for i in 0..g {
            let d = s.entry(i, i);
            if let Some(x) = d.to_u64() {
                if x > self.bound {
                    return Err(EnumError::BoundTooSmall {
                        entry: d.clone(),
                        bound: self.bound,
                    });
                }
            } else if d > &BigInt::zero() {
                return Err(EnumError::BoundTooSmall {
                    entry: d.clone(),
                    bound: self.bound,
                });
            }
        }
        let mut keep = Vec::with_capacity(g);
        for i in 0..g {
            let d = s.entry(i, i);
            if d < &BigInt::zero() {
                return Ok(None);
            }
            if d.is_zero() {
                if (0..g).any(|j| !s.entry(i, j).is_zero()) {
                    return Ok(None);
                }
            } else {
                keep.push(i);
            }
        }
        let k = keep.len();
        let mut m = Vec::with_capacity(k * k);
        for &i in &keep {
            for &j in &keep {
                // entries beyond Cauchy–Schwarz cannot be realized
                match s.entry(i, j).to_i64() {
                    Some(x) if (x as i128) * (x as i128) <= (self.bound as i128).pow(2) => m.push(x),
                    _ => return Ok(None),
                }
            }
        }
        Ok(Some(canonical(&m, k)))
    }

    fn count_classes(&self, keys: &[Vec<i64>]) -> Vec<BigUint> {
        let mut out = vec![BigUint::zero(); keys.len()];
        let mut families: BTreeMap<(Vec<i64>, i64), Vec<usize>> = BTreeMap::new();
        for (id, key) in keys.iter().enumerate() {
            let k = degree_of(key);
            match k {
                0 => out[id] = BigUint::from(1u32),
                1 => {
                    out[id] = self.bucket(key[0] as u64).map_or(0usize, |b| b.len).into();
                }
                _ if self.pairs.is_some() => out[id] = self.count_with_pairs(key, k),
                _ => {
                    let prefix = leading_block(key, k, k - 1);
                    families.entry((prefix, key[k * k - 1])).or_default().push(id);
                }
            }
        }
        for ((prefix, last_norm), ids) in families {
            let k = ids.first().map(|&id| degree_of(&keys[id])).expect("nonempty family");
            let rows: Vec<Vec<i64>> = ids
                .iter()
                .map(|&id| (0..k - 1).map(|j| keys[id][j * k + k - 1]).collect())
                .collect();
            let counts = self.count_family(&prefix, k - 1, last_norm as u64, &rows);
            for (id, c) in ids.into_iter().zip(counts) {
                out[id] = c;
            }
        }
        out
    }

    /// Backtracking with bitset candidate sets; the last slot is a popcount.
    fn count_with_pairs(&self, m: &[i64], k: usize) -> BigUint {
        let pairs = self.pairs.as_ref().expect("pair index");
        let mut slot_bucket = Vec::with_capacity(k);
        for i in 0..k {
            match self.bucket_index(m[i * k + i] as u64) {
                Some(b) => slot_bucket.push(b),
                None => return BigUint::zero(),
            }
        }
        let b0 = slot_bucket[0];
        let half = &self.buckets[b0].half;
        let shards: Vec<Acc> = half
            .par_chunks(SHARD)
            .map(|chunk| {
                let mut acc = Acc::default();
                let mut cand: Vec<Vec<u64>> = slot_bucket.iter().map(|&b| vec![0u64; pairs.words[b]]).collect();
                for &p in chunk {
                    let u = self.offsets[b0] + p as usize;
                    let mut ok = true;
                    for l in 1..k {
                        match pairs.get(u, slot_bucket[l], m[l]) {
                            Some(bits) => cand[l].copy_from_slice(bits),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                    if ok {
                        self.pairs_rec(pairs, m, k, &slot_bucket, 1, &mut cand, &mut acc);
                    }
                }
                acc
            })
            .collect();
        let total = shards.into_iter().fold(BigUint::zero(), |t, a| t + a.value());
        total * 2u32
    }

    #[allow(clippy::too_many_arguments)]
    fn pairs_rec(
        &self,
        pairs: &PairIndex,
        m: &[i64],
        k: usize,
        slot_bucket: &[usize],
        level: usize,
        cand: &mut [Vec<u64>],
        acc: &mut Acc,
    ) {
        if level == k - 1 {
            acc.add(cand[level].iter().map(|w| u64::from(w.count_ones())).sum());
            return;
        }
        let b = slot_bucket[level];
        let next_b = slot_bucket[level + 1];
        let (head, tail) = cand.split_at_mut(level + 1);
        let current = &head[level];
        for (wi, &word) in current.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let j = wi * 64 + word.trailing_zeros() as usize;
                word &= word - 1;
                let u = self.offsets[b] + j;
                if level + 2 == k {
                    // fused last level
                    let Some(bits) = pairs.get(u, next_b, m[level * k + level + 1]) else {
                        continue;
                    };
                    let c: u64 = tail[0]
                        .iter()
                        .zip(bits)
                        .map(|(x, y)| u64::from((x & y).count_ones()))
                        .sum();
                    acc.add(c);
                    continue;
                }
                let mut saved: Vec<Vec<u64>> = Vec::with_capacity(k - level - 1);
                let mut ok = true;
                for (off, l) in ((level + 1)..k).enumerate() {
                    saved.push(tail[off].clone());
                    match pairs.get(u, slot_bucket[l], m[level * k + l]) {
                        Some(bits) => {
                            let mut any = false;
                            for (x, y) in tail[off].iter_mut().zip(bits) {
                                *x &= y;
                                any |= *x != 0;
                            }
                            if !any {
                                ok = false;
                            }
                        }
                        None => ok = false,
                    }
                    if !ok {
                        break;
                    }
                }
                if ok {
                    let mut whole: Vec<Vec<u64>> = head.to_vec();
                    whole.extend(tail.iter().cloned());
                    self.pairs_rec(pairs, m, k, slot_bucket, level + 1, &mut whole, acc);
                }
                for (off, s) in saved.into_iter().enumerate() {
                    tail[off] = s;
                }
            }
        }
    }

    /// Counts for every matrix `[[prefix, row], [rowᵀ, last_norm]]` at once:
    /// enumerate prefix tuples, then histogram the last slot's inner products.
    fn count_family(&self, prefix: &[i64], p: usize, last_norm: u64, rows: &[Vec<i64>]) -> Vec<BigUint> {
        let zero = || vec![BigUint::zero(); rows.len()];
        let Some(last) = self.bucket_index(last_norm) else {
            return zero();
        };
        let mut slot_bucket = Vec::with_capacity(p);
        for i in 0..p {
            match self.bucket_index(prefix[i * p + i] as u64) {
                Some(b) => slot_bucket.push(b),
                None => return zero(),
            }
        }
        let radii: Vec<i64> = slot_bucket
            .iter()
            .map(|&b| isqrt(self.buckets[b].norm * last_norm) as i64)
            .collect();
        // dense mixed-radix lookup from inner-product tuples to requested rows
        let mut table_len = 1usize;
        for &r in &radii {
            table_len = table_len.saturating_mul(2 * r as usize + 1);
        }
        let dense = table_len <= 1 << 20;
        let key_of = |row: &[i64]| -> Option<usize> {
            let mut key = 0usize;
            for (&c, &r) in row.iter().zip(&radii) {
                if c.abs() > r {
                    return None;
                }
                key = key * (2 * r as usize + 1) + (c + r) as usize;
            }
            Some(key)
        };
        let mut slot_of_key: HashMap<usize, Vec<usize>> = HashMap::new();
        for (ri, row) in rows.iter().enumerate() {
            if let Some(key) = key_of(row) {
                slot_of_key.entry(key).or_default().push(ri);
            }
        }
        if slot_of_key.is_empty() {
            return zero();
        }
        let mut wanted = vec![false; if dense { table_len } else { 0 }];
        if dense {
            for &key in slot_of_key.keys() {
                wanted[key] = true;
            }
        }
        let b0 = slot_bucket[0];
        let half = &self.buckets[b0].half;
        let shard_counts: Vec<Vec<Acc>> = half
            .par_chunks(SHARD)
            .map(|chunk| {
                let mut hist = if dense { vec![0u64; table_len] } else { Vec::new() };
                let mut ips = Vec::new();
                let mut sparse: HashMap<usize, u64> = HashMap::new();
                let mut accs = vec![Acc::default(); rows.len()];
                let mut fixed = vec![(0usize, 0usize); p];
                for &pos in chunk {
                    fixed[0] = (b0, pos as usize);
                    self.family_rec(prefix, p, &slot_bucket, 1, &mut fixed, &mut |fixed: &[(
                        usize,
                        usize,
                    )]| {
                        let (b0, i0) = fixed[0];
                        let r0 = radii[0];
                        if p == 1 {
                            // w and -w have opposite inner products, so
                            // half the bucket determines the histogram
                            let mut h = vec![0u64; 2 * r0 as usize + 1];
                            self.histogram_with_half(b0, i0, last, r0, &mut h, &mut ips);
                            for (key, slots) in &slot_of_key {
                                let c = h[*key] + h[2 * r0 as usize - *key];
                                for &s in slots {
                                    accs[s].add(c);
                                }
                            }
                            return;
                        }
                        self.ips_with_bucket(b0, i0, last, &mut ips);
                        'w: for (j, &c0) in ips.iter().enumerate() {
                            if c0.abs() > r0 {
                                continue;
                            }
                            let mut key = (c0 + r0) as usize;
                            for (t, &(b, i)) in fixed.iter().enumerate().skip(1) {
                                let c = self.ip(b, i, last, j);
                                let r = radii[t];
                                if c.abs() > r {
                                    continue 'w;
                                }
                                key = key * (2 * r as usize + 1) + (c + r) as usize;
                            }
                            if dense {
                                if wanted[key] {
                                    hist[key] += 1;
                                }
                            } else if slot_of_key.contains_key(&key) {
                                *sparse.entry(key).or_insert(0) += 1;
                            }
                        }
                        for (key, slots) in &slot_of_key {
                            let c = if dense {
                                std::mem::take(&mut hist[*key])
                            } else {
                                sparse.remove(key).unwrap_or(0)
                            };
                            for &s in slots {
                                accs[s].add(c);
                            }
                        }
                    });
                }
                accs
            })
            .collect();
        let mut totals = zero();
        for shard in shard_counts {
            for (t, a) in totals.iter_mut().zip(shard) {
                *t += a.value();
            }
        }
        totals.into_iter().map(|t| t * 2u32).collect()
    }

    fn family_rec(
        &self,
        prefix: &[i64],
        p: usize,
        slot_bucket: &[usize],
        level: usize,
        fixed: &mut [(usize, usize)],
        leaf: &mut dyn FnMut(&[(usize, usize)]),
    ) {
        if level == p {
            leaf(fixed);
            return;
        }
        let b = slot_bucket[level];
        let (f0, i0) = fixed[0];
        let mut ips = Vec::new();
        self.ips_with_bucket(f0, i0, b, &mut ips);
        'cand: for (j, &c0) in ips.iter().enumerate() {
            if c0 != prefix[level] {
                continue;
            }
            for (t, &(fb, fi)) in fixed[..level].iter().enumerate().skip(1) {
                if self.ip(fb, fi, b, j) != prefix[t * p + level] {
                    continue 'cand;
                }
            }
            fixed[level] = (b, j);
            self.family_rec(prefix, p, slot_bucket, level + 1, fixed, leaf);
        }
    }

    /// Histogram over `c + r` of the inner products of vector `i` of bucket
    /// `a` with the half list of bucket `b`.
    fn histogram_with_half(&self, a: usize, i: usize, b: usize, r: i64, h: &mut [u64], scratch: &mut Vec<i64>) {
        let n = self.dim;
        if self.fast_dot {
            let u = &self.buckets[a].dual_packed[i * n..(i + 1) * n];
            let packed = &self.buckets[b].half_packed;
            match n {
                8 => return hist16::<8>(u, packed, r, h),
                16 => return hist16::<16>(u, packed, r, h),
                24 => return hist16::<24>(u, packed, r, h),
                32 => return hist16::<32>(u, packed, r, h),
                _ => {}
            }
        }
        self.ips_with_half(a, i, b, scratch);
        for &c in scratch.iter() {
            h[(c + r) as usize] += 1;
        }
    }

    /// Like `ips_with_bucket`, restricted to the half list of bucket `b`.
    fn ips_with_half(&self, a: usize, i: usize, b: usize, out: &mut Vec<i64>) {
        let n = self.dim;
        out.clear();
        let bb = &self.buckets[b];
        if self.fast_dot {
            let u = &self.buckets[a].dual_packed[i * n..(i + 1) * n];
            let packed = &bb.half_packed;
            match n {
                8 => dots16::<8>(u, packed, out),
                16 => dots16::<16>(u, packed, out),
                24 => dots16::<24>(u, packed, out),
                32 => dots16::<32>(u, packed, out),
                _ => out.extend(packed.chunks_exact(n).map(|w| dot16(u, w))),
            }
        } else {
            let u = &self.buckets[a].dual[i * n..(i + 1) * n];
            out.extend(bb.half.iter().map(|&p| dot64(u, bb.vector(p as usize, n))));
        }
    }

    /// Inner products of vector `i` of bucket `a` with every vector of bucket `b`.
    fn ips_with_bucket(&self, a: usize, i: usize, b: usize, out: &mut Vec<i64>) {
        let n = self.dim;
        out.clear();
        if self.fast_dot {
            let u = &self.buckets[a].dual_packed[i * n..(i + 1) * n];
            let packed = &self.buckets[b].packed;
            match n {
                8 => dots16::<8>(u, packed, out),
                16 => dots16::<16>(u, packed, out),
                24 => dots16::<24>(u, packed, out),
                32 => dots16::<32>(u, packed, out),
                _ => out.extend(packed.chunks_exact(n).map(|w| dot16(u, w))),
            }
        } else {
            let u = &self.buckets[a].dual[i * n..(i + 1) * n];
            out.extend(self.buckets[b].coords.chunks_exact(n).map(|w| dot64(u, w)));
        }
    }
}

/// Fixed-width kernel so the compiler can unroll and vectorize the dot products.
fn dots16<const N: usize>(u: &[i16], packed: &[i16], out: &mut Vec<i64>) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime.
            unsafe { dots16_avx2::<N>(u, packed, out) };
            return;
        }
    }
    dots16_portable::<N>(u, packed, out);
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn dots16_avx2<const N: usize>(u: &[i16], packed: &[i16], out: &mut Vec<i64>) {
    dots16_portable::<N>(u, packed, out);
}

#[inline(always)]
fn dots16_portable<const N: usize>(u: &[i16], packed: &[i16], out: &mut Vec<i64>) {
    let u: &[i16; N] = u.try_into().expect("dimension matches");
    out.extend(packed.chunks_exact(N).map(|w| {
        let w: &[i16; N] = w.try_into().expect("dimension matches");
        let mut s = 0i32;
        // packing checked that the sum fits; a checked add would block vectorization
        for k in 0..N {
            s = s.wrapping_add(i32::from(u[k]) * i32::from(w[k]));
        }
        i64::from(s)
    }));
}

/// `dots16` fused with the histogram, so no inner product is stored.
fn hist16<const N: usize>(u: &[i16], packed: &[i16], r: i64, h: &mut [u64]) {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime.
            unsafe { hist16_avx2::<N>(u, packed, r, h) };
            return;
        }
    }
    hist16_portable::<N>(u, packed, r, h);
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn hist16_avx2<const N: usize>(u: &[i16], packed: &[i16], r: i64, h: &mut [u64]) {
    hist16_portable::<N>(u, packed, r, h);
}

#[inline(always)]
fn hist16_portable<const N: usize>(u: &[i16], packed: &[i16], r: i64, h: &mut [u64]) {
    let u: &[i16; N] = u.try_into().expect("dimension matches");
    let r = r as i32;
    for w in packed.chunks_exact(N) {
        let w: &[i16; N] = w.try_into().expect("dimension matches");
        let mut s = 0i32;
        for k in 0..N {
            s = s.wrapping_add(i32::from(u[k]) * i32::from(w[k]));
        }
        h[(s + r) as usize] += 1;
    }
}

/// `u128` tally that spills into a `BigUint`, so counts never wrap.
#[derive(Debug, Clone, Default)]
struct Acc {
    small: u128,
    big: BigUint,
}

impl Acc {
    #[inline]
    fn add(&mut self, x: u64) {
        match self.small.checked_add(u128::from(x)) {
            Some(v) => self.small = v,
            None => {
                self.big += self.small;
                self.small = u128::from(x);
            }
        }
    }

    fn value(self) -> BigUint {
        self.big + self.small
    }
}

pub(crate) fn isqrt(x: u64) -> u64 {
    let mut r = (x as f64).sqrt() as u64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

fn degree_of(key: &[i64]) -> usize {
    isqrt(key.len() as u64) as usize
}

fn leading_block(m: &[i64], k: usize, p: usize) -> Vec<i64> {
    let mut out = Vec::with_capacity(p * p);
    for i in 0..p {
        out.extend_from_slice(&m[i * k..i * k + p]);
    }
    out
}

/// Representative of `m` under simultaneous slot permutations and sign
/// changes, maximizing the upper triangle read column by column. Large
/// leading off-diagonal entries put tightly constrained slots first.
fn canonical(m: &[i64], k: usize) -> Vec<i64> {
    if k <= 1 || k > CANONICAL_MAX_DEGREE {
        return m.to_vec();
    }
    let order: Vec<(usize, usize)> = (0..k).flat_map(|j| (0..=j).map(move |i| (i, j))).collect();
    let mut best: Option<Vec<i64>> = None;
    let mut perm: Vec<usize> = (0..k).collect();
    permutations(&mut perm, 0, &mut |perm| {
        for mask in 0u32..(1 << (k - 1)) {
            let sign = |i: usize| if i > 0 && mask & (1 << (i - 1)) != 0 { -1 } else { 1 };
            let key: Vec<i64> = order
                .iter()
                .map(|&(i, j)| sign(i) * sign(j) * m[perm[i] * k + perm[j]])
                .collect();
            if best.as_ref().is_none_or(|b| key > *b) {
                best = Some(key);
            }
        }
    });
    let key = best.expect("k >= 2");
    let mut out = vec![0i64; k * k];
    for (&(i, j), &v) in order.iter().zip(&key) {
        out[i * k + j] = v;
        out[j * k + i] = v;
    }
    out
}

fn permutations(p: &mut [usize], start: usize, f: &mut dyn FnMut(&[usize])) {
    if start == p.len() {
        f(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permutations(p, start + 1, f);
        p.swap(start, i);
    }
}
