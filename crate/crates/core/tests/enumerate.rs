//! Enumeration and counting checked against brute force in an independent
//! model of E8: vectors of D8 together with D8 + (1/2, …, 1/2), with the
//! ordinary dot product (all coordinates doubled to stay integral).

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use proptest::prelude::*;
use thetagenus::catalog::{cartan_matrix, RootFamily};
use thetagenus::{builtin, enumerate_index_matrices, short_vectors, EnumConfig, GramMatrix};

/// Doubled coordinates of all E8 vectors of norm ≤ 4 in the even coordinate model.
fn e8_model_vectors() -> Vec<[i32; 8]> {
    let mut out = Vec::new();
    // integral part: entries in [-2, 2], even coordinate sum
    let mut x = [0i32; 8];
    fn rec(i: usize, x: &mut [i32; 8], vals: &[i32], out: &mut Vec<[i32; 8]>) {
        if i == 8 {
            let sum: i32 = x.iter().sum();
            let norm4: i32 = x.iter().map(|v| v * v).sum(); // 4·norm
                                                            // the coordinate sum is even in both the integral and the half-integral coset
            let sum_ok = (sum / 2) % 2 == 0;
            if norm4 > 0 && norm4 <= 16 && sum_ok {
                out.push(*x);
            }
            return;
        }
        for &v in vals {
            x[i] = v;
            rec(i + 1, x, vals, out);
        }
    }
    rec(0, &mut x, &[-4, -2, 0, 2, 4], &mut out);
    rec(0, &mut x, &[-3, -1, 1, 3], &mut out);
    out
}

fn model_norm(v: &[i32; 8]) -> i32 {
    v.iter().map(|x| x * x).sum::<i32>() / 4
}

fn model_ip(v: &[i32; 8], w: &[i32; 8]) -> i32 {
    v.iter().zip(w).map(|(a, b)| a * b).sum::<i32>() / 4
}

fn e8_cartan() -> GramMatrix {
    cartan_matrix(RootFamily::E, 8).unwrap()
}

#[test]
fn e8_counts_match_brute_force() {
    let model = e8_model_vectors();
    let mut oracle = BTreeMap::new();
    for v in &model {
        *oracle.entry(model_norm(v) as u64).or_insert(0usize) += 1;
    }
    assert_eq!(oracle, BTreeMap::from([(2, 240), (4, 2160)]));
    let idx = short_vectors(&e8_cartan(), 4, &EnumConfig::default()).unwrap();
    assert_eq!(idx.count_by_norm(), oracle);
    for b in idx.buckets() {
        assert_eq!(b.len() % 2, 0);
    }
    // exact norms and lexicographic order within each bucket
    let g = idx.gram().to_vec();
    let mut prev: Option<(u64, Vec<i64>)> = None;
    for (norm, v) in idx.vectors() {
        let q: i64 = (0..8)
            .map(|i| (0..8).map(|j| v[i] * g[i * 8 + j] * v[j]).sum::<i64>())
            .sum();
        assert_eq!(q as u64, norm);
        if let Some((pn, pv)) = &prev {
            assert!(*pn < norm || (*pn == norm && pv.as_slice() < v));
        }
        prev = Some((norm, v.to_vec()));
    }
}

#[test]
fn e8_root_pairs() {
    let model = e8_model_vectors();
    let roots: Vec<_> = model.iter().filter(|v| model_norm(v) == 2).collect();
    for v in &roots {
        assert_eq!(roots.iter().filter(|w| model_ip(v, w) == 1).count(), 56);
    }
    let idx = short_vectors(&e8_cartan(), 2, &EnumConfig::default()).unwrap();
    let s: GramMatrix = "[2,1;1,2]".parse().unwrap();
    assert_eq!(idx.count_representations(&s).unwrap(), BigUint::from(13440u32));
}

/// Histogram of Gram matrices of all `k`-tuples from `vectors` (zero included).
fn tuple_histogram(vectors: &[[i32; 8]], k: usize) -> HashMap<Vec<i64>, u64> {
    let mut hist = HashMap::new();
    let mut idx = vec![0usize; k];
    loop {
        let key: Vec<i64> = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| model_ip(&vectors[idx[i]], &vectors[idx[j]]) as i64)
            .collect();
        *hist.entry(key).or_insert(0) += 1;
        let mut pos = 0;
        loop {
            if pos == k {
                return hist;
            }
            idx[pos] += 1;
            if idx[pos] < vectors.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Every S of size ≤ 2 at bound 4 and of size 3 at bound 2, against nested
/// loops over the model.
#[test]
fn e8_windows_match_model() {
    let model = e8_model_vectors();
    for (k, bound) in [(1, 4), (2, 4), (3, 2)] {
        let mut vectors: Vec<[i32; 8]> = vec![[0; 8]];
        vectors.extend(model.iter().filter(|v| model_norm(v) as u64 <= bound));
        let hist = tuple_histogram(&vectors, k);
        let idx = short_vectors(&e8_cartan(), bound, &EnumConfig::default()).unwrap();
        let cols = enumerate_index_matrices(k, bound);
        let got = idx.count_many(&cols).unwrap();
        for (s, got) in cols.iter().zip(got) {
            let key: Vec<i64> = s.row_major().iter().map(|x| x.try_into().unwrap()).collect();
            let want = hist.get(&key).copied().unwrap_or(0);
            assert_eq!(got, BigUint::from(want), "S = {s}");
        }
    }
}

#[test]
fn leech_has_no_roots() {
    let leech = builtin("Leech").unwrap();
    let idx = short_vectors(leech.gram(), 2, &EnumConfig::default()).unwrap();
    assert!(idx.count_by_norm().is_empty());
}

#[test]
fn sign_and_permutation_symmetry() {
    let idx = short_vectors(&e8_cartan(), 4, &EnumConfig::default()).unwrap();
    let base = [[4i64, 1, -2], [1, 2, 0], [-2, 0, 4]];
    let reference = idx
        .count_representations(&GramMatrix::from_i64_rows(&base).unwrap())
        .unwrap();
    assert!(reference > BigUint::from(0u32));
    let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for mask in 0..8 {
        let sign = |i: usize| if mask & (1 << i) != 0 { -1 } else { 1 };
        for p in perms {
            let rows: Vec<Vec<i64>> = (0..3)
                .map(|i| (0..3).map(|j| sign(i) * sign(j) * base[p[i]][p[j]]).collect())
                .collect();
            let s = GramMatrix::from_i64_rows(&rows).unwrap();
            assert_eq!(idx.count_representations(&s).unwrap(), reference);
        }
    }
}

#[test]
fn sharded_totals_do_not_depend_on_thread_count() {
    let lat = builtin("D16+").unwrap();
    let cols = enumerate_index_matrices(3, 2);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let idx = short_vectors(lat.gram(), 2, &EnumConfig::default()).unwrap();
            idx.count_many(&cols).unwrap()
        })
    };
    let one = run(1);
    assert_eq!(run(2), one);
    assert_eq!(run(5), one);
}

/// Random unimodular matrix from elementary row operations.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for &(a, b, k) in ops {
        let (a, b) = (a % n, b % n);
        if a == b {
            u.swap(a, (a + 1) % n);
            continue;
        }
        let rb = u[b].clone();
        for (x, y) in u[a].iter_mut().zip(rb) {
            *x += k * y;
        }
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn basis_invariance(ops in prop::collection::vec((0usize..8, 0usize..8, -2i64..=2), 1..12)) {
        let g = e8_cartan();
        let h = g.transformed(&unimodular(8, &ops));
        let probes: Vec<GramMatrix> = ["[2]", "[4]", "[2,1;1,2]", "[4,-3;-3,4]", "[2,0,1;0,2,1;1,1,4]"]
            .iter()
            .map(|s| s.parse().unwrap())
            .collect();
        let a = short_vectors(&g, 4, &EnumConfig::default()).unwrap().count_many(&probes).unwrap();
        let b = short_vectors(&h, 4, &EnumConfig::default()).unwrap().count_many(&probes).unwrap();
        prop_assert_eq!(a, b);
    }
}
