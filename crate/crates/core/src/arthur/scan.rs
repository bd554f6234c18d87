//! Exhaustive search for valid parameters over the built-in labels.
//!
//! Only the trivial label and level-one eigenforms are searched. Cuspidal
//! representations of `GL_n` for `n ≥ 3` (the symplectic and orthogonal
//! families) are not modelled, so a scan tests the case analysis on a
//! sub-catalog. It does not compute the true `g_m`.

use std::collections::{BTreeMap, HashSet};

use super::{
    cusp_form_dimension, is_valid, ArthurError, ArthurParameter, Central, CuspidalLabel, Summand, TABULATED_WEIGHT,
};

/// Every valid parameter of rank `m` built from `1` and eigenforms of weight
/// `12 ≤ k ≤ max_weight`, sorted by canonical text.
pub fn enumerate_parameters(m: u32, max_weight: u32) -> Result<Vec<ArthurParameter>, ArthurError> {
    if m == 0 || !m.is_multiple_of(8) || max_weight > TABULATED_WEIGHT {
        return Err(ArthurError::UnsupportedScan { m, max_weight });
    }
    let mut remaining: BTreeMap<i64, u32> = BTreeMap::new();
    for e in ArthurParameter::target_eigenvalues(m) {
        *remaining.entry(e).or_default() += 1;
    }
    let candidates: Vec<Summand> = candidate_summands(m, max_weight)
        .into_iter()
        .filter(|s| fits(&s.doubled_eigenvalues(), &remaining))
        .collect();

    let mut found = HashSet::new();
    let mut chosen = Vec::new();
    search(m, &candidates, &mut remaining, &mut chosen, &mut found);
    let mut out: Vec<ArthurParameter> = found.into_iter().filter(is_valid).collect();
    out.sort_by_cached_key(ToString::to_string);
    Ok(out)
}

fn candidate_summands(m: u32, max_weight: u32) -> Vec<Summand> {
    let mut labels = vec![CuspidalLabel::Trivial];
    for weight in (12..=max_weight).step_by(2) {
        for index in 1..=cusp_form_dimension(weight).unwrap_or(0) {
            labels.push(CuspidalLabel::Eigenform {
                weight,
                index,
                central: Central::Auto,
            });
        }
    }
    labels
        .into_iter()
        .flat_map(|label| (1..=m / label.n()).map(move |d| Summand::new(label, d)))
        .collect()
}

fn fits(eigenvalues: &[i64], remaining: &BTreeMap<i64, u32>) -> bool {
    let mut need: BTreeMap<i64, u32> = BTreeMap::new();
    for &e in eigenvalues {
        *need.entry(e).or_default() += 1;
    }
    need.iter().all(|(e, c)| remaining.get(e).is_some_and(|r| r >= c))
}

/// Each step picks a summand covering the largest outstanding eigenvalue, so
/// every multiset is reached; the set removes orderings of equal-top picks.
fn search(
    m: u32,
    candidates: &[Summand],
    remaining: &mut BTreeMap<i64, u32>,
    chosen: &mut Vec<Summand>,
    found: &mut HashSet<ArthurParameter>,
) {
    let Some(top) = remaining.iter().rev().find(|(_, &c)| c > 0).map(|(&e, _)| e) else {
        found.insert(ArthurParameter::new(m, chosen.clone()));
        return;
    };
    for s in candidates {
        let ev = s.doubled_eigenvalues();
        if !ev.contains(&top) || chosen.contains(s) || !fits(&ev, remaining) {
            continue;
        }
        for e in &ev {
            *remaining.get_mut(e).unwrap() -= 1;
        }
        chosen.push(*s);
        search(m, candidates, remaining, chosen, found);
        chosen.pop();
        for e in &ev {
            *remaining.get_mut(e).unwrap() += 1;
        }
    }
}
