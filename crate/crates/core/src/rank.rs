//! Exact rank computation: the minimum number of non-contextual behaviors
//! that reproduce a behavior context-by-context, with a witness cover.
//!
//! By downward closure of extendability only inclusion-maximal extendable
//! context sets matter, so the solver first enumerates those (candidate
//! subsets grow one context at a time and are oracle-checked only when all
//! their sub-subsets are already known extendable), then finds a minimum
//! cover of the context set by maximal sets via iterative-deepening search
//! in lexicographic index order.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::behavior::Behavior;
use crate::mask::{ContextMask, MAX_CONTEXTS};
use crate::oracle::{is_extendable, Limits, NcWitness, PermutationScenario};
use crate::{Error, Result};

/// Minimum cover of the contexts by extendable sets, with witnesses.
#[derive(Debug, Clone)]
pub struct RankResult {
    pub rc: u32,
    /// Cover elements in the solver's tie-broken order. Masks union to the
    /// full context set; each witness reproduces the target exactly on its
    /// mask (and is defined on every context).
    pub cover: Vec<CoverElement>,
    /// All inclusion-maximal extendable context sets, ordered by ascending
    /// bit value. Cover indices refer to this list.
    pub maximal_sets: Vec<ContextMask>,
    /// Extendability oracle invocations made during the search; the
    /// exhaustive-search record backing minimality.
    pub oracle_calls: u64,
}

#[derive(Debug, Clone)]
pub struct CoverElement {
    pub mask: ContextMask,
    /// Index into `maximal_sets`.
    pub index: usize,
    pub witness: NcWitness,
}

impl RankResult {
    /// Log-rank in bits. Exact integer when the rank is a power of two.
    pub fn rc2(&self) -> f64 {
        match self.rc2_exact() {
            Some(k) => k as f64,
            None => (self.rc as f64).log2(),
        }
    }

    pub fn rc2_exact(&self) -> Option<u32> {
        if self.rc.is_power_of_two() {
            Some(self.rc.trailing_zeros())
        } else {
            None
        }
    }
}

/// All inclusion-maximal context sets on which the behavior is
/// non-contextually extendable.
pub fn maximal_extendable_sets(
    behavior: &Behavior,
    limits: &Limits,
) -> Result<Vec<ContextMask>> {
    let (sets, _) = maximal_sets_with_stats(behavior, limits)?;
    Ok(sets)
}

fn maximal_sets_with_stats(
    behavior: &Behavior,
    limits: &Limits,
) -> Result<(Vec<ContextMask>, u64)> {
    let n = behavior.hypergraph().num_contexts();
    if n > MAX_CONTEXTS {
        return Err(Error::SizeCap(format!(
            "{n} contexts exceed the {MAX_CONTEXTS}-context mask limit"
        )));
    }
    let scenario = PermutationScenario::detect(behavior);
    let oracle = |mask: ContextMask| -> Result<bool> {
        match &scenario {
            Some(sc) => Ok(sc.extendable(mask)),
            None => Ok(is_extendable(behavior, mask, limits)?.feasible),
        }
    };

    let mut oracle_calls = 0u64;
    let mut maximal: Vec<ContextMask> = Vec::new();
    let mut prev_layer: Vec<ContextMask> = Vec::new();
    let mut prev_set: HashSet<u64> = HashSet::new();

    for size in 1..=n {
        let candidates: Vec<ContextMask> = if size == 1 {
            (0..n).map(ContextMask::singleton).collect()
        } else {
            // Grow each feasible set by a context above its highest member;
            // keep candidates whose every one-smaller subset is feasible.
            let mut grown: Vec<ContextMask> = Vec::new();
            for &f in &prev_layer {
                let top = 63 - f.bits().leading_zeros() as usize;
                for c in top + 1..n {
                    let candidate = f.insert(c);
                    let closed = candidate
                        .indices()
                        .all(|i| prev_set.contains(&candidate.remove(i).bits()));
                    if closed {
                        grown.push(candidate);
                    }
                }
            }
            grown
        };
        if candidates.is_empty() {
            break;
        }
        oracle_calls += candidates.len() as u64;
        let verdicts: Vec<bool> = if candidates.len() >= 8 {
            let results: std::result::Result<Vec<bool>, Error> =
                candidates.par_iter().map(|&m| oracle(m)).collect();
            results?
        } else {
            let mut v = Vec::with_capacity(candidates.len());
            for &m in &candidates {
                v.push(oracle(m)?);
            }
            v
        };
        let layer: Vec<ContextMask> = candidates
            .into_iter()
            .zip(verdicts)
            .filter(|(_, ok)| *ok)
            .map(|(m, _)| m)
            .collect();
        let layer_set: HashSet<u64> = layer.iter().map(|m| m.bits()).collect();
        // A feasible set of the previous layer is maximal exactly when no
        // feasible extension of it survived into this layer.
        for &f in &prev_layer {
            let extendable_further =
                (0..n).any(|c| !f.contains(c) && layer_set.contains(&f.insert(c).bits()));
            if !extendable_further {
                maximal.push(f);
            }
        }
        prev_layer = layer;
        prev_set = layer_set;
    }
    maximal.extend(prev_layer);
    maximal.sort_by_key(|m| m.bits());
    Ok((maximal, oracle_calls))
}

/// Exact rank of contextuality with a minimum witness cover.
///
/// The behavior must validate (exact normalization and consistency); the
/// rank of an invalid table set is not defined.
pub fn rank_of_contextuality(behavior: &Behavior, limits: &Limits) -> Result<RankResult> {
    let report = behavior.validate();
    if !report.is_valid() {
        return Err(Error::Validation(describe_first_violation(&report)));
    }
    let n = behavior.hypergraph().num_contexts();
    let full = ContextMask::full(n)?;
    let (maximal_sets, oracle_calls) = maximal_sets_with_stats(behavior, limits)?;
    assert!(
        {
            let mut u = ContextMask::EMPTY;
            for m in &maximal_sets {
                u = u.union(*m);
            }
            u == full
        },
        "every context of a validated behavior is extendable alone"
    );

    let chosen = minimum_cover(&maximal_sets, full)
        .expect("a cover exists because the maximal sets cover every context");

    let scenario = PermutationScenario::detect(behavior);
    let mut cover = Vec::with_capacity(chosen.len());
    for index in chosen {
        let mask = maximal_sets[index];
        let witness = match &scenario {
            Some(sc) => sc.witness(behavior, mask, limits)?,
            None => is_extendable(behavior, mask, limits)?
                .witness
                .expect("maximal sets are extendable"),
        };
        debug_assert!(witness.reproduces(behavior, mask));
        cover.push(CoverElement { mask, index, witness });
    }
    Ok(RankResult { rc: cover.len() as u32, cover, maximal_sets, oracle_calls })
}

/// Log-rank in bits (`log₂` of the rank).
pub fn log_rank(behavior: &Behavior, limits: &Limits) -> Result<f64> {
    Ok(rank_of_contextuality(behavior, limits)?.rc2())
}

fn describe_first_violation(report: &crate::behavior::ValidationReport) -> String {
    if let Some(c) = report.contexts.iter().find(|c| !c.normalized) {
        return format!("context {} sums to {}, not 1", c.context, c.total);
    }
    if let Some(p) = report.pairs.iter().find(|p| !p.consistent) {
        return format!("contexts {} and {} have disagreeing shared marginals", p.left, p.right);
    }
    "behavior is valid".into()
}

/// Minimum-size cover of `full` by the given sets, returning the
/// lexicographically least ascending index sequence among minimum covers.
/// Iterative deepening over the cover size; within a size, indices are
/// explored in ascending order, so the first complete cover found is the
/// lexicographic minimum.
fn minimum_cover(sets: &[ContextMask], full: ContextMask) -> Option<Vec<usize>> {
    if sets.is_empty() {
        return None;
    }
    let mut suffix_union = vec![ContextMask::EMPTY; sets.len() + 1];
    for i in (0..sets.len()).rev() {
        suffix_union[i] = suffix_union[i + 1].union(sets[i]);
    }
    if !full.is_subset_of(suffix_union[0]) {
        return None;
    }
    for size in 1..=sets.len() {
        let mut chosen = Vec::with_capacity(size);
        if cover_dfs(sets, &suffix_union, full, 0, ContextMask::EMPTY, size, &mut chosen) {
            return Some(chosen);
        }
    }
    None
}

fn cover_dfs(
    sets: &[ContextMask],
    suffix_union: &[ContextMask],
    full: ContextMask,
    start: usize,
    acc: ContextMask,
    remaining: usize,
    chosen: &mut Vec<usize>,
) -> bool {
    if remaining == 0 {
        return acc == full;
    }
    if !full.is_subset_of(acc.union(suffix_union[start])) {
        return false;
    }
    let last = sets.len().saturating_sub(remaining);
    for i in start..=last {
        if sets[i].is_subset_of(acc) {
            continue; // contributes nothing; a minimal cover never needs it
        }
        chosen.push(i);
        if cover_dfs(sets, suffix_union, full, i + 1, acc.union(sets[i]), remaining - 1, chosen)
        {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Exhaustive reference search used by the equivalence tests: the least `k`
/// such that some `k` extendable subsets (not only maximal ones) cover all
/// contexts. Exponential in the context count; callers keep it at five or
/// fewer contexts.
pub fn brute_force_rank(behavior: &Behavior, limits: &Limits) -> Result<u32> {
    let n = behavior.hypergraph().num_contexts();
    assert!(n <= 16, "brute force reference is for small scenarios");
    let scenario = PermutationScenario::detect(behavior);
    let mut memo: HashMap<u64, bool> = HashMap::new();
    let mut extendable = |mask: ContextMask| -> Result<bool> {
        if let Some(&v) = memo.get(&mask.bits()) {
            return Ok(v);
        }
        let v = match &scenario {
            Some(sc) => sc.extendable(mask),
            None => is_extendable(behavior, mask, limits)?.feasible,
        };
        memo.insert(mask.bits(), v);
        Ok(v)
    };
    let full = ContextMask::full(n)?;
    let all_subsets: Vec<ContextMask> =
        (1..(1u64 << n)).map(ContextMask::from_bits).collect();
    let mut feasible: Vec<ContextMask> = Vec::new();
    for &s in &all_subsets {
        if extendable(s)? {
            feasible.push(s);
        }
    }
    for k in 1..=n {
        if cover_exists(&feasible, full, 0, ContextMask::EMPTY, k) {
            return Ok(k as u32);
        }
    }
    Err(Error::Validation("no cover found; is some context unextendable alone?".into()))
}

fn cover_exists(
    sets: &[ContextMask],
    full: ContextMask,
    start: usize,
    acc: ContextMask,
    remaining: usize,
) -> bool {
    if acc == full {
        return true;
    }
    if remaining == 0 || start == sets.len() {
        return false;
    }
    for i in start..sets.len() {
        if cover_exists(sets, full, i + 1, acc.union(sets[i]), remaining - 1) {
            return true;
        }
    }
    false
}
