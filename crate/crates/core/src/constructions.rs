//! Generators for the standard behavior families: cycles, the 3×3 parity
//! square, isotropic PR boxes, and the colored-graph family whose rank
//! equals the graph's arboricity.

use num_bigint::BigInt;
use num_traits::One;

use crate::behavior::{Behavior, Table};
use crate::graph::Graph;
use crate::hypergraph::Hypergraph;
use crate::oracle::Permutation;
use crate::rational::in_unit_interval;
use crate::{Error, Rational, Result};

/// Maximum number of colors (edges) in a colored-graph behavior. The common
/// alphabet has `2^m` symbols, so this also bounds the table sizes.
pub const MAX_COLORS: u32 = 20;

/// The `i`-th color on `{0..2^m−1}`: the involution flipping bit `i−1` of
/// the binary representation. Distinct colors compose without fixed points.
pub fn color_permutation(i: u32, m: u32) -> Result<Permutation> {
    if !(1..=m).contains(&i) || m > MAX_COLORS {
        return Err(Error::Range(format!(
            "color index {i} out of range 1..={m} (arity cap {MAX_COLORS})"
        )));
    }
    let size = 1u32 << m;
    let bit = 1u32 << (i - 1);
    Permutation::from_image((0..size).map(|v| v ^ bit).collect())
}

/// Uniform permutation-supported behavior on a graph, one distinct color per
/// edge in canonical edge order: context `i` is supported on the pairs
/// `(o, τ_{i+1}(o))` with probability `1/2^m` each.
pub fn build_color_behavior(graph: &Graph) -> Result<Behavior> {
    let m = graph.num_edges() as u32;
    if m == 0 {
        return Err(Error::Structure("colored behavior needs at least one edge".into()));
    }
    if m > MAX_COLORS {
        return Err(Error::SizeCap(format!(
            "{m} edges exceed the color cap of {MAX_COLORS}"
        )));
    }
    if graph.edges().iter().any(|&(u, v)| u == v) {
        return Err(Error::Structure("loop edge".into()));
    }
    // Every vertex must touch an edge to appear in a context.
    let mut covered = vec![false; graph.num_vertices()];
    for &(u, v) in graph.edges() {
        covered[u] = true;
        covered[v] = true;
    }
    if let Some(v) = covered.iter().position(|c| !c) {
        return Err(Error::Structure(format!(
            "vertex {v} is isolated; it would appear in no context"
        )));
    }

    let size = 1usize << m;
    let alphabet: Vec<String> = (0..size).map(|o| o.to_string()).collect();
    let observables: Vec<String> = (0..graph.num_vertices()).map(|v| format!("V{v}")).collect();
    let alphabets = vec![alphabet; graph.num_vertices()];
    let contexts: Vec<Vec<usize>> = graph.edges().iter().map(|&(u, v)| vec![u, v]).collect();
    let hypergraph = Hypergraph::new(observables, alphabets, contexts)?;

    let p = Rational::new(BigInt::one(), BigInt::from(size as i64));
    let mut tables = Vec::with_capacity(graph.num_edges());
    for (e, _) in graph.edges().iter().enumerate() {
        let tau = color_permutation(e as u32 + 1, m)?;
        let mut table = Table::new();
        for o in 0..size as u32 {
            table.insert(vec![o, tau.apply(o)], p.clone());
        }
        tables.push(table);
    }
    Behavior::new(hypergraph, tables)
}

/// Variants of the cycle behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    /// Anticorrelation on every edge. Contextual exactly for odd length.
    Plain,
    /// Perfect correlation on the first edge, anticorrelation elsewhere.
    /// Contextual exactly for even length.
    Corrected,
}

/// Binary cycle behavior on `n ≥ 3` observables. Context `i < n−1` joins
/// observables `i` and `i+1`; the last context joins `n−1` and `0`.
pub fn build_cycle_behavior(n: usize, kind: CycleKind) -> Result<Behavior> {
    if n < 3 {
        return Err(Error::Range(format!("cycle length {n} below 3")));
    }
    let observables: Vec<String> = (0..n).map(|v| format!("V{v}")).collect();
    let mut contexts: Vec<Vec<usize>> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
    contexts.push(vec![0, n - 1]);
    let hypergraph = Hypergraph::binary(observables, contexts)?;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let anti: Table =
        [(vec![0, 1], half.clone()), (vec![1, 0], half.clone())].into_iter().collect();
    let corr: Table = [(vec![0, 0], half.clone()), (vec![1, 1], half)].into_iter().collect();
    let tables: Vec<Table> = (0..n)
        .map(|i| if kind == CycleKind::Corrected && i == 0 { corr.clone() } else { anti.clone() })
        .collect();
    Behavior::new(hypergraph, tables)
}

/// The 3×3 parity-square behavior: nine binary observables on a grid, six
/// contexts (three rows, then three columns), uniform over even-parity
/// triples everywhere except the third column, which is uniform over
/// odd-parity triples.
pub fn build_pm_behavior() -> Behavior {
    let observables: Vec<String> =
        (1..=3).flat_map(|r| (1..=3).map(move |c| format!("A{r}{c}"))).collect();
    let mut contexts: Vec<Vec<usize>> = (0..3).map(|r| vec![3 * r, 3 * r + 1, 3 * r + 2]).collect();
    contexts.extend((0..3).map(|c| vec![c, c + 3, c + 6]));
    let hypergraph = Hypergraph::binary(observables, contexts).unwrap();
    let quarter = Rational::new(BigInt::one(), BigInt::from(4));
    let parity_table = |odd: bool| -> Table {
        let mut t = Table::new();
        for bits in 0u32..8 {
            let triple = vec![bits >> 2 & 1, bits >> 1 & 1, bits & 1];
            if (triple.iter().sum::<u32>() % 2 == 1) == odd {
                t.insert(triple, quarter.clone());
            }
        }
        t
    };
    let tables: Vec<Table> = (0..6).map(|i| parity_table(i == 5)).collect();
    Behavior::new(hypergraph, tables).unwrap()
}

/// Isotropic two-party box: two binary inputs per party, binary outputs,
/// `P(ab|xy) = α/2` when `a⊕b = x·y` and `(1−α)/2` otherwise. The
/// factorization into the two parties is recorded.
pub fn build_pr_behavior(alpha: &Rational) -> Result<Behavior> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    if !in_unit_interval(alpha) || *alpha < half {
        return Err(Error::Range(format!("isotropy parameter {alpha} outside [1/2, 1]")));
    }
    let observables: Vec<String> =
        ["A0", "A1", "B0", "B1"].iter().map(|s| s.to_string()).collect();
    let contexts = vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]];
    let hypergraph = Hypergraph::binary(observables, contexts)?;
    let hit = alpha / Rational::from_integer(2.into());
    let miss = (Rational::one() - alpha) / Rational::from_integer(2.into());
    let mut tables = Vec::with_capacity(4);
    for x in 0u32..2 {
        for y in 0u32..2 {
            let mut table = Table::new();
            for a in 0u32..2 {
                for b in 0u32..2 {
                    let p = if a ^ b == x * y { hit.clone() } else { miss.clone() };
                    if !num_traits::Zero::is_zero(&p) {
                        table.insert(vec![a, b], p);
                    }
                }
            }
            tables.push(table);
        }
    }
    Behavior::with_parts(hypergraph, tables, Some(vec![vec![0, 1], vec![2, 3]]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mask::ContextMask;
    use crate::oracle::{is_noncontextual, Limits, PermutationScenario};
    use crate::rational::ratio;

    #[test]
    fn color_permutations_flip_one_bit() {
        let tau1 = color_permutation(1, 3).unwrap();
        assert_eq!(tau1.image(), &[1, 0, 3, 2, 5, 4, 7, 6]);
        let tau2 = color_permutation(2, 3).unwrap();
        assert_eq!(tau2.image(), &[2, 3, 0, 1, 6, 7, 4, 5]);
        assert!(color_permutation(0, 3).is_err());
        assert!(color_permutation(4, 3).is_err());
    }

    #[test]
    fn colors_are_involutions_with_disjoint_pair_sets() {
        // P1: each color is its own inverse. P2: every unordered pair
        // (v, τ(v)) occurs under exactly one color.
        for m in 1..=6u32 {
            let mut seen = std::collections::BTreeSet::new();
            for i in 1..=m {
                let tau = color_permutation(i, m).unwrap();
                let mut this_color = std::collections::BTreeSet::new();
                for v in 0..(1u32 << m) {
                    assert_eq!(tau.apply(tau.apply(v)), v);
                    assert_ne!(tau.apply(v), v);
                    this_color.insert((v.min(tau.apply(v)), v.max(tau.apply(v))));
                }
                assert_eq!(this_color.len(), 1 << (m - 1));
                for pair in this_color {
                    assert!(seen.insert(pair), "pair {pair:?} repeated across colors at arity {m}");
                }
            }
        }
    }

    #[test]
    fn distinct_color_compositions_are_fixed_point_free() {
        // Every non-empty subset of distinct colors composes to a
        // fixed-point-free permutation; exhaustive over subsets up to
        // arity 10.
        for m in 1..=10u32 {
            let colors: Vec<Permutation> =
                (1..=m).map(|i| color_permutation(i, m).unwrap()).collect();
            for subset in 1u32..(1 << m) {
                let mut composed = Permutation::identity(1 << m);
                for (i, color) in colors.iter().enumerate() {
                    if subset >> i & 1 == 1 {
                        composed = color.compose(&composed);
                    }
                }
                assert!(!composed.has_fixed_point(), "subset {subset:#b} at arity {m}");
            }
        }
    }

    #[test]
    fn single_edge_color_behavior_is_noncontextual() {
        let g = Graph::new(2, vec![(0, 1)]).unwrap();
        let b = build_color_behavior(&g).unwrap();
        assert!(b.validate().is_valid());
        assert!(is_noncontextual(&b, &Limits::default()).unwrap().feasible);
    }

    #[test]
    fn triangle_color_behavior_validates_and_detects() {
        let b = build_color_behavior(&Graph::cycle(3)).unwrap();
        assert!(b.validate().is_valid());
        let sc = PermutationScenario::detect(&b).unwrap();
        assert_eq!(sc.alphabet_size, 8);
        assert!(!sc.extendable(ContextMask::from_indices([0, 1, 2])));
    }

    #[test]
    fn cycle_behaviors_validate() {
        for n in 3..=6 {
            for kind in [CycleKind::Plain, CycleKind::Corrected] {
                let b = build_cycle_behavior(n, kind).unwrap();
                assert!(b.validate().is_valid(), "n={n} {kind:?}");
            }
        }
        assert!(build_cycle_behavior(2, CycleKind::Plain).is_err());
    }

    #[test]
    fn parity_square_validates_and_saturates_the_inequality() {
        let b = build_pm_behavior();
        assert!(b.validate().is_valid());
        // Parity expectation of each context: +1 for the five even contexts,
        // −1 for the odd column; reading the odd context with its sign gives
        // the saturation value 6, above the assignment bound 5.
        let mut total = ratio(0, 1);
        for i in 0..6 {
            let mut expectation = ratio(0, 1);
            for (outcome, p) in b.table(i) {
                let parity = outcome.iter().sum::<u32>() % 2;
                let sign = if parity == 0 { ratio(1, 1) } else { ratio(-1, 1) };
                expectation += sign * p.clone();
            }
            assert_eq!(expectation, if i == 5 { ratio(-1, 1) } else { ratio(1, 1) });
            total += if i == 5 { -expectation } else { expectation };
        }
        assert_eq!(total, ratio(6, 1));
    }

    #[test]
    fn pr_boxes_validate_across_the_range() {
        for alpha in [ratio(1, 2), ratio(3, 4), ratio(4, 5), ratio(1, 1)] {
            let b = build_pr_behavior(&alpha).unwrap();
            assert!(b.validate().is_valid());
            assert!(b.factorization().is_some());
            assert_eq!(b.factorization().unwrap().num_parts(), 2);
        }
        assert!(build_pr_behavior(&ratio(1, 4)).is_err());
        assert!(build_pr_behavior(&ratio(5, 4)).is_err());
    }

    #[test]
    fn uniform_box_is_the_product_of_coins() {
        let b = build_pr_behavior(&ratio(1, 2)).unwrap();
        for i in 0..4 {
            assert_eq!(b.table(i).len(), 4);
            assert!(b.table(i).values().all(|p| *p == ratio(1, 4)));
        }
        assert!(is_noncontextual(&b, &Limits::default()).unwrap().feasible);
    }

    #[test]
    fn isolated_vertices_are_rejected() {
        let g = Graph::new(3, vec![(0, 1)]).unwrap();
        assert!(build_color_behavior(&g).is_err());
    }
}
