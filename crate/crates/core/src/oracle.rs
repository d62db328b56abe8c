//! Exact decision procedures for non-contextuality and non-contextual
//! extendability.
//!
//! The general oracle works in the weight space over global deterministic
//! assignments: a behavior restricted to a context set is extendable exactly
//! when a convex combination of deterministic behaviors reproduces its
//! tables there, which is a rational LP feasibility question. A specialized
//! support oracle answers the same question combinatorially for behaviors
//! whose two-observable contexts carry uniform permutation-supported tables.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::behavior::{Behavior, Table};
use crate::hypergraph::{odometer, Hypergraph};
use crate::lp::{feasible_eq, EqSystem, Feasibility};
use crate::mask::ContextMask;
use crate::{Error, Rational, Result};

/// Resource caps threaded through the oracles.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Maximum number of global deterministic assignments the LP oracle may
    /// enumerate.
    pub max_assignments: u64,
}

pub const DEFAULT_MAX_ASSIGNMENTS: u64 = 1 << 24;

impl Default for Limits {
    fn default() -> Self {
        Limits { max_assignments: DEFAULT_MAX_ASSIGNMENTS }
    }
}

/// A global value assignment: one outcome index per observable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DeterministicAssignment {
    pub values: Vec<u32>,
}

impl DeterministicAssignment {
    /// Outcome tuple this assignment induces on a context.
    pub fn outcome_for(&self, context: &[usize]) -> Vec<u32> {
        context.iter().map(|&v| self.values[v]).collect()
    }

    /// Outcome symbols in observable order, as used by the serialization.
    pub fn symbols(&self, hypergraph: &Hypergraph) -> Vec<String> {
        self.values
            .iter()
            .enumerate()
            .map(|(v, &o)| hypergraph.alphabet(v)[o as usize].clone())
            .collect()
    }
}

/// Enumerates all global deterministic assignments in lexicographic order.
/// Errors when the assignment space exceeds the cap, naming the product.
pub fn enumerate_assignments(
    hypergraph: &Hypergraph,
    limits: &Limits,
) -> Result<Vec<DeterministicAssignment>> {
    check_assignment_cap(hypergraph, limits)?;
    let sizes: Vec<u32> =
        (0..hypergraph.num_observables()).map(|v| hypergraph.alphabet_size(v) as u32).collect();
    Ok(odometer(sizes).map(|values| DeterministicAssignment { values }).collect())
}

pub fn check_assignment_cap(hypergraph: &Hypergraph, limits: &Limits) -> Result<()> {
    let product = hypergraph.assignment_count();
    if product > limits.max_assignments as u128 {
        return Err(Error::AssignmentCap { product, cap: limits.max_assignments });
    }
    Ok(())
}

/// Convex weights over deterministic assignments certifying extendability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcWitness {
    /// Nonzero weights only, in lexicographic assignment order. They are
    /// nonnegative and sum to one exactly.
    pub weights: Vec<(DeterministicAssignment, Rational)>,
}

impl NcWitness {
    /// Recomputes the mixture tables on the masked contexts and compares
    /// them to the target exactly.
    pub fn reproduces(&self, behavior: &Behavior, mask: ContextMask) -> bool {
        let hg = behavior.hypergraph();
        for i in mask.indices() {
            if self.mixture_table(hg, i) != *behavior.table(i) {
                return false;
            }
        }
        true
    }

    /// Mixture table induced on one context.
    pub fn mixture_table(&self, hypergraph: &Hypergraph, context: usize) -> Table {
        let ctx = hypergraph.context(context);
        let mut table = Table::new();
        for (assignment, weight) in &self.weights {
            let outcome = assignment.outcome_for(ctx);
            let entry = table.entry(outcome).or_insert_with(Rational::zero);
            *entry += weight;
        }
        table
    }

    /// Materializes the full non-contextual behavior the witness mixes.
    pub fn to_behavior(&self, hypergraph: &Hypergraph) -> Behavior {
        let tables: Vec<Table> =
            (0..hypergraph.num_contexts()).map(|i| self.mixture_table(hypergraph, i)).collect();
        Behavior::new(hypergraph.clone(), tables)
            .expect("a mixture of deterministic assignments is a valid behavior")
    }

    pub fn total_weight(&self) -> Rational {
        self.weights.iter().map(|(_, w)| w.clone()).sum()
    }
}

/// Exact separating functional certifying non-extendability: its value at
/// the target is positive while its value at every deterministic assignment
/// is nonpositive.
///
/// Coefficients are stored for the target's support rows; every other
/// (context, outcome) pair of the masked contexts implicitly carries
/// `default_coeff`. Zero-probability entries contribute nothing at the
/// target, so the default only matters when evaluating assignments.
#[derive(Debug, Clone)]
pub struct SeparatingFunctional {
    pub mask: ContextMask,
    pub support_coeffs: Vec<(usize, Vec<u32>, Rational)>,
    pub default_coeff: Rational,
}

impl SeparatingFunctional {
    /// Functional value at a behavior (assumed supported inside the listed
    /// rows, which holds for the target it was built from).
    pub fn value_at_behavior(&self, behavior: &Behavior) -> Rational {
        let mut total = Rational::zero();
        for (ctx, outcome, coeff) in &self.support_coeffs {
            total += coeff * behavior.prob(*ctx, outcome);
        }
        total
    }

    /// Functional value at the deterministic behavior of an assignment.
    pub fn value_at_assignment(
        &self,
        hypergraph: &Hypergraph,
        assignment: &DeterministicAssignment,
    ) -> Rational {
        let mut listed: BTreeMap<(usize, &Vec<u32>), &Rational> = BTreeMap::new();
        for (ctx, outcome, coeff) in &self.support_coeffs {
            listed.insert((*ctx, outcome), coeff);
        }
        let mut total = Rational::zero();
        for ctx in self.mask.indices() {
            let outcome = assignment.outcome_for(hypergraph.context(ctx));
            match listed.get(&(ctx, &outcome)) {
                Some(c) => total += *c,
                None => total += &self.default_coeff,
            }
        }
        total
    }
}

/// Outcome of an extendability query: exactly one of witness / certificate
/// is present.
#[derive(Debug, Clone)]
pub struct FeasibilityResult {
    pub feasible: bool,
    pub witness: Option<NcWitness>,
    pub certificate: Option<SeparatingFunctional>,
}

/// Decides whether the behavior restricted to the masked contexts admits a
/// non-contextual model, by exact rational LP feasibility over deterministic
/// assignment weights.
///
/// Requires each masked table to be exactly normalized (rank and measure
/// callers validate first; the check here is cheap and keeps the witness a
/// genuine distribution).
pub fn is_extendable(
    behavior: &Behavior,
    mask: ContextMask,
    limits: &Limits,
) -> Result<FeasibilityResult> {
    let hg = behavior.hypergraph();
    if mask.is_empty() {
        return Err(Error::Structure("extendability query over an empty context set".into()));
    }
    if let Some(i) = mask.indices().find(|&i| i >= hg.num_contexts()) {
        return Err(Error::Structure(format!("mask names nonexistent context {i}")));
    }
    let one = Rational::one();
    for i in mask.indices() {
        let total: Rational = behavior.table(i).values().cloned().sum();
        if total != one {
            return Err(Error::Validation(format!(
                "context {i} is not normalized (total {total}); extendability is defined for distributions"
            )));
        }
    }
    check_assignment_cap(hg, limits)?;

    // Row indexing over the support of the masked tables.
    let mut row_of: BTreeMap<(usize, Vec<u32>), usize> = BTreeMap::new();
    let mut row_targets: Vec<Rational> = Vec::new();
    let mut row_keys: Vec<(usize, Vec<u32>)> = Vec::new();
    for i in mask.indices() {
        for (outcome, p) in behavior.table(i) {
            row_of.insert((i, outcome.clone()), row_targets.len());
            row_keys.push((i, outcome.clone()));
            row_targets.push(p.clone());
        }
    }

    // Support-feasible assignments: those hitting a nonzero entry in every
    // masked context. All others are forced to weight zero by the zero
    // entries and are pruned from the LP.
    let contexts: Vec<usize> = mask.indices().collect();
    let sizes: Vec<u32> =
        (0..hg.num_observables()).map(|v| hg.alphabet_size(v) as u32).collect();
    let mut support: Vec<DeterministicAssignment> = Vec::new();
    let mut columns: Vec<Vec<usize>> = Vec::new(); // rows hit by each support assignment
    for values in odometer(sizes.clone()) {
        let assignment = DeterministicAssignment { values };
        let mut rows = Vec::with_capacity(contexts.len());
        let mut ok = true;
        for &i in &contexts {
            let outcome = assignment.outcome_for(hg.context(i));
            match row_of.get(&(i, outcome)) {
                Some(&r) => rows.push(r),
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            support.push(assignment);
            columns.push(rows);
        }
    }

    let mut rows: Vec<(Vec<(usize, Rational)>, Rational)> =
        row_targets.iter().map(|t| (Vec::new(), t.clone())).collect();
    for (col, hit) in columns.iter().enumerate() {
        for &r in hit {
            rows[r].0.push((col, Rational::one()));
        }
    }
    let system = EqSystem { num_vars: support.len(), rows };

    match feasible_eq(&system) {
        Feasibility::Feasible(x) => {
            let weights: Vec<(DeterministicAssignment, Rational)> = support
                .iter()
                .zip(&x)
                .filter(|(_, w)| !w.is_zero())
                .map(|(a, w)| (a.clone(), w.clone()))
                .collect();
            let witness = NcWitness { weights };
            assert!(
                witness.total_weight() == one && witness.reproduces(behavior, mask),
                "witness soundness check failed"
            );
            Ok(FeasibilityResult { feasible: true, witness: Some(witness), certificate: None })
        }
        Feasibility::Infeasible(y) => {
            let support_coeffs: Vec<(usize, Vec<u32>, Rational)> = row_keys
                .iter()
                .zip(&y)
                .map(|((ctx, outcome), coeff)| (*ctx, outcome.clone(), coeff.clone()))
                .collect();
            // Default coefficient for unlisted rows: negative enough that
            // any assignment touching a zero-probability entry scores ≤ −1.
            let mut worst = Rational::zero();
            let listed = row_of;
            for values in odometer(sizes) {
                let assignment = DeterministicAssignment { values };
                let mut in_support = true;
                let mut partial = Rational::zero();
                for &i in &contexts {
                    let outcome = assignment.outcome_for(hg.context(i));
                    match listed.get(&(i, outcome)) {
                        Some(&r) => partial += &y[r],
                        None => in_support = false,
                    }
                }
                if !in_support && partial > worst {
                    worst = partial;
                }
            }
            let functional = SeparatingFunctional {
                mask,
                support_coeffs,
                default_coeff: -worst - one.clone(),
            };
            debug_assert!(functional.value_at_behavior(behavior).is_positive());
            Ok(FeasibilityResult {
                feasible: false,
                witness: None,
                certificate: Some(functional),
            })
        }
    }
}

/// Non-contextuality is extendability over the full context set.
pub fn is_noncontextual(behavior: &Behavior, limits: &Limits) -> Result<FeasibilityResult> {
    let mask = ContextMask::full(behavior.hypergraph().num_contexts())?;
    is_extendable(behavior, mask, limits)
}

/// A permutation on `0..len` represented by its image table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    image: Vec<u32>,
}

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Permutation { image: (0..len as u32).collect() }
    }

    pub fn from_image(image: Vec<u32>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &o in &image {
            if o as usize >= image.len() || seen[o as usize] {
                return Err(Error::Structure("image table is not a permutation".into()));
            }
            seen[o as usize] = true;
        }
        Ok(Permutation { image })
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn apply(&self, v: u32) -> u32 {
        self.image[v as usize]
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0u32; self.image.len()];
        for (v, &o) in self.image.iter().enumerate() {
            image[o as usize] = v as u32;
        }
        Permutation { image }
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { image: other.image.iter().map(|&v| self.image[v as usize]).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(v, &o)| v as u32 == o)
    }

    pub fn has_fixed_point(&self) -> bool {
        self.image.iter().enumerate().any(|(v, &o)| v as u32 == o)
    }

    pub fn image(&self) -> &[u32] {
        &self.image
    }
}

/// Structure recognized by the support oracle: every context has one or two
/// observables, every two-observable context carries the uniform table
/// supported on a bijection, and all edge-covered observables share one
/// alphabet size.
#[derive(Debug, Clone)]
pub struct PermutationScenario {
    pub alphabet_size: usize,
    /// One entry per two-observable context: (context, u, v, permutation
    /// mapping u-outcomes to v-outcomes) with u < v.
    pub edges: Vec<(usize, usize, usize, Permutation)>,
    /// One entry per single-observable context: (context, observable,
    /// table is uniform over the observable's alphabet).
    pub singletons: Vec<(usize, usize, bool)>,
    pub num_observables: usize,
}

impl PermutationScenario {
    /// Attempts to recognize the structure on a behavior. Returns `None`
    /// when any context has more than two observables or any edge table is
    /// not a uniform bijection table.
    pub fn detect(behavior: &Behavior) -> Option<PermutationScenario> {
        let hg = behavior.hypergraph();
        let mut edges = Vec::new();
        let mut singletons = Vec::new();
        let mut alphabet_size: Option<usize> = None;
        for (i, ctx) in hg.contexts().iter().enumerate() {
            match ctx.len() {
                1 => {
                    let v = ctx[0];
                    let k = hg.alphabet_size(v);
                    let uniform_p = Rational::new(1.into(), (k as i64).into());
                    let uniform = behavior.table(i).len() == k
                        && behavior.table(i).values().all(|p| *p == uniform_p);
                    singletons.push((i, v, uniform));
                }
                2 => {
                    let (u, v) = (ctx[0], ctx[1]);
                    let k = hg.alphabet_size(u);
                    if hg.alphabet_size(v) != k {
                        return None;
                    }
                    match alphabet_size {
                        None => alphabet_size = Some(k),
                        Some(k0) if k0 == k => {}
                        Some(_) => return None,
                    }
                    let table = behavior.table(i);
                    if table.len() != k {
                        return None;
                    }
                    let uniform_p = Rational::new(1.into(), (k as i64).into());
                    let mut image = vec![u32::MAX; k];
                    for (outcome, p) in table {
                        if *p != uniform_p {
                            return None;
                        }
                        if image[outcome[0] as usize] != u32::MAX {
                            return None;
                        }
                        image[outcome[0] as usize] = outcome[1];
                    }
                    if image.iter().any(|&o| o == u32::MAX) {
                        return None;
                    }
                    let perm = Permutation::from_image(image).ok()?;
                    edges.push((i, u, v, perm));
                }
                _ => return None,
            }
        }
        if edges.is_empty() {
            return None;
        }
        Some(PermutationScenario {
            alphabet_size: alphabet_size.unwrap(),
            edges,
            singletons,
            num_observables: hg.num_observables(),
        })
    }

    /// Support-based extendability of a context subset.
    ///
    /// Rooting each connected component of the selected edges and
    /// propagating values symbolically along a spanning tree, every non-tree
    /// edge induces a constraint permutation on the root value. The uniform
    /// permutation tables are reproducible exactly when every induced
    /// constraint is the identity: only then does every root value extend to
    /// a consistent assignment, making all edge marginals uniform. For
    /// distinct bit-flip colors any cycle composes to a fixed-point-free
    /// permutation, so the criterion degenerates to acyclicity of the
    /// selected edge set.
    pub fn extendable(&self, mask: ContextMask) -> bool {
        let selected: Vec<&(usize, usize, usize, Permutation)> =
            self.edges.iter().filter(|(c, ..)| mask.contains(*c)).collect();
        let mut covered = vec![false; self.num_observables];
        let mut adjacency: BTreeMap<usize, Vec<(usize, &Permutation, bool)>> = BTreeMap::new();
        for (_, u, v, perm) in selected.iter().copied() {
            covered[*u] = true;
            covered[*v] = true;
            adjacency.entry(*u).or_default().push((*v, perm, true));
            adjacency.entry(*v).or_default().push((*u, perm, false));
        }

        // Singleton contexts in the mask constrain nothing on their own,
        // but an edge-covered observable is forced to a uniform marginal.
        for (c, v, uniform) in &self.singletons {
            if mask.contains(*c) && covered[*v] && !*uniform {
                return false;
            }
        }

        // BFS with symbolic propagation: to[v] maps the component root's
        // value to v's value.
        let mut to: Vec<Option<Permutation>> = vec![None; self.num_observables];
        for root in 0..self.num_observables {
            if !covered[root] || to[root].is_some() {
                continue;
            }
            to[root] = Some(Permutation::identity(self.alphabet_size));
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let Some(neighbors) = adjacency.get(&u) else { continue };
                for (v, perm, forward) in neighbors {
                    let step =
                        if *forward { (*perm).clone() } else { perm.inverse() };
                    let through = step.compose(to[u].as_ref().unwrap());
                    match &to[*v] {
                        None => {
                            to[*v] = Some(through);
                            queue.push_back(*v);
                        }
                        Some(existing) => {
                            // Non-tree edge: the induced constraint
                            // existing⁻¹ ∘ through must fix every root value.
                            if through != *existing {
                                return false;
                            }
                        }
                    }
                }
            }
        }
        true
    }

    /// Builds the uniform witness for an extendable subset: independently
    /// uniform root values per selected component, exact singleton tables on
    /// uncovered masked observables, and a pinned zero value elsewhere.
    ///
    /// The assignment count is `K^(components)` times the uncovered
    /// singleton supports; the cap guards the materialization.
    pub fn witness(
        &self,
        behavior: &Behavior,
        mask: ContextMask,
        limits: &Limits,
    ) -> Result<NcWitness> {
        let selected: Vec<&(usize, usize, usize, Permutation)> =
            self.edges.iter().filter(|(c, ..)| mask.contains(*c)).collect();
        let mut covered = vec![false; self.num_observables];
        let mut adjacency: BTreeMap<usize, Vec<(usize, &Permutation, bool)>> = BTreeMap::new();
        for (_, u, v, perm) in selected.iter().copied() {
            covered[*u] = true;
            covered[*v] = true;
            adjacency.entry(*u).or_default().push((*v, perm, true));
            adjacency.entry(*v).or_default().push((*u, perm, false));
        }
        let mut to: Vec<Option<Permutation>> = vec![None; self.num_observables];
        let mut components: Vec<Vec<usize>> = Vec::new();
        for root in 0..self.num_observables {
            if !covered[root] || to[root].is_some() {
                continue;
            }
            to[root] = Some(Permutation::identity(self.alphabet_size));
            let mut members = vec![root];
            let mut queue = std::collections::VecDeque::from([root]);
            while let Some(u) = queue.pop_front() {
                let Some(neighbors) = adjacency.get(&u) else { continue };
                for (v, perm, forward) in neighbors {
                    if to[*v].is_none() {
                        let step =
                            if *forward { (*perm).clone() } else { perm.inverse() };
                        to[*v] = Some(step.compose(to[u].as_ref().unwrap()));
                        members.push(*v);
                        queue.push_back(*v);
                    }
                }
            }
            components.push(members);
        }

        // Masked singleton observables not covered by the selected edges
        // reproduce their own tables independently.
        let hg = behavior.hypergraph();
        let mut free_singletons: Vec<(usize, Vec<(u32, Rational)>)> = Vec::new();
        for (c, v, _) in &self.singletons {
            if mask.contains(*c) && !covered[*v] {
                let dist: Vec<(u32, Rational)> =
                    behavior.table(*c).iter().map(|(o, p)| (o[0], p.clone())).collect();
                free_singletons.push((*v, dist));
            }
        }

        let mut count = 1u128;
        for _ in &components {
            count = count.saturating_mul(self.alphabet_size as u128);
        }
        for (_, dist) in &free_singletons {
            count = count.saturating_mul(dist.len() as u128);
        }
        if count > limits.max_assignments as u128 {
            return Err(Error::AssignmentCap { product: count, cap: limits.max_assignments });
        }

        let base = Rational::new(1.into(), (self.alphabet_size as i64).into());
        let mut weights: Vec<(DeterministicAssignment, Rational)> = Vec::new();
        let mut sizes: Vec<u32> = vec![self.alphabet_size as u32; components.len()];
        sizes.extend(free_singletons.iter().map(|(_, d)| d.len() as u32));
        for choice in odometer(sizes) {
            let mut values = vec![0u32; self.num_observables];
            let mut weight = Rational::one();
            for (ci, members) in components.iter().enumerate() {
                let root_value = choice[ci];
                for &v in members {
                    values[v] = to[v].as_ref().unwrap().apply(root_value);
                }
                weight *= &base;
            }
            for (si, (v, dist)) in free_singletons.iter().enumerate() {
                let (o, p) = &dist[choice[components.len() + si] as usize];
                values[*v] = *o;
                weight *= p;
            }
            if !weight.is_zero() {
                weights.push((DeterministicAssignment { values }, weight));
            }
        }
        weights.sort_by(|a, b| a.0.cmp(&b.0));
        // Merge duplicates (possible when two components share a root map).
        let mut merged: Vec<(DeterministicAssignment, Rational)> = Vec::new();
        for (a, w) in weights {
            match merged.last_mut() {
                Some((prev, pw)) if *prev == a => *pw += w,
                _ => merged.push((a, w)),
            }
        }
        let witness = NcWitness { weights: merged };
        if !witness.reproduces(behavior, mask) {
            return Err(Error::Consistency(
                "support witness does not reproduce the masked tables".into(),
            ));
        }
        Ok(witness)
    }
}
