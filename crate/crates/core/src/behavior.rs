//! Behaviors: per-context outcome distributions over a hypergraph, the
//! consistency check, and the free operations (tensor, measurement, trace,
//! wiring, mixture, observable removal).

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::hypergraph::Hypergraph;
use crate::rational::in_unit_interval;
use crate::{Error, Rational, Result};

/// Sparse outcome table of one context: only nonzero probabilities are
/// stored, keyed by the outcome tuple in the context's observable order.
pub type Table = BTreeMap<Vec<u32>, Rational>;

/// Product structure of a composite behavior: a partition of the observables
/// such that the context list is exactly the cross product of the per-part
/// context lists, in part-major lexicographic order (last part fastest).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    parts: Vec<Part>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    /// Sorted observable indices of this part.
    pub observables: Vec<usize>,
    /// The part's own contexts (sorted observable indices), in the order
    /// they first appear in the composite context list.
    pub contexts: Vec<Vec<usize>>,
}

impl Factorization {
    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    fn context_counts(&self) -> Vec<usize> {
        self.parts.iter().map(|p| p.contexts.len()).collect()
    }

    /// Flattens a per-part context multi-index into a composite context
    /// index (part-major, last part fastest).
    pub fn flatten(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.parts.len());
        let mut index = 0usize;
        for (i, part) in self.parts.iter().enumerate() {
            index = index * part.contexts.len() + multi[i];
        }
        index
    }

    /// Derives per-part context lists from a partition of the observables
    /// and checks the cross-product invariant against `contexts`.
    fn derive(parts: Vec<Vec<usize>>, hypergraph: &Hypergraph) -> Result<Factorization> {
        let n = hypergraph.num_observables();
        let mut covered = vec![false; n];
        for part in &parts {
            if part.is_empty() {
                return Err(Error::Structure("empty factorization part".into()));
            }
            if !part.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Structure(format!(
                    "factorization part {part:?} is not strictly ascending"
                )));
            }
            for &v in part {
                if v >= n {
                    return Err(Error::Structure(format!(
                        "factorization part {part:?} references an unknown observable"
                    )));
                }
                if covered[v] {
                    return Err(Error::Structure(format!(
                        "observable {v} belongs to two factorization parts"
                    )));
                }
                covered[v] = true;
            }
        }
        if covered.iter().any(|c| !c) {
            return Err(Error::Structure(
                "factorization parts do not cover all observables".into(),
            ));
        }

        let mut derived: Vec<Part> = parts
            .into_iter()
            .map(|observables| Part { observables, contexts: Vec::new() })
            .collect();
        for ctx in hypergraph.contexts() {
            for part in derived.iter_mut() {
                let proj: Vec<usize> =
                    ctx.iter().copied().filter(|v| part.observables.binary_search(v).is_ok()).collect();
                if proj.is_empty() {
                    return Err(Error::Structure(format!(
                        "context {ctx:?} does not touch factorization part {:?}",
                        part.observables
                    )));
                }
                if !part.contexts.contains(&proj) {
                    part.contexts.push(proj);
                }
            }
        }

        let fact = Factorization { parts: derived };
        // Cross-product check: rebuilding the composite context list from the
        // per-part lists must reproduce it exactly.
        let counts = fact.context_counts();
        let total: usize = counts.iter().product();
        if total != hypergraph.num_contexts() {
            return Err(Error::Structure(format!(
                "factorization implies {total} contexts, scenario has {}",
                hypergraph.num_contexts()
            )));
        }
        let mut multi = vec![0usize; counts.len()];
        for expected_index in 0..total {
            let mut union: Vec<usize> = Vec::new();
            for (p, part) in fact.parts.iter().enumerate() {
                union.extend_from_slice(&part.contexts[multi[p]]);
            }
            union.sort_unstable();
            if union != hypergraph.context(expected_index) {
                return Err(Error::Structure(format!(
                    "context {expected_index} does not match the factorization cross product"
                )));
            }
            for p in (0..counts.len()).rev() {
                multi[p] += 1;
                if multi[p] < counts[p] {
                    break;
                }
                multi[p] = 0;
            }
        }
        Ok(fact)
    }
}

/// A behavior: one outcome distribution per context of a hypergraph.
///
/// Construction checks structure only (table arity, symbol range,
/// probabilities in `[0,1]`); normalization and marginal consistency are
/// decided exactly by [`Behavior::validate`].
///
/// Equality compares the hypergraph and the tables; the factorization is
/// structural metadata and does not participate.
#[derive(Debug, Clone)]
pub struct Behavior {
    hypergraph: Hypergraph,
    tables: Vec<Table>,
    factorization: Option<Factorization>,
}

impl PartialEq for Behavior {
    fn eq(&self, other: &Self) -> bool {
        self.hypergraph == other.hypergraph && self.tables == other.tables
    }
}

impl Eq for Behavior {}

impl Behavior {
    /// Builds a behavior without product structure.
    pub fn new(hypergraph: Hypergraph, tables: Vec<Table>) -> Result<Self> {
        Behavior::with_parts(hypergraph, tables, None)
    }

    /// Builds a behavior carrying a factorization given as a partition of
    /// the observable indices.
    pub fn with_parts(
        hypergraph: Hypergraph,
        tables: Vec<Table>,
        parts: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if tables.len() != hypergraph.num_contexts() {
            return Err(Error::Structure(format!(
                "missing table: {} tables for {} contexts",
                tables.len(),
                hypergraph.num_contexts()
            )));
        }
        let mut clean = Vec::with_capacity(tables.len());
        for (i, table) in tables.into_iter().enumerate() {
            let ctx = hypergraph.context(i);
            let mut t = Table::new();
            for (outcome, p) in table {
                if outcome.len() != ctx.len() {
                    return Err(Error::Structure(format!(
                        "outcome tuple {outcome:?} has arity {} in context {i} of size {}",
                        outcome.len(),
                        ctx.len()
                    )));
                }
                for (pos, &o) in outcome.iter().enumerate() {
                    if o as usize >= hypergraph.alphabet_size(ctx[pos]) {
                        return Err(Error::Structure(format!(
                            "outcome {o} out of range for observable {} in context {i}",
                            ctx[pos]
                        )));
                    }
                }
                if !in_unit_interval(&p) {
                    return Err(Error::Structure(format!(
                        "probability {p} outside [0,1] in context {i}"
                    )));
                }
                if !p.is_zero() {
                    t.insert(outcome, p);
                }
            }
            clean.push(t);
        }
        let factorization = match parts {
            Some(parts) => Some(Factorization::derive(parts, &hypergraph)?),
            None => None,
        };
        Ok(Behavior { hypergraph, tables: clean, factorization })
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.hypergraph
    }

    pub fn table(&self, context: usize) -> &Table {
        &self.tables[context]
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn factorization(&self) -> Option<&Factorization> {
        self.factorization.as_ref()
    }

    /// Probability of one outcome tuple (zero when absent from the sparse
    /// table).
    pub fn prob(&self, context: usize, outcome: &[u32]) -> Rational {
        self.tables[context].get(outcome).cloned().unwrap_or_else(Rational::zero)
    }

    /// Exact per-context normalization and pairwise marginal agreement.
    pub fn validate(&self) -> ValidationReport {
        let one = Rational::one();
        let contexts = (0..self.tables.len())
            .map(|i| {
                let total: Rational = self.tables[i].values().cloned().sum();
                NormalizationCheck { context: i, normalized: total == one, total }
            })
            .collect();

        let mut pairs = Vec::new();
        for a in 0..self.tables.len() {
            for b in a + 1..self.tables.len() {
                pairs.push(self.check_pair(a, b));
            }
        }
        ValidationReport { contexts, pairs }
    }

    fn check_pair(&self, a: usize, b: usize) -> ConsistencyCheck {
        let ctx_a = self.hypergraph.context(a);
        let ctx_b = self.hypergraph.context(b);
        let shared: Vec<usize> =
            ctx_a.iter().copied().filter(|v| ctx_b.binary_search(v).is_ok()).collect();
        if shared.is_empty() {
            return ConsistencyCheck { left: a, right: b, consistent: true, violation: None };
        }
        let pos_a: Vec<usize> =
            shared.iter().map(|v| ctx_a.binary_search(v).unwrap()).collect();
        let pos_b: Vec<usize> =
            shared.iter().map(|v| ctx_b.binary_search(v).unwrap()).collect();
        let ma = table_marginal(&self.tables[a], &pos_a);
        let mb = table_marginal(&self.tables[b], &pos_b);
        let keys: BTreeSet<&Vec<u32>> = ma.keys().chain(mb.keys()).collect();
        for key in keys {
            let va = ma.get(key).cloned().unwrap_or_else(Rational::zero);
            let vb = mb.get(key).cloned().unwrap_or_else(Rational::zero);
            if va != vb {
                return ConsistencyCheck {
                    left: a,
                    right: b,
                    consistent: false,
                    violation: Some(MarginalViolation {
                        shared,
                        outcome: key.clone(),
                        left_marginal: va,
                        right_marginal: vb,
                    }),
                };
            }
        }
        ConsistencyCheck { left: a, right: b, consistent: true, violation: None }
    }

    /// Tensor product. Observables are the disjoint union (name collisions
    /// are resolved by qualifying every name with its operand index),
    /// contexts are all pairs in operand-major order, and entries are exact
    /// products. The result records the combined factorization.
    pub fn tensor(&self, other: &Behavior) -> Behavior {
        let n1 = self.hypergraph.num_observables();
        let collide = self
            .hypergraph
            .observable_names()
            .iter()
            .any(|n| other.hypergraph.observable_index(n).is_some());
        let qualify = |k: usize, name: &str| {
            if collide {
                format!("{}:{}", k, name)
            } else {
                name.to_string()
            }
        };
        let mut observables: Vec<String> = Vec::new();
        observables.extend(self.hypergraph.observable_names().iter().map(|n| qualify(1, n)));
        observables.extend(other.hypergraph.observable_names().iter().map(|n| qualify(2, n)));
        let mut alphabets = self.hypergraph.alphabets().to_vec();
        alphabets.extend(other.hypergraph.alphabets().iter().cloned());

        let mut contexts = Vec::new();
        let mut tables = Vec::new();
        for (i, ctx1) in self.hypergraph.contexts().iter().enumerate() {
            for (j, ctx2) in other.hypergraph.contexts().iter().enumerate() {
                let mut ctx = ctx1.clone();
                ctx.extend(ctx2.iter().map(|&v| v + n1));
                contexts.push(ctx);
                let mut table = Table::new();
                for (o1, p1) in &self.tables[i] {
                    for (o2, p2) in &other.tables[j] {
                        let mut key = o1.clone();
                        key.extend_from_slice(o2);
                        table.insert(key, p1 * p2);
                    }
                }
                tables.push(table);
            }
        }

        let part_list = |b: &Behavior, offset: usize| -> Vec<Vec<usize>> {
            match &b.factorization {
                Some(f) => f
                    .parts
                    .iter()
                    .map(|p| p.observables.iter().map(|&v| v + offset).collect())
                    .collect(),
                None => vec![(offset..offset + b.hypergraph.num_observables()).collect()],
            }
        };
        let mut parts = part_list(self, 0);
        parts.extend(part_list(other, n1));

        let hypergraph = Hypergraph::new(observables, alphabets, contexts)
            .expect("tensor of valid scenarios is valid");
        Behavior::with_parts(hypergraph, tables, Some(parts))
            .expect("tensor of valid behaviors is valid")
    }

    /// Pins one part's input to a fixed context of that part. The pinned
    /// part's outcome coordinates are retained; its other observables (the
    /// alternative inputs) leave the scenario. Pinning every part in turn
    /// yields a single-context behavior.
    pub fn partial_measure(&self, part: usize, fixed_input: usize) -> Result<Behavior> {
        let fact = self.factorization.as_ref().ok_or_else(|| {
            Error::Unsupported("partial measurement requires a factorization".into())
        })?;
        if part >= fact.parts.len() {
            return Err(Error::Structure(format!("no part {part}")));
        }
        if fixed_input >= fact.parts[part].contexts.len() {
            return Err(Error::Structure(format!(
                "part {part} has no context {fixed_input}"
            )));
        }
        let pinned = fact.parts[part].contexts[fixed_input].clone();
        let dropped: Vec<usize> = fact.parts[part]
            .observables
            .iter()
            .copied()
            .filter(|v| pinned.binary_search(v).is_err())
            .collect();
        let n = self.hypergraph.num_observables();
        let mut new_index = vec![usize::MAX; n];
        let mut kept_names = Vec::new();
        let mut kept_alphabets = Vec::new();
        for v in 0..n {
            if dropped.binary_search(&v).is_err() {
                new_index[v] = kept_names.len();
                kept_names.push(self.hypergraph.observable_names()[v].clone());
                kept_alphabets.push(self.hypergraph.alphabet(v).to_vec());
            }
        }
        let remap = |ctx: &[usize]| -> Vec<usize> { ctx.iter().map(|&v| new_index[v]).collect() };

        let mut new_parts: Vec<Vec<usize>> = Vec::new();
        for (q, p) in fact.parts.iter().enumerate() {
            if q == part {
                new_parts.push(remap(&pinned));
            } else {
                new_parts.push(remap(&p.observables));
            }
        }

        // Iterate the reduced cross product, copying tables from the
        // corresponding composite contexts. Outcome tuples are unchanged:
        // every observable of a selected context survives, and renumbering
        // preserves order.
        let counts = fact.context_counts();
        let mut reduced_counts = counts.clone();
        reduced_counts[part] = 1;
        let total: usize = reduced_counts.iter().product();
        let mut contexts = Vec::with_capacity(total);
        let mut tables = Vec::with_capacity(total);
        let mut multi = vec![0usize; counts.len()];
        for _ in 0..total {
            let mut old_multi = multi.clone();
            old_multi[part] = fixed_input;
            let old = fact.flatten(&old_multi);
            contexts.push(remap(self.hypergraph.context(old)));
            tables.push(self.tables[old].clone());
            for p in (0..counts.len()).rev() {
                multi[p] += 1;
                if multi[p] < reduced_counts[p] {
                    break;
                }
                multi[p] = 0;
            }
        }
        let hypergraph = Hypergraph::new(kept_names, kept_alphabets, contexts)?;
        Behavior::with_parts(hypergraph, tables, Some(new_parts))
    }

    /// Sums out one part entirely. Well defined only when the marginal does
    /// not depend on the traced part's input; this is cross-checked over
    /// every input of the part and reported as a consistency violation
    /// otherwise.
    pub fn partial_trace(&self, part: usize) -> Result<Behavior> {
        let fact = self.factorization.as_ref().ok_or_else(|| {
            Error::Unsupported("partial trace requires a factorization".into())
        })?;
        if part >= fact.parts.len() {
            return Err(Error::Structure(format!("no part {part}")));
        }
        if fact.parts.len() < 2 {
            return Err(Error::Unsupported("cannot trace out the only part".into()));
        }
        let removed = &fact.parts[part].observables;
        let n = self.hypergraph.num_observables();
        let mut new_index = vec![usize::MAX; n];
        let mut kept_names = Vec::new();
        let mut kept_alphabets = Vec::new();
        for v in 0..n {
            if removed.binary_search(&v).is_err() {
                new_index[v] = kept_names.len();
                kept_names.push(self.hypergraph.observable_names()[v].clone());
                kept_alphabets.push(self.hypergraph.alphabet(v).to_vec());
            }
        }

        let counts = fact.context_counts();
        let mut reduced_counts = counts.clone();
        reduced_counts[part] = 1;
        let total: usize = reduced_counts.iter().product();
        let mut contexts = Vec::with_capacity(total);
        let mut tables = Vec::with_capacity(total);
        let mut multi = vec![0usize; counts.len()];
        for _ in 0..total {
            let mut marginal: Option<Table> = None;
            for j in 0..counts[part] {
                let mut old_multi = multi.clone();
                old_multi[part] = j;
                let old = fact.flatten(&old_multi);
                let ctx = self.hypergraph.context(old);
                let keep: Vec<usize> = ctx
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| removed.binary_search(v).is_err())
                    .map(|(pos, _)| pos)
                    .collect();
                let m = table_marginal(&self.tables[old], &keep);
                match &marginal {
                    None => marginal = Some(m),
                    Some(first) => {
                        if *first != m {
                            return Err(Error::Consistency(format!(
                                "marginal over part {part} depends on its input (inputs 0 and {j} differ)"
                            )));
                        }
                    }
                }
            }
            let mut old_multi = multi.clone();
            old_multi[part] = 0;
            let old = fact.flatten(&old_multi);
            let ctx: Vec<usize> = self
                .hypergraph
                .context(old)
                .iter()
                .copied()
                .filter(|v| removed.binary_search(v).is_err())
                .map(|v| new_index[v])
                .collect();
            contexts.push(ctx);
            tables.push(marginal.unwrap());
            for p in (0..counts.len()).rev() {
                multi[p] += 1;
                if multi[p] < reduced_counts[p] {
                    break;
                }
                multi[p] = 0;
            }
        }

        let mut new_parts: Vec<Vec<usize>> = Vec::new();
        for (q, p) in fact.parts.iter().enumerate() {
            if q != part {
                new_parts.push(p.observables.iter().map(|&v| new_index[v]).collect());
            }
        }
        let hypergraph = Hypergraph::new(kept_names, kept_alphabets, contexts)?;
        Behavior::with_parts(hypergraph, tables, Some(new_parts))
    }

    /// Simple wiring `W(a|y) = Σ_{b'} self(a|b') · other(b'|y)`.
    ///
    /// Both operands must have single-observable contexts only. Every
    /// outcome alphabet of `other` must equal (as a set) the input labels of
    /// `self` — the names of its context observables — and all `self`
    /// observables must share one outcome alphabet, which becomes the output
    /// alphabet of the wiring.
    pub fn wire(&self, other: &Behavior) -> Result<Behavior> {
        for b in [self, other] {
            if b.hypergraph.contexts().iter().any(|c| c.len() != 1) {
                return Err(Error::Unsupported(
                    "wiring requires single-observable contexts on both operands".into(),
                ));
            }
        }
        let out_alphabet = self.hypergraph.alphabet(self.hypergraph.context(0)[0]).to_vec();
        for ctx in self.hypergraph.contexts() {
            if self.hypergraph.alphabet(ctx[0]) != out_alphabet.as_slice() {
                return Err(Error::Dimension(
                    "wiring requires a common outcome alphabet on the first operand".into(),
                ));
            }
        }
        // Input labels of `self`: observable names, one per context.
        let labels: BTreeMap<&str, usize> = self
            .hypergraph
            .contexts()
            .iter()
            .enumerate()
            .map(|(i, ctx)| (self.hypergraph.observable_names()[ctx[0]].as_str(), i))
            .collect();

        let mut observables = Vec::new();
        let mut tables = Vec::new();
        for (jy, ctx) in other.hypergraph.contexts().iter().enumerate() {
            let w = ctx[0];
            let alphabet = other.hypergraph.alphabet(w);
            let mut to_input = Vec::with_capacity(alphabet.len());
            for sym in alphabet {
                match labels.get(sym.as_str()) {
                    Some(&i) => to_input.push(i),
                    None => {
                        return Err(Error::Dimension(format!(
                            "outcome {sym:?} of {} names no input of the first operand",
                            other.hypergraph.observable_names()[w]
                        )));
                    }
                }
            }
            if alphabet.len() != labels.len() {
                return Err(Error::Dimension(format!(
                    "outcome alphabet of {} does not exhaust the first operand's inputs",
                    other.hypergraph.observable_names()[w]
                )));
            }
            observables.push(other.hypergraph.observable_names()[w].clone());
            let mut table = Table::new();
            for a in 0..out_alphabet.len() as u32 {
                let mut total = Rational::zero();
                for (bp, p2) in &other.tables[jy] {
                    let input = to_input[bp[0] as usize];
                    total += self.prob(input, &[a]) * p2;
                }
                if !total.is_zero() {
                    table.insert(vec![a], total);
                }
            }
            tables.push(table);
        }
        let n = observables.len();
        let alphabets = vec![out_alphabet; n];
        let contexts = (0..n).map(|i| vec![i]).collect();
        let hypergraph = Hypergraph::new(observables, alphabets, contexts)?;
        Behavior::new(hypergraph, tables)
    }

    /// Entrywise convex combination `λ·self + (1−λ)·other` on a shared
    /// hypergraph.
    pub fn mix(&self, other: &Behavior, lambda: &Rational) -> Result<Behavior> {
        if self.hypergraph != other.hypergraph {
            return Err(Error::Dimension("mixture requires identical hypergraphs".into()));
        }
        if !in_unit_interval(lambda) {
            return Err(Error::Range(format!("mixture weight {lambda} outside [0,1]")));
        }
        let co = Rational::one() - lambda;
        let mut tables = Vec::with_capacity(self.tables.len());
        for i in 0..self.tables.len() {
            let keys: BTreeSet<Vec<u32>> =
                self.tables[i].keys().chain(other.tables[i].keys()).cloned().collect();
            let mut table = Table::new();
            for key in keys {
                let p = lambda * self.prob(i, &key) + &co * other.prob(i, &key);
                if !p.is_zero() {
                    table.insert(key, p);
                }
            }
            tables.push(table);
        }
        let parts = match (&self.factorization, &other.factorization) {
            (Some(a), Some(b)) if a == b => {
                Some(a.parts.iter().map(|p| p.observables.clone()).collect())
            }
            _ => None,
        };
        Behavior::with_parts(self.hypergraph.clone(), tables, parts)
    }

    /// Deletes one observable: it is marginalized out of every context that
    /// contains it, contexts that become empty are dropped, and contexts
    /// that become equal as sets are merged. Merging requires the marginal
    /// tables to agree exactly, which holds for any consistent behavior.
    pub fn remove_observable(&self, observable: usize) -> Result<Behavior> {
        let n = self.hypergraph.num_observables();
        if observable >= n {
            return Err(Error::Structure(format!("no observable {observable}")));
        }
        if n == 1 {
            return Err(Error::Unsupported("cannot remove the only observable".into()));
        }
        let mut names = Vec::new();
        let mut alphabets = Vec::new();
        let mut new_index = vec![usize::MAX; n];
        for v in 0..n {
            if v != observable {
                new_index[v] = names.len();
                names.push(self.hypergraph.observable_names()[v].clone());
                alphabets.push(self.hypergraph.alphabet(v).to_vec());
            }
        }
        let mut contexts: Vec<Vec<usize>> = Vec::new();
        let mut tables: Vec<Table> = Vec::new();
        for (i, ctx) in self.hypergraph.contexts().iter().enumerate() {
            let keep: Vec<usize> = ctx
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != observable)
                .map(|(pos, _)| pos)
                .collect();
            if keep.is_empty() {
                continue;
            }
            let table = if keep.len() == ctx.len() {
                self.tables[i].clone()
            } else {
                table_marginal(&self.tables[i], &keep)
            };
            let new_ctx: Vec<usize> = keep.iter().map(|&pos| new_index[ctx[pos]]).collect();
            match contexts.iter().position(|c| *c == new_ctx) {
                Some(existing) => {
                    if tables[existing] != table {
                        return Err(Error::Consistency(format!(
                            "contexts merging onto {new_ctx:?} disagree after removing observable {observable}"
                        )));
                    }
                }
                None => {
                    contexts.push(new_ctx);
                    tables.push(table);
                }
            }
        }
        if contexts.is_empty() {
            return Err(Error::Structure(
                "removal leaves no contexts; the scenario would be empty".into(),
            ));
        }
        let hypergraph = Hypergraph::new(names, alphabets, contexts)?;
        Behavior::new(hypergraph, tables)
    }
}

/// Marginal of a sparse table onto the given coordinate positions.
pub fn table_marginal(table: &Table, keep_positions: &[usize]) -> Table {
    let mut out = Table::new();
    for (outcome, p) in table {
        let key: Vec<u32> = keep_positions.iter().map(|&pos| outcome[pos]).collect();
        let entry = out.entry(key).or_insert_with(Rational::zero);
        *entry += p;
    }
    out
}

/// Per-context normalization status.
#[derive(Debug, Clone)]
pub struct NormalizationCheck {
    pub context: usize,
    pub normalized: bool,
    pub total: Rational,
}

/// Marginal agreement status of one context pair, with the first violating
/// marginal when the pair disagrees.
#[derive(Debug, Clone)]
pub struct ConsistencyCheck {
    pub left: usize,
    pub right: usize,
    pub consistent: bool,
    pub violation: Option<MarginalViolation>,
}

#[derive(Debug, Clone)]
pub struct MarginalViolation {
    /// Shared observables of the pair (global indices).
    pub shared: Vec<usize>,
    /// First outcome tuple on the shared observables where the marginals
    /// differ.
    pub outcome: Vec<u32>,
    pub left_marginal: Rational,
    pub right_marginal: Rational,
}

/// Outcome of [`Behavior::validate`]: empty of violations exactly when the
/// behavior lies in the consistency polytope.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub contexts: Vec<NormalizationCheck>,
    pub pairs: Vec<ConsistencyCheck>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.contexts.iter().all(|c| c.normalized) && self.pairs.iter().all(|p| p.consistent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    fn table(entries: &[(&[u32], Rational)]) -> Table {
        entries.iter().map(|(o, p)| (o.to_vec(), p.clone())).collect()
    }

    fn anticorrelation() -> Table {
        table(&[(&[0, 1], ratio(1, 2)), (&[1, 0], ratio(1, 2))])
    }

    fn correlation() -> Table {
        table(&[(&[0, 0], ratio(1, 2)), (&[1, 1], ratio(1, 2))])
    }

    /// The triangle behavior with anticorrelation on all three edges.
    fn three_cycle() -> Behavior {
        let hg = Hypergraph::binary(
            names(&["A", "B", "C"]),
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        Behavior::new(hg, vec![anticorrelation(), anticorrelation(), anticorrelation()]).unwrap()
    }

    fn uniform_coin(name: &str) -> Behavior {
        let hg = Hypergraph::binary(names(&[name]), vec![vec![0]]).unwrap();
        Behavior::new(hg, vec![table(&[(&[0], ratio(1, 2)), (&[1], ratio(1, 2))])]).unwrap()
    }

    #[test]
    fn three_cycle_is_consistent_and_normalized() {
        let report = three_cycle().validate();
        assert!(report.is_valid());
        assert!(report.contexts.iter().all(|c| c.normalized));
        assert!(report.pairs.iter().all(|p| p.consistent));
    }

    #[test]
    fn single_context_deterministic_behavior_is_consistent() {
        let hg = Hypergraph::binary(names(&["A", "B"]), vec![vec![0, 1]]).unwrap();
        let b = Behavior::new(hg, vec![table(&[(&[1, 0], ratio(1, 1))])]).unwrap();
        assert!(b.validate().is_valid());
    }

    #[test]
    fn correlated_third_edge_stays_consistent() {
        // Replacing the {A,C} table with perfect correlation keeps all four
        // single-observable marginals uniform, hence consistency survives.
        let hg = Hypergraph::binary(
            names(&["A", "B", "C"]),
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        let b = Behavior::new(hg, vec![anticorrelation(), anticorrelation(), correlation()])
            .unwrap();
        assert!(b.validate().is_valid());
    }

    #[test]
    fn signaling_pair_is_flagged_with_first_violation() {
        let hg = Hypergraph::binary(names(&["A", "B"]), vec![vec![0], vec![0, 1]]).unwrap();
        let b = Behavior::new(
            hg,
            vec![
                table(&[(&[0], ratio(1, 1))]),
                table(&[(&[1, 0], ratio(1, 2)), (&[1, 1], ratio(1, 2))]),
            ],
        )
        .unwrap();
        let report = b.validate();
        assert!(!report.is_valid());
        let bad = report.pairs.iter().find(|p| !p.consistent).unwrap();
        let v = bad.violation.as_ref().unwrap();
        assert_eq!(v.shared, vec![0]);
        assert_eq!(v.outcome, vec![0]);
        assert_eq!(v.left_marginal, ratio(1, 1));
        assert_eq!(v.right_marginal, ratio(0, 1));
    }

    #[test]
    fn unnormalized_table_is_flagged() {
        let hg = Hypergraph::binary(names(&["A", "B"]), vec![vec![0, 1]]).unwrap();
        let b = Behavior::new(hg, vec![table(&[(&[0, 0], ratio(1, 2))])]).unwrap();
        let report = b.validate();
        assert!(!report.is_valid());
        assert!(!report.contexts[0].normalized);
        assert_eq!(report.contexts[0].total, ratio(1, 2));
    }

    #[test]
    fn missing_table_is_a_structural_error() {
        let hg = Hypergraph::binary(names(&["A", "B"]), vec![vec![0], vec![1]]).unwrap();
        let err = Behavior::new(hg, vec![table(&[(&[0], ratio(1, 1))])]).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
    }

    #[test]
    fn tensor_of_two_coins_is_the_product_distribution() {
        let t = uniform_coin("A").tensor(&uniform_coin("B"));
        assert_eq!(t.hypergraph().num_contexts(), 1);
        assert_eq!(t.table(0).len(), 4);
        assert!(t.table(0).values().all(|p| *p == ratio(1, 4)));
        assert!(t.factorization().is_some());
        assert_eq!(t.factorization().unwrap().num_parts(), 2);
    }

    #[test]
    fn tensor_with_point_behavior_appends_a_deterministic_coordinate() {
        let hg = Hypergraph::binary(names(&["P"]), vec![vec![0]]).unwrap();
        let point = Behavior::new(hg, vec![table(&[(&[1], ratio(1, 1))])]).unwrap();
        let t = three_cycle().tensor(&point);
        assert_eq!(t.hypergraph().num_contexts(), 3);
        for i in 0..3 {
            for (outcome, p) in t.table(i) {
                assert_eq!(outcome.len(), 3);
                assert_eq!(outcome[2], 1);
                assert_eq!(*p, ratio(1, 2));
            }
        }
    }

    #[test]
    fn tensor_of_cycles_multiplies_tables() {
        let t = three_cycle().tensor(&three_cycle());
        assert_eq!(t.hypergraph().num_contexts(), 9);
        assert_eq!(t.hypergraph().num_observables(), 6);
        // Name collision forced qualification.
        assert!(t.hypergraph().observable_index("1:A").is_some());
        for i in 0..9 {
            assert_eq!(t.table(i).len(), 4);
            assert!(t.table(i).values().all(|p| *p == ratio(1, 4)));
        }
        assert!(t.validate().is_valid());
    }

    #[test]
    fn tensor_is_associative_up_to_renaming() {
        let a = uniform_coin("A");
        let b = three_cycle();
        let c = uniform_coin("D");
        let left = a.tensor(&b).tensor(&c);
        let right = a.tensor(&b.tensor(&c));
        assert_eq!(left.hypergraph().contexts(), right.hypergraph().contexts());
        assert_eq!(left.tables(), right.tables());
    }

    #[test]
    fn partial_trace_of_tensor_recovers_factors() {
        let p1 = three_cycle();
        let p2 = uniform_coin("D");
        let t = p1.tensor(&p2);
        assert_eq!(t.partial_trace(1).unwrap(), p1);
        assert_eq!(t.partial_trace(0).unwrap(), p2);
    }

    #[test]
    fn partial_trace_rejects_signaling_composites() {
        // Hand-built two-part behavior where part 2's marginal depends on
        // part 1's input.
        let hg = Hypergraph::binary(names(&["X0", "X1", "Y"]), vec![vec![0, 2], vec![1, 2]])
            .unwrap();
        let b = Behavior::with_parts(
            hg,
            vec![
                table(&[(&[0, 0], ratio(1, 1))]),
                table(&[(&[0, 1], ratio(1, 1))]),
            ],
            Some(vec![vec![0, 1], vec![2]]),
        )
        .unwrap();
        // Tracing part 1 leaves the Y marginal, which differs between the
        // two inputs of part 0: consistency violation.
        let err = b.partial_trace(0).unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
    }

    #[test]
    fn partial_measure_pins_an_input() {
        let p1 = uniform_coin("A");
        let p2 = three_cycle();
        let t = p1.tensor(&p2);
        let pinned = t.partial_measure(1, 0).unwrap();
        // Part 2 pinned to its first context {A,B}: observable C drops out.
        assert_eq!(pinned.hypergraph().num_observables(), 3);
        assert_eq!(pinned.hypergraph().num_contexts(), 1);
        // Pin the remaining part as well: a single-context behavior remains.
        let fully = pinned.partial_measure(0, 0).unwrap();
        assert_eq!(fully.hypergraph().num_contexts(), 1);
        assert_eq!(fully.hypergraph().num_observables(), 3);
    }

    #[test]
    fn pin_then_trace_recovers_the_other_factor() {
        let p1 = three_cycle();
        let p2 = uniform_coin("D");
        let t = p1.tensor(&p2);
        let pinned = t.partial_measure(0, 1).unwrap();
        let recovered = pinned.partial_trace(0).unwrap();
        assert_eq!(recovered, p2);
    }

    #[test]
    fn partial_measure_requires_factorization() {
        let b = three_cycle();
        assert!(matches!(b.partial_measure(0, 0), Err(Error::Unsupported(_))));
        assert!(matches!(b.partial_trace(0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn pinning_the_only_context_of_a_single_part_behavior() {
        let hg = Hypergraph::binary(names(&["A", "B"]), vec![vec![0, 1]]).unwrap();
        let b = Behavior::with_parts(
            hg,
            vec![correlation()],
            Some(vec![vec![0, 1]]),
        )
        .unwrap();
        let pinned = b.partial_measure(0, 0).unwrap();
        assert_eq!(pinned.hypergraph().num_contexts(), 1);
        assert_eq!(pinned.table(0), &correlation());
    }

    #[test]
    fn mix_endpoints_and_idempotence() {
        let p = three_cycle();
        let hg = p.hypergraph().clone();
        let q = Behavior::new(
            hg,
            vec![correlation(), correlation(), correlation()],
        )
        .unwrap();
        assert_eq!(p.mix(&p, &ratio(1, 3)).unwrap(), p);
        assert_eq!(p.mix(&q, &ratio(1, 1)).unwrap(), p);
        assert_eq!(p.mix(&q, &ratio(0, 1)).unwrap(), q);
        let half = p.mix(&q, &ratio(1, 2)).unwrap();
        assert_eq!(half.prob(0, &[0, 1]), ratio(1, 4));
        assert_eq!(half.prob(0, &[0, 0]), ratio(1, 4));
        assert!(half.validate().is_valid());
    }

    #[test]
    fn mix_rejects_mismatched_scenarios_and_bad_weights() {
        let p = three_cycle();
        let c = uniform_coin("A");
        assert!(matches!(p.mix(&c, &ratio(1, 2)), Err(Error::Dimension(_))));
        assert!(matches!(p.mix(&p, &ratio(3, 2)), Err(Error::Range(_))));
    }

    #[test]
    fn wire_with_one_hot_selector_replicates_a_column() {
        // First operand: two inputs A, B with distinct distributions.
        let hg1 = Hypergraph::binary(names(&["A", "B"]), vec![vec![0], vec![1]]).unwrap();
        let p1 = Behavior::new(
            hg1,
            vec![
                table(&[(&[0], ratio(1, 1))]),
                table(&[(&[0], ratio(1, 4)), (&[1], ratio(3, 4))]),
            ],
        )
        .unwrap();
        // Second operand: two inputs, deterministically selecting input "B".
        let hg2 = Hypergraph::new(
            names(&["Y0", "Y1"]),
            vec![
                vec!["A".into(), "B".into()],
                vec!["A".into(), "B".into()],
            ],
            vec![vec![0], vec![1]],
        )
        .unwrap();
        let p2 = Behavior::new(
            hg2,
            vec![
                table(&[(&[1], ratio(1, 1))]),
                table(&[(&[1], ratio(1, 1))]),
            ],
        )
        .unwrap();
        let w = p1.wire(&p2).unwrap();
        assert_eq!(w.hypergraph().num_contexts(), 2);
        for i in 0..2 {
            assert_eq!(w.prob(i, &[0]), ratio(1, 4));
            assert_eq!(w.prob(i, &[1]), ratio(3, 4));
        }
    }

    #[test]
    fn wire_through_identity_channel_reindexes() {
        let hg1 = Hypergraph::binary(names(&["A", "B"]), vec![vec![0], vec![1]]).unwrap();
        let p1 = Behavior::new(
            hg1,
            vec![
                table(&[(&[0], ratio(2, 3)), (&[1], ratio(1, 3))]),
                table(&[(&[0], ratio(1, 5)), (&[1], ratio(4, 5))]),
            ],
        )
        .unwrap();
        // Identity channel: outputs the queried input's label with
        // certainty.
        let hg2 = Hypergraph::new(
            names(&["U", "V"]),
            vec![
                vec!["A".into(), "B".into()],
                vec!["A".into(), "B".into()],
            ],
            vec![vec![0], vec![1]],
        )
        .unwrap();
        let id = Behavior::new(
            hg2,
            vec![
                table(&[(&[0], ratio(1, 1))]),
                table(&[(&[1], ratio(1, 1))]),
            ],
        )
        .unwrap();
        let w = p1.wire(&id).unwrap();
        assert_eq!(w.table(0), p1.table(0));
        assert_eq!(w.table(1), p1.table(1));
    }

    #[test]
    fn wire_rejects_alphabet_mismatch() {
        let hg1 = Hypergraph::binary(names(&["A", "B"]), vec![vec![0], vec![1]]).unwrap();
        let p1 = Behavior::new(
            hg1,
            vec![
                table(&[(&[0], ratio(1, 1))]),
                table(&[(&[1], ratio(1, 1))]),
            ],
        )
        .unwrap();
        let p2 = uniform_coin("Y");
        assert!(matches!(p1.wire(&p2), Err(Error::Dimension(_))));
    }

    #[test]
    fn remove_observable_marginalizes_and_merges() {
        // Removing C from the triangle: {B,C} and {A,C} collapse onto {B}
        // and {A}; {A,B} keeps its anticorrelation.
        let b = three_cycle();
        let r = b.remove_observable(2).unwrap();
        assert_eq!(r.hypergraph().num_observables(), 2);
        assert_eq!(r.hypergraph().contexts(), &[vec![0, 1], vec![1], vec![0]]);
        assert_eq!(r.table(0), &anticorrelation());
        assert_eq!(r.prob(1, &[0]), ratio(1, 2));
        assert!(r.validate().is_valid());
    }

    #[test]
    fn remove_observable_rejects_disagreeing_merges() {
        // Two contexts {A,B} marginalize onto {A} with different marginals.
        let hg = Hypergraph::binary(names(&["A", "B", "C"]), vec![vec![0, 1], vec![0, 2]])
            .unwrap();
        let b = Behavior::new(
            hg,
            vec![
                table(&[(&[0, 0], ratio(1, 1))]),
                table(&[(&[1, 0], ratio(1, 1))]),
            ],
        )
        .unwrap();
        // Removing C first collapses {A,C} onto {A} (deterministically 1);
        // removing B then collapses {A,B} onto {A} (deterministically 0),
        // and the merge must reject the disagreement.
        let err = b.remove_observable(2).unwrap().remove_observable(1).unwrap_err();
        assert!(matches!(err, Error::Consistency(_)));
    }

    #[test]
    fn removing_down_to_single_observables_gives_singleton_contexts() {
        let b = three_cycle();
        let r = b.remove_observable(2).unwrap().remove_observable(1).unwrap();
        assert!(r.hypergraph().contexts().iter().all(|c| c.len() == 1));
        assert!(r.validate().is_valid());
    }
}
