//! Measurement scenario: named observables, per-observable outcome
//! alphabets, and contexts (hyperedges of jointly measurable observables).

use std::collections::BTreeSet;

use crate::{Error, Result};

/// A measurement scenario. Contexts are stored with their observable indices
/// sorted ascending, and the context list order is part of the scenario
/// identity (tables, masks and serialization all refer to it).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    observables: Vec<String>,
    alphabets: Vec<Vec<String>>,
    contexts: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Validates and builds a scenario.
    ///
    /// Requirements: distinct non-empty observable names without `','`
    /// (the comma is the serialization separator for outcome tuples); one
    /// alphabet of at least two distinct symbols per observable; non-empty
    /// contexts of strictly ascending observable indices, pairwise distinct
    /// as sets; every observable covered by at least one context.
    pub fn new(
        observables: Vec<String>,
        alphabets: Vec<Vec<String>>,
        contexts: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if observables.is_empty() {
            return Err(Error::Structure("scenario has no observables".into()));
        }
        if alphabets.len() != observables.len() {
            return Err(Error::Structure(format!(
                "{} alphabets for {} observables",
                alphabets.len(),
                observables.len()
            )));
        }
        let mut seen_names = BTreeSet::new();
        for name in &observables {
            if name.is_empty() || name.contains(',') {
                return Err(Error::Structure(format!(
                    "observable name {name:?} is empty or contains ','"
                )));
            }
            if !seen_names.insert(name.clone()) {
                return Err(Error::Structure(format!("duplicate observable name {name:?}")));
            }
        }
        for (v, alphabet) in alphabets.iter().enumerate() {
            if alphabet.len() < 2 {
                return Err(Error::Structure(format!(
                    "alphabet of observable {} has {} symbols; at least 2 required",
                    observables[v],
                    alphabet.len()
                )));
            }
            let mut seen = BTreeSet::new();
            for sym in alphabet {
                if sym.is_empty() || sym.contains(',') {
                    return Err(Error::Structure(format!(
                        "outcome symbol {sym:?} of observable {} is empty or contains ','",
                        observables[v]
                    )));
                }
                if !seen.insert(sym.clone()) {
                    return Err(Error::Structure(format!(
                        "duplicate outcome symbol {sym:?} for observable {}",
                        observables[v]
                    )));
                }
            }
        }
        if contexts.is_empty() {
            return Err(Error::Structure("scenario has no contexts".into()));
        }
        let mut seen_contexts = BTreeSet::new();
        let mut covered = vec![false; observables.len()];
        for ctx in &contexts {
            if ctx.is_empty() {
                return Err(Error::Structure("empty context".into()));
            }
            if !ctx.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Structure(format!(
                    "context {ctx:?} is not strictly ascending; contexts are canonically sorted"
                )));
            }
            if *ctx.last().unwrap() >= observables.len() {
                return Err(Error::Structure(format!(
                    "context {ctx:?} references an unknown observable"
                )));
            }
            if !seen_contexts.insert(ctx.clone()) {
                return Err(Error::Structure(format!("duplicate context {ctx:?}")));
            }
            for &v in ctx {
                covered[v] = true;
            }
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::Structure(format!(
                "observable {} appears in no context",
                observables[v]
            )));
        }
        Ok(Hypergraph { observables, alphabets, contexts })
    }

    /// Scenario with binary `{"0","1"}` alphabets for every observable.
    pub fn binary(observables: Vec<String>, contexts: Vec<Vec<usize>>) -> Result<Self> {
        let alphabets = vec![vec!["0".into(), "1".into()]; observables.len()];
        Hypergraph::new(observables, alphabets, contexts)
    }

    pub fn num_observables(&self) -> usize {
        self.observables.len()
    }

    pub fn num_contexts(&self) -> usize {
        self.contexts.len()
    }

    pub fn observable_names(&self) -> &[String] {
        &self.observables
    }

    pub fn observable_index(&self, name: &str) -> Option<usize> {
        self.observables.iter().position(|n| n == name)
    }

    pub fn alphabet(&self, observable: usize) -> &[String] {
        &self.alphabets[observable]
    }

    pub fn alphabets(&self) -> &[Vec<String>] {
        &self.alphabets
    }

    pub fn alphabet_size(&self, observable: usize) -> usize {
        self.alphabets[observable].len()
    }

    pub fn context(&self, index: usize) -> &[usize] {
        &self.contexts[index]
    }

    pub fn contexts(&self) -> &[Vec<usize>] {
        &self.contexts
    }

    /// True when every context has exactly two observables.
    pub fn is_graph_scenario(&self) -> bool {
        self.contexts.iter().all(|c| c.len() == 2)
    }

    /// Number of global deterministic assignments, i.e. the product of all
    /// alphabet sizes.
    pub fn assignment_count(&self) -> u128 {
        self.alphabets
            .iter()
            .fold(1u128, |acc, a| acc.saturating_mul(a.len() as u128))
    }

    /// Cartesian outcome space size of one context.
    pub fn context_outcome_count(&self, index: usize) -> u128 {
        self.contexts[index]
            .iter()
            .fold(1u128, |acc, &v| acc.saturating_mul(self.alphabets[v].len() as u128))
    }

    /// Iterates all outcome tuples of a context in canonical (odometer)
    /// order, last coordinate fastest.
    pub fn context_outcomes(&self, index: usize) -> impl Iterator<Item = Vec<u32>> + '_ {
        let sizes: Vec<u32> =
            self.contexts[index].iter().map(|&v| self.alphabets[v].len() as u32).collect();
        odometer(sizes)
    }
}

/// Odometer iteration over mixed-radix tuples, last position fastest.
pub fn odometer(sizes: Vec<u32>) -> impl Iterator<Item = Vec<u32>> {
    let mut current: Option<Vec<u32>> = Some(vec![0; sizes.len()]);
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let cur = current.as_mut().unwrap();
        let mut pos = sizes.len();
        loop {
            if pos == 0 {
                current = None;
                break;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < sizes[pos] {
                break;
            }
            cur[pos] = 0;
        }
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn builds_triangle_scenario() {
        let hg = Hypergraph::binary(
            names(&["A", "B", "C"]),
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        assert_eq!(hg.num_contexts(), 3);
        assert!(hg.is_graph_scenario());
        assert_eq!(hg.assignment_count(), 8);
    }

    #[test]
    fn rejects_uncovered_observable() {
        let err = Hypergraph::binary(names(&["A", "B", "C"]), vec![vec![0, 1]]).unwrap_err();
        assert!(err.to_string().contains("appears in no context"));
    }

    #[test]
    fn rejects_duplicate_and_unsorted_contexts() {
        assert!(Hypergraph::binary(names(&["A", "B"]), vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(Hypergraph::binary(names(&["A", "B"]), vec![vec![1, 0]]).is_err());
        assert!(Hypergraph::binary(names(&["A", "B"]), vec![vec![0, 0]]).is_err());
    }

    #[test]
    fn rejects_tiny_alphabet_and_comma_symbols() {
        assert!(Hypergraph::new(
            names(&["A"]),
            vec![vec!["0".into()]],
            vec![vec![0]],
        )
        .is_err());
        assert!(Hypergraph::new(
            names(&["A"]),
            vec![vec!["0".into(), "1,2".into()]],
            vec![vec![0]],
        )
        .is_err());
    }

    #[test]
    fn odometer_is_lexicographic() {
        let all: Vec<_> = odometer(vec![2, 3]).collect();
        assert_eq!(
            all,
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![0, 2],
                vec![1, 0],
                vec![1, 1],
                vec![1, 2]
            ]
        );
        assert_eq!(odometer(vec![]).count(), 1);
    }
}
