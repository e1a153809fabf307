//! Stochastic generation and variation of semantic networks.
//!
//! Every operator here is a pure function of its inputs and the rng state.
//! Random choices are made by index into sorted candidate lists, so a given
//! seed always produces the same offspring.

mod crossover;
mod mutation;

use std::collections::BTreeSet;

use rand::Rng;

use crate::kb::{Assertion, Concept, KnowledgeBase};
use crate::semnet::{Relation, SemanticNetwork};

pub use crossover::{
    bridges, crossover, crossover_type1, crossover_type1_at, crossover_type2, split_subgraph,
    CrossoverKind, CrossoverOutcome, SubgraphSplit,
};
pub use mutation::{
    apply_mutation, mutate, mutate_traced, MutationKind, MutationOutcome,
    MAX_REPLACEMENT_CANDIDATES,
};

#[derive(Debug, thiserror::Error)]
pub enum VariationError {
    #[error("c_max must be at least 1")]
    ZeroConceptLimit,
    #[error("timeout must be at least 1")]
    ZeroTimeout,
}

/// Limits shared by network generation and mutation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariationParams {
    /// Maximum number of concepts in a freshly generated network.
    pub c_max: usize,
    /// Consecutive failed attempts tolerated before giving up.
    pub timeout: usize,
}

impl VariationParams {
    pub fn new(c_max: usize, timeout: usize) -> Result<Self, VariationError> {
        if c_max == 0 {
            return Err(VariationError::ZeroConceptLimit);
        }
        if timeout == 0 {
            return Err(VariationError::ZeroTimeout);
        }
        Ok(VariationParams { c_max, timeout })
    }
}

impl Default for VariationParams {
    fn default() -> Self {
        VariationParams {
            c_max: 5,
            timeout: 10,
        }
    }
}

pub(crate) fn pick<'a, T, R: Rng + ?Sized>(rng: &mut R, items: &'a [T]) -> &'a T {
    &items[rng.gen_range(0..items.len())]
}

pub(crate) fn as_relation(a: &Assertion) -> Relation {
    Relation {
        from: a.from.clone(),
        to: a.to.clone(),
        label: a.label.clone(),
    }
}

/// Grow a random network from one random KB concept.
///
/// Each step picks a concept already in the network, lists the KB
/// assertions it takes part in that are not yet present, and appends one of
/// them together with its partner concept. Growth stops once the network
/// holds `c_max` concepts or after `timeout` consecutive steps that could
/// not add anything.
pub fn random_network<R: Rng + ?Sized>(
    kb: &KnowledgeBase,
    params: &VariationParams,
    rng: &mut R,
) -> SemanticNetwork {
    let mut net = SemanticNetwork::new();
    net.add_concept(kb.random_concept(rng).clone());
    let mut failures = 0;
    while net.size().concepts < params.c_max && failures < params.timeout {
        let concepts: Vec<&Concept> = net.concepts().iter().collect();
        let picked = (*pick(rng, &concepts)).clone();
        let options: Vec<Relation> = kb
            .relations_involving(&picked)
            .map(as_relation)
            .filter(|r| !net.contains_relation(r))
            .collect();
        if options.is_empty() {
            failures += 1;
            continue;
        }
        let r = pick(rng, &options).clone();
        net.add_relation(r);
        failures = 0;
    }
    net
}

/// KB concepts that could stand in for `target` in at least one of its
/// relations in `net`: every `x` such that some incident relation of
/// `target`, with `target` replaced by `x`, is licensed.
pub fn substitutes(
    net: &SemanticNetwork,
    target: &Concept,
    kb: &KnowledgeBase,
) -> BTreeSet<Concept> {
    let mut out = BTreeSet::new();
    for r in net.incident(target) {
        let outgoing = &r.from == target;
        let partner = if outgoing { &r.to } else { &r.from };
        for a in kb.relations_involving(partner) {
            if a.label != r.label {
                continue;
            }
            let candidate = match (outgoing, &a.to == partner, &a.from == partner) {
                (true, true, _) => &a.from,
                (false, _, true) => &a.to,
                _ => continue,
            };
            if candidate != target {
                out.insert(candidate.clone());
            }
        }
    }
    out
}

/// Concept pairs `(a, b)` with `a` in `net_a` and `b` in `net_b` that can
/// replace each other: `b` licensed for at least one relation of `a` in
/// `net_a`, and `a` for at least one relation of `b` in `net_b`.
pub fn interchangeable_pairs(
    net_a: &SemanticNetwork,
    net_b: &SemanticNetwork,
    kb: &KnowledgeBase,
) -> Vec<(Concept, Concept)> {
    if net_a.relations().is_empty() || net_b.relations().is_empty() {
        return Vec::new();
    }
    let subs_b: Vec<(&Concept, BTreeSet<Concept>)> = net_b
        .concepts()
        .iter()
        .map(|b| (b, substitutes(net_b, b, kb)))
        .collect();
    let mut out = Vec::new();
    for a in net_a.concepts() {
        let subs_a = substitutes(net_a, a, kb);
        if subs_a.is_empty() {
            continue;
        }
        for (b, subs) in &subs_b {
            if a != *b && subs_a.contains(*b) && subs.contains(a) {
                out.push((a.clone(), (*b).clone()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn kb() -> KnowledgeBase {
        let text = include_str!("../../../../fixtures/commonsense.tsv");
        KnowledgeBase::load_assertions(text.as_bytes(), 2.0)
            .unwrap()
            .0
    }

    fn c(s: &str) -> Concept {
        Concept::new(s).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(VariationParams::new(0, 10).is_err());
        assert!(VariationParams::new(5, 0).is_err());
        assert_eq!(
            VariationParams::new(5, 10).unwrap(),
            VariationParams::default()
        );
    }

    #[test]
    fn c_max_one_yields_single_concept() {
        let kb = kb();
        let params = VariationParams::new(1, 10).unwrap();
        let net = random_network(&kb, &params, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(net.size().concepts, 1);
        assert_eq!(net.size().relations, 0);
    }

    #[test]
    fn random_network_is_seed_stable() {
        let kb = kb();
        let params = VariationParams::default();
        let a = random_network(&kb, &params, &mut ChaCha8Rng::seed_from_u64(42));
        let b = random_network(&kb, &params, &mut ChaCha8Rng::seed_from_u64(42));
        assert_eq!(a, b);
        assert!(a.size().concepts <= 5);
    }

    #[test]
    fn random_networks_are_licensed() {
        let kb = kb();
        let params = VariationParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..500 {
            let net = random_network(&kb, &params, &mut rng);
            for r in net.relations() {
                assert!(kb.is_licensed(&r.label, &r.from, &r.to), "{r}");
            }
        }
    }

    #[test]
    fn substitutes_of_bird() {
        let kb = kb();
        let net = SemanticNetwork::parse("CapableOf(bird, fly)").unwrap();
        let subs = substitutes(&net, &c("bird"), &kb);
        assert_eq!(subs.into_iter().collect::<Vec<_>>(), vec![c("airplane")]);
    }

    #[test]
    fn empty_network_has_no_pairs() {
        let kb = kb();
        let other = SemanticNetwork::parse("CapableOf(bird, fly)").unwrap();
        assert!(interchangeable_pairs(&SemanticNetwork::new(), &other, &kb).is_empty());
    }
}
