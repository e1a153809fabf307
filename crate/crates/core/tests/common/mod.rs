//! Fixtures and independent oracles shared by the integration tests.
//!
//! Nothing here calls into the code paths it is used to check: the fitness
//! oracle enumerates concept mappings instead of hypothesis sets, the
//! interchangeability oracle substitutes and probes every relation, and the
//! tournament oracle simulates the bracket recursively.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::PathBuf;

use memevo::{Concept, KnowledgeBase, Relation, ScoreWeights, SemanticNetwork, VariationParams};
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    fs::read_to_string(fixture(name)).unwrap()
}

pub fn load_kb() -> KnowledgeBase {
    KnowledgeBase::load_assertions(fixture_text("commonsense.tsv").as_bytes(), 2.0)
        .unwrap()
        .0
}

pub fn load_net(name: &str) -> SemanticNetwork {
    SemanticNetwork::parse(&fixture_text(name)).unwrap()
}

pub fn c(s: &str) -> Concept {
    Concept::new(s).unwrap()
}

pub fn rel(label: &str, from: &str, to: &str) -> Relation {
    SemanticNetwork::parse(&format!("{label}({from}, {to})"))
        .unwrap()
        .relations()
        .iter()
        .next()
        .unwrap()
        .clone()
}

/// Random KB-grown network with at most `max_concepts` concepts and
/// `max_relations` relations.
pub fn random_small_net<R: Rng>(
    kb: &KnowledgeBase,
    rng: &mut R,
    max_concepts: usize,
    max_relations: usize,
) -> SemanticNetwork {
    let c_max = rng.gen_range(1..=max_concepts);
    let params = VariationParams::new(c_max, 10).unwrap();
    let mut net = memevo::variation::random_network(kb, &params, rng);
    while net.size().relations > max_relations {
        let victims: Vec<Relation> = net.relations().iter().cloned().collect();
        net.remove_relation(&victims[rng.gen_range(0..victims.len())]);
    }
    net
}

/// Best systematicity score over every injective concept mapping.
///
/// Only concepts that take part in a relation whose label occurs on both
/// sides can influence the score, so the enumeration runs over those and
/// maps the smaller side into the larger one (every partial injection
/// extends to a total one without losing matches).
pub fn brute_force_fitness(
    base: &SemanticNetwork,
    target: &SemanticNetwork,
    weights: &ScoreWeights,
) -> f64 {
    let base_labels: HashSet<_> = base.relations().iter().map(|r| r.label.clone()).collect();
    let target_labels: HashSet<_> = target.relations().iter().map(|r| r.label.clone()).collect();
    let shared = |r: &&Relation| base_labels.contains(&r.label) && target_labels.contains(&r.label);
    let base_rels: Vec<&Relation> = base.relations().iter().filter(shared).collect();
    let target_set: HashSet<(&str, &str, &str)> = target
        .relations()
        .iter()
        .filter(shared)
        .map(|r| (r.label.as_str(), r.from.as_str(), r.to.as_str()))
        .collect();
    let base_concepts: Vec<&Concept> = base_rels
        .iter()
        .flat_map(|r| [&r.from, &r.to])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let target_concepts: Vec<&Concept> = target
        .relations()
        .iter()
        .filter(shared)
        .flat_map(|r| [&r.from, &r.to])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut best = 0.0f64;
    let mut evaluate = |map: &dyn Fn(&Concept) -> Option<usize>| {
        let matched: Vec<&Relation> = base_rels
            .iter()
            .copied()
            .filter(|r| match (map(&r.from), map(&r.to)) {
                (Some(f), Some(t)) => target_set.contains(&(
                    r.label.as_str(),
                    target_concepts[f].as_str(),
                    target_concepts[t].as_str(),
                )),
                _ => false,
            })
            .collect();
        let mut connections = 0usize;
        for (i, a) in matched.iter().enumerate() {
            for (j, b) in matched.iter().enumerate() {
                let touch = a.from == b.from || a.from == b.to || a.to == b.from || a.to == b.to;
                if i != j && touch {
                    connections += 1;
                }
            }
        }
        let score = weights.base * matched.len() as f64 + weights.connectivity * connections as f64;
        if score > best {
            best = score;
        }
    };

    let (small, large) = (base_concepts.len(), target_concepts.len());
    if small <= large {
        for_each_injection(small, large, &mut |assign| {
            evaluate(&|x: &Concept| {
                base_concepts
                    .iter()
                    .position(|b| *b == x)
                    .map(|i| assign[i])
            })
        });
    } else {
        for_each_injection(large, small, &mut |assign| {
            // assign: target index -> base index; invert it
            evaluate(&|x: &Concept| {
                let bi = base_concepts.iter().position(|b| *b == x)?;
                assign.iter().position(|&b| b == bi)
            })
        });
    }
    best
}

/// Calls `f` with every injective assignment `0..n -> 0..m` (n <= m).
pub fn for_each_injection(n: usize, m: usize, f: &mut dyn FnMut(&[usize])) {
    fn rec(
        i: usize,
        n: usize,
        used: &mut Vec<bool>,
        cur: &mut Vec<usize>,
        f: &mut dyn FnMut(&[usize]),
    ) {
        if i == n {
            f(cur);
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                cur.push(j);
                rec(i + 1, n, used, cur, f);
                cur.pop();
                used[j] = false;
            }
        }
    }
    rec(0, n, &mut vec![false; m], &mut Vec::with_capacity(n), f);
}

/// Interchangeable pairs by substituting into every relation and probing
/// the KB.
pub fn brute_force_interchangeable(
    a: &SemanticNetwork,
    b: &SemanticNetwork,
    kb: &KnowledgeBase,
) -> Vec<(Concept, Concept)> {
    let can_replace = |net: &SemanticNetwork, old: &Concept, new: &Concept| {
        net.relations().iter().any(|r| {
            if r.from != *old && r.to != *old {
                return false;
            }
            let from = if r.from == *old { new } else { &r.from };
            let to = if r.to == *old { new } else { &r.to };
            from != to && kb.is_licensed(&r.label, from, to)
        })
    };
    let mut out = Vec::new();
    for x in a.concepts() {
        for y in b.concepts() {
            if x != y && can_replace(a, x, y) && can_replace(b, y, x) {
                out.push((x.clone(), y.clone()));
            }
        }
    }
    out
}

/// Monte-Carlo estimate of tournament selection probabilities, simulating
/// the knockout bracket by recursive halving.
pub fn monte_carlo_tournament<R: Rng>(
    fitness: &[f64],
    size: usize,
    win_prob: f64,
    draws: usize,
    rng: &mut R,
) -> Vec<f64> {
    fn bracket<R: Rng>(entrants: &[usize], fitness: &[f64], p: f64, rng: &mut R) -> usize {
        if entrants.len() == 1 {
            return entrants[0];
        }
        let mid = entrants.len() / 2;
        let left = bracket(&entrants[..mid], fitness, p, rng);
        let right = bracket(&entrants[mid..], fitness, p, rng);
        let u: f64 = rng.gen();
        if fitness[left] == fitness[right] {
            if u < 0.5 {
                left
            } else {
                right
            }
        } else {
            let left_fitter = fitness[left] > fitness[right];
            if (u < p) == left_fitter {
                left
            } else {
                right
            }
        }
    }
    assert!(size.is_power_of_two(), "oracle assumes a full bracket");
    let mut counts = vec![0usize; fitness.len()];
    for _ in 0..draws {
        let entrants: Vec<usize> = (0..size).map(|_| rng.gen_range(0..fitness.len())).collect();
        counts[bracket(&entrants, fitness, win_prob, rng)] += 1;
    }
    counts
        .into_iter()
        .map(|c| c as f64 / draws as f64)
        .collect()
}

/// Every relation of `child` is KB-licensed or copied from a parent, and
/// every endpoint is a concept of `child`.
pub fn closure_violations(
    child: &SemanticNetwork,
    parents: &[&SemanticNetwork],
    kb: &KnowledgeBase,
) -> Vec<String> {
    let mut out = Vec::new();
    for r in child.relations() {
        let licensed = kb.is_licensed(&r.label, &r.from, &r.to);
        let inherited = parents.iter().any(|p| p.contains_relation(r));
        if !licensed && !inherited {
            out.push(format!("unlicensed {r}"));
        }
        if !child.contains_concept(&r.from) || !child.contains_concept(&r.to) {
            out.push(format!("dangling {r}"));
        }
    }
    out
}
