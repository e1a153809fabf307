//! Commonsense crossover.
//!
//! Type I swaps the subgraphs hanging off a pair of interchangeable
//! concepts. When no such pair exists, Type II merges both parents, joined by
//! a licensed bridge relation if one exists and as separate clusters
//! otherwise.

use std::collections::{BTreeSet, VecDeque};

use rand::Rng;

use super::{as_relation, interchangeable_pairs, pick};
use crate::kb::{Concept, KnowledgeBase};
use crate::semnet::{Relation, SemanticNetwork};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CrossoverKind {
    /// Type I subgraph exchange.
    Subgraph,
    /// Type II merge joined by a bridge relation.
    Merge,
    /// Type II merge without any bridge.
    ClusterMerge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrossoverOutcome {
    pub children: [SemanticNetwork; 2],
    pub kind: CrossoverKind,
}

/// One parent partitioned around its crossover concept.
///
/// `relations`, `common`, `severed` and `rest_relations` partition the
/// parent's relations exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphSplit {
    pub crossover: Concept,
    /// The crossover concept plus everything reachable from its non-common
    /// neighbours without passing through it or a common partner.
    pub concepts: BTreeSet<Concept>,
    /// Relations that travel with the subgraph.
    pub relations: BTreeSet<Relation>,
    /// Incident relations shared (same label, direction and partner) with the
    /// other crossover concept. They stay behind and are re-attached to the
    /// incoming crossover concept.
    pub common: BTreeSet<Relation>,
    /// Relations between the subgraph and the remainder that do not go
    /// through the crossover concept.
    pub severed: BTreeSet<Relation>,
    pub rest_concepts: BTreeSet<Concept>,
    pub rest_relations: BTreeSet<Relation>,
}

/// Partition `net` around `crossover`, given the other parent's crossover
/// concept `other` in `other_net`.
pub fn split_subgraph(
    net: &SemanticNetwork,
    crossover: &Concept,
    other_net: &SemanticNetwork,
    other: &Concept,
) -> SubgraphSplit {
    let mut common = BTreeSet::new();
    let mut own = BTreeSet::new();
    for r in net.incident(crossover) {
        let shared = r
            .substitute(crossover, other)
            .is_some_and(|s| other_net.contains_relation(&s));
        if shared {
            common.insert(r.clone());
        } else {
            own.insert(r.clone());
        }
    }
    let common_partners: BTreeSet<&Concept> =
        common.iter().filter_map(|r| r.partner(crossover)).collect();

    let adj = net.adjacency();
    let mut concepts: BTreeSet<Concept> = BTreeSet::from([crossover.clone()]);
    let mut queue: VecDeque<&Concept> = own
        .iter()
        .filter_map(|r| r.partner(crossover))
        .filter(|p| !common_partners.contains(p))
        .collect();
    while let Some(c) = queue.pop_front() {
        if !concepts.insert(c.clone()) {
            continue;
        }
        for &n in &adj[c] {
            if n != crossover && !common_partners.contains(n) && !concepts.contains(n) {
                queue.push_back(n);
            }
        }
    }

    let mut relations = own;
    let mut severed = BTreeSet::new();
    let mut rest_relations = BTreeSet::new();
    for r in net.relations() {
        if r.involves(crossover) {
            continue;
        }
        match (concepts.contains(&r.from), concepts.contains(&r.to)) {
            (true, true) => {
                relations.insert(r.clone());
            }
            (false, false) => {
                rest_relations.insert(r.clone());
            }
            _ => {
                severed.insert(r.clone());
            }
        }
    }
    let rest_concepts = net.concepts().difference(&concepts).cloned().collect();

    SubgraphSplit {
        crossover: crossover.clone(),
        concepts,
        relations,
        common,
        severed,
        rest_concepts,
        rest_relations,
    }
}

/// Receiver's remainder plus the donor's subgraph, with the receiver's
/// common relations moved onto the donor's crossover concept.
fn assemble(receiver: &SubgraphSplit, donor: &SubgraphSplit) -> SemanticNetwork {
    let mut child = SemanticNetwork::new();
    for c in receiver.rest_concepts.iter().chain(&donor.concepts) {
        child.add_concept(c.clone());
    }
    let reattached = receiver
        .common
        .iter()
        .filter_map(|r| r.substitute(&receiver.crossover, &donor.crossover));
    for r in receiver
        .rest_relations
        .iter()
        .cloned()
        .chain(reattached)
        .chain(donor.relations.iter().cloned())
    {
        child.add_relation(r);
    }
    child
}

/// Type I crossover at a fixed pair of crossover concepts.
pub fn crossover_type1_at(
    parent_a: &SemanticNetwork,
    parent_b: &SemanticNetwork,
    a: &Concept,
    b: &Concept,
) -> CrossoverOutcome {
    let split_a = split_subgraph(parent_a, a, parent_b, b);
    let split_b = split_subgraph(parent_b, b, parent_a, a);
    CrossoverOutcome {
        children: [assemble(&split_a, &split_b), assemble(&split_b, &split_a)],
        kind: CrossoverKind::Subgraph,
    }
}

/// Type I crossover at a uniformly drawn interchangeable pair; `None` when
/// the parents have no interchangeable pair.
pub fn crossover_type1<R: Rng + ?Sized>(
    parent_a: &SemanticNetwork,
    parent_b: &SemanticNetwork,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> Option<CrossoverOutcome> {
    let pairs = interchangeable_pairs(parent_a, parent_b, kb);
    if pairs.is_empty() {
        return None;
    }
    let (a, b) = pick(rng, &pairs);
    Some(crossover_type1_at(parent_a, parent_b, a, b))
}

/// Licensed relations joining a concept of one parent to a concept of the
/// other that neither parent already contains, sorted.
pub fn bridges(
    parent_a: &SemanticNetwork,
    parent_b: &SemanticNetwork,
    kb: &KnowledgeBase,
) -> Vec<Relation> {
    let mut out = BTreeSet::new();
    for c in parent_a.concepts() {
        for a in kb.relations_involving(c) {
            let Some(partner) = a.partner(c) else {
                continue;
            };
            if !parent_b.contains_concept(partner) {
                continue;
            }
            let r = as_relation(a);
            if !parent_a.contains_relation(&r) && !parent_b.contains_relation(&r) {
                out.insert(r);
            }
        }
    }
    out.into_iter().collect()
}

/// Type II crossover. Each child is the union of both parents plus one
/// independently drawn bridge; without bridges both children are the plain
/// union.
pub fn crossover_type2<R: Rng + ?Sized>(
    parent_a: &SemanticNetwork,
    parent_b: &SemanticNetwork,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> CrossoverOutcome {
    let merged = parent_a.union(parent_b);
    let candidates = bridges(parent_a, parent_b, kb);
    if candidates.is_empty() {
        return CrossoverOutcome {
            children: [merged.clone(), merged],
            kind: CrossoverKind::ClusterMerge,
        };
    }
    let mut child = || {
        let mut net = merged.clone();
        net.add_relation(pick(rng, &candidates).clone());
        net
    };
    let first = child();
    let second = child();
    CrossoverOutcome {
        children: [first, second],
        kind: CrossoverKind::Merge,
    }
}

/// Type I when an interchangeable pair exists, Type II otherwise.
pub fn crossover<R: Rng + ?Sized>(
    parent_a: &SemanticNetwork,
    parent_b: &SemanticNetwork,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> CrossoverOutcome {
    crossover_type1(parent_a, parent_b, kb, rng)
        .unwrap_or_else(|| crossover_type2(parent_a, parent_b, kb, rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::RelationLabel;
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

    fn rel(label: &str, from: &str, to: &str) -> Relation {
        Relation::new(RelationLabel::new(label).unwrap(), c(from), c(to)).unwrap()
    }

    fn net(text: &str) -> SemanticNetwork {
        SemanticNetwork::parse(text).unwrap()
    }

    fn bird_airplane() -> (SemanticNetwork, SemanticNetwork) {
        (
            net(include_str!("../../../../fixtures/bird.semnet")),
            net(include_str!("../../../../fixtures/airplane.semnet")),
        )
    }

    #[test]
    fn bird_subgraph_split() {
        let (p1, p2) = bird_airplane();
        let split = split_subgraph(&p1, &c("bird"), &p2, &c("airplane"));
        assert_eq!(
            split.common,
            BTreeSet::from([
                rel("CapableOf", "bird", "fly"),
                rel("AtLocation", "bird", "air")
            ])
        );
        assert_eq!(
            split.relations,
            BTreeSet::from([
                rel("HasA", "bird", "feather"),
                rel("AtLocation", "bird", "forest"),
                rel("PartOf", "feather", "wing"),
                rel("PartOf", "tree", "forest"),
            ])
        );
        assert_eq!(
            split.severed,
            BTreeSet::from([rel("UsedFor", "wing", "fly")])
        );
        assert!(split.rest_relations.is_empty());
        assert_eq!(split.rest_concepts, BTreeSet::from([c("air"), c("fly")]));
    }

    #[test]
    fn bird_airplane_children() {
        let (p1, p2) = bird_airplane();
        let out = crossover_type1_at(&p1, &p2, &c("bird"), &c("airplane"));
        let child1: BTreeSet<_> = out.children[0].relations().iter().cloned().collect();
        assert_eq!(
            child1,
            BTreeSet::from([
                rel("HasA", "airplane", "propeller"),
                rel("MadeOf", "airplane", "metal"),
                rel("UsedFor", "airplane", "travel"),
                rel("MadeOf", "propeller", "metal"),
                rel("CapableOf", "airplane", "fly"),
                rel("AtLocation", "airplane", "air"),
            ])
        );
        let child2 = &out.children[1];
        assert!(child2.contains_relation(&rel("CapableOf", "bird", "fly")));
        assert!(child2.contains_relation(&rel("PartOf", "tree", "forest")));
        assert!(!child2.contains_relation(&rel("UsedFor", "wing", "fly")));
        assert_eq!(child2.size().relations, 6);
    }

    #[test]
    fn equivalent_concepts_give_back_parents() {
        // x and y have identical neighbourhoods in structurally equal parents.
        let kb = KnowledgeBase::from_assertions(["x", "y"].into_iter().flat_map(|s| {
            [
                crate::kb::Assertion {
                    from: c(s),
                    to: c("p"),
                    label: RelationLabel::new("HasA").unwrap(),
                    score: 3.0,
                },
                crate::kb::Assertion {
                    from: c(s),
                    to: c("q"),
                    label: RelationLabel::new("IsA").unwrap(),
                    score: 3.0,
                },
            ]
        }))
        .unwrap();
        let pa = net("HasA(x, p)\nIsA(x, q)\n");
        let pb = net("HasA(y, p)\nIsA(y, q)\n");
        assert_eq!(interchangeable_pairs(&pa, &pb, &kb), vec![(c("x"), c("y"))]);
        let out = crossover_type1(&pa, &pb, &kb, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        // every relation is common, so each child keeps its parent's structure
        // with the crossover concept exchanged.
        assert_eq!(out.children[0], pb);
        assert_eq!(out.children[1], pa);
    }

    #[test]
    fn art_human_bridges() {
        let kb = kb();
        let p1 = net(include_str!("../../../../fixtures/art.semnet"));
        let p2 = net(include_str!("../../../../fixtures/human_small.semnet"));
        let found = bridges(&p1, &p2, &kb);
        assert!(found.contains(&rel("CreatedBy", "art", "human")));
        assert!(found.contains(&rel("Desires", "human", "joy")));
        let out = crossover_type2(&p1, &p2, &kb, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(out.kind, CrossoverKind::Merge);
        for child in &out.children {
            assert_eq!(child.clusters().len(), 1);
            assert_eq!(child.size().relations, 6);
        }
    }

    #[test]
    fn no_bridge_means_cluster_merge() {
        let kb = kb();
        let p1 = net("Foo(aa, bb)\nFoo(cc, dd)\n");
        let p2 = net("Bar(ee, ff)\n");
        let out = crossover(&p1, &p2, &kb, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(out.kind, CrossoverKind::ClusterMerge);
        assert_eq!(
            out.children[0].clusters().len(),
            p1.clusters().len() + p2.clusters().len()
        );
    }

    #[test]
    fn crossover_kind_dispatch() {
        let kb = kb();
        let (p1, p2) = bird_airplane();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(
            crossover(&p1, &p2, &kb, &mut rng).kind,
            CrossoverKind::Subgraph
        );
        // disjoint vocabularies with a licensed bridge
        let a = net("IsA(painting, art)");
        let b = net("IsA(human, animal)");
        assert!(interchangeable_pairs(&a, &b, &kb).is_empty());
        assert_eq!(crossover(&a, &b, &kb, &mut rng).kind, CrossoverKind::Merge);
    }
}
