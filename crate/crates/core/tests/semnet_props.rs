use std::collections::BTreeSet;

use memevo::{Concept, Relation, RelationLabel, SemanticNetwork};
use proptest::prelude::*;

const NAMES: [&str; 8] = [
    "sun", "moon", "earth", "star", "space", "light", "hot", "water_1",
];
const LABELS: [&str; 3] = ["IsA", "HasA", "AtLocation"];

#[derive(Clone, Debug)]
enum Op {
    AddConcept(usize),
    AddRelation(usize, usize, usize),
    RemoveRelation(usize, usize, usize),
    RemoveConcept(usize),
}

fn concept(i: usize) -> Concept {
    Concept::new(NAMES[i]).unwrap()
}

fn relation(l: usize, a: usize, b: usize) -> Option<Relation> {
    Relation::new(
        RelationLabel::new(LABELS[l]).unwrap(),
        concept(a),
        concept(b),
    )
    .ok()
}

fn op() -> impl Strategy<Value = Op> {
    let n = NAMES.len();
    prop_oneof![
        (0..n).prop_map(Op::AddConcept),
        (0..3usize, 0..n, 0..n).prop_map(|(l, a, b)| Op::AddRelation(l, a, b)),
        (0..3usize, 0..n, 0..n).prop_map(|(l, a, b)| Op::RemoveRelation(l, a, b)),
        (0..n).prop_map(Op::RemoveConcept),
    ]
}

fn apply(net: &mut SemanticNetwork, op: &Op) {
    match *op {
        Op::AddConcept(i) => {
            net.add_concept(concept(i));
        }
        Op::AddRelation(l, a, b) => {
            if let Some(r) = relation(l, a, b) {
                net.add_relation(r);
            }
        }
        Op::RemoveRelation(l, a, b) => {
            if let Some(r) = relation(l, a, b) {
                net.remove_relation(&r);
            }
        }
        Op::RemoveConcept(i) => {
            let _ = net.remove_concept(&concept(i));
        }
    }
}

fn network() -> impl Strategy<Value = SemanticNetwork> {
    prop::collection::vec(op(), 0..40).prop_map(|ops| {
        let mut net = SemanticNetwork::new();
        for o in &ops {
            apply(&mut net, o);
        }
        net
    })
}

fn no_dangling(net: &SemanticNetwork) -> bool {
    net.relations()
        .iter()
        .all(|r| r.from != r.to && net.contains_concept(&r.from) && net.contains_concept(&r.to))
}

proptest! {
    #[test]
    fn no_dangling_after_every_operation(ops in prop::collection::vec(op(), 0..60)) {
        let mut net = SemanticNetwork::new();
        for o in &ops {
            apply(&mut net, o);
            prop_assert!(no_dangling(&net), "after {:?}", o);
            let size = net.size();
            prop_assert_eq!(size.concepts, net.concepts().len());
            prop_assert_eq!(size.relations, net.relations().len());
        }
    }

    #[test]
    fn add_then_remove_relation_is_identity(net in network(), l in 0..3usize, a in 0..8usize, b in 0..8usize) {
        if let Some(r) = relation(l, a, b) {
            if !net.contains_relation(&r) {
                let mut grown = net.clone();
                prop_assert!(grown.add_relation(r.clone()));
                prop_assert!(grown.remove_relation(&r));
                // endpoints added by the relation stay as isolated concepts
                for c in [&r.from, &r.to] {
                    if !net.contains_concept(c) {
                        prop_assert!(grown.remove_concept(c).is_ok());
                    }
                }
                prop_assert_eq!(grown, net);
            }
        }
    }

    #[test]
    fn clusters_partition_concepts(net in network()) {
        let clusters = net.clusters();
        let mut seen = BTreeSet::new();
        for cluster in &clusters {
            prop_assert!(!cluster.is_empty());
            for c in cluster {
                prop_assert!(seen.insert(c.clone()), "{} in two clusters", c);
            }
        }
        prop_assert_eq!(&seen, net.concepts());
        // no relation crosses clusters
        for r in net.relations() {
            prop_assert!(clusters.iter().any(|k| k.contains(&r.from) && k.contains(&r.to)));
        }
    }

    #[test]
    fn parse_render_round_trip(net in network()) {
        let text = net.render();
        let back = SemanticNetwork::parse(&text).unwrap();
        prop_assert_eq!(&back, &net);
        prop_assert_eq!(back.render(), text);
    }

    #[test]
    fn dot_has_one_line_per_concept_and_relation(net in network()) {
        let dot = net.to_dot();
        let edges = dot.lines().filter(|l| l.contains(" -> ")).count();
        let nodes = dot.lines().filter(|l| l.trim_end().ends_with("\";")).count();
        prop_assert_eq!(edges, net.size().relations);
        prop_assert_eq!(nodes, net.size().concepts);
    }
}

#[test]
fn fixture_sizes() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    let read =
        |n: &str| SemanticNetwork::parse(&std::fs::read_to_string(dir.join(n)).unwrap()).unwrap();
    let base = read("astronomy.semnet");
    assert_eq!((base.size().concepts, base.size().relations), (10, 11));
    let human = read("human.semnet");
    assert_eq!(
        human
            .to_dot()
            .lines()
            .filter(|l| l.contains(" -> "))
            .count(),
        11
    );
}
