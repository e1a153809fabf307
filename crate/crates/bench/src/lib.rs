//! Fixture loading shared by the criterion benches.

use memevo::{KnowledgeBase, SemanticNetwork};

const KB: &str = include_str!("../../../fixtures/commonsense.tsv");
const BASE: &str = include_str!("../../../fixtures/astronomy.semnet");
const ANALOG: &str = include_str!("../../../fixtures/atom_analog.semnet");

pub fn knowledge_base() -> KnowledgeBase {
    KnowledgeBase::load_assertions(KB.as_bytes(), 2.0)
        .expect("fixture KB loads")
        .0
}

/// The 10-concept, 11-relation astronomy base network.
pub fn base_network() -> SemanticNetwork {
    SemanticNetwork::parse(BASE).expect("fixture network parses")
}

pub fn analog_network() -> SemanticNetwork {
    SemanticNetwork::parse(ANALOG).expect("fixture network parses")
}
