//! Memetic evolution of semantic networks.
//!
//! Individuals are small directed graphs of concepts and labeled relations.
//! They are varied by crossover and mutation operators that only introduce
//! relations licensed by a commonsense knowledge base, and selected by how
//! well they serve as a structure-mapping analogue of a given base network.
//!
//! * [`kb`] loads and queries the knowledge base.
//! * [`semnet`] is the network type and its text and DOT formats.
//! * [`variation`] holds random generation, crossover and mutation.
//! * [`sme`] scores analogies.
//! * [`evolution`] runs the generational loop.

pub mod evolution;
pub mod kb;
pub mod semnet;
pub mod sme;
pub mod variation;

pub use evolution::{
    parse_settings, run, stats_to_csv, ConfigError, EvolutionConfig, GenerationStats, Individual,
    Population, RunResult,
};
pub use kb::{Assertion, Concept, KbError, KnowledgeBase, RelationLabel};
pub use semnet::{Relation, SemanticNetwork, SemnetError};
pub use sme::{analogy_fitness, Analogy, GMap, MatchHypothesis, ScoreWeights};
pub use variation::{CrossoverKind, CrossoverOutcome, MutationKind, VariationParams};

/// Engine version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
