//! Commonsense mutation.

use std::collections::BTreeMap;

use rand::Rng;

use super::{as_relation, pick, substitutes, VariationParams};
use crate::kb::{Concept, KnowledgeBase};
use crate::semnet::{Relation, SemanticNetwork};

/// Replacement candidates per concept are truncated to this many, in sorted
/// order.
pub const MAX_REPLACEMENT_CANDIDATES: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MutationKind {
    /// Type I: attach an external KB concept through a licensed relation.
    ConceptAttachment,
    /// Type IIa: add a licensed relation between two existing concepts.
    RelationAddition,
    /// Type IIb: delete a random relation.
    RelationDeletion,
    /// Type IIIa: add a random KB concept as a new isolated cluster.
    ConceptAddition,
    /// Type IIIb: delete a random concept with its relations.
    ConceptDeletion,
    /// Type IV: replace a concept by a KB substitute, dropping relations the
    /// substitute does not satisfy.
    ConceptReplacement,
}

impl MutationKind {
    pub const ALL: [MutationKind; 6] = [
        MutationKind::ConceptAttachment,
        MutationKind::RelationAddition,
        MutationKind::RelationDeletion,
        MutationKind::ConceptAddition,
        MutationKind::ConceptDeletion,
        MutationKind::ConceptReplacement,
    ];
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationOutcome {
    pub child: SemanticNetwork,
    /// `None` when every trial was infeasible and the parent came back as is.
    pub kind: Option<MutationKind>,
}

/// Mutate `parent` with a uniformly drawn mutation type, redrawing on
/// infeasible types up to `params.timeout` trials.
pub fn mutate<R: Rng + ?Sized>(
    parent: &SemanticNetwork,
    kb: &KnowledgeBase,
    params: &VariationParams,
    rng: &mut R,
) -> SemanticNetwork {
    mutate_traced(parent, kb, params, rng).child
}

/// [`mutate`], also reporting which mutation type was applied.
pub fn mutate_traced<R: Rng + ?Sized>(
    parent: &SemanticNetwork,
    kb: &KnowledgeBase,
    params: &VariationParams,
    rng: &mut R,
) -> MutationOutcome {
    for _ in 0..params.timeout {
        let kind = *pick(rng, &MutationKind::ALL);
        if let Some(child) = apply_mutation(kind, parent, kb, rng) {
            return MutationOutcome {
                child,
                kind: Some(kind),
            };
        }
    }
    MutationOutcome {
        child: parent.clone(),
        kind: None,
    }
}

/// Apply one mutation type, or `None` if it is infeasible for `parent`.
pub fn apply_mutation<R: Rng + ?Sized>(
    kind: MutationKind,
    parent: &SemanticNetwork,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> Option<SemanticNetwork> {
    match kind {
        MutationKind::ConceptAttachment => concept_attachment(parent, kb, rng),
        MutationKind::RelationAddition => relation_addition(parent, kb, rng),
        MutationKind::RelationDeletion => {
            let relations: Vec<&Relation> = parent.relations().iter().collect();
            if relations.is_empty() {
                return None;
            }
            let victim = *pick(rng, &relations);
            let mut child = parent.clone();
            child.remove_relation(victim);
            Some(child)
        }
        MutationKind::ConceptAddition => concept_addition(parent, kb, rng),
        MutationKind::ConceptDeletion => {
            let concepts: Vec<&Concept> = parent.concepts().iter().collect();
            if concepts.is_empty() {
                return None;
            }
            let victim = *pick(rng, &concepts);
            let mut child = parent.clone();
            child
                .remove_concept(victim)
                .expect("picked from the network");
            Some(child)
        }
        MutationKind::ConceptReplacement => concept_replacement(parent, kb, rng),
    }
}

fn concept_attachment<R: Rng + ?Sized>(
    parent: &SemanticNetwork,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> Option<SemanticNetwork> {
    // external concept -> licensed relations joining it to the network
    let mut attachable: BTreeMap<&Concept, Vec<Relation>> = BTreeMap::new();
    for c in parent.concepts() {
        for a in kb.relations_involving(c) {
            if let Some(p) = a.partner(c).filter(|p| !parent.contains_concept(p)) {
                attachable.entry(p).or_default().push(as_relation(a));
            }
        }
    }
    if attachable.is_empty() {
        return None;
    }
    let options: Vec<(&&Concept, &Vec<Relation>)> = attachable.iter().collect();
    let (_, relations) = pick(rng, &options);
    let r = pick(rng, relations).clone();
    let mut child = parent.clone();
    child.add_relation(r);
    Some(child)
}

fn relation_addition<R: Rng + ?Sized>(
    parent: &SemanticNetwork,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> Option<SemanticNetwork> {
    let options: Vec<Relation> = parent
        .concepts()
        .iter()
        .flat_map(|c| kb.relations_involving(c).filter(move |a| &a.from == c))
        .filter(|a| parent.contains_concept(&a.to))
        .map(as_relation)
        .filter(|r| !parent.contains_relation(r))
        .collect();
    if options.is_empty() {
        return None;
    }
    let mut child = parent.clone();
    child.add_relation(pick(rng, &options).clone());
    Some(child)
}

fn concept_addition<R: Rng + ?Sized>(
    parent: &SemanticNetwork,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> Option<SemanticNetwork> {
    let present = parent
        .concepts()
        .iter()
        .filter(|c| kb.contains_concept(c))
        .count();
    let available = kb.concepts().len() - present;
    if available == 0 {
        return None;
    }
    let k = rng.gen_range(0..available);
    let fresh = kb
        .concepts()
        .iter()
        .filter(|c| !parent.contains_concept(c))
        .nth(k)
        .expect("count matches filter");
    let mut child = parent.clone();
    child.add_concept(fresh.clone());
    Some(child)
}

fn concept_replacement<R: Rng + ?Sized>(
    parent: &SemanticNetwork,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> Option<SemanticNetwork> {
    let targets: Vec<(&Concept, Vec<Concept>)> = parent
        .concepts()
        .iter()
        .filter_map(|c| {
            let candidates: Vec<Concept> = substitutes(parent, c, kb)
                .into_iter()
                .filter(|x| !parent.contains_concept(x))
                .take(MAX_REPLACEMENT_CANDIDATES)
                .collect();
            (!candidates.is_empty()).then_some((c, candidates))
        })
        .collect();
    if targets.is_empty() {
        return None;
    }
    let (target, candidates) = pick(rng, &targets);
    let replacement = pick(rng, candidates);

    let moved: Vec<Relation> = parent
        .incident(target)
        .filter_map(|r| r.substitute(target, replacement))
        .filter(|r| kb.is_licensed(&r.label, &r.from, &r.to))
        .collect();
    let mut child = parent.clone();
    child
        .remove_concept(target)
        .expect("picked from the network");
    child.add_concept(replacement.clone());
    for r in moved {
        child.add_relation(r);
    }
    Some(child)
}
