//! Semantic networks: directed graphs of concepts and labeled binary relations.
//!
//! Networks are small value types. Variation operators clone their parents
//! and edit the copy, so a parent can be selected again unchanged. Iteration
//! order is always sorted (by concept text, then label) which keeps every
//! seeded run reproducible.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::kb::{Concept, KbError, RelationLabel};

#[derive(Debug, thiserror::Error)]
pub enum SemnetError {
    #[error("self-loop {label}({concept}, {concept}) is not a valid relation")]
    SelfLoop {
        label: RelationLabel,
        concept: Concept,
    },
    #[error("concept {0} is not in the network")]
    UnknownConcept(Concept),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// A directed labeled edge `label(from, to)` with `from != to`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Relation {
    pub from: Concept,
    pub to: Concept,
    pub label: RelationLabel,
}

impl Relation {
    pub fn new(label: RelationLabel, from: Concept, to: Concept) -> Result<Self, SemnetError> {
        if from == to {
            return Err(SemnetError::SelfLoop {
                label,
                concept: from,
            });
        }
        Ok(Relation { from, to, label })
    }

    pub fn involves(&self, c: &Concept) -> bool {
        &self.from == c || &self.to == c
    }

    /// The endpoint opposite `c`, if `c` is an endpoint.
    pub fn partner(&self, c: &Concept) -> Option<&Concept> {
        if &self.from == c {
            Some(&self.to)
        } else if &self.to == c {
            Some(&self.from)
        } else {
            None
        }
    }

    /// Replace every occurrence of `old` by `new`. `None` if the result
    /// would be a self-loop.
    pub fn substitute(&self, old: &Concept, new: &Concept) -> Option<Relation> {
        let swap = |x: &Concept| if x == old { new.clone() } else { x.clone() };
        Relation::new(self.label.clone(), swap(&self.from), swap(&self.to)).ok()
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.label, self.from, self.to)
    }
}

impl fmt::Debug for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `(concepts, relations)`. The relation count is the canonical network size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetworkSize {
    pub concepts: usize,
    pub relations: usize,
}

/// A set of concepts plus a set of relations between them.
///
/// Every relation endpoint is a member of the concept set. Isolated concepts
/// and disconnected clusters are allowed.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct SemanticNetwork {
    concepts: BTreeSet<Concept>,
    relations: BTreeSet<Relation>,
}

impl SemanticNetwork {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_relations<I: IntoIterator<Item = Relation>>(relations: I) -> Self {
        let mut net = Self::new();
        for r in relations {
            net.add_relation(r);
        }
        net
    }

    pub fn concepts(&self) -> &BTreeSet<Concept> {
        &self.concepts
    }

    pub fn relations(&self) -> &BTreeSet<Relation> {
        &self.relations
    }

    pub fn is_empty(&self) -> bool {
        self.concepts.is_empty()
    }

    pub fn contains_concept(&self, c: &Concept) -> bool {
        self.concepts.contains(c)
    }

    pub fn contains_relation(&self, r: &Relation) -> bool {
        self.relations.contains(r)
    }

    pub fn size(&self) -> NetworkSize {
        NetworkSize {
            concepts: self.concepts.len(),
            relations: self.relations.len(),
        }
    }

    /// Idempotent. Returns whether the concept was new.
    pub fn add_concept(&mut self, c: Concept) -> bool {
        self.concepts.insert(c)
    }

    /// Inserts missing endpoints too. Returns whether the relation was new.
    pub fn add_relation(&mut self, r: Relation) -> bool {
        if self.relations.contains(&r) {
            return false;
        }
        self.concepts.insert(r.from.clone());
        self.concepts.insert(r.to.clone());
        self.relations.insert(r)
    }

    /// Endpoints stay in the network even if this leaves them isolated.
    pub fn remove_relation(&mut self, r: &Relation) -> bool {
        self.relations.remove(r)
    }

    /// Removes `c` and every relation it takes part in.
    pub fn remove_concept(&mut self, c: &Concept) -> Result<(), SemnetError> {
        if !self.concepts.remove(c) {
            return Err(SemnetError::UnknownConcept(c.clone()));
        }
        self.relations.retain(|r| !r.involves(c));
        Ok(())
    }

    /// Relations with `c` as either endpoint, in sorted order.
    pub fn incident<'a>(&'a self, c: &'a Concept) -> impl Iterator<Item = &'a Relation> + 'a {
        self.relations.iter().filter(move |r| r.involves(c))
    }

    pub fn degree(&self, c: &Concept) -> usize {
        self.incident(c).count()
    }

    /// Concepts that take part in no relation.
    pub fn isolated_concepts(&self) -> Vec<&Concept> {
        let linked: BTreeSet<&Concept> = self
            .relations
            .iter()
            .flat_map(|r| [&r.from, &r.to])
            .collect();
        self.concepts
            .iter()
            .filter(|c| !linked.contains(c))
            .collect()
    }

    /// Set union of concepts and relations.
    pub fn union(&self, other: &SemanticNetwork) -> SemanticNetwork {
        let mut out = self.clone();
        out.concepts.extend(other.concepts.iter().cloned());
        out.relations.extend(other.relations.iter().cloned());
        out
    }

    /// Undirected adjacency, concept -> neighbours.
    pub(crate) fn adjacency(&self) -> BTreeMap<&Concept, BTreeSet<&Concept>> {
        let mut adj: BTreeMap<&Concept, BTreeSet<&Concept>> =
            self.concepts.iter().map(|c| (c, BTreeSet::new())).collect();
        for r in &self.relations {
            adj.entry(&r.from).or_default().insert(&r.to);
            adj.entry(&r.to).or_default().insert(&r.from);
        }
        adj
    }

    /// Weakly connected components, ordered by their smallest concept.
    pub fn clusters(&self) -> Vec<BTreeSet<Concept>> {
        let adj = self.adjacency();
        let mut seen: BTreeSet<&Concept> = BTreeSet::new();
        let mut out = Vec::new();
        for start in &self.concepts {
            if !seen.insert(start) {
                continue;
            }
            let mut component = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            while let Some(c) = queue.pop_front() {
                component.insert(c.clone());
                for &n in &adj[c] {
                    if seen.insert(n) {
                        queue.push_back(n);
                    }
                }
            }
            out.push(component);
        }
        out
    }

    /// Parse the `.semnet` text format.
    ///
    /// One item per line: `Label(from, to)` for a relation or a bare concept
    /// name for an isolated concept. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, SemnetError> {
        let mut net = SemanticNetwork::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |reason: String| SemnetError::Parse {
                line: i + 1,
                reason,
            };
            let concept = |s: &str| Concept::new(s).map_err(|e: KbError| err(e.to_string()));

            match line.find('(') {
                None => {
                    if line.contains([')', ',']) {
                        return Err(err(format!("unexpected punctuation in {line:?}")));
                    }
                    net.add_concept(concept(line)?);
                }
                Some(open) => {
                    let label =
                        RelationLabel::new(&line[..open]).map_err(|e| err(e.to_string()))?;
                    let args = line[open + 1..]
                        .strip_suffix(')')
                        .ok_or_else(|| err("missing closing parenthesis".into()))?;
                    let parts: Vec<&str> = args.split(',').collect();
                    if parts.len() != 2 {
                        return Err(err(format!(
                            "relation takes exactly 2 concepts, found {}",
                            parts.len()
                        )));
                    }
                    let r = Relation::new(label, concept(parts[0])?, concept(parts[1])?)
                        .map_err(|e| err(e.to_string()))?;
                    net.add_relation(r);
                }
            }
        }
        Ok(net)
    }

    /// Inverse of [`parse`](Self::parse): relations in sorted order, then
    /// isolated concepts.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for r in &self.relations {
            let _ = writeln!(out, "{r}");
        }
        for c in self.isolated_concepts() {
            let _ = writeln!(out, "{c}");
        }
        out
    }

    /// Graphviz DOT digraph with one node per concept and one labeled edge
    /// per relation.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph {\n");
        for c in &self.concepts {
            let _ = writeln!(out, "    \"{c}\";");
        }
        for r in &self.relations {
            let _ = writeln!(
                out,
                "    \"{}\" -> \"{}\" [label=\"{}\"];",
                r.from,
                r.to,
                r.label.as_str().replace('\\', "\\\\").replace('"', "\\\"")
            );
        }
        out.push_str("}\n");
        out
    }
}

impl FromStr for SemanticNetwork {
    type Err = SemnetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl fmt::Display for SemanticNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl fmt::Debug for SemanticNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemanticNetwork")
            .field("concepts", &self.concepts)
            .field("relations", &self.relations)
            .finish()
    }
}
