//! Commonsense knowledge base: ingestion, indexing and licensing queries.
//!
//! The knowledge base is the only authority on which relations may exist in
//! a network. It is loaded once from a 4-column TSV export
//! (`label from to score`) and is immutable afterwards.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::BufRead;
use std::sync::Arc;

use rand::Rng;

/// Errors produced while building or loading a [`KnowledgeBase`].
#[derive(Debug, thiserror::Error)]
pub enum KbError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("invalid concept {0:?}: must normalize to a non-empty [a-z0-9_] string")]
    InvalidConcept(String),
    #[error("invalid relation label {0:?}")]
    InvalidLabel(String),
    #[error("knowledge base is empty after filtering (min score {min_score})")]
    Empty { min_score: f64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A normalized concept identifier such as `bird` or `solar_system`.
///
/// Text is lowercased and trimmed, and runs of internal whitespace collapse
/// to a single underscore. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Concept(Arc<str>);

impl Concept {
    pub fn new(text: &str) -> Result<Self, KbError> {
        let normalized = text
            .split_whitespace()
            .map(str::to_lowercase)
            .collect::<Vec<_>>()
            .join("_");
        let valid = !normalized.is_empty()
            && normalized
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'_');
        if valid {
            Ok(Concept(normalized.into()))
        } else {
            Err(KbError::InvalidConcept(text.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Concept {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// A relation label such as `IsA` or `AtLocation`. The vocabulary is open.
///
/// Labels may not contain whitespace or any of `(),#`, so that they
/// round-trip through the `.semnet` text format.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationLabel(Arc<str>);

impl RelationLabel {
    pub fn new(text: &str) -> Result<Self, KbError> {
        let text = text.trim();
        let valid = !text.is_empty()
            && !text
                .chars()
                .any(|c| c.is_whitespace() || matches!(c, '(' | ')' | ',' | '#'));
        if valid {
            Ok(RelationLabel(text.into()))
        } else {
            Err(KbError::InvalidLabel(text.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

/// A scored commonsense fact `label(from, to)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Assertion {
    pub from: Concept,
    pub to: Concept,
    pub label: RelationLabel,
    pub score: f64,
}

impl Assertion {
    /// The concept at the other end of the assertion, if `c` is an endpoint.
    pub fn partner(&self, c: &Concept) -> Option<&Concept> {
        if &self.from == c {
            Some(&self.to)
        } else if &self.to == c {
            Some(&self.from)
        } else {
            None
        }
    }
}

/// Bookkeeping from [`KnowledgeBase::load_assertions`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines_read: usize,
    pub below_min_score: usize,
    pub self_loops_dropped: usize,
    pub duplicates_collapsed: usize,
}

type Triple = (Concept, Concept, RelationLabel);

/// Immutable, indexed set of assertions.
#[derive(Clone, Debug)]
pub struct KnowledgeBase {
    /// Sorted by `(from, to, label)`; triples are unique.
    assertions: Vec<Assertion>,
    /// Concept -> indices into `assertions`, ascending.
    index_by_concept: BTreeMap<Concept, Vec<usize>>,
    concept_list: Vec<Concept>,
    triples: HashSet<Triple>,
    /// Lowercased label -> casing of first registration.
    labels: HashMap<String, RelationLabel>,
}

impl KnowledgeBase {
    /// Parse a TSV stream and keep assertions with `score >= min_score`.
    ///
    /// Lines are `label<TAB>from<TAB>to<TAB>score`. Blank lines and lines
    /// starting with `#` are skipped. Duplicate triples keep their maximum
    /// score and self-loops are dropped (counted in the report).
    pub fn load_assertions<R: BufRead>(
        reader: R,
        min_score: f64,
    ) -> Result<(Self, LoadReport), KbError> {
        let mut report = LoadReport::default();
        let mut labels: HashMap<String, RelationLabel> = HashMap::new();
        let mut best: BTreeMap<Triple, f64> = BTreeMap::new();

        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            report.lines_read += 1;
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(KbError::Malformed {
                    line: line_no,
                    reason: format!("expected 4 tab-separated fields, found {}", fields.len()),
                });
            }
            let malformed = |reason: String| KbError::Malformed {
                line: line_no,
                reason,
            };
            let score: f64 = fields[3]
                .trim()
                .parse()
                .map_err(|_| malformed(format!("unparsable score {:?}", fields[3])))?;
            if !score.is_finite() || score < 0.0 {
                return Err(malformed(format!(
                    "score must be finite and >= 0, got {score}"
                )));
            }
            let raw_label = RelationLabel::new(fields[0]).map_err(|e| malformed(e.to_string()))?;
            let label = labels
                .entry(raw_label.as_str().to_lowercase())
                .or_insert(raw_label)
                .clone();
            let from = Concept::new(fields[1]).map_err(|e| malformed(e.to_string()))?;
            let to = Concept::new(fields[2]).map_err(|e| malformed(e.to_string()))?;

            if from == to {
                report.self_loops_dropped += 1;
                continue;
            }
            if score < min_score {
                report.below_min_score += 1;
                continue;
            }
            match best.entry((from, to, label)) {
                std::collections::btree_map::Entry::Vacant(v) => {
                    v.insert(score);
                }
                std::collections::btree_map::Entry::Occupied(mut o) => {
                    report.duplicates_collapsed += 1;
                    if score > *o.get() {
                        o.insert(score);
                    }
                }
            }
        }

        if best.is_empty() {
            return Err(KbError::Empty { min_score });
        }
        let assertions = best
            .into_iter()
            .map(|((from, to, label), score)| Assertion {
                from,
                to,
                label,
                score,
            })
            .collect();
        let mut kb = Self::from_sorted(assertions);
        kb.labels = labels;
        Ok((kb, report))
    }

    /// Build from in-memory assertions, applying the same collapse and
    /// self-loop rules as [`load_assertions`](Self::load_assertions).
    pub fn from_assertions<I>(assertions: I) -> Result<Self, KbError>
    where
        I: IntoIterator<Item = Assertion>,
    {
        let mut best: BTreeMap<Triple, f64> = BTreeMap::new();
        let mut labels: HashMap<String, RelationLabel> = HashMap::new();
        for a in assertions {
            if a.from == a.to {
                continue;
            }
            let label = labels
                .entry(a.label.as_str().to_lowercase())
                .or_insert(a.label)
                .clone();
            let slot = best.entry((a.from, a.to, label)).or_insert(a.score);
            *slot = slot.max(a.score);
        }
        if best.is_empty() {
            return Err(KbError::Empty {
                min_score: f64::NEG_INFINITY,
            });
        }
        let assertions = best
            .into_iter()
            .map(|((from, to, label), score)| Assertion {
                from,
                to,
                label,
                score,
            })
            .collect();
        let mut kb = Self::from_sorted(assertions);
        kb.labels = labels;
        Ok(kb)
    }

    fn from_sorted(assertions: Vec<Assertion>) -> Self {
        let index_by_concept = build_index(&assertions);
        let concept_list = index_by_concept.keys().cloned().collect();
        let triples = assertions
            .iter()
            .map(|a| (a.from.clone(), a.to.clone(), a.label.clone()))
            .collect();
        KnowledgeBase {
            assertions,
            index_by_concept,
            concept_list,
            triples,
            labels: HashMap::new(),
        }
    }

    pub fn assertions(&self) -> &[Assertion] {
        &self.assertions
    }

    /// All concepts appearing in at least one assertion, sorted.
    pub fn concepts(&self) -> &[Concept] {
        &self.concept_list
    }

    pub fn contains_concept(&self, c: &Concept) -> bool {
        self.index_by_concept.contains_key(c)
    }

    /// Distinct labels of the retained assertions, sorted.
    pub fn labels(&self) -> Vec<RelationLabel> {
        let set: std::collections::BTreeSet<_> =
            self.assertions.iter().map(|a| a.label.clone()).collect();
        set.into_iter().collect()
    }

    /// Look up the canonical casing of a label, case-insensitively.
    pub fn canonical_label(&self, text: &str) -> Option<&RelationLabel> {
        self.labels.get(&text.trim().to_lowercase())
    }

    pub fn index_by_concept(&self) -> &BTreeMap<Concept, Vec<usize>> {
        &self.index_by_concept
    }

    /// Every assertion with `c` as either endpoint, in `(from, to, label)`
    /// order. Unknown concepts yield an empty iterator.
    pub fn relations_involving<'a>(
        &'a self,
        c: &Concept,
    ) -> impl Iterator<Item = &'a Assertion> + 'a {
        self.index_by_concept
            .get(c)
            .map(Vec::as_slice)
            .unwrap_or(&[])
            .iter()
            .map(move |&i| &self.assertions[i])
    }

    /// True iff the directed triple `label(from, to)` is in the base.
    pub fn is_licensed(&self, label: &RelationLabel, from: &Concept, to: &Concept) -> bool {
        // fast reject for concepts outside the base
        self.index_by_concept.contains_key(from)
            && self
                .triples
                .contains(&(from.clone(), to.clone(), label.clone()))
    }

    /// Uniform draw over [`concepts`](Self::concepts).
    pub fn random_concept<R: Rng + ?Sized>(&self, rng: &mut R) -> &Concept {
        // Construction guarantees at least one assertion, hence two concepts.
        &self.concept_list[rng.gen_range(0..self.concept_list.len())]
    }
}

fn build_index(assertions: &[Assertion]) -> BTreeMap<Concept, Vec<usize>> {
    let mut index: BTreeMap<Concept, Vec<usize>> = BTreeMap::new();
    for (i, a) in assertions.iter().enumerate() {
        index.entry(a.from.clone()).or_default().push(i);
        index.entry(a.to.clone()).or_default().push(i);
    }
    index
}
