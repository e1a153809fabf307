//! Structure mapping over semantic networks.
//!
//! Concepts play the role of entities and every relation is a binary
//! predicate; attributes are ordinary `IsA` relations and there are no
//! functions. A match hypothesis pairs a base relation with a target relation
//! of the identical label. A gmap is a maximal set of hypotheses whose
//! induced concept correspondence is one-to-one. Gmaps are scored by
//! systematicity: each hypothesis earns a base weight plus a bonus for every
//! other hypothesis in the gmap it shares a concept with.

use std::collections::{BTreeMap, HashMap};

use crate::kb::Concept;
use crate::semnet::{Relation, SemanticNetwork};

/// Above this many hypotheses [`build_gmaps`] switches from exact
/// enumeration to greedy merging.
pub const EXACT_HYPOTHESIS_LIMIT: usize = 24;

/// Node budget for [`analogy_fitness`]'s exact search. Reaching it returns the
/// best gmap found so far, flagged as inexact.
pub const SEARCH_NODE_BUDGET: u64 = 5_000_000;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchHypothesis {
    pub base: Relation,
    pub target: Relation,
}

impl std::fmt::Debug for MatchHypothesis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ~ {}", self.base, self.target)
    }
}

impl MatchHypothesis {
    fn correspondences(&self) -> [(&Concept, &Concept); 2] {
        [
            (&self.base.from, &self.target.from),
            (&self.base.to, &self.target.to),
        ]
    }

    fn shares_base_concept(&self, other: &MatchHypothesis) -> bool {
        let (a, b) = (&self.base, &other.base);
        a.from == b.from || a.from == b.to || a.to == b.from || a.to == b.to
    }
}

/// Two hypotheses can sit in one gmap iff their concept correspondences
/// agree: same base concept <=> same target concept.
pub fn compatible(h1: &MatchHypothesis, h2: &MatchHypothesis) -> bool {
    h1.correspondences().iter().all(|(b1, t1)| {
        h2.correspondences()
            .iter()
            .all(|(b2, t2)| (b1 == b2) == (t1 == t2))
    })
}

/// Systematicity weights: `score = Σ_h (base + connectivity · conn(h))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreWeights {
    pub base: f64,
    pub connectivity: f64,
}

impl Default for ScoreWeights {
    fn default() -> Self {
        ScoreWeights {
            base: 0.3,
            connectivity: 0.1,
        }
    }
}

impl ScoreWeights {
    /// `count` hypotheses whose `conn` values sum to `connections`.
    pub fn score(&self, count: usize, connections: usize) -> f64 {
        self.base * count as f64 + self.connectivity * connections as f64
    }

    pub fn is_valid(&self) -> bool {
        self.base.is_finite()
            && self.connectivity.is_finite()
            && self.base > 0.0
            && self.connectivity >= 0.0
    }
}

/// A maximal structurally consistent mapping from base to target.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GMap {
    /// Sorted.
    pub hypotheses: Vec<MatchHypothesis>,
    /// Base concept -> target concept.
    pub concept_map: BTreeMap<Concept, Concept>,
    pub score: f64,
}

impl GMap {
    fn from_hypotheses(mut hypotheses: Vec<MatchHypothesis>, weights: &ScoreWeights) -> Self {
        hypotheses.sort();
        let concept_map = hypotheses
            .iter()
            .flat_map(|h| h.correspondences())
            .map(|(b, t)| (b.clone(), t.clone()))
            .collect();
        let score = score_gmap(&hypotheses, weights);
        GMap {
            hypotheses,
            concept_map,
            score,
        }
    }

    /// The concept map is functional and injective and agrees with every
    /// hypothesis.
    pub fn is_consistent(&self) -> bool {
        let mut forward: HashMap<&Concept, &Concept> = HashMap::new();
        let mut backward: HashMap<&Concept, &Concept> = HashMap::new();
        for h in &self.hypotheses {
            if h.base.label != h.target.label {
                return false;
            }
            for (b, t) in h.correspondences() {
                if *forward.entry(b).or_insert(t) != t || *backward.entry(t).or_insert(b) != b {
                    return false;
                }
            }
        }
        forward.len() == self.concept_map.len()
            && forward
                .iter()
                .all(|(b, t)| self.concept_map.get(*b) == Some(*t))
    }

    /// Number of matched relations.
    pub fn len(&self) -> usize {
        self.hypotheses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hypotheses.is_empty()
    }
}

/// Every pair of equally labeled relations, base-major in sorted order.
pub fn match_hypotheses(base: &SemanticNetwork, target: &SemanticNetwork) -> Vec<MatchHypothesis> {
    let mut by_label: BTreeMap<_, Vec<&Relation>> = BTreeMap::new();
    for t in target.relations() {
        by_label.entry(&t.label).or_default().push(t);
    }
    let mut out = Vec::new();
    for b in base.relations() {
        for t in by_label.get(&b.label).into_iter().flatten() {
            out.push(MatchHypothesis {
                base: b.clone(),
                target: (*t).clone(),
            });
        }
    }
    out
}

/// `Σ_h (w_base + w_conn · conn(h))`, where `conn(h)` counts the other
/// hypotheses that share a mapped concept with `h`.
pub fn score_gmap(hypotheses: &[MatchHypothesis], weights: &ScoreWeights) -> f64 {
    let mut connections = 0;
    for (i, h) in hypotheses.iter().enumerate() {
        connections += hypotheses
            .iter()
            .enumerate()
            .filter(|&(j, other)| i != j && h.shares_base_concept(other))
            .count();
    }
    weights.score(hypotheses.len(), connections)
}

/// All maximal consistent hypothesis sets, sorted by hypothesis set.
///
/// Exact (maximal clique enumeration on the compatibility graph) up to
/// [`EXACT_HYPOTHESIS_LIMIT`] hypotheses; greedy seeded merging above.
pub fn build_gmaps(hypotheses: &[MatchHypothesis], weights: &ScoreWeights) -> Vec<GMap> {
    let mut hyps = hypotheses.to_vec();
    hyps.sort();
    hyps.dedup();
    let n = hyps.len();
    let compat: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && compatible(&hyps[i], &hyps[j]))
                .collect()
        })
        .collect();
    let mut sets = if n <= EXACT_HYPOTHESIS_LIMIT {
        maximal_cliques(&compat)
    } else {
        greedy_sets(&hyps, &compat, weights)
    };
    sets.sort();
    sets.dedup();
    sets.into_iter()
        .map(|set| {
            GMap::from_hypotheses(set.into_iter().map(|i| hyps[i].clone()).collect(), weights)
        })
        .collect()
}

fn maximal_cliques(compat: &[Vec<bool>]) -> Vec<Vec<usize>> {
    let n = compat.len();
    if n == 0 {
        return Vec::new();
    }
    let neighbours: Vec<u32> = compat
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &c)| c)
                .fold(0u32, |m, (j, _)| m | (1 << j))
        })
        .collect();
    let mut out = Vec::new();
    let all = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    bron_kerbosch(0, all, 0, &neighbours, &mut out);
    out
}

fn bron_kerbosch(r: u32, mut p: u32, mut x: u32, nb: &[u32], out: &mut Vec<Vec<usize>>) {
    if p == 0 {
        if x == 0 {
            out.push((0..32).filter(|i| r & (1 << i) != 0).collect());
        }
        return;
    }
    let pivot = (p | x).trailing_zeros() as usize;
    let mut candidates = p & !nb[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        let bit = 1u32 << v;
        bron_kerbosch(r | bit, p & nb[v], x & nb[v], nb, out);
        p &= !bit;
        x |= bit;
        candidates &= !bit;
    }
}

fn greedy_sets(
    hyps: &[MatchHypothesis],
    compat: &[Vec<bool>],
    weights: &ScoreWeights,
) -> Vec<Vec<usize>> {
    let n = hyps.len();
    let shares: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i != j && hyps[i].shares_base_concept(&hyps[j]))
                .collect()
        })
        .collect();
    // seeds ordered by standalone potential, largest first; ties by index
    let potential = |i: usize| {
        let linked = (0..n).filter(|&j| compat[i][j] && shares[i][j]).count();
        weights.score(1, linked)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| potential(b).total_cmp(&potential(a)).then(a.cmp(&b)));

    let mut covered = vec![false; n];
    let mut out = Vec::new();
    for &seed in &order {
        if covered[seed] {
            continue;
        }
        let mut members = vec![seed];
        let mut open: Vec<bool> = compat[seed].clone();
        loop {
            let gain = |j: usize| {
                let linked = members.iter().filter(|&&m| shares[m][j]).count();
                weights.score(1, 2 * linked)
            };
            let best = (0..n)
                .filter(|&j| open[j])
                .max_by(|&a, &b| gain(a).total_cmp(&gain(b)).then(b.cmp(&a)));
            let Some(next) = best else { break };
            members.push(next);
            for j in 0..n {
                open[j] = open[j] && compat[next][j];
            }
        }
        members.sort_unstable();
        for &m in &members {
            covered[m] = true;
        }
        out.push(members);
    }
    out
}

/// The fitness of `target` as an analogue of `base`, with the winning gmap.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Analogy {
    pub fitness: f64,
    pub gmap: GMap,
    /// False only if the search hit [`SEARCH_NODE_BUDGET`].
    pub exact: bool,
}

/// Maximum gmap score of `target` against `base`.
///
/// Ties between equal-score gmaps go to the lexicographically smallest
/// hypothesis set. Zero when either side is empty or no label is shared.
pub fn analogy_fitness(
    base: &SemanticNetwork,
    target: &SemanticNetwork,
    weights: &ScoreWeights,
) -> Analogy {
    let hypotheses = match_hypotheses(base, target);
    if hypotheses.is_empty() {
        return Analogy {
            fitness: 0.0,
            gmap: GMap::default(),
            exact: true,
        };
    }
    let mut search = BestGmapSearch::new(&hypotheses, weights);
    search.run(0);
    let chosen = search
        .best_set
        .iter()
        .map(|&i| hypotheses[i].clone())
        .collect();
    let gmap = GMap::from_hypotheses(chosen, weights);
    Analogy {
        fitness: gmap.score,
        gmap,
        exact: search.nodes <= SEARCH_NODE_BUDGET,
    }
}

/// Depth-first branch and bound over base relations. Each base relation is
/// matched to one of its hypotheses (in index order) or left unmatched
/// (last), so complete assignments are visited in lexicographic order of
/// their hypothesis index sets.
struct BestGmapSearch<'a> {
    weights: &'a ScoreWeights,
    /// Per base relation: `(hypothesis index, [bf, bt, tf, tt])` concept ids.
    groups: Vec<Vec<(usize, [usize; 4])>>,
    /// Per group: other groups whose base relation shares a concept.
    shares: Vec<Vec<usize>>,
    forward: Vec<Option<usize>>,
    backward: Vec<Option<usize>>,
    matched: Vec<bool>,
    chosen: Vec<usize>,
    best_score: f64,
    best_set: Vec<usize>,
    nodes: u64,
}

impl<'a> BestGmapSearch<'a> {
    fn new(hypotheses: &[MatchHypothesis], weights: &'a ScoreWeights) -> Self {
        fn intern<'h>(map: &mut HashMap<&'h Concept, usize>, c: &'h Concept) -> usize {
            let next = map.len();
            *map.entry(c).or_insert(next)
        }
        let mut base_ids: HashMap<&Concept, usize> = HashMap::new();
        let mut target_ids: HashMap<&Concept, usize> = HashMap::new();
        let mut groups: Vec<Vec<(usize, [usize; 4])>> = Vec::new();
        let mut group_rel: Vec<&Relation> = Vec::new();
        for (i, h) in hypotheses.iter().enumerate() {
            if group_rel.last() != Some(&&h.base) {
                group_rel.push(&h.base);
                groups.push(Vec::new());
            }
            let ids = [
                intern(&mut base_ids, &h.base.from),
                intern(&mut base_ids, &h.base.to),
                intern(&mut target_ids, &h.target.from),
                intern(&mut target_ids, &h.target.to),
            ];
            groups.last_mut().unwrap().push((i, ids));
        }
        let shares = group_rel
            .iter()
            .enumerate()
            .map(|(i, a)| {
                group_rel
                    .iter()
                    .enumerate()
                    .filter(|&(j, b)| {
                        i != j
                            && (a.from == b.from
                                || a.from == b.to
                                || a.to == b.from
                                || a.to == b.to)
                    })
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        let g = groups.len();
        BestGmapSearch {
            weights,
            groups,
            shares,
            forward: vec![None; base_ids.len()],
            backward: vec![None; target_ids.len()],
            matched: vec![false; g],
            chosen: Vec::new(),
            best_score: f64::NEG_INFINITY,
            best_set: Vec::new(),
            nodes: 0,
        }
    }

    fn consistent(&self, ids: &[usize; 4]) -> bool {
        let ok = |b: usize, t: usize| match (self.forward[b], self.backward[t]) {
            (Some(x), _) => x == t,
            (None, None) => true,
            (None, Some(_)) => false,
        };
        ok(ids[0], ids[2]) && ok(ids[1], ids[3])
    }

    fn score_of(&self, included: &[bool]) -> f64 {
        let mut count = 0;
        let mut connections = 0;
        for (g, &on) in included.iter().enumerate() {
            if on {
                count += 1;
                connections += self.shares[g].iter().filter(|&&j| included[j]).count();
            }
        }
        self.weights.score(count, connections)
    }

    /// Score if every remaining group that still has a consistent option
    /// were matched. Scores only grow with the matched set, so this bounds
    /// every completion.
    fn bound(&self, depth: usize) -> f64 {
        let mut optimistic = self.matched.clone();
        for (slot, group) in optimistic.iter_mut().zip(&self.groups).skip(depth) {
            *slot = group.iter().any(|(_, ids)| self.consistent(ids));
        }
        self.score_of(&optimistic)
    }

    fn run(&mut self, depth: usize) {
        self.nodes += 1;
        if self.nodes > SEARCH_NODE_BUDGET && !self.best_set.is_empty() {
            return;
        }
        if depth == self.groups.len() {
            let score = self.score_of(&self.matched);
            if score > self.best_score {
                self.best_score = score;
                self.best_set = self.chosen.clone();
            }
            return;
        }
        if self.bound(depth) <= self.best_score {
            return;
        }
        for k in 0..self.groups[depth].len() {
            let (h, ids) = self.groups[depth][k];
            if !self.consistent(&ids) {
                continue;
            }
            let mut inserted = Vec::with_capacity(2);
            for (b, t) in [(ids[0], ids[2]), (ids[1], ids[3])] {
                if self.forward[b].is_none() {
                    self.forward[b] = Some(t);
                    self.backward[t] = Some(b);
                    inserted.push((b, t));
                }
            }
            self.matched[depth] = true;
            self.chosen.push(h);
            self.run(depth + 1);
            self.chosen.pop();
            self.matched[depth] = false;
            for (b, t) in inserted {
                self.forward[b] = None;
                self.backward[t] = None;
            }
        }
        self.run(depth + 1);
    }
}
