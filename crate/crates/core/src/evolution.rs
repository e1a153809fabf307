//! The generational memetic loop: evaluate, select, vary, repeat.
//!
//! All randomness comes from a single seeded stream consumed in selection
//! and variation order. Fitness evaluation draws nothing, so it can fan out
//! over worker threads without changing results.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::kb::KnowledgeBase;
use crate::semnet::SemanticNetwork;
use crate::sme::{analogy_fitness, Analogy, ScoreWeights};
use crate::variation::{crossover, mutate, random_network, VariationParams};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("pop_size must be at least 1")]
    EmptyPopulation,
    #[error("{name} must lie in [0, 1], got {value}")]
    Probability { name: &'static str, value: f64 },
    #[error("p_c + p_m must equal 1, got {0}")]
    RatesDoNotSum(f64),
    #[error("tournament_size must be in 1..=pop_size ({pop_size}), got {size}")]
    TournamentSize { size: usize, pop_size: usize },
    #[error("win_prob must lie in (0.5, 1], got {0}")]
    WinProbability(f64),
    #[error("c_max and timeout must be at least 1")]
    Variation,
    #[error("r_min must be finite")]
    MinScore,
    #[error("score weights must satisfy base > 0 and connectivity >= 0")]
    Weights,
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("invalid value {value:?} for {key}")]
    Value { key: String, value: String },
}

/// Parse `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_settings(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::Syntax {
                line: i + 1,
                reason: "expected key = value".into(),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line: i + 1,
                reason: "empty key".into(),
            });
        }
        out.push((key.to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Every run parameter. Defaults: population 200, crossover 0.85, mutation
/// 0.15, 5 initial concepts, minimum score 2.0, timeout 10, tournaments of 8
/// won with probability 0.8, elitism on, 50 generations.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolutionConfig {
    pub pop_size: usize,
    pub p_c: f64,
    pub p_m: f64,
    pub c_max: usize,
    pub r_min: f64,
    pub timeout: usize,
    pub tournament_size: usize,
    pub win_prob: f64,
    pub elitism: bool,
    pub max_generations: usize,
    pub target_fitness: Option<f64>,
    pub seed: u64,
    pub weights: ScoreWeights,
    /// Evaluate fitness on the rayon pool.
    pub parallel: bool,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            pop_size: 200,
            p_c: 0.85,
            p_m: 0.15,
            c_max: 5,
            r_min: 2.0,
            timeout: 10,
            tournament_size: 8,
            win_prob: 0.8,
            elitism: true,
            max_generations: 50,
            target_fitness: None,
            seed: 0,
            weights: ScoreWeights::default(),
            parallel: true,
        }
    }
}

impl EvolutionConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.pop_size == 0 {
            return Err(ConfigError::EmptyPopulation);
        }
        for (name, value) in [("p_c", self.p_c), ("p_m", self.p_m)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(ConfigError::Probability { name, value });
            }
        }
        if (self.p_c + self.p_m - 1.0).abs() > 1e-9 {
            return Err(ConfigError::RatesDoNotSum(self.p_c + self.p_m));
        }
        if self.tournament_size == 0 || self.tournament_size > self.pop_size {
            return Err(ConfigError::TournamentSize {
                size: self.tournament_size,
                pop_size: self.pop_size,
            });
        }
        if !(self.win_prob > 0.5 && self.win_prob <= 1.0) {
            return Err(ConfigError::WinProbability(self.win_prob));
        }
        if self.c_max == 0 || self.timeout == 0 {
            return Err(ConfigError::Variation);
        }
        if !self.r_min.is_finite() {
            return Err(ConfigError::MinScore);
        }
        if !self.weights.is_valid() {
            return Err(ConfigError::Weights);
        }
        Ok(())
    }

    pub fn variation_params(&self) -> VariationParams {
        VariationParams {
            c_max: self.c_max,
            timeout: self.timeout,
        }
    }

    /// Set one parameter from its settings-file spelling. Returns `Ok(false)`
    /// when `key` is not a run parameter.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool, ConfigError> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value.parse().map_err(|_| ConfigError::Value {
                key: key.to_string(),
                value: value.to_string(),
            })
        }
        match key {
            "pop_size" => self.pop_size = parse(key, value)?,
            "p_c" => self.p_c = parse(key, value)?,
            "p_m" => self.p_m = parse(key, value)?,
            "c_max" => self.c_max = parse(key, value)?,
            "r_min" => self.r_min = parse(key, value)?,
            "timeout" => self.timeout = parse(key, value)?,
            "tournament_size" => self.tournament_size = parse(key, value)?,
            "win_prob" => self.win_prob = parse(key, value)?,
            "elitism" => self.elitism = parse(key, value)?,
            "max_generations" => self.max_generations = parse(key, value)?,
            "target_fitness" => {
                self.target_fitness = match value {
                    "none" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "seed" => self.seed = parse(key, value)?,
            "w_base" => self.weights.base = parse(key, value)?,
            "w_conn" => self.weights.connectivity = parse(key, value)?,
            "parallel" => self.parallel = parse(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Every parameter as `key = value` lines, readable by [`Self::set`].
    pub fn to_settings(&self) -> String {
        let target = self
            .target_fitness
            .map_or_else(|| "none".to_string(), |t| t.to_string());
        let mut out = String::new();
        for (key, value) in [
            ("pop_size", self.pop_size.to_string()),
            ("p_c", self.p_c.to_string()),
            ("p_m", self.p_m.to_string()),
            ("c_max", self.c_max.to_string()),
            ("r_min", self.r_min.to_string()),
            ("timeout", self.timeout.to_string()),
            ("tournament_size", self.tournament_size.to_string()),
            ("win_prob", self.win_prob.to_string()),
            ("elitism", self.elitism.to_string()),
            ("max_generations", self.max_generations.to_string()),
            ("target_fitness", target),
            ("seed", self.seed.to_string()),
            ("w_base", self.weights.base.to_string()),
            ("w_conn", self.weights.connectivity.to_string()),
            ("parallel", self.parallel.to_string()),
        ] {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    /// Offspring produced by crossover; the rest come from mutation.
    /// Rounds half to even, so 50 × 0.85 gives 42.
    pub fn crossover_budget(&self) -> usize {
        ((self.pop_size as f64 * self.p_c).round_ties_even() as usize).min(self.pop_size)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Individual {
    pub network: SemanticNetwork,
    /// Filled in by evaluation.
    pub fitness: Option<f64>,
}

impl Individual {
    pub fn new(network: SemanticNetwork) -> Self {
        Individual {
            network,
            fitness: None,
        }
    }

    fn fitness_or_zero(&self) -> f64 {
        self.fitness.unwrap_or(0.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Population {
    pub individuals: Vec<Individual>,
    pub generation: usize,
}

impl Population {
    /// Index of the fittest evaluated individual (first on ties).
    pub fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, ind) in self.individuals.iter().enumerate() {
            if ind.fitness_or_zero() > self.individuals[best].fitness_or_zero() {
                best = i;
            }
        }
        best
    }

    pub fn is_evaluated(&self) -> bool {
        self.individuals.iter().all(|i| i.fitness.is_some())
    }
}

/// One row of the per-generation report.
#[derive(Clone, Debug, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_fitness: f64,
    pub avg_fitness: f64,
    /// Relation count of the best individual.
    pub best_size: usize,
    /// Mean relation count.
    pub avg_size: f64,
}

impl GenerationStats {
    pub fn of(population: &Population) -> Self {
        let n = population.individuals.len().max(1) as f64;
        let best = &population.individuals[population.best_index()];
        GenerationStats {
            generation: population.generation,
            best_fitness: best.fitness_or_zero(),
            avg_fitness: population
                .individuals
                .iter()
                .map(Individual::fitness_or_zero)
                .sum::<f64>()
                / n,
            best_size: best.network.size().relations,
            avg_size: population
                .individuals
                .iter()
                .map(|i| i.network.size().relations as f64)
                .sum::<f64>()
                / n,
        }
    }
}

pub const STATS_CSV_HEADER: &str = "generation,best_fitness,avg_fitness,best_size,avg_size";

/// Render stats as CSV with the fixed header.
pub fn stats_to_csv(stats: &[GenerationStats]) -> String {
    let mut out = String::from(STATS_CSV_HEADER);
    out.push('\n');
    for s in stats {
        let _ = writeln!(
            out,
            "{},{:.6},{:.6},{},{:.6}",
            s.generation, s.best_fitness, s.avg_fitness, s.best_size, s.avg_size
        );
    }
    out
}

/// `pop_size` independently generated random networks, not yet evaluated.
pub fn initialize<R: Rng + ?Sized>(
    kb: &KnowledgeBase,
    config: &EvolutionConfig,
    rng: &mut R,
) -> Population {
    let params = config.variation_params();
    Population {
        individuals: (0..config.pop_size)
            .map(|_| Individual::new(random_network(kb, &params, rng)))
            .collect(),
        generation: 0,
    }
}

/// Fill in missing fitness values against `base`.
pub fn evaluate(population: &mut Population, base: &SemanticNetwork, config: &EvolutionConfig) {
    let weights = config.weights;
    let eval = |ind: &mut Individual| {
        if ind.fitness.is_none() {
            ind.fitness = Some(analogy_fitness(base, &ind.network, &weights).fitness);
        }
    };
    if config.parallel {
        population.individuals.par_iter_mut().for_each(eval);
    } else {
        population.individuals.iter_mut().for_each(eval);
    }
}

/// Tournament selection with a knockout bracket.
///
/// `tournament_size` entrants are drawn uniformly with replacement. Adjacent
/// entrants meet pairwise, the fitter one winning with probability
/// `win_prob` (a fair coin on equal fitness); an odd entrant out gets a bye.
/// Rounds repeat until one entrant remains. Returns its population index.
pub fn tournament_select<R: Rng + ?Sized>(
    population: &Population,
    config: &EvolutionConfig,
    rng: &mut R,
) -> usize {
    let n = population.individuals.len();
    let fitness = |i: usize| population.individuals[i].fitness_or_zero();
    let mut round: Vec<usize> = (0..config.tournament_size)
        .map(|_| rng.gen_range(0..n))
        .collect();
    while round.len() > 1 {
        let mut next = Vec::with_capacity(round.len().div_ceil(2));
        for pair in round.chunks(2) {
            let [a, b] = match *pair {
                [a, b] => [a, b],
                [a] => {
                    next.push(a);
                    continue;
                }
                _ => unreachable!(),
            };
            let draw: f64 = rng.gen();
            let (fa, fb) = (fitness(a), fitness(b));
            let winner = if fa == fb {
                if draw < 0.5 {
                    a
                } else {
                    b
                }
            } else {
                let (fitter, weaker) = if fa > fb { (a, b) } else { (b, a) };
                if draw < config.win_prob {
                    fitter
                } else {
                    weaker
                }
            };
            next.push(winner);
        }
        round = next;
    }
    round[0]
}

/// Produce the next generation from an evaluated population.
///
/// Crossover fills [`EvolutionConfig::crossover_budget`] slots (an odd
/// budget keeps only the first child of the last crossover) and mutation the
/// rest. With elitism a uniformly drawn offspring is replaced by the current
/// best individual, which keeps its cached fitness.
pub fn vary<R: Rng + ?Sized>(
    population: &Population,
    kb: &KnowledgeBase,
    config: &EvolutionConfig,
    rng: &mut R,
) -> Population {
    debug_assert!(population.is_evaluated());
    let params = config.variation_params();
    let n_crossover = config.crossover_budget();
    let mut offspring: Vec<Individual> = Vec::with_capacity(config.pop_size);

    while offspring.len() < n_crossover {
        let a = tournament_select(population, config, rng);
        let b = tournament_select(population, config, rng);
        let out = crossover(
            &population.individuals[a].network,
            &population.individuals[b].network,
            kb,
            rng,
        );
        for child in out.children {
            if offspring.len() < n_crossover {
                offspring.push(Individual::new(child));
            }
        }
    }
    while offspring.len() < config.pop_size {
        let p = tournament_select(population, config, rng);
        let child = mutate(&population.individuals[p].network, kb, &params, rng);
        offspring.push(Individual::new(child));
    }
    if config.elitism {
        let slot = rng.gen_range(0..offspring.len());
        offspring[slot] = population.individuals[population.best_index()].clone();
    }
    Population {
        individuals: offspring,
        generation: population.generation + 1,
    }
}

/// Evaluate `population`, report its stats, and produce the next one.
pub fn step<R: Rng + ?Sized>(
    mut population: Population,
    base: &SemanticNetwork,
    kb: &KnowledgeBase,
    config: &EvolutionConfig,
    rng: &mut R,
) -> (Population, GenerationStats) {
    evaluate(&mut population, base, config);
    let stats = GenerationStats::of(&population);
    (vary(&population, kb, config, rng), stats)
}

#[derive(Clone, Debug)]
pub struct RunResult {
    /// The last evaluated population.
    pub population: Population,
    /// One row per evaluated generation, starting at 0.
    pub stats: Vec<GenerationStats>,
    pub best: Individual,
    /// The best individual's winning mapping onto the base.
    pub analogy: Analogy,
}

/// Evolve until `max_generations` or until the best fitness reaches
/// `target_fitness`.
pub fn run(
    kb: &KnowledgeBase,
    base: &SemanticNetwork,
    config: &EvolutionConfig,
) -> Result<RunResult, ConfigError> {
    run_with_observer(kb, base, config, |_, _| {})
}

/// [`run`], calling `observe` on each evaluated population.
pub fn run_with_observer<F>(
    kb: &KnowledgeBase,
    base: &SemanticNetwork,
    config: &EvolutionConfig,
    mut observe: F,
) -> Result<RunResult, ConfigError>
where
    F: FnMut(&Population, &GenerationStats),
{
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population = initialize(kb, config, &mut rng);
    let mut stats = Vec::with_capacity(config.max_generations + 1);
    loop {
        evaluate(&mut population, base, config);
        let row = GenerationStats::of(&population);
        observe(&population, &row);
        let reached = config.target_fitness.is_some_and(|t| row.best_fitness >= t);
        stats.push(row);
        if population.generation >= config.max_generations || reached {
            break;
        }
        population = vary(&population, kb, config, &mut rng);
    }
    let best = population.individuals[population.best_index()].clone();
    let analogy = analogy_fitness(base, &best.network, &config.weights);
    Ok(RunResult {
        population,
        stats,
        best,
        analogy,
    })
}
