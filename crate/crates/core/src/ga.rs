//! Generic seeded genetic algorithm and its allocation-genome instantiation
//! (LLGA), the approximate egalitarian solver.
//!
//! The engine is generational with configurable elitism: each generation
//! carries over the best `elitism` individuals, then fills the population
//! with tournament-selected, crossed-over, mutated children. Selection
//! draws from one per-generation substream; each child's variation draws
//! from its own (generation, slot) substream, so fitness evaluation can be
//! scheduled in any order without changing the result.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{welfare_unchecked, Allocation, PreferenceProfile, Welfare};
use crate::rng::substream;

/// Tag distinguishing selection streams from per-child variation streams.
const SELECTION_TAG: u64 = u64::MAX;

/// Knobs for one evolutionary run.
#[derive(Debug, Clone, PartialEq)]
pub struct GAConfig {
    pub population_size: usize,
    pub generations: usize,
    pub tournament_size: usize,
    /// Probability that a selected pair is recombined rather than cloned.
    pub crossover_rate: f64,
    /// Per-gene mutation probability.
    pub mutation_rate: f64,
    /// Number of best individuals carried over unchanged each generation.
    pub elitism: usize,
    pub seed: u64,
}

impl GAConfig {
    /// Conventional defaults: population 50, 50 generations, tournament
    /// size 3, crossover 0.9, per-gene mutation 1/genome_len, elitism 1.
    pub fn with_defaults(genome_len: usize, seed: u64) -> Self {
        GAConfig {
            population_size: 50,
            generations: 50,
            tournament_size: 3,
            crossover_rate: 0.9,
            mutation_rate: 1.0 / genome_len.max(1) as f64,
            elitism: 1,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config(format!(
                "population_size {} below the minimum of 2",
                self.population_size
            )));
        }
        if self.tournament_size < 2 || self.tournament_size > self.population_size {
            return Err(Error::Config(format!(
                "tournament_size {} outside [2, population_size]",
                self.tournament_size
            )));
        }
        for (name, rate) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return Err(Error::Config(format!("{name} {rate} outside [0, 1]")));
            }
        }
        if self.elitism >= self.population_size {
            return Err(Error::Config(format!(
                "elitism {} must be below population_size {}",
                self.elitism, self.population_size
            )));
        }
        Ok(())
    }
}

/// Random-init, crossover, and mutation for one genome family.
pub trait GenomeSpec {
    type Genome: Clone;

    fn random(&self, rng: &mut ChaCha8Rng) -> Self::Genome;
    fn crossover(&self, a: &Self::Genome, b: &Self::Genome, rng: &mut ChaCha8Rng)
        -> (Self::Genome, Self::Genome);
    fn mutate(&self, genome: &mut Self::Genome, rate: f64, rng: &mut ChaCha8Rng);
}

/// Outcome of [`evolve_generic`].
#[derive(Debug, Clone)]
pub struct EvolveResult<G> {
    pub best: G,
    pub fitness: f64,
    /// Best fitness in the population after initialization (entry 0) and
    /// after each generation; non-decreasing whenever elitism >= 1.
    pub history: Vec<f64>,
}

/// Run the standard generational loop, maximizing `fitness`.
///
/// Deterministic given (`spec`, `cfg`): all randomness derives from
/// `cfg.seed` through documented substreams.
pub fn evolve_generic<S: GenomeSpec>(
    mut fitness: impl FnMut(&S::Genome) -> f64,
    spec: &S,
    cfg: &GAConfig,
) -> Result<EvolveResult<S::Genome>> {
    cfg.validate()?;
    let pop_size = cfg.population_size;

    // Generation 0: one init substream per slot.
    let mut population: Vec<S::Genome> = (0..pop_size)
        .map(|i| spec.random(&mut substream(cfg.seed, &[0, i as u64])))
        .collect();
    let mut scores: Vec<f64> = population.iter().map(&mut fitness).collect();
    let mut history = Vec::with_capacity(cfg.generations + 1);
    history.push(best_of(&scores));

    let mut ranking: Vec<usize> = (0..pop_size).collect();
    for gen in 1..=cfg.generations as u64 {
        ranking.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
        let mut selector = substream(cfg.seed, &[gen, SELECTION_TAG]);

        let mut next: Vec<S::Genome> = ranking[..cfg.elitism]
            .iter()
            .map(|&i| population[i].clone())
            .collect();
        while next.len() < pop_size {
            let pa = tournament(&scores, cfg.tournament_size, &mut selector);
            let pb = tournament(&scores, cfg.tournament_size, &mut selector);
            let recombine = selector.gen_bool(cfg.crossover_rate);
            let slot = next.len() as u64;
            let mut vary = substream(cfg.seed, &[gen, slot]);
            let (mut ca, mut cb) = if recombine {
                spec.crossover(&population[pa], &population[pb], &mut vary)
            } else {
                (population[pa].clone(), population[pb].clone())
            };
            spec.mutate(&mut ca, cfg.mutation_rate, &mut vary);
            next.push(ca);
            if next.len() < pop_size {
                spec.mutate(&mut cb, cfg.mutation_rate, &mut vary);
                next.push(cb);
            }
        }

        population = next;
        scores = population.iter().map(&mut fitness).collect();
        history.push(best_of(&scores));
    }

    let best_index = (0..pop_size)
        .max_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(b.cmp(&a)))
        .expect("population is non-empty");
    Ok(EvolveResult {
        best: population[best_index].clone(),
        fitness: scores[best_index],
        history,
    })
}

fn best_of(scores: &[f64]) -> f64 {
    scores.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Index of the best of `size` uniform draws; earlier draws win ties.
fn tournament(scores: &[f64], size: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut winner = rng.gen_range(0..scores.len());
    for _ in 1..size {
        let challenger = rng.gen_range(0..scores.len());
        if scores[challenger] > scores[winner] {
            winner = challenger;
        }
    }
    winner
}

/// Owner-sequence genome: uniform crossover, per-gene uniform reassignment.
#[derive(Debug, Clone, Copy)]
pub struct AllocationGenome {
    pub n_agents: usize,
    pub m_resources: usize,
}

impl GenomeSpec for AllocationGenome {
    type Genome = Vec<usize>;

    fn random(&self, rng: &mut ChaCha8Rng) -> Vec<usize> {
        (0..self.m_resources).map(|_| rng.gen_range(0..self.n_agents)).collect()
    }

    fn crossover(&self, a: &Vec<usize>, b: &Vec<usize>, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>) {
        let mut ca = a.clone();
        let mut cb = b.clone();
        for j in 0..self.m_resources {
            if rng.gen_bool(0.5) {
                ca[j] = b[j];
                cb[j] = a[j];
            }
        }
        (ca, cb)
    }

    fn mutate(&self, genome: &mut Vec<usize>, rate: f64, rng: &mut ChaCha8Rng) {
        for gene in genome.iter_mut() {
            if rng.gen_bool(rate) {
                *gene = rng.gen_range(0..self.n_agents);
            }
        }
    }
}

/// Outcome of an LLGA solve.
#[derive(Debug, Clone)]
pub struct GARun {
    pub best: Allocation,
    pub welfare: Welfare,
    /// Per-generation best welfare, as in [`EvolveResult::history`].
    pub history: Vec<f64>,
}

/// Approximate egalitarian optimum of `profile` by genetic search.
pub fn solve_llga(profile: &PreferenceProfile, cfg: &GAConfig) -> Result<GARun> {
    let n = profile.n_agents();
    let m = profile.m_resources();
    if n == 0 {
        return Err(Error::Config("profile has no agents".into()));
    }
    if let Some(bad) = profile.rows.iter().position(|row| row.len() != m) {
        return Err(Error::Dimension(format!(
            "agent {} row has {} values, expected {m}",
            bad + 1,
            profile.rows[bad].len()
        )));
    }
    let spec = AllocationGenome { n_agents: n, m_resources: m };
    let result = evolve_generic(|owner| welfare_unchecked(owner, &profile.rows), &spec, cfg)?;
    Ok(GARun {
        best: Allocation::new(result.best),
        welfare: result.fitness,
        history: result.history,
    })
}
