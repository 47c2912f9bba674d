//! Fixed-length genetic algorithm baseline.
//!
//! Genomes are integer genes, one per dimension, drawn from the unit cells of
//! the box: a dimension `[lo, hi)` allows the integers `ceil(lo) .. ceil(hi)`.
//! Selection is by tournament, recombination is single-point crossover and
//! mutation resets a gene uniformly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::HarnessError;
use crate::batch::{evaluate_all, Objective};
use crate::pso::RunResult;

#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    pub population: usize,
    pub generations: usize,
    pub tournament_size: usize,
    pub crossover_prob: f64,
    pub mutation_prob_per_gene: f64,
    pub elitism: usize,
    pub seed: u64,
    /// Stop once this many objective evaluations have been spent.
    pub max_evaluations: Option<usize>,
    pub parallel: bool,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 50,
            generations: 100,
            tournament_size: 3,
            crossover_prob: 0.9,
            mutation_prob_per_gene: 0.05,
            elitism: 1,
            seed: 0,
            max_evaluations: None,
            parallel: true,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::InvalidConfig(m.to_string()));
        if self.population < 2 {
            return bad("GA population must be at least 2");
        }
        if self.tournament_size < 1 {
            return bad("tournament size must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.crossover_prob)
            || !(0.0..=1.0).contains(&self.mutation_prob_per_gene)
        {
            return bad("probabilities must lie in [0, 1]");
        }
        if self.elitism >= self.population {
            return bad("elitism must be below the population size");
        }
        if self.max_evaluations == Some(0) {
            return bad("evaluation budget must be positive");
        }
        Ok(())
    }
}

fn gene_alphabet(bounds: &[(f64, f64)]) -> Result<Vec<(i64, i64)>, HarnessError> {
    bounds
        .iter()
        .map(|&(lo, hi)| {
            let (first, end) = (lo.ceil() as i64, hi.ceil() as i64);
            if first < end {
                Ok((first, end))
            } else {
                Err(HarnessError::InvalidConfig(format!(
                    "box [{lo}, {hi}) holds no integer gene"
                )))
            }
        })
        .collect()
}

fn tournament(rng: &mut ChaCha8Rng, scores: &[f64], size: usize) -> usize {
    let mut best = rng.gen_range(0..scores.len());
    for _ in 1..size {
        let c = rng.gen_range(0..scores.len());
        if scores[c] < scores[best] || (scores[c] == scores[best] && c < best) {
            best = c;
        }
    }
    best
}

/// Runs the GA, returning the best-ever result.
pub fn ga_run<O: Objective + ?Sized>(
    config: &GaConfig,
    objective: &O,
    bounds: &[(f64, f64)],
) -> Result<RunResult, HarnessError> {
    ga_run_traced(config, objective, bounds).map(|(r, _)| r)
}

/// As [`ga_run`], also returning the best score of each generation's population.
pub fn ga_run_traced<O: Objective + ?Sized>(
    config: &GaConfig,
    objective: &O,
    bounds: &[(f64, f64)],
) -> Result<(RunResult, Vec<f64>), HarnessError> {
    config.validate()?;
    let alphabet = gene_alphabet(bounds)?;
    let dims = alphabet.len();
    if dims == 0 {
        return Err(HarnessError::InvalidConfig("need at least one dimension".into()));
    }
    let budget = config.max_evaluations.unwrap_or(usize::MAX);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let draw_gene = |rng: &mut ChaCha8Rng, d: usize| {
        let (first, end) = alphabet[d];
        rng.gen_range(first..end) as f64
    };

    let init_count = config.population.min(budget);
    let mut genomes: Vec<Vec<f64>> = (0..init_count)
        .map(|_| (0..dims).map(|d| draw_gene(&mut rng, d)).collect())
        .collect();
    let mut scores = evaluate_all(objective, &genomes, config.parallel);
    let mut evaluations = scores.len();

    let population_best = |scores: &[f64]| scores.iter().copied().fold(f64::INFINITY, f64::min);
    let mut best_index = argmin(&scores);
    let mut best_score = scores[best_index];
    let mut best_position = genomes[best_index].clone();
    let mut history = vec![best_score];
    let mut trace = vec![population_best(&scores)];
    let mut generations_run = 0;

    while generations_run < config.generations && evaluations < budget && genomes.len() == config.population {
        let mut order: Vec<usize> = (0..genomes.len()).collect();
        order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));

        let mut next: Vec<Vec<f64>> = order[..config.elitism].iter().map(|&i| genomes[i].clone()).collect();
        let mut next_scores: Vec<f64> = order[..config.elitism].iter().map(|&i| scores[i]).collect();

        let room = (config.population - config.elitism).min(budget - evaluations);
        let mut offspring: Vec<Vec<f64>> = Vec::with_capacity(room);
        while offspring.len() < room {
            let a = &genomes[tournament(&mut rng, &scores, config.tournament_size)];
            let b = &genomes[tournament(&mut rng, &scores, config.tournament_size)];
            let (mut c1, mut c2) = (a.clone(), b.clone());
            if dims > 1 && rng.gen::<f64>() < config.crossover_prob {
                let point = rng.gen_range(1..dims);
                c1[point..].copy_from_slice(&b[point..]);
                c2[point..].copy_from_slice(&a[point..]);
            }
            for child in [&mut c1, &mut c2] {
                for d in 0..dims {
                    if rng.gen::<f64>() < config.mutation_prob_per_gene {
                        child[d] = draw_gene(&mut rng, d);
                    }
                }
            }
            offspring.push(c1);
            if offspring.len() < room {
                offspring.push(c2);
            }
        }
        let offspring_scores = evaluate_all(objective, &offspring, config.parallel);
        evaluations += offspring_scores.len();
        next.extend(offspring);
        next_scores.extend(offspring_scores);
        genomes = next;
        scores = next_scores;
        generations_run += 1;

        best_index = argmin(&scores);
        if scores[best_index] < best_score {
            best_score = scores[best_index];
            best_position = genomes[best_index].clone();
        }
        history.push(best_score);
        trace.push(population_best(&scores));
    }

    Ok((
        RunResult {
            best_position,
            best_score,
            generations_run,
            history,
            evaluations,
        },
        trace,
    ))
}

fn argmin(scores: &[f64]) -> usize {
    scores
        .iter()
        .enumerate()
        .fold(0, |b, (i, s)| if *s < scores[b] { i } else { b })
}
