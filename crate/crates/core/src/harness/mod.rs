//! Baselines, the exhaustive oracle and the multi-seed comparison runner.

mod compare;
mod ga;
mod oracle;

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::batch::{evaluate_all, Objective};
use crate::catalog::{GroupCatalog, NULL_GROUP};
use crate::energy::{best_over_poses, EnergyConfig, EnergyReport};
use crate::pso::{PsoError, RunResult};
use crate::site::ActiveSite;
use crate::tree::{decode, GENOME_LEN};

pub use compare::{compare, Algorithm, AlgorithmRow, ComparisonTable};
pub use ga::{ga_run, ga_run_traced, GaConfig};
pub use oracle::{enumerate_exact, OracleResult, RestrictedInstance, MAX_ORACLE_EVALUATIONS};

#[derive(Debug, Error, PartialEq)]
pub enum HarnessError {
    #[error("oracle instance too large: {subset} groups at depth {depth}")]
    BudgetExceeded { subset: usize, depth: usize },
    #[error("invalid group subset: {0}")]
    InvalidSubset(String),
    #[error("budget {budget} must be a multiple of the swarm population {population} covering at least two generations")]
    BudgetNotAligned { budget: usize, population: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Pso(#[from] PsoError),
}

/// The ligand design objective: decode a genome, place it at every pose and
/// return the lowest total energy.
#[derive(Debug, Clone, Copy)]
pub struct LigandObjective<'a> {
    pub site: &'a ActiveSite,
    pub catalog: &'a GroupCatalog,
    pub config: &'a EnergyConfig,
}

impl<'a> LigandObjective<'a> {
    pub fn new(site: &'a ActiveSite, catalog: &'a GroupCatalog, config: &'a EnergyConfig) -> Self {
        LigandObjective {
            site,
            catalog,
            config,
        }
    }

    pub fn report(&self, genes: &[f64]) -> EnergyReport {
        best_over_poses(&decode(genes, self.catalog), self.site, self.catalog, self.config)
    }

    /// Search box of the full problem.
    pub fn bounds() -> Vec<(f64, f64)> {
        vec![(0.0, (NULL_GROUP + 1) as f64); GENOME_LEN]
    }
}

impl Objective for LigandObjective<'_> {
    fn evaluate(&self, x: &[f64]) -> f64 {
        self.report(x).e_total
    }
}

/// Wraps an objective and counts calls.
pub struct Counted<'a, O: ?Sized> {
    inner: &'a O,
    calls: AtomicUsize,
}

impl<'a, O: Objective + ?Sized> Counted<'a, O> {
    pub fn new(inner: &'a O) -> Self {
        Counted {
            inner,
            calls: AtomicUsize::new(0),
        }
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<O: Objective + ?Sized> Objective for Counted<'_, O> {
    fn evaluate(&self, x: &[f64]) -> f64 {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(x)
    }
}

const RANDOM_CHUNK: usize = 1024;

/// Best of `budget` uniform samples from the box. Samples are drawn in a
/// fixed order, so a larger budget extends the same stream.
pub fn random_search<O: Objective + ?Sized>(
    budget: usize,
    objective: &O,
    bounds: &[(f64, f64)],
    seed: u64,
    parallel: bool,
) -> Result<RunResult, HarnessError> {
    if budget == 0 {
        return Err(HarnessError::InvalidConfig("budget must be at least 1".into()));
    }
    if bounds.iter().any(|(lo, hi)| !(lo < hi)) || bounds.is_empty() {
        return Err(HarnessError::InvalidConfig("empty search box".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best_score = f64::INFINITY;
    let mut best_position = Vec::new();
    let mut history = Vec::with_capacity(budget);
    let mut drawn = 0;
    while drawn < budget {
        let n = RANDOM_CHUNK.min(budget - drawn);
        let points: Vec<Vec<f64>> = (0..n)
            .map(|_| bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect())
            .collect();
        let scores = evaluate_all(objective, &points, parallel);
        for (point, score) in points.into_iter().zip(scores) {
            if score < best_score || best_position.is_empty() {
                best_score = score;
                best_position = point;
            }
            history.push(best_score);
        }
        drawn += n;
    }
    Ok(RunResult {
        best_position,
        best_score,
        generations_run: budget,
        history,
        evaluations: budget,
    })
}
