//! Exhaustive ground truth on restricted ligand instances.
//!
//! A restricted instance allows only a small subset of groups and only the
//! first `depth` genes; every later gene is NULL. Small enough instances can
//! be enumerated completely, which gives the exact minimum a heuristic is
//! measured against.

use super::{HarnessError, LigandObjective};
use crate::batch::{map_ordered, Objective};
use crate::catalog::{CATALOG_SIZE, NULL_GROUP};
use crate::energy::EnergyReport;
use crate::tree::{Genome, GENOME_LEN};

pub const MAX_SUBSET: usize = 8;
pub const MAX_DEPTH: usize = 5;
pub const MAX_ORACLE_EVALUATIONS: usize = 1_000_000;

/// The restricted search problem, usable directly as an objective over
/// `[0, subset.len())^depth`.
#[derive(Debug, Clone)]
pub struct RestrictedInstance<'a> {
    pub objective: LigandObjective<'a>,
    pub subset: Vec<usize>,
    pub depth: usize,
}

impl<'a> RestrictedInstance<'a> {
    pub fn new(
        objective: LigandObjective<'a>,
        subset: Vec<usize>,
        depth: usize,
    ) -> Result<Self, HarnessError> {
        if subset.is_empty() || subset.iter().any(|&g| g >= CATALOG_SIZE) {
            return Err(HarnessError::InvalidSubset(format!("{subset:?}")));
        }
        let mut sorted = subset.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != subset.len() {
            return Err(HarnessError::InvalidSubset(format!("{subset:?} repeats a group")));
        }
        let too_big = subset.len() > MAX_SUBSET
            || depth > MAX_DEPTH
            || depth == 0
            || subset.len().checked_pow(depth as u32).is_none_or(|n| n > MAX_ORACLE_EVALUATIONS);
        if too_big {
            return Err(HarnessError::BudgetExceeded {
                subset: subset.len(),
                depth,
            });
        }
        Ok(RestrictedInstance {
            objective,
            subset,
            depth,
        })
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, self.subset.len() as f64); self.depth]
    }

    /// Number of distinct gene tuples.
    pub fn size(&self) -> usize {
        self.subset.len().pow(self.depth as u32)
    }

    /// Full 15-gene genome for a point of the restricted box.
    pub fn genome(&self, x: &[f64]) -> Vec<f64> {
        let last = self.subset.len() - 1;
        let mut genes = vec![NULL_GROUP as f64; GENOME_LEN];
        for (gene, &v) in genes.iter_mut().zip(x) {
            let k = (v.floor().max(0.0) as usize).min(last);
            *gene = self.subset[k] as f64;
        }
        genes
    }

    /// Genome of the `index`-th tuple in lexicographic order.
    fn genome_at(&self, mut index: usize) -> Vec<f64> {
        let n = self.subset.len();
        let mut x = vec![0.0; self.depth];
        for slot in x.iter_mut().rev() {
            *slot = (index % n) as f64;
            index /= n;
        }
        self.genome(&x)
    }
}

impl Objective for RestrictedInstance<'_> {
    fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.evaluate(&self.genome(x))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub genome: Genome,
    pub report: EnergyReport,
    pub evaluations: usize,
}

/// Evaluates every tuple of the instance and returns the exact minimum,
/// keeping the lexicographically first tuple on ties.
pub fn enumerate_exact(instance: &RestrictedInstance<'_>, parallel: bool) -> OracleResult {
    let indices: Vec<usize> = (0..instance.size()).collect();
    let energies = map_ordered(&indices, parallel, |&i| {
        instance.objective.evaluate(&instance.genome_at(i))
    });
    let best = energies
        .iter()
        .enumerate()
        .fold(0, |b, (i, e)| if *e < energies[b] { i } else { b });
    let genes = instance.genome_at(best);
    OracleResult {
        report: instance.objective.report(&genes),
        genome: Genome::new(&genes).expect("catalog indices lie in the box"),
        evaluations: energies.len(),
    }
}
