//! Multi-seed comparison of search algorithms at a fixed evaluation budget.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use super::{ga_run, random_search, Counted, GaConfig, HarnessError, LigandObjective};
use crate::batch::{map_ordered, Objective};
use crate::catalog::median;
use crate::pso::{self, PsoConfig, RunResult};

pub const DEFAULT_POPULATION: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Particle swarm over the variable-length genome.
    Pso,
    /// Fixed-length GA: integer genes that never select the NULL group.
    Ga,
    /// Uniform sampling of the full box.
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Pso, Algorithm::Ga, Algorithm::Random];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Pso => "pso",
            Algorithm::Ga => "ga",
            Algorithm::Random => "random",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pso" => Ok(Algorithm::Pso),
            "ga" => Ok(Algorithm::Ga),
            "random" => Ok(Algorithm::Random),
            other => Err(format!("unknown algorithm '{other}' (expected pso, ga or random)")),
        }
    }
}

/// Runs one algorithm over `bounds` with exactly `budget` evaluations.
///
/// For [`Algorithm::Ga`] the last unit cell of every dimension is left out,
/// which on the ligand box removes the NULL group and keeps genomes at full
/// length.
pub fn run_algorithm<O: Objective + ?Sized>(
    algorithm: Algorithm,
    objective: &O,
    bounds: &[(f64, f64)],
    seed: u64,
    budget: usize,
    population: usize,
    parallel: bool,
) -> Result<RunResult, HarnessError> {
    match algorithm {
        Algorithm::Pso => {
            if population < 2 || !budget.is_multiple_of(population) || budget / population < 2 {
                return Err(HarnessError::BudgetNotAligned { budget, population });
            }
            let config = PsoConfig {
                population,
                max_generations: budget / population - 1,
                stall_generations: 0,
                seed,
                parallel,
                ..PsoConfig::with_bounds(bounds.to_vec())
            };
            Ok(pso::run(&config, objective)?)
        }
        Algorithm::Ga => {
            let config = GaConfig {
                population,
                generations: usize::MAX,
                max_evaluations: Some(budget),
                seed,
                parallel,
                ..GaConfig::default()
            };
            let fixed: Vec<(f64, f64)> = bounds.iter().map(|&(lo, hi)| (lo, hi - 1.0)).collect();
            ga_run(&config, objective, &fixed)
        }
        Algorithm::Random => random_search(budget, objective, bounds, seed, parallel),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmRow {
    pub algorithm: Algorithm,
    /// Best e_total per seed, kcal/mol, in seed order.
    pub bests: Vec<f64>,
    /// Objective calls per seed, as counted around the objective.
    pub evaluations: Vec<usize>,
    pub median: f64,
    pub min: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<AlgorithmRow>,
    pub seeds: Vec<u64>,
    pub budget: usize,
}

impl ComparisonTable {
    pub fn row(&self, algorithm: Algorithm) -> Option<&AlgorithmRow> {
        self.rows.iter().find(|r| r.algorithm == algorithm)
    }
}

/// Runs every (algorithm, seed) pair at the same budget.
pub fn compare(
    objective: &LigandObjective<'_>,
    algorithms: &[Algorithm],
    seeds: &[u64],
    budget: usize,
    parallel: bool,
) -> Result<ComparisonTable, HarnessError> {
    if algorithms.is_empty() || seeds.is_empty() {
        return Err(HarnessError::InvalidConfig(
            "need at least one algorithm and one seed".into(),
        ));
    }
    let tasks: Vec<(Algorithm, u64)> = algorithms
        .iter()
        .flat_map(|&a| seeds.iter().map(move |&s| (a, s)))
        .collect();
    let bounds = LigandObjective::bounds();
    let results = map_ordered(&tasks, parallel, |&(algorithm, seed)| {
        let counted = Counted::new(objective);
        let run = run_algorithm(
            algorithm,
            &counted,
            &bounds,
            seed,
            budget,
            DEFAULT_POPULATION,
            parallel,
        )?;
        Ok::<_, HarnessError>((run, counted.calls()))
    });

    let mut rows = Vec::with_capacity(algorithms.len());
    let mut results = results.into_iter();
    for &algorithm in algorithms {
        let mut bests = Vec::with_capacity(seeds.len());
        let mut evaluations = Vec::with_capacity(seeds.len());
        for _ in seeds {
            let (run, calls) = results.next().expect("one result per task")?;
            bests.push(run.best_score);
            evaluations.push(calls);
        }
        let mut sorted = bests.clone();
        let median = median(&mut sorted);
        let min = sorted.first().copied().unwrap_or(f64::NAN);
        rows.push(AlgorithmRow {
            algorithm,
            bests,
            evaluations,
            median,
            min,
        });
    }
    Ok(ComparisonTable {
        rows,
        seeds: seeds.to_vec(),
        budget,
    })
}

fn fmt_energy(v: f64) -> String {
    format!("{v:.4}")
}

impl fmt::Display for ComparisonTable {
    /// Aligned table followed by a `key=value` block with full precision.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut header = vec!["algorithm".to_string(), "median".into(), "min".into()];
        header.extend(self.seeds.iter().map(|s| format!("seed {s}")));
        let mut cells: Vec<Vec<String>> = vec![header];
        for row in &self.rows {
            let mut line = vec![row.algorithm.to_string(), fmt_energy(row.median), fmt_energy(row.min)];
            line.extend(row.bests.iter().map(|&b| fmt_energy(b)));
            cells.push(line);
        }
        let widths: Vec<usize> = (0..cells[0].len())
            .map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0))
            .collect();
        for line in &cells {
            let mut out = String::new();
            for (c, cell) in line.iter().enumerate() {
                if c == 0 {
                    let _ = write!(out, "{cell:<w$}", w = widths[c]);
                } else {
                    let _ = write!(out, "  {cell:>w$}", w = widths[c]);
                }
            }
            writeln!(f, "{}", out.trim_end())?;
        }
        writeln!(f)?;
        writeln!(f, "budget={}", self.budget)?;
        for row in &self.rows {
            let name = row.algorithm.name();
            for (seed, (best, evals)) in self.seeds.iter().zip(row.bests.iter().zip(&row.evaluations)) {
                writeln!(f, "{name}.seed[{seed}].best={best}")?;
                writeln!(f, "{name}.seed[{seed}].evaluations={evals}")?;
            }
            writeln!(f, "{name}.median={}", row.median)?;
            writeln!(f, "{name}.min={}", row.min)?;
        }
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        writeln!(f, "seeds={}", seeds.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::GroupCatalog;
    use crate::energy::EnergyConfig;
    use crate::site::parse_site;

    #[test]
    fn single_cell_table() {
        let site = parse_site(include_str!("../../data/plasmodium.site")).unwrap();
        let cat = GroupCatalog::default_catalog();
        let cfg = EnergyConfig::for_catalog(&cat);
        let obj = LigandObjective::new(&site, &cat, &cfg);
        let table = compare(&obj, &[Algorithm::Random], &[5], 300, true).unwrap();
        let direct = random_search(300, &obj, &LigandObjective::bounds(), 5, false).unwrap();
        let row = table.row(Algorithm::Random).unwrap();
        assert_eq!(row.bests, vec![direct.best_score]);
        assert_eq!(row.median, direct.best_score);
        assert_eq!(row.evaluations, vec![300]);
    }

    #[test]
    fn budget_parity_and_seed_independence() {
        let site = parse_site(include_str!("../../data/hiv1_protease.site")).unwrap();
        let cat = GroupCatalog::default_catalog();
        let cfg = EnergyConfig::for_catalog(&cat);
        let obj = LigandObjective::new(&site, &cat, &cfg);
        let small = compare(&obj, &Algorithm::ALL, &[1, 2], 500, true).unwrap();
        let large = compare(&obj, &Algorithm::ALL, &[1, 2, 3], 500, true).unwrap();
        for row in &large.rows {
            assert!(row.evaluations.iter().all(|&e| e == 500), "{row:?}");
            assert_eq!(&row.bests[..2], &small.row(row.algorithm).unwrap().bests[..]);
        }
        let text = large.to_string();
        assert!(text.contains("budget=500"));
        assert!(text.contains("seeds=1,2,3"));
    }

    #[test]
    fn misaligned_pso_budget() {
        let site = parse_site(include_str!("../../data/plasmodium.site")).unwrap();
        let cat = GroupCatalog::default_catalog();
        let cfg = EnergyConfig::for_catalog(&cat);
        let obj = LigandObjective::new(&site, &cat, &cfg);
        assert_eq!(
            compare(&obj, &[Algorithm::Pso], &[1], 510, true),
            Err(HarnessError::BudgetNotAligned {
                budget: 510,
                population: 50
            })
        );
    }
}
