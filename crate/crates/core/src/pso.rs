//! Box-constrained particle swarm minimizer.
//!
//! Velocity and position follow the inertia-weighted update
//!
//! ```text
//! v' = w·v + c1·r1·(p_best − x) + c2·r2·(g_best − x)
//! x' = x + v'
//! ```
//!
//! with `v'` clamped to `±v_max` and `x'` clamped into the box (the clamped
//! velocity component is zeroed). Updates are synchronous: every particle in
//! a generation sees the global best from the end of the previous one.
//!
//! # Random numbers
//!
//! Runs are driven by one `ChaCha8Rng` seeded with `seed_from_u64(seed)`.
//! Draw order is fixed: initial positions (particle-major, then dimension),
//! initial velocities in the same order, then for every step, particle and
//! dimension one `r1` followed by one `r2`. All draws happen outside the
//! objective evaluation phase, so parallel evaluation cannot change results.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::batch::{evaluate_all, Objective};

#[derive(Debug, Error, PartialEq)]
pub enum PsoError {
    #[error("population must be at least 2, got {0}")]
    Population(usize),
    #[error("need at least one dimension")]
    NoDimensions,
    #[error("dimension {0}: lower bound must be below upper bound")]
    EmptyInterval(usize),
    #[error("dimension {0}: v_max must be positive")]
    VelocityClamp(usize),
    #[error("max_generations must be at least 1")]
    Generations,
    #[error("v_max has {found} entries for {expected} dimensions")]
    VelocityDimensions { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    /// Per-dimension half-open interval `[lo, hi)`.
    pub bounds: Vec<(f64, f64)>,
    pub population: usize,
    pub max_generations: usize,
    pub inertia: f64,
    pub c1: f64,
    pub c2: f64,
    pub v_max: Vec<f64>,
    /// Stop after this many consecutive generations improving g_best by less
    /// than `stall_epsilon`. Zero disables the stall test.
    pub stall_generations: usize,
    pub stall_epsilon: f64,
    pub seed: u64,
    /// Use these instead of random `r1`, `r2` draws.
    pub fixed_r1_r2: Option<(f64, f64)>,
    /// Evaluate each generation in parallel when the build supports it.
    pub parallel: bool,
}

impl PsoConfig {
    /// Defaults over `[lo, hi)^dimensions`: population 50, 100 generations,
    /// constriction-equivalent coefficients, `v_max = 0.1·(hi − lo)`.
    pub fn new(dimensions: usize, lo: f64, hi: f64) -> Self {
        Self::with_bounds(vec![(lo, hi); dimensions])
    }

    pub fn with_bounds(bounds: Vec<(f64, f64)>) -> Self {
        let v_max = bounds.iter().map(|(lo, hi)| 0.1 * (hi - lo)).collect();
        PsoConfig {
            bounds,
            population: 50,
            max_generations: 100,
            inertia: 0.729,
            c1: 1.49445,
            c2: 1.49445,
            v_max,
            stall_generations: 25,
            stall_epsilon: 1e-6,
            seed: 0,
            fixed_r1_r2: None,
            parallel: true,
        }
    }

    pub fn dimensions(&self) -> usize {
        self.bounds.len()
    }

    pub fn validate(&self) -> Result<(), PsoError> {
        if self.population < 2 {
            return Err(PsoError::Population(self.population));
        }
        if self.bounds.is_empty() {
            return Err(PsoError::NoDimensions);
        }
        if self.max_generations < 1 {
            return Err(PsoError::Generations);
        }
        if self.v_max.len() != self.bounds.len() {
            return Err(PsoError::VelocityDimensions {
                expected: self.bounds.len(),
                found: self.v_max.len(),
            });
        }
        for (d, ((lo, hi), v)) in self.bounds.iter().zip(&self.v_max).enumerate() {
            if !(lo < hi) {
                return Err(PsoError::EmptyInterval(d));
            }
            if !(*v > 0.0) {
                return Err(PsoError::VelocityClamp(d));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Particle {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Score of the current position.
    pub score: f64,
    pub p_best_position: Vec<f64>,
    pub p_best_score: f64,
}

#[derive(Debug, Clone)]
pub struct Swarm {
    pub particles: Vec<Particle>,
    pub g_best_position: Vec<f64>,
    pub g_best_score: f64,
    pub generation: usize,
    pub evaluations: usize,
    rng: ChaCha8Rng,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub best_position: Vec<f64>,
    pub best_score: f64,
    pub generations_run: usize,
    /// Best score after initialization and after every generation.
    pub history: Vec<f64>,
    pub evaluations: usize,
}

/// One velocity component of the update rule.
#[allow(clippy::too_many_arguments)]
pub fn velocity_update(
    v: f64,
    x: f64,
    p_best: f64,
    g_best: f64,
    inertia: f64,
    c1: f64,
    c2: f64,
    r1: f64,
    r2: f64,
) -> f64 {
    inertia * v + c1 * r1 * (p_best - x) + c2 * r2 * (g_best - x)
}

/// Clamps into `[lo, hi)`, reporting whether the value moved.
fn clamp_half_open(x: f64, lo: f64, hi: f64) -> (f64, bool) {
    if x < lo {
        (lo, true)
    } else if x >= hi {
        (hi.next_down(), true)
    } else {
        (x, false)
    }
}

impl Swarm {
    /// Builds a swarm from explicit particles; g_best is the lowest p_best
    /// (first particle on ties).
    pub fn from_particles(particles: Vec<Particle>, seed: u64) -> Self {
        let best = particles
            .iter()
            .enumerate()
            .fold(0, |b, (i, p)| if p.p_best_score < particles[b].p_best_score { i } else { b });
        Swarm {
            g_best_position: particles[best].p_best_position.clone(),
            g_best_score: particles[best].p_best_score,
            generation: 0,
            evaluations: 0,
            particles,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn refresh_global_best(&mut self) {
        for p in &self.particles {
            if p.p_best_score < self.g_best_score {
                self.g_best_score = p.p_best_score;
                self.g_best_position.clone_from(&p.p_best_position);
            }
        }
    }

    /// Advances the swarm by one generation.
    pub fn step<O: Objective + ?Sized>(&mut self, config: &PsoConfig, objective: &O) {
        for particle in &mut self.particles {
            for (d, &(lo, hi)) in config.bounds.iter().enumerate() {
                let (r1, r2) = match config.fixed_r1_r2 {
                    Some(r) => r,
                    None => (self.rng.gen::<f64>(), self.rng.gen::<f64>()),
                };
                let v_max = config.v_max[d];
                let x = particle.position[d];
                let v = velocity_update(
                    particle.velocity[d],
                    x,
                    particle.p_best_position[d],
                    self.g_best_position[d],
                    config.inertia,
                    config.c1,
                    config.c2,
                    r1,
                    r2,
                )
                .clamp(-v_max, v_max);
                let (x_new, clamped) = clamp_half_open(x + v, lo, hi);
                particle.position[d] = x_new;
                particle.velocity[d] = if clamped { 0.0 } else { v };
            }
        }

        let positions: Vec<&[f64]> = self.particles.iter().map(|p| p.position.as_slice()).collect();
        let scores = evaluate_all(objective, &positions, config.parallel);
        self.evaluations += scores.len();

        for (particle, score) in self.particles.iter_mut().zip(scores) {
            particle.score = score;
            if score < particle.p_best_score {
                particle.p_best_score = score;
                particle.p_best_position.clone_from(&particle.position);
            }
        }
        self.refresh_global_best();
        self.generation += 1;
    }
}

/// Random initial swarm, scored once.
pub fn init_swarm<O: Objective + ?Sized>(
    config: &PsoConfig,
    objective: &O,
) -> Result<Swarm, PsoError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let positions: Vec<Vec<f64>> = (0..config.population)
        .map(|_| config.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect())
        .collect();
    let velocities: Vec<Vec<f64>> = (0..config.population)
        .map(|_| config.v_max.iter().map(|&v| rng.gen_range(-v..=v)).collect())
        .collect();
    let scores = evaluate_all(objective, &positions, config.parallel);

    let particles = positions
        .into_iter()
        .zip(velocities)
        .zip(scores)
        .map(|((position, velocity), score)| Particle {
            p_best_position: position.clone(),
            p_best_score: score,
            position,
            velocity,
            score,
        })
        .collect();
    let mut swarm = Swarm::from_particles(particles, 0);
    swarm.rng = rng;
    swarm.evaluations = config.population;
    Ok(swarm)
}

/// Runs the swarm until `max_generations` or the stall criterion.
pub fn run<O: Objective + ?Sized>(config: &PsoConfig, objective: &O) -> Result<RunResult, PsoError> {
    let mut swarm = init_swarm(config, objective)?;
    let mut history = vec![swarm.g_best_score];
    let mut stalled = 0;
    while swarm.generation < config.max_generations {
        let previous = swarm.g_best_score;
        swarm.step(config, objective);
        history.push(swarm.g_best_score);
        // inf - inf is NaN, which counts as no improvement
        let improvement = previous - swarm.g_best_score;
        if improvement >= config.stall_epsilon {
            stalled = 0;
        } else {
            stalled += 1;
        }
        if config.stall_generations > 0 && stalled >= config.stall_generations {
            break;
        }
    }
    Ok(RunResult {
        best_position: swarm.g_best_position,
        best_score: swarm.g_best_score,
        generations_run: swarm.generation,
        history,
        evaluations: swarm.evaluations,
    })
}
