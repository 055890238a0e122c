//! Time-grid evaluation of correlation trajectories and the two
//! positive-variation measures of memory effects: the entanglement-based
//! measure (Bell-state initial condition, fixed by the factorization law)
//! and the mutual-information-based measure (seeded random search over pure
//! initial states).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channels::{apply_to_system, DynamicalMap};
use crate::correlations::{concurrence, eof, info_breakdown_ae, mutual_information_sa};
use crate::error::{QError, Result};
use crate::qlinalg::{haar_sample, PureStateVector};

/// Increments at or below this magnitude are floating-point chatter, not
/// revivals.
pub const INCREMENT_TOL: f64 = 1e-12;
/// Grid-refinement stopping tolerance for the measures.
pub const REFINE_TOL: f64 = 1e-6;
pub const MAX_STEPS: usize = 64_000;

/// Uniform time grid with steps+1 sample points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_start >= 0.0 && t_end > t_start && steps >= 2) {
            return Err(QError::Inconsistent(format!(
                "invalid grid [{t_start}, {t_end}] with {steps} steps"
            )));
        }
        Ok(Self {
            t_start,
            t_end,
            steps,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / self.steps as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t_start + k as f64 * self.spacing()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|k| self.time(k))
    }

    pub fn doubled(&self) -> Self {
        Self {
            steps: self.steps * 2,
            ..*self
        }
    }
}

/// Sampled scalar functional along the dynamics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
}

/// Scalar functionals of the evolved system+ancilla state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Functional {
    Eof,
    MutualInformation,
    Concurrence,
    JAe,
    DeltaAe,
    IAe,
}

impl std::str::FromStr for Functional {
    type Err = QError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eof" => Ok(Self::Eof),
            "mi" | "mutual_information" => Ok(Self::MutualInformation),
            "concurrence" => Ok(Self::Concurrence),
            "j_ae" => Ok(Self::JAe),
            "delta_ae" => Ok(Self::DeltaAe),
            "i_ae" => Ok(Self::IAe),
            other => Err(QError::UnsupportedFunctional(other.to_string())),
        }
    }
}

/// Result of one measure evaluation.
#[derive(Debug, Clone)]
pub struct MeasureResult {
    pub value: f64,
    pub optimal_state: PureStateVector,
    pub grid_used: TimeGrid,
    pub converged: bool,
}

/// The four-amplitude initial state used throughout: amplitudes (a, b, c, d)
/// label the product basis with the ancilla as the leading ket label; stored
/// in (system, ancilla) factor order, which puts the channel on the heavily
/// populated decaying level.
pub fn custom_state(a: f64, b: f64, c: f64) -> Result<PureStateVector> {
    let rest = 1.0 - a * a - b * b - c * c;
    if rest < -1e-12 {
        return Err(QError::Inconsistent(format!(
            "a²+b²+c² = {} exceeds 1",
            a * a + b * b + c * c
        )));
    }
    let d = rest.max(0.0).sqrt();
    let re = |x: f64| Complex64::new(x, 0.0);
    PureStateVector::normalized(vec![re(a), re(c), re(b), re(d)], vec![2, 2])
}

/// The example state with a = 0.05, b = 0.95, c = 0.17.
pub fn example_state() -> PureStateVector {
    custom_state(0.05, 0.95, 0.17).expect("coefficients are normalizable")
}

/// Samples functional(Λ(t_k) ρ₀) on the grid. Grid points are evaluated in
/// parallel and reduced in index order.
pub fn trajectory(
    map: &dyn DynamicalMap,
    psi0: &PureStateVector,
    grid: TimeGrid,
    functional: Functional,
) -> Result<Trajectory> {
    if psi0.subsystem_dims() != [2, 2] {
        return Err(QError::DimensionMismatch {
            expected: 4,
            got: psi0.dim(),
        });
    }
    let rho0 = psi0.density();
    let values: Result<Vec<f64>> = (0..=grid.steps)
        .into_par_iter()
        .map(|k| {
            let rho_t = apply_to_system(&map.at(grid.time(k))?, &rho0)?;
            match functional {
                Functional::Eof => eof(&rho_t),
                Functional::MutualInformation => mutual_information_sa(&rho_t),
                Functional::Concurrence => concurrence(&rho_t),
                Functional::JAe => Ok(info_breakdown_ae(&rho_t)?.j_ae),
                Functional::DeltaAe => Ok(info_breakdown_ae(&rho_t)?.delta_ae),
                Functional::IAe => Ok(info_breakdown_ae(&rho_t)?.i_ae),
            }
        })
        .collect();
    Ok(Trajectory {
        grid,
        values: values?,
    })
}

/// Sum of positive increments, the discrete positive variation. Zero iff
/// the trajectory is nonincreasing (up to the increment tolerance).
pub fn positive_variation(tr: &Trajectory) -> f64 {
    positive_variation_of(&tr.values)
}

pub fn positive_variation_of(values: &[f64]) -> f64 {
    values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > INCREMENT_TOL)
        .sum()
}

fn refine_until_stable(
    map: &dyn DynamicalMap,
    psi0: &PureStateVector,
    base: TimeGrid,
    functional: Functional,
) -> Result<(f64, TimeGrid, bool)> {
    let mut grid = base;
    let mut value = positive_variation(&trajectory(map, psi0, grid, functional)?);
    loop {
        if grid.steps * 2 > MAX_STEPS {
            return Ok((value, grid, false));
        }
        let next = grid.doubled();
        let next_value = positive_variation(&trajectory(map, psi0, next, functional)?);
        let stable = (next_value - value).abs() < REFINE_TOL;
        grid = next;
        value = next_value;
        if stable {
            return Ok((value, grid, true));
        }
    }
}

/// Entanglement-based measure: positive variation of the entanglement of
/// formation with the Bell initial state, which the factorization law makes
/// optimal for every single-qubit map. No search is performed.
pub fn n_e(map: &dyn DynamicalMap, grid: TimeGrid) -> Result<MeasureResult> {
    let bell = PureStateVector::bell_phi_plus();
    let (value, grid_used, converged) = refine_until_stable(map, &bell, grid, Functional::Eof)?;
    Ok(MeasureResult {
        value,
        optimal_state: bell,
        grid_used,
        converged,
    })
}

/// Search budget for the mutual-information measure.
#[derive(Debug, Clone, Copy)]
pub struct SearchParams {
    pub n_samples: usize,
    pub seed: u64,
    pub refine_iters: usize,
}

impl Default for SearchParams {
    fn default() -> Self {
        Self {
            n_samples: 512,
            seed: 42,
            refine_iters: 100,
        }
    }
}

const PERTURBATION_SIGMA: f64 = 0.05;
const LOCAL_REFINE_CANDIDATES: usize = 5;

fn perturbed<R: Rng>(psi: &PureStateVector, rng: &mut R) -> PureStateVector {
    let amps: Vec<Complex64> = psi
        .amplitudes()
        .iter()
        .map(|z| {
            z + Complex64::new(
                PERTURBATION_SIGMA * rng.sample::<f64, _>(StandardNormal),
                PERTURBATION_SIGMA * rng.sample::<f64, _>(StandardNormal),
            )
        })
        .collect();
    PureStateVector::normalized(amps, vec![2, 2]).unwrap_or_else(|_| psi.clone())
}

/// Mutual-information-based measure: best positive variation of the mutual
/// information over seeded Haar-random pure initial states plus the fixed
/// Bell and example candidates, followed by accept-if-better Gaussian
/// perturbation of the leading candidates. Deterministic for a fixed seed.
pub fn n_i(map: &dyn DynamicalMap, grid: TimeGrid, search: SearchParams) -> Result<MeasureResult> {
    if search.n_samples == 0 {
        return Err(QError::Inconsistent("n_samples must be ≥ 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(search.seed);
    let mut candidates: Vec<PureStateVector> =
        vec![PureStateVector::bell_phi_plus(), example_state()];
    candidates.extend((0..search.n_samples).map(|_| haar_sample(4, &mut rng)));

    let score = |psi: &PureStateVector| -> Result<f64> {
        Ok(positive_variation(&trajectory(
            map,
            psi,
            grid,
            Functional::MutualInformation,
        )?))
    };
    let scored: Result<Vec<f64>> = candidates.par_iter().map(score).collect();
    let scored = scored?;

    // Index-ordered selection keeps the result bit-stable across worker
    // counts.
    let mut ranked: Vec<usize> = (0..candidates.len()).collect();
    ranked.sort_by(|&a, &b| scored[b].partial_cmp(&scored[a]).unwrap().then(a.cmp(&b)));

    let mut best_state = candidates[ranked[0]].clone();
    let mut best_value = scored[ranked[0]];
    for &idx in ranked.iter().take(LOCAL_REFINE_CANDIDATES) {
        let mut cur_state = candidates[idx].clone();
        let mut cur_value = scored[idx];
        for _ in 0..search.refine_iters {
            let trial = perturbed(&cur_state, &mut rng);
            let v = score(&trial)?;
            if v > cur_value {
                cur_value = v;
                cur_state = trial;
            }
        }
        if cur_value > best_value {
            best_value = cur_value;
            best_state = cur_state;
        }
    }

    let (value, grid_used, converged) =
        refine_until_stable(map, &best_state, grid, Functional::MutualInformation)?;
    Ok(MeasureResult {
        value,
        optimal_state: best_state,
        grid_used,
        converged,
    })
}

/// Max residual of the concurrence factorization law
/// C(Λ ρ_ψ) = C(Λ ρ_Bell)·C(ψ) over random pure states and grid points.
pub fn check_factorization(
    map: &dyn DynamicalMap,
    grid: TimeGrid,
    n_states: usize,
    seed: u64,
) -> Result<f64> {
    if n_states == 0 {
        return Err(QError::Inconsistent("n_states must be ≥ 1".into()));
    }
    let bell = PureStateVector::bell_phi_plus();
    let bell_curve = trajectory(map, &bell, grid, Functional::Concurrence)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<PureStateVector> = (0..n_states).map(|_| haar_sample(4, &mut rng)).collect();
    let residuals: Result<Vec<f64>> = states
        .par_iter()
        .map(|psi| {
            let c0 = crate::correlations::concurrence_pure(psi)?;
            let curve = trajectory(map, psi, grid, Functional::Concurrence)?;
            Ok(curve
                .values
                .iter()
                .zip(&bell_curve.values)
                .map(|(c, cb)| (c - cb * c0).abs())
                .fold(0.0, f64::max))
        })
        .collect();
    Ok(residuals?.into_iter().fold(0.0, f64::max))
}
