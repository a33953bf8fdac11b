//! Turning fractional LP solutions into schedules.
//!
//! * [`independent_round`] picks one rectangle per task with probability equal to its height and
//!   draws a uniform offset `τ_j`; [`rts`] sequences the result by the `θ` keys of the randomized
//!   time-indexed scheduler.
//! * [`edts`] derandomizes independent rounding by conditional expectations: tasks are committed
//!   one at a time to the worker minimizing the expected objective, then sequenced by Smith's rule.
//! * [`dts`] does the same with the grouped expectations of [`grouped`], which discount pairs of
//!   non-dominated tasks sharing a group by `1 − η`.
//!
//! Random streams: the generator is ChaCha8 seeded with the caller's seed. Rectangle choice for
//! task `j` uses stream `j`, its offset `τ_j` uses stream `2³² + j`, and the tie-break keys of
//! worker `i` use stream `2³³ + i`.

mod edts;
pub mod grouped;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lp::{FractionalSolution, Rectangle};
use crate::model::{Instance, Schedule};

pub use edts::{edts, edts_traced, edts_with_base, expected_completion_independent, expected_objective_independent, EdtsTrace};
pub use grouped::{build_grouping, dts, dts_traced, expected_completion_grouped, expected_objective_grouped, Grouping, DEFAULT_ETA};

/// Largest accepted deviation of a task's total LP mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-6;
/// Shift parameter of the randomized time-indexed scheduler.
pub const DEFAULT_ALPHA: f64 = 0.3;
/// Extra `θ` offset, as a fraction of `p`, for tasks dominated by their worker.
pub const DOMINATED_SHIFT: f64 = 0.2;

const TAU_STREAM: u64 = 1 << 32;
const TIE_STREAM: u64 = 1 << 33;

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Worker `i` dominates task `j` when `Σ_l x_ijl > 1/2`.
pub fn dominates(solution: &FractionalSolution, worker: usize, task: usize) -> bool {
    solution.y(worker, task) > 0.5
}

/// Checks that `solution` matches `instance` and that every task carries unit mass.
pub(crate) fn check_solution(solution: &FractionalSolution, instance: &Instance) -> Result<()> {
    if solution.m() != instance.m() || solution.n() != instance.n() {
        return Err(Error::InvalidArgument(format!(
            "solution is {}×{}, instance is {}×{}",
            solution.m(),
            solution.n(),
            instance.m(),
            instance.n()
        )));
    }
    for j in 0..solution.n() {
        let mass: f64 = solution.task_rectangles(j).iter().map(|r| r.value).sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidArgument(format!("task {j} has total LP mass {mass}, expected 1")));
        }
    }
    Ok(())
}

/// Marginals `y_ij` rescaled so that every task's column sums to exactly 1 (row-major, `m × n`).
pub(crate) fn normalized_marginals(solution: &FractionalSolution, instance: &Instance) -> Result<Vec<f64>> {
    check_solution(solution, instance)?;
    let (m, n) = (instance.m(), instance.n());
    let mut y = solution.marginals().to_vec();
    for j in 0..n {
        let s: f64 = (0..m).map(|i| y[i * n + j]).sum();
        for i in 0..m {
            y[i * n + j] /= s;
        }
    }
    Ok(y)
}

/// Outcome of rounding: worker, rectangle start, offset and sequencing key per task.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RoundedAssignment {
    pub sigma: Vec<usize>,
    pub start: Vec<f64>,
    pub tau: Vec<f64>,
    pub theta: Vec<f64>,
}

impl RoundedAssignment {
    /// Runs each worker's tasks by non-decreasing `θ`, ties by task index.
    pub fn schedule(&self, m: usize) -> Result<Schedule> {
        let mut order: Vec<Vec<usize>> = vec![Vec::new(); m];
        for (j, &i) in self.sigma.iter().enumerate() {
            order
                .get_mut(i)
                .ok_or_else(|| Error::InvalidArgument(format!("task {j} rounded to missing worker {i}")))?
                .push(j);
        }
        for seq in &mut order {
            seq.sort_by(|&a, &b| self.theta[a].total_cmp(&self.theta[b]).then(a.cmp(&b)));
        }
        Schedule::from_orders(self.sigma.len(), order)
    }
}

/// Chooses one rectangle per task; the assignment step of [`rts`].
pub trait AssignmentRounding {
    fn select(&self, solution: &FractionalSolution, seed: u64) -> Result<Vec<Rectangle>>;
}

/// Each task independently picks rectangle `(i, l)` with probability `x_ijl`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IndependentRounding;

impl AssignmentRounding for IndependentRounding {
    fn select(&self, solution: &FractionalSolution, seed: u64) -> Result<Vec<Rectangle>> {
        (0..solution.n())
            .map(|j| {
                let rects = solution.task_rectangles(j);
                let total: f64 = rects.iter().map(|r| r.value).sum();
                if rects.is_empty() || (total - 1.0).abs() > MASS_TOLERANCE {
                    return Err(Error::InvalidArgument(format!("task {j} has total LP mass {total}, expected 1")));
                }
                let u: f64 = rng_for(seed, j as u64).random::<f64>() * total;
                let mut acc = 0.0;
                for r in rects {
                    acc += r.value;
                    if u < acc {
                        return Ok(*r);
                    }
                }
                Ok(rects[rects.len() - 1])
            })
            .collect()
    }
}

fn offsets(instance: &Instance, chosen: &[Rectangle], seed: u64) -> Vec<f64> {
    chosen
        .iter()
        .enumerate()
        .map(|(j, r)| rng_for(seed, TAU_STREAM + j as u64).random::<f64>() * instance.p(r.worker, j))
        .collect()
}

/// Independent rounding with `θ_j = t_l + τ_j`.
pub fn independent_round(solution: &FractionalSolution, instance: &Instance, seed: u64) -> Result<RoundedAssignment> {
    check_solution(solution, instance)?;
    let chosen = IndependentRounding.select(solution, seed)?;
    let tau = offsets(instance, &chosen, seed);
    let theta = chosen.iter().zip(&tau).map(|(r, t)| r.start + t).collect();
    Ok(RoundedAssignment {
        sigma: chosen.iter().map(|r| r.worker).collect(),
        start: chosen.iter().map(|r| r.start).collect(),
        tau,
        theta,
    })
}

/// Randomized time-indexed scheduling with independent rounding.
pub fn rts(solution: &FractionalSolution, instance: &Instance, seed: u64, alpha: f64) -> Result<Schedule> {
    rts_with(&IndependentRounding, solution, instance, seed, alpha).map(|(s, _)| s)
}

/// Randomized time-indexed scheduling with a custom assignment step. Keys are
/// `θ_j = (1+α) s_j + τ_j`, plus `0.2 p_{σ(j)j}` when `σ(j)` dominates `j`; each worker runs its
/// tasks by non-decreasing `θ`, ties broken by random keys.
pub fn rts_with(
    rounding: &dyn AssignmentRounding,
    solution: &FractionalSolution,
    instance: &Instance,
    seed: u64,
    alpha: f64,
) -> Result<(Schedule, RoundedAssignment)> {
    check_solution(solution, instance)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be nonnegative, got {alpha}")));
    }
    let chosen = rounding.select(solution, seed)?;
    if chosen.len() != instance.n() || chosen.iter().enumerate().any(|(j, r)| r.task != j || r.worker >= instance.m()) {
        return Err(Error::InvalidArgument("rounding must select one rectangle per task, in task order".into()));
    }
    let tau = offsets(instance, &chosen, seed);
    let theta: Vec<f64> = chosen
        .iter()
        .zip(&tau)
        .map(|(r, t)| {
            let shift = if dominates(solution, r.worker, r.task) {
                DOMINATED_SHIFT * instance.p(r.worker, r.task)
            } else {
                0.0
            };
            (1.0 + alpha) * r.start + t + shift
        })
        .collect();
    let mut order: Vec<Vec<usize>> = vec![Vec::new(); instance.m()];
    for (j, r) in chosen.iter().enumerate() {
        order[r.worker].push(j);
    }
    for (i, seq) in order.iter_mut().enumerate() {
        let mut rng = rng_for(seed, TIE_STREAM + i as u64);
        let mut keyed: Vec<(f64, u64, usize)> = seq.iter().map(|&j| (theta[j], rng.random::<u64>(), j)).collect();
        keyed.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        *seq = keyed.into_iter().map(|(_, _, j)| j).collect();
    }
    let schedule = Schedule::from_orders(instance.n(), order)?;
    let assignment = RoundedAssignment {
        sigma: chosen.iter().map(|r| r.worker).collect(),
        start: chosen.iter().map(|r| r.start).collect(),
        tau,
        theta,
    };
    Ok((schedule, assignment))
}

/// Tasks committed so far during derandomization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialAssignment {
    worker: Vec<Option<usize>>,
}

impl PartialAssignment {
    pub fn new(n: usize) -> Self {
        PartialAssignment { worker: vec![None; n] }
    }

    pub fn n(&self) -> usize {
        self.worker.len()
    }

    pub fn assign(&mut self, task: usize, worker: usize) -> Result<()> {
        match self.worker.get(task) {
            None => Err(Error::InvalidArgument(format!("task {task} out of range"))),
            Some(Some(k)) => Err(Error::InvalidArgument(format!("task {task} already committed to worker {k}"))),
            Some(None) => {
                self.worker[task] = Some(worker);
                Ok(())
            }
        }
    }

    pub fn worker_of(&self, task: usize) -> Option<usize> {
        self.worker[task]
    }

    pub fn is_assigned(&self, task: usize) -> bool {
        self.worker[task].is_some()
    }

    /// `z_ij`.
    pub fn z(&self, worker: usize, task: usize) -> f64 {
        if self.worker[task] == Some(worker) {
            1.0
        } else {
            0.0
        }
    }

    /// `z̄_j = 1 − Σ_i z_ij`.
    pub fn zbar(&self, task: usize) -> f64 {
        if self.worker[task].is_some() {
            0.0
        } else {
            1.0
        }
    }

    pub fn assigned(&self) -> usize {
        self.worker.iter().filter(|w| w.is_some()).count()
    }

    pub(crate) fn check(&self, instance: &Instance) -> Result<()> {
        if self.worker.len() != instance.n() {
            return Err(Error::InvalidArgument(format!(
                "partial assignment covers {} tasks, instance has {}",
                self.worker.len(),
                instance.n()
            )));
        }
        if let Some((j, k)) = self.worker.iter().enumerate().find_map(|(j, w)| w.filter(|&k| k >= instance.m()).map(|k| (j, k))) {
            return Err(Error::InvalidArgument(format!("task {j} committed to missing worker {k}")));
        }
        Ok(())
    }

    /// Per-worker Smith-ordered schedule; every task must be committed.
    pub fn into_schedule(self, instance: &Instance) -> Result<Schedule> {
        let assignment: Option<Vec<usize>> = self.worker.into_iter().collect();
        let assignment = assignment.ok_or_else(|| Error::InvalidArgument("not every task is committed".into()))?;
        Schedule::from_assignment(instance, &assignment)
    }
}
