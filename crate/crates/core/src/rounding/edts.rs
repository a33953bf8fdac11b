//! Conditional expectations under independent rounding and their derandomization.
//!
//! With `a_ij = z_ij` for committed tasks and `a_ij = y_ij` otherwise, the expected objective is
//!
//! ```text
//! Pot = Σ_i Σ_q w_q a_iq (Φ_i + p_iq) + Σ_i Σ_q Σ_{j' ≺_i q} w_q a_iq a_ij' p_ij'
//! ```
//!
//! which is linear in any single task's column `a_·j`. Committing `j` to `i` therefore yields
//! `Pot − Σ_k y_kj c_kj + c_ij` with
//! `c_ij = w_j (Φ_i + p_ij) + w_j Σ_{j' ≺ j} a_ij' p_ij' + p_ij Σ_{q ≻ j} w_q a_iq`,
//! and the minimizing worker never raises the potential. The two sums are kept in Fenwick trees
//! over each worker's Smith ranks, so a commitment costs `O(m log n)`.

use alloc::vec;
use alloc::vec::Vec;

use super::{check_solution, normalized_marginals, PartialAssignment};
use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::lp::FractionalSolution;
use crate::model::{higher_priority, smith_ranks, Instance, Schedule};

/// Result of a derandomized assignment: the schedule, the expected objective before the first
/// commitment and after each one, and the chosen worker per task.
#[derive(Debug, Clone, PartialEq)]
pub struct EdtsTrace {
    pub schedule: Schedule,
    pub potentials: Vec<f64>,
    pub choices: Vec<usize>,
}

/// `y_ij` divided by task `j`'s total mass.
fn normalized_y(solution: &FractionalSolution, worker: usize, task: usize) -> f64 {
    let total: f64 = (0..solution.m()).map(|k| solution.y(k, task)).sum();
    solution.y(worker, task) / total
}

fn check_partial(instance: &Instance, worker: usize, task: usize, partial: &PartialAssignment) -> Result<()> {
    partial.check(instance)?;
    if worker >= instance.m() || task >= instance.n() {
        return Err(Error::InvalidArgument("worker or task index out of range".into()));
    }
    if let Some(k) = partial.worker_of(task) {
        if k != worker {
            return Err(Error::InvalidArgument(alloc::format!(
                "task {task} is committed to worker {k}, not {worker}"
            )));
        }
    }
    Ok(())
}

fn conditional(
    solution: &FractionalSolution,
    instance: &Instance,
    base: f64,
    worker: usize,
    task: usize,
    partial: &PartialAssignment,
) -> f64 {
    let mut c = base + instance.p(worker, task);
    for q in 0..instance.n() {
        if q != task && higher_priority(instance, worker, q, task) {
            let a = match partial.worker_of(q) {
                Some(k) if k == worker => 1.0,
                Some(_) => 0.0,
                None => normalized_y(solution, worker, q),
            };
            c += a * instance.p(worker, q);
        }
    }
    c
}

/// `E[C_j | σ(j) = i]` given the committed tasks in `partial`. Uncommitted tasks contribute their
/// (per-task normalized) LP marginals; when `j` itself is committed to `i` this is its expected
/// completion time.
pub fn expected_completion_independent(
    solution: &FractionalSolution,
    instance: &Instance,
    worker: usize,
    task: usize,
    partial: &PartialAssignment,
) -> Result<f64> {
    check_solution(solution, instance)?;
    check_partial(instance, worker, task, partial)?;
    Ok(conditional(solution, instance, instance.contact(worker), worker, task, partial))
}

/// `E[Σ_q w_q C_q]` given `partial`, by the direct `O(m n²)` formula.
pub fn expected_objective_independent(
    solution: &FractionalSolution,
    instance: &Instance,
    partial: &PartialAssignment,
) -> Result<f64> {
    check_solution(solution, instance)?;
    partial.check(instance)?;
    let mut total = 0.0;
    for q in 0..instance.n() {
        let e = match partial.worker_of(q) {
            Some(i) => conditional(solution, instance, instance.contact(i), i, q, partial),
            None => (0..instance.m())
                .map(|i| normalized_y(solution, i, q) * conditional(solution, instance, instance.contact(i), i, q, partial))
                .sum(),
        };
        total += instance.weight(q) * e;
    }
    Ok(total)
}

/// Derandomized independent rounding.
pub fn edts(solution: &FractionalSolution, instance: &Instance) -> Result<Schedule> {
    edts_traced(solution, instance, &instance.contact_loads()).map(|t| t.schedule)
}

/// [`edts`] with `base[i]` in place of worker `i`'s contact overhead.
pub fn edts_with_base(solution: &FractionalSolution, instance: &Instance, base: &[f64]) -> Result<Schedule> {
    edts_traced(solution, instance, base).map(|t| t.schedule)
}

/// [`edts_with_base`], also returning the potential after every commitment.
pub fn edts_traced(solution: &FractionalSolution, instance: &Instance, base: &[f64]) -> Result<EdtsTrace> {
    let (m, n) = (instance.m(), instance.n());
    if base.len() != m {
        return Err(Error::InvalidArgument("base load length must equal m".into()));
    }
    let y = normalized_marginals(solution, instance)?;
    let ranks: Vec<Vec<usize>> = (0..m).map(|i| smith_ranks(instance, i)).collect();
    let mut work: Vec<Fenwick> = (0..m).map(|_| Fenwick::new(n)).collect();
    let mut weight: Vec<Fenwick> = (0..m).map(|_| Fenwick::new(n)).collect();

    let mut pot = 0.0;
    for i in 0..m {
        let mut by_rank = vec![0usize; n];
        for j in 0..n {
            by_rank[ranks[i][j]] = j;
        }
        let mut prefix = 0.0;
        for &q in &by_rank {
            let a = y[i * n + q];
            let (w, p) = (instance.weight(q), instance.p(i, q));
            pot += w * a * (base[i] + p + prefix);
            prefix += a * p;
            work[i].add(ranks[i][q], a * p);
            weight[i].add(ranks[i][q], w * a);
        }
    }

    let mut potentials = Vec::with_capacity(n + 1);
    potentials.push(pot);
    let mut choices = Vec::with_capacity(n);
    let mut partial = PartialAssignment::new(n);
    let mut c = vec![0.0; m];
    for j in 0..n {
        let w = instance.weight(j);
        let mut current = 0.0;
        let mut best = 0;
        for i in 0..m {
            let r = ranks[i][j];
            let p = instance.p(i, j);
            let suffix = weight[i].total() - weight[i].prefix(r + 1);
            c[i] = w * (base[i] + p) + w * work[i].prefix(r) + p * suffix;
            current += y[i * n + j] * c[i];
            if c[i] < c[best] {
                best = i;
            }
        }
        pot += c[best] - current;
        potentials.push(pot);
        choices.push(best);
        partial.assign(j, best)?;
        for i in 0..m {
            let delta = if i == best { 1.0 } else { 0.0 } - y[i * n + j];
            if delta != 0.0 {
                work[i].add(ranks[i][j], delta * instance.p(i, j));
                weight[i].add(ranks[i][j], delta * w);
            }
        }
    }
    Ok(EdtsTrace { schedule: partial.into_schedule(instance)?, potentials, choices })
}
