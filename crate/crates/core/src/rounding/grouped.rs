//! Grouped conditional expectations and the DTS derandomization.
//!
//! A grouping splits each worker's rectangles into groups of total height at most 1; a task may
//! belong to several groups with fractional mass `y_uj`. When neither `j` nor `j'` is dominated by
//! the worker (`Σ_u y_uj ≤ 1/2`) and both sit in the same group, the rounding makes them land
//! together with probability at most `(1 − η) y_uj y_uj'`, so `j'`'s delay on `j` is discounted.
//!
//! A committed task keeps the group structure of its worker: its expected completion time is the
//! average of the per-group expressions weighted by `y_uj / y_ij` (no discount if `y_ij = 0`).
//! Unlike the independent case, the discount makes the potential a pessimistic estimate, so a
//! commitment can raise it slightly; [`dts_traced`] reports every step.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{normalized_marginals, EdtsTrace, PartialAssignment};
use crate::error::{Error, Result};
use crate::lp::FractionalSolution;
use crate::model::{higher_priority, Instance};

/// Correlation discount of the strong-negative-correlation rounding.
pub const DEFAULT_ETA: f64 = 0.1561;

const GROUP_TOL: f64 = 1e-9;

/// Fractional partition of one worker's rectangles into groups.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Grouping {
    worker: usize,
    n: usize,
    /// Per group, `(task, mass)` in sweep order.
    groups: Vec<Vec<(usize, f64)>>,
}

impl Grouping {
    /// Validates that every group holds at most unit mass.
    pub fn new(worker: usize, n: usize, groups: Vec<Vec<(usize, f64)>>) -> Result<Self> {
        for (u, g) in groups.iter().enumerate() {
            let mut total = 0.0;
            for &(j, v) in g {
                if j >= n || !(v.is_finite() && v >= 0.0) {
                    return Err(Error::InvalidArgument(format!("group {u} has invalid member ({j}, {v})")));
                }
                total += v;
            }
            if total > 1.0 + GROUP_TOL {
                return Err(Error::InvalidArgument(format!("group {u} holds mass {total} > 1")));
            }
        }
        Ok(Grouping { worker, n, groups })
    }

    pub fn worker(&self) -> usize {
        self.worker
    }

    pub fn groups(&self) -> &[Vec<(usize, f64)>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// `y_uj`.
    pub fn mass(&self, group: usize, task: usize) -> f64 {
        self.groups[group].iter().filter(|&&(j, _)| j == task).map(|&(_, v)| v).sum()
    }

    pub fn group_mass(&self, group: usize) -> f64 {
        self.groups[group].iter().map(|&(_, v)| v).sum()
    }

    /// `Σ_u y_uj` for every task.
    pub fn task_mass(&self) -> Vec<f64> {
        let mut t = vec![0.0; self.n];
        for g in &self.groups {
            for &(j, v) in g {
                t[j] += v;
            }
        }
        t
    }
}

/// Sweeps the worker's rectangles by non-decreasing start (ties by task, then slot) and fills
/// groups up to unit mass, splitting a rectangle across the boundary when it overflows.
pub fn build_grouping(solution: &FractionalSolution, worker: usize) -> Grouping {
    let mut rects: Vec<_> = solution.rectangles().iter().filter(|r| r.worker == worker).collect();
    rects.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.task.cmp(&b.task)).then(a.slot.cmp(&b.slot)));
    let mut groups: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut current: Vec<(usize, f64)> = Vec::new();
    let mut filled = 0.0;
    for r in rects {
        let mut left = r.value;
        while left > 0.0 {
            let room = 1.0 - filled;
            let take = if left <= room + GROUP_TOL { left } else { room };
            match current.last_mut() {
                Some((j, v)) if *j == r.task => *v += take,
                _ => current.push((r.task, take)),
            }
            filled += take;
            left -= take;
            if filled >= 1.0 - GROUP_TOL {
                groups.push(core::mem::take(&mut current));
                filled = 0.0;
            }
        }
    }
    if !current.is_empty() {
        groups.push(current);
    }
    Grouping { worker, n: solution.n(), groups }
}

/// Per-worker group masses rescaled with the per-task normalization of the marginals.
struct Context<'a> {
    instance: &'a Instance,
    base: &'a [f64],
    eta: f64,
    /// `y[i·n + j]`, normalized.
    y: Vec<f64>,
    /// `members[i][j]`: `(group, normalized mass)` of task `j` on worker `i`.
    members: Vec<Vec<Vec<(usize, f64)>>>,
    /// `dominated[i][j]`: `Σ_u y_uj > 1/2`.
    dominated: Vec<Vec<bool>>,
}

impl<'a> Context<'a> {
    fn new(
        solution: &FractionalSolution,
        groupings: &[Grouping],
        instance: &'a Instance,
        base: &'a [f64],
        eta: f64,
    ) -> Result<Self> {
        let (m, n) = (instance.m(), instance.n());
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidArgument(format!("eta must lie in [0, 1], got {eta}")));
        }
        if base.len() != m {
            return Err(Error::InvalidArgument("base load length must equal m".into()));
        }
        let y = normalized_marginals(solution, instance)?;
        if groupings.len() != m {
            return Err(Error::InvalidArgument(format!("expected {m} groupings, got {}", groupings.len())));
        }
        let column: Vec<f64> = (0..n).map(|j| (0..m).map(|i| solution.y(i, j)).sum()).collect();
        let mut members = vec![vec![Vec::new(); n]; m];
        let mut dominated = vec![vec![false; n]; m];
        for (i, g) in groupings.iter().enumerate() {
            if g.worker != i || g.n != n {
                return Err(Error::InvalidArgument(format!("grouping {i} does not describe worker {i} over {n} tasks")));
            }
            for (j, mass) in g.task_mass().into_iter().enumerate() {
                if (mass - solution.y(i, j)).abs() > GROUP_TOL {
                    return Err(Error::InvalidArgument(format!(
                        "grouping of worker {i} gives task {j} mass {mass}, LP marginal is {}",
                        solution.y(i, j)
                    )));
                }
            }
            for (u, grp) in g.groups.iter().enumerate() {
                for &(j, v) in grp {
                    let v = v / column[j];
                    match members[i][j].last_mut() {
                        Some((last, acc)) if *last == u => *acc += v,
                        _ => members[i][j].push((u, v)),
                    }
                }
            }
            for j in 0..n {
                dominated[i][j] = members[i][j].iter().map(|&(_, v)| v).sum::<f64>() > 0.5;
            }
        }
        Ok(Context { instance, base, eta, y, members, dominated })
    }

    fn n(&self) -> usize {
        self.instance.n()
    }

    fn group_mass(&self, i: usize, j: usize, u: usize) -> f64 {
        self.members[i][j].iter().filter(|&&(g, _)| g == u).map(|&(_, v)| v).sum()
    }

    /// `E[C_j | σ(j) = u]` on worker `i`; `group = None` drops the same-group discount.
    fn conditional(&self, i: usize, group: Option<usize>, j: usize, partial: &PartialAssignment) -> f64 {
        let inst = self.instance;
        let mut c = self.base[i] + inst.p(i, j);
        let discount_j = group.is_some() && !self.dominated[i][j];
        for q in 0..self.n() {
            if q == j || !higher_priority(inst, i, q, j) {
                continue;
            }
            let p = inst.p(i, q);
            match partial.worker_of(q) {
                Some(k) if k == i => c += p,
                Some(_) => {}
                None => {
                    let mut mass = self.y[i * self.n() + q];
                    if discount_j && !self.dominated[i][q] {
                        mass -= self.eta * self.group_mass(i, q, group.unwrap_or(usize::MAX));
                    }
                    c += mass * p;
                }
            }
        }
        c
    }

    /// `E[C_j]` for a task committed to `i`.
    fn committed(&self, i: usize, j: usize, partial: &PartialAssignment) -> f64 {
        let yij = self.y[i * self.n() + j];
        if yij > 0.0 {
            self.members[i][j].iter().map(|&(u, v)| v / yij * self.conditional(i, Some(u), j, partial)).sum()
        } else {
            self.conditional(i, None, j, partial)
        }
    }

    /// `E[C_j]` for an uncommitted task.
    fn uncommitted(&self, j: usize, partial: &PartialAssignment) -> f64 {
        (0..self.instance.m())
            .map(|i| self.members[i][j].iter().map(|&(u, v)| v * self.conditional(i, Some(u), j, partial)).sum::<f64>())
            .sum()
    }

    fn objective(&self, partial: &PartialAssignment) -> f64 {
        (0..self.n())
            .map(|q| {
                let e = match partial.worker_of(q) {
                    Some(i) => self.committed(i, q, partial),
                    None => self.uncommitted(q, partial),
                };
                self.instance.weight(q) * e
            })
            .sum()
    }

    /// Share of `q`'s term on worker `i` carried by group `u` (`None` when `q` is off `i`).
    fn q_group_mass(&self, i: usize, q: usize, u: usize, partial: &PartialAssignment) -> f64 {
        match partial.worker_of(q) {
            None => self.group_mass(i, q, u),
            Some(k) if k == i => {
                let yiq = self.y[i * self.n() + q];
                if yiq > 0.0 {
                    self.group_mass(i, q, u) / yiq
                } else {
                    0.0
                }
            }
            Some(_) => 0.0,
        }
    }

    fn q_mass(&self, i: usize, q: usize, partial: &PartialAssignment) -> f64 {
        match partial.worker_of(q) {
            None => self.y[i * self.n() + q],
            Some(k) if k == i => 1.0,
            Some(_) => 0.0,
        }
    }
}

/// `E[C_j | σ(j) = u]` for group `u` of `grouping` (Case 1 if `j` is uncommitted, Case 2 if it
/// is committed to the grouping's worker).
#[allow(clippy::too_many_arguments)]
pub fn expected_completion_grouped(
    solution: &FractionalSolution,
    instance: &Instance,
    groupings: &[Grouping],
    worker: usize,
    group: usize,
    task: usize,
    partial: &PartialAssignment,
    eta: f64,
) -> Result<f64> {
    let base = instance.contact_loads();
    let ctx = Context::new(solution, groupings, instance, &base, eta)?;
    partial.check(instance)?;
    if worker >= instance.m() || group >= groupings[worker].len() || task >= instance.n() {
        return Err(Error::InvalidArgument("worker, group or task index out of range".into()));
    }
    if let Some(k) = partial.worker_of(task) {
        if k != worker {
            return Err(Error::InvalidArgument(format!("task {task} is committed to worker {k}, not {worker}")));
        }
    }
    Ok(ctx.conditional(worker, Some(group), task, partial))
}

/// `E[Σ_q w_q C_q]` under the grouped expectations, by direct evaluation.
pub fn expected_objective_grouped(
    solution: &FractionalSolution,
    instance: &Instance,
    groupings: &[Grouping],
    partial: &PartialAssignment,
    eta: f64,
) -> Result<f64> {
    let base = instance.contact_loads();
    let ctx = Context::new(solution, groupings, instance, &base, eta)?;
    partial.check(instance)?;
    Ok(ctx.objective(partial))
}

/// Derandomized grouped rounding; tasks are committed in index order and sequenced by Smith's
/// rule.
pub fn dts(
    solution: &FractionalSolution,
    instance: &Instance,
    groupings: &[Grouping],
    eta: f64,
) -> Result<crate::model::Schedule> {
    dts_traced(solution, instance, groupings, eta, &instance.contact_loads()).map(|t| t.schedule)
}

/// [`dts`] with base loads, returning the potential after each commitment.
pub fn dts_traced(
    solution: &FractionalSolution,
    instance: &Instance,
    groupings: &[Grouping],
    eta: f64,
    base: &[f64],
) -> Result<EdtsTrace> {
    let ctx = Context::new(solution, groupings, instance, base, eta)?;
    let (m, n) = (instance.m(), instance.n());
    let mut partial = PartialAssignment::new(n);
    let mut pot = ctx.objective(&partial);
    let mut potentials = Vec::with_capacity(n + 1);
    potentials.push(pot);
    let mut choices = Vec::with_capacity(n);
    for j in 0..n {
        let w = instance.weight(j);
        // Terms of the potential that involve j before the commitment.
        let mut removed = w * ctx.uncommitted(j, &partial);
        for k in 0..m {
            let p = instance.p(k, j);
            if p == 0.0 {
                continue;
            }
            let ykj = ctx.y[k * n + j];
            let mut s = 0.0;
            for q in 0..n {
                if q == j || !higher_priority(instance, k, j, q) {
                    continue;
                }
                let mut term = ctx.q_mass(k, q, &partial) * ykj;
                if !ctx.dominated[k][j] && !ctx.dominated[k][q] {
                    for &(u, v) in &ctx.members[k][j] {
                        term -= ctx.eta * ctx.q_group_mass(k, q, u, &partial) * v;
                    }
                }
                s += instance.weight(q) * term;
            }
            removed += p * s;
        }
        // Same terms after committing j to each candidate worker.
        let mut best = 0;
        let mut best_score = f64::INFINITY;
        for i in 0..m {
            let mut trial = partial.clone();
            trial.assign(j, i)?;
            let own = w * ctx.committed(i, j, &trial);
            let p = instance.p(i, j);
            let tail: f64 = (0..n)
                .filter(|&q| q != j && higher_priority(instance, i, j, q))
                .map(|q| instance.weight(q) * ctx.q_mass(i, q, &trial))
                .sum();
            let score = own + p * tail;
            if score < best_score {
                best_score = score;
                best = i;
            }
        }
        pot += best_score - removed;
        potentials.push(pot);
        choices.push(best);
        partial.assign(j, best)?;
    }
    Ok(EdtsTrace { schedule: partial.into_schedule(instance)?, potentials, choices })
}
