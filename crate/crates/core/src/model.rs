//! Problem instances, schedules and exact evaluation of the weighted completion time.
//!
//! A task `j` placed on worker `i` completes at `2·φ_i` (the distribution meeting plus the
//! feedback meeting) plus the processing times of every task run on `i` up to and including `j`.
//! Workers and tasks are identified by their index in the instance; every tie-break in the crate
//! refers to these indices.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WorkerProfile {
    /// Expected inter-contact time with the requester.
    pub phi: f64,
}

impl WorkerProfile {
    /// Total contact time charged once per worker: distribution plus feedback meeting.
    pub fn total_contact(&self) -> f64 {
        2.0 * self.phi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskProfile {
    pub weight: f64,
}

/// A scheduling instance: `m` workers, `n` tasks and the `m × n` required-service-time matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    workers: Vec<WorkerProfile>,
    tasks: Vec<TaskProfile>,
    /// Row-major, `rst[i * n + j]`.
    rst: Vec<f64>,
}

impl Instance {
    /// Builds an instance from per-worker `phi`, per-task weights and RST rows (one row per worker).
    pub fn new(phi: Vec<f64>, weights: Vec<f64>, rst: Vec<Vec<f64>>) -> Result<Self> {
        let m = phi.len();
        let n = weights.len();
        if m == 0 {
            return Err(Error::InvalidInstance("at least one worker is required".into()));
        }
        if rst.len() != m {
            return Err(Error::InvalidInstance(format!(
                "rst has {} rows, expected {m}",
                rst.len()
            )));
        }
        for (i, &p) in phi.iter().enumerate() {
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidInstance(format!("phi[{i}] = {p} must be positive")));
            }
        }
        for (j, &w) in weights.iter().enumerate() {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::InvalidInstance(format!("weight[{j}] = {w} must be nonnegative")));
            }
        }
        let mut flat = Vec::with_capacity(m * n);
        for (i, row) in rst.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidInstance(format!(
                    "rst row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &p) in row.iter().enumerate() {
                if !(p >= 0.0 && p.is_finite()) {
                    return Err(Error::InvalidInstance(format!(
                        "rst[{i}][{j}] = {p} must be nonnegative"
                    )));
                }
            }
            flat.extend(row);
        }
        Ok(Instance {
            workers: phi.into_iter().map(|phi| WorkerProfile { phi }).collect(),
            tasks: weights.into_iter().map(|weight| TaskProfile { weight }).collect(),
            rst: flat,
        })
    }

    /// Identical-worker instance: every worker needs `p[j]` for task `j`.
    pub fn identical(phi: Vec<f64>, weights: Vec<f64>, p: Vec<f64>) -> Result<Self> {
        let rows = vec![p; phi.len()];
        Instance::new(phi, weights, rows)
    }

    pub fn m(&self) -> usize {
        self.workers.len()
    }

    pub fn n(&self) -> usize {
        self.tasks.len()
    }

    pub fn workers(&self) -> &[WorkerProfile] {
        &self.workers
    }

    pub fn tasks(&self) -> &[TaskProfile] {
        &self.tasks
    }

    #[inline]
    pub fn p(&self, worker: usize, task: usize) -> f64 {
        self.rst[worker * self.tasks.len() + task]
    }

    /// RST row of one worker.
    pub fn rst_row(&self, worker: usize) -> &[f64] {
        let n = self.tasks.len();
        &self.rst[worker * n..(worker + 1) * n]
    }

    #[inline]
    pub fn phi(&self, worker: usize) -> f64 {
        self.workers[worker].phi
    }

    /// `Φ_i = 2·φ_i`.
    #[inline]
    pub fn contact(&self, worker: usize) -> f64 {
        self.workers[worker].total_contact()
    }

    #[inline]
    pub fn weight(&self, task: usize) -> f64 {
        self.tasks[task].weight
    }

    /// Per-worker fixed overheads `Φ_i`, the default base load of every algorithm.
    pub fn contact_loads(&self) -> Vec<f64> {
        (0..self.m()).map(|i| self.contact(i)).collect()
    }

    /// True when every column of the RST matrix is constant across workers.
    pub fn is_identical(&self) -> bool {
        (1..self.m()).all(|i| self.rst_row(i) == self.rst_row(0))
    }

    /// Restriction to a subset of workers and tasks, re-indexed in the given order.
    pub fn subset(&self, workers: &[usize], tasks: &[usize]) -> Result<Instance> {
        let phi = workers.iter().map(|&i| self.phi(i)).collect();
        let weights = tasks.iter().map(|&j| self.weight(j)).collect();
        let rst = workers
            .iter()
            .map(|&i| tasks.iter().map(|&j| self.p(i, j)).collect())
            .collect();
        Instance::new(phi, weights, rst)
    }
}

/// Task-to-worker assignment together with a processing order on every worker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    assignment: Vec<usize>,
    order: Vec<Vec<usize>>,
}

impl Schedule {
    /// Builds a schedule from explicit per-worker sequences; every task in `0..n` must appear once.
    pub fn from_orders(n: usize, order: Vec<Vec<usize>>) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (i, seq) in order.iter().enumerate() {
            for &j in seq {
                if j >= n {
                    return Err(Error::InvalidSchedule(format!("task {j} out of range (n = {n})")));
                }
                if assignment[j] != usize::MAX {
                    return Err(Error::InvalidSchedule(format!("task {j} scheduled twice")));
                }
                assignment[j] = i;
            }
        }
        if let Some(j) = assignment.iter().position(|&i| i == usize::MAX) {
            return Err(Error::InvalidSchedule(format!("task {j} is not scheduled")));
        }
        Ok(Schedule { assignment, order })
    }

    /// Builds the schedule that runs each worker's tasks in Smith order.
    pub fn from_assignment(instance: &Instance, assignment: &[usize]) -> Result<Self> {
        let m = instance.m();
        if assignment.len() != instance.n() {
            return Err(Error::InvalidSchedule(format!(
                "assignment covers {} tasks, instance has {}",
                assignment.len(),
                instance.n()
            )));
        }
        let mut buckets = vec![Vec::new(); m];
        for (j, &i) in assignment.iter().enumerate() {
            if i >= m {
                return Err(Error::InvalidSchedule(format!(
                    "task {j} assigned to worker {i}, only {m} workers"
                )));
            }
            buckets[i].push(j);
        }
        let order = buckets
            .into_iter()
            .enumerate()
            .map(|(i, tasks)| smith_order(instance, i, &tasks))
            .collect();
        Ok(Schedule { assignment: assignment.to_vec(), order })
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn order(&self) -> &[Vec<usize>] {
        &self.order
    }

    pub fn worker_of(&self, task: usize) -> usize {
        self.assignment[task]
    }

    fn check(&self, instance: &Instance) -> Result<()> {
        if self.assignment.len() != instance.n() {
            return Err(Error::InvalidSchedule(format!(
                "schedule covers {} tasks, instance has {}",
                self.assignment.len(),
                instance.n()
            )));
        }
        if self.order.len() > instance.m() {
            if let Some((i, _)) =
                self.order.iter().enumerate().skip(instance.m()).find(|(_, s)| !s.is_empty())
            {
                return Err(Error::InvalidSchedule(format!(
                    "tasks assigned to worker {i}, only {} workers",
                    instance.m()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Completion time of every task.
    pub completion: Vec<f64>,
    /// `Σ_j w_j·C_j`.
    pub wct: f64,
}

/// Exact completion times: `C_j = 2·φ_i + Σ_{k up to and including j on i} p_ik`.
pub fn evaluate(instance: &Instance, schedule: &Schedule) -> Result<Evaluation> {
    evaluate_with_base(instance, schedule, &instance.contact_loads())
}

/// Like [`evaluate`], with `base[i]` in place of the contact overhead `2·φ_i`.
pub fn evaluate_with_base(instance: &Instance, schedule: &Schedule, base: &[f64]) -> Result<Evaluation> {
    schedule.check(instance)?;
    let mut completion = vec![0.0; instance.n()];
    let mut wct = 0.0;
    for (i, seq) in schedule.order.iter().enumerate() {
        let mut clock = base[i];
        for &j in seq {
            clock += instance.p(i, j);
            completion[j] = clock;
            wct += instance.weight(j) * clock;
        }
    }
    Ok(Evaluation { completion, wct })
}

/// Smith ratio of task `j` on worker `i`; zero processing time counts as an infinite ratio.
#[inline]
pub fn smith_ratio(instance: &Instance, worker: usize, task: usize) -> f64 {
    let p = instance.p(worker, task);
    if p == 0.0 {
        f64::INFINITY
    } else {
        instance.weight(task) / p
    }
}

/// Priority comparison on worker `i`: `Less` means `a` runs before `b`.
///
/// Larger Smith ratio first; equal ratios put the larger task index first.
#[inline]
pub fn priority_cmp(instance: &Instance, worker: usize, a: usize, b: usize) -> Ordering {
    let ra = smith_ratio(instance, worker, a);
    let rb = smith_ratio(instance, worker, b);
    match rb.partial_cmp(&ra).unwrap_or(Ordering::Equal) {
        Ordering::Equal => b.cmp(&a),
        other => other,
    }
}

/// `j_prime ⪯ j` on `worker`: `j_prime` has strictly higher priority than `j`.
pub fn higher_priority(instance: &Instance, worker: usize, j_prime: usize, j: usize) -> bool {
    priority_cmp(instance, worker, j_prime, j) == Ordering::Less
}

/// Sorts `tasks` into non-increasing Smith ratio order on `worker`.
pub fn smith_order(instance: &Instance, worker: usize, tasks: &[usize]) -> Vec<usize> {
    let mut seq = tasks.to_vec();
    seq.sort_by(|&a, &b| priority_cmp(instance, worker, a, b));
    seq
}

/// Position of every task in the worker's Smith order over all `n` tasks.
pub fn smith_ranks(instance: &Instance, worker: usize) -> Vec<usize> {
    let all: Vec<usize> = (0..instance.n()).collect();
    let seq = smith_order(instance, worker, &all);
    let mut rank = vec![0; instance.n()];
    for (r, j) in seq.into_iter().enumerate() {
        rank[j] = r;
    }
    rank
}

/// Weighted completion time ratio against a lower bound.
pub fn wctr(wct: f64, lower_bound: f64) -> Result<f64> {
    if !(lower_bound > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "lower bound must be positive, got {lower_bound}"
        )));
    }
    Ok(wct / lower_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn lrf_example() -> Instance {
        Instance::identical(vec![1.0, 2.0], vec![4.0, 1.0, 1.0], vec![4.0, 2.0, 3.0]).unwrap()
    }

    #[test]
    fn single_task_completion() {
        let inst = Instance::new(vec![1.0], vec![3.0], vec![vec![2.0]]).unwrap();
        let s = Schedule::from_orders(1, vec![vec![0]]).unwrap();
        let ev = evaluate(&inst, &s).unwrap();
        assert_eq!(ev.completion, vec![4.0]);
        assert_eq!(ev.wct, 12.0);
    }

    #[test]
    fn empty_task_set() {
        let inst = Instance::new(vec![1.0, 3.0], vec![], vec![vec![], vec![]]).unwrap();
        let s = Schedule::from_orders(0, vec![vec![], vec![]]).unwrap();
        assert_eq!(evaluate(&inst, &s).unwrap().wct, 0.0);
    }

    #[test]
    fn lrf_example_replay() {
        // Worker 0: tasks 0 then 2 -> C = 2+4 = 6, 6+3 = 9. Worker 1: task 1 -> C = 4+2 = 6.
        let inst = lrf_example();
        let s = Schedule::from_orders(3, vec![vec![0, 2], vec![1]]).unwrap();
        let ev = evaluate(&inst, &s).unwrap();
        assert_eq!(ev.completion, vec![6.0, 6.0, 9.0]);
        assert_eq!(ev.wct, 4.0 * 6.0 + 6.0 + 9.0);
        assert_eq!(ev.wct, 39.0);
    }

    #[test]
    fn last_task_completes_at_expected_workload() {
        let inst = lrf_example();
        let s = Schedule::from_orders(3, vec![vec![0, 2], vec![1]]).unwrap();
        let ev = evaluate(&inst, &s).unwrap();
        let ew0 = inst.contact(0) + inst.p(0, 0) + inst.p(0, 2);
        assert_eq!(ev.completion[2], ew0);
    }

    #[test]
    fn out_of_range_worker_is_structural_error() {
        let inst = lrf_example();
        let s = Schedule::from_orders(3, vec![vec![0], vec![1], vec![2]]).unwrap();
        assert!(matches!(evaluate(&inst, &s), Err(Error::InvalidSchedule(_))));
        assert!(Schedule::from_assignment(&inst, &[0, 5, 1]).is_err());
    }

    #[test]
    fn malformed_schedules_rejected() {
        assert!(Schedule::from_orders(2, vec![vec![0, 0], vec![1]]).is_err());
        assert!(Schedule::from_orders(2, vec![vec![0]]).is_err());
        assert!(Schedule::from_orders(2, vec![vec![0, 2]]).is_err());
    }

    #[test]
    fn instance_validation() {
        assert!(Instance::new(vec![], vec![], vec![]).is_err());
        assert!(Instance::new(vec![0.0], vec![1.0], vec![vec![1.0]]).is_err());
        assert!(Instance::new(vec![1.0], vec![-1.0], vec![vec![1.0]]).is_err());
        assert!(Instance::new(vec![1.0], vec![1.0], vec![vec![-1.0]]).is_err());
        assert!(Instance::new(vec![1.0], vec![1.0], vec![vec![1.0, 2.0]]).is_err());
        assert!(Instance::new(vec![1.0, 1.0], vec![1.0], vec![vec![1.0]]).is_err());
    }

    #[test]
    fn priority_examples() {
        // (w, p): j' = (2, 1), j = (1, 1)
        let inst = Instance::new(vec![1.0], vec![2.0, 1.0], vec![vec![1.0, 1.0]]).unwrap();
        assert!(higher_priority(&inst, 0, 0, 1));
        assert!(!higher_priority(&inst, 0, 1, 0));
        // (w, p): j' = (1, 2), j = (1, 1)
        let inst = Instance::new(vec![1.0], vec![1.0, 1.0], vec![vec![2.0, 1.0]]).unwrap();
        assert!(!higher_priority(&inst, 0, 0, 1));
        // equal ratios: larger index wins
        let inst = Instance::new(vec![1.0], vec![1.0; 6], vec![vec![2.0; 6]]).unwrap();
        assert!(higher_priority(&inst, 0, 5, 3));
        assert!(!higher_priority(&inst, 0, 3, 5));
    }

    #[test]
    fn zero_processing_time_is_top_priority() {
        let inst = Instance::new(vec![1.0], vec![1.0, 100.0, 0.0], vec![vec![0.0, 1.0, 0.0]]).unwrap();
        assert!(higher_priority(&inst, 0, 0, 1));
        assert!(higher_priority(&inst, 0, 2, 0));
        assert_eq!(smith_order(&inst, 0, &[0, 1, 2]), vec![2, 0, 1]);
    }

    #[test]
    fn smith_order_examples() {
        // ratios 3, 1, 2
        let inst = Instance::new(vec![1.0], vec![3.0, 1.0, 2.0], vec![vec![1.0; 3]]).unwrap();
        assert_eq!(smith_order(&inst, 0, &[0, 1, 2]), vec![0, 2, 1]);
        let inst = Instance::new(vec![1.0], vec![1.0; 4], vec![vec![1.0; 4]]).unwrap();
        assert_eq!(smith_order(&inst, 0, &[0, 1, 2, 3]), vec![3, 2, 1, 0]);
        assert_eq!(smith_order(&inst, 0, &[2]), vec![2]);
    }

    #[test]
    fn wctr_examples() {
        assert_eq!(wctr(30.0, 20.0).unwrap(), 1.5);
        assert_eq!(wctr(7.25, 7.25).unwrap(), 1.0);
        assert!(wctr(1.0, 0.0).is_err());
        assert!(wctr(1.0, -2.0).is_err());
    }
}
