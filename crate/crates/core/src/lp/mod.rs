//! LP relaxations of the assignment problem and their solution.
//!
//! Two models share one variable layout, `x[i, j, l]`: task `j` runs on worker `i` starting in
//! slot `l`.
//!
//! * [`build_time_indexed`] uses unit slots `s = 0..T` and unit capacity per time step.
//! * [`build_interval_indexed`] uses geometric time points `0, 1, (1+ε), (1+ε)², …` and charges
//!   each interval the processing it hosts.
//!
//! Both are solved by the embedded revised simplex in [`solve`], which also reports a dual
//! certificate. [`lower_bound`] is the interval-LP optimum used as the WCTR denominator.

mod format;
mod simplex;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{Instance, Schedule};

pub use format::{export_model, parse_model, ParsedModel};
pub use simplex::{Sense, SolverOptions};

/// Time-point layout of the interval LP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum IntervalForm {
    /// Per-interval capacity `Σ_j p_ij x_ijl ≤ t_{l+1} − t_l`, cost `w_j (Φ_i + t_l + p_ij)`.
    #[default]
    Standard,
    /// Cumulative capacity `Σ_{l' ≤ l} Σ_j p_ij x_ijl' ≤ t_{l+1}`, cost `w_j (Φ_i + max(t_l, p_ij))`.
    /// Every schedule maps to a feasible point of no larger cost, so this is always a valid
    /// lower bound.
    Completion,
}

/// What a slot index means.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SlotGeometry {
    /// Unit slots `[s, s + 1)` for `s = 0..horizon`.
    Unit { horizon: usize },
    /// Intervals `(t_l, t_{l+1}]` of the interval LP.
    Interval { epsilon: f64, form: IntervalForm },
    /// One slot per task, starting where the task starts in a given schedule.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RowKind {
    Assignment { task: usize },
    Capacity { worker: usize, slot: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VarKey {
    pub worker: usize,
    pub task: usize,
    pub slot: usize,
}

/// A built LP: minimize `cost · x` subject to the rows, `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    m: usize,
    n: usize,
    geometry: SlotGeometry,
    slot_starts: Vec<f64>,
    vars: Vec<VarKey>,
    cost: Vec<f64>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
    rows: Vec<RowKind>,
    sense: Vec<Sense>,
    rhs: Vec<f64>,
    forbidden: usize,
}

impl LpModel {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn geometry(&self) -> &SlotGeometry {
        &self.geometry
    }

    /// Start time of every slot (`s` for unit slots, `t_l` for intervals).
    pub fn slot_starts(&self) -> &[f64] {
        &self.slot_starts
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn vars(&self) -> &[VarKey] {
        &self.vars
    }

    pub fn cost(&self) -> &[f64] {
        &self.cost
    }

    pub fn rows(&self) -> &[RowKind] {
        &self.rows
    }

    pub fn sense(&self) -> &[Sense] {
        &self.sense
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// Number of `(i, j, l)` triples excluded from the model.
    pub fn forbidden_count(&self) -> usize {
        self.forbidden
    }

    /// Nonzeros `(row, coefficient)` of column `var`.
    pub fn column(&self, var: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.col_ptr[var]..self.col_ptr[var + 1];
        self.row_idx[range.clone()].iter().copied().zip(self.values[range].iter().copied())
    }

    /// Row activities `A x`.
    pub fn activity(&self, x: &[f64]) -> Vec<f64> {
        let mut ax = vec![0.0; self.rows.len()];
        for (v, &xv) in x.iter().enumerate() {
            if xv != 0.0 {
                for (r, a) in self.column(v) {
                    ax[r] += a * xv;
                }
            }
        }
        ax
    }

    /// Largest bound or row violation of `x`.
    pub fn primal_residual(&self, x: &[f64]) -> f64 {
        let ax = self.activity(x);
        let mut worst = x.iter().fold(0.0f64, |w, &v| w.max(-v));
        for r in 0..self.rows.len() {
            let d = ax[r] - self.rhs[r];
            worst = worst.max(match self.sense[r] {
                Sense::Eq => d.abs(),
                Sense::Le => d,
            });
        }
        worst
    }

    pub fn objective_of(&self, x: &[f64]) -> f64 {
        self.cost.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

struct Builder {
    vars: Vec<VarKey>,
    cost: Vec<f64>,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
    forbidden: usize,
}

impl Builder {
    fn new() -> Self {
        Builder { vars: Vec::new(), cost: Vec::new(), col_ptr: vec![0], row_idx: Vec::new(), values: Vec::new(), forbidden: 0 }
    }

    fn push(&mut self, key: VarKey, cost: f64, entries: impl IntoIterator<Item = (usize, f64)>) {
        for (r, a) in entries {
            if a != 0.0 {
                self.row_idx.push(r);
                self.values.push(a);
            }
        }
        self.vars.push(key);
        self.cost.push(cost);
        self.col_ptr.push(self.row_idx.len());
    }

    /// Drops capacity rows without entries and renumbers the rest.
    fn finish(
        mut self,
        m: usize,
        n: usize,
        geometry: SlotGeometry,
        slot_starts: Vec<f64>,
        capacity: Vec<((usize, usize), f64)>,
    ) -> LpModel {
        let total_rows = n + capacity.len();
        let mut used = vec![false; total_rows];
        used[..n].iter_mut().for_each(|u| *u = true);
        for &r in &self.row_idx {
            used[r] = true;
        }
        let mut remap = vec![usize::MAX; total_rows];
        let mut rows = Vec::new();
        let mut sense = Vec::new();
        let mut rhs = Vec::new();
        for task in 0..n {
            remap[task] = rows.len();
            rows.push(RowKind::Assignment { task });
            sense.push(Sense::Eq);
            rhs.push(1.0);
        }
        for (k, &((worker, slot), cap)) in capacity.iter().enumerate() {
            if used[n + k] {
                remap[n + k] = rows.len();
                rows.push(RowKind::Capacity { worker, slot });
                sense.push(Sense::Le);
                rhs.push(cap);
            }
        }
        for r in &mut self.row_idx {
            *r = remap[*r];
        }
        LpModel {
            m,
            n,
            geometry,
            slot_starts,
            vars: self.vars,
            cost: self.cost,
            col_ptr: self.col_ptr,
            row_idx: self.row_idx,
            values: self.values,
            rows,
            sense,
            rhs,
            forbidden: self.forbidden,
        }
    }
}

fn check_base(instance: &Instance, base: &[f64]) -> Result<()> {
    if base.len() != instance.m() {
        return Err(Error::InvalidArgument(format!(
            "base load has {} entries, instance has {} workers",
            base.len(),
            instance.m()
        )));
    }
    Ok(())
}

/// Time-indexed LP over unit slots `0..horizon`.
pub fn build_time_indexed(instance: &Instance, horizon: usize) -> Result<LpModel> {
    build_time_indexed_with_base(instance, horizon, &instance.contact_loads())
}

/// [`build_time_indexed`] with `base[i]` replacing worker `i`'s contact overhead in the costs.
pub fn build_time_indexed_with_base(instance: &Instance, horizon: usize, base: &[f64]) -> Result<LpModel> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("time horizon must be positive".into()));
    }
    check_base(instance, base)?;
    let (m, n) = (instance.m(), instance.n());
    let t = horizon;
    let cap_row = |i: usize, step: usize| n + i * t + (step - 1);
    let mut b = Builder::new();
    for j in 0..n {
        for i in 0..m {
            let p = instance.p(i, j);
            for s in 0..t {
                if s as f64 + p > t as f64 {
                    b.forbidden += 1;
                    continue;
                }
                let last = libm::floor(s as f64 + p) as usize;
                let entries = core::iter::once((j, 1.0))
                    .chain((s + 1..=last.min(t)).map(|step| (cap_row(i, step), 1.0)));
                b.push(VarKey { worker: i, task: j, slot: s }, instance.weight(j) * (base[i] + s as f64 + p), entries);
            }
        }
    }
    let capacity = (0..m).flat_map(|i| (0..t).map(move |s| ((i, s), 1.0))).collect();
    let starts = (0..t).map(|s| s as f64).collect();
    Ok(b.finish(m, n, SlotGeometry::Unit { horizon }, starts, capacity))
}

/// Number of geometric points `L = ⌈log_{1+ε} total⌉`, zero when `total ≤ 1`.
pub fn interval_count(total: f64, epsilon: f64) -> usize {
    let mut l = 0;
    let mut v = 1.0;
    while v < total {
        v *= 1.0 + epsilon;
        l += 1;
    }
    l
}

/// Time points `t_0 = 0, t_l = (1+ε)^{l−1}` up to `t_{L+1} = (1+ε)^L`, extended geometrically
/// until the last interval alone holds `total` units of work.
pub fn interval_points(total: f64, epsilon: f64) -> Vec<f64> {
    let l = interval_count(total, epsilon);
    let mut t = Vec::with_capacity(l + 3);
    t.push(0.0);
    let mut v = 1.0;
    t.push(v);
    for _ in 0..l {
        v *= 1.0 + epsilon;
        t.push(v);
    }
    while t[t.len() - 1] - t[t.len() - 2] < total {
        v *= 1.0 + epsilon;
        t.push(v);
    }
    t
}

/// Interval-indexed LP with geometric intervals of ratio `1 + epsilon`.
pub fn build_interval_indexed(instance: &Instance, epsilon: f64) -> Result<LpModel> {
    build_interval_indexed_with(instance, epsilon, IntervalForm::Standard, &instance.contact_loads())
}

/// [`build_interval_indexed`] with an explicit form and per-worker base loads.
pub fn build_interval_indexed_with(
    instance: &Instance,
    epsilon: f64,
    form: IntervalForm,
    base: &[f64],
) -> Result<LpModel> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    check_base(instance, base)?;
    let (m, n) = (instance.m(), instance.n());
    let total: f64 = (0..n).map(|j| (0..m).map(|i| instance.p(i, j)).fold(0.0, f64::max)).sum();
    let t = interval_points(total, epsilon);
    let slots = t.len() - 1;
    let cap_row = |i: usize, l: usize| n + i * slots + l;
    let mut b = Builder::new();
    for j in 0..n {
        let w = instance.weight(j);
        for i in 0..m {
            let p = instance.p(i, j);
            for l in 0..slots {
                if p > t[l + 1] {
                    b.forbidden += 1;
                    continue;
                }
                let key = VarKey { worker: i, task: j, slot: l };
                let assign = core::iter::once((j, 1.0));
                match form {
                    IntervalForm::Standard => {
                        b.push(key, w * (base[i] + t[l] + p), assign.chain(core::iter::once((cap_row(i, l), p))));
                    }
                    IntervalForm::Completion => {
                        let cum = (l..slots).map(|k| (cap_row(i, k), p));
                        b.push(key, w * (base[i] + t[l].max(p)), assign.chain(cum));
                    }
                }
            }
        }
    }
    let capacity = (0..m)
        .flat_map(|i| {
            let t = &t;
            (0..slots).map(move |l| {
                let cap = match form {
                    IntervalForm::Standard => t[l + 1] - t[l],
                    IntervalForm::Completion => t[l + 1],
                };
                ((i, l), cap)
            })
        })
        .collect();
    let starts = t[..slots].to_vec();
    Ok(b.finish(m, n, SlotGeometry::Interval { epsilon, form }, starts, capacity))
}

/// One nonzero LP variable viewed as a rectangle of height `value` starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rectangle {
    pub worker: usize,
    pub task: usize,
    pub slot: usize,
    pub start: f64,
    pub value: f64,
}

/// Optimality evidence attached to a solved LP. Dual and complementarity residuals are relative
/// to the largest cost coefficient and the objective magnitude respectively.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Certificate {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_infeasibility: f64,
    pub complementarity: f64,
}

impl Certificate {
    pub fn within(&self, tol: f64) -> bool {
        self.primal_residual <= tol && self.dual_infeasibility <= tol && self.complementarity <= tol
    }
}

/// Values below this are treated as zero when extracting rectangles.
const MASS_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FractionalSolution {
    m: usize,
    n: usize,
    slot_starts: Vec<f64>,
    /// Sorted by task, then worker, then slot.
    rects: Vec<Rectangle>,
    task_ptr: Vec<usize>,
    marginals: Vec<f64>,
    objective: f64,
    certificate: Option<Certificate>,
}

impl FractionalSolution {
    /// Builds a solution from explicit rectangles; `start` of each rectangle is taken from
    /// `slot_starts[slot]`.
    pub fn from_rectangles(
        m: usize,
        n: usize,
        slot_starts: Vec<f64>,
        rects: impl IntoIterator<Item = (usize, usize, usize, f64)>,
        objective: f64,
    ) -> Result<Self> {
        let mut out = Vec::new();
        for (worker, task, slot, value) in rects {
            if worker >= m || task >= n || slot >= slot_starts.len() {
                return Err(Error::InvalidArgument(format!(
                    "rectangle ({worker}, {task}, {slot}) outside {m} workers, {n} tasks, {} slots",
                    slot_starts.len()
                )));
            }
            if !(value.is_finite() && value >= 0.0) {
                return Err(Error::InvalidArgument(format!("rectangle value {value} is not a nonnegative number")));
            }
            if value > MASS_EPS {
                out.push(Rectangle { worker, task, slot, start: slot_starts[slot], value });
            }
        }
        out.sort_by(|a, b| (a.task, a.worker, a.slot).cmp(&(b.task, b.worker, b.slot)));
        out.dedup_by(|b, a| {
            if (a.task, a.worker, a.slot) == (b.task, b.worker, b.slot) {
                a.value += b.value;
                true
            } else {
                false
            }
        });
        let mut task_ptr = vec![0; n + 1];
        let mut marginals = vec![0.0; m * n];
        for r in &out {
            task_ptr[r.task + 1] += 1;
            marginals[r.worker * n + r.task] += r.value;
        }
        for j in 0..n {
            task_ptr[j + 1] += task_ptr[j];
        }
        Ok(FractionalSolution { m, n, slot_starts, rects: out, task_ptr, marginals, objective, certificate: None })
    }

    /// The integral solution of a schedule: each task is one full rectangle starting where the
    /// task starts (after the worker's contact overhead). Its objective equals the schedule's WCT.
    pub fn from_schedule(instance: &Instance, schedule: &Schedule) -> Result<Self> {
        let eval = crate::model::evaluate(instance, schedule)?;
        let n = instance.n();
        let mut starts = vec![0.0; n];
        for (i, seq) in schedule.order().iter().enumerate() {
            let mut clock = 0.0;
            for &j in seq {
                starts[j] = clock;
                clock += instance.p(i, j);
            }
        }
        let rects = (0..n).map(|j| (schedule.worker_of(j), j, j, 1.0));
        Self::from_rectangles(instance.m(), n, starts, rects, eval.wct)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn slot_starts(&self) -> &[f64] {
        &self.slot_starts
    }

    pub fn rectangles(&self) -> &[Rectangle] {
        &self.rects
    }

    pub fn task_rectangles(&self, task: usize) -> &[Rectangle] {
        &self.rects[self.task_ptr[task]..self.task_ptr[task + 1]]
    }

    /// `y_ij = Σ_l x_ijl`.
    pub fn y(&self, worker: usize, task: usize) -> f64 {
        self.marginals[worker * self.n + task]
    }

    /// Row-major `m × n` marginals.
    pub fn marginals(&self) -> &[f64] {
        &self.marginals
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    /// Largest deviation of a task's total mass from 1.
    pub fn assignment_residual(&self) -> f64 {
        (0..self.n)
            .map(|j| {
                let s: f64 = self.task_rectangles(j).iter().map(|r| r.value).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Solves `model` with the embedded simplex.
pub fn solve(model: &LpModel, opts: &SolverOptions) -> Result<FractionalSolution> {
    let form = simplex::StandardForm {
        cost: &model.cost,
        col_ptr: &model.col_ptr,
        row_idx: &model.row_idx,
        values: &model.values,
        sense: &model.sense,
        rhs: &model.rhs,
    };
    match simplex::solve_standard(&form, *opts)? {
        simplex::RawOutcome::Optimal(raw) => {
            let certificate = certify(model, &raw.x, &raw.duals, raw.iterations);
            let mut sol = to_solution(model, &raw.x)?;
            sol.certificate = Some(certificate);
            Ok(sol)
        }
        simplex::RawOutcome::IterationLimit { iterations, feasible } => {
            let incumbent = match feasible {
                Some(x) => Some(alloc::boxed::Box::new(to_solution(model, &x)?)),
                None => None,
            };
            Err(Error::IterationLimit { iterations, incumbent })
        }
    }
}

fn to_solution(model: &LpModel, x: &[f64]) -> Result<FractionalSolution> {
    let rects = model.vars.iter().zip(x).map(|(k, &v)| (k.worker, k.task, k.slot, v));
    FractionalSolution::from_rectangles(model.m, model.n, model.slot_starts.clone(), rects, model.objective_of(x))
}

fn certify(model: &LpModel, x: &[f64], duals: &[f64], iterations: usize) -> Certificate {
    let cmax = model.cost.iter().fold(1.0f64, |a, &c| a.max(c.abs()));
    let objective = model.objective_of(x);
    let ax = model.activity(x);
    let mut dual_inf = 0.0f64;
    let mut comp = 0.0f64;
    for (v, &xv) in x.iter().enumerate() {
        let d = model.cost[v] - model.column(v).map(|(r, a)| duals[r] * a).sum::<f64>();
        dual_inf = dual_inf.max(-d / cmax);
        comp += xv.abs() * d.abs();
    }
    for r in 0..model.rows.len() {
        if model.sense[r] == Sense::Le {
            dual_inf = dual_inf.max(duals[r] / cmax);
            comp += duals[r].abs() * (model.rhs[r] - ax[r]).max(0.0);
        }
    }
    Certificate {
        iterations,
        primal_residual: model.primal_residual(x),
        dual_infeasibility: dual_inf.max(0.0),
        complementarity: comp / objective.abs().max(1.0),
    }
}

/// Interval-LP optimum with `epsilon`; the WCTR denominator.
pub fn lower_bound(instance: &Instance, epsilon: f64) -> Result<f64> {
    lower_bound_with(instance, epsilon, IntervalForm::Standard, &SolverOptions::default())
}

pub fn lower_bound_with(instance: &Instance, epsilon: f64, form: IntervalForm, opts: &SolverOptions) -> Result<f64> {
    if !instance.tasks().iter().any(|t| t.weight > 0.0) {
        return Err(Error::InvalidArgument("lower bound needs a task with positive weight".into()));
    }
    let model = build_interval_indexed_with(instance, epsilon, form, &instance.contact_loads())?;
    Ok(solve(&model, opts)?.objective())
}

/// Human-readable name of a row, used by the LP text format.
pub(crate) fn row_name(kind: &RowKind) -> String {
    match *kind {
        RowKind::Assignment { task } => format!("assign_{task}"),
        RowKind::Capacity { worker, slot } => format!("cap_{worker}_{slot}"),
    }
}

pub(crate) fn var_name(key: &VarKey) -> String {
    format!("x_{}_{}_{}", key.worker, key.task, key.slot)
}

#[cfg(test)]
mod tests;
