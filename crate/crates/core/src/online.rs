//! Online re-planning over requester–worker meetings.
//!
//! [`simulate_meetings`] draws exponential inter-meeting gaps per worker. [`cosmos`] walks a trace:
//! when the requester meets a still-active worker `i` at time `t`, every remaining task is
//! re-planned by an offline algorithm over the active workers with expected workloads
//! `φ_i` for `i` and `2φ_k − t` for the others, and only `i`'s share is committed. Committed tasks
//! start at `t`; each one completes at the first later meeting with `i` after its processing ends.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::lp::{build_interval_indexed_with, solve, IntervalForm, SolverOptions};
use crate::lrf::{lrf_identical_with_base, lrf_variant_with_base, LrfVariant};
use crate::model::{evaluate_with_base, smith_order, Instance, Schedule};
use crate::oracle::brute_force_opt_with_base;
use crate::rounding::edts_with_base;

/// Time-ordered `(time, worker)` meetings, observed up to `end`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MeetingTrace {
    events: Vec<(f64, usize)>,
    end: f64,
}

impl MeetingTrace {
    /// Validates ordering and worker indices; `end` defaults to the last event time.
    pub fn new(events: Vec<(f64, usize)>, m: usize, end: Option<f64>) -> Result<Self> {
        let mut prev = 0.0;
        for (k, &(t, i)) in events.iter().enumerate() {
            if !(t.is_finite() && t >= prev) {
                return Err(Error::InvalidArgument(format!("meeting {k} at {t} is out of order")));
            }
            if i >= m {
                return Err(Error::InvalidArgument(format!("meeting {k} names worker {i}, only {m} exist")));
            }
            prev = t;
        }
        let end = end.unwrap_or(prev);
        if end < prev {
            return Err(Error::InvalidArgument(format!("trace end {end} precedes its last meeting {prev}")));
        }
        Ok(MeetingTrace { events, end })
    }

    pub fn events(&self) -> &[(f64, usize)] {
        &self.events
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Meeting times of each of `m` workers.
    pub fn per_worker(&self, m: usize) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); m];
        for &(t, i) in &self.events {
            out[i].push(t);
        }
        out
    }
}

/// Exponential inter-meeting gaps with mean `φ_i`; worker `i` draws from stream `i`.
pub fn simulate_meetings(instance: &Instance, seed: u64, horizon: f64) -> Result<MeetingTrace> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    let mut events = Vec::new();
    for i in 0..instance.m() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let exp = Exp::new(1.0 / instance.phi(i)).map_err(|e| Error::InvalidArgument(format!("{e}")))?;
        let mut t = 0.0;
        loop {
            t += exp.sample(&mut rng);
            if t > horizon {
                break;
            }
            events.push((t, i));
        }
    }
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    MeetingTrace::new(events, instance.m(), Some(horizon))
}

/// Offline algorithm used at every re-planning step. `base[i]` is worker `i`'s current expected
/// workload before any of the planned tasks.
pub trait OfflinePlanner {
    fn name(&self) -> String;
    fn plan(&self, instance: &Instance, base: &[f64]) -> Result<Schedule>;
}

/// Identical-worker LRF.
#[derive(Debug, Clone, Copy, Default)]
pub struct LrfIdenticalPlanner;

impl OfflinePlanner for LrfIdenticalPlanner {
    fn name(&self) -> String {
        "LRF".into()
    }

    fn plan(&self, instance: &Instance, base: &[f64]) -> Result<Schedule> {
        lrf_identical_with_base(instance, base)
    }
}

/// Unrelated-worker LRF with a proxy processing time.
#[derive(Debug, Clone, Copy)]
pub struct LrfPlanner(pub LrfVariant);

impl OfflinePlanner for LrfPlanner {
    fn name(&self) -> String {
        self.0.name().into()
    }

    fn plan(&self, instance: &Instance, base: &[f64]) -> Result<Schedule> {
        lrf_variant_with_base(instance, self.0, base)
    }
}

/// Interval LP followed by derandomized rounding.
#[derive(Debug, Clone, Copy)]
pub struct EdtsPlanner {
    pub epsilon: f64,
    pub form: IntervalForm,
    pub solver: SolverOptions,
}

impl Default for EdtsPlanner {
    fn default() -> Self {
        EdtsPlanner { epsilon: 3.0, form: IntervalForm::Standard, solver: SolverOptions::default() }
    }
}

impl OfflinePlanner for EdtsPlanner {
    fn name(&self) -> String {
        "EDTS".into()
    }

    fn plan(&self, instance: &Instance, base: &[f64]) -> Result<Schedule> {
        let model = build_interval_indexed_with(instance, self.epsilon, self.form, base)?;
        let sol = solve(&model, &self.solver)?;
        edts_with_base(&sol, instance, base)
    }
}

/// Exact optimum by enumeration; tiny instances only.
#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForcePlanner;

impl OfflinePlanner for BruteForcePlanner {
    fn name(&self) -> String {
        "OPT".into()
    }

    fn plan(&self, instance: &Instance, base: &[f64]) -> Result<Schedule> {
        brute_force_opt_with_base(instance, false, base).map(|(s, _)| s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CosmosOptions {
    /// Keep the inherited plan when it is cheaper than the fresh one under the current loads.
    pub guard: bool,
}

impl Default for CosmosOptions {
    fn default() -> Self {
        CosmosOptions { guard: true }
    }
}

/// One decision step of [`cosmos`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StepRecord {
    pub time: f64,
    pub worker: usize,
    /// Tasks still unassigned when the step began.
    pub remaining: usize,
    /// Expected WCT of the fresh plan over the remaining tasks, under the current loads.
    pub plan_value: f64,
    /// Expected WCT of the previous plan restricted to the same tasks and loads.
    pub inherited_value: Option<f64>,
    pub kept_inherited: bool,
    pub committed: Vec<usize>,
}

impl StepRecord {
    /// Value of the plan actually followed at this step.
    pub fn chosen_value(&self) -> f64 {
        match (self.kept_inherited, self.inherited_value) {
            (true, Some(v)) => v,
            _ => self.plan_value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum OnlineStatus {
    Complete,
    /// The trace ended with tasks still unassigned.
    Unfinished,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OnlineResult {
    pub status: OnlineStatus,
    /// Per-worker committed sequences.
    pub order: Vec<Vec<usize>>,
    /// Realized completion time of each committed task.
    pub completion: Vec<Option<f64>>,
    /// `Σ w_j C_j` over committed tasks.
    pub realized_wct: f64,
    pub unfinished: Vec<usize>,
    /// Tasks whose feedback meeting was past the trace end and got `end + φ_i` instead.
    pub extrapolated: Vec<usize>,
    pub steps: Vec<StepRecord>,
}

impl OnlineResult {
    /// The committed schedule, if every task was assigned.
    pub fn schedule(&self) -> Option<Schedule> {
        match self.status {
            OnlineStatus::Complete => Schedule::from_orders(self.completion.len(), self.order.clone()).ok(),
            OnlineStatus::Unfinished => None,
        }
    }

    /// Steps where the followed plan is worse than the inherited one by more than `tol`
    /// (relative).
    pub fn monotonicity_violations(&self, tol: f64) -> usize {
        self.steps
            .iter()
            .filter(|s| s.inherited_value.is_some_and(|v| s.chosen_value() > v + tol * v.abs().max(1.0)))
            .count()
    }
}

/// First meeting of a worker at or after `finish`, else the trace end plus `φ`.
fn feedback_time(meetings: &[f64], finish: f64, end: f64, phi: f64) -> (f64, bool) {
    let k = meetings.partition_point(|&t| t < finish);
    match meetings.get(k) {
        Some(&t) => (t, false),
        None => (end + phi, true),
    }
}

/// Runs the online loop; see the module documentation.
pub fn cosmos(
    instance: &Instance,
    trace: &MeetingTrace,
    planner: &dyn OfflinePlanner,
    options: CosmosOptions,
) -> Result<OnlineResult> {
    let (m, n) = (instance.m(), instance.n());
    if trace.events.iter().any(|&(_, i)| i >= m) {
        return Err(Error::InvalidArgument("trace names a worker outside the instance".into()));
    }
    let meetings = trace.per_worker(m);
    let mut active = vec![true; m];
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut order = vec![Vec::new(); m];
    let mut completion = vec![None; n];
    let mut realized_wct = 0.0;
    let mut extrapolated = Vec::new();
    let mut steps = Vec::new();
    // Worker of every remaining task under the plan followed at the previous step.
    let mut previous: Option<Vec<usize>> = None;

    for &(t, i) in &trace.events {
        if remaining.is_empty() {
            break;
        }
        if !active[i] {
            continue;
        }
        let workers: Vec<usize> = (0..m).filter(|&k| active[k]).collect();
        let base: Vec<f64> =
            workers.iter().map(|&k| if k == i { instance.phi(k) } else { instance.contact(k) - t }).collect();
        let sub = instance.subset(&workers, &remaining)?;
        let fresh = planner.plan(&sub, &base)?;
        let plan_value = evaluate_with_base(&sub, &fresh, &base)?.wct;

        let inherited = match &previous {
            Some(global) => {
                let local: Option<Vec<usize>> = remaining
                    .iter()
                    .map(|&j| workers.iter().position(|&k| k == global[j]))
                    .collect();
                match local {
                    Some(assign) => {
                        let s = Schedule::from_assignment(&sub, &assign)?;
                        let v = evaluate_with_base(&sub, &s, &base)?.wct;
                        Some((s, v))
                    }
                    None => None,
                }
            }
            None => None,
        };
        let inherited_value = inherited.as_ref().map(|(_, v)| *v);
        let keep = options.guard && inherited_value.is_some_and(|v| v < plan_value);
        let chosen = match (keep, inherited) {
            (true, Some((s, _))) => s,
            _ => fresh,
        };

        let me = workers.iter().position(|&k| k == i).expect("met worker is active");
        let mine: Vec<usize> = chosen.order()[me].iter().map(|&lj| remaining[lj]).collect();
        let seq = smith_order(instance, i, &mine);
        let mut clock = t;
        for &j in &seq {
            clock += instance.p(i, j);
            let (c, late) = feedback_time(&meetings[i], clock, trace.end, instance.phi(i));
            if late {
                extrapolated.push(j);
            }
            completion[j] = Some(c);
            realized_wct += instance.weight(j) * c;
        }

        let mut global = vec![usize::MAX; n];
        for (lj, &j) in remaining.iter().enumerate() {
            global[j] = workers[chosen.worker_of(lj)];
        }
        steps.push(StepRecord {
            time: t,
            worker: i,
            remaining: remaining.len(),
            plan_value,
            inherited_value,
            kept_inherited: keep,
            committed: seq.clone(),
        });
        order[i] = seq;
        active[i] = false;
        remaining.retain(|&j| global[j] != i);
        previous = Some(global);
    }

    let status = if remaining.is_empty() { OnlineStatus::Complete } else { OnlineStatus::Unfinished };
    Ok(OnlineResult { status, order, completion, realized_wct, unfinished: remaining, extrapolated, steps })
}

/// Realized WCT of a fixed schedule on a trace when every worker receives its tasks at its first
/// meeting; the full-knowledge offline benchmark for [`cosmos`]. Workers never met are charged
/// from the trace end plus `φ_i`.
pub fn realized_wct(instance: &Instance, schedule: &Schedule, trace: &MeetingTrace) -> f64 {
    let meetings = trace.per_worker(instance.m());
    let mut total = 0.0;
    for (i, seq) in schedule.order().iter().enumerate() {
        if seq.is_empty() {
            continue;
        }
        let mut clock = meetings[i].first().copied().unwrap_or(trace.end + instance.phi(i));
        for &j in seq {
            clock += instance.p(i, j);
            let (c, _) = feedback_time(&meetings[i], clock, trace.end, instance.phi(i));
            total += instance.weight(j) * c;
        }
    }
    total
}

/// Boxed planner by name: `LRF`, `LRF-MAX`, `LRF-MIN`, `LRF-MEAN`, `EDTS` or `OPT`.
pub fn planner_by_name(name: &str, epsilon: f64) -> Option<Box<dyn OfflinePlanner + Send + Sync>> {
    let upper = name.to_ascii_uppercase();
    Some(match upper.as_str() {
        "LRF" => Box::new(LrfIdenticalPlanner),
        "LRF-MAX" => Box::new(LrfPlanner(LrfVariant::Max)),
        "LRF-MIN" => Box::new(LrfPlanner(LrfVariant::Min)),
        "LRF-MEAN" => Box::new(LrfPlanner(LrfVariant::Mean)),
        "EDTS" => Box::new(EdtsPlanner { epsilon, ..Default::default() }),
        "OPT" => Box::new(BruteForcePlanner),
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::evaluate;
    use alloc::vec;

    #[test]
    fn exponential_gap_mean() {
        let inst = Instance::new(vec![4.0], vec![], vec![vec![]]).unwrap();
        let trace = simulate_meetings(&inst, 17, 4.2e5).unwrap();
        let times = &trace.per_worker(1)[0];
        let k = 100_000;
        assert!(times.len() > k);
        let mean = times[k - 1] / k as f64;
        let bound = 3.0 * 4.0 / (k as f64).sqrt();
        assert!((mean - 4.0).abs() <= bound, "{mean}");
    }

    #[test]
    fn simulation_repeats_and_sorts() {
        let inst = Instance::new(vec![1.0, 3.0, 0.5], vec![], vec![vec![]; 3]).unwrap();
        let a = simulate_meetings(&inst, 5, 50.0).unwrap();
        assert_eq!(a, simulate_meetings(&inst, 5, 50.0).unwrap());
        assert!(a.events().windows(2).all(|w| w[0].0 <= w[1].0));
        assert!(simulate_meetings(&inst, 5, 0.0).is_err());
        let tiny = simulate_meetings(&inst, 5, 1e-9).unwrap();
        assert!(tiny.is_empty());
    }

    #[test]
    fn single_worker_takes_everything() {
        let inst = Instance::new(vec![2.0], vec![1.0, 3.0, 2.0], vec![vec![2.0, 1.0, 4.0]]).unwrap();
        let trace = MeetingTrace::new(vec![(1.0, 0), (5.0, 0), (9.0, 0), (20.0, 0)], 1, None).unwrap();
        let r = cosmos(&inst, &trace, &LrfIdenticalPlanner, CosmosOptions::default()).unwrap();
        assert_eq!(r.status, OnlineStatus::Complete);
        assert_eq!(r.order[0], smith_order(&inst, 0, &[0, 1, 2]));
        // Task 1 ends at 2, task 2 at 6, task 0 at 8: feedback at 5, 9, 9.
        assert_eq!(r.completion, vec![Some(9.0), Some(5.0), Some(9.0)]);
        assert_eq!(r.realized_wct, 9.0 + 15.0 + 18.0);
    }

    #[test]
    fn lrf_hand_replay() {
        // φ = (1, 2), tasks (p, w) = (4, 4), (2, 1), (3, 1). Worker 1 is met first at t = 1:
        // loads EW_1 = 2, EW_0 = 2 − 1 = 1. LRF: t0 -> w0 (5), t1 -> w1 (4), t2 -> w1 (7).
        // Worker 1 commits {1, 2}; then worker 0 is met at t = 3 and takes task 0.
        let inst = Instance::identical(vec![1.0, 2.0], vec![4.0, 1.0, 1.0], vec![4.0, 2.0, 3.0]).unwrap();
        let trace = MeetingTrace::new(vec![(1.0, 1), (3.0, 0), (6.0, 1), (7.5, 0), (8.0, 1)], 2, None).unwrap();
        let r = cosmos(&inst, &trace, &LrfIdenticalPlanner, CosmosOptions { guard: false }).unwrap();
        assert_eq!(r.order, vec![vec![0], vec![1, 2]]);
        assert_eq!(r.steps[0].plan_value, 4.0 * 5.0 + 1.0 * 4.0 + 1.0 * 7.0);
        // Task 1 ends at 3 -> met at 6; task 2 ends at 6 -> met at 6; task 0 starts 3, ends 7 -> 7.5.
        assert_eq!(r.completion, vec![Some(7.5), Some(6.0), Some(6.0)]);
        assert_eq!(r.steps[1].inherited_value, Some(4.0 * (1.0 + 4.0)));
    }

    #[test]
    fn unfinished_and_extrapolated() {
        let inst = Instance::new(vec![1.0, 2.0], vec![1.0, 1.0], vec![vec![1.0, 1.0], vec![5.0, 5.0]]).unwrap();
        let trace = MeetingTrace::new(vec![(0.5, 1)], 2, Some(10.0)).unwrap();
        let r = cosmos(&inst, &trace, &BruteForcePlanner, CosmosOptions::default()).unwrap();
        assert_eq!(r.status, OnlineStatus::Unfinished);
        assert_eq!(r.unfinished, vec![0, 1]);
        assert!(r.schedule().is_none());

        let trace = MeetingTrace::new(vec![(0.5, 0)], 2, Some(10.0)).unwrap();
        let r = cosmos(&inst, &trace, &LrfPlanner(LrfVariant::Min), CosmosOptions::default()).unwrap();
        let committed: usize = r.order.iter().map(Vec::len).sum();
        assert_eq!(committed + r.unfinished.len(), 2);
        assert!(!r.extrapolated.is_empty());
        for &j in &r.extrapolated {
            assert_eq!(r.completion[j], Some(11.0));
        }
    }

    #[test]
    fn guarded_runs_are_monotone() {
        let inst = Instance::new(
            vec![1.0, 2.0, 4.0],
            vec![3.0, 1.0, 2.0, 5.0, 1.0],
            vec![vec![2.0, 3.0, 1.0, 4.0, 2.0], vec![1.0, 1.0, 3.0, 2.0, 5.0], vec![4.0, 2.0, 2.0, 1.0, 1.0]],
        )
        .unwrap();
        for seed in 0..20 {
            let trace = simulate_meetings(&inst, seed, 500.0).unwrap();
            for planner in [&LrfPlanner(LrfVariant::Max) as &dyn OfflinePlanner, &EdtsPlanner::default()] {
                let r = cosmos(&inst, &trace, planner, CosmosOptions::default()).unwrap();
                assert_eq!(r.monotonicity_violations(1e-9), 0);
            }
            let r = cosmos(&inst, &trace, &BruteForcePlanner, CosmosOptions { guard: false }).unwrap();
            assert_eq!(r.monotonicity_violations(1e-9), 0);
            let s = r.schedule().unwrap();
            assert!(evaluate(&inst, &s).is_ok());
        }
    }

    #[test]
    fn trace_validation() {
        assert!(MeetingTrace::new(vec![(2.0, 0), (1.0, 0)], 1, None).is_err());
        assert!(MeetingTrace::new(vec![(1.0, 3)], 2, None).is_err());
        assert!(MeetingTrace::new(vec![(1.0, 0)], 1, Some(0.5)).is_err());
        assert_eq!(MeetingTrace::new(vec![(1.0, 0)], 1, None).unwrap().end(), 1.0);
    }
}
