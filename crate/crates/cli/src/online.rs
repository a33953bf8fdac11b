//! Online experiments: simulated or recorded meetings replayed through CosMOS.

use std::time::Instant;

use anyhow::{bail, Context, Result};
use crowdsched::data::{generate, ingest_trace, instance_from_trace, ContactRecord, SyntheticConfig, TraceTaskConfig};
use crowdsched::model::evaluate;
use crowdsched::online::{cosmos, planner_by_name, simulate_meetings, CosmosOptions, MeetingTrace, OnlineStatus};
use crowdsched::Instance;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OnlineRecord {
    pub instance_id: String,
    pub planner: String,
    pub m: usize,
    pub n: usize,
    pub seed: u64,
    pub status: String,
    pub realized_wct: f64,
    /// Expected-model WCT of the committed schedule; empty when unfinished.
    pub expected_wct: Option<f64>,
    pub steps: usize,
    /// Steps where the fresh plan was worse than the inherited one.
    pub worse_replans: usize,
    pub kept_inherited: usize,
    /// Steps whose followed plan exceeds the inherited value by more than 1e-9 (relative).
    pub violations: usize,
    pub unfinished: usize,
    pub extrapolated: usize,
    pub runtime_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRow {
    pub instance_id: String,
    pub seed: u64,
    pub step: usize,
    pub time: f64,
    pub worker: usize,
    pub remaining: usize,
    pub plan_value: f64,
    pub inherited_value: Option<f64>,
    pub kept_inherited: bool,
    pub committed: usize,
}

#[derive(Debug, Clone)]
pub struct OnlineOptions {
    pub planner: String,
    pub seeds: u64,
    pub epsilon: f64,
    /// Simulation horizon; [`default_horizon`] when absent.
    pub horizon: Option<f64>,
    pub guard: bool,
    pub timing: bool,
}

impl Default for OnlineOptions {
    fn default() -> Self {
        OnlineOptions { planner: "EDTS".into(), seeds: 30, epsilon: 3.0, horizon: None, guard: true, timing: true }
    }
}

/// Long enough for every worker to be met and to report back in all but rare runs:
/// four times the per-worker share of the largest total work plus twenty mean meeting gaps.
pub fn default_horizon(inst: &Instance) -> f64 {
    let work: f64 = (0..inst.n()).map(|j| (0..inst.m()).map(|i| inst.p(i, j)).fold(0.0, f64::max)).sum();
    let phi = (0..inst.m()).map(|i| inst.phi(i)).fold(0.0, f64::max);
    4.0 * (work / inst.m() as f64 + 20.0 * phi)
}

/// Runs CosMOS once and summarizes it.
pub fn run_once(
    inst: &Instance,
    trace: &MeetingTrace,
    instance_id: &str,
    seed: u64,
    opts: &OnlineOptions,
) -> Result<(OnlineRecord, Vec<StepRow>)> {
    let Some(planner) = planner_by_name(&opts.planner, opts.epsilon) else {
        bail!("unknown planner `{}`", opts.planner);
    };
    let start = Instant::now();
    let r = cosmos(inst, trace, planner.as_ref(), CosmosOptions { guard: opts.guard })?;
    let runtime_ms = if opts.timing { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
    let expected_wct = match r.schedule() {
        Some(s) => Some(evaluate(inst, &s)?.wct),
        None => None,
    };
    if r.status == OnlineStatus::Unfinished {
        log::warn!("{instance_id}: trace ended with {} tasks unassigned", r.unfinished.len());
    }
    let steps = r
        .steps
        .iter()
        .enumerate()
        .map(|(k, s)| StepRow {
            instance_id: instance_id.into(),
            seed,
            step: k,
            time: s.time,
            worker: s.worker,
            remaining: s.remaining,
            plan_value: s.plan_value,
            inherited_value: s.inherited_value,
            kept_inherited: s.kept_inherited,
            committed: s.committed.len(),
        })
        .collect();
    let record = OnlineRecord {
        instance_id: instance_id.into(),
        planner: planner.name(),
        m: inst.m(),
        n: inst.n(),
        seed,
        status: match r.status {
            OnlineStatus::Complete => "complete",
            OnlineStatus::Unfinished => "unfinished",
        }
        .into(),
        realized_wct: r.realized_wct,
        expected_wct,
        steps: r.steps.len(),
        worse_replans: r.steps.iter().filter(|s| s.inherited_value.is_some_and(|v| s.plan_value > v)).count(),
        kept_inherited: r.steps.iter().filter(|s| s.kept_inherited).count(),
        violations: r.monotonicity_violations(1e-9),
        unfinished: r.unfinished.len(),
        extrapolated: r.extrapolated.len(),
        runtime_ms,
    };
    Ok((record, steps))
}

/// Synthetic instances with simulated exponential meetings; run `k` uses seed `base.seed + k`
/// for both.
pub fn run_simulated(base: &SyntheticConfig, opts: &OnlineOptions) -> Result<(Vec<OnlineRecord>, Vec<StepRow>)> {
    let runs: Vec<Result<(OnlineRecord, Vec<StepRow>)>> = (0..opts.seeds)
        .into_par_iter()
        .map(|k| {
            let seed = base.seed.wrapping_add(k);
            let inst = generate(&SyntheticConfig { seed, ..base.clone() })?;
            let horizon = opts.horizon.unwrap_or_else(|| default_horizon(&inst));
            let trace = simulate_meetings(&inst, seed, horizon)?;
            run_once(&inst, &trace, &format!("seed={seed}"), seed, opts)
        })
        .collect();
    collect_runs(runs)
}

/// Meetings of the selected devices, shifted so that the earliest contact is at time 0.
pub fn meetings_from_records(records: &[ContactRecord], devices: &[String]) -> Result<MeetingTrace> {
    let origin = records.iter().map(|r| r.start).fold(f64::INFINITY, f64::min);
    let mut events: Vec<(f64, usize)> = records
        .iter()
        .filter_map(|r| devices.iter().position(|d| *d == r.device).map(|i| (r.start - origin, i)))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(MeetingTrace::new(events, devices.len(), None)?)
}

/// Recorded contacts: workers are the `top_k` devices, tasks follow the config's recipe with
/// `tasks_per_worker · m` tasks; run `k` draws tasks with seed `base.seed + k`.
pub fn run_recorded(
    records: &[ContactRecord],
    top_k: usize,
    base: &SyntheticConfig,
    opts: &OnlineOptions,
) -> Result<(Vec<OnlineRecord>, Vec<StepRow>)> {
    let stats = ingest_trace(records.iter().cloned(), top_k)?;
    let devices: Vec<String> = stats.selected.iter().map(|d| d.device.clone()).collect();
    let trace = meetings_from_records(records, &devices).context("building the meeting trace")?;
    let runs: Vec<Result<(OnlineRecord, Vec<StepRow>)>> = (0..opts.seeds)
        .into_par_iter()
        .map(|k| {
            let seed = base.seed.wrapping_add(k);
            let task_cfg = TraceTaskConfig {
                n: base.tasks_per_worker * devices.len(),
                alpha_mean: base.alpha_mean,
                alpha_std: base.alpha_std,
                gamma_range: base.gamma_range,
                weight_range: base.weight_range,
                seed,
                ..Default::default()
            };
            let inst = instance_from_trace(&stats, &task_cfg)?;
            run_once(&inst, &trace, &format!("trace/seed={seed}"), seed, opts)
        })
        .collect();
    collect_runs(runs)
}

fn collect_runs(runs: Vec<Result<(OnlineRecord, Vec<StepRow>)>>) -> Result<(Vec<OnlineRecord>, Vec<StepRow>)> {
    let mut records = Vec::new();
    let mut steps = Vec::new();
    for r in runs {
        let (rec, s) = r?;
        records.push(rec);
        steps.extend(s);
    }
    Ok((records, steps))
}

pub fn write_csv<T: Serialize>(w: impl std::io::Write, rows: &[T]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}
