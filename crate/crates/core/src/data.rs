//! Instance sources: the synthetic generator and contact-trace ingestion.
//!
//! Synthetic instances draw `Φ_i ~ U[Φ_lo, Φ_hi]` (stored as `φ_i = Φ_i / 2`), a base service
//! time `α_j ~ N(mean, std)` truncated below at 1, a worker speed factor `β_i ~ U[β_lo, β_hi]`,
//! a per-pair factor `γ_ij ~ U[γ_lo, γ_hi]` and an integer weight, with `p_ij = α_j β_i γ_ij`.
//!
//! Trace ingestion estimates each device's contact rate `λ_i` from the gaps between successive
//! contact starts and keeps the `top_k` most frequently met devices as workers.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::model::Instance;

/// Rejection draws allowed per truncated `α` sample before giving up.
const MAX_ALPHA_DRAWS: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default, deny_unknown_fields))]
pub struct SyntheticConfig {
    pub m: usize,
    pub tasks_per_worker: usize,
    pub phi_total_range: (f64, f64),
    pub alpha_mean: f64,
    pub alpha_std: f64,
    pub beta_range: (f64, f64),
    pub gamma_range: (f64, f64),
    pub weight_range: (u32, u32),
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            m: 10,
            tasks_per_worker: 25,
            phi_total_range: (1.0, 30.0),
            alpha_mean: 30.0,
            alpha_std: 30.0,
            beta_range: (0.5, 2.0),
            gamma_range: (0.1, 2.0),
            weight_range: (1, 100),
            seed: 0,
        }
    }
}

fn check_range(name: &str, (lo, hi): (f64, f64)) -> Result<()> {
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo <= hi) {
        return Err(Error::InvalidArgument(format!("{name} must satisfy 0 < lo <= hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

impl SyntheticConfig {
    pub fn n(&self) -> usize {
        self.m * self.tasks_per_worker
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidArgument("m must be at least 1".into()));
        }
        check_range("phi_total_range", self.phi_total_range)?;
        check_range("beta_range", self.beta_range)?;
        check_range("gamma_range", self.gamma_range)?;
        check_task_recipe(self.alpha_mean, self.alpha_std, self.weight_range)
    }
}

fn check_task_recipe(alpha_mean: f64, alpha_std: f64, (wlo, whi): (u32, u32)) -> Result<()> {
    if !(alpha_mean.is_finite() && alpha_std.is_finite() && alpha_std >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha needs a finite mean and a nonnegative std, got N({alpha_mean}, {alpha_std})"
        )));
    }
    if alpha_std == 0.0 && alpha_mean < 1.0 {
        return Err(Error::InvalidArgument("alpha below 1 with zero std can never be drawn".into()));
    }
    if wlo < 1 || wlo > whi {
        return Err(Error::InvalidArgument(format!("weight_range must satisfy 1 <= lo <= hi, got [{wlo}, {whi}]")));
    }
    Ok(())
}

fn uniform(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    Uniform::new_inclusive(lo, hi).expect("validated range").sample(rng)
}

/// `N(mean, std)` conditioned on being at least 1, drawn by rejection.
fn truncated_alpha(rng: &mut impl Rng, normal: &Normal<f64>) -> Result<f64> {
    for _ in 0..MAX_ALPHA_DRAWS {
        let a = normal.sample(rng);
        if a >= 1.0 {
            return Ok(a);
        }
    }
    Err(Error::InvalidArgument("alpha distribution has almost no mass above 1".into()))
}

/// Task weights and base service times, in task order.
fn draw_tasks(
    rng: &mut impl Rng,
    n: usize,
    alpha_mean: f64,
    alpha_std: f64,
    (wlo, whi): (u32, u32),
) -> Result<(Vec<f64>, Vec<f64>)> {
    let normal = Normal::new(alpha_mean, alpha_std).map_err(|e| Error::InvalidArgument(format!("{e}")))?;
    let weight = Uniform::new_inclusive(wlo, whi).map_err(|e| Error::InvalidArgument(format!("{e}")))?;
    let mut alpha = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for _ in 0..n {
        alpha.push(truncated_alpha(rng, &normal)?);
        weights.push(weight.sample(rng) as f64);
    }
    Ok((alpha, weights))
}

fn rst_matrix(rng: &mut impl Rng, alpha: &[f64], beta: &[f64], gamma_range: (f64, f64)) -> Vec<Vec<f64>> {
    beta.iter()
        .map(|&b| alpha.iter().map(|&a| a * b * uniform(rng, gamma_range)).collect())
        .collect()
}

/// Draws a synthetic instance. Draw order: all `Φ_i`, all `β_i`, then `(α_j, w_j)` per task,
/// then `γ_ij` row by row.
pub fn generate(config: &SyntheticConfig) -> Result<Instance> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let m = config.m;
    let phi: Vec<f64> = (0..m).map(|_| uniform(&mut rng, config.phi_total_range) / 2.0).collect();
    let beta: Vec<f64> = (0..m).map(|_| uniform(&mut rng, config.beta_range)).collect();
    let (alpha, weights) = draw_tasks(&mut rng, config.n(), config.alpha_mean, config.alpha_std, config.weight_range)?;
    let rst = rst_matrix(&mut rng, &alpha, &beta, config.gamma_range);
    Instance::new(phi, weights, rst)
}

/// One Bluetooth-style contact between the requester and a device.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ContactRecord {
    pub device: String,
    pub start: f64,
    pub end: f64,
}

impl ContactRecord {
    pub fn new(device: impl Into<String>, start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start >= 0.0 && start <= end) {
            return Err(Error::InvalidArgument(format!(
                "contact times must satisfy 0 <= start <= end, got [{start}, {end}]"
            )));
        }
        Ok(ContactRecord { device: device.into(), start, end })
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DeviceStats {
    pub device: String,
    pub contacts: usize,
    /// Sum of start-to-start gaps.
    pub total_gap: f64,
    pub lambda: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DropReason {
    SingleContact,
    ZeroGap,
    BelowTopK,
}

#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TraceStats {
    /// Retained devices, by decreasing `λ` (ties by device id).
    pub selected: Vec<DeviceStats>,
    pub dropped: Vec<(String, DropReason)>,
}

impl TraceStats {
    pub fn phi(&self) -> Vec<f64> {
        self.selected.iter().map(|d| d.phi).collect()
    }
}

#[derive(Clone, Copy)]
struct Tally {
    count: usize,
    first: f64,
    last: f64,
}

/// Estimates `λ_i = (contacts − 1) / Σ gaps` per device in one pass and keeps the `top_k`
/// devices with the largest rate.
pub fn ingest_trace(records: impl IntoIterator<Item = ContactRecord>, top_k: usize) -> Result<TraceStats> {
    let mut tally: BTreeMap<String, Tally> = BTreeMap::new();
    for r in records {
        tally
            .entry(r.device)
            .and_modify(|t| {
                t.count += 1;
                t.first = t.first.min(r.start);
                t.last = t.last.max(r.start);
            })
            .or_insert(Tally { count: 1, first: r.start, last: r.start });
    }
    let mut stats = TraceStats::default();
    let mut eligible = Vec::new();
    for (device, t) in tally {
        let gap = t.last - t.first;
        if t.count < 2 {
            stats.dropped.push((device, DropReason::SingleContact));
        } else if gap <= 0.0 {
            stats.dropped.push((device, DropReason::ZeroGap));
        } else {
            let lambda = (t.count - 1) as f64 / gap;
            eligible.push(DeviceStats { device, contacts: t.count, total_gap: gap, lambda, phi: 1.0 / lambda });
        }
    }
    if eligible.is_empty() {
        return Err(Error::InvalidArgument("no device has two contacts with a positive gap".into()));
    }
    eligible.sort_by(|a, b| b.lambda.total_cmp(&a.lambda).then_with(|| a.device.cmp(&b.device)));
    for d in eligible.drain(top_k.min(eligible.len())..) {
        stats.dropped.push((d.device, DropReason::BelowTopK));
    }
    stats.selected = eligible;
    Ok(stats)
}

/// Task recipe for trace-derived instances: the synthetic `α`/`γ` draws with `β` defaulting to 1.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize), serde(default, deny_unknown_fields))]
pub struct TraceTaskConfig {
    pub n: usize,
    pub alpha_mean: f64,
    pub alpha_std: f64,
    pub beta_range: (f64, f64),
    pub gamma_range: (f64, f64),
    pub weight_range: (u32, u32),
    pub seed: u64,
}

impl Default for TraceTaskConfig {
    fn default() -> Self {
        let s = SyntheticConfig::default();
        TraceTaskConfig {
            n: 0,
            alpha_mean: s.alpha_mean,
            alpha_std: s.alpha_std,
            beta_range: (1.0, 1.0),
            gamma_range: s.gamma_range,
            weight_range: s.weight_range,
            seed: 0,
        }
    }
}

/// Instance whose workers are the selected trace devices.
pub fn instance_from_trace(stats: &TraceStats, config: &TraceTaskConfig) -> Result<Instance> {
    if stats.selected.is_empty() {
        return Err(Error::InvalidArgument("trace statistics select no device".into()));
    }
    check_range("beta_range", config.beta_range)?;
    check_range("gamma_range", config.gamma_range)?;
    check_task_recipe(config.alpha_mean, config.alpha_std, config.weight_range)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let m = stats.selected.len();
    let beta: Vec<f64> = (0..m).map(|_| uniform(&mut rng, config.beta_range)).collect();
    let (alpha, weights) = draw_tasks(&mut rng, config.n, config.alpha_mean, config.alpha_std, config.weight_range)?;
    let rst = rst_matrix(&mut rng, &alpha, &beta, config.gamma_range);
    Instance::new(stats.phi(), weights, rst)
}
