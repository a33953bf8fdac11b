//! Largest-Ratio-First list scheduling.
//!
//! [`lrf_identical`] is the classic identical-worker rule: walk the tasks by non-increasing
//! Smith ratio and hand each one to the worker with the smallest expected workload.
//! [`lrf_variant`] is the unrelated-worker baseline: the Smith ratio is computed against a proxy
//! processing time (max, min or mean over workers) and each task goes to the worker on which it
//! would finish earliest.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{Instance, Schedule};

/// Proxy used to collapse a task's RST column into one processing time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LrfVariant {
    Max,
    Min,
    Mean,
}

impl LrfVariant {
    pub const ALL: [LrfVariant; 3] = [LrfVariant::Max, LrfVariant::Min, LrfVariant::Mean];

    pub fn name(self) -> &'static str {
        match self {
            LrfVariant::Max => "LRF-MAX",
            LrfVariant::Min => "LRF-MIN",
            LrfVariant::Mean => "LRF-MEAN",
        }
    }

    fn proxy(self, instance: &Instance, task: usize) -> f64 {
        let column = (0..instance.m()).map(|i| instance.p(i, task));
        match self {
            LrfVariant::Max => column.fold(f64::NEG_INFINITY, f64::max),
            LrfVariant::Min => column.fold(f64::INFINITY, f64::min),
            LrfVariant::Mean => column.sum::<f64>() / instance.m() as f64,
        }
    }
}

/// Task indices sorted by non-increasing `w_j / p_j`, larger index first on ties.
fn ratio_order(instance: &Instance, proxy: &[f64]) -> Vec<usize> {
    let ratio = |j: usize| {
        if proxy[j] == 0.0 {
            f64::INFINITY
        } else {
            instance.weight(j) / proxy[j]
        }
    };
    let mut order: Vec<usize> = (0..instance.n()).collect();
    order.sort_by(|&a, &b| match ratio(b).partial_cmp(&ratio(a)).unwrap_or(Ordering::Equal) {
        Ordering::Equal => b.cmp(&a),
        o => o,
    });
    order
}

fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::INFINITY;
    for (i, v) in values.enumerate() {
        if v < best_val {
            best = i;
            best_val = v;
        }
    }
    best
}

/// Identical-worker LRF on the instance's contact overheads.
pub fn lrf_identical(instance: &Instance) -> Result<Schedule> {
    lrf_identical_with_base(instance, &instance.contact_loads())
}

/// Identical-worker LRF where worker `i` starts with expected workload `base[i]`.
pub fn lrf_identical_with_base(instance: &Instance, base: &[f64]) -> Result<Schedule> {
    if !instance.is_identical() {
        return Err(Error::InvalidArgument(
            "identical-worker LRF needs equal RST rows across workers".into(),
        ));
    }
    check_base(instance, base)?;
    let proxy = instance.rst_row(0).to_vec();
    let mut load = base.to_vec();
    let mut order = vec![Vec::new(); instance.m()];
    for j in ratio_order(instance, &proxy) {
        let i = argmin(load.iter().copied());
        order[i].push(j);
        load[i] += proxy[j];
    }
    Schedule::from_orders(instance.n(), order)
}

/// Unrelated-worker LRF baseline.
pub fn lrf_variant(instance: &Instance, variant: LrfVariant) -> Schedule {
    lrf_variant_with_base(instance, variant, &instance.contact_loads())
        .expect("contact loads always match the instance")
}

/// [`lrf_variant`] with `base[i]` replacing worker `i`'s initial workload.
pub fn lrf_variant_with_base(instance: &Instance, variant: LrfVariant, base: &[f64]) -> Result<Schedule> {
    check_base(instance, base)?;
    let proxy: Vec<f64> = (0..instance.n()).map(|j| variant.proxy(instance, j)).collect();
    let mut load = base.to_vec();
    let mut order = vec![Vec::new(); instance.m()];
    for j in ratio_order(instance, &proxy) {
        let i = argmin((0..instance.m()).map(|i| load[i] + instance.p(i, j)));
        order[i].push(j);
        load[i] += instance.p(i, j);
    }
    Schedule::from_orders(instance.n(), order)
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
