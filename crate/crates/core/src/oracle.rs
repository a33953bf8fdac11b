//! Exhaustive optimum for tiny instances.
//!
//! Enumerates all `m^n` assignments in lexicographic order and keeps the first strict minimum.
//! Per-worker sequencing is Smith order unless `exhaust_orders` is set, in which case every
//! permutation of every worker's task set is tried as well.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{smith_order, Instance, Schedule};

/// Upper limit on the number of enumerated assignments.
pub const MAX_ASSIGNMENTS: u64 = 10_000_000;
/// Largest task count accepted when permutations are enumerated.
pub const MAX_TASKS_WITH_ORDERS: usize = 6;

fn guard(m: usize, n: usize, exhaust_orders: bool) -> Result<()> {
    let count = (m as u64).checked_pow(n as u32);
    match count {
        Some(c) if c <= MAX_ASSIGNMENTS => {}
        _ => {
            return Err(Error::TooLarge(format!(
                "{m}^{n} assignments exceed the limit of {MAX_ASSIGNMENTS}"
            )))
        }
    }
    if exhaust_orders && n > MAX_TASKS_WITH_ORDERS {
        return Err(Error::TooLarge(format!(
            "order enumeration supports at most {MAX_TASKS_WITH_ORDERS} tasks, got {n}"
        )));
    }
    Ok(())
}

/// Calls `f` on every assignment vector in lexicographic order.
pub fn for_each_assignment(m: usize, n: usize, mut f: impl FnMut(&[usize])) {
    let mut a = vec![0usize; n];
    loop {
        f(&a);
        let mut k = n;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            a[k] += 1;
            if a[k] < m {
                break;
            }
            a[k] = 0;
        }
    }
}

/// Steps `seq` to its next lexicographic permutation; false once the last one was reached.
pub fn next_permutation(seq: &mut [usize]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

fn sequence_cost(instance: &Instance, worker: usize, base: f64, seq: &[usize]) -> f64 {
    let mut clock = base;
    let mut cost = 0.0;
    for &j in seq {
        clock += instance.p(worker, j);
        cost += instance.weight(j) * clock;
    }
    cost
}

/// Exact minimum weighted completion time and a minimizing schedule.
pub fn brute_force_opt(instance: &Instance, exhaust_orders: bool) -> Result<(Schedule, f64)> {
    brute_force_opt_with_base(instance, exhaust_orders, &instance.contact_loads())
}

/// [`brute_force_opt`] with `base[i]` in place of worker `i`'s contact overhead.
pub fn brute_force_opt_with_base(
    instance: &Instance,
    exhaust_orders: bool,
    base: &[f64],
) -> Result<(Schedule, f64)> {
    let (m, n) = (instance.m(), instance.n());
    guard(m, n, exhaust_orders)?;
    if base.len() != m {
        return Err(Error::InvalidArgument("base load length must equal m".into()));
    }
    let all: Vec<usize> = (0..n).collect();
    let smith: Vec<Vec<usize>> = (0..m).map(|i| smith_order(instance, i, &all)).collect();

    let mut best_cost = f64::INFINITY;
    let mut best_orders: Vec<Vec<usize>> = vec![Vec::new(); m];
    let mut orders: Vec<Vec<usize>> = vec![Vec::with_capacity(n); m];
    for_each_assignment(m, n, |a| {
        let mut total = 0.0;
        for i in 0..m {
            orders[i].clear();
            if exhaust_orders {
                orders[i].extend((0..n).filter(|&j| a[j] == i));
                let mut perm = orders[i].clone();
                let mut best = sequence_cost(instance, i, base[i], &perm);
                while next_permutation(&mut perm) {
                    let c = sequence_cost(instance, i, base[i], &perm);
                    if c < best {
                        best = c;
                        orders[i].copy_from_slice(&perm);
                    }
                }
                total += best;
            } else {
                orders[i].extend(smith[i].iter().copied().filter(|&j| a[j] == i));
                total += sequence_cost(instance, i, base[i], &orders[i]);
            }
        }
        if total < best_cost {
            best_cost = total;
            for (dst, src) in best_orders.iter_mut().zip(&orders) {
                dst.clone_from(src);
            }
        }
    });
    let schedule = Schedule::from_orders(n, best_orders)?;
    Ok((schedule, if n == 0 { 0.0 } else { best_cost }))
}

/// Minimizes an arbitrary schedule cost over every assignment and, if `exhaust_orders`, every
/// per-worker permutation. Used where completion times are not the expected-model ones.
pub fn brute_force_min_by(
    instance: &Instance,
    exhaust_orders: bool,
    mut cost: impl FnMut(&Schedule) -> f64,
) -> Result<(Schedule, f64)> {
    let (m, n) = (instance.m(), instance.n());
    guard(m, n, exhaust_orders)?;
    let mut best: Option<(Schedule, f64)> = None;
    for_each_assignment(m, n, |a| {
        let base_orders: Vec<Vec<usize>> = (0..m)
            .map(|i| {
                let tasks: Vec<usize> = (0..n).filter(|&j| a[j] == i).collect();
                if exhaust_orders {
                    tasks
                } else {
                    smith_order(instance, i, &tasks)
                }
            })
            .collect();
        let mut orders = base_orders.clone();
        loop {
            let s = Schedule::from_orders(n, orders.clone()).expect("enumerated schedules are valid");
            let c = cost(&s);
            if best.as_ref().map_or(true, |(_, b)| c < *b) {
                best = Some((s, c));
            }
            if !exhaust_orders {
                break;
            }
            // Odometer over the per-worker permutations.
            let mut advanced = false;
            for i in (0..m).rev() {
                if next_permutation(&mut orders[i]) {
                    advanced = true;
                    break;
                }
                orders[i].clone_from(&base_orders[i]);
            }
            if !advanced {
                break;
            }
        }
    });
    Ok(best.expect("at least one assignment is enumerated"))
}
