//! Offline benchmark: generate instances, bound them with the interval LP and run each algorithm.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use crowdsched::data::{generate, SyntheticConfig};
use crowdsched::lp::{build_interval_indexed, solve, FractionalSolution, SolverOptions};
use crowdsched::lrf::{lrf_identical, lrf_variant, LrfVariant};
use crowdsched::model::{evaluate, Schedule};
use crowdsched::rounding::{build_grouping, dts, edts, rts, DEFAULT_ALPHA, DEFAULT_ETA};
use crowdsched::Instance;
use rayon::prelude::*;

use crate::records::{RunRecord, STATUS_FAILED, STATUS_LP_FAILED, STATUS_OK};

/// Rounding seeds averaged into one RTS result.
pub const RTS_SEEDS: u64 = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Identical-worker LRF; uses worker 0's processing times.
    Lrf,
    LrfVariant(LrfVariant),
    Edts,
    Rts,
    Dts,
}

impl Algorithm {
    pub const DEFAULT: [Algorithm; 6] = [
        Algorithm::LrfVariant(LrfVariant::Max),
        Algorithm::LrfVariant(LrfVariant::Min),
        Algorithm::LrfVariant(LrfVariant::Mean),
        Algorithm::Edts,
        Algorithm::Rts,
        Algorithm::Dts,
    ];

    fn needs_lp(self) -> bool {
        matches!(self, Algorithm::Edts | Algorithm::Rts | Algorithm::Dts)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Lrf => "LRF",
            Algorithm::LrfVariant(v) => v.name(),
            Algorithm::Edts => "EDTS",
            Algorithm::Rts => "RTS",
            Algorithm::Dts => "DTS",
        })
    }
}

impl FromStr for Algorithm {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "LRF" => Algorithm::Lrf,
            "LRF-MAX" => Algorithm::LrfVariant(LrfVariant::Max),
            "LRF-MIN" => Algorithm::LrfVariant(LrfVariant::Min),
            "LRF-MEAN" => Algorithm::LrfVariant(LrfVariant::Mean),
            "EDTS" => Algorithm::Edts,
            "RTS" => Algorithm::Rts,
            "DTS" => Algorithm::Dts,
            other => bail!("unknown algorithm `{other}`"),
        })
    }
}

pub fn parse_algorithms(list: &str) -> Result<Vec<Algorithm>> {
    let algos: Vec<Algorithm> = list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect::<Result<_>>()?;
    if algos.is_empty() {
        bail!("no algorithm given");
    }
    Ok(algos)
}

/// Config parameters that a sweep can vary.
pub const SWEEP_PARAMS: [&str; 9] = [
    "tasks_per_worker",
    "m",
    "alpha_mean",
    "alpha_std",
    "beta_lo",
    "beta_hi",
    "gamma_lo",
    "gamma_hi",
    "gamma_ratio",
];

/// `param:lo:hi:step`, inclusive of `hi` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

impl FromStr for Sweep {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [param, lo, hi, step] = parts[..] else {
            bail!("sweep must look like param:lo:hi:step, got `{s}`");
        };
        if !SWEEP_PARAMS.contains(&param) {
            bail!("cannot sweep `{param}`; choose one of {}", SWEEP_PARAMS.join(", "));
        }
        let (lo, hi, step): (f64, f64, f64) = (lo.parse()?, hi.parse()?, step.parse()?);
        if !(step > 0.0 && lo <= hi) {
            bail!("sweep needs lo <= hi and step > 0");
        }
        let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
        let values = (0..count).map(|k| lo + k as f64 * step).collect();
        Ok(Sweep { param: param.into(), values })
    }
}

/// Applies one sweep value to a copy of `base`.
pub fn apply_sweep(base: &SyntheticConfig, param: &str, value: f64) -> Result<SyntheticConfig> {
    let mut cfg = base.clone();
    let count = || -> Result<usize> {
        if value < 1.0 || value.fract() != 0.0 {
            bail!("{param} must be a positive integer, got {value}");
        }
        Ok(value as usize)
    };
    match param {
        "tasks_per_worker" => cfg.tasks_per_worker = count()?,
        "m" => cfg.m = count()?,
        "alpha_mean" => cfg.alpha_mean = value,
        "alpha_std" => cfg.alpha_std = value,
        "beta_lo" => cfg.beta_range.0 = value,
        "beta_hi" => cfg.beta_range.1 = value,
        "gamma_lo" => cfg.gamma_range.0 = value,
        "gamma_hi" => cfg.gamma_range.1 = value,
        "gamma_ratio" => cfg.gamma_range.0 = value * cfg.gamma_range.1,
        _ => bail!("cannot sweep `{param}`"),
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub algorithms: Vec<Algorithm>,
    pub seeds: u64,
    pub epsilon: f64,
    pub sweep: Option<Sweep>,
    /// Write `runtime_ms = 0` so that output bytes only depend on the inputs.
    pub timing: bool,
    pub solver: SolverOptions,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions {
            algorithms: Algorithm::DEFAULT.to_vec(),
            seeds: 30,
            epsilon: 3.0,
            sweep: None,
            timing: true,
            solver: SolverOptions::default(),
        }
    }
}

/// WCT of one algorithm; RTS averages [`RTS_SEEDS`] rounding seeds derived from `seed`.
pub fn run_algorithm(algo: Algorithm, inst: &Instance, lp: Option<&FractionalSolution>, seed: u64) -> Result<f64> {
    let wct = |s: &Schedule| -> Result<f64> { Ok(evaluate(inst, s)?.wct) };
    let lp = || lp.ok_or_else(|| anyhow!("{algo} needs the LP solution"));
    match algo {
        Algorithm::Lrf => {
            let row = inst.rst_row(0).to_vec();
            let ident = Instance::identical((0..inst.m()).map(|i| inst.phi(i)).collect(), (0..inst.n()).map(|j| inst.weight(j)).collect(), row)?;
            wct(&lrf_identical(&ident)?)
        }
        Algorithm::LrfVariant(v) => wct(&lrf_variant(inst, v)),
        Algorithm::Edts => wct(&edts(lp()?, inst)?),
        Algorithm::Rts => {
            let sol = lp()?;
            let mut total = 0.0;
            for r in 0..RTS_SEEDS {
                total += wct(&rts(sol, inst, seed.wrapping_mul(1000).wrapping_add(r), DEFAULT_ALPHA)?)?;
            }
            Ok(total / RTS_SEEDS as f64)
        }
        Algorithm::Dts => {
            let sol = lp()?;
            let groupings: Vec<_> = (0..inst.m()).map(|i| build_grouping(sol, i)).collect();
            wct(&dts(sol, inst, &groupings, DEFAULT_ETA)?)
        }
    }
}

fn elapsed_ms(start: Instant, timing: bool) -> f64 {
    if timing {
        start.elapsed().as_secs_f64() * 1e3
    } else {
        0.0
    }
}

/// Runs every algorithm on one instance.
pub fn run_instance(
    inst: &Instance,
    instance_id: &str,
    seed: u64,
    sweep: Option<(&str, f64)>,
    opts: &BenchOptions,
) -> Vec<RunRecord> {
    let start = Instant::now();
    let lp = build_interval_indexed(inst, opts.epsilon).and_then(|model| solve(&model, &opts.solver));
    let lp_ms = elapsed_ms(start, opts.timing);
    if let Err(e) = &lp {
        log::warn!("{instance_id}: LP failed: {e}");
    }
    let bound = lp.as_ref().ok().map(|s| s.objective()).filter(|b| *b > 0.0);
    opts.algorithms
        .iter()
        .map(|&algo| {
            let start = Instant::now();
            let result = run_algorithm(algo, inst, lp.as_ref().ok(), seed);
            let mut runtime_ms = elapsed_ms(start, opts.timing);
            if algo.needs_lp() {
                runtime_ms += lp_ms;
            }
            let (wct, status) = match result {
                Ok(w) => (Some(w), if bound.is_some() { STATUS_OK } else { STATUS_LP_FAILED }),
                Err(e) => {
                    log::warn!("{instance_id}: {algo} failed: {e}");
                    (None, STATUS_FAILED)
                }
            };
            RunRecord {
                instance_id: instance_id.into(),
                algorithm: algo.to_string(),
                m: inst.m(),
                n: inst.n(),
                seed,
                wct,
                lp_bound: bound,
                wctr: wct.zip(bound).map(|(w, b)| w / b),
                runtime_ms,
                status: status.into(),
                sweep_param: sweep.map(|s| s.0.to_string()).unwrap_or_default(),
                sweep_value: sweep.map(|s| s.1),
            }
        })
        .collect()
}

/// Instance `k` of every sweep point uses seed `base.seed + k`. Work runs in parallel; rows come
/// back ordered by sweep point, seed and algorithm.
pub fn run_bench(base: &SyntheticConfig, opts: &BenchOptions) -> Result<Vec<RunRecord>> {
    let points: Vec<(Option<f64>, SyntheticConfig)> = match &opts.sweep {
        None => vec![(None, base.clone())],
        Some(sw) => sw.values.iter().map(|&v| Ok((Some(v), apply_sweep(base, &sw.param, v)?))).collect::<Result<_>>()?,
    };
    let units: Vec<(usize, u64)> = (0..points.len()).flat_map(|p| (0..opts.seeds).map(move |k| (p, k))).collect();
    let chunks: Vec<Result<Vec<RunRecord>>> = units
        .par_iter()
        .map(|&(p, k)| {
            let (value, cfg) = &points[p];
            let seed = cfg.seed.wrapping_add(k);
            let inst = generate(&SyntheticConfig { seed, ..cfg.clone() })?;
            let sweep = opts.sweep.as_ref().zip(*value).map(|(sw, v)| (sw.param.as_str(), v));
            let id = match sweep {
                Some((param, v)) => format!("{param}={v}/seed={seed}"),
                None => format!("seed={seed}"),
            };
            log::info!("{id}: m={} n={}", inst.m(), inst.n());
            Ok(run_instance(&inst, &id, seed, sweep, opts))
        })
        .collect();
    let mut out = Vec::new();
    for c in chunks {
        out.extend(c?);
    }
    Ok(out)
}
