//! Dense revised simplex for `min cᵀx, A x (= | ≤) b, x ≥ 0` with `b ≥ 0`.
//!
//! The basis inverse is kept explicitly (rows are few, columns many) and updated by the
//! product-form rule, with a full Gauss-Jordan refactorization every `refactor_every` pivots.
//! Pricing is Dantzig's rule; after a run of degenerate pivots it switches to Bland's rule until
//! the objective moves again. Two phases: artificial variables on the equality rows are driven to
//! zero first, then never re-enter.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
}

/// Column-compressed constraint matrix plus row data, as handed to the solver.
pub(crate) struct StandardForm<'a> {
    pub cost: &'a [f64],
    pub col_ptr: &'a [usize],
    pub row_idx: &'a [usize],
    pub values: &'a [f64],
    pub sense: &'a [Sense],
    pub rhs: &'a [f64],
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverOptions {
    /// Feasibility and optimality tolerance.
    pub tol: f64,
    pub max_iterations: usize,
    pub refactor_every: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub degenerate_limit: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-7, max_iterations: 200_000, refactor_every: 100, degenerate_limit: 30 }
    }
}

pub(crate) struct RawSolution {
    pub x: Vec<f64>,
    /// Row duals of the unscaled problem.
    pub duals: Vec<f64>,
    pub iterations: usize,
}

pub(crate) enum RawOutcome {
    Optimal(RawSolution),
    IterationLimit { iterations: usize, feasible: Option<Vec<f64>> },
}

const PIVOT_TOL: f64 = 1e-9;
const DJ_TOL: f64 = 1e-10;

#[derive(Clone, Copy, PartialEq, Eq)]
enum ColKind {
    Structural(usize),
    Slack(usize),
    Artificial(usize),
}

struct Simplex<'a> {
    form: &'a StandardForm<'a>,
    rows: usize,
    nstruct: usize,
    /// Row scale factors applied to the constraint system.
    row_scale: Vec<f64>,
    obj_scale: f64,
    rhs: Vec<f64>,
    kinds: Vec<ColKind>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: Vec<f64>,
    xb: Vec<f64>,
    /// Artificial columns that left the basis are never allowed back.
    barred: Vec<bool>,
    iterations: usize,
    opts: SolverOptions,
}

impl<'a> Simplex<'a> {
    fn new(form: &'a StandardForm<'a>, opts: SolverOptions) -> Self {
        let rows = form.rhs.len();
        let nstruct = form.cost.len();
        let mut row_max = vec![0.0f64; rows];
        for (&r, &v) in form.row_idx.iter().zip(form.values) {
            row_max[r] = row_max[r].max(v.abs());
        }
        let row_scale: Vec<f64> = row_max.iter().map(|&mx| if mx > 0.0 { 1.0 / mx } else { 1.0 }).collect();
        let cmax = form.cost.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
        let obj_scale = if cmax > 0.0 { 1.0 / cmax } else { 1.0 };
        let rhs: Vec<f64> = form.rhs.iter().zip(&row_scale).map(|(b, s)| b * s).collect();

        let mut kinds: Vec<ColKind> = (0..nstruct).map(ColKind::Structural).collect();
        let mut aux_of_row = Vec::with_capacity(rows);
        for r in 0..rows {
            aux_of_row.push(kinds.len());
            kinds.push(match form.sense[r] {
                Sense::Le => ColKind::Slack(r),
                Sense::Eq => ColKind::Artificial(r),
            });
        }
        let ncols = kinds.len();
        let mut in_basis = vec![false; ncols];
        for &c in &aux_of_row {
            in_basis[c] = true;
        }
        let mut binv = vec![0.0; rows * rows];
        for r in 0..rows {
            binv[r * rows + r] = 1.0;
        }
        Simplex {
            form,
            rows,
            nstruct,
            row_scale,
            obj_scale,
            xb: rhs.clone(),
            rhs,
            basis: aux_of_row,
            kinds,
            in_basis,
            binv,
            barred: vec![false; ncols],
            iterations: 0,
            opts,
        }
    }

    /// Scaled nonzeros of a column.
    fn for_col(&self, col: usize, mut f: impl FnMut(usize, f64)) {
        match self.kinds[col] {
            ColKind::Structural(j) => {
                for k in self.form.col_ptr[j]..self.form.col_ptr[j + 1] {
                    let r = self.form.row_idx[k];
                    f(r, self.form.values[k] * self.row_scale[r]);
                }
            }
            ColKind::Slack(r) | ColKind::Artificial(r) => f(r, 1.0),
        }
    }

    fn cost(&self, col: usize, phase_one: bool) -> f64 {
        match self.kinds[col] {
            ColKind::Structural(j) => {
                if phase_one {
                    0.0
                } else {
                    self.form.cost[j] * self.obj_scale
                }
            }
            ColKind::Slack(_) => 0.0,
            ColKind::Artificial(_) => {
                if phase_one {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    fn duals(&self, phase_one: bool) -> Vec<f64> {
        let n = self.rows;
        let mut pi = vec![0.0; n];
        for (p, &col) in self.basis.iter().enumerate() {
            let c = self.cost(col, phase_one);
            if c != 0.0 {
                let row = &self.binv[p * n..(p + 1) * n];
                for (k, v) in pi.iter_mut().enumerate() {
                    *v += c * row[k];
                }
            }
        }
        pi
    }

    fn reduced_cost(&self, col: usize, pi: &[f64], phase_one: bool) -> f64 {
        let mut d = self.cost(col, phase_one);
        self.for_col(col, |r, a| d -= pi[r] * a);
        d
    }

    fn ftran(&self, col: usize) -> Vec<f64> {
        let n = self.rows;
        let mut u = vec![0.0; n];
        self.for_col(col, |k, a| {
            for (r, ur) in u.iter_mut().enumerate() {
                *ur += self.binv[r * n + k] * a;
            }
        });
        u
    }

    fn pivot(&mut self, p: usize, entering: usize, u: &[f64]) {
        let n = self.rows;
        let theta = self.xb[p] / u[p];
        for r in 0..n {
            if r != p {
                self.xb[r] -= theta * u[r];
            }
        }
        self.xb[p] = theta;
        let inv = 1.0 / u[p];
        for k in 0..n {
            self.binv[p * n + k] *= inv;
        }
        let (head, rest) = self.binv.split_at_mut(p * n);
        let (prow, tail) = rest.split_at_mut(n);
        for (r, chunk) in head.chunks_exact_mut(n).enumerate() {
            let f = u[r];
            if f != 0.0 {
                for (x, &y) in chunk.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
            }
        }
        for (off, chunk) in tail.chunks_exact_mut(n).enumerate() {
            let f = u[p + 1 + off];
            if f != 0.0 {
                for (x, &y) in chunk.iter_mut().zip(prow.iter()) {
                    *x -= f * y;
                }
            }
        }
        let leaving = self.basis[p];
        self.in_basis[leaving] = false;
        if matches!(self.kinds[leaving], ColKind::Artificial(_)) {
            self.barred[leaving] = true;
        }
        self.in_basis[entering] = true;
        self.basis[p] = entering;
        self.iterations += 1;
    }

    /// Rebuilds `B⁻¹` from scratch and recomputes the basic values.
    fn refactor(&mut self) -> bool {
        let n = self.rows;
        let mut a = vec![0.0; n * n];
        for (p, &col) in self.basis.iter().enumerate() {
            self.for_col(col, |r, v| a[r * n + p] = v);
        }
        let mut inv = vec![0.0; n * n];
        for r in 0..n {
            inv[r * n + r] = 1.0;
        }
        for c in 0..n {
            let mut piv = c;
            let mut best = a[c * n + c].abs();
            for r in c + 1..n {
                let v = a[r * n + c].abs();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-13 {
                return false;
            }
            if piv != c {
                for k in 0..n {
                    a.swap(c * n + k, piv * n + k);
                    inv.swap(c * n + k, piv * n + k);
                }
            }
            let d = 1.0 / a[c * n + c];
            for k in 0..n {
                a[c * n + k] *= d;
                inv[c * n + k] *= d;
            }
            for r in 0..n {
                if r != c {
                    let f = a[r * n + c];
                    if f != 0.0 {
                        for k in 0..n {
                            a[r * n + k] -= f * a[c * n + k];
                            inv[r * n + k] -= f * inv[c * n + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        for r in 0..n {
            let row = &self.binv[r * n..(r + 1) * n];
            self.xb[r] = row.iter().zip(&self.rhs).map(|(a, b)| a * b).sum();
        }
        true
    }

    /// Runs one phase to optimality. `Ok(false)` means the iteration cap was hit.
    fn run(&mut self, phase_one: bool) -> Result<bool> {
        let ncols = self.kinds.len();
        let mut degenerate_run = 0usize;
        let mut since_refactor = 0usize;
        loop {
            if self.iterations >= self.opts.max_iterations {
                return Ok(false);
            }
            if since_refactor >= self.opts.refactor_every {
                // A singular refactorization keeps the updated inverse.
                self.refactor();
                since_refactor = 0;
            }
            let bland = degenerate_run >= self.opts.degenerate_limit;
            let pi = self.duals(phase_one);
            let mut entering = None;
            let mut best = -DJ_TOL;
            for col in 0..ncols {
                if self.in_basis[col] || self.barred[col] {
                    continue;
                }
                if !phase_one && matches!(self.kinds[col], ColKind::Artificial(_)) {
                    continue;
                }
                let d = self.reduced_cost(col, &pi, phase_one);
                if d < best {
                    entering = Some(col);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(q) = entering else {
                return Ok(true);
            };
            let u = self.ftran(q);
            let mut leave: Option<usize> = None;
            let mut min_ratio = f64::INFINITY;
            for r in 0..self.rows {
                if u[r] > PIVOT_TOL {
                    let ratio = self.xb[r].max(0.0) / u[r];
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            if ratio < min_ratio - 1e-12 {
                                true
                            } else if ratio <= min_ratio + 1e-12 {
                                if bland {
                                    self.basis[r] < self.basis[l]
                                } else {
                                    u[r] > u[l]
                                }
                            } else {
                                false
                            }
                        }
                    };
                    if better {
                        leave = Some(r);
                        min_ratio = min_ratio.min(ratio);
                    }
                }
            }
            let Some(p) = leave else {
                return Err(Error::Unbounded);
            };
            if self.xb[p] < 0.0 {
                self.xb[p] = 0.0;
            }
            if min_ratio <= 1e-12 {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(p, q, &u);
            since_refactor += 1;
        }
    }

    fn phase_one_objective(&self) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .filter(|(&c, _)| matches!(self.kinds[c], ColKind::Artificial(_)))
            .map(|(_, &v)| v.max(0.0))
            .sum()
    }

    /// Pivots zero-valued artificials out of the basis where some other column can replace them.
    fn drive_out_artificials(&mut self) {
        let n = self.rows;
        for p in 0..n {
            if !matches!(self.kinds[self.basis[p]], ColKind::Artificial(_)) {
                continue;
            }
            let row = self.binv[p * n..(p + 1) * n].to_vec();
            let mut pick = None;
            for col in 0..self.kinds.len() {
                if self.in_basis[col] || matches!(self.kinds[col], ColKind::Artificial(_)) {
                    continue;
                }
                let mut v = 0.0;
                self.for_col(col, |r, a| v += row[r] * a);
                if v.abs() > 1e-7 {
                    pick = Some(col);
                    break;
                }
            }
            if let Some(q) = pick {
                let u = self.ftran(q);
                self.xb[p] = 0.0;
                self.pivot(p, q, &u);
            }
        }
    }

    fn primal(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.nstruct];
        for (&col, &v) in self.basis.iter().zip(&self.xb) {
            if let ColKind::Structural(j) = self.kinds[col] {
                x[j] = v.max(0.0);
            }
        }
        x
    }
}

pub(crate) fn solve_standard(form: &StandardForm<'_>, opts: SolverOptions) -> Result<RawOutcome> {
    let mut s = Simplex::new(form, opts);
    let has_eq = form.sense.iter().any(|&k| k == Sense::Eq);
    if has_eq {
        if !s.run(true)? {
            return Ok(RawOutcome::IterationLimit { iterations: s.iterations, feasible: None });
        }
        s.refactor();
        if s.phase_one_objective() > opts.tol {
            return Err(Error::Infeasible);
        }
        s.drive_out_artificials();
        s.refactor();
    }
    if !s.run(false)? {
        return Ok(RawOutcome::IterationLimit { iterations: s.iterations, feasible: Some(s.primal()) });
    }
    s.refactor();
    let pi = s.duals(false);
    let duals = pi
        .iter()
        .zip(&s.row_scale)
        .map(|(p, rs)| p * rs / s.obj_scale)
        .collect();
    Ok(RawOutcome::Optimal(RawSolution { x: s.primal(), duals, iterations: s.iterations }))
}
