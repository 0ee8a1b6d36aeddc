//! Self-contained linear-program model and solver with lazy-constraint
//! (cutting-plane) support.
//!
//! The solver is a dense-tableau primal simplex over bounded variables:
//! box constraints live on the variables, every row gets one slack, and a
//! composite phase 1 drives the slack basis feasible without artificial
//! columns. Entering variables are priced steepest-edge style
//! (reduced cost normalized by tableau column norm); after `5 * (rows + vars)`
//! consecutive degenerate pivots the rule falls back to Bland's rule.
//! Identical input yields identical pivots and output.

use std::collections::HashSet;
use std::fmt::Write as _;

use thiserror::Error;

/// Feasibility tolerance quoted by every downstream module.
pub const TAU: f64 = 1e-7;

/// Tolerance on reduced costs when deciding optimality.
const DUAL_TOL: f64 = 1e-9;
/// Smallest acceptable pivot magnitude.
const PIVOT_TOL: f64 = 1e-9;

const ITER_CAP: usize = 400_000;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("LP dimensions exceed cap: {vars} vars + {rows} rows > {cap} (set COMMSCHED_LP_CAP to raise)")]
    DimensionExceeded { vars: usize, rows: usize, cap: usize },
    #[error("dense tableau would need {entries} entries (cap {cap})")]
    TableauTooLarge { entries: usize, cap: usize },
    #[error("row {row} references undeclared variable {var}")]
    BadCoefficient { row: usize, var: usize },
    #[error("simplex iteration limit reached ({0} pivots)")]
    IterationLimit(usize),
    #[error("separator returned a row already present in the program: {0}")]
    SeparatorStalled(String),
    #[error("cutting-plane loop exceeded {0} rounds")]
    TooManyCutRounds(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct Variable {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
    /// Objective identically zero; phase 1 alone decides the outcome.
    Feasibility,
}

#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub vars: Vec<Variable>,
    pub rows: Vec<Row>,
    pub objective: Vec<(usize, f64)>,
    pub direction: Direction,
}

impl LinearProgram {
    pub fn new() -> Self {
        LinearProgram {
            vars: Vec::new(),
            rows: Vec::new(),
            objective: Vec::new(),
            direction: Direction::Feasibility,
        }
    }

    pub fn add_var(&mut self, name: impl Into<String>, lb: f64, ub: f64) -> usize {
        self.vars.push(Variable { name: name.into(), lb, ub });
        self.vars.len() - 1
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        self.rows.push(Row { name: name.into(), coeffs, sense, rhs });
        self.rows.len() - 1
    }

    pub fn set_objective(&mut self, direction: Direction, coeffs: Vec<(usize, f64)>) {
        self.direction = direction;
        self.objective = coeffs;
    }

    fn validate(&self) -> Result<(), LpError> {
        for (ri, row) in self.rows.iter().enumerate() {
            for &(v, _) in &row.coeffs {
                if v >= self.vars.len() {
                    return Err(LpError::BadCoefficient { row: ri, var: v });
                }
            }
        }
        for &(v, _) in &self.objective {
            if v >= self.vars.len() {
                return Err(LpError::BadCoefficient { row: usize::MAX, var: v });
            }
        }
        let cap = dimension_cap();
        if self.vars.len() + self.rows.len() > cap {
            return Err(LpError::DimensionExceeded {
                vars: self.vars.len(),
                rows: self.rows.len(),
                cap,
            });
        }
        let entries = self.rows.len() * (self.vars.len() + self.rows.len());
        const ENTRY_CAP: usize = 60_000_000;
        if entries > ENTRY_CAP {
            return Err(LpError::TableauTooLarge { entries, cap: ENTRY_CAP });
        }
        Ok(())
    }

    /// Residual of the most violated row/bound at `point` (0 when feasible).
    pub fn max_violation(&self, point: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for (j, var) in self.vars.iter().enumerate() {
            worst = worst.max(var.lb - point[j]).max(point[j] - var.ub);
        }
        for row in &self.rows {
            let lhs: f64 = row.coeffs.iter().map(|&(v, a)| a * point[v]).sum();
            let viol = match row.sense {
                Sense::Le => lhs - row.rhs,
                Sense::Ge => row.rhs - lhs,
                Sense::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    pub fn is_feasible(&self, point: &[f64]) -> bool {
        self.max_violation(point) <= TAU
    }

    pub fn objective_value(&self, point: &[f64]) -> f64 {
        match self.direction {
            Direction::Feasibility => 0.0,
            _ => self.objective.iter().map(|&(v, c)| c * point[v]).sum(),
        }
    }
}

impl Default for LinearProgram {
    fn default() -> Self {
        Self::new()
    }
}

fn dimension_cap() -> usize {
    std::env::var("COMMSCHED_LP_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(200_000)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpOutcome {
    pub status: LpStatus,
    /// One value per declared variable (zeros unless status is Optimal).
    pub values: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
    /// Reduced costs satisfied the optimality sign conditions at termination.
    pub dual_feasible: bool,
    /// Rows added by the cutting-plane loop (zero for plain solves).
    pub cuts_added: usize,
    pub cut_rounds: usize,
}

/// Solves the linear program to `TAU` accuracy.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome, LpError> {
    lp.validate()?;
    Simplex::build(lp).run(lp)
}

/// Solve with a warm-start candidate: for feasibility programs a feasible
/// candidate is returned directly; otherwise the solve proceeds normally.
pub fn solve_lp_from(lp: &LinearProgram, start: &[f64]) -> Result<LpOutcome, LpError> {
    if lp.direction == Direction::Feasibility
        && start.len() == lp.vars.len()
        && lp.is_feasible(start)
    {
        return Ok(LpOutcome {
            status: LpStatus::Optimal,
            values: start.to_vec(),
            objective: 0.0,
            pivots: 0,
            dual_feasible: true,
            cuts_added: 0,
            cut_rounds: 0,
        });
    }
    solve_lp(lp)
}

/// Cutting-plane driver: solve, ask the separator for violated rows, append
/// and repeat until the separator is silent. The separator must only return
/// rows not already present; a duplicate is a progress violation.
pub fn solve_with_lazy_cuts(
    lp: &LinearProgram,
    mut separator: impl FnMut(&[f64]) -> Vec<Row>,
) -> Result<LpOutcome, LpError> {
    const MAX_ROUNDS: usize = 500;
    let mut work = lp.clone();
    let mut seen: HashSet<String> = work.rows.iter().map(row_key).collect();
    let mut cuts_added = 0usize;
    for round in 0..MAX_ROUNDS {
        let mut outcome = solve_lp(&work)?;
        if outcome.status != LpStatus::Optimal {
            outcome.cuts_added = cuts_added;
            outcome.cut_rounds = round;
            return Ok(outcome);
        }
        let new_rows = separator(&outcome.values);
        if new_rows.is_empty() {
            outcome.cuts_added = cuts_added;
            outcome.cut_rounds = round;
            return Ok(outcome);
        }
        for row in new_rows {
            let key = row_key(&row);
            if !seen.insert(key) {
                return Err(LpError::SeparatorStalled(row.name));
            }
            cuts_added += 1;
            work.rows.push(row);
        }
        work.validate()?;
    }
    Err(LpError::TooManyCutRounds(MAX_ROUNDS))
}

fn row_key(row: &Row) -> String {
    let mut coeffs = row.coeffs.clone();
    coeffs.sort_unstable_by_key(|&(v, _)| v);
    let mut key = String::new();
    for (v, a) in coeffs {
        if a != 0.0 {
            let _ = write!(key, "{v}:{};", a.to_bits());
        }
    }
    let _ = write!(key, "{:?}:{}", row.sense, row.rhs.to_bits());
    key
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic,
    AtLower,
    AtUpper,
    Free,
}

struct Simplex {
    m: usize,
    /// total columns: structural vars then one slack per row
    n: usize,
    ns: usize,
    /// row-major m x n: current B^{-1} A
    t: Vec<f64>,
    xb: Vec<f64>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    scratch: Vec<f64>,
    pivots: usize,
    degenerate_run: usize,
    bland: bool,
    bland_threshold: usize,
}

impl Simplex {
    fn build(lp: &LinearProgram) -> Self {
        let ns = lp.vars.len();
        let m = lp.rows.len();
        let n = ns + m;
        let mut lb = Vec::with_capacity(n);
        let mut ub = Vec::with_capacity(n);
        for v in &lp.vars {
            lb.push(v.lb);
            ub.push(v.ub);
        }
        for row in &lp.rows {
            match row.sense {
                Sense::Le => {
                    lb.push(0.0);
                    ub.push(f64::INFINITY);
                }
                Sense::Ge => {
                    lb.push(f64::NEG_INFINITY);
                    ub.push(0.0);
                }
                Sense::Eq => {
                    lb.push(0.0);
                    ub.push(0.0);
                }
            }
        }
        let mut t = vec![0.0; m * n];
        for (i, row) in lp.rows.iter().enumerate() {
            for &(v, a) in &row.coeffs {
                t[i * n + v] += a;
            }
            t[i * n + ns + i] = 1.0;
        }
        let mut state = Vec::with_capacity(n);
        for j in 0..ns {
            state.push(if lb[j].is_finite() {
                VarState::AtLower
            } else if ub[j].is_finite() {
                VarState::AtUpper
            } else {
                VarState::Free
            });
        }
        for _ in 0..m {
            state.push(VarState::Basic);
        }
        let mut cost = vec![0.0; n];
        let sign = match lp.direction {
            Direction::Minimize => 1.0,
            Direction::Maximize => -1.0,
            Direction::Feasibility => 0.0,
        };
        for &(v, c) in &lp.objective {
            cost[v] += sign * c;
        }
        let mut simplex = Simplex {
            m,
            n,
            ns,
            t,
            xb: vec![0.0; m],
            basis: (ns..n).collect(),
            state,
            lb,
            ub,
            cost,
            scratch: vec![0.0; n],
            pivots: 0,
            degenerate_run: 0,
            bland: false,
            bland_threshold: 5 * (m + n),
        };
        for i in 0..m {
            let mut v = lp.rows[i].rhs;
            for &(var, a) in &lp.rows[i].coeffs {
                if simplex.state[var] != VarState::Basic {
                    v -= a * simplex.nb_value(var);
                }
            }
            simplex.xb[i] = v;
        }
        simplex
    }

    fn nb_value(&self, j: usize) -> f64 {
        match self.state[j] {
            VarState::AtLower => self.lb[j],
            VarState::AtUpper => self.ub[j],
            VarState::Free => 0.0,
            VarState::Basic => unreachable!("basic variable has no bound value"),
        }
    }

    fn col(&self, i: usize, j: usize) -> f64 {
        self.t[i * self.n + j]
    }

    fn bound_tol(b: f64) -> f64 {
        if b.is_finite() {
            TAU * (1.0 + b.abs())
        } else {
            TAU
        }
    }

    /// Sum of bound violations over basic variables.
    fn infeasibility(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.m {
            let j = self.basis[i];
            let x = self.xb[i];
            if x < self.lb[j] {
                total += self.lb[j] - x;
            } else if x > self.ub[j] {
                total += x - self.ub[j];
            }
        }
        total
    }

    /// Phase-1 gradient costs: +1 above the upper bound, -1 below the lower.
    fn phase1_costs(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.m];
        for i in 0..self.m {
            let j = self.basis[i];
            let x = self.xb[i];
            if x < self.lb[j] - Self::bound_tol(self.lb[j]) {
                c[i] = -1.0;
            } else if x > self.ub[j] + Self::bound_tol(self.ub[j]) {
                c[i] = 1.0;
            }
        }
        c
    }

    /// d_j = c_j - sum_i cB_i * T[i][j] over nonbasic columns.
    fn reduced_costs(&self, basic_cost: &[f64], nb_cost: impl Fn(usize) -> f64) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (j, dj) in d.iter_mut().enumerate() {
            if self.state[j] != VarState::Basic {
                *dj = nb_cost(j);
            }
        }
        for i in 0..self.m {
            let cb = basic_cost[i];
            if cb == 0.0 {
                continue;
            }
            let row = &self.t[i * self.n..(i + 1) * self.n];
            for (j, dj) in d.iter_mut().enumerate() {
                if self.state[j] != VarState::Basic {
                    *dj -= cb * row[j];
                }
            }
        }
        d
    }

    /// Entering choice; `dir` is +1 when the variable increases from its
    /// bound and -1 when it decreases.
    fn choose_entering(&self, d: &[f64]) -> Option<(usize, f64)> {
        let eligible = |j: usize| -> Option<f64> {
            match self.state[j] {
                VarState::AtLower if d[j] < -DUAL_TOL => Some(1.0),
                VarState::AtUpper if d[j] > DUAL_TOL => Some(-1.0),
                VarState::Free if d[j].abs() > DUAL_TOL => {
                    Some(if d[j] < 0.0 { 1.0 } else { -1.0 })
                }
                _ => None,
            }
        };
        if self.bland {
            return (0..self.n).find_map(|j| eligible(j).map(|dir| (j, dir)));
        }
        let mut best: Option<(usize, f64, f64)> = None;
        for j in 0..self.n {
            let Some(dir) = eligible(j) else { continue };
            let mut norm = 1.0;
            for i in 0..self.m {
                let a = self.col(i, j);
                norm += a * a;
            }
            let score = d[j] * d[j] / norm;
            if best.map_or(true, |(_, _, s)| score > s + 1e-15) {
                best = Some((j, dir, score));
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    /// Bounded-variable ratio test. In phase 1 an infeasible basic variable
    /// blocks at the bound that restores its feasibility, and a basic already
    /// beyond its bound in the worsening direction never blocks (the phase-1
    /// gradient already charges it). Returns `None` for an unbounded
    /// direction, `Some((step, None))` for a bound flip of the entering
    /// variable, `Some((step, Some((row, bound))))` for a pivot where the
    /// leaving variable parks at `bound`.
    fn ratio_test(
        &self,
        q: usize,
        dir: f64,
        phase1: bool,
    ) -> Option<(f64, Option<(usize, VarState)>)> {
        let mut best_step = if self.lb[q].is_finite() && self.ub[q].is_finite() {
            self.ub[q] - self.lb[q]
        } else {
            f64::INFINITY
        };
        let mut best_row: Option<(usize, VarState)> = None;
        for i in 0..self.m {
            let a = self.col(i, q);
            let delta = -dir * a;
            if delta.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basis[i];
            let x = self.xb[i];
            let lo = self.lb[j];
            let hi = self.ub[j];
            let below = phase1 && x < lo - Self::bound_tol(lo);
            let above = phase1 && x > hi + Self::bound_tol(hi);
            let (step, hit) = if delta > 0.0 {
                if below {
                    ((lo - x) / delta, VarState::AtLower)
                } else if above {
                    continue; // moving further above: no kink ahead
                } else if hi.is_finite() {
                    ((hi - x).max(0.0) / delta, VarState::AtUpper)
                } else {
                    continue;
                }
            } else if above {
                ((hi - x) / delta, VarState::AtUpper)
            } else if below {
                continue; // moving further below: no kink ahead
            } else if lo.is_finite() {
                ((lo - x).min(0.0) / delta, VarState::AtLower)
            } else {
                continue;
            };
            let step = step.max(0.0);
            let better = match best_row {
                _ if step < best_step - 1e-12 => true,
                Some((r, _)) if step < best_step + 1e-12 => a.abs() > self.col(r, q).abs(),
                None if step < best_step + 1e-12 && best_step.is_finite() => {
                    // tie with the entering variable's own bound flip:
                    // prefer the pivot so the basis makes progress
                    true
                }
                _ => false,
            };
            if better {
                best_step = best_step.min(step);
                best_row = Some((i, hit));
            }
        }
        if best_step.is_infinite() {
            return None;
        }
        Some((best_step, best_row))
    }

    fn apply_flip(&mut self, q: usize, dir: f64, step: f64) {
        for i in 0..self.m {
            let a = self.col(i, q);
            if a != 0.0 {
                self.xb[i] += -dir * a * step;
            }
        }
        self.state[q] = match self.state[q] {
            VarState::AtLower => VarState::AtUpper,
            VarState::AtUpper => VarState::AtLower,
            other => other,
        };
        self.pivots += 1;
    }

    fn apply_pivot(&mut self, r: usize, q: usize, dir: f64, step: f64, leave_at: VarState) {
        let n = self.n;
        let entering_value = match self.state[q] {
            VarState::Free => dir * step,
            _ => self.nb_value(q) + dir * step,
        };
        let leaving = self.basis[r];
        let leave_state = match leave_at {
            VarState::AtUpper if self.ub[leaving].is_finite() => VarState::AtUpper,
            VarState::AtLower if self.lb[leaving].is_finite() => VarState::AtLower,
            _ => VarState::Free,
        };
        debug_assert!(
            leave_state != VarState::Free
                || (!self.lb[leaving].is_finite() && !self.ub[leaving].is_finite()),
            "leaving variable must park on a finite bound"
        );
        // update basic values
        for i in 0..self.m {
            if i != r {
                let a = self.col(i, q);
                if a != 0.0 {
                    self.xb[i] += -dir * a * step;
                }
            }
        }
        // eliminate column q from all rows but r
        let piv = self.t[r * n + q];
        let inv = 1.0 / piv;
        self.scratch.copy_from_slice(&self.t[r * n..(r + 1) * n]);
        for v in &mut self.scratch {
            *v *= inv;
        }
        self.t[r * n..(r + 1) * n].copy_from_slice(&self.scratch);
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let factor = self.t[i * n + q];
            if factor == 0.0 {
                continue;
            }
            let row = &mut self.t[i * n..(i + 1) * n];
            for (k, v) in row.iter_mut().enumerate() {
                *v -= factor * self.scratch[k];
            }
            // clean residue on the pivot column
            row[q] = 0.0;
        }
        self.state[leaving] = leave_state;
        self.state[q] = VarState::Basic;
        self.basis[r] = q;
        self.xb[r] = entering_value;
        self.pivots += 1;
        if step.abs() <= 1e-11 {
            self.degenerate_run += 1;
            if self.degenerate_run > self.bland_threshold {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
        }
    }

    fn run(mut self, lp: &LinearProgram) -> Result<LpOutcome, LpError> {
        for j in 0..self.n {
            if self.lb[j] > self.ub[j] {
                return Ok(self.finish(lp, LpStatus::Infeasible));
            }
        }
        // phase 1: drive basic variables inside their bounds
        loop {
            if self.pivots > ITER_CAP {
                return Err(LpError::IterationLimit(self.pivots));
            }
            if self.infeasibility() <= TAU {
                break;
            }
            let c1 = self.phase1_costs();
            let d = self.reduced_costs(&c1, |_| 0.0);
            match self.choose_entering(&d) {
                None => return Ok(self.finish(lp, LpStatus::Infeasible)),
                Some((q, dir)) => match self.ratio_test(q, dir, true) {
                    None => return Ok(self.finish(lp, LpStatus::Infeasible)),
                    Some((step, None)) => self.apply_flip(q, dir, step),
                    Some((step, Some((r, hit)))) => self.apply_pivot(r, q, dir, step, hit),
                },
            }
        }
        self.bland = false;
        self.degenerate_run = 0;
        if lp.direction == Direction::Feasibility {
            return Ok(self.finish(lp, LpStatus::Optimal));
        }
        // phase 2
        loop {
            if self.pivots > ITER_CAP {
                return Err(LpError::IterationLimit(self.pivots));
            }
            let cb: Vec<f64> = (0..self.m).map(|i| self.cost[self.basis[i]]).collect();
            let d = self.reduced_costs(&cb, |j| self.cost[j]);
            match self.choose_entering(&d) {
                None => return Ok(self.finish(lp, LpStatus::Optimal)),
                Some((q, dir)) => match self.ratio_test(q, dir, false) {
                    None => return Ok(self.finish(lp, LpStatus::Unbounded)),
                    Some((step, None)) => self.apply_flip(q, dir, step),
                    Some((step, Some((r, hit)))) => self.apply_pivot(r, q, dir, step, hit),
                },
            }
        }
    }

    fn finish(self, lp: &LinearProgram, status: LpStatus) -> LpOutcome {
        let mut values = vec![0.0; self.ns];
        if status == LpStatus::Optimal {
            for j in 0..self.ns {
                if self.state[j] != VarState::Basic {
                    values[j] = self.nb_value(j);
                }
            }
            for i in 0..self.m {
                let j = self.basis[i];
                if j < self.ns {
                    values[j] = self.xb[i];
                }
            }
        }
        let mut dual_feasible = false;
        if status == LpStatus::Optimal {
            let cb: Vec<f64> = (0..self.m).map(|i| self.cost[self.basis[i]]).collect();
            let d = self.reduced_costs(&cb, |j| self.cost[j]);
            dual_feasible = (0..self.n).all(|j| match self.state[j] {
                VarState::AtLower => d[j] >= -1e-6,
                VarState::AtUpper => d[j] <= 1e-6,
                VarState::Free => d[j].abs() <= 1e-6,
                VarState::Basic => true,
            });
        }
        let objective = match status {
            LpStatus::Optimal => lp.objective_value(&values),
            _ => 0.0,
        };
        LpOutcome {
            status,
            values,
            objective,
            pivots: self.pivots,
            dual_feasible,
            cuts_added: 0,
            cut_rounds: 0,
        }
    }
}

/// Writes the program in CPLEX-LP text format (see README for the grammar).
pub fn write_lp_text(lp: &LinearProgram, out: &mut impl std::io::Write) -> std::io::Result<()> {
    let header = match lp.direction {
        Direction::Maximize => "Maximize",
        _ => "Minimize",
    };
    writeln!(out, "\\ {} vars, {} rows", lp.vars.len(), lp.rows.len())?;
    writeln!(out, "{header}")?;
    let mut obj = String::from(" obj:");
    if lp.objective.is_empty() || lp.direction == Direction::Feasibility {
        obj.push_str(" 0");
        if let Some(v) = lp.vars.first() {
            let _ = write!(obj, " {}", v.name);
        }
    } else {
        for &(v, c) in &lp.objective {
            let _ = write!(obj, " {} {}", fmt_signed(c), lp.vars[v].name);
        }
    }
    writeln!(out, "{obj}")?;
    writeln!(out, "Subject To")?;
    for (i, row) in lp.rows.iter().enumerate() {
        let mut line = format!(" {}:", sanitize(&row.name, i));
        for &(v, c) in &row.coeffs {
            let _ = write!(line, " {} {}", fmt_signed(c), lp.vars[v].name);
        }
        let op = match row.sense {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        };
        let _ = write!(line, " {op} {}", row.rhs);
        writeln!(out, "{line}")?;
    }
    writeln!(out, "Bounds")?;
    for var in &lp.vars {
        match (var.lb.is_finite(), var.ub.is_finite()) {
            (true, true) => writeln!(out, " {} <= {} <= {}", var.lb, var.name, var.ub)?,
            (true, false) => writeln!(out, " {} >= {}", var.name, var.lb)?,
            (false, true) => writeln!(out, " {} <= {}", var.name, var.ub)?,
            (false, false) => writeln!(out, " {} free", var.name)?,
        }
    }
    writeln!(out, "End")
}

fn fmt_signed(c: f64) -> String {
    if c < 0.0 {
        format!("- {}", -c)
    } else {
        format!("+ {c}")
    }
}

fn sanitize(name: &str, idx: usize) -> String {
    if name.is_empty() {
        format!("r{idx}")
    } else {
        name.replace(' ', "_")
    }
}
