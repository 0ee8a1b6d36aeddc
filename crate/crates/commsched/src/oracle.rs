//! Exact brute-force solvers providing ground truth at tiny sizes, plus an
//! exact rational-arithmetic simplex used by tests as the numeric oracle for
//! the floating-point solver.
//!
//! All searches are deterministic. `verified_*` variants run a second search
//! with reversed branching order and insist the values agree before a
//! constant is frozen into a test.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::instance::{Instance, IntervalSchedule, TimedSchedule};
use crate::lpsolve::{Direction, LinearProgram, LpStatus, Sense};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance too large for the {what} oracle: {detail}")]
    TooLarge { what: &'static str, detail: String },
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },
    #[error("exact simplex supports at most {cap} variables, got {got}")]
    ExactLpTooLarge { cap: usize, got: usize },
    #[error("exact simplex found no optimum within {0} pivots")]
    ExactPivotLimit(usize),
}

#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_nodes: u64,
    pub max_millis: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: 20_000_000,
            max_millis: 120_000,
        }
    }
}

// ---------------------------------------------------------------------------
// exact rational simplex
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct ExactOutcome {
    pub status: LpStatus,
    pub values: Vec<BigRational>,
    pub objective: BigRational,
}

const EXACT_VAR_CAP: usize = 50;
const EXACT_PIVOT_CAP: usize = 20_000;

fn big(f: f64) -> BigRational {
    BigRational::from_float(f).expect("finite LP datum")
}

/// Variable transform onto the nonnegative orthant.
enum Map {
    /// x = lb + x[col]
    Shift(usize, BigRational),
    /// x = ub - x[col]
    Flip(usize, BigRational),
    /// x = x[col] - x[col + 1]
    Split(usize),
}

/// Solves the program in exact rational arithmetic (Bland's rule, two-phase
/// with artificial columns). Intended for tiny LPs only.
pub fn solve_lp_exact(lp: &LinearProgram) -> Result<ExactOutcome, OracleError> {
    if lp.vars.len() > EXACT_VAR_CAP {
        return Err(OracleError::ExactLpTooLarge {
            cap: EXACT_VAR_CAP,
            got: lp.vars.len(),
        });
    }

    let infeasible = || ExactOutcome {
        status: LpStatus::Infeasible,
        values: Vec::new(),
        objective: BigRational::zero(),
    };

    let mut maps = Vec::new();
    let mut ncols = 0usize;
    let mut upper_rows: Vec<(usize, BigRational)> = Vec::new();
    for v in &lp.vars {
        match (v.lb.is_finite(), v.ub.is_finite()) {
            (true, true) => {
                let lb = big(v.lb);
                let width = big(v.ub) - &lb;
                if width < BigRational::zero() {
                    return Ok(infeasible());
                }
                upper_rows.push((ncols, width));
                maps.push(Map::Shift(ncols, lb));
                ncols += 1;
            }
            (true, false) => {
                maps.push(Map::Shift(ncols, big(v.lb)));
                ncols += 1;
            }
            (false, true) => {
                maps.push(Map::Flip(ncols, big(v.ub)));
                ncols += 1;
            }
            (false, false) => {
                maps.push(Map::Split(ncols));
                ncols += 2;
            }
        }
    }

    struct EqRow {
        coeffs: Vec<BigRational>,
        rhs: BigRational,
        slack: Option<bool>, // Some(true) for <=, Some(false) for >=
    }
    let mut eq_rows: Vec<EqRow> = Vec::new();
    for row in &lp.rows {
        let mut coeffs = vec![BigRational::zero(); ncols];
        let mut rhs = big(row.rhs);
        for &(v, a) in &row.coeffs {
            let a = big(a);
            match &maps[v] {
                Map::Shift(c, lb) => {
                    rhs -= &a * lb;
                    coeffs[*c] += &a;
                }
                Map::Flip(c, ub) => {
                    rhs -= &a * ub;
                    coeffs[*c] -= &a;
                }
                Map::Split(c) => {
                    coeffs[*c] += &a;
                    coeffs[*c + 1] -= &a;
                }
            }
        }
        let slack = match row.sense {
            Sense::Le => Some(true),
            Sense::Ge => Some(false),
            Sense::Eq => None,
        };
        eq_rows.push(EqRow { coeffs, rhs, slack });
    }
    for (c, width) in upper_rows {
        let mut coeffs = vec![BigRational::zero(); ncols];
        coeffs[c] = BigRational::one();
        eq_rows.push(EqRow { coeffs, rhs: width, slack: Some(true) });
    }

    let sign = match lp.direction {
        Direction::Minimize => BigRational::one(),
        Direction::Maximize => -BigRational::one(),
        Direction::Feasibility => BigRational::zero(),
    };
    let mut cost = vec![BigRational::zero(); ncols];
    let mut obj_const = BigRational::zero();
    for &(v, c) in &lp.objective {
        let c = &sign * big(c);
        match &maps[v] {
            Map::Shift(cc, lb) => {
                obj_const += &c * lb;
                cost[*cc] += &c;
            }
            Map::Flip(cc, ub) => {
                obj_const += &c * ub;
                cost[*cc] -= &c;
            }
            Map::Split(cc) => {
                cost[*cc] += &c;
                cost[*cc + 1] -= &c;
            }
        }
    }

    // tableau: real columns, slacks, artificials, rhs; rhs made nonnegative
    let m = eq_rows.len();
    let nslack = eq_rows.iter().filter(|r| r.slack.is_some()).count();
    let ntot = ncols + nslack + m;
    let mut t = vec![vec![BigRational::zero(); ntot + 1]; m];
    let mut slack_idx = ncols;
    for (i, row) in eq_rows.iter().enumerate() {
        let flip = row.rhs < BigRational::zero();
        let s = if flip { -BigRational::one() } else { BigRational::one() };
        for (j, a) in row.coeffs.iter().enumerate() {
            if !a.is_zero() {
                t[i][j] = &s * a;
            }
        }
        if let Some(le) = row.slack {
            t[i][slack_idx] = if le { s.clone() } else { -s.clone() };
            slack_idx += 1;
        }
        t[i][ncols + nslack + i] = BigRational::one();
        t[i][ntot] = if flip { -row.rhs.clone() } else { row.rhs.clone() };
    }
    let mut basis: Vec<usize> = (0..m).map(|i| ncols + nslack + i).collect();

    fn pivot(t: &mut [Vec<BigRational>], basis: &mut [usize], r: usize, q: usize) {
        let inv = t[r][q].clone();
        for v in t[r].iter_mut() {
            if !v.is_zero() {
                *v /= &inv;
            }
        }
        let pivot_row = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i == r || row[q].is_zero() {
                continue;
            }
            let f = row[q].clone();
            for (vi, vr) in row.iter_mut().zip(pivot_row.iter()) {
                if !vr.is_zero() {
                    *vi -= &f * vr;
                }
            }
        }
        basis[r] = q;
    }

    // Bland simplex minimizing `c` over the first `active` columns.
    // Returns false when unbounded.
    fn run(
        t: &mut [Vec<BigRational>],
        basis: &mut [usize],
        c: &[BigRational],
        active: usize,
    ) -> Result<bool, OracleError> {
        let rhs_col = t.first().map_or(0, |r| r.len() - 1);
        let mut pivots = 0usize;
        loop {
            pivots += 1;
            if pivots > EXACT_PIVOT_CAP {
                return Err(OracleError::ExactPivotLimit(EXACT_PIVOT_CAP));
            }
            let mut entering = None;
            for j in 0..active {
                if basis.contains(&j) {
                    continue;
                }
                let mut d = c.get(j).cloned().unwrap_or_else(BigRational::zero);
                for (i, &bj) in basis.iter().enumerate() {
                    let cb = c.get(bj).cloned().unwrap_or_else(BigRational::zero);
                    if !cb.is_zero() && !t[i][j].is_zero() {
                        d -= &cb * &t[i][j];
                    }
                }
                if d < BigRational::zero() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(q) = entering else { return Ok(true) };
            let mut leave: Option<usize> = None;
            let mut best: Option<BigRational> = None;
            for i in 0..t.len() {
                if t[i][q] > BigRational::zero() {
                    let ratio = &t[i][rhs_col] / &t[i][q];
                    let better = match (&best, leave) {
                        (None, _) => true,
                        (Some(b), Some(l)) => &ratio < b || (&ratio == b && basis[i] < basis[l]),
                        _ => unreachable!(),
                    };
                    if better {
                        best = Some(ratio);
                        leave = Some(i);
                    }
                }
            }
            let Some(r) = leave else { return Ok(false) };
            pivot(t, basis, r, q);
        }
    }

    // phase 1
    let mut c1 = vec![BigRational::zero(); ntot];
    for item in c1.iter_mut().take(ntot).skip(ncols + nslack) {
        *item = BigRational::one();
    }
    run(&mut t, &mut basis, &c1, ntot)?;
    let mut infeas = BigRational::zero();
    for (i, &bj) in basis.iter().enumerate() {
        if bj >= ncols + nslack {
            infeas += &t[i][ntot];
        }
    }
    if !infeas.is_zero() {
        return Ok(infeasible());
    }
    // pivot basic artificials out where possible, else drop redundant rows
    let mut drop_rows = Vec::new();
    for i in 0..t.len() {
        if basis[i] >= ncols + nslack {
            match (0..ncols + nslack).find(|&j| !t[i][j].is_zero()) {
                Some(q) => pivot(&mut t, &mut basis, i, q),
                None => drop_rows.push(i),
            }
        }
    }
    for &i in drop_rows.iter().rev() {
        t.remove(i);
        basis.remove(i);
    }

    // phase 2 restricted to real + slack columns
    let mut c2 = vec![BigRational::zero(); ntot];
    c2[..ncols].clone_from_slice(&cost);
    let bounded = run(&mut t, &mut basis, &c2, ncols + nslack)?;
    if !bounded {
        return Ok(ExactOutcome {
            status: LpStatus::Unbounded,
            values: Vec::new(),
            objective: BigRational::zero(),
        });
    }

    let rhs_col = ntot;
    let mut shifted = vec![BigRational::zero(); ncols];
    for (i, &bj) in basis.iter().enumerate() {
        if bj < ncols {
            shifted[bj] = t[i][rhs_col].clone();
        }
    }
    let mut values = Vec::with_capacity(lp.vars.len());
    for map in &maps {
        let v = match map {
            Map::Shift(c, lb) => lb + &shifted[*c],
            Map::Flip(c, ub) => ub - &shifted[*c],
            Map::Split(c) => &shifted[*c] - &shifted[*c + 1],
        };
        values.push(v);
    }
    let mut objective = obj_const;
    for (j, c) in cost.iter().enumerate() {
        if !c.is_zero() {
            objective += c * &shifted[j];
        }
    }
    if lp.direction == Direction::Maximize {
        objective = -objective;
    }
    Ok(ExactOutcome {
        status: LpStatus::Optimal,
        values,
        objective,
    })
}

// ---------------------------------------------------------------------------
// exact interval scheduling
// ---------------------------------------------------------------------------

struct IntervalSearch<'a> {
    inst: &'a Instance,
    m: usize,
    s_cap: u32,
    order: Vec<u32>,
    /// position of each job in `order`
    pos: Vec<usize>,
    nodes: u64,
    budget: SearchBudget,
    collect: Option<Vec<IntervalSchedule>>,
    collect_cap: usize,
    assign: Vec<(u32, u32)>,
    loads: BTreeMap<(u32, u32), i64>,
    found: Option<IntervalSchedule>,
}

impl<'a> IntervalSearch<'a> {
    fn new(
        inst: &'a Instance,
        m: usize,
        s_cap: u32,
        budget: SearchBudget,
        collect: Option<usize>,
    ) -> Self {
        let order = inst.topo_order().to_vec();
        let mut pos = vec![0usize; inst.n()];
        for (d, &j) in order.iter().enumerate() {
            pos[j as usize] = d;
        }
        IntervalSearch {
            inst,
            m,
            s_cap,
            order,
            pos,
            nodes: 0,
            budget,
            collect_cap: collect.unwrap_or(0),
            collect: collect.map(|_| Vec::new()),
            assign: vec![(0, 0); inst.n()],
            loads: BTreeMap::new(),
            found: None,
        }
    }

    fn dfs(&mut self, depth: usize) -> Result<bool, OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(OracleError::BudgetExhausted { nodes: self.nodes });
        }
        if depth == self.order.len() {
            let schedule = IntervalSchedule {
                assign: self
                    .order
                    .iter()
                    .enumerate()
                    .map(|(d, &j)| (j, self.assign[d]))
                    .collect(),
            };
            match &mut self.collect {
                Some(list) => {
                    list.push(schedule);
                    return Ok(list.len() >= self.collect_cap);
                }
                None => {
                    self.found = Some(schedule);
                    return Ok(true);
                }
            }
        }
        let j = self.order[depth];
        let p = self.inst.job(j).p;
        let mut min_s = 0u32;
        for &q in self.inst.preds(j) {
            min_s = min_s.max(self.assign[self.pos[q as usize]].0);
        }
        for s in min_s..self.s_cap {
            let used: Vec<u32> = self
                .loads
                .range((s, 0)..(s, u32::MAX))
                .map(|(&(_, i), _)| i)
                .collect();
            let mut candidates = used.clone();
            if used.len() < self.m {
                candidates.push(used.last().map_or(1, |&i| i + 1));
            }
            'mach: for &i in &candidates {
                let load = self.loads.get(&(s, i)).copied().unwrap_or(0);
                if load + p > self.inst.c() {
                    continue;
                }
                for &q in self.inst.preds(j) {
                    let (sq, iq) = self.assign[self.pos[q as usize]];
                    if !(sq < s || (sq, iq) == (s, i)) {
                        continue 'mach;
                    }
                }
                self.assign[depth] = (s, i);
                *self.loads.entry((s, i)).or_insert(0) += p;
                let done = self.dfs(depth + 1)?;
                let entry = self.loads.get_mut(&(s, i)).unwrap();
                *entry -= p;
                if *entry == 0 {
                    self.loads.remove(&(s, i));
                }
                if done {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// Minimal number of length-c intervals admitting a feasible interval
/// schedule, with a certificate. Unit jobs, n <= 10.
pub fn exact_min_intervals(
    inst: &Instance,
    m: usize,
    budget: SearchBudget,
) -> Result<(u32, Option<IntervalSchedule>), OracleError> {
    if inst.n() > 10 {
        return Err(OracleError::TooLarge {
            what: "interval",
            detail: format!("n = {} > 10", inst.n()),
        });
    }
    if inst.n() == 0 {
        return Ok((0, None));
    }
    let lower = {
        let cap = (m as i64) * inst.c();
        ((inst.total_work() + cap - 1) / cap).max(1) as u32
    };
    for s_cap in lower..=inst.n() as u32 {
        let mut search = IntervalSearch::new(inst, m, s_cap, budget, None);
        if search.dfs(0)? {
            return Ok((s_cap, search.found));
        }
    }
    unreachable!("one job per interval is always feasible")
}

/// Enumerates feasible interval schedules using up to `s_cap` intervals,
/// capped at `cap` many. Machine labels are canonical (fresh machines open
/// in increasing label order), so label symmetry is not enumerated.
pub fn enumerate_interval_schedules(
    inst: &Instance,
    m: usize,
    s_cap: u32,
    cap: usize,
    budget: SearchBudget,
) -> Result<Vec<IntervalSchedule>, OracleError> {
    let mut search = IntervalSearch::new(inst, m, s_cap, budget, Some(cap));
    if inst.n() > 0 {
        search.dfs(0)?;
    }
    Ok(search.collect.take().unwrap())
}

// ---------------------------------------------------------------------------
// exact timed scheduling (makespan and weighted completion time)
// ---------------------------------------------------------------------------

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Score {
    Makespan(i64),
    Wct(BigRational),
}

struct TimedSearch<'a> {
    inst: &'a Instance,
    m: usize,
    wct_mode: bool,
    seqs: Vec<Vec<u32>>,
    ends: Vec<i64>,
    job_end: Vec<i64>,
    job_machine: Vec<usize>,
    placed: Vec<bool>,
    placed_count: usize,
    partial_makespan: i64,
    partial_obj: BigRational,
    est_end: Vec<i64>,
    weights: Vec<BigRational>,
    best: Score,
    best_sched: Option<TimedSchedule>,
    visited: HashMap<Vec<u8>, ()>,
    nodes: u64,
    budget: SearchBudget,
    reverse_order: bool,
}

impl<'a> TimedSearch<'a> {
    fn new(
        inst: &'a Instance,
        m: usize,
        wct_mode: bool,
        budget: SearchBudget,
        reverse: bool,
    ) -> Self {
        let n = inst.n();
        let weights: Vec<BigRational> = inst
            .jobs()
            .iter()
            .map(|j| BigRational::new(BigInt::from(*j.w.numer()), BigInt::from(*j.w.denom())))
            .collect();
        // static earliest end: the latest predecessor may be delay-free
        // (same machine), every other predecessor pays the delay
        let mut est_end = vec![0i64; n];
        for &j in inst.topo_order() {
            let mut firsts: Vec<i64> = inst
                .preds(j)
                .iter()
                .map(|&q| est_end[q as usize])
                .collect();
            firsts.sort_unstable_by(|a, b| b.cmp(a));
            let bound = match firsts.len() {
                0 => 0,
                1 => firsts[0],
                _ => firsts[0].max(firsts[1] + inst.c()),
            };
            est_end[j as usize] = bound + inst.job(j).p;
        }
        TimedSearch {
            inst,
            m,
            wct_mode,
            seqs: vec![Vec::new(); m],
            ends: vec![0; m],
            job_end: vec![0; n],
            job_machine: vec![usize::MAX; n],
            placed: vec![false; n],
            placed_count: 0,
            partial_makespan: 0,
            partial_obj: BigRational::zero(),
            est_end,
            weights,
            best: if wct_mode {
                Score::Wct(BigRational::zero())
            } else {
                Score::Makespan(i64::MAX)
            },
            best_sched: None,
            visited: HashMap::new(),
            nodes: 0,
            budget,
            reverse_order: reverse,
        }
    }

    fn seed_incumbent(&mut self) {
        let mut t = 0i64;
        let mut assign = BTreeMap::new();
        let mut obj = BigRational::zero();
        for &j in self.inst.topo_order() {
            assign.insert(j, (t, 1u32));
            t += self.inst.job(j).p;
            obj += &self.weights[j as usize] * BigRational::from_integer(BigInt::from(t));
        }
        self.best = if self.wct_mode {
            Score::Wct(obj)
        } else {
            Score::Makespan(t)
        };
        self.best_sched = Some(TimedSchedule { assign });
    }

    fn state_key(&self) -> Vec<u8> {
        let mut parts: Vec<Vec<u8>> = self
            .seqs
            .iter()
            .filter(|s| !s.is_empty())
            .map(|s| s.iter().map(|&j| j as u8).collect())
            .collect();
        parts.sort();
        let mut key = Vec::new();
        for p in parts {
            key.extend(p);
            key.push(0xFF);
        }
        key
    }

    fn remaining_bound(&self) -> BigRational {
        let mut b = BigRational::zero();
        for j in 0..self.inst.n() {
            if !self.placed[j] && !self.weights[j].is_zero() {
                b += &self.weights[j] * BigRational::from_integer(BigInt::from(self.est_end[j]));
            }
        }
        b
    }

    fn prune(&self) -> bool {
        match &self.best {
            Score::Makespan(best) => self.partial_makespan >= *best,
            Score::Wct(best) => &(self.partial_obj.clone() + self.remaining_bound()) >= best,
        }
    }

    fn dfs(&mut self) -> Result<(), OracleError> {
        self.nodes += 1;
        if self.nodes > self.budget.max_nodes {
            return Err(OracleError::BudgetExhausted { nodes: self.nodes });
        }
        if self.placed_count == self.inst.n() {
            let score = if self.wct_mode {
                Score::Wct(self.partial_obj.clone())
            } else {
                Score::Makespan(self.partial_makespan)
            };
            if score < self.best {
                self.best = score;
                self.best_sched = Some(TimedSchedule {
                    assign: (0..self.inst.n() as u32)
                        .map(|j| {
                            let end = self.job_end[j as usize];
                            let p = self.inst.job(j).p;
                            (j, (end - p, self.job_machine[j as usize] as u32 + 1))
                        })
                        .collect(),
                });
            }
            return Ok(());
        }
        if self.prune() {
            return Ok(());
        }
        let key = self.state_key();
        if self.visited.contains_key(&key) {
            return Ok(());
        }
        self.visited.insert(key, ());

        let mut ready: Vec<u32> = (0..self.inst.n() as u32)
            .filter(|&j| {
                !self.placed[j as usize]
                    && self.inst.preds(j).iter().all(|&q| self.placed[q as usize])
            })
            .collect();
        ready.sort_by_key(|&j| std::cmp::Reverse(self.est_end[j as usize]));
        if self.reverse_order {
            ready.reverse();
        }
        for &j in &ready {
            let p = self.inst.job(j).p;
            let mut machine_options: Vec<usize> = Vec::new();
            let mut seen_empty = false;
            for i in 0..self.m {
                if self.seqs[i].is_empty() {
                    if !seen_empty {
                        machine_options.push(i);
                        seen_empty = true;
                    }
                } else {
                    machine_options.push(i);
                }
            }
            for &i in &machine_options {
                let mut start = self.ends[i];
                for &q in self.inst.preds(j) {
                    let delay = if self.job_machine[q as usize] == i {
                        0
                    } else {
                        self.inst.c()
                    };
                    start = start.max(self.job_end[q as usize] + delay);
                }
                let end = start + p;
                self.seqs[i].push(j);
                let saved_end = self.ends[i];
                self.ends[i] = end;
                self.job_end[j as usize] = end;
                self.job_machine[j as usize] = i;
                self.placed[j as usize] = true;
                self.placed_count += 1;
                let saved_mk = self.partial_makespan;
                self.partial_makespan = self.partial_makespan.max(end);
                let saved_obj = self.partial_obj.clone();
                if self.wct_mode {
                    self.partial_obj +=
                        &self.weights[j as usize] * BigRational::from_integer(BigInt::from(end));
                }
                self.dfs()?;
                self.partial_obj = saved_obj;
                self.partial_makespan = saved_mk;
                self.placed_count -= 1;
                self.placed[j as usize] = false;
                self.job_machine[j as usize] = usize::MAX;
                self.job_end[j as usize] = 0;
                self.ends[i] = saved_end;
                self.seqs[i].pop();
            }
        }
        Ok(())
    }
}

/// Optimal makespan with a certificate. Requires n <= 7 and total work <= 24.
pub fn exact_makespan(
    inst: &Instance,
    m: usize,
    budget: SearchBudget,
) -> Result<(i64, TimedSchedule), OracleError> {
    exact_makespan_ordered(inst, m, budget, false)
}

pub fn exact_makespan_ordered(
    inst: &Instance,
    m: usize,
    budget: SearchBudget,
    reverse: bool,
) -> Result<(i64, TimedSchedule), OracleError> {
    if inst.n() > 7 || inst.total_work() > 24 {
        return Err(OracleError::TooLarge {
            what: "makespan",
            detail: format!("n = {}, total work = {}", inst.n(), inst.total_work()),
        });
    }
    if inst.n() == 0 {
        return Ok((0, TimedSchedule { assign: BTreeMap::new() }));
    }
    let m = m.min(inst.n()).max(1);
    let mut search = TimedSearch::new(inst, m, false, budget, reverse);
    search.seed_incumbent();
    search.dfs()?;
    let Score::Makespan(best) = search.best else { unreachable!() };
    Ok((best, search.best_sched.unwrap()))
}

/// Optimal weighted sum of completion times on unbounded machines.
/// Requires unit jobs and n <= 6.
pub fn exact_wct(
    inst: &Instance,
    budget: SearchBudget,
) -> Result<(BigRational, TimedSchedule), OracleError> {
    exact_wct_ordered(inst, budget, false)
}

pub fn exact_wct_ordered(
    inst: &Instance,
    budget: SearchBudget,
    reverse: bool,
) -> Result<(BigRational, TimedSchedule), OracleError> {
    if inst.n() > 6 || !inst.is_unit() {
        return Err(OracleError::TooLarge {
            what: "wct",
            detail: format!("n = {}, unit = {}", inst.n(), inst.is_unit()),
        });
    }
    if inst.n() == 0 {
        return Ok((BigRational::zero(), TimedSchedule { assign: BTreeMap::new() }));
    }
    let mut search = TimedSearch::new(inst, inst.n(), true, budget, reverse);
    search.seed_incumbent();
    search.dfs()?;
    let Score::Wct(best) = search.best else { unreachable!() };
    Ok((best, search.best_sched.unwrap()))
}

/// Runs the search under two branching orders and insists the optima agree.
pub fn verified_exact_wct(
    inst: &Instance,
    budget: SearchBudget,
) -> Result<(BigRational, TimedSchedule), OracleError> {
    let (a, sched) = exact_wct_ordered(inst, budget, false)?;
    let (b, _) = exact_wct_ordered(inst, budget, true)?;
    assert_eq!(a, b, "search orders disagree on the optimum");
    Ok((a, sched))
}

pub fn verified_exact_makespan(
    inst: &Instance,
    m: usize,
    budget: SearchBudget,
) -> Result<(i64, TimedSchedule), OracleError> {
    let (a, sched) = exact_makespan_ordered(inst, m, budget, false)?;
    let (b, _) = exact_makespan_ordered(inst, m, budget, true)?;
    assert_eq!(a, b, "search orders disagree on the optimum");
    Ok((a, sched))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::testutil::{sample10, units};
    use crate::instance::{
        lower_bounds, verify_timed_schedule, Job, MachineCount, Weight,
    };
    use crate::lpsolve::solve_lp;

    #[test]
    fn exact_lp_matches_float_on_basics() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, 1.0);
        let y = lp.add_var("y", 0.0, 1.0);
        lp.add_row("r", vec![(x, 1.0), (y, 1.0)], Sense::Ge, 1.0);
        lp.set_objective(Direction::Minimize, vec![(x, 1.0), (y, 1.0)]);
        let exact = solve_lp_exact(&lp).unwrap();
        assert_eq!(exact.status, LpStatus::Optimal);
        assert_eq!(exact.objective, BigRational::one());
    }

    #[test]
    fn exact_lp_detects_infeasible_and_unbounded() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", f64::NEG_INFINITY, f64::INFINITY);
        lp.add_row("ge", vec![(x, 1.0)], Sense::Ge, 1.0);
        lp.add_row("le", vec![(x, 1.0)], Sense::Le, 0.0);
        assert_eq!(solve_lp_exact(&lp).unwrap().status, LpStatus::Infeasible);

        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, f64::INFINITY);
        lp.set_objective(Direction::Maximize, vec![(x, 1.0)]);
        assert_eq!(solve_lp_exact(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn min_intervals_single_job() {
        let inst = units(1, &[], 3, MachineCount::Finite(1));
        let (s, cert) = exact_min_intervals(&inst, 1, SearchBudget::default()).unwrap();
        assert_eq!(s, 1);
        assert!(cert.is_some());
    }

    #[test]
    fn min_intervals_sample10_is_two() {
        let inst = sample10(MachineCount::Finite(10));
        let (s, cert) = exact_min_intervals(&inst, 10, SearchBudget::default()).unwrap();
        assert_eq!(s, 2);
        let report = crate::instance::verify_interval_schedule(&inst, &cert.unwrap()).unwrap();
        assert!(report.feasible);
    }

    #[test]
    fn min_intervals_chain_needs_three() {
        // chain of 2c+1 units: a block holds at most c chain jobs and the
        // chain forces interval monotonicity across blocks
        let c = 2i64;
        let n = (2 * c + 1) as usize;
        let edges: Vec<(u32, u32)> = (0..n as u32 - 1).map(|k| (k, k + 1)).collect();
        let inst = units(n, &edges, c, MachineCount::Unbounded);
        let (s, _) = exact_min_intervals(&inst, inst.m(), SearchBudget::default()).unwrap();
        assert_eq!(s, 3);
    }

    #[test]
    fn min_intervals_monotone_in_machines() {
        let inst = units(6, &[(0, 3), (1, 3), (2, 4), (3, 5)], 2, MachineCount::Finite(4));
        let mut prev = u32::MAX;
        for m in 1..=4 {
            let (s, _) = exact_min_intervals(&inst, m, SearchBudget::default()).unwrap();
            assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn enumerate_collects_feasible_schedules() {
        let inst = units(3, &[(0, 1)], 2, MachineCount::Finite(2));
        let all =
            enumerate_interval_schedules(&inst, 2, 2, 10_000, SearchBudget::default()).unwrap();
        assert!(!all.is_empty());
        for sched in &all {
            let report = crate::instance::verify_interval_schedule(&inst, sched).unwrap();
            assert!(report.feasible, "{sched:?}");
        }
    }

    #[test]
    fn makespan_chain_same_machine() {
        let inst = units(3, &[(0, 1), (1, 2)], 5, MachineCount::Finite(3));
        let (opt, cert) = exact_makespan(&inst, 3, SearchBudget::default()).unwrap();
        assert_eq!(opt, 3);
        assert!(verify_timed_schedule(&inst, &cert).unwrap().feasible);
    }

    #[test]
    fn makespan_fork_with_delay() {
        // a -> b, a -> c with c = 1 on 2 machines: 3 is optimal
        let inst = units(3, &[(0, 1), (0, 2)], 1, MachineCount::Finite(2));
        let (opt, cert) = verified_exact_makespan(&inst, 2, SearchBudget::default()).unwrap();
        assert_eq!(opt, 3);
        assert!(verify_timed_schedule(&inst, &cert).unwrap().feasible);
    }

    #[test]
    fn makespan_two_long_jobs_split() {
        let jobs = vec![
            Job { id: "a".into(), p: 3, w: Weight::zero() },
            Job { id: "b".into(), p: 3, w: Weight::zero() },
        ];
        let inst = Instance::new(jobs, &[], 1, MachineCount::Finite(2)).unwrap();
        let (opt, _) = exact_makespan(&inst, 2, SearchBudget::default()).unwrap();
        assert_eq!(opt, 3);
    }

    #[test]
    fn makespan_at_least_lower_bounds() {
        let inst = units(5, &[(0, 2), (1, 2), (2, 3), (2, 4)], 2, MachineCount::Finite(2));
        let (opt, _) = exact_makespan(&inst, 2, SearchBudget::default()).unwrap();
        let lb = lower_bounds(&inst);
        assert!(opt >= lb.load.max(lb.chain));
    }

    #[test]
    fn makespan_monotone_in_machines() {
        let inst = units(5, &[(0, 2), (1, 2), (2, 3), (2, 4)], 2, MachineCount::Finite(4));
        let mut prev = i64::MAX;
        for m in 1..=4 {
            let (opt, _) = exact_makespan(&inst, m, SearchBudget::default()).unwrap();
            assert!(opt <= prev);
            prev = opt;
        }
    }

    #[test]
    fn wct_single_weighted_job() {
        let jobs = vec![Job { id: "a".into(), p: 1, w: Weight::from_integer(3) }];
        let inst = Instance::new(jobs, &[], 2, MachineCount::Unbounded).unwrap();
        let (opt, _) = exact_wct(&inst, SearchBudget::default()).unwrap();
        assert_eq!(opt, BigRational::from_integer(BigInt::from(3)));
    }

    #[test]
    fn wct_chain_back_to_back() {
        let jobs = vec![
            Job { id: "a".into(), p: 1, w: Weight::zero() },
            Job { id: "b".into(), p: 1, w: Weight::from_integer(1) },
        ];
        let inst = Instance::new(jobs, &[(0, 1)], 2, MachineCount::Unbounded).unwrap();
        let (opt, _) = verified_exact_wct(&inst, SearchBudget::default()).unwrap();
        assert_eq!(opt, BigRational::from_integer(BigInt::from(2)));
    }

    #[test]
    fn wct_diamond_value_frozen() {
        // diamond a -> {b, c} -> d with c = 1 and unit weights: the
        // one-machine chain with completions 1..4 is optimal, value 10
        // (frozen after the double-order run agreed)
        let inst = units(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], 1, MachineCount::Unbounded);
        let (opt, cert) = verified_exact_wct(&inst, SearchBudget::default()).unwrap();
        assert_eq!(opt, BigRational::from_integer(BigInt::from(10)));
        assert!(verify_timed_schedule(&inst, &cert).unwrap().feasible);
    }

    #[test]
    fn oracle_refuses_oversized_instances() {
        let inst = units(11, &[], 1, MachineCount::Finite(2));
        assert!(matches!(
            exact_min_intervals(&inst, 2, SearchBudget::default()),
            Err(OracleError::TooLarge { .. })
        ));
        let inst = units(8, &[], 1, MachineCount::Finite(2));
        assert!(matches!(
            exact_makespan(&inst, 2, SearchBudget::default()),
            Err(OracleError::TooLarge { .. })
        ));
        let inst = units(7, &[], 1, MachineCount::Finite(2));
        assert!(matches!(
            exact_wct(&inst, SearchBudget::default()),
            Err(OracleError::TooLarge { .. })
        ));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let inst = units(7, &[], 1, MachineCount::Finite(3));
        let budget = SearchBudget { max_nodes: 10, max_millis: 1000 };
        assert!(matches!(
            exact_makespan(&inst, 3, budget),
            Err(OracleError::BudgetExhausted { .. })
        ));
    }

    #[test]
    fn float_solver_agrees_with_exact_on_random_tiny_lps() {
        use num_traits::ToPrimitive;
        use rand::Rng;
        let mut rng = crate::rng::stream(2024, 0);
        for case in 0..250 {
            let nv = rng.gen_range(2..7);
            let nr = rng.gen_range(1..7);
            let mut lp = LinearProgram::new();
            for v in 0..nv {
                match rng.gen_range(0..4) {
                    0 => lp.add_var(format!("x{v}"), 0.0, f64::INFINITY),
                    1 => lp.add_var(format!("x{v}"), -2.0, 2.0),
                    2 => lp.add_var(format!("x{v}"), f64::NEG_INFINITY, f64::INFINITY),
                    _ => lp.add_var(format!("x{v}"), 0.0, rng.gen_range(1..4) as f64),
                };
            }
            for r in 0..nr {
                let coeffs: Vec<(usize, f64)> = (0..nv)
                    .filter_map(|v| {
                        let a: i32 = rng.gen_range(-3..4);
                        (a != 0).then_some((v, a as f64))
                    })
                    .collect();
                if coeffs.is_empty() {
                    continue;
                }
                let sense = match rng.gen_range(0..3) {
                    0 => Sense::Le,
                    1 => Sense::Ge,
                    _ => Sense::Eq,
                };
                lp.add_row(format!("r{r}"), coeffs, sense, rng.gen_range(-2..5) as f64);
            }
            let obj: Vec<(usize, f64)> = (0..nv)
                .map(|v| (v, rng.gen_range(-3..4) as f64))
                .collect();
            let dir = if rng.gen_bool(0.5) { Direction::Minimize } else { Direction::Maximize };
            lp.set_objective(dir, obj);

            let float = solve_lp(&lp).unwrap();
            let exact = solve_lp_exact(&lp).unwrap();
            assert_eq!(
                float.status, exact.status,
                "case {case}: status mismatch\n{lp:?}"
            );
            if float.status == LpStatus::Optimal {
                let exact_obj = exact.objective.to_f64().unwrap();
                assert!(
                    (float.objective - exact_obj).abs() <= 1e-7 * (1.0 + exact_obj.abs()),
                    "case {case}: objective {} vs exact {exact_obj}\n{lp:?}",
                    float.objective
                );
                assert!(lp.is_feasible(&float.values), "case {case}: point infeasible");
                assert!(float.dual_feasible, "case {case}: dual check failed");
            }
        }
    }
}
