//! Scheduling relaxations: the compact interval (makespan) LP, the compact
//! completion-time LP, full lift builders at toy sizes, and semimetric
//! extraction from pairwise co-location variables.
//!
//! The compact makespan LP over unit jobs with S intervals and m machines has
//! variables y (unordered pairs, "same machine and interval") and C (interval
//! index per job), rows
//!
//! ```text
//! sum_{j' != j} y_{j,j'} <= c - 1            for every job j
//! C_{j2} - C_{j1} + y_{j1,j2} >= 1           for every j1 < j2 in the order
//! y_{ab} + y_{bc} - y_{ac} <= 1              (triangle family, lazy)
//! 0 <= y <= 1,  0 <= C_j <= S - 1
//! ```
//!
//! The completion-time variant adds per-slot occupancy variables z and tracks
//! absolute completion times instead of interval indices. Triangle rows are
//! materialized outright for n <= 15 and separated lazily otherwise.

use std::collections::HashSet;

use num_traits::ToPrimitive;
use serde_json::{json, Value};
use thiserror::Error;

use crate::instance::{Instance, IntervalSchedule, TimedSchedule};
use crate::lpsolve::{
    solve_with_lazy_cuts, Direction, LinearProgram, LpError, LpOutcome, LpStatus, Row, Sense, TAU,
};
use crate::sa_lift::{build_sa_lift, BaseLp, BaseRow, LiftedLp, SaError};

/// Materialize every triangle row outright up to this many jobs.
const TRIANGLE_MATERIALIZE_LIMIT: usize = 15;
/// Most-violated triangle rows returned per separation round.
const TRIANGLE_BATCH: usize = 500;
/// Cap on time slots for the completion-time LP.
const SLOT_CAP: i64 = 4096;

#[derive(Debug, Error)]
pub enum RelaxError {
    #[error("relaxation requires unit jobs; job {0:?} has p > 1 (split first)")]
    NotUnit(String),
    #[error("capacity precondition violated: n = {n} jobs exceed S*m*c = {capacity}")]
    CapacityPrecondition { n: usize, capacity: i64 },
    #[error("time horizon too large: {slots} slots exceed cap {cap}")]
    SlotCap { slots: i64, cap: i64 },
    #[error("LP error: {0}")]
    Lp(#[from] LpError),
    #[error("lift error: {0}")]
    Sa(#[from] SaError),
    #[error("triangle axiom violated by ({a}, {b}, {c}): d(a,c) exceeds d(a,b)+d(b,c) by {excess}")]
    Axiom { a: usize, b: usize, c: usize, excess: f64 },
    #[error("metric entry ({a}, {b}) = {value} outside [0, 1 + tau]")]
    BadEntry { a: usize, b: usize, value: f64 },
    #[error("capacity echo failed at job {j}, radius {beta}: {count} points > bound {bound}")]
    CapacityEcho { j: usize, beta: f64, count: usize, bound: f64 },
    #[error("the always-feasible upper end S = {0} solved infeasible (solver defect)")]
    UpperEndInfeasible(u32),
    #[error("completion-time prefix for job {0:?} never reaches the threshold")]
    BadPrefix(String),
    #[error("schedule does not fit the LP horizon: slot {slot} > T = {t}")]
    HorizonOverflow { slot: i64, t: i64 },
}

/// Index of the unordered pair (a, b), a != b, in a packed upper triangle.
pub fn pair_index(n: usize, a: usize, b: usize) -> usize {
    debug_assert!(a != b && a < n && b < n);
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    lo * (2 * n - lo - 1) / 2 + (hi - lo - 1)
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// LP values extracted from a relaxation solve: pairwise co-location y,
/// per-job completion index/time C, and (in completion-time mode) per-slot
/// occupancies z.
#[derive(Debug, Clone)]
pub struct FractionalSolution {
    pub n: usize,
    /// packed upper triangle, y_{jj} = 1 implicit
    pub y: Vec<f64>,
    pub c_times: Vec<f64>,
    /// completion-time mode only: z[j][t-1] for t in 1..=T
    pub z: Option<Vec<Vec<f64>>>,
    pub s_intervals: u32,
    pub t_slots: i64,
    pub objective: f64,
}

impl FractionalSolution {
    pub fn y(&self, a: usize, b: usize) -> f64 {
        if a == b {
            1.0
        } else {
            self.y[pair_index(self.n, a, b)]
        }
    }

    pub fn to_json_value(&self, inst: &Instance) -> Value {
        let mut pairs = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                pairs.push(json!([inst.id(a as u32), inst.id(b as u32), self.y(a, b)]));
            }
        }
        let mut c_map = serde_json::Map::new();
        for j in 0..self.n {
            c_map.insert(inst.id(j as u32).to_string(), json!(self.c_times[j]));
        }
        let mut doc = json!({
            "S": self.s_intervals,
            "T": self.t_slots,
            "objective": self.objective,
            "y": pairs,
            "C": c_map,
        });
        if let Some(z) = &self.z {
            let mut z_map = serde_json::Map::new();
            for j in 0..self.n {
                z_map.insert(inst.id(j as u32).to_string(), json!(z[j]));
            }
            doc["z"] = Value::Object(z_map);
        }
        doc
    }
}

/// Distance matrix with validated semimetric axioms.
#[derive(Debug, Clone)]
pub struct Semimetric {
    n: usize,
    d: Vec<f64>,
}

impl Semimetric {
    /// Validates symmetry input implicitly (construction is from an upper
    /// triangle), the zero diagonal, entry range, and the triangle
    /// inequality within `TAU`.
    pub fn from_upper(n: usize, upper: &[f64]) -> Result<Self, RelaxError> {
        assert_eq!(upper.len(), pair_count(n));
        let mut d = vec![0.0; n * n];
        for a in 0..n {
            for b in a + 1..n {
                let v = upper[pair_index(n, a, b)];
                if !(-TAU..=1.0 + TAU).contains(&v) {
                    return Err(RelaxError::BadEntry { a, b, value: v });
                }
                let v = v.clamp(0.0, 1.0);
                d[a * n + b] = v;
                d[b * n + a] = v;
            }
        }
        let metric = Semimetric { n, d };
        metric.validate_triangle()?;
        Ok(metric)
    }

    pub fn validate_triangle(&self) -> Result<(), RelaxError> {
        for a in 0..self.n {
            for b in 0..self.n {
                if b == a {
                    continue;
                }
                for c in a + 1..self.n {
                    if c == b {
                        continue;
                    }
                    let excess = self.dist(a, c) - self.dist(a, b) - self.dist(b, c);
                    if excess > TAU {
                        return Err(RelaxError::Axiom { a, b, c, excess });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.d[a * self.n + b]
    }

    pub fn dist_to_set(&self, v: usize, set: &[usize]) -> f64 {
        set.iter()
            .map(|&u| self.dist(v, u))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn diameter(&self, set: &[usize]) -> f64 {
        let mut d = 0.0f64;
        for (k, &a) in set.iter().enumerate() {
            for &b in &set[k + 1..] {
                d = d.max(self.dist(a, b));
            }
        }
        d
    }

    /// Restriction to a subset; point k of the result is `points[k]`.
    pub fn restrict(&self, points: &[usize]) -> Semimetric {
        let m = points.len();
        let mut d = vec![0.0; m * m];
        for (i, &a) in points.iter().enumerate() {
            for (j, &b) in points.iter().enumerate() {
                d[i * m + j] = self.dist(a, b);
            }
        }
        Semimetric { n: m, d }
    }
}

/// The distance-rho neighborhood of `set`: every point within rho of it.
pub fn neighborhood(metric: &Semimetric, set: &[usize], rho: f64) -> Vec<usize> {
    assert!(!set.is_empty(), "neighborhood of an empty set");
    (0..metric.n())
        .filter(|&v| metric.dist_to_set(v, set) <= rho)
        .collect()
}

/// Stateful triangle separation: scans all ordered triples, returns up to
/// [`TRIANGLE_BATCH`] most-violated rows not returned before.
pub struct TriangleSeparator {
    n: usize,
    y_base: usize,
    added: HashSet<(usize, usize, usize)>,
}

impl TriangleSeparator {
    pub fn new(n: usize, y_base: usize) -> Self {
        TriangleSeparator { n, y_base, added: HashSet::new() }
    }

    fn y(&self, values: &[f64], a: usize, b: usize) -> f64 {
        values[self.y_base + pair_index(self.n, a, b)]
    }

    pub fn separate(&mut self, values: &[f64]) -> Vec<Row> {
        let mut violated: Vec<(f64, (usize, usize, usize))> = Vec::new();
        for a in 0..self.n {
            for c in a + 1..self.n {
                for b in 0..self.n {
                    if b == a || b == c {
                        continue;
                    }
                    // y_ac >= y_ab + y_bc - 1
                    let excess =
                        self.y(values, a, b) + self.y(values, b, c) - self.y(values, a, c) - 1.0;
                    if excess > TAU && !self.added.contains(&(a, b, c)) {
                        violated.push((excess, (a, b, c)));
                    }
                }
            }
        }
        violated.sort_by(|x, y| {
            y.0.partial_cmp(&x.0)
                .unwrap()
                .then_with(|| x.1.cmp(&y.1))
        });
        violated.truncate(TRIANGLE_BATCH);
        violated
            .into_iter()
            .map(|(_, (a, b, c))| {
                self.added.insert((a, b, c));
                triangle_row(self.n, self.y_base, a, b, c)
            })
            .collect()
    }
}

fn triangle_row(n: usize, y_base: usize, a: usize, b: usize, c: usize) -> Row {
    Row {
        name: format!("tri_{a}_{b}_{c}"),
        coeffs: vec![
            (y_base + pair_index(n, a, b), 1.0),
            (y_base + pair_index(n, b, c), 1.0),
            (y_base + pair_index(n, a, c), -1.0),
        ],
        sense: Sense::Le,
        rhs: 1.0,
    }
}

fn all_triangle_rows(n: usize, y_base: usize) -> Vec<Row> {
    let mut rows = Vec::new();
    for a in 0..n {
        for c in a + 1..n {
            for b in 0..n {
                if b != a && b != c {
                    rows.push(triangle_row(n, y_base, a, b, c));
                }
            }
        }
    }
    rows
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompactMode {
    Makespan,
    CompletionTime,
}

/// A compact relaxation plus its variable layout.
pub struct CompactLp {
    pub lp: LinearProgram,
    pub mode: CompactMode,
    pub n: usize,
    pub y_base: usize,
    pub c_base: usize,
    pub z_base: Option<usize>,
    pub s_intervals: u32,
    pub t_slots: i64,
    pub c: i64,
    pub triangles_materialized: bool,
}

impl CompactLp {
    /// Solves with lazy triangle separation (no-op when materialized).
    pub fn solve(&self) -> Result<(LpOutcome, Option<FractionalSolution>), RelaxError> {
        let outcome = if self.triangles_materialized {
            crate::lpsolve::solve_lp(&self.lp)?
        } else {
            let mut sep = TriangleSeparator::new(self.n, self.y_base);
            solve_with_lazy_cuts(&self.lp, |vals| sep.separate(vals))?
        };
        let solution = (outcome.status == LpStatus::Optimal)
            .then(|| self.solution_from_values(&outcome.values, outcome.objective));
        Ok((outcome, solution))
    }

    pub fn solution_from_values(&self, values: &[f64], objective: f64) -> FractionalSolution {
        let y = values[self.y_base..self.y_base + pair_count(self.n)]
            .iter()
            .map(|v| v.clamp(0.0, 1.0))
            .collect();
        let c_times = values[self.c_base..self.c_base + self.n]
            .iter()
            .map(|v| v.max(0.0))
            .collect();
        let z = self.z_base.map(|zb| {
            (0..self.n)
                .map(|j| {
                    let t = self.t_slots as usize;
                    values[zb + j * t..zb + (j + 1) * t]
                        .iter()
                        .map(|v| v.clamp(0.0, 1.0))
                        .collect()
                })
                .collect()
        });
        FractionalSolution {
            n: self.n,
            y,
            c_times,
            z,
            s_intervals: self.s_intervals,
            t_slots: self.t_slots,
            objective,
        }
    }

    /// Re-assembles a full LP point from a solution (for residual checks).
    pub fn point_from_solution(&self, sol: &FractionalSolution) -> Vec<f64> {
        let mut point = vec![0.0; self.lp.vars.len()];
        point[self.y_base..self.y_base + pair_count(self.n)].copy_from_slice(&sol.y);
        point[self.c_base..self.c_base + self.n].copy_from_slice(&sol.c_times);
        if let (Some(zb), Some(z)) = (self.z_base, &sol.z) {
            for (j, row) in z.iter().enumerate() {
                let t = self.t_slots as usize;
                point[zb + j * t..zb + (j + 1) * t].copy_from_slice(row);
            }
        }
        point
    }

    /// Max residual over all rows including the full triangle family.
    pub fn max_violation_with_triangles(&self, point: &[f64]) -> f64 {
        let mut worst = self.lp.max_violation(point);
        if !self.triangles_materialized {
            for row in all_triangle_rows(self.n, self.y_base) {
                let lhs: f64 = row.coeffs.iter().map(|&(v, a)| a * point[v]).sum();
                worst = worst.max(lhs - row.rhs);
            }
        }
        worst
    }
}

fn require_unit(inst: &Instance) -> Result<(), RelaxError> {
    if let Some(job) = inst.jobs().iter().find(|j| j.p != 1) {
        return Err(RelaxError::NotUnit(job.id.clone()));
    }
    Ok(())
}

/// Compact feasibility LP for scheduling unit jobs into S length-c intervals
/// on m machines.
pub fn build_compact_makespan_lp(
    inst: &Instance,
    m: usize,
    s_intervals: u32,
) -> Result<CompactLp, RelaxError> {
    require_unit(inst)?;
    let n = inst.n();
    let capacity = s_intervals as i64 * m as i64 * inst.c();
    if (n as i64) > capacity {
        return Err(RelaxError::CapacityPrecondition { n, capacity });
    }
    let mut lp = LinearProgram::new();
    let y_base = 0;
    for a in 0..n {
        for b in a + 1..n {
            lp.add_var(format!("y[{a}.{b}]"), 0.0, 1.0);
        }
    }
    let c_base = lp.vars.len();
    let c_upper = (s_intervals.max(1) - 1) as f64;
    for j in 0..n {
        lp.add_var(format!("C[{j}]"), 0.0, c_upper);
    }
    add_y_capacity_rows(&mut lp, inst, y_base);
    for &(j1, j2) in inst.closure() {
        lp.add_row(
            format!("prec_{j1}_{j2}"),
            vec![
                (c_base + j2 as usize, 1.0),
                (c_base + j1 as usize, -1.0),
                (y_base + pair_index(n, j1 as usize, j2 as usize), 1.0),
            ],
            Sense::Ge,
            1.0,
        );
    }
    let triangles_materialized = n <= TRIANGLE_MATERIALIZE_LIMIT;
    if triangles_materialized {
        for row in all_triangle_rows(n, y_base) {
            lp.rows.push(row);
        }
    }
    lp.set_objective(Direction::Feasibility, Vec::new());
    Ok(CompactLp {
        lp,
        mode: CompactMode::Makespan,
        n,
        y_base,
        c_base,
        z_base: None,
        s_intervals,
        t_slots: s_intervals as i64 * inst.c(),
        c: inst.c(),
        triangles_materialized,
    })
}

fn add_y_capacity_rows(lp: &mut LinearProgram, inst: &Instance, y_base: usize) {
    let n = inst.n();
    for j in 0..n {
        let coeffs: Vec<(usize, f64)> = (0..n)
            .filter(|&o| o != j)
            .map(|o| (y_base + pair_index(n, j, o), 1.0))
            .collect();
        if !coeffs.is_empty() {
            lp.add_row(format!("cap_{j}"), coeffs, Sense::Le, (inst.c() - 1) as f64);
        }
    }
}

/// Compact completion-time LP: per-slot occupancies z with prefix precedence
/// rows, aggregate slot capacity m, exact completion-time linking, and the
/// delay row scaled by c.
pub fn build_compact_wct_lp(
    inst: &Instance,
    m: usize,
    s_intervals: u32,
) -> Result<CompactLp, RelaxError> {
    require_unit(inst)?;
    let n = inst.n();
    let t_slots = s_intervals as i64 * inst.c();
    if t_slots > SLOT_CAP {
        return Err(RelaxError::SlotCap { slots: t_slots, cap: SLOT_CAP });
    }
    let capacity = t_slots * m as i64;
    if (n as i64) > capacity {
        return Err(RelaxError::CapacityPrecondition { n, capacity });
    }
    let t = t_slots as usize;
    let mut lp = LinearProgram::new();
    let y_base = 0;
    for a in 0..n {
        for b in a + 1..n {
            lp.add_var(format!("y[{a}.{b}]"), 0.0, 1.0);
        }
    }
    let c_base = lp.vars.len();
    for j in 0..n {
        lp.add_var(format!("C[{j}]"), 0.0, t_slots as f64);
    }
    let z_base = lp.vars.len();
    for j in 0..n {
        for slot in 1..=t {
            lp.add_var(format!("z[{j}.{slot}]"), 0.0, 1.0);
        }
    }
    let z_var = |j: usize, slot: usize| z_base + j * t + (slot - 1);

    for j in 0..n {
        let coeffs: Vec<(usize, f64)> = (1..=t).map(|slot| (z_var(j, slot), 1.0)).collect();
        lp.add_row(format!("assign_{j}"), coeffs, Sense::Eq, 1.0);
    }
    for &(j1, j2) in inst.closure() {
        for slot in 1..=t {
            let mut coeffs: Vec<(usize, f64)> = (1..slot)
                .map(|s| (z_var(j1 as usize, s), 1.0))
                .collect();
            coeffs.extend((1..=slot).map(|s| (z_var(j2 as usize, s), -1.0)));
            lp.add_row(format!("prefix_{j1}_{j2}_{slot}"), coeffs, Sense::Ge, 0.0);
        }
    }
    for slot in 1..=t {
        let coeffs: Vec<(usize, f64)> = (0..n).map(|j| (z_var(j, slot), 1.0)).collect();
        lp.add_row(format!("slotcap_{slot}"), coeffs, Sense::Le, m as f64);
    }
    for j in 0..n {
        let mut coeffs: Vec<(usize, f64)> = vec![(c_base + j, 1.0)];
        coeffs.extend((1..=t).map(|slot| (z_var(j, slot), -(slot as f64))));
        lp.add_row(format!("clink_{j}"), coeffs, Sense::Eq, 0.0);
    }
    for &(j1, j2) in inst.closure() {
        lp.add_row(
            format!("delay_{j1}_{j2}"),
            vec![
                (c_base + j2 as usize, 1.0),
                (c_base + j1 as usize, -1.0),
                (y_base + pair_index(n, j1 as usize, j2 as usize), inst.c() as f64),
            ],
            Sense::Ge,
            inst.c() as f64,
        );
    }
    add_y_capacity_rows(&mut lp, inst, y_base);
    let triangles_materialized = n <= TRIANGLE_MATERIALIZE_LIMIT;
    if triangles_materialized {
        for row in all_triangle_rows(n, y_base) {
            lp.rows.push(row);
        }
    }
    let objective: Vec<(usize, f64)> = (0..n)
        .map(|j| {
            let w = &inst.job(j as u32).w;
            let wf = w.numer().to_f64().unwrap() / w.denom().to_f64().unwrap();
            (c_base + j, wf)
        })
        .collect();
    lp.set_objective(Direction::Minimize, objective);
    Ok(CompactLp {
        lp,
        mode: CompactMode::CompletionTime,
        n,
        y_base,
        c_base,
        z_base: Some(z_base),
        s_intervals,
        t_slots,
        c: inst.c(),
        triangles_materialized,
    })
}

/// Binary search for the minimal S with a feasible compact makespan LP.
/// S = n is always feasible (one job per interval in topological order), so
/// the search runs on [max(1, ceil(n/(m c))), n]. Ties break toward small S.
pub fn min_feasible_s(
    inst: &Instance,
    m: usize,
) -> Result<(u32, FractionalSolution), RelaxError> {
    require_unit(inst)?;
    let n = inst.n();
    if n == 0 {
        return Ok((
            0,
            FractionalSolution {
                n: 0,
                y: Vec::new(),
                c_times: Vec::new(),
                z: None,
                s_intervals: 0,
                t_slots: 0,
                objective: 0.0,
            },
        ));
    }
    let cap_per_interval = m as i64 * inst.c();
    let mut lo = ((n as i64 + cap_per_interval - 1) / cap_per_interval).max(1) as u32;
    let mut hi = n as u32;
    let check = |s: u32| -> Result<Option<FractionalSolution>, RelaxError> {
        let compact = build_compact_makespan_lp(inst, m, s)?;
        let (outcome, sol) = compact.solve()?;
        Ok(match outcome.status {
            LpStatus::Optimal => sol,
            _ => None,
        })
    };
    let mut best = match check(hi)? {
        Some(sol) => sol,
        None => return Err(RelaxError::UpperEndInfeasible(hi)),
    };
    let mut best_s = hi;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match check(mid)? {
            Some(sol) => {
                best = sol;
                best_s = mid;
                hi = mid;
            }
            None => lo = mid + 1,
        }
    }
    if best_s != hi {
        // hi moved below the recorded solution; re-solve at the final S
        if let Some(sol) = check(hi)? {
            best = sol;
            best_s = hi;
        }
    }
    debug_assert_eq!(best_s, hi);
    Ok((best_s, best))
}

/// Distances 1 - y with all axioms validated, plus the capacity echo: every
/// radius-beta ball around a job holds at most (c + tau) / (1 - beta) points.
pub fn extract_semimetric(sol: &FractionalSolution) -> Result<Semimetric, RelaxError> {
    let n = sol.n;
    let upper: Vec<f64> = sol.y.iter().map(|&v| 1.0 - v).collect();
    let metric = Semimetric::from_upper(n, &upper)?;
    let cap_tol = 1e-6;
    for j in 0..n {
        let mut dists: Vec<f64> = (0..n).map(|o| metric.dist(j, o)).collect();
        dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (count_minus_1, &beta) in dists.iter().enumerate() {
            if beta >= 1.0 - 1e-9 {
                break;
            }
            let count = count_minus_1 + 1;
            // capacity row: sum over the ball of y >= (1-beta)|ball| must
            // stay below c (+ solver tolerance)
            let bound = (sol_capacity_bound(sol) + cap_tol) / (1.0 - beta);
            if (count as f64) > bound + cap_tol {
                return Err(RelaxError::CapacityEcho { j, beta, count, bound });
            }
        }
    }
    Ok(metric)
}

fn sol_capacity_bound(sol: &FractionalSolution) -> f64 {
    // the compact LPs bound 1 + sum_{j' != j} y at c; reconstruct c from the
    // solution horizon
    if sol.s_intervals == 0 {
        1.0
    } else {
        (sol.t_slots / sol.s_intervals as i64) as f64
    }
}

/// Integral solution induced by an interval schedule: y is the same-block
/// indicator and C the interval index.
pub fn solution_from_interval_schedule(
    inst: &Instance,
    sched: &IntervalSchedule,
    s_intervals: u32,
) -> FractionalSolution {
    let n = inst.n();
    let mut y = vec![0.0; pair_count(n)];
    let mut c_times = vec![0.0; n];
    for (&j, &(s, i)) in &sched.assign {
        c_times[j as usize] = s as f64;
        for (&j2, &(s2, i2)) in &sched.assign {
            if j < j2 && (s, i) == (s2, i2) {
                y[pair_index(n, j as usize, j2 as usize)] = 1.0;
            }
        }
    }
    FractionalSolution {
        n,
        y,
        c_times,
        z: None,
        s_intervals,
        t_slots: s_intervals as i64 * inst.c(),
        objective: 0.0,
    }
}

/// Point of the compact completion-time LP induced by dilating a feasible
/// unit-job timed schedule: completion t moves to t + c*floor((t-1)/c), y is
/// the same-(machine, dilated-interval) indicator. Completion times at most
/// double, so the LP objective is at most twice the schedule's.
pub fn wct_point_from_schedule(
    inst: &Instance,
    sched: &TimedSchedule,
    compact: &CompactLp,
) -> Result<Vec<f64>, RelaxError> {
    let n = inst.n();
    let c = inst.c();
    let t_slots = compact.t_slots;
    let dilate = |t: i64| t + c * ((t - 1) / c);
    let mut point = vec![0.0; compact.lp.vars.len()];
    let z_base = compact.z_base.expect("completion-time LP");
    let t_len = t_slots as usize;
    let mut slot_of = vec![0i64; n];
    for (&j, &(start, _)) in &sched.assign {
        let completion = start + 1;
        let slot = dilate(completion);
        if slot > t_slots {
            return Err(RelaxError::HorizonOverflow { slot, t: t_slots });
        }
        slot_of[j as usize] = slot;
        point[compact.c_base + j as usize] = slot as f64;
        point[z_base + (j as usize) * t_len + (slot - 1) as usize] = 1.0;
    }
    for (&j1, &(_, i1)) in &sched.assign {
        for (&j2, &(_, i2)) in &sched.assign {
            if j1 < j2 && i1 == i2 {
                let s1 = (slot_of[j1 as usize] - 1) / c;
                let s2 = (slot_of[j2 as usize] - 1) / c;
                if s1 == s2 {
                    point[compact.y_base + pair_index(n, j1 as usize, j2 as usize)] = 1.0;
                }
            }
        }
    }
    Ok(point)
}

/// The full lifted LP: x variables indexed (job, machine, interval), rank-r
/// lift of the assignment/capacity base, plus y/C variables. Linking rows
/// y = sum of pair entries require rank >= 1 and are omitted at rank 0,
/// leaving the base rows plus the precedence rows on y and C.
pub struct FullQ {
    pub lifted: LiftedLp,
    pub lp: LinearProgram,
    pub n: usize,
    pub m: usize,
    pub s_intervals: u32,
    pub y_base: usize,
    pub c_base: usize,
}

impl FullQ {
    pub fn x_index(&self, j: usize, i: usize, s: usize) -> usize {
        (j * self.m + i) * self.s_intervals as usize + s
    }
}

pub fn build_full_q(
    inst: &Instance,
    m: usize,
    s_intervals: u32,
    rank: usize,
) -> Result<FullQ, RelaxError> {
    require_unit(inst)?;
    let base = full_q_base(inst, m, s_intervals)?;
    let lifted = build_sa_lift(&base, rank)?;
    let n = inst.n();
    let mut lp = lifted.lp.clone();
    let y_base = lp.vars.len();
    for a in 0..n {
        for b in a + 1..n {
            lp.add_var(format!("y[{a}.{b}]"), 0.0, 1.0);
        }
    }
    let c_base = lp.vars.len();
    for j in 0..n {
        lp.add_var(format!("C[{j}]"), 0.0, (s_intervals.max(1) - 1) as f64);
    }
    let x_index =
        |j: usize, i: usize, s: usize| -> usize { (j * m) * s_intervals as usize + i * s_intervals as usize + s };
    if rank >= 1 {
        for a in 0..n {
            for b in a + 1..n {
                let mut coeffs = vec![(y_base + pair_index(n, a, b), 1.0)];
                for i in 0..m {
                    for s in 0..s_intervals as usize {
                        let mask = (1u64 << x_index(a, i, s)) | (1u64 << x_index(b, i, s));
                        coeffs.push((lifted.index[&mask], -1.0));
                    }
                }
                lp.add_row(format!("ylink_{a}_{b}"), coeffs, Sense::Eq, 0.0);
            }
        }
    }
    for &(j1, j2) in inst.closure() {
        lp.add_row(
            format!("prec_{j1}_{j2}"),
            vec![
                (c_base + j2 as usize, 1.0),
                (c_base + j1 as usize, -1.0),
                (y_base + pair_index(n, j1 as usize, j2 as usize), 1.0),
            ],
            Sense::Ge,
            1.0,
        );
    }
    lp.set_objective(Direction::Feasibility, Vec::new());
    Ok(FullQ { lifted, lp, n, m, s_intervals, y_base, c_base })
}

/// The base polytope of the full lift: one 0/1 variable per (job, machine,
/// interval) with an assignment group per job and a capacity row per
/// (machine, interval).
pub fn full_q_base(inst: &Instance, m: usize, s_intervals: u32) -> Result<BaseLp, RelaxError> {
    require_unit(inst)?;
    let n = inst.n();
    let s = s_intervals as usize;
    let nvars = n * m * s;
    let x_index = |j: usize, i: usize, ss: usize| (j * m + i) * s + ss;
    let groups: Vec<Vec<usize>> = (0..n)
        .map(|j| {
            (0..m)
                .flat_map(|i| (0..s).map(move |ss| (i, ss)))
                .map(|(i, ss)| x_index(j, i, ss))
                .collect()
        })
        .collect();
    let mut extra = Vec::new();
    for i in 0..m {
        for ss in 0..s {
            let coeffs: Vec<(usize, f64)> = (0..n).map(|j| (x_index(j, i, ss), -1.0)).collect();
            extra.push(BaseRow { coeffs, rhs: -(inst.c() as f64) });
        }
    }
    if nvars > 64 {
        return Err(RelaxError::Sa(SaError::BaseTooLarge(nvars)));
    }
    Ok(BaseLp::new(nvars, groups, extra)?)
}

/// 0/1 assignment vector x for an interval schedule, for feeding the lift
/// checker. Machine labels are mapped to 0..m in order of first use.
pub fn assignment_vector(
    inst: &Instance,
    m: usize,
    s_intervals: u32,
    sched: &IntervalSchedule,
) -> Vec<f64> {
    let n = inst.n();
    let s = s_intervals as usize;
    let mut machine_map: Vec<(u32, usize)> = Vec::new();
    let mut x = vec![0.0; n * m * s];
    for (&j, &(si, mi)) in &sched.assign {
        let mapped = match machine_map.iter().find(|&&(orig, _)| orig == mi) {
            Some(&(_, idx)) => idx,
            None => {
                let idx = machine_map.len();
                machine_map.push((mi, idx));
                idx
            }
        };
        assert!(mapped < m, "schedule uses more machines than the lift");
        x[(j as usize * m + mapped) * s + si as usize] = 1.0;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::testutil::{sample10, sample10_schedule, units};
    use crate::instance::{Job, MachineCount, Weight};
    use crate::oracle::solve_lp_exact;
    use crate::sa_lift::{check_lift_feasibility, integral_lift};

    #[test]
    fn pair_indexing_is_a_bijection() {
        let n = 7;
        let mut seen = vec![false; pair_count(n)];
        for a in 0..n {
            for b in a + 1..n {
                let k = pair_index(n, a, b);
                assert!(!seen[k]);
                seen[k] = true;
                assert_eq!(k, pair_index(n, b, a));
            }
        }
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn chain_fits_single_interval() {
        // two jobs in a chain, c = 2, m = 1, S = 1: C pinned to 0 forces
        // y = 1, which the capacity row allows
        let inst = units(2, &[(0, 1)], 2, MachineCount::Finite(1));
        let compact = build_compact_makespan_lp(&inst, 1, 1).unwrap();
        let (outcome, sol) = compact.solve().unwrap();
        assert_eq!(outcome.status, LpStatus::Optimal);
        let sol = sol.unwrap();
        assert!((sol.y(0, 1) - 1.0).abs() <= 1e-6);
        assert!(sol.c_times[0].abs() <= 1e-7 && sol.c_times[1].abs() <= 1e-7);
    }

    #[test]
    fn capacity_precondition_is_checked() {
        let inst = units(2, &[], 1, MachineCount::Finite(1));
        assert!(matches!(
            build_compact_makespan_lp(&inst, 1, 1),
            Err(RelaxError::CapacityPrecondition { n: 2, capacity: 1 })
        ));
    }

    #[test]
    fn sample10_integral_point_satisfies_all_rows() {
        let inst = sample10(MachineCount::Finite(10));
        let compact = build_compact_makespan_lp(&inst, 10, 2).unwrap();
        let sol = solution_from_interval_schedule(&inst, &sample10_schedule(), 2);
        let point = compact.point_from_solution(&sol);
        assert!(compact.max_violation_with_triangles(&point) <= 1e-7);
    }

    #[test]
    fn min_feasible_s_examples() {
        let single = units(1, &[], 3, MachineCount::Finite(1));
        assert_eq!(min_feasible_s(&single, 1).unwrap().0, 1);

        // antichain of k*c units on k machines fills one interval exactly
        let k = 3usize;
        let c = 2i64;
        let anti = units(k * c as usize, &[], c, MachineCount::Finite(k));
        assert_eq!(min_feasible_s(&anti, k).unwrap().0, 1);

        // the 10-job sample: S = 1 is infeasible because the hub job has 4
        // comparable partners and the capacity row tops out at c - 1 = 3
        let inst = sample10(MachineCount::Finite(10));
        let (s, sol) = min_feasible_s(&inst, 10).unwrap();
        assert_eq!(s, 2);
        assert_eq!(sol.s_intervals, 2);
    }

    #[test]
    fn extract_semimetric_of_integral_solution_is_cut_metric() {
        let inst = sample10(MachineCount::Finite(10));
        let sol = solution_from_interval_schedule(&inst, &sample10_schedule(), 2);
        let metric = extract_semimetric(&sol).unwrap();
        for a in 0..10 {
            for b in 0..10 {
                let v = metric.dist(a, b);
                assert!(v == 0.0 || v == 1.0);
            }
        }
        // same block pairs at distance zero
        assert_eq!(metric.dist(0, 1), 0.0);
        assert_eq!(metric.dist(6, 8), 0.0);
        assert_eq!(metric.dist(0, 2), 1.0);
    }

    #[test]
    fn extract_semimetric_rejects_triangle_violation() {
        let sol = FractionalSolution {
            n: 3,
            y: vec![0.9, 0.0, 0.9], // d = (0.1, 1.0, 0.1): 1.0 > 0.2
            c_times: vec![0.0; 3],
            z: None,
            s_intervals: 1,
            t_slots: 8,
            objective: 0.0,
        };
        assert!(matches!(
            extract_semimetric(&sol),
            Err(RelaxError::Axiom { .. })
        ));
    }

    #[test]
    fn zero_clique_passes_capacity_echo() {
        // y = 1 on a clique of c jobs: d = 0, ball of radius 0 holds c points
        let c = 3i64;
        let n = c as usize;
        let sol = FractionalSolution {
            n,
            y: vec![1.0; pair_count(n)],
            c_times: vec![0.0; n],
            z: None,
            s_intervals: 1,
            t_slots: c,
            objective: 0.0,
        };
        let metric = extract_semimetric(&sol).unwrap();
        assert_eq!(metric.diameter(&[0, 1, 2]), 0.0);
    }

    #[test]
    fn random_lp_outputs_have_valid_metrics() {
        use rand::Rng;
        let mut rng = crate::rng::stream(31, 0);
        for trial in 0..6 {
            let n = rng.gen_range(8..16);
            let mut edges = Vec::new();
            for a in 0..n as u32 {
                for b in (a + 1)..n as u32 {
                    if rng.gen_bool(0.25) {
                        edges.push((a, b));
                    }
                }
            }
            let inst = units(n, &edges, 4, MachineCount::Finite(3));
            let (_, sol) = min_feasible_s(&inst, 3).unwrap();
            let metric = extract_semimetric(&sol)
                .unwrap_or_else(|e| panic!("trial {trial}: {e}"));
            assert_eq!(metric.n(), n);
        }
    }

    #[test]
    fn neighborhood_examples() {
        let inst = sample10(MachineCount::Finite(10));
        let sol = solution_from_interval_schedule(&inst, &sample10_schedule(), 2);
        let metric = extract_semimetric(&sol).unwrap();
        // job 6 (id "7") shares its block with ids "9" and "10"
        assert_eq!(neighborhood(&metric, &[6], 0.0), vec![6, 8, 9]);
        assert_eq!(neighborhood(&metric, &[6], 0.5), vec![6, 8, 9]);
        assert_eq!(neighborhood(&metric, &[6], 1.0).len(), 10);
    }

    #[test]
    fn wct_lp_single_job() {
        let jobs = vec![Job { id: "a".into(), p: 1, w: Weight::from_integer(1) }];
        let inst = Instance::new(jobs, &[], 2, MachineCount::Finite(1)).unwrap();
        let compact = build_compact_wct_lp(&inst, 1, 1).unwrap();
        let (outcome, sol) = compact.solve().unwrap();
        assert_eq!(outcome.status, LpStatus::Optimal);
        let sol = sol.unwrap();
        assert!((sol.objective - 1.0).abs() <= 1e-6);
        assert!((sol.z.as_ref().unwrap()[0][0] - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn wct_lp_chain_matches_exact_simplex() {
        let jobs = vec![
            Job { id: "a".into(), p: 1, w: Weight::from_integer(1) },
            Job { id: "b".into(), p: 1, w: Weight::from_integer(1) },
        ];
        let inst = Instance::new(jobs, &[(0, 1)], 2, MachineCount::Finite(1)).unwrap();
        let compact = build_compact_wct_lp(&inst, 1, 1).unwrap();
        let (outcome, sol) = compact.solve().unwrap();
        assert_eq!(outcome.status, LpStatus::Optimal);
        let sol = sol.unwrap();
        assert!((sol.objective - 3.0).abs() <= 1e-6, "objective {}", sol.objective);
        assert!((sol.c_times[0] - 1.0).abs() <= 1e-6);
        assert!((sol.c_times[1] - 2.0).abs() <= 1e-6);
        let exact = solve_lp_exact(&compact.lp).unwrap();
        use num_traits::ToPrimitive;
        assert!((exact.objective.to_f64().unwrap() - sol.objective).abs() <= 1e-7);
    }

    #[test]
    fn wct_lp_antichain_all_first_slot() {
        let k = 3usize;
        let inst = units(k, &[], 2, MachineCount::Finite(k));
        let compact = build_compact_wct_lp(&inst, k, 2).unwrap();
        let (outcome, sol) = compact.solve().unwrap();
        assert_eq!(outcome.status, LpStatus::Optimal);
        assert!((sol.unwrap().objective - k as f64).abs() <= 1e-6);
    }

    #[test]
    fn wct_dilated_schedule_is_feasible_with_doubled_objective() {
        use std::collections::BTreeMap;
        // chain of 3 on one machine plus a cross-machine successor
        let inst = units(4, &[(0, 1), (1, 2), (1, 3)], 2, MachineCount::Unbounded);
        let mut assign = BTreeMap::new();
        assign.insert(0u32, (0i64, 1u32));
        assign.insert(1, (1, 1));
        assign.insert(2, (2, 1));
        assign.insert(3, (4, 2)); // delay c = 2 after job 1 ends at slot 2
        let sched = TimedSchedule { assign };
        let report = crate::instance::verify_timed_schedule(&inst, &sched).unwrap();
        assert!(report.feasible);
        // dilated horizon: completions up to 5 -> dilated up to 9
        let compact = build_compact_wct_lp(&inst, inst.n(), 5).unwrap();
        let point = wct_point_from_schedule(&inst, &sched, &compact).unwrap();
        assert!(
            compact.max_violation_with_triangles(&point) <= 1e-7,
            "violation {}",
            compact.max_violation_with_triangles(&point)
        );
        let original: f64 = sched
            .assign
            .iter()
            .map(|(_, &(start, _))| (start + 1) as f64)
            .sum();
        let embedded: f64 = compact.lp.objective_value(&point);
        assert!(embedded <= 2.0 * original + 1e-9);
    }

    #[test]
    fn full_q_tiny_is_feasible_and_projects_into_compact() {
        let inst = units(2, &[(0, 1)], 2, MachineCount::Finite(1));
        let full = build_full_q(&inst, 1, 1, 2).unwrap();
        let out = crate::lpsolve::solve_lp(&full.lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
        // project y and C onto the compact LP and check every row
        let compact = build_compact_makespan_lp(&inst, 1, 1).unwrap();
        let mut point = vec![0.0; compact.lp.vars.len()];
        point[compact.y_base] = out.values[full.y_base];
        point[compact.c_base] = out.values[full.c_base];
        point[compact.c_base + 1] = out.values[full.c_base + 1];
        assert!(compact.max_violation_with_triangles(&point) <= 1e-6);
    }

    #[test]
    fn full_q_rank0_has_no_linking_rows() {
        let inst = units(2, &[(0, 1)], 2, MachineCount::Finite(1));
        let full = build_full_q(&inst, 1, 1, 0).unwrap();
        assert!(full.lp.rows.iter().all(|r| !r.name.starts_with("ylink")));
        let out = crate::lpsolve::solve_lp(&full.lp).unwrap();
        assert_eq!(out.status, LpStatus::Optimal);
    }

    #[test]
    fn sample10_integral_lift_feasible_in_full_q_base() {
        // the 2-interval schedule on its three used machines, checked by
        // streaming evaluation of the rank-2 lift
        let inst = sample10(MachineCount::Finite(3));
        let sched = sample10_schedule();
        let base = full_q_base(&inst, 3, 2).unwrap();
        let x = assignment_vector(&inst, 3, 2, &sched);
        assert!(base.is_feasible(&x, 1e-9));
        let lifted = integral_lift(&x, 2).unwrap();
        check_lift_feasibility(&base, 2, &lifted, 1e-9).unwrap();
    }
}
