//! Instance model, precedence closure, schedule representations, feasibility
//! verification, trivial lower bounds, and the unit-job splitting transform.
//!
//! An [`Instance`] owns its precedence order as a transitive closure: callers
//! may feed any acyclic edge list and every query (`precedes`, `preds`,
//! `succs`) answers with respect to the closure. Jobs are addressed by dense
//! indices internally; string ids only appear at the JSON boundary.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;
use serde_json::{json, Value};
use thiserror::Error;

/// Job weights are exact rationals so objective values never drift.
pub type Weight = Rational64;

pub const MAX_DURATION: i64 = i32::MAX as i64;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("duplicate job id {0:?}")]
    DuplicateId(String),
    #[error("precedence references unknown job id {0:?}")]
    UnknownId(String),
    #[error("self-loop on job {0:?}")]
    SelfLoop(String),
    #[error("cyclic precedence (cycle through job {0:?})")]
    CyclicPrecedence(String),
    #[error("communication delay must be >= 1, got {0}; for c = 0 use plain list scheduling (the delay-free problem)")]
    InvalidDelay(i64),
    #[error("job {id:?} has invalid duration {p} (must be in 1..={MAX_DURATION})")]
    InvalidDuration { id: String, p: i64 },
    #[error("machine count must be >= 1 or \"inf\", got {0}")]
    InvalidMachines(i64),
    #[error("job {id:?} has invalid weight: {reason}")]
    InvalidWeight { id: String, reason: String },
    #[error("schedule leaves job {0:?} unassigned")]
    UnassignedJob(String),
    #[error("schedule assigns unknown job id {0:?}")]
    UnknownScheduledJob(String),
    #[error("schedule kind must be \"interval\" or \"timed\", got {0:?}")]
    BadScheduleKind(String),
    #[error("job {id:?}: machine index must be >= 1")]
    BadMachineIndex { id: String },
    #[error("job {id:?}: start value must be >= 0")]
    BadStartValue { id: String },
}

#[derive(Debug, Clone)]
pub struct Job {
    pub id: String,
    pub p: i64,
    pub w: Weight,
}

/// Machine count as given; the sentinel maps to `m := n` on resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MachineCount {
    Finite(usize),
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct Instance {
    jobs: Vec<Job>,
    c: i64,
    machines: MachineCount,
    /// Input edges, deduped and sorted.
    direct: Vec<(u32, u32)>,
    /// Transitive closure as sorted pairs.
    closure: Vec<(u32, u32)>,
    preds: Vec<Vec<u32>>,
    succs: Vec<Vec<u32>>,
    topo: Vec<u32>,
    pair_set: HashSet<(u32, u32)>,
    id_index: HashMap<String, u32>,
}

impl Instance {
    /// Builds an instance from raw parts, validating every invariant and
    /// replacing `edges` by its transitive closure.
    pub fn new(
        jobs: Vec<Job>,
        edges: &[(u32, u32)],
        c: i64,
        machines: MachineCount,
    ) -> Result<Self, InstanceError> {
        if c < 1 {
            return Err(InstanceError::InvalidDelay(c));
        }
        if let MachineCount::Finite(0) = machines {
            return Err(InstanceError::InvalidMachines(0));
        }
        let mut id_index = HashMap::new();
        for (idx, job) in jobs.iter().enumerate() {
            if job.p < 1 || job.p > MAX_DURATION {
                return Err(InstanceError::InvalidDuration {
                    id: job.id.clone(),
                    p: job.p,
                });
            }
            if job.w < Weight::zero() {
                return Err(InstanceError::InvalidWeight {
                    id: job.id.clone(),
                    reason: format!("negative weight {}", job.w),
                });
            }
            if id_index.insert(job.id.clone(), idx as u32).is_some() {
                return Err(InstanceError::DuplicateId(job.id.clone()));
            }
        }
        let n = jobs.len();
        let mut direct: Vec<(u32, u32)> = Vec::new();
        for &(a, b) in edges {
            assert!((a as usize) < n && (b as usize) < n, "edge index out of range");
            if a == b {
                return Err(InstanceError::SelfLoop(jobs[a as usize].id.clone()));
            }
            direct.push((a, b));
        }
        direct.sort_unstable();
        direct.dedup();

        let topo = topo_sort(n, &direct).map_err(|j| {
            InstanceError::CyclicPrecedence(jobs[j as usize].id.clone())
        })?;

        // Reachability over reverse topological order, one bitset row per job.
        let words = n.div_ceil(64).max(1);
        let mut reach = vec![0u64; n * words];
        let mut out_adj = vec![Vec::new(); n];
        for &(a, b) in &direct {
            out_adj[a as usize].push(b);
        }
        for &j in topo.iter().rev() {
            let j = j as usize;
            for s_idx in 0..out_adj[j].len() {
                let s = out_adj[j][s_idx] as usize;
                reach[j * words + s / 64] |= 1 << (s % 64);
                let (row_j, row_s) = if j < s {
                    let (lo, hi) = reach.split_at_mut(s * words);
                    (&mut lo[j * words..j * words + words], &hi[..words])
                } else {
                    let (lo, hi) = reach.split_at_mut(j * words);
                    (&mut hi[..words], &lo[s * words..s * words + words])
                };
                for w in 0..words {
                    row_j[w] |= row_s[w];
                }
            }
        }

        let mut closure = Vec::new();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        let mut pair_set = HashSet::new();
        for a in 0..n {
            for w in 0..words {
                let mut bits = reach[a * words + w];
                while bits != 0 {
                    let b = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    closure.push((a as u32, b as u32));
                    succs[a].push(b as u32);
                    preds[b].push(a as u32);
                    pair_set.insert((a as u32, b as u32));
                }
            }
        }
        closure.sort_unstable();
        for list in preds.iter_mut().chain(succs.iter_mut()) {
            list.sort_unstable();
        }

        Ok(Instance {
            jobs,
            c,
            machines,
            direct,
            closure,
            preds,
            succs,
            topo,
            pair_set,
            id_index,
        })
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    /// Resolved machine count; the unbounded sentinel maps to `n` (at least 1).
    pub fn m(&self) -> usize {
        match self.machines {
            MachineCount::Finite(m) => m,
            MachineCount::Unbounded => self.jobs.len().max(1),
        }
    }

    pub fn machines(&self) -> MachineCount {
        self.machines
    }

    pub fn jobs(&self) -> &[Job] {
        &self.jobs
    }

    pub fn job(&self, idx: u32) -> &Job {
        &self.jobs[idx as usize]
    }

    pub fn index_of(&self, id: &str) -> Option<u32> {
        self.id_index.get(id).copied()
    }

    pub fn id(&self, idx: u32) -> &str {
        &self.jobs[idx as usize].id
    }

    /// True iff `a` precedes `b` in the transitive closure.
    pub fn precedes(&self, a: u32, b: u32) -> bool {
        self.pair_set.contains(&(a, b))
    }

    pub fn comparable(&self, a: u32, b: u32) -> bool {
        self.precedes(a, b) || self.precedes(b, a)
    }

    /// Predecessors of `j` in the closure, sorted by index.
    pub fn preds(&self, j: u32) -> &[u32] {
        &self.preds[j as usize]
    }

    pub fn succs(&self, j: u32) -> &[u32] {
        &self.succs[j as usize]
    }

    /// All closure pairs, sorted.
    pub fn closure(&self) -> &[(u32, u32)] {
        &self.closure
    }

    /// The input edges (deduped, sorted); closure is derived from these.
    pub fn direct_edges(&self) -> &[(u32, u32)] {
        &self.direct
    }

    pub fn topo_order(&self) -> &[u32] {
        &self.topo
    }

    pub fn is_unit(&self) -> bool {
        self.jobs.iter().all(|j| j.p == 1)
    }

    pub fn total_work(&self) -> i64 {
        self.jobs.iter().map(|j| j.p).sum()
    }

    pub fn to_json_value(&self) -> Value {
        let m_value = match self.machines {
            MachineCount::Finite(m) => json!(m),
            MachineCount::Unbounded => json!("inf"),
        };
        let jobs: Vec<Value> = self
            .jobs
            .iter()
            .map(|j| {
                json!({
                    "id": j.id,
                    "p": j.p,
                    "w": [*j.w.numer(), *j.w.denom()],
                })
            })
            .collect();
        let prec: Vec<Value> = self
            .direct
            .iter()
            .map(|&(a, b)| json!([self.id(a), self.id(b)]))
            .collect();
        json!({ "c": self.c, "m": m_value, "jobs": jobs, "prec": prec })
    }
}

fn topo_sort(n: usize, edges: &[(u32, u32)]) -> Result<Vec<u32>, u32> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let mut indeg = vec![0usize; n];
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a as usize].push(b);
        indeg[b as usize] += 1;
    }
    // smallest-index-first for a canonical order
    let mut ready: BinaryHeap<Reverse<u32>> = (0..n as u32)
        .filter(|&j| indeg[j as usize] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(j)) = ready.pop() {
        order.push(j);
        for &s in &adj[j as usize] {
            indeg[s as usize] -= 1;
            if indeg[s as usize] == 0 {
                ready.push(Reverse(s));
            }
        }
    }
    if order.len() != n {
        let stuck = (0..n).find(|&j| indeg[j] > 0).unwrap();
        return Err(stuck as u32);
    }
    Ok(order)
}

/// Parses the instance interchange JSON:
/// `{"c": int, "m": int|"inf", "jobs": [{"id", "p", "w"}...], "prec": [["a","b"]...]}`.
/// `w` is an integer or a `[numerator, denominator]` pair and defaults to 0.
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| InstanceError::MalformedJson(e.to_string()))?;
    instance_from_value(&value)
}

pub fn instance_from_value(value: &Value) -> Result<Instance, InstanceError> {
    let obj = value
        .as_object()
        .ok_or_else(|| InstanceError::MalformedJson("top level must be an object".into()))?;
    let c = obj
        .get("c")
        .and_then(Value::as_i64)
        .ok_or_else(|| InstanceError::MalformedJson("missing integer field \"c\"".into()))?;
    let machines = match obj.get("m") {
        Some(Value::String(s)) if s == "inf" => MachineCount::Unbounded,
        Some(v) => {
            let m = v.as_i64().ok_or_else(|| {
                InstanceError::MalformedJson("field \"m\" must be an integer or \"inf\"".into())
            })?;
            if m < 1 {
                return Err(InstanceError::InvalidMachines(m));
            }
            MachineCount::Finite(m as usize)
        }
        None => {
            return Err(InstanceError::MalformedJson(
                "missing field \"m\" (integer or \"inf\")".into(),
            ))
        }
    };
    let jobs_value = obj
        .get("jobs")
        .and_then(Value::as_array)
        .ok_or_else(|| InstanceError::MalformedJson("missing array field \"jobs\"".into()))?;
    let mut jobs = Vec::with_capacity(jobs_value.len());
    for jv in jobs_value {
        let jo = jv
            .as_object()
            .ok_or_else(|| InstanceError::MalformedJson("job entries must be objects".into()))?;
        let id = jo
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| InstanceError::MalformedJson("job missing string \"id\"".into()))?
            .to_string();
        let p = jo
            .get("p")
            .and_then(Value::as_i64)
            .ok_or_else(|| InstanceError::MalformedJson(format!("job {id:?} missing integer \"p\"")))?;
        let w = match jo.get("w") {
            None | Some(Value::Null) => Weight::zero(),
            Some(v) => parse_weight(v, &id)?,
        };
        jobs.push(Job { id, p, w });
    }
    let prec_value = obj
        .get("prec")
        .and_then(Value::as_array)
        .ok_or_else(|| InstanceError::MalformedJson("missing array field \"prec\"".into()))?;
    // Resolve ids after the duplicate check inside Instance::new; build a
    // temporary map here for edge resolution.
    let mut seen = HashMap::new();
    for (idx, job) in jobs.iter().enumerate() {
        if seen.insert(job.id.clone(), idx as u32).is_some() {
            return Err(InstanceError::DuplicateId(job.id.clone()));
        }
    }
    let mut edges = Vec::with_capacity(prec_value.len());
    for pv in prec_value {
        let pair = pv
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| InstanceError::MalformedJson("prec entries must be [from, to] pairs".into()))?;
        let a = pair[0]
            .as_str()
            .ok_or_else(|| InstanceError::MalformedJson("prec endpoints must be strings".into()))?;
        let b = pair[1]
            .as_str()
            .ok_or_else(|| InstanceError::MalformedJson("prec endpoints must be strings".into()))?;
        let ai = *seen
            .get(a)
            .ok_or_else(|| InstanceError::UnknownId(a.to_string()))?;
        let bi = *seen
            .get(b)
            .ok_or_else(|| InstanceError::UnknownId(b.to_string()))?;
        edges.push((ai, bi));
    }
    Instance::new(jobs, &edges, c, machines)
}

fn parse_weight(v: &Value, id: &str) -> Result<Weight, InstanceError> {
    match v {
        Value::Number(n) => {
            let num = n.as_i64().ok_or_else(|| InstanceError::InvalidWeight {
                id: id.to_string(),
                reason: format!(
                    "{n} is not an integer; serialize fractional weights as [numerator, denominator]"
                ),
            })?;
            if num < 0 {
                return Err(InstanceError::InvalidWeight {
                    id: id.to_string(),
                    reason: format!("negative weight {num}"),
                });
            }
            Ok(Weight::from_integer(num))
        }
        Value::Array(pair) if pair.len() == 2 => {
            let num = pair[0].as_i64().ok_or_else(|| InstanceError::InvalidWeight {
                id: id.to_string(),
                reason: "numerator must be an integer".into(),
            })?;
            let den = pair[1].as_i64().ok_or_else(|| InstanceError::InvalidWeight {
                id: id.to_string(),
                reason: "denominator must be an integer".into(),
            })?;
            if den < 1 {
                return Err(InstanceError::InvalidWeight {
                    id: id.to_string(),
                    reason: format!("denominator must be >= 1, got {den}"),
                });
            }
            if num < 0 {
                return Err(InstanceError::InvalidWeight {
                    id: id.to_string(),
                    reason: format!("negative weight {num}/{den}"),
                });
            }
            Ok(Weight::new(num, den))
        }
        other => Err(InstanceError::InvalidWeight {
            id: id.to_string(),
            reason: format!("expected number or [num, den], got {other}"),
        }),
    }
}

/// Assignment of jobs to (interval index, machine index) pairs.
/// Machine indices are 1-based and interval-local: the pair `(s, i)` names a
/// machine slot within interval `s` only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalSchedule {
    pub assign: BTreeMap<u32, (u32, u32)>,
}

impl IntervalSchedule {
    pub fn s_used(&self) -> u32 {
        self.assign.values().map(|&(s, _)| s + 1).max().unwrap_or(0)
    }
}

/// Assignment of jobs to (start time, machine index) pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedSchedule {
    pub assign: BTreeMap<u32, (i64, u32)>,
}

impl TimedSchedule {
    pub fn makespan(&self, inst: &Instance) -> i64 {
        self.assign
            .iter()
            .map(|(&j, &(t, _))| t + inst.job(j).p)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub enum Schedule {
    Interval(IntervalSchedule),
    Timed(TimedSchedule),
}

/// Parses schedule interchange JSON:
/// `{"kind": "interval"|"timed", "assign": {"id": [s_or_t, machine]}}`.
pub fn parse_schedule(inst: &Instance, text: &str) -> Result<Schedule, InstanceError> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| InstanceError::MalformedJson(e.to_string()))?;
    let obj = value
        .as_object()
        .ok_or_else(|| InstanceError::MalformedJson("top level must be an object".into()))?;
    let kind = obj
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| InstanceError::MalformedJson("missing string field \"kind\"".into()))?;
    let assign_value = obj
        .get("assign")
        .and_then(Value::as_object)
        .ok_or_else(|| InstanceError::MalformedJson("missing object field \"assign\"".into()))?;
    let mut pairs = Vec::new();
    for (id, slot) in assign_value {
        let idx = inst
            .index_of(id)
            .ok_or_else(|| InstanceError::UnknownScheduledJob(id.clone()))?;
        let pair = slot
            .as_array()
            .filter(|a| a.len() == 2)
            .ok_or_else(|| InstanceError::MalformedJson(format!("assign[{id:?}] must be [slot, machine]")))?;
        let start = pair[0]
            .as_i64()
            .ok_or_else(|| InstanceError::MalformedJson(format!("assign[{id:?}][0] must be an integer")))?;
        let machine = pair[1]
            .as_i64()
            .ok_or_else(|| InstanceError::MalformedJson(format!("assign[{id:?}][1] must be an integer")))?;
        if machine < 1 {
            return Err(InstanceError::BadMachineIndex { id: id.clone() });
        }
        if start < 0 {
            return Err(InstanceError::BadStartValue { id: id.clone() });
        }
        pairs.push((idx, start, machine as u32));
    }
    match kind {
        "interval" => Ok(Schedule::Interval(IntervalSchedule {
            assign: pairs
                .into_iter()
                .map(|(j, s, i)| (j, (s as u32, i)))
                .collect(),
        })),
        "timed" => Ok(Schedule::Timed(TimedSchedule {
            assign: pairs.into_iter().map(|(j, t, i)| (j, (t, i))).collect(),
        })),
        other => Err(InstanceError::BadScheduleKind(other.to_string())),
    }
}

pub fn schedule_to_json(inst: &Instance, schedule: &Schedule) -> Value {
    match schedule {
        Schedule::Interval(s) => {
            let mut assign = serde_json::Map::new();
            for (&j, &(slot, machine)) in &s.assign {
                assign.insert(inst.id(j).to_string(), json!([slot, machine]));
            }
            json!({ "kind": "interval", "assign": assign })
        }
        Schedule::Timed(s) => {
            let mut assign = serde_json::Map::new();
            for (&j, &(t, machine)) in &s.assign {
                assign.insert(inst.id(j).to_string(), json!([t, machine]));
            }
            json!({ "kind": "timed", "assign": assign })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Interval (s, i) carries more than c units of work.
    IntervalOverload { s: u32, machine: u32, load: i64 },
    /// j1 precedes j2 but the interval assignment does not order them.
    IntervalPrecedence { j1: u32, j2: u32 },
    /// Two jobs overlap on one machine.
    Overlap { machine: u32, j1: u32, j2: u32 },
    /// j1 precedes j2 but j2 starts too early (same machine).
    TimedPrecedence { j1: u32, j2: u32 },
    /// j1 precedes j2 on different machines and the delay is not respected.
    TimedDelay { j1: u32, j2: u32 },
}

#[derive(Debug, Clone)]
pub struct IntervalReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    pub s_used: u32,
}

/// Checks both interval-schedule invariants: per-(interval, machine) load at
/// most c, and every precedence pair either strictly ordered by interval or
/// co-located on one (interval, machine) pair.
pub fn verify_interval_schedule(
    inst: &Instance,
    schedule: &IntervalSchedule,
) -> Result<IntervalReport, InstanceError> {
    for j in 0..inst.n() as u32 {
        if !schedule.assign.contains_key(&j) {
            return Err(InstanceError::UnassignedJob(inst.id(j).to_string()));
        }
    }
    let mut violations = Vec::new();
    let mut load: BTreeMap<(u32, u32), i64> = BTreeMap::new();
    for (&j, &(s, i)) in &schedule.assign {
        *load.entry((s, i)).or_insert(0) += inst.job(j).p;
    }
    for (&(s, i), &l) in &load {
        if l > inst.c() {
            violations.push(Violation::IntervalOverload { s, machine: i, load: l });
        }
    }
    for &(j1, j2) in inst.closure() {
        let (s1, i1) = schedule.assign[&j1];
        let (s2, i2) = schedule.assign[&j2];
        if !(s1 < s2 || (s1, i1) == (s2, i2)) {
            violations.push(Violation::IntervalPrecedence { j1, j2 });
        }
    }
    Ok(IntervalReport {
        feasible: violations.is_empty(),
        violations,
        s_used: schedule.s_used(),
    })
}

#[derive(Debug, Clone)]
pub struct TimedReport {
    pub feasible: bool,
    pub makespan: i64,
    pub weighted_completion: BigRational,
    pub violations: Vec<Violation>,
}

/// Checks the timed-schedule invariants: machine-disjoint executions, and for
/// every precedence pair either same-machine sequencing or a gap of at least
/// c between completion and start.
pub fn verify_timed_schedule(
    inst: &Instance,
    schedule: &TimedSchedule,
) -> Result<TimedReport, InstanceError> {
    for j in 0..inst.n() as u32 {
        if !schedule.assign.contains_key(&j) {
            return Err(InstanceError::UnassignedJob(inst.id(j).to_string()));
        }
    }
    let mut violations = Vec::new();
    let mut by_machine: BTreeMap<u32, Vec<(i64, u32)>> = BTreeMap::new();
    for (&j, &(t, i)) in &schedule.assign {
        by_machine.entry(i).or_default().push((t, j));
    }
    for (&machine, jobs) in by_machine.iter_mut() {
        jobs.sort_unstable();
        for pair in jobs.windows(2) {
            let (t1, j1) = pair[0];
            let (t2, j2) = pair[1];
            if t1 + inst.job(j1).p > t2 {
                violations.push(Violation::Overlap { machine, j1, j2 });
            }
        }
    }
    for &(j1, j2) in inst.closure() {
        let (t1, i1) = schedule.assign[&j1];
        let (t2, i2) = schedule.assign[&j2];
        let end1 = t1 + inst.job(j1).p;
        if i1 == i2 {
            if t2 < end1 {
                violations.push(Violation::TimedPrecedence { j1, j2 });
            }
        } else if t2 < end1 + inst.c() {
            violations.push(Violation::TimedDelay { j1, j2 });
        }
    }
    let makespan = schedule.makespan(inst);
    let mut weighted = BigRational::zero();
    for (&j, &(t, _)) in &schedule.assign {
        let job = inst.job(j);
        let completion = BigRational::from_integer(BigInt::from(t + job.p));
        let w = BigRational::new(BigInt::from(*job.w.numer()), BigInt::from(*job.w.denom()));
        weighted += w * completion;
    }
    Ok(TimedReport {
        feasible: violations.is_empty(),
        makespan,
        weighted_completion: weighted,
        violations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// ceil(total work / m)
    pub load: i64,
    /// maximum total work along a precedence chain
    pub chain: i64,
}

/// Trivial makespan lower bounds: machine load and longest chain.
pub fn lower_bounds(inst: &Instance) -> Bounds {
    let total = inst.total_work();
    let m = inst.m() as i64;
    let load = (total + m - 1) / m;
    let mut best = vec![0i64; inst.n()];
    let mut chain = 0;
    for &j in inst.topo_order() {
        let p = inst.job(j).p;
        let from_preds = inst
            .preds(j)
            .iter()
            .map(|&q| best[q as usize])
            .max()
            .unwrap_or(0);
        best[j as usize] = from_preds + p;
        chain = chain.max(best[j as usize]);
    }
    Bounds { load, chain }
}

/// Maps original job indices to their ordered unit sub-jobs and back.
#[derive(Debug, Clone)]
pub struct SplitMapping {
    /// Original job index -> sub-job indices in chain order.
    pub subs: Vec<Vec<u32>>,
    /// Sub-job index -> (original job index, 0-based position in the chain).
    pub origin: Vec<(u32, u32)>,
}

/// Splits every job of length p into a chain of p unit sub-jobs; predecessors
/// attach to the first link, successors to the last. The weight rides on the
/// final link so completion semantics are preserved.
pub fn split_to_units(inst: &Instance) -> (Instance, SplitMapping) {
    let mut jobs = Vec::new();
    let mut subs = vec![Vec::new(); inst.n()];
    let mut origin = Vec::new();
    let mut used: HashSet<String> = inst.jobs().iter().map(|j| j.id.clone()).collect();
    for (idx, job) in inst.jobs().iter().enumerate() {
        if job.p == 1 {
            // keep the id so the identity case round-trips
            let new_idx = jobs.len() as u32;
            jobs.push(job.clone());
            subs[idx].push(new_idx);
            origin.push((idx as u32, 0));
            continue;
        }
        for k in 1..=job.p {
            let mut id = format!("{}#{}", job.id, k);
            while !used.insert(id.clone()) {
                id.push('#');
            }
            let new_idx = jobs.len() as u32;
            jobs.push(Job {
                id,
                p: 1,
                w: if k == job.p { job.w } else { Weight::zero() },
            });
            subs[idx].push(new_idx);
            origin.push((idx as u32, (k - 1) as u32));
        }
    }
    let mut edges = Vec::new();
    for chain in &subs {
        for pair in chain.windows(2) {
            edges.push((pair[0], pair[1]));
        }
    }
    for &(a, b) in inst.direct_edges() {
        let last_a = *subs[a as usize].last().unwrap();
        let first_b = subs[b as usize][0];
        edges.push((last_a, first_b));
    }
    let split = Instance::new(jobs, &edges, inst.c(), inst.machines())
        .expect("splitting preserves validity");
    (split, SplitMapping { subs, origin })
}
