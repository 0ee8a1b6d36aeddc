//! Greedy list scheduling under communication delays, and the chain-based
//! makespan bound it satisfies.
//!
//! The scheduler sweeps time; at each instant it scans machines in order and
//! places the highest-priority job whose predecessors finished by `t` on the
//! same machine or by `t - c` elsewhere. The sweep jumps between event times
//! (machine releases and completion-plus-delay instants), which places
//! exactly the schedule the unit-step sweep would.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::instance::{Instance, TimedSchedule};

/// Total order over jobs; earlier position means higher priority.
#[derive(Debug, Clone)]
pub struct PriorityList {
    order: Vec<u32>,
    rank: Vec<usize>,
}

impl PriorityList {
    pub fn new(order: Vec<u32>, n: usize) -> Option<Self> {
        if order.len() != n {
            return None;
        }
        let mut rank = vec![usize::MAX; n];
        for (pos, &j) in order.iter().enumerate() {
            let slot = rank.get_mut(j as usize)?;
            if *slot != usize::MAX {
                return None;
            }
            *slot = pos;
        }
        Some(PriorityList { order, rank })
    }

    /// Default priority: non-increasing longest path to a sink (critical
    /// path first), ties by index.
    pub fn critical_path(inst: &Instance) -> Self {
        let n = inst.n();
        let mut downstream = vec![0i64; n];
        for &j in inst.topo_order().iter().rev() {
            let best = inst
                .succs(j)
                .iter()
                .map(|&s| downstream[s as usize])
                .max()
                .unwrap_or(0);
            downstream[j as usize] = best + inst.job(j).p;
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_by_key(|&j| (std::cmp::Reverse(downstream[j as usize]), j));
        Self::new(order, n).unwrap()
    }

    pub fn order(&self) -> &[u32] {
        &self.order
    }

    fn rank(&self, j: u32) -> usize {
        self.rank[j as usize]
    }
}

/// Greedy list scheduling on m machines with communication delays.
/// Never idles a machine while some job is eligible on it.
pub fn list_schedule(inst: &Instance, priority: &PriorityList) -> TimedSchedule {
    let n = inst.n();
    let m = inst.m();
    let c = inst.c();
    let mut start = vec![i64::MIN; n];
    let mut end = vec![i64::MIN; n];
    let mut machine = vec![0usize; n];
    let mut free = vec![0i64; m];
    let mut unscheduled = n;
    let mut t = 0i64;
    while unscheduled > 0 {
        for i in 0..m {
            if free[i] > t {
                continue;
            }
            // the box picks one job per (t, machine) visit
            let mut best: Option<u32> = None;
            for j in 0..n as u32 {
                if start[j as usize] != i64::MIN {
                    continue;
                }
                let eligible = inst.preds(j).iter().all(|&q| {
                    let e = end[q as usize];
                    if e == i64::MIN {
                        return false;
                    }
                    if machine[q as usize] == i {
                        e <= t
                    } else {
                        e <= t - c
                    }
                });
                if eligible && best.map_or(true, |b| priority.rank(j) < priority.rank(b)) {
                    best = Some(j);
                }
            }
            if let Some(j) = best {
                let p = inst.job(j).p;
                start[j as usize] = t;
                end[j as usize] = t + p;
                machine[j as usize] = i;
                free[i] = t + p;
                unscheduled -= 1;
            }
        }
        if unscheduled == 0 {
            break;
        }
        // advance to the next event: a machine release or a
        // completion-plus-delay instant
        let mut next = i64::MAX;
        for &f in &free {
            if f > t {
                next = next.min(f);
            }
        }
        for j in 0..n {
            if end[j] != i64::MIN && end[j] + c > t {
                next = next.min(end[j] + c);
            }
        }
        debug_assert!(next < i64::MAX, "scheduler stalled with jobs remaining");
        t = next;
    }
    TimedSchedule {
        assign: (0..n as u32)
            .map(|j| (j, (start[j as usize], machine[j as usize] as u32 + 1)))
            .collect(),
    }
}

/// The list-scheduling makespan bound: total work spread over m machines plus
/// the heaviest chain with a delay charged per hop.
pub fn chain_bound(inst: &Instance) -> BigRational {
    let n = inst.n();
    let m = inst.m() as i64;
    let total = inst.total_work();
    let mut f = vec![0i64; n];
    let mut heaviest = 0i64;
    for &j in inst.topo_order() {
        let from_preds = inst
            .preds(j)
            .iter()
            .map(|&q| f[q as usize] + inst.c())
            .max()
            .unwrap_or(0);
        f[j as usize] = from_preds + inst.job(j).p;
        heaviest = heaviest.max(f[j as usize]);
    }
    BigRational::new(BigInt::from(total), BigInt::from(m))
        + BigRational::from_integer(BigInt::from(heaviest))
}

/// Re-derives the proof's chain (each step: the latest-finishing
/// predecessor) and checks that every time unit before the makespan is
/// covered by an all-machines-busy period, a chain execution, or the
/// length-c window after a chain job. Returns the first uncovered instant.
pub fn audit_busy_or_chain(inst: &Instance, sched: &TimedSchedule) -> Result<(), i64> {
    if inst.n() == 0 {
        return Ok(());
    }
    let makespan = sched.makespan(inst);
    let end = |j: u32| sched.assign[&j].0 + inst.job(j).p;
    let mut chain = Vec::new();
    let mut current = *sched
        .assign
        .keys()
        .max_by_key(|&&j| (end(j), std::cmp::Reverse(j)))
        .unwrap();
    chain.push(current);
    while let Some(&pred) = inst
        .preds(current)
        .iter()
        .max_by_key(|&&q| (end(q), std::cmp::Reverse(q)))
    {
        chain.push(pred);
        current = pred;
    }
    let m = inst.m();
    for t in 0..makespan {
        let busy = sched
            .assign
            .iter()
            .filter(|(&j, &(s, _))| s <= t && t < s + inst.job(j).p)
            .count();
        let all_busy = busy >= m;
        let on_chain = chain.iter().any(|&j| {
            let (s, _) = sched.assign[&j];
            s <= t && t < s + inst.job(j).p
        });
        let in_delay_window = chain.iter().any(|&j| {
            let e = end(j);
            e <= t && t < e + inst.c()
        });
        if !(all_busy || on_chain || in_delay_window) {
            return Err(t);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::testutil::units;
    use crate::instance::{verify_timed_schedule, MachineCount};
    use num_traits::ToPrimitive;

    #[test]
    fn chain_prefers_one_machine() {
        let inst = units(3, &[(0, 1), (1, 2)], 2, MachineCount::Finite(2));
        let sched = list_schedule(&inst, &PriorityList::critical_path(&inst));
        let report = verify_timed_schedule(&inst, &sched).unwrap();
        assert!(report.feasible);
        assert_eq!(report.makespan, 3);
        let machines: std::collections::HashSet<u32> =
            sched.assign.values().map(|&(_, i)| i).collect();
        assert_eq!(machines.len(), 1);
    }

    #[test]
    fn fork_waits_out_the_delay() {
        // a -> b, a -> c on 2 machines with c = 1 and priority (a, b, c):
        // machine 2 is not eligible at t = 1, so everything chains on
        // machine 1 and the makespan is 3
        let inst = units(3, &[(0, 1), (0, 2)], 1, MachineCount::Finite(2));
        let priority = PriorityList::new(vec![0, 1, 2], 3).unwrap();
        let sched = list_schedule(&inst, &priority);
        assert_eq!(sched.assign[&0], (0, 1));
        assert_eq!(sched.assign[&1], (1, 1));
        assert_eq!(sched.assign[&2], (2, 1));
        let report = verify_timed_schedule(&inst, &sched).unwrap();
        assert!(report.feasible);
        assert_eq!(report.makespan, 3);
    }

    #[test]
    fn antichain_fills_all_machines() {
        let k = 5;
        let inst = units(k, &[], 3, MachineCount::Finite(k));
        let sched = list_schedule(&inst, &PriorityList::critical_path(&inst));
        let report = verify_timed_schedule(&inst, &sched).unwrap();
        assert!(report.feasible);
        assert_eq!(report.makespan, 1);
    }

    #[test]
    fn chain_bound_instantiations() {
        use crate::instance::{Job, Weight};
        let jobs = vec![Job { id: "a".into(), p: 5, w: Weight::zero() }];
        let inst = Instance::new(jobs, &[], 1, MachineCount::Finite(3)).unwrap();
        let b = chain_bound(&inst);
        assert_eq!(b, BigRational::new(BigInt::from(5), BigInt::from(3)) +
            BigRational::from_integer(BigInt::from(5)));

        let inst = units(3, &[(0, 1), (1, 2)], 2, MachineCount::Finite(1));
        let b = chain_bound(&inst);
        assert_eq!(b, BigRational::from_integer(BigInt::from(10)));
    }

    #[test]
    fn makespan_bounded_by_chain_bound_randomized() {
        use rand::Rng;
        let mut rng = crate::rng::stream(77, 0);
        for _ in 0..60 {
            let n = rng.gen_range(2..12);
            let mut edges = Vec::new();
            for a in 0..n as u32 {
                for b in a + 1..n as u32 {
                    if rng.gen_bool(0.3) {
                        edges.push((a, b));
                    }
                }
            }
            let c = rng.gen_range(1..5);
            let m = rng.gen_range(1..4);
            let inst = units(n, &edges, c, MachineCount::Finite(m));
            // random priority permutation
            let mut order: Vec<u32> = (0..n as u32).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                order.swap(i, j);
            }
            let priority = PriorityList::new(order, n).unwrap();
            let sched = list_schedule(&inst, &priority);
            let report = verify_timed_schedule(&inst, &sched).unwrap();
            assert!(report.feasible);
            let bound = chain_bound(&inst).to_f64().unwrap();
            assert!(
                (report.makespan as f64) <= bound + 1e-9,
                "makespan {} > bound {bound}",
                report.makespan
            );
            assert_eq!(audit_busy_or_chain(&inst, &sched), Ok(()));
        }
    }

    #[test]
    fn no_unnecessary_idling() {
        // two independent jobs, two machines: both start at 0
        let inst = units(2, &[], 4, MachineCount::Finite(2));
        let sched = list_schedule(&inst, &PriorityList::critical_path(&inst));
        assert_eq!(sched.assign[&0].0, 0);
        assert_eq!(sched.assign[&1].0, 0);
    }
}
