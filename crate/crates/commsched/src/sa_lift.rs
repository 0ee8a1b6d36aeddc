//! Generic Sherali-Adams lift for LPs with assignment constraints, plus the
//! conditioning and decomposition operators the rounding analysis relies on.
//!
//! Base variables are indexed 0..n with n <= 64, so index sets are bitmasks.
//! A lifted vector stores one value per subset of size at most rank + 1, with
//! the empty set pinned to 1. The lift of a base row `a x >= b` under index
//! sets (I, J) is
//!
//! ```text
//! sum_{H subset J} (-1)^|H| ( sum_i a_i y_{I u H u {i}} - b y_{I u H} ) >= 0
//! ```
//!
//! for all disjoint I, J with |I| + |J| <= rank (overlapping pairs cancel
//! identically and are skipped; unions collapse repeated indices).
//! Assignment groups are rows `sum_{i in U_k} x_i = 1`; conditioning on a
//! group member costs one round.

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::lpsolve::{Direction, LinearProgram, Sense, TAU};

const MAX_BASE_VARS: usize = 64;
const MAX_LIFTED_VARS: usize = 20_000;
const MAX_LIFTED_ROWS: usize = 400_000;

#[derive(Debug, Error)]
pub enum SaError {
    #[error("base LP has {0} variables; the lift supports at most {MAX_BASE_VARS}")]
    BaseTooLarge(usize),
    #[error("lift size cap exceeded: {count} {what} (cap {cap})")]
    SizeCap { what: &'static str, count: usize, cap: usize },
    #[error("vector entry for index set {0:#x} is missing")]
    MissingEntry(u64),
    #[error("point is not integral at variable {0}")]
    NonIntegral(usize),
    #[error("cannot condition on index set {0:#x}: its value {1} is below tolerance")]
    ConditionOnNull(u64, f64),
    #[error("assignment group {0} has no member above tolerance")]
    DegenerateGroup(usize),
    #[error("group index {0} out of range")]
    NoSuchGroup(usize),
    #[error("lifted row violated: base row {row}, I={i_mask:#x}, J={j_mask:#x}, lhs={lhs}")]
    RowViolated { row: usize, i_mask: u64, j_mask: u64, lhs: f64 },
    #[error("empty-set entry must be 1, got {0}")]
    BadEmptyEntry(f64),
}

/// Base row in `a x >= rhs` form.
#[derive(Debug, Clone)]
pub struct BaseRow {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

/// A box-bounded LP with designated assignment groups. Construction adds the
/// box rows and one equality (as two inequalities) per group, so the row list
/// always has the shape the lift expects.
#[derive(Debug, Clone)]
pub struct BaseLp {
    n: usize,
    rows: Vec<BaseRow>,
    groups: Vec<Vec<usize>>,
}

impl BaseLp {
    pub fn new(
        n: usize,
        groups: Vec<Vec<usize>>,
        extra_ge_rows: Vec<BaseRow>,
    ) -> Result<Self, SaError> {
        if n > MAX_BASE_VARS {
            return Err(SaError::BaseTooLarge(n));
        }
        let mut rows = Vec::new();
        for i in 0..n {
            rows.push(BaseRow { coeffs: vec![(i, 1.0)], rhs: 0.0 });
            rows.push(BaseRow { coeffs: vec![(i, -1.0)], rhs: -1.0 });
        }
        for group in &groups {
            let pos: Vec<(usize, f64)> = group.iter().map(|&i| (i, 1.0)).collect();
            let neg: Vec<(usize, f64)> = group.iter().map(|&i| (i, -1.0)).collect();
            rows.push(BaseRow { coeffs: pos, rhs: 1.0 });
            rows.push(BaseRow { coeffs: neg, rhs: -1.0 });
        }
        rows.extend(extra_ge_rows);
        Ok(BaseLp { n, rows, groups })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[BaseRow] {
        &self.rows
    }

    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn is_feasible(&self, x: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|row| {
            let lhs: f64 = row.coeffs.iter().map(|&(i, a)| a * x[i]).sum();
            lhs >= row.rhs - tol
        })
    }
}

/// Subset-indexed solution of a rank-`rank` lift: one entry per index set of
/// size at most `rank + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedVector {
    pub n: usize,
    pub rank: usize,
    pub entries: BTreeMap<u64, f64>,
}

impl LiftedVector {
    pub fn get(&self, mask: u64) -> Result<f64, SaError> {
        self.entries
            .get(&mask)
            .copied()
            .ok_or(SaError::MissingEntry(mask))
    }

    pub fn singleton(&self, i: usize) -> Result<f64, SaError> {
        self.get(1u64 << i)
    }

    pub fn validate_shape(&self) -> Result<(), SaError> {
        let empty = self.get(0)?;
        if (empty - 1.0).abs() > TAU {
            return Err(SaError::BadEmptyEntry(empty));
        }
        Ok(())
    }
}

/// All subsets of {0..n} with at most k elements, ordered by size then mask.
pub fn subsets_up_to(n: usize, k: usize) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut frontier = vec![0u64];
    for _ in 0..k {
        let mut next = Vec::new();
        for &mask in &frontier {
            let start = if mask == 0 { 0 } else { 64 - mask.leading_zeros() as usize };
            for i in start..n {
                let m = mask | (1u64 << i);
                out.push(m);
                next.push(m);
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out
}

fn subsets_of_mask(mask: u64) -> impl Iterator<Item = u64> {
    let mut sub = 0u64;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let current = sub;
        if sub == mask {
            done = true;
        } else {
            sub = sub.wrapping_sub(mask) & mask;
        }
        Some(current)
    })
}

/// The materialized lifted LP together with the mask <-> column dictionary.
#[derive(Debug, Clone)]
pub struct LiftedLp {
    pub lp: LinearProgram,
    pub masks: Vec<u64>,
    pub index: BTreeMap<u64, usize>,
    pub rank: usize,
    pub n_base: usize,
}

impl LiftedLp {
    pub fn vector_from_values(&self, values: &[f64]) -> LiftedVector {
        LiftedVector {
            n: self.n_base,
            rank: self.rank,
            entries: self
                .masks
                .iter()
                .map(|&m| (m, values[self.index[&m]]))
                .collect(),
        }
    }

    pub fn values_from_vector(&self, y: &LiftedVector) -> Result<Vec<f64>, SaError> {
        self.masks.iter().map(|&m| y.get(m)).collect()
    }
}

fn mask_name(mask: u64) -> String {
    if mask == 0 {
        return "y[]".to_string();
    }
    let ids: Vec<String> = (0..64)
        .filter(|&i| mask & (1u64 << i) != 0)
        .map(|i| i.to_string())
        .collect();
    format!("y[{}]", ids.join("."))
}

/// Materializes the rank-r lift as a linear program with one variable per
/// index set. Variables carry the implied [0, 1] bounds and the empty set is
/// pinned to 1. Duplicate lifted rows are emitted once.
pub fn build_sa_lift(base: &BaseLp, rank: usize) -> Result<LiftedLp, SaError> {
    let masks = subsets_up_to(base.n, rank + 1);
    if masks.len() > MAX_LIFTED_VARS {
        return Err(SaError::SizeCap {
            what: "lifted variables",
            count: masks.len(),
            cap: MAX_LIFTED_VARS,
        });
    }
    let index: BTreeMap<u64, usize> = masks.iter().enumerate().map(|(k, &m)| (m, k)).collect();
    let mut lp = LinearProgram::new();
    for &mask in &masks {
        if mask == 0 {
            lp.add_var(mask_name(mask), 1.0, 1.0);
        } else {
            lp.add_var(mask_name(mask), 0.0, 1.0);
        }
    }
    let mut seen = HashSet::new();
    let mut emitted = 0usize;
    for_each_lift_row(base, rank, |row_idx, i_mask, j_mask, coeffs| {
        if coeffs.is_empty() {
            return Ok(());
        }
        let mut key = String::new();
        for (&m, &a) in coeffs {
            use std::fmt::Write;
            let _ = write!(key, "{m}:{};", a.to_bits());
        }
        if !seen.insert(key) {
            return Ok(());
        }
        emitted += 1;
        if emitted > MAX_LIFTED_ROWS {
            return Err(SaError::SizeCap {
                what: "lifted rows",
                count: emitted,
                cap: MAX_LIFTED_ROWS,
            });
        }
        let lp_coeffs: Vec<(usize, f64)> =
            coeffs.iter().map(|(&m, &a)| (index[&m], a)).collect();
        lp.add_row(
            format!("sa_r{row_idx}_I{i_mask:x}_J{j_mask:x}"),
            lp_coeffs,
            Sense::Ge,
            0.0,
        );
        Ok(())
    })?;
    lp.set_objective(Direction::Feasibility, Vec::new());
    Ok(LiftedLp { lp, masks, index, rank, n_base: base.n })
}

/// Streams every lifted row (disjoint I, J with |I|+|J| <= rank, each base
/// row) to `f` as a mask -> coefficient map, without materializing the LP.
fn for_each_lift_row(
    base: &BaseLp,
    rank: usize,
    mut f: impl FnMut(usize, u64, u64, &BTreeMap<u64, f64>) -> Result<(), SaError>,
) -> Result<(), SaError> {
    let i_sets = subsets_up_to(base.n, rank);
    let mut coeffs: BTreeMap<u64, f64> = BTreeMap::new();
    for &i_mask in &i_sets {
        let i_size = i_mask.count_ones() as usize;
        let remaining = rank - i_size;
        let complement: Vec<usize> =
            (0..base.n).filter(|&v| i_mask & (1u64 << v) == 0).collect();
        for j_mask in subsets_from(&complement, remaining) {
            for (row_idx, row) in base.rows.iter().enumerate() {
                coeffs.clear();
                for h_mask in subsets_of_mask(j_mask) {
                    let sign = if h_mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                    let ih = i_mask | h_mask;
                    for &(v, a) in &row.coeffs {
                        *coeffs.entry(ih | (1u64 << v)).or_insert(0.0) += sign * a;
                    }
                    if row.rhs != 0.0 {
                        *coeffs.entry(ih).or_insert(0.0) -= sign * row.rhs;
                    }
                }
                coeffs.retain(|_, a| a.abs() > 1e-12);
                f(row_idx, i_mask, j_mask, &coeffs)?;
            }
        }
    }
    Ok(())
}

/// All subsets of the given elements with at most k members, as masks.
fn subsets_from(elements: &[usize], k: usize) -> Vec<u64> {
    let mut out = vec![0u64];
    let mut frontier = vec![(0u64, 0usize)];
    for _ in 0..k {
        let mut next = Vec::new();
        for &(mask, start) in &frontier {
            for (pos, &e) in elements.iter().enumerate().skip(start) {
                let m = mask | (1u64 << e);
                out.push(m);
                next.push((m, pos + 1));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    out
}

/// Verifies `y` against every lifted row without materializing the LP.
pub fn check_lift_feasibility(
    base: &BaseLp,
    rank: usize,
    y: &LiftedVector,
    tol: f64,
) -> Result<(), SaError> {
    y.validate_shape()?;
    for_each_lift_row(base, rank, |row_idx, i_mask, j_mask, coeffs| {
        let mut lhs = 0.0;
        for (&m, &a) in coeffs {
            lhs += a * y.get(m)?;
        }
        if lhs < -tol {
            return Err(SaError::RowViolated { row: row_idx, i_mask, j_mask, lhs });
        }
        Ok(())
    })
}

/// Lift of an integral point: y_I = prod_{i in I} x_i.
pub fn integral_lift(x: &[f64], rank: usize) -> Result<LiftedVector, SaError> {
    if x.len() > MAX_BASE_VARS {
        return Err(SaError::BaseTooLarge(x.len()));
    }
    let mut ones = 0u64;
    for (i, &v) in x.iter().enumerate() {
        if (v - 1.0).abs() <= TAU {
            ones |= 1u64 << i;
        } else if v.abs() > TAU {
            return Err(SaError::NonIntegral(i));
        }
    }
    let entries = subsets_up_to(x.len(), rank + 1)
        .into_iter()
        .map(|m| (m, if m & !ones == 0 { 1.0 } else { 0.0 }))
        .collect();
    Ok(LiftedVector { n: x.len(), rank, entries })
}

/// Convex combination of integral lifts; feasible at every rank because it
/// is the moment vector of an honest distribution over integral points.
pub fn mixture_lift(points: &[(f64, Vec<f64>)], rank: usize) -> Result<LiftedVector, SaError> {
    assert!(!points.is_empty(), "mixture needs at least one point");
    let n = points[0].1.len();
    let total: f64 = points.iter().map(|(w, _)| w).sum();
    let mut entries: BTreeMap<u64, f64> = subsets_up_to(n, rank + 1)
        .into_iter()
        .map(|m| (m, 0.0))
        .collect();
    for (w, x) in points {
        let lifted = integral_lift(x, rank)?;
        for (m, v) in lifted.entries {
            *entries.get_mut(&m).unwrap() += (w / total) * v;
        }
    }
    Ok(LiftedVector { n, rank, entries })
}

/// Conditioning operator: divides out y_J, dropping |J| ranks. The result has
/// value 1 on every singleton inside J.
pub fn sa_condition(y: &LiftedVector, j_mask: u64) -> Result<LiftedVector, SaError> {
    let j_size = j_mask.count_ones() as usize;
    assert!(j_size <= y.rank, "conditioning set larger than rank");
    let yj = y.get(j_mask)?;
    if yj <= TAU {
        return Err(SaError::ConditionOnNull(j_mask, yj));
    }
    let new_rank = y.rank - j_size;
    let mut entries = BTreeMap::new();
    for m in subsets_up_to(y.n, new_rank + 1) {
        entries.insert(m, (y.get(m | j_mask)? / yj).clamp(0.0, 1.0));
    }
    Ok(LiftedVector { n: y.n, rank: new_rank, entries })
}

/// Decomposition along an assignment group: with probability y_i the vector
/// conditioned on {i}. Probabilities sum to 1 and every atom is integral on
/// the group.
pub fn sa_assignment_decomposition(
    y: &LiftedVector,
    base: &BaseLp,
    k: usize,
) -> Result<Vec<(f64, LiftedVector)>, SaError> {
    let group = base.groups.get(k).ok_or(SaError::NoSuchGroup(k))?;
    let mut atoms = Vec::new();
    for &i in group {
        let yi = y.singleton(i)?;
        if yi > TAU {
            atoms.push((yi, sa_condition(y, 1u64 << i)?));
        }
    }
    if atoms.is_empty() {
        return Err(SaError::DegenerateGroup(k));
    }
    Ok(atoms)
}
