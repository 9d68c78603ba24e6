//! Exact counts of natural solutions inside the hypercube `[1, N]^s`.
//!
//! For `x1 = Σ a_j·x_j^k_j` a solution is fixed by its RHS tuple, and
//! `x1 <= N` bounds every RHS variable too, so the count is `Σ_{n<=N} r(n)`.
//! For `x1^k = Σ x_j^k` it is `Σ_{m<=N} r(m^k)`; every RHS variable is then
//! automatically at most `m`.
//!
//! Three interchangeable backends compute the same numbers:
//!
//! * [`Backend::Enumerate`]: pruned nested loops, innermost variable solved
//!   with an exact integer root.
//! * [`Backend::Table`]: dense representation tables from [`crate::tables`].
//! * [`Backend::MeetInMiddle`]: sorted half-sum lists joined by binary search.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{count_powers_upto, exact_root, iroot};
use crate::equation::{DiagonalEquation, LhsKind, Term};
use crate::error::{CountError, CountResult};
use crate::tables::{merge_runs, power_support, r_table, r_table_or_identity, MemoryBudget};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Enumerate,
    Table,
    #[serde(rename = "mitm")]
    MeetInMiddle,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::Enumerate, Backend::Table, Backend::MeetInMiddle];

    pub fn name(&self) -> &'static str {
        match self {
            Backend::Enumerate => "enumerate",
            Backend::Table => "table",
            Backend::MeetInMiddle => "mitm",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "enumerate" => Ok(Backend::Enumerate),
            "table" => Ok(Backend::Table),
            "mitm" | "meet-in-middle" => Ok(Backend::MeetInMiddle),
            other => Err(format!("unknown backend `{other}` (expected enumerate, table or mitm)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CountPoint {
    pub side: u64,
    pub count: u128,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountSeries {
    pub equation: DiagonalEquation,
    pub backend: Backend,
    pub points: Vec<CountPoint>,
}

/// Entry point for all hypercube counting. Holds the memory budget shared
/// by every table and half-sum list it builds.
#[derive(Debug, Clone, Copy, Default)]
pub struct Counter {
    pub budget: MemoryBudget,
}

impl Counter {
    pub fn new(budget: MemoryBudget) -> Self {
        Self { budget }
    }

    /// Number of ordered solutions in `[1, n]^s`.
    pub fn count_in_cube(&self, eq: &DiagonalEquation, n: u64, backend: Backend) -> CountResult<u128> {
        Ok(self.counts_at(eq, &[n], backend)?[0])
    }

    /// One [`CountPoint`] per grid value. Shared work (tables, half-sum
    /// lists) is built once at the largest side.
    pub fn sweep(&self, eq: &DiagonalEquation, grid: &[u64], backend: Backend) -> CountResult<CountSeries> {
        let counts = self.counts_at(eq, grid, backend)?;
        let points = grid.iter().zip(counts).map(|(&side, count)| CountPoint { side, count }).collect();
        Ok(CountSeries { equation: eq.clone(), backend, points })
    }

    fn counts_at(&self, eq: &DiagonalEquation, grid: &[u64], backend: Backend) -> CountResult<Vec<u128>> {
        validate_grid(grid)?;
        let n_max = *grid.last().unwrap();
        match eq.lhs() {
            LhsKind::ExplicitLinear => self.explicit_counts(eq.rhs(), grid, n_max, backend),
            LhsKind::HomogeneousPower(k) => {
                let per_m = self.homogeneous_per_side(eq.rhs(), k, n_max, backend)?;
                let mut cumulative = Vec::with_capacity(per_m.len());
                let mut acc = 0u128;
                for c in per_m {
                    acc = acc.checked_add(c).ok_or(CountError::Overflow)?;
                    cumulative.push(acc);
                }
                Ok(grid.iter().map(|&n| cumulative[n as usize]).collect())
            }
        }
    }

    fn explicit_counts(&self, rhs: &[Term], grid: &[u64], n_max: u64, backend: Backend) -> CountResult<Vec<u128>> {
        match backend {
            Backend::Table => {
                let cap = self.budget.check("representation table", n_max as u128 + 1)? - 1;
                let cumulative = r_table(rhs, cap, self.budget)?.cumulative()?;
                Ok(grid.iter().map(|&n| cumulative[n as usize]).collect())
            }
            Backend::MeetInMiddle => {
                let split = SplitSums::build(rhs, n_max as u128, self.budget)?;
                grid.iter().map(|&n| split.count_le(n as u128)).collect()
            }
            Backend::Enumerate => grid.par_iter().map(|&n| enumerate_upto(rhs, n as u128)).collect(),
        }
    }

    /// Entry `m` holds the number of RHS tuples summing to `m^k`, for `m` in `0..=n_max`.
    fn homogeneous_per_side(&self, rhs: &[Term], k: u32, n_max: u64, backend: Backend) -> CountResult<Vec<u128>> {
        let cap = (n_max as u128).checked_pow(k).ok_or(CountError::Overflow)?;
        let targets: Vec<u128> = (0..=n_max as u128).map(|m| m.pow(k)).collect();
        let mut per_m = match backend {
            Backend::Table => {
                let len = self.budget.check("representation table", cap + 1).map_err(|e| {
                    CountError::BackendInapplicable {
                        backend: Backend::Table,
                        reason: e.to_string(),
                        fallback: Backend::MeetInMiddle,
                    }
                })?;
                // Table over all but the last term, closed by summing the last variable.
                let (last, head) = rhs.split_last().expect("non-empty rhs");
                let table = r_table_or_identity(head, len - 1, self.budget)?;
                let last_values = power_support(*last, cap);
                targets
                    .par_iter()
                    .map(|&target| {
                        last_values
                            .iter()
                            .take_while(|&&v| v <= target)
                            .try_fold(0u128, |acc, &v| acc.checked_add(table.get((target - v) as usize)))
                            .ok_or(CountError::Overflow)
                    })
                    .collect::<CountResult<Vec<_>>>()?
            }
            Backend::MeetInMiddle => {
                let split = SplitSums::build(rhs, cap, self.budget)?;
                targets.par_iter().map(|&t| split.count_eq(t)).collect::<CountResult<Vec<_>>>()?
            }
            Backend::Enumerate => {
                targets.par_iter().map(|&t| enumerate_exact(rhs, t)).collect::<CountResult<Vec<_>>>()?
            }
        };
        per_m[0] = 0;
        Ok(per_m)
    }

    /// Count of RHS tuples with `x2 <= x3 <= ... <= xs` solving the equation
    /// in the cube. Only defined when every RHS term is the same unit power.
    pub fn count_nondecreasing(&self, eq: &DiagonalEquation, n: u64) -> CountResult<u128> {
        if n == 0 {
            return Err(CountError::InvalidInput("cube side must be at least 1".into()));
        }
        if !eq.has_identical_unit_terms() {
            return Err(CountError::InvalidInput("nondecreasing counts need identical unit-coefficient terms".into()));
        }
        let k = eq.rhs()[0].exponent;
        let len = eq.rhs().len();
        match eq.lhs() {
            LhsKind::ExplicitLinear => Ok(nondecreasing(len, k, 1, n as u128, false)),
            LhsKind::HomogeneousPower(_) => {
                let mut total = 0u128;
                for m in 1..=n as u128 {
                    let target = m.checked_pow(k).ok_or(CountError::Overflow)?;
                    total = total.checked_add(nondecreasing(len, k, 1, target, true)).ok_or(CountError::Overflow)?;
                }
                Ok(total)
            }
        }
    }

    /// Every solution in the cube, for inspection. Restricted to `n <= 100`.
    pub fn list_solutions(&self, eq: &DiagonalEquation, n: u64) -> CountResult<Vec<Vec<u64>>> {
        if n == 0 || n > 100 {
            return Err(CountError::InvalidInput("solution listing is limited to 1 <= N <= 100".into()));
        }
        let rhs = eq.rhs();
        let mut out = Vec::new();
        let mut tuple = vec![1u64; rhs.len()];
        loop {
            let sum: u128 = rhs.iter().zip(&tuple).map(|(t, &x)| t.value(x as u128).unwrap()).sum();
            let x1 = match eq.lhs() {
                LhsKind::ExplicitLinear => Some(sum),
                LhsKind::HomogeneousPower(k) => exact_root(sum, k),
            };
            if let Some(x1) = x1.filter(|&x| x >= 1 && x <= n as u128) {
                let mut sol = vec![x1 as u64];
                sol.extend_from_slice(&tuple);
                out.push(sol);
            }
            // odometer over [1, n]^(s-1)
            let mut i = tuple.len();
            loop {
                if i == 0 {
                    out.sort();
                    return Ok(out);
                }
                i -= 1;
                if tuple[i] < n {
                    tuple[i] += 1;
                    break;
                }
                tuple[i] = 1;
            }
        }
    }
}

fn validate_grid(grid: &[u64]) -> CountResult<()> {
    if grid.is_empty() {
        return Err(CountError::InvalidInput("grid must contain at least one side length".into()));
    }
    if grid[0] == 0 {
        return Err(CountError::InvalidInput("cube side must be at least 1".into()));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CountError::InvalidInput("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Smallest value the terms can jointly take (every variable equal to 1).
fn min_sum(terms: &[Term]) -> u128 {
    terms.iter().map(|t| t.coefficient as u128).sum()
}

/// Tuples with `Σ a_j·x_j^k_j <= bound`.
fn enumerate_upto(terms: &[Term], bound: u128) -> CountResult<u128> {
    let (last, head) = terms.split_last().expect("non-empty rhs");
    fn go(head: &[Term], last: Term, rest_min: &[u128], remaining: u128) -> CountResult<u128> {
        let Some((first, tail)) = head.split_first() else {
            return Ok(count_powers_upto(remaining, last.coefficient, last.exponent));
        };
        let mut total = 0u128;
        let mut x = 1u128;
        while let Some(v) = first.value(x).filter(|&v| v + rest_min[0] <= remaining) {
            total = total.checked_add(go(tail, last, &rest_min[1..], remaining - v)?).ok_or(CountError::Overflow)?;
            x += 1;
        }
        Ok(total)
    }
    let rest_min: Vec<u128> = (1..=head.len()).map(|i| min_sum(&terms[i..])).collect();
    go(head, *last, &rest_min, bound)
}

/// Tuples with `Σ a_j·x_j^k_j == target`, last variable via exact root.
fn enumerate_exact(terms: &[Term], target: u128) -> CountResult<u128> {
    let (last, head) = terms.split_last().expect("non-empty rhs");
    fn go(head: &[Term], last: Term, rest_min: &[u128], remaining: u128) -> CountResult<u128> {
        let Some((first, tail)) = head.split_first() else {
            let a = last.coefficient as u128;
            let hit = remaining % a == 0 && exact_root(remaining / a, last.exponent).is_some_and(|x| x >= 1);
            return Ok(u128::from(hit));
        };
        let mut total = 0u128;
        let mut x = 1u128;
        while let Some(v) = first.value(x).filter(|&v| v + rest_min[0] <= remaining) {
            total = total.checked_add(go(tail, last, &rest_min[1..], remaining - v)?).ok_or(CountError::Overflow)?;
            x += 1;
        }
        Ok(total)
    }
    let rest_min: Vec<u128> = (1..=head.len()).map(|i| min_sum(&terms[i..])).collect();
    go(head, *last, &rest_min, target)
}

/// Nondecreasing tuples of `len` values `>= min_x` whose k-th powers sum to
/// exactly `target` (or at most `target` when `exact` is false).
fn nondecreasing(len: usize, k: u32, min_x: u128, target: u128, exact: bool) -> u128 {
    if len == 1 {
        return if exact {
            exact_root(target, k).map_or(0, |x| u128::from(x >= min_x))
        } else {
            (iroot(target, k) + 1).saturating_sub(min_x)
        };
    }
    let mut total = 0;
    let mut x = min_x;
    // the remaining len - 1 values are all >= x
    while let Some(p) = x.checked_pow(k).filter(|&p| p.saturating_mul(len as u128) <= target) {
        total += nondecreasing(len - 1, k, x, target - p, exact);
        x += 1;
    }
    total
}

/// Sorted, run-length-encoded sums of the two halves of a term list.
#[derive(Debug, Clone)]
pub struct SplitSums {
    left: Vec<(u128, u128)>,
    right: Vec<(u128, u128)>,
    right_cumulative: Vec<u128>,
}

impl SplitSums {
    /// Every half-sum above `cap` is dropped; later queries must not exceed `cap`.
    pub fn build(terms: &[Term], cap: u128, budget: MemoryBudget) -> CountResult<Self> {
        if terms.is_empty() {
            return Err(CountError::InvalidInput("meet-in-the-middle needs at least one term".into()));
        }
        let (left_terms, right_terms) = terms.split_at(terms.len() / 2);
        let left_floor = min_sum(right_terms);
        let right_floor = min_sum(left_terms);
        let left = half_sums(left_terms, cap.saturating_sub(left_floor), budget)?;
        let right = half_sums(right_terms, cap.saturating_sub(right_floor), budget)?;
        let mut right_cumulative = Vec::with_capacity(right.len());
        let mut acc = 0u128;
        for &(_, c) in &right {
            acc = acc.checked_add(c).ok_or(CountError::Overflow)?;
            right_cumulative.push(acc);
        }
        Ok(Self { left, right, right_cumulative })
    }

    /// Ordered tuples whose weighted sum is exactly `target`.
    pub fn count_eq(&self, target: u128) -> CountResult<u128> {
        let mut total = 0u128;
        for &(u, c) in self.left.iter().take_while(|&&(u, _)| u <= target) {
            if let Ok(i) = self.right.binary_search_by_key(&(target - u), |&(v, _)| v) {
                let p = c.checked_mul(self.right[i].1).ok_or(CountError::Overflow)?;
                total = total.checked_add(p).ok_or(CountError::Overflow)?;
            }
        }
        Ok(total)
    }

    /// Ordered tuples whose weighted sum is at most `bound`.
    pub fn count_le(&self, bound: u128) -> CountResult<u128> {
        let mut total = 0u128;
        for &(u, c) in self.left.iter().take_while(|&&(u, _)| u <= bound) {
            let idx = self.right.partition_point(|&(v, _)| v <= bound - u);
            if idx > 0 {
                let p = c.checked_mul(self.right_cumulative[idx - 1]).ok_or(CountError::Overflow)?;
                total = total.checked_add(p).ok_or(CountError::Overflow)?;
            }
        }
        Ok(total)
    }
}

fn half_sums(terms: &[Term], cap: u128, budget: MemoryBudget) -> CountResult<Vec<(u128, u128)>> {
    let mut sums: Vec<(u128, u128)> = vec![(0, 1)];
    for (i, term) in terms.iter().enumerate() {
        let floor = min_sum(&terms[i + 1..]);
        let mut next = Vec::new();
        for &(v, c) in &sums {
            let mut x = 1u128;
            while let Some(s) = term.value(x).and_then(|w| w.checked_add(v)).filter(|&s| s + floor <= cap) {
                next.push((s, c));
                x += 1;
            }
            budget.check("meet-in-the-middle half", 2 * next.len() as u128)?;
        }
        sums = merge_runs(next)?;
    }
    Ok(sums)
}

/// Ordered tuples with `Σ a_j·x_j^k_j = target`, joining sorted half-sum lists.
pub fn meet_in_middle_count(terms: &[Term], target: u128, budget: MemoryBudget) -> CountResult<u128> {
    SplitSums::build(terms, target, budget)?.count_eq(target)
}
