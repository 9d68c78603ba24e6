//! Representation tables: `r[n]` counts ordered tuples `(x_j >= 1)` with
//! `Σ a_j·x_j^k_j = n`.
//!
//! A table over several terms is the truncated additive convolution of the
//! per-term power indicators. The convolution is exact over `u128`; any
//! overflow is reported instead of wrapping.

use rayon::prelude::*;

use crate::equation::Term;
use crate::error::{CountError, CountResult};

/// Default ceiling on any single table, in 128-bit words (about 1.3 GB).
pub const DEFAULT_MEMORY_BUDGET: usize = 80_000_000;

/// Maximum size of any single table or value list, in 128-bit words. A dense
/// table entry costs one word, a `(value, count)` pair two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MemoryBudget(pub usize);

impl Default for MemoryBudget {
    fn default() -> Self {
        Self(DEFAULT_MEMORY_BUDGET)
    }
}

impl MemoryBudget {
    pub fn check(&self, what: &'static str, entries: u128) -> CountResult<usize> {
        if entries > self.0 as u128 {
            return Err(CountError::BudgetExceeded { what, requested: entries, budget: self.0 });
        }
        Ok(entries as usize)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RTable {
    cap: usize,
    counts: Vec<u128>,
    terms: Vec<Term>,
}

impl RTable {
    /// The empty-sum table: `counts = δ₀`. Identity for [`convolve`].
    pub fn identity(cap: usize) -> Self {
        let mut counts = vec![0; cap + 1];
        counts[0] = 1;
        Self { cap, counts, terms: Vec::new() }
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn counts(&self) -> &[u128] {
        &self.counts
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn get(&self, n: usize) -> u128 {
        self.counts.get(n).copied().unwrap_or(0)
    }

    /// `Σ_{1 <= n <= bound} r[n]`.
    pub fn sum_upto(&self, bound: usize) -> CountResult<u128> {
        checked_sum(self.counts[1..=bound.min(self.cap)].iter().copied())
    }

    /// Running totals `Σ_{1 <= i <= n} r[i]` for every `n` in `0..=cap`.
    pub fn cumulative(&self) -> CountResult<Vec<u128>> {
        let mut out = Vec::with_capacity(self.cap + 1);
        let mut acc = 0u128;
        out.push(0);
        for &c in &self.counts[1..] {
            acc = acc.checked_add(c).ok_or(CountError::Overflow)?;
            out.push(acc);
        }
        Ok(out)
    }
}

/// Values `a·m^k <= cap` for `m >= 1`, ascending.
pub fn power_support(term: Term, cap: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut m: u128 = 1;
    while let Some(v) = term.value(m).filter(|&v| v <= cap) {
        out.push(v);
        m += 1;
    }
    out
}

pub fn power_indicator(k: u32, coefficient: u64, cap: usize, budget: MemoryBudget) -> CountResult<RTable> {
    let term = Term::new(coefficient, k).map_err(|e| CountError::InvalidInput(e.to_string()))?;
    if cap == 0 {
        return Err(CountError::InvalidInput("table cap must be at least 1".into()));
    }
    let len = budget.check("power indicator", cap as u128 + 1)?;
    let mut counts = vec![0; len];
    for v in power_support(term, cap as u128) {
        counts[v as usize] = 1;
    }
    Ok(RTable { cap, counts, terms: vec![term] })
}

/// Truncated product: `out[n] = Σ_{i+j=n} left[i]·right[j]` for `n <= cap`.
pub fn convolve(left: &RTable, right: &RTable) -> CountResult<RTable> {
    if left.cap != right.cap {
        return Err(CountError::CapMismatch { left: left.cap, right: right.cap });
    }
    let l = nonzeros(&left.counts);
    let r = nonzeros(&right.counts);
    let counts =
        if l.len() <= r.len() { convolve_raw(&l, &right.counts, &r)? } else { convolve_raw(&r, &left.counts, &l)? };
    let mut terms = left.terms.clone();
    terms.extend_from_slice(&right.terms);
    Ok(RTable { cap: left.cap, counts, terms })
}

/// Fold of the per-term indicators under [`convolve`].
pub fn r_table(terms: &[Term], cap: usize, budget: MemoryBudget) -> CountResult<RTable> {
    if terms.is_empty() {
        return Err(CountError::InvalidInput("r_table needs at least one term".into()));
    }
    let mut table = power_indicator(terms[0].exponent, terms[0].coefficient, cap, budget)?;
    for &term in &terms[1..] {
        table = fold_term(table, term)?;
    }
    Ok(table)
}

/// Like [`r_table`] but an empty term list yields the identity table.
pub(crate) fn r_table_or_identity(terms: &[Term], cap: usize, budget: MemoryBudget) -> CountResult<RTable> {
    if terms.is_empty() {
        budget.check("identity table", cap as u128 + 1)?;
        Ok(RTable::identity(cap))
    } else {
        r_table(terms, cap, budget)
    }
}

fn fold_term(table: RTable, term: Term) -> CountResult<RTable> {
    let support: Vec<(usize, u128)> =
        power_support(term, table.cap as u128).into_iter().map(|v| (v as usize, 1)).collect();
    let dense_nz = nonzeros(&table.counts);
    let counts = convolve_raw(&support, &table.counts, &dense_nz)?;
    let mut terms = table.terms;
    terms.push(term);
    Ok(RTable { cap: table.cap, counts, terms })
}

fn nonzeros(counts: &[u128]) -> Vec<(usize, u128)> {
    counts.iter().enumerate().filter(|(_, &c)| c != 0).map(|(i, &c)| (i, c)).collect()
}

fn checked_sum(mut values: impl Iterator<Item = u128>) -> CountResult<u128> {
    values.try_fold(0u128, |acc, v| acc.checked_add(v)).ok_or(CountError::Overflow)
}

const OUTPUT_CHUNK: usize = 1 << 14;

/// `sparse` must be the operand with fewer nonzeros; `dense_nz` lists the
/// nonzeros of `dense`. Output length equals `dense.len()`.
fn convolve_raw(sparse: &[(usize, u128)], dense: &[u128], dense_nz: &[(usize, u128)]) -> CountResult<Vec<u128>> {
    let len = dense.len();
    let mut out = vec![0u128; len];
    if sparse.is_empty() || dense_nz.is_empty() {
        return Ok(out);
    }

    // Scatter when both operands are sparse; otherwise shifted adds over
    // independent output chunks, each summed in the fixed order of `sparse`.
    if dense_nz.len().saturating_mul(4) < len {
        for &(i, a) in sparse {
            for &(j, b) in dense_nz {
                let n = i + j;
                if n >= len {
                    break;
                }
                let p = a.checked_mul(b).ok_or(CountError::Overflow)?;
                out[n] = out[n].checked_add(p).ok_or(CountError::Overflow)?;
            }
        }
        return Ok(out);
    }

    out.par_chunks_mut(OUTPUT_CHUNK).enumerate().try_for_each(|(ci, chunk)| {
        let lo = ci * OUTPUT_CHUNK;
        let hi = lo + chunk.len();
        let mut overflow = false;
        for &(shift, weight) in sparse {
            if shift >= hi {
                break;
            }
            let start = lo.max(shift);
            let src = &dense[start - shift..hi - shift];
            let dst = &mut chunk[start - lo..];
            if weight == 1 {
                for (d, &s) in dst.iter_mut().zip(src) {
                    let (v, o) = d.overflowing_add(s);
                    *d = v;
                    overflow |= o;
                }
            } else {
                for (d, &s) in dst.iter_mut().zip(src) {
                    let (p, o1) = s.overflowing_mul(weight);
                    let (v, o2) = d.overflowing_add(p);
                    *d = v;
                    overflow |= o1 | o2;
                }
            }
        }
        if overflow {
            Err(CountError::Overflow)
        } else {
            Ok(())
        }
    })?;
    Ok(out)
}

/// Independent nested-loop count of ordered tuples with `Σ a_j·x_j^k_j = n`.
///
/// Deliberately naive; meant for cross-checking the other routes at small `n`.
pub fn r_oracle(terms: &[Term], n: u128) -> u128 {
    fn go(terms: &[Term], remaining: u128) -> u128 {
        let Some((first, rest)) = terms.split_first() else {
            return u128::from(remaining == 0);
        };
        let mut total = 0;
        let mut x = 1u128;
        while let Some(v) = first.value(x).filter(|&v| v <= remaining) {
            total += go(rest, remaining - v);
            x += 1;
        }
        total
    }
    go(terms, n)
}

/// How [`even_moment_with`] evaluates `Σ_n r_t(n)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentRoute {
    /// Dense representation table with cap `t·P^k`.
    Dense,
    /// Sorted multiset of all `t`-fold power sums.
    Sparse,
}

/// `∫₀¹ |Σ_{m<=P} e(α m^k)|^{2t} dα`, i.e. the number of solutions of
/// `m₁^k + ... + m_t^k = m'₁^k + ... + m'_t^k` with every variable in `[1, P]`.
///
/// Picks whichever exact route fits the memory budget more cheaply.
pub fn even_moment(k: u32, t: u32, p: u64, budget: MemoryBudget) -> CountResult<u128> {
    validate_moment_args(k, t, p)?;
    let cap = moment_cap(k, t, p);
    let sums = (p as u128).checked_pow(t);
    let dense_ok = cap.is_some_and(|c| c < budget.0 as u128);
    let sparse_ok = sums.is_some_and(|s| 2 * s <= budget.0 as u128);
    let route = match (dense_ok, sparse_ok) {
        (true, true) if sums.unwrap() < cap.unwrap() / 8 => MomentRoute::Sparse,
        (true, _) => MomentRoute::Dense,
        (false, true) => MomentRoute::Sparse,
        (false, false) => {
            return Err(CountError::BudgetExceeded {
                what: "even moment",
                requested: sums.unwrap_or(u128::MAX).min(cap.unwrap_or(u128::MAX)),
                budget: budget.0,
            })
        }
    };
    even_moment_with(route, k, t, p, budget)
}

pub fn even_moment_with(route: MomentRoute, k: u32, t: u32, p: u64, budget: MemoryBudget) -> CountResult<u128> {
    validate_moment_args(k, t, p)?;
    let term = Term::power(k);
    match route {
        MomentRoute::Dense => {
            let cap = moment_cap(k, t, p).ok_or(CountError::Overflow)?;
            let cap = budget.check("even moment table", cap.saturating_add(1))? - 1;
            // Variables stop at P, so the support is bounded rather than cap-limited.
            let support: Vec<(usize, u128)> = (1..=p as usize).map(|m| (m.pow(k), 1)).collect();
            let mut counts = vec![0u128; cap + 1];
            for &(v, _) in &support {
                counts[v] = 1;
            }
            for _ in 1..t {
                let nz = nonzeros(&counts);
                counts = convolve_raw(&support, &counts, &nz)?;
            }
            sum_of_squares(counts.into_iter())
        }
        MomentRoute::Sparse => {
            let powers: Vec<u128> =
                (1..=p as u128).map(|m| term.value(m).ok_or(CountError::Overflow)).collect::<CountResult<_>>()?;
            let mut acc: Vec<(u128, u128)> = powers.iter().map(|&v| (v, 1)).collect();
            for _ in 1..t {
                budget.check("even moment sums", 2 * acc.len() as u128 * powers.len() as u128)?;
                let mut next = Vec::with_capacity(acc.len() * powers.len());
                for &(v, c) in &acc {
                    for &w in &powers {
                        next.push((v.checked_add(w).ok_or(CountError::Overflow)?, c));
                    }
                }
                acc = merge_runs(next)?;
            }
            sum_of_squares(acc.into_iter().map(|(_, c)| c))
        }
    }
}

fn validate_moment_args(k: u32, t: u32, p: u64) -> CountResult<()> {
    if k == 0 || t == 0 || p == 0 {
        return Err(CountError::InvalidInput("even moment needs k, t, P >= 1".into()));
    }
    Ok(())
}

fn moment_cap(k: u32, t: u32, p: u64) -> Option<u128> {
    (p as u128).checked_pow(k)?.checked_mul(t as u128)
}

fn sum_of_squares(values: impl Iterator<Item = u128>) -> CountResult<u128> {
    values
        .filter(|&c| c != 0)
        .try_fold(0u128, |acc, c| c.checked_mul(c).and_then(|sq| acc.checked_add(sq)))
        .ok_or(CountError::Overflow)
}

/// Sorts `(value, count)` pairs and merges equal values.
pub(crate) fn merge_runs(mut pairs: Vec<(u128, u128)>) -> CountResult<Vec<(u128, u128)>> {
    pairs.sort_unstable_by_key(|&(v, _)| v);
    let mut out: Vec<(u128, u128)> = Vec::with_capacity(pairs.len());
    for (v, c) in pairs {
        match out.last_mut() {
            Some((lv, lc)) if *lv == v => *lc = lc.checked_add(c).ok_or(CountError::Overflow)?,
            _ => out.push((v, c)),
        }
    }
    Ok(out)
}
