//! Polynomial parametrisations of solutions and the counts they induce.
//!
//! Coordinates may be negative here (`x³ + y³ + z³ = 1` has no positive
//! solutions), so cube counts use the symmetric box `|x_i| <= N`.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::arith::iroot;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParametricError {
    #[error("parameters must satisfy a > b >= 1 (got a = {a}, b = {b})")]
    NotDecreasing { a: u64, b: u64 },
    #[error("scale factor must be at least 1")]
    ZeroScale,
    #[error("coordinate overflowed 128 bits")]
    Overflow,
    #[error("cube counting supports families of arity 1 or 2, `{name}` has arity {arity}")]
    UnsupportedArity { name: &'static str, arity: usize },
}

/// A polynomial map from integer parameters to solutions of a fixed equation.
pub trait ParametricFamily: Sync {
    fn name(&self) -> &'static str;
    fn arity(&self) -> usize;
    /// Largest total degree among the coordinate polynomials.
    fn degree(&self) -> u32;
    /// The solution for `params`, or `None` outside the parameter domain.
    fn eval(&self, params: &[i64]) -> Option<Vec<BigInt>>;
    /// Whether `tuple` solves the family's target equation.
    fn satisfies(&self, tuple: &[BigInt]) -> bool;
    /// Parameter ranges outside which the dominant coordinate exceeds `n`.
    fn parameter_box(&self, n: u64) -> Vec<RangeInclusive<i64>>;
    /// Representative used when deduplicating solutions.
    fn canonical(&self, tuple: Vec<BigInt>) -> Vec<BigInt> {
        tuple
    }
}

/// `(9a⁴, 1 − 9a³, 3a − 9a⁴)`, solving `x³ + y³ + z³ = 1`.
pub fn cubic_unit(a: i64) -> (BigInt, BigInt, BigInt) {
    let a = BigInt::from(a);
    let a3 = &a * &a * &a;
    let a4 = &a3 * &a;
    let nine_a4: BigInt = &a4 * 9;
    (nine_a4.clone(), BigInt::one() - a3 * 9, a * 3 - nine_a4)
}

fn cube_sum_is_one(t: &[BigInt]) -> bool {
    t.len() == 3 && t.iter().map(|x| x * x * x).sum::<BigInt>() == BigInt::one()
}

/// Euclid's triple `(a² − b², 2ab, a² + b²)` for `a > b >= 1`.
pub fn pythagorean(a: u64, b: u64) -> Result<(u128, u128, u128), ParametricError> {
    if b == 0 || a <= b {
        return Err(ParametricError::NotDecreasing { a, b });
    }
    let (a, b) = (a as u128, b as u128);
    let (a2, b2) = (a * a, b * b);
    let hyp = a2.checked_add(b2).ok_or(ParametricError::Overflow)?;
    Ok((a2 - b2, 2 * a * b, hyp))
}

/// `c` times [`pythagorean`]. Different `(a, b, c)` can give the same triple.
pub fn pythagorean_scaled(a: u64, b: u64, c: u64) -> Result<(u128, u128, u128), ParametricError> {
    if c == 0 {
        return Err(ParametricError::ZeroScale);
    }
    let (x, y, z) = pythagorean(a, b)?;
    let c = c as u128;
    let scale = |v: u128| v.checked_mul(c).ok_or(ParametricError::Overflow);
    Ok((scale(x)?, scale(y)?, scale(z)?))
}

fn is_pythagorean(t: &[BigInt]) -> bool {
    t.len() == 3 && t.iter().all(|x| x.is_positive()) && &t[0] * &t[0] + &t[1] * &t[1] == &t[2] * &t[2]
}

fn sorted_legs(mut t: Vec<BigInt>) -> Vec<BigInt> {
    if t[0] > t[1] {
        t.swap(0, 1);
    }
    t
}

/// One-parameter family [`cubic_unit`], degree 4.
#[derive(Debug, Clone, Copy, Default)]
pub struct CubicUnit;

impl ParametricFamily for CubicUnit {
    fn name(&self) -> &'static str {
        "cubic-unit"
    }
    fn arity(&self) -> usize {
        1
    }
    fn degree(&self) -> u32 {
        4
    }
    fn eval(&self, params: &[i64]) -> Option<Vec<BigInt>> {
        let (x, y, z) = cubic_unit(params[0]);
        Some(vec![x, y, z])
    }
    fn satisfies(&self, tuple: &[BigInt]) -> bool {
        cube_sum_is_one(tuple)
    }
    fn parameter_box(&self, n: u64) -> Vec<RangeInclusive<i64>> {
        // |x1| = 9a⁴ <= n
        let r = iroot(n as u128 / 9, 4) as i64;
        vec![-r..=r]
    }
}

/// Two-parameter family [`pythagorean`], degree 2.
#[derive(Debug, Clone, Copy, Default)]
pub struct Pythagorean;

impl ParametricFamily for Pythagorean {
    fn name(&self) -> &'static str {
        "pythagorean"
    }
    fn arity(&self) -> usize {
        2
    }
    fn degree(&self) -> u32 {
        2
    }
    fn eval(&self, params: &[i64]) -> Option<Vec<BigInt>> {
        let (a, b) = (u64::try_from(params[0]).ok()?, u64::try_from(params[1]).ok()?);
        let (x, y, z) = pythagorean(a, b).ok()?;
        Some(vec![x.into(), y.into(), z.into()])
    }
    fn satisfies(&self, tuple: &[BigInt]) -> bool {
        is_pythagorean(tuple)
    }
    fn parameter_box(&self, n: u64) -> Vec<RangeInclusive<i64>> {
        // a² + b² <= n with b >= 1
        let r = iroot((n as u128).saturating_sub(1), 2) as i64;
        vec![1..=r, 1..=r]
    }
    fn canonical(&self, tuple: Vec<BigInt>) -> Vec<BigInt> {
        sorted_legs(tuple)
    }
}

/// Three-parameter family [`pythagorean_scaled`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ScaledPythagorean;

impl ParametricFamily for ScaledPythagorean {
    fn name(&self) -> &'static str {
        "pythagorean-scaled"
    }
    fn arity(&self) -> usize {
        3
    }
    fn degree(&self) -> u32 {
        3
    }
    fn eval(&self, params: &[i64]) -> Option<Vec<BigInt>> {
        let [a, b, c] = [params[0], params[1], params[2]].map(|p| u64::try_from(p).ok());
        let (x, y, z) = pythagorean_scaled(a?, b?, c?).ok()?;
        Some(vec![x.into(), y.into(), z.into()])
    }
    fn satisfies(&self, tuple: &[BigInt]) -> bool {
        is_pythagorean(tuple)
    }
    fn parameter_box(&self, n: u64) -> Vec<RangeInclusive<i64>> {
        let r = iroot((n as u128).saturating_sub(1), 2) as i64;
        vec![1..=r, 1..=r, 1..=(n as i64 / 5).max(1)]
    }
    fn canonical(&self, tuple: Vec<BigInt>) -> Vec<BigInt> {
        sorted_legs(tuple)
    }
}

pub fn family_by_name(name: &str) -> Option<Box<dyn ParametricFamily>> {
    match name {
        "cubic-unit" => Some(Box::new(CubicUnit)),
        "pythagorean" => Some(Box::new(Pythagorean)),
        "pythagorean-scaled" => Some(Box::new(ScaledPythagorean)),
        _ => None,
    }
}

/// Distinct family members with every `|x_i| <= n`, found by enumerating the
/// parameter box of the dominant coordinate.
pub fn family_count_in_cube(family: &dyn ParametricFamily, n: u64) -> Result<u64, ParametricError> {
    let arity = family.arity();
    if !(1..=2).contains(&arity) {
        return Err(ParametricError::UnsupportedArity { name: family.name(), arity });
    }
    let bound = BigInt::from(n);
    let ranges = family.parameter_box(n);
    let mut seen = BTreeSet::new();
    let mut visit = |params: &[i64]| {
        if let Some(t) = family.eval(params) {
            if t.iter().all(|x| x.abs() <= bound) {
                debug_assert!(family.satisfies(&t));
                seen.insert(family.canonical(t));
            }
        }
    };
    if arity == 1 {
        for a in ranges[0].clone() {
            visit(&[a]);
        }
    } else {
        for a in ranges[0].clone() {
            for b in ranges[1].clone() {
                visit(&[a, b]);
            }
        }
    }
    Ok(seen.len() as u64)
}

/// Distinct triples `c·(a² − b², 2ab, a² + b²)` with hypotenuse `<= n`, legs unordered.
pub fn scaled_pythagorean_distinct(n: u64) -> u64 {
    let mut seen = BTreeSet::new();
    let mut a = 2u64;
    while a * a < n {
        for b in 1..a {
            let hyp = a * a + b * b;
            if hyp > n {
                break;
            }
            for c in 1..=n / hyp {
                let (x, y, z) = pythagorean_scaled(a, b, c).expect("a > b >= 1, c >= 1");
                seen.insert((x.min(y), x.max(y), z));
            }
        }
        a += 1;
    }
    seen.len() as u64
}

/// Lattice points `a > b >= 1` with `a² + b² <= n`.
pub fn sector_count(n: u64) -> u64 {
    let n = n as u128;
    let mut total = 0u64;
    let mut b = 1u128;
    while b * b + (b + 1) * (b + 1) <= n {
        total += (iroot(n - b * b, 2) - b) as u64;
        b += 1;
    }
    total
}

/// `πN/8`, the area of the sector `{a > b > 0, a² + b² <= N}`.
pub fn sector_area(n: u64) -> f64 {
    std::f64::consts::PI * n as f64 / 8.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn cubic_examples() {
        assert_eq!(cubic_unit(1), (big(9), big(-8), big(-6)));
        assert_eq!(cubic_unit(0), (big(0), big(1), big(0)));
        assert_eq!(cubic_unit(2), (big(144), big(-71), big(-138)));
        assert_eq!(big(2_985_984) - big(357_911) - big(2_628_072), big(1));
    }

    #[test]
    fn cubic_identity_with_large_parameters() {
        for a in [-10_000i64, -9_999, -1, 7, 9_998, 10_000, i32::MAX as i64] {
            let (x, y, z) = cubic_unit(a);
            assert!(CubicUnit.satisfies(&[x, y, z]), "a = {a}");
        }
    }

    #[test]
    fn pythagorean_examples() {
        assert_eq!(pythagorean(2, 1), Ok((3, 4, 5)));
        assert_eq!(pythagorean(3, 2), Ok((5, 12, 13)));
        assert_eq!(pythagorean(2, 2), Err(ParametricError::NotDecreasing { a: 2, b: 2 }));
        assert_eq!(pythagorean(3, 0), Err(ParametricError::NotDecreasing { a: 3, b: 0 }));
        assert_eq!(pythagorean_scaled(2, 1, 3), Ok((9, 12, 15)));
        assert_eq!(pythagorean_scaled(2, 1, 1), Ok((3, 4, 5)));
        assert_eq!(pythagorean_scaled(2, 1, 0), Err(ParametricError::ZeroScale));
    }

    #[test]
    fn scaled_family_repeats() {
        // (3,1) gives (8,6,10), the same unordered triple as (2,1)·2.
        assert_eq!(pythagorean(3, 1).unwrap(), (8, 6, 10));
        assert_eq!(pythagorean_scaled(2, 1, 2).unwrap(), (6, 8, 10));
        let raw: u64 = (2u64..=5).flat_map(|a| (1..a).map(move |b| (a, b))).map(|(a, b)| 25 / (a * a + b * b)).sum();
        assert!(scaled_pythagorean_distinct(25) < raw);
        assert_eq!(scaled_pythagorean_distinct(25), 8);
    }

    #[test]
    fn sector_examples() {
        assert_eq!(sector_count(25), 6);
        assert_eq!(sector_count(2), 0);
        assert_eq!(sector_count(5), 1);
        let n = 1_000_000;
        let rel = (sector_count(n) as f64 - sector_area(n)).abs() / sector_area(n);
        assert!(rel < 0.01, "{rel}");
    }

    #[test]
    fn family_counts() {
        assert_eq!(family_count_in_cube(&CubicUnit, 10), Ok(2));
        assert_eq!(family_count_in_cube(&Pythagorean, 25), Ok(6));
        assert!(matches!(
            family_count_in_cube(&ScaledPythagorean, 25),
            Err(ParametricError::UnsupportedArity { arity: 3, .. })
        ));
    }

    #[test]
    fn pythagorean_family_matches_sector_count() {
        for n in [1, 5, 25, 100, 1000, 12_345] {
            assert_eq!(family_count_in_cube(&Pythagorean, n).unwrap(), sector_count(n), "N = {n}");
        }
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(family_by_name("cubic-unit").unwrap().degree(), 4);
        assert_eq!(family_by_name("pythagorean").unwrap().arity(), 2);
        assert!(family_by_name("nope").is_none());
    }
}
