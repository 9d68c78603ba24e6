//! Benchmark fixtures shared by the criterion targets in `benches/`.

/// Equations exercised by the backend benchmarks, with a side length that
/// keeps every backend under a second.
pub const BACKEND_CASES: &[(&str, u64)] = &[
    ("x1 = x2^2 + x3^2 + x4^2 + x5^2 + x6^2", 2_000),
    ("x1^2 = x2^2 + x3^2", 2_000),
    ("x1^2 = x2^2 + x3^2 + x4^2", 400),
    ("x1 = x2^2 + x3^3 + x4^6", 1_000_000),
];

/// Geometric grid `start, start·factor, ...` up to `stop`.
pub fn geometric(start: u64, stop: u64, factor: u64) -> Vec<u64> {
    std::iter::successors(Some(start), |&n| n.checked_mul(factor)).take_while(|&n| n <= stop).collect()
}
