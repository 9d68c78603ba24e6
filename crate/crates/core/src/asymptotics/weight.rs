use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WeightError {
    #[error("p(n) needs N >= 2 (the normaliser N^(1/k) - 1 vanishes at N = 1)")]
    DegenerateSide,
    #[error("p(n) needs 1 <= n <= N, got n = {n}, N = {side}")]
    OutOfRange { n: u64, side: u64 },
    #[error("p(n) needs k >= 1")]
    ZeroExponent,
}

/// Chance that a value `n <= N` is a perfect k-th power, smoothed:
/// `p(n) = n^(1/k - 1) / ((N^(1/k) - 1)·k)`.
pub fn probability_weight(n: u64, side: u64, k: u32) -> Result<f64, WeightError> {
    if k == 0 {
        return Err(WeightError::ZeroExponent);
    }
    if side < 2 {
        return Err(WeightError::DegenerateSide);
    }
    if n == 0 || n > side {
        return Err(WeightError::OutOfRange { n, side });
    }
    let inv_k = 1.0 / k as f64;
    Ok((n as f64).powf(inv_k - 1.0) / normaliser(side, k))
}

fn normaliser(side: u64, k: u32) -> f64 {
    let inv_k = 1.0 / k as f64;
    ((side as f64).powf(inv_k) - 1.0) * k as f64
}

/// `Σ_{n=1}^{N} p(n)`, compensated summation.
pub fn weight_sum(side: u64, k: u32) -> Result<f64, WeightError> {
    probability_weight(1, side, k)?;
    let exponent = 1.0 / k as f64 - 1.0;
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for n in 1..=side {
        let term = (n as f64).powf(exponent);
        let t = sum + term;
        if sum.abs() >= term.abs() {
            carry += (sum - t) + term;
        } else {
            carry += (term - t) + sum;
        }
        sum = t;
    }
    Ok((sum + carry) / normaliser(side, k))
}
