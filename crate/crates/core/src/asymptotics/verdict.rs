use std::fmt;

use serde::Serialize;

use super::{BoundPrediction, FitReport};

/// Tolerance for bounds without an ε slack.
pub const EXACT_TOLERANCE: f64 = 0.10;
/// Tolerance for bounds of the form `N^(e + ε)`.
pub const EPSILON_TOLERANCE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerdictKind {
    Consistent,
    Violated,
    Inconclusive,
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictKind::Consistent => "Consistent",
            VerdictKind::Violated => "Violated",
            VerdictKind::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// `exponent + tolerance - slope`; negative when the fit overshoots.
    pub margin: f64,
}

pub fn default_tolerance(prediction: &BoundPrediction) -> f64 {
    if prediction.epsilon {
        EPSILON_TOLERANCE
    } else {
        EXACT_TOLERANCE
    }
}

/// Consistent when `slope <= exponent + tolerance`; Violated when even
/// `slope - 2·stderr` exceeds that ceiling; Inconclusive otherwise.
pub fn check_bound(fit: &FitReport, prediction: &BoundPrediction, tolerance: f64) -> Verdict {
    let ceiling = prediction.exponent_f64() + tolerance;
    let kind = if fit.slope <= ceiling {
        VerdictKind::Consistent
    } else if fit.slope - 2.0 * fit.slope_stderr > ceiling {
        VerdictKind::Violated
    } else {
        VerdictKind::Inconclusive
    };
    Verdict { kind, margin: ceiling - fit.slope }
}
