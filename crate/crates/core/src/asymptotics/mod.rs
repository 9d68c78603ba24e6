//! Predicted exponents, empirical exponent fits and the verdicts that
//! compare them.

mod catalog;
pub mod expr;
mod fit;
mod verdict;
mod weight;

pub use catalog::{gamma_product, BoundPrediction, Catalog, CatalogError, CatalogRow, ConstantKind, FamilyKey};
pub use fit::{fit_exponent, fit_log_log, FitError, FitReport};
pub use verdict::{check_bound, default_tolerance, Verdict, VerdictKind, EPSILON_TOLERANCE, EXACT_TOLERANCE};
pub use weight::{probability_weight, weight_sum, WeightError};
