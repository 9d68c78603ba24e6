//! Exact solution counts for diagonal Diophantine equations inside the
//! hypercube `[1, N]^s`, together with the tooling to compare their growth
//! against predicted exponents.
//!
//! The crate is organised bottom-up:
//!
//! * [`equation`]: parsing, rendering and classifying equations.
//! * [`tables`]: exact representation tables, a brute-force oracle and even moments.
//! * [`counter`]: hypercube counts through three interchangeable backends.
//! * [`asymptotics`]: the bound catalog, exponent fitting and verdicts.
//! * [`parametric`]: polynomial solution families and lattice sector counts.

pub mod arith;
pub mod asymptotics;
pub mod counter;
pub mod equation;
pub mod error;
pub mod parametric;
pub mod tables;

pub use asymptotics::{
    check_bound, default_tolerance, fit_exponent, probability_weight, BoundPrediction, Catalog, FitReport, Verdict,
    VerdictKind,
};
pub use counter::{meet_in_middle_count, Backend, CountPoint, CountSeries, Counter};
pub use equation::{parse_equation, DiagonalEquation, EquationFamily, LhsKind, ParseError, Term};
pub use error::{CountError, CountResult};
pub use parametric::{family_count_in_cube, sector_count, ParametricError, ParametricFamily};
pub use tables::{convolve, even_moment, power_indicator, r_oracle, r_table, MemoryBudget, RTable};
