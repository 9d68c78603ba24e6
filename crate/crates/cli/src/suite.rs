//! The bundled bound suite: manifest parsing, the coverage lint and the
//! concurrent runner.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use diagcount_core::asymptotics::default_tolerance;
use diagcount_core::{
    check_bound, fit_exponent, parse_equation, Backend, Catalog, CountError, Counter, DiagonalEquation, MemoryBudget,
};
use rayon::prelude::*;
use serde::Deserialize;
use thiserror::Error;

use crate::grid::Grid;
use crate::report::{Fitted, Predicted, Report, ReportRow};

pub const BUNDLED_MANIFEST: &str = include_str!("suite.toml");

/// Fits need at least this many grid points.
pub const MIN_GRID_POINTS: usize = 4;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("entry `{eq}`: {message}")]
    Entry { eq: String, message: String },
    #[error("catalog rows neither exercised nor excluded: {}", .0.join(", "))]
    Uncovered(Vec<String>),
    #[error("worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Preset {
    Small,
    Medium,
    Large,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Small, Preset::Medium, Preset::Large];

    pub fn name(&self) -> &'static str {
        match self {
            Preset::Small => "small",
            Preset::Medium => "medium",
            Preset::Large => "large",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset `{s}` (expected small, medium or large)"))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    #[serde(default)]
    entry: Vec<RawEntry>,
    #[serde(default)]
    excluded: Vec<Exclusion>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    eq: String,
    source: String,
    backend: String,
    small: String,
    medium: String,
    large: String,
    #[serde(default)]
    tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Exclusion {
    pub row: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct SuiteEntry {
    pub equation: DiagonalEquation,
    /// Catalog row the entry is meant to exercise.
    pub source: String,
    pub backend: Backend,
    /// Grids in [`Preset::ALL`] order.
    pub grids: [Grid; 3],
    pub tolerance: Option<f64>,
}

impl SuiteEntry {
    pub fn grid(&self, preset: Preset) -> &Grid {
        &self.grids[preset as usize]
    }
}

#[derive(Debug, Clone)]
pub struct Manifest {
    pub entries: Vec<SuiteEntry>,
    pub excluded: Vec<Exclusion>,
}

impl Manifest {
    pub fn bundled() -> Self {
        Self::from_toml(BUNDLED_MANIFEST).expect("bundled manifest is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, SuiteError> {
        let raw: RawManifest = toml::from_str(text).map_err(|e| SuiteError::Manifest(e.to_string()))?;
        let entries = raw.entry.into_iter().map(parse_entry).collect::<Result<_, _>>()?;
        Ok(Manifest { entries, excluded: raw.excluded })
    }

    /// Checks that every entry classifies onto its declared catalog row and
    /// that every catalog row is exercised or explicitly excluded.
    pub fn lint(&self, catalog: &Catalog) -> Result<(), SuiteError> {
        let known: BTreeSet<&str> = catalog.rows().iter().map(|r| r.id.as_str()).collect();
        for entry in &self.entries {
            let got = catalog.predict(&entry.equation.classify()).map(|p| p.row_id);
            if got.as_deref() != Some(entry.source.as_str()) {
                return Err(SuiteError::Entry {
                    eq: entry.equation.render(),
                    message: format!("declared source `{}` but the catalog gives {:?}", entry.source, got),
                });
            }
        }
        for ex in &self.excluded {
            if !known.contains(ex.row.as_str()) {
                return Err(SuiteError::Manifest(format!("excluded row `{}` is not in the catalog", ex.row)));
            }
        }
        let covered: BTreeSet<&str> = self
            .entries
            .iter()
            .map(|e| e.source.as_str())
            .chain(self.excluded.iter().map(|e| e.row.as_str()))
            .collect();
        let missing: Vec<String> = known.difference(&covered).map(|s| s.to_string()).collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(SuiteError::Uncovered(missing))
        }
    }
}

fn parse_entry(raw: RawEntry) -> Result<SuiteEntry, SuiteError> {
    let fail = |message: String| SuiteError::Entry { eq: raw.eq.clone(), message };
    let equation = parse_equation(&raw.eq).map_err(|e| fail(e.to_string()))?;
    let backend = raw.backend.parse().map_err(fail)?;
    let grid = |text: &str, preset: &str| -> Result<Grid, SuiteError> {
        let g: Grid = text.parse().map_err(|e| fail(format!("{preset} grid: {e}")))?;
        if g.points().len() < MIN_GRID_POINTS {
            return Err(fail(format!("{preset} grid has fewer than {MIN_GRID_POINTS} points")));
        }
        Ok(g)
    };
    let grids = [grid(&raw.small, "small")?, grid(&raw.medium, "medium")?, grid(&raw.large, "large")?];
    if let Some(t) = raw.tolerance {
        if !(t.is_finite() && t >= 0.0) {
            return Err(fail(format!("tolerance {t} must be finite and non-negative")));
        }
    }
    Ok(SuiteEntry { equation, source: raw.source, backend, grids, tolerance: raw.tolerance })
}

/// Sweeps, fits and checks one equation. Failures land in the row's `error`.
/// A Table request the equation cannot use is retried on the suggested
/// fallback backend.
pub fn evaluate(
    equation: &DiagonalEquation,
    grid: &Grid,
    backend: Backend,
    tolerance: Option<f64>,
    counter: &Counter,
    catalog: &Catalog,
) -> ReportRow {
    let family = equation.classify();
    let prediction = catalog.predict(&family);
    let mut row = ReportRow {
        eq: equation.render(),
        family: family.to_string(),
        backend,
        predicted: prediction.as_ref().map(Predicted::from),
        fitted: None,
        tolerance: None,
        verdict: None,
        margin: None,
        points: Vec::new(),
        error: None,
        ms: None,
    };
    let series = match counter.sweep(equation, grid.points(), backend) {
        Err(CountError::BackendInapplicable { fallback, .. }) => {
            row.backend = fallback;
            counter.sweep(equation, grid.points(), fallback)
        }
        other => other,
    };
    let series = match series {
        Ok(s) => s,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.points = series.points.clone();
    let fit = match fit_exponent(&series, 1) {
        Ok(f) => f,
        Err(e) => {
            row.error = Some(e.to_string());
            return row;
        }
    };
    row.fitted = Some(Fitted::from(&fit));
    if let Some(p) = &prediction {
        let tol = tolerance.unwrap_or_else(|| default_tolerance(p));
        row.set_verdict(check_bound(&fit, p, tol), tol);
    }
    row
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub preset: Preset,
    /// Worker threads; `0` lets rayon decide.
    pub workers: usize,
    pub budget: MemoryBudget,
    pub timings: bool,
}

/// Runs every entry, at most `workers` at a time, and assembles rows in
/// manifest order. Row failures are reported in the rows, not as errors.
pub fn run_suite(manifest: &Manifest, catalog: &Catalog, options: SuiteOptions) -> Result<Report, SuiteError> {
    manifest.lint(catalog)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers)
        .build()
        .map_err(|e| SuiteError::Pool(e.to_string()))?;
    let counter = Counter::new(options.budget);
    let rows = pool.install(|| {
        manifest
            .entries
            .par_iter()
            .map(|entry| {
                let start = Instant::now();
                let mut row = evaluate(
                    &entry.equation,
                    entry.grid(options.preset),
                    entry.backend,
                    entry.tolerance,
                    &counter,
                    catalog,
                );
                if options.timings {
                    row.ms = Some(start.elapsed().as_millis() as u64);
                }
                row
            })
            .collect()
    });
    Ok(Report::new(options.preset.name(), rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use diagcount_core::VerdictKind;

    #[test]
    fn bundled_manifest_passes_lint() {
        let m = Manifest::bundled();
        assert!(m.entries.len() >= Catalog::bundled().rows().len());
        m.lint(&Catalog::bundled()).unwrap();
    }

    #[test]
    fn lint_reports_uncovered_rows() {
        let text = r#"
            [[entry]]
            eq = "x1 = x2^2 + x3^2"
            source = "explicit-two-terms"
            backend = "table"
            small = "4:32:2"
            medium = "4:32:2"
            large = "4:32:2"
        "#;
        let m = Manifest::from_toml(text).unwrap();
        let Err(SuiteError::Uncovered(missing)) = m.lint(&Catalog::bundled()) else { panic!("expected uncovered") };
        assert!(missing.contains(&"mixed-unit-sum".to_string()));
        assert!(!missing.contains(&"explicit-two-terms".to_string()));
    }

    #[test]
    fn exclusions_count_as_coverage() {
        let ids: Vec<String> = Catalog::bundled().rows().iter().map(|r| r.id.clone()).collect();
        let text: String = ids.iter().map(|id| format!("[[excluded]]\nrow = \"{id}\"\nreason = \"test\"\n")).collect();
        Manifest::from_toml(&text).unwrap().lint(&Catalog::bundled()).unwrap();
        let bogus = "[[excluded]]\nrow = \"nope\"\nreason = \"x\"\n";
        assert!(Manifest::from_toml(bogus).unwrap().lint(&Catalog::bundled()).is_err());
    }

    #[test]
    fn lint_rejects_wrong_source() {
        let text = r#"
            [[entry]]
            eq = "x1 = x2^2 + x3^2"
            source = "explicit-four-terms"
            backend = "table"
            small = "4:32:2"
            medium = "4:32:2"
            large = "4:32:2"
        "#;
        let err = Manifest::from_toml(text).unwrap().lint(&Catalog::bundled()).unwrap_err();
        assert!(matches!(err, SuiteError::Entry { .. }), "{err}");
    }

    #[test]
    fn entry_validation() {
        let base = |eq: &str, grid: &str, extra: &str| {
            format!(
                "[[entry]]\neq = \"{eq}\"\nsource = \"x\"\nbackend = \"table\"\nsmall = \"{grid}\"\nmedium = \"{grid}\"\nlarge = \"{grid}\"\n{extra}"
            )
        };
        assert!(Manifest::from_toml(&base("x1 = x2^2 + x3^2", "4:32:2", "")).is_ok());
        assert!(Manifest::from_toml(&base("x1 = ", "4:32:2", "")).is_err());
        assert!(Manifest::from_toml(&base("x1 = x2^2 + x3^2", "4:16:2", "")).is_err());
        assert!(Manifest::from_toml(&base("x1 = x2^2 + x3^2", "4:32:2", "tolerance = -1.0")).is_err());
        assert!(Manifest::from_toml(&base("x1 = x2^2 + x3^2", "4:32:2", "colour = 1")).is_err());
    }

    #[test]
    fn evaluate_small_pythagorean() {
        let eq = parse_equation("x1^2 = x2^2 + x3^2").unwrap();
        let grid: Grid = "25:200:2".parse().unwrap();
        let row = evaluate(&eq, &grid, Backend::Table, None, &Counter::default(), &Catalog::bundled());
        assert_eq!(row.points[0].count, 16);
        assert!(row.error.is_none());
        assert!(row.verdict.is_some());
        assert_eq!(row.predicted.unwrap().row, "homogeneous-two-terms");
    }

    #[test]
    fn evaluate_reports_failures_in_row() {
        let eq = parse_equation("x1 = x2^2 + x3^2").unwrap();
        let grid: Grid = "1:2:2".parse().unwrap();
        let row = evaluate(&eq, &grid, Backend::Table, None, &Counter::default(), &Catalog::bundled());
        assert!(row.error.is_some());
        assert_eq!(Report::new("t", vec![row]).summary.failed, 1);
    }

    #[test]
    fn tolerance_override_changes_verdict() {
        let eq = parse_equation("x1^2 = x2^2 + x3^2 + x4^2").unwrap();
        let grid: Grid = "16:256:2".parse().unwrap();
        let (c, cat) = (Counter::default(), Catalog::bundled());
        let strict = evaluate(&eq, &grid, Backend::Table, None, &c, &cat);
        let lax = evaluate(&eq, &grid, Backend::Table, Some(5.0), &c, &cat);
        assert_eq!(strict.verdict, Some(VerdictKind::Violated));
        assert_eq!(lax.verdict, Some(VerdictKind::Consistent));
    }
}
