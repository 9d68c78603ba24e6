//! Report rows, JSON emission with fixed-precision reals, and the text table.

use std::fmt::Write as _;

use diagcount_core::{Backend, BoundPrediction, CountPoint, FitReport, Verdict, VerdictKind};
use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// A real printed with exactly six decimals; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fixed(pub f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(format!("{:.6}", self.0)).map_err(S::Error::custom)?;
        raw.serialize(serializer)
    }
}

/// Quotes a CSV field when it contains a comma, quote or newline.
pub fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_owned()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Predicted {
    pub row: String,
    pub exp: Fixed,
    pub exact: String,
    pub eps: bool,
    #[serde(rename = "const", skip_serializing_if = "Option::is_none")]
    pub constant: Option<Fixed>,
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub via_domination: bool,
    pub source: String,
}

impl From<&BoundPrediction> for Predicted {
    fn from(p: &BoundPrediction) -> Self {
        Predicted {
            row: p.row_id.clone(),
            exp: Fixed(p.exponent_f64()),
            exact: p.exponent.to_string(),
            eps: p.epsilon,
            constant: p.leading_constant.map(Fixed),
            via_domination: p.via_domination,
            source: p.source.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Fitted {
    pub slope: Fixed,
    pub stderr: Fixed,
    pub r2: Fixed,
}

impl From<&FitReport> for Fitted {
    fn from(f: &FitReport) -> Self {
        Fitted { slope: Fixed(f.slope), stderr: Fixed(f.slope_stderr), r2: Fixed(f.r_squared) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub eq: String,
    pub family: String,
    pub backend: Backend,
    pub predicted: Option<Predicted>,
    pub fitted: Option<Fitted>,
    pub tolerance: Option<Fixed>,
    pub verdict: Option<VerdictKind>,
    pub margin: Option<Fixed>,
    pub points: Vec<CountPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ms: Option<u64>,
}

impl ReportRow {
    pub fn set_verdict(&mut self, verdict: Verdict, tolerance: f64) {
        self.verdict = Some(verdict.kind);
        self.margin = Some(Fixed(verdict.margin));
        self.tolerance = Some(Fixed(tolerance));
    }

    pub const CSV_HEADER: &'static str = "eq,family,backend,row,exponent,eps,slope,stderr,r2,verdict";

    pub fn csv_line(&self) -> String {
        let opt = |v: Option<Fixed>| v.map(|f| format!("{:.6}", f.0)).unwrap_or_default();
        let p = self.predicted.as_ref();
        let f = self.fitted.as_ref();
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            csv_field(&self.eq),
            csv_field(&self.family),
            self.backend,
            p.map(|p| p.row.as_str()).unwrap_or(""),
            p.map(|p| p.exact.clone()).unwrap_or_default(),
            p.map(|p| p.eps.to_string()).unwrap_or_default(),
            opt(f.map(|f| f.slope)),
            opt(f.map(|f| f.stderr)),
            opt(f.map(|f| f.r2)),
            self.verdict
                .map(|v| v.to_string())
                .or_else(|| self.error.as_ref().map(|_| "error".into()))
                .unwrap_or_default(),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub preset: String,
    pub rows: usize,
    pub consistent: usize,
    pub violated: usize,
    pub inconclusive: usize,
    pub unpredicted: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub summary: Summary,
}

impl Report {
    pub fn new(preset: &str, rows: Vec<ReportRow>) -> Self {
        let mut summary = Summary { preset: preset.to_owned(), rows: rows.len(), ..Summary::default() };
        for row in &rows {
            match (row.verdict, &row.error) {
                (_, Some(_)) => summary.failed += 1,
                (Some(VerdictKind::Consistent), _) => summary.consistent += 1,
                (Some(VerdictKind::Violated), _) => summary.violated += 1,
                (Some(VerdictKind::Inconclusive), _) => summary.inconclusive += 1,
                (None, None) => summary.unpredicted += 1,
            }
        }
        Report { rows, summary }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("report serializes");
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(ReportRow::CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.csv_line());
            out.push('\n');
        }
        out
    }

    /// Aligned text table. Violated rows are followed by the source of the
    /// challenged bound.
    pub fn to_table(&self) -> String {
        let header = ["equation", "predicted", "slope", "r2", "verdict"];
        let cells: Vec<[String; 5]> = self.rows.iter().map(table_cells).collect();
        let mut widths = header.map(str::len);
        for row in &cells {
            for (w, c) in widths.iter_mut().zip(row) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cols: &[&str]| {
            let padded: Vec<String> = cols.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, &header);
        for (row, c) in self.rows.iter().zip(&cells) {
            line(&mut out, &c.iter().map(String::as_str).collect::<Vec<_>>());
            if row.verdict == Some(VerdictKind::Violated) {
                if let Some(p) = &row.predicted {
                    let _ = writeln!(out, "    challenged bound [{}]: {}", p.row, p.source);
                }
            }
            if let Some(e) = &row.error {
                let _ = writeln!(out, "    error: {e}");
            }
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "\n{} rows ({}): {} consistent, {} violated, {} inconclusive, {} unpredicted, {} failed",
            s.rows, s.preset, s.consistent, s.violated, s.inconclusive, s.unpredicted, s.failed
        );
        out
    }
}

fn table_cells(row: &ReportRow) -> [String; 5] {
    let predicted = match &row.predicted {
        Some(p) => format!("N^({}{})", p.exact, if p.eps { " + eps" } else { "" }),
        None => "-".into(),
    };
    let (slope, r2) = match &row.fitted {
        Some(f) => (format!("{:.3} ± {:.3}", f.slope.0, f.stderr.0), format!("{:.4}", f.r2.0)),
        None => ("-".into(), "-".into()),
    };
    let verdict = match (&row.error, row.verdict) {
        (Some(_), _) => "error".into(),
        (None, Some(v)) => v.to_string(),
        (None, None) => "-".into(),
    };
    [row.eq.clone(), predicted, slope, r2, verdict]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(verdict: Option<VerdictKind>, error: Option<&str>) -> ReportRow {
        ReportRow {
            eq: "x1^2 = x2^2 + x3^2".into(),
            family: "HomogeneousEqualPowers(3,2)".into(),
            backend: Backend::Table,
            predicted: Some(Predicted {
                row: "r".into(),
                exp: Fixed(1.0),
                exact: "1".into(),
                eps: true,
                constant: None,
                via_domination: false,
                source: "src".into(),
            }),
            fitted: Some(Fitted { slope: Fixed(1.2), stderr: Fixed(0.01), r2: Fixed(0.999) }),
            tolerance: Some(Fixed(0.15)),
            verdict,
            margin: None,
            points: vec![CountPoint { side: 25, count: 16 }],
            error: error.map(str::to_owned),
            ms: None,
        }
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn fixed_precision() {
        assert_eq!(serde_json::to_string(&Fixed(1.0 / 3.0)).unwrap(), "0.333333");
        assert_eq!(serde_json::to_string(&Fixed(2.0)).unwrap(), "2.000000");
        assert_eq!(serde_json::to_string(&Fixed(f64::NAN)).unwrap(), "null");
    }

    #[test]
    fn json_shape() {
        let json = Report::new("small", vec![row(Some(VerdictKind::Violated), None)]).to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["rows"][0]["fitted"]["slope"], 1.2);
        assert_eq!(v["rows"][0]["verdict"], "Violated");
        assert_eq!(v["rows"][0]["points"][0]["count"], 16);
        assert!(v["rows"][0].get("ms").is_none());
        assert!(v["rows"][0]["predicted"].get("const").is_none());
        assert_eq!(v["summary"]["violated"], 1);
    }

    #[test]
    fn summary_counts() {
        let rows = vec![
            row(Some(VerdictKind::Consistent), None),
            row(Some(VerdictKind::Inconclusive), None),
            row(None, Some("boom")),
            row(None, None),
        ];
        let s = Report::new("small", rows).summary;
        assert_eq!((s.consistent, s.violated, s.inconclusive, s.failed, s.unpredicted), (1, 0, 1, 1, 1));
    }

    #[test]
    fn table_names_challenged_source() {
        let t = Report::new("small", vec![row(Some(VerdictKind::Violated), None)]).to_table();
        assert!(t.contains("challenged bound [r]: src"));
        assert!(t.contains("1.200 ± 0.010"));
        let csv = Report::new("small", vec![row(Some(VerdictKind::Consistent), None)]).to_csv();
        assert_eq!(
            csv.lines().nth(1).unwrap(),
            "x1^2 = x2^2 + x3^2,\"HomogeneousEqualPowers(3,2)\",table,r,1,true,1.200000,0.010000,0.999000,Consistent"
        );
    }
}
