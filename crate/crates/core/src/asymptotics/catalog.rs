use std::fmt;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::Deserialize;
use statrs::function::gamma::gamma;
use thiserror::Error;

use super::expr::{Expr, ExprError};
use crate::equation::EquationFamily;

const BUNDLED: &str = include_str!("catalog.toml");

const KNOWN_VARIABLES: [&str; 8] = ["s", "k", "terms", "sum_inv", "min_k", "max_k", "true", "false"];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog manifest: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("catalog row `{row}`: {source}")]
    Expr { row: String, source: ExprError },
    #[error("catalog row `{row}`: {message}")]
    Row { row: String, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKey {
    ExplicitEqual,
    ExplicitMixed,
    HomogeneousEqual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantKind {
    GammaProduct,
}

#[derive(Debug, Deserialize)]
struct RawCatalog {
    row: Vec<RawRow>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRow {
    id: String,
    family: FamilyKey,
    #[serde(default)]
    exponents: Option<Vec<Vec<u32>>>,
    when: String,
    exponent: String,
    epsilon: bool,
    #[serde(default)]
    constant: Option<ConstantKind>,
    source: String,
}

#[derive(Debug, Clone)]
pub struct CatalogRow {
    pub id: String,
    pub family: FamilyKey,
    pub exponents: Option<Vec<Vec<u32>>>,
    pub when: Expr,
    pub exponent: Expr,
    pub epsilon: bool,
    pub constant: Option<ConstantKind>,
    pub source: String,
}

/// A predicted bound `R(N) ≪ N^(exponent [+ ε])`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundPrediction {
    pub row_id: String,
    pub exponent: Rational64,
    pub epsilon: bool,
    pub leading_constant: Option<f64>,
    pub source: String,
    pub applicability: String,
    /// Weighted equation bounded through its unit-coefficient counterpart.
    pub via_domination: bool,
}

impl BoundPrediction {
    pub fn exponent_f64(&self) -> f64 {
        self.exponent.to_f64().expect("finite rational")
    }
}

impl fmt::Display for BoundPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N^({}", self.exponent)?;
        if self.epsilon {
            f.write_str(" + eps")?;
        }
        f.write_str(")")?;
        if let Some(c) = self.leading_constant {
            write!(f, " ~ {c:.6} N^{}", self.exponent)?;
        }
        Ok(())
    }
}

/// The bound catalog. Rows come from a TOML manifest; the default one is
/// bundled with the crate.
#[derive(Debug, Clone)]
pub struct Catalog {
    rows: Vec<CatalogRow>,
}

impl Catalog {
    pub fn bundled() -> Self {
        Self::from_toml(BUNDLED).expect("bundled catalog is valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, CatalogError> {
        let raw: RawCatalog = toml::from_str(text)?;
        let mut rows = Vec::with_capacity(raw.row.len());
        for r in raw.row {
            let parse = |src: &str| {
                let e = Expr::parse(src).map_err(|source| CatalogError::Expr { row: r.id.clone(), source })?;
                if let Some(v) = e.variables().into_iter().find(|v| !KNOWN_VARIABLES.contains(v)) {
                    return Err(CatalogError::Expr { row: r.id.clone(), source: ExprError::UnknownVariable(v.into()) });
                }
                Ok(e)
            };
            let when = parse(&r.when)?;
            let exponent = parse(&r.exponent)?;
            if r.constant.is_some() && r.family != FamilyKey::ExplicitMixed {
                return Err(CatalogError::Row { row: r.id, message: "constants need explicit exponent lists".into() });
            }
            if rows.iter().any(|x: &CatalogRow| x.id == r.id) {
                return Err(CatalogError::Row { row: r.id, message: "duplicate id".into() });
            }
            let exponents = r.exponents.map(|lists| {
                lists
                    .into_iter()
                    .map(|mut l| {
                        l.sort_unstable();
                        l
                    })
                    .collect()
            });
            rows.push(CatalogRow {
                id: r.id,
                family: r.family,
                exponents,
                when,
                exponent,
                epsilon: r.epsilon,
                constant: r.constant,
                source: r.source,
            });
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[CatalogRow] {
        &self.rows
    }

    /// Ids of every row whose pattern matches `family` directly.
    pub fn matching_rows(&self, family: &EquationFamily) -> Vec<&str> {
        self.rows.iter().filter(|r| row_matches(r, family)).map(|r| r.id.as_str()).collect()
    }

    /// The cataloged bound for `family`, or `None` when no row covers it.
    ///
    /// Families with coefficients above 1 are looked up as their unit
    /// counterpart: `a_j·x_j^k_j >= x_j^k_j` means their solutions inject
    /// into the unit equation's solutions. The leading constant is dropped
    /// in that case.
    pub fn predict(&self, family: &EquationFamily) -> Option<BoundPrediction> {
        if let EquationFamily::ExplicitMixed { s, exponents, weighted: true } = family {
            let unit = if exponents.windows(2).all(|w| w[0] == w[1]) {
                EquationFamily::ExplicitEqualPowers { s: *s, k: exponents[0] }
            } else {
                EquationFamily::ExplicitMixed { s: *s, exponents: exponents.clone(), weighted: false }
            };
            return self.predict(&unit).map(|mut p| {
                p.via_domination = true;
                p.leading_constant = None;
                p.source.push_str("; coefficients > 1 bounded by the unit-coefficient count");
                p
            });
        }
        let row = self.rows.iter().find(|r| row_matches(r, family))?;
        let exponent = row.exponent.eval(&|v| family_variable(family, v)).ok()?.as_num().ok()?;
        if exponent <= Rational64::zero() {
            return None;
        }
        let leading_constant = row.constant.map(|ConstantKind::GammaProduct| gamma_product(&exponent_list(family)));
        Some(BoundPrediction {
            row_id: row.id.clone(),
            exponent,
            epsilon: row.epsilon,
            leading_constant,
            source: row.source.clone(),
            applicability: row.when.to_string(),
            via_domination: false,
        })
    }
}

fn row_matches(row: &CatalogRow, family: &EquationFamily) -> bool {
    let key = match family {
        EquationFamily::ExplicitEqualPowers { .. } => FamilyKey::ExplicitEqual,
        EquationFamily::ExplicitMixed { weighted: false, .. } => FamilyKey::ExplicitMixed,
        EquationFamily::ExplicitMixed { weighted: true, .. } => return false,
        EquationFamily::HomogeneousEqualPowers { .. } => FamilyKey::HomogeneousEqual,
    };
    if row.family != key {
        return false;
    }
    if let Some(lists) = &row.exponents {
        let mine = exponent_list(family);
        if !lists.contains(&mine) {
            return false;
        }
    }
    matches!(row.when.eval(&|v| family_variable(family, v)), Ok(super::expr::Value::Bool(true)))
}

fn exponent_list(family: &EquationFamily) -> Vec<u32> {
    match family {
        EquationFamily::ExplicitEqualPowers { s, k } | EquationFamily::HomogeneousEqualPowers { s, k } => {
            vec![*k; s - 1]
        }
        EquationFamily::ExplicitMixed { exponents, .. } => exponents.clone(),
    }
}

fn family_variable(family: &EquationFamily, name: &str) -> Option<Rational64> {
    let ks = exponent_list(family);
    let int = |v: usize| Some(Rational64::from_integer(v as i64));
    match name {
        "s" => int(family.s()),
        "terms" => int(family.s() - 1),
        "k" => match family {
            EquationFamily::ExplicitEqualPowers { k, .. } | EquationFamily::HomogeneousEqualPowers { k, .. } => {
                int(*k as usize)
            }
            EquationFamily::ExplicitMixed { .. } => None,
        },
        "sum_inv" => Some(ks.iter().map(|&k| Rational64::new(1, k as i64)).sum()),
        "min_k" => ks.iter().min().and_then(|&k| int(k as usize)),
        "max_k" => ks.iter().max().and_then(|&k| int(k as usize)),
        _ => None,
    }
}

/// `Π_j Γ(1 + 1/k_j)`: volume of `{y >= 0 : Σ y_j^k_j <= 1}` times `Γ(1 + Σ 1/k_j)`.
pub fn gamma_product(exponents: &[u32]) -> f64 {
    exponents.iter().map(|&k| gamma(1.0 + 1.0 / k as f64)).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    fn mixed(s: usize, e: &[u32]) -> EquationFamily {
        EquationFamily::ExplicitMixed { s, exponents: e.to_vec(), weighted: false }
    }

    #[test]
    fn documented_predictions() {
        let c = Catalog::bundled();
        let p = c.predict(&EquationFamily::ExplicitEqualPowers { s: 6, k: 2 }).unwrap();
        assert_eq!((p.exponent, p.epsilon), (r(5, 2), false));
        let p = c.predict(&EquationFamily::HomogeneousEqualPowers { s: 6, k: 2 }).unwrap();
        assert_eq!((p.exponent, p.epsilon), (r(3, 2), false));
        let p = c.predict(&mixed(4, &[2, 3, 5])).unwrap();
        assert_eq!((p.exponent, p.epsilon), (r(31, 30), true));
        let p = c.predict(&EquationFamily::HomogeneousEqualPowers { s: 3, k: 2 }).unwrap();
        assert_eq!((p.exponent, p.epsilon), (r(1, 1), true));
        let p = c.predict(&mixed(4, &[2, 3, 6])).unwrap();
        assert_eq!((p.exponent, p.epsilon), (r(1, 1), false));
        let constant = p.leading_constant.unwrap();
        assert!((constant - 0.734_180_833_514).abs() / 0.734_180_833_514 < 1e-6, "{constant}");
    }

    #[test]
    fn uncovered_families_have_no_prediction() {
        let c = Catalog::bundled();
        assert!(c.predict(&EquationFamily::ExplicitEqualPowers { s: 6, k: 3 }).is_none());
        assert!(c.predict(&EquationFamily::ExplicitEqualPowers { s: 2, k: 2 }).is_none());
        assert!(c.predict(&EquationFamily::HomogeneousEqualPowers { s: 3, k: 3 }).is_none());
        assert!(c.predict(&mixed(3, &[2, 3])).is_none());
    }

    #[test]
    fn weighted_families_use_unit_counterpart() {
        let c = Catalog::bundled();
        let weighted = EquationFamily::ExplicitMixed { s: 6, exponents: vec![2; 5], weighted: true };
        let p = c.predict(&weighted).unwrap();
        assert!(p.via_domination);
        assert_eq!(p.row_id, "explicit-many-terms");
        assert_eq!(p.exponent, r(5, 2));
        let weighted = EquationFamily::ExplicitMixed { s: 4, exponents: vec![2, 3, 6], weighted: true };
        let p = c.predict(&weighted).unwrap();
        assert_eq!(p.leading_constant, None);
        assert_eq!(p.exponent, r(1, 1));
    }

    /// Every family instance the catalog is meant to cover hits exactly one row.
    #[test]
    fn coverage_is_unambiguous() {
        let c = Catalog::bundled();
        let cases: Vec<(EquationFamily, &str, Rational64)> = vec![
            (EquationFamily::ExplicitEqualPowers { s: 6, k: 2 }, "explicit-many-terms", r(5, 2)),
            (EquationFamily::ExplicitEqualPowers { s: 10, k: 3 }, "explicit-many-terms", r(3, 1)),
            (EquationFamily::ExplicitEqualPowers { s: 3, k: 2 }, "explicit-two-terms", r(3, 2)),
            (EquationFamily::ExplicitEqualPowers { s: 5, k: 2 }, "explicit-four-terms", r(2, 1)),
            (EquationFamily::ExplicitEqualPowers { s: 4, k: 2 }, "explicit-three-terms", r(7, 4)),
            (EquationFamily::ExplicitEqualPowers { s: 4, k: 3 }, "explicit-three-terms", r(3, 2)),
            (EquationFamily::HomogeneousEqualPowers { s: 10, k: 3 }, "homogeneous-many-terms", r(2, 1)),
            (EquationFamily::HomogeneousEqualPowers { s: 6, k: 2 }, "homogeneous-many-terms", r(3, 2)),
            (EquationFamily::HomogeneousEqualPowers { s: 3, k: 2 }, "homogeneous-two-terms", r(1, 1)),
            (EquationFamily::HomogeneousEqualPowers { s: 4, k: 2 }, "homogeneous-three-terms", r(5, 4)),
            (EquationFamily::HomogeneousEqualPowers { s: 4, k: 3 }, "homogeneous-three-terms", r(5, 6)),
            (EquationFamily::HomogeneousEqualPowers { s: 5, k: 2 }, "homogeneous-four-terms", r(3, 2)),
            (mixed(4, &[2, 3, 3]), "mixed-powers", r(7, 6)),
            (mixed(4, &[2, 3, 4]), "mixed-powers", r(13, 12)),
            (mixed(4, &[2, 3, 5]), "mixed-powers", r(31, 30)),
            (mixed(4, &[2, 3, 6]), "mixed-unit-sum", r(1, 1)),
        ];
        for (family, id, exponent) in &cases {
            assert_eq!(c.matching_rows(family), vec![*id], "{family}");
            let p = c.predict(family).unwrap();
            assert_eq!(p.exponent, *exponent, "{family}");
        }
        for row in c.rows() {
            assert!(cases.iter().any(|(_, id, _)| *id == row.id), "row {} has no coverage case", row.id);
        }
        // Small-parameter sweep: never more than one row, exponents positive,
        // constants only on the unit-sum row.
        for s in 2..=12 {
            for k in 1..=5 {
                for f in [
                    EquationFamily::ExplicitEqualPowers { s, k },
                    EquationFamily::HomogeneousEqualPowers { s, k: k.max(2) },
                ] {
                    assert!(c.matching_rows(&f).len() <= 1, "{f}");
                    if let Some(p) = c.predict(&f) {
                        assert!(p.exponent > Rational64::zero());
                        assert!(p.leading_constant.is_none());
                    }
                }
            }
        }
    }

    #[test]
    fn manifest_rows_can_be_added_without_code() {
        let text = format!(
            "{BUNDLED}\n[[row]]\nid = \"explicit-single\"\nfamily = \"explicit-equal\"\nwhen = \"s == 2\"\nexponent = \"1/k\"\nepsilon = false\nsource = \"x1 = x2^k\"\n"
        );
        let c = Catalog::from_toml(&text).unwrap();
        let p = c.predict(&EquationFamily::ExplicitEqualPowers { s: 2, k: 3 }).unwrap();
        assert_eq!(p.exponent, r(1, 3));
    }

    #[test]
    fn bad_manifests_are_rejected() {
        let bad_var = "[[row]]\nid = \"x\"\nfamily = \"explicit-equal\"\nwhen = \"q > 1\"\nexponent = \"1\"\nepsilon = false\nsource = \"\"\n";
        assert!(matches!(Catalog::from_toml(bad_var), Err(CatalogError::Expr { .. })));
        let bad_family = "[[row]]\nid = \"x\"\nfamily = \"weird\"\nwhen = \"true\"\nexponent = \"1\"\nepsilon = false\nsource = \"\"\n";
        assert!(matches!(Catalog::from_toml(bad_family), Err(CatalogError::Toml(_))));
    }

    #[test]
    fn display() {
        let c = Catalog::bundled();
        let p = c.predict(&mixed(4, &[2, 3, 5])).unwrap();
        assert_eq!(p.to_string(), "N^(31/30 + eps)");
    }
}
