//! Problems read from a TOML description.
//!
//! ```toml
//! name = "bump"
//! exact_energy = -0.25          # optional
//!
//! [domain]
//! shape = "square"              # or "lshape"
//! center = [0.0, 0.0]
//! half_width = 1.0
//!
//! [f]
//! type = "constant"
//! value = -2.0
//!
//! [g]
//! type = "polynomial"
//! terms = [[0.5, 2, 0], [0.5, 0, 2]]   # coef, power of x, power of y
//!
//! [chi]                         # optional, zero when absent
//! type = "piecewise"
//! variable = "x"
//! threshold = 0.0
//! below = { type = "constant", value = 0.0 }
//! above = { type = "sinusoidal", amplitude = 0.1, kx = 3.0 }
//! ```

use std::path::Path;
use std::sync::Arc;

use afem_core::field::{Expr, SharedField, SplitVariable};
use afem_core::mesh::DomainSpec;
use afem_core::problems::{ExactSolution, ProblemSpec};
use afem_core::Point;
use serde::Deserialize;

use crate::error::{AfemError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Square,
    Lshape,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub shape: Shape,
    #[serde(default)]
    pub center: [f64; 2],
    pub half_width: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    X,
    Y,
    Radius,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ExprConfig {
    Constant {
        value: f64,
    },
    Polynomial {
        terms: Vec<(f64, u32, u32)>,
    },
    Radial {
        #[serde(default)]
        center: [f64; 2],
        #[serde(default)]
        terms: Vec<(f64, f64)>,
        #[serde(default)]
        log_coef: f64,
    },
    Sinusoidal {
        amplitude: f64,
        #[serde(default)]
        kx: f64,
        #[serde(default)]
        ky: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
    Piecewise {
        variable: Variable,
        #[serde(default)]
        center: [f64; 2],
        threshold: f64,
        below: Box<ExprConfig>,
        above: Box<ExprConfig>,
    },
    Sum {
        parts: Vec<ExprConfig>,
    },
}

impl ExprConfig {
    pub fn to_expr(&self) -> Expr {
        let pt = |c: [f64; 2]| Point::new(c[0], c[1]);
        match self {
            ExprConfig::Constant { value } => Expr::Constant(*value),
            ExprConfig::Polynomial { terms } => Expr::Polynomial(terms.clone()),
            ExprConfig::Radial { center, terms, log_coef } => {
                Expr::Radial { center: pt(*center), terms: terms.clone(), log_coef: *log_coef }
            }
            &ExprConfig::Sinusoidal { amplitude, kx, ky, phase, offset } => {
                Expr::Sinusoidal { amplitude, kx, ky, phase, offset }
            }
            ExprConfig::Piecewise { variable, center, threshold, below, above } => Expr::Piecewise {
                variable: match variable {
                    Variable::X => SplitVariable::X,
                    Variable::Y => SplitVariable::Y,
                    Variable::Radius => SplitVariable::Radius(pt(*center)),
                },
                threshold: *threshold,
                below: Box::new(below.to_expr()),
                above: Box::new(above.to_expr()),
            },
            ExprConfig::Sum { parts } => Expr::Sum(parts.iter().map(ExprConfig::to_expr).collect()),
        }
    }

    fn field(&self) -> SharedField {
        Arc::new(self.to_expr())
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomProblem {
    #[serde(default = "default_name")]
    pub name: String,
    pub domain: DomainConfig,
    pub f: ExprConfig,
    pub g: ExprConfig,
    pub chi: Option<ExprConfig>,
    /// Energy of the exact solution after shifting the obstacle to zero.
    pub exact_energy: Option<f64>,
}

fn default_name() -> String {
    "custom".to_owned()
}

impl CustomProblem {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|source| AfemError::Config { path: path.to_owned(), source })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AfemError::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn to_problem(&self) -> Result<ProblemSpec> {
        let d = &self.domain;
        if !(d.half_width > 0.0 && d.half_width.is_finite()) {
            return Err(AfemError::Usage("domain half_width must be positive".into()));
        }
        let center = Point::new(d.center[0], d.center[1]);
        let domain = match d.shape {
            Shape::Square => DomainSpec::Square { center, half_width: d.half_width },
            Shape::Lshape => DomainSpec::LShape { center, half_width: d.half_width },
        };
        Ok(ProblemSpec {
            name: self.name.clone(),
            domain,
            chi: self.chi.as_ref().map(ExprConfig::field),
            g: self.g.field(),
            f: self.f.field(),
            exact: self.exact_energy.map(|energy| ExactSolution { u: None, energy }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use afem_core::field::ScalarField;

    #[test]
    fn module_example_parses() {
        let doc: String = include_str!("custom.rs")
            .lines()
            .take_while(|l| l.starts_with("//!"))
            .skip_while(|l| !l.contains("```toml"))
            .skip(1)
            .take_while(|l| !l.contains("```"))
            .map(|l| l.trim_start_matches("//!").trim_start_matches(' '))
            .collect::<Vec<_>>()
            .join("\n");
        let p = CustomProblem::parse(&doc, Path::new("doc")).unwrap();
        assert_eq!(p.name, "bump");
        let spec = p.to_problem().unwrap();
        let q = Point::new(0.5, 0.5);
        assert_eq!(spec.g.value(q), 0.25);
        assert_eq!(spec.f.value(q), -2.0);
        let chi = spec.chi.unwrap();
        assert!((chi.value(q) - 0.1 * (1.5f64).sin()).abs() < 1e-15);
        assert_eq!(chi.value(Point::new(-0.5, 0.0)), 0.0);
        assert_eq!(spec.exact.unwrap().energy, -0.25);
    }

    #[test]
    fn radial_and_sum() {
        let text = r#"
            [domain]
            shape = "lshape"
            half_width = 2.0
            [f]
            type = "sum"
            parts = [{ type = "constant", value = 1.0 }, { type = "radial", terms = [[2.0, 2.0]], log_coef = 1.0 }]
            [g]
            type = "constant"
            value = 0.0
        "#;
        let spec = CustomProblem::parse(text, Path::new("t")).unwrap().to_problem().unwrap();
        assert_eq!(spec.name, "custom");
        assert!(matches!(spec.domain, DomainSpec::LShape { half_width, .. } if half_width == 2.0));
        let v = spec.f.value(Point::new(3.0, 4.0));
        assert!((v - (1.0 + 50.0 + 5f64.ln())).abs() < 1e-12);
        assert!(spec.chi.is_none() && spec.exact.is_none());
    }

    #[test]
    fn rejects_unknown_fields_and_bad_width() {
        let bad = "[domain]\nshape = \"square\"\nhalf_width = 1.0\nfoo = 1\n[f]\ntype = \"constant\"\nvalue = 0.0\n[g]\ntype = \"constant\"\nvalue = 0.0\n";
        assert!(matches!(CustomProblem::parse(bad, Path::new("b")), Err(AfemError::Config { .. })));
        let zero = bad.replace("foo = 1\n", "").replace("1.0", "0.0");
        let p = CustomProblem::parse(&zero, Path::new("z")).unwrap();
        assert!(matches!(p.to_problem(), Err(AfemError::Usage(_))));
    }
}
