//! The model `f: R^n -> R` being explained.

mod expr;
mod parser;
mod program;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use expr::{BinOp, Expr, Func};
pub use parser::parse;
pub use program::Program;

use crate::coalition::Coalition;
use crate::dataset::check_permutation;
use crate::error::{Error, Result};

/// `scale / (1 + exp(-(coeffs · x + intercept)))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearLogistic {
    pub scale: f64,
    pub coeffs: Vec<f64>,
    pub intercept: f64,
}

impl LinearLogistic {
    #[inline]
    fn eval(&self, x: &[f64]) -> f64 {
        let z = self
            .coeffs
            .iter()
            .zip(x)
            .fold(self.intercept, |acc, (c, v)| acc + c * v);
        self.scale / (1.0 + (-z).exp())
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Expression {
        source: String,
        expr: Expr,
        program: Program,
    },
    Logistic(LinearLogistic),
}

/// A model over `n` features. Immutable after construction and safe to share across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    n: usize,
    repr: Repr,
}

/// JSON model file: `{"n": 4, "kind": "expression", "expression": "..."}` or
/// `{"n": 2, "kind": "logistic", "scale": 1, "coeffs": [..], "intercept": 0}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModelConfig {
    Expression {
        n: usize,
        expression: String,
    },
    Logistic {
        n: usize,
        scale: f64,
        coeffs: Vec<f64>,
        intercept: f64,
    },
}

impl ModelSpec {
    pub fn parse_expression(text: &str, n: usize) -> Result<Self> {
        let expr = parse(text, n)?;
        Ok(Self::from_expr(expr, text.to_owned(), n))
    }

    fn from_expr(expr: Expr, source: String, n: usize) -> Self {
        let program = Program::compile(&expr);
        ModelSpec {
            n,
            repr: Repr::Expression {
                source,
                expr,
                program,
            },
        }
    }

    pub fn logistic(scale: f64, coeffs: Vec<f64>, intercept: f64) -> Result<Self> {
        if !scale.is_finite() || !intercept.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::data("logistic model parameters must be finite"));
        }
        Ok(ModelSpec {
            n: coeffs.len(),
            repr: Repr::Logistic(LinearLogistic {
                scale,
                coeffs,
                intercept,
            }),
        })
    }

    pub fn from_config(config: &ModelConfig) -> Result<Self> {
        match config {
            ModelConfig::Expression { n, expression } => Self::parse_expression(expression, *n),
            ModelConfig::Logistic {
                n,
                scale,
                coeffs,
                intercept,
            } => {
                if coeffs.len() != *n {
                    return Err(Error::data(format!(
                        "logistic model declares n = {n} but has {} coefficients",
                        coeffs.len()
                    )));
                }
                Self::logistic(*scale, coeffs.clone(), *intercept)
            }
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_config(&serde_json::from_str(text)?)
    }

    pub fn from_json_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_config(&self) -> ModelConfig {
        match &self.repr {
            Repr::Expression { source, .. } => ModelConfig::Expression {
                n: self.n,
                expression: source.clone(),
            },
            Repr::Logistic(l) => ModelConfig::Logistic {
                n: self.n,
                scale: l.scale,
                coeffs: l.coeffs.clone(),
                intercept: l.intercept,
            },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn expr(&self) -> Option<&Expr> {
        match &self.repr {
            Repr::Expression { expr, .. } => Some(expr),
            Repr::Logistic(_) => None,
        }
    }

    /// Evaluates without the finiteness check. Hot path of the estimators.
    #[inline]
    pub(crate) fn eval_raw(&self, x: &[f64]) -> f64 {
        match &self.repr {
            Repr::Expression { program, .. } => program.eval(x),
            Repr::Logistic(l) => l.eval(x),
        }
    }

    /// Evaluates the model at `x`. A non-finite result is a domain error.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::contract(format!(
                "point has {} coordinates, model expects {}",
                x.len(),
                self.n
            )));
        }
        let v = self.eval_raw(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("model evaluates to {v} at {x:?}")))
        }
    }

    /// Features the model can read. A feature outside this set is a null player.
    pub fn referenced_features(&self) -> Coalition {
        let mut bits = 0u64;
        match &self.repr {
            Repr::Expression { expr, .. } => expr.visit_vars(&mut |i| bits |= 1 << i),
            Repr::Logistic(l) => {
                for (i, c) in l.coeffs.iter().enumerate() {
                    if *c != 0.0 {
                        bits |= 1 << i;
                    }
                }
            }
        }
        Coalition::from_bits_unchecked(bits, self.n)
    }

    /// The same model on reordered inputs: new feature `c` is old feature `perm[c]`.
    pub fn permute_features(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n)?;
        let mut inverse = vec![0; self.n];
        for (new, &old) in perm.iter().enumerate() {
            inverse[old] = new;
        }
        match &self.repr {
            Repr::Expression { expr, .. } => {
                let renamed = expr.rename_vars(&inverse);
                let source = renamed.to_string();
                Ok(Self::from_expr(renamed, source, self.n))
            }
            Repr::Logistic(l) => Self::logistic(
                l.scale,
                perm.iter().map(|&c| l.coeffs[c]).collect(),
                l.intercept,
            ),
        }
    }

    /// Human-readable form.
    pub fn describe(&self) -> String {
        match &self.repr {
            Repr::Expression { source, .. } => source.clone(),
            Repr::Logistic(l) => format!(
                "{} / (1 + exp(-({:?} . x + {})))",
                l.scale, l.coeffs, l.intercept
            ),
        }
    }
}
