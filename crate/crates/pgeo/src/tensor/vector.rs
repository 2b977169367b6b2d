use super::{Result, TensorError};
use crate::expr::{self, Expr};
use std::collections::BTreeMap;

/// A vector field `X = X^μ ∂_μ` with symbolic components.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    pub comps: Vec<Expr>,
}

impl VectorField {
    pub fn new(comps: Vec<Expr>) -> VectorField {
        VectorField { comps }
    }

    /// The coordinate field `∂_i` in an `n`-dimensional chart.
    pub fn coordinate(i: usize, n: usize) -> VectorField {
        let mut comps = vec![Expr::zero(); n];
        comps[i] = Expr::one();
        VectorField { comps }
    }

    /// Parses a combination of `d_<coord>` tokens, for example
    /// `-u*d_u + v*d_v + mu*y*d_y`.
    pub fn parse(text: &str, coords: &[String]) -> Result<VectorField> {
        let mut rest = expr::parse(text)?;
        let mut comps = Vec::with_capacity(coords.len());
        for c in coords {
            let tok = format!("d_{c}");
            match rest.linear_coefficient(&tok) {
                Some((coef, r)) => {
                    comps.push(coef);
                    rest = r;
                }
                None => {
                    return Err(TensorError::Shape(format!(
                        "`{text}` is not linear in {tok}"
                    )))
                }
            }
        }
        if !rest.is_zero() {
            return Err(TensorError::Shape(format!(
                "`{text}` has terms without a d_<coord> factor: {rest}"
            )));
        }
        for (c, e) in coords.iter().zip(&comps) {
            if e.free_symbols().iter().any(|s| s.starts_with("d_")) {
                return Err(TensorError::Shape(format!(
                    "component along d_{c} contains another d_ token"
                )));
            }
        }
        Ok(VectorField { comps })
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    /// `X(f) = X^μ ∂_μ f`.
    pub fn apply(&self, f: &Expr, coords: &[String]) -> Expr {
        self.comps
            .iter()
            .zip(coords)
            .filter(|(c, _)| !c.is_zero())
            .fold(Expr::zero(), |acc, (c, x)| acc.add(&c.mul(&f.diff(x))))
    }

    /// `[X, Y]^μ = X(Y^μ) − Y(X^μ)`.
    pub fn commutator(&self, other: &VectorField, coords: &[String]) -> VectorField {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(xm, ym)| self.apply(ym, coords).sub(&other.apply(xm, coords)))
            .collect();
        VectorField { comps }
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        VectorField {
            comps: self
                .comps
                .iter()
                .zip(&o.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Expr) -> VectorField {
        VectorField {
            comps: self.comps.iter().map(|a| a.mul(s)).collect(),
        }
    }

    pub fn subs(&self, map: &BTreeMap<String, Expr>) -> Result<VectorField> {
        let comps = self
            .comps
            .iter()
            .map(|c| c.subs(map))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(VectorField { comps })
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Expr::is_zero)
    }

    /// Prints in the `d_<coord>` syntax accepted by [`VectorField::parse`].
    pub fn display(&self, coords: &[String]) -> String {
        let mut out = String::new();
        for (c, x) in self.comps.iter().zip(coords) {
            if c.is_zero() {
                continue;
            }
            let s = if c.is_one() {
                format!("d_{x}")
            } else if c.num_terms() == 1 {
                format!("{c}*d_{x}")
            } else {
                format!("({c})*d_{x}")
            };
            if out.is_empty() {
                out = s;
            } else if let Some(stripped) = s.strip_prefix('-') {
                out = format!("{out} - {stripped}");
            } else {
                out = format!("{out} + {s}");
            }
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }
}
