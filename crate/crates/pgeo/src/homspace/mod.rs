//! Lie-algebraic models `𝔤 = 𝔥 ⊕ 𝔪` of homogeneous spaces.
//!
//! A [`LieAlgebraModel`] stores structure constants over a named basis, the
//! isotropy subalgebra, a complement and a bilinear form on the complement.
//! Vectors in `𝔤` are coefficient lists over the full basis; vectors in `𝔪`
//! are coefficient lists over the complement, in complement order.

use crate::expr::{self, Expr, ExprError, Q};
use crate::linalg::{self, LinalgError, SMatrix};
use crate::penrose::PenroseError;
use crate::tensor::{TensorError, Truth, T3};
use num::ToPrimitive;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

mod coset;
mod geodesic;
mod search;
mod structure;
#[cfg(test)]
mod tests;

pub use coset::{coset_metric, fundamental_field, CosetMetric};
pub use geodesic::{
    canonical_geodesic_test, geodesic_vector_test, geodesic_vector_test_with, CanonicalReport,
    GeodesicOutcome, GeodesicVectorResult,
};
pub use search::{
    find_null_geodesic_vectors, subalgebra_search, transitive_subalgebra, SearchHit, SearchOptions,
    SearchReport, SubalgebraCandidate,
};
pub use structure::{
    homogeneous_structure, isotropy_representation, isotropy_representation_quotient, null_frame,
    structure_contraction, structure_scaling, HomogeneousStructure, NullFrame,
};

#[derive(Debug, Error)]
pub enum HomError {
    #[error("{0}")]
    Shape(String),
    #[error("unknown basis element `{0}`")]
    UnknownName(String),
    #[error("[{a},{b}] and [{b},{a}] disagree in the {k} component")]
    Antisymmetry { a: String, b: String, k: String },
    #[error("Jacobi identity fails on ({}, {}, {}): {component} component is {value}", .triple.0, .triple.1, .triple.2)]
    Jacobi {
        triple: (String, String, String),
        component: String,
        value: Expr,
    },
    #[error("isotropy is not a subalgebra: [{a},{b}] has {component} component {value}")]
    NotSubalgebra {
        a: String,
        b: String,
        component: String,
        value: Expr,
    },
    #[error("bilinear form is not symmetric at ({0}, {1})")]
    FormNotSymmetric(String, String),
    #[error("bilinear form is degenerate on the complement (det = {0})")]
    DegenerateForm(Expr),
    #[error("ad({h}) is not skew for B on ({x}, {y}): value {value}")]
    NotInvariant {
        h: String,
        x: String,
        y: String,
        value: Expr,
    },
    #[error("split is not reductive: [{h},{x}] has {component} component {value}")]
    NotReductive {
        h: String,
        x: String,
        component: String,
        value: Expr,
    },
    #[error("{op} needs a reductive split: {reason}")]
    NonReductive { op: String, reason: String },
    #[error("`{0}` has zero 𝔪-part and is not a geodesic vector")]
    ZeroProjection(String),
    #[error("`{vector}` is not a geodesic vector (equation for Z = {witness} leaves {residual})")]
    NotGeodesic {
        vector: String,
        witness: String,
        residual: Expr,
    },
    #[error("undecided: {0}")]
    Undecided(String),
    #[error("ad({generator}) has no closed-form exponential: {reason}")]
    UnsupportedAdjoint { generator: String, reason: String },
    #[error("model has no coset data")]
    NoCoset,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Penrose(#[from] PenroseError),
}

pub type Result<T> = std::result::Result<T, HomError>;

/// Coset exponential data: `σ(x) = exp(x_1 b_1)⋯exp(x_N b_N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetData {
    /// Basis indices `b_1, …, b_N`, normally the complement.
    pub order: Vec<usize>,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraModel {
    pub name: String,
    pub basis: Vec<String>,
    /// `c[i][j][k]`: `[b_i, b_j] = Σ_k c[i][j][k] b_k`.
    pub c: T3,
    pub isotropy: Vec<usize>,
    pub complement: Vec<usize>,
    /// Bilinear form on the complement, in complement order.
    pub form: SMatrix,
    /// Whether validation should insist on `[𝔥, 𝔪] ⊆ 𝔪`.
    pub claims_reductive: bool,
    pub coset: Option<CosetData>,
    /// Numeric values for free parameters in the structure constants.
    pub values: BTreeMap<String, Q>,
}

pub(crate) fn zero_truth(e: &Expr) -> Truth {
    if e.is_zero() {
        Truth::Proved
    } else {
        expr::is_zero(e).into()
    }
}

impl LieAlgebraModel {
    /// Abelian model with zero form; the complement is every basis element
    /// not listed in `isotropy`, in basis order.
    pub fn new(name: &str, basis: &[&str], isotropy: &[&str]) -> Result<LieAlgebraModel> {
        let basis: Vec<String> = basis.iter().map(|s| s.to_string()).collect();
        for (i, b) in basis.iter().enumerate() {
            if basis[..i].contains(b) {
                return Err(HomError::Shape(format!("basis element `{b}` listed twice")));
            }
            expr::parse(b)
                .ok()
                .and_then(|e| e.as_symbol().map(|s| s == b))
                .filter(|ok| *ok)
                .ok_or_else(|| HomError::Shape(format!("`{b}` is not a valid basis name")))?;
        }
        let mut iso = Vec::new();
        for h in isotropy {
            let i = basis
                .iter()
                .position(|b| b == h)
                .ok_or_else(|| HomError::UnknownName(h.to_string()))?;
            if iso.contains(&i) {
                return Err(HomError::Shape(format!(
                    "isotropy element `{h}` listed twice"
                )));
            }
            iso.push(i);
        }
        iso.sort_unstable();
        let n = basis.len();
        let complement: Vec<usize> = (0..n).filter(|i| !iso.contains(i)).collect();
        let k = complement.len();
        Ok(LieAlgebraModel {
            name: name.to_string(),
            basis,
            c: vec![vec![vec![Expr::zero(); n]; n]; n],
            isotropy: iso,
            complement,
            form: linalg::zeros(k, k),
            claims_reductive: true,
            coset: None,
            values: BTreeMap::new(),
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn m_dim(&self) -> usize {
        self.complement.len()
    }

    pub fn index(&self, name: &str) -> Result<usize> {
        self.basis
            .iter()
            .position(|b| b == name)
            .ok_or_else(|| HomError::UnknownName(name.to_string()))
    }

    /// Position of basis element `i` within the complement.
    pub fn m_index(&self, i: usize) -> Option<usize> {
        self.complement.iter().position(|&j| j == i)
    }

    pub fn m_names(&self) -> Vec<String> {
        self.complement
            .iter()
            .map(|&i| self.basis[i].clone())
            .collect()
    }

    /// Sets `[a, b]` (and `[b, a]`) from a combination of basis names.
    pub fn set_bracket(&mut self, a: &str, b: &str, value: &str) -> Result<()> {
        let v = self.parse_vector(value)?;
        self.set_bracket_vec(self.index(a)?, self.index(b)?, v)
    }

    pub fn set_bracket_vec(&mut self, i: usize, j: usize, v: Vec<Expr>) -> Result<()> {
        if v.len() != self.dim() {
            return Err(HomError::Shape("bracket value has the wrong length".into()));
        }
        if i == j && v.iter().any(|x| !x.is_zero()) {
            return Err(HomError::Antisymmetry {
                a: self.basis[i].clone(),
                b: self.basis[i].clone(),
                k: "every".into(),
            });
        }
        self.c[j][i] = v.iter().map(Expr::neg).collect();
        self.c[i][j] = v;
        Ok(())
    }

    /// Sets `B(a, b) = B(b, a)`; both names must lie in the complement.
    pub fn set_form(&mut self, a: &str, b: &str, value: Expr) -> Result<()> {
        let (i, j) = (self.index(a)?, self.index(b)?);
        let (Some(p), Some(q)) = (self.m_index(i), self.m_index(j)) else {
            return Err(HomError::Shape(format!(
                "B({a},{b}) names an isotropy element"
            )));
        };
        self.form[p][q] = value.clone();
        self.form[q][p] = value;
        Ok(())
    }

    /// Convenience for diagonal forms in complement order.
    pub fn set_form_diagonal(&mut self, diag: &[i64]) -> Result<()> {
        if diag.len() != self.m_dim() {
            return Err(HomError::Shape("diagonal has the wrong length".into()));
        }
        for (p, d) in diag.iter().enumerate() {
            self.form[p][p] = Expr::int(*d);
        }
        Ok(())
    }

    pub fn with_coset(mut self, order: &[&str], coords: &[&str]) -> Result<LieAlgebraModel> {
        if order.len() != coords.len() {
            return Err(HomError::Shape(
                "coset order and coordinates differ in length".into(),
            ));
        }
        let order = order
            .iter()
            .map(|o| self.index(o))
            .collect::<Result<Vec<_>>>()?;
        self.coset = Some(CosetData {
            order,
            coords: coords.iter().map(|s| s.to_string()).collect(),
        });
        Ok(self)
    }

    pub fn with_values(mut self, values: BTreeMap<String, Q>) -> LieAlgebraModel {
        self.values = values;
        self
    }

    pub fn e(&self, i: usize) -> Vec<Expr> {
        let mut v = vec![Expr::zero(); self.dim()];
        v[i] = Expr::one();
        v
    }

    pub fn bracket(&self, x: &[Expr], y: &[Expr]) -> Vec<Expr> {
        let n = self.dim();
        let mut out = vec![Expr::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let f = xi.mul(yj);
                for (k, c) in self.c[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] = out[k].add(&f.mul(c));
                    }
                }
            }
        }
        out
    }

    pub fn m_part(&self, x: &[Expr]) -> Vec<Expr> {
        self.complement.iter().map(|&i| x[i].clone()).collect()
    }

    pub fn h_part(&self, x: &[Expr]) -> Vec<Expr> {
        self.isotropy.iter().map(|&i| x[i].clone()).collect()
    }

    pub fn embed_m(&self, xm: &[Expr]) -> Vec<Expr> {
        let mut v = vec![Expr::zero(); self.dim()];
        for (p, &i) in self.complement.iter().enumerate() {
            v[i] = xm[p].clone();
        }
        v
    }

    /// `B(x, y)` for complement vectors.
    pub fn b(&self, xm: &[Expr], ym: &[Expr]) -> Expr {
        bilinear(&self.form, xm, ym)
    }

    /// `[x, y]_𝔪` for complement vectors.
    pub fn bracket_m(&self, xm: &[Expr], ym: &[Expr]) -> Vec<Expr> {
        self.m_part(&self.bracket(&self.embed_m(xm), &self.embed_m(ym)))
    }

    /// Matrix of `ad(b_i)` on `𝔤`: column `j` holds `[b_i, b_j]`.
    pub fn ad_matrix(&self, i: usize) -> SMatrix {
        let n = self.dim();
        (0..n)
            .map(|k| (0..n).map(|j| self.c[i][j][k].clone()).collect())
            .collect()
    }

    /// Reads a linear combination of basis names such as
    /// `u2 + (1/sqrt(2))*u3 + sqrt(2)*e1`.
    pub fn parse_vector(&self, text: &str) -> Result<Vec<Expr>> {
        let mut rest = expr::parse(text)?;
        let mut out = Vec::with_capacity(self.dim());
        for b in &self.basis {
            let (coef, r) = rest
                .linear_coefficient(b)
                .ok_or_else(|| HomError::Shape(format!("`{text}` is not linear in {b}")))?;
            out.push(coef);
            rest = r;
        }
        if !rest.is_zero() {
            return Err(HomError::Shape(format!(
                "`{text}` has a part without a basis element: {rest}"
            )));
        }
        for coef in &out {
            if let Some(b) = self.basis.iter().find(|b| coef.depends_on(b)) {
                return Err(HomError::Shape(format!("`{text}` is not linear in {b}")));
            }
        }
        Ok(out)
    }

    pub fn display_vector(&self, x: &[Expr]) -> String {
        display_combination(x, &self.basis)
    }

    pub fn display_m(&self, xm: &[Expr]) -> String {
        display_combination(xm, &self.m_names())
    }

    /// Checks `[𝔥, 𝔪] ⊆ 𝔪`; on failure returns the first offending pair.
    pub fn reductivity(&self) -> (Truth, Option<HomError>) {
        let mut acc = Truth::Proved;
        for &h in &self.isotropy {
            for &x in &self.complement {
                for &k in &self.isotropy {
                    let v = &self.c[h][x][k];
                    let t = zero_truth(v);
                    if t == Truth::False {
                        let err = HomError::NotReductive {
                            h: self.basis[h].clone(),
                            x: self.basis[x].clone(),
                            component: self.basis[k].clone(),
                            value: v.clone(),
                        };
                        return (Truth::False, Some(err));
                    }
                    acc = acc.and(t);
                }
            }
        }
        (acc, None)
    }

    pub(crate) fn require_reductive(&self, op: &str) -> Result<()> {
        match self.reductivity() {
            (t, _) if t.holds() => Ok(()),
            (_, Some(e)) => Err(HomError::NonReductive {
                op: op.into(),
                reason: e.to_string(),
            }),
            (t, None) => Err(HomError::NonReductive {
                op: op.into(),
                reason: format!("reductivity is {t}"),
            }),
        }
    }

    pub(crate) fn numeric_constants(&self) -> BTreeMap<String, f64> {
        self.values
            .iter()
            .map(|(k, v)| (k.clone(), v.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }
}

impl fmt::Display for LieAlgebraModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        for i in 0..n {
            for j in i + 1..n {
                if self.c[i][j].iter().any(|x| !x.is_zero()) {
                    writeln!(
                        f,
                        "[{},{}] = {}",
                        self.basis[i],
                        self.basis[j],
                        self.display_vector(&self.c[i][j])
                    )?;
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn bilinear(form: &SMatrix, x: &[Expr], y: &[Expr]) -> Expr {
    let mut acc = Expr::zero();
    for (p, xp) in x.iter().enumerate() {
        if xp.is_zero() {
            continue;
        }
        for (q, yq) in y.iter().enumerate() {
            if yq.is_zero() || form[p][q].is_zero() {
                continue;
            }
            acc = acc.add(&xp.mul(yq).mul(&form[p][q]));
        }
    }
    acc
}

pub(crate) fn display_combination(x: &[Expr], names: &[String]) -> String {
    let mut out = String::new();
    for (c, name) in x.iter().zip(names) {
        if c.is_zero() {
            continue;
        }
        let term = if c.is_one() {
            name.clone()
        } else if c.neg().is_one() {
            format!("-{name}")
        } else if c.num_terms() == 1 {
            format!("{c}*{name}")
        } else {
            format!("({c})*{name}")
        };
        if out.is_empty() {
            out = term;
        } else if let Some(t) = term.strip_prefix('-') {
            out = format!("{out} - {t}");
        } else {
            out = format!("{out} + {term}");
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// Outcome of [`validate_algebra`] once every identity has passed.
#[derive(Clone, Debug)]
pub struct AlgebraReport {
    pub dim: usize,
    pub isotropy_dim: usize,
    pub is_reductive: Truth,
    /// `[𝔪, 𝔪] ⊆ 𝔥`.
    pub is_symmetric: Truth,
    /// Weakest verdict among the identities that were checked.
    pub confidence: Truth,
}

fn check(t: Truth, what: impl FnOnce() -> String, err: impl FnOnce() -> HomError) -> Result<Truth> {
    match t {
        Truth::False => Err(err()),
        Truth::Undecided => Err(HomError::Undecided(what())),
        t => Ok(t),
    }
}

/// Checks antisymmetry, Jacobi, the isotropy subalgebra, the form and its
/// isotropy invariance, plus reductivity when the model claims it.
pub fn validate_algebra(m: &LieAlgebraModel) -> Result<AlgebraReport> {
    let n = m.dim();
    if m.c.len() != n
        || m.c
            .iter()
            .any(|r| r.len() != n || r.iter().any(|v| v.len() != n))
    {
        return Err(HomError::Shape("structure constants must be n×n×n".into()));
    }
    let k = m.m_dim();
    if m.form.len() != k || m.form.iter().any(|r| r.len() != k) {
        return Err(HomError::Shape(format!("bilinear form must be {k}×{k}")));
    }
    let mut seen = vec![false; n];
    for &i in m.isotropy.iter().chain(&m.complement) {
        if i >= n || seen[i] {
            return Err(HomError::Shape(
                "isotropy and complement must partition the basis".into(),
            ));
        }
        seen[i] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(HomError::Shape(
            "isotropy and complement must partition the basis".into(),
        ));
    }
    let name = |i: usize| m.basis[i].clone();
    let mut conf = Truth::Proved;

    for i in 0..n {
        for j in i..n {
            for l in 0..n {
                let s = m.c[i][j][l].add(&m.c[j][i][l]);
                conf = conf.and(check(
                    zero_truth(&s),
                    || format!("antisymmetry of [{},{}]", name(i), name(j)),
                    || HomError::Antisymmetry {
                        a: name(i),
                        b: name(j),
                        k: name(l),
                    },
                )?);
            }
        }
    }

    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let (ei, ej, el) = (m.e(i), m.e(j), m.e(l));
                let a = m.bracket(&ei, &m.bracket(&ej, &el));
                let b = m.bracket(&ej, &m.bracket(&el, &ei));
                let c = m.bracket(&el, &m.bracket(&ei, &ej));
                for p in 0..n {
                    let s = a[p].add(&b[p]).add(&c[p]);
                    conf = conf.and(check(
                        zero_truth(&s),
                        || format!("Jacobi on ({}, {}, {})", name(i), name(j), name(l)),
                        || HomError::Jacobi {
                            triple: (name(i), name(j), name(l)),
                            component: name(p),
                            value: s.clone(),
                        },
                    )?);
                }
            }
        }
    }

    for &a in &m.isotropy {
        for &b in &m.isotropy {
            for &p in &m.complement {
                let v = &m.c[a][b][p];
                conf = conf.and(check(
                    zero_truth(v),
                    || format!("[{},{}] lies in the isotropy", name(a), name(b)),
                    || HomError::NotSubalgebra {
                        a: name(a),
                        b: name(b),
                        component: name(p),
                        value: v.clone(),
                    },
                )?);
            }
        }
    }

    for p in 0..k {
        for q in p + 1..k {
            let d = m.form[p][q].sub(&m.form[q][p]);
            conf = conf.and(check(
                zero_truth(&d),
                || "symmetry of B".into(),
                || HomError::FormNotSymmetric(name(m.complement[p]), name(m.complement[q])),
            )?);
        }
    }
    if k > linalg::MAX_SYMBOLIC_DIM {
        return Err(HomError::Linalg(LinalgError::TooLarge(k)));
    }
    let det = linalg::det(&m.form);
    if k > 0 {
        match zero_truth(&det) {
            Truth::False => {}
            Truth::Undecided => return Err(HomError::Undecided("nondegeneracy of B".into())),
            _ => return Err(HomError::DegenerateForm(det)),
        }
    }

    let (is_reductive, witness) = m.reductivity();
    if m.claims_reductive {
        if let Some(e) = witness {
            return Err(e);
        }
        if is_reductive == Truth::Undecided {
            return Err(HomError::Undecided("reductivity".into()));
        }
    }

    // skewness of the isotropy action on 𝔤/𝔥 ≅ 𝔪
    for &h in &m.isotropy {
        let eh = m.e(h);
        let act: Vec<Vec<Expr>> = m
            .complement
            .iter()
            .map(|&x| m.m_part(&m.bracket(&eh, &m.e(x))))
            .collect();
        for p in 0..k {
            for q in p..k {
                let ep = unit(k, p);
                let eq = unit(k, q);
                let v = m.b(&act[p], &eq).add(&m.b(&ep, &act[q]));
                conf = conf.and(check(
                    zero_truth(&v),
                    || format!("invariance of B under ad({})", name(h)),
                    || HomError::NotInvariant {
                        h: name(h),
                        x: name(m.complement[p]),
                        y: name(m.complement[q]),
                        value: v.clone(),
                    },
                )?);
            }
        }
    }

    let mut is_symmetric = Truth::Proved;
    for &a in &m.complement {
        for &b in &m.complement {
            for &p in &m.complement {
                is_symmetric = is_symmetric.and(zero_truth(&m.c[a][b][p]));
                if is_symmetric == Truth::False {
                    break;
                }
            }
        }
    }

    Ok(AlgebraReport {
        dim: n,
        isotropy_dim: m.isotropy.len(),
        is_reductive,
        is_symmetric,
        confidence: conf,
    })
}

pub(crate) fn unit(k: usize, p: usize) -> Vec<Expr> {
    let mut v = vec![Expr::zero(); k];
    v[p] = Expr::one();
    v
}
