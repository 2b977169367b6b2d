//! Coordinate tensor calculus on a [`MetricModel`].
//!
//! Index conventions:
//!
//! * `Γ^λ_{μν} = ½ g^{λκ}(∂_μ g_{κν} + ∂_ν g_{κμ} − ∂_κ g_{μν})`
//! * `R^ρ_{σμν} = ∂_μ Γ^ρ_{νσ} − ∂_ν Γ^ρ_{μσ} + Γ^ρ_{μλ} Γ^λ_{νσ} − Γ^ρ_{νλ} Γ^λ_{μσ}`
//! * `R_{σν} = R^ρ_{σρν}`
//!
//! With these, anti-de Sitter space is Einstein with a negative constant.

mod numeric;
mod vector;

pub use numeric::{
    convergence_ratio, geodesic, homogeneous_geodesic_test_transport, killing_initial_state,
    killing_transport, transport_batch, Feasibility, GeodesicSpec, HomogeneityVerdict,
    NumericGeometry, Trajectory, TransportRun, TransportState, FEASIBLE_BELOW, HOMOGENEITY_SAMPLES,
    INFEASIBLE_ABOVE,
};
pub use vector::VectorField;

use crate::expr::{self, Equality, Expr, ExprError, Q};
use crate::linalg::{self, LinalgError, SMatrix};
use num::ToPrimitive;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

pub type T3 = Vec<Vec<Vec<Expr>>>;
pub type T4 = Vec<Vec<Vec<Vec<Expr>>>>;
pub type T5 = Vec<Vec<Vec<Vec<Vec<Expr>>>>>;

/// Components larger than this many nodes are not probed numerically and
/// count as undecided.
pub const DEFAULT_NODE_BUDGET: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("metric is not symmetric: g({0},{1}) != g({1},{0})")]
    NotSymmetric(String, String),
    #[error("metric is degenerate at the sample point (|det| = {0:e})")]
    Degenerate(f64),
    #[error("signature at the sample point is {0}, expected lorentzian")]
    Signature(String),
    #[error("symbolic inversion failed: {0}")]
    Inversion(#[from] LinalgError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("integration left the domain at t = {t}: {what}")]
    NonFinite { t: f64, what: String },
    #[error("{0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, TensorError>;

/// Three-valued outcome of a symbolic check, with the probabilistic case
/// kept apart from the proved one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Truth {
    Proved,
    Probably,
    False,
    Undecided,
}

impl Truth {
    pub fn holds(self) -> bool {
        matches!(self, Truth::Proved | Truth::Probably)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Truth::Proved => "proved",
            Truth::Probably => "probably",
            Truth::False => "false",
            Truth::Undecided => "undecided",
        }
    }

    pub fn and(self, o: Truth) -> Truth {
        use Truth::*;
        match (self, o) {
            (False, _) | (_, False) => False,
            (Undecided, _) | (_, Undecided) => Undecided,
            (Probably, _) | (_, Probably) => Probably,
            _ => Proved,
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl From<Equality> for Truth {
    fn from(e: Equality) -> Truth {
        match e {
            Equality::Proved => Truth::Proved,
            Equality::Probably => Truth::Probably,
            Equality::NotEqual => Truth::False,
            Equality::Undecided => Truth::Undecided,
        }
    }
}

/// Decides whether every expression vanishes.
pub fn all_zero<'a>(items: impl IntoIterator<Item = &'a Expr>, budget: usize) -> Truth {
    let mut acc = Truth::Proved;
    for e in items {
        if e.is_zero() {
            continue;
        }
        if e.node_count() > budget {
            acc = acc.and(Truth::Undecided);
            continue;
        }
        match expr::is_zero(e).into() {
            Truth::False => return Truth::False,
            t => acc = acc.and(t),
        }
    }
    acc
}

/// A coordinate chart with symmetric metric components.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricModel {
    pub coords: Vec<String>,
    pub g: SMatrix,
    /// Values for the parameters, used by numeric operations.
    pub values: BTreeMap<String, Q>,
    pub sample: Option<Vec<Q>>,
    pub lorentzian: bool,
}

impl MetricModel {
    pub fn new(coords: Vec<String>, g: SMatrix) -> Result<MetricModel> {
        let n = coords.len();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(TensorError::Shape(format!(
                "expected a {n}x{n} component matrix"
            )));
        }
        if n > linalg::MAX_SYMBOLIC_DIM {
            return Err(LinalgError::TooLarge(n).into());
        }
        let uniq: BTreeSet<&String> = coords.iter().collect();
        if uniq.len() != n {
            return Err(TensorError::Shape("repeated coordinate name".into()));
        }
        for i in 0..n {
            for j in i + 1..n {
                if !expr::equal(&g[i][j], &g[j][i]).holds() {
                    return Err(TensorError::NotSymmetric(
                        coords[i].clone(),
                        coords[j].clone(),
                    ));
                }
            }
        }
        Ok(MetricModel {
            coords,
            g,
            values: BTreeMap::new(),
            sample: None,
            lorentzian: false,
        })
    }

    /// Builds a metric from a line element such as
    /// `2*du*dv + u*dv^2 + sqrt(u)*(dx1^2 + dx2^2)`, where `d<coord>` are the
    /// coordinate differentials. A cross term `c*du*dv` gives `g_uv = c/2`.
    pub fn from_line_element(coords: Vec<String>, text: &str) -> Result<MetricModel> {
        let diffs: Vec<String> = coords.iter().map(|c| format!("d{c}")).collect();
        if let Some(d) = diffs.iter().find(|d| coords.contains(d)) {
            return Err(TensorError::Shape(format!(
                "differential {d} collides with a coordinate"
            )));
        }
        let e = expr::parse(text)?;
        let n = coords.len();
        let mut g = linalg::zeros(n, n);
        let mut rebuilt = Expr::zero();
        for i in 0..n {
            let di = e.diff(&diffs[i]);
            for j in i..n {
                let dij = di.diff(&diffs[j]);
                let val = dij.scale(&Q::new(1.into(), 2.into()));
                if val.free_symbols().iter().any(|s| diffs.contains(s)) {
                    return Err(TensorError::Shape(
                        "line element is not quadratic in the differentials".into(),
                    ));
                }
                let term = Expr::sym(&diffs[i]).mul(&Expr::sym(&diffs[j]));
                rebuilt = if i == j {
                    rebuilt.add(&term.mul(&val))
                } else {
                    rebuilt.add(&term.mul(&val).scale(&Q::from_integer(2.into())))
                };
                g[i][j] = val.clone();
                g[j][i] = val;
            }
        }
        if !expr::equal(&rebuilt, &e).holds() {
            return Err(TensorError::Shape(
                "line element is not quadratic in the differentials".into(),
            ));
        }
        MetricModel::new(coords, g)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn with_values(mut self, values: BTreeMap<String, Q>) -> MetricModel {
        self.values = values;
        self
    }

    pub fn with_sample(mut self, sample: Vec<Q>) -> MetricModel {
        self.sample = Some(sample);
        self
    }

    pub fn lorentzian(mut self) -> MetricModel {
        self.lorentzian = true;
        self
    }

    pub fn coord_index(&self, name: &str) -> Option<usize> {
        self.coords.iter().position(|c| c == name)
    }

    /// Free symbols of the components that are not coordinates.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for row in &self.g {
            for e in row {
                out.extend(e.free_symbols());
            }
        }
        out.retain(|s| !self.coords.contains(s));
        out
    }

    pub fn numeric_consts(&self) -> BTreeMap<String, f64> {
        self.values
            .iter()
            .map(|(k, v)| (k.clone(), v.to_f64().unwrap_or(f64::NAN)))
            .collect()
    }

    /// Checks nondegeneracy and, when declared, lorentzian signature at the
    /// sample point.
    pub fn check_sample(&self) -> Result<()> {
        let Some(sample) = &self.sample else {
            return Ok(());
        };
        if sample.len() != self.dim() {
            return Err(TensorError::Shape(
                "sample point has the wrong length".into(),
            ));
        }
        let x: Vec<f64> = sample
            .iter()
            .map(|q| q.to_f64().unwrap_or(f64::NAN))
            .collect();
        let gm = self.numeric_metric_at(&x)?;
        let det = gm.determinant();
        if !det.is_finite() || det.abs() <= 1e-12 {
            return Err(TensorError::Degenerate(det.abs()));
        }
        if self.lorentzian {
            let eig = gm.symmetric_eigen().eigenvalues;
            let neg = eig.iter().filter(|&&l| l < 0.0).count();
            if neg != 1 {
                return Err(TensorError::Signature(format!(
                    "({neg}, {})",
                    self.dim() - neg
                )));
            }
        }
        Ok(())
    }

    pub fn numeric_metric_at(&self, x: &[f64]) -> Result<nalgebra::DMatrix<f64>> {
        let consts = self.numeric_consts();
        let n = self.dim();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = expr::Compiled::new(&self.g[i][j], &self.coords, &consts)?.eval(x);
            }
        }
        Ok(m)
    }

    pub fn inverse(&self) -> Result<SMatrix> {
        Ok(linalg::inverse(&self.g)?)
    }

    /// Substitutes parameters (or coordinates) in every component.
    pub fn subs(&self, map: &BTreeMap<String, Expr>) -> Result<MetricModel> {
        let g = self
            .g
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.subs(map))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(MetricModel { g, ..self.clone() })
    }

    /// Pulls the metric back along `old_coord = map[old_coord](new_coords)`.
    /// Coordinates missing from `map` are carried over unchanged.
    pub fn pullback(
        &self,
        new_coords: Vec<String>,
        map: &BTreeMap<String, Expr>,
    ) -> Result<MetricModel> {
        let n = self.dim();
        let m = new_coords.len();
        let full: BTreeMap<String, Expr> = self
            .coords
            .iter()
            .map(|c| {
                (
                    c.clone(),
                    map.get(c).cloned().unwrap_or_else(|| Expr::sym(c)),
                )
            })
            .collect();
        let jac: Vec<Vec<Expr>> = self
            .coords
            .iter()
            .map(|c| new_coords.iter().map(|y| full[c].diff(y)).collect())
            .collect();
        let gs: SMatrix = self
            .g
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| e.subs(&full))
                    .collect::<std::result::Result<Vec<_>, _>>()
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let mut out = linalg::zeros(m, m);
        for a in 0..m {
            for b in a..m {
                let mut acc = Expr::zero();
                for mu in 0..n {
                    if jac[mu][a].is_zero() {
                        continue;
                    }
                    for nu in 0..n {
                        if jac[nu][b].is_zero() || gs[mu][nu].is_zero() {
                            continue;
                        }
                        acc = acc.add(&jac[mu][a].mul(&jac[nu][b]).mul(&gs[mu][nu]));
                    }
                }
                out[a][b] = acc.clone();
                out[b][a] = acc;
            }
        }
        let mut model = MetricModel::new(new_coords, out)?;
        model.values = self.values.clone();
        model.lorentzian = self.lorentzian;
        Ok(model)
    }

    /// Line element with grouped equal diagonal coefficients, e.g.
    /// `2*du*dv + sqrt(u)*(dx1^2 + dx2^2)`.
    pub fn line_element(&self) -> String {
        let n = self.dim();
        let d = |i: usize| format!("d{}", self.coords[i]);
        let mut diag_groups: Vec<(Expr, Vec<usize>)> = Vec::new();
        for i in 0..n {
            let c = &self.g[i][i];
            if c.is_zero() {
                continue;
            }
            match diag_groups.iter_mut().find(|(e, _)| e == c) {
                Some((_, v)) => v.push(i),
                None => diag_groups.push((c.clone(), vec![i])),
            }
        }
        let mut pieces: Vec<(Expr, String)> = Vec::new();
        for i in 0..n {
            if let Some((c, idx)) = diag_groups.iter().find(|(_, v)| v[0] == i) {
                let monos: Vec<String> = idx.iter().map(|&k| format!("{}^2", d(k))).collect();
                if monos.len() == 1 || c.is_one() {
                    for m in monos {
                        pieces.push((c.clone(), m));
                    }
                } else {
                    pieces.push((c.clone(), format!("({})", monos.join(" + "))));
                }
            }
            for j in i + 1..n {
                let c = self.g[i][j].scale(&Q::from_integer(2.into()));
                if !c.is_zero() {
                    pieces.push((c, format!("{}*{}", d(i), d(j))));
                }
            }
        }
        if pieces.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (k, (c, m)) in pieces.iter().enumerate() {
            let (neg, body) = format_coefficient(c);
            let term = match body {
                None => m.clone(),
                Some(b) => format!("{b}*{m}"),
            };
            if k == 0 {
                out.push_str(if neg { "-" } else { "" });
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&term);
        }
        out
    }
}

/// Sign and printed magnitude of a coefficient; `None` for unit magnitude.
fn format_coefficient(c: &Expr) -> (bool, Option<String>) {
    if c.num_terms() == 1 {
        let neg = c.constant_term() < Q::from_integer(0.into()) || c.to_string().starts_with('-');
        let mag = if neg { c.neg() } else { c.clone() };
        if mag.is_one() {
            return (neg, None);
        }
        let s = mag.to_string();
        if s.contains('/') && !mag.is_constant() {
            return (neg, Some(format!("({s})")));
        }
        return (neg, Some(s));
    }
    (false, Some(format!("({c})")))
}

impl fmt::Display for MetricModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line_element())
    }
}

/// Christoffel symbols `Γ^λ_{μν}` as `gamma[λ][μ][ν]`.
pub fn christoffel(m: &MetricModel) -> Result<T3> {
    let n = m.dim();
    let ginv = m.inverse()?;
    let dg: Vec<SMatrix> = (0..n)
        .map(|k| {
            m.g.iter()
                .map(|r| r.iter().map(|e| e.diff(&m.coords[k])).collect())
                .collect()
        })
        .collect();
    let mut gamma = vec![vec![vec![Expr::zero(); n]; n]; n];
    let half = Q::new(1.into(), 2.into());
    for mu in 0..n {
        for nu in mu..n {
            // lowered symbol Γ_{κμν}
            let low: Vec<Expr> = (0..n)
                .map(|k| {
                    dg[mu][k][nu]
                        .add(&dg[nu][k][mu])
                        .sub(&dg[k][mu][nu])
                        .scale(&half)
                })
                .collect();
            for l in 0..n {
                let mut acc = Expr::zero();
                for k in 0..n {
                    if !ginv[l][k].is_zero() && !low[k].is_zero() {
                        acc = acc.add(&ginv[l][k].mul(&low[k]));
                    }
                }
                gamma[l][mu][nu] = acc.clone();
                gamma[l][nu][mu] = acc;
            }
        }
    }
    Ok(gamma)
}

/// `R^ρ_{σμν}` as `r[ρ][σ][μ][ν]`.
pub fn riemann(coords: &[String], gamma: &T3) -> T4 {
    let n = coords.len();
    let mut r = vec![vec![vec![vec![Expr::zero(); n]; n]; n]; n];
    for rho in 0..n {
        for sigma in 0..n {
            for mu in 0..n {
                for nu in mu + 1..n {
                    let mut acc = gamma[rho][nu][sigma]
                        .diff(&coords[mu])
                        .sub(&gamma[rho][mu][sigma].diff(&coords[nu]));
                    for l in 0..n {
                        if !gamma[rho][mu][l].is_zero() && !gamma[l][nu][sigma].is_zero() {
                            acc = acc.add(&gamma[rho][mu][l].mul(&gamma[l][nu][sigma]));
                        }
                        if !gamma[rho][nu][l].is_zero() && !gamma[l][mu][sigma].is_zero() {
                            acc = acc.sub(&gamma[rho][nu][l].mul(&gamma[l][mu][sigma]));
                        }
                    }
                    r[rho][sigma][nu][mu] = acc.neg();
                    r[rho][sigma][mu][nu] = acc;
                }
            }
        }
    }
    r
}

/// `∇_e R^a_{bcd}` as `nr[a][b][c][d][e]`.
pub fn covariant_riemann(coords: &[String], gamma: &T3, r: &T4) -> T5 {
    let n = coords.len();
    let mut out = vec![vec![vec![vec![vec![Expr::zero(); n]; n]; n]; n]; n];
    let prod = |a: &Expr, b: &Expr| {
        if a.is_zero() || b.is_zero() {
            None
        } else {
            Some(a.mul(b))
        }
    };
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in c + 1..n {
                    for e in 0..n {
                        let mut acc = r[a][b][c][d].diff(&coords[e]);
                        for k in 0..n {
                            if let Some(t) = prod(&gamma[a][e][k], &r[k][b][c][d]) {
                                acc = acc.add(&t);
                            }
                            if let Some(t) = prod(&gamma[k][e][b], &r[a][k][c][d]) {
                                acc = acc.sub(&t);
                            }
                            if let Some(t) = prod(&gamma[k][e][c], &r[a][b][k][d]) {
                                acc = acc.sub(&t);
                            }
                            if let Some(t) = prod(&gamma[k][e][d], &r[a][b][c][k]) {
                                acc = acc.sub(&t);
                            }
                        }
                        out[a][b][d][c][e] = acc.neg();
                        out[a][b][c][d][e] = acc;
                    }
                }
            }
        }
    }
    out
}

/// Options for [`curvature_with`].
#[derive(Clone, Debug)]
pub struct CurvatureOptions {
    pub node_budget: usize,
    /// Whether to build `∇R` and decide local symmetry.
    pub covariant: bool,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        CurvatureOptions {
            node_budget: DEFAULT_NODE_BUDGET,
            covariant: true,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CurvatureFlags {
    pub is_flat: Truth,
    pub is_ricci_flat: Truth,
    pub is_einstein: Truth,
    pub is_conformally_flat: Truth,
    pub is_locally_symmetric: Truth,
}

#[derive(Clone, Debug)]
pub struct CurvaturePack {
    pub coords: Vec<String>,
    pub christoffel: T3,
    pub riemann: T4,
    pub ricci: SMatrix,
    pub scalar: Expr,
    /// Fully lowered Weyl tensor `C_{abcd}`; empty below dimension 4.
    pub weyl: T4,
    /// `∇_e R^a_{bcd}` when requested.
    pub nabla_riemann: Option<T5>,
    /// `λ` with `Ric = λ g` when the metric is Einstein.
    pub einstein_constant: Option<Expr>,
    pub flags: CurvatureFlags,
}

pub fn curvature(m: &MetricModel) -> Result<CurvaturePack> {
    curvature_with(m, &CurvatureOptions::default())
}

pub fn curvature_with(m: &MetricModel, opts: &CurvatureOptions) -> Result<CurvaturePack> {
    let n = m.dim();
    let budget = opts.node_budget;
    let gamma = christoffel(m)?;
    let r = riemann(&m.coords, &gamma);
    let ginv = m.inverse()?;
    let mut ricci = linalg::zeros(n, n);
    for s in 0..n {
        for nu in s..n {
            let mut acc = Expr::zero();
            for rho in 0..n {
                acc = acc.add(&r[rho][s][rho][nu]);
            }
            ricci[s][nu] = acc.clone();
            ricci[nu][s] = acc;
        }
    }
    let mut scalar = Expr::zero();
    for a in 0..n {
        for b in 0..n {
            if !ginv[a][b].is_zero() && !ricci[a][b].is_zero() {
                scalar = scalar.add(&ginv[a][b].mul(&ricci[a][b]));
            }
        }
    }
    let is_flat = all_zero(r.iter().flatten().flatten().flatten(), budget);
    let is_ricci_flat = if is_flat == Truth::Proved {
        Truth::Proved
    } else {
        all_zero(ricci.iter().flatten(), budget)
    };

    let (is_einstein, einstein_constant) = einstein(m, &ricci, budget);

    let weyl = if n >= 4 {
        weyl_tensor(m, &r, &ricci, &scalar)
    } else {
        Vec::new()
    };
    let is_conformally_flat = if n >= 4 {
        all_zero(weyl.iter().flatten().flatten().flatten(), budget)
    } else {
        Truth::Undecided
    };

    let (nabla_riemann, is_locally_symmetric) = if opts.covariant {
        let nr = covariant_riemann(&m.coords, &gamma, &r);
        let t = if is_flat == Truth::Proved {
            Truth::Proved
        } else {
            all_zero(nr.iter().flatten().flatten().flatten().flatten(), budget)
        };
        (Some(nr), t)
    } else {
        (None, Truth::Undecided)
    };

    Ok(CurvaturePack {
        coords: m.coords.clone(),
        christoffel: gamma,
        riemann: r,
        ricci,
        scalar,
        weyl,
        nabla_riemann,
        einstein_constant,
        flags: CurvatureFlags {
            is_flat,
            is_ricci_flat,
            is_einstein,
            is_conformally_flat,
            is_locally_symmetric,
        },
    })
}

fn einstein(m: &MetricModel, ricci: &SMatrix, budget: usize) -> (Truth, Option<Expr>) {
    let n = m.dim();
    let Some((i, j)) = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .find(|&(i, j)| !m.g[i][j].is_zero())
    else {
        return (Truth::Undecided, None);
    };
    let Ok(lambda) = ricci[i][j].div(&m.g[i][j]) else {
        return (Truth::Undecided, None);
    };
    let constant = all_zero(
        m.coords
            .iter()
            .map(|c| lambda.diff(c))
            .collect::<Vec<_>>()
            .iter(),
        budget,
    );
    if constant == Truth::False {
        return (Truth::False, None);
    }
    let mut resid = Vec::new();
    for a in 0..n {
        for b in a..n {
            resid.push(ricci[a][b].sub(&lambda.mul(&m.g[a][b])));
        }
    }
    let t = constant.and(all_zero(resid.iter(), budget));
    (t, if t.holds() { Some(lambda) } else { None })
}

fn weyl_tensor(m: &MetricModel, r: &T4, ricci: &SMatrix, scalar: &Expr) -> T4 {
    let n = m.dim();
    let g = &m.g;
    let nn = n as i64;
    let c1 = Q::new(1.into(), (nn - 2).into());
    let c2 = Q::new(1.into(), ((nn - 1) * (nn - 2)).into());
    // R_{abcd} = g_{ae} R^e_{bcd}
    let mut low = vec![vec![vec![vec![Expr::zero(); n]; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in c + 1..n {
                    let mut acc = Expr::zero();
                    for e in 0..n {
                        if !g[a][e].is_zero() && !r[e][b][c][d].is_zero() {
                            acc = acc.add(&g[a][e].mul(&r[e][b][c][d]));
                        }
                    }
                    low[a][b][d][c] = acc.neg();
                    low[a][b][c][d] = acc;
                }
            }
        }
    }
    let mut w = vec![vec![vec![vec![Expr::zero(); n]; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in c + 1..n {
                    let ric = g[a][c]
                        .mul(&ricci[b][d])
                        .sub(&g[a][d].mul(&ricci[b][c]))
                        .sub(&g[b][c].mul(&ricci[a][d]))
                        .add(&g[b][d].mul(&ricci[a][c]));
                    let gg = g[a][c].mul(&g[b][d]).sub(&g[a][d].mul(&g[b][c]));
                    let val = low[a][b][c][d]
                        .sub(&ric.scale(&c1))
                        .add(&scalar.mul(&gg).scale(&c2));
                    w[a][b][d][c] = val.neg();
                    w[a][b][c][d] = val;
                }
            }
        }
    }
    w
}

/// `∇_c g_{ab}` componentwise; vanishes for the Levi-Civita connection.
pub fn metricity_defect(m: &MetricModel, gamma: &T3) -> Vec<Expr> {
    let n = m.dim();
    let mut out = Vec::new();
    for c in 0..n {
        for a in 0..n {
            for b in a..n {
                let mut acc = m.g[a][b].diff(&m.coords[c]);
                for k in 0..n {
                    acc = acc
                        .sub(&gamma[k][c][a].mul(&m.g[k][b]))
                        .sub(&gamma[k][c][b].mul(&m.g[a][k]));
                }
                out.push(acc);
            }
        }
    }
    out
}

/// `R^a_{bcd} + R^a_{cdb} + R^a_{dbc}` componentwise.
pub fn bianchi_defect(r: &T4) -> Vec<Expr> {
    let n = r.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    out.push(r[a][b][c][d].add(&r[a][c][d][b]).add(&r[a][d][b][c]));
                }
            }
        }
    }
    out
}

/// `(L_X g)_{μν} = X^λ ∂_λ g_{μν} + g_{λν} ∂_μ X^λ + g_{μλ} ∂_ν X^λ`.
pub fn lie_derivative_metric(m: &MetricModel, x: &VectorField) -> Result<SMatrix> {
    let n = m.dim();
    if x.comps.len() != n {
        return Err(TensorError::Shape(format!(
            "vector field has {} components, chart has {n}",
            x.comps.len()
        )));
    }
    let dx: Vec<Vec<Expr>> = x
        .comps
        .iter()
        .map(|c| m.coords.iter().map(|v| c.diff(v)).collect())
        .collect();
    let mut out = linalg::zeros(n, n);
    for mu in 0..n {
        for nu in mu..n {
            let mut acc = Expr::zero();
            for l in 0..n {
                if !x.comps[l].is_zero() {
                    acc = acc.add(&x.comps[l].mul(&m.g[mu][nu].diff(&m.coords[l])));
                }
                if !dx[l][mu].is_zero() {
                    acc = acc.add(&m.g[l][nu].mul(&dx[l][mu]));
                }
                if !dx[l][nu].is_zero() {
                    acc = acc.add(&m.g[mu][l].mul(&dx[l][nu]));
                }
            }
            out[mu][nu] = acc.clone();
            out[nu][mu] = acc;
        }
    }
    Ok(out)
}

pub fn is_killing(m: &MetricModel, x: &VectorField) -> Result<Truth> {
    let l = lie_derivative_metric(m, x)?;
    Ok(all_zero(l.iter().flatten(), DEFAULT_NODE_BUDGET))
}

/// `(∇X)^μ_ν = ∂_ν X^μ + Γ^μ_{νλ} X^λ`.
pub fn covariant_derivative(coords: &[String], gamma: &T3, x: &VectorField) -> SMatrix {
    let n = coords.len();
    let mut out = linalg::zeros(n, n);
    for mu in 0..n {
        for nu in 0..n {
            let mut acc = x.comps[mu].diff(&coords[nu]);
            for l in 0..n {
                if !gamma[mu][nu][l].is_zero() && !x.comps[l].is_zero() {
                    acc = acc.add(&gamma[mu][nu][l].mul(&x.comps[l]));
                }
            }
            out[mu][nu] = acc;
        }
    }
    out
}

#[cfg(test)]
mod tests;
