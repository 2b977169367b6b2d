//! Adapted null coordinates, Penrose limits and Ω-scaling diagnostics.
//!
//! A metric is adapted to the null geodesic `γ(u) = (u, 0, 0)` when
//!
//! ```text
//! g = c du dv + α dv² + 2β_i dv dy^i + C_ij dy^i dy^j
//! ```
//!
//! with `g_uu = g_uy = 0` and `c = 2 g_uv` constant. The Penrose limit keeps
//! `c du dv + C_ij(u, 0, 0) dy^i dy^j`.

use crate::expr::{self, Compiled, Expr, ExprError, Q};
use crate::linalg::{self, SMatrix};
use crate::tensor::{
    self, CurvatureFlags, CurvatureOptions, MetricModel, TensorError, Truth, VectorField,
};
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PenroseError {
    #[error("not in adapted form: {0}")]
    Shape(String),
    #[error("C is not positive definite at u = {u} (leading minor {minor} = {value:e})")]
    Indefinite { u: String, minor: usize, value: f64 },
    #[error("component {component} is singular on the geodesic: {source}")]
    Singular {
        component: String,
        source: ExprError,
    },
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Result<T> = std::result::Result<T, PenroseError>;

/// Which coordinates play the roles `u`, `v` and `y^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Roles {
    pub u: String,
    pub v: String,
    pub ys: Vec<String>,
}

impl Roles {
    /// `u` and `v` as named, every other coordinate a `y`.
    pub fn new(coords: &[String], u: &str, v: &str) -> Roles {
        Roles {
            u: u.to_string(),
            v: v.to_string(),
            ys: coords
                .iter()
                .filter(|c| *c != u && *c != v)
                .cloned()
                .collect(),
        }
    }
}

/// A metric validated to be in adapted form, with its pieces extracted.
#[derive(Clone, Debug)]
pub struct AdaptedMetric {
    pub model: MetricModel,
    pub u: usize,
    pub v: usize,
    pub ys: Vec<usize>,
    /// `g_vv`
    pub alpha: Expr,
    /// `g_{v y^i}`
    pub beta: Vec<Expr>,
    /// `g_{y^i y^j}`
    pub c: SMatrix,
    /// `g_uv`
    pub c_uv: Expr,
    /// Whether positive definiteness of `C` was checked numerically.
    pub c_checked: bool,
}

impl AdaptedMetric {
    pub fn roles(&self) -> Roles {
        let name = |i: usize| self.model.coords[i].clone();
        Roles {
            u: name(self.u),
            v: name(self.v),
            ys: self.ys.iter().map(|&i| name(i)).collect(),
        }
    }

    /// Substitution `v = v0, y = 0`.
    fn on_gamma(&self, v0: &Expr) -> BTreeMap<String, Expr> {
        let mut map = BTreeMap::new();
        map.insert(self.model.coords[self.v].clone(), v0.clone());
        for &i in &self.ys {
            map.insert(self.model.coords[i].clone(), Expr::zero());
        }
        map
    }
}

fn label(m: &MetricModel, i: usize, j: usize) -> String {
    format!("g({},{})", m.coords[i], m.coords[j])
}

pub fn validate_adapted(m: &MetricModel, roles: &Roles) -> Result<AdaptedMetric> {
    let idx = |name: &str| {
        m.coord_index(name)
            .ok_or_else(|| PenroseError::Shape(format!("role names unknown coordinate `{name}`")))
    };
    let u = idx(&roles.u)?;
    let v = idx(&roles.v)?;
    if u == v {
        return Err(PenroseError::Shape(
            "u and v must be different coordinates".into(),
        ));
    }
    let ys: Vec<usize> = roles.ys.iter().map(|y| idx(y)).collect::<Result<_>>()?;
    let mut seen: Vec<usize> = ys.clone();
    seen.push(u);
    seen.push(v);
    seen.sort();
    seen.dedup();
    if seen.len() != m.dim() || ys.len() + 2 != m.dim() {
        return Err(PenroseError::Shape(
            "roles must name each coordinate exactly once".into(),
        ));
    }
    if !expr::is_zero(&m.g[u][u]).holds() {
        return Err(PenroseError::Shape(format!(
            "g_{{uu}} ≠ 0 ({} = {})",
            label(m, u, u),
            m.g[u][u]
        )));
    }
    for &y in &ys {
        if !expr::is_zero(&m.g[u][y]).holds() {
            return Err(PenroseError::Shape(format!(
                "g_{{uy}} ≠ 0 ({} = {})",
                label(m, u, y),
                m.g[u][y]
            )));
        }
    }
    let c_uv = m.g[u][v].clone();
    if m.coords.iter().any(|c| c_uv.depends_on(c)) {
        return Err(PenroseError::Shape(format!(
            "g_{{uv}} is not constant ({} = {c_uv})",
            label(m, u, v)
        )));
    }
    if c_uv.is_zero() {
        return Err(PenroseError::Shape("g_{uv} = 0".into()));
    }
    let c: SMatrix = ys
        .iter()
        .map(|&i| ys.iter().map(|&j| m.g[i][j].clone()).collect())
        .collect();
    let mut a = AdaptedMetric {
        model: m.clone(),
        u,
        v,
        ys,
        alpha: m.g[v][v].clone(),
        beta: Vec::new(),
        c,
        c_uv,
        c_checked: false,
    };
    a.beta = a.ys.iter().map(|&y| m.g[v][y].clone()).collect();
    a.c_checked = check_positive(&a)?;
    Ok(a)
}

/// Leading-minor test of `C` on `γ` at the sample value of `u` (or `u = 1`).
/// Returns `false` when parameters lack numeric values.
fn check_positive(a: &AdaptedMetric) -> Result<bool> {
    let m = &a.model;
    let consts = m.numeric_consts();
    let u_val = m
        .sample
        .as_ref()
        .map(|s| s[a.u].clone())
        .unwrap_or_else(Q::one);
    let mut x = vec![0.0; m.dim()];
    x[a.u] = num::ToPrimitive::to_f64(&u_val).unwrap_or(1.0);
    let k = a.ys.len();
    let mut cm = nalgebra::DMatrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            match Compiled::new(&a.c[i][j], &m.coords, &consts) {
                Ok(c) => cm[(i, j)] = c.eval(&x),
                Err(ExprError::Unbound(_)) => return Ok(false),
                Err(e) => return Err(e.into()),
            }
        }
    }
    for r in 1..=k {
        let d = cm.view((0, 0), (r, r)).determinant();
        if d.is_nan() || d <= 1e-10 {
            return Err(PenroseError::Indefinite {
                u: u_val.to_string(),
                minor: r,
                value: d,
            });
        }
    }
    Ok(true)
}

/// Penrose limit along `γ(u) = (u, 0, 0)`.
pub fn penrose_limit(a: &AdaptedMetric) -> Result<AdaptedMetric> {
    penrose_limit_at(a, &Expr::zero())
}

/// Penrose limit along `γ(u) = (u, v0, 0)`.
pub fn penrose_limit_at(a: &AdaptedMetric, v0: &Expr) -> Result<AdaptedMetric> {
    let m = &a.model;
    let n = m.dim();
    let map = a.on_gamma(v0);
    let mut g = linalg::zeros(n, n);
    g[a.u][a.v] = a.c_uv.clone();
    g[a.v][a.u] = a.c_uv.clone();
    for (p, &i) in a.ys.iter().enumerate() {
        for (q, &j) in a.ys.iter().enumerate() {
            g[i][j] = a.c[p][q]
                .subs(&map)
                .map_err(|source| PenroseError::Singular {
                    component: label(m, i, j),
                    source,
                })?;
        }
    }
    let mut lm = MetricModel::new(m.coords.clone(), g)?;
    lm.values = m.values.clone();
    lm.sample = m.sample.clone();
    lm.lorentzian = m.lorentzian;
    validate_adapted(&lm, &a.roles())
}

/// `Ω⁻² (φ_Ω⁻¹)^* g`: substitutes `(u, v, y) ↦ (u, Ω²v, Ωy)` and rescales.
pub fn omega_pullback(a: &AdaptedMetric, omega: &str) -> Result<MetricModel> {
    let m = &a.model;
    if m.coords.iter().any(|c| c == omega) || m.parameters().contains(omega) {
        return Err(PenroseError::Shape(format!(
            "symbol `{omega}` is already in use"
        )));
    }
    let w = Expr::sym(omega);
    let mut map = BTreeMap::new();
    map.insert(
        m.coords[a.v].clone(),
        w.mul(&w).mul(&Expr::sym(&m.coords[a.v])),
    );
    for &y in &a.ys {
        map.insert(m.coords[y].clone(), w.mul(&Expr::sym(&m.coords[y])));
    }
    let pulled = m.pullback(m.coords.clone(), &map)?;
    let inv = w.powi(-2)?;
    let g = pulled
        .g
        .iter()
        .map(|r| r.iter().map(|e| e.mul(&inv)).collect())
        .collect();
    let mut out = MetricModel::new(m.coords.clone(), g)?;
    out.values = m.values.clone();
    out.sample = m.sample.clone();
    out.lorentzian = m.lorentzian;
    Ok(out)
}

/// Order-zero term of each component as a series in `Ω`.
pub fn omega_order0(m: &MetricModel, omega: &str) -> Result<MetricModel> {
    let mut map = BTreeMap::new();
    map.insert(omega.to_string(), Expr::zero());
    let n = m.dim();
    let mut g = linalg::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[i][j] = m.g[i][j]
                .subs(&map)
                .map_err(|source| PenroseError::Singular {
                    component: label(m, i, j),
                    source,
                })?;
        }
    }
    let mut out = MetricModel::new(m.coords.clone(), g)?;
    out.values = m.values.clone();
    out.sample = m.sample.clone();
    Ok(out)
}

/// Componentwise comparison of two metrics on the same chart.
pub fn same_metric(a: &MetricModel, b: &MetricModel) -> Truth {
    if a.coords != b.coords {
        return Truth::False;
    }
    let diffs: Vec<Expr> =
        a.g.iter()
            .flatten()
            .zip(b.g.iter().flatten())
            .map(|(x, y)| x.sub(y))
            .collect();
    tensor::all_zero(diffs.iter(), tensor::DEFAULT_NODE_BUDGET)
}

// ---------------------------------------------------------------------------
// scaling

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexRole {
    U,
    V,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub role: IndexRole,
    pub upper: bool,
}

impl Slot {
    pub fn lower(role: IndexRole) -> Slot {
        Slot { role, upper: false }
    }

    pub fn upper(role: IndexRole) -> Slot {
        Slot { role, upper: true }
    }

    pub fn weight(self) -> i32 {
        let w = match self.role {
            IndexRole::U => 0,
            IndexRole::V => 2,
            IndexRole::Y => 1,
        };
        if self.upper {
            -w
        } else {
            w
        }
    }
}

/// A tensor component with its index signature and its value on `γ`.
#[derive(Clone, Debug)]
pub struct ScaledComponent {
    pub label: String,
    pub slots: Vec<Slot>,
    /// Whether the component carries the `Ω⁻²` metric prefactor.
    pub metric_prefactor: bool,
    pub value: Expr,
}

impl ScaledComponent {
    /// Power of `Ω` the component picks up under the Penrose rescaling.
    pub fn weight(&self) -> i32 {
        self.slots.iter().map(|s| s.weight()).sum::<i32>()
            - if self.metric_prefactor { 2 } else { 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalingVerdict {
    WellDefined,
    BlowsUp,
    Undecided,
}

impl ScalingVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalingVerdict::WellDefined => "well-defined limit",
            ScalingVerdict::BlowsUp => "blows up",
            ScalingVerdict::Undecided => "undecided",
        }
    }
}

impl fmt::Display for ScalingVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct ScalingReport {
    /// `(label, weight, value)` for every component.
    pub table: Vec<(String, i32, Expr)>,
    pub verdict: ScalingVerdict,
    /// Negative-weight components that do not vanish (or are undecided).
    pub offending: Vec<String>,
}

/// The limit is well defined iff every negative-weight component vanishes
/// on `γ`.
pub fn scaling_profile(components: &[ScaledComponent]) -> ScalingReport {
    let mut table = Vec::new();
    let mut offending = Vec::new();
    let mut verdict = ScalingVerdict::WellDefined;
    for c in components {
        let w = c.weight();
        table.push((c.label.clone(), w, c.value.clone()));
        if w >= 0 {
            continue;
        }
        match Truth::from(expr::is_zero(&c.value)) {
            Truth::Proved | Truth::Probably => {}
            Truth::False => {
                verdict = ScalingVerdict::BlowsUp;
                offending.push(c.label.clone());
            }
            Truth::Undecided => {
                if verdict != ScalingVerdict::BlowsUp {
                    verdict = ScalingVerdict::Undecided;
                }
                offending.push(c.label.clone());
            }
        }
    }
    ScalingReport {
        table,
        verdict,
        offending,
    }
}

// ---------------------------------------------------------------------------
// coordinate changes

/// Changes chart by `v = s − K`, `y^i = e^i_k z^k` (names kept), takes the
/// limit along the image of `γ` (at `s = K`) and compares with
/// `e^T C(u) e` from the original chart.
pub fn coordinate_change_invariance(a: &AdaptedMetric, e: &[Vec<Q>], k: &Q) -> Result<Truth> {
    let m = &a.model;
    let ny = a.ys.len();
    if e.len() != ny || e.iter().any(|r| r.len() != ny) {
        return Err(PenroseError::Shape(format!("rotation must be {ny}x{ny}")));
    }
    if linalg::q_rank(&e.to_vec()) != ny {
        return Err(PenroseError::Shape("rotation matrix is singular".into()));
    }
    let mut map = BTreeMap::new();
    let kq = Expr::rational(k.clone());
    map.insert(m.coords[a.v].clone(), Expr::sym(&m.coords[a.v]).sub(&kq));
    for (i, &yi) in a.ys.iter().enumerate() {
        let mut acc = Expr::zero();
        for (j, &yj) in a.ys.iter().enumerate() {
            if !e[i][j].is_zero() {
                acc = acc.add(&Expr::sym(&m.coords[yj]).scale(&e[i][j]));
            }
        }
        map.insert(m.coords[yi].clone(), acc);
    }
    let pulled = m.pullback(m.coords.clone(), &map)?;
    let b = validate_adapted(&pulled, &a.roles())?;
    let lim_new = penrose_limit_at(&b, &kq)?;
    let lim_old = penrose_limit(a)?;
    let mut diffs = Vec::new();
    if !lim_new.c_uv.sub(&lim_old.c_uv).is_zero() {
        diffs.push(lim_new.c_uv.sub(&lim_old.c_uv));
    }
    for p in 0..ny {
        for q in 0..ny {
            let mut expected = Expr::zero();
            for i in 0..ny {
                for j in 0..ny {
                    let w = &e[i][p] * &e[j][q];
                    if !w.is_zero() {
                        expected = expected.add(&lim_old.c[i][j].scale(&w));
                    }
                }
            }
            diffs.push(lim_new.c[p][q].sub(&expected));
        }
    }
    Ok(tensor::all_zero(diffs.iter(), tensor::DEFAULT_NODE_BUDGET))
}

// ---------------------------------------------------------------------------
// hereditary properties

#[derive(Clone, Debug)]
pub struct Implication {
    pub property: &'static str,
    pub inherited_as: &'static str,
    pub source: Truth,
    pub limit: Truth,
}

impl Implication {
    /// Whether the implication is consistent with the computed flags.
    pub fn consistent(&self) -> bool {
        !self.source.holds() || self.limit.holds()
    }
}

#[derive(Clone, Debug)]
pub struct HereditaryReport {
    pub limit: AdaptedMetric,
    pub source_flags: CurvatureFlags,
    pub limit_flags: CurvatureFlags,
    pub implications: Vec<Implication>,
    /// Killing fields of the limit found by ansatz and verified.
    pub limit_killing: Vec<VectorField>,
    /// Killing algebra dimension declared for the source, if supplied.
    pub source_killing_dim: Option<usize>,
}

pub fn hereditary_report(
    a: &AdaptedMetric,
    source_killing_dim: Option<usize>,
) -> Result<HereditaryReport> {
    let opts = CurvatureOptions::default();
    let src = tensor::curvature_with(&a.model, &opts)?;
    let limit = penrose_limit(a)?;
    let lim = tensor::curvature_with(&limit.model, &opts)?;
    let sf = src.flags;
    let lf = lim.flags;
    let implications = vec![
        Implication {
            property: "Einstein",
            inherited_as: "Ricci-flat",
            source: sf.is_einstein,
            limit: lf.is_ricci_flat,
        },
        Implication {
            property: "conformally flat",
            inherited_as: "conformally flat",
            source: sf.is_conformally_flat,
            limit: lf.is_conformally_flat,
        },
        Implication {
            property: "locally symmetric",
            inherited_as: "locally symmetric",
            source: sf.is_locally_symmetric,
            limit: lf.is_locally_symmetric,
        },
        Implication {
            property: "Einstein and conformally flat",
            inherited_as: "flat",
            source: sf.is_einstein.and(sf.is_conformally_flat),
            limit: lf.is_flat,
        },
    ];
    let limit_killing = plane_wave_killing_fields(&limit)?;
    Ok(HereditaryReport {
        limit,
        source_flags: sf,
        limit_flags: lf,
        implications,
        limit_killing,
        source_killing_dim,
    })
}

/// Antiderivative of sums of terms `k·x^p·(x-free)` (`p ≠ −1`) and
/// `k·exp(a·x)·(x-free)`; verified by differentiation.
fn antiderivative(e: &Expr, var: &str) -> Option<Expr> {
    let x = Expr::sym(var);
    let mut out = Expr::zero();
    for t in e.terms() {
        if !t.depends_on(var) {
            out = out.add(&t.mul(&x));
            continue;
        }
        let dt = t.diff(var);
        let p = x.mul(&dt).div(&t).ok()?;
        if !p.depends_on(var) && !expr::equal(&p, &Expr::int(-1)).holds() {
            out = out.add(&t.mul(&x).div(&p.add(&Expr::one())).ok()?);
            continue;
        }
        let r = dt.div(&t).ok()?;
        if !r.depends_on(var) && !r.is_zero() {
            out = out.add(&t.div(&r).ok()?);
            continue;
        }
        return None;
    }
    expr::equal(&out.diff(var), e).holds().then_some(out)
}

/// Killing fields of a Rosen plane wave `c du dv + C(u) dy dy` found by
/// ansatz: `∂_v`, `∂_{y^i}`, the Heisenberg partners
/// `F^j ∂_{y^j} − y^i/g_uv ∂_v` with `F' = C⁻¹ e_i`, and scaling fields.
pub fn plane_wave_killing_fields(a: &AdaptedMetric) -> Result<Vec<VectorField>> {
    let m = &a.model;
    let n = m.dim();
    let ucoord = &m.coords[a.u];
    let mut candidates = vec![VectorField::coordinate(a.v, n)];
    for &y in &a.ys {
        candidates.push(VectorField::coordinate(y, n));
    }
    if let Ok(cinv) = linalg::inverse(&a.c) {
        let inv_cuv = Expr::one().div(&a.c_uv)?;
        for (i, &yi) in a.ys.iter().enumerate() {
            let col: Option<Vec<Expr>> = (0..a.ys.len())
                .map(|j| antiderivative(&cinv[j][i], ucoord))
                .collect();
            if let Some(f) = col {
                let mut comps = vec![Expr::zero(); n];
                for (j, &yj) in a.ys.iter().enumerate() {
                    comps[yj] = f[j].clone();
                }
                comps[a.v] = inv_cuv.mul(&Expr::sym(&m.coords[yi])).neg();
                candidates.push(VectorField::new(comps));
            }
        }
    }
    candidates.push(VectorField::coordinate(a.u, n));
    // scaling ansatz: u d_u − v d_v + k y d_y, or d_u + k y d_y
    if let Some(c0) = a.c.first().and_then(|r| r.first()) {
        let dlog = c0.diff(ucoord).div(c0)?;
        let uq = Expr::sym(ucoord);
        for (base_u, base_v, k) in [
            (
                uq.clone(),
                Expr::sym(&m.coords[a.v]).neg(),
                uq.mul(&dlog).scale(&-Q::new(1.into(), 2.into())),
            ),
            (
                Expr::one(),
                Expr::zero(),
                dlog.scale(&-Q::new(1.into(), 2.into())),
            ),
        ] {
            if k.depends_on(ucoord) || k.is_zero() {
                continue;
            }
            let mut comps = vec![Expr::zero(); n];
            comps[a.u] = base_u;
            comps[a.v] = base_v;
            for &y in &a.ys {
                comps[y] = k.mul(&Expr::sym(&m.coords[y]));
            }
            candidates.push(VectorField::new(comps));
        }
    }
    let mut out = Vec::new();
    for c in candidates {
        if tensor::is_killing(m, &c)?.holds() && !out.contains(&c) {
            out.push(c);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn coords(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn example() -> AdaptedMetric {
        let m = MetricModel::from_line_element(
            coords(&["u", "v", "x1", "x2"]),
            "2*du*dv + u*dv^2 + sqrt(u)*(dx1^2 + dx2^2)",
        )
        .unwrap();
        validate_adapted(&m, &Roles::new(&m.coords, "u", "v")).unwrap()
    }

    #[test]
    fn validate_extracts_pieces() {
        let a = example();
        assert_eq!(a.c_uv, Expr::one());
        assert_eq!(a.alpha, parse("u").unwrap());
        assert!(a.beta.iter().all(Expr::is_zero));
        assert_eq!(a.c[0][0], parse("sqrt(u)").unwrap());
        assert!(a.c_checked);
        let bad = MetricModel::from_line_element(coords(&["u", "v", "y"]), "u*du^2 + du*dv + dy^2")
            .unwrap();
        let err = validate_adapted(&bad, &Roles::new(&bad.coords, "u", "v")).unwrap_err();
        assert!(err.to_string().contains("g_{uu} ≠ 0"), "{err}");
        let neg = MetricModel::from_line_element(coords(&["u", "v", "y"]), "du*dv - dy^2").unwrap();
        assert!(matches!(
            validate_adapted(&neg, &Roles::new(&neg.coords, "u", "v")),
            Err(PenroseError::Indefinite { .. })
        ));
    }

    #[test]
    fn limit_of_example() {
        let l = penrose_limit(&example()).unwrap();
        assert_eq!(l.model.line_element(), "2*du*dv + sqrt(u)*(dx1^2 + dx2^2)");
        // idempotent
        let l2 = penrose_limit(&l).unwrap();
        assert_eq!(l2.model.g, l.model.g);
    }

    #[test]
    fn omega_pullback_weights() {
        let a = example();
        let p = omega_pullback(&a, "W").unwrap();
        assert_eq!(p.g[1][1], parse("u*W^2").unwrap());
        assert_eq!(p.g[2][2], parse("sqrt(u)").unwrap());
        let at_one = p.subs(&[("W".to_string(), Expr::one())].into()).unwrap();
        assert_eq!(same_metric(&at_one, &a.model), Truth::Proved);
        let o0 = omega_order0(&p, "W").unwrap();
        assert_eq!(
            same_metric(&o0, &penrose_limit(&a).unwrap().model),
            Truth::Proved
        );
    }

    #[test]
    fn scaling_weights() {
        use IndexRole::*;
        let t = |label: &str, slots: Vec<Slot>, v: &str| ScaledComponent {
            label: label.into(),
            slots,
            metric_prefactor: false,
            value: parse(v).unwrap(),
        };
        let comps = vec![
            t(
                "T^v_uu",
                vec![Slot::lower(U), Slot::lower(U), Slot::upper(V)],
                "0",
            ),
            t(
                "T^y_uu",
                vec![Slot::lower(U), Slot::lower(U), Slot::upper(Y)],
                "0",
            ),
            t(
                "T^v_uy",
                vec![Slot::lower(U), Slot::lower(Y), Slot::upper(V)],
                "0",
            ),
            t(
                "T^y_uy",
                vec![Slot::lower(U), Slot::lower(Y), Slot::upper(Y)],
                "3",
            ),
        ];
        let r = scaling_profile(&comps);
        assert_eq!(
            r.table.iter().map(|x| x.1).collect::<Vec<_>>(),
            vec![-2, -1, -1, 0]
        );
        assert_eq!(r.verdict, ScalingVerdict::WellDefined);
        let mut bad = comps.clone();
        bad[1].value = Expr::one();
        let r = scaling_profile(&bad);
        assert_eq!(r.verdict, ScalingVerdict::BlowsUp);
        assert_eq!(r.offending, vec!["T^y_uu".to_string()]);
        assert_eq!(scaling_profile(&[]).verdict, ScalingVerdict::WellDefined);
        let g_vv = ScaledComponent {
            label: "g_vv".into(),
            slots: vec![Slot::lower(V), Slot::lower(V)],
            metric_prefactor: true,
            value: Expr::one(),
        };
        assert_eq!(g_vv.weight(), 2);
    }

    #[test]
    fn coordinate_changes() {
        let a = example();
        let id = vec![vec![Q::one(), Q::zero()], vec![Q::zero(), Q::one()]];
        assert_eq!(
            coordinate_change_invariance(&a, &id, &Q::zero()).unwrap(),
            Truth::Proved
        );
        assert_eq!(
            coordinate_change_invariance(&a, &id, &Q::from_integer(7.into())).unwrap(),
            Truth::Proved
        );
        let f = |n: i64| Q::new(n.into(), 5.into());
        let rot = vec![vec![f(3), f(-4)], vec![f(4), f(3)]];
        assert_eq!(
            coordinate_change_invariance(&a, &rot, &Q::zero()).unwrap(),
            Truth::Proved
        );
    }

    #[test]
    fn antiderivatives() {
        assert_eq!(
            antiderivative(&parse("u^(-1/2)").unwrap(), "u").unwrap(),
            parse("2*sqrt(u)").unwrap()
        );
        assert_eq!(
            antiderivative(&parse("exp(2*u)").unwrap(), "u").unwrap(),
            parse("exp(2*u)/2").unwrap()
        );
        assert!(antiderivative(&parse("1/u").unwrap(), "u").is_none());
    }

    #[test]
    fn rosen_killing_fields() {
        let l = penrose_limit(&example()).unwrap();
        let ks = plane_wave_killing_fields(&l).unwrap();
        // ∂_v, ∂_x1, ∂_x2, two Heisenberg partners and one scaling field
        assert_eq!(
            ks.len(),
            6,
            "{:?}",
            ks.iter()
                .map(|k| k.display(&l.model.coords))
                .collect::<Vec<_>>()
        );
    }
}
