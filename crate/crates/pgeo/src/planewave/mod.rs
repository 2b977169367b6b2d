//! Homogeneous plane waves in Brinkmann form
//!
//! ```text
//! 2 dx⁺ dx⁻ + A_ij(x⁺) zⁱ zʲ (dx⁺)² + Σ (dzⁱ)²
//! ```
//!
//! with `A(x⁺) = e^{x⁺f} A₀ e^{−x⁺f}` (smooth class) or
//! `A(x⁺) = e^{f log x⁺} A₀ e^{−f log x⁺} / (x⁺)²` (singular class), their
//! isometry algebras, Cahen–Wallach normal forms and recognition of Rosen
//! profiles.

use crate::expr::{self, Compiled, Expr, ExprError, Q};
use crate::homspace::{self, HomError, LieAlgebraModel};
use crate::linalg::{self, LinalgError, QMatrix, SMatrix};
use crate::penrose::AdaptedMetric;
use crate::tensor::{self, MetricModel, TensorError, Truth, VectorField};
use num::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[cfg(test)]
mod tests;

#[derive(Debug, Error)]
pub enum PlaneWaveError {
    #[error("{0}")]
    Shape(String),
    #[error("A₀ is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("f is not skew-symmetric at ({0}, {1})")]
    NotSkew(usize, usize),
    #[error("class {class} requires (a, b, c) = {expected}")]
    Parameters {
        class: PlaneWaveClass,
        expected: String,
    },
    #[error("exp(x⁺ f) has no closed form: {0}")]
    UnsupportedSpectrum(String),
    #[error("generic bracket table failed validation: {0}")]
    Algebra(HomError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

pub type Result<T> = std::result::Result<T, PlaneWaveError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaneWaveClass {
    /// Complete metrics, `(a, b, c) = (0, 1, 1)`.
    Smooth,
    /// Singular along `x⁺ = 0`, `(a, b, c) = (1, 0, 1)`.
    Singular,
    /// Any other `(a, b, c)`; the metric is built as in the smooth class.
    Unclassified,
}

impl PlaneWaveClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PlaneWaveClass::Smooth => "smooth",
            PlaneWaveClass::Singular => "singular",
            PlaneWaveClass::Unclassified => "unclassified",
        }
    }

    pub fn is_complete(self) -> Option<bool> {
        match self {
            PlaneWaveClass::Smooth => Some(true),
            PlaneWaveClass::Singular => Some(false),
            PlaneWaveClass::Unclassified => None,
        }
    }

    fn parameters(self) -> Option<[i64; 3]> {
        match self {
            PlaneWaveClass::Smooth => Some([0, 1, 1]),
            PlaneWaveClass::Singular => Some([1, 0, 1]),
            PlaneWaveClass::Unclassified => None,
        }
    }
}

impl fmt::Display for PlaneWaveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlaneWaveData {
    pub a0: QMatrix,
    pub f: QMatrix,
    pub class: PlaneWaveClass,
    /// `(a, b, c)` of the generic isometry algebra.
    pub abc: [Q; 3],
}

fn qi(i: i64) -> Q {
    Q::from_integer(i.into())
}

impl PlaneWaveData {
    /// Data of a classified wave; `(a, b, c)` follow from the class.
    pub fn new(a0: QMatrix, f: QMatrix, class: PlaneWaveClass) -> Result<PlaneWaveData> {
        let abc = class
            .parameters()
            .ok_or_else(|| PlaneWaveError::Parameters {
                class,
                expected: "explicit values (use PlaneWaveData::with_parameters)".into(),
            })?;
        let d = PlaneWaveData {
            a0,
            f,
            class,
            abc: abc.map(qi),
        };
        d.validate()?;
        Ok(d)
    }

    /// Data with explicit `(a, b, c)`; the class is inferred.
    pub fn with_parameters(a0: QMatrix, f: QMatrix, abc: [Q; 3]) -> Result<PlaneWaveData> {
        let class = [PlaneWaveClass::Smooth, PlaneWaveClass::Singular]
            .into_iter()
            .find(|c| c.parameters().map(|p| p.map(qi)) == Some(abc.clone()))
            .unwrap_or(PlaneWaveClass::Unclassified);
        let d = PlaneWaveData { a0, f, class, abc };
        d.validate()?;
        Ok(d)
    }

    /// Number of transverse coordinates `zⁱ`.
    pub fn transverse_dim(&self) -> usize {
        self.a0.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.a0.len();
        if k == 0 {
            return Err(PlaneWaveError::Shape("A₀ must be at least 1×1".into()));
        }
        if self.a0.iter().any(|r| r.len() != k)
            || self.f.len() != k
            || self.f.iter().any(|r| r.len() != k)
        {
            return Err(PlaneWaveError::Shape(format!(
                "A₀ and f must both be {k}×{k}"
            )));
        }
        for i in 0..k {
            for j in 0..k {
                if self.a0[i][j] != self.a0[j][i] {
                    return Err(PlaneWaveError::NotSymmetric(i, j));
                }
                if self.f[i][j] != -self.f[j][i].clone() {
                    return Err(PlaneWaveError::NotSkew(i, j));
                }
            }
        }
        if let Some(p) = self.class.parameters() {
            if p.map(qi) != self.abc {
                return Err(PlaneWaveError::Parameters {
                    class: self.class,
                    expected: format!("({}, {}, {})", p[0], p[1], p[2]),
                });
            }
        }
        Ok(())
    }

    pub fn coords(&self) -> Vec<String> {
        let mut c = vec!["xp".to_string(), "xm".to_string()];
        c.extend((1..=self.transverse_dim()).map(|i| format!("z{i}")));
        c
    }
}

fn exp_f(f: &QMatrix, t: &Expr) -> Result<SMatrix> {
    linalg::exp_matrix(f, t).map_err(|e| match e {
        LinalgError::UnsupportedSpectrum(s) => PlaneWaveError::UnsupportedSpectrum(s),
        e => e.into(),
    })
}

/// The profile `A_ij(x⁺)`.
pub fn bo_profile(d: &PlaneWaveData) -> Result<SMatrix> {
    d.validate()?;
    let xp = Expr::sym("xp");
    let t = match d.class {
        PlaneWaveClass::Singular => xp.log()?,
        _ => xp.clone(),
    };
    let neg_f: QMatrix =
        d.f.iter()
            .map(|r| r.iter().map(|x| -x.clone()).collect())
            .collect();
    let e = exp_f(&d.f, &t)?;
    let e_inv = exp_f(&neg_f, &t)?;
    let mut p = linalg::mat_mul(&linalg::mat_mul(&e, &linalg::from_rational(&d.a0)), &e_inv);
    if d.class == PlaneWaveClass::Singular {
        let w = xp.powi(-2)?;
        p = p
            .into_iter()
            .map(|r| r.into_iter().map(|x| x.mul(&w)).collect())
            .collect();
    }
    Ok(p)
}

/// Brinkmann metric on `(xp, xm, z1, …)`; the singular class lives on
/// `xp > 0`, and both carry the sample point `xp = 1`.
pub fn build_bo_metric(d: &PlaneWaveData) -> Result<MetricModel> {
    let p = bo_profile(d)?;
    let k = d.transverse_dim();
    let n = k + 2;
    let z: Vec<Expr> = (1..=k).map(|i| Expr::sym(&format!("z{i}"))).collect();
    let mut h = Expr::zero();
    for i in 0..k {
        for j in 0..k {
            if !p[i][j].is_zero() {
                h = h.add(&p[i][j].mul(&z[i]).mul(&z[j]));
            }
        }
    }
    let mut g = linalg::zeros(n, n);
    g[0][0] = h;
    g[0][1] = Expr::one();
    g[1][0] = Expr::one();
    for i in 2..n {
        g[i][i] = Expr::one();
    }
    let mut sample = vec![Q::zero(); n];
    sample[0] = Q::one();
    Ok(MetricModel::new(d.coords(), g)?
        .lorentzian()
        .with_sample(sample))
}

/// Cahen–Wallach metric `2dx⁺dx⁻ + Σ A_i (zⁱ)² (dx⁺)² + Σ (dzⁱ)²`.
pub fn cahen_wallach_metric(a: &[Expr]) -> Result<MetricModel> {
    let n = a.len() + 2;
    let mut coords = vec!["xp".to_string(), "xm".to_string()];
    coords.extend((1..=a.len()).map(|i| format!("z{i}")));
    let mut g = linalg::zeros(n, n);
    for (i, ai) in a.iter().enumerate() {
        g[0][0] = g[0][0].add(&ai.mul(&Expr::sym(&coords[i + 2]).powi(2)?));
        g[i + 2][i + 2] = Expr::one();
    }
    g[0][1] = Expr::one();
    g[1][0] = Expr::one();
    let mut sample = vec![Q::zero(); n];
    sample[0] = Q::one();
    Ok(MetricModel::new(coords, g)?
        .lorentzian()
        .with_sample(sample))
}

/// Basis names of the isometry algebra: `e_i`, `Y_i`, `X`, `Z`.
pub fn bo_basis(k: usize) -> Vec<String> {
    let mut b: Vec<String> = (1..=k).map(|i| format!("e{i}")).collect();
    b.extend((1..=k).map(|i| format!("Y{i}")));
    b.push("X".into());
    b.push("Z".into());
    b
}

/// The generic isometry algebra of a homogeneous plane wave, isotropy
/// spanned by the `e_i`, complement `{Y_i, X, Z}` with `B(Y_i, Y_j) = δ_ij`
/// and `B(X, Z) = 1/c`.
pub fn bo_isometry_algebra(d: &PlaneWaveData) -> Result<LieAlgebraModel> {
    d.validate()?;
    let k = d.transverse_dim();
    let names = bo_basis(k);
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    let iso: Vec<&str> = refs[..k].to_vec();
    let name = format!("bo-{}", d.class);
    let mut m = LieAlgebraModel::new(&name, &refs, &iso).map_err(PlaneWaveError::Algebra)?;
    let [a, b, c] = d.abc.clone();
    if c.is_zero() {
        return Err(PlaneWaveError::Shape(
            "c = 0 makes B(X, Z) undefined".into(),
        ));
    }
    let n = 2 * k + 2;
    let (e, y, x, z) = (|i: usize| i, |i: usize| k + i, 2 * k, 2 * k + 1);
    let mut set = |i: usize, j: usize, terms: Vec<(usize, Q)>| -> Result<()> {
        let mut v = vec![Expr::zero(); n];
        for (t, q) in terms {
            v[t] = v[t].add(&Expr::rational(q));
        }
        m.set_bracket_vec(i, j, v).map_err(PlaneWaveError::Algebra)
    };
    let f = &d.f;
    let ff = linalg::q_mul(f, f);
    let apb2 = (&a + &b) * (&a + &b);
    for i in 0..k {
        set(e(i), y(i), vec![(z, c.clone())])?;
        set(e(i), x, vec![(y(i), -Q::one())])?;
        for j in i + 1..k {
            set(y(i), y(j), vec![(z, qi(2) * &c * &f[i][j])])?;
        }
        let mut terms = Vec::new();
        for j in 0..k {
            let delta = if i == j { a.clone() } else { Q::zero() };
            terms.push((y(j), delta + qi(2) * &f[i][j]));
            terms.push((e(j), &c * &apb2 * &d.a0[i][j] - &a * &f[i][j] - &ff[i][j]));
        }
        set(x, y(i), terms)?;
    }
    set(x, z, vec![(z, a.clone())])?;
    for i in 0..k {
        m.form[i][i] = Expr::one();
    }
    let (px, pz) = (k, k + 1);
    let inv_c = Expr::rational(c.recip());
    m.form[px][pz] = inv_c.clone();
    m.form[pz][px] = inv_c;
    homspace::validate_algebra(&m).map_err(PlaneWaveError::Algebra)?;
    Ok(m)
}

#[derive(Clone, Debug)]
pub struct Eigenvalue {
    pub value: f64,
    /// Closed form when the characteristic polynomial allows one.
    pub exact: Option<Expr>,
}

#[derive(Clone, Debug)]
pub struct NormalForm {
    /// Sorted descending.
    pub eigenvalues: Vec<Eigenvalue>,
    /// Largest `σ_min(A₀ − λ) / max(1, ‖A₀‖)` over the numeric eigenvalues.
    pub max_residual: f64,
}

/// Residual bound for numeric eigenvalues.
pub const EIGEN_RESIDUAL: f64 = 1e-12;

impl NormalForm {
    pub fn is_exact(&self) -> bool {
        self.eigenvalues.iter().all(|e| e.exact.is_some())
    }

    pub fn residual_ok(&self) -> bool {
        self.max_residual <= EIGEN_RESIDUAL
    }

    pub fn exact_values(&self) -> Option<Vec<Expr>> {
        self.eigenvalues.iter().map(|e| e.exact.clone()).collect()
    }

    /// Profile entries as expressions; numeric eigenvalues become decimal
    /// rationals.
    pub fn values(&self) -> Vec<Expr> {
        self.eigenvalues
            .iter()
            .map(|e| {
                e.exact.clone().unwrap_or_else(|| {
                    Expr::rational(Q::from_float(e.value).unwrap_or_else(Q::zero))
                })
            })
            .collect()
    }
}

fn numeric_value(e: &Expr) -> Result<f64> {
    Ok(Compiled::new(e, &[], &BTreeMap::new())?.eval(&[]))
}

/// Eigenvalues of a symmetric `A₀`, exact where the characteristic
/// polynomial splits into rational roots and one quadratic.
pub fn cahen_wallach_normal_form(a0: &QMatrix) -> Result<NormalForm> {
    let k = a0.len();
    if a0.iter().any(|r| r.len() != k) {
        return Err(PlaneWaveError::Shape("A₀ must be square".into()));
    }
    for i in 0..k {
        for j in 0..i {
            if a0[i][j] != a0[j][i] {
                return Err(PlaneWaveError::NotSymmetric(i, j));
            }
        }
    }
    let p = linalg::characteristic_polynomial(a0);
    let mut rest = p.clone();
    let mut exact: Vec<Expr> = Vec::new();
    for r in linalg::rational_roots(&p) {
        let lin = linalg::Poly::linear(&r);
        loop {
            let (q, rem) = rest.divrem(&lin);
            if rem.degree().is_some() {
                break;
            }
            rest = q;
            exact.push(Expr::rational(r.clone()));
        }
    }
    if rest.degree() == Some(2) {
        let (c0, c1, c2) = (&rest.0[0], &rest.0[1], &rest.0[2]);
        let half = -c1 / (qi(2) * c2);
        let disc = (c1 * c1 - qi(4) * c2 * c0) / (qi(4) * c2 * c2);
        if !disc.is_negative() {
            let root = Expr::rational(disc).sqrt()?;
            let h = Expr::rational(half);
            exact.push(h.add(&root));
            exact.push(h.sub(&root));
            rest = linalg::Poly::one();
        }
    }
    let mut out: Vec<Eigenvalue> = exact
        .iter()
        .map(|e| {
            Ok(Eigenvalue {
                value: numeric_value(e)?,
                exact: Some(e.clone()),
            })
        })
        .collect::<Result<_>>()?;
    let mut max_residual: f64 = 0.0;
    if rest.degree().unwrap_or(0) > 0 {
        let m = nalgebra::DMatrix::from_fn(k, k, |i, j| a0[i][j].to_f64().unwrap_or(f64::NAN));
        let scale = m.norm().max(1.0);
        let mut numeric: Vec<f64> = nalgebra::SymmetricEigen::new(m.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        for e in &out {
            if let Some(pos) = numeric
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - e.value).abs().total_cmp(&(b.1 - e.value).abs()))
                .map(|(i, _)| i)
            {
                numeric.remove(pos);
            }
        }
        for lam in numeric {
            let shifted = &m - nalgebra::DMatrix::identity(k, k) * lam;
            let smin = shifted
                .singular_values()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            max_residual = max_residual.max(smin / scale);
            out.push(Eigenvalue {
                value: lam,
                exact: None,
            });
        }
    }
    out.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(NormalForm {
        eigenvalues: out,
        max_residual,
    })
}

/// Outcome of matching a Rosen profile against the dictionary.
#[derive(Clone, Debug)]
pub enum Recognition {
    /// `C` constant along `u`.
    Flat,
    /// `C = s·u^{2p}·Id`: the singular class with `f = 0` and
    /// `A₀ = p(p − 1)`, homogeneous under `−u∂_u + v∂_v + p yⁱ∂_{yⁱ}`.
    PowerLaw {
        p: Expr,
        scale: Expr,
        a0: Expr,
        killing: VectorField,
        killing_verified: Truth,
        data: Option<PlaneWaveData>,
    },
    /// Diagonal `C = E_i²` with `E_i''/E_i = A_i` constant: the smooth class
    /// with `f = 0`, a Cahen–Wallach space.
    CahenWallach {
        a: Vec<Expr>,
        data: Option<PlaneWaveData>,
    },
    /// Diagonal `C = E_i²` with `u² E_i''/E_i = κ_i` constant: the singular
    /// class with `f = 0` and `A₀ = diag(κ_i)`.
    SingularDiagonal {
        a0: Vec<Expr>,
        data: Option<PlaneWaveData>,
    },
    Unrecognized(String),
}

impl Recognition {
    pub fn label(&self) -> &'static str {
        match self {
            Recognition::Flat => "flat",
            Recognition::PowerLaw { .. } => "singular power-law",
            Recognition::CahenWallach { .. } => "smooth (Cahen-Wallach)",
            Recognition::SingularDiagonal { .. } => "singular diagonal",
            Recognition::Unrecognized(_) => "unrecognized",
        }
    }

    pub fn data(&self) -> Option<&PlaneWaveData> {
        match self {
            Recognition::PowerLaw { data, .. }
            | Recognition::CahenWallach { a: _, data }
            | Recognition::SingularDiagonal { a0: _, data } => data.as_ref(),
            _ => None,
        }
    }
}

fn holds(e: &Expr) -> bool {
    e.is_zero() || expr::is_zero(e).holds()
}

fn free_of(e: &Expr, coords: &[String]) -> bool {
    let s = e.simplify();
    if coords.iter().all(|c| !s.depends_on(c)) {
        return true;
    }
    coords.iter().all(|c| holds(&s.diff(c)))
}

fn diagonal_data(values: &[Expr], class: PlaneWaveClass) -> Option<PlaneWaveData> {
    let qs: Option<Vec<Q>> = values.iter().map(|v| v.simplify().as_rational()).collect();
    let qs = qs?;
    let k = qs.len();
    let mut a0 = vec![vec![Q::zero(); k]; k];
    for (i, q) in qs.into_iter().enumerate() {
        a0[i][i] = q;
    }
    PlaneWaveData::new(a0, vec![vec![Q::zero(); k]; k], class).ok()
}

/// Matches `C_ij(u)` of a Rosen plane wave against
/// {constant, `s·u^{2p}·Id`, diagonal `E_i²` with constant `E''/E` or
/// constant `u²E''/E`}. Anything else is reported as unrecognized.
pub fn recognize_profile(a: &AdaptedMetric) -> Result<Recognition> {
    let m = &a.model;
    let coords = &m.coords;
    let u = coords[a.u].clone();
    let others: Vec<String> = coords.iter().filter(|c| **c != u).cloned().collect();
    if !holds(&a.alpha) || !a.beta.iter().all(holds) {
        return Ok(Recognition::Unrecognized(
            "not a Rosen plane wave: g_vv or g_vy is nonzero".into(),
        ));
    }
    if a.c.iter().flatten().any(|c| !free_of(c, &others)) {
        return Ok(Recognition::Unrecognized(
            "C depends on coordinates other than u".into(),
        ));
    }
    let k = a.ys.len();
    if a.c
        .iter()
        .flatten()
        .all(|c| free_of(c, std::slice::from_ref(&u)))
    {
        return Ok(Recognition::Flat);
    }
    let diagonal = (0..k).all(|i| (0..k).all(|j| i == j || holds(&a.c[i][j])));
    if !diagonal {
        return Ok(Recognition::Unrecognized("C is not diagonal".into()));
    }
    let uq = Expr::sym(&u);
    let phi = a.c[0][0].clone();
    if (1..k).all(|i| expr::equal(&a.c[i][i], &phi).holds()) {
        let two_p = uq.mul(&phi.diff(&u)).div(&phi)?.simplify();
        if free_of(&two_p, coords) {
            let p = two_p.scale(&Q::new(1.into(), 2.into())).simplify();
            let scale = phi.div(&uq.pow(&two_p)?)?.simplify();
            let a0 = p.mul(&p.sub(&Expr::one()));
            let n = m.dim();
            let mut comps = vec![Expr::zero(); n];
            comps[a.u] = uq.neg();
            comps[a.v] = Expr::sym(&coords[a.v]);
            for &y in &a.ys {
                comps[y] = p.mul(&Expr::sym(&coords[y]));
            }
            let killing = VectorField::new(comps);
            let killing_verified = tensor::is_killing(m, &killing)?;
            let data = diagonal_data(&vec![a0.clone(); k], PlaneWaveClass::Singular);
            return Ok(Recognition::PowerLaw {
                p,
                scale,
                a0,
                killing,
                killing_verified,
                data,
            });
        }
    }
    let mut ratios = Vec::with_capacity(k);
    for i in 0..k {
        let e = a.c[i][i].sqrt()?;
        ratios.push(e.diff(&u).diff(&u).div(&e)?.simplify());
    }
    if ratios.iter().all(|r| free_of(r, coords)) {
        let data = diagonal_data(&ratios, PlaneWaveClass::Smooth);
        return Ok(Recognition::CahenWallach { a: ratios, data });
    }
    let u2 = uq.powi(2)?;
    let scaled: Vec<Expr> = ratios.iter().map(|r| r.mul(&u2).simplify()).collect();
    if scaled.iter().all(|r| free_of(r, coords)) {
        let data = diagonal_data(&scaled, PlaneWaveClass::Singular);
        return Ok(Recognition::SingularDiagonal { a0: scaled, data });
    }
    Ok(Recognition::Unrecognized(
        "profile is outside the dictionary".into(),
    ))
}
