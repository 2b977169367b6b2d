//! Compiled numerics: geodesics, Killing transport and the transport-based
//! homogeneity test.
//!
//! Killing transport along a curve with velocity `X` moves a pair `(ζ, A)`,
//! with `A = −∇ζ` for a Killing field, by
//!
//! ```text
//! dζ^μ/dt     = −Γ^μ_{αβ} X^α ζ^β − A^μ_α X^α
//! dA^μ_ν/dt   = −Γ^μ_{αβ} X^α A^β_ν + Γ^β_{αν} X^α A^μ_β − R^μ_{ναβ} X^α ζ^β
//! ```
//!
//! integrated jointly with the geodesic by fixed-step RK4.

use super::{covariant_derivative, CurvaturePack, MetricModel, Result, TensorError, VectorField};
use crate::expr::Compiled;
use nalgebra::{DMatrix, DVector};

/// Sparse list of compiled components of a dense tensor.
#[derive(Clone, Debug)]
struct CTensor {
    len: usize,
    entries: Vec<(usize, Compiled)>,
}

impl CTensor {
    fn build<'a>(
        items: impl IntoIterator<Item = &'a crate::expr::Expr>,
        m: &MetricModel,
    ) -> Result<CTensor> {
        let consts = m.numeric_consts();
        let mut entries = Vec::new();
        let mut len = 0;
        for (i, e) in items.into_iter().enumerate() {
            len = i + 1;
            if !e.is_zero() {
                entries.push((i, Compiled::new(e, &m.coords, &consts)?));
            }
        }
        Ok(CTensor { len, entries })
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        for (i, c) in &self.entries {
            out[*i] = c.eval(x);
        }
        out
    }
}

/// A metric and its curvature compiled for `f64` evaluation.
#[derive(Clone, Debug)]
pub struct NumericGeometry {
    pub dim: usize,
    g: CTensor,
    gamma: CTensor,
    riemann: CTensor,
    nabla_riemann: Option<CTensor>,
}

impl NumericGeometry {
    pub fn new(m: &MetricModel, pack: &CurvaturePack) -> Result<NumericGeometry> {
        let g = CTensor::build(m.g.iter().flatten(), m)?;
        let gamma = CTensor::build(pack.christoffel.iter().flatten().flatten(), m)?;
        let riemann = CTensor::build(pack.riemann.iter().flatten().flatten().flatten(), m)?;
        let nabla_riemann = match &pack.nabla_riemann {
            Some(nr) => Some(CTensor::build(
                nr.iter().flatten().flatten().flatten().flatten(),
                m,
            )?),
            None => None,
        };
        Ok(NumericGeometry {
            dim: m.dim(),
            g,
            gamma,
            riemann,
            nabla_riemann,
        })
    }

    pub fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.g.eval(x))
    }

    /// `Γ^λ_{μν}` flattened as `[λ][μ][ν]`.
    pub fn christoffel(&self, x: &[f64]) -> Vec<f64> {
        self.gamma.eval(x)
    }

    /// `R^ρ_{σμν}` flattened as `[ρ][σ][μ][ν]`.
    pub fn riemann(&self, x: &[f64]) -> Vec<f64> {
        self.riemann.eval(x)
    }
}

/// Initial data and resolution of a numeric geodesic.
#[derive(Clone, Debug)]
pub struct GeodesicSpec {
    pub x0: Vec<f64>,
    pub v0: Vec<f64>,
    pub length: f64,
    /// Total RK4 steps over `length`.
    pub steps: usize,
}

impl GeodesicSpec {
    /// Default resolution of 10⁴ steps per unit parameter length.
    pub fn new(x0: Vec<f64>, v0: Vec<f64>, length: f64) -> GeodesicSpec {
        let steps = ((length.abs() * 1e4).ceil() as usize).max(1);
        GeodesicSpec {
            x0,
            v0,
            length,
            steps,
        }
    }

    pub fn with_steps(mut self, steps: usize) -> GeodesicSpec {
        self.steps = steps.max(1);
        self
    }
}

/// The pair `(ζ, A)` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportState {
    pub zeta: DVector<f64>,
    pub a: DMatrix<f64>,
}

impl TransportState {
    pub fn new(zeta: DVector<f64>, a: DMatrix<f64>) -> TransportState {
        TransportState { zeta, a }
    }

    /// `|gA + (gA)^T|_max`, zero when `A` is skew with respect to `g`.
    pub fn skew_defect(&self, g: &DMatrix<f64>) -> f64 {
        let ga = g * &self.a;
        (&ga + ga.transpose()).amax()
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub xs: Vec<Vec<f64>>,
    pub vs: Vec<Vec<f64>>,
}

#[derive(Clone, Debug)]
pub struct TransportRun {
    pub curve: Trajectory,
    /// `states[k][b]`: member `b` of the batch at sample `k`.
    pub states: Vec<Vec<TransportState>>,
}

fn rhs(geo: &NumericGeometry, y: &[f64], batch: usize) -> Vec<f64> {
    let n = geo.dim;
    let x = &y[..n];
    let v = &y[n..2 * n];
    let gam = geo.gamma.eval(x);
    let riem = if batch > 0 {
        geo.riemann.eval(x)
    } else {
        Vec::new()
    };
    let g3 = |l: usize, m: usize, k: usize| gam[(l * n + m) * n + k];
    let mut out = vec![0.0; y.len()];
    out[..n].copy_from_slice(v);
    // Γ^μ_{αβ} v^α, reused below
    let mut gv = vec![0.0; n * n];
    for mu in 0..n {
        for b in 0..n {
            let mut s = 0.0;
            for a in 0..n {
                s += g3(mu, a, b) * v[a];
            }
            gv[mu * n + b] = s;
        }
    }
    for mu in 0..n {
        let mut s = 0.0;
        for b in 0..n {
            s += gv[mu * n + b] * v[b];
        }
        out[n + mu] = -s;
    }
    // R^μ_{ναβ} v^α as rv[μ][ν][β]
    let mut rv = vec![0.0; if batch > 0 { n * n * n } else { 0 }];
    if batch > 0 {
        for mu in 0..n {
            for nu in 0..n {
                for b in 0..n {
                    let mut s = 0.0;
                    for a in 0..n {
                        s += riem[((mu * n + nu) * n + a) * n + b] * v[a];
                    }
                    rv[(mu * n + nu) * n + b] = s;
                }
            }
        }
    }
    let block = n + n * n;
    for k in 0..batch {
        let off = 2 * n + k * block;
        let z = &y[off..off + n];
        let am = &y[off + n..off + block];
        for mu in 0..n {
            let mut s = 0.0;
            for b in 0..n {
                s -= gv[mu * n + b] * z[b];
                s -= am[mu * n + b] * v[b];
            }
            out[off + mu] = s;
        }
        for mu in 0..n {
            for nu in 0..n {
                let mut s = 0.0;
                for b in 0..n {
                    s -= gv[mu * n + b] * am[b * n + nu];
                    s += gv[b * n + nu] * am[mu * n + b];
                    s -= rv[(mu * n + nu) * n + b] * z[b];
                }
                out[off + n + mu * n + nu] = s;
            }
        }
    }
    out
}

fn axpy(y: &[f64], h: f64, k: &[f64]) -> Vec<f64> {
    y.iter().zip(k).map(|(a, b)| a + h * b).collect()
}

/// Integrates the joint system, recording `samples + 1` equally spaced
/// states (including the start).
fn integrate(
    geo: &NumericGeometry,
    spec: &GeodesicSpec,
    inits: &[TransportState],
    samples: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = geo.dim;
    if spec.x0.len() != n || spec.v0.len() != n {
        return Err(TensorError::Shape(format!(
            "initial point and velocity need {n} components"
        )));
    }
    let samples = samples.max(1);
    let per = spec.steps.div_ceil(samples).max(1);
    let total = per * samples;
    let h = spec.length / total as f64;
    let mut y: Vec<f64> = spec.x0.iter().chain(&spec.v0).copied().collect();
    for s in inits {
        y.extend(s.zeta.iter());
        for mu in 0..n {
            for nu in 0..n {
                y.push(s.a[(mu, nu)]);
            }
        }
    }
    let batch = inits.len();
    let mut ts = vec![0.0];
    let mut ys = vec![y.clone()];
    for step in 1..=total {
        let k1 = rhs(geo, &y, batch);
        let k2 = rhs(geo, &axpy(&y, h / 2.0, &k1), batch);
        let k3 = rhs(geo, &axpy(&y, h / 2.0, &k2), batch);
        let k4 = rhs(geo, &axpy(&y, h, &k3), batch);
        for i in 0..y.len() {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t = step as f64 * h;
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            let what = if i < n {
                format!("position component {i} (near a metric singularity?)")
            } else {
                format!("state component {i}")
            };
            return Err(TensorError::NonFinite { t, what });
        }
        if step % per == 0 {
            ts.push(t);
            ys.push(y.clone());
        }
    }
    Ok((ts, ys))
}

fn unpack(n: usize, y: &[f64], batch: usize) -> (Vec<f64>, Vec<f64>, Vec<TransportState>) {
    let x = y[..n].to_vec();
    let v = y[n..2 * n].to_vec();
    let block = n + n * n;
    let states = (0..batch)
        .map(|k| {
            let off = 2 * n + k * block;
            TransportState {
                zeta: DVector::from_column_slice(&y[off..off + n]),
                a: DMatrix::from_row_slice(n, n, &y[off + n..off + block]),
            }
        })
        .collect();
    (x, v, states)
}

/// Numeric geodesic sampled at `samples + 1` equally spaced parameters.
pub fn geodesic(geo: &NumericGeometry, spec: &GeodesicSpec, samples: usize) -> Result<Trajectory> {
    Ok(transport_batch(geo, spec, &[], samples)?.curve)
}

/// Transports several initial states along one geodesic.
pub fn transport_batch(
    geo: &NumericGeometry,
    spec: &GeodesicSpec,
    inits: &[TransportState],
    samples: usize,
) -> Result<TransportRun> {
    let n = geo.dim;
    let (ts, ys) = integrate(geo, spec, inits, samples)?;
    let mut curve = Trajectory {
        ts,
        xs: Vec::new(),
        vs: Vec::new(),
    };
    let mut states = Vec::new();
    for y in &ys {
        let (x, v, s) = unpack(n, y, inits.len());
        curve.xs.push(x);
        curve.vs.push(v);
        states.push(s);
    }
    Ok(TransportRun { curve, states })
}

/// Transports `init` to the end of the geodesic.
pub fn killing_transport(
    geo: &NumericGeometry,
    spec: &GeodesicSpec,
    init: &TransportState,
) -> Result<TransportState> {
    let g0 = geo.metric(&spec.x0);
    let scale = 1.0 + g0.amax() * init.a.amax();
    if init.skew_defect(&g0) > 1e-9 * scale {
        return Err(TensorError::Numeric(format!(
            "initial A is not skew with respect to g (defect {:e})",
            init.skew_defect(&g0)
        )));
    }
    let run = transport_batch(geo, spec, std::slice::from_ref(init), 1)?;
    Ok(run.states.last().unwrap()[0].clone())
}

/// `(X(p), −∇X(p))` for a vector field `X`.
pub fn killing_initial_state(
    m: &MetricModel,
    pack: &CurvaturePack,
    x: &VectorField,
    point: &[f64],
) -> Result<TransportState> {
    let n = m.dim();
    let consts = m.numeric_consts();
    let nabla = covariant_derivative(&m.coords, &pack.christoffel, x);
    let mut zeta = DVector::zeros(n);
    let mut a = DMatrix::zeros(n, n);
    for mu in 0..n {
        zeta[mu] = Compiled::new(&x.comps[mu], &m.coords, &consts)?.eval(point);
        for nu in 0..n {
            a[(mu, nu)] = -Compiled::new(&nabla[mu][nu], &m.coords, &consts)?.eval(point);
        }
    }
    Ok(TransportState { zeta, a })
}

/// Ratio `e(N)/e(2N)` of final-state errors against a `4N` reference; about
/// 16 for a fourth-order scheme.
pub fn convergence_ratio(
    geo: &NumericGeometry,
    spec: &GeodesicSpec,
    init: &TransportState,
) -> Result<f64> {
    let run = |steps: usize| -> Result<Vec<f64>> {
        let s = spec.clone().with_steps(steps);
        let (_, ys) = integrate(geo, &s, std::slice::from_ref(init), 1)?;
        Ok(ys.last().unwrap().clone())
    };
    let a = run(spec.steps)?;
    let b = run(2 * spec.steps)?;
    let c = run(4 * spec.steps)?;
    let err = |p: &[f64]| {
        p.iter()
            .zip(&c)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    Ok(err(&a) / err(&b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible,
    Infeasible,
    Undecided,
}

impl Feasibility {
    pub fn as_str(self) -> &'static str {
        match self {
            Feasibility::Feasible => "feasible",
            Feasibility::Infeasible => "infeasible",
            Feasibility::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug)]
pub struct HomogeneityVerdict {
    pub verdict: Feasibility,
    pub residual: f64,
    pub samples: usize,
    /// Best initial `A` found.
    pub a0: DMatrix<f64>,
}

pub const HOMOGENEITY_SAMPLES: usize = 32;
pub const FEASIBLE_BELOW: f64 = 1e-9;
pub const INFEASIBLE_ABOVE: f64 = 1e-6;

/// Decides whether some Killing-transported pair starting at
/// `(γ′(0), A₀)` stays tangent to the geodesic and satisfies the
/// integrability condition `L_ζ R = 0` at 32 samples along it.
///
/// The unknowns are the coordinates of `A₀` in the basis `g⁻¹W` of
/// `so(g)` (`W` elementary skew matrices); the conditions are linear in
/// them, so the problem is a linear least-squares fit.
pub fn homogeneous_geodesic_test_transport(
    geo: &NumericGeometry,
    spec: &GeodesicSpec,
) -> Result<HomogeneityVerdict> {
    let n = geo.dim;
    let Some(nrt) = &geo.nabla_riemann else {
        return Err(TensorError::Numeric(
            "covariant Riemann tensor was not computed".into(),
        ));
    };
    let g0 = geo.metric(&spec.x0);
    let ginv = g0
        .clone()
        .try_inverse()
        .ok_or_else(|| TensorError::Degenerate(g0.determinant().abs()))?;
    let mut inits = vec![TransportState::new(
        DVector::from_column_slice(&spec.v0),
        DMatrix::zeros(n, n),
    )];
    let mut basis = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut w = DMatrix::zeros(n, n);
            w[(i, j)] = 1.0;
            w[(j, i)] = -1.0;
            let a = &ginv * w;
            basis.push(a.clone());
            inits.push(TransportState::new(DVector::zeros(n), a));
        }
    }
    let run = transport_batch(geo, spec, &inits, HOMOGENEITY_SAMPLES)?;
    let conds = |k: usize, s: &TransportState| -> Vec<f64> {
        let x = &run.curve.xs[k];
        let v = &run.curve.vs[k];
        let r = geo.riemann.eval(x);
        let nr = nrt.eval(x);
        let z = &s.zeta;
        let a = &s.a;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                out.push(z[i] * v[j] - z[j] * v[i]);
            }
        }
        let r4 = |a_: usize, b: usize, c: usize, d: usize| r[((a_ * n + b) * n + c) * n + d];
        for p in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in c + 1..n {
                        let mut t = 0.0;
                        for e in 0..n {
                            t += nr[(((p * n + b) * n + c) * n + d) * n + e] * z[e];
                            t += a[(p, e)] * r4(e, b, c, d);
                            t -= r4(p, e, c, d) * a[(e, b)];
                            t -= r4(p, b, e, d) * a[(e, c)];
                            t -= r4(p, b, c, e) * a[(e, d)];
                        }
                        out.push(t);
                    }
                }
            }
        }
        out
    };
    let mut rhs_v = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); basis.len()];
    for k in 1..run.states.len() {
        rhs_v.extend(conds(k, &run.states[k][0]).into_iter().map(|c| -c));
        for (b, col) in cols.iter_mut().enumerate() {
            col.extend(conds(k, &run.states[k][b + 1]));
        }
    }
    let rows = rhs_v.len();
    let m = DMatrix::from_fn(rows, basis.len(), |i, j| cols[j][i]);
    let rhs_d = DVector::from_vec(rhs_v);
    let (coef, residual) = if basis.is_empty() {
        (DVector::zeros(0), rhs_d.norm())
    } else {
        let svd = m.clone().svd(true, true);
        let coef = svd
            .solve(&rhs_d, 1e-12)
            .map_err(|e| TensorError::Numeric(format!("least squares failed: {e}")))?;
        let residual = (&m * &coef - &rhs_d).norm();
        (coef, residual)
    };
    let mut a0 = DMatrix::zeros(n, n);
    for (c, b) in coef.iter().zip(&basis) {
        a0 += b * *c;
    }
    let verdict = if residual < FEASIBLE_BELOW {
        Feasibility::Feasible
    } else if residual > INFEASIBLE_ABOVE {
        Feasibility::Infeasible
    } else {
        Feasibility::Undecided
    };
    Ok(HomogeneityVerdict {
        verdict,
        residual,
        samples: HOMOGENEITY_SAMPLES,
        a0,
    })
}
