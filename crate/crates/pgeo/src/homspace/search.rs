use super::geodesic::{
    canonical_geodesic_test, geodesic_vector_test, CanonicalReport, GeodesicOutcome,
    GeodesicVectorResult,
};
use super::{zero_truth, HomError, LieAlgebraModel, Result};
use crate::expr::{Compiled, Expr, Q};
use crate::linalg;
use crate::tensor::Truth;
use nalgebra::{DMatrix, DVector};
use num::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Coefficients of `v` over linearly independent `gens`, if `v` lies in
/// their span.
fn solve_in_span(gens: &[Vec<Expr>], v: &[Expr]) -> Option<Vec<Expr>> {
    let n = v.len();
    let k = gens.len();
    let a: Vec<Vec<Expr>> = (0..n)
        .map(|r| {
            gens.iter()
                .map(|g| g[r].clone())
                .chain(std::iter::once(v[r].clone()))
                .collect()
        })
        .collect();
    let ns = linalg::s_nullspace(&a, k + 1);
    let w = ns.into_iter().find(|w| zero_truth(&w[k]) == Truth::False)?;
    let inv = Expr::one().div(&w[k]).ok()?.neg();
    let coef: Vec<Expr> = w[..k].iter().map(|c| c.mul(&inv)).collect();
    let ok = (0..n).all(|r| {
        let s = gens
            .iter()
            .zip(&coef)
            .fold(Expr::zero(), |acc, (g, c)| acc.add(&g[r].mul(c)));
        zero_truth(&s.sub(&v[r])).holds()
    });
    ok.then_some(coef)
}

fn rank(vectors: &[Vec<Expr>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut a = vectors.to_vec();
    linalg::s_rref(&mut a).len()
}

/// The subalgebra spanned by `gens` as a model with trivial isotropy; it
/// must close under brackets and project onto the complement bijectively.
pub fn transitive_subalgebra(
    m: &LieAlgebraModel,
    gens: &[Vec<Expr>],
    names: &[&str],
) -> Result<LieAlgebraModel> {
    let k = m.m_dim();
    if gens.len() != k || names.len() != k {
        return Err(HomError::Shape(format!(
            "a transitive subalgebra with trivial isotropy needs {k} generators"
        )));
    }
    let proj: Vec<Vec<Expr>> = gens.iter().map(|g| m.m_part(g)).collect();
    if rank(&proj) != k {
        return Err(HomError::Shape(
            "generators do not project onto the complement".into(),
        ));
    }
    let mut sub = LieAlgebraModel::new(&format!("{} subalgebra", m.name), names, &[])?;
    sub.values = m.values.clone();
    for i in 0..k {
        for j in i + 1..k {
            let br = m.bracket(&gens[i], &gens[j]);
            let coef = solve_in_span(gens, &br).ok_or_else(|| {
                HomError::Shape(format!("[{},{}] leaves the span", names[i], names[j]))
            })?;
            sub.set_bracket_vec(i, j, coef)?;
        }
    }
    for i in 0..k {
        for j in 0..k {
            sub.form[i][j] = m.b(&proj[i], &proj[j]);
        }
    }
    Ok(sub)
}

#[derive(Clone, Debug)]
pub struct SubalgebraCandidate {
    /// Basis names joined to `X`.
    pub generators: Vec<String>,
    pub model: LieAlgebraModel,
    pub report: CanonicalReport,
}

/// Transitive subalgebras spanned by `X` and basis elements of `𝔤`, in which
/// `X` becomes a complement element; no completeness claim beyond this
/// finite family.
pub fn subalgebra_search(
    m: &LieAlgebraModel,
    x: &[Expr],
    x_name: &str,
) -> Result<Vec<SubalgebraCandidate>> {
    let n = m.dim();
    let k = m.m_dim();
    if k == 0 || n < k - 1 {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for subset in combinations(n, k - 1) {
        let mut gens = vec![x.to_vec()];
        gens.extend(subset.iter().map(|&i| m.e(i)));
        let mut names = vec![x_name];
        names.extend(subset.iter().map(|&i| m.basis[i].as_str()));
        if rank(&gens) != k {
            continue;
        }
        let Ok(sub) = transitive_subalgebra(m, &gens, &names) else {
            continue;
        };
        let mut xs = vec![Expr::zero(); k];
        xs[0] = Expr::one();
        if let Ok(report) = canonical_geodesic_test(&sub, &xs) {
            out.push(SubalgebraCandidate {
                generators: names.iter().map(|s| s.to_string()).collect(),
                model: sub,
                report,
            });
        }
    }
    Ok(out)
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, r, cur, out);
            cur.pop();
        }
    }
    rec(0, n, r, &mut cur, &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub require_absolute: bool,
    pub starts: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Largest number of distinct hits kept.
    pub max_hits: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            require_absolute: false,
            starts: 10_000,
            seed: 0,
            tolerance: 1e-10,
            max_iterations: 60,
            max_hits: 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchHit {
    /// Normalised so the 𝔪-part has unit euclidean length.
    pub x: Vec<f64>,
    pub lambda: f64,
    pub residual: f64,
    /// Symbolically verified rationalisation, when one was found.
    pub exact: Option<GeodesicVectorResult>,
}

#[derive(Clone, Debug)]
pub struct SearchReport {
    pub options: SearchOptions,
    pub converged: usize,
    pub hits: Vec<SearchHit>,
}

/// Quadratic residual system for null geodesic vectors.
struct System {
    n: usize,
    /// `r_z = xᵀ Q_z x − λ (W x)_z`.
    q: Vec<DMatrix<f64>>,
    w: DMatrix<f64>,
    mask: Vec<bool>,
    absolute: bool,
}

impl System {
    fn new(m: &LieAlgebraModel, absolute: bool) -> Result<System> {
        let n = m.dim();
        let consts = m.numeric_constants();
        let num = |e: &Expr| -> Result<f64> {
            if let Some(q) = e.as_rational() {
                return Ok(num::ToPrimitive::to_f64(&q).unwrap_or(f64::NAN));
            }
            Ok(Compiled::new(e, &[], &consts)?.eval(&[]))
        };
        let mut w = DMatrix::zeros(n, n);
        let mut mask = vec![false; n];
        for (p, &i) in m.complement.iter().enumerate() {
            mask[i] = true;
            for (q, &j) in m.complement.iter().enumerate() {
                w[(i, j)] = num(&m.form[p][q])?;
            }
        }
        let mut cs = vec![vec![vec![0.0; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    if !m.c[i][j][l].is_zero() {
                        cs[i][j][l] = num(&m.c[i][j][l])?;
                    }
                }
            }
        }
        let q = (0..n)
            .map(|z| {
                DMatrix::from_fn(n, n, |a, i| {
                    (0..n).map(|b| w[(a, b)] * cs[i][z][b]).sum::<f64>()
                })
            })
            .collect();
        Ok(System {
            n,
            q,
            w,
            mask,
            absolute,
        })
    }

    fn unknowns(&self) -> usize {
        self.n + usize::from(!self.absolute)
    }

    fn split(&self, p: &DVector<f64>) -> (DVector<f64>, f64) {
        let x = p.rows(0, self.n).into_owned();
        let l = if self.absolute { 0.0 } else { p[self.n] };
        (x, l)
    }

    fn residual(&self, p: &DVector<f64>) -> DVector<f64> {
        let (x, l) = self.split(p);
        let wx = &self.w * &x;
        let mut r = DVector::zeros(self.n + 2);
        for z in 0..self.n {
            r[z] = x.dot(&(&self.q[z] * &x)) - l * wx[z];
        }
        r[self.n] = x.dot(&wx);
        let norm: f64 = (0..self.n)
            .filter(|&i| self.mask[i])
            .map(|i| x[i] * x[i])
            .sum();
        r[self.n + 1] = norm - 1.0;
        r
    }

    fn jacobian(&self, p: &DVector<f64>) -> DMatrix<f64> {
        let (x, l) = self.split(p);
        let wx = &self.w * &x;
        let mut j = DMatrix::zeros(self.n + 2, self.unknowns());
        for z in 0..self.n {
            let g = (&self.q[z] + self.q[z].transpose()) * &x - self.w.row(z).transpose() * l;
            j.view_mut((z, 0), (1, self.n)).copy_from(&g.transpose());
            if !self.absolute {
                j[(z, self.n)] = -wx[z];
            }
        }
        let g = &wx * 2.0;
        j.view_mut((self.n, 0), (1, self.n))
            .copy_from(&g.transpose());
        for i in 0..self.n {
            if self.mask[i] {
                j[(self.n + 1, i)] = 2.0 * x[i];
            }
        }
        j
    }

    fn solve(&self, mut p: DVector<f64>, opts: &SearchOptions) -> (DVector<f64>, f64) {
        let mut r = self.residual(&p);
        let mut cost = r.norm_squared();
        let mut mu = 1e-3;
        for _ in 0..opts.max_iterations {
            if cost.sqrt() < opts.tolerance * 1e-2 {
                break;
            }
            let j = self.jacobian(&p);
            let jt = j.transpose();
            let jtj = &jt * &j;
            let g = &jt * &r;
            let mut improved = false;
            for _ in 0..8 {
                let mut a = jtj.clone();
                for d in 0..a.nrows() {
                    a[(d, d)] += mu * (1.0 + jtj[(d, d)]);
                }
                let Some(step) = a.lu().solve(&(-&g)) else {
                    mu *= 10.0;
                    continue;
                };
                let cand = &p + &step;
                let rc = self.residual(&cand);
                let cc = rc.norm_squared();
                if cc < cost {
                    p = cand;
                    r = rc;
                    cost = cc;
                    mu = (mu * 0.3).max(1e-15);
                    improved = true;
                    break;
                }
                mu *= 10.0;
            }
            if !improved {
                break;
            }
        }
        (p, r.amax())
    }
}

/// Multi-start Levenberg–Marquardt search for null geodesic vectors
/// (optionally with `λ = 0`); hits are deduplicated projectively and
/// rationalised where possible.
pub fn find_null_geodesic_vectors(
    m: &LieAlgebraModel,
    opts: &SearchOptions,
) -> Result<SearchReport> {
    if m.dim() > linalg::MAX_SYMBOLIC_DIM {
        return Err(HomError::Linalg(linalg::LinalgError::TooLarge(m.dim())));
    }
    let sys = System::new(m, opts.require_absolute)?;
    let n = sys.n;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut hits: Vec<SearchHit> = Vec::new();
    let mut converged = 0;
    for _ in 0..opts.starts {
        let mut p = DVector::from_fn(sys.unknowns(), |_, _| rng.gen_range(-1.0..1.0));
        if !opts.require_absolute {
            p[n] *= 2.0;
        }
        let (p, res) = sys.solve(p, opts);
        if res.is_nan() || res >= opts.tolerance {
            continue;
        }
        converged += 1;
        let (mut x, mut l) = sys.split(&p);
        let norm = (0..n)
            .filter(|&i| sys.mask[i])
            .map(|i| x[i] * x[i])
            .sum::<f64>()
            .sqrt();
        x /= norm;
        l /= norm;
        if let Some(i) = (0..n).find(|&i| sys.mask[i] && x[i].abs() > 1e-6) {
            if x[i] < 0.0 {
                x = -x;
                l = -l;
            }
        }
        let xs: Vec<f64> = x.iter().copied().collect();
        let dup = hits.iter().any(|h| {
            h.x.iter().zip(&xs).all(|(a, b)| (a - b).abs() < 1e-6) && (h.lambda - l).abs() < 1e-6
        });
        if dup || hits.len() >= opts.max_hits {
            continue;
        }
        let exact = rationalize(m, &xs);
        hits.push(SearchHit {
            x: xs,
            lambda: l,
            residual: res,
            exact,
        });
    }
    Ok(SearchReport {
        options: opts.clone(),
        converged,
        hits,
    })
}

const RADICANDS: [i64; 9] = [1, 2, 3, 5, 6, 7, 10, 15, 30];

fn approx_rational(v: f64, max_den: i64) -> Option<Q> {
    for d in 1..=max_den {
        let n = (v * d as f64).round();
        if (n / d as f64 - v).abs() < 1e-9 {
            return Some(Q::new(BigInt::from(n as i64), BigInt::from(d)));
        }
    }
    None
}

fn approx_radical(v: f64) -> Option<Expr> {
    if v.abs() < 1e-9 {
        return Some(Expr::zero());
    }
    for r in RADICANDS {
        let s = (r as f64).sqrt();
        if let Some(q) = approx_rational(v / s, 24) {
            let base = Expr::int(r).sqrt().ok()?;
            return Some(base.scale(&q));
        }
    }
    None
}

/// Scales so the largest 𝔪-coefficient is one, snaps every coefficient to
/// `q·√r` (or, failing that, to the nearest eighth) and keeps the result
/// only if it verifies symbolically.
fn rationalize(m: &LieAlgebraModel, x: &[f64]) -> Option<GeodesicVectorResult> {
    let big =
        m.complement
            .iter()
            .map(|&i| x[i])
            .fold(0.0_f64, |a, b| if b.abs() > a.abs() { b } else { a });
    if big == 0.0 {
        return None;
    }
    let coeffs: Vec<Expr> = x
        .iter()
        .map(|v| {
            let v = v / big.abs();
            approx_radical(v).unwrap_or_else(|| {
                Expr::rational(Q::new(
                    BigInt::from((v * 8.0).round() as i64),
                    BigInt::from(8),
                ))
            })
        })
        .collect();
    if m.m_part(&coeffs).iter().all(Expr::is_zero) {
        return None;
    }
    match geodesic_vector_test(m, &coeffs).ok()? {
        GeodesicOutcome::Geodesic(r) if r.is_null.holds() => Some(r),
        _ => None,
    }
}
