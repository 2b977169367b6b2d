//! Symbolic matrices over [`Expr`] and exact linear algebra over the
//! rationals, including closed-form matrix exponentials.

use crate::expr::{Expr, Q};
use num::{BigInt, One, Signed, Zero};
use std::collections::HashMap;
use thiserror::Error;

pub type SMatrix = Vec<Vec<Expr>>;
pub type QMatrix = Vec<Vec<Q>>;

/// Largest dimension accepted for symbolic inversion.
pub const MAX_SYMBOLIC_DIM: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("matrix is singular (determinant simplifies to 0)")]
    Singular,
    #[error("dimension {0} exceeds the symbolic limit of {MAX_SYMBOLIC_DIM}")]
    TooLarge(usize),
    #[error("unsupported spectrum: {0}")]
    UnsupportedSpectrum(String),
    #[error("entries are not rational constants: {0}")]
    NotRational(String),
}

pub fn zeros(r: usize, c: usize) -> SMatrix {
    vec![vec![Expr::zero(); c]; r]
}

pub fn identity(n: usize) -> SMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Expr::one();
    }
    m
}

pub fn transpose(a: &SMatrix) -> SMatrix {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len())
        .map(|j| a.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &SMatrix, b: &SMatrix) -> SMatrix {
    let n = a.len();
    let k = b.len();
    let m = if k == 0 { 0 } else { b[0].len() };
    let mut out = zeros(n, m);
    for i in 0..n {
        for l in 0..k {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                if b[l][j].is_zero() {
                    continue;
                }
                out[i][j] = out[i][j].add(&a[i][l].mul(&b[l][j]));
            }
        }
    }
    out
}

pub fn mat_vec(a: &SMatrix, v: &[Expr]) -> Vec<Expr> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .filter(|(x, y)| !x.is_zero() && !y.is_zero())
                .fold(Expr::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
        })
        .collect()
}

fn det_rec(
    a: &SMatrix,
    rows: &[usize],
    cols: &[usize],
    row: usize,
    used: u32,
    memo: &mut HashMap<u32, Expr>,
) -> Expr {
    if row == rows.len() {
        return Expr::one();
    }
    if let Some(v) = memo.get(&used) {
        return v.clone();
    }
    let mut acc = Expr::zero();
    let mut sign_pos = 0;
    for (ci, &c) in cols.iter().enumerate() {
        if used & (1 << ci) != 0 {
            continue;
        }
        let entry = &a[rows[row]][c];
        if !entry.is_zero() {
            let sub = det_rec(a, rows, cols, row + 1, used | (1 << ci), memo);
            if !sub.is_zero() {
                let t = entry.mul(&sub);
                acc = if sign_pos % 2 == 0 {
                    acc.add(&t)
                } else {
                    acc.sub(&t)
                };
            }
        }
        sign_pos += 1;
    }
    memo.insert(used, acc.clone());
    acc
}

fn det_of(a: &SMatrix, rows: &[usize], cols: &[usize]) -> Expr {
    let mut memo = HashMap::new();
    det_rec(a, rows, cols, 0, 0, &mut memo)
}

/// Determinant by memoised Laplace expansion.
pub fn det(a: &SMatrix) -> Expr {
    let idx: Vec<usize> = (0..a.len()).collect();
    det_of(a, &idx, &idx)
}

pub fn adjugate(a: &SMatrix) -> SMatrix {
    let n = a.len();
    let mut out = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let rows: Vec<usize> = (0..n).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..n).filter(|&c| c != i).collect();
            let m = det_of(a, &rows, &cols);
            out[i][j] = if (i + j) % 2 == 0 { m } else { m.neg() };
        }
    }
    out
}

/// Inverse via adjugate over determinant.
pub fn inverse(a: &SMatrix) -> Result<SMatrix, LinalgError> {
    let n = a.len();
    if n > MAX_SYMBOLIC_DIM {
        return Err(LinalgError::TooLarge(n));
    }
    let d = det(a);
    if d.is_zero() {
        return Err(LinalgError::Singular);
    }
    let dinv = d.pow(&Expr::int(-1)).map_err(|_| LinalgError::Singular)?;
    Ok(adjugate(a)
        .into_iter()
        .map(|row| row.into_iter().map(|x| x.mul(&dinv)).collect())
        .collect())
}

fn nonzero_entry(e: &Expr) -> bool {
    !e.is_zero() && !crate::expr::is_zero(e).holds()
}

/// Reduced row echelon form over expressions; a pivot is any entry that
/// does not test equal to zero. Returns the pivot columns.
pub fn s_rref(a: &mut SMatrix) -> Vec<usize> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| nonzero_entry(&a[i][c])) else {
            for row in a.iter_mut().skip(r) {
                row[c] = Expr::zero();
            }
            continue;
        };
        a.swap(r, p);
        let inv = Expr::one().div(&a[r][c]).expect("pivot is nonzero");
        for x in a[r].iter_mut() {
            *x = x.mul(&inv);
        }
        a[r][c] = Expr::one();
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x = x.sub(&f.mul(y));
                }
                a[i][c] = Expr::zero();
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of the right null space over expressions.
pub fn s_nullspace(a: &SMatrix, cols: usize) -> Vec<Vec<Expr>> {
    let mut m = a.clone();
    let pivots = s_rref(&mut m);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![Expr::zero(); cols];
            v[f] = Expr::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = m[r][f].neg();
            }
            v
        })
        .collect()
}

pub fn to_rational(a: &SMatrix) -> Result<QMatrix, LinalgError> {
    a.iter()
        .map(|row| {
            row.iter()
                .map(|x| {
                    x.as_rational()
                        .ok_or_else(|| LinalgError::NotRational(x.to_string()))
                })
                .collect()
        })
        .collect()
}

pub fn from_rational(a: &QMatrix) -> SMatrix {
    a.iter()
        .map(|row| row.iter().map(|q| Expr::rational(q.clone())).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// rational matrices

pub fn q_identity(n: usize) -> QMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Q::one() } else { Q::zero() })
                .collect()
        })
        .collect()
}

pub fn q_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    let n = a.len();
    let m = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = vec![vec![Q::zero(); m]; n];
    for i in 0..n {
        for (l, bl) in b.iter().enumerate() {
            if a[i][l].is_zero() {
                continue;
            }
            for j in 0..m {
                out[i][j] += &a[i][l] * &bl[j];
            }
        }
    }
    out
}

fn q_add(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + q).collect())
        .collect()
}

fn q_scale(a: &QMatrix, s: &Q) -> QMatrix {
    a.iter()
        .map(|r| r.iter().map(|x| x * s).collect())
        .collect()
}

/// Reduced row echelon form; returns the pivot columns.
pub fn q_rref(a: &mut QMatrix) -> Vec<usize> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (x, y) in a[i].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn q_rank(a: &QMatrix) -> usize {
    let mut m = a.clone();
    q_rref(&mut m).len()
}

/// Basis of the right null space.
pub fn q_nullspace(a: &QMatrix, cols: usize) -> Vec<Vec<Q>> {
    let mut m = a.clone();
    let pivots = q_rref(&mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); cols];
            v[f] = Q::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m[r][f].clone();
            }
            v
        })
        .collect()
}

// ---------------------------------------------------------------------------
// polynomials over Q, coefficients from low to high degree

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(pub Vec<Q>);

impl Poly {
    fn trim(mut self) -> Poly {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
        self
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.iter().rposition(|c| !c.is_zero())
    }

    pub fn one() -> Poly {
        Poly(vec![Q::one()])
    }

    pub fn linear(r: &Q) -> Poly {
        Poly(vec![-r.clone(), Q::one()])
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.0.is_empty() || o.0.is_empty() {
            return Poly(Vec::new());
        }
        let mut out = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trim()
    }

    fn sub(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let mut out = vec![Q::zero(); n];
        for (i, a) in self.0.iter().enumerate() {
            out[i] += a;
        }
        for (i, b) in o.0.iter().enumerate() {
            out[i] -= b;
        }
        Poly(out).trim()
    }

    pub fn pow(&self, k: usize) -> Poly {
        (0..k).fold(Poly::one(), |acc, _| acc.mul(self))
    }

    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead = d.0[dd].clone();
        let mut r = self.clone().trim();
        let mut q = vec![Q::zero(); self.0.len().max(1)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let c = &r.0[rd] / &lead;
            q[rd - dd] = c.clone();
            let mut t = vec![Q::zero(); rd - dd + 1];
            t[rd - dd] = c;
            r = r.sub(&Poly(t).mul(d));
        }
        (Poly(q).trim(), r)
    }

    /// Returns `(g, s, t)` with `s*a + t*b = g`.
    pub fn ext_gcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Poly::one(), Poly(Vec::new()));
        let (mut t0, mut t1) = (Poly(Vec::new()), Poly::one());
        while r1.degree().is_some() {
            let (q, r) = r0.divrem(&r1);
            r0 = std::mem::replace(&mut r1, r);
            let ns = s0.sub(&q.mul(&s1));
            s0 = std::mem::replace(&mut s1, ns);
            let nt = t0.sub(&q.mul(&t1));
            t0 = std::mem::replace(&mut t1, nt);
        }
        (r0, s0, t0)
    }

    pub fn eval_matrix(&self, m: &QMatrix) -> QMatrix {
        let n = m.len();
        let mut acc = vec![vec![Q::zero(); n]; n];
        for c in self.0.iter().rev() {
            acc = q_add(&q_mul(&acc, m), &q_scale(&q_identity(n), c));
        }
        acc
    }

    fn eval(&self, x: &Q) -> Q {
        self.0.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }
}

/// Minimal polynomial (monic) of a square rational matrix.
pub fn minimal_polynomial(m: &QMatrix) -> Poly {
    let n = m.len();
    let mut powers: Vec<QMatrix> = vec![q_identity(n)];
    loop {
        let k = powers.len();
        // columns are the flattened powers
        let rows = n * n;
        let mut sys: QMatrix = vec![vec![Q::zero(); k]; rows];
        for (j, p) in powers.iter().enumerate() {
            for r in 0..n {
                for c in 0..n {
                    sys[r * n + c][j] = p[r][c].clone();
                }
            }
        }
        let ns = q_nullspace(&sys, k);
        if let Some(v) = ns.first() {
            let lead = v[k - 1].clone();
            return Poly(v.iter().map(|c| c / &lead).collect()).trim();
        }
        let next = q_mul(powers.last().unwrap(), m);
        powers.push(next);
    }
}

/// Characteristic polynomial `det(t I − m)` by Faddeev–LeVerrier.
pub fn characteristic_polynomial(m: &QMatrix) -> Poly {
    let n = m.len();
    let mut c = vec![Q::zero(); n + 1];
    c[n] = Q::one();
    let mut mk = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        mk = q_add(&q_mul(m, &mk), &q_scale(&q_identity(n), &c[n - k + 1]));
        let am = q_mul(m, &mk);
        let tr: Q = (0..n).map(|i| am[i][i].clone()).sum();
        c[n - k] = -tr / Q::from_integer(BigInt::from(k));
    }
    Poly(c)
}

/// Irreducible factors allowed in the closed-form dictionary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `(t - r)^k`
    Linear(Q, usize),
    /// `(t^2 - c)^k` with `c` not a rational square.
    Quadratic(Q, usize),
}

impl Factor {
    pub fn poly(&self) -> Poly {
        match self {
            Factor::Linear(r, k) => Poly::linear(r).pow(*k),
            Factor::Quadratic(c, k) => Poly(vec![-c.clone(), Q::zero(), Q::one()]).pow(*k),
        }
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    if n.is_zero() {
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.clone());
            let o = &n / &d;
            if o != d {
                out.push(o);
            }
        }
        d += 1;
        if d > BigInt::from(1_000_000) {
            break;
        }
    }
    out
}

pub(crate) fn rational_roots(p: &Poly) -> Vec<Q> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let mut lcm = BigInt::one();
    for c in &p.0 {
        lcm = num::integer::lcm(lcm, c.denom().clone());
    }
    let ints: Vec<BigInt> =
        p.0.iter()
            .map(|c| (c * Q::from_integer(lcm.clone())).to_integer())
            .collect();
    let low = ints.iter().position(|c| !c.is_zero()).unwrap();
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(Q::zero());
    }
    for a in divisors(&ints[low]) {
        for b in divisors(&ints[deg]) {
            for s in [1, -1] {
                let r = Q::new(&a * s, b.clone());
                if !roots.contains(&r) && p.eval(&r).is_zero() {
                    roots.push(r);
                }
            }
        }
    }
    roots
}

/// Factors a monic polynomial into the `{t - r, t^2 - c}` dictionary.
pub fn factor_dictionary(p: &Poly) -> Result<Vec<Factor>, String> {
    let mut rest = p.clone();
    let mut out = Vec::new();
    for r in rational_roots(p) {
        let lin = Poly::linear(&r);
        let mut k = 0;
        loop {
            let (q, rem) = rest.divrem(&lin);
            if rem.degree().is_some() {
                break;
            }
            rest = q;
            k += 1;
        }
        if k > 0 {
            out.push(Factor::Linear(r, k));
        }
    }
    let deg = rest.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(out);
    }
    if rest
        .0
        .iter()
        .enumerate()
        .any(|(i, c)| i % 2 == 1 && !c.is_zero())
    {
        return Err(format!("factor {:?} is not even", rest.0));
    }
    let half = Poly(rest.0.iter().step_by(2).cloned().collect());
    for c in rational_roots(&half) {
        let quad = Poly(vec![-c.clone(), Q::zero(), Q::one()]);
        let mut k = 0;
        loop {
            let (q, rem) = rest.divrem(&quad);
            if rem.degree().is_some() {
                break;
            }
            rest = q;
            k += 1;
        }
        if k > 0 {
            out.push(Factor::Quadratic(c, k));
        }
    }
    if rest.degree().unwrap_or(0) > 0 {
        return Err(format!("irreducible factor {:?}", rest.0));
    }
    Ok(out)
}

fn factorial(k: usize) -> Q {
    Q::from_integer((1..=k).fold(BigInt::one(), |a, b| a * BigInt::from(b)))
}

/// `exp(t * m)` in closed form for a rational matrix whose minimal
/// polynomial factors into `(x - r)^k` and square-free `x^2 - c` pieces.
pub fn exp_matrix(m: &QMatrix, t: &Expr) -> Result<SMatrix, LinalgError> {
    let n = m.len();
    let minp = minimal_polynomial(m);
    let factors = factor_dictionary(&minp).map_err(LinalgError::UnsupportedSpectrum)?;
    let mut out = zeros(n, n);
    for f in &factors {
        let pk = f.poly();
        let (cof, _) = minp.divrem(&pk);
        let (g, s, _) = Poly::ext_gcd(&cof, &pk);
        // g is a nonzero constant since the factors are coprime
        let gc = g.0[0].clone();
        let proj = s.mul(&cof).divrem(&minp).1;
        let proj = q_scale(&proj.eval_matrix(m), &gc.recip());
        let block: SMatrix = match f {
            Factor::Linear(r, k) => {
                let shifted: QMatrix = q_add(m, &q_scale(&q_identity(n), &-r.clone()));
                let mut acc = zeros(n, n);
                let mut pw = q_identity(n);
                for j in 0..*k {
                    let coeff = t
                        .powi(j as i64)
                        .expect("integer power")
                        .scale(&factorial(j).recip());
                    let term = q_mul(&pw, &proj);
                    for a in 0..n {
                        for b in 0..n {
                            if !term[a][b].is_zero() {
                                acc[a][b] = acc[a][b].add(&coeff.scale(&term[a][b]));
                            }
                        }
                    }
                    pw = q_mul(&pw, &shifted);
                }
                let e = t.scale(r).exp();
                acc.into_iter()
                    .map(|row| row.into_iter().map(|x| x.mul(&e)).collect())
                    .collect()
            }
            Factor::Quadratic(c, k) => {
                if *k > 1 {
                    return Err(LinalgError::UnsupportedSpectrum(format!(
                        "repeated factor t^2 - ({c})"
                    )));
                }
                let root = Expr::rational(c.abs()).sqrt().expect("positive");
                let arg = root.mul(t);
                let (even, odd) = if c.is_positive() {
                    (arg.cosh(), arg.sinh().div(&root).expect("nonzero"))
                } else {
                    (arg.cos(), arg.sin().div(&root).expect("nonzero"))
                };
                let mp = q_mul(m, &proj);
                (0..n)
                    .map(|a| {
                        (0..n)
                            .map(|b| even.scale(&proj[a][b]).add(&odd.scale(&mp[a][b])))
                            .collect()
                    })
                    .collect()
            }
        };
        for a in 0..n {
            for b in 0..n {
                out[a][b] = out[a][b].add(&block[a][b]);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn q(n: i64) -> Q {
        Q::from_integer(n.into())
    }

    #[test]
    fn det_and_inverse() {
        let m: SMatrix = vec![
            vec![Expr::zero(), Expr::one(), Expr::zero()],
            vec![Expr::one(), parse("u").unwrap(), Expr::zero()],
            vec![Expr::zero(), Expr::zero(), parse("sqrt(u)").unwrap()],
        ];
        assert_eq!(det(&m), parse("-sqrt(u)").unwrap());
        let inv = inverse(&m).unwrap();
        let prod = mat_mul(&m, &inv);
        assert_eq!(prod, identity(3));
    }

    #[test]
    fn minimal_polynomial_and_factors() {
        // rotation generator
        let f = vec![vec![q(0), q(1)], vec![q(-1), q(0)]];
        let p = minimal_polynomial(&f);
        assert_eq!(p, Poly(vec![q(1), q(0), q(1)]));
        assert_eq!(
            factor_dictionary(&p).unwrap(),
            vec![Factor::Quadratic(q(-1), 1)]
        );
        // nilpotent Jordan block
        let j = vec![vec![q(0), q(1)], vec![q(0), q(0)]];
        assert_eq!(
            factor_dictionary(&minimal_polynomial(&j)).unwrap(),
            vec![Factor::Linear(q(0), 2)]
        );
    }

    #[test]
    fn exp_rotation() {
        let f = vec![vec![q(0), q(1)], vec![q(-1), q(0)]];
        let e = exp_matrix(&f, &Expr::sym("x")).unwrap();
        assert_eq!(e[0][0], parse("cos(x)").unwrap());
        assert_eq!(e[0][1], parse("sin(x)").unwrap());
        assert_eq!(e[1][0], parse("-sin(x)").unwrap());
    }

    #[test]
    fn exp_jordan_and_hyperbolic() {
        let j = vec![vec![q(2), q(1)], vec![q(0), q(2)]];
        let e = exp_matrix(&j, &Expr::sym("t")).unwrap();
        assert_eq!(e[0][1], parse("t*exp(2*t)").unwrap());
        let h = vec![vec![q(0), q(2)], vec![q(1), q(0)]];
        let e = exp_matrix(&h, &Expr::sym("t")).unwrap();
        assert_eq!(e[0][0], parse("cosh(sqrt(2)*t)").unwrap());
        assert_eq!(e[0][1], parse("sqrt(2)*sinh(sqrt(2)*t)").unwrap());
    }

    #[test]
    fn symbolic_nullspace() {
        let r2 = parse("sqrt(2)").unwrap();
        let a: SMatrix = vec![
            vec![Expr::one(), r2.clone(), Expr::zero()],
            vec![r2.clone(), Expr::int(2), Expr::zero()],
        ];
        let ns = s_nullspace(&a, 3);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &a {
                let dot = row
                    .iter()
                    .zip(v)
                    .fold(Expr::zero(), |acc, (x, y)| acc.add(&x.mul(y)));
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn unsupported_spectrum() {
        // x^3 - 2 has no dictionary factorisation
        let c = vec![
            vec![q(0), q(0), q(2)],
            vec![q(1), q(0), q(0)],
            vec![q(0), q(1), q(0)],
        ];
        assert!(matches!(
            exp_matrix(&c, &Expr::sym("t")),
            Err(LinalgError::UnsupportedSpectrum(_))
        ));
    }
}
