use super::{Atom, Equality, Expr, ExprError, Result, Q};
use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt;

const RM: RoundingMode = RoundingMode::ToEven;

/// Working precision in significant decimal digits, from `PGEO_PRECISION`
/// (default 50, never below 50).
pub fn precision_digits() -> usize {
    std::env::var("PGEO_PRECISION")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .map(|d| d.max(50))
        .unwrap_or(50)
}

fn bits_for(digits: usize) -> usize {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 64
}

/// A number produced by evaluation.
#[derive(Clone)]
pub enum Number {
    Exact(Q),
    /// High-precision real with the number of significant digits it was
    /// computed to.
    Real(BigFloat, usize),
}

impl Number {
    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Exact(q) => q_to_f64(q),
            Number::Real(b, _) => bf_to_f64(b),
        }
    }

    pub fn as_exact(&self) -> Option<&Q> {
        match self {
            Number::Exact(q) => Some(q),
            Number::Real(..) => None,
        }
    }

    /// Decimal digits of the value, to the precision it carries.
    pub fn to_decimal(&self, digits: usize) -> String {
        match self {
            Number::Exact(q) => {
                if q.is_integer() {
                    q.to_string()
                } else {
                    let b = q_to_bf(q, bits_for(digits));
                    format_bf(&b, digits)
                }
            }
            Number::Real(b, d) => format_bf(b, (*d).min(digits)),
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Exact(q) => write!(f, "{q}"),
            Number::Real(b, d) => f.write_str(&format_bf(b, *d)),
        }
    }
}

impl fmt::Debug for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Values for the free symbols of an expression.
pub type Assignment = BTreeMap<String, Number>;

fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

fn q_to_bf(q: &Q, p: usize) -> BigFloat {
    let mut cc = Consts::new().expect("constants cache");
    let n = BigFloat::parse(&q.numer().to_string(), Radix::Dec, p, RM, &mut cc);
    let d = BigFloat::parse(&q.denom().to_string(), Radix::Dec, p, RM, &mut cc);
    n.div(&d, p, RM)
}

fn bf_to_f64(b: &BigFloat) -> f64 {
    let mut cc = Consts::new().expect("constants cache");
    let s = b
        .format(Radix::Dec, RM, &mut cc)
        .unwrap_or_else(|_| "NaN".to_string());
    s.parse::<f64>().unwrap_or(f64::NAN)
}

fn format_bf(b: &BigFloat, digits: usize) -> String {
    if b.is_zero() {
        return "0".into();
    }
    let p = bits_for(digits);
    let mut cc = Consts::new().expect("constants cache");
    let mut x = b.clone();
    x.set_precision(p, RM).ok();
    let s = x
        .format(Radix::Dec, RM, &mut cc)
        .unwrap_or_else(|_| "NaN".into());
    trim_digits(&s, digits)
}

/// Cuts the mantissa of a formatted float to `digits` significant digits.
fn trim_digits(s: &str, digits: usize) -> String {
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], &s[i..]),
        None => (s, ""),
    };
    let mut out = String::new();
    let mut count = 0;
    for ch in mant.chars() {
        if ch.is_ascii_digit() {
            if count >= digits {
                continue;
            }
            count += 1;
        }
        out.push(ch);
    }
    out + exp
}

/// Evaluates `e`. Exact if the expression is rational over rational
/// inputs, otherwise to `precision_digits()` significant digits.
pub fn evaluate(e: &Expr, a: &Assignment) -> Result<Number> {
    let exact: Option<BTreeMap<String, Q>> = a
        .iter()
        .map(|(k, v)| v.as_exact().map(|q| (k.clone(), q.clone())))
        .collect();
    if let Some(env) = exact {
        if let Some(r) = eval_exact(e, &env) {
            return r.map(Number::Exact);
        }
    }
    let digits = precision_digits();
    let p = bits_for(digits);
    let mut env = BTreeMap::new();
    for (k, v) in a {
        let b = match v {
            Number::Exact(q) => q_to_bf(q, p),
            Number::Real(b, _) => b.clone(),
        };
        env.insert(k.clone(), b);
    }
    let mut ev = BigEval {
        env: &env,
        p,
        cc: Consts::new().expect("constants cache"),
    };
    let v = ev.expr(e)?;
    Ok(Number::Real(v, digits))
}

/// Exact evaluation; `None` when the expression is not rational over the
/// inputs (radicals, transcendental atoms, symbolic exponents).
fn eval_exact(e: &Expr, env: &BTreeMap<String, Q>) -> Option<Result<Q>> {
    let mut total = Q::zero();
    for (m, c) in &e.terms {
        let mut t = c.clone();
        for (a, ex) in &m.factors {
            let n = ex.as_integer()?.to_i32()?;
            let base = match a {
                Atom::Sym(s) => match env.get(&**s) {
                    Some(v) => v.clone(),
                    None => return Some(Err(ExprError::Unbound(s.to_string()))),
                },
                Atom::Paren(x) => match eval_exact(x, env)? {
                    Ok(v) => v,
                    Err(err) => return Some(Err(err)),
                },
                _ => return None,
            };
            if base.is_zero() && n < 0 {
                return Some(Err(ExprError::DivisionByZero(format!(
                    "{}",
                    Expr::atom(a.clone())
                ))));
            }
            t *= num::pow::Pow::pow(&base, n);
        }
        total += t;
    }
    Some(Ok(total))
}

struct BigEval<'a> {
    env: &'a BTreeMap<String, BigFloat>,
    p: usize,
    cc: Consts,
}

impl BigEval<'_> {
    fn check(&self, v: BigFloat, node: impl fmt::Display) -> Result<BigFloat> {
        if v.is_nan() || v.is_inf() {
            Err(ExprError::Domain(node.to_string()))
        } else {
            Ok(v)
        }
    }

    fn expr(&mut self, e: &Expr) -> Result<BigFloat> {
        let mut total = BigFloat::from_i64(0, self.p);
        for (m, c) in &e.terms {
            let mut t = q_to_bf(c, self.p);
            for (a, ex) in &m.factors {
                let f = self.power(a, ex)?;
                t = t.mul(&f, self.p, RM);
            }
            total = total.add(&t, self.p, RM);
        }
        Ok(total)
    }

    fn atom(&mut self, a: &Atom) -> Result<BigFloat> {
        let p = self.p;
        match a {
            Atom::Sym(s) => self
                .env
                .get(&**s)
                .cloned()
                .ok_or_else(|| ExprError::Unbound(s.to_string())),
            Atom::Num(n) => Ok(q_to_bf(&Q::from_integer(n.clone()), p)),
            Atom::Exp(x) => {
                let v = self.expr(x)?;
                let r = v.exp(p, RM, &mut self.cc);
                self.check(r, Expr::atom(a.clone()))
            }
            Atom::Log(x) => {
                let v = self.expr(x)?;
                if !v.is_positive() || v.is_zero() {
                    return Err(ExprError::Domain(format!("{}", Expr::atom(a.clone()))));
                }
                let r = v.ln(p, RM, &mut self.cc);
                self.check(r, Expr::atom(a.clone()))
            }
            Atom::Sin(x) => {
                let v = self.expr(x)?;
                Ok(v.sin(p, RM, &mut self.cc))
            }
            Atom::Cos(x) => {
                let v = self.expr(x)?;
                Ok(v.cos(p, RM, &mut self.cc))
            }
            Atom::Paren(x) => self.expr(x),
        }
    }

    fn power(&mut self, a: &Atom, ex: &Expr) -> Result<BigFloat> {
        let p = self.p;
        let base = self.atom(a)?;
        let node = || {
            let mut f = BTreeMap::new();
            f.insert(a.clone(), ex.clone());
            format!("{}", super::build(f))
        };
        if let Some(q) = ex.as_rational() {
            if q.is_one() {
                return Ok(base);
            }
            if q.is_integer() {
                let n = q
                    .to_integer()
                    .to_i64()
                    .ok_or_else(|| ExprError::Domain(node()))?;
                if base.is_zero() {
                    return if n > 0 {
                        Ok(base)
                    } else {
                        Err(ExprError::DivisionByZero(node()))
                    };
                }
                let r = base.powi(n.unsigned_abs() as usize, p, RM);
                return Ok(if n < 0 { r.reciprocal(p, RM) } else { r });
            }
            if base.is_zero() {
                return if q.is_positive() {
                    Ok(base)
                } else {
                    Err(ExprError::DivisionByZero(node()))
                };
            }
            if base.is_negative() {
                return Err(ExprError::Domain(node()));
            }
            if q == Q::new(1.into(), 2.into()) {
                return Ok(base.sqrt(p, RM));
            }
            let l = base.ln(p, RM, &mut self.cc);
            let r = l.mul(&q_to_bf(&q, p), p, RM).exp(p, RM, &mut self.cc);
            return self.check(r, node());
        }
        let e = self.expr(ex)?;
        if base.is_zero() {
            return if e.is_positive() {
                Ok(base)
            } else {
                Err(ExprError::DivisionByZero(node()))
            };
        }
        if base.is_negative() {
            return Err(ExprError::Domain(node()));
        }
        let l = base.ln(p, RM, &mut self.cc);
        let r = l.mul(&e, p, RM).exp(p, RM, &mut self.cc);
        self.check(r, node())
    }
}

/// Checks whether `d` vanishes numerically at 16 random positive rational
/// points. `scale` expressions set the magnitude the residual is compared
/// against.
pub(super) fn probe_zero(d: &Expr, scale: &[&Expr]) -> Equality {
    let syms: Vec<String> = d.free_symbols().into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x005e_ed0f_e9a1);
    let mut good = 0;
    let mut tries = 0;
    while good < 16 && tries < 64 {
        tries += 1;
        let a = random_point(&mut rng, &syms);
        let v = match evaluate(d, &a) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let mut mag = 1.0f64;
        for s in scale {
            if let Ok(x) = evaluate(s, &a) {
                mag = mag.max(x.to_f64().abs());
            }
        }
        let tol = 1e-30 * mag;
        match v {
            Number::Exact(q) => {
                if !q.is_zero() {
                    return Equality::NotEqual;
                }
            }
            Number::Real(..) => {
                let f = v.to_f64();
                if !f.is_finite() || f.abs() > tol {
                    return Equality::NotEqual;
                }
            }
        }
        good += 1;
    }
    if good == 0 {
        Equality::Undecided
    } else {
        Equality::Probably
    }
}

// -------------------------------------------------------------------------
// compiled f64 evaluation

#[derive(Clone, Debug)]
enum CAtom {
    Var(usize),
    Const(f64),
    Exp(Box<Compiled>),
    Log(Box<Compiled>),
    Sin(Box<Compiled>),
    Cos(Box<Compiled>),
    Paren(Box<Compiled>),
}

#[derive(Clone, Debug)]
enum CPow {
    Int(i32),
    Half,
    Real(f64),
    Expr(Box<Compiled>),
}

/// An expression compiled for fast `f64` evaluation over a fixed ordered
/// list of variables.
#[derive(Clone, Debug)]
pub struct Compiled {
    terms: Vec<(f64, Vec<(CAtom, CPow)>)>,
}

impl Compiled {
    /// Compiles `e`. Every free symbol must be listed in `vars` or bound in
    /// `consts`.
    pub fn new(e: &Expr, vars: &[String], consts: &BTreeMap<String, f64>) -> Result<Compiled> {
        let mut terms = Vec::new();
        for (m, c) in &e.terms {
            let mut fs = Vec::new();
            for (a, ex) in &m.factors {
                let ca = match a {
                    Atom::Sym(s) => match vars.iter().position(|v| **v == **s) {
                        Some(i) => CAtom::Var(i),
                        None => match consts.get(&**s) {
                            Some(v) => CAtom::Const(*v),
                            None => return Err(ExprError::Unbound(s.to_string())),
                        },
                    },
                    Atom::Num(n) => CAtom::Const(n.to_f64().unwrap_or(f64::NAN)),
                    Atom::Exp(x) => CAtom::Exp(Box::new(Compiled::new(x, vars, consts)?)),
                    Atom::Log(x) => CAtom::Log(Box::new(Compiled::new(x, vars, consts)?)),
                    Atom::Sin(x) => CAtom::Sin(Box::new(Compiled::new(x, vars, consts)?)),
                    Atom::Cos(x) => CAtom::Cos(Box::new(Compiled::new(x, vars, consts)?)),
                    Atom::Paren(x) => CAtom::Paren(Box::new(Compiled::new(x, vars, consts)?)),
                };
                let cp = match ex.as_rational() {
                    Some(q) if q.is_integer() => {
                        CPow::Int(q.to_integer().to_i32().unwrap_or(i32::MAX))
                    }
                    Some(q) if q == Q::new(1.into(), 2.into()) => CPow::Half,
                    Some(q) => CPow::Real(q_to_f64(&q)),
                    None => CPow::Expr(Box::new(Compiled::new(ex, vars, consts)?)),
                };
                fs.push((ca, cp));
            }
            terms.push((q_to_f64(c), fs));
        }
        Ok(Compiled { terms })
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (c, fs) in &self.terms {
            let mut t = *c;
            for (a, p) in fs {
                let b = match a {
                    CAtom::Var(i) => x[*i],
                    CAtom::Const(v) => *v,
                    CAtom::Exp(e) => e.eval(x).exp(),
                    CAtom::Log(e) => e.eval(x).ln(),
                    CAtom::Sin(e) => e.eval(x).sin(),
                    CAtom::Cos(e) => e.eval(x).cos(),
                    CAtom::Paren(e) => e.eval(x),
                };
                t *= match p {
                    CPow::Int(1) => b,
                    CPow::Int(n) => b.powi(*n),
                    CPow::Half => b.sqrt(),
                    CPow::Real(r) => b.powf(*r),
                    CPow::Expr(e) => b.powf(e.eval(x)),
                };
            }
            total += t;
        }
        total
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Random positive rationals for numeric checks.
fn random_point(rng: &mut impl Rng, syms: &[String]) -> Assignment {
    syms.iter()
        .map(|s| {
            let n: i64 = rng.gen_range(3..=48);
            let k: i64 = rng.gen_range(7..=17);
            (s.clone(), Number::Exact(Q::new(n.into(), k.into())))
        })
        .collect()
}
