//! Symbolic scalar expressions.
//!
//! An [`Expr`] is kept in a canonical form: a sum of monomials with exact
//! rational coefficients. A monomial is a product of atoms raised to
//! exponents, where an exponent is itself an expression (usually a rational
//! constant, but symbolic exponents such as `2*mu` are allowed).
//!
//! The rewrite set applied on construction is fixed:
//!
//! * like monomials are collected and zero coefficients dropped;
//! * `sinh`, `cosh` and `tanh` are rewritten through `exp`, and
//!   `exp(a)*exp(b)` merges to `exp(a + b)`, `exp(c*log(x))` to `x^c`;
//! * `sin(x)^2` becomes `1 - cos(x)^2`, and `sin`/`cos` absorb the sign of
//!   their argument;
//! * rational powers of rational numbers are split over primes with the
//!   integer part moved into the coefficient, so `sqrt(2)*sqrt(2) = 2`;
//! * positive integer powers of sums are expanded; other powers of a sum
//!   become a normalized parenthesised atom;
//! * sums carrying parenthesised denominators are brought over a common
//!   denominator and cancelled by exact division where it succeeds.
//!
//! Symbols are taken to be positive reals, which fixes the branch of
//! `sqrt(u)` and makes `(u^2)^(1/2) = u`.

mod diff;
mod eval;
mod parse;
mod print;

pub use eval::{evaluate, precision_digits, Assignment, Compiled, Number};
pub use parse::parse;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

/// Exact rational number.
pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown function `{name}` at position {pos}")]
    UnknownFunction { name: String, pos: usize },
    #[error("unbound symbol `{0}`")]
    Unbound(String),
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("domain error in `{0}`")]
    Domain(String),
}

pub type Result<T> = std::result::Result<T, ExprError>;

/// A symbolic scalar in canonical form.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Q>,
}

/// Product of atoms with (symbolic) exponents. The empty monomial is `1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    factors: BTreeMap<Atom, Expr>,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    Sym(Arc<str>),
    /// A prime (or unfactored integer) carrying a non-integer exponent.
    Num(BigInt),
    /// Always carries exponent 1; the argument absorbs powers.
    Exp(Arc<Expr>),
    Log(Arc<Expr>),
    Sin(Arc<Expr>),
    Cos(Arc<Expr>),
    /// A normalized sum of at least two terms with a non-positive-integer
    /// exponent.
    Paren(Arc<Expr>),
}

/// Outcome of an equality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Equality {
    /// The canonical forms agree.
    Proved,
    /// Canonical forms differ but 16 random evaluations agree.
    Probably,
    /// No evaluation point could be found.
    Undecided,
    NotEqual,
}

impl Equality {
    pub fn holds(self) -> bool {
        matches!(self, Equality::Proved | Equality::Probably)
    }
}

fn q_int(i: i64) -> Q {
    Q::from_integer(BigInt::from(i))
}

fn q_floor(q: &Q) -> BigInt {
    q.floor().to_integer()
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::default()
    }

    pub fn one() -> Expr {
        Expr::rational(Q::one())
    }

    pub fn int(i: i64) -> Expr {
        Expr::rational(q_int(i))
    }

    pub fn frac(n: i64, d: i64) -> Expr {
        Expr::rational(Q::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn rational(q: Q) -> Expr {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(Monomial::default(), q);
        }
        Expr { terms }
    }

    pub fn sym(name: &str) -> Expr {
        Expr::atom(Atom::Sym(Arc::from(name)))
    }

    fn atom(a: Atom) -> Expr {
        let mut factors = BTreeMap::new();
        factors.insert(a, Expr::one());
        Expr::term(Q::one(), Monomial { factors })
    }

    fn term(c: Q, m: Monomial) -> Expr {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_one())
    }

    /// The value if this expression is a rational constant.
    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.factors.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer())
    }

    /// The symbol name if this expression is a bare symbol.
    pub fn as_symbol(&self) -> Option<&str> {
        let (m, c) = self.single_term()?;
        if !c.is_one() || m.factors.len() != 1 {
            return None;
        }
        let (a, e) = m.factors.iter().next().unwrap();
        match a {
            Atom::Sym(s) if e.is_one() => Some(s),
            _ => None,
        }
    }

    fn single_term(&self) -> Option<(&Monomial, &Q)> {
        (self.terms.len() == 1).then(|| self.terms.iter().next().unwrap())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms as standalone expressions, in canonical order.
    pub fn terms(&self) -> Vec<Expr> {
        self.terms
            .iter()
            .map(|(m, c)| Expr::term(c.clone(), m.clone()))
            .collect()
    }

    /// The constant term.
    pub fn constant_term(&self) -> Q {
        self.terms
            .get(&Monomial::default())
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    /// True if no symbol occurs anywhere in the expression.
    pub fn is_constant(&self) -> bool {
        self.free_symbols().is_empty()
    }

    pub fn free_symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut BTreeSet<String>) {
        for m in self.terms.keys() {
            for (a, e) in &m.factors {
                e.collect_symbols(out);
                match a {
                    Atom::Sym(s) => {
                        out.insert(s.to_string());
                    }
                    Atom::Num(_) => {}
                    Atom::Exp(x) | Atom::Log(x) | Atom::Sin(x) | Atom::Cos(x) | Atom::Paren(x) => {
                        x.collect_symbols(out)
                    }
                }
            }
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        self.free_symbols().contains(var)
    }

    /// Size measure used for diagnostics.
    pub fn node_count(&self) -> usize {
        self.terms
            .keys()
            .map(|m| {
                1 + m
                    .factors
                    .iter()
                    .map(|(a, e)| {
                        e.node_count()
                            + match a {
                                Atom::Sym(_) | Atom::Num(_) => 1,
                                Atom::Exp(x)
                                | Atom::Log(x)
                                | Atom::Sin(x)
                                | Atom::Cos(x)
                                | Atom::Paren(x) => 1 + x.node_count(),
                            }
                    })
                    .sum::<usize>()
            })
            .sum()
    }

    /// Sign of the coefficient of the greatest monomial. This is a total
    /// order on expressions compatible with addition.
    fn order_sign(&self) -> Ordering {
        match self.terms.iter().next_back() {
            None => Ordering::Equal,
            Some((_, c)) => {
                if c.is_positive() {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }

    // ---------------------------------------------------------------
    // arithmetic

    fn add_raw(&self, other: &Expr) -> Expr {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Expr { terms }
    }

    fn mul_raw(&self, other: &Expr) -> Expr {
        let mut acc = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let p = mono_mul(ma, mb);
                let c = ca * cb;
                for (m, k) in p.terms {
                    add_term(&mut acc, m, k * &c);
                }
            }
        }
        Expr { terms: acc }
    }

    pub fn add(&self, other: &Expr) -> Expr {
        self.add_raw(other).normalized()
    }

    pub fn sub(&self, other: &Expr) -> Expr {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Expr) -> Expr {
        self.mul_raw(other).normalized()
    }

    pub fn scale(&self, q: &Q) -> Expr {
        if q.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect(),
        }
    }

    pub fn div(&self, other: &Expr) -> Result<Expr> {
        if other.is_zero() {
            return Err(ExprError::DivisionByZero(format!("{self}/({other})")));
        }
        Ok(self.mul(&other.pow(&Expr::int(-1))?))
    }

    pub fn powi(&self, n: i64) -> Result<Expr> {
        self.pow(&Expr::int(n))
    }

    /// `self ^ e`. Fails for `0^e` with `e <= 0` and for non-integer powers
    /// of negative constants.
    pub fn pow(&self, e: &Expr) -> Result<Expr> {
        if e.is_zero() {
            if self.is_zero() {
                return Err(ExprError::DivisionByZero("0^0".into()));
            }
            return Ok(Expr::one());
        }
        if self.is_zero() {
            return match e.as_rational() {
                Some(q) if q.is_positive() => Ok(Expr::zero()),
                Some(_) => Err(ExprError::DivisionByZero(format!("0^({e})"))),
                None => Err(ExprError::Domain(format!("0^({e})"))),
            };
        }
        if let Some(n) = e.as_integer() {
            if n.is_positive() {
                let n = n
                    .to_u64()
                    .ok_or_else(|| ExprError::Domain(format!("exponent {n}")))?;
                return Ok(self.pow_u(n));
            }
        }
        if let Some((m, c)) = self.single_term() {
            return mono_pow(c, m, e);
        }
        let (num, dens) = self.split_fraction();
        let mut out = if let Some((m, c)) = num.single_term() {
            mono_pow(c, m, e)?
        } else {
            make_paren(&num, e)?
        };
        for (p, k) in dens {
            let ex = e.scale(&-k);
            out = out.mul(&paren_pow(p, &ex));
        }
        Ok(out)
    }

    fn pow_u(&self, mut n: u64) -> Expr {
        let mut base = self.clone();
        let mut acc = Expr::one();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn sqrt(&self) -> Result<Expr> {
        self.pow(&Expr::frac(1, 2))
    }

    pub fn exp(&self) -> Expr {
        exp_of(self)
    }

    pub fn log(&self) -> Result<Expr> {
        if self.is_zero() {
            return Err(ExprError::Domain("log(0)".into()));
        }
        if let Some((m, c)) = self.single_term() {
            if !c.is_positive() {
                return Err(ExprError::Domain(format!("log({self})")));
            }
            let mut out = log_rational(c);
            for (a, e) in &m.factors {
                let la = match a {
                    Atom::Sym(_) | Atom::Cos(_) | Atom::Sin(_) | Atom::Log(_) => {
                        Expr::atom(Atom::Log(Arc::new(Expr::atom(a.clone()))))
                    }
                    Atom::Num(p) => Expr::atom(Atom::Log(Arc::new(Expr::rational(
                        Q::from_integer(p.clone()),
                    )))),
                    Atom::Exp(x) => (**x).clone(),
                    Atom::Paren(x) => Expr::atom(Atom::Log(x.clone())),
                };
                out = out.add(&la.mul(e));
            }
            return Ok(out);
        }
        let (num, dens) = self.split_fraction();
        let mut out = if num.num_terms() == 1 {
            num.log()?
        } else {
            let (g, content, p) = paren_parts(&num, false);
            let mut o = Expr::term(Q::one(), g)
                .log()?
                .add(&log_rational(&content.abs()));
            o = o.add(&Expr::atom(Atom::Log(Arc::new(p))));
            o
        };
        for (p, k) in dens {
            out = out.sub(&Expr::atom(Atom::Log(p)).scale(&k));
        }
        Ok(out)
    }

    pub fn sin(&self) -> Expr {
        if self.is_zero() {
            return Expr::zero();
        }
        if self.order_sign() == Ordering::Less {
            return Expr::atom(Atom::Sin(Arc::new(self.neg()))).neg();
        }
        Expr::atom(Atom::Sin(Arc::new(self.clone())))
    }

    pub fn cos(&self) -> Expr {
        if self.is_zero() {
            return Expr::one();
        }
        if self.order_sign() == Ordering::Less {
            return Expr::atom(Atom::Cos(Arc::new(self.neg())));
        }
        Expr::atom(Atom::Cos(Arc::new(self.clone())))
    }

    pub fn cosh(&self) -> Expr {
        self.exp()
            .add(&self.neg().exp())
            .scale(&Q::new(1.into(), 2.into()))
    }

    pub fn sinh(&self) -> Expr {
        self.exp()
            .sub(&self.neg().exp())
            .scale(&Q::new(1.into(), 2.into()))
    }

    pub fn tanh(&self) -> Expr {
        let e2 = self.scale(&q_int(2)).exp();
        e2.sub(&Expr::one())
            .div(&e2.add(&Expr::one()))
            .expect("exp(2x) + 1 is never zero")
    }

    /// Rational normal form. Construction already applies it, so this is
    /// the identity on any value produced by the public API; it is exposed
    /// so idempotence can be stated and tested.
    pub fn simplify(&self) -> Expr {
        self.clone().normalized()
    }

    // ---------------------------------------------------------------
    // rational normalization

    fn has_paren_denominator(&self) -> bool {
        self.terms.keys().any(|m| {
            m.factors.iter().any(|(a, e)| {
                matches!(a, Atom::Paren(_)) && e.as_rational().is_some_and(|q| q.is_negative())
            })
        })
    }

    fn normalized(self) -> Expr {
        if !self.has_paren_denominator() {
            return self;
        }
        let (num, mut dens) = self.split_fraction();
        if num.is_zero() {
            return Expr::zero();
        }
        let mut num = num;
        for (p, k) in dens.iter_mut() {
            while k.is_positive() {
                match try_divide(&num, p) {
                    Some(quot) => {
                        num = quot;
                        *k -= Q::one();
                    }
                    None => break,
                }
            }
        }
        let mut out = num;
        for (p, k) in dens {
            if k.is_positive() {
                let f = paren_pow(p, &Expr::rational(-k));
                out = out.mul_raw(&f);
            }
        }
        out
    }

    /// Splits into a numerator free of parenthesised denominators and the
    /// list of parenthesised factors `P` with multiplicities `m`, so that
    /// `self = num * prod P^(-m)`.
    fn split_fraction(&self) -> (Expr, Vec<(Arc<Expr>, Q)>) {
        let mut need: BTreeMap<Arc<Expr>, Q> = BTreeMap::new();
        for m in self.terms.keys() {
            for (a, e) in &m.factors {
                if let (Atom::Paren(p), Some(q)) = (a, e.as_rational()) {
                    let k = -Q::from_integer(q_floor(&q));
                    if k.is_positive() {
                        let slot = need.entry(p.clone()).or_insert_with(Q::zero);
                        if k > *slot {
                            *slot = k;
                        }
                    }
                }
            }
        }
        if need.is_empty() {
            return (self.clone(), Vec::new());
        }
        let mut num = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut factors = m.factors.clone();
            for (p, k) in &need {
                let key = Atom::Paren(p.clone());
                let e = factors.remove(&key).unwrap_or_default();
                let ne = e.add(&Expr::rational(k.clone()));
                if !ne.is_zero() {
                    factors.insert(key, ne);
                }
            }
            let t = build(factors);
            for (mm, cc) in t.terms {
                add_term(&mut num, mm, cc * c);
            }
        }
        (Expr { terms: num }, need.into_iter().collect())
    }

    // ---------------------------------------------------------------
    // substitution

    /// Simultaneous substitution of symbols.
    pub fn subs(&self, map: &BTreeMap<String, Expr>) -> Result<Expr> {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut t = Expr::rational(c.clone());
            for (a, e) in &m.factors {
                let base = match a {
                    Atom::Sym(s) => match map.get(&**s) {
                        Some(v) => v.clone(),
                        None => Expr::atom(a.clone()),
                    },
                    Atom::Num(p) => Expr::rational(Q::from_integer(p.clone())),
                    Atom::Exp(x) => x.subs(map)?.exp(),
                    Atom::Log(x) => x.subs(map)?.log()?,
                    Atom::Sin(x) => x.subs(map)?.sin(),
                    Atom::Cos(x) => x.subs(map)?.cos(),
                    Atom::Paren(x) => x.subs(map)?,
                };
                let ee = e.subs(map)?;
                t = t.mul(&base.pow(&ee)?);
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    pub fn subs1(&self, var: &str, value: &Expr) -> Result<Expr> {
        let mut map = BTreeMap::new();
        map.insert(var.to_string(), value.clone());
        self.subs(&map)
    }

    /// Coefficient of `var^1` in an expression linear in `var`, together
    /// with the remainder. Fails if the expression is not linear in `var`.
    pub fn linear_coefficient(&self, var: &str) -> Option<(Expr, Expr)> {
        let d = self.diff(var);
        if d.depends_on(var) {
            return None;
        }
        let rest = self.sub(&d.mul(&Expr::sym(var)));
        if rest.depends_on(var) {
            return None;
        }
        Some((d, rest))
    }
}

fn add_term(terms: &mut BTreeMap<Monomial, Q>, m: Monomial, c: Q) {
    if c.is_zero() {
        return;
    }
    match terms.entry(m) {
        std::collections::btree_map::Entry::Vacant(v) => {
            v.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let s = o.get() + &c;
            if s.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = s;
            }
        }
    }
}

fn log_rational(q: &Q) -> Expr {
    let mut out = Expr::zero();
    for (p, k) in factor_rational(q) {
        let l = Expr::atom(Atom::Log(Arc::new(Expr::rational(Q::from_integer(p)))));
        out = out.add(&l.scale(&Q::from_integer(BigInt::from(k))));
    }
    out
}

fn factor_int(n: &BigInt) -> Vec<(BigInt, i64)> {
    let mut out = Vec::new();
    let mut n = n.abs();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1_000_000u32);
    while &p * &p <= n && p <= limit {
        let mut k = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            k += 1;
        }
        if k > 0 {
            out.push((p.clone(), k));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

fn factor_rational(q: &Q) -> Vec<(BigInt, i64)> {
    let mut out = factor_int(q.numer());
    for (p, k) in factor_int(q.denom()) {
        out.push((p, -k));
    }
    out
}

/// `q^e` for rational `q`.
fn rational_pow(q: &Q, e: &Expr) -> Result<Expr> {
    if let Some(n) = e.as_integer() {
        if q.is_zero() {
            return if n.is_positive() {
                Ok(Expr::zero())
            } else {
                Err(ExprError::DivisionByZero(format!("0^{n}")))
            };
        }
        let n = n
            .to_i32()
            .ok_or_else(|| ExprError::Domain(format!("exponent {n}")))?;
        return Ok(Expr::rational(num::pow::Pow::pow(q, n)));
    }
    if q.is_zero() {
        return match e.as_rational() {
            Some(r) if r.is_positive() => Ok(Expr::zero()),
            _ => Err(ExprError::Domain(format!("0^({e})"))),
        };
    }
    if q.is_negative() {
        return Err(ExprError::Domain(format!("({q})^({e})")));
    }
    let mut factors = BTreeMap::new();
    for (p, k) in factor_rational(q) {
        factors.insert(Atom::Num(p), e.scale(&q_int(k)));
    }
    Ok(build(factors))
}

/// `(c * m)^e`.
fn mono_pow(c: &Q, m: &Monomial, e: &Expr) -> Result<Expr> {
    let mut out = rational_pow(c, e)?;
    let mut factors = BTreeMap::new();
    for (a, x) in &m.factors {
        match a {
            Atom::Exp(arg) => out = out.mul(&exp_of(&arg.mul(e))),
            _ => {
                factors.insert(a.clone(), x.mul(e));
            }
        }
    }
    Ok(out.mul(&build(factors)))
}

fn paren_pow(p: Arc<Expr>, e: &Expr) -> Expr {
    let mut factors = BTreeMap::new();
    factors.insert(Atom::Paren(p), e.clone());
    build(factors)
}

/// Decomposes a sum as `g * content * P` where `g` collects the smallest
/// powers of symbols and exponentials, `content` is a rational and `P` has
/// leading coefficient `1` (or `-1` when `signed` is false and the leading
/// coefficient is negative).
fn paren_parts(s: &Expr, signed: bool) -> (Monomial, Q, Expr) {
    let mut syms: BTreeSet<&Atom> = BTreeSet::new();
    for m in s.terms.keys() {
        syms.extend(m.factors.keys().filter(|a| matches!(a, Atom::Sym(_))));
    }
    let mut g = BTreeMap::new();
    'atoms: for a in syms {
        let mut min: Option<Q> = None;
        for m in s.terms.keys() {
            let q = match m.factors.get(a) {
                None => Q::zero(),
                Some(e) => match e.as_rational() {
                    Some(q) => q,
                    None => continue 'atoms,
                },
            };
            if min.as_ref().is_none_or(|cur| q < *cur) {
                min = Some(q);
            }
        }
        if let Some(q) = min.filter(|q| !q.is_zero()) {
            g.insert(a.clone(), Expr::rational(q));
        }
    }
    // smallest exponential argument under the additive order
    let mut emin: Option<Expr> = None;
    for m in s.terms.keys() {
        let arg = exp_arg(m);
        emin = Some(match emin {
            None => arg,
            Some(cur) => {
                if arg.sub(&cur).order_sign() == Ordering::Less {
                    arg
                } else {
                    cur
                }
            }
        });
    }
    let emin = emin.unwrap_or_default();
    let mut gm = Monomial { factors: g };
    if !emin.is_zero() {
        gm.factors.insert(Atom::Exp(Arc::new(emin)), Expr::one());
    }
    let ginv = mono_inverse(&gm);
    let mut p = BTreeMap::new();
    for (m, c) in &s.terms {
        let t = mono_mul(m, &ginv);
        for (mm, cc) in t.terms {
            add_term(&mut p, mm, cc * c);
        }
    }
    let p = Expr { terms: p };
    let lc = leading(&p).1.clone();
    let content = if signed || lc.is_positive() { lc } else { -lc };
    let p = p.scale(&content.recip());
    (gm, content, p)
}

fn exp_arg(m: &Monomial) -> Expr {
    for a in m.factors.keys() {
        if let Atom::Exp(x) = a {
            return (**x).clone();
        }
    }
    Expr::zero()
}

fn mono_inverse(m: &Monomial) -> Monomial {
    let mut f = BTreeMap::new();
    for (a, e) in &m.factors {
        match a {
            Atom::Exp(x) => {
                f.insert(Atom::Exp(Arc::new(x.neg())), Expr::one());
            }
            _ => {
                f.insert(a.clone(), e.neg());
            }
        }
    }
    Monomial { factors: f }
}

/// `s^e` for a sum `s` without parenthesised denominators, `e` not a
/// positive integer.
fn make_paren(s: &Expr, e: &Expr) -> Result<Expr> {
    let signed = e.as_integer().is_some();
    let (g, content, p) = paren_parts(s, signed);
    let gp = mono_pow(&Q::one(), &g, e)?;
    let cp = rational_pow(&content, e)?;
    Ok(gp.mul(&cp).mul(&paren_pow(Arc::new(p), e)))
}

/// `exp(a)`, pulling out `c*log(x)` terms as powers.
fn exp_of(a: &Expr) -> Expr {
    let mut rest = BTreeMap::new();
    let mut out = Expr::one();
    for (m, c) in &a.terms {
        if m.factors.len() == 1 {
            let (at, e) = m.factors.iter().next().unwrap();
            if let (Atom::Log(x), true) = (at, e.is_one()) {
                if let Ok(v) = x.pow(&Expr::rational(c.clone())) {
                    out = out.mul(&v);
                    continue;
                }
            }
        }
        rest.insert(m.clone(), c.clone());
    }
    let rest = Expr { terms: rest };
    if rest.is_zero() {
        return out;
    }
    let mut factors = BTreeMap::new();
    factors.insert(Atom::Exp(Arc::new(rest)), Expr::one());
    out.mul(&Expr::term(Q::one(), Monomial { factors }))
}

/// Product of two monomials, normalized.
fn mono_mul(a: &Monomial, b: &Monomial) -> Expr {
    if b.factors.is_empty() {
        return Expr::term(Q::one(), a.clone());
    }
    if a.factors.is_empty() {
        return Expr::term(Q::one(), b.clone());
    }
    let mut factors = a.factors.clone();
    let mut exp_sum: Option<Expr> = None;
    factors.retain(|at, _| {
        if let Atom::Exp(x) = at {
            exp_sum = Some((**x).clone());
            false
        } else {
            true
        }
    });
    for (at, e) in &b.factors {
        if let Atom::Exp(x) = at {
            exp_sum = Some(match exp_sum {
                Some(s) => s.add(x),
                None => (**x).clone(),
            });
            continue;
        }
        match factors.get_mut(at) {
            Some(cur) => *cur = cur.add(e),
            None => {
                factors.insert(at.clone(), e.clone());
            }
        }
    }
    if let Some(s) = exp_sum {
        if !s.is_zero() {
            factors.insert(Atom::Exp(Arc::new(s)), Expr::one());
        }
    }
    build(factors)
}

/// Applies per-atom rules to a factor map.
fn build(factors: BTreeMap<Atom, Expr>) -> Expr {
    let mut coeff = Q::one();
    let mut kept = BTreeMap::new();
    let mut extra: Vec<Expr> = Vec::new();
    for (a, e) in factors {
        if e.is_zero() {
            continue;
        }
        match &a {
            Atom::Num(p) => {
                let r = e.constant_term();
                let k = q_floor(&r);
                let rest = e.sub(&Expr::rational(Q::from_integer(k.clone())));
                if let Some(kk) = k.to_i32() {
                    coeff *= num::pow::Pow::pow(&Q::from_integer(p.clone()), kk);
                }
                if !rest.is_zero() {
                    kept.insert(a, rest);
                }
            }
            Atom::Exp(x) => {
                if e.is_one() {
                    kept.insert(a, e);
                } else {
                    extra.push(exp_of(&x.mul(&e)));
                }
            }
            Atom::Sin(x) => match e.as_integer().and_then(|n| n.to_i64()) {
                Some(n) if n >= 2 => {
                    let c2 = Expr::atom(Atom::Cos(x.clone())).pow_u(2);
                    extra.push(Expr::one().sub(&c2).pow_u((n / 2) as u64));
                    if n % 2 == 1 {
                        kept.insert(a, Expr::one());
                    }
                }
                _ => {
                    kept.insert(a, e);
                }
            },
            Atom::Paren(p) => match e.as_rational() {
                Some(q) if q >= Q::one() => {
                    let k = q_floor(&q);
                    let fr = &q - Q::from_integer(k.clone());
                    extra.push((**p).pow_u(k.to_u64().unwrap_or(1)));
                    if !fr.is_zero() {
                        kept.insert(a, Expr::rational(fr));
                    }
                }
                _ => {
                    kept.insert(a, e);
                }
            },
            Atom::Sym(_) | Atom::Log(_) | Atom::Cos(_) => {
                kept.insert(a, e);
            }
        }
    }
    let mut out = Expr::term(coeff, Monomial { factors: kept });
    for x in extra {
        out = out.mul_raw(&x);
    }
    out
}

/// Total order on monomials compatible with multiplication.
fn group_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let mut keys: BTreeSet<&Atom> = BTreeSet::new();
    for k in a.factors.keys().chain(b.factors.keys()) {
        if !matches!(k, Atom::Exp(_)) {
            keys.insert(k);
        }
    }
    let zero = Expr::zero();
    for k in keys {
        let ea = a.factors.get(k).unwrap_or(&zero);
        let eb = b.factors.get(k).unwrap_or(&zero);
        let d = ea.sub(eb).order_sign();
        if d != Ordering::Equal {
            return d;
        }
    }
    exp_arg(a).sub(&exp_arg(b)).order_sign()
}

fn leading(s: &Expr) -> (&Monomial, &Q) {
    let mut best = s.terms.iter().next().expect("non-empty sum");
    for t in s.terms.iter() {
        if group_cmp(t.0, best.0) == Ordering::Greater {
            best = t;
        }
    }
    best
}

fn lowest(s: &Expr) -> &Monomial {
    let mut best = s.terms.keys().next().expect("non-empty sum");
    for t in s.terms.keys() {
        if group_cmp(t, best) == Ordering::Less {
            best = t;
        }
    }
    best
}

/// Exact division in the group ring of monomials. Returns `None` if `p`
/// does not divide `n`.
fn try_divide(n: &Expr, p: &Expr) -> Option<Expr> {
    if n.is_zero() {
        return Some(Expr::zero());
    }
    let pclass = symbolic_class(p.terms.keys().next()?);
    if p.terms.keys().all(|m| symbolic_class(m) == pclass) {
        let mut classes: BTreeMap<Monomial, BTreeMap<Monomial, Q>> = BTreeMap::new();
        for (m, c) in &n.terms {
            classes
                .entry(symbolic_class(m))
                .or_default()
                .insert(m.clone(), c.clone());
        }
        if classes.len() > 1 {
            let mut quot = Expr::zero();
            for terms in classes.into_values() {
                quot = quot.add_raw(&try_divide_class(&Expr { terms }, p)?);
            }
            return Some(quot);
        }
    }
    try_divide_class(n, p)
}

/// The non-rational parts of the exponents of `m`. Multiplying by a
/// monomial with rational exponents keeps the class, so exact division by
/// such a divisor splits over classes.
fn symbolic_class(m: &Monomial) -> Monomial {
    let factors = m
        .factors
        .iter()
        .filter(|(a, _)| !matches!(a, Atom::Exp(_)))
        .filter_map(|(a, e)| {
            let sym = e.sub(&Expr::rational(e.constant_term()));
            (!sym.is_zero()).then(|| (a.clone(), sym))
        })
        .collect();
    Monomial { factors }
}

fn try_divide_class(n: &Expr, p: &Expr) -> Option<Expr> {
    let (lm, lc) = leading(p);
    let lm_inv = mono_inverse(lm);
    let low_inv = mono_inverse(lowest(p));
    let bound = mono_single(&mono_mul(lowest(n), &low_inv))?;
    let p_key = non_exp(lm);
    let uniform = p.terms.keys().all(|m| non_exp(m) == p_key);
    let mut rem = n.clone();
    let mut quot = Expr::zero();
    for _ in 0..4096 {
        if rem.is_zero() {
            return (quot.mul_raw(p) == *n).then_some(quot);
        }
        let (rm, rc) = leading(&rem);
        let qm = mono_single(&mono_mul(rm, &lm_inv))?;
        if group_cmp(&qm.0, &bound.0) == Ordering::Less {
            return None;
        }
        if uniform {
            let key = non_exp(rm);
            let floor = n
                .terms
                .keys()
                .filter(|m| non_exp(m) == key)
                .min_by(|a, b| group_cmp(a, b))?;
            let floor = mono_single(&mono_mul(floor, &low_inv))?;
            if group_cmp(&qm.0, &floor.0) == Ordering::Less {
                return None;
            }
        }
        let qc = rc / lc * qm.1;
        let qt = Expr::term(qc, qm.0);
        rem = rem.add_raw(&qt.mul_raw(p).neg());
        quot = quot.add_raw(&qt);
    }
    None
}

fn non_exp(m: &Monomial) -> Monomial {
    Monomial {
        factors: m
            .factors
            .iter()
            .filter(|(a, _)| !matches!(a, Atom::Exp(_)))
            .map(|(a, e)| (a.clone(), e.clone()))
            .collect(),
    }
}

fn mono_single(e: &Expr) -> Option<(Monomial, Q)> {
    let (m, c) = e.single_term()?;
    Some((m.clone(), c.clone()))
}

impl std::ops::Add for &Expr {
    type Output = Expr;
    fn add(self, o: &Expr) -> Expr {
        Expr::add(self, o)
    }
}

impl std::ops::Sub for &Expr {
    type Output = Expr;
    fn sub(self, o: &Expr) -> Expr {
        Expr::sub(self, o)
    }
}

impl std::ops::Mul for &Expr {
    type Output = Expr;
    fn mul(self, o: &Expr) -> Expr {
        Expr::mul(self, o)
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::neg(self)
    }
}

impl From<i64> for Expr {
    fn from(i: i64) -> Expr {
        Expr::int(i)
    }
}

impl From<Q> for Expr {
    fn from(q: Q) -> Expr {
        Expr::rational(q)
    }
}

impl std::str::FromStr for Expr {
    type Err = ExprError;
    fn from_str(s: &str) -> Result<Expr> {
        parse(s)
    }
}

/// Equality test: canonical forms first, then evaluation at 16 random
/// positive rational points.
pub fn equal(a: &Expr, b: &Expr) -> Equality {
    let d = a.sub(b);
    if d.is_zero() {
        return Equality::Proved;
    }
    eval::probe_zero(&d, &[a, b])
}

/// `equal(e, 0)`.
pub fn is_zero(e: &Expr) -> Equality {
    if e.is_zero() {
        Equality::Proved
    } else {
        eval::probe_zero(e, &[])
    }
}
