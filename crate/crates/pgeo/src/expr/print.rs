use super::{Atom, Expr, Monomial, Q};
use num::{One, Signed, ToPrimitive};
use std::cmp::Ordering;
use std::fmt;

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            write_term(f, &c.abs(), m)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Expr({self})")
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, &Q::one(), self)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&atom_base(self))
    }
}

fn atom_base(a: &Atom) -> String {
    match a {
        Atom::Sym(s) => s.to_string(),
        Atom::Num(p) => p.to_string(),
        Atom::Exp(x) => format!("exp({x})"),
        Atom::Log(x) => format!("log({x})"),
        Atom::Sin(x) => format!("sin({x})"),
        Atom::Cos(x) => format!("cos({x})"),
        Atom::Paren(x) => format!("({x})"),
    }
}

/// Prints `a^e` for an exponent that is positive in the additive order.
fn power(a: &Atom, e: &Expr) -> String {
    if e.is_one() {
        return atom_base(a);
    }
    let half = Q::new(1.into(), 2.into());
    if e.as_rational().is_some_and(|q| q == half) {
        let inner = match a {
            Atom::Paren(x) => x.to_string(),
            _ => atom_base(a),
        };
        return format!("sqrt({inner})");
    }
    match e.as_rational() {
        Some(q) if q.is_integer() => format!("{}^{}", atom_base(a), q),
        _ => format!("{}^({})", atom_base(a), e),
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, c: &Q, m: &Monomial) -> fmt::Result {
    let mut num: Vec<String> = Vec::new();
    let mut den: Vec<String> = Vec::new();
    // a joint denominator is multiplied out by the parser, so parenthesised
    // sums that must stay separate, and the exponential-like factors that
    // would be distributed over them, are written as chained divisions
    let parens: i64 = m
        .factors
        .iter()
        .filter(|(a, e)| matches!(a, Atom::Paren(_)) && e.order_sign() == Ordering::Less)
        .map(|(_, e)| {
            e.as_rational()
                .filter(|q| q.is_integer())
                .and_then(|q| q.to_integer().to_i64())
                .map_or(1, |n| -n)
        })
        .sum();
    let mut trailing: Vec<String> = Vec::new();
    for (a, e) in &m.factors {
        if e.order_sign() == Ordering::Less {
            let n = e
                .as_rational()
                .filter(|q| q.is_integer())
                .and_then(|q| q.to_integer().to_i64());
            match (a, n) {
                (Atom::Paren(_), Some(n)) if parens > 1 => {
                    for _ in 0..-n {
                        trailing.push(atom_base(a));
                    }
                }
                (Atom::Exp(_), _) | (_, None) if parens > 0 => trailing.push(power(a, &e.neg())),
                _ => den.push(power(a, &e.neg())),
            }
        } else {
            num.push(power(a, e));
        }
    }
    let cn = c.numer().clone();
    let cd = c.denom().clone();
    let mut top = Vec::new();
    if !cn.is_one() || num.is_empty() {
        top.push(cn.to_string());
    }
    top.extend(num);
    f.write_str(&top.join("*"))?;
    let mut bottom = Vec::new();
    if !cd.is_one() {
        bottom.push(cd.to_string());
    }
    bottom.extend(den);
    match bottom.len() {
        0 => {}
        1 => write!(f, "/{}", bottom[0])?,
        _ => write!(f, "/({})", bottom.join("*"))?,
    }
    for t in trailing {
        write!(f, "/{t}")?;
    }
    Ok(())
}
