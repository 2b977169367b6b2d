use super::{Atom, Expr, Monomial, Q};
use num::One;
use std::collections::BTreeMap;
use std::sync::Arc;

impl Expr {
    /// Exact partial derivative with respect to the symbol `var`.
    pub fn diff(&self, var: &str) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            if !mono_depends(m, var) {
                continue;
            }
            for (a, e) in &m.factors {
                let d = atom_power_diff(a, e, var);
                if d.is_zero() {
                    continue;
                }
                let mut rest = m.factors.clone();
                rest.remove(a);
                let r = Expr::term(c.clone(), Monomial { factors: rest });
                out = out.add(&r.mul(&d));
            }
        }
        out
    }

    /// Repeated derivative, one variable after another.
    pub fn diff_all(&self, vars: &[&str]) -> Expr {
        vars.iter().fold(self.clone(), |e, v| e.diff(v))
    }
}

fn mono_depends(m: &Monomial, var: &str) -> bool {
    m.factors
        .iter()
        .any(|(a, e)| e.depends_on(var) || atom_depends(a, var))
}

fn atom_depends(a: &Atom, var: &str) -> bool {
    match a {
        Atom::Sym(s) => &**s == var,
        Atom::Num(_) => false,
        Atom::Exp(x) | Atom::Log(x) | Atom::Sin(x) | Atom::Cos(x) | Atom::Paren(x) => {
            x.depends_on(var)
        }
    }
}

fn atom_expr(a: &Atom) -> Expr {
    Expr::atom(a.clone())
}

fn atom_pow(a: &Atom, e: &Expr) -> Expr {
    let mut f = BTreeMap::new();
    f.insert(a.clone(), e.clone());
    super::build(f)
}

/// d/dvar of the atom itself.
fn atom_diff(a: &Atom, var: &str) -> Expr {
    match a {
        Atom::Sym(s) => {
            if &**s == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Atom::Num(_) => Expr::zero(),
        Atom::Exp(x) => atom_expr(a).mul(&x.diff(var)),
        Atom::Log(x) => x.diff(var).div(x).expect("log argument is nonzero"),
        Atom::Sin(x) => x.cos().mul(&x.diff(var)),
        Atom::Cos(x) => x.sin().neg().mul(&x.diff(var)),
        Atom::Paren(x) => x.diff(var),
    }
}

fn atom_log(a: &Atom) -> Expr {
    match a {
        Atom::Sym(_) | Atom::Sin(_) | Atom::Cos(_) | Atom::Log(_) => {
            Expr::atom(Atom::Log(Arc::new(atom_expr(a))))
        }
        Atom::Num(p) => Expr::atom(Atom::Log(Arc::new(Expr::rational(Q::from_integer(
            p.clone(),
        ))))),
        Atom::Exp(x) => (**x).clone(),
        Atom::Paren(x) => Expr::atom(Atom::Log(x.clone())),
    }
}

/// d/dvar (a^e) = e a^(e-1) a' + a^e log(a) e'.
fn atom_power_diff(a: &Atom, e: &Expr, var: &str) -> Expr {
    let mut out = Expr::zero();
    if atom_depends(a, var) {
        let da = atom_diff(a, var);
        let lower = if e.is_one() {
            Expr::one()
        } else {
            atom_pow(a, &e.sub(&Expr::rational(Q::one())))
        };
        out = e.mul(&lower).mul(&da);
    }
    let de = e.diff(var);
    if !de.is_zero() {
        out = out.add(&atom_pow(a, e).mul(&atom_log(a)).mul(&de));
    }
    out
}
