use super::{bilinear, unit, zero_truth, HomError, LieAlgebraModel, Result};
use crate::expr::Expr;
use crate::linalg::{self, SMatrix};
use crate::penrose::{scaling_profile, IndexRole, ScaledComponent, ScalingReport, Slot};
use crate::tensor::{self, Truth, T3};

/// Ambrose–Singer data on `𝔪`; all arrays are indexed in complement order
/// with `t[i][j]` the complement vector `T(u_i, u_j)`.
#[derive(Clone, Debug)]
pub struct HomogeneousStructure {
    pub names: Vec<String>,
    pub form: SMatrix,
    pub t: T3,
    /// `τ(X, Y) = T(Y, X) − T(X, Y)`, equal to `−[X, Y]_𝔪`.
    pub tau: T3,
    /// Symmetric part `U`.
    pub u: T3,
    pub is_naturally_reductive: Truth,
}

impl HomogeneousStructure {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// `T(x, y)` for complement vectors.
    pub fn apply(&self, x: &[Expr], y: &[Expr]) -> Vec<Expr> {
        apply3(&self.t, x, y)
    }

    pub fn apply_u(&self, x: &[Expr], y: &[Expr]) -> Vec<Expr> {
        apply3(&self.u, x, y)
    }

    /// `T_ijk = B(T(u_i, u_j), u_k)`.
    pub fn lowered(&self, i: usize, j: usize, k: usize) -> Expr {
        bilinear(&self.form, &self.t[i][j], &unit(self.dim(), k))
    }

    /// Every nonzero lowered component as `((i, j, k), value)`.
    pub fn nonzero_components(&self) -> Vec<((usize, usize, usize), Expr)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = self.lowered(i, j, k);
                    if !zero_truth(&v).holds() {
                        out.push(((i, j, k), v));
                    }
                }
            }
        }
        out
    }

    /// Renders `T_ijk` with basis names, e.g. `T_{u2 u1 u2}`.
    pub fn label(&self, (i, j, k): (usize, usize, usize)) -> String {
        format!(
            "T_{{{} {} {}}}",
            self.names[i], self.names[j], self.names[k]
        )
    }

    /// Whether the lowered tensor is skew in its first two slots.
    pub fn lowered_is_skew(&self) -> Truth {
        let n = self.dim();
        let mut items = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    items.push(self.lowered(i, j, k).add(&self.lowered(j, i, k)));
                }
            }
        }
        tensor::all_zero(&items, tensor::DEFAULT_NODE_BUDGET)
    }
}

fn apply3(t: &T3, x: &[Expr], y: &[Expr]) -> Vec<Expr> {
    let n = x.len();
    let mut out = vec![Expr::zero(); n];
    for (i, xi) in x.iter().enumerate() {
        if xi.is_zero() {
            continue;
        }
        for (j, yj) in y.iter().enumerate() {
            if yj.is_zero() {
                continue;
            }
            let f = xi.mul(yj);
            for (k, v) in t[i][j].iter().enumerate() {
                if !v.is_zero() {
                    out[k] = out[k].add(&f.mul(v));
                }
            }
        }
    }
    out
}

/// `T = ½[·,·]_𝔪 + U` with `2B(U(X,Y),Z) = B(X,[Z,Y]_𝔪) + B([Z,X]_𝔪,Y)`.
pub fn homogeneous_structure(m: &LieAlgebraModel) -> Result<HomogeneousStructure> {
    m.require_reductive("homogeneous_structure")?;
    let k = m.m_dim();
    let binv = linalg::inverse(&m.form)?;
    let half = Expr::frac(1, 2);
    let units: Vec<Vec<Expr>> = (0..k).map(|p| unit(k, p)).collect();
    let mut t = vec![vec![vec![Expr::zero(); k]; k]; k];
    let mut tau = t.clone();
    let mut u = t.clone();
    for i in 0..k {
        for j in 0..k {
            let br = m.bracket_m(&units[i], &units[j]);
            let rhs: Vec<Expr> = (0..k)
                .map(|z| {
                    let a = m.b(&units[i], &m.bracket_m(&units[z], &units[j]));
                    let b = m.b(&m.bracket_m(&units[z], &units[i]), &units[j]);
                    a.add(&b).mul(&half)
                })
                .collect();
            let uc = linalg::mat_vec(&binv, &rhs);
            for c in 0..k {
                t[i][j][c] = br[c].mul(&half).add(&uc[c]);
                tau[i][j][c] = br[c].neg();
            }
            u[i][j] = uc;
        }
    }
    let flat: Vec<&Expr> = u.iter().flatten().flatten().collect();
    let is_naturally_reductive = tensor::all_zero(flat, tensor::DEFAULT_NODE_BUDGET);
    Ok(HomogeneousStructure {
        names: m.m_names(),
        form: m.form.clone(),
        t,
        tau,
        u,
        is_naturally_reductive,
    })
}

/// `T(X_𝔪, X_𝔪)` for `X` given over the full basis.
pub fn structure_contraction(
    m: &LieAlgebraModel,
    s: &HomogeneousStructure,
    x: &[Expr],
) -> Vec<Expr> {
    let xm = m.m_part(x);
    s.apply(&xm, &xm)
}

/// `U` null, `V` null with `B(U, V) = 1`, and `Y_i` mutually orthogonal and
/// orthogonal to both.
#[derive(Clone, Debug)]
pub struct NullFrame {
    pub u: Vec<Expr>,
    pub v: Vec<Expr>,
    pub ys: Vec<Vec<Expr>>,
}

impl NullFrame {
    /// Frame vectors in the order `U, V, Y_1, …` with their roles.
    pub fn members(&self) -> Vec<(IndexRole, &Vec<Expr>)> {
        let mut out = vec![(IndexRole::U, &self.u), (IndexRole::V, &self.v)];
        out.extend(self.ys.iter().map(|y| (IndexRole::Y, y)));
        out
    }

    /// Frame components of a complement vector, same order as `members`.
    pub fn components(&self, form: &SMatrix, x: &[Expr]) -> Result<Vec<Expr>> {
        let mut out = vec![bilinear(form, x, &self.v), bilinear(form, x, &self.u)];
        for y in &self.ys {
            out.push(bilinear(form, x, y).div(&bilinear(form, y, y))?);
        }
        Ok(out)
    }
}

/// Builds a [`NullFrame`] around the null complement vector `u`.
pub fn null_frame(form: &SMatrix, u: &[Expr]) -> Result<NullFrame> {
    let k = u.len();
    match zero_truth(&bilinear(form, u, u)) {
        Truth::False => return Err(HomError::Shape("frame vector is not null".into())),
        Truth::Undecided => return Err(HomError::Undecided("nullity of the frame vector".into())),
        _ => {}
    }
    let (w, bw) = (0..k)
        .map(|p| (unit(k, p), bilinear(form, u, &unit(k, p))))
        .find(|(_, b)| zero_truth(b) == Truth::False)
        .ok_or_else(|| HomError::Shape("frame vector is orthogonal to everything".into()))?;
    let inv = Expr::one().div(&bw)?;
    let c = bilinear(form, &w, &w)
        .mul(&inv)
        .mul(&inv)
        .mul(&Expr::frac(-1, 2));
    let v: Vec<Expr> = w
        .iter()
        .zip(u)
        .map(|(wi, ui)| wi.mul(&inv).add(&ui.mul(&c)))
        .collect();
    let rows = vec![
        (0..k).map(|q| bilinear(form, u, &unit(k, q))).collect(),
        (0..k).map(|q| bilinear(form, &v, &unit(k, q))).collect(),
    ];
    let mut ys: Vec<Vec<Expr>> = Vec::new();
    for y in linalg::s_nullspace(&rows, k) {
        let mut y = y;
        for p in &ys {
            let f = bilinear(form, &y, p).div(&bilinear(form, p, p))?;
            y = y.iter().zip(p).map(|(a, b)| a.sub(&f.mul(b))).collect();
        }
        if zero_truth(&bilinear(form, &y, &y)).holds() {
            return Err(HomError::Shape(
                "transverse block of B is degenerate".into(),
            ));
        }
        ys.push(y);
    }
    Ok(NullFrame {
        u: u.to_vec(),
        v,
        ys,
    })
}

/// Components `T^c_{ab}` in the null frame of `X_𝔪` with their Penrose
/// weights; the verdict says whether the structure survives the limit.
pub fn structure_scaling(
    m: &LieAlgebraModel,
    s: &HomogeneousStructure,
    x: &[Expr],
) -> Result<ScalingReport> {
    let frame = null_frame(&s.form, &m.m_part(x))?;
    let members = frame.members();
    let names: Vec<String> = {
        let mut y = 0;
        members
            .iter()
            .map(|(r, _)| match r {
                IndexRole::U => "u".to_string(),
                IndexRole::V => "v".to_string(),
                IndexRole::Y => {
                    y += 1;
                    format!("y{y}")
                }
            })
            .collect()
    };
    let mut comps = Vec::new();
    for (a, (ra, ea)) in members.iter().enumerate() {
        for (b, (rb, eb)) in members.iter().enumerate() {
            let tab = s.apply(ea, eb);
            let fc = frame.components(&s.form, &tab)?;
            for (c, (rc, _)) in members.iter().enumerate() {
                comps.push(ScaledComponent {
                    label: format!("T^{}_{}{}", names[c], names[a], names[b]),
                    slots: vec![Slot::lower(*ra), Slot::lower(*rb), Slot::upper(*rc)],
                    metric_prefactor: false,
                    value: fc[c].clone(),
                });
            }
        }
    }
    Ok(scaling_profile(&comps))
}

/// `ad(h)|_𝔪` for each isotropy generator, checked to be `B`-skew.
pub fn isotropy_representation(m: &LieAlgebraModel) -> Result<Vec<SMatrix>> {
    if let Err(HomError::NonReductive { op, reason }) =
        m.require_reductive("isotropy_representation")
    {
        return Err(HomError::NonReductive {
            op,
            reason: format!("{reason}; isotropy_representation_quotient gives the action on 𝔤/𝔥"),
        });
    }
    let mats = isotropy_representation_quotient(m);
    let k = m.m_dim();
    for (h, a) in m.isotropy.iter().zip(&mats) {
        for p in 0..k {
            for q in 0..k {
                let v = linalg::mat_mul(&linalg::transpose(a), &m.form)[p][q]
                    .add(&linalg::mat_mul(&m.form, a)[p][q]);
                if !zero_truth(&v).holds() {
                    return Err(HomError::NotInvariant {
                        h: m.basis[*h].clone(),
                        x: m.basis[m.complement[p]].clone(),
                        y: m.basis[m.complement[q]].clone(),
                        value: v,
                    });
                }
            }
        }
    }
    Ok(mats)
}

/// The isotropy action on `𝔤/𝔥`, identified with the complement by
/// projection; agrees with [`isotropy_representation`] on reductive splits.
pub fn isotropy_representation_quotient(m: &LieAlgebraModel) -> Vec<SMatrix> {
    let k = m.m_dim();
    m.isotropy
        .iter()
        .map(|&h| {
            let cols: Vec<Vec<Expr>> = m.complement.iter().map(|&x| m.m_part(&m.c[h][x])).collect();
            (0..k)
                .map(|r| (0..k).map(|c| cols[c][r].clone()).collect())
                .collect()
        })
        .collect()
}
