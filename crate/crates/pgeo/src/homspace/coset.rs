use super::{CosetData, HomError, LieAlgebraModel, Result};
use crate::expr::Expr;
use crate::linalg::{self, SMatrix};
use crate::tensor::{MetricModel, VectorField};

#[derive(Clone, Debug)]
pub struct CosetMetric {
    pub metric: MetricModel,
    /// `theta[i]` is the `𝔤`-valued coefficient of `dx_i` in `σ⁻¹dσ`.
    pub theta: Vec<Vec<Expr>>,
    /// `exp(−x_j ad(b_j))` for each coset generator, in coset order.
    factors: Vec<SMatrix>,
}

impl CosetMetric {
    /// `Ad(σ⁻¹)` as a matrix on `𝔤`.
    pub fn ad_sigma_inverse(&self) -> SMatrix {
        let n = self.theta[0].len();
        self.factors
            .iter()
            .fold(linalg::identity(n), |acc, f| linalg::mat_mul(f, &acc))
    }
}

fn coset_data(m: &LieAlgebraModel) -> Result<&CosetData> {
    let c = m.coset.as_ref().ok_or(HomError::NoCoset)?;
    if c.order.len() != m.m_dim() {
        return Err(HomError::Shape(format!(
            "coset order has {} generators, the complement has dimension {}",
            c.order.len(),
            m.m_dim()
        )));
    }
    Ok(c)
}

/// Maurer–Cartan form of `σ(x) = exp(x_1 b_1)⋯exp(x_N b_N)` and the metric
/// `B(θ_𝔪, θ_𝔪)`.
pub fn coset_metric(m: &LieAlgebraModel) -> Result<CosetMetric> {
    let data = coset_data(m)?;
    let n = m.dim();
    let mut factors = Vec::with_capacity(data.order.len());
    for (&g, x) in data.order.iter().zip(&data.coords) {
        let neg_ad: SMatrix = m
            .ad_matrix(g)
            .iter()
            .map(|r| r.iter().map(Expr::neg).collect())
            .collect();
        let q = linalg::to_rational(&neg_ad).map_err(|e| HomError::UnsupportedAdjoint {
            generator: m.basis[g].clone(),
            reason: e.to_string(),
        })?;
        let f =
            linalg::exp_matrix(&q, &Expr::sym(x)).map_err(|e| HomError::UnsupportedAdjoint {
                generator: m.basis[g].clone(),
                reason: e.to_string(),
            })?;
        factors.push(f);
    }
    let big_n = data.order.len();
    let mut theta = vec![Vec::new(); big_n];
    let mut acc = linalg::identity(n);
    for i in (0..big_n).rev() {
        theta[i] = linalg::mat_vec(&acc, &m.e(data.order[i]));
        acc = linalg::mat_mul(&acc, &factors[i]);
    }
    let thm: Vec<Vec<Expr>> = theta.iter().map(|t| m.m_part(t)).collect();
    let g: SMatrix = (0..big_n)
        .map(|i| (0..big_n).map(|j| m.b(&thm[i], &thm[j])).collect())
        .collect();
    let metric = MetricModel::new(data.coords.clone(), g)?;
    Ok(CosetMetric {
        metric,
        theta,
        factors,
    })
}

/// Fundamental vector field of `ξ` for the left action on the coset:
/// `θ_𝔪(V) = (Ad(σ⁻¹)ξ)_𝔪`.
pub fn fundamental_field(
    m: &LieAlgebraModel,
    cm: &CosetMetric,
    xi: &[Expr],
) -> Result<VectorField> {
    let k = m.m_dim();
    let thm: SMatrix = (0..k)
        .map(|r| cm.theta.iter().map(|t| m.m_part(t)[r].clone()).collect())
        .collect();
    let inv = linalg::inverse(&thm)?;
    let rhs = m.m_part(&linalg::mat_vec(&cm.ad_sigma_inverse(), xi));
    Ok(VectorField::new(linalg::mat_vec(&inv, &rhs)))
}
