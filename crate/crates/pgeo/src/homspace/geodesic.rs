use super::structure::{homogeneous_structure, structure_contraction, structure_scaling};
use super::{zero_truth, HomError, LieAlgebraModel, Result};
use crate::expr::Expr;
use crate::penrose::{ScalingReport, ScalingVerdict};
use crate::tensor::Truth;
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
pub struct GeodesicVectorResult {
    pub vector: Vec<Expr>,
    pub lambda: Expr,
    pub is_null: Truth,
    /// `λ = 0`.
    pub is_absolute: Truth,
    /// `X ∈ 𝔪`.
    pub is_canonical: Truth,
    /// Weakest verdict among the residual equations.
    pub confidence: Truth,
}

#[derive(Clone, Debug)]
pub enum GeodesicOutcome {
    Geodesic(GeodesicVectorResult),
    /// Some equation has a residual that is provably nonzero.
    NotGeodesic {
        witness: String,
        residual: Expr,
    },
    Undecided {
        witness: String,
        residual: Expr,
    },
}

impl GeodesicOutcome {
    pub fn geodesic(&self) -> Option<&GeodesicVectorResult> {
        match self {
            GeodesicOutcome::Geodesic(r) => Some(r),
            _ => None,
        }
    }
}

/// Tests `B(X_𝔪, [X, Z]_𝔪) = λ B(X_𝔪, Z_𝔪)` for every basis element `Z`.
pub fn geodesic_vector_test(m: &LieAlgebraModel, x: &[Expr]) -> Result<GeodesicOutcome> {
    geodesic_vector_test_with(m, x, &BTreeMap::new())
}

/// As [`geodesic_vector_test`], after substituting `subs` into every
/// equation; used to impose constraints such as `C = sqrt(A^2 + B^2)`.
pub fn geodesic_vector_test_with(
    m: &LieAlgebraModel,
    x: &[Expr],
    subs: &BTreeMap<String, Expr>,
) -> Result<GeodesicOutcome> {
    if x.len() != m.dim() {
        return Err(HomError::Shape(format!(
            "vector has {} components, algebra has {}",
            x.len(),
            m.dim()
        )));
    }
    let x: Vec<Expr> = x
        .iter()
        .map(|c| c.subs(subs))
        .collect::<std::result::Result<_, _>>()?;
    let xm = m.m_part(&x);
    if xm.iter().all(|c| zero_truth(c).holds()) {
        return Err(HomError::ZeroProjection(m.display_vector(&x)));
    }
    let eqs: Vec<(String, Expr, Expr)> = (0..m.dim())
        .map(|z| {
            let lhs = m.b(&xm, &m.m_part(&m.bracket(&x, &m.e(z))));
            let zm = m.m_part(&m.e(z));
            (m.basis[z].clone(), lhs, m.b(&xm, &zm))
        })
        .collect();
    let pivot = eqs.iter().find(|(_, _, b)| zero_truth(b) == Truth::False);
    let lambda = match pivot {
        Some((_, a, b)) => a.div(b)?,
        None => return Err(HomError::Undecided("no equation determines λ".into())),
    };
    let mut confidence = Truth::Proved;
    for (name, a, b) in &eqs {
        let r = a.sub(&lambda.mul(b));
        match zero_truth(&r) {
            Truth::False => {
                return Ok(GeodesicOutcome::NotGeodesic {
                    witness: name.clone(),
                    residual: r,
                })
            }
            Truth::Undecided => {
                return Ok(GeodesicOutcome::Undecided {
                    witness: name.clone(),
                    residual: r,
                })
            }
            t => confidence = confidence.and(t),
        }
    }
    let is_null = zero_truth(&m.b(&xm, &xm));
    let is_absolute = zero_truth(&lambda);
    let is_canonical = m
        .h_part(&x)
        .iter()
        .fold(Truth::Proved, |acc, c| acc.and(zero_truth(c)));
    Ok(GeodesicOutcome::Geodesic(GeodesicVectorResult {
        vector: x,
        lambda,
        is_null,
        is_absolute,
        is_canonical,
        confidence,
    }))
}

#[derive(Clone, Debug)]
pub struct CanonicalReport {
    pub geodesic: GeodesicVectorResult,
    pub is_canonical: Truth,
    /// `T(X_𝔪, X_𝔪)` over the complement.
    pub contraction: Vec<Expr>,
    /// Penrose scaling of the homogeneous structure, for null `X`.
    pub scaling: Option<ScalingReport>,
}

impl CanonicalReport {
    /// Whether the structure limit is well defined exactly when `X` is
    /// canonical for this split.
    pub fn scaling_matches_canonical(&self) -> Option<bool> {
        self.scaling
            .as_ref()
            .map(|s| (s.verdict == ScalingVerdict::WellDefined) == self.is_canonical.holds())
    }
}

/// Canonical-geodesic flags for a geodesic vector `X`.
pub fn canonical_geodesic_test(m: &LieAlgebraModel, x: &[Expr]) -> Result<CanonicalReport> {
    m.require_reductive("canonical_geodesic_test")?;
    let geodesic = match geodesic_vector_test(m, x)? {
        GeodesicOutcome::Geodesic(r) => r,
        GeodesicOutcome::NotGeodesic { witness, residual } => {
            return Err(HomError::NotGeodesic {
                vector: m.display_vector(x),
                witness,
                residual,
            })
        }
        GeodesicOutcome::Undecided { witness, .. } => {
            return Err(HomError::Undecided(format!(
                "geodesic equation for Z = {witness}"
            )))
        }
    };
    let s = homogeneous_structure(m)?;
    let contraction = structure_contraction(m, &s, x);
    let scaling = if geodesic.is_null.holds() {
        Some(structure_scaling(m, &s, x)?)
    } else {
        None
    };
    Ok(CanonicalReport {
        is_canonical: geodesic.is_canonical,
        geodesic,
        contraction,
        scaling,
    })
}
