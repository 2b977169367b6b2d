use super::*;
use crate::expr::{self, Expr};
use crate::linalg;
use crate::penrose::ScalingVerdict;
use crate::tensor::{self, Truth};
use std::collections::BTreeMap;

fn p(s: &str) -> Expr {
    expr::parse(s).unwrap()
}

fn k5() -> LieAlgebraModel {
    let mut m = LieAlgebraModel::new("k5", &["e1", "u1", "u2", "u3", "u4", "u5"], &["e1"]).unwrap();
    for (a, b, v) in [
        ("e1", "u1", "u3"),
        ("e1", "u2", "(1/2)*u4"),
        ("e1", "u3", "-u1"),
        ("e1", "u4", "-(1/2)*u2"),
        ("u1", "u2", "u2"),
        ("u1", "u3", "-4*e1"),
        ("u1", "u4", "-u4"),
        ("u2", "u3", "-u4"),
        ("u3", "u4", "u2"),
    ] {
        m.set_bracket(a, b, v).unwrap();
    }
    m.set_form_diagonal(&[1, 1, 1, 1, -1]).unwrap();
    m.with_coset(
        &["u1", "u2", "u3", "u4", "u5"],
        &["x1", "x2", "x3", "x4", "x5"],
    )
    .unwrap()
}

fn k112() -> LieAlgebraModel {
    let mut m = LieAlgebraModel::new("k112", &["e1", "u1", "u2", "u3", "u4"], &["e1"]).unwrap();
    for (a, b, v) in [
        ("e1", "u1", "u3"),
        ("e1", "u3", "-u1"),
        ("u1", "u3", "-u2"),
        ("u1", "u4", "u1"),
        ("u2", "u4", "2*u2"),
        ("u3", "u4", "u3"),
    ] {
        m.set_bracket(a, b, v).unwrap();
    }
    m.set_form_diagonal(&[1, 1, 1, -1]).unwrap();
    m
}

fn u_vector(m: &LieAlgebraModel) -> Vec<Expr> {
    m.parse_vector("u2 + (1/sqrt(2))*u3 + sqrt(3/2)*u5 + sqrt(2)*e1")
        .unwrap()
}

#[test]
fn validates_fixtures() {
    let r = validate_algebra(&k5()).unwrap();
    assert!(r.is_reductive.holds());
    assert_eq!(r.is_symmetric, Truth::False);
    let r = validate_algebra(&k112()).unwrap();
    assert!(r.is_reductive.holds());
    assert_eq!(r.is_symmetric, Truth::False);
}

#[test]
fn abelian_is_symmetric() {
    let mut m = LieAlgebraModel::new("flat", &["a", "b", "c"], &[]).unwrap();
    m.set_form_diagonal(&[1, 1, -1]).unwrap();
    let r = validate_algebra(&m).unwrap();
    assert_eq!(r.is_symmetric, Truth::Proved);
    let s = homogeneous_structure(&m).unwrap();
    assert!(s.nonzero_components().is_empty());
}

#[test]
fn perturbed_constant_names_jacobi_triple() {
    let mut m = k112();
    m.set_bracket("u1", "u4", "2*u1").unwrap();
    match validate_algebra(&m) {
        Err(HomError::Jacobi { triple, .. }) => {
            let names = [triple.0.as_str(), triple.1.as_str(), triple.2.as_str()];
            assert!(names.contains(&"u4"), "{names:?}");
        }
        other => panic!("expected a Jacobi failure, got {other:?}"),
    }
}

#[test]
fn degenerate_form_and_invariance_errors() {
    let mut m = k112();
    m.set_form_diagonal(&[1, 0, 1, -1]).unwrap();
    assert!(matches!(
        validate_algebra(&m),
        Err(HomError::DegenerateForm(_))
    ));
    let mut m = k112();
    m.set_form_diagonal(&[1, 1, 2, -1]).unwrap();
    assert!(matches!(
        validate_algebra(&m),
        Err(HomError::NotInvariant { .. })
    ));
}

#[test]
fn k5_structure_components() {
    let m = k5();
    let s = homogeneous_structure(&m).unwrap();
    let got: BTreeMap<String, Expr> = s
        .nonzero_components()
        .into_iter()
        .map(|((i, j, k), v)| (format!("{}{}{}", i + 1, j + 1, k + 1), v))
        .collect();
    let mut want = BTreeMap::new();
    for key in ["212", "234", "432", "441"] {
        want.insert(key.to_string(), Expr::int(-1));
    }
    for key in ["221", "243", "414", "423"] {
        want.insert(key.to_string(), Expr::int(1));
    }
    assert_eq!(got, want);
    assert_eq!(s.is_naturally_reductive, Truth::False);
    assert_eq!(s.lowered_is_skew(), Truth::False);
}

#[test]
fn structure_identities() {
    for m in [k5(), k112()] {
        let s = homogeneous_structure(&m).unwrap();
        let k = m.m_dim();
        for i in 0..k {
            for j in 0..k {
                let (ei, ej) = (unit(k, i), unit(k, j));
                let br = m.bracket_m(&ei, &ej);
                let t_ij = s.apply(&ei, &ej);
                let t_ji = s.apply(&ej, &ei);
                for c in 0..k {
                    assert!(s.tau[i][j][c].add(&br[c]).is_zero());
                    assert!(t_ji[c].sub(&t_ij[c]).sub(&s.tau[i][j][c]).is_zero());
                    assert!(expr::is_zero(&s.u[i][j][c].sub(&s.u[j][i][c])).holds());
                }
            }
        }
        assert_eq!(
            s.is_naturally_reductive.holds(),
            s.lowered_is_skew().holds()
        );
    }
}

#[test]
fn u_is_absolutely_geodetic_and_null() {
    let m = k5();
    let r = geodesic_vector_test(&m, &u_vector(&m)).unwrap();
    let r = r.geodesic().expect("geodesic");
    assert!(r.lambda.is_zero());
    assert!(r.is_null.holds());
    assert_eq!(r.is_canonical, Truth::False);
}

#[test]
fn contraction_and_blow_up_in_original_split() {
    let m = k5();
    let s = homogeneous_structure(&m).unwrap();
    let t = structure_contraction(&m, &s, &u_vector(&m));
    let want = m.m_part(&m.parse_vector("u1 - (1/sqrt(2))*u4").unwrap());
    for (a, b) in t.iter().zip(&want) {
        assert!(expr::equal(a, b).holds(), "{a} vs {b}");
    }
    let rep = canonical_geodesic_test(&m, &u_vector(&m)).unwrap();
    assert_eq!(
        rep.scaling.as_ref().unwrap().verdict,
        ScalingVerdict::BlowsUp
    );
    assert_eq!(rep.scaling_matches_canonical(), Some(true));
}

fn k5_sub() -> LieAlgebraModel {
    let m = k5();
    let gens: Vec<Vec<Expr>> = vec![u_vector(&m), m.e(1), m.e(2), m.e(4), m.e(5)];
    transitive_subalgebra(&m, &gens, &["U", "u1", "u2", "u4", "u5"]).unwrap()
}

#[test]
fn transitive_subalgebra_brackets() {
    let sub = k5_sub();
    validate_algebra(&sub).unwrap();
    let want = sub.parse_vector("2*U - 3*u2 - sqrt(6)*u5").unwrap();
    for (a, b) in sub.c[0][1].iter().zip(&want) {
        assert!(expr::equal(a, b).holds(), "{a} vs {b}");
    }
    let want = sub.parse_vector("sqrt(2)*u4").unwrap();
    for (a, b) in sub.c[0][2].iter().zip(&want) {
        assert!(expr::equal(a, b).holds());
    }
}

#[test]
fn subalgebra_makes_u_canonical_with_finite_limit() {
    let sub = k5_sub();
    let s = homogeneous_structure(&sub).unwrap();
    let x = sub.e(0);
    let t = structure_contraction(&sub, &s, &x);
    assert!(t.iter().all(|c| expr::is_zero(c).holds()));
    let rep = canonical_geodesic_test(&sub, &x).unwrap();
    assert!(rep.is_canonical.holds());
    assert!(rep.geodesic.lambda.is_zero());
    assert_eq!(
        rep.scaling.as_ref().unwrap().verdict,
        ScalingVerdict::WellDefined
    );
}

#[test]
fn subalgebra_search_finds_the_u_subalgebra() {
    let m = k5();
    let found = subalgebra_search(&m, &u_vector(&m), "U").unwrap();
    assert!(found
        .iter()
        .any(|c| c.generators == ["U", "u1", "u2", "u4", "u5"]));
    assert!(found.iter().all(|c| c.report.is_canonical.holds()));
}

#[test]
fn komrakov_first_family() {
    let m = k112();
    let x = m.parse_vector("A*u4 + A*u2 + B*e1").unwrap();
    let r = geodesic_vector_test(&m, &x).unwrap();
    let r = r.geodesic().expect("geodesic");
    assert!(expr::equal(&r.lambda, &p("-2*A")).holds(), "{}", r.lambda);
    assert!(r.is_null.holds());
}

#[test]
fn komrakov_second_family() {
    let m = k112();
    let mut subs = BTreeMap::new();
    subs.insert("C".to_string(), p("sqrt(A^2 + B^2)"));
    let literal = m.parse_vector("A*u2 + B*u3 + C*u4").unwrap();
    let r = geodesic_vector_test_with(&m, &literal, &subs).unwrap();
    assert!(matches!(r, GeodesicOutcome::NotGeodesic { .. }));
    let corrected = m.parse_vector("A*u1 + B*u3 + C*u4").unwrap();
    let r = geodesic_vector_test_with(&m, &corrected, &subs).unwrap();
    let r = r.geodesic().expect("geodesic");
    assert!(
        expr::equal(&r.lambda, &p("-sqrt(A^2 + B^2)")).holds(),
        "{}",
        r.lambda
    );
    assert!(r.is_null.holds());
}

#[test]
fn zero_projection_is_rejected() {
    let m = k112();
    assert!(matches!(
        geodesic_vector_test(&m, &m.e(0)),
        Err(HomError::ZeroProjection(_))
    ));
}

#[test]
fn non_null_geodesic_vectors_have_zero_lambda() {
    let m = k112();
    for v in ["u2", "u1 + u3", "u4"] {
        let x = m.parse_vector(v).unwrap();
        if let GeodesicOutcome::Geodesic(r) = geodesic_vector_test(&m, &x).unwrap() {
            if !r.is_null.holds() {
                assert!(r.lambda.is_zero(), "{v}: {}", r.lambda);
            }
        }
    }
}

#[test]
fn searches_on_komrakov() {
    let m = k112();
    let opts = SearchOptions {
        require_absolute: true,
        starts: 400,
        seed: 7,
        ..Default::default()
    };
    let rep = find_null_geodesic_vectors(&m, &opts).unwrap();
    assert!(rep.hits.is_empty(), "{:?}", rep.hits);
    let opts = SearchOptions {
        require_absolute: false,
        starts: 400,
        seed: 7,
        ..Default::default()
    };
    let rep = find_null_geodesic_vectors(&m, &opts).unwrap();
    assert!(!rep.hits.is_empty());
    for h in &rep.hits {
        let [b, x1, x2, x3, x4] = h.x[..] else {
            panic!()
        };
        let first = x1.abs() < 1e-6 && x3.abs() < 1e-6 && (x2.abs() - x4.abs()).abs() < 1e-6;
        let second = x2.abs() < 1e-6 && (x1 * x1 + x3 * x3 - x4 * x4).abs() < 1e-6;
        assert!(
            first || second,
            "hit outside both families: {:?} (e1 = {b})",
            h.x
        );
        if first {
            assert!((h.lambda + 2.0 * x4).abs() < 1e-6);
        } else {
            assert!((h.lambda + x4).abs() < 1e-6);
        }
    }
    assert!(rep.hits.iter().any(|h| h.exact.is_some()));
}

#[test]
fn flat_abelian_search_finds_null_vectors_with_zero_lambda() {
    let mut m = LieAlgebraModel::new("flat", &["a", "b"], &[]).unwrap();
    m.set_form_diagonal(&[1, -1]).unwrap();
    let rep = find_null_geodesic_vectors(
        &m,
        &SearchOptions {
            starts: 50,
            ..Default::default()
        },
    )
    .unwrap();
    assert!(!rep.hits.is_empty());
    assert!(rep
        .hits
        .iter()
        .all(|h| h.lambda.abs() < 1e-9 && (h.x[0].abs() - h.x[1].abs()).abs() < 1e-9));
}

#[test]
fn isotropy_representation_rotation_block() {
    let m = k112();
    let reps = isotropy_representation(&m).unwrap();
    assert_eq!(reps.len(), 1);
    let a = &reps[0];
    // columns are images: u1 ↦ u3, u3 ↦ −u1
    assert_eq!(a[2][0], Expr::one());
    assert_eq!(a[0][2], Expr::int(-1));
    let mut flat = LieAlgebraModel::new("flat", &["a"], &[]).unwrap();
    flat.set_form_diagonal(&[1]).unwrap();
    assert!(isotropy_representation(&flat).unwrap().is_empty());
    assert_eq!(isotropy_representation(&k5()).unwrap().len(), 1);
}

fn power_law() -> LieAlgebraModel {
    // Killing algebra of du dv + u^(2 mu) dy^2 with e = K - F(1) P as isotropy
    let mut m = LieAlgebraModel::new("power-law", &["e", "D", "Z", "P"], &["e"]).unwrap();
    m.claims_reductive = false;
    for (a, b, v) in [
        ("Z", "D", "Z"),
        ("P", "D", "mu*P"),
        ("e", "D", "(1 - mu)*e + P"),
        ("P", "e", "-2*Z"),
    ] {
        m.set_bracket(a, b, v).unwrap();
    }
    m.set_form("D", "Z", p("-1/2")).unwrap();
    m.set_form("P", "P", Expr::one()).unwrap();
    m
}

#[test]
fn non_reductive_presentation_refuses_structure() {
    let m = power_law();
    let r = validate_algebra(&m);
    assert!(r.is_err() || r.as_ref().unwrap().is_reductive == Truth::False);
    assert!(matches!(
        homogeneous_structure(&m),
        Err(HomError::NonReductive { .. })
    ));
    assert!(matches!(
        isotropy_representation(&m),
        Err(HomError::NonReductive { .. })
    ));
    assert_eq!(isotropy_representation_quotient(&m).len(), 1);
    let mut claimed = m.clone();
    claimed.claims_reductive = true;
    assert!(matches!(
        validate_algebra(&claimed),
        Err(HomError::NotReductive { .. })
    ));
}

#[test]
fn coset_one_forms_of_k5() {
    let m = k5();
    let cm = coset_metric(&m).unwrap();
    let th = &cm.theta;
    assert!(
        expr::equal(&th[0][1], &p("cosh(2*x3)")).holds(),
        "{}",
        th[0][1]
    );
    assert!(
        expr::equal(&th[0][2], &p("x4*sinh(2*x3) + x2*cosh(x3)")).holds(),
        "{}",
        th[0][2]
    );
    assert!(expr::equal(&th[1][2], &p("cosh(x3)")).holds());
    assert!(expr::equal(&th[2][2], &p("x4")).holds());
    assert!(expr::equal(&th[2][3], &Expr::one()).holds());
    assert!(expr::equal(&th[4][5], &Expr::one()).holds());
}

#[test]
fn coset_isotropy_fields_are_killing() {
    let m = k5();
    let cm = coset_metric(&m).unwrap();
    let coords = cm.metric.coords.clone();
    let sample: Vec<Q> = [1, 2, 1, 3, 5]
        .iter()
        .map(|&i| Q::new(i.into(), 7.into()))
        .collect();
    let metric = cm.metric.clone().with_sample(sample);
    for xi in [m.e(0), m.e(5), m.e(2)] {
        let v = fundamental_field(&m, &cm, &xi).unwrap();
        assert_eq!(v.dim(), coords.len());
        assert!(tensor::is_killing(&metric, &v).unwrap().holds());
    }
}

#[test]
fn abelian_coset_is_flat() {
    let mut m = LieAlgebraModel::new("flat", &["a", "b"], &[]).unwrap();
    m.set_form_diagonal(&[1, -1]).unwrap();
    let m = m.with_coset(&["a", "b"], &["x", "y"]).unwrap();
    let cm = coset_metric(&m).unwrap();
    assert_eq!(
        cm.metric.g,
        vec![
            vec![Expr::one(), Expr::zero()],
            vec![Expr::zero(), Expr::int(-1)]
        ]
    );
}

#[test]
fn heisenberg_coset_matches_series() {
    let mut m = LieAlgebraModel::new("heis", &["p", "q", "z"], &[]).unwrap();
    m.set_bracket("p", "q", "z").unwrap();
    m.set_form_diagonal(&[1, 1, 1]).unwrap();
    let m = m.with_coset(&["p", "q", "z"], &["a", "b", "c"]).unwrap();
    let cm = coset_metric(&m).unwrap();
    // exp(−t ad) = 1 − t ad + t² ad²/2 for a step-two nilpotent algebra
    for (g, x) in ["p", "q", "z"].iter().zip(["a", "b", "c"]) {
        let i = m.index(g).unwrap();
        let ad = m.ad_matrix(i);
        let t = Expr::sym(x);
        let ad2 = linalg::mat_mul(&ad, &ad);
        let n = m.dim();
        let series: Vec<Vec<Expr>> = (0..n)
            .map(|r| {
                (0..n)
                    .map(|c| {
                        let id = if r == c { Expr::one() } else { Expr::zero() };
                        id.sub(&t.mul(&ad[r][c]))
                            .add(&t.mul(&t).mul(&ad2[r][c]).mul(&Expr::frac(1, 2)))
                    })
                    .collect()
            })
            .collect();
        let q: linalg::QMatrix = linalg::to_rational(
            &ad.iter()
                .map(|r| r.iter().map(Expr::neg).collect())
                .collect(),
        )
        .unwrap();
        let closed = linalg::exp_matrix(&q, &t).unwrap();
        assert_eq!(closed, series);
    }
    assert!(
        expr::equal(&cm.theta[0][2], &p("b")).holds(),
        "{}",
        cm.theta[0][2]
    );
    let v = fundamental_field(&m, &cm, &m.e(2)).unwrap();
    assert!(tensor::is_killing(&cm.metric, &v).unwrap().holds());
}
