use super::*;
use crate::expr::parse;
use crate::homspace::homogeneous_structure;
use crate::penrose::{penrose_limit, validate_adapted, Roles};
use crate::tensor::{curvature_with, CurvatureOptions};
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn qm(rows: &[&[i64]]) -> QMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| qi(x)).collect())
        .collect()
}

fn zero(k: usize) -> QMatrix {
    vec![vec![Q::zero(); k]; k]
}

fn rosen(line: &str, coords: &[&str]) -> AdaptedMetric {
    let c: Vec<String> = coords.iter().map(|s| s.to_string()).collect();
    let m = MetricModel::from_line_element(c.clone(), line).unwrap();
    validate_adapted(&m, &Roles::new(&c, "u", "v")).unwrap()
}

fn no_covariant() -> CurvatureOptions {
    CurvatureOptions {
        covariant: false,
        ..CurvatureOptions::default()
    }
}

#[test]
fn data_invariants() {
    let a0 = qm(&[&[1, 2], &[2, 3]]);
    let f = qm(&[&[0, 1], &[-1, 0]]);
    assert!(PlaneWaveData::new(a0.clone(), f.clone(), PlaneWaveClass::Smooth).is_ok());
    assert!(matches!(
        PlaneWaveData::new(qm(&[&[1, 2], &[3, 3]]), f.clone(), PlaneWaveClass::Smooth),
        Err(PlaneWaveError::NotSymmetric(..))
    ));
    assert!(matches!(
        PlaneWaveData::new(a0.clone(), qm(&[&[0, 1], &[1, 0]]), PlaneWaveClass::Smooth),
        Err(PlaneWaveError::NotSkew(..))
    ));
    let s = PlaneWaveData::with_parameters(a0.clone(), f.clone(), [qi(1), qi(0), qi(1)]).unwrap();
    assert_eq!(s.class, PlaneWaveClass::Singular);
    let u = PlaneWaveData::with_parameters(a0.clone(), f.clone(), [qi(2), qi(1), qi(3)]).unwrap();
    assert_eq!(u.class, PlaneWaveClass::Unclassified);
    let mut bad = s.clone();
    bad.abc = [qi(0), qi(1), qi(1)];
    assert!(matches!(
        bad.validate(),
        Err(PlaneWaveError::Parameters { .. })
    ));
    assert!(PlaneWaveData::new(a0, f, PlaneWaveClass::Unclassified).is_err());
}

#[test]
fn cahen_wallach_from_diagonal() {
    let d = PlaneWaveData::new(qm(&[&[-1, 0], &[0, 3]]), zero(2), PlaneWaveClass::Smooth).unwrap();
    let m = build_bo_metric(&d).unwrap();
    assert_eq!(m.g[0][0], parse("-z1^2 + 3*z2^2").unwrap());
    assert_eq!(m.g[0][1], Expr::one());
    let pack = tensor::curvature(&m).unwrap();
    assert_eq!(pack.flags.is_locally_symmetric, Truth::Proved);
    assert_eq!(pack.flags.is_flat, Truth::False);
}

#[test]
fn flat_when_trivial() {
    let d = PlaneWaveData::new(zero(2), zero(2), PlaneWaveClass::Smooth).unwrap();
    let m = build_bo_metric(&d).unwrap();
    assert_eq!(tensor::curvature(&m).unwrap().flags.is_flat, Truth::Proved);
    let alg = bo_isometry_algebra(&d).unwrap();
    assert_eq!(alg.dim(), 6);
}

#[test]
fn rotating_profile() {
    let d = PlaneWaveData::new(
        qm(&[&[1, 0], &[0, 0]]),
        qm(&[&[0, 1], &[-1, 0]]),
        PlaneWaveClass::Smooth,
    )
    .unwrap();
    let p = bo_profile(&d).unwrap();
    assert!(
        expr::equal(&p[0][0], &parse("cos(xp)^2").unwrap()).holds(),
        "{}",
        p[0][0]
    );
    assert!(
        expr::equal(&p[0][1], &parse("-sin(xp)*cos(xp)").unwrap()).holds(),
        "{}",
        p[0][1]
    );
    // trace is constant
    assert!(expr::equal(&p[0][0].add(&p[1][1]), &Expr::one()).holds());
}

#[test]
fn singular_profile_has_log_rotation() {
    let d = PlaneWaveData::new(
        qm(&[&[1, 0], &[0, 0]]),
        qm(&[&[0, 1], &[-1, 0]]),
        PlaneWaveClass::Singular,
    )
    .unwrap();
    let p = bo_profile(&d).unwrap();
    assert!(
        expr::equal(&p[0][0], &parse("cos(log(xp))^2/xp^2").unwrap()).holds(),
        "{}",
        p[0][0]
    );
}

fn ricci_only_plus_plus(d: &PlaneWaveData) {
    let m = build_bo_metric(d).unwrap();
    let pack = curvature_with(&m, &no_covariant()).unwrap();
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            if (i, j) != (0, 0) {
                assert!(
                    expr::is_zero(&pack.ricci[i][j]).holds(),
                    "R_{i}{j} = {}",
                    pack.ricci[i][j]
                );
            }
        }
    }
    let p = bo_profile(d).unwrap();
    let tr = (0..p.len()).fold(Expr::zero(), |acc, i| acc.add(&p[i][i]));
    assert!(
        expr::equal(&pack.ricci[0][0], &tr.neg()).holds(),
        "R_++ = {}",
        pack.ricci[0][0]
    );
    let traceless = (0..d.transverse_dim())
        .map(|i| d.a0[i][i].clone())
        .sum::<Q>()
        .is_zero();
    assert_eq!(expr::is_zero(&pack.ricci[0][0]).holds(), traceless);
}

#[test]
fn ricci_is_null_dust() {
    let f = qm(&[&[0, 2], &[-2, 0]]);
    ricci_only_plus_plus(
        &PlaneWaveData::new(qm(&[&[1, 2], &[2, -3]]), f.clone(), PlaneWaveClass::Smooth).unwrap(),
    );
    ricci_only_plus_plus(
        &PlaneWaveData::new(qm(&[&[1, 2], &[2, -1]]), f.clone(), PlaneWaveClass::Smooth).unwrap(),
    );
    ricci_only_plus_plus(
        &PlaneWaveData::new(qm(&[&[2, 1], &[1, 0]]), f, PlaneWaveClass::Singular).unwrap(),
    );
}

#[test]
fn algebra_classes() {
    let a0 = qm(&[&[1, 0], &[0, -2]]);
    let f = qm(&[&[0, 1], &[-1, 0]]);
    let smooth = bo_isometry_algebra(
        &PlaneWaveData::new(a0.clone(), f.clone(), PlaneWaveClass::Smooth).unwrap(),
    )
    .unwrap();
    let s = homogeneous_structure(&smooth).unwrap();
    assert!(s
        .u
        .iter()
        .flatten()
        .flatten()
        .all(|x| expr::is_zero(x).holds()));
    assert_eq!(s.is_naturally_reductive, Truth::Proved);
    let singular =
        bo_isometry_algebra(&PlaneWaveData::new(a0, f, PlaneWaveClass::Singular).unwrap()).unwrap();
    let s = homogeneous_structure(&singular).unwrap();
    assert_eq!(s.is_naturally_reductive, Truth::False);
    assert_eq!(smooth.basis, vec!["e1", "e2", "Y1", "Y2", "X", "Z"]);
    assert_eq!(
        smooth.display_vector(&smooth.bracket(&smooth.e(4), &smooth.e(2))),
        "2*e1 + 2*Y2"
    );
}

#[test]
fn unclassified_parameters_still_close() {
    let d = PlaneWaveData::with_parameters(qm(&[&[1]]), zero(1), [q(1, 2), qi(3), qi(2)]).unwrap();
    let m = bo_isometry_algebra(&d).unwrap();
    assert_eq!(m.name, "bo-unclassified");
}

fn rational(range: i64) -> impl Strategy<Value = Q> {
    (-range..=range, 1..=3i64).prop_map(|(n, d)| q(n, d))
}

fn draw(k: usize) -> impl Strategy<Value = (QMatrix, QMatrix)> {
    (
        proptest::collection::vec(rational(4), k * k),
        proptest::collection::vec(rational(3), k * k),
    )
        .prop_map(move |(a, b)| {
            let mut a0 = zero(k);
            let mut f = zero(k);
            for i in 0..k {
                for j in 0..k {
                    if i <= j {
                        a0[i][j] = a[i * k + j].clone();
                        a0[j][i] = a[i * k + j].clone();
                    }
                    if i < j {
                        f[i][j] = b[i * k + j].clone();
                        f[j][i] = -b[i * k + j].clone();
                    }
                }
            }
            (a0, f)
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 8, ..ProptestConfig::default() })]

    #[test]
    fn smooth_is_naturally_reductive((a0, f) in (2usize..=3).prop_flat_map(draw)) {
        let d = PlaneWaveData::new(a0.clone(), f.clone(), PlaneWaveClass::Smooth).unwrap();
        let s = homogeneous_structure(&bo_isometry_algebra(&d).unwrap()).unwrap();
        prop_assert!(s.is_naturally_reductive.holds());
        let d = PlaneWaveData::new(a0, f, PlaneWaveClass::Singular).unwrap();
        let s = homogeneous_structure(&bo_isometry_algebra(&d).unwrap()).unwrap();
        prop_assert_eq!(s.is_naturally_reductive, Truth::False);
    }

    #[test]
    fn symmetric_waves_are_locally_symmetric((a0, _) in draw(2)) {
        let d = PlaneWaveData::new(a0, zero(2), PlaneWaveClass::Smooth).unwrap();
        let pack = tensor::curvature(&build_bo_metric(&d).unwrap()).unwrap();
        prop_assert_eq!(pack.flags.is_locally_symmetric, Truth::Proved);
    }

    #[test]
    fn normal_form_matches_trace((a0, _) in draw(3)) {
        let nf = cahen_wallach_normal_form(&a0).unwrap();
        prop_assert!(nf.residual_ok());
        let tr: f64 = nf.eigenvalues.iter().map(|e| e.value).sum();
        let tr0: f64 = (0..3).map(|i| a0[i][i].to_f64().unwrap()).sum();
        prop_assert!((tr - tr0).abs() < 1e-9);
        prop_assert!(nf.eigenvalues.windows(2).all(|w| w[0].value >= w[1].value));
    }
}

#[test]
fn normal_forms() {
    let nf = cahen_wallach_normal_form(&qm(&[&[-1, 0], &[0, -1]])).unwrap();
    assert_eq!(
        nf.exact_values().unwrap(),
        vec![Expr::int(-1), Expr::int(-1)]
    );
    let nf = cahen_wallach_normal_form(&zero(3)).unwrap();
    assert!(nf.exact_values().unwrap().iter().all(Expr::is_zero));
    let nf = cahen_wallach_normal_form(&qm(&[&[0, 1], &[1, 0]])).unwrap();
    assert_eq!(
        nf.exact_values().unwrap(),
        vec![Expr::int(1), Expr::int(-1)]
    );
    let nf = cahen_wallach_normal_form(&qm(&[&[1, 1], &[1, 0]])).unwrap();
    let ex = nf.exact_values().unwrap();
    assert_eq!(ex[0], parse("1/2 + sqrt(5)/2").unwrap());
    assert_eq!(ex[1], parse("1/2 - sqrt(5)/2").unwrap());
    // irreducible cubic: numeric roots
    let nf = cahen_wallach_normal_form(&qm(&[&[0, 1, 0], &[1, 0, 1], &[0, 1, 1]])).unwrap();
    assert!(!nf.is_exact());
    assert!(nf.residual_ok(), "{}", nf.max_residual);
    // a rational root splits off and the quadratic stays exact
    let nf = cahen_wallach_normal_form(&qm(&[&[2, 0, 0], &[0, 0, 1], &[0, 1, 0]])).unwrap();
    assert_eq!(
        nf.exact_values().unwrap(),
        vec![Expr::int(2), Expr::int(1), Expr::int(-1)]
    );
    assert!(matches!(
        cahen_wallach_normal_form(&qm(&[&[0, 1], &[2, 0]])),
        Err(PlaneWaveError::NotSymmetric(..))
    ));
}

#[test]
fn normal_form_is_isometric_invariant() {
    let a0 = qm(&[&[0, 1], &[1, 0]]);
    let d = PlaneWaveData::new(a0.clone(), zero(2), PlaneWaveClass::Smooth).unwrap();
    let nf = cahen_wallach_normal_form(&a0).unwrap();
    let cw = cahen_wallach_metric(&nf.values()).unwrap();
    let r1 = curvature_with(&build_bo_metric(&d).unwrap(), &no_covariant()).unwrap();
    let r2 = curvature_with(&cw, &no_covariant()).unwrap();
    // both Ricci-flat (traceless), both nonflat
    assert_eq!(r1.flags.is_ricci_flat, Truth::Proved);
    assert_eq!(r2.flags.is_ricci_flat, Truth::Proved);
    assert_eq!(r2.flags.is_flat, Truth::False);
}

#[test]
fn recognize_dictionary() {
    let flat = rosen("du*dv + dy1^2 + dy2^2", &["u", "v", "y1", "y2"]);
    assert!(matches!(
        recognize_profile(&flat).unwrap(),
        Recognition::Flat
    ));
    let root = rosen("du*dv + sqrt(u)*(dy1^2 + dy2^2)", &["u", "v", "y1", "y2"]);
    match recognize_profile(&root).unwrap() {
        Recognition::PowerLaw {
            p,
            scale,
            a0,
            killing_verified,
            data,
            ..
        } => {
            assert_eq!(p, Expr::frac(1, 4));
            assert_eq!(scale, Expr::one());
            assert_eq!(a0, Expr::frac(-3, 16));
            assert_eq!(killing_verified, Truth::Proved);
            let d = data.unwrap();
            assert_eq!(d.class, PlaneWaveClass::Singular);
            assert_eq!(d.a0[1][1], q(-3, 16));
        }
        other => panic!("{other:?}"),
    }
    let cw = rosen(
        "2*du*dv + cosh(2*u)^2*dy1^2 + cos(u)^2*dy2^2",
        &["u", "v", "y1", "y2"],
    );
    match recognize_profile(&cw).unwrap() {
        Recognition::CahenWallach { a, data } => {
            assert_eq!(a, vec![Expr::int(4), Expr::int(-1)]);
            assert_eq!(data.unwrap().class, PlaneWaveClass::Smooth);
        }
        other => panic!("{other:?}"),
    }
    let mixed = rosen("du*dv + u^2*dy1^2 + u^4*dy2^2", &["u", "v", "y1", "y2"]);
    match recognize_profile(&mixed).unwrap() {
        Recognition::SingularDiagonal { a0, .. } => {
            assert_eq!(a0, vec![Expr::zero(), Expr::int(2)])
        }
        other => panic!("{other:?}"),
    }
    let off = rosen(
        "du*dv + dy1^2 + 2*u*dy1*dy2 + (1 + u^2)*dy2^2",
        &["u", "v", "y1", "y2"],
    );
    assert!(matches!(
        recognize_profile(&off).unwrap(),
        Recognition::Unrecognized(_)
    ));
    let other = rosen("du*dv + (1 + u^2)*dy^2", &["u", "v", "y"]);
    assert!(matches!(
        recognize_profile(&other).unwrap(),
        Recognition::Unrecognized(_)
    ));
}

#[test]
fn power_law_round_trip() {
    let src = rosen("du*dv + u^(2*mu)*dy^2", &["u", "v", "y"]);
    let lim = penrose_limit(&src).unwrap();
    match recognize_profile(&lim).unwrap() {
        Recognition::PowerLaw {
            p,
            scale,
            killing,
            killing_verified,
            ..
        } => {
            assert_eq!(p, Expr::sym("mu"));
            assert_eq!(scale, Expr::one());
            assert_eq!(
                killing.display(&lim.model.coords),
                "-u*d_u + v*d_v + mu*y*d_y"
            );
            assert!(killing_verified.holds());
        }
        other => panic!("{other:?}"),
    }
}

/// Brinkmann `A₀ = μ(μ − 1)` and Rosen `u^{2μ}` share `R^z_{+z+}`.
#[test]
fn rosen_brinkmann_oracle() {
    for mu in [q(3, 4), q(1, 3), q(5, 2)] {
        let a0 = &mu * (&mu - Q::one());
        let d = PlaneWaveData::new(vec![vec![a0]], zero(1), PlaneWaveClass::Singular).unwrap();
        let b = curvature_with(&build_bo_metric(&d).unwrap(), &no_covariant()).unwrap();
        let r = rosen(&format!("du*dv + u^(2*({mu}))*dy^2"), &["u", "v", "y"]);
        let rr = curvature_with(&r.model, &no_covariant()).unwrap();
        let brink = b.riemann[2][0][2][0].subs1("xp", &Expr::sym("u")).unwrap();
        let ros = rr.riemann[2][0][2][0].clone();
        assert!(
            expr::equal(&brink, &ros).holds(),
            "μ = {mu}: {brink} vs {ros}"
        );
        assert!(!ros.is_zero());
    }
}
