use super::*;
use crate::expr::parse;
use nalgebra::{DMatrix, DVector};

fn coords(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn example() -> MetricModel {
    MetricModel::from_line_element(
        coords(&["u", "v", "x1", "x2"]),
        "2*du*dv + u*dv^2 + sqrt(u)*(dx1^2 + dx2^2)",
    )
    .unwrap()
}

fn minkowski() -> MetricModel {
    MetricModel::from_line_element(coords(&["u", "v", "y1", "y2"]), "du*dv + dy1^2 + dy2^2")
        .unwrap()
}

fn geometry(m: &MetricModel) -> (CurvaturePack, NumericGeometry) {
    let pack = curvature(m).unwrap();
    let geo = NumericGeometry::new(m, &pack).unwrap();
    (pack, geo)
}

#[test]
fn line_element_round_trip() {
    let m = example();
    assert_eq!(m.g[0][1], Expr::one());
    assert_eq!(m.g[1][1], parse("u").unwrap());
    assert_eq!(
        m.line_element(),
        "2*du*dv + u*dv^2 + sqrt(u)*(dx1^2 + dx2^2)"
    );
    let again = MetricModel::from_line_element(m.coords.clone(), &m.line_element()).unwrap();
    assert_eq!(again.g, m.g);
    let half = MetricModel::from_line_element(coords(&["u", "v"]), "du*dv").unwrap();
    assert_eq!(half.g[0][1], Expr::frac(1, 2));
    assert!(MetricModel::from_line_element(coords(&["u", "v"]), "du*dv^2").is_err());
}

#[test]
fn flat_christoffels_vanish() {
    let pack = curvature(&minkowski()).unwrap();
    assert!(pack
        .christoffel
        .iter()
        .flatten()
        .flatten()
        .all(Expr::is_zero));
    assert_eq!(pack.flags.is_flat, Truth::Proved);
    assert_eq!(pack.flags.is_locally_symmetric, Truth::Proved);
}

#[test]
fn example_christoffel_against_finite_differences() {
    let m = example();
    let gamma = christoffel(&m).unwrap();
    assert_eq!(gamma[2][0][2], parse("1/(4*u)").unwrap());
    assert_eq!(gamma[3][0][3], parse("1/(4*u)").unwrap());

    // oracle: Γ from central differences of the numeric metric at u = 1
    let x = [1.0, 0.3, 0.2, -0.1];
    let h = 1e-5;
    let n = 4;
    let dg = |k: usize| {
        let mut xp = x;
        let mut xm = x;
        xp[k] += h;
        xm[k] -= h;
        (m.numeric_metric_at(&xp).unwrap() - m.numeric_metric_at(&xm).unwrap()) / (2.0 * h)
    };
    let d: Vec<DMatrix<f64>> = (0..n).map(dg).collect();
    let ginv = m.numeric_metric_at(&x).unwrap().try_inverse().unwrap();
    let consts = m.numeric_consts();
    for l in 0..n {
        for a in 0..n {
            for b in 0..n {
                let mut fd = 0.0;
                for k in 0..n {
                    fd += 0.5 * ginv[(l, k)] * (d[a][(k, b)] + d[b][(k, a)] - d[k][(a, b)]);
                }
                let sym = crate::expr::Compiled::new(&gamma[l][a][b], &m.coords, &consts)
                    .unwrap()
                    .eval(&x);
                assert!((fd - sym).abs() < 1e-8, "Γ[{l}][{a}][{b}]: {fd} vs {sym}");
            }
        }
    }
}

#[test]
fn plane_wave_geodesics_against_independent_integrator() {
    let m = MetricModel::from_line_element(coords(&["u", "v", "z"]), "2*du*dv + A*z^2*du^2 + dz^2")
        .unwrap()
        .with_values([("A".to_string(), Q::from_integer((-3).into()))].into());
    let gamma = christoffel(&m).unwrap();
    assert_eq!(gamma[2][0][0], parse("-A*z").unwrap());
    assert_eq!(gamma[1][0][2], parse("A*z").unwrap());
    assert!(gamma[1][0][0].is_zero());

    // oracle: explicit Euler-Lagrange integration with finite-difference
    // metric derivatives
    let (_, geo) = geometry(&m);
    let spec = GeodesicSpec::new(vec![0.0, 0.0, 0.5], vec![1.0, 0.2, 0.1], 1.0).with_steps(2000);
    let traj = geodesic(&geo, &spec, 1).unwrap();
    let accel = |x: &[f64], v: &[f64]| -> Vec<f64> {
        let h = 1e-6;
        let g = m.numeric_metric_at(x).unwrap();
        let ginv = g.clone().try_inverse().unwrap();
        let d: Vec<DMatrix<f64>> = (0..3)
            .map(|k| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[k] += h;
                xm[k] -= h;
                (m.numeric_metric_at(&xp).unwrap() - m.numeric_metric_at(&xm).unwrap()) / (2.0 * h)
            })
            .collect();
        (0..3)
            .map(|l| {
                let mut s = 0.0;
                for k in 0..3 {
                    for a in 0..3 {
                        for b in 0..3 {
                            s -= 0.5
                                * ginv[(l, k)]
                                * (d[a][(k, b)] + d[b][(k, a)] - d[k][(a, b)])
                                * v[a]
                                * v[b];
                        }
                    }
                }
                s
            })
            .collect()
    };
    let mut x = spec.x0.clone();
    let mut v = spec.v0.clone();
    let steps = 20000;
    let h = 1.0 / steps as f64;
    for _ in 0..steps {
        // midpoint method
        let a1 = accel(&x, &v);
        let xm: Vec<f64> = (0..3).map(|i| x[i] + 0.5 * h * v[i]).collect();
        let vm: Vec<f64> = (0..3).map(|i| v[i] + 0.5 * h * a1[i]).collect();
        let a2 = accel(&xm, &vm);
        for i in 0..3 {
            x[i] += h * vm[i];
            v[i] += h * a2[i];
        }
    }
    let end = traj.xs.last().unwrap();
    for i in 0..3 {
        assert!(
            (end[i] - x[i]).abs() < 1e-6,
            "component {i}: {} vs {}",
            end[i],
            x[i]
        );
    }
}

#[test]
fn identities_on_example() {
    let m = example();
    let pack = curvature(&m).unwrap();
    assert_eq!(
        all_zero(
            metricity_defect(&m, &pack.christoffel).iter(),
            DEFAULT_NODE_BUDGET
        ),
        Truth::Proved
    );
    assert_eq!(
        all_zero(bianchi_defect(&pack.riemann).iter(), DEFAULT_NODE_BUDGET),
        Truth::Proved
    );
    assert_eq!(pack.flags.is_flat, Truth::False);
}

#[test]
fn lie_derivative_of_translation() {
    let m = example();
    let dv = VectorField::coordinate(1, 4);
    assert_eq!(is_killing(&m, &dv).unwrap(), Truth::Proved);
    let du = VectorField::coordinate(0, 4);
    assert_eq!(is_killing(&m, &du).unwrap(), Truth::False);
}

#[test]
fn vector_field_parsing_and_brackets() {
    let c = coords(&["u", "v", "y"]);
    let x = VectorField::parse("-u*d_u + v*d_v + mu*y*d_y", &c).unwrap();
    assert_eq!(x.comps[2], parse("mu*y").unwrap());
    assert_eq!(x.display(&c), "-u*d_u + v*d_v + mu*y*d_y");
    let dv = VectorField::coordinate(1, 3);
    // [X, ∂_v] = −∂_v
    assert_eq!(x.commutator(&dv, &c), dv.scale(&Expr::int(-1)));
    assert!(VectorField::parse("u*d_u*d_v", &c).is_err());
    assert!(VectorField::parse("u + d_u", &c).is_err());
}

#[test]
fn transport_flat_constant_field() {
    let m = minkowski();
    let (_, geo) = geometry(&m);
    let spec = GeodesicSpec::new(vec![0.0; 4], vec![1.0, 0.0, 0.3, 0.0], 1.0);
    let init = TransportState::new(
        DVector::from_vec(vec![0.5, -1.0, 2.0, 0.25]),
        DMatrix::zeros(4, 4),
    );
    let end = killing_transport(&geo, &spec, &init).unwrap();
    assert!((&end.zeta - &init.zeta).amax() < 1e-12);
    assert!(end.a.amax() < 1e-12);
}

#[test]
fn transport_flat_rotation_reproduces_linear_field() {
    let m = minkowski();
    let (_, geo) = geometry(&m);
    // rotation in the y1-y2 plane: skew for g = diag block
    let mut a = DMatrix::zeros(4, 4);
    a[(2, 3)] = 1.0;
    a[(3, 2)] = -1.0;
    let init = TransportState::new(DVector::zeros(4), a.clone());
    let spec = GeodesicSpec::new(vec![0.0; 4], vec![1.0, 0.0, 0.3, -0.7], 1.0);
    let run = transport_batch(&geo, &spec, &[init], 8).unwrap();
    for (k, x) in run.curve.xs.iter().enumerate() {
        let dx = DVector::from_iterator(4, x.iter().zip(&spec.x0).map(|(p, q)| p - q));
        let expected = -(&a * dx);
        assert!((&run.states[k][0].zeta - expected).amax() < 1e-10);
    }
}

#[test]
fn transport_reproduces_killing_fields() {
    // Cahen–Wallach: ∂_v is Killing and stays (∂_v, 0)
    let m = MetricModel::from_line_element(
        coords(&["u", "v", "z1", "z2"]),
        "2*du*dv - (z1^2 + 2*z2^2)*du^2 + dz1^2 + dz2^2",
    )
    .unwrap();
    let (pack, geo) = geometry(&m);
    let spec = GeodesicSpec::new(vec![0.0, 0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0, 0.0], 1.0);
    let init = TransportState::new(
        DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0]),
        DMatrix::zeros(4, 4),
    );
    let end = killing_transport(&geo, &spec, &init).unwrap();
    assert!((&end.zeta - &init.zeta).amax() < 1e-7);
    assert!(end.a.amax() < 1e-7);

    // a non-trivial Killing field of the same space: z1-translation
    // combined with the oscillator profile, X = cos(u) d_z1 + z1*sin(u) d_v
    let x = VectorField::parse("cos(u)*d_z1 + z1*sin(u)*d_v", &m.coords).unwrap();
    assert_eq!(is_killing(&m, &x).unwrap(), Truth::Proved);
    let spec = GeodesicSpec::new(vec![0.1, 0.0, 0.2, -0.1], vec![1.0, 0.05, 0.1, 0.2], 1.0);
    let init = killing_initial_state(&m, &pack, &x, &spec.x0).unwrap();
    let run = transport_batch(&geo, &spec, std::slice::from_ref(&init), 1).unwrap();
    let q = run.curve.xs.last().unwrap();
    let expected = killing_initial_state(&m, &pack, &x, q).unwrap();
    let got = &run.states.last().unwrap()[0];
    assert!((&got.zeta - &expected.zeta).amax() < 1e-6);
    assert!((&got.a - &expected.a).amax() < 1e-6);
    let g = geo.metric(q);
    assert!(got.skew_defect(&g) < 1e-7);
}

#[test]
fn transport_is_fourth_order() {
    let m = example();
    let (pack, geo) = geometry(&m);
    let x = VectorField::coordinate(1, 4);
    let spec =
        GeodesicSpec::new(vec![1.0, 0.0, 0.0, 0.0], vec![1.0, 0.1, 0.2, 0.0], 1.0).with_steps(16);
    let mut init = killing_initial_state(&m, &pack, &x, &spec.x0).unwrap();
    init.zeta[2] = 0.3;
    let ratio = convergence_ratio(&geo, &spec, &init).unwrap();
    assert!(ratio >= 8.0, "ratio {ratio}");
}

#[test]
fn homogeneity_on_flat_space() {
    let (_, geo) = geometry(&minkowski());
    let spec = GeodesicSpec::new(vec![0.0; 4], vec![1.0, 0.0, 0.0, 0.0], 1.0);
    let v = homogeneous_geodesic_test_transport(&geo, &spec).unwrap();
    assert_eq!(v.verdict, Feasibility::Feasible, "residual {}", v.residual);
}

#[test]
fn degenerate_and_signature_checks() {
    let m = MetricModel::from_line_element(coords(&["u", "v"]), "u*du^2 + dv^2")
        .unwrap()
        .with_sample(vec![Q::from_integer(0.into()), Q::from_integer(1.into())]);
    assert!(matches!(m.check_sample(), Err(TensorError::Degenerate(_))));
    let e = MetricModel::from_line_element(coords(&["x", "y"]), "dx^2 + dy^2")
        .unwrap()
        .with_sample(vec![Q::from_integer(0.into()), Q::from_integer(0.into())])
        .lorentzian();
    assert!(matches!(e.check_sample(), Err(TensorError::Signature(_))));
    assert!(minkowski()
        .with_sample(vec![Q::from_integer(0.into()); 4])
        .lorentzian()
        .check_sample()
        .is_ok());
}
