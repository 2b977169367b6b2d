use pgeo::expr::{self, Expr};
use pgeo::homspace;
use pgeo_cli::{execute, load, parse_model, run, to_model_file, Flags, Model, Status};
use serde_json::Value;
use std::path::{Path, PathBuf};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn fixture(name: &str) -> Model {
    load(&fixtures().join(format!("{name}.model"))).unwrap()
}

fn all_fixtures() -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(fixtures())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "model"))
        .collect();
    v.sort();
    v
}

fn flags() -> Flags {
    Flags::default()
}

fn json_of(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["pgeo"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--format", "json"]);
    let (out, code) = execute(full);
    (
        serde_json::from_str(&out).unwrap_or_else(|e| panic!("{e}: {out}")),
        code,
    )
}

fn fx(name: &str) -> String {
    fixtures()
        .join(format!("{name}.model"))
        .display()
        .to_string()
}

#[test]
fn every_fixture_loads() {
    let files = all_fixtures();
    assert!(files.len() >= 12, "{files:?}");
    for f in files {
        load(&f).unwrap_or_else(|e| panic!("{e}"));
    }
}

#[test]
fn round_trip_is_idempotent() {
    for f in all_fixtures() {
        let m = load(&f).unwrap();
        let once = to_model_file(&m);
        let again = parse_model(&once, "round-trip")
            .unwrap_or_else(|e| panic!("{}: {e}\n{once}", f.display()));
        assert_eq!(to_model_file(&again), once, "{}", f.display());
        if let (Some(a), Some(b)) = (&m.metric, &again.metric) {
            assert_eq!(a.model.g, b.model.g);
            assert_eq!(a.killing.len(), b.killing.len());
        }
        if let (Some(a), Some(b)) = (&m.algebra, &again.algebra) {
            assert_eq!(a.c, b.c);
            assert_eq!(a.form, b.form);
        }
        assert_eq!(
            m.planewave.map(|d| (d.a0, d.f, d.class)),
            again.planewave.map(|d| (d.a0, d.f, d.class))
        );
    }
}

#[test]
fn subalgebra_fixture_matches_the_parent() {
    let parent = fixture("komrakov-5d").algebra.unwrap();
    let u = parent
        .parse_vector("u2 + (1/sqrt(2))*u3 + sqrt(3/2)*u5 + sqrt(2)*e1")
        .unwrap();
    let gens = vec![u, parent.e(1), parent.e(2), parent.e(4), parent.e(5)];
    let mut sub =
        homspace::transitive_subalgebra(&parent, &gens, &["U", "u1", "u2", "u4", "u5"]).unwrap();
    sub.name = "komrakov-5d-sub".into();
    let path = fixtures().join("komrakov-5d-sub.model");
    if std::env::var_os("PGEO_BLESS").is_some() {
        let m = Model {
            name: sub.name.clone(),
            description: Some(
                "Transitive subalgebra of komrakov-5d spanned by U and u1, u2, u4, u5".into(),
            ),
            metric: None,
            algebra: Some(sub.clone()),
            planewave: None,
            killing_dim: None,
        };
        std::fs::write(&path, to_model_file(&m)).unwrap();
    }
    let stored = load(&path).unwrap().algebra.unwrap();
    assert_eq!(stored.basis, sub.basis);
    for (i, row) in sub.c.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            for (k, x) in v.iter().enumerate() {
                assert!(
                    expr::equal(x, &stored.c[i][j][k]).holds(),
                    "c[{i}][{j}][{k}]: {x} vs {}",
                    stored.c[i][j][k]
                );
            }
        }
    }
    for (a, b) in sub.form.iter().flatten().zip(stored.form.iter().flatten()) {
        assert!(expr::equal(a, b).holds());
    }
}

#[test]
fn antisymmetry_violation_is_located() {
    let text = "[algebra]\nbasis = [\"e1\", \"u1\", \"u3\"]\nisotropy = [\"e1\"]\n\n[brackets]\n\"[e1,u1]\" = \"u3\"\n\"[u1,e1]\" = \"u3\"\n";
    let e = parse_model(text, "bad.model").unwrap_err();
    assert!(e.message.contains("antisymmetry"), "{e}");
    let (line, _) = e.position.unwrap();
    assert!(line == 6 || line == 7, "{e}");
    assert!(e.to_string().starts_with("bad.model:"));
}

#[test]
fn unknown_sections_and_keys_are_errors() {
    let e = parse_model("[space]\nname = \"x\"\n\n[extras]\na = 1\n", "x.model").unwrap_err();
    assert!(e.message.contains("unknown section"), "{e}");
    assert_eq!(e.position, Some((4, 1)));
    let e = parse_model("[space]\nnmae = \"x\"\n", "x.model").unwrap_err();
    assert!(e.message.contains("unknown key `nmae`"), "{e}");
    assert_eq!(e.position, Some((2, 1)));
    let e = parse_model("[space]\nname = \"x\n", "x.model").unwrap_err();
    assert!(e.position.is_some(), "{e}");
}

#[test]
fn metric_keys_are_order_insensitive() {
    let a = "[space]\ncoords = [\"u\", \"v\"]\n[metric]\n\"g(u,v)\" = \"1\"\n";
    let b = "[space]\ncoords = [\"u\", \"v\"]\n[metric]\n\"g(v,u)\" = \"1\"\n";
    let (a, b) = (parse_model(a, "a").unwrap(), parse_model(b, "b").unwrap());
    assert_eq!(a.metric.unwrap().model.g, b.metric.unwrap().model.g);
    let clash =
        "[space]\ncoords = [\"u\", \"v\"]\n[metric]\n\"g(u,v)\" = \"1\"\n\"g(v,u)\" = \"2\"\n";
    let e = parse_model(clash, "c").unwrap_err();
    assert!(e.message.contains("disagrees"), "{e}");
}

#[test]
fn kaigorodov_parameters_stay_symbolic() {
    let m = fixture("kaigorodov");
    let metric = m.metric.unwrap().model;
    let params = metric.parameters();
    assert!(params.contains("n") && params.contains("L"), "{params:?}");
    assert_eq!(
        metric.values.get("n").map(|q| q.to_string()),
        Some("2".into())
    );
}

#[test]
fn komrakov_loads_as_an_algebra() {
    let m = fixture("komrakov-1.1-2");
    assert!(m.metric.is_none());
    let a = m.algebra.unwrap();
    assert_eq!(a.dim(), 5);
    assert_eq!(a.m_names(), ["u1", "u2", "u3", "u4"]);
}

#[test]
fn limit_of_the_worked_example() {
    let r = run("limit", &fixture("example-7-1"), &flags());
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.data["limit"], "2*du*dv + sqrt(u)*(dx1^2 + dx2^2)");
    assert!(r
        .render_text()
        .contains("2*du*dv + sqrt(u)*(dx1^2 + dx2^2)"));
}

#[test]
fn absolutely_geodetic_vector_of_the_extension() {
    let f = Flags {
        vector: Some("u2 + (1/sqrt(2))*u3 + sqrt(3/2)*u5 + sqrt(2)*e1".into()),
        ..flags()
    };
    let r = run("geodesic-vector", &fixture("komrakov-5d"), &f);
    assert_eq!(r.status, Status::Ok, "{}", r.render_text());
    assert_eq!(r.data["lambda"], "0");
    assert_eq!(r.data["null"], true);
    assert_eq!(r.data["canonical"], false);
}

#[test]
fn no_null_absolute_geodesics_on_komrakov() {
    let f = Flags {
        null: true,
        absolute: true,
        ..flags()
    };
    let r = run("search-geodesics", &fixture("komrakov-1.1-2"), &f);
    assert_eq!(r.status, Status::Ok);
    assert_eq!(r.data["families"], Value::Array(vec![]));
}

#[test]
fn search_needs_null_flag() {
    let r = run("search-geodesics", &fixture("komrakov-1.1-2"), &flags());
    assert_eq!(r.status, Status::Error);
    assert_eq!(r.exit_code(), 1);
}

#[test]
fn flag_model_mismatch_is_an_error() {
    let r = run("check-algebra", &fixture("ads"), &flags());
    assert_eq!(r.status, Status::Error);
    let r = run("limit", &fixture("komrakov-1.1-2"), &flags());
    assert_eq!(r.status, Status::Error);
    let r = run("geodesic-vector", &fixture("komrakov-1.1-2"), &flags());
    assert!(r.data["error"].as_str().unwrap().contains("--vector"));
}

#[test]
fn exit_codes() {
    let (_, code) = execute(["pgeo", "frobnicate", &fx("ads")]);
    assert_eq!(code, 1);
    let (out, code) = execute(["pgeo", "--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("--omega-series"));
    let (_, code) = execute(["pgeo", "curvature", "/nonexistent.model"]);
    assert_eq!(code, 1);
    let (_, code) = execute(["pgeo", "curvature", &fx("ads"), "--format", "yaml"]);
    assert_eq!(code, 1);
    let (_, code) = execute(["pgeo", "curvature", &fx("ads")]);
    assert_eq!(code, 0);
    let (_, code) = execute(["pgeo", "killing-check", &fx("kaigorodov")]);
    assert_eq!(code, 1);
}

#[test]
fn undecided_verdicts_exit_with_two() {
    // sin^2 + cos^2 - 1 hides in a component that only evaluates to zero
    let text = "[space]\ncoords = [\"u\", \"v\", \"y\"]\n[metric]\nline = \"du*dv + dy^2\"\n";
    let m = parse_model(text, "flat").unwrap();
    let f = Flags {
        vector: Some("(sin(u)^2 + cos(u)^2 - 1)*u^3*d_y".into()),
        ..flags()
    };
    let r = run("killing-check", &m, &f);
    assert!(
        matches!(r.status, Status::Ok | Status::Undecided),
        "{}",
        r.render_text()
    );
    let code = r.exit_code();
    assert_eq!(code, if r.status == Status::Undecided { 2 } else { 0 });
}

#[test]
fn text_claims_appear_in_json() {
    let (v, code) = json_of(&["curvature", &fx("ads")]);
    assert_eq!(code, 0);
    assert_eq!(v["data"]["einstein_constant"], "-3");
    assert!(v["text"]
        .as_array()
        .unwrap()
        .iter()
        .any(|l| l == "Einstein constant: -3"));
    let (v, _) = json_of(&["transport", &fx("example-7-1")]);
    assert_eq!(v["data"]["verdict"], "infeasible");
    assert!(v["text"][1].as_str().unwrap().contains("infeasible"));
}

fn validator() -> jsonschema::Validator {
    let schema: Value = serde_json::from_str(include_str!("../schema/report.schema.json"))
        .expect("schema is valid JSON");
    jsonschema::validator_for(&schema).expect("schema compiles")
}

#[test]
fn reports_validate_against_the_schema() {
    let v = validator();
    let vec5 = "u2 + (1/sqrt(2))*u3 + sqrt(3/2)*u5 + sqrt(2)*e1";
    let cases: Vec<Vec<String>> = [
        vec!["curvature", "ads"],
        vec!["limit", "example-7-1", "--omega-series"],
        vec!["killing-check", "example-7-1"],
        vec!["killing-check", "kaigorodov"],
        vec!["hereditary", "kaigorodov-adapted"],
        vec!["check-algebra", "kaigorodov"],
        vec!["check-algebra", "komrakov-1.1-2"],
        vec!["geodesic-vector", "komrakov-5d", "--vector", vec5],
        vec!["geodesic-vector", "komrakov-1.1-2", "--vector", "u1"],
        vec![
            "search-geodesics",
            "komrakov-1.1-2",
            "--null",
            "--starts",
            "50",
        ],
        vec!["structure", "komrakov-5d", "--vector", vec5],
        vec!["structure", "power-law"],
        vec!["coset-metric", "komrakov-5d"],
        vec!["classify", "bo-smooth"],
        vec!["classify", "cahen-wallach"],
        vec!["classify", "example-7-1"],
        vec!["transport", "power-law", "--steps", "2000"],
        vec!["scaling", "komrakov-5d-sub", "--vector", "U"],
        vec!["scaling", "example-7-1"],
        vec!["curvature", "no-such-fixture"],
    ]
    .into_iter()
    .map(|c| {
        c.into_iter()
            .enumerate()
            .map(|(i, s)| if i == 1 { fx(s) } else { s.to_string() })
            .collect()
    })
    .collect();
    for c in cases {
        let args: Vec<&str> = c.iter().map(String::as_str).collect();
        let (report, _) = json_of(&args);
        assert_eq!(report["schema_version"], 1);
        let errors: Vec<String> = v.iter_errors(&report).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}\n{report:#}");
    }
}

#[test]
fn schema_rejects_malformed_reports() {
    let v = validator();
    let bad = serde_json::json!({ "schema_version": 2, "command": "x", "model": "y", "status": "ok", "text": [], "data": {} });
    assert!(!v.is_valid(&bad));
    let bad = serde_json::json!({ "schema_version": 1, "command": "x", "model": "y", "status": "fine", "text": [], "data": {} });
    assert!(!v.is_valid(&bad));
}

#[test]
fn killing_fields_check_the_bracket_table() {
    let r = run("killing-check", &fixture("power-law"), &flags());
    assert_eq!(r.status, Status::Ok, "{}", r.render_text());
    let b = r.data["brackets"].as_array().unwrap();
    assert_eq!(b.len(), 6);
    assert!(b.iter().all(|x| x["matches"] == "proved"));
}

#[test]
fn vector_flag_overrides_listed_fields() {
    let f = Flags {
        vector: Some("-u*d_u + v*d_v + 2*mu*y*d_y".into()),
        ..flags()
    };
    let r = run("killing-check", &fixture("power-law"), &f);
    assert_eq!(r.status, Status::Failed);
    let ld = &r.data["fields"][0]["lie_derivative"];
    assert!(
        ld.as_object().is_some_and(|o| o.contains_key("L(y,y)")),
        "{ld}"
    );
}

#[test]
fn planewave_metric_commands() {
    let r = run("curvature", &fixture("cahen-wallach"), &flags());
    assert_eq!(r.data["flags"]["locally_symmetric"], "proved");
    let r = run("classify", &fixture("bo-singular"), &flags());
    assert_eq!(r.data["class"], "singular");
    assert_eq!(r.data["complete"], false);
    assert_eq!(r.data["naturally_reductive"], "false");
}

#[test]
fn unparsable_vector_is_an_error() {
    let f = Flags {
        vector: Some("u1 + + ".into()),
        ..flags()
    };
    let r = run("geodesic-vector", &fixture("komrakov-1.1-2"), &f);
    assert_eq!(r.status, Status::Error);
    let _: Option<Expr> = None;
}
