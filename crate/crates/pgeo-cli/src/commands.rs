use crate::model::Model;
use crate::report::{Report, Status};
use pgeo::expr::{Compiled, Expr};
use pgeo::homspace::{self, GeodesicOutcome, LieAlgebraModel, SearchOptions};
use pgeo::linalg::SMatrix;
use pgeo::penrose::{self, AdaptedMetric, IndexRole, ScaledComponent, Slot};
use pgeo::planewave::{self, Recognition};
use pgeo::tensor::{self, CurvatureFlags, MetricModel, Truth, VectorField};
use serde_json::{json, Map, Value};

pub const COMMANDS: &[&str] = &[
    "curvature",
    "killing-check",
    "limit",
    "hereditary",
    "check-algebra",
    "geodesic-vector",
    "search-geodesics",
    "structure",
    "coset-metric",
    "classify",
    "transport",
    "scaling",
];

#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub vector: Option<String>,
    pub omega_series: bool,
    pub null: bool,
    pub absolute: bool,
    pub seed: Option<u64>,
    pub starts: Option<usize>,
    pub steps: Option<usize>,
    /// Run `transport` on the Penrose limit instead of the source.
    pub on_limit: bool,
}

/// A failure that ends the command with a status and a message.
#[derive(Debug)]
pub struct Abort(pub Status, pub String);

impl<E: std::fmt::Display> From<E> for Abort {
    fn from(e: E) -> Abort {
        Abort(Status::Error, e.to_string())
    }
}

type Res<T> = Result<T, Abort>;

fn abort<T>(msg: impl Into<String>) -> Res<T> {
    Err(Abort(Status::Error, msg.into()))
}

fn truth_status(t: Truth) -> Status {
    match t {
        Truth::Proved | Truth::Probably => Status::Ok,
        Truth::False => Status::Failed,
        Truth::Undecided => Status::Undecided,
    }
}

fn flags_json(f: &CurvatureFlags) -> Value {
    json!({
        "flat": f.is_flat.as_str(),
        "ricci_flat": f.is_ricci_flat.as_str(),
        "einstein": f.is_einstein.as_str(),
        "conformally_flat": f.is_conformally_flat.as_str(),
        "locally_symmetric": f.is_locally_symmetric.as_str(),
    })
}

fn flag_lines(r: &mut Report, prefix: &str, f: &CurvatureFlags) {
    for (k, t) in [
        ("flat", f.is_flat),
        ("Ricci-flat", f.is_ricci_flat),
        ("Einstein", f.is_einstein),
        ("conformally flat", f.is_conformally_flat),
        ("locally symmetric", f.is_locally_symmetric),
    ] {
        r.line(format!("{prefix}{k}: {}", t.as_str()));
    }
}

fn flags_status(f: &CurvatureFlags) -> Status {
    let all = [
        f.is_flat,
        f.is_ricci_flat,
        f.is_einstein,
        f.is_conformally_flat,
        f.is_locally_symmetric,
    ];
    if all.contains(&Truth::Undecided) {
        Status::Undecided
    } else {
        Status::Ok
    }
}

fn components(m: &MetricModel, g: &SMatrix, symbol: &str) -> Value {
    let mut out = Map::new();
    for i in 0..m.dim() {
        for j in i..m.dim() {
            if !g[i][j].is_zero() {
                out.insert(
                    format!("{symbol}({},{})", m.coords[i], m.coords[j]),
                    json!(g[i][j].to_string()),
                );
            }
        }
    }
    Value::Object(out)
}

fn metric_of(model: &Model) -> Res<MetricModel> {
    model.metric_model().map_or_else(
        || abort("this command needs a [metric] or [planewave] section"),
        Ok,
    )
}

fn adapted_of(model: &Model) -> Res<AdaptedMetric> {
    match model.adapted() {
        Some(a) => Ok(a?),
        None => {
            abort("this command needs a metric with adapted coordinates (`u` and `v` in [space])")
        }
    }
}

fn algebra_of(model: &Model) -> Res<LieAlgebraModel> {
    match model.algebra_model() {
        Some(a) => Ok(a?),
        None => abort("this command needs an [algebra] or [planewave] section"),
    }
}

fn vector_of(m: &LieAlgebraModel, flags: &Flags) -> Res<Vec<Expr>> {
    match &flags.vector {
        Some(v) => Ok(m.parse_vector(v)?),
        None => abort("this command needs --vector"),
    }
}

/// Dispatches `command`; failures are folded into the report.
pub fn run(command: &str, model: &Model, flags: &Flags) -> Report {
    let mut r = Report::new(command, &model.name);
    let out = match command {
        "curvature" => curvature(&mut r, model),
        "killing-check" => killing_check(&mut r, model, flags),
        "limit" => limit(&mut r, model, flags),
        "hereditary" => hereditary(&mut r, model),
        "check-algebra" => check_algebra(&mut r, model),
        "geodesic-vector" => geodesic_vector(&mut r, model, flags),
        "search-geodesics" => search_geodesics(&mut r, model, flags),
        "structure" => structure(&mut r, model, flags),
        "coset-metric" => coset_metric(&mut r, model),
        "classify" => classify(&mut r, model),
        "transport" => transport(&mut r, model, flags),
        "scaling" => scaling(&mut r, model, flags),
        other => abort(format!(
            "unknown command `{other}` (expected one of {})",
            COMMANDS.join(", ")
        )),
    };
    if let Err(Abort(status, msg)) = out {
        r.status(status);
        r.line(format!("error: {msg}"));
        r.set("error", json!(msg));
    }
    r
}

fn curvature(r: &mut Report, model: &Model) -> Res<()> {
    let m = metric_of(model)?;
    let pack = tensor::curvature(&m)?;
    r.set("coords", json!(m.coords));
    r.set("line_element", json!(m.line_element()));
    r.set("flags", flags_json(&pack.flags));
    r.set("ricci", components(&m, &pack.ricci, "R"));
    r.set("scalar", json!(pack.scalar.to_string()));
    r.set(
        "einstein_constant",
        json!(pack.einstein_constant.as_ref().map(|e| e.to_string())),
    );
    r.line(format!("metric: {}", m.line_element()));
    flag_lines(r, "", &pack.flags);
    if let Some(l) = &pack.einstein_constant {
        r.line(format!("Einstein constant: {l}"));
    }
    r.line(format!("scalar curvature: {}", pack.scalar));
    r.status(flags_status(&pack.flags));
    Ok(())
}

fn check_fields(
    r: &mut Report,
    m: &MetricModel,
    fields: &[(String, VectorField)],
    on: &str,
    out: &mut Vec<Value>,
) -> Res<()> {
    for (name, f) in fields {
        let t = tensor::is_killing(m, f)?;
        let mut entry =
            json!({ "name": name, "on": on, "field": f.display(&m.coords), "killing": t.as_str() });
        if !t.holds() {
            let ld = tensor::lie_derivative_metric(m, f)?;
            entry["lie_derivative"] = components(m, &ld, "L");
        }
        r.line(format!(
            "{name} = {} on the {on}: Killing {}",
            f.display(&m.coords),
            t.as_str()
        ));
        r.status(truth_status(t));
        out.push(entry);
    }
    Ok(())
}

fn killing_check(r: &mut Report, model: &Model, flags: &Flags) -> Res<()> {
    let m = metric_of(model)?;
    let mut results = Vec::new();
    let mut brackets = Vec::new();
    if let Some(v) = &flags.vector {
        let f = VectorField::parse(v, &m.coords)?;
        check_fields(r, &m, &[("vector".into(), f)], "metric", &mut results)?;
    } else {
        let Some(spec) = &model.metric else {
            return abort("no Killing fields listed; pass --vector");
        };
        if spec.killing.is_empty() && spec.limit_killing.is_empty() {
            return abort("no Killing fields listed; pass --vector");
        }
        check_fields(r, &m, &spec.killing, "metric", &mut results)?;
        if !spec.limit_killing.is_empty() {
            let lim = penrose::penrose_limit(&adapted_of(model)?)?;
            r.set("limit", json!(lim.model.line_element()));
            check_fields(r, &lim.model, &spec.limit_killing, "limit", &mut results)?;
        }
        if let Some(alg) = &model.algebra {
            let field = |name: &str| spec.killing.iter().find(|(n, _)| n == name).map(|(_, f)| f);
            for (i, (a, fa)) in spec.killing.iter().enumerate() {
                for (b, fb) in &spec.killing[i + 1..] {
                    let (ia, ib) = (alg.index(a)?, alg.index(b)?);
                    let expected = alg.bracket(&alg.e(ia), &alg.e(ib));
                    let mut sum = VectorField::new(vec![Expr::zero(); m.dim()]);
                    let mut missing = None;
                    for (k, c) in expected.iter().enumerate() {
                        if c.is_zero() {
                            continue;
                        }
                        match field(&alg.basis[k]) {
                            Some(fk) => sum = sum.add(&fk.scale(c)),
                            None => missing = Some(alg.basis[k].clone()),
                        }
                    }
                    let got = fa.commutator(fb, &m.coords);
                    let label = format!("[{a},{b}]");
                    let shown = alg.display_vector(&expected);
                    if let Some(name) = missing {
                        brackets.push(json!({ "pair": label, "expected": shown, "matches": "undecided", "reason": format!("no field for {name}") }));
                        continue;
                    }
                    let diffs: Vec<Expr> = got
                        .comps
                        .iter()
                        .zip(&sum.comps)
                        .map(|(x, y)| x.sub(y))
                        .collect();
                    let t = tensor::all_zero(diffs.iter(), tensor::DEFAULT_NODE_BUDGET);
                    r.status(truth_status(t));
                    if !t.holds() {
                        r.line(format!(
                            "{label}: table gives {shown}, fields give {}",
                            got.display(&m.coords)
                        ));
                    }
                    brackets.push(json!({
                        "pair": label,
                        "expected": shown,
                        "commutator": got.display(&m.coords),
                        "matches": t.as_str(),
                    }));
                }
            }
            let ok = brackets
                .iter()
                .filter(|b| b["matches"] == "proved" || b["matches"] == "probably")
                .count();
            r.line(format!(
                "bracket table: {ok} of {} pairs reproduced by the fields",
                brackets.len()
            ));
        }
    }
    r.set("fields", Value::Array(results));
    r.set("brackets", Value::Array(brackets));
    Ok(())
}

fn fresh_symbol(m: &MetricModel) -> String {
    let used = m.parameters();
    ["Omega", "Omega_", "W_omega"]
        .iter()
        .find(|s| !used.contains(**s) && !m.coords.iter().any(|c| c == *s))
        .map(|s| s.to_string())
        .unwrap_or_else(|| "Omega__".into())
}

fn limit(r: &mut Report, model: &Model, flags: &Flags) -> Res<()> {
    let a = adapted_of(model)?;
    let lim = penrose::penrose_limit(&a)?;
    r.set("source", json!(a.model.line_element()));
    r.set("limit", json!(lim.model.line_element()));
    r.set("components", components(&lim.model, &lim.model.g, "g"));
    r.line(format!("source: {}", a.model.line_element()));
    r.line(format!("limit: {}", lim.model.line_element()));
    if flags.omega_series {
        let w = fresh_symbol(&a.model);
        let pulled = penrose::omega_pullback(&a, &w)?;
        let order0 = penrose::omega_order0(&pulled, &w)?;
        let same = penrose::same_metric(&order0, &lim.model);
        r.set(
            "omega_series",
            json!({
                "symbol": w,
                "pullback": pulled.line_element(),
                "order0": order0.line_element(),
                "matches_limit": same.as_str(),
            }),
        );
        r.line(format!("Ω-rescaled ({w}): {}", pulled.line_element()));
        r.line(format!(
            "order {w}^0: {} (equals the limit: {})",
            order0.line_element(),
            same.as_str()
        ));
        r.status(truth_status(same));
    }
    Ok(())
}

fn hereditary(r: &mut Report, model: &Model) -> Res<()> {
    let a = adapted_of(model)?;
    let h = penrose::hereditary_report(&a, model.killing_dim)?;
    r.set("limit", json!(h.limit.model.line_element()));
    r.set("source_flags", flags_json(&h.source_flags));
    r.set("limit_flags", flags_json(&h.limit_flags));
    r.line(format!("limit: {}", h.limit.model.line_element()));
    flag_lines(r, "source ", &h.source_flags);
    flag_lines(r, "limit ", &h.limit_flags);
    let mut imps = Vec::new();
    for i in &h.implications {
        let ok = i.consistent();
        r.line(format!(
            "{} ({}) ⇒ {} ({}): {}",
            i.property,
            i.source.as_str(),
            i.inherited_as,
            i.limit.as_str(),
            if ok { "consistent" } else { "violated" }
        ));
        if !ok {
            r.status(Status::Failed);
        }
        imps.push(json!({
            "property": i.property,
            "inherited_as": i.inherited_as,
            "source": i.source.as_str(),
            "limit": i.limit.as_str(),
            "consistent": ok,
        }));
    }
    r.set("implications", Value::Array(imps));
    let fields: Vec<String> = h
        .limit_killing
        .iter()
        .map(|f| f.display(&h.limit.model.coords))
        .collect();
    r.line(format!(
        "Killing fields of the limit found by ansatz: {}",
        fields.len()
    ));
    r.set("limit_killing", json!(fields));
    r.set("source_killing_dim", json!(h.source_killing_dim));
    if let Some(d) = h.source_killing_dim {
        r.line(format!("declared Killing dimension of the source: {d}"));
    }
    r.status(flags_status(&h.source_flags).and(flags_status(&h.limit_flags)));
    Ok(())
}

fn matrix_json(m: &SMatrix) -> Value {
    json!(m
        .iter()
        .map(|row| row.iter().map(|e| e.to_string()).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn check_algebra(r: &mut Report, model: &Model) -> Res<()> {
    let m = algebra_of(model)?;
    let rep = homspace::validate_algebra(&m)?;
    let (reductive, why) = m.reductivity();
    r.set("dim", json!(rep.dim));
    r.set("isotropy_dim", json!(rep.isotropy_dim));
    r.set("claims_reductive", json!(m.claims_reductive));
    r.set("reductive", json!(reductive.as_str()));
    r.set("symmetric", json!(rep.is_symmetric.as_str()));
    r.set("confidence", json!(rep.confidence.as_str()));
    r.line(format!(
        "dimension {}, isotropy dimension {}",
        rep.dim, rep.isotropy_dim
    ));
    r.line("antisymmetry, Jacobi, isotropy subalgebra, form invariance: passed".to_string());
    r.line(format!("reductive split: {}", reductive.as_str()));
    if let Some(e) = &why {
        r.line(format!("obstruction: {e}"));
        r.set("obstruction", json!(e.to_string()));
    }
    r.line(format!("symmetric: {}", rep.is_symmetric.as_str()));
    let (on, mats) = if reductive.holds() {
        ("m", homspace::isotropy_representation(&m)?)
    } else {
        ("g/h", homspace::isotropy_representation_quotient(&m))
    };
    let mut rep_json = Map::new();
    for (&h, mat) in m.isotropy.iter().zip(&mats) {
        rep_json.insert(m.basis[h].clone(), matrix_json(mat));
    }
    r.set(
        "isotropy_representation",
        json!({ "on": on, "basis": m.m_names(), "matrices": rep_json }),
    );
    r.line(format!("isotropy representation computed on {on}"));
    if reductive == Truth::Undecided || rep.confidence == Truth::Undecided {
        r.status(Status::Undecided);
    }
    Ok(())
}

fn geodesic_vector(r: &mut Report, model: &Model, flags: &Flags) -> Res<()> {
    let m = algebra_of(model)?;
    let x = vector_of(&m, flags)?;
    r.set("vector", json!(m.display_vector(&x)));
    match homspace::geodesic_vector_test(&m, &x)? {
        GeodesicOutcome::Geodesic(g) => {
            r.set("geodesic", json!(true));
            r.set("lambda", json!(g.lambda.to_string()));
            r.set("null", json!(g.is_null.holds()));
            r.set("absolute", json!(g.is_absolute.holds()));
            r.set("canonical", json!(g.is_canonical.holds()));
            r.set(
                "verdicts",
                json!({
                    "null": g.is_null.as_str(),
                    "absolute": g.is_absolute.as_str(),
                    "canonical": g.is_canonical.as_str(),
                    "equations": g.confidence.as_str(),
                }),
            );
            r.line(format!(
                "{} is a geodesic vector ({})",
                m.display_vector(&x),
                g.confidence.as_str()
            ));
            r.line(format!("λ = {}", g.lambda));
            r.line(format!(
                "null = {}, absolute = {}, canonical = {}",
                g.is_null.holds(),
                g.is_absolute.holds(),
                g.is_canonical.holds()
            ));
            for t in [g.is_null, g.is_absolute, g.is_canonical, g.confidence] {
                if t == Truth::Undecided {
                    r.status(Status::Undecided);
                }
            }
            if m.reductivity().0.holds() {
                let c = homspace::canonical_geodesic_test(&m, &x)?;
                r.set("contraction", json!(m.display_m(&c.contraction)));
                r.line(format!("T(X, X) = {}", m.display_m(&c.contraction)));
                if let Some(s) = &c.scaling {
                    r.set("scaling", json!(s.verdict.as_str()));
                    r.set("scaling_matches_canonical", json!(c.scaling_matches_canonical()));
                    r.line(format!(
                        "structure under the Penrose limit: {}",
                        s.verdict.as_str()
                    ));
                }
            }
        }
        GeodesicOutcome::NotGeodesic { witness, residual } => {
            r.set("geodesic", json!(false));
            r.set("witness", json!(witness));
            r.set("equation_residual", json!(residual.to_string()));
            r.line(format!(
                "not a geodesic vector: the equation for Z = {witness} leaves {residual}"
            ));
            r.status(Status::Failed);
        }
        GeodesicOutcome::Undecided { witness, residual } => {
            r.set("geodesic", Value::Null);
            r.set("witness", json!(witness));
            r.set("equation_residual", json!(residual.to_string()));
            r.line(format!(
                "undecided: the equation for Z = {witness} leaves {residual}"
            ));
            r.status(Status::Undecided);
        }
    }
    Ok(())
}

fn search_geodesics(r: &mut Report, model: &Model, flags: &Flags) -> Res<()> {
    let m = algebra_of(model)?;
    if !flags.null {
        return abort("search-geodesics looks for null geodesic vectors; pass --null");
    }
    let mut opts = SearchOptions {
        require_absolute: flags.absolute,
        ..SearchOptions::default()
    };
    if let Some(s) = flags.starts {
        opts.starts = s;
    }
    if let Some(s) = flags.seed {
        opts.seed = s;
    }
    let rep = homspace::find_null_geodesic_vectors(&m, &opts)?;
    let mut fams = Vec::new();
    for h in &rep.hits {
        let mut shown = String::new();
        for (b, c) in m.basis.iter().zip(&h.x).filter(|(_, c)| c.abs() > 1e-12) {
            let sep = match (shown.is_empty(), *c < 0.0) {
                (true, false) => "",
                (true, true) => "-",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            shown.push_str(&format!("{sep}{:.12}*{b}", c.abs()));
        }
        let exact = h.exact.as_ref().map(
            |e| json!({ "vector": m.display_vector(&e.vector), "lambda": e.lambda.to_string() }),
        );
        r.line(format!(
            "{} (λ ≈ {:.12}, residual {:.1e}){}",
            shown,
            h.lambda,
            h.residual,
            h.exact
                .as_ref()
                .map(|e| format!(
                    ", exact: {} with λ = {}",
                    m.display_vector(&e.vector),
                    e.lambda
                ))
                .unwrap_or_default()
        ));
        fams.push(json!({
            "components": m.basis.iter().zip(&h.x).map(|(b, c)| (b.clone(), json!(c))).collect::<Map<_, _>>(),
            "lambda": h.lambda,
            "residual": h.residual,
            "exact": exact,
        }));
    }
    r.line(format!(
        "{} null{} geodesic vectors from {} starts (seed {}, converged {})",
        rep.hits.len(),
        if flags.absolute { " absolute" } else { "" },
        opts.starts,
        opts.seed,
        rep.converged
    ));
    r.set(
        "options",
        json!({ "starts": opts.starts, "seed": opts.seed, "absolute": opts.require_absolute, "tolerance": opts.tolerance }),
    );
    r.set("converged", json!(rep.converged));
    r.set("families", Value::Array(fams));
    Ok(())
}

fn structure(r: &mut Report, model: &Model, flags: &Flags) -> Res<()> {
    let m = algebra_of(model)?;
    let s = homspace::homogeneous_structure(&m)?;
    let mut comps = Map::new();
    for (idx, v) in s.nonzero_components() {
        r.line(format!("{} = {v}", s.label(idx)));
        comps.insert(s.label(idx), json!(v.to_string()));
    }
    r.set("convention", json!("T_ijk = B(T(u_i, u_j), u_k)"));
    r.set("components", Value::Object(comps));
    r.set(
        "naturally_reductive",
        json!(s.is_naturally_reductive.as_str()),
    );
    r.line(format!(
        "naturally reductive (U = 0): {}",
        s.is_naturally_reductive.as_str()
    ));
    if s.is_naturally_reductive == Truth::Undecided {
        r.status(Status::Undecided);
    }
    if flags.vector.is_some() {
        let x = vector_of(&m, flags)?;
        let c = homspace::structure_contraction(&m, &s, &x);
        r.set("contraction", json!(m.display_m(&c)));
        r.line(format!("T(X, X) = {}", m.display_m(&c)));
    }
    Ok(())
}

fn coset_metric(r: &mut Report, model: &Model) -> Res<()> {
    let m = algebra_of(model)?;
    let cm = homspace::coset_metric(&m)?;
    let g = &cm.metric;
    r.set("coords", json!(g.coords));
    r.set("line_element", json!(g.line_element()));
    r.set("components", components(g, &g.g, "g"));
    r.line(format!("metric: {}", g.line_element()));
    let mut theta = Map::new();
    for (x, t) in g.coords.iter().zip(&cm.theta) {
        theta.insert(x.clone(), json!(m.display_vector(t)));
        r.line(format!("coefficient of d{x}: {}", m.display_vector(t)));
    }
    r.set("maurer_cartan", Value::Object(theta));
    let mut fields = Vec::new();
    for &h in &m.isotropy {
        let f = homspace::fundamental_field(&m, &cm, &m.e(h))?;
        let t = tensor::is_killing(g, &f)?;
        r.line(format!(
            "fundamental field of {}: Killing {}",
            m.basis[h],
            t.as_str()
        ));
        r.status(truth_status(t));
        fields.push(json!({ "generator": m.basis[h], "field": f.display(&g.coords), "killing": t.as_str() }));
    }
    r.set("isotropy_fields", Value::Array(fields));
    Ok(())
}

fn classify(r: &mut Report, model: &Model) -> Res<()> {
    if let Some(d) = &model.planewave {
        let metric = planewave::build_bo_metric(d)?;
        let alg = planewave::bo_isometry_algebra(d)?;
        let s = homspace::homogeneous_structure(&alg)?;
        r.set("class", json!(d.class.as_str()));
        r.set("complete", json!(d.class.is_complete()));
        r.set(
            "parameters",
            json!(d.abc.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
        );
        r.set("metric", json!(metric.line_element()));
        r.set(
            "naturally_reductive",
            json!(s.is_naturally_reductive.as_str()),
        );
        r.line(format!("class: {}", d.class.as_str()));
        r.line(format!("metric: {}", metric.line_element()));
        r.line(format!(
            "isometry algebra naturally reductive: {}",
            s.is_naturally_reductive.as_str()
        ));
        let f_zero = d.f.iter().flatten().all(num::Zero::is_zero);
        if f_zero && d.class != planewave::PlaneWaveClass::Singular {
            let nf = planewave::cahen_wallach_normal_form(&d.a0)?;
            let vals: Vec<String> = nf.values().iter().map(|e| e.to_string()).collect();
            r.line(format!(
                "Cahen-Wallach normal form: A = ({})",
                vals.join(", ")
            ));
            r.set(
                "normal_form",
                json!({ "eigenvalues": vals, "exact": nf.is_exact(), "max_residual": nf.max_residual }),
            );
            if !nf.residual_ok() {
                r.status(Status::Undecided);
            }
        }
        return Ok(());
    }
    let a = adapted_of(model)?;
    let lim = penrose::penrose_limit(&a)?;
    let rec = planewave::recognize_profile(&lim)?;
    r.set("limit", json!(lim.model.line_element()));
    r.set("recognized", json!(rec.label()));
    r.line(format!("limit: {}", lim.model.line_element()));
    r.line(format!("profile: {}", rec.label()));
    match &rec {
        Recognition::PowerLaw {
            p,
            scale,
            a0,
            killing,
            killing_verified,
            ..
        } => {
            r.set(
                "parameters",
                json!({
                    "p": p.to_string(),
                    "scale": scale.to_string(),
                    "A0": a0.to_string(),
                    "killing": killing.display(&lim.model.coords),
                    "killing_verified": killing_verified.as_str(),
                }),
            );
            r.line(format!("p = {p}, scale = {scale}, A0 = {a0}"));
            r.line(format!(
                "homogeneity witness {}: Killing {}",
                killing.display(&lim.model.coords),
                killing_verified.as_str()
            ));
            r.status(truth_status(*killing_verified));
        }
        Recognition::CahenWallach { a, .. } => {
            let v: Vec<String> = a.iter().map(|e| e.to_string()).collect();
            r.line(format!("A = ({})", v.join(", ")));
            r.set("parameters", json!({ "A": v }));
        }
        Recognition::SingularDiagonal { a0, .. } => {
            let v: Vec<String> = a0.iter().map(|e| e.to_string()).collect();
            r.line(format!("A0 = ({})", v.join(", ")));
            r.set("parameters", json!({ "A0": v }));
        }
        Recognition::Unrecognized(why) => {
            r.line(format!("reason: {why}"));
            r.set("reason", json!(why));
        }
        Recognition::Flat => {}
    }
    Ok(())
}

fn transport(r: &mut Report, model: &Model, flags: &Flags) -> Res<()> {
    let (m, roles) = if flags.on_limit {
        let lim = penrose::penrose_limit(&adapted_of(model)?)?;
        let roles = lim.roles();
        (lim.model, Some(roles))
    } else {
        (
            metric_of(model)?,
            model.metric.as_ref().and_then(|s| s.roles.clone()),
        )
    };
    let consts = m.numeric_consts();
    if let Some(p) = m.parameters().iter().find(|p| !consts.contains_key(*p)) {
        return abort(format!(
            "parameter `{p}` needs a value in [space] parameters"
        ));
    }
    let x0: Vec<f64> = match &m.sample {
        Some(s) => s
            .iter()
            .map(|q| num::ToPrimitive::to_f64(q).unwrap_or(f64::NAN))
            .collect(),
        None => return abort("transport needs a sample point (`sample` in [space])"),
    };
    let field = match (&flags.vector, &roles) {
        (Some(v), _) => VectorField::parse(v, &m.coords)?,
        (None, Some(ro)) => VectorField::coordinate(m.coord_index(&ro.u).unwrap_or(0), m.dim()),
        (None, None) => return abort("transport needs --vector or adapted coordinates"),
    };
    let v0: Vec<f64> = field
        .comps
        .iter()
        .map(|c| Ok(Compiled::new(c, &m.coords, &consts)?.eval(&x0)))
        .collect::<Res<_>>()?;
    let pack = tensor::curvature(&m)?;
    let geo = tensor::NumericGeometry::new(&m, &pack)?;
    let mut spec = tensor::GeodesicSpec::new(x0.clone(), v0.clone(), 1.0);
    if let Some(s) = flags.steps {
        spec = spec.with_steps(s);
    }
    let v = tensor::homogeneous_geodesic_test_transport(&geo, &spec)?;
    r.set("on", json!(if flags.on_limit { "limit" } else { "metric" }));
    r.set("x0", json!(x0));
    r.set("v0", json!(v0));
    r.set("steps", json!(spec.steps));
    r.set("verdict", json!(v.verdict.as_str()));
    r.set("residual", json!(v.residual));
    r.set("samples", json!(v.samples));
    r.set("thresholds", json!({ "feasible_below": tensor::FEASIBLE_BELOW, "infeasible_above": tensor::INFEASIBLE_ABOVE }));
    r.line(format!(
        "geodesic from {x0:?} along {}",
        field.display(&m.coords)
    ));
    r.line(format!(
        "Killing transport with L_ζR = 0 at {} samples: {} (residual {:.3e})",
        v.samples,
        v.verdict.as_str(),
        v.residual
    ));
    if v.verdict == tensor::Feasibility::Undecided {
        r.status(Status::Undecided);
    }
    Ok(())
}

fn scaling(r: &mut Report, model: &Model, flags: &Flags) -> Res<()> {
    let rep = if model.algebra.is_some()
        || model.planewave.is_some() && model.metric.is_none() && flags.vector.is_some()
    {
        let m = algebra_of(model)?;
        let x = vector_of(&m, flags)?;
        let s = homspace::homogeneous_structure(&m)?;
        r.set("object", json!("homogeneous structure"));
        homspace::structure_scaling(&m, &s, &x)?
    } else {
        let a = adapted_of(model)?;
        let role = |i: usize| {
            if i == a.u {
                IndexRole::U
            } else if i == a.v {
                IndexRole::V
            } else {
                IndexRole::Y
            }
        };
        let g = &a.model;
        let mut comps = Vec::new();
        for i in 0..g.dim() {
            for j in i..g.dim() {
                comps.push(ScaledComponent {
                    label: format!("g({},{})", g.coords[i], g.coords[j]),
                    slots: vec![Slot::lower(role(i)), Slot::lower(role(j))],
                    metric_prefactor: true,
                    value: g.g[i][j].clone(),
                });
            }
        }
        r.set("object", json!("metric"));
        penrose::scaling_profile(&comps)
    };
    let table: Vec<Value> = rep
        .table
        .iter()
        .map(|(l, w, v)| json!({ "label": l, "weight": w, "value": v.to_string() }))
        .collect();
    for (l, w, v) in &rep.table {
        r.line(format!("{l}: Ω^{w}, value {v}"));
    }
    r.line(format!("verdict: {}", rep.verdict.as_str()));
    r.set("table", Value::Array(table));
    r.set("verdict", json!(rep.verdict.as_str()));
    r.set("offending", json!(rep.offending));
    if rep.verdict == penrose::ScalingVerdict::Undecided {
        r.status(Status::Undecided);
    }
    Ok(())
}
