//! Model files: TOML documents with the sections `[space]`, `[metric]`,
//! `[algebra]`, `[brackets]`, `[bilinear]`, `[coset]` and `[planewave]`.
//!
//! Values are expression strings (integers are accepted too). Unknown
//! sections and keys are errors.

use pgeo::expr::{self, Expr, Q};
use pgeo::homspace::{self, LieAlgebraModel};
use pgeo::linalg::{self, QMatrix};
use pgeo::penrose::{self, AdaptedMetric, Roles};
use pgeo::planewave::{self, PlaneWaveClass, PlaneWaveData};
use pgeo::tensor::{MetricModel, VectorField};
use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error)]
pub struct LoadError {
    pub path: String,
    /// 1-based line and column, when the problem can be located.
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for LoadError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((l, c)) => write!(f, "{}:{l}:{c}: {}", self.path, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MetricSpec {
    pub model: MetricModel,
    pub roles: Option<Roles>,
    /// Fields to check on the metric itself.
    pub killing: Vec<(String, VectorField)>,
    /// Fields to check on the Penrose limit.
    pub limit_killing: Vec<(String, VectorField)>,
}

#[derive(Clone, Debug)]
pub struct Model {
    pub name: String,
    pub description: Option<String>,
    pub metric: Option<MetricSpec>,
    pub algebra: Option<LieAlgebraModel>,
    pub planewave: Option<PlaneWaveData>,
    /// Declared dimension of the isometry algebra.
    pub killing_dim: Option<usize>,
}

impl Model {
    /// The explicit metric, or the Brinkmann metric of a plane wave.
    pub fn metric_model(&self) -> Option<MetricModel> {
        if let Some(m) = &self.metric {
            return Some(m.model.clone());
        }
        self.planewave
            .as_ref()
            .and_then(|d| planewave::build_bo_metric(d).ok())
    }

    pub fn adapted(&self) -> Option<Result<AdaptedMetric, penrose::PenroseError>> {
        let m = self.metric.as_ref()?;
        let roles = m.roles.as_ref()?;
        Some(penrose::validate_adapted(&m.model, roles))
    }

    /// The algebra from `[algebra]`, or the isometry algebra of a plane wave.
    pub fn algebra_model(&self) -> Option<Result<LieAlgebraModel, planewave::PlaneWaveError>> {
        if let Some(a) = &self.algebra {
            return Some(Ok(a.clone()));
        }
        self.planewave.as_ref().map(planewave::bo_isometry_algebra)
    }
}

const SECTIONS: &[&str] = &[
    "space",
    "metric",
    "algebra",
    "brackets",
    "bilinear",
    "coset",
    "planewave",
];
const SPACE_KEYS: &[&str] = &[
    "name",
    "description",
    "coords",
    "u",
    "v",
    "parameters",
    "sample",
    "lorentzian",
    "killing_dim",
];
const ALGEBRA_KEYS: &[&str] = &["basis", "isotropy", "reductive"];
const COSET_KEYS: &[&str] = &["order", "coords"];
const PLANEWAVE_KEYS: &[&str] = &["class", "A0", "f", "a", "b", "c"];

struct Ctx<'a> {
    path: &'a str,
    text: &'a str,
}

impl Ctx<'_> {
    /// Line and column of `key` inside `[section]`, or of the section
    /// header when `key` is empty.
    fn locate(&self, section: &str, key: &str) -> Option<(usize, usize)> {
        let mut current = String::new();
        for (n, line) in self.text.lines().enumerate() {
            let t = line.trim_start();
            let indent = line.len() - t.len();
            if t.starts_with('[') && !t.starts_with("[[") {
                if let Some(end) = t.find(']') {
                    let name = t[1..end].trim();
                    if !name.starts_with('"') {
                        current = name.to_string();
                        if key.is_empty() && current == section {
                            return Some((n + 1, indent + 1));
                        }
                        continue;
                    }
                }
            }
            if key.is_empty() || current != section {
                continue;
            }
            for cand in [format!("\"{key}\""), format!("'{key}'"), key.to_string()] {
                if let Some(rest) = t.strip_prefix(&cand) {
                    let rest = rest.trim_start();
                    if rest.starts_with('=') || rest.starts_with('.') {
                        return Some((n + 1, indent + 1));
                    }
                }
            }
        }
        None
    }

    fn err(&self, section: &str, key: &str, message: impl Into<String>) -> LoadError {
        LoadError {
            path: self.path.to_string(),
            position: self.locate(section, key),
            message: message.into(),
        }
    }
}

type LResult<T> = Result<T, LoadError>;

fn check_keys(cx: &Ctx, section: &str, t: &Table, allowed: &[&str]) -> LResult<()> {
    for k in t.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(cx.err(section, k, format!("unknown key `{k}` in [{section}]")));
        }
    }
    Ok(())
}

fn expr_text(cx: &Ctx, section: &str, key: &str, v: &Value) -> LResult<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Integer(i) => Ok(i.to_string()),
        _ => Err(cx.err(
            section,
            key,
            format!("`{key}` must be an expression string or an integer"),
        )),
    }
}

fn parse_expr(cx: &Ctx, section: &str, key: &str, v: &Value) -> LResult<Expr> {
    let s = expr_text(cx, section, key, v)?;
    expr::parse(&s).map_err(|e| cx.err(section, key, format!("cannot parse `{s}`: {e}")))
}

fn parse_rational(cx: &Ctx, section: &str, key: &str, v: &Value) -> LResult<Q> {
    let e = parse_expr(cx, section, key, v)?;
    e.as_rational()
        .ok_or_else(|| cx.err(section, key, format!("`{e}` is not a rational number")))
}

fn string_list(cx: &Ctx, section: &str, key: &str, v: &Value) -> LResult<Vec<String>> {
    let arr = v
        .as_array()
        .ok_or_else(|| cx.err(section, key, format!("`{key}` must be an array of strings")))?;
    arr.iter()
        .map(|x| {
            x.as_str()
                .map(str::to_string)
                .ok_or_else(|| cx.err(section, key, format!("`{key}` must be an array of strings")))
        })
        .collect()
}

fn table<'a>(cx: &Ctx, section: &str, v: &'a Value) -> LResult<&'a Table> {
    v.as_table()
        .ok_or_else(|| cx.err(section, "", format!("[{section}] must be a table")))
}

/// Splits `"[a,b]"` or `"g(a,b)"` style keys.
fn pair_key<'a>(key: &'a str, open: &str, close: char) -> Option<(&'a str, &'a str)> {
    let inner = key.trim().strip_prefix(open)?.strip_suffix(close)?;
    let (a, b) = inner.split_once(',')?;
    let (a, b) = (a.trim(), b.trim());
    (!a.is_empty() && !b.is_empty() && !b.contains(',')).then_some((a, b))
}

fn matrix(cx: &Ctx, key: &str, v: &Value) -> LResult<QMatrix> {
    let rows = v.as_array().ok_or_else(|| {
        cx.err(
            "planewave",
            key,
            format!("`{key}` must be an array of rows"),
        )
    })?;
    rows.iter()
        .map(|r| {
            let r = r.as_array().ok_or_else(|| {
                cx.err(
                    "planewave",
                    key,
                    format!("`{key}` must be an array of rows"),
                )
            })?;
            r.iter()
                .map(|x| parse_rational(cx, "planewave", key, x))
                .collect()
        })
        .collect()
}

pub fn load(path: &Path) -> LResult<Model> {
    let text = std::fs::read_to_string(path).map_err(|e| LoadError {
        path: path.display().to_string(),
        position: None,
        message: e.to_string(),
    })?;
    parse_model(&text, &path.display().to_string())
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before
        .rsplit('\n')
        .next()
        .map(|l| l.chars().count())
        .unwrap_or(0)
        + 1;
    (line, col)
}

/// Parses and validates a model file held in memory.
pub fn parse_model(text: &str, path: &str) -> LResult<Model> {
    let cx = Ctx { path, text };
    let doc: Table = toml::from_str(text).map_err(|e| LoadError {
        path: path.to_string(),
        position: e.span().map(|s| line_col(text, s.start)),
        message: e.message().trim().to_string(),
    })?;
    for k in doc.keys() {
        if !SECTIONS.contains(&k.as_str()) {
            let position = cx.locate(k, "").or_else(|| cx.locate("", k));
            return Err(LoadError {
                path: path.to_string(),
                position,
                message: format!("unknown section [{k}]"),
            });
        }
    }
    let empty = Table::new();
    let space = doc
        .get("space")
        .map(|v| table(&cx, "space", v))
        .transpose()?
        .unwrap_or(&empty);
    check_keys(&cx, "space", space, SPACE_KEYS)?;
    let name = match space.get("name") {
        Some(v) => v
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| cx.err("space", "name", "`name` must be a string"))?,
        None => Path::new(path)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("model")
            .to_string(),
    };
    let description = space
        .get("description")
        .and_then(Value::as_str)
        .map(str::to_string);
    let mut values = BTreeMap::new();
    if let Some(p) = space.get("parameters") {
        let p = p
            .as_table()
            .ok_or_else(|| cx.err("space", "parameters", "`parameters` must be a table"))?;
        for (k, v) in p {
            values.insert(k.clone(), parse_rational(&cx, "space", "parameters", v)?);
        }
    }
    let killing_dim = match space.get("killing_dim") {
        Some(Value::Integer(i)) if *i >= 0 => Some(*i as usize),
        Some(_) => {
            return Err(cx.err(
                "space",
                "killing_dim",
                "`killing_dim` must be a non-negative integer",
            ))
        }
        None => None,
    };

    let planewave = doc
        .get("planewave")
        .map(|v| load_planewave(&cx, table(&cx, "planewave", v)?))
        .transpose()?;
    let metric = match doc.get("metric") {
        Some(v) => Some(load_metric(&cx, space, table(&cx, "metric", v)?, &values)?),
        None => {
            for k in ["coords", "u", "v", "sample", "lorentzian"] {
                if space.contains_key(k) && planewave.is_none() {
                    return Err(cx.err("space", k, format!("`{k}` needs a [metric] section")));
                }
            }
            None
        }
    };
    if metric.is_some() && planewave.is_some() {
        return Err(cx.err(
            "planewave",
            "",
            "[metric] and [planewave] cannot both be given",
        ));
    }

    let algebra = match doc.get("algebra") {
        Some(v) => Some(load_algebra(
            &cx,
            &doc,
            &name,
            table(&cx, "algebra", v)?,
            &values,
        )?),
        None => {
            for s in ["brackets", "bilinear", "coset"] {
                if doc.contains_key(s) {
                    return Err(cx.err(s, "", format!("[{s}] needs an [algebra] section")));
                }
            }
            None
        }
    };
    if algebra.is_some() && planewave.is_some() {
        return Err(cx.err(
            "planewave",
            "",
            "[algebra] and [planewave] cannot both be given",
        ));
    }
    if let (Some(m), Some(a)) = (&metric, &algebra) {
        for (n, _) in &m.killing {
            if !a.basis.contains(n) {
                return Err(cx.err(
                    "metric",
                    "killing",
                    format!("Killing field `{n}` is not a basis element"),
                ));
            }
        }
    }
    Ok(Model {
        name,
        description,
        metric,
        algebra,
        planewave,
        killing_dim,
    })
}

fn load_metric(
    cx: &Ctx,
    space: &Table,
    t: &Table,
    values: &BTreeMap<String, Q>,
) -> LResult<MetricSpec> {
    let coords = match space.get("coords") {
        Some(v) => string_list(cx, "space", "coords", v)?,
        None => return Err(cx.err("metric", "", "[metric] needs `coords` in [space]")),
    };
    let mut g = linalg::zeros(coords.len(), coords.len());
    let mut set: BTreeMap<(usize, usize), String> = BTreeMap::new();
    let mut line = None;
    let mut killing = Vec::new();
    let mut limit_killing = Vec::new();
    for (k, v) in t {
        if k == "line" {
            line = Some(expr_text(cx, "metric", k, v)?);
        } else if k == "killing" || k == "limit_killing" {
            let fields = v.as_table().ok_or_else(|| {
                cx.err(
                    "metric",
                    k,
                    format!("`{k}` must be a table of vector fields"),
                )
            })?;
            for (name, text) in fields {
                let s = text.as_str().ok_or_else(|| {
                    cx.err("metric", k, format!("field `{name}` must be a string"))
                })?;
                let f = VectorField::parse(s, &coords)
                    .map_err(|e| cx.err("metric", k, format!("field `{name}`: {e}")))?;
                if k == "killing" {
                    &mut killing
                } else {
                    &mut limit_killing
                }
                .push((name.clone(), f));
            }
        } else if let Some((a, b)) = pair_key(k, "g(", ')') {
            let idx = |n: &str| {
                coords
                    .iter()
                    .position(|c| c == n)
                    .ok_or_else(|| cx.err("metric", k, format!("`{n}` is not a coordinate")))
            };
            let (i, j) = (idx(a)?, idx(b)?);
            let e = parse_expr(cx, "metric", k, v)?;
            let key = (i.min(j), i.max(j));
            if let Some(prev) = set.get(&key) {
                if !expr::equal(&g[key.0][key.1], &e).holds() {
                    return Err(cx.err("metric", k, format!("`{k}` disagrees with `{prev}`")));
                }
            }
            set.insert(key, k.clone());
            g[i][j] = e.clone();
            g[j][i] = e;
        } else {
            return Err(cx.err("metric", k, format!("unknown key `{k}` in [metric]")));
        }
    }
    let mut model = match (&line, set.is_empty()) {
        (Some(l), true) => MetricModel::from_line_element(coords.clone(), l)
            .map_err(|e| cx.err("metric", "line", e.to_string()))?,
        (None, false) => {
            MetricModel::new(coords.clone(), g).map_err(|e| cx.err("metric", "", e.to_string()))?
        }
        (Some(_), false) => {
            return Err(cx.err(
                "metric",
                "line",
                "give either `line` or g(a,b) components, not both",
            ))
        }
        (None, true) => return Err(cx.err("metric", "", "[metric] has no components")),
    };
    model.values = values.clone();
    if let Some(s) = space.get("sample") {
        let arr = s
            .as_array()
            .ok_or_else(|| cx.err("space", "sample", "`sample` must be an array"))?;
        let pt: Vec<Q> = arr
            .iter()
            .map(|x| parse_rational(cx, "space", "sample", x))
            .collect::<LResult<_>>()?;
        if pt.len() != coords.len() {
            return Err(cx.err(
                "space",
                "sample",
                format!("`sample` needs {} entries", coords.len()),
            ));
        }
        model.sample = Some(pt);
    }
    match space.get("lorentzian") {
        Some(Value::Boolean(b)) => model.lorentzian = *b,
        Some(_) => return Err(cx.err("space", "lorentzian", "`lorentzian` must be true or false")),
        None => model.lorentzian = true,
    }
    if model.sample.is_some()
        && model
            .parameters()
            .iter()
            .all(|p| model.values.contains_key(p))
    {
        model
            .check_sample()
            .map_err(|e| cx.err("space", "sample", e.to_string()))?;
    }
    let roles = match (space.get("u"), space.get("v")) {
        (Some(u), Some(v)) => {
            let (u, v) = (
                u.as_str()
                    .ok_or_else(|| cx.err("space", "u", "`u` must be a coordinate name"))?,
                v.as_str()
                    .ok_or_else(|| cx.err("space", "v", "`v` must be a coordinate name"))?,
            );
            let roles = Roles::new(&coords, u, v);
            penrose::validate_adapted(&model, &roles)
                .map_err(|e| cx.err("space", "u", e.to_string()))?;
            Some(roles)
        }
        (None, None) => None,
        _ => return Err(cx.err("space", "u", "`u` and `v` must be given together")),
    };
    Ok(MetricSpec {
        model,
        roles,
        killing,
        limit_killing,
    })
}

fn load_algebra(
    cx: &Ctx,
    doc: &Table,
    name: &str,
    t: &Table,
    values: &BTreeMap<String, Q>,
) -> LResult<LieAlgebraModel> {
    check_keys(cx, "algebra", t, ALGEBRA_KEYS)?;
    let basis = match t.get("basis") {
        Some(v) => string_list(cx, "algebra", "basis", v)?,
        None => return Err(cx.err("algebra", "", "[algebra] needs `basis`")),
    };
    let iso = match t.get("isotropy") {
        Some(v) => string_list(cx, "algebra", "isotropy", v)?,
        None => Vec::new(),
    };
    let b: Vec<&str> = basis.iter().map(String::as_str).collect();
    let h: Vec<&str> = iso.iter().map(String::as_str).collect();
    let mut m = LieAlgebraModel::new(name, &b, &h)
        .map_err(|e| cx.err("algebra", "basis", e.to_string()))?;
    match t.get("reductive") {
        Some(Value::Boolean(r)) => m.claims_reductive = *r,
        Some(_) => return Err(cx.err("algebra", "reductive", "`reductive` must be true or false")),
        None => {}
    }
    let empty = Table::new();
    let brackets = doc
        .get("brackets")
        .map(|v| table(cx, "brackets", v))
        .transpose()?
        .unwrap_or(&empty);
    let mut given: BTreeMap<(usize, usize), (String, Vec<Expr>)> = BTreeMap::new();
    for (k, v) in brackets {
        let (a, bb) = pair_key(k, "[", ']').ok_or_else(|| {
            cx.err(
                "brackets",
                k,
                format!("bracket key `{k}` must look like \"[a,b]\""),
            )
        })?;
        let (i, j) = (
            m.index(a)
                .map_err(|e| cx.err("brackets", k, e.to_string()))?,
            m.index(bb)
                .map_err(|e| cx.err("brackets", k, e.to_string()))?,
        );
        let text = expr_text(cx, "brackets", k, v)?;
        let vec = m
            .parse_vector(&text)
            .map_err(|e| cx.err("brackets", k, e.to_string()))?;
        if i == j && vec.iter().any(|x| !x.is_zero()) {
            return Err(cx.err("brackets", k, format!("antisymmetry: `{k}` must vanish")));
        }
        if let Some((other, w)) = given.get(&(j, i)) {
            let ok = vec
                .iter()
                .zip(w)
                .all(|(x, y)| expr::is_zero(&x.add(y)).holds());
            if !ok {
                return Err(cx.err(
                    "brackets",
                    k,
                    format!("antisymmetry: `{k}` = {text} but `{other}` is not its negative"),
                ));
            }
        }
        if given.contains_key(&(i, j)) {
            return Err(cx.err("brackets", k, format!("`{k}` is given twice")));
        }
        given.insert((i, j), (k.clone(), vec.clone()));
        m.set_bracket_vec(i, j, vec)
            .map_err(|e| cx.err("brackets", k, e.to_string()))?;
    }
    if let Some(v) = doc.get("bilinear") {
        let mut seen: BTreeMap<(usize, usize), (String, Expr)> = BTreeMap::new();
        for (k, val) in table(cx, "bilinear", v)? {
            let (a, bb) = pair_key(k, "B(", ')').ok_or_else(|| {
                cx.err(
                    "bilinear",
                    k,
                    format!("form key `{k}` must look like \"B(a,b)\""),
                )
            })?;
            let e = parse_expr(cx, "bilinear", k, val)?;
            let (i, j) = (
                m.index(a)
                    .map_err(|er| cx.err("bilinear", k, er.to_string()))?,
                m.index(bb)
                    .map_err(|er| cx.err("bilinear", k, er.to_string()))?,
            );
            let key = (i.min(j), i.max(j));
            if let Some((other, prev)) = seen.get(&key) {
                if !expr::equal(prev, &e).holds() {
                    return Err(cx.err("bilinear", k, format!("`{k}` disagrees with `{other}`")));
                }
            }
            seen.insert(key, (k.clone(), e.clone()));
            m.set_form(a, bb, e)
                .map_err(|er| cx.err("bilinear", k, er.to_string()))?;
        }
    }
    if let Some(v) = doc.get("coset") {
        let c = table(cx, "coset", v)?;
        check_keys(cx, "coset", c, COSET_KEYS)?;
        let order = c
            .get("order")
            .map(|v| string_list(cx, "coset", "order", v))
            .transpose()?
            .unwrap_or_default();
        let coords = c
            .get("coords")
            .map(|v| string_list(cx, "coset", "coords", v))
            .transpose()?
            .unwrap_or_default();
        let o: Vec<&str> = order.iter().map(String::as_str).collect();
        let cs: Vec<&str> = coords.iter().map(String::as_str).collect();
        m = m
            .with_coset(&o, &cs)
            .map_err(|e| cx.err("coset", "order", e.to_string()))?;
    }
    m = m.with_values(values.clone());
    homspace::validate_algebra(&m)
        .map_err(|e| cx.err("algebra", "", format!("validation failed: {e}")))?;
    Ok(m)
}

fn load_planewave(cx: &Ctx, t: &Table) -> LResult<PlaneWaveData> {
    check_keys(cx, "planewave", t, PLANEWAVE_KEYS)?;
    let class = match t.get("class").and_then(Value::as_str) {
        Some("smooth") => PlaneWaveClass::Smooth,
        Some("singular") => PlaneWaveClass::Singular,
        Some("unclassified") => PlaneWaveClass::Unclassified,
        _ => {
            return Err(cx.err(
                "planewave",
                "class",
                "`class` must be \"smooth\", \"singular\" or \"unclassified\"",
            ))
        }
    };
    let a0 = t
        .get("A0")
        .map(|v| matrix(cx, "A0", v))
        .transpose()?
        .ok_or_else(|| cx.err("planewave", "", "[planewave] needs `A0`"))?;
    let f = match t.get("f") {
        Some(v) => matrix(cx, "f", v)?,
        None => vec![vec![Q::from_integer(0.into()); a0.len()]; a0.len()],
    };
    let abc: Vec<Option<Q>> = ["a", "b", "c"]
        .iter()
        .map(|k| {
            t.get(*k)
                .map(|v| parse_rational(cx, "planewave", k, v))
                .transpose()
        })
        .collect::<LResult<_>>()?;
    let d = if abc.iter().all(Option::is_some) {
        let [a, b, c] = [
            abc[0].clone().unwrap(),
            abc[1].clone().unwrap(),
            abc[2].clone().unwrap(),
        ];
        let d = PlaneWaveData::with_parameters(a0, f, [a, b, c])
            .map_err(|e| cx.err("planewave", "a", e.to_string()))?;
        if d.class != class {
            return Err(cx.err(
                "planewave",
                "class",
                format!("(a, b, c) belong to class {}, file says {class}", d.class),
            ));
        }
        d
    } else if abc.iter().any(Option::is_some) {
        return Err(cx.err("planewave", "a", "give all of a, b, c or none"));
    } else {
        PlaneWaveData::new(a0, f, class).map_err(|e| cx.err("planewave", "class", e.to_string()))?
    };
    planewave::bo_isometry_algebra(&d).map_err(|e| cx.err("planewave", "", e.to_string()))?;
    Ok(d)
}

// ---------------------------------------------------------------------------
// writing

fn quote(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

fn list(items: &[String]) -> String {
    format!(
        "[{}]",
        items
            .iter()
            .map(|s| quote(s))
            .collect::<Vec<_>>()
            .join(", ")
    )
}

/// Canonical model file text; loading it gives back an equal model.
pub fn to_model_file(m: &Model) -> String {
    let mut out = String::new();
    out.push_str("[space]\n");
    out.push_str(&format!("name = {}\n", quote(&m.name)));
    if let Some(d) = &m.description {
        out.push_str(&format!("description = {}\n", quote(d)));
    }
    if let Some(k) = m.killing_dim {
        out.push_str(&format!("killing_dim = {k}\n"));
    }
    let values = m
        .metric
        .as_ref()
        .map(|s| s.model.values.clone())
        .or_else(|| m.algebra.as_ref().map(|a| a.values.clone()))
        .unwrap_or_default();
    if !values.is_empty() {
        let items: Vec<String> = values
            .iter()
            .map(|(k, v)| format!("{k} = {}", quote(&v.to_string())))
            .collect();
        out.push_str(&format!("parameters = {{ {} }}\n", items.join(", ")));
    }
    if let Some(s) = &m.metric {
        let mm = &s.model;
        out.push_str(&format!("coords = {}\n", list(&mm.coords)));
        if let Some(r) = &s.roles {
            out.push_str(&format!("u = {}\nv = {}\n", quote(&r.u), quote(&r.v)));
        }
        if let Some(p) = &mm.sample {
            out.push_str(&format!(
                "sample = {}\n",
                list(&p.iter().map(|q| q.to_string()).collect::<Vec<_>>())
            ));
        }
        out.push_str(&format!("lorentzian = {}\n", mm.lorentzian));
        out.push_str("\n[metric]\n");
        for i in 0..mm.dim() {
            for j in i..mm.dim() {
                if !mm.g[i][j].is_zero() {
                    out.push_str(&format!(
                        "\"g({},{})\" = {}\n",
                        mm.coords[i],
                        mm.coords[j],
                        quote(&mm.g[i][j].to_string())
                    ));
                }
            }
        }
        for (title, fields) in [("killing", &s.killing), ("limit_killing", &s.limit_killing)] {
            if !fields.is_empty() {
                out.push_str(&format!("\n[metric.{title}]\n"));
                for (n, f) in fields {
                    out.push_str(&format!("{n} = {}\n", quote(&f.display(&mm.coords))));
                }
            }
        }
    }
    if let Some(a) = &m.algebra {
        out.push_str("\n[algebra]\n");
        out.push_str(&format!("basis = {}\n", list(&a.basis)));
        let iso: Vec<String> = a.isotropy.iter().map(|&i| a.basis[i].clone()).collect();
        out.push_str(&format!("isotropy = {}\n", list(&iso)));
        out.push_str(&format!("reductive = {}\n", a.claims_reductive));
        out.push_str("\n[brackets]\n");
        for i in 0..a.dim() {
            for j in i + 1..a.dim() {
                let v = a.bracket(&a.e(i), &a.e(j));
                if v.iter().any(|x| !x.is_zero()) {
                    out.push_str(&format!(
                        "\"[{},{}]\" = {}\n",
                        a.basis[i],
                        a.basis[j],
                        quote(&a.display_vector(&v))
                    ));
                }
            }
        }
        out.push_str("\n[bilinear]\n");
        for p in 0..a.m_dim() {
            for q in p..a.m_dim() {
                if !a.form[p][q].is_zero() {
                    let (x, y) = (&a.basis[a.complement[p]], &a.basis[a.complement[q]]);
                    out.push_str(&format!(
                        "\"B({x},{y})\" = {}\n",
                        quote(&a.form[p][q].to_string())
                    ));
                }
            }
        }
        if let Some(c) = &a.coset {
            let order: Vec<String> = c.order.iter().map(|&i| a.basis[i].clone()).collect();
            out.push_str(&format!(
                "\n[coset]\norder = {}\ncoords = {}\n",
                list(&order),
                list(&c.coords)
            ));
        }
    }
    if let Some(d) = &m.planewave {
        let rows = |q: &QMatrix| {
            let r: Vec<String> = q
                .iter()
                .map(|row| list(&row.iter().map(|x| x.to_string()).collect::<Vec<_>>()))
                .collect();
            format!("[{}]", r.join(", "))
        };
        out.push_str("\n[planewave]\n");
        out.push_str(&format!("class = {}\n", quote(d.class.as_str())));
        out.push_str(&format!("A0 = {}\n", rows(&d.a0)));
        out.push_str(&format!("f = {}\n", rows(&d.f)));
        if d.class == PlaneWaveClass::Unclassified {
            for (k, v) in ["a", "b", "c"].iter().zip(&d.abc) {
                out.push_str(&format!("{k} = {}\n", quote(&v.to_string())));
            }
        }
    }
    out
}
