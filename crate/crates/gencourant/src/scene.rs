//! Scene files.
//!
//! A scene is a JSON document:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "chart": { "dim": 2, "coords": ["x", "y"], "domain": [[-1, 1], [-1, 1]], "seed": 7, "points": 16 },
//!   "background": {
//!     "g": { "x,x": "1 + x^2/4", "y,y": "1" },
//!     "B": { "x,y": "2 + x*y" },
//!     "phi": "x - y/3",
//!     "B0": { "x,y": "x^2" }
//!   },
//!   "connection": { "J": {}, "W": { "x,x,y": "y" } },
//!   "options": { "policy": "project", "tolerances": { "sym": 1e-9, "fd": 1e-6 } }
//! }
//! ```
//!
//! Tensor entries are keyed by comma-separated coordinate names. `g` takes
//! the upper triangle, `B` and `B0` the strict upper triangle, `H` strictly
//! increasing triples, and `J`, `W` triples whose last two names increase.
//! Missing entries are zero and the remaining components are completed by
//! symmetry. At most one of `H` and `B0` may be given; without either, `H = 0`.

use crate::error::CliError;
use gencourant_core::gconn::{validate_params, ConnParams, Policy};
use gencourant_core::streff::Background;
use gencourant_core::{Chart, Expr, TensorField, Variance};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_TOL_SYM: f64 = 1e-9;
pub const DEFAULT_TOL_FD: f64 = 1e-6;

type Entries = BTreeMap<String, String>;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    schema_version: u32,
    chart: ChartSpec,
    background: BackgroundSpec,
    #[serde(default)]
    connection: Option<ConnectionSpec>,
    #[serde(default)]
    options: OptionsSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChartSpec {
    dim: usize,
    coords: Vec<String>,
    #[serde(default)]
    domain: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    points: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BackgroundSpec {
    g: Entries,
    #[serde(default, rename = "B")]
    b: Entries,
    #[serde(default)]
    phi: Option<String>,
    #[serde(default, rename = "H")]
    h: Option<Entries>,
    #[serde(default, rename = "B0")]
    b0: Option<Entries>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConnectionSpec {
    #[serde(default, rename = "J")]
    j: Entries,
    #[serde(default, rename = "W")]
    w: Entries,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptionsSpec {
    #[serde(default)]
    policy: Option<PolicyName>,
    #[serde(default)]
    tolerances: TolSpec,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct TolSpec {
    sym: Option<f64>,
    fd: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum PolicyName {
    Reject,
    Project,
}

impl PolicyName {
    pub fn policy(self) -> Policy {
        match self {
            PolicyName::Reject => Policy::Reject,
            PolicyName::Project => Policy::Project,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyName::Reject => "reject",
            PolicyName::Project => "project",
        }
    }
}

/// Command-line values that take precedence over the scene file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub points: Option<usize>,
    pub tol_sym: Option<f64>,
    pub tol_fd: Option<f64>,
    pub policy: Option<PolicyName>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Identities between symbolic quantities.
    pub sym: f64,
    /// Comparisons against finite differences.
    pub fd: f64,
}

/// A validated scene.
#[derive(Clone)]
pub struct Scene {
    pub chart: Arc<Chart>,
    pub background: Background,
    pub params: Option<ConnParams>,
    pub policy: PolicyName,
    pub tolerances: Tolerances,
}

pub fn load_scene(path: &Path, ov: &Overrides) -> Result<Scene, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse {
        location: path.display().to_string(),
        offset: None,
        message: e.to_string(),
    })?;
    parse_scene(&text, ov)
}

pub fn parse_scene(text: &str, ov: &Overrides) -> Result<Scene, CliError> {
    let file: SceneFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        location: format!("scene line {} column {}", e.line(), e.column()),
        offset: None,
        message: e.to_string(),
    })?;
    if file.schema_version != SCHEMA_VERSION {
        return Err(CliError::Validation(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    let chart = build_chart(&file.chart, ov)?;
    let bg = build_background(&chart, &file.background)?;
    let policy = ov.policy.or(file.options.policy).unwrap_or(PolicyName::Project);
    let params = match &file.connection {
        Some(c) => Some(build_params(&chart, c, policy)?),
        None => None,
    };
    let tolerances = Tolerances {
        sym: ov.tol_sym.or(file.options.tolerances.sym).unwrap_or(DEFAULT_TOL_SYM),
        fd: ov.tol_fd.or(file.options.tolerances.fd).unwrap_or(DEFAULT_TOL_FD),
    };
    for (name, t) in [("sym", tolerances.sym), ("fd", tolerances.fd)] {
        if !(t.is_finite() && t >= 0.0) {
            return Err(CliError::Validation(format!("tolerance `{name}` must be finite and non-negative")));
        }
    }
    Ok(Scene {
        chart,
        background: bg,
        params,
        policy,
        tolerances,
    })
}

fn build_chart(spec: &ChartSpec, ov: &Overrides) -> Result<Arc<Chart>, CliError> {
    if spec.coords.len() != spec.dim {
        return Err(CliError::Validation(format!(
            "chart.dim is {} but {} coordinates are named",
            spec.dim,
            spec.coords.len()
        )));
    }
    let names: Vec<&str> = spec.coords.iter().map(String::as_str).collect();
    let mut chart = Chart::new(&names).map_err(|e| CliError::Validation(format!("chart: {e}")))?;
    if let Some(d) = &spec.domain {
        chart = chart
            .with_domain(d.iter().map(|&[a, b]| (a, b)).collect())
            .map_err(|e| CliError::Validation(format!("chart.domain: {e}")))?;
    }
    let points = ov.points.or(spec.points).unwrap_or(gencourant_core::chart::DEFAULT_POINTS);
    if points == 0 {
        return Err(CliError::Validation("at least one sample point is needed".into()));
    }
    Ok(Arc::new(chart.with_sampling(ov.seed.unwrap_or(spec.seed), points)))
}

/// Coordinate indices of an entry key such as `"x, y"`.
fn key_indices(chart: &Chart, field: &str, key: &str) -> Result<Vec<usize>, CliError> {
    key.split(',')
        .map(|s| {
            chart
                .index_of(s.trim())
                .map_err(|_| CliError::Validation(format!("{field}: unknown coordinate `{}` in key `{key}`", s.trim())))
        })
        .collect()
}

/// Parses the entries of `field` into `(indices, expression)` pairs, checking
/// the key arity and that `ordered(indices)` holds.
fn parse_entries(
    chart: &Chart,
    field: &str,
    entries: &Entries,
    arity: usize,
    ordered: fn(&[usize]) -> bool,
    rule: &str,
) -> Result<Vec<(Vec<usize>, Expr)>, CliError> {
    let mut out: Vec<(Vec<usize>, Expr)> = Vec::new();
    for (key, text) in entries {
        let idx = key_indices(chart, field, key)?;
        if idx.len() != arity {
            return Err(CliError::Validation(format!("{field}: key `{key}` needs {arity} coordinates")));
        }
        if !ordered(&idx) {
            return Err(CliError::Validation(format!("{field}: key `{key}` is not allowed, {rule}")));
        }
        if out.iter().any(|(i, _)| *i == idx) {
            return Err(CliError::Validation(format!("{field}: entry `{key}` is given twice")));
        }
        let e = chart.parse(text).map_err(|e| CliError::from_core(&format!("{field}[\"{key}\"]"), e))?;
        out.push((idx, e));
    }
    Ok(out)
}

fn upper(i: &[usize]) -> bool {
    i[0] <= i[1]
}

fn strict(i: &[usize]) -> bool {
    i.windows(2).all(|w| w[0] < w[1])
}

fn last_pair(i: &[usize]) -> bool {
    i[1] < i[2]
}

fn symmetric2(chart: &Arc<Chart>, field: &str, entries: &Entries) -> Result<TensorField, CliError> {
    let parsed = parse_entries(chart, field, entries, 2, upper, "give the upper triangle")?;
    let mut t = TensorField::zeros(chart.clone(), vec![Variance::Down; 2]);
    for (i, e) in parsed {
        t.set(&[i[1], i[0]], e.clone());
        t.set(&i, e);
    }
    Ok(t)
}

/// A fully antisymmetric covariant tensor of rank `p` from its increasing entries.
fn form(chart: &Arc<Chart>, field: &str, entries: &Entries, p: usize) -> Result<TensorField, CliError> {
    let parsed = parse_entries(chart, field, entries, p, strict, "indices must increase")?;
    Ok(TensorField::form_from_increasing(chart.clone(), p, |idx| {
        parsed.iter().find(|(i, _)| i == idx).map_or_else(Expr::zero, |(_, e)| e.clone())
    }))
}

fn build_background(chart: &Arc<Chart>, spec: &BackgroundSpec) -> Result<Background, CliError> {
    let g = symmetric2(chart, "background.g", &spec.g)?;
    let b = form(chart, "background.B", &spec.b, 2)?;
    let phi = match &spec.phi {
        Some(t) => chart.parse(t).map_err(|e| CliError::from_core("background.phi", e))?,
        None => Expr::zero(),
    };
    let built = match (&spec.h, &spec.b0) {
        (Some(_), Some(_)) => return Err(CliError::Validation("give at most one of background.H and background.B0".into())),
        (Some(h), None) => Background::new(&g, &b, phi, &form(chart, "background.H", h, 3)?),
        (None, Some(b0)) => Background::from_potential(&g, &b, phi, &form(chart, "background.B0", b0, 2)?),
        (None, None) => Background::untwisted(&g, &b, phi),
    };
    built.map_err(|e| CliError::Validation(format!("background: {e}")))
}

/// A rank-3 tensor skew in its last two slots.
fn skew_last(chart: &Arc<Chart>, field: &str, entries: &Entries, v: Variance) -> Result<TensorField, CliError> {
    let parsed = parse_entries(chart, field, entries, 3, last_pair, "the last two indices must increase")?;
    let mut t = TensorField::zeros(chart.clone(), vec![v; 3]);
    for (i, e) in parsed {
        t.set(&[i[0], i[2], i[1]], -&e);
        t.set(&i, e);
    }
    Ok(t)
}

fn build_params(chart: &Arc<Chart>, spec: &ConnectionSpec, policy: PolicyName) -> Result<ConnParams, CliError> {
    let j = skew_last(chart, "connection.J", &spec.j, Variance::Up)?;
    let w = skew_last(chart, "connection.W", &spec.w, Variance::Down)?;
    validate_params(&j, &w, policy.policy()).map_err(|e| CliError::Validation(format!("connection: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(g12: &str, g22: &str) -> String {
        format!(
            r#"{{"schema_version": 1,
                "chart": {{"dim": 2, "coords": ["x", "y"], "seed": 3, "points": 5}},
                "background": {{"g": {{"x,x": "1", "x,y": "{g12}", "y,y": "{g22}"}}}}}}"#
        )
    }

    #[test]
    fn minimal_flat_scene() {
        let s = parse_scene(&minimal("0", "1"), &Overrides::default()).unwrap();
        assert_eq!(s.chart.dim(), 2);
        assert_eq!(s.chart.num_points(), 5);
        assert_eq!(s.policy, PolicyName::Project);
        assert_eq!(s.tolerances, Tolerances { sym: 1e-9, fd: 1e-6 });
        assert!(s.background.b().components().iter().all(Expr::is_zero));
        assert!(s.params.is_none());
    }

    #[test]
    fn bad_expression_reports_offset() {
        match parse_scene(&minimal("x^", "1"), &Overrides::default()) {
            Err(CliError::Parse { location, offset, .. }) => {
                assert_eq!(location, "background.g[\"x,y\"]");
                assert_eq!(offset, Some(2));
            }
            Err(e) => panic!("{e}"),
            Ok(_) => panic!("accepted"),
        }
    }

    #[test]
    fn indefinite_metric_is_rejected() {
        let err = parse_scene(&minimal("0", "-1"), &Overrides::default()).err().unwrap();
        assert!(matches!(&err, CliError::Validation(m) if m.contains("not positive definite")), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn lower_triangle_and_unknown_keys_are_rejected() {
        let text = minimal("0", "1").replace("\"x,y\"", "\"y,x\"");
        assert!(matches!(parse_scene(&text, &Overrides::default()), Err(CliError::Validation(_))));
        let text = minimal("0", "1").replace("\"x,y\"", "\"x,q\"");
        assert!(matches!(parse_scene(&text, &Overrides::default()), Err(CliError::Validation(_))));
        let text = minimal("0", "1").replace("\"points\": 5", "\"points\": 5, \"extra\": 1");
        assert!(matches!(parse_scene(&text, &Overrides::default()), Err(CliError::Parse { .. })));
    }

    #[test]
    fn overrides_take_precedence() {
        let ov = Overrides {
            seed: Some(11),
            points: Some(2),
            tol_sym: Some(1e-6),
            tol_fd: None,
            policy: Some(PolicyName::Reject),
        };
        let s = parse_scene(&minimal("0", "1"), &ov).unwrap();
        assert_eq!(s.chart.seed(), 11);
        assert_eq!(s.chart.num_points(), 2);
        assert_eq!(s.tolerances.sym, 1e-6);
        assert_eq!(s.policy, PolicyName::Reject);
    }

    #[test]
    fn connection_parameters_follow_the_policy() {
        let text = r#"{"schema_version": 1,
            "chart": {"dim": 3, "coords": ["x", "y", "z"], "points": 4},
            "background": {"g": {"x,x": "1", "y,y": "1", "z,z": "1"}},
            "connection": {"W": {"x,y,z": "1"}}}"#;
        let s = parse_scene(text, &Overrides::default()).unwrap();
        let w = s.params.unwrap();
        assert!(w.w().max_abs().unwrap() > 0.1);
        let ov = Overrides {
            policy: Some(PolicyName::Reject),
            ..Overrides::default()
        };
        assert!(matches!(parse_scene(text, &ov), Err(CliError::Validation(m)) if m.contains("cyclic")));
    }

    #[test]
    fn flux_must_be_closed() {
        let text = r#"{"schema_version": 1,
            "chart": {"dim": 4, "coords": ["x", "y", "z", "w"], "points": 4},
            "background": {"g": {"x,x": "1", "y,y": "1", "z,z": "1", "w,w": "1"},
                           "H": {"y,z,w": "x"}}}"#;
        assert!(matches!(parse_scene(text, &Overrides::default()), Err(CliError::Validation(m)) if m.contains("not closed")));
        let text = text.replace("\"H\": {\"y,z,w\": \"x\"}", "\"B0\": {\"x,y\": \"z^2\"}");
        let s = parse_scene(&text, &Overrides::default()).unwrap();
        assert!(s.background.h().max_abs().unwrap() > 0.0);
        let both = text.replace("\"B0\"", "\"H\": {}, \"B0\"");
        assert!(matches!(parse_scene(&both, &Overrides::default()), Err(CliError::Validation(m)) if m.contains("at most one")));
    }
}
