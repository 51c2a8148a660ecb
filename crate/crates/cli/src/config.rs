//! Run configuration: JSON parsing, dotted-key overrides, defaults and
//! validation.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use subsonic_core::elliptic::{ContinuationConfig, SolverConfig};
use subsonic_core::farfield::BernoulliProfile;
use subsonic_core::gas::GasLaw;
use subsonic_core::geometry::{
    build_nozzle, BcMode, NozzleGeometry, NozzleSpec, SUPPORTED_FAMILIES,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config is not valid JSON: {0}")]
    Json(serde_json::Error),
    #[error("config error at `{path}`: {message}")]
    Key { path: String, message: String },
    #[error("invalid override `{0}`: expected key=value")]
    Override(String),
    #[error("unknown nozzle family `{found}`; supported families: {}", SUPPORTED_FAMILIES.join(", "))]
    UnknownFamily { found: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("table {path}: {message}")]
    Table { path: PathBuf, message: String },
}

/// Bernoulli function over `x₂ ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum BernoulliConfig {
    Constant(f64),
    /// Coefficients from the constant term upward.
    Polynomial(Vec<f64>),
    Table {
        x: Vec<f64>,
        values: Vec<f64>,
    },
    /// CSV with header `x2,B`.
    TablePath(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverSection {
    pub n_xi: usize,
    pub n_eta: usize,
    #[serde(rename = "L0")]
    pub l0: f64,
    #[serde(rename = "L_max")]
    pub l_max: f64,
    pub tol_nonlinear: f64,
    pub tol_farfield: f64,
    pub eps0_scale: f64,
    pub damping: f64,
    pub max_iter: usize,
    pub bc_mode: BcMode,
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            n_xi: 401,
            n_eta: 41,
            l0: 8.0,
            l_max: 32.0,
            tol_nonlinear: 1e-10,
            tol_farfield: 1e-6,
            eps0_scale: 0.05,
            damping: 0.7,
            max_iter: 200,
            bc_mode: BcMode::Paper,
        }
    }
}

impl SolverSection {
    pub fn continuation(&self) -> ContinuationConfig {
        ContinuationConfig {
            l0: self.l0,
            l_max: self.l_max,
            n_xi: self.n_xi,
            n_eta: self.n_eta,
            tol_farfield: self.tol_farfield,
            solver: SolverConfig {
                tol_nonlinear: self.tol_nonlinear,
                max_iter: self.max_iter,
                damping: self.damping,
                bc_mode: self.bc_mode,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub field_csv_path: PathBuf,
    pub summary_json_path: PathBuf,
    pub profiles_csv_path: PathBuf,
    pub margin_csv_path: PathBuf,
    pub gastable_csv_path: PathBuf,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            field_csv_path: "field.csv".into(),
            summary_json_path: "summary.json".into(),
            profiles_csv_path: "farfield_profiles.csv".into(),
            margin_csv_path: "margin_curve.csv".into(),
            gastable_csv_path: "gastable.csv".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriticalSection {
    pub tol_m: f64,
    /// First accepted flux of the search; defaults to half the largest
    /// upstream subsonic flux.
    pub m_start: Option<f64>,
    /// When given, sweep these fluxes instead of bisecting.
    pub m_values: Option<Vec<f64>>,
}

impl Default for CriticalSection {
    fn default() -> Self {
        Self {
            tol_m: 0.01,
            m_start: None,
            m_values: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GastableSection {
    pub s_min: f64,
    pub s_max: f64,
    pub n: usize,
}

impl Default for GastableSection {
    fn default() -> Self {
        Self {
            s_min: 0.5,
            s_max: 5.0,
            n: 46,
        }
    }
}

/// The JSON document as written by the user.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    gas: GasLaw,
    #[serde(rename = "B")]
    bernoulli: BernoulliConfig,
    nozzle: Value,
    m: f64,
    #[serde(default)]
    solver: SolverSection,
    #[serde(default)]
    outputs: OutputSection,
    #[serde(default)]
    critical: CriticalSection,
    #[serde(default)]
    gastable: GastableSection,
}

/// Validated configuration with tables loaded.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub gas: GasLaw,
    pub bernoulli: BernoulliConfig,
    pub profile: BernoulliProfile,
    pub nozzle_spec: NozzleSpec,
    pub nozzle: NozzleGeometry,
    pub m: f64,
    pub solver: SolverSection,
    pub outputs: OutputSection,
    pub critical: CriticalSection,
    pub gastable: GastableSection,
}

/// Set `key` (dotted path) to `value`, parsed as JSON when possible and as
/// a string otherwise. Missing objects along the path are created.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::Override(assignment.into()))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(ConfigError::Override(assignment.into()));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut node = doc;
    for part in key.split('.') {
        node = match node {
            Value::Array(items) => {
                let idx: usize = part
                    .parse()
                    .map_err(|_| ConfigError::Override(assignment.into()))?;
                items
                    .get_mut(idx)
                    .ok_or_else(|| ConfigError::Override(assignment.into()))?
            }
            other => {
                if !other.is_object() {
                    *other = Value::Object(Default::default());
                }
                other
                    .as_object_mut()
                    .expect("object")
                    .entry(part)
                    .or_insert(Value::Null)
            }
        };
    }
    *node = value;
    Ok(())
}

fn deserialize_at<T: serde::de::DeserializeOwned>(
    value: Value,
    prefix: &str,
) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        let path = match (prefix, inner.as_str()) {
            ("", p) => p.to_string(),
            (pre, ".") => pre.to_string(),
            (pre, p) => format!("{pre}.{p}"),
        };
        ConfigError::Key {
            path,
            message: e.into_inner().to_string(),
        }
    })
}

fn read_csv_table(path: &Path, columns: &[&str]) -> Result<Vec<Vec<f64>>, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.into(),
        source,
    })?;
    let table_err = |message: String| ConfigError::Table {
        path: path.into(),
        message,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: Vec<&str> = lines
        .next()
        .ok_or_else(|| table_err("empty file".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    if header != columns {
        return Err(table_err(format!(
            "expected header `{}`, found `{}`",
            columns.join(","),
            header.join(",")
        )));
    }
    let mut cols = vec![Vec::new(); columns.len()];
    for (n, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != columns.len() {
            return Err(table_err(format!(
                "row {} has {} fields",
                n + 2,
                fields.len()
            )));
        }
        for (col, f) in cols.iter_mut().zip(fields) {
            col.push(
                f.parse()
                    .map_err(|_| table_err(format!("row {}: `{f}` is not a number", n + 2)))?,
            );
        }
    }
    Ok(cols)
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn nozzle_spec(value: Value, base: &Path) -> Result<NozzleSpec, ConfigError> {
    let family = value
        .get("family")
        .and_then(Value::as_str)
        .map(str::to_string);
    match family.as_deref() {
        None => Err(ConfigError::Key {
            path: "nozzle.family".into(),
            message: "missing field `family`".into(),
        }),
        Some(f) if !SUPPORTED_FAMILIES.contains(&f) => {
            Err(ConfigError::UnknownFamily { found: f.into() })
        }
        Some("tabulated") if value.get("path").is_some() => {
            let path: PathBuf = deserialize_at(value["path"].clone(), "nozzle.path")?;
            if value.as_object().is_some_and(|o| o.len() != 2) {
                return Err(ConfigError::Invalid(
                    "a tabulated nozzle takes either `path` or `lower`/`upper`".into(),
                ));
            }
            let cols = read_csv_table(&resolve(base, &path), &["x1", "lower", "upper"])?;
            let pairs = |k: usize| {
                cols[0]
                    .iter()
                    .zip(&cols[k])
                    .map(|(&x, &y)| [x, y])
                    .collect()
            };
            Ok(NozzleSpec::Tabulated {
                lower: pairs(1),
                upper: pairs(2),
            })
        }
        Some(_) => deserialize_at(value, "nozzle"),
    }
}

fn bernoulli_profile(cfg: &BernoulliConfig, base: &Path) -> Result<BernoulliProfile, ConfigError> {
    let invalid =
        |e: subsonic_core::farfield::FarFieldError| ConfigError::Invalid(format!("B: {e}"));
    match cfg {
        BernoulliConfig::Constant(c) => BernoulliProfile::constant(*c).map_err(invalid),
        BernoulliConfig::Polynomial(c) => BernoulliProfile::polynomial(c.clone()).map_err(invalid),
        BernoulliConfig::Table { x, values } => {
            BernoulliProfile::table(x.clone(), values.clone()).map_err(invalid)
        }
        BernoulliConfig::TablePath(p) => {
            let mut cols = read_csv_table(&resolve(base, p), &["x2", "B"])?;
            let values = cols.pop().expect("two columns");
            let x = cols.pop().expect("two columns");
            BernoulliProfile::table(x, values).map_err(invalid)
        }
    }
}

fn validate(raw: &RawConfig) -> Result<(), ConfigError> {
    let bad = |msg: String| Err(ConfigError::Invalid(msg));
    if !(raw.m > 0.0 && raw.m.is_finite()) {
        return bad(format!("m must be positive, got {}", raw.m));
    }
    let s = &raw.solver;
    if s.n_xi < 3 || s.n_eta < 3 {
        return bad(format!(
            "n_xi and n_eta must be at least 3, got {} and {}",
            s.n_xi, s.n_eta
        ));
    }
    for (name, v) in [
        ("tol_nonlinear", s.tol_nonlinear),
        ("tol_farfield", s.tol_farfield),
        ("eps0_scale", s.eps0_scale),
        ("L0", s.l0),
        ("critical.tol_m", raw.critical.tol_m),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return bad(format!("{name} must be positive, got {v}"));
        }
    }
    if !(s.l_max >= s.l0) {
        return bad(format!(
            "L_max must be at least L0, got {} < {}",
            s.l_max, s.l0
        ));
    }
    if !(s.damping > 0.0 && s.damping <= 1.0) {
        return bad(format!("damping must lie in (0, 1], got {}", s.damping));
    }
    if s.max_iter == 0 {
        return bad("max_iter must be at least 1".into());
    }
    let g = &raw.gastable;
    if g.n < 2 || !(g.s_max > g.s_min) {
        return bad("gastable needs n >= 2 and s_max > s_min".into());
    }
    Ok(())
}

/// Parse config text. `base` resolves relative table paths.
pub fn parse_config_str(
    text: &str,
    base: &Path,
    overrides: &[String],
) -> Result<RunConfig, ConfigError> {
    let mut doc: Value = serde_json::from_str(text).map_err(ConfigError::Json)?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let raw: RawConfig = deserialize_at(doc, "")?;
    validate(&raw)?;
    raw.gas
        .validate()
        .map_err(|e| ConfigError::Invalid(format!("gas: {e}")))?;
    let profile = bernoulli_profile(&raw.bernoulli, base)?;
    let nozzle_spec = nozzle_spec(raw.nozzle, base)?;
    let nozzle =
        build_nozzle(&nozzle_spec).map_err(|e| ConfigError::Invalid(format!("nozzle: {e}")))?;
    Ok(RunConfig {
        gas: raw.gas,
        bernoulli: raw.bernoulli,
        profile,
        nozzle_spec,
        nozzle,
        m: raw.m,
        solver: raw.solver,
        outputs: raw.outputs,
        critical: raw.critical,
        gastable: raw.gastable,
    })
}

pub fn load_config(path: &Path, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.into(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    parse_config_str(&text, base, overrides)
}

/// Best-effort summary location for runs whose config failed to parse.
pub fn summary_path_hint(path: &Path, overrides: &[String]) -> PathBuf {
    let from_doc = fs::read_to_string(path)
        .ok()
        .and_then(|t| serde_json::from_str::<Value>(&t).ok())
        .and_then(|mut d| {
            for o in overrides {
                apply_override(&mut d, o).ok()?;
            }
            d.pointer("/outputs/summary_json_path")
                .and_then(Value::as_str)
                .map(PathBuf::from)
        });
    from_doc.unwrap_or_else(|| OutputSection::default().summary_json_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "gas": {"kind": "polytropic", "A": 0.5, "gamma": 2.0},
        "B": {"constant": 1.5},
        "nozzle": {"family": "straight"},
        "m": 0.5
    }"#;

    fn parse(text: &str, overrides: &[&str]) -> Result<RunConfig, ConfigError> {
        let o: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
        parse_config_str(text, Path::new("."), &o)
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse(MINIMAL, &[]).unwrap();
        assert_eq!(c.solver, SolverSection::default());
        assert_eq!(
            (c.solver.n_xi, c.solver.n_eta, c.solver.l0, c.solver.l_max),
            (401, 41, 8.0, 32.0)
        );
        assert_eq!(
            (c.solver.tol_nonlinear, c.solver.tol_farfield),
            (1e-10, 1e-6)
        );
        assert_eq!((c.solver.eps0_scale, c.solver.damping), (0.05, 0.7));
        assert_eq!(c.m, 0.5);
        assert!(c.nozzle.is_straight_strip());
    }

    #[test]
    fn negative_mass_flux_is_rejected() {
        let err = parse(MINIMAL, &["m=-1"]).unwrap_err();
        assert!(err.to_string().contains("m must be positive"), "{err}");
    }

    #[test]
    fn unknown_family_lists_supported() {
        let err = parse(MINIMAL, &["nozzle.family=\"venturi\""]).unwrap_err();
        let msg = err.to_string();
        for f in SUPPORTED_FAMILIES {
            assert!(msg.contains(f), "{msg}");
        }
    }

    #[test]
    fn missing_key_is_named() {
        let err = parse(r#"{"gas": {"kind": "isothermal", "c": 1.0}, "B": {"constant": 1.5}, "nozzle": {"family": "straight"}}"#, &[])
            .unwrap_err();
        assert!(err.to_string().contains("missing field `m`"), "{err}");
    }

    #[test]
    fn nested_errors_carry_key_path() {
        let err = parse(MINIMAL, &["solver.n_xi=\"many\""]).unwrap_err();
        assert!(err.to_string().contains("`solver.n_xi`"), "{err}");
        let err = parse(
            MINIMAL,
            &["nozzle={\"family\": \"bump\", \"amplitude\": 0.1}"],
        )
        .unwrap_err();
        assert!(err.to_string().contains("nozzle"), "{err}");
        let err = parse(MINIMAL, &["solver.tolerance=1"]).unwrap_err();
        assert!(
            err.to_string().contains("solver.tolerance")
                || err.to_string().contains("unknown field"),
            "{err}"
        );
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let c = parse(
            MINIMAL,
            &[
                "solver.n_xi=101",
                "solver.bc_mode=farfield_profile",
                "B.constant=2.0",
            ],
        )
        .unwrap();
        assert_eq!(c.solver.n_xi, 101);
        assert_eq!(c.solver.bc_mode, BcMode::FarfieldProfile);
        assert_eq!(c.bernoulli, BernoulliConfig::Constant(2.0));
        assert!(parse(MINIMAL, &["novalue"]).is_err());
        assert!(parse(MINIMAL, &["a..b=1"]).is_err());
    }

    #[test]
    fn validation_catches_bad_solver_values() {
        assert!(parse(MINIMAL, &["solver.n_eta=2"]).is_err());
        assert!(parse(MINIMAL, &["solver.tol_farfield=0"]).is_err());
        assert!(parse(MINIMAL, &["solver.damping=1.5"]).is_err());
        assert!(parse(MINIMAL, &["solver.L_max=4"]).is_err());
        assert!(parse(MINIMAL, &["gas.gamma=0.5"]).is_err());
    }
}
