//! Command-line driver: configuration, orchestration and report files.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::connection_complex::{curvature_sweep, CurvatureSample};
use crate::connection_real::radial_flag_bounds;
use crate::distance::{gradient_report, levi_sweep, write_levi_csv, LeviSample};
use crate::error::{FinslerError, Result};
use crate::exec;
use crate::geodesic::{distance, hessian_rho_bound, integrate_geodesic, GeodesicPath};
use crate::geometry::{complex_to_real, real_metric_value};
use crate::kahler::{classify, weakly_kahler_pde_residual, KahlerClass, PdeGrid};
use crate::metrics::{check_metric, instantiate, FamilySpec, MapSpec, MetricDef};
use crate::report::{sphere_lattice, SamplePlan, SampleRecord, VerificationReport};
use crate::schwarz::{certify_schwarz, curvature_bounds, Role, SCHWARZ_TOL};

pub const SCHEMA: u32 = 1;

/// Slack for the comparison-geometry inequalities, absorbing distance error.
pub const BOUND_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Check,
    Curvature,
    Geodesic,
    Distance,
    Bounds,
    Schwarz,
    Replay,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Curvature => "curvature",
            Command::Geodesic => "geodesic",
            Command::Distance => "distance",
            Command::Bounds => "bounds",
            Command::Schwarz => "schwarz",
            Command::Replay => "replay",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "finsler", version, about = "Numerical real and complex Finsler geometry")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Run configuration (TOML, or JSON by extension); a report file for `replay`.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Check tolerance override; for `replay`, numeric comparison tolerance
    /// instead of bitwise equality.
    #[arg(long)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectations {
    /// Minimum Kähler class.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<KahlerClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pseudoconvex: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strongly_convex: Option<bool>,
    /// Outcome of the weakly Kähler PDE check (U(n)-invariant members).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weakly_kahler: Option<bool>,
}

impl Expectations {
    fn is_empty(&self) -> bool {
        *self == Expectations::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricEntry {
    pub id: String,
    pub spec: FamilySpec,
    /// Pole for geodesic fans and distances, as `[re, im]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole: Option<Vec<[f64; 2]>>,
    #[serde(default = "default_length")]
    pub length: f64,
    #[serde(default = "default_intervals")]
    pub intervals: usize,
    #[serde(default, skip_serializing_if = "Expectations::is_empty")]
    pub expect: Expectations,
}

fn default_length() -> f64 {
    1.0
}

fn default_intervals() -> usize {
    16
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapEntry {
    pub id: String,
    pub map: MapSpec,
    pub domain: FamilySpec,
    pub target: FamilySpec,
    #[serde(default = "default_true")]
    pub expect_pass: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub plan: SamplePlan,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub metrics: Vec<MetricEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub maps: Vec<MapEntry>,
}

impl RunConfig {
    pub fn parse(text: &str, json: bool) -> Result<RunConfig> {
        let cfg: RunConfig = if json {
            serde_json::from_str(text).map_err(|e| FinslerError::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| FinslerError::Config(e.to_string()))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        let json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        RunConfig::parse(&text, json)
    }

    fn validate(&self) -> Result<()> {
        if self.plan.points == 0 || self.plan.directions == 0 {
            return Err(FinslerError::Config("plan needs at least one point and one direction".into()));
        }
        if !(0.0 < self.plan.radius_min && self.plan.radius_min <= self.plan.radius_max) {
            return Err(FinslerError::Config("plan radii must satisfy 0 < radius_min <= radius_max".into()));
        }
        let mut seen = BTreeSet::new();
        let ids = self.metrics.iter().map(|m| &m.id).chain(self.maps.iter().map(|m| &m.id));
        for id in ids {
            if id.is_empty() || !id.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_') {
                return Err(FinslerError::Config(format!("invalid id {id:?}")));
            }
            if !seen.insert(id.clone()) {
                return Err(FinslerError::Config(format!("duplicate id {id:?}")));
            }
        }
        for m in &self.metrics {
            instantiate(&m.spec)?;
            if !(m.length > 0.0) || m.intervals == 0 {
                return Err(FinslerError::Config(format!("{}: geodesic length and intervals must be positive", m.id)));
            }
        }
        Ok(())
    }

    /// The part of the configuration a single entry depends on.
    fn restricted(&self, id: &str) -> RunConfig {
        RunConfig {
            plan: self.plan.clone(),
            tolerance: self.tolerance,
            metrics: self.metrics.iter().filter(|m| m.id == id).cloned().collect(),
            maps: self.maps.iter().filter(|m| m.id == id).cloned().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub version: String,
    pub unix_time: u64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub command: Command,
    pub id: String,
    pub config: RunConfig,
    pub passed: bool,
    pub payload: Value,
    pub metadata: Metadata,
}

/// A report plus the CSV tables written next to it.
#[derive(Debug, Clone)]
pub struct Output {
    pub report: Report,
    pub tables: Vec<(String, String)>,
}

fn metadata() -> Metadata {
    Metadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        unix_time: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map_or(0, |d| d.as_secs()),
        threads: threads(),
    }
}

fn threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| FinslerError::Io(e.to_string()))
}

fn csv_table<I, R>(header: &[&str], rows: I) -> Result<String>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| FinslerError::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| FinslerError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| FinslerError::Io(e.to_string()))
}

fn fmt_c(c: &[Complex64]) -> String {
    c.iter().map(|a| format!("{}{:+}i", a.re, a.im)).collect::<Vec<_>>().join(";")
}

fn pole_of(entry: &MetricEntry, def: &MetricDef) -> Result<Vec<Complex64>> {
    match &entry.pole {
        None => Ok(vec![Complex64::new(0.0, 0.0); def.dim()]),
        Some(p) if p.len() == def.dim() => {
            let z: Vec<Complex64> = p.iter().map(|a| Complex64::new(a[0], a[1])).collect();
            if def.metric.in_domain(&z) {
                Ok(z)
            } else {
                Err(FinslerError::Config(format!("{}: pole outside the domain", entry.id)))
            }
        }
        Some(p) => Err(FinslerError::Config(format!(
            "{}: pole has {} coordinates, metric dimension is {}",
            entry.id,
            p.len(),
            def.dim()
        ))),
    }
}

/// Plan points shifted to the pole.
fn points_about(def: &MetricDef, pole: &[Complex64], plan: &SamplePlan) -> Vec<Vec<Complex64>> {
    plan.points(def.dim(), def.domain())
        .into_iter()
        .map(|z| z.iter().zip(pole).map(|(a, b)| a + b).collect())
        .filter(|z: &Vec<Complex64>| def.metric.in_domain(z))
        .collect()
}

fn run_check(entry: &MetricEntry, cfg: &RunConfig) -> Result<Output> {
    let def = instantiate(&entry.spec)?;
    let check = check_metric(&def, &cfg.plan);
    let kahler = classify(&def, &cfg.plan);
    let pde = match &entry.spec {
        FamilySpec::UnInvariant { profile, .. } => Some(weakly_kahler_pde_residual(profile, &PdeGrid::for_profile(profile))),
        _ => None,
    };
    let mut failures = Vec::new();
    let e = &entry.expect;
    if let Some(want) = e.pseudoconvex {
        if want != check.pseudoconvex {
            failures.push(format!("pseudoconvex: expected {want}, got {}", check.pseudoconvex));
        }
    }
    if let Some(want) = e.strongly_convex {
        if want != check.strongly_convex {
            failures.push(format!("strongly_convex: expected {want}, got {}", check.strongly_convex));
        }
    }
    if let Some(want) = e.class {
        match &kahler {
            Ok(k) if k.class >= want => {}
            Ok(k) => failures.push(format!("class: expected at least {want:?}, got {:?}", k.class)),
            Err(err) => failures.push(format!("class: classification failed: {err}")),
        }
    }
    if let Some(want) = e.weakly_kahler {
        match &pde {
            Some(r) if r.passed == want => {}
            Some(r) => failures.push(format!("weakly_kahler: expected {want}, PDE residual {:e}", r.worst)),
            None => failures.push("weakly_kahler: only defined for un_invariant metrics".into()),
        }
    }
    let payload = json!({
        "metric": check,
        "kahler": match &kahler { Ok(k) => to_value(k)?, Err(e) => json!({ "error": e.to_string() }) },
        "weakly_kahler_pde": pde,
        "expectation_failures": failures,
    });
    let mut records: Vec<&SampleRecord> = Vec::new();
    for r in [&check.levi, &check.convexity, &check.positivity, &check.homogeneity, &check.euler, &check.realification] {
        records.extend(r.samples.iter());
    }
    let names: Vec<&str> = [&check.levi, &check.convexity, &check.positivity, &check.homogeneity, &check.euler, &check.realification]
        .iter()
        .flat_map(|r| std::iter::repeat_n(r.name.as_str(), r.samples.len()))
        .collect();
    let table = csv_table(
        &["check", "point", "lhs", "rhs", "margin", "passed"],
        records.iter().zip(&names).map(|(s, n)| {
            vec![
                n.to_string(),
                s.point.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
                s.lhs.to_string(),
                s.rhs.to_string(),
                s.margin.to_string(),
                s.passed.to_string(),
            ]
        }),
    )?;
    Ok(Output {
        report: report(Command::Check, &entry.id, cfg, failures.is_empty(), payload),
        tables: vec![("samples.csv".into(), table)],
    })
}

fn run_curvature(entry: &MetricEntry, cfg: &RunConfig) -> Result<Output> {
    let def = instantiate(&entry.spec)?;
    let sweep: Vec<CurvatureSample> = curvature_sweep(&def, &cfg.plan);
    let ok: Vec<f64> = sweep.iter().filter(|s| s.error.is_none()).map(|s| s.k).collect();
    let errors = sweep.len() - ok.len();
    let payload = json!({
        "samples": sweep.len(),
        "errors": errors,
        "k_min": ok.iter().copied().fold(f64::INFINITY, f64::min),
        "k_max": ok.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        "known": def.meta.known_holomorphic_curvature,
    });
    let table = csv_table(
        &["z", "v", "k", "error"],
        sweep.iter().map(|s| vec![fmt_c(&s.z), fmt_c(&s.v), s.k.to_string(), s.error.clone().unwrap_or_default()]),
    )?;
    Ok(Output {
        report: report(Command::Curvature, &entry.id, cfg, errors == 0, payload),
        tables: vec![("curvature.csv".into(), table)],
    })
}

fn run_geodesic(entry: &MetricEntry, cfg: &RunConfig) -> Result<Output> {
    let def = instantiate(&entry.spec)?;
    let m = def.realified();
    let p = complex_to_real(&pole_of(entry, &def)?);
    let dirs = sphere_lattice(2 * def.dim(), cfg.plan.directions);
    let paths: Vec<Result<GeodesicPath>> = exec::map(&dirs, |u| {
        let s = real_metric_value(&m, &p, u)?.sqrt();
        let t: Vec<f64> = u.iter().map(|a| a / s).collect();
        integrate_geodesic(&m, &p, &t, entry.length, entry.intervals)
    });
    let mut summary = Vec::new();
    let mut tables = Vec::new();
    let mut passed = true;
    for (k, path) in paths.iter().enumerate() {
        match path {
            Ok(path) => {
                passed &= path.energy_drift < 1e-8 * entry.length.max(1.0);
                summary.push(json!({
                    "direction": dirs[k],
                    "arc_length": path.arc_length,
                    "end": path.end().x,
                    "energy_drift": path.energy_drift,
                    "steps": path.steps,
                    "rejected": path.rejected,
                    "truncated": path.truncated,
                }));
                let mut buf = Vec::new();
                path.write_csv(&mut buf)?;
                tables.push((format!("path_{k:03}.csv"), String::from_utf8(buf).map_err(|e| FinslerError::Io(e.to_string()))?));
            }
            Err(e) => {
                passed = false;
                summary.push(json!({ "direction": dirs[k], "error": e.to_string() }));
            }
        }
    }
    Ok(Output {
        report: report(Command::Geodesic, &entry.id, cfg, passed, json!({ "pole": p, "paths": summary })),
        tables,
    })
}

fn run_distance(entry: &MetricEntry, cfg: &RunConfig) -> Result<Output> {
    let def = instantiate(&entry.spec)?;
    let m = def.realified();
    let pole = pole_of(entry, &def)?;
    let p = complex_to_real(&pole);
    let pts = points_about(&def, &pole, &cfg.plan);
    let rows = exec::map(&pts, |z| distance(&m, &p, &complex_to_real(z)));
    let tol = cfg.tolerance.unwrap_or(1e-6);
    let (real, complex) = gradient_report(&def, &pole, &cfg.plan, tol);
    let passed = rows.iter().all(Result::is_ok) && real.passed && complex.passed;
    let table = csv_table(
        &["z", "rho", "residual", "restarts", "error"],
        pts.iter().zip(&rows).map(|(z, r)| match r {
            Ok(d) => vec![fmt_c(z), d.rho.to_string(), d.residual.to_string(), d.restarts.to_string(), String::new()],
            Err(e) => vec![fmt_c(z), "NaN".into(), "NaN".into(), String::new(), e.to_string()],
        }),
    )?;
    let payload = json!({
        "pole": pole,
        "distances": rows.iter().map(|r| r.as_ref().map(|d| d.rho).ok()).collect::<Vec<_>>(),
        "radial_gradient": summary(&real),
        "complex_gradient": summary(&complex),
    });
    Ok(Output {
        report: report(Command::Distance, &entry.id, cfg, passed, payload),
        tables: vec![("distances.csv".into(), table)],
    })
}

fn summary(r: &VerificationReport) -> Value {
    json!({
        "name": r.name,
        "tolerance": r.tolerance,
        "worst": r.worst,
        "passed": r.passed,
        "failures": r.samples.iter().filter(|s| !s.passed).count(),
    })
}

fn run_bounds(entry: &MetricEntry, cfg: &RunConfig) -> Result<Output> {
    let def = instantiate(&entry.spec)?;
    let m = def.realified();
    let pole = pole_of(entry, &def)?;
    let p = complex_to_real(&pole);
    let tol = cfg.tolerance.unwrap_or(BOUND_TOL);
    let radial = radial_flag_bounds(&m, &p, &cfg.plan)?;
    let k1 = curvature_bounds(&def, Role::Domain, &cfg.plan)?;
    let k2 = curvature_bounds(&def, Role::Target, &cfg.plan).ok();
    let levi: Vec<Result<LeviSample>> = levi_sweep(&def, &pole, &cfg.plan, radial.k);
    let pts = points_about(&def, &pole, &cfg.plan);
    let dirs = cfg.plan.random_directions(def.dim(), pts.len());
    let items: Vec<(Vec<f64>, Vec<f64>)> = pts.iter().zip(&dirs).map(|(z, v)| (complex_to_real(z), complex_to_real(v))).collect();
    let hess = exec::map(&items, |(x, u)| hessian_rho_bound(&m, &p, x, u, radial.k, tol).map(|(_, r)| r));
    let levi_records: Vec<SampleRecord> = levi
        .iter()
        .zip(&pts)
        .map(|(r, z)| match r {
            Ok(s) => SampleRecord::upper(complex_to_real(&s.z), s.levi_value, s.bound, tol),
            Err(e) => SampleRecord::failed(complex_to_real(z), e),
        })
        .collect();
    let hess_records: Vec<SampleRecord> = hess
        .into_iter()
        .zip(&items)
        .map(|(r, (x, _))| r.unwrap_or_else(|e| SampleRecord::failed(x.clone(), e)))
        .collect();
    let levi_report = VerificationReport::from_samples("levi_rho2_bound", tol, levi_records);
    let hess_report = VerificationReport::from_samples("hessian_rho_bound", tol, hess_records);
    let passed = levi_report.passed && hess_report.passed;
    let payload = json!({
        "radial_flag": radial,
        "k1": k1,
        "k2": k2,
        "levi": summary(&levi_report),
        "levi_min_margin": levi_report.min_margin(),
        "hessian": summary(&hess_report),
        "hessian_min_margin": hess_report.min_margin(),
    });
    let ok: Vec<LeviSample> = levi.into_iter().filter_map(Result::ok).collect();
    let mut buf = Vec::new();
    write_levi_csv(&ok, &mut buf)?;
    Ok(Output {
        report: report(Command::Bounds, &entry.id, cfg, passed, payload),
        tables: vec![("levi.csv".into(), String::from_utf8(buf).map_err(|e| FinslerError::Io(e.to_string()))?)],
    })
}

fn run_schwarz(entry: &MapEntry, cfg: &RunConfig) -> Result<Output> {
    let tol = cfg.tolerance.unwrap_or(SCHWARZ_TOL);
    let cert = certify_schwarz(&entry.map, &entry.domain, &entry.target, &cfg.plan, tol)?;
    let table = csv_table(
        &["point", "ratio", "bound", "passed", "error"],
        cert.samples.iter().map(|s| {
            vec![
                s.point.iter().map(f64::to_string).collect::<Vec<_>>().join(";"),
                s.lhs.to_string(),
                s.rhs.to_string(),
                s.passed.to_string(),
                s.error.clone().unwrap_or_default(),
            ]
        }),
    )?;
    let passed = cert.passed == entry.expect_pass;
    Ok(Output {
        report: report(Command::Schwarz, &entry.id, cfg, passed, to_value(&cert)?),
        tables: vec![("ratios.csv".into(), table)],
    })
}

fn report(command: Command, id: &str, cfg: &RunConfig, passed: bool, payload: Value) -> Report {
    Report {
        schema: SCHEMA,
        command,
        id: id.to_string(),
        config: cfg.restricted(id),
        passed,
        payload,
        metadata: metadata(),
    }
}

/// Runs `command` on every relevant entry of `cfg`, in configuration order.
pub fn run_command(command: Command, cfg: &RunConfig) -> Result<Vec<Output>> {
    match command {
        Command::Replay => Err(FinslerError::Config("replay takes a report file".into())),
        Command::Schwarz => cfg.maps.iter().map(|e| run_schwarz(e, cfg)).collect(),
        _ => cfg
            .metrics
            .iter()
            .map(|e| match command {
                Command::Check => run_check(e, cfg),
                Command::Curvature => run_curvature(e, cfg),
                Command::Geodesic => run_geodesic(e, cfg),
                Command::Distance => run_distance(e, cfg),
                Command::Bounds => run_bounds(e, cfg),
                _ => unreachable!(),
            })
            .collect(),
    }
}

pub fn write_output(out: &Path, o: &Output) -> Result<PathBuf> {
    let dir = out.join(o.report.command.name()).join(&o.report.id);
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("report.json");
    let text = serde_json::to_string_pretty(&o.report).map_err(|e| FinslerError::Io(e.to_string()))?;
    std::fs::write(&path, text + "\n")?;
    for (name, body) in &o.tables {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(path)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayOutcome {
    pub passed: bool,
    /// JSON pointers of the first mismatching payload entries.
    pub mismatches: Vec<String>,
}

/// Recomputes a stored report and compares payloads, bitwise or within a
/// relative `tolerance`.
pub fn replay(stored: &Report, tolerance: Option<f64>) -> Result<ReplayOutcome> {
    if stored.schema != SCHEMA {
        return Err(FinslerError::Schema(format!("report schema {} (expected {SCHEMA})", stored.schema)));
    }
    stored.config.validate()?;
    let fresh = run_command(stored.command, &stored.config)?;
    let fresh = fresh
        .into_iter()
        .find(|o| o.report.id == stored.id)
        .ok_or_else(|| FinslerError::Schema(format!("entry {:?} missing from the embedded config", stored.id)))?;
    let mut mismatches = Vec::new();
    compare(&stored.payload, &fresh.report.payload, tolerance, String::new(), &mut mismatches);
    if stored.passed != fresh.report.passed {
        mismatches.push("/passed".into());
    }
    Ok(ReplayOutcome {
        passed: mismatches.is_empty(),
        mismatches,
    })
}

pub fn load_report(path: &Path) -> Result<Report> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text).map_err(|e| FinslerError::Schema(e.to_string()))?;
    match v.get("schema").and_then(Value::as_u64) {
        Some(s) if s == SCHEMA as u64 => {}
        other => return Err(FinslerError::Schema(format!("unsupported report schema {other:?}"))),
    }
    serde_json::from_value(v).map_err(|e| FinslerError::Schema(e.to_string()))
}

fn compare(a: &Value, b: &Value, tol: Option<f64>, at: String, out: &mut Vec<String>) {
    if out.len() >= 20 {
        return;
    }
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            let ok = match tol {
                None => x.to_bits() == y.to_bits(),
                Some(t) => (x - y).abs() <= t * x.abs().max(y.abs()).max(1.0),
            };
            if !ok {
                out.push(at);
            }
        }
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            for (k, (p, q)) in x.iter().zip(y).enumerate() {
                compare(p, q, tol, format!("{at}/{k}"), out);
            }
        }
        (Value::Object(x), Value::Object(y)) if x.len() == y.len() => {
            for (k, p) in x {
                match y.get(k) {
                    Some(q) => compare(p, q, tol, format!("{at}/{k}"), out),
                    None => out.push(format!("{at}/{k}")),
                }
            }
        }
        _ if a == b => {}
        _ => out.push(at),
    }
}

/// Process entry point; returns the exit code.
pub fn main_with(cli: Cli) -> i32 {
    exec::init_threads_from_env();
    if cli.command == Command::Replay {
        let stored = match load_report(&cli.config) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return 2;
            }
        };
        return match replay(&stored, cli.tolerance) {
            Ok(o) if o.passed => {
                println!("replay {}/{}: pass", stored.command.name(), stored.id);
                0
            }
            Ok(o) => {
                println!("replay {}/{}: FAIL at {}", stored.command.name(), stored.id, o.mismatches.join(", "));
                1
            }
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        };
    }
    let mut cfg = match RunConfig::load(&cli.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if cli.tolerance.is_some() {
        cfg.tolerance = cli.tolerance;
    }
    match run_command(cli.command, &cfg) {
        Ok(outputs) => {
            let mut code = 0;
            for o in &outputs {
                match write_output(&cli.out, o) {
                    Ok(path) => {
                        let status = if o.report.passed { "pass" } else { "FAIL" };
                        println!("{} {}: {status} ({})", cli.command.name(), o.report.id, path.display());
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        code = 1;
                    }
                }
                if !o.report.passed {
                    code = 1;
                }
            }
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
