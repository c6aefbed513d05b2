//! Verification campaigns: a TOML configuration selects suites from the
//! catalog, each suite expands into seeded checks, and the checks are
//! reported as JSON or CSV records.

pub mod catalog;
pub mod corpus;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::Error;
use crate::ks::TruncationPolicy;

pub use catalog::{catalog, find_suite, SuiteInfo};

/// Configuration of the full default campaign.
pub const DEFAULT_CONFIG: &str = include_str!("../../config/default.toml");

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// How `not_converged` records affect the exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NotConvergedPolicy {
    Warn,
    #[default]
    Fail,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    pub points: usize,
}

/// One `[[suite]]` table. Unset fields take the catalog defaults; setting a
/// field the suite does not use is an error.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub id: String,
    pub tolerance: Option<f64>,
    pub samples: Option<usize>,
    pub dims: Option<Vec<usize>>,
    pub max_index: Option<u32>,
    pub degree_cap: Option<u32>,
    pub q: Option<Vec<f64>>,
    pub truncation: Option<TruncationPolicy>,
    pub quadrature: Option<QuadratureConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub not_converged: NotConvergedPolicy,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, rename = "suite")]
    pub suites: Vec<SuiteConfig>,
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            not_converged: NotConvergedPolicy::Fail,
            output: OutputConfig::default(),
            suites: Vec::new(),
        }
    }
}

impl CampaignConfig {
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let cfg: Self = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn bundled() -> Self {
        Self::parse(DEFAULT_CONFIG).expect("bundled configuration is valid")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let mut seen = std::collections::BTreeSet::new();
        for s in &self.suites {
            if !seen.insert(s.id.as_str()) {
                return Err(HarnessError::Config(format!("suite {} listed twice", s.id)));
            }
            resolve(s)?;
        }
        Ok(())
    }
}

/// Suite settings with defaults filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub tolerance: f64,
    pub samples: usize,
    pub dims: Vec<usize>,
    pub max_index: u32,
    pub degree_cap: u32,
    pub q: Vec<f64>,
    pub truncation: TruncationPolicy,
    pub points: usize,
}

fn bad(id: &str, msg: impl std::fmt::Display) -> HarnessError {
    HarnessError::Config(format!("suite {id}: {msg}"))
}

fn pick<T: Clone>(
    id: &str,
    field: &str,
    set: &Option<T>,
    default: &Option<T>,
) -> Result<Option<T>, HarnessError> {
    match (set, default) {
        (Some(_), None) => Err(bad(id, format!("does not take `{field}`"))),
        (Some(v), Some(_)) => Ok(Some(v.clone())),
        (None, d) => Ok(d.clone()),
    }
}

/// Checks a suite table against the catalog entry and fills defaults.
pub fn resolve(s: &SuiteConfig) -> Result<(SuiteInfo, Settings), HarnessError> {
    let info = find_suite(&s.id)
        .ok_or_else(|| HarnessError::Config(format!("unknown suite id `{}`", s.id)))?;
    let d = &info.defaults;
    let id = s.id.as_str();
    let tolerance = s.tolerance.unwrap_or(info.tolerance);
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(bad(
            id,
            format!("tolerance must be positive, got {tolerance}"),
        ));
    }
    let samples = pick(id, "samples", &s.samples, &d.samples)?;
    let dims = pick(id, "dims", &s.dims, &d.dims)?;
    let max_index = pick(id, "max_index", &s.max_index, &d.max_index)?;
    let degree_cap = pick(id, "degree_cap", &s.degree_cap, &d.degree_cap)?;
    let q = pick(id, "q", &s.q, &d.q)?;
    let truncation = pick(id, "truncation", &s.truncation, &d.truncation)?;
    let points = pick(id, "quadrature", &s.quadrature.map(|p| p.points), &d.points)?;

    if samples == Some(0) {
        return Err(bad(id, "samples must be at least 1"));
    }
    if let Some(dims) = &dims {
        let (lo, hi) = info.dim_range;
        if dims.is_empty() || dims.iter().any(|&n| n < lo || n > hi) {
            return Err(bad(
                id,
                format!("dims must be a non-empty list within {lo}..={hi}"),
            ));
        }
    }
    if let (Some(m), Some(limit)) = (max_index, info.max_index_limit) {
        if m > limit {
            return Err(bad(id, format!("max_index {m} exceeds {limit}")));
        }
    }
    if let Some(qs) = &q {
        if qs.is_empty() || qs.iter().any(|&v| !(v > 0.0 && v < 1.0)) {
            return Err(bad(id, "q values must lie in (0, 1)"));
        }
    }
    if let Some(t) = &truncation {
        t.validate().map_err(|e| bad(id, e))?;
    }
    if let Some(p) = points {
        if p < 2 {
            return Err(bad(id, "quadrature points must be at least 2"));
        }
    }
    if let (Some(cap), Some(limit)) = (degree_cap, info.degree_cap_limit) {
        if cap > limit {
            return Err(bad(id, format!("degree_cap {cap} exceeds {limit}")));
        }
    }
    let settings = Settings {
        tolerance,
        samples: samples.unwrap_or(0),
        dims: dims.unwrap_or_default(),
        max_index: max_index.unwrap_or(0),
        degree_cap: degree_cap.unwrap_or(0),
        q: q.unwrap_or_default(),
        truncation: truncation.unwrap_or_default(),
        points: points.unwrap_or(0),
    };
    Ok((info, settings))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotConverged,
    DomainSkip,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::NotConverged => "not_converged",
            Status::DomainSkip => "domain_skip",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub index: usize,
    pub params: serde_json::Value,
    /// [re, im]
    pub lhs: Option<[f64; 2]>,
    pub rhs: Option<[f64; 2]>,
    pub abs_err: Option<f64>,
    /// abs_err / (1 + |lhs|)
    pub rel_err: Option<f64>,
    pub tolerance: f64,
    pub degree_reached: Option<u32>,
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
    pub status: Status,
    pub note: Option<String>,
}

/// Successful evaluation of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Eval {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    pub degree_reached: Option<u32>,
    pub points: Option<usize>,
    pub note: Option<String>,
}

impl Eval {
    pub fn new(lhs: Complex64, rhs: Complex64) -> Self {
        Self {
            lhs,
            rhs,
            abs_err: (lhs - rhs).norm(),
            degree_reached: None,
            points: None,
            note: None,
        }
    }

    pub fn degree(mut self, d: u32) -> Self {
        self.degree_reached = Some(d);
        self
    }

    pub fn points(mut self, p: usize) -> Self {
        self.points = Some(p);
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.note = Some(n.into());
        self
    }
}

impl From<crate::integral::Comparison> for Eval {
    fn from(c: crate::integral::Comparison) -> Self {
        Self {
            lhs: c.lhs,
            rhs: c.rhs,
            abs_err: c.abs_err,
            degree_reached: None,
            points: if c.points > 0 { Some(c.points) } else { None },
            note: None,
        }
    }
}

type CaseFn = Box<dyn Fn() -> crate::Result<Eval> + Send + Sync>;

/// A parameter point and the closure that evaluates it.
pub struct Case {
    pub params: serde_json::Value,
    pub eval: CaseFn,
}

impl Case {
    pub fn new(
        params: serde_json::Value,
        eval: impl Fn() -> crate::Result<Eval> + Send + Sync + 'static,
    ) -> Self {
        Self {
            params,
            eval: Box::new(eval),
        }
    }
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn evaluate(suite: &str, index: usize, case: &Case, tolerance: f64, timing: bool) -> CheckRecord {
    let start = Instant::now();
    let outcome = (case.eval)();
    let wall_time_ms = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let mut rec = CheckRecord {
        suite: suite.to_string(),
        index,
        params: case.params.clone(),
        lhs: None,
        rhs: None,
        abs_err: None,
        rel_err: None,
        tolerance,
        degree_reached: None,
        points: None,
        wall_time_ms,
        status: Status::Fail,
        note: None,
    };
    match outcome {
        Ok(e) => {
            let rel = e.abs_err / (1.0 + e.lhs.norm());
            rec.lhs = Some(pair(e.lhs));
            rec.rhs = Some(pair(e.rhs));
            rec.abs_err = Some(e.abs_err);
            rec.rel_err = Some(rel);
            rec.degree_reached = e.degree_reached;
            rec.points = e.points;
            rec.note = e.note;
            rec.status = if rel <= tolerance {
                Status::Pass
            } else {
                Status::Fail
            };
        }
        Err(Error::DomainViolation(msg)) => {
            rec.status = Status::DomainSkip;
            rec.note = Some(msg);
        }
        Err(Error::TruncationNotConverged(partial)) => {
            rec.status = Status::NotConverged;
            rec.rhs = Some(pair(partial.value));
            rec.degree_reached = Some(partial.degree_reached);
            rec.note = Some(format!(
                "series not converged: last shell {:.3e}",
                partial.last_shell_norm
            ));
        }
        Err(e @ Error::QuadratureUnderResolved { .. }) => {
            rec.status = Status::NotConverged;
            rec.note = Some(e.to_string());
        }
        Err(e) => {
            rec.status = Status::Fail;
            rec.note = Some(e.to_string());
        }
    }
    rec
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub total: usize,
    pub pass: usize,
    pub fail: usize,
    pub not_converged: usize,
    pub domain_skip: usize,
}

impl Counts {
    fn add(&mut self, s: Status) {
        self.total += 1;
        match s {
            Status::Pass => self.pass += 1,
            Status::Fail => self.fail += 1,
            Status::NotConverged => self.not_converged += 1,
            Status::DomainSkip => self.domain_skip += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub id: String,
    pub tag: String,
    pub tolerance: f64,
    pub counts: Counts,
    /// Largest rel_err among evaluated records.
    pub worst_rel_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub counts: Counts,
    pub suites: Vec<SuiteSummary>,
    pub exit_code: i32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub format_version: u32,
    pub seed: u64,
    pub generator: String,
    pub not_converged: NotConvergedPolicy,
    /// Conventions under which the checked identities hold.
    pub conventions: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub metadata: Metadata,
    pub summary: Summary,
    pub records: Vec<CheckRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

/// Options that do not live in the configuration file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; 0 means all available cores.
    pub jobs: usize,
    pub seed: Option<u64>,
    /// Glob over suite ids.
    pub filter: Option<String>,
    /// Record wall-clock times.
    pub timing: bool,
}

pub fn conventions() -> BTreeMap<String, String> {
    let mut m = BTreeMap::new();
    m.insert(
        "q_hermite_definition".into(),
        "H_{m,n}(z1,z2|q) carries (-1)^k q^{binom(k,2)} in its k-th term".into(),
    );
    m.insert(
        "q_hermite_moments".into(),
        "int_{-pi}^{pi} e^{2ij theta} w(theta) dtheta/(2 pi) = (-1)^j (q^{binom(j,2)} + q^{binom(-j,2)})/(q;q)_inf for every j including 0; over [0, pi] with dtheta/(2 pi) the integral is half of that".into(),
    );
    m.insert(
        "askey_wilson".into(),
        "int_0^pi w(theta)/prod_j (t_j e^{i theta}, t_j e^{-i theta};q)_inf dtheta = 2 pi (t1t2t3t4;q)_inf/((q;q)_inf prod_{j<k} (t_j t_k;q)_inf)".into(),
    );
    m.insert(
        "two_function_product".into(),
        "(rs,rs;q)_inf/(z1z2rs;q)_inf with no (q;q)_inf factor; series weight (-1)^j (q^{binom(j,2)} + q^{binom(-j,2)})/2, j = (m1+n2-n1-m2)/2; equals (q;q)_inf/2 times the full-period moment integral of the two generating functions".into(),
    );
    m.insert(
        "four_function_product".into(),
        "Askey-Wilson parameters (r1z1, s1z2, r2z3, s2z4); closed form (r1s1,r1s1,r2s2,r2s2,t1t2t3t4;q)_inf/prod_{a<b}(t_a t_b;q)_inf; series weight (-1)^M (q^{binom(M,2)} + q^{binom(-M,2)})/2".into(),
    );
    m.insert(
        "laguerre_form_phase".into(),
        "with w_j = rho_j e^{i theta_j} the monomial is (rho_j e^{-i theta_j})^{r-c}".into(),
    );
    m.insert(
        "complex_identity_form".into(),
        "compares exp(W* H (I+H)^{-1} W) with det(I+H) times the series".into(),
    );
    m
}

/// Runs every configured suite (after the filter) and builds the report.
pub fn run_campaign(config: &CampaignConfig, opts: &RunOptions) -> Result<Report, HarnessError> {
    config.validate()?;
    let seed = opts.seed.unwrap_or(config.seed);
    let pattern = match &opts.filter {
        Some(f) => {
            Some(glob::Pattern::new(f).map_err(|e| HarnessError::Config(format!("filter: {e}")))?)
        }
        None => None,
    };
    let mut plan = Vec::new();
    for s in &config.suites {
        if pattern.as_ref().is_some_and(|p| !p.matches(&s.id)) {
            continue;
        }
        plan.push(resolve(s)?);
    }
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let per_suite: Vec<Vec<CheckRecord>> = pool.install(|| {
        plan.par_iter()
            .map(|(info, settings)| {
                let cases = (info.build)(settings, seed);
                cases
                    .par_iter()
                    .enumerate()
                    .map(|(i, c)| evaluate(info.id, i, c, settings.tolerance, opts.timing))
                    .collect()
            })
            .collect()
    });

    let mut counts = Counts::default();
    let mut suites = Vec::new();
    for ((info, settings), recs) in plan.iter().zip(&per_suite) {
        let mut c = Counts::default();
        let mut worst: Option<f64> = None;
        for r in recs {
            c.add(r.status);
            counts.add(r.status);
            if let Some(e) = r.rel_err {
                worst = Some(match worst {
                    Some(w) if !(e > w) => w,
                    _ => e,
                });
            }
        }
        suites.push(SuiteSummary {
            id: info.id.to_string(),
            tag: info.tag.to_string(),
            tolerance: settings.tolerance,
            counts: c,
            worst_rel_err: worst,
        });
    }
    let failing = counts.fail > 0
        || (config.not_converged == NotConvergedPolicy::Fail && counts.not_converged > 0);
    let elapsed_ms = opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    Ok(Report {
        metadata: Metadata {
            format_version: 1,
            seed,
            generator: "chacha8; per-suite key splitmix64(seed ^ fnv1a64(corpus id)); unit = (u64 >> 11) * 2^-53".into(),
            not_converged: config.not_converged,
            conventions: conventions(),
        },
        summary: Summary {
            counts,
            suites,
            exit_code: i32::from(failing),
        },
        records: per_suite.into_iter().flatten().collect(),
        elapsed_ms,
    })
}

fn fmt_pair(p: &Option<[f64; 2]>) -> (String, String) {
    match p {
        Some([a, b]) => (a.to_string(), b.to_string()),
        None => (String::new(), String::new()),
    }
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| HarnessError::Io(e.to_string());
        w.write_record([
            "suite",
            "index",
            "params",
            "lhs_re",
            "lhs_im",
            "rhs_re",
            "rhs_im",
            "abs_err",
            "rel_err",
            "tolerance",
            "degree_reached",
            "points",
            "wall_time_ms",
            "status",
            "note",
        ])
        .map_err(io)?;
        for r in &self.records {
            let (lr, li) = fmt_pair(&r.lhs);
            let (rr, ri) = fmt_pair(&r.rhs);
            w.write_record([
                r.suite.clone(),
                r.index.to_string(),
                r.params.to_string(),
                lr,
                li,
                rr,
                ri,
                opt(&r.abs_err),
                opt(&r.rel_err),
                r.tolerance.to_string(),
                opt(&r.degree_reached),
                opt(&r.points),
                opt(&r.wall_time_ms),
                r.status.as_str().to_string(),
                r.note.clone().unwrap_or_default(),
            ])
            .map_err(io)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| HarnessError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| HarnessError::Io(e.to_string()))
    }

    pub fn render(&self, format: OutputFormat) -> Result<String, HarnessError> {
        match format {
            OutputFormat::Json => Ok(self.to_json()),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// One line per check.
    pub fn lines(&self) -> Vec<String> {
        self.records
            .iter()
            .map(|r| {
                let err = r
                    .rel_err
                    .map(|e| format!("rel_err={e:.3e}"))
                    .unwrap_or_else(|| "rel_err=-".into());
                let note = r
                    .note
                    .as_deref()
                    .map(|n| format!(" ({n})"))
                    .unwrap_or_default();
                format!(
                    "{:<13} {}[{}] {} tol={:.0e}{}",
                    r.status.as_str(),
                    r.suite,
                    r.index,
                    err,
                    r.tolerance,
                    note
                )
            })
            .collect()
    }

    pub fn summary_line(&self) -> String {
        let c = &self.summary.counts;
        format!(
            "{} checks: {} pass, {} fail, {} not_converged, {} domain_skip",
            c.total, c.pass, c.fail, c.not_converged, c.domain_skip
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_campaign_passes() {
        let cfg = CampaignConfig::parse("seed = 1\n").unwrap();
        let r = run_campaign(
            &cfg,
            &RunOptions {
                jobs: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.summary.counts.total, 0);
        assert_eq!(r.summary.exit_code, 0);
    }

    #[test]
    fn config_errors() {
        let zero = "[[suite]]\nid = \"mixed.origin\"\ntolerance = 0.0\n";
        assert!(matches!(
            CampaignConfig::parse(zero),
            Err(HarnessError::Config(_))
        ));
        let unknown = "[[suite]]\nid = \"no.such.suite\"\n";
        assert!(CampaignConfig::parse(unknown).is_err());
        let knob = "[[suite]]\nid = \"mixed.origin\"\nq = [0.5]\n";
        assert!(CampaignConfig::parse(knob).is_err());
        let field = "bogus = 1\n";
        assert!(CampaignConfig::parse(field).is_err());
        let dup = "[[suite]]\nid = \"mixed.origin\"\n[[suite]]\nid = \"mixed.origin\"\n";
        assert!(CampaignConfig::parse(dup).is_err());
        let dims = "[[suite]]\nid = \"ks.real.identity\"\ndims = [7]\n";
        assert!(CampaignConfig::parse(dims).is_err());
    }

    #[test]
    fn bundled_config_parses() {
        let cfg = CampaignConfig::bundled();
        assert!(cfg.suites.len() >= 15);
    }

    #[test]
    fn records_report_relative_error() {
        let cfg =
            CampaignConfig::parse("[[suite]]\nid = \"mixed.origin\"\nmax_index = 3\n").unwrap();
        let r = run_campaign(
            &cfg,
            &RunOptions {
                jobs: 1,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.records.len(), 16);
        for rec in &r.records {
            assert_eq!(rec.status, Status::Pass);
            let lhs = rec.lhs.unwrap();
            let abs = rec.abs_err.unwrap();
            assert_eq!(rec.rel_err.unwrap(), abs / (1.0 + lhs[0].hypot(lhs[1])));
        }
        assert!(r.to_csv().unwrap().lines().count() == 17);
    }
}
