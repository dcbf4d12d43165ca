//! Experiment configuration: TOML file, `AIRCOMP_*` environment overrides
//! and command-line flags, in increasing precedence.

use aircomp::sim::Association;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};

pub const ENV_PREFIX: &str = "AIRCOMP_";

/// A scalar, an explicit list, or an inclusive `start:step:stop` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Sweep {
    Scalar(f64),
    List(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Sweep::Scalar(x) => vec![*x],
            Sweep::List(v) => v.clone(),
            Sweep::Range { start, stop, step } => {
                if !(*step > 0.0) || stop < start {
                    return Vec::new();
                }
                let n = ((stop - start) / step + 1e-9).floor() as usize;
                // rounded so that 2.0:0.1:3.2 prints as written
                (0..=n).map(|k| ((start + k as f64 * step) * 1e9).round() / 1e9).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

fn default_n() -> OneOrMany<usize> {
    OneOrMany::One(150)
}
fn default_radius() -> f64 {
    3000.0
}
fn default_alpha() -> Sweep {
    Sweep::Scalar(2.8)
}
fn default_grid() -> Sweep {
    Sweep::Range { start: -20.0, stop: 30.0, step: 5.0 }
}
fn default_seed() -> u64 {
    1
}
fn default_mode() -> OneOrMany<String> {
    OneOrMany::One("nearest4_comp".into())
}
fn default_restarts() -> u32 {
    8
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_outer() -> usize {
    4000
}
fn default_case() -> String {
    "general".into()
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_n")]
    pub n_abs: OneOrMany<usize>,
    #[serde(default = "default_radius")]
    pub radius_m: f64,
    #[serde(default = "default_alpha")]
    pub alpha: Sweep,
    #[serde(default = "default_grid")]
    pub gamma_db_grid: Sweep,
    /// Monte Carlo trials; defaults depend on the command.
    pub trials: Option<u64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: OneOrMany<String>,
    pub rate_threshold_nats: Option<f64>,
    #[serde(default = "default_restarts")]
    pub restarts: u32,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    /// Outer Monte Carlo samples of the analytic general-aUE metrics.
    #[serde(default = "default_outer")]
    pub outer_samples: usize,
    /// `general` or `worst`, for planning.
    #[serde(default = "default_case")]
    pub case: String,
    /// Forces the planning radius (meters) instead of solving for it.
    pub epsilon_override_m: Option<f64>,
    #[serde(default = "default_true")]
    pub plot: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("all fields have defaults")
    }
}

/// One problem with the configuration, tied to a source location when
/// there is one.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub origin: String,
    pub line: Option<usize>,
    pub key: Option<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.origin)?;
        if let Some(l) = self.line {
            write!(f, ":{l}")?;
        }
        if let Some(k) = &self.key {
            write!(f, ": {k}")?;
        }
        write!(f, ": {}", self.message)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub Vec<Diagnostic>);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.0.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct FlagOverrides {
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: Option<PathBuf>,
    pub epsilon_override_m: Option<f64>,
}

/// Where each key's value came from, for diagnostics.
#[derive(Debug, Clone, Default)]
struct Sources {
    file: Option<(String, String)>,
    env_keys: Vec<String>,
    flag_keys: Vec<&'static str>,
}

impl Sources {
    fn locate(&self, key: &str) -> (String, Option<usize>) {
        if self.flag_keys.contains(&key) {
            let flag = match key {
                "output_dir" => "out",
                "epsilon_override_m" => "epsilon-override",
                k => k,
            };
            return (format!("--{flag}"), None);
        }
        if self.env_keys.iter().any(|k| k == key) {
            return (format!("{ENV_PREFIX}{}", key.to_uppercase()), None);
        }
        match &self.file {
            Some((name, text)) => (name.clone(), line_of_key(text, key)),
            None => ("<defaults>".into(), None),
        }
    }
}

fn line_of_key(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let t = l.trim_start();
        t.strip_prefix(key).is_some_and(|rest| rest.trim_start().starts_with('='))
    }).map(|i| i + 1)
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Rewrites serde's untagged-enum messages into what the key accepts.
fn friendly(message: &str) -> String {
    if message.contains("untagged enum Sweep") {
        "expected a number, a list of numbers or { start, stop, step }".into()
    } else if message.contains("untagged enum OneOrMany") {
        "expected a single value or a list".into()
    } else {
        message.trim().to_string()
    }
}

fn parse_env_value(raw: &str) -> toml::Value {
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// What the command needs beyond the common checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Needs {
    Rate,
    Coverage,
    Plan,
    Compare,
    Nothing,
}

impl ExperimentConfig {
    /// Builds the configuration from `preset` (lowest precedence), the file
    /// at `path`, environment variables and flags, then validates it.
    pub fn load(
        preset: toml::Table,
        path: Option<&Path>,
        env: impl IntoIterator<Item = (String, String)>,
        flags: &FlagOverrides,
        needs: Needs,
    ) -> Result<Self, ConfigError> {
        let mut sources = Sources::default();
        let mut table = preset;
        if let Some(p) = path {
            let name = p.display().to_string();
            let text = std::fs::read_to_string(p).map_err(|e| {
                ConfigError(vec![Diagnostic { origin: name.clone(), line: None, key: None, message: e.to_string() }])
            })?;
            let file: toml::Table = toml::from_str(&text).map_err(|e| {
                let line = e.span().map(|s| line_of_offset(&text, s.start));
                ConfigError(vec![Diagnostic { origin: name.clone(), line, key: None, message: friendly(e.message()) }])
            })?;
            // type errors against the schema, reported at the offending line
            if let Err(e) = toml::from_str::<ExperimentConfig>(&text) {
                let line = e.span().map(|s| line_of_offset(&text, s.start));
                return Err(ConfigError(vec![Diagnostic { origin: name, line, key: None, message: friendly(e.message()) }]));
            }
            table.extend(file);
            sources.file = Some((name, text));
        }
        let mut env_problems = Vec::new();
        for (k, v) in env {
            if let Some(key) = k.strip_prefix(ENV_PREFIX) {
                let key = key.to_lowercase();
                let value = parse_env_value(&v);
                // checked alone so a bad value is blamed on its variable
                let mut alone = toml::Table::new();
                alone.insert(key.clone(), value.clone());
                if let Err(e) = alone.try_into::<ExperimentConfig>() {
                    env_problems.push(Diagnostic { origin: k.clone(), line: None, key: Some(key.clone()), message: friendly(e.message()) });
                }
                table.insert(key.clone(), value);
                sources.env_keys.push(key);
            }
        }
        if !env_problems.is_empty() {
            return Err(ConfigError(env_problems));
        }
        if let Some(s) = flags.seed {
            table.insert("seed".into(), toml::Value::Integer(s as i64));
            sources.flag_keys.push("seed");
        }
        if let Some(t) = flags.trials {
            table.insert("trials".into(), toml::Value::Integer(t as i64));
            sources.flag_keys.push("trials");
        }
        if let Some(o) = &flags.out {
            table.insert("output_dir".into(), toml::Value::String(o.display().to_string()));
            sources.flag_keys.push("output_dir");
        }
        if let Some(e) = flags.epsilon_override_m {
            table.insert("epsilon_override_m".into(), toml::Value::Float(e));
            sources.flag_keys.push("epsilon_override_m");
        }
        let cfg: ExperimentConfig = table.try_into().map_err(|e: toml::de::Error| {
            let key = sources.env_keys.iter().find(|k| e.message().contains(k.as_str())).cloned();
            let (origin, line) = match &key {
                Some(k) => sources.locate(k),
                None => ("<merged configuration>".to_string(), None),
            };
            ConfigError(vec![Diagnostic { origin, line, key, message: friendly(e.message()) }])
        })?;
        let problems = cfg.problems(needs);
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError(
                problems
                    .into_iter()
                    .map(|(key, message)| {
                        let (origin, line) = sources.locate(key);
                        Diagnostic { origin, line, key: Some(key.to_string()), message }
                    })
                    .collect(),
            ))
        }
    }

    fn problems(&self, needs: Needs) -> Vec<(&'static str, String)> {
        let mut p = Vec::new();
        let ns = self.n_abs.to_vec();
        if ns.is_empty() {
            p.push(("n_abs", "needs at least one value".into()));
        }
        for n in &ns {
            if *n < 5 {
                p.push(("n_abs", format!("{n} is below the minimum of 5 aBSs")));
            }
        }
        if !(self.radius_m > 0.0) || !self.radius_m.is_finite() {
            p.push(("radius_m", format!("must be positive and finite, got {}", self.radius_m)));
        }
        let alphas = self.alpha.values();
        if alphas.is_empty() {
            p.push(("alpha", "sweep is empty".into()));
        }
        for a in &alphas {
            if !(*a > 0.0) || !a.is_finite() {
                p.push(("alpha", format!("path loss exponent must be positive, got {a}")));
            }
        }
        let grid = self.gamma_db_grid.values();
        if grid.iter().any(|g| !g.is_finite()) {
            p.push(("gamma_db_grid", "thresholds must be finite".into()));
        }
        if matches!(needs, Needs::Coverage | Needs::Compare) && grid.is_empty() {
            p.push(("gamma_db_grid", "threshold grid is empty".into()));
        }
        if self.trials == Some(0) {
            p.push(("trials", "must be at least 1".into()));
        }
        let modes = self.mode.to_vec();
        if modes.is_empty() {
            p.push(("mode", "needs at least one association mode".into()));
        }
        for m in &modes {
            match m.parse::<Association>() {
                Ok(Association::DynamicComp(k)) if ns.iter().any(|&n| k >= n) => {
                    p.push(("mode", format!("{m} needs more than {k} aBSs")))
                }
                Ok(_) => {}
                Err(e) => p.push(("mode", e.to_string())),
            }
        }
        if needs == Needs::Compare && modes.len() < 2 {
            p.push(("mode", "compare needs at least two modes; the first is the baseline".into()));
        }
        if needs == Needs::Plan {
            match self.rate_threshold_nats {
                None => p.push(("rate_threshold_nats", "required for planning".into())),
                Some(r) if !(r > 0.0) || !r.is_finite() => p.push(("rate_threshold_nats", format!("must be positive, got {r}"))),
                _ => {}
            }
            if self.restarts == 0 {
                p.push(("restarts", "must be at least 1".into()));
            }
            if let Some(e) = self.epsilon_override_m {
                if !(e > 0.0) || !e.is_finite() {
                    p.push(("epsilon_override_m", format!("must be positive, got {e}")));
                }
            }
        }
        if self.case.parse::<aircomp::planner::UeCase>().is_err() {
            p.push(("case", format!("'{}' is not general or worst", self.case)));
        }
        if matches!(needs, Needs::Rate | Needs::Coverage) && self.outer_samples < 1000 {
            p.push(("outer_samples", format!("needs at least 1000, got {}", self.outer_samples)));
        }
        p
    }

    pub fn modes(&self) -> Vec<Association> {
        self.mode.to_vec().iter().map(|m| m.parse().expect("validated")).collect()
    }

    /// SHA-256 of the resolved configuration, hex encoded. The output
    /// directory is left out: moving results does not change them.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let text = toml::to_string(&c).expect("configuration serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, env: &[(&str, &str)], needs: Needs) -> Result<ExperimentConfig, ConfigError> {
        let dir = std::env::temp_dir().join(format!("aircomp-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(format!("c{}.toml", text.len()));
        std::fs::write(&p, text).unwrap();
        let env = env.iter().map(|(k, v)| (k.to_string(), v.to_string()));
        ExperimentConfig::load(toml::Table::new(), Some(&p), env, &FlagOverrides::default(), needs)
    }

    #[test]
    fn ranges_expand_inclusively() {
        let s = Sweep::Range { start: 2.0, stop: 3.2, step: 0.1 };
        let v = s.values();
        assert_eq!(v.len(), 13);
        assert_eq!(v[12], 3.2);
        assert_eq!(v[3], 2.3);
    }

    #[test]
    fn syntax_error_reports_line() {
        let e = load("n_abs = 50\nalpha = [2.0,\nseed = 3\n", &[], Needs::Rate).unwrap_err();
        assert!(e.0[0].line.is_some());
    }

    #[test]
    fn type_error_reports_line() {
        let e = load("n_abs = 50\n\nradius_m = \"far\"\n", &[], Needs::Rate).unwrap_err();
        assert_eq!(e.0[0].line, Some(3), "{e}");
    }

    #[test]
    fn validation_error_reports_key_line() {
        let e = load("n_abs = 50\ngamma_db_grid = []\n", &[], Needs::Coverage).unwrap_err();
        assert_eq!(e.0[0].line, Some(2));
        assert_eq!(e.0[0].key.as_deref(), Some("gamma_db_grid"));
    }

    #[test]
    fn env_overrides_file() {
        let c = load("n_abs = 50\nseed = 3\n", &[("AIRCOMP_SEED", "9"), ("AIRCOMP_MODE", "voronoi_no_comp")], Needs::Rate).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.modes(), vec![Association::VoronoiNoComp]);
        let e = load("", &[("AIRCOMP_N_ABS", "3")], Needs::Rate).unwrap_err();
        assert_eq!(e.0[0].origin, "AIRCOMP_N_ABS");
        let e = load("", &[("AIRCOMP_ALPHA", "steep")], Needs::Rate).unwrap_err();
        assert_eq!(e.0[0].origin, "AIRCOMP_ALPHA");
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(load("n_abz = 50\n", &[], Needs::Rate).is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.output_dir = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.seed += 1;
        assert_ne!(a.hash(), b.hash());
    }
}
