//! TOML configuration schema.
//!
//! ```toml
//! [run]
//! scenarios = [1, 2]            # presets to run
//! groups = [1, 2, 3, 4]         # experiment groups
//! methods = ["imm", "himm"]     # imm, himm, kalman-baseline, imm-maxout-baseline
//! mc_runs = 100                 # optional, overrides every scenario
//! seed = 7                      # optional, overrides every scenario
//!
//! [model]
//! transition_probability = [[0.95, 0.05], [0.05, 0.95]]
//! transition_possibility = [[1.0, 0.5], [0.5, 1.0]]
//! accel_sigma_factor = 3.0
//! himm_covariance = "literal"   # literal, move-in-mode, own-with-shift
//!
//! [scenario1]                   # optional overrides of a preset; also [scenario2]
//! sample_interval = 0.2
//! num_samples = 200
//! process_noise = 3.0
//! sensor_angle_deg = 0.1
//! sensor_range = 10.0
//! initial_state = [12000.0, -100.0, 0.0, 8000.0, -100.0, 0.0, 1000.0, 0.0, 0.0]
//! phases = [{ start = 1, end = 80, acceleration = [0.0, 0.0, 0.0] }, ...]
//!
//! [[distribution]]              # extra vectors checked by `validate`
//! name = "prior"
//! kind = "possibility"
//! weights = [1.0, 0.3]
//!
//! [classifier]                  # used by `classify`
//! patterns = ["friend", "foe"]
//! features = ["f1", "f2"]
//! symbols = ["a", "b", "c"]
//! classifiers = ["sigma", "max"]
//! prior = [0.5, 0.5]            # optional, in the tables' kind
//! [classifier.pattern_given_feature]
//! kind = "probability"          # rows over features, columns over patterns
//! rows = [[0.9, 0.1], [0.2, 0.8]]
//! [classifier.measurement_given_feature]
//! kind = "probability"          # rows over features, columns over symbols
//! rows = [[0.7, 0.2, 0.1], [0.1, 0.3, 0.6]]
//! ```

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sigmax_core::multi_model::HimmCovariance;
use sigmax_core::uncertainty::{Kind, NORMALIZATION_TOL};
use sigmax_core::{HimmOptions, TransitionPossibilityMatrix, TransitionProbabilityMatrix};
use sigmax_sim::{Method, Phase, ScenarioConfig, SensorAccuracy, TrackerSettings};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub run: RunSection,
    #[serde(default)]
    pub model: ModelSection,
    pub scenario1: Option<ScenarioOverride>,
    pub scenario2: Option<ScenarioOverride>,
    #[serde(default)]
    pub distribution: Vec<NamedDistribution>,
    pub classifier: Option<ClassifierSection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    #[serde(default = "default_scenarios")]
    pub scenarios: Vec<u8>,
    #[serde(default = "default_groups")]
    pub groups: Vec<u8>,
    #[serde(default = "default_methods")]
    pub methods: Vec<String>,
    pub mc_runs: Option<usize>,
    pub seed: Option<u64>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            scenarios: default_scenarios(),
            groups: default_groups(),
            methods: default_methods(),
            mc_runs: None,
            seed: None,
        }
    }
}

fn default_scenarios() -> Vec<u8> {
    vec![1]
}

fn default_groups() -> Vec<u8> {
    vec![1]
}

fn default_methods() -> Vec<String> {
    vec!["imm".into(), "himm".into()]
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default = "default_probability")]
    pub transition_probability: Vec<Vec<f64>>,
    #[serde(default = "default_possibility")]
    pub transition_possibility: Vec<Vec<f64>>,
    #[serde(default = "default_accel_factor")]
    pub accel_sigma_factor: f64,
    #[serde(default)]
    pub himm_covariance: CovarianceChoice,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            transition_probability: default_probability(),
            transition_possibility: default_possibility(),
            accel_sigma_factor: default_accel_factor(),
            himm_covariance: CovarianceChoice::default(),
        }
    }
}

fn default_probability() -> Vec<Vec<f64>> {
    vec![vec![0.95, 0.05], vec![0.05, 0.95]]
}

fn default_possibility() -> Vec<Vec<f64>> {
    vec![vec![1.0, 0.5], vec![0.5, 1.0]]
}

fn default_accel_factor() -> f64 {
    3.0
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceChoice {
    #[default]
    Literal,
    MoveInMode,
    OwnWithShift,
}

impl From<CovarianceChoice> for HimmCovariance {
    fn from(c: CovarianceChoice) -> Self {
        match c {
            CovarianceChoice::Literal => HimmCovariance::Literal,
            CovarianceChoice::MoveInMode => HimmCovariance::MoveInMode,
            CovarianceChoice::OwnWithShift => HimmCovariance::OwnWithShift,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOverride {
    pub sample_interval: Option<f64>,
    pub num_samples: Option<usize>,
    pub initial_state: Option<[f64; 9]>,
    pub phases: Option<Vec<Phase>>,
    pub process_noise: Option<f64>,
    pub sensor_angle_deg: Option<f64>,
    pub sensor_range: Option<f64>,
    pub mc_runs: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Probability,
    Possibility,
}

impl From<KindName> for Kind {
    fn from(k: KindName) -> Self {
        match k {
            KindName::Probability => Kind::Probability,
            KindName::Possibility => Kind::Possibility,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedDistribution {
    pub name: String,
    pub kind: KindName,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSection {
    pub kind: KindName,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierName {
    Sigma,
    Max,
}

impl ClassifierName {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierName::Sigma => "sigma",
            ClassifierName::Max => "max",
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifierSection {
    pub patterns: Option<Vec<String>>,
    pub features: Option<Vec<String>>,
    pub symbols: Option<Vec<String>>,
    #[serde(default = "default_classifiers")]
    pub classifiers: Vec<ClassifierName>,
    pub prior: Option<Vec<f64>>,
    pub pattern_given_feature: TableSection,
    pub measurement_given_feature: TableSection,
}

fn default_classifiers() -> Vec<ClassifierName> {
    vec![ClassifierName::Sigma, ClassifierName::Max]
}

/// A configuration or input problem, reported with exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

pub fn load(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}

pub fn parse(text: &str) -> Result<Config> {
    if text.trim().is_empty() {
        return Err(config_error("config file is empty"));
    }
    toml::from_str(text).map_err(|e| config_error(format!("parse error: {e}")))
}

/// One normalization or consistency problem, with its location in the file.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

fn push(out: &mut Vec<Violation>, location: impl Into<String>, message: impl Into<String>) {
    out.push(Violation {
        location: location.into(),
        message: message.into(),
    });
}

fn check_weights(out: &mut Vec<Violation>, location: &str, kind: Kind, weights: &[f64]) {
    if weights.is_empty() {
        push(out, location, "empty weight vector");
        return;
    }
    for (i, w) in weights.iter().enumerate() {
        if !(0.0..=1.0).contains(w) {
            push(out, format!("{location}[{i}]"), format!("weight {w} is outside [0, 1]"));
        }
    }
    let (value, rule) = match kind {
        Kind::Probability => (weights.iter().sum::<f64>(), "sum"),
        Kind::Possibility => (weights.iter().copied().fold(f64::NEG_INFINITY, f64::max), "maximum"),
    };
    if (value - 1.0).abs() > NORMALIZATION_TOL {
        push(out, location, format!("{kind} {rule} is {value}, expected 1"));
    }
}

fn check_table(out: &mut Vec<Violation>, location: &str, kind: Kind, rows: &[Vec<f64>], shape: (Option<usize>, Option<usize>)) {
    if rows.is_empty() {
        push(out, location, "table has no rows");
        return;
    }
    if let Some(n) = shape.0 {
        if rows.len() != n {
            push(out, location, format!("expected {n} rows, found {}", rows.len()));
        }
    }
    let cols = shape.1.unwrap_or(rows[0].len());
    for (i, row) in rows.iter().enumerate() {
        let loc = format!("{location} row {i}");
        if row.len() != cols {
            push(out, &loc, format!("expected {cols} columns, found {}", row.len()));
        }
        check_weights(out, &loc, kind, row);
    }
}

impl Config {
    /// Every violation of a normalization rule or structural constraint.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let modes = 2;
        check_table(
            &mut out,
            "model.transition_probability",
            Kind::Probability,
            &self.model.transition_probability,
            (Some(modes), Some(modes)),
        );
        check_table(
            &mut out,
            "model.transition_possibility",
            Kind::Possibility,
            &self.model.transition_possibility,
            (Some(modes), Some(modes)),
        );
        let f = self.model.accel_sigma_factor;
        if !(f.is_finite() && f > 0.0) {
            push(&mut out, "model.accel_sigma_factor", format!("must be positive, got {f}"));
        }

        if self.run.scenarios.is_empty() {
            push(&mut out, "run.scenarios", "no scenario selected");
        }
        for s in &self.run.scenarios {
            if ScenarioConfig::preset(*s).is_none() {
                push(&mut out, "run.scenarios", format!("unknown scenario {s}, expected 1 or 2"));
            }
        }
        if self.run.groups.is_empty() {
            push(&mut out, "run.groups", "no group selected");
        }
        for g in &self.run.groups {
            if sigmax_sim::ExperimentGroup::from_number(*g).is_none() {
                push(&mut out, "run.groups", format!("unknown group {g}, expected 1 to 4"));
            }
        }
        if self.run.methods.is_empty() {
            push(&mut out, "run.methods", "no method selected");
        }
        for m in &self.run.methods {
            if m.parse::<Method>().is_err() {
                push(&mut out, "run.methods", format!("unknown method `{m}`"));
            }
        }
        if self.run.mc_runs == Some(0) {
            push(&mut out, "run.mc_runs", "must be at least 1");
        }
        for index in [1u8, 2] {
            if self.override_for(index).is_some() {
                if let Err(e) = self.scenario(index, None, None).and_then(|s| s.validate().map_err(Into::into)) {
                    push(&mut out, format!("scenario{index}"), e.to_string());
                }
            }
        }

        for (i, d) in self.distribution.iter().enumerate() {
            check_weights(&mut out, &format!("distribution[{i}] ({})", d.name), d.kind.into(), &d.weights);
        }
        if let Some(c) = &self.classifier {
            c.violations(&mut out);
        }
        out
    }

    fn override_for(&self, index: u8) -> Option<&ScenarioOverride> {
        match index {
            1 => self.scenario1.as_ref(),
            2 => self.scenario2.as_ref(),
            _ => None,
        }
    }

    /// Preset `index` with file overrides, then command-line overrides.
    pub fn scenario(&self, index: u8, mc_runs: Option<usize>, seed: Option<u64>) -> Result<ScenarioConfig> {
        let Some(mut s) = ScenarioConfig::preset(index) else {
            bail!(config_error(format!("unknown scenario {index}, expected 1 or 2")));
        };
        if let Some(o) = self.override_for(index) {
            if let Some(v) = o.sample_interval {
                s.sample_interval = v;
            }
            if let Some(v) = o.num_samples {
                s.num_samples = v;
            }
            if let Some(v) = o.initial_state {
                s.initial_state = v;
            }
            if let Some(v) = &o.phases {
                s.phases = v.clone();
            }
            if let Some(v) = o.process_noise {
                s.process_noise = v;
            }
            let angle = o.sensor_angle_deg.map(f64::to_radians);
            if angle.is_some() || o.sensor_range.is_some() {
                s.sensor = SensorAccuracy {
                    sigma_azimuth: angle.unwrap_or(s.sensor.sigma_azimuth),
                    sigma_elevation: angle.unwrap_or(s.sensor.sigma_elevation),
                    sigma_range: o.sensor_range.unwrap_or(s.sensor.sigma_range),
                };
            }
            if let Some(v) = o.mc_runs {
                s.mc_runs = v;
            }
            if let Some(v) = o.seed {
                s.seed = v;
            }
        }
        if let Some(v) = mc_runs.or(self.run.mc_runs) {
            s.mc_runs = v;
        }
        if let Some(v) = seed.or(self.run.seed) {
            s.seed = v;
        }
        Ok(s)
    }

    pub fn tracker_settings(&self) -> Result<TrackerSettings> {
        let m = &self.model;
        Ok(TrackerSettings {
            transition_probability: TransitionProbabilityMatrix::new(&m.transition_probability)
                .map_err(|e| config_error(format!("model.transition_probability: {e}")))?,
            transition_possibility: TransitionPossibilityMatrix::new(&m.transition_possibility)
                .map_err(|e| config_error(format!("model.transition_possibility: {e}")))?,
            accel_sigma_factor: m.accel_sigma_factor,
            himm: HimmOptions {
                covariance: m.himm_covariance.into(),
            },
        })
    }
}

impl ClassifierSection {
    fn violations(&self, out: &mut Vec<Violation>) {
        let pcf = &self.pattern_given_feature;
        let pzf = &self.measurement_given_feature;
        if pcf.kind != pzf.kind {
            push(
                out,
                "classifier",
                format!("table kinds differ: pattern_given_feature is {:?}, measurement_given_feature is {:?}", pcf.kind, pzf.kind),
            );
        }
        let features = self.features.as_ref().map(Vec::len).or(Some(pcf.rows.len()));
        let patterns = self.patterns.as_ref().map(Vec::len);
        let symbols = self.symbols.as_ref().map(Vec::len);
        check_table(out, "classifier.pattern_given_feature", pcf.kind.into(), &pcf.rows, (features, patterns));
        check_table(out, "classifier.measurement_given_feature", pzf.kind.into(), &pzf.rows, (features, symbols));
        if let Some(prior) = &self.prior {
            check_weights(out, "classifier.prior", pcf.kind.into(), prior);
            let n = patterns.or(pcf.rows.first().map(Vec::len)).unwrap_or(0);
            if prior.len() != n {
                push(out, "classifier.prior", format!("expected {n} weights, found {}", prior.len()));
            }
        }
        if self.classifiers.is_empty() {
            push(out, "classifier.classifiers", "no classifier selected");
        }
        for (name, labels) in [("patterns", &self.patterns), ("features", &self.features), ("symbols", &self.symbols)] {
            if let Some(labels) = labels {
                let mut sorted = labels.clone();
                sorted.sort();
                sorted.dedup();
                if sorted.len() != labels.len() || labels.iter().any(String::is_empty) {
                    push(out, format!("classifier.{name}"), "labels must be unique and non-empty");
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = parse("[run]\n").unwrap();
        assert!(c.violations().is_empty());
        let s = c.tracker_settings().unwrap();
        assert_eq!(s.transition_possibility.get(0, 1), 0.5);
    }

    #[test]
    fn empty_file_is_a_parse_error() {
        let e = parse("  \n").unwrap_err();
        assert!(e.downcast_ref::<ConfigError>().is_some());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = parse("[run]\nmethod = [\"imm\"]\n").unwrap_err();
        assert!(e.to_string().contains("method"), "{e}");
    }

    #[test]
    fn row_sum_violation_is_located() {
        let c = parse("[model]\ntransition_probability = [[0.94, 0.05], [0.05, 0.95]]\n").unwrap();
        let v = c.violations();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].location, "model.transition_probability row 0");
    }

    #[test]
    fn unknown_method_is_named() {
        let c = parse("[run]\nmethods = [\"imm\", \"ukf\"]\n").unwrap();
        let v = c.violations();
        assert_eq!(v[0].location, "run.methods");
        assert!(v[0].message.contains("ukf"));
    }

    #[test]
    fn overrides_apply_in_order() {
        let c = parse("[run]\nseed = 5\n[scenario1]\nmc_runs = 7\nseed = 9\nsensor_range = 20.0\n").unwrap();
        let s = c.scenario(1, None, None).unwrap();
        assert_eq!((s.mc_runs, s.seed, s.sensor.sigma_range), (7, 5, 20.0));
        let s = c.scenario(1, Some(3), Some(11)).unwrap();
        assert_eq!((s.mc_runs, s.seed), (3, 11));
    }

    #[test]
    fn bad_phases_are_reported() {
        let c = parse("[scenario2]\nnum_samples = 90\n").unwrap();
        let v = c.violations();
        assert_eq!(v[0].location, "scenario2");
    }

    #[test]
    fn possibility_distribution_needs_unit_maximum() {
        let c = parse("[[distribution]]\nname = \"p\"\nkind = \"possibility\"\nweights = [0.9, 0.3]\n").unwrap();
        let v = c.violations();
        assert_eq!(v.len(), 1);
        assert!(v[0].location.contains("distribution[0]"));
    }
}
