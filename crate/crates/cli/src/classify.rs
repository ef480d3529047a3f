//! `classify`: sigma and max classifiers over a symbol stream.

use std::fs;
use std::path::Path;

use anyhow::Result;
use sigmax_core::classifier::{classify_sequence, map_decision, ClassifierKind, ClassifierModel, ClassifierState, PatternBelief};
use sigmax_core::uncertainty::{poss_to_prob, prob_to_poss, ConditionalTable, DiscretePossibility, DiscreteProbability, OutcomeSet};

use crate::config::{config_error, ClassifierName, ClassifierSection, Config};
use crate::output::{csv_bytes, OutputSet};

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyResult {
    pub classifier: ClassifierName,
    /// MAP pattern label after each step; index 0 is the prior.
    pub decisions: Vec<String>,
    pub final_belief: Vec<f64>,
}

fn labels(given: &Option<Vec<String>>, n: usize) -> Result<OutcomeSet> {
    match given {
        Some(l) => OutcomeSet::new(l.iter().map(String::as_str)).map_err(|e| config_error(e.to_string())),
        None => OutcomeSet::indexed(n).map_err(|e| config_error(e.to_string())),
    }
}

fn native_model(c: &ClassifierSection) -> Result<ClassifierModel> {
    let pcf = &c.pattern_given_feature;
    let pzf = &c.measurement_given_feature;
    let features = labels(&c.features, pcf.rows.len())?;
    let patterns = labels(&c.patterns, pcf.rows.first().map_or(0, Vec::len))?;
    let symbols = labels(&c.symbols, pzf.rows.first().map_or(0, Vec::len))?;
    let bad = |e: sigmax_core::Error| config_error(format!("classifier: {e}"));
    let kind = match pcf.kind.into() {
        sigmax_core::uncertainty::Kind::Probability => ClassifierKind::Sigma,
        sigmax_core::uncertainty::Kind::Possibility => ClassifierKind::Max,
    };
    ClassifierModel::new(
        kind,
        ConditionalTable::new(features.clone(), patterns, pcf.rows.clone(), pcf.kind.into()).map_err(bad)?,
        ConditionalTable::new(features, symbols, pzf.rows.clone(), pzf.kind.into()).map_err(bad)?,
    )
    .map_err(bad)
}

fn prior_state(model: &ClassifierModel, native: ClassifierKind, prior: &Option<Vec<f64>>) -> Result<ClassifierState> {
    let Some(w) = prior else {
        return Ok(ClassifierState::prior(model));
    };
    let outcomes = model.patterns().clone();
    let bad = |e: sigmax_core::Error| config_error(format!("classifier.prior: {e}"));
    let belief = match (native, model.kind()) {
        (ClassifierKind::Sigma, ClassifierKind::Sigma) => {
            PatternBelief::Probability(DiscreteProbability::new(outcomes, w.clone()).map_err(bad)?)
        }
        (ClassifierKind::Max, ClassifierKind::Max) => {
            PatternBelief::Possibility(DiscretePossibility::new(outcomes, w.clone()).map_err(bad)?)
        }
        (ClassifierKind::Sigma, ClassifierKind::Max) => {
            PatternBelief::Possibility(prob_to_poss(&DiscreteProbability::new(outcomes, w.clone()).map_err(bad)?))
        }
        (ClassifierKind::Max, ClassifierKind::Sigma) => {
            PatternBelief::Probability(poss_to_prob(&DiscretePossibility::new(outcomes, w.clone()).map_err(bad)?))
        }
    };
    Ok(ClassifierState { belief, step: 0 })
}

/// Symbols separated by whitespace or commas; `#` starts a comment.
pub fn parse_symbols(text: &str, symbols: &OutcomeSet) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            let index = symbols.index_of(token).ok_or_else(|| {
                config_error(format!(
                    "input line {}: unknown symbol `{token}`, expected one of {:?}",
                    line_no + 1,
                    symbols.labels()
                ))
            })?;
            out.push(index);
        }
    }
    Ok(out)
}

pub fn cmd_classify(config: &Config, input: &Path, out: &Path) -> Result<Vec<ClassifyResult>> {
    let Some(section) = &config.classifier else {
        return Err(config_error("config has no [classifier] section"));
    };
    let located: Vec<String> = config
        .violations()
        .into_iter()
        .filter(|v| v.location.starts_with("classifier") || v.location.starts_with("distribution"))
        .map(|v| v.to_string())
        .collect();
    if !located.is_empty() {
        return Err(config_error(located.join("\n")));
    }
    let native = native_model(section)?;
    let text = fs::read_to_string(input)
        .map_err(|e| config_error(format!("cannot read input {}: {e}", input.display())))?;
    let stream = parse_symbols(&text, native.symbols())?;

    let mut belief_rows = Vec::new();
    let mut decision_rows = Vec::new();
    let mut results = Vec::new();
    for &name in &section.classifiers {
        let wanted = match name {
            ClassifierName::Sigma => ClassifierKind::Sigma,
            ClassifierName::Max => ClassifierKind::Max,
        };
        let model = if wanted == native.kind() { native.clone() } else { native.converted() };
        let prior = prior_state(&model, native.kind(), &section.prior)?;
        let trace = classify_sequence(prior, &stream, &model)?;
        let patterns = model.patterns();
        let mut decisions = Vec::with_capacity(trace.len());
        for (step, state) in trace.iter().enumerate() {
            let symbol = if step == 0 {
                String::new()
            } else {
                model.symbols().labels()[stream[step - 1]].clone()
            };
            for (p, w) in state.belief.weights().iter().enumerate() {
                belief_rows.push(vec![
                    step.to_string(),
                    symbol.clone(),
                    name.name().to_string(),
                    patterns.labels()[p].clone(),
                    w.to_string(),
                ]);
            }
            let decision = patterns.labels()[map_decision(state)].clone();
            decision_rows.push(vec![step.to_string(), name.name().to_string(), decision.clone()]);
            decisions.push(decision);
        }
        results.push(ClassifyResult {
            classifier: name,
            decisions,
            final_belief: trace.last().expect("prior present").belief.weights().to_vec(),
        });
    }
    let mut files = OutputSet::default();
    files.add(
        "beliefs.csv",
        csv_bytes(&["step", "symbol", "classifier", "pattern", "belief"], &belief_rows)?,
    );
    files.add("decisions.csv", csv_bytes(&["step", "classifier", "pattern"], &decision_rows)?);
    files.commit(out)?;
    Ok(results)
}
