//! Recursive pattern recognition over a finite measurement alphabet, in sum
//! (Bayesian) and max (possibilistic) form.
//!
//! A pattern `c` is linked to measurements `z` through a latent feature `f`:
//! the model holds `w(c | f)` and `w(z | f)` plus a per-step feature
//! predictive `w(f | z_{1:k-1})`. The sum classifier marginalizes the feature;
//! the max classifier keeps only the most supportive one.

use crate::error::{Error, Result};
use crate::uncertainty::{ConditionalTable, DiscretePossibility, DiscreteProbability, Kind, OutcomeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    Sigma,
    Max,
}

impl ClassifierKind {
    fn table_kind(self) -> Kind {
        match self {
            ClassifierKind::Sigma => Kind::Probability,
            ClassifierKind::Max => Kind::Possibility,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierModel {
    kind: ClassifierKind,
    /// Rows over features, columns over patterns.
    pattern_given_feature: ConditionalTable,
    /// Rows over features, columns over measurement symbols.
    measurement_given_feature: ConditionalTable,
}

impl ClassifierModel {
    pub fn new(
        kind: ClassifierKind,
        pattern_given_feature: ConditionalTable,
        measurement_given_feature: ConditionalTable,
    ) -> Result<Self> {
        let expected = kind.table_kind();
        for (table, name) in [
            (&pattern_given_feature, "pattern-given-feature"),
            (&measurement_given_feature, "measurement-given-feature"),
        ] {
            if table.kind() != expected {
                return Err(Error::KindMismatch(format!(
                    "{name} table is {} but the classifier needs {expected}",
                    table.kind()
                )));
            }
        }
        if pattern_given_feature.given() != measurement_given_feature.given() {
            return Err(Error::OutcomeMismatch(format!(
                "feature sets differ: {} vs {}",
                pattern_given_feature.given(),
                measurement_given_feature.given()
            )));
        }
        Ok(Self {
            kind,
            pattern_given_feature,
            measurement_given_feature,
        })
    }

    /// The same model in the other form, with every table Klir-converted.
    pub fn converted(&self) -> Self {
        let kind = match self.kind {
            ClassifierKind::Sigma => ClassifierKind::Max,
            ClassifierKind::Max => ClassifierKind::Sigma,
        };
        Self {
            kind,
            pattern_given_feature: self.pattern_given_feature.convert(),
            measurement_given_feature: self.measurement_given_feature.convert(),
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn patterns(&self) -> &OutcomeSet {
        self.pattern_given_feature.result()
    }

    pub fn features(&self) -> &OutcomeSet {
        self.pattern_given_feature.given()
    }

    pub fn symbols(&self) -> &OutcomeSet {
        self.measurement_given_feature.result()
    }

    pub fn pattern_given_feature(&self) -> &ConditionalTable {
        &self.pattern_given_feature
    }

    pub fn measurement_given_feature(&self) -> &ConditionalTable {
        &self.measurement_given_feature
    }

    /// Uniform feature predictive for this model's kind.
    pub fn default_feature_predictive(&self) -> Vec<f64> {
        let m = self.features().len();
        match self.kind {
            ClassifierKind::Sigma => vec![1.0 / m as f64; m],
            ClassifierKind::Max => vec![1.0; m],
        }
    }
}

/// Belief over patterns.
#[derive(Debug, Clone, PartialEq)]
pub enum PatternBelief {
    Probability(DiscreteProbability),
    Possibility(DiscretePossibility),
}

impl PatternBelief {
    pub fn weights(&self) -> &[f64] {
        match self {
            PatternBelief::Probability(p) => p.weights(),
            PatternBelief::Possibility(p) => p.weights(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierState {
    pub belief: PatternBelief,
    pub step: usize,
}

impl ClassifierState {
    /// Uninformative prior for `model`'s kind.
    pub fn prior(model: &ClassifierModel) -> Self {
        let patterns = model.patterns().clone();
        let belief = match model.kind {
            ClassifierKind::Sigma => PatternBelief::Probability(DiscreteProbability::uniform(patterns)),
            ClassifierKind::Max => PatternBelief::Possibility(DiscretePossibility::vacuous(patterns)),
        };
        Self { belief, step: 0 }
    }
}

fn resolve_predictive<'a>(
    model: &ClassifierModel,
    feature_predictive: Option<&'a [f64]>,
    owned: &'a mut Vec<f64>,
) -> Result<&'a [f64]> {
    let fp = match feature_predictive {
        Some(fp) => fp,
        None => {
            *owned = model.default_feature_predictive();
            owned.as_slice()
        }
    };
    if fp.len() != model.features().len() {
        return Err(Error::DimensionMismatch {
            expected: model.features().len(),
            got: fp.len(),
            context: "feature predictive",
        });
    }
    crate::uncertainty::check_row(model.kind.table_kind(), 0, fp, crate::uncertainty::NORMALIZATION_TOL)?;
    Ok(fp)
}

/// Likelihood of symbol `z` under each pattern, marginalizing (sigma) or
/// maximizing (max) over the feature.
pub fn pattern_likelihood(
    model: &ClassifierModel,
    z: usize,
    feature_predictive: Option<&[f64]>,
) -> Result<Vec<f64>> {
    if z >= model.symbols().len() {
        return Err(Error::DimensionMismatch {
            expected: model.symbols().len(),
            got: z,
            context: "measurement symbol index",
        });
    }
    let mut owned = Vec::new();
    let fp = resolve_predictive(model, feature_predictive, &mut owned)?;
    let pcf = &model.pattern_given_feature;
    let pzf = &model.measurement_given_feature;
    let features = model.features().len();
    let lik = (0..model.patterns().len())
        .map(|i| {
            // feature posterior given the pattern
            let joint: Vec<f64> = (0..features).map(|f| fp[f] * pcf.get(f, i)).collect();
            match model.kind {
                ClassifierKind::Sigma => {
                    let norm: f64 = joint.iter().sum();
                    if norm <= 0.0 {
                        return 0.0;
                    }
                    (0..features).map(|f| joint[f] / norm * pzf.get(f, z)).sum()
                }
                ClassifierKind::Max => {
                    let norm = joint.iter().copied().fold(0.0, f64::max);
                    if norm <= 0.0 {
                        return 0.0;
                    }
                    (0..features)
                        .map(|f| joint[f] / norm * pzf.get(f, z))
                        .fold(0.0, f64::max)
                }
            }
        })
        .collect();
    Ok(lik)
}

fn require(model: &ClassifierModel, kind: ClassifierKind) -> Result<()> {
    if model.kind != kind {
        return Err(Error::KindMismatch(format!("expected a {kind:?} classifier model")));
    }
    Ok(())
}

/// Bayesian pattern update on symbol `z`.
pub fn sigma_classify_step(
    state: &ClassifierState,
    z: usize,
    model: &ClassifierModel,
    feature_predictive: Option<&[f64]>,
) -> Result<ClassifierState> {
    require(model, ClassifierKind::Sigma)?;
    let PatternBelief::Probability(prior) = &state.belief else {
        return Err(Error::KindMismatch("sigma classifier needs a probability belief".into()));
    };
    let lik = pattern_likelihood(model, z, feature_predictive)?;
    let raw: Vec<f64> = prior.weights().iter().zip(&lik).map(|(p, l)| p * l).collect();
    Ok(ClassifierState {
        belief: PatternBelief::Probability(DiscreteProbability::normalize(prior.outcomes().clone(), &raw)?),
        step: state.step + 1,
    })
}

/// Possibilistic pattern update on symbol `z`.
pub fn max_classify_step(
    state: &ClassifierState,
    z: usize,
    model: &ClassifierModel,
    feature_predictive: Option<&[f64]>,
) -> Result<ClassifierState> {
    require(model, ClassifierKind::Max)?;
    let PatternBelief::Possibility(prior) = &state.belief else {
        return Err(Error::KindMismatch("max classifier needs a possibility belief".into()));
    };
    let lik = pattern_likelihood(model, z, feature_predictive)?;
    let raw: Vec<f64> = prior.weights().iter().zip(&lik).map(|(p, l)| p * l).collect();
    Ok(ClassifierState {
        belief: PatternBelief::Possibility(DiscretePossibility::normalize(prior.outcomes().clone(), &raw)?),
        step: state.step + 1,
    })
}

/// Dispatches on the model's kind.
pub fn classify_step(
    state: &ClassifierState,
    z: usize,
    model: &ClassifierModel,
    feature_predictive: Option<&[f64]>,
) -> Result<ClassifierState> {
    match model.kind {
        ClassifierKind::Sigma => sigma_classify_step(state, z, model, feature_predictive),
        ClassifierKind::Max => max_classify_step(state, z, model, feature_predictive),
    }
}

/// Runs the classifier over a symbol stream, returning the prior followed by
/// the belief after each symbol.
pub fn classify_sequence(
    prior: ClassifierState,
    symbols: &[usize],
    model: &ClassifierModel,
) -> Result<Vec<ClassifierState>> {
    let mut trace = Vec::with_capacity(symbols.len() + 1);
    trace.push(prior);
    for &z in symbols {
        let next = classify_step(trace.last().expect("non-empty"), z, model, None)?;
        trace.push(next);
    }
    Ok(trace)
}

/// Maximum-belief pattern index, lowest index on ties.
pub fn map_decision(state: &ClassifierState) -> usize {
    crate::uncertainty::argmax(state.belief.weights()).unwrap_or(0)
}
