//! Finite probability and possibility distributions and the sigma-max calculus
//! that links them.
//!
//! Random variables are handled with sum-based ("sigma") inference and fuzzy
//! variables with max-based inference. A [`HybridJoint`] carries one variable
//! of each kind, and the heterogeneous compositions/updates move information
//! between the two worlds. Constructors validate normalization instead of
//! silently renormalizing; only operations whose result *is* a normalization
//! (updates, Klir transforms) rescale.
//!
//! Ties in any maximization resolve to the lowest index.

use std::fmt;

use crate::error::{Error, Result};

/// Absolute tolerance used for every normalization check.
pub const NORMALIZATION_TOL: f64 = 1e-12;

// Outputs built from two validated tables can drift by a few multiples of the
// input tolerance; they are checked in debug builds only.
const COMPOSED_TOL: f64 = 1e-9;

/// Index of the largest entry, lowest index on ties. `NaN` entries never win.
pub fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Ordered set of distinct outcome labels; position defines the index mapping.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OutcomeSet {
    labels: Vec<String>,
}

impl OutcomeSet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidOutcomes("empty outcome set".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidOutcomes(format!("duplicate label {l:?}")));
            }
        }
        Ok(Self { labels })
    }

    /// Outcomes labelled `0..n`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl fmt::Display for OutcomeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.labels.join(", "))
    }
}

fn check_range(weights: &[f64]) -> Result<()> {
    for (index, &value) in weights.iter().enumerate() {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::WeightOutOfRange { index, value });
        }
    }
    Ok(())
}

fn check_len(outcomes: &OutcomeSet, weights: &[f64], context: &'static str) -> Result<()> {
    if outcomes.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: outcomes.len(),
            got: weights.len(),
            context,
        });
    }
    Ok(())
}

fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Sum-normalized distribution over a finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteProbability {
    outcomes: OutcomeSet,
    weights: Vec<f64>,
}

impl DiscreteProbability {
    pub fn new(outcomes: OutcomeSet, weights: Vec<f64>) -> Result<Self> {
        check_len(&outcomes, &weights, "probability weights")?;
        check_range(&weights)?;
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization {
                kind: "probability (sum = 1)",
                row: 0,
                value: sum,
            });
        }
        Ok(Self { outcomes, weights })
    }

    /// Convenience constructor over outcomes labelled `0..n`.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        Self::new(OutcomeSet::indexed(weights.len())?, weights)
    }

    pub fn uniform(outcomes: OutcomeSet) -> Self {
        let n = outcomes.len();
        Self {
            outcomes,
            weights: vec![1.0 / n as f64; n],
        }
    }

    /// Normalizes nonnegative `raw` by its sum.
    pub fn normalize(outcomes: OutcomeSet, raw: &[f64]) -> Result<Self> {
        check_len(&outcomes, raw, "probability weights")?;
        let sum: f64 = raw.iter().sum();
        if !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::DegenerateEvidence);
        }
        let weights = raw.iter().map(|w| w / sum).collect();
        Ok(Self { outcomes, weights })
    }

    pub(crate) fn from_parts_unchecked(outcomes: OutcomeSet, weights: Vec<f64>) -> Self {
        debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() < COMPOSED_TOL);
        Self { outcomes, weights }
    }

    pub fn outcomes(&self) -> &OutcomeSet {
        &self.outcomes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn argmax(&self) -> usize {
        argmax(&self.weights).unwrap_or(0)
    }
}

/// Max-normalized distribution over a finite outcome set.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePossibility {
    outcomes: OutcomeSet,
    weights: Vec<f64>,
}

impl DiscretePossibility {
    pub fn new(outcomes: OutcomeSet, weights: Vec<f64>) -> Result<Self> {
        check_len(&outcomes, &weights, "possibility weights")?;
        check_range(&weights)?;
        let max = max_of(&weights);
        if (max - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Normalization {
                kind: "possibility (max = 1)",
                row: 0,
                value: max,
            });
        }
        Ok(Self { outcomes, weights })
    }

    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        Self::new(OutcomeSet::indexed(weights.len())?, weights)
    }

    /// Total ignorance: every outcome fully possible.
    pub fn vacuous(outcomes: OutcomeSet) -> Self {
        let n = outcomes.len();
        Self {
            outcomes,
            weights: vec![1.0; n],
        }
    }

    /// Normalizes nonnegative `raw` by its maximum.
    pub fn normalize(outcomes: OutcomeSet, raw: &[f64]) -> Result<Self> {
        check_len(&outcomes, raw, "possibility weights")?;
        let max = max_of(raw);
        if !(max > 0.0) || !max.is_finite() {
            return Err(Error::DegenerateEvidence);
        }
        let weights = raw.iter().map(|w| w / max).collect();
        Ok(Self { outcomes, weights })
    }

    pub fn outcomes(&self) -> &OutcomeSet {
        &self.outcomes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn argmax(&self) -> usize {
        argmax(&self.weights).unwrap_or(0)
    }
}

/// Whether a table or distribution is sum- or max-normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Probability,
    Possibility,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kind::Probability => f.write_str("probability"),
            Kind::Possibility => f.write_str("possibility"),
        }
    }
}

/// Conditional table `t[i][k] = w(result_k | given_i)`, one row per `given`
/// outcome, normalized per row according to `kind`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalTable {
    given: OutcomeSet,
    result: OutcomeSet,
    cells: Vec<f64>,
    kind: Kind,
}

/// Checks one row of weights against a normalization rule.
pub fn check_row(kind: Kind, row_index: usize, row: &[f64], tol: f64) -> Result<()> {
    let (value, label) = match kind {
        Kind::Probability => (row.iter().sum::<f64>(), "probability (row sum = 1)"),
        Kind::Possibility => (max_of(row), "possibility (row max = 1)"),
    };
    if (value - 1.0).abs() > tol {
        return Err(Error::Normalization {
            kind: label,
            row: row_index,
            value,
        });
    }
    Ok(())
}

impl ConditionalTable {
    pub fn new(
        given: OutcomeSet,
        result: OutcomeSet,
        rows: Vec<Vec<f64>>,
        kind: Kind,
    ) -> Result<Self> {
        if rows.len() != given.len() {
            return Err(Error::DimensionMismatch {
                expected: given.len(),
                got: rows.len(),
                context: "conditional table rows",
            });
        }
        let mut cells = Vec::with_capacity(given.len() * result.len());
        for (i, row) in rows.into_iter().enumerate() {
            check_len(&result, &row, "conditional table columns")?;
            check_range(&row)?;
            check_row(kind, i, &row, NORMALIZATION_TOL)?;
            cells.extend(row);
        }
        Ok(Self {
            given,
            result,
            cells,
            kind,
        })
    }

    /// Square table over outcomes labelled `0..n`.
    pub fn from_rows(rows: Vec<Vec<f64>>, kind: Kind) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        Self::new(OutcomeSet::indexed(n)?, OutcomeSet::indexed(m)?, rows, kind)
    }

    pub fn identity(outcomes: OutcomeSet, kind: Kind) -> Self {
        let n = outcomes.len();
        let mut cells = vec![0.0; n * n];
        for i in 0..n {
            cells[i * n + i] = 1.0;
        }
        Self {
            given: outcomes.clone(),
            result: outcomes,
            cells,
            kind,
        }
    }

    fn from_cells_unchecked(
        given: OutcomeSet,
        result: OutcomeSet,
        cells: Vec<f64>,
        kind: Kind,
    ) -> Self {
        debug_assert!(cells
            .chunks(result.len())
            .enumerate()
            .all(|(i, r)| check_row(kind, i, r, COMPOSED_TOL).is_ok()));
        Self {
            given,
            result,
            cells,
            kind,
        }
    }

    pub fn given(&self) -> &OutcomeSet {
        &self.given
    }

    pub fn result(&self) -> &OutcomeSet {
        &self.result
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn row(&self, given_index: usize) -> &[f64] {
        let m = self.result.len();
        &self.cells[given_index * m..(given_index + 1) * m]
    }

    pub fn get(&self, given_index: usize, result_index: usize) -> f64 {
        self.cells[given_index * self.result.len() + result_index]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.cells.chunks(self.result.len())
    }

    /// Column `result_index` read across all `given` outcomes, i.e. the
    /// likelihood of one observed result under each hypothesis.
    pub fn likelihood_of(&self, result_index: usize) -> Vec<f64> {
        (0..self.given.len())
            .map(|i| self.get(i, result_index))
            .collect()
    }

    /// Per-row Klir conversion to the other kind (ratio-to-max or ratio-to-sum).
    pub fn convert(&self) -> Self {
        let kind = match self.kind {
            Kind::Probability => Kind::Possibility,
            Kind::Possibility => Kind::Probability,
        };
        let mut cells = Vec::with_capacity(self.cells.len());
        for row in self.rows() {
            let scale = match kind {
                Kind::Possibility => max_of(row),
                Kind::Probability => row.iter().sum(),
            };
            cells.extend(row.iter().map(|w| w / scale));
        }
        Self::from_cells_unchecked(self.given.clone(), self.result.clone(), cells, kind)
    }
}

fn require_kind(table: &ConditionalTable, kind: Kind, role: &str) -> Result<()> {
    if table.kind != kind {
        return Err(Error::KindMismatch(format!(
            "{role} must be a {kind} table, got {}",
            table.kind
        )));
    }
    Ok(())
}

fn require_same(a: &OutcomeSet, b: &OutcomeSet, what: &str) -> Result<()> {
    if a != b {
        return Err(Error::OutcomeMismatch(format!("{what}: {a} vs {b}")));
    }
    Ok(())
}

/// Ratio-to-max (Klir) transformation.
pub fn prob_to_poss(p: &DiscreteProbability) -> DiscretePossibility {
    let max = max_of(&p.weights);
    DiscretePossibility {
        outcomes: p.outcomes.clone(),
        weights: p.weights.iter().map(|w| w / max).collect(),
    }
}

/// Ratio-to-sum (Klir) transformation.
pub fn poss_to_prob(pi: &DiscretePossibility) -> DiscreteProbability {
    let sum: f64 = pi.weights.iter().sum();
    DiscreteProbability::from_parts_unchecked(
        pi.outcomes.clone(),
        pi.weights.iter().map(|w| w / sum).collect(),
    )
}

fn compose(a: &ConditionalTable, b: &ConditionalTable, kind: Kind) -> Result<ConditionalTable> {
    require_kind(a, kind, "first relation")?;
    require_kind(b, kind, "second relation")?;
    require_same(&a.result, &b.given, "intermediate outcome sets differ")?;
    let (n, m, p) = (a.given.len(), a.result.len(), b.result.len());
    let mut cells = vec![0.0; n * p];
    for i in 0..n {
        for k in 0..p {
            let terms = (0..m).map(|l| b.get(l, k) * a.get(i, l));
            cells[i * p + k] = match kind {
                Kind::Possibility => terms.fold(0.0, f64::max),
                Kind::Probability => terms.sum(),
            };
        }
    }
    Ok(ConditionalTable::from_cells_unchecked(
        a.given.clone(),
        b.result.clone(),
        cells,
        kind,
    ))
}

/// Max-product composition of fuzzy relations X→Y and Y→Z into X→Z.
pub fn compose_fuzzy(
    rel_xy: &ConditionalTable,
    rel_yz: &ConditionalTable,
) -> Result<ConditionalTable> {
    compose(rel_xy, rel_yz, Kind::Possibility)
}

/// Sum-product (Chapman-Kolmogorov) composition of stochastic relations.
pub fn compose_stochastic(
    rel_xy: &ConditionalTable,
    rel_yz: &ConditionalTable,
) -> Result<ConditionalTable> {
    compose(rel_xy, rel_yz, Kind::Probability)
}

fn weighted(prior: &[f64], likelihood: &[f64], context: &'static str) -> Result<Vec<f64>> {
    if prior.len() != likelihood.len() {
        return Err(Error::DimensionMismatch {
            expected: prior.len(),
            got: likelihood.len(),
            context,
        });
    }
    Ok(prior.iter().zip(likelihood).map(|(p, l)| p * l).collect())
}

/// Possibilistic conditioning with a possibility likelihood.
pub fn possibility_update(
    prior: &DiscretePossibility,
    likelihood: &[f64],
) -> Result<DiscretePossibility> {
    check_range(likelihood)?;
    let raw = weighted(&prior.weights, likelihood, "possibility likelihood")?;
    DiscretePossibility::normalize(prior.outcomes.clone(), &raw)
}

/// Possibility update driven by a probability likelihood (any nonnegative
/// scale; only ratios matter).
pub fn poss_update_with_prob_likelihood(
    prior: &DiscretePossibility,
    likelihood: &[f64],
) -> Result<DiscretePossibility> {
    if let Some(index) = likelihood.iter().position(|l| !(*l >= 0.0)) {
        return Err(Error::WeightOutOfRange {
            index,
            value: likelihood[index],
        });
    }
    let raw = weighted(&prior.weights, likelihood, "probability likelihood")?;
    DiscretePossibility::normalize(prior.outcomes.clone(), &raw)
}

/// Bayesian update of a probability prior by a possibility likelihood.
pub fn prob_update_with_poss_likelihood(
    prior: &DiscreteProbability,
    likelihood: &[f64],
) -> Result<DiscreteProbability> {
    check_range(likelihood)?;
    let raw = weighted(&prior.weights, likelihood, "possibility likelihood")?;
    DiscreteProbability::normalize(prior.outcomes.clone(), &raw)
}

/// Result of a heterogeneous composition: the raw induced vector (suitable as
/// a likelihood) together with its normalized distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Induced<D> {
    pub raw: Vec<f64>,
    pub normalized: D,
}

/// Induced random relation `p(x | y)` from `p(x | z)` and `π(z | y)`, evaluated
/// for one fixed `y`: `raw_i = max_z p(x_i | z) π(z | y)`, then sum-normalized.
///
/// `p_xz` has one row per `z`; `pi_zy` has one row per `y` with columns over `z`.
pub fn compose_hetero_to_prob(
    p_xz: &ConditionalTable,
    pi_zy: &ConditionalTable,
    fixed_y: usize,
) -> Result<Induced<DiscreteProbability>> {
    require_kind(p_xz, Kind::Probability, "p(x|z)")?;
    require_kind(pi_zy, Kind::Possibility, "π(z|y)")?;
    require_same(&p_xz.given, &pi_zy.result, "intermediate outcome sets differ")?;
    check_index(fixed_y, pi_zy.given.len(), "fixed y")?;
    let pi_row = pi_zy.row(fixed_y);
    let raw: Vec<f64> = (0..p_xz.result.len())
        .map(|i| {
            pi_row
                .iter()
                .enumerate()
                .map(|(z, pz)| p_xz.get(z, i) * pz)
                .fold(0.0, f64::max)
        })
        .collect();
    let normalized = DiscreteProbability::normalize(p_xz.result.clone(), &raw)?;
    Ok(Induced { raw, normalized })
}

/// Induced fuzzy relation `π(y | x)` from `π(y | z)` and `p(z | x)`, evaluated
/// for one fixed `x`: `raw_j = Σ_z π(y_j | z) p(z | x)`, then max-normalized.
pub fn compose_hetero_to_poss(
    pi_yz: &ConditionalTable,
    p_zx: &ConditionalTable,
    fixed_x: usize,
) -> Result<Induced<DiscretePossibility>> {
    require_kind(pi_yz, Kind::Possibility, "π(y|z)")?;
    require_kind(p_zx, Kind::Probability, "p(z|x)")?;
    require_same(&pi_yz.given, &p_zx.result, "intermediate outcome sets differ")?;
    check_index(fixed_x, p_zx.given.len(), "fixed x")?;
    let p_row = p_zx.row(fixed_x);
    let raw: Vec<f64> = (0..pi_yz.result.len())
        .map(|j| {
            p_row
                .iter()
                .enumerate()
                .map(|(z, pz)| pi_yz.get(z, j) * pz)
                .sum()
        })
        .collect();
    let normalized = DiscretePossibility::normalize(pi_yz.result.clone(), &raw)?;
    Ok(Induced { raw, normalized })
}

fn check_index(index: usize, len: usize, context: &'static str) -> Result<()> {
    if index >= len {
        return Err(Error::DimensionMismatch {
            expected: len,
            got: index,
            context,
        });
    }
    Ok(())
}

/// Joint distribution of a random variable (rows) and a fuzzy variable
/// (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct HybridJoint {
    random: OutcomeSet,
    fuzzy: OutcomeSet,
    cells: Vec<f64>,
}

impl HybridJoint {
    /// Accepts the joint if at least one of the two order-dependent
    /// normalizations holds.
    pub fn new(random: OutcomeSet, fuzzy: OutcomeSet, rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.len() != random.len() {
            return Err(Error::DimensionMismatch {
                expected: random.len(),
                got: rows.len(),
                context: "hybrid joint rows",
            });
        }
        let mut cells = Vec::with_capacity(random.len() * fuzzy.len());
        for row in rows {
            check_len(&fuzzy, &row, "hybrid joint columns")?;
            check_range(&row)?;
            cells.extend(row);
        }
        let joint = Self {
            random,
            fuzzy,
            cells,
        };
        if !joint.is_sum_max_normalized() && !joint.is_max_sum_normalized() {
            return Err(Error::HybridNormalization {
                sum_of_max: joint.sum_of_max(),
                max_of_sum: joint.max_of_sum(),
            });
        }
        Ok(joint)
    }

    pub fn random_outcomes(&self) -> &OutcomeSet {
        &self.random
    }

    pub fn fuzzy_outcomes(&self) -> &OutcomeSet {
        &self.fuzzy
    }

    pub fn get(&self, random_index: usize, fuzzy_index: usize) -> f64 {
        self.cells[random_index * self.fuzzy.len() + fuzzy_index]
    }

    /// `Σ_x max_y pπ(x, y)`.
    pub fn sum_of_max(&self) -> f64 {
        induced_marginal(self, Axis::Random).iter().sum()
    }

    /// `max_y Σ_x pπ(x, y)`.
    pub fn max_of_sum(&self) -> f64 {
        max_of(&induced_marginal(self, Axis::Fuzzy))
    }

    pub fn is_sum_max_normalized(&self) -> bool {
        (self.sum_of_max() - 1.0).abs() <= NORMALIZATION_TOL
    }

    pub fn is_max_sum_normalized(&self) -> bool {
        (self.max_of_sum() - 1.0).abs() <= NORMALIZATION_TOL
    }
}

/// Marginal handed to [`hybrid_from_marginal_conditional`].
#[derive(Debug, Clone, Copy)]
pub enum Marginal<'a> {
    Probability(&'a DiscreteProbability),
    Possibility(&'a DiscretePossibility),
}

/// Builds `pπ(x, y)` from a conditional and the marginal of its conditioning
/// variable.
///
/// * `p(x | y)` (rows over fuzzy `y`) with `π(y)`: cells `p(x|y) π(y)`.
/// * `π(y | x)` (rows over random `x`) with `p(x)`: cells `π(y|x) p(x)`.
pub fn hybrid_from_marginal_conditional(
    cond: &ConditionalTable,
    marginal: Marginal<'_>,
) -> Result<HybridJoint> {
    match marginal {
        Marginal::Possibility(pi) => {
            require_kind(cond, Kind::Probability, "conditional paired with a possibility marginal")?;
            require_same(&cond.given, &pi.outcomes, "marginal does not match conditioning set")?;
            let (nx, ny) = (cond.result.len(), cond.given.len());
            let rows = (0..nx)
                .map(|x| (0..ny).map(|y| cond.get(y, x) * pi.weights[y]).collect())
                .collect();
            HybridJoint::new(cond.result.clone(), cond.given.clone(), rows)
        }
        Marginal::Probability(p) => {
            require_kind(cond, Kind::Possibility, "conditional paired with a probability marginal")?;
            require_same(&cond.given, &p.outcomes, "marginal does not match conditioning set")?;
            let rows = cond
                .rows()
                .zip(&p.weights)
                .map(|(row, px)| row.iter().map(|w| w * px).collect())
                .collect();
            HybridJoint::new(cond.given.clone(), cond.result.clone(), rows)
        }
    }
}

/// Axis of a [`HybridJoint`] to keep when marginalizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Random,
    Fuzzy,
}

/// Raw induced marginal: `p⁺(x) = max_y pπ(x, y)` for [`Axis::Random`] and
/// `π⁺(y) = Σ_x pπ(x, y)` for [`Axis::Fuzzy`]. Neither is normalized.
pub fn induced_marginal(h: &HybridJoint, axis: Axis) -> Vec<f64> {
    let ny = h.fuzzy.len();
    match axis {
        Axis::Random => h
            .cells
            .chunks(ny)
            .map(|row| row.iter().copied().fold(0.0, f64::max))
            .collect(),
        Axis::Fuzzy => (0..ny)
            .map(|y| h.cells.chunks(ny).map(|row| row[y]).sum())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EPS: f64 = 1e-12;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn prob(w: &[f64]) -> DiscreteProbability {
        DiscreteProbability::from_weights(w.to_vec()).unwrap()
    }

    fn poss(w: &[f64]) -> DiscretePossibility {
        DiscretePossibility::from_weights(w.to_vec()).unwrap()
    }

    fn table(rows: &[&[f64]], kind: Kind) -> ConditionalTable {
        ConditionalTable::from_rows(rows.iter().map(|r| r.to_vec()).collect(), kind).unwrap()
    }

    #[test]
    fn outcome_sets_reject_duplicates_and_empty() {
        assert!(OutcomeSet::new(["a", "a"]).is_err());
        assert!(OutcomeSet::new(Vec::<String>::new()).is_err());
        let s = OutcomeSet::new(["dwna", "dwpa"]).unwrap();
        assert_eq!(s.index_of("dwpa"), Some(1));
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(argmax(&[0.2, 1.0, 1.0]), Some(1));
        assert_eq!(argmax(&[1.0, 1.0]), Some(0));
        assert_eq!(argmax(&[]), None);
    }

    #[test]
    fn distributions_validate() {
        assert!(DiscreteProbability::from_weights(vec![0.5, 0.4]).is_err());
        assert!(DiscretePossibility::from_weights(vec![0.9, 0.4]).is_err());
        assert!(DiscretePossibility::from_weights(vec![1.2, 0.4]).is_err());
        assert!(ConditionalTable::from_rows(vec![vec![1.0, 0.5], vec![0.5, 0.9]], Kind::Possibility)
            .is_err());
    }

    #[test]
    fn prob_to_poss_examples() {
        let third = 1.0 / 3.0;
        assert!(close(prob_to_poss(&prob(&[third, third, 1.0 - 2.0 * third])).weights(), &[1.0, 1.0, 1.0], EPS));
        assert!(close(prob_to_poss(&prob(&[0.5, 0.3, 0.2])).weights(), &[1.0, 0.6, 0.4], EPS));
        assert_eq!(prob_to_poss(&prob(&[1.0, 0.0, 0.0])).weights(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn poss_to_prob_examples() {
        let third = 1.0 / 3.0;
        assert!(close(poss_to_prob(&poss(&[1.0, 1.0, 1.0])).weights(), &[third; 3], EPS));
        assert!(close(poss_to_prob(&poss(&[1.0, 0.6, 0.4])).weights(), &[0.5, 0.3, 0.2], EPS));
        assert_eq!(poss_to_prob(&poss(&[1.0, 0.0, 0.0])).weights(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn compose_fuzzy_identity_and_numeric() {
        let r = table(&[&[1.0, 0.3], &[0.6, 1.0]], Kind::Possibility);
        let id = ConditionalTable::identity(OutcomeSet::indexed(2).unwrap(), Kind::Possibility);
        assert_eq!(compose_fuzzy(&id, &r).unwrap(), r);
        assert_eq!(compose_fuzzy(&r, &id).unwrap(), r);

        // out[0][0] = max(1*1, 0.3*0.6) = 1, out[0][1] = max(1*0.3, 0.3*1) = 0.3
        // out[1][0] = max(0.6*1, 1*0.6) = 0.6, out[1][1] = max(0.6*0.3, 1*1) = 1
        let s = compose_fuzzy(&r, &r).unwrap();
        assert!(close(s.row(0), &[1.0, 0.3], EPS));
        assert!(close(s.row(1), &[0.6, 1.0], EPS));

        let a = table(&[&[0.4, 1.0], &[1.0, 0.2]], Kind::Possibility);
        let b = table(&[&[1.0, 0.5], &[0.7, 1.0]], Kind::Possibility);
        // row 0: k0 max(1*0.4, 0.7*1)=0.7, k1 max(0.5*0.4, 1*1)=1
        // row 1: k0 max(1*1, 0.7*0.2)=1, k1 max(0.5*1, 1*0.2)=0.5
        let c = compose_fuzzy(&a, &b).unwrap();
        assert!(close(c.row(0), &[0.7, 1.0], EPS));
        assert!(close(c.row(1), &[1.0, 0.5], EPS));
    }

    #[test]
    fn compose_stochastic_examples() {
        let r = table(&[&[0.9, 0.1], &[0.2, 0.8]], Kind::Probability);
        let id = ConditionalTable::identity(OutcomeSet::indexed(2).unwrap(), Kind::Probability);
        assert_eq!(compose_stochastic(&id, &r).unwrap(), r);

        let u = table(&[&[0.5, 0.5], &[0.5, 0.5]], Kind::Probability);
        let composed = compose_stochastic(&u, &u).unwrap();
        assert!(close(composed.row(0), &[0.5, 0.5], EPS));
        assert!(close(composed.row(1), &[0.5, 0.5], EPS));

        // [0.9 0.1;0.2 0.8]^2 = [0.83 0.17; 0.34 0.66]
        let sq = compose_stochastic(&r, &r).unwrap();
        assert!(close(sq.row(0), &[0.83, 0.17], EPS));
        assert!(close(sq.row(1), &[0.34, 0.66], EPS));
    }

    #[test]
    fn compose_rejects_mismatched_sets() {
        let a = table(&[&[1.0, 0.3], &[0.6, 1.0]], Kind::Possibility);
        let b = ConditionalTable::from_rows(vec![vec![1.0, 0.2, 0.1]; 3], Kind::Possibility).unwrap();
        assert!(matches!(compose_fuzzy(&a, &b), Err(Error::OutcomeMismatch(_))));
        let p = table(&[&[0.5, 0.5], &[0.5, 0.5]], Kind::Probability);
        assert!(matches!(compose_fuzzy(&a, &p), Err(Error::KindMismatch(_))));
    }

    #[test]
    fn possibility_update_examples() {
        let out = possibility_update(&poss(&[1.0, 1.0]), &[1.0, 0.5]).unwrap();
        assert_eq!(out.weights(), &[1.0, 0.5]);
        let prior = poss(&[1.0, 0.8]);
        assert_eq!(possibility_update(&prior, &[1.0, 1.0]).unwrap(), prior);
        let out = possibility_update(&prior, &[0.3, 0.9]).unwrap();
        assert!(close(out.weights(), &[0.3 / 0.72, 1.0], EPS));
        assert_eq!(
            possibility_update(&poss(&[1.0, 0.0]), &[0.0, 1.0]),
            Err(Error::DegenerateEvidence)
        );
    }

    #[test]
    fn poss_update_with_prob_likelihood_examples() {
        let prior = poss(&[1.0, 0.5]);
        assert_eq!(poss_update_with_prob_likelihood(&prior, &[0.3, 0.3]).unwrap(), prior);
        let out = poss_update_with_prob_likelihood(&poss(&[1.0, 1.0]), &[0.2, 0.8]).unwrap();
        assert!(close(out.weights(), &[0.25, 1.0], EPS));
        let out = poss_update_with_prob_likelihood(&prior, &[0.2, 0.8]).unwrap();
        assert!(close(out.weights(), &[0.5, 1.0], EPS));
        assert!(poss_update_with_prob_likelihood(&prior, &[0.0, 0.0]).is_err());
    }

    #[test]
    fn prob_update_with_poss_likelihood_examples() {
        let prior = prob(&[0.25, 0.75]);
        assert!(close(
            prob_update_with_poss_likelihood(&prior, &[1.0, 1.0]).unwrap().weights(),
            prior.weights(),
            EPS
        ));
        let out = prob_update_with_poss_likelihood(&prior, &[0.0, 1.0]).unwrap();
        assert_eq!(out.weights(), &[0.0, 1.0]);
        let out = prob_update_with_poss_likelihood(&prob(&[0.5, 0.5]), &[0.4, 0.8]).unwrap();
        assert!(close(out.weights(), &[1.0 / 3.0, 2.0 / 3.0], EPS));
    }

    #[test]
    fn hetero_to_prob_examples() {
        let p_xz = table(&[&[0.7, 0.3], &[0.1, 0.9]], Kind::Probability);
        // point mass on z0 collapses to p(.|z0)
        let point = table(&[&[1.0, 0.0], &[0.0, 1.0]], Kind::Possibility);
        let out = compose_hetero_to_prob(&p_xz, &point, 0).unwrap();
        assert!(close(out.normalized.weights(), &[0.7, 0.3], EPS));

        let same = table(&[&[0.6, 0.4], &[0.6, 0.4]], Kind::Probability);
        let pi = table(&[&[1.0, 0.3], &[0.2, 1.0]], Kind::Possibility);
        let out = compose_hetero_to_prob(&same, &pi, 1).unwrap();
        assert!(close(out.normalized.weights(), &[0.6, 0.4], EPS));

        // y = 0, π(z|y0) = [1, 0.5]: raw0 = max(0.7, 0.05) = 0.7, raw1 = max(0.3, 0.45) = 0.45
        let pi = table(&[&[1.0, 0.5], &[0.4, 1.0]], Kind::Possibility);
        let out = compose_hetero_to_prob(&p_xz, &pi, 0).unwrap();
        assert!(close(&out.raw, &[0.7, 0.45], EPS));
        assert!(close(out.normalized.weights(), &[0.7 / 1.15, 0.45 / 1.15], EPS));
    }

    #[test]
    fn hetero_to_poss_examples() {
        let pi_yz = table(&[&[1.0, 0.4], &[0.3, 1.0]], Kind::Possibility);
        let point = table(&[&[1.0, 0.0], &[0.0, 1.0]], Kind::Probability);
        let out = compose_hetero_to_poss(&pi_yz, &point, 1).unwrap();
        assert!(close(out.normalized.weights(), &[0.3, 1.0], EPS));

        let ones = table(&[&[1.0, 1.0], &[1.0, 1.0]], Kind::Possibility);
        let p_zx = table(&[&[0.2, 0.8], &[0.5, 0.5]], Kind::Probability);
        let out = compose_hetero_to_poss(&ones, &p_zx, 0).unwrap();
        assert!(close(out.normalized.weights(), &[1.0, 1.0], EPS));

        // x = 0, p(z|x0) = [0.2, 0.8]: raw0 = 0.2 + 0.24 = 0.44, raw1 = 0.08 + 0.8 = 0.88
        let out = compose_hetero_to_poss(&pi_yz, &p_zx, 0).unwrap();
        assert!(close(&out.raw, &[0.44, 0.88], EPS));
        assert!(close(out.normalized.weights(), &[0.5, 1.0], EPS));
    }

    #[test]
    fn hybrid_examples() {
        let p_x_given_y = table(&[&[0.6, 0.4], &[0.0, 1.0]], Kind::Probability);
        let point = poss(&[1.0, 0.0]);
        let h = hybrid_from_marginal_conditional(&p_x_given_y, Marginal::Possibility(&point)).unwrap();
        assert_eq!(h.get(0, 0), 0.6);
        assert_eq!(h.get(1, 0), 0.4);
        assert_eq!(h.get(0, 1), 0.0);
        assert_eq!(h.get(1, 1), 0.0);

        let ones = poss(&[1.0, 1.0]);
        let h = hybrid_from_marginal_conditional(&p_x_given_y, Marginal::Possibility(&ones)).unwrap();
        assert!(h.is_max_sum_normalized());
        assert_eq!(h.get(1, 1), 1.0);

        // π(y|x) with p(x): Eq. sum-of-max holds, max-of-sum = 0.8
        let pi_y_given_x = table(&[&[1.0, 0.6], &[0.2, 1.0]], Kind::Possibility);
        let px = prob(&[0.5, 0.5]);
        let h = hybrid_from_marginal_conditional(&pi_y_given_x, Marginal::Probability(&px)).unwrap();
        assert!(h.is_sum_max_normalized());
        assert!(!h.is_max_sum_normalized());
        assert!((h.max_of_sum() - 0.8).abs() < EPS);

        assert!(hybrid_from_marginal_conditional(&pi_y_given_x, Marginal::Possibility(&ones)).is_err());
    }

    #[test]
    fn induced_marginal_examples() {
        let single = HybridJoint::new(
            OutcomeSet::indexed(2).unwrap(),
            OutcomeSet::indexed(1).unwrap(),
            vec![vec![0.3], vec![0.7]],
        )
        .unwrap();
        assert!(close(&induced_marginal(&single, Axis::Random), &[0.3, 0.7], EPS));

        let p_x_given_y = table(&[&[0.6, 0.4], &[0.0, 1.0]], Kind::Probability);
        let point = poss(&[0.0, 1.0]);
        let h = hybrid_from_marginal_conditional(&p_x_given_y, Marginal::Possibility(&point)).unwrap();
        let fuzzy = induced_marginal(&h, Axis::Fuzzy);
        assert!((max_of(&fuzzy) - 1.0).abs() < EPS);

        // Induced p⁺ from a hand-built joint sums to 1.1
        let pi = poss(&[1.0, 0.5]);
        let h = hybrid_from_marginal_conditional(&p_x_given_y, Marginal::Possibility(&pi)).unwrap();
        let p_plus = induced_marginal(&h, Axis::Random);
        assert!(close(&p_plus, &[0.6, 0.5], EPS));
        assert!((p_plus.iter().sum::<f64>() - 1.1).abs() < EPS);
    }

    #[test]
    fn hybrid_joint_new_requires_one_normalization() {
        let r = OutcomeSet::indexed(2).unwrap();
        let f = OutcomeSet::indexed(2).unwrap();
        assert!(matches!(
            HybridJoint::new(r, f, vec![vec![0.1, 0.1], vec![0.1, 0.1]]),
            Err(Error::HybridNormalization { .. })
        ));
    }

    #[test]
    fn convert_round_trips_tables() {
        let t = table(&[&[0.5, 0.3, 0.2], &[0.1, 0.1, 0.8]], Kind::Probability);
        let back = t.convert().convert();
        for (a, b) in t.rows().zip(back.rows()) {
            assert!(close(a, b, EPS));
        }
    }
}
