//! Interacting multiple model estimators.
//!
//! Both filters run one mode-matched Kalman filter per model and share the
//! four-step cycle: interaction, model-conditioned filtering, mode-belief
//! update, output. They differ in how the mode belief is carried:
//!
//! * IMM: mode probabilities, sum-product interaction, soft mixing of means
//!   and covariances, probability-weighted output.
//! * HIMM: mode possibilities, max-product interaction, each filter restarts
//!   from the mean of its most possible move-in mode, output is the estimate
//!   of the most possible mode.
//!
//! Mode-belief arithmetic runs in the log domain. Finite per-model
//! log-likelihoods are floored at [`LOG_LIKELIHOOD_FLOOR`]; `-inf` stays
//! `-inf` and zeroes its mode.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gaussian::{kf_predict, kf_update, symmetrize, StateEstimate};
use crate::jump_markov::{ModelBank, TransitionPossibilityMatrix, TransitionProbabilityMatrix};
use crate::uncertainty::{argmax, DiscretePossibility, DiscreteProbability, OutcomeSet};

pub const LOG_LIKELIHOOD_FLOOR: f64 = -700.0;

/// Recursive state of the IMM filter.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmState {
    /// Per-model posterior estimates, each in its model's own layout.
    pub estimates: Vec<StateEstimate>,
    pub mode_prob: DiscreteProbability,
}

/// Recursive state of the hybrid IMM filter.
#[derive(Debug, Clone, PartialEq)]
pub struct HimmState {
    pub estimates: Vec<StateEstimate>,
    pub mode_poss: DiscretePossibility,
}

/// Fused result of one filter cycle, in the bank's common layout.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleOutput {
    pub fused: StateEstimate,
    pub mode_belief: Vec<f64>,
    /// HIMM's hard-selected mode; `None` for the IMM.
    pub selected_mode: Option<usize>,
    pub per_model_log_lik: Vec<f64>,
    /// Every mode weight vanished; the predicted belief was kept.
    pub likelihood_underflow: bool,
}

/// How a HIMM filter's mixed covariance is formed once its mean has been
/// replaced by the move-in mode's mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HimmCovariance {
    /// `Σ⁰ʲ = Σʲ + (x⁰ʲ - xˡ)(·)ᵀ`, where the outer product vanishes: the filter
    /// keeps its own covariance.
    #[default]
    Literal,
    /// The filter adopts the move-in mode's covariance along with its mean.
    MoveInMode,
    /// `Σ⁰ʲ = Σʲ + (x⁰ʲ - xʲ)(·)ᵀ`: own covariance inflated by the mean jump.
    OwnWithShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HimmOptions {
    pub covariance: HimmCovariance,
}

/// Result of the IMM interaction step.
#[derive(Debug, Clone, PartialEq)]
pub struct ImmInteraction {
    /// Mixed initial condition for each model, in that model's layout.
    pub mixed: Vec<StateEstimate>,
    pub predicted: Vec<f64>,
    /// `weights[j][l] = p(r_{k-1} = l | r_k = j, z_{1:k-1})`.
    pub weights: Vec<Vec<f64>>,
}

/// Result of the HIMM interaction step.
#[derive(Debug, Clone, PartialEq)]
pub struct HimmInteraction {
    pub mixed: Vec<StateEstimate>,
    pub predicted: Vec<f64>,
    /// `move_in[j][l] = π(r_{k-1} = l | r_k = j, z_{1:k-1})`.
    pub move_in: Vec<Vec<f64>>,
    /// Most possible move-in mode for each `j`.
    pub source: Vec<usize>,
}

fn check_bank(estimates: &[StateEstimate], belief_len: usize, modes: usize, bank: &ModelBank) -> Result<()> {
    for (len, context) in [
        (estimates.len(), "per-model estimates vs bank"),
        (belief_len, "mode belief vs bank"),
        (modes, "transition matrix vs bank"),
    ] {
        if len != bank.len() {
            return Err(Error::DimensionMismatch {
                expected: bank.len(),
                got: len,
                context,
            });
        }
    }
    for (j, est) in estimates.iter().enumerate() {
        if est.dim() != bank.layout(j).dim() {
            return Err(Error::DimensionMismatch {
                expected: bank.layout(j).dim(),
                got: est.dim(),
                context: "estimate vs model layout",
            });
        }
    }
    Ok(())
}

/// Sum-product interaction with soft mixing of means and covariances.
pub fn imm_interact(
    state: &ImmState,
    transition: &TransitionProbabilityMatrix,
    bank: &ModelBank,
) -> Result<ImmInteraction> {
    let m = bank.len();
    check_bank(&state.estimates, state.mode_prob.len(), transition.modes(), bank)?;
    let mu = state.mode_prob.weights();
    let common: Vec<StateEstimate> = state
        .estimates
        .iter()
        .enumerate()
        .map(|(l, e)| bank.to_common(l, e))
        .collect::<Result<_>>()?;

    let mut predicted = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    let mut mixed = Vec::with_capacity(m);
    for j in 0..m {
        let incoming: Vec<f64> = (0..m).map(|l| transition.get(l, j) * mu[l]).collect();
        let pred: f64 = incoming.iter().sum();
        predicted.push(pred);
        if pred <= 0.0 {
            // Mode j is unreachable: nothing to mix, it restarts from itself.
            let mut w = vec![0.0; m];
            w[j] = 1.0;
            weights.push(w);
            mixed.push(state.estimates[j].clone());
            continue;
        }
        let w: Vec<f64> = incoming.iter().map(|v| v / pred).collect();
        let dim = bank.common_dim();
        let mut mean = DVector::zeros(dim);
        for (l, e) in common.iter().enumerate() {
            mean += &e.mean * w[l];
        }
        let mut cov = nalgebra::DMatrix::zeros(dim, dim);
        for (l, e) in common.iter().enumerate() {
            let d = &e.mean - &mean;
            cov += (&e.covariance + &d * d.transpose()) * w[l];
        }
        let mixed_common = StateEstimate {
            mean,
            covariance: symmetrize(&cov),
        };
        mixed.push(bank.from_common(j, &mixed_common)?);
        weights.push(w);
    }
    Ok(ImmInteraction {
        mixed,
        predicted,
        weights,
    })
}

/// Max-product interaction with hard selection of the move-in mean.
pub fn himm_interact(
    state: &HimmState,
    transition: &TransitionPossibilityMatrix,
    bank: &ModelBank,
    options: HimmOptions,
) -> Result<HimmInteraction> {
    let m = bank.len();
    check_bank(&state.estimates, state.mode_poss.len(), transition.modes(), bank)?;
    let pi = state.mode_poss.weights();

    let mut predicted = Vec::with_capacity(m);
    let mut move_in = Vec::with_capacity(m);
    let mut source = Vec::with_capacity(m);
    let mut mixed = Vec::with_capacity(m);
    for j in 0..m {
        let incoming: Vec<f64> = (0..m).map(|l| transition.get(l, j) * pi[l]).collect();
        let pred = incoming.iter().copied().fold(0.0, f64::max);
        predicted.push(pred);
        if pred <= 0.0 {
            let mut w = vec![0.0; m];
            w[j] = 1.0;
            move_in.push(w);
            source.push(j);
            mixed.push(state.estimates[j].clone());
            continue;
        }
        let w: Vec<f64> = incoming.iter().map(|v| v / pred).collect();
        let l = argmax(&w).unwrap_or(j);
        let adopted = bank.transfer(l, j, &state.estimates[l])?;
        let covariance = match options.covariance {
            // the outer product is taken around the adopted mean itself and vanishes
            HimmCovariance::Literal => state.estimates[j].covariance.clone(),
            HimmCovariance::MoveInMode => adopted.covariance,
            HimmCovariance::OwnWithShift => {
                let own = &state.estimates[j];
                let d = &adopted.mean - &own.mean;
                symmetrize(&(&own.covariance + &d * d.transpose()))
            }
        };
        mixed.push(StateEstimate {
            mean: adopted.mean,
            covariance,
        });
        move_in.push(w);
        source.push(l);
    }
    Ok(HimmInteraction {
        mixed,
        predicted,
        move_in,
        source,
    })
}

fn floored(log_lik: f64) -> f64 {
    if log_lik.is_nan() {
        f64::NEG_INFINITY
    } else if log_lik.is_finite() {
        log_lik.max(LOG_LIKELIHOOD_FLOOR)
    } else {
        log_lik
    }
}

/// `ln(predicted_j) + floored(log_lik_j)` shifted so the largest term is 0,
/// or `None` when every term is `-inf`.
fn shifted_log_weights(predicted: &[f64], log_lik: &[f64]) -> Result<Option<Vec<f64>>> {
    if predicted.len() != log_lik.len() {
        return Err(Error::DimensionMismatch {
            expected: predicted.len(),
            got: log_lik.len(),
            context: "log-likelihoods vs modes",
        });
    }
    let terms: Vec<f64> = predicted
        .iter()
        .zip(log_lik)
        .map(|(p, l)| p.ln() + floored(*l))
        .collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || max.is_nan() {
        return Ok(None);
    }
    Ok(Some(terms.iter().map(|t| t - max).collect()))
}

fn prob_update_over(
    outcomes: OutcomeSet,
    predicted: &[f64],
    log_lik: &[f64],
) -> Result<(DiscreteProbability, bool)> {
    match shifted_log_weights(predicted, log_lik)? {
        Some(shifted) => {
            let raw: Vec<f64> = shifted.iter().map(|t| t.exp()).collect();
            Ok((DiscreteProbability::normalize(outcomes, &raw)?, false))
        }
        None => Ok((DiscreteProbability::normalize(outcomes, predicted)?, true)),
    }
}

fn poss_update_over(
    outcomes: OutcomeSet,
    predicted: &[f64],
    log_lik: &[f64],
) -> Result<(DiscretePossibility, bool)> {
    match shifted_log_weights(predicted, log_lik)? {
        Some(shifted) => {
            let raw: Vec<f64> = shifted.iter().map(|t| t.exp()).collect();
            Ok((DiscretePossibility::normalize(outcomes, &raw)?, false))
        }
        None => Ok((DiscretePossibility::normalize(outcomes, predicted)?, true)),
    }
}

/// Bayesian mode-probability update. Returns the posterior and whether the
/// likelihoods underflowed (in which case the predicted probability is kept).
pub fn imm_mode_update(predicted: &[f64], log_lik: &[f64]) -> Result<(DiscreteProbability, bool)> {
    prob_update_over(OutcomeSet::indexed(predicted.len())?, predicted, log_lik)
}

/// Max-normalized mode-possibility update.
pub fn himm_mode_update(predicted: &[f64], log_lik: &[f64]) -> Result<(DiscretePossibility, bool)> {
    poss_update_over(OutcomeSet::indexed(predicted.len())?, predicted, log_lik)
}

/// Probability-weighted output. The covariance is the weighted sum of the
/// per-model covariances, without a spread-of-means term.
pub fn imm_output(
    estimates: &[StateEstimate],
    mode_prob: &DiscreteProbability,
    bank: &ModelBank,
) -> Result<CycleOutput> {
    check_bank(estimates, mode_prob.len(), bank.len(), bank)?;
    let dim = bank.common_dim();
    let mut mean = DVector::zeros(dim);
    let mut cov = nalgebra::DMatrix::zeros(dim, dim);
    for (l, (e, w)) in estimates.iter().zip(mode_prob.weights()).enumerate() {
        let c = bank.to_common(l, e)?;
        mean += &c.mean * *w;
        cov += &c.covariance * *w;
    }
    Ok(CycleOutput {
        fused: StateEstimate {
            mean,
            covariance: symmetrize(&cov),
        },
        mode_belief: mode_prob.weights().to_vec(),
        selected_mode: None,
        per_model_log_lik: Vec::new(),
        likelihood_underflow: false,
    })
}

/// Hard-decision output: the estimate of the most possible mode.
pub fn himm_output(
    estimates: &[StateEstimate],
    mode_poss: &DiscretePossibility,
    bank: &ModelBank,
) -> Result<CycleOutput> {
    check_bank(estimates, mode_poss.len(), bank.len(), bank)?;
    let j = mode_poss.argmax();
    Ok(CycleOutput {
        fused: bank.to_common(j, &estimates[j])?,
        mode_belief: mode_poss.weights().to_vec(),
        selected_mode: Some(j),
        per_model_log_lik: Vec::new(),
        likelihood_underflow: false,
    })
}

fn filter_bank(
    mixed: &[StateEstimate],
    z: &DVector<f64>,
    bank: &ModelBank,
) -> Result<(Vec<StateEstimate>, Vec<f64>)> {
    if z.len() != bank.measurement_dim() {
        return Err(Error::DimensionMismatch {
            expected: bank.measurement_dim(),
            got: z.len(),
            context: "measurement vs bank",
        });
    }
    let mut posteriors = Vec::with_capacity(bank.len());
    let mut log_lik = Vec::with_capacity(bank.len());
    for (j, start) in mixed.iter().enumerate() {
        let model = bank.model(j);
        let pred = kf_predict(start, model)?;
        let (post, innovation) = kf_update(&pred, z, model)?;
        posteriors.push(post);
        log_lik.push(innovation.log_likelihood);
    }
    Ok((posteriors, log_lik))
}

/// One IMM cycle on measurement `z`.
pub fn imm_cycle(
    state: &ImmState,
    z: &DVector<f64>,
    bank: &ModelBank,
    transition: &TransitionProbabilityMatrix,
) -> Result<(ImmState, CycleOutput)> {
    let interaction = imm_interact(state, transition, bank)?;
    let (estimates, log_lik) = filter_bank(&interaction.mixed, z, bank)?;
    let (mode_prob, underflow) =
        prob_update_over(state.mode_prob.outcomes().clone(), &interaction.predicted, &log_lik)?;
    let mut output = imm_output(&estimates, &mode_prob, bank)?;
    output.per_model_log_lik = log_lik;
    output.likelihood_underflow = underflow;
    Ok((ImmState { estimates, mode_prob }, output))
}

/// One hybrid IMM cycle on measurement `z`.
pub fn himm_cycle(
    state: &HimmState,
    z: &DVector<f64>,
    bank: &ModelBank,
    transition: &TransitionPossibilityMatrix,
    options: HimmOptions,
) -> Result<(HimmState, CycleOutput)> {
    let interaction = himm_interact(state, transition, bank, options)?;
    let (estimates, log_lik) = filter_bank(&interaction.mixed, z, bank)?;
    let (mode_poss, underflow) =
        poss_update_over(state.mode_poss.outcomes().clone(), &interaction.predicted, &log_lik)?;
    let mut output = himm_output(&estimates, &mode_poss, bank)?;
    output.per_model_log_lik = log_lik;
    output.likelihood_underflow = underflow;
    Ok((HimmState { estimates, mode_poss }, output))
}
