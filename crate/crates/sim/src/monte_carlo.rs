//! Seeded Monte Carlo comparison of the trackers on one scenario/group pair.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sigmax_core::multi_model::{himm_cycle, himm_output, imm_cycle, imm_output, HimmOptions};
use sigmax_core::uncertainty::{argmax, DiscretePossibility, DiscreteProbability};
use sigmax_core::{
    gaussian, HimmState, ImmState, ModelBank, StateEstimate, TransitionPossibilityMatrix,
    TransitionProbabilityMatrix,
};

use crate::init::{initialize_filters, InitialEstimates, INIT_MEASUREMENTS};
use crate::radar::{convert_measurement, simulate_radar, ConvertedMeasurement};
use crate::scenario::{ExperimentGroup, GroupParameters, ScenarioConfig};
use crate::truth::{generate_truth, TruthTrajectory};
use crate::{Result, SimError};

pub const BASE_MODE: usize = 0;
pub const MANEUVER_MODE: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Imm,
    Himm,
    /// Single DWNA Kalman filter.
    KalmanBaseline,
    /// IMM recursion reporting the most probable mode's estimate.
    ImmMaxoutBaseline,
}

impl Method {
    pub const ALL: [Self; 4] = [Self::Imm, Self::Himm, Self::KalmanBaseline, Self::ImmMaxoutBaseline];

    pub fn name(self) -> &'static str {
        match self {
            Self::Imm => "imm",
            Self::Himm => "himm",
            Self::KalmanBaseline => "kalman-baseline",
            Self::ImmMaxoutBaseline => "imm-maxout-baseline",
        }
    }

    pub fn is_multi_model(self) -> bool {
        !matches!(self, Self::KalmanBaseline)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| SimError::Config(format!("unknown method `{s}`")))
    }
}

/// Tracker design shared by all runs.
#[derive(Debug, Clone)]
pub struct TrackerSettings {
    pub transition_probability: TransitionProbabilityMatrix,
    pub transition_possibility: TransitionPossibilityMatrix,
    /// Inserted acceleration standard deviation in units of the model σ_w.
    pub accel_sigma_factor: f64,
    pub himm: HimmOptions,
}

impl Default for TrackerSettings {
    fn default() -> Self {
        Self {
            transition_probability: TransitionProbabilityMatrix::new(&[vec![0.95, 0.05], vec![0.05, 0.95]])
                .expect("valid matrix"),
            transition_possibility: TransitionPossibilityMatrix::new(&[vec![1.0, 0.5], vec![0.5, 1.0]])
                .expect("valid matrix"),
            accel_sigma_factor: 3.0,
            himm: HimmOptions::default(),
        }
    }
}

/// One method's output over a run; index 0 is sample 1.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodTrace {
    pub positions: Vec<Vector3<f64>>,
    pub mode_belief: Vec<Vec<f64>>,
    pub selected: Vec<usize>,
    pub underflow_steps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub run: usize,
    pub truth: TruthTrajectory,
    pub measurements: Vec<ConvertedMeasurement>,
    pub traces: BTreeMap<Method, std::result::Result<MethodTrace, String>>,
}

/// Seeds run `run` from `(master_seed, run)` so runs are independent of scheduling.
pub fn run_rng(master_seed: u64, run: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(run as u64);
    rng
}

/// Simulates one run and feeds the same measurement stream to every method.
pub fn run_single(
    config: &ScenarioConfig,
    params: &GroupParameters,
    settings: &TrackerSettings,
    methods: &[Method],
    run: usize,
) -> Result<RunOutcome> {
    let mut rng = run_rng(config.seed, run);
    let truth = generate_truth(config, params.data.process_noise, &mut rng);
    let radar = simulate_radar(&truth, &params.data.sensor, &mut rng)?;
    let measurements: Vec<_> = radar
        .iter()
        .map(|m| convert_measurement(m, &params.model.sensor))
        .collect();
    let bank = ModelBank::dwna_dwpa(
        config.sample_interval,
        params.model.process_noise,
        settings.accel_sigma_factor,
    )?;
    let init = initialize_filters(&measurements, config.sample_interval)?;
    let traces = methods
        .iter()
        .map(|&m| {
            let trace = track(m, &measurements, &init, &bank, settings).and_then(|t| {
                if t.positions.iter().all(|p| p.iter().all(|v| v.is_finite())) {
                    Ok(t)
                } else {
                    Err(SimError::Numerical("non-finite estimate".into()))
                }
            });
            (m, trace.map_err(|e| e.to_string()))
        })
        .collect();
    Ok(RunOutcome {
        run,
        truth,
        measurements,
        traces,
    })
}

fn position(bank: &ModelBank, est: &StateEstimate) -> Vector3<f64> {
    let idx = bank.common_layout().position_indices();
    Vector3::new(est.mean[idx[0]], est.mean[idx[1]], est.mean[idx[2]])
}

fn measurement_noise(z: &ConvertedMeasurement) -> DMatrix<f64> {
    DMatrix::from_iterator(3, 3, z.covariance.iter().copied())
}

fn track(
    method: Method,
    zs: &[ConvertedMeasurement],
    init: &InitialEstimates,
    bank: &ModelBank,
    settings: &TrackerSettings,
) -> Result<MethodTrace> {
    let n = zs.len();
    let mut trace = MethodTrace {
        positions: Vec::with_capacity(n),
        mode_belief: Vec::with_capacity(n),
        selected: Vec::with_capacity(n),
        underflow_steps: 0,
    };
    let modes = if method.is_multi_model() { bank.len() } else { 1 };
    let (initial_belief, initial_selected) = match method {
        Method::Imm | Method::ImmMaxoutBaseline => (vec![1.0 / modes as f64; modes], BASE_MODE),
        Method::Himm => (vec![1.0; modes], BASE_MODE),
        Method::KalmanBaseline => (vec![1.0], 0),
    };
    for z in &zs[..INIT_MEASUREMENTS - 1] {
        trace.positions.push(z.position);
        trace.mode_belief.push(initial_belief.clone());
        trace.selected.push(initial_selected);
    }
    let estimates = vec![init.dwna.clone(), init.dwpa.clone()];
    let z_at = |k: usize| DVector::from_column_slice(zs[k].position.as_slice());

    match method {
        Method::Imm | Method::ImmMaxoutBaseline => {
            let mut state = ImmState {
                estimates,
                mode_prob: DiscreteProbability::from_weights(initial_belief.clone())?,
            };
            let maxout = method == Method::ImmMaxoutBaseline;
            let report = |state: &ImmState, fused: &StateEstimate, trace: &mut MethodTrace| -> Result<()> {
                let j = argmax(state.mode_prob.weights()).unwrap_or(BASE_MODE);
                let out = if maxout { bank.to_common(j, &state.estimates[j])? } else { fused.clone() };
                trace.positions.push(position(bank, &out));
                trace.mode_belief.push(state.mode_prob.weights().to_vec());
                trace.selected.push(j);
                Ok(())
            };
            let fused = imm_output(&state.estimates, &state.mode_prob, bank)?.fused;
            report(&state, &fused, &mut trace)?;
            for k in INIT_MEASUREMENTS..n {
                let step_bank = bank.with_measurement_noise(&measurement_noise(&zs[k]))?;
                let (next, out) = imm_cycle(&state, &z_at(k), &step_bank, &settings.transition_probability)?;
                trace.underflow_steps += usize::from(out.likelihood_underflow);
                state = next;
                report(&state, &out.fused, &mut trace)?;
            }
        }
        Method::Himm => {
            let mut state = HimmState {
                estimates,
                mode_poss: DiscretePossibility::from_weights(initial_belief.clone())?,
            };
            let out = himm_output(&state.estimates, &state.mode_poss, bank)?;
            trace.positions.push(position(bank, &out.fused));
            trace.mode_belief.push(out.mode_belief);
            trace.selected.push(out.selected_mode.unwrap_or(BASE_MODE));
            for k in INIT_MEASUREMENTS..n {
                let step_bank = bank.with_measurement_noise(&measurement_noise(&zs[k]))?;
                let (next, out) = himm_cycle(
                    &state,
                    &z_at(k),
                    &step_bank,
                    &settings.transition_possibility,
                    settings.himm,
                )?;
                trace.underflow_steps += usize::from(out.likelihood_underflow);
                trace.positions.push(position(bank, &out.fused));
                trace.mode_belief.push(out.mode_belief);
                trace.selected.push(out.selected_mode.unwrap_or(BASE_MODE));
                state = next;
            }
        }
        Method::KalmanBaseline => {
            let model = bank.model(BASE_MODE);
            let mut est = init.dwna.clone();
            trace.positions.push(position(bank, &bank.to_common(BASE_MODE, &est)?));
            trace.mode_belief.push(vec![1.0]);
            trace.selected.push(0);
            for k in INIT_MEASUREMENTS..n {
                let model = model.with_measurement_noise(measurement_noise(&zs[k]))?;
                let predicted = gaussian::kf_predict(&est, &model)?;
                est = gaussian::kf_update(&predicted, &z_at(k), &model)?.0;
                trace.positions.push(position(bank, &bank.to_common(BASE_MODE, &est)?));
                trace.mode_belief.push(vec![1.0]);
                trace.selected.push(0);
            }
        }
    }
    Ok(trace)
}

/// Per-method aggregates over the included runs.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodResults {
    /// `rmse[axis][k]` for sample `k + 1`.
    pub rmse: [Vec<f64>; 3],
    /// `mode_traces[i][k]` for the i-th included run.
    pub mode_traces: Vec<Vec<Vec<f64>>>,
    pub selected_traces: Vec<Vec<usize>>,
    /// Belief crossover sample per included run.
    pub cross_times: Vec<Option<f64>>,
    pub selected_cross_times: Vec<Option<f64>>,
    pub underflow_steps: usize,
    pub failed_runs: usize,
}

impl MethodResults {
    pub fn mean_cross_time(&self) -> Option<f64> {
        crate::metrics::mean_present(&self.cross_times).0
    }

    /// Mean RMSE over samples `from..=to` on one axis.
    pub fn window_rmse(&self, axis: usize, from: usize, to: usize) -> f64 {
        crate::metrics::window_mean(&self.rmse[axis], from, to)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub scenario: String,
    pub group: ExperimentGroup,
    pub num_samples: usize,
    pub runs_requested: usize,
    pub switch_sample: Option<usize>,
    pub included_runs: Vec<usize>,
    /// `(run, reason)` for runs dropped after a numerical failure.
    pub excluded_runs: Vec<(usize, String)>,
    pub measurement_rmse: [Vec<f64>; 3],
    pub methods: BTreeMap<Method, MethodResults>,
    pub runtime_secs: f64,
}

impl MonteCarloReport {
    pub fn excluded_fraction(&self) -> f64 {
        if self.runs_requested == 0 {
            0.0
        } else {
            self.excluded_runs.len() as f64 / self.runs_requested as f64
        }
    }

    pub fn method(&self, m: Method) -> Option<&MethodResults> {
        self.methods.get(&m)
    }

    /// Equality ignoring wall-clock runtime.
    pub fn same_results(&self, other: &Self) -> bool {
        Self {
            runtime_secs: 0.0,
            ..self.clone()
        } == Self {
            runtime_secs: 0.0,
            ..other.clone()
        }
    }
}

/// Runs `config.mc_runs` independent seeded runs. A run where any method
/// fails numerically is excluded for every method and recorded.
pub fn run_monte_carlo(
    config: &ScenarioConfig,
    group: ExperimentGroup,
    methods: &[Method],
    settings: &TrackerSettings,
) -> Result<MonteCarloReport> {
    config.validate()?;
    if methods.is_empty() {
        return Err(SimError::Config("no methods selected".into()));
    }
    let started = Instant::now();
    let params = group.parameters(config);
    let outcomes: Vec<RunOutcome> = (0..config.mc_runs)
        .into_par_iter()
        .map(|run| run_single(config, &params, settings, methods, run))
        .collect::<Result<_>>()?;

    let n = config.num_samples;
    let switch_sample = config.maneuver_start();
    let mut sq_meas = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let mut results: BTreeMap<Method, MethodResults> = methods
        .iter()
        .map(|&m| {
            (
                m,
                MethodResults {
                    rmse: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
                    mode_traces: Vec::new(),
                    selected_traces: Vec::new(),
                    cross_times: Vec::new(),
                    selected_cross_times: Vec::new(),
                    underflow_steps: 0,
                    failed_runs: 0,
                },
            )
        })
        .collect();
    let mut included = Vec::new();
    let mut excluded = Vec::new();

    for outcome in outcomes {
        let failures: Vec<String> = outcome
            .traces
            .iter()
            .filter_map(|(m, t)| t.as_ref().err().map(|e| format!("{m}: {e}")))
            .collect();
        if !failures.is_empty() {
            for (m, t) in &outcome.traces {
                if t.is_err() {
                    results.get_mut(m).expect("selected method").failed_runs += 1;
                }
            }
            excluded.push((outcome.run, failures.join("; ")));
            continue;
        }
        included.push(outcome.run);
        for k in 0..n {
            let err = outcome.measurements[k].position - outcome.truth.position(k);
            for axis in 0..3 {
                sq_meas[axis][k] += err[axis] * err[axis];
            }
        }
        for (m, trace) in outcome.traces {
            let trace = trace.expect("failures filtered above");
            let r = results.get_mut(&m).expect("selected method");
            for k in 0..n {
                let err = trace.positions[k] - outcome.truth.position(k);
                for axis in 0..3 {
                    r.rmse[axis][k] += err[axis] * err[axis];
                }
            }
            let (ct, sct) = match (m.is_multi_model(), switch_sample) {
                (true, Some(s)) => (
                    crate::metrics::cross_time(&trace.mode_belief, s, BASE_MODE, MANEUVER_MODE),
                    crate::metrics::selected_cross_time(&trace.selected, s, MANEUVER_MODE),
                ),
                _ => (None, None),
            };
            r.cross_times.push(ct);
            r.selected_cross_times.push(sct);
            r.underflow_steps += trace.underflow_steps;
            r.mode_traces.push(trace.mode_belief);
            r.selected_traces.push(trace.selected);
        }
    }

    let runs = included.len().max(1) as f64;
    let finish = |sums: &mut [Vec<f64>; 3]| {
        for axis in sums.iter_mut() {
            for v in axis.iter_mut() {
                *v = (*v / runs).sqrt();
            }
        }
    };
    finish(&mut sq_meas);
    for r in results.values_mut() {
        finish(&mut r.rmse);
    }

    Ok(MonteCarloReport {
        scenario: config.name.clone(),
        group,
        num_samples: n,
        runs_requested: config.mc_runs,
        switch_sample,
        included_runs: included,
        excluded_runs: excluded,
        measurement_rmse: sq_meas,
        methods: results,
        runtime_secs: started.elapsed().as_secs_f64(),
    })
}
