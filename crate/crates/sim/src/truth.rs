use nalgebra::{DVector, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::scenario::ScenarioConfig;

/// True target states, one `[x, vx, ax, y, vy, ay, z, vz, az]` vector per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthTrajectory {
    pub states: Vec<DVector<f64>>,
}

impl TruthTrajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Position at 0-based index `k`.
    pub fn position(&self, k: usize) -> Vector3<f64> {
        let s = &self.states[k];
        Vector3::new(s[0], s[3], s[6])
    }
}

/// Propagates the initial state with constant-acceleration kinematics. Each
/// step adds `process_noise`-scaled white noise through the
/// `[T²/2, T]` position/velocity gains, then sets the acceleration to the
/// schedule value of the new sample.
pub fn generate_truth<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    process_noise: f64,
    rng: &mut R,
) -> TruthTrajectory {
    let t = config.sample_interval;
    let mut state = DVector::from_row_slice(&config.initial_state);
    let a1 = config.acceleration_at(1);
    for axis in 0..3 {
        state[3 * axis + 2] = a1[axis];
    }
    let mut states = Vec::with_capacity(config.num_samples);
    states.push(state.clone());
    for sample in 2..=config.num_samples {
        let accel = config.acceleration_at(sample);
        let mut next = state.clone();
        for axis in 0..3 {
            let (p, v, a) = (state[3 * axis], state[3 * axis + 1], state[3 * axis + 2]);
            let w = if process_noise > 0.0 {
                process_noise * rng.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            };
            next[3 * axis] = p + t * v + 0.5 * t * t * (a + w);
            next[3 * axis + 1] = v + t * (a + w);
            next[3 * axis + 2] = accel[axis];
        }
        states.push(next.clone());
        state = next;
    }
    TruthTrajectory { states }
}
