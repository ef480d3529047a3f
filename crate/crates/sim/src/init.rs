//! Finite-difference track initialization from the first converted measurements.

use nalgebra::{DMatrix, DVector};
use sigmax_core::{StateEstimate, StateLayout};

use crate::radar::ConvertedMeasurement;
use crate::{Result, SimError};

/// Number of measurements consumed before filtering starts.
pub const INIT_MEASUREMENTS: usize = 3;

/// Initial estimates, both valid at the last measurement used.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialEstimates {
    /// Position/velocity per axis from the last two measurements.
    pub dwna: StateEstimate,
    /// Position/velocity/acceleration per axis from the last three measurements.
    pub dwpa: StateEstimate,
}

/// Estimate whose derivative `d` is `Σ_i coeffs[d][i] z_i`; the measurements
/// are independent, so each covariance block is `Σ_i c_d[i] c_e[i] R_i`.
pub fn difference_estimate(zs: &[ConvertedMeasurement], coeffs: &[Vec<f64>]) -> Result<StateEstimate> {
    let order = coeffs.len();
    let layout = StateLayout::new(3, order)?;
    let n = layout.dim();
    let mut mean = DVector::zeros(n);
    let mut cov = DMatrix::zeros(n, n);
    for (i, z) in zs.iter().enumerate() {
        for a in 0..3 {
            for d in 0..order {
                let row = layout.index(a, d);
                mean[row] += coeffs[d][i] * z.position[a];
                for b in 0..3 {
                    for e in 0..order {
                        cov[(row, layout.index(b, e))] += coeffs[d][i] * coeffs[e][i] * z.covariance[(a, b)];
                    }
                }
            }
        }
    }
    Ok(StateEstimate::new(mean, cov)?)
}

/// Two-point differencing for the velocity model and three-point
/// differencing for the acceleration model, both anchored at the third
/// measurement.
pub fn initialize_filters(zs: &[ConvertedMeasurement], t: f64) -> Result<InitialEstimates> {
    if zs.len() < INIT_MEASUREMENTS {
        return Err(SimError::InsufficientMeasurements {
            needed: INIT_MEASUREMENTS,
            got: zs.len(),
        });
    }
    let zs = &zs[..INIT_MEASUREMENTS];
    let dwna = difference_estimate(
        &zs[1..],
        &[vec![0.0, 1.0], vec![-1.0 / t, 1.0 / t]],
    )?;
    let dwpa = difference_estimate(
        zs,
        &[
            vec![0.0, 0.0, 1.0],
            vec![1.0 / (2.0 * t), -4.0 / (2.0 * t), 3.0 / (2.0 * t)],
            vec![1.0 / (t * t), -2.0 / (t * t), 1.0 / (t * t)],
        ],
    )?;
    Ok(InitialEstimates { dwna, dwpa })
}
