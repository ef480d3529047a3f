//! Kalman filtering and its possibilistic Gaussian counterpart.
//!
//! With Gaussian possibility functions `exp(-½ (x-μ)ᵀ Σ⁻¹ (x-μ))` in place of
//! densities and suprema in place of integrals, the prediction
//! `sup_x' π(x | x') π(x')` and the sup-normalized update of a linear-Gaussian
//! system stay in the Gaussian-possibility family, and their (μ, Σ) pairs obey
//! exactly the Kalman recursion. The `poss_*` functions therefore share the
//! moment arithmetic of the `kf_*` functions; the tests check the possibility
//! functions themselves against brute-force suprema.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-9;

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn check_square(m: &DMatrix<f64>, n: usize, context: &'static str) -> Result<()> {
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: if m.nrows() != n { m.nrows() } else { m.ncols() },
            context,
        });
    }
    Ok(())
}

fn is_symmetric(m: &DMatrix<f64>) -> bool {
    let scale = m.amax().max(f64::MIN_POSITIVE);
    (m - m.transpose()).amax() <= SYMMETRY_TOL * scale
}

/// Checks symmetry (relative) and positive semi-definiteness.
pub fn check_covariance(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidCovariance("not square".into()));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidCovariance("non-finite entry".into()));
    }
    if !is_symmetric(m) {
        return Err(Error::InvalidCovariance("not symmetric".into()));
    }
    if m.nrows() == 0 {
        return Ok(());
    }
    let trace = m.trace().abs();
    let min_eig = symmetrize(m).symmetric_eigenvalues().min();
    if min_eig < -PSD_TOL * trace.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidCovariance(format!(
            "negative eigenvalue {min_eig}"
        )));
    }
    Ok(())
}

/// Mean and covariance of a Gaussian (or Gaussian-possibility) belief.
#[derive(Debug, Clone, PartialEq)]
pub struct StateEstimate {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl StateEstimate {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        check_square(&covariance, mean.len(), "covariance vs mean")?;
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite mean".into()));
        }
        check_covariance(&covariance)?;
        Ok(Self { mean, covariance })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn is_finite(&self) -> bool {
        self.mean.iter().chain(self.covariance.iter()).all(|v| v.is_finite())
    }
}

/// `x' = F x + G w`, `z = H x + v`, `w ~ N(0, Q)`, `v ~ N(0, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearGaussianModel {
    pub transition: DMatrix<f64>,
    pub noise_input: DMatrix<f64>,
    pub observation: DMatrix<f64>,
    pub process_noise: DMatrix<f64>,
    pub measurement_noise: DMatrix<f64>,
}

impl LinearGaussianModel {
    pub fn new(
        transition: DMatrix<f64>,
        noise_input: DMatrix<f64>,
        observation: DMatrix<f64>,
        process_noise: DMatrix<f64>,
        measurement_noise: DMatrix<f64>,
    ) -> Result<Self> {
        let n = transition.nrows();
        check_square(&transition, n, "transition matrix")?;
        if noise_input.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: noise_input.nrows(),
                context: "noise-input rows",
            });
        }
        check_square(&process_noise, noise_input.ncols(), "process noise vs noise input")?;
        if observation.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: observation.ncols(),
                context: "observation columns",
            });
        }
        check_square(&measurement_noise, observation.nrows(), "measurement noise")?;
        check_covariance(&process_noise)
            .map_err(|e| Error::InvalidModel(format!("process noise: {e}")))?;
        check_covariance(&measurement_noise)
            .map_err(|e| Error::InvalidModel(format!("measurement noise: {e}")))?;
        Ok(Self {
            transition,
            noise_input,
            observation,
            process_noise,
            measurement_noise,
        })
    }

    pub fn state_dim(&self) -> usize {
        self.transition.nrows()
    }

    pub fn measurement_dim(&self) -> usize {
        self.observation.nrows()
    }

    /// Same dynamics with a different measurement-noise covariance, e.g. the
    /// per-scan covariance of a converted radar measurement.
    pub fn with_measurement_noise(&self, measurement_noise: DMatrix<f64>) -> Result<Self> {
        check_square(&measurement_noise, self.measurement_dim(), "measurement noise")?;
        check_covariance(&measurement_noise)
            .map_err(|e| Error::InvalidModel(format!("measurement noise: {e}")))?;
        Ok(Self {
            measurement_noise,
            ..self.clone()
        })
    }
}

/// By-products of a measurement update.
#[derive(Debug, Clone, PartialEq)]
pub struct InnovationRecord {
    pub residual: DVector<f64>,
    pub innovation_covariance: DMatrix<f64>,
    pub gain: DMatrix<f64>,
    /// `log N(residual; 0, S)`.
    pub log_likelihood: f64,
}

fn check_estimate(est: &StateEstimate, model: &LinearGaussianModel) -> Result<()> {
    if est.dim() != model.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.state_dim(),
            got: est.dim(),
            context: "state estimate vs model",
        });
    }
    Ok(())
}

fn predict_moments(est: &StateEstimate, model: &LinearGaussianModel) -> Result<StateEstimate> {
    check_estimate(est, model)?;
    let f = &model.transition;
    let g = &model.noise_input;
    let mean = f * &est.mean;
    let covariance = f * &est.covariance * f.transpose() + g * &model.process_noise * g.transpose();
    Ok(StateEstimate {
        mean,
        covariance: symmetrize(&covariance),
    })
}

fn update_moments(
    pred: &StateEstimate,
    z: &DVector<f64>,
    model: &LinearGaussianModel,
) -> Result<(StateEstimate, InnovationRecord)> {
    check_estimate(pred, model)?;
    if z.len() != model.measurement_dim() {
        return Err(Error::DimensionMismatch {
            expected: model.measurement_dim(),
            got: z.len(),
            context: "measurement vs model",
        });
    }
    let h = &model.observation;
    let residual = z - h * &pred.mean;
    let ph_t = &pred.covariance * h.transpose();
    let s = symmetrize(&(h * &ph_t + &model.measurement_noise));
    let chol = Cholesky::new(s.clone()).ok_or(Error::DegenerateInnovation)?;
    // W = P Hᵀ S⁻¹ = (S⁻¹ H P)ᵀ
    let gain = chol.solve(&ph_t.transpose()).transpose();
    let mean = &pred.mean + &gain * &residual;
    let covariance = symmetrize(&(&pred.covariance - &gain * &s * gain.transpose()));
    let log_likelihood = log_normal_from_cholesky(&residual, &chol);
    Ok((
        StateEstimate { mean, covariance },
        InnovationRecord {
            residual,
            innovation_covariance: s,
            gain,
            log_likelihood,
        },
    ))
}

fn log_normal_from_cholesky(residual: &DVector<f64>, chol: &Cholesky<f64, Dyn>) -> f64 {
    let m = residual.len() as f64;
    let maha = residual.dot(&chol.solve(residual));
    let log_det: f64 = chol.l_dirty().diagonal().iter().map(|d| 2.0 * d.ln()).sum();
    -0.5 * (maha + log_det + m * (2.0 * PI).ln())
}

/// Multivariate normal log-density `log N(x; μ, Σ)`.
pub fn log_normal_density(
    x: &DVector<f64>,
    mean: &DVector<f64>,
    covariance: &DMatrix<f64>,
) -> Result<f64> {
    let chol = Cholesky::new(covariance.clone()).ok_or(Error::NotPositiveDefinite)?;
    Ok(log_normal_from_cholesky(&(x - mean), &chol))
}

/// Kalman time update.
pub fn kf_predict(est: &StateEstimate, model: &LinearGaussianModel) -> Result<StateEstimate> {
    predict_moments(est, model)
}

/// Kalman measurement update; the covariance uses the `Σ - W S Wᵀ` form.
pub fn kf_update(
    pred: &StateEstimate,
    z: &DVector<f64>,
    model: &LinearGaussianModel,
) -> Result<(StateEstimate, InnovationRecord)> {
    update_moments(pred, z, model)
}

/// Gaussian possibility function `exp(-½ (x-μ)ᵀ Σ⁻¹ (x-μ))`.
pub fn gaussian_possibility(
    x: &DVector<f64>,
    mean: &DVector<f64>,
    covariance: &DMatrix<f64>,
) -> Result<f64> {
    if x.len() != mean.len() {
        return Err(Error::DimensionMismatch {
            expected: mean.len(),
            got: x.len(),
            context: "point vs mean",
        });
    }
    check_square(covariance, mean.len(), "covariance vs mean")?;
    let chol = Cholesky::new(covariance.clone()).ok_or(Error::NotPositiveDefinite)?;
    let d = x - mean;
    Ok((-0.5 * d.dot(&chol.solve(&d))).exp())
}

/// Possibilistic prediction `π(x_k) = sup_{x'} π(x_k | x') π(x')`, returned as
/// the (μ, Σ) of the resulting Gaussian possibility function.
pub fn poss_predict(est: &StateEstimate, model: &LinearGaussianModel) -> Result<StateEstimate> {
    predict_moments(est, model)
}

/// Possibilistic update: product of prior and measurement possibility
/// functions, renormalized by its supremum.
pub fn poss_update(
    pred: &StateEstimate,
    z: &DVector<f64>,
    model: &LinearGaussianModel,
) -> Result<StateEstimate> {
    update_moments(pred, z, model).map(|(est, _)| est)
}

/// Ratio-to-supremum conversion of a sampled density.
pub fn pdf_to_possibility_1d(grid: &[f64], density: &[f64]) -> Result<Vec<f64>> {
    if grid.len() != density.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: density.len(),
            context: "density samples vs grid",
        });
    }
    if let Some(index) = density.iter().position(|d| !(*d >= 0.0) || !d.is_finite()) {
        return Err(Error::WeightOutOfRange {
            index,
            value: density[index],
        });
    }
    let sup = density.iter().copied().fold(0.0, f64::max);
    if sup <= 0.0 {
        return Err(Error::DegenerateEvidence);
    }
    Ok(density.iter().map(|d| d / sup).collect())
}
