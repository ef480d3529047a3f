//! Mode-switching priors and model banks for random and fuzzy jump Markov
//! systems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gaussian::{LinearGaussianModel, StateEstimate};
use crate::uncertainty::{check_row, ConditionalTable, Kind, OutcomeSet, NORMALIZATION_TOL};

fn square_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let m = rows.len();
    if m == 0 {
        return Err(Error::InvalidModel("empty transition matrix".into()));
    }
    for row in rows {
        if row.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: row.len(),
                context: "transition matrix must be square",
            });
        }
        if let Some(index) = row.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::WeightOutOfRange {
                index,
                value: row[index],
            });
        }
    }
    Ok(DMatrix::from_fn(m, m, |i, j| rows[i][j]))
}

fn check_rows(matrix: &DMatrix<f64>, kind: Kind) -> Result<()> {
    for (i, row) in matrix.row_iter().enumerate() {
        let row: Vec<f64> = row.iter().copied().collect();
        check_row(kind, i, &row, NORMALIZATION_TOL)?;
    }
    Ok(())
}

macro_rules! transition_matrix {
    ($name:ident, $kind:expr) => {
        impl $name {
            pub fn new(rows: &[Vec<f64>]) -> Result<Self> {
                let matrix = square_matrix(rows)?;
                check_rows(&matrix, $kind)?;
                Ok(Self(matrix))
            }

            pub fn identity(modes: usize) -> Self {
                Self(DMatrix::identity(modes, modes))
            }

            pub fn modes(&self) -> usize {
                self.0.nrows()
            }

            /// Weight of switching `from → to`.
            pub fn get(&self, from: usize, to: usize) -> f64 {
                self.0[(from, to)]
            }

            pub fn as_matrix(&self) -> &DMatrix<f64> {
                &self.0
            }

            /// The matrix as a conditional table over mode labels.
            pub fn to_table(&self, modes: &OutcomeSet) -> Result<ConditionalTable> {
                let rows = self
                    .0
                    .row_iter()
                    .map(|r| r.iter().copied().collect())
                    .collect();
                ConditionalTable::new(modes.clone(), modes.clone(), rows, $kind)
            }
        }
    };
}

/// Row-stochastic mode transition matrix, `P[i][j] = p(r_k = j | r_{k-1} = i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionProbabilityMatrix(DMatrix<f64>);

/// Row-max-normalized mode transition matrix, `Π[i][j] = π(r_k = j | r_{k-1} = i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionPossibilityMatrix(DMatrix<f64>);

transition_matrix!(TransitionProbabilityMatrix, Kind::Probability);
transition_matrix!(TransitionPossibilityMatrix, Kind::Possibility);

/// Output of [`validate_transition`].
#[derive(Debug, Clone, PartialEq)]
pub enum CheckedTransition {
    Probability(TransitionProbabilityMatrix),
    Possibility(TransitionPossibilityMatrix),
}

/// Validates a square matrix against the row-sum or row-max rule. Errors carry
/// the zero-based index of the first offending row.
pub fn validate_transition(rows: &[Vec<f64>], kind: Kind) -> Result<CheckedTransition> {
    Ok(match kind {
        Kind::Probability => CheckedTransition::Probability(TransitionProbabilityMatrix::new(rows)?),
        Kind::Possibility => CheckedTransition::Possibility(TransitionPossibilityMatrix::new(rows)?),
    })
}

/// Per-axis kinematic layout: `axes` blocks of `[position, velocity, acceleration]`
/// truncated to `order` entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StateLayout {
    pub axes: usize,
    pub order: usize,
}

impl StateLayout {
    pub const MAX_ORDER: usize = 3;

    pub fn new(axes: usize, order: usize) -> Result<Self> {
        if axes == 0 || order == 0 || order > Self::MAX_ORDER {
            return Err(Error::InvalidModel(format!(
                "unsupported layout: {axes} axes of order {order}"
            )));
        }
        Ok(Self { axes, order })
    }

    /// Position/velocity per axis.
    pub const fn velocity(axes: usize) -> Self {
        Self { axes, order: 2 }
    }

    /// Position/velocity/acceleration per axis.
    pub const fn acceleration(axes: usize) -> Self {
        Self { axes, order: 3 }
    }

    pub fn dim(&self) -> usize {
        self.axes * self.order
    }

    pub fn index(&self, axis: usize, derivative: usize) -> usize {
        axis * self.order + derivative
    }

    /// State indices of the position components.
    pub fn position_indices(&self) -> Vec<usize> {
        (0..self.axes).map(|a| self.index(a, 0)).collect()
    }
}

impl std::fmt::Display for StateLayout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}x{} (dim {})", self.axes, self.order, self.dim())
    }
}

/// Maps an estimate between layouts sharing the same axes. Derivatives present
/// in both layouts are copied; derivatives only in `to` get zero mean and
/// variance `inserted_variance`; derivatives only in `from` are dropped.
pub fn embed_state(
    est: &StateEstimate,
    from: StateLayout,
    to: StateLayout,
    inserted_variance: f64,
) -> Result<StateEstimate> {
    let unsupported = || Error::UnsupportedEmbedding {
        from: from.to_string(),
        to: to.to_string(),
    };
    if from.axes != to.axes
        || from.order == 0
        || to.order == 0
        || from.order > StateLayout::MAX_ORDER
        || to.order > StateLayout::MAX_ORDER
    {
        return Err(unsupported());
    }
    if est.dim() != from.dim() {
        return Err(Error::DimensionMismatch {
            expected: from.dim(),
            got: est.dim(),
            context: "estimate vs source layout",
        });
    }
    if from == to {
        return Ok(est.clone());
    }
    let kept = from.order.min(to.order);
    let map: Vec<(usize, usize)> = (0..from.axes)
        .flat_map(|a| (0..kept).map(move |d| (from.index(a, d), to.index(a, d))))
        .collect();
    let mut mean = DVector::zeros(to.dim());
    let mut covariance = DMatrix::zeros(to.dim(), to.dim());
    for &(src_r, dst_r) in &map {
        mean[dst_r] = est.mean[src_r];
        for &(src_c, dst_c) in &map {
            covariance[(dst_r, dst_c)] = est.covariance[(src_r, src_c)];
        }
    }
    for a in 0..to.axes {
        for d in kept..to.order {
            let i = to.index(a, d);
            covariance[(i, i)] = inserted_variance;
        }
    }
    Ok(StateEstimate { mean, covariance })
}

fn kinematic_block(t: f64, order: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let half = 0.5 * t * t;
    match order {
        2 => (
            DMatrix::from_row_slice(2, 2, &[1.0, t, 0.0, 1.0]),
            DMatrix::from_column_slice(2, 1, &[half, t]),
        ),
        3 => (
            DMatrix::from_row_slice(3, 3, &[1.0, t, half, 0.0, 1.0, t, 0.0, 0.0, 1.0]),
            DMatrix::from_column_slice(3, 1, &[half, t, 1.0]),
        ),
        _ => unreachable!("kinematic blocks exist for orders 2 and 3"),
    }
}

fn block_diag(block: &DMatrix<f64>, copies: usize) -> DMatrix<f64> {
    let (r, c) = block.shape();
    let mut out = DMatrix::zeros(r * copies, c * copies);
    for k in 0..copies {
        out.view_mut((k * r, k * c), (r, c)).copy_from(block);
    }
    out
}

fn build_kinematic(t: f64, sigma_w: f64, axes: usize, order: usize) -> Result<LinearGaussianModel> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidModel(format!("sample interval must be >= 0, got {t}")));
    }
    if !(sigma_w >= 0.0) || !sigma_w.is_finite() {
        return Err(Error::InvalidModel(format!("process noise must be >= 0, got {sigma_w}")));
    }
    let (fs, gs) = kinematic_block(t, order);
    let mut hs = DMatrix::zeros(1, order);
    hs[(0, 0)] = 1.0;
    LinearGaussianModel::new(
        block_diag(&fs, axes),
        block_diag(&gs, axes),
        block_diag(&hs, axes),
        DMatrix::identity(axes, axes) * (sigma_w * sigma_w),
        DMatrix::zeros(axes, axes),
    )
}

/// Discrete white noise acceleration (nearly constant velocity) model with
/// `axes` position/velocity blocks. The measurement noise is left at zero and
/// is expected to be supplied per scan.
pub fn build_dwna(t: f64, sigma_w: f64, axes: usize) -> Result<LinearGaussianModel> {
    build_kinematic(t, sigma_w, axes, 2)
}

/// Discrete Wiener process acceleration (nearly constant acceleration) model.
pub fn build_dwpa(t: f64, sigma_w: f64, axes: usize) -> Result<LinearGaussianModel> {
    build_kinematic(t, sigma_w, axes, 3)
}

/// A bank of mode-matched linear-Gaussian models sharing one measurement
/// space. Interaction happens in the `common` layout, the highest-order layout
/// of the bank.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelBank {
    models: Vec<LinearGaussianModel>,
    labels: OutcomeSet,
    layouts: Vec<StateLayout>,
    common: StateLayout,
    inserted_variance: f64,
}

impl ModelBank {
    pub fn new(
        models: Vec<LinearGaussianModel>,
        labels: OutcomeSet,
        layouts: Vec<StateLayout>,
        inserted_variance: f64,
    ) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::InvalidModel("model bank is empty".into()));
        }
        if labels.len() != models.len() || layouts.len() != models.len() {
            return Err(Error::DimensionMismatch {
                expected: models.len(),
                got: labels.len().min(layouts.len()),
                context: "bank labels/layouts vs models",
            });
        }
        let measurement_dim = models[0].measurement_dim();
        for (model, layout) in models.iter().zip(&layouts) {
            if model.measurement_dim() != measurement_dim {
                return Err(Error::DimensionMismatch {
                    expected: measurement_dim,
                    got: model.measurement_dim(),
                    context: "bank measurement dimension",
                });
            }
            if model.state_dim() != layout.dim() {
                return Err(Error::DimensionMismatch {
                    expected: layout.dim(),
                    got: model.state_dim(),
                    context: "model state vs declared layout",
                });
            }
            if layout.axes != layouts[0].axes {
                return Err(Error::InvalidModel("bank layouts must share axes".into()));
            }
        }
        if !(inserted_variance >= 0.0) {
            return Err(Error::InvalidModel("inserted variance must be >= 0".into()));
        }
        let common = *layouts.iter().max_by_key(|l| l.order).expect("non-empty");
        Ok(Self {
            models,
            labels,
            layouts,
            common,
            inserted_variance,
        })
    }

    /// Bank whose models all share one state space (no embedding needed).
    pub fn homogeneous(models: Vec<LinearGaussianModel>, labels: OutcomeSet) -> Result<Self> {
        let dim = models
            .first()
            .map(LinearGaussianModel::state_dim)
            .ok_or_else(|| Error::InvalidModel("model bank is empty".into()))?;
        let layout = StateLayout::new(dim, 1)?;
        let layouts = vec![layout; models.len()];
        Self::new(models, labels, layouts, 0.0)
    }

    /// DWNA/DWPA pair for 3-D tracking. Accelerations inserted when a DWNA
    /// estimate enters the DWPA space get standard deviation
    /// `accel_sigma_factor * sigma_w`.
    pub fn dwna_dwpa(t: f64, sigma_w: f64, accel_sigma_factor: f64) -> Result<Self> {
        let sigma_a = accel_sigma_factor * sigma_w;
        Self::new(
            vec![build_dwna(t, sigma_w, 3)?, build_dwpa(t, sigma_w, 3)?],
            OutcomeSet::new(["dwna", "dwpa"])?,
            vec![StateLayout::velocity(3), StateLayout::acceleration(3)],
            sigma_a * sigma_a,
        )
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn model(&self, j: usize) -> &LinearGaussianModel {
        &self.models[j]
    }

    pub fn models(&self) -> &[LinearGaussianModel] {
        &self.models
    }

    pub fn labels(&self) -> &OutcomeSet {
        &self.labels
    }

    pub fn layout(&self, j: usize) -> StateLayout {
        self.layouts[j]
    }

    pub fn common_layout(&self) -> StateLayout {
        self.common
    }

    pub fn common_dim(&self) -> usize {
        self.common.dim()
    }

    pub fn measurement_dim(&self) -> usize {
        self.models[0].measurement_dim()
    }

    pub fn inserted_variance(&self) -> f64 {
        self.inserted_variance
    }

    /// Lifts model `j`'s estimate into the common layout.
    pub fn to_common(&self, j: usize, est: &StateEstimate) -> Result<StateEstimate> {
        embed_state(est, self.layouts[j], self.common, self.inserted_variance)
    }

    /// Projects a common-layout estimate into model `j`'s layout.
    pub fn from_common(&self, j: usize, est: &StateEstimate) -> Result<StateEstimate> {
        embed_state(est, self.common, self.layouts[j], self.inserted_variance)
    }

    /// Maps model `l`'s estimate into model `j`'s layout via the common layout.
    pub fn transfer(&self, l: usize, j: usize, est: &StateEstimate) -> Result<StateEstimate> {
        if self.layouts[l] == self.layouts[j] {
            return Ok(est.clone());
        }
        self.from_common(j, &self.to_common(l, est)?)
    }

    /// Copy of the bank with every model's measurement noise replaced.
    pub fn with_measurement_noise(&self, measurement_noise: &DMatrix<f64>) -> Result<Self> {
        let models = self
            .models
            .iter()
            .map(|m| m.with_measurement_noise(measurement_noise.clone()))
            .collect::<Result<_>>()?;
        Ok(Self {
            models,
            ..self.clone()
        })
    }
}
