//! Mode-switch timing and error statistics.

/// First sample `k >= switch_sample` (1-based) where the maneuvering mode's
/// belief strictly exceeds the base mode's, refined by linear interpolation of
/// the belief difference against the previous sample. `trace[0]` is sample 1.
pub fn cross_time(trace: &[Vec<f64>], switch_sample: usize, base: usize, maneuver: usize) -> Option<f64> {
    let diff = |k: usize| trace[k - 1][maneuver] - trace[k - 1][base];
    let first = switch_sample.max(1);
    let k = (first..=trace.len()).find(|&k| diff(k) > 0.0)?;
    if k == first {
        return Some(k as f64);
    }
    let (lo, hi) = (diff(k - 1), diff(k));
    Some((k - 1) as f64 + (-lo) / (hi - lo))
}

/// First sample `k >= switch_sample` whose selected mode is `maneuver`.
pub fn selected_cross_time(selected: &[usize], switch_sample: usize, maneuver: usize) -> Option<f64> {
    let first = switch_sample.max(1);
    (first..=selected.len())
        .find(|&k| selected[k - 1] == maneuver)
        .map(|k| k as f64)
}

/// Mean of the values that are present, with the number absent.
pub fn mean_present(values: &[Option<f64>]) -> (Option<f64>, usize) {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let missing = values.len() - present.len();
    if present.is_empty() {
        (None, missing)
    } else {
        (Some(present.iter().sum::<f64>() / present.len() as f64), missing)
    }
}

/// Mean of `values[from-1..to]` for 1-based inclusive sample bounds.
pub fn window_mean(values: &[f64], from: usize, to: usize) -> f64 {
    let slice = &values[from - 1..to.min(values.len())];
    slice.iter().sum::<f64>() / slice.len() as f64
}
