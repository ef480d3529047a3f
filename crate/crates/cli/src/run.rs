//! `run`: Monte Carlo comparison per (scenario, group).

use std::path::PathBuf;

use anyhow::Result;
use sigmax_sim::{run_monte_carlo, ExperimentGroup, Method, MonteCarloReport};

use crate::config::{config_error, Config};
use crate::output::{aligned_table, csv_bytes, OutputSet};

/// Runs excluded beyond this fraction make `run` exit with code 3.
pub const EXCLUDED_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config: Config,
    pub out: PathBuf,
    pub groups: Vec<u8>,
    pub scenarios: Vec<u8>,
    pub methods: Vec<String>,
    pub seed: Option<u64>,
    pub mc_runs: Option<usize>,
}

#[derive(Debug)]
pub struct RunSummary {
    pub reports: Vec<MonteCarloReport>,
    pub files: Vec<String>,
    pub table: String,
}

impl RunSummary {
    pub fn threshold_exceeded(&self) -> Vec<&MonteCarloReport> {
        self.reports
            .iter()
            .filter(|r| r.excluded_fraction() > EXCLUDED_THRESHOLD)
            .collect()
    }
}

fn selection<T: Clone>(cli: &[T], file: &[T]) -> Vec<T> {
    if cli.is_empty() {
        file.to_vec()
    } else {
        cli.to_vec()
    }
}

pub fn cmd_run(manifest: &RunManifest) -> Result<RunSummary> {
    let cfg = &manifest.config;
    if let Some(v) = cfg.violations().first() {
        return Err(config_error(v.to_string()));
    }
    let scenarios = selection(&manifest.scenarios, &cfg.run.scenarios);
    let groups = selection(&manifest.groups, &cfg.run.groups);
    let method_names = selection(&manifest.methods, &cfg.run.methods);
    let methods: Vec<Method> = method_names
        .iter()
        .map(|m| m.parse().map_err(|_| config_error(format!("--method: unknown method `{m}`"))))
        .collect::<Result<_>>()?;
    let groups: Vec<ExperimentGroup> = groups
        .iter()
        .map(|g| ExperimentGroup::from_number(*g).ok_or_else(|| config_error(format!("--group: unknown group {g}"))))
        .collect::<Result<_>>()?;
    if manifest.mc_runs == Some(0) {
        return Err(config_error("--mc-runs must be at least 1"));
    }
    let settings = cfg.tracker_settings()?;

    let mut reports = Vec::new();
    let mut files = OutputSet::default();
    let mut summary_rows = Vec::new();
    for &index in &scenarios {
        let scenario = cfg.scenario(index, manifest.mc_runs, manifest.seed)?;
        scenario.validate().map_err(|e| config_error(format!("scenario{index}: {e}")))?;
        for &group in &groups {
            let report = run_monte_carlo(&scenario, group, &methods, &settings)?;
            let stem = format!("{}_{}", report.scenario, group);
            files.add(format!("rmse_{stem}.csv"), rmse_csv(&report)?);
            files.add(format!("modes_{stem}.csv"), modes_csv(&report)?);
            files.add(format!("selected_{stem}.csv"), selected_csv(&report)?);
            summary_rows.extend(summary_rows_for(&scenario.phases, &report));
            reports.push(report);
        }
    }
    let table = aligned_table(&SUMMARY_HEADER, &summary_rows);
    files.add("summary.csv", csv_bytes(&SUMMARY_HEADER, &summary_rows)?);
    files.add("summary.txt", table.clone().into_bytes());
    let names = files.names().map(str::to_string).collect();
    files.commit(&manifest.out)?;
    Ok(RunSummary {
        reports,
        files: names,
        table,
    })
}

fn rmse_csv(report: &MonteCarloReport) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (method, r) in &report.methods {
        for k in 0..report.num_samples {
            for (axis, name) in AXES.iter().enumerate() {
                rows.push(vec![
                    (k + 1).to_string(),
                    name.to_string(),
                    method.to_string(),
                    r.rmse[axis][k].to_string(),
                    report.measurement_rmse[axis][k].to_string(),
                ]);
            }
        }
    }
    csv_bytes(&["sample", "axis", "method", "rmse", "measurement_rmse"], &rows)
}

const AXES: [&str; 3] = ["x", "y", "z"];
const MODES: [&str; 2] = ["dwna", "dwpa"];

fn modes_csv(report: &MonteCarloReport) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (method, r) in report.methods.iter().filter(|(m, _)| m.is_multi_model()) {
        for (trace, run) in r.mode_traces.iter().zip(&report.included_runs) {
            for (k, belief) in trace.iter().enumerate() {
                for (mode, b) in belief.iter().enumerate() {
                    rows.push(vec![
                        (k + 1).to_string(),
                        run.to_string(),
                        method.to_string(),
                        MODES[mode].to_string(),
                        b.to_string(),
                    ]);
                }
            }
        }
    }
    csv_bytes(&["sample", "run", "method", "mode", "belief"], &rows)
}

fn selected_csv(report: &MonteCarloReport) -> Result<Vec<u8>> {
    let mut rows = Vec::new();
    for (method, r) in report.methods.iter().filter(|(m, _)| m.is_multi_model()) {
        for (trace, run) in r.selected_traces.iter().zip(&report.included_runs) {
            for (k, mode) in trace.iter().enumerate() {
                rows.push(vec![
                    (k + 1).to_string(),
                    run.to_string(),
                    method.to_string(),
                    MODES[*mode].to_string(),
                ]);
            }
        }
    }
    csv_bytes(&["sample", "run", "method", "mode"], &rows)
}

const SUMMARY_HEADER: [&str; 11] = [
    "scenario",
    "group",
    "method",
    "runs",
    "excluded",
    "mean_cross_time",
    "mean_selected_cross_time",
    "segment",
    "rmse_x",
    "rmse_y",
    "rmse_z",
];

fn summary_rows_for(phases: &[sigmax_sim::Phase], report: &MonteCarloReport) -> Vec<Vec<String>> {
    let mut segments: Vec<(usize, usize)> = phases.iter().map(|p| (p.start, p.end)).collect();
    segments.sort();
    let fmt = |v: f64| format!("{v:.3}");
    let mut out = Vec::new();
    let head = |method: &str, ct: Option<f64>, sct: Option<f64>| {
        vec![
            report.scenario.clone(),
            report.group.number().to_string(),
            method.to_string(),
            report.included_runs.len().to_string(),
            report.excluded_runs.len().to_string(),
            ct.map_or(String::new(), fmt),
            sct.map_or(String::new(), fmt),
        ]
    };
    for &(from, to) in &segments {
        let mut row = head("measurement", None, None);
        row.push(format!("{from}-{to}"));
        row.extend((0..3).map(|a| fmt(sigmax_sim::metrics::window_mean(&report.measurement_rmse[a], from, to))));
        out.push(row);
    }
    for (method, r) in &report.methods {
        let sct = sigmax_sim::metrics::mean_present(&r.selected_cross_times).0;
        for &(from, to) in &segments {
            let mut row = head(method.name(), r.mean_cross_time(), sct);
            row.push(format!("{from}-{to}"));
            row.extend((0..3).map(|a| fmt(r.window_rmse(a, from, to))));
            out.push(row);
        }
    }
    out
}
