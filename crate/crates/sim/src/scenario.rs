//! Scenario definitions, sensor accuracies and experiment groups.

use serde::{Deserialize, Serialize};

use crate::{Result, SimError};

/// Standard deviations of the three radar channels. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorAccuracy {
    pub sigma_azimuth: f64,
    pub sigma_elevation: f64,
    pub sigma_range: f64,
}

impl SensorAccuracy {
    pub fn from_degrees(sigma_angle_deg: f64, sigma_range: f64) -> Self {
        let a = sigma_angle_deg.to_radians();
        Self {
            sigma_azimuth: a,
            sigma_elevation: a,
            sigma_range,
        }
    }

    /// Short-range fire control radar, nominal accuracy.
    pub fn fire_control() -> Self {
        Self::from_degrees(0.1, 10.0)
    }

    /// Long-range surveillance radar, nominal accuracy.
    pub fn surveillance() -> Self {
        Self::from_degrees(0.9, 100.0)
    }

    /// Every channel scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            sigma_azimuth: self.sigma_azimuth * factor,
            sigma_elevation: self.sigma_elevation * factor,
            sigma_range: self.sigma_range * factor,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.sigma_azimuth, self.sigma_elevation, self.sigma_range];
        if all.iter().all(|s| s.is_finite() && *s > 0.0) {
            Ok(())
        } else {
            Err(SimError::Config(format!(
                "sensor standard deviations must be positive: {all:?}"
            )))
        }
    }
}

/// Deterministic acceleration applied while propagating into samples
/// `start..=end` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Phase {
    pub start: usize,
    pub end: usize,
    pub acceleration: [f64; 3],
}

impl Phase {
    pub fn contains(&self, sample: usize) -> bool {
        (self.start..=self.end).contains(&sample)
    }

    pub fn is_maneuver(&self) -> bool {
        self.acceleration.iter().any(|a| *a != 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: String,
    /// Sampling interval in seconds.
    pub sample_interval: f64,
    pub num_samples: usize,
    /// `[x, vx, ax, y, vy, ay, z, vz, az]` at sample 1.
    pub initial_state: [f64; 9],
    pub phases: Vec<Phase>,
    /// Truth process noise standard deviation (m/s²).
    pub process_noise: f64,
    pub sensor: SensorAccuracy,
    pub mc_runs: usize,
    pub seed: u64,
}

impl ScenarioConfig {
    /// Fire control radar engagement at T = 0.2 s.
    pub fn scenario1() -> Self {
        Self {
            name: "scenario1".into(),
            sample_interval: 0.2,
            num_samples: 200,
            initial_state: [12_000.0, -100.0, 0.0, 8_000.0, -100.0, 0.0, 1_000.0, 0.0, 0.0],
            phases: three_phase(80, 130, 200),
            process_noise: 3.0,
            sensor: SensorAccuracy::fire_control(),
            mc_runs: 100,
            seed: 1,
        }
    }

    /// Surveillance radar track at T = 2 s.
    pub fn scenario2() -> Self {
        Self {
            name: "scenario2".into(),
            sample_interval: 2.0,
            num_samples: 80,
            initial_state: [120_000.0, -100.0, 0.0, 80_000.0, -100.0, 0.0, 20_000.0, 0.0, 0.0],
            phases: three_phase(30, 40, 80),
            process_noise: 3.0,
            sensor: SensorAccuracy::surveillance(),
            mc_runs: 100,
            seed: 2,
        }
    }

    pub fn preset(index: u8) -> Option<Self> {
        match index {
            1 => Some(Self::scenario1()),
            2 => Some(Self::scenario2()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sample_interval.is_finite() && self.sample_interval > 0.0) {
            return Err(SimError::Config("sample_interval must be positive".into()));
        }
        if self.num_samples < 4 {
            return Err(SimError::Config("num_samples must be at least 4".into()));
        }
        if !(self.process_noise.is_finite() && self.process_noise >= 0.0) {
            return Err(SimError::Config("process_noise must be >= 0".into()));
        }
        if self.initial_state.iter().any(|v| !v.is_finite()) {
            return Err(SimError::Config("initial_state must be finite".into()));
        }
        self.sensor.validate()?;
        let mut phases = self.phases.clone();
        phases.sort_by_key(|p| p.start);
        let mut next = 1;
        for p in &phases {
            if p.start != next || p.end < p.start {
                return Err(SimError::Config(format!(
                    "phases must tile samples 1..={} without gaps or overlap; bad phase {}..={}",
                    self.num_samples, p.start, p.end
                )));
            }
            next = p.end + 1;
        }
        if next != self.num_samples + 1 {
            return Err(SimError::Config(format!(
                "phases end at sample {} but the scenario has {} samples",
                next - 1,
                self.num_samples
            )));
        }
        Ok(())
    }

    /// Deterministic acceleration in effect at `sample` (1-based).
    pub fn acceleration_at(&self, sample: usize) -> [f64; 3] {
        self.phases
            .iter()
            .find(|p| p.contains(sample))
            .map(|p| p.acceleration)
            .unwrap_or([0.0; 3])
    }

    /// First sample of the first maneuvering phase.
    pub fn maneuver_start(&self) -> Option<usize> {
        self.phases
            .iter()
            .filter(|p| p.is_maneuver())
            .map(|p| p.start)
            .min()
    }
}

fn three_phase(cruise_end: usize, maneuver_end: usize, total: usize) -> Vec<Phase> {
    vec![
        Phase {
            start: 1,
            end: cruise_end,
            acceleration: [0.0; 3],
        },
        Phase {
            start: cruise_end + 1,
            end: maneuver_end,
            acceleration: [-30.0, -50.0, 0.0],
        },
        Phase {
            start: maneuver_end + 1,
            end: total,
            acceleration: [0.0; 3],
        },
    ]
}

/// Process and measurement noise levels used on one side (data or model).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParameters {
    pub process_noise: f64,
    pub sensor: SensorAccuracy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupParameters {
    /// Used to generate truth and measurements.
    pub data: NoiseParameters,
    /// Used to build the trackers.
    pub model: NoiseParameters,
}

/// Model process noise of the optimistic group (m/s²).
pub const OPTIMISTIC_PROCESS_NOISE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentGroup {
    /// Model parameters equal the data parameters.
    Matched,
    /// Model measurement noise 50% above the data.
    Conservative50,
    /// Model measurement noise 100% above the data.
    Conservative100,
    /// Data noise doubled, model noise nominal and process noise lowered.
    Optimistic,
}

impl ExperimentGroup {
    pub const ALL: [Self; 4] = [
        Self::Matched,
        Self::Conservative50,
        Self::Conservative100,
        Self::Optimistic,
    ];

    pub fn from_number(n: u8) -> Option<Self> {
        Self::ALL.get(usize::from(n).checked_sub(1)?).copied()
    }

    pub fn number(self) -> u8 {
        match self {
            Self::Matched => 1,
            Self::Conservative50 => 2,
            Self::Conservative100 => 3,
            Self::Optimistic => 4,
        }
    }

    /// Data/model noise relative to the scenario's nominal values.
    pub fn parameters(self, scenario: &ScenarioConfig) -> GroupParameters {
        let nominal = NoiseParameters {
            process_noise: scenario.process_noise,
            sensor: scenario.sensor,
        };
        let with_sensor = |factor: f64| NoiseParameters {
            sensor: scenario.sensor.scaled(factor),
            ..nominal
        };
        match self {
            Self::Matched => GroupParameters {
                data: nominal,
                model: nominal,
            },
            Self::Conservative50 => GroupParameters {
                data: nominal,
                model: with_sensor(1.5),
            },
            Self::Conservative100 => GroupParameters {
                data: nominal,
                model: with_sensor(2.0),
            },
            Self::Optimistic => GroupParameters {
                data: with_sensor(2.0),
                model: NoiseParameters {
                    process_noise: OPTIMISTIC_PROCESS_NOISE,
                    sensor: scenario.sensor,
                },
            },
        }
    }
}

impl std::fmt::Display for ExperimentGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "group{}", self.number())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_validate() {
        ScenarioConfig::scenario1().validate().unwrap();
        ScenarioConfig::scenario2().validate().unwrap();
    }

    #[test]
    fn scenario1_schedule() {
        let s = ScenarioConfig::scenario1();
        assert_eq!(s.acceleration_at(80), [0.0; 3]);
        assert_eq!(s.acceleration_at(81), [-30.0, -50.0, 0.0]);
        assert_eq!(s.acceleration_at(130), [-30.0, -50.0, 0.0]);
        assert_eq!(s.acceleration_at(131), [0.0; 3]);
        assert_eq!(s.maneuver_start(), Some(81));
        let accelerating = (1..=200).filter(|&k| s.acceleration_at(k)[0] != 0.0).count();
        assert_eq!(accelerating, 50);
    }

    #[test]
    fn scenario2_schedule() {
        let s = ScenarioConfig::scenario2();
        assert_eq!(s.sample_interval, 2.0);
        assert_eq!(s.initial_state[0], 120_000.0);
        assert_eq!(s.maneuver_start(), Some(31));
        assert_eq!(s.acceleration_at(41), [0.0; 3]);
    }

    #[test]
    fn overlapping_phases_rejected() {
        let mut s = ScenarioConfig::scenario1();
        s.phases[1].start = 70;
        assert!(s.validate().is_err());
        let mut s = ScenarioConfig::scenario1();
        s.phases.pop();
        assert!(s.validate().is_err());
    }

    #[test]
    fn group_parameters() {
        let s = ScenarioConfig::scenario1();
        let g1 = ExperimentGroup::Matched.parameters(&s);
        assert_eq!(g1.data, g1.model);
        let g2 = ExperimentGroup::Conservative50.parameters(&s);
        assert!((g2.model.sensor.sigma_range - 15.0).abs() < 1e-12);
        assert!((g2.model.sensor.sigma_azimuth - 0.15f64.to_radians()).abs() < 1e-15);
        let g3 = ExperimentGroup::Conservative100.parameters(&ScenarioConfig::scenario2());
        assert!((g3.model.sensor.sigma_range - 200.0).abs() < 1e-12);
        assert!((g3.model.sensor.sigma_elevation - 1.8f64.to_radians()).abs() < 1e-15);
        let g4 = ExperimentGroup::Optimistic.parameters(&s);
        assert!((g4.data.sensor.sigma_range - 20.0).abs() < 1e-12);
        assert_eq!(g4.data.process_noise, 3.0);
        assert_eq!(g4.model.process_noise, 1.0);
        assert_eq!(g4.model.sensor, s.sensor);
    }

    #[test]
    fn group_numbers_round_trip() {
        for g in ExperimentGroup::ALL {
            assert_eq!(ExperimentGroup::from_number(g.number()), Some(g));
        }
        assert_eq!(ExperimentGroup::from_number(0), None);
        assert_eq!(ExperimentGroup::from_number(5), None);
    }
}
