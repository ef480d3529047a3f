//! Radar at the origin: azimuth in the x-y plane from +x, elevation from that plane.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::scenario::SensorAccuracy;
use crate::truth::TruthTrajectory;
use crate::{Result, SimError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarMeasurement {
    pub range: f64,
    pub azimuth: f64,
    pub elevation: f64,
}

impl RadarMeasurement {
    /// Exact spherical coordinates of a position.
    pub fn from_position(p: &Vector3<f64>) -> Result<Self> {
        let ground = p.x.hypot(p.y);
        let range = p.norm();
        if range.is_nan() || range <= 0.0 {
            return Err(SimError::TargetAtOrigin);
        }
        Ok(Self {
            range,
            azimuth: p.y.atan2(p.x),
            elevation: p.z.atan2(ground),
        })
    }

    pub fn to_position(&self) -> Vector3<f64> {
        let (sa, ca) = self.azimuth.sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        Vector3::new(self.range * ce * ca, self.range * ce * sa, self.range * se)
    }
}

/// Maps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let w = (a + PI).rem_euclid(TAU) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// Noisy range/azimuth/elevation for every truth sample.
pub fn simulate_radar<R: Rng + ?Sized>(
    truth: &TruthTrajectory,
    sensor: &SensorAccuracy,
    rng: &mut R,
) -> Result<Vec<RadarMeasurement>> {
    (0..truth.len())
        .map(|k| {
            let exact = RadarMeasurement::from_position(&truth.position(k))?;
            let mut noise = || rng.sample::<f64, _>(StandardNormal);
            let azimuth = wrap_angle(exact.azimuth + sensor.sigma_azimuth * noise());
            let elevation = exact.elevation + sensor.sigma_elevation * noise();
            let range = exact.range + sensor.sigma_range * noise();
            Ok(RadarMeasurement {
                range,
                azimuth,
                elevation,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvertedMeasurement {
    pub position: Vector3<f64>,
    pub covariance: Matrix3<f64>,
}

/// Jacobian of the Cartesian position with respect to `(range, azimuth, elevation)`.
pub fn conversion_jacobian(m: &RadarMeasurement) -> Matrix3<f64> {
    let r = m.range;
    let (sa, ca) = m.azimuth.sin_cos();
    let (se, ce) = m.elevation.sin_cos();
    #[rustfmt::skip]
    let j = Matrix3::new(
        ce * ca, -r * ce * sa, -r * se * ca,
        ce * sa, r * ce * ca, -r * se * sa,
        se, 0.0, r * ce,
    );
    j
}

/// First-order conversion, linearized at the measured values.
pub fn convert_measurement(m: &RadarMeasurement, sensor: &SensorAccuracy) -> ConvertedMeasurement {
    let j = conversion_jacobian(m);
    let spherical = Matrix3::from_diagonal(&Vector3::new(
        sensor.sigma_range.powi(2),
        sensor.sigma_azimuth.powi(2),
        sensor.sigma_elevation.powi(2),
    ));
    let cov = j * spherical * j.transpose();
    ConvertedMeasurement {
        position: m.to_position(),
        covariance: (cov + cov.transpose()) * 0.5,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fire() -> SensorAccuracy {
        SensorAccuracy::fire_control()
    }

    #[test]
    fn axis_point() {
        let m = RadarMeasurement::from_position(&Vector3::new(1000.0, 0.0, 0.0)).unwrap();
        assert_eq!((m.range, m.azimuth, m.elevation), (1000.0, 0.0, 0.0));
        let c = convert_measurement(&m, &fire());
        assert_eq!(c.position, Vector3::new(1000.0, 0.0, 0.0));
        let s = fire();
        let want = Matrix3::from_diagonal(&Vector3::new(
            s.sigma_range.powi(2),
            (1000.0 * s.sigma_azimuth).powi(2),
            (1000.0 * s.sigma_elevation).powi(2),
        ));
        assert!((c.covariance - want).abs().max() < 1e-9);
    }

    #[test]
    fn origin_is_rejected() {
        assert!(matches!(
            RadarMeasurement::from_position(&Vector3::zeros()),
            Err(SimError::TargetAtOrigin)
        ));
    }

    #[test]
    fn round_trip() {
        for p in [
            Vector3::new(12_000.0, 8_000.0, 1_000.0),
            Vector3::new(-3_000.0, 50.0, -200.0),
            Vector3::new(-5.0, -7.0, 3.0),
        ] {
            let back = RadarMeasurement::from_position(&p).unwrap().to_position();
            assert!((back - p).norm() < 1e-9 * p.norm().max(1.0));
        }
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let m = RadarMeasurement {
            range: 14_500.0,
            azimuth: 0.6,
            elevation: 0.07,
        };
        let j = conversion_jacobian(&m);
        let steps = [1e-3, 1e-8, 1e-8];
        for col in 0..3 {
            let mut hi = m;
            let mut lo = m;
            match col {
                0 => {
                    hi.range += steps[0];
                    lo.range -= steps[0];
                }
                1 => {
                    hi.azimuth += steps[1];
                    lo.azimuth -= steps[1];
                }
                _ => {
                    hi.elevation += steps[2];
                    lo.elevation -= steps[2];
                }
            }
            let fd = (hi.to_position() - lo.to_position()) / (2.0 * steps[col]);
            for row in 0..3 {
                let scale = j.column(col).norm();
                assert!((fd[row] - j[(row, col)]).abs() <= 1e-6 * scale, "({row},{col})");
            }
        }
    }

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(PI), PI);
        assert_eq!(wrap_angle(-PI), PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(0.25) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_sensor_is_exact() {
        use crate::scenario::ScenarioConfig;
        use crate::truth::generate_truth;
        use rand::SeedableRng;
        let cfg = ScenarioConfig::scenario1();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(3);
        let truth = generate_truth(&cfg, 0.0, &mut rng);
        let none = SensorAccuracy {
            sigma_azimuth: 0.0,
            sigma_elevation: 0.0,
            sigma_range: 0.0,
        };
        let ms = simulate_radar(&truth, &none, &mut rng).unwrap();
        for (k, m) in ms.iter().enumerate() {
            assert!((m.range - truth.position(k).norm()).abs() < 1e-9);
        }
    }

    #[test]
    fn channel_noise_statistics() {
        use crate::truth::TruthTrajectory;
        use nalgebra::DVector;
        use rand::SeedableRng;
        let n = 100_000;
        let state = DVector::from_row_slice(&[9_000.0, 0.0, 0.0, 4_000.0, 0.0, 0.0, 900.0, 0.0, 0.0]);
        let truth = TruthTrajectory {
            states: vec![state; n],
        };
        let exact = RadarMeasurement::from_position(&truth.position(0)).unwrap();
        let s = fire();
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(11);
        let ms = simulate_radar(&truth, &s, &mut rng).unwrap();
        let std = |f: &dyn Fn(&RadarMeasurement) -> f64| {
            (ms.iter().map(|m| f(m).powi(2)).sum::<f64>() / n as f64).sqrt()
        };
        let sr = std(&|m| m.range - exact.range);
        let sa = std(&|m| m.azimuth - exact.azimuth);
        let se = std(&|m| m.elevation - exact.elevation);
        assert!((sr / s.sigma_range - 1.0).abs() < 0.02);
        assert!((sa / s.sigma_azimuth - 1.0).abs() < 0.02);
        assert!((se / s.sigma_elevation - 1.0).abs() < 0.02);
    }
}
