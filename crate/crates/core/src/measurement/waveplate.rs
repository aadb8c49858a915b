use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use crate::linalg::c;
use crate::{Error, Real, Result, C};

/// Fast-axis angles of the quarter- and half-wave plates, in degrees.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveplateSetting {
    pub qwp_deg: f64,
    pub hwp_deg: f64,
}

impl WaveplateSetting {
    pub fn new(qwp_deg: f64, hwp_deg: f64) -> Result<Self> {
        if !qwp_deg.is_finite() || !hwp_deg.is_finite() {
            return Err(Error::Invalid(format!(
                "non-finite waveplate angle ({qwp_deg}, {hwp_deg})"
            )));
        }
        Ok(Self { qwp_deg, hwp_deg })
    }

    /// Same physical setting: angles agree modulo 180°.
    pub fn equivalent(&self, other: &Self) -> bool {
        let same = |a: f64, b: f64| {
            let d = (a - b).rem_euclid(180.0);
            d < 1e-9 || 180.0 - d < 1e-9
        };
        same(self.qwp_deg, other.qwp_deg) && same(self.hwp_deg, other.hwp_deg)
    }
}

/// The twelve-setting design: QWP at 0°, 15°, 30°, 45° for each HWP angle
/// 0°, 12.25°, 22.5°, QWP varying fastest.
pub fn standard_settings() -> Vec<WaveplateSetting> {
    let mut out = Vec::with_capacity(12);
    for hwp in [0.0, 12.25, 22.5] {
        for qwp in [0.0, 15.0, 30.0, 45.0] {
            out.push(WaveplateSetting {
                qwp_deg: qwp,
                hwp_deg: hwp,
            });
        }
    }
    out
}

fn rotation(x: f64) -> Matrix2<C<f64>> {
    let (s, co) = x.sin_cos();
    Matrix2::new(c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0))
}

/// Jones matrix `H(h)·Q(q)` with `Q(q) = R(q) diag(1, i) R(−q)` and
/// `H(h) = R(h) diag(1, −1) R(−h)`; the quarter-wave plate acts first.
pub fn waveplate_unitary<T: Real>(setting: &WaveplateSetting) -> Matrix2<C<T>> {
    let q = setting.qwp_deg.to_radians();
    let h = setting.hwp_deg.to_radians();
    let qwp = rotation(q) * Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)) * rotation(-q);
    let hwp = rotation(h) * Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)) * rotation(-h);
    (hwp * qwp).map(|z| C::new(T::lit(z.re), T::lit(z.im)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unitarity_defect(u: &Matrix2<C<f64>>) -> f64 {
        (u.adjoint() * u - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn unitary() {
        for q in [0.0, 13.0, 45.0, 91.7] {
            for h in [0.0, 12.25, 22.5, -33.0] {
                let u = waveplate_unitary::<f64>(&WaveplateSetting { qwp_deg: q, hwp_deg: h });
                assert!(unitarity_defect(&u) < 1e-14);
            }
        }
    }

    #[test]
    fn zero_setting_is_diagonal() {
        let u = waveplate_unitary::<f64>(&WaveplateSetting {
            qwp_deg: 0.0,
            hwp_deg: 0.0,
        });
        assert!((u[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((u[(1, 1)] - c(0.0, -1.0)).norm() < 1e-15);
        assert!(u[(0, 1)].norm() < 1e-15 && u[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn half_wave_at_22_5_makes_diagonal_polarization() {
        let u = waveplate_unitary::<f64>(&WaveplateSetting {
            qwp_deg: 0.0,
            hwp_deg: 22.5,
        });
        let r = 0.5f64.sqrt();
        // image of |H⟩ is the first column
        assert!((u[(0, 0)].norm() - r).abs() < 1e-15);
        assert!((u[(1, 0)].norm() - r).abs() < 1e-15);
        assert!((u[(0, 0)] - u[(1, 0)]).norm() < 1e-15);
    }

    #[test]
    fn quarter_wave_at_45_maps_circular_to_linear() {
        let u = waveplate_unitary::<f64>(&WaveplateSetting {
            qwp_deg: 45.0,
            hwp_deg: 0.0,
        });
        let r = 0.5f64.sqrt();
        for (a, b) in [(c(r, 0.0), c(0.0, r)), (c(r, 0.0), c(0.0, -r))] {
            let out = u * nalgebra::Vector2::new(a, b);
            let big = out[0].norm().max(out[1].norm());
            assert!((big - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn setting_equivalence() {
        let a = WaveplateSetting::new(10.0, 22.5).unwrap();
        assert!(a.equivalent(&WaveplateSetting::new(190.0, -157.5).unwrap()));
        assert!(!a.equivalent(&WaveplateSetting::new(10.0, 22.0).unwrap()));
        assert!(WaveplateSetting::new(f64::NAN, 0.0).is_err());
        assert_eq!(standard_settings().len(), 12);
    }
}
