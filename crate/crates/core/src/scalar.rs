//! The floating-point abstraction shared by all numerical modules.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar (`f32` or `f64`) for complex linear algebra.
///
/// Tolerances throughout the crate are written for `f64`; [`Real::tol`]
/// widens them where the type cannot resolve them.
pub trait Real: RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static {
    /// Smallest tolerance this type can meaningfully honour.
    const TOL_FLOOR: f64;

    fn tol(t: f64) -> Self {
        Self::lit(t.max(Self::TOL_FLOOR))
    }

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite value")
    }
}

impl Real for f64 {
    const TOL_FLOOR: f64 = 0.0;
}

impl Real for f32 {
    // 64 ulp around 1.0
    const TOL_FLOOR: f64 = 64.0 * f32::EPSILON as f64;
}
