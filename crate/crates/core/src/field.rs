//! Complex field phasors at probe points.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::geom::Vec3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// B (T) and E (V/m) phasors at one point; either part may be zero when only
/// one solver was run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldSample {
    pub point: Vec3,
    pub b: [Complex64; 3],
    pub e: [Complex64; 3],
}

impl FieldSample {
    pub fn magnetic(point: Vec3, b: [Complex64; 3]) -> Self {
        Self {
            point,
            b,
            e: [ZERO; 3],
        }
    }

    pub fn electric(point: Vec3, e: [Complex64; 3]) -> Self {
        Self {
            point,
            b: [ZERO; 3],
            e,
        }
    }

    /// Combines the B part of `b` with the E part of `e` (same point).
    pub fn combine(b: &FieldSample, e: &FieldSample) -> Self {
        Self {
            point: b.point,
            b: b.b,
            e: e.e,
        }
    }

    /// `sqrt(Σ|B_c|²)` over the three components.
    pub fn b_magnitude(&self) -> f64 {
        magnitude(&self.b)
    }

    pub fn e_magnitude(&self) -> f64 {
        magnitude(&self.e)
    }
}

pub fn magnitude(v: &[Complex64; 3]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}
