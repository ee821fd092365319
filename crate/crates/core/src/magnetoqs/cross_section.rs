//! Per-unit-length series impedance of a uniform line cross-section.
//!
//! The cross-section is cut into rectangular filaments of infinite length.
//! Mutual terms use the logarithmic kernel averaged exactly over both
//! rectangles; additive constants drop out because the signal and return
//! currents cancel.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{MqsError, Result, MU0};

/// Which side of the loop a conductor belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Signal,
    Return,
}

/// Rectangle `[y0,y1] × [z0,z1]` of a conductor in the transverse plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Strip {
    pub y0: f64,
    pub y1: f64,
    pub z0: f64,
    pub z1: f64,
    pub conductivity: f64,
    pub side: Side,
}

impl Strip {
    pub fn width(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn height(&self) -> f64 {
        self.z1 - self.z0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }
}

/// Fourth antiderivative of `ln sqrt(y² + z²)`: `∂²y ∂²z H = ln ρ`.
fn log_antiderivative(y: f64, z: f64) -> f64 {
    let (y2, z2) = (y * y, z * z);
    let r2 = y2 + z2;
    if r2 == 0.0 {
        return 0.0;
    }
    let l = r2.ln();
    let mut v = (6.0 * y2 * z2 - y2 * y2 - z2 * z2) / 48.0 * l - 25.0 / 48.0 * y2 * z2;
    if y != 0.0 && z != 0.0 {
        v += (y * y2 * z * (z / y).atan() + y * z * z2 * (y / z).atan()) / 6.0;
    }
    v
}

const PAIR_SIGN: [[f64; 2]; 2] = [[-1.0, 1.0], [1.0, -1.0]];

/// `∫∫ ln|r − r'| dA dA'` over two rectangles given as `(y0, y1, z0, z1)`.
pub fn rect_pair_log_integral(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> f64 {
    let ay = [a.0, a.1];
    let az = [a.2, a.3];
    let by = [b.0, b.1];
    let bz = [b.2, b.3];
    let mut sum = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    sum += PAIR_SIGN[i][j]
                        * PAIR_SIGN[k][l]
                        * log_antiderivative(ay[i] - by[j], az[k] - bz[l]);
                }
            }
        }
    }
    sum
}

/// Loop resistance and inductance per unit length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LoopPerLength {
    /// Ω/m
    pub resistance: f64,
    /// H/m
    pub inductance: f64,
    /// Largest over smallest filament current density.
    pub max_current_density_ratio: f64,
}

/// Series loop R′ and L′ of a two-sided cross-section at `frequency`, with
/// every strip cut into `nx × ny` filaments.
pub fn loop_per_length(
    strips: &[Strip],
    nx: usize,
    ny: usize,
    frequency: f64,
) -> Result<LoopPerLength> {
    if nx == 0 || ny == 0 {
        return Err(MqsError::InvalidDiscretization(
            "subdivision counts must be >= 1".into(),
        ));
    }
    if !(frequency >= 0.0) || !frequency.is_finite() {
        return Err(MqsError::InvalidFrequency(frequency));
    }
    if !strips.iter().any(|s| s.side == Side::Signal)
        || !strips.iter().any(|s| s.side == Side::Return)
    {
        return Err(MqsError::SingularSystem(
            "cross-section needs a signal and a return conductor".into(),
        ));
    }
    // filaments in coordinates scaled so that every separation is below 1,
    // which keeps the log kernel positive definite
    let (mut ymin, mut ymax, mut zmin, mut zmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for s in strips {
        if !(s.width() > 0.0 && s.height() > 0.0) {
            return Err(MqsError::InvalidDiscretization(
                "strip with empty cross-section".into(),
            ));
        }
        if !(s.conductivity > 0.0) {
            return Err(MqsError::ZeroConductivity(0));
        }
        ymin = ymin.min(s.y0);
        ymax = ymax.max(s.y1);
        zmin = zmin.min(s.z0);
        zmax = zmax.max(s.z1);
    }
    let scale = 2.0 * ((ymax - ymin).powi(2) + (zmax - zmin).powi(2)).sqrt();
    let mut rects = Vec::new();
    let mut cond = Vec::new();
    let mut side = Vec::new();
    for s in strips {
        let (w, h) = (s.width() / nx as f64, s.height() / ny as f64);
        for i in 0..nx {
            for j in 0..ny {
                let y0 = s.y0 + i as f64 * w;
                let z0 = s.z0 + j as f64 * h;
                rects.push((y0, y0 + w, z0, z0 + h));
                cond.push(s.conductivity);
                side.push(s.side);
            }
        }
    }
    let n = rects.len();
    let scaled = |r: (f64, f64, f64, f64)| {
        (
            (r.0 - ymin) / scale,
            (r.1 - ymin) / scale,
            (r.2 - zmin) / scale,
            (r.3 - zmin) / scale,
        )
    };
    let area = |r: (f64, f64, f64, f64)| (r.1 - r.0) * (r.3 - r.2);
    let mut l = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (a, b) = (scaled(rects[i]), scaled(rects[j]));
            let v = -MU0 / (2.0 * PI) * rect_pair_log_integral(a, b) / (area(a) * area(b));
            l[(i, j)] = v;
            l[(j, i)] = v;
        }
    }
    let w = 2.0 * PI * frequency;
    let z = DMatrix::from_fn(n, n, |i, j| {
        let r = if i == j {
            1.0 / (cond[i] * area(rects[i]))
        } else {
            0.0
        };
        Complex64::new(r, w * l[(i, j)])
    });

    // bordered system: Z I − v_s e_s − v_r e_r = 0, e_sᵀI = 1, e_rᵀI = −1
    let one = Complex64::new(1.0, 0.0);
    let mut m = DMatrix::<Complex64>::zeros(n + 2, n + 2);
    m.view_mut((0, 0), (n, n)).copy_from(&z);
    let mut rhs = DVector::<Complex64>::zeros(n + 2);
    for i in 0..n {
        let col = if side[i] == Side::Signal { n } else { n + 1 };
        m[(i, col)] = -one;
        m[(col, i)] = one;
    }
    rhs[n] = one;
    rhs[n + 1] = -one;
    let sol = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| MqsError::SingularSystem("cross-section system is singular".into()))?;
    let zloop = sol[n] - sol[n + 1];
    let inductance = if w > 0.0 {
        zloop.im / w
    } else {
        let i = DVector::from_iterator(n, (0..n).map(|k| sol[k].re));
        (i.transpose() * &l * &i)[(0, 0)]
    };
    let density: Vec<f64> = (0..n).map(|k| sol[k].norm() / area(rects[k])).collect();
    let (dmin, dmax) = density
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), &d| (a.min(d), b.max(d)));
    Ok(LoopPerLength {
        resistance: zloop.re,
        inductance,
        max_current_density_ratio: if dmin > 0.0 {
            dmax / dmin
        } else {
            f64::INFINITY
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_wire_line_limit() {
        // thin square wires, separation d ≫ size: L' → (μ0/π) ln(d / r_eq),
        // r_eq of a square of side a = 0.4470 a
        let a = 10e-9;
        let d = 5e-6;
        let sq = |y: f64, side: Side| Strip {
            y0: y - a / 2.0,
            y1: y + a / 2.0,
            z0: -a / 2.0,
            z1: a / 2.0,
            conductivity: 5.8e7,
            side,
        };
        let lp = loop_per_length(&[sq(0.0, Side::Signal), sq(d, Side::Return)], 1, 1, 1e9).unwrap();
        let want = MU0 / PI * (d / (0.44705 * a)).ln();
        assert!(
            (lp.inductance - want).abs() < 1e-3 * want,
            "{} vs {}",
            lp.inductance,
            want
        );
        let r = 2.0 / (5.8e7 * a * a);
        assert!((lp.resistance - r).abs() < 1e-9 * r);
    }
}
