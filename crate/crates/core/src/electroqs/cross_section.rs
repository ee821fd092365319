//! Capacitance per unit length of a uniform two-conductor cross-section.
//!
//! Conductor outlines are cut into straight segments carrying a uniform
//! line charge. With zero total charge the logarithmic potential is free of
//! its additive constant, so the common offset becomes one more unknown.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use super::kernel::segment_log_integral;
use super::{EqsError, Result, EPS0};
use crate::magnetoqs::cross_section::{Side, Strip};

struct Segment {
    /// Start and end of the segment; exactly one coordinate varies.
    a: (f64, f64),
    b: (f64, f64),
    side: Side,
}

impl Segment {
    fn length(&self) -> f64 {
        ((self.b.0 - self.a.0).powi(2) + (self.b.1 - self.a.1).powi(2)).sqrt()
    }

    fn mid(&self) -> (f64, f64) {
        (0.5 * (self.a.0 + self.b.0), 0.5 * (self.a.1 + self.b.1))
    }

    /// `∫ ln|p − r| dl` over the segment.
    fn log_integral(&self, p: (f64, f64)) -> f64 {
        if self.a.1 == self.b.1 {
            segment_log_integral(
                (self.a.0.min(self.b.0) - p.0, self.a.0.max(self.b.0) - p.0),
                p.1 - self.a.1,
            )
        } else {
            segment_log_integral(
                (self.a.1.min(self.b.1) - p.1, self.a.1.max(self.b.1) - p.1),
                p.0 - self.a.0,
            )
        }
    }
}

fn outline(s: &Strip, max_edge: f64, out: &mut Vec<Segment>) {
    let corners = [(s.y0, s.z0), (s.y1, s.z0), (s.y1, s.z1), (s.y0, s.z1)];
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        let n = (len / max_edge * (1.0 - 1e-9)).ceil().max(1.0) as usize;
        for i in 0..n {
            let (t0, t1) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
            out.push(Segment {
                a: (a.0 + (b.0 - a.0) * t0, a.1 + (b.1 - a.1) * t0),
                b: (a.0 + (b.0 - a.0) * t1, a.1 + (b.1 - a.1) * t1),
                side: s.side,
            });
        }
    }
}

/// Capacitance per unit length (F/m) between the signal and return strips
/// in a homogeneous medium of relative permittivity `eps_r`.
pub fn capacitance_per_length(strips: &[Strip], eps_r: f64, max_edge: f64) -> Result<f64> {
    if !(max_edge > 0.0) {
        return Err(EqsError::InvalidPanelEdge(max_edge));
    }
    if !(eps_r >= 1.0) {
        return Err(EqsError::InvalidPermittivity(eps_r));
    }
    let mut segs = Vec::new();
    for s in strips {
        outline(s, max_edge, &mut segs);
    }
    if !segs.iter().any(|s| s.side == Side::Signal) || !segs.iter().any(|s| s.side == Side::Return)
    {
        return Err(EqsError::NoDrivenNet);
    }
    let n = segs.len();
    let k = -1.0 / (2.0 * PI * EPS0 * eps_r);
    // unknowns: charge per length of each segment, then the common offset
    let mut m = DMatrix::zeros(n + 1, n + 1);
    let mut rhs = DVector::zeros(n + 1);
    for i in 0..n {
        let c = segs[i].mid();
        for j in 0..n {
            m[(i, j)] = k * segs[j].log_integral(c) / segs[j].length();
        }
        m[(i, n)] = -1.0;
        m[(n, i)] = 1.0;
        rhs[i] = if segs[i].side == Side::Signal {
            0.5
        } else {
            -0.5
        };
    }
    let q = m
        .lu()
        .solve(&rhs)
        .ok_or_else(|| EqsError::SingularSystem("cross-section charge system".into()))?;
    Ok((0..n)
        .filter(|&i| segs[i].side == Side::Signal)
        .map(|i| q[i])
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_plate_limit() {
        // wide plates, thin: C' ≈ ε w / d plus fringing
        let (w, d, t) = (100e-6, 1e-6, 0.05e-6);
        let strip = |z0: f64, side| Strip {
            y0: 0.0,
            y1: w,
            z0,
            z1: z0 + t,
            conductivity: 1.0,
            side,
        };
        let c = capacitance_per_length(
            &[strip(0.0, Side::Signal), strip(d + t, Side::Return)],
            1.0,
            0.5e-6,
        )
        .unwrap();
        let ideal = EPS0 * w / d;
        assert!(c > ideal && c < 1.1 * ideal, "{c} vs {ideal}");
    }

    #[test]
    fn two_wire_limit() {
        // thin wires far apart: C' = π ε / ln(d / r_eq), r_eq of a square ≈ 0.59 a
        let (a, d) = (1e-6, 200e-6);
        let sq = |y: f64, side| Strip {
            y0: y,
            y1: y + a,
            z0: 0.0,
            z1: a,
            conductivity: 1.0,
            side,
        };
        let c = capacitance_per_length(&[sq(0.0, Side::Signal), sq(d, Side::Return)], 1.0, a / 8.0)
            .unwrap();
        let want = PI * EPS0 / (d / (0.5902 * a)).ln();
        assert!((c - want).abs() < 5e-3 * want, "{c} vs {want}");
    }
}
