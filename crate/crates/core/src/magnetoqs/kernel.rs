//! Partial-inductance integrals for axis-parallel rectangular bars.
//!
//! `∫∫ dV dV' / |r − r'|` over two boxes is evaluated with the Hoer–Love
//! closed form for nearby bars and with cross-section Gauss–Legendre
//! averaging of the exact parallel-filament formula otherwise.

use crate::geom::{Aabb, Axis};
use crate::quad::gauss_legendre_on;

/// Sixth antiderivative of `1/r`: `∂²x ∂²y ∂²z F = 1/sqrt(x²+y²+z²)`.
fn hoer_love(x: f64, y: f64, z: f64) -> f64 {
    let (x2, y2, z2) = (x * x, y * y, z * z);
    let r = (x2 + y2 + z2).sqrt();
    if r == 0.0 {
        return 0.0;
    }
    let mut v = r / 60.0 * (x2 * x2 + y2 * y2 + z2 * z2 - 3.0 * (x2 * y2 + y2 * z2 + x2 * z2));
    let xlog = |a: f64, b2: f64, c2: f64| -> f64 {
        let rho = (b2 + c2).sqrt();
        if a == 0.0 || rho == 0.0 {
            0.0
        } else {
            (b2 * c2 / 4.0 - b2 * b2 / 24.0 - c2 * c2 / 24.0) * a * (a / rho).asinh()
        }
    };
    v += xlog(x, y2, z2) + xlog(y, x2, z2) + xlog(z, x2, y2);
    if x != 0.0 && y != 0.0 && z != 0.0 {
        v -= x * y * z * z2 / 6.0 * (x * y / (z * r)).atan();
        v -= x * y * y2 * z / 6.0 * (x * z / (y * r)).atan();
        v -= x * x2 * y * z / 6.0 * (y * z / (x * r)).atan();
    }
    v
}

/// Sign pattern of a double integral over two intervals expressed with a
/// second antiderivative: `∫_a∫_b g(s−t) = Σ c_ij G(a_i − b_j)`.
const PAIR_SIGN: [[f64; 2]; 2] = [[-1.0, 1.0], [1.0, -1.0]];

/// `∫_a ∫_b dV dV' / |r − r'|` over two boxes, closed form (m⁵).
pub fn box_pair_inverse_distance(a: &Aabb, b: &Aabb) -> f64 {
    // shift and scale to O(1) coordinates
    let s = a.scale().max(b.scale());
    let o = a.min;
    let mut d = [[[0.0; 2]; 2]; 3];
    for k in 0..3 {
        let ak = [(a.min[k] - o[k]) / s, (a.max[k] - o[k]) / s];
        let bk = [(b.min[k] - o[k]) / s, (b.max[k] - o[k]) / s];
        for i in 0..2 {
            for j in 0..2 {
                d[k][i][j] = ak[i] - bk[j];
            }
        }
    }
    let mut sum = 0.0;
    for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        for (k, l) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            for (m, n) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let c = PAIR_SIGN[i][j] * PAIR_SIGN[k][l] * PAIR_SIGN[m][n];
                sum += c * hoer_love(d[0][i][j], d[1][k][l], d[2][m][n]);
            }
        }
    }
    sum * s.powi(5)
}

/// Second antiderivative of `1/sqrt(u² + ρ²)` in `u`.
#[inline]
fn filament_antiderivative(u: f64, rho: f64) -> f64 {
    if rho == 0.0 {
        let au = u.abs();
        if au == 0.0 {
            0.0
        } else {
            au * au.ln() - au
        }
    } else {
        u * (u / rho).asinh() - (u * u + rho * rho).sqrt()
    }
}

/// `∫∫ ds dt / sqrt((s−t)² + ρ²)` for two parallel segments `[a0,a1]`,
/// `[b0,b1]` at transverse distance `rho` (m).
pub fn parallel_segments(a: (f64, f64), b: (f64, f64), rho: f64) -> f64 {
    let ai = [a.0, a.1];
    let bj = [b.0, b.1];
    let mut sum = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            sum += PAIR_SIGN[i][j] * filament_antiderivative(ai[i] - bj[j], rho);
        }
    }
    sum
}

/// Cross-section axes of a bar running along `axis`.
pub(crate) fn cross_axes(axis: Axis) -> (Axis, Axis) {
    match axis {
        Axis::X => (Axis::Y, Axis::Z),
        Axis::Y => (Axis::X, Axis::Z),
        Axis::Z => (Axis::X, Axis::Y),
    }
}

/// Gauss–Legendre average over both cross-sections of the filament formula.
fn averaged_filaments(a: &Aabb, b: &Aabb, axis: Axis, order: usize) -> f64 {
    let (p, q) = cross_axes(axis);
    let rule = |bx: &Aabb| {
        let rp = gauss_legendre_on(order, bx.lo(p), bx.hi(p));
        let rq = gauss_legendre_on(order, bx.lo(q), bx.hi(q));
        let mut pts = Vec::with_capacity(order * order);
        for &(u, wu) in &rp {
            for &(v, wv) in &rq {
                pts.push((u, v, wu * wv));
            }
        }
        pts
    };
    let (pa, pb) = (rule(a), rule(b));
    let sa = (a.lo(axis), a.hi(axis));
    let sb = (b.lo(axis), b.hi(axis));
    let mut sum = 0.0;
    for &(u1, v1, w1) in &pa {
        for &(u2, v2, w2) in &pb {
            let rho = ((u1 - u2).powi(2) + (v1 - v2).powi(2)).sqrt();
            sum += w1 * w2 * parallel_segments(sa, sb, rho);
        }
    }
    sum
}

/// Cross-section-averaged `∫∫ dl·dl' / |r − r'|` for two bars along the
/// same axis, i.e. the volume integral divided by both cross-section areas
/// (m). Orientation signs are applied by the caller.
pub fn parallel_bar_kernel(a: &Aabb, b: &Aabb, axis: Axis) -> f64 {
    // evaluate every pair in one canonical order so that K(a,b) == K(b,a) bit for bit
    let key = |x: &Aabb| [x.min[0], x.min[1], x.min[2], x.max[0], x.max[1], x.max[2]];
    let (a, b) = if key(b)
        .iter()
        .zip(key(a).iter())
        .map(|(u, v)| u.total_cmp(v))
        .find(|o| o.is_ne())
        == Some(std::cmp::Ordering::Less)
    {
        (b, a)
    } else {
        (a, b)
    };
    let (p, q) = cross_axes(axis);
    let area_a = a.extent(p) * a.extent(q);
    let area_b = b.extent(p) * b.extent(q);
    let size = [a.extent(p), a.extent(q), b.extent(p), b.extent(q)]
        .into_iter()
        .fold(0.0, f64::max);
    let gap = a.distance(b);
    if gap >= 100.0 * size {
        let (ca, cb) = (a.center(), b.center());
        let rho = ((ca[p.index()] - cb[p.index()]).powi(2)
            + (ca[q.index()] - cb[q.index()]).powi(2))
        .sqrt();
        parallel_segments((a.lo(axis), a.hi(axis)), (b.lo(axis), b.hi(axis)), rho)
    } else if gap >= 8.0 * size {
        averaged_filaments(a, b, axis, 2) / (area_a * area_b)
    } else {
        box_pair_inverse_distance(a, b) / (area_a * area_b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hoer_love_matches_filament_limit_for_thin_bars() {
        // two thin parallel bars far apart compared to their cross-section
        let t = 1e-2;
        let a = Aabb::new(0.0, 1.0, 0.0, t, 0.0, t);
        let b = Aabb::new(0.2, 1.4, 0.5, 0.5 + t, 0.0, t);
        let exact = box_pair_inverse_distance(&a, &b) / (t * t * t * t);
        let fil = parallel_segments((0.0, 1.0), (0.2, 1.4), 0.5);
        assert!((exact - fil).abs() < 1e-4 * fil, "{exact} vs {fil}");
    }

    #[test]
    fn tiers_agree_at_boundaries() {
        let w = 0.1;
        let a = Aabb::new(0.0, 2.0, 0.0, w, 0.0, w);
        for gap in [7.9 * w, 8.1 * w, 99.0 * w, 101.0 * w] {
            let b = Aabb::new(0.3, 1.7, w + gap, 2.0 * w + gap, 0.0, w);
            let tiered = parallel_bar_kernel(&a, &b, Axis::X);
            let exact = box_pair_inverse_distance(&a, &b) / (w.powi(4));
            assert!(
                (tiered - exact).abs() < 2e-5 * exact.abs(),
                "gap {gap}: {tiered} vs {exact}"
            );
        }
    }

    #[test]
    fn coaxial_segments_without_overlap() {
        // ρ = 0 with an axial gap is finite: ∫0^1∫2^3 dsdt/|s−t| = 3ln3 − 4ln2
        let v = parallel_segments((0.0, 1.0), (2.0, 3.0), 0.0);
        let want = 3.0 * 3f64.ln() - 4.0 * 2f64.ln();
        assert!((v - want).abs() < 1e-12);
    }
}
