//! Potential and field of a uniformly charged axis-aligned rectangle.
//!
//! The rectangle spans `[u0,u1] × [v0,v1]` in its own plane; the observation
//! point sits at in-plane `(0, 0)` and height `h` above the plane once the
//! coordinates are shifted, which is what the `u`/`v` bounds express.

/// Antiderivative with `∂u∂v Φ = 1/sqrt(u² + v² + h²)`.
fn potential_antiderivative(u: f64, v: f64, h: f64) -> f64 {
    let r = (u * u + v * v + h * h).sqrt();
    let mut s = 0.0;
    if v != 0.0 {
        s += v * (u / (v * v + h * h).sqrt()).asinh();
    }
    if u != 0.0 {
        s += u * (v / (u * u + h * h).sqrt()).asinh();
    }
    if h != 0.0 && u != 0.0 && v != 0.0 {
        s -= h * (u * v / (h * r)).atan();
    }
    s
}

/// `∫∫ dA / |p − r|` over the rectangle (m).
pub fn rect_inverse_distance(u: (f64, f64), v: (f64, f64), h: f64) -> f64 {
    potential_antiderivative(u.1, v.1, h)
        - potential_antiderivative(u.0, v.1, h)
        - potential_antiderivative(u.1, v.0, h)
        + potential_antiderivative(u.0, v.0, h)
}

/// `asinh(b/c) − asinh(a/c)` that stays finite as `c → 0` when `a`, `b`
/// share a sign.
fn asinh_diff(b: f64, a: f64, c: f64, floor: f64) -> f64 {
    let c = c.max(floor);
    (b / c).asinh() - (a / c).asinh()
}

/// `∫∫ (p − r) / |p − r|³ dA` over the rectangle, returned as
/// `(along u, along v, along the normal)` (dimensionless).
pub fn rect_field(u: (f64, f64), v: (f64, f64), h: f64) -> (f64, f64, f64) {
    let size = (u.1 - u.0).abs().max((v.1 - v.0).abs());
    let floor = 1e-12 * size.max(f64::MIN_POSITIVE);
    // in-plane: ∫dv [1/R] over u, with u = r − p so that −u/R³ integrates to 1/R
    let cu1 = (u.1 * u.1 + h * h).sqrt();
    let cu0 = (u.0 * u.0 + h * h).sqrt();
    let eu = asinh_diff(v.1, v.0, cu1, floor) - asinh_diff(v.1, v.0, cu0, floor);
    let cv1 = (v.1 * v.1 + h * h).sqrt();
    let cv0 = (v.0 * v.0 + h * h).sqrt();
    let ev = asinh_diff(u.1, u.0, cv1, floor) - asinh_diff(u.1, u.0, cv0, floor);
    let corner = |a: f64, b: f64| -> f64 {
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        if h == 0.0 {
            return (a * b).signum() * std::f64::consts::FRAC_PI_2;
        }
        let r = (a * a + b * b + h * h).sqrt();
        (a * b / (h * r)).atan()
    };
    let en = corner(u.1, v.1) - corner(u.0, v.1) - corner(u.1, v.0) + corner(u.0, v.0);
    (eu, ev, en)
}

/// `∫ ln sqrt(u² + h²) du` over `[u0, u1]`.
pub fn segment_log_integral(u: (f64, f64), h: f64) -> f64 {
    let f = |t: f64| -> f64 {
        let r2 = t * t + h * h;
        let mut s = -t;
        if t != 0.0 {
            s += 0.5 * t * r2.ln();
        }
        if h != 0.0 {
            s += h * (t / h).atan();
        }
        s
    };
    f(u.1) - f(u.0)
}
