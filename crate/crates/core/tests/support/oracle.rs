//! Brute-force references for the closed-form kernels: nested adaptive
//! double-exponential quadrature, no analytic antiderivatives.

#![allow(dead_code, clippy::type_complexity)]

use esr_core::geom::Aabb;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const TOL: f64 = 1e-13;

/// `∫ f` over `[a, b]`, split at the interior `breaks`.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64]) -> f64 {
    let mut pts: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|x| *x > a && *x < b))
        .chain(std::iter::once(b))
        .collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.windows(2)
        .map(|w| quadrature::double_exponential::integrate(&f, w[0], w[1], TOL).integral)
        .sum()
}

/// Interval pair `[a0,a1]`, `[b0,b1]` as a distribution of `t − s`: the
/// measure of `{s ∈ a : s + u ∈ b}`, with its range and kinks.
struct Overlap {
    a: (f64, f64),
    b: (f64, f64),
}

impl Overlap {
    fn weight(&self, u: f64) -> f64 {
        (self.a.1.min(self.b.1 - u) - self.a.0.max(self.b.0 - u)).max(0.0)
    }

    fn range(&self) -> (f64, f64) {
        (self.b.0 - self.a.1, self.b.1 - self.a.0)
    }

    fn kinks(&self) -> [f64; 5] {
        [
            self.b.0 - self.a.0,
            self.b.1 - self.a.1,
            self.b.0 - self.a.1,
            self.b.1 - self.a.0,
            0.0,
        ]
    }
}

/// `∫_a ∫_b dV dV' / |r − r'|` by quadrature over the three difference
/// coordinates (m⁵).
pub fn box_pair_inverse_distance(a: &Aabb, b: &Aabb) -> f64 {
    let o: Vec<Overlap> = (0..3)
        .map(|k| Overlap {
            a: (a.min[k], a.max[k]),
            b: (b.min[k], b.max[k]),
        })
        .collect();
    let (r0, r1, r2) = (o[0].range(), o[1].range(), o[2].range());
    integrate(
        |w| {
            let ww = o[2].weight(w);
            if ww == 0.0 {
                return 0.0;
            }
            ww * integrate(
                |v| {
                    let wv = o[1].weight(v);
                    if wv == 0.0 {
                        return 0.0;
                    }
                    wv * integrate(
                        |u| {
                            let r = (u * u + v * v + w * w).sqrt();
                            if r == 0.0 {
                                0.0
                            } else {
                                o[0].weight(u) / r
                            }
                        },
                        r0.0,
                        r0.1,
                        &o[0].kinks(),
                    )
                },
                r1.0,
                r1.1,
                &o[1].kinks(),
            )
        },
        r2.0,
        r2.1,
        &o[2].kinks(),
    )
}

/// `∫∫ dA / sqrt(u² + v² + h²)` over `[u0,u1] × [v0,v1]`.
pub fn rect_inverse_distance(u: (f64, f64), v: (f64, f64), h: f64) -> f64 {
    integrate(
        |y| {
            integrate(
                |x| {
                    let r = (x * x + y * y + h * h).sqrt();
                    if r == 0.0 {
                        0.0
                    } else {
                        1.0 / r
                    }
                },
                u.0,
                u.1,
                &[0.0],
            )
        },
        v.0,
        v.1,
        &[0.0],
    )
}

fn log_uniform(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Non-overlapping pairs of x-directed bars whose spacing spans the near,
/// intermediate and far regimes (lengths in meters, 100 nm scale).
pub fn random_bar_pairs(seed: u64, n: usize) -> Vec<(Aabb, Aabb)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let s = 1e-7;
    (0..n)
        .map(|_| {
            let (wa, ha) = (rng.gen_range(0.2..1.5f64), rng.gen_range(0.2..1.0f64));
            let (wb, hb) = (rng.gen_range(0.2..1.5f64), rng.gen_range(0.2..1.0f64));
            let la = rng.gen_range(1.0..20.0);
            let lb = rng.gen_range(1.0..20.0);
            let xb = rng.gen_range(-lb..la);
            let clear = 0.5 * (wa + wb);
            let dy = clear + log_uniform(&mut rng, 0.02, 300.0) * wa.max(ha).max(wb).max(hb);
            let dz = rng.gen_range(-0.5..0.5);
            let a = Aabb::new(
                0.0,
                la * s,
                -0.5 * wa * s,
                0.5 * wa * s,
                -0.5 * ha * s,
                0.5 * ha * s,
            );
            let b = Aabb::new(
                xb * s,
                (xb + lb) * s,
                (dy - 0.5 * wb) * s,
                (dy + 0.5 * wb) * s,
                (dz - 0.5 * hb) * s,
                (dz + 0.5 * hb) * s,
            );
            (a, b)
        })
        .collect()
}

/// Random rectangles `(u, v)` and heights `h`: observation points inside,
/// beside and above the panel, and panel centers (`h = 0`, origin inside).
pub fn random_panel_cases(seed: u64, n: usize) -> Vec<((f64, f64), (f64, f64), f64)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|k| {
            let (a, b) = (rng.gen_range(0.1..3.0f64), rng.gen_range(0.1..3.0f64));
            match k % 4 {
                // panel center: the collocation self term
                0 => ((-0.5 * a, 0.5 * a), (-0.5 * b, 0.5 * b), 0.0),
                // in-plane point inside the panel, off center
                1 => {
                    let (x, y) = (
                        rng.gen_range(-0.45..0.45) * a,
                        rng.gen_range(-0.45..0.45) * b,
                    );
                    (
                        (-0.5 * a - x, 0.5 * a - x),
                        (-0.5 * b - y, 0.5 * b - y),
                        0.0,
                    )
                }
                // above the panel
                2 => {
                    let (x, y) = (rng.gen_range(-1.0..1.0) * a, rng.gen_range(-1.0..1.0) * b);
                    let h = log_uniform(&mut rng, 0.01, 10.0) * a.max(b);
                    ((-0.5 * a - x, 0.5 * a - x), (-0.5 * b - y, 0.5 * b - y), h)
                }
                // coplanar neighbour
                _ => {
                    let x = 0.5 * a + rng.gen_range(0.05..5.0) * a;
                    ((x - a, x), (-0.5 * b, 0.5 * b), 0.0)
                }
            }
        })
        .collect()
}
