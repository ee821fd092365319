mod support;

use esr_core::electroqs::kernel::rect_inverse_distance;
use esr_core::geom::Axis;
use esr_core::magnetoqs::kernel::{box_pair_inverse_distance, parallel_bar_kernel};
use support::oracle;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn hoer_love_volume_integral_matches_quadrature_in_the_near_regime() {
    let near = oracle::random_bar_pairs(11, 40)
        .into_iter()
        .filter(|(a, b)| a.distance(b) < 8.0 * a.scale().min(b.scale()))
        .take(8);
    for (a, b) in near {
        let q = oracle::box_pair_inverse_distance(&a, &b);
        let c = box_pair_inverse_distance(&a, &b);
        assert!(rel(c, q) < 1e-7, "{a:?} {b:?}: {c} vs {q}");
    }
}

#[test]
fn tiered_bar_kernel_matches_quadrature_on_random_pairs() {
    let mut worst: f64 = 0.0;
    for (a, b) in oracle::random_bar_pairs(2024, 20) {
        let areas = a.extent(Axis::Y) * a.extent(Axis::Z) * b.extent(Axis::Y) * b.extent(Axis::Z);
        let q = oracle::box_pair_inverse_distance(&a, &b) / areas;
        let c = parallel_bar_kernel(&a, &b, Axis::X);
        worst = worst.max(rel(c, q));
        assert!(rel(c, q) < 1e-4, "{a:?} {b:?}: {c} vs {q}");
    }
    println!("worst relative error {worst:.2e}");
}

#[test]
fn bar_self_term_matches_quadrature() {
    for (a, _) in oracle::random_bar_pairs(7, 3) {
        let areas = (a.extent(Axis::Y) * a.extent(Axis::Z)).powi(2);
        let q = oracle::box_pair_inverse_distance(&a, &a) / areas;
        let c = parallel_bar_kernel(&a, &a, Axis::X);
        assert!(rel(c, q) < 1e-4, "{a:?}: {c} vs {q}");
    }
}

#[test]
fn panel_kernel_matches_quadrature_on_random_cases() {
    for (u, v, h) in oracle::random_panel_cases(99, 20) {
        let q = oracle::rect_inverse_distance(u, v, h);
        let c = rect_inverse_distance(u, v, h);
        assert!(rel(c, q) < 1e-4, "{u:?} {v:?} {h}: {c} vs {q}");
    }
}
