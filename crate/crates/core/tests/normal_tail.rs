//! Two-sided normal tail against an independent series/continued-fraction
//! evaluation, down past p = 1e-20.

mod support;

use support::oracle::normal_two_sided;
use vcnet::aggregate::{two_sided_p, z_test};

#[test]
fn oracle_sanity() {
    // 2·Φ(−1.959963984540054) = 0.05
    assert!((normal_two_sided(1.959963984540054) - 0.05).abs() < 1e-12);
    assert!((normal_two_sided(0.0) - 1.0).abs() < 1e-15);
    // branches agree at the switch point
    let z = 2.0 * std::f64::consts::SQRT_2;
    let below = normal_two_sided(z - 1e-9);
    let above = normal_two_sided(z + 1e-9);
    assert!((below - above).abs() / below < 1e-6);
}

#[test]
fn matches_oracle_to_two_digits_down_to_1e_minus_20() {
    let mut z = 0.0;
    while z <= 12.0 {
        let want = normal_two_sided(z);
        let got = two_sided_p(z);
        assert!(((got - want) / want).abs() < 1e-2, "z={z}: {got} vs {want}");
        z += 0.05;
    }
    assert!(normal_two_sided(9.5) < 1e-20);
}

#[test]
fn matches_oracle_tightly_in_practice_range() {
    for k in 0..=400 {
        let z = k as f64 * 0.025;
        let want = normal_two_sided(z);
        assert!(((two_sided_p(z) - want) / want).abs() < 1e-9, "z={z}");
    }
}

#[test]
fn z_test_null_center() {
    for (sigma, n) in [(0.01, 2), (0.5, 100), (3.0, 5000)] {
        let t = z_test(0.0, sigma, n).unwrap();
        assert_eq!(t.z, 0.0);
        assert_eq!(t.p_value, 1.0);
    }
}
