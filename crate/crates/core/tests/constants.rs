use matcube::constants::{
    abs_chi2_diff_mc, h_functional_mc, quarter_circle_contains, tau_asymptotic_ratio, tau_star, tau_star_closed,
    vertex_values_mc, QuarterCircleQuery,
};
use matcube::linalg::RandomStream;
use num_rational::Ratio;
use proptest::prelude::*;

// Independent oracle: C(2n, n) / 4^n by direct binomial arithmetic.
fn central_binomial_ratio(n: u32) -> f64 {
    let mut c = 1.0f64;
    for k in 0..n {
        c = c * (2 * n - k) as f64 / (k + 1) as f64;
    }
    c / 4f64.powi(n as i32)
}

#[test]
fn closed_form_matches_binomial() {
    for d in 1..=60usize {
        let want = central_binomial_ratio((d / 2) as u32);
        assert!((tau_star(d).unwrap() - want).abs() <= 1e-14 * want, "d={d}");
    }
    assert_eq!(tau_star_closed(8).unwrap(), Ratio::new(35, 128));
}

#[test]
fn asymptotics_approach_one() {
    let r: Vec<f64> = [10, 40, 100].iter().map(|&d| tau_asymptotic_ratio(d).unwrap()).collect();
    assert!(r.windows(2).all(|w| (w[1] - 1.0).abs() <= (w[0] - 1.0).abs()));
}

#[test]
fn balanced_vertex_is_tau() {
    let b = [0.25, 0.25, -0.25, -0.25];
    let e = h_functional_mc(&b, 200_000, &RandomStream::new(1, 0)).unwrap();
    assert!((e.value - 0.375).abs() <= 4.0 * e.stderr);
    assert!(h_functional_mc(&[0.5, 0.2], 10, &RandomStream::new(1, 0)).is_err());
}

#[test]
fn all_positive_vertex_is_one() {
    // k = 0 and k = d are the trivial vertices with H = 1 exactly per sample mean.
    let v = vertex_values_mc(3, 50_000, &RandomStream::new(2, 0)).unwrap();
    assert_eq!(v.len(), 4);
    assert!((v[0].value - v[3].value).abs() < 1e-12);
    assert!((v[0].value - 1.0).abs() < 4.0 * v[0].stderr);
}

#[test]
fn laplace_case() {
    // χ²₂ − χ²₂ is Laplace with scale 2.
    let e = abs_chi2_diff_mc(1, 1, 200_000, &RandomStream::new(3, 0)).unwrap();
    assert!((e.value - 2.0).abs() <= 4.0 * e.stderr);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn tau_even_odd_and_decreasing(n in 1usize..60) {
        prop_assert_eq!(tau_star_closed(2 * n).unwrap(), tau_star_closed(2 * n + 1).unwrap());
        prop_assert!(tau_star_closed(2 * n + 2).unwrap() < tau_star_closed(2 * n).unwrap());
    }

    #[test]
    fn quarter_circle_is_the_unit_ball(s in prop::collection::vec(0.0f64..=1.0, 1..6)) {
        let norm: f64 = s.iter().map(|x| x * x).sum();
        let inside = quarter_circle_contains(&QuarterCircleQuery::new(s).unwrap());
        if norm <= 1.0 - 1e-9 { prop_assert!(inside); }
        if norm >= 1.0 + 1e-9 { prop_assert!(!inside); }
    }

    #[test]
    fn mc_reproducible(seed in any::<u64>()) {
        let r = RandomStream::new(seed, 0);
        prop_assert_eq!(vertex_values_mc(2, 5000, &r).unwrap(), vertex_values_mc(2, 5000, &r).unwrap());
    }
}
