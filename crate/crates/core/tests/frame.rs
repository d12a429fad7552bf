use curvlab::curvature::{random_curvature, RiemannData};
use curvlab::frame::*;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Sectional 1 on the first `k` indices, flat elsewhere.
fn sphere_times_torus(k: usize, n: usize) -> RiemannData {
    RiemannData::from_sectional(n, |a, b| if a < k && b < k { 1.0 } else { 0.0 })
}

#[test]
fn round_spheres() {
    // m(n-1) - m(m-1)/2 in every frame
    let s5 = RiemannData::constant_curvature(5, 1.0);
    let res = cm_min(&s5, 3, 2000, 1).unwrap();
    assert!((res.value - 9.0).abs() < 1e-9);
    assert!((cm_min_oracle(&s5, 3, 1000, 2).unwrap() - 9.0).abs() < 1e-9);

    let s4 = RiemannData::constant_curvature(4, 1.0);
    assert!((cm_min(&s4, 2, 2000, 1).unwrap().value - 5.0).abs() < 1e-9);
}

#[test]
fn sphere_cross_torus() {
    let r = sphere_times_torus(3, 6);
    let res = cm_min(&r, 4, 5000, 3).unwrap();
    assert!((res.value - 2.0).abs() < 1e-9, "{}", res.value);

    // the minimizing span holds the whole torus and one sphere direction
    let cols = res.argmin.columns();
    let proj = cols * cols.transpose();
    let torus_weight: f64 = (3..6).map(|i| proj[(i, i)]).sum();
    let sphere_weight: f64 = (0..3).map(|i| proj[(i, i)]).sum();
    assert!((torus_weight - 3.0).abs() < 1e-6 && (sphere_weight - 1.0).abs() < 1e-6);

    let oracle = cm_min_oracle(&r, 4, 100_000, 4).unwrap();
    assert!((2.0..=3.0).contains(&oracle), "{oracle}");
    assert!(res.value <= oracle + 1e-9);
}

#[test]
fn flat_torus_is_zero() {
    let r = RiemannData::constant_curvature(4, 0.0);
    for m in 1..=4 {
        assert_eq!(cm_min(&r, m, 500, 5).unwrap().value, 0.0);
    }
}

#[test]
fn coordinate_frames_agree_with_the_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let r = random_curvature(6, 4, &mut rng);
    let f = Frame::coordinate(6, &[1, 3, 4]).unwrap();
    // hand sum over p in {1,3,4}, q after p in the order 1,3,4,0,2,5
    let order = [1, 3, 4, 0, 2, 5];
    let mut want = 0.0;
    for i in 0..3 {
        for j in (i + 1)..6 {
            want += r.sectional(order[i], order[j]);
        }
    }
    assert!((cm_of_frame(&r, &f).unwrap() - want).abs() < 1e-12);
    assert!((cm_double_sum(&r, &f).unwrap() - want).abs() < 1e-12);
}

#[test]
fn bad_parameters() {
    let r = RiemannData::constant_curvature(4, 1.0);
    assert!(cm_min(&r, 0, 100, 1).is_err());
    assert!(cm_min(&r, 5, 100, 1).is_err());
    assert!(cm_min_oracle(&r, 2, 0, 1).is_err());
    assert!(Frame::new(DMatrix::from_element(4, 2, 1.0)).is_err());
}

fn case() -> impl Strategy<Value = (u64, usize, usize)> {
    (0u64..u64::MAX, 3usize..=7).prop_flat_map(|(seed, n)| (Just(seed), Just(n), 1..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rotation_within_span((seed, n, m) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_curvature(n, 3, &mut rng);
        let f = Frame::random(n, m, &mut rng);
        let rot = Frame::random(m, m, &mut rng);
        let g = Frame::new(f.columns() * rot.columns()).unwrap();
        let (a, b) = (cm_of_frame(&r, &f).unwrap(), cm_of_frame(&r, &g).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * (1.0 + r.scale()));
        prop_assert!((a - cm_double_sum(&r, &f).unwrap()).abs() <= 1e-10 * (1.0 + r.scale()));
    }

    #[test]
    fn first_and_last((seed, n, _m) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_curvature(n, 3, &mut rng);
        let ric = DMatrix::from_fn(n, n, |a, b| r.ricci(a, b));
        let lmin = SymmetricEigen::new(ric).eigenvalues.min();
        let c1 = cm_min(&r, 1, 400, seed).unwrap().value;
        prop_assert!((c1 - lmin).abs() <= 1e-8 * (1.0 + r.scale()));
        let f = Frame::random(n, n - 1, &mut rng);
        prop_assert!((2.0 * cm_of_frame(&r, &f).unwrap() - r.scalar()).abs() <= 1e-9 * (1.0 + r.scale()));
    }

    #[test]
    fn search_is_deterministic_and_beats_sampling((seed, n, m) in case()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_curvature(n, 3, &mut rng);
        let a = cm_min(&r, m, 300, seed).unwrap();
        let b = cm_min(&r, m, 300, seed).unwrap();
        prop_assert_eq!(a.value, b.value);
        let oracle = cm_min_oracle(&r, m, 300, seed ^ 1).unwrap();
        prop_assert!(a.value <= oracle + 1e-9 * (1.0 + r.scale()));
        prop_assert!((cm_of_frame(&r, &a.argmin).unwrap() - a.value).abs() <= 1e-9 * (1.0 + r.scale()));
    }
}
