mod common;

use common::*;
use proptest::prelude::*;
use vecsum::coresets::{coreset, fast_coreset, prob_coreset, CoresetParams, Mode, ProbParams};
use vecsum::linalg::{dist_sq, norm_sq};
use vecsum::weighted::{lift, normalize, summarization_error};
use vecsum::{DenseMatrix, SparseWeights, WeightedSet};

/// Squared distance from `t` to the convex hull of at most three planar points,
/// by enumerating vertices, edges and the triangle.
fn hull_dist_sq(pts: &[[f64; 2]], t: [f64; 2]) -> f64 {
    let mut best = f64::INFINITY;
    for p in pts {
        best = best.min(dist_sq(p, &t));
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (a, b) = (pts[i], pts[j]);
            let e = [b[0] - a[0], b[1] - a[1]];
            let ee = norm_sq(&e);
            if ee > 0.0 {
                let s = (((t[0] - a[0]) * e[0] + (t[1] - a[1]) * e[1]) / ee).clamp(0.0, 1.0);
                best = best.min(dist_sq(&[a[0] + s * e[0], a[1] + s * e[1]], &t));
            }
        }
    }
    if pts.len() == 3 {
        let (a, b, c) = (pts[0], pts[1], pts[2]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        if det.abs() > 1e-14 {
            let l1 = ((t[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (t[1] - a[1])) / det;
            let l2 = ((b[0] - a[0]) * (t[1] - a[1]) - (t[0] - a[0]) * (b[1] - a[1])) / det;
            if l1 >= 0.0 && l2 >= 0.0 && l1 + l2 <= 1.0 {
                best = 0.0;
            }
        }
    }
    best
}

/// Summarization error computed with plain loops.
fn direct_error(q: &[[f64; 2]], m: &[f64], u: &SparseWeights) -> f64 {
    let total: f64 = m.iter().sum();
    let mut mu = [0.0; 2];
    for (p, w) in q.iter().zip(m) {
        mu[0] += w * p[0] / total;
        mu[1] += w * p[1] / total;
    }
    let var: f64 = q.iter().zip(m).map(|(p, w)| w / total * dist_sq(p, &mu)).sum();
    let ut = u.total();
    let mut mu_u = [0.0; 2];
    for (i, w) in u.iter() {
        mu_u[0] += w * q[i][0] / ut;
        mu_u[1] += w * q[i][1] / ut;
    }
    dist_sq(&mu, &mu_u) / var
}

#[test]
fn six_point_certificates_agree_with_support_enumeration() {
    let mut rng = rng(17);
    for _ in 0..40 {
        let q: Vec<[f64; 2]> = (0..6).map(|_| [gaussian(&mut rng), gaussian(&mut rng)]).collect();
        let m = lognormal_weights(&mut rng, 6);
        let set = WeightedSet::new(DenseMatrix::from_rows(&q).unwrap(), m.clone()).unwrap();
        let mu = set.weighted_mean();
        let var = set.weighted_variance();
        let target = [mu[0], mu[1]];

        // Some ≤3-point support reaches the mean exactly in the plane.
        let mut best_any = f64::INFINITY;
        for a in 0..6 {
            for b in a..6 {
                for c in b..6 {
                    best_any = best_any.min(hull_dist_sq(&[q[a], q[b], q[c]], target));
                }
            }
        }
        assert!(best_any <= 1e-20);

        for (eps, mode) in [(0.2, Mode::Slow), (0.05, Mode::Slow), (0.2, Mode::Fast)] {
            let u = coreset(&set, CoresetParams::new(eps, mode)).unwrap().weights;
            let err = summarization_error(&set, &u).unwrap();
            let direct = direct_error(&q, &m, &u);
            assert!((err - direct).abs() <= 1e-12 * direct.max(1.0), "{err} vs {direct}");
            let bound = if mode == Mode::Fast { 2.0 * eps } else { eps };
            assert!(err <= bound);
            let support: Vec<[f64; 2]> = u.indices().map(|i| q[i]).collect();
            if support.len() <= 3 {
                assert!(hull_dist_sq(&support, target) / var <= err + 1e-12);
            }
        }
    }
}

#[test]
fn five_hundred_weighted_points() {
    let mut rng = rng(2);
    let set = weighted_gaussian_set(&mut rng, 500, 7);
    let c = coreset(&set, CoresetParams::new(0.1, Mode::Slow)).unwrap();
    assert!(c.weights.nnz() <= 1280);
    assert!(summarization_error(&set, &c.weights).unwrap() <= 0.1);
}

#[test]
fn prob_coreset_of_identical_points_is_exact() {
    let pts = DenseMatrix::from_rows(&[[4.0, -1.0]; 200]).unwrap();
    let set = WeightedSet::uniform(pts.clone());
    let s = prob_coreset(&pts, ProbParams { epsilon: 0.5, delta: 0.2, seed: 1 }).unwrap();
    assert_eq!(s.sample.len(), 8);
    assert_eq!(summarization_error(&set, &s.weights(200)).unwrap(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn normalization_and_lift_identities(seed in any::<u64>(), n in 2usize..80, d in 1usize..6) {
        let mut rng = rng(seed);
        let set = weighted_gaussian_set(&mut rng, n, d);
        let (normalized, transform) = normalize(&set).unwrap();
        let (a, b, c) = normalized.identity_residuals();
        prop_assert!(a <= 1e-9 && b <= 1e-9 && c <= 1e-9);
        prop_assert!(transform.sigma > 0.0);
        let lifted = lift(&normalized);
        let total: f64 = lifted.weights.iter().sum();
        prop_assert!((total - 1.0).abs() <= 1e-9);
        for (i, row) in lifted.points.row_iter().enumerate() {
            let expect = 1.0 / (norm_sq(normalized.points.row(i)) + 1.0);
            prop_assert!((norm_sq(row) - expect).abs() <= 1e-15);
            prop_assert!(norm_sq(row) <= 1.0);
        }
        let full = SparseWeights::from_dense(set.weights());
        prop_assert_eq!(summarization_error(&set, &full).unwrap(), 0.0);
    }

    #[test]
    fn error_is_affine_invariant(seed in any::<u64>(), scale in 0.01f64..100.0, shift in -50.0f64..50.0) {
        let mut rng = rng(seed);
        let set = weighted_gaussian_set(&mut rng, 60, 3);
        let u = coreset(&set, CoresetParams::new(0.2, Mode::Slow)).unwrap().weights;
        let moved = WeightedSet::new(
            DenseMatrix::from_fn(60, 3, |i, j| scale * set.point(i)[j] + shift * (j as f64 + 1.0)),
            set.weights().to_vec(),
        ).unwrap();
        let e0 = summarization_error(&set, &u).unwrap();
        let e1 = summarization_error(&moved, &u).unwrap();
        prop_assert!((e0 - e1).abs() <= 1e-9 * e0.max(1e-3));
    }

    #[test]
    fn slow_mode_bounds(seed in any::<u64>(), eps in 0.05f64..0.9) {
        let mut rng = rng(seed);
        let set = weighted_gaussian_set(&mut rng, 150, 4);
        let a = coreset(&set, CoresetParams::new(eps, Mode::Slow)).unwrap();
        let b = coreset(&set, CoresetParams::new(eps, Mode::Slow)).unwrap();
        prop_assert_eq!(&a.weights, &b.weights);
        prop_assert!(a.weights.nnz() as f64 <= 128.0 / eps);
        prop_assert!(summarization_error(&set, &a.weights).unwrap() <= eps);
        let m = set.total_weight();
        prop_assert!((a.weights.total() - m).abs() <= 2.0 * (eps / 16.0).sqrt() * m);
    }

    #[test]
    fn fast_mode_bounds(seed in any::<u64>(), n in 100usize..3000) {
        let mut rng = rng(seed);
        let pts = ball_points(&mut rng, n, 3);
        let w = simplex(&mut rng, n);
        let eps = 0.3;
        let out = fast_coreset(&pts, &w, eps).unwrap();
        prop_assert!(out.depth <= (n as f64).log2().ceil() as usize);
        prop_assert!(out.weights.nnz() as f64 <= 8.0 / eps);
        prop_assert!(out.residual_sq <= 2.0 * eps);
        prop_assert!((out.weights.total() - 1.0).abs() < 1e-9);
        let again = fast_coreset(&pts, &w, eps).unwrap();
        prop_assert_eq!(out.weights, again.weights);
    }

    #[test]
    fn prob_sample_size_is_exact(seed in any::<u64>(), eps in 0.05f64..0.9) {
        let mut rng = rng(seed);
        let pts = gaussian_matrix(&mut rng, 5000, 2);
        let p = ProbParams { epsilon: eps, delta: 0.2, seed };
        let s = prob_coreset(&pts, p).unwrap();
        prop_assert!(!s.full_input);
        prop_assert_eq!(s.sample.len(), (4.0 / eps).ceil() as usize);
        prop_assert_eq!(&s, &prob_coreset(&pts, p).unwrap());
    }
}
