//! Randomized property suites for the cross-module invariants: dimension
//! recurrences, kernel bounds, file round trips, the two independent
//! strength criteria, conservation laws of the weight reduction, trace
//! formulas, Hecke relations, theta coefficients against shell counts,
//! and the neighbor parity rule.

use cubature::constructions::catalog;
use cubature::lattices;
use cubature::markov;
use cubature::modforms;
use cubature::mpoly::{harmonic_projection, MPoly};
use cubature::pointsets::{format_pointset, parse_pointset, AnyPointSet, PointSet};
use cubature::polyspaces::{dim_f, dim_h, dim_p, gegenbauer_q};
use cubature::scalar::{Quad, Scalar};
use cubature::search::{caratheodory_reduce, TargetSpace};
use cubature::verify::{strength_kernel_float, strength_moments, DEFAULT_TOL};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut out: u128 = 1;
    for i in 0..k {
        out = out * (n - i) as u128 / (i + 1) as u128;
    }
    out
}

/// Distinct unit vectors in R^3 from raw triples; discards degenerate
/// draws instead of massaging them.
fn unit_points(raw: &[[f64; 3]]) -> Option<Vec<Vec<f64>>> {
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(raw.len());
    for r in raw {
        let n = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if n < 1e-2 {
            return None;
        }
        pts.push(vec![r[0] / n, r[1] / n, r[2] / n]);
    }
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d2: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
            if d2 < 1e-2 {
                return None;
            }
        }
    }
    Some(pts)
}

fn rodrigues(axis: [f64; 3], angle: f64) -> [[f64; 3]; 3] {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let u = [axis[0] / n, axis[1] / n, axis[2] / n];
    let (s, c) = angle.sin_cos();
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            m[i][j] = c * delta + (1.0 - c) * u[i] * u[j];
        }
    }
    m[0][1] -= s * u[2];
    m[0][2] += s * u[1];
    m[1][0] += s * u[2];
    m[1][2] -= s * u[0];
    m[2][0] -= s * u[1];
    m[2][1] += s * u[0];
    m
}

fn apply(m: &[[f64; 3]; 3], p: &[f64]) -> Vec<f64> {
    (0..3).map(|i| (0..3).map(|j| m[i][j] * p[j]).sum()).collect()
}

proptest! {
    /// dim P = stars and bars; dim F and dim H follow the two-step
    /// recurrences that splitting off one power of |x|^2 gives.
    #[test]
    fn dimension_recurrences(n in 2usize..=8, k in 0usize..=12) {
        let p = dim_p(n, k);
        prop_assert_eq!(p as u128, binomial(n + k - 1, n - 1));
        let f = dim_f(n, k);
        let expect_f = p + if k >= 1 { dim_p(n, k - 1) } else { 0 };
        prop_assert_eq!(f, expect_f);
        let h = dim_h(n, k);
        let expect_h = p - if k >= 2 { dim_p(n, k - 2) } else { 0 };
        prop_assert_eq!(h, expect_h);
    }

    /// The degree-k kernel polynomial peaks at t = 1 on [-1, 1] and is
    /// positive there.
    #[test]
    fn kernel_peaks_at_one(n in 2usize..=6, k in 1usize..=10, t in -1.0f64..=1.0) {
        let q = gegenbauer_q(n, k).unwrap();
        let at_one = q.eval_f64(1.0);
        prop_assert!(at_one > 0.0);
        prop_assert!(q.eval_f64(t).abs() <= at_one * (1.0 + 1e-12) + 1e-12);
    }

    /// Ramanujan tau is multiplicative on coprime arguments.
    #[test]
    fn tau_multiplicative(m in 1usize..=30, n in 1usize..=30) {
        prop_assume!(gcd(m, n) == 1);
        let lhs = modforms::tau(m * n).unwrap();
        let rhs = modforms::tau(m).unwrap() * modforms::tau(n).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Closed-form rotation traces agree with the assembled degree-k
    /// representation matrices.
    #[test]
    fn rotation_trace_formula_agrees(
        axis in [-1.0f64..=1.0, -1.0f64..=1.0, -1.0f64..=1.0],
        angle in 0.05f64..=6.2,
        k in 1usize..=6,
    ) {
        prop_assume!(axis.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        let g = rodrigues(axis, angle);
        let closed = markov::trace_formula(&g, k).unwrap();
        let assembled = markov::rep_matrix(&g, k).unwrap().trace();
        prop_assert!((closed - assembled).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Exact point-set files round-trip through the text format without
    /// losing a digit: the canonical form is a fixed point.
    #[test]
    fn exact_roundtrip_is_identity(
        base in [0i64..=4, 0i64..=4, 0i64..=4],
        wnum in proptest::collection::vec((1i64..=9, 1i64..=9), 6),
    ) {
        let norm2: i64 = base.iter().map(|b| b * b).sum();
        prop_assume!(norm2 > 0);
        // signed permutations of the base vector share one sphere
        let mut pts: Vec<Vec<Quad>> = Vec::new();
        let perms = [[0, 1, 2], [1, 2, 0], [2, 0, 1]];
        for perm in perms {
            for signs in 0..2i64 {
                let sign = 1 - 2 * signs;
                let p: Vec<Quad> =
                    perm.iter().map(|&i| Quad::int(sign * base[i])).collect();
                if !pts.contains(&p) {
                    pts.push(p);
                }
            }
        }
        let weights: Vec<Quad> = wnum
            .iter()
            .take(pts.len())
            .map(|&(p, q)| Quad::ratio(p, q))
            .collect();
        prop_assume!(weights.len() == pts.len());
        let ps = PointSet::new(pts, weights, Quad::int(norm2)).unwrap();
        let text = format_pointset(&AnyPointSet::Exact(ps));
        let back = parse_pointset(&text).unwrap();
        prop_assert_eq!(back.mode(), "exact");
        prop_assert_eq!(format_pointset(&back), text);
    }

    /// Float files round-trip exactly as well: the writer keeps enough
    /// digits to reproduce every f64 bit for bit.
    #[test]
    fn float_roundtrip_is_identity(
        raw in proptest::collection::vec([-1.0f64..=1.0, -1.0f64..=1.0, -1.0f64..=1.0], 4),
        wr in proptest::collection::vec(0.1f64..=1.0, 4),
    ) {
        let Some(pts) = unit_points(&raw) else { return Err(TestCaseError::reject("degenerate")) };
        let ps = PointSet::new(pts, wr, 1.0).unwrap();
        let text = format_pointset(&AnyPointSet::Float(ps));
        let back = parse_pointset(&text).unwrap();
        prop_assert_eq!(back.mode(), "float");
        prop_assert_eq!(format_pointset(&back), text);
    }

    /// The kernel criterion and the moment criterion are independent
    /// routes to the same number.
    #[test]
    fn strength_criteria_agree_on_random_sets(
        raw in proptest::collection::vec([-1.0f64..=1.0, -1.0f64..=1.0, -1.0f64..=1.0], 4..=6),
        wr in proptest::collection::vec(0.2f64..=1.0, 6),
    ) {
        let Some(pts) = unit_points(&raw) else { return Err(TestCaseError::reject("degenerate")) };
        let weights: Vec<f64> = wr.iter().take(pts.len()).copied().collect();
        let ps = PointSet::new(pts, weights, 1.0).unwrap();
        let a = strength_kernel_float(&ps, 4, DEFAULT_TOL).unwrap();
        let b = strength_moments(&ps, 4, DEFAULT_TOL).unwrap();
        prop_assert_eq!(a.max_strength, b.max_strength);
    }

    /// Centrally symmetric sets kill every odd-degree moment, whatever
    /// the weights.
    #[test]
    fn antipodal_sets_kill_odd_moments(
        raw in proptest::collection::vec([-1.0f64..=1.0, -1.0f64..=1.0, -1.0f64..=1.0], 2..=4),
        wr in proptest::collection::vec(0.2f64..=1.0, 4),
    ) {
        let Some(mut pts) = unit_points(&raw) else { return Err(TestCaseError::reject("degenerate")) };
        let half: Vec<f64> = wr.iter().take(pts.len()).copied().collect();
        let mirrored: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|c| -c).collect()).collect();
        pts.extend(mirrored);
        let weights: Vec<f64> = half.iter().chain(half.iter()).copied().collect();
        let Ok(ps) = PointSet::new(pts, weights, 1.0) else {
            return Err(TestCaseError::reject("collision"));
        };
        let report = strength_moments(&ps, 5, DEFAULT_TOL).unwrap();
        prop_assert!(report.max_strength >= 1);
        for (degree, residual) in &report.residuals {
            if degree % 2 == 1 {
                prop_assert!(residual.abs() < 1e-12, "odd degree {degree} residual {residual}");
            }
        }
    }

    /// Harmonic projection lands in the kernel of the Laplacian, exactly,
    /// for any homogeneous input.
    #[test]
    fn harmonic_projection_is_harmonic(
        degree in 2u16..=4,
        picks in proptest::collection::vec((0u16..=4, 0u16..=4, -5i64..=5), 4),
    ) {
        let mut f: MPoly<Quad> = MPoly::zero(3);
        for (a, b, c) in picks {
            if a + b <= degree {
                f.add_term(vec![a, b, degree - a - b], Quad::int(c));
            }
        }
        let h = harmonic_projection(&f, 3);
        prop_assert!(h.laplacian().is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    /// Reducing the union of a design with any rotated copy of itself
    /// conserves the degree-2 integrals and lands within the dimension
    /// bound, with every weight positive.
    #[test]
    fn reduction_conserves_strength_two(
        axis in [-1.0f64..=1.0, -1.0f64..=1.0, -1.0f64..=1.0],
        angle in 0.2f64..=6.0,
    ) {
        prop_assume!(axis.iter().map(|a| a * a).sum::<f64>() > 1e-2);
        let ico = catalog("icosahedron").unwrap().set.to_float();
        let rot = rodrigues(axis, angle);
        let mut pts: Vec<Vec<f64>> = ico.points().to_vec();
        pts.extend(ico.points().iter().map(|p| apply(&rot, p)));
        let mut weights: Vec<f64> = ico.weights().iter().map(|w| w / 2.0).collect();
        weights.extend(weights.clone());
        let Ok(union) = PointSet::new(pts, weights, *ico.radius2()) else {
            return Err(TestCaseError::reject("rotation hit a symmetry"));
        };
        let (reduced, trace) = caratheodory_reduce(&union, TargetSpace::F(2)).unwrap();
        prop_assert!(reduced.len() <= 9);
        prop_assert_eq!(trace.final_size, reduced.len());
        prop_assert!(trace.initial_size == 24);
        prop_assert!(reduced.weights().iter().all(|w| *w > 0.0));
        let drift = trace.moment_drift.iter().copied().fold(0.0f64, f64::max);
        prop_assert!(drift < 1e-10, "moment drift {drift}");
        let after = strength_moments(&reduced, 2, 1e-8).unwrap();
        prop_assert_eq!(after.max_strength, 2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    /// Every nonzero degree-8 harmonic polynomial pairs the rank-8 even
    /// unimodular lattice to the same cusp form: the theta slots stay
    /// proportional to tau(1), tau(2), tau(3), ...
    #[test]
    fn harmonic_theta_is_proportional_to_tau(
        picks in proptest::collection::vec((0u16..=8, 0u16..=4, 0u16..=2, -3i64..=3), 3),
    ) {
        let mut f: MPoly<Quad> = MPoly::zero(8);
        for (i, j, k, c) in picks {
            let a = i.min(8);
            let b = j.min(8 - a);
            let d = k.min(8 - a - b);
            let mut expo = vec![0u16; 8];
            expo[0] = a;
            expo[1] += b;
            expo[2] += d;
            expo[3] += 8 - a - b - d;
            f.add_term(expo, Quad::int(c));
        }
        let h = harmonic_projection(&f, 8);
        prop_assume!(!h.is_zero());
        let e8 = lattices::standard("E8").unwrap();
        let (series, _scale) = modforms::harmonic_theta(&e8, &h, 4).unwrap();
        let s1 = series.coeff(1).clone();
        for m in 2usize..=4 {
            let tau_m = modforms::tau(m).unwrap();
            prop_assert_eq!(
                series.coeff(m).clone(),
                &s1 * &tau_m,
                "slot {} breaks proportionality", m
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Neighbor steps from random norm-4 and norm-8 vectors keep the
    /// internal parity and unimodularity postconditions, and the
    /// equality rule predicts exactly when two steps agree.
    #[test]
    fn neighbor_parity_and_equality(i1 in 0usize..2160, i2 in 0usize..2160) {
        let lat = lattices::standard("E8").unwrap();
        let shell4 = lat.shell(4).unwrap();
        let z1 = &shell4.vectors[i1 % shell4.len()];
        let z2 = &shell4.vectors[i2 % shell4.len()];
        let n1 = lattices::neighbor(&lat, z1).unwrap();
        prop_assert!(!n1.is_even() && n1.is_unimodular());
        prop_assert_eq!(n1.shell(1).unwrap().len(), 16);
        let (observed, predicted) = lattices::neighbor_equality_rule(&lat, z1, z2).unwrap();
        prop_assert_eq!(observed, predicted);
    }
}

#[test]
fn tau_hecke_recursion_at_primes() {
    for p in [2usize, 3, 5, 7, 11, 13] {
        let tp = modforms::tau(p).unwrap();
        let tp2 = modforms::tau(p * p).unwrap();
        let mut p11 = BigInt::from(1);
        for _ in 0..11 {
            p11 *= p as i64;
        }
        assert_eq!(tp2, &tp * &tp - p11, "Hecke recursion fails at p = {p}");
    }
}

#[test]
fn theta_cube_counts_integer_shells() {
    let order = 12;
    let (_, t3, _) = modforms::jacobi_thetas(order);
    for n in 1usize..=5 {
        let series = t3.powu(n as u32).to_grid(1).unwrap();
        let lat = lattices::standard(&format!("Zn({n})")).unwrap();
        let shells = lat.shells_upto(order as i64).unwrap();
        for m in 1..=order {
            let count = shells.get(&(m as i64)).map_or(0, Vec::len);
            assert_eq!(
                series.coeff(m),
                &BigInt::from(count),
                "Z^{n} shell {m} disagrees with theta^{n}"
            );
        }
    }
}

/// A norm-8 vector steps to an even unimodular neighbor with 240 roots
/// exactly when it avoids 2M; the doubled roots are the rejects.
#[test]
fn neighbor_norm_eight_split() {
    let lat = lattices::standard("E8").unwrap();
    let shell8 = lat.shell(8).unwrap();
    let mut accepted = 0usize;
    for z in shell8.vectors.iter().step_by(97) {
        let halved = lat.integer_coords(z, 2 * lat.denominator());
        match lattices::neighbor(&lat, z) {
            Ok(out) => {
                assert!(halved.is_err(), "a vector of 2M was accepted");
                assert!(out.is_even() && out.is_unimodular());
                assert_eq!(out.shell(2).unwrap().len(), 240);
                accepted += 1;
            }
            Err(_) => assert!(halved.is_ok(), "a vector outside 2M was rejected"),
        }
    }
    assert!(accepted > 0, "no norm-8 neighbor steps succeeded");
    let doubled: Vec<i64> = lat.shell(2).unwrap().vectors[0].iter().map(|c| 2 * c).collect();
    assert!(lattices::neighbor(&lat, &doubled).is_err(), "a doubled root lies in 2M");
}
