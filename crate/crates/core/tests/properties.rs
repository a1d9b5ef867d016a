use proptest::prelude::*;

use toric_ma::convexfun::{box_grid, grid, legendre, rooftop, Obstacle};
use toric_ma::ma_measure::ma;
use toric_ma::mixedvol::{mixed_area_edge_formula, mixed_volume, volume_polynomial};
use toric_ma::solver::{solve_ma, Atom, DiscreteMeasure};
use toric_ma::{mass_factor, ConvexBody, PLConvexFunction};

fn polygon() -> impl Strategy<Value = ConvexBody> {
    prop::collection::vec((0.0..10.0f64, 0.0..10.0f64), 3..10)
        .prop_map(|pts| {
            let pts: Vec<Vec<f64>> = pts.into_iter().map(|(x, y)| vec![x, y]).collect();
            ConvexBody::new(2, &pts)
        })
        .prop_filter_map("degenerate polygon", |b| b.ok().filter(|b| b.volume() > 0.5))
}

fn direction() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, 2)
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

fn noisy(p: &ConvexBody, nodes: &[Vec<f64>], noise: &[f64]) -> PLConvexFunction {
    let values = nodes.iter().zip(noise).map(|(x, e)| p.support(x).unwrap() + e).collect();
    Obstacle::new(p.clone(), nodes, values).unwrap().envelope()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn support_is_additive(p in polygon(), q in polygon(), x in direction()) {
        let sum = p.minkowski_sum(&q).unwrap();
        let lhs = sum.support(&x).unwrap();
        let rhs = p.support(&x).unwrap() + q.support(&x).unwrap();
        prop_assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
    }

    #[test]
    fn mixed_volume_axioms(p in polygon(), q in polygon(), s in 0.2..4.0f64, t in direction()) {
        let mv = mixed_volume(&[p.clone(), q.clone()]).unwrap();
        let swapped = mixed_volume(&[q.clone(), p.clone()]).unwrap();
        prop_assert!(close(mv, swapped, 1e-9));
        prop_assert!(close(mixed_volume(&[p.clone(), p.clone()]).unwrap(), p.volume(), 1e-9));
        let scaled = mixed_volume(&[p.scale(s).unwrap(), q.clone()]).unwrap();
        prop_assert!(close(scaled, s * mv, 1e-9));
        let moved = mixed_volume(&[p.translate(&t).unwrap(), q.clone()]).unwrap();
        prop_assert!(close(moved, mv, 1e-9));
        let edges = mixed_area_edge_formula(&p, &q).unwrap();
        prop_assert!(close(edges, mv, 1e-9), "{edges} vs {mv}");
        // Minkowski's inequality in the plane
        prop_assert!(mv * mv >= p.volume() * q.volume() * (1.0 - 1e-9));
    }

    #[test]
    fn mixed_volume_is_monotone(p in polygon(), q in polygon(), r in polygon()) {
        let bigger = p.minkowski_sum(&r).unwrap();
        let a = mixed_volume(&[p.clone(), q.clone()]).unwrap();
        let b = mixed_volume(&[bigger, q]).unwrap();
        prop_assert!(b >= a * (1.0 - 1e-9));
    }

    #[test]
    fn volume_polynomial_reproduces_volumes(p in polygon(), q in polygon(), a in 0.0..3.0f64, b in 0.0..3.0f64) {
        prop_assume!(a + b > 0.1);
        let poly = volume_polynomial(&[p.clone(), q.clone()]).unwrap();
        let direct = p.scale(a).unwrap().minkowski_sum(&q.scale(b).unwrap()).unwrap().volume();
        prop_assert!(close(poly.eval(&[a, b]).unwrap(), direct, 1e-9));
    }

    #[test]
    fn support_function_carries_the_full_mass(p in polygon()) {
        let h = PLConvexFunction::support_function(p.clone(), &box_grid(2, 2.0, 1.0).unwrap()).unwrap();
        let m = ma(&h);
        prop_assert!(close(m.total, mass_factor(2) * p.volume(), 1e-12));
        prop_assert_eq!(m.boundary_remainder, 0.0);
    }

    #[test]
    fn mass_ignores_constants(noise in prop::collection::vec(-1.0..1.0f64, 25), c in -10.0..10.0f64) {
        let nodes = box_grid(2, 2.0, 1.0).unwrap();
        let h = noisy(&ConvexBody::unit_cube(2).unwrap(), &nodes, &noise);
        let (a, b) = (ma(&h), ma(&h.shifted(c)));
        for (x, y) in a.masses.iter().zip(&b.masses) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        // every cell of the envelope lies in P, so nothing is lost
        prop_assert!(close(a.total + a.boundary_remainder, 0.5, 1e-12));
    }

    #[test]
    fn envelope_is_monotone_in_the_obstacle(
        noise in prop::collection::vec(-1.0..1.0f64, 13),
        lift in prop::collection::vec(0.0..1.0f64, 13),
    ) {
        let p = ConvexBody::unit_cube(1).unwrap();
        let nodes = grid(&[-3.0], &[3.0], &[13]).unwrap();
        let low = noisy(&p, &nodes, &noise);
        let raised: Vec<f64> = noise.iter().zip(&lift).map(|(a, b)| a + b).collect();
        let high = noisy(&p, &nodes, &raised);
        for (a, b) in low.values().iter().zip(high.values()) {
            prop_assert!(*a <= b + 1e-12);
        }
    }

    #[test]
    fn rooftop_commutes_with_constants(
        u in prop::collection::vec(-1.0..1.0f64, 25),
        v in prop::collection::vec(-1.0..1.0f64, 25),
        c in -5.0..5.0f64,
    ) {
        let p = ConvexBody::unit_cube(2).unwrap();
        let nodes = box_grid(2, 2.0, 1.0).unwrap();
        let (u, v) = (noisy(&p, &nodes, &u), noisy(&p, &nodes, &v));
        let r = rooftop(&u, &v).unwrap();
        let rc = rooftop(&u.shifted(c), &v.shifted(c)).unwrap();
        for (a, b) in r.values().iter().zip(rc.values()) {
            prop_assert!((a + c - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn legendre_of_the_support_function_vanishes_on_the_body(s in 0.0..1.0f64, t in 0.0..1.0f64) {
        let p = ConvexBody::unit_cube(2).unwrap();
        let h = PLConvexFunction::support_function(p, &box_grid(2, 2.0, 1.0).unwrap()).unwrap();
        let conj = legendre(&h, &[vec![s, t], vec![s + 1.5, t]]).unwrap();
        prop_assert!(conj[0].abs() <= 1e-12);
        prop_assert!(conj[1] > 0.0);
    }

    #[test]
    fn legendre_biconjugate_lies_below(noise in prop::collection::vec(-1.0..1.0f64, 25)) {
        let p = ConvexBody::unit_cube(2).unwrap();
        let nodes = box_grid(2, 2.0, 1.0).unwrap();
        let h = noisy(&p, &nodes, &noise);
        let dual = grid(&[0.0, 0.0], &[1.0, 1.0], &[9, 9]).unwrap();
        let conj = legendre(&h, &dual).unwrap();
        for (x, v) in h.nodes().zip(h.values()) {
            let back = dual
                .iter()
                .zip(&conj)
                .map(|(q, c)| q[0] * x[0] + q[1] * x[1] - c)
                .fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(back <= v + 1e-9);
        }
    }
}

fn planar_measure(points: &[(f64, f64)], weights: &[f64]) -> Option<DiscreteMeasure> {
    let sum: f64 = weights.iter().sum();
    let atoms = points
        .iter()
        .zip(weights)
        .map(|(&(x, y), w)| Atom { x: vec![x, y], mass: 0.5 * w / sum })
        .collect();
    DiscreteMeasure::new(atoms).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn solutions_ignore_atom_order_and_conserve_mass(
        points in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 2..8),
        weights in prop::collection::vec(0.5..1.5f64, 8),
    ) {
        let tol = 1e-8;
        let weights = &weights[..points.len()];
        let mu = planar_measure(&points, weights);
        prop_assume!(mu.is_some());
        let p = ConvexBody::unit_cube(2).unwrap();
        let a = solve_ma(&p, &mu.unwrap(), 4.0, tol).unwrap();
        let m = ma(&a.solution);
        prop_assert!(close(m.total + m.boundary_remainder, 0.5, 1e-9));

        let rev_points: Vec<_> = points.iter().rev().copied().collect();
        let rev_weights: Vec<_> = weights.iter().rev().copied().collect();
        let b = solve_ma(&p, &planar_measure(&rev_points, &rev_weights).unwrap(), 4.0, tol).unwrap();
        for (x, v) in a.solution.nodes().zip(a.solution.values()) {
            let w = b.solution.eval(x).unwrap();
            prop_assert!((v - w).abs() <= 2.0 * tol, "{v} vs {w}");
        }
    }
}
