mod common;

use chainpoly::linking::{chain_edge_linking, segment_crossing_sign};
use chainpoly::{acn, crossing_sign, edge_linking, gauss_linking, writhe, PolyChain, Point3};
use common::*;

fn hopf() -> (PolyChain, PolyChain) {
    let a = PolyChain::from_coords(&[[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]], true).unwrap();
    let b = PolyChain::from_coords(&[[0.5, 0.5, -0.5], [0.5, 0.5, 0.5], [1.5, 0.5, 0.5], [1.5, 0.5, -0.5]], true)
        .unwrap();
    (a, b)
}

#[test]
fn banchoff_matches_quadrature() {
    let mut rng = rng(1);
    let mut worst: f64 = 0.0;
    let mut n = 0;
    while n < 100 {
        let (a0, a1, b0, b1) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
        // near-touching pairs make the integrand stiff without exercising anything new
        if chainpoly::linking::segment_distance(a0, a1, b0, b1) < 0.05 {
            continue;
        }
        let l = edge_linking((a0, a1), (b0, b1)).value;
        let q = quadrature_linking((a0, a1), (b0, b1), 1e-10);
        worst = worst.max((l - q).abs());
        n += 1;
    }
    assert!(worst < 1e-6, "worst deviation {worst:e}");
}

#[test]
fn reference_pair_against_quadrature() {
    let a = (Point3::new(0., 0., 0.), Point3::new(1., 0., 0.));
    let b = (Point3::new(0.5, -0.5, 0.5), Point3::new(0.5, 0.5, 0.5));
    let l = edge_linking(a, b).value;
    assert!((l - quadrature_linking(a, b, 1e-12)).abs() < 1e-8);
    // the pair crosses for half of all directions' projections... bounded by 1/2
    assert!(l.abs() <= 0.5);
}

#[test]
fn sign_matches_triple_product_and_linking() {
    let mut rng = rng(2);
    for _ in 0..500 {
        let (a0, a1, b0, b1) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
        let l = edge_linking((a0, a1), (b0, b1)).value;
        let triple = (a1 - a0).cross(b1 - b0).dot(a0 - b0);
        assert_eq!(segment_crossing_sign(a0, a1, b0, b1), triple.signum() as i8);
        assert_eq!(l.signum(), triple.signum());
        assert!(2.0 * l.abs() <= 1.0);
    }
}

#[test]
fn mirror_flips_crossing_sign_and_writhe() {
    let mut rng = rng(3);
    for _ in 0..50 {
        let c = random_open(&mut rng, 5);
        let m = c.mirrored();
        for (i, j) in c.nonadjacent_pairs() {
            assert_eq!(crossing_sign(&c, i, j), -crossing_sign(&m, i, j));
        }
        assert!((writhe(&c) + writhe(&m)).abs() < 1e-12);
    }
}

#[test]
fn coplanar_pair_is_zero() {
    let c = chain(&[[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.], [0.5, -1., 0.]]);
    assert_eq!(crossing_sign(&c, 0, 2), 0);
    assert_eq!(chain_edge_linking(&c, 0, 2).value, 0.0);
    assert_eq!(writhe(&c), 0.0);
    assert_eq!(acn(&c), 0.0);
}

#[test]
fn hopf_link_and_reversal() {
    let (a, b) = hopf();
    let lk = gauss_linking(&a, &b).unwrap();
    assert!((lk.abs() - 1.0).abs() < 1e-9, "{lk}");
    let rev = gauss_linking(&a.reversed(), &b).unwrap();
    assert_eq!(rev, -lk);
    assert_eq!(gauss_linking(&a, &b.reversed()).unwrap(), -lk);
    assert!((gauss_linking(&b, &a).unwrap() - lk).abs() < 1e-12);
}

#[test]
fn far_squares_do_not_link() {
    let (a, _) = hopf();
    let b = a.map_vertices(|p| p * 0.1 + Point3::new(50.0, 0.0, 0.0)).unwrap();
    assert!(gauss_linking(&a, &b).unwrap().abs() < 1e-6);
}

#[test]
fn touching_chains_are_rejected() {
    let (a, _) = hopf();
    let b = PolyChain::from_coords(&[[1., 0., 0.], [2., 0., 0.], [2., 1., 0.]], true).unwrap();
    assert!(gauss_linking(&a, &b).is_err());
}

#[test]
fn closed_linking_is_an_integer_invariant() {
    let (a, b) = hopf();
    let lk = gauss_linking(&a, &b).unwrap();
    let sub = gauss_linking(&a.subdivided(), &b.subdivided().subdivided()).unwrap();
    assert!((sub - lk).abs() < 1e-9);
    // rotate and translate both
    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    let rot = |p: Point3| Point3::new(c * p.x - s * p.y, s * p.x + c * p.y, p.z) + Point3::new(3.0, -2.0, 1.0);
    let moved = gauss_linking(&a.map_vertices(rot).unwrap(), &b.map_vertices(rot).unwrap()).unwrap();
    assert!((moved - lk).abs() < 1e-9);
}

#[test]
fn writhe_of_printed_frame_against_quadrature() {
    let c = frame_t0();
    let q: f64 = c
        .nonadjacent_pairs()
        .map(|(i, j)| 2.0 * quadrature_linking(c.edge(i), c.edge(j), 1e-11))
        .sum();
    assert!((writhe(&c) - q).abs() < 1e-6);
}

#[test]
fn acn_bounds_writhe_and_closed_quadrilateral_identity() {
    let mut rng = rng(4);
    for _ in 0..100 {
        let c = random_open(&mut rng, 6);
        assert!(acn(&c) + 1e-12 >= writhe(&c).abs());
        let q = random_closed(&mut rng, 4);
        let want = 2.0 * chain_edge_linking(&q, 0, 2).value.abs() + 2.0 * chain_edge_linking(&q, 1, 3).value.abs();
        assert!((acn(&q) - want).abs() < 1e-15);
    }
}
