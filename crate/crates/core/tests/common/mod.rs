//! Oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use chainpoly::{PolyChain, Point3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_point(rng: &mut StdRng) -> Point3 {
    Point3::new(rng.gen(), rng.gen(), rng.gen())
}

/// Open chain with `edges` edges and vertices uniform in the unit cube.
pub fn random_open(rng: &mut StdRng, edges: usize) -> PolyChain {
    PolyChain::open((0..=edges).map(|_| random_point(rng)).collect()).unwrap()
}

pub fn random_closed(rng: &mut StdRng, edges: usize) -> PolyChain {
    PolyChain::closed((0..edges).map(|_| random_point(rng)).collect()).unwrap()
}

pub fn chain(coords: &[[f64; 3]]) -> PolyChain {
    PolyChain::from_coords(coords, false).unwrap()
}

const FIXED: [[f64; 3]; 4] = [[0.0, 1.0, 0.0], [0.0, 0.0, 0.0], [-0.2, 0.8, 0.8], [0.1, 0.8, -0.8]];

fn with_last(last: [f64; 3]) -> PolyChain {
    let mut v = FIXED.to_vec();
    v.push(last);
    chain(&v)
}

/// The three printed frames of the deforming 4-edge chain.
pub fn frame_t0() -> PolyChain {
    with_last([0.76, 0.5, 0.19])
}
pub fn frame_t1() -> PolyChain {
    with_last([0.35, 0.5, 0.37])
}
pub fn frame_t2() -> PolyChain {
    with_last([-0.02, 0.5, 0.39])
}

/// The same chain with the last vertex on its circular path at time `t`
/// (units of 2π/100000).
pub fn frame_at(t: f64) -> PolyChain {
    let th = 32000.0 * PI / 100000.0 + t * 2.0 * PI / 100000.0;
    with_last([0.1 + 1.2 * th.cos(), 0.5, -0.8 + 1.2 * th.sin()])
}

/// 6-edge polygonal trefoils of both handednesses.
pub fn hexagonal_trefoil() -> PolyChain {
    PolyChain::from_coords(
        &[[-0.7, -0.2, -0.5], [0.6, 0.5, 0.0], [-0.7, 0.5, 0.3], [0.2, -0.3, -0.5], [0.9, 0.5, -0.9], [0.2, 0.4, 0.4]],
        true,
    )
    .unwrap()
}
pub fn hexagonal_trefoil_left() -> PolyChain {
    PolyChain::from_coords(
        &[[0.6, 0.3, -0.4], [-0.1, -0.2, 0.2], [0.2, 0.1, -0.5], [-0.2, 0.2, 0.7], [0.5, -0.4, -0.2], [-0.6, 0.9, -0.6]],
        true,
    )
    .unwrap()
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Gauss linking integrand of segments `a0a1`, `b0b1` at parameters `s`, `t`.
fn integrand(a0: Point3, a1: Point3, b0: Point3, b1: Point3, s: f64, t: f64) -> f64 {
    let da = a1 - a0;
    let db = b1 - b0;
    let r = (a0 + da * s) - (b0 + db * t);
    da.cross(db).dot(r) / r.norm().powi(3)
}

/// Adaptive tensor Gauss–Legendre quadrature of the linking integral of two segments.
pub fn quadrature_linking(a: (Point3, Point3), b: (Point3, Point3), tol: f64) -> f64 {
    let gl = gauss_legendre(12);
    let rule = |s0: f64, s1: f64, t0: f64, t1: f64| {
        let (hs, ht) = ((s1 - s0) / 2.0, (t1 - t0) / 2.0);
        let mut sum = 0.0;
        for &(xs, ws) in &gl {
            for &(xt, wt) in &gl {
                let s = s0 + hs * (xs + 1.0);
                let t = t0 + ht * (xt + 1.0);
                sum += ws * wt * integrand(a.0, a.1, b.0, b.1, s, t);
            }
        }
        sum * hs * ht
    };
    fn adapt(rule: &dyn Fn(f64, f64, f64, f64) -> f64, c: [f64; 4], whole: f64, tol: f64, depth: u32) -> f64 {
        let [s0, s1, t0, t1] = c;
        let (sm, tm) = ((s0 + s1) / 2.0, (t0 + t1) / 2.0);
        let quads = [[s0, sm, t0, tm], [sm, s1, t0, tm], [s0, sm, tm, t1], [sm, s1, tm, t1]];
        let parts: Vec<f64> = quads.iter().map(|q| rule(q[0], q[1], q[2], q[3])).collect();
        let split: f64 = parts.iter().sum();
        if (split - whole).abs() < tol || depth > 12 {
            return split;
        }
        quads.iter().zip(&parts).map(|(q, &p)| adapt(rule, *q, p, tol / 4.0, depth + 1)).sum()
    }
    let whole = rule(0.0, 1.0, 0.0, 1.0);
    adapt(&rule, [0.0, 1.0, 0.0, 1.0], whole, tol * 4.0 * PI, 0) / (4.0 * PI)
}

/// Whether the projections of two segments along `xi` cross, by exact 2-D
/// orientation tests in a frame orthogonal to `xi`.
pub fn projected_cross(xi: Point3, a0: Point3, a1: Point3, b0: Point3, b1: Point3) -> bool {
    let u = xi.any_orthogonal();
    let v = xi.cross(u);
    let p = |q: Point3| (q.dot(u), q.dot(v));
    let (a0, a1, b0, b1) = (p(a0), p(a1), p(b0), p(b1));
    let orient = |o: (f64, f64), x: (f64, f64), y: (f64, f64)| (x.0 - o.0) * (y.1 - o.1) - (x.1 - o.1) * (y.0 - o.0);
    let d1 = orient(b0, b1, a0);
    let d2 = orient(b0, b1, a1);
    let d3 = orient(a0, a1, b0);
    let d4 = orient(a0, a1, b1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Uniform direction on the sphere, independent of the library's sampler.
pub fn uniform_direction(rng: &mut StdRng) -> Point3 {
    loop {
        let p = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = p.norm();
        if n > 1e-3 && n <= 1.0 {
            return p / n;
        }
    }
}
