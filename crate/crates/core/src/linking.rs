//! Gauss linking integral of polygonal chains via Banchoff's finite form,
//! plus writhe and average crossing number.

use crate::chain::PolyChain;
use crate::error::{Error, Result};
use crate::sphere::{quadrangle_area, Quadrilateral};
use crate::vec3::Point3;
use std::f64::consts::PI;

/// Relative threshold on triple products and cross products.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// Minimum separation for two chains to count as disjoint.
pub const TOUCH_TOL: f64 = 1e-12;

/// Sign of `(e_a × e_b)·(a0 - b0)` for segments `a0→a1`, `b0→b1`.
///
/// This is the sign of the Gauss integrand on the pair and equals the sign of
/// the crossing of their projections in every direction where they cross.
/// Returns 0 when the segments are (nearly) coplanar.
pub fn segment_crossing_sign(a0: Point3, a1: Point3, b0: Point3, b1: Point3) -> i8 {
    let ea = a1 - a0;
    let eb = b1 - b0;
    let r = a0 - b0;
    let t = ea.cross(eb).dot(r);
    let scale = ea.norm() * eb.norm() * (r.norm() + (b1 - a0).norm());
    if t.abs() <= DEGENERACY_TOL * scale {
        0
    } else if t > 0.0 {
        1
    } else {
        -1
    }
}

/// Crossing sign of edges `i` and `j` of a chain.
pub fn crossing_sign(chain: &PolyChain, i: usize, j: usize) -> i8 {
    let (a0, a1) = chain.edge(i);
    let (b0, b1) = chain.edge(j);
    segment_crossing_sign(a0, a1, b0, b1)
}

/// Linking integral of two edges, with a flag for degenerate input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeLinking {
    pub value: f64,
    pub degenerate: bool,
}

/// `L(e_a, e_b) = ±Area(Q_ab) / 4π`, signed by [`segment_crossing_sign`].
///
/// Coplanar or touching pairs give 0 with `degenerate` set.
pub fn edge_linking(a: (Point3, Point3), b: (Point3, Point3)) -> EdgeLinking {
    let sign = segment_crossing_sign(a.0, a.1, b.0, b.1);
    if sign == 0 {
        return EdgeLinking { value: 0.0, degenerate: true };
    }
    // orientation-independent magnitude, so reversing either edge negates the value exactly
    let (a, b) = (canonical(a), canonical(b));
    match Quadrilateral::new(a.0, a.1, b.0, b.1) {
        Ok(q) => EdgeLinking {
            value: f64::from(sign) * quadrangle_area(&q) / (4.0 * PI),
            degenerate: false,
        },
        Err(_) => EdgeLinking { value: 0.0, degenerate: true },
    }
}

fn canonical(e: (Point3, Point3)) -> (Point3, Point3) {
    let key = |p: Point3| [p.x, p.y, p.z];
    if key(e.1).partial_cmp(&key(e.0)) == Some(std::cmp::Ordering::Less) {
        (e.1, e.0)
    } else {
        e
    }
}

/// Sum that does not depend on term order and satisfies `f(-x) = -f(x)` bit for bit.
fn symmetric_sum(terms: &mut [f64]) -> f64 {
    terms.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    let pos: f64 = terms.iter().filter(|&&x| x > 0.0).sum();
    let neg: f64 = terms.iter().filter(|&&x| x < 0.0).map(|x| -x).sum();
    pos - neg
}

/// Linking of edges `i` and `j` of one chain.
pub fn chain_edge_linking(chain: &PolyChain, i: usize, j: usize) -> EdgeLinking {
    edge_linking(chain.edge(i), chain.edge(j))
}

/// Closest distance between segments `p0p1` and `q0q1`.
pub fn segment_distance(p0: Point3, p1: Point3, q0: Point3, q1: Point3) -> f64 {
    let d1 = p1 - p0;
    let d2 = q1 - q0;
    let r = p0 - q0;
    let a = d1.dot(d1);
    let e = d2.dot(d2);
    let f = d2.dot(r);
    let c = d1.dot(r);
    let b = d1.dot(d2);
    let denom = a * e - b * b;
    let mut s = if denom > 1e-300 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
    let mut t = (b * s + f) / e;
    if t < 0.0 {
        t = 0.0;
        s = (-c / a).clamp(0.0, 1.0);
    } else if t > 1.0 {
        t = 1.0;
        s = ((b - c) / a).clamp(0.0, 1.0);
    }
    (p0 + d1 * s).distance(q0 + d2 * t)
}

/// `L(E, R) = Σ_i Σ_j L(e_i, r_j)` over all edge pairs of two chains.
pub fn gauss_linking(a: &PolyChain, b: &PolyChain) -> Result<f64> {
    let mut terms = Vec::with_capacity(a.num_edges() * b.num_edges());
    for i in 0..a.num_edges() {
        let ea = a.edge(i);
        for j in 0..b.num_edges() {
            let eb = b.edge(j);
            if segment_distance(ea.0, ea.1, eb.0, eb.1) <= TOUCH_TOL {
                return Err(Error::Degenerate(format!(
                    "edge {i} of the first chain touches edge {j} of the second"
                )));
            }
            terms.push(edge_linking(ea, eb).value);
        }
    }
    Ok(symmetric_sum(&mut terms))
}

/// `Σ_{non-adjacent i<j} 2 L(e_i, e_j)`.
pub fn writhe(chain: &PolyChain) -> f64 {
    chain
        .nonadjacent_pairs()
        .map(|(i, j)| 2.0 * chain_edge_linking(chain, i, j).value)
        .sum()
}

/// `Σ_{non-adjacent i<j} 2 |L(e_i, e_j)|`.
pub fn acn(chain: &PolyChain) -> f64 {
    chain
        .nonadjacent_pairs()
        .map(|(i, j)| 2.0 * chain_edge_linking(chain, i, j).value.abs())
        .sum()
}

/// Writhe and ACN in one pass, with the number of degenerate pairs skipped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfLinking {
    pub writhe: f64,
    pub acn: f64,
    pub degenerate_pairs: usize,
}

pub fn self_linking(chain: &PolyChain) -> SelfLinking {
    let mut out = SelfLinking { writhe: 0.0, acn: 0.0, degenerate_pairs: 0 };
    for (i, j) in chain.nonadjacent_pairs() {
        let l = chain_edge_linking(chain, i, j);
        out.writhe += 2.0 * l.value;
        out.acn += 2.0 * l.value.abs();
        if l.degenerate {
            out.degenerate_pairs += 1;
        }
    }
    out
}
