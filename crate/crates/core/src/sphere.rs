//! Spherical geometry: Banchoff quadrangles, their antipodes, and convex
//! spherical polygons cut out by great circles.
//!
//! A great circle is represented by a unit normal `w`; the closed hemisphere
//! it bounds is `{x : x·w >= 0}`. A polygon given by an ordered list of
//! normals is the intersection of those hemispheres.

use crate::error::{Error, Result};
use crate::vec3::Point3;
use std::f64::consts::PI;

/// Relative threshold below which a cross product is treated as vanishing.
pub const CROSS_TOL: f64 = 1e-12;

/// Half-space membership slack and vertex merge distance.
pub const VERTEX_TOL: f64 = 1e-9;

fn unit_cross(a: Point3, b: Point3, what: &str) -> Result<Point3> {
    let c = a.cross(b);
    let scale = a.norm() * b.norm();
    if !(c.norm() > CROSS_TOL * scale) {
        return Err(Error::Degenerate(format!("vanishing cross product {what}")));
    }
    Ok(c / c.norm())
}

/// The four unit normals of the quadrilateral on edges `(p_i, p_i1)` and `(p_j, p_j1)`.
///
/// With `r_ab = p_a - p_b`:
/// `n1 ∝ r_ij × r_i,j+1`, `n2 ∝ r_i,j+1 × r_i+1,j+1`,
/// `n3 ∝ r_i+1,j+1 × r_i+1,j`, `n4 ∝ r_i+1,j × r_ij`.
pub fn quad_normals(pi: Point3, pi1: Point3, pj: Point3, pj1: Point3) -> Result<[Point3; 4]> {
    let r_ij = pi - pj;
    let r_ij1 = pi - pj1;
    let r_i1j = pi1 - pj;
    let r_i1j1 = pi1 - pj1;
    Ok([
        unit_cross(r_ij, r_ij1, "r_ij x r_i,j+1")?,
        unit_cross(r_ij1, r_i1j1, "r_i,j+1 x r_i+1,j+1")?,
        unit_cross(r_i1j1, r_i1j, "r_i+1,j+1 x r_i+1,j")?,
        unit_cross(r_i1j, r_ij, "r_i+1,j x r_ij")?,
    ])
}

/// The tetrahedral quadrilateral spanned by two edges, with its face normals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrilateral {
    /// `[p_i, p_i+1, p_j, p_j+1]`
    pub vertices: [Point3; 4],
    pub normals: [Point3; 4],
}

impl Quadrilateral {
    pub fn new(pi: Point3, pi1: Point3, pj: Point3, pj1: Point3) -> Result<Self> {
        Ok(Self {
            vertices: [pi, pi1, pj, pj1],
            normals: quad_normals(pi, pi1, pj, pj1)?,
        })
    }

    /// The quadrilateral on `e_i` and the reflected edge
    /// `p_jA = p_i+1 - (p_j - p_i)`, `p_(j+1)A = p_i+1 - (p_j+1 - p_i)`.
    ///
    /// Its normals are `(-n3, -n2, -n1, -n4)` of the original.
    pub fn antipodal(&self) -> Result<Self> {
        let [pi, pi1, pj, pj1] = self.vertices;
        Self::new(pi, pi1, pi1 - (pj - pi), pi1 - (pj1 - pi))
    }

    /// Area of the quadrangle of crossing directions.
    pub fn area(&self) -> f64 {
        quadrangle_area(self)
    }
}

/// `asin(n1·n2) + asin(n2·n3) + asin(n3·n4) + asin(n4·n1)`, clamped to `[0, 2π]`.
pub fn quadrangle_area(quad: &Quadrilateral) -> f64 {
    let n = &quad.normals;
    let s: f64 = (0..4)
        .map(|k| n[k].dot(n[(k + 1) % 4]).clamp(-1.0, 1.0).asin())
        .sum();
    s.clamp(0.0, 2.0 * PI)
}

/// Free-function form of [`Quadrilateral::antipodal`].
pub fn antipodal_quadrilateral(quad: &Quadrilateral) -> Result<Quadrilateral> {
    quad.antipodal()
}

/// A convex region of the unit sphere bounded by great circles.
#[derive(Debug, Clone, PartialEq)]
pub struct SphericalPolygon {
    normals: Vec<Point3>,
    /// Boundary vertices in counterclockwise order seen from outside.
    vertices: Vec<Point3>,
}

impl SphericalPolygon {
    pub fn empty() -> Self {
        Self { normals: Vec::new(), vertices: Vec::new() }
    }

    pub fn normals(&self) -> &[Point3] {
        &self.normals
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 2
    }

    fn is_lune(&self) -> bool {
        self.vertices.len() == 2
    }

    /// Whether `x` lies in every bounding hemisphere (within `tol`).
    pub fn contains(&self, x: Point3, tol: f64) -> bool {
        !self.is_empty() && self.normals.iter().all(|w| w.dot(x) >= -tol)
    }

    /// Whether `x` lies strictly inside, at least `margin` from every bounding circle.
    pub fn contains_strictly(&self, x: Point3, margin: f64) -> bool {
        !self.is_empty() && self.normals.iter().all(|w| w.dot(x) > margin)
    }

    pub fn area(&self) -> f64 {
        spherical_area(self)
    }

    /// A point of the interior (the normalized vertex mean).
    pub fn center(&self) -> Option<Point3> {
        if self.is_empty() {
            return None;
        }
        if self.is_lune() {
            let (a, b) = self.lune_rays()?;
            return (a + b).normalized();
        }
        let mut s = Point3::ZERO;
        for v in &self.vertices {
            s += *v;
        }
        s.normalized()
    }

    /// Deterministic interior points: normalized positive combinations of the vertices.
    pub fn interior_points(&self, count: usize) -> Vec<Point3> {
        let Some(c) = self.center() else { return Vec::new() };
        if self.is_lune() {
            // sweep along the lune's mid-arc
            let v = self.vertices[0];
            return (0..count)
                .map(|s| {
                    let t = (s as f64 + 0.5) / count as f64;
                    let ang = PI * (0.05 + 0.9 * t);
                    (v * ang.cos() + c * ang.sin()).normalized().unwrap_or(c)
                })
                .collect();
        }
        const GEN: [f64; 8] = [
            0.414_213_562_373_095,
            0.732_050_807_568_877,
            0.236_067_977_499_790,
            0.645_751_311_064_591,
            0.316_624_790_355_400,
            0.605_551_275_463_989,
            0.123_105_625_617_661,
            0.358_898_943_540_674,
        ];
        (0..count)
            .map(|s| {
                let mut p = c * 0.05;
                for (k, v) in self.vertices.iter().enumerate() {
                    let w = ((s as f64 + 1.0) * GEN[k % GEN.len()] + k as f64 * 0.1).fract();
                    p += *v * (w * w + 1e-3);
                }
                p.normalized().unwrap_or(c)
            })
            .collect()
    }

    /// Boundary rays of a lune, as tangent directions at its first vertex.
    fn lune_rays(&self) -> Option<(Point3, Point3)> {
        lune_wedge(self.vertices[0], &self.normals)
    }
}

/// Tangent directions at `v` bounding the wedge `{d ⊥ v : d·w >= 0 ∀ w}`,
/// when every great circle passes through `v`.
fn lune_wedge(v: Point3, normals: &[Point3]) -> Option<(Point3, Point3)> {
    let mut rays: Vec<Point3> = Vec::new();
    for w in normals {
        let Some(d) = v.cross(*w).normalized() else { continue };
        for cand in [d, -d] {
            if normals.iter().all(|m| m.dot(cand) >= -VERTEX_TOL)
                && rays.iter().all(|r| r.distance(cand) > VERTEX_TOL)
            {
                rays.push(cand);
            }
        }
    }
    let mut best: Option<(Point3, Point3, f64)> = None;
    for a in 0..rays.len() {
        for b in a + 1..rays.len() {
            let ang = rays[a].dot(rays[b]).clamp(-1.0, 1.0).acos();
            if best.map_or(true, |(_, _, x)| ang > x) {
                best = Some((rays[a], rays[b], ang));
            }
        }
    }
    best.filter(|&(_, _, ang)| ang > VERTEX_TOL).map(|(a, b, _)| (a, b))
}

/// The region `∩ {x : x·w >= 0}` for the given great-circle normals.
///
/// Vertices are the intersections `±(w_a × w_b)` that satisfy every half-space,
/// ordered counterclockwise around the region. An empty cell yields an empty
/// polygon of area zero.
pub fn polygon_from_normals(normals: &[Point3]) -> Result<SphericalPolygon> {
    if normals.len() < 2 {
        return Err(Error::Degenerate(format!(
            "a spherical polygon needs at least 2 great circles, got {}",
            normals.len()
        )));
    }
    let ws: Vec<Point3> = normals
        .iter()
        .map(|w| {
            w.normalized()
                .ok_or_else(|| Error::Degenerate("zero great-circle normal".into()))
        })
        .collect::<Result<_>>()?;
    let k = ws.len();
    for a in 0..k {
        let b = (a + 1) % k;
        if k == 2 && a == 1 {
            break;
        }
        if ws[a].cross(ws[b]).norm() <= VERTEX_TOL {
            return Err(Error::Degenerate(format!(
                "consecutive great circles {a} and {b} coincide"
            )));
        }
    }

    let mut verts: Vec<Point3> = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let c = ws[a].cross(ws[b]);
            let Some(c) = c.normalized().filter(|_| c.norm() > CROSS_TOL) else {
                continue;
            };
            for cand in [c, -c] {
                if ws.iter().all(|w| w.dot(cand) >= -VERTEX_TOL)
                    && verts.iter().all(|v| v.distance(cand) > VERTEX_TOL)
                {
                    verts.push(cand);
                }
            }
        }
    }

    let poly_normals = ws;
    match verts.len() {
        0 | 1 => return Ok(SphericalPolygon { normals: poly_normals, vertices: Vec::new() }),
        2 => {
            if verts[0].dot(verts[1]) < -1.0 + 1e-12 && lune_wedge(verts[0], &poly_normals).is_some() {
                return Ok(SphericalPolygon { normals: poly_normals, vertices: verts });
            }
            // a sliver between two points has no interior
            return Ok(SphericalPolygon { normals: poly_normals, vertices: Vec::new() });
        }
        _ => {}
    }

    let mut c = Point3::ZERO;
    for v in &verts {
        c += *v;
    }
    let Some(c) = c.normalized() else {
        return Err(Error::Degenerate("spherical polygon is not contained in a hemisphere".into()));
    };
    let e1 = c.any_orthogonal();
    let e2 = c.cross(e1);
    verts.sort_by(|a, b| {
        let ta = a.dot(e2).atan2(a.dot(e1));
        let tb = b.dot(e2).atan2(b.dot(e1));
        ta.total_cmp(&tb)
    });
    Ok(SphericalPolygon { normals: poly_normals, vertices: verts })
}

/// Intersection of hemispheres given in any order, possibly with repeats.
///
/// Parallel normals are merged. An antiparallel pair confines the region to a
/// great circle, so the result is empty.
pub fn intersect_hemispheres(normals: &[Point3]) -> Result<SphericalPolygon> {
    let mut ws: Vec<Point3> = Vec::with_capacity(normals.len());
    for w in normals {
        let w = w
            .normalized()
            .ok_or_else(|| Error::Degenerate("zero great-circle normal".into()))?;
        if ws.iter().any(|m| m.distance(w) <= VERTEX_TOL) {
            continue;
        }
        if ws.iter().any(|m| m.distance(-w) <= VERTEX_TOL) {
            return Ok(SphericalPolygon { normals: ws, vertices: Vec::new() });
        }
        ws.push(w);
    }
    if ws.len() < 2 {
        return Err(Error::Degenerate("a hemisphere is not a bounded polygon".into()));
    }
    polygon_from_normals(&ws)
}

/// Spherical excess `Σ interior angles - (k - 2)π`, with interior angles
/// measured as signed tangent-plane angles so reflex corners are handled.
pub fn spherical_area(poly: &SphericalPolygon) -> f64 {
    if poly.is_empty() {
        return 0.0;
    }
    if poly.is_lune() {
        return poly.lune_rays().map_or(0.0, |(a, b)| 2.0 * a.dot(b).clamp(-1.0, 1.0).acos());
    }
    let v = &poly.vertices;
    let k = v.len();
    let tangent = |at: Point3, to: Point3| (to - at * to.dot(at)).normalized();
    let mut sum = 0.0;
    for i in 0..k {
        let cur = v[i];
        let prev = v[(i + k - 1) % k];
        let next = v[(i + 1) % k];
        let (Some(tp), Some(tn)) = (tangent(cur, prev), tangent(cur, next)) else {
            continue;
        };
        let mut ang = tn.cross(tp).dot(cur).atan2(tn.dot(tp));
        if ang < 0.0 {
            ang += 2.0 * PI;
        }
        sum += ang;
    }
    let excess = sum - (k as f64 - 2.0) * PI;
    excess.clamp(0.0, 4.0 * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand::rngs::StdRng;

    fn random_unit(rng: &mut StdRng) -> Point3 {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let r = (1.0 - z * z).sqrt();
        Point3::new(r * phi.cos(), r * phi.sin(), z)
    }

    fn random_point(rng: &mut StdRng) -> Point3 {
        Point3::new(rng.gen(), rng.gen(), rng.gen())
    }

    fn random_quad(rng: &mut StdRng) -> Quadrilateral {
        loop {
            let q = Quadrilateral::new(random_point(rng), random_point(rng), random_point(rng), random_point(rng));
            if let Ok(q) = q {
                return q;
            }
        }
    }

    /// Rodrigues rotation about a unit axis.
    fn rotate(p: Point3, axis: Point3, ang: f64) -> Point3 {
        p * ang.cos() + axis.cross(p) * ang.sin() + axis * (axis.dot(p) * (1.0 - ang.cos()))
    }

    #[test]
    fn octant_triangle() {
        let poly = polygon_from_normals(&[Point3::X, Point3::Y, Point3::Z]).unwrap();
        assert_eq!(poly.vertices().len(), 3);
        for v in poly.vertices() {
            let axis = [Point3::X, Point3::Y, Point3::Z].iter().any(|a| a.distance(*v) < 1e-12);
            assert!(axis, "vertex {v:?} is not a coordinate axis");
        }
        assert!((spherical_area(&poly) - PI / 2.0).abs() < 1e-12);
        // order of the input normals does not change the region
        let rev = polygon_from_normals(&[Point3::Z, Point3::Y, Point3::X]).unwrap();
        assert!((rev.area() - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn lune_area_is_twice_dihedral() {
        for theta in [0.3, 1.0, PI / 2.0, 2.5] {
            let a = Point3::Y;
            // great circle tilted by theta from the first, interior angle theta
            let b = Point3::new(0.0, -theta.cos(), theta.sin());
            let lune = polygon_from_normals(&[a, b]).unwrap();
            assert!((lune.area() - 2.0 * theta).abs() < 1e-12, "theta {theta}: {}", lune.area());
        }
    }

    #[test]
    fn empty_cell() {
        let poly = polygon_from_normals(&[Point3::Z, Point3::new(1.0, 0.0, -1.0), Point3::new(-1.0, 0.0, -1.0)]).unwrap();
        assert!(poly.is_empty());
        assert_eq!(poly.area(), 0.0);
    }

    #[test]
    fn parallel_consecutive_normals_error() {
        assert!(polygon_from_normals(&[Point3::X, Point3::X, Point3::Y]).is_err());
        assert!(polygon_from_normals(&[Point3::X, -Point3::X, Point3::Y]).is_err());
        assert!(polygon_from_normals(&[Point3::X]).is_err());
    }

    #[test]
    fn normals_are_unit_and_orthogonal() {
        let mut rng = StdRng::seed_from_u64(1);
        for _ in 0..100 {
            let q = random_quad(&mut rng);
            let [pi, pi1, pj, pj1] = q.vertices;
            let defining = [(pi - pj, pi - pj1), (pi - pj1, pi1 - pj1), (pi1 - pj1, pi1 - pj), (pi1 - pj, pi - pj)];
            for (n, (a, b)) in q.normals.iter().zip(defining) {
                assert!((n.norm() - 1.0).abs() < 1e-12);
                assert!(n.dot(a).abs() < 1e-9 * a.norm());
                assert!(n.dot(b).abs() < 1e-9 * b.norm());
            }
        }
    }

    #[test]
    fn tetrahedron_face_normals() {
        let (pi, pi1, pj, pj1) = (Point3::ZERO, Point3::X, Point3::Y, Point3::Z);
        let q = Quadrilateral::new(pi, pi1, pj, pj1).unwrap();
        // n1 is normal to the face through p_i, p_j, p_j+1
        assert!(q.normals[0].dot(pj - pi).abs() < 1e-12);
        assert!(q.normals[0].dot(pj1 - pi).abs() < 1e-12);
        assert!(q.normals[2].dot(pj - pi1).abs() < 1e-12);
        assert!(q.normals[2].dot(pj1 - pi1).abs() < 1e-12);
    }

    #[test]
    fn swapping_edges_matches_recomputation() {
        let mut rng = StdRng::seed_from_u64(2);
        for _ in 0..50 {
            let q = random_quad(&mut rng);
            let [pi, pi1, pj, pj1] = q.vertices;
            let swapped = Quadrilateral::new(pj, pj1, pi, pi1).unwrap();
            // direct recomputation of the swapped normals from the definition
            let expect = [
                (pj - pi).cross(pj - pi1),
                (pj - pi1).cross(pj1 - pi1),
                (pj1 - pi1).cross(pj1 - pi),
                (pj1 - pi).cross(pj - pi),
            ];
            for (n, e) in swapped.normals.iter().zip(expect) {
                assert!(n.distance(e.normalized().unwrap()) < 1e-12);
            }
            // T_ji has the negated normals of T_ij in reverse order
            for k in 0..4 {
                assert!(swapped.normals[k].distance(-q.normals[3 - k]) < 1e-9);
            }
            assert!((swapped.area() - q.area()).abs() < 1e-12);
        }
    }

    #[test]
    fn antipodal_normal_relations() {
        let mut rng = StdRng::seed_from_u64(3);
        for _ in 0..100 {
            let q = random_quad(&mut rng);
            let a = q.antipodal().unwrap();
            let n = q.normals;
            assert!(a.normals[0].distance(-n[2]) < 1e-9);
            assert!(a.normals[1].distance(-n[1]) < 1e-9);
            assert!(a.normals[2].distance(-n[0]) < 1e-9);
            assert!(a.normals[3].distance(-n[3]) < 1e-9);
            let back = a.antipodal().unwrap();
            assert!(back.vertices[2].distance(q.vertices[2]) < 1e-12);
            assert!(back.vertices[3].distance(q.vertices[3]) < 1e-12);
            assert!((a.area() - q.area()).abs() < 1e-12);
        }
    }

    #[test]
    fn banchoff_normals_bound_the_quadrangle() {
        let mut rng = StdRng::seed_from_u64(4);
        for _ in 0..100 {
            let q = random_quad(&mut rng);
            let poly = polygon_from_normals(&q.normals).unwrap();
            assert!((poly.area() - q.area()).abs() < 1e-9, "{} vs {}", poly.area(), q.area());
            for v in poly.vertices() {
                let on_two = q.normals.iter().filter(|w| w.dot(*v).abs() < 1e-9).count();
                assert!(on_two >= 2);
            }
        }
    }

    #[test]
    fn rotation_invariance() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..50 {
            let q = random_quad(&mut rng);
            let axis = random_unit(&mut rng);
            let ang = rng.gen_range(0.0..2.0 * PI);
            let rot: Vec<Point3> = q.normals.iter().map(|n| rotate(*n, axis, ang)).collect();
            let a0 = polygon_from_normals(&q.normals).unwrap().area();
            let a1 = polygon_from_normals(&rot).unwrap().area();
            assert!((a0 - a1).abs() < 1e-9);
            let anti: Vec<Point3> = q.normals.iter().map(|n| -*n).collect();
            assert!((polygon_from_normals(&anti).unwrap().area() - a0).abs() < 1e-9);
        }
    }

    #[test]
    fn interior_points_are_inside() {
        let mut rng = StdRng::seed_from_u64(6);
        for _ in 0..20 {
            let q = random_quad(&mut rng);
            let poly = polygon_from_normals(&q.normals).unwrap();
            for p in poly.interior_points(200) {
                assert!(poly.contains(p, 1e-12));
            }
        }
    }
}
