//! Closed forms for the projection-averaged bracket and Jones polynomial of
//! open chains with three and four edges and of closed quadrilaterals.
//!
//! Every probability here is an area on the unit sphere divided by `2π`
//! (antipodal directions give mirror diagrams with the same crossings), built
//! from the face normals of the quadrilaterals `T13`, `T14`, `T24` spanned by
//! the non-adjacent edge pairs. Edges are numbered `e1..e4` and vertices
//! `0..4`, so `e_k` joins vertex `k-1` to vertex `k`.
//!
//! Signs follow [`crate::linking::segment_crossing_sign`]: `ε_ij` is the sign
//! of `L(e_i, e_j)` and equals the sign of the projected crossing whenever the
//! pair crosses. A k2.1 diagram has both crossings of sign `ε13`, so its
//! writhe is `2ε13` and its bracket is `A^2 - A^-4 + 1` for `ε13 = +1` and
//! the mirror image otherwise.

use crate::chain::PolyChain;
use crate::diagram::normalized_bracket;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::linking::{chain_edge_linking, segment_crossing_sign};
use crate::montecarlo::generic_projection;
use crate::sphere::{intersect_hemispheres, quad_normals, SphericalPolygon};
use crate::vec3::Point3;
use serde::Serialize;
use std::f64::consts::PI;

/// Discriminants closer to zero than this do not select a table row.
pub const GUARD_BAND: f64 = 1e-10;

/// Slack allowed on a probability before it is reported as inconsistent.
pub const PROB_TOL: f64 = 1e-9;

/// Bracket of the standard k2.1 diagram with both crossings of sign `chirality`.
pub fn k21_bracket(chirality: i8) -> LaurentPoly {
    let right = LaurentPoly::from_pairs([(2, 1.0), (-4, -1.0), (0, 1.0)].map(|(e, c)| (4 * e, c)));
    if chirality >= 0 {
        right
    } else {
        right.mirror()
    }
}

fn sign_of(x: f64, what: &str) -> Result<bool> {
    if !x.is_finite() || x.abs() < GUARD_BAND {
        return Err(Error::Degenerate(format!("{what} = {x:e} is within the guard band")));
    }
    Ok(x > 0.0)
}

fn unit(p: Point3, what: &str) -> Result<Point3> {
    p.normalized()
        .filter(|_| p.norm() > 1e-14)
        .ok_or_else(|| Error::Degenerate(format!("{what} vanishes")))
}

/// `T_ij` for edges `a0a1`, `b0b1`, failing on a coplanar pair.
fn pair_normals(a0: Point3, a1: Point3, b0: Point3, b1: Point3) -> Result<(i8, [Point3; 4])> {
    let eps = segment_crossing_sign(a0, a1, b0, b1);
    if eps == 0 {
        return Err(Error::Degenerate("coplanar edge pair".into()));
    }
    Ok((eps, quad_normals(a0, a1, b0, b1)?))
}

/// A signed reference to a face normal: `(sign, family, index)`, family one
/// of `n` (`T_ij` / `T13`), `u` (`T_i,j+1` / `T14`), `v` (`T24`).
type Sym = (i8, char, usize);

macro_rules! row {
    (@s +) => { 1 };
    (@s -) => { -1 };
    (@f n) => { 'n' };
    (@f u) => { 'u' };
    (@f v) => { 'v' };
    ($($s:tt $f:ident $k:literal),* $(,)?) => {
        &[$((row!(@s $s), row!(@f $f), $k)),*]
    };
}

/// Rows for `ε_ij = ε_i,j+1`, `w < 0`, `w0 < 0`, keyed on the signs of
/// `(c_j+1,i+1, c_j+2,i+1, c_j+1,i, c_j+2,i)`.
const EQUAL_SIGN_ROWS: [([bool; 4], &[Sym]); 16] = [
    ([true, true, true, true], row![+n 4, +n 1, -u 2, +n 3]),
    ([true, true, false, false], row![+n 4, +n 1, -u 2, -u 1]),
    ([true, true, true, false], row![+n 4, +n 1, -u 2, -u 1, +n 3]),
    ([true, true, false, true], row![+n 4, +n 1, -u 2, +n 3, -u 1]),
    ([false, false, true, true], row![+n 4, -u 3, -u 2, +n 3]),
    ([false, false, false, false], row![+n 4, -u 3, -u 2, -u 1]),
    ([false, false, true, false], row![+n 4, -u 3, -u 2, -u 1, +n 3]),
    ([false, false, false, true], row![+n 4, -u 3, -u 2, +n 3, -u 1]),
    ([true, false, true, true], row![+n 4, +n 1, -u 3, -u 2, +n 3]),
    ([true, false, false, false], row![+n 4, +n 1, -u 3, -u 2, -u 1]),
    ([true, false, true, false], row![+n 4, +n 1, -u 3, -u 2, -u 1, +n 3]),
    ([true, false, false, true], row![+n 4, +n 1, -u 3, -u 2, +n 3, -u 1]),
    ([false, true, true, true], row![+n 4, -u 3, +n 1, -u 2, +n 3]),
    ([false, true, false, false], row![+n 4, -u 3, +n 1, -u 2, -u 1]),
    ([false, true, true, false], row![+n 4, -u 3, +n 1, -u 2, -u 1, +n 3]),
    ([false, true, false, true], row![+n 4, -u 3, +n 1, -u 2, +n 3, -u 1]),
];

/// Rows for `ε_ij = -ε_i,j+1`, keyed on `(w > 0, c_j+2,i > 0, c_j+2,i+1 > 0)`.
const OPPOSITE_SIGN_ROWS: [([bool; 3], &[Sym]); 8] = [
    ([false, true, true], row![+n 2, -u 1, -u 2, -u 3]),
    ([false, false, false], row![+n 2, +n 1, -u 2, +n 3]),
    ([false, false, true], row![+n 2, +n 1, -u 2, -u 3]),
    ([false, true, false], row![+n 2, -u 1, -u 2, +n 3]),
    ([true, true, true], row![+n 2, -u 1, +n 4, -u 3]),
    ([true, false, false], row![+n 2, +n 1, +n 4, +n 3]),
    ([true, false, true], row![+n 2, +n 1, +n 4, -u 3]),
    ([true, true, false], row![+n 2, -u 1, +n 4, +n 3]),
];

/// The lower boundary `x` of `Q1 = (n4, -v3, -u2, x) ∪ Q`, keyed on `(c30 > 0, c40 > 0)`.
const Q1_LOWER: [([bool; 2], &[Sym]); 4] = [
    ([true, true], row![+n 3]),
    ([false, false], row![-u 1]),
    ([true, false], row![-u 1, +n 3]),
    ([false, true], row![+n 3, -u 1]),
];

/// Geometry of an edge `e_i` against two consecutive edges `e_j`, `e_j+1`.
///
/// Vertices are stored as `[p_i, p_i+1, p_j, p_j+1, p_j+2]`.
#[derive(Debug, Clone, Copy)]
struct Triple {
    p: [Point3; 5],
    n: [Point3; 4],
    u: [Point3; 4],
    eps_ij: i8,
    eps_ij1: i8,
}

impl Triple {
    fn new(p: [Point3; 5]) -> Result<Self> {
        let (eps_ij, n) = pair_normals(p[0], p[1], p[2], p[3])?;
        let (eps_ij1, u) = pair_normals(p[0], p[1], p[3], p[4])?;
        Ok(Self { p, n, u, eps_ij, eps_ij1 })
    }

    /// Normal of the triangle `(j, j+1, j+2)`, `(p_j - p_j+2) × (p_j - p_j+1)`.
    fn v3(&self) -> Result<Point3> {
        unit((self.p[2] - self.p[4]).cross(self.p[2] - self.p[3]), "triangle normal v3")
    }

    fn w(&self) -> f64 {
        let u2 = self.u[1];
        u2.cross(-self.n[1]).dot(u2.cross(self.n[3]))
    }

    fn w0(&self) -> Result<f64> {
        let v3 = self.v3()?;
        Ok(v3.cross(-self.n[0]).dot(v3.cross(self.n[2])))
    }

    /// `(p_b - p_a)·normal ε_ij` for local vertex indices.
    fn c(&self, a: usize, b: usize, normal: Point3) -> f64 {
        (self.p[b] - self.p[a]).dot(normal) * f64::from(self.eps_ij)
    }

    fn c_j1_i1(&self) -> f64 {
        self.c(3, 1, self.n[0])
    }
    fn c_j2_i1(&self) -> f64 {
        self.c(4, 1, self.n[0])
    }
    fn c_j1_i(&self) -> f64 {
        self.c(3, 0, self.n[2])
    }
    fn c_j2_i(&self) -> f64 {
        self.c(4, 0, self.n[2])
    }
    // With opposite signs the side faces at `i` and `i+1` are compared
    // against `n1` and `n3` respectively.
    fn c_j2_i_opp(&self) -> f64 {
        self.c(4, 0, self.n[0])
    }
    fn c_j2_i1_opp(&self) -> f64 {
        self.c(4, 1, self.n[2])
    }

    fn resolve(&self, v: Option<&[Point3; 4]>, syms: &[Sym]) -> Result<Vec<Point3>> {
        syms.iter()
            .map(|&(s, f, k)| {
                let base = match f {
                    'n' => self.n[k - 1],
                    'u' => self.u[k - 1],
                    _ => v.ok_or_else(|| Error::Consistency("v normals not available".into()))?[k - 1],
                };
                Ok(base * f64::from(s))
            })
            .collect()
    }

    /// Whether the table says the joint region is empty (equal signs only).
    fn equal_signs_empty(&self) -> Result<bool> {
        let w = sign_of(self.w(), "w")?;
        let w0 = sign_of(self.w0()?, "w0")?;
        Ok(w || w0)
    }

    /// Symbolic boundary of `Q_i,j,j+1`, or `None` for the empty rows.
    fn joint_row(&self) -> Result<Option<&'static [Sym]>> {
        if self.eps_ij == self.eps_ij1 {
            if self.equal_signs_empty()? {
                return Ok(None);
            }
            let key = [
                sign_of(self.c_j1_i1(), "c_j+1,i+1")?,
                sign_of(self.c_j2_i1(), "c_j+2,i+1")?,
                sign_of(self.c_j1_i(), "c_j+1,i")?,
                sign_of(self.c_j2_i(), "c_j+2,i")?,
            ];
            Ok(EQUAL_SIGN_ROWS.iter().find(|(k, _)| *k == key).map(|(_, r)| *r))
        } else {
            let key = [
                sign_of(self.w(), "w")?,
                sign_of(self.c_j2_i_opp(), "c_j+2,i")?,
                sign_of(self.c_j2_i1_opp(), "c_j+2,i+1")?,
            ];
            Ok(OPPOSITE_SIGN_ROWS.iter().find(|(k, _)| *k == key).map(|(_, r)| *r))
        }
    }

    fn joint_polygon(&self) -> Result<SphericalPolygon> {
        match self.joint_row()? {
            Some(row) => intersect_hemispheres(&self.resolve(None, row)?),
            None => Ok(SphericalPolygon::empty()),
        }
    }
}

/// `Q_i,j,j+1`: directions in which `e_i` crosses both `e_j` and `e_j+1`,
/// taken on the side of `Q_i,j+1`.
///
/// `P(both pairs cross) = area / 2π`.
pub fn q_joint(pi: Point3, pi1: Point3, pj: Point3, pj1: Point3, pj2: Point3) -> Result<SphericalPolygon> {
    Triple::new([pi, pi1, pj, pj1, pj2])?.joint_polygon()
}

/// `2|L(e_1, e_3)|(-A^3)^ε13 + 1 - 2|L(e_1, e_3)|` for an open 3-edge chain.
pub fn bracket_e3(chain: &PolyChain) -> Result<LaurentPoly> {
    if chain.is_closed() || chain.num_edges() != 3 {
        return Err(Error::Unsupported("bracket_e3 needs an open chain with 3 edges".into()));
    }
    let l = chain_edge_linking(chain, 0, 2);
    if l.degenerate {
        return Ok(LaurentPoly::one());
    }
    Ok(kink_mixture(&[(2.0 * l.value.abs(), sign_i32(l.value))]))
}

/// Always 1: a single crossing is removed by normalization.
pub fn jones_e3(chain: &PolyChain) -> Result<LaurentPoly> {
    if chain.is_closed() || chain.num_edges() != 3 {
        return Err(Error::Unsupported("jones_e3 needs an open chain with 3 edges".into()));
    }
    Ok(LaurentPoly::one())
}

/// Bracket of a closed quadrilateral: at most one of the two opposite pairs
/// crosses in any projection.
pub fn bracket_p4_closed(chain: &PolyChain) -> Result<LaurentPoly> {
    if !chain.is_closed() || chain.num_edges() != 4 {
        return Err(Error::Unsupported("bracket_p4_closed needs a closed chain with 4 edges".into()));
    }
    let l13 = chain_edge_linking(chain, 0, 2);
    let l24 = chain_edge_linking(chain, 1, 3);
    let mut terms = Vec::new();
    for l in [l13, l24] {
        if !l.degenerate {
            terms.push((2.0 * l.value.abs(), sign_i32(l.value)));
        }
    }
    Ok(kink_mixture(&terms))
}

fn sign_i32(x: f64) -> i32 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// `Σ p_k (-A^3)^{w_k} + (1 - Σ p_k)`.
fn kink_mixture(terms: &[(f64, i32)]) -> LaurentPoly {
    let mut out = LaurentPoly::zero();
    let mut rest = 1.0;
    for &(p, w) in terms {
        out += LaurentPoly::neg_a_cubed_pow(w).scale(p);
        rest -= p;
    }
    out + LaurentPoly::one().scale(rest)
}

/// Signs and table discriminants of a 4-edge chain.
///
/// `c_41` and `c_40` are the values the tables key on: against `n1` and `n3`
/// respectively when `ε13 = ε14`, against `n3` and `n1` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CaseConditions {
    pub eps_13: i8,
    pub eps_14: i8,
    pub eps_24: i8,
    pub w: f64,
    pub w0: f64,
    pub c_31: f64,
    pub c_41: f64,
    pub c_30: f64,
    pub c_40: f64,
    /// `c_4,1` of the reversed chain.
    pub c_4p1p: f64,
}

/// Normals of `T13`, `T14`, `T24` and the forward triple `(e1; e3, e4)`.
#[derive(Debug, Clone, Copy)]
struct Frame {
    fwd: Triple,
    v: [Point3; 4],
    eps_24: i8,
}

fn vertices5(chain: &PolyChain) -> Result<[Point3; 5]> {
    if chain.is_closed() || chain.num_edges() != 4 {
        return Err(Error::Unsupported("needs an open chain with 4 edges".into()));
    }
    let v = chain.vertices();
    Ok([v[0], v[1], v[2], v[3], v[4]])
}

impl Frame {
    fn new(p: [Point3; 5]) -> Result<Self> {
        let fwd = Triple::new(p)?;
        let (eps_24, v) = pair_normals(p[1], p[2], p[3], p[4])?;
        Ok(Self { fwd, v, eps_24 })
    }

    fn conditions(&self) -> Result<CaseConditions> {
        let t = &self.fwd;
        let equal = t.eps_ij == t.eps_ij1;
        Ok(CaseConditions {
            eps_13: t.eps_ij,
            eps_14: t.eps_ij1,
            eps_24: self.eps_24,
            w: t.w(),
            w0: t.w0()?,
            c_31: t.c_j1_i1(),
            c_41: if equal { t.c_j2_i1() } else { t.c_j2_i1_opp() },
            c_30: t.c_j1_i(),
            c_40: if equal { t.c_j2_i() } else { t.c_j2_i_opp() },
            c_4p1p: self.c_4p1p()?,
        })
    }

    /// `c_4,1` of the reversed chain, `(p_3 - p_0)·n1' ε24` with `n1'` normal to
    /// the plane of vertices 4, 2, 1.
    fn c_4p1p(&self) -> Result<f64> {
        Ok(Triple::new(reversed5(self.fwd.p))?.c_j2_i1())
    }

    fn polygon(&self, syms: &[Sym]) -> Result<SphericalPolygon> {
        intersect_hemispheres(&self.fwd.resolve(Some(&self.v), syms)?)
    }

    /// The k2.1 region of case B(i), empty unless `ε13 = ε14`, `w < 0`, `w0 < 0`.
    fn k21_region(&self) -> Result<SphericalPolygon> {
        let t = &self.fwd;
        if t.eps_ij != t.eps_ij1 || t.equal_signs_empty()? {
            return Ok(SphericalPolygon::empty());
        }
        if sign_of(t.c_j2_i1(), "c_4,1")? {
            self.polygon(row![+v 3, -v 2, +n 1, -u 2])
        } else {
            self.polygon(row![+v 3, -v 2, -u 2])
        }
    }

    /// Area of `Q1 = Q134 \ Q24`.
    fn q1_area(&self, q134: &SphericalPolygon, q: &SphericalPolygon) -> Result<f64> {
        let t = &self.fwd;
        if q134.is_empty() {
            return Ok(0.0);
        }
        if t.eps_ij == t.eps_ij1 {
            let key = [sign_of(t.c_j1_i(), "c_3,0")?, sign_of(t.c_j2_i(), "c_4,0")?];
            let lower = Q1_LOWER.iter().find(|(k, _)| *k == key).map(|(_, r)| *r).expect("4 keys");
            let mut syms: Vec<Sym> = row![+n 4, -v 3, -u 2].to_vec();
            syms.extend_from_slice(lower);
            return Ok(self.polygon(&syms)?.area() + q.area());
        }
        let w = sign_of(t.w(), "w")?;
        let c40 = sign_of(t.c_j2_i_opp(), "c_4,0")?;
        let c41 = sign_of(t.c_j2_i1_opp(), "c_4,1")?;
        let cut: Option<&[Sym]> = match (w, c40, c41) {
            (false, true, true) => Some(row![+v 1, +v 2, +v 3, +n 2]),
            (false, false, false) => None,
            (false, false, true) => Some(row![+v 1, +v 2, +n 1, +n 2]),
            (false, true, false) => None,
            (true, true, true) => Some(row![-u 3, +n 4, +v 3, +n 2]),
            (true, false, false) => {
                // both cuts need +v2 here; with -v2 the cut misses Q24
                if sign_of(self.c_4p1p()?, "c_4',1'")? {
                    Some(row![+v 3, +v 2, +n 2, +n 1, +n 4])
                } else {
                    Some(row![+v 3, +v 2, +n 1, +n 4])
                }
            }
            (true, false, true) => return Ok(0.0),
            (true, true, false) => None,
        };
        let a134 = q134.area();
        match cut {
            None => Ok(a134),
            Some(cut) => {
                let mut both = q134.normals().to_vec();
                both.extend(self.fwd.resolve(Some(&self.v), cut)?);
                Ok(a134 - intersect_hemispheres(&both)?.area())
            }
        }
    }
}

/// Which B-type diagram carries the k2.1 probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum K21Case {
    None,
    /// `e1` crosses `e3` and `e4`.
    Bi,
    /// `e4` crosses `e1` and `e2`.
    Bii,
}

/// `P(projection is k2.1)` with the case that realizes it and the sign of its writhe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct K21Probability {
    pub probability: f64,
    pub case: K21Case,
    /// The k2.1 diagram has writhe `2 · writhe_sign`.
    pub writhe_sign: i8,
}

fn k21_forward(p: [Point3; 5]) -> Result<(f64, i8)> {
    let f = Frame::new(p)?;
    Ok((f.k21_region()?.area() / (2.0 * PI), f.fwd.eps_ij))
}

fn reversed5(p: [Point3; 5]) -> [Point3; 5] {
    [p[4], p[3], p[2], p[1], p[0]]
}

/// Probability that a uniformly random projection is the knotoid k2.1.
///
/// Case B(i) is evaluated first; if its region is empty the same formula is
/// applied to the reversed chain for case B(ii).
pub fn p_k21(chain: &PolyChain) -> Result<K21Probability> {
    let p = vertices5(chain)?;
    if all_coplanar(p) {
        return Ok(K21Probability { probability: 0.0, case: K21Case::None, writhe_sign: 0 });
    }
    let (pi, s) = k21_forward(p)?;
    if pi > 0.0 {
        return Ok(K21Probability { probability: pi, case: K21Case::Bi, writhe_sign: s });
    }
    let (pii, s) = k21_forward(reversed5(p))?;
    if pii > 0.0 {
        return Ok(K21Probability { probability: pii, case: K21Case::Bii, writhe_sign: s });
    }
    Ok(K21Probability { probability: 0.0, case: K21Case::None, writhe_sign: 0 })
}

fn all_coplanar(p: [Point3; 5]) -> bool {
    [(0, 2), (0, 3), (1, 3)]
        .iter()
        .all(|&(i, j)| segment_crossing_sign(p[i], p[i + 1], p[j], p[j + 1]) == 0)
}

/// Areas entering the four-edge bracket, in steradians, and the pair linkings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct E4Areas {
    pub l13: f64,
    pub l14: f64,
    pub l24: f64,
    pub q134: f64,
    pub q421: f64,
    pub q1: f64,
    pub q2: f64,
    pub q: f64,
}

/// Probabilities of the diagram classes of a 4-edge chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct E4Probabilities {
    pub eps_24: i8,
    pub p_k21: f64,
    /// Writhe of the k2.1 diagrams (`±2`), 0 if none occur.
    pub k21_writhe: i32,
    /// `p_k0[w + 2]` is the probability of a trivial diagram of writhe `w`.
    pub p_k0: [f64; 5],
}

impl E4Probabilities {
    /// Probability of a trivial diagram with writhe `k ε24`, `k ∈ -2..=2`.
    pub fn p_k0_relative(&self, k: i32) -> f64 {
        let w = k * i32::from(self.eps_24);
        self.p_k0[(w + 2) as usize]
    }

    pub fn total(&self) -> f64 {
        self.p_k21 + self.p_k0.iter().sum::<f64>()
    }
}

/// Probabilities of the crossing patterns, in units of probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternProbabilities {
    /// Only `e1,e3` cross.
    pub a1: f64,
    /// Only `e2,e4` cross.
    pub a2: f64,
    /// Only `e1,e4` cross.
    pub a3: f64,
    /// `e1,e3` and `e1,e4` cross, `e2,e4` do not; k2.1 included.
    pub b_i: f64,
    /// `e1,e4` and `e2,e4` cross, `e1,e3` do not; k2.1 included.
    pub b_ii: f64,
    /// All three pairs cross.
    pub c: f64,
    pub k21: f64,
}

/// Areas of the sphere regions that decide the diagram of a 4-edge chain.
pub fn e4_areas(chain: &PolyChain) -> Result<E4Areas> {
    let p = vertices5(chain)?;
    let l = |i, j| chain_edge_linking(chain, i, j).value;
    let (l13, l14, l24) = (l(0, 2), l(0, 3), l(1, 3));
    if all_coplanar(p) {
        return Ok(E4Areas { l13, l14, l24, q134: 0.0, q421: 0.0, q1: 0.0, q2: 0.0, q: 0.0 });
    }
    let fwd = Frame::new(p)?;
    let rev = Frame::new(reversed5(p))?;
    let q134 = fwd.fwd.joint_polygon()?;
    let q421 = rev.fwd.joint_polygon()?;
    let qi = fwd.k21_region()?;
    let qii = rev.k21_region()?;
    if !qi.is_empty() && !qii.is_empty() && qi.area() > 0.0 && qii.area() > 0.0 {
        return Err(Error::Consistency("both B(i) and B(ii) carry k2.1".into()));
    }
    let q1 = fwd.q1_area(&q134, &qi)?;
    let q2 = rev.q1_area(&q421, &qii)?;
    Ok(E4Areas {
        l13,
        l14,
        l24,
        q134: q134.area(),
        q421: q421.area(),
        q1,
        q2,
        q: qi.area() + qii.area(),
    })
}

/// Pattern probabilities from the areas, by inclusion-exclusion over the
/// pairs that cross.
pub fn e4_patterns(a: &E4Areas) -> PatternProbabilities {
    let s = 1.0 / (2.0 * PI);
    PatternProbabilities {
        a1: 2.0 * a.l13.abs() - s * a.q134,
        a2: 2.0 * a.l24.abs() - s * a.q421,
        a3: 2.0 * a.l14.abs() - s * (a.q2 + a.q134),
        b_i: s * a.q1,
        b_ii: s * a.q2,
        c: s * (a.q134 - a.q1),
        k21: s * a.q,
    }
}

fn check_prob(p: f64, what: &str) -> Result<f64> {
    if !(p >= -PROB_TOL && p <= 1.0 + PROB_TOL) {
        return Err(Error::Consistency(format!("{what} = {p} is not a probability")));
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Class probabilities of a 4-edge chain.
pub fn e4_probabilities(chain: &PolyChain) -> Result<E4Probabilities> {
    let areas = e4_areas(chain)?;
    let pat = e4_patterns(&areas);
    let e13 = sign_i32(areas.l13);
    let e14 = sign_i32(areas.l14);
    let e24 = sign_i32(areas.l24);
    let mut p_k0 = [0.0; 5];
    let mut add = |w: i32, p: f64, what: &str| -> Result<()> {
        let p = check_prob(p, what)?;
        p_k0[(w + 2) as usize] += p;
        Ok(())
    };
    add(e13, pat.a1, "P(A1)")?;
    add(e24, pat.a2, "P(A2)")?;
    add(e14, pat.a3, "P(A3)")?;
    let c_writhe = e13 + e14 + e24;
    if pat.c > PROB_TOL && c_writhe.abs() > 2 {
        return Err(Error::Consistency("all three crossings of equal sign".into()));
    }
    add(c_writhe.clamp(-2, 2), pat.c, "P(C)")?;
    let k21 = check_prob(pat.k21, "P(k2.1)")?;
    let (k21_writhe, bi_k21, bii_k21) = match (k21 > 0.0, e13 == e14, e14 == e24) {
        (false, _, _) => (0, 0.0, 0.0),
        (true, true, _) => (2 * e13, k21, 0.0),
        (true, false, true) => (2 * e14, 0.0, k21),
        (true, false, false) => {
            return Err(Error::Consistency("k2.1 region with unequal crossing signs".into()))
        }
    };
    add(e13 + e14, pat.b_i - bi_k21, "P(B(i)) - P(k2.1)")?;
    add(e14 + e24, pat.b_ii - bii_k21, "P(B(ii)) - P(k2.1)")?;
    let used: f64 = p_k0.iter().sum::<f64>() + k21;
    let p0 = check_prob(1.0 - used, "P(no crossing)")?;
    p_k0[2] += p0;
    Ok(E4Probabilities { eps_24: e24 as i8, p_k21: k21, k21_writhe, p_k0 })
}

/// Projection-averaged bracket of an open 4-edge chain, with its class probabilities.
pub fn bracket_e4(chain: &PolyChain) -> Result<(LaurentPoly, E4Probabilities)> {
    let probs = e4_probabilities(chain)?;
    let mut out = k21_bracket(sign_i8(probs.k21_writhe)).scale(probs.p_k21);
    for (k, &p) in probs.p_k0.iter().enumerate() {
        out += LaurentPoly::neg_a_cubed_pow(k as i32 - 2).scale(p);
    }
    Ok((out, probs))
}

fn sign_i8(x: i32) -> i8 {
    x.signum() as i8
}

/// Projection-averaged Jones polynomial of an open 4-edge chain, in `t`.
///
/// Trivial diagrams normalize to 1, so only the k2.1 share survives.
pub fn jones_e4(chain: &PolyChain) -> Result<LaurentPoly> {
    let k = p_k21(chain)?;
    let wr = 2 * i32::from(k.writhe_sign);
    let f = (LaurentPoly::neg_a_cubed_pow(-wr) * k21_bracket(k.writhe_sign)).scale(k.probability)
        + LaurentPoly::one().scale(1.0 - k.probability);
    Ok(f.substitute_t())
}

/// The projection-averaged bracket in closed form, for open chains with at
/// most 4 edges and closed chains with at most 4 edges; `None` otherwise.
pub fn exact_bracket(chain: &PolyChain) -> Option<Result<LaurentPoly>> {
    match (chain.is_closed(), chain.num_edges()) {
        (false, 1..=2) | (true, 3) => Some(Ok(LaurentPoly::one())),
        (false, 3) => Some(bracket_e3(chain)),
        (false, 4) => Some(bracket_e4(chain).map(|(b, _)| b)),
        (true, 4) => Some(bracket_p4_closed(chain)),
        _ => None,
    }
}

/// The projection-averaged normalized bracket in `A`, for open chains with at
/// most 4 edges and for closed chains of any size.
///
/// A closed chain has the same normalized bracket in every generic projection,
/// so the first generic direction of `seed` is used.
pub fn exact_jones(chain: &PolyChain, seed: u64) -> Option<Result<LaurentPoly>> {
    match (chain.is_closed(), chain.num_edges()) {
        (false, 1..=3) => Some(Ok(LaurentPoly::one())),
        (false, 4) => Some(jones_e4(chain).map(|f| f.substitute_a())),
        (true, _) => Some(generic_projection(chain, seed, 0).and_then(|(d, _)| normalized_bracket(&d))),
        _ => None,
    }
}

/// Discriminants of the four-edge tables for a chain.
pub fn case_conditions(chain: &PolyChain) -> Result<CaseConditions> {
    Frame::new(vertices5(chain)?)?.conditions()
}
