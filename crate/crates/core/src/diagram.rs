//! Projections of chains to knot and knotoid diagrams, and the Kauffman
//! bracket state sum on those diagrams.

use crate::chain::PolyChain;
use crate::error::{Error, Result};
use crate::laurent::LaurentPoly;
use crate::vec3::Point3;
use rayon::prelude::*;
use std::fmt::{self, Write as _};

/// Largest crossing count accepted by [`bracket`] (2^c states).
pub const MAX_STATE_SUM_CROSSINGS: usize = 28;

/// Relative tolerance for the genericity checks of [`project`].
pub const GENERIC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strand {
    Over,
    Under,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub over_edge: usize,
    pub under_edge: usize,
    /// +1 when `(over × under)·ξ > 0`.
    pub sign: i8,
    /// Curve parameter (edge index + fraction) of the over passage.
    pub over_pos: f64,
    pub under_pos: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Passage {
    pub crossing: usize,
    pub strand: Strand,
    pub pos: f64,
}

/// A knot (closed) or knotoid (open) diagram: crossings plus the order in
/// which the curve passes through them.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagram {
    crossings: Vec<Crossing>,
    traversal: Vec<Passage>,
    closed: bool,
}

/// 2-D cross product.
fn cross2(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn degenerate(msg: impl Into<String>) -> Error {
    Error::Degenerate(msg.into())
}

/// Project `chain` along the unit direction `xi` (viewer at `+xi`).
///
/// Fails with [`Error::Degenerate`] when the projection is not generic: an
/// edge seen end-on, a crossing at or near a vertex, coincident crossings,
/// overlapping or nearly tangent strands.
pub fn project(chain: &PolyChain, xi: Point3) -> Result<Diagram> {
    let xi = xi
        .normalized()
        .ok_or_else(|| degenerate("zero projection direction"))?;
    let e1 = xi.any_orthogonal();
    let e2 = xi.cross(e1);
    let pts: Vec<(f64, f64)> = chain.vertices().iter().map(|p| (p.dot(e1), p.dot(e2))).collect();
    let heights: Vec<f64> = chain.vertices().iter().map(|p| p.dot(xi)).collect();
    let n = chain.num_vertices();
    let m = chain.num_edges();
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    let dir = |i: usize| {
        let (a, b) = seg(i);
        (b.0 - a.0, b.1 - a.1)
    };
    let len2 = |d: (f64, f64)| (d.0 * d.0 + d.1 * d.1).sqrt();

    for i in 0..m {
        let (a, b) = chain.edge(i);
        if len2(dir(i)) < GENERIC_TOL * a.distance(b) {
            return Err(degenerate(format!("edge {i} is parallel to the projection direction")));
        }
    }
    // adjacent edges folding back onto each other
    for i in 0..m {
        let j = i + 1;
        if j >= m && !chain.is_closed() {
            break;
        }
        let j = j % m;
        let (di, dj) = (dir(i), dir(j));
        let s = cross2(di, dj) / (len2(di) * len2(dj));
        let c = di.0 * dj.0 + di.1 * dj.1;
        if s.abs() < GENERIC_TOL && c < 0.0 {
            return Err(degenerate(format!("edges {i} and {j} overlap in projection")));
        }
    }

    let mut crossings = Vec::new();
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, j) in chain.nonadjacent_pairs() {
        let (pa, _) = seg(i);
        let (pb, _) = seg(j);
        let (da, db) = (dir(i), dir(j));
        let (la, lb) = (len2(da), len2(db));
        let denom = cross2(da, db);
        let r = (pb.0 - pa.0, pb.1 - pa.1);
        if denom.abs() <= GENERIC_TOL * la * lb {
            // parallel in projection: only a problem if the lines coincide and overlap
            if cross2(r, da).abs() <= GENERIC_TOL * la * (la + len2(r)) {
                let t0 = (r.0 * da.0 + r.1 * da.1) / (la * la);
                let t1 = t0 + (db.0 * da.0 + db.1 * da.1) / (la * la);
                let (lo, hi) = (t0.min(t1), t0.max(t1));
                if hi >= -GENERIC_TOL && lo <= 1.0 + GENERIC_TOL {
                    return Err(degenerate(format!("edges {i} and {j} overlap in projection")));
                }
            }
            continue;
        }
        let s = cross2(r, db) / denom;
        let t = cross2(r, da) / denom;
        let tol = GENERIC_TOL;
        let inside = |u: f64| u > -tol && u < 1.0 + tol;
        if !(inside(s) && inside(t)) {
            continue;
        }
        if s < tol || s > 1.0 - tol || t < tol || t > 1.0 - tol {
            return Err(degenerate(format!("crossing of edges {i} and {j} lies at a vertex")));
        }
        let ha = heights[i] + s * (heights[(i + 1) % n] - heights[i]);
        let hb = heights[j] + t * (heights[(j + 1) % n] - heights[j]);
        let (ea, eb) = (chain.edge(i), chain.edge(j));
        let scale = ea.0.distance(ea.1) + eb.0.distance(eb.1);
        if (ha - hb).abs() <= 1e-12 * scale {
            return Err(degenerate(format!("edges {i} and {j} intersect in space")));
        }
        let p = (pa.0 + s * da.0, pa.1 + s * da.1);
        if points.iter().any(|q| len2((q.0 - p.0, q.1 - p.1)) < GENERIC_TOL * scale) {
            return Err(degenerate("two crossings coincide"));
        }
        points.push(p);
        let (over, under, over_pos, under_pos, od, ud) = if ha > hb {
            (i, j, i as f64 + s, j as f64 + t, da, db)
        } else {
            (j, i, j as f64 + t, i as f64 + s, db, da)
        };
        let sign = if cross2(od, ud) > 0.0 { 1 } else { -1 };
        crossings.push(Crossing { over_edge: over, under_edge: under, sign, over_pos, under_pos });
    }
    Ok(Diagram::from_crossings(crossings, chain.is_closed()))
}

impl Diagram {
    fn from_crossings(crossings: Vec<Crossing>, closed: bool) -> Self {
        let mut traversal: Vec<Passage> = crossings
            .iter()
            .enumerate()
            .flat_map(|(k, c)| {
                [
                    Passage { crossing: k, strand: Strand::Over, pos: c.over_pos },
                    Passage { crossing: k, strand: Strand::Under, pos: c.under_pos },
                ]
            })
            .collect();
        traversal.sort_by(|a, b| a.pos.total_cmp(&b.pos));
        Self { crossings, traversal, closed }
    }

    /// Build an abstract diagram from a signed Gauss code.
    ///
    /// `code` lists the passages in traversal order; crossing `k` must appear
    /// once as `Over` and once as `Under`, and `signs[k]` is its sign.
    /// Edge indices of the resulting crossings are passage indices.
    pub fn from_gauss_code(code: &[(usize, Strand)], signs: &[i8], closed: bool) -> Result<Self> {
        let c = signs.len();
        if code.len() != 2 * c {
            return Err(Error::InvalidChain(format!(
                "Gauss code has {} passages for {c} crossings",
                code.len()
            )));
        }
        let mut over = vec![None; c];
        let mut under = vec![None; c];
        for (pos, &(k, strand)) in code.iter().enumerate() {
            let slot = match (k < c, strand) {
                (false, _) => return Err(Error::InvalidChain(format!("crossing {k} out of range"))),
                (true, Strand::Over) => &mut over[k],
                (true, Strand::Under) => &mut under[k],
            };
            if slot.replace(pos).is_some() {
                return Err(Error::InvalidChain(format!("crossing {k} repeats a strand")));
            }
        }
        let mut crossings = Vec::with_capacity(c);
        for k in 0..c {
            let (Some(o), Some(u)) = (over[k], under[k]) else {
                return Err(Error::InvalidChain(format!("crossing {k} needs one over and one under passage")));
            };
            if signs[k] != 1 && signs[k] != -1 {
                return Err(Error::InvalidChain(format!("crossing {k} has sign {}", signs[k])));
            }
            crossings.push(Crossing {
                over_edge: o,
                under_edge: u,
                sign: signs[k],
                over_pos: o as f64,
                under_pos: u as f64,
            });
        }
        Ok(Self::from_crossings(crossings, closed))
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn traversal(&self) -> &[Passage] {
        &self.traversal
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn num_crossings(&self) -> usize {
        self.crossings.len()
    }

    pub fn writhe(&self) -> i32 {
        diagram_writhe(self)
    }

    /// The mirror image: every crossing switched, signs negated.
    pub fn mirror(&self) -> Self {
        let crossings = self
            .crossings
            .iter()
            .map(|c| Crossing {
                over_edge: c.under_edge,
                under_edge: c.over_edge,
                sign: -c.sign,
                over_pos: c.under_pos,
                under_pos: c.over_pos,
            })
            .collect();
        Self::from_crossings(crossings, self.closed)
    }

    /// Signed Gauss code, e.g. `O1+ U2- U1+ O2-` (crossings numbered from 1).
    pub fn gauss_code(&self) -> String {
        let mut s = String::new();
        for (k, p) in self.traversal.iter().enumerate() {
            if k > 0 {
                s.push(' ');
            }
            let tag = if p.strand == Strand::Over { 'O' } else { 'U' };
            let sign = if self.crossings[p.crossing].sign > 0 { '+' } else { '-' };
            let _ = write!(s, "{tag}{}{sign}", p.crossing + 1);
        }
        s
    }

    /// Count states by `(σ, loops)`; entry `[σ + c][loops]`.
    pub fn state_counts(&self) -> Result<Vec<Vec<u64>>> {
        let c = self.crossings.len();
        if c > MAX_STATE_SUM_CROSSINGS {
            return Err(Error::Capacity { crossings: c, max: MAX_STATE_SUM_CROSSINGS });
        }
        let smoothing = Smoothing::new(self);
        let width = smoothing.segments + 1;
        let empty = || vec![vec![0u64; width]; 2 * c + 1];
        let add = |mut acc: Vec<Vec<u64>>, mask: u64, uf: &mut UnionFind| {
            let (sigma, loops) = smoothing.evaluate(mask, uf);
            acc[(sigma + c as i32) as usize][loops] += 1;
            acc
        };
        let total = 1u64 << c;
        let counts = if c < 12 {
            let mut uf = UnionFind::new(smoothing.segments);
            (0..total).fold(empty(), |acc, m| add(acc, m, &mut uf))
        } else {
            (0..total)
                .into_par_iter()
                .fold(
                    || (empty(), UnionFind::new(smoothing.segments)),
                    |(acc, mut uf), m| (add(acc, m, &mut uf), uf),
                )
                .map(|(acc, _)| acc)
                .reduce(empty, |mut a, b| {
                    for (ra, rb) in a.iter_mut().zip(b) {
                        for (x, y) in ra.iter_mut().zip(rb) {
                            *x += y;
                        }
                    }
                    a
                })
        };
        Ok(counts)
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} diagram, {} crossings, writhe {}: {}",
            if self.closed { "closed" } else { "open" },
            self.crossings.len(),
            self.writhe(),
            self.gauss_code()
        )
    }
}

pub fn diagram_writhe(diagram: &Diagram) -> i32 {
    diagram.crossings.iter().map(|c| i32::from(c.sign)).sum()
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true when two distinct classes were merged.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// For each crossing, the four strand segments meeting there, in
/// counterclockwise order starting from the outgoing over-strand.
struct Smoothing {
    rays: Vec<[usize; 4]>,
    segments: usize,
}

impl Smoothing {
    fn new(d: &Diagram) -> Self {
        let p = d.traversal.len();
        // segment k ends at passage k; the next one begins there
        let segments = if d.closed { p.max(1) } else { p + 1 };
        let outgoing = |k: usize| if d.closed { (k + 1) % p } else { k + 1 };
        let mut over_io = vec![(0, 0); d.crossings.len()];
        let mut under_io = vec![(0, 0); d.crossings.len()];
        for (k, pass) in d.traversal.iter().enumerate() {
            let io = (k, outgoing(k));
            match pass.strand {
                Strand::Over => over_io[pass.crossing] = io,
                Strand::Under => under_io[pass.crossing] = io,
            }
        }
        let rays = d
            .crossings
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let (oi, oo) = over_io[k];
                let (ui, uo) = under_io[k];
                if c.sign > 0 {
                    [oo, uo, oi, ui]
                } else {
                    [oo, ui, oi, uo]
                }
            })
            .collect();
        Self { rays, segments }
    }

    /// `(σ, ||S||)` of the state whose bit `k` set means a B-smoothing at crossing `k`.
    fn evaluate(&self, mask: u64, uf: &mut UnionFind) -> (i32, usize) {
        uf.reset();
        let mut components = self.segments;
        let mut sigma = 0i32;
        for (k, r) in self.rays.iter().enumerate() {
            let (x, y) = if mask >> k & 1 == 0 {
                sigma += 1;
                ((r[1], r[2]), (r[3], r[0]))
            } else {
                sigma -= 1;
                ((r[0], r[1]), (r[2], r[3]))
            };
            components -= usize::from(uf.union(x.0, x.1));
            components -= usize::from(uf.union(y.0, y.1));
        }
        (sigma, components)
    }
}

/// Kauffman bracket `Σ_S A^σ(S) d^(||S|| - 1)`, with `⟨arc⟩ = ⟨O⟩ = 1`.
pub fn bracket(diagram: &Diagram) -> Result<LaurentPoly> {
    let c = diagram.num_crossings();
    if c == 0 {
        return Ok(LaurentPoly::one());
    }
    let counts = diagram.state_counts()?;
    let d = LaurentPoly::loop_value();
    let max_loops = counts.iter().map(|r| r.len()).max().unwrap_or(1);
    let mut d_pows = vec![LaurentPoly::one()];
    for k in 1..max_loops {
        d_pows.push(&d_pows[k - 1] * &d);
    }
    let mut out = LaurentPoly::zero();
    for (si, row) in counts.iter().enumerate() {
        let sigma = si as i32 - c as i32;
        for (loops, &n) in row.iter().enumerate() {
            if n > 0 {
                out += &LaurentPoly::a_pow(n as f64, sigma) * &d_pows[loops - 1];
            }
        }
    }
    Ok(out)
}

/// `(-A^3)^(-wr) ⟨K⟩`.
pub fn normalized_bracket(diagram: &Diagram) -> Result<LaurentPoly> {
    Ok(&LaurentPoly::neg_a_cubed_pow(-diagram.writhe()) * &bracket(diagram)?)
}

/// The two knotoid types of a 4-edge open chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Knotoid4 {
    #[serde(rename = "k0")]
    K0,
    #[serde(rename = "k2.1")]
    K21,
}

impl fmt::Display for Knotoid4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Knotoid4::K0 => "k0",
            Knotoid4::K21 => "k2.1",
        })
    }
}

/// Crossing pattern of a projected 4-edge open chain (edges numbered from 0).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pattern4 {
    /// No crossings.
    Empty,
    /// One crossing, between the given edges.
    Single(usize, usize),
    /// First edge crosses the third and the fourth.
    Bi,
    /// Fourth edge crosses the first and the second.
    Bii,
    /// All three non-adjacent pairs cross.
    C,
}

/// Identify which non-adjacent pairs cross.
pub fn pattern_4edge(diagram: &Diagram) -> Result<Pattern4> {
    if diagram.closed {
        return Err(Error::Unsupported("4-edge classification applies to open chains".into()));
    }
    let mut pairs: Vec<(usize, usize)> = diagram
        .crossings
        .iter()
        .map(|c| (c.over_edge.min(c.under_edge), c.over_edge.max(c.under_edge)))
        .collect();
    pairs.sort_unstable();
    match pairs.as_slice() {
        [] => Ok(Pattern4::Empty),
        [(a, b)] => Ok(Pattern4::Single(*a, *b)),
        [(0, 2), (0, 3)] => Ok(Pattern4::Bi),
        [(0, 3), (1, 3)] => Ok(Pattern4::Bii),
        [(0, 2), (0, 3), (1, 3)] => Ok(Pattern4::C),
        other => Err(Error::Consistency(format!(
            "crossing pattern {other:?} cannot occur for a 4-edge chain"
        ))),
    }
}

/// k2.1 exactly for patterns B(i)/B(ii) whose Gauss code interleaves the two
/// crossings (`a b a b`), alternates over and under, and has equal signs.
/// Otherwise one crossing is a removable kink or the strands slide apart.
///
/// The answer is cross-checked against the normalized bracket; a mismatch is
/// reported as [`Error::Consistency`].
pub fn classify_4edge(diagram: &Diagram) -> Result<Knotoid4> {
    let pattern = pattern_4edge(diagram)?;
    let t = &diagram.traversal;
    let class = match pattern {
        Pattern4::Bi | Pattern4::Bii
            if t[0].crossing == t[2].crossing
                && t[0].strand != t[1].strand
                && diagram.crossings[0].sign == diagram.crossings[1].sign =>
        {
            Knotoid4::K21
        }
        _ => Knotoid4::K0,
    };
    let trivial = normalized_bracket(diagram)?.approx_eq(&LaurentPoly::one(), 1e-9);
    if trivial != (class == Knotoid4::K0) {
        return Err(Error::Consistency(format!(
            "pattern {pattern:?} classified as {class} but the normalized bracket disagrees ({})",
            diagram.gauss_code()
        )));
    }
    Ok(class)
}
