use crate::error::{Error, Result};
use crate::vec3::Point3;
use serde::{Deserialize, Serialize};

/// Minimum admissible edge length.
pub const MIN_EDGE_LENGTH: f64 = 1e-12;

/// An ordered polygonal chain in 3-space, open or closed.
///
/// Edge `i` runs from vertex `i` to vertex `i + 1` (mod `n` when closed).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain", into = "RawChain")]
pub struct PolyChain {
    vertices: Vec<Point3>,
    closed: bool,
}

#[derive(Serialize, Deserialize)]
struct RawChain {
    #[serde(default)]
    closed: bool,
    vertices: Vec<[f64; 3]>,
}

impl TryFrom<RawChain> for PolyChain {
    type Error = Error;
    fn try_from(raw: RawChain) -> Result<Self> {
        PolyChain::new(raw.vertices.into_iter().map(Point3::from).collect(), raw.closed)
    }
}

impl From<PolyChain> for RawChain {
    fn from(c: PolyChain) -> Self {
        RawChain {
            closed: c.closed,
            vertices: c.vertices.iter().map(|p| p.to_array()).collect(),
        }
    }
}

impl PolyChain {
    pub fn new(vertices: Vec<Point3>, closed: bool) -> Result<Self> {
        let min = if closed { 3 } else { 2 };
        if vertices.len() < min {
            return Err(Error::InvalidChain(format!(
                "{} chain needs at least {min} vertices, got {}",
                if closed { "closed" } else { "open" },
                vertices.len()
            )));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidChain(format!("vertex {i} has a non-finite coordinate")));
        }
        let chain = Self { vertices, closed };
        for i in 0..chain.num_edges() {
            let (a, b) = chain.edge(i);
            if a.distance(b) <= MIN_EDGE_LENGTH {
                return Err(Error::InvalidChain(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % chain.vertices.len()
                )));
            }
        }
        Ok(chain)
    }

    pub fn open(vertices: Vec<Point3>) -> Result<Self> {
        Self::new(vertices, false)
    }

    pub fn closed(vertices: Vec<Point3>) -> Result<Self> {
        Self::new(vertices, true)
    }

    /// Convenience constructor from coordinate triples.
    pub fn from_coords(coords: &[[f64; 3]], closed: bool) -> Result<Self> {
        Self::new(coords.iter().copied().map(Point3::from).collect(), closed)
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Point3 {
        self.vertices[i % self.vertices.len()]
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len() - 1
        }
    }

    /// Endpoints of edge `i`.
    pub fn edge(&self, i: usize) -> (Point3, Point3) {
        (self.vertex(i), self.vertex(i + 1))
    }

    /// Whether edges `i < j` share an endpoint.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        let (i, j) = (i.min(j), i.max(j));
        j == i || j == i + 1 || (self.closed && i == 0 && j + 1 == self.num_edges())
    }

    /// All pairs `(i, j)`, `i < j`, of edges that share no endpoint.
    pub fn nonadjacent_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.num_edges();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .filter(move |&(i, j)| !self.adjacent(i, j))
    }

    /// The same curve traversed backwards.
    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self { vertices: v, closed: self.closed }
    }

    /// Apply a map to every vertex; the result is re-validated.
    pub fn map_vertices(&self, f: impl Fn(Point3) -> Point3) -> Result<Self> {
        Self::new(self.vertices.iter().copied().map(f).collect(), self.closed)
    }

    /// Reflection through the `z = 0` plane.
    pub fn mirrored(&self) -> Self {
        Self {
            vertices: self.vertices.iter().map(|p| Point3::new(p.x, p.y, -p.z)).collect(),
            closed: self.closed,
        }
    }

    /// Replace vertex `i`.
    pub fn with_vertex(&self, i: usize, p: Point3) -> Result<Self> {
        let mut v = self.vertices.clone();
        v[i] = p;
        Self::new(v, self.closed)
    }

    /// Insert the midpoint of every edge.
    pub fn subdivided(&self) -> Self {
        let mut v = Vec::with_capacity(2 * self.vertices.len());
        for i in 0..self.num_edges() {
            let (a, b) = self.edge(i);
            v.push(a);
            v.push((a + b) * 0.5);
        }
        if !self.closed {
            v.push(*self.vertices.last().expect("non-empty"));
        }
        Self { vertices: v, closed: self.closed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(PolyChain::from_coords(&[[0.0, 0.0, 0.0]], false).is_err());
        assert!(PolyChain::from_coords(&[[0.0; 3], [1.0, 0.0, 0.0]], true).is_err());
        let dup = PolyChain::from_coords(&[[0.0; 3], [0.0; 3], [1.0, 0.0, 0.0]], false);
        assert!(matches!(dup, Err(Error::InvalidChain(_))));
        let wrap = PolyChain::from_coords(&[[0.0; 3], [1.0, 0.0, 0.0], [0.0; 3]], true);
        assert!(wrap.is_err());
        assert!(PolyChain::from_coords(&[[f64::NAN, 0.0, 0.0], [1.0, 0.0, 0.0]], false).is_err());
    }

    #[test]
    fn pairs_and_adjacency() {
        let open = PolyChain::from_coords(&[[0.0; 3], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0], [0.0, 2.0, 0.0]], false).unwrap();
        assert_eq!(open.num_edges(), 4);
        assert_eq!(open.nonadjacent_pairs().collect::<Vec<_>>(), vec![(0, 2), (0, 3), (1, 3)]);
        let closed = PolyChain::from_coords(&[[0.0; 3], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 1.0]], true).unwrap();
        assert_eq!(closed.num_edges(), 4);
        assert_eq!(closed.nonadjacent_pairs().collect::<Vec<_>>(), vec![(0, 2), (1, 3)]);
        assert!(closed.adjacent(0, 3));
    }

    #[test]
    fn subdivision_keeps_endpoints() {
        let c = PolyChain::from_coords(&[[0.0; 3], [2.0, 0.0, 0.0], [2.0, 2.0, 0.0]], false).unwrap();
        let s = c.subdivided();
        assert_eq!(s.num_edges(), 4);
        assert_eq!(s.vertices()[1], Point3::new(1.0, 0.0, 0.0));
        assert_eq!(*s.vertices().last().unwrap(), Point3::new(2.0, 2.0, 0.0));
        let closed = PolyChain::from_coords(&[[0.0; 3], [2.0, 0.0, 0.0], [2.0, 2.0, 0.0]], true).unwrap();
        assert_eq!(closed.subdivided().num_edges(), 6);
    }

    #[test]
    fn json_form() {
        let c: PolyChain = serde_json::from_str(r#"{"closed": true, "vertices": [[0,0,0],[1,0,0],[0,1,0]]}"#).unwrap();
        assert!(c.is_closed());
        assert_eq!(c.num_edges(), 3);
        let bad = serde_json::from_str::<PolyChain>(r#"{"vertices": [[0,0,0],[0,0,0]]}"#);
        assert!(bad.is_err());
    }
}
