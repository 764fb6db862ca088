//! Entanglement measures of polygonal chains: Gauss linking, writhe and
//! average crossing number, and projection-averaged Kauffman bracket and
//! Jones polynomials, by Monte Carlo over projection directions or, for
//! chains of three and four edges, in closed form.

pub mod chain;
pub mod cli;
pub mod diagram;
pub mod error;
pub mod finiteform;
pub mod io;
pub mod laurent;
pub mod linking;
pub mod montecarlo;
pub mod sphere;
pub mod vec3;

pub use chain::PolyChain;
pub use diagram::{bracket, normalized_bracket, project, Diagram, Knotoid4};
pub use error::{Error, Result};
pub use laurent::{LaurentPoly, Variable};
pub use linking::{acn, crossing_sign, edge_linking, gauss_linking, writhe};
pub use vec3::Point3;
