//! Averages of diagram invariants over uniformly random projection directions.
//!
//! Sample `k` of a run with seed `s` draws its direction from ChaCha8 stream
//! `k` keyed by `s`; degenerate directions are redrawn from the same stream.
//! Samples are accumulated in fixed index blocks that are merged in block
//! order, so results are bit-identical for any thread count.

use crate::chain::PolyChain;
use crate::diagram::{bracket, classify_4edge, normalized_bracket, project, Diagram, Knotoid4};
use crate::error::{Error, Result};
use crate::laurent::{LaurentPoly, Variable};
use crate::vec3::Point3;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Samples per reduction block.
pub const BLOCK: u64 = 4096;

/// Smallest sample count accepted by the estimators.
pub const MIN_SAMPLES: u64 = 100;

/// Redraws allowed for a single sample before giving up on the chain.
const MAX_RETRIES: u32 = 1000;

/// Deterministic stream of uniform directions for one sample index.
pub struct DirectionStream {
    rng: ChaCha8Rng,
}

impl DirectionStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Self { rng }
    }

    fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl Iterator for DirectionStream {
    type Item = Point3;

    fn next(&mut self) -> Option<Point3> {
        let z = 2.0 * self.uniform() - 1.0;
        let phi = 2.0 * PI * self.uniform();
        let r = (1.0 - z * z).max(0.0).sqrt();
        Some(Point3::new(r * phi.cos(), r * phi.sin(), z))
    }
}

/// The first direction of stream `index` under `seed`.
pub fn sample_direction(seed: u64, index: u64) -> Point3 {
    DirectionStream::new(seed, index).next().expect("infinite stream")
}

/// Project along the first generic direction of stream `index`.
///
/// Returns the diagram and the number of rejected draws.
pub fn generic_projection(chain: &PolyChain, seed: u64, index: u64) -> Result<(Diagram, u64)> {
    let mut rejected = 0;
    for xi in DirectionStream::new(seed, index).take(MAX_RETRIES as usize) {
        match project(chain, xi) {
            Ok(d) => return Ok((d, rejected)),
            Err(Error::Degenerate(_)) => rejected += 1,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Conditioning { rejected, attempts: rejected })
}

/// Averaged polynomial with per-coefficient standard errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BracketEstimate {
    pub variable: Variable,
    pub mean: LaurentPoly,
    /// Quarter-unit exponent → standard error of that coefficient.
    pub stderr: BTreeMap<i32, f64>,
    pub samples: u64,
    pub rejected: u64,
    pub seed: u64,
}

impl BracketEstimate {
    /// Change variables `A = t^(-1/4)`.
    pub fn substitute_t(&self) -> Self {
        assert_eq!(self.variable, Variable::A, "estimate is already in t");
        Self {
            variable: Variable::T,
            mean: self.mean.substitute_t(),
            stderr: self.stderr.iter().map(|(&e, &s)| (-e / 4, s)).collect(),
            ..self.clone()
        }
    }

    pub fn stderr_of(&self, quarter_exp: i32) -> f64 {
        self.stderr.get(&quarter_exp).copied().unwrap_or(0.0)
    }

    pub fn rejection_rate(&self) -> f64 {
        self.rejected as f64 / (self.samples + self.rejected) as f64
    }

    /// Largest `|coeff - other| / stderr` over all exponents, treating a
    /// zero standard error as `floor`.
    pub fn max_z_score(&self, other: &LaurentPoly, floor: f64) -> f64 {
        let diff = &self.mean - other;
        diff.terms()
            .map(|(e, c)| c.abs() / self.stderr_of(e).max(floor))
            .fold(0.0, f64::max)
    }
}

#[derive(Default, Clone)]
struct Moments {
    sums: BTreeMap<i32, (f64, f64)>,
    rejected: u64,
    samples: u64,
    /// First sample value and whether all later ones matched it.
    constant: Option<(LaurentPoly, bool)>,
}

impl Moments {
    fn push(&mut self, p: &LaurentPoly, track_constant: bool) {
        for (e, c) in p.terms() {
            let s = self.sums.entry(e).or_insert((0.0, 0.0));
            s.0 += c;
            s.1 += c * c;
        }
        self.samples += 1;
        if track_constant {
            match &mut self.constant {
                None => self.constant = Some((p.clone(), true)),
                Some((first, same)) => *same = *same && first.approx_eq(p, 1e-9),
            }
        }
    }

    fn merge(&mut self, other: Moments) {
        for (e, (a, b)) in other.sums {
            let s = self.sums.entry(e).or_insert((0.0, 0.0));
            s.0 += a;
            s.1 += b;
        }
        self.rejected += other.rejected;
        self.samples += other.samples;
        self.constant = match (self.constant.take(), other.constant) {
            (None, x) | (x, None) => x,
            (Some((p, a)), Some((q, b))) => {
                let same = a && b && p.approx_eq(&q, 1e-9);
                Some((p, same))
            }
        };
    }
}

fn check_samples(n: u64) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::Unsupported(format!("at least {MIN_SAMPLES} samples required, got {n}")));
    }
    Ok(())
}

fn check_rejection(rejected: u64, samples: u64) -> Result<()> {
    if rejected > samples {
        return Err(Error::Conditioning { rejected, attempts: rejected + samples });
    }
    Ok(())
}

fn run_blocks<T, F, G>(n: u64, block: F, merge: G) -> Result<T>
where
    T: Send,
    F: Fn(u64, u64) -> Result<T> + Sync,
    G: Fn(&mut T, T),
{
    let blocks = n.div_ceil(BLOCK);
    let parts: Vec<Result<T>> = (0..blocks)
        .into_par_iter()
        .map(|b| block(b * BLOCK, ((b + 1) * BLOCK).min(n)))
        .collect();
    let mut iter = parts.into_iter();
    let mut acc = iter.next().expect("n >= 1")?;
    for p in iter {
        merge(&mut acc, p?);
    }
    Ok(acc)
}

/// Mean of `f(diagram)` over `n` generic projections.
pub fn mc_average<F>(chain: &PolyChain, n: u64, seed: u64, f: F) -> Result<BracketEstimate>
where
    F: Fn(&Diagram) -> Result<LaurentPoly> + Sync,
{
    mc_average_impl(chain, n, seed, &f, false).map(|(e, _)| e)
}

fn mc_average_impl<F>(
    chain: &PolyChain,
    n: u64,
    seed: u64,
    f: &F,
    track_constant: bool,
) -> Result<(BracketEstimate, bool)>
where
    F: Fn(&Diagram) -> Result<LaurentPoly> + Sync,
{
    check_samples(n)?;
    let m = run_blocks(
        n,
        |lo, hi| {
            let mut m = Moments::default();
            for k in lo..hi {
                let (d, rej) = generic_projection(chain, seed, k)?;
                m.rejected += rej;
                m.push(&f(&d)?, track_constant);
            }
            Ok(m)
        },
        |a, b| a.merge(b),
    )?;
    check_rejection(m.rejected, m.samples)?;
    let nf = m.samples as f64;
    let mut mean = LaurentPoly::zero();
    let mut stderr = BTreeMap::new();
    for (&e, &(s, s2)) in &m.sums {
        let mu = s / nf;
        mean += LaurentPoly::mono(mu, e);
        let var = ((s2 / nf - mu * mu) * nf / (nf - 1.0)).max(0.0);
        let se = (var / nf).sqrt();
        if se > 0.0 || mu != 0.0 {
            stderr.insert(e, se);
        }
    }
    let constant = m.constant.map_or(true, |(_, same)| same);
    Ok((
        BracketEstimate { variable: Variable::A, mean, stderr, samples: m.samples, rejected: m.rejected, seed },
        constant,
    ))
}

/// Projection-averaged Kauffman bracket.
pub fn mc_bracket(chain: &PolyChain, n: u64, seed: u64) -> Result<BracketEstimate> {
    mc_average(chain, n, seed, bracket)
}

/// Projection-averaged normalized bracket `(-A^3)^(-wr) ⟨K⟩`, in `A`.
///
/// For closed chains every sample must give the same polynomial; otherwise
/// [`Error::Consistency`] is returned.
pub fn mc_jones(chain: &PolyChain, n: u64, seed: u64) -> Result<BracketEstimate> {
    let (est, constant) = mc_average_impl(chain, n, seed, &normalized_bracket, chain.is_closed())?;
    if !constant {
        return Err(Error::Consistency(
            "normalized bracket of a closed chain varies between projections".into(),
        ));
    }
    Ok(est)
}

/// Counts of `f(diagram)` over `n` generic projections, with the rejected-draw count.
pub fn mc_tally<K, F>(chain: &PolyChain, n: u64, seed: u64, f: F) -> Result<(BTreeMap<K, u64>, u64)>
where
    K: Ord + Send,
    F: Fn(&Diagram) -> Result<K> + Sync,
{
    check_samples(n)?;
    let (counts, rejected) = run_blocks(
        n,
        |lo, hi| {
            let mut counts = BTreeMap::new();
            let mut rejected = 0;
            for k in lo..hi {
                let (d, rej) = generic_projection(chain, seed, k)?;
                rejected += rej;
                *counts.entry(f(&d)?).or_insert(0u64) += 1;
            }
            Ok((counts, rejected))
        },
        |a, b| {
            for (k, v) in b.0 {
                *a.0.entry(k).or_insert(0) += v;
            }
            a.1 += b.1;
        },
    )?;
    check_rejection(rejected, n)?;
    Ok((counts, rejected))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionEntry {
    pub class: Knotoid4,
    pub writhe: i32,
    pub probability: f64,
    pub stderr: f64,
}

/// Empirical joint distribution of knotoid type and writhe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionEstimate {
    pub entries: Vec<DistributionEntry>,
    pub samples: u64,
    pub rejected: u64,
    pub seed: u64,
}

impl DistributionEstimate {
    pub fn probability(&self, class: Knotoid4, writhe: i32) -> f64 {
        self.entries
            .iter()
            .find(|e| e.class == class && e.writhe == writhe)
            .map_or(0.0, |e| e.probability)
    }

    /// Total probability of a class and its binomial standard error.
    pub fn class_probability(&self, class: Knotoid4) -> (f64, f64) {
        let p: f64 = self.entries.iter().filter(|e| e.class == class).map(|e| e.probability).sum();
        (p, (p * (1.0 - p) / self.samples as f64).sqrt())
    }
}

/// Joint distribution of `(knotoid type, writhe)` for a 4-edge open chain.
pub fn mc_distribution(chain: &PolyChain, n: u64, seed: u64) -> Result<DistributionEstimate> {
    if chain.is_closed() || chain.num_edges() != 4 {
        return Err(Error::Unsupported("knotoid classification needs an open chain with 4 edges".into()));
    }
    let (counts, rejected) = mc_tally(chain, n, seed, |d| Ok((classify_4edge(d)?, d.writhe())))?;
    let nf = n as f64;
    let entries = counts
        .into_iter()
        .map(|((class, writhe), c)| {
            let p = c as f64 / nf;
            DistributionEntry { class, writhe, probability: p, stderr: (p * (1.0 - p) / nf).sqrt() }
        })
        .collect();
    Ok(DistributionEstimate { entries, samples: n, rejected, seed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_deterministic_unit_vectors() {
        for i in 0..100 {
            let a = sample_direction(7, i);
            assert_eq!(a, sample_direction(7, i));
            assert!((a.norm() - 1.0).abs() < 1e-12);
        }
        assert_ne!(sample_direction(7, 0), sample_direction(8, 0));
        assert_ne!(sample_direction(7, 0), sample_direction(7, 1));
    }

    #[test]
    fn planar_triangle_bracket_is_one() {
        let c = PolyChain::from_coords(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], true).unwrap();
        let est = mc_bracket(&c, 1000, 3).unwrap();
        assert_eq!(est.mean, LaurentPoly::one());
        assert_eq!(est.stderr_of(0), 0.0);
    }

    #[test]
    fn too_few_samples() {
        let c = PolyChain::from_coords(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], true).unwrap();
        assert!(mc_bracket(&c, 10, 0).is_err());
    }

    #[test]
    fn estimate_json_round_trip() {
        let c = PolyChain::from_coords(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.3], [0.2, -1.0, -0.4]], false).unwrap();
        let est = mc_bracket(&c, 500, 1).unwrap();
        let back: BracketEstimate = serde_json::from_str(&serde_json::to_string(&est).unwrap()).unwrap();
        assert_eq!(back, est);
    }
}
