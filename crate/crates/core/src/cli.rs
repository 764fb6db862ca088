//! The `chainpoly` command line.
//!
//! [`run`] does all the work and returns the report as a string, so output
//! can be compared byte for byte in tests.

use crate::chain::PolyChain;
use crate::diagram::Knotoid4;
use crate::error::{Error, Result};
use crate::finiteform;
use crate::io::parse_chain_file;
use crate::laurent::{exponent_label, LaurentPoly, Variable};
use crate::linking::{acn, gauss_linking, writhe};
use crate::montecarlo::{self, BracketEstimate, DistributionEntry, MIN_SAMPLES};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::PathBuf;

/// z-score above which `--verify` reports a mismatch.
pub const VERIFY_Z: f64 = 3.0;

#[derive(Parser, Debug, Clone)]
#[command(name = "chainpoly", version, about = "Entanglement measures of polygonal chains in 3-space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Gauss linking integral of every pair of input chains
    Lk(RunArgs),
    /// Writhe of each chain
    Writhe(RunArgs),
    /// Average crossing number of each chain
    Acn(RunArgs),
    /// Projection-averaged Kauffman bracket
    Bracket(RunArgs),
    /// Projection-averaged normalized bracket (Jones polynomial)
    Jones(RunArgs),
    /// Joint distribution of knotoid type and writhe of a 4-edge open chain
    Distribution(RunArgs),
    /// One row per frame: polynomial coefficients, writhe, acn, P(k2.1)
    Trajectory(RunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    /// Chain files, text or JSON; chains from all files are read in order
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Monte Carlo projection directions
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Require the closed form (chains with at most 4 edges); used by default where available
    #[arg(long, conflicts_with = "mc")]
    pub exact: bool,
    /// Always use Monte Carlo
    #[arg(long)]
    pub mc: bool,
    /// Output variable, `A` or `t` (default: `t` for jones and trajectory, `A` for bracket)
    #[arg(long)]
    pub variable: Option<Variable>,
    /// Output format (default: csv for trajectory, text otherwise)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Recompute closed-form results by Monte Carlo and fail beyond 3 standard errors
    #[arg(long)]
    pub verify: bool,
    /// Evaluate polynomials at these values of the output variable
    #[arg(long, value_delimiter = ',')]
    pub eval: Vec<f64>,
    /// Invariant tracked by `trajectory`
    #[arg(long, value_enum, default_value_t = Invariant::Jones)]
    pub invariant: Invariant,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Invariant {
    Bracket,
    Jones,
}

/// Output of a run: the report for stdout and warnings for stderr.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    pub stdout: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub samples: u64,
    pub seed: u64,
    pub max_z: f64,
    pub passed: bool,
}

/// A polynomial result for one chain.
#[derive(Debug, Clone, Serialize)]
pub struct PolyResult {
    pub chain: usize,
    pub method: Method,
    pub variable: Variable,
    /// `[quarter_exponent, coefficient]` pairs, highest exponent first.
    pub polynomial: LaurentPoly,
    /// Quarter exponent to standard error; empty for closed forms.
    pub stderr: BTreeMap<i32, f64>,
    pub samples: u64,
    pub rejected: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub eval: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<Verification>,
}

#[derive(Debug, Clone, Serialize)]
struct ScalarResult {
    chain: usize,
    value: f64,
}

#[derive(Debug, Clone, Serialize)]
struct PairResult {
    a: usize,
    b: usize,
    lk: f64,
}

#[derive(Debug, Clone, Serialize)]
struct DistributionResult {
    chain: usize,
    method: Method,
    entries: Vec<DistributionEntry>,
    samples: u64,
    rejected: u64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify: Option<Verification>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Frame {
    pub frame: usize,
    #[serde(flatten)]
    pub result: PolyResult,
    pub writhe: f64,
    pub acn: f64,
    pub p_k21: Option<f64>,
    pub rejected_rate: f64,
}

pub fn run(cli: &Cli) -> Result<Report> {
    let mut report = Report::default();
    match &cli.command {
        Command::Lk(a) => lk(a, &mut report)?,
        Command::Writhe(a) => scalar(a, "writhe", writhe, &mut report)?,
        Command::Acn(a) => scalar(a, "acn", acn, &mut report)?,
        Command::Bracket(a) => polys(a, Invariant::Bracket, &mut report)?,
        Command::Jones(a) => polys(a, Invariant::Jones, &mut report)?,
        Command::Distribution(a) => distribution(a, &mut report)?,
        Command::Trajectory(a) => trajectory(a, &mut report)?,
    }
    Ok(report)
}

fn read_chains(args: &RunArgs) -> Result<Vec<PolyChain>> {
    let mut chains = Vec::new();
    for path in &args.inputs {
        chains.extend(parse_chain_file(path).map_err(|e| match e {
            Error::Parse { line, column, message } => Error::Parse {
                line,
                column,
                message: format!("{}: {message}", path.display()),
            },
            Error::InvalidChain(m) => Error::InvalidChain(format!("{}: {m}", path.display())),
            e => e,
        })?);
    }
    Ok(chains)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("results serialize");
    s.push('\n');
    s
}

fn lk(args: &RunArgs, report: &mut Report) -> Result<()> {
    let chains = read_chains(args)?;
    if chains.len() < 2 {
        return Err(Error::Unsupported("lk needs at least two chains".into()));
    }
    let mut rows = Vec::new();
    for a in 0..chains.len() {
        for b in a + 1..chains.len() {
            rows.push(PairResult { a, b, lk: gauss_linking(&chains[a], &chains[b])? });
        }
    }
    report.stdout = match args.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&rows),
        Format::Csv => rows.iter().fold("a,b,lk\n".to_string(), |mut s, r| {
            let _ = writeln!(s, "{},{},{:?}", r.a, r.b, r.lk);
            s
        }),
        Format::Text => rows.iter().fold(String::new(), |mut s, r| {
            let _ = writeln!(s, "lk(chain {}, chain {}) = {:.9}", r.a, r.b, r.lk);
            s
        }),
    };
    Ok(())
}

fn scalar(args: &RunArgs, name: &str, f: fn(&PolyChain) -> f64, report: &mut Report) -> Result<()> {
    let rows: Vec<ScalarResult> = read_chains(args)?
        .iter()
        .enumerate()
        .map(|(chain, c)| ScalarResult { chain, value: f(c) })
        .collect();
    report.stdout = match args.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&rows),
        Format::Csv => rows.iter().fold(format!("chain,{name}\n"), |mut s, r| {
            let _ = writeln!(s, "{},{:?}", r.chain, r.value);
            s
        }),
        Format::Text => rows.iter().fold(String::new(), |mut s, r| {
            let _ = writeln!(s, "{name}(chain {}) = {:.9}", r.chain, r.value);
            s
        }),
    };
    Ok(())
}

/// The closed form of `inv` in `A`, if this chain has one.
fn exact_form(chain: &PolyChain, inv: Invariant, seed: u64) -> Option<Result<LaurentPoly>> {
    match inv {
        Invariant::Bracket => finiteform::exact_bracket(chain),
        Invariant::Jones => finiteform::exact_jones(chain, seed),
    }
}

fn mc_estimate(chain: &PolyChain, inv: Invariant, samples: u64, seed: u64) -> Result<BracketEstimate> {
    match inv {
        Invariant::Bracket => montecarlo::mc_bracket(chain, samples, seed),
        Invariant::Jones => montecarlo::mc_jones(chain, samples, seed),
    }
}

fn default_variable(inv: Invariant) -> Variable {
    match inv {
        Invariant::Bracket => Variable::A,
        Invariant::Jones => Variable::T,
    }
}

fn in_variable(p: &LaurentPoly, var: Variable) -> LaurentPoly {
    match var {
        Variable::A => p.clone(),
        Variable::T => p.substitute_t(),
    }
}

fn stderr_in_variable(se: &BTreeMap<i32, f64>, var: Variable) -> BTreeMap<i32, f64> {
    match var {
        Variable::A => se.clone(),
        Variable::T => se.iter().map(|(&e, &s)| (-e / 4, s)).collect(),
    }
}

/// Standard error assumed for a coefficient that never varied in `n` samples.
fn stderr_floor(n: u64) -> f64 {
    1.0 / n as f64
}

fn compute_poly(
    chain: &PolyChain,
    index: usize,
    args: &RunArgs,
    inv: Invariant,
    warnings: &mut Vec<String>,
) -> Result<PolyResult> {
    let var = args.variable.unwrap_or(default_variable(inv));
    let exact = if args.mc { None } else { exact_form(chain, inv, args.seed) };
    let exact = match exact {
        None => {
            if args.exact {
                warnings.push(format!(
                    "chain {index}: no closed form for {} edges, using Monte Carlo",
                    chain.num_edges()
                ));
            }
            None
        }
        Some(Ok(p)) => Some(p),
        Some(Err(Error::Degenerate(m))) if !args.exact => {
            warnings.push(format!("chain {index}: closed form not applicable ({m}), using Monte Carlo"));
            None
        }
        Some(Err(e)) => return Err(e),
    };
    let (poly, stderr, samples, rejected, verify) = match exact {
        Some(p) => {
            let verify = if args.verify {
                let est = mc_estimate(chain, inv, args.samples, args.seed)?;
                let z = est.max_z_score(&p, stderr_floor(est.samples));
                Some(Verification { samples: est.samples, seed: args.seed, max_z: z, passed: z <= VERIFY_Z })
            } else {
                None
            };
            (p, BTreeMap::new(), 0, 0, verify)
        }
        None => {
            if args.verify {
                warnings.push(format!("chain {index}: nothing to verify without a closed form"));
            }
            let est = mc_estimate(chain, inv, args.samples, args.seed)?;
            (est.mean, est.stderr, est.samples, est.rejected, None)
        }
    };
    let polynomial = in_variable(&poly, var);
    let eval = args
        .eval
        .iter()
        .map(|&x| Ok([x, polynomial.eval(x)?]))
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyResult {
        chain: index,
        method: if samples == 0 { Method::Exact } else { Method::MonteCarlo },
        variable: var,
        polynomial,
        stderr: stderr_in_variable(&stderr, var),
        samples,
        rejected,
        seed: args.seed,
        eval,
        verify,
    })
}

fn check_samples(args: &RunArgs) -> Result<()> {
    if args.samples < MIN_SAMPLES {
        return Err(Error::Unsupported(format!("--samples must be at least {MIN_SAMPLES}")));
    }
    Ok(())
}

fn verification_failures(results: &[&Option<Verification>]) -> Result<()> {
    let failed: Vec<String> = results
        .iter()
        .enumerate()
        .filter_map(|(i, v)| v.as_ref().filter(|v| !v.passed).map(|v| format!("chain {i} (z = {:.2})", v.max_z)))
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::Consistency(format!("closed form and Monte Carlo disagree: {}", failed.join(", "))))
    }
}

fn polys(args: &RunArgs, inv: Invariant, report: &mut Report) -> Result<()> {
    check_samples(args)?;
    let chains = read_chains(args)?;
    let mut results = Vec::with_capacity(chains.len());
    for (i, c) in chains.iter().enumerate() {
        results.push(compute_poly(c, i, args, inv, &mut report.warnings)?);
    }
    report.stdout = match args.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&results),
        Format::Csv => poly_csv("chain", results.iter().map(|r| (r.chain, r, Vec::new())), &[], &args.eval),
        Format::Text => results.iter().fold(String::new(), |mut s, r| {
            write_poly_text(&mut s, &format!("chain {}", r.chain), r);
            s
        }),
    };
    verification_failures(&results.iter().map(|r| &r.verify).collect::<Vec<_>>())
}

fn write_poly_text(s: &mut String, label: &str, r: &PolyResult) {
    let shown = LaurentPoly::from_pairs(r.polynomial.terms().map(|(e, c)| (e, round_to(c, 6))));
    let method = match r.method {
        Method::Exact => "exact".to_string(),
        Method::MonteCarlo => format!("monte carlo, {} samples, seed {}", r.samples, r.seed),
    };
    let _ = writeln!(s, "{label} ({method}): {}", shown.display(r.variable));
    if r.method == Method::MonteCarlo {
        let sym = if r.variable == Variable::A { "A" } else { "t" };
        for (e, se) in r.stderr.iter().rev() {
            let _ = writeln!(s, "  stderr[{sym}^{}] = {:.2e}", exponent_label(*e), se);
        }
    }
    for [x, y] in &r.eval {
        let _ = writeln!(s, "  value at {x} = {y:.9}");
    }
    if let Some(v) = &r.verify {
        let _ = writeln!(
            s,
            "  verify: {} (max z = {:.2}, {} samples)",
            if v.passed { "ok" } else { "MISMATCH" },
            v.max_z,
            v.samples
        );
    }
}

fn round_to(x: f64, digits: i32) -> f64 {
    let s = 10f64.powi(digits);
    (x * s).round() / s
}

/// CSV with one column per exponent over the union of all rows, zero-filled,
/// then `extra` columns, `eval:<x>` columns and, if any row is Monte Carlo,
/// `stderr:<exp>` columns.
fn poly_csv<'a>(
    key: &str,
    rows: impl Iterator<Item = (usize, &'a PolyResult, Vec<String>)>,
    extra: &[&str],
    eval: &[f64],
) -> String {
    let rows: Vec<_> = rows.collect();
    let exps: BTreeSet<i32> = rows.iter().flat_map(|(_, r, _)| r.polynomial.terms().map(|(e, _)| e)).collect();
    let se_exps: BTreeSet<i32> = rows.iter().flat_map(|(_, r, _)| r.stderr.keys().copied()).collect();
    let mut s = String::from(key);
    for e in exps.iter().rev() {
        let _ = write!(s, ",term:{}", exponent_label(*e));
    }
    for x in eval {
        let _ = write!(s, ",eval:{x}");
    }
    for name in extra {
        let _ = write!(s, ",{name}");
    }
    for e in se_exps.iter().rev() {
        let _ = write!(s, ",stderr:{}", exponent_label(*e));
    }
    s.push('\n');
    for (k, r, cols) in &rows {
        let _ = write!(s, "{k}");
        for e in exps.iter().rev() {
            let _ = write!(s, ",{:?}", r.polynomial.coeff(*e));
        }
        for [_, y] in &r.eval {
            let _ = write!(s, ",{y:?}");
        }
        for c in cols {
            let _ = write!(s, ",{c}");
        }
        for e in se_exps.iter().rev() {
            let _ = write!(s, ",{:?}", r.stderr.get(e).copied().unwrap_or(0.0));
        }
        s.push('\n');
    }
    s
}

fn exact_distribution(chain: &PolyChain) -> Result<Vec<DistributionEntry>> {
    let p = finiteform::e4_probabilities(chain)?;
    let mut entries = Vec::new();
    if p.p_k21 > 0.0 {
        entries.push(DistributionEntry { class: Knotoid4::K21, writhe: p.k21_writhe, probability: p.p_k21, stderr: 0.0 });
    }
    for (k, &q) in p.p_k0.iter().enumerate() {
        if q > 0.0 {
            entries.push(DistributionEntry { class: Knotoid4::K0, writhe: k as i32 - 2, probability: q, stderr: 0.0 });
        }
    }
    entries.sort_by_key(|e| (e.class, e.writhe));
    Ok(entries)
}

fn distribution(args: &RunArgs, report: &mut Report) -> Result<()> {
    check_samples(args)?;
    let chains = read_chains(args)?;
    let mut results = Vec::new();
    for (i, c) in chains.iter().enumerate() {
        if c.is_closed() || c.num_edges() != 4 {
            return Err(Error::Unsupported(format!("chain {i}: distribution needs an open chain with 4 edges")));
        }
        let exact = if args.mc {
            None
        } else {
            match exact_distribution(c) {
                Ok(e) => Some(e),
                Err(Error::Degenerate(m)) if !args.exact => {
                    report.warnings.push(format!("chain {i}: closed form not applicable ({m}), using Monte Carlo"));
                    None
                }
                Err(e) => return Err(e),
            }
        };
        let result = match exact {
            Some(entries) => {
                let verify = if args.verify {
                    let est = montecarlo::mc_distribution(c, args.samples, args.seed)?;
                    let floor = stderr_floor(est.samples);
                    let keys: BTreeSet<(Knotoid4, i32)> =
                        entries.iter().chain(&est.entries).map(|e| (e.class, e.writhe)).collect();
                    let z = keys
                        .iter()
                        .map(|&(class, w)| {
                            let p = entries.iter().find(|e| (e.class, e.writhe) == (class, w)).map_or(0.0, |e| e.probability);
                            let q = est.probability(class, w);
                            let se = (p * (1.0 - p) / est.samples as f64).sqrt().max(floor);
                            (p - q).abs() / se
                        })
                        .fold(0.0, f64::max);
                    Some(Verification { samples: est.samples, seed: args.seed, max_z: z, passed: z <= VERIFY_Z })
                } else {
                    None
                };
                DistributionResult { chain: i, method: Method::Exact, entries, samples: 0, rejected: 0, seed: args.seed, verify }
            }
            None => {
                let est = montecarlo::mc_distribution(c, args.samples, args.seed)?;
                DistributionResult {
                    chain: i,
                    method: Method::MonteCarlo,
                    entries: est.entries,
                    samples: est.samples,
                    rejected: est.rejected,
                    seed: args.seed,
                    verify: None,
                }
            }
        };
        results.push(result);
    }
    report.stdout = match args.format.unwrap_or(Format::Text) {
        Format::Json => to_json(&results),
        Format::Csv => {
            let mut s = String::from("chain,class,writhe,probability,stderr\n");
            for r in &results {
                for e in &r.entries {
                    let _ = writeln!(s, "{},{},{},{:?},{:?}", r.chain, e.class, e.writhe, e.probability, e.stderr);
                }
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &results {
                let _ = writeln!(s, "chain {} ({}):", r.chain, if r.method == Method::Exact { "exact" } else { "monte carlo" });
                for e in &r.entries {
                    let _ = write!(s, "  {:<5} writhe {:+}  {:.6}", e.class.to_string(), e.writhe, e.probability);
                    if r.method == Method::MonteCarlo {
                        let _ = write!(s, " ± {:.6}", e.stderr);
                    }
                    s.push('\n');
                }
                if let Some(v) = &r.verify {
                    let _ = writeln!(s, "  verify: {} (max z = {:.2})", if v.passed { "ok" } else { "MISMATCH" }, v.max_z);
                }
            }
            s
        }
    };
    verification_failures(&results.iter().map(|r| &r.verify).collect::<Vec<_>>())
}

/// Per-frame rows for a sequence of chains with equal shape.
pub fn trajectory_frames(chains: &[PolyChain], args: &RunArgs) -> Result<(Vec<Frame>, Vec<String>)> {
    let first = chains.first().ok_or_else(|| Error::Unsupported("no frames".into()))?;
    for (i, c) in chains.iter().enumerate() {
        if c.num_vertices() != first.num_vertices() || c.is_closed() != first.is_closed() {
            return Err(Error::InvalidChain(format!(
                "frame {i} has {} {} vertices, frame 0 has {} {}",
                c.num_vertices(),
                if c.is_closed() { "closed" } else { "open" },
                first.num_vertices(),
                if first.is_closed() { "closed" } else { "open" },
            )));
        }
    }
    let rows: Vec<Result<(Frame, Vec<String>)>> = chains
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut warnings = Vec::new();
            let result = compute_poly(c, i, args, args.invariant, &mut warnings)?;
            let p_k21 = if !c.is_closed() && c.num_edges() == 4 {
                match finiteform::p_k21(c) {
                    Ok(k) => Some(k.probability),
                    Err(Error::Degenerate(_)) => None,
                    Err(e) => return Err(e),
                }
            } else {
                None
            };
            let rejected_rate = if result.samples == 0 {
                0.0
            } else {
                result.rejected as f64 / (result.samples + result.rejected) as f64
            };
            Ok((Frame { frame: i, writhe: writhe(c), acn: acn(c), p_k21, rejected_rate, result }, warnings))
        })
        .collect();
    let mut frames = Vec::with_capacity(rows.len());
    let mut warnings = Vec::new();
    for r in rows {
        let (f, w) = r?;
        frames.push(f);
        warnings.extend(w);
    }
    Ok((frames, warnings))
}

fn trajectory(args: &RunArgs, report: &mut Report) -> Result<()> {
    check_samples(args)?;
    let chains = read_chains(args)?;
    let (frames, warnings) = trajectory_frames(&chains, args)?;
    report.warnings.extend(warnings);
    report.stdout = match args.format.unwrap_or(Format::Csv) {
        Format::Json => to_json(&frames),
        Format::Csv => poly_csv(
            "frame",
            frames.iter().map(|f| {
                let cols = vec![
                    format!("{:?}", f.writhe),
                    format!("{:?}", f.acn),
                    f.p_k21.map_or(String::new(), |p| format!("{p:?}")),
                    format!("{:?}", f.rejected_rate),
                ];
                (f.frame, &f.result, cols)
            }),
            &["writhe", "acn", "p_k21", "rejected_rate"],
            &args.eval,
        ),
        Format::Text => frames.iter().fold(String::new(), |mut s, f| {
            write_poly_text(&mut s, &format!("frame {}", f.frame), &f.result);
            let _ = write!(s, "  writhe = {:.6}, acn = {:.6}", f.writhe, f.acn);
            if let Some(p) = f.p_k21 {
                let _ = write!(s, ", P(k2.1) = {p:.6}");
            }
            s.push('\n');
            s
        }),
    };
    verification_failures(&frames.iter().map(|f| &f.result.verify).collect::<Vec<_>>())
}
