//! Sparse Laurent polynomials in one variable with exponents in quarter units.
//!
//! Exponents are stored as integers counting quarters, so `A^3` is the key
//! `12` and `t^(3/2)` is the key `6`. Bracket polynomials live in the
//! variable `A` (keys divisible by 4); the substitution `A = t^(-1/4)` maps
//! them to the Jones variable `t` with half-integer exponents.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Coefficients with magnitude below this are dropped after arithmetic.
pub const ZERO_CUTOFF: f64 = 1e-15;

/// Default comparison tolerance for exact code paths.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Which indeterminate a polynomial is rendered in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Variable {
    #[default]
    A,
    #[serde(rename = "t")]
    T,
}

impl Variable {
    fn symbol(self) -> &'static str {
        match self {
            Variable::A => "A",
            Variable::T => "t",
        }
    }
}

impl std::str::FromStr for Variable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Variable::A),
            "t" | "T" => Ok(Variable::T),
            other => Err(Error::Unsupported(format!("unknown variable `{other}`"))),
        }
    }
}

/// Real-coefficient Laurent polynomial with quarter-integer exponents.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<(i32, f64)>", into = "Vec<(i32, f64)>")]
pub struct LaurentPoly {
    terms: BTreeMap<i32, f64>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::mono(1.0, 0)
    }

    /// `coeff · X^(quarter_exp/4)`.
    pub fn mono(coeff: f64, quarter_exp: i32) -> Self {
        let mut p = Self::zero();
        p.add_term(quarter_exp, coeff);
        p
    }

    /// `coeff · A^exp` for an integer power of `A`.
    pub fn a_pow(coeff: f64, exp: i32) -> Self {
        Self::mono(coeff, 4 * exp)
    }

    /// `(-A^3)^k`, the kink factor of the bracket.
    pub fn neg_a_cubed_pow(k: i32) -> Self {
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        Self::a_pow(sign, 3 * k)
    }

    /// The loop value `d = -A^2 - A^-2`.
    pub fn loop_value() -> Self {
        Self::a_pow(-1.0, 2) + Self::a_pow(-1.0, -2)
    }

    /// Build from `(quarter_exp, coeff)` pairs; repeated exponents accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (i32, f64)>>(pairs: I) -> Self {
        let mut p = Self::zero();
        for (e, c) in pairs {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, quarter_exp: i32, coeff: f64) {
        if coeff == 0.0 {
            return;
        }
        let slot = self.terms.entry(quarter_exp).or_insert(0.0);
        *slot += coeff;
        if slot.abs() < ZERO_CUTOFF {
            self.terms.remove(&quarter_exp);
        }
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i32, f64)> + '_ {
        self.terms.iter().map(|(&e, &c)| (e, c))
    }

    /// Coefficient of `X^(quarter_exp/4)`, zero when absent.
    pub fn coeff(&self, quarter_exp: i32) -> f64 {
        self.terms.get(&quarter_exp).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_pairs(self.terms().map(|(e, c)| (e, c * s)))
    }

    /// Non-negative integer power.
    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Map `A^e` to `t^(-e/4)`.
    ///
    /// # Panics
    /// If some exponent is not an integer power of `A`.
    pub fn substitute_t(&self) -> Self {
        Self::from_pairs(self.terms().map(|(q, c)| {
            assert!(
                q % 4 == 0,
                "substitute_t expects integer powers of A, found quarter exponent {q}"
            );
            (-q / 4, c)
        }))
    }

    /// Inverse of [`substitute_t`](Self::substitute_t) on its image: `t^(q/4)` back to `A^(-q)`.
    pub fn substitute_a(&self) -> Self {
        Self::from_pairs(self.terms().map(|(q, c)| (-4 * q, c)))
    }

    /// The mirror image `A ↦ A^-1`.
    pub fn mirror(&self) -> Self {
        Self::from_pairs(self.terms().map(|(q, c)| (-q, c)))
    }

    /// Numeric value at `x > 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!(
                "fractional exponents need a positive argument, got {x}"
            )));
        }
        Ok(self
            .terms()
            .map(|(q, c)| c * x.powf(q as f64 / 4.0))
            .sum())
    }

    /// Euclidean norm of the coefficient difference over the union of exponents.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut keys: Vec<i32> = self.terms.keys().chain(other.terms.keys()).copied().collect();
        keys.sort_unstable();
        keys.dedup();
        keys.iter()
            .map(|&k| (self.coeff(k) - other.coeff(k)).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Coefficient-wise comparison with absolute tolerance.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .all(|&k| (self.coeff(k) - other.coeff(k)).abs() <= tol)
    }

    /// Largest absolute coefficient deviation.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.terms
            .keys()
            .chain(other.terms.keys())
            .map(|&k| (self.coeff(k) - other.coeff(k)).abs())
            .fold(0.0, f64::max)
    }

    /// Sum of coefficients; the value at `X = 1`.
    pub fn coefficient_sum(&self) -> f64 {
        self.terms.values().sum()
    }

    /// Drop coefficients with magnitude at most `tol`.
    pub fn chop(&self, tol: f64) -> Self {
        Self::from_pairs(self.terms().filter(|&(_, c)| c.abs() > tol))
    }

    pub fn display(&self, var: Variable) -> Display<'_> {
        Display { poly: self, var }
    }
}

impl From<Vec<(i32, f64)>> for LaurentPoly {
    fn from(v: Vec<(i32, f64)>) -> Self {
        Self::from_pairs(v)
    }
}

impl From<LaurentPoly> for Vec<(i32, f64)> {
    fn from(p: LaurentPoly) -> Self {
        p.terms().rev().collect()
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(mut self, rhs: LaurentPoly) -> LaurentPoly {
        self += &rhs;
        self
    }
}

impl AddAssign<&LaurentPoly> for LaurentPoly {
    fn add_assign(&mut self, rhs: &LaurentPoly) {
        for (e, c) in rhs.terms() {
            self.add_term(e, c);
        }
    }
}

impl AddAssign for LaurentPoly {
    fn add_assign(&mut self, rhs: LaurentPoly) {
        *self += &rhs;
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1.0)
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.scale(-1.0)
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        self + &(-rhs)
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        &self - &rhs
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (ea, ca) in self.terms() {
            for (eb, cb) in rhs.terms() {
                out.add_term(ea + eb, ca * cb);
            }
        }
        out
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        &self * &rhs
    }
}

/// A quarter exponent as a reduced fraction without parentheses: `2`, `-3/2`, `1/4`.
pub fn exponent_label(q: i32) -> String {
    if q % 4 == 0 {
        (q / 4).to_string()
    } else if q % 2 == 0 {
        format!("{}/2", q / 2)
    } else {
        format!("{q}/4")
    }
}

/// Render a quarter exponent as a reduced fraction.
fn exponent_string(q: i32) -> String {
    if q % 4 == 0 {
        let e = q / 4;
        if e < 0 {
            format!("({e})")
        } else {
            e.to_string()
        }
    } else if q % 2 == 0 {
        format!("({}/2)", q / 2)
    } else {
        format!("({q}/4)")
    }
}

/// Text rendering: terms by descending exponent, e.g. `t + t^(3/2) - t^(5/2)`.
pub struct Display<'a> {
    poly: &'a LaurentPoly,
    var: Variable,
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let sym = self.var.symbol();
        for (i, (q, c)) in self.poly.terms().rev().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else if c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            match (q, mag == 1.0) {
                (0, _) => write!(f, "{mag}")?,
                (4, true) => write!(f, "{sym}")?,
                (4, false) => write!(f, "{mag}*{sym}")?,
                (_, true) => write!(f, "{sym}^{}", exponent_string(q))?,
                (_, false) => write!(f, "{mag}*{sym}^{}", exponent_string(q))?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.display(Variable::A).fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d() -> LaurentPoly {
        LaurentPoly::loop_value()
    }

    #[test]
    fn monomials() {
        assert_eq!(LaurentPoly::mono(1.0, 0), LaurentPoly::one());
        let m = LaurentPoly::mono(-1.0, 12);
        assert_eq!(m.len(), 1);
        assert_eq!(m.coeff(12), -1.0);
        assert!(LaurentPoly::mono(0.0, 8).is_zero());
    }

    #[test]
    fn addition() {
        let a2 = LaurentPoly::a_pow(1.0, 2);
        assert!((&a2 + &(-&a2)).is_zero());

        let lhs = LaurentPoly::a_pow(1.0, 1) + LaurentPoly::one() + LaurentPoly::a_pow(1.0, -1);
        assert_eq!(lhs.terms().collect::<Vec<_>>(), vec![(-4, 1.0), (0, 1.0), (4, 1.0)]);

        let dd = &d() + &d();
        assert_eq!(dd, LaurentPoly::from_pairs([(8, -2.0), (-8, -2.0)]));
    }

    #[test]
    fn multiplication() {
        let sq = &d() * &d();
        assert_eq!(sq, LaurentPoly::from_pairs([(16, 1.0), (0, 2.0), (-16, 1.0)]));
        assert_eq!(LaurentPoly::neg_a_cubed_pow(1).pow(2), LaurentPoly::a_pow(1.0, 6));
        assert_eq!(LaurentPoly::neg_a_cubed_pow(-2), LaurentPoly::a_pow(1.0, -6));
        assert_eq!(LaurentPoly::neg_a_cubed_pow(-1), LaurentPoly::a_pow(-1.0, -3));
    }

    #[test]
    fn t_substitution() {
        // A^2 - A^-4 + 1  ->  t^(-1/2) - t + 1
        let k21 = LaurentPoly::from_pairs([(8, 1.0), (-16, -1.0), (0, 1.0)]);
        let t = k21.substitute_t();
        assert_eq!(t, LaurentPoly::from_pairs([(-2, 1.0), (4, -1.0), (0, 1.0)]));
        assert_eq!(LaurentPoly::one().substitute_t(), LaurentPoly::one());
        assert_eq!(LaurentPoly::a_pow(-1.0, -12).substitute_t(), LaurentPoly::mono(-1.0, 12));
        assert_eq!(t.substitute_a(), k21);
    }

    #[test]
    fn evaluation() {
        assert_eq!(LaurentPoly::one().eval(5.0).unwrap(), 1.0);
        assert_eq!(LaurentPoly::a_pow(1.0, 2).eval(2.0).unwrap(), 4.0);
        let jones = LaurentPoly::from_pairs([(4, 1.0), (12, 1.0), (16, -1.0)]);
        assert_eq!(jones.eval(1.0).unwrap(), 1.0);
        assert!(matches!(jones.eval(0.0), Err(Error::Domain(_))));
        assert!(jones.eval(-1.0).is_err());
        let half = LaurentPoly::mono(1.0, 2);
        assert!((half.eval(4.0).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn distances() {
        let a = LaurentPoly::a_pow(1.0, 1);
        assert_eq!(a.distance(&a), 0.0);
        assert_eq!(a.distance(&-&a), 2.0);
        assert_eq!((&a + &LaurentPoly::one()).distance(&a), 1.0);
    }

    #[test]
    fn rendering() {
        let f = LaurentPoly::from_pairs([(4, 1.0), (6, 1.0), (10, -1.0)]);
        assert_eq!(f.display(Variable::T).to_string(), "-t^(5/2) + t^(3/2) + t");
        let b = LaurentPoly::from_pairs([(8, 0.5), (-12, -0.25), (0, 2.0)]);
        assert_eq!(b.to_string(), "0.5*A^2 + 2 - 0.25*A^(-3)");
        assert_eq!(LaurentPoly::mono(3.0, 1).display(Variable::T).to_string(), "3*t^(1/4)");
        assert_eq!(LaurentPoly::zero().to_string(), "0");
    }

    #[test]
    fn json_machine_format() {
        let p = LaurentPoly::from_pairs([(8, 0.5), (-12, -0.25)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[8,0.5],[-12,-0.25]]");
        let back: LaurentPoly = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }

    fn small_poly() -> impl Strategy<Value = LaurentPoly> {
        prop::collection::vec((-6i32..=6, -3.0f64..3.0), 0..5)
            .prop_map(|v| LaurentPoly::from_pairs(v.into_iter().map(|(e, c)| (4 * e, c))))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert!((&a + &b).approx_eq(&(&b + &a), 1e-12));
            prop_assert!((&a * &b).approx_eq(&(&b * &a), 1e-12));
            prop_assert!((&(&a + &b) + &c).approx_eq(&(&a + &(&b + &c)), 1e-12));
            prop_assert!((&(&a * &b) * &c).approx_eq(&(&a * &(&b * &c)), 1e-12));
            prop_assert!((&a * &(&b + &c)).approx_eq(&(&(&a * &b) + &(&a * &c)), 1e-12));
        }

        #[test]
        fn t_substitution_is_multiplicative(a in small_poly(), b in small_poly()) {
            let lhs = (&a * &b).substitute_t();
            let rhs = &a.substitute_t() * &b.substitute_t();
            prop_assert!(lhs.approx_eq(&rhs, 1e-12));
        }

        #[test]
        fn json_round_trip(a in small_poly()) {
            let back: LaurentPoly = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
            prop_assert_eq!(back, a);
        }
    }
}
