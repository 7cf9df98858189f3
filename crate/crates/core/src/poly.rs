//! Exact bivariate polynomials in the formal variables `q` and `t`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Exponent pair `(q-degree, t-degree)` of a monomial.
pub type Monomial = (u32, u32);

/// Polynomial in `q`, `t` with arbitrary-precision integer coefficients.
///
/// Zero coefficients are never stored, so structural equality is polynomial equality.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BivarPoly {
    terms: BTreeMap<Monomial, BigInt>,
}

impl BivarPoly {
    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn monomial(q_exp: u32, t_exp: u32, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((q_exp, t_exp), c);
        }
        Self { terms }
    }

    pub fn q() -> Self {
        Self::monomial(1, 0, 1)
    }

    pub fn t() -> Self {
        Self::monomial(0, 1, 1)
    }

    /// Builds a polynomial in `q` alone from ascending coefficients.
    pub fn from_q_coeffs<I, C>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (k, c) in coeffs.into_iter().enumerate() {
            p.add_term((k as u32, 0), c.into());
        }
        p
    }

    /// Builds a polynomial in `t` alone from ascending coefficients.
    pub fn from_t_coeffs<I, C>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (k, c) in coeffs.into_iter().enumerate() {
            p.add_term((0, k as u32), c.into());
        }
        p
    }

    /// Adds `c · q^a t^b` in place, dropping the entry if it cancels.
    pub fn add_term(&mut self, mono: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn coeff(&self, q_exp: u32, t_exp: u32) -> BigInt {
        self.terms.get(&(q_exp, t_exp)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Monomial, &BigInt)> {
        self.terms.iter().map(|(m, c)| (*m, c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in display order: ascending total degree, ties broken by descending `q`-degree.
    pub fn graded_terms(&self) -> Vec<(Monomial, BigInt)> {
        let mut out: Vec<_> = self.terms.iter().map(|(m, c)| (*m, c.clone())).collect();
        out.sort_by_key(|((a, b), _)| (a + b, std::cmp::Reverse(*a)));
        out
    }

    /// Sum of all coefficients, i.e. the value at `q = t = 1`.
    pub fn coefficient_sum(&self) -> BigInt {
        self.terms.values().sum()
    }

    pub fn q_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.0).max().unwrap_or(0)
    }

    pub fn t_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.1).max().unwrap_or(0)
    }

    /// Exchanges the roles of `q` and `t`.
    pub fn swap_vars(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|((a, b), c)| ((*b, *a), c.clone())).collect(),
        }
    }

    /// Specialises `t = 1`, leaving a polynomial in `q`.
    pub fn at_t_one(&self) -> Self {
        let mut out = Self::zero();
        for ((a, _), c) in &self.terms {
            out.add_term((*a, 0), c.clone());
        }
        out
    }

    /// Specialises `q = 0`, leaving a polynomial in `t`.
    pub fn at_q_zero(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .filter(|((a, _), _)| *a == 0)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    /// Evaluates at `(q, t)` in any coefficient ring.
    pub fn eval<R: Scalar>(&self, q: &R, t: &R) -> R {
        let mut acc = R::zero();
        for ((a, b), c) in &self.terms {
            let c = R::from_i64(
                i64::try_from(c).expect("coefficient too large for evaluation; use eval_rational"),
            );
            acc = acc + c * q.powu(*a) * t.powu(*b);
        }
        acc
    }

    pub fn eval_f64(&self, q: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|((a, b), c)| bigint_to_f64(c) * q.powi(*a as i32) * t.powi(*b as i32))
            .sum()
    }

    pub fn eval_rational(&self, q: &BigRational, t: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for ((a, b), c) in &self.terms {
            acc += BigRational::from_integer(c.clone()) * q.powu(*a) * t.powu(*b);
        }
        acc
    }

    /// Divides by `(1 - q)` exactly, treating `t` as a coefficient.
    ///
    /// Fails with [`Error::Internal`] if the division leaves a remainder.
    pub fn div_one_minus_q(&self) -> Result<Self> {
        // Group by t-degree; each slice is a polynomial in q divided synthetically by (1 - q).
        let mut by_t: BTreeMap<u32, BTreeMap<u32, BigInt>> = BTreeMap::new();
        for ((a, b), c) in &self.terms {
            by_t.entry(*b).or_default().insert(*a, c.clone());
        }
        let mut out = Self::zero();
        for (b, slice) in by_t {
            // p(q) = (1 - q) s(q)  =>  s_k = p_k + s_{k-1}, and s must vanish past deg p - 1.
            let deg = *slice.keys().max().unwrap();
            let mut running = BigInt::zero();
            for k in 0..=deg {
                running += slice.get(&k).cloned().unwrap_or_default();
                if k < deg {
                    out.add_term((k, b), running.clone());
                }
            }
            if !running.is_zero() {
                return Err(Error::Internal(format!(
                    "polynomial is not divisible by (1 - q): remainder {running} at t^{b}"
                )));
            }
        }
        Ok(out)
    }
}

pub(crate) fn bigint_to_f64(c: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::NAN)
}

impl Zero for BivarPoly {
    fn zero() -> Self {
        Self::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for BivarPoly {
    fn one() -> Self {
        Self::constant(1)
    }
}

impl Add for BivarPoly {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl AddAssign for BivarPoly {
    fn add_assign(&mut self, rhs: Self) {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl Neg for BivarPoly {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect(),
        }
    }
}

impl Sub for BivarPoly {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for BivarPoly {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl Mul for &BivarPoly {
    type Output = BivarPoly;

    fn mul(self, rhs: &BivarPoly) -> BivarPoly {
        let mut out = BivarPoly::zero();
        for ((a1, b1), c1) in &self.terms {
            for ((a2, b2), c2) in &rhs.terms {
                out.add_term((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }
}

impl Scalar for BivarPoly {
    fn from_i64(v: i64) -> Self {
        Self::constant(v)
    }
}

impl fmt::Display for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b), c)) in self.graded_terms().into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            let mut factors = Vec::new();
            if !mag.is_one() || (a == 0 && b == 0) {
                factors.push(mag.to_string());
            }
            for (var, e) in [("q", a), ("t", b)] {
                match e {
                    0 => {}
                    1 => factors.push(var.to_string()),
                    _ => factors.push(format!("{var}^{e}")),
                }
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BivarPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BivarPoly({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    q: u32,
    t: u32,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    terms: Vec<TermRepr>,
    var_order: Vec<String>,
}

impl Serialize for BivarPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PolyRepr {
            terms: self
                .graded_terms()
                .into_iter()
                .map(|((q, t), c)| TermRepr { q, t, c: c.to_string() })
                .collect(),
            var_order: vec!["q".into(), "t".into()],
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BivarPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let swap = match repr.var_order.iter().map(String::as_str).collect::<Vec<_>>()[..] {
            ["q", "t"] => false,
            ["t", "q"] => true,
            _ => return Err(D::Error::custom("var_order must be [\"q\",\"t\"] or [\"t\",\"q\"]")),
        };
        let mut p = BivarPoly::zero();
        for term in repr.terms {
            let c: BigInt = term.c.parse().map_err(D::Error::custom)?;
            let mono = if swap { (term.t, term.q) } else { (term.q, term.t) };
            p.add_term(mono, c);
        }
        Ok(p)
    }
}
