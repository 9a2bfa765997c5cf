//! Truncated Laurent series in the local parameter and formal log extensions.

use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{fmt_rational, parse_rational, Rational};
use crate::error::{Error, Result};

/// Absolute precision used for series that are known exactly.
pub const EXACT: i64 = i64::MAX / 8;

/// `sum_{i} coeffs[i] pi^(start+i) + O(pi^prec)`; terms between the stored block and `prec` are zero.
#[derive(Clone, PartialEq, Eq)]
pub struct LaurentSeries {
    start: i64,
    coeffs: Vec<Rational>,
    prec: i64,
}

impl LaurentSeries {
    /// Builds a series, dropping stored terms at or beyond `prec` and normalizing zeros.
    pub fn new(start: i64, mut coeffs: Vec<Rational>, prec: i64) -> Self {
        let keep = (prec - start).clamp(0, coeffs.len() as i64) as usize;
        coeffs.truncate(keep);
        let mut s = LaurentSeries { start, coeffs, prec };
        s.normalize();
        s
    }

    /// An exactly known Laurent polynomial.
    pub fn exact(start: i64, coeffs: Vec<Rational>) -> Self {
        LaurentSeries::new(start, coeffs, EXACT)
    }

    /// `O(pi^prec)`.
    pub fn zero_to(prec: i64) -> Self {
        LaurentSeries { start: prec.min(0), coeffs: vec![], prec }
    }

    /// `r * pi^k`, exact.
    pub fn monomial(r: Rational, k: i64) -> Self {
        LaurentSeries::exact(k, vec![r])
    }

    fn normalize(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.start = self.prec.min(0);
            return;
        }
        self.coeffs.drain(..lead);
        self.start += lead as i64;
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn prec(&self) -> i64 {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec >= EXACT / 2
    }

    /// True when every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exponent of the first nonzero term; `None` if all known terms vanish.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    /// Coefficient of `pi^k`, or `None` when `k >= prec`.
    pub fn coeff(&self, k: i64) -> Option<Rational> {
        if k >= self.prec {
            return None;
        }
        let i = k - self.start;
        if i < 0 || i >= self.coeffs.len() as i64 {
            return Some(Rational::zero());
        }
        Some(self.coeffs[i as usize].clone())
    }

    /// Stored nonzero block: `(start, coefficients)`.
    pub fn terms(&self) -> (i64, &[Rational]) {
        (self.start, &self.coeffs)
    }

    /// Highest exponent with a stored coefficient plus one.
    fn end(&self) -> i64 {
        self.start + self.coeffs.len() as i64
    }

    pub fn truncate(&self, prec: i64) -> Self {
        LaurentSeries::new(self.start, self.coeffs.clone(), prec.min(self.prec))
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return LaurentSeries::zero_to(self.prec);
        }
        LaurentSeries { start: self.start, coeffs: self.coeffs.iter().map(|c| c * r).collect(), prec: self.prec }
    }

    /// Multiplies by `pi^k`.
    pub fn shift(&self, k: i64) -> Self {
        let prec = if self.is_exact() { EXACT } else { self.prec + k };
        LaurentSeries::new(self.start + k, self.coeffs.clone(), prec)
    }

    pub fn add(&self, o: &Self) -> Self {
        self.combine(o, true)
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.combine(o, false)
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    fn combine(&self, o: &Self, plus: bool) -> Self {
        let prec = self.prec.min(o.prec);
        if self.is_zero() && o.is_zero() {
            return LaurentSeries::zero_to(prec);
        }
        let lo = if self.is_zero() {
            o.start
        } else if o.is_zero() {
            self.start
        } else {
            self.start.min(o.start)
        };
        let hi = self.end().max(o.end()).min(prec);
        if hi <= lo {
            return LaurentSeries::zero_to(prec);
        }
        let mut c = vec![Rational::zero(); (hi - lo) as usize];
        for (i, x) in self.coeffs.iter().enumerate() {
            let k = self.start + i as i64 - lo;
            if k < c.len() as i64 {
                c[k as usize] += x;
            }
        }
        for (i, x) in o.coeffs.iter().enumerate() {
            let k = o.start + i as i64 - lo;
            if k < c.len() as i64 {
                if plus {
                    c[k as usize] += x;
                } else {
                    c[k as usize] -= x;
                }
            }
        }
        LaurentSeries::new(lo, c, prec)
    }

    /// Valuation used for precision bookkeeping (`prec` when no term is known).
    fn val_or_prec(&self) -> i64 {
        self.valuation().unwrap_or(self.prec)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let prec = sat_add(self.val_or_prec(), o.prec).min(sat_add(o.val_or_prec(), self.prec));
        if self.is_zero() || o.is_zero() {
            return LaurentSeries::zero_to(prec);
        }
        let lo = self.start + o.start;
        let hi = (self.end() + o.end() - 1).min(prec);
        if hi <= lo {
            return LaurentSeries::zero_to(prec);
        }
        let n = (hi - lo) as usize;
        let mut c = vec![Rational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= n {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                if i + j >= n {
                    break;
                }
                c[i + j] += a * b;
            }
        }
        LaurentSeries::new(lo, c, prec)
    }

    /// Multiplicative inverse; needs a known nonzero leading term.
    pub fn inv(&self) -> Result<Self> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::InsufficientPrecision("inverse of a series with no known term".into()))?;
        if self.is_exact() {
            if self.coeffs.len() == 1 {
                return Ok(LaurentSeries::monomial(self.coeffs[0].recip(), -v));
            }
            return Err(Error::InsufficientPrecision("inverse of an exact non-monomial needs a budget".into()));
        }
        self.inv_to(self.prec - 2 * v)
    }

    /// Inverse computed to relative precision `n`, with absolute precision `prec`.
    fn inv_rel(&self, n: usize, prec: i64) -> Self {
        let v = self.start;
        let a0inv = self.coeffs[0].recip();
        let mut b = vec![Rational::zero(); n];
        if n > 0 {
            b[0] = a0inv.clone();
        }
        for k in 1..n {
            let mut s = Rational::zero();
            for j in 1..=k.min(self.coeffs.len() - 1) {
                s += &self.coeffs[j] * &b[k - j];
            }
            b[k] = -s * &a0inv;
        }
        LaurentSeries::new(-v, b, prec)
    }

    /// Inverse to a given absolute precision, valid also for exact inputs.
    pub fn inv_to(&self, prec: i64) -> Result<Self> {
        let v = self
            .valuation()
            .ok_or_else(|| Error::InsufficientPrecision("inverse of a series with no known term".into()))?;
        let avail = if self.is_exact() { EXACT } else { self.prec - v - v };
        let p = prec.min(avail);
        let n = (p + v).max(0) as usize;
        Ok(self.inv_rel(n, p))
    }

    /// Formal derivative in pi.
    pub fn derivative(&self) -> Self {
        let c = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, x)| x * Rational::from_integer((self.start + i as i64).into()))
            .collect();
        let prec = if self.is_exact() { EXACT } else { self.prec - 1 };
        LaurentSeries::new(self.start - 1, c, prec)
    }

    /// Non-negative integer power.
    pub fn pow(&self, k: usize) -> Self {
        let mut acc = LaurentSeries::monomial(Rational::one(), 0);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Terms of exponent `< 0`.
    pub fn principal_part(&self) -> Self {
        let c: Vec<Rational> = (self.start..0.min(self.end())).map(|k| self.coeff(k).unwrap()).collect();
        LaurentSeries::exact(self.start, c)
    }

    /// Evaluates the stored Laurent polynomial at `z`.
    pub fn eval(&self, z: &Rational) -> Result<Rational> {
        if z.is_zero() && self.start < 0 && !self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut acc = Rational::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            acc += c * pow_q(z, self.start + i as i64);
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> LaurentJson {
        LaurentJson {
            val: self.start,
            coeffs: self.coeffs.iter().map(fmt_rational).collect(),
            prec: (!self.is_exact()).then_some(self.prec),
        }
    }

    pub fn from_json(j: &LaurentJson) -> Result<Self> {
        let c = j.coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        Ok(LaurentSeries::new(j.val, c, j.prec.unwrap_or(EXACT)))
    }
}

/// `z^k` for integer `k`.
pub fn pow_q(z: &Rational, k: i64) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..k.unsigned_abs() {
        acc *= z;
    }
    if k < 0 {
        acc.recip()
    } else {
        acc
    }
}

fn sat_add(a: i64, b: i64) -> i64 {
    if a >= EXACT / 2 || b >= EXACT / 2 {
        EXACT
    } else {
        a + b
    }
}

impl fmt::Debug for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for LaurentSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = vec![];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                parts.push(format!("{}*pi^{}", c, self.start + i as i64));
            }
        }
        if !self.is_exact() {
            parts.push(format!("O(pi^{})", self.prec));
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// JSON form `{"val": v, "coeffs": [...]}`, with `prec` present only for inexact series.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaurentJson {
    pub val: i64,
    pub coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<i64>,
}

/// `sum_j (log pi)^j * terms[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogSeries {
    pub terms: Vec<LaurentSeries>,
}

impl LogSeries {
    pub fn from_series(s: LaurentSeries) -> Self {
        LogSeries { terms: vec![s] }
    }

    /// Coefficient series of `(log pi)^j`.
    pub fn log_coeff(&self, j: usize) -> Option<&LaurentSeries> {
        self.terms.get(j)
    }

    /// Formal derivative: `d/dpi (s * L^j) = s' L^j + j s pi^-1 L^(j-1)`.
    pub fn derivative(&self) -> Self {
        let mut out: Vec<LaurentSeries> = self.terms.iter().map(|s| s.derivative()).collect();
        for j in 1..self.terms.len() {
            let extra = self.terms[j].shift(-1).scale(&Rational::from_integer((j as i64).into()));
            out[j - 1] = out[j - 1].add(&extra);
        }
        LogSeries { terms: out }
    }
}
