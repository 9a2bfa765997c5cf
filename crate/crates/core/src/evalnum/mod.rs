//! Iterated integrals from the tangential basepoint `d/dpi` at infinity, inside the residue disk,
//! and path composition with an external oracle for the part outside the disk.
//!
//! Values are exact: polynomials in the symbol `log z` with rational coefficients.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::rational::{fmt_rational, parse_rational};
use crate::exactalg::{CurveModel, FuncElem, FuncElemJson, LaurentJson, LaurentSeries, LogSeries, OneForm, Rational, EXACT};
use crate::wordalg::shuffle_words;

/// A point of the residue disk at infinity, by its parameter value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiskPoint {
    z: Rational,
}

impl DiskPoint {
    pub fn new(z: Rational) -> Result<Self> {
        if z.is_zero() {
            return Err(Error::InvalidInput("z = 0 is the puncture".into()));
        }
        Ok(DiskPoint { z })
    }

    pub fn z(&self) -> &Rational {
        &self.z
    }
}

/// `f(pi) dpi` with a label naming it in oracle tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiskForm {
    pub label: String,
    pub series: LaurentSeries,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiskFormJson {
    pub label: String,
    pub series: LaurentJson,
}

impl DiskForm {
    /// Expansion of a curve form to absolute precision `order`.
    pub fn from_curve(curve: &CurveModel, label: &str, w: &OneForm, order: i64) -> Result<Self> {
        Ok(DiskForm { label: label.to_string(), series: curve.expand_form(w, order)? })
    }

    pub fn to_json(&self) -> DiskFormJson {
        DiskFormJson { label: self.label.clone(), series: self.series.to_json() }
    }

    pub fn from_json(j: &DiskFormJson) -> Result<Self> {
        Ok(DiskForm { label: j.label.clone(), series: LaurentSeries::from_json(&j.series)? })
    }
}

/// Input form: a `dpi` coefficient series, or a curve form `u dx` to be expanded.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LaurentOrForm {
    Series { label: String, series: LaurentJson },
    Form { label: String, form: FuncElemJson },
}

impl LaurentOrForm {
    pub fn to_disk_form(&self, curve: Option<&CurveModel>, order: i64) -> Result<DiskForm> {
        match self {
            LaurentOrForm::Series { label, series } => Ok(DiskForm { label: label.clone(), series: LaurentSeries::from_json(series)? }),
            LaurentOrForm::Form { label, form } => {
                let c = curve.ok_or_else(|| Error::InvalidInput(format!("form {label} needs a curve")))?;
                let w = OneForm::new(FuncElem::from_json(form, c.f_arc().clone())?);
                DiskForm::from_curve(c, label, &w, order)
            }
        }
    }
}

/// `sum_j coeffs[j] (log z)^j`, known up to `O(z^prec)` in the parameter when `prec` is set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogValue {
    pub coeffs: Vec<Rational>,
    pub prec: Option<i64>,
}

impl LogValue {
    pub fn constant(r: Rational) -> Self {
        let mut v = LogValue { coeffs: vec![r], prec: None };
        v.trim();
        v
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// Value once `log z` is given a number.
    pub fn at(&self, log_z: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * log_z + c)
    }

    /// Constant term, i.e. the value with `log z = 0`.
    pub fn constant_term(&self) -> Rational {
        self.coeffs.first().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let get = |v: &Self, i: usize| v.coeffs.get(i).cloned().unwrap_or_else(Rational::zero);
        let mut out = LogValue { coeffs: (0..n).map(|i| get(self, i) + get(o, i)).collect(), prec: min_prec(self.prec, o.prec) };
        out.trim();
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut c = vec![Rational::zero(); (self.coeffs.len() + o.coeffs.len()).saturating_sub(1)];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        let mut out = LogValue { coeffs: c, prec: min_prec(self.prec, o.prec) };
        out.trim();
        out
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = LogValue { coeffs: self.coeffs.iter().map(|c| c * r).collect(), prec: self.prec };
        out.trim();
        out
    }

    pub fn to_json(&self) -> LogValueJson {
        LogValueJson { log_coeffs: self.coeffs.iter().map(fmt_rational).collect(), prec: self.prec }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogValueJson {
    /// Coefficients of `(log z)^0, (log z)^1, ...`.
    pub log_coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn check_log_pole(s: &LaurentSeries) -> Result<()> {
    if s.prec() < 0 {
        return Err(Error::PrecisionExhausted("pole order of an input form is unknown".into()));
    }
    match s.valuation() {
        Some(v) if v < -1 => Err(Error::NonLogPole(-v)),
        _ => Ok(()),
    }
}

/// `int t^m (log t)^j dt` without constant, as `(power, [coefficient of (log t)^i])`.
fn primitive_monomial(m: i64, j: usize) -> (i64, Vec<Rational>) {
    let mut c = vec![Rational::zero(); j + 2];
    if m == -1 {
        c[j + 1] = Rational::new(1.into(), (j as i64 + 1).into());
        return (0, c);
    }
    let k = Rational::from_integer((m + 1).into());
    // t^{m+1} sum_i (-1)^i j!/(j-i)! (log t)^{j-i} / (m+1)^{i+1}
    let mut fall = Rational::one();
    let mut kp = k.clone();
    for i in 0..=j {
        let sign = if i % 2 == 0 { Rational::one() } else { -Rational::one() };
        c[j - i] += sign * &fall / &kp;
        fall *= Rational::from_integer(((j - i) as i64).into());
        kp *= &k;
    }
    (m + 1, c)
}

/// Regularized primitive: the antiderivative with no `t^0 (log t)^0` term.
fn regularized_primitive(s: &LogSeries) -> Result<LogSeries> {
    let width = s.terms.len() + 1;
    let prec = s.terms.iter().map(|t| t.prec()).min().unwrap_or(EXACT);
    let out_prec = if prec >= EXACT / 2 { EXACT } else { prec + 1 };
    let mut acc: Vec<BTreeMap<i64, Rational>> = vec![BTreeMap::new(); width];
    for (j, t) in s.terms.iter().enumerate() {
        check_log_pole(t)?;
        let (start, coeffs) = t.terms();
        for (i, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (p, lc) = primitive_monomial(start + i as i64, j);
            for (l, v) in lc.into_iter().enumerate() {
                if !v.is_zero() {
                    *acc[l].entry(p).or_insert_with(Rational::zero) += c * v;
                }
            }
        }
    }
    let terms = acc
        .into_iter()
        .map(|m| {
            let lo = m.keys().next().copied().unwrap_or(0);
            let hi = m.keys().last().copied().unwrap_or(-1);
            let coeffs = (lo..=hi).map(|k| m.get(&k).cloned().unwrap_or_else(Rational::zero)).collect();
            LaurentSeries::new(lo, coeffs, out_prec)
        })
        .collect();
    Ok(LogSeries { terms })
}

fn mul_log(s: &LogSeries, f: &LaurentSeries) -> LogSeries {
    LogSeries { terms: s.terms.iter().map(|t| t.mul(f)).collect() }
}

/// `t -> int_b^t w_1 ... w_n` as a log-Laurent series, `w_1` outermost.
///
/// Each nested integral starts at a formal lower endpoint `sigma`; setting `sigma = log sigma = 0`
/// commutes with the nesting, so every level keeps the primitive without constant term.
pub fn regularized_integral(forms: &[LaurentSeries]) -> Result<LogSeries> {
    let mut cur = LogSeries::from_series(LaurentSeries::monomial(Rational::one(), 0));
    for f in forms.iter().rev() {
        check_log_pole(f)?;
        cur = regularized_primitive(&mul_log(&cur, f))?;
    }
    Ok(cur)
}

/// Evaluates a log-Laurent series at `z`, keeping `log z` symbolic.
pub fn eval_log_series(s: &LogSeries, z: &DiskPoint) -> Result<LogValue> {
    let mut prec = None;
    let mut coeffs = Vec::with_capacity(s.terms.len());
    for t in &s.terms {
        if !t.is_exact() {
            if t.prec() < 1 {
                return Err(Error::PrecisionExhausted(format!("series known only to O(pi^{})", t.prec())));
            }
            prec = min_prec(prec, Some(t.prec()));
        }
        coeffs.push(t.eval(z.z())?);
    }
    let mut v = LogValue { coeffs, prec };
    v.trim();
    Ok(v)
}

/// The formal iterated integral from the tangential basepoint to `z`.
pub fn formal_iterated_integral(forms: &[LaurentSeries], z: &DiskPoint) -> Result<LogValue> {
    eval_log_series(&regularized_integral(forms)?, z)
}

/// `int_b^z w_1 ... w_n`; with `log_z` the symbol is replaced by that value.
pub fn tangential_value(forms: &[LaurentSeries], z: &DiskPoint, log_z: Option<&Rational>) -> Result<LogValue> {
    let v = formal_iterated_integral(forms, z)?;
    Ok(match log_z {
        Some(l) => LogValue { coeffs: vec![v.at(l)], prec: v.prec },
        None => v,
    })
}

/// Values `int_y^x w_1 ... w_i` of prefixes of a form word, keyed by labels.
pub trait IntegralOracle: Sync {
    fn prefix_value(&self, labels: &[String]) -> Option<Rational>;
}

/// An oracle given by a finite table.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TableOracle {
    pub values: BTreeMap<Vec<String>, Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleEntryJson {
    pub word: Vec<String>,
    pub value: String,
}

impl TableOracle {
    pub fn from_json(entries: &[OracleEntryJson]) -> Result<Self> {
        let mut values = BTreeMap::new();
        for e in entries {
            values.insert(e.word.clone(), parse_rational(&e.value)?);
        }
        Ok(TableOracle { values })
    }

    pub fn to_json(&self) -> Vec<OracleEntryJson> {
        self.values.iter().map(|(w, v)| OracleEntryJson { word: w.clone(), value: fmt_rational(v) }).collect()
    }

    /// Checks `v(u) v(w) = sum v(shuffles)` on every pair whose shuffles are all tabulated.
    /// Returns the number of pairs checked, or the first failing pair.
    pub fn check_shuffle(&self) -> std::result::Result<usize, (Vec<String>, Vec<String>)> {
        let words: Vec<&Vec<String>> = self.values.keys().filter(|w| !w.is_empty()).collect();
        let mut checked = 0;
        for (i, u) in words.iter().enumerate() {
            for w in &words[i..] {
                let mut names: Vec<String> = u.iter().chain(w.iter()).cloned().collect();
                names.sort();
                names.dedup();
                let idx = |s: &String| names.iter().position(|n| n == s).expect("name") as u8;
                let ui: Vec<u8> = u.iter().map(idx).collect();
                let wi: Vec<u8> = w.iter().map(idx).collect();
                let mut sum = Rational::zero();
                let mut complete = true;
                for (s, m) in shuffle_words(&ui, &wi) {
                    let key: Vec<String> = s.iter().map(|&k| names[k as usize].clone()).collect();
                    match self.values.get(&key) {
                        Some(v) => sum += v * Rational::from_integer(m.into()),
                        None => {
                            complete = false;
                            break;
                        }
                    }
                }
                if !complete {
                    continue;
                }
                checked += 1;
                if &self.values[*u] * &self.values[*w] != sum {
                    return Err(((*u).clone(), (*w).clone()));
                }
            }
        }
        Ok(checked)
    }
}

impl IntegralOracle for TableOracle {
    fn prefix_value(&self, labels: &[String]) -> Option<Rational> {
        if labels.is_empty() {
            return Some(Rational::one());
        }
        self.values.get(labels).cloned()
    }
}

/// `int_b^x w_1 ... w_n = sum_i int_y^x w_1 ... w_i * int_b^y w_{i+1} ... w_n` for `x` outside the disk.
pub fn compose_paths(forms: &[DiskForm], y: &DiskPoint, oracle: &dyn IntegralOracle, log_y: Option<&Rational>) -> Result<LogValue> {
    let labels: Vec<String> = forms.iter().map(|f| f.label.clone()).collect();
    let series: Vec<LaurentSeries> = forms.iter().map(|f| f.series.clone()).collect();
    let mut acc = LogValue::constant(Rational::zero());
    for i in 0..=forms.len() {
        let outer = oracle.prefix_value(&labels[..i]).ok_or_else(|| Error::OracleMissingValue(labels[..i].join(",")))?;
        let inner = tangential_value(&series[i..], y, log_y)?;
        acc = acc.add(&inner.scale(&outer));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::{q, qi};

    fn poly(start: i64, c: &[i64]) -> LaurentSeries {
        LaurentSeries::exact(start, c.iter().map(|&x| qi(x)).collect())
    }

    #[test]
    fn empty_word_is_one() {
        let z = DiskPoint::new(q(1, 3)).unwrap();
        assert_eq!(tangential_value(&[], &z, None).unwrap(), LogValue::constant(qi(1)));
    }

    #[test]
    fn dlog_gives_log() {
        let z = DiskPoint::new(q(1, 3)).unwrap();
        let v = tangential_value(&[poly(-1, &[1])], &z, None).unwrap();
        assert_eq!(v.coeffs, vec![qi(0), qi(1)]);
    }

    #[test]
    fn exact_differential() {
        // G = 1 + 2t - t^3, dG = (2 - 3t^2) dt
        let z = DiskPoint::new(q(2, 5)).unwrap();
        let v = tangential_value(&[poly(0, &[2, 0, -3])], &z, None).unwrap();
        let g = |t: &Rational| qi(1) + qi(2) * t - t * t * t;
        assert_eq!(v, LogValue::constant(g(z.z()) - g(&qi(0))));
    }

    #[test]
    fn double_pole_rejected() {
        let z = DiskPoint::new(q(1, 2)).unwrap();
        assert_eq!(tangential_value(&[poly(-2, &[1])], &z, None).unwrap_err(), Error::NonLogPole(2));
    }

    #[test]
    fn repeated_form_is_half_square() {
        let z = DiskPoint::new(q(3, 7)).unwrap();
        let w = poly(-1, &[1, 2, 5]);
        let one = tangential_value(std::slice::from_ref(&w), &z, None).unwrap();
        let two = tangential_value(&[w.clone(), w], &z, None).unwrap();
        assert_eq!(two, one.mul(&one).scale(&q(1, 2)));
    }

    #[test]
    fn compose_single_form() {
        let y = DiskPoint::new(q(1, 5)).unwrap();
        let w = DiskForm { label: "w".into(), series: poly(0, &[1]) };
        let mut o = TableOracle::default();
        o.values.insert(vec!["w".into()], qi(7));
        let v = compose_paths(&[w], &y, &o, None).unwrap();
        assert_eq!(v, LogValue::constant(qi(7) + q(1, 5)));
        let missing = compose_paths(&[DiskForm { label: "u".into(), series: poly(0, &[1]) }], &y, &o, None);
        assert!(matches!(missing, Err(Error::OracleMissingValue(_))));
    }
}
