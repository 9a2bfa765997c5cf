//! The curve y^2 = f(x), its function field, 1-forms and expansions at infinity.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, RwLock};

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::rational::{parse_rational, Rational};
use super::series::LaurentSeries;
use crate::error::{Error, Result};

/// Largest x-expansion budget tried before giving up.
pub const MAX_BUDGET: i64 = 1 << 10;

/// `a(x) + b(x) y` in K(C), reduced modulo `y^2 = f(x)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FuncElem {
    a: RatFunc,
    b: RatFunc,
    f: Arc<Poly>,
}

impl FuncElem {
    pub fn new(a: RatFunc, b: RatFunc, f: Arc<Poly>) -> Self {
        FuncElem { a, b, f }
    }

    pub fn a(&self) -> &RatFunc {
        &self.a
    }

    pub fn b(&self) -> &RatFunc {
        &self.b
    }

    pub fn f(&self) -> &Arc<Poly> {
        &self.f
    }

    pub fn zero_like(&self) -> Self {
        FuncElem::new(RatFunc::zero(), RatFunc::zero(), self.f.clone())
    }

    pub fn constant_like(&self, r: Rational) -> Self {
        FuncElem::new(RatFunc::constant(r), RatFunc::zero(), self.f.clone())
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Constant value, if this element is a constant.
    pub fn as_constant(&self) -> Option<Rational> {
        if !self.b.is_zero() {
            return None;
        }
        self.a.as_constant()
    }

    /// True if `a` and `b` are polynomials, i.e. the element lies in K[x, y].
    pub fn is_polynomial(&self) -> bool {
        self.a.is_poly() && self.b.is_poly()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        FuncElem::new(self.a.scale(r), self.b.scale(r), self.f.clone())
    }

    pub fn mul_ratfunc(&self, r: &RatFunc) -> Self {
        FuncElem::new(&self.a * r, &self.b * r, self.f.clone())
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let fr = RatFunc::poly((*self.f).clone());
        let norm = &(&self.a * &self.a) - &(&(&self.b * &self.b) * &fr);
        let ninv = norm.inv()?;
        Ok(FuncElem::new(&self.a * &ninv, &(-&self.b) * &ninv, self.f.clone()))
    }

    pub fn div(&self, o: &FuncElem) -> Result<Self> {
        Ok(self * &o.inv()?)
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut acc = self.constant_like(Rational::one());
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exterior derivative, using `2 y dy = f'(x) dx`.
    pub fn d(&self) -> OneForm {
        let fr = RatFunc::poly((*self.f).clone());
        let fp = RatFunc::poly(self.f.derivative());
        let half = Rational::new(1.into(), 2.into());
        let bterm = &(&self.b * &fp) * &fr.inv().expect("f nonzero");
        let b = &self.b.derivative() + &bterm.scale(&half);
        OneForm { u: FuncElem::new(self.a.derivative(), b, self.f.clone()) }
    }

    /// Value at an affine point.
    pub fn eval(&self, x: &Rational, y: Option<&Rational>) -> Result<Rational> {
        let a = self.a.eval(x)?;
        if self.b.is_zero() {
            return Ok(a);
        }
        let y = y.ok_or_else(|| Error::MissingBasepoint("y-coordinate needed to evaluate".into()))?;
        Ok(a + self.b.eval(x)? * y)
    }

    pub fn to_json(&self) -> FuncElemJson {
        FuncElemJson {
            a_num: self.a.num().to_strings(),
            a_den: self.a.den().to_strings(),
            b_num: self.b.num().to_strings(),
            b_den: self.b.den().to_strings(),
        }
    }

    pub fn from_json(j: &FuncElemJson, f: Arc<Poly>) -> Result<Self> {
        let p = |v: &[String]| -> Result<Poly> { Ok(Poly::new(v.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?)) };
        let a = RatFunc::new(p(&j.a_num)?, p(&j.a_den)?)?;
        let b = RatFunc::new(p(&j.b_num)?, p(&j.b_den)?)?;
        Ok(FuncElem::new(a, b, f))
    }
}

/// JSON form of a [`FuncElem`]: ascending coefficient arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuncElemJson {
    pub a_num: Vec<String>,
    pub a_den: Vec<String>,
    pub b_num: Vec<String>,
    pub b_den: Vec<String>,
}

impl fmt::Debug for FuncElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FuncElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.a),
            (true, false) => write!(f, "({})*y", self.b),
            (false, false) => write!(f, "{} + ({})*y", self.a, self.b),
        }
    }
}

impl Add for &FuncElem {
    type Output = FuncElem;
    fn add(self, o: &FuncElem) -> FuncElem {
        FuncElem::new(&self.a + &o.a, &self.b + &o.b, self.f.clone())
    }
}

impl Sub for &FuncElem {
    type Output = FuncElem;
    fn sub(self, o: &FuncElem) -> FuncElem {
        FuncElem::new(&self.a - &o.a, &self.b - &o.b, self.f.clone())
    }
}

impl Neg for &FuncElem {
    type Output = FuncElem;
    fn neg(self) -> FuncElem {
        FuncElem::new(-&self.a, -&self.b, self.f.clone())
    }
}

impl Mul for &FuncElem {
    type Output = FuncElem;
    fn mul(self, o: &FuncElem) -> FuncElem {
        if self.is_zero() || o.is_zero() {
            return self.zero_like();
        }
        let bb = &self.b * &o.b;
        let a = if bb.is_zero() { &self.a * &o.a } else { &(&self.a * &o.a) + &(&bb * &RatFunc::poly((*self.f).clone())) };
        let b = &(&self.a * &o.b) + &(&o.a * &self.b);
        FuncElem::new(a, b, self.f.clone())
    }
}

/// The 1-form `u dx`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct OneForm {
    pub u: FuncElem,
}

impl OneForm {
    pub fn new(u: FuncElem) -> Self {
        OneForm { u }
    }

    pub fn zero_like(&self) -> Self {
        OneForm { u: self.u.zero_like() }
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_zero()
    }

    pub fn scale(&self, r: &Rational) -> Self {
        OneForm { u: self.u.scale(r) }
    }

    /// `h * omega`.
    pub fn mul_fe(&self, h: &FuncElem) -> Self {
        OneForm { u: &self.u * h }
    }
}

impl fmt::Debug for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})dx", self.u)
    }
}

impl Add for &OneForm {
    type Output = OneForm;
    fn add(self, o: &OneForm) -> OneForm {
        OneForm { u: &self.u + &o.u }
    }
}

impl Sub for &OneForm {
    type Output = OneForm;
    fn sub(self, o: &OneForm) -> OneForm {
        OneForm { u: &self.u - &o.u }
    }
}

impl Neg for &OneForm {
    type Output = OneForm;
    fn neg(self) -> OneForm {
        OneForm { u: -&self.u }
    }
}

/// Either kind of element that can be expanded at infinity.
#[derive(Clone, Debug)]
pub enum Expandable<'a> {
    Func(&'a FuncElem),
    Form(&'a OneForm),
}

/// Choice of the 2g basis forms.
#[derive(Clone, Debug)]
pub enum BasisChoice {
    Standard,
    Custom(Vec<OneForm>),
}

/// Choice of the function with a simple pole at infinity.
#[derive(Clone, Debug)]
pub enum FChoice {
    /// `F = (2 / lc(f)) y / x^g`, the multiple of `1/pi` with `dF - alpha_g` regular at infinity.
    Standard,
    Custom(FuncElem),
}

/// Affine rational basepoint; `y` may be omitted when only `x(b)` is needed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basepoint {
    pub x: Rational,
    pub y: Option<Rational>,
}

struct XCache {
    budget: i64,
    x: LaurentSeries,
    dx: LaurentSeries,
}

/// Odd-degree model `y^2 = f(x)` of genus `g` with a basis of 1-forms and the function F.
pub struct CurveModel {
    f: Arc<Poly>,
    genus: usize,
    alphas: Vec<OneForm>,
    big_f: FuncElem,
    basepoint: Option<Basepoint>,
    cache: RwLock<Option<XCache>>,
}

impl Clone for CurveModel {
    fn clone(&self) -> Self {
        CurveModel {
            f: self.f.clone(),
            genus: self.genus,
            alphas: self.alphas.clone(),
            big_f: self.big_f.clone(),
            basepoint: self.basepoint.clone(),
            cache: RwLock::new(None),
        }
    }
}

impl fmt::Debug for CurveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CurveModel(y^2 = {}, g = {})", self.f, self.genus)
    }
}

impl CurveModel {
    /// Validates the model and builds the chosen basis and F.
    pub fn new(f: Poly, genus: usize, basis: BasisChoice, fchoice: FChoice) -> Result<Self> {
        let d = f.degree().unwrap_or(0);
        if d > 0 && !f.is_squarefree() {
            return Err(Error::SingularCurve);
        }
        if d % 2 == 0 || d < 3 {
            return Err(Error::NotOddModel(format!("deg f = {d}")));
        }
        if genus == 0 || d != 2 * genus + 1 {
            return Err(Error::NotOddModel(format!("deg f = {d} but genus = {genus}")));
        }
        let f = Arc::new(f);
        let fr = RatFunc::poly((*f).clone());
        let finv = fr.inv()?;
        let alphas = match basis {
            BasisChoice::Standard => (0..2 * genus)
                .map(|i| {
                    let b = &RatFunc::poly(Poly::monomial(Rational::one(), i)) * &finv;
                    OneForm::new(FuncElem::new(RatFunc::zero(), b, f.clone()))
                })
                .collect(),
            BasisChoice::Custom(v) => v.into_iter().map(|w| OneForm::new(FuncElem::new(w.u.a, w.u.b, f.clone()))).collect(),
        };
        let big_f = match fchoice {
            FChoice::Standard => {
                let s = Rational::from_integer(2.into()) / f.lead();
                let b = RatFunc::new(Poly::constant(s), Poly::monomial(Rational::one(), genus))?;
                FuncElem::new(RatFunc::zero(), b, f.clone())
            }
            FChoice::Custom(e) => FuncElem::new(e.a, e.b, f.clone()),
        };
        let c = CurveModel { f, genus, alphas, big_f, basepoint: None, cache: RwLock::new(None) };
        c.validate()?;
        Ok(c)
    }

    /// Standard basis and F for the polynomial with the given ascending integer coefficients.
    pub fn standard(coeffs: &[i64]) -> Result<Self> {
        let f = Poly::from_ints(coeffs);
        let d = f.degree().unwrap_or(0);
        CurveModel::new(f, d.saturating_sub(1) / 2, BasisChoice::Standard, FChoice::Standard)
    }

    fn validate(&self) -> Result<()> {
        let g = self.genus;
        if self.alphas.len() != 2 * g {
            return Err(Error::BadBasis(format!("expected {} forms, got {}", 2 * g, self.alphas.len())));
        }
        for (t, a) in self.alphas.iter().enumerate() {
            if a.is_zero() {
                return Err(Error::BadBasis(format!("alpha_{t} is zero")));
            }
            let p = self.pole_order_form(a)?;
            if t < g && p > 0 {
                return Err(Error::BadBasis(format!("alpha_{t} has a pole of order {p} at infinity")));
            }
            if t >= g && p < 2 {
                return Err(Error::BadBasis(format!("alpha_{t} has pole order {p} < 2 at infinity")));
            }
        }
        if self.big_f.is_zero() || self.pole_order(&self.big_f)? != 1 {
            return Err(Error::BadF("pole order at infinity is not 1".into()));
        }
        Ok(())
    }

    pub fn with_basepoint(mut self, b: Basepoint) -> Result<Self> {
        if let Some(y) = &b.y {
            if y * y != self.f.eval(&b.x) {
                return Err(Error::InvalidInput(format!("({}, {}) is not on the curve", b.x, y)));
            }
        } else if let Some(y) = rational_sqrt(&self.f.eval(&b.x)) {
            return self.with_basepoint(Basepoint { x: b.x, y: Some(y) });
        }
        self.basepoint = Some(b);
        Ok(self)
    }

    pub fn f(&self) -> &Poly {
        &self.f
    }

    pub fn f_arc(&self) -> &Arc<Poly> {
        &self.f
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn alpha(&self, i: usize) -> &OneForm {
        &self.alphas[i]
    }

    pub fn alphas(&self) -> &[OneForm] {
        &self.alphas
    }

    pub fn big_f(&self) -> &FuncElem {
        &self.big_f
    }

    pub fn basepoint(&self) -> Option<&Basepoint> {
        self.basepoint.as_ref()
    }

    pub fn zero(&self) -> FuncElem {
        FuncElem::new(RatFunc::zero(), RatFunc::zero(), self.f.clone())
    }

    pub fn constant(&self, r: Rational) -> FuncElem {
        FuncElem::new(RatFunc::constant(r), RatFunc::zero(), self.f.clone())
    }

    pub fn one(&self) -> FuncElem {
        self.constant(Rational::one())
    }

    /// The coordinate function x.
    pub fn x(&self) -> FuncElem {
        FuncElem::new(RatFunc::poly(Poly::x()), RatFunc::zero(), self.f.clone())
    }

    /// The coordinate function y.
    pub fn y(&self) -> FuncElem {
        FuncElem::new(RatFunc::zero(), RatFunc::one(), self.f.clone())
    }

    pub fn from_parts(&self, a: RatFunc, b: RatFunc) -> FuncElem {
        FuncElem::new(a, b, self.f.clone())
    }

    pub fn zero_form(&self) -> OneForm {
        OneForm::new(self.zero())
    }

    /// x(pi) and dx/dpi to absolute precision at least `budget`.
    fn x_series(&self, budget: i64) -> (LaurentSeries, LaurentSeries) {
        if let Some(c) = self.cache.read().expect("cache lock").as_ref() {
            if c.budget >= budget {
                return (c.x.truncate(budget + 1), c.dx.truncate(budget));
            }
        }
        let (x, dx) = self.compute_x_series(budget);
        let mut w = self.cache.write().expect("cache lock");
        if w.as_ref().map_or(true, |c| c.budget < budget) {
            *w = Some(XCache { budget, x: x.clone(), dx: dx.clone() });
        }
        (x, dx)
    }

    /// Solves `u = pi^2 * frev(u)` for `u = 1/x` by fixed-point iteration, then inverts.
    fn compute_x_series(&self, budget: i64) -> (LaurentSeries, LaurentSeries) {
        let d = 2 * self.genus + 1;
        let frev: Vec<Rational> = (0..=d).map(|k| self.f.coeff(d - k)).collect();
        let pu = budget + 5;
        let mut u = LaurentSeries::zero_to(pu);
        for _ in 0..(pu / 2 + 2) {
            let mut acc = LaurentSeries::zero_to(pu);
            for c in frev.iter().rev() {
                acc = acc.mul(&u).add(&LaurentSeries::monomial(c.clone(), 0)).truncate(pu);
            }
            u = acc.shift(2).truncate(pu);
        }
        let x = u.inv().expect("u has a nonzero leading term");
        let dx = x.derivative();
        (x.truncate(budget + 1), dx.truncate(budget))
    }

    fn eval_poly_series(p: &Poly, x: &LaurentSeries) -> LaurentSeries {
        let mut acc = LaurentSeries::zero_to(super::series::EXACT);
        for c in p.coeffs().iter().rev() {
            acc = acc.mul(x).add(&LaurentSeries::monomial(c.clone(), 0));
        }
        acc
    }

    fn ratfunc_series(r: &RatFunc, x: &LaurentSeries) -> Result<LaurentSeries> {
        if r.is_zero() {
            return Ok(LaurentSeries::zero_to(super::series::EXACT));
        }
        let n = Self::eval_poly_series(r.num(), x);
        if r.den().is_one() {
            return Ok(n);
        }
        let d = Self::eval_poly_series(r.den(), x);
        Ok(n.mul(&d.inv()?))
    }

    fn expand_at(&self, e: &Expandable, budget: i64) -> Result<LaurentSeries> {
        let (x, dx) = self.x_series(budget);
        let u = match e {
            Expandable::Func(u) => *u,
            Expandable::Form(w) => &w.u,
        };
        let a = Self::ratfunc_series(u.a(), &x)?;
        let mut s = a;
        if !u.b().is_zero() {
            let b = Self::ratfunc_series(u.b(), &x)?;
            let y = x.pow(self.genus).shift(-1);
            s = s.add(&b.mul(&y));
        }
        if let Expandable::Form(_) = e {
            s = s.mul(&dx);
        }
        Ok(s)
    }

    /// Expansion in pi = x^g / y to absolute precision at least `order`; forms give the dpi coefficient.
    pub fn pi_expand(&self, e: Expandable, order: i64) -> Result<LaurentSeries> {
        let u = match &e {
            Expandable::Func(u) => *u,
            Expandable::Form(w) => &w.u,
        };
        let degs = [u.a().num(), u.a().den(), u.b().num(), u.b().den()]
            .iter()
            .map(|p| p.degree().unwrap_or(0) as i64)
            .sum::<i64>();
        let mut budget = order.max(0) + 2 * degs + 4 * self.genus as i64 + 8;
        loop {
            let s = self.expand_at(&e, budget)?;
            if s.prec() >= order {
                return Ok(s.truncate(order));
            }
            if budget > MAX_BUDGET {
                return Err(Error::PrecisionExhausted(format!("expansion to order {order}")));
            }
            budget *= 2;
        }
    }

    pub fn expand(&self, e: &FuncElem, order: i64) -> Result<LaurentSeries> {
        self.pi_expand(Expandable::Func(e), order)
    }

    pub fn expand_form(&self, w: &OneForm, order: i64) -> Result<LaurentSeries> {
        self.pi_expand(Expandable::Form(w), order)
    }

    fn valuation_of(&self, e: Expandable) -> Result<i64> {
        let zero = match &e {
            Expandable::Func(u) => u.is_zero(),
            Expandable::Form(w) => w.is_zero(),
        };
        if zero {
            return Err(Error::ZeroInput);
        }
        let mut order = 8;
        loop {
            let s = self.pi_expand(e.clone(), order)?;
            if let Some(v) = s.valuation() {
                return Ok(v);
            }
            if order > MAX_BUDGET {
                return Err(Error::PrecisionExhausted("valuation not found".into()));
            }
            order *= 2;
        }
    }

    /// Pole order at infinity of a function (negative for zeros).
    pub fn pole_order(&self, e: &FuncElem) -> Result<i64> {
        Ok(-self.valuation_of(Expandable::Func(e))?)
    }

    /// Pole order at infinity of a form, measured against dpi.
    pub fn pole_order_form(&self, w: &OneForm) -> Result<i64> {
        Ok(-self.valuation_of(Expandable::Form(w))?)
    }

    /// True if the function has no pole at infinity.
    pub fn regular_at_infinity(&self, e: &FuncElem) -> Result<bool> {
        if e.is_zero() {
            return Ok(true);
        }
        Ok(self.expand(e, 0)?.is_zero())
    }

    /// True if the form has at worst a simple pole against dpi (a logarithmic pole).
    pub fn log_at_infinity(&self, w: &OneForm) -> Result<bool> {
        if w.is_zero() {
            return Ok(true);
        }
        Ok(self.expand_form(w, -1)?.is_zero())
    }

    /// Function-field operation on canonical forms.
    pub fn ff_arith(&self, op: FfOp, lhs: &FuncElem, rhs: Option<&FuncElem>) -> Result<FfValue> {
        let need = || rhs.ok_or_else(|| Error::InvalidInput("second operand required".into()));
        Ok(match op {
            FfOp::Add => FfValue::Func(lhs + need()?),
            FfOp::Mul => FfValue::Func(lhs * need()?),
            FfOp::Inv => FfValue::Func(lhs.inv()?),
            FfOp::D => FfValue::Form(lhs.d()),
        })
    }
}

/// Operation selector for [`CurveModel::ff_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FfOp {
    Add,
    Mul,
    Inv,
    D,
}

/// Result of [`CurveModel::ff_arith`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FfValue {
    Func(FuncElem),
    Form(OneForm),
}

/// Square root in Q if it exists.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    use num_traits::Signed;
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}
