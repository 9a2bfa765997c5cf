//! Coefficient rings for tensor elements.

use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::exactalg::{FuncElem, Rational};

/// Commutative ring whose elements can build their own zero and one.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn scale_q(&self, q: &Rational) -> Self;
    fn from_q_like(&self, q: &Rational) -> Self {
        self.one_like().scale_q(q)
    }
}

impl Coeff for Rational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale_q(&self, q: &Rational) -> Self {
        self * q
    }
}

impl Coeff for FuncElem {
    fn is_zero(&self) -> bool {
        FuncElem::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        FuncElem::zero_like(self)
    }
    fn one_like(&self) -> Self {
        self.constant_like(Rational::one())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn scale_q(&self, q: &Rational) -> Self {
        self.scale(q)
    }
}
