//! Exact arithmetic: rationals, polynomials, the function field of the curve, 1-forms and expansions at infinity.

pub mod curve;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod series;
pub mod solve;

pub use curve::{Basepoint, BasisChoice, CurveModel, Expandable, FChoice, FfOp, FfValue, FuncElem, FuncElemJson, OneForm};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use rational::{q, qi, Rational};
pub use series::{LaurentJson, LaurentSeries, LogSeries, EXACT};
pub use solve::{principal_part_solve, PoleBasis, PeelResult};
