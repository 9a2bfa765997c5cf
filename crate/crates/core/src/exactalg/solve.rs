//! Cancelling principal parts at infinity with a basis of functions of prescribed pole order.

use num_traits::Zero;

use super::curve::{CurveModel, FuncElem};
use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::rational::Rational;
use super::series::LaurentSeries;
use crate::error::{Error, Result};

/// Functions allowed when cancelling a principal part.
#[derive(Clone, Debug, Default)]
pub struct PoleBasis {
    /// Use `x^a` (order 2a) and `x^a y` (order 2a + 2g + 1).
    pub monomials: bool,
    /// Extra functions, used only at orders the monomials do not reach.
    pub extras: Vec<FuncElem>,
    /// Fail on a principal-part term no basis element reaches.
    pub strict: bool,
}

impl PoleBasis {
    pub fn monomials() -> Self {
        PoleBasis { monomials: true, extras: vec![], strict: false }
    }
}

/// `target = expand(a + sum extra_coeffs[i] * extras[i]) + residual`.
#[derive(Clone, Debug)]
pub struct PeelResult {
    /// Monomial part of the solution.
    pub a: FuncElem,
    pub extra_coeffs: Vec<Rational>,
    pub residual: LaurentSeries,
}

/// Peels the principal part of `target` from the highest pole order down.
pub fn principal_part_solve(target: &LaurentSeries, curve: &CurveModel, allowed: &PoleBasis) -> Result<PeelResult> {
    let g = curve.genus() as i64;
    let mut a = curve.zero();
    let mut extra_coeffs = vec![Rational::zero(); allowed.extras.len()];
    if target.prec() < 0 {
        return Err(Error::InsufficientPrecision("principal part not fully known".into()));
    }
    let order = target.prec().min(1);
    let mut extra_exp = Vec::with_capacity(allowed.extras.len());
    for e in &allowed.extras {
        let s = curve.expand(e, order)?;
        extra_exp.push((s.valuation().map(|v| -v).unwrap_or(0), s));
    }
    let mut r = target.truncate(order);
    let top = match r.valuation() {
        Some(v) if v < 0 => -v,
        _ => return Ok(PeelResult { a, extra_coeffs, residual: r }),
    };
    for o in (1..=top).rev() {
        let c = r.coeff(-o).expect("principal part known");
        if c.is_zero() {
            continue;
        }
        let mono = if !allowed.monomials {
            None
        } else if o % 2 == 0 {
            Some(curve.from_parts(RatFunc::poly(Poly::monomial(Rational::from_integer(1.into()), (o / 2) as usize)), RatFunc::zero()))
        } else if o >= 2 * g + 1 {
            let k = ((o - 2 * g - 1) / 2) as usize;
            Some(curve.from_parts(RatFunc::zero(), RatFunc::poly(Poly::monomial(Rational::from_integer(1.into()), k))))
        } else {
            None
        };
        if let Some(m) = mono {
            let s = curve.expand(&m, order)?;
            let k = c / s.coeff(-o).expect("leading term known");
            r = r.sub(&s.scale(&k));
            a = &a + &m.scale(&k);
            continue;
        }
        if let Some(i) = extra_exp.iter().position(|(p, _)| *p == o) {
            let s = &extra_exp[i].1;
            let k = c / s.coeff(-o).expect("leading term known");
            r = r.sub(&s.scale(&k));
            extra_coeffs[i] += k;
            continue;
        }
        if allowed.strict {
            return Err(Error::OddGapUnreachable(o));
        }
    }
    Ok(PeelResult { a, extra_coeffs, residual: r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rational::qi;

    #[test]
    fn cancels_pi_minus_two_with_x() {
        let c = CurveModel::standard(&[1, 0, 0, 1]).unwrap();
        let t = LaurentSeries::new(-2, vec![qi(1)], 1);
        let r = principal_part_solve(&t, &c, &PoleBasis::monomials()).unwrap();
        assert_eq!(r.a, c.x());
        assert!(r.residual.principal_part().is_zero());
    }

    #[test]
    fn cancels_pi_minus_three_with_y() {
        let c = CurveModel::standard(&[1, 0, 0, 1]).unwrap();
        let t = LaurentSeries::new(-3, vec![qi(1)], 1);
        let r = principal_part_solve(&t, &c, &PoleBasis::monomials()).unwrap();
        assert!(r.a.a().is_zero());
        assert!(!r.a.b().is_zero());
        assert!(r.residual.principal_part().is_zero());
    }

    #[test]
    fn zero_target() {
        let c = CurveModel::standard(&[1, 0, 0, 1]).unwrap();
        let r = principal_part_solve(&LaurentSeries::zero_to(1), &c, &PoleBasis::monomials()).unwrap();
        assert!(r.a.is_zero());
        assert!(r.residual.is_zero());
    }

    #[test]
    fn strict_mode_reports_odd_gap() {
        let c = CurveModel::standard(&[1, 0, 0, 0, 0, 1]).unwrap();
        let t = LaurentSeries::new(-3, vec![qi(1)], 1);
        let mut b = PoleBasis::monomials();
        b.strict = true;
        assert_eq!(principal_part_solve(&t, &c, &b).unwrap_err(), Error::OddGapUnreachable(3));
    }
}
