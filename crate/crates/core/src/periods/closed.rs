//! Closed forms of `u_n` and of the Hodge factor in the cases where they are known explicitly.

use crate::connext::LogExtension;
use crate::error::{Error, Result};
use crate::exactalg::rational::{q, qi};
use crate::exactalg::Rational;
use crate::hodge::{hodge_constants, HodgeGenerators};
use crate::wordalg::{rank_of, Coeff, LieExpr, LieWord};

use super::{alpha_label, alpha_prime_label, BasepointKind, FormRegistry, ShPoly, ALPHA0_SHIFTED, F_ALPHA0};

/// Expected `u` and Hodge factor.
#[derive(Clone, Debug)]
pub struct ClosedForm {
    pub u: LieExpr<ShPoly>,
    pub hodge_factor: LieExpr<ShPoly>,
}

struct Ctx<'a> {
    reg: &'a FormRegistry,
}

impl Ctx<'_> {
    /// `int l_1 ... l_k` from label names.
    fn s(&self, labels: &[&str]) -> Result<ShPoly> {
        self.reg.word(labels)
    }

    fn sn(&self, labels: &[String]) -> Result<ShPoly> {
        let v: Vec<&str> = labels.iter().map(|s| s.as_str()).collect();
        self.s(&v)
    }
}

fn br(s: &str) -> LieWord {
    LieWord::parse(s).expect("well-formed bracket")
}

fn letter(i: usize) -> LieWord {
    LieWord::letter(i as u8)
}

fn lie2(i: usize, j: usize) -> LieWord {
    LieWord::br(letter(i), letter(j))
}

/// Coefficient of `A_i A_j` in the F^0 generator of `A_k`.
fn c_ijk(f0: &HodgeGenerators, i: usize, j: usize, k: usize) -> Result<Rational> {
    let a = 2 * f0.curve().genus() as u32;
    let v = f0.a((1, k as u64 + 1), (2, rank_of(&[i as u8, j as u8], a)));
    v.as_constant().ok_or_else(|| Error::UnsupportedLevel(format!("non-constant F0 coefficient at A{i}A{j} in generator {k}")))
}

fn truncated(e: LieExpr<ShPoly>, n: u32) -> LieExpr<ShPoly> {
    LieExpr { terms: e.terms.into_iter().filter(|(w, _)| w.degree() as u32 <= n).collect() }
}

/// Which version of the elliptic level-4 display to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level4Display {
    /// As printed: last term `1/2 int a0 a1 a0 a1 [[[A0,A1],A1],A0]`.
    Printed,
    /// Last term `1/2 int a0 a1 a1 a0 [[[A0,A1],A1],A0]`, the one consistent with `exp(h) exp(u) = p`.
    Amended,
}

/// Closed form for `(genus, n, kind)`, or `None` where none is known.
pub fn closed_form(n: u32, kind: BasepointKind, reg: &FormRegistry, ext: &LogExtension, f0: &HodgeGenerators) -> Result<Option<ClosedForm>> {
    closed_form_with(n, kind, reg, ext, f0, Level4Display::Printed)
}

/// [`closed_form`] with a choice of level-4 display.
pub fn closed_form_with(n: u32, kind: BasepointKind, reg: &FormRegistry, ext: &LogExtension, f0: &HodgeGenerators, l4: Level4Display) -> Result<Option<ClosedForm>> {
    let curve = ext.curve();
    let g = curve.genus();
    let cx = Ctx { reg };
    let out = match (g, kind, n) {
        (1, BasepointKind::Rational, 1..=4) => Some(ec_rational(&cx, curve, n, l4)?),
        (1, BasepointKind::Tangential, 1..=3) => Some(ec_tangential(&cx, curve, n)?),
        (_, BasepointKind::Rational, 2) => Some(hec_level2(&cx, g, f0, None)?),
        (_, BasepointKind::Tangential, 2) => Some(hec_level2(&cx, g, f0, Some(ext))?),
        _ => None,
    };
    Ok(out)
}

fn ec_rational(cx: &Ctx, curve: &crate::exactalg::CurveModel, n: u32, l4: Level4Display) -> Result<ClosedForm> {
    let k = hodge_constants(curve)?;
    let (lam, mu, kap) = (k.lambda, k.mu, k.kappa);
    let muk = &mu + &kap / qi(3);
    let mut u = LieExpr::new();
    u.push(br("A0"), cx.s(&["a0"])?);
    u.push(br("[A0,A1]"), cx.s(&["a0", "a1"])?);
    u.push(br("[A0,[A1,A0]]"), cx.s(&["a0", "a1", "a0"])?.scale_q(&q(1, 2)));
    u.push(br("[[A0,A1],A1]"), cx.s(&["a0", "a1", "a1"])?.sub(&cx.s(&["a1"])?.scale_q(&lam)));
    u.push(br("[[A0,[A0,A1]],A1]"), cx.s(&["a0", "a1"])?.scale_q(&(&lam / qi(2))));
    u.push(br("[[A0,[A0,A1]],A0]"), cx.s(&["a0", "a0", "a1", "a0"])?.scale_q(&q(1, 6)));
    u.push(br("[[[A0,A1],A0],A0]"), cx.s(&["a0", "a1", "a0", "a0"])?.scale_q(&q(1, 6)));
    u.push(br("[[A0,[A1,A0]],A1]"), cx.s(&["a0", "a1", "a0", "a1"])?.sub(&cx.s(&["a1", "a0"])?.scale_q(&lam)).scale_q(&q(1, 2)));
    u.push(
        br("[[[A0,A1],A1],A1]"),
        cx.s(&["a0", "a1", "a1", "a1"])?.sub(&cx.s(&["a1", "a1"])?.scale_q(&lam)).sub(&cx.s(&["a1"])?.scale_q(&muk)),
    );
    let last: &[&str] = match l4 {
        Level4Display::Printed => &["a0", "a1", "a0", "a1"],
        Level4Display::Amended => &["a0", "a1", "a1", "a0"],
    };
    u.push(br("[[[A0,A1],A1],A0]"), cx.s(last)?.scale_q(&q(1, 2)));
    let mut h = LieExpr::new();
    let a1 = cx.s(&["a1"])?;
    h.push(br("A1"), a1.clone());
    h.push(br("[[A0,A1],A1]"), a1.scale_q(&lam));
    h.push(br("[A1,[A1,[A1,A0]]]"), a1.scale_q(&-muk));
    Ok(ClosedForm { u: truncated(u, n), hodge_factor: truncated(h, n) })
}

fn ec_tangential(cx: &Ctx, curve: &crate::exactalg::CurveModel, n: u32) -> Result<ClosedForm> {
    let lam = hodge_constants(curve)?.lambda;
    let (a0, a1p, fa0, a0pp) = ("a0", "a1p", F_ALPHA0, ALPHA0_SHIFTED);
    let mut u = LieExpr::new();
    u.push(br("A0"), cx.s(&[a0])?);
    u.push(br("[A0,A1]"), cx.s(&[fa0])?.add(&cx.s(&[a0, a1p])?));
    u.push(br("[A0,[A1,A0]]"), cx.s(&[a0, a1p, a0])?.add(&cx.s(&[fa0, a0])?).sub(&cx.s(&[a0, fa0])?).scale_q(&q(1, 2)));
    u.push(
        br("[[A0,A1],A1]"),
        cx.s(&[a0, a1p, a1p])?.add(&cx.s(&[fa0, a1p])?).add(&cx.s(&[a0pp])?).sub(&cx.s(&[a1p])?.scale_q(&lam)),
    );
    let mut h = LieExpr::new();
    h.push(br("A1"), cx.s(&[a1p])?);
    h.push(br("[[A0,A1],A1]"), cx.s(&[a1p])?.scale_q(&lam));
    Ok(ClosedForm { u: truncated(u, n), hodge_factor: truncated(h, n) })
}

/// Level 2 in any genus; `ext` selects the tangential variant.
fn hec_level2(cx: &Ctx, g: usize, f0: &HodgeGenerators, ext: Option<&LogExtension>) -> Result<ClosedForm> {
    let a = |k: usize| alpha_label(k);
    let ap = |k: usize| if ext.is_some() && k >= g { alpha_prime_label(k) } else { alpha_label(k) };
    let alph = 2 * g as u32;
    let c2 = |l: usize, k: usize| -> Result<ShPoly> {
        match ext {
            Some(e) => cx.reg.linear(&e.c((2, rank_of(&[l as u8, k as u8], alph)))),
            None => Ok(ShPoly::zero()),
        }
    };
    let mut u = LieExpr::new();
    let mut h = LieExpr::new();
    for k in 0..g {
        u.push(letter(k), cx.sn(&[a(k)])?);
        for l in 0..g {
            u.push(lie2(k, l), cx.sn(&[a(k), a(l)])?.scale_q(&q(1, 2)));
        }
        for l in g..2 * g {
            u.push(lie2(k, l), cx.sn(&[a(k), ap(l)])?.add(&c2(l, k)?));
        }
    }
    for k in g..2 * g {
        let ak = cx.sn(&[ap(k)])?;
        h.push(letter(k), ak.clone());
        for i in 0..g {
            for j in g..2 * g {
                let c = c_ijk(f0, i, j, k)?;
                u.push(lie2(j, i), ak.scale_q(&c));
                h.push(lie2(i, j), ak.scale_q(&c));
            }
        }
        for l in g..2 * g {
            h.push(lie2(k, l), cx.sn(&[ap(k), ap(l)])?.scale_q(&q(1, 2)));
            h.push(lie2(k, l), c2(l, k)?.scale_q(&q(1, 2)));
        }
    }
    Ok(ClosedForm { u: u.canonicalize(), hodge_factor: h.canonicalize() })
}
