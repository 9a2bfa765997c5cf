//! The F^0 piece of the Hodge filtration on the extended connection.
//!
//! A generator over the affine chart is `T^f_m = w^f_m + sum a^{l,k}_{m,f} w^k_l` with `a`
//! polynomial in `x, y`; near infinity it is `S^f_m = w^f_m + sum b^{l,k}_{m,f} w^k_l` with `b`
//! regular. Coefficients on pivot words `w^{f'}_p`, `f'` in `F_p`, vanish on both sides, and on
//! the overlap the gauge carries one family onto the span of the other:
//! `G(T^f_m) = S^f_m + sum_{p > m} [G(T^f_m)]_{(p, f')} S^{f'}_p`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::connext::{gauge_apply_word, words_of_len, LogExtension};
use crate::error::{Error, Result};
use crate::exactalg::{principal_part_solve, CurveModel, FuncElem, FuncElemJson, LaurentSeries, OneForm, PoleBasis, Rational};
use crate::wordalg::{concat_rank, word_string, Key, TensorElem};

/// Generator label `(m, f)`.
pub type GenKey = (u32, u64);

/// Ranks of the words of length `n` in the letters `A_g .. A_{2g-1}`.
pub fn f_index_set(n: u32, g: usize) -> Vec<u64> {
    let a = 2 * g as u64;
    let mut out = vec![1u64];
    for i in 0..n {
        let mut next = Vec::with_capacity(out.len() * g);
        for &f in &out {
            for fi in g as u64..a {
                next.push(f + fi * a.pow(i));
            }
        }
        out = next;
    }
    out.sort_unstable();
    out
}

fn is_pivot(k: Key, g: usize) -> bool {
    word_string(k.0, k.1, 2 * g as u32).iter().all(|&l| l as usize >= g)
}

/// F^0 generators at level `n`.
#[derive(Clone, Debug)]
pub struct HodgeGenerators {
    curve: Arc<CurveModel>,
    n: u32,
    a: BTreeMap<GenKey, BTreeMap<Key, FuncElem>>,
    b: BTreeMap<GenKey, BTreeMap<Key, FuncElem>>,
}

impl HodgeGenerators {
    /// Level 0: the single generator 1.
    pub fn level0(curve: Arc<CurveModel>) -> Self {
        let mut a = BTreeMap::new();
        a.insert((0, 1), BTreeMap::new());
        let b = a.clone();
        HodgeGenerators { curve, n: 0, a, b }
    }

    /// Runs the F^0 algorithm up to level `n`, extending `ext` if it is too short.
    pub fn compute(ext: &LogExtension, n: u32) -> Result<Self> {
        let ext = if ext.level() < n { LogExtension::compute(ext.curve_arc().clone(), n)? } else { ext.clone() };
        let mut h = Self::level0(ext.curve_arc().clone());
        while h.n < n {
            h = h.step(&ext.truncate(h.n + 1))?;
        }
        Ok(h)
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    pub fn keys(&self) -> Vec<GenKey> {
        self.a.keys().copied().collect()
    }

    pub fn a(&self, gen: GenKey, k: Key) -> FuncElem {
        self.a.get(&gen).and_then(|m| m.get(&k)).cloned().unwrap_or_else(|| self.curve.zero())
    }

    pub fn b(&self, gen: GenKey, k: Key) -> FuncElem {
        self.b.get(&gen).and_then(|m| m.get(&k)).cloned().unwrap_or_else(|| self.curve.zero())
    }

    pub fn a_map(&self, gen: GenKey) -> Option<&BTreeMap<Key, FuncElem>> {
        self.a.get(&gen)
    }

    /// Overwrites one `a` coefficient.
    pub fn set_a(&mut self, gen: GenKey, k: Key, v: FuncElem) {
        let m = self.a.entry(gen).or_default();
        if v.is_zero() {
            m.remove(&k);
        } else {
            m.insert(k, v);
        }
    }

    /// `T^f_m` over the affine chart.
    pub fn generator(&self, gen: GenKey) -> TensorElem<FuncElem> {
        let g = self.curve.genus();
        let mut t = TensorElem::zero(g, self.n, self.curve.one());
        t.add_term(gen, self.curve.one());
        if let Some(m) = self.a.get(&gen) {
            for (k, v) in m {
                t.add_term(*k, v.clone());
            }
        }
        t
    }

    /// `S^f_m = w^f_m + sum b^{l,k}_{m,f} w^k_l` in the frame at infinity.
    pub fn generator_at_infinity(&self, gen: GenKey) -> TensorElem<FuncElem> {
        let g = self.curve.genus();
        let mut t = TensorElem::zero(g, self.n, self.curve.one());
        t.add_term(gen, self.curve.one());
        if let Some(m) = self.b.get(&gen) {
            for (k, v) in m {
                t.add_term(*k, v.clone());
            }
        }
        t
    }

    /// `G_n(T^f_m)` at truncation `n`, with `T^f_m` taken at its current level.
    pub fn gauged_generator(&self, gen: GenKey, ext: &LogExtension, n: u32) -> Result<TensorElem<FuncElem>> {
        let trunc = ext.truncate(n);
        if trunc.level() != n {
            return Err(Error::MissingExtension);
        }
        let gauge = trunc.gauge();
        let mut s = gauge_apply_word(&gauge, gen, &self.curve)?;
        if let Some(m) = self.a.get(&gen) {
            for (k, v) in m {
                if k.0 <= n {
                    s = s.add(&gauge_apply_word(&gauge, *k, &self.curve)?.scale(v))?;
                }
            }
        }
        Ok(s)
    }

    /// One level of the F^0 algorithm; `ext` must reach level `n + 1`.
    pub fn step(&self, ext: &LogExtension) -> Result<Self> {
        let curve = &self.curve;
        let g = curve.genus();
        let alph = 2 * g as u32;
        let n1 = self.n + 1;
        if ext.level() < n1 {
            return Err(Error::MissingExtension);
        }
        let gens = self.keys();
        let mut tt = BTreeMap::new();
        for &gk in &gens {
            tt.insert(gk, self.gauged_generator(gk, ext, n1)?);
        }
        let extras: Vec<FuncElem> = (g..2 * g).map(|t| ext.h_of(&[t as u8])).collect();
        let mut out = self.clone();
        out.n = n1;
        for f in f_index_set(n1, g) {
            out.a.insert((n1, f), BTreeMap::new());
            out.b.insert((n1, f), BTreeMap::new());
        }
        let zero = curve.zero();
        for k in words_of_len(n1, alph).filter(|&k| !is_pivot(k, g)) {
            let mut ak: BTreeMap<GenKey, FuncElem> = BTreeMap::new();
            let mut bk: BTreeMap<GenKey, FuncElem> = BTreeMap::new();
            // `[G(T^f_m)]_k - a^{n+1,k}_{m,f} - sum_{p > m} [G(T^f_m)]_{(p,f')} b^{n+1,k}_{p,f'}`
            let base = |gk: GenKey, bk: &BTreeMap<GenKey, FuncElem>| -> FuncElem {
                let t = &tt[&gk];
                let mut acc = t.coeff(k);
                for (&(p, fp), bp) in bk.iter() {
                    if p > gk.0 {
                        let mu = t.coeff((p, fp));
                        if !mu.is_zero() {
                            acc = &acc - &(&mu * bp);
                        }
                    }
                }
                acc
            };
            for m in (0..=self.n).rev() {
                let mut lam: Vec<(GenKey, Rational)> = Vec::new();
                for f in f_index_set(m, g) {
                    let target = -&base((m, f), &bk);
                    let basis = PoleBasis { monomials: true, extras: if m < self.n { extras.clone() } else { vec![] }, strict: true };
                    let series = if target.is_zero() { LaurentSeries::zero_to(1) } else { curve.expand(&target, 1)? };
                    let peel = principal_part_solve(&series, curve, &basis).map_err(|e| match e {
                        Error::OddGapUnreachable(o) => Error::ObstructionFound(format!("pole of order {o} at generator ({m},{f}), word {k:?}")),
                        e => e,
                    })?;
                    if !peel.a.is_zero() {
                        ak.insert((m, f), peel.a);
                    }
                    for (i, c) in peel.extra_coeffs.into_iter().enumerate() {
                        if !c.is_zero() {
                            let t = (g + i) as u64;
                            lam.push(((m + 1, concat_rank(t + 1, f, m, alph)), -c));
                        }
                    }
                }
                for (gk, c) in lam {
                    let cst = curve.constant(c);
                    let v = &ak.get(&gk).cloned().unwrap_or_else(|| zero.clone()) + &cst;
                    ak.insert(gk, v);
                    let v = &bk.get(&gk).cloned().unwrap_or_else(|| zero.clone()) + &cst;
                    bk.insert(gk, v);
                }
                if m == 0 {
                    if let (Some(a01), Some(bp)) = (ak.get(&(0, 1)).cloned(), curve.basepoint()) {
                        let v = a01.eval(&bp.x, bp.y.as_ref())?;
                        ak.insert((0, 1), &a01 - &curve.constant(v));
                    }
                }
                for f in f_index_set(m, g) {
                    let v = &ak.get(&(m, f)).cloned().unwrap_or_else(|| zero.clone()) + &base((m, f), &bk);
                    bk.insert((m, f), v);
                }
            }
            for &gk in &gens {
                let bval = bk.get(&gk).cloned().unwrap_or_else(|| zero.clone());
                if !curve.regular_at_infinity(&bval)? {
                    return Err(Error::ObstructionFound(format!("b at generator {gk:?}, word {k:?} has a pole")));
                }
                if !bval.is_zero() {
                    out.b.get_mut(&gk).expect("generator").insert(k, bval);
                }
                if let Some(v) = ak.get(&gk).filter(|v| !v.is_zero()) {
                    out.a.get_mut(&gk).expect("generator").insert(k, v.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> HodgeJson {
        let a = 2 * self.curve.genus() as u32;
        let terms = |m: Option<&BTreeMap<Key, FuncElem>>| -> Vec<GenTermJson> {
            m.into_iter().flatten().map(|(&(len, rank), c)| GenTermJson { len, rank, coeff: c.to_json() }).collect()
        };
        HodgeJson {
            level: self.n,
            generators: self
                .a
                .keys()
                .map(|&(m, f)| GeneratorJson {
                    m,
                    f,
                    word: word_label(m, f, a),
                    terms: terms(self.a.get(&(m, f))),
                    at_infinity: terms(self.b.get(&(m, f))),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &HodgeJson, curve: Arc<CurveModel>) -> Result<Self> {
        let alph = 2 * curve.genus() as u32;
        let fa = curve.f_arc().clone();
        let terms = |ts: &[GenTermJson]| -> Result<BTreeMap<Key, FuncElem>> {
            let mut out = BTreeMap::new();
            for t in ts {
                if t.len > j.level {
                    return Err(Error::InvalidInput(format!("word length {} above level {}", t.len, j.level)));
                }
                crate::wordalg::WordIndex::new(t.len, t.rank, alph)?;
                out.insert((t.len, t.rank), FuncElem::from_json(&t.coeff, fa.clone())?);
            }
            Ok(out)
        };
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        for g in &j.generators {
            crate::wordalg::WordIndex::new(g.m, g.f, alph)?;
            a.insert((g.m, g.f), terms(&g.terms)?);
            b.insert((g.m, g.f), terms(&g.at_infinity)?);
        }
        Ok(HodgeGenerators { curve, n: j.level, a, b })
    }
}

fn word_label(l: u32, r: u64, a: u32) -> String {
    let w = word_string(l, r, a);
    if w.is_empty() {
        "1".into()
    } else {
        w.iter().map(|x| format!("A{x}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenTermJson {
    pub len: u32,
    pub rank: u64,
    pub coeff: FuncElemJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub m: u32,
    pub f: u64,
    pub word: String,
    pub terms: Vec<GenTermJson>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub at_infinity: Vec<GenTermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HodgeJson {
    pub level: u32,
    pub generators: Vec<GeneratorJson>,
}

/// One failed gluing or normalization condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionFailure {
    pub generator: GenKey,
    pub word: Key,
    pub reason: &'static str,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub checked: usize,
    pub failures: Vec<ConditionFailure>,
}

impl ConditionReport {
    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the overlap identities, polynomiality of `a`, regularity of `b` and `a_{0,1}(b) = 0`.
pub fn check_conditions_im(gens: &HodgeGenerators, ext: &LogExtension) -> Result<ConditionReport> {
    let curve = gens.curve();
    let g = curve.genus();
    let n = gens.level();
    let mut failures = Vec::new();
    let mut checked = 0;
    let keys = gens.keys();
    let ss: BTreeMap<GenKey, TensorElem<FuncElem>> = keys.iter().map(|&k| (k, gens.generator_at_infinity(k))).collect();
    for &gk in &keys {
        let t = gens.gauged_generator(gk, ext, n)?;
        let mut r = t.sub(&ss[&gk])?;
        for &pk in keys.iter().filter(|pk| pk.0 > gk.0) {
            let c = t.coeff(pk);
            if !c.is_zero() {
                r = r.sub(&ss[&pk].scale(&c))?;
            }
        }
        checked += 1;
        for (&k, _) in r.terms() {
            failures.push(ConditionFailure { generator: gk, word: k, reason: "overlap identity" });
        }
        if let Some(m) = gens.a.get(&gk) {
            for (&k, v) in m {
                checked += 1;
                if !v.is_polynomial() {
                    failures.push(ConditionFailure { generator: gk, word: k, reason: "a not polynomial" });
                }
                if is_pivot(k, g) {
                    failures.push(ConditionFailure { generator: gk, word: k, reason: "a on pivot word" });
                }
                if gk == (0, 1) {
                    if let Some(bp) = curve.basepoint() {
                        if !v.eval(&bp.x, bp.y.as_ref())?.is_zero() {
                            failures.push(ConditionFailure { generator: gk, word: k, reason: "a(b) != 0" });
                        }
                    }
                }
            }
        }
        if let Some(m) = gens.b.get(&gk) {
            for (&k, v) in m {
                checked += 1;
                if !curve.regular_at_infinity(v)? {
                    failures.push(ConditionFailure { generator: gk, word: k, reason: "b not regular at infinity" });
                }
            }
        }
    }
    Ok(ConditionReport { checked, failures })
}

/// Constants of the elliptic case for the chosen basis and F.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HodgeConstants {
    #[serde(with = "crate::exactalg::rational::serde_q")]
    pub lambda: Rational,
    #[serde(with = "crate::exactalg::rational::serde_q")]
    pub mu: Rational,
    #[serde(with = "crate::exactalg::rational::serde_q")]
    pub kappa: Rational,
    #[serde(with = "crate::exactalg::rational::serde_q")]
    pub nu: Rational,
}

/// The constant `k` with `k * a + b` of pole order at most `max_pole`, from series to order `-max_pole`.
fn kill_with_constant(a: &LaurentSeries, b: &LaurentSeries, max_pole: i64) -> Result<Rational> {
    let va = a.valuation().ok_or_else(|| Error::ObstructionFound("zero direction".into()))?;
    let k = -b.coeff(va).unwrap_or_else(Rational::zero) / a.coeff(va).expect("leading");
    let rest = a.scale(&k).add(b);
    match rest.valuation() {
        Some(v) if v < -max_pole => Err(Error::ObstructionFound(format!("pole of order {} survives", -v))),
        _ => Ok(k),
    }
}

/// `lambda`, `mu`, `kappa`, `nu` from their defining pole conditions.
pub fn hodge_constants(curve: &CurveModel) -> Result<HodgeConstants> {
    if curve.genus() != 1 {
        return Err(Error::NotElliptic);
    }
    let f = curve.big_f();
    let df = f.d();
    let a0 = curve.alpha(0);
    let half = Rational::new(1.into(), 2.into());
    let third = Rational::new(1.into(), 3.into());
    let sixth = Rational::new(1.into(), 6.into());
    let ef = |w: &OneForm, o: i64| curve.expand_form(w, o);
    let lambda = kill_with_constant(&ef(&df, -1)?, &ef(&a0.mul_fe(&f.pow(2)).scale(&-half.clone()), -1)?, 1)?;
    let w = &df.mul_fe(f).scale(&(&third * &lambda)) - &a0.mul_fe(&f.pow(3)).scale(&sixth);
    let mu = kill_with_constant(&ef(&df, -1)?, &ef(&w, -1)?, 1)?;
    let lf2 = f.pow(2).scale(&lambda);
    let nu = kill_with_constant(&curve.expand(&curve.x(), 0)?, &curve.expand(&lf2, 0)?, 0)?;
    let base = &curve.x().scale(&nu) + &lf2;
    let kappa = kill_with_constant(&curve.expand(f, 0)?, &curve.expand(&base, 0)?, 0)?;
    Ok(HodgeConstants { lambda, mu, kappa, nu })
}
