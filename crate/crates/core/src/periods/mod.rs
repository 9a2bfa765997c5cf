//! Symbolic period maps: the Frobenius-invariant path `p^cr_n`, its factorization
//! `p^cr = exp(h) exp(u)` with `exp(h)` in F^0, and the coordinates `u` of `j^dr_n`.
//!
//! Coefficients are iterated-integral symbols over a registry of labelled forms.

pub mod closed;
pub mod symbols;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::connext::LogExtension;
use crate::error::{Error, Result};
use crate::exactalg::{CurveModel, FuncElem, OneForm, Rational};
use crate::hodge::{hodge_constants, HodgeConstants, HodgeGenerators};
use crate::wordalg::{rank_of, to_lie_expr, word_string, Coeff, Key, LieExpr, LieWord, TensorElem};

pub use symbols::{shuffle_normalize, FormLabelJson, FormRegistry, IIProductSum, LabelId, ShPoly, SymbolTermJson};

/// Where the paths start.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BasepointKind {
    /// An affine rational point; no coordinates enter the symbols.
    Rational,
    /// The tangent vector `d/dpi` at infinity.
    Tangential,
}

/// Label of `alpha_i`.
pub fn alpha_label(i: usize) -> String {
    format!("a{i}")
}

/// Label of `alpha_i - d h_{A_i}`.
pub fn alpha_prime_label(i: usize) -> String {
    format!("a{i}p")
}

/// Label of a connection form `c_w` that is new to the registry.
pub fn c_label(k: Key) -> String {
    format!("c{}_{}", k.0, k.1)
}

/// `F alpha_0` (genus one).
pub const F_ALPHA0: &str = "Fa0";
/// `F^2 alpha_0 / 2 - lambda dF` (genus one).
pub const ALPHA0_SHIFTED: &str = "a0pp";

/// The registry `a_0 .. a_{2g-1}`.
pub fn rational_registry(curve: &CurveModel) -> Result<FormRegistry> {
    let mut reg = FormRegistry::new();
    for (i, a) in curve.alphas().iter().enumerate() {
        reg.express_or_add(&alpha_label(i), a)?;
    }
    Ok(reg)
}

/// The registry for tangential paths: `a_i`, `a_ip` for `i >= g`, and for genus one `Fa0`, `a0pp`.
pub fn tangential_registry(curve: &CurveModel, ext: &LogExtension) -> Result<FormRegistry> {
    let g = curve.genus();
    let mut reg = rational_registry(curve)?;
    for i in g..2 * g {
        let form = -&ext.c_of(&[i as u8]);
        reg.express_or_add(&alpha_prime_label(i), &form)?;
    }
    if g == 1 {
        let f = curve.big_f();
        let a0 = curve.alpha(0);
        reg.express_or_add(F_ALPHA0, &a0.mul_fe(f))?;
        let lambda = hodge_constants(curve)?.lambda;
        let half = Rational::new(1.into(), 2.into());
        let w = &a0.mul_fe(&f.pow(2)).scale(&half) - &f.d().scale(&lambda);
        reg.express_or_add(ALPHA0_SHIFTED, &w)?;
    }
    Ok(reg)
}

/// `1 + sum_w P(w) w` with `P(w) = sum over factorizations w = p_1 ... p_r of int conn(p_1) ... conn(p_r)`.
fn transport(g: usize, n: u32, conn: &BTreeMap<Key, ShPoly>) -> TensorElem<ShPoly> {
    let alph = 2 * g as u32;
    let mut memo: BTreeMap<Key, ShPoly> = BTreeMap::new();
    memo.insert((0, 1), ShPoly::one());
    let mut out = TensorElem::unit(g, n, ShPoly::one());
    for len in 1..=n {
        for rank in 1..=(alph as u64).pow(len) {
            let w = word_string(len, rank, alph);
            let mut acc = ShPoly::zero();
            for i in 1..=w.len() {
                let pk = (i as u32, rank_of(&w[..i], alph));
                let Some(form) = conn.get(&pk) else { continue };
                let rest = (len - i as u32, rank_of(&w[i..], alph));
                acc = acc.add(&form.prepend(&memo[&rest]));
            }
            out.add_term((len, rank), acc.clone());
            memo.insert((len, rank), acc);
        }
    }
    out
}

/// `p^cr_n` over a given registry. Tangential paths read their forms `-c_w` off the extension.
pub fn pcr_with_registry(n: u32, curve: &CurveModel, kind: BasepointKind, ext: Option<&LogExtension>, reg: &mut FormRegistry) -> Result<TensorElem<ShPoly>> {
    let g = curve.genus();
    let mut conn = BTreeMap::new();
    match kind {
        BasepointKind::Rational => {
            for (i, a) in curve.alphas().iter().enumerate() {
                conn.insert((1, i as u64 + 1), reg.linear(a)?);
            }
        }
        BasepointKind::Tangential => {
            let ext = ext.ok_or(Error::MissingExtension)?;
            if ext.level() < n {
                return Err(Error::MissingExtension);
            }
            for (&k, c) in ext.c_map() {
                if k.0 > n || c.is_zero() {
                    continue;
                }
                conn.insert(k, reg.express_or_add(&c_label(k), c)?.neg());
            }
        }
    }
    Ok(transport(g, n, &conn))
}

/// `p^cr_n` together with its registry.
pub fn pcr_symbolic(n: u32, curve: &CurveModel, kind: BasepointKind, ext: Option<&LogExtension>) -> Result<(FormRegistry, TensorElem<ShPoly>)> {
    let mut reg = match kind {
        BasepointKind::Rational => rational_registry(curve)?,
        BasepointKind::Tangential => tangential_registry(curve, ext.ok_or(Error::MissingExtension)?)?,
    };
    let p = pcr_with_registry(n, curve, kind, ext, &mut reg)?;
    Ok((reg, p))
}

/// Primitive F^0 lifts `B_k` of `A_g .. A_{2g-1}` at the endpoint: the Eulerian projections
/// of the level-`n` generators.
///
/// A non-constant coefficient `c` becomes `c(b) + int dc`, with `c(b)` the regularized
/// constant term at a tangential basepoint.
pub fn hodge_lifts(f0: &HodgeGenerators, n: u32, kind: BasepointKind, reg: &mut FormRegistry) -> Result<Vec<TensorElem<ShPoly>>> {
    let curve = f0.curve();
    let g = curve.genus();
    if f0.level() < n {
        return Err(Error::InvalidInput(format!("F0 generators known to level {}, need {n}", f0.level())));
    }
    let mut out = Vec::with_capacity(g);
    for k in g..2 * g {
        let t = f0.generator((1, k as u64 + 1)).truncate(n).eulerian();
        let mut q = TensorElem::zero(g, n, ShPoly::one());
        for (&w, c) in t.terms() {
            let v = match c.as_constant() {
                Some(r) => ShPoly::constant(r),
                None => {
                    let at_b = value_at_basepoint(c, curve, kind)
                        .map_err(|e| Error::UnsupportedLevel(format!("F0 generator for A{k} at level {n}: {e}")))?;
                    let label = format!("dB{k}_{}_{}", w.0, w.1);
                    ShPoly::constant(at_b).add(&reg.express_or_add(&label, &c.d())?)
                }
            };
            q.add_term(w, v);
        }
        if !q.is_primitive() {
            return Err(Error::NonPrimitiveLift(format!("F0 generator for A{k} at level {n}")));
        }
        out.push(q);
    }
    Ok(out)
}

fn value_at_basepoint(c: &FuncElem, curve: &CurveModel, kind: BasepointKind) -> Result<Rational> {
    match kind {
        BasepointKind::Rational => {
            let b = curve.basepoint().ok_or_else(|| Error::InvalidInput("non-constant coefficient needs a rational basepoint".into()))?;
            c.eval(&b.x, b.y.as_ref())
        }
        BasepointKind::Tangential => {
            let s = curve.expand(c, 1)?;
            s.coeff(0).ok_or_else(|| Error::PrecisionExhausted("constant term at infinity".into()))
        }
    }
}

/// `h = Phi(log(p mod J))`, where `J` is the ideal of `A_0 .. A_{g-1}` and `Phi(A_k) = B_k`.
pub fn hodge_factor(p: &TensorElem<ShPoly>, lifts: &[TensorElem<ShPoly>]) -> Result<TensorElem<ShPoly>> {
    let g = p.g();
    let n = p.n();
    let lp = p.kill_letters(|l| (l as usize) < g).log()?;
    let mut h = TensorElem::zero(g, n, ShPoly::one());
    for (w, c) in lp.words() {
        let mut m = TensorElem::unit(g, n, ShPoly::one());
        for &l in &w {
            m = m.concat_mul(&lifts[l as usize - g])?;
        }
        h = h.add(&m.scale(&c))?;
    }
    Ok(h)
}

/// `u = log(exp(-h) p)` for the `h` of [`hodge_factor`].
pub fn decompose_direct(p: &TensorElem<ShPoly>, lifts: &[TensorElem<ShPoly>]) -> Result<(TensorElem<ShPoly>, TensorElem<ShPoly>)> {
    let h = hodge_factor(p, lifts)?;
    let u = h.neg().exp()?.concat_mul(p)?.log()?;
    Ok((h, u))
}

/// Coordinates of `j^dr_n` with the Hodge factor.
#[derive(Clone, Debug)]
pub struct PeriodMapResult {
    pub level: u32,
    pub kind: BasepointKind,
    pub genus: usize,
    pub registry: FormRegistry,
    pub hodge_factor: LieExpr<ShPoly>,
    pub u: LieExpr<ShPoly>,
}

impl PeriodMapResult {
    /// Level 0: `u = h = 0`.
    pub fn level0(kind: BasepointKind, genus: usize, registry: FormRegistry) -> Self {
        PeriodMapResult { level: 0, kind, genus, registry, hodge_factor: LieExpr::new(), u: LieExpr::new() }
    }

    pub fn u_tensor(&self) -> Result<TensorElem<ShPoly>> {
        self.u.lie_expand(self.genus, self.level, &ShPoly::one())
    }

    pub fn hodge_tensor(&self) -> Result<TensorElem<ShPoly>> {
        self.hodge_factor.lie_expand(self.genus, self.level, &ShPoly::one())
    }

    /// `exp(h) exp(u)`.
    pub fn product(&self) -> Result<TensorElem<ShPoly>> {
        self.hodge_tensor()?.exp()?.concat_mul(&self.u_tensor()?.exp()?)
    }

    /// `exp(h) exp(u) = p`, exactly.
    pub fn check_identity(&self, p: &TensorElem<ShPoly>) -> Result<bool> {
        Ok(self.product()? == p.truncate(self.level))
    }

    pub fn to_json(&self, constants: Option<HodgeConstants>) -> PeriodMapJson {
        let lie = |e: &LieExpr<ShPoly>| e.terms.iter().map(|(w, c)| LieTermJson { bracket: w.to_string(), coeff: c.to_json(&self.registry) }).collect();
        PeriodMapJson {
            level: self.level,
            basepoint: self.kind,
            genus: self.genus,
            forms: self.registry.to_json(),
            u: lie(&self.u),
            hodge_factor: lie(&self.hodge_factor),
            constants,
        }
    }

    pub fn from_json(j: &PeriodMapJson, curve: &CurveModel) -> Result<Self> {
        let mut registry = FormRegistry::new();
        for l in &j.forms {
            let form = OneForm::new(FuncElem::from_json(&l.form, curve.f_arc().clone())?);
            let before = registry.len();
            registry.express_or_add(&l.label, &form)?;
            if registry.len() == before {
                return Err(Error::InvalidInput(format!("form {} depends on earlier labels", l.label)));
            }
        }
        let lie = |ts: &[LieTermJson]| -> Result<LieExpr<ShPoly>> {
            let mut e = LieExpr::new();
            for t in ts {
                e.push(LieWord::parse(&t.bracket)?, ShPoly::from_json(&t.coeff, &registry)?);
            }
            Ok(e)
        };
        let u = lie(&j.u)?;
        let hodge_factor = lie(&j.hodge_factor)?;
        Ok(PeriodMapResult { level: j.level, kind: j.basepoint, genus: j.genus, registry, hodge_factor, u })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LieTermJson {
    pub bracket: String,
    pub coeff: Vec<SymbolTermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodMapJson {
    pub level: u32,
    pub basepoint: BasepointKind,
    pub genus: usize,
    pub forms: Vec<FormLabelJson>,
    pub u: Vec<LieTermJson>,
    pub hodge_factor: Vec<LieTermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<HodgeConstants>,
}

/// One level up: `u_n = u_{n-1} + p_n - exp(h_n) exp(u_{n-1})`, re-verified exactly.
pub fn decompose_step(prev: &PeriodMapResult, pcr_n: &TensorElem<ShPoly>, f0: &HodgeGenerators) -> Result<PeriodMapResult> {
    let n = prev.level + 1;
    let g = prev.genus;
    if pcr_n.n() != n || pcr_n.g() != g {
        return Err(Error::DimensionMismatch);
    }
    let one = ShPoly::one();
    let mut registry = prev.registry.clone();
    let lifts = hodge_lifts(f0, n, prev.kind, &mut registry)?;
    let h = hodge_factor(pcr_n, &lifts)?;
    let u_prev = prev.u.lie_expand(g, n, &one)?;
    let approx = h.exp()?.concat_mul(&u_prev.exp()?)?;
    let diff = pcr_n.sub(&approx)?;
    if diff.terms().keys().any(|k| k.0 != n) {
        return Err(Error::ObstructionFound(format!("level {} decomposition does not lift to level {n}", prev.level)));
    }
    let u = u_prev.add(&diff)?;
    let u_lie = to_lie_expr(&u).map_err(|_| Error::ObstructionFound(format!("u_{n} is not primitive")))?;
    let h_lie = to_lie_expr(&h).map_err(|_| Error::NonPrimitiveLift(format!("Hodge factor at level {n}")))?;
    let out = PeriodMapResult { level: n, kind: prev.kind, genus: g, registry, hodge_factor: h_lie, u: u_lie };
    if !out.check_identity(pcr_n)? {
        return Err(Error::ObstructionFound(format!("decomposition identity fails at level {n}")));
    }
    Ok(out)
}

/// Everything computed for one period map.
#[derive(Clone, Debug)]
pub struct PeriodMapRun {
    pub result: PeriodMapResult,
    pub pcr: TensorElem<ShPoly>,
    pub extension: LogExtension,
    pub hodge: HodgeGenerators,
}

/// `j^dr_n` for the given basepoint kind, built level by level.
pub fn period_map(n: u32, curve: Arc<CurveModel>, kind: BasepointKind) -> Result<PeriodMapResult> {
    Ok(period_map_run(n, curve, kind)?.result)
}

/// [`period_map`] keeping the intermediate objects.
pub fn period_map_run(n: u32, curve: Arc<CurveModel>, kind: BasepointKind) -> Result<PeriodMapRun> {
    let extension = LogExtension::compute(curve.clone(), n)?;
    let hodge = HodgeGenerators::compute(&extension, n)?;
    let (registry, pcr) = pcr_symbolic(n, &curve, kind, Some(&extension))?;
    let mut result = PeriodMapResult::level0(kind, curve.genus(), registry);
    for m in 1..=n {
        result = decompose_step(&result, &pcr.truncate(m), &hodge)?;
    }
    Ok(PeriodMapRun { result, pcr, extension, hodge })
}

/// Constants table for the JSON output (genus one only).
pub fn constants_table(curve: &CurveModel) -> Option<HodgeConstants> {
    hodge_constants(curve).ok()
}
