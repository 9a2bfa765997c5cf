//! Iterated-integral symbols: a registry of labelled 1-forms and the shuffle algebra on label words.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::rational::{fmt_rational, parse_rational};
use crate::exactalg::{FuncElemJson, OneForm, Poly, RatFunc, Rational};
use crate::wordalg::shuffle_words;

/// Label id inside a [`FormRegistry`].
pub type LabelId = u8;

/// Labelled 1-forms, kept linearly independent over Q.
#[derive(Clone, Debug, Default)]
pub struct FormRegistry {
    names: Vec<String>,
    forms: Vec<OneForm>,
    aliases: BTreeMap<String, Vec<(LabelId, Rational)>>,
}

impl FormRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, id: LabelId) -> &str {
        &self.names[id as usize]
    }

    pub fn form(&self, id: LabelId) -> &OneForm {
        &self.forms[id as usize]
    }

    pub fn id_of(&self, name: &str) -> Option<LabelId> {
        self.names.iter().position(|n| n == name).map(|i| i as LabelId)
    }

    pub fn labels(&self) -> impl Iterator<Item = (LabelId, &str, &OneForm)> {
        self.names.iter().zip(&self.forms).enumerate().map(|(i, (n, f))| (i as LabelId, n.as_str(), f))
    }

    /// Coordinates of `form` in the registered labels, if it lies in their span.
    pub fn express(&self, form: &OneForm) -> Option<Vec<(LabelId, Rational)>> {
        if form.is_zero() {
            return Some(vec![]);
        }
        let mut all: Vec<&OneForm> = self.forms.iter().collect();
        all.push(form);
        let mut vecs = coefficient_vectors(&all);
        let target = vecs.pop().expect("target vector");
        let sol = solve_columns(&vecs, &target)?;
        Some(sol.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, c)| (i as LabelId, c)).collect())
    }

    /// Registers `form` under `name` unless it is already in the span; returns it as a linear symbol.
    /// A name already in the span becomes an alias for its coordinates.
    pub fn express_or_add(&mut self, name: &str, form: &OneForm) -> Result<ShPoly> {
        if self.id_of(name).is_some() || self.aliases.contains_key(name) {
            return Err(Error::InvalidInput(format!("label {name} already in use")));
        }
        if let Some(c) = self.express(form) {
            self.aliases.insert(name.to_string(), c.clone());
            return Ok(ShPoly::linear(&c));
        }
        if self.names.len() >= LabelId::MAX as usize {
            return Err(Error::OutOfRange("too many form labels".into()));
        }
        self.names.push(name.to_string());
        self.forms.push(form.clone());
        Ok(ShPoly::symbol(&[(self.names.len() - 1) as LabelId]))
    }

    /// `int w` for a label or alias name.
    pub fn lookup(&self, name: &str) -> Option<ShPoly> {
        match self.id_of(name) {
            Some(id) => Some(ShPoly::symbol(&[id])),
            None => self.aliases.get(name).map(|c| ShPoly::linear(c)),
        }
    }

    pub fn aliases(&self) -> &BTreeMap<String, Vec<(LabelId, Rational)>> {
        &self.aliases
    }

    /// `int w_1 ... w_k` for label or alias names, expanded multilinearly.
    pub fn word(&self, names: &[&str]) -> Result<ShPoly> {
        let mut acc = ShPoly::one();
        for n in names.iter().rev() {
            let l = self.lookup(n).ok_or_else(|| Error::InvalidInput(format!("unknown form label {n}")))?;
            acc = l.prepend(&acc);
        }
        Ok(acc)
    }

    /// `int form` as a linear symbol; fails if the form is outside the span.
    pub fn linear(&self, form: &OneForm) -> Result<ShPoly> {
        self.express(form)
            .map(|c| ShPoly::linear(&c))
            .ok_or_else(|| Error::InvalidInput(format!("form {form} is not in the registered span")))
    }

    pub fn to_json(&self) -> Vec<FormLabelJson> {
        self.labels().map(|(_, n, f)| FormLabelJson { label: n.to_string(), form: f.u.to_json() }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormLabelJson {
    pub label: String,
    /// The function `u` of the form `u dx`.
    pub form: FuncElemJson,
}

fn lcm(a: &Poly, b: &Poly) -> Poly {
    let g = Poly::gcd(a, b);
    (a * &b.div_exact(&g).expect("gcd divides")).monic()
}

/// Vectors over Q that are linearly dependent exactly when the forms are.
fn coefficient_vectors(forms: &[&OneForm]) -> Vec<Vec<Rational>> {
    let parts: [Vec<&RatFunc>; 2] = [forms.iter().map(|w| w.u.a()).collect(), forms.iter().map(|w| w.u.b()).collect()];
    let mut out = vec![Vec::new(); forms.len()];
    for part in &parts {
        let den = part.iter().fold(Poly::one(), |l, r| lcm(&l, r.den()));
        let polys: Vec<Poly> = part.iter().map(|r| r.num() * &den.div_exact(r.den()).expect("lcm divides")).collect();
        let width = polys.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
        for (v, p) in out.iter_mut().zip(&polys) {
            v.extend((0..width).map(|k| p.coeff(k)));
        }
    }
    out
}

/// Solves `sum c_j cols[j] = target`; `cols` must be linearly independent.
fn solve_columns(cols: &[Vec<Rational>], target: &[Rational]) -> Option<Vec<Rational>> {
    let rows = target.len();
    let n = cols.len();
    let mut m: Vec<Vec<Rational>> = (0..rows).map(|r| cols.iter().map(|c| c[r].clone()).chain([target[r].clone()]).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for k in 0..=n {
                    let d = &f * &m[row][k];
                    m[r][k] -= d;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if m[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    let mut sol = vec![Rational::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        sol[c] = m[r][n].clone();
    }
    Some(sol)
}

/// Q-linear combination of iterated-integral symbols `int w_1 ... w_k`, with the shuffle product.
///
/// Every product is reduced on construction, so each monomial is a single symbol.
#[derive(Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct ShPoly {
    terms: BTreeMap<Vec<LabelId>, Rational>,
}

impl ShPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::symbol(&[])
    }

    pub fn constant(r: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(vec![], r);
        p
    }

    /// `int w_1 ... w_k`; the empty word is 1.
    pub fn symbol(w: &[LabelId]) -> Self {
        let mut p = Self::zero();
        p.add_term(w.to_vec(), Rational::one());
        p
    }

    pub fn linear(c: &[(LabelId, Rational)]) -> Self {
        let mut p = Self::zero();
        for (l, r) in c {
            p.add_term(vec![*l], r.clone());
        }
        p
    }

    pub fn terms(&self) -> &BTreeMap<Vec<LabelId>, Rational> {
        &self.terms
    }

    pub fn coeff(&self, w: &[LabelId]) -> Rational {
        self.terms.get(w).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, w: Vec<LabelId>, r: Rational) {
        if r.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += r;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(r);
            }
        }
    }

    /// Constant part, if the symbol has no non-empty words.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Vec::new()).cloned(),
            _ => None,
        }
    }

    /// Concatenation `int (l_1 ... l_k) w` for each term of `self` (linear in each label), prepended to each word of `rest`.
    pub fn prepend(&self, rest: &ShPoly) -> ShPoly {
        let mut out = ShPoly::zero();
        for (u, a) in &self.terms {
            for (v, b) in &rest.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, a * b);
            }
        }
        out
    }

    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    pub fn display_with(&self, reg: &FormRegistry) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let body = if w.is_empty() { "1".to_string() } else { format!("I({})", w.iter().map(|&l| reg.name(l)).collect::<Vec<_>>().join(",")) };
                format!("{}*{}", fmt_rational(c), body)
            })
            .collect();
        parts.join(" + ")
    }

    pub fn to_json(&self, reg: &FormRegistry) -> Vec<SymbolTermJson> {
        self.terms
            .iter()
            .map(|(w, c)| SymbolTermJson { word: w.iter().map(|&l| reg.name(l).to_string()).collect(), scalar: fmt_rational(c) })
            .collect()
    }

    pub fn from_json(j: &[SymbolTermJson], reg: &FormRegistry) -> Result<Self> {
        let mut p = ShPoly::zero();
        for t in j {
            let w = t
                .word
                .iter()
                .map(|n| reg.id_of(n).ok_or_else(|| Error::InvalidInput(format!("unknown form label {n}"))))
                .collect::<Result<Vec<_>>>()?;
            p.add_term(w, parse_rational(&t.scalar)?);
        }
        Ok(p)
    }
}

impl fmt::Debug for ShPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.terms.iter().map(|(w, c)| format!("{}*I{:?}", fmt_rational(c), w)).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymbolTermJson {
    pub word: Vec<String>,
    pub scalar: String,
}

impl crate::wordalg::Coeff for ShPoly {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn zero_like(&self) -> Self {
        ShPoly::zero()
    }
    fn one_like(&self) -> Self {
        ShPoly::one()
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }
    fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), -c);
        }
        out
    }
    fn neg(&self) -> Self {
        ShPoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect() }
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = ShPoly::zero();
        for (u, a) in &self.terms {
            for (v, b) in &o.terms {
                let ab = a * b;
                for (w, m) in shuffle_words(u, v) {
                    out.add_term(w, &ab * Rational::from_integer(m.into()));
                }
            }
        }
        out
    }
    fn scale_q(&self, q: &Rational) -> Self {
        if Zero::is_zero(q) {
            return ShPoly::zero();
        }
        ShPoly { terms: self.terms.iter().map(|(w, c)| (w.clone(), c * q)).collect() }
    }
}

/// A sum of products of symbols, before shuffle reduction.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IIProductSum {
    pub terms: Vec<(Rational, Vec<Vec<LabelId>>)>,
}

/// Reduces every product of symbols to a sum of single symbols.
pub fn shuffle_normalize(p: &IIProductSum) -> ShPoly {
    use crate::wordalg::Coeff;
    let mut out = ShPoly::zero();
    for (c, factors) in &p.terms {
        let prod = factors.iter().fold(ShPoly::one(), |acc, w| acc.mul(&ShPoly::symbol(w)));
        out = Coeff::add(&out, &prod.scale_q(c));
    }
    out
}
