//! Universal unipotent connections, gauge transformations and their logarithmic extension at infinity.
//!
//! The gauge `G_n` acts on a word `w` by `w + sum_p h_p p w` and the extended connection by
//! `w -> sum_p c_p p w`, the sums running over nonempty prefixes `p` with `|p w| <= n`.
//! Storing `h_p` and `c_p` once per word `p` encodes the block shift law
//! `h^{r,i+1}_{n+1} = h^{r,i}_n`: the entry `h^{r,i}_n` is `h_p` for the word `p` of length
//! `n - i` and rank `r`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactalg::{CurveModel, FuncElem, FuncElemJson, LaurentSeries, OneForm, Rational};
use crate::wordalg::{Key, TensorElem};

/// Splits a word key into its first letter and the remaining word.
pub fn split_first(k: Key, alphabet: u32) -> (u8, Key) {
    let (l, r) = k;
    let block = (alphabet as u64).pow(l - 1);
    (((r - 1) / block) as u8, (l - 1, (r - 1) % block + 1))
}

/// Splits a word key into its prefix of length `i` and the suffix.
pub fn split_at(k: Key, i: u32, alphabet: u32) -> (Key, Key) {
    let (l, r) = k;
    let block = (alphabet as u64).pow(l - i);
    ((i, (r - 1) / block + 1), (l - i, (r - 1) % block + 1))
}

/// Keys of all words of length `l`, in rank order.
pub fn words_of_len(l: u32, alphabet: u32) -> impl Iterator<Item = Key> {
    (1..=(alphabet as u64).pow(l)).map(move |r| (l, r))
}

/// Solves `dh - target` for `h` a combination of `F, F^2, ..` so that the difference has at
/// worst a logarithmic pole at infinity. Returns `(h, c)` with `c = dh - target`.
pub fn solve_h(target: &OneForm, curve: &CurveModel) -> Result<(FuncElem, OneForm)> {
    if target.is_zero() {
        return Ok((curve.zero(), curve.zero_form()));
    }
    let mut r = curve.expand_form(target, -1)?;
    let mut h = curve.zero();
    let big_f = curve.big_f();
    let mut dpow: BTreeMap<i64, LaurentSeries> = BTreeMap::new();
    while let Some(v) = r.valuation() {
        let o = -v;
        let j = o - 1;
        if !dpow.contains_key(&j) {
            let s = curve.expand_form(&big_f.pow(j as usize).d(), -1)?;
            dpow.insert(j, s);
        }
        let s = &dpow[&j];
        let lead = s.coeff(v).ok_or_else(|| Error::ObstructionFound("F power expansion".into()))?;
        let k = r.coeff(v).expect("known") / lead;
        r = r.sub(&s.scale(&k));
        h = &h + &big_f.pow(j as usize).scale(&k);
    }
    let c = &h.d() - target;
    Ok((h, c))
}

/// The block data `(G_n, C'_n)` of the logarithmic extension at level `n`.
#[derive(Clone, Debug)]
pub struct LogExtension {
    curve: Arc<CurveModel>,
    n: u32,
    h: BTreeMap<Key, FuncElem>,
    c: BTreeMap<Key, OneForm>,
}

/// The gauge `G_n`, given by one function per nonempty word.
#[derive(Clone, Debug)]
pub struct Gauge<'a> {
    pub n: u32,
    pub g: usize,
    pub h: &'a BTreeMap<Key, FuncElem>,
}

impl LogExtension {
    /// Level 0: no correction.
    pub fn level0(curve: Arc<CurveModel>) -> Self {
        LogExtension { curve, n: 0, h: BTreeMap::new(), c: BTreeMap::new() }
    }

    /// Runs the extension up to level `n`.
    pub fn compute(curve: Arc<CurveModel>, n: u32) -> Result<Self> {
        let mut e = Self::level0(curve);
        while e.n < n {
            e = e.step()?;
        }
        Ok(e)
    }

    pub fn curve(&self) -> &CurveModel {
        &self.curve
    }

    pub fn curve_arc(&self) -> &Arc<CurveModel> {
        &self.curve
    }

    pub fn level(&self) -> u32 {
        self.n
    }

    pub fn alphabet(&self) -> u32 {
        2 * self.curve.genus() as u32
    }

    pub fn h_map(&self) -> &BTreeMap<Key, FuncElem> {
        &self.h
    }

    pub fn c_map(&self) -> &BTreeMap<Key, OneForm> {
        &self.c
    }

    /// `h_p`; the empty word gives 1.
    pub fn h(&self, k: Key) -> FuncElem {
        if k.0 == 0 {
            return self.curve.one();
        }
        self.h.get(&k).cloned().unwrap_or_else(|| self.curve.zero())
    }

    /// `c_p`; zero for the empty word.
    pub fn c(&self, k: Key) -> OneForm {
        self.c.get(&k).cloned().unwrap_or_else(|| self.curve.zero_form())
    }

    pub fn h_of(&self, letters: &[u8]) -> FuncElem {
        self.h((letters.len() as u32, crate::wordalg::rank_of(letters, self.alphabet())))
    }

    pub fn c_of(&self, letters: &[u8]) -> OneForm {
        self.c((letters.len() as u32, crate::wordalg::rank_of(letters, self.alphabet())))
    }

    /// The block entry `h^{r,i}_n`.
    pub fn h_ri(&self, r: u64, i: u32) -> Result<FuncElem> {
        let l = self.n.checked_sub(i).filter(|&l| l >= 1).ok_or_else(|| Error::OutOfRange(format!("i = {i}")))?;
        crate::wordalg::WordIndex::new(l, r, self.alphabet())?;
        Ok(self.h((l, r)))
    }

    /// The block entry `c^{r,i}_n`.
    pub fn c_ri(&self, r: u64, i: u32) -> Result<OneForm> {
        let l = self.n.checked_sub(i).filter(|&l| l >= 1).ok_or_else(|| Error::OutOfRange(format!("i = {i}")))?;
        crate::wordalg::WordIndex::new(l, r, self.alphabet())?;
        Ok(self.c((l, r)))
    }

    pub fn gauge(&self) -> Gauge<'_> {
        Gauge { n: self.n, g: self.curve.genus(), h: &self.h }
    }

    /// The differential equation target for word `v`: `alpha_{v_1} h_{v'} + sum_{v = p q} h_p c_q`.
    pub fn target(&self, v: Key) -> OneForm {
        let a = self.alphabet();
        let (first, rest) = split_first(v, a);
        let mut t = self.curve.alpha(first as usize).mul_fe(&self.h(rest));
        for i in 1..v.0 {
            let (p, q) = split_at(v, i, a);
            let (hp, cq) = (self.h(p), self.c(q));
            if !hp.is_zero() && !cq.is_zero() {
                t = &t + &cq.mul_fe(&hp);
            }
        }
        t
    }

    /// Adds all words of length `n + 1`.
    pub fn step(&self) -> Result<Self> {
        let a = self.alphabet();
        let l = self.n + 1;
        let keys: Vec<Key> = words_of_len(l, a).collect();
        let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(keys.len()).max(1);
        let chunk = keys.len().div_ceil(threads);
        let results: Vec<Result<Vec<(Key, FuncElem, OneForm)>>> = std::thread::scope(|s| {
            let handles: Vec<_> = keys
                .chunks(chunk)
                .map(|ks| {
                    s.spawn(move || {
                        ks.iter()
                            .map(|&k| {
                                let (h, c) = solve_h(&self.target(k), &self.curve)?;
                                Ok((k, h, c))
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        let mut next = self.clone();
        next.n = l;
        for r in results {
            for (k, h, c) in r? {
                if !h.is_zero() {
                    next.h.insert(k, h);
                }
                if !c.is_zero() {
                    next.c.insert(k, c);
                }
            }
        }
        Ok(next)
    }

    /// Restriction to level `m <= n`.
    pub fn truncate(&self, m: u32) -> Self {
        let keep = |k: &Key| k.0 <= m;
        LogExtension {
            curve: self.curve.clone(),
            n: m.min(self.n),
            h: self.h.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (*k, v.clone())).collect(),
            c: self.c.iter().filter(|(k, _)| keep(k)).map(|(k, v)| (*k, v.clone())).collect(),
        }
    }

    /// Dense `C'_n`.
    pub fn cprime_matrix(&self) -> ConnMat {
        let mut m = ConnMat::zero(self.n, &self.curve);
        let a = self.alphabet();
        let idx = m.index_map();
        for (&p, c) in &self.c {
            for (w, col) in &idx {
                if p.0 + w.0 <= self.n {
                    let row = idx[&(p.0 + w.0, crate::wordalg::concat_rank(p.1, w.1, w.0, a))];
                    m.entries[row][*col] = c.clone();
                }
            }
        }
        m
    }

    pub fn verify(&self) -> Result<LogPoleReport> {
        let mut entries = Vec::new();
        for (&k, c) in &self.c {
            entries.push((k, self.curve.pole_order_form(c)?));
        }
        let pass = entries.iter().all(|(_, o)| *o <= 1);
        Ok(LogPoleReport { pass, entries })
    }

    pub fn to_json(&self) -> ExtensionJson {
        let a = self.alphabet();
        let item = |k: &Key, e: &FuncElem| ExtEntryJson {
            r: k.1,
            i: self.n - k.0,
            word: crate::wordalg::word_string(k.0, k.1, a).iter().map(|l| format!("A{l}")).collect::<Vec<_>>().join(""),
            elem: e.to_json(),
        };
        ExtensionJson {
            level: self.n,
            h: self.h.iter().map(|(k, e)| item(k, e)).collect(),
            c: self.c.iter().map(|(k, w)| item(k, &w.u)).collect(),
        }
    }

    pub fn from_json(j: &ExtensionJson, curve: Arc<CurveModel>) -> Result<Self> {
        let f = curve.f_arc().clone();
        let a = 2 * curve.genus() as u32;
        let key = |e: &ExtEntryJson| -> Result<Key> {
            let l = j.level.checked_sub(e.i).ok_or_else(|| Error::InvalidInput("i > level".into()))?;
            crate::wordalg::WordIndex::new(l, e.r, a)?;
            Ok((l, e.r))
        };
        let mut out = LogExtension::level0(curve);
        out.n = j.level;
        for e in &j.h {
            out.h.insert(key(e)?, FuncElem::from_json(&e.elem, f.clone())?);
        }
        for e in &j.c {
            out.c.insert(key(e)?, OneForm::new(FuncElem::from_json(&e.elem, f.clone())?));
        }
        Ok(out)
    }
}

/// Serialized extension entry: `h^{r,i}_n` (or `c`) with its word.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtEntryJson {
    pub r: u64,
    pub i: u32,
    pub word: String,
    pub elem: FuncElemJson,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionJson {
    pub level: u32,
    pub h: Vec<ExtEntryJson>,
    pub c: Vec<ExtEntryJson>,
}

impl<'a> Gauge<'a> {
    /// Dense gauge matrix over the basis of [`ConnMat`].
    pub fn matrix(&self, curve: &CurveModel) -> Vec<Vec<FuncElem>> {
        let basis = basis_keys(self.n, self.g);
        let a = 2 * self.g as u32;
        let idx: BTreeMap<Key, usize> = basis.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let mut m = vec![vec![curve.zero(); basis.len()]; basis.len()];
        for (col, w) in basis.iter().enumerate() {
            m[col][col] = curve.one();
            for (&p, hp) in self.h.iter() {
                if p.0 + w.0 <= self.n {
                    m[idx[&(p.0 + w.0, crate::wordalg::concat_rank(p.1, w.1, w.0, a))]][col] = hp.clone();
                }
            }
        }
        m
    }
}

/// `G_n(w) = w + sum_s sum_t h_s^{t,l} w_s^{k + (t-1)(2g)^l}`.
pub fn gauge_apply_word(gauge: &Gauge, w: Key, curve: &CurveModel) -> Result<TensorElem<FuncElem>> {
    let a = 2 * gauge.g as u32;
    crate::wordalg::WordIndex::new(w.0, w.1, a)?;
    if w.0 > gauge.n {
        return Err(Error::OutOfRange(format!("word length {} > level {}", w.0, gauge.n)));
    }
    let one = curve.one();
    let mut t = TensorElem::zero(gauge.g, gauge.n, one.clone());
    t.add_term(w, one.clone());
    for (&p, hp) in gauge.h.iter() {
        if p.0 + w.0 <= gauge.n {
            t.add_term((p.0 + w.0, crate::wordalg::concat_rank(p.1, w.1, w.0, a)), hp.clone());
        }
    }
    Ok(t)
}

/// Basis of `R_n`: length descending, rank ascending.
pub fn basis_keys(n: u32, g: usize) -> Vec<Key> {
    let a = 2 * g as u32;
    (0..=n).rev().flat_map(|l| words_of_len(l, a)).collect()
}

/// Dense connection matrix over the basis [`basis_keys`].
#[derive(Clone, Debug, PartialEq)]
pub struct ConnMat {
    pub n: u32,
    pub g: usize,
    pub basis: Vec<Key>,
    pub entries: Vec<Vec<OneForm>>,
}

impl ConnMat {
    pub fn zero(n: u32, curve: &CurveModel) -> Self {
        let basis = basis_keys(n, curve.genus());
        let d = basis.len();
        ConnMat { n, g: curve.genus(), basis, entries: vec![vec![curve.zero_form(); d]; d] }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_map(&self) -> BTreeMap<Key, usize> {
        self.basis.iter().enumerate().map(|(i, k)| (*k, i)).collect()
    }

    /// Block `rows x cols` for words of the given lengths.
    pub fn block(&self, row_len: u32, col_len: u32) -> Vec<Vec<OneForm>> {
        let rows: Vec<usize> = (0..self.dim()).filter(|&i| self.basis[i].0 == row_len).collect();
        let cols: Vec<usize> = (0..self.dim()).filter(|&i| self.basis[i].0 == col_len).collect();
        rows.iter().map(|&r| cols.iter().map(|&c| self.entries[r][c].clone()).collect()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|e| e.is_zero()))
    }
}

/// `C_n`: the column of `w` holds `-alpha_i` in the row of `A_i w`.
pub fn universal_conn_matrix(n: u32, curve: &CurveModel) -> ConnMat {
    let mut m = ConnMat::zero(n, curve);
    let a = 2 * curve.genus() as u32;
    let idx = m.index_map();
    for (col, w) in m.basis.clone().iter().enumerate() {
        if w.0 < n {
            for i in 0..a as u64 {
                let row = idx[&(w.0 + 1, concat_rank_letter(i, w, a))];
                m.entries[row][col] = -curve.alpha(i as usize);
            }
        }
    }
    m
}

fn concat_rank_letter(i: u64, w: &Key, a: u32) -> u64 {
    (a as u64).pow(w.0) * i + w.1
}

/// `G^{-1} dG + G^{-1} C G` by back substitution on the unitriangular `G`.
pub fn gauge_of_connection(c: &ConnMat, gauge: &Gauge, curve: &CurveModel) -> Result<ConnMat> {
    if c.n != gauge.n || c.g != gauge.g {
        return Err(Error::DimensionMismatch);
    }
    let gm = gauge.matrix(curve);
    let d = c.dim();
    let mut rhs = vec![vec![curve.zero_form(); d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = gm[i][j].d();
            for (k, ck) in c.entries[i].iter().enumerate() {
                if !ck.is_zero() && !gm[k][j].is_zero() {
                    acc = &acc + &ck.mul_fe(&gm[k][j]);
                }
            }
            rhs[i][j] = acc;
        }
    }
    let mut x = vec![vec![curve.zero_form(); d]; d];
    for i in (0..d).rev() {
        for j in 0..d {
            let mut acc = rhs[i][j].clone();
            for k in (i + 1)..d {
                if !gm[i][k].is_zero() && !x[k][j].is_zero() {
                    acc = &acc - &x[k][j].mul_fe(&gm[i][k]);
                }
            }
            x[i][j] = acc;
        }
    }
    Ok(ConnMat { n: c.n, g: c.g, basis: c.basis.clone(), entries: x })
}

/// Pole orders at infinity, measured against `dpi`, of the nonzero entries.
#[derive(Clone, Debug, PartialEq)]
pub struct LogPoleReport {
    pub pass: bool,
    pub entries: Vec<(Key, i64)>,
}

/// PASS iff every entry has at worst a logarithmic pole at infinity.
pub fn verify_log_poles(c: &ConnMat, curve: &CurveModel) -> Result<LogPoleReport> {
    let mut entries = Vec::new();
    for (i, row) in c.entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            if !e.is_zero() {
                entries.push(((i as u32, j as u64), curve.pole_order_form(e)?));
            }
        }
    }
    let pass = entries.iter().all(|(_, o)| *o <= 1);
    Ok(LogPoleReport { pass, entries })
}

/// Constant `k` with `k dF - target` logarithmic at infinity, if one exists.
pub fn log_pole_constant(target: &OneForm, curve: &CurveModel) -> Result<Option<Rational>> {
    let (h, c) = solve_h(target, curve)?;
    if !curve.log_at_infinity(&c)? {
        return Ok(None);
    }
    if h.is_zero() {
        return Ok(Some(Rational::from_integer(0.into())));
    }
    let f = curve.big_f();
    let k = h.div(f)?.as_constant();
    Ok(k)
}
