//! Truncated tensor algebra on `A_0 .. A_{2g-1}` over a commutative coefficient ring.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::index::{concat_rank, rank_of, word_string};
use super::ring::Coeff;
use crate::error::{Error, Result};
use crate::exactalg::rational::{factorial, Rational};

/// Word key `(length, rank)`.
pub type Key = (u32, u64);

/// Element of `R_n`, the tensor algebra modulo words of length `> n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorElem<R: Coeff> {
    g: usize,
    n: u32,
    terms: BTreeMap<Key, R>,
    one: R,
}

/// Element of `R_n (x) R_n` truncated at total length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorSquare<R: Coeff> {
    pub terms: BTreeMap<(Key, Key), R>,
}

impl<R: Coeff> TensorSquare<R> {
    fn insert(&mut self, k: (Key, Key), c: R) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }
}

impl<R: Coeff> TensorElem<R> {
    /// The zero element; `one` fixes the coefficient ring instance.
    pub fn zero(g: usize, n: u32, one: R) -> Self {
        TensorElem { g, n, terms: BTreeMap::new(), one }
    }

    pub fn unit(g: usize, n: u32, one: R) -> Self {
        let mut t = Self::zero(g, n, one.clone());
        t.terms.insert((0, 1), one);
        t
    }

    /// The single letter `A_i`.
    pub fn letter(g: usize, n: u32, i: u8, one: R) -> Self {
        Self::word(g, n, &[i], one)
    }

    /// The word with the given letters, coefficient 1.
    pub fn word(g: usize, n: u32, letters: &[u8], one: R) -> Self {
        let mut t = Self::zero(g, n, one.clone());
        if letters.len() as u32 <= n {
            t.terms.insert((letters.len() as u32, rank_of(letters, 2 * g as u32)), one);
        }
        t
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn alphabet(&self) -> u32 {
        2 * self.g as u32
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn one_coeff(&self) -> &R {
        &self.one
    }

    pub fn terms(&self) -> &BTreeMap<Key, R> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, k: Key) -> R {
        self.terms.get(&k).cloned().unwrap_or_else(|| self.one.zero_like())
    }

    pub fn coeff_of(&self, letters: &[u8]) -> R {
        self.coeff((letters.len() as u32, rank_of(letters, self.alphabet())))
    }

    /// Adds `c` to the coefficient of key `k`, pruning zeros and words longer than `n`.
    pub fn add_term(&mut self, k: Key, c: R) {
        if k.0 > self.n || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn set_term(&mut self, k: Key, c: R) {
        self.terms.remove(&k);
        self.add_term(k, c);
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.g != o.g || self.n != o.n {
            return Err(Error::AlphabetMismatch);
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut t = self.clone();
        for (k, c) in &o.terms {
            t.add_term(*k, c.clone());
        }
        Ok(t)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|c| c.neg())
    }

    pub fn scale(&self, r: &R) -> Self {
        let mut t = Self::zero(self.g, self.n, self.one.clone());
        for (k, c) in &self.terms {
            t.add_term(*k, c.mul(r));
        }
        t
    }

    pub fn scale_q(&self, q: &Rational) -> Self {
        let mut t = Self::zero(self.g, self.n, self.one.clone());
        for (k, c) in &self.terms {
            t.add_term(*k, c.scale_q(q));
        }
        t
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        let mut t = Self::zero(self.g, self.n, self.one.clone());
        for (k, c) in &self.terms {
            t.add_term(*k, f(c));
        }
        t
    }

    /// Changes coefficient ring.
    pub fn map_ring<S: Coeff>(&self, one: S, f: impl Fn(&R) -> S) -> TensorElem<S> {
        let mut t = TensorElem::zero(self.g, self.n, one);
        for (k, c) in &self.terms {
            t.add_term(*k, f(c));
        }
        t
    }

    /// Same element viewed at truncation `n`.
    pub fn truncate(&self, n: u32) -> Self {
        let mut t = Self::zero(self.g, n, self.one.clone());
        for (k, c) in &self.terms {
            t.add_term(*k, c.clone());
        }
        t
    }

    /// Homogeneous part of length `l`.
    pub fn graded(&self, l: u32) -> Self {
        let mut t = Self::zero(self.g, self.n, self.one.clone());
        for (k, c) in self.terms.range((l, 0)..(l + 1, 0)) {
            t.add_term(*k, c.clone());
        }
        t
    }

    pub fn constant_term(&self) -> R {
        self.coeff((0, 1))
    }

    /// Concatenation product truncated at `n`.
    pub fn concat_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let a = self.alphabet();
        let mut t = Self::zero(self.g, self.n, self.one.clone());
        for (&(l1, r1), c1) in &self.terms {
            for (&(l2, r2), c2) in o.terms.range(..(self.n - l1 + 1, 0)) {
                t.add_term((l1 + l2, concat_rank(r1, r2, l2, a)), c1.mul(c2));
            }
        }
        Ok(t)
    }

    /// Shuffle product truncated at `n`.
    pub fn shuffle_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let a = self.alphabet();
        let mut t = Self::zero(self.g, self.n, self.one.clone());
        for (&(l1, r1), c1) in &self.terms {
            let u = word_string(l1, r1, a);
            for (&(l2, r2), c2) in o.terms.range(..(self.n - l1 + 1, 0)) {
                let v = word_string(l2, r2, a);
                let c = c1.mul(c2);
                for (w, m) in shuffle_words(&u, &v) {
                    t.add_term((w.len() as u32, rank_of(&w, a)), c.scale_q(&Rational::from_integer(m.into())));
                }
            }
        }
        Ok(t)
    }

    /// Deconcatenation-dual coproduct with letters primitive: sum over subsets of positions.
    pub fn coproduct(&self) -> TensorSquare<R> {
        let a = self.alphabet();
        let mut out = TensorSquare { terms: BTreeMap::new() };
        for (&(l, r), c) in &self.terms {
            let w = word_string(l, r, a);
            for mask in 0u32..(1u32 << l) {
                let (mut left, mut right) = (vec![], vec![]);
                for (i, &x) in w.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        left.push(x);
                    } else {
                        right.push(x);
                    }
                }
                let kl = (left.len() as u32, rank_of(&left, a));
                let kr = (right.len() as u32, rank_of(&right, a));
                out.insert((kl, kr), c.clone());
            }
        }
        out
    }

    /// `a (x) b` truncated at total length `n`.
    pub fn tensor(&self, o: &Self) -> TensorSquare<R> {
        let mut out = TensorSquare { terms: BTreeMap::new() };
        for (&k1, c1) in &self.terms {
            for (&k2, c2) in &o.terms {
                if k1.0 + k2.0 <= self.n {
                    out.insert((k1, k2), c1.mul(c2));
                }
            }
        }
        out
    }

    /// `Delta(a) = a (x) 1 + 1 (x) a`.
    pub fn is_primitive(&self) -> bool {
        let one = Self::unit(self.g, self.n, self.one.clone());
        let mut expect = self.tensor(&one);
        for (k, c) in one.tensor(self).terms {
            expect.insert(k, c);
        }
        self.coproduct() == expect
    }

    /// `Delta(a) = a (x) a` and constant term 1.
    pub fn is_grouplike(&self) -> bool {
        self.constant_term() == self.one && self.coproduct() == self.tensor(self)
    }

    /// `sum_k a^k / k!`; needs zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::BadConstantTerm("0 for exp"));
        }
        let mut acc = Self::unit(self.g, self.n, self.one.clone());
        let mut pow = acc.clone();
        for k in 1..=self.n as usize {
            pow = pow.concat_mul(self)?;
            if pow.is_zero() {
                break;
            }
            acc = acc.add(&pow.scale_q(&factorial(k).recip()))?;
        }
        Ok(acc)
    }

    /// `sum_k (-1)^(k+1) (a-1)^k / k`; needs constant term 1.
    pub fn log(&self) -> Result<Self> {
        if self.constant_term() != self.one {
            return Err(Error::BadConstantTerm("1 for log"));
        }
        let u = self.sub(&Self::unit(self.g, self.n, self.one.clone()))?;
        let mut acc = Self::zero(self.g, self.n, self.one.clone());
        let mut pow = Self::unit(self.g, self.n, self.one.clone());
        for k in 1..=self.n as i64 {
            pow = pow.concat_mul(&u)?;
            if pow.is_zero() {
                break;
            }
            let s = Rational::new(if k % 2 == 1 { 1.into() } else { (-1).into() }, k.into());
            acc = acc.add(&pow.scale_q(&s))?;
        }
        Ok(acc)
    }

    /// Eulerian idempotent `log*(id)`: projection onto primitives, fixing the constant term at 0.
    pub fn eulerian(&self) -> Self {
        let a = self.alphabet();
        let mut out = Self::zero(self.g, self.n, self.one.clone());
        for (&(l, r), c) in &self.terms {
            if l == 0 {
                continue;
            }
            let w = word_string(l, r, a);
            let mut acc: BTreeMap<Vec<u8>, Rational> = BTreeMap::new();
            ordered_partitions(&w, (1u32 << l) - 1, &mut Vec::new(), 0, &mut acc);
            for (v, q) in acc {
                if !q.is_zero() {
                    out.add_term((l, rank_of(&v, a)), c.scale_q(&q));
                }
            }
        }
        out
    }

    /// `[a, b] = ab - ba`.
    pub fn bracket(&self, o: &Self) -> Result<Self> {
        self.concat_mul(o)?.sub(&o.concat_mul(self)?)
    }

    /// Image of the ring map sending `A_i` to 0 for the listed letters.
    pub fn kill_letters(&self, killed: impl Fn(u8) -> bool) -> Self {
        let a = self.alphabet();
        let mut t = Self::zero(self.g, self.n, self.one.clone());
        for (&(l, r), c) in &self.terms {
            if !word_string(l, r, a).iter().any(|&x| killed(x)) {
                t.add_term((l, r), c.clone());
            }
        }
        t
    }

    /// Letter strings with coefficients, in key order.
    pub fn words(&self) -> Vec<(Vec<u8>, R)> {
        let a = self.alphabet();
        self.terms.iter().map(|(&(l, r), c)| (word_string(l, r, a), c.clone())).collect()
    }
}

/// All shuffles of `u` and `v` with multiplicities.
/// Adds `(-1)^(k+1)/k * w|S_1 ... w|S_k` over ordered set partitions of the positions in `rest`.
fn ordered_partitions(w: &[u8], rest: u32, prefix: &mut Vec<u8>, k: i64, acc: &mut BTreeMap<Vec<u8>, Rational>) {
    let mut s = rest;
    while s != 0 {
        let len = prefix.len();
        prefix.extend(w.iter().enumerate().filter(|(i, _)| s & (1 << i) != 0).map(|(_, &x)| x));
        if s == rest {
            let sign: i64 = if k % 2 == 0 { 1 } else { -1 };
            let e = acc.entry(prefix.clone()).or_insert_with(|| Rational::from_integer(0.into()));
            *e += Rational::new(sign.into(), (k + 1).into());
        } else {
            ordered_partitions(w, rest & !s, prefix, k + 1, acc);
        }
        prefix.truncate(len);
        s = (s - 1) & rest;
    }
}

pub fn shuffle_words(u: &[u8], v: &[u8]) -> Vec<(Vec<u8>, u64)> {
    let mut memo: HashMap<(usize, usize), Vec<(Vec<u8>, u64)>> = HashMap::new();
    let mut out: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
    for (w, m) in shuffle_rec(u, v, 0, 0, &mut memo) {
        *out.entry(w).or_default() += m;
    }
    out.into_iter().collect()
}

fn shuffle_rec(u: &[u8], v: &[u8], i: usize, j: usize, memo: &mut HashMap<(usize, usize), Vec<(Vec<u8>, u64)>>) -> Vec<(Vec<u8>, u64)> {
    if let Some(r) = memo.get(&(i, j)) {
        return r.clone();
    }
    let res = if i == u.len() {
        vec![(v[j..].to_vec(), 1)]
    } else if j == v.len() {
        vec![(u[i..].to_vec(), 1)]
    } else {
        let mut acc: BTreeMap<Vec<u8>, u64> = BTreeMap::new();
        for (w, m) in shuffle_rec(u, v, i + 1, j, memo) {
            let mut x = vec![u[i]];
            x.extend(w);
            *acc.entry(x).or_default() += m;
        }
        for (w, m) in shuffle_rec(u, v, i, j + 1, memo) {
            let mut x = vec![v[j]];
            x.extend(w);
            *acc.entry(x).or_default() += m;
        }
        acc.into_iter().collect()
    };
    memo.insert((i, j), res.clone());
    res
}

/// JSON term `{"len","rank","coeff"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermJson<C> {
    pub len: u32,
    pub rank: u64,
    pub coeff: C,
}

/// JSON form `{"n","g","terms"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TensorJson<C> {
    pub n: u32,
    pub g: usize,
    pub terms: Vec<TermJson<C>>,
}

impl<R: Coeff> TensorElem<R> {
    pub fn to_json<C>(&self, f: impl Fn(&R) -> C) -> TensorJson<C> {
        TensorJson {
            n: self.n,
            g: self.g,
            terms: self.terms.iter().map(|(&(len, rank), c)| TermJson { len, rank, coeff: f(c) }).collect(),
        }
    }

    pub fn from_json<C>(j: &TensorJson<C>, one: R, f: impl Fn(&C) -> Result<R>) -> Result<Self> {
        let mut t = Self::zero(j.g, j.n, one);
        for term in &j.terms {
            super::index::WordIndex::new(term.len, term.rank, 2 * j.g as u32)?;
            t.add_term((term.len, term.rank), f(&term.coeff)?);
        }
        Ok(t)
    }
}
