//! Bracket words and Lie expressions over the tensor algebra.

use std::fmt;

use super::ring::Coeff;
use super::tensor::TensorElem;
use crate::error::{Error, Result};
use crate::exactalg::rational::Rational;

/// A bracket word: a letter `A_i` or a commutator of two bracket words.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LieWord {
    Letter(u8),
    Bracket(Box<LieWord>, Box<LieWord>),
}

impl LieWord {
    pub fn letter(i: u8) -> Self {
        LieWord::Letter(i)
    }

    pub fn br(a: LieWord, b: LieWord) -> Self {
        LieWord::Bracket(Box::new(a), Box::new(b))
    }

    /// Left-normed bracket `[[..[a_1, a_2], ..], a_k]`.
    pub fn left_normed(letters: &[u8]) -> Self {
        let mut it = letters.iter();
        let mut w = LieWord::Letter(*it.next().expect("nonempty word"));
        for &l in it {
            w = LieWord::br(w, LieWord::Letter(l));
        }
        w
    }

    pub fn degree(&self) -> usize {
        match self {
            LieWord::Letter(_) => 1,
            LieWord::Bracket(a, b) => a.degree() + b.degree(),
        }
    }

    pub fn max_letter(&self) -> u8 {
        match self {
            LieWord::Letter(i) => *i,
            LieWord::Bracket(a, b) => a.max_letter().max(b.max_letter()),
        }
    }

    /// Parses `A0`, `[A0,A1]`, `[[A0,A1],A1]`.
    pub fn parse(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let w = parse_rec(&chars, &mut pos)?;
        if pos != chars.len() {
            return Err(Error::InvalidInput(format!("trailing input in bracket word {s:?}")));
        }
        Ok(w)
    }

    /// Expansion as a tensor element with coefficient `one`.
    pub fn expand<R: Coeff>(&self, g: usize, n: u32, one: &R) -> Result<TensorElem<R>> {
        match self {
            LieWord::Letter(i) => {
                if *i as usize >= 2 * g {
                    return Err(Error::BadLetter(*i as usize));
                }
                Ok(TensorElem::letter(g, n, *i, one.clone()))
            }
            LieWord::Bracket(a, b) => a.expand(g, n, one)?.bracket(&b.expand(g, n, one)?),
        }
    }

    /// Canonical representative up to sign under `[a,b] = -[b,a]`; `None` when the word is `[a,a]`.
    pub fn canonical(&self) -> Option<(LieWord, i32)> {
        match self {
            LieWord::Letter(_) => Some((self.clone(), 1)),
            LieWord::Bracket(a, b) => {
                let (ca, sa) = a.canonical()?;
                let (cb, sb) = b.canonical()?;
                match ca.cmp(&cb) {
                    std::cmp::Ordering::Equal => None,
                    std::cmp::Ordering::Less => Some((LieWord::br(ca, cb), sa * sb)),
                    std::cmp::Ordering::Greater => Some((LieWord::br(cb, ca), -sa * sb)),
                }
            }
        }
    }
}

fn parse_rec(c: &[char], pos: &mut usize) -> Result<LieWord> {
    let bad = || Error::InvalidInput("malformed bracket word".into());
    match c.get(*pos) {
        Some('[') => {
            *pos += 1;
            let a = parse_rec(c, pos)?;
            if c.get(*pos) != Some(&',') {
                return Err(bad());
            }
            *pos += 1;
            let b = parse_rec(c, pos)?;
            if c.get(*pos) != Some(&']') {
                return Err(bad());
            }
            *pos += 1;
            Ok(LieWord::br(a, b))
        }
        Some('A') => {
            *pos += 1;
            let start = *pos;
            while c.get(*pos).is_some_and(|d| d.is_ascii_digit()) {
                *pos += 1;
            }
            let s: String = c[start..*pos].iter().collect();
            s.parse::<u8>().map(LieWord::Letter).map_err(|_| bad())
        }
        _ => Err(bad()),
    }
}

impl fmt::Display for LieWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LieWord::Letter(i) => write!(f, "A{i}"),
            LieWord::Bracket(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// Linear combination of bracket words.
#[derive(Clone, Debug, PartialEq)]
pub struct LieExpr<R: Coeff> {
    pub terms: Vec<(LieWord, R)>,
}

impl<R: Coeff> LieExpr<R> {
    pub fn new() -> Self {
        LieExpr { terms: Vec::new() }
    }

    pub fn push(&mut self, w: LieWord, c: R) {
        if !c.is_zero() {
            self.terms.push((w, c));
        }
    }

    /// Full expansion in the tensor algebra.
    pub fn lie_expand(&self, g: usize, n: u32, one: &R) -> Result<TensorElem<R>> {
        let mut acc = TensorElem::zero(g, n, one.clone());
        for (w, c) in &self.terms {
            acc = acc.add(&w.expand(g, n, one)?.scale(c))?;
        }
        Ok(acc)
    }

    /// Merges terms on antisymmetry-equivalent bracket words and drops zeros.
    pub fn canonicalize(&self) -> Self {
        let mut out: Vec<(LieWord, R)> = Vec::new();
        for (w, c) in &self.terms {
            let Some((cw, s)) = w.canonical() else { continue };
            let c = if s < 0 { c.neg() } else { c.clone() };
            match out.iter_mut().find(|(x, _)| *x == cw) {
                Some((_, v)) => *v = v.add(&c),
                None => out.push((cw, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        out.sort_by(|a, b| (a.0.degree(), &a.0).cmp(&(b.0.degree(), &b.0)));
        LieExpr { terms: out }
    }

    /// Equality as elements of the tensor algebra.
    pub fn equals(&self, o: &Self, g: usize, n: u32, one: &R) -> Result<bool> {
        Ok(self.lie_expand(g, n, one)? == o.lie_expand(g, n, one)?)
    }
}

impl<R: Coeff> Default for LieExpr<R> {
    fn default() -> Self {
        Self::new()
    }
}

/// Dynkin map: a primitive element `sum c_w w` equals `sum (c_w/|w|) [w]` with `[w]` left-normed.
pub fn to_lie_expr<R: Coeff>(t: &TensorElem<R>) -> Result<LieExpr<R>> {
    if !t.constant_term().is_zero() || !t.is_primitive() {
        return Err(Error::NonPrimitiveLift("element is not primitive".into()));
    }
    let mut e = LieExpr::new();
    for (w, c) in t.words() {
        let k = w.len() as i64;
        e.push(LieWord::left_normed(&w), c.scale_q(&Rational::new(1.into(), k.into())));
    }
    Ok(e.canonicalize())
}
