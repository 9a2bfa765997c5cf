//! Graded-lex word indexing and the auxiliary index functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The `rank`-th word of length `len` over an alphabet of `alphabet` letters.
///
/// Rank is `1 + sum_j letter_j * alphabet^(len-1-j)`: the first letter is most significant,
/// so `A_i * w^k_l = w^(alphabet^l * i + k)_(l+1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WordIndex {
    pub len: u32,
    pub rank: u64,
    pub alphabet: u32,
}

impl WordIndex {
    pub fn new(len: u32, rank: u64, alphabet: u32) -> Result<Self> {
        if alphabet < 2 || rank < 1 || rank > (alphabet as u64).pow(len) {
            return Err(Error::OutOfRange(format!("w^{rank}_{len} over {alphabet} letters")));
        }
        Ok(WordIndex { len, rank, alphabet })
    }

    pub fn empty(alphabet: u32) -> Self {
        WordIndex { len: 0, rank: 1, alphabet }
    }

    pub fn letters(&self) -> Vec<u8> {
        word_string(self.len, self.rank, self.alphabet)
    }

    pub fn from_letters(letters: &[u8], alphabet: u32) -> Result<Self> {
        let (len, rank) = word_of_string(letters, alphabet)?;
        Ok(WordIndex { len, rank, alphabet })
    }
}

/// Letters of `w^rank_len`, first letter first.
pub fn word_string(len: u32, rank: u64, alphabet: u32) -> Vec<u8> {
    let k = alphabet as u64;
    let mut v = rank - 1;
    let mut out = vec![0u8; len as usize];
    for slot in out.iter_mut().rev() {
        *slot = (v % k) as u8;
        v /= k;
    }
    out
}

/// `(len, rank)` of a letter string.
pub fn word_of_string(letters: &[u8], alphabet: u32) -> Result<(u32, u64)> {
    let mut v = 0u64;
    for &l in letters {
        if l as u32 >= alphabet {
            return Err(Error::BadLetter(l as usize));
        }
        v = v * alphabet as u64 + l as u64;
    }
    Ok((letters.len() as u32, v + 1))
}

/// Rank of letters without validation.
pub fn rank_of(letters: &[u8], alphabet: u32) -> u64 {
    letters.iter().fold(0u64, |v, &l| v * alphabet as u64 + l as u64) + 1
}

/// Rank of the concatenation `u v` where `v` has length `vlen`.
pub fn concat_rank(urank: u64, vrank: u64, vlen: u32, alphabet: u32) -> u64 {
    (urank - 1) * (alphabet as u64).pow(vlen) + vrank
}

fn checked_pow(k: u64, e: u32) -> Result<u64> {
    k.checked_pow(e).ok_or_else(|| Error::OutOfRange(format!("{k}^{e} overflows")))
}

/// `floor(k^(i-j) r) + 1` if `k^(j-i)` does not divide `r`, else `floor(k^(i-j) r)`.
pub fn psi(r: u64, i: u32, j: u32, k: u64) -> Result<u64> {
    if k < 2 || i > j || r < 1 {
        return Err(Error::OutOfRange(format!("psi({r},{i},{j},{k})")));
    }
    let m = checked_pow(k, j - i)?;
    Ok(if r % m != 0 { r / m + 1 } else { r / m })
}

/// `(r-1) k^i - (psi(r,i,j,k) - 1) k^j`.
pub fn phi(r: u64, i: u32, j: u32, k: u64) -> Result<u64> {
    let p = psi(r, i, j, k)?;
    let a = (r - 1) * checked_pow(k, i)?;
    let b = (p - 1) * checked_pow(k, j)?;
    a.checked_sub(b).ok_or_else(|| Error::OutOfRange(format!("phi({r},{i},{j},{k})")))
}

/// 1 iff `i = j + (psi(i,0,p,q) - 1) q^p`, i.e. word `i` ends with the length-`p` word `j`.
pub fn tau(i: u64, j: u64, p: u32, q: u64) -> Result<u8> {
    if j < 1 {
        return Err(Error::OutOfRange(format!("tau({i},{j},{p},{q})")));
    }
    let s = psi(i, 0, p, q)?;
    Ok(u8::from(i == j + (s - 1) * checked_pow(q, p)?))
}
