//! Finite words over a two-letter alphabet.
//!
//! Letters are stored as `0`/`1` bytes. The same type carries block words over
//! `{S, L}`, where `S` is stored as `0` and `L` as `1`; the [`Alphabet`] tag
//! only changes how a word prints and which operations may be combined.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Alphabet {
    /// Letters `0` and `1`.
    Binary,
    /// Block marks `S` and `L`.
    Blocks,
}

impl Alphabet {
    fn symbol(self, letter: u8) -> char {
        match (self, letter) {
            (Alphabet::Binary, 0) => '0',
            (Alphabet::Binary, _) => '1',
            (Alphabet::Blocks, 0) => 'S',
            (Alphabet::Blocks, _) => 'L',
        }
    }
}

/// A block of an infinite product of the words `S` and `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    S,
    L,
}

impl Block {
    pub fn flip(self) -> Block {
        match self {
            Block::S => Block::L,
            Block::L => Block::S,
        }
    }

    pub fn as_letter(self) -> u8 {
        match self {
            Block::S => 0,
            Block::L => 1,
        }
    }

    pub fn from_letter(letter: u8) -> Block {
        if letter == 0 {
            Block::S
        } else {
            Block::L
        }
    }

    pub fn from_char(c: char) -> Result<Block> {
        match c {
            'S' | 's' => Ok(Block::S),
            'L' | 'l' => Ok(Block::L),
            other => Err(Error::InvalidLetter(other)),
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::S => "S",
            Block::L => "L",
        })
    }
}

/// An immutable finite word. Indexing is 0-based.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<u8>,
    alphabet: Alphabet,
}

impl Word {
    pub fn binary(letters: Vec<u8>) -> Word {
        debug_assert!(letters.iter().all(|&x| x <= 1));
        Word {
            letters,
            alphabet: Alphabet::Binary,
        }
    }

    pub fn blocks(blocks: &[Block]) -> Word {
        Word {
            letters: blocks.iter().map(|b| b.as_letter()).collect(),
            alphabet: Alphabet::Blocks,
        }
    }

    pub fn empty(alphabet: Alphabet) -> Word {
        Word {
            letters: Vec::new(),
            alphabet,
        }
    }

    pub fn with_alphabet(letters: Vec<u8>, alphabet: Alphabet) -> Word {
        Word { letters, alphabet }
    }

    /// Parses `0`/`1` strings as binary words and `S`/`L` strings as block words.
    pub fn parse(text: &str) -> Result<Word> {
        let text = text.trim();
        let mut letters = Vec::with_capacity(text.len());
        let mut alphabet = None;
        for c in text.chars() {
            let (letter, kind) = match c {
                '0' => (0, Alphabet::Binary),
                '1' => (1, Alphabet::Binary),
                'S' => (0, Alphabet::Blocks),
                'L' => (1, Alphabet::Blocks),
                '.' | '·' | ' ' | '_' => continue,
                other => return Err(Error::InvalidLetter(other)),
            };
            match alphabet {
                None => alphabet = Some(kind),
                Some(a) if a != kind => return Err(Error::AlphabetMismatch),
                _ => {}
            }
            letters.push(letter);
        }
        Ok(Word {
            letters,
            alphabet: alphabet.unwrap_or(Alphabet::Binary),
        })
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<u8> {
        self.letters
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn at(&self, k: usize) -> u8 {
        self.letters[k]
    }

    pub fn to_blocks(&self) -> Vec<Block> {
        self.letters.iter().map(|&x| Block::from_letter(x)).collect()
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word::with_alphabet(self.letters[..n.min(self.len())].to_vec(), self.alphabet)
    }

    pub fn suffix(&self, n: usize) -> Word {
        let n = n.min(self.len());
        Word::with_alphabet(self.letters[self.len() - n..].to_vec(), self.alphabet)
    }

    pub fn concat(&self, other: &Word) -> Result<Word> {
        self.same_alphabet(other)?;
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Word::with_alphabet(letters, self.alphabet))
    }

    pub fn power(&self, n: usize) -> Word {
        Word::with_alphabet(self.letters.repeat(n), self.alphabet)
    }

    pub fn reversed(&self) -> Word {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word::with_alphabet(letters, self.alphabet)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.letters.starts_with(&self.letters)
    }

    pub fn is_suffix_of(&self, other: &Word) -> bool {
        other.letters.ends_with(&self.letters)
    }

    fn same_alphabet(&self, other: &Word) -> Result<()> {
        if self.alphabet == other.alphabet || self.is_empty() || other.is_empty() {
            Ok(())
        } else {
            Err(Error::AlphabetMismatch)
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.letters.iter().map(|&x| self.alphabet.symbol(x)).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Word> {
        Word::parse(s)
    }
}

impl Serialize for Word {
    fn serialize<Se: serde::Serializer>(&self, serializer: Se) -> std::result::Result<Se::Ok, Se::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Word, D::Error> {
        let s = String::deserialize(deserializer)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// C(w): moves the first letter to the end.
pub fn cyclic_shift(w: &Word) -> Result<Word> {
    rotate(w, 1)
}

/// C^k(w).
pub fn rotate(w: &Word, k: usize) -> Result<Word> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let mut letters = w.letters.clone();
    letters.rotate_left(k % w.len());
    Ok(Word::with_alphabet(letters, w.alphabet))
}

/// All rotations `[w, C(w), ..., C^{|w|-1}(w)]`, repeats included.
pub fn conjugates(w: &Word) -> Result<Vec<Word>> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    (0..w.len()).map(|k| rotate(w, k)).collect()
}

/// Whether `v` is a rotation of `u`.
pub fn is_conjugate(u: &Word, v: &Word) -> bool {
    conjugacy_offset(u.letters(), v.letters()).is_some()
}

/// The smallest `k` with `C^k(u) = v`.
pub fn conjugacy_offset(u: &[u8], v: &[u8]) -> Option<usize> {
    if u.len() != v.len() {
        return None;
    }
    if u.is_empty() {
        return Some(0);
    }
    let doubled = [u, u].concat();
    memchr::memmem::find(&doubled[..2 * u.len() - 1], v)
}

/// A word is primitive when it occurs in `ww` only at positions `0` and `|w|`.
pub fn is_primitive(w: &Word) -> Result<bool> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    let n = w.len();
    let doubled = [w.letters(), w.letters()].concat();
    Ok(memchr::memmem::find(&doubled[1..], w.letters()) == Some(n - 1))
}

/// Strict lexicographic order with `0 < 1`; a proper prefix is smaller.
pub fn lex_less(u: &Word, v: &Word) -> Result<bool> {
    u.same_alphabet(v)?;
    Ok(u.letters < v.letters)
}

/// L(w): exchanges the first two letters.
pub fn swap_first_two(w: &Word) -> Result<Word> {
    if w.len() < 2 {
        return Err(Error::TooShort { need: 2, got: w.len() });
    }
    let mut letters = w.letters.clone();
    letters.swap(0, 1);
    Ok(Word::with_alphabet(letters, w.alphabet))
}

/// w·v⁻¹: removes the suffix `v` from `w`.
pub fn drop_suffix(w: &Word, v: &Word) -> Result<Word> {
    w.same_alphabet(v)?;
    if !v.is_suffix_of(w) {
        return Err(Error::NotSuffix);
    }
    Ok(w.prefix(w.len() - v.len()))
}

/// Smallest `p >= 1` with `w[i] = w[i + p]` for every valid `i`.
pub fn minimal_period(w: &Word) -> Result<usize> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(minimal_period_of(w.letters()))
}

/// Minimal period of a nonempty slice via the KMP failure function.
pub fn minimal_period_of(s: &[u8]) -> usize {
    let n = s.len();
    let mut fail = vec![0usize; n];
    let mut k = 0;
    for i in 1..n {
        while k > 0 && s[i] != s[k] {
            k = fail[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        fail[i] = k;
    }
    n - fail[n - 1]
}

/// Whether `s` has period `p`.
pub fn has_period(s: &[u8], p: usize) -> bool {
    p > 0 && s.iter().zip(s.iter().skip(p)).all(|(a, b)| a == b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn cyclic_shift_examples() {
        assert_eq!(cyclic_shift(&w("01010010")).unwrap(), w("10100100"));
        assert_eq!(cyclic_shift(&w("0")).unwrap(), w("0"));
        assert_eq!(cyclic_shift(&w("10010")).unwrap(), w("00101"));
        assert_eq!(cyclic_shift(&Word::empty(Alphabet::Binary)), Err(Error::EmptyWord));
    }

    #[test]
    fn conjugates_examples() {
        assert_eq!(conjugates(&w("01")).unwrap(), vec![w("01"), w("10")]);
        assert_eq!(conjugates(&w("00")).unwrap(), vec![w("00"), w("00")]);
        let all = conjugates(&w("1001001010010")).unwrap();
        assert_eq!(all.len(), 13);
        assert!(all.contains(&w("0101001010010")));
    }

    #[test]
    fn primitivity_examples() {
        assert!(!is_primitive(&w("0101")).unwrap());
        assert!(is_primitive(&w("01010010")).unwrap());
        assert!(is_primitive(&w("0")).unwrap());
        assert!(!is_primitive(&w("000")).unwrap());
    }

    #[test]
    fn lex_examples() {
        assert!(lex_less(&w("001"), &w("010")).unwrap());
        assert!(!lex_less(&w("01"), &w("01")).unwrap());
        assert!(lex_less(&w("01"), &w("0100")).unwrap());
        assert!(!lex_less(&w("0100"), &w("01")).unwrap());
        assert_eq!(lex_less(&w("01"), &w("SL")), Err(Error::AlphabetMismatch));
    }

    #[test]
    fn swap_examples() {
        assert_eq!(swap_first_two(&w("01010010")).unwrap(), w("10010010"));
        assert_eq!(swap_first_two(&w("1001001010010")).unwrap(), w("0101001010010"));
        assert!(swap_first_two(&w("1")).is_err());
    }

    #[test]
    fn drop_suffix_examples() {
        assert_eq!(drop_suffix(&w("01001"), &w("01")).unwrap(), w("010"));
        let x = w("0110");
        assert_eq!(drop_suffix(&x, &Word::empty(Alphabet::Binary)).unwrap(), x);
        assert!(drop_suffix(&x, &x).unwrap().is_empty());
        assert_eq!(drop_suffix(&x, &w("11")), Err(Error::NotSuffix));
    }

    #[test]
    fn period_examples() {
        assert_eq!(minimal_period(&w("01010")).unwrap(), 2);
        assert_eq!(minimal_period(&w("010100100101001001010010")).unwrap(), 8);
        assert_eq!(minimal_period(&w("0")).unwrap(), 1);
    }

    #[test]
    fn block_words_print_as_marks() {
        let x = w("SLLS");
        assert_eq!(x.alphabet(), Alphabet::Blocks);
        assert_eq!(x.to_string(), "SLLS");
        assert_eq!(x.to_blocks(), vec![Block::S, Block::L, Block::L, Block::S]);
        assert_eq!(Word::parse("0S"), Err(Error::AlphabetMismatch));
    }

    #[test]
    fn conjugacy_offset_finds_rotation() {
        let s = w("01010010");
        let l = w("10010010");
        assert_eq!(conjugacy_offset(s.letters(), l.letters()), Some(3));
        assert!(is_conjugate(&s, &l));
        assert!(!is_conjugate(&s, &w("11010010")));
    }
}
