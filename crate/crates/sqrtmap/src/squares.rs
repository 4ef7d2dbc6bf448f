//! The six minimal squares and the minimal-square tokenizer.
//!
//! No square `S_i²` is a prefix of another, so the greedy left-to-right
//! factorization is the only one and never needs to backtrack.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::Word;

/// The roots `S1..S6` for parameters `(a, b)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SquareAlphabet {
    a: usize,
    b: usize,
    roots: [Vec<u8>; 6],
    /// Root indices whose square starts with the letter, sorted by square length.
    by_first: [Vec<usize>; 2],
}

/// Result of looking for a minimal square at the start of a finite window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SquareMatch {
    /// Root index `0..6` of the square found.
    Found(usize),
    /// The window ends before a candidate square could be confirmed or ruled out.
    NeedMore,
    /// No minimal square starts here.
    None,
}

/// Where and why tokenization stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TokenizeFailure {
    pub position: usize,
    /// True when the leftover tail is a proper prefix of some square.
    pub incomplete: bool,
}

impl fmt::Display for TokenizeFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.incomplete {
            write!(f, "unfinished square at position {}", self.position)
        } else {
            write!(f, "no minimal square at position {}", self.position)
        }
    }
}

fn zeros(n: usize) -> Vec<u8> {
    vec![0; n]
}

fn is_square(x: &[u8]) -> bool {
    x.len().is_multiple_of(2) && x[..x.len() / 2] == x[x.len() / 2..]
}

impl SquareAlphabet {
    pub fn new(a: usize, b: usize) -> Result<SquareAlphabet> {
        if a < 1 {
            return Err(Error::InvalidParams("parameter a must be >= 1".into()));
        }
        let ten_a: Vec<u8> = [vec![1], zeros(a)].concat();
        let s1 = vec![0];
        let s2 = [vec![0, 1], zeros(a - 1)].concat();
        let s3 = [vec![0, 1], zeros(a)].concat();
        let s4 = ten_a.clone();
        let s5 = [vec![1], zeros(a + 1), ten_a.repeat(b)].concat();
        let s6 = [vec![1], zeros(a + 1), ten_a.repeat(b + 1)].concat();
        let roots = [s1, s2, s3, s4, s5, s6];
        let mut by_first = [Vec::new(), Vec::new()];
        for (i, r) in roots.iter().enumerate() {
            by_first[r[0] as usize].push(i);
        }
        for list in &mut by_first {
            list.sort_by_key(|&i| roots[i].len());
        }
        let alph = SquareAlphabet { a, b, roots, by_first };
        alph.check_prefix_code()?;
        Ok(alph)
    }

    /// Fails if some square is a prefix of another or has a proper square prefix.
    fn check_prefix_code(&self) -> Result<()> {
        let squares: Vec<Vec<u8>> = (0..6).map(|i| self.square(i)).collect();
        for (i, x) in squares.iter().enumerate() {
            for (j, y) in squares.iter().enumerate() {
                if i != j && y.starts_with(x) {
                    return Err(Error::InvalidParams(format!(
                        "square of S{} is a prefix of the square of S{}",
                        i + 1,
                        j + 1
                    )));
                }
            }
            if (2..x.len()).step_by(2).any(|n| is_square(&x[..n])) {
                return Err(Error::InvalidParams(format!("square of S{} is not minimal", i + 1)));
            }
        }
        Ok(())
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// Root `S_{i+1}` as raw letters.
    pub fn root_letters(&self, i: usize) -> &[u8] {
        &self.roots[i]
    }

    pub fn root(&self, i: usize) -> Word {
        Word::binary(self.roots[i].clone())
    }

    pub fn square(&self, i: usize) -> Vec<u8> {
        self.roots[i].repeat(2)
    }

    /// |S6|, the longest root.
    pub fn longest_root(&self) -> usize {
        self.roots[5].len()
    }

    /// Inspects the start of `w`.
    pub fn match_prefix(&self, w: &[u8]) -> SquareMatch {
        let Some(&first) = w.first() else {
            return SquareMatch::NeedMore;
        };
        for &i in &self.by_first[first as usize] {
            let root = &self.roots[i];
            let n = root.len();
            if w.len() >= 2 * n {
                if &w[..n] == root.as_slice() && &w[n..2 * n] == root.as_slice() {
                    return SquareMatch::Found(i);
                }
            } else {
                let avail = w.len();
                let agrees = (0..avail).all(|t| w[t] == root[t % n]);
                if agrees {
                    return SquareMatch::NeedMore;
                }
            }
        }
        SquareMatch::None
    }

    /// The index of the unique root whose square is a prefix of `w`.
    pub fn minimal_square_prefix(&self, w: &[u8]) -> Option<usize> {
        self.by_first[*w.first()? as usize]
            .iter()
            .copied()
            .find(|&i| w.starts_with(&self.square(i)))
    }

    /// Greedy factorization of `w` into minimal squares, as root indices.
    pub fn factorize(&self, w: &[u8]) -> std::result::Result<Vec<usize>, TokenizeFailure> {
        let mut pos = 0;
        let mut out = Vec::new();
        while pos < w.len() {
            match self.match_prefix(&w[pos..]) {
                SquareMatch::Found(i) => {
                    out.push(i);
                    pos += 2 * self.roots[i].len();
                }
                SquareMatch::NeedMore => {
                    return Err(TokenizeFailure {
                        position: pos,
                        incomplete: true,
                    })
                }
                SquareMatch::None => {
                    return Err(TokenizeFailure {
                        position: pos,
                        incomplete: false,
                    })
                }
            }
        }
        Ok(out)
    }

    /// Membership in Π: nonempty and a product of minimal squares.
    pub fn in_pi(&self, w: &[u8]) -> bool {
        !w.is_empty() && self.factorize(w).is_ok()
    }

    /// √w for `w` in Π.
    pub fn sqrt_finite(&self, w: &[u8]) -> Result<Vec<u8>> {
        if w.is_empty() {
            return Err(Error::NotInPi { position: 0 });
        }
        let roots = self.factorize(w).map_err(|f| Error::NotInPi { position: f.position })?;
        Ok(self.concat_roots(&roots))
    }

    pub fn concat_roots(&self, roots: &[usize]) -> Vec<u8> {
        roots.iter().flat_map(|&i| self.roots[i].iter().copied()).collect()
    }

    /// The part of the square root that a finite prefix of a squareful word determines.
    ///
    /// Tokenizes until the window ends; returns the roots found and the number
    /// of letters they consume. Errors only if no square can start somewhere.
    pub fn sqrt_certain(&self, w: &[u8]) -> Result<(Vec<u8>, usize)> {
        let mut pos = 0;
        let mut out = Vec::with_capacity(w.len() / 2);
        loop {
            match self.match_prefix(&w[pos..]) {
                SquareMatch::Found(i) => {
                    out.extend_from_slice(&self.roots[i]);
                    pos += 2 * self.roots[i].len();
                }
                SquareMatch::NeedMore => return Ok((out, pos)),
                SquareMatch::None => return Err(Error::NotSquareful { position: pos }),
            }
        }
    }

    /// Dot-separated squares, e.g. `0101.00.1010`.
    pub fn render_factorization(&self, roots: &[usize]) -> String {
        roots
            .iter()
            .map(|&i| Word::binary(self.square(i)).to_string())
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// Names like `S2` for root indices.
pub fn root_name(i: usize) -> String {
    format!("S{}", i + 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<u8> {
        Word::parse(s).unwrap().into_letters()
    }

    fn roots_as_strings(alph: &SquareAlphabet) -> Vec<String> {
        (0..6).map(|i| alph.root(i).to_string()).collect()
    }

    #[test]
    fn alphabet_examples() {
        let x = SquareAlphabet::new(1, 0).unwrap();
        assert_eq!(roots_as_strings(&x), ["0", "01", "010", "10", "100", "10010"]);
        let y = SquareAlphabet::new(2, 0).unwrap();
        assert_eq!(&roots_as_strings(&y)[1..], ["010", "0100", "100", "1000", "1000100"]);
        let z = SquareAlphabet::new(1, 1).unwrap();
        assert_eq!(&roots_as_strings(&z)[4..], ["10010", "1001010"]);
        assert!(SquareAlphabet::new(0, 0).is_err());
    }

    #[test]
    fn prefix_code_holds_over_parameter_grid() {
        for a in 1..8 {
            for b in 0..8 {
                SquareAlphabet::new(a, b).unwrap();
            }
        }
    }

    #[test]
    fn minimal_square_prefix_examples() {
        let x = SquareAlphabet::new(1, 0).unwrap();
        assert_eq!(x.minimal_square_prefix(&bits("0101001010")), Some(1));
        assert_eq!(x.minimal_square_prefix(&bits("001001010010")), Some(0));
        assert_eq!(x.minimal_square_prefix(&bits("011")), None);
        assert_eq!(x.match_prefix(&bits("011")), SquareMatch::None);
        assert_eq!(x.match_prefix(&bits("010")), SquareMatch::NeedMore);
    }

    #[test]
    fn factorization_examples() {
        let x = SquareAlphabet::new(1, 0).unwrap();
        let sbar = bits("1001001010010");
        let both = [sbar.clone(), sbar.clone()].concat();
        let f = x.factorize(&both).unwrap();
        assert_eq!(f, vec![4, 3, 1, 0, 5]);
        assert_eq!(x.render_factorization(&f), "100100.1010.0101.00.1001010010");
        assert_eq!(x.factorize(&bits("0101001010")).unwrap(), vec![1, 0, 3]);
        assert!(x.factorize(&bits("010")).is_err());
    }

    #[test]
    fn membership_and_roots() {
        let x = SquareAlphabet::new(1, 0).unwrap();
        let sbar = bits("1001001010010");
        let lsbar = bits("0101001010010");
        let swapped = [sbar.clone(), lsbar].concat();
        assert!(x.in_pi(&swapped));
        assert_eq!(
            x.render_factorization(&x.factorize(&swapped).unwrap()),
            "100100.1010.010010.1001010010"
        );
        assert!(!x.in_pi(&bits("01010010")));
        assert!(!x.in_pi(&[]));
        assert_eq!(x.sqrt_finite(&bits("0101001010")).unwrap(), bits("01010"));
        assert_eq!(x.sqrt_finite(&[sbar.clone(), sbar.clone()].concat()).unwrap(), sbar);
        assert_eq!(x.sqrt_finite(&swapped).unwrap(), sbar);
    }

    #[test]
    fn certain_prefix_stops_at_window_end() {
        let x = SquareAlphabet::new(1, 0).unwrap();
        let (root, used) = x.sqrt_certain(&bits("0101001")).unwrap();
        assert_eq!((root, used), (bits("010"), 6));
        assert!(x.sqrt_certain(&bits("0110")).is_err());
    }
}
