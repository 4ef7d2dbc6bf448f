//! Word arguments: literal 0/1 strings, S/L block strings with an optional
//! infinite tail, or named infinite words.

use clap::ValueEnum;

use sqrtmap::{Block, BlockSeq, InfiniteWord, Omega, SLProduct, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    /// A finite word over {0, 1}; `0x` introduces hexadecimal, four letters per digit.
    Literal,
    /// A word over {S, L}, optionally followed by `+TAIL` with TAIL a named word.
    Blocks,
    /// One of gamma1, gamma2, s-omega, l-omega.
    Named,
}

#[derive(Debug, Clone)]
pub enum Input {
    Finite(Word),
    Product(SLProduct),
}

const NAMES: [&str; 4] = ["gamma1", "gamma2", "s-omega", "l-omega"];

fn guess(text: &str) -> InputKind {
    if (!text.is_empty() && text.bytes().all(|c| c == b'0' || c == b'1')) || text.starts_with("0x") {
        InputKind::Literal
    } else if NAMES.contains(&text) {
        InputKind::Named
    } else {
        InputKind::Blocks
    }
}

fn named(omega: &Omega, name: &str) -> Result<BlockSeq, String> {
    match name {
        "gamma1" => Ok(omega.big_gamma_blocks(1)),
        "gamma2" => Ok(omega.big_gamma_blocks(2)),
        "s-omega" => Ok(BlockSeq::constant(Block::S)),
        "l-omega" => Ok(BlockSeq::constant(Block::L)),
        other => Err(format!(
            "unknown word name {other:?}; expected one of {}",
            NAMES.join(", ")
        )),
    }
}

fn parse_blocks(text: &str) -> Result<Vec<Block>, String> {
    text.chars()
        .map(|c| Block::from_char(c).map_err(|_| format!("{c:?} is not S or L")))
        .collect()
}

fn hex_letters(hex: &str) -> Result<Vec<u8>, String> {
    let mut out = Vec::with_capacity(4 * hex.len());
    for c in hex.chars() {
        let d = c
            .to_digit(16)
            .ok_or_else(|| format!("{c:?} is not a hexadecimal digit"))?;
        out.extend((0..4).rev().map(|i| ((d >> i) & 1) as u8));
    }
    if out.is_empty() {
        return Err("empty hexadecimal word".into());
    }
    Ok(out)
}

/// Parses a word argument. Block words without a tail repeat periodically.
pub fn parse(omega: &Omega, text: &str, kind: Option<InputKind>, shift: usize) -> Result<Input, String> {
    match kind.unwrap_or_else(|| guess(text)) {
        InputKind::Literal => {
            let word = match text.strip_prefix("0x") {
                Some(hex) => Word::binary(hex_letters(hex)?),
                None => Word::parse(text).map_err(|e| e.to_string())?,
            };
            if word.letters().iter().any(|&x| x > 1) {
                return Err(format!("{text:?} is not a word over {{0, 1}}"));
            }
            if shift > word.len() {
                return Err(format!("shift {shift} exceeds the word length {}", word.len()));
            }
            Ok(Input::Finite(Word::binary(word.letters()[shift..].to_vec())))
        }
        InputKind::Named => Ok(Input::Product(SLProduct::new(named(omega, text)?, shift))),
        InputKind::Blocks => {
            let (head, tail) = match text.split_once('+') {
                Some((h, t)) => (h, Some(t)),
                None => (text, None),
            };
            let head = parse_blocks(head)?;
            let seq = match tail {
                Some(t) => BlockSeq::prefixed(head, named(omega, t)?),
                None if head.is_empty() => return Err("empty block word".into()),
                None => BlockSeq::periodic(head),
            };
            Ok(Input::Product(SLProduct::new(seq, shift)))
        }
    }
}

impl Input {
    /// The letters of a finite input, or of `σ(blocks)` for a block word without tail.
    pub fn finite_letters(&self, omega: &Omega, text: &str) -> Result<Word, String> {
        match self {
            Input::Finite(w) => Ok(w.clone()),
            Input::Product(p) => {
                let head = text.split('+').next().unwrap_or_default();
                if text.contains('+') || NAMES.contains(&text) {
                    return Err(format!("{text:?} is infinite; give a finite word"));
                }
                let blocks = parse_blocks(head)?;
                let letters = omega.sigma(&blocks).into_letters();
                let shift = p.shift.min(letters.len());
                Ok(Word::binary(letters[shift..].to_vec()))
            }
        }
    }

    pub fn source(&self, omega: &Omega) -> Result<InfiniteWord, String> {
        match self {
            Input::Finite(w) => InfiniteWord::periodic(w).map_err(|e| e.to_string()),
            Input::Product(p) => Ok(omega.expand(p)),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Input::Finite(w) => w.to_string(),
            Input::Product(p) => p.describe(),
        }
    }
}
