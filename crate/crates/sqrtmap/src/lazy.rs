//! Infinite words as memoized prefix oracles, block sequences over `{S, L}`,
//! and the square root map as a lazy stream transformer.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::squares::{SquareAlphabet, SquareMatch};
use crate::words::{has_period, is_conjugate, Block, Word};

/// Something that can append letters of an infinite word.
pub trait Generator: Send {
    /// Appends letters to `out` until `out.len() >= target` (overshooting is fine).
    fn extend(&mut self, out: &mut Vec<u8>, target: usize) -> Result<()>;
}

/// A deterministic, append-only memoized infinite word.
///
/// Single consumer: reading mutates the memo, so a source is `Send` but not
/// shared between threads.
pub struct InfiniteWord {
    descriptor: String,
    memo: Vec<u8>,
    generator: Box<dyn Generator>,
    poison: Option<Error>,
    requested: usize,
}

impl fmt::Debug for InfiniteWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InfiniteWord")
            .field("descriptor", &self.descriptor)
            .field("memoized", &self.memo.len())
            .field("poisoned", &self.poison)
            .finish()
    }
}

/// JSON form of a source: descriptor plus a printed prefix.
#[derive(Debug, Clone, Serialize)]
pub struct SourceSnapshot {
    pub descriptor: String,
    pub prefix: String,
    pub prefix_len: usize,
}

impl InfiniteWord {
    pub fn new(descriptor: impl Into<String>, generator: Box<dyn Generator>) -> InfiniteWord {
        InfiniteWord {
            descriptor: descriptor.into(),
            memo: Vec::new(),
            generator,
            poison: None,
            requested: 0,
        }
    }

    /// `u^ω`.
    pub fn periodic(period: &Word) -> Result<InfiniteWord> {
        if period.is_empty() {
            return Err(Error::EmptyWord);
        }
        Ok(InfiniteWord::new(
            format!("periodic({period})"),
            Box::new(PeriodicGen {
                period: period.letters().to_vec(),
            }),
        ))
    }

    /// `head · tail`.
    pub fn prepend(head: &Word, tail: InfiniteWord) -> InfiniteWord {
        let descriptor = format!("{head}·{}", tail.descriptor);
        InfiniteWord::new(
            descriptor,
            Box::new(ConcatGen {
                head: head.letters().to_vec(),
                tail,
            }),
        )
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn with_descriptor(mut self, descriptor: impl Into<String>) -> InfiniteWord {
        self.descriptor = descriptor.into();
        self
    }

    /// Largest prefix length ever requested from this source.
    pub fn requested(&self) -> usize {
        self.requested
    }

    pub fn is_poisoned(&self) -> bool {
        self.poison.is_some()
    }

    /// The first `n` letters.
    pub fn letters(&mut self, n: usize) -> Result<&[u8]> {
        self.requested = self.requested.max(n);
        if self.memo.len() < n {
            if let Some(err) = &self.poison {
                return Err(err.clone());
            }
            if let Err(err) = self.generator.extend(&mut self.memo, n) {
                let err = Error::Poisoned(format!("{}: {err}", self.descriptor));
                self.poison = Some(err.clone());
                return Err(err);
            }
        }
        Ok(&self.memo[..n])
    }

    pub fn prefix(&mut self, n: usize) -> Result<Word> {
        Ok(Word::binary(self.letters(n)?.to_vec()))
    }

    pub fn letter(&mut self, i: usize) -> Result<u8> {
        Ok(self.letters(i + 1)?[i])
    }

    /// T^j.
    pub fn shift(self, j: usize) -> InfiniteWord {
        if j == 0 {
            return self;
        }
        let descriptor = format!("T^{j}({})", self.descriptor);
        InfiniteWord::new(descriptor, Box::new(ShiftGen { inner: self, skip: j }))
    }

    pub fn snapshot(&mut self, n: usize) -> Result<SourceSnapshot> {
        let prefix = self.prefix(n)?.to_string();
        Ok(SourceSnapshot {
            descriptor: self.descriptor.clone(),
            prefix,
            prefix_len: n,
        })
    }
}

struct PeriodicGen {
    period: Vec<u8>,
}

impl Generator for PeriodicGen {
    fn extend(&mut self, out: &mut Vec<u8>, target: usize) -> Result<()> {
        let p = self.period.len();
        while out.len() < target {
            let i = out.len() % p;
            out.push(self.period[i]);
        }
        Ok(())
    }
}

struct ConcatGen {
    head: Vec<u8>,
    tail: InfiniteWord,
}

impl Generator for ConcatGen {
    fn extend(&mut self, out: &mut Vec<u8>, target: usize) -> Result<()> {
        while out.len() < target.min(self.head.len()) {
            out.push(self.head[out.len()]);
        }
        if target > self.head.len() {
            let from = out.len() - self.head.len();
            let need = target - self.head.len();
            let tail = self.tail.letters(need)?;
            out.extend_from_slice(&tail[from..]);
        }
        Ok(())
    }
}

struct ShiftGen {
    inner: InfiniteWord,
    skip: usize,
}

impl Generator for ShiftGen {
    fn extend(&mut self, out: &mut Vec<u8>, target: usize) -> Result<()> {
        let from = out.len();
        let letters = self.inner.letters(self.skip + target)?;
        out.extend_from_slice(&letters[self.skip + from..]);
        Ok(())
    }
}

struct SqrtGen {
    inner: InfiniteWord,
    alphabet: Arc<SquareAlphabet>,
    consumed: usize,
}

impl Generator for SqrtGen {
    fn extend(&mut self, out: &mut Vec<u8>, target: usize) -> Result<()> {
        let limit = 2 * self.alphabet.longest_root();
        while out.len() < target {
            let mut want = 1;
            loop {
                let window = &self.inner.letters(self.consumed + want)?[self.consumed..];
                match self.alphabet.match_prefix(window) {
                    SquareMatch::Found(i) => {
                        let root = self.alphabet.root_letters(i);
                        out.extend_from_slice(root);
                        self.consumed += 2 * root.len();
                        break;
                    }
                    SquareMatch::NeedMore if want < limit => want += 1,
                    _ => {
                        return Err(Error::NotSquareful {
                            position: self.consumed,
                        })
                    }
                }
            }
        }
        Ok(())
    }
}

/// The lazy square root of a squareful word.
///
/// Producing `m` letters reads at most `2m + 2|S6|` letters of the input.
pub fn sqrt_stream(alphabet: &Arc<SquareAlphabet>, src: InfiniteWord) -> InfiniteWord {
    let descriptor = format!("sqrt({})", src.descriptor);
    InfiniteWord::new(
        descriptor,
        Box::new(SqrtGen {
            inner: src,
            alphabet: Arc::clone(alphabet),
            consumed: 0,
        }),
    )
}

/// Certified-window periodicity: the first `window` letters have period `p`
/// and the period word is a conjugate of `class`.
pub fn detect_period(src: &mut InfiniteWord, p: usize, window: usize, class: &Word) -> Result<bool> {
    if p == 0 || window < 3 * p {
        return Err(Error::Precondition(format!(
            "window {window} must be at least 3p = {}",
            3 * p
        )));
    }
    let letters = src.letters(window)?;
    if !has_period(letters, p) {
        return Ok(false);
    }
    Ok(is_conjugate(&Word::binary(letters[..p].to_vec()), class))
}

/// A read-only sequence of blocks `t ↦ ◇_t`. Cheap to clone and shareable.
#[derive(Clone)]
pub struct BlockSeq(Arc<BlockSeqKind>);

enum BlockSeqKind {
    Periodic(Vec<Block>),
    /// Fixed point of the substitution `S ↦ L S^{m-1}`, `L ↦ S^m` of even order,
    /// starting with `first`.
    FixedPoint {
        m: usize,
        first: Block,
    },
    Prefixed {
        head: Vec<Block>,
        tail: BlockSeq,
    },
    Decimated {
        base: BlockSeq,
        step: usize,
        offset: usize,
    },
    Oracle {
        name: String,
        f: Arc<dyn Fn(usize) -> Block + Send + Sync>,
        tail: Option<(usize, Block)>,
    },
}

/// Letter `t` of `τ^j(x)` where τ has block length `m`; requires `t < m^j`.
pub fn tau_power_letter(m: usize, j: u32, x: Block, t: usize) -> Block {
    if t == 0 {
        return if j.is_multiple_of(2) { x } else { x.flip() };
    }
    if trailing_zero_digits(t, m).is_multiple_of(2) {
        Block::S
    } else {
        Block::L
    }
}

fn trailing_zero_digits(mut t: usize, m: usize) -> usize {
    let mut v = 0;
    while t.is_multiple_of(m) {
        t /= m;
        v += 1;
    }
    v
}

impl BlockSeq {
    pub fn periodic(blocks: Vec<Block>) -> BlockSeq {
        assert!(!blocks.is_empty(), "periodic block sequence needs a period");
        BlockSeq(Arc::new(BlockSeqKind::Periodic(blocks)))
    }

    pub fn constant(b: Block) -> BlockSeq {
        BlockSeq::periodic(vec![b])
    }

    /// Γ₁* (`first = S`) or Γ₂* (`first = L`) for block length `m = 2c + 1`.
    pub fn fixed_point(m: usize, first: Block) -> BlockSeq {
        BlockSeq(Arc::new(BlockSeqKind::FixedPoint { m, first }))
    }

    pub fn prefixed(head: Vec<Block>, tail: BlockSeq) -> BlockSeq {
        if head.is_empty() {
            return tail;
        }
        BlockSeq(Arc::new(BlockSeqKind::Prefixed { head, tail }))
    }

    /// `t ↦ base[step·t + offset]`.
    pub fn decimated(base: BlockSeq, step: usize, offset: usize) -> BlockSeq {
        if step == 1 && offset == 0 {
            return base;
        }
        BlockSeq(Arc::new(BlockSeqKind::Decimated { base, step, offset }))
    }

    pub fn skip(self, n: usize) -> BlockSeq {
        BlockSeq::decimated(self, 1, n)
    }

    /// A sequence given by a function. `tail = Some((t0, x))` promises
    /// `f(t) = x` for all `t >= t0`.
    pub fn oracle(
        name: impl Into<String>,
        f: Arc<dyn Fn(usize) -> Block + Send + Sync>,
        tail: Option<(usize, Block)>,
    ) -> BlockSeq {
        BlockSeq(Arc::new(BlockSeqKind::Oracle {
            name: name.into(),
            f,
            tail,
        }))
    }

    /// `(t0, x)` when the sequence is known, without evaluating it, to equal
    /// `x` from index `t0` on.
    pub fn constant_tail(&self) -> Option<(usize, Block)> {
        match &*self.0 {
            BlockSeqKind::Periodic(p) => {
                let x = p[0];
                p.iter().all(|&b| b == x).then_some((0, x))
            }
            BlockSeqKind::FixedPoint { .. } => None,
            BlockSeqKind::Prefixed { head, tail } => {
                let (t0, x) = tail.constant_tail()?;
                Some((head.len() + t0, x))
            }
            BlockSeqKind::Decimated { base, step, offset } => {
                let (t0, x) = base.constant_tail()?;
                Some((t0.saturating_sub(*offset).div_ceil(*step), x))
            }
            BlockSeqKind::Oracle { tail, .. } => *tail,
        }
    }

    pub fn get(&self, t: usize) -> Block {
        match &*self.0 {
            BlockSeqKind::Periodic(p) => p[t % p.len()],
            BlockSeqKind::FixedPoint { m, first } => {
                if t == 0 {
                    *first
                } else {
                    tau_power_letter(*m, 0, Block::S, t)
                }
            }
            BlockSeqKind::Prefixed { head, tail } => {
                if t < head.len() {
                    head[t]
                } else {
                    tail.get(t - head.len())
                }
            }
            BlockSeqKind::Decimated { base, step, offset } => base.get(step * t + offset),
            BlockSeqKind::Oracle { f, .. } => f(t),
        }
    }

    pub fn take(&self, n: usize) -> Vec<Block> {
        (0..n).map(|t| self.get(t)).collect()
    }

    pub fn describe(&self) -> String {
        match &*self.0 {
            BlockSeqKind::Periodic(p) => format!("({})^ω", Word::blocks(p)),
            BlockSeqKind::FixedPoint { m, first } => {
                let which = if *first == Block::S { 1 } else { 2 };
                format!("Γ{which}*(m={m})")
            }
            BlockSeqKind::Prefixed { head, tail } => {
                format!("{}·{}", Word::blocks(head), tail.describe())
            }
            BlockSeqKind::Decimated { base, step, offset } => {
                format!("[{step}t+{offset}]{}", base.describe())
            }
            BlockSeqKind::Oracle { name, .. } => name.clone(),
        }
    }
}

impl fmt::Debug for BlockSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

/// `T^shift(◇_0 ◇_1 ◇_2 ...)` for blocks `◇_t ∈ {S, L}`.
#[derive(Clone, Debug)]
pub struct SLProduct {
    pub blocks: BlockSeq,
    pub shift: usize,
}

impl SLProduct {
    pub fn new(blocks: BlockSeq, shift: usize) -> SLProduct {
        SLProduct { blocks, shift }
    }

    pub fn describe(&self) -> String {
        if self.shift == 0 {
            self.blocks.describe()
        } else {
            format!("T^{}({})", self.shift, self.blocks.describe())
        }
    }

    /// The first `n` letters, given the concrete words for `S` and `L`.
    pub fn letters(&self, s: &[u8], l: &[u8], n: usize) -> Vec<u8> {
        let len = s.len();
        let mut out = Vec::with_capacity(n + len);
        let mut t = self.shift / len;
        let mut skip = self.shift % len;
        while out.len() < n {
            let block = match self.blocks.get(t) {
                Block::S => s,
                Block::L => l,
            };
            out.extend_from_slice(&block[skip..]);
            skip = 0;
            t += 1;
        }
        out.truncate(n);
        out
    }

    /// Letter-level oracle.
    pub fn expand(&self, s: &Word, l: &Word) -> InfiniteWord {
        InfiniteWord::new(
            self.describe(),
            Box::new(ProductGen {
                blocks: self.blocks.clone(),
                s: s.letters().to_vec(),
                l: l.letters().to_vec(),
                next_block: 0,
                skip: self.shift,
            }),
        )
    }
}

struct ProductGen {
    blocks: BlockSeq,
    s: Vec<u8>,
    l: Vec<u8>,
    next_block: usize,
    skip: usize,
}

impl Generator for ProductGen {
    fn extend(&mut self, out: &mut Vec<u8>, target: usize) -> Result<()> {
        while out.len() < target {
            let block = match self.blocks.get(self.next_block) {
                Block::S => &self.s,
                Block::L => &self.l,
            };
            self.next_block += 1;
            if self.skip >= block.len() {
                self.skip -= block.len();
                continue;
            }
            out.extend_from_slice(&block[self.skip..]);
            self.skip = 0;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    /// Direct expansion of τ^j(x) by repeated substitution.
    fn tau_expand(m: usize, j: u32, x: Block) -> Vec<Block> {
        let mut w = vec![x];
        for _ in 0..j {
            w = w
                .iter()
                .flat_map(|&b| {
                    let mut img = vec![Block::S; m];
                    if b == Block::S {
                        img[0] = Block::L;
                    }
                    img
                })
                .collect();
        }
        w
    }

    #[test]
    fn tau_letters_match_expansion() {
        for m in [3, 5] {
            for j in 0..5 {
                for x in [Block::S, Block::L] {
                    let full = tau_expand(m, j, x);
                    for (t, &b) in full.iter().enumerate() {
                        assert_eq!(tau_power_letter(m, j, x, t), b, "m={m} j={j} t={t}");
                    }
                }
            }
        }
    }

    #[test]
    fn fixed_point_blocks() {
        let g1 = BlockSeq::fixed_point(3, Block::S);
        let g2 = BlockSeq::fixed_point(3, Block::L);
        assert_eq!(Word::blocks(&g1.take(9)).to_string(), "SSSLSSLSS");
        assert_eq!(Word::blocks(&g2.take(9)).to_string(), "LSSLSSLSS");
        let even = tau_expand(3, 6, Block::S);
        assert_eq!(g1.take(even.len()), even);
        for t in 0..500 {
            assert_eq!(g1.get(t), g1.get(2 * t));
        }
    }

    #[test]
    fn prefix_examples() {
        let s = word("01010010");
        let mut sw = InfiniteWord::periodic(&s).unwrap();
        assert_eq!(sw.prefix(10).unwrap(), word("0101001001"));
        let mut shifted = InfiniteWord::periodic(&s).unwrap().shift(3);
        assert_eq!(shifted.prefix(5).unwrap(), word("10010"));
        let mut again = InfiniteWord::periodic(&s).unwrap().shift(8);
        assert_eq!(again.prefix(40).unwrap(), sw.prefix(40).unwrap());
    }

    #[test]
    fn shifts_compose() {
        let s = word("01010010");
        let l = word("10010010");
        let g = SLProduct::new(BlockSeq::fixed_point(3, Block::S), 0);
        let mut a = g.expand(&s, &l).shift(5).shift(7);
        let mut b = g.expand(&s, &l).shift(12);
        assert_eq!(a.prefix(300).unwrap(), b.prefix(300).unwrap());
    }

    #[test]
    fn expand_matches_letters() {
        let s = word("01010010");
        let l = word("10010010");
        for shift in [0, 1, 5, 7] {
            let p = SLProduct::new(BlockSeq::periodic(vec![Block::L, Block::S, Block::S]), shift);
            let direct = p.letters(s.letters(), l.letters(), 100);
            assert_eq!(p.expand(&s, &l).letters(100).unwrap(), &direct[..]);
        }
        let p = SLProduct::new(BlockSeq::constant(Block::S), 0);
        assert_eq!(p.expand(&s, &l).prefix(24).unwrap(), s.power(3));
    }

    #[test]
    fn sqrt_of_periodic_solution() {
        let alph = Arc::new(SquareAlphabet::new(1, 0).unwrap());
        let sbar = word("1001001010010");
        let mut root = sqrt_stream(&alph, InfiniteWord::periodic(&sbar).unwrap());
        assert_eq!(root.prefix(130).unwrap(), sbar.power(10));
    }

    #[test]
    fn poisoned_source_reports_position() {
        let alph = Arc::new(SquareAlphabet::new(1, 0).unwrap());
        let mut root = sqrt_stream(&alph, InfiniteWord::periodic(&word("011")).unwrap());
        let err = root.prefix(4).unwrap_err();
        assert!(matches!(err, Error::Poisoned(_)));
        assert!(root.is_poisoned());
        assert!(root.prefix(1).is_err());
    }

    #[test]
    fn laziness_bound() {
        let alph = Arc::new(SquareAlphabet::new(1, 0).unwrap());
        let sbar = word("1001001010010");
        for m in 1..60 {
            let mut probe = SqrtGen {
                inner: InfiniteWord::periodic(&sbar).unwrap(),
                alphabet: Arc::clone(&alph),
                consumed: 0,
            };
            let mut out = Vec::new();
            probe.extend(&mut out, m).unwrap();
            assert!(probe.inner.requested() <= 2 * m + 2 * alph.longest_root());
        }
    }

    #[test]
    fn period_detection() {
        let s = word("01010010");
        let mut sw = InfiniteWord::periodic(&s).unwrap();
        assert!(detect_period(&mut sw, 8, 48, &s).unwrap());
        let mut other = InfiniteWord::periodic(&word("01010011")).unwrap();
        assert!(!detect_period(&mut other, 8, 48, &s).unwrap());
        assert!(detect_period(&mut sw, 8, 16, &s).is_err());
    }
}
