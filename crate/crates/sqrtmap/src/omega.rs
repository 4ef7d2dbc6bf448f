//! The subshift built from `S = s̄_k` and its swap `L`: block substitutions,
//! the γ tower, the fixed points Γ₁/Γ₂, and the block-level square root of
//! shifted `{S, L}` products.

use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lazy::{tau_power_letter, BlockSeq, InfiniteWord, SLProduct};
use crate::squares::SquareAlphabet;
use crate::sturmian::{reversed_standard_word, ContinuedFraction, EndpointConvention, RotationSystem};
use crate::words::{conjugacy_offset, has_period, swap_first_two, Block, Word};

/// Which of `s̄_k`, `L(s̄_k)` plays the role of `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Seed {
    #[default]
    Plain,
    Swapped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaParams {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    /// Standard word index; `S` is built from `s̄_k`.
    pub k: usize,
    pub seed: Seed,
    /// Directive terms `d_3, d_4, ...`; missing terms default to 1.
    pub tail: Vec<u64>,
}

impl OmegaParams {
    /// The smallest admissible `k` for `(a, b)` with an all-ones tail.
    pub fn new(a: usize, b: usize, c: usize) -> Result<OmegaParams> {
        let mut params = OmegaParams {
            a,
            b,
            c,
            k: 0,
            seed: Seed::Plain,
            tail: Vec::new(),
        };
        let longest = SquareAlphabet::new(a, b)?.longest_root();
        params.k = (1..64)
            .find(|&k| {
                params.k = k;
                params.s_word().map(|w| w.len() > longest).unwrap_or(false)
            })
            .ok_or_else(|| Error::InvalidParams("no admissible standard word index".into()))?;
        Ok(params)
    }

    /// Fibonacci parameters with `|S| = size` (a Fibonacci number ≥ 8).
    pub fn fibonacci(size: usize) -> Result<OmegaParams> {
        let base = OmegaParams::new(1, 0, 1)?;
        let (mut x, mut y, mut k) = (5usize, 8usize, base.k);
        while y < size {
            (x, y) = (y, x + y);
            k += 1;
        }
        if y != size {
            return Err(Error::InvalidParams(format!("{size} is not a Fibonacci number >= 8")));
        }
        Ok(OmegaParams { k, ..base })
    }

    pub fn with_k(mut self, k: usize) -> OmegaParams {
        self.k = k;
        self
    }

    pub fn with_seed(mut self, seed: Seed) -> OmegaParams {
        self.seed = seed;
        self
    }

    pub fn with_tail(mut self, tail: Vec<u64>) -> OmegaParams {
        self.tail = tail;
        self
    }

    /// `d_1, ..., d_k` with `d_1 = a`, `d_2 = b + 1`.
    pub fn directive(&self) -> Vec<u64> {
        (1..=self.k)
            .map(|i| match i {
                1 => self.a as u64,
                2 => self.b as u64 + 1,
                _ => self.tail.get(i - 3).copied().unwrap_or(1),
            })
            .collect()
    }

    /// The truncated slope `[0; a+1, b+1, d_3, ..., d_k]`.
    pub fn slope(&self) -> Result<BigRational> {
        let mut quotients = self.directive();
        quotients[0] += 1;
        Ok(ContinuedFraction::new(0, quotients)?.value())
    }

    fn s_word(&self) -> Result<Word> {
        let d = self.directive();
        let plain = reversed_standard_word(&d, self.k as i64)?;
        match self.seed {
            Seed::Plain => Ok(plain),
            Seed::Swapped => swap_first_two(&plain),
        }
    }
}

/// The type of a shifted product `T^ℓ(◇_0 ◇_1 ...)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProductType {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Serialize)]
pub struct Classification {
    #[serde(rename = "type")]
    pub kind: ProductType,
    /// Length of the prefix found in Π (types B and C).
    pub pi_prefix_len: Option<usize>,
}

/// One block-level square root step.
#[derive(Debug, Clone)]
pub enum SqrtStep {
    /// Types A–C: the root is again a shifted product.
    Product { kind: ProductType, next: SLProduct },
    /// The root is `T^offset(S^ω)`. `kind` is `None` when the input was
    /// already periodic.
    Periodic { kind: Option<ProductType>, offset: usize },
}

/// Where a word of Ω_S sits among the invariant subsets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "index")]
pub enum SubsetIndex {
    /// γ_k-factorization starts at 0 but the γ_{k+1} one does not.
    Level(usize),
    /// All levels up to the budget start at 0.
    FixedPoint,
    NotInOmegaS,
}

/// A fully instantiated subshift.
#[derive(Debug)]
pub struct Omega {
    params: OmegaParams,
    alphabet: Arc<SquareAlphabet>,
    s: Word,
    l: Word,
    l_offset: usize,
    system: RotationSystem,
    /// `phase[j] = j'` when `√T^j(S^ω) = T^j'(S^ω)`.
    phase: Vec<usize>,
    tower: Mutex<Vec<(Word, Word)>>,
}

/// τ: `S ↦ L S^{2c}`, `L ↦ S^{2c+1}`.
pub fn tau(c: usize, w: &[Block]) -> Vec<Block> {
    let m = 2 * c + 1;
    let mut out = Vec::with_capacity(w.len() * m);
    for &b in w {
        out.push(if b == Block::S { Block::L } else { Block::S });
        out.extend(std::iter::repeat_n(Block::S, m - 1));
    }
    out
}

/// Gap conditions on a window of a `{γ, γ̄}` factorization, with `S` standing for γ
/// and `L` for γ̄. Only gaps fully inside the window are checked.
///
/// Consecutive γ̄ are separated by `γ^{2c}` or `γ^{4c+1}`. Consecutive occurrences of
/// `γ̄ γ^{4c+1} γ̄` are separated by `(γ^{2c} γ̄)^r γ̄^{-1}` with `r = 2c - 1` or `r = 4c`.
pub fn check_factorization_properties(c: usize, blocks: &[Block]) -> bool {
    let bars: Vec<usize> = (0..blocks.len()).filter(|&i| blocks[i] == Block::L).collect();
    let short = 2 * c;
    let long = 4 * c + 1;
    if bars.windows(2).any(|p| {
        let gap = p[1] - p[0] - 1;
        gap != short && gap != long
    }) {
        return false;
    }
    // Occurrences of γ̄ γ^{4c+1} γ̄, identified by their first γ̄.
    let marks: Vec<usize> = bars
        .windows(2)
        .filter(|p| p[1] - p[0] - 1 == long)
        .map(|p| p[0])
        .collect();
    let spaced = |r: usize| {
        let mut unit = vec![Block::S; short];
        unit.push(Block::L);
        let mut v = unit.repeat(r);
        v.pop();
        v
    };
    let allowed = [spaced(2 * c - 1), spaced(4 * c)];
    marks.windows(2).all(|p| {
        let start = p[0] + long + 2;
        p[1] >= start && allowed.iter().any(|a| a.as_slice() == &blocks[start..p[1]])
    })
}

/// A long prefix of Γ₁* used as a stand-in for the block language of Ω*.
#[derive(Debug, Clone)]
pub struct BlockCorpus {
    text: Vec<u8>,
}

impl BlockCorpus {
    /// The first `len` blocks of Γ₁* for block length `2c + 1`.
    pub fn new(c: usize, len: usize) -> BlockCorpus {
        let seq = BlockSeq::fixed_point(2 * c + 1, Block::S);
        BlockCorpus {
            text: (0..len).map(|t| seq.get(t).as_letter()).collect(),
        }
    }

    /// A corpus long enough to contain every factor of length `n`.
    pub fn for_factor_length(c: usize, n: usize) -> BlockCorpus {
        BlockCorpus::new(c, (200 * n).max(4096))
    }

    pub fn len(&self) -> usize {
        self.text.len()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }

    pub fn contains(&self, blocks: &[Block]) -> bool {
        self.position(blocks).is_some()
    }

    /// First occurrence of `blocks`.
    pub fn position(&self, blocks: &[Block]) -> Option<usize> {
        let needle: Vec<u8> = blocks.iter().map(|b| b.as_letter()).collect();
        memchr::memmem::find(&self.text, &needle)
    }

    /// Blocks `from..to`.
    pub fn slice(&self, from: usize, to: usize) -> Vec<Block> {
        self.text[from..to].iter().map(|&x| Block::from_letter(x)).collect()
    }

    /// All factors of length `n`, sorted.
    pub fn factors(&self, n: usize) -> Vec<Vec<Block>> {
        if n > self.text.len() {
            return Vec::new();
        }
        let set: std::collections::BTreeSet<&[u8]> = self.text.windows(n).collect();
        set.into_iter()
            .map(|w| w.iter().map(|&x| Block::from_letter(x)).collect())
            .collect()
    }

    pub fn blocks(&self) -> Vec<Block> {
        self.text.iter().map(|&x| Block::from_letter(x)).collect()
    }
}

impl Omega {
    pub fn new(params: OmegaParams) -> Result<Omega> {
        Omega::with_convention(params, EndpointConvention::default())
    }

    pub fn fibonacci(size: usize) -> Result<Omega> {
        Omega::new(OmegaParams::fibonacci(size)?)
    }

    pub fn with_convention(params: OmegaParams, convention: EndpointConvention) -> Result<Omega> {
        if params.c < 1 {
            return Err(Error::InvalidParams("parameter c must be >= 1".into()));
        }
        let alphabet = Arc::new(SquareAlphabet::new(params.a, params.b)?);
        let s = params.s_word()?;
        if s.len() <= alphabet.longest_root() {
            return Err(Error::InvalidParams(format!(
                "|S| = {} must exceed |S6| = {}",
                s.len(),
                alphabet.longest_root()
            )));
        }
        let l = swap_first_two(&s)?;
        let l_offset = conjugacy_offset(s.letters(), l.letters())
            .ok_or_else(|| Error::InvalidParams("S and L are not conjugate".into()))?;
        let system = RotationSystem::new(params.slope()?, convention)?;
        if system.period() != s.len() {
            return Err(Error::InvalidParams("slope denominator differs from |S|".into()));
        }
        let mut omega = Omega {
            params,
            alphabet,
            s,
            l,
            l_offset,
            system,
            phase: Vec::new(),
            tower: Mutex::new(Vec::new()),
        };
        omega.phase = (0..omega.s.len())
            .map(|j| omega.periodic_sqrt_offset(j))
            .collect::<Result<_>>()?;
        Ok(omega)
    }

    pub fn params(&self) -> &OmegaParams {
        &self.params
    }

    pub fn alphabet(&self) -> &Arc<SquareAlphabet> {
        &self.alphabet
    }

    pub fn s(&self) -> &Word {
        &self.s
    }

    pub fn l(&self) -> &Word {
        &self.l
    }

    /// |S|.
    pub fn size(&self) -> usize {
        self.s.len()
    }

    /// `m = 2c + 1`, the length of τ-images.
    pub fn block_factor(&self) -> usize {
        2 * self.params.c + 1
    }

    /// `j` with `L^ω = T^j(S^ω)`.
    pub fn l_offset(&self) -> usize {
        self.l_offset
    }

    pub fn system(&self) -> &RotationSystem {
        &self.system
    }

    pub fn block_word(&self, b: Block) -> &Word {
        match b {
            Block::S => &self.s,
            Block::L => &self.l,
        }
    }

    /// σ: blocks to letters.
    pub fn sigma(&self, blocks: &[Block]) -> Word {
        Word::binary(
            blocks
                .iter()
                .flat_map(|&b| self.block_word(b).letters().iter().copied())
                .collect(),
        )
    }

    /// `(γ_j, γ̄_j)`.
    pub fn gamma(&self, j: usize) -> (Word, Word) {
        let mut tower = self.tower.lock().expect("gamma cache poisoned");
        while tower.len() <= j {
            let level = tower.len() as u32;
            let m = self.block_factor();
            let count = m.pow(level);
            let make = |x: Block| {
                let blocks: Vec<Block> = (0..count).map(|t| tau_power_letter(m, level, x, t)).collect();
                self.sigma(&blocks)
            };
            tower.push((make(Block::S), make(Block::L)));
        }
        tower[j].clone()
    }

    /// Γ₁ (`which = 1`) or Γ₂ (`which = 2`) as block sequence.
    pub fn big_gamma_blocks(&self, which: u8) -> BlockSeq {
        let first = if which == 2 { Block::L } else { Block::S };
        BlockSeq::fixed_point(self.block_factor(), first)
    }

    pub fn big_gamma(&self, which: u8) -> InfiniteWord {
        let prod = SLProduct::new(self.big_gamma_blocks(which), 0);
        self.expand(&prod)
            .with_descriptor(if which == 2 { "Gamma2" } else { "Gamma1" })
    }

    pub fn expand(&self, prod: &SLProduct) -> InfiniteWord {
        prod.expand(&self.s, &self.l)
    }

    /// `T^offset(S^ω)`.
    pub fn periodic_word(&self, offset: usize) -> InfiniteWord {
        let w = InfiniteWord::periodic(&self.s).expect("S is nonempty");
        w.shift(offset % self.size())
            .with_descriptor(format!("T^{}(S^ω)", offset % self.size()))
    }

    /// The first `n` letters of a product. Blocks entered at offset ≥ 2 are not
    /// consulted, since `S` and `L` agree beyond their first two letters.
    pub fn product_prefix(&self, prod: &SLProduct, n: usize) -> Vec<u8> {
        let size = self.size();
        let mut out = Vec::with_capacity(n + size);
        let mut t = prod.shift / size;
        let mut skip = prod.shift % size;
        while out.len() < n {
            let word = if skip >= 2 {
                &self.s
            } else {
                self.block_word(prod.blocks.get(t))
            };
            out.extend_from_slice(&word.letters()[skip..]);
            skip = 0;
            t += 1;
        }
        out.truncate(n);
        out
    }

    fn normalize(&self, prod: &SLProduct) -> SLProduct {
        let size = self.size();
        SLProduct::new(prod.blocks.clone().skip(prod.shift / size), prod.shift % size)
    }

    pub fn classify_type(&self, prod: &SLProduct) -> Classification {
        let prod = self.normalize(prod);
        let size = self.size();
        let ell = prod.shift;
        if ell == 0 {
            return Classification {
                kind: ProductType::A,
                pi_prefix_len: None,
            };
        }
        for (kind, len) in [(ProductType::B, size - ell), (ProductType::C, 2 * size - ell)] {
            if len % 2 == 0 && self.alphabet.in_pi(&self.product_prefix(&prod, len)) {
                return Classification {
                    kind,
                    pi_prefix_len: Some(len),
                };
            }
        }
        Classification {
            kind: ProductType::D,
            pi_prefix_len: None,
        }
    }

    /// If the product is `T^j(S^ω)` as a letter sequence, returns `j`.
    ///
    /// Decided structurally: the block sequence must be known constant from
    /// some index on, and the earlier blocks are compared one at a time.
    pub fn periodic_offset(&self, prod: &SLProduct) -> Option<usize> {
        let prod = self.normalize(prod);
        let (from, x) = prod.blocks.constant_tail()?;
        if (1..from).any(|t| prod.blocks.get(t) != x) {
            return None;
        }
        if prod.shift < 2 && prod.blocks.get(0) != x {
            return None;
        }
        let base = if x == Block::S { 0 } else { self.l_offset };
        Some((prod.shift + base) % self.size())
    }

    fn block_ending_with(&self, root: &[u8]) -> Option<Block> {
        [Block::S, Block::L]
            .into_iter()
            .find(|&b| self.block_word(b).letters().ends_with(root))
    }

    /// One block-level square root step.
    pub fn sqrt_product(&self, prod: &SLProduct) -> Result<SqrtStep> {
        if let Some(offset) = self.periodic_offset(prod) {
            return Ok(SqrtStep::Periodic {
                kind: None,
                offset: self.phase[offset],
            });
        }
        let prod = self.normalize(prod);
        let size = self.size();
        let class = self.classify_type(&prod);
        let lost = |what: &str| Error::LostSynchronization(format!("{what} at {}", prod.describe()));
        match class.kind {
            ProductType::A => Ok(SqrtStep::Product {
                kind: ProductType::A,
                next: SLProduct::new(BlockSeq::decimated(prod.blocks.clone(), 2, 0), 0),
            }),
            ProductType::B | ProductType::C => {
                let len = class.pi_prefix_len.expect("types B and C carry a prefix length");
                let root = self.alphabet.sqrt_finite(&self.product_prefix(&prod, len))?;
                let head = self
                    .block_ending_with(&root)
                    .ok_or_else(|| lost("root of the Π prefix is not a suffix of S or L"))?;
                let offset = if class.kind == ProductType::B { 1 } else { 2 };
                let rest = BlockSeq::decimated(prod.blocks.clone(), 2, offset);
                Ok(SqrtStep::Product {
                    kind: class.kind,
                    next: SLProduct::new(BlockSeq::prefixed(vec![head], rest), size - root.len()),
                })
            }
            ProductType::D => {
                let mut len = 2 * size;
                loop {
                    let window = self.product_prefix(&prod, len);
                    let (root, _) = self.alphabet.sqrt_certain(&window)?;
                    if root.len() >= size {
                        if !has_period(&root, size) {
                            return Err(lost("type D root is not periodic"));
                        }
                        let offset = conjugacy_offset(self.s.letters(), &root[..size])
                            .ok_or_else(|| lost("type D period is not a conjugate of S"))?;
                        return Ok(SqrtStep::Periodic {
                            kind: Some(ProductType::D),
                            offset,
                        });
                    }
                    len += size;
                }
            }
        }
    }

    /// The letter-level square root together with its structural outcome.
    pub fn sqrt_of_product(&self, prod: &SLProduct) -> Result<(InfiniteWord, SqrtStep)> {
        let step = self.sqrt_product(prod)?;
        let word = match &step {
            SqrtStep::Product { next, .. } => self.expand(next),
            SqrtStep::Periodic { offset, .. } => self.periodic_word(*offset),
        };
        Ok((word, step))
    }

    /// Offset of `√T^j(S^ω)`, computed on letters.
    fn periodic_sqrt_offset(&self, j: usize) -> Result<usize> {
        let size = self.size();
        let window: Vec<u8> = (0..4 * size + 2 * self.alphabet.longest_root())
            .map(|i| self.s.at((i + j) % size))
            .collect();
        let (root, _) = self.alphabet.sqrt_certain(&window)?;
        if root.len() < size || !has_period(&root, size) {
            return Err(Error::LostSynchronization(format!(
                "square root of T^{j}(S^ω) is not periodic"
            )));
        }
        conjugacy_offset(self.s.letters(), &root[..size])
            .ok_or_else(|| Error::LostSynchronization(format!("square root of T^{j}(S^ω) left the class of S")))
    }

    /// `phase[j]` with `√T^j(S^ω) = T^{phase[j]}(S^ω)`.
    pub fn phase_map(&self) -> &[usize] {
        &self.phase
    }

    pub fn is_fixed_offset(&self, offset: usize) -> bool {
        offset == 0 || offset == self.l_offset
    }

    /// Steps for `T^offset(S^ω)` to reach `S^ω` or `L^ω`.
    pub fn phase_steps(&self, mut offset: usize) -> Option<usize> {
        for steps in 0..=self.size() {
            if self.is_fixed_offset(offset) {
                return Some(steps);
            }
            offset = self.phase[offset];
        }
        None
    }

    /// Start of the γ_j-factorization of `src`, located from an occurrence of
    /// `γγ`, `γγ̄` or `γ̄γ` inside the first `window` letters.
    pub fn sync_factorization_start(&self, src: &mut InfiniteWord, j: usize, window: usize) -> Result<Option<usize>> {
        let (g, gbar) = self.gamma(j);
        let len = g.len();
        let text = src.letters(window)?;
        let pairs = [
            [g.letters(), g.letters()].concat(),
            [g.letters(), gbar.letters()].concat(),
            [gbar.letters(), g.letters()].concat(),
        ];
        let first = pairs.iter().filter_map(|p| memchr::memmem::find(text, p)).min();
        Ok(first.map(|p| p % len))
    }

    /// Default synchronization window: `4|γ_j|`.
    pub fn sync_window(&self, j: usize) -> usize {
        4 * self.gamma(j).0.len()
    }

    pub fn invariant_subset_index(&self, src: &mut InfiniteWord, jmax: usize) -> Result<SubsetIndex> {
        if self.sync_factorization_start(src, 0, self.sync_window(0))? != Some(0) {
            return Ok(SubsetIndex::NotInOmegaS);
        }
        for k in 0..jmax {
            if self.sync_factorization_start(src, k + 1, self.sync_window(k + 1))? != Some(0) {
                return Ok(SubsetIndex::Level(k));
            }
        }
        Ok(SubsetIndex::FixedPoint)
    }

    /// Largest `j` with `|γ_j|` at most `budget` letters.
    pub fn level_budget(&self, budget: usize) -> usize {
        let mut j = 0;
        let mut len = self.size();
        while len * self.block_factor() * 4 <= budget {
            len *= self.block_factor();
            j += 1;
        }
        j
    }

    /// Whether `src` begins with `γ_k γ_k^{2c} γ̄_k`, `γ̄_k γ_k^{2c} γ̄_k` or `γ̄_k γ_k^{2c} γ_k`.
    pub fn has_next_level_prefix(&self, src: &mut InfiniteWord, k: usize) -> Result<bool> {
        let (g, gbar) = self.gamma(k);
        let middle = g.power(2 * self.params.c);
        let text = src.letters(g.len() * (2 * self.params.c + 2))?;
        let candidates = [(&g, &gbar), (&gbar, &gbar), (&gbar, &g)];
        Ok(candidates.iter().any(|(x, y)| {
            let pattern = [x.letters(), middle.letters(), y.letters()].concat();
            text == pattern.as_slice()
        }))
    }
}
