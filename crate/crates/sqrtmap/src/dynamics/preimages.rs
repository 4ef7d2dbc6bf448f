use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automaton::FactorIndex;
use crate::error::{Error, Result};
use crate::lazy::{BlockSeq, InfiniteWord, SLProduct};
use crate::omega::{BlockCorpus, Omega};
use crate::words::{Block, Word};

use super::orbit::steps_to_fixed;
use super::table::table1_reference;

/// Factor index for the letter language of Ω: a long prefix of Γ₁ together
/// with the factors of `S^ω`.
#[derive(Debug, Clone)]
pub struct OmegaLanguage {
    aperiodic: FactorIndex,
    periodic: FactorIndex,
    max_len: usize,
}

/// Position in both indices; a word is in the language while either is alive.
#[derive(Debug, Clone, Copy)]
pub struct LanguageState(Option<usize>, Option<usize>);

impl LanguageState {
    pub fn alive(&self) -> bool {
        self.0.is_some() || self.1.is_some()
    }
}

impl OmegaLanguage {
    /// Covers factors of length up to `max_len` from `corpus_letters` letters of Γ₁.
    pub fn new(omega: &Omega, corpus_letters: usize, max_len: usize) -> OmegaLanguage {
        let size = omega.size();
        let blocks = corpus_letters.div_ceil(size);
        let corpus = BlockCorpus::new(omega.params().c, blocks);
        let text = omega.sigma(&corpus.blocks()).into_letters();
        let reps = max_len / size + 2;
        let periodic = omega.s().power(reps).into_letters();
        OmegaLanguage {
            aperiodic: FactorIndex::new(&text),
            periodic: FactorIndex::new(&periodic),
            max_len,
        }
    }

    /// A language index adequate for factors of length `max_len`.
    pub fn for_factor_length(omega: &Omega, max_len: usize) -> OmegaLanguage {
        OmegaLanguage::new(omega, (400 * max_len).max(1 << 16), max_len)
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn start(&self) -> LanguageState {
        LanguageState(Some(self.aperiodic.root()), Some(self.periodic.root()))
    }

    pub fn extend(&self, state: LanguageState, word: &[u8]) -> LanguageState {
        LanguageState(
            state.0.and_then(|s| self.aperiodic.walk(s, word)),
            state.1.and_then(|s| self.periodic.walk(s, word)),
        )
    }

    pub fn contains(&self, word: &[u8]) -> bool {
        self.extend(self.start(), word).alive()
    }
}

/// One link of a preimage chain: `√preimage = image`.
#[derive(Debug, Clone, Serialize)]
pub struct PreimageLink {
    pub length: usize,
    /// Level `K` of the block words `γ_K`, `γ̄_K` the preimage is cut from.
    pub level: usize,
    pub blocks: String,
    pub in_language: bool,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PreimageChain {
    pub source: String,
    pub prefix_len: usize,
    pub level: usize,
    /// Length of the starting word, a prefix of the source covering `prefix_len` letters.
    pub start_len: usize,
    pub links: Vec<PreimageLink>,
}

impl PreimageChain {
    pub fn all_verified(&self) -> bool {
        self.links.iter().all(|l| l.verified && l.in_language)
    }
}

/// The current word of a chain: the suffix of length `len` of the expansion of
/// the level-`level` block word `blocks`.
struct LevelWindow {
    level: usize,
    blocks: Vec<Block>,
    len: usize,
}

impl LevelWindow {
    fn letters(&self, omega: &Omega) -> Vec<u8> {
        let (g, gbar) = omega.gamma(self.level);
        let full: Vec<u8> = self
            .blocks
            .iter()
            .flat_map(|&b| if b == Block::S { g.letters() } else { gbar.letters() }.iter().copied())
            .collect();
        full[full.len() - self.len..].to_vec()
    }
}

/// Block word `W'` with `W'[2t] = W[t]`, read off Γ₁* at twice an occurrence
/// of `W`, using `Γ₁*[2t] = Γ₁*[t]`.
fn lift_blocks(corpus: &BlockCorpus, blocks: &[Block]) -> Result<Vec<Block>> {
    if let Some(&x) = blocks.first() {
        if blocks.iter().all(|&b| b == x) && !corpus.contains(blocks) {
            // Runs outside Ω*, i.e. S^ω and L^ω, lift to themselves.
            return Ok(vec![x; 2 * blocks.len()]);
        }
    }
    let p = corpus
        .position(blocks)
        .ok_or_else(|| Error::Budget(format!("block word of length {} not in the corpus", blocks.len())))?;
    let end = 2 * (p + blocks.len());
    if end > corpus.len() {
        return Err(Error::Budget("corpus too short to lift the block word".into()));
    }
    Ok(corpus.slice(2 * p, end))
}

fn block_at(omega: &Omega, level: usize, letters: &[u8]) -> Option<Block> {
    let (g, gbar) = omega.gamma(level);
    if letters == g.letters() {
        Some(Block::S)
    } else if letters == gbar.letters() {
        Some(Block::L)
    } else {
        None
    }
}

/// Letter length of `γ_j`.
fn gamma_len(omega: &Omega, j: usize) -> usize {
    omega.size() * omega.block_factor().pow(j as u32)
}

/// Builds a chain of `depth` verified preimages of the first `prefix_len`
/// letters of a word of Ω_S.
///
/// The starting word is the prefix up to the start of the γ_K-factorization
/// for the least level `K` where that start lies at or beyond `prefix_len`;
/// it is a suffix of γ_{K+1}, and each preimage is the suffix of twice the
/// length of a lifted block word (γ_{K+1}γ_{K+1} or γ_{K+1}γ̄_{K+1} in the
/// first step). Words aligned at every level checked (Γ₁, Γ₂, left
/// extensions `zΓ`) use the top level and its block decomposition instead.
pub fn preimage_chain(omega: &Omega, src: &mut InfiniteWord, depth: usize, prefix_len: usize) -> Result<PreimageChain> {
    if prefix_len == 0 {
        return Err(Error::Precondition("prefix length must be positive".into()));
    }
    let reach = 16 * prefix_len.max(omega.size());
    let budget = omega.level_budget(reach);
    let mut starts = Vec::new();
    // `LL` is not a factor of Ω*, and inside `L^ω` the level-0 pairs sit at
    // offset |S| - l_offset. A source that agrees with `L^ω` over the whole
    // inspected window is aligned at 0; two blocks are not enough, since
    // `T^ℓ(SS...)` can begin with `LL`.
    let blocks = reach.div_ceil(omega.size());
    let ll = src.letters(blocks * omega.size())? == omega.l().power(blocks).letters();
    for j in 0..=budget {
        if ll {
            starts.push(0);
            break;
        }
        // Periodic words have no factorization above level 0.
        match omega.sync_factorization_start(src, j, omega.sync_window(j))? {
            Some(start) => starts.push(start),
            None if j > 0 => break,
            None => return Err(Error::Precondition(format!("{} is not in Ω_S", src.descriptor()))),
        }
    }
    let top = starts.len() - 1;
    if starts[0] != 0 {
        return Err(Error::Precondition(format!("{} is not in Ω_S", src.descriptor())));
    }
    let window = match (1..=top).find(|&j| starts[j] >= prefix_len) {
        Some(k) => LevelWindow {
            level: k + 1,
            blocks: vec![Block::S],
            len: starts[k],
        },
        None => {
            let level = top;
            let glen = gamma_len(omega, level);
            let p = starts[level];
            let count = (prefix_len.saturating_sub(p)).div_ceil(glen).max(1);
            let letters = src.letters(p + count * glen)?.to_vec();
            let mut blocks = Vec::new();
            for i in 0..count {
                let at = p + i * glen;
                blocks.push(block_at(omega, level, &letters[at..at + glen]).ok_or_else(|| {
                    Error::LostSynchronization(format!("level-{level} block at {at} is neither γ nor γ̄"))
                })?);
            }
            if p > 0 {
                let (g, gbar) = omega.gamma(level);
                let corpus = BlockCorpus::for_factor_length(omega.params().c, count + 1);
                let head = [Block::S, Block::L].into_iter().find(|&x| {
                    let w = if x == Block::S { &g } else { &gbar };
                    let mut cand = vec![x];
                    cand.extend_from_slice(&blocks);
                    w.letters().ends_with(&letters[..p]) && corpus.contains(&cand)
                });
                let head = head.ok_or_else(|| {
                    Error::LostSynchronization("prefix before the top-level factorization is not a block suffix".into())
                })?;
                blocks.insert(0, head);
            }
            LevelWindow {
                level,
                blocks,
                len: p + count * glen,
            }
        }
    };
    let mut window = window;
    let start_letters = window.letters(omega);
    if src.letters(window.len)? != start_letters.as_slice() {
        return Err(Error::LostSynchronization(
            "starting word differs from the source prefix".into(),
        ));
    }

    let final_blocks = window.blocks.len() << depth;
    let corpus = BlockCorpus::for_factor_length(omega.params().c, final_blocks);
    let mut chain = PreimageChain {
        source: src.descriptor().to_string(),
        prefix_len,
        level: window.level,
        start_len: window.len,
        links: Vec::new(),
    };
    let mut current = start_letters;
    for _ in 0..depth {
        let lifted = LevelWindow {
            level: window.level,
            blocks: lift_blocks(&corpus, &window.blocks)?,
            len: 2 * window.len,
        };
        let letters = lifted.letters(omega);
        let verified = omega
            .alphabet()
            .sqrt_finite(&letters)
            .map(|r| r == current)
            .unwrap_or(false);
        let periodic = lifted.blocks.iter().all(|&b| b == lifted.blocks[0]);
        let in_language = periodic || corpus.contains(&lifted.blocks);
        chain.links.push(PreimageLink {
            length: letters.len(),
            level: lifted.level,
            blocks: Word::blocks(&lifted.blocks).to_string(),
            in_language,
            verified,
        });
        current = letters;
        window = lifted;
    }
    Ok(chain)
}

/// A preimage prefix found by [`find_preimages`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PreimageDescriptor {
    /// First `|target|` letters of the preimage.
    pub head: Word,
    /// Root indices of the square factorization that produced it.
    pub roots: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PreimageSet {
    pub target: Word,
    pub descriptors: Vec<PreimageDescriptor>,
    /// Root factorizations of the target explored.
    pub explored: usize,
}

/// Finds all words `v` in the language of Ω whose square root starts with
/// `target`. Candidates are the square products `X_1² X_2² ...` over the root
/// factorizations `X_1 X_2 ...` of the target (the last root may run past it),
/// pruned as soon as they leave the language. Results are deduplicated by
/// their first `|target|` letters.
pub fn find_preimages(omega: &Omega, language: &OmegaLanguage, target: &Word, head_len: usize) -> PreimageSet {
    let alphabet = omega.alphabet();
    let t = target.letters();
    let mut set = PreimageSet {
        target: target.clone(),
        descriptors: Vec::new(),
        explored: 0,
    };
    let mut found: BTreeSet<PreimageDescriptor> = BTreeSet::new();
    let mut stack: Vec<(usize, Vec<u8>, Vec<usize>, LanguageState)> =
        vec![(0, Vec::new(), Vec::new(), language.start())];
    while let Some((pos, v, roots, state)) = stack.pop() {
        if pos >= t.len() {
            set.explored += 1;
            if v.len() >= head_len {
                found.insert(PreimageDescriptor {
                    head: Word::binary(v[..head_len].to_vec()),
                    roots: roots.clone(),
                });
            }
            continue;
        }
        for i in 0..6 {
            let root = alphabet.root_letters(i);
            let rest = &t[pos..];
            let fits = if root.len() <= rest.len() {
                rest.starts_with(root)
            } else {
                root.starts_with(rest)
            };
            if !fits {
                continue;
            }
            let square = alphabet.square(i);
            let next = language.extend(state, &square);
            if !next.alive() {
                continue;
            }
            let mut v2 = v.clone();
            v2.extend_from_slice(&square);
            if alphabet.factorize(&v2).is_err() {
                continue;
            }
            let mut r2 = roots.clone();
            r2.push(i);
            stack.push((pos + root.len(), v2, r2, next));
        }
    }
    // Keep one factorization per distinct head.
    let mut last: Option<Word> = None;
    for d in found {
        if last.as_ref() != Some(&d.head) {
            last = Some(d.head.clone());
            set.descriptors.push(d);
        }
    }
    set
}

/// How two distinct preimage heads relate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairForm {
    /// `zSΓ₁` and `zSΓ₂` with `zS` a suffix of some `γ_k`.
    ZsGamma,
    /// `yΓ₁` and `yΓ₂` with `y` a suffix of some `γ_k` not ending in `S`.
    SuffixGamma,
    Other,
}

/// Splits two heads at their first difference and checks that the tails are
/// prefixes of Γ₁ and Γ₂ and the common part is a suffix of some `γ_k`.
pub fn classify_pair(omega: &Omega, a: &Word, b: &Word) -> Result<PairForm> {
    let (a, b) = (a.letters(), b.letters());
    let Some(d) = (0..a.len().min(b.len())).find(|&i| a[i] != b[i]) else {
        return Ok(PairForm::Other);
    };
    let rest = a.len().min(b.len()) - d;
    let g1 = omega.big_gamma(1).letters(rest)?.to_vec();
    let g2 = omega.big_gamma(2).letters(rest)?.to_vec();
    let (x, y) = (&a[d..d + rest], &b[d..d + rest]);
    let tails = (x == g1.as_slice() && y == g2.as_slice()) || (x == g2.as_slice() && y == g1.as_slice());
    if !tails {
        return Ok(PairForm::Other);
    }
    let common = &a[..d];
    let mut j = 0;
    while gamma_len(omega, j) < d {
        j += 1;
    }
    if !omega.gamma(j).0.letters().ends_with(common) {
        return Ok(PairForm::Other);
    }
    Ok(if common.ends_with(omega.s().letters()) {
        PairForm::ZsGamma
    } else {
        PairForm::SuffixGamma
    })
}

pub fn is_zs_gamma_pair(omega: &Omega, a: &Word, b: &Word) -> Result<bool> {
    Ok(classify_pair(omega, a, b)? == PairForm::ZsGamma)
}

#[derive(Debug, Clone, Serialize)]
pub struct InjectivityReport {
    pub targets: usize,
    pub target_len: usize,
    pub head_len: usize,
    pub max_descriptors: usize,
    pub with_two: usize,
    pub two_in_zs_gamma_form: usize,
    /// Pairs `yΓ₁`, `yΓ₂` whose common prefix does not end in `S`.
    pub two_in_suffix_gamma_form: usize,
    /// Up to a few examples of the suffix form, as `target: head | head`.
    pub suffix_gamma_examples: Vec<String>,
    /// Targets with more than two descriptors, or a pair of neither form.
    pub violations: Vec<String>,
}

impl InjectivityReport {
    /// Every two-preimage target is a `zSΓ` pair.
    pub fn passes(&self) -> bool {
        self.violations.is_empty() && self.max_descriptors <= 2 && self.with_two == self.two_in_zs_gamma_form
    }

    /// Every two-preimage target is a `yΓ₁`/`yΓ₂` pair with `y` a suffix of some `γ_k`.
    pub fn passes_suffix_form(&self) -> bool {
        self.violations.is_empty() && self.max_descriptors <= 2
    }
}

/// Letters of Γ₁ starting at uniformly random positions below `range`.
pub fn sample_omega_a_targets(omega: &Omega, count: usize, len: usize, range: usize, seed: u64) -> Result<Vec<Word>> {
    let mut gamma = omega.big_gamma(1);
    let text = gamma.letters(range + len)?.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|_| {
            let q = rng.gen_range(0..range);
            Word::binary(text[q..q + len].to_vec())
        })
        .collect())
}

/// Runs [`find_preimages`] on sampled Ω_A targets and inspects every target
/// with two preimage heads of length `head_len`. The roots of `T^ℓ(SΓ₁)` for
/// `ℓ < |S|` are added so that the two-preimage case is exercised.
///
/// Heads must be much shorter than the target: the letters of a finite
/// preimage near its end are not determined by the target.
pub fn injectivity_check(
    omega: &Omega,
    count: usize,
    target_len: usize,
    head_len: usize,
    seed: u64,
) -> Result<InjectivityReport> {
    if head_len == 0 || head_len > target_len {
        return Err(Error::Precondition(format!(
            "head length {head_len} must lie in 1..={target_len}"
        )));
    }
    let language = OmegaLanguage::for_factor_length(omega, 2 * target_len + 2 * omega.alphabet().longest_root());
    let mut targets = sample_omega_a_targets(omega, count, target_len, 1 << 16, seed)?;
    for shift in 0..omega.size() {
        let src = InfiniteWord::prepend(omega.s(), omega.big_gamma(1)).shift(shift);
        let root = crate::lazy::sqrt_stream(omega.alphabet(), src).prefix(target_len)?;
        // Type D shifts have periodic roots, which lie outside Ω_A.
        if !crate::words::has_period(root.letters(), omega.size()) {
            targets.push(root);
        }
    }
    let mut report = InjectivityReport {
        targets: targets.len(),
        target_len,
        head_len,
        max_descriptors: 0,
        with_two: 0,
        two_in_zs_gamma_form: 0,
        two_in_suffix_gamma_form: 0,
        suffix_gamma_examples: Vec::new(),
        violations: Vec::new(),
    };
    for target in &targets {
        let set = find_preimages(omega, &language, target, head_len);
        let n = set.descriptors.len();
        report.max_descriptors = report.max_descriptors.max(n);
        if n > 2 {
            report.violations.push(format!("{target}: {n} preimages"));
        } else if n == 2 {
            report.with_two += 1;
            let (a, b) = (&set.descriptors[0].head, &set.descriptors[1].head);
            match classify_pair(omega, a, b)? {
                PairForm::ZsGamma => report.two_in_zs_gamma_form += 1,
                PairForm::SuffixGamma => {
                    report.two_in_suffix_gamma_form += 1;
                    if report.suffix_gamma_examples.len() < 4 {
                        report.suffix_gamma_examples.push(format!("{target}: {a} | {b}"));
                    }
                }
                PairForm::Other => report
                    .violations
                    .push(format!("{target}: two preimages {a} and {b} of neither form")),
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitSetReport {
    pub size: usize,
    pub chains: usize,
    pub chains_verified: usize,
    pub depth: usize,
    pub outside: usize,
    pub outside_reached: usize,
    pub step_bound: usize,
    pub max_steps: usize,
    pub failures: Vec<String>,
}

impl LimitSetReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty() && self.chains_verified == self.chains && self.outside_reached == self.outside
    }
}

/// Samples words of Ω_S (aligned shifts of Γ₁ and Γ₂, left extensions `zΓ`,
/// `S^ω`, `L^ω`) and checks a depth-`depth` preimage chain for each; samples
/// words outside Ω_S (off-grid shifts) and checks they reach `S^ω` or `L^ω`
/// within the reference step count for their size.
pub fn limit_set_check(
    omega: &Omega,
    samples: usize,
    depth: usize,
    prefix_len: usize,
    seed: u64,
) -> Result<LimitSetReport> {
    let size = omega.size();
    let step_bound = table1_reference(size)
        .ok_or_else(|| Error::Precondition(format!("no reference step count for |S| = {size}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LimitSetReport {
        size,
        chains: 0,
        chains_verified: 0,
        depth,
        outside: 0,
        outside_reached: 0,
        step_bound,
        max_steps: 0,
        failures: Vec::new(),
    };
    let c = omega.params().c;
    let corpus = BlockCorpus::for_factor_length(c, 64);
    let heads: Vec<Vec<Block>> = (1..=8)
        .flat_map(|n| {
            (0..1u32 << n).map(move |bits| {
                (0..n)
                    .map(|i| Block::from_letter(((bits >> i) & 1) as u8))
                    .collect::<Vec<_>>()
            })
        })
        .collect();
    let mut inside: Vec<SLProduct> = vec![
        SLProduct::new(omega.big_gamma_blocks(1), 0),
        SLProduct::new(omega.big_gamma_blocks(2), 0),
        SLProduct::new(BlockSeq::constant(Block::S), 0),
        SLProduct::new(BlockSeq::constant(Block::L), 0),
    ];
    for which in [1u8, 2] {
        let probe = omega.big_gamma_blocks(which).take(64);
        for h in &heads {
            let w: Vec<Block> = h.iter().chain(&probe).copied().collect();
            if corpus.contains(&w) {
                inside.push(SLProduct::new(
                    BlockSeq::prefixed(h.clone(), omega.big_gamma_blocks(which)),
                    0,
                ));
            }
        }
    }
    while inside.len() < samples {
        let q = rng.gen_range(1..100_000usize);
        let which = rng.gen_range(1..=2u8);
        inside.push(SLProduct::new(omega.big_gamma_blocks(which), q * size));
    }
    inside.truncate(samples);
    for prod in &inside {
        report.chains += 1;
        let mut src = omega.expand(prod);
        match preimage_chain(omega, &mut src, depth, prefix_len) {
            Ok(chain) if chain.all_verified() && chain.links.len() == depth => report.chains_verified += 1,
            Ok(_) => report
                .failures
                .push(format!("{}: a link failed verification", prod.describe())),
            Err(e) => report.failures.push(format!("{}: {e}", prod.describe())),
        }
    }
    for _ in 0..samples {
        let q = rng.gen_range(0..100_000usize);
        let ell = rng.gen_range(1..size);
        let which = rng.gen_range(1..=2u8);
        let prod = SLProduct::new(omega.big_gamma_blocks(which), q * size + ell);
        report.outside += 1;
        match steps_to_fixed(omega, &prod, step_bound)? {
            Some(n) => {
                report.outside_reached += 1;
                report.max_steps = report.max_steps.max(n);
            }
            None => report.failures.push(format!(
                "{} did not reach S^ω or L^ω in {step_bound} steps",
                prod.describe()
            )),
        }
    }
    Ok(report)
}
