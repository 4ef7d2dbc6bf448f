use std::collections::{BTreeSet, HashMap};

use num_integer::Integer;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lazy::{BlockSeq, SLProduct};
use crate::omega::{BlockCorpus, Omega, ProductType, SqrtStep, SubsetIndex};
use crate::words::Block;

use super::orbit::steps_to_fixed;

/// A point of an orbit computed block-structurally: either a shifted product
/// or `T^j(S^ω)`.
#[derive(Debug, Clone)]
pub enum OrbitState {
    Product(SLProduct),
    Periodic(usize),
}

impl OrbitState {
    pub fn of(omega: &Omega, prod: &SLProduct) -> OrbitState {
        match omega.periodic_offset(prod) {
            Some(j) => OrbitState::Periodic(j),
            None => OrbitState::Product(prod.clone()),
        }
    }

    pub fn sqrt(&self, omega: &Omega) -> Result<OrbitState> {
        match self {
            OrbitState::Periodic(j) => Ok(OrbitState::Periodic(omega.phase_map()[*j])),
            OrbitState::Product(p) => match omega.sqrt_product(p)? {
                SqrtStep::Product { next, .. } => Ok(OrbitState::of(omega, &next)),
                SqrtStep::Periodic { offset, .. } => Ok(OrbitState::Periodic(offset)),
            },
        }
    }

    pub fn prefix(&self, omega: &Omega, n: usize) -> Vec<u8> {
        match self {
            OrbitState::Product(p) => omega.product_prefix(p, n),
            OrbitState::Periodic(j) => {
                let size = omega.size();
                (0..n).map(|i| omega.s().at((i + j) % size)).collect()
            }
        }
    }
}

/// A candidate that survived refutation.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodicPoint {
    /// `Gamma1`, `Gamma2`, `S^ω` or `L^ω` when the prefix matches one of them.
    pub name: Option<String>,
    pub descriptor: String,
    /// Least `n ≥ 1` with `√^n w` agreeing with `w` on the compared prefix.
    pub period: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodicSearch {
    pub max_blocks: usize,
    pub depth: usize,
    pub step_cap: usize,
    /// Candidates in Ω that were iterated.
    pub candidates: usize,
    /// Enumerated words rejected because their blocks leave the language of Ω*.
    pub filtered: usize,
    pub refuted: usize,
    pub errors: Vec<String>,
    /// Survivors, one per distinct prefix.
    pub points: Vec<PeriodicPoint>,
}

impl PeriodicSearch {
    pub fn names(&self) -> BTreeSet<String> {
        self.points
            .iter()
            .map(|p| p.name.clone().unwrap_or_else(|| p.descriptor.clone()))
            .collect()
    }

    /// True when the survivors are exactly Γ₁, Γ₂, `S^ω` and `L^ω`.
    pub fn matches_expected_set(&self) -> bool {
        let expected: BTreeSet<String> = ["Gamma1", "Gamma2", "L^ω", "S^ω"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        self.errors.is_empty() && self.points.len() == 4 && self.names() == expected
    }
}

/// Primitive words over `{S, L}` of length `n`, one per conjugacy class.
fn lyndon_words(n: usize) -> Vec<Vec<Block>> {
    (0..1u32 << n)
        .map(|bits| {
            (0..n)
                .map(|i| Block::from_letter(((bits >> (n - 1 - i)) & 1) as u8))
                .collect::<Vec<_>>()
        })
        .filter(|w| {
            (1..n).all(|r| {
                let rot: Vec<Block> = w[r..].iter().chain(&w[..r]).copied().collect();
                *w < rot
            })
        })
        .collect()
}

fn all_words(n: usize) -> impl Iterator<Item = Vec<Block>> {
    (0..1u32 << n).map(move |bits| {
        (0..n)
            .map(|i| Block::from_letter(((bits >> (n - 1 - i)) & 1) as u8))
            .collect()
    })
}

/// Searches for periodic points of √ in Ω among words built from short block
/// windows, and refutes every candidate whose first `depth` letters never
/// return within `step_cap` iterations.
///
/// Candidates: all `T^j(S^ω)`; `T^ℓ(Γ_i)` for `ℓ < max_blocks·|S|`; shifted
/// left extensions `h·Γ_i` with `|h| ≤ max_blocks`; shifted block-periodic
/// words `f^ω` with `|f| ≤ max_blocks`; and eventually constant words `h·x^ω`.
/// Block windows are kept only if they occur in Γ₁*.
pub fn periodic_point_search(omega: &Omega, max_blocks: usize, depth: usize, step_cap: usize) -> PeriodicSearch {
    let size = omega.size();
    let c = omega.params().c;
    let corpus = BlockCorpus::for_factor_length(c, (4 * c + 2) * max_blocks.max(1) + 64);
    let mut candidates: Vec<(String, OrbitState)> = Vec::new();
    let mut filtered = 0;

    for j in 0..size {
        candidates.push((format!("T^{j}(S^ω)"), OrbitState::Periodic(j)));
    }
    for which in [1u8, 2] {
        let gamma = omega.big_gamma_blocks(which);
        for ell in 0..max_blocks * size {
            let prod = SLProduct::new(gamma.clone(), ell);
            candidates.push((format!("T^{ell}(Γ{which})"), OrbitState::of(omega, &prod)));
        }
        let probe = gamma.take(64);
        for n in 1..=max_blocks {
            for head in all_words(n) {
                let window: Vec<Block> = head.iter().chain(&probe).copied().collect();
                if !corpus.contains(&window) {
                    filtered += 1;
                    continue;
                }
                for ell in 0..size {
                    let prod = SLProduct::new(BlockSeq::prefixed(head.clone(), gamma.clone()), ell);
                    let name = format!("T^{ell}({}·Γ{which})", crate::words::Word::blocks(&head));
                    candidates.push((name, OrbitState::of(omega, &prod)));
                }
            }
        }
    }
    for n in 1..=max_blocks {
        for f in lyndon_words(n) {
            let power: Vec<Block> = f.iter().copied().cycle().take(f.len() * (4 * c + 2)).collect();
            if n > 1 && !corpus.contains(&power) {
                filtered += 1;
                continue;
            }
            for ell in 0..n * size {
                let prod = SLProduct::new(BlockSeq::periodic(f.clone()), ell);
                let name = format!("T^{ell}(({})^ω)", crate::words::Word::blocks(&f));
                candidates.push((name, OrbitState::of(omega, &prod)));
            }
        }
    }
    for n in 1..=max_blocks {
        for head in all_words(n) {
            for x in [Block::S, Block::L] {
                if head.last() == Some(&x) {
                    continue;
                }
                let window: Vec<Block> = head.iter().copied().chain(std::iter::repeat_n(x, 4 * c + 2)).collect();
                if !corpus.contains(&window) {
                    filtered += 1;
                    continue;
                }
                let prod = SLProduct::new(BlockSeq::prefixed(head.clone(), BlockSeq::constant(x)), 0);
                candidates.push((prod.describe(), OrbitState::of(omega, &prod)));
            }
        }
    }

    let references: Vec<(String, Vec<u8>)> = vec![
        (
            "Gamma1".into(),
            OrbitState::of(omega, &SLProduct::new(omega.big_gamma_blocks(1), 0)).prefix(omega, depth),
        ),
        (
            "Gamma2".into(),
            OrbitState::of(omega, &SLProduct::new(omega.big_gamma_blocks(2), 0)).prefix(omega, depth),
        ),
        ("S^ω".into(), OrbitState::Periodic(0).prefix(omega, depth)),
        (
            "L^ω".into(),
            OrbitState::Periodic(omega.l_offset()).prefix(omega, depth),
        ),
    ];

    let mut search = PeriodicSearch {
        max_blocks,
        depth,
        step_cap,
        candidates: candidates.len(),
        filtered,
        refuted: 0,
        errors: Vec::new(),
        points: Vec::new(),
    };
    let mut seen: HashMap<Vec<u8>, usize> = HashMap::new();
    for (descriptor, start) in candidates {
        let target = start.prefix(omega, depth);
        let mut state = start;
        let mut period = None;
        for n in 1..=step_cap {
            state = match state.sqrt(omega) {
                Ok(s) => s,
                Err(e) => {
                    search.errors.push(format!("{descriptor}: {e}"));
                    break;
                }
            };
            if state.prefix(omega, depth) == target {
                period = Some(n);
                break;
            }
        }
        match period {
            None => search.refuted += 1,
            Some(period) => {
                if seen.contains_key(&target) {
                    continue;
                }
                seen.insert(target.clone(), search.points.len());
                let name = references.iter().find(|(_, p)| *p == target).map(|(n, _)| n.clone());
                search.points.push(PeriodicPoint {
                    name,
                    descriptor,
                    period,
                });
            }
        }
    }
    search
}

/// Compared prefix length `4|γ_3|`. Left extensions `τ^k(x)·Γ_i` follow a
/// doubling-pattern word outside Ω for a long stretch, so shorter prefixes
/// can leave them unrefuted.
pub fn default_periodic_depth(omega: &Omega) -> usize {
    4 * omega.gamma(3).0.len()
}

/// Minimal period of `t ↦ (2^t - 1)·k mod modulus` for odd `modulus`.
pub fn doubling_period(k: u64, modulus: u64) -> Result<u64> {
    if modulus < 2 || modulus.is_multiple_of(2) {
        return Err(Error::Precondition(format!("modulus {modulus} must be odd and > 1")));
    }
    if k == 0 || k >= modulus {
        return Err(Error::Precondition(format!("need 0 < k < {modulus}, got {k}")));
    }
    // d_{t+p} - d_t = 2^t (2^p - 1) k, and 2 is a unit, so p is the order of 2
    // modulo modulus / gcd(k, modulus).
    let reduced = modulus / k.gcd(&modulus);
    Ok(multiplicative_order_of_two(reduced))
}

fn multiplicative_order_of_two(modulus: u64) -> u64 {
    let mut x = 2 % modulus;
    let mut p = 1;
    while x != 1 % modulus {
        x = x * 2 % modulus;
        p += 1;
    }
    p
}

#[derive(Debug, Clone, Serialize)]
pub struct DoublingClaimReport {
    pub c: usize,
    pub max_level: u32,
    pub pairs_checked: u64,
    /// `(i, k_i, k_{i+1}, p_i, p_{i+1})` with `p_{i+1} ≤ p_i`.
    pub violations: Vec<(u32, u64, u64, u64, u64)>,
}

/// Checks `p_i < p_{i+1}` for every `0 < k_i < m^i` and every lift
/// `k_{i+1} ≡ k_i (mod m^i)`, `m = 2c + 1`, for levels `1 ≤ i < max_level`.
pub fn doubling_claim_check(c: usize, max_level: u32) -> Result<DoublingClaimReport> {
    let m = 2 * c as u64 + 1;
    let mut report = DoublingClaimReport {
        c,
        max_level,
        pairs_checked: 0,
        violations: Vec::new(),
    };
    let mut cache: HashMap<(u64, u64), u64> = HashMap::new();
    let mut period = |k: u64, modulus: u64| -> Result<u64> {
        let key = (k.gcd(&modulus), modulus);
        if let Some(&p) = cache.get(&key) {
            return Ok(p);
        }
        let p = doubling_period(k, modulus)?;
        cache.insert(key, p);
        Ok(p)
    };
    for i in 1..max_level {
        let lower = m.pow(i);
        let upper = lower * m;
        for k in 1..lower {
            let p = period(k, lower)?;
            for lift in 0..m {
                let k_next = k + lift * lower;
                let q = period(k_next, upper)?;
                report.pairs_checked += 1;
                if q <= p {
                    report.violations.push((i, k, k_next, p, q));
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AsymptoticClass {
    PeriodicPoint,
    ToSOrL,
    AperiodicNonasymptotic,
}

/// Classifies a word of Ω by its long-term behaviour under √. Words outside
/// Ω_S are followed until they reach `S^ω` or `L^ω` (at most `cap` steps);
/// words of Ω_S are placed by their alignment depth, checked to `levels`.
pub fn asymptotic_class(omega: &Omega, prod: &SLProduct, cap: usize, levels: usize) -> Result<AsymptoticClass> {
    if let Some(j) = omega.periodic_offset(prod) {
        return Ok(if omega.is_fixed_offset(j) {
            AsymptoticClass::PeriodicPoint
        } else {
            AsymptoticClass::ToSOrL
        });
    }
    let mut src = omega.expand(prod);
    match omega.invariant_subset_index(&mut src, levels)? {
        SubsetIndex::FixedPoint => Ok(AsymptoticClass::PeriodicPoint),
        SubsetIndex::Level(_) => Ok(AsymptoticClass::AperiodicNonasymptotic),
        SubsetIndex::NotInOmegaS => match steps_to_fixed(omega, prod, cap)? {
            Some(_) => Ok(AsymptoticClass::ToSOrL),
            None => Err(Error::Budget(format!(
                "{} did not reach S^ω or L^ω within {cap} steps",
                prod.describe()
            ))),
        },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SqrtImageCount {
    pub size: usize,
    pub window_blocks: usize,
    pub type_d_words: usize,
    /// Distinct offsets `j` with `T^j(S^ω)` the root of a type-D word.
    pub offsets: Vec<usize>,
}

impl SqrtImageCount {
    pub fn count(&self) -> usize {
        self.offsets.len()
    }

    /// Whether the count is one of `⌊|S|/2⌋`, `|S|/2`, `⌈|S|/2⌉` up to the
    /// parity of `|S|`, the pattern reported for small cases.
    pub fn matches_half_size(&self) -> bool {
        let n = self.count();
        let s = self.size;
        2 * n == s || 2 * n + 1 == s || 2 * n == s + 1
    }
}

/// Roots of type-D words `T^ℓ(σ(x))` where `x` starts with a factor of Γ₁*
/// of length `window_blocks`. A window of 0 blocks enumerates nothing.
pub fn count_sqrt_omega_minus_omega_a(omega: &Omega, window_blocks: usize) -> Result<SqrtImageCount> {
    let size = omega.size();
    let mut offsets = BTreeSet::new();
    let mut type_d_words = 0;
    if window_blocks > 0 {
        let corpus = BlockCorpus::for_factor_length(omega.params().c, window_blocks);
        let tail = omega.big_gamma_blocks(1);
        for head in corpus.factors(window_blocks) {
            for ell in 1..size {
                let prod = SLProduct::new(BlockSeq::prefixed(head.clone(), tail.clone()), ell);
                if omega.classify_type(&prod).kind != ProductType::D {
                    continue;
                }
                type_d_words += 1;
                if let SqrtStep::Periodic { offset, .. } = omega.sqrt_product(&prod)? {
                    offsets.insert(offset);
                }
            }
        }
    }
    Ok(SqrtImageCount {
        size,
        window_blocks,
        type_d_words,
        offsets: offsets.into_iter().collect(),
    })
}
