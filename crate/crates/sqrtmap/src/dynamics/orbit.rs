use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lazy::{detect_period, sqrt_stream, InfiniteWord, SLProduct};
use crate::omega::{Omega, ProductType, SqrtStep};
use crate::sturmian::{log2_rational, Arc, RotationSystem};
use crate::words::{conjugacy_offset, lex_less, Word};

/// What a single step of an orbit turned out to be.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum StepKind {
    /// Structural step on a product of the given type.
    Product(ProductType),
    /// The word is `T^j(S^ω)`.
    Periodic(usize),
    /// Letter-level step with no structure known.
    Letters,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitStep {
    pub index: usize,
    /// First `|S|` letters of `√^index w`.
    pub fingerprint: Word,
    pub kind: StepKind,
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitRecord {
    pub start: String,
    pub steps: Vec<OrbitStep>,
    /// First step at which the word is periodic.
    pub n_periodic: Option<usize>,
    /// First step at which the word is `S^ω` or `L^ω`.
    pub n_fixed: Option<usize>,
    pub period: Option<Word>,
}

impl OrbitRecord {
    fn new(start: String) -> OrbitRecord {
        OrbitRecord {
            start,
            steps: Vec::new(),
            n_periodic: None,
            n_fixed: None,
            period: None,
        }
    }

    fn mark_periodic(&mut self, omega: &Omega, index: usize, offset: usize) {
        if self.n_periodic.is_none() {
            self.n_periodic = Some(index);
            let size = omega.size();
            let letters = (0..size).map(|i| omega.s().at((i + offset) % size)).collect();
            self.period = Some(Word::binary(letters));
        }
        if self.n_fixed.is_none() && omega.is_fixed_offset(offset) {
            self.n_fixed = Some(index);
        }
    }
}

fn fingerprint_of_offset(omega: &Omega, offset: usize) -> Word {
    let size = omega.size();
    Word::binary((0..size).map(|i| omega.s().at((i + offset) % size)).collect())
}

/// Iterates √ structurally on a shifted product for `steps` steps.
pub fn iterate_product(omega: &Omega, prod: &SLProduct, steps: usize) -> Result<OrbitRecord> {
    let mut record = OrbitRecord::new(prod.describe());
    let mut current = Some(prod.clone());
    let mut offset = None;
    for index in 0..=steps {
        if let Some(p) = &current {
            if let Some(j) = omega.periodic_offset(p) {
                offset = Some(j);
                current = None;
            }
        }
        match (&current, offset) {
            (Some(p), _) => {
                let kind = omega.classify_type(p).kind;
                record.steps.push(OrbitStep {
                    index,
                    fingerprint: Word::binary(omega.product_prefix(p, omega.size())),
                    kind: StepKind::Product(kind),
                });
                if index == steps {
                    break;
                }
                match omega.sqrt_product(p)? {
                    SqrtStep::Product { next, .. } => current = Some(next),
                    SqrtStep::Periodic { offset: j, .. } => {
                        current = None;
                        offset = Some(j);
                    }
                }
            }
            (None, Some(j)) => {
                record.mark_periodic(omega, index, j);
                record.steps.push(OrbitStep {
                    index,
                    fingerprint: fingerprint_of_offset(omega, j),
                    kind: StepKind::Periodic(j),
                });
                offset = Some(omega.phase_map()[j]);
            }
            (None, None) => unreachable!("orbit lost both representations"),
        }
    }
    Ok(record)
}

/// Iterates √ on letters, certifying periodicity on a window of
/// `max(6|S|, 3|S|)` letters.
pub fn iterate_letters(omega: &Omega, src: InfiniteWord, steps: usize) -> Result<OrbitRecord> {
    let size = omega.size();
    let window = 6 * size;
    let mut record = OrbitRecord::new(src.descriptor().to_string());
    let mut word = src;
    for index in 0..=steps {
        let fingerprint = word
            .prefix(size)
            .map_err(|e| Error::Poisoned(format!("step {index}: {e}")))?;
        let periodic = detect_period(&mut word, size, window, omega.s())
            .map_err(|e| Error::Poisoned(format!("step {index}: {e}")))?;
        let kind = if periodic {
            let j = conjugacy_offset(omega.s().letters(), fingerprint.letters())
                .expect("certified period is a conjugate of S");
            record.mark_periodic(omega, index, j);
            StepKind::Periodic(j)
        } else {
            StepKind::Letters
        };
        record.steps.push(OrbitStep {
            index,
            fingerprint,
            kind,
        });
        if index < steps {
            word = sqrt_stream(omega.alphabet(), word);
        }
    }
    Ok(record)
}

/// Least `n ≤ cap` with `√^n w ∈ {S^ω, L^ω}`, computed structurally and
/// finished by the phase map once the word is periodic.
pub fn steps_to_fixed(omega: &Omega, prod: &SLProduct, cap: usize) -> Result<Option<usize>> {
    let mut current = prod.clone();
    for step in 0..=cap {
        if let Some(j) = omega.periodic_offset(&current) {
            return Ok(omega.phase_steps(j).map(|n| step + n).filter(|&n| n <= cap));
        }
        if step == cap {
            break;
        }
        match omega.sqrt_product(&current)? {
            SqrtStep::Product { next, .. } => current = next,
            SqrtStep::Periodic { offset, .. } => {
                return Ok(omega.phase_steps(offset).map(|n| step + 1 + n).filter(|&n| n <= cap))
            }
        }
    }
    Ok(None)
}

/// Steps until periodic, and the offset reached, or `None` within `cap`.
pub fn steps_to_periodic(omega: &Omega, prod: &SLProduct, cap: usize) -> Result<Option<(usize, usize)>> {
    let mut current = prod.clone();
    for step in 0..=cap {
        if let Some(j) = omega.periodic_offset(&current) {
            return Ok(Some((step, j)));
        }
        if step == cap {
            break;
        }
        match omega.sqrt_product(&current)? {
            SqrtStep::Product { next, .. } => current = next,
            SqrtStep::Periodic { offset, .. } => return Ok(Some((step + 1, offset))),
        }
    }
    Ok(None)
}

/// The two level-`q` arcs with endpoint `1 - α`: `[S]` on the left, `[L]` on the right.
pub fn pivot_arcs(sys: &RotationSystem) -> (Arc, Arc) {
    let pivot = sys.pivot();
    let arcs = sys.level_intervals(sys.period());
    let left = arcs
        .iter()
        .find(|(arc, _)| arc.end == pivot)
        .expect("pivot is a cut point")
        .0
        .clone();
    let right = arcs
        .iter()
        .find(|(arc, _)| arc.start == pivot)
        .expect("pivot is a cut point")
        .0
        .clone();
    (left, right)
}

/// Least `i` with `ψ^i(ρ)` in one of the two arcs adjacent to `1 - α`.
pub fn psi_steps(sys: &RotationSystem, rho: &BigRational) -> Option<usize> {
    let (left, right) = pivot_arcs(sys);
    let mut point = rho.clone();
    for i in 0..=256 {
        if left.contains(&point) || right.contains(&point) {
            return Some(i);
        }
        point = sys.psi(&point);
    }
    None
}

/// The intercept `j/q` whose coding is `T^offset(S^ω)`.
pub fn intercept_of_offset(omega: &Omega, offset: usize) -> Option<BigRational> {
    omega
        .system()
        .intercept_of_periodic(&fingerprint_of_offset(omega, offset))
}

#[derive(Debug, Clone, Serialize)]
pub struct StepsBound {
    /// `log2((1 - α) / min(|[S]|, |[L]|))`.
    pub estimate: f64,
    pub ceiling: u32,
}

/// Bound on ψ-steps from the arcs of `s` and `l` in `sys`.
pub fn steps_bound(sys: &RotationSystem, s: &Word, l: &Word) -> Result<StepsBound> {
    let arc = |w: &Word| {
        sys.factor_interval(w)
            .ok_or_else(|| Error::Precondition(format!("{w} is not a factor")))
    };
    let shortest = arc(s)?.length().min(arc(l)?.length());
    let ratio = sys.pivot() / shortest;
    let mut ceiling = 0u32;
    let mut power = BigRational::one();
    let two = BigRational::from_integer(BigInt::from(2));
    while power < ratio {
        power *= &two;
        ceiling += 1;
    }
    Ok(StepsBound {
        estimate: log2_rational(&ratio),
        ceiling,
    })
}

/// `log2(F_k + (φ - 1) F_{k-1})` for `F_k = size`, with `F_{k-1}` the preceding
/// Fibonacci number.
pub fn fibonacci_estimate(size: u64) -> Result<f64> {
    let (mut prev, mut cur) = (1u64, 1u64);
    while cur < size {
        (prev, cur) = (cur, prev + cur);
    }
    if cur != size {
        return Err(Error::InvalidParams(format!("{size} is not a Fibonacci number")));
    }
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    Ok((cur as f64 + (phi - 1.0) * prev as f64).log2())
}

/// Two decimals, truncated toward zero.
pub fn truncate2(x: f64) -> String {
    format!("{:.2}", (x * 100.0).floor() / 100.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ordering3 {
    Equal,
    Less,
    Greater,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmbeddingVerdict {
    pub u1: Word,
    pub u2: Word,
    pub order: Ordering3,
    pub violation: bool,
}

fn compare(u: &Word, v: &Word) -> Ordering3 {
    if u == v {
        Ordering3::Equal
    } else if lex_less(u, v).expect("binary words") {
        Ordering3::Less
    } else {
        Ordering3::Greater
    }
}

/// `u1`, `u2` are the length-`|S|` prefixes of `w` and `√w`. If `w` starts with
/// 0 and they differ then `u1 ◁ u2`; if it starts with 1 then `u2 ◁ u1`.
pub fn embedding_check(omega: &Omega, prod: &SLProduct) -> Result<EmbeddingVerdict> {
    let size = omega.size();
    let u1 = Word::binary(omega.product_prefix(prod, size));
    let (mut root, _) = omega.sqrt_of_product(prod)?;
    let u2 = root.prefix(size)?;
    let order = compare(&u1, &u2);
    let violation = match (u1.at(0), order) {
        (_, Ordering3::Equal) => false,
        (0, o) => o != Ordering3::Less,
        (_, o) => o != Ordering3::Greater,
    };
    Ok(EmbeddingVerdict {
        u1,
        u2,
        order,
        violation,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneBranch {
    SecondGreater,
    ThirdGreater,
    PeriodicAfterTwo,
    /// None of the three held: a violation.
    Neither,
}

/// For `w` outside `{S,L}^ω`: `u2` beyond `u1`, `u3` beyond `u1`, or `√²w`
/// periodic, where "beyond" is `▷` for words starting with 0 and `◁` for 1.
pub fn monotone_or_periodic_check(omega: &Omega, prod: &SLProduct) -> Result<MonotoneBranch> {
    let record = iterate_product(omega, prod, 2)?;
    let u: Vec<&Word> = record.steps.iter().map(|s| &s.fingerprint).collect();
    let beyond = |x: &Word| {
        let o = compare(u[0], x);
        if u[0].at(0) == 0 {
            o == Ordering3::Less
        } else {
            o == Ordering3::Greater
        }
    };
    Ok(if beyond(u[1]) {
        MonotoneBranch::SecondGreater
    } else if beyond(u[2]) {
        MonotoneBranch::ThirdGreater
    } else if record.n_periodic.is_some_and(|n| n <= 2) {
        MonotoneBranch::PeriodicAfterTwo
    } else {
        MonotoneBranch::Neither
    })
}
