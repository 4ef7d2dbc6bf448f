use std::sync::atomic::{AtomicU8, AtomicUsize, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::orbit::{intercept_of_offset, psi_steps, steps_to_fixed, steps_to_periodic};
use crate::error::Result;
use crate::lazy::{sqrt_stream, BlockSeq, InfiniteWord, SLProduct};
use crate::omega::Omega;
use crate::sturmian::EndpointConvention;
use crate::words::Block;

/// Search knobs for the steps-to-fixed experiment.
#[derive(Debug, Clone, Serialize)]
pub struct SearchBudget {
    /// Block indices below `depth` are enumerated; later ones come from tails.
    pub depth: usize,
    /// Maximum number of √ steps per word.
    pub cap: usize,
    pub random_tails: usize,
    pub seed: u64,
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget {
            depth: 12,
            cap: 20,
            random_tails: 4,
            seed: 1,
        }
    }
}

/// Where blocks at indices `>= depth` come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "seed")]
pub enum Tail {
    SOmega,
    LOmega,
    Gamma1,
    Gamma2,
    Random(u64),
}

impl Tail {
    pub fn describe(&self) -> String {
        match self {
            Tail::SOmega => "S^ω".into(),
            Tail::LOmega => "L^ω".into(),
            Tail::Gamma1 => "Γ1*".into(),
            Tail::Gamma2 => "Γ2*".into(),
            Tail::Random(s) => format!("random({s})"),
        }
    }

    pub fn blocks(&self, omega: &Omega) -> BlockSeq {
        match self {
            Tail::SOmega => BlockSeq::constant(Block::S),
            Tail::LOmega => BlockSeq::constant(Block::L),
            Tail::Gamma1 => omega.big_gamma_blocks(1),
            Tail::Gamma2 => omega.big_gamma_blocks(2),
            Tail::Random(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                BlockSeq::periodic((0..4099).map(|_| if rng.gen() { Block::L } else { Block::S }).collect())
            }
        }
    }

    pub fn family(budget: &SearchBudget) -> Vec<Tail> {
        let mut tails = vec![Tail::SOmega, Tail::LOmega, Tail::Gamma1, Tail::Gamma2];
        tails.extend((0..budget.random_tails as u64).map(|i| Tail::Random(budget.seed.wrapping_add(i))));
        tails
    }
}

const UNSET: u8 = 0;

/// Shared cells for lazily assigned blocks. Reading an unset cell records
/// the index so the caller can branch on it.
struct Probe {
    cells: Vec<AtomicU8>,
    miss: AtomicUsize,
}

impl Probe {
    fn new(depth: usize) -> Probe {
        Probe {
            cells: (0..depth).map(|_| AtomicU8::new(UNSET)).collect(),
            miss: AtomicUsize::new(usize::MAX),
        }
    }

    fn load(&self, assignment: &[u8]) {
        for (cell, &v) in self.cells.iter().zip(assignment) {
            cell.store(v, Ordering::Relaxed);
        }
        self.miss.store(usize::MAX, Ordering::Relaxed);
    }

    fn take_miss(&self) -> Option<usize> {
        let m = self.miss.swap(usize::MAX, Ordering::Relaxed);
        (m != usize::MAX).then_some(m)
    }
}

fn encode(b: Block) -> u8 {
    match b {
        Block::S => 1,
        Block::L => 2,
    }
}

fn decode(v: u8) -> Option<Block> {
    match v {
        1 => Some(Block::S),
        2 => Some(Block::L),
        _ => None,
    }
}

/// The head of a witness: read blocks as `S`/`L`, unread ones as `?`.
pub fn render_head(assignment: &[u8]) -> String {
    let text: String = assignment
        .iter()
        .map(|&v| decode(v).map_or('?', |b| b.to_string().chars().next().unwrap_or('?')))
        .collect();
    text.trim_end_matches('?').to_string()
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub shift: usize,
    pub head: String,
    pub tail: Tail,
    pub n: usize,
}

impl Witness {
    /// The concrete product, unread head blocks set to `S`.
    pub fn product(&self, omega: &Omega, depth: usize) -> SLProduct {
        let mut head: Vec<Block> = self
            .head
            .chars()
            .map(|c| if c == 'L' { Block::L } else { Block::S })
            .collect();
        head.resize(depth, Block::S);
        let tail = self.tail.blocks(omega).skip(depth);
        SLProduct::new(BlockSeq::prefixed(head, tail), self.shift)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SearchOutcome {
    pub max_n: Option<usize>,
    pub witness: Option<Witness>,
    /// Words examined (leaves of the branching search).
    pub words: usize,
    /// Words that did not reach `S^ω`/`L^ω` within the cap.
    pub unresolved: usize,
    pub errors: Vec<String>,
}

impl SearchOutcome {
    fn merge(mut self, other: SearchOutcome) -> SearchOutcome {
        let better = match (&self.witness, &other.witness) {
            (None, Some(_)) => true,
            (Some(a), Some(b)) => {
                (b.n, std::cmp::Reverse((b.shift, b.head.clone())))
                    > (a.n, std::cmp::Reverse((a.shift, a.head.clone())))
            }
            _ => false,
        };
        if better {
            self.witness = other.witness;
            self.max_n = other.max_n;
        }
        self.words += other.words;
        self.unresolved += other.unresolved;
        self.errors.extend(other.errors);
        self
    }
}

/// Branching search over all head assignments that the orbit of
/// `T^shift(head · tail)` actually reads.
fn search_one(omega: &Omega, shift: usize, tail: &Tail, budget: &SearchBudget) -> SearchOutcome {
    let depth = budget.depth;
    let probe = Arc::new(Probe::new(depth));
    let tail_seq = tail.blocks(omega);
    let constant = tail_seq.constant_tail().map(|(t0, x)| (t0.max(depth), x));
    let reader = {
        let probe = Arc::clone(&probe);
        let tail_seq = tail_seq.clone();
        Arc::new(move |t: usize| {
            if t >= depth {
                return tail_seq.get(t);
            }
            decode(probe.cells[t].load(Ordering::Relaxed)).unwrap_or_else(|| {
                probe.miss.fetch_min(t, Ordering::Relaxed);
                Block::S
            })
        })
    };
    let seq = BlockSeq::oracle(format!("head·{}", tail.describe()), reader, constant);
    let prod = SLProduct::new(seq, shift);
    let mut outcome = SearchOutcome::default();
    let mut stack = vec![vec![UNSET; depth]];
    while let Some(assignment) = stack.pop() {
        probe.load(&assignment);
        let result = steps_to_fixed(omega, &prod, budget.cap);
        if let Some(i) = probe.take_miss() {
            for b in [Block::L, Block::S] {
                let mut next = assignment.clone();
                next[i] = encode(b);
                stack.push(next);
            }
            continue;
        }
        outcome.words += 1;
        match result {
            Ok(Some(n)) => {
                if outcome.max_n.is_none_or(|m| n > m) {
                    outcome.max_n = Some(n);
                    outcome.witness = Some(Witness {
                        shift,
                        head: render_head(&assignment),
                        tail: tail.clone(),
                        n,
                    });
                }
            }
            Ok(None) => outcome.unresolved += 1,
            Err(e) => outcome.errors.push(format!(
                "shift {shift}, head {}, tail {}: {e}",
                render_head(&assignment),
                tail.describe()
            )),
        }
    }
    outcome
}

/// Maximum of steps-to-fixed over shifts `1..|S|` and all enumerated heads and tails.
pub fn max_steps_to_fixed(omega: &Omega, budget: &SearchBudget) -> SearchOutcome {
    let tails = Tail::family(budget);
    let jobs: Vec<(usize, &Tail)> = (1..omega.size())
        .flat_map(|shift| tails.iter().map(move |t| (shift, t)))
        .collect();
    jobs.par_iter()
        .map(|&(shift, tail)| search_one(omega, shift, tail, budget))
        .reduce(SearchOutcome::default, SearchOutcome::merge)
}

/// Letter-level recount: steps until a `6|S|`-letter window equals that of `S^ω` or `L^ω`.
pub fn letter_steps_to_fixed(omega: &Omega, src: InfiniteWord, cap: usize) -> Result<Option<usize>> {
    let window = 6 * omega.size();
    let s_window = omega.s().power(7).prefix(window);
    let l_window = omega.l().power(7).prefix(window);
    let mut word = src;
    for step in 0..=cap {
        let prefix = word.prefix(window)?;
        if prefix == s_window || prefix == l_window {
            return Ok(Some(step));
        }
        word = sqrt_stream(omega.alphabet(), word);
    }
    Ok(None)
}

/// Steps to fixed for a product, finishing with ψ under `convention` once periodic.
pub fn psi_steps_to_fixed(
    omega: &Omega,
    prod: &SLProduct,
    cap: usize,
    convention: EndpointConvention,
) -> Result<Option<usize>> {
    let Some((n, offset)) = steps_to_periodic(omega, prod, cap)? else {
        return Ok(None);
    };
    let Some(rho) = intercept_of_offset(omega, offset) else {
        return Ok(None);
    };
    let sys = omega.system().with_convention(convention);
    // The intercept is a left endpoint; under the right-closed convention the
    // same coding belongs to the arc ending one step later.
    let rho = match convention {
        EndpointConvention::LeftClosed => rho,
        EndpointConvention::RightClosed => {
            let q = omega.system().period() as i64;
            crate::sturmian::frac(&(rho + crate::sturmian::rational(1, q)))
        }
    };
    Ok(psi_steps(&sys, &rho).map(|k| n + k))
}

/// Published steps-to-fixed values for reversed Fibonacci words.
pub fn table1_reference(size: usize) -> Option<usize> {
    match size {
        8 => Some(3),
        13 | 21 => Some(4),
        34 => Some(5),
        55 | 89 => Some(6),
        _ => None,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Table1Row {
    pub size: usize,
    pub n: Option<usize>,
    pub paper_n: Option<usize>,
    pub words: usize,
    pub unresolved: usize,
    pub errors: Vec<String>,
    pub witness: Option<Witness>,
    /// Witness recount on letters with sqrt_stream.
    pub letter_n: Option<usize>,
    /// Witness recount with ψ under the default and the alternate convention.
    pub psi_n: Option<usize>,
    pub alternate_psi_n: Option<usize>,
    pub convention: EndpointConvention,
    pub status: String,
}

pub fn table1_row(size: usize, budget: &SearchBudget, convention: EndpointConvention) -> Result<Table1Row> {
    let params = crate::omega::OmegaParams::fibonacci(size)?;
    let omega = Omega::with_convention(params, convention)?;
    let outcome = max_steps_to_fixed(&omega, budget);
    let (mut letter_n, mut psi_n, mut alternate_psi_n) = (None, None, None);
    if let Some(w) = &outcome.witness {
        let prod = w.product(&omega, budget.depth);
        letter_n = letter_steps_to_fixed(&omega, omega.expand(&prod), budget.cap)?;
        psi_n = psi_steps_to_fixed(&omega, &prod, budget.cap, convention)?;
        alternate_psi_n = psi_steps_to_fixed(&omega, &prod, budget.cap, convention.other())?;
    }
    let paper_n = table1_reference(size);
    let consistent = outcome.max_n.is_some() && letter_n == outcome.max_n && psi_n == outcome.max_n;
    let status = if paper_n.is_some() && outcome.max_n == paper_n && consistent && outcome.errors.is_empty() {
        "PASS"
    } else {
        "FAIL"
    };
    Ok(Table1Row {
        size,
        n: outcome.max_n,
        paper_n,
        words: outcome.words,
        unresolved: outcome.unresolved,
        errors: outcome.errors,
        witness: outcome.witness,
        letter_n,
        psi_n,
        alternate_psi_n,
        convention,
        status: status.into(),
    })
}

pub fn table1_experiment(
    sizes: &[usize],
    budget: &SearchBudget,
    convention: EndpointConvention,
) -> Result<Vec<Table1Row>> {
    sizes.iter().map(|&s| table1_row(s, budget, convention)).collect()
}
