//! Solutions of the word equation `X₁²X₂²···X_n² = (X₁X₂···X_n)²` over the
//! minimal roots, squares in the block language, and substitutions built from
//! the orbits of doubling modulo an odd number.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lazy::{sqrt_stream, BlockSeq, InfiniteWord, SLProduct};
use crate::omega::{tau, BlockCorpus, Omega};
use crate::squares::{root_name, SquareAlphabet};
use crate::sturmian::reversed_standard_word;
use crate::words::{conjugates, is_conjugate, is_primitive, swap_first_two, Block, Word};

/// A factorization of `word` into minimal roots whose squares tokenize `word²`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SolutionCertificate {
    pub word: Word,
    /// Root names, `S1` to `S6`.
    pub roots: Vec<String>,
    /// Independently re-checked: the tokenizer applied to `word²` returns these roots.
    pub verified: bool,
}

/// Searches all factorizations of `w` into minimal roots for one whose
/// squares concatenate to `w²`.
///
/// The squares must spell a prefix of `w²` at every step, so the search state
/// is the position in `w` alone and dead positions are memoized.
pub fn is_solution(alphabet: &SquareAlphabet, w: &[u8]) -> Option<SolutionCertificate> {
    if w.is_empty() {
        return None;
    }
    let ww = w.repeat(2);
    let mut dead = vec![false; w.len()];
    let mut roots = Vec::new();
    if !search(alphabet, w, &ww, 0, &mut dead, &mut roots) {
        return None;
    }
    let verified = alphabet.factorize(&ww).is_ok_and(|t| t == roots) && alphabet.concat_roots(&roots) == w;
    Some(SolutionCertificate {
        word: Word::binary(w.to_vec()),
        roots: roots.iter().map(|&i| root_name(i)).collect(),
        verified,
    })
}

fn search(
    alphabet: &SquareAlphabet,
    w: &[u8],
    ww: &[u8],
    pos: usize,
    dead: &mut [bool],
    roots: &mut Vec<usize>,
) -> bool {
    if pos == w.len() {
        return true;
    }
    if dead[pos] {
        return false;
    }
    for i in 0..6 {
        let root = alphabet.root_letters(i);
        if !w[pos..].starts_with(root) || !ww[2 * pos..].starts_with(&alphabet.square(i)) {
            continue;
        }
        roots.push(i);
        if search(alphabet, w, ww, pos + root.len(), dead, roots) {
            return true;
        }
        roots.pop();
    }
    dead[pos] = true;
    false
}

#[derive(Debug, Clone, Serialize)]
pub struct StandardSolutionRow {
    pub k: usize,
    pub word: Word,
    pub swapped: Word,
    pub word_solves: bool,
    pub swapped_solves: bool,
    pub primitive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct StandardSolutionReport {
    pub a: usize,
    pub b: usize,
    pub rows: Vec<StandardSolutionRow>,
}

impl StandardSolutionReport {
    pub fn all_hold(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.word_solves && r.swapped_solves && r.primitive)
    }
}

/// Checks that the reversed standard word `s̄_k` for the directive
/// `(a, b + 1, tail...)` and its first-two-letters swap are primitive
/// solutions for `2 ≤ k ≤ kmax`. Below `k = 2` the words have fewer than two
/// letters to swap.
pub fn verify_standard_solutions(a: usize, b: usize, tail: &[u64], kmax: usize) -> Result<StandardSolutionReport> {
    let alphabet = SquareAlphabet::new(a, b)?;
    let directive: Vec<u64> = (1..=kmax)
        .map(|i| match i {
            1 => a as u64,
            2 => b as u64 + 1,
            _ => tail.get(i - 3).copied().unwrap_or(1),
        })
        .collect();
    let mut rows = Vec::new();
    for k in 2..=kmax {
        let word = reversed_standard_word(&directive, k as i64)?;
        let swapped = swap_first_two(&word)?;
        rows.push(StandardSolutionRow {
            k,
            word_solves: is_solution(&alphabet, word.letters()).is_some(),
            swapped_solves: is_solution(&alphabet, swapped.letters()).is_some(),
            primitive: is_primitive(&word)? && is_primitive(&swapped)?,
            word,
            swapped,
        });
    }
    Ok(StandardSolutionReport { a, b, rows })
}

#[derive(Debug, Clone, Serialize)]
pub struct SolutionEnumeration {
    pub size: usize,
    pub max_root: usize,
    pub corpus_len: usize,
    /// Distinct roots `u` with `u²` a factor, before the solution test.
    pub squares_seen: usize,
    pub solutions: Vec<SolutionCertificate>,
    /// Primitive solutions of length at least 2|S|.
    pub long_primitive: Vec<Word>,
    /// The subset of `long_primitive` that is not some `γ_k`.
    pub long_not_gamma: Vec<Word>,
}

impl SolutionEnumeration {
    pub fn contains(&self, word: &[u8]) -> bool {
        self.solutions.iter().any(|c| c.word.letters() == word)
    }
}

/// Roots `u` with `|u| ≤ max_root` and `u²` a factor of `text`.
fn square_roots_in(text: &[u8], max_root: usize) -> BTreeSet<Vec<u8>> {
    (1..=max_root)
        .into_par_iter()
        .map(|m| {
            let mut found = BTreeSet::new();
            if text.len() >= 2 * m {
                for p in 0..=text.len() - 2 * m {
                    if text[p..p + m] == text[p + m..p + 2 * m] {
                        found.insert(text[p..p + m].to_vec());
                    }
                }
            }
            found
        })
        .reduce(BTreeSet::new, |mut x, y| {
            x.extend(y);
            x
        })
}

/// Finds every solution `u` with `|u| ≤ max_root` whose square is a factor of
/// Ω. Factors come from the first `corpus_len` letters of Γ₁ and from `S^ω`,
/// whose shifts make up the periodic part.
pub fn enumerate_solutions(omega: &Omega, max_root: usize, corpus_len: usize) -> Result<SolutionEnumeration> {
    let size = omega.size();
    let corpus_len = corpus_len.max(2 * max_root);
    let gamma = omega.big_gamma(1).letters(corpus_len)?.to_vec();
    let periodic = omega.s().power(2 * max_root / size + 2);
    let mut roots = square_roots_in(&gamma, max_root);
    roots.extend(square_roots_in(periodic.letters(), max_root));
    let alphabet = omega.alphabet();
    let mut solutions: Vec<SolutionCertificate> = roots.par_iter().filter_map(|u| is_solution(alphabet, u)).collect();
    solutions.sort();

    let mut gammas = Vec::new();
    for k in 1.. {
        let g = omega.gamma(k).0;
        if g.len() > max_root {
            break;
        }
        gammas.push(g);
    }
    let mut long_primitive = Vec::new();
    let mut long_not_gamma = Vec::new();
    for c in &solutions {
        if c.word.len() >= 2 * size && is_primitive(&c.word)? {
            long_primitive.push(c.word.clone());
            if !gammas.contains(&c.word) {
                long_not_gamma.push(c.word.clone());
            }
        }
    }
    Ok(SolutionEnumeration {
        size,
        max_root,
        corpus_len,
        squares_seen: roots.len(),
        solutions,
        long_primitive,
        long_not_gamma,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugateAudit {
    pub word: Word,
    pub rotations_tested: usize,
    /// Rotations of `word` (itself included) that are solutions.
    pub solving_rotations: Vec<Word>,
    /// The expected set: `{S, L}` for `S` or `L`, otherwise `{word}`.
    pub expected: Vec<Word>,
}

impl ConjugateAudit {
    pub fn passes(&self) -> bool {
        self.solving_rotations == self.expected
    }
}

/// Tests every rotation of a primitive solution that is a product of `S` and `L`.
pub fn conjugate_solution_audit(omega: &Omega, u: &Word) -> Result<ConjugateAudit> {
    let size = omega.size();
    if u.is_empty() || !u.len().is_multiple_of(size) {
        return Err(Error::Precondition(format!(
            "length {} is not a multiple of |S| = {size}",
            u.len()
        )));
    }
    for chunk in u.letters().chunks(size) {
        if chunk != omega.s().letters() && chunk != omega.l().letters() {
            return Err(Error::Precondition("word is not a product of S and L".into()));
        }
    }
    if !is_primitive(u)? {
        return Err(Error::Precondition("word is not primitive".into()));
    }
    let alphabet = omega.alphabet();
    if is_solution(alphabet, u.letters()).is_none() {
        return Err(Error::Precondition("word is not a solution".into()));
    }
    let rotations = conjugates(u)?;
    let solving: BTreeSet<Word> = rotations
        .par_iter()
        .filter(|r| is_solution(alphabet, r.letters()).is_some())
        .cloned()
        .collect();
    let expected: BTreeSet<Word> = if u == omega.s() || u == omega.l() {
        [omega.s().clone(), omega.l().clone()].into()
    } else {
        [u.clone()].into()
    };
    Ok(ConjugateAudit {
        word: u.clone(),
        rotations_tested: rotations.len(),
        solving_rotations: solving.into_iter().collect(),
        expected: expected.into_iter().collect(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BlockSquareReport {
    pub c: usize,
    pub max_root: usize,
    /// Primitive roots of squares found in Γ₁*, as `S`/`L` words.
    pub roots: Vec<Word>,
    /// Roots not conjugate to any `τ^k(S)`.
    pub unexplained: Vec<Word>,
    /// `τ^k(S)` with `2(2c+1)^k ≤ max_root` that never occur as a root.
    pub missing: Vec<Word>,
}

impl BlockSquareReport {
    pub fn passes(&self) -> bool {
        self.unexplained.is_empty() && self.missing.is_empty()
    }
}

/// Scans the block language of Ω* for squares `u²` with `u` primitive and
/// `|u| ≤ max_root`, and compares the roots with the conjugacy classes of `τ^k(S)`.
pub fn squares_in_omega_star(c: usize, max_root: usize) -> Result<BlockSquareReport> {
    if c == 0 {
        return Err(Error::InvalidParams("c must be at least 1".into()));
    }
    let corpus = BlockCorpus::for_factor_length(c, 2 * max_root);
    let text: Vec<u8> = corpus.blocks().iter().map(|b| b.as_letter()).collect();
    let mut powers = vec![vec![Block::S]];
    while powers.last().map_or(0, Vec::len) * (2 * c + 1) <= max_root {
        let next = tau(c, powers.last().expect("nonempty"));
        powers.push(next);
    }
    let powers: Vec<Word> = powers.iter().map(|p| Word::blocks(p)).collect();
    let mut roots = Vec::new();
    let mut unexplained = Vec::new();
    for r in square_roots_in(&text, max_root) {
        let w = Word::blocks(&r.iter().map(|&x| Block::from_letter(x)).collect::<Vec<_>>());
        if !is_primitive(&w)? {
            continue;
        }
        if !powers.iter().any(|p| is_conjugate(p, &w)) {
            unexplained.push(w.clone());
        }
        roots.push(w);
    }
    let missing = powers
        .iter()
        .filter(|p| 2 * p.len() <= max_root && !roots.contains(p))
        .cloned()
        .collect();
    Ok(BlockSquareReport {
        c,
        max_root,
        roots,
        unexplained,
        missing,
    })
}

/// The orbits of `i ↦ 2i mod n` on `Z_n`, for odd `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DoublingPattern {
    pub n: usize,
    /// Each orbit sorted, orbits ordered by least element.
    pub orbits: Vec<Vec<usize>>,
}

impl DoublingPattern {
    /// The word `u` with `u[i]` the letter of the orbit of `i`.
    pub fn word(&self, assignment: &[Block]) -> Result<Vec<Block>> {
        if assignment.len() != self.orbits.len() {
            return Err(Error::Precondition(format!(
                "{} letters for {} orbits",
                assignment.len(),
                self.orbits.len()
            )));
        }
        let mut u = vec![Block::S; self.n];
        for (orbit, &x) in self.orbits.iter().zip(assignment) {
            for &i in orbit {
                u[i] = x;
            }
        }
        Ok(u)
    }

    /// All `2^orbits` assignments, in binary counting order with `S` as 0.
    pub fn assignments(&self) -> Vec<Vec<Block>> {
        let m = self.orbits.len();
        (0..1u64 << m)
            .map(|bits| {
                (0..m)
                    .map(|t| {
                        if bits >> (m - 1 - t) & 1 == 1 {
                            Block::L
                        } else {
                            Block::S
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Renders as `{0} {1,2,4} {3,5,6}`.
    pub fn render(&self) -> String {
        self.orbits
            .iter()
            .map(|o| format!("{{{}}}", o.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn doubling_orbits(n: usize) -> Result<DoublingPattern> {
    if n == 0 || n.is_multiple_of(2) {
        return Err(Error::Precondition(format!("modulus {n} must be odd and positive")));
    }
    let mut seen = vec![false; n];
    let mut orbits = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            orbit.push(i);
            i = 2 * i % n;
        }
        orbit.sort_unstable();
        orbits.push(orbit);
    }
    Ok(DoublingPattern { n, orbits })
}

/// The substitution read off a pattern: positions `1..n` follow the orbit
/// letters; the image of `S` starts with `L` and the image of `L` with `S`,
/// as `τ` does for `n = 3`. The letter assigned to the orbit `{0}` is ignored.
pub fn pattern_to_substitution(pattern: &DoublingPattern, assignment: &[Block]) -> Result<(Vec<Block>, Vec<Block>)> {
    let u = pattern.word(assignment)?;
    let mut s_image = u.clone();
    let mut l_image = u;
    s_image[0] = Block::L;
    l_image[0] = Block::S;
    Ok((s_image, l_image))
}

/// Whether `u[i] = u[2i mod |u|]` for every `i`.
pub fn satisfies_doubling(u: &[Block]) -> bool {
    let n = u.len();
    (0..n).all(|i| u[i] == u[2 * i % n])
}

/// Checks that `σ(u^ω)` agrees with its square root on the first `depth`
/// letters. A word that cannot be tokenized that far counts as not fixed.
pub fn check_self_sqrt(omega: &Omega, u: &[Block], depth: usize) -> Result<bool> {
    if u.len().is_multiple_of(2) {
        return Err(Error::Precondition(format!("period {} must be odd", u.len())));
    }
    let prod = SLProduct::new(BlockSeq::periodic(u.to_vec()), 0);
    let mut word = omega.expand(&prod);
    let expected = word.letters(depth)?.to_vec();
    let mut root: InfiniteWord = sqrt_stream(omega.alphabet(), omega.expand(&prod));
    Ok(root.letters(depth).is_ok_and(|r| r == expected.as_slice()))
}

/// `3|σ(u)|`, the default depth for [`check_self_sqrt`].
pub fn default_self_sqrt_depth(omega: &Omega, u: &[Block]) -> usize {
    3 * u.len() * omega.size()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::OmegaParams;
    use proptest::prelude::*;

    fn bits(s: &str) -> Vec<u8> {
        s.bytes().map(|c| c - b'0').collect()
    }

    fn blocks(s: &str) -> Vec<Block> {
        s.chars().map(|c| Block::from_char(c).unwrap()).collect()
    }

    fn fib8() -> Omega {
        Omega::new(OmegaParams::new(1, 0, 1).unwrap()).unwrap()
    }

    /// Solutions by definition: the unique square tokenization of `w²`
    /// must have roots spelling `w`.
    fn solves_by_definition(alphabet: &SquareAlphabet, w: &[u8]) -> bool {
        match alphabet.factorize(&w.repeat(2)) {
            Ok(roots) => alphabet.concat_roots(&roots) == w,
            Err(_) => false,
        }
    }

    #[test]
    fn small_certificates() {
        let x = SquareAlphabet::new(1, 0).unwrap();
        let cert = is_solution(&x, &bits("01010")).unwrap();
        assert_eq!(cert.roots, ["S2", "S1", "S4"]);
        assert!(cert.verified);
        assert_eq!(is_solution(&x, &bits("0")).unwrap().roots, ["S1"]);
        assert!(is_solution(&x, &bits("1001001010010")).is_some());
        assert!(is_solution(&x, &bits("11")).is_none());
        assert!(is_solution(&x, &[]).is_none());
    }

    #[test]
    fn reversed_standard_words_solve() {
        let fib = verify_standard_solutions(1, 0, &[], 10).unwrap();
        assert!(
            fib.all_hold(),
            "{:?}",
            fib.rows
                .iter()
                .filter(|r| !(r.word_solves && r.swapped_solves))
                .collect::<Vec<_>>()
        );
        let row = fib.rows.iter().find(|r| r.word.to_string() == "01010010").unwrap();
        assert_eq!(row.swapped.to_string(), "10010010");
        assert!(verify_standard_solutions(2, 1, &[], 8).unwrap().all_hold());
    }

    #[test]
    fn enumeration_near_s() {
        let omega = fib8();
        let report = enumerate_solutions(&omega, 4 * omega.size(), 100_000).unwrap();
        assert!(report.contains(&bits("01010010010")));
        assert!(report.contains(&bits("010")));
        assert!(report.solutions.iter().all(|c| c.verified));
        assert_eq!(report.long_primitive, vec![omega.gamma(1).0]);
        assert!(report.long_not_gamma.is_empty());
    }

    #[test]
    fn conjugates_of_gamma_and_s() {
        let omega = fib8();
        let g1 = conjugate_solution_audit(&omega, &omega.gamma(1).0).unwrap();
        assert!(g1.passes(), "{:?}", g1.solving_rotations);
        assert_eq!(g1.rotations_tested, 24);
        let s = conjugate_solution_audit(&omega, omega.s()).unwrap();
        assert!(s.passes());
        assert_eq!(s.solving_rotations.len(), 2);
        let imprimitive = omega.s().power(2);
        assert!(conjugate_solution_audit(&omega, &imprimitive).is_err());
    }

    #[test]
    fn squares_in_block_language() {
        for c in [1, 2] {
            let report = squares_in_omega_star(c, 3 * (2 * c + 1) * (2 * c + 1)).unwrap();
            assert!(report.passes(), "c={c}: {report:?}");
            assert!(!report.roots.contains(&Word::blocks(&[Block::L])));
        }
    }

    #[test]
    fn doubling_orbit_partitions() {
        assert_eq!(doubling_orbits(7).unwrap().render(), "{0} {1,2,4} {3,5,6}");
        assert_eq!(doubling_orbits(3).unwrap().orbits, vec![vec![0], vec![1, 2]]);
        assert_eq!(doubling_orbits(1).unwrap().orbits, vec![vec![0]]);
        assert!(doubling_orbits(8).is_err());
        assert!(doubling_orbits(0).is_err());
    }

    #[test]
    fn substitutions_from_patterns() {
        let seven = doubling_orbits(7).unwrap();
        let (s, l) = pattern_to_substitution(&seven, &[Block::S, Block::S, Block::L]).unwrap();
        assert_eq!(
            (Word::blocks(&s).to_string(), Word::blocks(&l).to_string()),
            ("LSSLSLL".into(), "SSSLSLL".into())
        );
        let three = doubling_orbits(3).unwrap();
        let (s, l) = pattern_to_substitution(&three, &[Block::L, Block::S]).unwrap();
        assert_eq!((s, l), (blocks("LSS"), blocks("SSS")));
        assert_eq!(tau(1, &[Block::S]), blocks("LSS"));
    }

    #[test]
    fn doubling_words_are_fixed() {
        let omega = fib8();
        for n in [1, 3, 5, 7, 9] {
            let pattern = doubling_orbits(n).unwrap();
            for assignment in pattern.assignments() {
                let u = pattern.word(&assignment).unwrap();
                assert!(satisfies_doubling(&u));
                let depth = default_self_sqrt_depth(&omega, &u);
                assert!(
                    check_self_sqrt(&omega, &u, depth).unwrap(),
                    "n={n} u={}",
                    Word::blocks(&u)
                );
            }
        }
    }

    #[test]
    fn doubling_violator_is_not_fixed() {
        let omega = fib8();
        let u = blocks("SSLSSSS");
        assert!(!satisfies_doubling(&u));
        assert!(!check_self_sqrt(&omega, &u, default_self_sqrt_depth(&omega, &u)).unwrap());
        assert!(check_self_sqrt(&omega, &blocks("SL"), 16).is_err());
    }

    proptest! {
        #[test]
        fn search_agrees_with_definition(w in proptest::collection::vec(0u8..2, 1..40), ab in 0usize..3) {
            let (a, b) = [(1, 0), (2, 1), (1, 2)][ab];
            let x = SquareAlphabet::new(a, b).unwrap();
            let cert = is_solution(&x, &w);
            prop_assert_eq!(cert.is_some(), solves_by_definition(&x, &w));
            if let Some(cert) = cert {
                prop_assert!(cert.verified);
            }
        }

        #[test]
        fn orbits_partition_and_are_closed(k in 0usize..40) {
            let n = 2 * k + 1;
            let p = doubling_orbits(n).unwrap();
            let mut all: Vec<usize> = p.orbits.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            for orbit in &p.orbits {
                for &i in orbit {
                    prop_assert!(orbit.contains(&(2 * i % n)));
                }
            }
        }
    }
}
