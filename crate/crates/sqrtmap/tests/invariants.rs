use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

use sqrtmap::dynamics::{find_preimages, psi_steps, steps_bound, OmegaLanguage};
use sqrtmap::equation::{conjugate_solution_audit, is_solution};
use sqrtmap::lazy::sqrt_stream;
use sqrtmap::sturmian::{reversed_standard_word, standard_word, ContinuedFraction};
use sqrtmap::words::{cyclic_shift, is_primitive, lex_less, minimal_period, swap_first_two};
use sqrtmap::{
    Block, BlockCorpus, EndpointConvention, InfiniteWord, Omega, OmegaParams, RotationSystem, SquareAlphabet, Word,
};

const PARAMS: [(usize, usize, usize); 3] = [(1, 0, 1), (2, 1, 1), (1, 0, 2)];

fn omega(i: usize) -> Omega {
    let (a, b, c) = PARAMS[i];
    Omega::new(OmegaParams::new(a, b, c).unwrap()).unwrap()
}

fn word() -> impl Strategy<Value = Word> {
    proptest::collection::vec(0u8..2, 1..24).prop_map(Word::binary)
}

fn gamma_letters(omega: &Omega, n: usize) -> Vec<u8> {
    omega.big_gamma(1).letters(n).unwrap().to_vec()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn cyclic_shift_has_order_dividing_length(w in word()) {
        let mut x = w.clone();
        for _ in 0..w.len() {
            x = cyclic_shift(&x).unwrap();
        }
        prop_assert_eq!(x, w);
    }

    #[test]
    fn primitive_iff_no_proper_dividing_period(w in word()) {
        let p = minimal_period(&w).unwrap();
        let imprimitive = p < w.len() && w.len() % p == 0;
        prop_assert_eq!(is_primitive(&w).unwrap(), !imprimitive);
    }

    #[test]
    fn lex_order_is_binary_order(bits in proptest::collection::vec((0u8..2, 0u8..2), 1..20)) {
        let (u, v): (Vec<u8>, Vec<u8>) = bits.into_iter().unzip();
        let value = |x: &[u8]| x.iter().fold(0u64, |acc, &b| 2 * acc + b as u64);
        let (u, v) = (Word::binary(u), Word::binary(v));
        prop_assert_eq!(lex_less(&u, &v).unwrap(), value(u.letters()) < value(v.letters()));
        let exactly_one = [lex_less(&u, &v).unwrap(), lex_less(&v, &u).unwrap(), u == v].iter().filter(|&&x| x).count();
        prop_assert_eq!(exactly_one, 1);
    }

    #[test]
    fn swap_is_an_involution(w in proptest::collection::vec(0u8..2, 2..24)) {
        let w = Word::binary(w);
        prop_assert_eq!(swap_first_two(&swap_first_two(&w).unwrap()).unwrap(), w);
    }

    #[test]
    fn standard_word_shape(d in proptest::collection::vec(1u64..4, 8), k in 1usize..8) {
        let s = standard_word(&d, k as i64).unwrap();
        prop_assert!(is_primitive(&s).unwrap());
        if k >= 2 {
            let n = s.len();
            prop_assert_ne!(s.at(n - 1), s.at(n - 2));
        }
        let mut quotients = d[..k].to_vec();
        quotients[0] += 1;
        let slope = ContinuedFraction::new(0, quotients).unwrap().value();
        prop_assert_eq!(BigInt::from(s.len()), slope.denom().clone());
    }

    #[test]
    fn rational_codings_have_period_q(q in 3i64..40, p in 1i64..40, j in 0i64..40) {
        let p = p % q;
        prop_assume!(p > 0 && num_integer::gcd(p, q) == 1);
        let sys = RotationSystem::new(BigRational::new(p.into(), q.into()), EndpointConvention::LeftClosed);
        prop_assume!(sys.is_ok());
        let sys = sys.unwrap();
        let rho = BigRational::new((j % q).into(), q.into());
        let w = sys.coding(&rho, 2 * q as usize);
        prop_assert!(sqrtmap::words::has_period(w.letters(), q as usize));
    }

    #[test]
    fn psi_halves_the_distance_to_the_pivot(num in 0i64..997, right in any::<bool>()) {
        let convention = if right { EndpointConvention::RightClosed } else { EndpointConvention::LeftClosed };
        let sys = RotationSystem::new(BigRational::new(5.into(), 13.into()), convention).unwrap();
        let rho = BigRational::new(num.into(), 997.into());
        let image = sys.psi(&rho);
        let two = BigRational::from_integer(2.into());
        prop_assert_eq!(sys.letter(&image), sys.letter(&rho));
        prop_assert_eq!(sys.distance_to_pivot(&image), sys.distance_to_pivot(&rho) / two);
    }

    #[test]
    fn square_roots_of_products_concatenate(
        left in proptest::collection::vec(0usize..6, 1..8),
        right in proptest::collection::vec(0usize..6, 1..8),
        ab in 0usize..3,
    ) {
        let (a, b, _) = PARAMS[ab];
        let x = SquareAlphabet::new(a, b).unwrap();
        let u: Vec<u8> = left.iter().flat_map(|&i| x.square(i)).collect();
        let v: Vec<u8> = right.iter().flat_map(|&i| x.square(i)).collect();
        let uv = [u.clone(), v.clone()].concat();
        let root = x.sqrt_finite(&uv).unwrap();
        prop_assert_eq!(root.len(), uv.len() / 2);
        prop_assert_eq!(root, [x.sqrt_finite(&u).unwrap(), x.sqrt_finite(&v).unwrap()].concat());
    }

    #[test]
    fn shared_prefixes_halve_under_the_root(i in 0usize..3, p in 0usize..4000, ell in 4usize..60) {
        let omega = omega(i);
        let text = gamma_letters(&omega, 40_000);
        let pattern = &text[p..p + ell];
        let q = (p + 1..text.len() - 4000)
            .find(|&q| &text[q..q + ell] == pattern && text[q + ell] != text[p + ell]);
        prop_assume!(q.is_some());
        let q = q.unwrap();
        let root = |start: usize| {
            let src = omega.big_gamma(1).shift(start);
            sqrt_stream(omega.alphabet(), src).letters(ell + 8).unwrap().to_vec()
        };
        let (x, y) = (root(p), root(q));
        let common = x.iter().zip(&y).take_while(|(a, b)| a == b).count();
        prop_assert!(common >= ell.div_ceil(2), "common {common} < ceil({ell}/2)");
    }

    #[test]
    fn exchange_of_the_swapped_word(d in proptest::collection::vec(1u64..4, 10), k in 2usize..10, b in 0usize..2) {
        let a = d[0] as usize;
        let mut directive = d.clone();
        directive[1] = b as u64 + 1;
        let x = SquareAlphabet::new(a, b).unwrap();
        let s = reversed_standard_word(&directive, k as i64).unwrap();
        prop_assume!(s.len() > x.longest_root());
        let swapped = swap_first_two(&s).unwrap();
        let ss = [s.letters(), s.letters()].concat();
        let sl = [s.letters(), swapped.letters()].concat();
        prop_assert_eq!(x.sqrt_finite(&ss).unwrap(), s.letters().to_vec());
        prop_assert_eq!(x.sqrt_finite(&sl).unwrap(), s.letters().to_vec());
    }

    #[test]
    fn first_letter_is_preserved(i in 0usize..3, p in 0usize..20_000, periodic in any::<bool>()) {
        let omega = omega(i);
        let src = if periodic {
            omega.periodic_word(p % omega.size())
        } else {
            omega.big_gamma(1).shift(p)
        };
        let mut copy = if periodic { omega.periodic_word(p % omega.size()) } else { omega.big_gamma(1).shift(p) };
        let mut root = sqrt_stream(omega.alphabet(), src);
        prop_assert_eq!(root.letter(0).unwrap(), copy.letter(0).unwrap());
    }

    #[test]
    fn stream_agrees_with_finite_root(i in 0usize..3, p in 0usize..20_000, squares in 1usize..60) {
        let omega = omega(i);
        let x = omega.alphabet();
        let text = omega.big_gamma(1).shift(p).letters(4000).unwrap().to_vec();
        let mut end = 0;
        for _ in 0..squares {
            end += x.square(x.minimal_square_prefix(&text[end..]).unwrap()).len();
        }
        let head = &text[..end];
        let expected = x.sqrt_finite(head).unwrap();
        let mut root = sqrt_stream(x, omega.big_gamma(1).shift(p));
        prop_assert_eq!(root.letters(end / 2).unwrap(), expected.as_slice());
    }

    #[test]
    fn every_position_starts_a_minimal_square(i in 0usize..3, p in 0usize..30_000) {
        let omega = omega(i);
        let text = gamma_letters(&omega, 31_000);
        prop_assert!(omega.alphabet().minimal_square_prefix(&text[p..]).is_some());
    }

    #[test]
    fn sigma_commutes_with_the_root(c in 1usize..3, p in 0usize..2000, half in 1usize..12) {
        let omega = Omega::new(OmegaParams::new(1, 0, c).unwrap()).unwrap();
        let corpus = BlockCorpus::new(c, 4000);
        let w = corpus.slice(p, p + 2 * half);
        let decimated: Vec<Block> = w.iter().step_by(2).copied().collect();
        let image = omega.sigma(&w);
        prop_assert_eq!(omega.alphabet().sqrt_finite(image.letters()).unwrap(), omega.sigma(&decimated).into_letters());
    }

    #[test]
    fn odd_shifts_of_block_pairs_leave_pi(i in 0usize..3, pair in 0usize..4, half in 0usize..6) {
        let omega = omega(i);
        let ell = 2 * half + 1;
        prop_assume!(ell < omega.size());
        let blocks = [[Block::S, Block::S], [Block::S, Block::L], [Block::L, Block::S], [Block::L, Block::L]][pair];
        let w = omega.sigma(&blocks);
        prop_assert!(!omega.alphabet().in_pi(&w.letters()[ell..]));
    }

    #[test]
    fn omega_a_targets_have_at_most_two_preimages(i in 0usize..3, p in 0usize..50_000) {
        let omega = omega(i);
        let len = 16 * omega.size();
        let language = OmegaLanguage::for_factor_length(&omega, 2 * len + 2 * omega.alphabet().longest_root());
        let text = gamma_letters(&omega, 50_000 + len);
        let target = Word::binary(text[p..p + len].to_vec());
        let set = find_preimages(&omega, &language, &target, 2 * omega.size());
        prop_assert!(set.descriptors.len() <= 2);
    }
}

#[test]
fn level_intervals_partition_the_circle() {
    for (p, q) in [(3, 8), (5, 13), (8, 21), (7, 19)] {
        let sys = RotationSystem::new(BigRational::new(p.into(), q.into()), EndpointConvention::LeftClosed).unwrap();
        for n in 1..=2 * q as usize {
            let total: BigRational = sys.level_intervals(n).iter().map(|(arc, _)| arc.length()).sum();
            assert!(total.is_one(), "slope {p}/{q} level {n}");
        }
    }
}

#[test]
fn psi_steps_stay_under_the_arc_bound() {
    for size in [8, 13, 21, 34] {
        let omega = Omega::fibonacci(size).unwrap();
        let sys = omega.system();
        let bound = steps_bound(sys, omega.s(), omega.l()).unwrap();
        let q = sys.period() as i64;
        for j in 0..q {
            let rho = BigRational::new(j.into(), q.into());
            let steps = psi_steps(sys, &rho).unwrap();
            assert!(
                steps as u32 <= bound.ceiling,
                "|S|={size} j={j}: {steps} > {}",
                bound.ceiling
            );
        }
    }
}

#[test]
fn gamma_words_solve_and_their_rotations_do_not() {
    let omega = omega(0);
    for k in 1..=4 {
        let g = omega.gamma(k).0;
        assert!(is_solution(omega.alphabet(), g.letters()).is_some(), "γ_{k}");
        if k <= 3 {
            let audit = conjugate_solution_audit(&omega, &g).unwrap();
            assert!(audit.passes(), "γ_{k}: {:?}", audit.solving_rotations);
        }
    }
}

#[test]
fn gamma_prefixes_extend_left_uniquely() {
    for (i, params) in PARAMS.iter().enumerate() {
        let omega = omega(i);
        for k in 0..=3 {
            let (g, gbar) = omega.gamma(k);
            // γ̄_kΓ is τ^k of an illegal block word of length 5; its
            // illegality shows within about 5|γ_k| letters.
            let len = 6 * g.len();
            let language = OmegaLanguage::for_factor_length(&omega, len + g.len());
            for which in [1u8, 2] {
                let prefix = omega.big_gamma(which).letters(len).unwrap().to_vec();
                let extensions = [&g, &gbar]
                    .iter()
                    .filter(|x| language.contains(&[x.letters(), prefix.as_slice()].concat()))
                    .count();
                assert_eq!(extensions, 1, "params {params:?}, k={k}, Γ{which}");
            }
        }
    }
}

#[test]
fn sources_answer_consistently() {
    let omega = omega(1);
    let mut a: InfiniteWord = omega.big_gamma(2).shift(5);
    let long = a.letters(5000).unwrap().to_vec();
    let short = a.letters(100).unwrap().to_vec();
    assert_eq!(&long[..100], short.as_slice());
}
