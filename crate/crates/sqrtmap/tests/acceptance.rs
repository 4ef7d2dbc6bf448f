//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;

use sqrtmap::dynamics::{
    default_periodic_depth, doubling_claim_check, fibonacci_estimate, injectivity_check, iterate_product,
    limit_set_check, periodic_point_search, table1_experiment, truncate2, SearchBudget, StepKind,
};
use sqrtmap::equation::{
    check_self_sqrt, conjugate_solution_audit, default_self_sqrt_depth, doubling_orbits, enumerate_solutions,
};
use sqrtmap::lazy::sqrt_stream;
use sqrtmap::squares::root_name;
use sqrtmap::words::swap_first_two;
use sqrtmap::{
    Block, BlockSeq, EndpointConvention, InfiniteWord, Omega, OmegaParams, ProductType, Result, SLProduct,
    SquareAlphabet, Word,
};

const PARAMS: [(usize, usize, usize); 3] = [(1, 0, 1), (2, 1, 1), (1, 0, 2)];
const FIB_SIZES: [usize; 6] = [8, 13, 21, 34, 55, 89];

struct Outcome {
    pass: bool,
    detail: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Outcome {
        Outcome {
            pass,
            detail: detail.into(),
            notes: Vec::new(),
        }
    }
}

fn omega(params: (usize, usize, usize)) -> Result<Omega> {
    Omega::new(OmegaParams::new(params.0, params.1, params.2)?)
}

fn table1() -> Result<Outcome> {
    let budget = SearchBudget::default();
    let rows = table1_experiment(&FIB_SIZES, &budget, EndpointConvention::LeftClosed)?;
    let shown: Vec<String> = rows
        .iter()
        .map(|r| format!("{}:{}", r.size, r.n.map_or("-".into(), |n| n.to_string())))
        .collect();
    let mut out = Outcome::new(rows.iter().all(|r| r.n.is_some() && r.n == r.paper_n), shown.join(" "));
    for r in rows.iter().filter(|r| r.n != r.paper_n) {
        out.notes.push(format!(
            "|S|={} n={:?} reference={:?} alternate-convention ψ count={:?}",
            r.size, r.n, r.paper_n, r.alternate_psi_n
        ));
    }
    Ok(out)
}

fn table2() -> Result<Outcome> {
    let shown = [8u64, 13, 144, 6765]
        .iter()
        .map(|&n| fibonacci_estimate(n).map(truncate2))
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::new(
        shown == ["3.47", "4.16", "7.63", "13.19"],
        shown.join(" "),
    ))
}

fn fixed_points() -> Result<Outcome> {
    const N: usize = 100_000;
    let mut ok = true;
    let mut detail = Vec::new();
    for params in PARAMS {
        let o = omega(params)?;
        for which in [1u8, 2] {
            let expected = o.big_gamma(which).letters(N)?.to_vec();
            let mut root = sqrt_stream(o.alphabet(), o.big_gamma(which));
            let same = root.letters(N)? == expected.as_slice();
            ok &= same;
            if !same {
                detail.push(format!("{params:?} Γ{which} differs"));
            }
        }
    }
    Ok(Outcome::new(
        ok,
        if ok {
            format!("{N} letters, 3 parameter sets")
        } else {
            detail.join("; ")
        },
    ))
}

fn rational_slope() -> Result<Outcome> {
    let mut checked = 0;
    let mut bad = Vec::new();
    for size in [8, 13, 21] {
        let o = Omega::fibonacci(size)?;
        let sys = o.system();
        let q = sys.period();
        for j in 0..q {
            let rho = BigRational::new(BigInt::from(j), BigInt::from(q));
            let coding = sys.coding(&rho, q);
            let mut root = sqrt_stream(o.alphabet(), InfiniteWord::periodic(&coding)?);
            let image = sys.coding(&sys.psi(&rho), q);
            checked += 1;
            if root.letters(q)? != image.letters() {
                bad.push(format!("{}/{q} j={j}", sys.slope()));
            }
        }
    }
    Ok(Outcome::new(
        bad.is_empty(),
        format!("{checked} intercepts, {} mismatches {:?}", bad.len(), bad),
    ))
}

fn crucial_properties() -> Result<Outcome> {
    let mut bad = Vec::new();
    let mut checked = 0;
    for c in [1, 2] {
        let o = omega((1, 0, c))?;
        let x = o.alphabet();
        for j in 0..=6 {
            let (g, gbar) = o.gamma(j);
            let cases = [(&g, &g, &g), (&g, &gbar, &g), (&gbar, &g, &gbar), (&gbar, &gbar, &gbar)];
            for (u, v, expected) in cases {
                checked += 1;
                let root = x.sqrt_finite(&[u.letters(), v.letters()].concat());
                if root.as_deref().ok() != Some(expected.letters()) {
                    bad.push(format!("c={c} j={j}"));
                }
            }
        }
    }
    Ok(Outcome::new(
        bad.is_empty(),
        format!("{checked} identities, failures {bad:?}"),
    ))
}

fn worked_examples() -> Result<Outcome> {
    let x = SquareAlphabet::new(1, 0)?;
    let s = Word::parse("1001001010010")?;
    let swapped = swap_first_two(&s)?;
    let names = |w: &[u8]| -> Vec<String> {
        x.factorize(w)
            .map(|r| r.into_iter().map(root_name).collect())
            .unwrap_or_default()
    };
    let ss = [s.letters(), s.letters()].concat();
    let sl = [s.letters(), swapped.letters()].concat();
    let ss_ok = names(&ss) == ["S5", "S4", "S2", "S1", "S6"]
        && x.render_factorization(&x.factorize(&ss).unwrap_or_default()) == "100100.1010.0101.00.1001010010";
    let sl_ok = names(&sl) == ["S5", "S4", "S3", "S6"]
        && x.render_factorization(&x.factorize(&sl).unwrap_or_default()) == "100100.1010.010010.1001010010";

    let o = Omega::fibonacci(8)?;
    let start = SLProduct::new(BlockSeq::fixed_point(3, Block::S), 4);
    let record = iterate_product(&o, &start, 4)?;
    let kinds: Vec<StepKind> = record.steps.iter().take(4).map(|s| s.kind).collect();
    let orbit_ok = kinds
        == [
            StepKind::Product(ProductType::C),
            StepKind::Product(ProductType::B),
            StepKind::Product(ProductType::D),
            StepKind::Periodic(0),
        ]
        && record.n_fixed == Some(3)
        && record.period.as_ref().map(Word::to_string).as_deref() == Some("01010010");
    Ok(Outcome::new(
        ss_ok && sl_ok && orbit_ok,
        format!("s̄s̄ {ss_ok}, s̄L(s̄) {sl_ok}, C→B→D→S^ω {orbit_ok}"),
    ))
}

fn solution_audit() -> Result<Outcome> {
    let o = Omega::fibonacci(8)?;
    let report = enumerate_solutions(&o, 4 * o.size(), 100_000)?;
    let found11 = report.contains(&Word::parse("01010010010")?.into_letters());
    let gamma = conjugate_solution_audit(&o, &o.gamma(1).0)?;
    let s = conjugate_solution_audit(&o, o.s())?;
    let s_pair = s.solving_rotations == {
        let mut v = vec![o.s().clone(), o.l().clone()];
        v.sort();
        v
    };
    let pass = found11 && report.long_not_gamma.is_empty() && gamma.passes() && s.passes() && s_pair;
    Ok(Outcome::new(
        pass,
        format!(
            "{} solutions, 01010010010 {found11}, long primitive {:?}, non-γ {}, γ₁ rotations {}, S rotations {:?}",
            report.solutions.len(),
            report.long_primitive.iter().map(Word::to_string).collect::<Vec<_>>(),
            report.long_not_gamma.len(),
            gamma.solving_rotations.len(),
            s.solving_rotations.iter().map(Word::to_string).collect::<Vec<_>>()
        ),
    ))
}

fn injectivity() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    let mut notes = Vec::new();
    for params in PARAMS {
        let o = omega(params)?;
        let r = injectivity_check(&o, 10_000, 32 * o.size(), 2 * o.size(), 0x5eed)?;
        pass &= r.passes();
        detail.push(format!(
            "{params:?}: targets {} max {} two {} zSΓ {}",
            r.targets, r.max_descriptors, r.with_two, r.two_in_zs_gamma_form
        ));
        notes.push(format!(
            "{params:?}: {} pairs are yΓ₁/yΓ₂ with y a suffix of some γ_k not ending in S; suffix form holds: {}; e.g. {}",
            r.two_in_suffix_gamma_form,
            r.passes_suffix_form(),
            r.suffix_gamma_examples.first().map_or("-", |e| e.split(": ").nth(1).unwrap_or("-"))
        ));
    }
    let mut out = Outcome::new(pass, detail.join("; "));
    out.notes = notes;
    Ok(out)
}

fn limit_set() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for size in FIB_SIZES {
        let o = Omega::fibonacci(size)?;
        let r = limit_set_check(&o, 100, 10, 2 * size, 0x11)?;
        pass &= r.passes();
        detail.push(format!(
            "|S|={size}: chains {}/{} outside {}/{} (≤{})",
            r.chains_verified, r.chains, r.outside_reached, r.outside, r.step_bound
        ));
    }
    Ok(Outcome::new(pass, detail.join("; ")))
}

fn periodic_points() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for params in PARAMS {
        let o = omega(params)?;
        let search = periodic_point_search(&o, 8, default_periodic_depth(&o), 8);
        pass &= search.matches_expected_set();
        detail.push(format!("{params:?}: {:?}", search.names()));
    }
    for c in [1, 2] {
        let r = doubling_claim_check(c, 6)?;
        pass &= r.violations.is_empty();
        detail.push(format!(
            "doubling c={c}: {} pairs, {} violations",
            r.pairs_checked,
            r.violations.len()
        ));
    }
    Ok(Outcome::new(pass, detail.join("; ")))
}

fn generator() -> Result<Outcome> {
    let pattern = doubling_orbits(7)?;
    let orbits_ok = pattern.render() == "{0} {1,2,4} {3,5,6}";
    let mut fixed = 0;
    let mut total = 0;
    for params in PARAMS {
        let o = omega(params)?;
        for assignment in pattern.assignments() {
            let u = pattern.word(&assignment)?;
            total += 1;
            if check_self_sqrt(&o, &u, default_self_sqrt_depth(&o, &u))? {
                fixed += 1;
            }
        }
    }
    Ok(Outcome::new(
        orbits_ok && fixed == total,
        format!(
            "orbits {}, fixed {fixed}/{total} (8 assignments × 3 parameter sets)",
            pattern.render()
        ),
    ))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 11] = [
        ("maximal step counts", table1),
        ("closed-form step estimates", table2),
        ("fixed points Γ₁ Γ₂", fixed_points),
        ("rational-slope square root", rational_slope),
        ("crucial properties", crucial_properties),
        ("worked examples", worked_examples),
        ("solution audit", solution_audit),
        ("injectivity cap", injectivity),
        ("limit set", limit_set),
        ("periodic points", periodic_points),
        ("doubling-orbit generator", generator),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run().unwrap_or_else(|e| Outcome::new(false, format!("error: {e}")));
        let mark = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{mark} {:>2} {name} [{:.1}s]: {}",
            i + 1,
            t.elapsed().as_secs_f64(),
            outcome.detail
        );
        for note in &outcome.notes {
            println!("     note: {note}");
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
