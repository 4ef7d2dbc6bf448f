mod input;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use sqrtmap::dynamics::{
    default_periodic_depth, fibonacci_estimate, find_preimages, injectivity_check, iterate_letters, iterate_product,
    limit_set_check, periodic_point_search, table1_experiment, truncate2, OmegaLanguage, SearchBudget,
};
use sqrtmap::equation::{
    check_self_sqrt, conjugate_solution_audit, default_self_sqrt_depth, doubling_orbits, enumerate_solutions,
    is_solution, pattern_to_substitution, squares_in_omega_star, verify_standard_solutions,
};
use sqrtmap::lazy::sqrt_stream;
use sqrtmap::squares::root_name;
use sqrtmap::{EndpointConvention, Omega, OmegaParams, Seed, Word};

use input::{Input, InputKind};

#[derive(Parser)]
#[command(name = "sqrtmap", version, about = "Square root map on optimal squareful words")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// First square parameter.
    #[arg(long, global = true, default_value_t = 1)]
    a: usize,
    /// Second square parameter.
    #[arg(long, global = true, default_value_t = 0)]
    b: usize,
    /// Block substitution parameter.
    #[arg(long, global = true, default_value_t = 1)]
    c: usize,
    /// Standard word index for S (default: the least admissible one).
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Build S from the reversed standard word as is, or with its first two letters swapped.
    #[arg(long = "seed-word", global = true, value_enum, default_value_t = SeedWord::Plain)]
    seed_word: SeedWord,
    /// Endpoint convention of the rotation intervals.
    #[arg(long, global = true, value_enum, default_value_t = Convention::Left)]
    convention: Convention,
    /// Depth: prefix length, chain depth or block depth, depending on the command.
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Step cap for iterations.
    #[arg(long, global = true)]
    cap: Option<usize>,
    /// Sample count or search budget, depending on the command.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Shorthand for `--format json --out FILE`.
    #[arg(long = "json", global = true, value_name = "FILE")]
    json_out: Option<PathBuf>,
    /// Parameters as `a,b,c`, overriding --a, --b and --c.
    #[arg(long, global = true, value_delimiter = ',')]
    params: Option<Vec<usize>>,
    /// How to read word arguments (guessed when absent).
    #[arg(long = "input-kind", global = true, value_enum)]
    input_kind: Option<InputKind>,
    /// Drop this many letters from the front of a word argument.
    #[arg(long, global = true, default_value_t = 0)]
    shift: usize,
}

/// A word given positionally, with `--word`, or with `--blocks` (read as S/L blocks).
#[derive(Args)]
struct WordArg {
    #[arg(conflicts_with_all = ["word_flag", "blocks"])]
    word: Option<String>,
    #[arg(long = "word", conflicts_with = "blocks")]
    word_flag: Option<String>,
    #[arg(long)]
    blocks: Option<String>,
}

impl WordArg {
    /// The text and, for `--blocks`, the forced input kind.
    fn get(&self) -> Result<(&str, Option<InputKind>), Failure> {
        match (&self.word, &self.word_flag, &self.blocks) {
            (Some(w), _, _) | (_, Some(w), _) => Ok((w, None)),
            (_, _, Some(b)) => Ok((b, Some(InputKind::Blocks))),
            _ => Err(Failure::Usage("a word argument is required".into())),
        }
    }
}

#[derive(Args)]
struct Table1Args {
    #[arg(long, value_delimiter = ',', default_values_t = [8usize, 13, 21, 34, 55, 89])]
    fib: Vec<usize>,
}

#[derive(Args)]
struct Table2Args {
    #[arg(long, value_delimiter = ',', default_values_t = [8u64, 13, 144, 6765])]
    fib: Vec<u64>,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    word: WordArg,
    /// Number of square root steps (default: --depth, else 8).
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct PreimageArgs {
    /// A finite target; without one, long targets are sampled from Ω.
    #[arg(conflicts_with = "target_flag")]
    target: Option<String>,
    #[arg(long = "target")]
    target_flag: Option<String>,
    /// Preimages are compared on this many leading letters (default 2|S|).
    #[arg(long)]
    head: Option<usize>,
}

#[derive(Subcommand)]
enum DynamicsCommand {
    Table1(Table1Args),
    Table2(Table2Args),
    Orbit(OrbitArgs),
    Preimages(PreimageArgs),
    LimitSet,
    PeriodicPoints,
}

#[derive(Clone, Copy, ValueEnum)]
enum SeedWord {
    Plain,
    Swapped,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    Left,
    Right,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Minimal-square factorization of a finite word.
    Factorize(WordArg),
    /// Square root of a finite word, or a prefix of the square root of an infinite one.
    Sqrt(WordArg),
    /// The subshift: parameters, γ words, product types.
    #[command(subcommand)]
    Omega(OmegaCommand),
    /// Invariant-subset level of an infinite word.
    Classify(WordArg),
    /// Iterates the square root on a word.
    Orbit(OrbitArgs),
    /// Maximal steps to S^ω or L^ω for Fibonacci sizes.
    Table1(Table1Args),
    /// Closed-form step estimates for Fibonacci sizes.
    Table2(Table2Args),
    /// Preimages of a finite target, or the injectivity check on sampled targets.
    Preimages(PreimageArgs),
    /// Preimage chains inside Ω_S and convergence outside it.
    LimitSet,
    /// Periodic points of the square root among short block windows.
    PeriodicPoints,
    /// The word equation X₁²···X_n² = (X₁···X_n)².
    #[command(subcommand)]
    Eq(EqCommand),
    /// Substitutions from doubling orbits and their fixed-point check.
    Orbits {
        #[arg(long, default_value_t = 7)]
        n: usize,
    },
    /// The dynamics commands grouped: table1, table2, orbit, preimages, limit-set, periodic-points.
    #[command(subcommand)]
    Dynamics(DynamicsCommand),
}

#[derive(Subcommand)]
enum OmegaCommand {
    /// S, L, |S| and the slope.
    Info,
    /// γ_j and γ̄_j.
    Gamma {
        #[arg(long, default_value_t = 1)]
        j: usize,
    },
    /// Type A–D of a shifted block product and its square root step.
    Classify(WordArg),
}

#[derive(Subcommand)]
enum EqCommand {
    /// Solution certificate for a finite word.
    Check(WordArg),
    /// All solutions whose squares are factors of Ω.
    Enumerate {
        #[arg(long)]
        bmax: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        corpus_len: usize,
    },
    /// Rotations of a block product that are solutions.
    Audit(WordArg),
    /// Reversed standard words and their swaps as solutions.
    Standard {
        #[arg(long, default_value_t = 10)]
        kmax: usize,
    },
    /// Squares in the block language.
    Squares {
        #[arg(long, default_value_t = 27)]
        bmax: usize,
    },
    /// Orbits of doubling modulo an odd number.
    Orbits {
        #[arg(long, default_value_t = 7)]
        n: usize,
    },
}

/// What a command produced.
struct Report {
    text: String,
    json: Value,
    csv: Option<String>,
    /// False when a check found a violation (exit status 1).
    ok: bool,
}

impl Report {
    fn new(text: impl Into<String>, json: Value, ok: bool) -> Report {
        Report {
            text: text.into(),
            json,
            csv: None,
            ok,
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<sqrtmap::Error> for Failure {
    fn from(e: sqrtmap::Error) -> Failure {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<Report, Failure>;

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn build_omega(common: &Common) -> Result<Omega, Failure> {
    let mut params = OmegaParams::new(common.a, common.b, common.c).map_err(|e| Failure::Usage(e.to_string()))?;
    if let Some(k) = common.k {
        params = params.with_k(k);
    }
    if let SeedWord::Swapped = common.seed_word {
        params = params.with_seed(Seed::Swapped);
    }
    let convention = match common.convention {
        Convention::Left => EndpointConvention::LeftClosed,
        Convention::Right => EndpointConvention::RightClosed,
    };
    Omega::with_convention(params, convention).map_err(|e| Failure::Usage(e.to_string()))
}

fn parse_text(omega: &Omega, common: &Common, text: &str, kind: Option<InputKind>) -> Result<Input, Failure> {
    input::parse(omega, text, common.input_kind.or(kind), common.shift).map_err(Failure::Usage)
}

fn parse_input(omega: &Omega, common: &Common, arg: &WordArg) -> Result<Input, Failure> {
    let (text, kind) = arg.get()?;
    parse_text(omega, common, text, kind)
}

fn finite_text(omega: &Omega, common: &Common, text: &str, kind: Option<InputKind>) -> Result<Word, Failure> {
    parse_text(omega, common, text, kind)?
        .finite_letters(omega, text)
        .map_err(Failure::Usage)
}

fn finite(omega: &Omega, common: &Common, arg: &WordArg) -> Result<Word, Failure> {
    let (text, kind) = arg.get()?;
    finite_text(omega, common, text, kind)
}

fn factorize(omega: &Omega, common: &Common, arg: &WordArg) -> Outcome {
    let w = finite(omega, common, arg)?;
    let x = omega.alphabet();
    Ok(match x.factorize(w.letters()) {
        Ok(roots) if !roots.is_empty() => {
            let names: Vec<String> = roots.iter().map(|&i| root_name(i)).collect();
            let squares = x.render_factorization(&roots);
            Report::new(
                format!("{}\n{squares}", names.join(" ")),
                json!({"word": w.to_string(), "in_pi": true, "roots": names, "squares": squares}),
                true,
            )
        }
        Ok(_) => Report::new("empty word", json!({"word": "", "in_pi": false, "roots": []}), false),
        Err(f) => Report::new(
            format!("not a product of minimal squares: {f}"),
            json!({"word": w.to_string(), "in_pi": false, "roots": [], "failure": to_json(&f)}),
            false,
        ),
    })
}

fn sqrt(omega: &Omega, common: &Common, arg: &WordArg) -> Outcome {
    let input = parse_input(omega, common, arg)?;
    let text = arg.get()?.0;
    if let Ok(w) = input.finite_letters(omega, text) {
        return Ok(match omega.alphabet().sqrt_finite(w.letters()) {
            Ok(root) => {
                let root = Word::binary(root);
                Report::new(
                    root.to_string(),
                    json!({"input": w.to_string(), "root": root.to_string()}),
                    true,
                )
            }
            Err(e) => Report::new(
                format!("no square root: {e}"),
                json!({"input": w.to_string(), "root": null, "error": e.to_string()}),
                false,
            ),
        });
    }
    let n = common.depth.unwrap_or(64);
    let mut root = sqrt_stream(omega.alphabet(), input.source(omega).map_err(Failure::Usage)?);
    let prefix = root.prefix(n)?;
    let descriptor = format!("sqrt({})", input.describe());
    Ok(Report::new(
        format!("{descriptor}\n{prefix}"),
        json!({"descriptor": descriptor, "prefix": prefix.to_string(), "prefix_len": n}),
        true,
    ))
}

fn omega_cmd(omega: &Omega, common: &Common, cmd: &OmegaCommand) -> Outcome {
    match cmd {
        OmegaCommand::Info => {
            let slope = omega.params().slope()?;
            let text = format!(
                "S = {}\nL = {}\n|S| = {}\nL offset = {}\nslope = {}",
                omega.s(),
                omega.l(),
                omega.size(),
                omega.l_offset(),
                slope
            );
            let json = json!({
                "params": to_json(omega.params()),
                "s": omega.s().to_string(),
                "l": omega.l().to_string(),
                "size": omega.size(),
                "l_offset": omega.l_offset(),
                "slope": slope.to_string(),
            });
            Ok(Report::new(text, json, true))
        }
        OmegaCommand::Gamma { j } => {
            let (g, gbar) = omega.gamma(*j);
            Ok(Report::new(
                format!("{g}\n{gbar}"),
                json!({"j": j, "gamma": g.to_string(), "gamma_bar": gbar.to_string(), "length": g.len()}),
                true,
            ))
        }
        OmegaCommand::Classify(arg) => {
            let input = parse_input(omega, common, arg)?;
            let Input::Product(prod) = input else {
                return Err(Failure::Usage("classify needs a block word or a named word".into()));
            };
            let class = omega.classify_type(&prod);
            let step = omega.sqrt_product(&prod)?;
            let step_text = match &step {
                sqrtmap::SqrtStep::Product { next, .. } => next.describe(),
                sqrtmap::SqrtStep::Periodic { offset, .. } => format!("T^{offset}(S^ω)"),
            };
            Ok(Report::new(
                format!("type {:?}\nroot {step_text}", class.kind),
                json!({"input": prod.describe(), "type": class.kind, "pi_prefix_len": class.pi_prefix_len, "root": step_text}),
                true,
            ))
        }
    }
}

fn classify(omega: &Omega, common: &Common, arg: &WordArg) -> Outcome {
    let input = parse_input(omega, common, arg)?;
    let mut src = input.source(omega).map_err(Failure::Usage)?;
    let index = omega.invariant_subset_index(&mut src, common.depth.unwrap_or(6))?;
    let text = match index {
        sqrtmap::omega::SubsetIndex::Level(k) => format!("level {k}"),
        sqrtmap::omega::SubsetIndex::FixedPoint => "fixed point".into(),
        sqrtmap::omega::SubsetIndex::NotInOmegaS => "not in Ω_S".into(),
    };
    Ok(Report::new(
        text,
        json!({"input": input.describe(), "subset_index": to_json(&index)}),
        true,
    ))
}

fn orbit(omega: &Omega, common: &Common, args: &OrbitArgs) -> Outcome {
    let input = parse_input(omega, common, &args.word)?;
    let steps = args.steps.or(common.depth).unwrap_or(8);
    let record = match &input {
        Input::Product(p) => iterate_product(omega, p, steps)?,
        Input::Finite(_) => iterate_letters(omega, input.source(omega).map_err(Failure::Usage)?, steps)?,
    };
    let mut out = String::new();
    for s in &record.steps {
        let kind = match s.kind {
            sqrtmap::dynamics::StepKind::Product(t) => format!("type {t:?}"),
            sqrtmap::dynamics::StepKind::Periodic(j) => format!("T^{j}(S^ω)"),
            sqrtmap::dynamics::StepKind::Letters => "letters".into(),
        };
        let _ = writeln!(out, "{:>3} {} {kind}", s.index, s.fingerprint);
    }
    let show = |x: Option<usize>| x.map_or("-".to_string(), |n| n.to_string());
    let _ = write!(
        out,
        "periodic after {}, fixed after {}",
        show(record.n_periodic),
        show(record.n_fixed)
    );
    Ok(Report::new(out, to_json(&record), true))
}

fn table1(common: &Common, sizes: &[usize]) -> Outcome {
    let mut budget = SearchBudget::default();
    if let Some(d) = common.depth {
        budget.depth = d;
    }
    if let Some(c) = common.cap {
        budget.cap = c;
    }
    if let Some(b) = common.budget {
        budget.random_tails = b;
    }
    budget.seed = common.seed;
    let convention = match common.convention {
        Convention::Left => EndpointConvention::LeftClosed,
        Convention::Right => EndpointConvention::RightClosed,
    };
    let rows = table1_experiment(sizes, &budget, convention)?;
    let show = |x: Option<usize>| x.map_or(String::new(), |n| n.to_string());
    let mut csv = String::from("size,n,paper_n,status\n");
    let mut text = String::from(" size  n  ref  status\n");
    for r in &rows {
        let _ = writeln!(csv, "{},{},{},{}", r.size, show(r.n), show(r.paper_n), r.status);
        let _ = write!(
            text,
            "{:>5} {:>2} {:>4}  {}",
            r.size,
            show(r.n),
            show(r.paper_n),
            r.status
        );
        if r.n != r.paper_n {
            let _ = write!(text, " (alternate convention: {})", show(r.alternate_psi_n));
        }
        text.push('\n');
    }
    let ok = rows.iter().all(|r| r.status == "PASS");
    let mut report = Report::new(text.trim_end(), json!({"rows": to_json(&rows)}), ok);
    report.csv = Some(csv.trim_end().to_string());
    Ok(report)
}

fn table2(sizes: &[u64]) -> Outcome {
    let reference = |n: u64| match n {
        8 => Some("3.47"),
        13 => Some("4.16"),
        144 => Some("7.63"),
        6765 => Some("13.19"),
        _ => None,
    };
    let mut rows = Vec::new();
    for &n in sizes {
        let estimate = truncate2(fibonacci_estimate(n).map_err(|e| Failure::Usage(e.to_string()))?);
        let reference = reference(n);
        let status = match reference {
            Some(r) if r == estimate => "PASS",
            Some(_) => "FAIL",
            None => "",
        };
        rows.push((n, estimate, reference, status));
    }
    let mut csv = String::from("size,estimate,reference,status\n");
    let mut text = String::from(" size  estimate  ref    status\n");
    for (n, e, r, s) in &rows {
        let _ = writeln!(csv, "{n},{e},{},{s}", r.unwrap_or(""));
        let _ = writeln!(text, "{n:>5}  {e:>8}  {:>5}  {s}", r.unwrap_or("-"));
    }
    let json = json!({"rows": rows.iter().map(|(n, e, r, s)| json!({"size": n, "estimate": e, "reference": r, "status": s})).collect::<Vec<_>>()});
    let ok = rows.iter().all(|r| r.3 != "FAIL");
    let mut report = Report::new(text.trim_end(), json, ok);
    report.csv = Some(csv.trim_end().to_string());
    Ok(report)
}

fn preimages(omega: &Omega, common: &Common, args: &PreimageArgs) -> Outcome {
    let head = args.head.unwrap_or(2 * omega.size());
    match args.target.as_deref().or(args.target_flag.as_deref()) {
        Some(text) => {
            let w = finite_text(omega, common, text, None)?;
            if head > w.len() {
                return Err(Failure::Usage(format!(
                    "head length {head} exceeds the target length {}",
                    w.len()
                )));
            }
            let language = OmegaLanguage::for_factor_length(omega, 2 * w.len() + 2 * omega.alphabet().longest_root());
            let set = find_preimages(omega, &language, &w, head);
            let mut text = format!("{} preimage head(s)", set.descriptors.len());
            for d in &set.descriptors {
                let names: Vec<String> = d.roots.iter().map(|&i| root_name(i)).collect();
                let _ = write!(text, "\n{} {}", d.head, names.join(" "));
            }
            // A finite target may have many preimages; the cap only concerns sampled long targets.
            Ok(Report::new(text, to_json(&set), true))
        }
        None => {
            let count = common.budget.unwrap_or(1000);
            let len = common.depth.unwrap_or(32 * omega.size());
            let r = injectivity_check(omega, count, len, head, common.seed)?;
            let text = format!(
                "targets {}, max preimages {}, two preimages {} (zSΓ form {}, other γ-suffix form {}), violations {}",
                r.targets,
                r.max_descriptors,
                r.with_two,
                r.two_in_zs_gamma_form,
                r.two_in_suffix_gamma_form,
                r.violations.len()
            );
            Ok(Report::new(text, to_json(&r), r.passes()))
        }
    }
}

fn limit_set(omega: &Omega, common: &Common) -> Outcome {
    let samples = common.budget.unwrap_or(100);
    let depth = common.depth.unwrap_or(10);
    let r = limit_set_check(omega, samples, depth, 2 * omega.size(), common.seed)?;
    let text = format!(
        "chains {}/{} verified to depth {}; outside Ω_S {}/{} reached S^ω or L^ω within {} steps (max {})",
        r.chains_verified, r.chains, r.depth, r.outside_reached, r.outside, r.step_bound, r.max_steps
    );
    Ok(Report::new(text, to_json(&r), r.passes()))
}

fn periodic_points(omega: &Omega, common: &Common) -> Outcome {
    let max_blocks = common.budget.unwrap_or(8);
    let depth = common.depth.unwrap_or_else(|| default_periodic_depth(omega));
    let search = periodic_point_search(omega, max_blocks, depth, common.cap.unwrap_or(8));
    let mut text = format!(
        "{} candidates, {} refuted, {} periodic points:",
        search.candidates,
        search.refuted,
        search.points.len()
    );
    for p in &search.points {
        let _ = write!(
            text,
            "\n  {} (period {})",
            p.name.as_deref().unwrap_or(&p.descriptor),
            p.period
        );
    }
    let ok = search.matches_expected_set();
    Ok(Report::new(text, to_json(&search), ok))
}

fn doubling_report(omega: &Omega, n: usize) -> Outcome {
    let pattern = doubling_orbits(n).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut rows = Vec::new();
    let mut text = pattern.render();
    for assignment in pattern.assignments() {
        let u = pattern.word(&assignment)?;
        let (s_image, l_image) = pattern_to_substitution(&pattern, &assignment)?;
        let depth = default_self_sqrt_depth(omega, &u);
        let fixed = check_self_sqrt(omega, &u, depth)?;
        let (u, s_image, l_image) = (Word::blocks(&u), Word::blocks(&s_image), Word::blocks(&l_image));
        let _ = write!(text, "\n{u}  S→{s_image} L→{l_image}  fixed to {depth}: {fixed}");
        rows.push(json!({"word": u, "s_image": s_image, "l_image": l_image, "depth": depth, "fixed": fixed}));
    }
    let ok = rows.iter().all(|r| r["fixed"] == json!(true));
    Ok(Report::new(
        text,
        json!({"n": n, "orbits": pattern.orbits, "assignments": rows}),
        ok,
    ))
}

fn eq_cmd(omega: &Omega, common: &Common, cmd: &EqCommand) -> Outcome {
    match cmd {
        EqCommand::Check(arg) => {
            let w = finite(omega, common, arg)?;
            Ok(match is_solution(omega.alphabet(), w.letters()) {
                Some(cert) => Report::new(format!("solution: {}", cert.roots.join(" ")), to_json(&cert), true),
                None => Report::new(
                    "not a solution",
                    json!({"word": w.to_string(), "roots": [], "verified": false}),
                    false,
                ),
            })
        }
        EqCommand::Enumerate { bmax, corpus_len } => {
            let bmax = bmax.unwrap_or(4 * omega.size());
            let r = enumerate_solutions(omega, bmax, *corpus_len)?;
            let mut text = format!("{} solutions with root length at most {bmax}", r.solutions.len());
            for c in &r.solutions {
                let _ = write!(text, "\n{} {}", c.word, c.roots.join(" "));
            }
            let _ = write!(
                text,
                "\nprimitive of length ≥ 2|S| not a γ word: {}",
                r.long_not_gamma.len()
            );
            Ok(Report::new(text, to_json(&r), r.long_not_gamma.is_empty()))
        }
        EqCommand::Audit(arg) => {
            let w = finite(omega, common, arg)?;
            let r = conjugate_solution_audit(omega, &w).map_err(|e| Failure::Usage(e.to_string()))?;
            let names: Vec<String> = r.solving_rotations.iter().map(Word::to_string).collect();
            let text = format!(
                "{} rotations, solutions among them: {}",
                r.rotations_tested,
                names.join(" ")
            );
            Ok(Report::new(text, to_json(&r), r.passes()))
        }
        EqCommand::Standard { kmax } => {
            let tail = omega.params().tail.clone();
            let r = verify_standard_solutions(common.a, common.b, &tail, *kmax)?;
            let mut text = String::new();
            for row in &r.rows {
                let _ = writeln!(
                    text,
                    "k={:>2} {} {} {}",
                    row.k,
                    row.word,
                    row.swapped,
                    row.word_solves && row.swapped_solves && row.primitive
                );
            }
            Ok(Report::new(text.trim_end(), to_json(&r), r.all_hold()))
        }
        EqCommand::Squares { bmax } => {
            let r = squares_in_omega_star(common.c, *bmax).map_err(|e| Failure::Usage(e.to_string()))?;
            let roots: Vec<String> = r.roots.iter().map(Word::to_string).collect();
            Ok(Report::new(
                format!("square roots: {}", roots.join(" ")),
                to_json(&r),
                r.passes(),
            ))
        }
        EqCommand::Orbits { n } => {
            let p = doubling_orbits(*n).map_err(|e| Failure::Usage(e.to_string()))?;
            Ok(Report::new(p.render(), to_json(&p), true))
        }
    }
}

fn run(common: &Common, command: &Command) -> Outcome {
    let omega = || build_omega(common);
    match command {
        Command::Table1(args) => table1(common, &args.fib),
        Command::Table2(args) => table2(&args.fib),
        Command::Factorize(arg) => factorize(&omega()?, common, arg),
        Command::Sqrt(arg) => sqrt(&omega()?, common, arg),
        Command::Omega(cmd) => omega_cmd(&omega()?, common, cmd),
        Command::Classify(arg) => classify(&omega()?, common, arg),
        Command::Orbit(args) => orbit(&omega()?, common, args),
        Command::Preimages(args) => preimages(&omega()?, common, args),
        Command::LimitSet => limit_set(&omega()?, common),
        Command::PeriodicPoints => periodic_points(&omega()?, common),
        Command::Eq(cmd) => eq_cmd(&omega()?, common, cmd),
        Command::Orbits { n } => doubling_report(&omega()?, *n),
        Command::Dynamics(cmd) => match cmd {
            DynamicsCommand::Table1(args) => table1(common, &args.fib),
            DynamicsCommand::Table2(args) => table2(&args.fib),
            DynamicsCommand::Orbit(args) => orbit(&omega()?, common, args),
            DynamicsCommand::Preimages(args) => preimages(&omega()?, common, args),
            DynamicsCommand::LimitSet => limit_set(&omega()?, common),
            DynamicsCommand::PeriodicPoints => periodic_points(&omega()?, common),
        },
    }
}

fn emit(common: &Common, report: &Report) -> Result<(), Failure> {
    let format = if common.json_out.is_some() {
        Format::Json
    } else {
        common.format
    };
    let body = match format {
        Format::Text => report.text.clone(),
        Format::Json => serde_json::to_string_pretty(&report.json).expect("json values print"),
        Format::Csv => report
            .csv
            .clone()
            .ok_or_else(|| Failure::Usage("this command has no CSV output".into()))?,
    };
    match common.json_out.as_ref().or(common.out.as_ref()) {
        Some(path) => std::fs::write(path, format!("{body}\n"))
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{body}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Failure::Runtime(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let mut cli = Cli::parse();
    if let Some(p) = cli.common.params.take() {
        let [a, b, c] = p[..] else {
            eprintln!("error: --params takes exactly three values a,b,c");
            return ExitCode::from(2);
        };
        (cli.common.a, cli.common.b, cli.common.c) = (a, b, c);
    }
    let result = run(&cli.common, &cli.command).and_then(|report| emit(&cli.common, &report).map(|()| report.ok));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
