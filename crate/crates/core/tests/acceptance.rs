//! Acceptance suite. Prints one PASS/FAIL line per criterion with its
//! measured runtime and bound, then fails if any criterion failed.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use ccs_core::equiv::{check_bisimulation, strong_bisim_partition, weak_bisim_partition, saturate, BisimKind};
use ccs_core::gen::{any_term, random_lts, TermGen};
use ccs_core::laws::{all_sync, check_law, expand, law_catalog, sigma, summands, sync};
use ccs_core::lts::{build_lts, Lts, LtsError, LtsLimits};
use ccs_core::parser::{parse, parse_program, render};
use ccs_core::semantics::{transitions, SemanticsConfig, SemanticsError};
use ccs_core::syntax::{Action, Name, Process};
use ccs_core::{rooted_weak_equiv, strong_equiv, weak_equiv};
use common::{complementary, library_moves, naive_strong_gfp, prefixed_sum, seven_actions, Moves};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

struct Outcome {
    id: u32,
    title: &'static str,
    bound: Duration,
    elapsed: Duration,
    result: Result<String, String>,
}

impl Outcome {
    fn passed(&self) -> bool {
        self.result.is_ok() && self.elapsed < self.bound
    }

    fn line(&self) -> String {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let detail = match &self.result {
            Ok(d) if self.elapsed >= self.bound => format!("{d}; over time bound"),
            Ok(d) => d.clone(),
            Err(e) => e.clone(),
        };
        format!(
            "criterion {} {:<34} {}  {:>9.3}s < {:>6.1}s  {}",
            self.id,
            self.title,
            verdict,
            self.elapsed.as_secs_f64(),
            self.bound.as_secs_f64(),
            detail
        )
    }
}

fn run(id: u32, title: &'static str, bound: Duration, f: impl FnOnce() -> Result<String, String>) -> Outcome {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let outcome = Outcome { id, title, bound, elapsed, result };
    // Written to the raw handle so the line shows even when output is captured.
    let _ = writeln!(std::io::stderr(), "{}", outcome.line());
    outcome
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn p(text: &str) -> Process {
    parse(text).expect("test term parses")
}

fn n(s: &str) -> Name {
    Name::new(s).expect("valid name")
}

fn moves_of(text: &str) -> Moves {
    library_moves(&p(text))
}

fn set(items: &[(Action, &str)]) -> Moves {
    items.iter().map(|(u, t)| (u.clone(), p(t))).collect()
}

// 1. a.0 | 'a.0 moves by a, by 'a, and by their synchronization.
fn ex_a() -> Result<String, String> {
    let got = moves_of("a.0 | 'a.0");
    let want = set(&[
        (Action::input(n("a")), "0 | 'a.0"),
        (Action::output(n("a")), "a.0 | 0"),
        (Action::Tau, "0 | 0"),
    ]);
    ensure(got == want, || format!("got {got:?}"))?;
    Ok("3 transitions, exact".into())
}

// 2. Restricting a leaves only the synchronization.
fn ex_b() -> Result<String, String> {
    let got = moves_of("(a.0 | 'a.0) \\ {a}");
    let want = set(&[(Action::Tau, "(0 | 0) \\ {a}")]);
    ensure(got == want, || format!("got {got:?}"))?;
    Ok("1 transition, exact".into())
}

fn law_suite() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let limits = LtsLimits::default();
    let cfg = SemanticsConfig::default();
    let mut total = 0;
    for law in law_catalog() {
        let report = check_law(law.name, 50, &mut rng, &limits, &cfg).map_err(|e| format!("{}: {e}", law.name))?;
        ensure(report.all_passed(), || {
            let f = report.first_failure.as_ref().expect("a failure is recorded");
            format!("{} failed on {} ~ {}", law.name, f.lhs, f.rhs)
        })?;
        total += report.samples;
    }
    Ok(format!("{} laws x 50 instances = {total} verified", law_catalog().len()))
}

/// Non-decreasing index sequences of length 1..=4 over `0..k`.
fn multisets(k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = (0..k).map(|i| vec![i]).collect();
    while let Some(seq) = stack.pop() {
        if seq.len() < 4 {
            let last = *seq.last().expect("nonempty");
            stack.extend((last..k).map(|i| {
                let mut s = seq.clone();
                s.push(i);
                s
            }));
        }
        out.push(seq);
    }
    out.sort();
    out
}

fn expansion_pair(fs: &[(Action, Process)], gs: &[(Action, Process)]) -> Result<(), String> {
    let limits = LtsLimits::default();
    let cfg = SemanticsConfig::default();
    let pp = prefixed_sum(fs);
    let qq = prefixed_sum(gs);
    let ctx = || format!("p = {pp}, q = {qq}");
    let e = expand(&pp, &qq).map_err(|err| format!("{}: {err}", ctx()))?;
    let par = Process::par(pp.clone(), qq.clone());
    let related = strong_equiv(&e, &par, &limits, &cfg).map_err(|err| format!("{}: {err}", ctx()))?.related;
    ensure(related, || format!("expansion not bisimilar for {}", ctx()))?;

    let fsum = summands(&pp).map_err(|err| err.to_string())?;
    let gsum = summands(&qq).map_err(|err| err.to_string())?;

    // Sum: moves of the left-nested sum are the union of the summands' moves.
    let mut parts: Vec<Process> = fsum
        .iter()
        .map(|f| Process::prefix(f.action.clone(), Process::par(f.body.clone(), qq.clone())))
        .collect();
    parts.extend(gsum.iter().map(|g| Process::prefix(g.action.clone(), Process::par(pp.clone(), g.body.clone()))));
    let whole = sigma(&parts).map_err(|err| err.to_string())?;
    let union: Moves = parts.iter().flat_map(library_moves).collect();
    ensure(library_moves(&whole) == union, || format!("sum characterization fails for {}", ctx()))?;

    // Sync: exactly the taus to (P | q_j) for complementary summands j.
    for f in &fsum {
        let got = library_moves(&sync(&f.action, &f.body, &gsum).map_err(|err| err.to_string())?);
        let want: Moves = gsum
            .iter()
            .filter(|g| complementary(&f.action, &g.action))
            .map(|g| (Action::Tau, Process::par(f.body.clone(), g.body.clone())))
            .collect();
        ensure(got == want, || format!("sync characterization fails for {} at {}", ctx(), f.action))?;
    }

    // All-sync: exactly the taus to (p_k | q_k') over complementary pairs.
    let got = library_moves(&all_sync(&fsum, &gsum).map_err(|err| err.to_string())?);
    let want: Moves = fsum
        .iter()
        .flat_map(|f| {
            gsum.iter()
                .filter(|g| complementary(&f.action, &g.action))
                .map(|g| (Action::Tau, Process::par(f.body.clone(), g.body.clone())))
        })
        .collect();
    ensure(got == want, || format!("all-sync characterization fails for {}", ctx()))?;
    Ok(())
}

// 4. Every pair of action multisets with 1..=4 summands per side over
// {a, b, c, 'a, 'b, 'c, tau}, in shuffled order, then every pair of ordered
// action sequences with n + m <= 5. Bodies are drawn from {0, a.0} by a
// seeded generator.
fn expansion_law() -> Result<String, String> {
    let actions = seven_actions();
    let bodies = [Process::Nil, p("a.0")];
    let shapes = multisets(actions.len());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let draw = |shape: &[usize], rng: &mut ChaCha8Rng, shuffle: bool| -> Vec<(Action, Process)> {
        let mut parts: Vec<(Action, Process)> =
            shape.iter().map(|&i| (actions[i].clone(), bodies.choose(rng).expect("two bodies").clone())).collect();
        if shuffle {
            parts.shuffle(rng);
        }
        parts
    };
    let mut pairs = 0usize;
    for left in &shapes {
        for right in &shapes {
            let fs = draw(left, &mut rng, true);
            let gs = draw(right, &mut rng, true);
            expansion_pair(&fs, &gs)?;
            pairs += 1;
        }
    }
    // Every ordered pair of action sequences with n + m <= 5.
    let mut ordered = 0usize;
    for n in 1..=4 {
        for m in 1..=(5 - n) {
            for left in sequences(actions.len(), n) {
                for right in sequences(actions.len(), m) {
                    let fs = draw(&left, &mut rng, false);
                    let gs = draw(&right, &mut rng, false);
                    expansion_pair(&fs, &gs)?;
                    ordered += 1;
                }
            }
        }
    }
    Ok(format!(
        "{pairs} multiset pairs (n, m <= 4) and {ordered} ordered pairs (n + m <= 5): bisimilar, characterizations hold"
    ))
}

/// All index sequences of length `len` over `0..k`.
fn sequences(k: usize, len: u32) -> impl Iterator<Item = Vec<usize>> {
    (0..k.pow(len)).map(move |code| (0..len).map(|i| (code / k.pow(i)) % k).collect())
}

fn random_systems() -> Vec<Lts> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let actions = TermGen::new(2, 1).all_actions();
    (0..500).map(|_| random_lts(&mut rng, 6, 12, &actions)).collect()
}

// 5. Refinement agrees with the naive greatest fixed point.
fn oracle_equivalence() -> Result<String, String> {
    let systems = random_systems();
    let mut pairs = 0;
    for (k, lts) in systems.iter().enumerate() {
        let part = strong_bisim_partition(lts);
        let gfp = naive_strong_gfp(lts);
        for a in 0..lts.num_states() {
            for b in 0..lts.num_states() {
                ensure(part.same_block(a, b) == gfp[a][b], || format!("system {k}: disagreement on ({a}, {b})"))?;
                pairs += 1;
            }
        }
        ensure(check_bisimulation(lts, &part.to_relation(), BisimKind::Strong), || {
            format!("system {k}: partition is not a bisimulation")
        })?;
    }
    Ok(format!("{} systems, {pairs} state pairs agree", systems.len()))
}

// 6. Weak equivalence sanity checks.
fn weak_sanity() -> Result<String, String> {
    let limits = LtsLimits::default();
    let cfg = SemanticsConfig::default();
    let gen = TermGen::new(3, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..100 {
        let body = gen.closed(&mut rng);
        let tp = Process::prefix(Action::Tau, body.clone());
        let report = weak_equiv(&tp, &body, &limits, &cfg).map_err(|e| e.to_string())?;
        ensure(report.related, || format!("tau.P and P unrelated for P = {body}"))?;
        let rel = report.witness.as_ref().expect("related reports carry a witness").to_relation();
        ensure(rel.contains(report.roots.0, report.roots.1), || "witness misses the roots".into())?;
        ensure(check_bisimulation(&report.lts, &rel, BisimKind::Weak), || {
            format!("witness for P = {body} is not a weak bisimulation")
        })?;
    }

    let rooted = rooted_weak_equiv(&p("tau.a.0"), &p("a.0"), &limits, &cfg).map_err(|e| e.to_string())?;
    ensure(!rooted.related, || "tau.a.0 and a.0 rooted-related".into())?;
    let d = rooted.distinguishing.as_ref().expect("unrelated reports carry a distinguishing move");
    ensure(d.state == rooted.roots.0 && d.action == Action::Tau, || format!("unexpected distinguishing move {d:?}"))?;

    let mut pairs = 0;
    for (k, lts) in random_systems().iter().enumerate() {
        let strong = strong_bisim_partition(lts);
        let weak = weak_bisim_partition(&saturate(lts));
        for a in 0..lts.num_states() {
            for b in 0..lts.num_states() {
                if strong.same_block(a, b) {
                    ensure(weak.same_block(a, b), || format!("system {k}: ({a}, {b}) strong but not weak"))?;
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("100 tau.P ~ P witnesses valid; root tau separates; {pairs} strong pairs are weak"))
}

// 7. Unfolding REC by hand:
//   s0 = VM                      --coin-->        s1 = ask-esp.VM1' + ask-am.VM2'
//   s1                           --ask-am-->      s2 = VM2' = rec VM2. 'am-coffee.VM
//   s1                           --ask-esp-->     s3 = VM1' = rec VM1. 'esp-coffee.VM
//   s2 unfolds to 'am-coffee.VM  --'am-coffee-->  s0
//   s3 unfolds to 'esp-coffee.VM --'esp-coffee--> s0
// so 4 states and 5 edges, with both dispensing edges back at the root.
fn vm() -> Result<String, String> {
    let nested = p("rec VM. coin.(ask-esp.(rec VM1. 'esp-coffee.VM) + ask-am.(rec VM2. 'am-coffee.VM))");
    let program = parse_program(
        "VM = coin.(ask-esp.VM1 + ask-am.VM2);\nVM1 = 'esp-coffee.VM;\nVM2 = 'am-coffee.VM;\nVM",
    )
    .map_err(|e| e.to_string())?;
    for term in [nested, program] {
        let lts = build_lts(&term, &LtsLimits::default(), &SemanticsConfig::default()).map_err(|e| e.to_string())?;
        ensure(lts.num_states() == 4 && lts.edges().len() == 5, || {
            format!("{}: {} states, {} edges", render(&term), lts.num_states(), lts.edges().len())
        })?;
        for coffee in ["esp-coffee", "am-coffee"] {
            let out = Action::output(n(coffee));
            let edges: Vec<_> = lts.edges().iter().filter(|e| e.action == out).collect();
            ensure(edges.len() == 1 && edges[0].to == lts.root(), || format!("'{coffee} edge does not return to root"))?;
        }
        let labels: BTreeSet<String> = lts.edges().iter().map(|e| e.action.to_string()).collect();
        let want: BTreeSet<String> =
            ["coin", "ask-esp", "ask-am", "'esp-coffee", "'am-coffee"].iter().map(|s| s.to_string()).collect();
        ensure(labels == want, || format!("edge labels {labels:?}"))?;
    }
    Ok("4 states, 5 edges, coffee edges return to root".into())
}

fn guardedness() -> Result<String, String> {
    let cfg = SemanticsConfig::default();
    let unguarded = transitions(&p("rec X. (X + a.0)"), &cfg);
    ensure(matches!(unguarded, Err(SemanticsError::UnguardedRecursion(_))), || format!("got {unguarded:?}"))?;
    let limits = LtsLimits { max_states: 100, ..LtsLimits::default() };
    let growing = build_lts(&p("rec X. a.(X | X)"), &limits, &cfg);
    ensure(matches!(growing, Err(LtsError::StateSpaceExceeded(100))), || format!("got {growing:?}"))?;
    Ok("UnguardedRecursion and StateSpaceExceeded(100)".into())
}

fn round_trip() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..1000 {
        let depth = rng.gen_range(0..=6);
        let term = any_term(&mut rng, depth);
        let text = render(&term);
        let back = parse(&text).map_err(|e| format!("{text}: {e}"))?;
        ensure(back == term, || format!("{text} reparsed as {}", render(&back)))?;
    }
    Ok("1000 random terms".into())
}

#[test]
fn acceptance() {
    let ms = Duration::from_millis;
    let s = Duration::from_secs;
    let outcomes = [
        run(1, "golden ex_A transitions", ms(100), ex_a),
        run(2, "golden ex_B transitions", ms(100), ex_b),
        run(3, "strong law catalog", s(60), law_suite),
        run(4, "expansion law", s(120), expansion_law),
        run(5, "refinement vs naive fixed point", s(30), oracle_equivalence),
        run(6, "weak equivalence sanity", s(30), weak_sanity),
        run(7, "vending machine LTS", ms(100), vm),
        run(8, "guardedness and state limit", s(1), guardedness),
        run(9, "parser round trip", s(10), round_trip),
    ];
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
