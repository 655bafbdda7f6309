//! Acceptance run: one line per criterion. Built with `harness = false` so the
//! lines always show in `cargo test` output.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use voa_core::lattice::LatticeData;
use voa_core::verify::{enumerate_modules, replay_witnesses, run_suite, Check, SuiteConfig, VerifyReport};

struct Outcome {
    pass: bool,
    detail: String,
    /// a failure whose every failing check is explained and pinned down below
    expected_failure: bool,
}

fn gram(rows: &[&[i64]]) -> LatticeData {
    LatticeData::load(rows.iter().map(|r| r.to_vec()).collect()).expect("valid gram")
}

fn suite(l: LatticeData, name: &str, seed: u64, samples: Option<usize>) -> VerifyReport {
    let mut cfg = SuiteConfig::new(l, name);
    cfg.seed = seed;
    cfg.samples = samples;
    run_suite(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Runs the suite on every lattice and summarises.
fn all_pass(runs: Vec<VerifyReport>) -> Outcome {
    let total: usize = runs.iter().map(|r| r.checks.len()).sum();
    let failed: Vec<&Check> = runs.iter().flat_map(|r| r.failures()).collect();
    let flagged = runs.iter().flat_map(|r| &r.checks).filter(|c| c.id.contains("[flagged]")).count();
    let mut detail = format!("{} runs, {}/{} checks", runs.len(), total - failed.len(), total);
    if flagged > 0 {
        detail.push_str(&format!(", {flagged} flagged cells"));
    }
    if let Some(f) = failed.first() {
        detail.push_str(&format!("; first failure {}: {}", f.id, f.computed));
    }
    Outcome { pass: failed.is_empty() && total > 0, detail, expected_failure: false }
}

fn c1() -> Outcome {
    all_pass(vec![
        suite(gram(&[&[2]]), "table1", 1, None),
        suite(gram(&[&[2, 0], &[0, 2]]), "table1", 2, None),
        suite(gram(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]), "table1", 3, None),
        suite(gram(&[&[2, 1], &[1, 2]]), "table1", 4, None),
    ])
}

fn c2() -> Outcome {
    all_pass(vec![
        suite(gram(&[&[4]]), "table2", 0, None),
        suite(gram(&[&[6]]), "table2", 0, None),
        suite(gram(&[&[2]]), "table3", 0, None),
    ])
}

fn c3() -> Outcome {
    let runs = vec![suite(gram(&[&[-2]]), "table4", 0, None), suite(gram(&[&[-4]]), "table4", 0, None)];
    let flagged_ok = runs.iter().all(|r| {
        let f: Vec<_> = r.checks.iter().filter(|c| c.id.contains("[flagged]")).collect();
        f.len() == 1 && f[0].id.contains("V^{T2,+}") && f[0].pass
    });
    let mut o = all_pass(runs);
    o.pass &= flagged_ok;
    o
}

/// The relation `[omega_a]*[Lambda_bc] = 0` contradicts the tabulated values on
/// `M(1, lambda)`, where both factors act by nonzero scalars. Every other identity
/// must hold everywhere, and this one must fail only on the `M(1, lambda)` tops.
fn c4() -> Outcome {
    let runs = vec![
        suite(gram(&[&[2, 0], &[0, 2]]), "m1-relations", 0, None),
        suite(gram(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]), "m1-relations", 0, None),
    ];
    let failed: Vec<&Check> = runs.iter().flat_map(|r| r.failures()).collect();
    let explained = failed.iter().all(|c| {
        (c.id.starts_with("omega Lambda = 0") || c.id.starts_with("Lambda omega = 0"))
            && c.computed.contains("differs on 2 top level(s): M(1,(")
            && !c.computed.contains("M(1)^")
            && !c.computed.contains("theta")
    });
    let commute_ok =
        runs.iter().flat_map(|r| &r.checks).filter(|c| c.id.starts_with("omega Lambda commute")).all(|c| c.pass);
    let n_failed = failed.len();
    let mut o = all_pass(runs);
    if n_failed > 0 {
        o.detail = format!(
            "{}; all {} failures are omega*Lambda = 0 on M(1,lambda) tops only, the commuting reading holds: {}",
            o.detail, n_failed, commute_ok
        );
        o.expected_failure = explained && commute_ok;
    }
    o
}

fn c5() -> Outcome {
    all_pass(vec![
        suite(gram(&[&[2]]), "rank1-pos", 0, None),
        suite(gram(&[&[4]]), "rank1-pos", 0, None),
        suite(gram(&[&[6]]), "rank1-pos", 0, None),
    ])
}

fn c6() -> Outcome {
    all_pass(vec![suite(gram(&[&[-2]]), "rank1-neg", 0, None), suite(gram(&[&[-4]]), "rank1-neg", 0, None)])
}

fn c7() -> Outcome {
    all_pass(vec![
        suite(gram(&[&[-2, 0], &[0, -2]]), "twist-commute", 0, None),
        suite(gram(&[&[2, 0], &[0, -2]]), "twist-commute", 0, None),
    ])
}

fn c8() -> Outcome {
    all_pass(vec![
        suite(gram(&[&[-2]]), "cocycle-law", 0, None),
        suite(gram(&[&[-2, 0], &[0, -2]]), "cocycle-law", 0, None),
        suite(gram(&[&[0, 1], &[1, 0]]), "cocycle-law", 0, None),
    ])
}

fn c9() -> Outcome {
    let runs =
        vec![suite(gram(&[&[-2, 0], &[0, -2]]), "jacobi", 7, Some(200)), suite(gram(&[&[2]]), "jacobi", 7, Some(200))];
    let twisted = runs.iter().flat_map(|r| &r.checks).filter(|c| c.id.contains(" twisted")).count();
    let mut o = all_pass(runs);
    o.pass &= twisted >= 100;
    o
}

fn c10() -> Outcome {
    all_pass(vec![
        suite(gram(&[&[2]]), "zhu-axioms", 11, Some(100)),
        suite(gram(&[&[-2]]), "zhu-axioms", 11, Some(100)),
    ])
}

fn c11() -> Outcome {
    let rep = suite(gram(&[&[2]]), "o-membership", 0, None);
    let item6 = rep.checks.iter().filter(|c| c.id.starts_with("L(-n) reduction") && c.pass).count();
    let mut o = all_pass(vec![rep]);
    o.pass &= item6 == 6;
    o
}

fn c12() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for (rows, want) in [(vec![vec![-2]], 4), (vec![vec![0, 1], vec![1, 0]], 2), (vec![vec![-2, 0], vec![0, -2]], 8)] {
        let l = LatticeData::load(rows.clone()).expect("valid gram");
        let c = enumerate_modules(&l).expect("census");
        let replay = replay_witnesses(&l, &c).expect("replay");
        let dims: Vec<usize> = c.modules.iter().map(|m| m.top_dim).collect();
        pass &= c.modules.len() == want && c.complete && replay;
        parts.push(format!("{rows:?}: {} modules, top dims {dims:?}", c.modules.len()));
    }
    Outcome { pass, detail: parts.join("; "), expected_failure: false }
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("table1 on d = 1, 2, 3", c1, Duration::from_secs(60)),
        ("table2 k = 2, 3 and table3", c2, Duration::from_secs(120)),
        ("table4 k = 1, 2 with the flagged cell", c3, Duration::from_secs(120)),
        ("m1-relations on d = 2, 3", c4, Duration::from_secs(300)),
        ("rank1-pos k = 1, 2, 3", c5, Duration::from_secs(120)),
        ("rank1-neg k = 1, 2", c6, Duration::from_secs(120)),
        ("twist-commute", c7, Duration::from_secs(300)),
        ("cocycle-law", c8, Duration::from_secs(300)),
        ("jacobi, 400 seeded instances", c9, Duration::from_secs(600)),
        ("zhu-axioms, 200 seeded pairs", c10, Duration::from_secs(600)),
        ("o-membership at cutoff 8", c11, Duration::from_secs(300)),
        ("census", c12, Duration::from_secs(60)),
    ];
    let mut unexpected = 0;
    println!();
    for (i, (title, run, target)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        let slow = if took > *target { format!(" (over {target:?} target)") } else { String::new() };
        let note =
            if o.expected_failure { " [known conflict: omega*Lambda = 0 vs the M(1,lambda) column]" } else { "" };
        println!("criterion {:>2} {verdict}{note}: {title}: {} [{took:.1?}{slow}]", i + 1, o.detail);
        if !o.pass && !o.expected_failure {
            unexpected += 1;
        }
    }
    if unexpected > 0 {
        println!("{unexpected} criteria failed");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
