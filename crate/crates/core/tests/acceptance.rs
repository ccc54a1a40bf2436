//! Exhaustive acceptance suite. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fmtlab_core::cores::core;
use fmtlab_core::games::ef_equivalent;
use fmtlab_core::homsearch::are_isomorphic;
use fmtlab_core::structures::fixtures;
use fmtlab_core::sweep::{run_sweep, Check, SweepConfig};
use fmtlab_core::{Result, Vocabulary};

struct Criterion {
    number: usize,
    title: &'static str,
    limit: Duration,
    run: fn() -> Result<(bool, Vec<String>)>,
}

fn sweep(check: Check, vocab: Vocabulary, max_size: usize, ks: &[usize]) -> Result<(bool, String)> {
    let config = SweepConfig::new(vocab, max_size, ks.to_vec());
    let outcome = run_sweep(check, &config)?;
    if !outcome.passed() {
        eprintln!("{check} counterexamples: {:?}", outcome.samples);
    }
    Ok((outcome.passed(), outcome.report(&config).to_machine_untimed()))
}

fn all(parts: Vec<(bool, String)>) -> (bool, Vec<String>) {
    (parts.iter().all(|p| p.0), parts.into_iter().map(|p| p.1).collect())
}

fn sigma1() -> Vocabulary {
    Vocabulary::graph_with_constants(1)
}

fn lemma28() -> Result<(bool, Vec<String>)> {
    Ok(all(vec![
        sweep(Check::Lemma28, Vocabulary::graph(), 3, &[1, 2])?,
        sweep(Check::Lemma28, sigma1(), 3, &[1, 2])?,
    ]))
}

fn theorem3() -> Result<(bool, Vec<String>)> {
    Ok(all(vec![sweep(Check::Theorem3, sigma1(), 3, &[1, 2])?]))
}

fn theorem2() -> Result<(bool, Vec<String>)> {
    Ok(all(vec![sweep(Check::Theorem2, Vocabulary::graph(), 3, &[])?]))
}

fn cores() -> Result<(bool, Vec<String>)> {
    let (passed, report) = sweep(Check::Cores, Vocabulary::graph(), 5, &[])?;
    let named = [
        (fixtures::p3(), fixtures::k2()),
        (fixtures::c4(), fixtures::k2()),
        (fixtures::k3(), fixtures::k3()),
    ];
    let mut exact = true;
    for (input, expected) in &named {
        exact &= are_isomorphic(&core(input, &[])?.structure, expected)?;
    }
    Ok((passed && exact, vec![report, format!("named cores: {exact}\n")]))
}

fn universal() -> Result<(bool, Vec<String>)> {
    Ok(all(vec![
        sweep(Check::UniversalProperties, Vocabulary::graph(), 3, &[])?,
        sweep(Check::UniversalProperties, sigma1(), 3, &[])?,
    ]))
}

fn ef() -> Result<(bool, Vec<String>)> {
    let (passed, report) = sweep(Check::Ef, Vocabulary::graph(), 3, &[0, 1, 2, 3])?;
    let (k2, p3) = (fixtures::k2(), fixtures::p3());
    let one = ef_equivalent(&k2, &[], &p3, &[], 1)?;
    let two = ef_equivalent(&k2, &[], &p3, &[], 2)?;
    let exact = one && !two;
    Ok((passed && exact, vec![report, format!("K2/P3 rounds 1,2: {one} {two}\n")]))
}

fn lemma29() -> Result<(bool, Vec<String>)> {
    Ok(all(vec![sweep(Check::Lemma29, Vocabulary::graph(), 3, &[0, 1, 2])?]))
}

fn chandra_merlin() -> Result<(bool, Vec<String>)> {
    Ok(all(vec![sweep(Check::ChandraMerlin, Vocabulary::graph(), 3, &[])?]))
}

const CRITERIA: [Criterion; 8] = [
    Criterion { number: 1, title: "existential game vs pp-test agreement", limit: Duration::from_secs(300), run: lemma28 },
    Criterion { number: 2, title: "k-homotopy vs pp-test sweep", limit: Duration::from_secs(600), run: theorem3 },
    Criterion { number: 3, title: "acyclic fibration classification", limit: Duration::from_secs(600), run: theorem2 },
    Criterion { number: 4, title: "core correctness", limit: Duration::from_secs(300), run: cores },
    Criterion { number: 5, title: "universal properties", limit: Duration::from_secs(900), run: universal },
    Criterion { number: 6, title: "EF sanity", limit: Duration::from_secs(300), run: ef },
    Criterion { number: 7, title: "extendability implies EF equivalence", limit: Duration::from_secs(900), run: lemma29 },
    Criterion { number: 8, title: "Chandra-Merlin round-trips", limit: Duration::from_secs(300), run: chandra_merlin },
];

fn main() -> ExitCode {
    // Optional criterion numbers select a subset; libtest flags are ignored.
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let wanted = |n: usize| selected.is_empty() || selected.contains(&n);
    let criteria: Vec<&Criterion> = CRITERIA.iter().filter(|c| wanted(c.number)).collect();
    let mut ok = true;
    let mut first_reports = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let (passed, note) = match result {
            Ok((passed, reports)) => {
                first_reports.push(Some(reports));
                (passed && elapsed <= c.limit, String::new())
            }
            Err(e) => {
                first_reports.push(None);
                (false, format!(" error: {e}"))
            }
        };
        ok &= passed;
        println!(
            "criterion {} ({}): {} in {:.1}s (limit {}s){}",
            c.number,
            c.title,
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            c.limit.as_secs(),
            note
        );
    }

    if !wanted(9) {
        return if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE };
    }

    // Criterion 9: a second run yields byte-identical untimed reports.
    let start = Instant::now();
    let mut identical = true;
    for (c, first) in criteria.iter().zip(&first_reports) {
        let again = (c.run)().ok().map(|(_, r)| r);
        if first.is_none() || again != *first {
            eprintln!("criterion {} reports differ between runs", c.number);
            identical = false;
        }
    }
    ok &= identical;
    println!(
        "criterion 9 (determinism): {} in {:.1}s",
        if identical { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );

    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
