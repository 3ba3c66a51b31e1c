//! Acceptance battery: one PASS/FAIL line per criterion.
//!
//! Criteria 5 and 8 are known to fail at the stated gates; the analysis is recorded with
//! the project notes. The test fails if any other criterion fails or if either of those
//! starts passing unnoticed.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use cilab::cli::config::SuiteConfig;
use cilab::cli::suite::{battery, criteria_status, run_suite, CRITERIA};
use cilab::cli::{Gate, Manifest, Outcome};

const TITLES: [&str; 12] = [
    "toy lemma, exact rationals",
    "toy averaged-defect recursion",
    "multiplier identities",
    "plane-wave residual order",
    "shear subsolution",
    "Muskat subsolution",
    "Euler convex integration",
    "Nash-Kuiper stage scalings",
    "corrugation step contract",
    "commutator exponent",
    "Gauss-map change of variables",
    "suite determinism",
];

/// Runtime ceilings per criterion, in seconds.
fn budget(c: u32) -> Option<f64> {
    match c {
        1 => Some(5.0),
        7 => Some(120.0),
        8 => Some(180.0),
        10 => Some(60.0),
        12 => Some(600.0),
        _ => None,
    }
}

const KNOWN_FAILURES: [u32; 2] = [5, 8];

fn main() {
    let cfg = SuiteConfig::default();
    let echo = serde_json::to_value(&cfg).unwrap();

    // first run entry by entry, for timings
    let start = Instant::now();
    let mut merged = Outcome::default();
    let mut spent: Vec<(u32, Duration)> = Vec::new();
    for e in battery() {
        let t = Instant::now();
        match (e.run)(&cfg) {
            Ok(o) => {
                merged.gates.extend(o.gates);
                merged.measurements.extend(o.measurements);
            }
            Err(err) => merged.gates.push(Gate {
                id: format!("{}.error", e.group),
                criterion: e.criteria.first().copied(),
                value: err.to_string(),
                gate: "no error".into(),
                pass: false,
            }),
        }
        let d = t.elapsed();
        for c in e.criteria {
            spent.push((*c, d));
        }
    }
    let total = start.elapsed();
    let first = Manifest::new("suite", echo.clone(), &merged);

    let second = Manifest::new("suite", echo, &run_suite(&cfg).unwrap());
    let identical = first.to_bytes().unwrap() == second.to_bytes().unwrap();

    let mut failing = BTreeSet::new();
    for (c, status) in criteria_status(&first) {
        let secs: f64 = match c {
            12 => total.as_secs_f64(),
            _ => spent.iter().filter(|(k, _)| *k == c).map(|(_, d)| d.as_secs_f64()).sum(),
        };
        let in_time = budget(c).map(|b| secs < b).unwrap_or(true);
        let mut ok = status.unwrap_or(false) && in_time;
        if c == 12 {
            ok &= identical;
        }
        if !ok {
            failing.insert(c);
        }
        let detail: Vec<String> = first
            .gates
            .iter()
            .filter(|g| g.criterion == Some(c) && !g.pass)
            .map(|g| format!("{} = {} (gate {})", g.id, g.value, g.gate))
            .collect();
        println!(
            "criterion {c:>2} {} {} [{secs:.1} s{}]{}",
            if ok { "PASS" } else { "FAIL" },
            TITLES[(c - 1) as usize],
            budget(c).map(|b| format!(" / {b:.0} s")).unwrap_or_default(),
            if detail.is_empty() { String::new() } else { format!(": {}", detail.join("; ")) },
        );
    }
    println!("manifests byte-identical across runs: {identical}");
    for (k, v) in &first.measurements {
        if k.starts_with("shear.scan") || k.starts_with("shear.benchmark") || k.starts_with("embed.") {
            println!("  {k} = {v}");
        }
    }
    assert_eq!(criteria_status(&first).len(), CRITERIA as usize);
    assert!(first.gates.iter().all(|g| g.criterion.is_none() || g.criterion.unwrap() <= CRITERIA));
    let expected: BTreeSet<u32> = KNOWN_FAILURES.into_iter().collect();
    println!("failing criteria: {failing:?} (recorded: {expected:?})");
    if failing != expected {
        eprintln!("failing criteria differ from the recorded analysis");
        std::process::exit(1);
    }
}
