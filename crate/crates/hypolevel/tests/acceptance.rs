//! Acceptance gate: one criterion per numbered line, all must pass.
//!
//! Criteria 1-10 replay the named verification suites at full scale; 11
//! exercises the installed binary for cross-run, cross-thread determinism.

use std::process::Command;
use std::time::Instant;

use hypolevel::suites::run_suite;

const SEED: u64 = 7;

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn record(&mut self, number: usize, name: &str, pass: bool, detail: String) {
        let status = if pass { "PASS" } else { "FAIL" };
        println!("criterion {number:02} ({name}): {status}");
        if !pass {
            self.failures.push(format!("criterion {number:02} ({name}): {detail}"));
        }
    }

    fn suite(&mut self, number: usize, name: &str, max_secs: Option<f64>) {
        let t = Instant::now();
        let report = run_suite(name, SEED).expect("known suite");
        let elapsed = t.elapsed().as_secs_f64();
        let mut pass = report["pass"] == serde_json::json!(true);
        let mut detail = report.to_string();
        if let Some(limit) = max_secs {
            if elapsed > limit {
                pass = false;
                detail = format!("took {elapsed:.1}s > {limit}s; {detail}");
            }
        }
        self.record(number, name, pass, detail);
    }
}

fn verify_output(suite: &str, threads: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_hypolevel"))
        .args(["verify", suite, "--seed", "7"])
        .env("HYPOLEVEL_THREADS", threads)
        .output()
        .expect("spawn hypolevel");
    assert!(out.status.success(), "verify {suite} failed: {out:?}");
    out.stdout
}

#[test]
fn acceptance() {
    let mut gate = Gate { failures: Vec::new() };

    gate.suite(1, "theorem31", Some(60.0));
    gate.suite(2, "theorem41", Some(60.0));
    gate.suite(3, "counterexamples", None);
    gate.suite(4, "closed-form", None);
    gate.suite(5, "wholedisk", None);
    gate.suite(6, "second-variation", None);
    gate.suite(7, "gradient", None);
    gate.suite(8, "phi-unification", None);
    gate.suite(9, "geometry", None);
    gate.suite(10, "starlike", None);

    // determinism: byte-identical verify JSON across runs and thread counts
    let a = verify_output("counterexamples", "1");
    let b = verify_output("counterexamples", "1");
    let c = verify_output("counterexamples", "4");
    let d = verify_output("second-variation", "1");
    let e = verify_output("second-variation", "4");
    let pass = a == b && a == c && d == e;
    gate.record(11, "determinism", pass, "verify output differs across runs/threads".into());

    assert!(gate.failures.is_empty(), "{:#?}", gate.failures);
}
