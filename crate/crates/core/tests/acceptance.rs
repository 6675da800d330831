//! Acceptance run: one line per criterion, then the determinism check.
//! Everything is exact; there are no tolerances.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use hurwitz_tr::verify::{criterion, run_suite, Caps, SuiteReport, SUITES};

const SEED: u64 = 7;

/// Runtime budget per criterion, in seconds.
fn budget(c: u8) -> u64 {
    match c {
        1 | 4 => 60,
        2 | 3 | 5 => 120,
        6 => 10,
        7 => 600,
        8 => 30,
        9 => 180,
        _ => 600,
    }
}

fn line(c: u8, rs: &[&(SuiteReport, Duration)]) -> String {
    let checks = rs.iter().flat_map(|(r, _)| &r.checks);
    let (passed, total) = checks.fold((0, 0), |(p, n), k| (p + k.ok as usize, n + 1));
    let ok = rs.iter().all(|(r, _)| r.residual_zero);
    let names: Vec<&str> = rs.iter().map(|(r, _)| r.suite.as_str()).collect();
    let t: Duration = rs.iter().map(|(_, t)| *t).sum();
    let order = rs.iter().map(|(r, _)| r.max_order_checked).max().unwrap_or(0);
    let mut s = format!(
        "criterion {c:>2} [{}] {} {passed}/{total} checks, order {order}, {:.1}s of {}s",
        names.join("+"),
        if ok { "PASS" } else { "FAIL" },
        t.as_secs_f64(),
        budget(c)
    );
    if let Some(f) = rs.iter().find_map(|(r, _)| r.first_failure.as_ref()) {
        s += &format!("; first failure: {f}");
    }
    s
}

fn cli(threads: usize) -> (Option<i32>, Vec<u8>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hurwitz-tr"));
    for (k, _) in std::env::vars() {
        if k.starts_with("HURWITZ_TR_") {
            cmd.env_remove(k);
        }
    }
    let out = cmd
        .args(["verify", "--suite", "all", "--seed", &SEED.to_string(), "--threads", &threads.to_string()])
        .output()
        .expect("run the CLI");
    (out.status.code(), out.stdout)
}

#[test]
fn acceptance() {
    let caps = Caps::default();
    let mut timed = vec![];
    for s in SUITES {
        let t = Instant::now();
        let r = run_suite(s, &caps, SEED).unwrap();
        timed.push((r, t.elapsed()));
    }
    let mut lines = vec![];
    for c in 1..=9 {
        let rs: Vec<_> = timed.iter().filter(|(r, _)| criterion(&r.suite) == Some(c)).collect();
        lines.push(line(c, &rs));
    }
    let reports: Vec<SuiteReport> = timed.into_iter().map(|(r, _)| r).collect();
    let by = |s: &str| reports.iter().find(|r| r.suite == s).unwrap();

    // The leading-minus closed form of F₀,₃ has the opposite sign: its checks
    // fail on both curves and the leading-plus checks hold.
    let f03 = by("f03");
    let minus: Vec<_> = f03.checks.iter().filter(|k| k.name.contains("leading minus")).collect();
    let plus: Vec<_> = f03.checks.iter().filter(|k| k.name.contains("leading plus")).collect();
    let f03_analysis = minus.len() == 2 && minus.iter().all(|k| !k.ok) && plus.len() == 2 && plus.iter().all(|k| k.ok);
    lines.push(format!(
        "           [f03] known failure: leading-minus form fails on both curves, leading-plus form matches: {}",
        if f03_analysis { "confirmed" } else { "NOT confirmed" }
    ));

    let t = Instant::now();
    let (code1, out1) = cli(1);
    let (code2, out2) = cli(3);
    let v1: serde_json::Value = serde_json::from_slice(&out1).expect("JSON from verify");
    let in_process = serde_json::to_value(&reports).unwrap();
    let deterministic = !out1.is_empty() && out1 == out2 && code1 == code2 && v1["suites"] == in_process;
    lines.push(format!(
        "criterion 10 [verify all] {} byte-identical across runs and 1 vs 3 threads, exit {:?}, {:.1}s",
        if deterministic { "PASS" } else { "FAIL" },
        code1,
        t.elapsed().as_secs_f64()
    ));

    // Written to the real stdout so the lines show up without --nocapture.
    let mut out = std::io::stdout().lock();
    writeln!(out, "\n{}", lines.join("\n")).unwrap();
    drop(out);

    for r in &reports {
        if r.suite != "f03" {
            assert!(r.residual_zero, "{}: {:?}", r.suite, r.first_failure);
        }
    }
    assert!(f03_analysis, "{:?}", f03.checks);
    assert!(deterministic);
    // verify exits 1 because of the f03 suite
    assert_eq!(code1, Some(1));
}
