//! The eleven acceptance criteria, one line each. Runs without the libtest
//! harness so the lines always show; exits nonzero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use ultracc::suites::{run, Check, Suite, VerifyConfig};
use ultracc_core::identities::chebyshev_triple;

struct Outcome {
    checks: Vec<Check>,
    extra: String,
}

impl Outcome {
    fn of(checks: Vec<Check>) -> Self {
        Outcome { checks, extra: String::new() }
    }
}

fn suite(s: Suite) -> Vec<Check> {
    let cfg = VerifyConfig { lambdas: Vec::new(), imax: None };
    match run(s, &cfg) {
        Ok(out) => out.checks,
        Err(e) => vec![Check::holds(s.name(), format!("suite raised {e}"), false)],
    }
}

fn cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_ultracc")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// Dyck paths of length `i+j+k` cut into segments of lengths `i`, `j`, `k`
/// with no up step matched by a down step inside the same segment.
fn dyck_count(i: usize, j: usize, k: usize) -> u64 {
    let n = i + j + k;
    let segment = |pos: usize| {
        if pos < i {
            0
        } else if pos < i + j {
            1
        } else {
            2
        }
    };
    let mut count = 0;
    for mask in 0u32..(1 << n) {
        let mut stack = Vec::new();
        let mut ok = true;
        for pos in 0..n {
            if mask >> pos & 1 == 1 {
                stack.push(pos);
            } else {
                match stack.pop() {
                    Some(up) if segment(up) != segment(pos) => {}
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
        }
        if ok && stack.is_empty() {
            count += 1;
        }
    }
    count
}

fn criterion_1_and_2() -> (Outcome, Outcome) {
    let start = Instant::now();
    let checks = suite(Suite::Coeffs);
    let secs = start.elapsed().as_secs_f64();
    let (two, mut one): (Vec<Check>, Vec<Check>) =
        checks.into_iter().partition(|c| c.name.starts_with("ratio") || c.name.starts_with("f_1"));
    one.push(Check::at_most("coeffs", "runtime in seconds", secs, 60.0));
    (Outcome { checks: one, extra: format!("{secs:.1} s") }, Outcome::of(two))
}

fn criterion_4() -> Outcome {
    let mut c = suite(Suite::GevpI);
    c.extend(suite(Suite::GevpJ));
    Outcome::of(c)
}

fn criterion_9() -> Outcome {
    let mut c = suite(Suite::AsymRay);
    let (code, _) = cli(&["asym", "--mode", "ray", "--k1", "2", "--k2", "1"]);
    c.push(Check::holds("asym-ray", format!("cli exit code {code} for (2,1)"), code == 5));
    let (code, _) = cli(&["asym", "--mode", "ray", "--k1", "4", "--k2", "3", "--t", "5,10,20,40"]);
    c.push(Check::holds("asym-ray", "cli ray report for (4,3)", code == 0));
    Outcome::of(c)
}

fn criterion_10() -> Outcome {
    let mut c = suite(Suite::Figures);
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for fig in ["1", "2", "3"] {
        for d in &dirs {
            let path = d.path().to_str().unwrap();
            let (code, _) = cli(&["simulate", "--figure", fig, "--out", path]);
            c.push(Check::holds("figures", format!("cli figure {fig} exit {code}"), code == 0));
        }
    }
    let mut names: Vec<_> = std::fs::read_dir(dirs[0].path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    for name in &names {
        let a = std::fs::read(dirs[0].path().join(name)).unwrap();
        let b = std::fs::read(dirs[1].path().join(name)).ok();
        c.push(Check::holds("figures", format!("{} identical across runs", name.to_string_lossy()), Some(a) == b));
    }
    c.push(Check::holds("figures", "five data files", names.len() == 5));
    Outcome { checks: c, extra: format!("{} files", names.len()) }
}

fn criterion_11() -> Outcome {
    let mut c = suite(Suite::Dyck);
    let mut worst = 0.0f64;
    let mut nonzero = 0;
    for n in 0..=10usize {
        for i in 0..=n {
            for j in 0..=n - i {
                let k = n - i - j;
                let brute = dyck_count(i, j, k);
                nonzero += (brute > 0) as usize;
                let count = chebyshev_triple(i, j, k).map(|v| v.1).unwrap_or(f64::NAN);
                worst = worst.max((count - brute as f64).abs());
            }
        }
    }
    c.push(Check::at_most("dyck", "rescaled integral vs Dyck enumeration, i+j+k<=10", worst, 1e-9));
    c.push(Check::holds("dyck", "enumeration finds nonzero counts", nonzero > 0));
    Outcome { checks: c, extra: format!("{nonzero} nonzero triples") }
}

fn main() -> ExitCode {
    let (one, two) = criterion_1_and_2();
    let results: Vec<(u8, &str, Outcome)> = vec![
        (1, "cross-method coefficient agreement", one),
        (2, "calibration ratio constancy", two),
        (3, "wave equation residuals", Outcome::of(suite(Suite::Wave))),
        (4, "bispectral GEVP pair", criterion_4()),
        (5, "orthogonality sums", Outcome::of(suite(Suite::Ortho))),
        (6, "4F3 integral formulas", Outcome::of(suite(Suite::I2))),
        (7, "recurrence propagation", Outcome::of(suite(Suite::Recurrence))),
        (8, "fixed-j asymptotics", Outcome::of(suite(Suite::AsymFixedJ))),
        (9, "ray asymptotics", criterion_9()),
        (10, "figure-level properties", criterion_10()),
        (11, "Dyck-path triple products", criterion_11()),
    ];
    let mut failed = 0;
    for (n, title, o) in &results {
        let bad: Vec<&Check> = o.checks.iter().filter(|c| !c.pass).collect();
        let extra = if o.extra.is_empty() { String::new() } else { format!(", {}", o.extra) };
        if bad.is_empty() && !o.checks.is_empty() {
            println!("criterion {n:>2} PASS  {title} ({} checks{extra})", o.checks.len());
        } else {
            failed += 1;
            let first = bad.first().map_or("no checks ran".to_string(), |c| {
                format!("{}: {} measured {:.3e} bound {:.3e}", c.suite, c.name, c.measured, c.threshold)
            });
            println!("criterion {n:>2} FAIL  {title} ({} of {} checks failed; first {first})", bad.len(), o.checks.len());
        }
    }
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
