use std::process::{Command, Output};

use proptest::prelude::*;
use ultracc::format::{read_csv, sig17, AsymRecord, CheckRecord, GridRecord, IdentityRecord, ResidualRecord, SimRecord};
use ultracc_core::coeffs::{build_grid, Method};
use ultracc_core::orthopoly::UltraParam;

fn ultracc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ultracc")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn grid_csv_reads_back_bit_for_bit() {
    let o = ultracc(&["coeff", "--lambda", "1.5", "--imax", "12", "--jmax", "9", "--method", "quadrature"]);
    assert_eq!(code(&o), 0);
    let recs: Vec<GridRecord> = read_csv(&o.stdout[..]).unwrap();
    let g = build_grid(UltraParam::new(1.5).unwrap(), 12, 9, Method::Quadrature).unwrap();
    assert_eq!(recs.len(), 13 * 10);
    for r in &recs {
        assert_eq!(r.value.to_bits(), g.get(r.i, r.j).to_bits(), "({}, {})", r.i, r.j);
        assert_eq!(r.lambda, 1.5);
    }
}

#[test]
fn identical_config_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    for p in [&a, &b] {
        let o = ultracc(&["coeff", "--lambda", "0.25", "--imax", "15", "--method", "closed-alt", "--out", p.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}

#[test]
fn json_has_the_grid_fields() {
    let o = ultracc(&["coeff", "--lambda", "0.5", "--imax", "2", "--format", "json", "--method", "recurrence-i"]);
    assert_eq!(code(&o), 0);
    let recs: Vec<GridRecord> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(recs.len(), 9);
    let f10 = recs.iter().find(|r| r.i == 1 && r.j == 0).unwrap();
    assert!((f10.value - 3f64.sqrt() / 4.0).abs() < 1e-15);
    assert_eq!(f10.method, "recurrence_i");
}

#[test]
fn both_methods_agree_at_one_and_a_half() {
    let o = ultracc(&["coeff", "--lambda", "1.5", "--imax", "40", "--method", "both"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("i,j,lambda,value,method,flag,quadrature,rel_gap\n"));
    let worst = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    assert!(worst <= 1e-9, "{worst}");
}

#[test]
fn unreliable_entries_exit_two_but_still_write() {
    let o = ultracc(&["coeff", "--lambda", "3", "--imax", "200", "--jmax", "200", "--method", "closed"]);
    assert_eq!(code(&o), 2);
    let recs: Vec<GridRecord> = read_csv(&o.stdout[..]).unwrap();
    assert_eq!(recs.len(), 201 * 201);
    assert!(recs.iter().any(|r| r.flag == "unreliable"));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        &["coeff", "--lambda", "-0.7", "--imax", "3"][..],
        &["verify", "--suite", "all", "--lambda", "0"],
        &["coeff", "--imax", "3"],
        &["asym", "--mode", "ray", "--k1", "3"],
        &["simulate", "--rows", "30", "--n", "10"],
        &["simulate", "--figure", "4"],
    ] {
        let o = ultracc(args);
        assert_eq!(code(&o), 1, "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn verify_reports_checks_and_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let res = dir.path().join("res.csv");
    let o = ultracc(&["verify", "--suite", "wave", "--lambda", "1", "--imax", "30", "--residuals", res.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let checks: Vec<CheckRecord> = read_csv(&o.stdout[..]).unwrap();
    assert_eq!(checks.len(), 1);
    assert_eq!(checks[0].status, "pass");
    let rows: Vec<ResidualRecord> = read_csv(std::fs::File::open(res).unwrap()).unwrap();
    assert_eq!(rows.len(), 31 * 31);
    assert!(rows.iter().all(|r| r.kind == "wave" && r.residual.abs() <= 1e-10 * r.scale.max(1e-300)));
}

#[test]
fn gevp_i_at_legendre_mentions_the_reduction() {
    let o = ultracc(&["verify", "--suite", "gevp-i", "--lambda", "0.5"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stderr).unwrap().contains("Legendre pair"));
}

#[test]
fn failing_suite_exits_four_naming_the_check() {
    // at λ = 3 the i-sum gaps fall below double rounding, so the slope is off
    let dir = tempfile::tempdir().unwrap();
    let ids = dir.path().join("ids.csv");
    let o = ultracc(&["verify", "--suite", "ortho", "--lambda", "3", "--identities", ids.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("verification failed: ortho: i-sum log-log slope"), "{err}");
    let rows: Vec<IdentityRecord> = read_csv(std::fs::File::open(ids).unwrap()).unwrap();
    assert!(rows.iter().filter(|r| r.identity == "sum_over_j").all(|r| r.flag == "ok"));
}

#[test]
fn asym_reports() {
    let o = ultracc(&["asym", "--mode", "fixed-j", "--lambda", "0.5", "--j", "0", "--i", "50:800"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<AsymRecord> = read_csv(&o.stdout[..]).unwrap();
    assert_eq!(rows.len(), 751);
    assert_eq!(rows[0].i_or_t, 50);
    let o = ultracc(&["asym", "--mode", "ray", "--k1", "4", "--k2", "3", "--t", "5,10,20,40"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<AsymRecord> = read_csv(&o.stdout[..]).unwrap();
    assert!(rows.windows(2).all(|w| w[1].rel_err < w[0].rel_err));
    assert!(rows.iter().all(|r| r.exact_sign == r.leading_sign));
    let o = ultracc(&["asym", "--mode", "ray", "--k1", "2", "--k2", "1"]);
    assert_eq!(code(&o), 5);
    assert!(String::from_utf8(o.stderr).unwrap().contains("sqrt(2)*k2/k1 > 1"));
}

#[test]
fn simulate_rows_with_energy() {
    let o = ultracc(&["simulate", "--lambda", "0.5", "--select", "15,20"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<SimRecord> = read_csv(&o.stdout[..]).unwrap();
    for j in [15, 20] {
        let row: Vec<&SimRecord> = rows.iter().filter(|r| r.j == j).collect();
        let front = row.iter().find(|r| r.value.abs() > 1e-12).unwrap();
        assert_eq!(front.i, j);
        assert!(row.iter().all(|r| r.energy == row[0].energy && r.energy < 0.5));
    }
    let o = ultracc(&["simulate", "--mode", "geronimus"]);
    assert_eq!(code(&o), 0);
    let rows: Vec<SimRecord> = read_csv(&o.stdout[..]).unwrap();
    for j in 0..=20 {
        let nz = rows.iter().filter(|r| r.j == j && r.flag != "undefined" && r.value.abs() > 1e-12).count();
        assert!(nz <= 3, "row {j}");
    }
}

#[test]
fn figure_two_writes_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = ultracc(&["simulate", "--figure", "2", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let mut names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["fig2_lambda_0.6.csv", "fig2_lambda_1.5.csv", "fig2_lambda_1.csv"]);
}

proptest! {
    #[test]
    fn any_real_survives_the_text_form(bits in any::<u64>()) {
        let x = f64::from_bits(bits);
        prop_assume!(x.is_finite());
        prop_assert_eq!(sig17(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
    }
}
