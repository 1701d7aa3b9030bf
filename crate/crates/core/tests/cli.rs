use std::process::Command;

use genpos::certify::Certificate;
use serde_json::Value;

fn genpos(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_genpos")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const CANTOR: &str = r#"{"dim":1,"maps":[{"matrix":[[0.3333333333333333]],"offset":[0.0]},{"matrix":[[0.3333333333333333]],"offset":[0.6666666666666666]}],"hull":{"lo":[0.0],"hi":[1.0]}}"#;
const HALVES: &str = r#"{"dim":1,"maps":[{"matrix":[[0.5]],"offset":[0.0]},{"matrix":[[0.5]],"offset":[0.5]}],"hull":{"lo":[0.0],"hi":[1.0]}}"#;

#[test]
fn moran_equal_halves() {
    let (code, out, _) = genpos(&["moran", "--ratios", "0.5,0.5"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["s"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(v["residual"].as_f64().unwrap().abs() <= 1e-12);
}

#[test]
fn moran_weighted_equation() {
    let (code, out, _) = genpos(&["moran", "--ratios", "0.1,0.1", "--coefficients", "1,1", "--target", "1", "--bracket", "0,1"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!((v["s"].as_f64().unwrap() - std::f64::consts::LOG10_2).abs() < 1e-12);
}

#[test]
fn out_of_range_case_parameter_is_input_error() {
    let (code, out, err) = genpos(&["case", "exact-overlap", "--t", "0.2", "--b", "0.1"]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert_eq!(err.lines().count(), 1);
    assert!(err.starts_with("error: t:"), "{err}");
}

#[test]
fn malformed_json_names_the_problem() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(&dir, "bad.json", r#"{"dim":1,"hull":{"lo":[0],"hi":[1]}}"#);
    let (code, _, err) = genpos(&["separate", "--system", &path, "--j", "1", "--k", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("maps"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn separate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cantor = write(&dir, "cantor.json", CANTOR);
    let halves = write(&dir, "halves.json", HALVES);
    let (code, out, _) = genpos(&["separate", "--system", &cantor, "--j", "1", "--k", "2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "disjoint");
    let (code, out, err) = genpos(&["separate", "--system", &halves, "--j", "1", "--k", "2", "--tol", "1e-6"]);
    assert_eq!(code, 1);
    assert!(!out.is_empty() && !err.is_empty());
    let (code, _, _) = genpos(&["separate", "--system", &cantor, "--ssc"]);
    assert_eq!(code, 0);
    let (code, _, err) = genpos(&["separate", "--system", &cantor, "--j", "1", "--k", "1,2"]);
    assert_eq!(code, 2);
    assert!(err.contains("comparable"));
}

#[test]
fn certify_not_holding_still_emits_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(&dir, "fam.json", r#"{"kind":"exact-overlap","b":0.1,"domain":{"lo":[0.01],"hi":[0.1]}}"#);
    let (code, out, _) = genpos(&["certify", "--family", &fam, "--j", "1", "--k", "2", "--cj", "1", "--ck", "1"]);
    assert_eq!(code, 1);
    let c: Certificate = serde_json::from_str(&out).unwrap();
    assert!(!c.holds);
    assert!(c.inputs.contains_key("cj"));
}

#[test]
fn certify_holds_for_dmn_constants() {
    let dir = tempfile::tempdir().unwrap();
    let d = genpos::cases::dmn_interval_exact(2, 3, 0.1).unwrap();
    let fam = write(
        &dir,
        "fam.json",
        &format!(r#"{{"kind":"exact-overlap","b":0.1,"domain":{{"lo":[{}],"hi":[{}]}}}}"#, d.lo, d.hi),
    );
    let (code, out, _) = genpos(&[
        "certify", "--family", &fam, "--j", "1,1", "--k", "2,2,2", "--cj", "0.008", "--ck", "0", "--rj-bound", "0.0011250000001",
    ]);
    assert_eq!(code, 0, "{out}");
    let c: Certificate = serde_json::from_str(&out).unwrap();
    assert!((c.margin.unwrap() - 359.0 / 64.0 * 1e-3).abs() < 1e-12);
}

#[test]
fn certificate_json_round_trips() {
    let c = genpos::cases::exact_overlap_certificate(2, 3, 0.1).unwrap();
    let text = genpos::report::to_canonical_json(&c).unwrap();
    let back: Certificate = serde_json::from_str(&text).unwrap();
    assert_eq!(back, c);
}

#[test]
fn sweep_csv_rows_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(&dir, "fam.json", r#"{"kind":"exact-overlap","b":0.05,"domain":{"lo":[0.0],"hi":[0.1111111111111111]}}"#);
    let out1 = dir.path().join("a.csv");
    let out2 = dir.path().join("b.csv");
    let summary = dir.path().join("s.json");
    for (out, threads) in [(&out1, "1"), (&out2, "3")] {
        let status = Command::new(env!("CARGO_BIN_EXE_genpos"))
            .env("GENPOS_THREADS", threads)
            .args(["sweep", "--family", &fam, "--j", "1,3", "--k", "2,3", "--cells", "50", "--format", "csv"])
            .args(["--out", out.to_str().unwrap(), "--summary", summary.to_str().unwrap()])
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 51);
    assert!(text.starts_with("cell_lo,cell_hi,status,gap_or_overlap,depth\n"));
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["cells"], 50);
}

#[test]
fn bad_thread_count_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let fam = write(&dir, "fam.json", r#"{"kind":"exact-overlap","b":0.05,"domain":{"lo":[0.0],"hi":[0.1]}}"#);
    let out = Command::new(env!("CARGO_BIN_EXE_genpos"))
        .env("GENPOS_THREADS", "zero")
        .args(["sweep", "--family", &fam, "--j", "1", "--k", "2", "--cells", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("GENPOS_THREADS"));
}

#[test]
fn same_command_twice_is_byte_identical() {
    let args = ["case", "one-point", "--p", "0.02", "--q", "0.011", "--r", "0.02", "--max-mn", "2", "--depth", "12"];
    let (c1, o1, _) = genpos(&args);
    let (c2, o2, _) = genpos(&args);
    assert_eq!((c1, &o1), (c2, &o2));
    let v: Value = serde_json::from_str(&o1).unwrap();
    assert_eq!(v["max_mn"], 2);
}

#[test]
fn case_csv_has_one_row_per_pair() {
    let (code, out, _) = genpos(&["case", "exact-overlap", "--t", "0.07", "--b", "0.05", "--max-mn", "3", "--format", "csv"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1 + 9);
}

#[test]
fn witness_search_via_cli() {
    let (code, out, _) = genpos(&["wsp-witness", "--kind", "exact-overlap", "--t", "0.05", "--b", "0.1", "--tol", "1e-2", "--max-exp", "200"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["search"]["reached_tol"].as_bool().unwrap());
    let (code, _, err) = genpos(&["wsp-witness", "--kind", "exact-overlap", "--t", "0.01", "--b", "0.1"]);
    assert_eq!(code, 2);
    assert!(err.contains("rational"));
    let (code, _, _) = genpos(&["wsp-witness", "--kind", "one-point", "--p", "0.02", "--q", "0.01", "--r", "0.025", "--tol", "1e-30", "--max-exp", "20"]);
    assert_eq!(code, 1);
    let (code, _, err) = genpos(&["wsp-witness", "--kind", "one-point", "--p", "0.02", "--r", "0.025"]);
    assert_eq!(code, 2);
    assert!(err.contains("q"));
}

#[test]
fn unwritable_output_is_input_error() {
    let (code, _, err) = genpos(&["moran", "--ratios", "0.5,0.5", "--out", "/nonexistent/dir/x.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("out"));
}

#[test]
fn translation_and_displacement() {
    let (code, _, _) = genpos(&["translation", "--ratios", "0.1,0.1,0.1", "--n", "2", "--k", "1", "--m", "3"]);
    assert_eq!(code, 0);
    let (code, _, _) = genpos(&["translation", "--ratios", "0.3,0.3,0.3", "--n", "1"]);
    assert_eq!(code, 1);
    let dir = tempfile::tempdir().unwrap();
    let fam = write(&dir, "fam.json", r#"{"kind":"one-point","p":0.02,"r":0.02,"domain":{"lo":[0.0],"hi":[0.027]}}"#);
    let (code, out, _) = genpos(&["displacement", "--family", &fam, "--samples", "200", "--seed", "3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["seed"], 3);
}

#[test]
fn csv_refused_for_json_only_commands() {
    let (code, _, err) = genpos(&["moran", "--ratios", "0.5,0.5", "--format", "csv"]);
    assert_eq!(code, 2);
    assert!(err.contains("format"));
}

#[test]
fn in_process_runner_matches_binary() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = genpos::cli::run_with(["genpos", "moran", "--ratios", "0.5,0.25"], &mut out, &mut err);
    assert_eq!(code, 0);
    let (_, bin_out, _) = genpos(&["moran", "--ratios", "0.5,0.25"]);
    assert_eq!(String::from_utf8(out).unwrap(), bin_out);
}
