use std::path::Path;
use std::process::{Command, Output};

use hardyshift_cli::{CsvRow, Report};

fn hardyshift(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardyshift"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn report(out: &Output) -> Report {
    serde_json::from_slice(&out.stdout).expect("valid report JSON")
}

#[test]
fn verify_equivalence_passes() {
    let out = hardyshift(&[
        "verify-equivalence",
        "--m",
        "2",
        "--n",
        "2",
        "--blocks",
        "3",
    ]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    let eq = r.equivalence.unwrap();
    assert!(eq.unitary && eq.intertwines);
    assert_eq!(eq.channels.len(), 4);
    assert_eq!(r.schema_version, "1");
}

#[test]
fn lattice_counts_for_single_channel() {
    let out = hardyshift(&["lattice", "--m", "1", "--n", "1", "--blocks", "3"]);
    assert_eq!(code(&out), 0);
    let counts = report(&out).lattice.unwrap().counts;
    assert_eq!((counts.total_masks, counts.reducing_count), (2, 2));
}

#[test]
fn lattice_cap_is_a_config_error() {
    let out = hardyshift(&["lattice", "--m", "5", "--n", "5", "--blocks", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
    assert!(out.stdout.is_empty());
}

#[test]
fn sampling_mode_bypasses_cap() {
    let args = [
        "lattice", "--m", "5", "--n", "5", "--blocks", "1", "--sample", "8", "--seed", "3",
    ];
    let out = hardyshift(&args);
    assert_eq!(code(&out), 0);
    let lattice = report(&out).lattice.unwrap();
    assert_eq!(lattice.counts.checked_masks, 8);
    assert_eq!(lattice.closure_ok, None);
    assert_eq!(hardyshift(&args).stdout, out.stdout);
}

#[test]
fn invalid_configs_exit_2() {
    assert_eq!(
        code(&hardyshift(&[
            "verify-equivalence",
            "--n",
            "2",
            "--blocks",
            "3"
        ])),
        2
    );
    assert_eq!(
        code(&hardyshift(&[
            "verify-equivalence",
            "--m",
            "0",
            "--n",
            "2",
            "--blocks",
            "3"
        ])),
        2
    );
    assert_eq!(
        code(&hardyshift(&[
            "verify-equivalence",
            "--m",
            "1",
            "--n",
            "1",
            "--blocks",
            "1",
            "--format",
            "csv"
        ])),
        2
    );
    assert_eq!(
        code(&hardyshift(&[
            "verify-equivalence",
            "--m",
            "1",
            "--n",
            "1",
            "--blocks",
            "1",
            "--tol",
            "1e-9"
        ])),
        2
    );
    assert_eq!(code(&hardyshift(&["frobnicate"])), 2);
    assert_eq!(code(&hardyshift(&["--help"])), 0);
}

#[test]
fn unwritable_output_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("missing").join("report.json");
    let out = hardyshift(&[
        "minimality",
        "--m",
        "1",
        "--n",
        "2",
        "--blocks",
        "2",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 4);
    assert!(!target.exists());
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let base = ["full-report", "--m", "2", "--n", "2", "--blocks", "2"];
    let mut with_out: Vec<&str> = base.to_vec();
    with_out.extend(["--out", target.to_str().unwrap(), "--jobs", "2"]);
    assert_eq!(code(&hardyshift(&with_out)), 0);
    let written = std::fs::read(&target).unwrap();
    assert_eq!(written, hardyshift(&base).stdout);
    // only the report itself is left in the directory
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    let r: Report = serde_json::from_slice(&written).unwrap();
    assert!(r.equivalence.is_some() && r.lattice.is_some() && r.minimality.is_some());
}

#[test]
fn csv_round_trip() {
    let out = hardyshift(&[
        "lattice", "--m", "2", "--n", "1", "--blocks", "2", "--format", "csv",
    ]);
    assert_eq!(code(&out), 0);
    let rows: Vec<CsvRow> = csv::Reader::from_reader(out.stdout.as_slice())
        .deserialize()
        .collect::<Result<_, _>>()
        .unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[1].mask_bitstring, "10");
    assert!(rows.iter().all(|r| r.is_reducing));
    assert_eq!(
        rows.iter().filter(|r| r.is_minimal_channel_union).count(),
        2
    );
}

fn write_symbol(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn build_and_commutant_with_symbol_file() {
    let dir = tempfile::tempdir().unwrap();
    let symbol = write_symbol(
        dir.path(),
        "theta.json",
        r#"{"m": 2, "coeffs": [
            {"t": 0, "matrix": [[{"re": "1", "im": "0"}, {"re": "0", "im": "1/2"}],
                                [{"re": "0", "im": "0"}, {"re": "2", "im": "0"}]]},
            {"t": 1, "matrix": [[{"re": "0", "im": "0"}, {"re": "0", "im": "0"}],
                                [{"re": "3", "im": "0"}, {"re": "0", "im": "0"}]]}
        ]}"#,
    );
    let out = hardyshift(&[
        "build", "--m", "2", "--n", "1", "--blocks", "3", "--symbol", &symbol,
    ]);
    assert_eq!(code(&out), 0);
    let op = report(&out).operator.unwrap();
    assert_eq!(op.source, "symbol");
    assert_eq!(op.dim, 6);
    assert_eq!(op.rank, 6);
    assert!(op.commutes_with_shift_on_window);

    let out = hardyshift(&[
        "commutant",
        "--m",
        "2",
        "--n",
        "1",
        "--blocks",
        "3",
        "--symbol",
        &symbol,
    ]);
    assert_eq!(code(&out), 0);
    assert!(report(&out).commutant.unwrap().basis_commutes);

    // symbol of the wrong size
    assert_eq!(
        code(&hardyshift(&[
            "build", "--m", "3", "--n", "1", "--blocks", "3", "--symbol", &symbol
        ])),
        2
    );
    let missing = dir.path().join("nope.json");
    assert_eq!(
        code(&hardyshift(&[
            "build",
            "--m",
            "2",
            "--n",
            "1",
            "--blocks",
            "1",
            "--symbol",
            missing.to_str().unwrap()
        ])),
        2
    );
}

#[test]
fn float_rank_ambiguity_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let symbol = write_symbol(
        dir.path(),
        "tiny.json",
        r#"{"m": 2, "coeffs": [{"t": 0, "matrix": [[{"re": 1}, {"re": 0}], [{"re": 0}, {"re": 1e-9}]]}]}"#,
    );
    let args = [
        "build", "--m", "2", "--n", "1", "--blocks", "2", "--mode", "float", "--symbol", &symbol,
    ];
    assert_eq!(code(&hardyshift(&args)), 3);
    let mut loose: Vec<&str> = args.to_vec();
    loose.extend(["--tol", "1e-6"]);
    let out = hardyshift(&loose);
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out).operator.unwrap().rank, 2);
}

#[test]
fn float_mode_reports_tolerance() {
    let out = hardyshift(&[
        "verify-equivalence",
        "--m",
        "1",
        "--n",
        "3",
        "--blocks",
        "2",
        "--mode",
        "float",
    ]);
    assert_eq!(code(&out), 0);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["params"]["mode"], "float");
    assert_eq!(value["params"]["tol"], 1e-9);
}
