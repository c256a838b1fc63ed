//! End-to-end tests of the binary: exit codes, report schemas, and
//! reproducibility.

use std::io::Write;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conetheta"))
}

fn write_temp(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new()
        .suffix(".toml")
        .tempfile()
        .unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

#[test]
fn list_scenarios_names_bundled() {
    let out = bin().arg("list-scenarios").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "classical",
        "scaled",
        "siegel_genus2",
        "hermitian",
        "spin",
        "direct_sum",
        "sheared",
    ] {
        assert!(text.contains(name), "missing {name}");
    }
}

#[test]
fn verify_classical_passes_with_exit_zero() {
    let out = bin()
        .args(["verify", "--scenario", "classical", "--jobs", "2"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is a JSON report");
    assert_eq!(report["summary"]["failed"], 0);
    assert!(report["summary"]["total"].as_u64().unwrap() > 50);
}

#[test]
fn schema_violation_exits_two_with_diagnostics() {
    let f = write_temp("name = \"broken\"\n[representation]\nkind = \"real_line\"\n");
    let out = bin()
        .args(["verify", "--scenario"])
        .arg(f.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("lattice"), "diagnostic missing field: {err}");

    // Unknown field diagnostics carry position information from the parser.
    let f2 = write_temp(
        "name = \"broken\"\nbogus_field = 1\n[representation]\nkind = \"real_line\"\n[lattice]\nbasis = [[\"1\"]]\n",
    );
    let out2 = bin()
        .args(["verify", "--scenario"])
        .arg(f2.path())
        .output()
        .unwrap();
    assert_eq!(out2.status.code(), Some(2));
    let err2 = String::from_utf8(out2.stderr).unwrap();
    assert!(err2.contains("bogus_field"), "{err2}");
}

#[test]
fn boundary_point_is_recorded_and_exit_nonzero() {
    // Im z = 0 sits on the cone boundary: the series diverges there.
    let f = write_temp(
        r#"
name = "boundary"
[representation]
kind = "real_line"
[lattice]
basis = [["1"]]
[[points]]
z_re = ["1"]
z_im = ["0"]
"#,
    );
    let out = bin()
        .args(["eval", "--scenario"])
        .arg(f.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let err = report["evaluations"][0]["error"].as_str().unwrap();
    assert!(err.contains("diverges"), "{err}");
}

#[test]
fn inapplicable_check_is_config_error() {
    // dim U = 3 cannot run Fourier extraction.
    let f = write_temp(
        r#"
name = "dim3"
[representation]
kind = "direct_sum"
summands = ["real_line", "sym_real:2"]
[lattice]
basis = [["1","0","0"],["0","1","0"],["0","0","1"]]
[checks]
run = ["fourier_coefficients"]
"#,
    );
    let out = bin()
        .args(["verify", "--scenario"])
        .arg(f.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("not applicable"), "{err}");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let run = || {
        bin()
            .args([
                "verify",
                "--scenario",
                "classical",
                "--seed",
                "42",
                "--jobs",
                "3",
            ])
            .output()
            .unwrap()
    };
    let a = run();
    let b = run();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout, "report bytes differ between runs");
}

#[test]
fn eval_report_roundtrips_through_json() {
    let out = bin()
        .args(["eval", "--scenario", "classical", "--tol", "1e-11"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let report = conetheta::report::EvaluationReport::from_json(&text).unwrap();
    assert_eq!(report.meta.scenario, "classical");
    let first = &report.evaluations[0];
    let value = first.value.unwrap();
    assert!((value[0] - 1.0864348112).abs() < 1e-9);
    // Bound strings survive the roundtrip losslessly.
    assert_eq!(report.to_json(), serde_json::to_string_pretty(&report).unwrap());
}

#[test]
fn custom_representation_normalizes_and_runs() {
    // psi(x) = 4x with base point 1 normalizes to the classical data with
    // the lattice shrunk to Z/4.
    let f = write_temp(
        r#"
name = "custom_scaled"
sample_points = 4
[representation]
kind = "custom"
rho = [["1"]]
psi_basis = [[["4"]]]
base_point = ["1"]
[lattice]
basis = [["1"]]
[checks]
run = ["square_completion", "s_properties", "dual_transform"]
"#,
    );
    let out = bin()
        .args(["verify", "--scenario"])
        .arg(f.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["summary"]["failed"], 0);
}

#[test]
fn scenario_directory_env_var_resolves_names() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("mini.toml"),
        r#"
name = "mini"
sample_points = 2
[representation]
kind = "real_line"
[lattice]
basis = [["1"]]
[checks]
run = ["square_completion"]
"#,
    )
    .unwrap();
    let out = bin()
        .env("CONETHETA_SCENARIO_DIR", dir.path())
        .args(["verify", "--scenario", "mini"])
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let listed = bin()
        .env("CONETHETA_SCENARIO_DIR", dir.path())
        .arg("list-scenarios")
        .output()
        .unwrap();
    assert!(String::from_utf8(listed.stdout).unwrap().contains("mini"));
}

#[test]
fn bench_box_visits_more_terms_and_values_agree() {
    let out = bin().args(["bench"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rows: Vec<Vec<String>> = text
        .lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(|s| s.to_string()).collect())
        .collect();
    assert!(!rows.is_empty());
    // Pair rows by (config, tol); compare term counts and values.
    rows.sort_by_key(|r| (r[0].clone(), r[2].clone(), r[1].clone()));
    let mut sweep_counts: Vec<(f64, u64)> = Vec::new();
    for pair in rows.chunks(2) {
        let (box_row, ell_row) = (&pair[0], &pair[1]);
        assert_eq!(box_row[1], "box");
        assert_eq!(ell_row[1], "ellipsoid");
        let visited_box: u64 = box_row[3].parse().unwrap();
        let visited_ell: u64 = ell_row[3].parse().unwrap();
        assert!(visited_box >= visited_ell);
        if box_row[0].starts_with("herm") {
            assert!(
                visited_box > visited_ell,
                "ellipsoid should visit strictly fewer terms in dimension four"
            );
        }
        // Identical values.
        assert_eq!(box_row[7], ell_row[7]);
        assert_eq!(box_row[8], ell_row[8]);
        if ell_row[0].starts_with("sym_real") {
            sweep_counts.push((ell_row[2].parse().unwrap(), ell_row[4].parse().unwrap()));
        }
    }
    // Monotone term counts across the tolerance sweep.
    sweep_counts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    for w in sweep_counts.windows(2) {
        assert!(w[1].1 >= w[0].1, "term counts not monotone: {sweep_counts:?}");
    }
}
