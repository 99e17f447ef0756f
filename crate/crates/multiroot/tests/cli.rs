//! End-to-end checks of the command-line binary: exit codes, output shapes,
//! and file side effects.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multiroot"))
}

#[test]
fn list_names_every_problem_and_method() {
    let out = bin().arg("list").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "f1",
        "f2",
        "f3",
        "f4",
        "p1",
        "p2",
        "p3",
        "poly_m2_demo",
        "ns",
        "mns",
        "schroder",
        "osada",
        "dong",
        "chun",
    ] {
        assert!(text.contains(name), "list output is missing {name}");
    }
    assert!(text.contains("m=5"), "list shows multiplicities");
    assert!(text.contains("f, f', f''"), "list shows derivative needs");
}

#[test]
fn solve_csv_has_a_header_and_one_row_per_iterate() {
    let out = bin()
        .args(["solve", "--problem", "f1", "--method", "mns", "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,x,residual,error"));
    let rows: Vec<&str> = lines.collect();
    // Default tolerances stop this problem after three steps: four iterates.
    assert_eq!(rows.len(), 4);
    for (n, row) in rows.iter().enumerate() {
        assert!(row.starts_with(&format!("{n},")), "row {n} is numbered");
        assert_eq!(row.matches(',').count(), 3, "row has four fields: {row}");
    }
}

#[test]
fn solve_plain_reports_termination_and_final_iterate() {
    let out = bin()
        .args(["solve", "--problem", "poly_m2_demo", "--method", "schroder"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("termination: "), "missing termination line");
    assert!(text.contains("\nx = "), "missing final iterate line");
}

#[test]
fn exit_codes_separate_usage_step_failure_and_success() {
    // Unknown problem and unknown method are usage errors.
    let out = bin().args(["solve", "--problem", "nope"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin()
        .args(["solve", "--problem", "f1", "--method", "bogus"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Missing required argument is a usage error too.
    let out = bin().arg("solve").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    // A Newton substep from this seed leaves the logarithm's domain,
    // so the iteration stops on a failed step.
    let out = bin()
        .args(["solve", "--problem", "f2", "--x0", "1000000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("step-failure"), "failure is reported: {text}");
    // Help is a successful outcome.
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn bench_emits_the_full_grid_in_csv() {
    let out = bin().args(["bench", "--format", "csv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 17, "header plus 4 problems x 4 methods");
    assert_eq!(
        lines[0],
        "problem,method,|x1 - root|,|x2 - root|,|x3 - root|,coc,acoc"
    );
    for problem in ["f1", "f2", "f3", "f4"] {
        for method in ["mns", "osada", "dong", "chun"] {
            assert!(
                lines.iter().any(|l| l.starts_with(&format!("{problem},{method},"))),
                "missing row {problem},{method}"
            );
        }
    }
    // Convergence-order cells parse and sit near third order.
    for line in &lines[1..] {
        let cells: Vec<&str> = line.split(',').collect();
        let coc: f64 = cells[5].parse().unwrap();
        let acoc: f64 = cells[6].parse().unwrap();
        assert!((coc - 3.0).abs() < 0.1, "coc {coc} in {line}");
        assert!((acoc - 3.0).abs() < 0.1, "acoc {acoc} in {line}");
    }
}

#[test]
fn bench_writes_markdown_tables_to_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.md");
    let out = bin()
        .args(["bench", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("| problem | method |"), "markdown header");
    assert_eq!(text.lines().count(), 18, "header, rule, and 16 rows");

    // An unwritable destination is an output error.
    let out = bin()
        .args(["bench", "--out", "/nonexistent-dir/table.md"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn basins_renders_a_ppm_and_prints_stats() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p1.ppm");
    let out = bin()
        .args(["basins", "--problem", "p1", "--size", "48", "--stats", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    for key in ["root_0_count: ", "root_2_count: ", "black_count: ", "mean_iterations: "] {
        assert!(stdout.contains(key), "stats output is missing {key}");
    }
    let bytes = std::fs::read(&path).unwrap();
    assert!(bytes.starts_with(b"P6\n48 48\n255\n"));
    assert_eq!(bytes.len(), 13 + 48 * 48 * 3);
}

#[test]
fn basins_rejects_bad_requests_and_unwritable_outputs() {
    // Not a polynomial problem with listed roots.
    let out = bin()
        .args(["basins", "--problem", "f1", "--out", "/tmp/unused.ppm"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Malformed window.
    let out = bin()
        .args(["basins", "--problem", "p1", "--bounds", "1,2,3", "--out", "/tmp/unused.ppm"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Window with inverted bounds.
    let out = bin()
        .args(["basins", "--problem", "p1", "--bounds", "3,-3,-3,3", "--out", "/tmp/unused.ppm"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    // Unwritable destination.
    let out = bin()
        .args(["basins", "--problem", "p1", "--size", "8", "--out", "/nonexistent-dir/p1.ppm"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}
