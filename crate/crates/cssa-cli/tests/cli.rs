//! End-to-end runs of the `cssa` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cssa(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cssa"))
        .args(args)
        .current_dir(dir)
        .env("CSSA_SEED", "7")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn setup_abra(dir: &Path) {
    fs::write(dir.join("abra.txt"), "abracadabra").unwrap();
    fs::write(dir.join("seeds.txt"), "# defaults\n101\n1\n").unwrap();
    let out = cssa(
        &["build", "abra.txt", "seeds.txt", "--out", "abra.cssa"],
        dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn build_query_single_and_range() {
    let dir = tempfile::tempdir().unwrap();
    setup_abra(dir.path());

    let out = cssa(&["query", "abra.cssa", "101", "0"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "10");

    let out = cssa(&["query", "abra.cssa", "101", "0..10"], dir.path());
    let positions: Vec<usize> = stdout(&out)
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(positions, vec![10, 3, 5, 7, 0, 8, 1, 4, 6, 9, 2]);

    // The SA itself is addressable.
    let out = cssa(&["query", "abra.cssa", "SA", "0..10"], dir.path());
    let positions: Vec<usize> = stdout(&out)
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(positions, vec![10, 7, 0, 3, 5, 8, 1, 4, 6, 9, 2]);
}

#[test]
fn query_out_of_range_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    setup_abra(dir.path());
    let out = cssa(&["query", "abra.cssa", "101", "999"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = cssa(&["no-such-command"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = cssa(&["query"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn stats_csv_structure_and_values() {
    let dir = tempfile::tempdir().unwrap();
    setup_abra(dir.path());
    let out = cssa(
        &["stats", "abra.cssa", "--csv", "--accesses", "500"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "seed,reference,rho,payload_bpc,overhead_bpc,time_us,depth"
    );
    let rows: Vec<Vec<String>> = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    assert_eq!(rows.len(), 2);

    // Seed 101 compresses at rho=2 over the SA.
    assert_eq!(rows[0][0], "101");
    assert_eq!(rows[0][1], "SA");
    assert_eq!(rows[0][2], "2");
    let payload: f64 = rows[0][3].parse().unwrap();
    assert!((payload - 2.0).abs() < 1e-9, "2 bits per char at rho=2");

    // The all-match seed aliases the SA: zero payload, depth 1.
    assert_eq!(rows[1][0], "1");
    let payload: f64 = rows[1][3].parse().unwrap();
    assert_eq!(payload, 0.0);
    assert_eq!(rows[1][6], "1");
}

#[test]
fn stats_paper_layout_columns() {
    let dir = tempfile::tempdir().unwrap();
    setup_abra(dir.path());
    let out = cssa(
        &["stats", "abra.cssa", "--paper-layout", "--accesses", "200"],
        dir.path(),
    );
    let text = stdout(&out);
    let header = text.lines().next().unwrap();
    for col in ["seed", "reference", "space (bpc)", "time (us)"] {
        assert!(header.contains(col), "missing column {col} in {header:?}");
    }
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn build_rejects_unreadable_input() {
    let dir = tempfile::tempdir().unwrap();
    let out = cssa(
        &["build", "missing.txt", "also-missing.txt", "--out", "x.cssa"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn build_fasta_mode_and_mst_tree() {
    let dir = tempfile::tempdir().unwrap();
    let fasta = ">chr test\nACGTACGTAC\nGTACGTACGT\n>chr2\nACGTN\n";
    fs::write(dir.path().join("t.fa"), fasta).unwrap();
    fs::write(dir.path().join("seeds.txt"), "1101\n1011\n").unwrap();
    let out = cssa(
        &[
            "build",
            "t.fa",
            "seeds.txt",
            "--fasta",
            "--tree",
            "mst-directed",
            "--max-depth",
            "3",
            "--out",
            "t.cssa",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // n = 25 characters after header/newline stripping.
    let out = cssa(&["query", "t.cssa", "1101", "0..24"], dir.path());
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 25);

    let out = cssa(&["plan-tree", "t.cssa"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.lines().next().unwrap().starts_with("entry,parent,depth"));
    assert!(text.contains("# total="));
}

#[test]
fn diffsa_identical_and_edited() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("a.txt"), "abracadabra$").unwrap();
    fs::write(dir.path().join("b.txt"), "abrabbababra$").unwrap();

    let out = cssa(&["diffsa", "a.txt", "a.txt"], dir.path());
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("explicit entries: 0"), "{text}");

    let out = cssa(
        &["diffsa", "a.txt", "b.txt", "--out", "delta.cssad"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = stdout(&out);
    let explicit: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("explicit entries: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(explicit <= 5, "{text}");
    assert!(dir.path().join("delta.cssad").exists());
}

#[test]
fn container_files_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    setup_abra(dir.path());
    let first = fs::read(dir.path().join("abra.cssa")).unwrap();
    let out = cssa(
        &["build", "abra.txt", "seeds.txt", "--out", "abra2.cssa"],
        dir.path(),
    );
    assert!(out.status.success());
    let second = fs::read(dir.path().join("abra2.cssa")).unwrap();
    assert_eq!(first, second);
}
