use std::fs;
use std::process::{Command, Output};

fn fixmahon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fixmahon"))
        .args(args)
        .env_remove("FIXMAHON_MAX_N")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn stat_prints_named_values() {
    let out = fixmahon(&["stat", "--perm", "8 2 1 3 5 6 4 9 7", "--stats", "maz,maf"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "maz=13 maf=13\n");

    let out = fixmahon(&[
        "stat",
        "--perm",
        "1 8 2 4 5 3 6 9 7",
        "--stats",
        "fix,maz,maf,DEZ",
    ]);
    assert_eq!(stdout(&out), "fix=3 maz=13 maf=10 DEZ={2,3,8}\n");
}

#[test]
fn poly_modes() {
    let out = fixmahon(&["poly", "--n", "2", "--mode", "comb-triple"]);
    assert_eq!(stdout(&out), "Y^2 + t*q\n");
    let out = fixmahon(&["poly", "--n", "2", "--mode", "gf-q"]);
    assert_eq!(stdout(&out), "Y^2 + q\n");
    let a = fixmahon(&["poly", "--n", "4", "--mode", "gf-t"]);
    let b = fixmahon(&["poly", "--n", "4", "--mode", "comb-triple"]);
    assert_eq!(stdout(&a), stdout(&b));
    let out = fixmahon(&["poly", "--n", "1", "--mode", "gf-t", "--structured"]);
    assert_eq!(stdout(&out), "1 0 0 1\n");
}

#[test]
fn verify_small_passes() {
    for suite in ["pairs", "gf", "triples", "props", "all"] {
        let out = fixmahon(&["verify", "--suite", suite, "--nmax", "1"]);
        assert_eq!(out.status.code(), Some(0), "{suite}: {}", stdout(&out));
    }
}

#[test]
fn verify_exit_codes() {
    let out = fixmahon(&[
        "verify",
        "--suite",
        "pairs",
        "--nmax",
        "4",
        "--mutate",
        "maj-off-by-one",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("fail"));

    let out = fixmahon(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    let out = fixmahon(&["verify", "--suite", "pairs", "--nmax", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("362880"));
    let out = fixmahon(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_permutation_reports_position() {
    let out = fixmahon(&["stat", "--perm", "3 1 3", "--stats", "fix"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("position 3"));
}

#[test]
fn zder_round_trip() {
    for perm in ["1 7 3 5 2 6 4", "2 1", "1 2 3", "4 3 1 2"] {
        let z = fixmahon(&["decomp", "--perm", perm, "--kind", "zder"]);
        let word = stdout(&z);
        let back = fixmahon(&["decomp", "--kind", "zder", "--word", word.trim()]);
        assert_eq!(stdout(&back).trim(), perm);
        let z = fixmahon(&["decomp", "--perm", perm, "--kind", "zdesar"]);
        let back = fixmahon(&["decomp", "--kind", "zdesar", "--word", stdout(&z).trim()]);
        assert_eq!(stdout(&back).trim(), perm);
    }
    let out = fixmahon(&["decomp", "--perm", "1735264", "--kind", "zder"]);
    assert_eq!(stdout(&out), "0 4 0 3 1 0 2\n");
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    let run = |path: &std::path::Path, jobs: &str| {
        fixmahon(&[
            "verify",
            "--suite",
            "all",
            "--nmax",
            "5",
            "--jobs",
            jobs,
            "--report",
            path.to_str().unwrap(),
        ])
    };
    let first = run(&a, "1");
    let second = run(&b, "4");
    assert!(first.status.success());
    assert_eq!(stdout(&first), stdout(&second));
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.contains("claim=pairs/1\nn=0..5\nstatus=pass\n"));
    assert!(!text.contains("elapsed"));
}

#[test]
fn batch_mode() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("perms.txt");
    fs::write(&file, "# sample\n132\n\n2 1 3\n").unwrap();
    let out = fixmahon(&["bij", "--map", "f2", "--file", file.to_str().unwrap()]);
    assert_eq!(stdout(&out), "1 3 2\t3 1 2\n2 1 3\t2 1 3\n");
}

#[test]
fn bijections_with_literal_tables() {
    let out = fixmahon(&["bij", "--map", "dwloc", "--perm", "182453697"]);
    assert!(out.status.success());

    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("dw6.txt");
    let export = fixmahon(&[
        "oracle-export",
        "--kind",
        "dw",
        "--n",
        "6",
        "--out",
        table.to_str().unwrap(),
    ]);
    assert!(export.status.success());
    // swap two images inside the fiber DES = {1, 4}
    let text = fs::read_to_string(&table).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let current = lines
        .iter()
        .find(|l| l.starts_with("5 1 2 3 6 4\t"))
        .unwrap()
        .to_string();
    let old_image = current.split('\t').nth(1).unwrap().to_string();
    let holder = lines
        .iter()
        .find(|l| l.ends_with("\t6 2 3 1 4 5"))
        .unwrap()
        .to_string();
    let holder_source = holder.split('\t').next().unwrap().to_string();
    let swapped = text
        .replace(&current, "5 1 2 3 6 4\t6 2 3 1 4 5")
        .replace(&holder, &format!("{holder_source}\t{old_image}"));
    fs::write(&table, swapped).unwrap();

    let check = fixmahon(&["oracle-import", "--file", table.to_str().unwrap()]);
    assert_eq!(stdout(&check), "valid dw on D_6 (265 pairs)\n");
    let out = fixmahon(&[
        "bij",
        "--map",
        "dwloc",
        "--perm",
        "182453697",
        "--base",
        table.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&out), "1 4 5 9 3 6 2 7 8\n");
}

#[test]
fn import_rejects_broken_tables() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "# kind: dw\n2 3 1\t2 1 3\n3 1 2\t3 1 2\n").unwrap();
    let out = fixmahon(&["oracle-import", "--file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).starts_with("invalid"));

    let word = dir.path().join("word.txt");
    let export = fixmahon(&[
        "oracle-export",
        "--kind",
        "word-f3",
        "--n",
        "4",
        "--positive",
        "2 1",
    ]);
    fs::write(&word, stdout(&export)).unwrap();
    let out = fixmahon(&["oracle-import", "--file", word.to_str().unwrap()]);
    assert_eq!(stdout(&out), "valid word-f3 on Sh(0^2 2 1) (6 pairs)\n");
}
