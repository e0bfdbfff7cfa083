use std::process::{Command, Output};

fn invperm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invperm")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = invperm(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn counts() {
    assert_eq!(stdout(&["count", "mahonian", "--n", "4", "--m", "2"]), "5\n");
    assert_eq!(stdout(&["count", "mahonian", "--n", "9", "--m", "0"]), "1\n");
    assert_eq!(stdout(&["count", "gap", "--n", "4", "--m", "2", "--k", "1"]), "3 2\n");
    assert_eq!(stdout(&["count", "weakcomp", "--t", "3", "--s", "2"]), "6\n");
    assert_eq!(stdout(&["count", "prefix", "--n", "4", "--m", "2", "--k", "2", "--l", "1"]), "2\n");
    let big = stdout(&["count", "mahonian", "--n", "30", "--m", "217"]);
    assert!(big.trim().len() > 25 && big.trim().chars().all(|c| c.is_ascii_digit()));
}

#[test]
fn probabilities() {
    assert_eq!(stdout(&["prob", "pattern", "--n", "4", "--m", "2", "--tau", "21", "--exact"]), "num=2 den=5 approx=0.4\n");
    assert_eq!(stdout(&["prob", "pattern", "--n", "7", "--m", "9", "--tau", "1"]), "num=1 den=1 approx=1\n");
    let json = stdout(&["prob", "gap", "--n", "4", "--m", "2", "--k", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!((v["num"].as_str(), v["den"].as_str()), (Some("2"), Some("5")));
    let approx = stdout(&["prob", "gap", "--n", "40", "--m", "100", "--k", "3", "--approx"]);
    let exact = stdout(&["prob", "gap", "--n", "40", "--m", "100", "--k", "3"]);
    let a: f64 = approx.trim().trim_start_matches("approx=").parse().unwrap();
    let e: f64 = exact.split("approx=").nth(1).unwrap().trim().parse().unwrap();
    assert!((a - e).abs() < 1e-9);
    let golden = stdout(&["prob", "gap", "--n", "400", "--m", "4000", "--k", "20", "--exact"]);
    let g: f64 = golden.split("approx=").nth(1).unwrap().trim().parse().unwrap();
    assert!((g - invperm::experiments::GOLDEN_GAP_400_4000_20).abs() < 1e-12);
}

#[test]
fn predictions() {
    let v: f64 = stdout(&["predict", "gap", "--alpha", "1"]).trim().parse().unwrap();
    assert!((v - 1.0 / (1f64.exp() - 1.0).powi(2)).abs() < 1e-12);
    let v: f64 = stdout(&["predict", "pattern", "--rho", "0.5", "--alpha", "3", "--k", "3"]).trim().parse().unwrap();
    assert!((v - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(invperm(&["predict", "pattern", "--alpha", "1", "--k", "2"]).status.code(), Some(2));
}

#[test]
fn sampling_is_deterministic() {
    assert_eq!(stdout(&["sample", "--n", "10", "--m", "0"]), "1 2 3 4 5 6 7 8 9 10\n");
    let args = ["sample", "--n", "6", "--m", "5", "--count", "3", "--seed", "1"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    assert_eq!(a.lines().count(), 3);
    for line in a.lines() {
        let p: invperm::Permutation = line.parse().unwrap();
        assert_eq!(p.inv_count(), 5);
    }
    let json = stdout(&["sample", "--n", "8", "--m", "10", "--count", "2", "--format", "json", "--sampler", "tilted"]);
    let v: Vec<Vec<u32>> = serde_json::from_str(&json).unwrap();
    assert_eq!(v.len(), 2);
}

#[test]
fn svg_output() {
    let a = stdout(&["sample", "--n", "50", "--m", "100", "--format", "svg", "--seed", "9"]);
    assert_eq!(a, stdout(&["sample", "--n", "50", "--m", "100", "--format", "svg", "--seed", "9"]));
    assert!(a.starts_with("<svg") && a.trim_end().ends_with("</svg>"));
    assert_eq!(a.matches("<circle").count(), 50);
    let p = stdout(&["plot", "--perm", "312"]);
    assert!(p.contains(r#"cx="166.667" cy="166.667""#));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["verify", "--suite", "nope"],
        vec!["verify", "--suite", ""],
        vec!["verify"],
        vec!["count", "mahonian", "--n", "4"],
        vec!["sample", "--n", "4", "--m", "7"],
        vec!["prob", "pattern", "--n", "4", "--m", "2", "--tau", "21", "--exact", "--mc"],
        vec!["prob", "pattern", "--n", "4", "--m", "2", "--tau", "22"],
        vec!["sweep", "--kind", "gap_sweep", "--n", "10", "--k", "10"],
        vec!["frobnicate"],
    ] {
        let out = invperm(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn verify_exact_suites() {
    for suite in ["identities", "bijection", "eq1"] {
        let out = invperm(&["verify", "--suite", suite]);
        assert_eq!(out.status.code(), Some(0), "{suite}");
        assert!(String::from_utf8(out.stdout).unwrap().ends_with("overall: PASS\n"));
    }
}

#[test]
fn sweep_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("census.txt");
    std::fs::write(&spec, "kind = pattern_census\nn = 4\nm = 2\nk = 2\nmode = exact\n").unwrap();
    let csv_path = dir.path().join("out.csv");
    let out = invperm(&["sweep", "--spec", spec.to_str().unwrap(), "--format", "csv", "--out", csv_path.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.lines().any(|l| l.starts_with("pattern_census,21,4,2,2,") && l.contains(",2,5,")));

    let args = ["sweep", "--kind", "gap_sweep", "--n", "60", "--m", "300", "--k", "1,4", "--samples", "2000", "--format", "csv"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let json = stdout(&["sweep", "--kind", "tail_density", "--n", "100", "--theta", "0.7", "--samples", "100", "--format", "json"]);
    assert_eq!(json.lines().count(), 2);
}
