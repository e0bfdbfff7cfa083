//! One line per acceptance criterion. Exits nonzero if any criterion fails.

use std::process::Command;
use std::time::Instant;

use invperm::experiments::{
    figure1, identities_brute, identities_structural, run_suite, sampler_uniformity, ExperimentReport, ReportRow,
    Suite, SuiteOptions,
};
use invperm::permutation::psi_shift;
use invperm::qcount::mahonian;
use invperm::Permutation;

struct Outcome {
    pass: bool,
    detail: String,
}

fn failed_rows<'a>(rows: impl Iterator<Item = &'a ReportRow>) -> Vec<String> {
    rows.filter(|r| !r.pass)
        .map(|r| match r.deviation {
            Some(d) => format!("{} ({} {:.4})", r.label, r.criterion, d),
            None => r.label.clone(),
        })
        .collect()
}

fn report_outcome(reports: &[&ExperimentReport]) -> Outcome {
    let fails = failed_rows(reports.iter().flat_map(|r| r.rows.iter()));
    let total: usize = reports.iter().map(|r| r.rows.len()).sum();
    Outcome {
        pass: fails.is_empty(),
        detail: if fails.is_empty() { format!("{total} rows") } else { format!("failing: {}", fails.join("; ")) },
    }
}

fn within(mut o: Outcome, secs: f64, limit: f64) -> Outcome {
    if secs >= limit {
        o.pass = false;
        o.detail = format!("{}; took {secs:.1}s, limit {limit}s", o.detail);
    }
    o
}

fn brute_force() -> Outcome {
    let t = Instant::now();
    let r = identities_brute().expect("brute-force battery");
    within(report_outcome(&[&r]), t.elapsed().as_secs_f64(), 120.0)
}

fn structural() -> Outcome {
    let r = identities_structural().expect("structural identities");
    let eq1 = run_suite(Suite::Eq1, &SuiteOptions::default()).expect("eq1 grid");
    let reports: Vec<&ExperimentReport> = std::iter::once(&r).chain(eq1.reports.iter().map(|(_, r)| r)).collect();
    report_outcome(&reports)
}

fn figure_vectors() -> Outcome {
    let p: Permutation = "735846192".parse().unwrap();
    let code = p.to_inv_sequence();
    let code_ok = code.terms() == [0, 1, 1, 0, 3, 2, 6, 0, 7] && code.sum() == 20;
    let q: Permutation = "714592683".parse().unwrap();
    let shifted = psi_shift(&q);
    let pattern: Permutation = "2341".parse().unwrap();
    let shift_ok = shifted.values() == [7, 6, 1, 3, 4, 9, 2, 5, 8]
        && q.window_pattern(3, 4).unwrap() == pattern
        && shifted.window_pattern(4, 4).unwrap() == pattern;
    Outcome {
        pass: code_ok && shift_ok,
        detail: format!("code {code}, shift {shifted}"),
    }
}

fn uniformity() -> Outcome {
    let t = Instant::now();
    let r = sampler_uniformity(&SuiteOptions::default(), 6, 5, 1_000_000).expect("sampler suite");
    let size = mahonian(6, 5);
    let mut o = report_outcome(&[&r]);
    let p: Vec<String> = r.rows.iter().filter(|r| r.label.ends_with("chi2") || r.label.contains(" vs "))
        .map(|r| format!("{} p={:.4}", r.label, r.estimate.unwrap_or(f64::NAN)))
        .collect();
    o.detail = format!("|S_6,5|={size}; {}; {}", p.join(", "), o.detail);
    within(o, t.elapsed().as_secs_f64(), 300.0)
}

fn patterns() -> Outcome {
    let opts = SuiteOptions::default();
    let mc = run_suite(Suite::Thm1, &opts).expect("census");
    let exact = run_suite(Suite::Thm2, &opts).expect("exact checks");
    // the window check at n = 400 is the first exact report
    let reports: Vec<&ExperimentReport> = mc.reports.iter().map(|(_, r)| r).chain(std::iter::once(&exact.reports[0].1)).collect();
    report_outcome(&reports)
}

fn gaps() -> Outcome {
    let r = run_suite(Suite::Thm5, &SuiteOptions::default()).expect("gap sweeps");
    let reports: Vec<&ExperimentReport> = r.reports.iter().map(|(_, r)| r).collect();
    report_outcome(&reports)
}

fn single(suite: Suite) -> Outcome {
    let r = run_suite(suite, &SuiteOptions::default()).expect("suite");
    let mut o = report_outcome(&[&r.reports[0].1]);
    let row = &r.reports[0].1.rows[0];
    o.detail = format!(
        "{}/{} exceed, bound {:.6}; {}",
        row.successes.unwrap_or(0),
        row.trials.unwrap_or(0),
        row.prediction.unwrap_or(f64::NAN),
        o.detail
    );
    o
}

fn figure_one() -> Outcome {
    let t = Instant::now();
    let r = figure1(&SuiteOptions::default(), 825, 3399, 1000).expect("figure samples");
    let mut o = report_outcome(&[&r]);
    let out = Command::new(env!("CARGO_BIN_EXE_invperm"))
        .args(["sample", "--n", "825", "--m", "3399", "--format", "svg"])
        .output()
        .expect("binary runs");
    let svg = String::from_utf8(out.stdout).unwrap_or_default();
    let svg_ok = out.status.success() && svg.starts_with("<svg") && svg.matches("<circle").count() == 825;
    o.pass &= svg_ok;
    o.detail = format!(
        "mean descent fraction {:.4}; svg {}; {}",
        r.rows[0].estimate.unwrap_or(f64::NAN),
        if svg_ok { "ok" } else { "missing" },
        o.detail
    );
    within(o, t.elapsed().as_secs_f64(), 120.0)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut files = Vec::new();
    for i in 0..2 {
        let path = dir.path().join(format!("run{i}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_invperm"))
            .args(["verify", "--suite", "all", "--format", "csv", "--out"])
            .arg(&path)
            .status()
            .expect("binary runs");
        if status.code() == Some(2) || status.code().is_none() {
            return Outcome { pass: false, detail: format!("verify exited with {status}") };
        }
        files.push(std::fs::read(&path).expect("report written"));
    }
    Outcome {
        pass: !files[0].is_empty() && files[0] == files[1],
        detail: format!("{} bytes per report", files[0].len()),
    }
}

type Check = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Check; 10] = [
        ("brute-force equivalence, n <= 8", brute_force),
        ("structural identities and tripartition", structural),
        ("figure vectors", figure_vectors),
        ("sampler uniformity on S_6,5", uniformity),
        ("pattern frequencies and scaled probabilities", patterns),
        ("gap inversions", gaps),
        ("weak composition tail", || single(Suite::Prop3)),
        ("inversion density tail", || single(Suite::Prop8)),
        ("825-point sample", figure_one),
        ("deterministic reports", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check();
        failures += usize::from(!o.pass);
        println!(
            "criterion {:>2} {} {name}: {} ({:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} criteria pass", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
