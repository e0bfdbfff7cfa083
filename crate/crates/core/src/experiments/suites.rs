//! Fixed verification suites at desk-scale parameters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::ToPrimitive;

use super::brute::Census;
use super::report::{Criterion, ExperimentReport, ReportRow, CSV_COLUMNS};
use super::runners::run;
use super::spec::{Compare, ExperimentKind, ExperimentSpec};
use super::stats::{chi_square, chi_square_two_sample};
use crate::asymptotics::gap_prob_critical;
use crate::error::{Error, Result};
use crate::permutation::{all_permutations, from_inv_sequence, psi_shift, psi_unshift, Permutation};
use crate::qcount::{
    exact_gap_prob, exact_pattern_prob, gap_counts, mahonian, mahonian_row, prefix_count, prefix_count_row,
    ExactProbability,
};
use crate::sampler::{mix64, run_streams, PermSampler, SamplerKind, DEFAULT_SEED, DEFAULT_STREAMS};

/// Stored value of the gap probability at `(n, m, k) = (400, 4000, 20)`.
pub const GOLDEN_GAP_400_4000_20: f64 = 0.221_229_126_982_835_76;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Identities,
    Bijection,
    Sampler,
    Thm1,
    Thm2,
    Thm5,
    Prop3,
    Prop8,
    Eq1,
    Fig1,
    All,
}

impl Suite {
    /// Every suite that `All` runs, in order.
    pub const EACH: [Suite; 10] = [
        Suite::Identities,
        Suite::Bijection,
        Suite::Sampler,
        Suite::Thm1,
        Suite::Thm2,
        Suite::Thm5,
        Suite::Prop3,
        Suite::Prop8,
        Suite::Eq1,
        Suite::Fig1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Bijection => "bijection",
            Suite::Sampler => "sampler",
            Suite::Thm1 => "thm1",
            Suite::Thm2 => "thm2",
            Suite::Thm5 => "thm5",
            Suite::Prop3 => "prop3",
            Suite::Prop8 => "prop8",
            Suite::Eq1 => "eq1",
            Suite::Fig1 => "fig1",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::Spec(format!("unknown suite '{}'", s.trim())))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SuiteOptions {
    pub seed: u64,
    pub streams: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { seed: DEFAULT_SEED, streams: DEFAULT_STREAMS }
    }
}

impl SuiteOptions {
    /// Seed for the experiment numbered `tag`, so that experiments within a
    /// suite use unrelated streams.
    fn seed_for(&self, tag: u64) -> u64 {
        mix64(self.seed ^ mix64(tag))
    }

    fn spec(&self, kind: ExperimentKind, tag: u64) -> ExperimentSpec {
        let mut s = ExperimentSpec::new(kind);
        s.seed = self.seed_for(tag);
        s.streams = self.streams;
        s
    }
}

/// Reports of one suite run.
#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub suite: Suite,
    pub options: SuiteOptions,
    pub reports: Vec<(Suite, ExperimentReport)>,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.reports.iter().all(|(_, r)| r.pass())
    }

    /// Pass flag of each constituent suite.
    pub fn verdicts(&self) -> BTreeMap<Suite, bool> {
        let mut out: BTreeMap<Suite, bool> = BTreeMap::new();
        for (s, r) in &self.reports {
            let e = out.entry(*s).or_insert(true);
            *e &= r.pass();
        }
        out
    }

    /// Rows of the reports belonging to `suite`.
    pub fn rows(&self, suite: Suite) -> impl Iterator<Item = &ReportRow> {
        self.reports.iter().filter(move |(s, _)| *s == suite).flat_map(|(_, r)| r.rows.iter())
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("verify suite={} seed={} streams={}\n", self.suite, self.options.seed, self.options.streams);
        let mut current = None;
        for (s, r) in &self.reports {
            if current != Some(*s) {
                out.push_str(&format!("[{s}]\n"));
                current = Some(*s);
            }
            out.push_str(&r.to_text());
        }
        for (s, ok) in self.verdicts() {
            out.push_str(&format!("{s}: {}\n", if ok { "PASS" } else { "FAIL" }));
        }
        out.push_str(&format!("overall: {}\n", if self.pass() { "PASS" } else { "FAIL" }));
        out
    }

    /// One CSV table with a leading `suite` column; per-report metadata goes
    /// into comment lines.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# suite={} seed={} streams={}", self.suite, self.options.seed, self.options.streams)?;
        for (s, r) in &self.reports {
            writeln!(
                out,
                "# {s}: kind={} seed={} sampler={} engine={}",
                r.meta.kind, r.meta.seed, r.meta.sampler, r.meta.engine
            )?;
        }
        writeln!(out, "suite,{}", CSV_COLUMNS.join(","))?;
        for (s, r) in &self.reports {
            let body = r.to_csv();
            for line in body.lines().filter(|l| !l.starts_with('#')).skip(1) {
                writeln!(out, "{s},{line}")?;
            }
        }
        Ok(())
    }

    pub fn write_json_lines<W: Write>(&self, mut out: W) -> Result<()> {
        for (s, r) in &self.reports {
            let meta = serde_json::json!({ "suite": s.name(), "meta": &r.meta, "notes": &r.notes });
            writeln!(out, "{meta}")?;
            for row in &r.rows {
                let mut v = serde_json::to_value(row).map_err(|e| Error::Numerical(e.to_string()))?;
                v["suite"] = serde_json::Value::from(s.name());
                writeln!(out, "{v}")?;
            }
        }
        Ok(())
    }
}

/// Runs `suite` (every suite for [`Suite::All`]).
pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteResult> {
    let list: Vec<Suite> = if suite == Suite::All { Suite::EACH.to_vec() } else { vec![suite] };
    let mut reports = Vec::new();
    for s in list {
        for r in run_one(s, opts)? {
            reports.push((s, r));
        }
    }
    Ok(SuiteResult { suite, options: *opts, reports })
}

fn run_one(suite: Suite, opts: &SuiteOptions) -> Result<Vec<ExperimentReport>> {
    Ok(match suite {
        Suite::Identities => vec![identities_brute()?, identities_structural()?],
        Suite::Bijection => vec![bijection()?],
        Suite::Sampler => vec![sampler_uniformity(opts, 6, 5, 1_000_000)?],
        Suite::Thm1 => {
            let mut s = opts.spec(ExperimentKind::PatternCensus, 10);
            s.n = vec![4000];
            s.m_c = 1.0;
            s.m_gamma = 1.5;
            s.k = vec![2, 3];
            s.samples = 100_000;
            vec![run(&s)?]
        }
        Suite::Thm2 => thm2(opts)?,
        Suite::Thm5 => {
            let mut a = opts.spec(ExperimentKind::GapSweep, 20);
            a.n = vec![3000];
            a.m = Some(60_000);
            a.k = vec![1, 10, 20, 40, 400];
            a.samples = 100_000;
            a.compare = Compare::Limit;
            let mut b = opts.spec(ExperimentKind::GapSweep, 21);
            b.n = vec![400];
            b.m = Some(4000);
            b.k = vec![20];
            b.samples = 100_000;
            b.compare = Compare::Exact;
            let mut sweep = run(&b)?;
            let exact = exact_gap_prob(400, 4000, 20)?;
            let drift = (exact.approx() - GOLDEN_GAP_400_4000_20).abs();
            sweep.rows.push(
                ReportRow::new("gap_sweep", "k=20 golden", 400, 4000, 20)
                    .exact(&exact)
                    .prediction(GOLDEN_GAP_400_4000_20)
                    .judge(Criterion::Exact { equal: drift < 1e-12 }),
            );
            vec![run(&a)?, sweep]
        }
        Suite::Prop3 => {
            let mut s = opts.spec(ExperimentKind::TailWeakcomp, 30);
            s.t = 10_000;
            s.s = 1_000_000;
            s.epsilon = 1.0;
            s.samples = 1000;
            vec![run(&s)?]
        }
        Suite::Prop8 => {
            let mut s = opts.spec(ExperimentKind::TailDensity, 40);
            s.n = vec![10_000];
            s.theta = 0.02;
            s.samples = 100_000;
            vec![run(&s)?]
        }
        Suite::Eq1 => {
            let mut s = opts.spec(ExperimentKind::Eq1Equivalence, 50);
            s.n = (1..=30).collect();
            s.k = (1..=5).collect();
            vec![run(&s)?]
        }
        Suite::Fig1 => vec![figure1(opts, 825, 3399, 1000)?],
        Suite::All => unreachable!(),
    })
}

fn exact_row(kind: &str, label: String, n: usize, m: u64, k: usize, checks: u64, agree: u64) -> ReportRow {
    let mut row = ReportRow::new(kind, label, n, m, k)
        .value(if checks == 0 { 1.0 } else { agree as f64 / checks as f64 })
        .judge(Criterion::Exact { equal: agree == checks });
    row.trials = Some(checks);
    row.successes = Some(agree);
    row
}

fn exact_report(kind: &str) -> ExperimentReport {
    let mut r = ExperimentReport::new(kind, 0, 1, "-");
    r.meta.engine = "exact".into();
    r
}

/// Every count and probability for `n <= 8` against exhaustive enumeration.
pub fn identities_brute() -> Result<ExperimentReport> {
    let mut report = exact_report("identities_brute");
    for n in 1..=8usize {
        let census = Census::new(n, 4);
        let top = census.mahonian.len() as u64 - 1;
        let (mut checks, mut agree) = (0u64, 0u64);
        let mut check = |ok: bool| {
            checks += 1;
            agree += u64::from(ok);
        };
        for m in 0..=top {
            let total = census.mahonian[m as usize];
            check(mahonian(n, m) == BigUint::from(total));
            for k in 1..=n.min(4) {
                for tau in all_permutations(k) {
                    let brute = census.prefix_count(k, m, tau.values());
                    check(prefix_count(n, m, k, tau.inv_count())? == BigUint::from(brute));
                    let p = exact_pattern_prob(n, m, &tau)?;
                    check(p == ExactProbability::new(brute.into(), total.into()));
                }
            }
            for k in 1..n {
                let (up, down) = census.gap_counts(k, m);
                let g = gap_counts(n, m, k)?;
                check(g.up == BigUint::from(up) && g.down == BigUint::from(down));
                let p = exact_gap_prob(n, m, k)?;
                check(p == ExactProbability::new(down.into(), total.into()));
            }
        }
        report.rows.push(exact_row("identities_brute", format!("brute n={n}"), n, top, 4.min(n), checks, agree));
    }
    Ok(report)
}

/// Summing prefix counts over prefixes, and splitting by gap orientation,
/// both recover the Mahonian numbers.
pub fn identities_structural() -> Result<ExperimentReport> {
    let mut report = exact_report("identities_structural");
    for n in 1..=12usize {
        let top = n * (n - 1) / 2;
        let full = mahonian_row(n, top);
        let (mut checks, mut agree) = (0u64, 0u64);
        for k in 0..=n {
            let completions = prefix_count_row(n, k, top)?;
            let summed = mahonian_row(k, top).convolve(&completions);
            checks += 1;
            agree += u64::from(summed.coeffs() == full.coeffs());
        }
        report.rows.push(exact_row("identities_structural", format!("prefix_sum n={n}"), n, top as u64, n, checks, agree));
        let (mut checks, mut agree) = (0u64, 0u64);
        for k in 1..n {
            for m in 0..=top as u64 {
                let g = gap_counts(n, m, k)?;
                checks += 1;
                agree += u64::from(&g.up + &g.down == full.get(m as usize));
            }
        }
        report.rows.push(exact_row("identities_structural", format!("gap_split n={n}"), n, top as u64, n - 1, checks, agree));
    }
    Ok(report)
}

/// The two worked examples and the shift bijection on small `S_n`.
pub fn bijection() -> Result<ExperimentReport> {
    let kind = "bijection";
    let mut report = exact_report(kind);

    let p: Permutation = "735846192".parse()?;
    let code = p.to_inv_sequence();
    let ok = code.terms() == [0, 1, 1, 0, 3, 2, 6, 0, 7] && code.sum() == 20 && p.inv_count() == 20;
    report.rows.push(exact_row(kind, "code 735846192 = 011032607".into(), 9, 20, 9, 1, u64::from(ok)));
    let td = p.total_displacement();
    let ok = p.inv_density()? == Ratio::new(5, 9) && (20..=40).contains(&td) && from_inv_sequence(code.terms())? == p;
    report.rows.push(exact_row(kind, "density 5/9 and displacement".into(), 9, 20, 9, 1, u64::from(ok)));

    let p: Permutation = "714592683".parse()?;
    let q = psi_shift(&p);
    let pattern: Permutation = "2341".parse()?;
    let ok = q == "761349258".parse()?
        && p.window_pattern(3, 4)? == pattern
        && q.window_pattern(4, 4)? == pattern
        && psi_unshift(&q) == p
        && q.inv_count() == p.inv_count();
    report.rows.push(exact_row(kind, "shift 714592683 = 761349258".into(), 9, p.inv_count(), 4, 1, u64::from(ok)));

    for n in 1..=7usize {
        let (mut checks, mut agree) = (0u64, 0u64);
        let mut images = BTreeSet::new();
        for p in all_permutations(n) {
            let q = psi_shift(&p);
            let mut ok = q.inv_count() == p.inv_count() && psi_unshift(&q) == p;
            for k in 1..n {
                for j in 1..=n - k {
                    ok &= p.window_pattern(j, k)? == q.window_pattern(j + 1, k)?;
                }
            }
            ok &= from_inv_sequence(p.to_inv_sequence().terms())? == p;
            images.insert(q);
            checks += 1;
            agree += u64::from(ok);
        }
        checks += 1;
        agree += u64::from(images.len() as u64 == (1..=n as u64).product::<u64>());
        report.rows.push(exact_row(kind, format!("shift on S_{n}"), n, 0, n, checks, agree));
    }
    Ok(report)
}

/// Chi-square goodness of fit of both samplers against the uniform law on
/// `S_{n,m}`, and of the two samplers against each other.
pub fn sampler_uniformity(opts: &SuiteOptions, n: usize, m: u64, draws: u64) -> Result<ExperimentReport> {
    let kind = "sampler_uniformity";
    let mut report = ExperimentReport::new(kind, opts.seed, opts.streams, "dp+tilted");
    let class: Vec<Permutation> = all_permutations(n).filter(|p| p.inv_count() == m).collect();
    let size = mahonian(n, m).to_u64().ok_or_else(|| Error::Numerical("class too large".into()))?;
    if class.len() as u64 != size {
        return Err(Error::Numerical(format!("enumeration found {} elements, expected {size}", class.len())));
    }
    let index: BTreeMap<Permutation, usize> = class.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    let cells = class.len();
    let expected = vec![draws as f64 / size as f64; cells];
    let mut hists = Vec::new();
    for (tag, kind_s) in [(60u64, SamplerKind::Dp), (61, SamplerKind::Tilted)] {
        let sampler = PermSampler::new(kind_s, n, m)?;
        let engine = sampler.engine_name();
        report.meta.engine = if report.meta.engine.is_empty() { engine.into() } else { format!("{}+{engine}", report.meta.engine) };
        let parts = run_streams(opts.seed_for(tag), opts.streams, draws, |rng, count| -> Result<(Vec<u64>, u64)> {
            let mut counts = vec![0u64; cells];
            let mut outside = 0u64;
            for _ in 0..count {
                match index.get(&sampler.sample(rng)?) {
                    Some(&i) => counts[i] += 1,
                    None => outside += 1,
                }
            }
            Ok((counts, outside))
        });
        let mut counts = vec![0u64; cells];
        let mut outside = 0;
        for part in parts {
            let (c, o) = part?;
            outside += o;
            for (t, x) in counts.iter_mut().zip(c) {
                *t += x;
            }
        }
        let chi = chi_square(&counts, &expected)?;
        report.rows.push(
            ReportRow::new(kind, format!("{engine} chi2"), n, m, n)
                .param("chi2", chi.statistic)
                .value(chi.p_value)
                .judge(Criterion::PValue { p: chi.p_value, alpha: 1e-3 }),
        );
        let mut row = ReportRow::new(kind, format!("{engine} in class"), n, m, n)
            .judge(Criterion::Exact { equal: outside == 0 });
        row.trials = Some(draws);
        row.successes = Some(draws - outside);
        report.rows.push(row);
        hists.push(counts);
    }
    let two = chi_square_two_sample(&hists[0], &hists[1])?;
    report.rows.push(
        ReportRow::new(kind, "dp vs tilted".to_string(), n, m, n)
            .param("chi2", two.statistic)
            .value(two.p_value)
            .judge(Criterion::PValue { p: two.p_value, alpha: 1e-3 }),
    );
    report.notes.push(format!("{draws} draws per sampler over {size} class elements"));
    Ok(report)
}

fn thm2(opts: &SuiteOptions) -> Result<Vec<ExperimentReport>> {
    let mut window = opts.spec(ExperimentKind::ExactVsAsym, 70);
    window.n = vec![400];
    window.m = Some(4000);
    window.k = vec![2];
    window.taus = vec!["12".parse()?, "21".parse()?];
    let mut a = run(&window)?;
    let v: Vec<f64> = a.rows.iter().filter_map(|r| r.estimate).collect();
    let brackets = v.len() == 2 && v[0] > 1.0 && v[1] < 1.0;
    a.rows.push(
        ReportRow::new(a.meta.kind.clone(), "12 above 1, 21 below", 400, 4000, 2)
            .judge(Criterion::Exact { equal: brackets }),
    );

    let mut ratio = opts.spec(ExperimentKind::ExactVsAsym, 71);
    ratio.n = vec![200, 400, 800];
    ratio.m_c = 10.0;
    ratio.m_gamma = 1.0;
    ratio.k = vec![5];
    ratio.beta = Some(std::f64::consts::LN_2);

    let mut half = opts.spec(ExperimentKind::ExactVsAsym, 72);
    half.n = vec![100, 200, 400, 800];
    half.m_c = 1.0;
    half.m_gamma = 1.5;
    half.k = vec![4];
    half.taus = vec!["2413".parse()?];
    Ok(vec![a, run(&ratio)?, run(&half)?])
}

/// Mean fraction of adjacent descents over samples of `S_{n,m}` drawn with
/// the tilted sampler.
pub fn figure1(opts: &SuiteOptions, n: usize, m: u64, samples: u64) -> Result<ExperimentReport> {
    let kind = "figure1";
    let mut report = ExperimentReport::new(kind, opts.seed, opts.streams, "tilted");
    let sampler = PermSampler::new(SamplerKind::Tilted, n, m)?;
    report.meta.engine = sampler.engine_name().into();
    let parts = run_streams(opts.seed_for(80), opts.streams, samples, |rng, count| -> Result<(f64, f64, u64)> {
        let (mut sum, mut sq, mut wrong) = (0.0, 0.0, 0u64);
        for _ in 0..count {
            let p = sampler.sample(rng)?;
            let f = p.descents() as f64 / (n - 1) as f64;
            sum += f;
            sq += f * f;
            wrong += u64::from(p.inv_count() != m);
        }
        Ok((sum, sq, wrong))
    });
    let (mut sum, mut sq, mut wrong) = (0.0, 0.0, 0u64);
    for part in parts {
        let (a, b, c) = part?;
        sum += a;
        sq += b;
        wrong += c;
    }
    let count = samples as f64;
    let mean = sum / count;
    let var = (sq / count - mean * mean).max(0.0) * count / (count - 1.0).max(1.0);
    let alpha = n as f64 / m as f64;
    let mut row = ReportRow::new(kind, "adjacent descent fraction", n, m, 1)
        .param("alpha", alpha)
        .value(mean)
        .prediction(gap_prob_critical(alpha))
        .judge(Criterion::InRange { lo: 0.43, hi: 0.49 });
    row.trials = Some(samples);
    row.se = Some((var / count).sqrt());
    report.rows.push(row);
    let mut row = ReportRow::new(kind, "inversion count", n, m, n).judge(Criterion::Exact { equal: wrong == 0 });
    row.trials = Some(samples);
    row.successes = Some(samples - wrong);
    report.rows.push(row);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("".parse::<Suite>().is_err());
        assert!("thm9".parse::<Suite>().is_err());
    }

    #[test]
    fn exact_suites_pass() {
        let opts = SuiteOptions::default();
        for s in [Suite::Identities, Suite::Bijection] {
            let r = run_suite(s, &opts).unwrap();
            assert!(r.pass(), "{}", r.to_text());
        }
    }

    #[test]
    fn small_uniformity_and_figure() {
        let opts = SuiteOptions { seed: 3, streams: 4 };
        let r = sampler_uniformity(&opts, 4, 3, 20_000).unwrap();
        assert!(r.pass(), "{}", r.to_text());
        let f = figure1(&opts, 60, 200, 50).unwrap();
        assert_eq!(f.rows[1].successes, Some(50));
    }

    #[test]
    fn csv_has_one_header() {
        let r = run_suite(Suite::Bijection, &SuiteOptions::default()).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("suite,")).count(), 1);
        assert!(text.lines().filter(|l| !l.starts_with('#')).skip(1).all(|l| l.starts_with("bijection,")));
    }
}
