//! `invperm`: counting, limit predictions, sampling, experiments and
//! verification suites for permutations with a fixed number of inversions.

mod svg;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use invperm::asymptotics as asym;
use invperm::experiments::{
    fmt_f64, run, run_suite, ExperimentKind, ExperimentReport, ExperimentSpec, Mode, Suite, SuiteOptions,
};
use invperm::qcount;
use invperm::sampler::{DEFAULT_SEED, DEFAULT_STREAMS};
use invperm::{Permutation, PermSampler, RngStream, SamplerKind};

#[derive(Parser)]
#[command(name = "invperm", version, about = "Permutations with a fixed number of inversions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact counts, printed as decimal integers.
    Count(CountArgs),
    /// Limit laws and tail bounds.
    Predict(PredictArgs),
    /// Probability of a pattern or a gap inversion at a fixed position.
    Prob(ProbArgs),
    /// Uniform samples from S_{n,m}.
    Sample(SampleArgs),
    /// Runs one experiment described by flags or a key=value file.
    Sweep(SweepArgs),
    /// Runs a verification suite; exits 1 if any check fails.
    Verify(VerifyArgs),
    /// SVG scatter plot of a permutation.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Output {
    fn writer(&self) -> anyhow::Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn allow(&self, formats: &[Format]) -> Result<(), Failure> {
        if formats.contains(&self.format) {
            Ok(())
        } else {
            let names: Vec<_> = formats.iter().map(|f| f.to_possible_value().unwrap().get_name().to_string()).collect();
            Err(usage(format!("--format must be one of {} here", names.join(", "))))
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CountKind {
    Mahonian,
    Weakcomp,
    Restricted,
    Suffix,
    Prefix,
    Gap,
}

#[derive(Args)]
struct CountArgs {
    #[arg(value_enum)]
    kind: CountKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<u64>,
    /// Prefix length or gap.
    #[arg(long)]
    k: Option<usize>,
    /// Inversions inside the prefix.
    #[arg(long)]
    l: Option<u64>,
    /// Number of parts.
    #[arg(long)]
    t: Option<usize>,
    /// Total of the parts.
    #[arg(long)]
    s: Option<u64>,
    /// Capacity offset: part j is below j + r (suffix) or below r (restricted).
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum PredictKind {
    /// pattern_prob_critical(rho, alpha, k)
    Pattern,
    /// gap_prob_critical(alpha)
    Gap,
    /// 2 exp(-theta^2 n)
    Density,
    /// (1 + eps)(s/t) ln t and t^(-eps/2)
    Comptail,
    /// C(y, x) / C(y - delta, x)
    Binom,
    /// exp(-beta)
    Ratio,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(value_enum)]
    kind: PredictKind,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    s: Option<u64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    x: Option<u64>,
    #[arg(long)]
    y: Option<u64>,
    #[arg(long)]
    delta: Option<u64>,
    #[arg(long)]
    beta: Option<f64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProbKind {
    Pattern,
    Gap,
}

#[derive(Args)]
struct ProbArgs {
    #[arg(value_enum)]
    kind: ProbKind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: u64,
    /// Pattern, e.g. 2413 or "2 4 1 3".
    #[arg(long)]
    tau: Option<String>,
    /// Gap between the two positions.
    #[arg(long)]
    k: Option<usize>,
    /// Exact rational value (the default).
    #[arg(long, conflicts_with_all = ["mc", "approx"])]
    exact: bool,
    /// Floating-point value from log-space counts; no size limit.
    #[arg(long, conflicts_with = "mc")]
    approx: bool,
    /// Monte Carlo estimate.
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_STREAMS)]
    streams: usize,
    #[arg(long, default_value = "dp")]
    sampler: SamplerKind,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: u64,
    #[arg(long, default_value_t = 1)]
    count: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value = "dp")]
    sampler: SamplerKind,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    /// key=value experiment file; flags given alongside override it.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    kind: Option<String>,
    /// Comma-separated sizes.
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    m: Option<u64>,
    /// Comma-separated pattern lengths or gaps.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    rho: Option<f64>,
    /// Patterns separated by ';'.
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    streams: Option<usize>,
    #[arg(long)]
    sampler: Option<String>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, conflicts_with = "mc")]
    exact: bool,
    #[arg(long)]
    mc: bool,
    /// Any other spec key, as KEY=VALUE; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    /// identities, bijection, sampler, thm1, thm2, thm5, prop3, prop8, eq1, fig1 or all.
    #[arg(long)]
    suite: String,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_STREAMS)]
    streams: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PlotArgs {
    /// Permutation in one-line notation.
    #[arg(long, conflicts_with = "input")]
    perm: Option<String>,
    /// Read the first permutation from this file ('-' for standard input).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    /// Bad flags or parameters; exit 2.
    Usage(String),
    /// Runtime error; exit 1.
    Error(anyhow::Error),
    /// Checks ran and at least one failed; exit 1.
    Checks,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Error(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Error(e.into())
    }
}

impl From<invperm::Error> for Failure {
    fn from(e: invperm::Error) -> Self {
        use invperm::Error::*;
        match e {
            InvalidPermutation { .. }
            | InvalidCode { .. }
            | WindowOutOfRange { .. }
            | Domain(_)
            | EmptyClass { .. }
            | Parse(_)
            | Spec(_) => Failure::Usage(e.to_string()),
            other => Failure::Error(other.into()),
        }
    }
}

fn need<T>(v: Option<T>, flag: &str, what: &str) -> Result<T, Failure> {
    v.ok_or_else(|| usage(format!("{what} needs --{flag}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Count(a) => count(a),
        Command::Predict(a) => predict(a),
        Command::Prob(a) => prob(a),
        Command::Sample(a) => sample(a),
        Command::Sweep(a) => sweep(a),
        Command::Verify(a) => verify(a),
        Command::Plot(a) => plot(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn count(a: CountArgs) -> Result<(), Failure> {
    let out = match a.kind {
        CountKind::Mahonian => {
            let (n, m) = (need(a.n, "n", "mahonian")?, need(a.m, "m", "mahonian")?);
            qcount::check_budget(n, m)?;
            qcount::mahonian(n, m).to_string()
        }
        CountKind::Weakcomp => qcount::weak_comp_count(need(a.t, "t", "weakcomp")?, need(a.s, "s", "weakcomp")?).to_string(),
        CountKind::Restricted => qcount::restricted_comp_count(
            need(a.t, "t", "restricted")?,
            need(a.s, "s", "restricted")?,
            need(a.r, "r", "restricted")?,
        )?
        .to_string(),
        CountKind::Suffix => {
            let (t, s) = (need(a.t, "t", "suffix")?, need(a.s, "s", "suffix")?);
            qcount::check_budget(t, s)?;
            qcount::inv_suffix_count(t, s, need(a.r, "r", "suffix")?).to_string()
        }
        CountKind::Prefix => qcount::prefix_count(
            need(a.n, "n", "prefix")?,
            need(a.m, "m", "prefix")?,
            need(a.k, "k", "prefix")?,
            need(a.l, "l", "prefix")?,
        )?
        .to_string(),
        CountKind::Gap => {
            let g = qcount::gap_counts(need(a.n, "n", "gap")?, need(a.m, "m", "gap")?, need(a.k, "k", "gap")?)?;
            format!("{} {}", g.up, g.down)
        }
    };
    println!("{out}");
    Ok(())
}

fn predict(a: PredictArgs) -> Result<(), Failure> {
    a.output.allow(&[Format::Text, Format::Json])?;
    let mut fields: Vec<(&str, f64)> = Vec::new();
    match a.kind {
        PredictKind::Pattern => {
            let k = need(a.k, "k", "pattern")?;
            let rho = need(a.rho, "rho", "pattern")?;
            let alpha = need(a.alpha, "alpha", "pattern")?;
            if !(0.0..=1.0).contains(&rho) || k == 0 {
                return Err(usage("pattern needs rho in [0, 1] and k >= 1"));
            }
            fields.push(("value", asym::pattern_prob_critical(rho, alpha, k)));
            fields.push(("ln_value", asym::ln_pattern_prob_critical(rho, alpha, k)));
        }
        PredictKind::Gap => {
            let alpha = need(a.alpha, "alpha", "gap")?;
            if alpha.is_nan() || alpha < 0.0 {
                return Err(usage("gap needs alpha >= 0"));
            }
            fields.push(("value", asym::gap_prob_critical(alpha)));
        }
        PredictKind::Density => {
            fields.push(("value", asym::hoeffding_density_bound(need(a.theta, "theta", "density")?, need(a.n, "n", "density")?)));
        }
        PredictKind::Comptail => {
            let t = need(a.t, "t", "comptail")?;
            if t < 2 {
                return Err(usage("comptail needs t >= 2"));
            }
            let (thr, bound) = asym::comp_tail_threshold(t, need(a.s, "s", "comptail")?, need(a.eps, "eps", "comptail")?);
            fields.push(("threshold", thr));
            fields.push(("bound", bound));
        }
        PredictKind::Binom => {
            let v = asym::binom_ratio(need(a.y, "y", "binom")?, need(a.x, "x", "binom")?, need(a.delta, "delta", "binom")?)?;
            fields.push(("value", v));
        }
        PredictKind::Ratio => fields.push(("value", asym::prefix_ratio_prediction(need(a.beta, "beta", "ratio")?))),
    }
    let mut w = a.output.writer()?;
    if a.output.format == Format::Json {
        let map: serde_json::Map<String, serde_json::Value> =
            fields.iter().map(|(k, v)| (k.to_string(), serde_json::json!(v))).collect();
        writeln!(w, "{}", serde_json::Value::Object(map))?;
    } else if fields[0].0 == "value" {
        writeln!(w, "{}", fields[0].1)?;
    } else {
        let parts: Vec<String> = fields.iter().map(|(k, v)| format!("{k}={v}")).collect();
        writeln!(w, "{}", parts.join(" "))?;
    }
    w.flush()?;
    Ok(())
}

fn prob(a: ProbArgs) -> Result<(), Failure> {
    let tau: Option<Permutation> = a.tau.as_deref().map(str::parse).transpose()?;
    match a.kind {
        ProbKind::Pattern if tau.is_none() => return Err(usage("pattern needs --tau")),
        ProbKind::Gap if a.k.is_none() => return Err(usage("gap needs --k")),
        _ => {}
    }
    if a.mc {
        a.output.allow(&[Format::Text, Format::Csv, Format::Json])?;
        let mut spec = match a.kind {
            ProbKind::Pattern => {
                let tau = tau.unwrap();
                let mut s = ExperimentSpec::new(ExperimentKind::PatternCensus);
                s.k = vec![tau.len()];
                s.taus = vec![tau];
                s
            }
            ProbKind::Gap => {
                let mut s = ExperimentSpec::new(ExperimentKind::GapSweep);
                s.k = vec![a.k.unwrap()];
                s.compare = invperm::experiments::Compare::Limit;
                s
            }
        };
        spec.n = vec![a.n];
        spec.m = Some(a.m);
        spec.samples = a.samples;
        spec.seed = a.seed;
        spec.streams = a.streams;
        spec.sampler = a.sampler;
        spec.validate()?;
        let report = run(&spec)?;
        return emit_report(&report, &a.output, false);
    }
    a.output.allow(&[Format::Text, Format::Json])?;
    let mut w = a.output.writer()?;
    if a.approx {
        let v = match a.kind {
            ProbKind::Pattern => qcount::approx_pattern_prob(a.n, a.m, tau.as_ref().unwrap())?,
            ProbKind::Gap => qcount::approx_gap_prob(a.n, a.m, a.k.unwrap())?,
        };
        if a.output.format == Format::Json {
            writeln!(w, "{}", serde_json::json!({ "approx": v }))?;
        } else {
            writeln!(w, "approx={v}")?;
        }
    } else {
        let p = match a.kind {
            ProbKind::Pattern => qcount::exact_pattern_prob(a.n, a.m, tau.as_ref().unwrap())?,
            ProbKind::Gap => qcount::exact_gap_prob(a.n, a.m, a.k.unwrap())?,
        };
        if a.output.format == Format::Json {
            writeln!(w, "{}", serde_json::to_string(&p).context("serializing")?)?;
        } else {
            writeln!(w, "num={} den={} approx={}", p.num(), p.den(), p.approx())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn sample(a: SampleArgs) -> Result<(), Failure> {
    if a.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let sampler = PermSampler::new(a.sampler, a.n, a.m)?;
    let mut rng = RngStream::new(a.seed, 0).rng();
    let mut w = a.output.writer()?;
    match a.output.format {
        Format::Svg => {
            let p = sampler.sample(&mut rng)?;
            w.write_all(svg::render(&p).as_bytes())?;
        }
        Format::Json => {
            let mut all = Vec::new();
            for _ in 0..a.count {
                all.push(sampler.sample(&mut rng)?.into_values());
            }
            writeln!(w, "{}", serde_json::to_string(&all).context("serializing")?)?;
        }
        Format::Text | Format::Csv => {
            let sep = if a.output.format == Format::Csv { "," } else { " " };
            for _ in 0..a.count {
                let p = sampler.sample(&mut rng)?;
                let line: Vec<String> = p.values().iter().map(u32::to_string).collect();
                writeln!(w, "{}", line.join(sep))?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    a.output.allow(&[Format::Text, Format::Csv, Format::Json])?;
    let mut spec = match (&a.spec, &a.kind) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            ExperimentSpec::parse(&text)?
        }
        (None, Some(kind)) => ExperimentSpec::new(kind.parse()?),
        (None, None) => return Err(usage("sweep needs --spec or --kind")),
    };
    if let (Some(_), Some(kind)) = (&a.spec, &a.kind) {
        spec.set("kind", kind)?;
    }
    let mut pairs: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            pairs.push((k.to_string(), v));
        }
    };
    put("n", a.n.clone());
    put("m", a.m.map(|v| v.to_string()));
    put("k", a.k.clone());
    put("rho", a.rho.map(|v| v.to_string()));
    put("taus", a.tau.clone());
    put("samples", a.samples.map(|v| v.to_string()));
    put("seed", a.seed.map(|v| v.to_string()));
    put("streams", a.streams.map(|v| v.to_string()));
    put("sampler", a.sampler.clone());
    put("theta", a.theta.map(|v| v.to_string()));
    put("epsilon", a.eps.map(|v| v.to_string()));
    for item in &a.set {
        let (k, v) = item.split_once('=').ok_or_else(|| usage(format!("--set expects KEY=VALUE, got '{item}'")))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    for (k, v) in &pairs {
        spec.set(k, v)?;
    }
    if a.exact {
        spec.mode = Mode::Exact;
    } else if a.mc {
        spec.mode = Mode::Mc;
    }
    spec.validate()?;
    let report = run(&spec)?;
    emit_report(&report, &a.output, true)
}

fn emit_report(report: &ExperimentReport, output: &Output, judged: bool) -> Result<(), Failure> {
    let mut w = output.writer()?;
    match output.format {
        Format::Csv => report.write_csv(&mut w)?,
        Format::Json => report.write_json_lines(&mut w)?,
        _ => {
            let mut text = report.to_text();
            if let Some(ms) = report.meta.wall_ms {
                text.push_str(&format!("  wall time {} s\n", fmt_f64(ms as f64 / 1000.0)));
            }
            w.write_all(text.as_bytes())?;
        }
    }
    w.flush()?;
    if judged && !report.pass() {
        return Err(Failure::Checks);
    }
    Ok(())
}

fn verify(a: VerifyArgs) -> Result<(), Failure> {
    a.output.allow(&[Format::Text, Format::Csv, Format::Json])?;
    let suite: Suite = a.suite.parse()?;
    if a.streams == 0 {
        return Err(usage("--streams must be at least 1"));
    }
    let result = run_suite(suite, &SuiteOptions { seed: a.seed, streams: a.streams })?;
    let mut w = a.output.writer()?;
    match a.output.format {
        Format::Csv => result.write_csv(&mut w)?,
        Format::Json => result.write_json_lines(&mut w)?,
        _ => w.write_all(result.to_text().as_bytes())?,
    }
    w.flush()?;
    if result.pass() { Ok(()) } else { Err(Failure::Checks) }
}

fn plot(a: PlotArgs) -> Result<(), Failure> {
    let text = match (&a.perm, &a.input) {
        (Some(p), _) => p.clone(),
        (None, Some(path)) => {
            let mut s = String::new();
            if path.as_os_str() == "-" {
                io::stdin().read_to_string(&mut s)?;
            } else {
                s = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            }
            s.lines().find(|l| !l.trim().is_empty()).unwrap_or("").to_string()
        }
        (None, None) => return Err(usage("plot needs --perm or --in")),
    };
    let p: Permutation = text.trim().trim_start_matches('[').trim_end_matches(']').parse()?;
    let output = Output { format: Format::Svg, out: a.out };
    let mut w = output.writer()?;
    w.write_all(svg::render(&p).as_bytes())?;
    w.flush()?;
    Ok(())
}
