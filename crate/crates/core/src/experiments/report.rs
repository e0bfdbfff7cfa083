//! Report rows, pass rules and CSV / JSON-lines output.

use std::io::Write;

use serde::Serialize;

use super::stats::{binomial_se, wilson_ci};
use crate::error::{Error, Result};
use crate::qcount::ExactProbability;

/// How a row is judged. Every rule reads only the row's own fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Criterion {
    /// Estimate within `tol` standard errors of the target.
    WithinSe { target: f64, tol: f64 },
    /// Estimate at most `bound`.
    AtMost { bound: f64 },
    /// Estimate at most `bound + tol * se`.
    AtMostPlusSe { bound: f64, tol: f64, se: f64 },
    /// `value / target - 1` within `tol` in absolute value.
    Relative { value: f64, target: f64, tol: f64 },
    /// Relative deviation recorded for a trend, always passing.
    Track { value: f64, target: f64 },
    /// Estimate within `[lo, hi]`.
    InRange { lo: f64, hi: f64 },
    /// Two exact quantities compared as integers.
    Exact { equal: bool },
    /// Minimum p-value of a goodness-of-fit test.
    PValue { p: f64, alpha: f64 },
    /// Reported without a pass rule.
    Info,
}

impl Criterion {
    /// Signed deviation and pass flag.
    fn judge(self, estimate: Option<f64>, se: Option<f64>) -> (Option<f64>, bool) {
        let est = estimate.unwrap_or(f64::NAN);
        match self {
            Criterion::WithinSe { target, tol } => {
                let se = se.unwrap_or(0.0);
                let diff = est - target;
                let z = if se > 0.0 {
                    diff / se
                } else if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY.copysign(diff)
                };
                (Some(z), z.abs() <= tol)
            }
            Criterion::AtMost { bound } => (Some(est - bound), est <= bound),
            Criterion::AtMostPlusSe { bound, tol, se } => (Some(est - bound), est <= bound + tol * se),
            Criterion::Relative { value, target, tol } => {
                let dev = value / target - 1.0;
                (Some(dev), dev.abs() <= tol)
            }
            Criterion::Track { value, target } => (Some(value / target - 1.0), true),
            Criterion::InRange { lo, hi } => (None, lo <= est && est <= hi),
            Criterion::Exact { equal } => (None, equal),
            Criterion::PValue { p, alpha } => (Some(p), p >= alpha),
            Criterion::Info => (None, true),
        }
    }

    fn describe(&self) -> String {
        match self {
            Criterion::WithinSe { tol, .. } => format!("|z|<={tol}"),
            Criterion::AtMost { bound } => format!("est<={bound}"),
            Criterion::AtMostPlusSe { bound, tol, se } => format!("est<={bound}+{tol}*{se}"),
            Criterion::Relative { tol, .. } => format!("|rel|<={tol}"),
            Criterion::Track { .. } => "trend".into(),
            Criterion::InRange { lo, hi } => format!("{lo}<=est<={hi}"),
            Criterion::Exact { .. } => "exact".into(),
            Criterion::PValue { alpha, .. } => format!("p>={alpha}"),
            Criterion::Info => "info".into(),
        }
    }
}

/// One line of a report. Optional fields are empty in CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub experiment: String,
    pub label: String,
    pub n: u64,
    pub m: u64,
    pub k: u64,
    /// Scale parameter of the row (`alpha`, `beta`, `theta`, ...).
    pub param_name: String,
    pub param: Option<f64>,
    pub trials: Option<u64>,
    pub successes: Option<u64>,
    pub estimate: Option<f64>,
    pub se: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub exact_num: Option<String>,
    pub exact_den: Option<String>,
    pub exact: Option<f64>,
    pub prediction: Option<f64>,
    /// Standard-error units, relative deviation or p-value, per `criterion`.
    pub deviation: Option<f64>,
    pub criterion: String,
    pub pass: bool,
}

/// CSV column order.
pub const CSV_COLUMNS: [&str; 20] = [
    "experiment",
    "label",
    "n",
    "m",
    "k",
    "param_name",
    "param",
    "trials",
    "successes",
    "estimate",
    "se",
    "ci_low",
    "ci_high",
    "exact_num",
    "exact_den",
    "exact",
    "prediction",
    "deviation",
    "criterion",
    "pass",
];

impl ReportRow {
    pub fn new(experiment: impl Into<String>, label: impl Into<String>, n: usize, m: u64, k: usize) -> Self {
        ReportRow {
            experiment: experiment.into(),
            label: label.into(),
            n: n as u64,
            m,
            k: k as u64,
            param_name: String::new(),
            param: None,
            trials: None,
            successes: None,
            estimate: None,
            se: None,
            ci_low: None,
            ci_high: None,
            exact_num: None,
            exact_den: None,
            exact: None,
            prediction: None,
            deviation: None,
            criterion: "info".into(),
            pass: true,
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.param_name = name.into();
        self.param = Some(value);
        self
    }

    /// Fills trials, successes, estimate, SE and the Wilson interval.
    pub fn binomial(mut self, successes: u64, trials: u64, level: f64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Domain("a Monte Carlo row needs at least one trial".into()));
        }
        let p = successes as f64 / trials as f64;
        let (lo, hi) = wilson_ci(successes, trials, level)?;
        self.trials = Some(trials);
        self.successes = Some(successes);
        self.estimate = Some(p);
        self.se = Some(binomial_se(p, trials));
        self.ci_low = Some(lo);
        self.ci_high = Some(hi);
        Ok(self)
    }

    /// A value without sampling error.
    pub fn value(mut self, v: f64) -> Self {
        self.estimate = Some(v);
        self
    }

    pub fn exact(mut self, p: &ExactProbability) -> Self {
        self.exact_num = Some(p.num().to_string());
        self.exact_den = Some(p.den().to_string());
        self.exact = Some(p.approx());
        self
    }

    pub fn exact_float(mut self, v: f64) -> Self {
        self.exact = Some(v);
        self
    }

    pub fn prediction(mut self, v: f64) -> Self {
        self.prediction = Some(v);
        self
    }

    /// Applies the pass rule. For Monte Carlo rows whose estimate has zero
    /// standard error, the SE at the target is used instead.
    pub fn judge(mut self, criterion: Criterion) -> Self {
        let mut se = self.se;
        if let (Criterion::WithinSe { target, .. }, Some(0.0), Some(n)) = (criterion, se, self.trials) {
            se = Some(binomial_se(target, n));
        }
        let (dev, pass) = criterion.judge(self.estimate, se);
        self.deviation = dev;
        self.pass = pass;
        self.criterion = criterion.describe();
        self
    }
}

/// Run metadata. `wall_ms` is left out of CSV so that CSV output is
/// reproducible byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportMeta {
    pub kind: String,
    pub seed: u64,
    pub streams: usize,
    pub sampler: String,
    /// Engine actually used (`dp-exact`, `dp-float`, `tilted`) or `exact`.
    pub engine: String,
    pub version: String,
    pub wall_ms: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub meta: ReportMeta,
    pub rows: Vec<ReportRow>,
    /// Free-form remarks such as merged chi-square cells.
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn new(kind: &str, seed: u64, streams: usize, sampler: &str) -> Self {
        ExperimentReport {
            meta: ReportMeta {
                kind: kind.into(),
                seed,
                streams,
                sampler: sampler.into(),
                engine: String::new(),
                version: env!("CARGO_PKG_VERSION").into(),
                wall_ms: None,
            },
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| !r.pass)
    }

    /// Header comments (`# key=value`), the column header, then one line per
    /// row.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        let m = &self.meta;
        writeln!(out, "# kind={}", m.kind)?;
        writeln!(out, "# seed={}", m.seed)?;
        writeln!(out, "# streams={}", m.streams)?;
        writeln!(out, "# sampler={}", m.sampler)?;
        writeln!(out, "# engine={}", m.engine)?;
        writeln!(out, "# version={}", m.version)?;
        for note in &self.notes {
            writeln!(out, "# note={note}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_COLUMNS).map_err(csv_err)?;
        for r in &self.rows {
            let opt_f = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
            let opt_u = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
            w.write_record([
                r.experiment.clone(),
                r.label.clone(),
                r.n.to_string(),
                r.m.to_string(),
                r.k.to_string(),
                r.param_name.clone(),
                opt_f(r.param),
                opt_u(r.trials),
                opt_u(r.successes),
                opt_f(r.estimate),
                opt_f(r.se),
                opt_f(r.ci_low),
                opt_f(r.ci_high),
                r.exact_num.clone().unwrap_or_default(),
                r.exact_den.clone().unwrap_or_default(),
                opt_f(r.exact),
                opt_f(r.prediction),
                opt_f(r.deviation),
                r.criterion.clone(),
                if r.pass { "PASS" } else { "FAIL" }.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8")
    }

    /// A metadata record followed by one JSON object per row.
    pub fn write_json_lines<W: Write>(&self, mut out: W) -> Result<()> {
        let meta = serde_json::json!({ "meta": &self.meta, "notes": &self.notes });
        writeln!(out, "{meta}")?;
        for r in &self.rows {
            writeln!(out, "{}", serde_json::to_string(r).map_err(|e| Error::Numerical(e.to_string()))?)?;
        }
        Ok(())
    }

    /// Aligned human-readable table.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} seed={} streams={} sampler={} engine={}\n",
            self.meta.kind, self.meta.seed, self.meta.streams, self.meta.sampler, self.meta.engine
        );
        for r in &self.rows {
            let f = |v: Option<f64>| v.map(fmt_f64).unwrap_or_else(|| "-".into());
            s.push_str(&format!(
                "  {} {:<24} n={} m={} k={} est={} se={} exact={} pred={} dev={} [{}]\n",
                if r.pass { "PASS" } else { "FAIL" },
                r.label,
                r.n,
                r.m,
                r.k,
                f(r.estimate),
                f(r.se),
                f(r.exact),
                f(r.prediction),
                f(r.deviation),
                r.criterion
            ));
        }
        for note in &self.notes {
            s.push_str(&format!("  note: {note}\n"));
        }
        s
    }
}

/// Fixed-precision rendering used in CSV and text output.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else if v != 0.0 && v.abs() < 1e-4 {
        format!("{v:.6e}")
    } else {
        format!("{v:.8}")
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}
