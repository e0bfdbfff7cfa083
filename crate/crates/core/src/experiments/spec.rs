//! Declarative experiment descriptions read from `key = value` text.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::sampler::{SamplerKind, DEFAULT_SEED, DEFAULT_STREAMS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    PatternCensus,
    GapSweep,
    TailWeakcomp,
    TailDensity,
    ExactVsAsym,
    Eq1Equivalence,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::PatternCensus,
        ExperimentKind::GapSweep,
        ExperimentKind::TailWeakcomp,
        ExperimentKind::TailDensity,
        ExperimentKind::ExactVsAsym,
        ExperimentKind::Eq1Equivalence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PatternCensus => "pattern_census",
            ExperimentKind::GapSweep => "gap_sweep",
            ExperimentKind::TailWeakcomp => "tail_weakcomp",
            ExperimentKind::TailDensity => "tail_density",
            ExperimentKind::ExactVsAsym => "exact_vs_asym",
            ExperimentKind::Eq1Equivalence => "eq1_equivalence",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Spec(format!("unknown experiment kind '{}'", s.trim())))
    }
}

/// Where patterns are read off a sampled permutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Position {
    Fixed(usize),
    Random,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Position::Fixed(j) => write!(f, "{j}"),
            Position::Random => f.write_str("random"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Mc,
    Exact,
}

/// What gap-sweep estimates are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Compare {
    Limit,
    Exact,
    Both,
}

/// One experiment. Every field has a default, so a spec needs only `kind`
/// and the parameters its kind uses.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    /// One or more sizes.
    pub n: Vec<usize>,
    /// Fixed inversion count; overrides the schedule.
    pub m: Option<u64>,
    /// Schedule `m = ceil(m_c * n^m_gamma)`, clamped to `[0, C(n,2)]`.
    pub m_c: f64,
    pub m_gamma: f64,
    pub k: Vec<usize>,
    pub rho: Option<f64>,
    pub beta: Option<f64>,
    pub l: Option<u64>,
    #[serde(serialize_with = "serialize_taus")]
    pub taus: Vec<Permutation>,
    pub position: Position,
    pub samples: u64,
    pub seed: u64,
    pub streams: usize,
    pub sampler: SamplerKind,
    pub mode: Mode,
    pub compare: Compare,
    pub t: usize,
    pub s: u64,
    pub epsilon: f64,
    pub theta: f64,
    /// Monte Carlo rows pass within this many standard errors.
    pub se_tol: f64,
    /// Exact-versus-limit rows pass within this relative deviation.
    pub rel_tol: f64,
    pub ci_level: f64,
    /// Gap rows with scale above `window_alpha_max` must fall below this.
    pub tail_level: f64,
    pub window_alpha_max: f64,
}

fn serialize_taus<S: serde::Serializer>(taus: &[Permutation], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(taus.iter().map(|t| t.to_string()))
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentSpec {
            kind,
            n: Vec::new(),
            m: None,
            m_c: 1.0,
            m_gamma: 1.5,
            k: vec![2],
            rho: None,
            beta: None,
            l: None,
            taus: Vec::new(),
            position: Position::Fixed(1),
            samples: 10_000,
            seed: DEFAULT_SEED,
            streams: DEFAULT_STREAMS,
            sampler: SamplerKind::Dp,
            mode: Mode::Mc,
            compare: Compare::Both,
            t: 0,
            s: 0,
            epsilon: 1.0,
            theta: 0.02,
            se_tol: 3.0,
            rel_tol: 0.05,
            ci_level: 0.95,
            tail_level: 0.05,
            window_alpha_max: 4.0,
        }
    }

    /// Inversion count used for size `n`.
    pub fn m_for(&self, n: usize) -> Result<u64> {
        let top = (n as u64) * (n as u64).saturating_sub(1) / 2;
        match self.m {
            Some(m) if m > top => Err(Error::Spec(format!("m = {m} exceeds C({n},2) = {top}"))),
            Some(m) => Ok(m),
            None => {
                let v = (self.m_c * (n as f64).powf(self.m_gamma)).ceil();
                Ok(if v <= 0.0 { 0 } else { (v as u64).min(top) })
            }
        }
    }

    /// Sets one key from its text value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let bad = |what: &str| Error::Spec(format!("{key}: cannot parse '{value}' as {what}"));
        let int = || value.parse::<u64>().map_err(|_| bad("an integer"));
        let real = || value.parse::<f64>().map_err(|_| bad("a number"));
        let list = || -> Result<Vec<usize>> {
            value
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<usize>().map_err(|_| bad("a list of integers")))
                .collect()
        };
        match key.trim() {
            "kind" => self.kind = value.parse()?,
            "n" => self.n = list()?,
            "m" => self.m = Some(int()?),
            "m_c" => self.m_c = real()?,
            "m_gamma" => self.m_gamma = real()?,
            "k" => self.k = list()?,
            "rho" => self.rho = Some(real()?),
            "beta" => self.beta = Some(real()?),
            "l" => self.l = Some(int()?),
            "tau" | "taus" => {
                self.taus = value
                    .split([';', '|'])
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.parse::<Permutation>())
                    .collect::<Result<_>>()?
            }
            "position" => {
                self.position = if value == "random" {
                    Position::Random
                } else {
                    Position::Fixed(value.parse().map_err(|_| bad("a position or 'random'"))?)
                }
            }
            "samples" => self.samples = int()?,
            "seed" => {
                self.seed = match value.strip_prefix("0x") {
                    Some(hex) => u64::from_str_radix(hex, 16).map_err(|_| bad("a seed"))?,
                    None => int()?,
                }
            }
            "streams" => self.streams = int()? as usize,
            "sampler" => self.sampler = value.parse()?,
            "mode" => {
                self.mode = match value {
                    "mc" => Mode::Mc,
                    "exact" => Mode::Exact,
                    _ => return Err(bad("mc or exact")),
                }
            }
            "compare" => {
                self.compare = match value {
                    "limit" => Compare::Limit,
                    "exact" => Compare::Exact,
                    "both" => Compare::Both,
                    _ => return Err(bad("limit, exact or both")),
                }
            }
            "t" => self.t = int()? as usize,
            "s" => self.s = int()?,
            "epsilon" | "eps" => self.epsilon = real()?,
            "theta" => self.theta = real()?,
            "se_tol" => self.se_tol = real()?,
            "rel_tol" => self.rel_tol = real()?,
            "ci_level" => self.ci_level = real()?,
            "tail_level" => self.tail_level = real()?,
            "window_alpha_max" => self.window_alpha_max = real()?,
            other => return Err(Error::Spec(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. `kind` is required.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Spec(format!("line {}: expected key = value", lineno + 1)))?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let kind = pairs
            .iter()
            .find(|(k, _)| k == "kind")
            .ok_or_else(|| Error::Spec("missing 'kind'".into()))?
            .1
            .parse()?;
        let mut spec = ExperimentSpec::new(kind);
        for (k, v) in &pairs {
            spec.set(k, v)?;
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Checks the parameters the kind relies on.
    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, msg: &str| if ok { Ok(()) } else { Err(Error::Spec(msg.to_string())) };
        need(self.streams >= 1, "streams must be at least 1")?;
        need(self.se_tol > 0.0 && self.rel_tol > 0.0, "tolerances must be positive")?;
        need(self.ci_level > 0.0 && self.ci_level < 1.0, "ci_level must lie in (0, 1)")?;
        if let Some(rho) = self.rho {
            need((0.0..=1.0).contains(&rho), "rho must lie in [0, 1]")?;
        }
        match self.kind {
            ExperimentKind::TailWeakcomp => {
                need(self.t >= 2, "tail_weakcomp needs t >= 2")?;
                need(self.epsilon > 0.0, "epsilon must be positive")?;
            }
            ExperimentKind::TailDensity => {
                need(!self.n.is_empty() || !self.k.is_empty(), "tail_density needs n or k")?;
                need(self.theta >= 0.0, "theta must be nonnegative")?;
            }
            _ => {
                need(!self.n.is_empty(), "n is required")?;
                need(!self.k.is_empty(), "k is required")?;
                for &n in &self.n {
                    self.m_for(n)?;
                }
            }
        }
        if self.kind == ExperimentKind::GapSweep {
            for &n in &self.n {
                need(self.k.iter().all(|&k| k >= 1 && k < n), "gap sweep needs 1 <= k < n")?;
            }
        }
        if self.kind == ExperimentKind::PatternCensus {
            for &n in &self.n {
                need(self.k.iter().all(|&k| k >= 1 && k <= n), "pattern census needs 1 <= k <= n")?;
            }
        }
        Ok(())
    }

    /// Canonical `key = value` text; parsing it gives back the same spec.
    pub fn to_config(&self) -> String {
        let join = |v: &[usize]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        let mut lines = vec![format!("kind = {}", self.kind)];
        if !self.n.is_empty() {
            lines.push(format!("n = {}", join(&self.n)));
        }
        if let Some(m) = self.m {
            lines.push(format!("m = {m}"));
        }
        lines.push(format!("m_c = {}", self.m_c));
        lines.push(format!("m_gamma = {}", self.m_gamma));
        lines.push(format!("k = {}", join(&self.k)));
        if let Some(rho) = self.rho {
            lines.push(format!("rho = {rho}"));
        }
        if let Some(beta) = self.beta {
            lines.push(format!("beta = {beta}"));
        }
        if let Some(l) = self.l {
            lines.push(format!("l = {l}"));
        }
        if !self.taus.is_empty() {
            let taus: Vec<String> = self.taus.iter().map(|t| t.to_string()).collect();
            lines.push(format!("taus = {}", taus.join(";")));
        }
        lines.push(format!("position = {}", self.position));
        lines.push(format!("samples = {}", self.samples));
        lines.push(format!("seed = {}", self.seed));
        lines.push(format!("streams = {}", self.streams));
        lines.push(format!("sampler = {}", self.sampler));
        lines.push(format!("mode = {}", if self.mode == Mode::Mc { "mc" } else { "exact" }));
        lines.push(format!(
            "compare = {}",
            match self.compare {
                Compare::Limit => "limit",
                Compare::Exact => "exact",
                Compare::Both => "both",
            }
        ));
        lines.push(format!("t = {}", self.t));
        lines.push(format!("s = {}", self.s));
        lines.push(format!("epsilon = {}", self.epsilon));
        lines.push(format!("theta = {}", self.theta));
        lines.push(format!("se_tol = {}", self.se_tol));
        lines.push(format!("rel_tol = {}", self.rel_tol));
        lines.push(format!("ci_level = {}", self.ci_level));
        lines.push(format!("tail_level = {}", self.tail_level));
        lines.push(format!("window_alpha_max = {}", self.window_alpha_max));
        lines.join("\n") + "\n"
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_round_trip() {
        let text = "# census\nkind = pattern_census\nn = 4000\nm_c = 1\nm_gamma = 1.5\nk = 2, 3\nsamples = 100000\nseed = 0x5EED\n";
        let spec = ExperimentSpec::parse(text).unwrap();
        assert_eq!(spec.k, vec![2, 3]);
        assert_eq!(spec.seed, 24301);
        assert_eq!(spec.m_for(4000).unwrap(), 252_983);
        let again = ExperimentSpec::parse(&spec.to_config()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn schedule_is_clamped() {
        let mut spec = ExperimentSpec::new(ExperimentKind::GapSweep);
        spec.m_c = 10.0;
        spec.m_gamma = 2.0;
        assert_eq!(spec.m_for(5).unwrap(), 10);
        spec.m = Some(11);
        assert!(spec.m_for(5).is_err());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentSpec::parse("n = 5").is_err());
        assert!(ExperimentSpec::parse("kind = nope").is_err());
        assert!(ExperimentSpec::parse("kind = gap_sweep\nn = 10\nk = 10").is_err());
        assert!(ExperimentSpec::parse("kind = gap_sweep\nn = 10\nwhat = 1").is_err());
        assert!(ExperimentSpec::parse("kind = gap_sweep\nn = 10\nk = 2\nm = 3\nposition = random").is_ok());
    }
}
