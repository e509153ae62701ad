//! Flat `key = value` configuration and the experiment grid built from it.

use std::fmt;
use std::str::FromStr;

use bigenus::trails::Strategy;

use crate::error::{CliError, CliResult};

/// Edge probability as a literal or as `nexp:<a>`, meaning `n1^a`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PSpec {
    Literal(f64),
    Nexp(f64),
}

impl PSpec {
    pub fn resolve(&self, n1: usize) -> f64 {
        match *self {
            PSpec::Literal(p) => p,
            PSpec::Nexp(a) => (n1 as f64).powf(a).min(1.0),
        }
    }
}

impl FromStr for PSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some(a) = s.strip_prefix("nexp:") {
            return a
                .trim()
                .parse()
                .map(PSpec::Nexp)
                .map_err(|_| format!("bad exponent in {s:?}"));
        }
        match s.parse::<f64>() {
            Ok(p) if (0.0..=1.0).contains(&p) => Ok(PSpec::Literal(p)),
            Ok(p) => Err(format!("p = {p} outside [0, 1]")),
            Err(_) => Err(format!(
                "expected a probability or nexp:<exponent>, got {s:?}"
            )),
        }
    }
}

impl fmt::Display for PSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PSpec::Literal(p) => write!(f, "{p}"),
            PSpec::Nexp(a) => write!(f, "nexp:{a}"),
        }
    }
}

/// Parses `key = value` lines; `#` starts a comment. Keys may not repeat.
pub fn parse_key_values(text: &str) -> CliResult<Vec<(usize, String, String)>> {
    let mut out: Vec<(usize, String, String)> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CliError::Config {
            line: line_no,
            msg: format!("expected key = value, got {line:?}"),
        })?;
        let key = key.trim().to_string();
        if out.iter().any(|(_, k, _)| *k == key) {
            return Err(CliError::Config {
                line: line_no,
                msg: format!("duplicate key {key:?}"),
            });
        }
        out.push((line_no, key, value.trim().to_string()));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n1: Vec<usize>,
    pub n2: Vec<usize>,
    pub p: Vec<PSpec>,
    pub i: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub strategy: Strategy,
    pub eps: f64,
    pub cap: Option<usize>,
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n1: Vec::new(),
            n2: Vec::new(),
            p: Vec::new(),
            i: vec![1],
            trials: 1,
            seed: 0,
            strategy: Strategy::GreedyRandom,
            eps: 0.15,
            cap: Some(bigenus::estimator::DEFAULT_TRAIL_CAP),
            out: None,
        }
    }
}

fn list<T: FromStr>(value: &str, line: usize, key: &str) -> CliResult<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(|v| {
            v.trim().parse::<T>().map_err(|e| CliError::Config {
                line,
                msg: format!("{key}: {e}"),
            })
        })
        .collect()
}

fn single<T: FromStr>(value: &str, line: usize, key: &str) -> CliResult<T>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| CliError::Config {
        line,
        msg: format!("{key}: {e}"),
    })
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> CliResult<Self> {
        let mut cfg = ExperimentConfig::default();
        for (line, key, value) in parse_key_values(text)? {
            match key.as_str() {
                "n1" => cfg.n1 = list(&value, line, &key)?,
                "n2" => cfg.n2 = list(&value, line, &key)?,
                "p" => cfg.p = list(&value, line, &key)?,
                "i" => cfg.i = list(&value, line, &key)?,
                "trials" => cfg.trials = single(&value, line, &key)?,
                "seed" => cfg.seed = single(&value, line, &key)?,
                "strategy" => cfg.strategy = single(&value, line, &key)?,
                "eps" => cfg.eps = single(&value, line, &key)?,
                "cap" => {
                    cfg.cap = match value.as_str() {
                        "none" | "0" => None,
                        v => Some(single(v, line, &key)?),
                    }
                }
                "out" => cfg.out = Some(value),
                _ => {
                    return Err(CliError::Config {
                        line,
                        msg: format!("unknown key {key:?}"),
                    })
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        let fail = |msg: &str| Err(CliError::Usage(format!("experiment config: {msg}")));
        if self.n1.is_empty() || self.n2.is_empty() || self.p.is_empty() || self.i.is_empty() {
            return fail("n1, n2, p and i must each list at least one value");
        }
        if self.trials < 1 {
            return fail("trials must be >= 1");
        }
        if self.i.contains(&0) {
            return fail("i must be >= 1");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return fail("eps must lie in (0, 1)");
        }
        for &n1 in &self.n1 {
            for &n2 in &self.n2 {
                if n2 < 1 || n1 < n2 {
                    return fail(&format!("need n1 >= n2 >= 1, got n1 = {n1}, n2 = {n2}"));
                }
            }
        }
        Ok(())
    }

    /// Grid cells in output order: n1, then n2, then p, then i.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for &n1 in &self.n1 {
            for &n2 in &self.n2 {
                for &p in &self.p {
                    for &i in &self.i {
                        out.push(Cell { n1, n2, p, i });
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub n1: usize,
    pub n2: usize,
    pub p: PSpec,
    pub i: usize,
}
