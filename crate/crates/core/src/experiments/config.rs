//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # error sweep
//! n = 10
//! depths = 5, 9, 15, 19, 23
//! observables = 1 4; 2 17; 2 3 4 17
//! shots = 10, 100, 1000
//! reps = 64
//! seed = 7
//! ```
//!
//! `depths` accepts the keyword `fcs` for the saturation depth of the
//! experiment's observables; `observables` accepts
//! `kitaev mu=2 delta=1 t=0.4` next to plain index lists.

use std::fmt;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::majorana::{kitaev_chain, FermionObservable, MajoranaString};
use crate::rng::content_hash;
use crate::shadow::Backend;
use crate::statevector::MAX_DENSE_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DepthSpec {
    Fixed(usize),
    /// Smallest depth where every `α` is within 1% of its deep limit.
    Fcs,
}

impl fmt::Display for DepthSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepthSpec::Fixed(d) => write!(f, "{d}"),
            DepthSpec::Fcs => f.write_str("fcs"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ObservableSpec {
    Indices(Vec<usize>),
    Kitaev { mu: f64, delta: f64, t: f64 },
}

impl ObservableSpec {
    pub fn build(&self, n: usize) -> Result<FermionObservable> {
        match self {
            ObservableSpec::Indices(idx) => FermionObservable::new(n, vec![MajoranaString::new(n, idx.clone())?]),
            ObservableSpec::Kitaev { mu, delta, t } => kitaev_chain(n, *mu, *delta, *t),
        }
    }
}

impl fmt::Display for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableSpec::Indices(idx) => {
                let parts: Vec<String> = idx.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join(" "))
            }
            ObservableSpec::Kitaev { mu, delta, t } => write!(f, "kitaev mu={mu} delta={delta} t={t}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub depths: Vec<DepthSpec>,
    pub observables: Vec<ObservableSpec>,
    pub shots: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub backend: Backend,
    pub out: PathBuf,
    /// Rayon threads; 0 lets rayon decide. Never affects results.
    pub workers: usize,
    pub eta: f64,
    pub constant: f64,
    pub trials: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: 10,
            depths: [5, 9, 15, 19, 23].map(DepthSpec::Fixed).to_vec(),
            observables: Vec::new(),
            shots: vec![10, 100, 1000],
            reps: 64,
            seed: 0,
            backend: Backend::Dense,
            out: PathBuf::from("."),
            workers: 0,
            eta: crate::depth::DEFAULT_ETA,
            constant: crate::depth::DEFAULT_CONSTANT,
            trials: 10_000,
        }
    }
}

fn list<T, F>(value: &str, sep: char, f: F) -> std::result::Result<Vec<T>, String>
where
    F: Fn(&str) -> std::result::Result<T, String>,
{
    value.split(sep).map(str::trim).filter(|s| !s.is_empty()).map(f).collect()
}

fn parse_num<T: std::str::FromStr>(s: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    s.parse::<T>().map_err(|e| format!("`{s}`: {e}"))
}

fn parse_observable(s: &str) -> std::result::Result<ObservableSpec, String> {
    let mut words = s.split_whitespace();
    if s.starts_with("kitaev") {
        words.next();
        let (mut mu, mut delta, mut t) = (2.0, 1.0, 0.4);
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| format!("expected key=value in `{w}`"))?;
            let v: f64 = parse_num(v)?;
            match k {
                "mu" => mu = v,
                "delta" => delta = v,
                "t" => t = v,
                _ => return Err(format!("unknown Kitaev parameter `{k}`")),
            }
        }
        return Ok(ObservableSpec::Kitaev { mu, delta, t });
    }
    let idx = words.map(parse_num::<usize>).collect::<std::result::Result<Vec<_>, _>>()?;
    if idx.is_empty() {
        return Err("empty index list".into());
    }
    Ok(ObservableSpec::Indices(idx))
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply(text)?;
        Ok(cfg)
    }

    /// Overrides the keys assigned in `text`, leaving the others untouched.
    pub fn apply(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            self.set_pair(line).map_err(|e| match e {
                Error::Config(msg) => Error::Parse { line: lineno + 1, msg },
                other => other,
            })?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &std::path::Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        self.apply(&text)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_file(path)?;
        Ok(cfg)
    }

    /// Applies one `key=value` assignment, as given on the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| Error::Config(format!("expected key = value, got `{pair}`")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let r: std::result::Result<(), String> = (|| {
            match key {
                "n" => self.n = parse_num(value)?,
                "depths" => {
                    self.depths = list(value, ',', |s| {
                        if s == "fcs" {
                            Ok(DepthSpec::Fcs)
                        } else {
                            parse_num(s).map(DepthSpec::Fixed)
                        }
                    })?
                }
                "observables" => self.observables = list(value, ';', parse_observable)?,
                "shots" => self.shots = list(value, ',', parse_num)?,
                "reps" => self.reps = parse_num(value)?,
                "seed" => self.seed = parse_num(value)?,
                "backend" => self.backend = value.parse().map_err(|e: Error| e.to_string())?,
                "out" => self.out = PathBuf::from(value),
                "workers" => self.workers = parse_num(value)?,
                "eta" => self.eta = parse_num(value)?,
                "c" => self.constant = parse_num(value)?,
                "trials" => self.trials = parse_num(value)?,
                _ => return Err(format!("unknown key `{key}`")),
            }
            Ok(())
        })();
        r.map_err(|msg| Error::Config(format!("{key}: {msg}")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n == 0 || self.n % 2 == 1 {
            return bad(format!("n must be even and positive, got {}", self.n));
        }
        if self.backend == Backend::Dense && self.n > MAX_DENSE_QUBITS {
            return bad(format!("dense backend supports n <= {MAX_DENSE_QUBITS}, got {}", self.n));
        }
        if self.depths.is_empty() {
            return bad("at least one depth is required".into());
        }
        if self.reps == 0 {
            return bad("reps must be at least 1".into());
        }
        if self.shots.is_empty() || self.shots[0] == 0 {
            return bad("shots must be positive".into());
        }
        if self.shots.windows(2).any(|w| w[0] >= w[1]) {
            return bad("shots must be strictly increasing".into());
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("eta must lie in (0, 1], got {}", self.eta));
        }
        if !(self.constant > 0.0) {
            return bad(format!("c must be positive, got {}", self.constant));
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        for o in &self.observables {
            let h = o.build(self.n).map_err(|e| Error::Config(format!("observable `{o}`: {e}")))?;
            if let Some(t) = h.terms().iter().find(|t| t.locality() % 2 == 1) {
                return bad(format!("observable `{o}` has odd term {t}"));
            }
        }
        Ok(())
    }

    /// Canonical text form; parsing it gives back the same configuration.
    /// `out` and `workers` are left out since they never change results.
    pub fn canonical(&self) -> String {
        let join = |v: Vec<String>, sep: &str| v.join(sep);
        format!(
            "n = {}\ndepths = {}\nobservables = {}\nshots = {}\nreps = {}\nseed = {}\nbackend = {}\neta = {}\nc = {}\ntrials = {}\n",
            self.n,
            join(self.depths.iter().map(ToString::to_string).collect(), ", "),
            join(self.observables.iter().map(ToString::to_string).collect(), "; "),
            join(self.shots.iter().map(ToString::to_string).collect(), ", "),
            self.reps,
            self.seed,
            self.backend,
            self.eta,
            self.constant,
            self.trials,
        )
    }

    pub fn hash(&self) -> String {
        content_hash(self.canonical().as_bytes())
    }

    /// Comment line placed at the top of every CSV.
    pub fn provenance(&self) -> String {
        format!("# adfcs {} config={} seed={}\n", env!("CARGO_PKG_VERSION"), &self.hash()[..16], self.seed)
    }

    /// All index sets named by the observables, in order, without repeats.
    pub fn index_sets(&self) -> Result<Vec<MajoranaString>> {
        let mut out: Vec<MajoranaString> = Vec::new();
        for o in &self.observables {
            for t in o.build(self.n)?.terms() {
                if !out.iter().any(|s| s.indices() == t.indices()) {
                    out.push(MajoranaString::new(self.n, t.indices().to_vec())?);
                }
            }
        }
        Ok(out)
    }
}
