//! Plain-text `key = value` sweep configuration.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::schedules::{ContinuousSchedule, Discretization};

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        let (k, v) = l.split_once('=').ok_or_else(|| Error::Parse {
            line,
            msg: format!("expected 'key = value', got '{l}'"),
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(Error::Parse {
                line,
                msg: "empty key".into(),
            });
        }
        if out.insert(k.to_string(), v.to_string()).is_some() {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key '{k}'"),
            });
        }
    }
    Ok(out)
}

/// Parameters shared by the sweep drivers.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub ps: Vec<usize>,
    pub ns: Vec<usize>,
    /// Total time `T = Δ·p` of the constant-time sweep.
    pub total_time: f64,
    pub deltas: Vec<f64>,
    pub instances: usize,
    pub base_seed: u64,
    /// Annealing refinement tolerance.
    pub tol: f64,
    pub rule: Discretization,
    /// Schedule shape; its scale is replaced by `T` or `Δ·p` in each cell.
    pub schedule: ContinuousSchedule,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            ps: vec![4, 8, 16, 32, 64],
            ns: vec![8, 10, 12, 14],
            total_time: 17.0,
            deltas: vec![0.8, 1.0, 1.2],
            instances: 100,
            base_seed: 1,
            tol: 1e-8,
            rule: Discretization::Midpoint,
            schedule: ContinuousSchedule::reference(1.0, 1),
        }
    }
}

fn list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| bad(key, value)))
        .collect()
}

fn one<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse::<T>().map_err(|_| bad(key, value))
}

fn bad(key: &str, value: &str) -> Error {
    Error::InvalidArgument(format!("bad value '{value}' for '{key}'"))
}

impl SweepConfig {
    /// Keys understood by [`SweepConfig::set`].
    pub const KEYS: [&'static str; 8] = [
        "p",
        "n",
        "T",
        "delta",
        "instances",
        "base_seed",
        "tol",
        "discretization",
    ];

    /// Applies one override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "p" => self.ps = list(key, value)?,
            "n" => self.ns = list(key, value)?,
            "T" => self.total_time = one(key, value)?,
            "delta" => self.deltas = list(key, value)?,
            "instances" => self.instances = one(key, value)?,
            "base_seed" => self.base_seed = one(key, value)?,
            "tol" => self.tol = one(key, value)?,
            "discretization" => {
                self.rule = match value.trim() {
                    "midpoint" => Discretization::Midpoint,
                    "theory" => Discretization::Theory,
                    _ => return Err(bad(key, value)),
                }
            }
            _ => return Err(Error::InvalidArgument(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn from_key_values(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut cfg = Self::default();
        for (k, v) in map {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if self.ps.is_empty() || self.ps.contains(&0) {
            return fail("p list must be nonempty and positive");
        }
        if self.ns.is_empty() || self.ns.iter().any(|&n| n == 0 || n > crate::sk::MAX_QUBITS) {
            return fail("n list must be nonempty with 1 <= n <= 24");
        }
        if !(self.total_time.is_finite() && self.total_time >= 0.0) {
            return fail("T must be finite and nonnegative");
        }
        if self.deltas.is_empty() || self.deltas.iter().any(|d| !d.is_finite()) {
            return fail("delta list must be nonempty and finite");
        }
        if self.instances < 2 {
            return fail("instances must be at least 2");
        }
        if !(self.tol > 0.0) {
            return fail("tol must be positive");
        }
        Ok(())
    }
}
