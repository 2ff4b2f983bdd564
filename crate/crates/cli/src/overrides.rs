//! `key=value` overrides for registry experiments.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use emd_core::{ConvergenceNorm, EnvelopeInterp, ExtremaLocation, SiftConfig, SiftMethod};

use crate::CliError;

#[derive(Debug, Default)]
pub struct Overrides {
    values: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl Overrides {
    pub fn parse<S: AsRef<str>>(pairs: &[S]) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for p in pairs {
            let p = p.as_ref();
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("override `{p}` is not key=value")))?;
            values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(Self {
            values,
            used: RefCell::default(),
        })
    }

    pub fn insert(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    pub fn has(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        let Some(raw) = self.values.get(key) else {
            return Ok(None);
        };
        self.used.borrow_mut().insert(key.to_string());
        raw.parse::<T>()
            .map(Some)
            .map_err(|_| CliError::Usage(format!("cannot parse override {key}={raw}")))
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list.
    pub fn list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.get::<String>(key)? {
            None => Ok(default.to_vec()),
            Some(s) => s
                .split(',')
                .map(|x| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| CliError::Usage(format!("bad number `{x}` in {key}")))
                })
                .collect(),
        }
    }

    /// Applies the sifting keys other than `method` to `cfg`.
    pub fn apply_to_config(&self, mut cfg: SiftConfig) -> Result<SiftConfig, CliError> {
        if let Some(v) = self.get::<String>("interp")? {
            cfg.interp = v.parse::<EnvelopeInterp>()?;
        }
        if let Some(v) = self.get::<String>("norm")? {
            cfg.conv_norm = v.parse::<ConvergenceNorm>()?;
        }
        if let Some(v) = self.get::<f64>("epsilon")? {
            cfg.conv_epsilon = v;
        }
        if let Some(v) = self.get::<usize>("max_iters")? {
            cfg.max_sift_iters = v;
        }
        if let Some(v) = self.get::<usize>("max_imfs")? {
            cfg.max_imfs = v;
        }
        if let Some(v) = self.get::<f64>("residue_tol")? {
            cfg.residue_tol = v;
        }
        if let Some(v) = self.get::<String>("extrema")? {
            cfg.extrema = v.parse::<ExtremaLocation>()?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Methods to run: the override if present, else `default`.
    pub fn methods(&self, default: &[SiftMethod]) -> Result<Vec<SiftMethod>, CliError> {
        match self.get::<String>("method")? {
            None => Ok(default.to_vec()),
            Some(s) => s
                .split(',')
                .map(|m| m.trim().parse::<SiftMethod>().map_err(CliError::from))
                .collect(),
        }
    }

    /// Errors on any key no runner consumed.
    pub fn finish(&self) -> Result<(), CliError> {
        let used = self.used.borrow();
        let unknown: Vec<&String> = self.values.keys().filter(|k| !used.contains(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::Usage(format!(
                "unsupported override(s) for this experiment: {}",
                unknown
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            )))
        }
    }
}
