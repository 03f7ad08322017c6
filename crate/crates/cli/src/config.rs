//! `key = value` configuration files and the value syntaxes shared with the
//! command-line flags.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use asdlab_core::curve::primes_between;
use asdlab_core::padic::is_prime;

/// Keys accepted in a config file; each mirrors the flag of the same name.
pub const KEYS: &[&str] = &[
    "curve",
    "p",
    "k",
    "lmax",
    "nmax",
    "trunc",
    "prec",
    "twist",
    "expc",
    "out",
    "cache",
    "out-trunc",
    "sabotage",
    "j0",
    "form",
    "poly",
    "eisenstein",
    "cusp-ap",
];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    /// Blank lines and `#` comments are ignored; keys may repeat only for `form`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key = value", i + 1))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if !KEYS.contains(&key.as_str()) {
                bail!("line {}: unknown key {key:?}", i + 1);
            }
            if key == "form" {
                values
                    .entry(key)
                    .and_modify(|v: &mut String| {
                        v.push(';');
                        v.push_str(&value);
                    })
                    .or_insert(value);
            } else if values.insert(key.clone(), value).is_some() {
                bail!("line {}: duplicate key {key:?}", i + 1);
            }
        }
        Ok(ConfigFile { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key {key}: {e}")))
            .transpose()
    }

    /// The flag value if given, else the config value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self.get(key),
        }
    }
}

/// Comma-separated primes and inclusive ranges, e.g. `5,11-29`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeList(pub Vec<u64>);

impl FromStr for PrimeList {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if let Some((lo, hi)) = part.split_once('-') {
                let lo: u64 = lo
                    .trim()
                    .parse()
                    .with_context(|| format!("range {part:?}"))?;
                let hi: u64 = hi
                    .trim()
                    .parse()
                    .with_context(|| format!("range {part:?}"))?;
                if lo > hi {
                    bail!("empty range {part:?}");
                }
                out.extend(primes_between(lo.max(5), hi));
            } else {
                let p: u64 = part.parse().with_context(|| format!("prime {part:?}"))?;
                if p <= 3 || !is_prime(p) {
                    bail!("{p} is not a prime greater than 3");
                }
                out.push(p);
            }
        }
        out.sort_unstable();
        out.dedup();
        if out.is_empty() {
            bail!("no primes in {s:?}");
        }
        Ok(PrimeList(out))
    }
}

/// One form `sum c E4 / (j - j0)^m`, written `c:m,c:m,...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoleTerms(pub Vec<(i64, u32)>);

impl FromStr for PoleTerms {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let terms = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let (c, m) = t
                    .split_once(':')
                    .ok_or_else(|| anyhow!("term {t:?} is not coeff:order"))?;
                Ok((c.trim().parse()?, m.trim().parse()?))
            })
            .collect::<Result<Vec<(i64, u32)>>>()?;
        if terms.is_empty() {
            bail!("empty form {s:?}");
        }
        Ok(PoleTerms(terms))
    }
}

/// Comma-separated integers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntList(pub Vec<i64>);

impl FromStr for IntList {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        s.split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<i64>().with_context(|| format!("integer {t:?}")))
            .collect::<Result<_>>()
            .map(IntList)
    }
}
