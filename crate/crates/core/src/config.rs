//! `key = value` run settings. Command-line flags are layered on top of a file.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::fidelity::Direction;
use crate::model::Boundary;
use crate::scan::{GridSpec, ParamRange};

/// Every key a config file may set.
pub const KEYS: [&str; 16] = [
    "m", "grid", "range", "ky", "out", "threads", "boundary", "ref", "dir", "fix", "window",
    "step", "transition", "sizes", "seed", "resolution",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Config { line: i + 1, message };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected 'key = value', got '{line}'")))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(err(format!("unknown key '{key}'")));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets `key` unless `value` is `None`, replacing any earlier value.
    pub fn overlay(&mut self, key: &str, value: Option<String>) {
        if let Some(v) = value {
            self.values.insert(key.to_string(), v);
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| invalid(format!("cannot parse {key} = '{v}'")))
            })
            .transpose()
    }

    pub fn floats(&self, key: &str, count: usize) -> Result<Option<Vec<f64>>> {
        self.get(key)
            .map(|v| {
                let xs = parse_list::<f64>(v)?;
                if xs.len() != count {
                    return Err(invalid(format!("{key} needs {count} comma-separated numbers")));
                }
                Ok(xs)
            })
            .transpose()
    }

    pub fn boundary(&self) -> Result<Boundary> {
        match self.get("boundary") {
            None | Some("open") => Ok(Boundary::Open),
            Some("periodic") => Ok(Boundary::Periodic),
            Some(other) => Err(invalid(format!("boundary must be open or periodic (got '{other}')"))),
        }
    }

    /// Grid from `grid`, `range`, `m`, `ky`, `boundary`, `ref` and `dir`, over the defaults.
    pub fn grid_spec(&self) -> Result<GridSpec> {
        let mut spec = GridSpec::default();
        let (mut ls, mut ms) = (spec.lambda_range.steps, spec.mu_range.steps);
        if let Some(g) = self.get("grid") {
            let (l, m) = g
                .split_once(['x', 'X'])
                .ok_or_else(|| invalid(format!("grid must look like 101x51 (got '{g}')")))?;
            ls = l.trim().parse().map_err(|_| invalid(format!("bad grid '{g}'")))?;
            ms = m.trim().parse().map_err(|_| invalid(format!("bad grid '{g}'")))?;
        }
        let r = self.floats("range", 4)?.unwrap_or_else(|| {
            vec![spec.lambda_range.lo, spec.lambda_range.hi, spec.mu_range.lo, spec.mu_range.hi]
        });
        spec.lambda_range = ParamRange::new(r[0], r[1], ls)?;
        spec.mu_range = ParamRange::new(r[2], r[3], ms)?;
        if let Some(m) = self.parsed("m")? {
            spec.approximant_m = m;
        }
        if let Some(ky) = self.parsed("ky")? {
            spec.k_y = ky;
        }
        spec.boundary = self.boundary()?;
        spec.reference = self.floats("ref", 2)?.map(|v| (v[0], v[1]));
        spec.direction = self
            .floats("dir", 2)?
            .map(|v| Direction::normalized(v[0], v[1]))
            .transpose()?;
        Ok(spec)
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|_| invalid(format!("bad list entry '{x}' in '{s}'")))
        })
        .collect()
}
