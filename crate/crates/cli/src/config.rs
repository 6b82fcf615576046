//! Flat `key = value` parameter files merged with command-line overrides.

use std::collections::BTreeMap;
use std::path::Path;

use crate::CliError;

/// Parameters of one run; `get*` calls consume keys so that leftovers can be
/// reported as unknown.
#[derive(Debug, Default, Clone)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn parse_text(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("params line {}: expected key = value", i + 1)))?;
            let k = k.trim();
            if k.is_empty() {
                return Err(CliError::Usage(format!("params line {}: empty key", i + 1)));
            }
            if values.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::Usage(format!("params line {}: duplicate key {k:?}", i + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => Ok(Self::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Usage(format!("cannot read params file {}: {e}", p.display())))?;
                Self::parse_text(&text)
            }
        }
    }

    /// Applies `key=value` overrides; flags win over the file.
    pub fn with_overrides(mut self, sets: &[String]) -> Result<Self, CliError> {
        for s in sets {
            let (k, v) =
                s.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects key=value, got {s:?}")))?;
            self.values.insert(k.trim().to_string(), v.trim().to_string());
        }
        Ok(self)
    }

    pub fn set_if(&mut self, key: &str, v: Option<impl ToString>) {
        if let Some(v) = v {
            self.values.insert(key.to_string(), v.to_string());
        }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn take_str(&mut self, key: &str) -> Option<String> {
        self.values.remove(key)
    }

    pub fn f64_or(&mut self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.values.remove(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| CliError::Usage(format!("{key}: not a number: {v:?}"))),
        }
    }

    pub fn usize_or(&mut self, key: &str, default: usize) -> Result<usize, CliError> {
        match self.values.remove(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| CliError::Usage(format!("{key}: not a non-negative integer: {v:?}"))),
        }
    }

    pub fn f64_list_or(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.values.remove(key) {
            None => Ok(default.to_vec()),
            Some(v) => parse_list(key, &v),
        }
    }

    pub fn str_or(&mut self, key: &str, default: &str) -> String {
        self.values.remove(key).unwrap_or_else(|| default.to_string())
    }

    /// Fails on any key not consumed so far.
    pub fn finish(self) -> Result<(), CliError> {
        if self.values.is_empty() {
            Ok(())
        } else {
            let keys: Vec<&str> = self.values.keys().map(String::as_str).collect();
            Err(CliError::Usage(format!("unknown parameter(s): {}", keys.join(", "))))
        }
    }
}

pub fn parse_list(key: &str, v: &str) -> Result<Vec<f64>, CliError> {
    v.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("{key}: not a number list: {v:?}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win_and_unknown_keys_fail() {
        let mut p = Params::parse_text("p = 3\n# comment\nmu=0.75 # trailing\n").unwrap();
        p = p.with_overrides(&["p=2".into()]).unwrap();
        assert_eq!(p.f64_or("p", 0.0).unwrap(), 2.0);
        assert_eq!(p.f64_or("mu", 1.0).unwrap(), 0.75);
        assert!(p.finish().is_ok());
        let mut p = Params::parse_text("bogus = 1").unwrap();
        assert_eq!(p.f64_or("p", 2.0).unwrap(), 2.0);
        assert!(matches!(p.finish(), Err(CliError::Usage(_))));
    }

    #[test]
    fn malformed_lines() {
        assert!(Params::parse_text("p 2").is_err());
        assert!(Params::parse_text("p=2\np=3").is_err());
        assert_eq!(parse_list("T", "0.1, 1,10").unwrap(), vec![0.1, 1.0, 10.0]);
    }
}
