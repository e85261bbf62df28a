use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Flat `key = value` settings. `#` starts a comment line; dashes in keys
/// are read as underscores so `max-iter` and `max_iter` are the same key.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    path: PathBuf,
    values: BTreeMap<String, (usize, String)>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("expected key = value, found {line:?}"),
                });
            };
            let key = key.trim().replace('-', "_");
            if values.insert(key.clone(), (i + 1, value.trim().to_string())).is_some() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("duplicate key {key:?}"),
                });
            }
        }
        Ok(Config {
            path: path.to_path_buf(),
            values,
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(|(_, v)| v.as_str())
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        let Some((line, raw)) = self.values.get(key) else {
            return Ok(None);
        };
        raw.parse().map(Some).map_err(|e| Error::Parse {
            path: self.path.clone(),
            line: *line,
            message: format!("{key}: {e}"),
        })
    }

    /// Fails on the first key not in `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.values.iter().find(|(k, _)| !allowed.contains(&k.as_str())) {
            Some((k, (line, _))) => Err(Error::Parse {
                path: self.path.clone(),
                line: *line,
                message: format!("unknown key {k:?}"),
            }),
            None => Ok(()),
        }
    }
}
