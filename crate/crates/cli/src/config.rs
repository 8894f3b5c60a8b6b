//! Flat `key = value` config files and flag/file/default resolution.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use critdisc::format::{f9, Metadata};

use crate::error::CliError;

/// A value that can come from a flag, a config file entry, or a default, and
/// be echoed back into report metadata.
pub trait ConfigValue: Sized {
    fn parse_value(s: &str) -> Result<Self, String>;
    fn render(&self) -> String;
}

macro_rules! integer_value {
    ($($t:ty),*) => {$(
        impl ConfigValue for $t {
            fn parse_value(s: &str) -> Result<Self, String> {
                s.parse().map_err(|_| format!("expected a non-negative integer, found {s:?}"))
            }
            fn render(&self) -> String {
                self.to_string()
            }
        }
    )*};
}

integer_value!(u64, usize);

impl ConfigValue for f64 {
    fn parse_value(s: &str) -> Result<Self, String> {
        match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(format!("expected a finite number, found {s:?}")),
        }
    }
    fn render(&self) -> String {
        f9(*self)
    }
}

impl ConfigValue for bool {
    fn parse_value(s: &str) -> Result<Self, String> {
        match s {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(format!("expected true or false, found {s:?}")),
        }
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

impl ConfigValue for String {
    fn parse_value(s: &str) -> Result<Self, String> {
        Ok(s.to_string())
    }
    fn render(&self) -> String {
        self.clone()
    }
}

impl ConfigValue for PathBuf {
    fn parse_value(s: &str) -> Result<Self, String> {
        if s.is_empty() {
            return Err("expected a path".into());
        }
        Ok(PathBuf::from(s))
    }
    fn render(&self) -> String {
        self.display().to_string()
    }
}

/// Comma-separated list of numbers, e.g. a threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl ConfigValue for Grid {
    fn parse_value(s: &str) -> Result<Self, String> {
        let values = s
            .split(',')
            .map(|v| f64::parse_value(v.trim()))
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            return Err("expected at least one number".into());
        }
        Ok(Grid(values))
    }
    fn render(&self) -> String {
        self.0.iter().map(|v| f9(*v)).collect::<Vec<_>>().join(",")
    }
}

impl std::str::FromStr for Grid {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Grid::parse_value(s)
    }
}

#[derive(Debug, Default)]
pub struct ConfigFile {
    path: Option<PathBuf>,
    values: BTreeMap<String, (usize, String)>,
    used: RefCell<BTreeSet<String>>,
}

fn normalize_key(k: &str) -> String {
    k.trim().trim_start_matches("--").replace('_', "-")
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = fs::read_to_string(path).map_err(|e| critdisc::Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| {
                CliError::from(critdisc::Error::Parse {
                    path: path.to_path_buf(),
                    line: no + 1,
                    msg,
                })
            };
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected `key = value`, found {line:?}")))?;
            let key = normalize_key(k);
            if key.is_empty() {
                return Err(bad("empty key".into()));
            }
            if values.insert(key.clone(), (no + 1, v.trim().to_string())).is_some() {
                return Err(bad(format!("key {key:?} set twice")));
            }
        }
        Ok(ConfigFile {
            path: Some(path.to_path_buf()),
            values,
            used: RefCell::new(BTreeSet::new()),
        })
    }

    fn mark(&self, key: &str) {
        self.used.borrow_mut().insert(key.to_string());
    }

    fn get<T: ConfigValue>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.mark(key);
        let Some((line, raw)) = self.values.get(key) else {
            return Ok(None);
        };
        let path = self.path.clone().unwrap_or_default();
        T::parse_value(raw).map(Some).map_err(|msg| {
            critdisc::Error::Parse {
                path,
                line: *line,
                msg: format!("{key}: {msg}"),
            }
            .into()
        })
    }

    /// Fails on keys that no resolver asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        let used = self.used.borrow();
        if let Some((key, (line, _))) = self.values.iter().find(|(k, _)| !used.contains(*k)) {
            return Err(critdisc::Error::Parse {
                path: self.path.clone().unwrap_or_default(),
                line: *line,
                msg: format!("unknown key {key:?}"),
            }
            .into());
        }
        Ok(())
    }
}

/// Resolves settings with precedence flag > config file > default and
/// records every resolved value, in resolution order.
pub struct Resolver<'a> {
    file: &'a ConfigFile,
    pub meta: Metadata,
}

impl<'a> Resolver<'a> {
    pub fn new(file: &'a ConfigFile, command: &str) -> Self {
        let mut meta = Metadata::new("critdisc", env!("CARGO_PKG_VERSION"));
        meta.push("command", command);
        if let Some(p) = &file.path {
            meta.push("config_file", p.display());
        }
        Resolver { file, meta }
    }

    pub fn value<T: ConfigValue>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        self.file.mark(key);
        let v = match flag {
            Some(v) => v,
            None => self.file.get(key)?.unwrap_or(default),
        };
        self.meta.push(key, v.render());
        Ok(v)
    }

    pub fn optional<T: ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        self.file.mark(key);
        let v = match flag {
            Some(v) => Some(v),
            None => self.file.get(key)?,
        };
        self.meta.push(
            key,
            v.as_ref().map(ConfigValue::render).unwrap_or_else(|| "none".into()),
        );
        Ok(v)
    }

    pub fn required<T: ConfigValue>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError> {
        match self.optional(key, flag)? {
            Some(v) => Ok(v),
            None => Err(CliError::Usage(format!(
                "missing --{key} (or `{key} = ...` in the config file)"
            ))),
        }
    }

    /// Like [`Resolver::required`], but kept out of the metadata.
    pub fn output(&mut self, key: &str, flag: Option<PathBuf>) -> Result<PathBuf, CliError> {
        self.file.mark(key);
        match flag.map(Ok).or_else(|| self.file.get(key).transpose()) {
            Some(v) => v,
            None => Err(CliError::Usage(format!(
                "missing --{key} (or `{key} = ...` in the config file)"
            ))),
        }
    }

    /// Boolean switch: present on the command line means true.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        self.value(key, flag.then_some(true), false)
    }

    pub fn finish(self) -> Result<Metadata, CliError> {
        self.file.finish()?;
        Ok(self.meta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(text: &str) -> ConfigFile {
        ConfigFile::parse(text, Path::new("run.conf")).unwrap()
    }

    #[test]
    fn flag_beats_file_beats_default() {
        let f = file("# comment\nwindow = 30\nsustain_length = 4\nthreshold = 0.2\n");
        let mut r = Resolver::new(&f, "analyze");
        assert_eq!(r.value("window", None, 50usize).unwrap(), 30);
        assert_eq!(r.value("threshold", Some(0.15), 0.1).unwrap(), 0.15);
        assert_eq!(r.value("sustain", None, 10usize).unwrap(), 10);
        assert!(r.finish().unwrap_err().to_string().contains("sustain-length"));
    }

    #[test]
    fn overridden_keys_are_not_unknown() {
        let f = file("threshold = 0.2\n");
        let mut r = Resolver::new(&f, "analyze");
        assert_eq!(r.value("threshold", Some(0.3), 0.1).unwrap(), 0.3);
        assert!(r.finish().is_ok());
    }

    #[test]
    fn malformed_lines_are_located() {
        let err = ConfigFile::parse("window = 3\nnonsense\n", Path::new("c")).unwrap_err();
        assert!(err.to_string().contains('2'), "{err}");
        let f = file("window = many\n");
        let err = Resolver::new(&f, "x").value("window", None, 1usize).unwrap_err();
        assert!(err.to_string().contains("window"), "{err}");
    }

    #[test]
    fn grids_and_switches() {
        let f = file("thresholds = 0.05, 0.1,0.3\nfallback-embeddings = yes\n");
        let mut r = Resolver::new(&f, "sweep");
        assert_eq!(
            r.value("thresholds", None, Grid(vec![0.5])).unwrap(),
            Grid(vec![0.05, 0.1, 0.3])
        );
        assert!(r.switch("fallback-embeddings", false).unwrap());
        let meta = r.finish().unwrap();
        assert!(meta.lines().contains(&"thresholds = 0.05,0.1,0.3".to_string()));
    }
}
