//! `key = value` configuration files and run manifests.
//!
//! Grammar: blank lines and `#` comments are skipped; `[section]` opens the
//! block for one subcommand; `key = value` assigns. Keys before any section
//! header are global defaults visible to every subcommand. Resolution order
//! for each option is: command-line flag, then `[subcommand]` key, then
//! global key, then the built-in default.
//!
//! A manifest is a config file with every option of one run resolved to its
//! final value, written next to the run's outputs. Re-running the same
//! subcommand with `--config manifest.txt` reproduces the outputs byte for
//! byte.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    global: BTreeMap<String, String>,
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
            .map_err(|e| CliError(format!("bad config {}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Self::default();
        let mut section: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| format!("line {}: unterminated section", lineno + 1))?
                    .trim();
                if name.is_empty() {
                    return Err(format!("line {}: empty section name", lineno + 1));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(format!("line {}: empty key", lineno + 1));
            }
            let map = match &section {
                Some(name) => cfg.sections.entry(name.clone()).or_default(),
                None => &mut cfg.global,
            };
            map.insert(key, value);
        }
        Ok(cfg)
    }

    /// Section value first, then the global fallback.
    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|map| map.get(key))
            .or_else(|| self.global.get(key))
            .map(String::as_str)
    }
}

/// One subcommand's view of the merged configuration.
pub struct Scope<'a> {
    cfg: &'a ConfigFile,
    section: &'a str,
}

impl<'a> Scope<'a> {
    pub fn new(cfg: &'a ConfigFile, section: &'a str) -> Self {
        Self { cfg, section }
    }

    fn parse_key<T: FromStr>(&self, key: &str, raw: &str) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        raw.parse().map_err(|e| {
            CliError(format!(
                "config key `{key}` in [{}]: cannot parse `{raw}`: {e}",
                self.section
            ))
        })
    }

    /// Flag value if given, else config value, else the default.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: Display,
    {
        Ok(self.resolve_opt(flag, key)?.unwrap_or(default))
    }

    /// Flag value if given, else config value, else `None`.
    pub fn resolve_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.cfg.get(self.section, key) {
            Some(raw) => Ok(Some(self.parse_key(key, raw)?)),
            None => Ok(None),
        }
    }

    /// Boolean flags: present on the command line wins, else config, else
    /// false. Config accepts `true` / `false`.
    pub fn resolve_switch(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        match self.cfg.get(self.section, key) {
            Some(raw) => self.parse_key(key, raw),
            None => Ok(false),
        }
    }
}

/// Ordered, fully resolved option list for one run.
#[derive(Debug, Clone)]
pub struct Manifest {
    section: String,
    entries: Vec<(String, String)>,
}

impl Manifest {
    pub fn new(section: &str) -> Self {
        Self {
            section: section.to_string(),
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str("# gsw run manifest; rerun with: gsw --config <this file> ");
        out.push_str(&self.section);
        out.push('\n');
        out.push('[');
        out.push_str(&self.section);
        out.push_str("]\n");
        for (key, value) in &self.entries {
            out.push_str(key);
            out.push_str(" = ");
            out.push_str(value);
            out.push('\n');
        }
        out
    }

    pub fn write_to(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.render())
            .map_err(|e| CliError(format!("cannot write manifest {}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_globals_parse() {
        let cfg = ConfigFile::parse(
            "# comment\nseed = 7\n\n[flow]\niterations = 25\nseed = 9\n[bench]\nsizes = 64,128\n",
        )
        .unwrap();
        assert_eq!(cfg.get("flow", "iterations"), Some("25"));
        assert_eq!(cfg.get("flow", "seed"), Some("9")); // section wins
        assert_eq!(cfg.get("bench", "seed"), Some("7")); // global fallback
        assert_eq!(cfg.get("bench", "sizes"), Some("64,128"));
        assert_eq!(cfg.get("distance", "iterations"), None);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(ConfigFile::parse("[flow\n").unwrap_err().contains("line 1"));
        assert!(ConfigFile::parse("novalue\n").unwrap_err().contains("line 1"));
        assert!(ConfigFile::parse("ok = 1\n = 2\n")
            .unwrap_err()
            .contains("line 2"));
    }

    #[test]
    fn scope_precedence_is_flag_then_section_then_global_then_default() {
        let cfg = ConfigFile::parse("p = 1\n[distance]\np = 3\n").unwrap();
        let scope = Scope::new(&cfg, "distance");
        assert_eq!(scope.resolve(Some(9.0f64), "p", 2.0).unwrap(), 9.0);
        assert_eq!(scope.resolve(None::<f64>, "p", 2.0).unwrap(), 3.0);
        let scope = Scope::new(&cfg, "flow");
        assert_eq!(scope.resolve(None::<f64>, "p", 2.0).unwrap(), 1.0);
        assert_eq!(scope.resolve(None::<u64>, "seed", 5).unwrap(), 5);
    }

    #[test]
    fn bad_config_values_are_reported() {
        let cfg = ConfigFile::parse("[distance]\np = abc\n").unwrap();
        let scope = Scope::new(&cfg, "distance");
        let err = scope.resolve(None::<f64>, "p", 2.0).unwrap_err();
        assert!(err.0.contains("`p`"), "{}", err.0);
    }

    #[test]
    fn manifest_round_trips_through_parser() {
        let mut m = Manifest::new("distance");
        m.push("method", "gsw");
        m.push("p", 2.0);
        m.push("x", "circle:radius=2,noise=0.05,n=64,seed=3");
        let parsed = ConfigFile::parse(&m.render()).unwrap();
        assert_eq!(parsed.get("distance", "method"), Some("gsw"));
        assert_eq!(parsed.get("distance", "p"), Some("2"));
        assert_eq!(
            parsed.get("distance", "x"),
            Some("circle:radius=2,noise=0.05,n=64,seed=3")
        );
    }
}
