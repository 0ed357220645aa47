//! Flat `key = value` configuration, merged as defaults < file < flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use clap::{Arg, ArgMatches, Command};

use crate::Failure;

/// One recognised key of a subcommand.
pub struct Key {
    pub name: &'static str,
    pub default: &'static str,
    pub help: &'static str,
}

pub const fn key(name: &'static str, default: &'static str, help: &'static str) -> Key {
    Key { name, default, help }
}

/// Keys shared by every subcommand.
pub const GLOBAL: &[Key] = &[
    key("out", ".", "output directory"),
    key("threads", "1", "worker threads for parallel stages"),
];

pub fn add_keys(mut cmd: Command, keys: &[Key]) -> Command {
    for k in GLOBAL.iter().chain(keys) {
        let help = if k.default.is_empty() { k.help.to_string() } else { format!("{} [default: {}]", k.help, k.default) };
        cmd = cmd.arg(Arg::new(k.name).long(k.name).value_name("VALUE").help(help));
    }
    cmd.arg(Arg::new("config").long("config").value_name("FILE").help("flat key = value file; flags take precedence"))
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(format!("line {}: empty key", i + 1));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// The fully resolved settings of one run.
pub struct Resolved {
    pub command: String,
    values: BTreeMap<String, String>,
}

impl Resolved {
    pub fn resolve(command: &str, keys: &[Key], m: &ArgMatches) -> Result<Self, Failure> {
        let mut values: BTreeMap<String, String> = GLOBAL.iter().chain(keys).map(|k| (k.name.to_string(), k.default.to_string())).collect();
        if let Some(path) = m.get_one::<String>("config") {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("cannot read config {path}: {e}")))?;
            for (k, v) in parse_config_text(&text).map_err(|e| Failure::Config(format!("{path}: {e}")))? {
                if !values.contains_key(&k) {
                    return Err(Failure::Config(format!("{path}: unknown key `{k}` for {command}")));
                }
                values.insert(k, v);
            }
        }
        for k in GLOBAL.iter().chain(keys) {
            if let Some(v) = m.get_one::<String>(k.name) {
                values.insert(k.name.to_string(), v.clone());
            }
        }
        Ok(Resolved { command: command.to_string(), values })
    }

    pub fn raw(&self, k: &str) -> &str {
        self.values.get(k).map(String::as_str).unwrap_or("")
    }

    pub fn get<T: FromStr>(&self, k: &str) -> Result<T, Failure>
    where
        T::Err: Display,
    {
        let v = self.raw(k);
        v.parse().map_err(|e| Failure::Config(format!("{k} = `{v}`: {e}")))
    }

    /// `None` for an empty value.
    pub fn opt<T: FromStr>(&self, k: &str) -> Result<Option<T>, Failure>
    where
        T::Err: Display,
    {
        if self.raw(k).is_empty() {
            Ok(None)
        } else {
            self.get(k).map(Some)
        }
    }

    pub fn list(&self, k: &str) -> Result<Vec<f64>, Failure> {
        self.raw(k)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|e| Failure::Config(format!("{k}: `{s}`: {e}"))))
            .collect()
    }

    pub fn out_dir(&self) -> &Path {
        Path::new(self.raw("out"))
    }

    /// The resolved configuration in the same format it is read in.
    pub fn to_text(&self) -> String {
        let mut s = format!("# cascade {}\n", self.command);
        for (k, v) in &self.values {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blanks() {
        let m = parse_config_text("# c\n\nN = 4 # gens\n seed=3\n").unwrap();
        assert_eq!(m["N"], "4");
        assert_eq!(m["seed"], "3");
        assert!(parse_config_text("oops").is_err());
    }
}
