//! Flat `key = value` configuration with line-aware errors.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use minset::competitor::scenario;
use minset::geomset::PolySet;
use minset::homology::FgAbelianGroup;
use minset::Point64;

use crate::Failure;

pub struct Config {
    source: String,
    base: PathBuf,
    entries: BTreeMap<String, (usize, String)>,
    used: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn empty() -> Self {
        Config { source: "<none>".into(), base: PathBuf::from("."), entries: BTreeMap::new(), used: RefCell::default() }
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&text, &path.display().to_string(), base)
    }

    pub fn parse(text: &str, source: &str, base: PathBuf) -> Result<Self, Failure> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Failure::input(format!("{source} line {no}: expected `key = value`, got {line:?}")))?;
            let k = k.trim().to_string();
            if k.is_empty() || k.contains(char::is_whitespace) {
                return Err(Failure::input(format!("{source} line {no}: bad key {k:?}")));
            }
            if let Some((prev, _)) = entries.get(&k) {
                return Err(Failure::input(format!("{source} line {no}: `{k}` already set on line {prev}")));
            }
            entries.insert(k, (no, v.trim().to_string()));
        }
        Ok(Config { source: source.into(), base, entries, used: RefCell::default() })
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries.get(key)
    }

    fn err(&self, key: &str, msg: impl std::fmt::Display) -> Failure {
        match self.entries.get(key) {
            Some((no, _)) => Failure::input(format!("{} line {no}: `{key}` {msg}", self.source)),
            None => Failure::input(format!("{}: `{key}` {msg}", self.source)),
        }
    }

    pub fn get<V: FromStr>(&self, key: &str) -> Result<Option<V>, Failure>
    where
        V::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((_, v)) => v.parse().map(Some).map_err(|e| self.err(key, format!("cannot parse {v:?}: {e}"))),
        }
    }

    pub fn or<V: FromStr>(&self, key: &str, default: V) -> Result<V, Failure>
    where
        V::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<V: FromStr>(&self, key: &str) -> Result<V, Failure>
    where
        V::Err: std::fmt::Display,
    {
        self.get(key)?.ok_or_else(|| self.err(key, "is required"))
    }

    /// Comma separated list.
    pub fn list<V: FromStr>(&self, key: &str) -> Result<Option<Vec<V>>, Failure>
    where
        V::Err: std::fmt::Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some((_, v)) => v
                .split(',')
                .map(|t| t.trim().parse().map_err(|e| self.err(key, format!("cannot parse {t:?}: {e}"))))
                .collect::<Result<Vec<V>, _>>()
                .map(Some),
        }
    }

    pub fn point(&self, key: &str, n: usize) -> Result<Option<Point64>, Failure> {
        match self.list::<f64>(key)? {
            None => Ok(None),
            Some(v) if v.len() == n => Ok(Some(Point64::from_f64(&v))),
            Some(v) => Err(self.err(key, format!("needs {n} coordinates, got {}", v.len()))),
        }
    }

    pub fn group(&self) -> Result<FgAbelianGroup, Failure> {
        match self.raw("group") {
            None => Ok(FgAbelianGroup::integers()),
            Some((_, v)) => v.parse().map_err(|e| self.err("group", e)),
        }
    }

    /// A scene path (relative to the config file) or `builtin:NAME`.
    pub fn set(&self, key: &str) -> Result<Option<PolySet<f64>>, Failure> {
        let Some((_, v)) = self.raw(key) else { return Ok(None) };
        if let Some(name) = v.strip_prefix("builtin:") {
            return builtin(name).map(Some).ok_or_else(|| self.err(key, format!("unknown builtin {name:?}")));
        }
        load_scene(&self.base.join(v)).map(Some)
    }

    pub fn require_set(&self, key: &str) -> Result<PolySet<f64>, Failure> {
        self.set(key)?.ok_or_else(|| self.err(key, "is required"))
    }

    /// Paths listed under `key`, relative to the config file.
    pub fn paths(&self, key: &str) -> Result<Option<Vec<PathBuf>>, Failure> {
        Ok(self.list::<String>(key)?.map(|v| v.into_iter().map(|p| self.base.join(p)).collect()))
    }

    /// Fails on the first key no command asked for.
    pub fn check_unused(&self) -> Result<(), Failure> {
        let used = self.used.borrow();
        match self.entries.iter().filter(|(k, _)| !used.contains(*k)).min_by_key(|(_, (no, _))| *no) {
            Some((k, (no, _))) => Err(Failure::input(format!("{} line {no}: unknown key `{k}`", self.source))),
            None => Ok(()),
        }
    }
}

pub fn load_scene(path: &Path) -> Result<PolySet<f64>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    PolySet::from_scene(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

pub fn builtin(name: &str) -> Option<PolySet<f64>> {
    Some(match name {
        "circle" => scenario::circle(),
        "square" => scenario::square(),
        "glue_limit" => scenario::glue_limit(),
        "glue_replacement" => scenario::glue_replacement(),
        "arc_deleted" => scenario::arc_deleted_circle(8).0,
        "two_spoke_circle" => scenario::two_spoke_pair().0,
        "two_spoke_square" => scenario::two_spoke_pair().1,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> Result<Config, Failure> {
        Config::parse(text, "test.cfg", PathBuf::from("."))
    }

    #[test]
    fn parses_values_and_comments() {
        let c = cfg("# scenario\nr1 = 0.52\nks = 1, 10,100 # powers\ngroup = rank 1; torsion 2, 3\n").unwrap();
        assert_eq!(c.require::<f64>("r1").unwrap(), 0.52);
        assert_eq!(c.list::<u64>("ks").unwrap(), Some(vec![1, 10, 100]));
        // Z/2 + Z/3 is normalized to invariant factors
        assert_eq!(c.group().unwrap().to_string(), "Z+Z/6");
        assert!(c.check_unused().is_ok());
    }

    #[test]
    fn errors_name_the_line() {
        let e = cfg("a = 1\n\nthis line is wrong\n").err().unwrap();
        assert!(e.message.contains("line 3"), "{}", e.message);
        let e = cfg("a = 1\na = 2\n").err().unwrap();
        assert!(e.message.contains("line 2") && e.message.contains("line 1"));
        let c = cfg("x = 1\nm = seven\n").unwrap();
        assert!(c.require::<i32>("m").err().unwrap().message.contains("line 2"));
        assert!(c.check_unused().err().unwrap().message.contains("line 1"));
    }

    #[test]
    fn builtins_resolve() {
        let c = cfg("e = builtin:circle\nf = builtin:nothing\n").unwrap();
        assert_eq!(c.require_set("e").unwrap().len(), scenario::POLY_SIDES);
        assert!(c.set("f").is_err());
    }
}
