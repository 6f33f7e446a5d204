//! Effective run configuration: command-line flags over an optional
//! `key=value` file over built-in defaults. Every value that was consulted is
//! recorded, in order, for the output header.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use kg_lattice::algebra::Rational;

use crate::error::{CliError, Result};

/// Parses `key=value` lines; blank lines and `#` comments are skipped and
/// dashes in keys are read as underscores.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('-', "_");
        if key.is_empty() {
            return Err(CliError::usage(format!("config line {}: empty key", i + 1)));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(CliError::usage(format!("config key {key:?} given twice")));
        }
    }
    Ok(out)
}

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    used: BTreeSet<String>,
    effective: Vec<(String, String)>,
}

impl Settings {
    pub fn new(file: BTreeMap<String, String>) -> Self {
        Self {
            file,
            ..Self::default()
        }
    }

    fn from_file<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.used.insert(key.to_string());
        match self.file.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::usage(format!("config {key}={raw}: {e}"))),
        }
    }

    /// Flag, then config file, then `default`.
    pub fn value<T: FromStr + fmt::Display>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let from_file = self.from_file(key)?;
        let v = flag.or(from_file).unwrap_or(default);
        self.effective.push((key.to_string(), v.to_string()));
        Ok(v)
    }

    /// Like [`Settings::value`] without a default; absent values are echoed
    /// as `auto`.
    pub fn optional<T: FromStr + fmt::Display>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>>
    where
        T::Err: fmt::Display,
    {
        let from_file = self.from_file(key)?;
        let v = flag.or(from_file);
        let shown = v.as_ref().map_or_else(|| "auto".to_string(), ToString::to_string);
        self.effective.push((key.to_string(), shown));
        Ok(v)
    }

    /// Boolean switch; a file value must be `true` or `false`.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool> {
        let from_file: Option<bool> = self.from_file(key)?;
        let v = flag || from_file.unwrap_or(false);
        self.effective.push((key.to_string(), v.to_string()));
        Ok(v)
    }

    /// Rejects config keys that the command never consulted.
    pub fn finish(&self) -> Result<()> {
        let unknown: Vec<&String> = self.file.keys().filter(|k| !self.used.contains(*k)).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(CliError::usage(format!("unknown config keys: {unknown:?}")))
        }
    }

    pub fn effective(&self) -> &[(String, String)] {
        &self.effective
    }
}

/// Comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub struct List<T>(pub Vec<T>);

impl<T: FromStr> FromStr for List<T>
where
    T::Err: fmt::Display,
{
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.split(',')
            .map(|x| x.trim().parse::<T>().map_err(|e| format!("{x:?}: {e}")))
            .collect::<std::result::Result<Vec<T>, String>>()
            .map(List)
    }
}

impl<T: fmt::Display> fmt::Display for List<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        Ok(())
    }
}

/// Rational evaluation point `a=..,g3=..`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalPoint {
    pub a: Rational,
    pub g3: Rational,
}

impl FromStr for EvalPoint {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (mut a, mut g3) = (None, None);
        for part in s.split(',') {
            let (k, v) = part.split_once('=').ok_or(format!("expected name=value in {part:?}"))?;
            let q: Rational = v.trim().parse().map_err(|e| format!("{v:?}: {e}"))?;
            match k.trim() {
                "a" => a = Some(q),
                "g3" => g3 = Some(q),
                other => return Err(format!("unknown variable {other:?}")),
            }
        }
        Ok(EvalPoint {
            a: a.ok_or("missing a")?,
            g3: g3.ok_or("missing g3")?,
        })
    }
}

impl fmt::Display for EvalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a={},g3={}", self.a, self.g3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryArg {
    Periodic,
    Fixed,
}

impl FromStr for BoundaryArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "periodic" => Ok(BoundaryArg::Periodic),
            "fixed" | "dirichlet" => Ok(BoundaryArg::Fixed),
            _ => Err(format!("unknown boundary {s:?} (periodic or fixed)")),
        }
    }
}

impl fmt::Display for BoundaryArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryArg::Periodic => "periodic",
            BoundaryArg::Fixed => "fixed",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = parse_config("n = 4\n# comment\n\nbeta=2\n").unwrap();
        let mut s = Settings::new(file);
        assert_eq!(s.value("n", Some(7usize), 3).unwrap(), 7);
        assert_eq!(s.value("beta", None, 1.0).unwrap(), 2.0);
        assert_eq!(s.value("a", None, 1.0).unwrap(), 1.0);
        assert_eq!(s.optional::<f64>("dt", None).unwrap(), None);
        s.finish().unwrap();
        let shown: Vec<String> = s.effective().iter().map(|(k, v)| format!("{k}={v}")).collect();
        assert_eq!(shown, ["n=7", "beta=2", "a=1", "dt=auto"]);
    }

    #[test]
    fn bad_files() {
        assert!(parse_config("n").is_err());
        assert!(parse_config("n=1\nn=2").is_err());
        let mut s = Settings::new(parse_config("bogus=1\nn=x").unwrap());
        assert!(s.value("n", None, 1usize).is_err());
        assert!(s.finish().is_err());
    }

    #[test]
    fn value_types() {
        let l: List<f64> = "0.1, 0.2,0.5".parse().unwrap();
        assert_eq!(l.0, vec![0.1, 0.2, 0.5]);
        assert_eq!(l.to_string(), "0.1,0.2,0.5");
        let p: EvalPoint = "a=1,g3=-1/2".parse().unwrap();
        assert_eq!(p.to_string(), "a=1,g3=-1/2");
        assert!("a=1".parse::<EvalPoint>().is_err());
        assert_eq!("dirichlet".parse::<BoundaryArg>().unwrap(), BoundaryArg::Fixed);
    }
}
