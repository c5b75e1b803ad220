//! Flat `key = value` text files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys may repeat; the
//! entries keep file order.

use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct KvFile {
    pub entries: Vec<Entry>,
}

impl KvFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(Error::Parse { line: i + 1, msg: format!("expected `key = value`, got `{line}`") });
            };
            let key = k.trim();
            if key.is_empty() {
                return Err(Error::Parse { line: i + 1, msg: "empty key".into() });
            }
            entries.push(Entry { line: i + 1, key: key.to_string(), value: v.trim().to_string() });
        }
        Ok(Self { entries })
    }

    /// Last value given for `key`.
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().rev().find(|e| e.key == key)
    }

    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        let e = self.get(key).ok_or_else(|| Error::Parse { line: 0, msg: format!("missing key `{key}`") })?;
        e.parse()
    }

    pub fn optional<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key).map(|e| e.parse()).transpose()
    }
}

impl Entry {
    pub fn parse<T: FromStr>(&self) -> Result<T> {
        self.value
            .parse()
            .map_err(|_| Error::Parse { line: self.line, msg: format!("bad value `{}` for `{}`", self.value, self.key) })
    }

    /// Comma-separated list value.
    pub fn parse_list<T: FromStr>(&self) -> Result<Vec<T>> {
        parse_list(&self.value).map_err(|_| Error::Parse {
            line: self.line,
            msg: format!("bad list `{}` for `{}`", self.value, self.key),
        })
    }
}

/// Parses `a, b, c`; an empty string is an empty list.
pub fn parse_list<T: FromStr>(text: &str) -> std::result::Result<Vec<T>, T::Err> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',').map(|s| s.trim().parse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_lists() {
        let f = KvFile::parse("# grid\n\nuct.c = 0.5, 1\n  seeds=10 \n").unwrap();
        assert_eq!(f.entries.len(), 2);
        assert_eq!(f.get("uct.c").unwrap().parse_list::<f64>().unwrap(), vec![0.5, 1.0]);
        assert_eq!(f.require::<u32>("seeds").unwrap(), 10);
        assert!(f.optional::<u32>("absent").unwrap().is_none());
    }

    #[test]
    fn reports_line_numbers() {
        match KvFile::parse("a = 1\nbroken\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        let f = KvFile::parse("x = abc").unwrap();
        assert!(matches!(f.require::<f64>("x"), Err(Error::Parse { line: 1, .. })));
    }
}
