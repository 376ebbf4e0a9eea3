//! Sectioned `key = value` text, one pair per line. `#` and `;` start comments.

use std::collections::BTreeMap;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IniError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("[{section}] {key}: cannot parse {value:?} as {expected}")]
    Value { section: String, key: String, value: String, expected: &'static str },
    #[error("[{section}] {key} is required")]
    Missing { section: String, key: String },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ini {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Ini {
    pub fn parse(text: &str) -> Result<Self, IniError> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| IniError::Syntax { line: k + 1, message: "unterminated section header".into() })?;
                current = name.trim().to_ascii_lowercase();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| IniError::Syntax { line: k + 1, message: format!("expected key = value, got {line:?}") })?;
            let key = key.trim().to_ascii_lowercase();
            if key.is_empty() {
                return Err(IniError::Syntax { line: k + 1, message: "empty key".into() });
            }
            let slot = sections.entry(current.clone()).or_default();
            if slot.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(IniError::Syntax { line: k + 1, message: format!("duplicate key {key:?}") });
            }
        }
        Ok(Self { sections })
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.sections.contains_key(section)
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    pub fn get<V: FromStr>(&self, section: &str, key: &str, expected: &'static str) -> Result<Option<V>, IniError> {
        match self.raw(section, key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| IniError::Value {
                section: section.into(),
                key: key.into(),
                value: v.into(),
                expected,
            }),
        }
    }

    pub fn get_or<V: FromStr>(&self, section: &str, key: &str, expected: &'static str, default: V) -> Result<V, IniError> {
        Ok(self.get(section, key, expected)?.unwrap_or(default))
    }

    pub fn require<V: FromStr>(&self, section: &str, key: &str, expected: &'static str) -> Result<V, IniError> {
        self.get(section, key, expected)?
            .ok_or_else(|| IniError::Missing { section: section.into(), key: key.into() })
    }

    /// Comma-separated list.
    pub fn list<V: FromStr>(&self, section: &str, key: &str, expected: &'static str) -> Result<Option<Vec<V>>, IniError> {
        let Some(v) = self.raw(section, key) else { return Ok(None) };
        v.split(',')
            .map(|s| s.trim())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|_| IniError::Value {
                    section: section.into(),
                    key: key.into(),
                    value: s.into(),
                    expected,
                })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Some)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_lists() {
        let ini = Ini::parse("top = 1\n[Grid] # c\n n = 64 ; trailing\nlengths = 1.5, 2\n\n[material]\nmu=2").unwrap();
        assert_eq!(ini.raw("", "top"), Some("1"));
        assert_eq!(ini.require::<usize>("grid", "n", "integer").unwrap(), 64);
        assert_eq!(ini.list::<f64>("grid", "lengths", "number").unwrap(), Some(vec![1.5, 2.0]));
        assert_eq!(ini.get_or("material", "eps", "number", 1.0).unwrap(), 1.0);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(Ini::parse("[grid\nn=1"), Err(IniError::Syntax { line: 1, .. })));
        assert!(matches!(Ini::parse("[a]\nnovalue"), Err(IniError::Syntax { line: 2, .. })));
        assert!(matches!(Ini::parse("[a]\nk=1\nk=2"), Err(IniError::Syntax { line: 3, .. })));
        let ini = Ini::parse("[a]\nk = x").unwrap();
        assert!(ini.require::<f64>("a", "k", "number").is_err());
        assert!(ini.require::<f64>("a", "missing", "number").is_err());
    }
}
