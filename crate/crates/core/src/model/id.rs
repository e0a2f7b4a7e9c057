use std::borrow::Borrow;
use std::fmt;
use std::path::PathBuf;

/// An identifier of a model element (`L1`, `HS-1`, `MSMT-1`, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Id(String);

impl Id {
    pub fn new(s: impl Into<String>) -> Self {
        Id(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Digits following the identifier's alphabetic prefix, if the id ends in
    /// a run of digits (`H3` -> `3`, `HC-12` -> `12`).
    pub fn digit_suffix(&self) -> Option<&str> {
        let start = self
            .0
            .char_indices()
            .rev()
            .take_while(|(_, c)| c.is_ascii_digit())
            .last()
            .map(|(i, _)| i)?;
        Some(&self.0[start..])
    }
}

impl fmt::Display for Id {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for Id {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Id {
    fn from(s: &str) -> Self {
        Id(s.to_owned())
    }
}

impl From<String> for Id {
    fn from(s: String) -> Self {
        Id(s)
    }
}

impl PartialEq<str> for Id {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Id {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// Shape constraints for the typed identifiers (`L<digits>`, `HC-<digits>`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdPattern {
    Loss,
    Hazard,
    Constraint,
    Hca,
    Factor,
    Scenario,
    TestSpec,
    Experiment,
    /// Any bare identifier.
    Free,
}

impl IdPattern {
    fn prefix(self) -> Option<&'static str> {
        match self {
            IdPattern::Loss => Some("L"),
            IdPattern::Hazard => Some("H"),
            IdPattern::Constraint => Some("C"),
            IdPattern::Hca => Some("HC-"),
            IdPattern::Factor => Some("CF"),
            IdPattern::Scenario => Some("HS-"),
            IdPattern::TestSpec => Some("TS-"),
            IdPattern::Experiment => Some("ES-"),
            IdPattern::Free => None,
        }
    }

    /// Human-readable name used in "expected ..." diagnostics.
    pub fn describe(self) -> &'static str {
        match self {
            IdPattern::Loss => "loss id",
            IdPattern::Hazard => "hazard id",
            IdPattern::Constraint => "constraint id",
            IdPattern::Hca => "hca id",
            IdPattern::Factor => "causal factor id",
            IdPattern::Scenario => "scenario id",
            IdPattern::TestSpec => "test specification id",
            IdPattern::Experiment => "experiment id",
            IdPattern::Free => "identifier",
        }
    }

    pub fn matches(self, s: &str) -> bool {
        match self.prefix() {
            Some(prefix) => s
                .strip_prefix(prefix)
                .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit())),
            None => is_identifier(s),
        }
    }
}

/// Bare identifiers start with a letter or `_` and continue with
/// alphanumerics, `_`, `-` or `.`.
pub fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

/// Location of a declaration in a model file; lines and columns are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SourcePos {
    pub file: PathBuf,
    pub line: usize,
    pub column: usize,
}

impl SourcePos {
    pub fn new(file: impl Into<PathBuf>, line: usize, column: usize) -> Self {
        debug_assert!(line >= 1 && column >= 1);
        SourcePos {
            file: file.into(),
            line,
            column,
        }
    }
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file.display(), self.line, self.column)
    }
}
