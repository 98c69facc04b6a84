//! Author name normalization.
//!
//! Names are stored exactly as recorded in the corpus file and compared
//! through an [`AuthorKey`]: the surname is case-folded, stripped of
//! diacritics and hyphens, and the first name is reduced to a single
//! upper-case initial.

use std::fmt;

use serde::{Deserialize, Serialize};
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// First-name initial of an [`AuthorKey`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Initial {
    Letter(char),
    Unknown,
}

impl Initial {
    /// Reduces a recorded first name (or initials such as `"J.R."`) to its
    /// first letter. Only the first initial is kept.
    pub fn from_raw(raw: &str) -> Self {
        if raw.is_ascii() {
            return raw
                .bytes()
                .find(u8::is_ascii_alphabetic)
                .map(|b| Initial::Letter(char::from(b.to_ascii_uppercase())))
                .unwrap_or(Initial::Unknown);
        }
        raw.nfd()
            .filter(|c| !is_combining_mark(*c))
            .find(|c| c.is_alphabetic())
            .and_then(|c| c.to_uppercase().next())
            .map(Initial::Letter)
            .unwrap_or(Initial::Unknown)
    }
}

impl fmt::Display for Initial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Initial::Letter(c) => write!(f, "{c}"),
            Initial::Unknown => f.write_str("unknown"),
        }
    }
}

/// Canonical (surname, first initial) comparison key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AuthorKey {
    surname: String,
    initial: Initial,
}

impl AuthorKey {
    /// Builds a key from raw name parts. Returns `None` when the surname has
    /// no characters left after normalization.
    pub fn new(surname: &str, initial: &str) -> Option<Self> {
        let surname = normalize_surname(surname);
        if surname.is_empty() {
            return None;
        }
        Some(Self {
            surname,
            initial: Initial::from_raw(initial),
        })
    }

    pub fn surname(&self) -> &str {
        &self.surname
    }

    pub fn initial(&self) -> Initial {
        self.initial
    }
}

impl fmt::Display for AuthorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.surname, self.initial)
    }
}

fn surname_chars(raw: &str) -> impl Iterator<Item = char> + '_ {
    raw.trim()
        .nfd()
        .filter(|c| !is_combining_mark(*c) && *c != '-')
        .flat_map(char::to_lowercase)
}

fn ascii_surname_chars(raw: &str) -> impl Iterator<Item = char> + '_ {
    raw.trim()
        .bytes()
        .filter(|&b| b != b'-')
        .map(|b| char::from(b.to_ascii_lowercase()))
}

/// Case-folds, strips diacritics and drops hyphens.
pub fn normalize_surname(raw: &str) -> String {
    if raw.is_ascii() {
        return ascii_surname_chars(raw).collect();
    }
    surname_chars(raw).collect()
}

/// An author name as recorded: raw surname and raw first-name initial(s).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthorName {
    pub surname: String,
    pub initial: String,
}

impl AuthorName {
    pub fn new(surname: impl Into<String>, initial: impl Into<String>) -> Self {
        Self {
            surname: surname.into(),
            initial: initial.into(),
        }
    }

    pub fn key(&self) -> Option<AuthorKey> {
        AuthorKey::new(&self.surname, &self.initial)
    }

    /// Allocation-free equivalent of `self.key().as_ref() == Some(key)`.
    pub fn matches(&self, key: &AuthorKey) -> bool {
        if Initial::from_raw(&self.initial) != key.initial {
            return false;
        }
        if self.surname.is_ascii() {
            ascii_surname_chars(&self.surname).eq(key.surname.chars())
        } else {
            surname_chars(&self.surname).eq(key.surname.chars())
        }
    }
}
