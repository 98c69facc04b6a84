//! Collision-free synthetic names.
//!
//! A surname is a run of consonant–vowel syllables. Editor surnames start
//! with a consonant that never starts an author surname, so the two
//! namespaces cannot collide, and within a namespace distinct indices give
//! distinct surnames.

use crate::corpus::AuthorName;

const CONSONANTS: [char; 16] = ['b', 'd', 'f', 'g', 'h', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v', 'w', 'z'];
const VOWELS: [char; 5] = ['a', 'e', 'i', 'o', 'u'];
const EDITOR_ONSETS: [char; 4] = ['j', 'c', 'y', 'x'];
const AUTHOR_ONSETS: [char; 12] = ['b', 'd', 'g', 'k', 'l', 'm', 'n', 'p', 'r', 's', 't', 'v'];
/// Syllables after the first; 80⁴ ≈ 4·10⁷ names per onset syllable.
const TAIL_SYLLABLES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Namespace {
    Editor,
    Author,
}

#[derive(Debug, Clone, Default)]
pub struct NameFactory;

impl NameFactory {
    /// Number of distinct surnames in a namespace.
    pub fn capacity(namespace: Namespace) -> u64 {
        let onsets = match namespace {
            Namespace::Editor => EDITOR_ONSETS.len(),
            Namespace::Author => AUTHOR_ONSETS.len(),
        } as u64;
        let syllables = (CONSONANTS.len() * VOWELS.len()) as u64;
        onsets * VOWELS.len() as u64 * syllables.pow(TAIL_SYLLABLES as u32)
    }

    pub fn surname(namespace: Namespace, index: u64) -> String {
        assert!(index < Self::capacity(namespace), "name index out of range");
        let onsets: &[char] = match namespace {
            Namespace::Editor => &EDITOR_ONSETS,
            Namespace::Author => &AUTHOR_ONSETS,
        };
        let syllables = (CONSONANTS.len() * VOWELS.len()) as u64;
        let mut rest = index;
        let mut out = String::with_capacity(2 + 2 * TAIL_SYLLABLES);
        let mut tail = Vec::with_capacity(TAIL_SYLLABLES);
        for _ in 0..TAIL_SYLLABLES {
            tail.push((rest % syllables) as usize);
            rest /= syllables;
        }
        let vowel = (rest % VOWELS.len() as u64) as usize;
        let onset = (rest / VOWELS.len() as u64) as usize;
        out.push(onsets[onset].to_ascii_uppercase());
        out.push(VOWELS[vowel]);
        for s in tail.into_iter().rev() {
            out.push(CONSONANTS[s / VOWELS.len()]);
            out.push(VOWELS[s % VOWELS.len()]);
        }
        out
    }

    /// Name with an initial derived from the index.
    pub fn name(namespace: Namespace, index: u64) -> AuthorName {
        let initial = (b'A' + (index.wrapping_mul(7) % 26) as u8) as char;
        AuthorName::new(Self::surname(namespace, index), initial.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn distinct_and_disjoint() {
        let mut seen = HashSet::new();
        for i in (0..200_000u64).step_by(7) {
            assert!(seen.insert(NameFactory::surname(Namespace::Author, i)));
        }
        for i in 0..5_000 {
            let e = NameFactory::surname(Namespace::Editor, i);
            assert!(!seen.contains(&e));
            assert!(seen.insert(e));
        }
        let last = NameFactory::capacity(Namespace::Editor) - 1;
        assert!(NameFactory::surname(Namespace::Editor, last).starts_with('X'));
    }
}
