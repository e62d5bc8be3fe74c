use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{join_tokens, split_affixes};
use crate::error::{Error, Result};

/// Shipped chat-word dictionary, `token<TAB>expansion` per line.
pub const DEFAULT_CONTRACTIONS: &str = include_str!("../../data/contractions.tsv");

/// Chat token (lowercase) to expansion phrase.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContractionDict {
    entries: BTreeMap<String, String>,
}

impl ContractionDict {
    pub fn new<I, K, V>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (K, V)>,
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let mut entries = BTreeMap::new();
        for (k, v) in pairs {
            let key = k.as_ref().trim().to_lowercase();
            let expansion = join_tokens(v.as_ref().split_whitespace());
            if key.is_empty() || key.chars().any(char::is_whitespace) {
                return Err(Error::Format {
                    what: "contraction dictionary",
                    reason: alloc::format!("bad key {:?}", k.as_ref()),
                });
            }
            if expansion.is_empty() || expansion.to_lowercase() == key {
                return Err(Error::Format {
                    what: "contraction dictionary",
                    reason: alloc::format!("key {key:?} has an empty or identical expansion"),
                });
            }
            entries.insert(key, expansion);
        }
        Ok(Self { entries })
    }

    /// Parses `token<TAB>expansion` lines; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('\t').ok_or_else(|| Error::Format {
                what: "contraction dictionary",
                reason: alloc::format!("line {} has no tab separator", n + 1),
            })?;
            pairs.push((k.to_string(), v.to_string()));
        }
        Self::new(pairs)
    }

    pub fn shipped() -> Self {
        Self::parse(DEFAULT_CONTRACTIONS).expect("shipped contraction dictionary is valid")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Case-insensitive lookup.
    pub fn get(&self, token: &str) -> Option<&str> {
        self.entries.get(&token.to_lowercase()).map(String::as_str)
    }
}

/// Replaces every token whose alphanumeric core is a dictionary key.
/// Punctuation around the core is kept: `YOLO!` becomes `you only live once!`.
pub fn expand_contractions(text: &str, dict: &ContractionDict) -> String {
    join_tokens(text.split_whitespace().map(|token| {
        let (lead, core, trail) = split_affixes(token, char::is_alphanumeric);
        match dict.get(core) {
            Some(expansion) if !core.is_empty() => {
                let mut s = String::with_capacity(lead.len() + expansion.len() + trail.len());
                s.push_str(lead);
                s.push_str(expansion);
                s.push_str(trail);
                s
            }
            _ => token.to_string(),
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_pairs() {
        let d = ContractionDict::shipped();
        assert!(d.len() >= 50);
        assert_eq!(expand_contractions("YOLO", &d), "you only live once");
        assert_eq!(expand_contractions("ASAP reply", &d), "as soon as possible reply");
        assert_eq!(expand_contractions("", &d), "");
        assert_eq!(expand_contractions("yolo!! ok", &d), "you only live once!! ok");
        assert_eq!(expand_contractions("apple  pie", &d), "apple pie");
    }

    #[test]
    fn shipped_dictionary_is_closed() {
        // Expansions never contain keys, so one expansion pass is final.
        let d = ContractionDict::shipped();
        for e in d.entries.values() {
            for w in e.split(' ') {
                assert!(d.get(w).is_none(), "{w} is both an expansion word and a key");
                assert!(w.chars().all(|c| c.is_ascii_lowercase()), "{w}");
            }
        }
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(ContractionDict::parse("lol\tLOL").is_err());
        assert!(ContractionDict::parse("no tab here").is_err());
        assert!(ContractionDict::new([("a b", "x")]).is_err());
        let d = ContractionDict::parse("# comment\n\nbrb\tbe right back\n").unwrap();
        assert_eq!(d.get("BRB"), Some("be right back"));
    }
}
