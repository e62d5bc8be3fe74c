use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{join_tokens, split_affixes};

/// Shipped lexicon: lowercase English words, most frequent first.
pub const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.txt");

/// Unigram lexicon with Zipf costs.
///
/// The word at 0-based frequency rank `r` in a lexicon of `N` words has cost
/// `ln((r + 1) * ln N)`, the negative log of a Zipf probability. A
/// segmentation's cost is the sum over its words; the cheapest wins.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    costs: BTreeMap<String, f64>,
    max_len: usize,
}

impl Lexicon {
    /// Words in descending frequency order. Duplicates keep their first rank.
    pub fn from_ranked<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let words: Vec<String> = words
            .into_iter()
            .map(|w| w.as_ref().trim().to_lowercase())
            .filter(|w| !w.is_empty())
            .collect();
        let log_n = libm::log((words.len().max(2)) as f64);
        let mut costs = BTreeMap::new();
        let mut max_len = 0;
        for (rank, w) in words.into_iter().enumerate() {
            max_len = max_len.max(w.len());
            costs.entry(w).or_insert_with(|| libm::log((rank as f64 + 1.0) * log_n));
        }
        Self { costs, max_len }
    }

    /// One word per line, most frequent first.
    pub fn parse(text: &str) -> Self {
        Self::from_ranked(text.lines())
    }

    pub fn shipped() -> Self {
        Self::parse(DEFAULT_LEXICON)
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    pub fn cost(&self, word: &str) -> Option<f64> {
        self.costs.get(word).copied()
    }

    /// Minimum-cost split of `s` (lowercase ASCII) into lexicon words, or
    /// `None` when no complete split exists. Ties keep the split found first
    /// scanning word ends left to right.
    pub fn segment(&self, s: &str) -> Option<Vec<String>> {
        if s.is_empty() || !s.is_ascii() {
            return None;
        }
        let n = s.len();
        // best[i] = (cost, start of last word) for the prefix s[..i]
        let mut best: Vec<Option<(f64, usize)>> = alloc::vec![None; n + 1];
        best[0] = Some((0.0, 0));
        for end in 1..=n {
            let lo = end.saturating_sub(self.max_len);
            for start in lo..end {
                let Some((prefix, _)) = best[start] else { continue };
                if let Some(c) = self.cost(&s[start..end]) {
                    let total = prefix + c;
                    if best[end].map_or(true, |(b, _)| total < b) {
                        best[end] = Some((total, start));
                    }
                }
            }
        }
        best[n]?;
        let mut words = Vec::new();
        let mut end = n;
        while end > 0 {
            let (_, start) = best[end].expect("reachable prefix");
            words.push(s[start..end].to_string());
            end = start;
        }
        words.reverse();
        Some(words)
    }
}

/// Replaces each `#tag` token with its lexicon segmentation. Tags that cannot
/// be fully segmented lose the `#` and are kept as written.
pub fn split_hashtags(text: &str, lexicon: &Lexicon) -> String {
    join_tokens(text.split_whitespace().map(|token| {
        let Some(rest) = token.strip_prefix('#') else {
            return token.to_string();
        };
        let (lead, core, trail) = split_affixes(rest, char::is_alphanumeric);
        if rest.is_empty() {
            return token.to_string();
        }
        if !lead.is_empty() || core.is_empty() {
            return rest.to_string();
        }
        match lexicon.segment(&core.to_lowercase()) {
            Some(words) => {
                let mut s = words.join(" ");
                s.push_str(trail);
                s
            }
            None => rest.to_string(),
        }
    }))
}
