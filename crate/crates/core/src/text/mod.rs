//! Normalization of OCR-extracted meme text.
//!
//! Every step is a total function on UTF-8 strings. Token-based steps split
//! on Unicode whitespace and rejoin with single spaces.

mod clean;
mod contractions;
mod elongation;
mod entities;
mod hashtags;
mod urls;

use alloc::string::String;

pub use clean::strip_nonalnum;
pub use contractions::{expand_contractions, ContractionDict, DEFAULT_CONTRACTIONS};
pub use elongation::collapse_elongations;
pub use entities::{normalize_entities, DATE_TOKEN, NUMBER_TOKEN, TIME_TOKEN};
pub use hashtags::{split_hashtags, Lexicon, DEFAULT_LEXICON};
pub use urls::{is_url, strip_urls};

/// Upper bound on pipeline passes; see [`preprocess`].
const MAX_PASSES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    pub expand_contractions: bool,
    pub strip_urls: bool,
    pub collapse_elongations: bool,
    pub normalize_entities: bool,
    pub split_hashtags: bool,
    pub strip_nonalnum: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self::all(true)
    }
}

impl PreprocessConfig {
    pub const fn all(enabled: bool) -> Self {
        Self {
            expand_contractions: enabled,
            strip_urls: enabled,
            collapse_elongations: enabled,
            normalize_entities: enabled,
            split_hashtags: enabled,
            strip_nonalnum: enabled,
        }
    }
}

/// The dictionary and lexicon the pipeline consults.
#[derive(Debug, Clone)]
pub struct TextResources {
    pub contractions: ContractionDict,
    pub lexicon: Lexicon,
}

impl TextResources {
    /// The shipped contraction dictionary and hashtag lexicon.
    pub fn shipped() -> Self {
        Self {
            contractions: ContractionDict::shipped(),
            lexicon: Lexicon::shipped(),
        }
    }
}

/// Applies the enabled steps in the order
/// strip_urls, split_hashtags, expand_contractions, collapse_elongations,
/// normalize_entities, strip_nonalnum.
///
/// The ordered pass is repeated until its output stops changing (at most
/// `MAX_PASSES` times), so the result is a fixed point: stripping
/// punctuation can expose a new contraction or a bare number, and the
/// second pass then normalizes it.
pub fn preprocess(text: &str, config: &PreprocessConfig, resources: &TextResources) -> String {
    let mut current = single_pass(text, config, resources);
    for _ in 1..MAX_PASSES {
        let next = single_pass(&current, config, resources);
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn single_pass(text: &str, config: &PreprocessConfig, res: &TextResources) -> String {
    let mut s = String::from(text);
    if config.strip_urls {
        s = strip_urls(&s);
    }
    if config.split_hashtags {
        s = split_hashtags(&s, &res.lexicon);
    }
    if config.expand_contractions {
        s = expand_contractions(&s, &res.contractions);
    }
    if config.collapse_elongations {
        s = collapse_elongations(&s);
    }
    if config.normalize_entities {
        s = normalize_entities(&s);
    }
    if config.strip_nonalnum {
        s = strip_nonalnum(&s);
    }
    s
}

/// Splits `token` into leading punctuation, core and trailing punctuation,
/// where punctuation is anything `keep` rejects.
pub(crate) fn split_affixes(token: &str, keep: impl Fn(char) -> bool) -> (&str, &str, &str) {
    let start = token
        .char_indices()
        .find(|(_, c)| keep(*c))
        .map(|(i, _)| i)
        .unwrap_or(token.len());
    let end = token[start..]
        .char_indices()
        .rev()
        .find(|(_, c)| keep(*c))
        .map(|(i, c)| start + i + c.len_utf8())
        .unwrap_or(start);
    (&token[..start], &token[start..end], &token[end..])
}

pub(crate) fn join_tokens<I, S>(tokens: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut out = String::new();
    for t in tokens {
        let t = t.as_ref();
        if t.is_empty() {
            continue;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(t);
    }
    out
}
