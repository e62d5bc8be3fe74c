use alloc::string::String;

use super::join_tokens;

/// TLDs recognised for bare domains such as `memegenerator.net`. Two-letter
/// codes that are common English words (`in`, `it`, `me`, `be`, `us`, `to`,
/// `so`, `no`, `at`) are left out so OCR run-ons like `done.it` survive.
const KNOWN_TLDS: &[&str] = &[
    "com", "net", "org", "edu", "gov", "mil", "int", "info", "biz", "io", "co", "uk", "ca", "au", "de", "fr", "ru",
    "jp", "cn", "nl", "es", "br", "mx", "ly", "tv", "news", "online", "site", "xyz", "app", "dev", "blog", "live",
    "club", "top", "shop", "ai", "gg", "fm", "tk", "ch", "eu", "pl", "se", "nz", "za",
];

fn is_domain_label(label: &str) -> bool {
    !label.is_empty()
        && !label.starts_with('-')
        && !label.ends_with('-')
        && label.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-')
}

/// True for `scheme://...`, `www....` and bare `name.tld[/path]` tokens.
pub fn is_url(token: &str) -> bool {
    let lower = token.to_ascii_lowercase();
    if lower.contains("://") {
        return true;
    }
    let trimmed = lower
        .trim_start_matches(|c: char| "([{<\"'".contains(c))
        .trim_end_matches(|c: char| ".,;:!?)]}>\"'".contains(c));
    if trimmed.starts_with("www.") && trimmed.len() > 4 {
        return true;
    }
    let host = trimmed.split('/').next().unwrap_or("");
    let labels: alloc::vec::Vec<&str> = host.split('.').collect();
    if labels.len() < 2 || !labels.iter().all(|l| is_domain_label(l)) {
        return false;
    }
    let tld = labels[labels.len() - 1];
    KNOWN_TLDS.contains(&tld)
        && labels[..labels.len() - 1]
            .iter()
            .any(|l| l.bytes().any(|b| b.is_ascii_alphabetic()))
}

/// Drops URL tokens and collapses the surrounding whitespace.
pub fn strip_urls(text: &str) -> String {
    join_tokens(text.split_whitespace().filter(|t| !is_url(t)))
}
