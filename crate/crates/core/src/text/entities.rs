//! Date, clock-time and number normalization.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{join_tokens, split_affixes};

pub const DATE_TOKEN: &str = "<date>";
pub const TIME_TOKEN: &str = "<time>";
pub const NUMBER_TOKEN: &str = "<number>";

const MONTHS: &[&str] = &[
    "january",
    "february",
    "march",
    "april",
    "may",
    "june",
    "july",
    "august",
    "september",
    "october",
    "november",
    "december",
    "jan",
    "feb",
    "mar",
    "apr",
    "jun",
    "jul",
    "aug",
    "sep",
    "sept",
    "oct",
    "nov",
    "dec",
];

fn core_char(c: char) -> bool {
    c.is_alphanumeric() || c == '+' || c == '-'
}

fn all_digits(s: &str, min: usize, max: usize) -> bool {
    (min..=max).contains(&s.len()) && s.bytes().all(|b| b.is_ascii_digit())
}

fn parse_small(s: &str) -> Option<u32> {
    if s.is_empty() || s.len() > 4 || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `dd/mm/yyyy` (either day-month order) or `yyyy-mm-dd`.
fn is_numeric_date(s: &str) -> bool {
    let slash: Vec<&str> = s.split('/').collect();
    if slash.len() == 3 && all_digits(slash[0], 1, 2) && all_digits(slash[1], 1, 2) && all_digits(slash[2], 4, 4) {
        let (a, b) = (parse_small(slash[0]).unwrap(), parse_small(slash[1]).unwrap());
        let valid = |d: u32, m: u32| (1..=31).contains(&d) && (1..=12).contains(&m);
        return valid(a, b) || valid(b, a);
    }
    let dash: Vec<&str> = s.split('-').collect();
    if dash.len() == 3 && all_digits(dash[0], 4, 4) && all_digits(dash[1], 1, 2) && all_digits(dash[2], 1, 2) {
        let (m, d) = (parse_small(dash[1]).unwrap(), parse_small(dash[2]).unwrap());
        return (1..=12).contains(&m) && (1..=31).contains(&d);
    }
    false
}

fn is_month(s: &str) -> bool {
    let lower = s.to_lowercase();
    MONTHS.contains(&lower.as_str())
}

fn is_meridiem(s: &str) -> bool {
    matches!(s.to_lowercase().as_str(), "am" | "pm" | "a.m" | "p.m")
}

/// `hh:mm` or `hh:mm:ss`, optionally with an attached am/pm suffix.
fn is_clock(s: &str) -> bool {
    let lower = s.to_lowercase();
    let (body, meridiem) = ["a.m", "p.m", "am", "pm"]
        .iter()
        .find_map(|suffix| lower.strip_suffix(suffix).map(|b| (b, true)))
        .unwrap_or((lower.as_str(), false));
    let parts: Vec<&str> = body.split(':').collect();
    if !(2..=3).contains(&parts.len()) || !all_digits(parts[0], 1, 2) {
        return false;
    }
    if !parts[1..]
        .iter()
        .all(|p| all_digits(p, 2, 2) && parse_small(p).unwrap() <= 59)
    {
        return false;
    }
    let hour = parse_small(parts[0]).unwrap();
    if meridiem {
        (1..=12).contains(&hour)
    } else {
        hour <= 23
    }
}

/// Optional sign, digits with optional comma thousands groups, optional decimals.
fn is_number(s: &str) -> bool {
    let s = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (s, None),
    };
    if let Some(f) = frac {
        if f.is_empty() || !f.bytes().all(|b| b.is_ascii_digit()) {
            return false;
        }
    }
    if int.is_empty() {
        return false;
    }
    if int.contains(',') {
        let groups: Vec<&str> = int.split(',').collect();
        all_digits(groups[0], 1, 3) && groups[1..].iter().all(|g| all_digits(g, 3, 3))
    } else {
        int.bytes().all(|b| b.is_ascii_digit())
    }
}

/// Replaces dates with `<date>`, clock times with `<time>` and the remaining
/// standalone numbers with `<number>`, in that priority. Digits inside words
/// (`covid19`) are not numbers.
pub fn normalize_entities(text: &str) -> String {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let mut out: Vec<String> = Vec::with_capacity(tokens.len());
    let split = |t: &'_ str| -> (String, String, String) {
        let (l, c, r) = split_affixes(t, core_char);
        (l.to_string(), c.to_string(), r.to_string())
    };
    let mut i = 0;
    while i < tokens.len() {
        let (lead, core, trail) = split(tokens[i]);

        // "Month dd, yyyy"
        if i + 2 < tokens.len() && is_month(&core) {
            let (_, day, _) = split(tokens[i + 1]);
            let (_, year, year_trail) = split(tokens[i + 2]);
            let day_ok = parse_small(&day).is_some_and(|d| (1..=31).contains(&d) && day.len() <= 2);
            if day_ok && all_digits(&year, 4, 4) {
                out.push(alloc::format!("{lead}{DATE_TOKEN}{year_trail}"));
                i += 3;
                continue;
            }
        }
        if is_numeric_core_date(tokens[i]) {
            let (lead, _, trail) = split_affixes(tokens[i], |c| c.is_alphanumeric());
            out.push(alloc::format!("{lead}{DATE_TOKEN}{trail}"));
            i += 1;
            continue;
        }
        if let Some((lead, trail)) = clock_affixes(tokens[i]) {
            if i + 1 < tokens.len() {
                let (_, next, next_trail) = split_affixes(tokens[i + 1], |c| c.is_alphanumeric());
                if is_meridiem(next) && hourish(tokens[i]) {
                    let trail = next_trail.trim_start_matches('.');
                    out.push(alloc::format!("{lead}{TIME_TOKEN}{trail}"));
                    i += 2;
                    continue;
                }
            }
            out.push(alloc::format!("{lead}{TIME_TOKEN}{trail}"));
            i += 1;
            continue;
        }
        if is_number(&core) {
            out.push(alloc::format!("{lead}{NUMBER_TOKEN}{trail}"));
        } else {
            out.push(tokens[i].to_string());
        }
        i += 1;
    }
    join_tokens(out)
}

fn is_numeric_core_date(token: &str) -> bool {
    let (_, core, _) = split_affixes(token, |c| c.is_alphanumeric());
    is_numeric_date(core)
}

/// Lead and trail around a clock-time core, if the token holds one.
fn clock_affixes(token: &str) -> Option<(String, String)> {
    let (lead, core, trail) = split_affixes(token, |c| c.is_alphanumeric());
    // "10:30p.m." trims to core "10:30p.m"; that is still a clock time.
    is_clock(core).then(|| (lead.to_string(), trail.to_string()))
}

/// Whether a clock token can take a separate am/pm word (no suffix attached, 12-hour hour).
fn hourish(token: &str) -> bool {
    let (_, core, _) = split_affixes(token, |c| c.is_alphanumeric());
    let lower = core.to_lowercase();
    if lower.ends_with("am") || lower.ends_with("pm") || lower.ends_with("a.m") || lower.ends_with("p.m") {
        return false;
    }
    lower
        .split(':')
        .next()
        .and_then(parse_small)
        .is_some_and(|h| (1..=12).contains(&h))
}
