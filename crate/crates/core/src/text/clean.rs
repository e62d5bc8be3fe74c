use alloc::string::String;

use super::join_tokens;

fn kept(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '<' || c == '>'
}

/// Keeps `[A-Za-z0-9<>]` and whitespace, then collapses whitespace runs to
/// single spaces and trims. Angle brackets survive so entity tokens such as
/// `<number>` stay intact.
pub fn strip_nonalnum(text: &str) -> String {
    let filtered: String = text
        .chars()
        .filter_map(|c| {
            if kept(c) {
                Some(c)
            } else if c.is_whitespace() {
                Some(' ')
            } else {
                None
            }
        })
        .collect();
    join_tokens(filtered.split(' '))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn strips_symbols_and_glyphs() {
        assert_eq!(strip_nonalnum("Wow!!! 🤡 ok…"), "Wow ok");
        assert_eq!(strip_nonalnum("<number> votes!"), "<number> votes");
        assert_eq!(strip_nonalnum("  a\u{a0}\u{a0}b\n"), "a b");
        assert_eq!(strip_nonalnum("café"), "caf");
        assert_eq!(strip_nonalnum(""), "");
    }

    proptest! {
        #[test]
        fn idempotent(s in "\\PC{0,64}") {
            let once = strip_nonalnum(&s);
            prop_assert_eq!(strip_nonalnum(&once), once.clone());
            prop_assert!(once.split_whitespace().count() <= s.split_whitespace().count());
        }
    }
}
