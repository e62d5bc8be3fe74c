use alloc::string::String;

/// Collapses every run of three or more identical letters to one letter.
/// Doubles are left alone ("book keeper").
pub fn collapse_elongations(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        let mut run = 1;
        while chars.peek() == Some(&c) {
            chars.next();
            run += 1;
        }
        let keep = if c.is_alphabetic() && run >= 3 { 1 } else { run };
        for _ in 0..keep {
            out.push(c);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn published_examples() {
        assert_eq!(collapse_elongations("Nooooo"), "No");
        assert_eq!(collapse_elongations("suuuppperrr"), "super");
        assert_eq!(collapse_elongations("book keeper"), "book keeper");
        assert_eq!(collapse_elongations("!!!! 1000"), "!!!! 1000");
        assert_eq!(collapse_elongations("NOOOoo"), "NOoo");
    }

    proptest! {
        #[test]
        fn never_grows(s in "\\PC{0,64}") {
            prop_assert!(collapse_elongations(&s).len() <= s.len());
        }
    }
}
