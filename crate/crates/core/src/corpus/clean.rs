use std::sync::OnceLock;

use regex::Regex;

struct Rules {
    piped_link: Regex,
    bare_link: Regex,
    actor_note: Regex,
    html_tag: Regex,
    spaces: Regex,
}

fn rules() -> &'static Rules {
    static RULES: OnceLock<Rules> = OnceLock::new();
    RULES.get_or_init(|| Rules {
        piped_link: Regex::new(r"\[\[[^\[\]|]*\|([^\[\]]*)\]\]").unwrap(),
        bare_link: Regex::new(r"\[\[([^\[\]|]*)\]\]").unwrap(),
        // "Name (Actor Name)": a capitalized word followed by a parenthetical
        // made only of capitalized words.
        actor_note: Regex::new(
            r"(\p{Lu}[\p{L}'.-]*)\s*\(\s*\p{Lu}[\p{L}'.-]*(?:\s+\p{Lu}[\p{L}'.-]*)*\s*\)",
        )
        .unwrap(),
        html_tag: Regex::new(r"</?[A-Za-z][^<>]*>").unwrap(),
        spaces: Regex::new(r"\s+").unwrap(),
    })
}

fn clean_once(raw: &str) -> String {
    let r = rules();
    let s = r.piped_link.replace_all(raw, "$1");
    let s = r.bare_link.replace_all(&s, "$1");
    let s = r.html_tag.replace_all(&s, " ");
    let s = r.actor_note.replace_all(&s, "$1");
    let s = r.spaces.replace_all(&s, " ");
    s.trim().to_string()
}

/// Strips residual wiki markup from plot text: `[[target|label]]` becomes
/// `label`, `[[x]]` becomes `x`, actor parentheticals after a character
/// name are dropped, HTML tags are removed and whitespace is collapsed.
///
/// Rules are applied until the text stops changing, so the result is a
/// fixed point.
pub fn clean_text(raw: &str) -> String {
    let mut current = clean_once(raw);
    loop {
        let next = clean_once(&current);
        if next == current {
            return current;
        }
        current = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn actor_annotation_removed() {
        assert_eq!(clean_text("John ([[Actor Name]]) runs."), "John runs.");
    }

    #[test]
    fn plain_text_unchanged() {
        assert_eq!(clean_text("plain text"), "plain text");
    }

    #[test]
    fn piped_link_keeps_label() {
        assert_eq!(clean_text("[[Gotham City|Gotham]] burns"), "Gotham burns");
    }

    #[test]
    fn html_and_whitespace() {
        assert_eq!(
            clean_text("  The <i>ship</i>\n sinks.<br/> "),
            "The ship sinks."
        );
    }

    #[test]
    fn lowercase_parenthetical_kept() {
        assert_eq!(
            clean_text("Anna (who is tired) sleeps."),
            "Anna (who is tired) sleeps."
        );
    }

    #[test]
    fn stacked_annotations_fully_removed() {
        assert_eq!(clean_text("Rick (Bogart) (Humphrey) smiles."), "Rick smiles.");
    }

    proptest! {
        #[test]
        fn idempotent(s in r"[A-Za-z \[\]|()<>/.]{0,40}") {
            let once = clean_text(&s);
            prop_assert_eq!(clean_text(&once), once);
        }
    }
}
