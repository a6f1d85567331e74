//! Prompt templates for the yes/no questions sent to the language model.
//!
//! Templates live in `assets/` and use `{name}` placeholders. Rendering is a
//! single left-to-right pass, so substituted text is never re-expanded.

use serde::{Deserialize, Serialize};

const STS_TEMPLATE: &str = include_str!("../assets/sts_prompt.txt");
const SCC_TEMPLATE: &str = include_str!("../assets/scc_prompt.txt");

pub const DEFAULT_MAX_CONTEXT_ITEMS: usize = 30;
pub const DEFAULT_MAX_DESC_CHARS: usize = 1000;

/// Size limits applied when listing labels and descriptions in a prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PromptLimits {
    pub max_context_items: usize,
    pub max_desc_chars: usize,
}

impl Default for PromptLimits {
    fn default() -> Self {
        Self {
            max_context_items: DEFAULT_MAX_CONTEXT_ITEMS,
            max_desc_chars: DEFAULT_MAX_DESC_CHARS,
        }
    }
}

pub fn sts_template() -> &'static str {
    strip_final_newline(STS_TEMPLATE)
}

pub fn scc_template() -> &'static str {
    strip_final_newline(SCC_TEMPLATE)
}

fn strip_final_newline(s: &str) -> &str {
    s.strip_suffix('\n').unwrap_or(s)
}

/// Substitutes `{name}` placeholders. Unknown placeholders are kept verbatim.
pub(crate) fn render(template: &str, vars: &[(&str, &str)]) -> String {
    let mut out = String::with_capacity(template.len() + vars.iter().map(|(_, v)| v.len()).sum::<usize>());
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let replaced = after.find('}').and_then(|close| {
            let name = &after[..close];
            vars.iter().find(|(k, _)| *k == name).map(|(_, v)| (*v, close))
        });
        match replaced {
            Some((value, close)) => {
                out.push_str(value);
                rest = &after[close + 1..];
            }
            None => {
                out.push('{');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// First `max_chars` characters of `text`.
pub fn truncate_chars(text: &str, max_chars: usize) -> &str {
    match text.char_indices().nth(max_chars) {
        Some((byte, _)) => &text[..byte],
        None => text,
    }
}

/// `"  - {item}"` lines for the first `max_items` items.
pub(crate) fn bullet_block<'a>(items: impl Iterator<Item = &'a str>, max_items: usize) -> String {
    items
        .take(max_items)
        .map(|item| format!("  - {item}"))
        .collect::<Vec<_>>()
        .join("\n")
}
