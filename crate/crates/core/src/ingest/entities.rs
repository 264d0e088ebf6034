//! Fallback entity counting for tweets whose archive lacks pre-extracted
//! hashtag/URL/mention counts.

use std::sync::LazyLock;

use regex::Regex;

static URL: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"https?://\S+").unwrap());
static HASHTAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"#\w+").unwrap());
static MENTION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"@\w+").unwrap());

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EntityCounts {
    pub hashtags: u64,
    pub urls: u64,
    pub mentions: u64,
}

/// Counts `https?://\S+`, then `#\w+` and `@\w+` in the text with URLs removed
/// (so fragments and userinfo inside links are not double counted).
pub fn scan_entities(text: &str) -> EntityCounts {
    let urls = URL.find_iter(text).count() as u64;
    let rest = URL.replace_all(text, " ");
    EntityCounts {
        hashtags: HASHTAG.find_iter(&rest).count() as u64,
        urls,
        mentions: MENTION.find_iter(&rest).count() as u64,
    }
}
