use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Timestamp;

/// The six behavioral classes. Declaration order is the canonical index
/// order used for tie-breaking everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum UserClass {
    Personal,
    Professional,
    Business,
    Spam,
    FeedNews,
    Viral,
}

impl UserClass {
    pub const COUNT: usize = 6;

    pub const ALL: [UserClass; Self::COUNT] = [
        UserClass::Personal,
        UserClass::Professional,
        UserClass::Business,
        UserClass::Spam,
        UserClass::FeedNews,
        UserClass::Viral,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            UserClass::Personal => "Personal",
            UserClass::Professional => "Professional",
            UserClass::Business => "Business",
            UserClass::Spam => "Spam",
            UserClass::FeedNews => "FeedNews",
            UserClass::Viral => "Viral",
        }
    }

    pub fn names() -> [&'static str; Self::COUNT] {
        Self::ALL.map(Self::name)
    }
}

impl fmt::Display for UserClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown user class {0:?}")]
pub struct UnknownClass(pub String);

impl FromStr for UserClass {
    type Err = UnknownClass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| UnknownClass(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserProfile {
    pub user_id: String,
    pub screen_name: String,
    pub display_name: String,
    pub description: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile_url: Option<String>,
    pub created_at: Timestamp,
    pub verified: bool,
    pub followers_count: u64,
    pub friends_count: u64,
    pub listed_count: u64,
    pub favourites_count: u64,
    pub statuses_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Tweet {
    pub tweet_id: String,
    pub created_at: Timestamp,
    pub text: String,
    pub is_retweet: bool,
    pub retweet_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reply_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub in_reply_to_user_id: Option<String>,
    pub hashtag_count: u64,
    pub url_count: u64,
    pub mention_count: u64,
}

impl Tweet {
    pub fn has_entities(&self) -> bool {
        self.hashtag_count > 0 || self.url_count > 0 || self.mention_count > 0
    }
}

/// One account: profile, its most recent tweets (newest first, at most
/// [`MAX_TWEETS`](super::MAX_TWEETS)) and an optional gold label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserRecord {
    pub profile: UserProfile,
    pub tweets: Vec<Tweet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<UserClass>,
}

impl UserRecord {
    /// Checks the record-level invariants; used by tests and fuzz targets.
    pub fn check_invariants(&self) -> Result<(), String> {
        let p = &self.profile;
        if p.user_id.is_empty() || p.screen_name.is_empty() {
            return Err("empty user_id or screen_name".into());
        }
        if self.tweets.is_empty() || self.tweets.len() > super::MAX_TWEETS {
            return Err(format!("{} tweets", self.tweets.len()));
        }
        if self.tweets.windows(2).any(|w| w[0].created_at < w[1].created_at) {
            return Err("tweets not newest-first".into());
        }
        if self.tweets.iter().any(|t| t.created_at < p.created_at) {
            return Err("tweet predates account".into());
        }
        if self.tweets.iter().any(|t| t.is_retweet && t.mention_count == 0) {
            return Err("retweet without mention".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_names_round_trip_and_order() {
        for (i, c) in UserClass::ALL.into_iter().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(UserClass::from_index(i), Some(c));
            assert_eq!(c.name().parse::<UserClass>().unwrap(), c);
        }
        assert_eq!(UserClass::from_index(6), None);
        assert!("feed/news".parse::<UserClass>().is_err());
        assert!(UserClass::Personal < UserClass::Spam);
    }
}
