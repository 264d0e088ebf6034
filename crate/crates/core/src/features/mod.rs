//! The 17 account features and dataset-level normalization.
//!
//! | index | name | definition |
//! |---|---|---|
//! | 0 | favorites_count | `profile.favourites_count` |
//! | 1 | verified | 1.0 if verified |
//! | 2 | plain_statuses | non-retweets with no hashtag, URL or mention |
//! | 3 | replies_received | tweets with `reply_count > 0` |
//! | 4 | replies_given | tweets with `in_reply_to_user_id` |
//! | 5 | retweets | tweets with `is_retweet` |
//! | 6 | mentions | sum of `mention_count` |
//! | 7 | total_urls | sum of `url_count` |
//! | 8 | total_hashtags | sum of `hashtag_count` |
//! | 9 | promotion_score | see [`promotion_score`] |
//! | 10 | life_time_hours | newest tweet minus account creation, hours |
//! | 11 | tweet_spread | retweets received / life time |
//! | 12 | std_urls | population std of per-tweet URLs |
//! | 13 | std_hashtags | population std of per-tweet hashtags |
//! | 14 | collective_activeness | (statuses + friends + listed) per activeness period |
//! | 15 | degree_of_inclination | harmonic mean of non-retweets and retweets |
//! | 16 | collective_influence | followers + listed + favourites |
//!
//! All time denominators are floored at one second ([`MIN_HOURS`]).

mod normalize;
mod stats;
mod text;

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ingest::{UserClass, UserRecord};

pub use normalize::{apply_normalization, fit_normalization, FeatureRange, NormalizationParams};
pub use stats::{harmonic_mean, population_std};
pub use text::{canonical_host, canonical_name, levenshtein, promotion_score};

pub const FEATURE_COUNT: usize = 17;

/// One second, in hours.
pub const MIN_HOURS: f64 = 1.0 / 3600.0;

pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "favorites_count",
    "verified",
    "plain_statuses",
    "replies_received",
    "replies_given",
    "retweets",
    "mentions",
    "total_urls",
    "total_hashtags",
    "promotion_score",
    "life_time_hours",
    "tweet_spread",
    "std_urls",
    "std_hashtags",
    "collective_activeness",
    "degree_of_inclination",
    "collective_influence",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn get(&self, index: usize) -> f64 {
        self.0[index]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Which profile name the website is compared against for the promotion score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PromotionName {
    #[default]
    DisplayName,
    ScreenName,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub promotion_name: PromotionName,
    /// Period for collective activeness, in hours (one week by default).
    pub activeness_period_hours: f64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            promotion_name: PromotionName::DisplayName,
            activeness_period_hours: 168.0,
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.activeness_period_hours.is_finite() && self.activeness_period_hours > 0.0) {
            return Err(format!(
                "activeness_period_hours must be positive and finite, got {}",
                self.activeness_period_hours
            ));
        }
        Ok(())
    }
}

pub fn extract_features(record: &UserRecord) -> FeatureVector {
    extract_features_with(record, &FeatureConfig::default())
}

/// Feature vector of a validated record (at least one tweet, newest first).
pub fn extract_features_with(record: &UserRecord, config: &FeatureConfig) -> FeatureVector {
    let profile = &record.profile;
    let tweets = &record.tweets;
    assert!(!tweets.is_empty(), "feature extraction needs at least one tweet");

    let n = tweets.len() as f64;
    let retweets = tweets.iter().filter(|t| t.is_retweet).count() as f64;
    let plain = tweets
        .iter()
        .filter(|t| !t.is_retweet && !t.has_entities())
        .count() as f64;
    let replies_received = tweets
        .iter()
        .filter(|t| t.reply_count.is_some_and(|c| c > 0))
        .count() as f64;
    let replies_given = tweets
        .iter()
        .filter(|t| t.in_reply_to_user_id.is_some())
        .count() as f64;
    // Counts are summed in f64: archive values are untrusted and may be near u64::MAX.
    let mentions: f64 = tweets.iter().map(|t| t.mention_count as f64).sum();
    let urls: Vec<u64> = tweets.iter().map(|t| t.url_count).collect();
    let hashtags: Vec<u64> = tweets.iter().map(|t| t.hashtag_count).collect();
    let retweets_received: f64 = tweets.iter().map(|t| t.retweet_count as f64).sum();

    let name = match config.promotion_name {
        PromotionName::DisplayName => &profile.display_name,
        PromotionName::ScreenName => &profile.screen_name,
    };
    let newest = tweets.iter().map(|t| t.created_at).max().expect("non-empty");
    let life_time = newest.hours_since(profile.created_at);
    let activity =
        profile.statuses_count as f64 + profile.friends_count as f64 + profile.listed_count as f64;

    FeatureVector([
        profile.favourites_count as f64,
        if profile.verified { 1.0 } else { 0.0 },
        plain,
        replies_received,
        replies_given,
        retweets,
        mentions,
        urls.iter().map(|&u| u as f64).sum(),
        hashtags.iter().map(|&h| h as f64).sum(),
        promotion_score(profile.profile_url.as_deref(), name),
        life_time,
        retweets_received / life_time.max(MIN_HOURS),
        population_std(&urls),
        population_std(&hashtags),
        activity / (life_time / config.activeness_period_hours).max(MIN_HOURS),
        harmonic_mean(n - retweets, retweets),
        profile.followers_count as f64 + profile.listed_count as f64 + profile.favourites_count as f64,
    ])
}

/// Extracts every record in parallel; output order matches input order.
pub fn extract_all(records: &[UserRecord], config: &FeatureConfig) -> Vec<FeatureVector> {
    records
        .par_iter()
        .map(|r| extract_features_with(r, config))
        .collect()
}

/// Formats with 9 significant digits, shortest decimal form.
pub fn format_significant(value: f64) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    let rounded: f64 = format!("{value:.8e}").parse().expect("valid float literal");
    format!("{rounded}")
}

/// Writes the feature table: `user_id,label,f0..f16`, one row per record,
/// raw values. Unlabeled records get an empty label cell.
pub fn write_feature_csv<W: Write>(
    rows: impl IntoIterator<Item = (String, Option<UserClass>, FeatureVector)>,
    out: W,
) -> io::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["user_id".to_owned(), "label".to_owned()];
    header.extend((0..FEATURE_COUNT).map(|i| format!("f{i}")));
    writer.write_record(&header)?;
    for (user_id, label, v) in rows {
        let mut row = vec![user_id, label.map(|c| c.name().to_owned()).unwrap_or_default()];
        row.extend(v.0.iter().map(|&x| format_significant(x)));
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Timestamp, Tweet, UserProfile};

    fn profile() -> UserProfile {
        UserProfile {
            user_id: "1".into(),
            screen_name: "bob".into(),
            display_name: "Bob".into(),
            description: String::new(),
            profile_url: None,
            created_at: Timestamp::parse("2013-01-01T00:00:00Z").unwrap(),
            verified: false,
            followers_count: 10,
            friends_count: 4,
            listed_count: 2,
            favourites_count: 3,
            statuses_count: 500,
        }
    }

    fn tweet(i: i64) -> Tweet {
        Tweet {
            tweet_id: i.to_string(),
            created_at: Timestamp::from_unix(1_400_000_000 - 60 * i).unwrap(),
            text: "plain".into(),
            is_retweet: false,
            retweet_count: 0,
            reply_count: None,
            in_reply_to_user_id: None,
            hashtag_count: 0,
            url_count: 0,
            mention_count: 0,
        }
    }

    fn record(tweets: Vec<Tweet>) -> UserRecord {
        UserRecord { profile: profile(), tweets, label: None }
    }

    #[test]
    fn all_plain_record() {
        let v = extract_features(&record((0..100).map(tweet).collect()));
        assert_eq!(v.get(2), 100.0);
        assert_eq!(v.get(5), 0.0);
        assert_eq!(v.get(6), 0.0);
        assert_eq!(v.get(7), 0.0);
        assert_eq!(v.get(12), 0.0);
        assert_eq!(v.get(15), 0.0);
        assert_eq!(v.get(16), 15.0);
    }

    #[test]
    fn balanced_inclination() {
        let tweets = (0..80)
            .map(|i| {
                let mut t = tweet(i);
                if i % 2 == 0 {
                    t.is_retweet = true;
                    t.mention_count = 1;
                }
                t
            })
            .collect();
        let v = extract_features(&record(tweets));
        assert_eq!(v.get(5), 40.0);
        assert_eq!(v.get(15), 40.0);
    }

    #[test]
    fn screen_name_switch() {
        let mut r = record(vec![tweet(0)]);
        r.profile.display_name = "Robert Smith".into();
        r.profile.profile_url = Some("https://bob".into());
        assert_eq!(extract_features(&r).get(9), 9.0);
        let cfg = FeatureConfig { promotion_name: PromotionName::ScreenName, ..Default::default() };
        assert_eq!(extract_features_with(&r, &cfg).get(9), 0.0);
    }

    #[test]
    fn same_second_account_uses_floor() {
        let mut r = record(vec![tweet(0)]);
        r.profile.created_at = r.tweets[0].created_at;
        r.tweets[0].retweet_count = 2;
        let v = extract_features(&r);
        assert_eq!(v.get(10), 0.0);
        assert_eq!(v.get(11), 2.0 * 3600.0);
        assert_eq!(v.get(14), 506.0 * 3600.0);
        assert!(v.is_finite());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(format_significant(0.0), "0");
        assert_eq!(format_significant(15.0), "15");
        assert_eq!(format_significant(1234.56789012), "1234.56789");
        assert_eq!(format_significant(1.0 / 3.0), "0.333333333");
        assert_eq!(format_significant(2.0f64.sqrt() * 1e-7), "0.000000141421356");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        let v = FeatureVector([0.5; FEATURE_COUNT]);
        write_feature_csv(
            vec![("u,1".into(), Some(UserClass::Spam), v), ("u2".into(), None, v)],
            &mut buf,
        )
        .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("user_id,label,f0,f1,"));
        assert!(lines[0].ends_with(",f16"));
        assert!(lines[1].starts_with("\"u,1\",Spam,0.5,"));
        assert!(lines[2].starts_with("u2,,0.5"));
    }
}
