use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ingest::{UserClass, MAX_TWEETS};

pub const TEMPLATE_FORMAT_VERSION: u64 = 1;

const BUILTIN: &str = include_str!("../../data/templates.json");

/// Closed interval `[lo, hi]`, written as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span(pub f64, pub f64);

impl Span {
    pub fn lo(self) -> f64 {
        self.0
    }

    pub fn hi(self) -> f64 {
        self.1
    }

    fn check(self, name: &str, min: f64, max: f64) -> Result<(), String> {
        if !(self.0.is_finite() && self.1.is_finite()) || self.0 > self.1 || self.0 < min || self.1 > max {
            return Err(format!("{name} must satisfy {min} <= lo <= hi <= {max}, got [{}, {}]", self.0, self.1));
        }
        Ok(())
    }
}

/// Per-class generation parameters. Spans are drawn once per account;
/// per-tweet quantities then follow from the drawn values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassTemplate {
    pub tweets_per_user: Span,
    /// Log-uniform.
    pub tweet_rate_per_hour: Span,
    pub reply_given_probability: Span,
    pub reply_received_probability: Span,
    pub retweet_probability: Span,
    /// Mean `retweet_count` per tweet.
    pub retweets_received_mean: Span,
    pub hashtags_per_tweet: f64,
    pub urls_per_tweet: f64,
    /// Mentions beyond the one implied by a retweet or reply.
    pub mentions_per_tweet: f64,
    /// Count spans are log-uniform when `lo >= 1`, uniform otherwise.
    pub followers_count: Span,
    pub friends_count: Span,
    pub listed_count: Span,
    pub favourites_count: Span,
    pub statuses_count: Span,
    pub verified_probability: f64,
    pub website_probability: f64,
    /// Chance that a website is named after the account.
    pub self_branded_probability: f64,
    pub account_age_days: Span,
}

impl ClassTemplate {
    pub fn validate(&self) -> Result<(), String> {
        let unbounded = f64::MAX;
        self.tweets_per_user.check("tweets_per_user", 1.0, MAX_TWEETS as f64)?;
        self.tweet_rate_per_hour.check("tweet_rate_per_hour", f64::MIN_POSITIVE, unbounded)?;
        for (name, span) in [
            ("reply_given_probability", self.reply_given_probability),
            ("reply_received_probability", self.reply_received_probability),
            ("retweet_probability", self.retweet_probability),
        ] {
            span.check(name, 0.0, 1.0)?;
        }
        for (name, span) in [
            ("retweets_received_mean", self.retweets_received_mean),
            ("followers_count", self.followers_count),
            ("friends_count", self.friends_count),
            ("listed_count", self.listed_count),
            ("favourites_count", self.favourites_count),
            ("statuses_count", self.statuses_count),
            ("account_age_days", self.account_age_days),
        ] {
            span.check(name, 0.0, 1e12)?;
        }
        for (name, rate) in [
            ("hashtags_per_tweet", self.hashtags_per_tweet),
            ("urls_per_tweet", self.urls_per_tweet),
            ("mentions_per_tweet", self.mentions_per_tweet),
        ] {
            if !(0.0..=20.0).contains(&rate) {
                return Err(format!("{name} must be in [0, 20], got {rate}"));
            }
        }
        for (name, p) in [
            ("verified_probability", self.verified_probability),
            ("website_probability", self.website_probability),
            ("self_branded_probability", self.self_branded_probability),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(format!("{name} must be in [0, 1], got {p}"));
            }
        }
        Ok(())
    }
}

/// One template per class, indexed by [`UserClass::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct TemplateSet {
    pub classes: [ClassTemplate; UserClass::COUNT],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TemplateFile {
    format_version: u64,
    classes: BTreeMap<String, ClassTemplate>,
}

impl TemplateSet {
    /// Parses and validates a template file:
    /// `{"format_version": 1, "classes": {"Personal": {…}, …}}`.
    pub fn from_json(text: &str) -> Result<Self, String> {
        let file: TemplateFile = serde_json::from_str(text).map_err(|e| e.to_string())?;
        if file.format_version != TEMPLATE_FORMAT_VERSION {
            return Err(format!("unsupported template format_version {}", file.format_version));
        }
        let mut classes = file.classes;
        if let Some(unknown) = classes.keys().find(|k| k.parse::<UserClass>().is_err()) {
            return Err(format!("unknown class {unknown:?}"));
        }
        let mut missing = Vec::new();
        let mut ordered = Vec::with_capacity(UserClass::COUNT);
        for class in UserClass::ALL {
            match classes.remove(class.name()) {
                Some(t) => ordered.push(t),
                None => missing.push(class.name()),
            }
        }
        if !missing.is_empty() {
            return Err(format!("missing templates for {}", missing.join(", ")));
        }
        let set = TemplateSet {
            classes: ordered.try_into().expect("six templates"),
        };
        set.validate()?;
        Ok(set)
    }

    pub fn to_json(&self) -> String {
        let file = TemplateFile {
            format_version: TEMPLATE_FORMAT_VERSION,
            classes: UserClass::ALL
                .into_iter()
                .map(|c| (c.name().to_owned(), self.classes[c.index()].clone()))
                .collect(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("templates serialize");
        text.push('\n');
        text
    }

    pub fn validate(&self) -> Result<(), String> {
        for class in UserClass::ALL {
            self.classes[class.index()]
                .validate()
                .map_err(|e| format!("{class}: {e}"))?;
        }
        let feed = &self.classes[UserClass::FeedNews.index()];
        if feed.reply_given_probability != Span(0.0, 0.0) {
            return Err("FeedNews: reply_given_probability must be [0, 0]".into());
        }
        Ok(())
    }

    pub fn get(&self, class: UserClass) -> &ClassTemplate {
        &self.classes[class.index()]
    }
}

impl Default for TemplateSet {
    /// The checked-in calibrated templates.
    fn default() -> Self {
        TemplateSet::from_json(BUILTIN).expect("built-in templates are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_round_trips() {
        let set = TemplateSet::default();
        assert_eq!(TemplateSet::from_json(&set.to_json()).unwrap(), set);
    }

    #[test]
    fn feed_news_must_not_reply() {
        let text = TemplateSet::default().to_json();
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value["classes"]["FeedNews"]["reply_given_probability"] = serde_json::json!([0.0, 0.1]);
        let err = TemplateSet::from_json(&value.to_string()).unwrap_err();
        assert!(err.contains("FeedNews"), "{err}");
    }

    #[test]
    fn malformed_files() {
        let good: serde_json::Value = serde_json::from_str(&TemplateSet::default().to_json()).unwrap();
        let mut v = good.clone();
        v["format_version"] = 2.into();
        assert!(TemplateSet::from_json(&v.to_string()).is_err());
        let mut v = good.clone();
        v["classes"].as_object_mut().unwrap().remove("Viral");
        assert!(TemplateSet::from_json(&v.to_string()).unwrap_err().contains("Viral"));
        let mut v = good.clone();
        v["classes"]["Niche"] = v["classes"]["Spam"].clone();
        assert!(TemplateSet::from_json(&v.to_string()).is_err());
        let mut v = good.clone();
        v["classes"]["Spam"]["retweet_probability"] = serde_json::json!([0.5, 1.5]);
        assert!(TemplateSet::from_json(&v.to_string()).is_err());
        let mut v = good;
        v["classes"]["Spam"]["followers_count"] = serde_json::json!([10.0, 1.0]);
        assert!(TemplateSet::from_json(&v.to_string()).is_err());
        assert!(TemplateSet::from_json("{}").is_err());
    }
}
