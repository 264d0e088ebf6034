//! Line-delimited JSON corpus reader.
//!
//! Each non-empty line holds one account object:
//!
//! ```json
//! {"profile": {"user_id": "…", "screen_name": "…", "display_name": "…",
//!              "description": "…", "profile_url": "…", "created_at": "…",
//!              "verified": false, "followers_count": 0, "friends_count": 0,
//!              "listed_count": 0, "favourites_count": 0, "statuses_count": 0},
//!  "tweets": [{"tweet_id": "…", "created_at": "…", "text": "…",
//!              "is_retweet": false, "retweet_count": 0, "reply_count": 0,
//!              "in_reply_to_user_id": "…", "hashtag_count": 0,
//!              "url_count": 0, "mention_count": 0}, …],
//!  "label": "Business"}
//! ```
//!
//! `profile_url`, `reply_count`, `in_reply_to_user_id` and `label` are
//! optional. Entity counts may be omitted, in which case they are recovered
//! from the tweet text with [`scan_entities`]. Lines that fail validation are
//! reported as [`Reject`]s and never abort the parse.

mod entities;
mod timestamp;
mod types;

use std::io::{self, Read, Write};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

pub use entities::{scan_entities, EntityCounts};
pub use timestamp::{Timestamp, TimestampError};
pub use types::{Tweet, UnknownClass, UserClass, UserProfile, UserRecord};

/// Tweets kept per account: the most recent hundred.
pub const MAX_TWEETS: usize = 100;

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("failed reading input: {0}")]
    Io(#[from] io::Error),
}

/// One reason a candidate object was rejected. `field` values are JSON paths
/// such as `profile.created_at` or `tweets[3].url_count`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    InvalidUtf8,
    InvalidJson(String),
    NotAnObject,
    MissingField(String),
    TypeMismatch { field: String, expected: &'static str },
    InvalidValue { field: String, reason: String },
    EmptyTweetList,
}

impl Issue {
    /// Stable machine-readable reason code.
    pub fn code(&self) -> &'static str {
        match self {
            Issue::InvalidUtf8 => "invalid_utf8",
            Issue::InvalidJson(_) => "invalid_json",
            Issue::NotAnObject => "not_an_object",
            Issue::MissingField(_) => "missing_field",
            Issue::TypeMismatch { .. } => "type_mismatch",
            Issue::InvalidValue { .. } => "invalid_value",
            Issue::EmptyTweetList => "empty_tweet_list",
        }
    }
}

impl std::fmt::Display for Issue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Issue::InvalidUtf8 => f.write_str("line is not valid UTF-8"),
            Issue::InvalidJson(e) => write!(f, "invalid JSON: {e}"),
            Issue::NotAnObject => f.write_str("record must be a JSON object"),
            Issue::MissingField(name) => write!(f, "missing field {name}"),
            Issue::TypeMismatch { field, expected } => write!(f, "{field} must be {expected}"),
            Issue::InvalidValue { field, reason } => write!(f, "{field}: {reason}"),
            Issue::EmptyTweetList => f.write_str("record has no tweets"),
        }
    }
}

/// Every problem found in one candidate (validation does not stop at the first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationFailure {
    pub issues: Vec<Issue>,
}

impl ValidationFailure {
    fn single(issue: Issue) -> Self {
        Self { issues: vec![issue] }
    }

    /// Reason code of the first issue.
    pub fn code(&self) -> &'static str {
        self.issues.first().map_or("invalid_value", Issue::code)
    }

    pub fn detail(&self) -> String {
        self.issues
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl std::fmt::Display for ValidationFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.detail())
    }
}

impl std::error::Error for ValidationFailure {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ValidationWarning {
    /// More than [`MAX_TWEETS`] tweets were supplied; the oldest were dropped.
    TooManyTweets { found: usize },
}

impl std::fmt::Display for ValidationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ValidationWarning::TooManyTweets { found } => {
                write!(f, "{found} tweets supplied, kept the {MAX_TWEETS} most recent")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Accepted {
    pub record: UserRecord,
    pub warnings: Vec<ValidationWarning>,
}

/// A rejected input line, serialized as one line of the reject report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Reject {
    pub line: usize,
    pub reason: &'static str,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineWarning {
    pub line: usize,
    pub warning: ValidationWarning,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParseOutcome {
    pub records: Vec<UserRecord>,
    pub rejects: Vec<Reject>,
    pub warnings: Vec<LineWarning>,
}

/// Reads the whole stream and parses it with [`parse_dataset_bytes`].
pub fn parse_dataset<R: Read>(mut source: R) -> Result<ParseOutcome, IngestError> {
    let mut bytes = Vec::new();
    source.read_to_end(&mut bytes)?;
    Ok(parse_dataset_bytes(&bytes))
}

/// Parses a JSONL corpus. Line numbers are 1-based and count blank lines;
/// output order follows input order regardless of worker count.
pub fn parse_dataset_bytes(bytes: &[u8]) -> ParseOutcome {
    let lines: Vec<(usize, &[u8])> = bytes
        .split(|&b| b == b'\n')
        .enumerate()
        .map(|(i, line)| (i + 1, line))
        .filter(|(_, line)| !line.trim_ascii().is_empty())
        .collect();

    let results: Vec<(usize, Result<Accepted, ValidationFailure>)> = lines
        .par_iter()
        .map(|&(number, line)| (number, parse_line(line)))
        .collect();

    let mut outcome = ParseOutcome::default();
    for (line, result) in results {
        match result {
            Ok(accepted) => {
                for warning in accepted.warnings {
                    log::warn!("line {line}: {warning}");
                    outcome.warnings.push(LineWarning { line, warning });
                }
                outcome.records.push(accepted.record);
            }
            Err(failure) => outcome.rejects.push(Reject {
                line,
                reason: failure.code(),
                detail: failure.detail(),
            }),
        }
    }
    outcome
}

/// Validates a single JSONL line.
pub fn parse_line(line: &[u8]) -> Result<Accepted, ValidationFailure> {
    let text = std::str::from_utf8(line).map_err(|_| ValidationFailure::single(Issue::InvalidUtf8))?;
    let value: Value = serde_json::from_str(text.trim())
        .map_err(|e| ValidationFailure::single(Issue::InvalidJson(e.to_string())))?;
    validate_record(&value)
}

/// Turns a parsed JSON object into a [`UserRecord`], collecting every
/// missing or ill-typed field. Tweets are re-sorted newest first and
/// truncated to the [`MAX_TWEETS`] most recent.
pub fn validate_record(candidate: &Value) -> Result<Accepted, ValidationFailure> {
    let object = candidate
        .as_object()
        .ok_or_else(|| ValidationFailure::single(Issue::NotAnObject))?;
    let mut issues = Vec::new();

    let profile = match object.get("profile") {
        None | Some(Value::Null) => {
            issues.push(Issue::MissingField("profile".into()));
            None
        }
        Some(Value::Object(map)) => read_profile(map, &mut issues),
        Some(_) => {
            issues.push(Issue::TypeMismatch { field: "profile".into(), expected: "an object" });
            None
        }
    };

    let mut tweets = match object.get("tweets") {
        None | Some(Value::Null) => {
            issues.push(Issue::MissingField("tweets".into()));
            None
        }
        Some(Value::Array(items)) => {
            if items.is_empty() {
                issues.push(Issue::EmptyTweetList);
            }
            let parsed: Vec<Option<Tweet>> = items
                .iter()
                .enumerate()
                .map(|(i, item)| read_tweet(i, item, &mut issues))
                .collect();
            parsed.into_iter().collect::<Option<Vec<Tweet>>>()
        }
        Some(_) => {
            issues.push(Issue::TypeMismatch { field: "tweets".into(), expected: "an array" });
            None
        }
    };

    let label = match object.get("label") {
        None | Some(Value::Null) => None,
        Some(Value::String(name)) => match name.parse::<UserClass>() {
            Ok(class) => Some(class),
            Err(e) => {
                issues.push(Issue::InvalidValue { field: "label".into(), reason: e.to_string() });
                None
            }
        },
        Some(_) => {
            issues.push(Issue::TypeMismatch { field: "label".into(), expected: "a class name" });
            None
        }
    };

    if let (Some(profile), Some(tweets)) = (&profile, &tweets) {
        for (i, tweet) in tweets.iter().enumerate() {
            if tweet.created_at < profile.created_at {
                issues.push(Issue::InvalidValue {
                    field: format!("tweets[{i}].created_at"),
                    reason: "earlier than profile.created_at".into(),
                });
            }
        }
    }

    if !issues.is_empty() {
        return Err(ValidationFailure { issues });
    }
    let (Some(profile), Some(tweets)) = (profile, tweets.as_mut()) else {
        unreachable!("absent parts always record an issue");
    };

    let mut warnings = Vec::new();
    // Stable sort: equal timestamps keep input order.
    tweets.sort_by_key(|t| std::cmp::Reverse(t.created_at));
    if tweets.len() > MAX_TWEETS {
        warnings.push(ValidationWarning::TooManyTweets { found: tweets.len() });
        tweets.truncate(MAX_TWEETS);
    }

    Ok(Accepted {
        record: UserRecord { profile, tweets: std::mem::take(tweets), label },
        warnings,
    })
}

/// Writes records in the canonical JSONL form accepted by [`parse_dataset`].
pub fn write_records<W: Write>(records: &[UserRecord], mut out: W) -> io::Result<()> {
    for record in records {
        serde_json::to_writer(&mut out, record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes the reject report: one `{"line", "reason", "detail"}` object per line.
pub fn write_rejects<W: Write>(rejects: &[Reject], mut out: W) -> io::Result<()> {
    for reject in rejects {
        serde_json::to_writer(&mut out, reject)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

struct Fields<'a> {
    map: &'a Map<String, Value>,
    prefix: String,
    issues: &'a mut Vec<Issue>,
}

impl Fields<'_> {
    fn path(&self, name: &str) -> String {
        format!("{}.{name}", self.prefix)
    }

    fn get(&mut self, name: &str, required: bool) -> Option<&Value> {
        match self.map.get(name) {
            None | Some(Value::Null) => {
                if required {
                    let path = self.path(name);
                    self.issues.push(Issue::MissingField(path));
                }
                None
            }
            Some(v) => Some(v),
        }
    }

    fn mismatch(&mut self, name: &str, expected: &'static str) {
        let field = self.path(name);
        self.issues.push(Issue::TypeMismatch { field, expected });
    }

    fn string(&mut self, name: &str, required: bool) -> Option<String> {
        match self.get(name, required)? {
            Value::String(s) => Some(s.clone()),
            _ => {
                self.mismatch(name, "a string");
                None
            }
        }
    }

    fn non_empty_string(&mut self, name: &str) -> Option<String> {
        let s = self.string(name, true)?;
        if s.is_empty() {
            let field = self.path(name);
            self.issues.push(Issue::InvalidValue { field, reason: "must not be empty".into() });
            return None;
        }
        Some(s)
    }

    fn count(&mut self, name: &str, required: bool) -> Option<u64> {
        let value = self.get(name, required)?;
        match value.as_u64() {
            Some(n) => Some(n),
            None => {
                self.mismatch(name, "a non-negative integer");
                None
            }
        }
    }

    fn boolean(&mut self, name: &str) -> Option<bool> {
        match self.get(name, true)? {
            Value::Bool(b) => Some(*b),
            _ => {
                self.mismatch(name, "a boolean");
                None
            }
        }
    }

    fn timestamp(&mut self, name: &str) -> Option<Timestamp> {
        let text = self.string(name, true)?;
        match Timestamp::parse(&text) {
            Ok(t) => Some(t),
            Err(e) => {
                let field = self.path(name);
                self.issues.push(Issue::InvalidValue { field, reason: e.to_string() });
                None
            }
        }
    }
}

fn read_profile(map: &Map<String, Value>, issues: &mut Vec<Issue>) -> Option<UserProfile> {
    let mut f = Fields { map, prefix: "profile".into(), issues };
    let user_id = f.non_empty_string("user_id");
    let screen_name = f.non_empty_string("screen_name");
    let display_name = f.string("display_name", true);
    let description = f.string("description", true);
    let profile_url = f.string("profile_url", false);
    let created_at = f.timestamp("created_at");
    let verified = f.boolean("verified");
    let followers_count = f.count("followers_count", true);
    let friends_count = f.count("friends_count", true);
    let listed_count = f.count("listed_count", true);
    let favourites_count = f.count("favourites_count", true);
    let statuses_count = f.count("statuses_count", true);

    Some(UserProfile {
        user_id: user_id?,
        screen_name: screen_name?,
        display_name: display_name?,
        description: description?,
        profile_url: profile_url.filter(|u| !u.trim().is_empty()),
        created_at: created_at?,
        verified: verified?,
        followers_count: followers_count?,
        friends_count: friends_count?,
        listed_count: listed_count?,
        favourites_count: favourites_count?,
        statuses_count: statuses_count?,
    })
}

fn read_tweet(index: usize, value: &Value, issues: &mut Vec<Issue>) -> Option<Tweet> {
    let prefix = format!("tweets[{index}]");
    let Some(map) = value.as_object() else {
        issues.push(Issue::TypeMismatch { field: prefix, expected: "an object" });
        return None;
    };
    let mut f = Fields { map, prefix, issues };
    let tweet_id = f.string("tweet_id", true);
    let created_at = f.timestamp("created_at");
    let text = f.string("text", true);
    let is_retweet = f.boolean("is_retweet");
    let retweet_count = f.count("retweet_count", true);
    let reply_count = f.count("reply_count", false);
    let in_reply_to_user_id = f.string("in_reply_to_user_id", false);
    let hashtag_count = f.count("hashtag_count", false);
    let url_count = f.count("url_count", false);
    let mention_count = f.count("mention_count", false);

    let text = text?;
    let scanned = if hashtag_count.is_none() || url_count.is_none() || mention_count.is_none() {
        scan_entities(&text)
    } else {
        EntityCounts::default()
    };
    let tweet = Tweet {
        tweet_id: tweet_id?,
        created_at: created_at?,
        is_retweet: is_retweet?,
        retweet_count: retweet_count?,
        reply_count,
        in_reply_to_user_id,
        hashtag_count: hashtag_count.unwrap_or(scanned.hashtags),
        url_count: url_count.unwrap_or(scanned.urls),
        mention_count: mention_count.unwrap_or(scanned.mentions),
        text,
    };
    if tweet.is_retweet && tweet.mention_count == 0 {
        let field = f.path("mention_count");
        f.issues.push(Issue::InvalidValue {
            field,
            reason: "a retweet must mention the retweeted author".into(),
        });
        return None;
    }
    Some(tweet)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn tweet_json(id: usize, at: &str) -> Value {
        json!({
            "tweet_id": format!("t{id}"), "created_at": at, "text": "hello",
            "is_retweet": false, "retweet_count": 0,
            "hashtag_count": 0, "url_count": 0, "mention_count": 0
        })
    }

    fn record_json(tweets: Vec<Value>) -> Value {
        json!({
            "profile": {
                "user_id": "42", "screen_name": "acme", "display_name": "Acme",
                "description": "", "profile_url": "http://www.acme.com",
                "created_at": "2012-01-01T00:00:00Z", "verified": false,
                "followers_count": 10, "friends_count": 5, "listed_count": 2,
                "favourites_count": 3, "statuses_count": 200
            },
            "tweets": tweets,
            "label": "Business"
        })
    }

    #[test]
    fn accepts_minimal_record() {
        let v = record_json(vec![tweet_json(0, "2014-01-01T00:00:00Z")]);
        let accepted = validate_record(&v).unwrap();
        assert!(accepted.warnings.is_empty());
        let r = accepted.record;
        assert_eq!(r.label, Some(UserClass::Business));
        assert_eq!(r.profile.profile_url.as_deref(), Some("http://www.acme.com"));
        r.check_invariants().unwrap();
    }

    #[test]
    fn missing_created_at() {
        let mut v = record_json(vec![tweet_json(0, "2014-01-01T00:00:00Z")]);
        v["profile"].as_object_mut().unwrap().remove("created_at");
        let failure = validate_record(&v).unwrap_err();
        assert_eq!(failure.issues, vec![Issue::MissingField("profile.created_at".into())]);
        assert_eq!(failure.code(), "missing_field");
    }

    #[test]
    fn zero_tweets() {
        let failure = validate_record(&record_json(vec![])).unwrap_err();
        assert_eq!(failure.issues, vec![Issue::EmptyTweetList]);
    }

    #[test]
    fn names_every_problem() {
        let mut v = record_json(vec![tweet_json(0, "2014-01-01T00:00:00Z")]);
        let p = v["profile"].as_object_mut().unwrap();
        p.remove("user_id");
        p.insert("followers_count".into(), json!(-3));
        p.insert("verified".into(), json!("yes"));
        v["tweets"][0].as_object_mut().unwrap().remove("text");
        let failure = validate_record(&v).unwrap_err();
        let codes: Vec<_> = failure.issues.iter().map(Issue::code).collect();
        assert_eq!(codes, ["missing_field", "type_mismatch", "type_mismatch", "missing_field"]);
        assert!(failure.detail().contains("tweets[0].text"));
    }

    #[test]
    fn out_of_order_tweets_are_resorted() {
        let v = record_json(vec![
            tweet_json(0, "2014-01-01T00:00:00Z"),
            tweet_json(1, "2014-03-01T00:00:00Z"),
            tweet_json(2, "2014-02-01T00:00:00Z"),
        ]);
        let r = validate_record(&v).unwrap().record;
        let ids: Vec<_> = r.tweets.iter().map(|t| t.tweet_id.as_str()).collect();
        assert_eq!(ids, ["t1", "t2", "t0"]);
    }

    #[test]
    fn keeps_hundred_most_recent() {
        // 120 tweets one hour apart, shuffled by a fixed stride.
        let base = Timestamp::parse("2014-01-01T00:00:00Z").unwrap().unix();
        let order: Vec<usize> = (0..120).map(|i| (i * 37) % 120).collect();
        let tweets = order
            .iter()
            .map(|&i| {
                let at = Timestamp::from_unix(base + 3600 * i as i64).unwrap().to_string();
                tweet_json(i, &at)
            })
            .collect();
        let accepted = validate_record(&record_json(tweets)).unwrap();
        assert_eq!(accepted.warnings, vec![ValidationWarning::TooManyTweets { found: 120 }]);
        let mut kept: Vec<usize> = accepted
            .record
            .tweets
            .iter()
            .map(|t| t.tweet_id[1..].parse().unwrap())
            .collect();
        kept.sort_unstable();
        assert_eq!(kept, (20..120).collect::<Vec<_>>());
        accepted.record.check_invariants().unwrap();
    }

    #[test]
    fn tweet_before_account_is_invalid() {
        let v = record_json(vec![tweet_json(0, "2011-06-01T00:00:00Z")]);
        let failure = validate_record(&v).unwrap_err();
        assert_eq!(failure.code(), "invalid_value");
    }

    #[test]
    fn retweet_needs_mention() {
        let mut t = tweet_json(0, "2014-01-01T00:00:00Z");
        t["is_retweet"] = json!(true);
        assert_eq!(validate_record(&record_json(vec![t.clone()])).unwrap_err().code(), "invalid_value");
        t["mention_count"] = json!(1);
        assert!(validate_record(&record_json(vec![t])).is_ok());
    }

    #[test]
    fn entity_counts_fall_back_to_text() {
        let mut t = tweet_json(0, "2014-01-01T00:00:00Z");
        let o = t.as_object_mut().unwrap();
        o.remove("hashtag_count");
        o.remove("url_count");
        o.remove("mention_count");
        o.insert("text".into(), json!("RT @bob: #a #b http://x.y"));
        o.insert("is_retweet".into(), json!(true));
        let r = validate_record(&record_json(vec![t])).unwrap().record;
        let tw = &r.tweets[0];
        assert_eq!((tw.hashtag_count, tw.url_count, tw.mention_count), (2, 1, 1));
    }

    #[test]
    fn unknown_label_rejected() {
        let mut v = record_json(vec![tweet_json(0, "2014-01-01T00:00:00Z")]);
        v["label"] = json!("Niche");
        assert_eq!(validate_record(&v).unwrap_err().code(), "invalid_value");
        v["label"] = Value::Null;
        assert_eq!(validate_record(&v).unwrap().record.label, None);
    }

    #[test]
    fn empty_input() {
        let out = parse_dataset_bytes(b"");
        assert!(out.records.is_empty() && out.rejects.is_empty());
        let out = parse_dataset_bytes(b"\n  \n\r\n");
        assert!(out.records.is_empty() && out.rejects.is_empty());
    }

    #[test]
    fn rejects_carry_line_numbers() {
        let good = serde_json::to_string(&record_json(vec![tweet_json(0, "2014-01-01T00:00:00Z")])).unwrap();
        let input = format!("{good}\n\n{{not json\n[1,2]\n{good}\n\u{0}\n");
        let mut bytes = input.into_bytes();
        bytes.extend_from_slice(b"\xff\xfe\n");
        let out = parse_dataset_bytes(&bytes);
        assert_eq!(out.records.len(), 2);
        let got: Vec<_> = out.rejects.iter().map(|r| (r.line, r.reason)).collect();
        assert_eq!(
            got,
            [(3, "invalid_json"), (4, "not_an_object"), (6, "invalid_json"), (7, "invalid_utf8")]
        );
    }

    #[test]
    fn reject_report_shape() {
        let mut buf = Vec::new();
        let rejects = [Reject { line: 3, reason: "missing_field", detail: "missing field profile.user_id".into() }];
        write_rejects(&rejects, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"line\":3,\"reason\":\"missing_field\",\"detail\":\"missing field profile.user_id\"}\n"
        );
    }
}
