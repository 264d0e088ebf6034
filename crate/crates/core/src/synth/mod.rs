//! Deterministic synthetic corpora in the ingest JSONL format.
//!
//! Each account is drawn from its class template with its own RNG stream, so
//! a record depends only on the seed and its line number. Corrupted lines are
//! full accounts with one required field removed.

mod template;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ingest::{Timestamp, Tweet, UserClass, UserProfile, UserRecord};
use crate::rng::DetRng;

pub use template::{ClassTemplate, Span, TemplateSet, TEMPLATE_FORMAT_VERSION};

/// Class sizes of the reference annotation, in class order.
pub const REFERENCE_COUNTS: [usize; UserClass::COUNT] = [19, 399, 157, 49, 51, 41];

/// Newest tweets are placed up to six hours before this instant (2015-06-01T00:00:00Z).
const COLLECTION_TIME: i64 = 1_433_116_800;

// Stream indices below this are reserved for corpus-level draws.
const LINE_STREAM_BASE: u64 = 16;
const LABEL_STREAM: u64 = 0;
const CORRUPT_POSITION_STREAM: u64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthError {
    #[error("total_users must be at least 1")]
    ZeroTotal,
    #[error("class_counts sum to {sum} but total_users is {total}")]
    CountMismatch { sum: usize, total: usize },
    #[error("invalid templates: {0}")]
    InvalidTemplate(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub total_users: usize,
    /// `None` scales the reference class mix to `total_users`.
    pub class_counts: Option<[usize; UserClass::COUNT]>,
    pub seed: u64,
    /// Extra invalid lines interleaved with the valid records.
    pub corruption_count: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            total_users: REFERENCE_COUNTS.iter().sum(),
            class_counts: None,
            seed: 42,
            corruption_count: 0,
        }
    }
}

impl SynthConfig {
    /// Per-class record counts, checked against `total_users`.
    pub fn resolved_counts(&self) -> Result<[usize; UserClass::COUNT], SynthError> {
        if self.total_users == 0 {
            return Err(SynthError::ZeroTotal);
        }
        match self.class_counts {
            Some(counts) => {
                let sum = counts.iter().sum();
                if sum != self.total_users {
                    return Err(SynthError::CountMismatch { sum, total: self.total_users });
                }
                Ok(counts)
            }
            None => Ok(scale_counts(&REFERENCE_COUNTS, self.total_users)),
        }
    }
}

/// Largest-remainder apportionment of `total` in proportion to `weights`;
/// equal remainders favor the lower class index.
pub fn scale_counts(weights: &[usize; UserClass::COUNT], total: usize) -> [usize; UserClass::COUNT] {
    let denom: usize = weights.iter().sum();
    assert!(denom > 0, "weights must not all be zero");
    let mut counts = [0; UserClass::COUNT];
    let mut remainders = [0; UserClass::COUNT];
    for i in 0..UserClass::COUNT {
        let scaled = total as u128 * weights[i] as u128;
        counts[i] = (scaled / denom as u128) as usize;
        remainders[i] = (scaled % denom as u128) as usize;
    }
    let mut order: Vec<usize> = (0..UserClass::COUNT).collect();
    order.sort_by(|&a, &b| remainders[b].cmp(&remainders[a]).then(a.cmp(&b)));
    let short = total - counts.iter().sum::<usize>();
    for &i in order.iter().take(short) {
        counts[i] += 1;
    }
    counts
}

/// Corpus with the built-in templates.
pub fn generate_corpus(config: &SynthConfig) -> Result<Vec<u8>, SynthError> {
    generate_corpus_with(config, &TemplateSet::default())
}

/// JSONL corpus: `total_users` valid labeled records plus `corruption_count`
/// invalid lines at seeded positions.
pub fn generate_corpus_with(config: &SynthConfig, templates: &TemplateSet) -> Result<Vec<u8>, SynthError> {
    let lines = generate_lines(config, templates)?;
    let mut out = Vec::new();
    for line in lines {
        let text = match line {
            Line::Valid(record) => serde_json::to_string(&record),
            Line::Corrupt(value) => serde_json::to_string(&value),
        }
        .expect("records serialize");
        out.extend_from_slice(text.as_bytes());
        out.push(b'\n');
    }
    Ok(out)
}

/// The valid records of [`generate_corpus_with`], in corpus order.
pub fn generate_records(config: &SynthConfig, templates: &TemplateSet) -> Result<Vec<UserRecord>, SynthError> {
    Ok(generate_lines(config, templates)?
        .into_iter()
        .filter_map(|line| match line {
            Line::Valid(record) => Some(record),
            Line::Corrupt(_) => None,
        })
        .collect())
}

enum Line {
    Valid(UserRecord),
    Corrupt(Value),
}

fn generate_lines(config: &SynthConfig, templates: &TemplateSet) -> Result<Vec<Line>, SynthError> {
    let counts = config.resolved_counts()?;
    templates.validate().map_err(SynthError::InvalidTemplate)?;

    let mut labels: Vec<UserClass> = UserClass::ALL
        .into_iter()
        .flat_map(|c| std::iter::repeat_n(c, counts[c.index()]))
        .collect();
    DetRng::stream(config.seed, LABEL_STREAM).shuffle(&mut labels);

    let total_lines = config.total_users + config.corruption_count;
    let mut corrupt = vec![false; total_lines];
    for i in DetRng::stream(config.seed, CORRUPT_POSITION_STREAM).choose_distinct(total_lines, config.corruption_count) {
        corrupt[i] = true;
    }

    let mut valid_labels = labels.into_iter();
    let mut lines = Vec::with_capacity(total_lines);
    for (line, is_corrupt) in corrupt.into_iter().enumerate() {
        let mut rng = DetRng::stream(config.seed, LINE_STREAM_BASE + line as u64);
        if is_corrupt {
            let class = UserClass::ALL[rng.index(UserClass::COUNT)];
            let record = generate_record(templates.get(class), class, line, &mut rng);
            lines.push(Line::Corrupt(corrupt_record(&record, &mut rng)));
        } else {
            let class = valid_labels.next().expect("one label per valid line");
            lines.push(Line::Valid(generate_record(templates.get(class), class, line, &mut rng)));
        }
    }
    Ok(lines)
}

const PROFILE_REQUIRED: [&str; 11] = [
    "user_id",
    "screen_name",
    "display_name",
    "description",
    "created_at",
    "verified",
    "followers_count",
    "friends_count",
    "listed_count",
    "favourites_count",
    "statuses_count",
];
const TWEET_REQUIRED: [&str; 5] = ["tweet_id", "created_at", "text", "is_retweet", "retweet_count"];

/// Serializes `record` and removes one required field, chosen uniformly from
/// `profile`, `tweets`, each required profile field and each required tweet
/// field (of a uniformly chosen tweet).
fn corrupt_record(record: &UserRecord, rng: &mut DetRng) -> Value {
    let mut value = serde_json::to_value(record).expect("records serialize");
    let choice = rng.index(2 + PROFILE_REQUIRED.len() + TWEET_REQUIRED.len());
    let object = value.as_object_mut().expect("record is an object");
    match choice {
        0 => {
            object.remove("profile");
        }
        1 => {
            object.remove("tweets");
        }
        c if c < 2 + PROFILE_REQUIRED.len() => {
            object["profile"].as_object_mut().expect("profile object").remove(PROFILE_REQUIRED[c - 2]);
        }
        c => {
            let field = TWEET_REQUIRED[c - 2 - PROFILE_REQUIRED.len()];
            let tweets = object["tweets"].as_array_mut().expect("tweet array");
            let i = rng.index(tweets.len());
            tweets[i].as_object_mut().expect("tweet object").remove(field);
        }
    }
    value
}

const SYLLABLES: [&str; 16] = [
    "ka", "lo", "mi", "ren", "to", "sa", "vel", "dor", "an", "qui", "po", "zel", "nu", "bri", "ta", "mor",
];
const WORDS: [&str; 24] = [
    "today", "new", "great", "read", "this", "more", "time", "people", "work", "love", "check", "out", "best",
    "free", "news", "update", "thanks", "good", "world", "now", "open", "deal", "live", "week",
];

fn pseudo_word(rng: &mut DetRng, syllables: usize) -> String {
    (0..syllables).map(|_| SYLLABLES[rng.index(SYLLABLES.len())]).collect()
}

fn handle(rng: &mut DetRng) -> String {
    let n = 2 + rng.index(3);
    format!("{}{}", pseudo_word(rng, n), rng.below(100))
}

/// Draw from a count span: log-uniform when `lo >= 1`, uniform otherwise.
fn count_in(rng: &mut DetRng, span: Span) -> u64 {
    let x = if span.lo() >= 1.0 {
        rng.log_uniform(span.lo(), span.hi())
    } else {
        rng.uniform(span.lo(), span.hi())
    };
    x.round() as u64
}

fn generate_record(t: &ClassTemplate, class: UserClass, line: usize, rng: &mut DetRng) -> UserRecord {
    let name_words = 1 + rng.index(2);
    let mut name_parts = Vec::with_capacity(name_words);
    for _ in 0..name_words {
        let syllables = 2 + rng.index(3);
        name_parts.push(pseudo_word(rng, syllables));
    }
    let display_name = name_parts
        .iter()
        .map(|w| {
            let mut chars = w.chars();
            let first = chars.next().expect("non-empty").to_ascii_uppercase();
            std::iter::once(first).chain(chars).collect::<String>()
        })
        .collect::<Vec<_>>()
        .join(" ");
    let screen_name = format!("{}{}", name_parts.concat(), rng.below(1000));

    let profile_url = if rng.bernoulli(t.website_probability) {
        let host = if rng.bernoulli(t.self_branded_probability) {
            name_parts.concat()
        } else {
            let n = 2 + rng.index(4);
            pseudo_word(rng, n)
        };
        Some(format!("https://www.{host}.com"))
    } else {
        None
    };
    let verified = rng.bernoulli(t.verified_probability);

    let n_tweets = rng.uniform(t.tweets_per_user.lo(), t.tweets_per_user.hi()).round() as usize;
    let rate = rng.log_uniform(t.tweet_rate_per_hour.lo(), t.tweet_rate_per_hour.hi());
    let p_reply = rng.uniform(t.reply_given_probability.lo(), t.reply_given_probability.hi());
    let p_received = rng.uniform(t.reply_received_probability.lo(), t.reply_received_probability.hi());
    let p_retweet = rng.uniform(t.retweet_probability.lo(), t.retweet_probability.hi());
    let retweet_mean = rng.uniform(t.retweets_received_mean.lo(), t.retweets_received_mean.hi());

    let newest = COLLECTION_TIME - rng.below(6 * 3600) as i64;
    let user_id = (1_000_000 + line).to_string();
    let mut offset_seconds = 0.0;
    let mut tweets = Vec::with_capacity(n_tweets);
    for i in 0..n_tweets {
        if i > 0 {
            offset_seconds += rng.exponential(3600.0 / rate);
        }
        let created_at = Timestamp::from_unix(newest - offset_seconds as i64).expect("in range");
        tweets.push(generate_tweet(t, &user_id, i, created_at, p_reply, p_received, p_retweet, retweet_mean, rng));
    }
    let oldest = tweets.last().expect("at least one tweet").created_at.unix();
    let age_days = rng.uniform(t.account_age_days.lo(), t.account_age_days.hi());
    let mut created = COLLECTION_TIME - (age_days * 86_400.0) as i64;
    if created > oldest {
        created = oldest - 3600 - rng.below(30 * 86_400) as i64;
    }

    let profile = UserProfile {
        user_id,
        screen_name,
        display_name,
        description: (0..3 + rng.index(8)).map(|_| WORDS[rng.index(WORDS.len())]).collect::<Vec<_>>().join(" "),
        profile_url,
        created_at: Timestamp::from_unix(created).expect("in range"),
        verified,
        followers_count: count_in(rng, t.followers_count),
        friends_count: count_in(rng, t.friends_count),
        listed_count: count_in(rng, t.listed_count),
        favourites_count: count_in(rng, t.favourites_count),
        statuses_count: count_in(rng, t.statuses_count).max(n_tweets as u64),
    };
    UserRecord { profile, tweets, label: Some(class) }
}

#[allow(clippy::too_many_arguments)]
fn generate_tweet(
    t: &ClassTemplate,
    user_id: &str,
    index: usize,
    created_at: Timestamp,
    p_reply: f64,
    p_received: f64,
    p_retweet: f64,
    retweet_mean: f64,
    rng: &mut DetRng,
) -> Tweet {
    let is_retweet = rng.bernoulli(p_retweet);
    let is_reply = !is_retweet && rng.bernoulli(p_reply);
    let extra_mentions = rng.poisson(t.mentions_per_tweet);
    let hashtags = rng.poisson(t.hashtags_per_tweet);
    let urls = rng.poisson(t.urls_per_tweet);

    let mut tokens = Vec::new();
    if is_retweet {
        tokens.push(format!("RT @{}:", handle(rng)));
    } else if is_reply {
        tokens.push(format!("@{}", handle(rng)));
    }
    for _ in 0..2 + rng.index(7) {
        tokens.push(WORDS[rng.index(WORDS.len())].to_owned());
    }
    for _ in 0..extra_mentions {
        tokens.push(format!("@{}", handle(rng)));
    }
    for _ in 0..hashtags {
        tokens.push(format!("#{}", WORDS[rng.index(WORDS.len())]));
    }
    for _ in 0..urls {
        tokens.push(format!("https://t.co/{}", pseudo_word(rng, 3)));
    }

    let replies = if rng.bernoulli(p_received) { 1 + rng.poisson(1.0) } else { 0 };
    Tweet {
        tweet_id: format!("{user_id}-{index}"),
        created_at,
        text: tokens.join(" "),
        is_retweet,
        retweet_count: rng.poisson(retweet_mean),
        reply_count: Some(replies),
        in_reply_to_user_id: is_reply.then(|| (2_000_000 + rng.below(1_000_000)).to_string()),
        hashtag_count: hashtags,
        url_count: urls,
        mention_count: extra_mentions + u64::from(is_retweet || is_reply),
    }
}

/// Corpus-level aggregates in the style of the reference profile and
/// behavior tables. Fractions are of accounts; totals are over all tweets.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CorpusStatistics {
    pub users: usize,
    pub tweets: u64,
    pub class_counts: [usize; UserClass::COUNT],
    pub unlabeled: usize,
    pub verified_fraction: f64,
    pub at_least_one_reply_fraction: f64,
    pub more_than_ten_replies_fraction: f64,
    /// Accounts whose hundred most recent tweets span at most one hour.
    pub hundred_in_one_hour_fraction: f64,
    pub mentions: u64,
    pub urls: u64,
    pub retweets: u64,
    pub hashtags: u64,
}

impl CorpusStatistics {
    /// `total / tweets`, or 0 for an empty corpus.
    pub fn per_tweet(&self, total: u64) -> f64 {
        if self.tweets == 0 {
            0.0
        } else {
            total as f64 / self.tweets as f64
        }
    }
}

pub fn corpus_statistics(records: &[UserRecord]) -> CorpusStatistics {
    let mut stats = CorpusStatistics { users: records.len(), ..Default::default() };
    let (mut verified, mut one_reply, mut ten_replies, mut burst) = (0usize, 0usize, 0usize, 0usize);
    for record in records {
        match record.label {
            Some(c) => stats.class_counts[c.index()] += 1,
            None => stats.unlabeled += 1,
        }
        verified += usize::from(record.profile.verified);
        let replies = record.tweets.iter().filter(|t| t.in_reply_to_user_id.is_some()).count();
        one_reply += usize::from(replies >= 1);
        ten_replies += usize::from(replies > 10);
        // Tweets are newest first.
        if record.tweets.len() >= 100 {
            let span = record.tweets[0].created_at.unix() - record.tweets[99].created_at.unix();
            burst += usize::from(span <= 3600);
        }
        stats.tweets += record.tweets.len() as u64;
        for t in &record.tweets {
            stats.mentions = stats.mentions.saturating_add(t.mention_count);
            stats.urls = stats.urls.saturating_add(t.url_count);
            stats.hashtags = stats.hashtags.saturating_add(t.hashtag_count);
            stats.retweets += u64::from(t.is_retweet);
        }
    }
    if !records.is_empty() {
        let n = records.len() as f64;
        stats.verified_fraction = verified as f64 / n;
        stats.at_least_one_reply_fraction = one_reply as f64 / n;
        stats.more_than_ten_replies_fraction = ten_replies as f64 / n;
        stats.hundred_in_one_hour_fraction = burst as f64 / n;
    }
    stats
}
