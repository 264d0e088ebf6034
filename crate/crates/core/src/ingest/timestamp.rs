use std::fmt;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Classic archive layout, e.g. `Wed Aug 27 13:08:45 +0000 2008`.
const CLASSIC_FORMAT: &str = "%a %b %d %H:%M:%S %z %Y";

/// A UTC instant with one-second resolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(i64);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognized timestamp {0:?} (expected RFC 3339 or \"EEE MMM dd HH:mm:ss Z yyyy\")")]
pub struct TimestampError(pub String);

impl Timestamp {
    /// Seconds since the Unix epoch; `None` outside the representable calendar range.
    pub fn from_unix(seconds: i64) -> Option<Self> {
        DateTime::<Utc>::from_timestamp(seconds, 0).map(|_| Self(seconds))
    }

    pub fn unix(self) -> i64 {
        self.0
    }

    pub fn parse(text: &str) -> Result<Self, TimestampError> {
        let text = text.trim();
        let parsed = DateTime::parse_from_rfc3339(text)
            .or_else(|_| DateTime::parse_from_str(text, CLASSIC_FORMAT))
            .map_err(|_| TimestampError(text.to_owned()))?;
        Ok(Self(parsed.timestamp()))
    }

    /// Hours from `earlier` to `self` (negative when `self` is earlier).
    pub fn hours_since(self, earlier: Timestamp) -> f64 {
        (self.0 - earlier.0) as f64 / 3600.0
    }

    fn datetime(self) -> DateTime<Utc> {
        DateTime::<Utc>::from_timestamp(self.0, 0).expect("range checked on construction")
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.datetime().to_rfc3339_opts(SecondsFormat::Secs, true))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Timestamp::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_layouts_agree() {
        let a = Timestamp::parse("2008-08-27T13:08:45Z").unwrap();
        let b = Timestamp::parse("Wed Aug 27 13:08:45 +0000 2008").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.unix(), 1_219_842_525);
    }

    #[test]
    fn offsets_normalize_to_utc() {
        let a = Timestamp::parse("2014-03-01T12:00:00+05:00").unwrap();
        let b = Timestamp::parse("2014-03-01T07:00:00Z").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "2014-03-01T07:00:00Z");
    }

    #[test]
    fn fractional_seconds_truncate() {
        let a = Timestamp::parse("2014-03-01T07:00:00.75Z").unwrap();
        assert_eq!(a.to_string(), "2014-03-01T07:00:00Z");
    }

    #[test]
    fn garbage_rejected() {
        for bad in ["", "yesterday", "2014-13-01T00:00:00Z", "Wed Aug 32 13:08:45 +0000 2008"] {
            assert!(Timestamp::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn hours_between() {
        let a = Timestamp::parse("2014-01-01T00:00:00Z").unwrap();
        let b = Timestamp::parse("2014-01-02T06:00:00Z").unwrap();
        assert_eq!(b.hours_since(a), 30.0);
    }
}
