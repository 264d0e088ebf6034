use proptest::prelude::*;
use usertype::ingest::{
    parse_dataset, parse_dataset_bytes, write_records, Timestamp, Tweet, UserClass, UserProfile, UserRecord,
};

fn arb_tweet(created: i64, index: usize) -> impl Strategy<Value = Tweet> {
    (
        0i64..5_000_000,
        "\\PC{0,30}",
        any::<bool>(),
        0u64..10_000,
        proptest::option::of(0u64..50),
        proptest::option::of("[0-9]{1,6}"),
        (0u64..20, 0u64..20, 0u64..20),
    )
        .prop_map(move |(offset, text, is_retweet, retweets, replies, reply_to, (h, u, m))| Tweet {
            tweet_id: format!("t{index}"),
            created_at: Timestamp::from_unix(created + offset).unwrap(),
            text,
            is_retweet,
            retweet_count: retweets,
            reply_count: replies,
            in_reply_to_user_id: reply_to,
            hashtag_count: h,
            url_count: u,
            mention_count: if is_retweet { m.max(1) } else { m },
        })
}

fn arb_record() -> impl Strategy<Value = UserRecord> {
    (0i64..2_000_000_000, 1usize..8).prop_flat_map(|(created, n)| {
        let tweets: Vec<_> = (0..n).map(|i| arb_tweet(created, i)).collect();
        (
            "[a-z0-9]{1,10}",
            "[A-Za-z_]{1,15}",
            "\\PC{0,20}",
            "\\PC{0,40}",
            proptest::option::of("https?://[a-z]{1,10}\\.(com|org)(/[a-z]{0,5})?"),
            any::<bool>(),
            (any::<u64>(), any::<u64>(), any::<u64>(), any::<u64>(), any::<u64>()),
            tweets,
            proptest::option::of(0usize..UserClass::COUNT),
        )
            .prop_map(move |(id, screen, display, description, url, verified, counts, mut tweets, label)| {
                // Canonical order: newest first; equal timestamps keep their order.
                tweets.sort_by_key(|t| std::cmp::Reverse(t.created_at));
                UserRecord {
                    profile: UserProfile {
                        user_id: id,
                        screen_name: screen,
                        display_name: display,
                        description,
                        profile_url: url,
                        created_at: Timestamp::from_unix(created).unwrap(),
                        verified,
                        followers_count: counts.0,
                        friends_count: counts.1,
                        listed_count: counts.2,
                        favourites_count: counts.3,
                        statuses_count: counts.4,
                    },
                    tweets,
                    label: label.map(|i| UserClass::ALL[i]),
                }
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn write_then_parse_is_identity(records in proptest::collection::vec(arb_record(), 0..6)) {
        let mut bytes = Vec::new();
        write_records(&records, &mut bytes).unwrap();
        let outcome = parse_dataset(bytes.as_slice()).unwrap();
        prop_assert!(outcome.rejects.is_empty(), "{:?}", outcome.rejects);
        prop_assert_eq!(&outcome.records, &records);
        for r in &outcome.records {
            prop_assert!(r.check_invariants().is_ok());
        }
    }

    #[test]
    fn every_line_is_accounted_for(lines in proptest::collection::vec(prop_oneof![
        "\\PC{0,40}",
        Just("{}".to_owned()),
        Just("[1,2]".to_owned()),
        Just("   ".to_owned()),
        Just(r#"{"profile":{},"tweets":[]}"#.to_owned()),
    ], 0..20)) {
        let text = lines.join("\n");
        let outcome = parse_dataset_bytes(text.as_bytes());
        let non_blank = lines.iter().filter(|l| !l.trim().is_empty()).count();
        prop_assert_eq!(outcome.records.len() + outcome.rejects.len(), non_blank);
        let mut previous = 0;
        for reject in &outcome.rejects {
            prop_assert!(reject.line > previous);
            previous = reject.line;
        }
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..400)) {
        let outcome = parse_dataset_bytes(&bytes);
        for r in &outcome.records {
            prop_assert!(r.check_invariants().is_ok());
        }
    }
}

#[test]
fn tweet_order_and_truncation() {
    let mut record = serde_json::json!({
        "profile": {"user_id": "1", "screen_name": "s", "display_name": "", "description": "",
                    "created_at": "2015-01-01T00:00:00Z", "verified": false, "followers_count": 0,
                    "friends_count": 0, "listed_count": 0, "favourites_count": 0, "statuses_count": 0},
        "tweets": []
    });
    let tweets: Vec<_> = (0..130)
        .map(|i| {
            serde_json::json!({"tweet_id": i.to_string(), "created_at": format!("2015-02-01T00:{:02}:{:02}Z", i / 60, i % 60),
                               "text": "x", "is_retweet": false, "retweet_count": 0})
        })
        .collect();
    record["tweets"] = tweets.into();
    let outcome = parse_dataset_bytes(record.to_string().as_bytes());
    assert_eq!(outcome.warnings.len(), 1);
    let kept = &outcome.records[0].tweets;
    assert_eq!(kept.len(), 100);
    assert_eq!(kept[0].tweet_id, "129");
    assert_eq!(kept[99].tweet_id, "30");
}
