//! Prints corpus statistics and cross-validated AUC for the built-in templates.

use usertype::metrics::cross_validate;
use usertype::synth::{corpus_statistics, generate_records, SynthConfig, TemplateSet};
use usertype::TrainConfig;

fn main() {
    let seed = std::env::args().nth(1).map_or(42, |s| s.parse().expect("seed"));
    let config = SynthConfig { seed, ..Default::default() };
    let records = generate_records(&config, &TemplateSet::default()).expect("valid config");
    let stats = corpus_statistics(&records);
    println!("users {} tweets {}", stats.users, stats.tweets);
    println!("verified {:.3}", stats.verified_fraction);
    println!(">=1 reply {:.3}", stats.at_least_one_reply_fraction);
    println!(">10 replies {:.3}", stats.more_than_ten_replies_fraction);
    println!("100 in 1h {:.3}", stats.hundred_in_one_hour_fraction);
    println!("mentions/tweet {:.3}", stats.per_tweet(stats.mentions));
    println!("urls/tweet {:.3}", stats.per_tweet(stats.urls));
    println!("retweets/tweet {:.3}", stats.per_tweet(stats.retweets));
    println!("hashtags/tweet {:.3}", stats.per_tweet(stats.hashtags));
    let start = std::time::Instant::now();
    let report = cross_validate(&records, &TrainConfig::default(), 10, seed).expect("evaluates");
    for m in &report.per_class {
        println!("{:<13} P {:.3} R {:.3} F {:.3} AUC {:?}", m.class.name(), m.precision, m.recall, m.f_measure, m.auc);
    }
    println!("macro AUC {:?} in {:?}", report.macro_auc(), start.elapsed());
}
