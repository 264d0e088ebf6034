#![no_main]

use libfuzzer_sys::fuzz_target;
use usertype::synth::{generate_corpus_with, SynthConfig, TemplateSet};

fuzz_target!(|s: &str| {
    if let Ok(templates) = TemplateSet::from_json(s) {
        let config = SynthConfig { total_users: 6, class_counts: Some([1; 6]), ..SynthConfig::default() };
        let corpus = generate_corpus_with(&config, &templates).unwrap();
        let outcome = usertype::ingest::parse_dataset_bytes(&corpus);
        assert_eq!(outcome.records.len(), 6);
    }
});
