#![no_main]

use libfuzzer_sys::fuzz_target;
use usertype::features::{extract_features, NormalizationParams};
use usertype::ingest::parse_dataset_bytes;

fuzz_target!(|data: &[u8]| {
    let records = parse_dataset_bytes(data).records;
    let vectors: Vec<_> = records.iter().map(extract_features).collect();
    for v in &vectors {
        assert!(v.is_finite(), "{v:?}");
    }
    if let Some(params) = NormalizationParams::fit(&vectors) {
        for v in &vectors {
            assert!(params.apply(v).0.iter().all(|x| (0.0..=1.0).contains(x)));
        }
    }
});
