#![no_main]

use libfuzzer_sys::fuzz_target;
use usertype::ingest::{validate_record, write_records, parse_dataset_bytes};

fuzz_target!(|data: &[u8]| {
    let Ok(value) = serde_json::from_slice::<serde_json::Value>(data) else {
        return;
    };
    if let Ok(accepted) = validate_record(&value) {
        // Accepted records survive a write/parse cycle unchanged.
        let mut bytes = Vec::new();
        write_records(std::slice::from_ref(&accepted.record), &mut bytes).unwrap();
        let again = parse_dataset_bytes(&bytes);
        assert_eq!(again.records, [accepted.record]);
    }
});
