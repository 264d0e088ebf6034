#![no_main]

use libfuzzer_sys::fuzz_target;
use usertype::ingest::parse_dataset_bytes;

fuzz_target!(|data: &[u8]| {
    let outcome = parse_dataset_bytes(data);
    for record in &outcome.records {
        record.check_invariants().unwrap();
    }
    let lines = data.split(|&b| b == b'\n').filter(|l| !l.trim_ascii().is_empty()).count();
    assert_eq!(outcome.records.len() + outcome.rejects.len(), lines);
});
