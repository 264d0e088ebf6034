#![no_main]

use libfuzzer_sys::fuzz_target;
use usertype::forest::RandomForestModel;

fuzz_target!(|s: &str| {
    if let Ok(model) = RandomForestModel::from_json(s) {
        let text = model.to_json();
        assert_eq!(RandomForestModel::from_json(&text).unwrap(), model);
        let probe = usertype::FeatureVector([0.5; usertype::FEATURE_COUNT]);
        let p = model.predict_proba(&probe).unwrap();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
});
