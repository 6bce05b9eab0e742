#![no_main]

use ets_core::EtsSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(spec) = serde_json::from_slice::<EtsSpec>(data) {
        assert!(spec.validate().is_ok());
        let text = serde_json::to_string(&spec).unwrap();
        let again: EtsSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, again);
    }
});
