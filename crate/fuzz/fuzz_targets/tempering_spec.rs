#![no_main]

use ets_core::measures::tempering_to_rosinski;
use ets_core::TemperingSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = serde_json::from_slice::<TemperingSpec>(data) else {
        return;
    };
    let text = serde_json::to_string(&spec).unwrap();
    assert_eq!(serde_json::from_str::<TemperingSpec>(&text).unwrap(), spec);
    let _ = tempering_to_rosinski(&spec, 0.7, 1.0);
    let _ = tempering_to_rosinski(&spec, -1.0, 2.0);
});
