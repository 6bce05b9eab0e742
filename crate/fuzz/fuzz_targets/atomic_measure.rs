#![no_main]

use ets_core::measures::{extended_to_rosinski, rosinski_to_extended};
use ets_core::AtomicMeasure;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(m) = serde_json::from_slice::<AtomicMeasure>(data) else {
        return;
    };
    let text = serde_json::to_string(&m).unwrap();
    let again: AtomicMeasure = serde_json::from_str(&text).unwrap();
    assert_eq!(m, again);
    let _ = m.canonicalize();
    // transforms must fail cleanly, never panic
    if let Ok((r, stable)) = extended_to_rosinski(&m, 0.5) {
        let _ = rosinski_to_extended(&r, &stable, 0.5);
    }
});
