#![no_main]

use ets_core::measures::{check_psd, matrix_from_rows, matrix_to_rows};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(rows) = serde_json::from_slice::<Vec<Vec<f64>>>(data) else {
        return;
    };
    if let Ok(m) = matrix_from_rows(&rows) {
        assert_eq!(matrix_to_rows(&m), rows);
        let _ = check_psd(&m);
    }
});
