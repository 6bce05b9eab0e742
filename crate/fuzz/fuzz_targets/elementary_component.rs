#![no_main]

use ets_core::ElementaryComponent;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(comps) = serde_json::from_slice::<Vec<ElementaryComponent>>(data) {
        for c in &comps {
            let _ = c.validate();
        }
        let text = serde_json::to_string(&comps).unwrap();
        assert_eq!(serde_json::from_str::<Vec<ElementaryComponent>>(&text).unwrap(), comps);
    }
});
