#![no_main]

use ets_core::CfGrid;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(grid) = serde_json::from_slice::<CfGrid>(data) {
        assert!(!grid.is_empty());
        assert!(grid.points().iter().all(|z| z.len() == grid.dimension()));
        let text = serde_json::to_string(&grid).unwrap();
        assert_eq!(serde_json::from_str::<CfGrid>(&text).unwrap(), grid);
    }
});
