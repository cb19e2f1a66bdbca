//! Runs the ten acceptance criteria at their default thresholds and prints
//! one line per criterion.

use pachner_core::acceptance::{run_all, AcceptanceConfig};

#[test]
fn acceptance() {
    let results = run_all(&AcceptanceConfig::default());
    for r in &results {
        println!("{r}");
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
