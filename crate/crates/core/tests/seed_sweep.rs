//! Different seeds change the draws but not the outcome of any criterion.

use pachner_core::acceptance::{run_all, AcceptanceConfig};

#[test]
fn twenty_seeds_pass_every_criterion() {
    for seed in 1..=20 {
        let cfg = AcceptanceConfig { seed, tolerance: None };
        for r in run_all(&cfg) {
            assert!(r.passed, "seed {seed}: {r}");
        }
    }
}

#[test]
fn too_tight_tolerance_fails() {
    let cfg = AcceptanceConfig {
        seed: 0,
        tolerance: Some(1e-15),
    };
    assert!(run_all(&cfg).iter().any(|r| !r.passed));
}
