//! Acceptance checks live in `tests/acceptance.rs`; run with `cargo test -p hardcore-rsa-validation -- --nocapture`.
