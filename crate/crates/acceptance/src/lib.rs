//! Acceptance criteria for `spdc` live in `tests/acceptance.rs`.
