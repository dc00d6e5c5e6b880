//! Numerical acceptance suite; see `tests/acceptance.rs`.
