//! Holds the `acceptance` test target: end-to-end checks of simulated error
//! rates, closed-form curves, code properties and determinism. Run with
//! `cargo test -p ncask-validation --test acceptance`.
