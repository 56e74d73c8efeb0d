//! Home of the acceptance suite (`tests/acceptance.rs`). It lives in its own
//! package so that its known failures don't stop the rest of a workspace
//! test run.
//!
//! ```text
//! cargo test -p mhd-validation --test acceptance -- 3 9
//! ```
