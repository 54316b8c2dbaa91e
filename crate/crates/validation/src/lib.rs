//! Home of the `acceptance` test target, which re-derives each acceptance
//! criterion from the experiment series and prints one verdict per line.
//!
//! It lives in its own package so that `cargo test --workspace` runs it
//! after every other test binary: a failing criterion then cannot keep the
//! remaining suites from running.
//!
//! Run it alone with `cargo test -p parahyp-validation --test acceptance`.
