//! Holds the `acceptance` test target, which prints one PASS/FAIL line per
//! benchmark criterion. Run it with `cargo test -p thermovi-validation`.
