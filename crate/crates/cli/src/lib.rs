//! Library half of the `gausscq` binary: configuration resolution, the
//! curve emitter, the property-verification suites, and the two worked
//! channel families as runnable reports. Split from `main.rs` so the
//! integration tests can drive the same code in-process.

pub mod config;
pub mod examples;
pub mod figures;
pub mod verify;
