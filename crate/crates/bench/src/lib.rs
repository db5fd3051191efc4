//! Benchmark fixtures shared by the criterion benches.

pub use hexctx_core;

use hexctx_core::targets::{resolve_target, SearchSettings, ResolvedTarget};

/// Resolve a named target with default settings, panicking on failure.
pub fn target(name: &str) -> ResolvedTarget {
    resolve_target(name, SearchSettings::default()).unwrap_or_else(|e| panic!("{name}: {e}"))
}
