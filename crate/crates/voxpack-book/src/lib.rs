//! Placeholder; book chapters are wired in here as doc-tests.
