//! Shared helpers for the workspace benchmarks live in the bench files
//! themselves; this crate exists to host the criterion targets.
