//! Criterion benchmarks for `heaviest-urn`; see `benches/urn.rs`.
