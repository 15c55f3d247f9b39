//! Criterion benchmarks for the core calculators; see `benches/main.rs`.
