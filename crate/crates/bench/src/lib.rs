//! Criterion benchmarks for the simulator engines; see `benches/engines.rs`.
