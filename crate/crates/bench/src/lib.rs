//! Benchmarks for the cluster crates live in `benches/`.
