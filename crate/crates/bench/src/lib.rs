//! Criterion benchmarks for the ssllab solvers; see `benches/`.
