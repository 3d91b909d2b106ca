//! Criterion benchmarks for `w1lab-core`; see `benches/`.
