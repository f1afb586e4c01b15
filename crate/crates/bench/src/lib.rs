//! Criterion benchmarks for `maxsketch`; see `benches/`.
