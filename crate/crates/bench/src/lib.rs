//! Criterion benchmarks for deq-core live under benches/.
