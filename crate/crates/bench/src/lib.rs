//! Criterion benchmarks for bound inversion, exact coefficients, decoders
//! and design construction. Run with `cargo bench -p gtlab-bench`.
