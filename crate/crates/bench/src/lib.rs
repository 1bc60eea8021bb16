//! Benchmarks for qgeom-core; see `benches/qgeom.rs`.
