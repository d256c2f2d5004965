//! Benchmark fixtures for `dqd-core`.
