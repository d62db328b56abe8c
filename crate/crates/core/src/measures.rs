//! Comparison measures (to be filled).
