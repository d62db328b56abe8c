//! Simulating automaton (to be filled).
