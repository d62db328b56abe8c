//! JSON interchange (to be filled).
