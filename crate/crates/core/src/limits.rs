// SPDX-License-Identifier: Apache-2.0

//! Resource caps shared by every enumeration in the crate.

/// Environment variable that overrides [`Limits::word_cap`].
pub const CAP_ENV: &str = "WENTRO_CAP";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of words (or tree nodes) an enumeration may visit.
    pub word_cap: u64,
    /// Maximum number of states produced by subset construction.
    pub state_cap: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            word_cap: 1 << 24,
            state_cap: 1_000_000,
        }
    }
}

impl Limits {
    /// Defaults, with the word cap taken from `WENTRO_CAP` when it parses.
    pub fn from_env() -> Self {
        let mut limits = Limits::default();
        if let Ok(raw) = std::env::var(CAP_ENV) {
            match raw.trim().parse::<u64>() {
                Ok(cap) if cap > 0 => limits.word_cap = cap,
                _ => log::warn!("ignoring unparsable {CAP_ENV}={raw:?}"),
            }
        }
        limits
    }

    pub fn with_word_cap(mut self, cap: u64) -> Self {
        self.word_cap = cap;
        self
    }
}
