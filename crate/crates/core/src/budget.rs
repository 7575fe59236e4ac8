use serde::{Deserialize, Serialize};

/// Memory ceiling for the bulk tables (totient sieves, block sweeps).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub mem_bytes: u64,
}

impl Budget {
    pub const DEFAULT_MB: u64 = 1024;

    pub fn from_megabytes(mb: u64) -> Self {
        Self {
            mem_bytes: mb.saturating_mul(1 << 20),
        }
    }

    /// Largest `N` for which a totient sieve over `1..=N` fits.
    pub fn max_sieve_len(&self) -> u64 {
        // u32 per entry, plus slack for the forbidden-divisor mask
        (self.mem_bytes / 5).min(u32::MAX as u64)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Self::from_megabytes(Self::DEFAULT_MB)
    }
}
