//! Stable per-run seed derivation: FNV-1a over tagged fields, then a SplitMix64 finalizer.
//!
//! Each run's seed depends only on its own labels, so adding or removing configurations
//! never shifts the seeds of other runs.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Clone, Copy, Debug)]
pub struct SeedHasher {
    state: u64,
}

impl SeedHasher {
    pub fn new(base: u64) -> Self {
        SeedHasher { state: FNV_OFFSET }.u64(base)
    }

    fn bytes(mut self, bytes: &[u8]) -> Self {
        for &b in bytes {
            self.state ^= b as u64;
            self.state = self.state.wrapping_mul(FNV_PRIME);
        }
        self
    }

    pub fn u64(self, v: u64) -> Self {
        self.bytes(b"u").bytes(&v.to_le_bytes())
    }

    pub fn str(self, s: &str) -> Self {
        self.bytes(b"s")
            .bytes(&(s.len() as u64).to_le_bytes())
            .bytes(s.as_bytes())
    }

    pub fn finish(self) -> u64 {
        let mut z = self.state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
}

/// Seed for one sweep run.
pub fn run_seed(base: u64, map_id: &str, config_index: usize, repetition: usize) -> u64 {
    SeedHasher::new(base)
        .str("run")
        .str(map_id)
        .u64(config_index as u64)
        .u64(repetition as u64)
        .finish()
}
