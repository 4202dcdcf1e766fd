//! Test-only helpers shared across modules.

use rand::RngCore;

/// Replays scripted 64-bit words, then a constant midpoint word. The
/// midpoint makes every `random_bool(p)` with `p <= 0.5` false.
pub(crate) struct ScriptedRng {
    pub words: std::collections::VecDeque<u64>,
}

impl ScriptedRng {
    pub fn midpoint() -> Self {
        Self { words: Default::default() }
    }
    pub fn with(words: &[u64]) -> Self {
        Self { words: words.iter().copied().collect() }
    }
}

impl RngCore for ScriptedRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }
    fn next_u64(&mut self) -> u64 {
        self.words.pop_front().unwrap_or(1 << 63)
    }
    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for b in dest {
            *b = self.next_u32() as u8;
        }
    }
}

pub(crate) const FOUR: &str = "97 * (226.76, 3.11, 9.61, 0.15, 0.88, 43.35, 0.44, 1.0)\n\
38 * (57.47, 9.99, 35.18, 0.15, 0.37, 30.96, 0.05, 0.31)\n\
56 * (15.25, 13.58, 3.82, 0.3, 0.8, 39.51, 0.43, 0.65)\n\
31 * (113.21, 18.25, 38.21, 0.62, 0.46, 15.78, 0.49, 0.61)";

