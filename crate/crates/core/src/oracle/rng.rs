//! Deterministic 64-bit LCG (Knuth's MMIX constants). Reports must be byte
//! identical across runs and platforms, so nothing here touches the OS.

use num_bigint::BigInt;
use num_integer::Integer;

use crate::params::Rational;

#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
}

impl Lcg64 {
    const A: u64 = 6364136223846793005;
    const C: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        let mut rng = Lcg64 { state: seed };
        rng.next_u64();
        rng
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(Self::A).wrapping_add(Self::C);
        // the low bits of an LCG are weak; fold the high half down
        self.state ^ (self.state >> 32)
    }

    /// Uniform in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Uniform in `lo..=hi`.
    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        assert!(lo <= hi);
        lo + self.below((hi - lo) as u64 + 1) as i64
    }

    pub fn coin(&mut self) -> bool {
        self.below(2) == 1
    }

    pub fn pick<'a, T>(&mut self, items: &'a [T]) -> &'a T {
        &items[self.below(items.len() as u64) as usize]
    }

    /// A rational in `[lo, hi]` with denominator at most `max_den`.
    /// Falls back to `lo` when no such fraction exists for the drawn denominator.
    pub fn rational(&mut self, lo: &Rational, hi: &Rational, max_den: i64) -> Rational {
        let den = BigInt::from(self.range(1, max_den));
        let a = (lo * &den).ceil().to_integer();
        let b = (hi * &den).floor().to_integer();
        if a > b {
            return lo.clone();
        }
        let span = &b - &a + 1;
        let off = BigInt::from(self.next_u64()).mod_floor(&span);
        Rational::new(a + off, den)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
