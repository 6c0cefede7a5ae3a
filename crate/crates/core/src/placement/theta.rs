use num_bigint::BigUint;
use num_traits::Zero;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numerics::Rational;

pub const DEFAULT_THETA_CAP: usize = 4096;

#[derive(Clone, Debug)]
enum Source {
    Seeded(ChaCha8Rng),
    /// Explicit bits, then zeros forever.
    Fixed(Vec<bool>),
}

/// Lazily generated bits of `theta = sum_i b_i 2^-(i+2)`, a dyadic in `[0, 1/2)`.
///
/// Bits come from a ChaCha8 stream keyed by the seed, 64 at a time, so bit `i` only
/// depends on `(seed, i)`.
#[derive(Clone, Debug)]
pub struct ThetaStream {
    seed: u64,
    source: Source,
    bits: Vec<bool>,
    // integer value of `bits` read MSB-first
    prefix: BigUint,
    cap: usize,
}

impl ThetaStream {
    pub fn seeded(seed: u64) -> Self {
        Self::seeded_with_cap(seed, DEFAULT_THETA_CAP)
    }

    pub fn seeded_with_cap(seed: u64, cap: usize) -> Self {
        ThetaStream {
            seed,
            source: Source::Seeded(ChaCha8Rng::seed_from_u64(seed)),
            bits: Vec::new(),
            prefix: BigUint::zero(),
            cap,
        }
    }

    /// A stream whose bits are `bits` followed by zeros; `fixed(&[])` is `theta = 0`.
    pub fn fixed(bits: &[bool]) -> Self {
        let mut s = ThetaStream {
            seed: 0,
            source: Source::Fixed(bits.to_vec()),
            bits: Vec::new(),
            prefix: BigUint::zero(),
            cap: bits.len().max(DEFAULT_THETA_CAP),
        };
        s.extend_to(bits.len()).expect("fixed bits fit the cap");
        s
    }

    /// `theta = t / 2^(width+1)` on the grid used for uniformity checks.
    pub fn grid(t: u64, width: u32) -> Self {
        let bits: Vec<bool> = (0..width).rev().map(|j| (t >> j) & 1 == 1).collect();
        Self::fixed(&bits)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// True when every bit beyond the generated prefix is known to be zero.
    pub fn is_exact(&self) -> bool {
        matches!(&self.source, Source::Fixed(b) if self.bits.len() >= b.len())
    }

    /// Integer value of the generated bits; `theta` lies in
    /// `[prefix / 2^(len+1), (prefix+1) / 2^(len+1))`.
    pub fn prefix_value(&self) -> &BigUint {
        &self.prefix
    }

    pub fn bit(&mut self, i: usize) -> Result<bool> {
        self.extend_to(i + 1)?;
        Ok(self.bits[i])
    }

    pub fn generated_bits(&self) -> &[bool] {
        &self.bits
    }

    /// Generates bits until at least `n` exist.
    pub fn extend_to(&mut self, n: usize) -> Result<()> {
        while self.bits.len() < n {
            if self.bits.len() >= self.cap {
                return Err(Error::ThetaCapExceeded { cap: self.cap });
            }
            self.extend_block();
        }
        Ok(())
    }

    /// Generates the next block of bits (64 for seeded streams).
    pub fn extend(&mut self) -> Result<()> {
        self.extend_to(self.bits.len() + 1)
    }

    fn extend_block(&mut self) {
        match &mut self.source {
            Source::Seeded(rng) => {
                let word = rng.next_u64();
                let take = 64.min(self.cap - self.bits.len());
                for j in 0..take {
                    self.bits.push((word >> (63 - j)) & 1 == 1);
                }
                self.prefix <<= take;
                self.prefix += BigUint::from(word >> (64 - take));
            }
            Source::Fixed(fixed) => {
                let b = fixed.get(self.bits.len()).copied().unwrap_or(false);
                self.bits.push(b);
                self.prefix <<= 1u32;
                if b {
                    self.prefix += 1u32;
                }
            }
        }
    }

    /// `theta` truncated to the generated bits.
    pub fn prefix_rational(&self) -> Rational {
        Rational::new(self.prefix.clone().into(), num_bigint::BigInt::from(1) << (self.bits.len() + 1))
    }
}
