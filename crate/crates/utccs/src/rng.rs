//! Hybrid pseudo-random generator: k-bit words from a type-III coupled map
//! XOR'd with a linear congruential generator.
//!
//! Word construction, fixed here and relied on by every downstream test
//! vector:
//! * the chaotic side contributes `p = floor(x * 2^k)` from the freshly
//!   advanced orbit state;
//! * the LCG side produces 31-bit outputs; a k-bit word consumes
//!   `ceil(k/31)` successive outputs, concatenated most-significant-first,
//!   and keeps the top k bits. For k = 32 that is `q = (y1 << 1) | (y2 >> 30)`.
//!   Keeping the top of the concatenation leaves the LCG's short-period low
//!   bits only at positions where the chaotic word is already fine-grained,
//!   which is what preserves per-bit uniformity of the XOR.
//! * `z = p XOR q` is the emitted word.
//!
//! The LCG is seeded with `floor(x0 * 2^31)` from the same `x0` that seeds
//! the chaotic map.

use std::io::Write;

use crate::error::{Error, Result};
use crate::maps::{Map1D, MapSpec, UtfKind};

/// Multiplier of the linear congruential generator.
pub const LCG_A: u64 = 1_103_515_245;
/// Increment of the linear congruential generator.
pub const LCG_B: u64 = 12_345;
/// Modulus of the linear congruential generator (2^31).
pub const LCG_M: u64 = 1 << 31;

/// State of the classical LCG `y' = (a y + b) mod m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LcgState {
    y: u64,
}

impl LcgState {
    /// Start from `seed mod 2^31`.
    pub fn new(seed: u64) -> Self {
        LcgState { y: seed % LCG_M }
    }

    /// Current state, always in `[0, 2^31)`.
    pub fn y(&self) -> u64 {
        self.y
    }

    /// Advance one step and return the new state value. Exact integer
    /// arithmetic: the product fits comfortably in 64 bits.
    #[inline]
    pub fn next(&mut self) -> u64 {
        self.y = (LCG_A * self.y + LCG_B) % LCG_M;
        self.y
    }
}

/// Which type-III coupling drives the generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapChoice {
    /// Logistic-sine coupling, slope-8 transform.
    Lscm,
    /// Tent-logistic coupling, slope-8 transform.
    Tlcm,
    /// Sine-tent coupling, slope-8 transform.
    Stcm,
}

impl MapChoice {
    /// The underlying coupled-map spec at parameter `r`.
    pub fn spec(self, r: f64) -> crate::Result<MapSpec> {
        let (a, b) = match self {
            MapChoice::Lscm => (crate::SeedMapKind::Logistic, crate::SeedMapKind::Sine),
            MapChoice::Tlcm => (crate::SeedMapKind::Tent, crate::SeedMapKind::Logistic),
            MapChoice::Stcm => (crate::SeedMapKind::Sine, crate::SeedMapKind::Tent),
        };
        MapSpec::new(a, b, UtfKind::TentSlope8, r)
    }
}

/// Convert an orbit state to a k-bit integer: `floor(x * 2^k)`.
///
/// Exact for any `k <= 64`: multiplying by a power of two only shifts the
/// exponent. `x = 1.0` is rejected; orbit states are always below 1.
pub fn chaotic_to_int(x: f64, word_bits: u32) -> Result<u64> {
    if !(0.0..1.0).contains(&x) {
        return Err(Error::Domain {
            what: "x",
            value: x,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if word_bits == 0 || word_bits > 64 {
        return Err(Error::BadWordBits(word_bits));
    }
    Ok((x * (word_bits as f64).exp2()) as u64)
}

/// Paired chaotic-map and LCG state producing k-bit words.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cbprng {
    spec: MapSpec,
    x: f64,
    lcg: LcgState,
    word_bits: u32,
}

impl Cbprng {
    /// Build a generator from one of the three named couplings.
    /// `x0` must lie strictly inside (0,1); it seeds both halves.
    pub fn new(map: MapChoice, x0: f64, r: f64, word_bits: u32) -> Result<Self> {
        Self::from_spec(map.spec(r)?, x0, word_bits)
    }

    /// Build a generator from an explicit map spec.
    pub fn from_spec(spec: MapSpec, x0: f64, word_bits: u32) -> Result<Self> {
        if !(x0 > 0.0 && x0 < 1.0) {
            return Err(Error::KeyRange {
                what: "x0",
                value: x0,
            });
        }
        if word_bits != 32 && word_bits != 64 {
            return Err(Error::BadWordBits(word_bits));
        }
        Ok(Cbprng {
            spec,
            x: x0,
            lcg: LcgState::new((x0 * LCG_M as f64) as u64),
            word_bits,
        })
    }

    pub fn word_bits(&self) -> u32 {
        self.word_bits
    }

    /// Widen the LCG to `word_bits` bits: concatenate `ceil(k/31)` outputs
    /// most-significant-first and keep the top k bits.
    #[inline]
    fn lcg_word(&mut self) -> u64 {
        let k = self.word_bits;
        let steps = (k + 30) / 31;
        let mut acc: u128 = 0;
        for _ in 0..steps {
            acc = (acc << 31) | self.lcg.next() as u128;
        }
        (acc >> (31 * steps - k)) as u64
    }

    /// Advance both halves and emit the next word (low `word_bits` bits).
    #[inline]
    pub fn next_word(&mut self) -> u64 {
        self.x = self.spec.step(self.x);
        let p = (self.x * (self.word_bits as f64).exp2()) as u64;
        p ^ self.lcg_word()
    }

    /// Row-major `rows x cols` matrix of words reduced mod `modulus`.
    pub fn fill_matrix(&mut self, rows: usize, cols: usize, modulus: u64) -> Result<Vec<u64>> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok((0..rows * cols).map(|_| self.next_word() % modulus).collect())
    }

    /// Serialize `n_bits` of output into `sink`: words packed
    /// most-significant-bit first, contiguous, no header. The format is what
    /// external bitstream test batteries read from a file.
    pub fn emit_bitstream<W: Write>(&mut self, n_bits: u64, sink: &mut W) -> Result<()> {
        if n_bits % 8 != 0 {
            return Err(Error::UnalignedBitCount(n_bits));
        }
        let mut remaining_bytes = n_bits / 8;
        let word_bytes = (self.word_bits / 8) as u64;
        let mut buf = Vec::with_capacity(64 * 1024);
        while remaining_bytes > 0 {
            let w = self.next_word();
            let be = w.to_be_bytes();
            // Low word_bits of the u64, most significant byte first.
            let bytes = &be[(8 - word_bytes as usize)..];
            let take = word_bytes.min(remaining_bytes) as usize;
            buf.extend_from_slice(&bytes[..take]);
            remaining_bytes -= take as u64;
            if buf.len() >= 64 * 1024 {
                sink.write_all(&buf)?;
                buf.clear();
            }
        }
        sink.write_all(&buf)?;
        Ok(())
    }
}
