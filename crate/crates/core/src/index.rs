//! Fixed-width bit strings and signed-magnitude indices.
//!
//! Everything here is MSB-first: bit 0 of a [`BitString`] is its most
//! significant bit, and cell 0 of a [`SignedIndex`] is the sign.

use std::fmt;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Largest supported magnitude width. The full `n + 1` bit encoding, and the
/// size `2^(n+1)` of the whole index space, must fit in a `u64`.
pub const MAX_MAGNITUDE_BITS: u32 = 62;

/// A bit string of fixed width, compared bitwise.
///
/// Two strings are equal only if their widths match and every bit agrees.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    width: usize,
    // Bit i lives in words[i / 64] at position 63 - i % 64; bits past `width`
    // are always zero so derived equality is bitwise.
    words: SmallVec<[u64; 2]>,
}

impl BitString {
    pub fn zeros(width: usize) -> Self {
        let mut words = SmallVec::new();
        words.resize(width.div_ceil(64), 0);
        BitString { width, words }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut out = BitString::zeros(0);
        for bit in bits {
            if out.width % 64 == 0 {
                out.words.push(0);
            }
            out.width += 1;
            if bit {
                out.set(out.width - 1, true);
            }
        }
        out
    }

    /// Builds a string of `width` bits whose trailing bits hold `value`.
    ///
    /// Bits of `value` above `width` are dropped; when `width > 64` the
    /// leading bits are zero.
    pub fn from_u64(value: u64, width: usize) -> Self {
        let mut out = BitString::zeros(width);
        for k in 0..width.min(64) {
            if (value >> k) & 1 == 1 {
                out.set(width - 1 - k, true);
            }
        }
        out
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        (self.words[i / 64] >> (63 - i % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.width, "bit {i} out of range for width {}", self.width);
        let mask = 1u64 << (63 - i % 64);
        if bit {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(move |i| self.get(i))
    }

    /// Unsigned value of the trailing `min(width, 64)` bits.
    pub fn low_u64(&self) -> u64 {
        let take = self.width.min(64);
        (self.width - take..self.width).fold(0u64, |acc, i| (acc << 1) | self.get(i) as u64)
    }

    /// The `len` most-significant bits.
    pub fn prefix(&self, len: usize) -> BitString {
        assert!(len <= self.width, "prefix {len} longer than width {}", self.width);
        BitString::from_bits((0..len).map(|i| self.get(i)))
    }

    pub fn count_ones(&self) -> u32 {
        self.words.iter().map(|w| w.count_ones()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for bit in self.iter() {
            f.write_str(if bit { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({self})")
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Format("empty bit string".into()));
        }
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Format(format!("invalid bit {other:?} in {s:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString::from_bits)
    }
}

/// An `(n + 1)`-bit signed-magnitude index: one sign bit followed by `n`
/// magnitude bits.
///
/// `+0` and `-0` are distinct values. Ordering follows the `(n + 1)`-bit
/// encoding when widths agree.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedIndex {
    magnitude_bits: u32,
    sign: bool,
    magnitude: u64,
}

impl SignedIndex {
    pub fn new(magnitude_bits: u32, sign: bool, magnitude: u64) -> Result<Self> {
        check_magnitude_bits(magnitude_bits)?;
        if magnitude >> magnitude_bits != 0 {
            return Err(Error::Range { position: magnitude, magnitude_bits });
        }
        Ok(SignedIndex { magnitude_bits, sign, magnitude })
    }

    /// Index addressing list position `position`, with the given sign.
    pub fn from_position(position: u64, magnitude_bits: u32, sign: bool) -> Result<Self> {
        SignedIndex::new(magnitude_bits, sign, position)
    }

    /// Decodes the `(n + 1)`-bit encoding `sign << n | magnitude`.
    pub fn from_encoding(magnitude_bits: u32, encoding: u64) -> Result<Self> {
        check_magnitude_bits(magnitude_bits)?;
        if encoding >> (magnitude_bits + 1) != 0 {
            return Err(Error::Range { position: encoding, magnitude_bits });
        }
        let magnitude = encoding & ((1u64 << magnitude_bits) - 1);
        Ok(SignedIndex { magnitude_bits, sign: encoding >> magnitude_bits == 1, magnitude })
    }

    pub fn magnitude_bits(&self) -> u32 {
        self.magnitude_bits
    }

    /// Total width `n + 1`.
    pub fn width(&self) -> usize {
        self.magnitude_bits as usize + 1
    }

    pub fn sign(&self) -> bool {
        self.sign
    }

    pub fn is_negative(&self) -> bool {
        self.sign
    }

    /// The magnitude as an unsigned list position in `[0, 2^n)`.
    pub fn magnitude_position(&self) -> u64 {
        self.magnitude
    }

    pub fn encoding(&self) -> u64 {
        (self.sign as u64) << self.magnitude_bits | self.magnitude
    }

    /// Flips the sign bit only; `+0` and `-0` map to each other.
    #[must_use]
    pub fn negate(self) -> Self {
        SignedIndex { sign: !self.sign, ..self }
    }

    /// Bit at `cell`, where cell 0 is the sign and cell `n` the least
    /// significant magnitude bit.
    pub fn bit(&self, cell: usize) -> bool {
        assert!(cell < self.width(), "cell {cell} out of range for width {}", self.width());
        (self.encoding() >> (self.magnitude_bits as usize - cell)) & 1 == 1
    }

    pub fn to_bit_string(&self) -> BitString {
        BitString::from_u64(self.encoding(), self.width())
    }
}

fn check_magnitude_bits(magnitude_bits: u32) -> Result<()> {
    if magnitude_bits == 0 || magnitude_bits > MAX_MAGNITUDE_BITS {
        return Err(Error::Format(format!("magnitude width {magnitude_bits} outside 1..={MAX_MAGNITUDE_BITS}")));
    }
    Ok(())
}

impl fmt::Display for SignedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.encoding(), width = self.width())
    }
}

impl fmt::Debug for SignedIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign { '1' } else { '0' };
        write!(f, "{sign}·{:0width$b}", self.magnitude, width = self.magnitude_bits as usize)
    }
}

impl FromStr for SignedIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits: BitString = s.parse()?;
        if bits.width() < 2 {
            return Err(Error::Format(format!("signed index {s:?} needs a sign and a magnitude bit")));
        }
        if bits.width() > MAX_MAGNITUDE_BITS as usize + 1 {
            return Err(Error::Format(format!("signed index {s:?} is too wide")));
        }
        SignedIndex::from_encoding(bits.width() as u32 - 1, bits.low_u64())
    }
}
