//! Control-register patterns.
//!
//! A pattern holds one cell per index bit, sign cell first. `Plus` and
//! `Minus` pin the bit to 0 and 1 (what a Hadamard maps `|+⟩` and `|−⟩` to)
//! while `Free` leaves it in even superposition. The pattern therefore
//! selects the sub-domain of indices an evenness query ranges over.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::index::{SignedIndex, MAX_MAGNITUDE_BITS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    /// Fixed 0.
    Plus,
    /// Fixed 1.
    Minus,
    /// Undetermined.
    Free,
}

impl Cell {
    pub fn symbol(self) -> char {
        match self {
            Cell::Plus => '+',
            Cell::Minus => '-',
            Cell::Free => '0',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RegisterPattern {
    cells: Vec<Cell>,
}

impl RegisterPattern {
    /// Builds a pattern of width `n + 1` for `n` in `1..=62`.
    pub fn new(cells: Vec<Cell>) -> Result<Self> {
        if cells.len() < 2 || cells.len() > MAX_MAGNITUDE_BITS as usize + 1 {
            return Err(Error::Pattern(cells.iter().map(|c| c.symbol()).collect()));
        }
        Ok(RegisterPattern { cells })
    }

    /// All cells `Free`.
    pub fn free(magnitude_bits: u32) -> Result<Self> {
        RegisterPattern::new(vec![Cell::Free; magnitude_bits as usize + 1])
    }

    /// Sign cell `Plus`, every magnitude cell `Free`: the whole positive half.
    pub fn positive_half(magnitude_bits: u32) -> Result<Self> {
        RegisterPattern::free(magnitude_bits)?.with_cell(0, Cell::Plus)
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn width(&self) -> usize {
        self.cells.len()
    }

    pub fn magnitude_bits(&self) -> u32 {
        self.cells.len() as u32 - 1
    }

    pub fn free_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c == Cell::Free).count()
    }

    /// Number of indices the pattern selects, `2^free_count`.
    pub fn domain_size(&self) -> u64 {
        1 << self.free_count()
    }

    pub fn is_determined(&self) -> bool {
        self.free_count() == 0
    }

    /// True when the fixed cells form a prefix (no fixed cell after a free one).
    pub fn is_fixed_prefix(&self) -> bool {
        self.cells.windows(2).all(|w| !(w[0] == Cell::Free && w[1] != Cell::Free))
    }

    /// A copy with cell `j` replaced.
    pub fn with_cell(&self, j: usize, value: Cell) -> Result<Self> {
        if j >= self.cells.len() {
            return Err(Error::CellRange { cell: j, width: self.cells.len() });
        }
        let mut cells = self.cells.clone();
        cells[j] = value;
        Ok(RegisterPattern { cells })
    }

    pub fn contains(&self, x: &SignedIndex) -> bool {
        x.width() == self.width()
            && self.cells.iter().enumerate().all(|(c, cell)| match cell {
                Cell::Plus => !x.bit(c),
                Cell::Minus => x.bit(c),
                Cell::Free => true,
            })
    }

    /// The selected indices in ascending order of their encoding.
    pub fn domain(&self) -> Domain {
        let n = self.magnitude_bits();
        let mut fixed = 0u64;
        // Free bit positions in the encoding, most significant first.
        let mut free_shifts = Vec::new();
        for (c, cell) in self.cells.iter().enumerate() {
            let shift = n - c as u32;
            match cell {
                Cell::Plus => {}
                Cell::Minus => fixed |= 1 << shift,
                Cell::Free => free_shifts.push(shift),
            }
        }
        Domain { magnitude_bits: n, fixed, free_shifts, next: 0, end: self.domain_size() }
    }

    /// The classical index of a fully determined pattern: Plus reads 0,
    /// Minus reads 1.
    pub fn readout(&self) -> Result<SignedIndex> {
        if let Some(j) = self.cells.iter().position(|&c| c == Cell::Free) {
            return Err(Error::Readout(j));
        }
        let encoding = self.cells.iter().fold(0u64, |acc, &c| (acc << 1) | (c == Cell::Minus) as u64);
        SignedIndex::from_encoding(self.magnitude_bits(), encoding)
    }
}

/// Iterator over [`RegisterPattern::domain`].
#[derive(Debug, Clone)]
pub struct Domain {
    magnitude_bits: u32,
    fixed: u64,
    free_shifts: Vec<u32>,
    next: u64,
    end: u64,
}

impl Iterator for Domain {
    type Item = SignedIndex;

    fn next(&mut self) -> Option<SignedIndex> {
        if self.next >= self.end {
            return None;
        }
        let k = self.free_shifts.len();
        // Spread the counter over the free positions, its MSB into the most
        // significant free cell, so encodings come out ascending.
        let encoding = self
            .free_shifts
            .iter()
            .enumerate()
            .fold(self.fixed, |acc, (i, &shift)| acc | ((self.next >> (k - 1 - i)) & 1) << shift);
        self.next += 1;
        Some(SignedIndex::from_encoding(self.magnitude_bits, encoding).expect("encoding in range"))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.end - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for Domain {}

impl fmt::Display for RegisterPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.cells.iter().try_for_each(|c| write!(f, "{}", c.symbol()))
    }
}

impl fmt::Debug for RegisterPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RegisterPattern({self})")
    }
}

impl FromStr for RegisterPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let cells = s
            .chars()
            .map(|c| match c {
                '+' => Ok(Cell::Plus),
                '-' => Ok(Cell::Minus),
                '0' => Ok(Cell::Free),
                _ => Err(Error::Pattern(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()?;
        RegisterPattern::new(cells).map_err(|_| Error::Pattern(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn pat(s: &str) -> RegisterPattern {
        s.parse().unwrap()
    }

    fn texts(p: &RegisterPattern) -> Vec<String> {
        p.domain().map(|x| x.to_string()).collect()
    }

    #[test]
    fn domain_examples() {
        assert_eq!(texts(&pat("+-00")), ["0100", "0101", "0110", "0111"]);
        assert_eq!(texts(&pat("000")), ["000", "001", "010", "011", "100", "101", "110", "111"]);
        assert_eq!(texts(&pat("+-+")), ["010"]);
        assert_eq!(texts(&pat("0+0")), ["000", "001", "100", "101"]);
    }

    #[test]
    fn readout_examples() {
        assert_eq!(pat("+++").readout().unwrap().to_string(), "000");
        assert_eq!(pat("+-+").readout().unwrap().to_string(), "010");
        assert!(matches!(pat("+0+").readout(), Err(Error::Readout(1))));
    }

    #[test]
    fn with_cell_examples() {
        let p = pat("+00");
        assert_eq!(p.with_cell(1, Cell::Minus).unwrap(), pat("+-0"));
        assert_eq!(p, pat("+00"));
        assert_eq!(p.with_cell(2, Cell::Minus).unwrap().with_cell(2, Cell::Plus).unwrap(), pat("+0+"));
        assert!(matches!(p.with_cell(3, Cell::Plus), Err(Error::CellRange { cell: 3, width: 3 })));
    }

    #[test]
    fn parse_rejects_bad_patterns() {
        for bad in ["?", "+", "", "+x0", "+0 "] {
            assert!(matches!(bad.parse::<RegisterPattern>(), Err(Error::Pattern(_))), "{bad:?}");
        }
    }

    #[test]
    fn prefix_shape() {
        assert!(pat("+-00").is_fixed_prefix());
        assert!(pat("000").is_fixed_prefix());
        assert!(!pat("+0-0").is_fixed_prefix());
        assert_eq!(RegisterPattern::positive_half(3).unwrap(), pat("+000"));
    }

    fn all_patterns(width: usize) -> Vec<RegisterPattern> {
        (0..3usize.pow(width as u32))
            .map(|mut code| {
                let cells = (0..width)
                    .map(|_| {
                        let c = [Cell::Plus, Cell::Minus, Cell::Free][code % 3];
                        code /= 3;
                        c
                    })
                    .collect();
                RegisterPattern::new(cells).unwrap()
            })
            .collect()
    }

    #[test]
    fn domain_agrees_with_brute_force_filter() {
        for width in 2..=7 {
            let n = width as u32 - 1;
            for p in all_patterns(width) {
                let brute: Vec<u64> = (0..1u64 << width)
                    .filter(|enc| {
                        p.cells().iter().enumerate().all(|(c, cell)| {
                            let bit = (enc >> (width - 1 - c)) & 1 == 1;
                            match cell {
                                Cell::Plus => !bit,
                                Cell::Minus => bit,
                                Cell::Free => true,
                            }
                        })
                    })
                    .collect();
                let got: Vec<u64> = p.domain().map(|x| x.encoding()).collect();
                assert_eq!(got, brute, "{p}");
                assert_eq!(got.len() as u64, p.domain_size());
                assert!(p.domain().all(|x| p.contains(&x) && x.magnitude_bits() == n));
            }
        }
    }

    #[test]
    fn bisection_is_a_disjoint_cover() {
        for width in 2..=6 {
            for p in all_patterns(width) {
                for j in (0..width).filter(|&j| p.cells()[j] == Cell::Free) {
                    let left: BTreeSet<_> = p.with_cell(j, Cell::Plus).unwrap().domain().collect();
                    let right: BTreeSet<_> = p.with_cell(j, Cell::Minus).unwrap().domain().collect();
                    let whole: BTreeSet<_> = p.domain().collect();
                    assert!(left.is_disjoint(&right));
                    assert_eq!(&left | &right, whole);
                }
            }
        }
    }

    fn arb_pattern() -> impl Strategy<Value = RegisterPattern> {
        proptest::collection::vec(prop_oneof![Just(Cell::Plus), Just(Cell::Minus), Just(Cell::Free)], 2..=12)
            .prop_map(|cells| RegisterPattern::new(cells).unwrap())
    }

    proptest! {
        #[test]
        fn text_round_trip(p in arb_pattern()) {
            prop_assert_eq!(p.to_string().parse::<RegisterPattern>().unwrap(), p);
        }

        #[test]
        fn determined_domain_is_readout(p in arb_pattern()) {
            let determined = RegisterPattern::new(
                p.cells().iter().map(|&c| if c == Cell::Free { Cell::Minus } else { c }).collect(),
            ).unwrap();
            let dom: Vec<_> = determined.domain().collect();
            prop_assert_eq!(dom, vec![determined.readout().unwrap()]);
        }
    }
}
