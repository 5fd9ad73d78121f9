//! Fixtures shared by the benchmarks.

use evensearch::{gen_instance_with, F2Kind, Instance, RegisterPattern};

/// Item width used by every fixture.
pub const ITEM_BITS: usize = 16;

/// A `2^n`-item identity instance with matches at the given positions.
pub fn planted(n: u32, positions: &[u64]) -> Instance {
    gen_instance_with(0xbe7c, n, ITEM_BITS, positions, F2Kind::Identity).expect("fixture generation")
}

/// A single match in the middle of the positive half.
pub fn single_match(n: u32) -> Instance {
    planted(n, &[(1u64 << n) / 2 + 1])
}

/// `c` matches spread evenly over the list.
pub fn spread(n: u32, c: u64) -> Instance {
    let step = (1u64 << n) / c;
    let positions: Vec<u64> = (0..c).map(|i| i * step + step / 3).collect();
    planted(n, &positions)
}

/// The pattern a presence check queries: sign fixed to `+`, magnitude free.
pub fn positive_half(instance: &Instance) -> RegisterPattern {
    RegisterPattern::positive_half(instance.magnitude_bits()).expect("valid width")
}

#[cfg(test)]
mod tests {
    use super::*;
    use evensearch::linear_scan;

    #[test]
    fn fixtures_plant_what_they_claim() {
        assert_eq!(linear_scan(&single_match(6)), vec![33]);
        assert_eq!(linear_scan(&spread(8, 4)), vec![21, 85, 149, 213]);
        assert_eq!(positive_half(&single_match(6)).to_string(), "+000000");
    }
}
