//! Fixtures shared by the benchmarks.

use asymorph::metric::{word_space, WordSpaceSpec};
use asymorph::tower::regular_tower;
use asymorph::{FiniteUltraSpace, SizeCaps, Tower};

pub fn word(alphabet: u32, length: u32) -> FiniteUltraSpace {
    word_space(&WordSpaceSpec::new(alphabet, length), &SizeCaps::default()).expect("word space within caps")
}

pub fn regular(k: u64, height: u32) -> Tower {
    regular_tower(&vec![k; height as usize - 1], height, &SizeCaps::default()).expect("tower within caps")
}
