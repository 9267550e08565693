use serde::{Deserialize, Serialize};

use super::{FiniteUltraSpace, SizeCaps};
use crate::{Error, Result};

/// Words of a fixed length over `{0, .., alphabet_size - 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WordSpaceSpec {
    pub alphabet_size: u32,
    pub length: u32,
}

impl WordSpaceSpec {
    pub fn new(alphabet_size: u32, length: u32) -> Self {
        WordSpaceSpec {
            alphabet_size,
            length,
        }
    }

    pub fn point_count(&self) -> Option<u128> {
        (self.alphabet_size as u128).checked_pow(self.length)
    }
}

fn digit_width(alphabet: u32) -> usize {
    (alphabet - 1).to_string().len()
}

/// Identifier of a word: zero-padded letters, position 0 first.
pub fn word_id(letters: &[u32], alphabet: u32) -> String {
    let w = digit_width(alphabet);
    letters.iter().map(|l| format!("{l:0w$}")).collect()
}

/// Letters of the point with index `i`, position 0 first.
pub fn word_letters(mut i: usize, spec: &WordSpaceSpec) -> Vec<u32> {
    let a = spec.alphabet_size as usize;
    (0..spec.length)
        .map(|_| {
            let l = (i % a) as u32;
            i /= a;
            l
        })
        .collect()
}

/// The truncation `A^L` of the asymptotic word space: `d(x, y)` is `2^n` for
/// the largest position `n` where the words disagree.
pub fn word_space(spec: &WordSpaceSpec, caps: &SizeCaps) -> Result<FiniteUltraSpace> {
    if spec.alphabet_size < 2 {
        return Err(Error::Invalid("alphabet size must be at least 2".into()));
    }
    if spec.length < 1 {
        return Err(Error::Invalid("word length must be at least 1".into()));
    }
    if spec.length > 62 {
        return Err(Error::Invalid("word length above 62 overflows distances".into()));
    }
    let count = spec.point_count().ok_or(Error::SizeCap {
        what: "word space",
        needed: u128::MAX,
        cap: caps.max_points as u128,
    })?;
    caps.check_points("word space", count)?;
    let ids = (0..count as usize)
        .map(|i| word_id(&word_letters(i, spec), spec.alphabet_size))
        .collect();
    Ok(FiniteUltraSpace::word_store(spec.alphabet_size, spec.length, ids)?
        .with_name(format!("word({},{})", spec.alphabet_size, spec.length)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn caps() -> SizeCaps {
        SizeCaps::default()
    }

    #[test]
    fn binary_examples() {
        let s = word_space(&WordSpaceSpec::new(2, 3), &caps()).unwrap();
        assert_eq!(s.len(), 8);
        assert_eq!(s.dist_by_id("000", "100").unwrap(), int(1));
        assert_eq!(s.dist_by_id("010", "010").unwrap(), int(0));
        assert_eq!(s.dist_by_id("000", "001").unwrap(), int(4));
    }

    #[test]
    fn ternary_uses_the_disagreement_indicator() {
        let s = word_space(&WordSpaceSpec::new(3, 2), &caps()).unwrap();
        assert_eq!(s.dist_by_id("02", "01").unwrap(), int(2));
        // 2^n |x_n - y_n| would give 4 here.
        assert_eq!(s.dist_by_id("00", "02").unwrap(), int(2));
    }

    /// Direct evaluation of max 2^n |x_n - y_n| agrees on the binary alphabet.
    #[test]
    fn binary_matches_absolute_difference_formula() {
        let spec = WordSpaceSpec::new(2, 5);
        let s = word_space(&spec, &caps()).unwrap();
        for i in 0..s.len() {
            let x = word_letters(i, &spec);
            for j in 0..s.len() {
                let y = word_letters(j, &spec);
                let d = (0..5)
                    .map(|n| (1i64 << n) * (x[n] as i64 - y[n] as i64).abs())
                    .max()
                    .unwrap();
                assert_eq!(s.dist(i, j), int(d));
            }
        }
    }

    #[test]
    fn size_guard() {
        let small = SizeCaps {
            max_points: 100,
            ..SizeCaps::default()
        };
        assert!(matches!(
            word_space(&WordSpaceSpec::new(3, 5), &small),
            Err(Error::SizeCap { .. })
        ));
        assert!(word_space(&WordSpaceSpec::new(1, 5), &small).is_err());
    }

    #[test]
    fn wide_alphabets_pad_letters() {
        let s = word_space(&WordSpaceSpec::new(12, 1), &caps()).unwrap();
        assert_eq!(s.id(0), "00");
        assert_eq!(s.id(11), "11");
    }
}
