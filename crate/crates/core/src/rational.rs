//! Exact number types.
//!
//! Distances live in [`Dist`] (`i64` rationals): every space built here has
//! small numerators, and ordering two integers never divides. The sequence
//! synthesizer works in [`Big`] because its products grow without bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

pub type Dist = Ratio<i64>;
pub type Big = BigRational;

pub fn int(n: i64) -> Dist {
    Dist::from_integer(n)
}

pub fn big_int(n: impl Into<BigInt>) -> Big {
    Big::from_integer(n.into())
}

pub fn to_big(d: &Dist) -> Big {
    Big::new(BigInt::from(*d.numer()), BigInt::from(*d.denom()))
}

/// Parses `"p/q"`, `"p"` or a JSON number literal without a fraction part.
pub fn parse_dist(s: &str) -> crate::Result<Dist> {
    let t = s.trim();
    t.parse::<Dist>()
        .map_err(|_| crate::Error::Parse(format!("not a rational: `{t}`")))
}

pub fn parse_big(s: &str) -> crate::Result<Big> {
    let t = s.trim();
    t.parse::<Big>()
        .map_err(|_| crate::Error::Parse(format!("not a rational: `{t}`")))
}

/// Standard floor: the largest integer `<= r`.
pub fn floor(r: &Big) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// Standard ceiling: the smallest integer `>= r`.
pub fn ceil(r: &Big) -> BigInt {
    -((-r.numer()).div_floor(r.denom()))
}

pub fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

/// Smallest `p/q` with `q <= max_den` that is `>= target`.
pub fn smallest_fraction_at_least(target: &Big, max_den: u32) -> Big {
    let mut best: Option<Big> = None;
    for q in 1..=max_den.max(1) {
        let qb = BigInt::from(q);
        let p = ceil(&(target * big_int(qb.clone())));
        let cand = Big::new(p, qb);
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap_or_else(|| target.clone())
}

pub fn is_positive(r: &Big) -> bool {
    r.is_positive() && !r.is_zero()
}

/// Serde adapter writing a [`Dist`] as a `"p/q"` string (integers unadorned)
/// and accepting either a string or an integer on input.
pub mod dist_str {
    use super::Dist;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Dist, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&d.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Dist, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            S(String),
            I(i64),
        }
        match Repr::deserialize(d)? {
            Repr::S(s) => super::parse_dist(&s).map_err(de::Error::custom),
            Repr::I(i) => Ok(Dist::from_integer(i)),
        }
    }
}

pub mod big_str {
    use super::Big;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Big, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&d.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Big, D::Error> {
        let s = String::deserialize(d)?;
        super::parse_big(&s).map_err(de::Error::custom)
    }
}

pub mod big_vec_str {
    use super::Big;
    use serde::{de, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Big], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&x.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Big>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| super::parse_big(s).map_err(de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_and_ceil_are_standard() {
        let r = parse_big("7/2").unwrap();
        assert_eq!(floor(&r), BigInt::from(3));
        assert_eq!(ceil(&r), BigInt::from(4));
        let n = parse_big("-7/2").unwrap();
        assert_eq!(floor(&n), BigInt::from(-4));
        assert_eq!(ceil(&n), BigInt::from(-3));
        let i = big_int(5);
        assert_eq!(floor(&i), ceil(&i));
    }

    #[test]
    fn dist_round_trips_through_strings() {
        for s in ["0", "3", "1/2", "22/7"] {
            assert_eq!(parse_dist(s).unwrap().to_string(), s);
        }
        assert!(parse_dist("x").is_err());
        assert_eq!(parse_dist("4/2").unwrap(), int(2));
    }

    #[test]
    fn smallest_fraction() {
        let t = parse_big("10/3").unwrap();
        assert_eq!(smallest_fraction_at_least(&t, 64), t);
        let t = parse_big("4768/1000").unwrap();
        let f = smallest_fraction_at_least(&t, 64);
        assert!(f >= t);
        assert!(*f.denom() <= BigInt::from(64));
    }
}
