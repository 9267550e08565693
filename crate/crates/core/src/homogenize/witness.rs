use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::rational::{big_int, big_str, big_vec_str, pow2, Big};
use crate::tower::DegreeProfile;
use crate::{Error, Result};

/// Constants `c_k >= Deg_k / deg_k` and `δ_k > 1`, `k = 1..H-1`, with
/// their products over the truncation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomogeneityWitness {
    #[serde(with = "big_vec_str")]
    pub c: Vec<Big>,
    #[serde(with = "big_vec_str")]
    pub delta: Vec<Big>,
}

impl HomogeneityWitness {
    /// `c_k = Deg_k / deg_k` and `δ_k = 1 + 2^{1-k}`.
    pub fn default_for(profile: &DegreeProfile) -> Result<Self> {
        let h = profile.height();
        let mut c = Vec::new();
        let mut delta = Vec::new();
        for k in 1..h {
            c.push(Big::new(profile.big_deg_n(k)?.into(), profile.deg_n(k)?.into()));
            delta.push(Big::one() + Big::new(1.into(), pow2(k - 1)));
        }
        Ok(HomogeneityWitness { c, delta })
    }

    /// Levels covered: `c_k`, `δ_k` exist for `k < height()`.
    pub fn height(&self) -> u32 {
        self.c.len() as u32 + 1
    }

    pub fn check(&self, profile: &DegreeProfile) -> Result<()> {
        if self.c.len() != self.delta.len() {
            return Err(Error::Invalid("witness lists differ in length".into()));
        }
        let h = profile.height();
        if self.height() < h {
            return Err(Error::Invalid(format!(
                "witness covers {} levels, profile has {h}",
                self.height()
            )));
        }
        for k in 1..h {
            let (c, d) = (&self.c[k as usize - 1], &self.delta[k as usize - 1]);
            if *c < Big::one() {
                return Err(Error::Invalid(format!("c_{k} = {c} is below 1")));
            }
            if *d <= Big::one() {
                return Err(Error::Invalid(format!("delta_{k} = {d} is not above 1")));
            }
            let big = big_int(profile.big_deg_n(k)?);
            if big > c * big_int(profile.deg_n(k)?) {
                return Err(Error::Hypothesis(format!("Deg_{k} exceeds c_{k} deg_{k} with c_{k} = {c}")));
            }
        }
        Ok(())
    }

    pub fn delta(&self, k: u32) -> &Big {
        &self.delta[k as usize - 1]
    }

    /// `C_i^j = ∏_{k=i}^{j-1} c_k`.
    pub fn c_product(&self, i: u32, j: u32) -> Big {
        (i..j).fold(Big::one(), |acc, k| acc * &self.c[k as usize - 1])
    }

    /// `δ_i^j = ∏_{k=i}^{j-1} δ_k`.
    pub fn delta_product(&self, i: u32, j: u32) -> Big {
        (i..j).fold(Big::one(), |acc, k| acc * &self.delta[k as usize - 1])
    }

    /// `C_i^H δ_i^H`, the finite stand-in for the infinite tail.
    pub fn tail(&self, i: u32, h: u32) -> Big {
        self.c_product(i, h) * self.delta_product(i, h)
    }

    pub fn tails(&self, h: u32) -> Vec<Big> {
        (1..=h).map(|i| self.tail(i, h)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homogeneity {
    /// `∏_{k=1}^{H-1} Deg_k / deg_k`.
    #[serde(with = "big_str")]
    pub product: Big,
    /// Largest window product; every factor is at least 1, so this is
    /// attained by the full window, but it is computed window by window.
    #[serde(with = "big_str")]
    pub bound: Big,
    pub window: (u32, u32),
}

pub fn asymptotic_homogeneity(profile: &DegreeProfile) -> Result<Homogeneity> {
    let h = profile.height();
    let ratios = (1..h)
        .map(|k| Ok(Big::new(profile.big_deg_n(k)?.into(), profile.deg_n(k)?.into())))
        .collect::<Result<Vec<Big>>>()?;
    Ok(window_max(&ratios))
}

/// Max over windows `[n, m]` of the product of `ratios[n-1..m]`.
pub(crate) fn window_max(ratios: &[Big]) -> Homogeneity {
    let product = ratios.iter().fold(Big::one(), |a, r| a * r);
    let mut bound = Big::one();
    let mut window = (1, 1);
    for n in 0..ratios.len() {
        let mut acc = Big::one();
        for (m, r) in ratios.iter().enumerate().skip(n) {
            acc *= r;
            if acc > bound {
                bound = acc.clone();
                window = (n as u32 + 1, m as u32 + 1);
            }
        }
    }
    Homogeneity { product, bound, window }
}
