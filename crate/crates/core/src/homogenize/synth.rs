use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::morphism::{check_l2_preconditions, AdmissibleSequences, L2Report};
use crate::rational::{big_int, big_vec_str, ceil, floor, smallest_fraction_at_least, Big};
use crate::report::ValidationReport;
use crate::tower::DegreeProfile;
use crate::{Error, Result};

use super::witness::HomogeneityWitness;

/// How the produced `a_i`, `b_i` are rounded.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthesisPolicy {
    /// Round `a_{i+1}` up and `b_{i+1}` down after each step, so every
    /// window `[a_i, b_i]` has integer ends and the partitions the builder
    /// needs always exist.
    #[default]
    Integral,
    /// Keep the raw rationals; `b_1` is the least `p/q` with `q <= 64`.
    Exact,
}

impl std::str::FromStr for SynthesisPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "integral" => Ok(SynthesisPolicy::Integral),
            "exact" => Ok(SynthesisPolicy::Exact),
            _ => Err(Error::Parse(format!("unknown synthesis policy `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SynthesisOutput {
    #[serde(with = "big_vec_str")]
    pub a: Vec<Big>,
    #[serde(with = "big_vec_str")]
    pub b: Vec<Big>,
    pub n: Vec<u32>,
    pub m: Vec<u32>,
    pub target_base: u64,
    pub policy: SynthesisPolicy,
    /// Why the search stopped before the top of the truncation.
    pub stopped: String,
    /// Re-check of the level inequalities on the grouped profiles.
    pub verification: L2Report,
    /// `b_i / a_i >= C_{n_i}^H δ_{n_i}^H` at every index.
    pub tail_report: ValidationReport,
}

impl SynthesisOutput {
    pub fn sequences(&self) -> AdmissibleSequences {
        AdmissibleSequences {
            a: self.a.clone(),
            b: self.b.clone(),
        }
    }

    pub fn steps(&self) -> usize {
        self.n.len() - 1
    }
}

/// Degree profile of the level-`m` subtower of the regular `base`-ary tower.
pub fn grouped_regular_profile(base: u64, m: &[u32]) -> Result<DegreeProfile> {
    let k = m
        .windows(2)
        .map(|w| {
            base.checked_pow(w[1] - w[0])
                .ok_or_else(|| Error::OutOfRange(format!("{base}^{} overflows u64", w[1] - w[0])))
        })
        .collect::<Result<Vec<u64>>>()?;
    DegreeProfile::regular(&k)
}

const MAX_EXPONENT: u32 = 512;

/// Inductive search: for each `i` take the least `n_{i+1}` satisfying
/// `d > ceil(a_i)`, `a_i + 1 <= d` and `(d - b_i)/(d + 2 b_i) >= 1/δ_{n_i}`,
/// then the least `m_{i+1}` whose `a_{i+1}`, `b_{i+1}` keep the window
/// invariant and the tail bound. Tails stop at the truncation height `H`;
/// since the tail at `H` is 1, no `n_{i+1} = H` can be taken.
pub fn synthesize_sequences(
    profile: &DegreeProfile,
    target_base: u64,
    witness: &HomogeneityWitness,
    policy: SynthesisPolicy,
) -> Result<SynthesisOutput> {
    if target_base < 2 {
        return Err(Error::Invalid("target base must be at least 2".into()));
    }
    witness.check(profile)?;
    let h = profile.height();
    let three = big_int(3);
    let two = big_int(2);
    let tail1 = witness.tail(1, h);
    let a1 = Big::one();
    let b1 = match policy {
        SynthesisPolicy::Integral => Big::from_integer(ceil(&tail1).max(BigInt::from(3))),
        SynthesisPolicy::Exact => smallest_fraction_at_least(&tail1.clone().max(three.clone()), 64),
    };
    let (mut a, mut b, mut n, mut m) = (vec![a1], vec![b1], vec![1u32], vec![0u32]);
    let stopped;
    loop {
        let i = n.len() - 1;
        let (ni, ai, bi) = (n[i], a[i].clone(), b[i].clone());
        let inv_delta = witness.delta(ni).recip();
        let mut found = None;
        for nn in ni + 1..h {
            let d = big_int(profile.deg(ni, nn)?);
            if d <= Big::from_integer(ceil(&ai)) || &ai + Big::one() > d {
                continue;
            }
            let num = &d - &bi;
            if num <= Big::zero() {
                continue;
            }
            if num / (&d + &two * &bi) >= inv_delta {
                found = Some((nn, d));
                break;
            }
        }
        let Some((nn, d)) = found else {
            stopped = format!("no level n < {h} above {ni} satisfies the degree growth condition");
            break;
        };
        let t = witness.tail(nn, h);
        let cc = witness.c_product(ni, nn);
        let gap = &d - &bi;
        let denom = &cc * &d + &two * &bi - &ai;
        let mut step = None;
        for e in 1..=MAX_EXPONENT {
            let p = Big::from_integer(BigInt::from(target_base).pow(e));
            if &p * (&t - Big::one()) * &ai / &gap <= two {
                continue;
            }
            let (mut an, mut bn) = (&p * &ai / &gap, &p * &bi / &denom);
            if policy == SynthesisPolicy::Integral {
                an = Big::from_integer(ceil(&an));
                bn = Big::from_integer(floor(&bn));
            }
            if an < Big::one() || bn < Big::one() || &an + &two > bn || &bn / &an < t {
                continue;
            }
            step = Some((e, an, bn));
            break;
        }
        let Some((e, an, bn)) = step else {
            stopped = format!("no exponent up to {MAX_EXPONENT} fits after level {nn}");
            break;
        };
        n.push(nn);
        m.push(m[i] + e);
        a.push(an);
        b.push(bn);
    }
    if n.len() < 2 {
        return Err(Error::Exhausted {
            steps: 0,
            detail: stopped,
            suggested_height: suggest_height(profile, witness, &b[0]),
        });
    }

    let grouped = profile.regroup(&n)?;
    let target = grouped_regular_profile(target_base, &m)?;
    let seqs = AdmissibleSequences {
        a: a.clone(),
        b: b.clone(),
    };
    let verification = check_l2_preconditions(&grouped, &target, &seqs)?;
    let mut tail_report = ValidationReport::new("tail bound");
    for (k, &ni) in n.iter().enumerate() {
        tail_report.checked += 1;
        let t = witness.tail(ni, h);
        if &b[k] / &a[k] < t {
            tail_report.push("b/a>=tail", vec![(k + 1).to_string()], format!("b/a = {} < {t}", &b[k] / &a[k]));
        }
    }
    if let Some(v) = verification.report.violations.first().or(tail_report.violations.first()) {
        return Err(Error::Invariant(format!(
            "synthesized sequences fail re-verification: {} {:?}: {}",
            v.rule, v.witness, v.detail
        )));
    }
    Ok(SynthesisOutput {
        a,
        b,
        n,
        m,
        target_base,
        policy,
        stopped,
        verification,
        tail_report,
    })
}

/// Height at which the first grouped step would exist if degrees kept
/// growing at the profile's average rate.
fn suggest_height(profile: &DegreeProfile, witness: &HomogeneityWitness, b1: &Big) -> Option<u32> {
    let h = profile.height();
    if h < 2 {
        return None;
    }
    let growth = (profile.deg(1, h).ok()? as f64).powf(1.0 / f64::from(h - 1));
    if growth <= 1.0 {
        return None;
    }
    let dl = witness.delta(1).to_f64()?;
    let need = b1.to_f64()? * (dl + 2.0) / (dl - 1.0);
    let levels = (need.ln() / growth.ln()).ceil().max(1.0) as u32;
    // one level for the step itself, one so its tail stays above 1
    Some(1 + levels + 1)
}
