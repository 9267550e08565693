use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::metric::{entropy_profile, word_space, FiniteUltraSpace, NetConvention, SizeCaps, WordSpaceSpec};
use crate::morphism::{
    build_admissible_morphism, check_l2_preconditions, selection_pair, verify_asymorphism, AdmissibleSequences,
    Check, DistortionModulus, L2Report, MorphismCertificate, MorphismKind, MultiMap,
};
use crate::rational::{big_int, ceil, floor, Big, Dist};
use crate::report::ValidationReport;
use crate::tower::{ball_tower, degree_profile, level_subtower, regular_tower, DegreeProfile, Tower};
use crate::{Error, Result};

use super::synth::{synthesize_sequences, SynthesisOutput, SynthesisPolicy};
use super::witness::{asymptotic_homogeneity, window_max, Homogeneity, HomogeneityWitness};

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub target_base: u64,
    pub policy: SynthesisPolicy,
    pub caps: SizeCaps,
    /// Recorded in the report header; the library does not hash inputs.
    pub input_hash: Option<String>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            target_base: 2,
            policy: SynthesisPolicy::Integral,
            caps: SizeCaps::default(),
            input_hash: None,
        }
    }
}

/// Parameters needed to reproduce a run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReproHeader {
    pub generator: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_hash: Option<String>,
    pub net_convention: NetConvention,
    pub rounding: String,
    pub a1: String,
    pub b1: String,
    pub delta: String,
    pub c: String,
    pub policy: SynthesisPolicy,
    pub target_base: u64,
}

impl ReproHeader {
    fn new(opts: &PipelineOptions, custom_witness: bool) -> Self {
        ReproHeader {
            generator: format!("asymorph {}", env!("CARGO_PKG_VERSION")),
            input_hash: opts.input_hash.clone(),
            net_convention: NetConvention::Closed,
            rounding: "standard floor/ceiling; admissible windows are [ceil a, floor b]".into(),
            a1: "1".into(),
            b1: match opts.policy {
                SynthesisPolicy::Integral => "max(3, ceil(C_1^H delta_1^H))".into(),
                SynthesisPolicy::Exact => "least p/q >= max(3, C_1^H delta_1^H) with q <= 64".into(),
            },
            delta: if custom_witness { "custom".into() } else { "1 + 2^(1-k)".into() },
            c: if custom_witness { "custom".into() } else { "Deg_k / deg_k".into() },
            policy: opts.policy,
            target_base: opts.target_base,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stage {
    pub name: String,
    pub certificate: MorphismCertificate,
}

/// The synthesized prefix actually used and the final grouped step onto
/// the top of the germ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Closing {
    pub prefix: usize,
    pub source_levels: Vec<u32>,
    pub target_levels: Vec<u32>,
    pub target_height: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionSummary {
    #[serde(with = "crate::rational::dist_str")]
    pub source_closeness: Dist,
    #[serde(with = "crate::rational::dist_str")]
    pub target_closeness: Dist,
    #[serde(with = "crate::rational::dist_str")]
    pub closeness: Dist,
    #[serde(with = "crate::rational::dist_str")]
    pub source_fiber_bound: Dist,
    #[serde(with = "crate::rational::dist_str")]
    pub target_fiber_bound: Dist,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub header: ReproHeader,
    pub source_points: usize,
    pub target_points: usize,
    pub homogeneity: Homogeneity,
    pub witness: HomogeneityWitness,
    pub synthesis: SynthesisOutput,
    pub closing: Closing,
    pub preconditions: L2Report,
    pub admissible: ValidationReport,
    pub base_distortion: ValidationReport,
    pub stages: Vec<Stage>,
    pub composed: MorphismCertificate,
    pub stagewise_bound: ValidationReport,
    pub selection: SelectionSummary,
}

pub struct PipelineRun {
    pub report: PipelineReport,
    /// `[T] ⇒ word(base, L)`.
    pub composite: MultiMap,
    pub stage_maps: Vec<MultiMap>,
}

/// Word index of each base point of a regular tower: the letter at position
/// `p` is the child index taken below level `p + 2`.
pub fn canonical_word_map(tower: &Tower, base: u64) -> Vec<usize> {
    tower
        .base()
        .iter()
        .map(|&leaf| {
            let (mut x, mut idx, mut place) = (leaf, 0usize, 1usize);
            while let Some(p) = tower.parent(x) {
                let digit = tower.children(p).iter().position(|&c| c == x).expect("child of its parent");
                idx += digit * place;
                place *= base as usize;
                x = p;
            }
            idx
        })
        .collect()
}

/// Largest prefix `j` whose last grouped level can be joined to the top:
/// the least `D = base^e` with `Deg_{n_j}^H <= D floor(b_j)` must also
/// satisfy `D ceil(a_j) <= deg_{n_j}^H`.
fn closing_step(profile: &DegreeProfile, synth: &SynthesisOutput, base: u64) -> Result<(usize, u32)> {
    let h = profile.height();
    for j in (1..=synth.n.len()).rev() {
        let nj = synth.n[j - 1];
        let (d, big) = (BigInt::from(profile.deg(nj, h)?), BigInt::from(profile.big_deg(nj, h)?));
        let (lo, hi) = (ceil(&synth.a[j - 1]), floor(&synth.b[j - 1]));
        let mut p = BigInt::from(base);
        let mut e = 1;
        while &p * &hi < big && e < 64 {
            p *= base;
            e += 1;
        }
        if &p * &hi >= big && &p * &lo <= d {
            return Ok((j, synth.m[j - 1] + e));
        }
    }
    Err(Error::Exhausted {
        steps: synth.steps(),
        detail: "no synthesized level can be joined to the top of the germ".into(),
        suggested_height: None,
    })
}

fn modulus_monotone(m: &DistortionModulus) -> bool {
    m.table.windows(2).all(|w| w[0].eps < w[1].eps && w[0].delta <= w[1].delta)
}

/// Checks `δ_composite(ε) <= δ_k(... δ_1(ε))` on every tabulated `ε`, both
/// directions.
pub fn stagewise_bound(composed: &MorphismCertificate, stages: &[&MorphismCertificate]) -> ValidationReport {
    let mut r = ValidationReport::new("stagewise modulus composition");
    for e in &composed.forward_modulus.table {
        r.checked += 1;
        let chain = stages.iter().fold(e.eps, |x, s| s.forward_modulus.eval(&x));
        if e.delta > chain {
            r.push("forward", vec![e.eps.to_string()], format!("{} > {chain}", e.delta));
        }
    }
    for e in &composed.backward_modulus.table {
        r.checked += 1;
        let chain = stages.iter().rev().fold(e.eps, |x, s| s.backward_modulus.eval(&x));
        if e.delta > chain {
            r.push("backward", vec![e.eps.to_string()], format!("{} > {chain}", e.delta));
        }
    }
    r
}

fn require_asymorphism(name: &str, cert: &MorphismCertificate) -> Result<()> {
    if cert.is_asymorphism() && cert.passed() {
        return Ok(());
    }
    let failed: Vec<&str> = cert.failed_checks().map(|c| c.axiom.as_str()).collect();
    Err(Error::stage(
        name,
        Error::NotAsymorphism(format!("failed checks: {}", failed.join(", "))),
    ))
}

fn named(space: FiniteUltraSpace, name: &str) -> Arc<FiniteUltraSpace> {
    Arc::new(space.with_name(name))
}

/// Finishes a composed certificate: closeness from the selection pair,
/// monotone moduli and the stagewise composition bound.
fn seal(composite: &MultiMap, stages: &[&MorphismCertificate]) -> Result<(MorphismCertificate, ValidationReport, SelectionSummary)> {
    let mut composed = verify_asymorphism(composite);
    let bound = stagewise_bound(&composed, stages);
    let sel = selection_pair(composite)?;
    composed.closeness_bound = Some(sel.closeness);
    composed.checks.push(Check::new(
        "monotone-moduli",
        modulus_monotone(&composed.forward_modulus) && modulus_monotone(&composed.backward_modulus),
        vec![],
        "",
    ));
    composed.checks.push(Check::new(
        "closeness<=fiber-bound",
        sel.source_closeness <= sel.source_fiber_bound && sel.target_closeness <= sel.target_fiber_bound,
        vec![],
        format!(
            "C = {} (source {} <= {}, target {} <= {})",
            sel.closeness, sel.source_closeness, sel.source_fiber_bound, sel.target_closeness, sel.target_fiber_bound
        ),
    ));
    composed.checks.push(Check::from_report("stagewise-bound", &bound));
    let summary = SelectionSummary {
        source_closeness: sel.source_closeness,
        target_closeness: sel.target_closeness,
        closeness: sel.closeness,
        source_fiber_bound: sel.source_fiber_bound,
        target_fiber_bound: sel.target_fiber_bound,
    };
    Ok((composed, bound, summary))
}

/// `[T] → [T(n)] → [T_2(m)] → [T_2] → word(2, L)`: level subtower, admissible
/// morphism, inverse level subtower, canonical bijection.
pub fn equivalence_pipeline(
    tower: &Tower,
    witness: Option<&HomogeneityWitness>,
    opts: &PipelineOptions,
) -> Result<PipelineRun> {
    let caps = &opts.caps;
    let base = opts.target_base;
    let profile = degree_profile(tower);
    let witness = match witness {
        Some(w) => w.clone(),
        None => HomogeneityWitness::default_for(&profile)?,
    };
    let homogeneity = asymptotic_homogeneity(&profile)?;
    let synthesis = synthesize_sequences(&profile, base, &witness, opts.policy)?;
    let (j, m_top) = closing_step(&profile, &synthesis, base)?;
    let h = tower.height();
    let mut source_levels = synthesis.n[..j].to_vec();
    source_levels.push(h);
    let mut target_levels: Vec<u32> = synthesis.m[..j].iter().map(|m| m + 1).collect();
    target_levels.push(m_top + 1);
    let closing = Closing {
        prefix: j,
        source_levels: source_levels.clone(),
        target_levels: target_levels.clone(),
        target_height: m_top + 1,
    };

    let sub1 = level_subtower(tower, &source_levels)?;
    let t2 = regular_tower(&vec![base; m_top as usize], m_top + 1, caps).map_err(|e| Error::stage("target tower", e))?;
    let sub2 = level_subtower(&t2, &target_levels)?;
    let seqs = AdmissibleSequences {
        a: synthesis.a[..j].to_vec(),
        b: synthesis.b[..j].to_vec(),
    };
    let preconditions = check_l2_preconditions(&degree_profile(&sub1.tower), &degree_profile(&sub2.tower), &seqs)?;
    if let Some(v) = preconditions.report.violations.first() {
        return Err(Error::stage(
            "preconditions",
            Error::Precondition(format!("{} {:?}: {}", v.rule, v.witness, v.detail)),
        ));
    }
    let build = build_admissible_morphism(&sub1.tower, &[sub1.tower.top()], &sub2.tower, sub2.tower.top(), &seqs, caps)
        .map_err(|e| Error::stage("admissible", e))?;

    let s_t = named(tower.base_space(caps)?, "base(T)");
    let s_tn = named(sub1.tower.base_space(caps)?, "base(T(n))");
    let s_t2m = named(sub2.tower.base_space(caps)?, "base(T2(m))");
    let s_t2 = named(t2.base_space(caps)?, "base(T2)");
    let word = named(word_space(&WordSpaceSpec::new(base as u32, m_top), caps)?, &format!("word({base},{m_top})"));

    let next1 = MultiMap::from_fn(s_t.clone(), s_tn.clone(), &sub1.next_map)?;
    let phi = MultiMap::from_fn(s_tn.clone(), s_t2m.clone(), &build.base_map)?;
    let next2_inv = MultiMap::from_fn(s_t2.clone(), s_t2m.clone(), &sub2.next_map)?.inverse();
    let canon = MultiMap::from_fn(s_t2.clone(), word.clone(), &canonical_word_map(&t2, base))?;

    let mut stages = Vec::new();
    for (name, map) in [("next", &next1), ("admissible", &phi), ("next-inverse", &next2_inv), ("canonical", &canon)] {
        let mut cert = verify_asymorphism(map);
        if name == "admissible" {
            cert.kind = MorphismKind::Admissible;
            let extra: Vec<Check> = build
                .certificate
                .checks
                .iter()
                .filter(|c| !cert.checks.iter().any(|d| d.axiom == c.axiom))
                .cloned()
                .collect();
            cert.checks.extend(extra);
        }
        require_asymorphism(name, &cert)?;
        stages.push(Stage {
            name: name.to_string(),
            certificate: cert,
        });
    }
    let composite = next1.then(&phi)?.then(&next2_inv)?.then(&canon)?;
    let stage_certs: Vec<&MorphismCertificate> = stages.iter().map(|s| &s.certificate).collect();
    let (composed, stagewise_bound, selection) = seal(&composite, &stage_certs)?;

    let report = PipelineReport {
        header: ReproHeader::new(opts, false),
        source_points: s_t.len(),
        target_points: word.len(),
        homogeneity,
        witness,
        synthesis,
        closing,
        preconditions,
        admissible: build.admissible_report,
        base_distortion: build.distortion_report,
        stages,
        composed,
        stagewise_bound,
        selection,
    };
    Ok(PipelineRun {
        report,
        composite,
        stage_maps: vec![next1, phi, next2_inv, canon],
    })
}

/// One level of the entropy/degree comparison for a ball tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntropyLevel {
    pub k: u32,
    #[serde(with = "crate::rational::dist_str")]
    pub r: Dist,
    #[serde(with = "crate::rational::dist_str")]
    pub r_next: Dist,
    pub ent_large: u64,
    pub ent_small: u64,
    pub deg_large: u64,
    pub deg_small: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioComparison {
    pub levels: Vec<EntropyLevel>,
    /// From `Ent_{r_k}^{r_{k+1}} / ent_{r_k}^{r_{k+1}}`.
    pub entropy: Homogeneity,
    /// From the ball tower's degree profile.
    pub tower: Homogeneity,
    pub equal: bool,
}

/// Entropy-ratio products of `(X, r)` against the homogeneity of the ball
/// tower (closed nets).
pub fn entropy_ratio_comparison(space: &FiniteUltraSpace, radii: &[Dist], caps: &SizeCaps) -> Result<RatioComparison> {
    let bt = ball_tower(space, radii)?;
    let profile = degree_profile(&bt.tower);
    let tower = asymptotic_homogeneity(&profile)?;
    let ent = entropy_profile(space, radii, radii, NetConvention::Closed, caps)?;
    let mut levels = Vec::new();
    let mut ratios = Vec::new();
    for k in 1..radii.len() {
        let (r, r_next) = (radii[k - 1], radii[k]);
        let e = ent.get(&r, &r_next).expect("grid entry");
        ratios.push(Big::new(big_int(e.large).to_integer(), big_int(e.small).to_integer()));
        levels.push(EntropyLevel {
            k: k as u32,
            r,
            r_next,
            ent_large: e.large,
            ent_small: e.small,
            deg_large: profile.big_deg_n(k as u32)?,
            deg_small: profile.deg_n(k as u32)?,
        });
    }
    let entropy = window_max(&ratios);
    let equal = entropy.product == tower.product && entropy.bound == tower.bound;
    Ok(RatioComparison {
        levels,
        entropy,
        tower,
        equal,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceEquivalenceReport {
    pub ratio: RatioComparison,
    pub prefix: MorphismCertificate,
    pub pipeline: PipelineReport,
    pub composed: MorphismCertificate,
    pub stagewise_bound: ValidationReport,
    pub selection: SelectionSummary,
}

pub struct SpaceEquivalenceRun {
    pub report: SpaceEquivalenceReport,
    pub composite: MultiMap,
}

/// `X → [T_X(r)]` followed by the tower pipeline, after checking that the
/// entropy-ratio product equals the ball tower's homogeneity.
pub fn space_equivalence(
    space: &FiniteUltraSpace,
    radii: &[Dist],
    witness: Option<&HomogeneityWitness>,
    opts: &PipelineOptions,
) -> Result<SpaceEquivalenceRun> {
    let ratio = entropy_ratio_comparison(space, radii, &opts.caps)?;
    if !ratio.equal {
        return Err(Error::Invariant(format!(
            "entropy ratio product {} differs from tower homogeneity {}",
            ratio.entropy.bound, ratio.tower.bound
        )));
    }
    let bt = ball_tower(space, radii)?;
    let run = equivalence_pipeline(&bt.tower, witness, opts)?;
    let x = Arc::new(space.clone());
    let prefix_map = MultiMap::from_fn(x, run.composite.source().clone(), &bt.point_to_base)?;
    let prefix = verify_asymorphism(&prefix_map);
    require_asymorphism("ball-tower", &prefix)?;
    let composite = prefix_map.then(&run.composite)?;
    let mut certs: Vec<&MorphismCertificate> = vec![&prefix];
    certs.extend(run.report.stages.iter().map(|s| &s.certificate));
    let (composed, stagewise_bound, selection) = seal(&composite, &certs)?;
    Ok(SpaceEquivalenceRun {
        report: SpaceEquivalenceReport {
            ratio,
            prefix,
            pipeline: run.report,
            composed,
            stagewise_bound,
            selection,
        },
        composite,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::validate_ultrametric;
    use crate::rational::int;

    #[test]
    fn canonical_map_matches_word_metric() {
        let caps = SizeCaps::default();
        let t = regular_tower(&[2, 2, 2], 4, &caps).unwrap();
        let f = canonical_word_map(&t, 2);
        let b = t.base_space(&caps).unwrap();
        let w = word_space(&WordSpaceSpec::new(2, 3), &caps).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let m = b.dist(i, j).to_integer() / 2;
                let expect = if m == 0 { int(0) } else { int(1 << (m - 1)) };
                assert_eq!(w.dist(f[i], f[j]), expect);
            }
        }
    }

    #[test]
    fn ternary_headline_small() {
        let caps = SizeCaps::default();
        let t = regular_tower(&[3; 6], 7, &caps).unwrap();
        let run = equivalence_pipeline(&t, None, &PipelineOptions::default()).unwrap();
        let r = &run.report;
        assert_eq!(r.closing.source_levels, vec![1, 4, 7]);
        assert_eq!(r.closing.target_levels, vec![1, 9, 10]);
        assert_eq!((r.source_points, r.target_points), (729, 512));
        assert_eq!(r.composed.kind, MorphismKind::Asymorphism);
        assert!(r.composed.passed(), "{:?}", r.composed.failed_checks().collect::<Vec<_>>());
        assert!(r.base_distortion.is_valid() && r.admissible.is_valid());
    }

    #[test]
    fn binary_on_itself() {
        let caps = SizeCaps::default();
        let t = regular_tower(&[2; 6], 7, &caps).unwrap();
        let run = equivalence_pipeline(&t, None, &PipelineOptions::default()).unwrap();
        assert!(run.report.composed.passed());
    }

    #[test]
    fn word_space_equivalence() {
        let caps = SizeCaps::default();
        let x = word_space(&WordSpaceSpec::new(2, 7), &caps).unwrap();
        assert!(validate_ultrametric(&x).is_valid());
        let radii: Vec<Dist> = std::iter::once(int(0)).chain((0..7).map(|k| int(1 << k))).collect();
        let run = space_equivalence(&x, &radii, None, &PipelineOptions::default()).unwrap();
        assert!(run.report.ratio.equal);
        assert_eq!(run.report.ratio.entropy.bound, Big::from_integer(1.into()));
        assert!(run.report.composed.passed());
    }
}
