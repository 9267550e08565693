//! Command dispatch for the `asymorph` binary.
//!
//! Everything runs through [`run`], which returns the exit code and the
//! rendered output instead of printing, so the acceptance suite can drive
//! the commands in-process.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use asymorph::homogenize::{
    asymptotic_homogeneity, classify, equivalence_pipeline, space_equivalence, synthesize_sequences,
    HomogeneityWitness, MarkedProfile, PipelineOptions, SynthesisPolicy, Verdict,
};
use asymorph::metric::io::{space_from_csv, space_from_json};
use asymorph::metric::{
    entropy_profile, hyperspace, product, ultrametrize, validate_ultrametric, validate_ultrametric_exhaustive,
    word_space, WordSpaceSpec,
};
use asymorph::morphism::{tower_embedding, MultiMapJson};
use asymorph::rational::{int, parse_dist};
use asymorph::tower::io::{tower_from_json, tower_to_json};
use asymorph::tower::{
    ball_tower, degree_profile, level_subtower, regular_tower, validate_tower, RawNode, RawTower, Tower,
};
use asymorph::{Dist, Error, FiniteUltraSpace, NetConvention, Result, SizeCaps};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_EXHAUSTED: i32 = 3;

#[derive(Parser, Debug, Clone)]
#[command(name = "asymorph", version, about = "Coarse equivalence certificates for finite ultrametric truncations")]
pub struct RunConfig {
    /// Largest point count any construction may reach.
    #[arg(long, global = true, default_value_t = 20_000)]
    pub cap: usize,
    /// Net convention for entropy computations: strict or closed.
    #[arg(long, global = true, default_value = "closed")]
    pub net: NetConvention,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized experiments.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Rounding of synthesized sequences: integral or exact.
    #[arg(long, global = true, default_value = "integral")]
    pub policy: SynthesisPolicy,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Check a space (strong triangle inequality) or a tower file.
    Validate {
        input: PathBuf,
        /// Scan every triple instead of the spanning-tree check.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Entropy profile of a space as CSV.
    Entropy {
        input: PathBuf,
        /// Comma-separated ε values; defaults to the realized distances.
        #[arg(long, value_delimiter = ',')]
        eps: Vec<String>,
        /// Comma-separated δ values; defaults to the realized distances.
        #[arg(long, value_delimiter = ',')]
        delta: Vec<String>,
    },
    /// Ball tower of an ultrametric space.
    Towerize {
        input: PathBuf,
        /// Increasing radii starting at 0; defaults to the realized distances.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<String>,
    },
    /// Level subtower keeping the listed levels (the last must be the height).
    Subtower {
        input: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        levels: Vec<u32>,
    },
    /// Level-preserving embedding of one tower into another.
    Embed {
        source: PathBuf,
        target: PathBuf,
        /// Require an isomorphism.
        #[arg(long)]
        iso: bool,
    },
    /// Certified coarse equivalence with a word space.
    Equiv {
        /// `regular:k`, `regular:k1,k2,..` (bottom level first) or `space:<file>`.
        #[arg(long)]
        from: String,
        /// Tower height for `regular:` sources.
        #[arg(long)]
        height: Option<u32>,
        /// `binary` or an alphabet size.
        #[arg(long, default_value = "binary")]
        to: String,
        /// Radii for `space:` sources; defaults to the realized distances.
        #[arg(long, value_delimiter = ',')]
        radii: Vec<String>,
        /// Include the composite multi-map in the report.
        #[arg(long)]
        with_map: bool,
    },
    /// Compare two degree profiles (or towers) up to coarse equivalence.
    Classify { first: PathBuf, second: PathBuf },
    /// Measurement runs: hyperspace-entropy, ratio-bounded-synthesis,
    /// product-with-sparse-sequence.
    Experiment {
        name: String,
        #[command(flatten)]
        params: ExperimentParams,
    },
}

#[derive(Args, Debug, Clone)]
pub struct ExperimentParams {
    #[arg(long, default_value_t = 2)]
    pub alphabet: u32,
    #[arg(long, default_value_t = 4)]
    pub length: u32,
    /// Hyperspace order.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 7)]
    pub height: u32,
    #[arg(long, default_value_t = 3)]
    pub max_degree: u64,
    /// Chance that a node gets one child more than its level's base degree.
    #[arg(long, default_value_t = 0.1)]
    pub noise: f64,
    /// Window ratio bound `C` in `Deg_i^j <= C deg_i^j`.
    #[arg(long, default_value = "2")]
    pub ratio: String,
    /// Number of squares in the sparse sequence.
    #[arg(long, default_value_t = 4)]
    pub terms: u64,
    /// Chain scales used to ultrametrize the sequence.
    #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
    pub scales: Vec<String>,
}

/// Exit code, rendered output and a diagnostic for stderr.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub output: String,
    pub message: Option<String>,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Outcome {
            code: EXIT_OK,
            output,
            message: None,
        }
    }

    fn with(code: i32, output: String, message: impl Into<String>) -> Self {
        Outcome {
            code,
            output,
            message: Some(message.into()),
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Stage { source, .. } => exit_code(source),
        Error::SizeCap { .. } | Error::Exhausted { .. } => EXIT_EXHAUSTED,
        Error::DegreePrecondition { .. }
        | Error::InfeasiblePartition { .. }
        | Error::Precondition(_)
        | Error::NotAsymorphism(_)
        | Error::Invariant(_) => EXIT_NEGATIVE,
        _ => EXIT_INPUT,
    }
}

fn describe(err: &Error) -> String {
    let mut msg = err.to_string();
    let mut e = err;
    while let Error::Stage { source, .. } = e {
        e = source;
    }
    if let Error::Exhausted {
        suggested_height: Some(h),
        ..
    } = e
    {
        msg.push_str(&format!("; try --height {h} or more"));
    }
    msg
}

/// Parses arguments (without the program name) and runs the command.
pub fn run_args<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("asymorph")).chain(args.into_iter().map(Into::into));
    match RunConfig::try_parse_from(argv) {
        Ok(cfg) => run(&cfg),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            Outcome {
                code,
                output: if code == EXIT_OK { e.to_string() } else { String::new() },
                message: (code != EXIT_OK).then(|| e.to_string()),
            }
        }
    }
}

pub fn run(cfg: &RunConfig) -> Outcome {
    let caps = SizeCaps {
        max_points: cfg.cap,
        ..SizeCaps::default()
    };
    let result = match &cfg.command {
        Command::Validate { input, exhaustive } => cmd_validate(input, *exhaustive, &caps),
        Command::Entropy { input, eps, delta } => cmd_entropy(input, eps, delta, cfg.net, &caps),
        Command::Towerize { input, radii } => cmd_towerize(input, radii, &caps),
        Command::Subtower { input, levels } => cmd_subtower(input, levels),
        Command::Embed { source, target, iso } => cmd_embed(source, target, *iso, &caps),
        Command::Equiv {
            from,
            height,
            to,
            radii,
            with_map,
        } => cmd_equiv(from, *height, to, radii, *with_map, cfg.policy, &caps),
        Command::Classify { first, second } => cmd_classify(first, second),
        Command::Experiment { name, params } => cmd_experiment(name, params, cfg, &caps),
    };
    let outcome = match result {
        Ok(o) => o,
        Err(e) => return Outcome::with(exit_code(&e), String::new(), describe(&e)),
    };
    match &cfg.out {
        Some(path) => match std::fs::write(path, &outcome.output) {
            Ok(()) => Outcome {
                output: String::new(),
                ..outcome
            },
            Err(e) => Outcome::with(EXIT_INPUT, String::new(), format!("cannot write {}: {e}", path.display())),
        },
        None => outcome,
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))
}

fn sha256(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn parse_dists(items: &[String]) -> Result<Vec<Dist>> {
    items.iter().map(|s| parse_dist(s.trim())).collect()
}

enum Input {
    Space(FiniteUltraSpace),
    Tower(RawTower),
    Profile(MarkedProfile),
}

fn load(path: &Path, caps: &SizeCaps) -> Result<Input> {
    let text = read(path)?;
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return Ok(Input::Space(space_from_csv(&text, caps)?));
    }
    let value: serde_json::Value = serde_json::from_str(&text)?;
    if value.get("nodes").is_some() {
        Ok(Input::Tower(serde_json::from_value(value)?))
    } else if value.get("points").is_some() {
        Ok(Input::Space(space_from_json(&text, caps)?))
    } else if value.get("entries").is_some() {
        Ok(Input::Profile(serde_json::from_value(value)?))
    } else {
        Err(Error::Parse(format!(
            "{}: expected a space, tower or degree profile",
            path.display()
        )))
    }
}

fn load_space(path: &Path, caps: &SizeCaps) -> Result<FiniteUltraSpace> {
    match load(path, caps)? {
        Input::Space(s) => Ok(s),
        _ => Err(Error::Parse(format!("{}: not a space", path.display()))),
    }
}

fn load_tower(path: &Path) -> Result<Tower> {
    tower_from_json(&read(path)?)
}

fn cmd_validate(input: &Path, exhaustive: bool, caps: &SizeCaps) -> Result<Outcome> {
    let report = match load(input, caps)? {
        Input::Space(s) if exhaustive => validate_ultrametric_exhaustive(&s),
        Input::Space(s) => validate_ultrametric(&s),
        Input::Tower(raw) => validate_tower(&raw),
        Input::Profile(p) => match p.finite() {
            Ok(f) => f.check_bounds(),
            Err(e) => return Err(e),
        },
    };
    let out = to_json(&report)?;
    Ok(match report.violations.first() {
        None => Outcome::ok(out),
        Some(v) => Outcome::with(
            EXIT_NEGATIVE,
            out,
            format!("{} violation(s); first: {} {:?} {}", report.violations.len(), v.rule, v.witness, v.detail),
        ),
    })
}

fn grid_or_scale(items: &[String], space: &FiniteUltraSpace) -> Result<Vec<Dist>> {
    if items.is_empty() {
        Ok(space.scale().to_vec())
    } else {
        parse_dists(items)
    }
}

fn cmd_entropy(input: &Path, eps: &[String], delta: &[String], net: NetConvention, caps: &SizeCaps) -> Result<Outcome> {
    let space = load_space(input, caps)?;
    let mut eps = grid_or_scale(eps, &space)?;
    if net == NetConvention::Strict {
        // A strict 0-net does not exist.
        eps.retain(|e| *e > int(0));
    }
    let delta = grid_or_scale(delta, &space)?;
    Ok(Outcome::ok(entropy_profile(&space, &eps, &delta, net, caps)?.to_csv()))
}

fn cmd_towerize(input: &Path, radii: &[String], caps: &SizeCaps) -> Result<Outcome> {
    let space = load_space(input, caps)?;
    let radii = grid_or_scale(radii, &space)?;
    let bt = ball_tower(&space, &radii)?;
    Ok(Outcome::ok(tower_to_json(&bt.tower)? + "\n"))
}

fn cmd_subtower(input: &Path, levels: &[u32]) -> Result<Outcome> {
    let tower = load_tower(input)?;
    let sub = level_subtower(&tower, levels)?;
    Ok(Outcome::ok(tower_to_json(&sub.tower)? + "\n"))
}

fn cmd_embed(source: &Path, target: &Path, iso: bool, caps: &SizeCaps) -> Result<Outcome> {
    let (t1, t2) = (load_tower(source)?, load_tower(target)?);
    let emb = tower_embedding(&t1, &t2, iso, caps)?;
    let out = to_json(&emb)?;
    Ok(if emb.certificate.passed() {
        Outcome::ok(out)
    } else {
        Outcome::with(EXIT_NEGATIVE, out, "embedding checks failed")
    })
}

/// Parses `regular:k` or `regular:k1,k2,..`; a single degree is repeated up
/// to `height - 1` levels.
pub fn regular_degrees(spec: &str, height: Option<u32>) -> Result<(Vec<u64>, u32)> {
    let body = spec
        .strip_prefix("regular:")
        .ok_or_else(|| Error::Parse(format!("unknown source `{spec}`")))?;
    let ks: Vec<u64> = body
        .split(',')
        .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad degree `{s}`"))))
        .collect::<Result<_>>()?;
    match (ks.len(), height) {
        (0, _) => Err(Error::Parse("no degrees given".into())),
        (1, h) => {
            let h = h.unwrap_or(8);
            if h == 0 {
                return Err(Error::Parse("height must be positive".into()));
            }
            Ok((vec![ks[0]; h as usize - 1], h))
        }
        (n, None) => Ok((ks, n as u32 + 1)),
        (n, Some(h)) if n as u32 + 1 == h => Ok((ks, h)),
        (n, Some(h)) => Err(Error::Parse(format!("{n} degrees do not fit height {h}"))),
    }
}

#[derive(Serialize)]
struct EquivOutput<R: Serialize> {
    source: String,
    report: R,
    #[serde(skip_serializing_if = "Option::is_none")]
    composite: Option<MultiMapJson>,
}

fn cmd_equiv(
    from: &str,
    height: Option<u32>,
    to: &str,
    radii: &[String],
    with_map: bool,
    policy: SynthesisPolicy,
    caps: &SizeCaps,
) -> Result<Outcome> {
    let target_base = match to {
        "binary" => 2,
        s => match s.parse::<u64>() {
            Ok(b) if b >= 2 => b,
            _ => return Err(Error::Parse(format!("unknown target `{s}`"))),
        },
    };
    let mut opts = PipelineOptions {
        target_base,
        policy,
        caps: *caps,
        input_hash: None,
    };
    let (out, passed) = if let Some(file) = from.strip_prefix("space:") {
        let text = read(Path::new(file))?;
        opts.input_hash = Some(sha256(text.as_bytes()));
        let space = load_space(Path::new(file), caps)?;
        let radii = grid_or_scale(radii, &space)?;
        let run = space_equivalence(&space, &radii, None, &opts)?;
        let passed = run.report.composed.is_asymorphism() && run.report.composed.passed();
        let out = EquivOutput {
            source: from.to_string(),
            composite: with_map.then(|| run.composite.to_json()),
            report: run.report,
        };
        (to_json(&out)?, passed)
    } else {
        let (ks, h) = regular_degrees(from, height)?;
        opts.input_hash = Some(sha256(format!("{from} height={h}").as_bytes()));
        let tower = regular_tower(&ks, h, caps)?;
        let run = equivalence_pipeline(&tower, None, &opts)?;
        let passed = run.report.composed.is_asymorphism() && run.report.composed.passed();
        let out = EquivOutput {
            source: format!("{from} height={h}"),
            composite: with_map.then(|| run.composite.to_json()),
            report: run.report,
        };
        (to_json(&out)?, passed)
    };
    Ok(if passed {
        Outcome::ok(out)
    } else {
        Outcome::with(EXIT_NEGATIVE, out, "composed certificate is not an asymorphism")
    })
}

fn load_profile(path: &Path) -> Result<MarkedProfile> {
    match load(path, &SizeCaps::default())? {
        Input::Profile(p) => Ok(p),
        Input::Tower(raw) => Ok((&degree_profile(&Tower::new(raw)?)).into()),
        Input::Space(_) => Err(Error::Parse(format!("{}: expected a profile or tower", path.display()))),
    }
}

fn cmd_classify(first: &Path, second: &Path) -> Result<Outcome> {
    let verdict = classify(&load_profile(first)?, &load_profile(second)?)?;
    let out = to_json(&verdict)?;
    Ok(match verdict {
        Verdict::NotEquivalent { reason } => Outcome::with(EXIT_NEGATIVE, out, reason),
        _ => Outcome::ok(out),
    })
}

fn cmd_experiment(name: &str, p: &ExperimentParams, cfg: &RunConfig, caps: &SizeCaps) -> Result<Outcome> {
    match name {
        "hyperspace-entropy" => hyperspace_entropy(p, cfg.net, caps),
        "ratio-bounded-synthesis" => ratio_bounded_synthesis(p, cfg.seed, cfg.policy),
        "product-with-sparse-sequence" => sparse_product(p, cfg.net, caps),
        other => Err(Error::Parse(format!(
            "unknown experiment `{other}` (hyperspace-entropy, ratio-bounded-synthesis, product-with-sparse-sequence)"
        ))),
    }
}

fn profile_csv(space: &FiniteUltraSpace, net: NetConvention, caps: &SizeCaps) -> Result<String> {
    let mut eps = space.scale().to_vec();
    if net == NetConvention::Strict {
        eps.retain(|e| *e > int(0));
    }
    Ok(entropy_profile(space, &eps, space.scale(), net, caps)?.to_csv())
}

/// Entropy profile of `exp_{<=n}(word(a, L))`.
pub fn hyperspace_entropy(p: &ExperimentParams, net: NetConvention, caps: &SizeCaps) -> Result<Outcome> {
    let base = word_space(&WordSpaceSpec::new(p.alphabet, p.length), caps)?;
    let h = hyperspace(&base, p.n, caps)?;
    Ok(Outcome::ok(profile_csv(&h, net, caps)?))
}

/// `{1, 4, 9, ..}` with `|a - b|`, chain-ultrametrized at the given scales.
pub fn sparse_sequence(terms: u64, scales: &[Dist], caps: &SizeCaps) -> Result<FiniteUltraSpace> {
    let values: Vec<i64> = (1..=terms as i64).map(|k| k * k).collect();
    let ids = values.iter().map(|v| v.to_string()).collect();
    let line = FiniteUltraSpace::from_fn(ids, caps, |i, j| int((values[i] - values[j]).abs()))?;
    Ok(ultrametrize(&line, scales, caps)?.with_name("sparse"))
}

/// Entropy profile of `word(a, L) × S`.
pub fn sparse_product(p: &ExperimentParams, net: NetConvention, caps: &SizeCaps) -> Result<Outcome> {
    let scales = parse_dists(&p.scales)?;
    let s = sparse_sequence(p.terms, &scales, caps)?;
    let w = word_space(&WordSpaceSpec::new(p.alphabet, p.length), caps)?;
    let x = product(&w, &s, caps)?;
    Ok(Outcome::ok(profile_csv(&x, net, caps)?))
}

/// Random single-germ tower: level `l` draws a base degree in
/// `2..=max_degree` and each node at that level takes it, or one more with
/// probability `noise`.
pub fn random_tower(height: u32, max_degree: u64, noise: f64, rng: &mut impl Rng) -> Result<Tower> {
    let mut nodes = vec![RawNode {
        id: format!("{height}:0"),
        level: height,
        parent: None,
    }];
    let mut frontier = vec![format!("{height}:0")];
    for level in (1..height).rev() {
        let k = rng.gen_range(2..=max_degree.max(2));
        let mut next = Vec::new();
        for parent in &frontier {
            let d = if rng.gen_bool(noise) { k + 1 } else { k };
            for _ in 0..d {
                let id = format!("{level}:{:06}", next.len());
                nodes.push(RawNode {
                    id: id.clone(),
                    level,
                    parent: Some(parent.clone()),
                });
                next.push(id);
            }
        }
        frontier = next;
    }
    Tower::new(RawTower { height, nodes })
}

/// For random towers: the largest window ratio `Deg_i^j / deg_i^j`, whether
/// it stays under `C`, the per-level product bound and the synthesis result.
pub fn ratio_bounded_synthesis(p: &ExperimentParams, seed: u64, policy: SynthesisPolicy) -> Result<Outcome> {
    let c = asymorph::rational::parse_big(&p.ratio)?;
    if p.height < 2 || !(0.0..=1.0).contains(&p.noise) {
        return Err(Error::Parse("need --height >= 2 and --noise in [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from("trial,leaves,window_ratio,ratio_bounded,product_bound,outcome,steps\n");
    for trial in 0..p.trials {
        let tower = random_tower(p.height, p.max_degree, p.noise, &mut rng)?;
        let profile = degree_profile(&tower);
        let mut window = asymorph::Big::from_integer(1.into());
        for e in profile.entries() {
            let r = asymorph::Big::new(e.large.into(), e.small.into());
            if r > window {
                window = r;
            }
        }
        let bound = asymptotic_homogeneity(&profile)?.bound;
        let witness = HomogeneityWitness::default_for(&profile)?;
        let (outcome, steps) = match synthesize_sequences(&profile, 2, &witness, policy) {
            Ok(s) => ("ok".to_string(), s.steps()),
            Err(Error::Exhausted { steps, .. }) => ("exhausted".to_string(), steps),
            Err(e) => (format!("error:{}", exit_code(&e)), 0),
        };
        out.push_str(&format!(
            "{trial},{},{window},{},{bound},{outcome},{steps}\n",
            tower.base().len(),
            window <= c
        ));
    }
    Ok(Outcome::ok(out))
}
